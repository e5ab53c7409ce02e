//! Logical elementary-operation accounting.

use std::ops::{Add, AddAssign};

/// Tally of logical arithmetic performed by an algorithm: scalar multiplies
/// and scalar additions/subtractions. "Logical" means one complex multiply
/// counts once, regardless of how many float operations realize it, so
/// counts are comparable across scalar kinds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCounter {
    pub multiplies: u64,
    pub additions: u64,
}

impl OpCounter {
    pub fn new() -> Self {
        OpCounter::default()
    }

    pub fn record_mults(&mut self, n: u64) {
        self.multiplies += n;
    }

    pub fn record_adds(&mut self, n: u64) {
        self.additions += n;
    }

    /// Merge another tally in; merging is associative and commutative, so
    /// per-block tallies can be combined in any order.
    pub fn merge(&mut self, other: OpCounter) {
        self.multiplies += other.multiplies;
        self.additions += other.additions;
    }

    pub fn total(&self) -> u64 {
        self.multiplies + self.additions
    }
}

impl Add for OpCounter {
    type Output = OpCounter;

    fn add(mut self, rhs: OpCounter) -> OpCounter {
        self.merge(rhs);
        self
    }
}

impl AddAssign for OpCounter {
    fn add_assign(&mut self, rhs: OpCounter) {
        self.merge(rhs);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_sums_fields() {
        let mut a = OpCounter { multiplies: 3, additions: 5 };
        a.merge(OpCounter { multiplies: 10, additions: 1 });
        assert_eq!(a, OpCounter { multiplies: 13, additions: 6 });
        assert_eq!(a.total(), 19);
    }

    #[test]
    fn merge_order_does_not_matter() {
        let parts = [
            OpCounter { multiplies: 1, additions: 2 },
            OpCounter { multiplies: 30, additions: 40 },
            OpCounter { multiplies: 500, additions: 600 },
        ];
        let forward = parts.iter().fold(OpCounter::new(), |acc, &p| acc + p);
        let backward = parts.iter().rev().fold(OpCounter::new(), |acc, &p| acc + p);
        assert_eq!(forward, backward);
    }
}
