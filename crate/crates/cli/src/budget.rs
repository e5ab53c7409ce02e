//! `gridmul budget`: shared-memory footprint of a tile configuration
//! against a device profile's per-block limit.

use gridmul_core::engine::{shared_budget, DeviceProfile};

use crate::{BudgetArgs, CliError};

/// clap value parser for `--profile`.
pub fn parse_profile(s: &str) -> Result<DeviceProfile, String> {
    DeviceProfile::by_name(s).ok_or_else(|| format!("unknown profile '{s}' (legacy, modern)"))
}

pub fn run(args: BudgetArgs) -> Result<(), CliError> {
    let bytes = shared_budget(args.block, args.tiles, args.elem_bytes);
    let limit = args.profile.shared_bytes_per_block;
    if bytes <= limit {
        println!("{bytes} B, fits ({limit} B limit)");
        Ok(())
    } else {
        println!("{bytes} B, exceeds ({limit} B limit)");
        Err(CliError::Infeasible(format!(
            "{bytes} B of shared scratch is over the {limit} B limit of the {} profile",
            args.profile.label
        )))
    }
}
