//! Command implementations behind the `grandsim` binary.

pub mod cli;
pub mod cmd_exponents;
pub mod cmd_simulate;
pub mod cmd_thresholds;
pub mod config;
pub mod grids;
pub mod oracle;
pub mod output;
pub mod svg;

/// Bundled sweep configs, addressable by name via `--config`.
pub fn builtin_config(name: &str) -> Option<&'static str> {
    match name {
        "fig2_rlc_128_116" => Some(include_str!("../configs/fig2_rlc_128_116.cfg")),
        "fig5_rlc_192_174" => Some(include_str!("../configs/fig5_rlc_192_174.cfg")),
        _ => None,
    }
}
