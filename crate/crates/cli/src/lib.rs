//! Report builders behind the `syncmdp` command.

pub mod analyze;
pub mod encode;
pub mod error;
pub mod gate;
pub mod regions;
pub mod render;
pub mod report;
pub mod verify;
pub mod witness;

pub use analyze::{analyze, AnalyzeOptions};
pub use error::CliError;
pub use regions::{regions, Region};
pub use report::Report;
pub use verify::{verify, VerifyOptions};

use syncmdp::{SyncMode, WinMode};

/// Parses `MODE:WINMODE`, e.g. `eventually:limit-sure`.
pub fn parse_query(s: &str) -> Result<(SyncMode, WinMode), String> {
    let (mode, win) = s
        .split_once(':')
        .ok_or_else(|| format!("expected MODE:WINMODE, got {s:?}"))?;
    Ok((mode.parse()?, win.parse()?))
}
