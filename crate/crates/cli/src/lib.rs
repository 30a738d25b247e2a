//! Configuration, scenario dispatch and output for the `wgqed` runner.
//!
//! All rates and detunings are in units of the total emitter decay rate Γ and
//! emitter positions are propagation phases in radians.

pub mod config;
pub mod emit;
pub mod error;
pub mod runner;
pub mod scenario;

pub use config::{parse_config, Entries, ExperimentConfig, Spacing, SweepAxis, Value};
pub use emit::{emit, parse_json, Format};
pub use error::CliError;
pub use runner::{execute, run, sweep, Cell, Metadata, ResultEnvelope, Table};
pub use scenario::Scenario;

/// Parameter reference for `--help`.
pub fn scenario_help() -> String {
    let mut out = String::from(
        "Units: all rates, detunings and frequencies in units of Γ, times in 1/Γ, positions in radians of propagation phase.\n\nScenarios and parameters (* required):\n",
    );
    for s in scenario::ALL {
        let keys: Vec<String> = s
            .params()
            .iter()
            .map(|p| match p.default {
                Some(d) => format!("{}={d}", p.key),
                None => format!("{}*", p.key),
            })
            .collect();
        let cols: Vec<String> = s.columns().into_iter().map(|c| c.name).collect();
        out.push_str(&format!("  {}\n    {}\n    -> {}\n", s.name(), keys.join(" "), cols.join(",")));
    }
    out.push_str("\nAny parameter can be given as --key value or --key=value; a [sweep] section (param, min, max, count, spacing) repeats the run over one numeric parameter.\n");
    out
}
