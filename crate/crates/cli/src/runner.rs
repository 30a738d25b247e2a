//! Scenario dispatch and parameter sweeps.

use std::time::Instant;

use rayon::prelude::*;
use wgqed_core::chain::{self, EmitterChain, Jitter};
use wgqed_core::emitter::{self, Drive, FluxMapping, TwoLevelEmitter};
use wgqed_core::multilevel::{self, BeatOptions, LambdaSystem, PumpField};
use wgqed_core::statistics::{self, Port};

use crate::config::{ExperimentConfig, SweepAxis};
use crate::error::CliError;
use crate::scenario::{Column, Scenario};

pub const TOOL: &str = "wgqed";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
}

impl Cell {
    pub fn as_f64(self) -> f64 {
        match self {
            Cell::Float(x) => x,
            Cell::Int(n) => n as f64,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

/// Named columns and row-major data.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<Column>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Values of one column as floats.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i].as_f64()).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    /// Canonical configuration text; enough to reproduce the run.
    pub config: String,
    pub seed: u64,
    /// Seconds; only recorded on request since it breaks byte-identical output.
    pub wall_time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultEnvelope {
    pub metadata: Metadata,
    pub table: Table,
}

fn physics<T>(scenario: Scenario, r: wgqed_core::Result<T>) -> Result<T, CliError> {
    r.map_err(|source| CliError::Physics {
        scenario: scenario.name(),
        source,
    })
}

fn envelope(config: &ExperimentConfig, table: Table) -> ResultEnvelope {
    ResultEnvelope {
        metadata: Metadata {
            tool: TOOL.to_string(),
            version: VERSION.to_string(),
            config: config.to_text(),
            seed: config.seed,
            wall_time: None,
        },
        table,
    }
}

/// Runs the configured sweep if there is one, a single evaluation otherwise.
pub fn execute(config: &ExperimentConfig, timing: bool) -> Result<ResultEnvelope, CliError> {
    let start = Instant::now();
    let mut out = match &config.sweep {
        Some(axis) => sweep(config, axis)?,
        None => run(config)?,
    };
    if timing {
        out.metadata.wall_time = Some(start.elapsed().as_secs_f64());
    }
    Ok(out)
}

/// Single evaluation of the scenario; any sweep section is ignored.
pub fn run(config: &ExperimentConfig) -> Result<ResultEnvelope, CliError> {
    let mut single = config.clone();
    single.sweep = None;
    let table = evaluate(&single)?;
    Ok(envelope(&single, table))
}

/// One row group per axis value, prefixed by a column holding that value.
pub fn sweep(config: &ExperimentConfig, axis: &SweepAxis) -> Result<ResultEnvelope, CliError> {
    let values = axis.values();
    let configs = values
        .iter()
        .map(|&v| config.with_float(&axis.param, v))
        .collect::<Result<Vec<_>, _>>()?;
    let tables = configs.par_iter().map(evaluate).collect::<Result<Vec<_>, _>>()?;

    let unit = config
        .scenario
        .params()
        .iter()
        .find(|s| s.key == axis.param)
        .map(|s| param_unit(s.key))
        .unwrap_or("1");
    let mut columns = vec![Column::new(&axis.param, unit)];
    columns.extend(config.scenario.columns());
    let mut table = Table::new(columns);
    for (&v, t) in values.iter().zip(tables) {
        for row in t.rows {
            let mut full = Vec::with_capacity(row.len() + 1);
            full.push(Cell::Float(v));
            full.extend(row);
            table.push(full);
        }
    }
    let mut echoed = config.clone();
    echoed.sweep = Some(axis.clone());
    Ok(envelope(&echoed, table))
}

fn param_unit(key: &str) -> &'static str {
    match key {
        "beta" => "1",
        "spacing" | "jitter" => "rad",
        "flux_coefficient" => "1",
        _ => "Γ",
    }
}

fn grid(config: &ExperimentConfig) -> Vec<f64> {
    let spacing = crate::config::Spacing::parse(config.text("grid.spacing")).expect("validated spacing");
    spacing.points(
        config.float("grid.min"),
        config.float("grid.max"),
        config.count("grid.count"),
    )
}

fn two_level(config: &ExperimentConfig) -> Result<TwoLevelEmitter, CliError> {
    physics(
        config.scenario,
        TwoLevelEmitter::natural(config.float("beta"), config.float("deph")),
    )
}

fn distribution(config: &ExperimentConfig) -> Jitter {
    match config.text("distribution") {
        "gaussian" => Jitter::Gaussian,
        _ => Jitter::Uniform,
    }
}

fn f(x: f64) -> Cell {
    Cell::Float(x)
}

/// The scenario's data table; parallelism happens inside the physics calls.
pub fn evaluate(config: &ExperimentConfig) -> Result<Table, CliError> {
    let s = config.scenario;
    let mut table = Table::new(s.columns());
    match s {
        Scenario::Spectrum => {
            let e = two_level(config)?;
            let trace = physics(s, emitter::spectrum_sweep(&e, config.float("rabi"), &grid(config)))?;
            for (d, c) in trace.iter() {
                table.push(vec![f(d), f(c.transmittance), f(c.reflectance), f(c.loss)]);
            }
        }
        Scenario::Saturation => {
            let e = two_level(config)?;
            let mapping = physics(s, FluxMapping::new(config.float("flux_coefficient")))?;
            let curve = physics(s, emitter::saturation_curve(&e, &grid(config), mapping))?;
            for pt in curve {
                let sat = emitter::saturation_parameter(&e, pt.rabi);
                table.push(vec![f(pt.flux), f(pt.rabi), f(sat), f(pt.extinction), f(pt.fwhm)]);
            }
        }
        Scenario::G2 => {
            let e = two_level(config)?;
            let drive = physics(s, Drive::new(config.float("detuning"), config.float("rabi")))?;
            let port = match config.text("port") {
                "reflected" => Port::Reflected,
                _ => Port::Transmitted,
            };
            let taus = grid(config);
            let analytic = physics(s, statistics::g2_analytic(&e, &taus))?;
            let numeric = physics(s, statistics::g2_numeric(&e, &drive, port, &taus))?;
            for ((t, a), n) in analytic.iter().zip(numeric.values()) {
                table.push(vec![f(t), f(*a), f(n.re), f(n.im)]);
            }
        }
        Scenario::BunchingMap => {
            let axis = |name: &str| {
                wgqed_core::trace::linspace(
                    config.float(&format!("{name}.min")),
                    config.float(&format!("{name}.max")),
                    config.count(&format!("{name}.count")),
                )
            };
            let (betas, dephs) = (axis("beta"), axis("deph"));
            let map = physics(s, statistics::bunching_map(&betas, &dephs))?;
            for (i, &deph) in map.deph_grid.iter().enumerate() {
                for (j, &beta) in map.beta_grid.iter().enumerate() {
                    table.push(vec![f(deph), f(beta), f(map.get(i, j))]);
                }
            }
        }
        Scenario::PumpProbe => {
            let e = two_level(config)?;
            let pump = physics(s, PumpField::new(config.float("pump_rabi"), config.float("pump_detuning")))?;
            let trace = physics(
                s,
                multilevel::pump_probe_spectrum(&e, &pump, &grid(config), config.float("probe_rabi")),
            )?;
            for (d, r) in trace.iter() {
                table.push(vec![f(d), f(r.transmittance), f(r.amplitude.re), f(r.amplitude.im)]);
            }
        }
        Scenario::Beat => {
            let e = two_level(config)?;
            let pump = physics(s, PumpField::new(config.float("pump_rabi"), config.float("pump_detuning")))?;
            let probe = physics(s, Drive::new(config.float("probe_detuning"), config.float("probe_rabi")))?;
            let options = BeatOptions {
                periods: config.count("periods"),
                samples_per_period: config.count("samples_per_period"),
                transient: config.float("transient"),
                ..BeatOptions::default()
            };
            let spec = physics(s, multilevel::bichromatic_beat_spectrum(&e, &pump, &probe, &options))?;
            for (w, p) in spec.frequencies.iter().zip(&spec.power) {
                table.push(vec![f(*w), f(*p)]);
            }
        }
        Scenario::Eit => {
            let system = physics(
                s,
                LambdaSystem::new(
                    config.float("gamma_31"),
                    config.float("gamma_32"),
                    config.float("gamma_12"),
                    config.float("control_rabi"),
                    config.float("control_detuning"),
                    config.float("beta"),
                ),
            )?;
            let trace = physics(s, multilevel::eit_spectrum(&system, &grid(config), config.float("probe_rabi")))?;
            for (d, r) in trace.iter() {
                table.push(vec![
                    f(d),
                    f(r.absorption),
                    f(r.transmittance),
                    f(r.coherence.re),
                    f(r.coherence.im),
                ]);
            }
        }
        Scenario::Chain => {
            let c = regular_chain(config)?;
            let tr = physics(s, chain::chain_transport(&c, &grid(config)))?;
            let (t, r, l) = (tr.transmittance(), tr.reflectance(), tr.loss());
            for i in 0..tr.detunings.len() {
                table.push(vec![
                    f(tr.detunings[i]),
                    f(t[i]),
                    f(r[i]),
                    f(l[i]),
                    Cell::Int(tr.flagged[i] as i64),
                ]);
            }
        }
        Scenario::Modes => {
            let mut c = regular_chain(config)?;
            let jitter = config.float("jitter");
            if jitter > 0.0 {
                // sample 0 of the ensemble with the same seed
                let ens = physics(
                    s,
                    chain::disorder_ensemble(&c, jitter, distribution(config), 1, config.seed, &[0.0]),
                )?;
                c = physics(s, EmitterChain::new(ens.phases[0].clone(), c.beta(), c.gamma_total()))?;
            }
            let modes = physics(s, chain::collective_modes(&c))?;
            for k in 0..modes.decay_rates.len() {
                table.push(vec![
                    Cell::Int(k as i64),
                    f(modes.decay_rates[k]),
                    f(modes.shifts[k]),
                    f(modes.eigenvalues[k].re),
                    f(modes.eigenvalues[k].im),
                ]);
            }
        }
        Scenario::Ensemble => {
            let c = regular_chain(config)?;
            let g = grid(config);
            let ens = physics(
                s,
                chain::disorder_ensemble(
                    &c,
                    config.float("jitter"),
                    distribution(config),
                    config.count("samples"),
                    config.seed,
                    &g,
                ),
            )?;
            let regular = physics(s, chain::chain_transport(&c, &g))?.reflectance();
            let (t, r) = (&ens.transmittance, &ens.reflectance);
            for i in 0..g.len() {
                table.push(vec![
                    f(g[i]),
                    f(t.mean[i]),
                    f(t.p10[i]),
                    f(t.p50[i]),
                    f(t.p90[i]),
                    f(r.mean[i]),
                    f(r.p10[i]),
                    f(r.p50[i]),
                    f(r.p90[i]),
                    f(regular[i]),
                ]);
            }
        }
    }
    Ok(table)
}

fn regular_chain(config: &ExperimentConfig) -> Result<EmitterChain, CliError> {
    physics(
        config.scenario,
        EmitterChain::regular(config.count("n"), config.float("spacing"), config.float("beta"), 1.0),
    )
}
