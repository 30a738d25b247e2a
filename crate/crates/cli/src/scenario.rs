//! Scenario catalogue: parameters, defaults and output columns.

use std::collections::BTreeMap;

use crate::config::{Spacing, Value};
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    Spectrum,
    Saturation,
    G2,
    BunchingMap,
    PumpProbe,
    Beat,
    Eit,
    Chain,
    Modes,
    Ensemble,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Real,
    NonNegative,
    Positive,
    /// Closed unit interval.
    Unit,
    /// Integer with a lower bound.
    Count(u64),
    Choice(&'static [&'static str]),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamSpec {
    pub key: &'static str,
    pub kind: Kind,
    /// `None` marks a required parameter.
    pub default: Option<&'static str>,
}

impl ParamSpec {
    /// Real-valued scalars can be swept; grid bounds and counts cannot.
    pub fn sweepable(&self) -> bool {
        !self.key.contains('.')
            && matches!(self.kind, Kind::Real | Kind::NonNegative | Kind::Positive | Kind::Unit)
    }
}

/// Output column with its unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub name: String,
    pub unit: String,
}

impl Column {
    pub fn new(name: &str, unit: &str) -> Self {
        Self {
            name: name.to_string(),
            unit: unit.to_string(),
        }
    }
}

const fn p(key: &'static str, kind: Kind, default: Option<&'static str>) -> ParamSpec {
    ParamSpec { key, kind, default }
}

const SPACING: Kind = Kind::Choice(&["linear", "log"]);
const PI: Option<&str> = Some("3.141592653589793");

macro_rules! grid {
    ($min:literal, $max:literal, $count:literal, $spacing:literal) => {
        [
            p("grid.min", Kind::Real, Some($min)),
            p("grid.max", Kind::Real, Some($max)),
            p("grid.count", Kind::Count(1), Some($count)),
            p("grid.spacing", SPACING, Some($spacing)),
        ]
    };
}

const fn join<const A: usize, const B: usize, const N: usize>(a: [ParamSpec; A], b: [ParamSpec; B]) -> [ParamSpec; N] {
    assert!(A + B == N);
    let mut out = [p("", Kind::Real, None); N];
    let mut i = 0;
    while i < A {
        out[i] = a[i];
        i += 1;
    }
    while i < N {
        out[i] = b[i - A];
        i += 1;
    }
    out
}

const SPECTRUM: [ParamSpec; 7] = join(
    [
        p("beta", Kind::Unit, None),
        p("deph", Kind::NonNegative, Some("0")),
        p("rabi", Kind::NonNegative, Some("0")),
    ],
    grid!("-10", "10", "1001", "linear"),
);

const SATURATION: [ParamSpec; 7] = join(
    [
        p("beta", Kind::Unit, None),
        p("deph", Kind::NonNegative, Some("0")),
        p("flux_coefficient", Kind::Positive, Some("2")),
    ],
    grid!("1e-4", "100", "61", "log"),
);

const G2: [ParamSpec; 9] = join(
    [
        p("beta", Kind::Unit, None),
        p("deph", Kind::NonNegative, Some("0")),
        p("rabi", Kind::Positive, Some("0.001")),
        p("detuning", Kind::Real, Some("0")),
        p("port", Kind::Choice(&["transmitted", "reflected"]), Some("transmitted")),
    ],
    grid!("0", "10", "201", "linear"),
);

const BUNCHING_MAP: [ParamSpec; 6] = [
    p("beta.min", Kind::Unit, Some("0")),
    p("beta.max", Kind::Unit, Some("0.99")),
    p("beta.count", Kind::Count(1), Some("100")),
    p("deph.min", Kind::NonNegative, Some("0")),
    p("deph.max", Kind::NonNegative, Some("1")),
    p("deph.count", Kind::Count(1), Some("101")),
];

const PUMP_PROBE: [ParamSpec; 9] = join(
    [
        p("beta", Kind::Unit, None),
        p("deph", Kind::NonNegative, Some("0")),
        p("pump_rabi", Kind::NonNegative, None),
        p("pump_detuning", Kind::Real, None),
        p("probe_rabi", Kind::Positive, Some("0.001")),
    ],
    grid!("-20", "20", "2001", "linear"),
);

const BEAT: [ParamSpec; 9] = [
    p("beta", Kind::Unit, None),
    p("deph", Kind::NonNegative, Some("0")),
    p("pump_rabi", Kind::NonNegative, None),
    p("pump_detuning", Kind::Real, Some("0")),
    p("probe_rabi", Kind::Positive, None),
    p("probe_detuning", Kind::Real, None),
    p("periods", Kind::Count(50), Some("64")),
    p("samples_per_period", Kind::Count(4), Some("32")),
    p("transient", Kind::NonNegative, Some("20")),
];

const EIT: [ParamSpec; 11] = join(
    [
        p("gamma_31", Kind::NonNegative, None),
        p("gamma_32", Kind::NonNegative, None),
        p("gamma_12", Kind::NonNegative, Some("0")),
        p("control_rabi", Kind::NonNegative, None),
        p("control_detuning", Kind::Real, Some("0")),
        p("beta", Kind::Unit, None),
        p("probe_rabi", Kind::Positive, Some("0.001")),
    ],
    grid!("-3", "3", "601", "linear"),
);

const CHAIN: [ParamSpec; 7] = join(
    [
        p("n", Kind::Count(1), None),
        p("beta", Kind::Unit, None),
        p("spacing", Kind::Real, PI),
    ],
    grid!("-10", "10", "1001", "linear"),
);

const DISTRIBUTION: Kind = Kind::Choice(&["uniform", "gaussian"]);

const MODES: [ParamSpec; 5] = [
    p("n", Kind::Count(1), None),
    p("beta", Kind::Unit, None),
    p("spacing", Kind::Real, PI),
    p("jitter", Kind::NonNegative, Some("0")),
    p("distribution", DISTRIBUTION, Some("uniform")),
];

const ENSEMBLE: [ParamSpec; 10] = join(
    [
        p("n", Kind::Count(1), None),
        p("beta", Kind::Unit, None),
        p("spacing", Kind::Real, PI),
        p("jitter", Kind::NonNegative, None),
        p("distribution", DISTRIBUTION, Some("uniform")),
        p("samples", Kind::Count(1), Some("100")),
    ],
    grid!("-5", "5", "1001", "linear"),
);

pub const ALL: [Scenario; 10] = [
    Scenario::Spectrum,
    Scenario::Saturation,
    Scenario::G2,
    Scenario::BunchingMap,
    Scenario::PumpProbe,
    Scenario::Beat,
    Scenario::Eit,
    Scenario::Chain,
    Scenario::Modes,
    Scenario::Ensemble,
];

impl Scenario {
    pub fn parse(name: &str) -> Option<Self> {
        ALL.into_iter().find(|s| s.name() == name)
    }

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Spectrum => "spectrum",
            Scenario::Saturation => "saturation",
            Scenario::G2 => "g2",
            Scenario::BunchingMap => "bunching-map",
            Scenario::PumpProbe => "pump-probe",
            Scenario::Beat => "beat",
            Scenario::Eit => "eit",
            Scenario::Chain => "chain",
            Scenario::Modes => "modes",
            Scenario::Ensemble => "ensemble",
        }
    }

    /// Parameters in echo order: unsectioned keys first, then each section contiguously.
    pub fn params(self) -> &'static [ParamSpec] {
        match self {
            Scenario::Spectrum => &SPECTRUM,
            Scenario::Saturation => &SATURATION,
            Scenario::G2 => &G2,
            Scenario::BunchingMap => &BUNCHING_MAP,
            Scenario::PumpProbe => &PUMP_PROBE,
            Scenario::Beat => &BEAT,
            Scenario::Eit => &EIT,
            Scenario::Chain => &CHAIN,
            Scenario::Modes => &MODES,
            Scenario::Ensemble => &ENSEMBLE,
        }
    }

    pub fn columns(self) -> Vec<Column> {
        let c = Column::new;
        match self {
            Scenario::Spectrum | Scenario::Chain => {
                let mut cols = vec![
                    c("detuning", "Γ"),
                    c("transmittance", "1"),
                    c("reflectance", "1"),
                    c("loss", "1"),
                ];
                if self == Scenario::Chain {
                    cols.push(c("flagged", "0/1"));
                }
                cols
            }
            Scenario::Saturation => vec![
                c("flux", "Γ"),
                c("rabi", "Γ"),
                c("saturation", "1"),
                c("extinction", "1"),
                c("fwhm", "Γ"),
            ],
            Scenario::G2 => vec![
                c("tau", "1/Γ"),
                c("g2_analytic", "1"),
                c("g2_numeric", "1"),
                c("g2_numeric_imag", "1"),
            ],
            Scenario::BunchingMap => vec![c("deph", "Γ"), c("beta", "1"), c("g2_zero", "1")],
            Scenario::PumpProbe => vec![
                c("detuning", "Γ"),
                c("transmittance", "1"),
                c("amplitude_re", "1"),
                c("amplitude_im", "1"),
            ],
            Scenario::Beat => vec![c("frequency", "Γ"), c("power", "1")],
            Scenario::Eit => vec![
                c("detuning", "Γ"),
                c("absorption", "1/Γ"),
                c("transmittance", "1"),
                c("coherence_re", "1/Γ"),
                c("coherence_im", "1/Γ"),
            ],
            Scenario::Modes => vec![
                c("mode", "index"),
                c("decay_rate", "Γ"),
                c("shift", "Γ"),
                c("eigenvalue_re", "Γ"),
                c("eigenvalue_im", "Γ"),
            ],
            Scenario::Ensemble => {
                let mut cols = vec![c("detuning", "Γ")];
                for q in ["t", "r"] {
                    for s in ["mean", "p10", "p50", "p90"] {
                        cols.push(c(&format!("{q}_{s}"), "1"));
                    }
                }
                cols.push(c("r_regular", "1"));
                cols
            }
        }
    }

    /// Checks that involve several parameters at once.
    pub(crate) fn check_consistency(self, params: &BTreeMap<String, Value>) -> Result<(), CliError> {
        let float = |k: &str| match params.get(k) {
            Some(Value::Float(x)) => *x,
            _ => f64::NAN,
        };
        let count = |k: &str| match params.get(k) {
            Some(Value::Count(n)) => *n,
            _ => 0,
        };
        let fail = |key: &str, constraint: &str, value: f64| CliError::Constraint {
            key: key.to_string(),
            constraint: constraint.to_string(),
            value: crate::config::render_float(value),
        };
        for axis in ["grid", "beta", "deph"] {
            let (min_key, max_key) = (format!("{axis}.min"), format!("{axis}.max"));
            if !params.contains_key(&min_key) {
                continue;
            }
            let (min, max) = (float(&min_key), float(&max_key));
            if count(&format!("{axis}.count")) > 1 && max <= min {
                return Err(fail(&max_key, &format!("must exceed {min_key}"), max));
            }
            let log = matches!(params.get("grid.spacing"), Some(Value::Text(s)) if Spacing::parse(s) == Some(Spacing::Log));
            if axis == "grid" && log && min <= 0.0 {
                return Err(fail(&min_key, "must be > 0 for log spacing", min));
            }
        }
        if matches!(self, Scenario::G2 | Scenario::Saturation) && float("grid.min") < 0.0 {
            return Err(fail("grid.min", "must be >= 0", float("grid.min")));
        }
        if self == Scenario::Beat && float("probe_detuning") == float("pump_detuning") {
            return Err(fail(
                "probe_detuning",
                "must differ from pump_detuning",
                float("probe_detuning"),
            ));
        }
        Ok(())
    }
}
