//! Key-value experiment configuration.
//!
//! ```text
//! # comment
//! scenario = spectrum
//! beta = 0.9
//! [grid]          # later keys are read as grid.<key>
//! count = 1001
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::CliError;
use crate::scenario::{Kind, ParamSpec, Scenario};

/// A validated parameter value.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Float(f64),
    Count(u64),
    Text(String),
}

impl Value {
    fn render(&self) -> String {
        match self {
            Value::Float(x) => render_float(*x),
            Value::Count(n) => n.to_string(),
            Value::Text(s) => s.clone(),
        }
    }
}

/// Shortest text that parses back to the same `f64`.
pub fn render_float(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

impl Spacing {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "linear" => Some(Spacing::Linear),
            "log" => Some(Spacing::Log),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Spacing::Linear => "linear",
            Spacing::Log => "log",
        }
    }

    pub fn points(self, min: f64, max: f64, count: usize) -> Vec<f64> {
        match self {
            Spacing::Linear => wgqed_core::trace::linspace(min, max, count),
            Spacing::Log => wgqed_core::trace::logspace(min, max, count),
        }
    }
}

/// One swept parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub param: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl SweepAxis {
    pub fn values(&self) -> Vec<f64> {
        self.spacing.points(self.min, self.max, self.count)
    }
}

/// Fully resolved experiment: every scenario parameter has a value.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub seed: u64,
    pub params: BTreeMap<String, Value>,
    pub sweep: Option<SweepAxis>,
    /// Where results go; not part of the echoed configuration.
    pub output: Option<String>,
    pub format: Option<String>,
}

/// Raw `key = value` entries in file order, with their line numbers.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Entries {
    items: Vec<(String, String, usize)>,
}

impl Entries {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut items: Vec<(String, String, usize)> = Vec::new();
        let mut section = String::new();
        for (index, raw) in text.lines().enumerate() {
            let line_no = index + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| CliError::Syntax {
                    line: line_no,
                    message: format!("unterminated section header '{line}'"),
                })?;
                let name = name.trim();
                if !is_identifier(name) {
                    return Err(CliError::Syntax {
                        line: line_no,
                        message: format!("invalid section name '{name}'"),
                    });
                }
                section = name.to_string();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| CliError::Syntax {
                line: line_no,
                message: format!("expected 'key = value', got '{line}'"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            if !is_identifier(key) {
                return Err(CliError::Syntax {
                    line: line_no,
                    message: format!("invalid key '{key}'"),
                });
            }
            if value.is_empty() {
                return Err(CliError::Syntax {
                    line: line_no,
                    message: format!("missing value for '{key}'"),
                });
            }
            let full = if section.is_empty() {
                key.to_string()
            } else {
                format!("{section}.{key}")
            };
            if let Some((_, _, first)) = items.iter().find(|(k, _, _)| *k == full) {
                return Err(CliError::DuplicateKey {
                    key: full,
                    first: *first,
                    line: line_no,
                });
            }
            items.push((full, value.to_string(), line_no));
        }
        Ok(Self { items })
    }

    /// Sets `key`, replacing an earlier value.
    pub fn set(&mut self, key: &str, value: &str) {
        match self.items.iter_mut().find(|(k, _, _)| k == key) {
            Some(item) => item.1 = value.to_string(),
            None => self.items.push((key.to_string(), value.to_string(), 0)),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.items
            .iter()
            .find(|(k, _, _)| k == key)
            .map(|(_, v, _)| v.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.items.iter().map(|(k, v, _)| (k.as_str(), v.as_str()))
    }
}

fn is_identifier(s: &str) -> bool {
    !s.is_empty()
        && s
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.')
}

const RESERVED: [&str; 4] = ["scenario", "seed", "output", "format"];
const SWEEP_KEYS: [&str; 5] = ["sweep.param", "sweep.min", "sweep.max", "sweep.count", "sweep.spacing"];

pub fn parse_config(text: &str) -> Result<ExperimentConfig, CliError> {
    ExperimentConfig::from_entries(&Entries::parse(text)?)
}

impl ExperimentConfig {
    pub fn from_entries(entries: &Entries) -> Result<Self, CliError> {
        let name = entries.get("scenario").ok_or(CliError::MissingKey("scenario".into()))?;
        let scenario = Scenario::parse(name).ok_or_else(|| CliError::UnknownScenario(name.to_string()))?;
        let specs = scenario.params();

        for (key, _) in entries.iter() {
            let known = RESERVED.contains(&key) || SWEEP_KEYS.contains(&key) || specs.iter().any(|s| s.key == key);
            if !known {
                return Err(CliError::UnknownKey {
                    key: key.to_string(),
                    scenario: scenario.name(),
                });
            }
        }

        let seed = match entries.get("seed") {
            Some(s) => s.parse::<u64>().map_err(|_| CliError::Constraint {
                key: "seed".into(),
                constraint: "must be an unsigned 64-bit integer".into(),
                value: s.to_string(),
            })?,
            None => 0,
        };

        let mut params = BTreeMap::new();
        for spec in specs {
            let value = match (entries.get(spec.key), spec.default) {
                (Some(text), _) => parse_value(spec, text)?,
                (None, Some(default)) => parse_value(spec, default)?,
                (None, None) => return Err(CliError::MissingKey(spec.key.to_string())),
            };
            params.insert(spec.key.to_string(), value);
        }
        scenario.check_consistency(&params)?;

        let sweep = parse_sweep(entries, scenario)?;
        if let Some(format) = entries.get("format") {
            if format != "csv" && format != "json" {
                return Err(CliError::Constraint {
                    key: "format".into(),
                    constraint: "must be one of: csv, json".into(),
                    value: format.to_string(),
                });
            }
        }
        Ok(Self {
            scenario,
            seed,
            params,
            sweep,
            output: entries.get("output").map(str::to_string),
            format: entries.get("format").map(str::to_string),
        })
    }

    /// Canonical configuration text. Parsing it yields an equal configuration
    /// (apart from output settings) and re-rendering gives identical bytes.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "scenario = {}", self.scenario.name()).unwrap();
        writeln!(out, "seed = {}", self.seed).unwrap();
        let mut section = "";
        for spec in self.scenario.params() {
            let (head, key) = match spec.key.split_once('.') {
                Some((s, k)) => (s, k),
                None => ("", spec.key),
            };
            if head != section {
                writeln!(out, "[{head}]").unwrap();
                section = head;
            }
            writeln!(out, "{key} = {}", self.params[spec.key].render()).unwrap();
        }
        if let Some(axis) = &self.sweep {
            writeln!(out, "[sweep]").unwrap();
            writeln!(out, "param = {}", axis.param).unwrap();
            writeln!(out, "min = {}", render_float(axis.min)).unwrap();
            writeln!(out, "max = {}", render_float(axis.max)).unwrap();
            writeln!(out, "count = {}", axis.count).unwrap();
            writeln!(out, "spacing = {}", axis.spacing.name()).unwrap();
        }
        out
    }

    pub fn float(&self, key: &str) -> f64 {
        match self.params.get(key) {
            Some(Value::Float(x)) => *x,
            other => panic!("parameter {key} is not a float: {other:?}"),
        }
    }

    pub fn count(&self, key: &str) -> usize {
        match self.params.get(key) {
            Some(Value::Count(n)) => *n as usize,
            other => panic!("parameter {key} is not a count: {other:?}"),
        }
    }

    pub fn text(&self, key: &str) -> &str {
        match self.params.get(key) {
            Some(Value::Text(s)) => s,
            other => panic!("parameter {key} is not text: {other:?}"),
        }
    }

    /// Copy with one float parameter replaced, re-validated.
    pub fn with_float(&self, key: &str, value: f64) -> Result<Self, CliError> {
        let spec = self
            .scenario
            .params()
            .iter()
            .find(|s| s.key == key)
            .ok_or_else(|| CliError::UnknownKey {
                key: key.to_string(),
                scenario: self.scenario.name(),
            })?;
        let mut next = self.clone();
        next.params.insert(key.to_string(), parse_value(spec, &render_float(value))?);
        next.scenario.check_consistency(&next.params)?;
        Ok(next)
    }
}

fn constraint(key: &str, text: &str, message: &str) -> CliError {
    CliError::Constraint {
        key: key.to_string(),
        constraint: message.to_string(),
        value: text.to_string(),
    }
}

fn parse_float(key: &str, text: &str) -> Result<f64, CliError> {
    let x: f64 = text.parse().map_err(|_| constraint(key, text, "must be a number"))?;
    if !x.is_finite() {
        return Err(constraint(key, text, "must be finite"));
    }
    Ok(x)
}

pub(crate) fn parse_value(spec: &ParamSpec, text: &str) -> Result<Value, CliError> {
    let key = spec.key;
    match spec.kind {
        Kind::Real => Ok(Value::Float(parse_float(key, text)?)),
        Kind::NonNegative => {
            let x = parse_float(key, text)?;
            if x < 0.0 {
                return Err(constraint(key, text, "must be >= 0"));
            }
            Ok(Value::Float(x))
        }
        Kind::Positive => {
            let x = parse_float(key, text)?;
            if x <= 0.0 {
                return Err(constraint(key, text, "must be > 0"));
            }
            Ok(Value::Float(x))
        }
        Kind::Unit => {
            let x = parse_float(key, text)?;
            if !(0.0..=1.0).contains(&x) {
                return Err(constraint(key, text, "must be in [0,1]"));
            }
            Ok(Value::Float(x))
        }
        Kind::Count(min) => {
            let n: u64 = text
                .parse()
                .map_err(|_| constraint(key, text, &format!("must be an integer >= {min}")))?;
            if n < min {
                return Err(constraint(key, text, &format!("must be an integer >= {min}")));
            }
            Ok(Value::Count(n))
        }
        Kind::Choice(options) => {
            if options.contains(&text) {
                Ok(Value::Text(text.to_string()))
            } else {
                Err(constraint(key, text, &format!("must be one of: {}", options.join(", "))))
            }
        }
    }
}

fn parse_sweep(entries: &Entries, scenario: Scenario) -> Result<Option<SweepAxis>, CliError> {
    let present: Vec<&str> = SWEEP_KEYS.iter().copied().filter(|k| entries.get(k).is_some()).collect();
    if present.is_empty() {
        return Ok(None);
    }
    let need = |k: &str| entries.get(k).ok_or_else(|| CliError::MissingKey(k.to_string()));
    let param = need("sweep.param")?.to_string();
    let sweepable = scenario
        .params()
        .iter()
        .any(|s| s.key == param && s.sweepable());
    if !sweepable {
        return Err(constraint(
            "sweep.param",
            &param,
            &format!("must name a numeric, non-grid parameter of scenario {}", scenario.name()),
        ));
    }
    let min = parse_float("sweep.min", need("sweep.min")?)?;
    let max = parse_float("sweep.max", need("sweep.max")?)?;
    let count_text = need("sweep.count")?;
    let count: usize = count_text
        .parse()
        .ok()
        .filter(|&n: &usize| n >= 1)
        .ok_or_else(|| constraint("sweep.count", count_text, "must be an integer >= 1"))?;
    let spacing_text = entries.get("sweep.spacing").unwrap_or("linear");
    let spacing = Spacing::parse(spacing_text)
        .ok_or_else(|| constraint("sweep.spacing", spacing_text, "must be one of: linear, log"))?;
    if count > 1 && max <= min {
        return Err(constraint("sweep.max", &render_float(max), "must exceed sweep.min"));
    }
    if spacing == Spacing::Log && min <= 0.0 {
        return Err(constraint("sweep.min", &render_float(min), "must be > 0 for log spacing"));
    }
    Ok(Some(SweepAxis {
        param,
        min,
        max,
        count,
        spacing,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
scenario = spectrum
beta = 0.9
deph = 0.1
rabi = 1e-4   # drive
[grid]
min = -10
max = 10
count = 1001
";

    #[test]
    fn minimal_spectrum_config() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.scenario, Scenario::Spectrum);
        assert_eq!(c.float("beta"), 0.9);
        assert_eq!(c.float("rabi"), 1e-4);
        assert_eq!(c.count("grid.count"), 1001);
        assert_eq!(c.text("grid.spacing"), "linear");
        assert_eq!(c.seed, 0);
    }

    #[test]
    fn beta_out_of_range() {
        let err = parse_config("scenario = spectrum\nbeta = 1.2\n").unwrap_err();
        assert!(err.to_string().contains("beta must be in [0,1]"), "{err}");
    }

    #[test]
    fn duplicate_key_named() {
        let err = parse_config("scenario = spectrum\nbeta = 0.5\nbeta = 0.6\n").unwrap_err();
        assert!(matches!(err, CliError::DuplicateKey { ref key, first: 2, line: 3 } if key == "beta"));
        assert!(err.to_string().contains("beta"));
        let err = parse_config("scenario = spectrum\nbeta = 0.5\n[grid]\nmin = 1\nmin = 2\n").unwrap_err();
        assert!(err.to_string().contains("grid.min"));
    }

    #[test]
    fn strict_keys() {
        let err = parse_config("scenario = spectrum\nbeta = 0.5\nbta = 0.6\n").unwrap_err();
        assert!(matches!(err, CliError::UnknownKey { .. }));
        assert!(err.to_string().contains("bta"));
        assert!(parse_config("scenario = nope\n").is_err());
        assert!(parse_config("beta = 0.5\n").is_err());
        assert!(matches!(parse_config("scenario = spectrum\n"), Err(CliError::MissingKey(k)) if k == "beta"));
    }

    #[test]
    fn syntax_errors_carry_line() {
        let err = parse_config("scenario = spectrum\nbeta 0.5\n").unwrap_err();
        assert!(matches!(err, CliError::Syntax { line: 2, .. }));
        assert!(parse_config("scenario = spectrum\n[grid\n").is_err());
        assert!(parse_config("scenario = spectrum\nbeta =\n").is_err());
    }

    #[test]
    fn value_constraints() {
        for (text, needle) in [
            ("scenario = spectrum\nbeta = 0.5\ndeph = -1\n", "deph must be >= 0"),
            ("scenario = spectrum\nbeta = x\n", "beta must be a number"),
            ("scenario = spectrum\nbeta = 0.5\n[grid]\ncount = 0\n", "grid.count must be an integer >= 1"),
            ("scenario = spectrum\nbeta = 0.5\nseed = -3\n", "seed must be"),
            ("scenario = g2\nbeta = 0.5\nport = sideways\n", "port must be one of"),
            ("scenario = spectrum\nbeta = inf\n", "beta must be finite"),
        ] {
            let err = parse_config(text).unwrap_err().to_string();
            assert!(err.contains(needle), "{err}");
        }
    }

    #[test]
    fn echo_round_trips() {
        let text = format!("seed = 42\n{MINIMAL}[sweep]\nparam = deph\nmin = 0\nmax = 0.3\ncount = 4\n");
        let c = parse_config(&text).unwrap();
        let echo = c.to_text();
        let again = parse_config(&echo).unwrap();
        assert_eq!(again, c);
        assert_eq!(again.to_text(), echo);
    }

    #[test]
    fn float_rendering_round_trips() {
        for x in [0.0, 0.1, 1e-4, 9.99e-5, 1e-300, 123456.789, 1e15, -2.5e-7, std::f64::consts::PI] {
            assert_eq!(render_float(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn sweep_validation() {
        let base = "scenario = spectrum\nbeta = 0.5\n[sweep]\n";
        assert!(parse_config(&format!("{base}param = nope\nmin = 0\nmax = 1\ncount = 2\n")).is_err());
        assert!(parse_config(&format!("{base}param = grid.min\nmin = 0\nmax = 1\ncount = 2\n")).is_err());
        assert!(parse_config(&format!("{base}param = deph\nmin = 0\ncount = 2\n")).is_err());
        assert!(parse_config(&format!("{base}param = deph\nmin = 0\nmax = 1\ncount = 2\nspacing = log\n")).is_err());
        let ok = parse_config(&format!("{base}param = deph\nmin = 0.1\nmax = 1\ncount = 3\nspacing = log\n")).unwrap();
        let v = ok.sweep.unwrap().values();
        assert_eq!(v.len(), 3);
        assert_eq!(v[2], 1.0);
    }

    #[test]
    fn overrides_replace_values() {
        let mut e = Entries::parse(MINIMAL).unwrap();
        e.set("beta", "0.3");
        e.set("seed", "5");
        let c = ExperimentConfig::from_entries(&e).unwrap();
        assert_eq!(c.float("beta"), 0.3);
        assert_eq!(c.seed, 5);
    }
}
