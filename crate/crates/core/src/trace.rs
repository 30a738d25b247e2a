//! Grid-indexed result containers shared by the spectral and correlation routines.

use crate::error::{Error, Result};

/// Response values sampled on a strictly increasing detuning grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTrace<T> {
    detunings: Vec<f64>,
    values: Vec<T>,
}

impl<T> SpectrumTrace<T> {
    pub fn new(detunings: Vec<f64>, values: Vec<T>) -> Result<Self> {
        check_increasing(&detunings)?;
        if detunings.len() != values.len() {
            return Err(Error::Invalid(format!(
                "grid has {} points but {} values",
                detunings.len(),
                values.len()
            )));
        }
        Ok(Self { detunings, values })
    }

    pub fn detunings(&self) -> &[f64] {
        &self.detunings
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &T)> {
        self.detunings.iter().copied().zip(self.values.iter())
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> SpectrumTrace<U> {
        SpectrumTrace {
            detunings: self.detunings.clone(),
            values: self.values.iter().map(f).collect(),
        }
    }
}

/// Values sampled on a non-negative, strictly increasing delay grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationTrace<T> {
    delays: Vec<f64>,
    values: Vec<T>,
}

impl<T> CorrelationTrace<T> {
    pub fn new(delays: Vec<f64>, values: Vec<T>) -> Result<Self> {
        check_delays(&delays)?;
        if delays.len() != values.len() {
            return Err(Error::Invalid(format!(
                "delay grid has {} points but {} values",
                delays.len(),
                values.len()
            )));
        }
        Ok(Self { delays, values })
    }

    pub fn delays(&self) -> &[f64] {
        &self.delays
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &T)> {
        self.delays.iter().copied().zip(self.values.iter())
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> CorrelationTrace<U> {
        CorrelationTrace {
            delays: self.delays.clone(),
            values: self.values.iter().map(f).collect(),
        }
    }
}

pub(crate) fn check_increasing(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    for (i, &x) in grid.iter().enumerate() {
        if !x.is_finite() {
            return Err(Error::NonFinite {
                name: "grid point",
                value: x,
            });
        }
        if i > 0 && x <= grid[i - 1] {
            return Err(Error::UnorderedGrid { index: i });
        }
    }
    Ok(())
}

pub(crate) fn check_delays(delays: &[f64]) -> Result<()> {
    check_increasing(delays)?;
    if delays[0] < 0.0 {
        return Err(Error::OutOfRange {
            name: "delay",
            constraint: "must be >= 0",
            value: delays[0],
        });
    }
    Ok(())
}

/// `count` evenly spaced points from `min` to `max` inclusive.
pub fn linspace(min: f64, max: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![min],
        _ => {
            let step = (max - min) / (count - 1) as f64;
            (0..count)
                .map(|i| if i + 1 == count { max } else { min + step * i as f64 })
                .collect()
        }
    }
}

/// `count` logarithmically spaced points from `min` to `max` inclusive; both must be positive.
pub fn logspace(min: f64, max: f64, count: usize) -> Vec<f64> {
    let (lo, hi) = (min.ln(), max.ln());
    linspace(lo, hi, count)
        .into_iter()
        .enumerate()
        .map(|(i, x)| match i {
            0 => min,
            _ if i + 1 == count => max,
            _ => x.exp(),
        })
        .collect()
}
