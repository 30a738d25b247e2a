//! Probe spectroscopy beyond the bare two-level response: a weak probe on a
//! pump-dressed emitter, the bichromatic beat signal, and electromagnetically
//! induced transparency in a Λ-type emitter.
//!
//! Pump and control strengths are full Rabi frequencies (off-diagonal `Ω/2`),
//! so the dressed splitting is `√(Δ² + Ω²)`. Probe strengths use the same
//! convention as [`Drive`](crate::emitter::Drive).

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::emitter::{Drive, TwoLevelEmitter, EXCITED, GROUND};
use crate::error::{finite, non_negative, Error, Result};
use crate::integrate::{dopri5, Tolerance};
use crate::lindblad::{
    build_liouvillian, commutator_superoperator, linear_response, projector, steady_state, unvectorize,
    vectorize, CMatrix, LevelSystem,
};
use crate::trace::{check_increasing, SpectrumTrace};

/// Largest probe strength accepted, relative to the relevant linewidth scale.
const WEAK_PROBE: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpField {
    rabi: f64,
    detuning: f64,
}

impl PumpField {
    pub fn new(rabi: f64, detuning: f64) -> Result<Self> {
        non_negative("pump rabi", rabi)?;
        finite("pump detuning", detuning)?;
        Ok(Self { rabi, detuning })
    }

    pub fn rabi(&self) -> f64 {
        self.rabi
    }

    pub fn detuning(&self) -> f64 {
        self.detuning
    }

    /// `Ω^G = √(Δ_pmp² + Ω_pmp²)`.
    pub fn generalized_rabi(&self) -> f64 {
        self.detuning.hypot(self.rabi)
    }

    /// Pump-only emitter model in the frame rotating at the pump frequency.
    pub fn level_system(&self, emitter: &TwoLevelEmitter) -> LevelSystem {
        let drive = Drive::new(self.detuning, 0.5 * self.rabi).expect("validated pump");
        emitter.level_system(&drive)
    }
}

/// Probe detunings of the three dressed-state features.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedTransitions {
    /// Light-shifted bare resonance.
    pub stark: f64,
    /// Degenerate with the pump.
    pub kink: f64,
    /// Mirror of the Stark line about the pump, where the probe sees gain.
    pub amplification: f64,
}

impl DressedTransitions {
    pub fn all(&self) -> [f64; 3] {
        [self.stark, self.kink, self.amplification]
    }

    /// Distance from `detuning` to the closest feature.
    pub fn distance(&self, detuning: f64) -> f64 {
        self.all()
            .iter()
            .map(|x| (x - detuning).abs())
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn dressed_transitions(pump: &PumpField) -> DressedTransitions {
    let og = pump.generalized_rabi();
    let side = if pump.detuning < 0.0 { -1.0 } else { 1.0 };
    DressedTransitions {
        stark: pump.detuning - side * og,
        kink: pump.detuning,
        amplification: pump.detuning + side * og,
    }
}

/// Probe amplitude transmission `t` and `T = |t|²` at one detuning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeResponse {
    pub amplitude: Complex64,
    pub transmittance: f64,
}

fn check_probe(probe_rabi: f64, scale: f64) -> Result<()> {
    finite("probe rabi", probe_rabi)?;
    if probe_rabi <= 0.0 || probe_rabi > WEAK_PROBE * scale {
        return Err(Error::OutOfRange {
            name: "probe rabi",
            constraint: "must be in (0, 1e-2 x linewidth scale]",
            value: probe_rabi,
        });
    }
    Ok(())
}

/// Weak-probe transmission of a pump-dressed emitter on a grid of probe
/// detunings (relative to the bare transition).
///
/// The Bloch equations are linearised about the pump-only steady state; the
/// sideband oscillating at `e^{-iδt}`, `δ = Δ_pr - Δ_pmp`, carries the probe
/// coherence. The result is the coherent (elastic) transmission and does not
/// depend on `probe_rabi` beyond the weak-probe check.
pub fn pump_probe_spectrum(
    emitter: &TwoLevelEmitter,
    pump: &PumpField,
    probe_grid: &[f64],
    probe_rabi: f64,
) -> Result<SpectrumTrace<ProbeResponse>> {
    check_increasing(probe_grid)?;
    check_probe(probe_rabi, emitter.gamma_total())?;
    let l = build_liouvillian(&pump.level_system(emitter))?;
    let rho0 = steady_state(&l)?;
    let coupling = projector(2, EXCITED, GROUND) * Complex64::from(-probe_rabi);
    let v = commutator_superoperator(&coupling);
    let half_1d = 0.5 * emitter.gamma_1d();
    let values = probe_grid
        .par_iter()
        .map(|&delta_pr| {
            let x = linear_response(&l, rho0.matrix(), &v, delta_pr - pump.detuning)?;
            let amplitude = 1.0 + Complex64::i() * half_1d * x[(EXCITED, GROUND)] / probe_rabi;
            Ok(ProbeResponse {
                amplitude,
                transmittance: amplitude.norm_sqr(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    SpectrumTrace::new(probe_grid.to_vec(), values)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeatOptions {
    /// Whole beat periods in the sampling window.
    pub periods: usize,
    pub samples_per_period: usize,
    /// Discarded time before sampling starts, in units of `1/Γ`.
    pub transient: f64,
    pub tolerance: Tolerance,
}

impl Default for BeatOptions {
    fn default() -> Self {
        Self {
            periods: 64,
            samples_per_period: 32,
            transient: 20.0,
            tolerance: Tolerance {
                relative: 1e-10,
                absolute: 1e-13,
            },
        }
    }
}

/// One-sided power spectrum of the normalised forward intensity.
#[derive(Debug, Clone, PartialEq)]
pub struct BeatSpectrum {
    /// Angular frequencies of the bins, starting at zero.
    pub frequencies: Vec<f64>,
    pub power: Vec<f64>,
    /// Beat frequency `δ`.
    pub beat: f64,
    /// Bins per harmonic of `δ`.
    pub bins_per_harmonic: usize,
}

impl BeatSpectrum {
    /// Power in the bin at `k δ`.
    pub fn harmonic(&self, k: usize) -> f64 {
        self.power.get(k * self.bins_per_harmonic).copied().unwrap_or(0.0)
    }

    /// Median power over all bins that are not harmonics of `δ`.
    pub fn noise_floor(&self) -> f64 {
        let mut rest: Vec<f64> = self
            .power
            .iter()
            .enumerate()
            .filter(|(i, _)| i % self.bins_per_harmonic != 0)
            .map(|(_, p)| *p)
            .collect();
        if rest.is_empty() {
            return 0.0;
        }
        rest.sort_by(f64::total_cmp);
        rest[rest.len() / 2]
    }

    pub fn total_power(&self) -> f64 {
        self.power.iter().sum()
    }
}

/// Time-domain simulation of the bichromatically driven emitter and the
/// spectrum of the transmitted intensity.
///
/// Starting from the pump-only steady state, the Bloch equations with a
/// probe term at `e^{∓iδt}` are integrated through the transient, then
/// sampled over a whole number of beat periods.
pub fn bichromatic_beat_spectrum(
    emitter: &TwoLevelEmitter,
    pump: &PumpField,
    probe: &Drive,
    options: &BeatOptions,
) -> Result<BeatSpectrum> {
    let delta = probe.delta_p() - pump.detuning;
    if delta == 0.0 {
        return Err(Error::Invalid("beat frequency must be non-zero".into()));
    }
    if options.periods < 50 || options.samples_per_period < 4 {
        return Err(Error::Invalid(
            "beat sampling needs at least 50 periods and 4 samples per period".into(),
        ));
    }
    non_negative("transient", options.transient)?;

    let l = build_liouvillian(&pump.level_system(emitter))?;
    let rho0 = steady_state(&l)?;
    let up = commutator_superoperator(&(projector(2, EXCITED, GROUND) * Complex64::from(-probe.rabi())));
    let down = commutator_superoperator(&(projector(2, GROUND, EXCITED) * Complex64::from(-probe.rabi())));
    let period = 2.0 * std::f64::consts::PI / delta.abs();
    let n = options.periods * options.samples_per_period;
    let dt = period / options.samples_per_period as f64;
    let start = options.transient / emitter.gamma_total();
    let times: Vec<f64> = (0..n).map(|k| start + dt * k as f64).collect();

    let l0 = l.matrix().clone();
    let mut scratch = DVector::zeros(4);
    let states = dopri5(
        |t, y, dy| {
            let phase = Complex64::from_polar(1.0, -delta * t);
            dy.gemv(Complex64::from(1.0), &l0, y, Complex64::from(0.0));
            scratch.gemv(phase, &up, y, Complex64::from(0.0));
            scratch.gemv(phase.conj(), &down, y, Complex64::from(1.0));
            *dy += &scratch;
        },
        0.0,
        &vectorize(rho0.matrix()),
        &times,
        options.tolerance,
    )?;

    let pump_amp = 0.5 * pump.rabi;
    let half_1d = 0.5 * emitter.gamma_1d();
    let input = pump_amp * pump_amp + probe.rabi() * probe.rabi();
    let scale = if input > 0.0 { 1.0 / input } else { 1.0 };
    let mut signal: Vec<Complex64> = states
        .iter()
        .zip(&times)
        .map(|(y, &t)| {
            let rho = unvectorize(y, 2);
            let field = pump_amp + probe.rabi() * Complex64::from_polar(1.0, -delta * t);
            let scattered = Complex64::i() * half_1d * rho[(EXCITED, GROUND)];
            let intensity = field.norm_sqr()
                + half_1d * half_1d * rho[(EXCITED, EXCITED)].re
                + 2.0 * (field.conj() * scattered).re;
            Complex64::from(intensity * scale)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut signal);

    let norm = 1.0 / (n as f64 * n as f64);
    let half = n / 2;
    let power = (0..=half)
        .map(|k| {
            let p = signal[k].norm_sqr() * norm;
            // fold the negative-frequency partner into the one-sided spectrum
            if k == 0 || 2 * k == n {
                p
            } else {
                p + signal[n - k].norm_sqr() * norm
            }
        })
        .collect();
    let bin = delta.abs() / options.periods as f64;
    Ok(BeatSpectrum {
        frequencies: (0..=half).map(|k| bin * k as f64).collect(),
        power,
        beat: delta.abs(),
        bins_per_harmonic: options.periods,
    })
}

/// Λ-type emitter: grounds `|1⟩`, `|2⟩` and excited `|3⟩`. The probe drives
/// `|1⟩ ↔ |3⟩` through the waveguide; an external control drives `|2⟩ ↔ |3⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaSystem {
    gamma_31: f64,
    gamma_32: f64,
    gamma_12: f64,
    control_rabi: f64,
    control_detuning: f64,
    beta: f64,
}

/// Matrix indices of `|1⟩`, `|2⟩`, `|3⟩`.
pub const LEVEL_1: usize = 0;
pub const LEVEL_2: usize = 1;
pub const LEVEL_3: usize = 2;

impl LambdaSystem {
    pub fn new(
        gamma_31: f64,
        gamma_32: f64,
        gamma_12: f64,
        control_rabi: f64,
        control_detuning: f64,
        beta: f64,
    ) -> Result<Self> {
        non_negative("gamma_31", gamma_31)?;
        non_negative("gamma_32", gamma_32)?;
        non_negative("gamma_12", gamma_12)?;
        non_negative("control rabi", control_rabi)?;
        finite("control detuning", control_detuning)?;
        finite("beta", beta)?;
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::OutOfRange {
                name: "beta",
                constraint: "must be in [0,1]",
                value: beta,
            });
        }
        if gamma_31 + gamma_32 <= 0.0 {
            return Err(Error::Invalid("excited state needs a non-zero decay rate".into()));
        }
        Ok(Self {
            gamma_31,
            gamma_32,
            gamma_12,
            control_rabi,
            control_detuning,
            beta,
        })
    }

    pub fn gamma_31(&self) -> f64 {
        self.gamma_31
    }

    pub fn gamma_32(&self) -> f64 {
        self.gamma_32
    }

    pub fn gamma_12(&self) -> f64 {
        self.gamma_12
    }

    pub fn control_rabi(&self) -> f64 {
        self.control_rabi
    }

    pub fn control_detuning(&self) -> f64 {
        self.control_detuning
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn with_control(&self, rabi: f64, detuning: f64) -> Result<Self> {
        Self::new(self.gamma_31, self.gamma_32, self.gamma_12, rabi, detuning, self.beta)
    }

    /// Control-only model in the frame rotating with both fields, at probe
    /// detuning `Δ_p` from `|1⟩ ↔ |3⟩`.
    pub fn level_system(&self, probe_detuning: f64) -> LevelSystem {
        let mut h = CMatrix::zeros(3, 3);
        h[(LEVEL_3, LEVEL_3)] = Complex64::from(-probe_detuning);
        h[(LEVEL_2, LEVEL_2)] = Complex64::from(-(probe_detuning - self.control_detuning));
        let c = Complex64::from(-0.5 * self.control_rabi);
        h[(LEVEL_2, LEVEL_3)] = c;
        h[(LEVEL_3, LEVEL_2)] = c;
        // ground-coherence decay γ_12 from a dephasing channel on |2⟩ at 2γ_12
        LevelSystem::new(h)
            .and_then(|s| s.with_decay(LEVEL_3, LEVEL_1, self.gamma_31))
            .and_then(|s| s.with_decay(LEVEL_3, LEVEL_2, self.gamma_32))
            .and_then(|s| s.with_dephasing(LEVEL_2, 2.0 * self.gamma_12))
            .expect("validated rates")
    }

    fn probe_coupling(probe_rabi: f64) -> CMatrix {
        (projector(3, LEVEL_3, LEVEL_1) + projector(3, LEVEL_1, LEVEL_3)) * Complex64::from(-probe_rabi)
    }
}

/// Probe response of the Λ system at one detuning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EitResponse {
    /// `⟨1|ρ|3⟩ / Ω_pr`.
    pub coherence: Complex64,
    /// `-Im ⟨1|ρ|3⟩ / Ω_pr`; the two-level value on resonance is `1/Γ_2`.
    pub absorption: f64,
    pub transmittance: f64,
}

fn eit_response(coherence: Complex64, beta_gamma: f64) -> EitResponse {
    let amplitude = 1.0 + Complex64::i() * 0.5 * beta_gamma * coherence.conj();
    EitResponse {
        coherence,
        absorption: -coherence.im,
        transmittance: amplitude.norm_sqr(),
    }
}

/// Weak-probe absorption and waveguide transmission of the Λ system.
///
/// The response is first order in the probe about `|1⟩⟨1|`, which is
/// stationary under the control alone; with `Ω_c = 0` the stationary state is
/// not unique and the minimum-norm linear response singles out the physical
/// branch. Waveguide coupling is `β Γ_31` on the probe transition.
pub fn eit_spectrum(
    system: &LambdaSystem,
    probe_grid: &[f64],
    probe_rabi: f64,
) -> Result<SpectrumTrace<EitResponse>> {
    check_increasing(probe_grid)?;
    check_probe(probe_rabi, system.gamma_31.max(system.control_rabi))?;
    let rho0 = projector(3, LEVEL_1, LEVEL_1);
    let v = commutator_superoperator(&LambdaSystem::probe_coupling(probe_rabi));
    let beta_gamma = system.beta * system.gamma_31;
    let values = probe_grid
        .par_iter()
        .map(|&dp| {
            let l = build_liouvillian(&system.level_system(dp))?;
            let x = linear_response(&l, &rho0, &v, 0.0)?;
            Ok(eit_response(x[(LEVEL_1, LEVEL_3)] / probe_rabi, beta_gamma))
        })
        .collect::<Result<Vec<_>>>()?;
    SpectrumTrace::new(probe_grid.to_vec(), values)
}

/// Same observables from the full steady state with a finite probe. Needs
/// `Ω_c > 0` so that the stationary state is unique.
pub fn eit_spectrum_steady_state(
    system: &LambdaSystem,
    probe_grid: &[f64],
    probe_rabi: f64,
) -> Result<SpectrumTrace<EitResponse>> {
    check_increasing(probe_grid)?;
    finite("probe rabi", probe_rabi)?;
    if probe_rabi <= 0.0 {
        return Err(Error::OutOfRange {
            name: "probe rabi",
            constraint: "must be > 0",
            value: probe_rabi,
        });
    }
    let beta_gamma = system.beta * system.gamma_31;
    let values = probe_grid
        .par_iter()
        .map(|&dp| {
            let base = system.level_system(dp);
            let mut full = LevelSystem::new(base.hamiltonian() + LambdaSystem::probe_coupling(probe_rabi))?;
            for d in base.decays() {
                full = full.with_decay(d.from, d.to, d.rate)?;
            }
            for d in base.dephasings() {
                full = full.with_dephasing(d.level, d.rate)?;
            }
            let rho = steady_state(&build_liouvillian(&full)?)?;
            Ok(eit_response(rho.element(LEVEL_1, LEVEL_3) / probe_rabi, beta_gamma))
        })
        .collect::<Result<Vec<_>>>()?;
    SpectrumTrace::new(probe_grid.to_vec(), values)
}

/// Separation of the two absorption maxima that bracket the two-photon
/// resonance; `None` if one side has no interior maximum.
pub fn transparency_window_width(spectrum: &SpectrumTrace<EitResponse>, control_detuning: f64) -> Option<f64> {
    let x = spectrum.detunings();
    let a: Vec<f64> = spectrum.values().iter().map(|r| r.absorption).collect();
    let peaks: Vec<f64> = (1..a.len().saturating_sub(1))
        .filter(|&i| a[i] > a[i - 1] && a[i] >= a[i + 1])
        .map(|i| x[i])
        .collect();
    let left = peaks.iter().copied().filter(|&p| p < control_detuning).fold(None, |m: Option<f64>, p| {
        Some(m.map_or(p, |q| q.max(p)))
    })?;
    let right = peaks.iter().copied().filter(|&p| p > control_detuning).fold(None, |m: Option<f64>, p| {
        Some(m.map_or(p, |q| q.min(p)))
    })?;
    Some(right - left)
}
