//! Closed-form steady-state response of a driven two-level emitter in a waveguide.
//!
//! All rates and detunings share one unit; the natural choice is `Γ = 1`.
//! The drive strength `Ω_p` follows the transmission-formula convention: the
//! rotating-frame Hamiltonian is `H = -Δ_p σ_ee - Ω_p (σ_eg + σ_ge)`, so the
//! excited population saturates at one half as `Ω_p → ∞`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{finite, non_negative, Error, Result};
use crate::lindblad::LevelSystem;
use crate::trace::SpectrumTrace;

/// Index of the ground state in two-level matrices.
pub const GROUND: usize = 0;
/// Index of the excited state in two-level matrices.
pub const EXCITED: usize = 1;

/// Decay rates and waveguide coupling of a single emitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelEmitter {
    gamma_total: f64,
    beta: f64,
    gamma_deph: f64,
}

impl TwoLevelEmitter {
    pub fn new(gamma_total: f64, beta: f64, gamma_deph: f64) -> Result<Self> {
        finite("gamma_total", gamma_total)?;
        if gamma_total <= 0.0 {
            return Err(Error::OutOfRange {
                name: "gamma_total",
                constraint: "must be > 0",
                value: gamma_total,
            });
        }
        finite("beta", beta)?;
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::OutOfRange {
                name: "beta",
                constraint: "must be in [0,1]",
                value: beta,
            });
        }
        non_negative("gamma_deph", gamma_deph)?;
        Ok(Self {
            gamma_total,
            beta,
            gamma_deph,
        })
    }

    /// Emitter in natural units, `Γ = 1`.
    pub fn natural(beta: f64, gamma_deph: f64) -> Result<Self> {
        Self::new(1.0, beta, gamma_deph)
    }

    pub fn gamma_total(&self) -> f64 {
        self.gamma_total
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma_deph(&self) -> f64 {
        self.gamma_deph
    }

    /// Emission rate into the guided mode.
    pub fn gamma_1d(&self) -> f64 {
        self.beta * self.gamma_total
    }

    /// Emission rate into all non-guided modes.
    pub fn gamma_loss(&self) -> f64 {
        self.gamma_total - self.gamma_1d()
    }

    /// Coherence decay rate `Γ/2 + Γ_deph`.
    pub fn gamma_2(&self) -> f64 {
        0.5 * self.gamma_total + self.gamma_deph
    }

    /// Fraction of coherent interactions `Γ_1D / (2 Γ_2)`.
    pub fn beta_coherent(&self) -> f64 {
        self.gamma_1d() / (2.0 * self.gamma_2())
    }

    /// Lindblad model of this emitter under `drive`: decay `e → g` at `Γ`
    /// and equal-rate dephasing channels on both levels.
    pub fn level_system(&self, drive: &Drive) -> LevelSystem {
        let mut h = DMatrix::<Complex64>::zeros(2, 2);
        h[(EXCITED, EXCITED)] = Complex64::from(-drive.delta_p);
        h[(EXCITED, GROUND)] = Complex64::from(-drive.rabi);
        h[(GROUND, EXCITED)] = Complex64::from(-drive.rabi);
        let mut system = LevelSystem::new(h)
            .expect("2x2 hamiltonian")
            .with_decay(EXCITED, GROUND, self.gamma_total)
            .expect("validated rate");
        if self.gamma_deph > 0.0 {
            system = system
                .with_dephasing(EXCITED, self.gamma_deph)
                .and_then(|s| s.with_dephasing(GROUND, self.gamma_deph))
                .expect("validated rate");
        }
        system
    }

    /// Lorentzian denominator `Γ_2² + Δ² + 4 (Γ_2/Γ) Ω²`.
    fn denominator(&self, drive: &Drive) -> f64 {
        let g2 = self.gamma_2();
        g2 * g2 + drive.delta_p * drive.delta_p + 4.0 * (g2 / self.gamma_total) * drive.rabi * drive.rabi
    }
}

/// Coherent drive: detuning `Δ_p = ω_p - ω_A` and real Rabi frequency `Ω_p ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Drive {
    delta_p: f64,
    rabi: f64,
}

impl Drive {
    pub fn new(delta_p: f64, rabi: f64) -> Result<Self> {
        finite("delta_p", delta_p)?;
        non_negative("rabi", rabi)?;
        Ok(Self { delta_p, rabi })
    }

    pub fn resonant(rabi: f64) -> Result<Self> {
        Self::new(0.0, rabi)
    }

    pub fn delta_p(&self) -> f64 {
        self.delta_p
    }

    pub fn rabi(&self) -> f64 {
        self.rabi
    }
}

/// Steady-state excited population and `ρ_ge = ⟨g|ρ|e⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyStateTls {
    pub rho_ee: f64,
    pub rho_ge: Complex64,
}

impl SteadyStateTls {
    pub fn rho_gg(&self) -> f64 {
        1.0 - self.rho_ee
    }

    pub fn rho_eg(&self) -> Complex64 {
        self.rho_ge.conj()
    }
}

/// Transmittance, reflectance and out-of-mode loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportCoefficients {
    pub transmittance: f64,
    pub reflectance: f64,
    pub loss: f64,
}

pub fn steady_state(emitter: &TwoLevelEmitter, drive: &Drive) -> SteadyStateTls {
    let d = emitter.denominator(drive);
    let g2 = emitter.gamma_2();
    let om = drive.rabi;
    SteadyStateTls {
        rho_ee: 2.0 * g2 * om * om / (emitter.gamma_total * d),
        rho_ge: -om * Complex64::new(drive.delta_p, g2) / d,
    }
}

pub fn transport(emitter: &TwoLevelEmitter, drive: &Drive) -> TransportCoefficients {
    let d = emitter.denominator(drive);
    let (gamma, g2, beta) = (emitter.gamma_total, emitter.gamma_2(), emitter.beta);
    // Numerator form keeps T = 0 exact at the perfect-extinction point.
    let transmittance = (2.0 * d - beta * gamma * g2 * (2.0 - beta)) / (2.0 * d);
    let reflectance = beta * beta * gamma * g2 / (2.0 * d);
    let loss = beta * (1.0 - beta) * gamma * g2 / d;
    TransportCoefficients {
        transmittance,
        reflectance,
        loss,
    }
}

/// Transmission assembled from the steady-state populations and coherences
/// through the scattered-field operator. Requires `Ω_p > 0`.
pub fn transmission_via_coherences(emitter: &TwoLevelEmitter, drive: &Drive) -> Result<f64> {
    if drive.rabi <= 0.0 {
        return Err(Error::OutOfRange {
            name: "rabi",
            constraint: "must be > 0 for the coherence route",
            value: drive.rabi,
        });
    }
    let state = steady_state(emitter, drive);
    let c = emitter.gamma_1d() / (2.0 * drive.rabi);
    let cross = Complex64::i() * c * (state.rho_eg() - state.rho_ge);
    Ok(1.0 + c * c * state.rho_ee + cross.re)
}

/// Low-power, on-resonance transmission split into `(coherent, incoherent)`.
pub fn low_power_split(emitter: &TwoLevelEmitter) -> (f64, f64) {
    let bco = emitter.beta_coherent();
    ((1.0 - bco).powi(2), bco * (emitter.beta - bco))
}

/// Low-power, on-resonance transmission `1 - (Γ/Γ_2) β + (Γ/2Γ_2) β²`.
pub fn low_power_transmission(emitter: &TwoLevelEmitter) -> f64 {
    let ratio = emitter.gamma_total / emitter.gamma_2();
    1.0 - ratio * emitter.beta + 0.5 * ratio * emitter.beta * emitter.beta
}

/// Saturation parameter `s = 4 (Γ_2/Γ) Ω² / Γ_2²`.
pub fn saturation_parameter(emitter: &TwoLevelEmitter, rabi: f64) -> f64 {
    let g2 = emitter.gamma_2();
    4.0 * (g2 / emitter.gamma_total) * rabi * rabi / (g2 * g2)
}

/// On-resonance extinction `ΔT = 1 - T(Δ_p = 0)`.
pub fn extinction(emitter: &TwoLevelEmitter, rabi: f64) -> Result<f64> {
    let drive = Drive::resonant(rabi)?;
    let d = emitter.denominator(&drive);
    let (gamma, g2, beta) = (emitter.gamma_total, emitter.gamma_2(), emitter.beta);
    Ok(beta * gamma * g2 * (2.0 - beta) / (2.0 * d))
}

/// Full width at half maximum of the transmission dip.
pub fn linewidth(emitter: &TwoLevelEmitter, rabi: f64) -> Result<f64> {
    non_negative("rabi", rabi)?;
    let g2 = emitter.gamma_2();
    Ok(2.0 * (g2 * g2 + 4.0 * (g2 / emitter.gamma_total) * rabi * rabi).sqrt())
}

/// Conversion from guided photon flux to Rabi frequency, `Ω² = k Γ_1D Φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxMapping {
    pub coefficient: f64,
}

impl Default for FluxMapping {
    fn default() -> Self {
        Self { coefficient: 2.0 }
    }
}

impl FluxMapping {
    pub fn new(coefficient: f64) -> Result<Self> {
        finite("flux coefficient", coefficient)?;
        if coefficient <= 0.0 {
            return Err(Error::OutOfRange {
                name: "flux coefficient",
                constraint: "must be > 0",
                value: coefficient,
            });
        }
        Ok(Self { coefficient })
    }

    pub fn rabi(&self, emitter: &TwoLevelEmitter, flux: f64) -> f64 {
        (self.coefficient * emitter.gamma_1d() * flux).sqrt()
    }

    /// Flux at which the on-resonance extinction halves (`s = 1`).
    pub fn critical_flux(&self, emitter: &TwoLevelEmitter) -> f64 {
        let g2 = emitter.gamma_2();
        if emitter.gamma_1d() == 0.0 {
            return f64::INFINITY;
        }
        g2 * emitter.gamma_total / (4.0 * self.coefficient * emitter.gamma_1d())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaturationPoint {
    pub flux: f64,
    pub rabi: f64,
    pub extinction: f64,
    pub fwhm: f64,
}

pub fn saturation_curve(
    emitter: &TwoLevelEmitter,
    flux_grid: &[f64],
    mapping: FluxMapping,
) -> Result<Vec<SaturationPoint>> {
    flux_grid
        .iter()
        .map(|&flux| {
            non_negative("flux", flux)?;
            let rabi = mapping.rabi(emitter, flux);
            Ok(SaturationPoint {
                flux,
                rabi,
                extinction: extinction(emitter, rabi)?,
                fwhm: linewidth(emitter, rabi)?,
            })
        })
        .collect()
}

/// Transport coefficients across a detuning grid at fixed drive strength.
pub fn spectrum_sweep(
    emitter: &TwoLevelEmitter,
    rabi: f64,
    grid: &[f64],
) -> Result<SpectrumTrace<TransportCoefficients>> {
    non_negative("rabi", rabi)?;
    crate::trace::check_increasing(grid)?;
    let values = grid
        .iter()
        .map(|&delta| Drive::new(delta, rabi).map(|d| transport(emitter, &d)))
        .collect::<Result<Vec<_>>>()?;
    SpectrumTrace::new(grid.to_vec(), values)
}
