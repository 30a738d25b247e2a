//! Second-order photon correlations of light scattered by a single emitter.
//!
//! The closed form describes the transmitted port under weak coherent driving;
//! the numeric route evaluates the normal-ordered intensity correlator of the
//! scattered-field operator through the quantum regression theorem and works
//! at any drive strength and for either port.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::emitter::{Drive, TwoLevelEmitter, EXCITED, GROUND};
use crate::error::{Error, Result};
use crate::lindblad::{build_liouvillian, projector, regression, steady_state, CMatrix, Sandwich};
use crate::trace::{check_delays, check_increasing, CorrelationTrace};

/// Relative distance `|Γ - Γ_2| / Γ` below which the series form is used.
const REMOVABLE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Port {
    Transmitted,
    Reflected,
}

/// Positive-frequency field `Ê⁺ ∝ a + c σ_ge`, with `a = 1` in transmission,
/// `a = 0` in reflection and `c = iβΓ/(2Ω_p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldOperatorSpec {
    port: Port,
    coefficient: Complex64,
}

impl FieldOperatorSpec {
    pub fn new(port: Port, emitter: &TwoLevelEmitter, drive: &Drive) -> Result<Self> {
        if drive.rabi() <= 0.0 {
            return Err(Error::OutOfRange {
                name: "rabi",
                constraint: "must be > 0 for the field operator",
                value: drive.rabi(),
            });
        }
        Ok(Self {
            port,
            coefficient: Complex64::new(0.0, emitter.gamma_1d() / (2.0 * drive.rabi())),
        })
    }

    pub fn port(&self) -> Port {
        self.port
    }

    pub fn coefficient(&self) -> Complex64 {
        self.coefficient
    }

    /// Matrix of `Ê⁺` on the two-level space.
    pub fn operator(&self) -> CMatrix {
        let direct = match self.port {
            Port::Transmitted => 1.0,
            Port::Reflected => 0.0,
        };
        CMatrix::identity(2, 2) * Complex64::from(direct) + projector(2, GROUND, EXCITED) * self.coefficient
    }
}

/// True at the `β = 1`, `Γ_deph = 0` point, where the transmitted intensity
/// vanishes to leading order and `g²` diverges for every delay.
pub fn is_pole(emitter: &TwoLevelEmitter) -> bool {
    bracket(emitter) == 0.0
}

/// `2Γ_2 + Γβ(β - 2)`; proportional to the weak-drive transmitted amplitude.
fn bracket(emitter: &TwoLevelEmitter) -> f64 {
    let (gamma, beta) = (emitter.gamma_total(), emitter.beta());
    2.0 * emitter.gamma_2() + gamma * beta * (beta - 2.0)
}

fn g2_closed_form(emitter: &TwoLevelEmitter, tau: f64) -> f64 {
    let (gamma, beta, g2) = (emitter.gamma_total(), emitter.beta(), emitter.gamma_2());
    let b = bracket(emitter);
    if b == 0.0 {
        return f64::INFINITY;
    }
    if beta == 0.0 {
        return 1.0;
    }
    let b2 = beta * beta;
    if (gamma - g2).abs() < REMOVABLE_TOL * gamma {
        // limit Γ_2 → Γ
        let d = 2.0 - 2.0 * beta + b2;
        return 1.0 + beta * b2 * (-gamma * tau).exp() * (4.0 - beta - gamma * beta * tau) / (d * d);
    }
    let inner = 2.0 * g2 + gamma * (beta - 2.0);
    let num = gamma * gamma * g2 * b2 * b2 * (-gamma * tau).exp()
        - gamma * b2 * inner * inner * (-g2 * tau).exp();
    1.0 + num / ((gamma - g2) * b * b)
}

/// Weak-drive transmitted `g²(τ)`. Returns `+∞` everywhere at the pole (see [`is_pole`]).
pub fn g2_analytic(emitter: &TwoLevelEmitter, tau_grid: &[f64]) -> Result<CorrelationTrace<f64>> {
    check_delays(tau_grid)?;
    let values = tau_grid.iter().map(|&t| g2_closed_form(emitter, t)).collect();
    CorrelationTrace::new(tau_grid.to_vec(), values)
}

/// Weak-drive transmitted `g²(0)`.
pub fn g2_zero(emitter: &TwoLevelEmitter) -> f64 {
    g2_closed_form(emitter, 0.0)
}

/// `g²(τ) = G²(τ)/(G¹)²` from the master equation at finite drive.
///
/// Values are complex so the imaginary residue can be inspected; physically
/// it vanishes.
pub fn g2_numeric(
    emitter: &TwoLevelEmitter,
    drive: &Drive,
    port: Port,
    tau_grid: &[f64],
) -> Result<CorrelationTrace<Complex64>> {
    let field = FieldOperatorSpec::new(port, emitter, drive)?;
    let e_plus = field.operator();
    let intensity = e_plus.adjoint() * &e_plus;
    let l = build_liouvillian(&emitter.level_system(drive))?;
    let rho = steady_state(&l)?;
    let g1 = rho.expectation(&intensity).re;
    let g2 = regression(&l, &rho, &Sandwich::normal(e_plus), &intensity, tau_grid)?;
    Ok(g2.map(|v| v / (g1 * g1)))
}

/// `g²(0)` over a grid of coupling efficiencies and dephasing rates (`Γ = 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct BunchingMap {
    pub beta_grid: Vec<f64>,
    pub deph_grid: Vec<f64>,
    /// `g20[i][j]` at `deph_grid[i]`, `beta_grid[j]`.
    pub g20: Vec<Vec<f64>>,
}

impl BunchingMap {
    pub fn get(&self, deph_index: usize, beta_index: usize) -> f64 {
        self.g20[deph_index][beta_index]
    }
}

pub fn bunching_map(beta_grid: &[f64], deph_grid: &[f64]) -> Result<BunchingMap> {
    check_increasing(beta_grid)?;
    check_increasing(deph_grid)?;
    let emitters = deph_grid
        .iter()
        .map(|&deph| {
            beta_grid
                .iter()
                .map(|&beta| TwoLevelEmitter::natural(beta, deph))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let g20 = emitters
        .par_iter()
        .map(|row| row.iter().map(g2_zero).collect())
        .collect();
    Ok(BunchingMap {
        beta_grid: beta_grid.to_vec(),
        deph_grid: deph_grid.to_vec(),
        g20,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::linspace;
    use proptest::prelude::*;

    fn em(beta: f64, deph: f64) -> TwoLevelEmitter {
        TwoLevelEmitter::natural(beta, deph).unwrap()
    }

    #[test]
    fn spot_values() {
        assert!((g2_zero(&em(0.5, 0.0))).abs() < 1e-9);
        assert!((g2_zero(&em(0.8, 0.0)) - 225.0).abs() < 1e-9);
        let flat = g2_analytic(&em(0.0, 0.4), &[0.0, 1.0, 10.0]).unwrap();
        assert!(flat.values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn pole_is_flagged() {
        let e = em(1.0, 0.0);
        assert!(is_pole(&e));
        let tr = g2_analytic(&e, &[0.0, 2.0]).unwrap();
        assert!(tr.values().iter().all(|v| v.is_infinite() && *v > 0.0));
        assert!(!is_pole(&em(1.0, 1e-8)));
    }

    #[test]
    fn strong_coupling_scaling() {
        // no dephasing: g²(0) = 1 + (β⁴ - 2β²(1-β)²)/(1-β)⁴
        for beta in [0.6f64, 0.9, 0.99] {
            let q = (1.0 - beta).powi(4);
            let expected = 1.0 + (beta.powi(4) - 2.0 * beta * beta * (1.0 - beta).powi(2)) / q;
            let got = g2_zero(&em(beta, 0.0));
            assert!((got - expected).abs() < 1e-9 * expected.abs().max(1.0), "{got} {expected}");
        }
        assert!(g2_zero(&em(0.99, 0.0)) > 1e3);
    }

    #[test]
    fn removable_singularity_is_continuous() {
        for beta in [0.3, 0.7, 0.95] {
            for tau in [0.0, 0.5, 3.0] {
                let lo = g2_analytic(&em(beta, 0.5 - 1e-6), &[tau]).unwrap().values()[0];
                let mid = g2_analytic(&em(beta, 0.5), &[tau]).unwrap().values()[0];
                let hi = g2_analytic(&em(beta, 0.5 + 1e-6), &[tau]).unwrap().values()[0];
                assert!((lo - hi).abs() < 1e-4);
                assert!((lo - mid).abs() < 1e-4);
            }
        }
    }

    #[test]
    fn no_dephasing_limit() {
        // g² scales like (1-β)^-4 near the pole, so its Γ_deph slope grows without bound there
        let grid = linspace(0.0, 10.0, 41);
        for beta in [0.2, 0.5, 0.7] {
            let a = g2_analytic(&em(beta, 0.0), &grid).unwrap();
            let b = g2_analytic(&em(beta, 1e-8), &grid).unwrap();
            for (x, y) in a.values().iter().zip(b.values()) {
                assert!((x - y).abs() < 1e-6 * x.abs().max(1.0));
            }
        }
    }

    #[test]
    fn field_operator_requires_drive() {
        let e = em(0.5, 0.0);
        assert!(FieldOperatorSpec::new(Port::Transmitted, &e, &Drive::resonant(0.0).unwrap()).is_err());
        let f = FieldOperatorSpec::new(Port::Reflected, &e, &Drive::resonant(0.25).unwrap()).unwrap();
        assert_eq!(f.coefficient(), Complex64::new(0.0, 1.0));
        assert_eq!(f.operator()[(GROUND, GROUND)], Complex64::from(0.0));
    }

    #[test]
    fn numeric_matches_closed_form() {
        let grid = linspace(0.0, 8.0, 33);
        for (beta, deph) in [(0.5, 0.2), (0.1, 1.0), (0.9, 0.2)] {
            let e = em(beta, deph);
            let drive = Drive::resonant(1e-3).unwrap();
            let num = g2_numeric(&e, &drive, Port::Transmitted, &grid).unwrap();
            let ana = g2_analytic(&e, &grid).unwrap();
            for (n, a) in num.values().iter().zip(ana.values()) {
                assert!(n.im.abs() < 1e-9);
                assert!((n.re - a).abs() < 1e-3 * a.abs().max(1.0), "{beta} {deph}: {} vs {a}", n.re);
            }
        }
    }

    #[test]
    fn numeric_long_delay_factorizes() {
        let g = g2_numeric(&em(0.7, 0.1), &Drive::new(0.3, 0.05).unwrap(), Port::Transmitted, &[0.0, 50.0]).unwrap();
        assert!((g.values()[1].re - 1.0).abs() < 1e-6);
        let r = g2_numeric(&em(0.7, 0.1), &Drive::resonant(0.05).unwrap(), Port::Reflected, &[0.0, 50.0]).unwrap();
        // a lone emitter cannot emit two photons at once into the reflected port
        assert!(r.values()[0].norm() < 1e-12);
        assert!((r.values()[1].re - 1.0).abs() < 1e-6);
    }

    #[test]
    fn strong_drive_rabi_oscillation() {
        // H couples with -Ω_p, so the bare Rabi frequency is 2Ω_p
        let rabi = 1.0;
        let dt = 0.02;
        let grid: Vec<f64> = (0..2000).map(|i| i as f64 * dt).collect();
        let g = g2_numeric(&em(0.5, 0.0), &Drive::resonant(rabi).unwrap(), Port::Transmitted, &grid).unwrap();
        let signal: Vec<f64> = g.values().iter().map(|v| v.re - 1.0).collect();
        let freqs = linspace(0.2, 6.0, 581);
        let power: Vec<f64> = freqs
            .iter()
            .map(|&w| {
                let s: Complex64 = signal
                    .iter()
                    .zip(&grid)
                    .map(|(x, t)| Complex64::from_polar(*x, w * t))
                    .sum();
                s.norm_sqr()
            })
            .collect();
        let peak = freqs[(0..freqs.len()).max_by(|&a, &b| power[a].total_cmp(&power[b])).unwrap()];
        assert!((peak - 2.0 * rabi).abs() < 0.1 * 2.0 * rabi, "peak at {peak}");
    }

    #[test]
    fn map_layout_and_trivial_column() {
        let betas = [0.0, 0.5, 0.9, 0.99];
        let dephs = [0.0, 0.1, 1.0];
        let map = bunching_map(&betas, &dephs).unwrap();
        assert_eq!(map.g20.len(), 3);
        assert!(map.g20.iter().all(|r| r.len() == 4));
        for i in 0..3 {
            assert_eq!(map.get(i, 0), 1.0);
        }
        assert_eq!(map.get(0, 2), g2_zero(&em(0.9, 0.0)));
        assert!(map.get(0, 3) > 1e3);
        assert!(bunching_map(&[0.5, 0.2], &dephs).is_err());
        assert!(bunching_map(&[0.5, 1.2], &dephs).is_err());
    }

    proptest! {
        #[test]
        fn closed_form_relaxes_to_one(beta in 0.0..0.999f64, deph in 0.0..3.0f64) {
            let g = g2_analytic(&em(beta, deph), &[50.0]).unwrap().values()[0];
            prop_assert!((g - 1.0).abs() < 1e-6);
        }

        #[test]
        fn closed_form_non_negative(beta in 0.0..0.999f64, deph in 0.0..3.0f64, tau in 0.0..20.0f64) {
            let g = g2_analytic(&em(beta, deph), &[tau]).unwrap().values()[0];
            prop_assert!(g >= -1e-9);
        }
    }
}
