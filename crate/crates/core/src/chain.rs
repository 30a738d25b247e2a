//! Chains of two-level emitters coupled through a one-dimensional waveguide
//! in the low-excitation regime.
//!
//! Emitter positions enter only through the propagation phases `θ_j = k z_j`.
//! The waveguide couples every pair with `g_ij = i(βΓ/2) e^{i|θ_i - θ_j|}`,
//! and the coherences solve `(Δ - δ_j + iΓ'/2) σ_j + Σ_k g_jk σ_k = -Ω_j` with
//! forward drive `Ω_j = Ω_0 e^{iθ_j}` and `Γ' = (1 - β)Γ`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::error::{finite, non_negative, Error, Result};
use crate::linalg::{eigen, least_squares};
use crate::lindblad::{CMatrix, CVector};
use crate::trace::{check_increasing, SpectrumTrace};

/// Condition number above which a grid point is flagged as singular.
const CONDITION_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct EmitterChain {
    phases: Vec<f64>,
    offsets: Vec<f64>,
    beta: f64,
    gamma_total: f64,
}

impl EmitterChain {
    pub fn new(phases: Vec<f64>, beta: f64, gamma_total: f64) -> Result<Self> {
        if phases.is_empty() {
            return Err(Error::Invalid("chain needs at least one emitter".into()));
        }
        for &p in &phases {
            finite("phase", p)?;
        }
        finite("beta", beta)?;
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::OutOfRange {
                name: "beta",
                constraint: "must be in [0,1]",
                value: beta,
            });
        }
        finite("gamma_total", gamma_total)?;
        if gamma_total <= 0.0 {
            return Err(Error::OutOfRange {
                name: "gamma_total",
                constraint: "must be > 0",
                value: gamma_total,
            });
        }
        let offsets = vec![0.0; phases.len()];
        Ok(Self {
            phases,
            offsets,
            beta,
            gamma_total,
        })
    }

    /// `n` emitters with uniform phase spacing, starting at zero.
    pub fn regular(n: usize, spacing: f64, beta: f64, gamma_total: f64) -> Result<Self> {
        finite("spacing", spacing)?;
        Self::new((0..n).map(|j| spacing * j as f64).collect(), beta, gamma_total)
    }

    /// Per-emitter transition offsets `δ_j`.
    pub fn with_offsets(mut self, offsets: Vec<f64>) -> Result<Self> {
        if offsets.len() != self.phases.len() {
            return Err(Error::Invalid(format!(
                "{} offsets for {} emitters",
                offsets.len(),
                self.phases.len()
            )));
        }
        for &d in &offsets {
            finite("detuning offset", d)?;
        }
        self.offsets = offsets;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma_total(&self) -> f64 {
        self.gamma_total
    }

    /// Emission rate into non-guided modes, `(1 - β)Γ`.
    pub fn gamma_prime(&self) -> f64 {
        (1.0 - self.beta) * self.gamma_total
    }

    /// The same chain seen from the other end.
    pub fn reversed(&self) -> Self {
        Self {
            phases: self.phases.iter().rev().map(|p| -p).collect(),
            offsets: self.offsets.iter().rev().copied().collect(),
            ..*self
        }
    }

    fn with_phases(&self, phases: Vec<f64>) -> Self {
        Self {
            phases,
            offsets: self.offsets.clone(),
            ..*self
        }
    }
}

/// Waveguide-mediated couplings `g_ij`, diagonal included.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    matrix: CMatrix,
}

impl CouplingMatrix {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    pub fn len(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.is_empty()
    }
}

pub fn coupling_matrix(chain: &EmitterChain) -> CouplingMatrix {
    let n = chain.len();
    let half = 0.5 * chain.beta * chain.gamma_total;
    let matrix = CMatrix::from_fn(n, n, |i, j| {
        let gap = (chain.phases[i] - chain.phases[j]).abs();
        Complex64::new(0.0, half) * Complex64::from_polar(1.0, gap)
    });
    CouplingMatrix { matrix }
}

/// Coherences at one detuning.
#[derive(Debug, Clone, PartialEq)]
pub struct Coherences {
    pub sigma: Vec<Complex64>,
    pub condition: f64,
    /// Set when the linear system is numerically singular; `sigma` is then
    /// the minimum-norm solution.
    pub flagged: bool,
}

fn solve_point(chain: &EmitterChain, g: &CMatrix, amplitude: f64, delta: f64) -> Result<Coherences> {
    let n = chain.len();
    let mut a = g.clone();
    let half_loss = 0.5 * chain.gamma_prime();
    for j in 0..n {
        a[(j, j)] += Complex64::new(delta - chain.offsets[j], half_loss);
    }
    let b = CVector::from_iterator(n, chain.phases.iter().map(|&p| -amplitude * Complex64::from_polar(1.0, p)));
    let ls = least_squares(&a, &b, 1.0 / CONDITION_LIMIT)?;
    Ok(Coherences {
        sigma: ls.x.iter().copied().collect(),
        condition: ls.condition,
        flagged: ls.condition > CONDITION_LIMIT,
    })
}

/// Low-excitation coherences `σ_j` on a detuning grid, for drive amplitude `Ω_0`.
pub fn steady_coherences(
    chain: &EmitterChain,
    drive_amplitude: f64,
    grid: &[f64],
) -> Result<SpectrumTrace<Coherences>> {
    non_negative("drive amplitude", drive_amplitude)?;
    check_increasing(grid)?;
    let g = coupling_matrix(chain).matrix;
    let values = grid
        .iter()
        .map(|&d| solve_point(chain, &g, drive_amplitude, d))
        .collect::<Result<Vec<_>>>()?;
    SpectrumTrace::new(grid.to_vec(), values)
}

/// Transmission and reflection amplitudes on a detuning grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainTransport {
    pub detunings: Vec<f64>,
    pub t: Vec<Complex64>,
    pub r: Vec<Complex64>,
    pub flagged: Vec<bool>,
}

impl ChainTransport {
    pub fn transmittance(&self) -> Vec<f64> {
        self.t.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn reflectance(&self) -> Vec<f64> {
        self.r.iter().map(|z| z.norm_sqr()).collect()
    }

    /// Fraction lost to non-guided modes, `1 - T - R`.
    pub fn loss(&self) -> Vec<f64> {
        self.t
            .iter()
            .zip(&self.r)
            .map(|(t, r)| 1.0 - t.norm_sqr() - r.norm_sqr())
            .collect()
    }

    pub fn peak_reflectance(&self) -> f64 {
        self.r.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max)
    }

    pub fn any_flagged(&self) -> bool {
        self.flagged.iter().any(|&f| f)
    }
}

fn assemble(chain: &EmitterChain, grid: &[f64], g: &CMatrix) -> Result<ChainTransport> {
    let factor = Complex64::new(0.0, 0.5 * chain.beta * chain.gamma_total);
    let mut t = Vec::with_capacity(grid.len());
    let mut r = Vec::with_capacity(grid.len());
    let mut flagged = Vec::with_capacity(grid.len());
    for &d in grid {
        let c = solve_point(chain, g, 1.0, d)?;
        let (mut fwd, mut back) = (Complex64::from(0.0), Complex64::from(0.0));
        for (s, &p) in c.sigma.iter().zip(&chain.phases) {
            fwd += Complex64::from_polar(1.0, -p) * s;
            back += Complex64::from_polar(1.0, p) * s;
        }
        t.push(1.0 + factor * fwd);
        r.push(factor * back);
        flagged.push(c.flagged);
    }
    Ok(ChainTransport {
        detunings: grid.to_vec(),
        t,
        r,
        flagged,
    })
}

pub fn chain_transport(chain: &EmitterChain, grid: &[f64]) -> Result<ChainTransport> {
    check_increasing(grid)?;
    assemble(chain, grid, &coupling_matrix(chain).matrix)
}

/// Eigenmodes of `M = diag(-δ_j + iΓ'/2) + g`, sorted by decay rate.
///
/// An eigenvalue `λ` gives a mode decaying at `2 Im λ` that resonates at probe
/// detuning `-Re λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CollectiveModes {
    pub eigenvalues: Vec<Complex64>,
    pub decay_rates: Vec<f64>,
    pub shifts: Vec<f64>,
    /// Right eigenvectors as columns, in the order of `eigenvalues`.
    pub eigenvectors: CMatrix,
}

impl CollectiveModes {
    pub fn min_decay_rate(&self) -> f64 {
        self.decay_rates[0]
    }

    pub fn total_decay_rate(&self) -> f64 {
        self.decay_rates.iter().sum()
    }
}

pub fn collective_modes(chain: &EmitterChain) -> Result<CollectiveModes> {
    let n = chain.len();
    let mut m = coupling_matrix(chain).matrix;
    for j in 0..n {
        m[(j, j)] += Complex64::new(-chain.offsets[j], 0.5 * chain.gamma_prime());
    }
    let (values, vectors) = eigen(&m)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        values[a]
            .im
            .total_cmp(&values[b].im)
            .then(values[a].re.total_cmp(&values[b].re))
    });
    let eigenvalues: Vec<Complex64> = order.iter().map(|&k| values[k]).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |i, j| vectors[(i, order[j])]);
    Ok(CollectiveModes {
        decay_rates: eigenvalues.iter().map(|l| 2.0 * l.im).collect(),
        shifts: eigenvalues.iter().map(|l| -l.re).collect(),
        eigenvalues,
        eigenvectors,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Jitter {
    /// Uniform in `[-w, w]`.
    #[default]
    Uniform,
    /// Normal with standard deviation `w`.
    Gaussian,
}

/// Pointwise mean and 10/50/90 percentiles over an ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    pub mean: Vec<f64>,
    pub p10: Vec<f64>,
    pub p50: Vec<f64>,
    pub p90: Vec<f64>,
}

impl Envelope {
    fn from_samples(samples: &[Vec<f64>]) -> Self {
        let n = samples[0].len();
        let mut env = Envelope {
            mean: Vec::with_capacity(n),
            p10: Vec::with_capacity(n),
            p50: Vec::with_capacity(n),
            p90: Vec::with_capacity(n),
        };
        let count = samples.len();
        for i in 0..n {
            let mut col: Vec<f64> = samples.iter().map(|s| s[i]).collect();
            env.mean.push(col.iter().sum::<f64>() / count as f64);
            col.sort_by(f64::total_cmp);
            env.p10.push(percentile(&col, 0.1));
            env.p50.push(percentile(&col, 0.5));
            env.p90.push(percentile(&col, 0.9));
        }
        env
    }
}

/// Nearest-rank percentile of sorted data.
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let rank = (q * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub phases: Vec<Vec<f64>>,
    pub samples: Vec<ChainTransport>,
    pub transmittance: Envelope,
    pub reflectance: Envelope,
}

impl Ensemble {
    /// Share of samples whose peak reflectance is strictly below `reference`.
    pub fn fraction_below(&self, reference: f64) -> f64 {
        let below = self
            .samples
            .iter()
            .filter(|s| s.peak_reflectance() < reference)
            .count();
        below as f64 / self.samples.len() as f64
    }
}

/// Sample `index` draws its phase kicks from ChaCha8 seeded with `seed` on
/// stream `index`, so results do not depend on scheduling.
pub fn disorder_ensemble(
    template: &EmitterChain,
    position_jitter: f64,
    distribution: Jitter,
    n_samples: usize,
    seed: u64,
    grid: &[f64],
) -> Result<Ensemble> {
    non_negative("position jitter", position_jitter)?;
    if n_samples == 0 {
        return Err(Error::Invalid("ensemble needs at least one sample".into()));
    }
    check_increasing(grid)?;
    let normal = match distribution {
        Jitter::Gaussian => Some(Normal::new(0.0, position_jitter).map_err(|e| Error::Invalid(e.to_string()))?),
        Jitter::Uniform => None,
    };
    let results = (0..n_samples)
        .into_par_iter()
        .map(|index| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(index as u64);
            let phases: Vec<f64> = template
                .phases
                .iter()
                .map(|&p| {
                    let kick = match (&normal, position_jitter > 0.0) {
                        (_, false) => 0.0,
                        (Some(n), true) => n.sample(&mut rng),
                        (None, true) => rng.random_range(-position_jitter..=position_jitter),
                    };
                    p + kick
                })
                .collect();
            let chain = template.with_phases(phases);
            let transport = chain_transport(&chain, grid)?;
            Ok((chain.phases, transport))
        })
        .collect::<Result<Vec<_>>>()?;
    let (phases, samples): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let t: Vec<Vec<f64>> = samples.iter().map(ChainTransport::transmittance).collect();
    let r: Vec<Vec<f64>> = samples.iter().map(ChainTransport::reflectance).collect();
    Ok(Ensemble {
        phases,
        transmittance: Envelope::from_samples(&t),
        reflectance: Envelope::from_samples(&r),
        samples,
    })
}
