//! N-level Lindblad master-equation engine.
//!
//! Density matrices are vectorized by column stacking, `vec(ρ)[i + n j] = ρ[i][j]`,
//! so that `vec(A X B) = (Bᵀ ⊗ A) vec(X)`. Every jump channel with operator `C` and
//! rate `γ` contributes `γ/2 (2 C ρ C† - C†C ρ - ρ C†C)`; a decay `i → j` uses
//! `C = |j⟩⟨i|` and a dephasing channel on level `i` uses `C = |i⟩⟨i|`.

use nalgebra::{DMatrix, DVector, FullPivLU, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{non_negative, Error, Result};
use crate::integrate::{dopri5, Tolerance};
use crate::linalg::least_squares;
use crate::trace::{check_delays, CorrelationTrace};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

const HERMITIAN_TOL: f64 = 1e-12;
const STATE_TOL: f64 = 1e-9;
/// Largest superoperator dimension handled by dense matrix exponentials.
const DENSE_LIMIT: usize = 400;

/// `|i⟩⟨j|` in an `n`-level space.
pub fn projector(n: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    m[(i, j)] = Complex64::from(1.0);
    m
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decay {
    pub from: usize,
    pub to: usize,
    pub rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dephasing {
    pub level: usize,
    pub rate: f64,
}

/// Rotating-frame Hamiltonian plus incoherent channels.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSystem {
    hamiltonian: CMatrix,
    decays: Vec<Decay>,
    dephasings: Vec<Dephasing>,
}

impl LevelSystem {
    pub fn new(hamiltonian: CMatrix) -> Result<Self> {
        let n = hamiltonian.nrows();
        if n < 2 || hamiltonian.ncols() != n {
            return Err(Error::Invalid(format!(
                "hamiltonian must be square with at least 2 levels, got {}x{}",
                n,
                hamiltonian.ncols()
            )));
        }
        if hamiltonian.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Invalid("hamiltonian has non-finite entries".into()));
        }
        Ok(Self {
            hamiltonian,
            decays: Vec::new(),
            dephasings: Vec::new(),
        })
    }

    pub fn with_decay(mut self, from: usize, to: usize, rate: f64) -> Result<Self> {
        self.check_level(from)?;
        self.check_level(to)?;
        if from == to {
            return Err(Error::Invalid(format!("decay from level {from} to itself")));
        }
        non_negative("decay rate", rate)?;
        self.decays.push(Decay { from, to, rate });
        Ok(self)
    }

    pub fn with_dephasing(mut self, level: usize, rate: f64) -> Result<Self> {
        self.check_level(level)?;
        non_negative("dephasing rate", rate)?;
        self.dephasings.push(Dephasing { level, rate });
        Ok(self)
    }

    fn check_level(&self, level: usize) -> Result<()> {
        if level >= self.n_levels() {
            return Err(Error::Invalid(format!(
                "level {level} out of range for {} levels",
                self.n_levels()
            )));
        }
        Ok(())
    }

    pub fn n_levels(&self) -> usize {
        self.hamiltonian.nrows()
    }

    pub fn hamiltonian(&self) -> &CMatrix {
        &self.hamiltonian
    }

    pub fn decays(&self) -> &[Decay] {
        &self.decays
    }

    pub fn dephasings(&self) -> &[Dephasing] {
        &self.dephasings
    }

    /// Jump operators paired with their rates.
    pub fn jump_operators(&self) -> Vec<(CMatrix, f64)> {
        let n = self.n_levels();
        self.decays
            .iter()
            .map(|d| (projector(n, d.to, d.from), d.rate))
            .chain(
                self.dephasings
                    .iter()
                    .map(|d| (projector(n, d.level, d.level), d.rate)),
            )
            .collect()
    }
}

/// Density matrix of an `n`-level system.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates hermiticity, unit trace and positivity within `1e-9`.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::Invalid("density matrix must be square".into()));
        }
        let state = Self { matrix };
        let herm = state.hermiticity_error();
        if herm > STATE_TOL {
            return Err(Error::Invalid(format!("density matrix not hermitian ({herm:e})")));
        }
        let tr = state.trace();
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(Error::Invalid(format!("density matrix trace {tr} != 1")));
        }
        let min = state.min_eigenvalue();
        if min < -STATE_TOL {
            return Err(Error::Invalid(format!(
                "density matrix has negative eigenvalue {min:e}"
            )));
        }
        Ok(state)
    }

    /// Pure state `|k⟩⟨k|`.
    pub fn pure(n: usize, k: usize) -> Self {
        Self {
            matrix: projector(n, k, k),
        }
    }

    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn n_levels(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `⟨i|ρ|j⟩`.
    pub fn element(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    pub fn population(&self, i: usize) -> f64 {
        self.matrix[(i, i)].re
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `tr(A ρ)`.
    pub fn expectation(&self, op: &CMatrix) -> Complex64 {
        (op * &self.matrix).trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint()).camax()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.matrix + self.matrix.adjoint()) * Complex64::from(0.5);
        SymmetricEigen::new(herm).eigenvalues.min()
    }
}

pub fn vectorize(m: &CMatrix) -> CVector {
    CVector::from_column_slice(m.as_slice())
}

pub fn unvectorize(v: &CVector, n: usize) -> CMatrix {
    CMatrix::from_column_slice(n, n, v.as_slice())
}

/// Superoperator of `ρ ↦ -i [h, ρ]`.
pub fn commutator_superoperator(h: &CMatrix) -> CMatrix {
    let n = h.nrows();
    let id = CMatrix::identity(n, n);
    (id.kronecker(h) - h.transpose().kronecker(&id)) * Complex64::new(0.0, -1.0)
}

/// Superoperator of the jump channel `γ/2 (2 C ρ C† - C†C ρ - ρ C†C)`.
pub fn dissipator_superoperator(c: &CMatrix, rate: f64) -> CMatrix {
    let n = c.nrows();
    let id = CMatrix::identity(n, n);
    let cdc = c.adjoint() * c;
    let jump = c.map(|z| z.conj()).kronecker(c) * Complex64::from(2.0);
    (jump - id.kronecker(&cdc) - cdc.transpose().kronecker(&id)) * Complex64::from(0.5 * rate)
}

/// Generator of the master equation acting on column-stacked density matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian {
    n: usize,
    matrix: CMatrix,
}

impl Liouvillian {
    /// Wraps a raw `n² × n²` superoperator.
    pub fn from_matrix(n: usize, matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != n * n || matrix.ncols() != n * n {
            return Err(Error::Invalid(format!(
                "superoperator must be {0}x{0}, got {1}x{2}",
                n * n,
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { n, matrix })
    }

    pub fn n_levels(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `L ρ` for an operator in matrix form.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        unvectorize(&(&self.matrix * vectorize(rho)), self.n)
    }

    /// Row vector `wᵀ` with `wᵀ vec(ρ) = tr ρ`.
    fn trace_row(&self) -> CVector {
        let n = self.n;
        let mut w = CVector::zeros(n * n);
        for i in 0..n {
            w[i + n * i] = Complex64::from(1.0);
        }
        w
    }
}

pub fn build_liouvillian(system: &LevelSystem) -> Result<Liouvillian> {
    let h = system.hamiltonian();
    let deviation = (h - h.adjoint()).camax();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NonHermitian { deviation });
    }
    let n = system.n_levels();
    let mut matrix = commutator_superoperator(h);
    for (c, rate) in system.jump_operators() {
        if rate > 0.0 {
            matrix += dissipator_superoperator(&c, rate);
        }
    }
    Liouvillian::from_matrix(n, matrix)
}

/// Stationary state of `L`, solving `L vec(ρ) = 0` with the `ρ_00` equation
/// replaced by `tr ρ = 1`.
pub fn steady_state(l: &Liouvillian) -> Result<DensityMatrix> {
    let n = l.n;
    let mut a = l.matrix.clone();
    let w = l.trace_row();
    a.set_row(0, &w.transpose());
    let mut b = CVector::zeros(n * n);
    b[0] = Complex64::from(1.0);

    let lu = FullPivLU::new(a);
    let pivots = lu.u().diagonal().map(|z| z.norm());
    let (max, min) = (pivots.max(), pivots.min());
    // NaN pivots also count as degenerate
    if min.is_nan() || min <= 1e-12 * max {
        return Err(Error::NonUniqueSteadyState);
    }
    let x = lu.solve(&b).ok_or(Error::NonUniqueSteadyState)?;
    let rho = unvectorize(&x, n);
    let rho = (&rho + rho.adjoint()) * Complex64::from(0.5);
    let tr = rho.trace();
    Ok(DensityMatrix::from_matrix_unchecked(rho / tr))
}

/// `exp(L t) ρ0` at each time of an increasing grid starting at or after zero.
pub fn propagate(l: &Liouvillian, rho0: &DensityMatrix, t_grid: &[f64]) -> Result<Vec<DensityMatrix>> {
    if rho0.n_levels() != l.n {
        return Err(Error::Invalid("state and generator dimensions differ".into()));
    }
    Ok(propagate_operator(l, rho0.matrix(), t_grid)?
        .into_iter()
        .map(DensityMatrix::from_matrix_unchecked)
        .collect())
}

/// Propagates an arbitrary operator (not necessarily a state) under `L`.
pub fn propagate_operator(l: &Liouvillian, op: &CMatrix, t_grid: &[f64]) -> Result<Vec<CMatrix>> {
    check_delays(t_grid)?;
    let n = l.n;
    if op.nrows() != n || op.ncols() != n {
        return Err(Error::Invalid("operator and generator dimensions differ".into()));
    }
    let v0 = vectorize(op);
    if n * n <= DENSE_LIMIT {
        let mut out = Vec::with_capacity(t_grid.len());
        let mut v = v0;
        let mut t = 0.0;
        let mut cached: Option<(f64, CMatrix)> = None;
        for &target in t_grid {
            let dt = target - t;
            if dt > 0.0 {
                let step = match &cached {
                    Some((h, m)) if (h - dt).abs() <= 1e-12 * dt => m,
                    _ => {
                        cached = Some((dt, (&l.matrix * Complex64::from(dt)).exp()));
                        &cached.as_ref().expect("just set").1
                    }
                };
                v = step * v;
            }
            t = target;
            out.push(unvectorize(&v, n));
        }
        Ok(out)
    } else {
        let states = dopri5(
            |_, y, dy| dy.gemv(Complex64::from(1.0), &l.matrix, y, Complex64::from(0.0)),
            0.0,
            &v0,
            t_grid,
            Tolerance::default(),
        )?;
        Ok(states.iter().map(|v| unvectorize(v, n)).collect())
    }
}

/// First-order response `x` of a stationary operator `ρ0` to a perturbation
/// `V e^{-iωt}`: solves `(L + iω) x = -V ρ0` together with `tr x = 0`.
///
/// The solve is a minimum-norm least-squares fit, so degenerate stationary
/// manifolds (several dark states) still give a definite response.
pub fn linear_response(
    l: &Liouvillian,
    rho0: &CMatrix,
    perturbation: &CMatrix,
    frequency: f64,
) -> Result<CMatrix> {
    let n = l.n;
    let d = n * n;
    let mut a = CMatrix::zeros(d + 1, d);
    a.view_mut((0, 0), (d, d)).copy_from(&l.matrix);
    for i in 0..d {
        a[(i, i)] += Complex64::new(0.0, frequency);
    }
    a.set_row(d, &l.trace_row().transpose());
    let mut b = CVector::zeros(d + 1);
    let src = -(perturbation * vectorize(rho0));
    b.rows_mut(0, d).copy_from(&src);

    let ls = least_squares(&a, &b, 1e-12)?;
    if ls.residual > 1e-8 * b.norm().max(1e-300) {
        return Err(Error::Singular);
    }
    Ok(unvectorize(&ls.x, n))
}

/// Operator ordering for a two-time correlator `⟨left(0) B(τ) right(0)⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sandwich {
    pub left: CMatrix,
    pub right: CMatrix,
}

impl Sandwich {
    /// `⟨A(0) B(τ)⟩`.
    pub fn left(a: CMatrix) -> Self {
        let n = a.nrows();
        Self {
            left: a,
            right: CMatrix::identity(n, n),
        }
    }

    /// `⟨B(τ) A(0)⟩`.
    pub fn right(a: CMatrix) -> Self {
        let n = a.nrows();
        Self {
            left: CMatrix::identity(n, n),
            right: a,
        }
    }

    /// Normal-ordered intensity form `⟨A†(0) B(τ) A(0)⟩`.
    pub fn normal(a: CMatrix) -> Self {
        Self {
            left: a.adjoint(),
            right: a,
        }
    }
}

/// Two-time correlator from the quantum regression theorem: the operator
/// `right ρ_ss left` is propagated for each delay and traced against `observable`.
pub fn two_time_correlation(
    system: &LevelSystem,
    sandwich: &Sandwich,
    observable: &CMatrix,
    tau_grid: &[f64],
) -> Result<CorrelationTrace<Complex64>> {
    let l = build_liouvillian(system)?;
    let rho = steady_state(&l)?;
    regression(&l, &rho, sandwich, observable, tau_grid)
}

pub(crate) fn regression(
    l: &Liouvillian,
    rho: &DensityMatrix,
    sandwich: &Sandwich,
    observable: &CMatrix,
    tau_grid: &[f64],
) -> Result<CorrelationTrace<Complex64>> {
    let seeded = &sandwich.right * rho.matrix() * &sandwich.left;
    let evolved = propagate_operator(l, &seeded, tau_grid)?;
    let values = evolved.iter().map(|m| (observable * m).trace()).collect();
    CorrelationTrace::new(tau_grid.to_vec(), values)
}
