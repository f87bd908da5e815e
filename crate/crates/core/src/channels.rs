//! Kraus families of the generalized depolarizing channel.
//!
//! All families share one deformation parameter `alpha` that rescales the
//! weight of the non-identity Kraus operators while keeping the set
//! complete. For `N` levels the effective depolarizing strength is
//! `k(p) = p + αp − ((N²−1)/N²)αp²`.
//!
//! Operator order is fixed: identity first, then `X, Y, Z` for a qubit,
//! lexicographic `(r, s)` Weyl indices for a qudit, and lexicographic tensor
//! indices (most significant qubit first) for the multiqubit family.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matcore::{self, hermitian_eigenvalues, kron, ComplexMatrix};

/// Validation tolerance for density-matrix inputs.
pub const STATE_TOL: f64 = 1e-10;

/// Largest supported qubit count for the tensor family (Choi dimension 64).
pub const MAX_QUBITS: usize = 3;

/// `(N² − 1) / N²`, the weight of the non-identity part of an `N`-level
/// depolarizing channel.
pub fn level_weight(levels: usize) -> f64 {
    let n2 = (levels * levels) as f64;
    (n2 - 1.0) / n2
}

/// Effective depolarizing strength `k(p) = p + αp − ((N²−1)/N²)αp²`.
pub fn kappa(alpha: f64, p: f64, levels: usize) -> f64 {
    p + alpha * p - level_weight(levels) * alpha * p * p
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let x = a * b;
    (x, a.mul_add(b, -x))
}

/// Bloch shrinking factor `G(p) = 1 − k(p)`. Evaluated with error-free
/// transformations (compensated sum of exact products), so it keeps full
/// relative accuracy next to its root `α₋`, where the naive form cancels.
pub fn shrink_factor(alpha: f64, p: f64, levels: usize) -> f64 {
    let n2 = (levels * levels) as f64;
    let (ap, ap_lo) = two_prod(alpha, p);
    let (app, app_lo) = two_prod(ap, p);
    let app_lo = app_lo + ap_lo * p;
    let (num, num_lo) = two_prod(app, n2 - 1.0);
    let num_lo = num_lo + app_lo * (n2 - 1.0);
    let quad = num / n2;
    let quad_lo = (quad.mul_add(-n2, num) + num_lo) / n2;
    let (mut sum, mut err) = (0.0, 0.0);
    for term in [1.0, -p, -ap, -ap_lo, quad, quad_lo] {
        let (s, e) = two_sum(sum, term);
        sum = s;
        err += e;
    }
    sum + err
}

pub(crate) fn check_unit(name: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} = {x} must lie in [0, 1]")))
    }
}

pub(crate) fn check_levels(levels: usize) -> Result<()> {
    if levels >= 2 {
        Ok(())
    } else {
        Err(Error::Domain(format!("levels = {levels} must be at least 2")))
    }
}

/// Checks `0 <= q <= p <= 1` for an intermediate pair.
pub fn check_pair(q: f64, p: f64) -> Result<()> {
    check_unit("q", q)?;
    check_unit("p", p)?;
    if q <= p {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "intermediate pair requires q <= p (q = {q}, p = {p})"
        )))
    }
}

/// Full parameter record of the channel family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepolParams {
    pub alpha: f64,
    pub p: f64,
    pub levels: usize,
    pub qubits: usize,
}

impl DepolParams {
    pub fn new(alpha: f64, p: f64, levels: usize, qubits: usize) -> Result<Self> {
        check_unit("alpha", alpha)?;
        check_unit("p", p)?;
        check_levels(levels)?;
        if qubits == 0 {
            return Err(Error::Domain("qubits must be at least 1".into()));
        }
        if qubits > 1 && levels != 2 {
            return Err(Error::Domain(format!(
                "multiqubit channels are built from qubits; got levels = {levels} with qubits = {qubits}"
            )));
        }
        Ok(Self {
            alpha,
            p,
            levels,
            qubits,
        })
    }

    pub fn qubit(alpha: f64, p: f64) -> Result<Self> {
        Self::new(alpha, p, 2, 1)
    }

    /// Hilbert-space dimension the channel acts on.
    pub fn dim(&self) -> usize {
        self.levels.pow(self.qubits as u32)
    }

    pub fn kappa(&self) -> f64 {
        kappa(self.alpha, self.p, self.levels)
    }

    /// Same parameters at a different timelike value.
    pub fn at(&self, p: f64) -> Result<Self> {
        Self::new(self.alpha, p, self.levels, self.qubits)
    }

    /// Kraus set of the matching family.
    pub fn kraus(&self) -> Result<KrausSet> {
        match (self.levels, self.qubits) {
            (2, 1) => qubit_kraus(self.alpha, self.p),
            (_, 1) => qudit_kraus(self.alpha, self.p, self.levels),
            (_, n) => multiqubit_kraus(self.alpha, self.p, n),
        }
    }
}

/// An ordered list of `d x d` Kraus operators.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    operators: Vec<ComplexMatrix>,
    dim: usize,
}

impl KrausSet {
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let dim = operators
            .first()
            .map(ComplexMatrix::rows)
            .ok_or_else(|| Error::Domain("a Kraus set needs at least one operator".into()))?;
        for op in &operators {
            if op.rows() != dim || op.cols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: op.rows().max(op.cols()),
                });
            }
        }
        Ok(Self { operators, dim })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            operators: vec![ComplexMatrix::identity(dim)],
            dim,
        }
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `Σ E†E`.
    pub fn completeness(&self) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.dim, self.dim);
        for e in &self.operators {
            acc = &acc + &(&e.adjoint() * e);
        }
        acc
    }

    /// `max |Σ E†E − I|`.
    pub fn completeness_defect(&self) -> f64 {
        self.completeness().max_abs_diff(&ComplexMatrix::identity(self.dim))
    }

    /// `Σ E ρ E†` on an arbitrary (unvalidated) operator.
    pub fn apply_matrix(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.rows() != self.dim || rho.cols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: rho.rows(),
            });
        }
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for e in &self.operators {
            out = &out + &(&(e * rho) * &e.adjoint());
        }
        Ok(out)
    }
}

/// A validated density matrix: Hermitian, unit trace and positive
/// semidefinite, each within [`STATE_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidState(format!("{}x{} is not square", m.rows(), m.cols())));
        }
        if !m.is_hermitian(STATE_TOL) {
            return Err(Error::InvalidState(format!(
                "not Hermitian (defect {:e})",
                m.hermiticity_defect()
            )));
        }
        let tr = m.trace();
        if (tr - Complex64::ONE).norm() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let min = hermitian_eigenvalues(&m)?[0];
        if min < -STATE_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self(m))
    }

    /// `|ψ><ψ|` for a (not necessarily normalised) nonzero vector.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if norm2 == 0.0 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let s = norm2.sqrt();
        let v: Vec<Complex64> = psi.iter().map(|z| z / s).collect();
        Ok(Self(ComplexMatrix::outer(&v, &v)))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    /// Qubit state with Bloch vector `r` (`|r| <= 1`).
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        let [i, x, y, z] = matcore::paulis();
        let m = &(&(&i + &x.scale_real(r[0])) + &y.scale_real(r[1])) + &z.scale_real(r[2]);
        Self::new(m.scale_real(0.5))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }
}

fn sqrt_weight(radicand: f64, what: &str) -> Result<f64> {
    // rounding can push an exact zero to -1e-17
    if radicand < -1e-14 {
        return Err(Error::Domain(format!(
            "negative Kraus radicand {radicand:e} for {what}"
        )));
    }
    Ok(radicand.max(0.0).sqrt())
}

/// The four Kraus operators `E_I, E_X, E_Y, E_Z` of the qubit family.
pub fn qubit_kraus(alpha: f64, p: f64) -> Result<KrausSet> {
    check_unit("alpha", alpha)?;
    check_unit("p", p)?;
    let id_weight = sqrt_weight((1.0 - 0.75 * alpha * p) * (1.0 - 0.75 * p), "E_I")?;
    let pauli_weight = sqrt_weight((1.0 + alpha * (1.0 - 0.75 * p)) * p / 4.0, "E_X,Y,Z")?;
    let [i, x, y, z] = matcore::paulis();
    KrausSet::new(vec![
        i.scale_real(id_weight),
        x.scale_real(pauli_weight),
        y.scale_real(pauli_weight),
        z.scale_real(pauli_weight),
    ])
}

/// Weyl operator `U_{r,s} = Σ_i ω^{ir} |i><i ⊕ s|` with `ω = exp(2πi/N)`.
pub fn weyl_operator(levels: usize, r: usize, s: usize) -> Result<ComplexMatrix> {
    check_levels(levels)?;
    if r >= levels || s >= levels {
        return Err(Error::Domain(format!(
            "Weyl indices (r, s) = ({r}, {s}) must be below N = {levels}"
        )));
    }
    let n = levels;
    let mut u = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        // reduce the exponent first so the phase is exact for ω^0
        let phase = 2.0 * PI * ((i * r) % n) as f64 / n as f64;
        u[(i, (i + s) % n)] = Complex64::from_polar(1.0, phase);
    }
    Ok(u)
}

/// The `N²` Kraus operators of the `N`-level family, ordered
/// lexicographically in `(r, s)`.
pub fn qudit_kraus(alpha: f64, p: f64, levels: usize) -> Result<KrausSet> {
    check_unit("alpha", alpha)?;
    check_unit("p", p)?;
    check_levels(levels)?;
    let w = level_weight(levels);
    let n2 = (levels * levels) as f64;
    let id_weight = sqrt_weight((1.0 - w * alpha * p) * (1.0 - w * p), "E_00")?;
    let weyl_weight = sqrt_weight((1.0 + alpha * (1.0 - w * p)) * p / n2, "E_rs")?;
    let mut ops = Vec::with_capacity(levels * levels);
    for r in 0..levels {
        for s in 0..levels {
            let u = weyl_operator(levels, r, s)?;
            let c = if r == 0 && s == 0 { id_weight } else { weyl_weight };
            ops.push(u.scale_real(c));
        }
    }
    KrausSet::new(ops)
}

/// Independent identical qubit channels on `qubits` qubits: every `n`-fold
/// Kronecker product of the single-qubit Kraus operators.
pub fn multiqubit_kraus(alpha: f64, p: f64, qubits: usize) -> Result<KrausSet> {
    if qubits == 0 {
        return Err(Error::Domain("qubits must be at least 1".into()));
    }
    if qubits > MAX_QUBITS {
        return Err(Error::ResourceLimit(format!(
            "{qubits} qubits exceeds the supported maximum of {MAX_QUBITS}"
        )));
    }
    let single = qubit_kraus(alpha, p)?;
    let mut ops = single.operators().to_vec();
    for _ in 1..qubits {
        ops = ops
            .iter()
            .flat_map(|a| single.operators().iter().map(move |b| kron(a, b)))
            .collect();
    }
    KrausSet::new(ops)
}

/// `Σ E ρ E†` on a validated state.
pub fn apply_channel(k: &KrausSet, rho: &DensityMatrix) -> Result<DensityMatrix> {
    // a complete Kraus set maps states to states; skip re-validation
    k.apply_matrix(rho.matrix()).map(DensityMatrix)
}
