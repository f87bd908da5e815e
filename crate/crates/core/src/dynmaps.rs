//! Superoperators, intermediate maps and their Choi matrices.
//!
//! A channel `Φ(p,0)` is stored as its column-stacking superoperator
//! `S = Σ conj(E) ⊗ E`. The intermediate map is `Φ(p,q) = S(p) S(q)⁻¹`, which
//! ceases to exist at the crossover point `α₋` where `k(q) = 1`.
//!
//! Choi matrices are built with the commutation-matrix construction:
//! `χ = devec( U₂₃ (S ⊗ I_{d²}) U₂₃ vec(|Ψ><Ψ|) )` with `|Ψ> = Σ|ii>/√d`.
//! [`choi_of`] applies `U₂₃` as an index permutation so that three-qubit
//! maps (`d⁴ = 4096`) stay cheap; [`choi_of_dense`] materialises every
//! factor and is kept for small `d` cross-checks.

use num_complex::Complex64;

use crate::channels::{self, check_pair, check_unit, level_weight, multiqubit_kraus, shrink_factor, KrausSet};
use crate::error::{Error, Result};
use crate::matcore::{
    self, devectorize, hermitian_eigenvalues, kron, real, swap23_apply, swap_matrix, trace_norm, vectorize,
    ComplexMatrix,
};

/// Sweeps treat parameters this close to `α₋` as singular.
pub const SINGULAR_GUARD: f64 = 1e-6;

/// A Choi trace norm above `1 + NCP_TOL` flags a non-CP map.
pub const NCP_TOL: f64 = 1e-10;

/// Step of the one-sided difference in [`g_function`].
pub const G_STEP: f64 = 1e-6;

/// `|G(q)| = |1 − k(q)|` below this is treated as a pole.
const POLE_TOL: f64 = 1e-12;

/// Column-stacking matrix representation of a linear map on `d x d`
/// operators.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    matrix: ComplexMatrix,
    dim: usize,
}

impl Superoperator {
    pub fn new(matrix: ComplexMatrix, dim: usize) -> Result<Self> {
        let d2 = dim * dim;
        if matrix.rows() != d2 || matrix.cols() != d2 {
            return Err(Error::DimensionMismatch {
                expected: d2,
                found: matrix.rows(),
            });
        }
        Ok(Self { matrix, dim })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim * dim),
            dim,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Action on an operator, through `vec`.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.rows() != self.dim || rho.cols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: rho.rows(),
            });
        }
        devectorize(&self.matrix.apply(&vectorize(rho)), self.dim)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(Self {
            matrix: &self.matrix * &other.matrix,
            dim: self.dim,
        })
    }

    pub fn inverse(&self) -> Result<Self> {
        Ok(Self {
            matrix: matcore::inverse(&self.matrix)?,
            dim: self.dim,
        })
    }

    /// Superoperator of `self ⊗ other` acting on `C^{d1} ⊗ C^{d2}`.
    pub fn tensor(&self, other: &Self) -> Self {
        let (d1, d2) = (self.dim, other.dim);
        let d = d1 * d2;
        // split a composite vec index into the two factor vec indices
        let split = |v: usize| {
            let (row, col) = (v % d, v / d);
            let (i1, i2) = (row / d2, row % d2);
            let (j1, j2) = (col / d2, col % d2);
            (i1 + d1 * j1, i2 + d2 * j2)
        };
        let parts: Vec<(usize, usize)> = (0..d * d).map(split).collect();
        let a = &self.matrix;
        let b = &other.matrix;
        let matrix = ComplexMatrix::from_fn(d * d, d * d, |out, inp| {
            let (oa, ob) = parts[out];
            let (ia, ib) = parts[inp];
            a[(oa, ia)] * b[(ob, ib)]
        });
        Self { matrix, dim: d }
    }

    /// `n`-fold tensor power.
    pub fn tensor_power(&self, n: usize) -> Self {
        let mut acc = self.clone();
        for _ in 1..n.max(1) {
            acc = acc.tensor(self);
        }
        acc
    }
}

/// `S = Σ conj(E) ⊗ E`, so that `S vec(ρ) = vec(Σ E ρ E†)`.
pub fn superoperator_of(k: &KrausSet) -> Superoperator {
    let d = k.dim();
    let mut s = ComplexMatrix::zeros(d * d, d * d);
    for e in k.operators() {
        s = &s + &kron(&e.conj(), e);
    }
    Superoperator { matrix: s, dim: d }
}

/// `Φ(p,q) = Φ(p,0) Φ(q,0)⁻¹` for any family, given a builder that returns
/// the Kraus set at a timelike value.
pub fn intermediate_map<F>(q: f64, p: f64, build: F) -> Result<Superoperator>
where
    F: Fn(f64) -> Result<KrausSet>,
{
    check_pair(q, p)?;
    let forward = superoperator_of(&build(p)?);
    let to_q = superoperator_of(&build(q)?);
    let back = to_q.inverse().map_err(|e| at_q(e, q))?;
    forward.compose(&back)
}

fn at_q(e: Error, q: f64) -> Error {
    match e {
        Error::Singular { ratio } => Error::SingularMap { q, ratio },
        other => other,
    }
}

pub fn qubit_intermediate_map(alpha: f64, q: f64, p: f64) -> Result<Superoperator> {
    intermediate_map(q, p, |t| channels::qubit_kraus(alpha, t))
}

pub fn qudit_intermediate_map(alpha: f64, q: f64, p: f64, levels: usize) -> Result<Superoperator> {
    intermediate_map(q, p, |t| channels::qudit_kraus(alpha, t, levels))
}

/// Independent-qubit intermediate map. The single-qubit propagator is formed
/// first (a 4x4 inversion) and then raised to the `n`-fold tensor power, which
/// equals `S_n(p) S_n(q)⁻¹` without inverting a `4ⁿ x 4ⁿ` matrix.
pub fn multiqubit_intermediate_map(alpha: f64, q: f64, p: f64, qubits: usize) -> Result<Superoperator> {
    // range-check the qubit count the same way the Kraus builder does
    multiqubit_kraus(alpha, p, qubits)?;
    Ok(qubit_intermediate_map(alpha, q, p)?.tensor_power(qubits))
}

/// Where a Choi matrix came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChoiSource {
    pub alpha: f64,
    pub q: f64,
    pub p: f64,
    pub dim: usize,
}

/// `χ = (Φ ⊗ I)|Ψ><Ψ|` for a map on `d x d` operators; a `d² x d²` matrix,
/// Hermitian with unit trace for Hermiticity- and trace-preserving maps.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    matrix: ComplexMatrix,
    dim: usize,
    source: Option<ChoiSource>,
}

impl ChoiMatrix {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn source(&self) -> Option<ChoiSource> {
        self.source
    }

    pub fn with_source(mut self, source: ChoiSource) -> Self {
        self.source = Some(source);
        self
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.matrix)
    }

    pub fn trace_norm(&self) -> f64 {
        trace_norm(&self.matrix)
    }
}

/// `Σ_i |ii> / √d`.
pub fn maximally_entangled(dim: usize) -> Vec<Complex64> {
    let mut psi = vec![Complex64::ZERO; dim * dim];
    let amp = real(1.0 / (dim as f64).sqrt());
    for i in 0..dim {
        psi[i * dim + i] = amp;
    }
    psi
}

fn choi_input(dim: usize) -> Vec<Complex64> {
    let psi = maximally_entangled(dim);
    vectorize(&ComplexMatrix::outer(&psi, &psi))
}

/// Choi matrix via the commutation-matrix pipeline, with `U₂₃` applied as a
/// permutation and `S ⊗ I_{d²}` applied blockwise.
pub fn choi_of(map: &Superoperator) -> ChoiMatrix {
    let d = map.dim();
    let d2 = d * d;
    let w = swap23_apply(&choi_input(d), d);
    // (S ⊗ I_{d²}) w : the S factor owns the most significant index
    let s = map.matrix();
    let mut y = vec![Complex64::ZERO; d2 * d2];
    for hi in 0..d2 {
        for k in 0..d2 {
            let coeff = s[(hi, k)];
            if coeff == Complex64::ZERO {
                continue;
            }
            let (dst, src) = (hi * d2, k * d2);
            for lo in 0..d2 {
                y[dst + lo] += coeff * w[src + lo];
            }
        }
    }
    let z = swap23_apply(&y, d);
    let matrix = devectorize(&z, d2).expect("length d^4 by construction");
    ChoiMatrix {
        matrix,
        dim: d,
        source: None,
    }
}

/// The same construction with every factor materialised as a dense matrix;
/// `O(d⁸)` memory, intended for `d <= 4`.
pub fn choi_of_dense(map: &Superoperator) -> ChoiMatrix {
    let d = map.dim();
    let u = swap_matrix(d);
    let lifted = kron(map.matrix(), &ComplexMatrix::identity(d * d));
    let pipeline = &(&u * &lifted) * &u;
    let matrix = devectorize(&pipeline.apply(&choi_input(d)), d * d).expect("length d^4");
    ChoiMatrix {
        matrix,
        dim: d,
        source: None,
    }
}

/// Choi matrix of the qubit intermediate map `Φ(p,q)`.
pub fn qubit_choi(alpha: f64, q: f64, p: f64) -> Result<ChoiMatrix> {
    let map = qubit_intermediate_map(alpha, q, p)?;
    Ok(choi_of(&map).with_source(ChoiSource { alpha, q, p, dim: 2 }))
}

/// Choi matrix of the `N`-level intermediate map.
pub fn qudit_choi(alpha: f64, q: f64, p: f64, levels: usize) -> Result<ChoiMatrix> {
    let map = qudit_intermediate_map(alpha, q, p, levels)?;
    Ok(choi_of(&map).with_source(ChoiSource {
        alpha,
        q,
        p,
        dim: levels,
    }))
}

/// Choi matrix of the `n`-qubit intermediate map.
pub fn multiqubit_choi(alpha: f64, q: f64, p: f64, qubits: usize) -> Result<ChoiMatrix> {
    let map = multiqubit_intermediate_map(alpha, q, p, qubits)?;
    let dim = map.dim();
    Ok(choi_of(&map).with_source(ChoiSource { alpha, q, p, dim }))
}

/// The common eigenvalue `λ(p,q) = (1 − k(p)) / (1 − k(q))` of the diagonal
/// intermediate map, kept as an explicit ratio. For a qubit the stored parts
/// are `p(4+4α−3αp) − 4` and `4q+4αq−3αq² − 4`; for `N` levels both are
/// scaled by `N²` instead of 4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaRatio {
    pub numerator: f64,
    pub denominator: f64,
}

impl LambdaRatio {
    pub fn qubit(alpha: f64, q: f64, p: f64) -> Self {
        Self {
            numerator: -4.0 * shrink_factor(alpha, p, 2),
            denominator: -4.0 * shrink_factor(alpha, q, 2),
        }
    }

    pub fn levels(alpha: f64, q: f64, p: f64, levels: usize) -> Self {
        let n2 = (levels * levels) as f64;
        Self {
            numerator: -n2 * shrink_factor(alpha, p, levels),
            denominator: -n2 * shrink_factor(alpha, q, levels),
        }
    }

    /// The ratio, or `SingularMap` at the pole `k(q) = 1`.
    pub fn value(&self, q: f64) -> Result<f64> {
        let scale = self.numerator.abs().max(4.0);
        if self.denominator.abs() < POLE_TOL * scale {
            return Err(Error::SingularMap {
                q,
                ratio: self.denominator.abs() / scale,
            });
        }
        Ok(self.numerator / self.denominator)
    }
}

/// Closed-form Choi spectrum `(Λ_I, Λ_X, Λ_Y, Λ_Z)` of the qubit
/// intermediate map: `Λ_I = 1/4 + 3λ/4`, `Λ_i = 1/4 − λ/4`.
pub fn choi_eigenvalues_closed(alpha: f64, q: f64, p: f64) -> Result<[f64; 4]> {
    check_pair(q, p)?;
    let lambda = LambdaRatio::qubit(alpha, q, p).value(q)?;
    let li = 0.25 - 0.25 * lambda;
    Ok([0.25 + 0.75 * lambda, li, li, li])
}

/// Closed-form qubit intermediate Choi matrix written in the shrink factors
/// `G(p)`, `G(q)`, normalised to unit trace.
pub fn qubit_choi_closed_form(alpha: f64, q: f64, p: f64) -> Result<ComplexMatrix> {
    check_pair(q, p)?;
    let (gp, gq) = (shrink_factor(alpha, p, 2), shrink_factor(alpha, q, 2));
    if gq.abs() < POLE_TOL {
        return Err(Error::SingularMap { q, ratio: gq.abs() });
    }
    // (kp + kq − 2)/(kq − 1) = 1 + λ, (kq − kp)/(kq − 1) = 1 − λ
    let outer = (gp + gq) / gq;
    let inner = (gq - gp) / gq;
    let corner = 2.0 * gp / gq;
    let rows: [&[f64]; 4] = [
        &[outer, 0.0, 0.0, corner],
        &[0.0, inner, 0.0, 0.0],
        &[0.0, 0.0, inner, 0.0],
        &[corner, 0.0, 0.0, outer],
    ];
    Ok(ComplexMatrix::from_real_rows(&rows).scale_real(0.25))
}

/// Smaller root `α₋` of `((N²−1)/N²)αp² − (1+α)p + 1 = 0`, the timelike value
/// where `k(p) = 1`. For `α > 0` it always lies in `(0, 1)`.
pub fn crossover_point(alpha: f64, levels: usize) -> Result<f64> {
    check_unit("alpha", alpha)?;
    channels::check_levels(levels)?;
    if alpha == 0.0 {
        return Err(Error::NoSingularity { alpha });
    }
    let b = 1.0 + alpha;
    let disc = b * b - 4.0 * level_weight(levels) * alpha;
    // rationalised form; no cancellation for small alpha
    Ok(2.0 / (b + disc.sqrt()))
}

/// `α₋` when it exists, `None` for `α = 0`.
pub fn crossover_or_none(alpha: f64, levels: usize) -> Option<f64> {
    crossover_point(alpha, levels).ok()
}

/// True when `x` sits within [`SINGULAR_GUARD`] of `α₋`.
pub fn near_singularity(alpha: f64, levels: usize, x: f64) -> bool {
    crossover_or_none(alpha, levels).is_some_and(|c| (x - c).abs() < SINGULAR_GUARD)
}

/// Trace-norm witness of non-complete-positivity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NcpWitness {
    pub trace_norm: f64,
    pub is_ncp: bool,
}

pub fn ncp_witness(choi: &ChoiMatrix) -> NcpWitness {
    let norm = choi.trace_norm();
    NcpWitness {
        trace_norm: norm,
        is_ncp: norm > 1.0 + NCP_TOL,
    }
}

/// Bell states in the order `Φ⁺, Φ⁻, Ψ⁺, Ψ⁻`.
pub fn bell_states() -> [Vec<Complex64>; 4] {
    let h = real(std::f64::consts::FRAC_1_SQRT_2);
    let z = Complex64::ZERO;
    [vec![h, z, z, h], vec![h, z, z, -h], vec![z, h, h, z], vec![z, h, -h, z]]
}

/// `<B|χ|B>` for each Bell state, in [`bell_states`] order.
pub fn bell_expectations(choi: &ChoiMatrix) -> Result<[f64; 4]> {
    if choi.matrix.rows() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: choi.matrix.rows(),
        });
    }
    let states = bell_states();
    Ok(std::array::from_fn(|i| choi.matrix.expectation(&states[i]).re))
}

/// Right derivative `g(q) = lim (‖χ(q, q+ε)‖₁ − 1)/ε` of the Choi trace norm
/// for the `n`-qubit family. One-sided difference at [`G_STEP`] refined by a
/// Richardson step at half the spacing; clamped at zero.
pub fn g_function(alpha: f64, q: f64, qubits: usize) -> Result<f64> {
    check_unit("alpha", alpha)?;
    if !(0.0..1.0).contains(&q) || q + G_STEP > 1.0 {
        return Err(Error::Domain(format!("g(q) needs q in [0, 1 - {G_STEP}], got {q}")));
    }
    let excess = |h: f64| -> Result<f64> {
        let choi = multiqubit_choi(alpha, q, q + h, qubits)?;
        Ok((choi.trace_norm() - 1.0) / h)
    };
    let coarse = excess(G_STEP)?;
    let fine = excess(0.5 * G_STEP)?;
    Ok((2.0 * fine - coarse).max(0.0))
}
