//! Geometric diagnostics: the affine (Bloch) representation of the channel,
//! accessible-state volume, the `F_N` matrix in a Gell-Mann basis, and the
//! Pauli-parameter trajectory with its CP-divisibility test.

use crate::channels::{check_levels, check_unit, qubit_kraus, qudit_kraus, shrink_factor, KrausSet};
use crate::dynmaps::crossover_point;
use crate::error::{Error, Result};
use crate::matcore::{c64, paulis, real, trace_norm, ComplexMatrix};
use crate::measures::{MeasureKind, MeasureValue};
use crate::quadrature::{integrate_with_breaks, ABS_TOL};

/// Below this `|λ|` the trajectory vector `A = λ̇/λ` is reported as singular.
pub const LAMBDA_TOL: f64 = 1e-12;

const TETRA_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisConvention {
    /// `{I, X, Y, Z}/√2`, `tr(GᵢGⱼ) = δᵢⱼ`.
    Orthonormal,
    /// `G₀ = I/√N` plus generalized Gell-Mann matrices, `tr(GᵢGⱼ) = 2δᵢⱼ`
    /// for `i, j > 0`, with an overall `1/N²` prefactor.
    GellMann,
}

/// Real matrix `Mᵢⱼ ∝ tr(Gᵢ Φ(Gⱼ))` of a channel in an operator basis.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    pub matrix: ComplexMatrix,
    pub basis: BasisConvention,
}

impl AffineMap {
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn trace_norm(&self) -> f64 {
        trace_norm(&self.matrix)
    }

    /// `|det M|`.
    pub fn abs_determinant(&self) -> f64 {
        self.matrix.as_nalgebra().determinant().norm()
    }

    /// The block acting on the traceless part (drops row and column 0).
    pub fn bloch_block(&self) -> ComplexMatrix {
        let n = self.dim() - 1;
        self.matrix.block(1, 1, n, n)
    }
}

/// Common eigenvalue `λ(p) = 1 − k(p)` of the qubit Bloch map,
/// `¾αp² − αp − p + 1`.
pub fn bloch_lambda(alpha: f64, p: f64) -> f64 {
    shrink_factor(alpha, p, 2)
}

/// `dλ/dp = (3/2)αp − α − 1`.
pub fn bloch_lambda_rate(alpha: f64, p: f64) -> f64 {
    1.5 * alpha * p - alpha - 1.0
}

fn transfer_matrix(kraus: &KrausSet, basis: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let images = basis
        .iter()
        .map(|g| kraus.apply_matrix(g))
        .collect::<Result<Vec<_>>>()?;
    Ok(ComplexMatrix::from_fn(basis.len(), basis.len(), |i, j| {
        real((&basis[i] * &images[j]).trace().re)
    }))
}

/// `Mᵢⱼ = tr(Gᵢ Φ(Gⱼ))` with `G = {I, X, Y, Z}/√2`, computed from the Kraus
/// action.
pub fn affine_map_of(alpha: f64, p: f64) -> Result<AffineMap> {
    let basis: Vec<_> = paulis()
        .iter()
        .map(|s| s.scale_real(std::f64::consts::FRAC_1_SQRT_2))
        .collect();
    let matrix = transfer_matrix(&qubit_kraus(alpha, p)?, &basis)?;
    Ok(AffineMap {
        matrix,
        basis: BasisConvention::Orthonormal,
    })
}

/// `|det M| = |λ|³`, proportional to the volume of accessible Bloch vectors.
pub fn volume_determinant(alpha: f64, p: f64) -> Result<f64> {
    Ok(affine_map_of(alpha, p)?.abs_determinant())
}

/// `‖B‖₁` of the Bloch block.
pub fn bloch_block_norm(alpha: f64, p: f64) -> Result<f64> {
    Ok(trace_norm(&affine_map_of(alpha, p)?.bloch_block()))
}

/// Volume measure `∫₀¹ max(0, d‖M‖₁/dp) dp` with `‖M‖₁ = 1 + 3|λ|`.
pub fn volume_measure(alpha: f64) -> Result<MeasureValue> {
    check_unit("alpha", alpha)?;
    let value = if alpha == 0.0 {
        0.0
    } else {
        let kink = crossover_point(alpha, 2)?;
        let rate = |p: f64| (3.0 * bloch_lambda(alpha, p).signum() * bloch_lambda_rate(alpha, p)).max(0.0);
        integrate_with_breaks(rate, &[0.0, kink, 1.0], ABS_TOL).value
    };
    Ok(MeasureValue {
        kind: MeasureKind::Volume,
        alpha,
        levels: 2,
        value,
    })
}

/// Generalized Gell-Mann matrices for dimension `N`, normalised to
/// `tr(GᵢGⱼ) = 2δᵢⱼ`: symmetric, then antisymmetric off-diagonal ones for
/// each pair `j < k`, then the `N − 1` diagonal ones.
pub fn gell_mann(levels: usize) -> Result<Vec<ComplexMatrix>> {
    check_levels(levels)?;
    let n = levels;
    let unit = |r: usize, c: usize, v| {
        let mut m = ComplexMatrix::zeros(n, n);
        m[(r, c)] = v;
        m
    };
    let mut out = Vec::with_capacity(n * n - 1);
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|k| (0..k).map(move |j| (j, k))).collect();
    for &(j, k) in &pairs {
        out.push(&unit(j, k, real(1.0)) + &unit(k, j, real(1.0)));
    }
    for &(j, k) in &pairs {
        out.push(&unit(j, k, c64(0.0, -1.0)) + &unit(k, j, c64(0.0, 1.0)));
    }
    for l in 1..n {
        let norm = (2.0 / (l * (l + 1)) as f64).sqrt();
        let diag: Vec<f64> = (0..n)
            .map(|j| match j.cmp(&l) {
                std::cmp::Ordering::Less => norm,
                std::cmp::Ordering::Equal => -(l as f64) * norm,
                std::cmp::Ordering::Greater => 0.0,
            })
            .collect();
        out.push(ComplexMatrix::real_diag(&diag));
    }
    Ok(out)
}

/// `F_{kl} = (1/N²) tr(G_k Φ(G_l))` for the `N`-level channel, in the basis
/// `G₀ = I/√N` plus [`gell_mann`]. Returns the matrix and its trace norm.
pub fn f_matrix(alpha: f64, p: f64, levels: usize) -> Result<(AffineMap, f64)> {
    if !(3..=4).contains(&levels) {
        return Err(Error::Domain(format!(
            "F matrix is defined here for N in {{3, 4}}, got {levels}"
        )));
    }
    let mut basis = vec![ComplexMatrix::identity(levels).scale_real(1.0 / (levels as f64).sqrt())];
    basis.extend(gell_mann(levels)?);
    let matrix = transfer_matrix(&qudit_kraus(alpha, p, levels)?, &basis)?.scale_real(1.0 / (levels * levels) as f64);
    let map = AffineMap {
        matrix,
        basis: BasisConvention::GellMann,
    };
    let norm = map.trace_norm();
    Ok((map, norm))
}

/// One sample of the Pauli-parameter trajectory `λ(p) = (λ₁, λ₂, λ₃)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub p: f64,
    pub lambdas: [f64; 3],
    pub abs_lambdas: [f64; 3],
    /// `Aᵢ = λ̇ᵢ/λᵢ`; `None` where some `|λᵢ|` vanishes.
    pub a_vector: Option<[f64; 3]>,
    /// `1 ± λ₃ ≥ |λ₁ ± λ₂|`.
    pub inside_tetrahedron: bool,
    /// Scalar products of `A` with `(−1,1,1)`, `(1,−1,1)`, `(1,1,−1)`.
    pub inequalities: Option<[f64; 3]>,
    /// All three products nonpositive; `false` at a singular point.
    pub cp_divisible: bool,
}

pub fn in_tetrahedron(l: [f64; 3]) -> bool {
    let [l1, l2, l3] = l;
    1.0 + l3 + TETRA_TOL >= (l1 + l2).abs() && 1.0 - l3 + TETRA_TOL >= (l1 - l2).abs()
}

pub fn trajectory_point(alpha: f64, p: f64) -> Result<TrajectoryPoint> {
    check_unit("alpha", alpha)?;
    check_unit("p", p)?;
    let l = bloch_lambda(alpha, p);
    let lambdas = [l; 3];
    let a_vector = (l.abs() >= LAMBDA_TOL).then(|| [bloch_lambda_rate(alpha, p) / l; 3]);
    let inequalities = a_vector.map(|[a1, a2, a3]| [-a1 + a2 + a3, a1 - a2 + a3, a1 + a2 - a3]);
    Ok(TrajectoryPoint {
        p,
        lambdas,
        abs_lambdas: lambdas.map(f64::abs),
        a_vector,
        inside_tetrahedron: in_tetrahedron(lambdas),
        inequalities,
        cp_divisible: inequalities.is_some_and(|v| v.iter().all(|&x| x <= 0.0)),
    })
}

pub fn trajectory(alpha: f64, grid: &[f64]) -> Result<Vec<TrajectoryPoint>> {
    grid.iter().map(|&p| trajectory_point(alpha, p)).collect()
}
