//! Scalar non-Markovianity measures: canonical decay rates and the HCLA
//! integral, trace distance and the BLP measure, and the quantum-memory
//! witness `X`.
//!
//! All rates derive from `G(p) = 1 − k(p)`, the common Bloch-shrinking
//! factor of the channel: `γ = −G'/G` and the pole-free normalisation
//! `γ̃ = −γ/(1−γ) = G'/(G + G')`.

use crate::channels::{check_levels, check_pair, check_unit, level_weight, shrink_factor, DensityMatrix};
use crate::dynmaps::{crossover_point, qubit_choi, LambdaRatio};
use crate::error::{Error, Result};
use crate::matcore::{kron, paulis, trace_norm, ComplexMatrix};
use crate::quadrature::{integrate, integrate_with_breaks, ABS_TOL};

const POLE_TOL: f64 = 1e-12;

fn shrink(alpha: f64, p: f64, levels: usize) -> f64 {
    shrink_factor(alpha, p, levels)
}

fn shrink_slope(alpha: f64, p: f64, levels: usize) -> f64 {
    -(1.0 + alpha) + 2.0 * level_weight(levels) * alpha * p
}

/// One point of a decay-rate curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSample {
    pub p: f64,
    pub gamma: f64,
    pub gamma_normalized: f64,
}

/// Canonical decay rate `γ(p) = −G'/G`; `SingularRate` where `G = 0`.
pub fn decay_rate(alpha: f64, p: f64, levels: usize) -> Result<f64> {
    check_levels(levels)?;
    let g = shrink(alpha, p, levels);
    if g.abs() < POLE_TOL {
        return Err(Error::SingularRate { p });
    }
    Ok(-shrink_slope(alpha, p, levels) / g)
}

/// Normalised rate `γ̃ = −γ/(1−γ)`, simplified to `G'/(G+G')` so it stays
/// finite through the pole of `γ`.
pub fn decay_rate_normalized(alpha: f64, p: f64, levels: usize) -> Result<f64> {
    check_levels(levels)?;
    let slope = shrink_slope(alpha, p, levels);
    let den = shrink(alpha, p, levels) + slope;
    if den.abs() < POLE_TOL {
        return Err(Error::Domain(format!("normalised rate undefined at p = {p} (γ = 1)")));
    }
    Ok(slope / den)
}

pub fn rate_sample(alpha: f64, p: f64, levels: usize) -> Result<RateSample> {
    Ok(RateSample {
        p,
        gamma: decay_rate(alpha, p, levels)?,
        gamma_normalized: decay_rate_normalized(alpha, p, levels)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureKind {
    /// Quadrature of the normalised rate.
    Hcla,
    /// Reference antiderivative of the normalised rate.
    HclaClosed,
    Blp,
    Volume,
    Memory,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureValue {
    pub kind: MeasureKind,
    pub alpha: f64,
    pub levels: usize,
    pub value: f64,
}

/// HCLA measure `∫_{α₋}^1 γ̃(p) dp` by adaptive quadrature; exactly 0 for
/// `α = 0`, where no negative-rate region exists.
pub fn hcla_measure(alpha: f64, levels: usize) -> Result<MeasureValue> {
    check_unit("alpha", alpha)?;
    check_levels(levels)?;
    let value = if alpha == 0.0 {
        0.0
    } else {
        let lower = crossover_point(alpha, levels)?;
        // γ̃ is smooth on [α₋, 1]: G + G' < 0 there
        let slope = |p: f64| shrink_slope(alpha, p, levels);
        let r = integrate(
            |p| slope(p) / (shrink(alpha, p, levels) + slope(p)),
            lower,
            1.0,
            ABS_TOL,
        );
        r.value
    };
    Ok(MeasureValue {
        kind: MeasureKind::Hcla,
        alpha,
        levels,
        value,
    })
}

/// Closed-form HCLA value from reference antiderivatives, for
/// comparison with [`hcla_measure`].
///
/// - `N = 2`: `ln|2p(α−2) − 4α + 3αp²| + 6α·atanh((α−2+3αp)/s)/s`,
///   `s = √(4 − 4α + 13α²)`, between `α₋` and 1. The logarithm's argument
///   is negative on that range; the absolute value drops a constant `iπ`
///   that cancels between the limits.
/// - `N = 3`: `ln p + ln(9 + 9α − 8αp)` between `α₋` and 1.
///   This does not differentiate to the qutrit `γ̃` and disagrees with the
///   quadrature; it is reported, not trusted.
pub fn hcla_closed(alpha: f64, levels: usize) -> Result<MeasureValue> {
    check_unit("alpha", alpha)?;
    let value = if alpha == 0.0 {
        0.0
    } else {
        let lower = crossover_point(alpha, levels)?;
        let antiderivative: Box<dyn Fn(f64) -> f64> = match levels {
            2 => {
                let s = (4.0 - 4.0 * alpha + 13.0 * alpha * alpha).sqrt();
                Box::new(move |p: f64| {
                    let quad = 2.0 * p * (alpha - 2.0) - 4.0 * alpha + 3.0 * p * p * alpha;
                    quad.abs().ln() + 6.0 * alpha * ((alpha - 2.0 + 3.0 * p * alpha) / s).atanh() / s
                })
            }
            3 => Box::new(move |p: f64| p.ln() + (9.0 + 9.0 * alpha - 8.0 * p * alpha).ln()),
            n => return Err(Error::Domain(format!("no closed-form HCLA for N = {n}"))),
        };
        antiderivative(1.0) - antiderivative(lower)
    };
    Ok(MeasureValue {
        kind: MeasureKind::HclaClosed,
        alpha,
        levels,
        value,
    })
}

/// Trace distance `½‖a − b‖₁`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(0.5 * trace_norm(&(a.matrix() - b.matrix())))
}

/// Trace distance of the evolved `|+>, |->` pair,
/// `¼|4 + 3αp² − 4p(α+1)|`.
pub fn blp_pair_distance(alpha: f64, p: f64) -> f64 {
    0.25 * (4.0 + 3.0 * alpha * p * p - 4.0 * p * (alpha + 1.0)).abs()
}

/// `dD/dp` of [`blp_pair_distance`] (one-sided at the kink).
pub fn blp_pair_distance_rate(alpha: f64, p: f64) -> f64 {
    let inner = 4.0 + 3.0 * alpha * p * p - 4.0 * p * (alpha + 1.0);
    let slope = 6.0 * alpha * p - 4.0 * (alpha + 1.0);
    0.25 * inner.signum() * slope
}

/// BLP measure for the antipodal `|±>` pair: `∫₀¹ max(0, dD/dp) dp`. The
/// kink at `α₋` is passed to the integrator as a breakpoint.
pub fn blp_measure(alpha: f64) -> Result<MeasureValue> {
    check_unit("alpha", alpha)?;
    let value = if alpha == 0.0 {
        0.0
    } else {
        let kink = crossover_point(alpha, 2)?;
        integrate_with_breaks(
            |p| blp_pair_distance_rate(alpha, p).max(0.0),
            &[0.0, kink, 1.0],
            ABS_TOL,
        )
        .value
    };
    Ok(MeasureValue {
        kind: MeasureKind::Blp,
        alpha,
        levels: 2,
        value,
    })
}

/// Unit vectors on a spherical Fibonacci lattice; deterministic, close to
/// uniform.
pub fn fibonacci_sphere(count: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * i as f64;
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

/// Best backflow `Σ max(0, ΔD)` over `pairs` antipodal pure-state pairs
/// (Bloch directions on a Fibonacci lattice), each propagated through the
/// Kraus channel on a uniform `steps`-point grid in `p`. Evidence for the
/// optimality of the `|±>` pair, not a proof.
pub fn blp_pair_search(alpha: f64, pairs: usize, steps: usize) -> Result<f64> {
    check_unit("alpha", alpha)?;
    if steps < 2 {
        return Err(Error::Domain("pair search needs at least 2 grid points".into()));
    }
    let kraus: Vec<_> = (0..steps)
        .map(|i| crate::channels::qubit_kraus(alpha, i as f64 / (steps - 1) as f64))
        .collect::<Result<_>>()?;
    let mut best = 0.0f64;
    for r in fibonacci_sphere(pairs) {
        let up = DensityMatrix::from_bloch(r)?;
        let down = DensityMatrix::from_bloch([-r[0], -r[1], -r[2]])?;
        let mut backflow = 0.0;
        let mut prev: Option<f64> = None;
        for k in &kraus {
            let d = trace_distance(
                &crate::channels::apply_channel(k, &up)?,
                &crate::channels::apply_channel(k, &down)?,
            )?;
            if let Some(last) = prev {
                backflow += (d - last).max(0.0);
            }
            prev = Some(d);
        }
        best = best.max(backflow);
    }
    Ok(best)
}

/// Correlation data of a two-qubit Choi matrix:
/// `s_i = tr(χ (I ⊗ σ_i))`, `T_ij = tr(χ (σ_i ⊗ σ_j))`.
pub fn correlation_data(choi: &ComplexMatrix) -> Result<([f64; 3], [[f64; 3]; 3])> {
    if choi.rows() != 4 || choi.cols() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: choi.rows(),
        });
    }
    let [id, x, y, z] = paulis();
    let sig = [x, y, z];
    let tr = |op: &ComplexMatrix| (choi * op).trace().re;
    let s = std::array::from_fn(|i| tr(&kron(&id, &sig[i])));
    let t = std::array::from_fn(|i| std::array::from_fn(|j| tr(&kron(&sig[i], &sig[j]))));
    Ok((s, t))
}

/// Quantum-memory witness `X = |s| + ‖T‖₁` of the qubit intermediate Choi
/// matrix, computed directly from the correlation data.
pub fn memory_witness_x(alpha: f64, q: f64, p: f64) -> Result<f64> {
    let choi = qubit_choi(alpha, q, p)?;
    let (s, t) = correlation_data(choi.matrix())?;
    let s_norm = s.iter().map(|v| v * v).sum::<f64>().sqrt();
    let t_mat = ComplexMatrix::from_fn(3, 3, |i, j| crate::matcore::real(t[i][j]));
    Ok(s_norm + trace_norm(&t_mat))
}

/// Closed form `X = 3|p(4+4α−3αp) − 4| / |4q+4αq−3αq² − 4|`.
pub fn memory_witness_closed(alpha: f64, q: f64, p: f64) -> Result<f64> {
    check_pair(q, p)?;
    Ok(3.0 * LambdaRatio::qubit(alpha, q, p).value(q)?.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{apply_channel, qubit_kraus};
    use crate::matcore::real;

    // closed-form qubit rate expressions, used as independent oracles
    fn gamma_qubit(a: f64, p: f64) -> f64 {
        (4.0 + (4.0 - 6.0 * p) * a) / (4.0 + 3.0 * a * p * p - 4.0 * p * (1.0 + a))
    }

    fn gamma_tilde_qubit(a: f64, p: f64) -> f64 {
        (4.0 + 4.0 * a - 6.0 * a * p) / (4.0 * p + 4.0 * a - 2.0 * a * p - 3.0 * a * p * p)
    }

    #[test]
    fn rate_at_alpha_zero() {
        for p in [0.0, 0.25, 0.5, 0.99] {
            assert!((decay_rate(0.0, p, 2).unwrap() - 1.0 / (1.0 - p)).abs() < 1e-12);
            if p > 0.0 {
                assert!((decay_rate_normalized(0.0, p, 2).unwrap() - 1.0 / p).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rate_example_and_pole() {
        assert!((decay_rate(0.7, 0.9, 2).unwrap() + 7.208).abs() < 1e-3);
        let c = crossover_point(0.7, 2).unwrap();
        assert!(matches!(decay_rate(0.7, c, 2), Err(Error::SingularRate { .. })));
        assert!(decay_rate(0.7, c - 1e-4, 2).unwrap() > 0.0);
        assert!(decay_rate(0.7, c + 1e-4, 2).unwrap() < 0.0);
    }

    #[test]
    fn normalised_rate_finite_at_pole() {
        let c = crossover_point(0.7, 2).unwrap();
        let v = decay_rate_normalized(0.7, c, 2).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        assert!((gamma_tilde_qubit(0.7, c) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn qubit_closed_forms_agree() {
        for a in [0.0, 0.3, 0.7, 1.0] {
            for i in 1..20 {
                let p = i as f64 / 20.0;
                if crate::dynmaps::near_singularity(a, 2, p) {
                    continue;
                }
                let g = decay_rate(a, p, 2).unwrap();
                assert!((g - gamma_qubit(a, p)).abs() < 1e-10 * g.abs().max(1.0));
                let gt = decay_rate_normalized(a, p, 2).unwrap();
                assert!((gt - gamma_tilde_qubit(a, p)).abs() < 1e-12 * gt.abs().max(1.0));
                assert!((gt - (-g / (1.0 - g))).abs() < 1e-12 * gt.abs().max(1.0));
            }
        }
    }

    #[test]
    fn hcla_values() {
        assert_eq!(hcla_measure(0.0, 2).unwrap().value, 0.0);
        let h = hcla_measure(1.0, 2).unwrap().value;
        assert!((h - 0.278_671_377).abs() < 1e-6, "{h}");
        assert!((h - 0.27876).abs() < 1e-4);
        let c = hcla_closed(1.0, 2).unwrap().value;
        assert!((h - c).abs() < 1e-9);
    }

    #[test]
    fn hcla_monotone_in_alpha() {
        let vals: Vec<f64> = (1..=10)
            .map(|i| hcla_measure(i as f64 / 10.0, 2).unwrap().value)
            .collect();
        assert!(vals.windows(2).all(|w| w[1] > w[0]), "{vals:?}");
    }

    #[test]
    fn qutrit_closed_form_diverges_from_quadrature() {
        let numeric = hcla_measure(1.0, 3).unwrap().value;
        let reference = hcla_closed(1.0, 3).unwrap().value;
        assert!((numeric - 0.213_789_916).abs() < 1e-6);
        assert!((reference - 0.105_360_516).abs() < 1e-6);
        assert!(hcla_closed(0.5, 4).is_err());
    }

    #[test]
    fn trace_distance_examples() {
        let plus = DensityMatrix::pure(&[real(1.0), real(1.0)]).unwrap();
        let minus = DensityMatrix::pure(&[real(1.0), real(-1.0)]).unwrap();
        assert_eq!(trace_distance(&plus, &plus).unwrap(), 0.0);
        assert!((trace_distance(&plus, &minus).unwrap() - 1.0).abs() < 1e-14);
        for (a, p) in [(0.0, 0.4), (0.7, 0.5), (0.9, 0.95)] {
            let k = qubit_kraus(a, p).unwrap();
            let d = trace_distance(&apply_channel(&k, &plus).unwrap(), &apply_channel(&k, &minus).unwrap()).unwrap();
            assert!((d - blp_pair_distance(a, p)).abs() < 1e-13);
        }
        let m3 = DensityMatrix::maximally_mixed(3);
        assert!(matches!(
            trace_distance(&plus, &m3),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn blp_values() {
        assert_eq!(blp_measure(0.0).unwrap().value, 0.0);
        assert!((blp_measure(0.7).unwrap().value - 0.175).abs() < 1e-8);
        assert!((blp_measure(1.0).unwrap().value - 0.25).abs() < 1e-8);
    }

    #[test]
    fn pair_search_does_not_beat_plus_minus() {
        let a = 0.8;
        let searched = blp_pair_search(a, 40, 201).unwrap();
        let analytic = blp_measure(a).unwrap().value;
        // grid misses the minimum of D by at most half a step times max |D'|
        let step = 1.0 / 200.0;
        assert!(searched <= analytic + 1e-9);
        assert!(analytic - searched < 0.5 * step * (1.0 + a), "{searched} vs {analytic}");
    }

    #[test]
    fn memory_witness_examples() {
        assert!((memory_witness_x(0.5, 0.4, 0.4).unwrap() - 3.0).abs() < 1e-12);
        let x = memory_witness_x(0.7, 0.3, 1.0).unwrap();
        assert!((x - 3.0 * 0.7 / 2.149).abs() < 1e-10);
        assert!((x - 0.9772).abs() < 1e-4);
        assert!((memory_witness_closed(0.7, 0.3, 1.0).unwrap() - x).abs() < 1e-10);
    }

    #[test]
    fn memory_witness_non_monotone() {
        let xs: Vec<f64> = (0..=70)
            .map(|i| memory_witness_x(0.8, 0.3, 0.3 + i as f64 / 100.0).unwrap())
            .collect();
        let falls = xs.windows(2).any(|w| w[1] < w[0]);
        let rises = xs.windows(2).any(|w| w[1] > w[0]);
        assert!(falls && rises);
    }
}
