use depolmark::channels::{apply_channel, qubit_kraus, qudit_kraus, shrink_factor, DensityMatrix};
use depolmark::dynmaps::{choi_of, choi_of_dense, near_singularity, qubit_choi, qudit_intermediate_map, LambdaRatio};
use depolmark::geometry::{affine_map_of, trajectory_point};
use depolmark::measures::{decay_rate, decay_rate_normalized, memory_witness_x, trace_distance};
use proptest::prelude::*;

fn bloch() -> impl Strategy<Value = [f64; 3]> {
    (0.0..=1.0f64, 0.0..std::f64::consts::PI, 0.0..std::f64::consts::TAU)
        .prop_map(|(r, t, f)| [r * t.sin() * f.cos(), r * t.sin() * f.sin(), r * t.cos()])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn channel_output_is_a_state(alpha in 0.0..=1.0f64, p in 0.0..=1.0f64, r in bloch()) {
        let rho = DensityMatrix::from_bloch(r).unwrap();
        let out = apply_channel(&qubit_kraus(alpha, p).unwrap(), &rho).unwrap();
        prop_assert!((out.matrix().trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trace_distance_bounded_and_contracting(
        alpha in 0.0..=1.0f64, p in 0.0..=1.0f64, a in bloch(), b in bloch()
    ) {
        let (ra, rb) = (DensityMatrix::from_bloch(a).unwrap(), DensityMatrix::from_bloch(b).unwrap());
        let before = trace_distance(&ra, &rb).unwrap();
        let k = qubit_kraus(alpha, p).unwrap();
        let after = trace_distance(&apply_channel(&k, &ra).unwrap(), &apply_channel(&k, &rb).unwrap()).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&before));
        prop_assert!(after <= before + 1e-12);
    }

    #[test]
    fn qubit_choi_trace_and_spectrum(alpha in 0.0..=1.0f64, q in 0.0..=1.0f64, t in 0.0..=1.0f64) {
        let p = q + (1.0 - q) * t;
        prop_assume!(!near_singularity(alpha, 2, q));
        let choi = qubit_choi(alpha, q, p).unwrap();
        prop_assert!((choi.trace() - 1.0).abs() < 1e-10);
        let lambda = LambdaRatio::qubit(alpha, q, p).value(q).unwrap();
        let eig = choi.eigenvalues().unwrap();
        let scale = lambda.abs().max(1.0);
        prop_assert!((eig.iter().cloned().fold(f64::MIN, f64::max)
            - (0.25 + 0.75 * lambda).max(0.25 - 0.25 * lambda)).abs() < 1e-10 * scale);
        prop_assert!((choi.trace_norm() - (0.25 * (1.0 + 3.0 * lambda).abs() + 0.75 * (1.0 - lambda).abs())).abs() < 1e-10 * scale);
    }

    #[test]
    fn structured_choi_matches_dense(alpha in 0.0..=1.0f64, q in 0.0..0.5f64, t in 0.0..=1.0f64) {
        let p = q + (1.0 - q) * t;
        let map = qudit_intermediate_map(alpha, q, p, 3).unwrap();
        let diff = choi_of(&map).matrix().max_abs_diff(choi_of_dense(&map).matrix());
        prop_assert!(diff < 1e-12);
    }

    #[test]
    fn normalised_rate_identity(alpha in 0.0..=1.0f64, p in 0.01..=1.0f64, n in 2usize..=4) {
        prop_assume!(!near_singularity(alpha, n, p));
        let g = decay_rate(alpha, p, n).unwrap();
        prop_assume!((1.0 - g).abs() > 1e-6);
        let gt = decay_rate_normalized(alpha, p, n).unwrap();
        prop_assert!((gt + g / (1.0 - g)).abs() < 1e-9 * gt.abs().max(1.0));
    }

    #[test]
    fn memory_witness_is_three_lambda(alpha in 0.0..=1.0f64, q in 0.0..=1.0f64, t in 0.0..=1.0f64) {
        let p = q + (1.0 - q) * t;
        prop_assume!(!near_singularity(alpha, 2, q));
        let x = memory_witness_x(alpha, q, p).unwrap();
        let lambda = shrink_factor(alpha, p, 2) / shrink_factor(alpha, q, 2);
        prop_assert!((x - 3.0 * lambda.abs()).abs() < 1e-10 * lambda.abs().max(1.0));
    }

    #[test]
    fn affine_map_and_trajectory_agree(alpha in 0.0..=1.0f64, p in 0.0..=1.0f64) {
        let m = affine_map_of(alpha, p).unwrap();
        let pt = trajectory_point(alpha, p).unwrap();
        for i in 1..4 {
            prop_assert!((m.matrix[(i, i)].re - pt.lambdas[i - 1]).abs() < 1e-12);
        }
        prop_assert!(pt.lambdas.iter().all(|l| (-1.0..=1.0).contains(l)));
        prop_assert!(pt.inside_tetrahedron);
        if let Some(a) = pt.a_vector {
            prop_assert_eq!(pt.cp_divisible, a[0] <= 0.0);
        }
    }

    #[test]
    fn qudit_channel_preserves_trace(alpha in 0.0..=1.0f64, p in 0.0..=1.0f64, n in 2usize..=4) {
        let k = qudit_kraus(alpha, p, n).unwrap();
        prop_assert!(k.completeness_defect() < 1e-12);
    }
}
