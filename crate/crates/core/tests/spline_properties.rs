use proptest::prelude::*;

use iga_radiation::spline::{eval_curve, refine_knots_curve, KnotVector};

/// Clamped knot vector from sorted interior breakpoints with multiplicities.
fn knot_vector() -> impl Strategy<Value = KnotVector> {
    (2usize..=5, prop::collection::vec((0.01f64..0.99, 1usize..=3), 0..8)).prop_map(|(order, raw)| {
        let mut interior: Vec<(f64, usize)> = raw.into_iter().map(|(t, m)| ((t * 64.0).round() / 64.0, m)).collect();
        interior.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        interior.dedup_by(|a, b| a.0 == b.0);
        let mut knots = vec![0.0; order];
        for (t, m) in interior {
            if t > 0.0 && t < 1.0 {
                knots.extend(std::iter::repeat(t).take(m.min(order - 1)));
            }
        }
        knots.extend(std::iter::repeat(1.0).take(order));
        KnotVector::new(order, knots).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn partition_of_unity_and_nonnegativity(kv in knot_vector(), t in 0.0f64..=1.0) {
        let be = kv.eval_basis(t, 1).unwrap();
        let sum: f64 = be.values().iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-13);
        prop_assert!(be.values().iter().all(|&v| v >= -1e-15));
        let dsum: f64 = be.derivative(1).iter().sum();
        prop_assert!(dsum.abs() < 1e-9 * (1.0 + be.derivative(1).iter().map(|v| v.abs()).sum::<f64>()));
    }

    #[test]
    fn basis_vanishes_outside_support(kv in knot_vector(), t in 0.0f64..=1.0) {
        for i in 0..kv.num_basis() {
            let (lo, hi) = kv.support(i);
            let v = kv.basis_value(i, t).unwrap();
            if t < lo || t > hi {
                prop_assert_eq!(v, 0.0);
            }
        }
        let be = kv.eval_basis(t, 0).unwrap();
        prop_assert_eq!(be.values().len(), kv.order());
    }

    #[test]
    fn derivative_matches_central_difference(kv in knot_vector(), t in 0.02f64..0.98) {
        let h = 1e-6;
        // skip points whose stencil straddles a breakpoint
        prop_assume!(kv.breakpoints().iter().all(|&b| (b - t).abs() > 2.0 * h));
        let d = kv.eval_basis(t, 1).unwrap();
        for i in 0..kv.num_basis() {
            let fd = (kv.basis_value(i, t + h).unwrap() - kv.basis_value(i, t - h).unwrap()) / (2.0 * h);
            let exact = if i >= d.first_index() && i < d.first_index() + kv.order() {
                d.derivative(1)[i - d.first_index()]
            } else {
                0.0
            };
            prop_assert!((fd - exact).abs() < 1e-4 * (1.0 + exact.abs()), "i={} fd={} exact={}", i, fd, exact);
        }
    }

    #[test]
    fn knot_insertion_preserves_curve(
        kv in knot_vector(),
        seed in prop::collection::vec(-1.0f64..1.0, 32),
        new in prop::collection::vec(0.001f64..0.999, 1..4),
        probes in prop::collection::vec(0.0f64..=1.0, 10),
    ) {
        let ctrl: Vec<[f64; 2]> = (0..kv.num_basis()).map(|i| [seed[i % 32], seed[(i * 7 + 3) % 32]]).collect();
        let (fine, fkv) = refine_knots_curve(&ctrl, &kv, &new).unwrap();
        prop_assert_eq!(fkv.num_basis(), kv.num_basis() + new.len());
        for t in probes {
            let a = eval_curve(&ctrl, &kv, t, 0).unwrap()[0];
            let b = eval_curve(&fine, &fkv, t, 0).unwrap()[0];
            prop_assert!((a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
        }
    }
}
