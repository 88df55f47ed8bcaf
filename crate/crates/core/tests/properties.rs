use kinterp::sampling::{peetre_k, reverse_couple};
use kinterp::spaces::{space_norm, NormInput, SpaceSpec};
use kinterp::svcalc::sv_grid_check;
use kinterp::verify::check_equivalence;
use kinterp::{Domain, KProfile, Lq, Scalar, StepFunction, SvExpr};
use proptest::prelude::*;

/// Nonincreasing step function on (0, 1): sorted cut points, decreasing values.
fn step_fn() -> impl Strategy<Value = StepFunction> {
    (prop::collection::vec(-16.0f64..-0.1, 1..8), prop::collection::vec(0.01f64..5.0, 8)).prop_map(|(mut cuts, incs)| {
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
        let mut edges = vec![0.0];
        edges.extend(cuts.iter().map(|x| x.exp()));
        edges.push(1.0);
        let cells = edges.len() - 1;
        let mut values: Vec<f64> = incs[..cells].iter().scan(0.0, |s, d| {
            *s += d;
            Some(*s)
        }).collect();
        values.reverse();
        StepFunction::new(edges, values).unwrap()
    })
}

fn quarter() -> impl Strategy<Value = Scalar> {
    (-8i64..=8).prop_map(|k| Scalar::ratio(k, 4))
}

fn spaces() -> Vec<SpaceSpec> {
    let half = Scalar::ratio(1, 2);
    vec![
        SpaceSpec::Classic { theta: half, b: SvExpr::l(Scalar::int(-1)), e: Lq::int(1) },
        SpaceSpec::Classic { theta: Scalar::ratio(1, 4), b: SvExpr::one(), e: Lq::Inf },
        SpaceSpec::LorentzKaramata { p: Lq::int(2), b: SvExpr::l(Scalar::int(1)), e: Lq::int(2) },
        SpaceSpec::R { theta: half, b: SvExpr::l(Scalar::int(-2)), e: Lq::int(1), a: SvExpr::one(), f: Lq::int(2) },
        SpaceSpec::L { theta: half, b: SvExpr::l(Scalar::int(-2)), e: Lq::int(1), a: SvExpr::one(), f: Lq::Inf },
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sv_sandwich(a in quarter(), b in quarter(), eps in 0.05f64..0.5) {
        let e = SvExpr::l2(a, b);
        // t^eps ℓ^a turns monotone once |x| passes about |a|/eps; the window must contain that
        let r = 2.0 + 4.0 * a.to_f64().abs().max(b.to_f64().abs()) / eps;
        prop_assert!(sv_grid_check(&e, eps, r, 0.05, 0.05).unwrap());
    }

    #[test]
    fn norms_are_lattice_monotone(f in step_fn(), extra in 0.0f64..3.0, cut in -10.0f64..-0.5) {
        // g = f + extra·χ(0, e^cut) is again nonincreasing and dominates f
        let edges = f.edges().to_vec();
        let c = cut.exp();
        let vals: Vec<f64> = edges.windows(2).zip(f.values()).map(|(w, v)| if w[1] <= c { v + extra } else { *v }).collect();
        let g = StepFunction::new(edges, vals).unwrap();
        let grid = Domain::Unit.grid(256).unwrap();
        for sp in spaces() {
            let a = space_norm(&sp, NormInput::FStar(&f, &grid)).unwrap();
            let b = space_norm(&sp, NormInput::FStar(&g, &grid)).unwrap();
            prop_assert!(a <= b * (1.0 + 1e-12), "{sp}: {a} > {b}");
        }
    }

    #[test]
    fn norms_are_homogeneous(f in step_fn(), lambda in 1e-3f64..1e3) {
        let grid = Domain::Unit.grid(256).unwrap();
        let g = f.scale(lambda).unwrap();
        for sp in spaces() {
            let a = space_norm(&sp, NormInput::FStar(&f, &grid)).unwrap();
            let b = space_norm(&sp, NormInput::FStar(&g, &grid)).unwrap();
            prop_assert!((b - lambda * a).abs() <= 1e-10 * b.max(1e-300), "{sp}");
        }
    }

    #[test]
    fn rearrangement_dominates_partial_integrals(vals in prop::collection::vec(0.0f64..4.0, 2..10), t in 0.0f64..1.0) {
        // Hardy–Littlewood: ∫_0^t |f| <= ∫_0^t f*
        let n = vals.len();
        let edges: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let f = StepFunction::new(edges, vals).unwrap();
        let r = f.rearrange();
        prop_assert!(r.is_nonincreasing());
        prop_assert!(f.integral_to(t) <= r.integral_to(t) + 1e-12);
        prop_assert!((f.integral_to(1.0) - r.integral_to(1.0)).abs() < 1e-12);
    }

    #[test]
    fn k_profile_invariants(f in step_fn()) {
        let grid = Domain::Unit.grid(256).unwrap();
        let k = peetre_k(&f, &grid).unwrap();
        prop_assert!(k.check_invariants(1e-9).is_ok());
    }

    #[test]
    fn reversing_twice_is_identity(a in 1e-4f64..1e4, b in 0.1f64..10.0) {
        let grid = Domain::Full.grid(257).unwrap();
        let k = KProfile::from_fn(grid, |t| b * t.min(a)).unwrap();
        let back = reverse_couple(&reverse_couple(&k).unwrap()).unwrap();
        for (x, y) in k.values.iter().zip(&back.values) {
            prop_assert!((x - y).abs() <= 1e-12 * x.max(1e-300));
        }
    }

    #[test]
    fn spread_ignores_member_scaling(
        pairs in prop::collection::vec((1e-3f64..1e3, 1e-3f64..1e3, 1e-6f64..1e6), 2..20)
    ) {
        let idx = |i: usize| format!("m{i}");
        let l: Vec<(String, f64)> = pairs.iter().enumerate().map(|(i, p)| (idx(i), p.0)).collect();
        let r: Vec<(String, f64)> = pairs.iter().enumerate().map(|(i, p)| (idx(i), p.1)).collect();
        let ls: Vec<(String, f64)> = pairs.iter().enumerate().map(|(i, p)| (idx(i), p.0 * p.2)).collect();
        let rs: Vec<(String, f64)> = pairs.iter().enumerate().map(|(i, p)| (idx(i), p.1 * p.2)).collect();
        let a = check_equivalence("a", &l, &r, 10.0).unwrap();
        let b = check_equivalence("b", &ls, &rs, 10.0).unwrap();
        prop_assert!((a.spread / b.spread - 1.0).abs() < 1e-12);
        prop_assert_eq!(a.verdict, b.verdict);
    }
}
