use kinterp::family::MemberDef;
use kinterp::holmstedt::*;
use kinterp::sampling::{peetre_k, reverse_couple};
use kinterp::spaces::{space_norm, ExtremeKind, NormInput};
use kinterp::{Domain, KProfile, Lq, Scalar, SvExpr};

fn instance(label: &str) -> CoupleCase {
    instances().into_iter().find(|(l, _)| l == label).unwrap().1
}

/// Couple over the reversed base couple: L ↔ R, θ -> 1-θ, weights barred, endpoints swapped.
fn mirrored(c: &CoupleCase) -> CoupleCase {
    let p = &c.params;
    let one = Scalar::one();
    let q = CoupleParams {
        theta0: one - p.theta1,
        theta1: one - p.theta0,
        a0: p.a1.bar(),
        a1: p.a0.bar(),
        b0: p.b1.bar(),
        b1: p.b0.bar(),
        e0: p.e1,
        e1: p.e0,
        f0: p.f1,
        f1: p.f0,
    };
    let kind = match c.kind {
        ExtremeKind::LL => ExtremeKind::RR,
        ExtremeKind::RR => ExtremeKind::LL,
        k => k,
    };
    CoupleCase::new(kind, q, c.domain).unwrap()
}

#[test]
fn rhs_symmetric_under_reversal() {
    let g = Domain::Full.grid(1025).unwrap();
    let k = peetre_k(&MemberDef::TwoPow(0.8, 0.3).build(&g, Domain::Full).unwrap().fstar, &g).unwrap();
    let kr = reverse_couple(&k).unwrap();
    let mut ll = instance("holmstedt.LL.trivial").params;
    ll.f0 = Lq::int(3);
    ll.b1 = SvExpr::l(Scalar::int(-1));
    ll.e1 = Lq::int(2);
    let cases = [
        CoupleCase::new(ExtremeKind::LL, ll, Domain::Full).unwrap(),
        instance("holmstedt.RL.trivial"),
        instance("holmstedt.LR.trivial"),
    ];
    for c in cases {
        let m = mirrored(&c);
        let (r, rm) = (make_rho(&c).unwrap(), make_rho(&m).unwrap());
        let a = holmstedt_rhs_profile(&c, &r, &k).unwrap();
        let b = holmstedt_rhs_profile(&m, &rm, &kr).unwrap();
        let n = g.len();
        for i in n / 8..7 * n / 8 {
            let want = r.eval(g.t(i)).unwrap() * b[n - 1 - i];
            assert!((a[i] / want - 1.0).abs() < 1e-6, "{}: node {i}", c.kind.name());
        }
    }
}

#[test]
fn trivial_rho_is_a_power() {
    let c = instance("holmstedt.RR.trivial");
    let r = make_rho(&c).unwrap();
    for u in [1e-6, 1e-3, 0.5, 10.0, 1e5] {
        let v = r.eval(u).unwrap();
        assert!((v / u.sqrt() - 1.0).abs() < 1e-9, "u={u}");
    }
}

#[test]
fn rho_increases_for_every_instance() {
    for (l, c) in instances() {
        // ρ is u^{θ1-θ0} times an SV function, so only equivalent to an increasing one
        // (u^{1/2}ℓ(u) turns down above 1/e): a later value never drops below half an earlier one
        let g = c.domain.grid(512).unwrap();
        let v = make_rho(&c).unwrap().samples(&g).unwrap();
        let mut top: f64 = 0.0;
        for x in &v[u_sweep(&g, 1.0)] {
            top = top.max(*x);
            assert!(*x >= 0.5 * top, "{l}");
        }
        if l.ends_with("trivial") {
            assert!(v.windows(2).all(|p| p[1] > p[0]), "{l}");
        }
    }
}

#[test]
fn rhs_zero_homogeneous_and_monotone() {
    for (l, c) in instances() {
        let g = c.domain.grid(256).unwrap();
        let r = make_rho(&c).unwrap();
        let zero = KProfile::new(g, vec![0.0; g.len()]).unwrap();
        assert!(holmstedt_rhs_profile(&c, &r, &zero).unwrap().iter().all(|v| *v == 0.0), "{l}");
        let f = MemberDef::Chi(1e-3).build(&g, c.domain).unwrap();
        let k = peetre_k(&f.fstar, &g).unwrap();
        let big = peetre_k(&f.fstar.scale(2.0).unwrap(), &g).unwrap();
        let a = holmstedt_rhs_profile(&c, &r, &k).unwrap();
        let b = holmstedt_rhs_profile(&c, &r, &big).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((y - 2.0 * x).abs() <= 1e-10 * y.max(1e-300), "{l}");
        }
        // χ(0, 1e-3) ≤ χ(0, 1e-1) pointwise, so K and the rhs are ordered
        let wide = peetre_k(&MemberDef::Chi(1e-1).build(&g, c.domain).unwrap().fstar, &g).unwrap();
        let w = holmstedt_rhs_profile(&c, &r, &wide).unwrap();
        assert!(a.iter().zip(&w).all(|(x, y)| *x <= y * (1.0 + 1e-12)), "{l}");
    }
}

#[test]
fn upper_bound_below_endpoint_norms() {
    for (l, c) in instances() {
        let g = c.domain.grid(512).unwrap();
        let r = make_rho(&c).unwrap();
        let f = MemberDef::Chi(1e-2).build(&g, c.domain).unwrap();
        let up = couple_k_upper_profile(&c, &r, &f.fstar, &g).unwrap();
        let n0 = space_norm(&c.space(0), NormInput::FStar(&f.fstar, &g)).unwrap();
        let n1 = space_norm(&c.space(1), NormInput::FStar(&f.fstar, &g)).unwrap();
        for i in u_sweep(&g, 1.0) {
            let cap = n0.min(r.eval(g.t(i)).unwrap() * n1);
            assert!(up[i] <= cap * (1.0 + 1e-9), "{l}: node {i}: {} > {cap}", up[i]);
        }
    }
}

#[test]
fn certification_is_deterministic() {
    let c = instance("holmstedt.RL.log");
    let a = run_case("x", &c, 256, 7, 50.0).unwrap();
    let b = run_case("x", &c, 256, 7, 50.0).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(a.seed, Some(7));
}
