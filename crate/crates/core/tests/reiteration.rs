use kinterp::family::MemberDef;
use kinterp::reiteration::*;
use kinterp::spaces::{ExtremeKind, SpaceSpec};
use kinterp::{Domain, Scalar};

fn s(n: i64, d: i64) -> Scalar {
    Scalar::ratio(n, d)
}

#[test]
fn interior_theta_tilde_is_exact() {
    for kind in [ExtremeKind::RR, ExtremeKind::LL, ExtremeKind::RL, ExtremeKind::LR] {
        let c = theorem_instance(kind, Branch::A).unwrap();
        // θ0 = 1/4, θ1 = 3/4, θ = 1/2
        assert_eq!(c.theta_tilde(), s(1, 2));
        let p = predict(&c).unwrap();
        assert_eq!(p.theta_tilde, Some(s(1, 2)));
        assert!(matches!(p.space, PredictedSpace::Single(SpaceSpec::Classic { .. })));
    }
}

#[test]
fn endpoint_targets_follow_the_branch_table() {
    let shape = |kind, branch| predict(&theorem_instance(kind, branch).unwrap()).unwrap().space;
    let single = |p: &PredictedSpace, k: ExtremeKind| matches!(p, PredictedSpace::Single(SpaceSpec::Extreme { kind, .. }) if *kind == k);
    assert!(single(&shape(ExtremeKind::RR, Branch::B), ExtremeKind::RL));
    assert!(single(&shape(ExtremeKind::RL, Branch::B), ExtremeKind::RL));
    assert!(single(&shape(ExtremeKind::LL, Branch::C), ExtremeKind::LR));
    assert!(single(&shape(ExtremeKind::RL, Branch::C), ExtremeKind::LR));
    for (kind, branch) in [
        (ExtremeKind::LL, Branch::B),
        (ExtremeKind::LR, Branch::B),
        (ExtremeKind::RR, Branch::C),
        (ExtremeKind::LR, Branch::C),
    ] {
        assert!(matches!(shape(kind, branch), PredictedSpace::Intersection(..)), "{kind:?} {branch:?}");
    }
}

#[test]
fn intersection_with_itself_is_the_space() {
    let c = theorem_instance(ExtremeKind::RR, Branch::A).unwrap();
    let p = predict(&c).unwrap();
    let PredictedSpace::Single(sp) = p.space else { panic!() };
    let g = Domain::Unit.grid(256).unwrap();
    let both = PredictedSpace::Intersection(sp.clone(), sp.clone());
    for d in [MemberDef::Pow(2.0), MemberDef::Chi(1e-3), MemberDef::Steps(3, 6)] {
        let f = d.build(&g, Domain::Unit).unwrap().fstar;
        let one = rhs_norm(&PredictedSpace::Single(sp.clone()), &f, &g).unwrap();
        assert_eq!(one, rhs_norm(&both, &f, &g).unwrap());
    }
}

#[test]
fn presets_agree_with_closed_forms() {
    for name in PRESETS {
        for theta in preset_thetas() {
            let c = preset_case(name, theta).unwrap();
            let want = closed_form(name, s(2, 1), s(4, 1), s(1, 1), s(1, 1), theta).unwrap();
            assert_eq!(predicted_form(&c, &predict(&c).unwrap()), Some(want), "{name} θ={theta}");
        }
    }
}

#[test]
fn grand_pair_interior_exponents() {
    // 1/p = (1-θ)/2 + θ/4 and the weight exponent -(1-θ)/2 - θ/4 at θ = 1/2
    let f = closed_form("cor55", s(2, 1), s(4, 1), s(1, 1), s(1, 1), s(1, 2)).unwrap();
    assert_eq!(f.inv_p, Some(s(3, 8)));
    assert_eq!(f.factor_log, Some(s(-3, 8)));
    assert_eq!((f.gamma, f.rho_log), (s(1, 4), s(-1, 4)));
}

#[test]
fn theorem_ids_parse_back() {
    let ids = theorem_ids();
    assert_eq!(ids.len(), 12);
    for id in &ids {
        let (k, b) = parse_theorem(id).unwrap();
        assert_eq!(theorem_instance(k, b).unwrap().theorem(), *id);
    }
    assert!(parse_theorem("thmXX.a").is_err());
    assert!(parse_theorem("thmRR.d").is_err());
}

#[test]
fn reports_are_deterministic() {
    let a = run_theorem("thmLR.b", 256, 11, 50.0).unwrap();
    let b = run_theorem("thmLR.b", 256, 11, 50.0).unwrap();
    assert_eq!(a.to_json(), b.to_json());
}
