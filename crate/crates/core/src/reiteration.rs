//! Reiteration targets for couples of R/L spaces and the checks that compare the reiterated
//! norm (computed through the couple's K-functional) with the predicted space.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::family::{FamilyConfig, MemberDef};
use crate::holmstedt::{holmstedt_rhs_at, make_rho, u_sweep, CoupleCase, CoupleKind, CoupleParams, RhoFunction, SweepConfig};
use crate::rinorm::{norm_nodes, sv_norm};
use crate::sampling::{peetre_k, Domain, GeometricGrid, StepFunction};
use crate::scalar::{Lq, Scalar};
use crate::spaces::{space_norm, ExtremeKind, NormInput, SpaceSpec};
use crate::svcalc::{End, SvExpr};
use crate::verify::{check_equivalence, EquivalenceReport};

#[derive(Debug, Clone, PartialEq)]
pub struct ReiterationCase {
    pub couple: CoupleCase,
    pub theta: Scalar,
    pub b: SvExpr,
    pub e: Lq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// 0 < θ < 1
    A,
    /// θ = 0
    B,
    /// θ = 1
    C,
}

impl Branch {
    pub fn letter(self) -> char {
        match self {
            Branch::A => 'a',
            Branch::B => 'b',
            Branch::C => 'c',
        }
    }
}

impl ReiterationCase {
    pub fn new(couple: CoupleCase, theta: Scalar, b: SvExpr, e: Lq) -> Result<Self> {
        if theta < Scalar::zero() || theta > Scalar::one() {
            return Err(Error::Param(format!("theta must lie in [0, 1], got {theta}")));
        }
        let case = ReiterationCase { couple, theta, b, e };
        let need = match case.branch() {
            Branch::B if case.couple.domain == Domain::Full => Some((0.0, f64::INFINITY, "(1,inf)")),
            Branch::C => Some((f64::NEG_INFINITY, 0.0, "(0,1)")),
            _ => None,
        };
        if let Some((lo, hi, what)) = need {
            match sv_norm(&case.b, case.e, lo, hi) {
                Ok(v) if v.is_finite() => {}
                Ok(_) | Err(Error::Divergent(_)) => {
                    return Err(Error::Divergent(format!("‖b‖ over {what} in {} is infinite for b={}", case.e, case.b)))
                }
                Err(err) => return Err(err),
            }
        }
        Ok(case)
    }

    pub fn branch(&self) -> Branch {
        if self.theta.is_zero() {
            Branch::B
        } else if self.theta == Scalar::one() {
            Branch::C
        } else {
            Branch::A
        }
    }

    /// `thmRR.a` style label.
    pub fn theorem(&self) -> String {
        format!("thm{}.{}", self.couple.kind.name(), self.branch().letter())
    }

    /// θ̃ = (1-θ)θ0 + θθ1, exact for rational inputs.
    pub fn theta_tilde(&self) -> Scalar {
        let p = &self.couple.params;
        (Scalar::one() - self.theta) * p.theta0 + self.theta * p.theta1
    }

    /// The θ at which family members must be integrable near 0.
    pub fn theta_crit(&self) -> Scalar {
        match self.branch() {
            Branch::A => self.theta_tilde(),
            Branch::B => self.couple.params.theta0,
            Branch::C => self.couple.params.theta1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PredictedSpace {
    Single(SpaceSpec),
    Intersection(SpaceSpec, SpaceSpec),
}

impl PredictedSpace {
    pub fn members(&self) -> Vec<&SpaceSpec> {
        match self {
            PredictedSpace::Single(s) => vec![s],
            PredictedSpace::Intersection(a, b) => vec![a, b],
        }
    }
}

impl std::fmt::Display for PredictedSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PredictedSpace::Single(s) => write!(f, "{s}"),
            PredictedSpace::Intersection(a, b) => write!(f, "{a} ∩ {b}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Prediction {
    pub space: PredictedSpace,
    pub rho: RhoFunction,
    /// θ̃ for the interior branch.
    pub theta_tilde: Option<Scalar>,
    /// Weight factor in front of b∘ρ (B_θ, B_0 or B_1 without b∘ρ), built from envelopes.
    pub factor: Option<SvExpr>,
    /// The same factor with every envelope replaced by its ℓ-power equivalent, when available.
    pub factor_symbolic: Option<SvExpr>,
}

impl Prediction {
    /// Exponent of ℓ in the symbolic factor near 0.
    pub fn factor_log_exponent(&self) -> Option<Scalar> {
        Some(self.factor_symbolic.as_ref()?.log_exponent(End::Zero))
    }
}

fn weight(a: &SvExpr, env: &SvExpr) -> SvExpr {
    a.mul(env)
}

pub fn predict(case: &ReiterationCase) -> Result<Prediction> {
    let c = &case.couple;
    let p = &c.params;
    let rho = make_rho(c)?;
    let b_rho = rho.compose(&case.b)?;
    let (s0, s1) = (c.envelope_symbolic(0), c.envelope_symbolic(1));
    let y0_r = c.env_kind(0) == crate::rinorm::EnvKind::Lower;
    let y1_r = c.env_kind(1) == crate::rinorm::EnvKind::Lower;
    let theta = case.theta;
    let pred = match case.branch() {
        Branch::A => {
            let one = Scalar::one();
            let factor = weight(&p.a0, &rho.env0).pow(one - theta).mul(&weight(&p.a1, &rho.env1).pow(theta));
            let factor_symbolic = match (&s0, &s1) {
                (Some(s0), Some(s1)) => {
                    Some(weight(&p.a0, s0).pow(one - theta).mul(&weight(&p.a1, s1).pow(theta)).simplify())
                }
                _ => None,
            };
            let tt = case.theta_tilde();
            Prediction {
                space: PredictedSpace::Single(SpaceSpec::Classic { theta: tt, b: factor.mul(&b_rho), e: case.e }),
                rho,
                theta_tilde: Some(tt),
                factor: Some(factor),
                factor_symbolic,
            }
        }
        Branch::B => {
            let ext = |kind| SpaceSpec::Extreme {
                kind,
                theta: p.theta0,
                c: b_rho.clone(),
                e: case.e,
                b: p.b0.clone(),
                f: p.e0,
                a: p.a0.clone(),
                g: p.f0,
            };
            if y0_r {
                Prediction { space: PredictedSpace::Single(ext(ExtremeKind::RL)), rho, theta_tilde: None, factor: None, factor_symbolic: None }
            } else {
                let factor = rho.env0.clone();
                let l = SpaceSpec::L { theta: p.theta0, b: factor.mul(&b_rho), e: case.e, a: p.a0.clone(), f: p.f0 };
                Prediction {
                    space: PredictedSpace::Intersection(l, ext(ExtremeKind::LL)),
                    rho,
                    theta_tilde: None,
                    factor: Some(factor),
                    factor_symbolic: s0.map(|s| s.simplify()),
                }
            }
        }
        Branch::C => {
            let ext = |kind| SpaceSpec::Extreme {
                kind,
                theta: p.theta1,
                c: b_rho.clone(),
                e: case.e,
                b: p.b1.clone(),
                f: p.e1,
                a: p.a1.clone(),
                g: p.f1,
            };
            if y1_r {
                let factor = rho.env1.clone();
                let r = SpaceSpec::R { theta: p.theta1, b: factor.mul(&b_rho), e: case.e, a: p.a1.clone(), f: p.f1 };
                Prediction {
                    space: PredictedSpace::Intersection(r, ext(ExtremeKind::RR)),
                    rho,
                    theta_tilde: None,
                    factor: Some(factor),
                    factor_symbolic: s1.map(|s| s.simplify()),
                }
            } else {
                Prediction { space: PredictedSpace::Single(ext(ExtremeKind::LR)), rho, theta_tilde: None, factor: None, factor_symbolic: None }
            }
        }
    };
    Ok(pred)
}

/// ‖ρ(u)^{-θ} b(ρ(u)) RHS(u)‖_E over the u-sweep, RHS being the explicit Holmstedt sum.
pub fn lhs_norm(
    case: &ReiterationCase,
    rho: &RhoFunction,
    fstar: &StepFunction,
    grid: &GeometricGrid,
    sweep: SweepConfig,
) -> Result<f64> {
    let k = peetre_k(fstar, grid)?;
    let nodes: Vec<usize> = u_sweep(grid, sweep.exclude_decades).collect();
    let rhs = holmstedt_rhs_at(&case.couple, rho, &k, &nodes)?;
    let th = case.theta.to_f64();
    let v = nodes
        .iter()
        .zip(&rhs)
        .map(|(&i, r)| {
            let lr = rho.eval_log(grid.x(i))?;
            Ok(if *r == 0.0 { 0.0 } else { (-th * lr + case.b.eval_log(lr)?).exp() * r })
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(norm_nodes(&v, case.e, grid.h()))
}

/// Norm of the predicted space; the intersection norm is the max of the two.
pub fn rhs_norm(pred: &PredictedSpace, fstar: &StepFunction, grid: &GeometricGrid) -> Result<f64> {
    let one = |s: &SpaceSpec| -> Result<f64> {
        if s.is_k_based() {
            space_norm(s, NormInput::K(&peetre_k(fstar, grid)?))
        } else {
            space_norm(s, NormInput::FStar(fstar, grid))
        }
    };
    match pred {
        PredictedSpace::Single(s) => one(s),
        PredictedSpace::Intersection(a, b) => Ok(one(a)?.max(one(b)?)),
    }
}

pub fn family_config(case: &ReiterationCase, seed: u64) -> FamilyConfig {
    let p = &case.couple.params;
    let (t0, t1) = (p.theta0.to_f64(), p.theta1.to_f64());
    let crit = case.theta_crit().to_f64();
    FamilyConfig { p0: 1.0 / (1.0 - t0), p1: 1.0 / (1.0 - t1), theta_crit: crit, theta_top: crit, seed }
}

/// lhs_norm / rhs_norm for every member at one resolution.
pub fn reiteration_report(
    label: &str,
    case: &ReiterationCase,
    pred: &Prediction,
    defs: &[MemberDef],
    grid: &GeometricGrid,
    sweep: SweepConfig,
    threshold: f64,
) -> Result<EquivalenceReport> {
    let rows: Vec<(String, f64, f64)> = defs
        .par_iter()
        .map(|d| {
            let m = d.build(grid, case.couple.domain)?;
            let l = lhs_norm(case, &pred.rho, &m.fstar, grid, sweep)?;
            let r = rhs_norm(&pred.space, &m.fstar, grid)?;
            Ok((m.id, l, r))
        })
        .collect::<Result<_>>()?;
    let (l, r): (Vec<_>, Vec<_>) = rows.into_iter().map(|(i, a, b)| ((i.clone(), a), (i, b))).unzip();
    check_equivalence(label, &l, &r, threshold)
}

/// Reiteration check at n and 2n.
pub fn check_reiteration(
    label: &str,
    case: &ReiterationCase,
    defs: &[MemberDef],
    n: usize,
    sweep: SweepConfig,
    threshold: f64,
) -> Result<EquivalenceReport> {
    if defs.is_empty() {
        return Err(Error::Param("reiteration check needs a nonempty family".into()));
    }
    let pred = predict(case)?;
    let g = case.couple.domain.grid(n)?;
    let coarse = reiteration_report(label, case, &pred, defs, &g, sweep, threshold)?;
    let fine = reiteration_report(label, case, &pred, defs, &g.refine(), sweep, threshold)?;
    Ok(coarse.with_refinement(&fine).note(format!("target: {}", pred.space)))
}

/// One instance per theorem branch: the log-weight couple on (0,1) with b = ℓ^-2, E = L1.
pub fn theorem_instance(kind: CoupleKind, branch: Branch) -> Result<ReiterationCase> {
    let couple = CoupleCase::new(kind, crate::holmstedt::log_weight_params(Scalar::ratio(3, 4)), Domain::Unit)?;
    let theta = match branch {
        Branch::A => Scalar::ratio(1, 2),
        Branch::B => Scalar::zero(),
        Branch::C => Scalar::one(),
    };
    ReiterationCase::new(couple, theta, SvExpr::l(Scalar::int(-2)), Lq::int(1))
}

pub fn theorem_ids() -> Vec<String> {
    let mut v = Vec::new();
    for k in ["RR", "LL", "RL", "LR"] {
        for b in ['a', 'b', 'c'] {
            v.push(format!("thm{k}.{b}"));
        }
    }
    v
}

pub fn parse_theorem(id: &str) -> Result<(CoupleKind, Branch)> {
    let bad = || Error::Unknown(format!("theorem `{id}` (expected thmRR.a ... thmLR.c)"));
    let rest = id.strip_prefix("thm").ok_or_else(bad)?;
    let (k, b) = rest.split_once('.').ok_or_else(bad)?;
    let kind = ExtremeKind::parse(k).ok_or_else(bad)?;
    let branch = match b {
        "a" => Branch::A,
        "b" => Branch::B,
        "c" => Branch::C,
        _ => return Err(bad()),
    };
    Ok((kind, branch))
}

/// Endpoint spaces of grand and small Lebesgue type as R/L classes over (L1, L∞) on (0,1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LebesgueKind {
    Grand,
    Small,
}

/// (θ, b, E, a, F) of L^{p),α} (R class) or L^{(p,α} (L class).
pub fn lebesgue_endpoint(kind: LebesgueKind, p: Scalar, alpha: Scalar) -> Result<(Scalar, SvExpr, Lq, SvExpr, Lq)> {
    let one = Scalar::one();
    if !(p > one) {
        return Err(Error::Param(format!("p > 1 required, got {p}")));
    }
    let theta = one - p.recip()?;
    let fp = Lq::new(p)?;
    Ok(match kind {
        LebesgueKind::Grand => (theta, SvExpr::l(-(alpha / p)), Lq::Inf, SvExpr::one(), fp),
        LebesgueKind::Small => {
            let pp = theta; // 1/p'
            (theta, SvExpr::l(alpha * pp - one), Lq::int(1), SvExpr::one(), fp)
        }
    })
}

/// Grand/small Lebesgue pairs: cor55 (grand, grand), cor57 (small, small), cor1 (grand, small),
/// cor2 (small, grand).
pub fn preset_kinds(name: &str) -> Result<(LebesgueKind, LebesgueKind)> {
    use LebesgueKind::*;
    Ok(match name {
        "cor55" => (Grand, Grand),
        "cor57" => (Small, Small),
        "cor1" => (Grand, Small),
        "cor2" => (Small, Grand),
        _ => return Err(Error::Unknown(format!("preset `{name}` (expected cor55, cor57, cor1, cor2)"))),
    })
}

pub const PRESETS: [&str; 4] = ["cor55", "cor57", "cor1", "cor2"];

pub fn lebesgue_couple(name: &str, p0: Scalar, p1: Scalar, alpha: Scalar, beta: Scalar) -> Result<CoupleCase> {
    let (k0, k1) = preset_kinds(name)?;
    let (theta0, b0, e0, a0, f0) = lebesgue_endpoint(k0, p0, alpha)?;
    let (theta1, b1, e1, a1, f1) = lebesgue_endpoint(k1, p1, beta)?;
    let kind = match (k0, k1) {
        (LebesgueKind::Grand, LebesgueKind::Grand) => ExtremeKind::RR,
        (LebesgueKind::Small, LebesgueKind::Small) => ExtremeKind::LL,
        (LebesgueKind::Grand, LebesgueKind::Small) => ExtremeKind::RL,
        (LebesgueKind::Small, LebesgueKind::Grand) => ExtremeKind::LR,
    };
    CoupleCase::new(kind, CoupleParams { theta0, theta1, a0, a1, b0, b1, e0, e1, f0, f1 }, Domain::Unit)
}

/// Default preset instance: p0 = 2, p1 = 4, α = β = 1, outer b = ℓ^-2 in L1.
pub fn preset_case(name: &str, theta: Scalar) -> Result<ReiterationCase> {
    let couple = lebesgue_couple(name, Scalar::int(2), Scalar::int(4), Scalar::one(), Scalar::one())?;
    ReiterationCase::new(couple, theta, SvExpr::l(Scalar::int(-2)), Lq::int(1))
}

/// Closed-form exponents for a grand/small pair: ρ(u) = u^γ ℓ^λ(u), and the ℓ-exponent of the
/// weight in front of b∘ρ (B_θ, B_0 or B_1; None when the target has no such factor).
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedForm {
    pub gamma: Scalar,
    pub rho_log: Scalar,
    pub inv_p: Option<Scalar>,
    pub factor_log: Option<Scalar>,
}

pub fn closed_form(name: &str, p0: Scalar, p1: Scalar, alpha: Scalar, beta: Scalar, theta: Scalar) -> Result<ClosedForm> {
    let one = Scalar::one();
    let (i0, i1) = (p0.recip()?, p1.recip()?);
    let (d0, d1) = (one - i0, one - i1); // 1/p0', 1/p1'
    let (k0, k1) = preset_kinds(name)?;
    // ℓ-exponent of a_j ‖b_j‖ for each endpoint kind
    let w = |k: LebesgueKind, a: Scalar, i: Scalar, d: Scalar| match k {
        LebesgueKind::Grand => -(a * i),
        LebesgueKind::Small => a * d,
    };
    let w0 = w(k0, alpha, i0, d0);
    let w1 = w(k1, beta, i1, d1);
    let gamma = i0 - i1;
    let rho_log = w0 - w1;
    let (inv_p, factor_log) = if theta.is_zero() {
        (None, if k0 == LebesgueKind::Small { Some(w0) } else { None })
    } else if theta == one {
        (None, if k1 == LebesgueKind::Grand { Some(w1) } else { None })
    } else {
        (Some((one - theta) * i0 + theta * i1), Some((one - theta) * w0 + theta * w1))
    };
    Ok(ClosedForm { gamma, rho_log, inv_p, factor_log })
}

/// What predict() gives for the same quantities.
pub fn predicted_form(case: &ReiterationCase, pred: &Prediction) -> Option<ClosedForm> {
    Some(ClosedForm {
        gamma: pred.rho.gamma,
        rho_log: pred.rho.symbolic_log_exponent()?,
        inv_p: pred.theta_tilde.map(|t| Scalar::one() - t),
        factor_log: match (&pred.factor, pred.factor_log_exponent()) {
            (None, _) => None,
            (Some(_), e) => Some(e?),
        },
    })
    .filter(|_| case.couple.domain == Domain::Unit)
}

/// Reiteration check of one case with its default family.
pub fn run_case(label: &str, case: &ReiterationCase, n: usize, seed: u64, threshold: f64) -> Result<EquivalenceReport> {
    let defs = crate::family::default_family_defs(case.couple.domain, &family_config(case, seed));
    Ok(check_reiteration(label, case, &defs, n, SweepConfig::default(), threshold)?.with_seed(seed))
}

pub fn run_theorem(id: &str, n: usize, seed: u64, threshold: f64) -> Result<EquivalenceReport> {
    let (kind, branch) = parse_theorem(id)?;
    run_case(id, &theorem_instance(kind, branch)?, n, seed, threshold)
}

pub fn preset_thetas() -> [Scalar; 3] {
    [Scalar::zero(), Scalar::ratio(1, 2), Scalar::one()]
}

/// Numeric check of a preset plus agreement of predict() with the closed-form exponents;
/// a symbolic mismatch fails the report.
pub fn run_corollary(name: &str, theta: Scalar, n: usize, seed: u64, threshold: f64) -> Result<EquivalenceReport> {
    let case = preset_case(name, theta)?;
    let label = format!("{name}.theta={theta}");
    let mut rep = run_case(&label, &case, n, seed, threshold)?;
    let two = Scalar::int(2);
    let want = closed_form(name, two, Scalar::int(4), Scalar::one(), Scalar::one(), theta)?;
    let got = predicted_form(&case, &predict(&case)?);
    if got.as_ref() == Some(&want) {
        rep = rep.note(format!(
            "closed form: gamma={}, rho log exponent={}, 1/p={}, factor log exponent={}",
            want.gamma,
            want.rho_log,
            want.inv_p.map_or("-".into(), |x| x.to_string()),
            want.factor_log.map_or("-".into(), |x| x.to_string())
        ));
    } else {
        rep = rep.note(format!("closed form mismatch: predicted {got:?}, expected {want:?}"));
        rep.verdict = crate::verify::Verdict::Fail;
    }
    Ok(rep)
}

/// Every preset at θ in {0, 1/2, 1}.
pub fn run_corollaries(n: usize, seed: u64, threshold: f64) -> Result<Vec<EquivalenceReport>> {
    let mut out = Vec::new();
    for name in PRESETS {
        for theta in preset_thetas() {
            out.push(run_corollary(name, theta, n, seed, threshold)?);
        }
    }
    Ok(out)
}
