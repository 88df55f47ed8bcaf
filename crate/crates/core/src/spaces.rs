//! Norm evaluators for every space family, nontriviality predicates and the reversal symmetry.

use std::fmt;

use crate::error::{Error, Result};
use crate::rinorm::{
    build_envelope, lower_profile, norm_nodes, sv_norm, sv_samples, upper_profile, weighted_values,
    window_lower, window_upper, EnvKind,
};
use crate::sampling::{gauss_legendre8, peetre_k, Domain, GeometricGrid, KProfile, StepFunction};
use crate::scalar::{Lq, Scalar};
use crate::svcalc::SvExpr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremeKind {
    RR,
    LL,
    RL,
    LR,
}

impl ExtremeKind {
    pub fn name(self) -> &'static str {
        match self {
            ExtremeKind::RR => "RR",
            ExtremeKind::LL => "LL",
            ExtremeKind::RL => "RL",
            ExtremeKind::LR => "LR",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "RR" => Some(ExtremeKind::RR),
            "LL" => Some(ExtremeKind::LL),
            "RL" => Some(ExtremeKind::RL),
            "LR" => Some(ExtremeKind::LR),
            _ => None,
        }
    }

    /// Kind of the reversed couple: LL <-> RR, LR <-> RL.
    pub fn reversed(self) -> Self {
        match self {
            ExtremeKind::RR => ExtremeKind::LL,
            ExtremeKind::LL => ExtremeKind::RR,
            ExtremeKind::RL => ExtremeKind::LR,
            ExtremeKind::LR => ExtremeKind::RL,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpaceSpec {
    Classic { theta: Scalar, b: SvExpr, e: Lq },
    R { theta: Scalar, b: SvExpr, e: Lq, a: SvExpr, f: Lq },
    L { theta: Scalar, b: SvExpr, e: Lq, a: SvExpr, f: Lq },
    Extreme { kind: ExtremeKind, theta: Scalar, c: SvExpr, e: Lq, b: SvExpr, f: Lq, a: SvExpr, g: Lq },
    Grand { p: Scalar, alpha: Scalar },
    Small { p: Scalar, alpha: Scalar },
    /// `p` in (1, inf]
    LorentzKaramata { p: Lq, b: SvExpr, e: Lq },
    /// `uw1` is the SV function u·w1(u); `q` finite.
    GammaDouble { p: Scalar, q: Scalar, uw1: SvExpr, w2: SvExpr },
    AType { p: Scalar, alpha: Scalar, e: Lq },
    BType { p: Scalar, alpha: Scalar, e: Lq },
}

/// What a norm is evaluated on.
#[derive(Debug, Clone, Copy)]
pub enum NormInput<'a> {
    K(&'a KProfile),
    FStar(&'a StepFunction, &'a GeometricGrid),
}

fn in_unit(theta: Scalar) -> bool {
    theta >= Scalar::zero() && theta <= Scalar::one()
}

fn exp_p(p: Scalar) -> Result<()> {
    if p > Scalar::one() {
        Ok(())
    } else {
        Err(Error::Param(format!("p must lie in (1, inf), got {p}")))
    }
}

impl SpaceSpec {
    pub fn name(&self) -> &'static str {
        match self {
            SpaceSpec::Classic { .. } => "classic",
            SpaceSpec::R { .. } => "R",
            SpaceSpec::L { .. } => "L",
            SpaceSpec::Extreme { kind, .. } => kind.name(),
            SpaceSpec::Grand { .. } => "grand",
            SpaceSpec::Small { .. } => "small",
            SpaceSpec::LorentzKaramata { .. } => "lk",
            SpaceSpec::GammaDouble { .. } => "gamma",
            SpaceSpec::AType { .. } => "A",
            SpaceSpec::BType { .. } => "B",
        }
    }

    /// Parameter ranges.
    pub fn validate(&self) -> Result<()> {
        match self {
            SpaceSpec::Classic { theta, .. }
            | SpaceSpec::R { theta, .. }
            | SpaceSpec::L { theta, .. }
            | SpaceSpec::Extreme { theta, .. } => {
                if !in_unit(*theta) {
                    return Err(Error::Param(format!("theta must lie in [0, 1], got {theta}")));
                }
            }
            SpaceSpec::Grand { p, alpha } | SpaceSpec::Small { p, alpha } => {
                exp_p(*p)?;
                if !(alpha.signum() > 0) {
                    return Err(Error::Param(format!("alpha > 0 required, got {alpha}")));
                }
            }
            SpaceSpec::LorentzKaramata { p, .. } => {
                if let Lq::Finite(p) = p {
                    exp_p(*p)?;
                }
            }
            SpaceSpec::GammaDouble { p, q, .. } => {
                if *p < Scalar::one() {
                    return Err(Error::Param(format!("p >= 1 required, got {p}")));
                }
                if *q < Scalar::one() {
                    return Err(Error::Param(format!("q >= 1 required, got {q}")));
                }
            }
            SpaceSpec::AType { p, alpha, e } => {
                exp_p(*p)?;
                if !(*alpha < Scalar::one()) {
                    return Err(Error::Param(format!("alpha < 1 required, got {alpha}")));
                }
                let w = SvExpr::l(*alpha - Scalar::one());
                if sv_norm(&w, *e, f64::NEG_INFINITY, 0.0).is_err() {
                    return Err(Error::Param(format!("l^(alpha-1) must belong to {e} on (0,1)")));
                }
            }
            SpaceSpec::BType { p, alpha, .. } => {
                exp_p(*p)?;
                if !(*alpha < Scalar::one()) {
                    return Err(Error::Param(format!("alpha < 1 required, got {alpha}")));
                }
            }
        }
        Ok(())
    }

    /// Defined through K(t, f) (as opposed to f* or f**).
    pub fn is_k_based(&self) -> bool {
        matches!(
            self,
            SpaceSpec::Classic { .. } | SpaceSpec::R { .. } | SpaceSpec::L { .. } | SpaceSpec::Extreme { .. }
        )
    }

    /// Families that only make sense on (0,1).
    pub fn needs_unit_domain(&self) -> bool {
        matches!(
            self,
            SpaceSpec::Grand { .. }
                | SpaceSpec::Small { .. }
                | SpaceSpec::GammaDouble { .. }
                | SpaceSpec::AType { .. }
                | SpaceSpec::BType { .. }
        )
    }
}

/// `W(u)` of an extreme class before the outer `c`-weighted norm.
pub fn extreme_profile(kind: ExtremeKind, b: &[f64], g: &[f64], f: Lq, gq: Lq, h: f64) -> Vec<f64> {
    match kind {
        ExtremeKind::RR => {
            let inner = upper_profile(g, gq, h);
            let y: Vec<f64> = b.iter().zip(&inner).map(|(x, y)| x * y).collect();
            upper_profile(&y, f, h)
        }
        ExtremeKind::LL => {
            let inner = lower_profile(g, gq, h);
            let y: Vec<f64> = b.iter().zip(&inner).map(|(x, y)| x * y).collect();
            lower_profile(&y, f, h)
        }
        ExtremeKind::RL => window_lower(b, g, gq, f, h),
        ExtremeKind::LR => window_upper(b, g, gq, f, h),
    }
}

fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

/// `‖ b(t) ‖g‖_{F(t, end)} ‖_E` (R) or with `(0, t)` (L), given the integrand `g` at the nodes.
pub fn rl_norm(upper: bool, b: &[f64], g: &[f64], e: Lq, f: Lq, h: f64) -> f64 {
    let inner = if upper { upper_profile(g, f, h) } else { lower_profile(g, f, h) };
    norm_nodes(&mul(b, &inner), e, h)
}

/// Norm of a K-based space evaluated on a sampled K-functional.
pub fn space_norm_k(spec: &SpaceSpec, k: &KProfile) -> Result<f64> {
    let grid = &k.grid;
    let h = grid.h();
    match spec {
        SpaceSpec::Classic { theta, b, e } => {
            let g = weighted_values(&k.values, grid, theta.to_f64(), b)?;
            Ok(norm_nodes(&g, *e, h))
        }
        SpaceSpec::R { theta, b, e, a, f } | SpaceSpec::L { theta, b, e, a, f } => {
            let g = weighted_values(&k.values, grid, theta.to_f64(), a)?;
            let bv = sv_samples(b, grid)?;
            Ok(rl_norm(matches!(spec, SpaceSpec::R { .. }), &bv, &g, *e, *f, h))
        }
        SpaceSpec::Extreme { kind, theta, c, e, b, f, a, g } => {
            let gv = weighted_values(&k.values, grid, theta.to_f64(), a)?;
            let bv = sv_samples(b, grid)?;
            let w = extreme_profile(*kind, &bv, &gv, *f, *g, h);
            let cv = sv_samples(c, grid)?;
            Ok(norm_nodes(&mul(&cv, &w), *e, h))
        }
        _ => Err(Error::Mismatch(format!("{} is defined through f*, not K", spec.name()))),
    }
}

fn require_unit(grid: &GeometricGrid, what: &str) -> Result<()> {
    if grid.log_range().1.abs() > 1e-12 {
        return Err(Error::Param(format!("{what} lives on (0,1); grid must end at t = 1")));
    }
    Ok(())
}

fn pow_weight(grid: &GeometricGrid, e: f64) -> Vec<f64> {
    grid.xs().iter().map(|x| (e * x).exp()).collect()
}

/// Norm of any space on a nonincreasing step function f*.
pub fn space_norm_f(spec: &SpaceSpec, fstar: &StepFunction, grid: &GeometricGrid) -> Result<f64> {
    if !fstar.is_nonincreasing() {
        return Err(Error::Invariant("f* must be nonincreasing".into()));
    }
    if spec.is_k_based() {
        return space_norm_k(spec, &peetre_k(fstar, grid)?);
    }
    if spec.needs_unit_domain() {
        require_unit(grid, spec.name())?;
    }
    let h = grid.h();
    let fv = fstar.node_values(grid).values;
    match spec {
        SpaceSpec::Grand { p, alpha } => {
            let pf = p.to_f64();
            let g = mul(&pow_weight(grid, 1.0 / pf), &fv);
            let b = sv_samples(&SvExpr::l(-(*alpha / *p)), grid)?;
            Ok(rl_norm(true, &b, &g, Lq::Inf, Lq::Finite(*p), h))
        }
        SpaceSpec::Small { p, alpha } => {
            let pf = p.to_f64();
            let p_conj = *p / (*p - Scalar::one());
            let g = mul(&pow_weight(grid, 1.0 / pf), &fv);
            let b = sv_samples(&SvExpr::l(*alpha / p_conj - Scalar::one()), grid)?;
            Ok(rl_norm(false, &b, &g, Lq::int(1), Lq::Finite(*p), h))
        }
        SpaceSpec::LorentzKaramata { p, b, e } => {
            let w = mul(&pow_weight(grid, p.inv().to_f64()), &sv_samples(b, grid)?);
            Ok(norm_nodes(&mul(&w, &fv), *e, h))
        }
        SpaceSpec::GammaDouble { p, q, uw1, w2 } => {
            let inner = gamma_inner(fstar, w2, p.to_f64(), grid)?;
            let r = q.to_f64() / p.to_f64();
            let v1 = sv_samples(uw1, grid)?;
            let y: Vec<f64> = v1.iter().zip(&inner).map(|(v, i)| v * i.powf(r)).collect();
            Ok(norm_nodes(&y, Lq::int(1), h).powf(1.0 / q.to_f64()))
        }
        SpaceSpec::AType { p, alpha, e } => {
            let fss = double_star_nodes(fstar, grid);
            let g = mul(&pow_weight(grid, 1.0 / p.to_f64()), &fss);
            let b = sv_samples(&SvExpr::l(*alpha - Scalar::one()), grid)?;
            Ok(rl_norm(true, &b, &g, *e, Lq::int(1), h))
        }
        SpaceSpec::BType { p, alpha, e } => {
            let fss = double_star_nodes(fstar, grid);
            let w = mul(&pow_weight(grid, 1.0 / p.to_f64()), &sv_samples(&SvExpr::l(*alpha - Scalar::one()), grid)?);
            let sup = lower_profile(&mul(&w, &fss), Lq::Inf, h);
            Ok(norm_nodes(&sup, *e, h))
        }
        _ => unreachable!("K-based specs handled above"),
    }
}

pub fn space_norm(spec: &SpaceSpec, input: NormInput<'_>) -> Result<f64> {
    match input {
        NormInput::K(k) => space_norm_k(spec, k),
        NormInput::FStar(f, g) => space_norm_f(spec, f, g),
    }
}

fn double_star_nodes(fstar: &StepFunction, grid: &GeometricGrid) -> Vec<f64> {
    (0..grid.len()).map(|i| fstar.integral_to(grid.t(i)) / grid.t(i)).collect()
}

/// `∫_0^{t_k} w2(s) f*(s)^p ds` at every node: f* is constant between breakpoints, and the
/// SV weight is integrated by Gauss-Legendre in ln s on each piece.
pub fn gamma_inner(fstar: &StepFunction, w2: &SvExpr, p: f64, grid: &GeometricGrid) -> Result<Vec<f64>> {
    let ts = grid.ts();
    let t_end = ts[ts.len() - 1];
    let mut bps: Vec<f64> = fstar.edges()[1..].iter().copied().filter(|e| *e < t_end).collect();
    bps.extend(ts.iter().copied());
    bps.sort_by(f64::total_cmp);
    bps.dedup();
    let mut first_err = None;
    let mut w_int = |a: f64, b: f64| -> f64 {
        gauss_legendre8(
            |x| match w2.eval_log(x) {
                Ok(l) => (l + x).exp(),
                Err(e) => {
                    first_err.get_or_insert(e);
                    0.0
                }
            },
            a.ln(),
            b.ln(),
        )
    };
    let b0 = bps[0];
    let v0 = fstar.value_at(0.0).powf(p);
    let mut head = 0.0;
    let x0 = b0.ln();
    for j in 0..30 {
        let hi = x0 - 2.0 * j as f64;
        head += w_int((hi - 2.0).exp(), hi.exp());
    }
    let mut acc = v0 * head;
    let mut out = Vec::with_capacity(ts.len());
    let mut node = 0;
    let mut prev = b0;
    if (prev - ts[0]).abs() <= 1e-15 * ts[0] {
        out.push(acc);
        node = 1;
    }
    for &bp in &bps[1..] {
        let f = fstar.value_at(prev).powf(p);
        if f > 0.0 {
            acc += f * w_int(prev, bp);
        }
        prev = bp;
        while node < ts.len() && ts[node] <= bp * (1.0 + 1e-15) {
            out.push(acc);
            node += 1;
        }
    }
    while out.len() < ts.len() {
        out.push(acc);
    }
    if let Some(e) = first_err {
        return Err(e);
    }
    Ok(out)
}

/// Sufficient conditions (c1)/(c2) of the double-weight Gamma space, checked on the grid.
/// Failures are reported as warnings; evaluation proceeds regardless.
pub fn gamma_conditions(spec: &SpaceSpec, grid: &GeometricGrid) -> Result<Vec<String>> {
    let SpaceSpec::GammaDouble { p, q, uw1, w2 } = spec else {
        return Err(Error::Mismatch("gamma_conditions needs a gamma spec".into()));
    };
    let mut warn = Vec::new();
    let mut worst: f64 = 0.0;
    for i in 0..grid.len() {
        let t = grid.t(i);
        if t < 0.5 {
            worst = worst.max(w2.eval(2.0 * t)? / w2.eval(t)?);
        }
    }
    if !worst.is_finite() || worst > 1e6 {
        warn.push(format!("(c1) doubling constant of w2 is {worst:e}"));
    }
    let one = StepFunction::new(vec![0.0, 1.0], vec![1.0])?;
    let inner = gamma_inner(&one, w2, 1.0, grid)?;
    let v1 = sv_samples(uw1, grid)?;
    let r = q.to_f64() / p.to_f64();
    let y: Vec<f64> = v1.iter().zip(&inner).map(|(v, i)| v * i.powf(r)).collect();
    let s = norm_nodes(&y, Lq::int(1), grid.h());
    if !s.is_finite() {
        warn.push("(c2) integral of w2 is not in L^{q/p}(w1)".into());
    }
    Ok(warn)
}

/// Verdict of the nontriviality conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct Nontrivial {
    pub ok: bool,
    pub reason: String,
}

fn finite(label: &str, v: Result<f64>) -> std::result::Result<(), String> {
    match v {
        Ok(x) if x.is_finite() => Ok(()),
        Ok(_) | Err(Error::Divergent(_)) => Err(format!("{label} = inf")),
        Err(e) => Err(format!("{label}: {e}")),
    }
}

const NEG: f64 = f64::NEG_INFINITY;
const POS: f64 = f64::INFINITY;

fn nested(b: &SvExpr, e: Lq, a: &SvExpr, f: Lq, inner: EnvKind, bar_inner: bool, lo: f64, hi: f64) -> Result<f64> {
    let a_in = if bar_inner { a.bar() } else { a.clone() };
    let mut env = SvExpr::envelope(build_envelope(&a_in, f, inner)?);
    if bar_inner {
        env = env.bar();
    }
    sv_norm(&b.mul(&env), e, lo, hi)
}

/// Checks the conditions under which a classic, R or L space is a nontrivial intermediate
/// space. On the unit domain every condition about (1, inf) is dropped.
pub fn nontrivial(spec: &SpaceSpec, domain: Domain) -> Result<Nontrivial> {
    let full = domain == Domain::Full;
    let mut checks: Vec<std::result::Result<(), String>> = Vec::new();
    match spec {
        SpaceSpec::Classic { theta, b, e } => {
            if theta.is_zero() && full {
                checks.push(finite("|b|_E(1,inf)", sv_norm(b, *e, 0.0, POS)));
            } else if *theta == Scalar::one() {
                checks.push(finite("|b|_E(0,1)", sv_norm(b, *e, NEG, 0.0)));
            }
        }
        SpaceSpec::R { theta, b, e, a, f } => {
            checks.push(finite("|b|_E(0,1)", sv_norm(b, *e, NEG, 0.0)));
            if theta.is_zero() && full {
                checks.push(finite(
                    "|b(t)|a|_F(t,inf)|_E(1,inf)",
                    nested(b, *e, a, *f, EnvKind::UpperToInf, false, 0.0, POS),
                ));
            } else if *theta == Scalar::one() {
                checks.push(finite(
                    "|b(t)|a|_F(t,1)|_E(0,1)",
                    nested(b, *e, a, *f, EnvKind::UpperToOne, false, NEG, 0.0),
                ));
                checks.push(finite("|ab|_E(0,1)", sv_norm(&a.mul(b), *e, NEG, 0.0)));
            }
        }
        SpaceSpec::L { theta, b, e, a, f } => {
            if full {
                checks.push(finite("|b|_E(1,inf)", sv_norm(b, *e, 0.0, POS)));
            }
            if theta.is_zero() && full {
                // ‖a‖_F(1,t) for t > 1 is the (1/t, 1) norm of the reflected weight
                checks.push(finite(
                    "|b(t)|a|_F(1,t)|_E(1,inf)",
                    nested(b, *e, a, *f, EnvKind::UpperToOne, true, 0.0, POS),
                ));
                checks.push(finite("|ab|_E(1,inf)", sv_norm(&a.mul(b), *e, 0.0, POS)));
            } else if *theta == Scalar::one() {
                checks.push(finite(
                    "|b(t)|a|_F(0,t)|_E(0,1)",
                    nested(b, *e, a, *f, EnvKind::Lower, false, NEG, 0.0),
                ));
            }
        }
        _ => return Err(Error::Mismatch(format!("nontrivial is defined for classic, R and L, not {}", spec.name()))),
    }
    let failed: Vec<String> = checks.into_iter().filter_map(|c| c.err()).collect();
    Ok(if failed.is_empty() {
        Nontrivial { ok: true, reason: "all conditions hold".into() }
    } else {
        Nontrivial { ok: false, reason: failed.join("; ") }
    })
}

/// The same space seen from the reversed couple (X1, X0).
pub fn symmetrize(spec: &SpaceSpec) -> Result<SpaceSpec> {
    let flip = |t: &Scalar| Scalar::one() - *t;
    Ok(match spec {
        SpaceSpec::Classic { theta, b, e } => SpaceSpec::Classic { theta: flip(theta), b: b.bar(), e: *e },
        SpaceSpec::R { theta, b, e, a, f } => {
            SpaceSpec::L { theta: flip(theta), b: b.bar(), e: *e, a: a.bar(), f: *f }
        }
        SpaceSpec::L { theta, b, e, a, f } => {
            SpaceSpec::R { theta: flip(theta), b: b.bar(), e: *e, a: a.bar(), f: *f }
        }
        SpaceSpec::Extreme { kind, theta, c, e, b, f, a, g } => SpaceSpec::Extreme {
            kind: kind.reversed(),
            theta: flip(theta),
            c: c.bar(),
            e: *e,
            b: b.bar(),
            f: *f,
            a: a.bar(),
            g: *g,
        },
        _ => return Err(Error::Mismatch(format!("{} has no reversed-couple form", spec.name()))),
    })
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceSpec::Classic { theta, b, e } => write!(fm, "classic(theta={theta}, b={b}, E={e})"),
            SpaceSpec::R { theta, b, e, a, f } => write!(fm, "R(theta={theta}, b={b}, E={e}, a={a}, F={f})"),
            SpaceSpec::L { theta, b, e, a, f } => write!(fm, "L(theta={theta}, b={b}, E={e}, a={a}, F={f})"),
            SpaceSpec::Extreme { kind, theta, c, e, b, f, a, g } => write!(
                fm,
                "{}(theta={theta}, c={c}, E={e}, b={b}, F={f}, a={a}, G={g})",
                kind.name()
            ),
            SpaceSpec::Grand { p, alpha } => write!(fm, "grand(p={p}, alpha={alpha})"),
            SpaceSpec::Small { p, alpha } => write!(fm, "small(p={p}, alpha={alpha})"),
            SpaceSpec::LorentzKaramata { p, b, e } => {
                let p = match p {
                    Lq::Inf => "inf".to_string(),
                    Lq::Finite(p) => p.to_string(),
                };
                write!(fm, "lk(p={p}, b={b}, E={e})")
            }
            SpaceSpec::GammaDouble { p, q, uw1, w2 } => write!(fm, "gamma(p={p}, q={q}, uw1={uw1}, w2={w2})"),
            SpaceSpec::AType { p, alpha, e } => write!(fm, "A(p={p}, alpha={alpha}, E={e})"),
            SpaceSpec::BType { p, alpha, e } => write!(fm, "B(p={p}, alpha={alpha}, E={e})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64, d: i64) -> Scalar {
        Scalar::ratio(n, d)
    }

    #[test]
    fn classic_examples() {
        let u = Domain::Unit.grid(512).unwrap();
        let k = KProfile::from_fn(u, |t| t.min(1.0)).unwrap();
        let sp = SpaceSpec::Classic { theta: s(1, 2), b: SvExpr::one(), e: Lq::Inf };
        assert!((space_norm_k(&sp, &k).unwrap() - 1.0).abs() < 1e-12);
        let f = Domain::Full.grid(512).unwrap();
        let k = KProfile::from_fn(f, |t| t.min(1.0)).unwrap();
        let sp = SpaceSpec::Classic { theta: Scalar::zero(), b: SvExpr::one(), e: Lq::Inf };
        assert!((space_norm_k(&sp, &k).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn grand_requires_unit_and_f_star() {
        let sp = SpaceSpec::Grand { p: Scalar::int(2), alpha: Scalar::one() };
        let f = Domain::Full.grid(64).unwrap();
        let one = StepFunction::new(vec![0.0, 1.0], vec![1.0]).unwrap();
        assert!(space_norm_f(&sp, &one, &f).is_err());
        let k = KProfile::from_fn(f, |t| t).unwrap();
        assert!(matches!(space_norm_k(&sp, &k), Err(Error::Mismatch(_))));
    }

    #[test]
    fn nontrivial_examples() {
        let c = SpaceSpec::Classic { theta: Scalar::zero(), b: SvExpr::l(Scalar::int(-2)), e: Lq::int(1) };
        assert!(nontrivial(&c, Domain::Unit).unwrap().ok);
        let c = SpaceSpec::Classic { theta: Scalar::one(), b: SvExpr::one(), e: Lq::int(1) };
        let v = nontrivial(&c, Domain::Unit).unwrap();
        assert!(!v.ok && v.reason.contains("|b|_E(0,1)"));
        // condition 2 for R: ‖ℓ^-2‖_{L2(0,1)} < inf, but ‖1‖_{L2(t,inf)} = inf on the full line
        let r = SpaceSpec::R {
            theta: Scalar::zero(),
            b: SvExpr::l(Scalar::int(-2)),
            e: Lq::int(2),
            a: SvExpr::one(),
            f: Lq::int(2),
        };
        assert!(nontrivial(&r, Domain::Unit).unwrap().ok);
        let v = nontrivial(&r, Domain::Full).unwrap();
        assert!(!v.ok && v.reason.contains("F(t,inf)"), "{}", v.reason);
    }

    #[test]
    fn symmetrize_examples() {
        let c = SpaceSpec::Classic { theta: s(3, 10), b: SvExpr::l(Scalar::int(2)), e: Lq::int(2) };
        let r = symmetrize(&c).unwrap();
        assert_eq!(r, SpaceSpec::Classic { theta: s(7, 10), b: SvExpr::l(Scalar::int(2)).bar(), e: Lq::int(2) });
        let back = symmetrize(&r).unwrap();
        let SpaceSpec::Classic { b, .. } = &back else { panic!() };
        assert_eq!(b.eval(0.01).unwrap(), SvExpr::l(Scalar::int(2)).eval(0.01).unwrap());
        assert!(symmetrize(&SpaceSpec::Grand { p: Scalar::int(2), alpha: Scalar::one() }).is_err());
    }
}
