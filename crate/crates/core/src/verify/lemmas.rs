//! Registered lemma checks. Each item produces raw (lhs, rhs) data at a resolution; the runner
//! turns it into reports at n and 2n and repeats the verdict with a lowered floor.

use rayon::prelude::*;

use super::{check_bound, check_equivalence_floor, EquivalenceReport, Verdict, FLOOR, LEMMA_THRESHOLD};
use crate::error::{Error, Result};
use crate::family::{build_family, default_family_defs, FamilyConfig, MemberDef};
use crate::rinorm::{build_envelope, lower_profile, norm_nodes, sv_samples, upper_profile, window_lower_at, window_upper_at, EnvKind};
use crate::sampling::{peetre_k, reverse_couple, Domain, GeometricGrid, KProfile};
use crate::scalar::{Lq, Scalar};
use crate::spaces::{space_norm_k, symmetrize, ExtremeKind, SpaceSpec};
use crate::svcalc::{lognorm_asymptotic, NormSide, SvExpr};

pub const CATALOG: [&str; 17] = [
    "lem1.i",
    "lem1.ii",
    "lem1.iv",
    "lema45.0t",
    "lema45.tinfty",
    "lemLRK.e5",
    "lemLRK.e7",
    "einfty.lower",
    "einfty.upper",
    "symLR.norm",
    "Le51.subst",
    "e1",
    "e3",
    "inclusion.RR",
    "inclusion.LL",
    "inclusion.RL",
    "inclusion.LR",
];

pub const IDENTITY_TOL: f64 = 1e-6;
pub const ENVELOPE_THRESHOLD: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    TwoSided(f64),
    OneSided,
    Identity(f64),
}

#[derive(Debug, Clone)]
struct Raw {
    label: String,
    lhs: Vec<(String, f64)>,
    rhs: Vec<(String, f64)>,
    kind: Kind,
}

impl Raw {
    fn new(label: String, kind: Kind) -> Self {
        Raw { label, lhs: Vec::new(), rhs: Vec::new(), kind }
    }

    fn push(&mut self, idx: String, l: f64, r: f64) {
        self.lhs.push((idx.clone(), l));
        self.rhs.push((idx, r));
    }

    fn report(&self, floor: f64) -> Result<EquivalenceReport> {
        match self.kind {
            Kind::TwoSided(th) => check_equivalence_floor(&self.label, &self.lhs, &self.rhs, th, floor),
            Kind::OneSided => {
                let mut r = check_bound(&self.label, &self.lhs, &self.rhs)?;
                if floor != FLOOR {
                    r = super::EquivalenceReport::build(&self.label, &self.lhs, &self.rhs, f64::INFINITY, floor, true)?;
                }
                Ok(r)
            }
            Kind::Identity(tol) => {
                let mut r = check_equivalence_floor(&self.label, &self.lhs, &self.rhs, 1.0 + tol, floor)?;
                let ok = !r.samples.is_empty() && r.samples.iter().all(|s| (s.ratio - 1.0).abs() <= tol);
                r.verdict = if r.samples.is_empty() {
                    Verdict::Inconclusive
                } else if ok {
                    Verdict::Pass
                } else {
                    Verdict::Fail
                };
                Ok(r)
            }
        }
    }
}

/// Resolution-dependent context shared by the items.
struct Ctx {
    n: usize,
}

impl Ctx {
    fn grid(&self, d: Domain) -> Result<GeometricGrid> {
        d.grid(self.n)
    }
}

fn interior(grid: &GeometricGrid) -> std::ops::Range<usize> {
    let n = grid.len();
    n / 6..n - n / 6
}

fn l(a: i64, d: i64) -> SvExpr {
    SvExpr::l(Scalar::ratio(a, d))
}

fn pow_samples(grid: &GeometricGrid, alpha: f64, b: &SvExpr) -> Result<Vec<f64>> {
    (0..grid.len()).map(|i| Ok((alpha * grid.x(i) + b.eval_log(grid.x(i))?).exp())).collect()
}

fn lq_name(q: Lq) -> String {
    q.to_string()
}

fn lem1_i(ctx: &Ctx) -> Result<Vec<Raw>> {
    let g = ctx.grid(Domain::Full)?;
    let h = g.h();
    let mut out = Vec::new();
    for alpha in [0.3, 1.0] {
        for b in [SvExpr::one(), l(1, 1), l(-1, 1)] {
            for q in [Lq::int(1), Lq::int(2), Lq::Inf] {
                for lower in [true, false] {
                    let a = if lower { alpha } else { -alpha };
                    let v = pow_samples(&g, a, &b)?;
                    let prof = if lower { lower_profile(&v, q, h) } else { upper_profile(&v, q, h) };
                    let side = if lower { "0t" } else { "tinf" };
                    let mut raw = Raw::new(format!("lem1.i[{side},alpha={alpha},b={b},E={}]", lq_name(q)), Kind::TwoSided(LEMMA_THRESHOLD));
                    for i in interior(&g).step_by(g.len() / 64) {
                        raw.push(format!("t={:.3e}", g.t(i)), prof[i], v[i]);
                    }
                    out.push(raw);
                }
            }
        }
    }
    Ok(out)
}

fn lem1_ii(ctx: &Ctx) -> Result<Vec<Raw>> {
    let g = ctx.grid(Domain::Full)?;
    let h = g.h();
    let m = (2f64.ln() / h).round().max(1.0) as usize;
    let mut out = Vec::new();
    for alpha in [-1.0, 0.0, 1.0] {
        for b in [SvExpr::one(), l(1, 1), l(-1, 1)] {
            for q in [Lq::int(1), Lq::int(2), Lq::Inf] {
                let v = pow_samples(&g, alpha, &b)?;
                let mut raw = Raw::new(format!("lem1.ii[alpha={alpha},b={b},E={}]", lq_name(q)), Kind::TwoSided(LEMMA_THRESHOLD));
                for i in interior(&g).step_by(g.len() / 64) {
                    raw.push(format!("t={:.3e}", g.t(i)), norm_nodes(&v[i..=i + m], q, h), v[i]);
                }
                out.push(raw);
            }
        }
    }
    Ok(out)
}

fn lem1_iv(ctx: &Ctx) -> Result<Vec<Raw>> {
    let g = ctx.grid(Domain::Full)?;
    let h = g.h();
    let mut out = Vec::new();
    for b in [SvExpr::one(), l(1, 1), l(-1, 1), SvExpr::l2(Scalar::int(1), Scalar::int(-1))] {
        for q in [Lq::int(1), Lq::int(2), Lq::Inf] {
            let v = sv_samples(&b, &g)?;
            for lower in [true, false] {
                let prof = if lower { lower_profile(&v, q, h) } else { upper_profile(&v, q, h) };
                let side = if lower { "0t" } else { "tinf" };
                let mut raw = Raw::new(format!("lem1.iv[{side},b={b},E={}]", lq_name(q)), Kind::OneSided);
                for i in interior(&g).step_by(g.len() / 64) {
                    raw.push(format!("t={:.3e}", g.t(i)), v[i], prof[i]);
                }
                out.push(raw);
            }
        }
    }
    Ok(out)
}

/// Monotone test functions on the full line: K-profiles and their reversed versions.
fn monotone_family(g: &GeometricGrid) -> Result<Vec<(String, Vec<f64>)>> {
    let defs = [
        MemberDef::TwoPow(0.8, 0.2),
        MemberDef::TwoPow(0.7, 0.3),
        MemberDef::TwoPow(0.9, 0.4),
        MemberDef::Chi(1e-2),
        MemberDef::Chi(1e2),
        MemberDef::Steps(11, 6),
        MemberDef::Steps(12, 6),
    ];
    let mut out = Vec::new();
    for m in build_family(&defs, g, Domain::Full)? {
        let k = peetre_k(&m.fstar, g)?;
        let r = reverse_couple(&k)?;
        out.push((format!("K[{}]", m.id), k.values));
        out.push((format!("Krev[{}]", m.id), r.values));
    }
    Ok(out)
}

fn lema45(ctx: &Ctx, lower: bool) -> Result<Vec<Raw>> {
    let g = ctx.grid(Domain::Full)?;
    let h = g.h();
    let fam = monotone_family(&g)?;
    let pairs: [(f64, f64); 2] = if lower { [(0.0, -0.5), (0.5, -1.0)] } else { [(-1.0, 0.5), (-1.5, 1.0)] };
    let mut out = Vec::new();
    for (alpha, outer) in pairs {
        for (a, b) in [(SvExpr::one(), SvExpr::one()), (l(1, 1), l(-1, 1))] {
            for (e, f) in [(Lq::int(1), Lq::int(1)), (Lq::int(2), Lq::Inf), (Lq::Inf, Lq::int(2))] {
                let id = if lower { "lema45.0t" } else { "lema45.tinfty" };
                let mut raw = Raw::new(
                    format!("{id}[alpha={alpha},exp={outer},a={a},b={b},E={},F={}]", lq_name(e), lq_name(f)),
                    Kind::TwoSided(LEMMA_THRESHOLD),
                );
                let wa = pow_samples(&g, alpha, &a)?;
                let wb = pow_samples(&g, outer, &b)?;
                for (name, fv) in &fam {
                    let inner: Vec<f64> = wa.iter().zip(fv).map(|(x, y)| x * y).collect();
                    let prof = if lower { lower_profile(&inner, f, h) } else { upper_profile(&inner, f, h) };
                    let lhs: Vec<f64> = wb.iter().zip(&prof).map(|(x, y)| x * y).collect();
                    let rhs: Vec<f64> = wb.iter().zip(&inner).map(|(x, y)| x * y).collect();
                    raw.push(name.clone(), norm_nodes(&lhs, e, h), norm_nodes(&rhs, e, h));
                }
                out.push(raw);
            }
        }
    }
    Ok(out)
}

fn weighted(k: &[f64], g: &GeometricGrid, theta: f64, a: &SvExpr) -> Result<Vec<f64>> {
    let w = pow_samples(g, -theta, a)?;
    Ok(w.iter().zip(k).map(|(x, y)| x * y).collect())
}

fn full_family(g: &GeometricGrid) -> Result<Vec<(String, KProfile)>> {
    let cfg = FamilyConfig { p0: 4.0 / 3.0, p1: 4.0, theta_crit: 0.25, theta_top: 0.75, seed: super::super::family::DEFAULT_SEED };
    build_family(&default_family_defs(Domain::Full, &cfg), g, Domain::Full)?
        .into_iter()
        .map(|m| Ok((m.id.clone(), peetre_k(&m.fstar, g)?)))
        .collect()
}

fn lem_lrk(ctx: &Ctx, lower: bool) -> Result<Vec<Raw>> {
    let g = ctx.grid(Domain::Full)?;
    let h = g.h();
    let fam = full_family(&g)?;
    let mut out = Vec::new();
    for theta in [0.0, 0.5, 1.0] {
        for (e, f) in [(Lq::int(1), Lq::int(2)), (Lq::Inf, Lq::int(1)), (Lq::int(2), Lq::Inf)] {
            let (a, b) = (l(1, 2), l(-1, 1));
            let id = if lower { "lemLRK.e5" } else { "lemLRK.e7" };
            let mut raw = Raw::new(format!("{id}[theta={theta},a={a},b={b},E={},F={}]", lq_name(e), lq_name(f)), Kind::OneSided);
            let bv = sv_samples(&b, &g)?;
            let env = if lower { lower_profile(&bv, e, h) } else { upper_profile(&bv, e, h) };
            for (name, k) in &fam {
                let gv = weighted(&k.values, &g, theta, &a)?;
                let nodes: Vec<usize> = interior(&g).step_by(g.len() / 32).collect();
                let w = if lower {
                    window_lower_at(&bv, &gv, f, e, h, &nodes)
                } else {
                    window_upper_at(&bv, &gv, f, e, h, &nodes)
                };
                for (&i, wi) in nodes.iter().zip(&w) {
                    raw.push(format!("{name}@{:.3e}", g.t(i)), gv[i] * env[i], *wi);
                }
            }
            out.push(raw);
        }
    }
    Ok(out)
}

fn e13(ctx: &Ctx, lower: bool) -> Result<Vec<Raw>> {
    let g = ctx.grid(Domain::Full)?;
    let h = g.h();
    let fam = full_family(&g)?;
    let thetas: &[f64] = if lower { &[0.0, 0.5, 1.0] } else { &[0.25, 0.5, 1.0] };
    let mut out = Vec::new();
    for &theta in thetas {
        for b in [SvExpr::one(), l(-1, 1)] {
            for e in [Lq::int(1), Lq::int(2), Lq::Inf] {
                let id = if lower { "e1" } else { "e3" };
                let mut raw = Raw::new(format!("{id}[theta={theta},b={b},E={}]", lq_name(e)), Kind::OneSided);
                for (name, k) in &fam {
                    let v = weighted(&k.values, &g, theta, &b)?;
                    let prof = if lower { lower_profile(&v, e, h) } else { upper_profile(&v, e, h) };
                    for i in interior(&g).step_by(g.len() / 32) {
                        raw.push(format!("{name}@{:.3e}", g.t(i)), v[i], prof[i]);
                    }
                }
                out.push(raw);
            }
        }
    }
    Ok(out)
}

fn einfty(ctx: &Ctx, lower: bool) -> Result<Vec<Raw>> {
    let matrix: &[(i64, i64, Lq)] = if lower {
        &[(-2, 1, Lq::int(1)), (-1, 1, Lq::int(2)), (-3, 1, Lq::int(2)), (-1, 2, Lq::Inf), (0, 1, Lq::Inf)]
    } else {
        &[(0, 1, Lq::int(1)), (1, 1, Lq::int(1)), (-1, 4, Lq::int(2)), (-1, 2, Lq::int(1)), (1, 2, Lq::Inf)]
    };
    let per_decade = (ctx.n / 256).max(4) as f64;
    let mut out = Vec::new();
    for &(sn, sd, q) in matrix {
        let sigma = Scalar::ratio(sn, sd);
        let b = SvExpr::l(sigma);
        let (kind, side, id) =
            if lower { (EnvKind::Lower, NormSide::Lower, "einfty.lower") } else { (EnvKind::UpperToOne, NormSide::Upper, "einfty.upper") };
        let env = build_envelope(&b, q, kind)?;
        let sym = lognorm_asymptotic(sigma, q, side)?;
        let mut raw = Raw::new(format!("{id}[sigma={sigma},E={}]", lq_name(q)), Kind::TwoSided(ENVELOPE_THRESHOLD));
        let (x0, x1) = (-8.0 * 10f64.ln(), -(2f64.ln()));
        let m = ((x1 - x0) / 10f64.ln() * per_decade) as usize;
        for j in 0..=m {
            let x = x0 + (x1 - x0) * j as f64 / m as f64;
            raw.push(format!("u={:.3e}", x.exp()), env.eval_log(x)?.exp(), sym.eval_log(x)?.exp());
        }
        out.push(raw);
    }
    Ok(out)
}

fn sym_specs() -> Vec<SpaceSpec> {
    let s = Scalar::ratio;
    let mut v = vec![
        SpaceSpec::Classic { theta: s(1, 4), b: l(-1, 1), e: Lq::int(2) },
        SpaceSpec::R { theta: s(1, 3), b: SvExpr::l2(Scalar::int(-1), Scalar::int(1)), e: Lq::int(1), a: l(1, 2), f: Lq::int(2) },
        SpaceSpec::L { theta: s(2, 3), b: l(-2, 1), e: Lq::Inf, a: SvExpr::one(), f: Lq::int(1) },
    ];
    for kind in [ExtremeKind::RR, ExtremeKind::LL, ExtremeKind::RL, ExtremeKind::LR] {
        v.push(SpaceSpec::Extreme {
            kind,
            theta: s(1, 2),
            c: l(-2, 1),
            e: Lq::int(1),
            b: l(-1, 2),
            f: Lq::int(2),
            a: l(1, 4),
            g: Lq::Inf,
        });
    }
    v
}

fn sym_lr(ctx: &Ctx) -> Result<Vec<Raw>> {
    let g = ctx.grid(Domain::Full)?;
    let fam = full_family(&g)?;
    sym_specs()
        .par_iter()
        .map(|spec| {
            let mirror = symmetrize(spec)?;
            let mut raw = Raw::new(format!("symLR.norm[{spec}]"), Kind::Identity(IDENTITY_TOL));
            for (name, k) in &fam {
                let r = reverse_couple(k)?;
                raw.push(name.clone(), space_norm_k(spec, k)?, space_norm_k(&mirror, &r)?);
            }
            Ok(raw)
        })
        .collect()
}

/// Solves ρ(e^x) = t by bisection; ρ is increasing.
fn rho_inverse_log(gamma: f64, sv: &SvExpr, log_t: f64) -> Result<f64> {
    let f = |x: f64| -> Result<f64> { Ok(gamma * x + sv.eval_log(x)? - log_t) };
    let (mut lo, mut hi) = (log_t / gamma * 4.0 - 10.0, 0.0);
    if f(lo)? > 0.0 || f(hi)? < 0.0 {
        return Err(Error::Range("cannot bracket the inverse of rho".into()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn le51(ctx: &Ctx) -> Result<Vec<Raw>> {
    let g = ctx.grid(Domain::Unit)?;
    let h = g.h();
    let rhos = [(0.25, l(-1, 4)), (0.5, l(-1, 1))];
    let mut out = Vec::new();
    for theta in [Scalar::ratio(1, 2), Scalar::ratio(1, 3)] {
        let th = theta.to_f64();
        let cfg = FamilyConfig { p0: 2.0, p1: 4.0, theta_crit: th, theta_top: th, seed: super::super::family::DEFAULT_SEED };
        let fam = build_family(&default_family_defs(Domain::Unit, &cfg), &g, Domain::Unit)?;
        for (gamma, sv) in &rhos {
            let xlo = rho_inverse_log(*gamma, sv, g.log_range().0)?;
            let ug = GeometricGrid::from_logs(xlo, 0.0, g.len())?;
            for b in [SvExpr::one(), l(-1, 1)] {
                for e in [Lq::int(1), Lq::Inf] {
                    let mut raw = Raw::new(
                        format!("Le51.subst[rho=u^{gamma}*{sv},theta={theta},b={b},E={}]", lq_name(e)),
                        Kind::TwoSided(LEMMA_THRESHOLD),
                    );
                    for m in &fam {
                        let lv = (0..ug.len())
                            .map(|i| {
                                let lr = gamma * ug.x(i) + sv.eval_log(ug.x(i))?;
                                Ok((-th * lr + b.eval_log(lr)?).exp() * m.fstar.integral_to(lr.exp()))
                            })
                            .collect::<Result<Vec<f64>>>()?;
                        let k = peetre_k(&m.fstar, &g)?;
                        let rv = weighted(&k.values, &g, th, &b)?;
                        raw.push(m.id.clone(), norm_nodes(&lv, e, ug.h()), norm_nodes(&rv, e, h));
                    }
                    out.push(raw);
                }
            }
        }
    }
    Ok(out)
}

fn inclusion(ctx: &Ctx, kind: ExtremeKind) -> Result<Vec<Raw>> {
    let g = ctx.grid(Domain::Unit)?;
    let s = Scalar::ratio;
    let (t0, t1) = (s(1, 4), s(3, 4));
    let mk = |r: bool, theta, b, e, a, f| if r { SpaceSpec::R { theta, b, e, a, f } } else { SpaceSpec::L { theta, b, e, a, f } };
    // kind names (higher-θ space, lower-θ space)
    let (hi_r, lo_r) = match kind {
        ExtremeKind::RR => (true, true),
        ExtremeKind::LL => (false, false),
        ExtremeKind::RL => (true, false),
        ExtremeKind::LR => (false, true),
    };
    let big = mk(hi_r, t1, l(-2, 1), Lq::int(1), SvExpr::one(), Lq::int(2));
    let small = mk(lo_r, t0, l(-1, 1), Lq::int(2), l(1, 2), Lq::int(1));
    let cfg = FamilyConfig { p0: 4.0 / 3.0, p1: 4.0, theta_crit: 0.75, theta_top: 0.75, seed: super::super::family::DEFAULT_SEED };
    let fam = build_family(&default_family_defs(Domain::Unit, &cfg), &g, Domain::Unit)?;
    let mut raw = Raw::new(format!("inclusion.{}[{big} -> {small}]", kind.name()), Kind::OneSided);
    for m in &fam {
        let k = peetre_k(&m.fstar, &g)?;
        raw.push(m.id.clone(), space_norm_k(&small, &k)?, space_norm_k(&big, &k)?);
    }
    Ok(vec![raw])
}

fn item(id: &str, ctx: &Ctx) -> Result<Vec<Raw>> {
    match id {
        "lem1.i" => lem1_i(ctx),
        "lem1.ii" => lem1_ii(ctx),
        "lem1.iv" => lem1_iv(ctx),
        "lema45.0t" => lema45(ctx, true),
        "lema45.tinfty" => lema45(ctx, false),
        "lemLRK.e5" => lem_lrk(ctx, true),
        "lemLRK.e7" => lem_lrk(ctx, false),
        "einfty.lower" => einfty(ctx, true),
        "einfty.upper" => einfty(ctx, false),
        "symLR.norm" => sym_lr(ctx),
        "Le51.subst" => le51(ctx),
        "e1" => e13(ctx, true),
        "e3" => e13(ctx, false),
        "inclusion.RR" => inclusion(ctx, ExtremeKind::RR),
        "inclusion.LL" => inclusion(ctx, ExtremeKind::LL),
        "inclusion.RL" => inclusion(ctx, ExtremeKind::RL),
        "inclusion.LR" => inclusion(ctx, ExtremeKind::LR),
        _ => Err(Error::Unknown(format!("lemma id `{id}`"))),
    }
}

/// Runs the listed catalog items at n and 2n. Each report also carries the verdict obtained
/// with the floor lowered by 10^2; a flip turns the report into a failure.
pub fn run_lemma_suite_at(ids: &[&str], n: usize) -> Result<Vec<EquivalenceReport>> {
    for id in ids {
        if !CATALOG.contains(id) {
            return Err(Error::Unknown(format!("lemma id `{id}`")));
        }
    }
    let per_id: Vec<Vec<EquivalenceReport>> = ids
        .par_iter()
        .map(|id| {
            let coarse = item(id, &Ctx { n })?;
            // identities are checked at one resolution
            let fine = if coarse.iter().all(|r| matches!(r.kind, Kind::Identity(_))) {
                coarse.clone()
            } else {
                item(id, &Ctx { n: 2 * n })?
            };
            coarse
                .iter()
                .zip(&fine)
                .map(|(c, f)| {
                    let build = |floor: f64| -> Result<EquivalenceReport> {
                        let r = c.report(floor)?;
                        Ok(match c.kind {
                            Kind::Identity(_) => r,
                            _ => r.with_refinement(&f.report(floor)?),
                        })
                    };
                    let rep = build(FLOOR)?;
                    let low = build(FLOOR * 1e-2)?;
                    Ok(if low.verdict != rep.verdict {
                        let mut r = rep.note(format!("verdict flips to {} with floor 1e-302", low.verdict.name()));
                        r.verdict = Verdict::Fail;
                        r
                    } else {
                        rep
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(per_id.into_iter().flatten().collect())
}

pub const LEMMA_N: usize = 2048;

pub fn run_lemma_suite(ids: &[&str]) -> Result<Vec<EquivalenceReport>> {
    run_lemma_suite_at(ids, LEMMA_N)
}
