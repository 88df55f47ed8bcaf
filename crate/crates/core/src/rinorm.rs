//! L_q norms over the homogeneous measure dt/t: single intervals, prefix/suffix profiles,
//! nested windowed profiles, and tabulated norm envelopes of SV functions.
//!
//! Node data is integrated with the trapezoid rule in `ln t`. On a geometric grid the weights
//! are uniform, the rule is second order, and reflecting the grid maps it onto itself.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sampling::{gauss_legendre8, GeometricGrid, KProfile, SampledFunction};
use crate::scalar::Lq;
use crate::svcalc::{End, Envelope, SvExpr};

/// Result of a single-interval norm; `empty` flags an interval that collapsed to one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomNorm {
    pub value: f64,
    pub empty: bool,
}

fn check_finite(v: &[f64]) -> Result<()> {
    if let Some(i) = v.iter().position(|x| !x.is_finite()) {
        return Err(Error::Invariant(format!("non-finite integrand at node {i}")));
    }
    Ok(())
}

/// Trapezoid norm of node values spaced `h` apart in ln t. Accumulates in the same order as
/// [`lower_profile`], so prefix profiles agree with direct calls bit for bit.
pub fn norm_nodes(v: &[f64], q: Lq, h: f64) -> f64 {
    match q {
        Lq::Inf => v.iter().fold(0.0, |m: f64, x| m.max(*x)),
        Lq::Finite(q) => {
            let q = q.to_f64();
            let mut s = 0.0;
            let mut prev = f64::NAN;
            for (k, x) in v.iter().enumerate() {
                let p = x.powf(q);
                if k > 0 {
                    s += 0.5 * h * (prev + p);
                }
                prev = p;
            }
            s.powf(1.0 / q)
        }
    }
}

/// Norm of `g` over `(lo, hi)` with endpoints snapped to the nearest nodes and clamped to
/// the grid, so `lo = 0` and `hi = inf` mean the whole grid.
pub fn hom_norm(g: &SampledFunction, q: Lq, lo: f64, hi: f64) -> Result<HomNorm> {
    check_finite(&g.values)?;
    if !(lo < hi) {
        return Err(Error::Param(format!("interval ({lo}, {hi}) is empty")));
    }
    let grid = &g.grid;
    let i0 = if lo <= 0.0 { 0 } else { grid.nearest(lo.ln()) };
    let i1 = if hi.is_infinite() { grid.len() - 1 } else { grid.nearest(hi.ln()) };
    if i1 <= i0 {
        let value = if q.is_inf() { g.values[i0] } else { 0.0 };
        return Ok(HomNorm { value, empty: true });
    }
    Ok(HomNorm { value: norm_nodes(&g.values[i0..=i1], q, grid.h()), empty: false })
}

/// `out[k]` = norm over nodes `0..=k`.
pub fn lower_profile(v: &[f64], q: Lq, h: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(v.len());
    match q {
        Lq::Inf => {
            let mut m: f64 = 0.0;
            for x in v {
                m = m.max(*x);
                out.push(m);
            }
        }
        Lq::Finite(q) => {
            let q = q.to_f64();
            let mut s = 0.0;
            let mut prev = f64::NAN;
            for (k, x) in v.iter().enumerate() {
                let p = x.powf(q);
                if k > 0 {
                    s += 0.5 * h * (prev + p);
                }
                prev = p;
                out.push(s.powf(1.0 / q));
            }
        }
    }
    out
}

/// `out[k]` = norm over nodes `k..n`.
pub fn upper_profile(v: &[f64], q: Lq, h: f64) -> Vec<f64> {
    let rev: Vec<f64> = v.iter().rev().copied().collect();
    let mut out = lower_profile(&rev, q, h);
    out.reverse();
    out
}

pub fn inner_profile_lower(g: &SampledFunction, q: Lq) -> Result<SampledFunction> {
    check_finite(&g.values)?;
    SampledFunction::new(g.grid, lower_profile(&g.values, q, g.grid.h()))
}

pub fn inner_profile_upper(g: &SampledFunction, q: Lq) -> Result<SampledFunction> {
    check_finite(&g.values)?;
    SampledFunction::new(g.grid, upper_profile(&g.values, q, g.grid.h()))
}

/// Node values of an SV function.
pub fn sv_samples(b: &SvExpr, grid: &GeometricGrid) -> Result<Vec<f64>> {
    (0..grid.len()).map(|i| Ok(b.eval_log(grid.x(i))?.exp())).collect()
}

/// `t^{-θ} a(t) K(t)` at the nodes, formed in log space.
pub fn weighted_values(k: &[f64], grid: &GeometricGrid, theta: f64, a: &SvExpr) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(k.len());
    for (i, kv) in k.iter().enumerate() {
        if *kv == 0.0 {
            out.push(0.0);
            continue;
        }
        let x = grid.x(i);
        out.push((-theta * x + a.eval_log(x)? + kv.ln()).exp());
    }
    Ok(out)
}

pub fn weighted_integrand(k: &KProfile, theta: f64, a: &SvExpr) -> Result<SampledFunction> {
    SampledFunction::new(k.grid, weighted_values(&k.values, &k.grid, theta, a)?)
}

#[derive(Clone, Copy)]
enum Exponent {
    One,
    Two,
    Half,
    General(f64),
}

impl Exponent {
    fn of(r: f64) -> Self {
        if r == 1.0 {
            Exponent::One
        } else if r == 2.0 {
            Exponent::Two
        } else if r == 0.5 {
            Exponent::Half
        } else {
            Exponent::General(r)
        }
    }

    #[inline]
    fn apply(self, s: f64) -> f64 {
        match self {
            Exponent::One => s,
            Exponent::Two => s * s,
            Exponent::Half => s.sqrt(),
            Exponent::General(r) => s.powf(r),
        }
    }
}

/// One nested value: `‖ b(t_j) ‖g‖_{q_in, nodes j..=k} ‖_{q_out, j = 0..=k}`, accumulating the
/// inner norm outward from `k` so no differences of large sums are ever taken.
fn window_at(b: &[f64], g: &[f64], gq: &[f64], bq: &[f64], k: usize, q_in: Lq, q_out: Lq, h: f64) -> f64 {
    if k == 0 {
        return if q_out.is_inf() && q_in.is_inf() { b[0] * g[0] } else { 0.0 };
    }
    match (q_in, q_out) {
        (Lq::Inf, Lq::Inf) => {
            let mut m = g[k];
            let mut o = b[k] * m;
            for j in (0..k).rev() {
                m = m.max(g[j]);
                o = o.max(b[j] * m);
            }
            o
        }
        (Lq::Inf, Lq::Finite(qo)) => {
            let qo = qo.to_f64();
            let mut m = g[k];
            let mut o = 0.5 * bq[k] * m.powf(qo);
            for j in (0..k).rev() {
                m = m.max(g[j]);
                let w = if j == 0 { 0.5 } else { 1.0 };
                o += w * bq[j] * m.powf(qo);
            }
            (h * o).powf(1.0 / qo)
        }
        (Lq::Finite(qi), Lq::Inf) => {
            let qi = qi.to_f64();
            let mut s = 0.0;
            let mut o: f64 = 0.0;
            for j in (0..k).rev() {
                s += 0.5 * h * (gq[j] + gq[j + 1]);
                o = o.max(b[j] * s.powf(1.0 / qi));
            }
            o
        }
        (Lq::Finite(qi), Lq::Finite(qo)) => {
            let (qi, qo) = (qi.to_f64(), qo.to_f64());
            let e = Exponent::of(qo / qi);
            let mut s = 0.0;
            let mut o = 0.0;
            for j in (0..k).rev() {
                s += 0.5 * h * (gq[j] + gq[j + 1]);
                let w = if j == 0 { 0.5 } else { 1.0 };
                o += w * bq[j] * e.apply(s);
            }
            (h * o).powf(1.0 / qo)
        }
    }
}

fn powq(v: &[f64], q: Lq) -> Vec<f64> {
    match q {
        Lq::Inf => v.to_vec(),
        Lq::Finite(q) => {
            let q = q.to_f64();
            v.iter().map(|x| x.powf(q)).collect()
        }
    }
}

/// `W(k) = ‖ b(t) ‖g‖_{q_in(t, t_k)} ‖_{q_out(t_min, t_k)}` for every node `k`. O(n²).
pub fn window_lower(b: &[f64], g: &[f64], q_in: Lq, q_out: Lq, h: f64) -> Vec<f64> {
    let gq = powq(g, q_in);
    let bq = powq(b, q_out);
    (0..g.len()).into_par_iter().map(|k| window_at(b, g, &gq, &bq, k, q_in, q_out, h)).collect()
}

/// `W(k) = ‖ b(t) ‖g‖_{q_in(t_k, t)} ‖_{q_out(t_k, t_max)}` for every node `k`. O(n²).
pub fn window_upper(b: &[f64], g: &[f64], q_in: Lq, q_out: Lq, h: f64) -> Vec<f64> {
    let rb: Vec<f64> = b.iter().rev().copied().collect();
    let rg: Vec<f64> = g.iter().rev().copied().collect();
    let mut out = window_lower(&rb, &rg, q_in, q_out, h);
    out.reverse();
    out
}

/// [`window_lower`] at the listed nodes only.
pub fn window_lower_at(b: &[f64], g: &[f64], q_in: Lq, q_out: Lq, h: f64, nodes: &[usize]) -> Vec<f64> {
    let gq = powq(g, q_in);
    let bq = powq(b, q_out);
    nodes.par_iter().map(|&k| window_at(b, g, &gq, &bq, k, q_in, q_out, h)).collect()
}

/// [`window_upper`] at the listed nodes only.
pub fn window_upper_at(b: &[f64], g: &[f64], q_in: Lq, q_out: Lq, h: f64, nodes: &[usize]) -> Vec<f64> {
    let n = g.len();
    let rb: Vec<f64> = b.iter().rev().copied().collect();
    let rg: Vec<f64> = g.iter().rev().copied().collect();
    let rn: Vec<usize> = nodes.iter().map(|k| n - 1 - k).collect();
    window_lower_at(&rb, &rg, q_in, q_out, h, &rn)
}

/// Share of the norm (of `norm^q`, or of the sup for q = inf) carried by the outermost
/// decade at each end of the grid. Above 1% a truncated (0,inf) integral is not trusted.
pub fn tail_fraction(v: &[f64], grid: &GeometricGrid, q: Lq) -> f64 {
    let n = v.len();
    let d = ((10f64.ln() / grid.h()).round() as usize).clamp(1, n / 2);
    match q {
        Lq::Inf => {
            let all = norm_nodes(v, q, 1.0);
            if all == 0.0 {
                return 0.0;
            }
            let outer = norm_nodes(&v[..d], q, 1.0).max(norm_nodes(&v[n - d..], q, 1.0));
            if outer >= all {
                1.0
            } else {
                0.0
            }
        }
        Lq::Finite(qq) => {
            let qq = qq.to_f64();
            let total: f64 = v.iter().map(|x| x.powf(qq)).sum();
            if total == 0.0 {
                return 0.0;
            }
            let outer: f64 = v[..d].iter().chain(&v[n - d..]).map(|x| x.powf(qq)).sum();
            outer / total
        }
    }
}

pub const TAIL_TRUST: f64 = 0.01;

/// Which tabulated norm of an SV function: over (0,u), (u,inf), or (u,1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvKind {
    Lower,
    UpperToInf,
    /// ‖b‖ over (u, 1) for u <= 1/2, frozen at its u = 1/2 value beyond (an SV-equivalent
    /// continuation that keeps the table positive).
    UpperToOne,
}

/// Half-width of envelope tables in ln t.
pub const ENV_RANGE: f64 = 1.0e6;
const ENV_STEP: f64 = 1.0e-3;

/// Nodes in `[lo, hi]` (finite, ln t) that are geometric in `1 + |x|` on each side of 0.
fn log_nodes(lo: f64, hi: f64) -> Vec<f64> {
    let r = 1.0 + ENV_STEP;
    let mut side = Vec::new();
    let mut y: f64 = 1.0;
    while y - 1.0 < lo.abs().max(hi.abs()) {
        side.push(y - 1.0);
        y *= r;
    }
    let mut xs: Vec<f64> = Vec::new();
    for &a in side.iter().rev() {
        if -a > lo && a > 0.0 {
            xs.push(-a);
        }
    }
    if lo < 0.0 && hi > 0.0 {
        xs.push(0.0);
    }
    for &a in &side {
        if a > lo && a < hi && a > 0.0 {
            xs.push(a);
        }
    }
    let mut out = vec![lo];
    out.extend(xs.into_iter().filter(|x| *x > lo && *x < hi));
    out.push(hi);
    out
}

/// ∫ b^q dx over each panel (q finite) or the panel max of b (q = inf).
fn panels(b: &SvExpr, xs: &[f64], q: Lq) -> Result<Vec<f64>> {
    xs.par_windows(2)
        .map(|w| -> Result<f64> {
            match q {
                Lq::Inf => {
                    let mut m = b.eval_log(w[0])?.max(b.eval_log(w[1])?);
                    for f in [0.25, 0.5, 0.75] {
                        m = m.max(b.eval_log(w[0] + f * (w[1] - w[0]))?);
                    }
                    Ok(m.exp())
                }
                Lq::Finite(q) => {
                    let q = q.to_f64();
                    let mut err = None;
                    let v = gauss_legendre8(
                        |x| match b.eval_log(x) {
                            Ok(l) => (q * l).exp(),
                            Err(e) => {
                                err = Some(e);
                                0.0
                            }
                        },
                        w[0],
                        w[1],
                    );
                    match err {
                        Some(e) => Err(e),
                        None => Ok(v),
                    }
                }
            }
        })
        .collect()
}

/// Contribution of `|x| > |x_end|` at one end, from the asymptotic exponent of `b`.
fn tail(b: &SvExpr, q: Lq, x_end: f64, end: End) -> Result<f64> {
    let sigma = b.log_exponent(end).to_f64();
    let bv = b.eval_log(x_end)?.exp();
    let y = 1.0 + x_end.abs();
    match q {
        Lq::Inf => {
            if sigma > 1e-9 {
                return Err(Error::Divergent(format!("sup of {b} is infinite (log exponent {sigma} > 0)")));
            }
            Ok(bv)
        }
        Lq::Finite(q) => {
            let q = q.to_f64();
            let e = sigma * q + 1.0;
            if e >= -1e-9 {
                return Err(Error::Divergent(format!(
                    "L{q} norm of {b} diverges at {} (log exponent {sigma})",
                    if end == End::Zero { "t=0" } else { "t=inf" }
                )));
            }
            Ok(bv.powf(q) * y / (-e))
        }
    }
}

/// ‖b‖ over `(e^lo, e^hi)` in L_q(dt/t); `lo`/`hi` may be infinite.
pub fn sv_norm(b: &SvExpr, q: Lq, lo: f64, hi: f64) -> Result<f64> {
    if !(lo < hi) {
        return Err(Error::Param("sv_norm needs lo < hi".into()));
    }
    let a = lo.max(-ENV_RANGE);
    let z = hi.min(ENV_RANGE);
    let xs = log_nodes(a, z);
    let p = panels(b, &xs, q)?;
    let mut parts = p;
    if lo == f64::NEG_INFINITY {
        parts.push(tail(b, q, a, End::Zero)?);
    }
    if hi == f64::INFINITY {
        parts.push(tail(b, q, z, End::Infinity)?);
    }
    Ok(match q {
        Lq::Inf => parts.into_iter().fold(0.0, f64::max),
        Lq::Finite(q) => parts.into_iter().sum::<f64>().powf(1.0 / q.to_f64()),
    })
}

/// Tabulates `u -> ‖b‖_{L_q}` over (0,u), (u,inf) or (u,1) on `|ln u| <= ENV_RANGE`.
pub fn build_envelope(b: &SvExpr, q: Lq, kind: EnvKind) -> Result<Envelope> {
    let half = -(2f64.ln());
    let mut xs = log_nodes(-ENV_RANGE, ENV_RANGE);
    if kind == EnvKind::UpperToOne {
        let pos = xs.partition_point(|x| *x < half);
        if xs[pos] != half {
            xs.insert(pos, half);
        }
    }
    let p = panels(b, &xs, q)?;
    let n = xs.len();
    let combine = |acc: f64, v: f64| if q.is_inf() { acc.max(v) } else { acc + v };
    let finish = |s: f64| match q {
        Lq::Inf => s,
        Lq::Finite(q) => s.powf(1.0 / q.to_f64()),
    };
    let mut acc = vec![0.0; n];
    match kind {
        EnvKind::Lower => {
            let mut s = tail(b, q, xs[0], End::Zero)?;
            acc[0] = s;
            for k in 1..n {
                s = combine(s, p[k - 1]);
                acc[k] = s;
            }
        }
        EnvKind::UpperToInf => {
            let mut s = tail(b, q, xs[n - 1], End::Infinity)?;
            acc[n - 1] = s;
            for k in (0..n - 1).rev() {
                s = combine(s, p[k]);
                acc[k] = s;
            }
        }
        EnvKind::UpperToOne => {
            let zero = xs.partition_point(|x| *x < 0.0);
            let mut s = 0.0;
            for k in (0..zero).rev() {
                s = combine(s, p[k]);
                acc[k] = s;
            }
            let ih = xs.partition_point(|x| *x < half);
            let frozen = acc[ih];
            for a in acc.iter_mut().skip(ih) {
                *a = frozen;
            }
        }
    }
    let mut logv = Vec::with_capacity(n);
    for (k, s) in acc.iter().enumerate() {
        let v = finish(*s);
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Divergent(format!("envelope of {b} is {v} at ln u = {}", xs[k])));
        }
        logv.push(v.ln());
    }
    let tag = match kind {
        EnvKind::Lower => "0,u",
        EnvKind::UpperToInf => "u,inf",
        EnvKind::UpperToOne => "u,1",
    };
    Envelope::new(format!("|{b}|_{q}({tag})"), xs, logv)
}

pub fn envelope_expr(b: &SvExpr, q: Lq, kind: EnvKind) -> Result<SvExpr> {
    Ok(SvExpr::envelope(build_envelope(b, q, kind)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::Domain;
    use crate::scalar::Scalar;

    fn ones(g: &GeometricGrid) -> SampledFunction {
        SampledFunction::new(*g, vec![1.0; g.len()]).unwrap()
    }

    #[test]
    fn hom_norm_examples() {
        let g = GeometricGrid::new(0.01, 100.0, 401).unwrap();
        let v = hom_norm(&ones(&g), Lq::int(1), 0.1, 10.0).unwrap();
        assert!((v.value - 100f64.ln()).abs() < 1e-12);
        let u = Domain::Unit.grid(300).unwrap();
        let t = SampledFunction::new(u, u.ts()).unwrap();
        assert_eq!(hom_norm(&t, Lq::Inf, 0.0, 1.0).unwrap().value, 1.0);
        let e = hom_norm(&ones(&g), Lq::int(1), 1.0, 1.0001).unwrap();
        assert!(e.empty && e.value == 0.0);
        let bad = SampledFunction { grid: g, values: vec![f64::NAN; g.len()] };
        assert!(matches!(hom_norm(&bad, Lq::int(1), 0.1, 1.0), Err(Error::Invariant(_))));
    }

    #[test]
    fn profile_examples() {
        let g = Domain::Unit.grid(200).unwrap();
        let p = inner_profile_lower(&ones(&g), Lq::Inf).unwrap();
        assert!(p.values.iter().all(|v| *v == 1.0));
        let p = inner_profile_lower(&ones(&g), Lq::int(1)).unwrap();
        for k in 0..g.len() {
            assert!((p.values[k] - (g.x(k) - g.x(0))).abs() < 1e-10);
        }
        let f = SampledFunction::new(g, g.ts().iter().map(|t| t.sqrt() * (1.0 + t)).collect()).unwrap();
        for q in [Lq::int(1), Lq::int(3), Lq::Inf] {
            let lo = inner_profile_lower(&f, q).unwrap();
            let up = inner_profile_upper(&f, q).unwrap();
            for k in [1, 50, 199] {
                let direct = norm_nodes(&f.values[..=k], q, g.h());
                assert_eq!(lo.values[k], direct);
                let direct = norm_nodes(&f.values[k..], q, g.h());
                assert!((up.values[k] - direct).abs() <= 1e-12 * direct);
            }
        }
    }

    #[test]
    fn weighted_examples() {
        let g = Domain::Unit.grid(100).unwrap();
        let k = KProfile::from_fn(g, |t| t).unwrap();
        let w = weighted_integrand(&k, 1.0, &SvExpr::one()).unwrap();
        assert!(w.values.iter().all(|v| (v - 1.0).abs() < 1e-12));
        let w = weighted_integrand(&k, 0.0, &SvExpr::one()).unwrap();
        assert!(w.values.iter().zip(&k.values).all(|(a, b)| (a - b).abs() <= 1e-12 * b));
        let gg = GeometricGrid::from_logs(-1.0, 0.0, 2).unwrap();
        let v = weighted_values(&[(-1f64).exp(), 1.0], &gg, 0.5, &SvExpr::l(Scalar::one())).unwrap();
        let want = 0.5f64.exp() * 2.0 * (-1f64).exp();
        assert!((v[0] - want).abs() < 1e-14);
    }

    fn brute_window(b: &[f64], g: &[f64], qi: Lq, qo: Lq, h: f64, k: usize) -> f64 {
        let inner: Vec<f64> = (0..=k).map(|j| b[j] * norm_nodes(&g[j..=k], qi, h)).collect();
        norm_nodes(&inner, qo, h)
    }

    #[test]
    fn window_matches_brute_force() {
        let g = Domain::Unit.grid(120).unwrap();
        let gv: Vec<f64> = g.ts().iter().map(|t| t.powf(0.3) * (1.0 - t.ln())).collect();
        let bv: Vec<f64> = g.xs().iter().map(|x| (1.0 - x).powf(-1.5)).collect();
        let qs = [Lq::int(1), Lq::int(2), Lq::int(4), Lq::Finite(Scalar::ratio(3, 2)), Lq::Inf];
        for qi in qs {
            for qo in qs {
                let w = window_lower(&bv, &gv, qi, qo, g.h());
                let u = window_upper(&bv, &gv, qi, qo, g.h());
                let rb: Vec<f64> = bv.iter().rev().copied().collect();
                let rg: Vec<f64> = gv.iter().rev().copied().collect();
                for k in [0, 1, 57, 119] {
                    let want = brute_window(&bv, &gv, qi, qo, g.h(), k);
                    assert!((w[k] - want).abs() <= 1e-12 * want.max(1e-300), "{qi} {qo} {k}");
                    let want = brute_window(&rb, &rg, qi, qo, g.h(), 119 - k);
                    assert!((u[k] - want).abs() <= 1e-12 * want.max(1e-300));
                }
            }
        }
    }

    #[test]
    fn envelope_closed_forms() {
        // ∫_{-inf}^{-1} (1-x)^-2 dx = 1/2
        let env = build_envelope(&SvExpr::l(Scalar::int(-2)), Lq::int(1), EnvKind::Lower).unwrap();
        assert!((env.eval_log(-1.0).unwrap().exp() - 0.5).abs() < 1e-6);
        let v = sv_norm(&SvExpr::l(Scalar::int(-2)), Lq::int(1), f64::NEG_INFINITY, -1.0).unwrap();
        assert!((v - 0.5).abs() < 1e-9);
        // ‖1‖ over (u,1) in L1 is ln(1/u)
        let env = build_envelope(&SvExpr::one(), Lq::int(1), EnvKind::UpperToOne).unwrap();
        assert!((env.eval_log(-5.0).unwrap().exp() - 5.0).abs() < 1e-6);
        assert!((env.eval_log(3.0).unwrap().exp() - 2f64.ln()).abs() < 1e-9);
        assert!(matches!(
            build_envelope(&SvExpr::one(), Lq::int(1), EnvKind::Lower),
            Err(Error::Divergent(_))
        ));
        let e = build_envelope(&SvExpr::l(Scalar::int(-1)), Lq::Inf, EnvKind::UpperToInf).unwrap();
        assert!((e.eval_log(0.0).unwrap().exp() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tail_fraction_flags_heavy_ends() {
        let g = Domain::Full.grid(400).unwrap();
        let flat = vec![1.0; 400];
        assert!(tail_fraction(&flat, &g, Lq::int(1)) > TAIL_TRUST);
        let bump: Vec<f64> = g.xs().iter().map(|x| (-x * x).exp()).collect();
        assert!(tail_fraction(&bump, &g, Lq::int(2)) < 1e-10);
    }
}
