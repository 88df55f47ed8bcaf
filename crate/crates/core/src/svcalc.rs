//! Slowly varying functions: symbolic trees over broken log powers plus tabulated envelopes.
//!
//! Everything is evaluated in log coordinates: `x = ln t`, and `eval_log(x) = ln b(e^x)`.
//! With that convention `ℓ(t) = 1 + |x|`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{Lq, Scalar};

/// Which end of (0, inf): `Zero` is t -> 0 (x -> -inf), `Infinity` is t -> inf.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum End {
    Zero,
    Infinity,
}

impl End {
    pub fn flip(self) -> End {
        match self {
            End::Zero => End::Infinity,
            End::Infinity => End::Zero,
        }
    }
}

/// A numerically tabulated SV function, stored as `ln b` on nodes in `x = ln t`.
#[derive(Debug)]
pub struct Envelope {
    pub label: String,
    xs: Vec<f64>,
    logv: Vec<f64>,
    exps: (f64, f64),
}

impl PartialEq for Envelope {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self, other)
    }
}

impl Envelope {
    /// `xs` strictly increasing, `logv` finite. The end exponents are read off the table.
    pub fn new(label: impl Into<String>, xs: Vec<f64>, logv: Vec<f64>) -> Result<Self> {
        if xs.len() < 2 || xs.len() != logv.len() {
            return Err(Error::Param("envelope needs at least two nodes".into()));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Invariant("envelope nodes must increase".into()));
        }
        if logv.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invariant("envelope values must be positive and finite".into()));
        }
        let n = xs.len();
        let slope = |i: usize, j: usize| {
            let (yi, yj) = ((1.0 + xs[i].abs()).ln(), (1.0 + xs[j].abs()).ln());
            if (yj - yi).abs() < 1e-12 {
                0.0
            } else {
                (logv[j] - logv[i]) / (yj - yi)
            }
        };
        let k = (n / 50).max(1);
        let exps = (slope(k, 0), slope(n - 1 - k, n - 1));
        Ok(Envelope { label: label.into(), xs, logv, exps })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    pub fn end_exponent(&self, end: End) -> f64 {
        match end {
            End::Zero => self.exps.0,
            End::Infinity => self.exps.1,
        }
    }

    pub fn eval_log(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        if !(x >= lo && x <= hi) {
            return Err(Error::TableMiss { x, lo, hi });
        }
        let j = self.xs.partition_point(|&v| v <= x);
        if j >= self.xs.len() {
            return Ok(self.logv[self.xs.len() - 1]);
        }
        let i = j - 1;
        let w = (x - self.xs[i]) / (self.xs[j] - self.xs[i]);
        Ok(self.logv[i] * (1.0 - w) + self.logv[j] * w)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SvExpr {
    Const(Scalar),
    /// ℓ^α on (0,1], ℓ^β on (1,inf).
    LogPow(Scalar, Scalar),
    Product(Vec<SvExpr>),
    Power(Box<SvExpr>, Scalar),
    /// t -> inner(1/t)
    Bar(Box<SvExpr>),
    /// u -> outer(u^gamma * inner(u))
    Compose { outer: Box<SvExpr>, gamma: Scalar, inner: Box<SvExpr> },
    Envelope(Arc<Envelope>),
}

impl SvExpr {
    pub fn one() -> Self {
        SvExpr::Const(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Result<Self> {
        if !(c.to_f64() > 0.0 && c.to_f64().is_finite()) {
            return Err(Error::Param(format!("constant must be positive, got {c}")));
        }
        Ok(SvExpr::Const(c))
    }

    pub fn l(a: Scalar) -> Self {
        SvExpr::LogPow(a, a)
    }

    pub fn l2(a: Scalar, b: Scalar) -> Self {
        SvExpr::LogPow(a, b)
    }

    pub fn envelope(e: Envelope) -> Self {
        SvExpr::Envelope(Arc::new(e))
    }

    pub fn mul(&self, other: &SvExpr) -> SvExpr {
        let mut parts = Vec::new();
        for e in [self, other] {
            match e {
                SvExpr::Product(v) => parts.extend(v.iter().cloned()),
                SvExpr::Const(c) if *c == Scalar::one() => {}
                _ => parts.push(e.clone()),
            }
        }
        match parts.len() {
            0 => SvExpr::one(),
            1 => parts.pop().unwrap(),
            _ => SvExpr::Product(parts),
        }
    }

    pub fn pow(&self, r: Scalar) -> SvExpr {
        if r == Scalar::one() {
            return self.clone();
        }
        SvExpr::Power(Box::new(self.clone()), r)
    }

    pub fn recip(&self) -> SvExpr {
        self.pow(Scalar::int(-1))
    }

    pub fn bar(&self) -> SvExpr {
        SvExpr::Bar(Box::new(self.clone()))
    }

    pub fn compose(outer: &SvExpr, gamma: Scalar, inner: &SvExpr) -> Result<SvExpr> {
        if !(gamma.to_f64() > 0.0) {
            return Err(Error::Param(format!("compose requires gamma > 0, got {gamma}")));
        }
        Ok(SvExpr::Compose { outer: Box::new(outer.clone()), gamma, inner: Box::new(inner.clone()) })
    }

    /// ln b(e^x)
    pub fn eval_log(&self, x: f64) -> Result<f64> {
        Ok(match self {
            SvExpr::Const(c) => c.to_f64().ln(),
            SvExpr::LogPow(a, b) => {
                let e = if x <= 0.0 { a } else { b };
                if e.is_zero() {
                    0.0
                } else {
                    e.to_f64() * x.abs().ln_1p()
                }
            }
            SvExpr::Product(v) => {
                let mut s = 0.0;
                for e in v {
                    s += e.eval_log(x)?;
                }
                s
            }
            SvExpr::Power(e, r) => r.to_f64() * e.eval_log(x)?,
            SvExpr::Bar(e) => e.eval_log(-x)?,
            SvExpr::Compose { outer, gamma, inner } => {
                outer.eval_log(gamma.to_f64() * x + inner.eval_log(x)?)?
            }
            SvExpr::Envelope(env) => env.eval_log(x)?,
        })
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!("t must be positive and finite, got {t}")));
        }
        Ok(self.eval_log(t.ln())?.exp())
    }

    /// If `b = c ℓ^e` exactly on the whole half-line at `end`, returns `(ln c, e)`.
    pub fn monomial(&self, end: End) -> Option<(f64, Scalar)> {
        match self {
            SvExpr::Const(c) => Some((c.to_f64().ln(), Scalar::zero())),
            SvExpr::LogPow(a, b) => Some((0.0, if end == End::Zero { *a } else { *b })),
            SvExpr::Product(v) => v.iter().try_fold((0.0, Scalar::zero()), |acc, e| {
                let (c, x) = e.monomial(end)?;
                Some((acc.0 + c, acc.1 + x))
            }),
            SvExpr::Power(e, r) => e.monomial(end).map(|(c, x)| (c * r.to_f64(), x * *r)),
            SvExpr::Bar(e) => e.monomial(end.flip()),
            SvExpr::Compose { outer, .. } => match outer.monomial(End::Zero)? {
                (c, x) if x.is_zero() && outer.monomial(End::Infinity)?.1.is_zero() => {
                    Some((c, Scalar::zero()))
                }
                _ => None,
            },
            SvExpr::Envelope(_) => None,
        }
    }

    /// Exponent `e` with `b ≈ ℓ^e` at the given end (exact unless an envelope is involved).
    pub fn log_exponent(&self, end: End) -> Scalar {
        match self {
            SvExpr::Const(_) => Scalar::zero(),
            SvExpr::LogPow(a, b) => {
                if end == End::Zero {
                    *a
                } else {
                    *b
                }
            }
            SvExpr::Product(v) => v.iter().fold(Scalar::zero(), |acc, e| acc + e.log_exponent(end)),
            SvExpr::Power(e, r) => e.log_exponent(end) * *r,
            SvExpr::Bar(e) => e.log_exponent(end.flip()),
            SvExpr::Compose { outer, .. } => outer.log_exponent(end),
            SvExpr::Envelope(env) => Scalar::Approx(env.end_exponent(end)),
        }
    }

    /// `Some((α, β))` when the expression is exactly ℓ^{(α,β)} (unit constant).
    pub fn as_log_pow(&self) -> Option<(Scalar, Scalar)> {
        let (c0, a) = self.monomial(End::Zero)?;
        let (c1, b) = self.monomial(End::Infinity)?;
        if c0.abs() > 1e-15 || c1.abs() > 1e-15 {
            return None;
        }
        Some((a, b))
    }

    pub fn has_envelope(&self) -> bool {
        match self {
            SvExpr::Const(_) | SvExpr::LogPow(..) => false,
            SvExpr::Product(v) => v.iter().any(|e| e.has_envelope()),
            SvExpr::Power(e, _) | SvExpr::Bar(e) => e.has_envelope(),
            SvExpr::Compose { outer, inner, .. } => outer.has_envelope() || inner.has_envelope(),
            SvExpr::Envelope(_) => true,
        }
    }

    /// Collapses a purely symbolic expression into `c ℓ^{(α,β)}` when possible.
    pub fn simplify(&self) -> SvExpr {
        match (self.monomial(End::Zero), self.monomial(End::Infinity)) {
            (Some((c0, a)), Some((c1, b))) if (c0 - c1).abs() < 1e-15 => {
                let lp = if a.is_zero() && b.is_zero() { SvExpr::one() } else { SvExpr::LogPow(a, b) };
                if c0.abs() < 1e-15 {
                    lp
                } else {
                    SvExpr::Const(Scalar::Approx(c0.exp())).mul(&lp)
                }
            }
            _ => self.clone(),
        }
    }
}

impl fmt::Display for SvExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SvExpr::Const(c) => write!(f, "{c}"),
            SvExpr::LogPow(a, b) if a == b => write!(f, "l({a})"),
            SvExpr::LogPow(a, b) => write!(f, "l({a},{b})"),
            SvExpr::Product(v) => {
                for (i, e) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    write!(f, "{e}")?;
                }
                Ok(())
            }
            SvExpr::Power(e, r) => match **e {
                SvExpr::Product(_) | SvExpr::Power(..) => write!(f, "({e})^{r}"),
                _ => write!(f, "{e}^{r}"),
            },
            SvExpr::Bar(e) => write!(f, "bar({e})"),
            SvExpr::Compose { outer, gamma, inner } => write!(f, "compose({outer},{gamma},{inner})"),
            SvExpr::Envelope(env) => write!(f, "env({})", env.label),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormSide {
    /// norm over (0,u)
    Lower,
    /// norm over (u,1), u < 1/2
    Upper,
}

/// Asymptotic equivalent ℓ^{σ+1/q} of the L_q(dt/t) norm of ℓ^σ near 0.
pub fn lognorm_asymptotic(sigma: Scalar, q: Lq, side: NormSide) -> Result<SvExpr> {
    let e = sigma + q.inv();
    let ok = match (side, q) {
        (NormSide::Lower, Lq::Inf) => sigma.signum() <= 0,
        (NormSide::Lower, _) => e.signum() < 0,
        (NormSide::Upper, Lq::Inf) => sigma.signum() >= 0,
        (NormSide::Upper, _) => e.signum() > 0,
    };
    if !ok {
        let cond = match (side, q.is_inf()) {
            (NormSide::Lower, true) => "sigma <= 0",
            (NormSide::Lower, false) => "sigma + 1/q < 0",
            (NormSide::Upper, true) => "sigma >= 0",
            (NormSide::Upper, false) => "sigma + 1/q > 0",
        };
        return Err(Error::Param(format!("{cond} fails for sigma={sigma}, q={q}")));
    }
    Ok(SvExpr::l(e))
}

/// Largest drop (in log scale) of `t^eps b(t)` over the log window `[-r, r]` sampled at step `h`.
/// Zero iff the sampled function is nondecreasing.
pub fn monotone_defect(b: &SvExpr, eps: f64, r: f64, h: f64) -> Result<f64> {
    let n = (2.0 * r / h).round() as i64;
    let mut best = f64::NEG_INFINITY;
    let mut defect: f64 = 0.0;
    for i in 0..=n {
        let x = -r + i as f64 * h;
        let g = eps * x + b.eval_log(x)?;
        defect = defect.max(best - g);
        best = best.max(g);
    }
    Ok(defect)
}

/// SV check on a grid: t^eps b must be equivalent to a nondecreasing function and t^-eps b
/// to a nonincreasing one. Strict monotonicity is too strong (ℓ^2 t^0.1 dips near t = 1), so
/// equivalence is judged by the monotone defect staying put, up to `tol`, when the window
/// `[-r, r]` is tripled at the same step.
pub fn sv_grid_check(b: &SvExpr, eps: f64, r: f64, h: f64, tol: f64) -> Result<bool> {
    for e in [b.clone(), b.recip()] {
        let d1 = monotone_defect(&e, eps, r, h)?;
        let d3 = monotone_defect(&e, eps, 3.0 * r, h)?;
        if !d3.is_finite() || d3 - d1 > tol * (1.0 + d1.abs()) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64, d: i64) -> Scalar {
        Scalar::ratio(n, d)
    }

    #[test]
    fn pointwise_examples() {
        let e1 = (-1.0f64).exp();
        assert!((SvExpr::l(s(2, 1)).eval(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((SvExpr::l(s(1, 1)).eval(e1).unwrap() - 2.0).abs() < 1e-14);
        let b = SvExpr::l2(s(1, 1), s(2, 1)).bar();
        assert!((b.eval(1f64.exp()).unwrap() - 2.0).abs() < 1e-14);
        assert!(SvExpr::one().eval(0.0).is_err());
        assert!(SvExpr::one().eval(-1.0).is_err());
    }

    #[test]
    fn algebra_examples() {
        let l1 = SvExpr::l(Scalar::one());
        let p = l1.mul(&SvExpr::l(Scalar::int(-1)));
        for t in [1e-5, 0.3, 1.0, 7.0, 1e9] {
            assert!((p.eval(t).unwrap() - 1.0).abs() < 1e-13);
        }
        let e1 = (-1.0f64).exp();
        assert!((SvExpr::l(s(2, 1)).pow(s(1, 2)).eval(e1).unwrap() - 2.0).abs() < 1e-14);
        let l3 = SvExpr::l(s(3, 1));
        assert_eq!(l3.bar().bar().eval(0.01).unwrap(), l3.eval(0.01).unwrap());
    }

    #[test]
    fn compose_examples() {
        let c = SvExpr::compose(&SvExpr::one(), s(3, 7), &SvExpr::l(s(5, 1))).unwrap();
        assert_eq!(c.eval(0.2).unwrap(), 1.0);
        let c = SvExpr::compose(&SvExpr::l(Scalar::one()), Scalar::one(), &SvExpr::one()).unwrap();
        assert!((c.eval((-1.0f64).exp()).unwrap() - 2.0).abs() < 1e-14);
        assert!(SvExpr::compose(&SvExpr::one(), Scalar::zero(), &SvExpr::one()).is_err());
        assert!(SvExpr::compose(&SvExpr::one(), s(-1, 2), &SvExpr::one()).is_err());
    }

    #[test]
    fn lognorm_examples() {
        let r = lognorm_asymptotic(Scalar::int(-2), Lq::int(1), NormSide::Lower).unwrap();
        assert_eq!(r, SvExpr::l(Scalar::int(-1)));
        let r = lognorm_asymptotic(Scalar::zero(), Lq::int(1), NormSide::Upper).unwrap();
        assert_eq!(r, SvExpr::l(Scalar::one()));
        let e = lognorm_asymptotic(Scalar::zero(), Lq::int(1), NormSide::Lower).unwrap_err();
        assert!(e.to_string().contains("sigma + 1/q < 0"));
        assert!(lognorm_asymptotic(Scalar::int(1), Lq::Inf, NormSide::Lower).is_err());
        assert!(lognorm_asymptotic(Scalar::zero(), Lq::Inf, NormSide::Lower).is_ok());
    }

    #[test]
    fn exponents_and_monomials() {
        let b = SvExpr::l2(s(1, 2), s(-3, 1)).bar().mul(&SvExpr::l(s(1, 4)).pow(Scalar::int(2)));
        assert_eq!(b.log_exponent(End::Zero), s(-3, 1) + s(1, 2));
        assert_eq!(b.log_exponent(End::Infinity), s(1, 2) + s(1, 2));
        assert_eq!(b.as_log_pow(), Some((s(-5, 2), s(1, 1))));
        let c = SvExpr::compose(&SvExpr::l(s(-3, 8)), s(1, 4), &SvExpr::l(s(-1, 4))).unwrap();
        assert_eq!(c.log_exponent(End::Zero), s(-3, 8));
        assert!(c.monomial(End::Zero).is_none());
    }

    #[test]
    fn sv_check_accepts_logs_rejects_powers() {
        for eps in [0.1, 0.5] {
            assert!(sv_grid_check(&SvExpr::l(Scalar::int(2)), eps, 1000.0, 0.5, 1e-9).unwrap());
            assert!(sv_grid_check(&SvExpr::l2(s(-3, 2), s(1, 1)), eps, 1000.0, 0.5, 1e-9).unwrap());
        }
        // t^0.2 written as an envelope is not slowly varying
        let xs: Vec<f64> = (0..=8000).map(|i| -4000.0 + i as f64).collect();
        let lv: Vec<f64> = xs.iter().map(|x| 0.2 * x).collect();
        let p = SvExpr::envelope(Envelope::new("t^0.2", xs, lv).unwrap());
        assert!(!sv_grid_check(&p, 0.1, 1000.0, 0.5, 1e-9).unwrap());
    }

    #[test]
    fn envelope_table_miss() {
        let e = Envelope::new("e", vec![-1.0, 0.0, 1.0], vec![0.0, 1.0, 2.0]).unwrap();
        assert!((e.eval_log(0.5).unwrap() - 1.5).abs() < 1e-15);
        assert!(matches!(e.eval_log(1.5), Err(Error::TableMiss { .. })));
    }
}
