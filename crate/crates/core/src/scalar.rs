//! Real parameters that stay exact (rational) as long as they can.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::Rational64;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A real number, exact when it came from rational input and rational arithmetic.
#[derive(Debug, Clone, Copy)]
pub enum Scalar {
    Exact(Rational64),
    Approx(f64),
}

impl Scalar {
    pub fn int(n: i64) -> Self {
        Scalar::Exact(Rational64::from_integer(n))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Scalar::Exact(Rational64::new(n, d))
    }

    pub fn zero() -> Self {
        Scalar::int(0)
    }

    pub fn one() -> Self {
        Scalar::int(1)
    }

    /// Wraps a float; integral values become exact.
    pub fn from_f64(x: f64) -> Self {
        if x.is_finite() && x.fract() == 0.0 && x.abs() < 1e15 {
            return Scalar::int(x as i64);
        }
        Scalar::Approx(x)
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Scalar::Approx(x) => x,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Approx(x) => *x == 0.0,
        }
    }

    pub fn signum(&self) -> i32 {
        match self {
            Scalar::Exact(r) => {
                if r.is_zero() {
                    0
                } else if r.is_positive() {
                    1
                } else {
                    -1
                }
            }
            Scalar::Approx(x) => {
                if *x == 0.0 {
                    0
                } else if *x > 0.0 {
                    1
                } else {
                    -1
                }
            }
        }
    }

    pub fn abs(self) -> Self {
        if self.signum() < 0 {
            -self
        } else {
            self
        }
    }

    pub fn recip(self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Param("reciprocal of zero".into()));
        }
        Ok(Scalar::one() / self)
    }

    fn combine(
        self,
        rhs: Self,
        exact: impl Fn(&Rational64, &Rational64) -> Option<Rational64>,
        approx: impl Fn(f64, f64) -> f64,
    ) -> Self {
        if let (Scalar::Exact(a), Scalar::Exact(b)) = (self, rhs) {
            if let Some(r) = exact(&a, &b) {
                return Scalar::Exact(r);
            }
        }
        Scalar::Approx(approx(self.to_f64(), rhs.to_f64()))
    }

    /// Parses `3`, `-0.25`, `1e-3`, `2/3`. Values that fit in i64 fractions stay exact.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Param(format!("not a number: '{s}'"));
        if s.is_empty() {
            return Err(bad());
        }
        if let Some((n, d)) = s.split_once('/') {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(Error::Param(format!("zero denominator in '{s}'")));
            }
            return Ok(Scalar::Exact(Rational64::new(n, d)));
        }
        let x: f64 = s.parse().map_err(|_| bad())?;
        if !x.is_finite() {
            return Err(bad());
        }
        Ok(decimal_exact(s).map(Scalar::Exact).unwrap_or(Scalar::Approx(x)))
    }
}

fn decimal_exact(s: &str) -> Option<Rational64> {
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    if !ip.bytes().chain(fp.bytes()).all(|b| b.is_ascii_digit()) || ip.len() + fp.len() == 0 {
        return None;
    }
    let digits = format!("{ip}{fp}");
    let digits = digits.trim_start_matches('0');
    let mut num: i64 = if digits.is_empty() { 0 } else { digits.parse().ok()? };
    let scale = exp - fp.len() as i32;
    let mut den: i64 = 1;
    if scale >= 0 {
        num = num.checked_mul(10i64.checked_pow(scale as u32)?)?;
    } else {
        den = 10i64.checked_pow((-scale) as u32)?;
    }
    if neg {
        num = -num;
    }
    Some(Rational64::new(num, den))
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Self) -> Self {
        self.combine(rhs, |a, b| a.checked_add(b), |a, b| a + b)
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Self) -> Self {
        self.combine(rhs, |a, b| a.checked_sub(b), |a, b| a - b)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Self) -> Self {
        self.combine(rhs, |a, b| a.checked_mul(b), |a, b| a * b)
    }
}

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Self) -> Self {
        self.combine(rhs, |a, b| a.checked_div(b), |a, b| a / b)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Self {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Approx(x) => Scalar::Approx(-x),
        }
    }
}

/// Numeric equality: an exact and an approximate value are equal when they agree as floats.
impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => self.to_f64() == other.to_f64(),
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Some(a.cmp(b)),
            _ => self.to_f64().partial_cmp(&other.to_f64()),
        }
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) if *r.denom() == 1 => write!(f, "{}", r.numer()),
            Scalar::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Scalar::Approx(x) => write!(f, "{x:e}"),
        }
    }
}

/// Exponent of an L_q space over dt/t, `1 <= q <= inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lq {
    Finite(Scalar),
    Inf,
}

impl Lq {
    pub fn new(q: Scalar) -> Result<Self> {
        if !(q.to_f64() >= 1.0) {
            return Err(Error::Param(format!("Lq requires q >= 1, got {q}")));
        }
        Ok(Lq::Finite(q))
    }

    pub fn int(q: i64) -> Self {
        Lq::Finite(Scalar::int(q))
    }

    /// 1/q, zero for q = inf.
    pub fn inv(&self) -> Scalar {
        match self {
            Lq::Finite(q) => Scalar::one() / *q,
            Lq::Inf => Scalar::zero(),
        }
    }

    pub fn q_f64(&self) -> f64 {
        match self {
            Lq::Finite(q) => q.to_f64(),
            Lq::Inf => f64::INFINITY,
        }
    }

    pub fn is_inf(&self) -> bool {
        matches!(self, Lq::Inf)
    }
}

impl fmt::Display for Lq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lq::Finite(q) => write!(f, "Lq({q})"),
            Lq::Inf => write!(f, "Lq(inf)"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_exact_forms() {
        assert_eq!(Scalar::parse("0.25").unwrap(), Scalar::ratio(1, 4));
        assert_eq!(Scalar::parse("-3/6").unwrap(), Scalar::ratio(-1, 2));
        assert_eq!(Scalar::parse("1e-3").unwrap(), Scalar::ratio(1, 1000));
        assert!(Scalar::parse("0.25").unwrap().is_exact());
        assert!(Scalar::parse("1/0").is_err());
        assert!(Scalar::parse("abc").is_err());
        assert!(Scalar::parse("inf").is_err());
    }

    #[test]
    fn arithmetic_stays_exact() {
        let a = Scalar::ratio(1, 4);
        let b = Scalar::ratio(3, 4);
        let t = Scalar::ratio(1, 2);
        let tilde = (Scalar::one() - t) * a + t * b;
        assert_eq!(tilde, Scalar::ratio(1, 2));
        assert!(tilde.is_exact());
    }

    #[test]
    fn overflow_falls_back() {
        let big = Scalar::int(i64::MAX / 2);
        let p = big * big;
        assert!(!p.is_exact());
        assert!(p.to_f64() > 1e36);
    }

    #[test]
    fn display_round_trips() {
        for s in [Scalar::ratio(-7, 3), Scalar::int(5), Scalar::Approx(0.1 + 0.2)] {
            assert_eq!(Scalar::parse(&s.to_string()).unwrap(), s);
        }
    }

    #[test]
    fn lq_inverse() {
        assert_eq!(Lq::int(4).inv(), Scalar::ratio(1, 4));
        assert_eq!(Lq::Inf.inv(), Scalar::zero());
        assert!(Lq::new(Scalar::ratio(1, 2)).is_err());
    }
}
