//! Grids, step functions, rearrangements and the Peetre K-functional of (L1, L∞).

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Which measure space the couple lives on: (0,1) (ordered couple) or (0,inf).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Unit,
    Full,
}

impl Domain {
    /// Default grid: (1e-8, 1) or (1e-8, 1e8).
    pub fn grid(self, n: usize) -> Result<GeometricGrid> {
        let l = 8.0 * 10f64.ln();
        match self {
            Domain::Unit => GeometricGrid::from_logs(-l, 0.0, n),
            Domain::Full => GeometricGrid::from_logs(-l, l, n),
        }
    }

    pub fn default_n(self) -> usize {
        match self {
            Domain::Unit => 2048,
            Domain::Full => 4096,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Domain::Unit => "unit",
            Domain::Full => "full",
        }
    }

    pub fn parse(s: &str) -> Result<Domain> {
        match s {
            "unit" => Ok(Domain::Unit),
            "full" => Ok(Domain::Full),
            _ => Err(Error::Param(format!("unknown domain '{s}' (unit|full)"))),
        }
    }
}

/// Nodes `t_i = t_min r^i`, `i = 0..n`, stored through their logarithms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricGrid {
    log_min: f64,
    log_max: f64,
    n: usize,
}

impl GeometricGrid {
    pub fn new(t_min: f64, t_max: f64, n: usize) -> Result<Self> {
        if !(t_min > 0.0 && t_max > t_min && t_max.is_finite()) {
            return Err(Error::Param(format!("grid needs 0 < t_min < t_max, got ({t_min}, {t_max})")));
        }
        Self::from_logs(t_min.ln(), t_max.ln(), n)
    }

    pub fn from_logs(log_min: f64, log_max: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Param("grid needs n >= 2".into()));
        }
        if !(log_max > log_min) || !log_min.is_finite() || !log_max.is_finite() {
            return Err(Error::Param("grid needs finite log_min < log_max".into()));
        }
        Ok(GeometricGrid { log_min, log_max, n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Log step; constant, so dt/t quadrature weights are uniform.
    pub fn h(&self) -> f64 {
        (self.log_max - self.log_min) / (self.n - 1) as f64
    }

    /// Written so that a grid with `log_min = -log_max` reflects exactly: `x(n-1-i) = -x(i)`.
    pub fn x(&self, i: usize) -> f64 {
        let m = (self.n - 1) as f64;
        (self.log_min * (m - i as f64) + self.log_max * i as f64) / m
    }

    pub fn t(&self, i: usize) -> f64 {
        self.x(i).exp()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    pub fn ts(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.t(i)).collect()
    }

    pub fn t_min(&self) -> f64 {
        self.t(0)
    }

    pub fn t_max(&self) -> f64 {
        self.t(self.n - 1)
    }

    pub fn log_range(&self) -> (f64, f64) {
        (self.log_min, self.log_max)
    }

    pub fn is_symmetric(&self) -> bool {
        self.log_min == -self.log_max
    }

    /// Same range, twice the node count.
    pub fn refine(&self) -> Self {
        GeometricGrid { n: 2 * self.n, ..*self }
    }

    /// Nearest node to `ln t = x`, clamped into the grid.
    pub fn nearest(&self, x: f64) -> usize {
        let k = ((x - self.log_min) / self.h()).round();
        k.clamp(0.0, (self.n - 1) as f64) as usize
    }

    /// Fractional index of `ln t = x`, or None outside the grid (with a little slack).
    pub fn locate(&self, x: f64) -> Option<f64> {
        let f = (x - self.log_min) / self.h();
        let top = (self.n - 1) as f64;
        if f < -1e-9 || f > top + 1e-9 {
            None
        } else {
            Some(f.clamp(0.0, top))
        }
    }

    /// Cell edges `t_i r^{∓1/2}` around every node (n+1 values), the natural support for
    /// cell-averaged step data.
    pub fn mid_edges(&self) -> Vec<f64> {
        let h = self.h();
        (0..=self.n).map(|i| (self.log_min + (i as f64 - 0.5) * h).exp()).collect()
    }
}

/// Nonnegative piecewise-constant function on `[0, edges.last())`: value `values[j]` on
/// `[edges[j], edges[j+1])`, zero afterwards. `edges[0] = 0` so the mass near the origin is kept.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    edges: Vec<f64>,
    values: Vec<f64>,
    cum: Vec<f64>,
}

impl StepFunction {
    pub fn new(edges: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if edges.len() != values.len() + 1 || values.is_empty() {
            return Err(Error::Param("step function needs len(edges) = len(values) + 1 >= 2".into()));
        }
        if edges[0] != 0.0 {
            return Err(Error::Param("step function edges must start at 0".into()));
        }
        if edges.windows(2).any(|w| !(w[1] > w[0])) || !edges[edges.len() - 1].is_finite() {
            return Err(Error::Invariant("step edges must be finite and increasing".into()));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Invariant("step values must be finite and >= 0".into()));
        }
        let mut cum = Vec::with_capacity(edges.len());
        cum.push(0.0);
        for j in 0..values.len() {
            cum.push(cum[j] + values[j] * (edges[j + 1] - edges[j]));
        }
        Ok(StepFunction { edges, values, cum })
    }

    /// Cell averages of a function given by its antiderivative `F` with `F(0) = 0`.
    pub fn from_antiderivative(edges: Vec<f64>, big_f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = edges
            .windows(2)
            .map(|w| ((big_f(w[1]) - big_f(w[0])) / (w[1] - w[0])).max(0.0))
            .collect();
        Self::new(edges, values)
    }

    /// Cell averages of `f`; the first cell `(0, edges[1])` has its integral given separately.
    pub fn from_density(edges: Vec<f64>, head_integral: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(edges.len() - 1);
        values.push(head_integral / edges[1]);
        for w in edges[1..].windows(2) {
            values.push(gl_log(&f, w[0], w[1]) / (w[1] - w[0]));
        }
        Self::new(edges, values)
    }

    pub fn chi(a: f64, domain_end: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::Param(format!("chi needs a > 0, got {a}")));
        }
        if a >= domain_end {
            return Self::new(vec![0.0, domain_end], vec![1.0]);
        }
        Self::new(vec![0.0, a, domain_end], vec![1.0, 0.0])
    }

    pub fn zero(domain_end: f64) -> Self {
        Self::new(vec![0.0, domain_end], vec![0.0]).expect("valid")
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn domain_end(&self) -> f64 {
        self.edges[self.edges.len() - 1]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0])
    }

    pub fn scale(&self, lambda: f64) -> Result<Self> {
        Self::new(self.edges.clone(), self.values.iter().map(|v| v * lambda).collect())
    }

    /// ∫_0^t f(s) ds, exact for the step data.
    pub fn integral_to(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let j = self.edges.partition_point(|&e| e <= t);
        if j >= self.edges.len() {
            return self.cum[self.cum.len() - 1];
        }
        let c = j - 1;
        self.cum[c] + self.values[c] * (t - self.edges[c])
    }

    /// Value at `t` (right-continuous), 0 beyond the support.
    pub fn value_at(&self, t: f64) -> f64 {
        let j = self.edges.partition_point(|&e| e <= t);
        if j == 0 || j >= self.edges.len() {
            0.0
        } else {
            self.values[j - 1]
        }
    }

    /// Lebesgue measure of `{f > lambda}`.
    pub fn distribution(&self, lambda: f64) -> f64 {
        self.values
            .iter()
            .zip(self.edges.windows(2))
            .filter(|(v, _)| **v > lambda)
            .map(|(_, w)| w[1] - w[0])
            .sum()
    }

    /// Nonincreasing rearrangement on `(0, domain_end)`.
    pub fn rearrange(&self) -> StepFunction {
        let mut cells: Vec<(f64, f64)> =
            self.values.iter().zip(self.edges.windows(2)).map(|(v, w)| (*v, w[1] - w[0])).collect();
        cells.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut edges = vec![0.0];
        let mut values = Vec::new();
        let mut acc = 0.0;
        for (v, len) in cells {
            acc += len;
            if values.last() == Some(&v) {
                *edges.last_mut().unwrap() = acc;
            } else {
                values.push(v);
                edges.push(acc);
            }
        }
        // keep the support exactly equal to the input domain
        *edges.last_mut().unwrap() = self.domain_end();
        StepFunction::new(edges, values).expect("rearrangement of a valid step function")
    }

    /// `(f - tau)_+` and `min(f, tau)`.
    pub fn split_at(&self, tau: f64) -> (StepFunction, StepFunction) {
        let hi = self.values.iter().map(|v| (v - tau).max(0.0)).collect();
        let lo = self.values.iter().map(|v| v.min(tau)).collect();
        (
            StepFunction::new(self.edges.clone(), hi).expect("valid"),
            StepFunction::new(self.edges.clone(), lo).expect("valid"),
        )
    }

    /// Node values: averages over the log cell `[t r^{-1/2}, t r^{1/2})`, clipped to the support.
    /// For data built on `grid.mid_edges()` this is exactly the cell value.
    pub fn node_values(&self, grid: &GeometricGrid) -> SampledFunction {
        let h = grid.h();
        let end = self.domain_end();
        let values = (0..grid.len())
            .map(|i| {
                let x = grid.x(i);
                let lo = (x - 0.5 * h).exp();
                let hi = (x + 0.5 * h).exp().min(end);
                if lo >= hi {
                    0.0
                } else {
                    ((self.integral_to(hi) - self.integral_to(lo)) / (hi - lo)).max(0.0)
                }
            })
            .collect();
        SampledFunction { grid: *grid, values }
    }

    /// Reads node data as cells `[t_i, t_{i+1})` with the first value extended down to 0.
    pub fn from_sampled(f: &SampledFunction) -> Result<Self> {
        let g = &f.grid;
        let mut edges = vec![0.0];
        edges.extend(g.ts());
        edges.push(g.t_max() * g.h().exp());
        let mut values = vec![f.values[0]];
        values.extend(f.values.iter().copied());
        Self::new(edges, values)
    }
}

const GL8: [(f64, f64); 4] = [
    (0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_3),
];

/// 8-point Gauss-Legendre on [a, b].
pub fn gauss_legendre8(mut f: impl FnMut(f64) -> f64, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    GL8.iter().map(|&(x, w)| w * (f(c - r * x) + f(c + r * x))).sum::<f64>() * r
}

/// ∫_lo^hi f(s) ds computed in the variable ln s.
fn gl_log(f: &impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    gauss_legendre8(|x| f(x.exp()) * x.exp(), lo.ln(), hi.ln())
}

/// Node-wise data on a grid: integrands, weights, f* samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    pub grid: GeometricGrid,
    pub values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(grid: GeometricGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Mismatch(format!("{} values for {} nodes", values.len(), grid.len())));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Invariant("sampled values must be finite and >= 0".into()));
        }
        Ok(SampledFunction { grid, values })
    }

    pub fn to_csv(&self) -> String {
        to_csv(&self.grid, &self.values)
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let (grid, values) = from_csv(text)?;
        Self::new(grid, values)
    }
}

/// f** on the grid: `(1/t) ∫_0^t f*(s) ds`, cell-exact in ds.
pub fn double_star(fstar: &StepFunction, grid: &GeometricGrid) -> Result<SampledFunction> {
    let k = peetre_k(fstar, grid)?;
    let values = k.values.iter().enumerate().map(|(i, v)| v / grid.t(i)).collect();
    Ok(SampledFunction { grid: *grid, values })
}

/// K(t, f; L1, L∞) = ∫_0^t f*(s) ds at the nodes.
pub fn peetre_k(fstar: &StepFunction, grid: &GeometricGrid) -> Result<KProfile> {
    if !fstar.is_nonincreasing() {
        return Err(Error::Invariant("f* must be nonincreasing".into()));
    }
    let values = (0..grid.len()).map(|i| fstar.integral_to(grid.t(i))).collect();
    Ok(KProfile { grid: *grid, values })
}

/// Sampled K-functional `t -> K(t, f)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KProfile {
    pub grid: GeometricGrid,
    pub values: Vec<f64>,
}

impl KProfile {
    pub fn new(grid: GeometricGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Mismatch(format!("{} values for {} nodes", values.len(), grid.len())));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Invariant("K values must be finite and >= 0".into()));
        }
        Ok(KProfile { grid, values })
    }

    pub fn from_fn(grid: GeometricGrid, k: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.ts().into_iter().map(k).collect())
    }

    /// Checks monotonicity of K and K/t and concavity (chord slopes), relative tolerance `tol`.
    pub fn check_invariants(&self, tol: f64) -> Result<()> {
        let t = self.grid.ts();
        let k = &self.values;
        for i in 1..k.len() {
            if k[i] < k[i - 1] * (1.0 - tol) {
                return Err(Error::Invariant(format!("K decreases at node {i}")));
            }
            if k[i] / t[i] > k[i - 1] / t[i - 1] * (1.0 + tol) {
                return Err(Error::Invariant(format!("K(t)/t increases at node {i}")));
            }
        }
        let mut prev = f64::INFINITY;
        for i in 1..k.len() {
            let s = (k[i] - k[i - 1]) / (t[i] - t[i - 1]);
            let slack = tol * (k[i].abs() + k[i - 1].abs()) / (t[i] - t[i - 1]);
            if s > prev + slack {
                return Err(Error::Invariant(format!("K not concave at node {i}")));
            }
            prev = s;
        }
        Ok(())
    }

    /// Chord interpolation in (t, K); below the grid K is extended linearly through the origin.
    pub fn at(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("K queried at t={t}")));
        }
        let x = t.ln();
        let (lo, _) = self.grid.log_range();
        if x < lo {
            return Ok(self.values[0] * t / self.grid.t_min());
        }
        let f = self
            .grid
            .locate(x)
            .ok_or_else(|| Error::Range(format!("t={t} beyond grid max {}", self.grid.t_max())))?;
        let i = (f.floor() as usize).min(self.grid.len() - 2);
        let (t0, t1) = (self.grid.t(i), self.grid.t(i + 1));
        let w = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
        Ok(self.values[i] * (1.0 - w) + self.values[i + 1] * w)
    }

    pub fn scale(&self, lambda: f64) -> Result<Self> {
        Self::new(self.grid, self.values.iter().map(|v| v * lambda).collect())
    }

    pub fn to_csv(&self) -> String {
        to_csv(&self.grid, &self.values)
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let (grid, values) = from_csv(text)?;
        Self::new(grid, values)
    }
}

/// `t -> t K(1/t)`: the K-functional of the reversed couple.
pub fn reverse_couple(k: &KProfile) -> Result<KProfile> {
    let g = &k.grid;
    let n = g.len();
    let values = if g.is_symmetric() {
        (0..n).map(|i| g.t(i) * k.values[n - 1 - i]).collect()
    } else {
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            let t = g.t(i);
            if g.locate(-g.x(i)).is_none() {
                return Err(Error::Range(format!("1/t = {} leaves the grid", 1.0 / t)));
            }
            v.push(t * k.at(1.0 / t)?);
        }
        v
    };
    Ok(KProfile { grid: *g, values })
}

fn to_csv(grid: &GeometricGrid, values: &[f64]) -> String {
    let mut s = String::from("t,value\n");
    for (i, v) in values.iter().enumerate() {
        let _ = writeln!(s, "{:e},{:e}", grid.t(i), v);
    }
    s
}

fn from_csv(text: &str) -> Result<(GeometricGrid, Vec<f64>)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    match lines.next() {
        Some(h) if h.trim() == "t,value" => {}
        _ => return Err(Error::Param("csv must start with header 't,value'".into())),
    }
    let mut ts = Vec::new();
    let mut vs = Vec::new();
    for (i, line) in lines.enumerate() {
        let (a, b) = line
            .split_once(',')
            .ok_or_else(|| Error::Param(format!("csv line {}: expected 't,value'", i + 2)))?;
        let t: f64 = a.trim().parse().map_err(|_| Error::Param(format!("csv line {}: bad t", i + 2)))?;
        let v: f64 = b.trim().parse().map_err(|_| Error::Param(format!("csv line {}: bad value", i + 2)))?;
        ts.push(t);
        vs.push(v);
    }
    if ts.len() < 2 {
        return Err(Error::Param("csv needs at least two rows".into()));
    }
    let grid = GeometricGrid::new(ts[0], ts[ts.len() - 1], ts.len())?;
    for (i, t) in ts.iter().enumerate() {
        if ((t.ln() - grid.x(i)) / grid.h()).abs() > 1e-6 {
            return Err(Error::Param(format!("csv row {}: t is not on a geometric grid", i + 2)));
        }
    }
    Ok((grid, vs))
}
