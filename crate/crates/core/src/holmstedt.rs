//! K-functional of the couples (R,R), (L,L), (R,L), (L,R) built over (L1, L∞): the ρ
//! functions, the explicit right-hand sides, and a truncation-based upper bound.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::family::{FamilyConfig, MemberDef};
use crate::rinorm::{
    build_envelope, lower_profile, sv_norm, sv_samples, upper_profile, window_lower_at, window_upper_at, EnvKind,
};
use crate::sampling::{peetre_k, Domain, GeometricGrid, KProfile, StepFunction};
use crate::scalar::{Lq, Scalar};
use crate::spaces::{rl_norm, ExtremeKind, SpaceSpec};
use crate::svcalc::{lognorm_asymptotic, End, NormSide, SvExpr};
use crate::verify::{check_equivalence, EquivalenceReport};

/// Which of R/L each endpoint space is: RR, LL, RL (Y0 = R, Y1 = L) or LR.
pub type CoupleKind = ExtremeKind;

#[derive(Debug, Clone, PartialEq)]
pub struct CoupleParams {
    pub theta0: Scalar,
    pub theta1: Scalar,
    pub a0: SvExpr,
    pub a1: SvExpr,
    pub b0: SvExpr,
    pub b1: SvExpr,
    pub e0: Lq,
    pub e1: Lq,
    pub f0: Lq,
    pub f1: Lq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoupleCase {
    pub kind: CoupleKind,
    pub params: CoupleParams,
    pub domain: Domain,
}

fn is_r(kind: CoupleKind, j: usize) -> bool {
    match kind {
        ExtremeKind::RR => true,
        ExtremeKind::LL => false,
        ExtremeKind::RL => j == 0,
        ExtremeKind::LR => j == 1,
    }
}

impl CoupleCase {
    /// Validates `0 < θ0 < θ1 < 1` and the finiteness hypotheses of the matching formula.
    pub fn new(kind: CoupleKind, params: CoupleParams, domain: Domain) -> Result<Self> {
        let p = &params;
        if !(p.theta0 > Scalar::zero() && p.theta0 < p.theta1 && p.theta1 < Scalar::one()) {
            return Err(Error::Param(format!(
                "theta0 < theta1 required with 0 < theta0 < theta1 < 1, got theta0={}, theta1={}",
                p.theta0, p.theta1
            )));
        }
        let case = CoupleCase { kind, params, domain };
        for j in 0..2 {
            let (b, e) = case.b_e(j);
            let (lo, hi, what) = if is_r(kind, j) {
                (f64::NEG_INFINITY, 0.0, "(0,1)")
            } else if domain == Domain::Full {
                (0.0, f64::INFINITY, "(1,inf)")
            } else {
                continue;
            };
            match sv_norm(b, e, lo, hi) {
                Ok(v) if v.is_finite() => {}
                Ok(_) | Err(Error::Divergent(_)) => {
                    return Err(Error::Divergent(format!("‖b{j}‖ over {what} in {e} is infinite for b{j}={b}")))
                }
                Err(err) => return Err(err),
            }
        }
        Ok(case)
    }

    fn b_e(&self, j: usize) -> (&SvExpr, Lq) {
        if j == 0 {
            (&self.params.b0, self.params.e0)
        } else {
            (&self.params.b1, self.params.e1)
        }
    }

    pub fn theta(&self, j: usize) -> Scalar {
        if j == 0 {
            self.params.theta0
        } else {
            self.params.theta1
        }
    }

    /// Endpoint space Y_j.
    pub fn space(&self, j: usize) -> SpaceSpec {
        let p = &self.params;
        let (theta, b, e, a, f) = if j == 0 {
            (p.theta0, p.b0.clone(), p.e0, p.a0.clone(), p.f0)
        } else {
            (p.theta1, p.b1.clone(), p.e1, p.a1.clone(), p.f1)
        };
        if is_r(self.kind, j) {
            SpaceSpec::R { theta, b, e, a, f }
        } else {
            SpaceSpec::L { theta, b, e, a, f }
        }
    }

    /// Envelope kind used for b_j: (0,u) for an R endpoint, (u,inf) or (u,1) for an L endpoint.
    pub fn env_kind(&self, j: usize) -> EnvKind {
        if is_r(self.kind, j) {
            EnvKind::Lower
        } else if self.domain == Domain::Full {
            EnvKind::UpperToInf
        } else {
            EnvKind::UpperToOne
        }
    }

    /// Tabulated ‖b_j‖ as an SV expression.
    pub fn envelope(&self, j: usize) -> Result<SvExpr> {
        let (b, e) = self.b_e(j);
        Ok(SvExpr::envelope(build_envelope(b, e, self.env_kind(j))?))
    }

    /// Symbolic ℓ-power equivalent of ‖b_j‖ near 0 when b_j is a broken log power.
    pub fn envelope_symbolic(&self, j: usize) -> Option<SvExpr> {
        let (b, e) = self.b_e(j);
        let (sigma, _) = b.as_log_pow()?;
        let side = if is_r(self.kind, j) { NormSide::Lower } else { NormSide::Upper };
        lognorm_asymptotic(sigma, e, side).ok()
    }
}

/// ρ(u) = u^γ · sv(u) with γ = θ1 - θ0.
#[derive(Debug, Clone)]
pub struct RhoFunction {
    pub gamma: Scalar,
    pub sv: SvExpr,
    pub env0: SvExpr,
    pub env1: SvExpr,
    pub symbolic: Option<SvExpr>,
}

impl RhoFunction {
    pub fn eval_log(&self, x: f64) -> Result<f64> {
        Ok(self.gamma.to_f64() * x + self.sv.eval_log(x)?)
    }

    pub fn eval(&self, u: f64) -> Result<f64> {
        if !(u > 0.0) {
            return Err(Error::Domain(format!("rho queried at u={u}")));
        }
        Ok(self.eval_log(u.ln())?.exp())
    }

    /// Symbolic ρ at u, if attached.
    pub fn eval_symbolic(&self, u: f64) -> Option<f64> {
        let s = self.symbolic.as_ref()?;
        Some((self.gamma.to_f64() * u.ln() + s.eval_log(u.ln()).ok()?).exp())
    }

    /// b∘ρ as an SV expression.
    pub fn compose(&self, b: &SvExpr) -> Result<SvExpr> {
        SvExpr::compose(b, self.gamma, &self.sv)
    }

    pub fn samples(&self, grid: &GeometricGrid) -> Result<Vec<f64>> {
        (0..grid.len()).map(|i| Ok(self.eval_log(grid.x(i))?.exp())).collect()
    }

    /// Strictly increasing on the grid up to relative tolerance `tol`.
    pub fn is_increasing(&self, grid: &GeometricGrid, tol: f64) -> Result<bool> {
        let v = self.samples(grid)?;
        Ok(v.windows(2).all(|w| w[1] > w[0] * (1.0 - tol)))
    }

    /// Log-exponent of the symbolic SV part near 0.
    pub fn symbolic_log_exponent(&self) -> Option<Scalar> {
        Some(self.symbolic.as_ref()?.log_exponent(End::Zero))
    }

    /// u -> ρ(u) inverted by bisection over the grid nodes; ties go to the smaller u.
    pub fn invert_on(&self, grid: &GeometricGrid, value: f64) -> Result<usize> {
        let v = self.samples(grid)?;
        Ok(v.partition_point(|x| *x < value).min(v.len() - 1))
    }
}

pub fn make_rho(case: &CoupleCase) -> Result<RhoFunction> {
    let p = &case.params;
    let env0 = case.envelope(0)?;
    let env1 = case.envelope(1)?;
    let sv = p.a0.mul(&env0).mul(&p.a1.mul(&env1).recip());
    let symbolic = match (case.envelope_symbolic(0), case.envelope_symbolic(1)) {
        (Some(s0), Some(s1)) => Some(p.a0.mul(&s0).mul(&p.a1.mul(&s1).recip()).simplify()),
        _ => None,
    };
    Ok(RhoFunction { gamma: p.theta1 - p.theta0, sv, env0, env1, symbolic })
}

/// Per-endpoint node data shared by the right-hand side and the upper bound.
struct Endpoint {
    /// t^{-θ} a(t)
    w: Vec<f64>,
    b: Vec<f64>,
    env: Vec<f64>,
    e: Lq,
    f: Lq,
    r: bool,
}

fn endpoints(case: &CoupleCase, rho: &RhoFunction, grid: &GeometricGrid) -> Result<[Endpoint; 2]> {
    let p = &case.params;
    let mk = |j: usize| -> Result<Endpoint> {
        let (theta, a, b, e, f, env) = if j == 0 {
            (p.theta0, &p.a0, &p.b0, p.e0, p.f0, &rho.env0)
        } else {
            (p.theta1, &p.a1, &p.b1, p.e1, p.f1, &rho.env1)
        };
        let th = theta.to_f64();
        let w = (0..grid.len())
            .map(|i| Ok((-th * grid.x(i) + a.eval_log(grid.x(i))?).exp()))
            .collect::<Result<Vec<f64>>>()?;
        Ok(Endpoint { w, b: sv_samples(b, grid)?, env: sv_samples(env, grid)?, e, f, r: is_r(case.kind, j) })
    };
    Ok([mk(0)?, mk(1)?])
}

fn times(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

/// The explicit right-hand side at every node u of the profile's grid.
pub fn holmstedt_rhs_profile(case: &CoupleCase, rho: &RhoFunction, k: &KProfile) -> Result<Vec<f64>> {
    let all: Vec<usize> = (0..k.grid.len()).collect();
    holmstedt_rhs_at(case, rho, k, &all)
}

/// The explicit right-hand side at the listed nodes; the windowed terms cost O(n) per node.
pub fn holmstedt_rhs_at(case: &CoupleCase, rho: &RhoFunction, k: &KProfile, nodes: &[usize]) -> Result<Vec<f64>> {
    let grid = &k.grid;
    let h = grid.h();
    let [y0, y1] = endpoints(case, rho, grid)?;
    let g0 = times(&y0.w, &k.values);
    let g1 = times(&y1.w, &k.values);
    let rv = rho.samples(grid)?;
    let pick = |v: Vec<f64>| -> Vec<f64> { nodes.iter().map(|&i| v[i]).collect() };
    // first endpoint: R gives P0; L gives T1 + T2
    let first = if y0.r {
        window_lower_at(&y0.b, &g0, y0.f, y0.e, h, nodes)
    } else {
        let inner = lower_profile(&g0, y0.f, h);
        let t1 = lower_profile(&times(&y0.b, &inner), y0.e, h);
        pick(t1.iter().zip(&y0.env).zip(&inner).map(|((a, env), i)| a + env * i).collect())
    };
    // second endpoint: R gives R1 + Q1; L gives the windowed (u,t) term
    let second = if y1.r {
        let inner = upper_profile(&g1, y1.f, h);
        let q1 = upper_profile(&times(&y1.b, &inner), y1.e, h);
        pick(q1.iter().zip(&y1.env).zip(&inner).map(|((q, env), i)| q + env * i).collect())
    } else {
        window_upper_at(&y1.b, &g1, y1.f, y1.e, h, nodes)
    };
    Ok(nodes.iter().zip(first.iter().zip(&second)).map(|(&i, (a, b))| a + rv[i] * b).collect())
}

/// Right-hand side at an arbitrary u inside the grid (log-log interpolation between nodes).
pub fn holmstedt_rhs(case: &CoupleCase, rho: &RhoFunction, k: &KProfile, u: f64) -> Result<f64> {
    let prof = holmstedt_rhs_profile(case, rho, k)?;
    interp_loglog(&k.grid, &prof, u)
}

pub fn interp_loglog(grid: &GeometricGrid, v: &[f64], u: f64) -> Result<f64> {
    if !(u > 0.0) {
        return Err(Error::Domain(format!("u={u}")));
    }
    let f = grid.locate(u.ln()).ok_or_else(|| Error::Range(format!("u={u} outside the grid")))?;
    let i = (f.floor() as usize).min(v.len() - 2);
    let w = f - i as f64;
    if v[i] <= 0.0 || v[i + 1] <= 0.0 {
        return Ok(v[i] * (1.0 - w) + v[i + 1] * w);
    }
    Ok((v[i].ln() * (1.0 - w) + v[i + 1].ln() * w).exp())
}

/// Truncation levels: f* node values at about `per_decade` per decade, plus 0 and inf.
pub fn tau_candidates(fstar: &StepFunction, grid: &GeometricGrid, per_decade: f64) -> Vec<f64> {
    let stride = ((10f64.ln() / grid.h()) / per_decade).round().max(1.0) as usize;
    let nv = fstar.node_values(grid).values;
    let mut taus = vec![0.0];
    taus.extend(nv.iter().step_by(stride).copied().filter(|v| *v > 0.0));
    taus.push(f64::INFINITY);
    taus.sort_by(f64::total_cmp);
    taus.dedup();
    taus
}

pub const TAU_PER_DECADE: f64 = 32.0;

/// Upper bound for K(ρ(u), f; Y0, Y1) at every node u: the minimum over truncations
/// f = (f* - τ)_+ + min(f*, τ) of ‖g‖_{Y0} + ρ(u) ‖h‖_{Y1}.
pub fn couple_k_upper_profile(
    case: &CoupleCase,
    rho: &RhoFunction,
    fstar: &StepFunction,
    grid: &GeometricGrid,
) -> Result<Vec<f64>> {
    if !fstar.is_nonincreasing() {
        return Err(Error::Invariant("f* must be nonincreasing".into()));
    }
    let h = grid.h();
    let ys = endpoints(case, rho, grid)?;
    let ts = grid.ts();
    let kf: Vec<f64> = ts.iter().map(|t| fstar.integral_to(*t)).collect();
    let taus = tau_candidates(fstar, grid, TAU_PER_DECADE);
    let norms: Vec<(f64, f64)> = taus
        .par_iter()
        .map(|&tau| {
            let (kg, kh): (Vec<f64>, Vec<f64>) = if tau.is_infinite() {
                (vec![0.0; kf.len()], kf.clone())
            } else {
                let m = fstar.distribution(tau);
                let fm = fstar.integral_to(m);
                ts.iter()
                    .zip(&kf)
                    .map(|(t, k)| {
                        let g = if *t < m { k - tau * t } else { fm - tau * m };
                        let g = g.max(0.0);
                        (g, (k - g).max(0.0))
                    })
                    .unzip()
            };
            let n = |y: &Endpoint, kk: &[f64]| rl_norm(y.r, &y.b, &times(&y.w, kk), y.e, y.f, h);
            (n(&ys[0], &kg), n(&ys[1], &kh))
        })
        .collect();
    let rv = rho.samples(grid)?;
    Ok(rv.iter().map(|r| norms.iter().map(|(a, b)| a + r * b).fold(f64::INFINITY, f64::min)).collect())
}

pub fn couple_k_upper(
    case: &CoupleCase,
    rho: &RhoFunction,
    fstar: &StepFunction,
    grid: &GeometricGrid,
    u: f64,
) -> Result<f64> {
    let prof = couple_k_upper_profile(case, rho, fstar, grid)?;
    interp_loglog(grid, &prof, u)
}

/// Node range of the u-sweep: the grid minus `exclude_decades` at each end.
pub fn u_sweep(grid: &GeometricGrid, exclude_decades: f64) -> std::ops::Range<usize> {
    let d = (exclude_decades * 10f64.ln() / grid.h()).round() as usize;
    let n = grid.len();
    if 2 * d >= n {
        return n / 2..n / 2 + 1;
    }
    d..n - d
}

/// Trivial-weight and log-weight instances of each kind.
pub fn instances() -> Vec<(String, CoupleCase)> {
    let s = Scalar::ratio;
    let mut out = Vec::new();
    for kind in [ExtremeKind::RR, ExtremeKind::LL, ExtremeKind::RL, ExtremeKind::LR] {
        let trivial = CoupleParams {
            theta0: s(1, 4),
            theta1: s(3, 4),
            a0: SvExpr::one(),
            a1: SvExpr::one(),
            b0: SvExpr::one(),
            b1: SvExpr::one(),
            e0: Lq::Inf,
            e1: Lq::Inf,
            f0: Lq::int(2),
            f1: Lq::int(2),
        };
        out.push((
            format!("holmstedt.{}.trivial", kind.name()),
            CoupleCase::new(kind, trivial, Domain::Full).expect("trivial instance is valid"),
        ));
        out.push((
            format!("holmstedt.{}.log", kind.name()),
            CoupleCase::new(kind, log_weight_params(s(3, 4)), Domain::Unit).expect("log instance is valid"),
        ));
    }
    out
}

/// θ0 = 1/4, b0 = ℓ^-1 in L2, a0 = ℓ^{1/2} in L1; b1 = ℓ^-2 in L1, a1 = 1 in L2.
pub fn log_weight_params(theta1: Scalar) -> CoupleParams {
    let s = Scalar::ratio;
    CoupleParams {
        theta0: s(1, 4),
        theta1,
        a0: SvExpr::l(s(1, 2)),
        a1: SvExpr::one(),
        b0: SvExpr::l(s(-1, 1)),
        b1: SvExpr::l(s(-2, 1)),
        e0: Lq::int(2),
        e1: Lq::int(1),
        f0: Lq::int(1),
        f1: Lq::int(2),
    }
}

/// Sweep points: about `per_decade` nodes per decade inside the u-sweep, the same u values at any n.
pub fn sweep_nodes(grid: &GeometricGrid, exclude_decades: f64, per_decade: f64) -> Vec<usize> {
    let r = u_sweep(grid, exclude_decades);
    let (x0, x1) = (grid.x(r.start), grid.x(r.end - 1));
    let step = 10f64.ln() / per_decade;
    let m = ((x1 - x0) / step).floor() as usize;
    let mut out: Vec<usize> = (0..=m).map(|j| grid.nearest(x0 + j as f64 * step)).collect();
    out.dedup();
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub exclude_decades: f64,
    pub per_decade: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { exclude_decades: 1.0, per_decade: 8.0 }
    }
}

/// Family settings matched to the couple: p_j = 1/(1 - θ_j), κ in (θ0, 1), κ∞ below θ1.
pub fn family_config(case: &CoupleCase, seed: u64) -> FamilyConfig {
    let (t0, t1) = (case.params.theta0.to_f64(), case.params.theta1.to_f64());
    FamilyConfig { p0: 1.0 / (1.0 - t0), p1: 1.0 / (1.0 - t1), theta_crit: t0, theta_top: t1, seed }
}

/// couple_k_upper / holmstedt_rhs over the sweep for every family member at one resolution.
pub fn holmstedt_report(
    label: &str,
    case: &CoupleCase,
    rho: &RhoFunction,
    defs: &[MemberDef],
    grid: &GeometricGrid,
    sweep: SweepConfig,
    threshold: f64,
) -> Result<EquivalenceReport> {
    let nodes = sweep_nodes(grid, sweep.exclude_decades, sweep.per_decade);
    let per_member: Vec<Vec<(String, f64, f64)>> = defs
        .par_iter()
        .map(|d| -> Result<Vec<(String, f64, f64)>> {
            let m = d.build(grid, case.domain)?;
            let k = peetre_k(&m.fstar, grid)?;
            let rhs = holmstedt_rhs_at(case, rho, &k, &nodes)?;
            let up = couple_k_upper_profile(case, rho, &m.fstar, grid)?;
            Ok(nodes.iter().zip(&rhs).map(|(&i, r)| (format!("{}@{:.3e}", m.id, grid.t(i)), up[i], *r)).collect())
        })
        .collect::<Result<_>>()?;
    let (l, r): (Vec<_>, Vec<_>) =
        per_member.into_iter().flatten().map(|(i, a, b)| ((i.clone(), a), (i, b))).unzip();
    check_equivalence(label, &l, &r, threshold)
}

/// Holmstedt certification at n and 2n.
pub fn certify(
    label: &str,
    case: &CoupleCase,
    defs: &[MemberDef],
    n: usize,
    sweep: SweepConfig,
    threshold: f64,
) -> Result<EquivalenceReport> {
    let rho = make_rho(case)?;
    let g = case.domain.grid(n)?;
    let coarse = holmstedt_report(label, case, &rho, defs, &g, sweep, threshold)?;
    let fine = holmstedt_report(label, case, &rho, defs, &g.refine(), sweep, threshold)?;
    Ok(coarse.with_refinement(&fine))
}

/// Certify one couple with its default family.
pub fn run_case(label: &str, case: &CoupleCase, n: usize, seed: u64, threshold: f64) -> Result<EquivalenceReport> {
    let defs = crate::family::default_family_defs(case.domain, &family_config(case, seed));
    Ok(certify(label, case, &defs, n, SweepConfig::default(), threshold)?.with_seed(seed))
}

/// All built-in instances, in order.
pub fn run_instances(n: usize, seed: u64, threshold: f64) -> Result<Vec<EquivalenceReport>> {
    instances().iter().map(|(l, c)| run_case(l, c, n, seed, threshold)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trivial(kind: CoupleKind) -> CoupleCase {
        instances().into_iter().find(|(l, _)| *l == format!("holmstedt.{}.trivial", kind.name())).unwrap().1
    }

    #[test]
    fn rejects_bad_thetas_and_divergent_weights() {
        let mut p = log_weight_params(Scalar::ratio(3, 4));
        p.theta1 = Scalar::ratio(1, 8);
        let e = CoupleCase::new(ExtremeKind::RR, p, Domain::Unit).unwrap_err();
        assert!(e.to_string().contains("theta0 < theta1"));
        let mut p = log_weight_params(Scalar::ratio(3, 4));
        p.b0 = SvExpr::one();
        p.e0 = Lq::int(1);
        assert!(matches!(CoupleCase::new(ExtremeKind::RR, p, Domain::Unit), Err(Error::Divergent(_))));
    }

    #[test]
    fn trivial_rho_is_pure_power() {
        let case = trivial(ExtremeKind::RR);
        let rho = make_rho(&case).unwrap();
        for u in [1e-6f64, 0.3, 1.0, 50.0] {
            let want = u.powf(0.5);
            assert!((rho.eval(u).unwrap() - want).abs() < 1e-9 * want);
        }
        assert_eq!(rho.symbolic_log_exponent(), Some(Scalar::zero()));
    }

    #[test]
    fn zero_and_homogeneity() {
        let g = Domain::Full.grid(256).unwrap();
        for kind in [ExtremeKind::RR, ExtremeKind::LL, ExtremeKind::RL, ExtremeKind::LR] {
            let case = trivial(kind);
            let rho = make_rho(&case).unwrap();
            let zero = KProfile::new(g, vec![0.0; g.len()]).unwrap();
            assert!(holmstedt_rhs_profile(&case, &rho, &zero).unwrap().iter().all(|v| *v == 0.0));
            let k = KProfile::from_fn(g, |t| t.min(1.0)).unwrap();
            let a = holmstedt_rhs_profile(&case, &rho, &k).unwrap();
            let b = holmstedt_rhs_profile(&case, &rho, &k.scale(2.0).unwrap()).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((2.0 * x - y).abs() <= 1e-12 * y);
            }
            let z = StepFunction::zero(1e9);
            assert!(couple_k_upper_profile(&case, &rho, &z, &g).unwrap().iter().all(|v| *v == 0.0));
        }
    }
}
