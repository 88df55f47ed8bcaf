//! Test functions f* used by the equivalence checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sampling::{gauss_legendre8, Domain, GeometricGrid, StepFunction};

pub const DEFAULT_SEED: u64 = 0x5eed_cafe;

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyMember {
    pub id: String,
    pub fstar: StepFunction,
    /// Power exponent of K(t) = ∫_0^t f* near 0.
    pub kappa: f64,
}

/// Inline member definitions: `pow(r)`, `powlog(r, d)`, `twopow(k0, kinf)`, `chi(a)`, `steps(seed, k)`.
#[derive(Debug, Clone, PartialEq)]
pub enum MemberDef {
    Pow(f64),
    PowLog(f64, f64),
    TwoPow(f64, f64),
    Chi(f64),
    Steps(u64, usize),
}

impl std::fmt::Display for MemberDef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MemberDef::Pow(r) => write!(f, "pow({})", short(*r)),
            MemberDef::PowLog(r, d) => write!(f, "powlog({}, {})", short(*r), short(*d)),
            MemberDef::TwoPow(a, b) => write!(f, "twopow({}, {})", short(*a), short(*b)),
            MemberDef::Chi(a) => write!(f, "chi({})", short(*a)),
            MemberDef::Steps(s, k) => write!(f, "steps({s}, {k})"),
        }
    }
}

/// Six significant digits, so ids stay readable after float arithmetic.
fn short(x: f64) -> f64 {
    format!("{x:.5e}").parse().unwrap_or(x)
}

fn domain_end(grid: &GeometricGrid, domain: Domain) -> f64 {
    match domain {
        Domain::Unit => grid.t_max(),
        Domain::Full => grid.t_max() * (0.5 * grid.h()).exp(),
    }
}

fn cell_edges(grid: &GeometricGrid, domain: Domain) -> Vec<f64> {
    let mut e = vec![0.0];
    e.extend(grid.mid_edges());
    *e.last_mut().unwrap() = domain_end(grid, domain);
    e
}

/// ∫_0^a f by Gauss-Legendre in x = ln s over panels of width 1/kappa reaching 60/kappa below ln a.
fn head(f: &dyn Fn(f64) -> f64, a: f64, kappa: f64) -> f64 {
    let w = 1.0 / kappa.max(1e-3);
    let top = a.ln();
    (0..60)
        .map(|j| {
            let hi = top - j as f64 * w;
            gauss_legendre8(|x| f(x.exp()) * x.exp(), hi - w, hi)
        })
        .sum()
}

fn from_density(grid: &GeometricGrid, domain: Domain, kappa: f64, f: impl Fn(f64) -> f64) -> Result<StepFunction> {
    let edges = cell_edges(grid, domain);
    let h = head(&f, edges[1], kappa);
    Ok(StepFunction::from_density(edges, h, f)?.rearrange())
}

fn ell(s: f64) -> f64 {
    1.0 + s.ln().abs()
}

impl MemberDef {
    pub fn kappa(&self) -> f64 {
        match self {
            MemberDef::Pow(r) | MemberDef::PowLog(r, _) => 1.0 - 1.0 / r,
            MemberDef::TwoPow(k0, _) => *k0,
            MemberDef::Chi(_) | MemberDef::Steps(..) => 1.0,
        }
    }

    pub fn build(&self, grid: &GeometricGrid, domain: Domain) -> Result<FamilyMember> {
        let kappa = self.kappa();
        let fstar = match *self {
            MemberDef::Pow(r) | MemberDef::PowLog(r, _) => {
                if !(r > 1.0) || !r.is_finite() {
                    return Err(Error::Param(format!("{self}: r must be > 1")));
                }
                let d = if let MemberDef::PowLog(_, d) = *self { d } else { 0.0 };
                from_density(grid, domain, kappa, |s| s.powf(-1.0 / r) * ell(s).powf(d))?
            }
            MemberDef::TwoPow(k0, kinf) => {
                if !(k0 > 0.0 && k0 <= 1.0 && kinf > 0.0 && kinf <= 1.0) {
                    return Err(Error::Param(format!("{self}: exponents must lie in (0,1]")));
                }
                from_density(grid, domain, kappa, |s| {
                    if s < 1.0 {
                        s.powf(k0 - 1.0)
                    } else {
                        s.powf(kinf - 1.0)
                    }
                })?
            }
            MemberDef::Chi(a) => StepFunction::chi(a, domain_end(grid, domain))?,
            MemberDef::Steps(seed, k) => random_steps(seed, k, grid, domain)?,
        };
        Ok(FamilyMember { id: self.to_string(), fstar, kappa })
    }
}

/// `k` random levels on log-uniform breakpoints inside the grid, already nonincreasing.
pub fn random_steps(seed: u64, k: usize, grid: &GeometricGrid, domain: Domain) -> Result<StepFunction> {
    if k == 0 {
        return Err(Error::Param("steps needs k >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = grid.log_range();
    let mut cuts: Vec<f64> = (0..k).map(|_| rng.gen_range(lo + 1.0..hi - 1.0)).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut edges = vec![0.0];
    edges.extend(cuts.iter().map(|x| x.exp()));
    let end = domain_end(grid, domain);
    edges.push(end);
    let mut level = 0.0;
    let mut values: Vec<f64> = (0..edges.len() - 1)
        .map(|_| {
            level += rng.gen_range(0.1..10.0);
            level
        })
        .collect();
    values.reverse();
    // the last cell reaches the end of the domain; drop it on the full line so f* has compact support
    if domain == Domain::Full {
        *values.last_mut().unwrap() = 0.0;
    }
    StepFunction::new(edges, values)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyConfig {
    /// Lebesgue exponents of the endpoint spaces, `p_j = 1/(1 - θ_j)`.
    pub p0: f64,
    pub p1: f64,
    /// Members need K(t) ~ t^κ with κ above this value.
    pub theta_crit: f64,
    /// On the full line, K(t) ~ t^κ∞ at infinity needs κ∞ below this value.
    pub theta_top: f64,
    pub seed: u64,
}

pub const EPS: f64 = 0.1;

/// The default family: power-log members filtered by integrability, adaptive members
/// κ = θ_crit + {0.1, 0.2}, four random steps and χ_(0,a) for a in {1e-4, 1e-1}.
pub fn default_family_defs(domain: Domain, cfg: &FamilyConfig) -> Vec<MemberDef> {
    let mut defs = Vec::new();
    let ok = |k: f64| k > cfg.theta_crit + 1e-9 && k < 1.0;
    match domain {
        Domain::Unit => {
            let cands = [
                (cfg.p0 + EPS, 0.0),
                (cfg.p1 - EPS, 1.0),
                (cfg.p1 - EPS, -1.0),
                (2.0, 0.5),
                (2.0, -0.5),
            ];
            for (r, d) in cands {
                if r > 1.0 && ok(1.0 - 1.0 / r) {
                    defs.push(if d == 0.0 { MemberDef::Pow(r) } else { MemberDef::PowLog(r, d) });
                }
            }
            for dk in [0.1, 0.2] {
                let k = cfg.theta_crit + dk;
                if ok(k) {
                    defs.push(MemberDef::Pow(1.0 / (1.0 - k)));
                }
            }
        }
        Domain::Full => {
            let top = cfg.theta_top.min(1.0);
            let mut pairs = vec![];
            for k0 in [cfg.theta_crit + 0.1, cfg.theta_crit + 0.2, 0.5 * (cfg.theta_crit + 1.0)] {
                for kinf in [0.5 * top, top - 0.1] {
                    if ok(k0) && kinf > 0.0 {
                        pairs.push((k0, kinf));
                    }
                }
            }
            defs.extend(pairs.into_iter().map(|(a, b)| MemberDef::TwoPow(a, b)));
        }
    }
    for j in 0..4 {
        defs.push(MemberDef::Steps(cfg.seed.wrapping_add(j), 6));
    }
    defs.push(MemberDef::Chi(1e-4));
    defs.push(MemberDef::Chi(1e-1));
    defs
}

pub fn build_family(defs: &[MemberDef], grid: &GeometricGrid, domain: Domain) -> Result<Vec<FamilyMember>> {
    defs.iter().map(|d| d.build(grid, domain)).collect()
}

/// Parses one inline member definition.
pub fn parse_member(text: &str) -> Result<MemberDef> {
    let t = text.trim();
    let open = t.find('(').ok_or_else(|| Error::Param(format!("member `{t}`: expected name(args)")))?;
    if !t.ends_with(')') {
        return Err(Error::Param(format!("member `{t}`: missing ')'")));
    }
    let name = t[..open].trim();
    let args: Vec<&str> = t[open + 1..t.len() - 1].split(',').map(str::trim).collect();
    let num = |i: usize| -> Result<f64> {
        args.get(i)
            .and_then(|a| a.parse::<f64>().ok())
            .ok_or_else(|| Error::Param(format!("member `{t}`: argument {} is not a number", i + 1)))
    };
    let arity = |n: usize| -> Result<()> {
        if args.len() != n {
            return Err(Error::Param(format!("member `{t}`: {name} takes {n} argument(s)")));
        }
        Ok(())
    };
    match name {
        "pow" => arity(1).and(Ok(MemberDef::Pow(num(0)?))),
        "powlog" => arity(2).and(Ok(MemberDef::PowLog(num(0)?, num(1)?))),
        "twopow" => arity(2).and(Ok(MemberDef::TwoPow(num(0)?, num(1)?))),
        "chi" => arity(1).and(Ok(MemberDef::Chi(num(0)?))),
        "steps" => {
            arity(2)?;
            let seed = args[0].parse::<u64>().map_err(|_| Error::Param(format!("member `{t}`: bad seed")))?;
            let k = args[1].parse::<usize>().map_err(|_| Error::Param(format!("member `{t}`: bad count")))?;
            Ok(MemberDef::Steps(seed, k))
        }
        _ => Err(Error::Unknown(format!("member function `{name}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::peetre_k;

    #[test]
    fn members_are_nonincreasing_with_expected_k() {
        let g = Domain::Unit.grid(1024).unwrap();
        let m = MemberDef::Pow(2.0).build(&g, Domain::Unit).unwrap();
        assert!(m.fstar.is_nonincreasing());
        let k = peetre_k(&m.fstar, &g).unwrap();
        for i in (0..g.len()).step_by(97) {
            let t = g.t(i);
            let want = 2.0 * t.sqrt();
            assert!((k.values[i] - want).abs() < 1e-3 * want, "t={t}");
        }
        let m = MemberDef::PowLog(3.9, -1.0).build(&g, Domain::Unit).unwrap();
        assert!(m.fstar.is_nonincreasing());
    }

    #[test]
    fn default_family_respects_the_filter() {
        let cfg = FamilyConfig { p0: 4.0 / 3.0, p1: 4.0, theta_crit: 0.25, theta_top: 0.75, seed: 7 };
        let defs = default_family_defs(Domain::Unit, &cfg);
        assert!(defs.iter().all(|d| d.kappa() > 0.25));
        assert_eq!(defs.iter().filter(|d| matches!(d, MemberDef::Steps(..))).count(), 4);
        let g = Domain::Unit.grid(512).unwrap();
        let fam = build_family(&defs, &g, Domain::Unit).unwrap();
        assert!(fam.iter().all(|m| m.fstar.is_nonincreasing() && !m.fstar.is_zero()));
        let full = default_family_defs(Domain::Full, &cfg);
        assert!(full.iter().any(|d| matches!(d, MemberDef::TwoPow(..))));
    }

    #[test]
    fn steps_are_seeded() {
        let g = Domain::Full.grid(256).unwrap();
        let a = random_steps(3, 5, &g, Domain::Full).unwrap();
        assert_eq!(a, random_steps(3, 5, &g, Domain::Full).unwrap());
        assert_ne!(a, random_steps(4, 5, &g, Domain::Full).unwrap());
        assert!(a.is_nonincreasing());
    }

    #[test]
    fn parses_members() {
        assert_eq!(parse_member("powlog(2, -0.5)").unwrap(), MemberDef::PowLog(2.0, -0.5));
        assert_eq!(parse_member(" steps(9,4) ").unwrap(), MemberDef::Steps(9, 4));
        assert!(parse_member("pow(1,2)").is_err());
        assert!(parse_member("sin(1)").is_err());
    }
}
