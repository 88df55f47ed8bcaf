//! `kinterp`: evaluate norms, emit K-profiles, run equivalence checks and aggregate reports.
//!
//! Exit codes: 0 all pass, 1 any fail, 2 inconclusive, 3 usage error.

mod scenario;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kinterp::dsl::{self, Parsed};
use kinterp::family::{default_family_defs, parse_member, MemberDef, DEFAULT_SEED};
use kinterp::holmstedt::{self, CoupleCase, SweepConfig};
use kinterp::reiteration::{self, ReiterationCase};
use kinterp::report::{member_csv, ratio_svg, read_jsonl, to_jsonl};
use kinterp::sampling::peetre_k;
use kinterp::spaces::{space_norm, NormInput, SpaceSpec};
use kinterp::verify::{self, overall, summary_csv, EquivalenceReport, Verdict, PIPELINE_THRESHOLD};
use kinterp::{Domain, Error, Scalar};
use scenario::{split_members, Scenario};

const DEFAULT_N: usize = 2048;

#[derive(Parser, Debug)]
#[command(name = "kinterp", version, about = "Numerical checks for real interpolation with slowly varying weights")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct Opts {
    /// Grid size, as `n=2048` or `2048`
    #[arg(long, global = true)]
    grid: Option<String>,
    #[arg(long, global = true, value_parser = ["unit", "full"])]
    domain: Option<String>,
    /// Spread (or C_max) threshold for check commands
    #[arg(long, global = true)]
    threshold: Option<f64>,
    /// Also evaluate at 2n (checks always do)
    #[arg(long, global = true)]
    refine: bool,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for reports.jsonl, summary.csv, members.csv, ratio.svg
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Scenario file of `[section]` / `key = value` lines
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Print the norm of one family member in one space
    EvalNorm {
        #[arg(long)]
        spec: Option<String>,
        #[arg(long)]
        member: Option<String>,
    },
    /// Emit the K-profile of one member as `t,value` CSV
    KProfile {
        #[arg(long)]
        member: Option<String>,
    },
    Check {
        #[command(subcommand)]
        what: CheckCmd,
    },
    Suite {
        #[command(subcommand)]
        what: SuiteCmd,
    },
    /// Aggregate a JSON-lines report stream into CSV (and SVG with --svg)
    Report {
        input: PathBuf,
        #[arg(long)]
        svg: bool,
    },
}

#[derive(Subcommand, Debug)]
enum CheckCmd {
    /// Couple K-functional against the Holmstedt-type formula
    Holmstedt {
        /// Built-in instance label (e.g. holmstedt.RL.log) or a couple in DSL form
        #[arg(long)]
        case: Option<String>,
    },
    /// Reiterated norm against the predicted target space
    Reiteration {
        /// thmRR.a ... thmLR.c
        #[arg(long)]
        theorem: Option<String>,
        /// cor55, cor57, cor1 or cor2
        #[arg(long)]
        preset: Option<String>,
        /// With --preset and no --theorem: 0, 1/2 or 1
        #[arg(long)]
        theta: Option<String>,
        /// reit(...) in DSL form
        #[arg(long)]
        case: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum SuiteCmd {
    Lemmas {
        /// Comma separated catalog ids (default: all)
        #[arg(long, value_delimiter = ',')]
        ids: Vec<String>,
    },
    Corollaries,
    Holmstedt,
    Theorems,
}

enum Fail {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::Syntax { .. }
            | Error::Param(_)
            | Error::Unknown(_)
            | Error::Divergent(_)
            | Error::Range(_)
            | Error::Io(_) => Fail::Usage(e.to_string()),
            other => Fail::Runtime(other.to_string()),
        }
    }
}

fn usage(msg: impl Into<String>) -> Fail {
    Fail::Usage(msg.into())
}

/// Parse DSL text, rendering the caret diagnostic into the message.
fn parse_dsl(src: &str, origin: &str) -> Result<Parsed, Fail> {
    dsl::parse_spec(src).map_err(|e| match dsl::caret(src, &e) {
        Some(c) => usage(format!("{origin}: {e}\n{c}")),
        None => usage(format!("{origin}: {e}")),
    })
}

enum Outcome {
    Done,
    Reports(Vec<EquivalenceReport>),
}

struct Ctx {
    opts: Opts,
    scn: Scenario,
}

impl Ctx {
    fn n(&self) -> Result<usize, Fail> {
        let raw = match (&self.opts.grid, self.scn.get("grid.n")) {
            (Some(g), _) => g.clone(),
            (None, Some(v)) => v.to_string(),
            (None, None) => return Ok(DEFAULT_N),
        };
        let v = raw.trim().strip_prefix("n=").unwrap_or(raw.trim());
        match v.trim().parse::<usize>() {
            Ok(n) if (16..=1 << 20).contains(&n) => Ok(n),
            _ => Err(usage(format!("--grid: expected n=<16..1048576>, got '{raw}'"))),
        }
    }

    fn domain(&self) -> Result<Domain, Fail> {
        match (&self.opts.domain, self.scn.get("grid.domain")) {
            (Some(d), _) => Ok(Domain::parse(d)?),
            (None, Some(d)) => Ok(Domain::parse(d)?),
            (None, None) => Ok(Domain::Unit),
        }
    }

    fn threshold(&self) -> Result<f64, Fail> {
        let t = match (self.opts.threshold, self.scn.get("check.threshold")) {
            (Some(t), _) => t,
            (None, Some(v)) => v.parse().map_err(|_| usage(format!("check.threshold: not a number: '{v}'")))?,
            (None, None) => PIPELINE_THRESHOLD,
        };
        if t.is_finite() && t > 1.0 {
            Ok(t)
        } else {
            Err(usage(format!("threshold must be a finite number above 1, got {t}")))
        }
    }

    fn seed(&self) -> Result<u64, Fail> {
        match (self.opts.seed, self.scn.get("check.seed")) {
            (Some(s), _) => Ok(s),
            (None, Some(v)) => v.parse().map_err(|_| usage(format!("check.seed: not an integer: '{v}'"))),
            (None, None) => Ok(DEFAULT_SEED),
        }
    }

    fn refine(&self) -> Result<bool, Fail> {
        match self.scn.get("check.refine") {
            _ if self.opts.refine => Ok(true),
            None => Ok(false),
            Some("true") => Ok(true),
            Some("false") => Ok(false),
            Some(v) => Err(usage(format!("check.refine: expected true or false, got '{v}'"))),
        }
    }

    fn out(&self) -> Option<PathBuf> {
        self.opts.out.clone().or_else(|| self.scn.get("output.out").map(PathBuf::from))
    }

    /// Members from the scenario, if any.
    fn members(&self) -> Result<Option<Vec<MemberDef>>, Fail> {
        match self.scn.get("family.members") {
            None => Ok(None),
            Some(v) => {
                let defs = split_members(v).into_iter().map(parse_member).collect::<Result<Vec<_>, _>>()?;
                if defs.is_empty() {
                    return Err(usage("family.members is empty"));
                }
                Ok(Some(defs))
            }
        }
    }

    fn member(&self, flag: &Option<String>) -> Result<MemberDef, Fail> {
        if let Some(m) = flag {
            return Ok(parse_member(m)?);
        }
        match self.members()? {
            Some(v) => Ok(v[0].clone()),
            None => Err(usage("no member given: use --member or family.members")),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => 0,
                _ => 3,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Reports(reports)) => {
            let v = overall(&reports);
            if let Some(r) = reports.iter().find(|r| r.verdict == Verdict::Fail) {
                eprintln!("first failing: {}", r.label);
            } else if let Some(r) = reports.iter().find(|r| r.verdict == Verdict::Inconclusive) {
                eprintln!("first inconclusive: {}", r.label);
            }
            ExitCode::from(match v {
                Verdict::Pass => 0,
                Verdict::Fail => 1,
                Verdict::Inconclusive => 2,
            })
        }
        Err(Fail::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
        Err(Fail::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<Outcome, Fail> {
    let scn = match &cli.opts.scenario {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            Scenario::parse(&text).map_err(|e| usage(format!("{}: {e}", p.display())))?
        }
        None => Scenario::default(),
    };
    let ctx = Ctx { opts: cli.opts, scn };
    match cli.cmd {
        Cmd::EvalNorm { spec, member } => eval_norm(&ctx, spec, member),
        Cmd::KProfile { member } => k_profile(&ctx, member),
        Cmd::Check { what: CheckCmd::Holmstedt { case } } => check_holmstedt(&ctx, case),
        Cmd::Check { what: CheckCmd::Reiteration { theorem, preset, theta, case } } => {
            check_reiteration(&ctx, theorem, preset, theta, case)
        }
        Cmd::Suite { what } => suite(&ctx, what),
        Cmd::Report { input, svg } => report(&ctx, &input, svg),
    }
}

/// Twelve significant digits, so exact values print exactly.
fn fmt_norm(x: f64) -> String {
    let r: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    format!("{r}")
}

fn eval_norm(ctx: &Ctx, spec: Option<String>, member: Option<String>) -> Result<Outcome, Fail> {
    let (text, origin) = match (spec, ctx.scn.get("case.spec")) {
        (Some(s), _) => (s, "--spec".to_string()),
        (None, Some(s)) => (s.to_string(), format!("case.spec (line {})", ctx.scn.line("case.spec").unwrap_or(0))),
        (None, None) => return Err(usage("no space given: use --spec or case.spec")),
    };
    let spec: SpaceSpec = match parse_dsl(&text, &origin)? {
        Parsed::Space(s) => s,
        _ => return Err(usage(format!("{origin}: expected a space spec"))),
    };
    let def = ctx.member(&member)?;
    let domain = ctx.domain()?;
    let n = ctx.n()?;
    let sizes: Vec<usize> = if ctx.refine()? { vec![n, 2 * n] } else { vec![n] };
    for n in sizes {
        let grid = domain.grid(n)?;
        let m = def.build(&grid, domain)?;
        let v = space_norm(&spec, NormInput::FStar(&m.fstar, &grid))?;
        if ctx.refine()? {
            println!("n={n} {}", fmt_norm(v));
        } else {
            println!("{}", fmt_norm(v));
        }
    }
    Ok(Outcome::Done)
}

fn k_profile(ctx: &Ctx, member: Option<String>) -> Result<Outcome, Fail> {
    let def = ctx.member(&member)?;
    let domain = ctx.domain()?;
    let grid = domain.grid(ctx.n()?)?;
    let m = def.build(&grid, domain)?;
    let csv = peetre_k(&m.fstar, &grid)?.to_csv();
    match ctx.out() {
        Some(dir) => write_file(&dir, "kprofile.csv", &csv)?,
        None => print!("{csv}"),
    }
    Ok(Outcome::Done)
}

fn couple_from(ctx: &Ctx, case: Option<String>) -> Result<Vec<(String, CoupleCase)>, Fail> {
    let text = case.or_else(|| ctx.scn.get("case.couple").map(str::to_string));
    let Some(text) = text else { return Ok(holmstedt::instances()) };
    if let Some(found) = holmstedt::instances().into_iter().find(|(l, _)| *l == text) {
        return Ok(vec![found]);
    }
    if !text.contains('(') {
        let labels: Vec<String> = holmstedt::instances().into_iter().map(|(l, _)| l).collect();
        return Err(usage(format!("unknown case '{text}'; built-in cases: {}", labels.join(", "))));
    }
    match parse_dsl(&text, "--case")? {
        Parsed::Couple(c) => Ok(vec![(format!("holmstedt.{}", c.kind.name()), c)]),
        _ => Err(usage("--case: expected a couple such as RR(theta0=..., theta1=..., ...)")),
    }
}

fn check_holmstedt(ctx: &Ctx, case: Option<String>) -> Result<Outcome, Fail> {
    let cases = couple_from(ctx, case)?;
    let (n, seed, th) = (ctx.n()?, ctx.seed()?, ctx.threshold()?);
    let custom = ctx.members()?;
    let mut reports = Vec::new();
    for (label, c) in &cases {
        let defs = match &custom {
            Some(d) => d.clone(),
            None => default_family_defs(c.domain, &holmstedt::family_config(c, seed)),
        };
        let r = holmstedt::certify(label, c, &defs, n, SweepConfig::default(), th)?.with_seed(seed);
        reports.push(r);
    }
    emit(ctx, reports)
}

fn parse_theta(s: &str) -> Result<Scalar, Fail> {
    Scalar::parse(s).map_err(|e| usage(format!("--theta: {e}")))
}

fn check_reiteration(
    ctx: &Ctx,
    theorem: Option<String>,
    preset: Option<String>,
    theta: Option<String>,
    case: Option<String>,
) -> Result<Outcome, Fail> {
    let theorem = theorem.or_else(|| ctx.scn.get("case.theorem").map(str::to_string));
    let preset = preset.or_else(|| ctx.scn.get("case.preset").map(str::to_string));
    let theta = theta.or_else(|| ctx.scn.get("case.theta").map(str::to_string));
    let case = case.or_else(|| ctx.scn.get("case.reiteration").map(str::to_string));
    let (label, rc): (String, ReiterationCase) = match (case, theorem, preset) {
        (Some(text), _, _) => match parse_dsl(&text, "--case")? {
            Parsed::Reiteration(r) => (r.theorem(), r),
            _ => return Err(usage("--case: expected reit(couple=..., theta=..., b=..., E=...)")),
        },
        (None, Some(id), None) => {
            let (kind, branch) = reiteration::parse_theorem(&id)?;
            (id, reiteration::theorem_instance(kind, branch)?)
        }
        (None, thm, Some(p)) => {
            let theta = match (&thm, theta) {
                (Some(id), None) => match reiteration::parse_theorem(id)?.1 {
                    reiteration::Branch::A => Scalar::ratio(1, 2),
                    reiteration::Branch::B => Scalar::zero(),
                    reiteration::Branch::C => Scalar::one(),
                },
                (Some(_), Some(_)) => return Err(usage("--theta conflicts with --theorem; the branch fixes theta")),
                (None, Some(t)) => parse_theta(&t)?,
                (None, None) => return Err(usage("--preset needs --theorem or --theta")),
            };
            let rc = reiteration::preset_case(&p, theta)?;
            if let Some(id) = &thm {
                if rc.theorem() != *id {
                    return Err(usage(format!("preset {p} at theta={theta} is an instance of {}, not {id}", rc.theorem())));
                }
            }
            (format!("{p}.theta={theta}"), rc)
        }
        (None, None, None) => return Err(usage("give --theorem, --preset or --case")),
    };
    let (n, seed, th) = (ctx.n()?, ctx.seed()?, ctx.threshold()?);
    let defs = match ctx.members()? {
        Some(d) => d,
        None => default_family_defs(rc.couple.domain, &reiteration::family_config(&rc, seed)),
    };
    let r = reiteration::check_reiteration(&label, &rc, &defs, n, SweepConfig::default(), th)?.with_seed(seed);
    emit(ctx, vec![r])
}

fn suite(ctx: &Ctx, what: SuiteCmd) -> Result<Outcome, Fail> {
    let seed = ctx.seed()?;
    let reports = match what {
        SuiteCmd::Lemmas { ids } => {
            let ids: Vec<&str> = if ids.is_empty() { verify::CATALOG.to_vec() } else { ids.iter().map(String::as_str).collect() };
            if let Some(bad) = ids.iter().find(|i| !verify::CATALOG.contains(i)) {
                return Err(usage(format!("unknown lemma id '{bad}'; catalog: {}", verify::CATALOG.join(", "))));
            }
            match ctx.opts.grid.is_some() || ctx.scn.get("grid.n").is_some() {
                true => verify::run_lemma_suite_at(&ids, ctx.n()?)?,
                false => verify::run_lemma_suite(&ids)?,
            }
        }
        SuiteCmd::Corollaries => reiteration::run_corollaries(ctx.n()?, seed, ctx.threshold()?)?,
        SuiteCmd::Holmstedt => holmstedt::run_instances(ctx.n()?, seed, ctx.threshold()?)?,
        SuiteCmd::Theorems => {
            let (n, th) = (ctx.n()?, ctx.threshold()?);
            reiteration::theorem_ids()
                .iter()
                .map(|id| reiteration::run_theorem(id, n, seed, th))
                .collect::<Result<_, _>>()?
        }
    };
    emit(ctx, reports)
}

fn report(ctx: &Ctx, input: &Path, svg: bool) -> Result<Outcome, Fail> {
    let text = fs::read_to_string(input).map_err(|e| usage(format!("{}: {e}", input.display())))?;
    let reports = read_jsonl(&text).map_err(|e| usage(format!("{}: {e}", input.display())))?;
    match ctx.out() {
        Some(dir) => {
            write_file(&dir, "summary.csv", &summary_csv(&reports))?;
            write_file(&dir, "members.csv", &member_csv(&reports))?;
            if svg {
                write_file(&dir, "ratio.svg", &ratio_svg(&reports))?;
            }
        }
        None => print!("{}", summary_csv(&reports)),
    }
    Ok(Outcome::Reports(reports))
}

fn write_file(dir: &Path, name: &str, body: &str) -> Result<(), Fail> {
    fs::create_dir_all(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
    let p = dir.join(name);
    fs::write(&p, body).map_err(|e| usage(format!("{}: {e}", p.display())))
}

fn emit(ctx: &Ctx, reports: Vec<EquivalenceReport>) -> Result<Outcome, Fail> {
    for r in &reports {
        println!("{}", r.summary());
    }
    if let Some(dir) = ctx.out() {
        write_file(&dir, "reports.jsonl", &to_jsonl(&reports))?;
        write_file(&dir, "summary.csv", &summary_csv(&reports))?;
        write_file(&dir, "members.csv", &member_csv(&reports))?;
        write_file(&dir, "ratio.svg", &ratio_svg(&reports))?;
    }
    Ok(Outcome::Reports(reports))
}
