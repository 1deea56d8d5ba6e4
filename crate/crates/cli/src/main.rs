mod expr;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Value};
use superstar_core::exppoly::ExpPolyJson;
use superstar_core::gwaction::{default_fields, default_grid, verify_gw, GWParams};
use superstar_core::ledger::Ledger;
use superstar_core::qgroup::{pentagon_check, sample_cases, sample_t_triples, QuantumGroup};
use superstar_core::sampling::Sampler;
use superstar_core::starprod::DeformationContext;
use superstar_core::supertorus::{parse_torus, TorusDims};
use superstar_core::verify::{run_all, run_suite, CombinedReport, Suite, VerifyConfig};
use superstar_core::ExpPoly;

const SEED_VAR: &str = "SUPERSTAR_SEED";

#[derive(Parser, Debug)]
#[command(name = "superstar", version, about = "Super star products and the structures built on them")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Opts {
    /// Deformation parameter.
    #[arg(long, global = true)]
    theta: Option<f64>,
    /// Half the number of even coordinates.
    #[arg(long, global = true)]
    m: Option<usize>,
    /// Number of odd coordinates.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Odd signature as `p,q`.
    #[arg(long, global = true, value_parser = parse_signature)]
    signature: Option<(usize, usize)>,
    /// Overrides the tolerance of every numeric check.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Sampling seed; defaults to $SUPERSTAR_SEED, then 0.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Also write the JSON report to this file.
    #[arg(long, global = true)]
    json_out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate an expression, e.g. "x1 star x2".
    Star {
        #[arg(allow_hyphen_values = true)]
        expression: String,
    },
    /// Run a verification suite: `suite=<name>` or `all`.
    Verify { suite: String },
    /// Noncommutative supertorus words.
    Supertorus {
        #[command(subcommand)]
        action: TorusCommand,
    },
    /// Harmonic superfield action.
    Gw {
        #[command(subcommand)]
        action: GwCommand,
    },
    /// Solvable quantum supergroup.
    Qgroup {
        #[command(subcommand)]
        action: QgroupCommand,
    },
}

#[derive(Subcommand, Debug)]
enum TorusCommand {
    /// Normal-order a word such as "V1 U1 G1 G1".
    Normalize {
        #[arg(allow_hyphen_values = true)]
        word: String,
    },
}

#[derive(Subcommand, Debug)]
enum GwCommand {
    /// Compare the superfield action with the harmonic action on a parameter grid.
    Verify {
        /// JSON array of {theta, mass, coupling, b}; built-in grid when omitted.
        #[arg(long)]
        grid: Option<PathBuf>,
        /// JSON array of two-variable function term lists; built-in Gaussians when omitted.
        #[arg(long)]
        fields: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum QgroupCommand {
    /// Check the pentagon equation on sampled legs.
    Pentagon {
        #[arg(long, default_value_t = 5)]
        t_samples: usize,
        #[arg(long, default_value_t = 3)]
        cases: usize,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<superstar_core::Error> for Failure {
    fn from(e: superstar_core::Error) -> Self {
        match e {
            superstar_core::Error::Invalid(_) | superstar_core::Error::Dimension(_) => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

struct Outcome {
    report: Value,
    passed: bool,
}

fn parse_signature(s: &str) -> Result<(usize, usize), String> {
    let (p, q) = s.split_once(',').ok_or("expected p,q")?;
    let parse = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("'{x}': {e}"));
    Ok((parse(p)?, parse(q)?))
}

impl Opts {
    fn seed(&self) -> Result<u64, Failure> {
        if let Some(seed) = self.seed {
            return Ok(seed);
        }
        match std::env::var(SEED_VAR) {
            Ok(v) => v.trim().parse().map_err(|_| Failure::Usage(format!("{SEED_VAR}='{v}' is not an unsigned integer"))),
            Err(_) => Ok(0),
        }
    }

    fn odd_signature(&self) -> Result<(usize, usize), Failure> {
        match (self.n, self.signature) {
            (Some(n), Some((p, q))) if p + q != n => {
                Err(Failure::Usage(format!("--signature {p},{q} does not add up to --n {n}")))
            }
            (_, Some(sig)) => Ok(sig),
            (Some(n), None) => Ok((n, 0)),
            (None, None) => Ok((0, 0)),
        }
    }

    fn context(&self) -> Result<DeformationContext, Failure> {
        let (p, q) = self.odd_signature()?;
        Ok(DeformationContext::new(self.theta.unwrap_or(1.0), self.m.unwrap_or(1), p + q, (p, q))?)
    }

    fn verify_config(&self) -> Result<VerifyConfig, Failure> {
        let cfg = VerifyConfig {
            seed: self.seed()?,
            theta: self.theta,
            m: self.m,
            n: self.n,
            signature: self.signature,
            tol: self.tol,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn star(opts: &Opts, src: &str) -> Result<Outcome, Failure> {
    let ctx = opts.context()?;
    let (p, q) = opts.odd_signature()?;
    let ast = expr::parse(src).map_err(|e| Failure::Usage(e.to_string()))?;
    let value = expr::evaluate(&ast, &ctx).map_err(|e| match e {
        expr::EvalError::Engine(inner) => Failure::Runtime(inner.to_string()),
        other => Failure::Usage(other.to_string()),
    })?;
    let report = json!({
        "expression": ast.to_string(),
        "context": { "theta": ctx.theta(), "m": ctx.m(), "n": ctx.n(), "signature": [p, q] },
        "result": value.to_json(),
        "ledger": ctx.ledger().to_json(),
    });
    Ok(Outcome { report, passed: true })
}

fn verify(opts: &Opts, suite: &str) -> Result<Outcome, Failure> {
    let name = suite.strip_prefix("suite=").unwrap_or(suite);
    let cfg = opts.verify_config()?;
    let combined = if name == "all" {
        run_all(&cfg)?
    } else {
        let suite: Suite = name.parse().map_err(|_| {
            let known: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
            Failure::Usage(format!("unknown suite '{name}'; expected one of {} or all", known.join(", ")))
        })?;
        CombinedReport { reports: vec![run_suite(suite, &cfg)?] }
    };
    for r in &combined.reports {
        eprintln!("{:<11} {} ({} cases)", r.suite.name(), if r.passed() { "PASS" } else { "FAIL" }, r.cases());
    }
    let mut report = if name == "all" { combined.to_json() } else { combined.reports[0].to_json() };
    report["seed"] = json!(cfg.seed);
    Ok(Outcome { report, passed: combined.passed() })
}

fn normalize(opts: &Opts, word: &str) -> Result<Outcome, Failure> {
    let theta = opts.theta.unwrap_or(1.0);
    let (p, q) = match (opts.n, opts.signature) {
        (None, None) => (8, 8),
        _ => opts.odd_signature()?,
    };
    let dims = TorusDims { m: opts.m.unwrap_or(4), p, q };
    let element = parse_torus(dims, word).map_err(|e| Failure::Usage(e.to_string()))?;
    let mut report = element.to_json(theta);
    if let Some([term]) = report["terms"].as_array().map(Vec::as_slice) {
        let term = term.clone();
        report["word"] = term["word"].clone();
        report["phase"] = term["phase"].clone();
    }
    let mut ledger = Ledger::new();
    ledger.record("theta", json!(theta), "deformation parameter");
    ledger.record("torus_commutation", json!("U_j V_j = e^{2πiθ} V_j U_j"), "phase picked up when V is moved past U");
    ledger.record("torus_odd_squares", json!({ "gamma": "iθ", "xi": "-iθ" }), "squares of the odd generators");
    report["input"] = json!(word);
    report["ledger"] = ledger.to_json();
    Ok(Outcome { report, passed: true })
}

#[derive(Deserialize)]
struct GridPoint {
    theta: f64,
    mass: f64,
    coupling: f64,
    b: f64,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn gw_verify(opts: &Opts, grid: Option<&Path>, fields: Option<&Path>) -> Result<Outcome, Failure> {
    let grid = match grid {
        None => default_grid(),
        Some(path) => read_json::<Vec<GridPoint>>(path)?
            .into_iter()
            .map(|p| GWParams::new(p.theta, p.mass, p.coupling, p.b))
            .collect::<Result<_, _>>()?,
    };
    let fields = match fields {
        None => default_fields(),
        Some(path) => read_json::<Vec<ExpPolyJson>>(path)?.iter().map(ExpPoly::from_json).collect::<Result<_, _>>()?,
    };
    if grid.is_empty() || fields.is_empty() {
        return Err(Failure::Usage("grid and fields must be non-empty".into()));
    }
    if let Some(f) = fields.iter().find(|f| f.dim() != 2) {
        return Err(Failure::Usage(format!("fields live on two even coordinates, got {}", f.dim())));
    }
    let report = verify_gw(&grid, &fields, opts.tol.unwrap_or(1e-8))?;
    let mut ledger = grid[0].context()?.ledger().clone();
    ledger.record("gw_alpha_rule", json!("2/θ"), "α with |[α(i/2)x₁, x₂]_★| = 1");
    if let Some(p) = report.points.first() {
        ledger.record("gw_alpha", json!(p.alpha), "calibrated derivation scale at the first grid point");
    }
    let mut out = report.to_json();
    out["ledger"] = ledger.to_json();
    Ok(Outcome { report: out, passed: report.passed })
}

fn pentagon(opts: &Opts, t_samples: usize, cases: usize) -> Result<Outcome, Failure> {
    if t_samples == 0 || cases == 0 {
        return Err(Failure::Usage("--t-samples and --cases must be positive".into()));
    }
    let (p, q) = match (opts.n, opts.signature) {
        (None, None) => (1, 0),
        _ => opts.odd_signature()?,
    };
    let (m, seed) = (opts.m.unwrap_or(1), opts.seed()?);
    let group = QuantumGroup::new(m, p + q, (p, q))?;
    let mut s = Sampler::new(seed);
    let sampled = sample_cases(&group, &mut s, cases);
    let triples = sample_t_triples(&mut s, t_samples);
    let report = pentagon_check(&group, &sampled, &triples, opts.tol.unwrap_or(1e-8))?;
    let mut ledger = Ledger::new();
    ledger.record("qgroup_pi", json!("diag(e^{t}, …, e^{-t})"), "action of the abelian factor on the Heisenberg part");
    ledger.record("qgroup_law", json!("(t, z)(t′, z′) = (t + t′, z + π_t z′)"), "group law of the solvable supergroup");
    ledger.record("signature", json!([p, q]), "odd signature");
    let mut out = report.to_json();
    out["m"] = json!(m);
    out["seed"] = json!(seed);
    out["ledger"] = ledger.to_json();
    Ok(Outcome { report: out, passed: report.passed })
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let opts = &cli.opts;
    match &cli.command {
        Command::Star { expression } => star(opts, expression),
        Command::Verify { suite } => verify(opts, suite),
        Command::Supertorus { action: TorusCommand::Normalize { word } } => normalize(opts, word),
        Command::Gw { action: GwCommand::Verify { grid, fields } } => gw_verify(opts, grid.as_deref(), fields.as_deref()),
        Command::Qgroup { action: QgroupCommand::Pentagon { t_samples, cases } } => pentagon(opts, *t_samples, *cases),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            let text = serde_json::to_string_pretty(&outcome.report).expect("reports serialise");
            println!("{text}");
            if let Some(path) = &cli.opts.json_out {
                if let Err(e) = std::fs::write(path, format!("{text}\n")) {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            }
            ExitCode::from(if outcome.passed { 0 } else { 1 })
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
