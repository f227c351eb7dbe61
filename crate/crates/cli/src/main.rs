use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use quasilie::algebra::{ConjClass, LoopCombination};
use quasilie::fox::algebraic_brace;
use quasilie::homology::{first_form_gram, first_form_h1, h1_class, second_form, second_form_gram, v_h1};
use quasilie::homotopy::{bullet_lc, gate_brace_lc, second_bracket_lc};
use quasilie::quasi_lie::{mu_total, p_and_u_diagnostics, s_bracket, verify_quasi_jacobi};
use quasilie::surface::{GateOrientation, QuasiSurface};
use quasilie::trace::{eval_induced_bracket, eval_trace, rational_string, InducedForm, RepresentationPoint};
use quasilie::verify::{run_suite, Suite, DEFAULT_SEED};

/// Loop operations and quasi-Lie identities on quasi-surfaces.
///
/// Loop expressions are either a word such as `g1 g2^-1` (its conjugacy
/// class) or a JSON combination such as `[[2,"g1"],[-1,"g1 g2"]]`.
#[derive(Parser)]
#[command(name = "quasilie", version)]
struct Cli {
    /// Also write the JSON result to this file.
    #[arg(long, global = true)]
    json_out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a quasi-surface and report its presentation.
    Validate(SpecArgs),
    /// The bracket [x,y].
    Bracket(PairArgs),
    /// The pairing x •_ω y.
    Bullet(PairArgs),
    /// A gate brace of the given loops.
    Brace(BraceArgs),
    /// μ(x,y,z), the sum of the gate 3-braces.
    Mu(TripleArgs),
    /// The symmetric bracket s(x,y,z).
    S(TripleArgs),
    /// Homological forms: Gram matrices, and values on x, y if given.
    Homology(HomologyArgs),
    /// Both sides of the quasi-Jacobi identity.
    Jacobi(TripleArgs),
    /// P, u_ω and u_ω̄ with the identities relating them.
    Diagnostics(TripleArgs),
    /// Trace of an expression at a representation point.
    TraceEval(TraceArgs),
    /// Run the verification suites.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct SpecArgs {
    /// Quasi-surface specification (JSON).
    #[arg(long)]
    spec: PathBuf,
}

#[derive(Args)]
struct OmegaArgs {
    /// Gate orientation, one `+` or `-` per gate in declaration order.
    /// Defaults to all counterclockwise.
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<String>,
}

#[derive(Args)]
struct PairArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[command(flatten)]
    omega: OmegaArgs,
    #[arg(long)]
    x: String,
    #[arg(long)]
    y: String,
}

#[derive(Args)]
struct TripleArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[command(flatten)]
    omega: OmegaArgs,
    #[arg(long)]
    x: String,
    #[arg(long)]
    y: String,
    #[arg(long)]
    z: String,
}

#[derive(Copy, Clone, ValueEnum)]
enum Route {
    Geometric,
    Algebraic,
}

#[derive(Args)]
struct LoopList {
    #[arg(long)]
    x: Option<String>,
    #[arg(long)]
    y: Option<String>,
    #[arg(long)]
    z: Option<String>,
    /// Loop argument; repeat for more (used after --x/--y/--z).
    #[arg(long = "loop")]
    loops: Vec<String>,
}

impl LoopList {
    fn collect(&self) -> Vec<String> {
        [&self.x, &self.y, &self.z]
            .into_iter()
            .flatten()
            .cloned()
            .chain(self.loops.iter().cloned())
            .collect()
    }
}

#[derive(Args)]
struct BraceArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Gate name.
    #[arg(long)]
    gate: String,
    /// Arity; a single loop is repeated m times.
    #[arg(long)]
    m: Option<usize>,
    /// Crossing enumeration, or the Fox brace of the gate derivative.
    #[arg(long, value_enum, default_value = "geometric")]
    route: Route,
    #[command(flatten)]
    loops: LoopList,
}

#[derive(Args)]
struct HomologyArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[command(flatten)]
    omega: OmegaArgs,
    /// Only print the Gram matrix of i_X.
    #[arg(long)]
    gram: bool,
    #[arg(long)]
    x: Option<String>,
    #[arg(long)]
    y: Option<String>,
}

#[derive(Copy, Clone, ValueEnum)]
enum Expr {
    Trace,
    Bracket,
    Mu,
    Brace,
}

#[derive(Args)]
struct TraceArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Representation point: generator → matrix of "p/q" strings (JSON).
    #[arg(long)]
    rep: PathBuf,
    #[arg(long, value_enum, default_value = "trace")]
    expr: Expr,
    /// Gate name, for `--expr brace`.
    #[arg(long)]
    gate: Option<String>,
    #[command(flatten)]
    loops: LoopList,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Cases per suite; defaults to each suite's own count.
    #[arg(long)]
    cases: Option<usize>,
    /// Run only these suites (repeatable).
    #[arg(long = "suite")]
    suites: Vec<String>,
}

fn load_surface(args: &SpecArgs) -> Result<QuasiSurface> {
    let text = fs::read_to_string(&args.spec).with_context(|| format!("reading {}", args.spec.display()))?;
    QuasiSurface::from_json_str(&text).with_context(|| format!("loading {}", args.spec.display()))
}

fn orientation(qs: &QuasiSurface, args: &OmegaArgs) -> Result<GateOrientation> {
    Ok(match &args.omega {
        Some(s) => GateOrientation::for_surface(qs, s)?,
        None => GateOrientation::ccw(qs.gate_count()),
    })
}

fn parse_loop(qs: &QuasiSurface, s: &str) -> Result<LoopCombination> {
    let lc = if s.trim_start().starts_with('[') {
        let v: Value = serde_json::from_str(s).with_context(|| format!("loop expression `{s}`"))?;
        LoopCombination::from_json(&v)?
    } else {
        let c: ConjClass = s.parse().with_context(|| format!("loop expression `{s}`"))?;
        LoopCombination::from_class(c)
    };
    for (c, _) in lc.iter() {
        qs.check_word(&c.word())?;
    }
    Ok(lc)
}

fn parse_loops(qs: &QuasiSurface, xs: &[String]) -> Result<Vec<LoopCombination>> {
    xs.iter().map(|s| parse_loop(qs, s)).collect()
}

fn gate_index(qs: &QuasiSurface, name: &str) -> Result<usize> {
    Ok(qs.gate_index(name)?)
}

/// The single class of a loop expression, for operations on homology.
fn single_class(qs: &QuasiSurface, s: &str) -> Result<ConjClass> {
    let lc = parse_loop(qs, s)?;
    let terms: Vec<_> = lc.iter().collect();
    match terms.as_slice() {
        [(c, k)] if **k == 1.into() => Ok((*c).clone()),
        _ => bail!("`{s}` must be a single loop"),
    }
}

/// Result JSON and whether the requested checks passed.
fn run(command: &Command) -> Result<(Value, bool)> {
    Ok(match command {
        Command::Validate(a) => {
            let qs = load_surface(a)?;
            (json!({"command": "validate", "result": qs.report()}), true)
        }
        Command::Bracket(a) | Command::Bullet(a) => {
            let qs = load_surface(&a.spec)?;
            let omega = orientation(&qs, &a.omega)?;
            let (x, y) = (parse_loop(&qs, &a.x)?, parse_loop(&qs, &a.y)?);
            let (name, value) = match command {
                Command::Bracket(_) => ("bracket", second_bracket_lc(&qs, &x, &y)?),
                _ => ("bullet", bullet_lc(&qs, &omega, &x, &y)?),
            };
            (
                json!({
                    "command": name,
                    "omega": omega.to_string(),
                    "x": x.to_json(),
                    "y": y.to_json(),
                    "result": value.to_json(),
                }),
                true,
            )
        }
        Command::Brace(a) => {
            let qs = load_surface(&a.spec)?;
            let k = gate_index(&qs, &a.gate)?;
            let mut xs = parse_loops(&qs, &a.loops.collect())?;
            if let Some(m) = a.m {
                if xs.len() == 1 {
                    xs = vec![xs[0].clone(); m];
                } else if xs.len() != m {
                    bail!("--m {m} but {} loops given", xs.len());
                }
            }
            if xs.is_empty() {
                bail!("no loops given");
            }
            let refs: Vec<&LoopCombination> = xs.iter().collect();
            let value = match a.route {
                Route::Geometric => gate_brace_lc(&qs, k, &refs)?,
                Route::Algebraic => algebraic_brace(&vec![qs.gate_derivative(k)?; xs.len()], &xs)?,
            };
            (
                json!({
                    "command": "brace",
                    "gate": a.gate,
                    "m": xs.len(),
                    "loops": xs.iter().map(LoopCombination::to_json).collect::<Vec<_>>(),
                    "result": value.to_json(),
                }),
                true,
            )
        }
        Command::Mu(a) | Command::S(a) | Command::Jacobi(a) | Command::Diagnostics(a) => {
            let qs = load_surface(&a.spec)?;
            let omega = orientation(&qs, &a.omega)?;
            let (x, y, z) = (parse_loop(&qs, &a.x)?, parse_loop(&qs, &a.y)?, parse_loop(&qs, &a.z)?);
            let mut out = json!({"x": x.to_json(), "y": y.to_json(), "z": z.to_json()});
            let ok = match command {
                Command::Mu(_) => {
                    out["command"] = json!("mu");
                    out["result"] = mu_total(&qs, &x, &y, &z)?.to_json();
                    true
                }
                Command::S(_) => {
                    out["command"] = json!("s");
                    out["result"] = s_bracket(&qs, &x, &y, &z)?.to_json();
                    true
                }
                Command::Jacobi(_) => {
                    let r = verify_quasi_jacobi(&qs, &x, &y, &z)?;
                    out["command"] = json!("jacobi");
                    out["result"] = r.to_json();
                    r.equal
                }
                _ => {
                    let d = p_and_u_diagnostics(&qs, &omega, &x, &y, &z)?;
                    out["command"] = json!("diagnostics");
                    out["result"] = d.to_json();
                    d.all_hold()
                }
            };
            (out, ok)
        }
        Command::Homology(a) => {
            let qs = load_surface(&a.spec)?;
            let omega = orientation(&qs, &a.omega)?;
            let gram = second_form_gram(&qs)?;
            if a.gram {
                return Ok((json!({"command": "homology", "result": gram}), true));
            }
            let mut result = json!({
                "omega": omega.to_string(),
                "i_X_gram": gram,
                "first_form_gram": first_form_gram(&qs, &omega)?,
            });
            if let (Some(x), Some(y)) = (&a.x, &a.y) {
                let (hx, hy) = (h1_class(&qs, &single_class(&qs, x)?), h1_class(&qs, &single_class(&qs, y)?));
                let v = |h: &Vec<i64>| (0..qs.gate_count()).map(|k| v_h1(&qs, k, h)).collect::<Vec<_>>();
                result["x"] = json!(hx);
                result["y"] = json!(hy);
                result["first_form"] = json!(first_form_h1(&qs, &omega, &hx, &hy)?);
                result["i_X"] = json!(second_form(&qs, &hx, &hy)?);
                result["v_x"] = json!(v(&hx));
                result["v_y"] = json!(v(&hy));
            } else if a.x.is_some() || a.y.is_some() {
                bail!("give both --x and --y");
            }
            (json!({"command": "homology", "result": result}), true)
        }
        Command::TraceEval(a) => {
            let qs = load_surface(&a.spec)?;
            let text = fs::read_to_string(&a.rep).with_context(|| format!("reading {}", a.rep.display()))?;
            let rep: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", a.rep.display()))?;
            let rho = RepresentationPoint::from_json(&rep)?;
            let xs = parse_loops(&qs, &a.loops.collect())?;
            let refs: Vec<&LoopCombination> = xs.iter().collect();
            let (name, value) = match a.expr {
                Expr::Trace => {
                    let [x] = refs.as_slice() else { bail!("--expr trace takes one loop") };
                    ("trace", eval_trace(&rho, x)?)
                }
                Expr::Bracket => ("bracket", eval_induced_bracket(&qs, &rho, InducedForm::SecondBracket, &refs)?),
                Expr::Mu => ("mu", eval_induced_bracket(&qs, &rho, InducedForm::MuTotal, &refs)?),
                Expr::Brace => {
                    let gate = a.gate.as_deref().context("--expr brace needs --gate")?;
                    let k = gate_index(&qs, gate)?;
                    ("brace", eval_induced_bracket(&qs, &rho, InducedForm::GateBrace(k), &refs)?)
                }
            };
            (
                json!({
                    "command": "trace-eval",
                    "expr": name,
                    "gate": a.gate,
                    "loops": xs.iter().map(LoopCombination::to_json).collect::<Vec<_>>(),
                    "rep": rho.to_json(),
                    "result": rational_string(&value),
                }),
                true,
            )
        }
        Command::Selftest(a) => {
            let suites = if a.suites.is_empty() {
                Suite::ALL.to_vec()
            } else {
                a.suites
                    .iter()
                    .map(|s| Suite::from_name(s).with_context(|| format!("unknown suite `{s}`")))
                    .collect::<Result<Vec<_>>>()?
            };
            let reports: Vec<_> = suites.iter().map(|&s| run_suite(s, a.seed, a.cases)).collect();
            for r in &reports {
                eprintln!("{}", r.summary());
                for w in &r.warnings {
                    eprintln!("warning: {}: {w}", r.suite.name());
                }
            }
            let passed = reports.iter().all(|r| r.passed());
            (
                json!({
                    "command": "selftest",
                    "seed": a.seed,
                    "cases": a.cases,
                    "passed": passed,
                    "suites": reports.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
                }),
                passed,
            )
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (value, ok) = match run(&cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let text = serde_json::to_string_pretty(&value).expect("JSON values serialize");
    println!("{text}");
    if let Some(path) = &cli.json_out {
        if let Err(e) = fs::write(path, format!("{text}\n")) {
            eprintln!("error: writing {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
