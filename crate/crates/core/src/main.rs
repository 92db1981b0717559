use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use seqcomplex::classes::{ClassKind, FunctionClass};
use seqcomplex::complexity::{dudley_bound, rad_fixed_tree, rad_sup, ChainingParams, RadMode, SupMode};
use seqcomplex::covers::{cover_number, packing_number, strong_packing_number, CoverMode, Norm};
use seqcomplex::games::{
    lower_bound_adversary, rad_adversary, supervised_spec, value_dual, value_primal, Adversary, GameSpec,
    StochasticAdversary,
};
use seqcomplex::harness::report::{from_json, read_csv, to_csv, to_json};
use seqcomplex::harness::{failures, run_suite, ExperimentConfig, ReportFormat, ReportRecord};
use seqcomplex::learners::{
    agnostic_bounds, agnostic_learner, agnostic_plan, ewa_learner, simulate, summarize, Const0, FatSoa, Learner,
    RegretTrace, DEFAULT_EXPERT_BUDGET,
};
use seqcomplex::rational::{fmt_rational, parse_rational, Rational};
use seqcomplex::shattering::{extract_shattered_tree, fat_dim, ldim};
use seqcomplex::trees::{random_tree, DomainTree, DEFAULT_TREE_BUDGET};
use seqcomplex::{Error, Result};

#[derive(Parser)]
#[command(name = "seqcomplex", version, about = "Sequential complexity measures and online learning games on small finite classes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Littlestone dimension (binary classes) or fat-shattering dimension at --alpha.
    Dim {
        #[arg(long)]
        class: PathBuf,
        #[arg(long)]
        alpha: Option<String>,
    },
    /// Covering number of the class on a tree.
    Cover(CoverArgs),
    /// Packing and strong packing numbers of the class on a tree.
    Pack(CoverArgs),
    /// Sequential Rademacher average on a tree, or its supremum over trees.
    Rad {
        #[arg(long)]
        class: PathBuf,
        #[arg(long)]
        tree: Option<PathBuf>,
        /// Depth of the supremum when no tree is given.
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, value_enum, default_value_t = RadModeArg::Exact)]
        mode: RadModeArg,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 16)]
        restarts: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Chaining bound on a tree.
    Dudley {
        #[arg(long)]
        class: PathBuf,
        #[arg(long)]
        tree: PathBuf,
        #[arg(long, default_value_t = 8)]
        levels: usize,
        #[arg(long)]
        greedy: bool,
    },
    /// Minimax value of the online game.
    Value {
        #[arg(long)]
        class: PathBuf,
        #[arg(long)]
        horizon: usize,
        /// Play the supervised game with absolute loss.
        #[arg(long)]
        supervised: bool,
        /// Comma separated label set for --supervised.
        #[arg(long, default_value = "-1,1", allow_hyphen_values = true)]
        labels: String,
        #[arg(long, value_enum, default_value_t = FormArg::Both)]
        form: FormArg,
        /// Include the per-history strategies.
        #[arg(long)]
        policy: bool,
    },
    /// Plays a learner against an adversary and reports regret.
    Simulate(SimArgs),
    /// Runs a verification suite (or `all`).
    Verify(VerifyArgs),
    /// Runs a suite from a config file, or converts an existing report.
    Report {
        #[arg(long, conflicts_with = "input")]
        config: Option<PathBuf>,
        /// Existing report (.json or .csv) to re-emit.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        format: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CoverArgs {
    #[arg(long)]
    class: PathBuf,
    #[arg(long)]
    tree: PathBuf,
    #[arg(long)]
    alpha: String,
    #[arg(long, default_value = "inf")]
    norm: String,
    #[arg(long, conflicts_with = "greedy")]
    exact: bool,
    #[arg(long)]
    greedy: bool,
}

#[derive(Args)]
struct SimArgs {
    #[arg(long, value_enum)]
    learner: LearnerArg,
    #[arg(long, value_enum)]
    adversary: AdversaryArg,
    #[arg(long)]
    class: PathBuf,
    #[arg(long)]
    horizon: usize,
    #[arg(long, default_value = "1/2")]
    alpha: String,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Tree for the tree adversary; a seeded random tree otherwise.
    #[arg(long)]
    tree: Option<PathBuf>,
    /// Scales for the agnostic learner.
    #[arg(long, default_value_t = 3)]
    scales: u32,
    /// Where to write the per-trial CSV; stdout when absent.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    suite: String,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    instances: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    class: Option<PathBuf>,
    #[arg(long)]
    tree: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum RadModeArg {
    Exact,
    Local,
    Mc,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormArg {
    Primal,
    Dual,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum LearnerArg {
    Fatsoa,
    Ewa,
    Agnostic,
    Const0,
}

#[derive(Clone, Copy, ValueEnum)]
enum AdversaryArg {
    Tree,
    Lowerbound,
    Stochastic,
}

fn load_tree(path: &Path) -> Result<DomainTree> {
    DomainTree::from_json(&fs::read_to_string(path)?)
}

fn print_json(v: &Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn budget() -> u64 {
    seqcomplex::harness::budget_override().unwrap_or(DEFAULT_TREE_BUDGET)
}

fn dim(class: &Path, alpha: Option<String>) -> Result<()> {
    let c = FunctionClass::load(class)?;
    let out = match alpha {
        None => {
            if c.kind() != ClassKind::Binary {
                return Err(Error::Usage("--alpha is required for non-binary classes".into()));
            }
            let d = ldim(&c)?;
            let cert = extract_shattered_tree(&c, Rational::from_integer(2))?;
            json!({"dimension": d, "kind": "littlestone", "certificate": cert.to_json()})
        }
        Some(a) => {
            let a = parse_rational(&a)?;
            let d = fat_dim(&c, a)?;
            let cert = if d >= 0 { Some(extract_shattered_tree(&c, a)?.to_json()) } else { None };
            json!({"dimension": d, "kind": "fat", "alpha": fmt_rational(&a), "certificate": cert})
        }
    };
    print_json(&out)
}

fn cover(a: CoverArgs, packing: bool) -> Result<()> {
    let c = FunctionClass::load(&a.class)?;
    let x = load_tree(&a.tree)?;
    let alpha = parse_rational(&a.alpha)?;
    let norm: Norm = a.norm.parse()?;
    if packing {
        let weak = packing_number(&c, &x, alpha, norm)?;
        let strong = strong_packing_number(&c, &x, alpha, norm)?;
        return print_json(&json!({"norm": norm.to_string(), "alpha": fmt_rational(&alpha), "packing": weak, "strong_packing": strong}));
    }
    let mode = if a.greedy { CoverMode::Greedy } else { CoverMode::Exact };
    let v = cover_number(&c, &x, alpha, norm, mode)?;
    print_json(&json!({"size": v.len(), "mode": if a.greedy { "greedy" } else { "exact" }, "cover": v.to_json()}))
}

#[allow(clippy::too_many_arguments)]
fn rad(class: &Path, tree: Option<PathBuf>, depth: Option<usize>, mode: RadModeArg, trials: u64, restarts: u64, seed: u64) -> Result<()> {
    let c = FunctionClass::load(class)?;
    let r = match (tree, mode) {
        (Some(t), RadModeArg::Exact) => rad_fixed_tree(&c, &load_tree(&t)?, RadMode::Exact)?,
        (Some(t), RadModeArg::Mc) => rad_fixed_tree(&c, &load_tree(&t)?, RadMode::MonteCarlo { trials, seed })?,
        (Some(_), RadModeArg::Local) => return Err(Error::Usage("local search is over trees; drop --tree".into())),
        (None, m) => {
            let d = depth.ok_or_else(|| Error::Usage("give --tree or --depth".into()))?;
            match m {
                RadModeArg::Exact => rad_sup(&c, d, SupMode::Exact { budget: budget() })?,
                RadModeArg::Local => rad_sup(&c, d, SupMode::Local { restarts, seed })?,
                RadModeArg::Mc => return Err(Error::Usage("Monte Carlo needs --tree".into())),
            }
        }
    };
    print_json(&r.to_json())
}

fn value(class: &Path, horizon: usize, supervised: bool, labels: &str, form: FormArg, policy: bool) -> Result<()> {
    let c = FunctionClass::load(class)?;
    let mut spec = if supervised {
        let ys = labels.split(',').map(parse_rational).collect::<Result<Vec<_>>>()?;
        supervised_spec(&c, &ys, horizon)?
    } else {
        GameSpec::direct(c, horizon)
    };
    spec.record_policy = policy;
    if let Some(b) = seqcomplex::harness::budget_override() {
        spec.budget = b;
    }
    let mut out = serde_json::Map::new();
    if form != FormArg::Dual {
        out.insert("primal".into(), value_primal(&spec)?.to_json());
    }
    if form != FormArg::Primal {
        out.insert("dual".into(), value_dual(&spec)?.to_json());
    }
    if form == FormArg::Both {
        out.insert("equal".into(), json!(out["primal"]["value"] == out["dual"]["value"]));
    }
    print_json(&Value::Object(out))
}

fn trace_rows(traces: &[RegretTrace]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["trial", "seed", "points", "labels", "predictions", "cumulative", "comparator", "regret"])?;
    let join = |v: &[Rational]| v.iter().map(fmt_rational).collect::<Vec<_>>().join(" ");
    for t in traces {
        w.write_record([
            t.trial.to_string(),
            t.seed.to_string(),
            t.points.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" "),
            join(&t.labels),
            join(&t.predictions),
            fmt_rational(&t.cumulative),
            fmt_rational(&t.comparator),
            fmt_rational(&t.regret),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?).expect("csv output is utf-8"))
}

fn run_simulation(a: SimArgs) -> Result<()> {
    let c = FunctionClass::load(&a.class)?;
    let alpha = parse_rational(&a.alpha)?;
    let t = a.horizon;
    let mut bounds = serde_json::Map::new();
    let plan = match a.learner {
        LearnerArg::Agnostic => {
            let plan = agnostic_plan(&c, t, a.scales, DEFAULT_EXPERT_BUDGET)?;
            let best = agnostic_bounds(&plan).into_iter().map(|b| b.per_scale).fold(f64::INFINITY, f64::min);
            bounds.insert("agnostic_upper".into(), json!(best));
            Some(plan)
        }
        _ => None,
    };
    if let LearnerArg::Fatsoa = a.learner {
        bounds.insert("mistakes_upper_realizable".into(), json!(fat_dim(&c, alpha)?));
    }
    let tree = match (&a.tree, a.adversary) {
        (Some(p), _) => Some(load_tree(p)?),
        (None, AdversaryArg::Tree) => Some(random_tree(c.domain_size(), t, &mut seqcomplex::harness::rng::stream_rng(a.seed, u64::MAX))?),
        _ => None,
    };
    if let Some(x) = &tree {
        bounds.insert("rad_on_tree".into(), json!(fmt_rational(&seqcomplex::complexity::rad_tree_exact(&c, x)?)));
    }
    let block = match a.adversary {
        AdversaryArg::Lowerbound => {
            let adv = lower_bound_adversary(&c, alpha, t)?;
            bounds.insert("lower".into(), json!(adv.bound()));
            Some(adv)
        }
        _ => None,
    };
    let make_learner = || -> Result<Box<dyn Learner>> {
        Ok(match a.learner {
            LearnerArg::Fatsoa => Box::new(FatSoa::new(&c, alpha)?),
            LearnerArg::Ewa => Box::new(ewa_learner(&c, alpha, t, DEFAULT_EXPERT_BUDGET)?),
            LearnerArg::Agnostic => Box::new(agnostic_learner(&c, plan.as_ref().expect("planned above"))?),
            LearnerArg::Const0 => Box::new(Const0),
        })
    };
    let make_adversary = || -> Result<Box<dyn Adversary>> {
        Ok(match a.adversary {
            AdversaryArg::Tree => Box::new(rad_adversary(tree.clone().expect("tree set above"))),
            AdversaryArg::Lowerbound => Box::new(block.clone().expect("built above")),
            AdversaryArg::Stochastic => Box::new(StochasticAdversary::new(&c, None)?),
        })
    };
    let traces = simulate(make_learner, make_adversary, &c, t, a.trials, a.seed)?;
    let s = summarize(&traces);
    let summary = json!({
        "learner": make_learner()?.name(),
        "adversary": make_adversary()?.name(),
        "horizon": t,
        "trials": s.trials,
        "seed": a.seed,
        "mean_regret": s.mean_regret,
        "std_error": s.std_error,
        "bounds": bounds,
    });
    let rows = trace_rows(&traces)?;
    match &a.csv {
        Some(p) => {
            fs::write(p, rows)?;
            print_json(&summary)
        }
        None => {
            print!("{rows}");
            eprintln!("{}", serde_json::to_string_pretty(&summary)?);
            Ok(())
        }
    }
}

fn emit(records: &[ReportRecord], format: ReportFormat, out: Option<&Path>) -> Result<()> {
    let text = match format {
        ReportFormat::Json => to_json(records)? + "\n",
        ReportFormat::Csv => to_csv(records)?,
    };
    match out {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Prints failing rows and a summary line to stderr; true when every row holds.
fn conclude(suite: &str, records: &[ReportRecord]) -> bool {
    let bad = failures(records);
    for r in &bad {
        eprintln!("FAIL {} #{} {}: {} {} {} ({})", r.suite, r.instance, r.check, r.lhs, r.relation, r.rhs, r.detail);
    }
    eprintln!("{suite}: {} rows, {} failed", records.len(), bad.len());
    bad.is_empty()
}

fn verify(a: VerifyArgs) -> Result<bool> {
    let mut cfg = match &a.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::new(&a.suite),
    };
    cfg.suite = a.suite.clone();
    cfg.seed = a.seed.unwrap_or(cfg.seed);
    cfg.instances = a.instances.or(cfg.instances);
    cfg.trials = a.trials.or(cfg.trials);
    cfg.budget = a.budget.or(cfg.budget).or_else(seqcomplex::harness::budget_override);
    cfg.class = a.class.or(cfg.class);
    cfg.tree = a.tree.or(cfg.tree);
    cfg.alpha = a.alpha.or(cfg.alpha);
    cfg.horizon = a.horizon.or(cfg.horizon);
    cfg.output = a.out.or(cfg.output);
    if let Some(f) = &a.format {
        cfg.format = f.parse()?;
    }
    cfg.timing |= a.timing;
    let records = run_suite(&cfg.suite, &cfg)?;
    emit(&records, cfg.format, cfg.output.as_deref())?;
    Ok(conclude(&cfg.suite, &records))
}

fn report(config: Option<PathBuf>, input: Option<PathBuf>, format: Option<String>, out: Option<PathBuf>) -> Result<bool> {
    let format: Option<ReportFormat> = format.map(|f| f.parse()).transpose()?;
    if let Some(p) = input {
        let text = fs::read_to_string(&p)?;
        let records = if p.extension().is_some_and(|e| e == "csv") { read_csv(text.as_bytes())? } else { from_json(&text)? };
        emit(&records, format.unwrap_or_default(), out.as_deref())?;
        return Ok(conclude("report", &records));
    }
    let p = config.ok_or_else(|| Error::Usage("report needs --config or --input".into()))?;
    let mut cfg = ExperimentConfig::load(&p)?;
    if cfg.budget.is_none() {
        cfg.budget = seqcomplex::harness::budget_override();
    }
    let records = run_suite(&cfg.suite, &cfg)?;
    emit(&records, format.unwrap_or(cfg.format), out.as_deref().or(cfg.output.as_deref()))?;
    Ok(conclude(&cfg.suite, &records))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Dim { class, alpha } => dim(&class, alpha).map(|_| true),
        Command::Cover(a) => cover(a, false).map(|_| true),
        Command::Pack(a) => cover(a, true).map(|_| true),
        Command::Rad { class, tree, depth, mode, trials, restarts, seed } => {
            rad(&class, tree, depth, mode, trials, restarts, seed).map(|_| true)
        }
        Command::Dudley { class, tree, levels, greedy } => {
            let c = FunctionClass::load(&class)?;
            let x = load_tree(&tree)?;
            let mode = if greedy { CoverMode::Greedy } else { CoverMode::Exact };
            print_json(&dudley_bound(&c, &x, ChainingParams { levels, cover_mode: mode })?.to_json()).map(|_| true)
        }
        Command::Value { class, horizon, supervised, labels, form, policy } => {
            value(&class, horizon, supervised, &labels, form, policy).map(|_| true)
        }
        Command::Simulate(a) => run_simulation(a).map(|_| true),
        Command::Verify(a) => verify(a),
        Command::Report { config, input, format, out } => report(config, input, format, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Usage(_) | Error::Parse(_) | Error::Io(_) | Error::Json(_) | Error::Csv(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
