use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use jigsaw_core::agent::PolicySpec;
use jigsaw_core::belief::PriorKind;
use jigsaw_core::eval::{self, EvalOptions};
use jigsaw_core::harness::{self, marginals_demo, parse_action_list, run_batch};
use jigsaw_core::scenario_gen;
use jigsaw_core::{PipConfig, Role, Scenario, Vocabulary};

#[derive(Parser)]
#[command(name = "jigsaw", version, about = "Planning, inference and pragmatics agents for a cooperative reference game")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scenario generation and checking.
    Scenarios {
        #[command(subcommand)]
        command: ScenarioCommand,
    },
    /// Agent-vs-agent games; prints per-game CSV or a JSON summary.
    Selfplay(SelfplayArgs),
    /// Scores policies against recorded games.
    Eval(EvalArgs),
    /// Prints a player's belief marginals after each action.
    Marginals(MarginalsArgs),
    /// Runs the HTTP play service.
    Serve(ServeArgs),
}

#[derive(Subcommand)]
enum ScenarioCommand {
    /// Writes scenarios as JSONL, one per seed starting at --seed.
    Generate {
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reports the generation criteria for each scenario in a file.
    Check {
        #[arg(long)]
        file: PathBuf,
    },
}

#[derive(Args)]
struct ConfigArgs {
    /// PIP configuration JSON file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    f: Option<usize>,
    /// Lookback window b: a count or "inf". Named `--window` because
    /// `selfplay --b` picks the second policy.
    #[arg(long, value_name = "B")]
    window: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    smoothing: Option<f64>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<PipConfig> {
        let mut cfg = match &self.config {
            Some(p) => serde_json::from_str(&read(p)?)
                .with_context(|| format!("parsing config {}", p.display()))?,
            None => PipConfig::default(),
        };
        if let Some(k) = self.k {
            cfg.k = k;
        }
        if let Some(f) = self.f {
            cfg.f = f;
        }
        if let Some(b) = &self.window {
            cfg.b = match b.as_str() {
                "inf" | "none" | "null" => None,
                n => Some(n.parse().with_context(|| format!("bad --window {n:?}"))?),
            };
        }
        if let Some(a) = self.alpha {
            cfg.alpha = a;
        }
        if let Some(e) = self.smoothing {
            cfg.smoothing = e;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct SelfplayArgs {
    /// Policy of the first player.
    #[arg(long, default_value = "pip")]
    a: String,
    /// Policy of the second player.
    #[arg(long, default_value = "pip")]
    b: String,
    /// Number of generated scenarios (ignored with --scenarios).
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Seeds scenario generation and game sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    games_per_scenario: usize,
    #[arg(long, default_value_t = harness::DEFAULT_MAX_TURNS)]
    max_turns: usize,
    /// Scenario file (JSON object, JSON array or JSONL) instead of generated ones.
    #[arg(long)]
    scenarios: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: TableFormat,
    /// Also write the games as transcript JSONL.
    #[arg(long)]
    transcripts: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct EvalArgs {
    /// Transcript JSONL.
    #[arg(long)]
    data: PathBuf,
    /// Comma-separated policy names.
    #[arg(long, default_value = "pip,pip:noprag,pip:noplan,pip:noinfer,greedy,random")]
    policies: String,
    #[arg(long, default_value_t = 1000)]
    resamples: usize,
    #[arg(long, default_value_t = 0.90)]
    level: f64,
    /// Seeds the bootstrap and rank tie-breaking.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Include every scored action in the JSON output.
    #[arg(long)]
    per_action: bool,
    /// `csv` prints only the per-policy summary.
    #[arg(long, value_enum, default_value = "json")]
    format: TableFormat,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum PriorArg {
    Constrained,
    Unconstrained,
}

#[derive(Clone, Copy, ValueEnum)]
enum TextFormat {
    Text,
    Json,
}

#[derive(Args)]
struct MarginalsArgs {
    /// Scenario JSON file; the first scenario is used.
    #[arg(long, conflicts_with = "seed")]
    scenario: Option<PathBuf>,
    /// Generate the scenario from this seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated actions, e.g. "blue,yes,click(1,2)".
    #[arg(long, default_value = "")]
    actions: String,
    /// Whose belief to show; defaults to the player who moves second.
    #[arg(long)]
    viewer: Option<String>,
    #[arg(long, value_enum, default_value = "constrained")]
    prior: PriorArg,
    #[arg(long, value_enum, default_value = "text")]
    format: TextFormat,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, env = "PORT", default_value_t = 8080)]
    port: u16,
    /// Append finished games to this transcript JSONL file.
    #[arg(long)]
    export: Option<PathBuf>,
}

fn main() -> Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("info")),
        )
        .with_writer(std::io::stderr)
        .init();
    match Cli::parse().command {
        Command::Scenarios { command } => scenarios(command),
        Command::Selfplay(args) => selfplay(args),
        Command::Eval(args) => evaluate(args),
        Command::Marginals(args) => marginals(args),
        Command::Serve(args) => serve(args),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

/// Accepts one JSON object, a JSON array, or JSONL.
fn read_scenarios(path: &Path) -> Result<Vec<Scenario>> {
    let text = read(path)?;
    let trimmed = text.trim_start();
    let raw: Vec<Scenario> = if trimmed.starts_with('[') {
        serde_json::from_str(&text)?
    } else if let Ok(one) = serde_json::from_str::<Scenario>(&text) {
        vec![one]
    } else {
        text.lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| serde_json::from_str(l).with_context(|| format!("line {}", i + 1)))
            .collect::<Result<_>>()?
    };
    raw.into_iter().map(|s| s.validate().map_err(Into::into)).collect()
}

fn scenarios(cmd: ScenarioCommand) -> Result<()> {
    match cmd {
        ScenarioCommand::Generate { n, seed, out } => {
            let mut text = String::new();
            for s in scenario_gen::generate_many(n, seed)? {
                text.push_str(&serde_json::to_string(&s)?);
                text.push('\n');
            }
            emit(out.as_deref(), &text)
        }
        ScenarioCommand::Check { file } => {
            let reports: Vec<_> = read_scenarios(&file)?.iter().map(scenario_gen::check_criteria).collect();
            emit(None, &format!("{}\n", serde_json::to_string_pretty(&reports)?))
        }
    }
}

fn selfplay(args: SelfplayArgs) -> Result<()> {
    let cfg = args.config.resolve()?;
    let a = PolicySpec::parse(&args.a, &cfg)?;
    let b = PolicySpec::parse(&args.b, &cfg)?;
    let scenarios = match &args.scenarios {
        Some(p) => read_scenarios(p)?,
        None => scenario_gen::generate_many(args.n, args.seed)?,
    };
    let seeds: Vec<u64> = (0..args.games_per_scenario as u64).map(|i| args.seed.wrapping_add(i)).collect();
    let report = run_batch(&a, &b, &scenarios, &seeds, args.max_turns)?;
    if let Some(p) = &args.transcripts {
        fs::write(p, eval::write_jsonl(&report.transcripts))
            .with_context(|| format!("writing {}", p.display()))?;
    }
    let text = match args.format {
        TableFormat::Csv => report.to_csv(),
        TableFormat::Json => format!("{}\n", serde_json::to_string_pretty(&report)?),
    };
    eprintln!(
        "{} vs {}: {} games, mean utility {:.2}, correct {:.3}, mean length {:.2}",
        a, b, report.overall.games, report.overall.mean_utility, report.overall.correct_rate,
        report.overall.mean_length
    );
    emit(args.out.as_deref(), &text)
}

fn evaluate(args: EvalArgs) -> Result<()> {
    let cfg = args.config.resolve()?;
    let policies: Vec<PolicySpec> = args
        .policies
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|p| PolicySpec::parse(p, &cfg))
        .collect::<Result<_, _>>()?;
    if policies.is_empty() {
        bail!("no policies given");
    }
    let data = eval::read_jsonl(&read(&args.data)?)?;
    let opts = EvalOptions { resamples: args.resamples, level: args.level, seed: args.seed };
    let report = eval::evaluate(&data, &policies, &opts)?;
    eprintln!("kept {} of {} games", report.games_kept, report.games_read);
    let text = match args.format {
        TableFormat::Json => {
            let mut v = serde_json::to_value(&report)?;
            if !args.per_action {
                for p in v["policies"].as_array_mut().expect("policies array") {
                    p.as_object_mut().expect("policy object").remove("per_action");
                }
            }
            format!("{}\n", serde_json::to_string_pretty(&v)?)
        }
        TableFormat::Csv => {
            let mut s = String::from("policy,actions,mean_ll,ci_low,ci_high,mean_rank,illegal_actions,fallbacks\n");
            for p in &report.policies {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    p.policy, p.actions, p.mean_ll, p.ci.0, p.ci.1, p.mean_rank, p.illegal_actions, p.fallbacks
                ));
            }
            s
        }
    };
    emit(args.out.as_deref(), &text)
}

fn marginals(args: MarginalsArgs) -> Result<()> {
    let cfg = args.config.resolve()?;
    let scenario = match (&args.scenario, args.seed) {
        (Some(p), _) => read_scenarios(p)?.into_iter().next().ok_or_else(|| anyhow!("no scenario in file"))?,
        (None, Some(seed)) => scenario_gen::generate(seed)?,
        (None, None) => bail!("give --scenario or --seed"),
    };
    let viewer = match &args.viewer {
        Some(v) => Some(Role::parse(v).ok_or_else(|| anyhow!("unknown role {v:?}"))?),
        None => None,
    };
    let prior = match args.prior {
        PriorArg::Constrained => PriorKind::Constrained,
        PriorArg::Unconstrained => PriorKind::Unconstrained,
    };
    let actions = parse_action_list(&args.actions, &Vocabulary::default())?;
    let report = marginals_demo(&scenario, &actions, viewer, &cfg, prior)?;
    let text = match args.format {
        TextFormat::Text => report.render(),
        TextFormat::Json => format!("{}\n", serde_json::to_string_pretty(&report)?),
    };
    emit(args.out.as_deref(), &text)
}

fn serve(args: ServeArgs) -> Result<()> {
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(jigsaw_service::serve(args.port, jigsaw_service::ServiceOptions { export: args.export }))?;
    Ok(())
}
