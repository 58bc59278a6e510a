//! Command-line front end.

use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use riodbg_bench::{
    generate_instance, load_dataset, read_bundle, run_benchmark, write_bundle, AlignedInstance, BenchConfig,
    InstanceSpec, PriorProfile, TargetMode,
};
use riodbg_core::diagnosis::parse_priors;
use riodbg_core::session::{PendingQuery, SessionStatus};
use riodbg_core::{
    leading_diagnoses, parse_dpi, Answer, AxiomProbs, CautiousnessState, DiagnosisProblem, Diagnosis, FaultPriors,
    Oracle, QueryOptions, Session, SessionConfig, SimulatedOracle, StrategyKind,
};

#[derive(Debug, Parser)]
#[command(name = "riodbg", version, about = "Interactive debugging of faulty propositional knowledge bases")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the most probable minimal diagnoses of a DPI.
    Diagnose(DiagnoseArgs),
    /// Run a debugging session, writing its trace as JSONL.
    Session(SessionArgs),
    /// Run the strategy comparison on generated or stored instances.
    Bench(BenchArgs),
    /// Serve the `/v1` session API over HTTP.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// A `.dpi` file or an instance bundle directory.
    pub input: PathBuf,
    /// Fault priors: `good`/`misleading` (bundles only) or `file=PATH`.
    /// Without it, bundles use `good` and DPI files a uniform 0.01.
    #[arg(long)]
    pub priors: Option<String>,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Number of leading diagnoses.
    #[arg(long, default_value_t = 9)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct SessionArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value = "rio", value_parser = parse_strategy)]
    pub strategy: StrategyKind,
    #[arg(long, default_value_t = 9)]
    pub n: usize,
    #[arg(long, default_value_t = 0.85)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0.25)]
    pub c: f64,
    #[arg(long, default_value_t = 0.0)]
    pub c_min: f64,
    #[arg(long, default_value_t = 4.0 / 9.0)]
    pub c_max: f64,
    #[arg(long, default_value_t = 0.25)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `interactive`, or `target=FILE` with the target diagnosis as axiom ids.
    #[arg(long, default_value = "interactive")]
    pub oracle: String,
    /// Write the trace here instead of stdout.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Also offer implications between literals as query material.
    #[arg(long)]
    pub implications: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Directory of instance bundles.
    #[arg(long, conflicts_with = "generate")]
    pub dataset: Option<PathBuf>,
    /// Number of instances to generate.
    #[arg(long, default_value_t = 20)]
    pub generate: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = BenchConfig::default().sigma)]
    pub sigma: f64,
    /// `reference` or `adversarial:K`.
    #[arg(long, default_value = "reference", value_parser = parse_target_mode)]
    pub target: TargetMode,
    /// Offer implications between literals as query material.
    #[arg(long, default_value_t = BenchConfig::default().query_options.implications, action = clap::ArgAction::Set)]
    pub implications: bool,
    /// Worker threads, 0 for all cores.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// CSV output file (stdout by default).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also store the instances as bundles under this directory.
    #[arg(long)]
    pub write_dataset: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: std::net::IpAddr,
    /// Seconds of inactivity after which a session is dropped.
    #[arg(long, default_value_t = 3600)]
    pub idle_timeout: u64,
}

fn parse_strategy(s: &str) -> Result<StrategyKind, String> {
    s.parse::<StrategyKind>().map_err(|e| e.to_string())
}

fn parse_target_mode(s: &str) -> Result<TargetMode, String> {
    if s == "reference" {
        return Ok(TargetMode::FromReference);
    }
    s.strip_prefix("adversarial:")
        .and_then(|k| k.parse().ok())
        .filter(|&k| k > 0)
        .map(TargetMode::Adversarial)
        .ok_or_else(|| format!("expected `reference` or `adversarial:K`, got `{s}`"))
}

/// An input path that does not exist; reported with exit status 2.
#[derive(Debug)]
pub struct MissingInput(pub PathBuf);

impl std::fmt::Display for MissingInput {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "no such file or directory: {}", self.0.display())
    }
}

impl std::error::Error for MissingInput {}

/// Runs a parsed command line; the returned code is the process exit status.
pub fn run(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Diagnose(args) => diagnose(args),
        Command::Session(args) => session(args),
        Command::Bench(args) => bench(args),
        Command::Serve(args) => serve(args),
    }
}

/// Exit status for an error out of [`run`].
pub fn exit_code(error: &anyhow::Error) -> i32 {
    if error.downcast_ref::<MissingInput>().is_some() {
        2
    } else {
        1
    }
}

struct Loaded {
    dpi: DiagnosisProblem,
    priors: FaultPriors,
}

fn load(args: &InputArgs) -> anyhow::Result<Loaded> {
    let path = &args.input;
    if !path.exists() {
        return Err(MissingInput(path.clone()).into());
    }
    let bundle = if path.is_dir() {
        Some(read_bundle(path).with_context(|| format!("reading bundle {}", path.display()))?)
    } else {
        None
    };
    let dpi = match &bundle {
        Some(inst) => inst.dpi(),
        None => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            parse_dpi(&text).with_context(|| format!("parsing {}", path.display()))?
        }
    };
    let priors = match (args.priors.as_deref(), &bundle) {
        (Some(spec), _) if spec.starts_with("file=") => {
            let file = Path::new(&spec["file=".len()..]);
            if !file.exists() {
                return Err(MissingInput(file.to_owned()).into());
            }
            let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
            parse_priors(&text).with_context(|| format!("parsing {}", file.display()))?
        }
        (Some(spec), Some(inst)) => profile_priors(spec, inst)?,
        (Some(spec), None) => bail!("prior profile `{spec}` needs an instance bundle; use file=PATH for DPI files"),
        (None, Some(inst)) => PriorProfile::Good.priors(inst),
        (None, None) => FaultPriors::Axiom { probs: Default::default(), default: Some(0.01) },
    };
    Ok(Loaded { dpi, priors })
}

fn profile_priors(spec: &str, inst: &AlignedInstance) -> anyhow::Result<FaultPriors> {
    let profile: PriorProfile = spec.parse().map_err(|e| anyhow!("{e}"))?;
    Ok(profile.priors(inst))
}

fn diagnose(args: DiagnoseArgs) -> anyhow::Result<i32> {
    let Loaded { dpi, priors } = load(&args.input)?;
    let pax = AxiomProbs::new(&dpi.o, &priors)?;
    let found = leading_diagnoses(&dpi, args.n, &pax)?;
    if found == [Diagnosis::empty()] {
        println!("already complying: no axiom needs to be removed");
        return Ok(0);
    }
    let probs = normalized(&found, &pax);
    for (d, p) in found.iter().zip(probs) {
        println!("{p:.6}\t{}", d.render(&dpi.o));
    }
    Ok(0)
}

fn normalized(found: &[Diagnosis], pax: &AxiomProbs) -> Vec<f64> {
    let raw: Vec<f64> = found.iter().map(|d| riodbg_core::diagnosis_prob(d, pax)).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|p| p / total).collect()
}

type AnswerFn = dyn FnMut(&Session, &PendingQuery) -> anyhow::Result<Answer>;

fn session(args: SessionArgs) -> anyhow::Result<i32> {
    let Loaded { dpi, priors } = load(&args.input)?;
    let mut config = SessionConfig::new(args.strategy, priors);
    config.n = args.n;
    config.sigma = args.sigma;
    config.seed = args.seed;
    config.cautiousness = CautiousnessState::new(args.c, args.c_min, args.c_max, args.epsilon)?;
    config.query_options = QueryOptions { implications: args.implications };

    let mut oracle: Box<AnswerFn> = match args.oracle.as_str() {
        "interactive" => Box::new(ask),
        spec => {
            let Some(file) = spec.strip_prefix("target=") else {
                bail!("unknown oracle `{spec}`; expected `interactive` or `target=FILE`");
            };
            let target = read_target(Path::new(file), &dpi)?;
            let mut simulated = SimulatedOracle::for_dpi(&dpi, &target);
            Box::new(move |_, p| Ok(simulated.answer(&p.query.axioms)))
        }
    };

    let outcome = match Session::start(dpi, config) {
        Ok(mut s) => {
            while let Some(pending) = s.pending().cloned() {
                let answer = oracle(&s, &pending)?;
                // Failures end the session; they are reported below.
                let _ = s.step(pending.id, answer);
            }
            Ok(s)
        }
        Err(failure) => Err(failure),
    };
    let (trace, result) = match &outcome {
        Ok(s) => (s.trace().clone(), s.status().clone()),
        Err(failure) => (failure.trace.clone(), SessionStatus::Failed),
    };
    match &args.trace {
        Some(path) => fs::write(path, trace.to_jsonl()).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{}", trace.to_jsonl()),
    }
    match (&outcome, result) {
        (Ok(s), SessionStatus::Accepted) => {
            let d = s.result().expect("accepted sessions have a result");
            eprintln!("accepted {} after {} queries", d.render(&s.dpi().o), trace.queries());
            Ok(0)
        }
        (Ok(s), _) => {
            eprintln!("session failed: {}", s.error().map(ToString::to_string).unwrap_or_default());
            Ok(1)
        }
        (Err(failure), _) => {
            eprintln!("session failed: {failure}");
            Ok(1)
        }
    }
}

fn read_target(path: &Path, dpi: &DiagnosisProblem) -> anyhow::Result<Diagnosis> {
    if !path.exists() {
        return Err(MissingInput(path.to_owned()).into());
    }
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let ids: Vec<&str> = text.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()).collect();
    Diagnosis::from_ids(&dpi.o, &ids).ok_or_else(|| anyhow!("target {} names axioms not in O", path.display()))
}

fn ask(s: &Session, pending: &PendingQuery) -> anyhow::Result<Answer> {
    let mut err = io::stderr().lock();
    let (dx, dnx, dz) = pending.query.partition.sizes();
    writeln!(err, "\nround {}: {} leading diagnoses", s.trace().queries() + 1, s.diagnoses().len())?;
    for (d, p) in s.diagnoses().iter().zip(s.probabilities()) {
        writeln!(err, "  {p:.4}  {}", d.render(&s.dpi().o))?;
    }
    writeln!(err, "Should the intended knowledge base entail all of the following?")?;
    for axiom in pending.query.rendered() {
        writeln!(err, "  {axiom}")?;
    }
    writeln!(err, "(|DX| = {dx}, |DNX| = {dnx}, |D0| = {dz})")?;
    let stdin = io::stdin();
    loop {
        write!(err, "[y/n] ")?;
        err.flush()?;
        let mut line = String::new();
        if stdin.lock().read_line(&mut line)? == 0 {
            bail!("input closed before the session ended");
        }
        match line.trim().to_ascii_lowercase().as_str() {
            "y" | "yes" | "t" => return Ok(Answer::Yes),
            "n" | "no" | "f" => return Ok(Answer::No),
            _ => writeln!(err, "please answer y or n")?,
        }
    }
}

fn bench(args: BenchArgs) -> anyhow::Result<i32> {
    let instances = match &args.dataset {
        Some(dir) => {
            if !dir.exists() {
                return Err(MissingInput(dir.clone()).into());
            }
            load_dataset(dir)?
        }
        None => (0..args.generate)
            .map(|i| generate_instance(&InstanceSpec::desk(args.seed + i), args.seed + i))
            .collect::<Result<_, _>>()?,
    };
    if instances.is_empty() {
        bail!("no instances to run");
    }
    if let Some(dir) = &args.write_dataset {
        for inst in &instances {
            write_bundle(&dir.join(&inst.id), inst)?;
        }
    }
    let mut config = BenchConfig { sigma: args.sigma, target: args.target, seed: args.seed, threads: args.threads, ..BenchConfig::default() };
    config.query_options.implications = args.implications;
    let report = run_benchmark(&instances, &StrategyKind::ALL, &[PriorProfile::Good, PriorProfile::Misleading], &config);
    match &args.out {
        Some(path) => report.write_csv(fs::File::create(path).with_context(|| format!("creating {}", path.display()))?)?,
        None => report.write_csv(io::stdout().lock())?,
    }
    let mut err = io::stderr().lock();
    writeln!(err, "profile     strategy      runs  mean_q  found")?;
    for a in report.aggregates() {
        writeln!(err, "{:<11} {:<9} {:>8} {:>7.2} {:>6}", a.profile, a.strategy.as_str(), a.runs, a.mean_q, a.found_target)?;
    }
    for profile in [Some("good"), Some("misleading"), None] {
        let t = report.trend(profile);
        writeln!(
            err,
            "{:<11} rio {:.2} vs worse {:.2}; rio best in {:.0}% of sessions",
            profile.unwrap_or("all"),
            t.mean_rio,
            t.mean_worse,
            100.0 * t.rio_best_fraction
        )?;
    }
    let failed = report.rows.iter().filter(|r| !r.found_target).count();
    if failed > 0 {
        writeln!(err, "{failed} sessions did not identify their target")?;
    }
    Ok(0)
}

fn serve(args: ServeArgs) -> anyhow::Result<i32> {
    let runtime = tokio::runtime::Runtime::new()?;
    let addr = std::net::SocketAddr::new(args.host, args.port);
    runtime.block_on(crate::service::serve(addr, Duration::from_secs(args.idle_timeout)))?;
    Ok(0)
}
