//! Command-line front end.
//!
//! Every command reads a population file, runs one analysis and emits its
//! artifacts. Without `--out` the primary artifact goes to stdout; with it,
//! all artifacts are written into that directory and their paths are listed.
//! Failures are reported on stderr as one JSON object and mapped to exit codes:
//! 1 I/O, 2 validation, 3 cap exceeded, 4 cross-check mismatch.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use mixpop_core::dynamics::{is_equilibrium, replay, simulate};
use mixpop_core::invariant::{
    characterize, psi_candidates, CandidateSet, PsiCandidate, DEFAULT_ENUMERATION_CAP,
};
use mixpop_core::oracle::{
    build_graph, is_invariant, minimal_invariant_sets, Escape, MinimalSetReport, DEFAULT_GRAPH_CAP,
};
use mixpop_core::population::{draft_from_json, validate_spec};
use mixpop_core::report::{
    read_activation_log, write_activation_log, write_f_profile_csv, write_states_csv,
    write_trajectory_csv,
};
use mixpop_core::stability::{
    check, theorem_window, Method, StabilityVerdict, DEFAULT_NEIGHBOUR_CAP,
};
use mixpop_core::synchronous::{
    f_profile, find_cycles_beta_all, find_cycles_f, ScalarCycles, StateCycles,
};
use mixpop_core::{BenchmarkQuad, PopulationSpec, State};
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_CAP: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "mixpop",
    version,
    about = "Best-response dynamics of coordinator/anticoordinator populations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Population file (JSON).
    #[arg(long, global = true)]
    pub spec: Option<PathBuf>,

    /// Seed for random activation sampling.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Number of activations to simulate.
    #[arg(long, global = true, default_value_t = 1000)]
    pub steps: usize,

    /// Initial state "x1,..,xb|x'b',..,x'1"; all agents playing B when omitted.
    #[arg(long, global = true)]
    pub init: Option<String>,

    /// Upper bound on enumerated sets, neighbourhoods and transition graphs.
    #[arg(long = "cap-states", global = true)]
    pub cap_states: Option<u128>,

    /// Stability method; all three are run and compared when omitted.
    #[arg(long, global = true, value_enum)]
    pub method: Option<MethodArg>,

    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a population file and report every violation.
    Validate,
    /// Random asynchronous trajectory.
    Simulate,
    /// Trajectory driven by an activation log.
    Replay {
        /// CSV with columns role, type, from.
        #[arg(long)]
        log: PathBuf,
    },
    /// Acceptable pairs and the invariant sets they generate.
    Characterize,
    /// Stability verdict for each characterized set.
    Stability,
    /// Synchronous dynamics: scalar map profile and cycles of the full map.
    Sync,
    /// Terminal classes of the transition graph, checked against characterize.
    Oracle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Theorem,
    Proposition,
    Onestep,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Theorem => Method::Theorem,
            MethodArg::Proposition => Method::Proposition,
            MethodArg::Onestep => Method::OneStep,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    Usage(String),
    Core(mixpop_core::Error),
    Mismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => EXIT_IO,
            CliError::Usage(_) => EXIT_VALIDATION,
            CliError::Core(mixpop_core::Error::CapExceeded { .. }) => EXIT_CAP,
            CliError::Core(mixpop_core::Error::Io(_)) => EXIT_IO,
            CliError::Core(_) => EXIT_VALIDATION,
            CliError::Mismatch(_) => EXIT_MISMATCH,
        }
    }

    fn kind(&self) -> &'static str {
        match self.exit_code() {
            EXIT_IO => "io",
            EXIT_CAP => "cap",
            EXIT_MISMATCH => "mismatch",
            _ => "validation",
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Io { path, source } => format!("{}: {source}", path.display()),
            CliError::Usage(m) | CliError::Mismatch(m) => m.clone(),
            CliError::Core(e) => e.to_string(),
        }
    }

    /// The machine-readable form written to stderr.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct ErrorOut<'a> {
            error: &'a str,
            message: String,
            exit_code: i32,
        }
        serde_json::to_string(&ErrorOut {
            error: self.kind(),
            message: self.message(),
            exit_code: self.exit_code(),
        })
        .expect("error serializes")
    }
}

impl From<mixpop_core::Error> for CliError {
    fn from(e: mixpop_core::Error) -> Self {
        CliError::Core(e)
    }
}

type CliResult<T> = Result<T, CliError>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = write!(stdout, "{e}");
            return EXIT_OK;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("");
            let err = CliError::Usage(first.trim_start_matches("error: ").to_string());
            let _ = writeln!(stderr, "{}", err.to_json());
            return err.exit_code();
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => EXIT_OK,
        Err(err) => {
            let _ = writeln!(stderr, "{}", err.to_json());
            err.exit_code()
        }
    }
}

/// Artifacts produced by one command, in emission order; the first is primary.
struct Artifacts(Vec<(String, Vec<u8>)>);

impl Artifacts {
    fn json<T: Serialize>(name: &str, value: &T) -> Self {
        let mut bytes = serde_json::to_vec_pretty(value).expect("report serializes");
        bytes.push(b'\n');
        Artifacts(vec![(name.to_string(), bytes)])
    }

    fn push(&mut self, name: String, bytes: Vec<u8>) {
        self.0.push((name, bytes));
    }

    fn emit(self, out: Option<&Path>, stdout: &mut dyn Write) -> CliResult<()> {
        let stdout_err = |source| CliError::Io {
            path: PathBuf::from("<stdout>"),
            source,
        };
        match out {
            None => stdout.write_all(&self.0[0].1).map_err(stdout_err),
            Some(dir) => {
                fs::create_dir_all(dir).map_err(|source| CliError::Io {
                    path: dir.to_path_buf(),
                    source,
                })?;
                for (name, bytes) in &self.0 {
                    let path = dir.join(name);
                    fs::write(&path, bytes).map_err(|source| CliError::Io {
                        path: path.clone(),
                        source,
                    })?;
                    writeln!(stdout, "{}", path.display()).map_err(stdout_err)?;
                }
                Ok(())
            }
        }
    }
}

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn spec_path(cli: &Cli) -> CliResult<&Path> {
    cli.spec
        .as_deref()
        .ok_or_else(|| CliError::Usage("--spec is required".to_string()))
}

fn load_spec(cli: &Cli) -> CliResult<PopulationSpec> {
    Ok(PopulationSpec::from_json(&read_file(spec_path(cli)?)?)?)
}

fn initial_state(cli: &Cli, spec: &PopulationSpec) -> CliResult<State> {
    match &cli.init {
        Some(literal) => Ok(State::parse(spec, literal)?),
        None => Ok(State::zeros(spec)),
    }
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> mixpop_core::Result<()>) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

fn quad_name(bm: &BenchmarkQuad) -> String {
    format!("{}_{}_{}_{}", bm.p, bm.q, bm.q_c, bm.p_c)
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> CliResult<()> {
    let (artifacts, failure) = match &cli.command {
        Command::Validate => validate(cli)?,
        Command::Simulate => (simulate_cmd(cli)?, None),
        Command::Replay { log } => (replay_cmd(cli, log)?, None),
        Command::Characterize => (characterize_cmd(cli)?, None),
        Command::Stability => stability_cmd(cli)?,
        Command::Sync => (sync_cmd(cli)?, None),
        Command::Oracle => oracle_cmd(cli)?,
    };
    artifacts.emit(cli.out.as_deref(), stdout)?;
    failure.map_or(Ok(()), Err)
}

fn validate(cli: &Cli) -> CliResult<(Artifacts, Option<CliError>)> {
    let draft = draft_from_json(&read_file(spec_path(cli)?)?)?;
    let report = validate_spec(&draft);
    let failure = (!report.ok)
        .then(|| CliError::Core(mixpop_core::Error::InvalidSpec(report.violations.clone())));
    Ok((Artifacts::json("validation.json", &report), failure))
}

fn simulate_cmd(cli: &Cli) -> CliResult<Artifacts> {
    let spec = load_spec(cli)?;
    let x0 = initial_state(cli, &spec)?;
    let traj = simulate(&spec, &x0, cli.steps, cli.seed);
    let mut out = Artifacts(vec![(
        "trajectory.csv".to_string(),
        csv_bytes(|b| write_trajectory_csv(&spec, &traj, b))?,
    )]);
    out.push(
        "activations.csv".to_string(),
        csv_bytes(|b| write_activation_log(&traj, b))?,
    );
    Ok(out)
}

fn replay_cmd(cli: &Cli, log: &Path) -> CliResult<Artifacts> {
    let spec = load_spec(cli)?;
    let x0 = initial_state(cli, &spec)?;
    let seq = read_activation_log(read_file(log)?.as_bytes())?;
    let traj = replay(&spec, &x0, &seq)?;
    Ok(Artifacts(vec![(
        "trajectory.csv".to_string(),
        csv_bytes(|b| write_trajectory_csv(&spec, &traj, b))?,
    )]))
}

#[derive(Serialize)]
struct CharacterizeReport {
    n: u32,
    candidates: Vec<PsiCandidate>,
    sets: Vec<CandidateSet>,
}

fn characterize_cmd(cli: &Cli) -> CliResult<Artifacts> {
    let spec = load_spec(cli)?;
    let cap = cli.cap_states.unwrap_or(DEFAULT_ENUMERATION_CAP);
    let sets = characterize(&spec, cap)?;
    let report = CharacterizeReport {
        n: spec.n(),
        candidates: psi_candidates(&spec)?,
        sets,
    };
    let mut out = Artifacts::json("characterize.json", &report);
    for set in &report.sets {
        if let Some(members) = &set.members {
            out.push(
                format!("members_{}.csv", quad_name(&set.benchmarks)),
                csv_bytes(|b| write_states_csv(&spec, members, b))?,
            );
        }
    }
    Ok(out)
}

#[derive(Serialize)]
#[serde(untagged)]
enum MethodOutcome {
    Verdict(Box<StabilityVerdict>),
    Skipped { method: Method, skipped: String },
}

#[derive(Serialize)]
struct SetStability {
    benchmarks: BenchmarkQuad,
    member_count: u128,
    observed_a: (u32, u32),
    theorem_window: (i64, i64),
    results: Vec<MethodOutcome>,
    methods_agree: bool,
}

fn stability_cmd(cli: &Cli) -> CliResult<(Artifacts, Option<CliError>)> {
    let spec = load_spec(cli)?;
    let enum_cap = cli.cap_states.unwrap_or(DEFAULT_ENUMERATION_CAP);
    let neighbour_cap = cli.cap_states.unwrap_or(DEFAULT_NEIGHBOUR_CAP);
    let methods: Vec<Method> = match cli.method {
        Some(m) => vec![m.into()],
        None => vec![Method::Theorem, Method::Proposition, Method::OneStep],
    };
    let mut report = Vec::new();
    for set in characterize(&spec, enum_cap)? {
        let members = set
            .members
            .as_ref()
            .ok_or(mixpop_core::Error::CapExceeded {
                what: "set enumeration",
                size: set.member_count,
                cap: enum_cap,
            })?;
        let mut results = Vec::new();
        for &method in &methods {
            match check(&spec, &set.benchmarks, members, method, neighbour_cap) {
                Ok(v) => results.push(MethodOutcome::Verdict(Box::new(v))),
                Err(
                    e @ (mixpop_core::Error::TheoremGuards(_)
                    | mixpop_core::Error::SeparationAssumption(_)),
                ) if methods.len() > 1 => results.push(MethodOutcome::Skipped {
                    method,
                    skipped: e.to_string(),
                }),
                Err(e) => return Err(e.into()),
            }
        }
        let verdicts: Vec<bool> = results
            .iter()
            .filter_map(|r| match r {
                MethodOutcome::Verdict(v) => Some(v.stable),
                MethodOutcome::Skipped { .. } => None,
            })
            .collect();
        let a = members.iter().map(State::a_count);
        report.push(SetStability {
            benchmarks: set.benchmarks,
            member_count: set.member_count,
            observed_a: (a.clone().min().unwrap_or(0), a.max().unwrap_or(0)),
            theorem_window: theorem_window(&spec, &set.benchmarks),
            methods_agree: verdicts.windows(2).all(|w| w[0] == w[1]),
            results,
        });
    }
    let disagreeing: Vec<String> = report
        .iter()
        .filter(|s| !s.methods_agree)
        .map(|s| s.benchmarks.to_string())
        .collect();
    let failure = (!disagreeing.is_empty()).then(|| {
        CliError::Mismatch(format!(
            "stability methods disagree for {}",
            disagreeing.join(", ")
        ))
    });
    Ok((Artifacts::json("stability.json", &report), failure))
}

#[derive(Serialize)]
struct SyncReport {
    scalar: ScalarCycles,
    full: StateCycles,
}

fn sync_cmd(cli: &Cli) -> CliResult<Artifacts> {
    let spec = load_spec(cli)?;
    let cap = cli.cap_states.unwrap_or(DEFAULT_GRAPH_CAP);
    let report = SyncReport {
        scalar: find_cycles_f(&spec),
        full: find_cycles_beta_all(&spec, cap)?,
    };
    let mut out = Artifacts::json("sync.json", &report);
    out.push(
        "f_profile.csv".to_string(),
        csv_bytes(|b| write_f_profile_csv(&f_profile(&spec), b))?,
    );
    Ok(out)
}

#[derive(Serialize)]
struct CandidateCheck {
    benchmarks: BenchmarkQuad,
    member_count: u128,
    /// Terminal classes lying inside the set.
    terminal_classes: usize,
    equal_to_terminal_class: bool,
    escape: Option<Escape>,
}

#[derive(Serialize)]
struct CrossCheck {
    ok: bool,
    candidates: Vec<CandidateCheck>,
    /// Terminal classes outside every characterized set (flagged, not an error).
    unmatched_terminal_classes: usize,
    equilibria: usize,
}

#[derive(Serialize)]
struct OracleReport {
    graph: MinimalSetReport,
    cross_check: CrossCheck,
}

fn oracle_cmd(cli: &Cli) -> CliResult<(Artifacts, Option<CliError>)> {
    let spec = load_spec(cli)?;
    let graph_cap = cli.cap_states.unwrap_or(DEFAULT_GRAPH_CAP);
    let enum_cap = cli.cap_states.unwrap_or(DEFAULT_ENUMERATION_CAP);
    let graph = build_graph(&spec, graph_cap)?;
    let candidates = characterize(&spec, enum_cap)?;
    let report = minimal_invariant_sets(&spec, &graph, &candidates);
    let checks: Vec<CandidateCheck> = candidates
        .iter()
        .map(|c| {
            let inside: Vec<_> = report
                .sets
                .iter()
                .filter(|s| s.members.iter().all(|x| c.contains(&spec, x)))
                .collect();
            CandidateCheck {
                benchmarks: c.benchmarks,
                member_count: c.member_count,
                terminal_classes: inside.len(),
                equal_to_terminal_class: inside
                    .iter()
                    .any(|s| s.members.len() as u128 == c.member_count),
                escape: c
                    .members
                    .as_ref()
                    .and_then(|m| is_invariant(&spec, m).err()),
            }
        })
        .collect();
    let bad: Vec<String> = checks
        .iter()
        .filter(|c| c.terminal_classes == 0 || c.escape.is_some())
        .map(|c| c.benchmarks.to_string())
        .collect();
    let cross_check = CrossCheck {
        ok: bad.is_empty(),
        unmatched_terminal_classes: report.unmatched().count(),
        equilibria: report
            .sets
            .iter()
            .filter(|s| s.members.len() == 1 && is_equilibrium(&spec, &s.members[0]))
            .count(),
        candidates: checks,
    };
    let failure = (!bad.is_empty()).then(|| {
        CliError::Mismatch(format!(
            "characterized sets not confirmed by the transition graph: {}",
            bad.join(", ")
        ))
    });
    let out = Artifacts::json(
        "oracle.json",
        &OracleReport {
            graph: report,
            cross_check,
        },
    );
    Ok((out, failure))
}
