use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aifs_core::catalog::{list_catalog, run_catalog};
use aifs_core::cycles::{discover_cycles, MAX_PERIOD};
use aifs_core::fourier::{eval_mu_hat_exact, FourierKernel, TruncationPolicy};
use aifs_core::hadamard::make_dual_pair;
use aifs_core::linalg::parse_vector;
use aifs_core::pipeline::{analyze_triple, conjecture_probe, PipelineConfig, Verdict};
use aifs_core::spectrum::spectrum_from_cycles;
use aifs_core::system_file::SystemFile;
use aifs_core::torus::{
    find_zeros, invariant_superset, lemconf_verdict, orbit, orthogonality_bound_distance, orthogonality_bound_finite,
    LemconfVerdict, TorusPoint, DEFAULT_ZERO_GRID,
};
use aifs_core::{AifsError, AttractorMode, VERSION};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

const EXIT_NEGATIVE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "aifs", version, about = "Spectral analysis of affine iterated function systems")]
struct Cli {
    /// Output format; csv is only available for point clouds.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Certify a Hadamard triple (R, B, L).
    CheckHadamard {
        #[arg(long)]
        triple: PathBuf,
    },
    /// Points of the attractor X_B.
    Attractor {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        /// Use the chaos game with this many points instead of full enumeration.
        #[arg(long)]
        chaos: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Significant digits per coordinate in CSV output.
        #[arg(long, default_value_t = 17, value_parser = clap::value_parser!(u8).range(1..=17))]
        precision: u8,
    },
    /// Truncated Fourier transform of the invariant measure at a point.
    MuHat {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        point: String,
        #[arg(long, default_value_t = 64)]
        terms: usize,
    },
    /// Zeros of m_B in [0,1)^d.
    Zeros {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ZERO_GRID)]
        grid: usize,
    },
    /// Orbit of a point under x -> R^T x mod Z^d.
    Orbit {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        point: String,
        #[arg(long, default_value_t = 100_000)]
        max_steps: usize,
    },
    /// Upper bounds on families of mutually orthogonal exponentials.
    Bound {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ZERO_GRID)]
        grid: usize,
        #[arg(long, default_value_t = 4096)]
        horizon: usize,
    },
    /// p^n D_n for R = pI_d and simplex digits.
    Dn {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 5)]
        n: u32,
    },
    /// W_B-cycles of a triple.
    Cycles {
        #[arg(long)]
        triple: PathBuf,
    },
    /// Candidate spectrum generated by the W_B-cycles.
    Spectrum {
        #[arg(long)]
        triple: PathBuf,
        #[arg(long, default_value_t = 3)]
        level: usize,
    },
    /// Orthogonality certificates and Parseval evidence for the generated spectrum.
    VerifyOnb {
        #[arg(long)]
        triple: PathBuf,
        #[arg(long, default_value_t = 8)]
        level: usize,
        #[arg(long, default_value_t = 64)]
        terms: usize,
    },
    /// Built-in reference systems.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Runs the spectral pipeline on (R, B, L) and on (R^T, L, B).
    ProbeConjecture {
        #[arg(long)]
        triple: PathBuf,
        #[arg(long, default_value_t = 8)]
        level: usize,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    List,
    Run { name: String },
}

enum Failure {
    Usage(String),
    Core(AifsError),
}

impl From<AifsError> for Failure {
    fn from(e: AifsError) -> Self {
        Failure::Core(e)
    }
}

type CmdResult = Result<(Value, bool), Failure>;

struct Input {
    path: PathBuf,
    sha256: String,
    file: SystemFile,
}

fn load(path: &Path) -> Result<Input, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let file = SystemFile::from_json(&text)?;
    Ok(Input { path: path.to_path_buf(), sha256: hex::encode(Sha256::digest(&bytes)), file })
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn envelope(command: &str, input: Option<&Input>, result: Value) -> Value {
    json!({
        "tool": "aifs",
        "version": VERSION,
        "command": command,
        "input": input.map(|i| i.path.display().to_string()),
        "input_sha256": input.map(|i| i.sha256.clone()),
        "result": result,
    })
}

fn exit_code(e: &AifsError) -> u8 {
    match e {
        e if e.is_budget() => EXIT_BUDGET,
        AifsError::NotCertified { .. }
        | AifsError::CriterionInapplicable(_)
        | AifsError::RankDeficient { .. }
        | AifsError::NotWbCycle(_)
        | AifsError::NotExpansive { .. }
        | AifsError::Borderline { .. } => EXIT_NEGATIVE,
        _ => EXIT_USAGE,
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{text}").map_err(|e| Failure::Usage(e.to_string()))
        }
    }
}

fn attractor_csv(points: &[Vec<f64>], precision: usize) -> String {
    let d = points.first().map_or(0, Vec::len);
    let mut s = (0..d).map(|i| format!("x{i}")).collect::<Vec<_>>().join(",");
    s.push('\n');
    for p in points {
        s.push_str(&p.iter().map(|c| format!("{c:.*e}", precision - 1)).collect::<Vec<_>>().join(","));
        s.push('\n');
    }
    s
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    if cli.format == Format::Csv && !matches!(cli.command, Command::Attractor { .. }) {
        return Err(Failure::Usage("--format csv is only supported by `attractor`".into()));
    }
    let out = cli.out.as_deref();
    let (name, input, outcome): (&str, Option<Input>, CmdResult) = match &cli.command {
        Command::CheckHadamard { triple } => {
            let inp = load(triple)?;
            let t = inp.file.triple()?;
            let ok = t.is_certified();
            ("check-hadamard", Some(inp), Ok((to_value(&t), ok)))
        }
        Command::Attractor { system, depth, chaos, seed, precision } => {
            let inp = load(system)?;
            let sys = inp.file.system()?;
            let mode = match chaos {
                Some(points) => AttractorMode::ChaosGame { points: *points, seed: *seed },
                None => AttractorMode::Deterministic,
            };
            let cloud = sys.attractor(*depth, mode)?;
            if cli.format == Format::Csv {
                emit(attractor_csv(&cloud.points, *precision as usize).trim_end(), out)?;
                return Ok(true);
            }
            ("attractor", Some(inp), Ok((to_value(&cloud), true)))
        }
        Command::MuHat { system, point, terms } => {
            let inp = load(system)?;
            let sys = inp.file.system()?;
            let x = parse_vector(point)?;
            let policy = TruncationPolicy::with_terms(*terms)?;
            let kernel = FourierKernel::new(&sys)?;
            let mu = eval_mu_hat_exact(&sys, &kernel, &x, &policy)?;
            let v = json!({ "point": point, "mu_hat": mu, "abs": mu.abs() });
            ("mu-hat", Some(inp), Ok((v, true)))
        }
        Command::Zeros { system, grid } => {
            let inp = load(system)?;
            let sys = inp.file.system()?;
            let zs = find_zeros(&sys, *grid)?;
            ("zeros", Some(inp), Ok((to_value(&zs), true)))
        }
        Command::Orbit { system, point, max_steps } => {
            let inp = load(system)?;
            let s = inp.file.matrix()?.transpose();
            let x = TorusPoint::new(parse_vector(point)?);
            let o = orbit(&s, &x, *max_steps)?;
            ("orbit", Some(inp), Ok((to_value(&o), true)))
        }
        Command::Bound { system, grid, horizon } => {
            let inp = load(system)?;
            let sys = inp.file.system()?;
            let s = sys.matrix().transpose();
            let zs = find_zeros(&sys, *grid)?;
            let finite = match invariant_superset(&s, &zs.points, 10_000) {
                Ok(z) if zs.complete && !zs.has_families() => {
                    json!({ "z_prime": z, "size": z.len(), "bound": orthogonality_bound_finite(&z) })
                }
                Ok(_) => json!({ "error": "zero set is not a finite certified list" }),
                Err(e) => json!({ "error": e.to_string() }),
            };
            let distance = match orthogonality_bound_distance(&s, &zs, *horizon) {
                Ok(b) => to_value(&b),
                Err(e) => json!({ "error": e.to_string() }),
            };
            let any = finite.get("bound").is_some() || distance.get("bound").is_some();
            ("bound", Some(inp), Ok((json!({ "zeros": zs, "finite": finite, "distance": distance }), any)))
        }
        Command::Dn { p, d, n } => {
            let rep = lemconf_verdict(*p, *d, *n)?;
            let ok = rep.verdict == LemconfVerdict::CriterionTriggered;
            ("dn", None, Ok((to_value(&rep), ok)))
        }
        Command::Cycles { triple } => {
            let inp = load(triple)?;
            let t = inp.file.triple()?;
            let disc = discover_cycles(t.require_certified()?, MAX_PERIOD)?;
            ("cycles", Some(inp), Ok((to_value(&disc), true)))
        }
        Command::Spectrum { triple, level } => {
            let inp = load(triple)?;
            let t = inp.file.triple()?;
            let t = t.require_certified()?;
            let disc = discover_cycles(t, MAX_PERIOD)?;
            let sp = spectrum_from_cycles(&make_dual_pair(t)?.dual, &disc.wb_cycles, *level)?;
            ("spectrum", Some(inp), Ok((to_value(&sp), true)))
        }
        Command::VerifyOnb { triple, level, terms } => {
            let inp = load(triple)?;
            let t = inp.file.triple()?;
            let config = PipelineConfig { level: *level, policy: TruncationPolicy::with_terms(*terms)?, ..PipelineConfig::default() };
            let rep = analyze_triple(&t, &config)?;
            let v = json!({
                "orthogonality": rep.orthogonality,
                "ortho_level": rep.ortho_level,
                "completeness": rep.completeness,
                "cycles": rep.cycles.wb_cycles,
                "verdict": rep.verdict,
            });
            ("verify-onb", Some(inp), Ok((v, rep.verdict == Verdict::SpectralEvidence)))
        }
        Command::Catalog { action: CatalogAction::List } => {
            let entries: Vec<Value> = list_catalog()?
                .iter()
                .map(|e| json!({ "name": e.name, "anchor": e.anchor, "cycles_complete": e.cycles_complete }))
                .collect();
            ("catalog list", None, Ok((json!(entries), true)))
        }
        Command::Catalog { action: CatalogAction::Run { name } } => {
            let rep = run_catalog(name)?;
            let ok = rep.passed;
            ("catalog run", None, Ok((to_value(&rep), ok)))
        }
        Command::ProbeConjecture { triple, level } => {
            let inp = load(triple)?;
            let t = inp.file.triple()?;
            let config = PipelineConfig { level: *level, ..PipelineConfig::default() };
            let probe = conjecture_probe(&t, &config)?;
            ("probe-conjecture", Some(inp), Ok((to_value(&probe), true)))
        }
    };
    let (result, ok) = outcome?;
    let report = envelope(name, input.as_ref(), result);
    emit(&serde_json::to_string_pretty(&report).expect("reports serialize"), out)?;
    Ok(ok)
}

fn configure_threads() {
    if let Some(n) = std::env::var("AIFS_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    configure_threads();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_NEGATIVE),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
