use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use collapse_core::lab::{self, EmitFormat, ScenarioConfig};
use collapse_core::lie::{self, NilpotentLieAlgebra};
use collapse_core::spectral_sequence::{e_infinity, predict_small_count, BigradedComplex, ComplexSpec};
use collapse_core::superconnection::{spectrum, BundleSpec};
use collapse_core::scalar::rational_to_string;
use collapse_core::{Error, RationalLieAlgebra, SmallEigenvalueRule};
use serde_json::{json, Value};

const EXIT_VALIDATION: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_ACCEPTANCE: u8 = 3;

#[derive(Parser)]
#[command(name = "collapse-lab", version, about = "Small eigenvalues of collapsing nilpotent fiber bundles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate an algebra, bundle, complex or scenario file.
    Validate { model: PathBuf },
    /// Invariants of a nilpotent Lie algebra given by preset name or JSON file.
    Lie {
        #[arg(value_enum)]
        what: LieQuery,
        algebra: String,
    },
    /// Lowest eigenvalues of the superconnection Laplacian of a bundle.
    Spectrum {
        bundle: PathBuf,
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = 8)]
        modes: usize,
    },
    /// Spectral sequence pages of a complex or bundle file.
    Ss { complex: PathBuf },
    /// Run a scenario file or preset and write json, csv and plot data.
    Run {
        scenario: String,
        #[arg(long)]
        out: PathBuf,
        /// Exit with status 3 when an acceptance rule fails.
        #[arg(long)]
        check: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum LieQuery {
    Betti,
    Curvature,
}

fn read_json(path: &Path) -> anyhow::Result<Value> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(serde_json::from_str(&text).map_err(Error::from)?)
}

fn load_algebra(arg: &str) -> anyhow::Result<RationalLieAlgebra> {
    let path = Path::new(arg);
    if path.exists() {
        let spec: lie::AlgebraSpec = serde_json::from_value(read_json(path)?).map_err(Error::from)?;
        Ok(NilpotentLieAlgebra::from_spec(&spec)?)
    } else {
        Ok(NilpotentLieAlgebra::preset(arg)?)
    }
}

fn print(v: &Value) {
    let text = serde_json::to_string_pretty(v).expect("json values serialize");
    // a closed pipe is not an error for a filter-style command
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn validate(path: &Path) -> anyhow::Result<()> {
    let v = read_json(path)?;
    if v.get("kind").is_some() && v.get("model").is_some() {
        let cfg = ScenarioConfig::from_path(path)?;
        print(&json!({"type": "scenario", "name": cfg.name, "kind": cfg.kind, "valid": true}));
    } else if v.get("base").is_some() {
        let spec: BundleSpec = serde_json::from_value(v).map_err(Error::from)?;
        let sc = spec.build()?;
        let flat = sc.validate(1e-12)?;
        spec.metric().prepare(&sc.to_f64())?;
        print(&json!({"type": "bundle", "ranks": sc.ranks, "flatness": flat, "valid": true}));
    } else if v.get("dims").is_some() {
        let spec: ComplexSpec = serde_json::from_value(v).map_err(Error::from)?;
        let c = BigradedComplex::from_spec(&spec)?;
        print(&json!({"type": "complex", "betti": c.betti()?, "valid": true}));
    } else {
        let spec: lie::AlgebraSpec = serde_json::from_value(v).map_err(Error::from)?;
        let alg = NilpotentLieAlgebra::from_spec(&spec)?;
        let report = lie::validate(&alg, 0.0);
        let ok = report.ok();
        print(&json!({"type": "algebra", "dim": alg.dim(), "report": report, "valid": ok}));
        if !ok {
            return Err(Error::InvalidInput("algebra failed validation".into()).into());
        }
    }
    Ok(())
}

fn lie_query(what: LieQuery, arg: &str) -> anyhow::Result<()> {
    let alg = load_algebra(arg)?;
    match what {
        LieQuery::Betti => print(&json!({"algebra": arg, "betti": lie::betti(&alg, 0.0)})),
        LieQuery::Curvature => {
            let (exact, _) = lie::curvature::scalar_curvature_exact(&alg);
            let k = lie::scalar_curvature(&alg)?;
            print(&json!({
                "algebra": arg,
                "scalar_curvature": k.value(),
                "exact": rational_to_string(&exact),
                "from_structure_constants": k.from_structure_constants,
            }))
        }
    }
    Ok(())
}

fn spectrum_cmd(path: &Path, p: usize, modes: usize) -> anyhow::Result<()> {
    let spec: BundleSpec = serde_json::from_value(read_json(path)?).map_err(Error::from)?;
    let sc = spec.build()?.to_f64();
    let report = spectrum(&sc, &spec.metric(), p, Some(modes), &SmallEigenvalueRule::default())?;
    print(&serde_json::to_value(report)?);
    Ok(())
}

fn ss_cmd(path: &Path) -> anyhow::Result<()> {
    let v = read_json(path)?;
    if v.get("base").is_some() {
        let spec: BundleSpec = serde_json::from_value(v).map_err(Error::from)?;
        let sc = spec.build()?;
        let report = e_infinity(&BigradedComplex::minimal_model(&sc)?)?;
        let top = sc.base.dim() + sc.top_degree();
        let predictions = (0..=top).map(|p| predict_small_count(&sc, p)).collect::<Result<Vec<_>, _>>()?;
        print(&json!({"spectral_sequence": report, "predictions": predictions}));
    } else {
        let spec: ComplexSpec = serde_json::from_value(v).map_err(Error::from)?;
        print(&json!({"spectral_sequence": e_infinity(&BigradedComplex::from_spec(&spec)?)?}));
    }
    Ok(())
}

fn run_cmd(scenario: &str, out: &Path, check: bool) -> anyhow::Result<bool> {
    let path = Path::new(scenario);
    let cfg = if path.exists() { ScenarioConfig::from_path(path)? } else { ScenarioConfig::preset(scenario)? };
    let report = lab::run(&cfg)?;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    for f in [EmitFormat::Json, EmitFormat::Csv, EmitFormat::Plotdata] {
        let file = out.join(format!("{}.{}", report.scenario, f.extension()));
        lab::emit(&report, f, &file)?;
    }
    for c in &report.checks {
        let degree = c.degree.map(|p| format!(" p={p}")).unwrap_or_default();
        let status = if c.passed { "pass" } else { "FAIL" };
        println!("{status} {}{degree}: {}", c.rule, c.detail);
    }
    println!("wrote {} to {}", report.scenario, out.display());
    Ok(!check || report.passed())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(e) if !e.is_validation() => EXIT_NUMERICAL,
        _ => EXIT_VALIDATION,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate { model } => validate(&model).map(|_| true),
        Command::Lie { what, algebra } => lie_query(what, &algebra).map(|_| true),
        Command::Spectrum { bundle, p, modes } => spectrum_cmd(&bundle, p, modes).map(|_| true),
        Command::Ss { complex } => ss_cmd(&complex).map(|_| true),
        Command::Run { scenario, out, check } => run_cmd(&scenario, &out, check),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("acceptance check failed");
            ExitCode::from(EXIT_ACCEPTANCE)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
