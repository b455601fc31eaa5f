//! Command-line front end.
//!
//! Exit codes: 0 success, 1 failed verification, 2 configuration error,
//! 3 solver or I/O failure.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::config::RunConfig;
use crate::discretize::matched_domains;
use crate::error::Error;
use crate::model::{delta_of, ordering_preset, OrderingPreset};
use crate::transform::{reference_potential, target_potential};
use crate::verify::{
    check_analytic, check_intertwining, check_isospectral_refinement, convergence_sweep,
    eigen_suite, solve_picture, BOUND_IM_TOL, EigenSuiteReport, Picture, VerificationReport,
};

pub const EXIT_FAILED: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_RUNTIME: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "pdm-spectra", version, about = "Position-dependent-mass spectra: maps, solves and verification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the preset orderings and their mass-class exponents.
    Orderings,
    /// Tabulate q(x), mu, M and both potentials on the matched grid.
    Map(Common),
    /// Solve one picture and write its spectrum.
    Solve(SolveArgs),
    /// Run verification checks; exit 0 iff all pass.
    Verify(VerifyArgs),
    /// Error of one analytic level over the configured grid sizes.
    Sweep(Common),
    /// Print the default configuration.
    Defaults,
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON run configuration; command-line flags override its keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_parser = parse_picture)]
    pub picture: Option<Picture>,
    /// Number of interior grid nodes.
    #[arg(long)]
    pub n: Option<usize>,
    /// Seed for the eigensolver validation suite.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Record wall-clock runtimes in reports.
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: Common,
    /// Also write eigenvectors of the bound states as CSV.
    #[arg(long)]
    pub vectors: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value_t = Which::All)]
    pub which: Which,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Isospectral,
    Intertwine,
    Analytic,
    Eigen,
    All,
}

fn parse_picture(s: &str) -> Result<Picture, String> {
    s.parse()
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn runtime(e: Error) -> Failure {
    Failure::Runtime(e.to_string())
}

fn load(common: &Common) -> Result<RunConfig, Failure> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            RunConfig::from_json(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?
        }
        None => RunConfig::default(),
    };
    if let Some(n) = common.n {
        cfg.n = n;
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.out_dir = out.to_string_lossy().into_owned();
    }
    Ok(cfg)
}

fn spec_of(cfg: &RunConfig) -> Result<crate::model::ModelSpec, Failure> {
    cfg.model_spec().map_err(|e| Failure::Config(format!("invalid model: {e}")))
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf, Failure> {
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    write_atomic(&path, text.as_bytes())?;
    Ok(path)
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn orderings_table() -> String {
    let mut out = String::from("name,alpha,beta,gamma,delta\n");
    for p in OrderingPreset::ALL {
        let o = ordering_preset(p);
        let delta = match delta_of(&o) {
            Ok(d) => d.to_string(),
            Err(_) => "undefined (beta = -1)".into(),
        };
        writeln!(out, "{},{},{},{},{}", p, o.alpha(), o.beta(), o.gamma(), delta).unwrap();
    }
    out
}

fn cmd_map(common: &Common) -> Result<bool, Failure> {
    let cfg = load(common)?;
    let spec = spec_of(&cfg)?;
    let (grid_x, _) = matched_domains(&spec, cfg.n).map_err(|e| Failure::Config(e.to_string()))?;
    let map = spec.map();
    let mut csv = String::from("x,q,mu,M,ref_re,ref_im,target_re,target_im\n");
    for &x in &grid_x.nodes {
        let q = map.q_of_x(x).map_err(runtime)?;
        let pt = spec.profile.eval(x).map_err(runtime)?;
        let vr = reference_potential(&spec.generator, spec.alpha0, q);
        let vt = target_potential(&spec, x).map_err(runtime)?;
        let row = [x, q, pt.mu, pt.mass, vr.re, vr.im, vt.re, vt.im].map(num);
        writeln!(csv, "{}", row.join(",")).unwrap();
    }
    let path = Path::new(&cfg.out_dir).join("map.csv");
    write_atomic(&path, csv.as_bytes())?;
    println!("wrote {}", path.display());
    Ok(true)
}

#[derive(Serialize)]
struct EigenEntry {
    re: f64,
    im: f64,
    bound: bool,
    residual: Option<f64>,
}

#[derive(Serialize)]
struct SpectrumFile {
    picture: Picture,
    n: usize,
    generator: String,
    ordering: String,
    bound: Vec<Complex64>,
    eigenvalues: Vec<EigenEntry>,
}

fn cmd_solve(args: &SolveArgs) -> Result<bool, Failure> {
    let cfg = load(&args.common)?;
    let spec = spec_of(&cfg)?;
    let picture = args.common.picture.unwrap_or(Picture::Reference);
    let solved = solve_picture(&spec, picture, cfg.n, BOUND_IM_TOL, args.vectors).map_err(runtime)?;
    let s = &solved.spectrum;
    let file = SpectrumFile {
        picture,
        n: cfg.n,
        generator: spec.generator.describe(),
        ordering: spec.ordering.to_string(),
        bound: solved.bound(),
        eigenvalues: (0..s.len())
            .map(|k| EigenEntry {
                re: s.eigenvalues[k].re,
                im: s.eigenvalues[k].im,
                bound: s.bound[k],
                residual: s.residuals[k],
            })
            .collect(),
    };
    let dir = PathBuf::from(&cfg.out_dir);
    let path = write_json(&dir, &format!("spectrum_{picture}.json"), &file)?;
    println!("wrote {}", path.display());
    if args.vectors {
        let mut csv = String::from("node");
        let bound: Vec<usize> = (0..s.len()).filter(|&k| s.bound[k]).collect();
        for k in &bound {
            write!(csv, ",v{k}_re,v{k}_im").unwrap();
        }
        csv.push('\n');
        for (i, node) in solved.grid.nodes.iter().enumerate() {
            csv.push_str(&num(*node));
            for &k in &bound {
                let v = s.vectors[k].as_ref().expect("all vectors computed")[i];
                write!(csv, ",{},{}", num(v.re), num(v.im)).unwrap();
            }
            csv.push('\n');
        }
        let path = dir.join(format!("vectors_{picture}.csv"));
        write_atomic(&path, csv.as_bytes())?;
        println!("wrote {}", path.display());
    }
    for e in &file.bound {
        println!("bound {:.12} {:+.3e}i", e.re, e.im);
    }
    Ok(true)
}

fn finish(mut report: VerificationReport, timings: bool, dir: &Path, name: &str) -> Result<bool, Failure> {
    if !timings {
        report.runtime_s = None;
    }
    let path = write_json(dir, name, &report)?;
    let status = if report.pass { "PASS" } else { "FAIL" };
    let detail = match (report.max_level_error(), report.rate) {
        (_, Some(p)) => format!("rate {p:.3}"),
        (Some(e), None) => format!("max error {e:.3e}"),
        (None, None) => String::new(),
    };
    println!("{status} {name} {detail} -> {}", path.display());
    for w in &report.warnings {
        println!("warning: {w}");
    }
    Ok(report.pass)
}

fn verification(result: crate::error::Result<VerificationReport>) -> Result<Option<VerificationReport>, Failure> {
    match result {
        Ok(r) => Ok(Some(r)),
        Err(e @ Error::InsufficientBoundStates { .. }) => {
            println!("FAIL {e}");
            Ok(None)
        }
        Err(e @ (Error::UnsupportedGenerator(_) | Error::InvalidArgument(_))) => Err(Failure::Config(e.to_string())),
        Err(e) => Err(runtime(e)),
    }
}

fn cmd_verify(args: &VerifyArgs) -> Result<bool, Failure> {
    let cfg = load(&args.common)?;
    let spec = spec_of(&cfg)?;
    let dir = PathBuf::from(&cfg.out_dir);
    let timings = args.common.timings;
    let all = args.which == Which::All;
    let mut pass = true;

    if all || args.which == Which::Isospectral {
        let n_list = [cfg.n / 2, cfg.n];
        let r = check_isospectral_refinement(
            &spec,
            &n_list,
            cfg.k(),
            cfg.tolerances.isospectral,
            cfg.tolerances.isospectral_min_rate,
        );
        pass &= match verification(r)? {
            Some(r) => finish(r, timings, &dir, "isospectral.json")?,
            None => false,
        };
    }
    if all || args.which == Which::Intertwine {
        let r = verification(check_intertwining(&spec, &cfg.n_list))?.expect("no bound-state requirement");
        pass &= finish(r, timings, &dir, "intertwining.json")?;
    }
    if all || args.which == Which::Analytic {
        let pictures = match (all, args.common.picture) {
            (_, Some(p)) => vec![p],
            (true, None) => vec![Picture::Reference, Picture::Target],
            (false, None) => vec![Picture::Reference],
        };
        for picture in pictures {
            let tol = match picture {
                Picture::Reference => cfg.analytic_reference_tol(),
                Picture::Target => cfg.analytic_target_tol(),
            };
            let name = format!("analytic_{picture}.json");
            pass &= match verification(check_analytic(&spec, picture, cfg.n, tol))? {
                Some(r) => finish(r, timings, &dir, &name)?,
                None => false,
            };
        }
    }
    if all || args.which == Which::Eigen {
        let r: EigenSuiteReport = eigen_suite(cfg.seed, cfg.suite_size).map_err(runtime)?;
        let path = write_json(&dir, "eigen_suite.json", &r)?;
        println!(
            "{} eigen_suite.json max oracle distance {:.3e}, max trace error {:.3e} -> {}",
            if r.pass { "PASS" } else { "FAIL" },
            r.max_oracle_distance,
            r.max_trace_error,
            path.display()
        );
        pass &= r.pass;
    }
    Ok(pass)
}

fn cmd_sweep(common: &Common) -> Result<bool, Failure> {
    let cfg = load(common)?;
    let spec = spec_of(&cfg)?;
    let picture = common.picture.unwrap_or(Picture::Reference);
    let report = match verification(convergence_sweep(&spec, picture, &cfg.n_list, cfg.level))? {
        Some(r) => r,
        None => return Ok(false),
    };
    let dir = PathBuf::from(&cfg.out_dir);
    let mut csv = String::from("n,h,error\n");
    for row in &report.sweep {
        writeln!(csv, "{},{},{}", row.n, num(row.h), num(row.value)).unwrap();
    }
    write_atomic(&dir.join("sweep.csv"), csv.as_bytes())?;
    finish(report, common.timings, &dir, "sweep.json")
}

pub fn run(cli: Cli) -> ExitCode {
    let result = match &cli.command {
        Command::Orderings => {
            print!("{}", orderings_table());
            Ok(true)
        }
        Command::Defaults => {
            println!("{}", RunConfig::default().to_json());
            Ok(true)
        }
        Command::Map(c) => cmd_map(c),
        Command::Solve(a) => cmd_solve(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Sweep(c) => cmd_sweep(c),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAILED),
        Err(Failure::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}
