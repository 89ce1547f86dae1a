//! `essig`: compute, serialize, evaluate, and cross-check expected
//! signatures of stopped Brownian motion and random walks.

mod checks;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use essig_core::scalar::{parse_rational, Rational, ScalarKind};
use essig_core::tensor::TruncatedTensor;
use essig_core::word::Word;
use essig_core::Scalar;
use essig_core::{disk, interval, lattice, mc};

#[derive(Parser)]
#[command(name = "essig", version, about = "Expected signatures of stopped processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScalarArg {
    Rational,
    Float64,
}

impl From<ScalarArg> for ScalarKind {
    fn from(s: ScalarArg) -> Self {
        match s {
            ScalarArg::Rational => ScalarKind::Rational,
            ScalarArg::Float64 => ScalarKind::Float64,
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Output file (stdout when omitted)
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Exact expected signature on the unit disk (polynomial field)
    Disk {
        /// Truncation level
        #[arg(short = 'N', long = "truncation", default_value_t = 4)]
        truncation: usize,
        /// Evaluate the field at a point (two coordinates)
        #[arg(long, num_args = 2, value_names = ["Z1", "Z2"])]
        eval: Option<Vec<String>>,
        /// Disk center (used with --eval to transport the unit-disk field)
        #[arg(long, num_args = 2, value_names = ["C1", "C2"], default_values = ["0", "0"])]
        center: Vec<String>,
        /// Disk radius
        #[arg(long, default_value = "1")]
        radius: String,
        /// Scalar kind for evaluation output
        #[arg(long, value_enum, default_value_t = ScalarArg::Rational)]
        scalar: ScalarArg,
        #[command(flatten)]
        output: OutputArgs,
        /// Worker thread cap
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Expected signature of 1-D Brownian motion on [-1, 1]
    Interval {
        #[arg(short = 'N', long = "truncation", default_value_t = 10)]
        truncation: usize,
        /// Evaluate the levels at a starting point x
        #[arg(long)]
        eval: Option<String>,
        #[arg(long, value_enum, default_value_t = ScalarArg::Rational)]
        scalar: ScalarArg,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Expected signature of the simple random walk on a lattice domain
    Lattice {
        /// Domain file: header `d N`, then one interior point per line
        #[arg(long)]
        domain: PathBuf,
        /// Truncation override (default: the N from the domain file header)
        #[arg(short = 'N', long = "truncation")]
        truncation: Option<usize>,
        /// rational: exact dense solve; float64: Gauss-Seidel fast path
        #[arg(long, value_enum, default_value_t = ScalarArg::Rational)]
        scalar: ScalarArg,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte Carlo estimate of the disk expected signature
    Mc {
        #[arg(short = 'N', long = "truncation", default_value_t = 4)]
        truncation: usize,
        /// Starting point
        #[arg(long, num_args = 2, value_names = ["Z1", "Z2"], default_values = ["0", "0"])]
        start: Vec<f64>,
        /// Disk center
        #[arg(long, num_args = 2, value_names = ["C1", "C2"], default_values = ["0", "0"])]
        center: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        /// Number of sampled paths
        #[arg(long, default_value_t = 1000)]
        paths: u64,
        /// Time step of the Gaussian increments
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        /// Master seed (env ESSIG_SEED as fallback)
        #[arg(long, env = "ESSIG_SEED", default_value_t = 0)]
        seed: u64,
        /// Write one sampled path, one `t x1 x2` line per point
        #[arg(long)]
        dump: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Truncated signature of a piecewise-linear path from a dump file
    Sig {
        /// Path file: one `t x1 x2` line per point
        input: PathBuf,
        #[arg(short = 'N', long = "truncation", default_value_t = 4)]
        truncation: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run a named verification suite; exits nonzero on failure
    Check {
        /// residual | boundary-factor | chen | rotation | meanvalue |
        /// lattice-mc | interval-oracle
        suite: checks::Suite,
        /// Truncation override (suite-specific default otherwise)
        #[arg(short = 'N', long = "truncation")]
        truncation: Option<usize>,
        /// Sample count override for stochastic suites
        #[arg(long)]
        paths: Option<u64>,
        #[arg(long, env = "ESSIG_SEED", default_value_t = 0)]
        seed: u64,
        /// Machine-readable report format (plain text lines otherwise)
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Report file (stdout when omitted)
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads(threads: Option<usize>) -> Result<()> {
    if let Some(t) = threads {
        if t == 0 {
            bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("thread pool already configured")?;
    }
    Ok(())
}

fn write_output(output: &OutputArgs, content: &str) -> Result<()> {
    match &output.out {
        Some(path) => fs::write(path, content)
            .with_context(|| format!("writing {}", path.display()))?,
        None => println!("{content}"),
    }
    Ok(())
}

fn parse_point_rational(coords: &[String]) -> Result<[Rational; 2]> {
    let x = parse_rational(&coords[0]).map_err(anyhow::Error::msg)?;
    let y = parse_rational(&coords[1]).map_err(anyhow::Error::msg)?;
    Ok([x, y])
}

fn tensor_csv<S: essig_core::Scalar>(t: &TruncatedTensor<S>) -> String {
    let mut rows = String::from("level,word,value\n");
    for k in 0..=t.truncation() {
        for (i, c) in t.level(k).iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let w = Word::from_index(i, k, t.dim());
            let value = c.to_json().to_string().replace('"', "");
            rows.push_str(&format!("{k},{w},{value}\n"));
        }
    }
    rows
}

fn poly_tensor_csv(phi: &disk::PolyTensor) -> String {
    let mut rows = String::from("level,word,e1,e2,coeff\n");
    for k in 0..=phi.truncation() {
        for (i, p) in phi.level(k).iter().enumerate() {
            let w = Word::from_index(i, k, 2);
            for (&(e1, e2), c) in p.monomials() {
                rows.push_str(&format!("{k},{w},{e1},{e2},{}/{}\n", c.numer(), c.denom()));
            }
        }
    }
    rows
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Disk {
            truncation,
            eval,
            center,
            radius,
            scalar,
            output,
            threads,
        } => {
            configure_threads(threads)?;
            let radius_q = parse_rational(&radius).map_err(anyhow::Error::msg)?;
            if radius_q <= Rational::from_int(0) {
                bail!("radius must be positive");
            }
            let center_q = parse_point_rational(&center)?;
            let eval_q = eval.as_deref().map(parse_point_rational).transpose()?;
            if let Some(z) = &eval_q {
                let dx = &z[0] - &center_q[0];
                let dy = &z[1] - &center_q[1];
                if &dx * &dx + &dy * &dy > &radius_q * &radius_q {
                    bail!("evaluation point lies outside the disk");
                }
            }

            let phi = disk::expected_signature(truncation);
            let content = match (eval_q, output.format) {
                (None, Format::Json) => serde_json::to_string_pretty(&phi.to_json())?,
                (None, Format::Csv) => poly_tensor_csv(&phi),
                (Some(z), format) => match ScalarKind::from(scalar) {
                    ScalarKind::Rational => {
                        let t = disk::transport(&phi, &center_q, &radius_q, &z);
                        match format {
                            Format::Json => serde_json::to_string_pretty(&serde_json::json!({
                                "field": phi.to_json(),
                                "evaluation": t.to_json(),
                            }))?,
                            Format::Csv => tensor_csv(&t),
                        }
                    }
                    ScalarKind::Float64 => {
                        let zf = [z[0].to_f64(), z[1].to_f64()];
                        let cf = [center_q[0].to_f64(), center_q[1].to_f64()];
                        let t = disk::transport_f64(&phi, cf, radius_q.to_f64(), zf);
                        match format {
                            Format::Json => serde_json::to_string_pretty(&serde_json::json!({
                                "field": phi.to_json(),
                                "evaluation": t.to_json(),
                            }))?,
                            Format::Csv => tensor_csv(&t),
                        }
                    }
                },
            };
            write_output(&output, &content)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Interval {
            truncation,
            eval,
            scalar,
            output,
        } => {
            let levels = interval::ode_recursion(truncation);
            let content = match (&eval, output.format) {
                (None, Format::Json) => {
                    serde_json::to_string_pretty(&interval::levels_to_json(&levels))?
                }
                (None, Format::Csv) => {
                    let mut rows = String::from("level,power,coeff\n");
                    for (n, p) in levels.iter().enumerate() {
                        for (k, c) in p.coeffs().iter().enumerate() {
                            rows.push_str(&format!("{n},{k},{}/{}\n", c.numer(), c.denom()));
                        }
                    }
                    rows
                }
                (Some(x), format) => {
                    let xq = parse_rational(x).map_err(anyhow::Error::msg)?;
                    if xq.to_f64().abs() > 1.0 {
                        bail!("evaluation point must lie in [-1, 1]");
                    }
                    let values: Vec<serde_json::Value> = match ScalarKind::from(scalar) {
                        ScalarKind::Rational => levels
                            .iter()
                            .map(|p| essig_core::Scalar::to_json(&p.evaluate(&xq)))
                            .collect(),
                        ScalarKind::Float64 => levels
                            .iter()
                            .map(|p| serde_json::json!(p.evaluate_f64(xq.to_f64())))
                            .collect(),
                    };
                    match format {
                        Format::Json => serde_json::to_string_pretty(&serde_json::json!({
                            "truncation": truncation,
                            "point": x,
                            "levels": values,
                        }))?,
                        Format::Csv => {
                            let mut rows = String::from("level,value\n");
                            for (n, v) in values.iter().enumerate() {
                                rows.push_str(&format!(
                                    "{n},{}\n",
                                    v.to_string().replace('"', "")
                                ));
                            }
                            rows
                        }
                    }
                }
            };
            write_output(&output, &content)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Lattice {
            domain,
            truncation,
            scalar,
            output,
        } => {
            let text = fs::read_to_string(&domain)
                .with_context(|| format!("reading {}", domain.display()))?;
            let (dom, file_n) = lattice::LatticeDomain::parse(&text)?;
            if dom.dim() > 9 {
                bail!("the word text form in outputs supports dimension <= 9");
            }
            let n = truncation.unwrap_or(file_n);
            let json = match ScalarKind::from(scalar) {
                ScalarKind::Rational => lattice::expected_signature(&dom, n)?.to_json(),
                ScalarKind::Float64 => lattice::expected_signature_f64(&dom, n).to_json(),
            };
            let content = match output.format {
                Format::Json => serde_json::to_string_pretty(&json)?,
                Format::Csv => {
                    let mut rows = String::from("point,level,word,value\n");
                    let field = json["field"].as_object().expect("field object");
                    for (point, tensor) in field {
                        for level in tensor["levels"].as_array().expect("levels") {
                            let k = level["level"].as_u64().unwrap();
                            for (w, v) in level["coeffs"].as_object().unwrap() {
                                rows.push_str(&format!(
                                    "\"{point}\",{k},{w},{}\n",
                                    v.to_string().replace('"', "")
                                ));
                            }
                        }
                    }
                    rows
                }
            };
            write_output(&output, &content)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Mc {
            truncation,
            start,
            center,
            radius,
            paths,
            dt,
            seed,
            dump,
            output,
            threads,
        } => {
            configure_threads(threads)?;
            if paths < 1 {
                bail!("--paths must be at least 1");
            }
            if dt <= 0.0 {
                bail!("--dt must be positive");
            }
            if radius <= 0.0 {
                bail!("--radius must be positive");
            }
            let start = [start[0], start[1]];
            let center = [center[0], center[1]];
            let dist =
                ((start[0] - center[0]).powi(2) + (start[1] - center[1]).powi(2)).sqrt();
            if dist > radius + 1e-9 {
                bail!("start point lies outside the disk");
            }

            if let Some(path_file) = &dump {
                use rand_chacha::rand_core::SeedableRng;
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                // keep the dumped path off the estimator's batch streams
                rng.set_stream(u64::MAX);
                let sample = mc::sample_bm_exit(start, center, radius, dt, &mut rng);
                let mut lines = String::new();
                for (t, p) in sample.times.iter().zip(&sample.points) {
                    lines.push_str(&format!("{t} {} {}\n", p[0], p[1]));
                }
                fs::write(path_file, lines)
                    .with_context(|| format!("writing {}", path_file.display()))?;
            }

            let est = mc::estimate_phi(start, center, radius, truncation, paths, dt, seed);
            let content = match output.format {
                Format::Json => serde_json::to_string_pretty(&serde_json::json!({
                    "mean": est.mean.to_json(),
                    "std_err": est.std_err.to_json(),
                    "samples": est.samples,
                    "seed": est.seed,
                    "dt": est.dt,
                }))?,
                Format::Csv => {
                    let mut rows = String::from("level,word,mean,std_err\n");
                    for k in 0..=truncation {
                        for (i, (m, s)) in est
                            .mean
                            .level(k)
                            .iter()
                            .zip(est.std_err.level(k))
                            .enumerate()
                        {
                            let w = Word::from_index(i, k, 2);
                            rows.push_str(&format!("{k},{w},{m},{s}\n"));
                        }
                    }
                    rows
                }
            };
            write_output(&output, &content)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Sig {
            input,
            truncation,
            output,
        } => {
            let text = fs::read_to_string(&input)
                .with_context(|| format!("reading {}", input.display()))?;
            let mut times = Vec::new();
            let mut points = Vec::new();
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let fields: Vec<f64> = line
                    .split_whitespace()
                    .map(str::parse)
                    .collect::<Result<_, _>>()
                    .with_context(|| format!("line {}: `{line}`", lineno + 1))?;
                if fields.len() != 3 {
                    bail!("line {}: expected `t x1 x2`", lineno + 1);
                }
                times.push(fields[0]);
                points.push([fields[1], fields[2]]);
            }
            if points.is_empty() {
                bail!("path file contains no points");
            }
            let path = mc::PiecewisePath {
                times,
                points,
                ends_on_boundary: false,
            };
            let sig = mc::signature_of_path(&path, truncation);
            let content = match output.format {
                Format::Json => serde_json::to_string_pretty(&sig.to_json())?,
                Format::Csv => tensor_csv(&sig),
            };
            write_output(&output, &content)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Check {
            suite,
            truncation,
            paths,
            seed,
            format,
            out,
            threads,
        } => {
            configure_threads(threads)?;
            let report = checks::run_suite(suite, truncation, paths, seed);
            let all_pass = report.iter().all(|r| r.pass);
            let content = match format {
                None => report
                    .iter()
                    .map(checks::CheckResult::line)
                    .collect::<Vec<_>>()
                    .join("\n"),
                Some(Format::Json) => serde_json::to_string_pretty(&serde_json::json!(report
                    .iter()
                    .map(|r| serde_json::json!({
                        "check": r.name,
                        "pass": r.pass,
                        "detail": r.detail,
                    }))
                    .collect::<Vec<_>>()))?,
                Some(Format::Csv) => {
                    let mut rows = String::from("check,pass,detail\n");
                    for r in &report {
                        rows.push_str(&format!("{},{},\"{}\"\n", r.name, r.pass, r.detail));
                    }
                    rows
                }
            };
            match &out {
                Some(path) => {
                    fs::write(path, &content)
                        .with_context(|| format!("writing {}", path.display()))?;
                    // still surface the verdict on the terminal
                    for r in &report {
                        println!("{}", r.line());
                    }
                }
                None => println!("{content}"),
            }
            Ok(if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}
