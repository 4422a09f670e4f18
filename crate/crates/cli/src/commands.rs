use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use shapelab_core::inequality::{report_csv, run_suite, Check, CorpusEntry, SuiteOptions};
use shapelab_core::riesz::{riesz_mean, RieszQuery};
use shapelab_core::shape_opt::{
    convergence_study_with, optimize_with, study_csv, sum_minimization_study_with, FamilySpec, OptimizeOptions,
    StudyKey, StudyRow,
};
use shapelab_core::{Spectrum, SpectrumSource};

use crate::config::{StudyConfig, StudyKind};
use crate::error::CliError;
use crate::registry::{self, NamedDomain};
use crate::svg;

#[derive(Parser, Debug)]
#[command(
    name = "shapelab",
    version,
    about = "Dirichlet spectra, Riesz means and spectral shape optimization"
)]
struct Cli {
    /// Worker threads (default: SHAPELAB_JOBS, else all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct DomainArg {
    /// Builtin domain, e.g. square, disk, mgon:5, rect:2, box:1,2,3
    #[arg(long)]
    builtin: Option<String>,
    /// Polygon file
    #[arg(long)]
    domain: Option<PathBuf>,
}

impl DomainArg {
    fn resolve(&self) -> Result<NamedDomain, CliError> {
        match (&self.builtin, &self.domain) {
            (Some(b), _) => registry::builtin(b),
            (_, Some(p)) => registry::polygon_file(p),
            _ => Err(CliError::Usage("give --builtin or --domain".into())),
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalues below a threshold as CSV
    Spectrum {
        #[command(flatten)]
        domain: DomainArg,
        #[arg(long)]
        lambda: f64,
        /// Relative FEM tolerance for polygons
        #[arg(long, default_value_t = 0.005)]
        rel_tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Riesz mean of a domain or of a spectrum CSV
    Riesz {
        #[arg(long, conflicts_with_all = ["domain", "spectrum"])]
        builtin: Option<String>,
        #[arg(long, conflicts_with = "spectrum")]
        domain: Option<PathBuf>,
        /// Spectrum CSV as written by `spectrum`
        #[arg(long, requires = "complete_below")]
        spectrum: Option<PathBuf>,
        /// Threshold below which the spectrum CSV is complete
        #[arg(long)]
        complete_below: Option<f64>,
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, default_value_t = 0.005)]
        rel_tol: f64,
    },
    /// Runs the inequality checks over a corpus; exit 2 on any failure
    Verify {
        /// Comma-separated: berezin, liyau, hersch, improved_berezin, improved_liyau
        #[arg(long, default_value = "berezin,liyau,hersch,improved_berezin,improved_liyau")]
        suite: String,
        /// `builtin` or a file with one domain per line
        #[arg(long, default_value = "builtin")]
        corpus: String,
        /// Enumeration threshold for closed-form spectra
        #[arg(long, default_value_t = 1e4)]
        lambda_max: f64,
        /// Threshold for FEM spectra
        #[arg(long, default_value_t = 150.0)]
        fem_lambda: f64,
        #[arg(long, default_value_t = 0.005)]
        rel_tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Maximizes the Riesz mean over a family at one threshold
    Optimize {
        /// rectangles, boxes(n), polygons_max_m(m) or disk_unions(k)
        #[arg(long)]
        family: String,
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, default_value_t = 400)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convergence or sum-minimization study from a config file
    Study {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's `output`
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Renders a domain outline or a CSV curve to SVG
    Render {
        #[arg(long, conflicts_with_all = ["domain", "curve"])]
        builtin: Option<String>,
        #[arg(long, conflicts_with = "curve")]
        domain: Option<PathBuf>,
        /// CSV file with a header row
        #[arg(long, requires_all = ["x", "y"])]
        curve: Option<PathBuf>,
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        y: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Spectrum { .. } => "spectrum",
            Command::Riesz { .. } => "riesz",
            Command::Verify { .. } => "verify",
            Command::Optimize { .. } => "optimize",
            Command::Study { .. } => "study",
            Command::Render { .. } => "render",
        }
    }
}

/// Trailing CSV comment; the timestamp is the only run-dependent field.
pub fn metadata_line(command: &str) -> String {
    format!(
        "# shapelab {} {} {}\n",
        env!("CARGO_PKG_VERSION"),
        command,
        chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
    )
}

fn emit(out: Option<&Path>, command: &str, body: &str) -> Result<(), CliError> {
    let text = format!("{body}{}", metadata_line(command));
    match out {
        Some(p) => fs::write(p, text).map_err(|source| CliError::File {
            path: p.display().to_string(),
            source,
        }),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes())
                .and_then(|_| so.flush())
                .map_err(|source| CliError::File {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::File {
        path: path.display().to_string(),
        source,
    })
}

/// Parses `index,eigenvalue,error_bound` rows; `#` lines are skipped.
pub fn parse_spectrum_csv(text: &str, complete_below: f64) -> Result<Spectrum, CliError> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some((_, h)) if h.trim() == "index,eigenvalue,error_bound" => {}
        _ => {
            return Err(CliError::Usage(
                "spectrum CSV must start with `index,eigenvalue,error_bound`".into(),
            ))
        }
    }
    let (mut values, mut bounds) = (Vec::new(), Vec::new());
    for (i, l) in lines {
        let f: Vec<&str> = l.split(',').collect();
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("spectrum CSV line {}: bad number `{s}`", i + 1)))
        };
        if f.len() != 3 {
            return Err(CliError::Usage(format!(
                "spectrum CSV line {}: expected 3 fields",
                i + 1
            )));
        }
        values.push(num(f[1])?);
        bounds.push(num(f[2])?);
    }
    let source = if bounds.iter().all(|&b| b == 0.0) {
        SpectrumSource::Exact
    } else {
        SpectrumSource::Fem
    };
    Ok(Spectrum::new(values, bounds, complete_below, source)?)
}

fn check_positive(name: &str, v: f64) -> Result<(), CliError> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(CliError::Usage(format!("--{name} must be positive, got {v}")));
    }
    Ok(())
}

fn run(cmd: Command) -> Result<(), CliError> {
    let name = cmd.name();
    match cmd {
        Command::Spectrum {
            domain,
            lambda,
            rel_tol,
            out,
        } => {
            check_positive("lambda", lambda)?;
            let d = domain.resolve()?;
            let s = d.spectrum(lambda, rel_tol)?;
            emit(out.as_deref(), name, &s.to_csv())
        }
        Command::Riesz {
            builtin,
            domain,
            spectrum,
            complete_below,
            lambda,
            gamma,
            rel_tol,
        } => {
            let q = RieszQuery::new(lambda, gamma)?;
            let s = match (builtin, domain, spectrum) {
                (Some(b), _, _) => registry::builtin(&b)?.spectrum(lambda, rel_tol)?,
                (_, Some(p), _) => registry::polygon_file(&p)?.spectrum(lambda, rel_tol)?,
                (_, _, Some(p)) => parse_spectrum_csv(&read(&p)?, complete_below.unwrap_or(0.0))?,
                _ => return Err(CliError::Usage("give --builtin, --domain or --spectrum".into())),
            };
            let v = riesz_mean(&s, q)?;
            if v.width() > 0.0 {
                println!("{} [{}, {}]", v.value, v.lower, v.upper);
            } else {
                println!("{}", v.value);
            }
            Ok(())
        }
        Command::Verify {
            suite,
            corpus,
            lambda_max,
            fem_lambda,
            rel_tol,
            out,
        } => {
            check_positive("lambda-max", lambda_max)?;
            check_positive("fem-lambda", fem_lambda)?;
            let checks = suite
                .split(',')
                .map(|c| Check::parse(c).map_err(CliError::from))
                .collect::<Result<Vec<_>, _>>()?;
            let domains = registry::corpus(&corpus)?;
            let entries = domains
                .par_iter()
                .map(|d| {
                    let lambda = if d.is_exact() { lambda_max } else { fem_lambda };
                    let entry = || -> Result<CorpusEntry, CliError> {
                        Ok(CorpusEntry {
                            id: d.id.clone(),
                            spectrum: d.spectrum(lambda, rel_tol)?,
                            geometry: d.summary()?,
                        })
                    };
                    entry().map_err(|e| CliError::Domain {
                        id: d.id.clone(),
                        source: Box::new(e),
                    })
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            let opts = SuiteOptions {
                checks,
                ..SuiteOptions::default()
            };
            let rows = run_suite(&entries, &opts)?;
            emit(out.as_deref(), name, &report_csv(&rows))?;
            let failed = rows.iter().filter(|r| !r.passed).count();
            if failed > 0 {
                return Err(CliError::Verification {
                    failed,
                    total: rows.len(),
                });
            }
            Ok(())
        }
        Command::Optimize {
            family,
            lambda,
            gamma,
            budget,
            seed,
            restarts,
            out,
        } => {
            let f = FamilySpec::parse(&family)?;
            if gamma < 1.0 {
                return Err(CliError::Usage("optimization needs --gamma >= 1".into()));
            }
            let mut opts = OptimizeOptions::new(budget, seed);
            opts.restarts = restarts;
            let r = optimize_with(f, RieszQuery::new(lambda, gamma)?, &opts)?;
            let c = f.candidate(&r.best_params)?;
            let row = StudyRow {
                key: StudyKey::Lambda(lambda),
                best_params: r.best_params.clone(),
                objective: r.objective,
                perimeter: c.perimeter(),
                distance_to_reference: c.distance_to_reference()?,
                evaluations: r.evaluations,
                incumbents: r.incumbents.len(),
            };
            emit(out.as_deref(), name, &study_csv(f, Some(gamma), &[row]))
        }
        Command::Study { config, out } => {
            let cfg = StudyConfig::parse(&read(&config)?)?;
            let mut opts = OptimizeOptions::new(cfg.budget, cfg.seed);
            opts.restarts = cfg.restarts;
            opts.fem_level = cfg.fem_level;
            let (rows, gamma) = match cfg.kind {
                StudyKind::Convergence => (
                    convergence_study_with(cfg.family, cfg.gamma, &cfg.lambdas, &opts)?,
                    Some(cfg.gamma),
                ),
                StudyKind::Sum => (sum_minimization_study_with(cfg.family, &cfg.ms, &opts)?, None),
            };
            let target = out.or_else(|| {
                cfg.output
                    .map(|p| config.parent().map_or(p.clone(), |dir| dir.join(&p)))
            });
            emit(target.as_deref(), name, &study_csv(cfg.family, gamma, &rows))
        }
        Command::Render {
            builtin,
            domain,
            curve,
            x,
            y,
            out,
        } => {
            let text = match (builtin, domain, curve) {
                (Some(b), _, _) => render_domain(&registry::builtin(&b)?)?,
                (_, Some(p), _) => render_domain(&registry::polygon_file(&p)?)?,
                (_, _, Some(p)) => {
                    let (x, y) = (x.unwrap_or_default(), y.unwrap_or_default());
                    svg::curve_svg(&csv_columns(&read(&p)?, &x, &y)?, &x, &y)
                }
                _ => return Err(CliError::Usage("give --builtin, --domain or --curve".into())),
            };
            fs::write(&out, text).map_err(|source| CliError::File {
                path: out.display().to_string(),
                source,
            })
        }
    }
}

fn render_domain(d: &NamedDomain) -> Result<String, CliError> {
    let outline = d
        .outline()
        .ok_or_else(|| CliError::Usage(format!("`{}` has no planar outline", d.id)))?;
    Ok(svg::polygons_svg(&[(outline, "black")]))
}

/// Two numeric columns of a headed CSV; comment lines are skipped.
fn csv_columns(text: &str, x: &str, y: &str) -> Result<Vec<(f64, f64)>, CliError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| CliError::Usage("empty CSV".into()))?
        .split(',')
        .collect();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| CliError::Usage(format!("no column `{name}` in CSV")))
    };
    let (ix, iy) = (col(x)?, col(y)?);
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            let get = |i: usize| -> Result<f64, CliError> {
                f.get(i)
                    .and_then(|s| s.trim().parse().ok())
                    .ok_or_else(|| CliError::Usage(format!("non-numeric row `{l}`")))
            };
            Ok((get(ix)?, get(iy)?))
        })
        .collect()
}

fn jobs_from_env() -> Option<usize> {
    std::env::var("SHAPELAB_JOBS").ok()?.trim().parse().ok()
}

/// Runs the command line and returns the process exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            let msg = e.to_string();
            eprintln!(
                "error: {}",
                msg.lines()
                    .next()
                    .unwrap_or("invalid arguments")
                    .trim_start_matches("error: ")
            );
            return 1;
        }
    };
    let jobs = cli.jobs.or_else(jobs_from_env);
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        if n == 0 {
            eprintln!("error: --jobs must be at least 1");
            return 1;
        }
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    match pool.install(|| run(cli.command)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            e.exit_code()
        }
    }
}
