//! Batch front end: reads inputs, dispatches to the library, writes a
//! versioned JSON report (or CSV for `sample`).

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use bargmann_retrieval::io::{
    parse_function, parse_lattice, parse_point_set, parse_samples, parse_signal, parse_structured_set,
    retrieval_result_to_json, samples_to_csv, versioned,
};
use bargmann_retrieval::lattice_geometry::{
    canonical_progressions, check_lattice_conditions, enumerate, estimate_lower_density, ShiftedLattice,
    StructuredSet, MAX_TRUNCATION,
};
use bargmann_retrieval::retrieval::{
    counterexample_pair, earl_bound_check, forward_sample, growth_type_estimate, reconstruct, sharpness_witness,
    verify_counterexample, GrowthScale, MAX_FIT_DEGREE,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Debug, Parser)]
#[command(name = "bargmann", version, about = "Phase retrieval from Bargmann/Gabor magnitudes on structured sets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Density, spacing and line-distance conditions of a shifted lattice.
    CheckLattice {
        #[arg(long)]
        lattice: PathBuf,
        /// Lower quadratic growth τ̲ of the signal class.
        #[arg(long, default_value_t = 0.0, value_parser = nonnegative)]
        tau: f64,
        /// Exponential type bound κ.
        #[arg(long, default_value_t = 0.0, value_parser = nonnegative)]
        kappa: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Lower Beurling density estimate of a lattice window or a point set.
    Density {
        #[command(flatten)]
        source: PointSource,
        /// Window radii, comma separated, increasing.
        #[arg(long, value_delimiter = ',', default_values_t = [50.0, 100.0, 200.0], value_parser = positive)]
        radii: Vec<f64>,
        /// Spacing of the grid of window translates.
        #[arg(long, default_value_t = 0.25, value_parser = positive)]
        step: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Magnitudes |𝓑f| of a signal on a structured set, as CSV.
    Sample {
        /// Signal JSON (`basis` hermite or monomial).
        #[arg(long)]
        signal: PathBuf,
        #[command(flatten)]
        geometry: Geometry,
        #[command(flatten)]
        out: Output,
    },
    /// Recover a polynomial up to a global phase from magnitude samples.
    Reconstruct {
        #[arg(long)]
        samples: PathBuf,
        #[command(flatten)]
        geometry: Geometry,
        /// Largest degree considered.
        #[arg(long, value_parser = clap::value_parser!(u32).range(0..=MAX_FIT_DEGREE as i64))]
        qmax: u32,
        #[command(flatten)]
        out: Output,
    },
    /// Verify the modulus-sharing pair f₊, f₋ on aℤ + iℝ, or exhibit it on a
    /// lattice violating the spacing or distance condition for κ.
    Counterexample {
        /// Line spacing a; ignored when --lattice is given.
        #[arg(long, default_value_t = 1.0, value_parser = positive)]
        spacing: f64,
        #[arg(long, requires = "kappa")]
        lattice: Option<PathBuf>,
        #[arg(long, value_parser = positive)]
        kappa: Option<f64>,
        /// Number of on-line test points.
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u32).range(1..=1_000_000))]
        points: u32,
        /// Tolerance for on-line modulus agreement.
        #[arg(long, default_value_t = 1e-12, value_parser = positive)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Growth-type estimate of a function, or the lattice-versus-plane
    /// comparison when a lattice is given.
    Growth {
        /// Closed-form function JSON (`kind`) or signal JSON (`basis`).
        #[arg(long)]
        signal: PathBuf,
        #[arg(long)]
        lattice: Option<PathBuf>,
        /// Growth scale H for the lattice comparison.
        #[arg(long, value_enum, default_value_t = Scale::Linear)]
        scale: Scale,
        /// Radius of the lattice comparison.
        #[arg(long, default_value_t = 50.0, value_parser = positive)]
        radius: f64,
        /// Order ρ for the type estimate.
        #[arg(long, default_value_t = 1.0, value_parser = positive)]
        rho: f64,
        #[arg(long, value_delimiter = ',', default_values_t = [10.0, 20.0, 30.0, 40.0, 50.0], value_parser = positive)]
        radii: Vec<f64>,
        #[arg(long, default_value_t = 720, value_parser = clap::value_parser!(u32).range(360..=1_000_000))]
        angles: u32,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    Linear,
    Log1p,
}

impl From<Scale> for GrowthScale {
    fn from(s: Scale) -> Self {
        match s {
            Scale::Linear => GrowthScale::Linear,
            Scale::Log1p => GrowthScale::Log1p,
        }
    }
}

#[derive(Debug, Args)]
pub struct Output {
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A structured set, given directly or as the canonical progressions of a
/// lattice.
#[derive(Debug, Args)]
pub struct Geometry {
    /// Structured set JSON.
    #[arg(long, required_unless_present = "lattice", conflicts_with = "lattice")]
    set: Option<PathBuf>,
    /// Lattice JSON; its canonical progressions are used.
    #[arg(long, requires = "truncation")]
    lattice: Option<PathBuf>,
    /// Progression half-length N when --lattice is used.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=MAX_TRUNCATION as u64))]
    truncation: Option<u64>,
}

#[derive(Debug, Args)]
pub struct PointSource {
    /// Lattice JSON, truncated to |z| ≤ --radius.
    #[arg(long, requires = "radius")]
    lattice: Option<PathBuf>,
    #[arg(long, value_parser = positive)]
    radius: Option<f64>,
    /// Point set CSV (`re,im`).
    #[arg(long, required_unless_present = "lattice", conflicts_with = "lattice")]
    points: Option<PathBuf>,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive finite number, got {s:?}")),
    }
}

fn nonnegative(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a nonnegative finite number, got {s:?}")),
    }
}

/// Failure of a run: exit status 1 with `{"error", "message"}` on stderr.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Domain(#[from] bargmann_retrieval::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            Self::Domain(e) => e.code(),
            Self::Io { .. } => "io",
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "error": self.code(), "message": self.to_string() })
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn load_lattice(path: &Path) -> Result<ShiftedLattice, CliError> {
    Ok(parse_lattice(&read(path)?)?)
}

impl Geometry {
    fn load(&self) -> Result<StructuredSet, CliError> {
        match (&self.set, &self.lattice, self.truncation) {
            (Some(set), _, _) => Ok(parse_structured_set(&read(set)?)?),
            (None, Some(lattice), Some(n)) => Ok(canonical_progressions(&load_lattice(lattice)?, n as usize)?),
            _ => unreachable!("clap enforces one geometry source"),
        }
    }
}

/// Report body, or CSV text for `sample`.
pub enum Rendered {
    Report(Value),
    Csv(String),
}

/// Runs one subcommand without touching the output.
pub fn execute(command: &Command) -> Result<Rendered, CliError> {
    let report = match command {
        Command::CheckLattice { lattice, tau, kappa, .. } => {
            let lattice = load_lattice(lattice)?;
            json!({
                "lattice": lattice,
                "conditions": check_lattice_conditions(&lattice, *tau, *kappa)?,
            })
        }
        Command::Density { source, radii, step, .. } => {
            let (points, exact) = match (&source.lattice, source.radius, &source.points) {
                (Some(l), Some(r), _) => {
                    let lattice = load_lattice(l)?;
                    (enumerate(&lattice, r)?, Some(lattice.exact_lower_density()))
                }
                (None, _, Some(p)) => (parse_point_set(&read(p)?)?, None),
                _ => unreachable!("clap enforces one point source"),
            };
            json!({
                "points": points.len(),
                "radii": radii,
                "step": step,
                "estimate": estimate_lower_density(&points, radii, *step)?,
                "exact": exact,
            })
        }
        Command::Sample { signal, geometry, .. } => {
            let p = parse_signal(&read(signal)?)?.to_fock();
            return Ok(Rendered::Csv(samples_to_csv(&forward_sample(&p, &geometry.load()?))));
        }
        Command::Reconstruct {
            samples, geometry, qmax, ..
        } => {
            let samples = parse_samples(&read(samples)?)?;
            let result = reconstruct(&samples, &geometry.load()?, *qmax as usize)?;
            retrieval_result_to_json(&result)
        }
        Command::Counterexample {
            spacing,
            lattice,
            kappa,
            points,
            tol,
            ..
        } => match (lattice, kappa) {
            (Some(l), Some(k)) => json!({ "sharpness": sharpness_witness(&load_lattice(l)?, *k, *tol)? }),
            _ => {
                let pair = counterexample_pair(*spacing)?;
                json!({
                    "spacing": spacing,
                    "pair": [pair.0, pair.1],
                    "check": verify_counterexample(&pair, *spacing, *points as usize, *tol)?,
                })
            }
        },
        Command::Growth {
            signal,
            lattice,
            scale,
            radius,
            rho,
            radii,
            angles,
            ..
        } => {
            let f = parse_function(&read(signal)?)?;
            let estimate = growth_type_estimate(&f, *rho, radii, *angles as usize)?;
            let earl = match lattice {
                Some(l) => Some(earl_bound_check(&f, &load_lattice(l)?, (*scale).into(), *radius)?),
                None => None,
            };
            json!({ "function": f, "estimate": estimate, "earl": earl })
        }
    };
    Ok(Rendered::Report(report))
}

fn output(command: &Command) -> &Output {
    match command {
        Command::CheckLattice { out, .. }
        | Command::Density { out, .. }
        | Command::Sample { out, .. }
        | Command::Reconstruct { out, .. }
        | Command::Counterexample { out, .. }
        | Command::Growth { out, .. } => out,
    }
}

/// Executes and writes the result. JSON reports carry `"schema"`, the report
/// body, and a `"metadata"` object with the run time.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let start = Instant::now();
    let text = match execute(&cli.command)? {
        Rendered::Csv(csv) => csv,
        Rendered::Report(report) => {
            let mut doc = versioned(report);
            doc["metadata"] = json!({ "elapsed_seconds": start.elapsed().as_secs_f64() });
            let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
            s.push('\n');
            s
        }
    };
    match &output(&cli.command).out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
