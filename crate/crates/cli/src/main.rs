//! `horn-spectra` command-line front end.

mod table;

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::builder::PossibleValuesParser;
use clap::{Args, Parser, Subcommand, ValueEnum};
use horn_spectra::core_geometry::log_spaced;
use horn_spectra::fd::crosscheck;
use horn_spectra::{
    bracket, core_stats, donnelly_core_stats, fit_growth, validate_domain, Error,
    PerimeterConvention, SimpleDomainF64,
};
use serde::Serialize;

use table::{real, sweep_rows, write_json, write_pairs_csv, write_sweep_csv, SWEEP_COLUMNS};

const EXIT_HELP: &str = "\
Exit status:
  0  success
  1  other failure (e.g. writing output)
  2  usage error: unknown flag, bad flag value, inconsistent sweep range
  3  configuration error: unreadable or malformed domain file, invalid sequence spec
  4  capacity exceeded: grid or lattice too large for the solver
  5  domain or numerical error: energy out of range, non-positive term, geometry, breakdown

RAYON_NUM_THREADS sets the worker count for sweeps.";

#[derive(Parser)]
#[command(
    name = "horn-spectra",
    version,
    about = "Eigenvalue counting on staircase horn domains"
)]
#[command(after_help = EXIT_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the domain sequences and report summability.
    Validate {
        #[command(flatten)]
        domain: DomainArgs,
        /// Number of terms inspected.
        #[arg(long, default_value_t = 1000)]
        horizon: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Dirichlet / Neumann bracket of the counting function at one energy.
    Bracket {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long)]
        energy: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Bracket, core geometry and Weyl split over a range of energies.
    Sweep {
        #[command(flatten)]
        domain: DomainArgs,
        #[command(flatten)]
        range: RangeArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Recorded for reproducibility; every estimator is deterministic.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Power-law fit of one sweep column.
    Fit {
        #[command(flatten)]
        domain: DomainArgs,
        #[command(flatten)]
        range: RangeArgs,
        #[arg(long, default_value = "N_lower", value_parser = PossibleValuesParser::new(&SWEEP_COLUMNS[1..]))]
        column: String,
        /// Lower end of the fit window [default: ten times --emin].
        #[arg(long)]
        fit_min: Option<f64>,
        /// Upper end of the fit window [default: --emax].
        #[arg(long)]
        fit_max: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Finite-difference cross-check of the bracket.
    FdCheck {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long)]
        energy: f64,
        /// Grid spacings, comma separated; fractions such as 1/32 are accepted.
        #[arg(long = "h", value_delimiter = ',', value_parser = parse_spacing, default_value = "1/16,1/32,1/64")]
        h: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Spectral core geometry and the inner-parallel-set estimate.
    Core {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long)]
        energy: f64,
        /// Columns per wall zone of the erosion estimator.
        #[arg(long, default_value_t = 512)]
        resolution: usize,
        /// Recorded for reproducibility; every estimator is deterministic.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Args)]
struct DomainArgs {
    /// Built-in domain [default: example].
    #[arg(long, value_enum, conflicts_with = "domain")]
    preset: Option<Preset>,
    /// JSON domain description.
    #[arg(long, value_name = "FILE")]
    domain: Option<PathBuf>,
}

#[derive(Args)]
struct RangeArgs {
    #[arg(long, default_value_t = 1e3)]
    emin: f64,
    #[arg(long, default_value_t = 1e8)]
    emax: f64,
    #[arg(long, default_value_t = 50)]
    samples: usize,
    #[arg(long, value_enum, default_value_t = Spacing::Log)]
    spacing: Spacing,
    #[arg(long, value_enum, default_value_t = Convention::Sum)]
    convention: Convention,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    /// f(k) = k³, b_k = k⁻²
    Example,
    /// f(k) = k, b_k = 1/k (non-summable heights)
    Harmonic,
}

#[derive(Clone, Copy, ValueEnum)]
enum Spacing {
    Log,
    Linear,
}

#[derive(Clone, Copy, ValueEnum)]
enum Convention {
    /// Sum of rectangle perimeters
    Sum,
    /// Perimeter of the union
    Union,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Convention> for PerimeterConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Sum => PerimeterConvention::SumOfRectangles,
            Convention::Union => PerimeterConvention::Union,
        }
    }
}

enum Failure {
    Usage(String),
    Config(String),
    Lib(Error),
    Io(io::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Config(_) => 3,
            Failure::Lib(e) => match e {
                Error::InvalidSpec(_) | Error::Json(_) => 3,
                Error::Capacity(_) | Error::Dimension { .. } => 4,
                _ => 5,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) | Failure::Config(m) => m.clone(),
            Failure::Lib(e) => e.to_string(),
            Failure::Io(e) => format!("output: {e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.into())
    }
}

type Outcome = std::result::Result<(), Failure>;

fn parse_spacing(s: &str) -> std::result::Result<f64, String> {
    let v = match s.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n.trim().parse().map_err(|e| format!("{s}: {e}"))?;
            let d: f64 = d.trim().parse().map_err(|e| format!("{s}: {e}"))?;
            n / d
        }
        None => s.trim().parse().map_err(|e| format!("{s}: {e}"))?,
    };
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("{s}: spacing must be positive"))
    }
}

fn load_domain(args: &DomainArgs) -> std::result::Result<SimpleDomainF64, Failure> {
    if let Some(path) = &args.domain {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
        return Ok(SimpleDomainF64::from_json(&text)?);
    }
    Ok(match args.preset.unwrap_or(Preset::Example) {
        Preset::Example => SimpleDomainF64::example(),
        Preset::Harmonic => SimpleDomainF64::harmonic(),
    })
}

fn energies(r: &RangeArgs) -> std::result::Result<Vec<f64>, Failure> {
    if !(r.emin.is_finite() && r.emax.is_finite() && r.emin > 0.0 && r.emin < r.emax) {
        return Err(Failure::Usage(format!(
            "need 0 < --emin < --emax, got {} and {}",
            r.emin, r.emax
        )));
    }
    if r.samples < 2 {
        return Err(Failure::Usage("--samples must be at least 2".into()));
    }
    Ok(match r.spacing {
        Spacing::Log => log_spaced(r.emin, r.emax, r.samples),
        Spacing::Linear => {
            let step = (r.emax - r.emin) / (r.samples - 1) as f64;
            (0..r.samples)
                .map(|i| {
                    if i + 1 == r.samples {
                        r.emax
                    } else {
                        r.emin + step * i as f64
                    }
                })
                .collect()
        }
    })
}

#[derive(Serialize)]
struct SweepDoc<'a> {
    convention: PerimeterConvention,
    seed: u64,
    rows: &'a [table::SweepRow],
}

#[derive(Serialize)]
struct FitDoc<'a> {
    column: &'a str,
    exponent: f64,
    coefficient: f64,
    r_squared: f64,
    fit_min: f64,
    fit_max: f64,
    samples: usize,
}

#[derive(Serialize)]
struct CoreDoc {
    energy: f64,
    n: usize,
    vol2: f64,
    perim_union: f64,
    perim_sum: f64,
    epsilon: f64,
    eroded_vol2: f64,
    eroded_vol2_error: f64,
    eroded_perim: f64,
    eroded_perim_error: f64,
    thick_rectangles: usize,
    resolution: usize,
    seed: u64,
}

fn run(cli: Cli, out: &mut impl Write) -> Outcome {
    match cli.command {
        Command::Validate {
            domain,
            horizon,
            format,
        } => {
            let d = load_domain(&domain)?;
            let report = validate_domain(&d, horizon)?;
            match format {
                Format::Json => write_json(out, &report)?,
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(out);
                    w.write_record(["check", "passed", "detail"])?;
                    for c in &report.checks {
                        w.write_record([
                            c.name.as_str(),
                            if c.passed { "true" } else { "false" },
                            &c.detail,
                        ])?;
                    }
                    w.flush()?;
                }
            }
        }
        Command::Bracket {
            domain,
            energy,
            format,
        } => {
            let d = load_domain(&domain)?;
            let r = bracket(&d, energy)?;
            match format {
                Format::Json => write_json(out, &r)?,
                Format::Csv => write_pairs_csv(
                    out,
                    &[
                        "E",
                        "N_lower",
                        "N_upper",
                        "gap",
                        "gap_certificate",
                        "active_rectangles",
                    ],
                    &[
                        real(r.energy),
                        r.lower.to_string(),
                        r.upper.to_string(),
                        r.gap.to_string(),
                        r.gap_certificate.map(real).unwrap_or_default(),
                        r.active_rectangles.to_string(),
                    ],
                )?,
            }
        }
        Command::Sweep {
            domain,
            range,
            format,
            seed,
        } => {
            let d = load_domain(&domain)?;
            let es = energies(&range)?;
            let convention = range.convention.into();
            let rows = sweep_rows(&d, &es, convention)?;
            match format {
                Format::Json => write_json(
                    out,
                    &SweepDoc {
                        convention,
                        seed,
                        rows: &rows,
                    },
                )?,
                Format::Csv => write_sweep_csv(out, &rows)?,
            }
        }
        Command::Fit {
            domain,
            range,
            column,
            fit_min,
            fit_max,
            format,
        } => {
            let d = load_domain(&domain)?;
            let es = energies(&range)?;
            let lo = fit_min.unwrap_or(range.emin * 10.0);
            let hi = fit_max.unwrap_or(range.emax);
            if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
                return Err(Failure::Usage(format!("empty fit window [{lo}, {hi}]")));
            }
            let window: Vec<f64> = es.into_iter().filter(|e| (lo..=hi).contains(e)).collect();
            let rows = sweep_rows(&d, &window, range.convention.into())?;
            let samples = rows
                .iter()
                .map(|r| {
                    r.column(&column).map(|v| (r.energy, v)).ok_or_else(|| {
                        Failure::Lib(Error::Domain(format!(
                            "{column} undefined at E = {}",
                            r.energy
                        )))
                    })
                })
                .collect::<std::result::Result<Vec<_>, _>>()?;
            let fit = fit_growth(&samples)?;
            let doc = FitDoc {
                column: &column,
                exponent: fit.exponent,
                coefficient: fit.coefficient,
                r_squared: fit.r_squared,
                fit_min: lo,
                fit_max: hi,
                samples: samples.len(),
            };
            match format {
                Format::Json => write_json(out, &doc)?,
                Format::Csv => write_pairs_csv(
                    out,
                    &[
                        "column",
                        "exponent",
                        "coefficient",
                        "r_squared",
                        "fit_min",
                        "fit_max",
                        "samples",
                    ],
                    &[
                        column.clone(),
                        real(doc.exponent),
                        real(doc.coefficient),
                        real(doc.r_squared),
                        real(lo),
                        real(hi),
                        doc.samples.to_string(),
                    ],
                )?,
            }
        }
        Command::FdCheck {
            domain,
            energy,
            h,
            format,
        } => {
            let d = load_domain(&domain)?;
            let r = crosscheck(&d, energy, &h)?;
            match format {
                Format::Json => write_json(out, &r)?,
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(out);
                    w.write_record([
                        "E",
                        "h",
                        "unknowns",
                        "fd_count",
                        "snapped",
                        "N_lower",
                        "N_upper",
                        "snapped_lower",
                        "snapped_upper",
                        "extrapolated_count",
                        "contained",
                    ])?;
                    let opt = |v: Option<String>| v.unwrap_or_default();
                    for row in &r.rows {
                        w.write_record([
                            real(r.energy),
                            real(row.h),
                            row.unknowns.to_string(),
                            row.count.to_string(),
                            row.snapped.to_string(),
                            r.lower.to_string(),
                            r.upper.to_string(),
                            r.snapped_lower.to_string(),
                            r.snapped_upper.to_string(),
                            opt(r.extrapolated_count.map(|c| c.to_string())),
                            opt(r.contained.map(|c| c.to_string())),
                        ])?;
                    }
                    w.flush()?;
                }
            }
        }
        Command::Core {
            domain,
            energy,
            resolution,
            seed,
            format,
        } => {
            let d = load_domain(&domain)?;
            let c = core_stats(&d, energy)?;
            let est = donnelly_core_stats(&d, energy, resolution)?;
            let doc = CoreDoc {
                energy,
                n: c.n,
                vol2: c.volume,
                perim_union: c.perimeter_union,
                perim_sum: c.perimeter_sum,
                epsilon: est.epsilon,
                eroded_vol2: est.volume_estimate,
                eroded_vol2_error: est.volume_error,
                eroded_perim: est.perimeter_estimate,
                eroded_perim_error: est.perimeter_error,
                thick_rectangles: est.rectangles,
                resolution,
                seed,
            };
            match format {
                Format::Json => write_json(out, &doc)?,
                Format::Csv => write_pairs_csv(
                    out,
                    &[
                        "E",
                        "n_E",
                        "vol2",
                        "perim_union",
                        "perim_sum",
                        "epsilon",
                        "eroded_vol2",
                        "eroded_vol2_error",
                        "eroded_perim",
                        "eroded_perim_error",
                        "thick_rectangles",
                    ],
                    &[
                        real(energy),
                        c.n.to_string(),
                        real(c.volume),
                        real(c.perimeter_union),
                        real(c.perimeter_sum),
                        real(est.epsilon),
                        real(est.volume_estimate),
                        real(est.volume_error),
                        real(est.perimeter_estimate),
                        real(est.perimeter_error),
                        est.rectangles.to_string(),
                    ],
                )?,
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = run(cli, &mut out).and_then(|()| out.flush().map_err(Failure::Io));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("horn-spectra: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
