use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use delam::mesh::Case;
use delam_cli::compare::{compare, XyCurve, XyPoint};
use delam_cli::config::RunConfig;
use delam_cli::curve_io::{read_xy, write_analytic};
use delam_cli::runner::{reference_curve, run, RunMeta};
use delam_cli::{CliError, Result};

#[derive(Parser)]
#[command(name = "delam", version, about = "Delamination benchmarks with structural cohesive elements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags that override the configuration file.
#[derive(clap::Args)]
struct Setup {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = parse_case)]
    case: Option<Case>,
    /// Element size, mm.
    #[arg(long)]
    size: Option<f64>,
    #[arg(long)]
    material: Option<String>,
    /// End of the displacement ramp, mm.
    #[arg(long)]
    target: Option<f64>,
    /// Mesh a strip of this width, mm.
    #[arg(long)]
    strip: Option<f64>,
    /// Output CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a benchmark and write its load–displacement curve.
    Run {
        #[command(flatten)]
        setup: Setup,
        /// Print every converged increment to stderr.
        #[arg(long)]
        verbose: bool,
    },
    /// Write the closed-form reference curve.
    Analytic {
        #[command(flatten)]
        setup: Setup,
    },
    /// Compare a simulated curve with a reference curve.
    Compare {
        sim: PathBuf,
        reference: PathBuf,
    },
    /// Print a configuration with every default filled in.
    Defaults {
        #[arg(long, value_parser = parse_case, default_value = "dcb")]
        case: Case,
    },
}

fn parse_case(s: &str) -> std::result::Result<Case, String> {
    match s {
        "dcb" => Ok(Case::Dcb),
        "enf" => Ok(Case::Enf),
        "mmb" => Ok(Case::Mmb),
        "slb" => Ok(Case::Slb),
        _ => Err(format!("unknown case '{s}' (dcb, enf, mmb, slb)")),
    }
}

fn config_from(setup: &Setup) -> Result<RunConfig> {
    let mut c = match (&setup.config, setup.case) {
        (Some(path), _) => RunConfig::load(path)?,
        (None, Some(case)) => RunConfig::new(case, setup.size.unwrap_or(2.0)),
        (None, None) => {
            return Err(CliError::Config { key: "case".into(), message: "give --case or --config".into() });
        }
    };
    if let Some(case) = setup.case {
        c.case = case;
    }
    if let Some(s) = setup.size {
        c.element_size = s;
    }
    if setup.material.is_some() {
        c.material = setup.material.clone();
    }
    if setup.target.is_some() {
        c.target_displacement = setup.target;
    }
    if setup.strip.is_some() {
        c.strip_width = setup.strip;
    }
    if setup.out.is_some() {
        c.output.curve = setup.out.clone();
    }
    Ok(c)
}

/// Reference curves carry a `branch` column; rows past the load point may
/// not set the peak.
fn read_reference(path: &Path) -> Result<XyCurve> {
    let xy = read_xy(path)?;
    let mut rdr = csv::Reader::from_path(path).map_err(|e| CliError::Csv(path.to_path_buf(), e.to_string()))?;
    let header = rdr.headers().map_err(|e| CliError::Csv(path.to_path_buf(), e.to_string()))?.clone();
    let mut curve = XyCurve::from_pairs(&xy);
    if let Some(col) = header.iter().position(|h| h == "branch") {
        for (p, rec) in curve.points.iter_mut().zip(rdr.records()) {
            let rec = rec.map_err(|e| CliError::Csv(path.to_path_buf(), e.to_string()))?;
            p.peak_eligible = rec.get(col) != Some("propagation-past-load");
        }
    }
    Ok(curve)
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { setup, verbose } => {
            let config = config_from(&setup)?;
            let out = run(&config, |p| {
                if verbose {
                    eprintln!("{:5} δ = {:.5} mm  P = {:.4} N  ({} it)", p.increment, p.displacement, p.load, p.iterations);
                }
            })?;
            let m = &out.meta;
            println!(
                "{}: {} increments, peak {:.3} N, energy error {:.3}%, {:.2} s -> {}",
                m.case,
                m.increments,
                m.peak_load_n,
                100.0 * m.energy_error,
                m.wall_time_s,
                out.resolved.curve_path.display()
            );
            Ok(())
        }
        Command::Analytic { setup } => {
            let config = config_from(&setup)?;
            let r = config.resolve()?;
            let curve = reference_curve(&r)?;
            let path = config.output.analytic.clone().or(setup.out).unwrap_or_else(|| PathBuf::from(format!("{}_analytic.csv", config.case)));
            write_analytic(&path, &curve)?;
            let peak = curve.peak();
            println!("{} ({}): peak {:.3} N at {:.4} mm -> {}", config.case, curve.variant, peak.load, peak.delta, path.display());
            Ok(())
        }
        Command::Compare { sim, reference } => {
            let mut s = XyCurve::from_pairs(&read_xy(&sim)?);
            if s.points.first().is_some_and(|p| p.delta > 0.0) {
                s.points.insert(0, XyPoint { delta: 0.0, load: 0.0, peak_eligible: true });
            }
            let mut report = compare(&s, &read_reference(&reference)?)?;
            let meta_path = sim.with_extension("meta.toml");
            if meta_path.exists() {
                let meta = RunMeta::load(&meta_path)?;
                report.runtime_s = Some(meta.wall_time_s);
                report.mesh = Some(meta.mesh);
            }
            print!("{}", toml::to_string(&report).expect("reports always serialize"));
            Ok(())
        }
        Command::Defaults { case } => {
            print!("{}", RunConfig::defaults(case).to_toml());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
