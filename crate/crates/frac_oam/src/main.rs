//! `frac-oam`: overlaps, spectra and propagation of fractional-OAM beams.
//!
//! Exit codes: 0 success, 2 bad arguments, 3 I/O failure, 4 numerical
//! non-convergence, 5 malformed input file.

use clap::{Args, Parser, Subcommand};
use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use frac_oam::analytic;
use frac_oam::formats::{
    read_field_csv, write_field_csv, write_intensity_pgm, write_phase_ppm, write_spectrum_csv,
    write_vortex_csv, RunManifest,
};
use frac_oam::propagation::{propagate, PropagationConfig, Regime};
use frac_oam::vortex::{detect_vortices, loop_winding, net_charge};
use frac_oam::{wrap_angle, Error};

const EXIT_BAD_ARGS: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_NO_CONVERGENCE: u8 = 4;
const EXIT_MALFORMED: u8 = 5;

#[derive(Parser)]
#[command(
    name = "frac-oam",
    version,
    about = "Fractional orbital angular momentum: overlaps, spectra, beam propagation, vortices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Overlap <M'(alpha')|M(alpha)> and its probability
    Overlap(OverlapArgs),
    /// Integer-OAM decomposition of |M(beta)> above a probability threshold
    Spectrum(SpectrumArgs),
    /// OAM mean M - sin(2 pi M)/(2 pi)
    Mean(MeanArgs),
    /// Truncated OAM variance over |m'| <= mmax
    Variance(VarianceArgs),
    /// Propagate the beam and write field CSV, intensity PGM and phase PPM
    Propagate(PropagateArgs),
    /// Detect phase singularities in a field CSV
    Vortices(VorticesArgs),
    /// Re-run the subcommand recorded in a manifest
    Rerun(RerunArgs),
}

#[derive(Args, serde::Serialize, serde::Deserialize)]
struct OverlapArgs {
    #[arg(long = "M")]
    m_total: f64,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long = "Mprime")]
    mp_total: f64,
    #[arg(long, default_value_t = 0.0)]
    alphaprime: f64,
    #[arg(long, default_value_t = 0.0)]
    theta0: f64,
    /// Optionally also write a one-row CSV
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, serde::Serialize, serde::Deserialize)]
struct SpectrumArgs {
    #[arg(long = "M")]
    m_total: f64,
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    #[arg(long, default_value_t = 0.0)]
    theta0: f64,
    /// Keep modes with probability above this
    #[arg(long, default_value_t = 1e-4)]
    threshold: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, serde::Serialize, serde::Deserialize)]
struct MeanArgs {
    #[arg(long = "M")]
    m_total: f64,
}

#[derive(Args, serde::Serialize, serde::Deserialize)]
struct VarianceArgs {
    #[arg(long = "M")]
    m_total: f64,
    #[arg(long)]
    mmax: u64,
}

#[derive(Args, serde::Serialize, serde::Deserialize)]
struct PropagateArgs {
    #[arg(long = "M")]
    m_total: f64,
    /// Orientation of the phase discontinuity, radians in [0, 2pi)
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    /// Dimensionless k*w0 (w0 = 1 internally; lengths are in units of w0)
    #[arg(long, default_value_t = 100.0)]
    kw0: f64,
    /// Dimensionless propagation distance k*z
    #[arg(long)]
    kz: f64,
    #[arg(long, value_enum, default_value_t = RegimeArg::Exact)]
    regime: RegimeArg,
    #[arg(long = "grid-n", default_value_t = 401)]
    grid_n: usize,
    /// Grid half-width in units of w0
    #[arg(long, default_value_t = 3.0)]
    extent: f64,
    #[arg(long, default_value_t = 1e-4)]
    threshold: f64,
    /// kappa_max = factor / w0
    #[arg(long = "kappa-max-factor", default_value_t = 40.0)]
    kappa_max_factor: f64,
    #[arg(long = "quad-tol", default_value_t = 1e-8)]
    quadrature_tol: f64,
    #[arg(long = "out-prefix")]
    out_prefix: String,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
enum RegimeArg {
    Exact,
    Paraxial,
}

impl From<RegimeArg> for Regime {
    fn from(r: RegimeArg) -> Regime {
        match r {
            RegimeArg::Exact => Regime::Exact,
            RegimeArg::Paraxial => Regime::Paraxial,
        }
    }
}

#[derive(Args, serde::Serialize, serde::Deserialize)]
struct VorticesArgs {
    /// Field CSV produced by `propagate`
    #[arg(long)]
    field: PathBuf,
    /// Intensity floor as a fraction of the peak intensity
    #[arg(long, default_value_t = 1e-6)]
    floor: f64,
    /// Radius for the net-charge trailer, same length units as the CSV
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// Output CSV path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RerunArgs {
    #[arg(long)]
    manifest: PathBuf,
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => ExitCode::from(code),
    }
}

fn configure_threads() {
    if let Ok(v) = std::env::var("FRAC_OAM_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
        }
    }
}

fn run(command: Command) -> Result<(), u8> {
    match command {
        Command::Overlap(args) => cmd_overlap(&args),
        Command::Spectrum(args) => cmd_spectrum(&args),
        Command::Mean(args) => {
            println!("mean = {}", analytic::oam_mean(args.m_total));
            Ok(())
        }
        Command::Variance(args) => cmd_variance(&args),
        Command::Propagate(args) => cmd_propagate(&args),
        Command::Vortices(args) => cmd_vortices(&args),
        Command::Rerun(args) => cmd_rerun(&args),
    }
}

fn bad_args(msg: impl std::fmt::Display) -> u8 {
    eprintln!("error: {msg}");
    EXIT_BAD_ARGS
}

fn io_fail(path: &Path, err: impl std::fmt::Display) -> u8 {
    eprintln!("error: cannot write {}: {err}", path.display());
    EXIT_IO
}

fn cmd_overlap(args: &OverlapArgs) -> Result<(), u8> {
    for (name, v) in [
        ("M", args.m_total),
        ("Mprime", args.mp_total),
        ("alpha", args.alpha),
        ("alphaprime", args.alphaprime),
        ("theta0", args.theta0),
    ] {
        if !v.is_finite() {
            return Err(bad_args(format!("{name} must be finite")));
        }
    }
    let alpha = wrap_angle(args.alpha);
    let alphap = wrap_angle(args.alphaprime);
    let o = analytic::overlap(args.m_total, alpha, args.mp_total, alphap, args.theta0);
    println!("overlap_re = {:.12}", o.re);
    println!("overlap_im = {:.12}", o.im);
    println!("probability = {:.12}", o.norm_sqr());
    if let Some(path) = &args.csv {
        let mut text = String::from("re,im,probability\n");
        text.push_str(&format!("{},{},{}\n", o.re, o.im, o.norm_sqr()));
        fs::write(path, text).map_err(|e| io_fail(path, e))?;
        write_manifest(
            path,
            "overlap",
            serde_json::to_value(args).unwrap(),
            vec![path.display().to_string()],
        )?;
    }
    Ok(())
}

fn cmd_variance(args: &VarianceArgs) -> Result<(), u8> {
    if args.mmax == 0 {
        return Err(bad_args("mmax must be at least 1"));
    }
    println!(
        "variance_truncated = {}",
        analytic::oam_variance_truncated(args.m_total, args.mmax)
    );
    Ok(())
}

fn cmd_spectrum(args: &SpectrumArgs) -> Result<(), u8> {
    if !(args.threshold > 0.0 && args.threshold < 1.0) {
        return Err(bad_args(format!(
            "threshold must lie in (0, 1), got {}",
            args.threshold
        )));
    }
    let spec = analytic::spectrum(
        args.m_total,
        wrap_angle(args.beta),
        args.theta0,
        args.threshold,
    );
    let file = fs::File::create(&args.out).map_err(|e| io_fail(&args.out, e))?;
    let mut w = BufWriter::new(file);
    write_spectrum_csv(&mut w, &spec).map_err(|e| io_fail(&args.out, e))?;
    w.flush().map_err(|e| io_fail(&args.out, e))?;
    write_manifest(
        &args.out,
        "spectrum",
        serde_json::to_value(args).unwrap(),
        vec![args.out.display().to_string()],
    )
}

fn cmd_propagate(args: &PropagateArgs) -> Result<(), u8> {
    let mut config = PropagationConfig::new(
        args.m_total,
        args.alpha,
        args.kw0,
        args.kz,
        args.regime.into(),
    );
    config.grid_n = args.grid_n;
    config.extent = args.extent;
    config.spectrum_threshold = args.threshold;
    config.kappa_max_factor = args.kappa_max_factor;
    config.quadrature_tol = args.quadrature_tol;
    config.validate().map_err(bad_args)?;

    let grid = propagate(&config).map_err(|e| match e {
        Error::NonConvergence { .. } => {
            eprintln!("error: {e}");
            EXIT_NO_CONVERGENCE
        }
        other => bad_args(other),
    })?;

    let field_path = PathBuf::from(format!("{}_field.csv", args.out_prefix));
    let pgm_path = PathBuf::from(format!("{}_intensity.pgm", args.out_prefix));
    let ppm_path = PathBuf::from(format!("{}_phase.ppm", args.out_prefix));

    let file = fs::File::create(&field_path).map_err(|e| io_fail(&field_path, e))?;
    let mut w = BufWriter::new(file);
    write_field_csv(&mut w, &grid).map_err(|e| io_fail(&field_path, e))?;
    w.flush().map_err(|e| io_fail(&field_path, e))?;

    let file = fs::File::create(&pgm_path).map_err(|e| io_fail(&pgm_path, e))?;
    let mut w = BufWriter::new(file);
    write_intensity_pgm(&mut w, &grid).map_err(|e| io_fail(&pgm_path, e))?;
    w.flush().map_err(|e| io_fail(&pgm_path, e))?;

    let file = fs::File::create(&ppm_path).map_err(|e| io_fail(&ppm_path, e))?;
    let mut w = BufWriter::new(file);
    write_phase_ppm(&mut w, &grid).map_err(|e| io_fail(&ppm_path, e))?;
    w.flush().map_err(|e| io_fail(&ppm_path, e))?;

    let manifest_path = PathBuf::from(format!("{}_manifest.json", args.out_prefix));
    let manifest = RunManifest::new(
        "propagate",
        serde_json::to_value(args).unwrap(),
        vec![
            field_path.display().to_string(),
            pgm_path.display().to_string(),
            ppm_path.display().to_string(),
        ],
    );
    fs::write(&manifest_path, manifest.to_json_pretty()).map_err(|e| io_fail(&manifest_path, e))
}

fn cmd_vortices(args: &VorticesArgs) -> Result<(), u8> {
    if args.floor.is_nan() || args.floor < 0.0 || args.radius.is_nan() || args.radius <= 0.0 {
        return Err(bad_args("floor must be >= 0 and radius > 0"));
    }
    let file = fs::File::open(&args.field).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", args.field.display());
        EXIT_IO
    })?;
    let grid = read_field_csv(BufReader::new(file)).map_err(|e| {
        eprintln!("error: malformed field CSV {}: {e}", args.field.display());
        EXIT_MALFORMED
    })?;
    let peak = grid.intensity().iter().copied().fold(0.0, f64::max);
    let floor = args.floor * peak;
    let vset = detect_vortices(&grid, floor);
    let detected = net_charge(&vset, args.radius);
    // the boundary-loop winding is the defining net charge; it also counts
    // singularities whose plaquettes fall below the intensity floor (an
    // integer-M beam has its axis vortex on an exactly-zero sample)
    let net = loop_winding(&grid, args.radius);
    if detected != net {
        eprintln!(
            "note: boundary-loop winding {net} differs from the detected-vortex sum {detected} \
             (singularities below the intensity floor)"
        );
    }
    match &args.out {
        Some(path) => {
            let file = fs::File::create(path).map_err(|e| io_fail(path, e))?;
            let mut w = BufWriter::new(file);
            write_vortex_csv(&mut w, &vset, args.radius, net).map_err(|e| io_fail(path, e))?;
            w.flush().map_err(|e| io_fail(path, e))?;
            write_manifest(
                path,
                "vortices",
                serde_json::to_value(args).unwrap(),
                vec![path.display().to_string()],
            )
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            write_vortex_csv(&mut w, &vset, args.radius, net).map_err(|e| {
                eprintln!("error: cannot write to stdout: {e}");
                EXIT_IO
            })
        }
    }
}

fn cmd_rerun(args: &RerunArgs) -> Result<(), u8> {
    let text = fs::read_to_string(&args.manifest).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", args.manifest.display());
        EXIT_IO
    })?;
    let manifest: RunManifest = serde_json::from_str(&text).map_err(|e| {
        eprintln!("error: malformed manifest: {e}");
        EXIT_MALFORMED
    })?;
    fn reparse<T: serde::de::DeserializeOwned>(v: serde_json::Value) -> Result<T, u8> {
        serde_json::from_value(v).map_err(|e| {
            eprintln!("error: manifest config does not match subcommand: {e}");
            EXIT_MALFORMED
        })
    }
    let config = manifest.config.clone();
    match manifest.subcommand.as_str() {
        "overlap" => cmd_overlap(&reparse(config)?),
        "spectrum" => cmd_spectrum(&reparse(config)?),
        "propagate" => cmd_propagate(&reparse(config)?),
        "vortices" => cmd_vortices(&reparse(config)?),
        other => {
            eprintln!("error: manifest records unknown subcommand {other:?}");
            Err(EXIT_MALFORMED)
        }
    }
}

fn write_manifest(
    primary_output: &Path,
    subcommand: &str,
    config: serde_json::Value,
    outputs: Vec<String>,
) -> Result<(), u8> {
    let manifest = RunManifest::new(subcommand, config, outputs);
    let path = primary_output.with_extension("manifest.json");
    fs::write(&path, manifest.to_json_pretty()).map_err(|e| io_fail(&path, e))
}
