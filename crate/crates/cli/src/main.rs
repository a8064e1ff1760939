//! Command-line front end: data ingestion → fitting / KK estimation →
//! ε(iζ) → force and reduction-factor tables.
//!
//! Every command is a thin composition of library calls; no numeric logic
//! lives here. Output CSVs carry a `#` header block recording the full
//! configuration, so identical invocations produce byte-identical files.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use casimir_core::casimir::{self, EtaOptions, MirrorSpec};
use casimir_core::drude::DrudeParams;
use casimir_core::fitting::{self, FitConfig};
use casimir_core::kk::{self, DielectricModel, EstimateConfig};
use casimir_core::quad::QuadTol;
use casimir_core::spectra::{self, SpectralTable, TableFormat};
use casimir_core::{CasimirError, FitError, KkError, SpectraError};

const EXIT_CONFIG: u8 = 2;
const EXIT_DATA: u8 = 3;
const EXIT_CONVERGENCE: u8 = 4;
const EXIT_IO: u8 = 5;

const AFTER_HELP: &str = "\
Exit codes:
  0  success
  2  configuration error (flags, parameter files, distance lists)
  3  data validation or parse error in an input table
  4  a fit, estimation or quadrature did not converge
  5  i/o failure

Environment:
  CASIMIR_QUAD_TOL  relative quadrature tolerance (default 1e-8)";

#[derive(Parser)]
#[command(
    name = "casimir",
    version,
    about = "Casimir force between metallic mirrors from tabulated optical data",
    after_help = AFTER_HELP
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Eps,
    Nk,
}

impl From<FormatArg> for TableFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Eps => TableFormat::Eps,
            FormatArg::Nk => TableFormat::Nk,
        }
    }
}

#[derive(Args, Clone)]
struct InputArgs {
    /// CSV table of optical data
    #[arg(long)]
    input: PathBuf,
    /// Column layout of the input table
    #[arg(long, value_enum, default_value = "eps")]
    format: FormatArg,
    /// Second table extending the input toward high frequencies
    #[arg(long)]
    input_high: Option<PathBuf>,
    /// Joint frequency of the two tables, eV
    #[arg(long, default_value_t = 1.25)]
    omega_joint: f64,
}

#[derive(Args, Clone)]
struct DrudeArgs {
    /// Drude parameters as inline JSON, e.g. '{"omega_p_eV":9.0,"omega_tau_eV":0.035}'
    #[arg(long)]
    drude: Vec<String>,
    /// File with the same JSON schema (one object or an array of objects)
    #[arg(long)]
    params: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Fit (omega_p, omega_tau, P) to both eps columns of a table
    FitDrude {
        #[command(flatten)]
        input: InputArgs,
        /// Lower edge of the fit window, eV (default: table minimum)
        #[arg(long)]
        omega_min: Option<f64>,
        /// Upper edge of the fit window, eV
        #[arg(long, default_value_t = 1.0)]
        omega_max: f64,
        /// Write the JSON fit report here instead of stdout
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Estimate (omega_p, omega_tau) by matching Kramers-Kronig-predicted
    /// eps' against the observed column
    EstimateDrudeKk {
        #[command(flatten)]
        input: InputArgs,
        /// Cutoff below which the Drude extrapolation replaces data, eV
        /// (default: lowest tabulated frequency)
        #[arg(long)]
        omega_c: Option<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Compare observed eps' with the Kramers-Kronig prediction point by point
    KkCheck {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        omega_c: Option<f64>,
        #[command(flatten)]
        drude: DrudeArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Tabulate eps(i zeta) on a log grid
    EpsImagAxis {
        /// CSV table for the data-driven model (otherwise closed-form Drude)
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "eps")]
        format: FormatArg,
        #[arg(long)]
        omega_c: Option<f64>,
        #[command(flatten)]
        drude: DrudeArgs,
        #[arg(long, default_value_t = 1e-2)]
        zeta_min: f64,
        #[arg(long, default_value_t = 1e2)]
        zeta_max: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Reduction factors: one row per parameter set, one column per distance
    Eta {
        #[command(flatten)]
        drude: DrudeArgs,
        /// Plate separations in micrometers, comma-separated
        #[arg(long, default_value = "0.1,0.3,0.5,1.0,3.0")]
        distances: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Force per unit area at each distance
    Force {
        #[command(flatten)]
        drude: DrudeArgs,
        #[arg(long, default_value = "0.1,0.3,0.5,1.0,3.0")]
        distances: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Reduction factors under plasma- and relaxation-frequency variations
    Sensitivity {
        #[command(flatten)]
        drude: DrudeArgs,
        /// Optional data table: vary only the extrapolation below omega_c
        /// while the tabulated data stays fixed
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "eps")]
        format: FormatArg,
        #[arg(long)]
        omega_c: Option<f64>,
        /// Fractional plasma-frequency variation
        #[arg(long, default_value_t = 0.15)]
        delta_p: f64,
        /// Fractional relaxation-frequency variation
        #[arg(long, default_value_t = 0.30)]
        delta_tau: f64,
        #[arg(long, default_value = "0.1,0.3,0.5,1.0,3.0")]
        distances: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(msg: impl Into<String>) -> Self {
        Failure {
            code: EXIT_CONFIG,
            message: msg.into(),
        }
    }
}

impl From<SpectraError> for Failure {
    fn from(e: SpectraError) -> Self {
        let code = match &e {
            SpectraError::Io { .. } => EXIT_IO,
            _ => EXIT_DATA,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<KkError> for Failure {
    fn from(e: KkError) -> Self {
        let code = match &e {
            KkError::Spectra(SpectraError::Io { .. }) => EXIT_IO,
            KkError::Spectra(_) | KkError::BadInput(_) | KkError::InvalidModel(_) => EXIT_DATA,
            _ => EXIT_CONVERGENCE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<CasimirError> for Failure {
    fn from(e: CasimirError) -> Self {
        let code = match &e {
            CasimirError::InvalidEpsilon { .. } | CasimirError::BadInput(_) => EXIT_DATA,
            CasimirError::NonPositiveSeparation(_) => EXIT_CONFIG,
            _ => EXIT_CONVERGENCE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<FitError> for Failure {
    fn from(e: FitError) -> Self {
        let code = match &e {
            FitError::NonConvergence { .. } | FitError::Unbounded { .. } => EXIT_CONVERGENCE,
            FitError::BadConfig(_) => EXIT_CONFIG,
            _ => EXIT_DATA,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: EXIT_IO,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn quad_tol() -> Result<f64, Failure> {
    match std::env::var("CASIMIR_QUAD_TOL") {
        Ok(s) => s
            .parse::<f64>()
            .ok()
            .filter(|v| *v > 0.0 && *v < 1.0)
            .ok_or_else(|| {
                Failure::config(format!(
                    "CASIMIR_QUAD_TOL must be a tolerance in (0, 1), got {s:?}"
                ))
            }),
        Err(_) => Ok(1e-8),
    }
}

fn eta_options() -> Result<EtaOptions, Failure> {
    Ok(EtaOptions {
        rel_tol: quad_tol()?,
        ..Default::default()
    })
}

fn parse_distances(spec: &str) -> Result<Vec<f64>, Failure> {
    let mut out = Vec::new();
    for tok in spec.split(',') {
        let t = tok.trim();
        if t.is_empty() {
            continue;
        }
        let v: f64 = t
            .parse()
            .map_err(|_| Failure::config(format!("cannot parse distance {t:?} (micrometers)")))?;
        if v <= 0.0 || v.is_nan() {
            return Err(Failure::config(format!(
                "distances must be positive, got {v}"
            )));
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err(Failure::config("no distances given"));
    }
    if out.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Failure::config("distances must be strictly ascending"));
    }
    Ok(out)
}

fn parse_drude_args(args: &DrudeArgs) -> Result<Vec<DrudeParams>, Failure> {
    let mut sets = Vec::new();
    for text in &args.drude {
        sets.push(
            DrudeParams::from_json(text).map_err(|e| Failure::config(format!("--drude: {e}")))?,
        );
    }
    if let Some(path) = &args.params {
        let text = std::fs::read_to_string(path)?;
        let trimmed = text.trim_start();
        if trimmed.starts_with('[') {
            let list: Vec<DrudeParams> = serde_json::from_str(&text)
                .map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
            for p in &list {
                p.validate()
                    .map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
            }
            sets.extend(list);
        } else {
            sets.push(
                DrudeParams::from_json(&text)
                    .map_err(|e| Failure::config(format!("{}: {e}", path.display())))?,
            );
        }
    }
    Ok(sets)
}

fn require_one(args: &DrudeArgs) -> Result<DrudeParams, Failure> {
    let sets = parse_drude_args(args)?;
    match sets.len() {
        1 => Ok(sets.into_iter().next().unwrap()),
        0 => Err(Failure::config(
            "Drude parameters required: pass --drude or --params",
        )),
        n => Err(Failure::config(format!(
            "exactly one parameter set expected, got {n}"
        ))),
    }
}

fn load_input(args: &InputArgs) -> Result<SpectralTable, Failure> {
    let table = spectra::load_table(&args.input, args.format.into())?;
    match &args.input_high {
        Some(high_path) => {
            let high = spectra::load_table(high_path, args.format.into())?;
            Ok(spectra::merge_tables(&table, &high, args.omega_joint)?)
        }
        None => Ok(table),
    }
}

fn emit(output: &Option<PathBuf>, content: &str) -> Result<(), Failure> {
    match output {
        Some(path) => std::fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn config_header(entries: &[(&str, String)]) -> String {
    let mut s = String::new();
    for (k, v) in entries {
        let _ = writeln!(s, "# {k}: {v}");
    }
    s
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::FitDrude {
            input,
            omega_min,
            omega_max,
            output,
        } => {
            let table = load_input(&input)?;
            let cfg = FitConfig {
                omega_min: omega_min.unwrap_or(0.0),
                omega_max,
                ..Default::default()
            };
            let mut report = fitting::fit_drude(&table, &cfg)?;
            let (ep, et, epol) = fitting::param_errors(&table, &cfg, &report.params)?;
            report.params.err_p = Some(ep);
            report.params.err_tau = Some(et);
            report.params.err_pol = Some(epol);

            println!(
                "fitted parameters ({} points, chi2 = {:.6e}):",
                report.n_points, report.chi2
            );
            println!("  {:<12} {:>12} {:>12}", "parameter", "value", "error");
            println!(
                "  {:<12} {:>12.5} {:>12.2e}",
                "omega_p/eV", report.params.omega_p, ep
            );
            println!(
                "  {:<12} {:>12.6} {:>12.2e}",
                "omega_tau/eV", report.params.omega_tau, et
            );
            println!("  {:<12} {:>12.4} {:>12.2e}", "P", report.params.pol, epol);
            if report.pol_flagged {
                println!("  note: |P| > 50 — the window carries little information on P");
            }

            let json = serde_json::to_string_pretty(&report).expect("report serialization");
            if let Some(path) = &output {
                std::fs::write(path, json)?;
            } else {
                println!("{json}");
            }
            Ok(())
        }

        Command::EstimateDrudeKk {
            input,
            omega_c,
            output,
        } => {
            let table = load_input(&input)?;
            let wc = omega_c.unwrap_or_else(|| table.omega_min());
            let est = kk::estimate_drude_kk_with(
                &table,
                wc,
                &EstimateConfig {
                    quad_tol: QuadTol::rel(quad_tol()?),
                    ..Default::default()
                },
            )?;
            println!(
                "estimated omega_p = {:.4} eV, omega_tau = {:.5} eV (omega_c = {wc} eV)",
                est.omega_p, est.omega_tau
            );
            let json = est.to_json();
            if let Some(path) = &output {
                std::fs::write(path, json)?;
            } else {
                println!("{json}");
            }
            Ok(())
        }

        Command::KkCheck {
            input,
            omega_c,
            drude,
            output,
        } => {
            let table = load_input(&input)?;
            let wc = omega_c.unwrap_or_else(|| table.omega_min());
            let tol = QuadTol::rel(quad_tol()?);
            let sets = parse_drude_args(&drude)?;
            let params = match sets.len() {
                0 => kk::estimate_drude_kk_with(
                    &table,
                    wc,
                    &EstimateConfig {
                        quad_tol: tol,
                        ..Default::default()
                    },
                )?,
                1 => sets.into_iter().next().unwrap(),
                n => {
                    return Err(Failure::config(format!(
                        "kk-check takes one parameter set, got {n}"
                    )))
                }
            };
            let model = DielectricModel::from_table(&table, wc, params.clone())?;

            let mut csv = config_header(&[
                ("command", "kk-check".into()),
                ("input", input.input.display().to_string()),
                ("omega_c_eV", format!("{wc}")),
                ("omega_p_eV", format!("{}", params.omega_p)),
                ("omega_tau_eV", format!("{}", params.omega_tau)),
            ]);
            csv.push_str("omega_eV,eps_re_data,eps_re_kk,rel_dev\n");
            let mut worst: f64 = 0.0;
            for p in table.points() {
                let Some(re_obs) = p.eps_re else { continue };
                let re_kk = kk::kk_real_from_imag_with(&model, p.omega, tol)?;
                let rel = (re_kk - re_obs) / re_obs.abs().max(1e-300);
                worst = worst.max(rel.abs());
                let _ = writeln!(
                    csv,
                    "{:.9e},{:.9e},{:.9e},{:.3e}",
                    p.omega, re_obs, re_kk, rel
                );
            }
            emit(&output, &csv)?;
            eprintln!("max |rel_dev| = {worst:.3e} over {} points", table.len());
            Ok(())
        }

        Command::EpsImagAxis {
            input,
            format,
            omega_c,
            drude,
            zeta_min,
            zeta_max,
            points,
            output,
        } => {
            if !(zeta_min > 0.0 && zeta_max > zeta_min && points >= 2) {
                return Err(Failure::config(
                    "need 0 < zeta-min < zeta-max and at least 2 points",
                ));
            }
            let tol = QuadTol::rel(quad_tol()?);
            let params = require_one(&drude)?;
            let mut header = vec![
                ("command", "eps-imag-axis".to_string()),
                ("omega_p_eV", format!("{}", params.omega_p)),
                ("omega_tau_eV", format!("{}", params.omega_tau)),
            ];
            let model = match &input {
                Some(path) => {
                    let table = spectra::load_table(path, format.into())?;
                    let wc = omega_c.unwrap_or_else(|| table.omega_min());
                    header.push(("input", path.display().to_string()));
                    header.push(("omega_c_eV", format!("{wc}")));
                    Some(DielectricModel::from_table(&table, wc, params.clone())?)
                }
                None => None,
            };
            let mut csv = config_header(&header);
            csv.push_str("zeta_eV,eps\n");
            for i in 0..points {
                let z = zeta_min * (zeta_max / zeta_min).powf(i as f64 / (points - 1) as f64);
                let eps = match &model {
                    Some(m) => kk::kk_imag_axis_with(m, z, tol)?,
                    None => 1.0 + params.omega_p * params.omega_p / (z * (z + params.omega_tau)),
                };
                let _ = writeln!(csv, "{z:.9e},{eps:.9e}");
            }
            emit(&output, &csv)?;
            Ok(())
        }

        Command::Eta {
            drude,
            distances,
            output,
        } => {
            let sets = parse_drude_args(&drude)?;
            if sets.is_empty() {
                return Err(Failure::config(
                    "at least one parameter set required (--drude/--params)",
                ));
            }
            let dist_um = parse_distances(&distances)?;
            let opts = eta_options()?;
            let mut csv = config_header(&[
                ("command", "eta".into()),
                ("distances_um", distances.clone()),
                ("quad_tol", format!("{:e}", opts.rel_tol)),
            ]);
            csv.push_str("omega_p_eV,omega_tau_eV");
            for l in &dist_um {
                let _ = write!(csv, ",eta_{l}um");
            }
            csv.push('\n');
            for p in &sets {
                let mirror = MirrorSpec::drude(p.clone());
                let _ = write!(csv, "{:.6},{:.6}", p.omega_p, p.omega_tau);
                for &l_um in &dist_um {
                    let r = casimir::reduction_factor_with(&mirror, l_um * 1e-6, &opts)?;
                    let _ = write!(csv, ",{:.6}", r.eta);
                }
                csv.push('\n');
            }
            emit(&output, &csv)?;
            Ok(())
        }

        Command::Force {
            drude,
            distances,
            output,
        } => {
            let params = require_one(&drude)?;
            let dist_um = parse_distances(&distances)?;
            let opts = eta_options()?;
            let mirror = MirrorSpec::drude(params.clone());
            let mut csv = config_header(&[
                ("command", "force".into()),
                ("omega_p_eV", format!("{}", params.omega_p)),
                ("omega_tau_eV", format!("{}", params.omega_tau)),
                ("distances_um", distances.clone()),
                ("quad_tol", format!("{:e}", opts.rel_tol)),
            ]);
            csv.push_str("L_m,force_Pa,eta,quad_err\n");
            for &l_um in &dist_um {
                let r = casimir::reduction_factor_with(&mirror, l_um * 1e-6, &opts)?;
                let _ = writeln!(
                    csv,
                    "{:.9e},{:.9e},{:.6},{:.2e}",
                    r.separation_m, r.force_pa, r.eta, r.quad_err
                );
            }
            emit(&output, &csv)?;
            Ok(())
        }

        Command::Sensitivity {
            drude,
            input,
            format,
            omega_c,
            delta_p,
            delta_tau,
            distances,
            output,
        } => {
            if !(0.0..1.0).contains(&delta_p) || !(0.0..1.0).contains(&delta_tau) {
                return Err(Failure::config("delta-p and delta-tau must lie in [0, 1)"));
            }
            let base = require_one(&drude)?;
            let dist_um = parse_distances(&distances)?;
            let dist_m: Vec<f64> = dist_um.iter().map(|l| l * 1e-6).collect();
            let opts = eta_options()?;

            let mut header = vec![
                ("command", "sensitivity".to_string()),
                ("omega_p_eV", format!("{}", base.omega_p)),
                ("omega_tau_eV", format!("{}", base.omega_tau)),
                ("delta_p", format!("{delta_p}")),
                ("delta_tau", format!("{delta_tau}")),
                ("distances_um", distances.clone()),
            ];

            // with a data table the variations touch only the extrapolation
            // head; the tabulated spectrum above omega_c stays fixed
            let rows: Vec<(String, Vec<f64>)> = match &input {
                Some(path) => {
                    let table = spectra::load_table(path, format.into())?;
                    let wc = omega_c.unwrap_or_else(|| table.omega_min());
                    header.push(("input", path.display().to_string()));
                    header.push(("omega_c_eV", format!("{wc}")));
                    let model = DielectricModel::from_table(&table, wc, base.clone())?;
                    let variants = sensitivity_variants(&base, delta_p, delta_tau);
                    let mut rows = Vec::new();
                    for (label, p) in variants {
                        let mirror = MirrorSpec::model(model.with_low(p)?, label.clone());
                        let mut etas = Vec::new();
                        for &l in &dist_m {
                            etas.push(casimir::reduction_factor_with(&mirror, l, &opts)?.eta);
                        }
                        rows.push((label, etas));
                    }
                    rows
                }
                None => {
                    let t = fitting::sensitivity_table(&base, delta_p, delta_tau, &dist_m)?;
                    t.rows.into_iter().map(|r| (r.label, r.etas)).collect()
                }
            };

            let mut csv = config_header(&header);
            csv.push_str("variation");
            for l in &dist_um {
                let _ = write!(csv, ",eta_{l}um");
            }
            csv.push('\n');
            for (label, etas) in &rows {
                let _ = write!(csv, "{label}");
                for e in etas {
                    let _ = write!(csv, ",{e:.6}");
                }
                csv.push('\n');
            }
            let base_eta = rows[0].1[0];
            let spread_p = (rows[1].1[0] - rows[2].1[0]) / (2.0 * base_eta) * 100.0;
            let spread_t = (rows[4].1[0] - rows[3].1[0]) / (2.0 * base_eta) * 100.0;
            let _ = writeln!(
                csv,
                "# spread at {} um: omega_p ±{:.0}% -> {spread_p:.2}%, omega_tau ±{:.0}% -> {spread_t:.2}%",
                dist_um[0],
                delta_p * 100.0,
                delta_tau * 100.0
            );
            emit(&output, &csv)?;
            Ok(())
        }
    }
}

fn sensitivity_variants(
    base: &DrudeParams,
    delta_p: f64,
    delta_tau: f64,
) -> Vec<(String, DrudeParams)> {
    vec![
        ("base".into(), base.clone()),
        (
            format!("omega_p +{:.0}%", delta_p * 100.0),
            base.scale_omega_p(1.0 + delta_p),
        ),
        (
            format!("omega_p -{:.0}%", delta_p * 100.0),
            base.scale_omega_p(1.0 - delta_p),
        ),
        (
            format!("omega_tau +{:.0}%", delta_tau * 100.0),
            base.scale_omega_tau(1.0 + delta_tau),
        ),
        (
            format!("omega_tau -{:.0}%", delta_tau * 100.0),
            base.scale_omega_tau(1.0 - delta_tau),
        ),
    ]
}
