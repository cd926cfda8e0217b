use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use ccpb::analysis::{
    explicit_solution_error, generalized_criteria, regime_boundary, screening_length, DeviationMeasure, Regime,
};
use ccpb::donnan::{
    channel_alpha, channel_bath_ratio, debye_length, electrode_alpha, electrode_bulk_ratio, nondim_voltage,
    ChannelGeometry, ElectrodeGeometry, PhysicalConditions,
};
use ccpb::kernel::{sup_approx_error, ApproxVariant, Eps};
use ccpb::output::{profile_record, Format, Record, Scale, SweepParameter, SweepSpec};
use ccpb::solver::{
    solve, solve_asymptotic, InfiniteProfile, ProblemParams, SolveOptions, DEFAULT_SAMPLES, DEFAULT_TOL,
};
use ccpb::Error;

const TOL_ENV: &str = "CCPB_DEFAULT_TOL";

#[derive(Parser)]
#[command(
    name = "ccpb",
    version,
    about = "Finite-domain Poisson-Boltzmann steady states and estimates"
)]
struct Cli {
    /// Output format (estimates default to json, everything else to csv).
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one steady state and write the full profile.
    Solve(SolveArgs),
    /// Error of the asymptotic approximations along a sweep.
    ApproxError(ApproxErrorArgs),
    /// Regime boundary curves L_AB(V) and L_BC(V).
    Regimes(RegimesArgs),
    /// Screening length inflation along an L sweep.
    Screening(ScreeningArgs),
    /// Donnan-equilibrium estimates.
    #[command(subcommand)]
    Estimate(EstimateCommand),
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long = "L", allow_negative_numbers = true)]
    length: f64,
    #[arg(long = "V", allow_negative_numbers = true)]
    voltage: f64,
    /// Stern layer width.
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    /// Solver tolerance [env: CCPB_DEFAULT_TOL, default 1e-10].
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, allow_negative_numbers = true)]
    start: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    stop: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long, value_enum)]
    scale: Option<ScaleArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScaleArg {
    Linear,
    Log,
}

impl SweepArgs {
    fn spec(&self, parameter: SweepParameter, defaults: (f64, f64, usize, Scale)) -> ccpb::Result<SweepSpec> {
        let scale = match self.scale {
            Some(ScaleArg::Linear) => Scale::Linear,
            Some(ScaleArg::Log) => Scale::Log,
            None => defaults.3,
        };
        SweepSpec::new(
            parameter,
            self.start.unwrap_or(defaults.0),
            self.stop.unwrap_or(defaults.1),
            self.points.unwrap_or(defaults.2),
            scale,
        )
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ApproxSweep {
    L,
    Eps,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Crude,
    Refined,
}

#[derive(Args)]
struct ApproxErrorArgs {
    /// Sweep the domain size (explicit solution error) or ε (integral error).
    #[arg(long, value_enum, default_value = "l")]
    sweep: ApproxSweep,
    #[arg(long = "V", default_value_t = 5.0, allow_negative_numbers = true)]
    voltage: f64,
    #[arg(long, value_enum, default_value = "refined")]
    variant: VariantArg,
    /// Upper end of the φ range for the integral error.
    #[arg(long, default_value_t = 10.0)]
    phi_max: f64,
    /// Grid points per sup-norm evaluation.
    #[arg(long, default_value_t = 2000)]
    grid: usize,
    #[arg(long)]
    tol: Option<f64>,
    #[command(flatten)]
    range: SweepArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Criteria {
    Analytic,
    Generalized,
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureArg {
    Window,
    Center,
}

#[derive(Args)]
struct RegimesArgs {
    /// Regime tolerance.
    #[arg(long, default_value_t = 0.05)]
    tol: f64,
    #[arg(long, value_enum, default_value = "analytic")]
    criteria: Criteria,
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    /// Deviation measure for the generalized criteria.
    #[arg(long, value_enum, default_value = "window")]
    measure: MeasureArg,
    /// Width of the near-wall window.
    #[arg(long, default_value_t = 10.0)]
    window: f64,
    /// Search range in L for the generalized boundaries.
    #[arg(long = "L-min", default_value_t = 1.0)]
    l_min: f64,
    #[arg(long = "L-max", default_value_t = 1e4)]
    l_max: f64,
    /// Solver tolerance [env: CCPB_DEFAULT_TOL, default 1e-10].
    #[arg(long)]
    solver_tol: Option<f64>,
    #[command(flatten)]
    range: SweepArgs,
}

#[derive(Args)]
struct ScreeningArgs {
    #[arg(long = "V", default_value_t = 10.0, allow_negative_numbers = true)]
    voltage: f64,
    #[arg(long)]
    tol: Option<f64>,
    #[command(flatten)]
    range: SweepArgs,
}

#[derive(Args)]
struct PhysicalArgs {
    /// Mean salt concentration in mol/L.
    #[arg(long)]
    concentration: Option<f64>,
    #[arg(long, default_value_t = 298.0)]
    temperature: f64,
    #[arg(long, default_value_t = 78.5)]
    permittivity: f64,
}

#[derive(Subcommand)]
enum EstimateCommand {
    /// Bath size required around a charged channel.
    Channel {
        /// Counter-ion enrichment p_channel / c.
        #[arg(long, default_value_t = 180.0)]
        r: f64,
        #[arg(long, default_value_t = 0.01)]
        max_error: f64,
        /// |Ω_channel| / |Ω_bath|, to evaluate α.
        #[arg(long)]
        volume_ratio: Option<f64>,
        #[command(flatten)]
        physical: PhysicalArgs,
    },
    /// Bulk reservoir size required next to porous electrodes.
    Electrode {
        /// Donnan potential in volts.
        #[arg(long, conflicts_with = "phi_el", allow_negative_numbers = true)]
        voltage_dim: Option<f64>,
        /// Donnan potential in thermal units.
        #[arg(long, allow_negative_numbers = true)]
        phi_el: Option<f64>,
        #[arg(long, default_value_t = 0.01)]
        delta_err: f64,
        #[arg(long, default_value_t = 0.3)]
        porosity: f64,
        /// |Ω_electrode| / |Ω|, to evaluate α.
        #[arg(long)]
        electrode_fraction: Option<f64>,
        #[command(flatten)]
        physical: PhysicalArgs,
    },
}

enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) => Failure::Usage(e.to_string()),
            other => Failure::Numerical(other.to_string()),
        }
    }
}

type CmdResult<T> = std::result::Result<T, Failure>;

fn solver_tol(flag: Option<f64>) -> CmdResult<f64> {
    let tol = match flag {
        Some(t) => t,
        None => match std::env::var(TOL_ENV) {
            Ok(s) => s
                .trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("{TOL_ENV} is not a number: '{s}'")))?,
            Err(_) => DEFAULT_TOL,
        },
    };
    if tol > 0.0 && tol < 1.0 {
        Ok(tol)
    } else {
        Err(Failure::Usage(format!("tolerance must lie in (0, 1), got {tol}")))
    }
}

fn opt(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

fn flag(ok: bool) -> Option<f64> {
    Some(if ok { 1.0 } else { 0.0 })
}

fn cmd_solve(a: &SolveArgs) -> CmdResult<Record> {
    let tol = solver_tol(a.tol)?;
    let params = ProblemParams::with_stern(a.length, a.voltage, a.delta)?;
    let sol = solve(
        &params,
        SolveOptions {
            tol,
            samples: a.samples,
        },
    )?;
    Ok(profile_record(&sol, tol))
}

fn cmd_approx_error(a: &ApproxErrorArgs) -> CmdResult<Record> {
    let tol = solver_tol(a.tol)?;
    let variant = match a.variant {
        VariantArg::Crude => ApproxVariant::Crude,
        VariantArg::Refined => ApproxVariant::Refined,
    };
    match a.sweep {
        ApproxSweep::L => {
            let spec = a.range.spec(SweepParameter::L, (10.0, 40.0, 31, Scale::Linear))?;
            let v = a.voltage;
            let grid = a.grid;
            let rows: Vec<Vec<Option<f64>>> = spec
                .values()
                .par_iter()
                .map(|&l| {
                    let out = ProblemParams::new(l, v)
                        .and_then(|p| {
                            solve(
                                &p,
                                SolveOptions {
                                    tol,
                                    ..SolveOptions::default()
                                },
                            )
                        })
                        .and_then(|s| explicit_solution_error(&s, grid).map(|e| (e, s.residual)));
                    match out {
                        Ok((e, res)) => vec![
                            Some(l),
                            opt(e.sup),
                            opt(e.predicted),
                            Some(e.argmax),
                            Some(res),
                            flag(true),
                        ],
                        Err(_) => vec![
                            Some(l),
                            None,
                            Some(ccpb::analysis::predicted_error(v, l)),
                            None,
                            None,
                            flag(false),
                        ],
                    }
                })
                .collect();
            let mut rec = Record::new(
                "approx-error",
                &["L", "sup_error", "predicted_error", "argmax_phi", "residual", "valid"],
            );
            rec.meta_f64("V", v)
                .meta_f64("tol", tol)
                .meta("grid", grid as u64)
                .meta("sweep", spec.to_metadata());
            rows.into_iter().for_each(|r| rec.push_row(r));
            Ok(rec)
        }
        ApproxSweep::Eps => {
            let spec = a.range.spec(SweepParameter::Eps, (1e-4, 1e-1, 20, Scale::Log))?;
            let phi_max = a.phi_max;
            let grid = a.grid;
            let rows: Vec<Vec<Option<f64>>> = spec
                .values()
                .par_iter()
                .map(|&e| {
                    let reference = match variant {
                        ApproxVariant::Crude => 2.0 * e.sqrt(),
                        ApproxVariant::Refined => 2.0 * e,
                    };
                    match Eps::new(e)
                        .and_then(|eps| sup_approx_error(eps, variant, phi_max, grid, 1e-3 * tol.max(1e-9)))
                    {
                        Ok(s) => vec![Some(e), opt(s.sup), Some(reference), Some(s.argmax), flag(true)],
                        Err(_) => vec![Some(e), None, Some(reference), None, flag(false)],
                    }
                })
                .collect();
            let mut rec = Record::new(
                "approx-error",
                &["eps", "sup_error", "reference_curve", "argmax_phi", "valid"],
            );
            rec.meta("variant", format!("{variant:?}").to_lowercase())
                .meta_f64("phi_max", phi_max)
                .meta_f64("tol", tol)
                .meta("grid", grid as u64)
                .meta("sweep", spec.to_metadata());
            rows.into_iter().for_each(|r| rec.push_row(r));
            Ok(rec)
        }
    }
}

/// Smallest L in `[lo, hi]` at which `pred` turns true, by bisection in ln L;
/// `pred` is assumed monotone. None when it does not change on the range.
fn log_bisect(lo: f64, hi: f64, mut pred: impl FnMut(f64) -> ccpb::Result<bool>) -> ccpb::Result<Option<f64>> {
    if pred(lo)? {
        return Ok(Some(lo));
    }
    if !pred(hi)? {
        return Ok(None);
    }
    let (mut a, mut b) = (lo.ln(), hi.ln());
    for _ in 0..40 {
        let m = 0.5 * (a + b);
        if pred(m.exp())? {
            b = m;
        } else {
            a = m;
        }
    }
    Ok(Some(b.exp()))
}

fn cmd_regimes(a: &RegimesArgs) -> CmdResult<Record> {
    if !(a.tol > 0.0 && a.tol < 1.0) {
        return Err(Failure::Usage(format!(
            "regime tolerance must lie in (0, 1), got {}",
            a.tol
        )));
    }
    let spec = a.range.spec(SweepParameter::V, (0.5, 12.0, 47, Scale::Linear))?;
    let tol = a.tol;
    match a.criteria {
        Criteria::Analytic => {
            let mut rec = Record::new("regimes", &["V", "L_AB", "L_BC", "valid"]);
            rec.meta("criteria", "analytic")
                .meta_f64("tol", tol)
                .meta("sweep", spec.to_metadata());
            for v in spec.values() {
                let b = regime_boundary(v, tol)?;
                rec.push_row(vec![Some(v), opt(b.l_ab), opt(b.l_bc), flag(true)]);
            }
            Ok(rec)
        }
        Criteria::Generalized => {
            let stol = solver_tol(a.solver_tol)?;
            let measure = match a.measure {
                MeasureArg::Window => DeviationMeasure::BoundaryWindow {
                    width: a.window,
                    points: 201,
                },
                MeasureArg::Center => DeviationMeasure::CenterPoint,
            };
            if !(a.l_min > 0.0 && a.l_min < a.l_max) {
                return Err(Failure::Usage("need 0 < L-min < L-max".into()));
            }
            let (delta, l_min, l_max) = (a.delta, a.l_min, a.l_max);
            let rows: Vec<Vec<Option<f64>>> = spec
                .values()
                .par_iter()
                .map(|&v| {
                    let mut worst = 0.0f64;
                    let mut label = |l: f64| -> ccpb::Result<Regime> {
                        let p = ProblemParams::with_stern(l, v, delta)?;
                        let s = solve(
                            &p,
                            SolveOptions {
                                tol: stol,
                                ..SolveOptions::default()
                            },
                        )?;
                        worst = worst.max(s.residual);
                        let inf = InfiniteProfile::new(v, delta)?;
                        Ok(generalized_criteria(&s, &inf, tol, measure)?.label)
                    };
                    let ab = log_bisect(l_min, l_max, |l| Ok(label(l)? != Regime::Confined));
                    let bc = log_bisect(l_min, l_max, |l| Ok(label(l)? == Regime::EffectivelyInfinite));
                    match (ab, bc) {
                        (Ok(ab), Ok(bc)) => vec![Some(v), ab, bc, Some(worst), flag(true)],
                        _ => vec![Some(v), None, None, None, flag(false)],
                    }
                })
                .collect();
            let mut rec = Record::new("regimes", &["V", "L_AB", "L_BC", "residual", "valid"]);
            rec.meta("criteria", "generalized")
                .meta_f64("tol", tol)
                .meta_f64("delta", delta)
                .meta("measure", serde_json::to_value(measure).expect("serializable"))
                .meta_f64("L_min", l_min)
                .meta_f64("L_max", l_max)
                .meta_f64("solver_tol", stol)
                .meta("sweep", spec.to_metadata());
            rows.into_iter().for_each(|r| rec.push_row(r));
            Ok(rec)
        }
    }
}

fn cmd_screening(a: &ScreeningArgs) -> CmdResult<Record> {
    let tol = solver_tol(a.tol)?;
    let spec = a.range.spec(SweepParameter::L, (20.0, 300.0, 29, Scale::Linear))?;
    let v = a.voltage;
    let rows: Vec<Vec<Option<f64>>> = spec
        .values()
        .par_iter()
        .map(|&l| {
            let out = ProblemParams::new(l, v).and_then(|p| {
                let s = solve(
                    &p,
                    SolveOptions {
                        tol,
                        ..SolveOptions::default()
                    },
                )?;
                let a = solve_asymptotic(&p)?;
                Ok((screening_length(&s)?, a, s.residual))
            });
            match out {
                Ok((r, a, res)) => vec![
                    Some(l),
                    Some(r.lambda_s),
                    Some(r.ratio_to_infinite),
                    Some(1.0 / a.alpha_tilde.sqrt()),
                    Some(a.eps_tilde),
                    Some(res),
                    flag(true),
                ],
                Err(_) => vec![Some(l), None, None, None, None, None, flag(false)],
            }
        })
        .collect();
    let mut rec = Record::new(
        "screening",
        &[
            "L",
            "lambda_s",
            "ratio",
            "one_over_sqrt_alpha_tilde",
            "eps_tilde",
            "residual",
            "valid",
        ],
    );
    rec.meta_f64("V", v)
        .meta_f64("tol", tol)
        .meta("sweep", spec.to_metadata());
    rows.into_iter().for_each(|r| rec.push_row(r));
    Ok(rec)
}

fn physical_conditions(p: &PhysicalArgs, voltage: f64) -> Option<PhysicalConditions> {
    p.concentration.map(|c| PhysicalConditions {
        concentration: c,
        temperature: p.temperature,
        relative_permittivity: p.permittivity,
        voltage,
    })
}

fn cmd_estimate(cmd: &EstimateCommand) -> CmdResult<Record> {
    match cmd {
        EstimateCommand::Channel {
            r,
            max_error,
            volume_ratio,
            physical,
        } => {
            let ratio = channel_bath_ratio(*r, *max_error)?;
            let mut columns = vec!["bath_to_channel_ratio"];
            let mut row = vec![Some(ratio)];
            let mut rec_meta = vec![("r", *r), ("max_error", *max_error)];
            if let Some(d) = volume_ratio {
                let a = channel_alpha(&ChannelGeometry {
                    volume_ratio_delta: *d,
                    enrichment_r: *r,
                })?;
                columns.extend(["alpha_exact", "alpha_linearized"]);
                row.extend([Some(a.exact), Some(a.linearized)]);
                rec_meta.push(("volume_ratio", *d));
            }
            if let Some(cond) = physical_conditions(physical, 0.0) {
                columns.push("debye_length_m");
                row.push(Some(debye_length(&cond)?));
                rec_meta.extend([
                    ("concentration", cond.concentration),
                    ("temperature", cond.temperature),
                    ("permittivity", cond.relative_permittivity),
                ]);
            }
            let mut rec = Record::new("estimate channel", &columns);
            for (k, v) in rec_meta {
                rec.meta_f64(k, v);
            }
            rec.push_row(row);
            Ok(rec)
        }
        EstimateCommand::Electrode {
            voltage_dim,
            phi_el,
            delta_err,
            porosity,
            electrode_fraction,
            physical,
        } => {
            let (phi, dim) = match (voltage_dim, phi_el) {
                (Some(v), _) => (nondim_voltage(*v, physical.temperature)?, Some(*v)),
                (None, Some(p)) => (*p, None),
                (None, None) => return Err(Failure::Usage("give --voltage-dim or --phi-el".into())),
            };
            let b = electrode_bulk_ratio(phi, *delta_err, *porosity)?;
            let mut columns = vec!["phi_el", "cosh_form", "paper_numeric_form"];
            let mut row = vec![Some(phi), Some(b.cosh_form), Some(b.paper_numeric_form)];
            let mut rec = Record::new("estimate electrode", &[]);
            rec.meta_f64("delta_err", *delta_err)
                .meta_f64("porosity", *porosity)
                .meta_f64("temperature", physical.temperature);
            if let Some(v) = dim {
                rec.meta_f64("voltage_dim", v);
            }
            if let Some(f) = electrode_fraction {
                let a = electrode_alpha(&ElectrodeGeometry {
                    volume_fraction_electrode: *f,
                    donnan_potential: phi,
                    porosity: *porosity,
                })?;
                columns.push("alpha");
                row.push(Some(a));
                rec.meta_f64("electrode_fraction", *f);
            }
            if let Some(cond) = physical_conditions(physical, dim.unwrap_or(0.0)) {
                columns.push("debye_length_m");
                row.push(Some(debye_length(&cond)?));
                rec.meta_f64("concentration", cond.concentration)
                    .meta_f64("permittivity", cond.relative_permittivity);
            }
            rec.meta(
                "note",
                "cosh_form is the 2((1-d)cosh(phi)-1)/d bound; paper_numeric_form is porosity*(2/d)((1-d)-exp(-phi)); they disagree",
            );
            rec.columns = columns.iter().map(|c| c.to_string()).collect();
            rec.push_row(row);
            Ok(rec)
        }
    }
}

fn run(cli: &Cli) -> CmdResult<String> {
    let default_format = match cli.command {
        Command::Estimate(_) => Format::Json,
        _ => Format::Csv,
    };
    let format = match cli.format {
        Some(FormatArg::Csv) => Format::Csv,
        Some(FormatArg::Json) => Format::Json,
        None => default_format,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
        .map_err(|e| Failure::Usage(format!("cannot start {} worker threads: {e}", cli.jobs)))?;
    let record = pool.install(|| match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::ApproxError(a) => cmd_approx_error(a),
        Command::Regimes(a) => cmd_regimes(a),
        Command::Screening(a) => cmd_screening(a),
        Command::Estimate(e) => cmd_estimate(e),
    })?;
    Ok(record.render(format))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let text = match run(&cli) {
        Ok(t) => t,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, text.as_bytes()),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            return ExitCode::SUCCESS;
        }
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}
