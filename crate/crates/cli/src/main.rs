//! Command-line front end: parses cycle parameters from flags and an
//! optional flat `key = value` config file (flags win), dispatches to the
//! library, and emits CSV with `#`-prefixed metadata headers.
//!
//! Exit codes: 0 success, 2 parameter validation, 3 divergent cycle,
//! 4 Monte Carlo instability, 64 usage.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use otto_core::analysis::{
    crossover_tau_with, q_factor_scan, tur_scatter, tur_scatter_quasistatic,
    CrossoverOptions, SweepSpec,
};
use otto_core::model::{BathKind, CycleParams};
use otto_core::montecarlo::{self, McConfig};
use otto_core::quasistatic::quasistatic_stats;
use otto_core::{thermo_stats, trajectory, Error, ThermoStats};

#[derive(Parser)]
#[command(
    name = "otto",
    version,
    about = "Exact and Monte Carlo statistics of finite-time quantum and classical Otto cycles",
    after_help = "Set RAYON_NUM_THREADS to control the worker thread count."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form quasistatic statistics.
    Quasistatic(CycleArgs),
    /// Exact finite-time means, fluctuations, and uncertainty products.
    Cycle(CycleArgs),
    /// Limit-cycle state, kinetic, and potential energy over one period.
    Trajectory {
        #[command(flatten)]
        cycle: CycleArgs,
        /// Grid points per stroke.
        #[arg(long, default_value_t = 32)]
        grid: usize,
    },
    /// Random-draw scatter of relative errors against entropy production.
    Sweep {
        #[command(flatten)]
        cycle: CycleArgs,
        /// Number of random draws.
        #[arg(long, default_value_t = 500)]
        draws: usize,
        /// Draw seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Upper bound of the frequency and temperature draws.
        #[arg(long, default_value_t = 1.0)]
        bound: f64,
        /// Evaluate the quasistatic closed forms instead of the
        /// finite-time cycle.
        #[arg(long)]
        quasistatic: bool,
    },
    /// Uncertainty products against the normalized accumulated phase.
    Qscan {
        #[command(flatten)]
        cycle: CycleArgs,
        /// Start of the phase range (units of pi).
        #[arg(long, default_value_t = 0.5)]
        phase_min: f64,
        /// End of the phase range (units of pi).
        #[arg(long, default_value_t = 3.5)]
        phase_max: f64,
        /// Number of scan points.
        #[arg(long, default_value_t = 121)]
        points: usize,
    },
    /// Total isochore time above which the classical cycle is the more
    /// precise one, per heat conductance.
    Crossover {
        #[command(flatten)]
        cycle: CycleArgs,
        /// Heat conductances to scan (repeatable).
        #[arg(long = "scan-gamma", required = true)]
        scan_gamma: Vec<f64>,
        /// Linear scan step in total isochore time.
        #[arg(long, default_value_t = 0.05)]
        scan_step: f64,
        /// Override of the scan window (default 1e3/gamma + 1e3/omega_c).
        #[arg(long)]
        window: Option<f64>,
        /// Relative tolerance of the boundary refinement.
        #[arg(long, default_value_t = 1e-3)]
        rel_tol: f64,
    },
    /// Langevin Monte Carlo estimate of the same statistics.
    Mc {
        #[command(flatten)]
        cycle: CycleArgs,
        /// Trajectory count.
        #[arg(long, default_value_t = 100_000)]
        n_traj: usize,
        /// Integration step.
        #[arg(long, default_value_t = 0.005)]
        dt: f64,
        /// Burn-in cycles; defaults to the thermalization rule.
        #[arg(long)]
        burn_in: Option<usize>,
        /// Measured cycles per trajectory.
        #[arg(long, default_value_t = 8)]
        measure: u32,
        /// Master seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Mean-energy grid points per stroke (0 disables).
        #[arg(long, default_value_t = 0)]
        energy_grid: usize,
        /// Write the mean-energy trajectory to this file.
        #[arg(long)]
        energy_out: Option<PathBuf>,
    },
}

/// Physical parameters, an optional config file, and the output sink.
/// Only the mass and hbar carry defaults (both 1); everything else must
/// come from a flag or the config file.
#[derive(Args, Clone)]
struct CycleArgs {
    /// Bath kind: quantum, classical, or both.
    #[arg(long, default_value = "both")]
    bath: String,
    #[arg(long = "omega-h")]
    omega_h: Option<f64>,
    #[arg(long = "omega-c")]
    omega_c: Option<f64>,
    /// Hot bath temperature.
    #[arg(long = "Th", alias = "temp-h")]
    temp_h: Option<f64>,
    /// Cold bath temperature.
    #[arg(long = "Tc", alias = "temp-c")]
    temp_c: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Working-fluid mass.
    #[arg(long = "m", alias = "mass")]
    mass: Option<f64>,
    #[arg(long)]
    hbar: Option<f64>,
    #[arg(long = "tau-ch")]
    tau_ch: Option<f64>,
    #[arg(long = "tau-h")]
    tau_h: Option<f64>,
    #[arg(long = "tau-hc")]
    tau_hc: Option<f64>,
    #[arg(long = "tau-c")]
    tau_c: Option<f64>,
    /// Flat `key = value` parameter file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file (standard output if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: String) -> Self {
        Failure { code: 2, message }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Divergent { .. } => 3,
            Error::McUnstable { .. } => 4,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn parse_config(path: &PathBuf) -> Result<Vec<(String, f64)>, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut entries = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Failure::usage(format!(
                "config line {} is not `key = value`: {raw}",
                lineno + 1
            ))
        })?;
        let value: f64 = value.trim().parse().map_err(|_| {
            Failure::usage(format!("config line {}: bad number {value}", lineno + 1))
        })?;
        entries.push((key.trim().to_string(), value));
    }
    Ok(entries)
}

impl CycleArgs {
    fn params(&self) -> Result<CycleParams, Failure> {
        let mut fields: [(&str, &[&str], Option<f64>); 11] = [
            ("m", &["m", "mass"], self.mass),
            ("gamma", &["gamma"], self.gamma),
            ("omega_h", &["omega_h", "omega-h"], self.omega_h),
            ("omega_c", &["omega_c", "omega-c"], self.omega_c),
            ("Th", &["Th", "temp_h", "temp-h"], self.temp_h),
            ("Tc", &["Tc", "temp_c", "temp-c"], self.temp_c),
            ("hbar", &["hbar"], self.hbar),
            ("tau_ch", &["tau_ch", "tau-ch"], self.tau_ch),
            ("tau_h", &["tau_h", "tau-h"], self.tau_h),
            ("tau_hc", &["tau_hc", "tau-hc"], self.tau_hc),
            ("tau_c", &["tau_c", "tau-c"], self.tau_c),
        ];
        if let Some(path) = &self.config {
            for (key, value) in parse_config(path)? {
                let slot = fields
                    .iter_mut()
                    .find(|(_, aliases, _)| aliases.contains(&key.as_str()))
                    .ok_or_else(|| {
                        Failure::usage(format!("unknown config key: {key}"))
                    })?;
                // flags take precedence over the file
                if slot.2.is_none() {
                    slot.2 = Some(value);
                }
            }
        }
        let get = |name: &str| -> Result<f64, Failure> {
            fields
                .iter()
                .find(|(n, _, _)| *n == name)
                .and_then(|(_, _, v)| *v)
                .ok_or_else(|| Failure::usage(format!("missing parameter: {name}")))
        };
        let params = CycleParams {
            mass: fields[0].2.unwrap_or(1.0),
            gamma: get("gamma")?,
            omega_h: get("omega_h")?,
            omega_c: get("omega_c")?,
            temp_h: get("Th")?,
            temp_c: get("Tc")?,
            hbar: fields[6].2.unwrap_or(1.0),
            tau_ch: get("tau_ch")?,
            tau_h: get("tau_h")?,
            tau_hc: get("tau_hc")?,
            tau_c: get("tau_c")?,
        };
        Ok(params.validate()?)
    }

    /// Like `params`, but stroke durations default to zero (the
    /// quasistatic closed forms ignore them).
    fn params_durations_optional(&self) -> Result<CycleParams, Failure> {
        let mut args = self.clone();
        args.tau_ch = Some(args.tau_ch.unwrap_or(0.0));
        args.tau_h = Some(args.tau_h.unwrap_or(1.0));
        args.tau_hc = Some(args.tau_hc.unwrap_or(0.0));
        args.tau_c = Some(args.tau_c.unwrap_or(1.0));
        args.params()
    }

    fn baths(&self) -> Result<Vec<BathKind>, Failure> {
        match self.bath.as_str() {
            "quantum" => Ok(vec![BathKind::Quantum]),
            "classical" => Ok(vec![BathKind::Classical]),
            "both" => Ok(vec![BathKind::Quantum, BathKind::Classical]),
            other => Err(Failure::usage(format!(
                "bath must be quantum, classical, or both, got {other}"
            ))),
        }
    }

    fn sink(&self, text: &str) -> Result<(), Failure> {
        match &self.out {
            Some(path) => fs::write(path, text).map_err(|e| {
                Failure::usage(format!("cannot write {}: {e}", path.display()))
            }),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

/// 17 significant digits: round-trip exact for f64.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_else(|| "nan".into())
}

fn header(out: &mut String, params: &CycleParams, extra: &[(&str, String)]) {
    let _ = writeln!(out, "# otto {}", env!("CARGO_PKG_VERSION"));
    for (k, v) in [
        ("m", params.mass),
        ("gamma", params.gamma),
        ("omega_h", params.omega_h),
        ("omega_c", params.omega_c),
        ("Th", params.temp_h),
        ("Tc", params.temp_c),
        ("hbar", params.hbar),
        ("tau_ch", params.tau_ch),
        ("tau_h", params.tau_h),
        ("tau_hc", params.tau_hc),
        ("tau_c", params.tau_c),
    ] {
        let _ = writeln!(out, "# {k} = {v}");
    }
    for (k, v) in extra {
        let _ = writeln!(out, "# {k} = {v}");
    }
}

const PARAM_COLS: &str = "m,gamma,omega_h,omega_c,Th,Tc,hbar,tau_ch,tau_h,tau_hc,tau_c";

fn param_cells(p: &CycleParams) -> String {
    [
        p.mass, p.gamma, p.omega_h, p.omega_c, p.temp_h, p.temp_c, p.hbar, p.tau_ch,
        p.tau_h, p.tau_hc, p.tau_c,
    ]
    .map(num)
    .join(",")
}

const STAT_COLS: &str = "mean_w,var_w,eps_w,mean_qh,var_qh,eps_qh,mean_qc,var_qc,eps_qc,\
mean_sigma,var_sigma,eps_sigma,cov_qh_qc,q_w,q_qh,q_qc,q_sigma,phase_over_pi,machine,\
efficiency,power,spectral_radius";

fn stat_cells(s: &ThermoStats) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        num(s.mean_w),
        num(s.var_w),
        opt(s.eps_w),
        num(s.mean_qh),
        num(s.var_qh),
        opt(s.eps_qh),
        num(s.mean_qc),
        num(s.var_qc),
        opt(s.eps_qc),
        num(s.mean_sigma),
        num(s.var_sigma),
        opt(s.eps_sigma),
        num(s.cov_qh_qc),
        opt(s.q_w),
        opt(s.q_qh),
        opt(s.q_qc),
        opt(s.q_sigma),
        num(s.phase / std::f64::consts::PI),
        s.machine.label(),
        opt(s.efficiency),
        num(s.power),
        num(s.spectral_radius),
    )
}

fn run_cycle(args: &CycleArgs) -> Result<(), Failure> {
    let params = args.params()?;
    let mut out = String::new();
    header(&mut out, &params, &[]);
    let _ = writeln!(out, "bath,{PARAM_COLS},{STAT_COLS}");
    for bath in args.baths()? {
        let stats = thermo_stats(&params, bath)?;
        let _ = writeln!(
            out,
            "{},{},{}",
            bath.label(),
            param_cells(&params),
            stat_cells(&stats)
        );
    }
    args.sink(&out)
}

fn run_quasistatic(args: &CycleArgs) -> Result<(), Failure> {
    let params = args.params_durations_optional()?;
    let mut out = String::new();
    header(&mut out, &params, &[]);
    let _ = writeln!(
        out,
        "bath,{PARAM_COLS},mean_w,var_w,mean_qh,var_qh,mean_qc,var_qc,mean_sigma,var_sigma,\
eps,u_factor,eta_otto,delta_otto,eta_carnot"
    );
    for bath in args.baths()? {
        let s = quasistatic_stats(&params, bath);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            bath.label(),
            param_cells(&params),
            num(s.mean_w),
            num(s.var_w),
            num(s.mean_qh),
            num(s.var_qh),
            num(s.mean_qc),
            num(s.var_qc),
            num(s.mean_sigma),
            num(s.var_sigma),
            opt(s.eps),
            num(s.u_factor),
            num(s.eta_otto),
            num(s.delta_otto),
            num(s.eta_carnot),
        );
    }
    args.sink(&out)
}

fn run_trajectory(args: &CycleArgs, grid: usize) -> Result<(), Failure> {
    let params = args.params()?;
    let mut out = String::new();
    header(&mut out, &params, &[("grid_per_stroke", grid.to_string())]);
    let _ = writeln!(out, "bath,t,h,l,d,omega,kinetic,potential");
    for bath in args.baths()? {
        let traj = trajectory(&params, bath, grid)?;
        for (i, t) in traj.times.iter().enumerate() {
            let s = &traj.states[i];
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                bath.label(),
                num(*t),
                num(s.h),
                num(s.l),
                num(s.d),
                num(s.omega),
                num(traj.kinetic[i]),
                num(traj.potential[i]),
            );
        }
    }
    args.sink(&out)
}

fn run_sweep(
    args: &CycleArgs,
    draws: usize,
    seed: u64,
    bound: f64,
    quasistatic: bool,
) -> Result<(), Failure> {
    // the sweep draws frequencies and temperatures itself; the remaining
    // fields come from flags/config with sweep-friendly defaults
    let mut base = args.clone();
    base.omega_h = Some(base.omega_h.unwrap_or(1.0));
    base.omega_c = Some(base.omega_c.unwrap_or(0.5));
    base.temp_h = Some(base.temp_h.unwrap_or(1.0));
    base.temp_c = Some(base.temp_c.unwrap_or(0.5));
    base.gamma = Some(base.gamma.unwrap_or(0.25));
    base.tau_ch = Some(base.tau_ch.unwrap_or(1.25));
    base.tau_h = Some(base.tau_h.unwrap_or(1.25));
    base.tau_hc = Some(base.tau_hc.unwrap_or(1.25));
    base.tau_c = Some(base.tau_c.unwrap_or(1.25));
    let params = base.params()?;
    let spec = SweepSpec {
        n_draws: draws,
        seed,
        omega_low: 0.0,
        omega_high: bound,
        temp_low: 0.0,
        temp_high: bound,
        gamma: params.gamma,
        mass: params.mass,
        hbar: params.hbar,
        tau_ch: params.tau_ch,
        tau_h: params.tau_h,
        tau_hc: params.tau_hc,
        tau_c: params.tau_c,
    };
    let mut out = String::new();
    header(
        &mut out,
        &params,
        &[
            ("draws", draws.to_string()),
            ("seed", seed.to_string()),
            ("bound", bound.to_string()),
            ("quasistatic", quasistatic.to_string()),
        ],
    );
    if quasistatic {
        let _ = writeln!(
            out,
            "index,omega_h,omega_c,Th,Tc,q_mean_w,q_var_w,q_mean_sigma,q_var_sigma,q_eps,\
q_u_factor,c_mean_w,c_var_w,c_mean_sigma,c_var_sigma,c_eps"
        );
        for row in tur_scatter_quasistatic(&spec) {
            let p = row.params;
            let (q, c) = (row.quantum, row.classical);
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                row.index,
                num(p.omega_h),
                num(p.omega_c),
                num(p.temp_h),
                num(p.temp_c),
                num(q.mean_w),
                num(q.var_w),
                num(q.mean_sigma),
                num(q.var_sigma),
                opt(q.eps),
                num(q.u_factor),
                num(c.mean_w),
                num(c.var_w),
                num(c.mean_sigma),
                num(c.var_sigma),
                opt(c.eps),
            );
        }
    } else {
        let bath_cols = |prefix: &str| {
            format!(
                "{p}_divergent,{p}_mean_w,{p}_var_w,{p}_eps_w,{p}_eps_qh,{p}_eps_qc,\
{p}_eps_sigma,{p}_mean_sigma,{p}_q_w,{p}_q_qh,{p}_q_qc,{p}_q_sigma,{p}_machine",
                p = prefix
            )
        };
        let _ = writeln!(
            out,
            "index,omega_h,omega_c,Th,Tc,{},{},ratio_eps_w,ratio_eps_qh,ratio_eps_qc,ratio_eps_sigma",
            bath_cols("q"),
            bath_cols("c")
        );
        let bath_cells = |s: &Option<ThermoStats>| match s {
            Some(s) => format!(
                "0,{},{},{},{},{},{},{},{},{},{},{},{}",
                num(s.mean_w),
                num(s.var_w),
                opt(s.eps_w),
                opt(s.eps_qh),
                opt(s.eps_qc),
                opt(s.eps_sigma),
                num(s.mean_sigma),
                opt(s.q_w),
                opt(s.q_qh),
                opt(s.q_qc),
                opt(s.q_sigma),
                s.machine.label(),
            ),
            None => "1,nan,nan,nan,nan,nan,nan,nan,nan,nan,nan,nan,divergent".to_string(),
        };
        for row in tur_scatter(&spec) {
            let p = row.params;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                row.index,
                num(p.omega_h),
                num(p.omega_c),
                num(p.temp_h),
                num(p.temp_c),
                bath_cells(&row.quantum),
                bath_cells(&row.classical),
                opt(row.ratio_eps_w),
                opt(row.ratio_eps_qh),
                opt(row.ratio_eps_qc),
                opt(row.ratio_eps_sigma),
            );
        }
    }
    args.sink(&out)
}

fn run_qscan(
    args: &CycleArgs,
    phase_min: f64,
    phase_max: f64,
    points: usize,
) -> Result<(), Failure> {
    // the scan sets the stroke durations itself
    let mut base = args.clone();
    base.tau_ch = Some(base.tau_ch.unwrap_or(1.0));
    base.tau_h = Some(base.tau_h.unwrap_or(1.0));
    base.tau_hc = Some(base.tau_hc.unwrap_or(1.0));
    base.tau_c = Some(base.tau_c.unwrap_or(1.0));
    let params = base.params()?;
    let mut out = String::new();
    header(
        &mut out,
        &params,
        &[
            ("phase_min", phase_min.to_string()),
            ("phase_max", phase_max.to_string()),
            ("points", points.to_string()),
        ],
    );
    let bath_cols = |p: &str| {
        format!(
            "{p}_divergent,{p}_mean_w,{p}_var_w,{p}_mean_sigma,{p}_q_w,{p}_q_qh,{p}_q_qc,{p}_q_sigma,{p}_machine"
        )
    };
    let _ = writeln!(
        out,
        "phase_over_pi,tau_each,{},{}",
        bath_cols("q"),
        bath_cols("c")
    );
    let cells = |s: &Option<ThermoStats>| match s {
        Some(s) => format!(
            "0,{},{},{},{},{},{},{},{}",
            num(s.mean_w),
            num(s.var_w),
            num(s.mean_sigma),
            opt(s.q_w),
            opt(s.q_qh),
            opt(s.q_qc),
            opt(s.q_sigma),
            s.machine.label(),
        ),
        None => "1,nan,nan,nan,nan,nan,nan,nan,divergent".to_string(),
    };
    for row in q_factor_scan(&params, (phase_min, phase_max), points) {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            num(row.phase_over_pi),
            num(row.tau_each),
            cells(&row.quantum),
            cells(&row.classical),
        );
    }
    args.sink(&out)
}

fn run_crossover(
    args: &CycleArgs,
    gammas: &[f64],
    scan_step: f64,
    window: Option<f64>,
    rel_tol: f64,
) -> Result<(), Failure> {
    let params = args.params()?;
    let opts = CrossoverOptions {
        scan_step,
        window_cap: window,
        rel_tol,
    };
    let mut out = String::new();
    header(
        &mut out,
        &params,
        &[
            ("scan_step", scan_step.to_string()),
            ("rel_tol", rel_tol.to_string()),
        ],
    );
    let _ = writeln!(out, "gamma,found,tau_star");
    for &g in gammas {
        match crossover_tau_with(&params, g, &opts) {
            Some(tau) => {
                let _ = writeln!(out, "{},1,{}", num(g), num(tau));
            }
            None => {
                let _ = writeln!(out, "{},0,nan", num(g));
            }
        }
    }
    args.sink(&out)
}

#[allow(clippy::too_many_arguments)]
fn run_mc(
    args: &CycleArgs,
    n_traj: usize,
    dt: f64,
    burn_in: Option<usize>,
    measure: u32,
    seed: u64,
    energy_grid: usize,
    energy_out: Option<&PathBuf>,
) -> Result<(), Failure> {
    let params = args.params()?;
    let burn = burn_in.unwrap_or_else(|| McConfig::default_burn_in(&params));
    let cfg = McConfig {
        n_traj,
        dt,
        burn_in_cycles: burn,
        measure_cycles: measure as usize,
        seed,
        energy_grid_per_stroke: energy_grid,
    };
    let mut out = String::new();
    header(
        &mut out,
        &params,
        &[
            ("n_traj", n_traj.to_string()),
            ("dt", dt.to_string()),
            ("burn_in", burn.to_string()),
            ("measure", measure.to_string()),
            ("seed", seed.to_string()),
        ],
    );
    let quantity_cols = |q: &str| {
        format!("{q}_mean,{q}_mean_se,{q}_var,{q}_var_se,{q}_eps,{q}_eps_se")
    };
    let _ = writeln!(
        out,
        "bath,n_traj,aborted,{},{},{},{}",
        quantity_cols("w"),
        quantity_cols("qh"),
        quantity_cols("qc"),
        quantity_cols("sigma"),
    );
    let mut energy_text = String::new();
    for bath in args.baths()? {
        let est = montecarlo::run(&params, bath, &cfg)?;
        for w in &est.warnings {
            let _ = writeln!(out, "# warning: {w}");
        }
        let q = |m: &otto_core::montecarlo::McQuantity| {
            format!(
                "{},{},{},{},{},{}",
                num(m.mean),
                num(m.mean_se),
                num(m.var),
                num(m.var_se),
                opt(m.eps),
                opt(m.eps_se)
            )
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            bath.label(),
            est.n_traj,
            est.aborted,
            q(&est.work),
            q(&est.heat_hot),
            q(&est.heat_cold),
            q(&est.entropy),
        );
        if energy_out.is_some() && !est.energy_times.is_empty() {
            if energy_text.is_empty() {
                let _ = writeln!(energy_text, "bath,t,mean_h,se_h");
            }
            for i in 0..est.energy_times.len() {
                let _ = writeln!(
                    energy_text,
                    "{},{},{},{}",
                    bath.label(),
                    num(est.energy_times[i]),
                    num(est.energy_mean[i]),
                    num(est.energy_se[i]),
                );
            }
        }
    }
    if let Some(path) = energy_out {
        fs::write(path, energy_text)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))?;
    }
    args.sink(&out)
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Quasistatic(args) => run_quasistatic(args),
        Command::Cycle(args) => run_cycle(args),
        Command::Trajectory { cycle, grid } => run_trajectory(cycle, *grid),
        Command::Sweep {
            cycle,
            draws,
            seed,
            bound,
            quasistatic,
        } => run_sweep(cycle, *draws, *seed, *bound, *quasistatic),
        Command::Qscan {
            cycle,
            phase_min,
            phase_max,
            points,
        } => run_qscan(cycle, *phase_min, *phase_max, *points),
        Command::Crossover {
            cycle,
            scan_gamma,
            scan_step,
            window,
            rel_tol,
        } => run_crossover(cycle, scan_gamma, *scan_step, *window, *rel_tol),
        Command::Mc {
            cycle,
            n_traj,
            dt,
            burn_in,
            measure,
            seed,
            energy_grid,
            energy_out,
        } => run_mc(
            cycle,
            *n_traj,
            *dt,
            *burn_in,
            *measure,
            *seed,
            *energy_grid,
            energy_out.as_ref(),
        ),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
