//! Sweep harness and derived analyses: relative-error scatter against
//! entropy production, uncertainty products versus accumulated phase, and
//! the gamma dependence of the quantum-advantage crossover time.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::correlations::{thermo_stats, thermo_stats_from_strokes, ThermoStats};
use crate::generators::{
    adiabat_phase, adiabat_propagator, isochore_generator, stroke_propagator,
    IsochoreSide, StrokePropagator,
};
use crate::limit_cycle::phase;
use crate::model::{BathKind, CycleParams};
use crate::quasistatic::{quasistatic_stats, QuasistaticStats};

/// Random-draw specification for parameter sweeps.
///
/// Frequencies and temperatures are drawn uniformly from half-open
/// intervals (low, high] and rejected until omega_c < omega_h and
/// T_c < T_h, so every draw satisfies the parameter invariants by
/// construction. The remaining fields are held fixed across draws.
#[derive(Debug, Clone, Copy)]
pub struct SweepSpec {
    pub n_draws: usize,
    pub seed: u64,
    pub omega_low: f64,
    pub omega_high: f64,
    pub temp_low: f64,
    pub temp_high: f64,
    pub gamma: f64,
    pub mass: f64,
    pub hbar: f64,
    pub tau_ch: f64,
    pub tau_h: f64,
    pub tau_hc: f64,
    pub tau_c: f64,
}

impl SweepSpec {
    /// Frequencies and temperatures bounded by 1, heat conductance 1/4,
    /// equal stroke times adding up to a period of 5.
    pub fn unit_bounded(n_draws: usize, seed: u64) -> Self {
        SweepSpec {
            n_draws,
            seed,
            omega_low: 0.0,
            omega_high: 1.0,
            temp_low: 0.0,
            temp_high: 1.0,
            gamma: 0.25,
            mass: 1.0,
            hbar: 1.0,
            tau_ch: 1.25,
            tau_h: 1.25,
            tau_hc: 1.25,
            tau_c: 1.25,
        }
    }

    fn draw_pair<R: Rng>(low: f64, high: f64, rng: &mut R) -> (f64, f64) {
        loop {
            // uniform on (low, high]
            let a = high - rng.random::<f64>() * (high - low);
            let b = high - rng.random::<f64>() * (high - low);
            if a < b {
                return (a, b);
            }
        }
    }

    /// The deterministic draw sequence of this spec.
    pub fn draws(&self) -> Vec<CycleParams> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.n_draws)
            .map(|_| {
                let (omega_c, omega_h) =
                    Self::draw_pair(self.omega_low, self.omega_high, &mut rng);
                let (temp_c, temp_h) =
                    Self::draw_pair(self.temp_low, self.temp_high, &mut rng);
                CycleParams {
                    mass: self.mass,
                    gamma: self.gamma,
                    omega_h,
                    omega_c,
                    temp_h,
                    temp_c,
                    hbar: self.hbar,
                    tau_ch: self.tau_ch,
                    tau_h: self.tau_h,
                    tau_hc: self.tau_hc,
                    tau_c: self.tau_c,
                }
            })
            .collect()
    }
}

/// One finite-time sweep draw; a `None` bath entry flags divergence.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub index: usize,
    pub params: CycleParams,
    pub quantum: Option<ThermoStats>,
    pub classical: Option<ThermoStats>,
    pub ratio_eps_w: Option<f64>,
    pub ratio_eps_qh: Option<f64>,
    pub ratio_eps_qc: Option<f64>,
    pub ratio_eps_sigma: Option<f64>,
}

/// One quasistatic sweep draw; the quasistatic limit never diverges.
#[derive(Debug, Clone)]
pub struct QuasiRow {
    pub index: usize,
    pub params: CycleParams,
    pub quantum: QuasistaticStats,
    pub classical: QuasistaticStats,
}

fn ratio(q: &Option<ThermoStats>, c: &Option<ThermoStats>, f: fn(&ThermoStats) -> Option<f64>) -> Option<f64> {
    match (q, c) {
        (Some(q), Some(c)) => match (f(q), f(c)) {
            (Some(a), Some(b)) if b != 0.0 => Some(a / b),
            _ => None,
        },
        _ => None,
    }
}

/// Finite-time relative errors against entropy production over the draw
/// sequence. Divergent draws are kept as flagged rows, never dropped.
pub fn tur_scatter(spec: &SweepSpec) -> Vec<SweepRow> {
    let draws = spec.draws();
    draws
        .into_par_iter()
        .enumerate()
        .map(|(index, params)| {
            let quantum = thermo_stats(&params, BathKind::Quantum).ok();
            let classical = thermo_stats(&params, BathKind::Classical).ok();
            SweepRow {
                index,
                params,
                ratio_eps_w: ratio(&quantum, &classical, |s| s.eps_w),
                ratio_eps_qh: ratio(&quantum, &classical, |s| s.eps_qh),
                ratio_eps_qc: ratio(&quantum, &classical, |s| s.eps_qc),
                ratio_eps_sigma: ratio(&quantum, &classical, |s| s.eps_sigma),
                quantum,
                classical,
            }
        })
        .collect()
}

/// Quasistatic sub-mode of the scatter: closed forms on the same draws.
pub fn tur_scatter_quasistatic(spec: &SweepSpec) -> Vec<QuasiRow> {
    spec.draws()
        .into_par_iter()
        .enumerate()
        .map(|(index, params)| QuasiRow {
            index,
            params,
            quantum: quasistatic_stats(&params, BathKind::Quantum),
            classical: quasistatic_stats(&params, BathKind::Classical),
        })
        .collect()
}

/// One point of the uncertainty-product scan.
#[derive(Debug, Clone)]
pub struct QScanRow {
    /// Accumulated cycle phase over pi.
    pub phase_over_pi: f64,
    /// Common stroke duration realizing that phase.
    pub tau_each: f64,
    pub quantum: Option<ThermoStats>,
    pub classical: Option<ThermoStats>,
}

/// Scans the uncertainty products against the normalized phase by varying
/// the common stroke duration (all four strokes equal). The phase is
/// linear in the duration, so the requested range maps directly onto a
/// duration range.
pub fn q_factor_scan(
    base: &CycleParams,
    phase_range: (f64, f64),
    n_points: usize,
) -> Vec<QScanRow> {
    // phase accumulated per unit of common stroke duration
    let k = base.omega_c
        + base.omega_h
        + adiabat_phase(base.omega_c, base.omega_h, 1.0)
        + adiabat_phase(base.omega_h, base.omega_c, 1.0);
    let (lo, hi) = phase_range;
    let targets: Vec<f64> = (0..n_points)
        .map(|i| {
            if n_points == 1 {
                lo
            } else {
                lo + (hi - lo) * i as f64 / (n_points - 1) as f64
            }
        })
        .collect();
    targets
        .into_par_iter()
        .map(|target| {
            let tau = target * std::f64::consts::PI / k;
            let params = CycleParams {
                tau_ch: tau,
                tau_h: tau,
                tau_hc: tau,
                tau_c: tau,
                ..*base
            };
            QScanRow {
                phase_over_pi: phase(&params) / std::f64::consts::PI,
                tau_each: tau,
                quantum: thermo_stats(&params, BathKind::Quantum).ok(),
                classical: thermo_stats(&params, BathKind::Classical).ok(),
            }
        })
        .collect()
}

/// Search controls for [`crossover_tau_with`].
#[derive(Debug, Clone, Copy)]
pub struct CrossoverOptions {
    /// Linear scan resolution in total isochore time.
    pub scan_step: f64,
    /// Upper end of the scanned window; defaults to
    /// 10^3/gamma + 10^3/omega_c.
    pub window_cap: Option<f64>,
    /// Relative tolerance of the boundary refinement.
    pub rel_tol: f64,
}

impl Default for CrossoverOptions {
    fn default() -> Self {
        CrossoverOptions {
            scan_step: 0.05,
            window_cap: None,
            rel_tol: 1e-3,
        }
    }
}

/// Quantum-to-classical work relative error ratio at one configuration;
/// `None` when either side diverges or has undefined relative error.
fn eps_work_ratio(
    params: &CycleParams,
    adiabats: &(StrokePropagator, StrokePropagator),
) -> Option<f64> {
    let mut eps = [0.0; 2];
    for (slot, bath) in [BathKind::Quantum, BathKind::Classical].into_iter().enumerate() {
        let hot = stroke_propagator(
            &isochore_generator(params, IsochoreSide::Hot, bath),
            params.tau_h,
        )
        .ok()?;
        let cold = stroke_propagator(
            &isochore_generator(params, IsochoreSide::Cold, bath),
            params.tau_c,
        )
        .ok()?;
        let strokes = [adiabats.0.clone(), hot, adiabats.1.clone(), cold];
        let stats = thermo_stats_from_strokes(params, bath, &strokes).ok()?;
        eps[slot] = stats.eps_w?;
    }
    if eps[1] == 0.0 {
        None
    } else {
        Some(eps[0] / eps[1])
    }
}

/// Smallest total isochore time above which the quantum work relative
/// error stays at or above the classical one across the scanned window
/// (the boundary of the last quantum-advantage region).
///
/// Adiabat durations come from `base` and stay fixed; the scan varies
/// tau_h = tau_c = s/2. Divergent or undefined points do not count as
/// advantage regions. Returns `None` if the ratio never drops below 1 in
/// the window.
pub fn crossover_tau_with(
    base: &CycleParams,
    gamma: f64,
    opts: &CrossoverOptions,
) -> Option<f64> {
    let params0 = CycleParams { gamma, ..*base };
    let window = opts
        .window_cap
        .unwrap_or(1e3 / gamma + 1e3 / params0.omega_c);
    // the adiabats never change across the scan
    let com = adiabat_propagator(params0.omega_c, params0.omega_h, params0.tau_ch).ok()?;
    let exp = adiabat_propagator(params0.omega_h, params0.omega_c, params0.tau_hc).ok()?;
    let adiabats = (com, exp);

    let at = |s: f64| CycleParams {
        tau_h: 0.5 * s,
        tau_c: 0.5 * s,
        ..params0
    };
    let below = |s: f64| {
        eps_work_ratio(&at(s), &adiabats)
            .map(|r| r < 1.0)
            .unwrap_or(false)
    };

    let n_steps = (window / opts.scan_step).ceil() as usize;
    let grid: Vec<f64> = (1..=n_steps)
        .map(|k| (k as f64 * opts.scan_step).min(window))
        .collect();
    let flags: Vec<bool> = grid.par_iter().map(|&s| below(s)).collect();
    let last = flags.iter().rposition(|&b| b)?;

    // refine the boundary between the last advantage point and the next
    // scan point
    let mut lo = grid[last];
    let mut hi = (grid[last] + opts.scan_step).min(window);
    if last + 1 == grid.len() {
        // advantage persists to the window edge
        return Some(window);
    }
    while hi - lo > opts.rel_tol * lo.max(opts.scan_step) {
        let mid = 0.5 * (lo + hi);
        if below(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// [`crossover_tau_with`] under default search controls.
pub fn crossover_tau(base: &CycleParams, gamma: f64) -> Option<f64> {
    crossover_tau_with(base, gamma, &CrossoverOptions::default())
}
