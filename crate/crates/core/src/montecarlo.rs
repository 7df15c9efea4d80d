//! Langevin Monte Carlo estimator of the cycle statistics.
//!
//! This is the independent cross-check of the exact moment pipeline: it
//! never touches the generator matrices. Trajectories follow the
//! underdamped Langevin equations of the working fluid,
//!
//!   quantum bath (quasiclassical form): damping gamma/4 and a thermostat
//!   on both position and momentum at the effective temperature
//!   T~ = (hbar*omega/2) coth(hbar*omega/2T);
//!
//!   classical bath: damping gamma/4 and a thermostat on the momentum
//!   only, at the bare temperature T;
//!
//! with independent white noises of correlation
//! <eta_i(t) eta_j(t')> = 2 delta_ij delta(t - t'), so each step draws
//! Gaussian increments of variance 2 dt. Isochores use a stochastic Heun
//! step; adiabats detach the bath entirely and use deterministic
//! velocity-Verlet substeps with the ramped frequency.
//!
//! Per-cycle boundary energies H(t1..t5) give W, Q_h, Q_c, Sigma samples;
//! standard errors come from a delete-one jackknife over trajectories,
//! which also absorbs the correlation between consecutive measured cycles
//! of the same trajectory.
//!
//! Quantum-bath trajectories sample the phase-space (Wigner) moments.
//! Symmetrized operator moments differ from these by the equal-time term
//! -(hbar*omega)^2/4 in <H^2>, which the strokes then carry forward; the
//! estimator adds that deterministic offset to its variances so they
//! estimate the same quantities as the exact pipeline. Means need no
//! correction, and the classical bath needs none at all.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::limit_cycle::cycle_strokes;
use crate::model::{effective_temperature, BathKind, CycleParams};
use crate::{Error, Result};

/// Canonical pair of one trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub x: f64,
    pub p: f64,
}

impl PhasePoint {
    pub fn energy(&self, omega: f64, mass: f64) -> f64 {
        0.5 * self.p * self.p / mass + 0.5 * mass * omega * omega * self.x * self.x
    }

    fn is_finite(&self) -> bool {
        self.x.is_finite() && self.p.is_finite()
    }
}

/// Monte Carlo run configuration.
#[derive(Debug, Clone, Copy)]
pub struct McConfig {
    /// Number of independent trajectories.
    pub n_traj: usize,
    /// Integration step; must stay below 0.1 * min(1/omega_h, 4/gamma),
    /// and below a tenth of that to avoid a discretization warning.
    pub dt: f64,
    /// Cycles discarded before measurement.
    pub burn_in_cycles: usize,
    /// Cycles measured per trajectory.
    pub measure_cycles: usize,
    /// Master seed; trajectory i uses stream i of the generator.
    pub seed: u64,
    /// Grid points per stroke for the mean energy trajectory; 0 disables
    /// the recording.
    pub energy_grid_per_stroke: usize,
}

impl McConfig {
    /// Burn-in long enough for limit-cycle convergence: 20 cycles, or the
    /// number of cycles whose isochore time covers ten bath relaxation
    /// times 4/gamma, whichever is larger.
    pub fn default_burn_in(params: &CycleParams) -> usize {
        let iso = params.tau_h.min(params.tau_c);
        if params.gamma * iso <= 0.0 {
            return 20;
        }
        let cycles = (40.0 / (params.gamma * iso)).ceil() as usize;
        cycles.max(20)
    }

    /// Validates the configuration against the parameter set, returning
    /// discretization warnings.
    pub fn validate(&self, params: &CycleParams) -> Result<Vec<String>> {
        if self.n_traj == 0 {
            return Err(Error::InvalidParams("n_traj must be at least 1".into()));
        }
        if self.measure_cycles == 0 {
            return Err(Error::InvalidParams(
                "measure_cycles must be at least 1".into(),
            ));
        }
        if self.dt.is_nan() || self.dt <= 0.0 {
            return Err(Error::InvalidParams("dt must be positive".into()));
        }
        let scale = if params.gamma > 0.0 {
            (1.0 / params.omega_h).min(4.0 / params.gamma)
        } else {
            1.0 / params.omega_h
        };
        let hard = 0.1 * scale;
        if self.dt > hard {
            return Err(Error::StepTooLarge {
                dt: self.dt,
                bound: hard,
            });
        }
        let mut warnings = Vec::new();
        if self.dt >= 0.01 * scale {
            warnings.push(format!(
                "dt = {} is above the recommended bound {:.3e}; expect visible discretization bias",
                self.dt,
                0.01 * scale
            ));
        }
        Ok(warnings)
    }
}

/// Mean, variance, and relative error of one quantity with jackknife
/// standard errors.
#[derive(Debug, Clone, Copy)]
pub struct McQuantity {
    pub mean: f64,
    pub mean_se: f64,
    pub var: f64,
    pub var_se: f64,
    pub eps: Option<f64>,
    pub eps_se: Option<f64>,
}

/// Ensemble estimates of one Monte Carlo run.
#[derive(Debug, Clone)]
pub struct McEstimate {
    pub work: McQuantity,
    pub heat_hot: McQuantity,
    pub heat_cold: McQuantity,
    pub entropy: McQuantity,
    /// Sample times of the mean energy trajectory (empty if disabled).
    pub energy_times: Vec<f64>,
    /// <H(t)> over the measured cycles.
    pub energy_mean: Vec<f64>,
    /// Standard error of each energy sample over trajectories.
    pub energy_se: Vec<f64>,
    /// Trajectories that finished.
    pub n_traj: usize,
    /// Trajectories dropped after leaving the finite domain.
    pub aborted: usize,
    pub warnings: Vec<String>,
}

/// One stochastic Heun step of the bath-attached dynamics at fixed
/// frequency. `temp` is the bare temperature of the attached bath.
pub fn step<R: rand::Rng>(
    point: PhasePoint,
    omega: f64,
    temp: f64,
    params: &CycleParams,
    bath: BathKind,
    dt: f64,
    rng: &mut R,
) -> PhasePoint {
    let m = params.mass;
    let g = params.gamma;
    let (gx, sigma_x, sigma_p) = match bath {
        BathKind::Quantum => {
            let tt = effective_temperature(omega, temp, params.hbar);
            (
                0.25 * g,
                (0.25 * g * tt / (m * omega * omega)).sqrt(),
                (0.25 * m * g * tt).sqrt(),
            )
        }
        BathKind::Classical => (0.0, 0.0, (0.25 * m * g * temp).sqrt()),
    };
    let amp = (2.0 * dt).sqrt();
    let dwx = if sigma_x > 0.0 {
        let z: f64 = StandardNormal.sample(rng);
        sigma_x * amp * z
    } else {
        0.0
    };
    let dwp = if sigma_p > 0.0 {
        let z: f64 = StandardNormal.sample(rng);
        sigma_p * amp * z
    } else {
        0.0
    };
    let drift = |x: f64, p: f64| {
        (
            p / m - gx * x,
            -m * omega * omega * x - 0.25 * g * p,
        )
    };
    let (fx0, fp0) = drift(point.x, point.p);
    let xe = point.x + fx0 * dt + dwx;
    let pe = point.p + fp0 * dt + dwp;
    let (fx1, fp1) = drift(xe, pe);
    PhasePoint {
        x: point.x + 0.5 * dt * (fx0 + fx1) + dwx,
        p: point.p + 0.5 * dt * (fp0 + fp1) + dwp,
    }
}

/// Deterministic velocity-Verlet sweep of one adiabat (bath detached),
/// with the frequency following the 1/omega-linear ramp.
fn adiabat_sweep(
    mut pt: PhasePoint,
    omega_i: f64,
    omega_f: f64,
    tau: f64,
    n_steps: usize,
    mass: f64,
    mut record: impl FnMut(usize, &PhasePoint),
) -> PhasePoint {
    let dt = tau / n_steps as f64;
    let inv_i = 1.0 / omega_i;
    let slope = (1.0 / omega_f - inv_i) / tau;
    let omega_at = |t: f64| 1.0 / (inv_i + slope * t.clamp(0.0, tau));
    let mut t = 0.0;
    for k in 1..=n_steps {
        let w0 = omega_at(t);
        let p_half = pt.p - 0.5 * dt * mass * w0 * w0 * pt.x;
        pt.x += dt * p_half / mass;
        let w1 = omega_at(t + dt);
        pt.p = p_half - 0.5 * dt * mass * w1 * w1 * pt.x;
        t += dt;
        record(k, &pt);
    }
    pt
}

/// Substep counts per stroke: at most `dt` long, and a multiple of the
/// energy grid so samples land exactly on grid times.
fn substeps(tau: f64, dt: f64, grid: usize) -> usize {
    if tau == 0.0 {
        return 0;
    }
    let mut n = (tau / dt).ceil() as usize;
    n = n.max(1);
    if grid > 0 {
        n = n.div_ceil(grid) * grid;
    }
    n
}

struct StrokePlan {
    tau: f64,
    n_steps: usize,
    adiabatic: Option<(f64, f64)>,
    omega: f64,
    temp: f64,
}

struct TrajAccum {
    cycles: u64,
    sum: [f64; 4],
    sumsq: [f64; 4],
    energy: Vec<f64>,
    ok: bool,
}

fn run_trajectory(
    params: &CycleParams,
    bath: BathKind,
    cfg: &McConfig,
    plans: &[StrokePlan; 4],
    n_energy: usize,
    traj: u64,
) -> TrajAccum {
    let mut acc = TrajAccum {
        cycles: 0,
        sum: [0.0; 4],
        sumsq: [0.0; 4],
        energy: vec![0.0; n_energy],
        ok: true,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(traj + 1);

    // start from equilibrium of the cold bath (effective temperature for
    // the quantum fluid)
    let t0 = match bath {
        BathKind::Quantum => effective_temperature(params.omega_c, params.temp_c, params.hbar),
        BathKind::Classical => params.temp_c,
    };
    let zx: f64 = StandardNormal.sample(&mut rng);
    let zp: f64 = StandardNormal.sample(&mut rng);
    let mut pt = PhasePoint {
        x: zx * (t0 / (params.mass * params.omega_c * params.omega_c)).sqrt(),
        p: zp * (params.mass * t0).sqrt(),
    };

    let grid = cfg.energy_grid_per_stroke;
    let total = cfg.burn_in_cycles + cfg.measure_cycles;
    for cycle in 0..total {
        let measuring = cycle >= cfg.burn_in_cycles;
        let mut eidx = 0usize;
        if measuring && grid > 0 {
            acc.energy[eidx] += pt.energy(params.omega_c, params.mass);
        }
        eidx += 1;

        let mut bound = [0.0; 5];
        bound[0] = pt.energy(params.omega_c, params.mass);
        for (si, plan) in plans.iter().enumerate() {
            if plan.n_steps > 0 {
                let every = plan.n_steps.checked_div(grid).unwrap_or(0);
                match plan.adiabatic {
                    Some((wi, wf)) => {
                        pt = adiabat_sweep(
                            pt,
                            wi,
                            wf,
                            plan.tau,
                            plan.n_steps,
                            params.mass,
                            |k, q| {
                                if measuring && grid > 0 && k % every == 0 {
                                    let t = plan.tau * k as f64 / plan.n_steps as f64;
                                    let inv = 1.0 / wi + (1.0 / wf - 1.0 / wi) * t / plan.tau;
                                    acc.energy[eidx + k / every - 1] +=
                                        q.energy(1.0 / inv, params.mass);
                                }
                            },
                        );
                    }
                    None => {
                        let h = plan.tau / plan.n_steps as f64;
                        for k in 1..=plan.n_steps {
                            pt = step(pt, plan.omega, plan.temp, params, bath, h, &mut rng);
                            if measuring && grid > 0 && k % every == 0 {
                                acc.energy[eidx + k / every - 1] +=
                                    pt.energy(plan.omega, params.mass);
                            }
                        }
                    }
                }
                if grid > 0 {
                    eidx += grid;
                }
            }
            let omega_end = match plan.adiabatic {
                Some((_, wf)) => wf,
                None => plan.omega,
            };
            bound[si + 1] = pt.energy(omega_end, params.mass);
        }

        if !pt.is_finite() {
            acc.ok = false;
            return acc;
        }
        if measuring {
            let w = bound[2] - bound[3] - bound[1] + bound[0];
            let qh = bound[2] - bound[1];
            let qc = bound[3] - bound[4];
            // entropy production with the cold heat anchored at the cycle
            // start, matching the exact pipeline's fluctuation convention
            let sigma = -qh / params.temp_h + (bound[3] - bound[0]) / params.temp_c;
            for (slot, v) in [w, qh, qc, sigma].into_iter().enumerate() {
                acc.sum[slot] += v;
                acc.sumsq[slot] += v * v;
            }
            acc.cycles += 1;
        }
    }
    acc
}

/// Deterministic offsets turning phase-space second moments into
/// symmetrized operator moments, per quantity, for the quantum bath.
fn wigner_corrections(params: &CycleParams, bath: BathKind) -> Result<[f64; 4]> {
    if bath == BathKind::Classical || params.hbar == 0.0 {
        return Ok([0.0; 4]);
    }
    let strokes = cycle_strokes(params, bath)?;
    let omegas = [
        params.omega_c,
        params.omega_h,
        params.omega_h,
        params.omega_c,
        params.omega_c,
    ];
    // delta_s[i][j]: shift of <H(t_i)H(t_j)>_s relative to the Wigner
    // moment, the equal-time shift propagated from the earlier boundary
    let mut delta_s = [[0.0; 5]; 5];
    for i in 0..5 {
        let mut d = nalgebra::Vector4::new(
            -0.25 * (params.hbar * omegas[i]).powi(2),
            0.0,
            0.0,
            0.0,
        );
        delta_s[i][i] = d[0];
        for j in (i + 1)..5 {
            d = strokes[j - 1].matrix * d;
            delta_s[i][j] = d[0];
            delta_s[j][i] = d[0];
        }
    }
    let coefs: [[f64; 5]; 4] = [
        [1.0, -1.0, 1.0, -1.0, 0.0],
        [0.0, -1.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0, -1.0],
        [
            -1.0 / params.temp_c,
            1.0 / params.temp_h,
            -1.0 / params.temp_h,
            1.0 / params.temp_c,
            0.0,
        ],
    ];
    let mut corr = [0.0; 4];
    for (q, c) in coefs.iter().enumerate() {
        for i in 0..5 {
            for j in 0..5 {
                corr[q] += c[i] * c[j] * delta_s[i.min(j)][i.max(j)];
            }
        }
    }
    Ok(corr)
}

fn jackknife(accs: &[&TrajAccum], slot: usize, corr: f64) -> McQuantity {
    let n_total: u64 = accs.iter().map(|a| a.cycles).sum();
    let s_total: f64 = accs.iter().map(|a| a.sum[slot]).sum();
    let q_total: f64 = accs.iter().map(|a| a.sumsq[slot]).sum();
    let n = n_total as f64;
    let mean = s_total / n;
    let var = q_total / n - mean * mean + corr;
    let eps = if mean == 0.0 {
        None
    } else {
        Some(var / (mean * mean))
    };

    let j = accs.len();
    if j < 2 {
        return McQuantity {
            mean,
            mean_se: f64::NAN,
            var,
            var_se: f64::NAN,
            eps,
            eps_se: eps.map(|_| f64::NAN),
        };
    }
    let mut loo = Vec::with_capacity(j);
    for a in accs {
        let nj = (n_total - a.cycles) as f64;
        let mj = (s_total - a.sum[slot]) / nj;
        let vj = (q_total - a.sumsq[slot]) / nj - mj * mj + corr;
        let ej = if mj == 0.0 { f64::NAN } else { vj / (mj * mj) };
        loo.push((mj, vj, ej));
    }
    let jf = j as f64;
    let se = |vals: &dyn Fn(&(f64, f64, f64)) -> f64| {
        let avg: f64 = loo.iter().map(vals).sum::<f64>() / jf;
        let ss: f64 = loo.iter().map(|t| (vals(t) - avg).powi(2)).sum();
        ((jf - 1.0) / jf * ss).sqrt()
    };
    McQuantity {
        mean,
        mean_se: se(&|t| t.0),
        var,
        var_se: se(&|t| t.1),
        eps,
        eps_se: eps.map(|_| se(&|t| t.2)),
    }
}

/// Energy grid sample times matching the recording layout of one cycle.
fn energy_grid_times(params: &CycleParams, grid: usize) -> Vec<f64> {
    if grid == 0 {
        return Vec::new();
    }
    let mut times = vec![0.0];
    let mut origin = 0.0;
    for tau in [params.tau_ch, params.tau_h, params.tau_hc, params.tau_c] {
        if tau > 0.0 {
            for k in 1..=grid {
                times.push(origin + tau * k as f64 / grid as f64);
            }
            origin += tau;
        }
    }
    times
}

/// Runs the full Monte Carlo estimate.
///
/// Errors if the configuration is invalid, the step exceeds its hard
/// bound, or more than 1% of trajectories abort with non-finite state.
pub fn run(params: &CycleParams, bath: BathKind, cfg: &McConfig) -> Result<McEstimate> {
    let warnings = cfg.validate(params)?;
    let grid = cfg.energy_grid_per_stroke;
    let plans = [
        StrokePlan {
            tau: params.tau_ch,
            n_steps: substeps(params.tau_ch, cfg.dt, grid),
            adiabatic: Some((params.omega_c, params.omega_h)),
            omega: params.omega_h,
            temp: params.temp_h,
        },
        StrokePlan {
            tau: params.tau_h,
            n_steps: substeps(params.tau_h, cfg.dt, grid),
            adiabatic: None,
            omega: params.omega_h,
            temp: params.temp_h,
        },
        StrokePlan {
            tau: params.tau_hc,
            n_steps: substeps(params.tau_hc, cfg.dt, grid),
            adiabatic: Some((params.omega_h, params.omega_c)),
            omega: params.omega_c,
            temp: params.temp_c,
        },
        StrokePlan {
            tau: params.tau_c,
            n_steps: substeps(params.tau_c, cfg.dt, grid),
            adiabatic: None,
            omega: params.omega_c,
            temp: params.temp_c,
        },
    ];
    let energy_times = energy_grid_times(params, grid);
    let n_energy = energy_times.len();

    let accs: Vec<TrajAccum> = (0..cfg.n_traj as u64)
        .into_par_iter()
        .map(|traj| run_trajectory(params, bath, cfg, &plans, n_energy, traj))
        .collect();

    let ok: Vec<&TrajAccum> = accs.iter().filter(|a| a.ok).collect();
    let aborted = accs.len() - ok.len();
    if aborted * 100 > cfg.n_traj {
        return Err(Error::McUnstable {
            aborted,
            total: cfg.n_traj,
        });
    }
    if ok.is_empty() {
        return Err(Error::McUnstable {
            aborted,
            total: cfg.n_traj,
        });
    }

    let corr = wigner_corrections(params, bath)?;
    let work = jackknife(&ok, 0, corr[0]);
    let heat_hot = jackknife(&ok, 1, corr[1]);
    let heat_cold = jackknife(&ok, 2, corr[2]);
    let entropy = jackknife(&ok, 3, corr[3]);

    // energy trajectory: per-trajectory cycle means, averaged over
    // trajectories with a plain standard error
    let mut energy_mean = vec![0.0; n_energy];
    let mut energy_se = vec![0.0; n_energy];
    if n_energy > 0 {
        let jf = ok.len() as f64;
        for g in 0..n_energy {
            let per: Vec<f64> = ok
                .iter()
                .map(|a| a.energy[g] / a.cycles as f64)
                .collect();
            let mean = per.iter().sum::<f64>() / jf;
            let ss = per.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
            energy_mean[g] = mean;
            energy_se[g] = (ss / (jf * (jf - 1.0).max(1.0))).sqrt();
        }
    }

    Ok(McEstimate {
        work,
        heat_hot,
        heat_cold,
        entropy,
        energy_times,
        energy_mean,
        energy_se,
        n_traj: ok.len(),
        aborted,
        warnings,
    })
}
