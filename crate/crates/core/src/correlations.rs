//! Two-time correlation functions and the exact fluctuation statistics of
//! work, heat, and entropy production over one cycle.
//!
//! The regression theorem propagates the vector
//! C(t, t') = (<H(t)H(t')>_s, <L(t)H(t')>_s, <D(t)H(t')>_s, <H(t')>)
//! in t with the same stroke generators as the one-time moments. Initial
//! conditions C(t', t') come from the Gaussian closure of the cyclic
//! steady state:
//!
//! ```text
//! <H^2> = 2<H>^2 + <L>^2 + <D>^2 - (hbar*omega)^2/4,
//! <LH>_s = 3<H><L>,   <DH>_s = 3<D><H>,
//! ```
//!
//! with hbar = 0 for the classical fluid. The (hbar*omega)^2/4 term makes
//! the energy fluctuation vanish exactly in the ground state.
//!
//! Work is anchored at the cycle start: W = H(t1) - H(t2) + H(t3) - H(t4),
//! Q_h = H(t3) - H(t2), Q_c = H(t4) - H(t5), and
//! Sigma = -Q_h/T_h + Q_c/T_c, so the full second-moment table over the
//! five stroke boundaries t1..t5 determines every variance and covariance.
//! The entropy fluctuation anchors its cold-heat term at the cycle start
//! (H4 - H1, like W); the reported cold heat keeps its own stroke
//! boundaries (t4, t5), which are correlated differently with the rest of
//! the cycle than (t4, t1).

use nalgebra::Vector4;

use crate::limit_cycle::{
    cycle_propagator_from_strokes, cycle_strokes, phase, steady_state_vector,
};
use crate::generators::StrokePropagator;
use crate::model::{BathKind, CycleParams, MachineType, MomentState};
use crate::{Error, Result};

/// Two-time correlation vector C(t, t') at fixed t'.
///
/// The last component is constant under propagation in t because the
/// generators' fourth row is zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoTimeVector {
    /// <H(t)H(t')>_s
    pub c1: f64,
    /// <L(t)H(t')>_s
    pub c2: f64,
    /// <D(t)H(t')>_s
    pub c3: f64,
    /// <H(t')>
    pub c4: f64,
}

impl TwoTimeVector {
    pub fn as_vector(&self) -> Vector4<f64> {
        Vector4::new(self.c1, self.c2, self.c3, self.c4)
    }
}

/// Equal-time correlation vector C(t', t') from the Gaussian closure of a
/// moment state. Errors if the state lies below its uncertainty floor.
pub fn gaussian_closure(state: &MomentState, hbar: f64) -> Result<TwoTimeVector> {
    let floor = state.floor(hbar);
    let value = state.h * state.h - state.l * state.l - state.d * state.d;
    if value < floor - 1e-9 * state.h * state.h {
        return Err(Error::FloorViolation { value, floor });
    }
    let hw = match state.bath {
        BathKind::Quantum => hbar * state.omega,
        BathKind::Classical => 0.0,
    };
    Ok(TwoTimeVector {
        c1: 2.0 * state.h * state.h + state.l * state.l + state.d * state.d
            - 0.25 * hw * hw,
        c2: 3.0 * state.h * state.l,
        c3: 3.0 * state.h * state.d,
        c4: state.h,
    })
}

/// First moments and the symmetrized second-moment table of H at the five
/// stroke boundaries of the limit cycle.
#[derive(Debug, Clone)]
pub struct BoundaryMoments {
    /// <H(t_i)>, i = 1..5; means[0] == means[4] in the steady state.
    pub means: [f64; 5],
    /// Symmetric table S[i][j] = <H(t_i) H(t_j)>_s.
    pub second: [[f64; 5]; 5],
}

impl BoundaryMoments {
    /// Var(H(t_i)).
    pub fn variance(&self, i: usize) -> f64 {
        self.second[i][i] - self.means[i] * self.means[i]
    }
}

/// Instantaneous frequencies at the five boundaries.
fn boundary_omegas(params: &CycleParams) -> [f64; 5] {
    [
        params.omega_c,
        params.omega_h,
        params.omega_h,
        params.omega_c,
        params.omega_c,
    ]
}

/// Boundary moments computed from precomputed stroke propagators.
pub fn boundary_moments_from_strokes(
    params: &CycleParams,
    bath: BathKind,
    strokes: &[StrokePropagator; 4],
) -> Result<BoundaryMoments> {
    let prop = cycle_propagator_from_strokes(strokes, bath)?;
    let phi1 = steady_state_vector(&prop)?;

    // push phi through the strokes to get all five boundary states
    let mut phis = [phi1; 5];
    for i in 0..4 {
        phis[i + 1] = strokes[i].matrix * phis[i];
    }
    let omegas = boundary_omegas(params);
    let hbar = match bath {
        BathKind::Quantum => params.hbar,
        BathKind::Classical => 0.0,
    };

    let mut means = [0.0; 5];
    for i in 0..5 {
        means[i] = phis[i][0];
    }

    // seed the closure at each boundary and propagate forward
    let mut second = [[0.0; 5]; 5];
    for i in 0..5 {
        let state = MomentState {
            h: phis[i][0],
            l: phis[i][1],
            d: phis[i][2],
            omega: omegas[i],
            bath,
        };
        let mut c = gaussian_closure(&state, hbar)?.as_vector();
        second[i][i] = c[0];
        for j in (i + 1)..5 {
            c = strokes[j - 1].matrix * c;
            second[i][j] = c[0];
            second[j][i] = c[0];
        }
    }
    Ok(BoundaryMoments { means, second })
}

/// Boundary moments of the limit cycle for one parameter set.
pub fn boundary_moments(params: &CycleParams, bath: BathKind) -> Result<BoundaryMoments> {
    let strokes = cycle_strokes(params, bath)?;
    boundary_moments_from_strokes(params, bath, &strokes)
}

/// Exact means, fluctuations, relative errors, and uncertainty products of
/// one cycle configuration.
#[derive(Debug, Clone, Copy)]
pub struct ThermoStats {
    pub bath: BathKind,
    pub mean_w: f64,
    pub mean_qh: f64,
    pub mean_qc: f64,
    pub mean_sigma: f64,
    pub var_w: f64,
    pub var_qh: f64,
    pub var_qc: f64,
    pub var_sigma: f64,
    pub cov_qh_qc: f64,
    /// Relative errors Var(A)/<A>^2; absent when the mean is exactly zero.
    pub eps_w: Option<f64>,
    pub eps_qh: Option<f64>,
    pub eps_qc: Option<f64>,
    pub eps_sigma: Option<f64>,
    /// Uncertainty products eps_A * <Sigma> / 2; below 1 violates the
    /// conventional trade-off bound.
    pub q_w: Option<f64>,
    pub q_qh: Option<f64>,
    pub q_qc: Option<f64>,
    pub q_sigma: Option<f64>,
    pub machine: MachineType,
    /// Accumulated phase over one cycle.
    pub phase: f64,
    /// <W>/<Q_h>, reported only for engines.
    pub efficiency: Option<f64>,
    /// <W>/tau_cyc.
    pub power: f64,
    /// Spectral radius of the one-cycle 3x3 block.
    pub spectral_radius: f64,
}

fn rel_error(var: f64, mean: f64) -> Option<f64> {
    if mean == 0.0 {
        None
    } else {
        Some(var / (mean * mean))
    }
}

/// Full statistics from precomputed stroke propagators.
pub fn thermo_stats_from_strokes(
    params: &CycleParams,
    bath: BathKind,
    strokes: &[StrokePropagator; 4],
) -> Result<ThermoStats> {
    let prop = cycle_propagator_from_strokes(strokes, bath)?;
    let bm = boundary_moments_from_strokes(params, bath, strokes)?;
    let m = &bm.means;
    let s = &bm.second;

    let mean_w = m[2] - m[3] - m[1] + m[0];
    let mean_qh = m[2] - m[1];
    let mean_qc = m[3] - m[4];
    let mean_sigma = -mean_qh / params.temp_h + mean_qc / params.temp_c;

    // signs of the boundary energies in W = H1 - H2 + H3 - H4
    let w_sign = [1.0, -1.0, 1.0, -1.0];
    let mut w2 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            w2 += w_sign[i] * w_sign[j] * s[i][j];
        }
    }
    let var_w = w2 - mean_w * mean_w;
    let var_qh = s[1][1] + s[2][2] - 2.0 * s[1][2] - mean_qh * mean_qh;
    let var_qc = s[3][3] + s[4][4] - 2.0 * s[3][4] - mean_qc * mean_qc;
    let cov_qh_qc = s[2][3] - s[2][4] - s[1][3] + s[1][4] - mean_qh * mean_qc;
    // The fluctuating entropy production anchors its cold heat at the
    // cycle's own start, Q_c' = H4 - H1, the same anchoring as W (which
    // makes W = Q_h - Q_c' hold pathwise); only then do the entropy
    // fluctuations reach the quasistatic closed form in the slow limit.
    // The mean is anchoring-independent in the steady state.
    let mean_qc_start = m[3] - m[0];
    let var_qc_start = s[3][3] + s[0][0] - 2.0 * s[0][3] - mean_qc_start * mean_qc_start;
    let cov_qh_qc_start =
        s[2][3] - s[0][2] - s[1][3] + s[0][1] - mean_qh * mean_qc_start;
    let var_sigma = var_qh / (params.temp_h * params.temp_h)
        + var_qc_start / (params.temp_c * params.temp_c)
        - 2.0 * cov_qh_qc_start / (params.temp_h * params.temp_c);

    let eps_w = rel_error(var_w, mean_w);
    let eps_qh = rel_error(var_qh, mean_qh);
    let eps_qc = rel_error(var_qc, mean_qc);
    let eps_sigma = rel_error(var_sigma, mean_sigma);
    let q_of = |eps: Option<f64>| eps.map(|e| 0.5 * e * mean_sigma);

    let machine = MachineType::classify(mean_w, mean_qh, mean_qc);
    let efficiency = if machine == MachineType::Engine {
        Some(mean_w / mean_qh)
    } else {
        None
    };

    Ok(ThermoStats {
        bath,
        mean_w,
        mean_qh,
        mean_qc,
        mean_sigma,
        var_w,
        var_qh,
        var_qc,
        var_sigma,
        cov_qh_qc,
        eps_w,
        eps_qh,
        eps_qc,
        eps_sigma,
        q_w: q_of(eps_w),
        q_qh: q_of(eps_qh),
        q_qc: q_of(eps_qc),
        q_sigma: q_of(eps_sigma),
        machine,
        phase: phase(params),
        efficiency,
        power: mean_w / params.tau_cyc(),
        spectral_radius: prop.spectral_radius_g,
    })
}

/// Exact cycle statistics for one parameter set and bath kind.
pub fn thermo_stats(params: &CycleParams, bath: BathKind) -> Result<ThermoStats> {
    let strokes = cycle_strokes(params, bath)?;
    thermo_stats_from_strokes(params, bath, &strokes)
}
