//! One-cycle propagator, cyclic steady state, and intra-cycle trajectories.
//!
//! The cycle starts at the compression stroke; fluctuation statistics
//! depend on this choice of origin, so it is part of the contract. The
//! one-cycle map is P = E_cold * E_exp * E_hot * E_com acting on column
//! vectors phi, and the limit cycle solves (I - G) c = b where G is the
//! upper-left 3x3 block of P and b its last column.

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};

use crate::generators::{
    adiabat_phase, adiabat_phase_partial, adiabat_propagator, adiabatic_generator,
    isochore_generator, omega_protocol, stroke_propagator, IsochoreSide, StrokePropagator,
};
use crate::model::{BathKind, CycleParams, MomentState};
use crate::{Error, Result};

/// Spectral radii within this margin of 1 are treated as divergent:
/// the (I - G) solve conditioning grows like 1/(1 - rho).
pub const STABILITY_MARGIN: f64 = 1e-9;

/// The one-cycle map and its spectral diagnostics.
#[derive(Debug, Clone)]
pub struct CyclePropagator {
    /// Full 4x4 one-cycle matrix.
    pub p: Matrix4<f64>,
    /// Upper-left 3x3 block of `p`.
    pub g: Matrix3<f64>,
    /// Affine part (P14, P24, P34).
    pub b: Vector3<f64>,
    /// Largest eigenvalue magnitude of `g`.
    pub spectral_radius_g: f64,
    pub bath: BathKind,
}

impl CyclePropagator {
    pub fn is_divergent(&self) -> bool {
        !self.spectral_radius_g.is_finite()
            || self.spectral_radius_g >= 1.0 - STABILITY_MARGIN
    }
}

/// Moment states sampled along one period of the limit cycle.
#[derive(Debug, Clone)]
pub struct CycleTrajectory {
    /// Sample times over [0, tau_cyc], starting at the compression stroke.
    pub times: Vec<f64>,
    pub states: Vec<MomentState>,
    /// Mean kinetic energy (h + l)/2 at each sample.
    pub kinetic: Vec<f64>,
    /// Mean potential energy (h - l)/2 at each sample.
    pub potential: Vec<f64>,
}

/// The four stroke propagators in cycle order
/// [compression, hot isochore, expansion, cold isochore].
pub fn cycle_strokes(
    params: &CycleParams,
    bath: BathKind,
) -> Result<[StrokePropagator; 4]> {
    let com = adiabat_propagator(params.omega_c, params.omega_h, params.tau_ch)?;
    let hot = {
        let gen = isochore_generator(params, IsochoreSide::Hot, bath);
        stroke_propagator(&gen, params.tau_h)?
    };
    let exp = adiabat_propagator(params.omega_h, params.omega_c, params.tau_hc)?;
    let cold = {
        let gen = isochore_generator(params, IsochoreSide::Cold, bath);
        stroke_propagator(&gen, params.tau_c)?
    };
    Ok([com, hot, exp, cold])
}

/// Assembles the one-cycle propagator from precomputed strokes.
pub fn cycle_propagator_from_strokes(
    strokes: &[StrokePropagator; 4],
    bath: BathKind,
) -> Result<CyclePropagator> {
    let p = strokes[3].matrix * strokes[2].matrix * strokes[1].matrix * strokes[0].matrix;
    if p.iter().any(|v| !v.is_finite()) {
        return Err(Error::Divergent {
            spectral_radius: f64::INFINITY,
        });
    }
    let g = p.fixed_view::<3, 3>(0, 0).into_owned();
    let b = Vector3::new(p[(0, 3)], p[(1, 3)], p[(2, 3)]);
    let spectral_radius_g = g
        .complex_eigenvalues()
        .iter()
        .map(|ev| ev.norm())
        .fold(0.0_f64, f64::max);
    Ok(CyclePropagator {
        p,
        g,
        b,
        spectral_radius_g,
        bath,
    })
}

/// Composes the one-cycle propagator
/// P = E_cold * E_exp * E_hot * E_com and extracts its blocks.
pub fn cycle_propagator(params: &CycleParams, bath: BathKind) -> Result<CyclePropagator> {
    let strokes = cycle_strokes(params, bath)?;
    cycle_propagator_from_strokes(&strokes, bath)
}

pub(crate) fn steady_state_vector(
    prop: &CyclePropagator,
) -> Result<Vector4<f64>> {
    if prop.is_divergent() {
        return Err(Error::Divergent {
            spectral_radius: prop.spectral_radius_g,
        });
    }
    let lhs = Matrix3::identity() - prop.g;
    let c = lhs.lu().solve(&prop.b).ok_or(Error::Divergent {
        spectral_radius: prop.spectral_radius_g,
    })?;
    Ok(Vector4::new(c[0], c[1], c[2], 1.0))
}

/// Cyclic steady state phi_ss(t1) at the start of compression, solved by
/// the direct 3x3 system c = (I - G)^{-1} b.
pub fn steady_state(prop: &CyclePropagator, params: &CycleParams) -> Result<MomentState> {
    let phi = steady_state_vector(prop)?;
    Ok(MomentState {
        h: phi[0],
        l: phi[1],
        d: phi[2],
        omega: params.omega_c,
        bath: prop.bath,
    })
}

/// Accumulated phase over one full cycle,
/// Delta theta = omega_c tau_c + omega_h tau_h
///             + [omega_c omega_h/(omega_h - omega_c)] ln(omega_h/omega_c) (tau_ch + tau_hc).
///
/// The cycle responds resonantly (and can diverge at weak dissipation)
/// where this is an integer multiple of pi.
pub fn phase(params: &CycleParams) -> f64 {
    params.omega_c * params.tau_c
        + params.omega_h * params.tau_h
        + adiabat_phase(params.omega_c, params.omega_h, params.tau_ch)
        + adiabat_phase(params.omega_h, params.omega_c, params.tau_hc)
}

/// Samples the limit cycle phi(t) on a uniform grid of `n_grid` points per
/// stroke (at least 2), by applying partial-stroke propagators to the
/// steady state. Strokes of zero duration contribute no samples.
pub fn trajectory(
    params: &CycleParams,
    bath: BathKind,
    n_grid: usize,
) -> Result<CycleTrajectory> {
    if n_grid < 2 {
        return Err(Error::InvalidParams(
            "trajectory needs at least 2 grid points per stroke".into(),
        ));
    }
    let prop = cycle_propagator(params, bath)?;
    let phi0 = steady_state_vector(&prop)?;

    let mut times = vec![0.0];
    let mut phis = vec![phi0];
    let mut omegas = vec![params.omega_c];

    let mut t_origin = 0.0;
    let mut phi_start = phi0;

    struct Stroke {
        tau: f64,
        adiabatic: Option<(f64, f64)>, // (omega_i, omega_f)
        side: Option<IsochoreSide>,
    }
    let strokes = [
        Stroke {
            tau: params.tau_ch,
            adiabatic: Some((params.omega_c, params.omega_h)),
            side: None,
        },
        Stroke {
            tau: params.tau_h,
            adiabatic: None,
            side: Some(IsochoreSide::Hot),
        },
        Stroke {
            tau: params.tau_hc,
            adiabatic: Some((params.omega_h, params.omega_c)),
            side: None,
        },
        Stroke {
            tau: params.tau_c,
            adiabatic: None,
            side: Some(IsochoreSide::Cold),
        },
    ];

    for s in &strokes {
        if s.tau == 0.0 {
            continue;
        }
        let gen = match (s.adiabatic, s.side) {
            (Some((wi, wf)), _) => adiabatic_generator(wi, wf, s.tau),
            (None, Some(side)) => isochore_generator(params, side, bath),
            _ => unreachable!(),
        };
        let mut phi_end = phi_start;
        for k in 1..=n_grid {
            let t_local = s.tau * k as f64 / n_grid as f64;
            let (extent, omega) = match s.adiabatic {
                Some((wi, wf)) => (
                    adiabat_phase_partial(wi, wf, s.tau, t_local)?,
                    omega_protocol(wi, wf, s.tau, t_local)?,
                ),
                None => {
                    let omega = match s.side.unwrap() {
                        IsochoreSide::Hot => params.omega_h,
                        IsochoreSide::Cold => params.omega_c,
                    };
                    (t_local, omega)
                }
            };
            let partial = stroke_propagator(&gen, extent)?;
            let phi = partial.matrix * phi_start;
            times.push(t_origin + t_local);
            omegas.push(omega);
            phis.push(phi);
            if k == n_grid {
                phi_end = phi;
            }
        }
        t_origin += s.tau;
        phi_start = phi_end;
    }

    let states: Vec<MomentState> = phis
        .iter()
        .zip(&omegas)
        .map(|(phi, &omega)| MomentState {
            h: phi[0],
            l: phi[1],
            d: phi[2],
            omega,
            bath,
        })
        .collect();
    let kinetic = states.iter().map(|s| s.kinetic()).collect();
    let potential = states.iter().map(|s| s.potential()).collect();
    Ok(CycleTrajectory {
        times,
        states,
        kinetic,
        potential,
    })
}
