//! Shared test support: reference parameter sets and an adaptive
//! Dormand-Prince integrator of the raw moment equation
//! d phi / dt = M(t) phi, kept independent of the matrix-exponential
//! path it is used to check.

use nalgebra::{Matrix4, Vector4};
use otto_core::CycleParams;

#[allow(dead_code)]
pub fn reference_cycle() -> CycleParams {
    CycleParams {
        mass: 1.0,
        gamma: 1.0,
        omega_h: 1.2,
        omega_c: 1.0,
        temp_h: 2.0,
        temp_c: 0.3,
        hbar: 1.0,
        tau_ch: 0.2,
        tau_h: 1.0,
        tau_hc: 0.2,
        tau_c: 1.0,
    }
}

#[allow(dead_code)]
pub fn reference_cycle_scaled(tau_cyc: f64) -> CycleParams {
    let s = tau_cyc / 2.4;
    CycleParams {
        tau_ch: 0.2 * s,
        tau_h: s,
        tau_hc: 0.2 * s,
        tau_c: s,
        ..reference_cycle()
    }
}

#[allow(dead_code)]
pub fn bound_violation_point() -> CycleParams {
    CycleParams {
        mass: 1.0,
        gamma: 0.25,
        omega_h: 0.724,
        omega_c: 0.620,
        temp_h: 0.356,
        temp_c: 0.286,
        hbar: 1.0,
        tau_ch: 1.25,
        tau_h: 1.25,
        tau_hc: 1.25,
        tau_c: 1.25,
    }
}

/// Frequencies and temperatures of the uncertainty-product scan; the
/// phase scan fills in the common stroke duration.
#[allow(dead_code)]
pub fn qscan_point(gamma: f64) -> CycleParams {
    CycleParams {
        mass: 1.0,
        gamma,
        omega_h: 0.750,
        omega_c: 0.633,
        temp_h: 0.698,
        temp_c: 0.622,
        hbar: 1.0,
        tau_ch: 1.0,
        tau_h: 1.0,
        tau_hc: 1.0,
        tau_c: 1.0,
    }
}

/// Base point of the crossover-time analysis: fixed short adiabats,
/// isochore times supplied by the scan.
#[allow(dead_code)]
pub fn crossover_base() -> CycleParams {
    CycleParams {
        mass: 1.0,
        gamma: 1.0,
        omega_h: 3.0,
        omega_c: 1.0,
        temp_h: 1.0,
        temp_c: 0.5,
        hbar: 1.0,
        tau_ch: 0.1,
        tau_h: 1.0,
        tau_hc: 0.1,
        tau_c: 1.0,
    }
}

/// Right-hand side M(t) of the moment equation in the time domain.
#[allow(dead_code)]
pub enum Flow {
    /// Isochore: constant matrix.
    Constant(Matrix4<f64>),
    /// Adiabat: M(t) = omega(t) * A with the ramp omega(t) and the
    /// constant phase-generator A.
    Ramp {
        a: Matrix4<f64>,
        omega_i: f64,
        omega_f: f64,
        tau: f64,
    },
}

impl Flow {
    #[allow(dead_code)]
    fn eval(&self, t: f64, y: &Vector4<f64>) -> Vector4<f64> {
        match self {
            Flow::Constant(m) => m * y,
            Flow::Ramp {
                a,
                omega_i,
                omega_f,
                tau,
            } => {
                let inv = 1.0 / omega_i + (1.0 / omega_f - 1.0 / omega_i) * t / tau;
                (a * y) / inv
            }
        }
    }
}

/// Adaptive Dormand-Prince 5(4) integration of dy/dt = M(t) y over
/// [0, t_end], with relative tolerance 1e-12.
#[allow(dead_code)]
pub fn integrate(flow: &Flow, y0: Vector4<f64>, t_end: f64) -> Vector4<f64> {
    const RTOL: f64 = 1e-12;
    const ATOL: f64 = 1e-14;
    if t_end == 0.0 {
        return y0;
    }
    let mut t = 0.0;
    let mut y = y0;
    let mut h = (t_end / 100.0).clamp(1e-8, 0.1);
    let mut k1 = flow.eval(t, &y);
    while t < t_end {
        if t + h > t_end {
            h = t_end - t;
        }
        let k2 = flow.eval(t + h / 5.0, &(y + h * (k1 / 5.0)));
        let k3 = flow.eval(
            t + 3.0 * h / 10.0,
            &(y + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2)),
        );
        let k4 = flow.eval(
            t + 4.0 * h / 5.0,
            &(y + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3)),
        );
        let k5 = flow.eval(
            t + 8.0 * h / 9.0,
            &(y + h
                * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 + 64448.0 / 6561.0 * k3
                    - 212.0 / 729.0 * k4)),
        );
        let k6 = flow.eval(
            t + h,
            &(y + h
                * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 + 46732.0 / 5247.0 * k3
                    + 49.0 / 176.0 * k4
                    - 5103.0 / 18656.0 * k5)),
        );
        let y5 = y + h
            * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 + 125.0 / 192.0 * k4
                - 2187.0 / 6784.0 * k5
                + 11.0 / 84.0 * k6);
        let k7 = flow.eval(t + h, &y5);
        let y4 = y + h
            * (5179.0 / 57600.0 * k1 + 7571.0 / 16695.0 * k3 + 393.0 / 640.0 * k4
                - 92097.0 / 339200.0 * k5
                + 187.0 / 2100.0 * k6
                + 1.0 / 40.0 * k7);
        let err = (y5 - y4).amax();
        let tol = ATOL + RTOL * y5.amax().max(y.amax());
        if err <= tol || h < 1e-12 {
            t += h;
            y = y5;
            k1 = k7;
        }
        let factor = if err > 0.0 {
            0.9 * (tol / err).powf(0.2)
        } else {
            5.0
        };
        h *= factor.clamp(0.2, 5.0);
    }
    y
}
