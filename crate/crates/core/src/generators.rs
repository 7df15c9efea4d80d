//! Stroke generators and their exact propagators.
//!
//! Each stroke acts linearly on the moment vector phi = (<H>, <L>, <D>, 1).
//! Isochores have a constant generator in time. Adiabats follow the
//! 1/omega-linear ramp, under which omega_dot/omega^2 is a constant u, so
//! switching to the accumulated phase theta = integral of omega dt turns
//! the stroke into a constant-matrix problem as well:
//!
//! ```text
//! d phi / d theta = A(u) phi,
//! A(u) = [[ u, -u,  0, 0],
//!         [-u,  u, -2, 0],
//!         [ 0,  2,  u, 0],
//!         [ 0,  0,  0, 0]].
//! ```
//!
//! Every propagator is therefore a single matrix exponential, evaluated by
//! a scaling-and-squaring Pade algorithm (eigendecomposition is not used:
//! the classical isochore generator becomes defective at gamma = 8*omega).

use nalgebra::Matrix4;

use crate::model::{effective_temperature, BathKind, CycleParams, ProcessTag};
use crate::{Error, Result};

/// Constant generator matrix of one stroke, acting on (H, L, D, 1).
///
/// For isochores the flow variable is time; for adiabats it is the
/// accumulated phase theta. The fourth row is identically zero, so the
/// identity entry of phi is conserved exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Generator {
    pub matrix: Matrix4<f64>,
    pub tag: ProcessTag,
    /// Bath attached during the stroke; `None` for adiabats, which are
    /// bath-independent.
    pub bath: Option<BathKind>,
}

/// Exact map phi(start) -> phi(end) of one stroke.
#[derive(Debug, Clone, PartialEq)]
pub struct StrokePropagator {
    pub matrix: Matrix4<f64>,
    pub tag: ProcessTag,
    /// Integration extent the propagator was built with: time for
    /// isochores, accumulated phase for adiabats. Zero extent is the
    /// identity map.
    pub extent: f64,
}

/// Which isochore a generator belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsochoreSide {
    Hot,
    Cold,
}

/// ln(1 + z) / z, continuously extended to 1 at z = 0.
fn ln1p_over(z: f64) -> f64 {
    if z == 0.0 {
        1.0
    } else {
        f64::ln_1p(z) / z
    }
}

/// Frequency ramp omega(t) = 1 / [1/omega_i + (1/omega_f - 1/omega_i) t / tau].
///
/// The inverse frequency (the effective volume) is linear in t, which
/// makes omega_dot/omega^2 constant over the stroke.
pub fn omega_protocol(omega_i: f64, omega_f: f64, tau: f64, t: f64) -> Result<f64> {
    if !(0.0..=tau).contains(&t) {
        return Err(Error::InvalidParams(format!(
            "protocol time {t} outside [0, {tau}]"
        )));
    }
    if tau == 0.0 {
        return Ok(omega_f);
    }
    Ok(1.0 / (1.0 / omega_i + (1.0 / omega_f - 1.0 / omega_i) * t / tau))
}

/// Constant protocol slope u = omega_dot / omega^2 = (1/omega_i - 1/omega_f) / tau.
pub fn protocol_slope(omega_i: f64, omega_f: f64, tau: f64) -> f64 {
    if omega_i == omega_f {
        0.0
    } else {
        (1.0 / omega_i - 1.0 / omega_f) / tau
    }
}

/// Total accumulated phase of one adiabat,
/// theta = [omega_i*omega_f/(omega_f - omega_i)] * ln(omega_f/omega_i) * tau,
/// continuously extended to omega * tau at equal frequencies.
pub fn adiabat_phase(omega_i: f64, omega_f: f64, tau: f64) -> f64 {
    let z = (omega_f - omega_i) / omega_i;
    omega_f * tau * ln1p_over(z)
}

/// Accumulated phase theta(t) from the stroke start, for 0 <= t <= tau.
pub fn adiabat_phase_partial(omega_i: f64, omega_f: f64, tau: f64, t: f64) -> Result<f64> {
    let omega_t = omega_protocol(omega_i, omega_f, tau, t)?;
    let z = (omega_t - omega_i) / omega_i;
    Ok(omega_t * t * ln1p_over(z))
}

/// Generator A(u) of an adiabat in the phase variable, with
/// u = (1/omega_i - 1/omega_f)/tau. The quantum and classical moment
/// vectors obey the same matrix.
pub fn adiabatic_generator(omega_i: f64, omega_f: f64, tau: f64) -> Generator {
    let u = protocol_slope(omega_i, omega_f, tau);
    let tag = if omega_f >= omega_i {
        ProcessTag::Compression
    } else {
        ProcessTag::Expansion
    };
    Generator {
        matrix: Matrix4::new(
            u, -u, 0.0, 0.0, //
            -u, u, -2.0, 0.0, //
            0.0, 2.0, u, 0.0, //
            0.0, 0.0, 0.0, 0.0,
        ),
        tag,
        bath: None,
    }
}

/// Generator of an isochore at fixed frequency with the bath attached.
///
/// Quantum bath: H relaxes alone at rate gamma/2 toward the effective
/// temperature, while (L, D) rotate at 2*omega and damp at gamma/2.
/// Classical bath: the thermostat acts on the momentum only, so H and L
/// stay coupled with damping gamma/4 and the drive gamma*T/4 enters both.
pub fn isochore_generator(
    params: &CycleParams,
    which: IsochoreSide,
    bath: BathKind,
) -> Generator {
    let (omega, temp, tag) = match which {
        IsochoreSide::Hot => (params.omega_h, params.temp_h, ProcessTag::HotIsochore),
        IsochoreSide::Cold => (params.omega_c, params.temp_c, ProcessTag::ColdIsochore),
    };
    let g = params.gamma;
    let matrix = match bath {
        BathKind::Quantum => {
            let tt = effective_temperature(omega, temp, params.hbar);
            Matrix4::new(
                -0.5 * g, 0.0, 0.0, 0.5 * g * tt, //
                0.0, -0.5 * g, -2.0 * omega, 0.0, //
                0.0, 2.0 * omega, -0.5 * g, 0.0, //
                0.0, 0.0, 0.0, 0.0,
            )
        }
        BathKind::Classical => Matrix4::new(
            -0.25 * g, -0.25 * g, 0.0, 0.25 * g * temp, //
            -0.25 * g, -0.25 * g, -2.0 * omega, 0.25 * g * temp, //
            0.0, 2.0 * omega, -0.25 * g, 0.0, //
            0.0, 0.0, 0.0, 0.0,
        ),
    };
    Generator {
        matrix,
        tag,
        bath: Some(bath),
    }
}

/// Full adiabat propagator over a stroke of duration `tau`: the phase
/// generator exponentiated over the stroke's total accumulated phase.
/// Zero duration degenerates to the identity.
pub fn adiabat_propagator(omega_i: f64, omega_f: f64, tau: f64) -> Result<StrokePropagator> {
    if tau == 0.0 {
        let tag = if omega_f >= omega_i {
            ProcessTag::Compression
        } else {
            ProcessTag::Expansion
        };
        return Ok(StrokePropagator {
            matrix: Matrix4::identity(),
            tag,
            extent: 0.0,
        });
    }
    let gen = adiabatic_generator(omega_i, omega_f, tau);
    stroke_propagator(&gen, adiabat_phase(omega_i, omega_f, tau))
}

/// Exact stroke propagator exp(generator * extent).
///
/// `extent` is time for isochores and accumulated phase for adiabats;
/// zero extent returns the identity. Errors on non-finite input or output
/// entries.
pub fn stroke_propagator(gen: &Generator, extent: f64) -> Result<StrokePropagator> {
    if !extent.is_finite() || extent < 0.0 {
        return Err(Error::InvalidParams(format!(
            "propagator extent must be finite and nonnegative, got {extent}"
        )));
    }
    if extent == 0.0 {
        return Ok(StrokePropagator {
            matrix: Matrix4::identity(),
            tag: gen.tag,
            extent: 0.0,
        });
    }
    if gen.matrix.iter().any(|v| !v.is_finite()) {
        return Err(Error::Divergent {
            spectral_radius: f64::INFINITY,
        });
    }
    let matrix = (gen.matrix * extent).exp();
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(Error::Divergent {
            spectral_radius: f64::INFINITY,
        });
    }
    Ok(StrokePropagator {
        matrix,
        tag: gen.tag,
        extent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MomentState;
    use approx::assert_relative_eq;
    use nalgebra::Vector4;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn base() -> CycleParams {
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

    #[test]
    fn protocol_endpoints_and_midpoint() {
        assert_eq!(omega_protocol(1.0, 1.2, 1.0, 0.0).unwrap(), 1.0);
        assert_relative_eq!(
            omega_protocol(1.0, 1.2, 1.0, 1.0).unwrap(),
            1.2,
            max_relative = 1e-15
        );
        // 1/(1 + (1/1.2 - 1)*0.5) = 12/11
        assert_relative_eq!(
            omega_protocol(1.0, 1.2, 1.0, 0.5).unwrap(),
            12.0 / 11.0,
            max_relative = 1e-15
        );
        assert!(omega_protocol(1.0, 1.2, 1.0, 1.5).is_err());
        assert!(omega_protocol(1.0, 1.2, 1.0, -0.1).is_err());
    }

    #[test]
    fn protocol_slope_is_constant_in_time() {
        let (wi, wf, tau) = (0.7, 2.3, 1.7);
        let u = protocol_slope(wi, wf, tau);
        for k in 0..20 {
            let t = tau * k as f64 / 19.0;
            let w = omega_protocol(wi, wf, tau, t).unwrap();
            // finite-difference omega_dot / omega^2
            let dt = 1e-6;
            if t + dt <= tau {
                let w2 = omega_protocol(wi, wf, tau, t + dt).unwrap();
                assert_relative_eq!((w2 - w) / dt / (w * w), u, max_relative = 1e-4);
            }
        }
    }

    #[test]
    fn adiabatic_generator_slope_values() {
        let gen = adiabatic_generator(1.0, 1.2, 1.0);
        let u = 1.0 - 1.0 / 1.2;
        assert_relative_eq!(gen.matrix[(0, 0)], u, max_relative = 1e-15);
        assert_relative_eq!(gen.matrix[(0, 1)], -u, max_relative = 1e-15);
        assert_eq!(gen.matrix[(1, 2)], -2.0);
        assert_eq!(gen.matrix[(2, 1)], 2.0);
        assert_eq!(gen.tag, ProcessTag::Compression);

        // frozen frequency: pure rotation block
        let frozen = adiabatic_generator(1.0, 1.0, 1.0);
        assert_eq!(frozen.matrix[(0, 0)], 0.0);
        assert_eq!(frozen.matrix[(1, 0)], 0.0);

        // quasistatic limit
        let slow = adiabatic_generator(1.0, 1.2, 1e12);
        assert!(slow.matrix[(0, 0)].abs() < 1e-12);
    }

    #[test]
    fn adiabat_phase_matches_quadrature_and_limit() {
        let (wi, wf, tau) = (1.0, 1.2, 0.7);
        // trapezoid quadrature of omega(t)
        let n = 200_000;
        let mut acc = 0.0;
        for k in 0..n {
            let t0 = tau * k as f64 / n as f64;
            let t1 = tau * (k + 1) as f64 / n as f64;
            let w0 = omega_protocol(wi, wf, tau, t0).unwrap();
            let w1 = omega_protocol(wi, wf, tau, t1).unwrap();
            acc += 0.5 * (w0 + w1) * (t1 - t0);
        }
        assert_relative_eq!(adiabat_phase(wi, wf, tau), acc, max_relative = 1e-9);
        // equal-frequency limit
        assert_relative_eq!(adiabat_phase(2.0, 2.0, 0.7), 1.4, max_relative = 1e-15);
        // symmetric under direction reversal
        assert_relative_eq!(
            adiabat_phase(wi, wf, tau),
            adiabat_phase(wf, wi, tau),
            max_relative = 1e-14
        );
        // partial phase endpoints
        assert_eq!(adiabat_phase_partial(wi, wf, tau, 0.0).unwrap(), 0.0);
        assert_relative_eq!(
            adiabat_phase_partial(wi, wf, tau, tau).unwrap(),
            adiabat_phase(wi, wf, tau),
            max_relative = 1e-14
        );
    }

    #[test]
    fn quantum_isochore_rows() {
        let p = base();
        let gen = isochore_generator(&p, IsochoreSide::Hot, BathKind::Quantum);
        // H row: (-gamma/2, 0, 0, gamma*Ttilde/2) with Ttilde = 0.6*coth(0.3)
        assert_eq!(gen.matrix[(0, 0)], -0.5);
        assert_eq!(gen.matrix[(0, 1)], 0.0);
        assert_eq!(gen.matrix[(0, 2)], 0.0);
        assert_relative_eq!(
            gen.matrix[(0, 3)],
            0.5 * 2.059643058193045,
            max_relative = 1e-14
        );
        // (L, D) rotate at 2*omega_h and damp at gamma/2, decoupled from H
        assert_eq!(gen.matrix[(1, 2)], -2.4);
        assert_eq!(gen.matrix[(2, 1)], 2.4);
        assert_eq!(gen.matrix[(1, 0)], 0.0);
        assert_eq!(gen.matrix[(2, 0)], 0.0);
    }

    #[test]
    fn classical_isochore_rows() {
        let p = base();
        let gen = isochore_generator(&p, IsochoreSide::Hot, BathKind::Classical);
        // drive entries gamma*T/4 = 0.5 in the H and L rows
        assert_eq!(gen.matrix[(0, 3)], 0.5);
        assert_eq!(gen.matrix[(1, 3)], 0.5);
        assert_eq!(gen.matrix[(0, 0)], -0.25);
        assert_eq!(gen.matrix[(0, 1)], -0.25);
        assert_eq!(gen.matrix[(1, 0)], -0.25);
    }

    #[test]
    fn gamma_zero_is_pure_rotation() {
        let p = CycleParams { gamma: 0.0, ..base() };
        for bath in [BathKind::Quantum, BathKind::Classical] {
            let gen = isochore_generator(&p, IsochoreSide::Cold, bath);
            let prop = stroke_propagator(&gen, 0.9).unwrap();
            let phi = Vector4::new(1.3, 0.2, -0.1, 1.0);
            let out = prop.matrix * phi;
            // H conserved, (L, D) norm conserved
            assert_relative_eq!(out[0], phi[0], max_relative = 1e-13);
            assert_relative_eq!(
                out[1] * out[1] + out[2] * out[2],
                phi[1] * phi[1] + phi[2] * phi[2],
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn zero_extent_is_identity() {
        let gen = adiabatic_generator(1.0, 1.2, 0.5);
        let prop = stroke_propagator(&gen, 0.0).unwrap();
        assert_eq!(prop.matrix, Matrix4::identity());
    }

    #[test]
    fn bottom_row_is_exact_identity_row() {
        let p = base();
        for gen in [
            adiabatic_generator(1.0, 1.2, 0.3),
            isochore_generator(&p, IsochoreSide::Hot, BathKind::Quantum),
            isochore_generator(&p, IsochoreSide::Cold, BathKind::Classical),
        ] {
            let prop = stroke_propagator(&gen, 1.7).unwrap();
            assert_eq!(prop.matrix[(3, 0)], 0.0);
            assert_eq!(prop.matrix[(3, 1)], 0.0);
            assert_eq!(prop.matrix[(3, 2)], 0.0);
            assert_eq!(prop.matrix[(3, 3)], 1.0);
        }
    }

    #[test]
    fn quantum_isochore_propagator_keeps_energy_decoupled() {
        // the (H, 1) and (L, D) blocks never mix, so the propagator's
        // cross entries vanish identically
        let p = base();
        let gen = isochore_generator(&p, IsochoreSide::Hot, BathKind::Quantum);
        for extent in [0.3, 1.0, 7.5] {
            let m = stroke_propagator(&gen, extent).unwrap().matrix;
            assert_eq!(m[(0, 1)], 0.0);
            assert_eq!(m[(0, 2)], 0.0);
            assert_eq!(m[(1, 0)], 0.0);
            assert_eq!(m[(2, 0)], 0.0);
        }
    }

    #[test]
    fn quantum_isochore_long_time_reaches_effective_temperature() {
        let p = base();
        let gen = isochore_generator(&p, IsochoreSide::Hot, BathKind::Quantum);
        let prop = stroke_propagator(&gen, 200.0).unwrap();
        let phi = Vector4::new(5.0, 1.0, -2.0, 1.0);
        let out = prop.matrix * phi;
        let tt = effective_temperature(p.omega_h, p.temp_h, p.hbar);
        assert_relative_eq!(out[0], tt, max_relative = 1e-12);
        assert!(out[1].abs() < 1e-12 && out[2].abs() < 1e-12);
    }

    proptest::proptest! {
        #[test]
        fn semigroup_property(
            which in 0usize..3,
            a in 0.0f64..2.5,
            b in 0.0f64..2.5,
        ) {
            let p = base();
            let gen = match which {
                0 => adiabatic_generator(1.0, 1.2, 0.4),
                1 => isochore_generator(&p, IsochoreSide::Hot, BathKind::Quantum),
                _ => isochore_generator(&p, IsochoreSide::Cold, BathKind::Classical),
            };
            let whole = stroke_propagator(&gen, a + b).unwrap().matrix;
            let parts = stroke_propagator(&gen, a).unwrap().matrix
                * stroke_propagator(&gen, b).unwrap().matrix;
            let scale = whole.amax().max(1.0);
            proptest::prop_assert!((whole - parts).amax() / scale < 1e-12);
        }
    }

    #[test]
    fn adiabat_scales_floor_excess_exactly() {
        // h^2 - l^2 - d^2 obeys dQ/dtheta = 2uQ, so the invariant
        // Q * exp(-2 u theta) is conserved and the quantum floor
        // (hbar*omega/2)^2 maps onto itself.
        let mut rng = StdRng::seed_from_u64(42);
        for _ in 0..200 {
            let wi = rng.random_range(0.3..2.0);
            let wf = rng.random_range(0.3..2.0);
            let tau = rng.random_range(0.05..3.0);
            let theta = adiabat_phase(wi, wf, tau);
            let gen = adiabatic_generator(wi, wf, tau);
            let u = protocol_slope(wi, wf, tau);
            let prop = stroke_propagator(&gen, theta).unwrap();
            // random physical quantum state at omega_i
            let hbar = 1.0;
            let floor = (0.5 * hbar * wi).powi(2);
            let l = rng.random_range(-1.0..1.0);
            let d = rng.random_range(-1.0..1.0);
            let h = (floor + l * l + d * d).sqrt() * rng.random_range(1.0..3.0);
            let out = prop.matrix * Vector4::new(h, l, d, 1.0);
            let q_in = h * h - l * l - d * d;
            let q_out = out[0] * out[0] - out[1] * out[1] - out[2] * out[2];
            assert_relative_eq!(
                q_out,
                q_in * (2.0 * u * theta).exp(),
                max_relative = 1e-10
            );
            let state = MomentState {
                h: out[0],
                l: out[1],
                d: out[2],
                omega: wf,
                bath: BathKind::Quantum,
            };
            assert!(state.floor_excess(hbar) >= -1e-9 * state.h * state.h);
        }
    }

    #[test]
    fn isochores_preserve_floor_on_random_states() {
        let mut rng = StdRng::seed_from_u64(7);
        let p = base();
        for _ in 0..200 {
            let bath = if rng.random_bool(0.5) {
                BathKind::Quantum
            } else {
                BathKind::Classical
            };
            let side = if rng.random_bool(0.5) {
                IsochoreSide::Hot
            } else {
                IsochoreSide::Cold
            };
            let omega = match side {
                IsochoreSide::Hot => p.omega_h,
                IsochoreSide::Cold => p.omega_c,
            };
            let floor = match bath {
                BathKind::Quantum => (0.5 * p.hbar * omega).powi(2),
                BathKind::Classical => 0.0,
            };
            let l = rng.random_range(-1.0..1.0);
            let d = rng.random_range(-1.0..1.0);
            let h = (floor + l * l + d * d).sqrt() * rng.random_range(1.0..3.0) + 1e-6;
            let gen = isochore_generator(&p, side, bath);
            let prop = stroke_propagator(&gen, rng.random_range(0.0..5.0)).unwrap();
            let out = prop.matrix * Vector4::new(h, l, d, 1.0);
            let state = MomentState {
                h: out[0],
                l: out[1],
                d: out[2],
                omega,
                bath,
            };
            assert!(
                state.floor_excess(p.hbar) >= -1e-9 * state.h * state.h,
                "floor violated: {state:?}"
            );
        }
    }
}
