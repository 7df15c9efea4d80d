//! Closed-form quasistatic limits of the cycle statistics, the Otto
//! efficiency and coefficient of performance, and the inequality scan
//! functions used to compare quantum and classical precision.
//!
//! In the quasistatic limit the working fluid is thermal at every instant,
//! the strokes decorrelate completely across isochores, and everything is
//! a function of the occupation difference
//!
//! ```text
//! <n_h - n_c> = [coth(x_h) - coth(x_c)] / 2,
//! x_h = hbar*omega_h / (2 T_h),   x_c = hbar*omega_c / (2 T_c),
//! ```
//!
//! and of the combined occupation fluctuation
//! (coth^2 x_h + coth^2 x_c - 2)/4. The classical forms follow from the
//! substitutions hbar<n_h - n_c> -> T_h/omega_h - T_c/omega_c and
//! hbar^2(Dn_h^2 + Dn_c^2) -> (T_h/omega_h)^2 + (T_c/omega_c)^2.
//!
//! All four relative errors coincide in this limit and obey
//! eps = 1 + 2U/<Sigma> with U = z coth z >= 1, z = x_c - x_h, so the
//! classical cycle saturates eps = 1 + 2/<Sigma> and neither cycle breaks
//! the conventional eps >= 2/<Sigma> bound quasistatically.

use crate::model::{coth, xcoth, BathKind, CycleParams};

/// Quasistatic means, fluctuations, and derived precision measures.
/// Durations play no role: the limit assumes every stroke is slow.
#[derive(Debug, Clone, Copy)]
pub struct QuasistaticStats {
    pub bath: BathKind,
    pub mean_w: f64,
    pub mean_qh: f64,
    pub mean_qc: f64,
    pub mean_sigma: f64,
    pub var_w: f64,
    pub var_qh: f64,
    pub var_qc: f64,
    pub var_sigma: f64,
    /// Common relative error of all four quantities, 1 + 2U/<Sigma>;
    /// absent for a degenerate cycle with zero means.
    pub eps: Option<f64>,
    /// U = z coth z with z = x_c - x_h; U = 1 for the classical fluid.
    pub u_factor: f64,
    /// Otto efficiency 1 - omega_c/omega_h.
    pub eta_otto: f64,
    /// Cooling coefficient of performance omega_c/(omega_h - omega_c).
    pub delta_otto: f64,
    /// Carnot efficiency 1 - T_c/T_h.
    pub eta_carnot: f64,
}

/// Quasistatic efficiency of the engine regime; depends on the
/// frequencies alone.
pub fn otto_efficiency(omega_h: f64, omega_c: f64) -> f64 {
    1.0 - omega_c / omega_h
}

/// Quasistatic coefficient of performance of the refrigerator regime.
/// Diverges (returns +inf) as omega_c -> omega_h.
pub fn cooling_cop(omega_h: f64, omega_c: f64) -> f64 {
    omega_c / (omega_h - omega_c)
}

/// Quasistatic statistics of one cycle configuration.
pub fn quasistatic_stats(params: &CycleParams, bath: BathKind) -> QuasistaticStats {
    let (wh, wc) = (params.omega_h, params.omega_c);
    let (th, tc) = (params.temp_h, params.temp_c);
    // mean scale d and fluctuation scale f such that
    //   <W> = (wh - wc) d,  Var W = (wh - wc)^2 f,  etc.
    let (d, f, sigma, u_factor) = match bath {
        BathKind::Quantum => {
            let xh = 0.5 * params.hbar * wh / th;
            let xc = 0.5 * params.hbar * wc / tc;
            let ndiff = 0.5 * (coth(xh) - coth(xc));
            let dn2 = 0.25 * (coth(xh) * coth(xh) + coth(xc) * coth(xc) - 2.0);
            (
                params.hbar * ndiff,
                params.hbar * params.hbar * dn2,
                2.0 * (xc - xh) * ndiff,
                xcoth(xc - xh),
            )
        }
        BathKind::Classical => {
            let (a, b) = (th / wh, tc / wc);
            ((a - b), (a * a + b * b), (wc / tc - wh / th) * (a - b), 1.0)
        }
    };
    let eps = if sigma == 0.0 {
        None
    } else {
        Some(1.0 + 2.0 * u_factor / sigma)
    };
    QuasistaticStats {
        bath,
        mean_w: (wh - wc) * d,
        mean_qh: wh * d,
        mean_qc: wc * d,
        mean_sigma: sigma,
        var_w: (wh - wc) * (wh - wc) * f,
        var_qh: wh * wh * f,
        var_qc: wc * wc * f,
        var_sigma: (wh / th - wc / tc) * (wh / th - wc / tc) * f,
        eps,
        u_factor,
        eta_otto: otto_efficiency(wh, wc),
        delta_otto: cooling_cop(wh, wc),
        eta_carnot: 1.0 - tc / th,
    }
}

/// g(z) = z - ln(z + sqrt(1 + z^2)); nonnegative for z >= 0, with
/// g(0) = 0. Positivity of g is what bounds the quantum occupation
/// fluctuation by its classical counterpart.
pub fn inequality_g(z: f64) -> f64 {
    z - (z + z.hypot(1.0)).ln()
}

/// k(x) = coth(x) - 1/x, evaluated by series below |x| = 0.1 where the
/// two terms cancel.
fn coth_minus_inv(x: f64) -> f64 {
    if x.abs() < 0.1 {
        let x2 = x * x;
        x * (1.0 / 3.0
            + x2 * (-1.0 / 45.0
                + x2 * (2.0 / 945.0 + x2 * (-1.0 / 4725.0 + x2 * (2.0 / 93555.0)))))
    } else {
        coth(x) - 1.0 / x
    }
}

/// k(x) - k(y) with k(x) = coth(x) - 1/x. Nonnegative whenever x >= y > 0
/// because k is increasing; monotonicity of k is what orders the quantum
/// and classical mean outputs.
pub fn inequality_kdiff(x: f64, y: f64) -> f64 {
    coth_minus_inv(x) - coth_minus_inv(y)
}

/// l(x, y) = (coth^2 x + coth^2 y - 2)(x - y)^2
///         - (x^2 + y^2)(coth x - coth y)^2.
///
/// Nonnegativity of l is the (conjectured) statement that the quasistatic
/// quantum relative error dominates the classical one. Near the diagonal
/// the direct expression cancels to zero quadratically, so a series in
/// (x - y) around the midpoint is used for |x - y| < 1e-6.
pub fn inequality_l(x: f64, y: f64) -> f64 {
    let diff = x - y;
    if diff == 0.0 {
        return 0.0;
    }
    if diff.abs() < 1e-6 {
        // l / (x-y)^2 -> 2 csch^2(m) (1 - m^2 csch^2(m)) as y -> x
        let m = 0.5 * (x + y);
        let csch2 = 1.0 / (m.sinh() * m.sinh());
        return diff * diff * 2.0 * csch2 * (1.0 - m * m * csch2);
    }
    let (cx, cy) = (coth(x), coth(y));
    (cx * cx + cy * cy - 2.0) * diff * diff - (x * x + y * y) * (cx - cy) * (cx - cy)
}
