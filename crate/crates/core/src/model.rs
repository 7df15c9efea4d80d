//! Domain types shared by every other module: the cycle parameter set,
//! bath and process tags, moment states, and the effective bath
//! temperature.
//!
//! Conventions: k_B = 1 (temperatures are energies), hbar is an explicit
//! parameter so the classical limit can be probed numerically, and
//! omega_h > omega_c (compression raises the frequency).

use crate::{Error, Result};

/// Full physical and protocol parameterization of one Otto cycle.
///
/// The cycle runs compression -> hot isochore -> expansion -> cold
/// isochore, with the compression start as the time origin. Durations may
/// be zero (the corresponding stroke degenerates to the identity map).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleParams {
    /// Working-fluid mass.
    pub mass: f64,
    /// Heat conductance gamma of the attached bath.
    pub gamma: f64,
    /// Angular frequency during the hot isochore.
    pub omega_h: f64,
    /// Angular frequency during the cold isochore.
    pub omega_c: f64,
    /// Hot bath temperature (energy units, k_B = 1).
    pub temp_h: f64,
    /// Cold bath temperature (energy units).
    pub temp_c: f64,
    /// Reduced Planck constant; ignored by classical-bath computations.
    pub hbar: f64,
    /// Duration of the adiabatic compression.
    pub tau_ch: f64,
    /// Duration of the hot isochore.
    pub tau_h: f64,
    /// Duration of the adiabatic expansion.
    pub tau_hc: f64,
    /// Duration of the cold isochore.
    pub tau_c: f64,
}

impl CycleParams {
    /// Total cycle period.
    pub fn tau_cyc(&self) -> f64 {
        self.tau_ch + self.tau_h + self.tau_hc + self.tau_c
    }

    /// Inverse hot temperature.
    pub fn beta_h(&self) -> f64 {
        1.0 / self.temp_h
    }

    /// Inverse cold temperature.
    pub fn beta_c(&self) -> f64 {
        1.0 / self.temp_c
    }

    /// Checks every parameter invariant, returning the set unchanged on
    /// success and a descriptive error naming the first failed invariant
    /// otherwise.
    ///
    /// Library computations accept degenerate sets (e.g. omega_h =
    /// omega_c) so equilibrium cycles remain representable; this is the
    /// strict gate applied at tool boundaries.
    pub fn validate(self) -> Result<Self> {
        fn finite(v: f64, name: &str) -> Result<()> {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParams(format!("{name} must be finite")))
            }
        }
        for (v, name) in [
            (self.mass, "mass"),
            (self.gamma, "gamma"),
            (self.omega_h, "omega_h"),
            (self.omega_c, "omega_c"),
            (self.temp_h, "temp_h"),
            (self.temp_c, "temp_c"),
            (self.hbar, "hbar"),
            (self.tau_ch, "tau_ch"),
            (self.tau_h, "tau_h"),
            (self.tau_hc, "tau_hc"),
            (self.tau_c, "tau_c"),
        ] {
            finite(v, name)?;
        }
        if self.mass <= 0.0 {
            return Err(Error::InvalidParams("mass must be positive".into()));
        }
        if self.gamma < 0.0 {
            return Err(Error::InvalidParams(
                "gamma must be nonnegative".into(),
            ));
        }
        if self.omega_h <= 0.0 || self.omega_c <= 0.0 {
            return Err(Error::InvalidParams(
                "frequencies must be positive".into(),
            ));
        }
        if self.temp_h <= 0.0 || self.temp_c <= 0.0 {
            return Err(Error::InvalidParams(
                "temperatures must be positive".into(),
            ));
        }
        if self.hbar < 0.0 {
            return Err(Error::InvalidParams("hbar must be nonnegative".into()));
        }
        if self.tau_ch < 0.0 || self.tau_h < 0.0 || self.tau_hc < 0.0 || self.tau_c < 0.0 {
            return Err(Error::InvalidParams(
                "durations must be nonnegative".into(),
            ));
        }
        if self.tau_cyc() <= 0.0 {
            return Err(Error::InvalidParams(
                "total cycle time must be positive".into(),
            ));
        }
        if self.omega_h <= self.omega_c {
            return Err(Error::InvalidParams(
                "omega_h must exceed omega_c".into(),
            ));
        }
        Ok(self)
    }
}

/// Treatment of the heat bath attached during isochores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BathKind {
    /// Lindblad bath; moment dynamics at the effective temperature.
    Quantum,
    /// Fokker-Planck (Kramers) bath at the bare temperature.
    Classical,
}

impl BathKind {
    pub fn label(self) -> &'static str {
        match self {
            BathKind::Quantum => "quantum",
            BathKind::Classical => "classical",
        }
    }
}

/// The four strokes, in cycle order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProcessTag {
    Compression,
    HotIsochore,
    Expansion,
    ColdIsochore,
}

/// Sign-pattern classification of the cycle's mean operation.
///
/// With Q_h = H(t3) - H(t2) and Q_c = H(t4) - H(t5), an engine has
/// <W> > 0, <Q_h> > 0, <Q_c> > 0 and a refrigerator <W> < 0, <Q_h> < 0,
/// <Q_c> < 0 (it absorbs from the cold bath, so the dumped cold heat is
/// negative). Everything else heats one of the baths at the expense of
/// work.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MachineType {
    Engine,
    Refrigerator,
    Heater,
}

impl MachineType {
    pub fn classify(mean_w: f64, mean_qh: f64, mean_qc: f64) -> Self {
        if mean_w > 0.0 && mean_qh > 0.0 && mean_qc > 0.0 {
            MachineType::Engine
        } else if mean_w < 0.0 && mean_qh < 0.0 && mean_qc < 0.0 {
            MachineType::Refrigerator
        } else {
            MachineType::Heater
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            MachineType::Engine => "engine",
            MachineType::Refrigerator => "refrigerator",
            MachineType::Heater => "heater",
        }
    }
}

/// First moments (<H>, <L>, <D>) of a Gaussian working-fluid state,
/// together with the frequency omega at which the L and D bases are
/// expressed and the bath context that fixes the uncertainty floor.
///
/// L and D are omega-dependent operators, so a state cannot be
/// re-expressed at a different frequency; strokes update omega and the
/// moments jointly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentState {
    pub h: f64,
    pub l: f64,
    pub d: f64,
    pub omega: f64,
    pub bath: BathKind,
}

impl MomentState {
    /// The lower bound on h^2 - l^2 - d^2: zero for a classical state
    /// (Cauchy-Schwarz), (hbar*omega/2)^2 for a quantum state, with
    /// equality only in the ground state.
    pub fn floor(&self, hbar: f64) -> f64 {
        match self.bath {
            BathKind::Quantum => (0.5 * hbar * self.omega).powi(2),
            BathKind::Classical => 0.0,
        }
    }

    /// h^2 - l^2 - d^2 minus the floor; nonnegative for physical states.
    pub fn floor_excess(&self, hbar: f64) -> f64 {
        self.h * self.h - self.l * self.l - self.d * self.d - self.floor(hbar)
    }

    /// Mean kinetic energy (h + l) / 2.
    pub fn kinetic(&self) -> f64 {
        0.5 * (self.h + self.l)
    }

    /// Mean potential energy (h - l) / 2.
    pub fn potential(&self) -> f64 {
        0.5 * (self.h - self.l)
    }
}

/// Hyperbolic cotangent, accurate over the full range.
///
/// coth(x) = 1 + 2/(e^{2x} - 1); the expm1 form avoids cancellation for
/// small |x| and saturates cleanly to +-1 for large |x|.
pub fn coth(x: f64) -> f64 {
    1.0 + 2.0 / f64::exp_m1(2.0 * x)
}

/// x * coth(x), continuously extended to 1 at x = 0. Even in x and >= 1.
pub fn xcoth(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x + 2.0 * x / f64::exp_m1(2.0 * x)
    }
}

/// Effective temperature of a quantum bath seen by an oscillator at
/// frequency omega: (hbar*omega/2) * coth(hbar*omega / (2*temp)).
///
/// Returns the bare temperature in the classical limit hbar = 0, and is
/// bounded below by the zero-point energy hbar*omega/2.
pub fn effective_temperature(omega: f64, temp: f64, hbar: f64) -> f64 {
    if hbar == 0.0 {
        return temp;
    }
    let x = 0.5 * hbar * omega / temp;
    temp * xcoth(x)
}
