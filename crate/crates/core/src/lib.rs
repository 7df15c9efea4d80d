//! Exact statistics of finite-time Otto cycles with a harmonic-oscillator
//! working fluid, for both quantum (Lindblad) and classical (Fokker-Planck)
//! heat baths.
//!
//! Everything is computed at the level of the moment vector
//! phi = (<H>, <L>, <D>, 1), where H is the oscillator energy, L the
//! kinetic-minus-potential component, and D the position-momentum
//! correlation. Each stroke of the cycle acts on phi as a 4x4 matrix
//! exponential, so limit cycles, two-time correlation functions, and the
//! full second-moment statistics of work, heat, and entropy production are
//! available in closed form, with no time stepping.
//!
//! Modules:
//!
//! - [`model`] - parameter set, bath/process tags, moment states, and the
//!   effective bath temperature.
//! - [`generators`] - the 4x4 stroke generators and their exact propagators.
//! - [`limit_cycle`] - one-cycle propagator, cyclic steady state,
//!   divergence detection, and intra-cycle trajectories.
//! - [`correlations`] - two-time correlation functions via the regression
//!   theorem, Gaussian closure, and the exact mean/variance table of the
//!   thermodynamic quantities.
//! - [`quasistatic`] - closed-form quasistatic limits and the inequality
//!   scan functions.
//! - [`montecarlo`] - independent Langevin Monte Carlo estimator of the
//!   same statistics.
//! - [`analysis`] - parameter sweeps, uncertainty-product scans, and the
//!   quantum-advantage crossover time.
//!
//! Units: k_B = 1 throughout, so temperatures carry energy units.

pub mod analysis;
pub mod correlations;
pub mod generators;
pub mod limit_cycle;
pub mod model;
pub mod montecarlo;
pub mod quasistatic;

pub use correlations::{boundary_moments, thermo_stats, BoundaryMoments, ThermoStats};
pub use limit_cycle::{cycle_propagator, phase, steady_state, trajectory, CyclePropagator};
pub use model::{BathKind, CycleParams, MachineType, MomentState, ProcessTag};
pub use montecarlo::{McConfig, McEstimate};
pub use quasistatic::{quasistatic_stats, QuasistaticStats};

/// Errors produced by the cycle computations.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// A parameter set violates one of its invariants.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    /// The one-cycle map has no stable fixed point (spectral radius of the
    /// 3x3 block at or above 1, or non-finite propagator entries).
    #[error("divergent cycle: spectral radius of the one-cycle map is {spectral_radius}")]
    Divergent { spectral_radius: f64 },
    /// A moment state lies below its uncertainty floor.
    #[error("moment state below uncertainty floor: h^2 - l^2 - d^2 = {value:e} < {floor:e}")]
    FloorViolation { value: f64, floor: f64 },
    /// Monte Carlo integration step exceeds the hard stability bound.
    #[error("time step {dt} exceeds hard bound {bound} (0.1 * min(1/omega_h, 4/gamma))")]
    StepTooLarge { dt: f64, bound: f64 },
    /// Too many Monte Carlo trajectories left the finite-state domain.
    #[error("{aborted} of {total} trajectories aborted with non-finite state")]
    McUnstable { aborted: usize, total: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
