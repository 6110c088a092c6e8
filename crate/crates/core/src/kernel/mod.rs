//! Resonant propagation through a Mössbauer target.

pub mod coupling;
pub mod oracle;
pub mod schedule;
pub mod series;

pub use coupling::{coupling_matrix, coupling_vector, Geometry};
pub use oracle::{bessel_j1, bessel_j1_zero, single_line_oracle};
pub use schedule::{current_factor, phase_factor, propagator, SwitchSchedule};
pub use series::{propagate_delta, propagate_general, Convergence, Propagation, TargetConfig};
