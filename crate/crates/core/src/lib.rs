//! Time-domain simulation of nuclear forward scattering (NFS) of synchrotron
//! x-ray pulses through Mössbauer targets in hyperfine magnetic fields.
//!
//! The field behind a resonant target is computed as a power series in the
//! effective thickness, each order obtained from the previous one by a
//! causal integral over the nuclear transition currents. On top of that
//! solver the crate assembles two quantum-eraser arrangements:
//!
//! * two collinear targets with a fast shutter, where the second target in
//!   Faraday geometry tags the two frequency components with orthogonal
//!   circular polarizations and a linear polarizer erases the tag;
//! * an interferometer with one target per arm, where an external delay or
//!   a storage sequence (field switched off and on) imprints opposite phases
//!   on the two ΔM = 0 components.
//!
//! Units: time is dimensionless, `tau = Γ₀ t`, with Γ₀ the natural width;
//! hyperfine energies and line offsets are in units of Γ₀.

pub mod error;
pub mod experiments;
pub mod field;
pub mod io;
pub mod kernel;
pub mod nuclear;

pub use error::{Error, Result};
pub use num_complex::Complex64;
