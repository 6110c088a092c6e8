//! Two-component (σ, π) polarization algebra and time-gridded field
//! envelopes.
//!
//! σ is x-polarization and π is z-polarization for a beam along y.
//! Circular basis: e± = (eσ ± i·eπ)/√2.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub mod analysis;
pub mod elements;

pub use analysis::{beat_contrast, fringe_shift, fringe_shift_with, visibility};
pub use elements::{
    beam_splitter, intensity, mirror, project, project_onto, time_delay, time_gate, time_gate_tau,
};

/// 2×2 complex matrix acting on (σ, π), row-major.
pub type Jones = [[Complex64; 2]; 2];

pub const ZERO_JONES: Jones = [[Complex64::new(0.0, 0.0); 2]; 2];

pub fn apply(m: &Jones, v: PolVector) -> PolVector {
    PolVector {
        sigma: m[0][0] * v.sigma + m[0][1] * v.pi,
        pi: m[1][0] * v.sigma + m[1][1] * v.pi,
    }
}

pub fn jones_add(a: &Jones, b: &Jones) -> Jones {
    let mut out = *a;
    for (row, brow) in out.iter_mut().zip(b) {
        for (x, y) in row.iter_mut().zip(brow) {
            *x += y;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PolVector {
    pub sigma: Complex64,
    pub pi: Complex64,
}

impl PolVector {
    pub const ZERO: PolVector = PolVector {
        sigma: Complex64::new(0.0, 0.0),
        pi: Complex64::new(0.0, 0.0),
    };

    pub fn new(sigma: Complex64, pi: Complex64) -> Self {
        Self { sigma, pi }
    }

    pub fn real(sigma: f64, pi: f64) -> Self {
        Self::new(Complex64::new(sigma, 0.0), Complex64::new(pi, 0.0))
    }

    pub fn sigma() -> Self {
        Self::real(1.0, 0.0)
    }

    pub fn pi() -> Self {
        Self::real(0.0, 1.0)
    }

    /// e+ = (eσ + i eπ)/√2
    pub fn circular_plus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::new(Complex64::new(s, 0.0), Complex64::new(0.0, s))
    }

    /// e− = (eσ − i eπ)/√2
    pub fn circular_minus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::new(Complex64::new(s, 0.0), Complex64::new(0.0, -s))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.sigma.norm_sqr() + self.pi.norm_sqr()
    }

    /// Hermitian product ⟨self|other⟩.
    pub fn inner(&self, other: &PolVector) -> Complex64 {
        self.sigma.conj() * other.sigma + self.pi.conj() * other.pi
    }

    /// Components in the circular basis, (c+, c−) with self = c+ e+ + c− e−.
    pub fn to_circular(&self) -> (Complex64, Complex64) {
        (Self::circular_plus().inner(self), Self::circular_minus().inner(self))
    }

    pub fn from_circular(plus: Complex64, minus: Complex64) -> Self {
        Self::circular_plus() * plus + Self::circular_minus() * minus
    }

    pub fn is_zero(&self) -> bool {
        self.sigma == Complex64::new(0.0, 0.0) && self.pi == Complex64::new(0.0, 0.0)
    }
}

impl Add for PolVector {
    type Output = PolVector;
    fn add(self, rhs: PolVector) -> PolVector {
        PolVector::new(self.sigma + rhs.sigma, self.pi + rhs.pi)
    }
}

impl AddAssign for PolVector {
    fn add_assign(&mut self, rhs: PolVector) {
        self.sigma += rhs.sigma;
        self.pi += rhs.pi;
    }
}

impl Sub for PolVector {
    type Output = PolVector;
    fn sub(self, rhs: PolVector) -> PolVector {
        PolVector::new(self.sigma - rhs.sigma, self.pi - rhs.pi)
    }
}

impl Neg for PolVector {
    type Output = PolVector;
    fn neg(self) -> PolVector {
        PolVector::new(-self.sigma, -self.pi)
    }
}

impl Mul<Complex64> for PolVector {
    type Output = PolVector;
    fn mul(self, rhs: Complex64) -> PolVector {
        PolVector::new(self.sigma * rhs, self.pi * rhs)
    }
}

impl Mul<f64> for PolVector {
    type Output = PolVector;
    fn mul(self, rhs: f64) -> PolVector {
        PolVector::new(self.sigma * rhs, self.pi * rhs)
    }
}

/// Which linear polarization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Sigma,
    Pi,
}

/// Uniform grid in dimensionless time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub tau_start: f64,
    pub tau_end: f64,
    pub step: f64,
    pub samples: usize,
    /// Converts tau to nanoseconds: t = tau · lifetime.
    pub lifetime_ns: f64,
}

impl TimeGrid {
    pub const DEFAULT_STEP: f64 = 1e-3;
    pub const DEFAULT_END: f64 = 3.55;

    pub fn new(tau_start: f64, tau_end: f64, step: f64) -> Result<Self> {
        Self::with_lifetime(tau_start, tau_end, step, 141.0)
    }

    pub fn with_lifetime(tau_start: f64, tau_end: f64, step: f64, lifetime_ns: f64) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(invalid(format!("grid step must be > 0, got {step}")));
        }
        if !(tau_end >= tau_start) || !tau_start.is_finite() || !tau_end.is_finite() {
            return Err(invalid(format!("grid span [{tau_start}, {tau_end}] is empty")));
        }
        if !(lifetime_ns > 0.0) {
            return Err(invalid("lifetime must be positive"));
        }
        let samples = ((tau_end - tau_start) / step + 1e-9).floor() as usize + 1;
        Ok(Self { tau_start, tau_end, step, samples, lifetime_ns })
    }

    /// Grid on [start, end] whose step is the largest value ≤ `max_step`
    /// that divides `delay` exactly.
    pub fn aligned(tau_start: f64, tau_end: f64, max_step: f64, delay: f64, lifetime_ns: f64) -> Result<Self> {
        if !(delay >= 0.0) {
            return Err(invalid(format!("delay must be >= 0, got {delay}")));
        }
        let step = if delay > 0.0 {
            delay / (delay / max_step).ceil()
        } else {
            max_step
        };
        Self::with_lifetime(tau_start, tau_end, step, lifetime_ns)
    }

    pub fn tau(&self, n: usize) -> f64 {
        self.tau_start + n as f64 * self.step
    }

    pub fn t_ns(&self, n: usize) -> f64 {
        self.tau(n) * self.lifetime_ns
    }

    pub fn taus(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.samples).map(|n| self.tau(n))
    }

    pub fn last_tau(&self) -> f64 {
        self.tau(self.samples - 1)
    }

    /// Index of a sample located exactly (to rounding) at `tau`.
    pub fn index_of(&self, tau: f64) -> Option<usize> {
        let x = (tau - self.tau_start) / self.step;
        let n = x.round();
        if n < 0.0 || (x - n).abs() > 1e-6 || n as usize >= self.samples {
            None
        } else {
            Some(n as usize)
        }
    }

    /// Half-open index range of samples with tau in [a, b].
    pub fn window(&self, a: f64, b: f64) -> std::ops::Range<usize> {
        let lo = ((a - self.tau_start) / self.step - 1e-9).ceil().max(0.0);
        let hi = if b.is_infinite() {
            self.samples as f64
        } else {
            ((b - self.tau_start) / self.step + 1e-9).floor() + 1.0
        };
        let lo = (lo as usize).min(self.samples);
        let hi = (hi.max(0.0) as usize).min(self.samples);
        lo..hi.max(lo)
    }

    pub fn check_same(&self, other: &TimeGrid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self::new(0.0, Self::DEFAULT_END, Self::DEFAULT_STEP).unwrap()
    }
}

/// A δ(τ − tau) component carried symbolically alongside the gridded values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Impulse {
    pub tau: f64,
    pub pol: PolVector,
}

/// Slowly varying (σ, π) amplitude sampled on a grid, plus any δ-like
/// prompt pulses.
///
/// `breaks` lists sample indices where the envelope jumps: sample `b` holds
/// the right limit and the interval before it belongs to the left piece.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldEnvelope {
    grid: TimeGrid,
    values: Vec<PolVector>,
    impulses: Vec<Impulse>,
    breaks: Vec<usize>,
}

impl FieldEnvelope {
    pub fn zeros(grid: TimeGrid) -> Self {
        Self {
            grid,
            values: vec![PolVector::ZERO; grid.samples],
            impulses: Vec::new(),
            breaks: Vec::new(),
        }
    }

    pub fn from_values(grid: TimeGrid, values: Vec<PolVector>) -> Result<Self> {
        if values.len() != grid.samples {
            return Err(invalid(format!(
                "{} values for a grid of {} samples",
                values.len(),
                grid.samples
            )));
        }
        Ok(Self { grid, values, impulses: Vec::new(), breaks: Vec::new() })
    }

    pub fn from_fn(grid: TimeGrid, f: impl Fn(f64) -> PolVector) -> Self {
        let values = grid.taus().map(f).collect();
        Self { grid, values, impulses: Vec::new(), breaks: Vec::new() }
    }

    /// A pure δ pulse at `tau` with polarization `pol`.
    pub fn impulse(grid: TimeGrid, pol: PolVector, tau: f64) -> Result<Self> {
        let mut f = Self::zeros(grid);
        f.add_impulse(Impulse { tau, pol })?;
        Ok(f)
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[PolVector] {
        &self.values
    }

    pub fn impulses(&self) -> &[Impulse] {
        &self.impulses
    }

    pub fn breaks(&self) -> &[usize] {
        &self.breaks
    }

    pub(crate) fn parts_mut(&mut self) -> (&mut Vec<PolVector>, &mut Vec<Impulse>, &mut Vec<usize>) {
        (&mut self.values, &mut self.impulses, &mut self.breaks)
    }

    pub fn add_impulse(&mut self, imp: Impulse) -> Result<()> {
        let idx = self.grid.index_of(imp.tau).ok_or(Error::ImpulseOffGrid(imp.tau))?;
        let tau = self.grid.tau(idx);
        match self.impulses.iter_mut().find(|i| self.grid.index_of(i.tau) == Some(idx)) {
            Some(existing) => existing.pol += imp.pol,
            None => self.impulses.push(Impulse { tau, pol: imp.pol }),
        }
        self.impulses.sort_by(|a, b| a.tau.partial_cmp(&b.tau).unwrap());
        Ok(())
    }

    /// Marks a discontinuity at sample `index`.
    pub fn add_break(&mut self, index: usize) {
        if index > 0 && index < self.grid.samples {
            if let Err(pos) = self.breaks.binary_search(&index) {
                self.breaks.insert(pos, index);
            }
        }
    }

    pub fn map_values(&self, f: impl Fn(PolVector) -> PolVector) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| f(*v)).collect(),
            impulses: self
                .impulses
                .iter()
                .map(|i| Impulse { tau: i.tau, pol: f(i.pol) })
                .collect(),
            breaks: self.breaks.clone(),
        }
    }

    /// Pointwise linear combination a·self + b·other, impulses included.
    pub fn combine(&self, a: Complex64, other: &FieldEnvelope, b: Complex64) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| *x * a + *y * b)
            .collect();
        let mut out = Self { grid: self.grid, values, impulses: Vec::new(), breaks: Vec::new() };
        for imp in &self.impulses {
            out.add_impulse(Impulse { tau: imp.tau, pol: imp.pol * a })?;
        }
        for imp in &other.impulses {
            out.add_impulse(Impulse { tau: imp.tau, pol: imp.pol * b })?;
        }
        for &b in self.breaks.iter().chain(&other.breaks) {
            out.add_break(b);
        }
        Ok(out)
    }

    pub fn sigma(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.values.iter().map(|v| v.sigma)
    }

    pub fn pi(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.values.iter().map(|v| v.pi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn grid_sample_count() {
        let g = TimeGrid::new(0.0, 3.55, 1e-3).unwrap();
        assert_eq!(g.samples, 3551);
        let g = TimeGrid::new(0.0, 1.0, 0.3).unwrap();
        assert_eq!(g.samples, 4);
        assert!(TimeGrid::new(0.0, 1.0, 0.0).is_err());
        assert!(TimeGrid::new(1.0, 0.0, 0.1).is_err());
    }

    #[test]
    fn grid_time_conversion() {
        let g = TimeGrid::default();
        assert_eq!(g.t_ns(1000), g.tau(1000) * 141.0);
    }

    #[test]
    fn aligned_grid_divides_delay() {
        let d = std::f64::consts::PI / 56.0;
        let g = TimeGrid::aligned(0.0, 3.55, 1e-3, d, 141.0).unwrap();
        assert!(g.step <= 1e-3);
        let k = d / g.step;
        assert!((k - k.round()).abs() < 1e-9);
        assert!(g.index_of(d).is_some());
    }

    #[test]
    fn window_indices() {
        let g = TimeGrid::new(0.0, 1.0, 0.1).unwrap();
        assert_eq!(g.window(0.2, 0.5), 2..6);
        assert_eq!(g.window(0.0, f64::INFINITY), 0..11);
        assert_eq!(g.window(2.0, 3.0), 11..11);
    }

    #[test]
    fn circular_basis_is_unit_and_orthogonal() {
        assert_relative_eq!(PolVector::circular_plus().norm_sqr(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(PolVector::circular_minus().norm_sqr(), 1.0, epsilon = 1e-15);
        assert!(PolVector::circular_plus().inner(&PolVector::circular_minus()).norm() < 1e-16);
    }

    #[test]
    fn impulses_merge_on_same_sample() {
        let g = TimeGrid::new(0.0, 1.0, 0.1).unwrap();
        let mut f = FieldEnvelope::impulse(g, PolVector::sigma(), 0.3).unwrap();
        f.add_impulse(Impulse { tau: 0.30000000001, pol: PolVector::pi() }).unwrap();
        assert_eq!(f.impulses().len(), 1);
        assert!(FieldEnvelope::impulse(g, PolVector::sigma(), 0.35).is_err());
    }

    fn arb_pol() -> impl Strategy<Value = PolVector> {
        (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
            .prop_map(|(a, b, c, d)| PolVector::new(Complex64::new(a, b), Complex64::new(c, d)))
    }

    proptest! {
        #[test]
        fn circular_round_trip(v in arb_pol()) {
            let (p, m) = v.to_circular();
            let back = PolVector::from_circular(p, m);
            prop_assert!((back - v).norm_sqr().sqrt() < 1e-14);
        }
    }
}
