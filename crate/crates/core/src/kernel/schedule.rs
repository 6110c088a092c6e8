//! Hyperfine-field switching and the resulting nuclear current phases.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::nuclear::TransitionLine;

/// Intervals (tau_off, tau_on) during which the hyperfine field is off.
///
/// After each on-event the field points along its initial direction.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SwitchSchedule {
    pub events: Vec<(f64, f64)>,
}

impl SwitchSchedule {
    pub fn static_field() -> Self {
        Self::default()
    }

    pub fn single(tau_off: f64, tau_on: f64) -> Result<Self> {
        Self::new(vec![(tau_off, tau_on)])
    }

    pub fn new(events: Vec<(f64, f64)>) -> Result<Self> {
        let s = Self { events };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let mut last_on = f64::NEG_INFINITY;
        for &(off, on) in &self.events {
            if !off.is_finite() || !on.is_finite() {
                return Err(invalid("switch times must be finite"));
            }
            if on < off {
                return Err(invalid(format!("field back on at {on} before it went off at {off}")));
            }
            if off <= last_on {
                return Err(invalid(format!("switch interval starting at {off} overlaps the previous one")));
            }
            last_on = on;
        }
        Ok(())
    }

    pub fn is_static(&self) -> bool {
        self.events.iter().all(|(off, on)| on == off)
    }

    /// Total time the field has been on up to `tau`, counted from τ = 0.
    pub fn phase_time(&self, tau: f64) -> f64 {
        let off: f64 = self
            .events
            .iter()
            .map(|&(a, b)| (tau.min(b) - a).max(0.0))
            .sum();
        tau - off
    }

    /// True when the field is off on the open interval just after `tau`.
    pub fn is_off_after(&self, tau: f64) -> bool {
        self.events.iter().any(|&(a, b)| a <= tau && tau < b)
    }

    /// Switch instants in time order.
    pub fn instants(&self) -> Vec<f64> {
        self.events.iter().flat_map(|&(a, b)| [a, b]).collect()
    }

    /// Total off duration.
    pub fn total_off(&self) -> f64 {
        self.events.iter().map(|(a, b)| b - a).sum()
    }
}

/// exp(−iΩ φ(τ) − τ/2) with φ the accumulated field-on time.
///
/// While the field is off the phase is frozen; when it returns the phase
/// resumes from the frozen value.
pub fn current_factor(line: &TransitionLine, tau: f64, schedule: &SwitchSchedule) -> Complex64 {
    phase_factor(line.omega, tau, schedule)
}

pub fn phase_factor(omega: f64, tau: f64, schedule: &SwitchSchedule) -> Complex64 {
    Complex64::new(-0.5 * tau, -omega * schedule.phase_time(tau)).exp()
}

/// Propagator exp(−iΩ(φ(τ) − φ(τ′)) − (τ − τ′)/2) from τ′ to τ.
pub fn propagator(omega: f64, tau: f64, tau_prime: f64, schedule: &SwitchSchedule) -> Complex64 {
    let dphi = schedule.phase_time(tau) - schedule.phase_time(tau_prime);
    Complex64::new(-0.5 * (tau - tau_prime), -omega * dphi).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn static_phase_time_is_identity() {
        let s = SwitchSchedule::static_field();
        assert_eq!(s.phase_time(1.7), 1.7);
        assert_eq!(phase_factor(28.0, 0.0, &s), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn phase_is_frozen_while_off() {
        let s = SwitchSchedule::single(0.5, 0.8).unwrap();
        assert_eq!(s.phase_time(0.3), 0.3);
        assert_eq!(s.phase_time(0.6), 0.5);
        assert_relative_eq!(s.phase_time(1.0), 0.7, epsilon = 1e-15);
        assert!(s.is_off_after(0.5));
        assert!(!s.is_off_after(0.8));
    }

    #[test]
    fn zero_length_window_is_static() {
        let s = SwitchSchedule::single(0.4, 0.4).unwrap();
        assert!(s.is_static());
        for t in [0.1, 0.4, 2.0] {
            assert_eq!(phase_factor(28.0, t, &s), phase_factor(28.0, t, &SwitchSchedule::default()));
        }
    }

    #[test]
    fn overlapping_intervals_rejected() {
        assert!(SwitchSchedule::new(vec![(0.1, 0.5), (0.4, 0.9)]).is_err());
        assert!(SwitchSchedule::new(vec![(0.5, 0.1)]).is_err());
        assert!(SwitchSchedule::new(vec![(0.1, 0.2), (0.3, 0.4)]).is_ok());
    }

    #[test]
    fn summed_pair_vanishes_at_beat_minimum() {
        let w = 28.0;
        let t0 = PI / (2.0 * w);
        let s = SwitchSchedule::single(t0, 2.0 * t0).unwrap();
        for t in [t0 + 1e-3, 1.5 * t0, 2.0 * t0 - 1e-3] {
            let sum = phase_factor(w, t, &s) + phase_factor(-w, t, &s);
            assert!(sum.norm() < 1e-15);
        }
    }
}
