//! The simulated arrangements: a single target, two collinear targets with
//! a shutter, and the two-arm interferometer with delay or storage.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::field::{intensity, FieldEnvelope, PolVector, TimeGrid};
use crate::kernel::Convergence;

pub mod scheme1;
pub mod scheme2;
pub mod single;

pub use scheme1::{run_scheme1, Scheme1Config};
pub use scheme2::{
    alpha_beta_of_delay, run_scheme2, storage_delay_equivalence, DelayMode, EquivalenceReport, Scheme2Config,
};
pub use single::run_single_target;

/// Intensity traces recorded at one place in a setup.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Spectrum {
    pub name: String,
    pub total: Option<Vec<f64>>,
    pub sigma: Option<Vec<f64>>,
    pub pi: Option<Vec<f64>>,
    pub det1: Option<Vec<f64>>,
    pub det2: Option<Vec<f64>>,
    /// Complex field whose components are written alongside the intensities.
    pub field: Option<Vec<PolVector>>,
}

impl Spectrum {
    /// Total and per-polarization intensity of a field, plus the field itself.
    pub fn from_field(name: &str, field: &FieldEnvelope) -> Self {
        let v = field.values();
        Self {
            name: name.to_string(),
            total: Some(intensity(field)),
            sigma: Some(v.iter().map(|x| x.sigma.norm_sqr()).collect()),
            pi: Some(v.iter().map(|x| x.pi.norm_sqr()).collect()),
            det1: None,
            det2: None,
            field: Some(v.to_vec()),
        }
    }

    fn traces_mut(&mut self) -> [&mut Option<Vec<f64>>; 5] {
        [&mut self.total, &mut self.sigma, &mut self.pi, &mut self.det1, &mut self.det2]
    }

    /// Divides intensities by `scale` and fields by √scale.
    pub fn rescale(&mut self, scale: f64) {
        for t in self.traces_mut().into_iter().flatten() {
            t.iter_mut().for_each(|x| *x /= scale);
        }
        if let Some(f) = &mut self.field {
            let s = 1.0 / scale.sqrt();
            f.iter_mut().for_each(|v| *v = *v * s);
        }
    }

    pub fn peak(&mut self) -> f64 {
        self.traces_mut()
            .into_iter()
            .flatten()
            .flat_map(|t| t.iter().copied())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub convergence: BTreeMap<String, Convergence>,
    pub metrics: BTreeMap<String, f64>,
    /// Analysis windows in dimensionless time.
    pub windows: BTreeMap<String, (f64, f64)>,
    pub notes: Vec<String>,
}

impl Diagnostics {
    pub fn converged(&self) -> bool {
        self.convergence.values().all(|c| c.converged)
    }

    pub fn metric(&self, key: &str) -> Option<f64> {
        self.metrics.get(key).copied()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub grid: TimeGrid,
    pub spectra: Vec<Spectrum>,
    pub diagnostics: Diagnostics,
}

impl SpectrumResult {
    pub fn spectrum(&self, name: &str) -> Option<&Spectrum> {
        self.spectra.iter().find(|s| s.name == name)
    }

    /// Rescales every spectrum by the largest intensity found in any of them.
    pub fn normalize_peak(&mut self) {
        let peak = self.spectra.iter_mut().map(|s| s.peak()).fold(0.0, f64::max);
        if peak > 0.0 {
            self.spectra.iter_mut().for_each(|s| s.rescale(peak));
        }
    }
}
