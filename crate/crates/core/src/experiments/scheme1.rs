//! Two collinear targets and a fast shutter.
//!
//! Target 1 (field along z) emits the two σ-polarized ΔM = 0 lines. The
//! shutter passes only the nuclear response between t0 and t1, which then
//! crosses target 2 (field along the beam) whose circularly polarized lines
//! sit on the two frequencies and tag them with orthogonal polarizations.
//! Linear polarizers on σ and π behind target 2 read out the tagged field.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{Diagnostics, Spectrum, SpectrumResult};
use crate::error::{invalid, Result};
use crate::field::{beat_contrast, fringe_shift_with, project, time_gate, visibility, Axis, PolVector, TimeGrid};
use crate::kernel::{propagate_delta, propagate_general, TargetConfig};
use crate::nuclear::{matching_field, HyperfineConfig, IsotopeConstants, MatchingCase};

const Z: [f64; 3] = [0.0, 0.0, 1.0];
const BEAM: [f64; 3] = [0.0, 1.0, 0.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scheme1Config {
    pub target1: TargetConfig,
    pub target2: TargetConfig,
    /// Shutter opening (t0, t1) in ns.
    pub shutter_ns: (f64, f64),
    pub matching_case: MatchingCase,
    pub input_pol: PolVector,
    /// Reject a target-2 field more than 0.1 % away from the matching value.
    pub enforce_matching: bool,
    /// Require target 1 along z and target 2 along the beam.
    pub enforce_geometry: bool,
    /// Visibility window in ns; `None` means [t1 + 10 ns, 190 ns].
    pub window_ns: Option<(f64, f64)>,
}

impl Scheme1Config {
    /// Field-driven setup: `b1` on target 1, the matched field on target 2.
    pub fn from_field(b1: f64, case: MatchingCase, xi1: f64, xi2: f64, isotope: &IsotopeConstants) -> Result<Self> {
        let b2 = matching_field(b1, case, isotope)?;
        let t1 = TargetConfig::new(xi1, HyperfineConfig::from_field(b1, Z, isotope)?);
        let t2 = TargetConfig::new(xi2, HyperfineConfig::from_field(b2, BEAM, isotope)?);
        Ok(Self::with_targets(t1, t2, case))
    }

    /// Splittings (ε_g, ε_e) in Γ₀ given directly for both targets; the
    /// matching check is off because rounded splittings rarely satisfy it.
    pub fn from_splittings(eps1: (f64, f64), eps2: (f64, f64), case: MatchingCase, xi1: f64, xi2: f64) -> Result<Self> {
        let t1 = TargetConfig::new(xi1, HyperfineConfig::from_splittings(eps1.0, eps1.1, Z)?);
        let t2 = TargetConfig::new(xi2, HyperfineConfig::from_splittings(eps2.0, eps2.1, BEAM)?);
        let mut cfg = Self::with_targets(t1, t2, case);
        cfg.enforce_matching = false;
        Ok(cfg)
    }

    fn with_targets(target1: TargetConfig, target2: TargetConfig, case: MatchingCase) -> Self {
        Self {
            target1,
            target2,
            shutter_ns: (7.0, 74.0),
            matching_case: case,
            input_pol: PolVector::sigma(),
            enforce_matching: true,
            enforce_geometry: true,
            window_ns: None,
        }
    }

    /// Control run: target 2 gets target 1's field and direction.
    pub fn without_marking(&self) -> Self {
        let mut c = self.clone();
        c.target2.hyperfine = self.target1.hyperfine;
        c.enforce_matching = false;
        c.enforce_geometry = false;
        c
    }

    pub fn with_p_max(mut self, p_max: usize) -> Self {
        self.target1.p_max = p_max;
        self.target2.p_max = p_max;
        self
    }

    /// Both targets' splittings scaled by `factor`.
    pub fn scale_splitting(&self, factor: f64) -> Self {
        let mut c = self.clone();
        c.target1.hyperfine = c.target1.hyperfine.scaled(factor);
        c.target2.hyperfine = c.target2.hyperfine.scaled(factor);
        c
    }

    pub fn window(&self) -> (f64, f64) {
        self.window_ns.unwrap_or((self.shutter_ns.1 + 10.0, 190.0))
    }

    /// Angular frequency of the target-1 quantum beat in the field
    /// amplitude: half the separation of the ΔM = 0 lines.
    pub fn beat_omega(&self) -> f64 {
        0.5 * self.target1.hyperfine.delta_e()
    }

    pub fn validate(&self) -> Result<()> {
        self.target1.validate()?;
        self.target2.validate()?;
        let (t0, t1) = self.shutter_ns;
        if !(t0 >= 0.0) || !(t1 > t0) {
            return Err(invalid(format!("shutter needs 0 <= t0 < t1, got {t0}:{t1} ns")));
        }
        if self.enforce_geometry {
            let d1 = self.target1.hyperfine.field_direction;
            let d2 = self.target2.hyperfine.field_direction;
            if (d1[2] - 1.0).abs() > 1e-12 {
                return Err(invalid("target 1 field must point along z"));
            }
            if (d2[1] - 1.0).abs() > 1e-12 {
                return Err(invalid("target 2 field must point along the beam (y)"));
            }
        }
        if self.enforce_matching {
            let iso = &self.target1.isotope;
            let b1 = self.target1.hyperfine.implied_field(iso);
            let b2 = self.target2.hyperfine.implied_field(&self.target2.isotope);
            let want = matching_field(b1, self.matching_case, iso)?;
            if ((b2 - want) / want).abs() > 1e-3 {
                return Err(invalid(format!(
                    "target 2 field {b2:.4} T does not match {want:.4} T (case {:?}); disable matching to override",
                    self.matching_case
                )));
            }
        }
        Ok(())
    }
}

/// Runs target 1, the shutter, target 2 and the two polarizers.
///
/// Spectra: `target1` (behind target 1, prompt pulse excluded) and
/// `target2` (behind target 2, with `det1`/`det2` the σ/π polarizer
/// outputs). Metrics: visibilities in the analysis window, the contrast
/// of the 2Ω component behind each target and the σ/π fringe shift in
/// units of the beat period 2π/Ω.
pub fn run_scheme1(cfg: &Scheme1Config, grid: &TimeGrid) -> Result<SpectrumResult> {
    cfg.validate()?;
    let p1 = propagate_delta(&cfg.target1, cfg.input_pol, grid)?;
    let gated = time_gate(&p1.field, cfg.shutter_ns.0, cfg.shutter_ns.1)?;
    let p2 = propagate_general(&cfg.target2, &gated)?;

    let s1 = Spectrum::from_field("target1", &p1.field);
    let mut s2 = Spectrum::from_field("target2", &p2.field);
    let det_sigma = crate::field::intensity(&project(&p2.field, Axis::Sigma));
    let det_pi = crate::field::intensity(&project(&p2.field, Axis::Pi));

    let mut d = Diagnostics::default();
    d.convergence.insert("target1".into(), p1.convergence);
    d.convergence.insert("target2".into(), p2.convergence);
    let (wa, wb) = cfg.window();
    let lt = grid.lifetime_ns;
    let win = (wa / lt, (wb / lt).min(grid.last_tau()));
    d.windows.insert("visibility".into(), win);
    let t1 = s1.total.as_ref().unwrap();
    let t2 = s2.total.as_ref().unwrap();
    d.metrics.insert("visibility_target1".into(), visibility(t1, grid, win, true)?);
    d.metrics.insert("visibility_target2".into(), visibility(t2, grid, win, true)?);
    d.metrics.insert("visibility_det_sigma".into(), visibility(&det_sigma, grid, win, true)?);
    d.metrics.insert("visibility_det_pi".into(), visibility(&det_pi, grid, win, true)?);
    let omega = cfg.beat_omega();
    d.metrics.insert("beat_omega".into(), omega);
    if omega > 0.0 {
        d.metrics.insert("beat_contrast_target1".into(), beat_contrast(t1, grid, win, 2.0 * omega)?);
        d.metrics.insert("beat_contrast_target2".into(), beat_contrast(t2, grid, win, 2.0 * omega)?);
        match fringe_shift_with(&det_sigma, &det_pi, grid, win, 2.0 * PI / omega, PI / omega) {
            Ok(s) => {
                d.metrics.insert("fringe_shift".into(), s.abs());
            }
            Err(e) => d.notes.push(format!("fringe shift unavailable: {e}")),
        }
    }
    s2.det1 = Some(det_sigma);
    s2.det2 = Some(det_pi);
    Ok(SpectrumResult { grid: *grid, spectra: vec![s1, s2], diagnostics: d })
}
