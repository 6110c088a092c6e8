//! Two-arm interferometer with one target per arm.
//!
//! Entry splitter (1/√2)[[1, i], [i, 1]], a σ polarizer and target 1
//! (field along z) in arm 1, a π polarizer, a delay and target 2 (field
//! along x, same splitting) in arm 2, a mirror in each arm and the same
//! splitter at the exit. Detector 1 then sees (−α E^σ + β E^π)/2.
//!
//! The delay is either an external path difference Δτ or a storage
//! sequence on target 2: its field is switched off for Δτ, freezing the
//! nuclear phase, and back on.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{Diagnostics, Spectrum, SpectrumResult};
use crate::error::{invalid, Result};
use crate::field::{
    beam_splitter, fringe_shift_with, intensity, mirror, project, time_delay, visibility, Axis, FieldEnvelope,
    PolVector, TimeGrid,
};
use crate::kernel::series::first_order_lines;
use crate::kernel::{propagate_general, Convergence, SwitchSchedule, TargetConfig};
use crate::nuclear::{HyperfineConfig, IsotopeConstants};

const Z: [f64; 3] = [0.0, 0.0, 1.0];
const X: [f64; 3] = [1.0, 0.0, 0.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DelayMode {
    External,
    Storage,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scheme2Config {
    pub target1: TargetConfig,
    pub target2: TargetConfig,
    pub mode: DelayMode,
    /// External delay of arm 2; zero in storage mode.
    pub delta_tau: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Analysis window in dimensionless time; `None` picks a default that
    /// starts after the last switching or delay transient.
    pub window: Option<(f64, f64)>,
}

/// Incident polarization (α, β) that equalizes the two arms behind a delay
/// Δτ: β e^{Δτ/2} = α.
pub fn alpha_beta_of_delay(delta_tau: f64) -> (f64, f64) {
    ((1.0 / ((-delta_tau).exp() + 1.0)).sqrt(), (1.0 / (delta_tau.exp() + 1.0)).sqrt())
}

impl Scheme2Config {
    fn targets(omega2: f64, xi: f64, isotope: &IsotopeConstants) -> Result<(TargetConfig, TargetConfig)> {
        let hf = HyperfineConfig::from_line_offset(omega2, Z, isotope)?;
        Ok((TargetConfig::new(xi, hf), TargetConfig::new(xi, hf.with_direction(X)?)))
    }

    /// External delay of arm 2 by `delta_tau`.
    pub fn external(omega2: f64, xi: f64, delta_tau: f64, alpha: f64, beta: f64) -> Result<Self> {
        let (target1, target2) = Self::targets(omega2, xi, &IsotopeConstants::FE57)?;
        Ok(Self { target1, target2, mode: DelayMode::External, delta_tau, alpha, beta, window: None })
    }

    /// External delay set from the phase Φ = Ω₂ Δτ.
    pub fn external_phase(omega2: f64, xi: f64, phi: f64, alpha: f64, beta: f64) -> Result<Self> {
        if !(omega2 > 0.0) {
            return Err(invalid("a phase needs a nonzero line offset"));
        }
        Self::external(omega2, xi, phi / omega2, alpha, beta)
    }

    /// Storage on target 2 with explicit (off, on) intervals.
    pub fn storage(omega2: f64, xi: f64, events: Vec<(f64, f64)>, alpha: f64, beta: f64) -> Result<Self> {
        let (target1, mut target2) = Self::targets(omega2, xi, &IsotopeConstants::FE57)?;
        target2.schedule = SwitchSchedule::new(events)?;
        Ok(Self { target1, target2, mode: DelayMode::Storage, delta_tau: 0.0, alpha, beta, window: None })
    }

    /// `cycles` storage windows of length `off`, the first starting at
    /// `tau0` and each next one π/Ω₂ after the previous on-time.
    pub fn storage_periodic(
        omega2: f64,
        xi: f64,
        tau0: f64,
        off: f64,
        cycles: usize,
        alpha: f64,
        beta: f64,
    ) -> Result<Self> {
        if cycles == 0 || !(omega2 > 0.0) {
            return Err(invalid("storage needs at least one cycle and a nonzero line offset"));
        }
        let period = off + PI / omega2;
        let events = (0..cycles)
            .map(|k| {
                let t = tau0 + k as f64 * period;
                (t, t + off)
            })
            .collect();
        Self::storage(omega2, xi, events, alpha, beta)
    }

    /// Storage windows of length π/(2Ω₂), the first at the beat minimum
    /// π/(2Ω₂).
    pub fn storage_quarter(omega2: f64, xi: f64, cycles: usize, alpha: f64, beta: f64) -> Result<Self> {
        if !(omega2 > 0.0) {
            return Err(invalid("storage needs a nonzero line offset"));
        }
        let q = PI / (2.0 * omega2);
        Self::storage_periodic(omega2, xi, q, q, cycles, alpha, beta)
    }

    pub fn with_p_max(mut self, p_max: usize) -> Self {
        self.target1.p_max = p_max;
        self.target2.p_max = p_max;
        self
    }

    /// Sets (α, β) from the effective delay.
    pub fn with_auto_alpha(mut self) -> Self {
        (self.alpha, self.beta) = alpha_beta_of_delay(self.effective_delay());
        self
    }

    /// Ω₂: offset of the upper ΔM = 0 line.
    pub fn omega2(&self) -> f64 {
        0.5 * self.target1.hyperfine.delta_e()
    }

    /// External delay, or total off time in storage mode.
    pub fn effective_delay(&self) -> f64 {
        match self.mode {
            DelayMode::External => self.delta_tau,
            DelayMode::Storage => self.target2.schedule.total_off(),
        }
    }

    /// Φ = Ω₂ Δτ.
    pub fn phase(&self) -> f64 {
        self.omega2() * self.effective_delay()
    }

    /// Time after which both arms are in their final static regime.
    pub fn settle_time(&self) -> f64 {
        match self.mode {
            DelayMode::External => self.delta_tau,
            DelayMode::Storage => self.target2.schedule.events.last().map_or(0.0, |e| e.1),
        }
    }

    /// Grid on [0, end] whose step (at most `max_step`) divides the delay
    /// or the storage window.
    pub fn grid(&self, end: f64, max_step: f64, lifetime_ns: f64) -> Result<TimeGrid> {
        let unit = match self.mode {
            DelayMode::External => self.delta_tau,
            DelayMode::Storage => self.target2.schedule.events.first().map_or(0.0, |e| e.1 - e.0),
        };
        TimeGrid::aligned(0.0, end, max_step, unit, lifetime_ns)
    }

    pub fn window_for(&self, grid: &TimeGrid) -> (f64, f64) {
        self.window.unwrap_or_else(|| {
            let start = (2.0 * self.settle_time()).max(0.1);
            (start, grid.last_tau().min(5.0))
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.target1.validate()?;
        self.target2.validate()?;
        if ((self.alpha * self.alpha + self.beta * self.beta) - 1.0).abs() > 1e-12 {
            return Err(invalid(format!(
                "incident polarization must be normalized: α² + β² = {}",
                self.alpha * self.alpha + self.beta * self.beta
            )));
        }
        let (h1, h2) = (&self.target1.hyperfine, &self.target2.hyperfine);
        if (h1.field_direction[2] - 1.0).abs() > 1e-12 || (h2.field_direction[0] - 1.0).abs() > 1e-12 {
            return Err(invalid("target 1 field must point along z and target 2 along x"));
        }
        let scale = h1.eps_ground.abs().max(h1.eps_excited.abs()).max(1.0);
        if (h1.eps_ground - h2.eps_ground).abs() > 1e-12 * scale
            || (h1.eps_excited - h2.eps_excited).abs() > 1e-12 * scale
        {
            return Err(invalid("both targets need the same splitting"));
        }
        if !self.target1.schedule.events.is_empty() {
            return Err(invalid("target 1 cannot be switched"));
        }
        match self.mode {
            DelayMode::External => {
                if !self.target2.schedule.events.is_empty() {
                    return Err(invalid("external mode with a switching schedule; use storage mode"));
                }
                if !(self.delta_tau >= 0.0) || !self.delta_tau.is_finite() {
                    return Err(invalid(format!("delay must be >= 0, got {}", self.delta_tau)));
                }
            }
            DelayMode::Storage => {
                if self.target2.schedule.events.is_empty() {
                    return Err(invalid("storage mode needs a switching schedule on target 2"));
                }
                if self.delta_tau != 0.0 {
                    return Err(invalid("storage mode cannot also use an external delay"));
                }
            }
        }
        Ok(())
    }
}

struct Arms {
    /// Arm fields after the mirrors.
    arm1: FieldEnvelope,
    arm2: FieldEnvelope,
    conv1: Convergence,
    conv2: Convergence,
}

fn arms(cfg: &Scheme2Config, grid: &TimeGrid) -> Result<Arms> {
    cfg.validate()?;
    let pol = PolVector::real(cfg.alpha, cfg.beta);
    let input = FieldEnvelope::impulse(*grid, pol, 0.0)?;
    let (a, b) = beam_splitter(&input, &FieldEnvelope::zeros(*grid))?;
    let a = project(&a, Axis::Sigma);
    let b = time_delay(&project(&b, Axis::Pi), cfg.delta_tau)?;
    let p1 = propagate_general(&cfg.target1, &a)?;
    let p2 = propagate_general(&cfg.target2, &b)?;
    Ok(Arms { arm1: mirror(&p1.field), arm2: mirror(&p2.field), conv1: p1.convergence, conv2: p2.convergence })
}

/// Runs the interferometer.
///
/// Spectra: `scheme2` with `det1`/`det2` the two exit ports, `total` their
/// sum, `sigma`/`pi` the σ and π parts of detector 1 and the field of
/// detector 1; `arm1` and `arm2` hold the arm fields before the exit
/// splitter. The fringe shift is in units of the beat period 2π/Ω₂.
pub fn run_scheme2(cfg: &Scheme2Config, grid: &TimeGrid) -> Result<SpectrumResult> {
    let arms = arms(cfg, grid)?;
    let (out1, out2) = beam_splitter(&arms.arm1, &arms.arm2)?;
    let i1 = intensity(&out1);
    let i2 = intensity(&out2);
    let mut main = Spectrum::from_field("scheme2", &out1);
    main.total = Some(i1.iter().zip(&i2).map(|(a, b)| a + b).collect());
    main.det1 = Some(i1);
    main.det2 = Some(i2);

    let mut d = Diagnostics::default();
    d.convergence.insert("target1".into(), arms.conv1);
    d.convergence.insert("target2".into(), arms.conv2);
    let omega2 = cfg.omega2();
    d.metrics.insert("omega2".into(), omega2);
    d.metrics.insert("phi".into(), cfg.phase());
    d.metrics.insert("alpha".into(), cfg.alpha);
    d.metrics.insert("beta".into(), cfg.beta);
    d.metrics.insert("beta_prime".into(), cfg.beta * (0.5 * cfg.delta_tau).exp());
    let win = cfg.window_for(grid);
    d.windows.insert("visibility".into(), win);
    let traces = [
        ("visibility_det1", main.det1.as_ref().unwrap()),
        ("visibility_det2", main.det2.as_ref().unwrap()),
        ("visibility_sigma", main.sigma.as_ref().unwrap()),
        ("visibility_pi", main.pi.as_ref().unwrap()),
    ];
    for (key, trace) in traces {
        match visibility(trace, grid, win, true) {
            Ok(v) => {
                d.metrics.insert(key.into(), v);
            }
            Err(e) => d.notes.push(format!("{key}: {e}")),
        }
    }
    if omega2 > 0.0 {
        let (s, p) = (main.sigma.as_ref().unwrap(), main.pi.as_ref().unwrap());
        match fringe_shift_with(s, p, grid, win, 2.0 * PI / omega2, PI / omega2) {
            Ok(x) => {
                d.metrics.insert("fringe_shift".into(), x.abs());
            }
            Err(e) => d.notes.push(format!("fringe shift unavailable: {e}")),
        }
    }
    Ok(SpectrumResult {
        grid: *grid,
        spectra: vec![main, Spectrum::from_field("arm1", &arms.arm1), Spectrum::from_field("arm2", &arms.arm2)],
        diagnostics: d,
    })
}

/// First-order comparison of storage and external delay for τ after the
/// last on-switch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub off_duration: f64,
    pub tau_on: f64,
    pub samples_compared: usize,
    /// max |arg(storage_ℓ / external_ℓ)| over target-2 lines.
    pub line_phase_deviation: f64,
    /// max |storage_ℓ/external_ℓ − e^{−Δτ/2}|.
    pub line_amplitude_deviation: f64,
    /// Detector-1 field of the storage run against the external run with β
    /// replaced by β e^{−Δτ/2}, relative to the peak field.
    pub detector_deviation: f64,
}

impl EquivalenceReport {
    pub fn max_deviation(&self) -> f64 {
        self.line_phase_deviation.max(self.line_amplitude_deviation).max(self.detector_deviation)
    }
}

/// Checks that storage behaves like the external delay of equal length
/// once the field is back on, with β′ = β e^{Δτ/2} replaced by β.
pub fn storage_delay_equivalence(
    cfg_external: &Scheme2Config,
    cfg_storage: &Scheme2Config,
    grid: &TimeGrid,
) -> Result<EquivalenceReport> {
    let ext = cfg_external.clone().with_p_max(1);
    let sto = cfg_storage.clone().with_p_max(1);
    ext.validate()?;
    sto.validate()?;
    if ext.mode != DelayMode::External || sto.mode != DelayMode::Storage {
        return Err(invalid("need one external and one storage configuration"));
    }
    let d = sto.effective_delay();
    if (d - ext.delta_tau).abs() > 1e-12 * d.max(1.0) {
        return Err(invalid(format!("storage off time {d} differs from the external delay {}", ext.delta_tau)));
    }
    let k = grid.index_of(d).ok_or(crate::error::Error::DelayNotOnGrid { delay: d, step: grid.step })?;
    let tau_on = sto.settle_time();
    let from = grid.window(tau_on, f64::INFINITY).start + 1;
    let decay = (-0.5 * d).exp();

    // per line, target 2 alone
    let pol = PolVector::pi();
    let stored = first_order_lines(&sto.target2, pol, grid)?;
    let mut static_target = sto.target2.clone();
    static_target.schedule = SwitchSchedule::default();
    let plain = first_order_lines(&static_target, pol, grid)?;
    let (mut phase_dev, mut amp_dev) = (0.0f64, 0.0f64);
    for ((_, s), (_, p)) in stored.iter().zip(&plain) {
        for n in from..grid.samples {
            let (a, b) = (s[n].pi, p[n - k].pi);
            if b.norm() == 0.0 {
                continue;
            }
            let r = a / b;
            phase_dev = phase_dev.max(r.arg().abs());
            amp_dev = amp_dev.max((r.norm() - decay).abs());
        }
    }

    // detector 1 = (arm1 + i arm2)/√2; storage arms against scaled external arms
    let ea = arms(&ext, grid)?;
    let sa = arms(&sto, grid)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let i = num_complex::Complex64::new(0.0, s);
    let mut peak = 0.0f64;
    let mut dev = 0.0f64;
    for n in from..grid.samples {
        let u1 = ea.arm1.values()[n] * (sto.alpha / ext.alpha);
        let u2 = ea.arm2.values()[n] * (sto.beta * decay / ext.beta);
        let want = u1 * num_complex::Complex64::new(s, 0.0) + u2 * i;
        let got = sa.arm1.values()[n] * num_complex::Complex64::new(s, 0.0) + sa.arm2.values()[n] * i;
        peak = peak.max(want.norm_sqr().sqrt());
        dev = dev.max((got - want).norm_sqr().sqrt());
    }
    Ok(EquivalenceReport {
        off_duration: d,
        tau_on,
        samples_compared: grid.samples.saturating_sub(from),
        line_phase_deviation: phase_dev,
        line_amplitude_deviation: amp_dev,
        detector_deviation: if peak > 0.0 { dev / peak } else { dev },
    })
}
