//! Nuclear data: isotope constants, Zeeman splittings, the hyperfine
//! transition table and the magnetic-field matching used by the collinear
//! eraser.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::field::Jones;
use crate::kernel::coupling::{coupling_matrix, Geometry};

/// Nuclear magneton, eV/T (CODATA 2018).
pub const NUCLEAR_MAGNETON_EV_PER_T: f64 = 3.1524512605e-8;
/// Reduced Planck constant, eV·s (CODATA 2018).
pub const HBAR_EV_S: f64 = 6.582119569e-16;

/// Nuclear constants of a Mössbauer isotope.
///
/// Magnetic moments are in nuclear magnetons, spins are half-integers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsotopeConstants {
    pub transition_energy_kev: f64,
    pub mean_lifetime_ns: f64,
    pub spin_ground: f64,
    pub spin_excited: f64,
    pub mu_ground: f64,
    pub mu_excited: f64,
}

impl IsotopeConstants {
    /// ⁵⁷Fe, 14.4 keV transition.
    pub const FE57: IsotopeConstants = IsotopeConstants {
        transition_energy_kev: 14.4125,
        mean_lifetime_ns: 141.0,
        spin_ground: 0.5,
        spin_excited: 1.5,
        mu_ground: 0.09044,
        mu_excited: -0.1549,
    };

    pub fn validate(&self) -> Result<()> {
        if !(self.mean_lifetime_ns > 0.0) {
            return Err(invalid("mean lifetime must be positive"));
        }
        if !(self.transition_energy_kev > 0.0) {
            return Err(invalid("transition energy must be positive"));
        }
        for (name, spin) in [("ground", self.spin_ground), ("excited", self.spin_excited)] {
            let twice = 2.0 * spin;
            if !(spin > 0.0) || (twice - twice.round()).abs() > 1e-12 {
                return Err(invalid(format!(
                    "{name} spin must be a positive half-integer, got {spin}"
                )));
            }
        }
        // dipole coupling needs |Ie - Ig| <= 1 <= Ie + Ig
        if (self.spin_excited - self.spin_ground).abs() > 1.0 + 1e-12
            || self.spin_excited + self.spin_ground < 1.0 - 1e-12
        {
            return Err(invalid("spins do not admit a dipole transition"));
        }
        Ok(())
    }

    /// Natural width Γ₀ = ħ/τ in eV.
    pub fn natural_width_ev(&self) -> f64 {
        HBAR_EV_S / (self.mean_lifetime_ns * 1e-9)
    }

    /// μ/I of a level, in nuclear magnetons.
    pub fn moment_per_spin(&self, level: Level) -> f64 {
        match level {
            Level::Ground => self.mu_ground / self.spin_ground,
            Level::Excited => self.mu_excited / self.spin_excited,
        }
    }

    pub fn spin(&self, level: Level) -> f64 {
        match level {
            Level::Ground => self.spin_ground,
            Level::Excited => self.spin_excited,
        }
    }

    pub(crate) fn twice_spin(&self, level: Level) -> i32 {
        (2.0 * self.spin(level)).round() as i32
    }
}

impl Default for IsotopeConstants {
    fn default() -> Self {
        Self::FE57
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Ground,
    Excited,
}

/// Zeeman energy ε = μ·B/I of a level, in units of Γ₀.
///
/// The sign follows the magnetic moment.
pub fn zeeman_splitting(b_tesla: f64, level: Level, constants: &IsotopeConstants) -> Result<f64> {
    if !(b_tesla >= 0.0) || !b_tesla.is_finite() {
        return Err(invalid(format!("field magnitude must be >= 0, got {b_tesla}")));
    }
    let ev = constants.moment_per_spin(level) * NUCLEAR_MAGNETON_EV_PER_T * b_tesla;
    Ok(ev / constants.natural_width_ev())
}

/// Hyperfine field acting on a target.
///
/// Either the field magnitude or the two splittings can be the primary
/// input; `field_magnitude` is `None` when only the splittings were given
/// and they are not consistent with a single isotope field value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperfineConfig {
    pub field_magnitude: Option<f64>,
    pub field_direction: [f64; 3],
    pub eps_ground: f64,
    pub eps_excited: f64,
}

fn unit(direction: [f64; 3]) -> Result<[f64; 3]> {
    let n = direction.iter().map(|c| c * c).sum::<f64>().sqrt();
    if !(n > 0.0) || !n.is_finite() {
        return Err(invalid("field direction must be a nonzero finite vector"));
    }
    Ok(direction.map(|c| c / n))
}

impl HyperfineConfig {
    pub fn from_field(b_tesla: f64, direction: [f64; 3], constants: &IsotopeConstants) -> Result<Self> {
        Ok(Self {
            field_magnitude: Some(b_tesla),
            field_direction: unit(direction)?,
            eps_ground: zeeman_splitting(b_tesla, Level::Ground, constants)?,
            eps_excited: zeeman_splitting(b_tesla, Level::Excited, constants)?,
        })
    }

    /// Splittings given directly in units of Γ₀.
    pub fn from_splittings(eps_ground: f64, eps_excited: f64, direction: [f64; 3]) -> Result<Self> {
        if !eps_ground.is_finite() || !eps_excited.is_finite() {
            return Err(invalid("splittings must be finite"));
        }
        Ok(Self {
            field_magnitude: None,
            field_direction: unit(direction)?,
            eps_ground,
            eps_excited,
        })
    }

    /// Field chosen so that the M = +1/2 → +1/2 line sits at `omega2` (in Γ₀).
    pub fn from_line_offset(omega2: f64, direction: [f64; 3], constants: &IsotopeConstants) -> Result<Self> {
        if !(omega2 >= 0.0) || !omega2.is_finite() {
            return Err(invalid(format!("line offset must be >= 0, got {omega2}")));
        }
        // Ω(+1/2 → +1/2) = (ε_g - ε_e)/2 is linear in B
        let per_tesla = 0.5
            * (zeeman_splitting(1.0, Level::Ground, constants)?
                - zeeman_splitting(1.0, Level::Excited, constants)?);
        if per_tesla.abs() < 1e-300 {
            return Err(invalid("isotope has no ΔM = 0 splitting"));
        }
        Self::from_field(omega2 / per_tesla.abs(), direction, constants)
    }

    pub fn zero_field(direction: [f64; 3]) -> Result<Self> {
        Self::from_splittings(0.0, 0.0, direction)
    }

    /// Separation of the two ΔM = 0 lines, |ε_g − ε_e|.
    pub fn delta_e(&self) -> f64 {
        (self.eps_ground - self.eps_excited).abs()
    }

    /// Same direction, both splittings scaled.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            field_magnitude: self.field_magnitude.map(|b| b * factor),
            eps_ground: self.eps_ground * factor,
            eps_excited: self.eps_excited * factor,
            ..*self
        }
    }

    pub fn with_direction(&self, direction: [f64; 3]) -> Result<Self> {
        Ok(Self { field_direction: unit(direction)?, ..*self })
    }

    /// Field magnitude implied by the ground splitting.
    pub fn implied_field(&self, constants: &IsotopeConstants) -> f64 {
        self.field_magnitude.unwrap_or_else(|| {
            self.eps_ground.abs() / zeeman_splitting(1.0, Level::Ground, constants).unwrap().abs()
        })
    }
}

/// One hyperfine transition between Zeeman sublevels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionLine {
    pub m_ground: f64,
    pub m_excited: f64,
    pub delta_m: i32,
    /// Offset from the unsplit resonance, in Γ₀.
    pub omega: f64,
    /// Normalized squared Clebsch-Gordan weight; sums to one over all lines.
    pub weight: f64,
    /// Rank-one coupling j (j* · ) in the (σ, π) basis.
    pub coupling: Jones,
}

impl TransitionLine {
    pub fn is_coupled(&self) -> bool {
        self.coupling.iter().flatten().any(|c| c.norm() > 0.0)
    }
}

/// Ω = M_g ε_g − M_e ε_e.
pub fn line_offset(m_ground: f64, m_excited: f64, hf: &HyperfineConfig) -> f64 {
    m_ground * hf.eps_ground - m_excited * hf.eps_excited
}

/// All dipole-allowed lines for the given field, ordered by (M_g, M_e).
pub fn transition_table(
    hf: &HyperfineConfig,
    geometry: &Geometry,
    constants: &IsotopeConstants,
    f_lm: f64,
) -> Result<Vec<TransitionLine>> {
    constants.validate()?;
    let tg = constants.twice_spin(Level::Ground);
    let te = constants.twice_spin(Level::Excited);
    // equal ground populations; the weights sum to one over all lines
    let norm = 1.0 / (te + 1) as f64;
    let mut lines = Vec::new();
    for mg2 in (-tg..=tg).step_by(2) {
        for me2 in (-te..=te).step_by(2) {
            let dm2 = me2 - mg2;
            if dm2.abs() > 2 {
                continue;
            }
            let cg = clebsch_gordan(tg, mg2, 2, dm2, te, me2);
            if cg == 0.0 {
                continue;
            }
            let m_ground = mg2 as f64 / 2.0;
            let m_excited = me2 as f64 / 2.0;
            let delta_m = dm2 / 2;
            let weight = norm * cg * cg;
            // 3·weight makes the couplings of all lines add up to f_LM
            // times the identity, and gives f_LM/2 per transverse ΔM = 0 line
            let coupling = coupling_matrix(
                delta_m,
                3.0 * f_lm * weight,
                hf.field_direction,
                geometry,
            )?;
            lines.push(TransitionLine {
                m_ground,
                m_excited,
                delta_m,
                omega: line_offset(m_ground, m_excited, hf),
                weight,
                coupling,
            });
        }
    }
    Ok(lines)
}

/// Lines sorted by energy, i.e. the conventional sextet numbering 1..=6
/// for ⁵⁷Fe is the position in the returned vector plus one.
///
/// Ties (zero field) are broken by (M_g, M_e).
pub fn energy_ordered(lines: &[TransitionLine]) -> Vec<TransitionLine> {
    let mut sorted = lines.to_vec();
    sorted.sort_by(|a, b| {
        a.omega
            .partial_cmp(&b.omega)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.m_ground.partial_cmp(&b.m_ground).unwrap())
            .then(a.m_excited.partial_cmp(&b.m_excited).unwrap())
    });
    sorted
}

/// Clebsch-Gordan coefficient ⟨j1 m1; j2 m2 | j m⟩ with all arguments doubled.
pub fn clebsch_gordan(j1: i32, m1: i32, j2: i32, m2: i32, j: i32, m: i32) -> f64 {
    if m1 + m2 != m || m1.abs() > j1 || m2.abs() > j2 || m.abs() > j {
        return 0.0;
    }
    if j < (j1 - j2).abs() || j > j1 + j2 || (j1 + j2 + j) % 2 != 0 {
        return 0.0;
    }
    if (j1 + m1) % 2 != 0 || (j2 + m2) % 2 != 0 || (j + m) % 2 != 0 {
        return 0.0;
    }
    let f = |x: i32| -> f64 {
        debug_assert!(x % 2 == 0 && x >= 0);
        (1..=x / 2).fold(1.0, |acc, k| acc * k as f64)
    };
    let pre = ((j + 1) as f64 * f(j + j1 - j2) * f(j - j1 + j2) * f(j1 + j2 - j) / f(j1 + j2 + j + 2))
        .sqrt()
        * (f(j + m) * f(j - m) * f(j1 - m1) * f(j1 + m1) * f(j2 - m2) * f(j2 + m2)).sqrt();
    let mut sum = 0.0;
    let mut k = 0;
    loop {
        let args = [
            j1 + j2 - j - k,
            j1 - m1 - k,
            j2 + m2 - k,
            j - j2 + m1 + k,
            j - j1 - m2 + k,
        ];
        if args[..3].iter().any(|&a| a < 0) {
            break;
        }
        if args[3..].iter().all(|&a| a >= 0) {
            let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign / (f(k) * args.iter().map(|&a| f(a)).product::<f64>());
        }
        k += 2;
    }
    pre * sum
}

/// Which pair of target-2 lines is tuned onto the two target-1 ΔM = 0 lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatchingCase {
    /// inner ΔM = ±1 lines (|M_e| = 1/2)
    Inner = 1,
    /// outer ΔM = ±1 lines (|M_e| = 3/2)
    Outer = 2,
}

impl MatchingCase {
    pub fn from_number(n: u32) -> Result<Self> {
        match n {
            1 => Ok(Self::Inner),
            2 => Ok(Self::Outer),
            _ => Err(invalid(format!("matching case must be 1 or 2, got {n}"))),
        }
    }
}

/// B₁/B₂ for the given matching case.
pub fn matching_ratio(case: MatchingCase, constants: &IsotopeConstants) -> Result<f64> {
    let g = constants.moment_per_spin(Level::Ground);
    let e = constants.moment_per_spin(Level::Excited);
    let (num, den) = match case {
        MatchingCase::Inner => (g + e, g - e),
        MatchingCase::Outer => (g - 3.0 * e, g - e),
    };
    let ratio = num / den;
    if !ratio.is_finite() || ratio <= 0.0 {
        return Err(invalid(format!("matching ratio {ratio} is not a positive number")));
    }
    Ok(ratio)
}

/// Target-2 field that puts its circularly polarized lines onto the two
/// ΔM = 0 lines of target 1 (field `b1`).
pub fn matching_field(b1: f64, case: MatchingCase, constants: &IsotopeConstants) -> Result<f64> {
    if !(b1 > 0.0) || !b1.is_finite() {
        return Err(invalid(format!("B1 must be > 0, got {b1}")));
    }
    Ok(b1 / matching_ratio(case, constants)?)
}

/// Inverse of [`matching_field`]: the target-1 field matched by `b2`.
pub fn matched_source_field(b2: f64, case: MatchingCase, constants: &IsotopeConstants) -> Result<f64> {
    if !(b2 > 0.0) || !b2.is_finite() {
        return Err(invalid(format!("B2 must be > 0, got {b2}")));
    }
    Ok(b2 * matching_ratio(case, constants)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const Z: [f64; 3] = [0.0, 0.0, 1.0];

    #[test]
    fn zeeman_values_at_printed_fields() {
        let fe = IsotopeConstants::FE57;
        let g = zeeman_splitting(39.0, Level::Ground, &fe).unwrap();
        let e = zeeman_splitting(23.0, Level::Excited, &fe).unwrap();
        assert!((g - 48.0).abs() / 48.0 < 0.02, "{g}");
        assert!((e + 16.0).abs() / 16.0 < 0.02, "{e}");
        assert_eq!(zeeman_splitting(0.0, Level::Ground, &fe).unwrap(), 0.0);
        assert!(zeeman_splitting(-1.0, Level::Ground, &fe).is_err());
    }

    #[test]
    fn zeeman_is_linear() {
        let fe = IsotopeConstants::FE57;
        for b in [0.3, 7.0, 39.0] {
            let one = zeeman_splitting(b, Level::Excited, &fe).unwrap();
            let two = zeeman_splitting(2.0 * b, Level::Excited, &fe).unwrap();
            assert_eq!(two, 2.0 * one);
        }
    }

    #[test]
    fn natural_width() {
        let w = IsotopeConstants::FE57.natural_width_ev();
        assert_relative_eq!(w, 4.668e-9, max_relative = 1e-3);
    }

    #[test]
    fn clebsch_gordan_half_to_three_halves() {
        // squared coefficients 1, 2/3, 1/3 for |ΔM| pattern of the sextet
        assert_relative_eq!(clebsch_gordan(1, 1, 2, 2, 3, 3).powi(2), 1.0, epsilon = 1e-14);
        assert_relative_eq!(clebsch_gordan(1, 1, 2, 0, 3, 1).powi(2), 2.0 / 3.0, epsilon = 1e-14);
        assert_relative_eq!(clebsch_gordan(1, 1, 2, -2, 3, -1).powi(2), 1.0 / 3.0, epsilon = 1e-14);
        assert_relative_eq!(clebsch_gordan(1, -1, 2, 2, 3, 1).powi(2), 1.0 / 3.0, epsilon = 1e-14);
        assert_eq!(clebsch_gordan(1, 1, 2, 2, 3, 1), 0.0);
        // ⟨1 0; 1 0 | 0 0⟩ = -1/√3
        assert_relative_eq!(clebsch_gordan(2, 0, 2, 0, 0, 0), -(1.0f64 / 3.0).sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn six_lines_with_sextet_weights() {
        let fe = IsotopeConstants::FE57;
        let hf = HyperfineConfig::from_splittings(48.0, -27.0, Z).unwrap();
        let lines = transition_table(&hf, &Geometry::default(), &fe, 1.0).unwrap();
        assert_eq!(lines.len(), 6);
        let total: f64 = lines.iter().map(|l| l.weight).sum();
        assert_relative_eq!(total, 1.0, epsilon = 1e-14);
        let w: Vec<f64> = energy_ordered(&lines).iter().map(|l| l.weight * 12.0).collect();
        for (got, want) in w.iter().zip([3.0, 2.0, 1.0, 1.0, 2.0, 3.0]) {
            assert_relative_eq!(*got, want, epsilon = 1e-12);
        }
        for l in &lines {
            assert_eq!(l.delta_m as f64, l.m_excited - l.m_ground);
        }
    }

    #[test]
    fn line_offsets_by_hand() {
        let hf = HyperfineConfig::from_splittings(48.0, -27.0, Z).unwrap();
        assert_eq!(line_offset(0.5, 0.5, &hf), 37.5);
        assert_eq!(line_offset(-0.5, -0.5, &hf), -37.5);
        let hf0 = HyperfineConfig::zero_field(Z).unwrap();
        let lines = transition_table(&hf0, &Geometry::default(), &IsotopeConstants::FE57, 1.0).unwrap();
        assert!(lines.iter().all(|l| l.omega == 0.0));
    }

    #[test]
    fn odd_under_projection_flip_and_dm0_separation() {
        let hf = HyperfineConfig::from_splittings(28.3, -16.1, Z).unwrap();
        let lines = transition_table(&hf, &Geometry::default(), &IsotopeConstants::FE57, 0.8).unwrap();
        for l in &lines {
            let mirror = lines
                .iter()
                .find(|o| o.m_ground == -l.m_ground && o.m_excited == -l.m_excited)
                .unwrap();
            assert_eq!(mirror.omega, -l.omega);
        }
        let dm0: Vec<f64> = lines.iter().filter(|l| l.delta_m == 0).map(|l| l.omega).collect();
        assert_relative_eq!((dm0[0] - dm0[1]).abs(), hf.delta_e(), epsilon = 1e-12);
    }

    #[test]
    fn matching_field_values() {
        let fe = IsotopeConstants::FE57;
        let r2 = matching_ratio(MatchingCase::Outer, &fe).unwrap();
        assert_relative_eq!(r2, (0.18088 + 3.0 * 0.10327) / (0.18088 + 0.10327), max_relative = 1e-4);
        assert!((r2 - 1.727).abs() < 1e-3);
        let r1 = matching_ratio(MatchingCase::Inner, &fe).unwrap();
        assert!((r1 - 0.273).abs() < 1e-3);
        let b2 = matching_field(39.0, MatchingCase::Outer, &fe).unwrap();
        assert!((b2 - 22.6).abs() < 0.05, "{b2}");
        assert!(matching_field(39.0, MatchingCase::Inner, &fe).unwrap() > 39.0);
        assert!(matching_field(0.0, MatchingCase::Inner, &fe).is_err());
    }

    #[test]
    fn matching_round_trip() {
        let fe = IsotopeConstants::FE57;
        for case in [MatchingCase::Inner, MatchingCase::Outer] {
            for b in [0.5, 12.0, 39.0, 101.0] {
                let back = matched_source_field(matching_field(b, case, &fe).unwrap(), case, &fe).unwrap();
                assert_relative_eq!(back, b, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn matched_lines_coincide() {
        // case 2: outer lines of target 2 land on the ΔM = 0 lines of target 1
        let fe = IsotopeConstants::FE57;
        let b2 = matching_field(39.0, MatchingCase::Outer, &fe).unwrap();
        let t1 = HyperfineConfig::from_field(39.0, Z, &fe).unwrap();
        let t2 = HyperfineConfig::from_field(b2, [0.0, 1.0, 0.0], &fe).unwrap();
        assert_relative_eq!(line_offset(0.5, 1.5, &t2), line_offset(0.5, 0.5, &t1), max_relative = 1e-12);
        // case 1: inner lines
        let b2 = matching_field(39.0, MatchingCase::Inner, &fe).unwrap();
        let t2 = HyperfineConfig::from_field(b2, [0.0, 1.0, 0.0], &fe).unwrap();
        assert_relative_eq!(line_offset(0.5, -0.5, &t2), line_offset(0.5, 0.5, &t1), max_relative = 1e-12);
    }

    #[test]
    fn line_offset_constructor() {
        let fe = IsotopeConstants::FE57;
        let hf = HyperfineConfig::from_line_offset(28.0, Z, &fe).unwrap();
        assert_relative_eq!(line_offset(0.5, 0.5, &hf), 28.0, max_relative = 1e-12);
        assert_relative_eq!(hf.delta_e(), 56.0, max_relative = 1e-12);
    }

    #[test]
    fn rejects_bad_constants() {
        let mut c = IsotopeConstants::FE57;
        c.mean_lifetime_ns = 0.0;
        assert!(c.validate().is_err());
        let mut c = IsotopeConstants::FE57;
        c.spin_excited = 1.3;
        assert!(c.validate().is_err());
        let mut c = IsotopeConstants::FE57;
        c.spin_excited = 3.5;
        assert!(c.validate().is_err());
    }
}
