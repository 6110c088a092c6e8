use super::{Diagnostics, Spectrum, SpectrumResult};
use crate::error::Result;
use crate::field::{PolVector, TimeGrid};
use crate::kernel::{propagate_delta, TargetConfig};

/// Time spectrum behind one target excited by a δ pulse at τ = 0.
pub fn run_single_target(target: &TargetConfig, input_pol: PolVector, grid: &TimeGrid) -> Result<SpectrumResult> {
    let p = propagate_delta(target, input_pol, grid)?;
    let mut diagnostics = Diagnostics::default();
    diagnostics.convergence.insert("target".into(), p.convergence);
    diagnostics.metrics.insert("delta_e".into(), target.hyperfine.delta_e());
    Ok(SpectrumResult {
        grid: *grid,
        spectra: vec![Spectrum::from_field("single", &p.field)],
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nuclear::HyperfineConfig;

    #[test]
    fn thin_target_beats_at_twice_the_line_offset() {
        let grid = TimeGrid::new(0.0, 2.0, 1e-3).unwrap();
        let hf = HyperfineConfig::from_splittings(56.0, 0.0, [0.0, 0.0, 1.0]).unwrap();
        let t = TargetConfig::new(1.0, hf).with_p_max(1);
        let r = run_single_target(&t, PolVector::sigma(), &grid).unwrap();
        let i = r.spectrum("single").unwrap().total.as_ref().unwrap();
        for (n, x) in i.iter().enumerate() {
            let tau = grid.tau(n);
            let want = 0.64 / 2.0 * (1.0 + (56.0 * tau).cos()) * (-tau).exp();
            assert!((x - want).abs() < 1e-13);
        }
    }
}
