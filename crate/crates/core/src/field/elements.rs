//! Linear optical elements acting on field envelopes.

use num_complex::Complex64;

use super::{Axis, FieldEnvelope, Impulse, PolVector};
use crate::error::{invalid, Error, Result};

/// |Eσ|² + |Eπ|² at every sample. Impulses are not included.
pub fn intensity(field: &FieldEnvelope) -> Vec<f64> {
    field.values().iter().map(|v| v.norm_sqr()).collect()
}

pub fn project(field: &FieldEnvelope, axis: Axis) -> FieldEnvelope {
    field.map_values(|v| match axis {
        Axis::Sigma => PolVector::new(v.sigma, Complex64::new(0.0, 0.0)),
        Axis::Pi => PolVector::new(Complex64::new(0.0, 0.0), v.pi),
    })
}

/// Projection on an arbitrary polarization state `e` (normalized internally).
pub fn project_onto(field: &FieldEnvelope, e: PolVector) -> Result<FieldEnvelope> {
    let n = e.norm_sqr();
    if !(n > 0.0) {
        return Err(invalid("cannot project on a zero polarization vector"));
    }
    let e = e * (1.0 / n.sqrt());
    Ok(field.map_values(|v| e * e.inner(&v)))
}

/// Symmetric 50/50 splitter (1/√2)[[1, i], [i, 1]] mixing two input ports.
pub fn beam_splitter(a: &FieldEnvelope, b: &FieldEnvelope) -> Result<(FieldEnvelope, FieldEnvelope)> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let one = Complex64::new(s, 0.0);
    let i = Complex64::new(0.0, s);
    Ok((a.combine(one, b, i)?, a.combine(i, b, one)?))
}

/// Reflection: an overall factor −1.
pub fn mirror(field: &FieldEnvelope) -> FieldEnvelope {
    field.map_values(|v| -v)
}

/// E(τ) → E(τ − Δτ). Samples before Δτ become zero; `delta_tau` must be a
/// whole number of grid steps.
pub fn time_delay(field: &FieldEnvelope, delta_tau: f64) -> Result<FieldEnvelope> {
    let grid = *field.grid();
    if !(delta_tau >= 0.0) || !delta_tau.is_finite() {
        return Err(invalid(format!("delay must be finite and >= 0, got {delta_tau}")));
    }
    let x = delta_tau / grid.step;
    let k = x.round();
    if (x - k).abs() > 1e-6 {
        return Err(Error::DelayNotOnGrid { delay: delta_tau, step: grid.step });
    }
    let k = k as usize;
    let n = grid.samples;
    let mut values = vec![PolVector::ZERO; n];
    if k < n {
        values[k..].copy_from_slice(&field.values()[..n - k]);
    }
    let mut out = FieldEnvelope::from_values(grid, values)?;
    for imp in field.impulses() {
        let tau = imp.tau + k as f64 * grid.step;
        if grid.index_of(tau).is_some() {
            out.add_impulse(Impulse { tau, pol: imp.pol })?;
        }
    }
    for &b in field.breaks() {
        out.add_break(b + k);
    }
    out.add_break(k);
    Ok(out)
}

/// Keeps the field for t0_ns ≤ t ≤ t1_ns (nanoseconds) and zeroes it
/// elsewhere. A δ pulse at t = 0 is removed whenever t0_ns > 0.
pub fn time_gate(field: &FieldEnvelope, t0_ns: f64, t1_ns: f64) -> Result<FieldEnvelope> {
    let lt = field.grid().lifetime_ns;
    if !(t0_ns >= 0.0) || !(t1_ns > t0_ns) {
        return Err(invalid(format!("gate needs 0 <= t0 < t1, got [{t0_ns}, {t1_ns}] ns")));
    }
    time_gate_tau(field, t0_ns / lt, t1_ns / lt)
}

/// As [`time_gate`] with bounds in dimensionless time.
pub fn time_gate_tau(field: &FieldEnvelope, tau0: f64, tau1: f64) -> Result<FieldEnvelope> {
    if !(tau0 >= 0.0) || !(tau1 > tau0) {
        return Err(invalid(format!("gate needs 0 <= tau0 < tau1, got [{tau0}, {tau1}]")));
    }
    let grid = *field.grid();
    let keep = grid.window(tau0, tau1);
    let mut values = vec![PolVector::ZERO; grid.samples];
    values[keep.clone()].copy_from_slice(&field.values()[keep.clone()]);
    let mut out = FieldEnvelope::from_values(grid, values)?;
    for imp in field.impulses() {
        let idx = grid.index_of(imp.tau).expect("impulses lie on the grid");
        if keep.contains(&idx) {
            out.add_impulse(*imp)?;
        }
    }
    for &b in field.breaks() {
        out.add_break(b);
    }
    out.add_break(keep.start);
    out.add_break(keep.end);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::TimeGrid;
    use proptest::prelude::*;

    fn grid() -> TimeGrid {
        TimeGrid::new(0.0, 2.0, 0.01).unwrap()
    }

    fn sample_field(a: f64, b: f64, c: f64) -> FieldEnvelope {
        FieldEnvelope::from_fn(grid(), |t| {
            PolVector::new(
                Complex64::new((a * t).cos(), b * t),
                Complex64::new(c * t.sin(), (a + c) * t * t),
            )
        })
    }

    fn max_diff(x: &FieldEnvelope, y: &FieldEnvelope) -> f64 {
        x.values()
            .iter()
            .zip(y.values())
            .map(|(u, v)| (*u - *v).norm_sqr().sqrt())
            .fold(0.0, f64::max)
    }

    #[test]
    fn delay_shifts_samples() {
        let f = sample_field(1.0, 2.0, 3.0);
        let d = time_delay(&f, 0.1).unwrap();
        assert_eq!(d.values()[10], f.values()[0]);
        assert_eq!(d.values()[5], PolVector::ZERO);
        assert!(time_delay(&f, 0.105).is_err());
    }

    #[test]
    fn gate_drops_prompt_impulse() {
        let f = FieldEnvelope::impulse(grid(), PolVector::sigma(), 0.0).unwrap();
        let g = time_gate(&f, 7.0, 74.0).unwrap();
        assert!(g.impulses().is_empty());
        let kept = time_gate(&f, 0.0, 74.0).unwrap();
        assert_eq!(kept.impulses().len(), 1);
    }

    #[test]
    fn gate_zeroes_outside() {
        let f = sample_field(1.0, 1.0, 1.0);
        let g = time_gate_tau(&f, 0.5, 1.0).unwrap();
        assert_eq!(g.values()[49], PolVector::ZERO);
        assert_eq!(g.values()[50], f.values()[50]);
        assert_eq!(g.values()[100], f.values()[100]);
        assert_eq!(g.values()[101], PolVector::ZERO);
        assert_eq!(g.breaks(), &[50, 101]);
    }

    #[test]
    fn bad_gates_rejected() {
        let f = sample_field(1.0, 1.0, 1.0);
        assert!(time_gate(&f, 10.0, 5.0).is_err());
        assert!(time_gate(&f, -1.0, 5.0).is_err());
    }

    proptest! {
        #[test]
        fn projectors_complete(a in -3.0..3.0f64, b in -3.0..3.0f64, c in -3.0..3.0f64) {
            let f = sample_field(a, b, c);
            let s = project(&f, Axis::Sigma);
            let p = project(&f, Axis::Pi);
            let sum = s.combine(Complex64::new(1.0, 0.0), &p, Complex64::new(1.0, 0.0)).unwrap();
            prop_assert!(max_diff(&sum, &f) < 1e-15);
            let ss = project(&s, Axis::Sigma);
            prop_assert!(max_diff(&ss, &s) < 1e-15);
            let zero = project(&s, Axis::Pi);
            prop_assert!(intensity(&zero).iter().all(|x| *x == 0.0));
        }

        #[test]
        fn beam_splitter_conserves_energy(a in -3.0..3.0f64, b in -3.0..3.0f64, c in -3.0..3.0f64) {
            let x = sample_field(a, b, c);
            let y = sample_field(c, a, b);
            let (o1, o2) = beam_splitter(&x, &y).unwrap();
            let (ix, iy, i1, i2) = (intensity(&x), intensity(&y), intensity(&o1), intensity(&o2));
            for n in 0..ix.len() {
                let before = ix[n] + iy[n];
                prop_assert!((i1[n] + i2[n] - before).abs() <= 1e-12 * before.max(1.0));
            }
        }

        #[test]
        fn delay_and_gate_commute(k in 0usize..50, g0 in 0usize..100, len in 1usize..100) {
            let f = sample_field(1.3, 0.7, -2.1);
            let step = f.grid().step;
            let d = k as f64 * step;
            let (t0, t1) = (g0 as f64 * step, (g0 + len) as f64 * step);
            let a = time_gate_tau(&time_delay(&f, d).unwrap(), t0 + d, t1 + d).unwrap();
            let b = time_delay(&time_gate_tau(&f, t0, t1).unwrap(), d).unwrap();
            prop_assert!(max_diff(&a, &b) == 0.0);
        }

        #[test]
        fn intensity_ignores_global_phase(a in -3.0..3.0f64, phase in -7.0..7.0f64) {
            let f = sample_field(a, 1.0, 2.0);
            let g = f.map_values(|v| v * Complex64::from_polar(1.0, phase));
            for (x, y) in intensity(&f).iter().zip(intensity(&g)) {
                prop_assert!((x - y).abs() <= 1e-12 * x.max(1.0));
            }
        }
    }
}
