//! Closed-form response of a single unsplit line to a δ pulse, used to check
//! the series solver. Shares no code with it.

use num_complex::Complex64;

/// J₁(x) from its power series Σ (−1)^k (x/2)^(2k+1) / (k! (k+1)!).
///
/// Accurate to about 1e-15 · max term; adequate for x ≲ 25.
pub fn bessel_j1(x: f64) -> f64 {
    let h = 0.5 * x;
    let q = -h * h;
    let mut term = h;
    let mut sum = term;
    let mut big = term.abs();
    for k in 1..200 {
        term *= q / (k as f64 * (k + 1) as f64);
        sum += term;
        big = big.max(term.abs());
        if term.abs() < 1e-20 * big && k as f64 > h {
            break;
        }
    }
    sum
}

/// k-th positive zero of J₁ (k ≥ 1), by bracketing and bisection.
pub fn bessel_j1_zero(k: usize) -> f64 {
    assert!(k >= 1);
    // zeros are spaced by roughly π; scan in small steps to bracket
    let mut found = 0;
    let mut a = 0.5;
    let step = 0.1;
    loop {
        let b = a + step;
        if bessel_j1(a).signum() != bessel_j1(b).signum() {
            found += 1;
            if found == k {
                let (mut lo, mut hi) = (a, b);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if bessel_j1(lo).signum() == bessel_j1(mid).signum() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo < 1e-15 {
                        break;
                    }
                }
                return 0.5 * (lo + hi);
            }
        }
        a = b;
    }
}

/// −e^{−τ/2} √(ξ_eff/τ) J₁(2√(ξ_eff τ)): the scattered field of a single
/// line of effective thickness ξ_eff = ξ·f_LM behind a δ pulse.
pub fn single_line_oracle(xi_eff: f64, tau: f64) -> Complex64 {
    assert!(xi_eff >= 0.0 && tau >= 0.0);
    if tau == 0.0 || xi_eff == 0.0 {
        return Complex64::new(-xi_eff, 0.0);
    }
    let x = 2.0 * (xi_eff * tau).sqrt();
    Complex64::new(-(-0.5 * tau).exp() * (xi_eff / tau).sqrt() * bessel_j1(x), 0.0)
}

/// Time of the first null of the dynamical beat: 2√(ξ_eff τ) = j₁,₁.
pub fn first_null(xi_eff: f64) -> f64 {
    let j = bessel_j1_zero(1);
    j * j / (4.0 * xi_eff)
}
