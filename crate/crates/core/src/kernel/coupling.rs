//! Polarization coupling of a magnetic-dipole transition.
//!
//! The photon's magnetic vector h = k̂ × e couples to the spherical unit
//! vector Y_ΔM about the field axis n̂. With a right-handed frame (u, v, n̂):
//! Y₀ = n̂, Y±₁ = ∓(u ± i v)/√2. The coupling vector of a line is
//! c_a = Y*_ΔM · h_a for a ∈ {σ, π}; its matrix is scale · c c†.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::field::{Jones, PolVector};

type Vec3 = [f64; 3];

fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

/// Lab-frame directions of the beam and of the two linear polarizations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub beam: Vec3,
    pub sigma: Vec3,
    pub pi: Vec3,
}

impl Default for Geometry {
    /// Beam along y, σ along x, π along z.
    fn default() -> Self {
        Self { beam: [0.0, 1.0, 0.0], sigma: [1.0, 0.0, 0.0], pi: [0.0, 0.0, 1.0] }
    }
}

impl Geometry {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("beam", self.beam), ("sigma", self.sigma), ("pi", self.pi)] {
            if (norm(v) - 1.0).abs() > 1e-12 {
                return Err(invalid(format!("{name} direction is not a unit vector")));
            }
        }
        if dot(self.sigma, self.beam).abs() > 1e-12 || dot(self.pi, self.beam).abs() > 1e-12 {
            return Err(Error::NonTransverse("σ and π must both be orthogonal to the beam".into()));
        }
        let right = cross(self.sigma, self.beam);
        if norm([right[0] - self.pi[0], right[1] - self.pi[1], right[2] - self.pi[2]]) > 1e-12 {
            return Err(invalid("π must equal σ × beam"));
        }
        Ok(())
    }

    /// Magnetic vectors h = k̂ × e of the σ and π photons.
    pub fn magnetic_vectors(&self) -> (Vec3, Vec3) {
        (cross(self.beam, self.sigma), cross(self.beam, self.pi))
    }
}

/// Spherical basis vector Y_m (m ∈ {−1, 0, 1}) about the unit axis `n`.
pub fn spherical_vector(m: i32, n: Vec3) -> Result<[Complex64; 3]> {
    // u: the lab axis least aligned with n, orthogonalized
    let axes = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let mut a = axes[0];
    for ax in axes {
        if dot(ax, n).abs() < dot(a, n).abs() {
            a = ax;
        }
    }
    let p = dot(a, n);
    let u = [a[0] - p * n[0], a[1] - p * n[1], a[2] - p * n[2]];
    let un = norm(u);
    let u = u.map(|c| c / un);
    let v = cross(n, u);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let c = |x: f64| Complex64::new(x, 0.0);
    Ok(match m {
        0 => n.map(c),
        1 => [0, 1, 2].map(|k| Complex64::new(-s * u[k], -s * v[k])),
        -1 => [0, 1, 2].map(|k| Complex64::new(s * u[k], -s * v[k])),
        _ => return Err(invalid(format!("ΔM must be in -1..=1, got {m}"))),
    })
}

/// Coupling vector (c_σ, c_π) of a ΔM transition for a field along `field_dir`.
pub fn coupling_vector(delta_m: i32, field_dir: Vec3, geometry: &Geometry) -> Result<PolVector> {
    geometry.validate()?;
    let n = norm(field_dir);
    if !(n > 0.0) || !n.is_finite() {
        return Err(invalid("field direction must be a nonzero finite vector"));
    }
    let y = spherical_vector(delta_m, field_dir.map(|c| c / n))?;
    let (h_sigma, h_pi) = geometry.magnetic_vectors();
    let proj = |h: Vec3| (0..3).map(|k| y[k].conj() * h[k]).sum::<Complex64>();
    Ok(PolVector::new(proj(h_sigma), proj(h_pi)))
}

/// scale · c c† for the ΔM transition.
pub fn coupling_matrix(delta_m: i32, scale: f64, field_dir: Vec3, geometry: &Geometry) -> Result<Jones> {
    let c = coupling_vector(delta_m, field_dir, geometry)?;
    let c = [c.sigma, c.pi];
    let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let v = scale * c[i] * c[j].conj();
            // exact zeros keep forbidden lines recognizably uncoupled
            m[i][j] = Complex64::new(clean(v.re), clean(v.im));
        }
    }
    Ok(m)
}

fn clean(x: f64) -> f64 {
    if x.abs() < 1e-15 {
        0.0
    } else {
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const X: Vec3 = [1.0, 0.0, 0.0];
    const Y: Vec3 = [0.0, 1.0, 0.0];
    const Z: Vec3 = [0.0, 0.0, 1.0];

    #[test]
    fn default_geometry_is_valid() {
        Geometry::default().validate().unwrap();
        let bad = Geometry { sigma: Y, ..Geometry::default() };
        assert!(matches!(bad.validate(), Err(Error::NonTransverse(_))));
    }

    #[test]
    fn field_along_z_couples_sigma_only_through_dm0() {
        let g = Geometry::default();
        let m = coupling_matrix(0, 1.0, Z, &g).unwrap();
        assert_relative_eq!(m[0][0].re, 1.0, epsilon = 1e-15);
        assert_eq!(m[1][1], Complex64::new(0.0, 0.0));
        assert_eq!(m[0][1], Complex64::new(0.0, 0.0));
        for dm in [-1, 1] {
            let m = coupling_matrix(dm, 1.0, Z, &g).unwrap();
            assert_eq!(m[0][0], Complex64::new(0.0, 0.0));
            assert_relative_eq!(m[1][1].re, 0.5, epsilon = 1e-15);
        }
    }

    #[test]
    fn field_along_x_couples_pi_through_dm0() {
        let m = coupling_matrix(0, 1.0, X, &Geometry::default()).unwrap();
        assert_relative_eq!(m[1][1].re, 1.0, epsilon = 1e-15);
        assert_eq!(m[0][0], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn faraday_geometry_has_circular_eigenvectors() {
        let g = Geometry::default();
        let m0 = coupling_matrix(0, 1.0, Y, &g).unwrap();
        assert!(m0.iter().flatten().all(|c| c.norm() == 0.0));
        let c = coupling_vector(1, Y, &g).unwrap();
        // ΔM = +1 couples to e+ only
        let e_minus = PolVector::circular_minus();
        assert!(e_minus.inner(&c).norm() < 1e-15);
        assert_relative_eq!(PolVector::circular_plus().inner(&c).norm(), 1.0, epsilon = 1e-15);
        let c = coupling_vector(-1, Y, &g).unwrap();
        assert!(PolVector::circular_plus().inner(&c).norm() < 1e-15);
    }

    #[test]
    fn spherical_vectors_are_orthonormal() {
        let n = [0.3, -0.5, 0.81];
        let l = norm(n);
        let n = n.map(|c| c / l);
        let ys: Vec<_> = (-1..=1).map(|m| spherical_vector(m, n).unwrap()).collect();
        for (i, a) in ys.iter().enumerate() {
            for (j, b) in ys.iter().enumerate() {
                let ip: Complex64 = (0..3).map(|k| a[k].conj() * b[k]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip - want).norm() < 1e-15);
            }
        }
    }
}
