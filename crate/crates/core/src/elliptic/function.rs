use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::lattice::Lattice;
use super::{c, EllipticError};

/// Residues at the four 2-torsion points, in the order of
/// [`Lattice::torsion_points`].
pub type ResidueVector = [Complex64; 4];

const RESIDUE_SUM_TOL: f64 = 1e-10;

/// `f(z) = sum a_i zeta(z - t_i) + c` with `c` fixed by `f(-z) = -f(z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntiInvariantFunction {
    lattice: Lattice,
    a: ResidueVector,
    constant: Complex64,
}

pub fn build_f(lat: &Lattice, a: &ResidueVector) -> Result<AntiInvariantFunction, EllipticError> {
    let scale = a.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let sum: Complex64 = a.iter().sum();
    if !sum.is_finite() || sum.norm() > RESIDUE_SUM_TOL * scale.max(1.0) {
        return Err(EllipticError::ResidueSumNonzero(sum.norm()));
    }
    let mut f = AntiInvariantFunction { lattice: *lat, a: *a, constant: c(0.0, 0.0) };
    let reference = c(0.2113, 0.0) + 0.3271 * lat.tau();
    f.constant = -0.5 * (f.eval(reference) + f.eval(-reference));
    Ok(f)
}

impl AntiInvariantFunction {
    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn residues(&self) -> &ResidueVector {
        &self.a
    }

    pub fn constant(&self) -> Complex64 {
        self.constant
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let t = self.lattice.torsion_points();
        (0..4).map(|i| self.a[i] * self.lattice.zeta(z - t[i])).sum::<Complex64>() + self.constant
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let t = self.lattice.torsion_points();
        -(0..4).map(|i| self.a[i] * self.lattice.wp(z - t[i])).sum::<Complex64>()
    }

    /// Distance from `z` to the nearest pole candidate (any 2-torsion translate).
    pub fn pole_distance(&self, z: Complex64) -> f64 {
        self.lattice
            .torsion_points()
            .iter()
            .map(|&t| self.lattice.distance_to_lattice(z - t))
            .fold(f64::INFINITY, f64::min)
    }

    /// Distance from the segment `a -> b` to the nearest pole candidate.
    pub fn segment_pole_distance(&self, a: Complex64, b: Complex64) -> f64 {
        let lat = &self.lattice;
        let (xa, ya) = lat.coordinates(a);
        let (xb, yb) = lat.coordinates(b);
        let span = |u: f64, v: f64| (libm::floor(u.min(v)) as i64 - 1)..=(libm::ceil(u.max(v)) as i64 + 1);
        let mut best = f64::INFINITY;
        for t in lat.torsion_points() {
            for j in span(xa, xb) {
                for k in span(ya, yb) {
                    let p = t + j as f64 + k as f64 * lat.tau();
                    best = best.min(point_segment_distance(p, a, b));
                }
            }
        }
        best
    }

    /// A polyline from `from` to `to` staying at least `guard` from every pole.
    pub fn route(&self, from: Complex64, to: Complex64, guard: f64) -> Option<Vec<Complex64>> {
        if self.segment_pole_distance(from, to) >= guard {
            return Some(vec![from, to]);
        }
        let d = to - from;
        let normal = if d.norm() > 0.0 { c(0.0, 1.0) * d / d.norm() } else { c(1.0, 0.0) };
        let mid = 0.5 * (from + to);
        let unit = 0.1 * self.lattice.tau().im.min(1.0);
        for k in 1..=6 {
            for sign in [1.0, -1.0] {
                let via = mid + sign * k as f64 * unit * normal;
                if self.segment_pole_distance(from, via) >= guard && self.segment_pole_distance(via, to) >= guard {
                    return Some(vec![from, via, to]);
                }
            }
        }
        None
    }
}

fn point_segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    let s = if len2 == 0.0 { 0.0 } else { ((p - a) * d.conj()).re / len2 };
    (a + s.clamp(0.0, 1.0) * d - p).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::lattice::lattice_init;
    use core::f64::consts::PI;

    fn sample_residues() -> ResidueVector {
        [c(1.0, 0.5), c(-0.3, 0.2), c(0.7, -1.1), c(-1.4, 0.4)]
    }

    /// Trapezoid rule on a small circle, exponentially accurate for periodic
    /// analytic integrands.
    fn contour_residue(f: &AntiInvariantFunction, centre: Complex64, radius: f64) -> Complex64 {
        let n = 256;
        let mut sum = c(0.0, 0.0);
        for k in 0..n {
            let e = (c(0.0, 2.0 * PI * k as f64 / n as f64)).exp();
            sum += f.eval(centre + radius * e) * radius * e;
        }
        sum / n as f64
    }

    #[test]
    fn residues_match_contour_integrals() {
        for tau in [c(0.0, 1.0), c(0.25, 1.1), c(-0.3, 0.9)] {
            let lat = lattice_init(tau).unwrap();
            let a = sample_residues();
            let f = build_f(&lat, &a).unwrap();
            let r = 0.1 * tau.im.min(1.0);
            for (i, t) in lat.torsion_points().iter().enumerate() {
                assert!((contour_residue(&f, *t, r) - a[i]).norm() < 1e-9, "{tau} {i}");
                // Same pole seen from a translated copy.
                assert!((contour_residue(&f, *t + 1.0 + tau, r) - a[i]).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn f_is_odd_and_doubly_periodic() {
        let lat = lattice_init(c(0.25, 1.1)).unwrap();
        let f = build_f(&lat, &sample_residues()).unwrap();
        for z in [c(0.13, 0.29), c(-0.37, 0.52), c(0.8, -0.6)] {
            assert!((f.eval(-z) + f.eval(z)).norm() < 1e-10);
            assert!((f.eval(z + 1.0) - f.eval(z)).norm() < 1e-10);
            assert!((f.eval(z + lat.tau()) - f.eval(z)).norm() < 1e-10);
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let lat = lattice_init(c(0.0, 1.0)).unwrap();
        let f = build_f(&lat, &sample_residues()).unwrap();
        let z = c(0.21, 0.17);
        let h = 1e-5;
        let fd = (f.eval(z + h) - f.eval(z - h)) / (2.0 * h);
        assert!((f.derivative(z) - fd).norm() < 1e-6);
    }

    #[test]
    fn nonzero_residue_sum_rejected() {
        let lat = lattice_init(c(0.0, 1.0)).unwrap();
        let a = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        assert!(matches!(build_f(&lat, &a), Err(EllipticError::ResidueSumNonzero(_))));
    }

    #[test]
    fn routes_avoid_poles() {
        let lat = lattice_init(c(0.0, 1.0)).unwrap();
        let f = build_f(&lat, &sample_residues()).unwrap();
        // The straight segment passes through the pole at 1/2.
        let (a, b) = (c(0.2, 0.0), c(0.8, 0.0));
        assert!(f.segment_pole_distance(a, b) < 1e-12);
        let path = f.route(a, b, 0.05).unwrap();
        assert_eq!(path.len(), 3);
        assert!(path.windows(2).all(|w| f.segment_pole_distance(w[0], w[1]) >= 0.05));
        assert!((f.pole_distance(c(0.5, 0.5)) - 0.0).abs() < 1e-12);
    }
}
