use core::f64::consts::PI;

use num_complex::Complex64;

use super::EllipticError;

const MAX_TERMS: usize = 4096;
const DEGENERACY_MARGIN: f64 = 1e-6;

/// The lattice `Z + tau Z` with its Weierstrass quasi-periods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    tau: Complex64,
    q: Complex64,
    eta1: Complex64,
    eta2: Complex64,
    legendre_residual: f64,
}

/// Builds the lattice for `tau`, with `zeta(z + 1) = zeta(z) + eta1` and
/// `zeta(z + tau) = zeta(z) + eta2`. Convention: `eta1 tau - eta2 = 2 pi i`.
pub fn lattice_init(tau: Complex64) -> Result<Lattice, EllipticError> {
    if !tau.re.is_finite() || !tau.im.is_finite() || tau.im <= 0.0 {
        return Err(EllipticError::DegenerateLattice);
    }
    if libm::exp(-PI * tau.im) >= 1.0 - DEGENERACY_MARGIN {
        return Err(EllipticError::DegenerateLattice);
    }
    let q = (Complex64::i() * PI * tau).exp();
    let mut lat = Lattice {
        tau,
        q,
        eta1: Complex64::new(0.0, 0.0),
        eta2: Complex64::new(0.0, 0.0),
        legendre_residual: f64::INFINITY,
    };
    let d = lat.theta1(Complex64::new(0.0, 0.0));
    lat.eta1 = -(PI * PI / 3.0) * d[3] / d[1];
    // Straddle the real axis so both evaluations stay near the fundamental strip.
    let z = Complex64::new(0.1234, 0.0) - 0.45 * tau;
    lat.eta2 = lat.zeta_raw(z + tau) - lat.zeta_raw(z);
    lat.legendre_residual = (lat.eta1 * tau - lat.eta2 - Complex64::new(0.0, 2.0 * PI)).norm();
    if !lat.eta1.is_finite() || !lat.eta2.is_finite() {
        return Err(EllipticError::DegenerateLattice);
    }
    Ok(lat)
}

impl Lattice {
    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    /// Nome `e^{i pi tau}`.
    pub fn nome(&self) -> Complex64 {
        self.q
    }

    pub fn quasi_periods(&self) -> (Complex64, Complex64) {
        (self.eta1, self.eta2)
    }

    pub fn legendre_residual(&self) -> f64 {
        self.legendre_residual
    }

    /// The 2-torsion representatives `0, 1/2, tau/2, (1 + tau)/2`.
    pub fn torsion_points(&self) -> [Complex64; 4] {
        let half = Complex64::new(0.5, 0.0);
        [Complex64::new(0.0, 0.0), half, 0.5 * self.tau, half + 0.5 * self.tau]
    }

    /// Lattice coordinates `(x, y)` with `z = x + y tau`.
    pub fn coordinates(&self, z: Complex64) -> (f64, f64) {
        let y = z.im / self.tau.im;
        (z.re - y * self.tau.re, y)
    }

    /// `z = w + m + n tau` with `w` in the centred fundamental parallelogram.
    pub fn reduce(&self, z: Complex64) -> (Complex64, f64, f64) {
        let (x, y) = self.coordinates(z);
        let (m, n) = (libm::round(x), libm::round(y));
        (z - m - n * self.tau, m, n)
    }

    /// Distance from `z` to the nearest lattice point.
    pub fn distance_to_lattice(&self, z: Complex64) -> f64 {
        let (w, _, _) = self.reduce(z);
        let mut best = f64::INFINITY;
        for j in -1..=1 {
            for k in -1..=1 {
                best = best.min((w + j as f64 + k as f64 * self.tau).norm());
            }
        }
        best
    }

    /// `theta_1(v) / q^{1/4}` and its first three derivatives.
    pub fn theta1(&self, v: Complex64) -> [Complex64; 4] {
        let mut out = [Complex64::new(0.0, 0.0); 4];
        let growth = v.im.abs();
        let qabs = self.q.norm();
        let log_q = Complex64::i() * PI * self.tau;
        for n in 0..MAX_TERMS {
            let k = (2 * n + 1) as f64;
            let weight = 2.0 * (log_q * (n * (n + 1)) as f64).exp() * if n % 2 == 0 { 1.0 } else { -1.0 };
            let (s, c) = ((k * v).sin(), (k * v).cos());
            out[0] += weight * s;
            out[1] += weight * k * c;
            out[2] -= weight * k * k * s;
            out[3] -= weight * k * k * k * c;
            let bound = libm::pow(qabs, (n * (n + 1)) as f64) * libm::exp((k - 1.0) * growth) * k * k * k;
            if n > 0 && bound < 1e-18 {
                break;
            }
        }
        out
    }

    fn zeta_raw(&self, z: Complex64) -> Complex64 {
        let d = self.theta1(PI * z);
        self.eta1 * z + PI * d[1] / d[0]
    }

    /// Weierstrass zeta function.
    pub fn zeta(&self, z: Complex64) -> Complex64 {
        let (w, m, n) = self.reduce(z);
        self.zeta_raw(w) + m * self.eta1 + n * self.eta2
    }

    /// Weierstrass `p = -zeta'`.
    pub fn wp(&self, z: Complex64) -> Complex64 {
        let (w, _, _) = self.reduce(z);
        let d = self.theta1(PI * w);
        let r = d[1] / d[0];
        -self.eta1 - PI * PI * (d[2] / d[0] - r * r)
    }
}
