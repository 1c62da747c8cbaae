//! Small dense complex linear algebra: companion-matrix roots and 3x3 solves.

#![allow(clippy::needless_range_loop)]

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

const MAX_SWEEPS: usize = 60;

/// Evaluates `sum c_k t^k` (coefficients in ascending order).
pub fn horner(coeffs: &[Complex64], t: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * t + c)
}

/// Roots of `sum c_k t^k` as eigenvalues of the companion matrix, found by
/// shifted complex QR on the Hessenberg form. Returns `None` if the leading
/// coefficient vanishes or the iteration stalls.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = coeffs.len().checked_sub(1)?;
    let lead = *coeffs.last()?;
    if n == 0 || lead.norm() == 0.0 {
        return None;
    }
    let mut h = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for j in 0..n {
        h[0][j] = -coeffs[n - 1 - j] / lead;
    }
    for i in 1..n {
        h[i][i - 1] = Complex64::new(1.0, 0.0);
    }
    let mut roots = hessenberg_eigenvalues(h)?;
    for r in roots.iter_mut() {
        *r = newton_polish(coeffs, *r);
    }
    Some(roots)
}

fn newton_polish(coeffs: &[Complex64], mut t: Complex64) -> Complex64 {
    let derivative: Vec<Complex64> = coeffs.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect();
    for _ in 0..3 {
        let d = horner(&derivative, t);
        if d.norm() == 0.0 {
            break;
        }
        let step = horner(coeffs, t) / d;
        if !step.is_finite() {
            break;
        }
        t -= step;
    }
    t
}

fn hessenberg_eigenvalues(mut h: Vec<Vec<Complex64>>) -> Option<Vec<Complex64>> {
    let n = h.len();
    let mut out = Vec::with_capacity(n);
    let mut hi = n;
    let mut stalled = 0usize;
    while hi > 0 {
        if hi == 1 {
            out.push(h[0][0]);
            break;
        }
        let mut lo = hi - 1;
        while lo > 0 {
            let scale = h[lo][lo].norm() + h[lo - 1][lo - 1].norm();
            if h[lo][lo - 1].norm() <= f64::EPSILON * scale.max(f64::MIN_POSITIVE) {
                h[lo][lo - 1] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi - 1 {
            out.push(h[hi - 1][hi - 1]);
            hi -= 1;
            stalled = 0;
            continue;
        }
        stalled += 1;
        if stalled > MAX_SWEEPS {
            return None;
        }
        let shift = if stalled.is_multiple_of(11) {
            h[hi - 1][hi - 1] + h[hi - 1][hi - 2].norm() * Complex64::new(0.75, 0.25)
        } else {
            wilkinson_shift(h[hi - 2][hi - 2], h[hi - 2][hi - 1], h[hi - 1][hi - 2], h[hi - 1][hi - 1])
        };
        qr_step(&mut h, lo, hi, shift);
    }
    Some(out)
}

/// Eigenvalue of `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half_tr = 0.5 * (a + d);
    let disc = (0.25 * (a - d) * (a - d) + b * c).sqrt();
    let (l1, l2) = (half_tr + disc, half_tr - disc);
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// One shifted QR sweep on rows and columns `lo..hi` via Givens rotations.
fn qr_step(h: &mut [Vec<Complex64>], lo: usize, hi: usize, shift: Complex64) {
    for k in lo..hi {
        h[k][k] -= shift;
    }
    let mut rotations = Vec::with_capacity(hi - lo);
    for k in lo..hi - 1 {
        let (x, y) = (h[k][k], h[k + 1][k]);
        let r = libm::sqrt(x.norm_sqr() + y.norm_sqr());
        let (c, s) = if r == 0.0 { (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)) } else { (x / r, y / r) };
        for j in k..hi {
            let (u, v) = (h[k][j], h[k + 1][j]);
            h[k][j] = c.conj() * u + s.conj() * v;
            h[k + 1][j] = -s * u + c * v;
        }
        rotations.push((c, s));
    }
    for (offset, &(c, s)) in rotations.iter().enumerate() {
        let k = lo + offset;
        for row in h.iter_mut().take((k + 2).min(hi)).skip(lo) {
            let (u, v) = (row[k], row[k + 1]);
            row[k] = u * c + v * s;
            row[k + 1] = -u * s.conj() + v * c.conj();
        }
    }
    for k in lo..hi {
        h[k][k] += shift;
    }
}

/// Solves `m x = b` by Gaussian elimination with partial pivoting.
pub fn solve3(mut m: [[Complex64; 3]; 3], mut b: [Complex64; 3]) -> Option<[Complex64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm()))?;
        if m[pivot][col].norm() == 0.0 {
            return None;
        }
        m.swap(col, pivot);
        b.swap(col, pivot);
        for r in col + 1..3 {
            let f = m[r][col] / m[col][col];
            for c in col..3 {
                let delta = f * m[col][c];
                m[r][c] -= delta;
            }
            let delta = f * b[col];
            b[r] -= delta;
        }
    }
    let mut x = [Complex64::new(0.0, 0.0); 3];
    for r in (0..3).rev() {
        let tail: Complex64 = (r + 1..3).map(|c| m[r][c] * x[c]).sum();
        x[r] = (b[r] - tail) / m[r][r];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}
