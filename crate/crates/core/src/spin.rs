//! Effective theta characteristics supported on Weierstrass points and the
//! residue quadric they induce on `L = { x : sum x_i = 0 }`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_rational::Ratio;
use thiserror::Error;

use crate::monodromy::RamificationProfile;
use crate::perm::Parity;

pub type Rational = Ratio<i128>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpinError {
    #[error("invalid profile: {0}")]
    InvalidProfile(&'static str),
    #[error("expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// The hyperplane `sum x_i = 0` in `C^{2g+2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResidueSpace {
    pub g: u32,
}

impl ResidueSpace {
    pub fn ambient(&self) -> usize {
        2 * self.g as usize + 2
    }

    pub fn dimension(&self) -> usize {
        self.ambient() - 1
    }

    pub fn contains(&self, x: &[Complex64], tol: f64) -> bool {
        x.len() == self.ambient() && x.iter().sum::<Complex64>().norm() <= tol
    }
}

/// All ordered profiles of genus `g` in lexicographic order.
pub fn enumerate_profiles(g: u32) -> Vec<RamificationProfile> {
    assert!(g >= 1, "genus must be positive");
    let slots = 2 * g as usize + 2;
    let mut out = Vec::new();
    let mut current = vec![0u32; slots];
    fill_profiles(g, 0, g - 1, &mut current, &mut out);
    out
}

fn fill_profiles(g: u32, slot: usize, remaining: u32, current: &mut Vec<u32>, out: &mut Vec<RamificationProfile>) {
    if slot + 1 == current.len() {
        current[slot] = remaining;
        out.push(RamificationProfile::new(g, current.clone()).expect("sums to g-1"));
        return;
    }
    for v in 0..=remaining {
        current[slot] = v;
        fill_profiles(g, slot + 1, remaining - v, current, out);
    }
}

/// `binom(3g, g-1)`: ways to distribute degree `g-1` over `2g+2` labelled points.
pub fn count_profiles(g: u32) -> u128 {
    assert!(g >= 1, "genus must be positive");
    binomial(3 * g as u128, (g - 1) as u128)
}

pub fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpinStructure {
    pub parity: Parity,
    pub h0: u32,
}

/// Parity of `O(F)` via `2 P_i ~ g^1_2`: with `T = { i : n_i odd }` one gets
/// `F ~ m g^1_2 + sum_{i in T} P_i` where `m = (g - 1 - |T|) / 2`, and
/// `h0 = m + 1`.
pub fn spin_parity(p: &RamificationProfile) -> Result<SpinStructure, SpinError> {
    let g = p.genus();
    let odd = p.multiplicities().iter().filter(|&&n| n % 2 == 1).count() as u32;
    if odd > g - 1 || !(g - 1 - odd).is_multiple_of(2) {
        return Err(SpinError::InvalidProfile("odd-multiplicity count incompatible with degree g-1"));
    }
    let h0 = (g - 1 - odd) / 2 + 1;
    let parity = if h0.is_multiple_of(2) { Parity::Even } else { Parity::Odd };
    Ok(SpinStructure { parity, h0 })
}

/// `sum x_i^2 / (2 n_i + 1)` on `C^{2g+2}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueQuadric {
    profile: RamificationProfile,
    weights: Vec<Rational>,
}

pub fn residue_quadric(p: &RamificationProfile) -> ResidueQuadric {
    let weights = p.cycle_lengths().iter().map(|&len| Rational::new(1, len as i128)).collect();
    ResidueQuadric { profile: p.clone(), weights }
}

impl ResidueQuadric {
    pub fn profile(&self) -> &RamificationProfile {
        &self.profile
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.weights
    }

    fn check_len(&self, len: usize) -> Result<(), SpinError> {
        if len != self.weights.len() {
            return Err(SpinError::DimensionMismatch { expected: self.weights.len(), got: len });
        }
        Ok(())
    }

    pub fn evaluate(&self, x: &[Complex64]) -> Result<Complex64, SpinError> {
        self.check_len(x.len())?;
        Ok(self.weights.iter().zip(x).map(|(w, xi)| xi * xi * (*w.numer() as f64 / *w.denom() as f64)).sum())
    }

    pub fn evaluate_exact(&self, x: &[Rational]) -> Result<Rational, SpinError> {
        self.check_len(x.len())?;
        Ok(self.weights.iter().zip(x).fold(Rational::from_integer(0), |acc, (w, xi)| acc + *w * *xi * *xi))
    }

    /// Gram matrix of the form on the basis `e_i - e_{last}` of `L`.
    pub fn restricted_gram(&self) -> Vec<Vec<Rational>> {
        let k = self.weights.len() - 1;
        let last = self.weights[k];
        (0..k).map(|i| (0..k).map(|j| if i == j { self.weights[i] + last } else { last }).collect()).collect()
    }

    /// Exact rank of the form restricted to `L`.
    pub fn rank_on_residue_space(&self) -> usize {
        rational_rank(self.restricted_gram())
    }

    /// Smooth in `P(L)` iff the restricted form has full rank `2g+1`.
    pub fn is_smooth(&self) -> bool {
        self.rank_on_residue_space() == self.weights.len() - 1
    }
}

#[allow(clippy::needless_range_loop)]
fn rational_rank(mut m: Vec<Vec<Rational>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let zero = Rational::from_integer(0);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| m[r][col] != zero) else {
            continue;
        };
        m.swap(rank, pivot);
        for r in 0..rows {
            if r != rank && m[r][col] != zero {
                let factor = m[r][col] / m[rank][col];
                for c in col..cols {
                    let delta = factor * m[rank][c];
                    m[r][c] -= delta;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(g: u32, n: &[u32]) -> RamificationProfile {
        RamificationProfile::new(g, n.to_vec()).unwrap()
    }

    #[test]
    fn profile_counts() {
        assert_eq!(enumerate_profiles(1), vec![RamificationProfile::trivial_elliptic()]);
        assert_eq!(count_profiles(1), 1);
        assert_eq!(enumerate_profiles(2).len(), 6);
        assert_eq!(count_profiles(2), 6);
        assert_eq!(count_profiles(3), 36);
        assert_eq!(enumerate_profiles(3).len(), 36);
    }

    #[test]
    fn profiles_are_lexicographic() {
        let ps = enumerate_profiles(3);
        assert!(ps.windows(2).all(|w| w[0].multiplicities() < w[1].multiplicities()));
        assert_eq!(ps[0].multiplicities(), &[0, 0, 0, 0, 0, 0, 0, 2]);
    }

    #[test]
    fn spin_parity_examples() {
        let s = spin_parity(&RamificationProfile::trivial_elliptic()).unwrap();
        assert_eq!((s.parity, s.h0), (Parity::Odd, 1));
        // P1 + P2 + P3 on genus 4.
        let s = spin_parity(&profile(4, &[1, 1, 1, 0, 0, 0, 0, 0, 0, 0])).unwrap();
        assert_eq!((s.parity, s.h0), (Parity::Odd, 1));
        // 2 P1 + P2 on genus 4.
        let s = spin_parity(&profile(4, &[2, 1, 0, 0, 0, 0, 0, 0, 0, 0])).unwrap();
        assert_eq!((s.parity, s.h0), (Parity::Even, 2));
        // 3 P1 on genus 4: one odd point, m = 1.
        let s = spin_parity(&profile(4, &[3, 0, 0, 0, 0, 0, 0, 0, 0, 0])).unwrap();
        assert_eq!(s.h0, 2);
    }

    #[test]
    fn quadric_examples() {
        let q = residue_quadric(&RamificationProfile::trivial_elliptic());
        assert!(q.coefficients().iter().all(|w| *w == Rational::from_integer(1)));
        assert!(q.is_smooth());
        let i = Complex64::i();
        let one = Complex64::new(1.0, 0.0);
        assert!(q.evaluate(&[one, -one, i, -i]).unwrap().norm() < 1e-15);
        assert_eq!(q.evaluate(&[one, -one, 0.0 * one, 0.0 * one]).unwrap(), Complex64::new(2.0, 0.0));
        assert_eq!(q.evaluate(&[one, -one]), Err(SpinError::DimensionMismatch { expected: 4, got: 2 }));
    }

    #[test]
    fn quadric_weights_follow_profile() {
        let q = residue_quadric(&profile(3, &[2, 0, 0, 0, 0, 0, 0, 0]));
        assert_eq!(q.coefficients()[0], Rational::new(1, 5));
        let x: Vec<Rational> = [5, -5, 0, 0, 0, 0, 0, 0].iter().map(|&v| Rational::from_integer(v)).collect();
        assert_eq!(q.evaluate_exact(&x).unwrap(), Rational::from_integer(30));
    }

    #[test]
    fn quadrics_smooth_up_to_genus_five() {
        for g in 1..=5 {
            for p in enumerate_profiles(g) {
                let q = residue_quadric(&p);
                assert_eq!(q.rank_on_residue_space(), 2 * g as usize + 1, "{p:?}");
            }
        }
    }

    #[test]
    fn rank_detects_degeneracy() {
        let one = Rational::from_integer(1);
        let zero = Rational::from_integer(0);
        assert_eq!(rational_rank(vec![vec![one, one], vec![one, one]]), 1);
        assert_eq!(rational_rank(vec![vec![zero, zero], vec![zero, zero]]), 0);
    }
}
