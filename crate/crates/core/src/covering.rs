//! Geometric certificates read off a monodromy tuple.

use alloc::vec::Vec;

use thiserror::Error;

use crate::monodromy::{self, canonical_ell, check_conditions, ConditionReport, MonodromyTuple, RamificationProfile};
use crate::perm::Permutation;
use crate::spin::{self, SpinStructure};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoveringError {
    #[error("monodromy group is not transitive")]
    NotTransitive,
    #[error("infinity monodromy is not a product of 2g+2 odd cycles")]
    NotOddProfile,
    #[error("monodromy conditions (i)-(iii) fail")]
    ConditionsFailed,
}

/// Contribution `d - #cycles` of one branch permutation to Riemann-Hurwitz.
fn branch_contribution(p: &Permutation) -> i64 {
    (p.degree() - p.cycle_decomposition().len()) as i64
}

/// Genus of the connected covering from `2 g_C - 2 = -2d + sum (d - #cycles)`,
/// summed over the `4g` finite branch permutations and infinity.
pub fn riemann_hurwitz_genus(t: &MonodromyTuple) -> Result<i64, CoveringError> {
    if !t.is_transitive() {
        return Err(CoveringError::NotTransitive);
    }
    let d = t.degree() as i64;
    let finite: i64 = t.finite_branch_permutations().iter().map(branch_contribution).sum();
    let infinity = branch_contribution(&monodromy::gamma_infinity(t));
    let euler = -2 * d + finite + infinity;
    debug_assert!(euler % 2 == 0);
    Ok(euler / 2 + 1)
}

/// Every cycle of every branch permutation has odd length.
pub fn is_odd_covering(t: &MonodromyTuple) -> bool {
    let all_odd = |p: &Permutation| p.cycle_type().all_odd();
    t.finite_branch_permutations().iter().all(all_odd) && all_odd(&monodromy::gamma_infinity(t))
}

/// `n_i = (len_i - 1) / 2` over the cycles of the infinity monodromy, in
/// canonical cycle order (by minimal element).
pub fn profile_from_tuple(t: &MonodromyTuple) -> Result<RamificationProfile, CoveringError> {
    let cycles = monodromy::gamma_infinity(t).cycle_decomposition();
    if cycles.len() != 2 * t.genus() as usize + 2 || cycles.iter().any(|c| c.len() % 2 == 0) {
        return Err(CoveringError::NotOddProfile);
    }
    let n = cycles.iter().map(|c| ((c.len() - 1) / 2) as u32).collect();
    RamificationProfile::new(t.genus(), n).map_err(|_| CoveringError::NotOddProfile)
}

/// Riemann-Hurwitz bookkeeping for the quotient `C' = C / alpha -> P^1 / iota`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientCertificate {
    pub g: u32,
    /// Degree `8g` of `C -> P^1 -> P^1/iota`.
    pub composite_degree: i64,
    /// Ramification needed over infinity for the composite: `6g - 2`.
    pub composite_infinity_needed: i64,
    /// For each `k`, the largest composite contribution over infinity reachable
    /// when exactly `k` of the `2g+2` points are fixed by the lift of `iota`.
    pub reachable_by_fixed_count: Vec<i64>,
    /// The unique `k` meeting `composite_infinity_needed`.
    pub fixed_points: u32,
    /// `deg(D_inf - supp D_inf)` for `C' -> P^1`.
    pub quotient_infinity_contribution: i64,
    /// Contribution of the `2g` free pairs over `0` (ramified in `P^1 -> P^1/iota` only).
    pub quotient_zero_contribution: i64,
    pub quotient_genus: i64,
}

/// Forces every point over infinity to be fixed and derives the quotient genus.
///
/// The composite `C -> P^1/iota` has degree `8g`, contribution `4g` over the
/// image of `0`, `4` over each of the `2g` images of the `B_i`, and over
/// infinity `sum_fixed (4 n_i + 1) + sum_unfixed 2 n_i`; genus `g` forces
/// this last term to `6g - 2`, which only `k = 2g + 2` achieves. Then
/// `C' -> P^1` has degree `4g`, contribution `2` at each of the `2g` images
/// of the `B_i`, `2g` over the image of `0` and `sum 2 n_i = 2g - 2` over
/// infinity, so `2 g' - 2 = -8g + 4g + 2g + 2g - 2` gives `g' = 0`.
pub fn quotient_report(t: &MonodromyTuple) -> Result<QuotientCertificate, CoveringError> {
    if !check_conditions(t, None).all_pass() || !t.is_transitive() {
        return Err(CoveringError::ConditionsFailed);
    }
    let profile = profile_from_tuple(t)?;
    let g = t.genus() as i64;
    let points = profile.multiplicities().len();
    let composite_degree = 8 * g;
    let composite_zero = 4 * g;
    let composite_branch = 4 * 2 * g;
    let composite_infinity_needed = (2 * g - 2) + 2 * composite_degree - composite_zero - composite_branch;

    // Fixing point i changes its contribution from 2 n_i to 4 n_i + 1.
    let mut gains: Vec<i64> = profile.multiplicities().iter().map(|&n| 2 * n as i64 + 1).collect();
    gains.sort_unstable_by(|a, b| b.cmp(a));
    let base: i64 = profile.multiplicities().iter().map(|&n| 2 * n as i64).sum();
    let reachable_by_fixed_count: Vec<i64> = (0..=points).map(|k| base + gains[..k].iter().sum::<i64>()).collect();
    let fixed_points = reachable_by_fixed_count
        .iter()
        .position(|&v| v == composite_infinity_needed)
        .ok_or(CoveringError::ConditionsFailed)? as u32;

    let quotient_degree = 4 * g;
    let quotient_branch = 2 * (2 * g);
    let quotient_zero_contribution = 2 * g;
    let quotient_infinity_contribution = base;
    let euler = -2 * quotient_degree + quotient_branch + quotient_zero_contribution + quotient_infinity_contribution;
    Ok(QuotientCertificate {
        g: t.genus(),
        composite_degree,
        composite_infinity_needed,
        reachable_by_fixed_count,
        fixed_points,
        quotient_infinity_contribution,
        quotient_zero_contribution,
        quotient_genus: euler / 2 + 1,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoveringReport {
    pub degree: usize,
    pub conditions: ConditionReport,
    pub transitive: bool,
    pub genus_upstairs: Option<i64>,
    pub odd: bool,
    pub profile: Option<RamificationProfile>,
    pub quotient: Option<QuotientCertificate>,
    pub fixed_points_over_infinity: Option<u32>,
    /// `B = A l` commutes with the infinity monodromy `B^2`.
    pub b_normalizes_gamma_infinity: bool,
    pub spin: Option<SpinStructure>,
}

impl CoveringReport {
    pub fn quotient_genus(&self) -> Option<i64> {
        self.quotient.as_ref().map(|q| q.quotient_genus)
    }

    /// Every check passed and the derived invariants take their expected values.
    pub fn all_pass(&self) -> bool {
        let g = self.degree as i64 / 4;
        self.conditions.all_pass()
            && self.transitive
            && self.odd
            && self.genus_upstairs == Some(g)
            && self.quotient_genus() == Some(0)
            && self.fixed_points_over_infinity == Some(2 * g as u32 + 2)
            && self.b_normalizes_gamma_infinity
            && self.profile.is_some()
    }
}

/// Runs every check; failures are recorded in the report.
pub fn verify_cover(t: &MonodromyTuple) -> CoveringReport {
    let conditions = check_conditions(t, None);
    let transitive = t.is_transitive();
    let genus_upstairs = riemann_hurwitz_genus(t).ok();
    let profile = profile_from_tuple(t).ok();
    let quotient = quotient_report(t).ok();
    let b = t.product().then(&canonical_ell(t.genus()));
    let gamma = monodromy::gamma_infinity(t);
    let b_normalizes_gamma_infinity = b.inverse().then(&gamma).then(&b) == gamma;
    let spin = profile.as_ref().and_then(|p| spin::spin_parity(p).ok());
    CoveringReport {
        degree: t.degree(),
        transitive,
        genus_upstairs,
        odd: is_odd_covering(t),
        fixed_points_over_infinity: quotient.as_ref().map(|q| q.fixed_points),
        quotient,
        profile,
        b_normalizes_gamma_infinity,
        spin,
        conditions,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monodromy::{build_tuple, DEFAULT_MAX_ATTEMPTS};
    use crate::perm::three_cycles;
    use alloc::vec;

    fn p(d: usize, s: &str) -> Permutation {
        Permutation::parse_cycles(d, s).unwrap()
    }

    #[test]
    fn genus_one_tuple() {
        let t = MonodromyTuple::new(1, vec![p(4, "(1 2 3)"), p(4, "(1 3 2)")]).unwrap();
        assert_eq!(riemann_hurwitz_genus(&t), Ok(1));
        assert!(is_odd_covering(&t));
        assert_eq!(profile_from_tuple(&t).unwrap().multiplicities(), &[0, 0, 0, 0]);
        let q = quotient_report(&t).unwrap();
        assert_eq!((q.quotient_genus, q.fixed_points), (0, 4));
        assert_eq!(q.composite_infinity_needed, 4);
        assert_eq!(q.reachable_by_fixed_count, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn non_transitive_tuple_is_rejected() {
        // Only 1..4 move, so 5..8 form separate orbits.
        let t =
            MonodromyTuple::new(2, vec![p(8, "(1 2 3)"), p(8, "(1 3 2)"), p(8, "(1 2 3)"), p(8, "(1 3 2)")]).unwrap();
        assert!(!t.is_transitive());
        assert_eq!(riemann_hurwitz_genus(&t), Err(CoveringError::NotTransitive));
        assert_eq!(quotient_report(&t), Err(CoveringError::ConditionsFailed));
    }

    #[test]
    fn wrong_cycle_count_is_not_an_odd_profile() {
        // Genus 2 with gamma_inf = id has 8 cycles instead of 6.
        let t =
            MonodromyTuple::new(2, vec![p(8, "(1 2 3)"), p(8, "(1 3 2)"), p(8, "(1 2 3)"), p(8, "(1 3 2)")]).unwrap();
        assert!(monodromy::gamma_infinity(&t).is_identity());
        assert_eq!(profile_from_tuple(&t), Err(CoveringError::NotOddProfile));
    }

    #[test]
    fn even_cycle_at_infinity_is_not_odd() {
        // Search genus-2 tuples for an infinity monodromy with an even cycle.
        let cycles = three_cycles(8);
        let found = cycles
            .iter()
            .flat_map(|a| cycles.iter().map(move |b| (a, b)))
            .map(|(a, b)| MonodromyTuple::new(2, vec![a.clone(), b.clone(), p(8, "(1 5 7)"), p(8, "(3 6 8)")]).unwrap())
            .find(|t| monodromy::gamma_infinity(t).cycle_type().parts().iter().any(|l| l % 2 == 0))
            .expect("counterexample exists");
        assert!(!is_odd_covering(&found));
        assert!(!verify_cover(&found).all_pass());
    }

    #[test]
    fn built_tuples_verify() {
        for (g, n) in [(1u32, vec![0u32, 0, 0, 0]), (2, vec![1, 0, 0, 0, 0, 0])] {
            let profile = RamificationProfile::new(g, n).unwrap();
            let t = build_tuple(&profile, 0, DEFAULT_MAX_ATTEMPTS).unwrap();
            let r = verify_cover(&t);
            assert!(r.all_pass(), "{r:?}");
            assert_eq!(r.genus_upstairs, Some(g as i64));
            assert_eq!(r.quotient_genus(), Some(0));
            let extracted = r.profile.unwrap();
            assert_eq!(extracted.infinity_cycle_type(), profile.infinity_cycle_type());
            assert_eq!(extracted.multiplicities().iter().sum::<u32>(), g - 1);
        }
    }

    #[test]
    fn corrupted_entry_fails_condition_one() {
        let profile = RamificationProfile::new(2, vec![1, 0, 0, 0, 0, 0]).unwrap();
        let t = build_tuple(&profile, 0, DEFAULT_MAX_ATTEMPTS).unwrap();
        let mut tau = t.tau().to_vec();
        tau[0] = p(8, "(1 2 3 4 5)");
        let bad = MonodromyTuple::new(2, tau).unwrap();
        let r = verify_cover(&bad);
        assert!(!r.conditions.three_cycles);
        assert!(!r.all_pass());
        assert_eq!(verify_cover(&bad), r);
    }
}
