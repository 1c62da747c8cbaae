//! Monodromy data of hyperelliptic odd coverings of degree `4g`.
//!
//! A tuple stores only the images `t_1, ..., t_2g` of the loops around
//! `B_1, ..., B_2g`. The images of the loops around `-B_i` are always the
//! conjugates `l^-1 t_i l` by the fixed involution `l = (1 2)(3 4)...(4g-1 4g)`,
//! and the loop around infinity maps to
//! `t_1 ... t_2g (l^-1 t_1 l) ... (l^-1 t_2g l) = (A l)^2`.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::perm::{self, CycleType, PermError, Permutation};

pub const DEFAULT_MAX_ATTEMPTS: u32 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonodromyError {
    #[error("invalid profile: {0}")]
    InvalidProfile(&'static str),
    #[error("invalid tuple: {0}")]
    InvalidTuple(&'static str),
    #[error("no transitive tuple found after {attempts} attempts")]
    TransitivityNotFound { attempts: u32 },
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// Ordered multiplicities `(n_1, ..., n_{2g+2})` of `F = sum n_i P_i`, with
/// `sum n_i = g - 1`; the fibre over infinity has cycle lengths `2 n_i + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RamificationProfile {
    g: u32,
    n: Vec<u32>,
}

impl RamificationProfile {
    pub fn new(g: u32, n: Vec<u32>) -> Result<Self, MonodromyError> {
        if g == 0 {
            return Err(MonodromyError::InvalidProfile("genus must be at least 1"));
        }
        if n.len() != 2 * g as usize + 2 {
            return Err(MonodromyError::InvalidProfile("profile length must be 2g+2"));
        }
        if n.iter().map(|&x| x as u64).sum::<u64>() != (g - 1) as u64 {
            return Err(MonodromyError::InvalidProfile("profile entries must sum to g-1"));
        }
        Ok(RamificationProfile { g, n })
    }

    /// The profile `(0, 0, 0, 0)` of genus one.
    pub fn trivial_elliptic() -> Self {
        RamificationProfile { g: 1, n: alloc::vec![0; 4] }
    }

    pub fn genus(&self) -> u32 {
        self.g
    }

    pub fn multiplicities(&self) -> &[u32] {
        &self.n
    }

    pub fn degree(&self) -> usize {
        4 * self.g as usize
    }

    /// Cycle lengths `2 n_i + 1` in profile order.
    pub fn cycle_lengths(&self) -> Vec<usize> {
        self.n.iter().map(|&x| 2 * x as usize + 1).collect()
    }

    /// Cycle type that the infinity monodromy must have.
    pub fn infinity_cycle_type(&self) -> CycleType {
        CycleType::from_parts(self.cycle_lengths())
    }
}

/// Images `t_1, ..., t_2g` in `S_{4g}` of the loops around `B_1, ..., B_2g`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonodromyTuple {
    g: u32,
    tau: Vec<Permutation>,
}

impl MonodromyTuple {
    /// Checks shape only (length `2g`, degree `4g`); whether entries are
    /// three-cycles is left to [`check_conditions`].
    pub fn new(g: u32, tau: Vec<Permutation>) -> Result<Self, MonodromyError> {
        if g == 0 {
            return Err(MonodromyError::InvalidTuple("genus must be at least 1"));
        }
        if tau.len() != 2 * g as usize {
            return Err(MonodromyError::InvalidTuple("tuple must have 2g entries"));
        }
        if tau.iter().any(|t| t.degree() != 4 * g as usize) {
            return Err(MonodromyError::InvalidTuple("entries must have degree 4g"));
        }
        Ok(MonodromyTuple { g, tau })
    }

    pub fn genus(&self) -> u32 {
        self.g
    }

    pub fn degree(&self) -> usize {
        4 * self.g as usize
    }

    pub fn tau(&self) -> &[Permutation] {
        &self.tau
    }

    /// `A = t_1 ... t_2g`.
    pub fn product(&self) -> Permutation {
        self.tau.iter().fold(Permutation::identity(self.degree()), |acc, t| acc.then(t))
    }

    /// The derived images `l^-1 t_i l`.
    pub fn iota_images(&self) -> Vec<Permutation> {
        let ell = canonical_ell(self.g);
        self.tau.iter().map(|t| t.conjugate_unchecked(&ell)).collect()
    }

    /// All finite branch permutations: the `t_i` followed by their `l`-conjugates.
    pub fn finite_branch_permutations(&self) -> Vec<Permutation> {
        let mut all = self.tau.clone();
        all.extend(self.iota_images());
        all
    }

    /// Same tuple with every entry conjugated by `by`.
    pub fn conjugated(&self, by: &Permutation) -> Result<Self, MonodromyError> {
        let tau = self.tau.iter().map(|t| t.conjugate(by)).collect::<Result<Vec<_>, _>>()?;
        Ok(MonodromyTuple { g: self.g, tau })
    }

    /// Whether the monodromy group acts transitively on the fibre.
    pub fn is_transitive(&self) -> bool {
        perm::is_transitive_on(self.degree(), &self.finite_branch_permutations())
            .expect("degrees checked at construction")
    }
}

/// `l = (1 2)(3 4)...(4g-1 4g)` in `S_{4g}`.
pub fn canonical_ell(g: u32) -> Permutation {
    let d = 4 * g as usize;
    Permutation::from_zero_based((0..d as u32).map(|i| i ^ 1).collect())
}

/// Infinity monodromy as the direct product of all `4g` branch permutations.
pub fn gamma_infinity(t: &MonodromyTuple) -> Permutation {
    t.finite_branch_permutations().iter().fold(Permutation::identity(t.degree()), |acc, p| acc.then(p))
}

/// Infinity monodromy through the closed form `(A l)^2`.
pub fn gamma_infinity_via_square(t: &MonodromyTuple) -> Permutation {
    let b = t.product().then(&canonical_ell(t.g));
    b.then(&b)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionReport {
    /// (i): every stored entry is a three-cycle.
    pub three_cycles: bool,
    /// Per-entry results behind `three_cycles`.
    pub three_cycle_entries: Vec<bool>,
    /// (ii): holds by representation; the derived images are recorded.
    pub iota_compatible: bool,
    pub iota_images: Vec<Permutation>,
    /// (iii): infinity monodromy has `2g+2` cycles, all odd.
    pub infinity_odd: bool,
    pub infinity_cycle_type: CycleType,
    /// Multiset match against a requested profile, when one was given.
    pub profile_match: Option<bool>,
}

impl ConditionReport {
    pub fn all_pass(&self) -> bool {
        self.three_cycles && self.iota_compatible && self.infinity_odd && self.profile_match.unwrap_or(true)
    }
}

pub fn check_conditions(t: &MonodromyTuple, profile: Option<&RamificationProfile>) -> ConditionReport {
    let three_cycle_entries: Vec<bool> = t.tau.iter().map(Permutation::is_three_cycle).collect();
    let infinity_cycle_type = gamma_infinity(t).cycle_type();
    let expected_cycles = 2 * t.g as usize + 2;
    let infinity_odd = infinity_cycle_type.all_odd() && infinity_cycle_type.num_cycles() == expected_cycles;
    let profile_match = profile.map(|p| p.genus() == t.g && p.infinity_cycle_type() == infinity_cycle_type);
    ConditionReport {
        three_cycles: three_cycle_entries.iter().all(|&b| b),
        three_cycle_entries,
        iota_compatible: true,
        iota_images: t.iota_images(),
        infinity_odd,
        infinity_cycle_type,
        profile_match,
    }
}

/// Constructs an all-pass, transitive tuple realising `profile`.
///
/// Each attempt places a permutation `G` of the profile's cycle type, takes an
/// even square root `B`, sets `A = B l` and factors `A` into exactly `2g`
/// three-cycles, so that `(A l)^2 = G`. Attempt 0 uses the canonical
/// placement (longest cycles first on consecutive points) and the plain
/// factorization; later attempts relabel `G` and factor a conjugate `c^-1 A c`,
/// both drawn from a generator seeded by `seed`.
pub fn build_tuple(
    profile: &RamificationProfile,
    seed: u64,
    max_attempts: u32,
) -> Result<MonodromyTuple, MonodromyError> {
    let g = profile.genus();
    let d = profile.degree();
    let ell = canonical_ell(g);
    let base = canonical_placement(profile);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<u32> = (0..d as u32).collect();

    for attempt in 0..max_attempts {
        let (placed, relabel) = if attempt == 0 {
            (base.clone(), Permutation::identity(d))
        } else {
            points.shuffle(&mut rng);
            let relabel = Permutation::from_zero_based(points.clone());
            points.shuffle(&mut rng);
            let c = Permutation::from_zero_based(points.clone());
            (base.conjugate_unchecked(&relabel), c)
        };
        let root = placed.alternating_square_root()?;
        let a = root.then(&ell);
        let conj = a.conjugate_unchecked(&relabel);
        let back = relabel.inverse();
        let tau: Vec<Permutation> =
            conj.factor_into_three_cycles()?.iter().map(|s| s.conjugate_unchecked(&back)).collect();
        debug_assert_eq!(tau.len(), 2 * g as usize);
        let t = MonodromyTuple { g, tau };
        if t.is_transitive() && check_conditions(&t, Some(profile)).all_pass() {
            return Ok(t);
        }
    }
    Err(MonodromyError::TransitivityNotFound { attempts: max_attempts })
}

fn canonical_placement(profile: &RamificationProfile) -> Permutation {
    let mut lengths = profile.cycle_lengths();
    lengths.sort_unstable_by(|a, b| b.cmp(a));
    let mut images: Vec<u32> = (0..profile.degree() as u32).collect();
    let mut start = 0usize;
    for len in lengths {
        for j in 0..len {
            images[start + j] = (start + (j + 1) % len) as u32;
        }
        start += len;
    }
    Permutation::from_zero_based(images)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn p(d: usize, s: &str) -> Permutation {
        Permutation::parse_cycles(d, s).unwrap()
    }

    fn tuple(g: u32, entries: &[&str]) -> MonodromyTuple {
        let d = 4 * g as usize;
        MonodromyTuple::new(g, entries.iter().map(|s| p(d, s)).collect()).unwrap()
    }

    #[test]
    fn ell_examples() {
        assert_eq!(canonical_ell(1), p(4, "(1 2)(3 4)"));
        assert_eq!(canonical_ell(2), p(8, "(1 2)(3 4)(5 6)(7 8)"));
        for g in 1..=10 {
            let ell = canonical_ell(g);
            assert!(ell.parity().is_even());
            assert!(ell.then(&ell).is_identity());
            assert_eq!(ell.support_size(), 4 * g as usize);
        }
    }

    #[test]
    fn gamma_infinity_of_inverse_pair_is_identity() {
        let t = tuple(1, &["(1 2 3)", "(1 3 2)"]);
        assert!(gamma_infinity(&t).is_identity());
        assert!(gamma_infinity_via_square(&t).is_identity());
    }

    #[test]
    fn gamma_infinity_routes_agree() {
        let t = tuple(1, &["(1 2 3)", "(1 2 4)"]);
        let direct = gamma_infinity(&t);
        assert_eq!(direct, gamma_infinity_via_square(&t));
        // A = (1 4)(2 3) and A l = (1 3)(2 4), an involution.
        assert!(direct.is_identity());
    }

    #[test]
    fn conditions_examples() {
        let t = tuple(1, &["(1 2 3)", "(1 3 2)"]);
        let r = check_conditions(&t, Some(&RamificationProfile::trivial_elliptic()));
        assert!(r.all_pass());
        assert_eq!(r.infinity_cycle_type.parts(), &[1, 1, 1, 1]);
        assert_eq!(r.iota_images, vec![p(4, "(2 1 4)"), p(4, "(2 4 1)")]);

        let t = tuple(1, &["(1 2 3)", "(1 2 3)"]);
        let r = check_conditions(&t, None);
        let expected = gamma_infinity_via_square(&t).cycle_type();
        assert_eq!(r.infinity_cycle_type, expected);
        assert_eq!(r.infinity_odd, expected.all_odd() && expected.num_cycles() == 4);

        let t = tuple(1, &["(1 2)", "(1 3 2)"]);
        let r = check_conditions(&t, None);
        assert!(!r.three_cycles);
        assert_eq!(r.three_cycle_entries, vec![false, true]);
        assert!(!r.all_pass());
    }

    #[test]
    fn profile_validation() {
        assert!(RamificationProfile::new(2, vec![1, 0, 0, 0, 0, 0]).is_ok());
        assert!(matches!(RamificationProfile::new(2, vec![1, 1, 0, 0, 0, 0]), Err(MonodromyError::InvalidProfile(_))));
        assert!(matches!(RamificationProfile::new(2, vec![1, 0, 0]), Err(MonodromyError::InvalidProfile(_))));
        assert!(matches!(RamificationProfile::new(0, vec![]), Err(MonodromyError::InvalidProfile(_))));
    }

    #[test]
    fn tuple_validation() {
        assert!(MonodromyTuple::new(1, vec![p(4, "(1 2 3)")]).is_err());
        assert!(MonodromyTuple::new(1, vec![p(5, "(1 2 3)"), p(5, "(1 2 3)")]).is_err());
    }

    #[test]
    fn build_genus_one() {
        let profile = RamificationProfile::trivial_elliptic();
        let t = build_tuple(&profile, 0, DEFAULT_MAX_ATTEMPTS).unwrap();
        assert!(check_conditions(&t, Some(&profile)).all_pass());
        assert!(t.is_transitive());
    }

    #[test]
    fn build_genus_two() {
        let profile = RamificationProfile::new(2, vec![1, 0, 0, 0, 0, 0]).unwrap();
        let t = build_tuple(&profile, 0, DEFAULT_MAX_ATTEMPTS).unwrap();
        assert_eq!(t.tau().len(), 4);
        let r = check_conditions(&t, Some(&profile));
        assert!(r.all_pass());
        assert_eq!(r.infinity_cycle_type.parts(), &[3, 1, 1, 1, 1, 1]);
    }

    #[test]
    fn build_is_deterministic() {
        let profile = RamificationProfile::new(3, vec![0, 1, 0, 0, 1, 0, 0, 0]).unwrap();
        let a = build_tuple(&profile, 7, DEFAULT_MAX_ATTEMPTS).unwrap();
        let b = build_tuple(&profile, 7, DEFAULT_MAX_ATTEMPTS).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn centralizer_conjugation_preserves_status() {
        let profile = RamificationProfile::new(2, vec![0, 0, 0, 1, 0, 0]).unwrap();
        let t = build_tuple(&profile, 3, DEFAULT_MAX_ATTEMPTS).unwrap();
        // (1 2) and the block swap (1 3)(2 4) both commute with l.
        for c in [p(8, "(1 2)"), p(8, "(1 3)(2 4)"), p(8, "(3 4)(5 7 1)(6 8 2)")] {
            assert_eq!(c.then(&canonical_ell(2)), canonical_ell(2).then(&c));
            let u = t.conjugated(&c).unwrap();
            assert!(check_conditions(&u, Some(&profile)).all_pass());
            assert!(u.is_transitive());
        }
    }
}
