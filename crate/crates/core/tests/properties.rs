use std::collections::HashSet;

use num_complex::Complex64;
use proptest::prelude::*;

use oddcover_core::covering::verify_cover;
use oddcover_core::elliptic::{build_f, lattice_init, period_map};
use oddcover_core::enumeration::{count_classes, EnumerationTask, Shard};
use oddcover_core::monodromy::{build_tuple, canonical_ell, gamma_infinity, gamma_infinity_via_square};
use oddcover_core::spin::{enumerate_profiles, residue_quadric, spin_parity};
use oddcover_core::{Parity, PermError, Permutation};

fn permutation(max_degree: usize) -> impl Strategy<Value = Permutation> {
    (1..=max_degree)
        .prop_flat_map(|d| Just((1..=d).collect::<Vec<usize>>()).prop_shuffle())
        .prop_map(|v| Permutation::from_one_line(&v).unwrap())
}

fn pair_of_degree(max_degree: usize) -> impl Strategy<Value = (Permutation, Permutation)> {
    (1..=max_degree).prop_flat_map(|d| {
        let line = Just((1..=d).collect::<Vec<usize>>());
        (line.clone().prop_shuffle(), line.prop_shuffle())
            .prop_map(|(a, b)| (Permutation::from_one_line(&a).unwrap(), Permutation::from_one_line(&b).unwrap()))
    })
}

fn even_permutation(min: usize, max: usize) -> impl Strategy<Value = Permutation> {
    (min..=max).prop_flat_map(|d| Just((1..=d).collect::<Vec<usize>>()).prop_shuffle()).prop_map(|v| {
        let p = Permutation::from_one_line(&v).unwrap();
        if p.parity().is_even() {
            p
        } else {
            p.compose(&Permutation::cycle(p.degree(), &[1, 2]).unwrap()).unwrap()
        }
    })
}

/// Squares of all even permutations of degree `n`, by exhaustion.
fn alternating_squares(n: usize) -> HashSet<Permutation> {
    let mut out = HashSet::new();
    let mut v: Vec<usize> = (1..=n).collect();
    loop {
        let b = Permutation::from_one_line(&v).unwrap();
        if b.parity().is_even() {
            out.insert(b.compose(&b).unwrap());
        }
        if !next_permutation(&mut v) {
            break;
        }
    }
    out
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).unwrap();
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

proptest! {
    #[test]
    fn composition_is_associative((a, b) in pair_of_degree(9), c in any::<u64>()) {
        let d = a.degree();
        let mut rng_line: Vec<usize> = (1..=d).collect();
        rng_line.rotate_left((c % d as u64) as usize);
        let c = Permutation::from_one_line(&rng_line).unwrap();
        let left = a.compose(&b).unwrap().compose(&c).unwrap();
        let right = a.compose(&b.compose(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn inverse_cancels(p in permutation(10)) {
        prop_assert!(p.compose(&p.inverse()).unwrap().is_identity());
        prop_assert!(p.inverse().compose(&p).unwrap().is_identity());
    }

    #[test]
    fn parity_is_multiplicative((a, b) in pair_of_degree(10)) {
        prop_assert_eq!(a.compose(&b).unwrap().parity(), a.parity().times(b.parity()));
    }

    #[test]
    fn conjugation_preserves_cycle_type((a, b) in pair_of_degree(10)) {
        prop_assert_eq!(a.conjugate(&b).unwrap().cycle_type(), a.cycle_type());
    }

    #[test]
    fn cycle_notation_round_trips(p in permutation(10)) {
        let text = p.to_string();
        prop_assert_eq!(Permutation::parse_cycles(p.degree(), &text).unwrap(), p);
    }

    #[test]
    fn roots_square_back(p in even_permutation(1, 10)) {
        let sq = p.compose(&p).unwrap();
        prop_assert_eq!(sq.is_square_in_alternating(), Ok(true));
        let root = sq.alternating_square_root().unwrap();
        prop_assert_eq!(root.parity(), Parity::Even);
        prop_assert_eq!(root.compose(&root).unwrap(), sq);
    }

    #[test]
    fn factorization_has_exact_length(p in even_permutation(4, 12)) {
        let factors = p.factor_into_three_cycles().unwrap();
        prop_assert_eq!(factors.len(), p.degree() / 2);
        prop_assert!(factors.iter().all(Permutation::is_three_cycle));
        let product = factors.iter().fold(Permutation::identity(p.degree()), |acc, f| acc.compose(f).unwrap());
        prop_assert_eq!(product, p);
    }

    #[test]
    fn built_tuples_verify(seed in any::<u64>(), pick in 0usize..36) {
        let profiles = enumerate_profiles(3);
        let p = &profiles[pick];
        let t = build_tuple(p, seed, 10_000).unwrap();
        let report = verify_cover(&t);
        prop_assert!(report.all_pass());
        prop_assert_eq!(report.genus_upstairs, Some(3));
        prop_assert_eq!(gamma_infinity(&t), gamma_infinity_via_square(&t));
    }

    #[test]
    fn centralizer_conjugation_keeps_reports(seed in any::<u64>(), flips in 0u32..16, swap in any::<bool>()) {
        let p = &enumerate_profiles(2)[(seed % 6) as usize];
        let t = build_tuple(p, seed, 10_000).unwrap();
        let mut images: Vec<usize> = (1..=8).collect();
        for b in 0..4 {
            if flips >> b & 1 == 1 {
                images.swap(2 * b, 2 * b + 1);
            }
        }
        if swap {
            images.swap(0, 2);
            images.swap(1, 3);
        }
        let c = Permutation::from_one_line(&images).unwrap();
        let ell = canonical_ell(2);
        prop_assert_eq!(c.compose(&ell).unwrap(), ell.compose(&c).unwrap());
        let u = t.conjugated(&c).unwrap();
        prop_assert!(verify_cover(&u).all_pass());
        prop_assert_eq!(gamma_infinity(&u).cycle_type(), gamma_infinity(&t).cycle_type());
    }

    #[test]
    fn residue_quadric_is_smooth_with_consistent_parity(g in 1u32..6, pick in any::<prop::sample::Index>()) {
        let profiles = enumerate_profiles(g);
        let p = pick.get(&profiles);
        prop_assert!(residue_quadric(p).is_smooth());
        let s = spin_parity(p).unwrap();
        prop_assert_eq!(s.parity == Parity::Odd, s.h0 % 2 == 1);
    }

    #[test]
    fn period_map_scales_quadratically(re in -0.5f64..0.5, im in 0.8f64..1.5, k in 0.2f64..3.0) {
        let lat = lattice_init(Complex64::new(re, im)).unwrap();
        let a = [Complex64::new(0.3, 0.1), Complex64::new(-0.7, 0.4), Complex64::new(0.1, -0.2), Complex64::new(0.3, -0.3)];
        let scaled = a.map(|x| x * k);
        let (p, q) = (period_map(&lat, &a).unwrap(), period_map(&lat, &scaled).unwrap());
        for j in 0..2 {
            prop_assert!((q[j] - k * k * p[j]).norm() < 1e-9 * (1.0 + k * k));
        }
        let f = build_f(&lat, &a).unwrap();
        let z = Complex64::new(0.17, 0.0) + 0.23 * lat.tau();
        prop_assert!((f.eval(z) + f.eval(-z)).norm() < 1e-9);
    }
}

#[test]
fn squares_match_exhaustive_oracle() {
    for n in 1..=6 {
        let squares = alternating_squares(n);
        let mut v: Vec<usize> = (1..=n).collect();
        loop {
            let p = Permutation::from_one_line(&v).unwrap();
            if p.parity().is_even() {
                assert_eq!(p.is_square_in_alternating(), Ok(squares.contains(&p)), "{p} in S{n}");
            } else {
                assert_eq!(p.is_square_in_alternating(), Err(PermError::OddInput));
                assert!(!squares.contains(&p));
            }
            if !next_permutation(&mut v) {
                break;
            }
        }
    }
}

#[test]
fn census_is_shard_invariant() {
    let whole = count_classes(&EnumerationTask::new(1)).unwrap();
    for k in [2u32, 3, 5, 8] {
        let mut merged = oddcover_core::enumeration::ClassCensus::empty(1);
        for i in 0..k {
            merged.merge(&count_classes(&EnumerationTask::new(1).with_shard(Shard::new(i, k).unwrap())).unwrap());
        }
        assert_eq!(merged, whole);
    }
}
