//! Permutations of `{1, ..., d}` in one-line form.
//!
//! Composition is left-to-right: `a.compose(&b)` maps `x` to `b(a(x))`, so a
//! written product `t1 t2 ... tk` is applied in reading order. Conjugation
//! follows the same convention: `a.conjugate(&c) = c^-1 a c`.
//!
//! All public indices are 1-based; storage is 0-based.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("degree must be at least 1")]
    ZeroDegree,
    #[error("one-line images are not a bijection of 1..={degree}")]
    NotABijection { degree: usize },
    #[error("point {point} outside 1..={degree}")]
    PointOutOfRange { point: usize, degree: usize },
    #[error("malformed cycle notation: {0}")]
    Parse(String),
    #[error("cannot infer the degree from an empty generator list")]
    EmptyGeneratorList,
    #[error("permutation is odd")]
    OddInput,
    #[error("permutation is not a square in the alternating group")]
    NotASquare,
    #[error("degree {degree} is below 3")]
    DegreeTooSmall { degree: usize },
    #[error("the identity of A_3 is not a single 3-cycle")]
    IdentityInDegreeThree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn is_even(self) -> bool {
        self == Parity::Even
    }

    /// Parity of a product.
    pub fn times(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// Multiset of cycle lengths, fixed points included, sorted in decreasing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleType {
    parts: Vec<usize>,
}

impl CycleType {
    pub fn from_parts(mut parts: Vec<usize>) -> Self {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        CycleType { parts }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn degree(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn num_cycles(&self) -> usize {
        self.parts.len()
    }

    /// Number of cycles of length exactly `k`.
    pub fn count(&self, k: usize) -> usize {
        self.parts.iter().filter(|&&p| p == k).count()
    }

    pub fn all_odd(&self) -> bool {
        self.parts.iter().all(|p| p % 2 == 1)
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("]")
    }
}

/// A permutation of `{1, ..., d}`; ordering is lexicographic on the one-line form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation { images: (0..degree as u32).collect() }
    }

    /// Builds from 1-indexed one-line images: position `i` holds the image of `i`.
    pub fn from_one_line(one_line: &[usize]) -> Result<Self, PermError> {
        let degree = one_line.len();
        if degree == 0 {
            return Err(PermError::ZeroDegree);
        }
        let mut seen = vec![false; degree];
        let mut images = Vec::with_capacity(degree);
        for &x in one_line {
            if x == 0 || x > degree || seen[x - 1] {
                return Err(PermError::NotABijection { degree });
            }
            seen[x - 1] = true;
            images.push((x - 1) as u32);
        }
        Ok(Permutation { images })
    }

    /// Builds from 0-indexed images without validation; callers guarantee a bijection.
    pub(crate) fn from_zero_based(images: Vec<u32>) -> Self {
        debug_assert!(is_bijection(&images));
        Permutation { images }
    }

    /// Product of the given cycles (1-indexed). Cycles are applied left to right.
    pub fn from_cycles(degree: usize, cycles: &[&[usize]]) -> Result<Self, PermError> {
        let mut acc = Permutation::identity(degree);
        for cycle in cycles {
            acc = acc.compose(&Permutation::cycle(degree, cycle)?)?;
        }
        Ok(acc)
    }

    /// A single cycle `(c1 c2 ... ck)` in `S_degree`.
    pub fn cycle(degree: usize, cycle: &[usize]) -> Result<Self, PermError> {
        if degree == 0 {
            return Err(PermError::ZeroDegree);
        }
        let mut images: Vec<u32> = (0..degree as u32).collect();
        let mut seen = vec![false; degree];
        for &p in cycle {
            if p == 0 || p > degree {
                return Err(PermError::PointOutOfRange { point: p, degree });
            }
            if seen[p - 1] {
                return Err(PermError::Parse(alloc::format!("repeated point {p} in cycle")));
            }
            seen[p - 1] = true;
        }
        for (i, &p) in cycle.iter().enumerate() {
            let next = cycle[(i + 1) % cycle.len()];
            images[p - 1] = (next - 1) as u32;
        }
        Ok(Permutation { images })
    }

    /// Parses cycle notation such as `"(1 2 3)(4 5)"`; `"()"` or `""` is the identity.
    pub fn parse_cycles(degree: usize, text: &str) -> Result<Self, PermError> {
        let mut acc = Permutation::identity(degree);
        if degree == 0 {
            return Err(PermError::ZeroDegree);
        }
        let mut rest = text.trim();
        while !rest.is_empty() {
            let open = rest.strip_prefix('(').ok_or_else(|| PermError::Parse(String::from(text)))?;
            let close = open.find(')').ok_or_else(|| PermError::Parse(String::from(text)))?;
            let body = &open[..close];
            let mut points = Vec::new();
            for tok in body.split(|c: char| c == ',' || c.is_whitespace()) {
                if tok.is_empty() {
                    continue;
                }
                let p: usize = tok.parse().map_err(|_| PermError::Parse(String::from(text)))?;
                points.push(p);
            }
            if !points.is_empty() {
                acc = acc.compose(&Permutation::cycle(degree, &points)?)?;
            }
            rest = open[close + 1..].trim_start();
        }
        Ok(acc)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Image of the 1-indexed point `x`.
    pub fn image(&self, x: usize) -> usize {
        self.images[x - 1] as usize + 1
    }

    /// 1-indexed one-line form.
    pub fn one_line(&self) -> Vec<usize> {
        self.images.iter().map(|&x| x as usize + 1).collect()
    }

    pub(crate) fn zero_based(&self) -> &[u32] {
        &self.images
    }

    fn check_degree(&self, other: &Permutation) -> Result<(), PermError> {
        if self.degree() != other.degree() {
            return Err(PermError::DegreeMismatch { left: self.degree(), right: other.degree() });
        }
        Ok(())
    }

    /// `self` then `other`: the result maps `x` to `other(self(x))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation, PermError> {
        self.check_degree(other)?;
        Ok(self.then(other))
    }

    pub(crate) fn then(&self, other: &Permutation) -> Permutation {
        Permutation { images: self.images.iter().map(|&x| other.images[x as usize]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0u32; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            images[x as usize] = i as u32;
        }
        Permutation { images }
    }

    /// `by^-1 * self * by`, i.e. `self` relabelled along `by`.
    pub fn conjugate(&self, by: &Permutation) -> Result<Permutation, PermError> {
        self.check_degree(by)?;
        Ok(self.conjugate_unchecked(by))
    }

    pub(crate) fn conjugate_unchecked(&self, by: &Permutation) -> Permutation {
        let mut images = vec![0u32; self.degree()];
        for (x, &y) in self.images.iter().enumerate() {
            images[by.images[x] as usize] = by.images[y as usize];
        }
        Permutation { images }
    }

    pub fn pow(&self, k: u32) -> Permutation {
        let mut acc = Permutation::identity(self.degree());
        for _ in 0..k {
            acc = acc.then(self);
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// Number of moved points.
    pub fn support_size(&self) -> usize {
        self.images.iter().enumerate().filter(|&(i, &x)| i as u32 != x).count()
    }

    pub fn is_three_cycle(&self) -> bool {
        let ct = self.cycle_type();
        ct.count(3) == 1 && ct.count(1) == self.degree() - 3
    }

    pub fn parity(&self) -> Parity {
        if (self.degree() - self.num_cycles()).is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    fn num_cycles(&self) -> usize {
        let mut seen = vec![false; self.degree()];
        let mut count = 0;
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            count += 1;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.images[x] as usize;
            }
        }
        count
    }

    /// Disjoint cycles (1-indexed), each starting at its minimal element, sorted by
    /// that element; fixed points appear as 1-cycles.
    pub fn cycle_decomposition(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x + 1);
                x = self.images[x] as usize;
            }
            out.push(cycle);
        }
        out
    }

    pub fn cycle_type(&self) -> CycleType {
        CycleType::from_parts(self.cycle_decomposition().iter().map(Vec::len).collect())
    }

    /// Decides whether `self = b^2` for some even `b`.
    ///
    /// All-odd cycle types are always squares; everything else is settled by
    /// attempting [`Permutation::alternating_square_root`].
    pub fn is_square_in_alternating(&self) -> Result<bool, PermError> {
        if !self.parity().is_even() {
            return Err(PermError::OddInput);
        }
        if self.cycle_type().all_odd() {
            return Ok(true);
        }
        match self.alternating_square_root() {
            Ok(_) => Ok(true),
            Err(PermError::NotASquare) => Ok(false),
            Err(e) => Err(e),
        }
    }

    /// An even `b` with `b * b = self`.
    ///
    /// Odd cycles of length `m` are rooted by their `(m+1)/2`-th power; even
    /// cycles of equal length are paired and interleaved. If the result is odd,
    /// one pair of equal-length odd cycles (two fixed points count) is re-rooted
    /// as an interleaved cycle, which flips the parity.
    pub fn alternating_square_root(&self) -> Result<Permutation, PermError> {
        if !self.parity().is_even() {
            return Err(PermError::OddInput);
        }
        let cycles = self.cycle_decomposition();
        let max_len = cycles.iter().map(Vec::len).max().unwrap_or(0);
        let mut by_len: Vec<Vec<&Vec<usize>>> = vec![Vec::new(); max_len + 1];
        for c in &cycles {
            by_len[c.len()].push(c);
        }

        let mut pairs = 0usize;
        for len in (2..=max_len).step_by(2) {
            if by_len[len].len() % 2 == 1 {
                return Err(PermError::NotASquare);
            }
            pairs += by_len[len].len() / 2;
        }

        // Odd length whose first two cycles get interleaved to repair parity.
        let repair_len = if pairs % 2 == 1 {
            let found = (1..=max_len).step_by(2).find(|&m| by_len[m].len() >= 2);
            Some(found.ok_or(PermError::NotASquare)?)
        } else {
            None
        };

        let mut images: Vec<u32> = (0..self.degree() as u32).collect();
        for (len, group) in by_len.iter().enumerate() {
            if len == 0 || group.is_empty() {
                continue;
            }
            let mut rest: &[&Vec<usize>] = group;
            if len % 2 == 0 || repair_len == Some(len) {
                let take = if len % 2 == 0 { group.len() } else { 2 };
                for pair in group[..take].chunks(2) {
                    interleave_root(&mut images, pair[0], pair[1]);
                }
                rest = &group[take..];
            }
            if len % 2 == 1 {
                for c in rest {
                    let shift = len.div_ceil(2);
                    for (j, &p) in c.iter().enumerate() {
                        images[p - 1] = (c[(j + shift) % len] - 1) as u32;
                    }
                }
            }
        }
        let root = Permutation { images };
        debug_assert!(root.then(&root) == *self);
        debug_assert!(root.parity().is_even());
        Ok(root)
    }

    /// Writes an even permutation of degree `n >= 3` as exactly `floor(n/2)`
    /// three-cycles whose left-to-right product is `self`.
    ///
    /// Odd cycles `(c1 ... cm)` become `(c1 c2 c3)(c1 c4 c5)...`; a pair of even
    /// cycles `(a1 ... ap)(b1 ... bq)` is peeled by `(a1 a2 bq)`, which leaves a
    /// single odd cycle. Shortfalls are padded with `t = t^-1 t^-1` splits, or
    /// `rho rho^-1` when there is nothing to split.
    pub fn factor_into_three_cycles(&self) -> Result<Vec<Permutation>, PermError> {
        let n = self.degree();
        if !self.parity().is_even() {
            return Err(PermError::OddInput);
        }
        if n < 3 {
            return Err(PermError::DegreeTooSmall { degree: n });
        }
        let target = n / 2;
        let mut factors = Vec::with_capacity(target);
        let mut pending_even: Option<Vec<usize>> = None;
        for c in self.cycle_decomposition() {
            if c.len() == 1 {
                continue;
            }
            if c.len() % 2 == 1 {
                push_odd_cycle_factors(n, &c, &mut factors);
                continue;
            }
            match pending_even.take() {
                None => pending_even = Some(c),
                Some(first) => {
                    let pair = Permutation::from_cycles(n, &[&first, &c])?;
                    let peel = Permutation::cycle(n, &[first[0], first[1], c[c.len() - 1]])?;
                    let rest = peel.inverse().then(&pair);
                    factors.push(peel);
                    for rc in rest.cycle_decomposition() {
                        if rc.len() > 1 {
                            push_odd_cycle_factors(n, &rc, &mut factors);
                        }
                    }
                }
            }
        }
        debug_assert!(pending_even.is_none());

        if factors.is_empty() {
            if target < 2 {
                return Err(PermError::IdentityInDegreeThree);
            }
            let rho = Permutation::cycle(n, &[1, 2, 3])?;
            factors.push(rho.clone());
            factors.push(rho.inverse());
        }
        while factors.len() < target {
            let last = factors.pop().expect("nonempty");
            let inv = last.inverse();
            factors.push(inv.clone());
            factors.push(inv);
        }
        debug_assert_eq!(factors.len(), target);
        Ok(factors)
    }
}

fn push_odd_cycle_factors(n: usize, c: &[usize], out: &mut Vec<Permutation>) {
    let mut k = 1;
    while k + 1 < c.len() {
        out.push(Permutation::cycle(n, &[c[0], c[k], c[k + 1]]).expect("points in range"));
        k += 2;
    }
}

fn interleave_root(images: &mut [u32], x: &[usize], y: &[usize]) {
    let m = x.len();
    let seq: Vec<usize> = (0..m).flat_map(|j| [x[j], y[j]]).collect();
    for j in 0..2 * m {
        images[seq[j] - 1] = (seq[(j + 1) % (2 * m)] - 1) as u32;
    }
}

fn is_bijection(images: &[u32]) -> bool {
    let mut seen = vec![false; images.len()];
    images.iter().all(|&x| {
        let x = x as usize;
        x < seen.len() && !core::mem::replace(&mut seen[x], true)
    })
}

/// All three-cycles of `S_degree`, sorted lexicographically by one-line form.
pub fn three_cycles(degree: usize) -> Vec<Permutation> {
    let mut out = Vec::new();
    for i in 1..=degree {
        for j in i + 1..=degree {
            for k in j + 1..=degree {
                out.push(Permutation::cycle(degree, &[i, j, k]).expect("in range"));
                out.push(Permutation::cycle(degree, &[i, k, j]).expect("in range"));
            }
        }
    }
    out.sort();
    out
}

/// Orbits of the group generated by `gens` on `{1, ..., degree}`, each sorted,
/// ordered by minimal element.
pub fn orbits_on(degree: usize, gens: &[Permutation]) -> Result<Vec<Vec<usize>>, PermError> {
    for g in gens {
        if g.degree() != degree {
            return Err(PermError::DegreeMismatch { left: degree, right: g.degree() });
        }
    }
    let mut dsu = DisjointSets::new(degree);
    for g in gens {
        for (x, &y) in g.images.iter().enumerate() {
            dsu.union(x, y as usize);
        }
    }
    Ok(dsu.classes())
}

/// Orbits with the degree taken from the generators.
pub fn orbits(gens: &[Permutation]) -> Result<Vec<Vec<usize>>, PermError> {
    let degree = gens.first().ok_or(PermError::EmptyGeneratorList)?.degree();
    orbits_on(degree, gens)
}

pub fn is_transitive_on(degree: usize, gens: &[Permutation]) -> Result<bool, PermError> {
    Ok(orbits_on(degree, gens)?.len() == 1)
}

pub fn is_transitive(gens: &[Permutation]) -> Result<bool, PermError> {
    Ok(orbits(gens)?.len() == 1)
}

pub(crate) struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    pub(crate) fn new(n: usize) -> Self {
        DisjointSets { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    /// Classes as sorted 1-indexed lists, ordered by minimal element.
    pub(crate) fn classes(&mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut slot = vec![usize::MAX; n];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for x in 0..n {
            let r = self.find(x);
            if slot[r] == usize::MAX {
                slot[r] = out.len();
                out.push(Vec::new());
            }
            out[slot[r]].push(x + 1);
        }
        out
    }
}

impl fmt::Display for Permutation {
    /// Cycle notation with fixed points omitted; the identity prints as `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut any = false;
        for c in self.cycle_decomposition() {
            if c.len() < 2 {
                continue;
            }
            any = true;
            f.write_str("(")?;
            for (i, p) in c.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{p}")?;
            }
            f.write_str(")")?;
        }
        if !any {
            f.write_str("()")?;
        }
        Ok(())
    }
}
