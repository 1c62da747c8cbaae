//! Exhaustive search over monodromy tuples and class census.
//!
//! Candidates are ordered `2g`-tuples of three-cycles of `S_{4g}`, scanned in
//! lexicographic order (three-cycles sorted by one-line form). Work is split by
//! the index of the first entry: shard `i/k` owns first-entry indices `j` with
//! `j % k == i`, and one such index is one resumable block.
//!
//! Two tuples are equivalent when they are conjugate by an element of the
//! centralizer `Z(l)` of `l`, the group of order `2^{2g} (2g)!` that permutes
//! the blocks `{2i-1, 2i}` and flips inside them. A class is counted at its
//! lexicographically minimal member, so shard censuses add exactly.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::monodromy::{canonical_ell, MonodromyTuple, RamificationProfile};
use crate::perm::{three_cycles, Permutation};

/// Largest genus accepted for exhaustive scans (`4g = 8`).
pub const MAX_EXHAUSTIVE_GENUS: u32 = 2;
const MAX_DEGREE: usize = 8;

type Small = [u8; MAX_DEGREE];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerationError {
    #[error("exhaustive search for genus {g} exceeds the supported size (genus <= {MAX_EXHAUSTIVE_GENUS})")]
    SearchSpaceTooLarge { g: u32 },
    #[error("invalid shard {index}/{total}")]
    InvalidShard { index: u32, total: u32 },
    #[error("resume cursor {cursor} is not a block of this task")]
    ResumeCursorMismatch { cursor: u32 },
    #[error("genus must be at least 1")]
    ZeroGenus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Shard {
    pub index: u32,
    pub total: u32,
}

impl Shard {
    pub const WHOLE: Shard = Shard { index: 0, total: 1 };

    pub fn new(index: u32, total: u32) -> Result<Self, EnumerationError> {
        if total == 0 || index >= total {
            return Err(EnumerationError::InvalidShard { index, total });
        }
        Ok(Shard { index, total })
    }

    /// Sub-shard `j` of `parts` inside this shard.
    pub fn split(&self, j: u32, parts: u32) -> Shard {
        Shard { index: self.index + self.total * j, total: self.total * parts }
    }

    fn owns(&self, block: u32) -> bool {
        block % self.total == self.index
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EnumerationTask {
    pub g: u32,
    /// Required multiplicities of the infinity profile, compared as a multiset.
    /// Need not be a valid profile; infeasible filters simply match nothing.
    pub profile: Option<Vec<u32>>,
    pub require_transitive: bool,
    pub shard: Shard,
}

impl EnumerationTask {
    pub fn new(g: u32) -> Self {
        EnumerationTask { g, profile: None, require_transitive: true, shard: Shard::WHOLE }
    }

    pub fn with_profile(mut self, n: Vec<u32>) -> Self {
        self.profile = Some(n);
        self
    }

    pub fn with_shard(mut self, shard: Shard) -> Self {
        self.shard = shard;
        self
    }

    pub fn with_transitivity(mut self, require: bool) -> Self {
        self.require_transitive = require;
        self
    }
}

/// Counts for one profile key.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ProfileCount {
    pub tuple_count: u64,
    pub class_count: u64,
}

/// Tuple and class counts keyed by the profile of each class's canonical
/// representative (canonical cycle order of its infinity monodromy).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassCensus {
    pub g: u32,
    pub counts: BTreeMap<Vec<u32>, ProfileCount>,
}

impl ClassCensus {
    pub fn empty(g: u32) -> Self {
        ClassCensus { g, counts: BTreeMap::new() }
    }

    pub fn total_tuples(&self) -> u64 {
        self.counts.values().map(|c| c.tuple_count).sum()
    }

    pub fn total_classes(&self) -> u64 {
        self.counts.values().map(|c| c.class_count).sum()
    }

    /// Adds another shard's counts; associative and commutative.
    pub fn merge(&mut self, other: &ClassCensus) {
        debug_assert_eq!(self.g, other.g);
        for (k, v) in &other.counts {
            let e = self.counts.entry(k.clone()).or_default();
            e.tuple_count += v.tuple_count;
            e.class_count += v.class_count;
        }
    }
}

/// Precomputed tables shared by every block of a task.
pub struct SearchSpace {
    task: EnumerationTask,
    degree: usize,
    cycles: Vec<Small>,
    ell: Small,
    /// `reach[r]` flags prefixes that some `r` further three-cycles complete to
    /// an admissible product; `reach[0]` is admissibility itself.
    reach: Vec<Vec<bool>>,
    centralizer: Vec<Small>,
}

impl SearchSpace {
    pub fn new(task: &EnumerationTask) -> Result<Self, EnumerationError> {
        if task.g == 0 {
            return Err(EnumerationError::ZeroGenus);
        }
        if task.g > MAX_EXHAUSTIVE_GENUS {
            return Err(EnumerationError::SearchSpaceTooLarge { g: task.g });
        }
        Shard::new(task.shard.index, task.shard.total)?;
        let g = task.g;
        let degree = 4 * g as usize;
        let cycles: Vec<Small> = three_cycles(degree).iter().map(to_small).collect();
        let ell = to_small(&canonical_ell(g));

        let wanted: Option<Vec<usize>> = task.profile.as_ref().map(|n| {
            let mut v: Vec<usize> = n.iter().map(|&x| 2 * x as usize + 1).collect();
            v.sort_unstable();
            v
        });
        let size = factorial(degree);
        let mut admissible = vec![false; size];
        for (r, slot) in admissible.iter_mut().enumerate() {
            let a = unrank(r, degree);
            let b = compose(&a, &ell);
            let gamma = compose(&b, &b);
            let mut lens = cycle_lengths(&gamma, degree);
            if lens.len() != 2 * g as usize + 2 || lens.iter().any(|l| l % 2 == 0) {
                continue;
            }
            lens.sort_unstable();
            *slot = wanted.as_ref().is_none_or(|w| *w == lens);
        }
        let depth = 2 * g as usize;
        let mut reach = vec![admissible];
        for r in 1..depth {
            let prev = &reach[r - 1];
            let next: Vec<bool> = (0..size)
                .map(|i| {
                    let p = unrank(i, degree);
                    cycles.iter().any(|c| prev[rank(&compose(&p, c), degree)])
                })
                .collect();
            reach.push(next);
        }
        Ok(SearchSpace { task: task.clone(), degree, cycles, ell, reach, centralizer: centralizer_elements(g) })
    }

    pub fn task(&self) -> &EnumerationTask {
        &self.task
    }

    /// Number of first-entry indices (blocks) across all shards.
    pub fn num_blocks(&self) -> u32 {
        self.cycles.len() as u32
    }

    /// Blocks owned by this task's shard, in scan order.
    pub fn blocks(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.num_blocks()).filter(|&b| self.task.shard.owns(b))
    }

    /// Blocks owned by the shard at or after `cursor`.
    pub fn blocks_from(&self, cursor: u32) -> Result<impl Iterator<Item = u32> + '_, EnumerationError> {
        if cursor > self.num_blocks() || (cursor < self.num_blocks() && !self.task.shard.owns(cursor)) {
            return Err(EnumerationError::ResumeCursorMismatch { cursor });
        }
        Ok(self.blocks().filter(move |&b| b >= cursor))
    }

    /// Calls `visit` with the cycle indices of every surviving tuple whose
    /// first entry is `block`, in lexicographic order.
    pub fn visit_block(&self, block: u32, mut visit: impl FnMut(&[usize])) {
        let depth = 2 * self.task.g as usize;
        let mut idx = vec![0usize; depth];
        let mut prefix = vec![identity_small(); depth + 1];
        idx[0] = block as usize;
        prefix[1] = self.cycles[block as usize];
        if !self.reach[depth - 1][rank(&prefix[1], self.degree)] {
            return;
        }
        self.descend(1, &mut idx, &mut prefix, &mut visit);
    }

    fn descend(&self, level: usize, idx: &mut [usize], prefix: &mut [Small], visit: &mut impl FnMut(&[usize])) {
        let depth = idx.len();
        if level == depth {
            if !self.task.require_transitive || self.is_transitive(idx) {
                visit(idx);
            }
            return;
        }
        let remaining = depth - level - 1;
        for (k, c) in self.cycles.iter().enumerate() {
            let next = compose(&prefix[level], c);
            if !self.reach[remaining][rank(&next, self.degree)] {
                continue;
            }
            idx[level] = k;
            prefix[level + 1] = next;
            self.descend(level + 1, idx, prefix, visit);
        }
    }

    fn is_transitive(&self, idx: &[usize]) -> bool {
        let d = self.degree;
        let mut parent: Small = identity_small();
        fn find(parent: &mut Small, mut x: u8) -> u8 {
            while parent[x as usize] != x {
                x = parent[x as usize];
            }
            x
        }
        let mut components = d;
        let mut join = |a: u8, b: u8, parent: &mut Small| {
            let (ra, rb) = (find(parent, a), find(parent, b));
            if ra != rb {
                parent[ra.max(rb) as usize] = ra.min(rb);
                components -= 1;
            }
        };
        for &i in idx {
            let c = &self.cycles[i];
            let conj = conjugate(c, &self.ell);
            for x in 0..d {
                join(x as u8, c[x], &mut parent);
                join(x as u8, conj[x], &mut parent);
            }
        }
        components == 1
    }

    pub fn tuple_from_indices(&self, idx: &[usize]) -> MonodromyTuple {
        let tau = idx.iter().map(|&i| from_small(&self.cycles[i], self.degree)).collect();
        MonodromyTuple::new(self.task.g, tau).expect("well-formed by construction")
    }

    /// Classifies one surviving tuple: `Some((profile, orbit_size))` if it is
    /// the canonical member of its class.
    fn classify(&self, idx: &[usize]) -> Option<(Vec<u32>, u64)> {
        let tuple: Vec<&Small> = idx.iter().map(|&i| &self.cycles[i]).collect();
        let mut stabilizer = 0u64;
        for c in &self.centralizer {
            match compare_conjugated(&tuple, c, self.degree) {
                core::cmp::Ordering::Less => return None,
                core::cmp::Ordering::Equal => stabilizer += 1,
                core::cmp::Ordering::Greater => {}
            }
        }
        let a = tuple.iter().fold(identity_small(), |acc, c| compose(&acc, c));
        let b = compose(&a, &self.ell);
        let gamma = compose(&b, &b);
        let profile = cycle_lengths(&gamma, self.degree).iter().map(|&l| (l as u32 - 1) / 2).collect();
        Some((profile, self.centralizer.len() as u64 / stabilizer))
    }

    /// Census contribution of one block.
    pub fn count_block(&self, block: u32, census: &mut ClassCensus) {
        self.visit_block(block, |idx| {
            if let Some((profile, orbit)) = self.classify(idx) {
                let e = census.counts.entry(profile).or_default();
                e.class_count += 1;
                e.tuple_count += orbit;
            }
        });
    }
}

/// Streams every surviving tuple of the task's shard in lexicographic order.
pub fn enumerate_tuples(task: &EnumerationTask) -> Result<TupleStream, EnumerationError> {
    let space = SearchSpace::new(task)?;
    let blocks: Vec<u32> = space.blocks().collect();
    Ok(TupleStream { space, blocks, next_block: 0, buffer: Vec::new(), pos: 0 })
}

pub struct TupleStream {
    space: SearchSpace,
    blocks: Vec<u32>,
    next_block: usize,
    buffer: Vec<Vec<usize>>,
    pos: usize,
}

impl Iterator for TupleStream {
    type Item = MonodromyTuple;

    fn next(&mut self) -> Option<MonodromyTuple> {
        while self.pos == self.buffer.len() {
            let block = *self.blocks.get(self.next_block)?;
            self.next_block += 1;
            self.buffer.clear();
            self.pos = 0;
            let buffer = &mut self.buffer;
            self.space.visit_block(block, |idx| buffer.push(idx.to_vec()));
        }
        self.pos += 1;
        Some(self.space.tuple_from_indices(&self.buffer[self.pos - 1]))
    }
}

/// Census over every block of the task's shard.
pub fn count_classes(task: &EnumerationTask) -> Result<ClassCensus, EnumerationError> {
    let space = SearchSpace::new(task)?;
    let mut census = ClassCensus::empty(task.g);
    for block in space.blocks() {
        space.count_block(block, &mut census);
    }
    Ok(census)
}

/// Lexicographically minimal tuple among the conjugates by `Z(l)`.
pub fn canonical_class_representative(t: &MonodromyTuple) -> MonodromyTuple {
    let g = t.genus();
    let d = t.degree();
    let mut best = t.clone();
    let mut block_order: Vec<usize> = (0..2 * g as usize).collect();
    loop {
        for flips in 0u32..(1 << (2 * g)) {
            let c = Permutation::from_zero_based(centralizer_images(&block_order, flips, d));
            let candidate = t.conjugated(&c).expect("same degree");
            if candidate < best {
                best = candidate;
            }
        }
        if !next_permutation(&mut block_order) {
            break;
        }
    }
    best
}

/// Elements of `Z(l)` in `S_{4g}` as 0-based image arrays.
fn centralizer_images(block_order: &[usize], flips: u32, degree: usize) -> Vec<u32> {
    (0..degree)
        .map(|x| {
            let (block, bit) = (x / 2, x % 2);
            let flip = ((flips >> block) & 1) as usize;
            (2 * block_order[block] + (bit ^ flip)) as u32
        })
        .collect()
}

fn centralizer_elements(g: u32) -> Vec<Small> {
    let d = 4 * g as usize;
    let mut out = Vec::new();
    let mut order: Vec<usize> = (0..2 * g as usize).collect();
    loop {
        for flips in 0u32..(1 << (2 * g)) {
            let mut s = identity_small();
            for (x, y) in centralizer_images(&order, flips, d).into_iter().enumerate() {
                s[x] = y as u8;
            }
            out.push(s);
        }
        if !next_permutation(&mut order) {
            break;
        }
    }
    out
}

fn next_permutation(v: &mut [usize]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn compare_conjugated(tuple: &[&Small], c: &Small, d: usize) -> core::cmp::Ordering {
    for t in tuple {
        let conj = conjugate(t, c);
        match conj[..d].cmp(&t[..d]) {
            core::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    core::cmp::Ordering::Equal
}

fn identity_small() -> Small {
    core::array::from_fn(|i| i as u8)
}

fn to_small(p: &Permutation) -> Small {
    let mut s = identity_small();
    for (i, &x) in p.zero_based().iter().enumerate() {
        s[i] = x as u8;
    }
    s
}

fn from_small(s: &Small, d: usize) -> Permutation {
    Permutation::from_zero_based(s[..d].iter().map(|&x| x as u32).collect())
}

/// `a` then `b`.
fn compose(a: &Small, b: &Small) -> Small {
    core::array::from_fn(|i| b[a[i] as usize])
}

/// `c^-1 t c`.
fn conjugate(t: &Small, c: &Small) -> Small {
    let mut out = identity_small();
    for x in 0..MAX_DEGREE {
        out[c[x] as usize] = c[t[x] as usize];
    }
    out
}

/// Cycle lengths in canonical order (by minimal element).
fn cycle_lengths(p: &Small, d: usize) -> Vec<usize> {
    let mut seen = [false; MAX_DEGREE];
    let mut out = Vec::new();
    for start in 0..d {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = p[x] as usize;
            len += 1;
        }
        out.push(len);
    }
    out
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Lehmer rank of the first `d` entries.
fn rank(p: &Small, d: usize) -> usize {
    let mut r = 0;
    for i in 0..d {
        let smaller = (i + 1..d).filter(|&j| p[j] < p[i]).count();
        r = r * (d - i) + smaller;
    }
    r
}

fn unrank(mut r: usize, d: usize) -> Small {
    let mut digits = [0usize; MAX_DEGREE];
    for i in (0..d).rev() {
        let base = d - i;
        digits[i] = r % base;
        r /= base;
    }
    let mut avail: Vec<u8> = (0..d as u8).collect();
    let mut out = identity_small();
    for i in 0..d {
        out[i] = avail.remove(digits[i]);
    }
    out
}

/// Convenience: profile from the multiplicities stored in a census key.
pub fn census_key_profile(g: u32, key: &[u32]) -> Option<RamificationProfile> {
    RamificationProfile::new(g, key.to_vec()).ok()
}
