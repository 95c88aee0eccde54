//! Linear storage codes: construction from generator or parity-check
//! matrices, duals, codeword enumeration, supports and their enumerators,
//! minimum distance, and the pseudo-systematic variant used for
//! update-efficiency analysis.
//!
//! Codes are stored with reduced-row-echelon generators, so two equal
//! codes compare equal as matrices. Supports are bit masks over at most
//! 64 coordinates with 1-based coordinate indices.

use std::collections::BTreeMap;
use std::fmt;

use crate::field_core::{fe_add, fe_mul, fe_sub, is_prime, nullspace_basis, rref, FieldMatrix, FieldVector};
use crate::{Error, Limits, Result};

/// A set of coordinate indices from `{1, ..., N}` stored as a bit mask
/// (bit `i-1` represents coordinate `i`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Support(u64);

impl Support {
    pub const EMPTY: Support = Support(0);

    pub fn from_mask(mask: u64) -> Support {
        Support(mask)
    }

    /// Build from 1-based coordinate indices. Indices must lie in 1..=64.
    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Support {
        let mut mask = 0u64;
        for i in indices {
            assert!((1..=64).contains(&i), "coordinate index {i} out of range");
            mask |= 1 << (i - 1);
        }
        Support(mask)
    }

    pub fn mask(&self) -> u64 {
        self.0
    }

    /// Membership of the 1-based coordinate `i`.
    pub fn contains(&self, i: usize) -> bool {
        debug_assert!((1..=64).contains(&i));
        self.0 & (1 << (i - 1)) != 0
    }

    pub fn size(&self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    /// The member coordinates as ascending 1-based indices.
    pub fn indices(&self) -> Vec<usize> {
        (1..=64).filter(|&i| self.contains(i)).collect()
    }

    pub fn union(&self, other: Support) -> Support {
        Support(self.0 | other.0)
    }

    pub fn intersection(&self, other: Support) -> Support {
        Support(self.0 & other.0)
    }

    pub fn minus(&self, other: Support) -> Support {
        Support(self.0 & !other.0)
    }

    pub fn is_disjoint(&self, other: Support) -> bool {
        self.0 & other.0 == 0
    }
}

impl fmt::Display for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (pos, i) in self.indices().into_iter().enumerate() {
            if pos > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// The support of a vector: exactly its nonzero coordinate positions.
pub fn support_of(v: &FieldVector) -> Support {
    debug_assert!(v.len() <= 64);
    let mut mask = 0u64;
    for (i, &e) in v.entries().iter().enumerate() {
        if e != 0 {
            mask |= 1 << i;
        }
    }
    Support(mask)
}

/// A linear `[N, K]` code over GF(q), stored via its canonical
/// reduced-row-echelon generator matrix of full rank K.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearCode {
    q: u64,
    n: usize,
    k: usize,
    gen: FieldMatrix,
}

impl LinearCode {
    pub fn q(&self) -> u64 {
        self.q
    }

    /// Code length (number of storage nodes).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Code dimension.
    pub fn k(&self) -> usize {
        self.k
    }

    /// The canonical generator matrix (K rows, N columns, reduced form).
    pub fn generator(&self) -> &FieldMatrix {
        &self.gen
    }
}

/// Number of messages q^k, checked against the enumeration limit.
fn message_count(q: u64, k: usize, limits: &Limits) -> Result<u64> {
    let needed = (q as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    limits.check_enumeration(needed)?;
    Ok(needed as u64)
}

/// Build a code from (a row basis of) a generator matrix.
///
/// Rank-deficient inputs are accepted: the code is generated by a row
/// basis, so K may come out smaller than the number of supplied rows. A
/// zero matrix is rejected because it generates the zero code.
pub fn code_from_generator(g: &FieldMatrix) -> Result<LinearCode> {
    let n = g.cols();
    if n > 64 {
        return Err(Error::InvalidParameter(format!("code length {n} exceeds the 64-coordinate limit")));
    }
    let (red, rank, _) = rref(g);
    if rank == 0 {
        return Err(Error::ZeroCode);
    }
    Ok(LinearCode { q: g.q(), n, k: rank, gen: red.take_rows(rank) })
}

/// Build the code `{x : H x^T = 0}` from a parity-check matrix.
///
/// A full-column-rank H leaves only the zero code and is rejected.
pub fn code_from_parity_check(h: &FieldMatrix) -> Result<LinearCode> {
    if h.cols() > 64 {
        return Err(Error::InvalidParameter(format!(
            "code length {} exceeds the 64-coordinate limit",
            h.cols()
        )));
    }
    let ns = nullspace_basis(h);
    if ns.rows() == 0 {
        return Err(Error::ZeroCode);
    }
    code_from_generator(&ns)
}

/// The dual code, i.e. all vectors orthogonal to every codeword.
///
/// A full-space code (K = N) has the zero code as its dual, which cannot
/// be represented; that case is rejected.
pub fn dual(c: &LinearCode) -> Result<LinearCode> {
    if c.k == c.n {
        return Err(Error::ZeroCode);
    }
    code_from_generator(&nullspace_basis(&c.gen))
}

/// Streaming enumeration of all q^K codewords.
///
/// Messages are visited in lexicographic order (first message symbol most
/// significant), so the zero vector always comes first; each codeword is
/// updated incrementally from its predecessor.
#[derive(Debug)]
pub struct CodewordIter<'a> {
    gen: &'a FieldMatrix,
    q: u64,
    total: u64,
    next_index: u64,
    message: Vec<u64>,
    word: Vec<u64>,
}

impl<'a> Iterator for CodewordIter<'a> {
    type Item = FieldVector;

    fn next(&mut self) -> Option<FieldVector> {
        if self.next_index == self.total {
            return None;
        }
        if self.next_index > 0 {
            advance_word(self.gen, self.q, &mut self.message, &mut self.word);
        }
        self.next_index += 1;
        Some(FieldVector::new(self.q, self.word.clone()).expect("entries stay reduced"))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let rem = (self.total - self.next_index) as usize;
        (rem, Some(rem))
    }
}

/// All codewords of `c`, zero first, in deterministic message order.
pub fn enumerate_codewords<'a>(c: &'a LinearCode, limits: &Limits) -> Result<CodewordIter<'a>> {
    let total = message_count(c.q, c.k, limits)?;
    Ok(CodewordIter {
        gen: &c.gen,
        q: c.q,
        total,
        next_index: 0,
        message: vec![0; c.k],
        word: vec![0; c.n],
    })
}

/// Advance the message odometer by one (last symbol fastest) and patch the
/// codeword by the changed digits: amortized O(N) per step.
fn advance_word(gen: &FieldMatrix, q: u64, message: &mut [u64], word: &mut [u64]) {
    for pos in (0..message.len()).rev() {
        let old = message[pos];
        let new = if old + 1 == q { 0 } else { old + 1 };
        message[pos] = new;
        let delta = fe_sub(new, old, q);
        if delta != 0 {
            let row = gen.row(pos);
            for (w, &g) in word.iter_mut().zip(row) {
                *w = fe_add(*w, fe_mul(delta, g, q), q);
            }
        }
        if new != 0 {
            return; // no carry
        }
    }
}

/// Decode message index `idx` into base-q digits (first digit most
/// significant) and compute its codeword from scratch.
fn word_at(gen: &FieldMatrix, q: u64, k: usize, idx: u64) -> (Vec<u64>, Vec<u64>) {
    let mut message = vec![0u64; k];
    let mut rem = idx;
    for pos in (0..k).rev() {
        message[pos] = rem % q;
        rem /= q;
    }
    let mut word = vec![0u64; gen.cols()];
    for (pos, &m) in message.iter().enumerate() {
        if m != 0 {
            for (w, &g) in word.iter_mut().zip(gen.row(pos)) {
                *w = fe_add(*w, fe_mul(m, g, q), q);
            }
        }
    }
    (message, word)
}

/// Apply `f` to every codeword with message index in `start..end`.
pub(crate) fn scan_words<F: FnMut(&[u64])>(gen: &FieldMatrix, start: u64, end: u64, mut f: F) {
    if start >= end {
        return;
    }
    let q = gen.q();
    let k = gen.rows();
    let (mut message, mut word) = word_at(gen, q, k, start);
    f(&word);
    for _ in start + 1..end {
        advance_word(gen, q, &mut message, &mut word);
        f(&word);
    }
}

/// Split `0..total` into ranges suitable for data-parallel scanning.
#[cfg(feature = "parallel")]
pub(crate) fn scan_ranges(total: u64) -> Vec<(u64, u64)> {
    const MIN_CHUNK: u64 = 1 << 12;
    if total <= MIN_CHUNK {
        return vec![(0, total)];
    }
    let want = (rayon::current_num_threads() as u64) * 4;
    let chunk = (total / want).max(MIN_CHUNK);
    let mut out = Vec::new();
    let mut lo = 0;
    while lo < total {
        let hi = (lo + chunk).min(total);
        out.push((lo, hi));
        lo = hi;
    }
    out
}

/// Fold every codeword into an accumulator, merging per-chunk results
/// with a commutative `merge` so the outcome is deterministic under any
/// parallel schedule.
fn fold_words<T, FInit, FStep, FMerge>(
    gen: &FieldMatrix,
    total: u64,
    init: FInit,
    step: FStep,
    merge: FMerge,
) -> T
where
    T: Send,
    FInit: Fn() -> T + Sync,
    FStep: Fn(&mut T, &[u64]) + Sync,
    FMerge: Fn(T, T) -> T + Sync,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let ranges = scan_ranges(total);
        return ranges
            .into_par_iter()
            .map(|(lo, hi)| {
                let mut acc = init();
                scan_words(gen, lo, hi, |w| step(&mut acc, w));
                acc
            })
            .reduce(&init, &merge);
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = &merge;
        let mut acc = init();
        scan_words(gen, 0, total, |w| step(&mut acc, w));
        acc
    }
}

/// The number of codewords per support: a map from each realized support
/// to how many codewords have exactly that support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportEnumerator {
    n: usize,
    counts: BTreeMap<Support, u64>,
}

impl SupportEnumerator {
    /// Wrap explicit counts (zero counts may simply be absent).
    pub fn from_counts(n: usize, counts: BTreeMap<Support, u64>) -> Self {
        let mut counts = counts;
        counts.retain(|_, &mut c| c > 0);
        SupportEnumerator { n, counts }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The count for one support; absent keys mean zero.
    pub fn count(&self, w: Support) -> u64 {
        self.counts.get(&w).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Support, u64)> + '_ {
        self.counts.iter().map(|(&w, &c)| (w, c))
    }

    pub fn distinct_supports(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u128 {
        self.counts.values().map(|&c| c as u128).sum()
    }
}

fn merge_count_maps(mut a: BTreeMap<Support, u64>, b: BTreeMap<Support, u64>) -> BTreeMap<Support, u64> {
    for (w, c) in b {
        *a.entry(w).or_insert(0) += c;
    }
    a
}

fn support_enumerator_from_scan(gen: &FieldMatrix, n: usize, total: u64) -> SupportEnumerator {
    let counts = fold_words(
        gen,
        total,
        BTreeMap::new,
        |acc: &mut BTreeMap<Support, u64>, w| {
            let mut mask = 0u64;
            for (i, &e) in w.iter().enumerate() {
                if e != 0 {
                    mask |= 1 << i;
                }
            }
            *acc.entry(Support(mask)).or_insert(0) += 1;
        },
        merge_count_maps,
    );
    SupportEnumerator { n, counts }
}

/// Count codewords per support by exhaustive enumeration.
pub fn support_enumerator(c: &LinearCode, limits: &Limits) -> Result<SupportEnumerator> {
    let total = message_count(c.q, c.k, limits)?;
    Ok(support_enumerator_from_scan(&c.gen, c.n, total))
}

/// Single-threaded variant of [`support_enumerator`] (for benchmarking
/// the parallel scan against a sequential baseline).
pub fn support_enumerator_serial(c: &LinearCode, limits: &Limits) -> Result<SupportEnumerator> {
    let total = message_count(c.q, c.k, limits)?;
    let mut counts: BTreeMap<Support, u64> = BTreeMap::new();
    scan_words(&c.gen, 0, total, |w| {
        let mut mask = 0u64;
        for (i, &e) in w.iter().enumerate() {
            if e != 0 {
                mask |= 1 << i;
            }
        }
        *counts.entry(Support(mask)).or_insert(0) += 1;
    });
    Ok(SupportEnumerator { n: c.n, counts })
}

/// `a[t]` = number of codewords of Hamming weight `t`, for t = 0..=N.
pub fn weight_enumerator(c: &LinearCode, limits: &Limits) -> Result<Vec<u64>> {
    let total = message_count(c.q, c.k, limits)?;
    let n = c.n;
    Ok(fold_words(
        &c.gen,
        total,
        || vec![0u64; n + 1],
        |acc: &mut Vec<u64>, w| {
            let t = w.iter().filter(|&&e| e != 0).count();
            acc[t] += 1;
        },
        |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        },
    ))
}

/// Single-threaded variant of [`weight_enumerator`].
pub fn weight_enumerator_serial(c: &LinearCode, limits: &Limits) -> Result<Vec<u64>> {
    let total = message_count(c.q, c.k, limits)?;
    let mut acc = vec![0u64; c.n + 1];
    scan_words(&c.gen, 0, total, |w| {
        acc[w.iter().filter(|&&e| e != 0).count()] += 1;
    });
    Ok(acc)
}

/// The smallest nonzero codeword weight, by direct scan.
pub fn min_distance(c: &LinearCode, limits: &Limits) -> Result<usize> {
    let total = message_count(c.q, c.k, limits)?;
    let n = c.n;
    let best = fold_words(
        &c.gen,
        total,
        || n + 1,
        |acc: &mut usize, w| {
            let t = w.iter().filter(|&&e| e != 0).count();
            if t > 0 && t < *acc {
                *acc = t;
            }
        },
        |a, b| a.min(b),
    );
    debug_assert!(best <= n, "a code of dimension >= 1 has a nonzero word");
    Ok(best)
}

/// A pseudo-systematic update-efficient code: a K x (N+K) generator whose
/// last K columns are the identity. The first N coordinates are the
/// stored symbols; the trailing K coordinates are virtual source symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpdateCode {
    q: u64,
    n: usize,
    k: usize,
    gen: FieldMatrix,
}

impl UpdateCode {
    /// Validate and wrap a K x (N+K) pseudo-systematic generator.
    pub fn new(gen: FieldMatrix, k: usize) -> Result<Self> {
        if k == 0 || gen.rows() != k {
            return Err(Error::InvalidParameter(format!(
                "pseudo-systematic generator must have exactly {k} (= source symbol count) rows"
            )));
        }
        if gen.cols() <= k {
            return Err(Error::InvalidParameter("generator must have more columns than source symbols".into()));
        }
        let n = gen.cols() - k;
        if n + k > 64 {
            return Err(Error::InvalidParameter(format!(
                "stored + source coordinate count {} exceeds the 64-coordinate limit",
                n + k
            )));
        }
        for r in 0..k {
            for c in 0..k {
                let want = u64::from(r == c);
                if gen.get(r, n + c) != want {
                    return Err(Error::InvalidParameter(
                        "last K columns of a pseudo-systematic generator must form the identity".into(),
                    ));
                }
            }
        }
        let stored = gen.column_range(0, n);
        let (_, rank, _) = rref(&stored);
        if rank != k {
            return Err(Error::InvalidParameter(
                "stored-coordinate submatrix of a pseudo-systematic generator must have full rank".into(),
            ));
        }
        Ok(UpdateCode { q: gen.q(), n, k, gen })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Number of stored symbols.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of source symbols.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn generator(&self) -> &FieldMatrix {
        &self.gen
    }

    /// The storage code: the row space of the first N columns.
    pub fn stored_code(&self) -> LinearCode {
        code_from_generator(&self.gen.column_range(0, self.n)).expect("stored submatrix has full rank")
    }

    /// The update code's row space viewed as a plain [N+K, K] code.
    pub fn as_linear_code(&self) -> LinearCode {
        LinearCode { q: self.q, n: self.n + self.k, k: self.k, gen: self.gen.clone() }
    }

    /// The dual of the row space: an [N+K, N] code. Every dual codeword
    /// splits as `[h1 | h2]` with h1 over the stored coordinates.
    pub fn dual_code(&self) -> LinearCode {
        code_from_generator(&nullspace_basis(&self.gen)).expect("dual has dimension N >= 1")
    }
}

/// Extend a storage code with virtual source symbols: the generator
/// becomes `[G | I_K]`. Fails only if N + K would exceed the 64-coordinate
/// support limit.
pub fn to_update_code(c: &LinearCode) -> Result<UpdateCode> {
    if c.n + c.k > 64 {
        return Err(Error::InvalidParameter(format!(
            "stored + source coordinate count {} exceeds the 64-coordinate limit",
            c.n + c.k
        )));
    }
    let id = FieldMatrix::identity(c.q, c.k)?;
    let gen = c.gen.hstack(&id)?;
    Ok(UpdateCode { q: c.q, n: c.n, k: c.k, gen })
}

/// Codeword counts by split weight pair: entry `(t1, t2)` counts the
/// codewords whose first-section support has size t1 and whose
/// second-section support has size t2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BivariateEnumerator {
    n: usize,
    k: usize,
    counts: Vec<Vec<u64>>,
}

impl BivariateEnumerator {
    /// First-section length (stored symbols).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Second-section length (source symbols).
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn count(&self, t1: usize, t2: usize) -> u64 {
        self.counts[t1][t2]
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn total(&self) -> u128 {
        self.counts.iter().flatten().map(|&c| c as u128).sum()
    }
}

/// Split-weight enumerator of any linear code whose coordinates are
/// divided into a first section of length `first` and the remainder.
pub fn split_weight_enumerator(c: &LinearCode, first: usize, limits: &Limits) -> Result<BivariateEnumerator> {
    if first >= c.n {
        return Err(Error::InvalidParameter(format!(
            "split point {first} must be smaller than the code length {}",
            c.n
        )));
    }
    let total = message_count(c.q, c.k, limits)?;
    let (n1, n2) = (first, c.n - first);
    let counts = fold_words(
        &c.gen,
        total,
        || vec![vec![0u64; n2 + 1]; n1 + 1],
        |acc: &mut Vec<Vec<u64>>, w| {
            let t1 = w[..n1].iter().filter(|&&e| e != 0).count();
            let t2 = w[n1..].iter().filter(|&&e| e != 0).count();
            acc[t1][t2] += 1;
        },
        |mut a, b| {
            for (ra, rb) in a.iter_mut().zip(b) {
                for (x, y) in ra.iter_mut().zip(rb) {
                    *x += y;
                }
            }
            a
        },
    );
    Ok(BivariateEnumerator { n: n1, k: n2, counts })
}

/// Split-weight enumerator of an update code: stored weight vs. source
/// weight for all q^K codewords.
pub fn bivariate_enumerator(u: &UpdateCode, limits: &Limits) -> Result<BivariateEnumerator> {
    split_weight_enumerator(&u.as_linear_code(), u.n, limits)
}

/// Split-weight enumerator of the dual of an update code (q^N words),
/// split at the stored/source boundary.
pub fn update_dual_split(u: &UpdateCode, limits: &Limits) -> Result<BivariateEnumerator> {
    split_weight_enumerator(&u.dual_code(), u.n, limits)
}

/// Codeword counts per (stored support, source support) pair.
pub fn bivariate_support_enumerator(
    c: &LinearCode,
    first: usize,
    limits: &Limits,
) -> Result<BTreeMap<(Support, Support), u64>> {
    if first >= c.n {
        return Err(Error::InvalidParameter(format!(
            "split point {first} must be smaller than the code length {}",
            c.n
        )));
    }
    let total = message_count(c.q, c.k, limits)?;
    let n1 = first;
    Ok(fold_words(
        &c.gen,
        total,
        BTreeMap::new,
        |acc: &mut BTreeMap<(Support, Support), u64>, w| {
            let mut m1 = 0u64;
            let mut m2 = 0u64;
            for (i, &e) in w.iter().enumerate() {
                if e != 0 {
                    if i < n1 {
                        m1 |= 1 << i;
                    } else {
                        m2 |= 1 << (i - n1);
                    }
                }
            }
            *acc.entry((Support(m1), Support(m2))).or_insert(0) += 1;
        },
        |mut a, b| {
            for (kk, c) in b {
                *a.entry(kk).or_insert(0) += c;
            }
            a
        },
    ))
}

/// Outcome of checking an update code against the three update-efficiency
/// criteria: local recovery, global recovery, and efficient update.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpdateCriteriaReport {
    /// Local recovery: every stored node is covered by a dual codeword
    /// supported only on stored coordinates with at most r+1 of them.
    pub lr_pass: bool,
    /// Per-node witness dual supports (stored side), indexed by node-1.
    pub lr_witnesses: Vec<Option<Support>>,
    /// Global recovery: no nonzero codeword touches at most beta stored
    /// coordinates.
    pub gr_pass: bool,
    pub gr_violation: Option<FieldVector>,
    /// Efficient update: a single changed source symbol touches at most
    /// delta stored coordinates.
    pub eu_pass: bool,
    pub eu_violation: Option<FieldVector>,
}

impl UpdateCriteriaReport {
    pub fn all_pass(&self) -> bool {
        self.lr_pass && self.gr_pass && self.eu_pass
    }
}

/// Check the local-recovery / global-recovery / efficient-update criteria
/// of an update code by exhaustive enumeration of the code (q^K words)
/// and its dual (q^N words).
pub fn verify_update_criteria(
    u: &UpdateCode,
    r: usize,
    beta: usize,
    delta: usize,
    limits: &Limits,
) -> Result<UpdateCriteriaReport> {
    let code_total = message_count(u.q, u.k, limits)?;
    let dual = u.dual_code();
    let dual_total = message_count(u.q, dual.k(), limits)?;
    let (n, _k) = (u.n, u.k);

    // Local recovery from the dual side: scan once, cover all nodes.
    let mut lr_witnesses: Vec<Option<Support>> = vec![None; n];
    scan_words(dual.generator(), 0, dual_total, |w| {
        let stored = &w[..n];
        let source = &w[n..];
        if source.iter().any(|&e| e != 0) {
            return;
        }
        let mut mask = 0u64;
        for (i, &e) in stored.iter().enumerate() {
            if e != 0 {
                mask |= 1 << i;
            }
        }
        let size = mask.count_ones() as usize;
        if size == 0 || size > r + 1 {
            return;
        }
        for i in 0..n {
            if mask & (1 << i) != 0 && lr_witnesses[i].is_none() {
                lr_witnesses[i] = Some(Support(mask));
            }
        }
    });
    let lr_pass = lr_witnesses.iter().all(|w| w.is_some());

    // Global recovery and efficient update from the code side.
    let mut gr_violation: Option<FieldVector> = None;
    let mut eu_violation: Option<FieldVector> = None;
    scan_words(u.generator(), 0, code_total, |w| {
        let t1 = w[..n].iter().filter(|&&e| e != 0).count();
        let t2 = w[n..].iter().filter(|&&e| e != 0).count();
        if gr_violation.is_none() && (t1 > 0 || t2 > 0) && t1 <= beta {
            gr_violation = Some(FieldVector::new(u.q, w.to_vec()).expect("reduced"));
        }
        if eu_violation.is_none() && t2 == 1 && t1 > delta {
            eu_violation = Some(FieldVector::new(u.q, w.to_vec()).expect("reduced"));
        }
    });

    Ok(UpdateCriteriaReport {
        lr_pass,
        lr_witnesses,
        gr_pass: gr_violation.is_none(),
        gr_violation,
        eu_pass: eu_violation.is_none(),
        eu_violation,
    })
}

/// A code read from the line-oriented file format: either a storage code
/// or a pseudo-systematic update code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParsedCode {
    Storage(LinearCode),
    Update(UpdateCode),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum FileKind {
    Generator,
    ParityCheck,
    GeneratorPseudoSystematic,
}

/// Parse the code file format.
///
/// Line-oriented text; `#` starts a comment and blank lines are ignored.
/// Header lines (in any order, each exactly once) are `q <prime>`,
/// `kind <generator|parity_check|generator_pseudosystematic>`,
/// `rows <int>`, `cols <int>`, and — required exactly for update codes —
/// `sourcesymbols <K>`. They are followed by `rows` matrix lines of
/// `cols` whitespace-separated integers in `[0, q)`.
pub fn parse_code_file(text: &str) -> Result<ParsedCode> {
    let mut q: Option<(u64, usize)> = None;
    let mut kind: Option<(FileKind, usize)> = None;
    let mut rows: Option<(usize, usize)> = None;
    let mut cols: Option<(usize, usize)> = None;
    let mut sourcesymbols: Option<(usize, usize)> = None;
    let mut matrix: Vec<Vec<u64>> = Vec::new();
    let mut matrix_done = false;

    let parse_err = |line: usize, msg: String| Error::Parse { line, msg };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let first = tokens.next().expect("nonempty line has a token");
        let is_header = matches!(first, "q" | "kind" | "rows" | "cols" | "sourcesymbols");
        if is_header {
            if !matrix.is_empty() {
                return Err(parse_err(line_no, format!("header '{first}' after matrix rows began")));
            }
            let value = tokens
                .next()
                .ok_or_else(|| parse_err(line_no, format!("header '{first}' is missing its value")))?;
            if tokens.next().is_some() {
                return Err(parse_err(line_no, format!("header '{first}' has trailing tokens")));
            }
            match first {
                "q" => {
                    if q.is_some() {
                        return Err(parse_err(line_no, "duplicate 'q' header".into()));
                    }
                    let v: u64 = value
                        .parse()
                        .map_err(|_| parse_err(line_no, format!("'{value}' is not a valid modulus")))?;
                    if !is_prime(v) {
                        return Err(parse_err(line_no, format!("modulus {v} is not prime")));
                    }
                    q = Some((v, line_no));
                }
                "kind" => {
                    if kind.is_some() {
                        return Err(parse_err(line_no, "duplicate 'kind' header".into()));
                    }
                    let k = match value {
                        "generator" => FileKind::Generator,
                        "parity_check" => FileKind::ParityCheck,
                        "generator_pseudosystematic" => FileKind::GeneratorPseudoSystematic,
                        other => {
                            return Err(parse_err(line_no, format!("unknown kind '{other}'")));
                        }
                    };
                    kind = Some((k, line_no));
                }
                "rows" | "cols" | "sourcesymbols" => {
                    let v: usize = value
                        .parse()
                        .map_err(|_| parse_err(line_no, format!("'{value}' is not a valid count")))?;
                    let slot = match first {
                        "rows" => &mut rows,
                        "cols" => &mut cols,
                        _ => &mut sourcesymbols,
                    };
                    if slot.is_some() {
                        return Err(parse_err(line_no, format!("duplicate '{first}' header")));
                    }
                    if v == 0 {
                        return Err(parse_err(line_no, format!("'{first}' must be positive")));
                    }
                    *slot = Some((v, line_no));
                }
                _ => unreachable!(),
            }
            continue;
        }

        // Matrix row.
        let (Some((qv, _)), Some((nrows, _)), Some((ncols, _))) = (q, rows, cols) else {
            return Err(parse_err(
                line_no,
                "matrix rows may only follow the q/kind/rows/cols headers".into(),
            ));
        };
        if matrix_done {
            return Err(parse_err(line_no, format!("more than {nrows} matrix rows")));
        }
        let mut row = Vec::with_capacity(ncols);
        for tok in std::iter::once(first).chain(tokens) {
            let v: u64 = tok
                .parse()
                .map_err(|_| parse_err(line_no, format!("'{tok}' is not a matrix entry")))?;
            if v >= qv {
                return Err(parse_err(line_no, format!("entry {v} is out of range for modulus {qv}")));
            }
            row.push(v);
        }
        if row.len() != ncols {
            return Err(parse_err(
                line_no,
                format!("expected {ncols} entries in this row, found {}", row.len()),
            ));
        }
        matrix.push(row);
        if matrix.len() == nrows {
            matrix_done = true;
        }
    }

    let last = text.lines().count().max(1);
    let (qv, _) = q.ok_or_else(|| parse_err(last, "missing 'q' header".into()))?;
    let (kv, kind_line) = kind.ok_or_else(|| parse_err(last, "missing 'kind' header".into()))?;
    let (nrows, _) = rows.ok_or_else(|| parse_err(last, "missing 'rows' header".into()))?;
    let (_ncols, _) = cols.ok_or_else(|| parse_err(last, "missing 'cols' header".into()))?;
    if matrix.len() != nrows {
        return Err(parse_err(last, format!("expected {nrows} matrix rows, found {}", matrix.len())));
    }
    let m = FieldMatrix::from_rows(qv, &matrix)?;
    match kv {
        FileKind::Generator => {
            if let Some((_, line)) = sourcesymbols {
                return Err(parse_err(line, "'sourcesymbols' is only valid for kind generator_pseudosystematic".into()));
            }
            Ok(ParsedCode::Storage(code_from_generator(&m)?))
        }
        FileKind::ParityCheck => {
            if let Some((_, line)) = sourcesymbols {
                return Err(parse_err(line, "'sourcesymbols' is only valid for kind generator_pseudosystematic".into()));
            }
            Ok(ParsedCode::Storage(code_from_parity_check(&m)?))
        }
        FileKind::GeneratorPseudoSystematic => {
            let (k, _) = sourcesymbols.ok_or_else(|| {
                parse_err(kind_line, "kind generator_pseudosystematic requires a 'sourcesymbols' header".into())
            })?;
            Ok(ParsedCode::Update(UpdateCode::new(m, k)?))
        }
    }
}

fn format_matrix(out: &mut String, m: &FieldMatrix) {
    for r in 0..m.rows() {
        let line: Vec<String> = m.row(r).iter().map(|e| e.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
}

/// Serialize a code in the file format accepted by [`parse_code_file`].
/// Storage codes are written via their canonical generator.
pub fn format_code_file(code: &ParsedCode) -> String {
    let mut out = String::new();
    match code {
        ParsedCode::Storage(c) => {
            let g = c.generator();
            out.push_str(&format!("q {}\n", c.q()));
            out.push_str("kind generator\n");
            out.push_str(&format!("rows {}\n", g.rows()));
            out.push_str(&format!("cols {}\n", g.cols()));
            format_matrix(&mut out, g);
        }
        ParsedCode::Update(u) => {
            let g = u.generator();
            out.push_str(&format!("q {}\n", u.q()));
            out.push_str("kind generator_pseudosystematic\n");
            out.push_str(&format!("rows {}\n", g.rows()));
            out.push_str(&format!("cols {}\n", g.cols()));
            out.push_str(&format!("sourcesymbols {}\n", u.k()));
            format_matrix(&mut out, g);
        }
    }
    out
}
