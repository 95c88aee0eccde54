//! Exact dual-enumerator transforms: the per-coordinate kernel, the full
//! support-enumerator transform, its symmetrized (per-weight) form, and
//! the bivariate split-weight form used for update-efficient codes.
//!
//! Everything here is exact integer / rational arithmetic. The transforms
//! turn the (support or weight) enumerator of a linear code into that of
//! its dual without enumerating the dual, and they extend linearly to
//! arbitrary rational profiles, which is what the bound LPs exploit.

use std::collections::BTreeMap;
use std::sync::{Mutex, OnceLock};

use num::BigInt;
use num_traits::{One, Zero};

use crate::code_model::{BivariateEnumerator, Support, SupportEnumerator};
use crate::ratlp::Rational;
use crate::{Error, Result};

/// Per-coordinate transform kernel. `s` and `w` are membership
/// indicators of the coordinate in the two supports.
///
/// Returns 1 when `w` is absent; `q - 1` when only `w` is present;
/// -1 when both are present.
pub fn kappa(s: bool, w: bool, q: u64) -> i64 {
    if !w {
        1
    } else if !s {
        (q - 1) as i64
    } else {
        -1
    }
}

/// Exact binomial coefficient with a process-wide Pascal-triangle cache.
/// `k > n` yields 0.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    static PASCAL: OnceLock<Mutex<Vec<Vec<BigInt>>>> = OnceLock::new();
    let cache = PASCAL.get_or_init(|| Mutex::new(vec![vec![BigInt::one()]]));
    let mut rows = cache.lock().expect("binomial cache poisoned");
    while rows.len() <= n {
        let m = rows.len();
        let mut row = Vec::with_capacity(m + 1);
        row.push(BigInt::one());
        for j in 1..m {
            let prev = &rows[m - 1];
            row.push(&prev[j - 1] + &prev[j]);
        }
        row.push(BigInt::one());
        rows.push(row);
    }
    rows[n][k].clone()
}

/// The kernel product over all `n` coordinates, in closed form:
/// `(-1)^|s ∩ w| * (q-1)^|w \ s|`.
pub fn product_kernel(s: Support, w: Support, n: usize, q: u64) -> BigInt {
    debug_assert!(n <= 64);
    debug_assert!(n == 64 || (s.mask() < (1u64 << n) && w.mask() < (1u64 << n)));
    let sign_flips = s.intersection(w).size();
    let degree = w.minus(s).size();
    let mut v = BigInt::from(q - 1).pow(degree);
    if sign_flips % 2 == 1 {
        v = -v;
    }
    v
}

/// A rational-valued support enumerator, as produced by
/// [`support_transform`]. Supports with value zero are simply absent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalEnumerator {
    n: usize,
    values: BTreeMap<Support, Rational>,
}

impl RationalEnumerator {
    pub fn n(&self) -> usize {
        self.n
    }

    /// The value at one support; absent keys mean zero.
    pub fn value(&self, w: Support) -> Rational {
        self.values.get(&w).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Support, &Rational)> + '_ {
        self.values.iter().map(|(&w, v)| (w, v))
    }

    pub fn distinct_supports(&self) -> usize {
        self.values.len()
    }

    /// View an integer support enumerator as a rational one (for
    /// entry-by-entry comparison with transform output).
    pub fn from_support_enumerator(se: &SupportEnumerator) -> Self {
        let values = se
            .iter()
            .map(|(w, c)| (w, Rational::from_integer(BigInt::from(c))))
            .collect();
        RationalEnumerator { n: se.n(), values }
    }
}

/// Numerators of the transform at every support mask in `lo..hi`:
/// `sum_s Λ(s) * product_kernel(s, w)`, computed with per-degree integer
/// accumulators so the hot loop never touches big integers.
fn transform_numerators(
    entries: &[(u64, u64)],
    n: usize,
    qm1_pows: &[BigInt],
    lo: u128,
    hi: u128,
) -> Vec<(Support, BigInt)> {
    let mut out = Vec::new();
    let mut acc = vec![0i128; n + 1];
    let mut w128 = lo;
    while w128 < hi {
        let w = w128 as u64;
        acc.iter_mut().for_each(|a| *a = 0);
        for &(s, count) in entries {
            let degree = (w & !s).count_ones() as usize;
            if (s & w).count_ones() % 2 == 0 {
                acc[degree] += count as i128;
            } else {
                acc[degree] -= count as i128;
            }
        }
        let mut num = BigInt::zero();
        for (d, &a) in acc.iter().enumerate() {
            if a != 0 {
                num += BigInt::from(a) * &qm1_pows[d];
            }
        }
        if !num.is_zero() {
            out.push((Support::from_mask(w), num));
        }
        w128 += 1;
    }
    out
}

fn transform_prepare(lam: &SupportEnumerator, q: u64, codebook_size: u128) -> (Vec<(u64, u64)>, Vec<BigInt>, u128) {
    assert_eq!(
        lam.total(),
        codebook_size,
        "codebook_size must equal the total count of the enumerator"
    );
    let entries: Vec<(u64, u64)> = lam.iter().map(|(w, c)| (w.mask(), c)).collect();
    let n = lam.n();
    let mut qm1_pows = Vec::with_capacity(n + 1);
    let mut p = BigInt::one();
    for _ in 0..=n {
        qm1_pows.push(p.clone());
        p *= q - 1;
    }
    (entries, qm1_pows, 1u128 << n)
}

fn collect_transform(numerators: Vec<(Support, BigInt)>, n: usize, codebook_size: u128) -> RationalEnumerator {
    let size = BigInt::from(codebook_size);
    let values = numerators
        .into_iter()
        .map(|(w, num)| (w, Rational::new(num, size.clone())))
        .collect();
    RationalEnumerator { n, values }
}

/// Transform a support enumerator into its dual-side counterpart:
/// `out(w) = (1/|C|) * sum_s Λ(s) * product_kernel(s, w)`.
///
/// When `Λ` is the support enumerator of a linear code with `|C|`
/// codewords, the output is integer-valued and equals the support
/// enumerator of the dual code. Cost is `O(2^N * #entries)`; callers
/// gate `N` accordingly.
pub fn support_transform(lam: &SupportEnumerator, q: u64, codebook_size: u128) -> RationalEnumerator {
    let (entries, qm1_pows, total) = transform_prepare(lam, q, codebook_size);
    let n = lam.n();
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        const MIN_CHUNK: u128 = 1 << 10;
        let want = (rayon::current_num_threads() as u128) * 4;
        let chunk = (total / want.max(1)).max(MIN_CHUNK);
        let mut ranges = Vec::new();
        let mut lo = 0u128;
        while lo < total {
            let hi = (lo + chunk).min(total);
            ranges.push((lo, hi));
            lo = hi;
        }
        let numerators = ranges
            .into_par_iter()
            .map(|(lo, hi)| transform_numerators(&entries, n, &qm1_pows, lo, hi))
            .reduce(Vec::new, |mut a, mut b| {
                a.append(&mut b);
                a
            });
        collect_transform(numerators, n, codebook_size)
    }
    #[cfg(not(feature = "parallel"))]
    {
        let numerators = transform_numerators(&entries, n, &qm1_pows, 0, total);
        collect_transform(numerators, n, codebook_size)
    }
}

/// Single-threaded variant of [`support_transform`].
pub fn support_transform_serial(lam: &SupportEnumerator, q: u64, codebook_size: u128) -> RationalEnumerator {
    let (entries, qm1_pows, total) = transform_prepare(lam, q, codebook_size);
    let numerators = transform_numerators(&entries, lam.n(), &qm1_pows, 0, total);
    collect_transform(numerators, lam.n(), codebook_size)
}

/// A weight profile with one rational value per individual support of
/// each size: `a[t]` applies to every support of size `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricProfile {
    n: usize,
    a: Vec<Rational>,
}

impl SymmetricProfile {
    /// Wrap explicit per-size values; the length fixes N + 1.
    pub fn new(a: Vec<Rational>) -> Self {
        assert!(!a.is_empty(), "a symmetric profile needs at least the size-0 entry");
        SymmetricProfile { n: a.len() - 1, a }
    }

    /// The per-support profile of a code with the given weight counts:
    /// `a[t] = counts[t] / binomial(N, t)`.
    pub fn from_weight_counts(counts: &[u64]) -> Self {
        assert!(!counts.is_empty());
        let n = counts.len() - 1;
        let a = counts
            .iter()
            .enumerate()
            .map(|(t, &c)| Rational::new(BigInt::from(c), binomial(n, t)))
            .collect();
        SymmetricProfile { n, a }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[Rational] {
        &self.a
    }

    pub fn value(&self, t: usize) -> &Rational {
        &self.a[t]
    }
}

/// Coefficient of `a[s]` in the symmetrized transform's `b[t]`:
/// `sum_{i+j=s} binomial(t,i) * binomial(n-t,j) * (-1)^i * (q-1)^(t-i)`.
pub(crate) fn sym_kernel(n: usize, q: u64, t: usize, s: usize) -> BigInt {
    let mut total = BigInt::zero();
    for i in 0..=t.min(s) {
        let j = s - i;
        if j > n - t {
            continue;
        }
        let mut term = binomial(t, i) * binomial(n - t, j) * BigInt::from(q - 1).pow((t - i) as u32);
        if i % 2 == 1 {
            term = -term;
        }
        total += term;
    }
    total
}

/// The symmetrized transform: collapses [`support_transform`] over all
/// supports of each size.
///
/// When `a` is the per-support profile of a linear code,
/// `b[t] = |C| * (dual profile)[t]` for every size `t`.
pub fn symmetric_transform(a: &SymmetricProfile, q: u64) -> SymmetricProfile {
    let n = a.n;
    let b = (0..=n)
        .map(|t| {
            let mut total = Rational::zero();
            for (s, av) in a.a.iter().enumerate() {
                if !av.is_zero() {
                    total += av * Rational::from_integer(sym_kernel(n, q, t, s));
                }
            }
            total
        })
        .collect();
    SymmetricProfile { n, a: b }
}

/// One coefficient of the bivariate transform:
/// `(-1)^(u1+u2) * (q-1)^(t1+t2-u1-u2) * binomial(t1,u1) * binomial(N-t1,v1)
///  * binomial(t2,u2) * binomial(K-t2,v2)`.
#[allow(clippy::too_many_arguments)]
pub fn xi_coefficient(
    u1: usize,
    v1: usize,
    u2: usize,
    v2: usize,
    t1: usize,
    t2: usize,
    n: usize,
    k: usize,
    q: u64,
) -> Result<BigInt> {
    if t1 > n || t2 > k {
        return Err(Error::InvalidParameter(format!(
            "size pair ({t1},{t2}) exceeds the section lengths ({n},{k})"
        )));
    }
    if u1 > t1 || v1 > n - t1 || u2 > t2 || v2 > k - t2 {
        return Err(Error::InvalidParameter(format!(
            "index quadruple ({u1},{v1},{u2},{v2}) out of range for sizes ({t1},{t2}) over ({n},{k})"
        )));
    }
    let mut term = BigInt::from(q - 1).pow((t1 + t2 - u1 - u2) as u32)
        * binomial(t1, u1)
        * binomial(n - t1, v1)
        * binomial(t2, u2)
        * binomial(k - t2, v2);
    if (u1 + u2) % 2 == 1 {
        term = -term;
    }
    Ok(term)
}

/// A rational profile over split weight pairs: `value(t1, t2)` applies to
/// every support pair with first-section size t1 and second-section size
/// t2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BivariateProfile {
    n: usize,
    k: usize,
    values: Vec<Vec<Rational>>,
}

impl BivariateProfile {
    /// Wrap an (N+1) x (K+1) matrix of values.
    pub fn new(values: Vec<Vec<Rational>>) -> Self {
        assert!(!values.is_empty() && !values[0].is_empty());
        let k = values[0].len() - 1;
        assert!(values.iter().all(|r| r.len() == k + 1), "ragged profile rows");
        BivariateProfile { n: values.len() - 1, k, values }
    }

    /// The symmetrized per-support-pair profile of split weight counts:
    /// `value(t1,t2) = count(t1,t2) / (binomial(N,t1) * binomial(K,t2))`.
    pub fn symmetrized_from(be: &BivariateEnumerator) -> Self {
        let (n, k) = (be.n(), be.k());
        let values = (0..=n)
            .map(|t1| {
                (0..=k)
                    .map(|t2| {
                        Rational::new(BigInt::from(be.count(t1, t2)), binomial(n, t1) * binomial(k, t2))
                    })
                    .collect()
            })
            .collect();
        BivariateProfile { n, k, values }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn value(&self, t1: usize, t2: usize) -> &Rational {
        &self.values[t1][t2]
    }

    pub fn values(&self) -> &[Vec<Rational>] {
        &self.values
    }
}

/// The bivariate transform:
/// `c[t1][t2] = sum Ξ(u1,v1,u2,v2 | t1,t2) * a[u1+v1][u2+v2]`.
///
/// When `a` is the symmetrized split-weight profile of a
/// pseudo-systematic code with q^K codewords, `c` is q^K times the
/// symmetrized profile of its dual.
pub fn bivariate_transform(a: &BivariateProfile, q: u64) -> BivariateProfile {
    let (n, k) = (a.n, a.k);
    let values = (0..=n)
        .map(|t1| {
            (0..=k)
                .map(|t2| {
                    let mut total = Rational::zero();
                    for u1 in 0..=t1 {
                        for v1 in 0..=n - t1 {
                            for u2 in 0..=t2 {
                                for v2 in 0..=k - t2 {
                                    let av = &a.values[u1 + v1][u2 + v2];
                                    if av.is_zero() {
                                        continue;
                                    }
                                    let xi = xi_coefficient(u1, v1, u2, v2, t1, t2, n, k, q)
                                        .expect("indices in range by construction");
                                    total += av * Rational::from_integer(xi);
                                }
                            }
                        }
                    }
                    total
                })
                .collect()
        })
        .collect();
    BivariateProfile { n, k, values }
}
