//! Arithmetic over prime fields GF(q) and the dense linear algebra the
//! rest of the crate builds on: reduced row echelon form, rank, null
//! spaces, and matrix products.
//!
//! Field elements are plain integers reduced mod q; q is kept small in
//! practice, so there is no table-driven arithmetic. All values are
//! immutable after construction and every operation is a pure function.

use crate::{Error, Result};

/// Deterministic primality test by trial division (q stays desk-sized).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// A prime modulus, validated at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    q: u64,
}

impl PrimeField {
    pub fn new(q: u64) -> Result<Self> {
        if is_prime(q) {
            Ok(PrimeField { q })
        } else {
            Err(Error::NotPrime(q))
        }
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }
}

/// (a + b) mod q for reduced inputs.
pub fn fe_add(a: u64, b: u64, q: u64) -> u64 {
    debug_assert!(a < q && b < q);
    let s = a + b;
    if s >= q {
        s - q
    } else {
        s
    }
}

/// (a - b) mod q for reduced inputs.
pub fn fe_sub(a: u64, b: u64, q: u64) -> u64 {
    debug_assert!(a < q && b < q);
    if a >= b {
        a - b
    } else {
        a + q - b
    }
}

/// (a * b) mod q for reduced inputs.
pub fn fe_mul(a: u64, b: u64, q: u64) -> u64 {
    debug_assert!(a < q && b < q);
    ((a as u128 * b as u128) % q as u128) as u64
}

/// Additive inverse mod q.
pub fn fe_neg(a: u64, q: u64) -> u64 {
    debug_assert!(a < q);
    if a == 0 {
        0
    } else {
        q - a
    }
}

/// Multiplicative inverse mod prime q via the extended Euclidean
/// algorithm. Inverting zero is a domain error.
pub fn fe_inv(a: u64, q: u64) -> Result<u64> {
    if a == 0 {
        return Err(Error::InvalidParameter("zero has no multiplicative inverse".into()));
    }
    debug_assert!(a < q);
    let (mut r0, mut r1) = (q as i128, a as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let f = r0 / r1;
        (r0, r1) = (r1, r0 - f * r1);
        (s0, s1) = (s1, s0 - f * s1);
    }
    debug_assert_eq!(r0, 1, "modulus must be prime");
    Ok(s0.rem_euclid(q as i128) as u64)
}

/// A vector over GF(q) with every entry reduced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldVector {
    q: u64,
    entries: Vec<u64>,
}

impl FieldVector {
    pub fn new(q: u64, entries: Vec<u64>) -> Result<Self> {
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        if let Some(&bad) = entries.iter().find(|&&e| e >= q) {
            return Err(Error::InvalidParameter(format!("entry {bad} is not reduced mod {q}")));
        }
        Ok(FieldVector { q, entries })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> u64 {
        self.entries[i]
    }

    /// Number of nonzero coordinates.
    pub fn weight(&self) -> usize {
        self.entries.iter().filter(|&&e| e != 0).count()
    }
}

/// A dense row-major matrix over GF(q).
///
/// Zero-row matrices are permitted (they arise as empty null-space bases);
/// zero-column matrices are not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldMatrix {
    q: u64,
    rows: usize,
    cols: usize,
    entries: Vec<u64>,
}

impl FieldMatrix {
    pub fn new(q: u64, rows: usize, cols: usize, entries: Vec<u64>) -> Result<Self> {
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        if cols == 0 {
            return Err(Error::InvalidParameter("matrix must have at least one column".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if let Some(&bad) = entries.iter().find(|&&e| e >= q) {
            return Err(Error::InvalidParameter(format!("entry {bad} is not reduced mod {q}")));
        }
        Ok(FieldMatrix { q, rows, cols, entries })
    }

    pub fn from_rows(q: u64, rows: &[Vec<u64>]) -> Result<Self> {
        let cols = rows.first().map(|r| r.len()).unwrap_or(0);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("rows have differing lengths".into()));
        }
        FieldMatrix::new(q, rows.len(), cols, rows.concat())
    }

    pub fn zero(q: u64, rows: usize, cols: usize) -> Result<Self> {
        FieldMatrix::new(q, rows, cols, vec![0; rows * cols])
    }

    pub fn identity(q: u64, n: usize) -> Result<Self> {
        let mut m = FieldMatrix::zero(q, n, n)?;
        for i in 0..n {
            m.set(i, i, 1);
        }
        Ok(m)
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        debug_assert!(r < self.rows && c < self.cols);
        self.entries[r * self.cols + c]
    }

    pub(crate) fn set(&mut self, r: usize, c: usize, v: u64) {
        debug_assert!(r < self.rows && c < self.cols && v < self.q);
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u64] {
        debug_assert!(r < self.rows);
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vector(&self, r: usize) -> FieldVector {
        FieldVector { q: self.q, entries: self.row(r).to_vec() }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn transpose(&self) -> FieldMatrix {
        let mut entries = vec![0u64; self.rows * self.cols];
        for r in 0..self.rows {
            for c in 0..self.cols {
                entries[c * self.rows + r] = self.get(r, c);
            }
        }
        FieldMatrix { q: self.q, rows: self.cols, cols: self.rows, entries }
    }

    /// Horizontal concatenation `[self | rhs]`.
    pub fn hstack(&self, rhs: &FieldMatrix) -> Result<FieldMatrix> {
        if self.q != rhs.q {
            return Err(Error::InvalidParameter("matrices over different fields".into()));
        }
        if self.rows != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot join {} rows with {} rows side by side",
                self.rows, rhs.rows
            )));
        }
        let cols = self.cols + rhs.cols;
        let mut entries = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            entries.extend_from_slice(self.row(r));
            entries.extend_from_slice(rhs.row(r));
        }
        Ok(FieldMatrix { q: self.q, rows: self.rows, cols, entries })
    }

    /// The submatrix made of the first `n` rows.
    pub(crate) fn take_rows(&self, n: usize) -> FieldMatrix {
        debug_assert!(n <= self.rows);
        FieldMatrix {
            q: self.q,
            rows: n,
            cols: self.cols,
            entries: self.entries[..n * self.cols].to_vec(),
        }
    }

    /// The submatrix made of columns `lo..hi`.
    pub fn column_range(&self, lo: usize, hi: usize) -> FieldMatrix {
        debug_assert!(lo < hi && hi <= self.cols);
        let cols = hi - lo;
        let mut entries = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            entries.extend_from_slice(&self.row(r)[lo..hi]);
        }
        FieldMatrix { q: self.q, rows: self.rows, cols, entries }
    }
}

/// Reduced row echelon form by Gauss-Jordan elimination.
///
/// Columns are scanned left to right and the first row with a nonzero
/// entry becomes the pivot, so the output is deterministic. Returns the
/// reduced matrix, its rank, and the pivot column indices in ascending
/// order. The row space is preserved.
pub fn rref(m: &FieldMatrix) -> (FieldMatrix, usize, Vec<usize>) {
    let mut a = m.clone();
    let q = a.q;
    let mut pivots = Vec::new();
    let mut pr = 0usize;
    for c in 0..a.cols {
        if pr == a.rows {
            break;
        }
        let Some(sel) = (pr..a.rows).find(|&r| a.get(r, c) != 0) else {
            continue;
        };
        a.swap_rows(pr, sel);
        let lead = a.get(pr, c);
        if lead != 1 {
            let inv = fe_inv(lead, q).expect("pivot entry is nonzero");
            for j in c..a.cols {
                a.set(pr, j, fe_mul(a.get(pr, j), inv, q));
            }
        }
        for r in 0..a.rows {
            if r != pr && a.get(r, c) != 0 {
                let f = a.get(r, c);
                for j in c..a.cols {
                    let v = fe_sub(a.get(r, j), fe_mul(f, a.get(pr, j), q), q);
                    a.set(r, j, v);
                }
            }
        }
        pivots.push(c);
        pr += 1;
    }
    let rank = pivots.len();
    (a, rank, pivots)
}

/// A row basis of `{x : m x^T = 0}`.
///
/// The basis has `cols(m) - rank(m)` rows, one per free column of the
/// reduced form, ordered by free column index. A full-column-rank input
/// yields a zero-row matrix, which is a valid (empty) basis.
pub fn nullspace_basis(m: &FieldMatrix) -> FieldMatrix {
    let (red, _rank, pivots) = rref(m);
    let q = m.q;
    let cols = m.cols;
    let mut is_pivot = vec![false; cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut out_rows: Vec<Vec<u64>> = Vec::new();
    for f in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![0u64; cols];
        v[f] = 1;
        for (pi, &pc) in pivots.iter().enumerate() {
            v[pc] = fe_neg(red.get(pi, f), q);
        }
        out_rows.push(v);
    }
    let rows = out_rows.len();
    FieldMatrix { q, rows, cols, entries: out_rows.concat() }
}

/// Standard matrix product over GF(q).
pub fn mat_mul(a: &FieldMatrix, b: &FieldMatrix) -> Result<FieldMatrix> {
    if a.q != b.q {
        return Err(Error::InvalidParameter("matrices over different fields".into()));
    }
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch(format!(
            "cannot multiply {}x{} by {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let q = a.q;
    let mut out = FieldMatrix::zero(q, a.rows, b.cols)?;
    for i in 0..a.rows {
        for l in 0..a.cols {
            let f = a.get(i, l);
            if f == 0 {
                continue;
            }
            for j in 0..b.cols {
                let v = fe_add(out.get(i, j), fe_mul(f, b.get(l, j), q), q);
                out.set(i, j, v);
            }
        }
    }
    Ok(out)
}
