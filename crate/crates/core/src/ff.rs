//! Arithmetic and linear algebra over a prime field `F_b`.
//!
//! Field elements are plain `u32` values in `0..b`. The base is bounded by
//! `2^16`, so every product fits in a `u64` before reduction.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported base (exclusive).
pub const MAX_BASE: u64 = 1 << 16;

/// Deterministic primality test by trial division.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// A prime `b` with `2 <= b < 2^16`; the characteristic of the digit field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeBase(u32);

impl PrimeBase {
    pub fn new(b: u64) -> Result<Self> {
        if !(2..MAX_BASE).contains(&b) {
            return Err(Error::BaseOutOfRange(b));
        }
        if !is_prime(b) {
            return Err(Error::NotPrime(b));
        }
        Ok(PrimeBase(b as u32))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn reduce(self, v: u64) -> u32 {
        (v % self.0 as u64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.0 - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.0 as u64) as u32
    }

    /// `a^e` with the convention `0^0 = 1`.
    pub fn pow(self, a: u32, mut e: u64) -> u32 {
        let mut base = a % self.0;
        let mut acc = 1 % self.0;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `a` must be nonzero.
    pub fn inv(self, a: u32) -> u32 {
        debug_assert!(a % self.0 != 0, "zero has no inverse");
        self.pow(a, self.0 as u64 - 2)
    }

    /// Number of base-`b` digits needed to hold `b^n` distinct values, as a `u128`
    /// when it fits.
    pub fn checked_pow(self, n: u32) -> Option<u128> {
        (self.0 as u128).checked_pow(n)
    }
}

impl Serialize for PrimeBase {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u32(self.0)
    }
}

impl<'de> Deserialize<'de> for PrimeBase {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let b = u64::deserialize(d)?;
        PrimeBase::new(b).map_err(serde::de::Error::custom)
    }
}

/// Binomial coefficient `C(v, i)` reduced modulo `b`, via Lucas' theorem.
///
/// `C(v, i) = 0` whenever `v < i`.
pub fn binom_mod_p(v: u64, i: u64, base: PrimeBase) -> u32 {
    if i > v {
        return 0;
    }
    let p = base.get() as u64;
    let (mut v, mut i) = (v, i);
    let mut acc = 1u32;
    while i > 0 || v > 0 {
        let (vd, id) = (v % p, i % p);
        if id > vd {
            return 0;
        }
        acc = base.mul(acc, small_binom(vd as u32, id as u32, base));
        v /= p;
        i /= p;
    }
    acc
}

// C(n, k) mod p for n < p, by the multiplicative formula.
fn small_binom(n: u32, k: u32, base: PrimeBase) -> u32 {
    let k = k.min(n - k);
    let (mut num, mut den) = (1u32, 1u32);
    for j in 0..k {
        num = base.mul(num, n - j);
        den = base.mul(den, j + 1);
    }
    base.mul(num, base.inv(den))
}

/// Dense row-major matrix over `F_b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldMatrix {
    base: PrimeBase,
    n_rows: usize,
    n_cols: usize,
    entries: Vec<u32>,
}

impl FieldMatrix {
    pub fn new(base: PrimeBase, n_rows: usize, n_cols: usize, entries: Vec<u32>) -> Result<Self> {
        if entries.len() != n_rows * n_cols {
            return Err(Error::DimensionMismatch {
                expected: n_rows * n_cols,
                found: entries.len(),
            });
        }
        if let Some(&e) = entries.iter().find(|&&e| e >= base.get()) {
            return Err(Error::invalid(format!(
                "matrix entry {e} is not reduced modulo {}",
                base.get()
            )));
        }
        Ok(FieldMatrix {
            base,
            n_rows,
            n_cols,
            entries,
        })
    }

    /// Builds a matrix from rows of arbitrary integers, reducing them modulo `b`.
    pub fn from_rows<R: AsRef<[u64]>>(base: PrimeBase, rows: &[R]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut entries = Vec::with_capacity(n_rows * n_cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != n_cols {
                return Err(Error::DimensionMismatch {
                    expected: n_cols,
                    found: r.len(),
                });
            }
            entries.extend(r.iter().map(|&e| base.reduce(e)));
        }
        Ok(FieldMatrix {
            base,
            n_rows,
            n_cols,
            entries,
        })
    }

    pub fn zeros(base: PrimeBase, n_rows: usize, n_cols: usize) -> Self {
        FieldMatrix {
            base,
            n_rows,
            n_cols,
            entries: vec![0; n_rows * n_cols],
        }
    }

    pub fn identity(base: PrimeBase, n: usize) -> Self {
        let mut m = Self::zeros(base, n, n);
        for i in 0..n {
            m.entries[i * n + i] = 1;
        }
        m
    }

    #[inline]
    pub fn base(&self) -> PrimeBase {
        self.base
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.entries[r * self.n_cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.entries[r * self.n_cols + c] = v % self.base.get();
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[u32] {
        &self.entries[r * self.n_cols..(r + 1) * self.n_cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> {
        (0..self.n_rows).map(move |r| self.row(r))
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn transpose(&self) -> FieldMatrix {
        let mut t = FieldMatrix::zeros(self.base, self.n_cols, self.n_rows);
        for r in 0..self.n_rows {
            for c in 0..self.n_cols {
                t.entries[c * self.n_rows + r] = self.get(r, c);
            }
        }
        t
    }

    /// `M v` over `F_b`.
    pub fn mat_vec_mul(&self, v: &[u32]) -> Result<Vec<u32>> {
        if v.len() != self.n_cols {
            return Err(Error::DimensionMismatch {
                expected: self.n_cols,
                found: v.len(),
            });
        }
        let mut out = vec![0u32; self.n_rows];
        self.mat_vec_into(v, &mut out);
        Ok(out)
    }

    /// Unchecked product into a caller-provided buffer (hot loops).
    pub(crate) fn mat_vec_into(&self, v: &[u32], out: &mut [u32]) {
        let p = self.base.get() as u64;
        for (r, o) in out.iter_mut().enumerate() {
            let row = self.row(r);
            let mut acc: u64 = 0;
            for (&a, &x) in row.iter().zip(v) {
                acc += a as u64 * x as u64;
                // keep the accumulator far from overflow for large bases
                if acc >= 1 << 62 {
                    acc %= p;
                }
            }
            *o = (acc % p) as u32;
        }
    }

    /// Reduced row echelon form, returning the pivot column of each nonzero row.
    ///
    /// Columns are scanned left to right; the pivot of a column is the first
    /// remaining row (smallest index) with a nonzero entry.
    pub fn rref(&self) -> (FieldMatrix, Vec<usize>) {
        let mut m = self.clone();
        let b = self.base;
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.n_cols {
            if row == m.n_rows {
                break;
            }
            let Some(p) = (row..m.n_rows).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            if p != row {
                for c in 0..m.n_cols {
                    m.entries.swap(p * m.n_cols + c, row * m.n_cols + c);
                }
            }
            let inv = b.inv(m.get(row, col));
            for c in 0..m.n_cols {
                let v = b.mul(m.get(row, c), inv);
                m.entries[row * m.n_cols + c] = v;
            }
            for r in 0..m.n_rows {
                if r == row {
                    continue;
                }
                let f = m.get(r, col);
                if f == 0 {
                    continue;
                }
                for c in 0..m.n_cols {
                    let v = b.sub(m.get(r, c), b.mul(f, m.get(row, c)));
                    m.entries[r * m.n_cols + c] = v;
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel `{v : M v = 0}`; one vector per free column,
    /// in increasing free-column order.
    pub fn kernel_basis(&self) -> Vec<Vec<u32>> {
        let (r, pivots) = self.rref();
        let b = self.base;
        let mut is_pivot = vec![false; self.n_cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::with_capacity(self.n_cols - pivots.len());
        for free in (0..self.n_cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0u32; self.n_cols];
            v[free] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = b.neg(r.get(i, free));
            }
            basis.push(v);
        }
        basis
    }
}

#[derive(Serialize, Deserialize)]
struct FieldMatrixJson {
    b: u64,
    rows: usize,
    cols: usize,
    entries: Vec<Vec<u32>>,
}

impl Serialize for FieldMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FieldMatrixJson {
            b: self.base.get() as u64,
            rows: self.n_rows,
            cols: self.n_cols,
            entries: self.rows().map(|r| r.to_vec()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FieldMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = FieldMatrixJson::deserialize(d)?;
        let base = PrimeBase::new(j.b).map_err(D::Error::custom)?;
        if j.entries.len() != j.rows {
            return Err(D::Error::custom(format!(
                "expected {} rows, found {}",
                j.rows,
                j.entries.len()
            )));
        }
        let mut flat = Vec::with_capacity(j.rows * j.cols);
        for r in &j.entries {
            if r.len() != j.cols {
                return Err(D::Error::custom(format!(
                    "expected {} columns, found {}",
                    j.cols,
                    r.len()
                )));
            }
            flat.extend_from_slice(r);
        }
        FieldMatrix::new(base, j.rows, j.cols, flat).map_err(D::Error::custom)
    }
}

/// Incrementally maintained echelon basis; answers "is this row independent
/// of the rows inserted so far?".
#[derive(Clone, Debug)]
pub(crate) struct EchelonBasis {
    base: PrimeBase,
    // (pivot column, normalized row with 1 at the pivot)
    rows: Vec<(usize, Vec<u32>)>,
}

impl EchelonBasis {
    pub(crate) fn new(base: PrimeBase) -> Self {
        EchelonBasis {
            base,
            rows: Vec::new(),
        }
    }

    /// Inserts `v`; returns false (and leaves the basis unchanged) when `v` is in
    /// the span of the current rows.
    pub(crate) fn insert(&mut self, v: &[u32]) -> bool {
        let b = self.base;
        let mut w = v.to_vec();
        for (pc, row) in &self.rows {
            let f = w[*pc];
            if f != 0 {
                for (x, &r) in w.iter_mut().zip(row) {
                    *x = b.sub(*x, b.mul(f, r));
                }
            }
        }
        match w.iter().position(|&x| x != 0) {
            None => false,
            Some(pc) => {
                let inv = b.inv(w[pc]);
                for x in w.iter_mut() {
                    *x = b.mul(*x, inv);
                }
                self.rows.push((pc, w));
                true
            }
        }
    }
}

/// True iff the given vectors are linearly independent over `F_b`.
/// The empty family is independent.
pub fn rows_independent<R: AsRef<[u32]>>(rows: &[R], base: PrimeBase) -> bool {
    let Some(first) = rows.first() else {
        return true;
    };
    let len = first.as_ref().len();
    if rows.len() > len {
        return false;
    }
    let mut basis = EchelonBasis::new(base);
    rows.iter().all(|r| {
        let r = r.as_ref();
        debug_assert_eq!(r.len(), len, "rows must share one length");
        basis.insert(r)
    })
}
