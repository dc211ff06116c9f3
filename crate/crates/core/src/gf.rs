//! Prime-field arithmetic and dense linear algebra over `F_q`.
//!
//! Residues are stored as canonical representatives `0..q` in a `u8`, so
//! vectors and matrices compare and hash bit-exactly.

use std::fmt;

use crate::{checked_pow, Error, Limits, Result};

/// The prime field `F_q`, `2 <= q <= 251`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Field {
    q: u16,
}

impl Field {
    pub fn new(q: u32) -> Result<Self> {
        if !(2..=251).contains(&q) || !is_prime(q) {
            return Err(Error::InvalidModulus(q));
        }
        Ok(Field { q: q as u16 })
    }

    #[inline]
    pub fn q(self) -> u16 {
        self.q
    }

    #[inline]
    pub fn order(self) -> u128 {
        self.q as u128
    }

    /// Reduces an arbitrary integer to its canonical residue.
    #[inline]
    pub fn reduce(self, v: i64) -> u8 {
        v.rem_euclid(self.q as i64) as u8
    }

    #[inline]
    pub fn add(self, a: u8, b: u8) -> u8 {
        ((a as u16 + b as u16) % self.q) as u8
    }

    #[inline]
    pub fn sub(self, a: u8, b: u8) -> u8 {
        ((a as u16 + self.q - b as u16) % self.q) as u8
    }

    #[inline]
    pub fn neg(self, a: u8) -> u8 {
        if a == 0 {
            0
        } else {
            (self.q - a as u16) as u8
        }
    }

    #[inline]
    pub fn mul(self, a: u8, b: u8) -> u8 {
        ((a as u32 * b as u32) % self.q as u32) as u8
    }

    /// Multiplicative inverse; `a` must be nonzero.
    pub fn inv(self, a: u8) -> u8 {
        assert!(a != 0, "inverse of zero");
        // a^(q-2) by square-and-multiply
        let mut base = a;
        let mut exp = self.q - 2;
        let mut acc = 1u8;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Nonzero residues `1..q`.
    pub fn units(self) -> impl Iterator<Item = u8> {
        1..self.q as u8
    }

    pub fn elements(self) -> impl Iterator<Item = u8> {
        0..self.q as u8
    }
}

fn is_prime(q: u32) -> bool {
    q >= 2 && (2..).take_while(|d| d * d <= q).all(|d| !q.is_multiple_of(d))
}

/// An element of `F_q^n`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vector {
    field: Field,
    entries: Vec<u8>,
}

impl Vector {
    /// Builds a vector, rejecting residues outside `0..q`.
    pub fn new(field: Field, entries: Vec<u8>) -> Result<Self> {
        if let Some(&bad) = entries.iter().find(|&&e| e as u16 >= field.q) {
            return Err(Error::ResidueOutOfRange {
                value: bad as u32,
                q: field.q,
            });
        }
        Ok(Vector { field, entries })
    }

    /// Builds a vector from arbitrary integers, reducing each mod `q`.
    pub fn from_ints(field: Field, entries: &[i64]) -> Self {
        Vector {
            field,
            entries: entries.iter().map(|&e| field.reduce(e)).collect(),
        }
    }

    pub fn zeros(field: Field, n: usize) -> Self {
        Vector {
            field,
            entries: vec![0; n],
        }
    }

    /// The standard basis vector `e_i` (0-based).
    pub fn unit(field: Field, n: usize, i: usize) -> Self {
        let mut v = Self::zeros(field, n);
        v.entries[i] = 1;
        v
    }

    /// The 0/1 indicator vector of a support mask.
    pub fn indicator(field: Field, n: usize, mask: u64) -> Self {
        let entries = (0..n).map(|i| ((mask >> i) & 1) as u8).collect();
        Vector { field, entries }
    }

    #[inline]
    pub fn field(&self) -> Field {
        self.field
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    #[inline]
    pub fn entries(&self) -> &[u8] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize) -> u8 {
        self.entries[i]
    }

    pub fn set(&mut self, i: usize, value: u8) {
        self.entries[i] = self.field.reduce(value as i64);
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    /// 0-based indices of the nonzero coordinates.
    pub fn support(&self) -> Vec<usize> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, &e)| e != 0)
            .map(|(i, _)| i)
            .collect()
    }

    /// The support as a bit mask (`n <= 64`).
    #[inline]
    pub fn support_mask(&self) -> u64 {
        support_mask(&self.entries)
    }

    pub fn add(&self, other: &Vector) -> Vector {
        self.zip_with(other, |f, a, b| f.add(a, b))
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        self.zip_with(other, |f, a, b| f.sub(a, b))
    }

    pub fn scale(&self, c: u8) -> Vector {
        let f = self.field;
        Vector {
            field: f,
            entries: self.entries.iter().map(|&a| f.mul(a, c)).collect(),
        }
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: u8, other: &Vector) -> Vector {
        self.zip_with(other, |f, a, b| f.add(a, f.mul(c, b)))
    }

    /// The standard bilinear form `sum u_i v_i`.
    pub fn dot(&self, other: &Vector) -> u8 {
        assert_eq!(self.len(), other.len(), "dot product of unequal lengths");
        let f = self.field;
        let s: u64 = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| a as u64 * b as u64)
            .sum();
        (s % f.q as u64) as u8
    }

    fn zip_with(&self, other: &Vector, op: impl Fn(Field, u8, u8) -> u8) -> Vector {
        assert_eq!(self.len(), other.len(), "vector length mismatch");
        let f = self.field;
        Vector {
            field: f,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| op(f, a, b))
                .collect(),
        }
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

#[inline]
pub(crate) fn support_mask(entries: &[u8]) -> u64 {
    entries
        .iter()
        .enumerate()
        .fold(0u64, |m, (i, &e)| if e != 0 { m | (1 << i) } else { m })
}

/// A dense `rows x cols` matrix over `F_q`, row-major.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl Matrix {
    pub fn new(field: Field, rows: usize, cols: usize, data: Vec<u8>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if let Some(&bad) = data.iter().find(|&&e| e as u16 >= field.q) {
            return Err(Error::ResidueOutOfRange {
                value: bad as u32,
                q: field.q,
            });
        }
        Ok(Matrix {
            field,
            rows,
            cols,
            data,
        })
    }

    /// Builds a matrix from integer rows, reducing mod `q`.
    pub fn from_int_rows(field: Field, rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::LengthMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend(r.iter().map(|&e| field.reduce(e)));
        }
        Ok(Matrix {
            field,
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Stacks vectors as rows. `cols` is needed when `rows` is empty.
    pub fn from_rows(field: Field, cols: usize, rows: &[Vector]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::LengthMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            if r.field != field {
                return Err(Error::FieldMismatch {
                    left: field.q,
                    right: r.field.q,
                });
            }
            data.extend_from_slice(&r.entries);
        }
        Ok(Matrix {
            field,
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    #[inline]
    pub fn field(&self) -> Field {
        self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: u8) {
        debug_assert!((value as u16) < self.field.q);
        self.data[r * self.cols + c] = value;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[u8] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vector(&self, r: usize) -> Vector {
        Vector {
            field: self.field,
            entries: self.row(r).to_vec(),
        }
    }

    pub fn row_vectors(&self) -> Vec<Vector> {
        (0..self.rows).map(|r| self.row_vector(r)).collect()
    }

    pub fn column_vector(&self, c: usize) -> Vector {
        Vector {
            field: self.field,
            entries: (0..self.rows).map(|r| self.get(r, c)).collect(),
        }
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let q = self.field.q as u32;
        let mut out = Matrix::zeros(self.field, self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut s = 0u32;
                for k in 0..self.cols {
                    s += self.get(r, k) as u32 * other.get(k, c) as u32;
                }
                out.data[r * other.cols + c] = (s % q) as u8;
            }
        }
        Ok(out)
    }

    /// `M x` with `x` as a column vector.
    pub fn mul_vec(&self, x: &Vector) -> Vector {
        assert_eq!(self.cols, x.len(), "matrix-vector length mismatch");
        let mut out = vec![0u8; self.rows];
        self.mul_slice_into(&x.entries, &mut out);
        Vector {
            field: self.field,
            entries: out,
        }
    }

    #[inline]
    pub(crate) fn mul_slice_into(&self, x: &[u8], out: &mut [u8]) {
        let q = self.field.q as u32;
        for (r, o) in out.iter_mut().enumerate() {
            let row = self.row(r);
            let s: u32 = row.iter().zip(x).map(|(&a, &b)| a as u32 * b as u32).sum();
            *o = (s % q) as u8;
        }
    }

    /// `x M` with `x` as a row vector.
    pub fn vec_mul(&self, x: &Vector) -> Vector {
        assert_eq!(self.rows, x.len(), "vector-matrix length mismatch");
        let mut out = vec![0u8; self.cols];
        self.vec_mul_into(&x.entries, &mut out);
        Vector {
            field: self.field,
            entries: out,
        }
    }

    #[inline]
    pub fn vec_mul_into(&self, x: &[u8], out: &mut [u8]) {
        let q = self.field.q as u32;
        let mut stack = [0u32; 64];
        let mut heap = Vec::new();
        let acc: &mut [u32] = if self.cols <= 64 {
            &mut stack[..self.cols]
        } else {
            heap.resize(self.cols, 0);
            &mut heap
        };
        for (r, &xr) in x.iter().enumerate() {
            if xr != 0 {
                for (a, &m) in acc.iter_mut().zip(self.row(r)) {
                    *a += xr as u32 * m as u32;
                }
            }
        }
        for (o, &a) in out.iter_mut().zip(acc.iter()) {
            *o = (a % q) as u8;
        }
    }

    /// Reduced row echelon form with zero rows removed, plus the pivot
    /// columns in increasing order. The row space is unchanged.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut lead = 0;
        for c in 0..m.cols {
            if lead == m.rows {
                break;
            }
            let Some(p) = (lead..m.rows).find(|&r| m.get(r, c) != 0) else {
                continue;
            };
            m.swap_rows(lead, p);
            let inv = f.inv(m.get(lead, c));
            m.scale_row(lead, inv);
            for r in 0..m.rows {
                if r != lead {
                    let factor = m.get(r, c);
                    if factor != 0 {
                        m.add_row_multiple(r, lead, f.neg(factor));
                    }
                }
            }
            pivots.push(c);
            lead += 1;
        }
        m.data.truncate(lead * m.cols);
        m.rows = lead;
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Generator matrix (in RREF) of `{u : M u^T = 0}`.
    pub fn nullspace(&self) -> Matrix {
        let (r, pivots) = self.rref();
        let n = self.cols;
        let f = self.field;
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let basis: Vec<Vector> = free
            .iter()
            .map(|&fc| {
                let mut v = Vector::zeros(f, n);
                v.entries[fc] = 1;
                for (row, &pc) in pivots.iter().enumerate() {
                    v.entries[pc] = f.neg(r.get(row, fc));
                }
                v
            })
            .collect();
        Matrix::from_rows(f, n, &basis)
            .expect("nullspace rows have matching length")
            .rref()
            .0
    }

    pub fn invert(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let f = self.field;
        if n == 0 {
            return Ok(self.clone());
        }
        let mut aug = Matrix::zeros(f, n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, n + r, 1);
        }
        let (red, pivots) = aug.rref();
        if pivots[n - 1] != n - 1 {
            return Err(Error::Singular);
        }
        let mut inv = Matrix::zeros(f, n, n);
        for r in 0..n {
            for c in 0..n {
                inv.set(r, c, red.get(r, n + c));
            }
        }
        Ok(inv)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    fn scale_row(&mut self, r: usize, k: u8) {
        let f = self.field;
        for c in 0..self.cols {
            let i = r * self.cols + c;
            self.data[i] = f.mul(self.data[i], k);
        }
    }

    /// row[target] += k * row[source]
    fn add_row_multiple(&mut self, target: usize, source: usize, k: u8) {
        let f = self.field;
        for c in 0..self.cols {
            let s = self.data[source * self.cols + c];
            let t = &mut self.data[target * self.cols + c];
            *t = f.add(*t, f.mul(k, s));
        }
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, ";")?;
            }
            for (c, e) in self.row(r).iter().enumerate() {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{e}")?;
            }
        }
        write!(f, "]")
    }
}

/// All `q^n` vectors of `F_q^n` in lexicographic order (last coordinate
/// varies fastest).
pub fn enumerate_vectors(field: Field, n: usize, limits: &Limits) -> Result<VectorIter> {
    limits.check_enum("vector enumeration", checked_pow(field.order(), n))?;
    Ok(VectorIter::new(field, n))
}

/// Odometer over `F_q^n`.
#[derive(Debug, Clone)]
pub struct VectorIter {
    field: Field,
    next: Option<Vec<u8>>,
}

impl VectorIter {
    pub(crate) fn new(field: Field, n: usize) -> Self {
        VectorIter {
            field,
            next: Some(vec![0; n]),
        }
    }
}

impl Iterator for VectorIter {
    type Item = Vector;

    fn next(&mut self) -> Option<Vector> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        let q = self.field.q as u8;
        let mut advanced = false;
        for e in succ.iter_mut().rev() {
            if *e + 1 < q {
                *e += 1;
                advanced = true;
                break;
            }
            *e = 0;
        }
        if advanced {
            self.next = Some(succ);
        }
        Some(Vector {
            field: self.field,
            entries: cur,
        })
    }
}

/// Advances a mixed-radix odometer of base `q`; returns false after wrapping.
#[inline]
pub(crate) fn odometer_step(digits: &mut [u8], q: u8) -> bool {
    for d in digits.iter_mut().rev() {
        if *d + 1 < q {
            *d += 1;
            return true;
        }
        *d = 0;
    }
    false
}
