//! Linear codes in canonical form.
//!
//! A [`LinearCode`] is stored by the RREF of a generator matrix, so two codes
//! are equal exactly when their generators are identical.

use std::fmt;

use itertools::Itertools;

use crate::gf::{odometer_step, Field, Matrix, Vector};
use crate::{checked_pow, Error, Limits, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearCode {
    n: usize,
    generator: Matrix,
}

impl LinearCode {
    /// The span of `rows`, in canonical form.
    pub fn from_generators(field: Field, n: usize, rows: &[Vector]) -> Result<Self> {
        let m = Matrix::from_rows(field, n, rows)?;
        Ok(Self::from_matrix(&m))
    }

    /// The row space of `m`.
    pub fn from_matrix(m: &Matrix) -> Self {
        LinearCode {
            n: m.cols(),
            generator: m.rref().0,
        }
    }

    pub fn zero(field: Field, n: usize) -> Self {
        LinearCode {
            n,
            generator: Matrix::zeros(field, 0, n),
        }
    }

    pub fn full(field: Field, n: usize) -> Self {
        LinearCode {
            n,
            generator: Matrix::identity(field, n),
        }
    }

    #[inline]
    pub fn field(&self) -> Field {
        self.generator.field()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.generator.rows()
    }

    /// Canonical (RREF) generator matrix.
    pub fn generator(&self) -> &Matrix {
        &self.generator
    }

    pub fn basis(&self) -> Vec<Vector> {
        self.generator.row_vectors()
    }

    /// Number of codewords, `q^k`.
    pub fn size(&self) -> Option<u128> {
        checked_pow(self.field().order(), self.dim())
    }

    /// `sum coeffs[i] * basis[i]`.
    pub fn encode(&self, coeffs: &[u8]) -> Vector {
        assert_eq!(coeffs.len(), self.dim());
        let f = self.field();
        let mut out = vec![0u8; self.n];
        for (r, &c) in coeffs.iter().enumerate() {
            if c != 0 {
                for (o, &g) in out.iter_mut().zip(self.generator.row(r)) {
                    *o = f.add(*o, f.mul(c, g));
                }
            }
        }
        Vector::new(f, out).expect("reduced entries")
    }

    pub fn contains(&self, v: &Vector) -> bool {
        if v.len() != self.n || v.field() != self.field() {
            return false;
        }
        let pivots = self.pivots();
        let mut rest = v.clone();
        for (r, &p) in pivots.iter().enumerate() {
            let c = rest.get(p);
            if c != 0 {
                rest = rest.add_scaled(self.field().neg(c), &self.generator.row_vector(r));
            }
        }
        rest.is_zero()
    }

    /// Pivot columns of the canonical generator.
    pub fn pivots(&self) -> Vec<usize> {
        (0..self.dim())
            .map(|r| {
                self.generator
                    .row(r)
                    .iter()
                    .position(|&e| e != 0)
                    .expect("RREF rows are nonzero")
            })
            .collect()
    }

    /// All `q^k` codewords, coefficient vectors in lexicographic order.
    pub fn codewords(&self, limits: &Limits) -> Result<Codewords<'_>> {
        limits.check_enum("codeword enumeration", self.size())?;
        Ok(Codewords {
            code: self,
            coeffs: Some(vec![0; self.dim()]),
        })
    }

    /// `{u : u . c = 0 for all c in C}`.
    pub fn dual(&self) -> LinearCode {
        LinearCode {
            n: self.n,
            generator: self.generator.nullspace(),
        }
    }
}

impl fmt::Debug for LinearCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "span{}", self.generator)
    }
}

impl fmt::Display for LinearCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "span{{")?;
        for (i, row) in self.basis().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{row}")?;
        }
        write!(f, "}}")
    }
}

pub struct Codewords<'a> {
    code: &'a LinearCode,
    coeffs: Option<Vec<u8>>,
}

impl Iterator for Codewords<'_> {
    type Item = Vector;

    fn next(&mut self) -> Option<Vector> {
        let coeffs = self.coeffs.as_mut()?;
        let word = self.code.encode(coeffs);
        if !odometer_step(coeffs, self.code.field().q() as u8) {
            self.coeffs = None;
        }
        Some(word)
    }
}

/// Number of subspaces of `F_q^n` of dimension at most `max_dim`, counted
/// over RREF pivot profiles.
pub fn subspace_count(field: Field, n: usize, max_dim: usize) -> Option<u128> {
    let q = field.order();
    let mut total: u128 = 0;
    for k in 0..=max_dim.min(n) {
        for pivots in (0..n).combinations(k) {
            total = total.checked_add(checked_pow(q, free_cells(n, &pivots))?)?;
        }
    }
    Some(total)
}

/// Every subspace of `F_q^n` of dimension at most `max_dim`, exactly once,
/// ordered by dimension, then pivot profile, then free entries.
pub fn all_subspaces(
    field: Field,
    n: usize,
    max_dim: usize,
    limits: &Limits,
) -> Result<impl Iterator<Item = LinearCode>> {
    limits.check_enum("subspace enumeration", subspace_count(field, n, max_dim))?;
    Ok((0..=max_dim.min(n)).flat_map(move |k| {
        (0..n)
            .combinations(k)
            .flat_map(move |pivots| ProfileCodes::new(field, n, pivots))
    }))
}

/// Subspaces of a fixed dimension only.
pub fn subspaces_of_dim(
    field: Field,
    n: usize,
    k: usize,
    limits: &Limits,
) -> Result<impl Iterator<Item = LinearCode>> {
    Ok(all_subspaces(field, n, k, limits)?.filter(move |c| c.dim() == k))
}

fn free_cells(n: usize, pivots: &[usize]) -> usize {
    pivots
        .iter()
        .map(|&p| (p + 1..n).filter(|c| !pivots.contains(c)).count())
        .sum()
}

/// Codes with one RREF pivot profile: the pivot columns are fixed and every
/// non-pivot cell right of a row's pivot is free.
struct ProfileCodes {
    field: Field,
    n: usize,
    pivots: Vec<usize>,
    cells: Vec<(usize, usize)>,
    values: Option<Vec<u8>>,
}

impl ProfileCodes {
    fn new(field: Field, n: usize, pivots: Vec<usize>) -> Self {
        let cells = pivots
            .iter()
            .enumerate()
            .flat_map(|(r, &p)| {
                let pivots = &pivots;
                (p + 1..n)
                    .filter(move |c| !pivots.contains(c))
                    .map(move |c| (r, c))
            })
            .collect::<Vec<_>>();
        let values = Some(vec![0; cells.len()]);
        ProfileCodes {
            field,
            n,
            pivots,
            cells,
            values,
        }
    }
}

impl Iterator for ProfileCodes {
    type Item = LinearCode;

    fn next(&mut self) -> Option<LinearCode> {
        let values = self.values.as_mut()?;
        let mut m = Matrix::zeros(self.field, self.pivots.len(), self.n);
        for (r, &p) in self.pivots.iter().enumerate() {
            m.set(r, p, 1);
        }
        for (&(r, c), &v) in self.cells.iter().zip(values.iter()) {
            m.set(r, c, v);
        }
        if !odometer_step(values, self.field.q() as u8) {
            self.values = None;
        }
        debug_assert_eq!(m.rref().0, m);
        Some(LinearCode {
            n: self.n,
            generator: m,
        })
    }
}

/// Checks that two codes live in the same ambient space.
pub(crate) fn ensure_same_space(a: &LinearCode, b: &LinearCode) -> Result<()> {
    if a.field() != b.field() {
        return Err(Error::FieldMismatch {
            left: a.field().q(),
            right: b.field().q(),
        });
    }
    if a.n() != b.n() {
        return Err(Error::LengthMismatch {
            expected: a.n(),
            found: b.n(),
        });
    }
    Ok(())
}
