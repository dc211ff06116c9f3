//! Serde shapes of the covering, code and matrix files.
//!
//! ```json
//! {"n": 4, "sets": [[1, 2], [2, 3], [3, 4]]}
//! {"q": 3, "n": 4, "generators": [[1, 0, 2, 0]]}
//! {"q": 2, "matrix": [[0, 1], [1, 0]]}
//! ```
//!
//! Basic sets are 1-based. Entries of generators and matrices may be any
//! integers and are reduced mod `q`.

use serde::{Deserialize, Serialize};

use crate::code::LinearCode;
use crate::covering::{mask_to_indices, Covering};
use crate::gf::{Field, Matrix, Vector};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoveringFile {
    pub n: usize,
    pub sets: Vec<Vec<usize>>,
    /// Redundant sets removed by normalization; ignored on input.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dropped: Vec<Vec<usize>>,
}

impl CoveringFile {
    /// Normalizes, recording the dropped sets.
    pub fn to_covering(&self) -> Result<Covering> {
        Covering::from_one_based(self.n, &self.sets)
    }

    pub fn from_covering(f: &Covering) -> Self {
        CoveringFile {
            n: f.n(),
            sets: f.to_one_based(),
            dropped: f
                .dropped()
                .iter()
                .map(|&m| mask_to_indices(m).into_iter().map(|i| i + 1).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeFile {
    pub q: u32,
    pub n: usize,
    pub generators: Vec<Vec<i64>>,
}

impl CodeFile {
    pub fn to_code(&self) -> Result<LinearCode> {
        let field = Field::new(self.q)?;
        let rows: Vec<Vector> = self
            .generators
            .iter()
            .map(|r| Vector::from_ints(field, r))
            .collect();
        LinearCode::from_generators(field, self.n, &rows)
    }

    pub fn from_code(c: &LinearCode) -> Self {
        CodeFile {
            q: c.field().q() as u32,
            n: c.n(),
            generators: c
                .basis()
                .iter()
                .map(|v| v.entries().iter().map(|&e| e as i64).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixFile {
    /// Overrides the field given on the command line when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<u32>,
    pub matrix: Vec<Vec<i64>>,
}

impl MatrixFile {
    pub fn to_matrix(&self, default_q: u32) -> Result<Matrix> {
        Matrix::from_int_rows(Field::new(self.q.unwrap_or(default_q))?, &self.matrix)
    }

    pub fn from_matrix(m: &Matrix) -> Self {
        MatrixFile {
            q: Some(m.field().q() as u32),
            matrix: (0..m.rows())
                .map(|r| m.row(r).iter().map(|&e| e as i64).collect())
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn covering_file_records_dropped_sets() {
        let file = CoveringFile {
            n: 3,
            sets: vec![vec![1, 2], vec![1], vec![2, 3]],
            dropped: vec![],
        };
        let f = file.to_covering().unwrap();
        let out = CoveringFile::from_covering(&f);
        assert_eq!(out.sets, vec![vec![1, 2], vec![2, 3]]);
        assert_eq!(out.dropped, vec![vec![1]]);
        assert_eq!(out.to_covering().unwrap(), f);
    }

    #[test]
    fn code_file_reduces_entries() {
        let file = CodeFile {
            q: 3,
            n: 3,
            generators: vec![vec![1, -1, 4], vec![2, 1, 2]],
        };
        let c = file.to_code().unwrap();
        assert_eq!(c.dim(), 1);
        assert_eq!(CodeFile::from_code(&c).generators, vec![vec![1, 2, 1]]);
    }

    #[test]
    fn matrix_file_field_override() {
        let file = MatrixFile {
            q: None,
            matrix: vec![vec![1, 2], vec![3, 4]],
        };
        assert_eq!(file.to_matrix(2).unwrap().field().q(), 2);
        let file = MatrixFile {
            q: Some(5),
            ..file
        };
        let m = file.to_matrix(2).unwrap();
        assert_eq!(MatrixFile::from_matrix(&m), file);
    }
}
