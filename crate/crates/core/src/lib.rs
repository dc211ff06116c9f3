//! Combinatorial metrics on `F_q^n` induced by coverings of `[n]`.
//!
//! A covering `F` of `{1, ..., n}` assigns every vector the minimum number of
//! basic sets needed to cover its support. This crate computes those weights
//! exactly and builds the surrounding machinery on top of them:
//!
//! * [`gf`]: prime-field arithmetic and exact linear algebra;
//! * [`covering`]: normalization, components, equivalence classes, domination
//!   and cleared-out forms;
//! * [`metric`]: weights and distances by exact minimum set cover;
//! * [`code`]: canonical linear codes, duals and exhaustive subspace enumeration;
//! * [`enumerator`]: weight distributions and MacWilliams-identity verdicts;
//! * [`isometry`]: the linear isometry group, its permutation and block parts,
//!   decomposition and brute-force cross-checks;
//! * [`mep`]: local equivalences, extension search and the extension-property
//!   verdicts with explicit non-extendable witnesses.
//!
//! Indices are 0-based throughout the API. The JSON file formats in [`io`]
//! use 1-based indices for basic sets.

pub mod code;
pub mod covering;
pub mod enumerator;
pub mod error;
pub mod gf;
pub mod io;
pub mod isometry;
pub mod mep;
pub mod metric;

pub use code::LinearCode;
pub use covering::{ClassStructure, Component, Covering};
pub use enumerator::{IdentityVerdict, IdentityWitness, WeightDistribution};
pub use error::{Error, Result};
pub use gf::{Field, Matrix, Vector};
pub use io::{CodeFile, CoveringFile, MatrixFile};
pub use isometry::{AnyGroup, ExtensionSearch, FactoredGroup, Isometry, IsometryGroup, Permutation};
pub use mep::{LocalEquivalence, MepMode, MepReason, MepVerdict, MepWitness, WitnessKind};
pub use metric::{MetricSpace, WeightTable};

/// Enumeration caps shared by every exhaustive routine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of items any single enumeration may produce
    /// (vectors, codewords, subspaces, candidate matrices).
    pub max_enum: u128,
    /// Maximum order of an explicitly materialized group.
    pub max_group: usize,
    /// Largest `n` for which all `n!` permutations are scanned.
    pub max_perm_n: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_enum: 1 << 24,
            max_group: 1_000_000,
            max_perm_n: 8,
        }
    }
}

impl Limits {
    pub(crate) fn check_enum(&self, what: &'static str, needed: Option<u128>) -> Result<u128> {
        match needed {
            Some(n) if n <= self.max_enum => Ok(n),
            Some(n) => Err(Error::CapExceeded {
                what,
                needed: n,
                cap: self.max_enum,
            }),
            None => Err(Error::CapExceeded {
                what,
                needed: u128::MAX,
                cap: self.max_enum,
            }),
        }
    }
}

/// `base^exp` or `None` on overflow.
pub(crate) fn checked_pow(base: u128, exp: usize) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}
