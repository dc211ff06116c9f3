//! `F`-weight enumerators and MacWilliams-identity verdicts.
//!
//! A metric admits a MacWilliams-type identity when equal weight enumerators
//! of two codes force equal enumerators of their duals. Structurally this
//! happens exactly for `k`-partitions; [`identity_verdict_structural`] returns
//! that verdict with an explicit, checked counterexample otherwise, and
//! [`identity_verdict_exhaustive`] decides the same question by scanning
//! every subspace.
//!
//! Distributions are padded to the global maximum weight of the ambient
//! space so distributions of different codes compare directly.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::code::{all_subspaces, LinearCode};
use crate::covering::Covering;
use crate::gf::{Field, Vector};
use crate::metric::WeightTable;
use crate::{Error, Limits, Result};

/// Coefficients `A_0, ..., A_D` of `W_C(x, y) = sum A_i x^(D-i) y^i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct WeightDistribution {
    coeffs: Vec<u64>,
}

impl WeightDistribution {
    pub fn from_coeffs(coeffs: Vec<u64>) -> Self {
        WeightDistribution { coeffs }
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// The homogenization degree `D`.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn total(&self) -> u64 {
        self.coeffs.iter().sum()
    }

    /// Human-readable polynomial in `x` and `y`.
    pub fn polynomial(&self) -> String {
        let d = self.degree();
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &a)| a != 0)
            .map(|(i, &a)| {
                let mut parts = Vec::new();
                if a != 1 || d == 0 {
                    parts.push(a.to_string());
                }
                for (var, e) in [("x", d - i), ("y", i)] {
                    match e {
                        0 => {}
                        1 => parts.push(var.to_string()),
                        _ => parts.push(format!("{var}^{e}")),
                    }
                }
                if parts.is_empty() {
                    "1".to_string()
                } else {
                    parts.join(" ")
                }
            })
            .collect();
        terms.join(" + ")
    }
}

impl fmt::Display for WeightDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coeffs)
    }
}

/// Weight histogram of `code`, padded to `table.max_weight()`.
pub fn distribution(
    table: &WeightTable,
    code: &LinearCode,
    limits: &Limits,
) -> Result<WeightDistribution> {
    let mut coeffs = vec![0u64; table.max_weight() + 1];
    for c in code.codewords(limits)? {
        coeffs[table.weight(&c)] += 1;
    }
    Ok(WeightDistribution { coeffs })
}

pub fn enumerate_weights(
    f: &Covering,
    code: &LinearCode,
    limits: &Limits,
) -> Result<WeightDistribution> {
    if code.n() != f.n() {
        return Err(Error::LengthMismatch {
            expected: f.n(),
            found: code.n(),
        });
    }
    let table = WeightTable::new(f, limits)?;
    distribution(&table, code, limits)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessSource {
    /// The one-dimensional pair built from two overlapping basic sets.
    Construction,
    /// Found by scanning subspaces.
    Search,
}

/// Two codes with equal weight distributions whose duals differ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityWitness {
    pub first: LinearCode,
    pub second: LinearCode,
    pub distribution: WeightDistribution,
    pub first_dual: WeightDistribution,
    pub second_dual: WeightDistribution,
    pub source: WitnessSource,
}

impl IdentityWitness {
    fn check(
        table: &WeightTable,
        first: LinearCode,
        second: LinearCode,
        source: WitnessSource,
        limits: &Limits,
    ) -> Result<Option<Self>> {
        let d1 = distribution(table, &first, limits)?;
        let d2 = distribution(table, &second, limits)?;
        if d1 != d2 {
            return Ok(None);
        }
        let first_dual = distribution(table, &first.dual(), limits)?;
        let second_dual = distribution(table, &second.dual(), limits)?;
        if first_dual == second_dual {
            return Ok(None);
        }
        Ok(Some(IdentityWitness {
            first,
            second,
            distribution: d1,
            first_dual,
            second_dual,
            source,
        }))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityVerdict {
    pub admits: bool,
    /// Partition size when the covering is a `k`-partition.
    pub k: Option<usize>,
    pub witness: Option<IdentityWitness>,
}

/// Two overlapping basic sets `a != b` with `i1` in both and `i0` only in `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Overlap {
    pub a: u64,
    pub b: u64,
    pub i0: usize,
    pub i1: usize,
}

/// The first overlapping pair of basic sets (in covering order), with the
/// least admissible indices.
pub fn find_overlap(f: &Covering) -> Option<Overlap> {
    let sets = f.sets();
    for (x, &a) in sets.iter().enumerate() {
        for (y, &b) in sets.iter().enumerate() {
            if x != y && a & b != 0 {
                let only_a = a & !b;
                // normalized coverings have no nested sets
                debug_assert!(only_a != 0);
                return Some(Overlap {
                    a,
                    b,
                    i0: only_a.trailing_zeros() as usize,
                    i1: (a & b).trailing_zeros() as usize,
                });
            }
        }
    }
    None
}

/// Builds a pair of codes refuting the MacWilliams-type identity.
///
/// With overlapping sets `A`, `B` the pair is `span{e_i0}` and
/// `span{e_i0 + e_i1}`. For partitions with unequal block sizes the pair is
/// found by an exhaustive subspace scan. The returned pair is always checked.
pub fn construct_counterexample(
    f: &Covering,
    field: Field,
    limits: &Limits,
) -> Result<IdentityWitness> {
    if let Some(k) = f.is_k_partition() {
        return Err(Error::IsKPartition { k });
    }
    let n = f.n();
    let table = WeightTable::new(f, limits)?;
    if let Some(ov) = find_overlap(f) {
        let e0 = Vector::unit(field, n, ov.i0);
        let e1 = Vector::unit(field, n, ov.i1);
        let first = LinearCode::from_generators(field, n, std::slice::from_ref(&e0))?;
        let second = LinearCode::from_generators(field, n, &[e0.add(&e1)])?;
        if let Some(w) =
            IdentityWitness::check(&table, first, second, WitnessSource::Construction, limits)?
        {
            return Ok(w);
        }
    }
    find_identity_violation(&table, field, n, n, limits)?.ok_or_else(|| {
        Error::NoWitness(format!(
            "no identity violation among subspaces of F_{}^{n}",
            field.q()
        ))
    })
}

pub fn identity_verdict_structural(
    f: &Covering,
    field: Field,
    limits: &Limits,
) -> Result<IdentityVerdict> {
    match f.is_k_partition() {
        Some(k) => Ok(IdentityVerdict {
            admits: true,
            k: Some(k),
            witness: None,
        }),
        None => Ok(IdentityVerdict {
            admits: false,
            k: None,
            witness: Some(construct_counterexample(f, field, limits)?),
        }),
    }
}

/// Groups all subspaces of dimension `<= max_dim` by distribution and
/// reports the first pair in a group whose dual distributions differ.
pub fn identity_verdict_exhaustive(
    f: &Covering,
    field: Field,
    max_dim: usize,
    limits: &Limits,
) -> Result<IdentityVerdict> {
    let table = WeightTable::new(f, limits)?;
    let witness = find_identity_violation(&table, field, f.n(), max_dim, limits)?;
    Ok(IdentityVerdict {
        admits: witness.is_none(),
        k: f.is_k_partition(),
        witness,
    })
}

fn find_identity_violation(
    table: &WeightTable,
    field: Field,
    n: usize,
    max_dim: usize,
    limits: &Limits,
) -> Result<Option<IdentityWitness>> {
    // distribution -> (first code seen, its dual distribution)
    let mut groups: HashMap<WeightDistribution, (LinearCode, WeightDistribution)> =
        HashMap::new();
    for code in all_subspaces(field, n, max_dim, limits)? {
        let dist = distribution(table, &code, limits)?;
        let dual = distribution(table, &code.dual(), limits)?;
        match groups.get(&dist) {
            Some((first, first_dual)) if *first_dual != dual => {
                return Ok(Some(IdentityWitness {
                    first: first.clone(),
                    second: code,
                    distribution: dist,
                    first_dual: first_dual.clone(),
                    second_dual: dual,
                    source: WitnessSource::Search,
                }));
            }
            Some(_) => {}
            None => {
                groups.insert(dist, (code, dual));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric;

    fn gf(q: u32) -> Field {
        Field::new(q).unwrap()
    }

    fn cov(n: usize, sets: &[&[usize]]) -> Covering {
        let sets: Vec<Vec<usize>> = sets.iter().map(|s| s.to_vec()).collect();
        Covering::from_one_based(n, &sets).unwrap()
    }

    fn span(q: u32, rows: &[&[i64]]) -> LinearCode {
        let n = rows[0].len();
        let rows: Vec<Vector> = rows.iter().map(|r| Vector::from_ints(gf(q), r)).collect();
        LinearCode::from_generators(gf(q), n, &rows).unwrap()
    }

    #[test]
    fn zero_code_distribution() {
        let f = Covering::burst(4, 2).unwrap();
        let d = enumerate_weights(&f, &LinearCode::zero(gf(2), 4), &Limits::default()).unwrap();
        assert_eq!(d.coeffs(), &[1, 0, 0]);
    }

    #[test]
    fn hamming_distribution() {
        let f = Covering::hamming(4).unwrap();
        let c = span(2, &[&[1, 1, 0, 0]]);
        let d = enumerate_weights(&f, &c, &Limits::default()).unwrap();
        assert_eq!(d.coeffs(), &[1, 0, 1, 0, 0]);
        assert_eq!(d.polynomial(), "x^4 + x^2 y^2");
    }

    #[test]
    fn single_unit_vector_under_burst() {
        let f = Covering::burst(4, 2).unwrap();
        let c = span(2, &[&[1, 0, 0, 0]]);
        let d = enumerate_weights(&f, &c, &Limits::default()).unwrap();
        assert_eq!(d.coeffs(), &[1, 1, 0]);
        assert_eq!(d.polynomial(), "x^2 + x y");
    }

    #[test]
    fn structural_verdicts() {
        let lim = Limits::default();
        let v = identity_verdict_structural(&Covering::hamming(3).unwrap(), gf(2), &lim).unwrap();
        assert_eq!((v.admits, v.k), (true, Some(1)));
        let v = identity_verdict_structural(&cov(4, &[&[1, 2], &[3, 4]]), gf(2), &lim).unwrap();
        assert_eq!((v.admits, v.k), (true, Some(2)));
        assert!(v.witness.is_none());

        let v = identity_verdict_structural(&Covering::burst(4, 2).unwrap(), gf(2), &lim).unwrap();
        assert!(!v.admits);
        let w = v.witness.unwrap();
        assert_eq!(w.source, WitnessSource::Construction);
        assert_eq!(w.first, span(2, &[&[1, 0, 0, 0]]));
        assert_eq!(w.second, span(2, &[&[1, 1, 0, 0]]));
    }

    #[test]
    fn counterexample_for_unequal_partition_is_searched() {
        let f = cov(3, &[&[1, 2], &[3]]);
        let w = construct_counterexample(&f, gf(2), &Limits::default()).unwrap();
        assert_eq!(w.source, WitnessSource::Search);
        let table = WeightTable::new(&f, &Limits::default()).unwrap();
        let lim = Limits::default();
        assert_eq!(distribution(&table, &w.first, &lim).unwrap(), w.distribution);
        assert_eq!(distribution(&table, &w.second, &lim).unwrap(), w.distribution);
        assert_ne!(w.first_dual, w.second_dual);
    }

    #[test]
    fn counterexample_refused_for_k_partition() {
        let f = Covering::hamming(2).unwrap();
        assert_eq!(
            construct_counterexample(&f, gf(2), &Limits::default()),
            Err(Error::IsKPartition { k: 1 })
        );
    }

    #[test]
    fn exhaustive_verdict_examples() {
        let lim = Limits::default();
        let v = identity_verdict_exhaustive(&cov(4, &[&[1, 2], &[3, 4]]), gf(2), 4, &lim).unwrap();
        assert!(v.admits);
        let v =
            identity_verdict_exhaustive(&Covering::burst(4, 2).unwrap(), gf(2), 4, &lim).unwrap();
        assert!(!v.admits);
        let v =
            identity_verdict_exhaustive(&Covering::hamming(2).unwrap(), gf(2), 2, &lim).unwrap();
        assert!(v.admits);
    }

    #[test]
    fn distributions_sum_to_code_size() {
        let lim = Limits::default();
        let f = cov(4, &[&[1, 2, 3], &[3, 4]]);
        let table = WeightTable::new(&f, &lim).unwrap();
        for c in all_subspaces(gf(3), 4, 4, &lim).unwrap() {
            let d = distribution(&table, &c, &lim).unwrap();
            assert_eq!(d.total() as u128, c.size().unwrap());
            assert_eq!(d.coeffs()[0], 1);
            assert_eq!(d.degree(), metric::max_weight(&f));
        }
    }

    /// The bijection `c -> c - c_i1 e_i0` from the first dual to the second,
    /// and its failure to preserve weight on the indicator of `B`.
    #[test]
    fn dual_transfer_map_breaks_weight() {
        let lim = Limits::default();
        for q in [2u32, 3] {
            for f in [Covering::burst(4, 2).unwrap(), cov(5, &[&[1, 2, 3], &[3, 4, 5]])] {
                let field = gf(q);
                let ov = find_overlap(&f).unwrap();
                let w = construct_counterexample(&f, field, &lim).unwrap();
                let (d1, d2) = (w.first.dual(), w.second.dual());
                let e0 = Vector::unit(field, f.n(), ov.i0);
                let transfer = |c: &Vector| c.add_scaled(field.neg(c.get(ov.i1)), &e0);
                let mut images = std::collections::HashSet::new();
                for c in d1.codewords(&lim).unwrap() {
                    let t = transfer(&c);
                    assert!(d2.contains(&t));
                    images.insert(t);
                }
                assert_eq!(images.len() as u128, d2.size().unwrap());
                let c = Vector::indicator(field, f.n(), ov.b);
                assert!(d1.contains(&c));
                assert_eq!(metric::weight(&f, &c), 1);
                assert!(metric::weight(&f, &transfer(&c)) > 1);
            }
        }
    }
}
