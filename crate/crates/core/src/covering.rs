//! Coverings of `[n]` and their derived combinatorial structure.
//!
//! Basic sets are stored as `u64` bit masks over 0-based coordinates, which
//! limits the ground set to `n <= 64`. Every [`Covering`] is normalized at
//! construction: duplicates collapse and redundant sets (proper subsets of
//! another basic set) are dropped, which does not change the induced metric.

use std::collections::HashMap;
use std::fmt;

use crate::gf::Vector;
use crate::{Error, Result};

/// A normalized covering of `[n]`.
///
/// Basic sets keep their input order. Equality compares the families as
/// sets, ignoring order and the record of dropped sets.
#[derive(Clone)]
pub struct Covering {
    n: usize,
    sets: Vec<u64>,
    dropped: Vec<u64>,
}

impl Covering {
    /// Normalizes a family of bit masks into a covering of `[n]`.
    pub fn from_masks(n: usize, raw: &[u64]) -> Result<Self> {
        if n == 0 || n > 64 {
            return Err(Error::GroundSetTooLarge(n));
        }
        let full = full_mask(n);
        for &s in raw {
            if s == 0 {
                return Err(Error::EmptySet);
            }
            if s & !full != 0 {
                return Err(Error::IndexOutOfRange {
                    index: 64 - s.leading_zeros() as usize,
                    n,
                });
            }
        }
        let union = raw.iter().fold(0, |u, &s| u | s);
        if union != full {
            return Err(Error::NotACovering {
                uncovered: mask_to_indices(full & !union)
                    .into_iter()
                    .map(|i| i + 1)
                    .collect(),
            });
        }
        let mut distinct: Vec<u64> = Vec::with_capacity(raw.len());
        for &s in raw {
            if !distinct.contains(&s) {
                distinct.push(s);
            }
        }
        let (sets, dropped): (Vec<u64>, Vec<u64>) = distinct
            .iter()
            .partition(|&&a| !distinct.iter().any(|&b| is_proper_subset(a, b)));
        Ok(Covering { n, sets, dropped })
    }

    /// Normalizes a family of 0-based index lists.
    pub fn new(n: usize, sets: &[Vec<usize>]) -> Result<Self> {
        let masks = sets
            .iter()
            .map(|s| indices_to_mask(n, s.iter().copied()))
            .collect::<Result<Vec<_>>>()?;
        Self::from_masks(n, &masks)
    }

    /// Normalizes a family of 1-based index lists, as used in covering files.
    pub fn from_one_based(n: usize, sets: &[Vec<usize>]) -> Result<Self> {
        let masks = sets
            .iter()
            .map(|s| {
                let zero_based = s
                    .iter()
                    .map(|&i| {
                        if i == 0 || i > n {
                            Err(Error::IndexOutOfRange { index: i, n })
                        } else {
                            Ok(i - 1)
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                indices_to_mask(n, zero_based)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_masks(n, &masks)
    }

    /// Singletons: the Hamming metric.
    pub fn hamming(n: usize) -> Result<Self> {
        let sets: Vec<u64> = (0..n.min(64)).map(|i| 1u64 << i).collect();
        Self::from_masks(n, &sets)
    }

    /// The single set `[n]`: the discrete 0/1 metric.
    pub fn trivial(n: usize) -> Result<Self> {
        if n == 0 || n > 64 {
            return Err(Error::GroundSetTooLarge(n));
        }
        Self::from_masks(n, &[full_mask(n)])
    }

    /// The `b`-burst covering `{[b], [b]+1, ..., [b]+(n-b)}` with `b < n`.
    pub fn burst(n: usize, b: usize) -> Result<Self> {
        if b == 0 || b >= n {
            return Err(Error::PreconditionFailed(format!(
                "burst length {b} must satisfy 0 < b < n = {n}"
            )));
        }
        let window = full_mask(b);
        let sets: Vec<u64> = (0..=n - b).map(|i| window << i).collect();
        Self::from_masks(n, &sets)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn sets(&self) -> &[u64] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Sets removed as redundant during normalization.
    pub fn dropped(&self) -> &[u64] {
        &self.dropped
    }

    #[inline]
    pub fn full_mask(&self) -> u64 {
        full_mask(self.n)
    }

    /// Basic sets as sorted 1-based index lists.
    pub fn to_one_based(&self) -> Vec<Vec<usize>> {
        self.sets
            .iter()
            .map(|&s| mask_to_indices(s).into_iter().map(|i| i + 1).collect())
            .collect()
    }

    /// Basic sets in a canonical order (by mask value).
    pub fn canonical_sets(&self) -> Vec<u64> {
        let mut s = self.sets.clone();
        s.sort_unstable();
        s
    }

    pub fn is_partition(&self) -> bool {
        let total: u32 = self.sets.iter().map(|s| s.count_ones()).sum();
        total as usize == self.n
    }

    /// `Some(k)` when every basic set has cardinality `k`.
    pub fn uniform_size(&self) -> Option<usize> {
        let k = self.sets[0].count_ones();
        self.sets
            .iter()
            .all(|s| s.count_ones() == k)
            .then_some(k as usize)
    }

    /// `Some(k)` when the covering partitions `[n]` into sets of size `k`.
    pub fn is_k_partition(&self) -> Option<usize> {
        if self.is_partition() {
            self.uniform_size()
        } else {
            None
        }
    }

    pub fn is_hamming(&self) -> bool {
        self.uniform_size() == Some(1)
    }

    /// Connected components of the intersection graph of basic sets, ordered
    /// by their first basic set.
    pub fn components(&self) -> Vec<Component> {
        let r = self.sets.len();
        let mut seen = vec![false; r];
        let mut out = Vec::new();
        for start in 0..r {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut members = vec![start];
            let mut frontier = vec![start];
            while let Some(a) = frontier.pop() {
                for b in 0..r {
                    if !seen[b] && self.sets[a] & self.sets[b] != 0 {
                        seen[b] = true;
                        members.push(b);
                        frontier.push(b);
                    }
                }
            }
            members.sort_unstable();
            let sets: Vec<u64> = members.iter().map(|&i| self.sets[i]).collect();
            let support = sets.iter().fold(0, |u, &s| u | s);
            out.push(Component {
                set_indices: members,
                sets,
                support,
            });
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// Classes of `~F`, incidence matrix and domination order.
    pub fn class_structure(&self) -> ClassStructure {
        ClassStructure::new(self)
    }

    /// Image of a set mask under a coordinate map `i -> phi[i]`.
    pub(crate) fn map_mask(mask: u64, phi: &[usize]) -> u64 {
        mask_to_indices(mask)
            .into_iter()
            .fold(0, |m, i| m | (1u64 << phi[i]))
    }

    pub(crate) fn contains_set(&self, mask: u64) -> bool {
        self.sets.contains(&mask)
    }
}

impl PartialEq for Covering {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.canonical_sets() == other.canonical_sets()
    }
}

impl Eq for Covering {}

impl fmt::Display for Covering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, s) in self.to_one_based().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{{")?;
            for (j, e) in s.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{e}")?;
            }
            write!(f, "}}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for Covering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Covering(n={}, {})", self.n, self)
    }
}

/// A maximal connected group of basic sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    /// Positions of the member sets in [`Covering::sets`].
    pub set_indices: Vec<usize>,
    pub sets: Vec<u64>,
    /// Union of the member sets.
    pub support: u64,
}

/// Equivalence classes of coordinates, their incidence with basic sets, and
/// the domination order between classes.
///
/// `i ~ j` iff `i` and `j` lie in exactly the same basic sets. Classes are
/// ordered by their least element. Class `a` dominates class `b` when every
/// basic set containing `b` also contains `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassStructure {
    n: usize,
    classes: Vec<u64>,
    class_of: Vec<usize>,
    incidence: Vec<Vec<bool>>,
    dominates: Vec<Vec<bool>>,
}

impl ClassStructure {
    fn new(f: &Covering) -> Self {
        let n = f.n;
        let mut by_signature: HashMap<Vec<bool>, usize> = HashMap::new();
        let mut classes: Vec<u64> = Vec::new();
        let mut incidence: Vec<Vec<bool>> = Vec::new();
        let mut class_of = vec![0; n];
        for (i, slot) in class_of.iter_mut().enumerate() {
            let signature: Vec<bool> = f.sets.iter().map(|s| (s >> i) & 1 == 1).collect();
            let idx = *by_signature.entry(signature.clone()).or_insert_with(|| {
                classes.push(0);
                incidence.push(signature);
                classes.len() - 1
            });
            classes[idx] |= 1 << i;
            *slot = idx;
        }
        let s = classes.len();
        let mut dominates = vec![vec![false; s]; s];
        for a in 0..s {
            for b in 0..s {
                // supp(row_b) subset of supp(row_a)
                dominates[a][b] = incidence[b]
                    .iter()
                    .zip(&incidence[a])
                    .all(|(&in_b, &in_a)| !in_b || in_a);
            }
        }
        for a in 0..s {
            for b in 0..s {
                assert!(
                    a == b || !(dominates[a][b] && dominates[b][a]),
                    "distinct classes with equal incidence rows"
                );
            }
        }
        ClassStructure {
            n,
            classes,
            class_of,
            incidence,
            dominates,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Class masks ordered by least element.
    pub fn classes(&self) -> &[u64] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    #[inline]
    pub fn class_of(&self, i: usize) -> usize {
        self.class_of[i]
    }

    /// `incidence()[i][j]` is true iff class `i` lies inside basic set `j`.
    pub fn incidence(&self) -> &[Vec<bool>] {
        &self.incidence
    }

    /// Whether class `a` dominates class `b` (reflexive).
    #[inline]
    pub fn dominates(&self, a: usize, b: usize) -> bool {
        self.dominates[a][b]
    }

    /// Strict domination pairs `(a, b)`: class `a` dominates class `b != a`.
    pub fn domination_pairs(&self) -> Vec<(usize, usize)> {
        let s = self.len();
        (0..s)
            .flat_map(|a| (0..s).map(move |b| (a, b)))
            .filter(|&(a, b)| a != b && self.dominates[a][b])
            .collect()
    }

    /// Union of the classes that dominate class `c` (including `c`).
    pub fn dominating_mask(&self, c: usize) -> u64 {
        (0..self.len())
            .filter(|&a| self.dominates[a][c])
            .fold(0, |m, a| m | self.classes[a])
    }

    /// Indices of the classes meeting `mask`; the unique minimum family of
    /// classes whose union contains it.
    pub fn classes_meeting(&self, mask: u64) -> Vec<usize> {
        (0..self.len())
            .filter(|&c| self.classes[c] & mask != 0)
            .collect()
    }

    /// Maximal elements of `family` under domination.
    pub fn heads(&self, family: &[usize]) -> Vec<usize> {
        family
            .iter()
            .copied()
            .filter(|&c| !family.iter().any(|&d| d != c && self.dominates[d][c]))
            .collect()
    }

    /// Minimum set header of a support: the part of `mask` lying in the head
    /// classes of its minimal class cover.
    pub fn msh(&self, mask: u64) -> u64 {
        let family = self.classes_meeting(mask);
        let heads = self.heads(&family);
        heads.iter().fold(0, |m, &c| m | (self.classes[c] & mask))
    }

    /// Keeps the coordinates of `x` in the MSH of its support, zeroing the rest.
    pub fn cleared_out(&self, x: &Vector) -> Vector {
        let keep = self.msh(x.support_mask());
        let mut out = x.clone();
        for i in 0..x.len() {
            if (keep >> i) & 1 == 0 {
                out.set(i, 0);
            }
        }
        out
    }
}

/// Every normalized covering of `[n]` (antichains of nonempty subsets whose
/// union is `[n]`), for `n <= 5`.
pub fn all_normalized_coverings(n: usize) -> Result<Vec<Covering>> {
    if n == 0 || n > 5 {
        return Err(Error::PreconditionFailed(format!(
            "exhaustive covering enumeration supports 1 <= n <= 5, got {n}"
        )));
    }
    let full = full_mask(n);
    let candidates: Vec<u64> = (1..=full).collect();
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    fn walk(
        idx: usize,
        candidates: &[u64],
        chosen: &mut Vec<u64>,
        full: u64,
        n: usize,
        out: &mut Vec<Covering>,
    ) {
        if idx == candidates.len() {
            if chosen.iter().fold(0, |u, &s| u | s) == full {
                out.push(Covering {
                    n,
                    sets: chosen.clone(),
                    dropped: Vec::new(),
                });
            }
            return;
        }
        let c = candidates[idx];
        if chosen.iter().all(|&s| s & c != s && s & c != c) {
            chosen.push(c);
            walk(idx + 1, candidates, chosen, full, n, out);
            chosen.pop();
        }
        walk(idx + 1, candidates, chosen, full, n, out);
    }
    walk(0, &candidates, &mut chosen, full, n, &mut out);
    Ok(out)
}

#[inline]
pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[inline]
fn is_proper_subset(a: u64, b: u64) -> bool {
    a != b && a & b == a
}

pub(crate) fn mask_to_indices(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| (mask >> i) & 1 == 1).collect()
}

fn indices_to_mask(n: usize, indices: impl IntoIterator<Item = usize>) -> Result<u64> {
    indices.into_iter().try_fold(0u64, |m, i| {
        if i >= n {
            Err(Error::IndexOutOfRange { index: i + 1, n })
        } else {
            Ok(m | (1 << i))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::Field;

    fn cov(n: usize, sets: &[&[usize]]) -> Covering {
        let sets: Vec<Vec<usize>> = sets.iter().map(|s| s.to_vec()).collect();
        Covering::from_one_based(n, &sets).unwrap()
    }

    fn one_based(mask: u64) -> Vec<usize> {
        mask_to_indices(mask).into_iter().map(|i| i + 1).collect()
    }

    #[test]
    fn normalize_drops_redundant_sets() {
        let f = cov(4, &[&[1, 2, 3], &[2, 3], &[4]]);
        assert_eq!(f.to_one_based(), vec![vec![1, 2, 3], vec![4]]);
        assert_eq!(f.dropped(), &[0b0110]);
    }

    #[test]
    fn normalize_keeps_disjoint_sets() {
        let f = cov(4, &[&[1, 2], &[3, 4]]);
        assert_eq!(f.to_one_based(), vec![vec![1, 2], vec![3, 4]]);
        assert!(f.dropped().is_empty());
    }

    #[test]
    fn full_set_absorbs_everything() {
        for b in [&[1][..], &[2, 3], &[1, 2, 4]] {
            let f = cov(4, &[&[1, 2, 3, 4], b]);
            assert_eq!(f, Covering::trivial(4).unwrap());
        }
    }

    #[test]
    fn normalize_collapses_duplicates_in_order() {
        let f = cov(3, &[&[3], &[1, 2], &[3], &[1, 2]]);
        assert_eq!(f.to_one_based(), vec![vec![3], vec![1, 2]]);
    }

    #[test]
    fn normalize_errors() {
        let r = Covering::from_one_based(4, &[vec![1, 2], vec![4]]);
        assert_eq!(r, Err(Error::NotACovering { uncovered: vec![3] }));
        let r = Covering::from_one_based(2, &[vec![1, 2], vec![]]);
        assert_eq!(r, Err(Error::EmptySet));
        let r = Covering::from_one_based(2, &[vec![1, 3]]);
        assert_eq!(r, Err(Error::IndexOutOfRange { index: 3, n: 2 }));
        let r = Covering::from_one_based(2, &[vec![0, 1]]);
        assert_eq!(r, Err(Error::IndexOutOfRange { index: 0, n: 2 }));
        assert_eq!(Covering::trivial(65), Err(Error::GroundSetTooLarge(65)));
    }

    #[test]
    fn k_partition_detection() {
        assert_eq!(cov(4, &[&[1, 2], &[3, 4]]).is_k_partition(), Some(2));
        assert_eq!(Covering::hamming(3).unwrap().is_k_partition(), Some(1));
        assert_eq!(cov(4, &[&[1, 2], &[2, 3], &[3, 4]]).is_k_partition(), None);
        assert_eq!(cov(3, &[&[1, 2], &[3]]).is_k_partition(), None);
    }

    #[test]
    fn burst_constructor() {
        assert_eq!(
            Covering::burst(4, 2).unwrap(),
            cov(4, &[&[1, 2], &[2, 3], &[3, 4]])
        );
        assert!(Covering::burst(4, 4).is_err());
    }

    #[test]
    fn components_examples() {
        let f = cov(5, &[&[1, 2], &[2, 3], &[4, 5]]);
        let comps = f.components();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0].sets, vec![0b00011, 0b00110]);
        assert_eq!(comps[1].sets, vec![0b11000]);
        assert_eq!(Covering::hamming(3).unwrap().components().len(), 3);
        assert_eq!(Covering::burst(4, 2).unwrap().components().len(), 1);
    }

    #[test]
    fn class_structure_of_two_overlapping_triples() {
        let f = cov(5, &[&[1, 2, 3], &[3, 4, 5]]);
        let cs = f.class_structure();
        let classes: Vec<Vec<usize>> = cs.classes().iter().map(|&c| one_based(c)).collect();
        assert_eq!(classes, vec![vec![1, 2], vec![3], vec![4, 5]]);
        assert_eq!(
            cs.incidence(),
            &[vec![true, false], vec![true, true], vec![false, true]]
        );
        assert_eq!(cs.domination_pairs(), vec![(1, 0), (1, 2)]);
        assert_eq!(cs.heads(&[0, 1, 2]), vec![1]);
    }

    #[test]
    fn class_structure_hamming_and_single_set() {
        let cs = Covering::hamming(3).unwrap().class_structure();
        assert_eq!(cs.classes(), &[1, 2, 4]);
        assert!(cs.domination_pairs().is_empty());
        for (i, row) in cs.incidence().iter().enumerate() {
            for (j, &b) in row.iter().enumerate() {
                assert_eq!(b, i == j);
            }
        }
        let cs = Covering::trivial(2).unwrap().class_structure();
        assert_eq!(cs.classes(), &[0b11]);
        assert_eq!(cs.incidence(), &[vec![true]]);
    }

    #[test]
    fn msh_examples() {
        let cs = cov(5, &[&[1, 2, 3], &[3, 4, 5]]).class_structure();
        assert_eq!(cs.msh(0b00101), 0b00100);
        let cs = Covering::hamming(5).unwrap().class_structure();
        assert_eq!(cs.msh(0b10010), 0b10010);
        assert_eq!(cs.msh(0), 0);
    }

    #[test]
    fn cleared_out_examples() {
        let f2 = Field::new(2).unwrap();
        let cs = cov(5, &[&[1, 2, 3], &[3, 4, 5]]).class_structure();
        let x = Vector::from_ints(f2, &[1, 0, 1, 0, 0]);
        assert_eq!(cs.cleared_out(&x), Vector::from_ints(f2, &[0, 0, 1, 0, 0]));
        let z = Vector::zeros(f2, 5);
        assert_eq!(cs.cleared_out(&z), z);
        let f3 = Field::new(3).unwrap();
        let cs = Covering::hamming(4).unwrap().class_structure();
        let x = Vector::from_ints(f3, &[2, 0, 1, 1]);
        assert_eq!(cs.cleared_out(&x), x);
    }

    #[test]
    fn classes_are_inside_or_outside_each_basic_set() {
        for n in 1..=4 {
            for f in all_normalized_coverings(n).unwrap() {
                let cs = f.class_structure();
                for &h in cs.classes() {
                    for &a in f.sets() {
                        assert!(h & a == h || h & a == 0, "{f:?}");
                    }
                }
            }
        }
    }

    /// Brute force over all families of nonempty subsets.
    fn antichain_covers_brute(n: usize) -> usize {
        let full = full_mask(n);
        let subsets: Vec<u64> = (1..=full).collect();
        (0u64..(1 << subsets.len()))
            .filter(|&fam| {
                let chosen: Vec<u64> = (0..subsets.len())
                    .filter(|i| (fam >> i) & 1 == 1)
                    .map(|i| subsets[i])
                    .collect();
                chosen.iter().fold(0, |u, &s| u | s) == full
                    && chosen
                        .iter()
                        .all(|&a| chosen.iter().all(|&b| a == b || !is_proper_subset(a, b)))
            })
            .count()
    }

    #[test]
    fn covering_enumeration_matches_brute_force() {
        for n in 1..=4 {
            let fast = all_normalized_coverings(n).unwrap();
            assert_eq!(fast.len(), antichain_covers_brute(n), "n={n}");
            for f in &fast {
                assert_eq!(Covering::from_masks(n, f.sets()).unwrap(), *f);
            }
        }
        assert_eq!(all_normalized_coverings(4).unwrap().len(), 114);
    }
}
