//! Local equivalences and the MacWilliams extension property.
//!
//! A local equivalence is a weight-preserving linear bijection between two
//! codes. The metric has the extension property when every such map is the
//! restriction of an ambient linear isometry.
//!
//! Extension questions are answered with orbits: a map sending the source
//! basis `(x_1, ..., x_k)` to `(y_1, ..., y_k)` extends exactly when the
//! target tuple lies in the orbit of the source tuple under the isometry
//! group acting diagonally. Orbits are generated by breadth-first search
//! from the generators of [`FactoredGroup`], so groups of several million
//! elements never need to be materialized.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::Serialize;

use crate::code::{subspaces_of_dim, LinearCode};
use crate::covering::{mask_to_indices, Covering};
use crate::gf::{odometer_step, support_mask, Field, Matrix, Vector};
use crate::isometry::{ExtensionSearch, FactoredGroup};
use crate::metric::MetricSpace;
use crate::{checked_pow, Error, Limits, Result};

/// A weight-preserving linear map `t: source -> target`, stored as the
/// images of the source's reduced basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalEquivalence {
    source: LinearCode,
    target: LinearCode,
    images: Vec<Vector>,
}

impl LocalEquivalence {
    /// The linear map sending each `sources[i]` to `images[i]`, checked to
    /// be well defined and weight-preserving on every codeword.
    pub fn new(
        space: &MetricSpace,
        sources: &[Vector],
        images: &[Vector],
        limits: &Limits,
    ) -> Result<Self> {
        let field = space.field();
        let n = space.n();
        if sources.len() != images.len() {
            return Err(Error::LengthMismatch {
                expected: sources.len(),
                found: images.len(),
            });
        }
        for v in sources.iter().chain(images) {
            if v.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    found: v.len(),
                });
            }
        }
        let source = LinearCode::from_generators(field, n, sources)?;
        if source.dim() != sources.len() {
            return Err(Error::PreconditionFailed(
                "source vectors are linearly dependent".into(),
            ));
        }
        // reduce [X | Y] so that Y follows X onto the reduced basis
        let rows: Vec<Vector> = sources
            .iter()
            .zip(images)
            .map(|(x, y)| {
                let mut e = x.entries().to_vec();
                e.extend_from_slice(y.entries());
                Vector::new(field, e).expect("reduced residues")
            })
            .collect();
        let (reduced, _) = Matrix::from_rows(field, 2 * n, &rows)?.rref();
        let images: Vec<Vector> = (0..reduced.rows())
            .map(|r| Vector::new(field, reduced.row(r)[n..].to_vec()).expect("reduced residues"))
            .collect();
        let target = LinearCode::from_generators(field, n, &images)?;
        let t = LocalEquivalence {
            source,
            target,
            images,
        };
        if !t.preserves_weight(space, limits)? {
            return Err(Error::NotWeightPreserving);
        }
        Ok(t)
    }

    fn preserves_weight(&self, space: &MetricSpace, limits: &Limits) -> Result<bool> {
        let k = self.source.dim();
        let field = space.field();
        limits.check_enum("codeword enumeration", checked_pow(field.order(), k))?;
        let basis = self.source.basis();
        let n = space.n();
        let mut coeffs = vec![0u8; k];
        let (mut x, mut y) = (vec![0u8; n], vec![0u8; n]);
        while odometer_step(&mut coeffs, field.q() as u8) {
            x.fill(0);
            y.fill(0);
            for ((&a, b), img) in coeffs.iter().zip(&basis).zip(&self.images) {
                if a != 0 {
                    for j in 0..n {
                        x[j] = field.add(x[j], field.mul(a, b.get(j)));
                        y[j] = field.add(y[j], field.mul(a, img.get(j)));
                    }
                }
            }
            if space.table().of_entries(&x) != space.table().of_entries(&y) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn source(&self) -> &LinearCode {
        &self.source
    }

    pub fn target(&self) -> &LinearCode {
        &self.target
    }

    /// Images of the source's reduced basis rows, in order.
    pub fn images(&self) -> &[Vector] {
        &self.images
    }

    /// `t(c)`, or `None` when `c` is not in the source.
    pub fn apply(&self, c: &Vector) -> Option<Vector> {
        if !self.source.contains(c) {
            return None;
        }
        // reduced basis: the coefficient of row r is c at pivot r
        let field = self.source.field();
        let init = Vector::zeros(field, self.source.n());
        Some(
            self.source
                .pivots()
                .iter()
                .zip(&self.images)
                .fold(init, |acc, (&p, img)| acc.add_scaled(c.get(p), img)),
        )
    }

    /// Whether `x T = t(x)` on the source.
    pub fn is_restriction_of(&self, t: &Matrix) -> bool {
        self.source
            .basis()
            .iter()
            .zip(&self.images)
            .all(|(x, y)| t.vec_mul(x) == *y)
    }
}

/// Nonzero vectors of `F_q^n` bucketed by weight.
fn vectors_by_weight(space: &MetricSpace, pool: impl Iterator<Item = Vector>) -> Vec<Vec<Vec<u8>>> {
    let mut buckets = vec![Vec::new(); space.table().max_weight() + 1];
    for v in pool {
        if !v.is_zero() {
            buckets[space.weight(&v)].push(v.entries().to_vec());
        }
    }
    buckets
}

/// Calls `visit` on every weight-preserving choice of images for `basis`
/// drawn from `buckets`; stops when `visit` returns `false`.
fn for_each_local_image(
    space: &MetricSpace,
    basis: &[Vector],
    buckets: &[Vec<Vec<u8>>],
    visit: &mut dyn FnMut(&[Vec<u8>]) -> bool,
) {
    let n = space.n();
    let field = space.field();
    let table = space.table();
    // every combination of the chosen prefix, as (source, image) pairs
    let prefix = vec![(vec![0u8; n], vec![0u8; n])];
    let mut chosen: Vec<Vec<u8>> = Vec::with_capacity(basis.len());

    #[allow(clippy::too_many_arguments)]
    fn recurse(
        depth: usize,
        prefix: &[(Vec<u8>, Vec<u8>)],
        chosen: &mut Vec<Vec<u8>>,
        basis: &[Vector],
        buckets: &[Vec<Vec<u8>>],
        field: Field,
        table: &crate::metric::WeightTable,
        visit: &mut dyn FnMut(&[Vec<u8>]) -> bool,
    ) -> bool {
        if depth == basis.len() {
            return visit(chosen);
        }
        let x = basis[depth].entries();
        let n = x.len();
        let w = table.of_entries(x);
        let Some(candidates) = buckets.get(w) else {
            return true;
        };
        let mut sx = vec![0u8; n];
        let mut sy = vec![0u8; n];
        for y in candidates {
            // scaling is weight-neutral, so the new coefficient can be 1
            let ok = prefix.iter().all(|(px, py)| {
                for j in 0..n {
                    sx[j] = field.add(px[j], x[j]);
                    sy[j] = field.add(py[j], y[j]);
                }
                table.of_mask(support_mask(&sx)) == table.of_mask(support_mask(&sy))
            });
            if !ok {
                continue;
            }
            let mut next = Vec::with_capacity(prefix.len() * field.q() as usize);
            for a in field.elements() {
                for (px, py) in prefix {
                    let nx = (0..n).map(|j| field.add(px[j], field.mul(a, x[j]))).collect();
                    let ny = (0..n).map(|j| field.add(py[j], field.mul(a, y[j]))).collect();
                    next.push((nx, ny));
                }
            }
            chosen.push(y.clone());
            let go_on = recurse(depth + 1, &next, chosen, basis, buckets, field, table, visit);
            chosen.pop();
            if !go_on {
                return false;
            }
        }
        true
    }

    recurse(0, &prefix, &mut chosen, basis, buckets, field, table, visit);
}

/// Local equivalences `c1 -> c2`, at most `limit` of them.
///
/// Images of the reduced basis of `c1` range over ordered bases of `c2`.
pub fn find_local_equivalences(
    space: &MetricSpace,
    c1: &LinearCode,
    c2: &LinearCode,
    limit: Option<usize>,
    limits: &Limits,
) -> Result<Vec<LocalEquivalence>> {
    crate::code::ensure_same_space(c1, c2)?;
    if c1.dim() != c2.dim() {
        return Ok(Vec::new());
    }
    let k = c1.dim();
    let field = space.field();
    limits.check_enum("basis image enumeration", checked_pow(field.order(), k * k))?;
    let buckets = vectors_by_weight(space, c2.codewords(limits)?);
    let basis = c1.basis();
    let mut out = Vec::new();
    let mut failure = None;
    for_each_local_image(space, &basis, &buckets, &mut |images| {
        let images: Vec<Vector> = images
            .iter()
            .map(|y| Vector::new(field, y.clone()).expect("reduced residues"))
            .collect();
        match LocalEquivalence::new(space, &basis, &images, limits) {
            Ok(t) => out.push(t),
            Err(e) => {
                failure = Some(e);
                return false;
            }
        }
        limit.is_none_or(|l| out.len() < l)
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// A group element restricting to `t`, if any.
pub fn find_extension(t: &LocalEquivalence, group: &impl ExtensionSearch) -> Option<Matrix> {
    group.find_mapping(&t.source.basis(), &t.images)
}

/// The orbit of a tuple of vectors under the group generated by `gens`,
/// acting diagonally on the right. Tuples are flattened.
pub fn tuple_orbit(
    gens: &[Matrix],
    tuple: &[Vector],
    limits: &Limits,
) -> Result<HashSet<Vec<u8>>> {
    let n = tuple.first().map_or(0, Vector::len);
    let start: Vec<u8> = tuple.iter().flat_map(|v| v.entries().iter().copied()).collect();
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(cur) = queue.pop_front() {
        for g in gens {
            let mut img = vec![0u8; cur.len()];
            for (src, dst) in cur.chunks(n).zip(img.chunks_mut(n)) {
                g.vec_mul_into(src, dst);
            }
            if !seen.contains(&img) {
                if seen.len() as u128 >= limits.max_enum {
                    return Err(Error::CapExceeded {
                        what: "tuple orbit",
                        needed: seen.len() as u128 + 1,
                        cap: limits.max_enum,
                    });
                }
                seen.insert(img.clone());
                queue.push_back(img);
            }
        }
    }
    Ok(seen)
}

/// One representative per group orbit of `dim`-dimensional subspaces.
pub fn subspace_orbit_representatives(
    space: &MetricSpace,
    gens: &[Matrix],
    dim: usize,
    limits: &Limits,
) -> Result<Vec<LinearCode>> {
    let field = space.field();
    let n = space.n();
    let codes: Vec<LinearCode> = subspaces_of_dim(field, n, dim, limits)?.collect();
    let index: HashMap<&LinearCode, usize> = codes.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let mut seen = vec![false; codes.len()];
    let mut reps = Vec::new();
    for start in 0..codes.len() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        reps.push(codes[start].clone());
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            let basis = codes[i].basis();
            for g in gens {
                let moved: Vec<Vector> = basis.iter().map(|b| g.vec_mul(b)).collect();
                let image = LinearCode::from_generators(field, n, &moved)?;
                let j = index[&image];
                if !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    Ok(reps)
}

/// First local equivalence from a subspace of dimension `1..=max_dim` that no
/// group element extends. Sources are taken up to the group action, which
/// loses nothing: `t` extends iff `t` composed with a group element does.
pub fn search_non_extendable(
    space: &MetricSpace,
    group: &FactoredGroup,
    max_dim: usize,
    limits: &Limits,
) -> Result<Option<LocalEquivalence>> {
    let field = space.field();
    let n = space.n();
    let gens = group.generators();
    let all = crate::gf::enumerate_vectors(field, n, limits)?;
    let buckets = vectors_by_weight(space, all);
    for dim in 1..=max_dim.min(n) {
        limits.check_enum(
            "basis image enumeration",
            checked_pow(field.order(), n * dim),
        )?;
        for source in subspace_orbit_representatives(space, &gens, dim, limits)? {
            let basis = source.basis();
            let orbit = tuple_orbit(&gens, &basis, limits)?;
            let mut found: Option<Vec<Vec<u8>>> = None;
            for_each_local_image(space, &basis, &buckets, &mut |images| {
                if orbit.contains(&images.concat()) {
                    true
                } else {
                    found = Some(images.to_vec());
                    false
                }
            });
            if let Some(images) = found {
                let images: Vec<Vector> = images
                    .into_iter()
                    .map(|y| Vector::new(field, y).expect("reduced residues"))
                    .collect();
                return LocalEquivalence::new(space, &basis, &images, limits).map(Some);
            }
        }
    }
    Ok(None)
}

/// How a non-extendable local equivalence was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    /// Two basic sets of different sizes.
    UnequalSizes,
    /// Three components, two containing a basic set with two points.
    ThreeComponents,
    /// Two components, one with overlapping basic sets.
    TwoComponentOverlap,
    /// Exhaustive search over sources up to the group action.
    Search,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MepWitness {
    pub equivalence: LocalEquivalence,
    pub kind: WitnessKind,
    /// Whether the full isometry group was searched and no extension found.
    pub extension_refuted: bool,
}

fn basis_vectors(field: Field, n: usize, idx: &[usize]) -> Vec<Vector> {
    idx.iter().map(|&i| Vector::unit(field, n, i)).collect()
}

/// Basic sets `A`, `B` with `|A| > |B|`: the first such pair in set order.
fn unequal_pair(f: &Covering) -> Option<(u64, u64)> {
    let sets = f.sets();
    sets.iter()
        .flat_map(|&a| sets.iter().map(move |&b| (a, b)))
        .find(|(a, b)| a.count_ones() > b.count_ones())
}

/// For basic sets `A`, `B` with `|A| > |B|`: fix `A ∩ B`, send `B \ A` onto
/// `|B \ A|` points of `A \ B`. The result is weight-preserving on
/// `span{e_i : i in B}` but maps the indicator of `B` into `A`, leaving a
/// point of `A` whose image cannot stay inside one basic set with it.
pub fn unequal_sizes_witness(space: &MetricSpace, limits: &Limits) -> Result<LocalEquivalence> {
    let f = space.covering();
    let (a, b) = unequal_pair(f).ok_or(Error::NoUnequalSets)?;
    let n = space.n();
    let field = space.field();
    let b_only = mask_to_indices(b & !a);
    let a_only = mask_to_indices(a & !b);
    let sigma: HashMap<usize, usize> = b_only.iter().copied().zip(a_only.iter().copied()).collect();
    let sources = basis_vectors(field, n, &mask_to_indices(b));
    let images: Vec<Vector> = mask_to_indices(b)
        .iter()
        .map(|i| Vector::unit(field, n, *sigma.get(i).unwrap_or(i)))
        .collect();
    LocalEquivalence::new(space, &sources, &images, limits)
}

/// Two points of a basic set in each of two components, one point of a set
/// in a third: `e_a0 + e_b0 -> e_a1 + e_c` and `e_a1 + e_b1 -> -e_a1 + e_b1`.
///
/// The map is weight-preserving only over `F_2`; otherwise this falls back
/// to [`search_non_extendable`] over sources of dimension at most two.
pub fn three_component_witness(
    space: &MetricSpace,
    limits: &Limits,
) -> Result<(LocalEquivalence, WitnessKind)> {
    let f = space.covering();
    let comps = f.components();
    if comps.len() < 3 {
        return Err(Error::PreconditionFailed(format!(
            "need at least 3 components, found {}",
            comps.len()
        )));
    }
    let wide = |c: &crate::covering::Component| c.sets.iter().copied().find(|s| s.count_ones() >= 2);
    let with_wide: Vec<(usize, u64)> = comps
        .iter()
        .enumerate()
        .filter_map(|(i, c)| wide(c).map(|s| (i, s)))
        .collect();
    let [(ia, a), (ib, b), ..] = with_wide[..] else {
        return Err(Error::PreconditionFailed(
            "need two components with a basic set of size at least 2".into(),
        ));
    };
    let third = (0..comps.len()).find(|&i| i != ia && i != ib).expect("three components");
    let c = comps[third].sets[0].trailing_zeros() as usize;
    let (a0, a1) = {
        let idx = mask_to_indices(a);
        (idx[0], idx[1])
    };
    let (b0, b1) = {
        let idx = mask_to_indices(b);
        (idx[0], idx[1])
    };
    let field = space.field();
    let n = space.n();
    let e = |i: usize| Vector::unit(field, n, i);
    let sources = [e(a0).add(&e(b0)), e(a1).add(&e(b1))];
    let images = [e(a1).add(&e(c)), e(b1).sub(&e(a1))];
    match LocalEquivalence::new(space, &sources, &images, limits) {
        Ok(t) => Ok((t, WitnessKind::ThreeComponents)),
        Err(Error::NotWeightPreserving) => {
            let group = FactoredGroup::new(space, limits)?;
            search_non_extendable(space, &group, 2, limits)?
                .map(|t| (t, WitnessKind::Search))
                .ok_or_else(|| {
                    Error::NoWitness(format!(
                        "the three-component map is not weight-preserving over F_{} and no \
                         non-extendable local equivalence of dimension <= 2 exists",
                        field.q()
                    ))
                })
        }
        Err(e) => Err(e),
    }
}

/// Two components, overlapping sets `A`, `B` in one and `C` in the other:
/// `1_A -> e_j0` with `j0 in C` and `1_{B \ A} -> e_i0` with `i0 in A \ B`.
pub fn two_component_overlap_witness(
    space: &MetricSpace,
    limits: &Limits,
) -> Result<LocalEquivalence> {
    let f = space.covering();
    let comps = f.components();
    if comps.len() != 2 {
        return Err(Error::PreconditionFailed(format!(
            "need exactly 2 components, found {}",
            comps.len()
        )));
    }
    let overlap = comps.iter().enumerate().find_map(|(ci, comp)| {
        comp.sets.iter().find_map(|&a| {
            comp.sets
                .iter()
                .find(|&&b| b != a && a & b != 0)
                .map(|&b| (ci, a, b))
        })
    });
    let (ci, a, b) = overlap.ok_or_else(|| {
        Error::PreconditionFailed("no component has two overlapping basic sets".into())
    })?;
    let other = &comps[1 - ci];
    let j0 = other.sets[0].trailing_zeros() as usize;
    let i0 = (a & !b).trailing_zeros() as usize;
    let field = space.field();
    let n = space.n();
    let sources = [
        Vector::indicator(field, n, a),
        Vector::indicator(field, n, b & !a),
    ];
    let images = [Vector::unit(field, n, j0), Vector::unit(field, n, i0)];
    LocalEquivalence::new(space, &sources, &images, limits)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MepReason {
    Hamming,
    TwoComponentKPartition,
    StructuralRefutation,
    Exhaustive,
    /// Connected covering, no scan requested: the conjectured criterion.
    ConjecturePrediction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MepMode {
    Conjecture,
    Exhaustive { max_dim: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MepVerdict {
    pub satisfies: bool,
    pub reason: MepReason,
    pub witness: Option<MepWitness>,
    pub note: Option<String>,
}

/// Conjectured criterion for connected coverings: every basic set has the
/// same size `k` and every `k`-subset of `[n]` is a basic set.
pub fn conjecture_prediction(f: &Covering) -> bool {
    let Some(k) = f.uniform_size() else {
        return false;
    };
    let n = f.n() as u128;
    let binom = (0..k as u128).fold(1u128, |acc, i| acc * (n - i) / (i + 1));
    f.len() as u128 == binom
}

/// Searches the group for an extension of `t`; `Ok(true)` when none exists.
fn refute_extension(space: &MetricSpace, t: &LocalEquivalence, limits: &Limits) -> Result<bool> {
    let group = FactoredGroup::new(space, limits)?;
    let orbit = tuple_orbit(&group.generators(), &t.source().basis(), limits)?;
    let images: Vec<u8> = t.images().iter().flat_map(|v| v.entries().iter().copied()).collect();
    Ok(!orbit.contains(&images))
}

/// The extension-property verdict.
///
/// Unconnected coverings get the structural verdict with a constructed
/// witness; connected ones get the conjectured criterion or an exhaustive
/// scan, depending on `mode`.
pub fn mep_verdict(space: &MetricSpace, mode: MepMode, limits: &Limits) -> Result<MepVerdict> {
    let f = space.covering();
    if f.is_hamming() {
        return Ok(MepVerdict {
            satisfies: true,
            reason: MepReason::Hamming,
            witness: None,
            note: None,
        });
    }
    let l = f.components().len();
    if l == 1 {
        return match mode {
            MepMode::Conjecture => Ok(MepVerdict {
                satisfies: conjecture_prediction(f),
                reason: MepReason::ConjecturePrediction,
                witness: None,
                note: Some("connected covering: conjectured criterion, not a theorem".into()),
            }),
            MepMode::Exhaustive { max_dim } => exhaustive_mep_scan(space, max_dim, limits),
        };
    }
    if l == 2 && f.is_k_partition().is_some() {
        return Ok(MepVerdict {
            satisfies: true,
            reason: MepReason::TwoComponentKPartition,
            witness: None,
            note: None,
        });
    }
    let built = if unequal_pair(f).is_some() {
        unequal_sizes_witness(space, limits).map(|t| (t, WitnessKind::UnequalSizes))
    } else if l > 2 {
        three_component_witness(space, limits)
    } else {
        two_component_overlap_witness(space, limits).map(|t| (t, WitnessKind::TwoComponentOverlap))
    };
    let (witness, note) = match built {
        Ok((t, kind)) => {
            let (refuted, note) = match refute_extension(space, &t, limits) {
                Ok(true) => (true, None),
                Ok(false) => (
                    false,
                    Some("constructed map extends to an isometry; witness is invalid".into()),
                ),
                Err(e) => (false, Some(format!("extension not checked: {e}"))),
            };
            (
                Some(MepWitness {
                    equivalence: t,
                    kind,
                    extension_refuted: refuted,
                }),
                note,
            )
        }
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(MepVerdict {
        satisfies: false,
        reason: MepReason::StructuralRefutation,
        witness,
        note,
    })
}

/// Checks every local equivalence from every subspace of dimension
/// `1..=max_dim` for an extension; the verdict covers the scanned range only.
pub fn exhaustive_mep_scan(
    space: &MetricSpace,
    max_dim: usize,
    limits: &Limits,
) -> Result<MepVerdict> {
    let group = FactoredGroup::new(space, limits)?;
    let found = search_non_extendable(space, &group, max_dim, limits)?;
    Ok(MepVerdict {
        satisfies: found.is_none(),
        reason: MepReason::Exhaustive,
        witness: found.map(|t| MepWitness {
            equivalence: t,
            kind: WitnessKind::Search,
            extension_refuted: true,
        }),
        note: Some(format!("sources of dimension <= {max_dim}")),
    })
}
