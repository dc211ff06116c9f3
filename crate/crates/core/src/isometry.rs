//! Linear isometries of `(F_q^n, d_F)`.
//!
//! The group splits as `G * K_M`: `G` holds the coordinate permutations that
//! map basic sets to basic sets, and `K_M` holds the matrices whose diagonal
//! class blocks are invertible and whose off-diagonal blocks are nonzero only
//! from a class to a class dominating it.
//!
//! Two representations are provided. [`IsometryGroup`] materializes every
//! element (by product closure or by brute-force filtering of all `n x n`
//! matrices). [`FactoredGroup`] keeps `G` explicit and treats `K_M`
//! implicitly, solving for block matrices on demand; it scales to groups with
//! millions of elements.
//!
//! Matrices act on row vectors: `T(x) = x T`, so `T(e_i)` is row `i` of `T`
//! and `S T` applies `S` first. This is the action under which a block
//! `B_ij` (rows in `H_i`, columns in `H_j`) may be nonzero exactly when `H_j`
//! dominates `H_i`.

use std::collections::HashSet;
use std::fmt;

use itertools::Itertools;
use serde::Serialize;

use crate::covering::{ClassStructure, Covering};
use crate::gf::{odometer_step, support_mask, Field, Matrix, Vector};
use crate::metric::{MetricSpace, WeightTable};
use crate::{checked_pow, Error, Limits, Result};

/// A permutation `phi` of `{0, ..., n-1}`, stored as its image list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::PreconditionFailed(format!(
                    "{images:?} is not a permutation"
                )));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { images: inv }
    }

    /// Image of a set mask.
    pub fn map_mask(&self, mask: u64) -> u64 {
        Covering::map_mask(mask, &self.images)
    }

    /// The coordinate action `T_phi(x)_j = x_phi(j)`: column `j` has its one
    /// in row `phi(j)`.
    pub fn matrix(&self, field: Field) -> Matrix {
        let n = self.images.len();
        let mut m = Matrix::zeros(field, n, n);
        for (j, &i) in self.images.iter().enumerate() {
            m.set(i, j, 1);
        }
        m
    }

    /// Recovers `phi` from a permutation matrix.
    pub fn from_matrix(m: &Matrix) -> Option<Permutation> {
        if !m.is_square() {
            return None;
        }
        let m = m.transpose();
        let images = (0..m.rows())
            .map(|r| {
                let row = m.row(r);
                let ones: Vec<usize> = (0..row.len()).filter(|&c| row[c] != 0).collect();
                (ones.len() == 1 && row[ones[0]] == 1).then(|| ones[0])
            })
            .collect::<Option<Vec<_>>>()?;
        Permutation::new(images).ok()
    }

    /// 1-based image list, for display.
    pub fn to_one_based(&self) -> Vec<usize> {
        self.images.iter().map(|i| i + 1).collect()
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_one_based())
    }
}

/// Whether `phi` maps every basic set onto a basic set.
pub fn preserves_covering(f: &Covering, phi: &Permutation) -> bool {
    phi.len() == f.n() && f.sets().iter().all(|&a| f.contains_set(phi.map_mask(a)))
}

/// Whether `m` preserves weight on all of `F_q^n`.
///
/// Scans one representative per projective point (first nonzero entry 1),
/// which suffices because weights are invariant under scaling.
pub fn preserves_weight(table: &WeightTable, m: &Matrix, limits: &Limits) -> Result<bool> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.cols();
    let field = m.field();
    limits.check_enum("weight certification", checked_pow(field.order(), n))?;
    // images of e_i first: these must keep weight 1
    for r in 0..n {
        if table.of_entries(m.row(r)) != 1 {
            return Ok(false);
        }
    }
    let q = field.q() as u8;
    let mut x = vec![0u8; n];
    let mut y = vec![0u8; n];
    while odometer_step(&mut x, q) {
        if x.iter().find(|&&e| e != 0) != Some(&1) {
            continue;
        }
        m.vec_mul_into(&x, &mut y);
        if table.of_mask(support_mask(&x)) != table.of_entries(&y) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// An invertible matrix, certified weight-preserving by exhaustive check.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Isometry {
    matrix: Matrix,
    certified: bool,
}

impl Isometry {
    /// Certifies `matrix` over all of `F_q^n`. Above the enumeration cap the
    /// matrix is refused rather than sampled.
    pub fn certify(table: &WeightTable, matrix: Matrix, limits: &Limits) -> Result<Isometry> {
        if preserves_weight(table, &matrix, limits)? && matrix.is_invertible() {
            Ok(Isometry {
                matrix,
                certified: true,
            })
        } else {
            Err(Error::NotAnIsometry)
        }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    pub fn certified(&self) -> bool {
        self.certified
    }
}

/// Every permutation preserving the covering.
pub fn covering_permutations(f: &Covering, limits: &Limits) -> Result<Vec<Permutation>> {
    let n = f.n();
    if n > limits.max_perm_n {
        return Err(Error::CapExceeded {
            what: "permutation scan",
            needed: n as u128,
            cap: limits.max_perm_n as u128,
        });
    }
    Ok((0..n)
        .permutations(n)
        .map(|images| Permutation { images })
        .filter(|phi| preserves_covering(f, phi))
        .collect())
}

/// `G`: permutation matrices of covering-preserving permutations, certified.
pub fn group_g(space: &MetricSpace, limits: &Limits) -> Result<Vec<Isometry>> {
    covering_permutations(space.covering(), limits)?
        .iter()
        .map(|phi| Isometry::certify(space.table(), phi.matrix(space.field()), limits))
        .collect()
}

/// Whether `b` respects the incidence structure: invertible diagonal class
/// blocks, and a nonzero block `(H_i, H_j)` only when `H_j` dominates `H_i`.
pub fn respects_m(classes: &ClassStructure, b: &Matrix) -> bool {
    let n = classes.n();
    if b.rows() != n || b.cols() != n {
        return false;
    }
    for r in 0..n {
        let allowed = classes.dominating_mask(classes.class_of(r));
        if support_mask(b.row(r)) & !allowed != 0 {
            return false;
        }
    }
    classes
        .classes()
        .iter()
        .all(|&h| diagonal_block(b, h).is_invertible())
}

fn diagonal_block(b: &Matrix, class: u64) -> Matrix {
    let idx = crate::covering::mask_to_indices(class);
    let mut m = Matrix::zeros(b.field(), idx.len(), idx.len());
    for (i, &r) in idx.iter().enumerate() {
        for (j, &c) in idx.iter().enumerate() {
            m.set(i, j, b.get(r, c));
        }
    }
    m
}

/// `|GL(h, q)|`.
pub fn general_linear_order(h: usize, q: u128) -> Option<u128> {
    let qh = checked_pow(q, h)?;
    (0..h).try_fold(1u128, |acc, i| acc.checked_mul(qh - checked_pow(q, i)?))
}

/// Cells `(row, col)` outside the diagonal blocks that `K_M` leaves free.
fn free_off_diagonal_cells(classes: &ClassStructure) -> Vec<(usize, usize)> {
    let n = classes.n();
    (0..n)
        .flat_map(|r| (0..n).map(move |c| (r, c)))
        .filter(|&(r, c)| {
            let (cr, cc) = (classes.class_of(r), classes.class_of(c));
            cr != cc && classes.dominates(cc, cr)
        })
        .collect()
}

/// `|K_M|` from the block structure.
pub fn k_m_order(classes: &ClassStructure, field: Field) -> Option<u128> {
    let q = field.order();
    let blocks = classes.classes().iter().try_fold(1u128, |acc, &h| {
        acc.checked_mul(general_linear_order(h.count_ones() as usize, q)?)
    })?;
    blocks.checked_mul(checked_pow(q, free_off_diagonal_cells(classes).len())?)
}

/// All invertible `h x h` matrices.
fn general_linear_group(field: Field, h: usize, limits: &Limits) -> Result<Vec<Matrix>> {
    limits.check_enum("GL block enumeration", checked_pow(field.order(), h * h))?;
    let mut out = Vec::new();
    let mut data = vec![0u8; h * h];
    loop {
        let m = Matrix::new(field, h, h, data.clone())?;
        if m.is_invertible() {
            out.push(m);
        }
        if !odometer_step(&mut data, field.q() as u8) {
            break;
        }
    }
    Ok(out)
}

/// `K_M`, fully enumerated; every element is certified.
pub fn group_k_m(space: &MetricSpace, limits: &Limits) -> Result<Vec<Isometry>> {
    let classes = space.classes();
    let field = space.field();
    let n = space.n();
    limits.check_enum("K_M enumeration", k_m_order(classes, field))?;
    let class_indices: Vec<Vec<usize>> = classes
        .classes()
        .iter()
        .map(|&h| crate::covering::mask_to_indices(h))
        .collect();
    let blocks: Vec<Vec<Matrix>> = class_indices
        .iter()
        .map(|idx| general_linear_group(field, idx.len(), limits))
        .collect::<Result<_>>()?;
    let cells = free_off_diagonal_cells(classes);

    let mut out = Vec::new();
    let mut choice = vec![0usize; blocks.len()];
    loop {
        let mut base = Matrix::zeros(field, n, n);
        for ((idx, block), &k) in class_indices.iter().zip(&blocks).zip(&choice) {
            let m = &block[k];
            for (i, &r) in idx.iter().enumerate() {
                for (j, &c) in idx.iter().enumerate() {
                    base.set(r, c, m.get(i, j));
                }
            }
        }
        let mut values = vec![0u8; cells.len()];
        loop {
            let mut m = base.clone();
            for (&(r, c), &v) in cells.iter().zip(&values) {
                m.set(r, c, v);
            }
            out.push(Isometry::certify(space.table(), m, limits)?);
            if !odometer_step(&mut values, field.q() as u8) {
                break;
            }
        }
        if !mixed_radix_step(&mut choice, &blocks.iter().map(Vec::len).collect::<Vec<_>>()) {
            break;
        }
    }
    Ok(out)
}

fn mixed_radix_step(digits: &mut [usize], radix: &[usize]) -> bool {
    for (d, &r) in digits.iter_mut().zip(radix).rev() {
        if *d + 1 < r {
            *d += 1;
            return true;
        }
        *d = 0;
    }
    false
}

/// An explicitly materialized group of certified isometries.
///
/// Equality is set equality.
#[derive(Debug, Clone)]
pub struct IsometryGroup {
    elements: Vec<Matrix>,
    index: HashSet<Matrix>,
}

impl IsometryGroup {
    fn from_elements(elements: Vec<Matrix>) -> Self {
        let index = elements.iter().cloned().collect();
        IsometryGroup { elements, index }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Matrix] {
        &self.elements
    }

    pub fn contains(&self, m: &Matrix) -> bool {
        self.index.contains(m)
    }

    /// Closure under products and inverses, checked element by element.
    pub fn is_closed(&self) -> bool {
        self.elements.iter().all(|a| {
            a.invert().is_ok_and(|inv| self.contains(&inv))
                && self
                    .elements
                    .iter()
                    .all(|b| self.contains(&a.mul(b).expect("square matrices")))
        })
    }
}

impl PartialEq for IsometryGroup {
    fn eq(&self, other: &Self) -> bool {
        self.index == other.index
    }
}

impl Eq for IsometryGroup {}

/// Product closure of `generators` (plus the identity), adding a generator
/// only when it is not already in the subgroup built so far.
pub fn closure(
    field: Field,
    n: usize,
    generators: impl IntoIterator<Item = Matrix>,
    limits: &Limits,
) -> Result<IsometryGroup> {
    let identity = Matrix::identity(field, n);
    let mut elements = vec![identity.clone()];
    let mut index: HashSet<Matrix> = HashSet::from([identity]);
    let mut used: Vec<Matrix> = Vec::new();
    for g in generators {
        if index.contains(&g) {
            continue;
        }
        used.push(g);
        let mut pos = 0;
        while pos < elements.len() {
            let e = elements[pos].clone();
            pos += 1;
            for s in &used {
                let p = e.mul(s)?;
                if !index.contains(&p) {
                    if elements.len() >= limits.max_group {
                        return Err(Error::CapExceeded {
                            what: "group closure",
                            needed: elements.len() as u128 + 1,
                            cap: limits.max_group as u128,
                        });
                    }
                    index.insert(p.clone());
                    elements.push(p);
                }
            }
        }
    }
    Ok(IsometryGroup { elements, index })
}

/// The group generated by `G` and `K_M`; every element certified.
pub fn full_isometry_group(space: &MetricSpace, limits: &Limits) -> Result<IsometryGroup> {
    let g = group_g(space, limits)?;
    let k = group_k_m(space, limits)?;
    let group = closure(
        space.field(),
        space.n(),
        g.into_iter().chain(k).map(Isometry::into_matrix),
        limits,
    )?;
    for m in group.elements() {
        if !preserves_weight(space.table(), m, limits)? {
            return Err(Error::NotAnIsometry);
        }
    }
    Ok(group)
}

/// Every `n x n` matrix that preserves weight, by exhaustive filtering.
pub fn brute_force_isometries(space: &MetricSpace, limits: &Limits) -> Result<IsometryGroup> {
    let n = space.n();
    let field = space.field();
    limits.check_enum("matrix enumeration", checked_pow(field.order(), n * n))?;
    let q = field.q() as u8;
    let mut data = vec![0u8; n * n];
    let mut out = Vec::new();
    loop {
        let m = Matrix::new(field, n, n, data.clone())?;
        if preserves_weight(space.table(), &m, limits)? {
            // weight preservation forces injectivity
            debug_assert!(m.is_invertible());
            out.push(m);
        }
        if !odometer_step(&mut data, q) {
            break;
        }
    }
    Ok(IsometryGroup::from_elements(out))
}

/// Splits `t` as `T_phi * B` with `phi` preserving the covering and `B`
/// respecting the incidence structure.
pub fn decompose(
    space: &MetricSpace,
    perms: &[Permutation],
    t: &Matrix,
) -> Result<(Permutation, Matrix)> {
    for phi in perms {
        // T = T_phi B, and T_phi is orthogonal
        let b = phi.matrix(space.field()).transpose().mul(t)?;
        if respects_m(space.classes(), &b) {
            return Ok((phi.clone(), b));
        }
    }
    Err(Error::NotDecomposable)
}

/// The class containing the support of the cleared-out form of `T(e_i)`, or
/// `None` when that support meets several classes.
pub fn cleared_image_class(classes: &ClassStructure, t: &Matrix, i: usize) -> Option<usize> {
    let cleared = classes.cleared_out(&t.row_vector(i));
    let meeting = classes.classes_meeting(cleared.support_mask());
    match meeting.as_slice() {
        [c] => Some(*c),
        _ => None,
    }
}

/// Search for a group element sending each `sources[i]` to `targets[i]`.
pub trait ExtensionSearch {
    fn find_mapping(&self, sources: &[Vector], targets: &[Vector]) -> Option<Matrix>;

    /// Group order, when representable.
    fn order(&self) -> Option<u128>;
}

impl ExtensionSearch for IsometryGroup {
    fn find_mapping(&self, sources: &[Vector], targets: &[Vector]) -> Option<Matrix> {
        let mut buf = vec![0u8; sources.first().map_or(0, Vector::len)];
        self.elements
            .iter()
            .find(|m| {
                sources.iter().zip(targets).all(|(x, y)| {
                    m.vec_mul_into(x.entries(), &mut buf);
                    buf == y.entries()
                })
            })
            .cloned()
    }

    fn order(&self) -> Option<u128> {
        Some(self.len() as u128)
    }
}

/// `G * K_M` with `K_M` left implicit.
///
/// Construction checks that every covering-preserving permutation maps
/// classes onto classes and preserves domination, so `G` normalizes `K_M`
/// and the product set is a group (the one generated by `G` and `K_M`).
#[derive(Debug, Clone)]
pub struct FactoredGroup {
    field: Field,
    classes: ClassStructure,
    perms: Vec<Permutation>,
    perm_matrices: Vec<Matrix>,
    /// For each column `c` of a `K_M` element, the rows that may be nonzero:
    /// those in classes dominated by the class of `c`.
    allowed: Vec<Vec<usize>>,
    max_enum: u128,
}

impl FactoredGroup {
    pub fn new(space: &MetricSpace, limits: &Limits) -> Result<Self> {
        let perms = covering_permutations(space.covering(), limits)?;
        let classes = space.classes().clone();
        for phi in &perms {
            if !normalizes(&classes, phi) {
                return Err(Error::PreconditionFailed(format!(
                    "permutation {phi} does not normalize K_M"
                )));
            }
        }
        let field = space.field();
        let perm_matrices = perms.iter().map(|p| p.matrix(field)).collect();
        let allowed = (0..classes.n())
            .map(|c| {
                let own = classes.class_of(c);
                let mask = (0..classes.len())
                    .filter(|&a| classes.dominates(own, a))
                    .fold(0, |m, a| m | classes.classes()[a]);
                crate::covering::mask_to_indices(mask)
            })
            .collect();
        Ok(FactoredGroup {
            field,
            classes,
            perms,
            perm_matrices,
            allowed,
            max_enum: limits.max_enum,
        })
    }

    pub fn permutations(&self) -> &[Permutation] {
        &self.perms
    }

    pub fn classes(&self) -> &ClassStructure {
        &self.classes
    }

    /// `|G| |K_M| / |G and K_M|`.
    pub fn group_order(&self) -> Option<u128> {
        let k = k_m_order(&self.classes, self.field)?;
        let shared = self
            .perm_matrices
            .iter()
            .filter(|m| respects_m(&self.classes, m))
            .count() as u128;
        (self.perms.len() as u128).checked_mul(k).map(|x| x / shared)
    }

    pub fn contains(&self, m: &Matrix) -> bool {
        self.perm_matrices
            .iter()
            .any(|p| p.transpose().mul(m).is_ok_and(|b| respects_m(&self.classes, &b)))
    }

    /// Generators: `G` and the elementary matrices of `K_M` (transvections
    /// and scalings inside each class block, transvections on free
    /// off-diagonal cells).
    pub fn generators(&self) -> Vec<Matrix> {
        let n = self.classes.n();
        let f = self.field;
        let mut gens: Vec<Matrix> = self.perm_matrices.clone();
        let elementary = |r: usize, c: usize, v: u8| {
            let mut m = Matrix::identity(f, n);
            m.set(r, c, v);
            m
        };
        for &h in self.classes.classes() {
            let idx = crate::covering::mask_to_indices(h);
            for &r in &idx {
                for &c in &idx {
                    if r != c {
                        gens.push(elementary(r, c, 1));
                    }
                }
                for s in f.units().filter(|&s| s != 1) {
                    gens.push(elementary(r, r, s));
                }
            }
        }
        for (r, c) in free_off_diagonal_cells(&self.classes) {
            gens.push(elementary(r, c, 1));
        }
        gens
    }

    /// Solves `x_i B = z_i` for `B` in `K_M`, one column of `B` at a time.
    fn solve_block(&self, sources: &[Vector], targets: &[Vec<u8>]) -> Option<Matrix> {
        let n = self.classes.n();
        let f = self.field;
        // rows of B^T: realizable diagonal parts and one full row for each
        let mut rows: Vec<Vec<(Vec<u8>, Vec<u8>)>> = Vec::with_capacity(n);
        for r in 0..n {
            let cols = &self.allowed[r];
            let own = crate::covering::mask_to_indices(self.classes.classes()[self.classes.class_of(r)]);
            let rhs: Vec<u8> = targets.iter().map(|z| z[r]).collect();
            let solutions = solve_row(f, sources, cols, &rhs, self.max_enum)?;
            let mut options: Vec<(Vec<u8>, Vec<u8>)> = Vec::new();
            for full in solutions {
                let diag: Vec<u8> = own.iter().map(|&c| full[c]).collect();
                if diag.iter().any(|&d| d != 0) && !options.iter().any(|(d, _)| *d == diag) {
                    options.push((diag, full));
                }
            }
            if options.is_empty() {
                return None;
            }
            rows.push(options);
        }
        let mut b = Matrix::zeros(f, n, n);
        for &h in self.classes.classes() {
            let idx = crate::covering::mask_to_indices(h);
            let mut picked: Vec<usize> = Vec::with_capacity(idx.len());
            if !pick_independent(f, &idx, &rows, &mut picked) {
                return None;
            }
            for (&r, &k) in idx.iter().zip(&picked) {
                for (c, &v) in rows[r][k].1.iter().enumerate() {
                    b.set(r, c, v);
                }
            }
        }
        let b = b.transpose();
        debug_assert!(respects_m(&self.classes, &b));
        Some(b)
    }
}

/// Whether conjugation by `T_phi` keeps `K_M` inside itself.
fn normalizes(classes: &ClassStructure, phi: &Permutation) -> bool {
    let s = classes.len();
    let image: Vec<Option<usize>> = classes
        .classes()
        .iter()
        .map(|&h| {
            let m = phi.map_mask(h);
            classes.classes().iter().position(|&c| c == m)
        })
        .collect();
    if image.iter().any(Option::is_none) {
        return false;
    }
    let image: Vec<usize> = image.into_iter().flatten().collect();
    (0..s).all(|a| (0..s).all(|b| classes.dominates(a, b) == classes.dominates(image[a], image[b])))
}

/// All full-length rows `b` supported on `cols` with `b . x_i = rhs_i`.
fn solve_row(
    f: Field,
    sources: &[Vector],
    cols: &[usize],
    rhs: &[u8],
    max_enum: u128,
) -> Option<Vec<Vec<u8>>> {
    let k = sources.len();
    let w = cols.len();
    // augmented system [A | rhs], A[i][j] = x_i[cols[j]]
    let mut aug = Matrix::zeros(f, k, w + 1);
    for (i, x) in sources.iter().enumerate() {
        for (j, &c) in cols.iter().enumerate() {
            aug.set(i, j, x.get(c));
        }
        aug.set(i, w, rhs[i]);
    }
    let (red, pivots) = aug.rref();
    if pivots.last() == Some(&w) {
        return None;
    }
    let free: Vec<usize> = (0..w).filter(|j| !pivots.contains(j)).collect();
    if checked_pow(f.order(), free.len()).is_none_or(|c| c > max_enum) {
        return None;
    }
    let n = sources.first().map_or(0, Vector::len);
    let mut out = Vec::new();
    let mut vals = vec![0u8; free.len()];
    loop {
        let mut sol = vec![0u8; w];
        for (&j, &v) in free.iter().zip(&vals) {
            sol[j] = v;
        }
        for (r, &p) in pivots.iter().enumerate() {
            let mut s = red.get(r, w);
            for &j in &free {
                s = f.sub(s, f.mul(red.get(r, j), sol[j]));
            }
            sol[p] = s;
        }
        let mut full = vec![0u8; n];
        for (j, &c) in cols.iter().enumerate() {
            full[c] = sol[j];
        }
        out.push(full);
        if !odometer_step(&mut vals, f.q() as u8) {
            break;
        }
    }
    Some(out)
}

/// Backtracks over the rows of one class, choosing diagonal parts that are
/// linearly independent.
fn pick_independent(
    f: Field,
    idx: &[usize],
    rows: &[Vec<(Vec<u8>, Vec<u8>)>],
    picked: &mut Vec<usize>,
) -> bool {
    let depth = picked.len();
    if depth == idx.len() {
        return true;
    }
    for k in 0..rows[idx[depth]].len() {
        picked.push(k);
        let chosen: Vec<Vector> = picked
            .iter()
            .zip(idx)
            .map(|(&k, &r)| Vector::new(f, rows[r][k].0.clone()).expect("reduced"))
            .collect();
        let independent = Matrix::from_rows(f, idx.len(), &chosen)
            .map(|m| m.rank() == chosen.len())
            .unwrap_or(false);
        if independent && pick_independent(f, idx, rows, picked) {
            return true;
        }
        picked.pop();
    }
    false
}

impl ExtensionSearch for FactoredGroup {
    fn find_mapping(&self, sources: &[Vector], targets: &[Vector]) -> Option<Matrix> {
        for p in &self.perm_matrices {
            // x P B = y
            let moved: Vec<Vector> = sources.iter().map(|x| p.vec_mul(x)).collect();
            let z: Vec<Vec<u8>> = targets.iter().map(|y| y.entries().to_vec()).collect();
            if let Some(b) = self.solve_block(&moved, &z) {
                let t = p.mul(&b).expect("square");
                debug_assert!(sources.iter().zip(targets).all(|(x, y)| t.vec_mul(x) == *y));
                return Some(t);
            }
        }
        None
    }

    fn order(&self) -> Option<u128> {
        self.group_order()
    }
}

/// Either an explicit group or the factored form, whichever fits the caps.
#[derive(Debug, Clone)]
pub enum AnyGroup {
    Explicit(IsometryGroup),
    Factored(FactoredGroup),
}

impl AnyGroup {
    /// The explicit closure when `|K_M|` and the group order fit the caps,
    /// otherwise the factored form.
    pub fn for_space(space: &MetricSpace, limits: &Limits) -> Result<Self> {
        let factored = FactoredGroup::new(space, limits)?;
        let fits = k_m_order(space.classes(), space.field()).is_some_and(|k| k <= limits.max_enum)
            && factored
                .group_order()
                .is_some_and(|o| o <= limits.max_group as u128);
        if fits {
            Ok(AnyGroup::Explicit(full_isometry_group(space, limits)?))
        } else {
            Ok(AnyGroup::Factored(factored))
        }
    }

    pub fn is_explicit(&self) -> bool {
        matches!(self, AnyGroup::Explicit(_))
    }
}

impl ExtensionSearch for AnyGroup {
    fn find_mapping(&self, sources: &[Vector], targets: &[Vector]) -> Option<Matrix> {
        match self {
            AnyGroup::Explicit(g) => g.find_mapping(sources, targets),
            AnyGroup::Factored(g) => g.find_mapping(sources, targets),
        }
    }

    fn order(&self) -> Option<u128> {
        match self {
            AnyGroup::Explicit(g) => ExtensionSearch::order(g),
            AnyGroup::Factored(g) => g.group_order(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(q: u32) -> Field {
        Field::new(q).unwrap()
    }

    fn cov(n: usize, sets: &[&[usize]]) -> Covering {
        let sets: Vec<Vec<usize>> = sets.iter().map(|s| s.to_vec()).collect();
        Covering::from_one_based(n, &sets).unwrap()
    }

    fn space(f: Covering, q: u32) -> MetricSpace {
        MetricSpace::new(f, gf(q), &Limits::default()).unwrap()
    }

    fn perm(one_based: &[usize]) -> Permutation {
        Permutation::new(one_based.iter().map(|i| i - 1).collect()).unwrap()
    }

    #[test]
    fn preserves_covering_examples() {
        let blocks = cov(4, &[&[1, 2], &[3, 4]]);
        assert!(preserves_covering(&blocks, &Permutation::identity(4)));
        assert!(preserves_covering(&blocks, &perm(&[3, 4, 1, 2])));
        let burst = Covering::burst(4, 2).unwrap();
        assert!(!preserves_covering(&burst, &perm(&[2, 1, 3, 4])));
        assert!(preserves_covering(&burst, &perm(&[4, 3, 2, 1])));
    }

    #[test]
    fn permutation_matrix_action() {
        let f3 = gf(3);
        let phi = perm(&[2, 3, 1]);
        let x = Vector::from_ints(f3, &[1, 2, 0]);
        // (x_phi(1), x_phi(2), x_phi(3)) = (x_2, x_3, x_1)
        assert_eq!(phi.matrix(f3).vec_mul(&x), Vector::from_ints(f3, &[2, 0, 1]));
        assert_eq!(Permutation::from_matrix(&phi.matrix(f3)), Some(phi.clone()));
        assert_eq!(phi.inverse().matrix(f3), phi.matrix(f3).transpose());
    }

    #[test]
    fn group_g_examples() {
        let lim = Limits::default();
        assert_eq!(group_g(&space(Covering::hamming(3).unwrap(), 2), &lim).unwrap().len(), 6);
        assert_eq!(group_g(&space(Covering::trivial(4).unwrap(), 2), &lim).unwrap().len(), 24);
        assert_eq!(group_g(&space(cov(4, &[&[1, 2], &[3, 4]]), 2), &lim).unwrap().len(), 8);
        let tight = Limits {
            max_perm_n: 3,
            ..lim
        };
        assert!(group_g(&space(Covering::hamming(4).unwrap(), 2), &tight).is_err());
    }

    #[test]
    fn respects_m_examples() {
        let f2 = gf(2);
        let cs = cov(5, &[&[1, 2, 3], &[3, 4, 5]]).class_structure();
        assert!(respects_m(&cs, &Matrix::identity(f2, 5)));
        let mut up = Matrix::identity(f2, 5);
        up.set(0, 2, 1); // row 1, column 3
        assert!(respects_m(&cs, &up));
        let f = cov(5, &[&[1, 2, 3], &[3, 4, 5]]);
        let table = WeightTable::new(&f, &Limits::default()).unwrap();
        assert!(preserves_weight(&table, &up, &Limits::default()).unwrap());
        let mut down = Matrix::identity(f2, 5);
        down.set(2, 0, 1); // row 3, column 1
        assert!(!respects_m(&cs, &down));
        let mut singular = Matrix::identity(f2, 5);
        singular.set(0, 0, 0);
        singular.set(0, 1, 1);
        singular.set(1, 1, 1);
        singular.set(1, 0, 0);
        assert!(!respects_m(&cs, &singular));
    }

    /// Brute-force oracle: filter all n x n matrices by `respects_m`.
    fn k_m_by_filter(cs: &ClassStructure, field: Field, n: usize) -> usize {
        let mut data = vec![0u8; n * n];
        let mut count = 0;
        loop {
            if respects_m(cs, &Matrix::new(field, n, n, data.clone()).unwrap()) {
                count += 1;
            }
            if !odometer_step(&mut data, field.q() as u8) {
                return count;
            }
        }
    }

    #[test]
    fn k_m_examples() {
        let lim = Limits::default();
        let cases = [
            (Covering::trivial(2).unwrap(), 6),
            (Covering::hamming(2).unwrap(), 1),
            (cov(4, &[&[1, 2], &[3, 4]]), 36),
            (cov(3, &[&[1, 2], &[2, 3]]), 4),
        ];
        for (f, expected) in cases {
            let s = space(f, 2);
            let k = group_k_m(&s, &lim).unwrap();
            assert_eq!(k.len(), expected, "{:?}", s.covering());
            assert_eq!(k_m_order(s.classes(), s.field()), Some(expected as u128));
            assert_eq!(k_m_by_filter(s.classes(), s.field(), s.n()), expected);
            assert!(k.iter().all(Isometry::certified));
        }
    }

    #[test]
    fn general_linear_orders() {
        assert_eq!(general_linear_order(2, 2), Some(6));
        assert_eq!(general_linear_order(3, 2), Some(168));
        assert_eq!(general_linear_order(4, 2), Some(20160));
        assert_eq!(general_linear_order(2, 3), Some(48));
    }

    #[test]
    fn full_group_examples() {
        let lim = Limits::default();
        let g = full_isometry_group(&space(Covering::hamming(2).unwrap(), 2), &lim).unwrap();
        assert_eq!(g.len(), 2);
        let g = full_isometry_group(&space(Covering::trivial(2).unwrap(), 2), &lim).unwrap();
        assert_eq!(g.len(), 6);
        let s = space(cov(4, &[&[1, 2], &[3, 4]]), 2);
        let g = full_isometry_group(&s, &lim).unwrap();
        assert_eq!(g.len(), 72);
        assert!(g.is_closed());
        assert_eq!(brute_force_isometries(&s, &lim).unwrap(), g);
        assert_eq!(FactoredGroup::new(&s, &lim).unwrap().group_order(), Some(72));
    }

    #[test]
    fn brute_force_examples() {
        let lim = Limits::default();
        assert_eq!(
            brute_force_isometries(&space(Covering::hamming(2).unwrap(), 2), &lim)
                .unwrap()
                .len(),
            2
        );
        assert_eq!(
            brute_force_isometries(&space(Covering::trivial(2).unwrap(), 2), &lim)
                .unwrap()
                .len(),
            6
        );
        let s = space(cov(3, &[&[1, 2], &[2, 3]]), 2);
        assert_eq!(
            brute_force_isometries(&s, &lim).unwrap(),
            full_isometry_group(&s, &lim).unwrap()
        );
    }

    #[test]
    fn decompose_examples() {
        let lim = Limits::default();
        let s = space(cov(3, &[&[1, 2], &[2, 3]]), 2);
        let perms = covering_permutations(s.covering(), &lim).unwrap();
        for phi in &perms {
            let (p, b) = decompose(&s, &perms, &phi.matrix(gf(2))).unwrap();
            assert_eq!(&p, phi);
            assert_eq!(b, Matrix::identity(gf(2), 3));
        }
        for k in group_k_m(&s, &lim).unwrap() {
            let (p, b) = decompose(&s, &perms, k.matrix()).unwrap();
            assert!(p.is_identity());
            assert_eq!(&b, k.matrix());
        }
        for t in brute_force_isometries(&s, &lim).unwrap().elements() {
            let (p, b) = decompose(&s, &perms, t).unwrap();
            assert_eq!(&p.matrix(gf(2)).mul(&b).unwrap(), t);
        }
        let not_iso = Matrix::from_int_rows(gf(2), &[vec![1, 0, 1], vec![0, 1, 0], vec![0, 0, 1]])
            .unwrap();
        assert_eq!(decompose(&s, &perms, &not_iso), Err(Error::NotDecomposable));
    }

    #[test]
    fn certify_rejects_non_isometries() {
        let s = space(Covering::hamming(2).unwrap(), 2);
        let m = Matrix::from_int_rows(gf(2), &[vec![1, 1], vec![0, 1]]).unwrap();
        assert_eq!(
            Isometry::certify(s.table(), m, &Limits::default()),
            Err(Error::NotAnIsometry)
        );
    }

    #[test]
    fn factored_search_agrees_with_explicit_scan() {
        let lim = Limits::default();
        for f in [
            cov(4, &[&[1, 2], &[3, 4]]),
            Covering::burst(4, 2).unwrap(),
            cov(4, &[&[1, 2, 3], &[3, 4]]),
            Covering::hamming(3).unwrap(),
        ] {
            let s = space(f, 2);
            let explicit = full_isometry_group(&s, &lim).unwrap();
            let factored = FactoredGroup::new(&s, &lim).unwrap();
            assert_eq!(factored.group_order(), Some(explicit.len() as u128));
            for m in explicit.elements() {
                assert!(factored.contains(m));
            }
            let n = s.n();
            let units: Vec<Vector> = (0..n).map(|i| Vector::unit(gf(2), n, i)).collect();
            // pairs of source/target vectors
            let vecs: Vec<Vector> = crate::gf::VectorIter::new(gf(2), n).collect();
            for x in &vecs {
                for y in &vecs {
                    let sources = [units[0].add(x), x.clone()];
                    let targets = [units[0].clone(), y.clone()];
                    let a = explicit.find_mapping(&sources, &targets).is_some();
                    let b = factored.find_mapping(&sources, &targets);
                    assert_eq!(a, b.is_some(), "{:?} {x} -> {y}", s.covering());
                    if let Some(t) = b {
                        assert!(explicit.contains(&t));
                    }
                }
            }
        }
    }

    #[test]
    fn generators_span_the_group() {
        let lim = Limits::default();
        for f in [cov(4, &[&[1, 2], &[3, 4]]), cov(3, &[&[1, 2], &[2, 3]])] {
            for q in [2, 3] {
                let s = space(f.clone(), q);
                let factored = FactoredGroup::new(&s, &lim).unwrap();
                let g = closure(gf(q), s.n(), factored.generators(), &lim).unwrap();
                assert_eq!(Some(g.len() as u128), factored.group_order());
            }
        }
    }

    #[test]
    fn cleared_images_lie_in_one_class() {
        let lim = Limits::default();
        let s = space(cov(5, &[&[1, 2, 3], &[3, 4, 5]]), 2);
        let g = full_isometry_group(&s, &lim).unwrap();
        for t in g.elements() {
            for i in 0..5 {
                assert!(cleared_image_class(s.classes(), t, i).is_some());
            }
        }
    }
}
