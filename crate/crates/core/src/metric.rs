//! The `F`-combinatorial weight and distance.
//!
//! `wt_F(x)` is the least number of basic sets whose union contains
//! `supp(x)`. It is computed exactly by iterative deepening over cover sizes,
//! branching at each level only on the basic sets that contain one fixed
//! uncovered coordinate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::covering::{ClassStructure, Covering};
use crate::gf::{Field, Vector, VectorIter};
use crate::{checked_pow, Error, Limits, Result};

/// Weight of any vector whose support is `mask`.
pub fn support_weight(f: &Covering, mask: u64) -> usize {
    min_cover(f.sets(), mask)
}

pub fn weight(f: &Covering, x: &Vector) -> usize {
    support_weight(f, x.support_mask())
}

pub fn distance(f: &Covering, x: &Vector, y: &Vector) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    Ok(weight(f, &x.sub(y)))
}

/// Largest weight in `F_q^n`, attained by any full-support vector.
pub fn max_weight(f: &Covering) -> usize {
    support_weight(f, f.full_mask())
}

/// Minimum number of `sets` covering `mask`. Every element of `mask` must lie
/// in some set.
pub fn min_cover(sets: &[u64], mask: u64) -> usize {
    if mask == 0 {
        return 0;
    }
    let relevant: Vec<u64> = sets.iter().copied().filter(|&s| s & mask != 0).collect();
    let widest = relevant
        .iter()
        .map(|&s| (s & mask).count_ones())
        .max()
        .unwrap_or(0);
    assert!(widest > 0, "mask is not coverable by the given sets");
    (1..=relevant.len())
        .find(|&budget| cover_within(mask, &relevant, budget, widest))
        .expect("a covering family covers every support")
}

fn cover_within(uncovered: u64, sets: &[u64], budget: usize, widest: u32) -> bool {
    if uncovered == 0 {
        return true;
    }
    if budget == 0 || uncovered.count_ones() > budget as u32 * widest {
        return false;
    }
    let pivot = uncovered.trailing_zeros();
    sets.iter()
        .filter(|&&s| (s >> pivot) & 1 == 1)
        .any(|&s| cover_within(uncovered & !s, sets, budget - 1, widest))
}

/// Precomputed weights of every support `mask < 2^n`.
///
/// Weight depends only on the support, so one table serves every `q`.
#[derive(Debug, Clone)]
pub struct WeightTable {
    n: usize,
    weights: Vec<u8>,
}

impl WeightTable {
    pub fn new(f: &Covering, limits: &Limits) -> Result<Self> {
        let n = f.n();
        limits.check_enum("weight table", checked_pow(2, n))?;
        let weights = (0..1u64 << n)
            .map(|mask| support_weight(f, mask) as u8)
            .collect();
        Ok(WeightTable { n, weights })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn of_mask(&self, mask: u64) -> usize {
        self.weights[mask as usize] as usize
    }

    #[inline]
    pub fn of_entries(&self, entries: &[u8]) -> usize {
        self.of_mask(crate::gf::support_mask(entries))
    }

    #[inline]
    pub fn weight(&self, x: &Vector) -> usize {
        self.of_mask(x.support_mask())
    }

    pub fn distance(&self, x: &Vector, y: &Vector) -> usize {
        self.weight(&x.sub(y))
    }

    pub fn max_weight(&self) -> usize {
        self.of_mask((1u64 << self.n) - 1)
    }
}

/// A covering over a fixed field, with its weight table and class structure.
#[derive(Debug, Clone)]
pub struct MetricSpace {
    covering: Covering,
    field: Field,
    table: WeightTable,
    classes: ClassStructure,
}

impl MetricSpace {
    pub fn new(covering: Covering, field: Field, limits: &Limits) -> Result<Self> {
        let table = WeightTable::new(&covering, limits)?;
        let classes = covering.class_structure();
        Ok(MetricSpace {
            covering,
            field,
            table,
            classes,
        })
    }

    #[inline]
    pub fn covering(&self) -> &Covering {
        &self.covering
    }

    #[inline]
    pub fn field(&self) -> Field {
        self.field
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.covering.n()
    }

    #[inline]
    pub fn table(&self) -> &WeightTable {
        &self.table
    }

    #[inline]
    pub fn classes(&self) -> &ClassStructure {
        &self.classes
    }

    #[inline]
    pub fn weight(&self, x: &Vector) -> usize {
        self.table.weight(x)
    }
}

/// Outcome of an exhaustive (or seeded sampled) metric-axiom check.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AxiomReport {
    pub pairs_checked: u64,
    pub triples_checked: u64,
    pub triples_sampled: bool,
    pub violations: Vec<String>,
}

impl AxiomReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks identity of indiscernibles and symmetry over all pairs of
/// `F_q^n`, and the triangle inequality over all triples when `q^{3n}` is at
/// most `triple_cap`, otherwise over `samples` triples drawn from a ChaCha8
/// stream seeded with `seed`.
pub fn check_axioms(
    table: &WeightTable,
    field: Field,
    triple_cap: u128,
    samples: u64,
    seed: u64,
    limits: &Limits,
) -> Result<AxiomReport> {
    let n = table.n();
    let count = limits.check_enum("vector enumeration", checked_pow(field.order(), n))?;
    limits.check_enum("pair enumeration", count.checked_mul(count))?;
    let vectors: Vec<Vector> = VectorIter::new(field, n).collect();
    let mut report = AxiomReport::default();
    for x in &vectors {
        for y in &vectors {
            report.pairs_checked += 1;
            let dxy = table.distance(x, y);
            if (dxy == 0) != (x == y) {
                report.violations.push(format!("d({x},{y}) = {dxy}"));
            }
            if dxy != table.distance(y, x) {
                report.violations.push(format!("d({x},{y}) != d({y},{x})"));
            }
        }
    }
    let triangle = |x: &Vector, y: &Vector, z: &Vector, report: &mut AxiomReport| {
        report.triples_checked += 1;
        let (dxz, dxy, dyz) = (table.distance(x, z), table.distance(x, y), table.distance(y, z));
        if dxz > dxy + dyz {
            report
                .violations
                .push(format!("d({x},{z}) = {dxz} > {dxy} + {dyz}"));
        }
    };
    let all_triples = count.checked_mul(count).and_then(|c| c.checked_mul(count));
    if all_triples.is_some_and(|t| t <= triple_cap) {
        for x in &vectors {
            for y in &vectors {
                for z in &vectors {
                    triangle(x, y, z, &mut report);
                }
            }
        }
    } else {
        report.triples_sampled = true;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let x = &vectors[rng.random_range(0..vectors.len())];
            let y = &vectors[rng.random_range(0..vectors.len())];
            let z = &vectors[rng.random_range(0..vectors.len())];
            triangle(x, y, z, &mut report);
        }
    }
    Ok(report)
}
