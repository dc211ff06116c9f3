use combmetric::metric::{distance, weight};
use combmetric::{Covering, Field, LinearCode, Limits, Matrix, MetricSpace, Vector};
use proptest::prelude::*;

const PRIMES: [u32; 4] = [2, 3, 5, 7];

fn field() -> impl Strategy<Value = Field> {
    prop::sample::select(&PRIMES[..]).prop_map(|q| Field::new(q).unwrap())
}

/// A covering of [n] from random masks, padded with singletons for anything left uncovered.
fn covering(max_n: usize) -> impl Strategy<Value = Covering> {
    (1..=max_n).prop_flat_map(|n| {
        let full = (1u64 << n) - 1;
        prop::collection::vec(1..=full, 1..6).prop_map(move |mut raw| {
            let union = raw.iter().fold(0, |u, &s| u | s);
            for i in 0..n {
                if union >> i & 1 == 0 {
                    raw.push(1 << i);
                }
            }
            Covering::from_masks(n, &raw).unwrap()
        })
    })
}

fn vector(f: Field, n: usize) -> impl Strategy<Value = Vector> {
    prop::collection::vec(0..f.q() as i64, n).prop_map(move |e| Vector::from_ints(f, &e))
}

fn matrix(f: Field, rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(prop::collection::vec(0..f.q() as i64, cols), rows)
        .prop_map(move |r| Matrix::from_int_rows(f, &r).unwrap())
}

// Smallest number of basic sets whose union contains the support, by trying all subfamilies.
fn naive_weight(f: &Covering, x: &Vector) -> usize {
    let supp = x.support_mask();
    let sets = f.sets();
    (0u32..1 << sets.len())
        .filter(|pick| {
            let u = (0..sets.len())
                .filter(|i| pick >> i & 1 == 1)
                .fold(0, |u, i| u | sets[i]);
            supp & !u == 0
        })
        .map(|pick| pick.count_ones() as usize)
        .min()
        .unwrap()
}

proptest! {
    #[test]
    fn field_axioms(f in field(), a in 0u8..7, b in 0u8..7, c in 0u8..7) {
        let q = f.q() as u8;
        let (a, b, c) = (a % q, b % q, c % q);
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.sub(f.add(a, b), b), a);
        prop_assert_eq!(f.add(a, f.neg(a)), 0);
        if a != 0 {
            prop_assert_eq!(f.mul(a, f.inv(a)), 1);
        }
    }

    #[test]
    fn nullspace_is_orthogonal_and_complementary(
        m in (field(), 1usize..4, 1usize..6).prop_flat_map(|(f, r, c)| matrix(f, r, c))
    ) {
        let k = m.nullspace();
        prop_assert_eq!(m.rank() + k.rows(), m.cols());
        for r in 0..m.rows() {
            for s in 0..k.rows() {
                prop_assert_eq!(m.row_vector(r).dot(&k.row_vector(s)), 0);
            }
        }
        let (e, _) = m.rref();
        prop_assert_eq!(LinearCode::from_matrix(&e), LinearCode::from_matrix(&m));
    }

    #[test]
    fn invert_round_trip(
        (f, m) in (field(), 1usize..5).prop_flat_map(|(f, n)| (Just(f), matrix(f, n, n)))
    ) {
        match m.invert() {
            Ok(inv) => prop_assert_eq!(m.mul(&inv).unwrap(), Matrix::identity(f, m.rows())),
            Err(_) => prop_assert!(m.rank() < m.rows()),
        }
    }

    #[test]
    fn normalization_is_idempotent(c in covering(6)) {
        let again = Covering::from_masks(c.n(), c.sets()).unwrap();
        prop_assert_eq!(again.sets(), c.sets());
        prop_assert!(again.dropped().is_empty());
        for &a in c.sets() {
            for &b in c.sets() {
                prop_assert!(a == b || a & !b != 0);
            }
        }
    }

    #[test]
    fn weight_matches_naive_cover(
        (c, x) in (covering(6), field())
            .prop_flat_map(|(c, f)| { let n = c.n(); (Just(c), vector(f, n)) })
    ) {
        prop_assert_eq!(weight(&c, &x), naive_weight(&c, &x));
        let space = MetricSpace::new(c.clone(), x.field(), &Limits::default()).unwrap();
        prop_assert_eq!(space.weight(&x), weight(&c, &x));
    }

    #[test]
    fn distance_is_a_metric(
        (c, x, y, z) in (covering(6), field()).prop_flat_map(|(c, f)| {
            let n = c.n();
            (Just(c), vector(f, n), vector(f, n), vector(f, n))
        })
    ) {
        let d = |a: &Vector, b: &Vector| distance(&c, a, b).unwrap();
        prop_assert_eq!(d(&x, &x), 0);
        prop_assert_eq!(d(&x, &y), d(&y, &x));
        prop_assert_eq!(d(&x, &y) == 0, x == y);
        prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z));
        prop_assert_eq!(d(&x, &y), d(&x.add(&z), &y.add(&z)));
    }

    #[test]
    fn weight_is_monotone_in_support(
        (c, x, drop) in (covering(6), field())
            .prop_flat_map(|(c, f)| { let n = c.n(); (Just(c), vector(f, n), any::<u64>()) })
    ) {
        let mut y = x.clone();
        for i in 0..y.len() {
            if drop >> i & 1 == 1 {
                y.set(i, 0);
            }
        }
        prop_assert!(weight(&c, &y) <= weight(&c, &x));
    }

    #[test]
    fn dual_is_an_involution(
        m in (field(), 1usize..4, 1usize..6).prop_flat_map(|(f, r, c)| matrix(f, r, c))
    ) {
        let code = LinearCode::from_matrix(&m);
        let dual = code.dual();
        prop_assert_eq!(code.dim() + dual.dim(), code.n());
        prop_assert_eq!(dual.dual(), code.clone());
        for v in code.basis() {
            for w in dual.basis() {
                prop_assert_eq!(v.dot(&w), 0);
            }
        }
    }
}

mod isometries {
    use super::*;
    use combmetric::isometry::{
        brute_force_isometries, covering_permutations, decompose, full_isometry_group,
    };
    use combmetric::Isometry;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        // Generated elements preserve weight, sit inside the brute-force group and split as
        // a covering permutation times a block matrix.
        #[test]
        fn generated_group_is_certified(c in covering(3)) {
            let lim = Limits::default();
            let f = Field::new(3).unwrap();
            let space = MetricSpace::new(c, f, &lim).unwrap();
            let group = full_isometry_group(&space, &lim).unwrap();
            for t in group.elements() {
                let cert = Isometry::certify(space.table(), t.clone(), &lim);
                prop_assert!(cert.is_ok());
            }
            let brute = brute_force_isometries(&space, &lim).unwrap();
            for t in group.elements() {
                prop_assert!(brute.contains(t));
            }
            let perms = covering_permutations(space.covering(), &lim).unwrap();
            for t in group.elements() {
                prop_assert!(decompose(&space, &perms, t).is_ok());
            }
        }
    }
}
