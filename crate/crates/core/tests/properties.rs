//! Randomized and exhaustive checks of module invariants that go beyond the
//! per-operation examples: closure laws, unimodular invariance, grammar
//! round-trips, and the bounded-search lattice oracle.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use gaschutz_core::abelian::{abelian_min_generators, lattice_tuple_generates, IntMatrix};
use gaschutz_core::perm::{ElementSet, Permutation, DEFAULT_ORDER_CAP};
use gaschutz_core::torus::SymbolicReal;

fn arb_perm(degree: usize) -> impl Strategy<Value = Permutation> {
    Just((0..degree).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|images| Permutation::from_images(images).expect("shuffled range"))
}

fn arb_gens() -> impl Strategy<Value = Vec<Permutation>> {
    (1usize..=5).prop_flat_map(|d| proptest::collection::vec(arb_perm(d), 1..=3))
}

proptest! {
    /// |<gens>| divides |<supergens>| whenever gens ⊆ supergens.
    #[test]
    fn closure_order_is_monotone_by_divisibility(gens in arb_gens(), keep in 0usize..=3) {
        let sub = &gens[..keep.min(gens.len())];
        let small = ElementSet::close(sub, DEFAULT_ORDER_CAP).unwrap();
        let large = ElementSet::close(&gens, DEFAULT_ORDER_CAP).unwrap();
        prop_assert_eq!(large.len() % small.len(), 0);
    }

    /// Adjoining an element of the closure never changes the closure.
    #[test]
    fn closure_absorbs_its_members(gens in arb_gens(), pick in any::<proptest::sample::Index>()) {
        let closed = ElementSet::close(&gens, DEFAULT_ORDER_CAP).unwrap();
        let member = closed.elements()[pick.index(closed.len())].clone();
        let mut extended = gens.clone();
        extended.push(member);
        let again = ElementSet::close(&extended, DEFAULT_ORDER_CAP).unwrap();
        prop_assert_eq!(closed, again);
    }
}

fn arb_matrix() -> impl Strategy<Value = IntMatrix> {
    (1usize..=4, 0usize..=4).prop_flat_map(|(rows, cols)| {
        proptest::collection::vec(-9i64..=9, rows * cols).prop_map(move |entries| {
            IntMatrix::from_entries(rows, cols, entries.into_iter().map(BigInt::from).collect())
                .expect("sized to fit")
        })
    })
}

/// One elementary unimodular operation, encoded for random generation.
#[derive(Clone, Debug)]
enum ElementaryOp {
    SwapRows(usize, usize),
    SwapCols(usize, usize),
    AddRow {
        target: usize,
        source: usize,
        factor: i64,
    },
    AddCol {
        target: usize,
        source: usize,
        factor: i64,
    },
    NegateRow(usize),
}

fn apply_op(m: &IntMatrix, op: &ElementaryOp) -> IntMatrix {
    let mut out = m.clone();
    let (rows, cols) = (m.rows(), m.cols());
    match *op {
        ElementaryOp::SwapRows(a, b) if rows > 0 => {
            let (a, b) = (a % rows, b % rows);
            for j in 0..cols {
                let x = out.get(a, j).clone();
                out.set(a, j, out.get(b, j).clone());
                out.set(b, j, x);
            }
        }
        ElementaryOp::SwapCols(a, b) if cols > 0 => {
            let (a, b) = (a % cols, b % cols);
            for i in 0..rows {
                let x = out.get(i, a).clone();
                out.set(i, a, out.get(i, b).clone());
                out.set(i, b, x);
            }
        }
        ElementaryOp::AddRow {
            target,
            source,
            factor,
        } if rows > 1 => {
            let target = target % rows;
            let mut source = source % rows;
            if source == target {
                source = (source + 1) % rows;
            }
            for j in 0..cols {
                let x = out.get(target, j) + BigInt::from(factor) * out.get(source, j);
                out.set(target, j, x);
            }
        }
        ElementaryOp::AddCol {
            target,
            source,
            factor,
        } if cols > 1 => {
            let target = target % cols;
            let mut source = source % cols;
            if source == target {
                source = (source + 1) % cols;
            }
            for i in 0..rows {
                let x = out.get(i, target) + BigInt::from(factor) * out.get(i, source);
                out.set(i, target, x);
            }
        }
        ElementaryOp::NegateRow(a) if rows > 0 => {
            let a = a % rows;
            for j in 0..cols {
                let x = -out.get(a, j).clone();
                out.set(a, j, x);
            }
        }
        _ => {}
    }
    out
}

fn arb_op() -> impl Strategy<Value = ElementaryOp> {
    prop_oneof![
        (any::<usize>(), any::<usize>()).prop_map(|(a, b)| ElementaryOp::SwapRows(a, b)),
        (any::<usize>(), any::<usize>()).prop_map(|(a, b)| ElementaryOp::SwapCols(a, b)),
        (any::<usize>(), any::<usize>(), -3i64..=3).prop_map(|(t, s, f)| ElementaryOp::AddRow {
            target: t,
            source: s,
            factor: f
        }),
        (any::<usize>(), any::<usize>(), -3i64..=3).prop_map(|(t, s, f)| ElementaryOp::AddCol {
            target: t,
            source: s,
            factor: f
        }),
        any::<usize>().prop_map(ElementaryOp::NegateRow),
    ]
}

proptest! {
    /// The minimal generator count of the presented group is invariant under
    /// unimodular row and column operations on the presentation.
    #[test]
    fn min_generators_invariant_under_unimodular_ops(
        m in arb_matrix(),
        ops in proptest::collection::vec(arb_op(), 0..=6),
    ) {
        let transformed = ops.iter().fold(m.clone(), |acc, op| apply_op(&acc, op));
        prop_assert_eq!(abelian_min_generators(&m), abelian_min_generators(&transformed));
    }
}

fn arb_rational() -> impl Strategy<Value = BigRational> {
    (-9i64..=9, 1i64..=9).prop_map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
}

fn arb_symbolic() -> impl Strategy<Value = SymbolicReal> {
    (
        arb_rational(),
        proptest::collection::btree_map(1usize..=4, arb_rational(), 0..=3),
    )
        .prop_map(|(q, terms)| SymbolicReal::new(q, terms.into_iter().collect::<BTreeMap<_, _>>()))
}

proptest! {
    /// The symbolic-real literal grammar round-trips through printing.
    #[test]
    fn symbolic_literal_round_trips(x in arb_symbolic()) {
        let reparsed: SymbolicReal = x.to_string().parse().unwrap();
        prop_assert_eq!(reparsed, x);
    }
}

mod lattice_oracle {
    use super::*;

    fn det(a: &[i64; 2], b: &[i64; 2]) -> i64 {
        a[0] * b[1] - a[1] * b[0]
    }

    /// Can `e` be written as an integer combination of the tuple?
    ///
    /// For two independent vectors the Cramer solution is integral or there
    /// is none. With a third vector `w` and pair determinant `D`, note
    /// `D·w` already lies in the pair's lattice, so the third coefficient
    /// only matters modulo |D|; scanning 0..|D| (|D| <= 18 for entries
    /// bounded by 3) is therefore exhaustive.
    fn reaches(tuple: &[[i64; 2]], e: [i64; 2]) -> bool {
        let pair = (0..tuple.len())
            .flat_map(|i| (i + 1..tuple.len()).map(move |j| (i, j)))
            .find(|&(i, j)| det(&tuple[i], &tuple[j]) != 0);
        let Some((i, j)) = pair else { return false };
        let d = det(&tuple[i], &tuple[j]);
        let rest: Vec<[i64; 2]> = (0..tuple.len())
            .filter(|&t| t != i && t != j)
            .map(|t| tuple[t])
            .collect();
        let solvable_over_pair = |target: [i64; 2]| -> bool {
            det(&target, &tuple[j]) % d == 0 && det(&tuple[i], &target) % d == 0
        };
        match rest.as_slice() {
            [] => solvable_over_pair(e),
            [w] => (0..d.abs())
                .any(|gamma| solvable_over_pair([e[0] - gamma * w[0], e[1] - gamma * w[1]])),
            _ => unreachable!("tuples have length <= 3"),
        }
    }

    fn oracle_generates_z2(tuple: &[[i64; 2]]) -> bool {
        reaches(tuple, [1, 0]) && reaches(tuple, [0, 1])
    }

    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }

    fn as_big(tuple: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
        tuple
            .iter()
            .map(|v| v.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    /// Exhaustive agreement with the gcd oracle on Z.
    #[test]
    fn rank_one_matches_gcd_oracle() {
        let values: Vec<i64> = (-3..=3).collect();
        let mut tuples: Vec<Vec<Vec<i64>>> = Vec::new();
        for &a in &values {
            tuples.push(vec![vec![a]]);
            for &b in &values {
                tuples.push(vec![vec![a], vec![b]]);
                for &c in &values {
                    tuples.push(vec![vec![a], vec![b], vec![c]]);
                }
            }
        }
        for tuple in tuples {
            let expected = tuple.iter().map(|v| v[0]).fold(0, gcd) == 1;
            let got = lattice_tuple_generates(1, &as_big(&tuple)).unwrap();
            assert_eq!(got, expected, "tuple {tuple:?}");
        }
    }

    /// Exhaustive agreement with the bounded Cramer-search oracle on Z^2 for
    /// tuples of up to three vectors with entries bounded by 3.
    #[test]
    fn rank_two_matches_bounded_search_oracle() {
        let mut vectors: Vec<[i64; 2]> = Vec::new();
        for x in -3..=3 {
            for y in -3..=3 {
                vectors.push([x, y]);
            }
        }
        let check = |tuple: &[[i64; 2]]| {
            let as_vecs: Vec<Vec<i64>> = tuple.iter().map(|v| v.to_vec()).collect();
            let got = lattice_tuple_generates(2, &as_big(&as_vecs)).unwrap();
            assert_eq!(got, oracle_generates_z2(tuple), "tuple {tuple:?}");
        };
        for &a in &vectors {
            check(&[a]);
            for &b in &vectors {
                check(&[a, b]);
                for &c in &vectors {
                    check(&[a, b, c]);
                }
            }
        }
    }
}
