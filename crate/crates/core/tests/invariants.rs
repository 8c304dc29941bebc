//! Property tests for invariants that hold on every input.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use liftkit::compose::{compose_block, composed_clause_count, ComposeOptions, CompositionLayout};
use liftkit::formula::{parse_dimacs, write_dimacs, BlockStructure, Clause, CnfFormula, Lit};
use liftkit::gadget::GadgetParams;
use liftkit::lab::partition::restore_partition;
use liftkit::lab::Real;
use liftkit::lift::lift_tree_refutation;
use liftkit::oracle::{conjunction_closure_width, min_block_width, min_depth, min_width, ClosureMeasure};
use liftkit::proof::cp::{derive_lines, CpMode, CpProof, CpStep};
use liftkit::sim::quadrant_select;

fn rational(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

fn clause_strategy(vars: u32) -> impl Strategy<Value = Clause> {
    prop::collection::btree_map(1..=vars, any::<bool>(), 1..=vars.min(3) as usize)
        .prop_map(|lits| Clause::new(lits.into_iter().map(|(v, p)| Lit::new(v, p))))
}

fn formula_strategy(max_vars: u32, max_clauses: usize) -> impl Strategy<Value = CnfFormula> {
    (1..=max_vars).prop_flat_map(move |n| {
        prop::collection::vec(clause_strategy(n), 1..=max_clauses).prop_map(move |cs| CnfFormula::new(n, cs).unwrap())
    })
}

fn falsified(c: &Clause, z: u32) -> bool {
    c.lits().iter().all(|l| (z >> (l.var() - 1) & 1 == 1) != l.is_positive())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dimacs_round_trips(f in formula_strategy(6, 8)) {
        let text = write_dimacs(&f);
        prop_assert_eq!(parse_dimacs(text.as_bytes()).unwrap(), f);
    }

    #[test]
    fn composed_clause_count_matches_composition(f in formula_strategy(4, 6), t in 1u32..=3) {
        let m = 1usize << t;
        let blocks = BlockStructure::singletons(f.var_count());
        let comp = compose_block(&f, &blocks, m, ComposeOptions::default()).unwrap();
        prop_assert_eq!(composed_clause_count(&f, &blocks, m), Some(comp.formula.len() as u128));
        prop_assert_eq!(comp.provenance.len(), comp.formula.len());
    }

    #[test]
    fn real_comparison_matches_logarithms(a in 1i64..200, b in 1i64..200, c in 1i64..200, d in 1i64..200) {
        let x = Real::log2(rational(a, b));
        let y = Real::log2(rational(c, d));
        let expected = (a * d).cmp(&(c * b));
        prop_assert_eq!(x.compare(&y), expected);
        prop_assert_eq!(y.compare(&x), expected.reverse());
        let sum = Real::log2(rational(a, b)) + Real::log2(rational(c, d));
        prop_assert_eq!(sum.compare(&Real::log2(rational(a * c, b * d))), Ordering::Equal);
    }

    #[test]
    fn real_roots_order_like_floats(p in 1i64..500, q in 1i64..500, n in 2u32..=4) {
        let r = Real::root(rational(p, 1), n);
        let s = Real::rat(rational(q, 7));
        let expected = (p as f64).powf(1.0 / n as f64).partial_cmp(&(q as f64 / 7.0)).unwrap();
        let exact = r.compare(&s);
        let pow_side = BigInt::from(p) * BigInt::from(7).pow(n);
        prop_assert_eq!(exact, pow_side.cmp(&BigInt::from(q).pow(n)));
        if ((p as f64).powf(1.0 / n as f64) - q as f64 / 7.0).abs() > 1e-9 {
            prop_assert_eq!(exact, expected);
        }
    }

    #[test]
    fn restoring_partition_passes_its_check(
        points in prop::collection::btree_set(prop::collection::vec(0usize..4, 3), 1..40),
    ) {
        let x: Vec<Vec<usize>> = points.into_iter().collect();
        let p = restore_partition(&x, 4, 3, &rational(19, 10)).unwrap();
        prop_assert!(p.check(&x).pass());
        let total: usize = p.parts.iter().map(|q| q.points.len()).sum();
        prop_assert_eq!(total, x.len());
    }

    #[test]
    fn quadrant_covers_a_quarter_on_one_side(
        xs in prop::collection::btree_set(0usize..6, 1..=6),
        ys in prop::collection::btree_set(0usize..6, 1..=6),
        a in prop::collection::vec(-20i64..20, 6),
        b in prop::collection::vec(-20i64..20, 6),
    ) {
        let xs: Vec<usize> = xs.into_iter().collect();
        let ys: Vec<usize> = ys.into_iter().collect();
        let ar: Vec<BigRational> = a.iter().map(|&v| rational(2 * v + 1, 2)).collect();
        let br: Vec<BigRational> = b.iter().map(|&v| rational(v, 1)).collect();
        let q = quadrant_select(&xs, &ys, &ar, &br).unwrap();
        prop_assert!(4 * q.x.len() * q.y.len() >= xs.len() * ys.len());
        for x in &q.x {
            prop_assert!(xs.contains(x));
            for y in &q.y {
                prop_assert!(ys.contains(y));
                prop_assert_eq!(ar[*x] < br[*y], q.inside);
            }
        }
    }

    #[test]
    fn cutting_planes_lines_hold_on_models(f in formula_strategy(6, 5), i in 0usize..5, j in 0usize..5, c1 in 0i64..4, c2 in 0i64..4) {
        let (i, j) = (i % f.len(), j % f.len());
        let mut steps = vec![CpStep::ClauseAxiom(i), CpStep::ClauseAxiom(j)];
        steps.push(CpStep::LinComb { i: 0, j: 1, c1: BigInt::from(c1), c2: BigInt::from(c2) });
        let proof = CpProof::new(steps.clone(), false);
        let lines = derive_lines(&f, &proof, CpMode::Syntactic, 0).unwrap();
        let mut all = lines.clone();
        if let Some(g) = lines[2].gcd() {
            steps.push(CpStep::Divide { i: 2, c: g });
            all = derive_lines(&f, &CpProof::new(steps, false), CpMode::Syntactic, 0).unwrap();
        }
        let n = f.var_count();
        for z in 0u32..1 << n {
            let point: Vec<bool> = (0..n).map(|k| z >> k & 1 == 1).collect();
            let model = [i, j].iter().all(|&k| !falsified(&f.clauses()[k], z));
            if model {
                for line in &all {
                    prop_assert!(line.eval(&point));
                }
            }
        }
    }

    #[test]
    fn lifted_trees_meet_the_depth_bound(f in formula_strategy(3, 10), t in 1u32..=2) {
        prop_assume!(!f.is_satisfiable());
        let m = 1usize << t;
        let w = min_depth(&f).unwrap();
        let layout = CompositionLayout::new(BlockStructure::singletons(f.var_count()), GadgetParams::new(m, 1).unwrap()).unwrap();
        let tree = lift_tree_refutation(&f, &w.tree, &layout).unwrap();
        prop_assert!(tree.depth() <= w.value * (t as usize + 1));
    }

    #[test]
    fn saturation_widths_match_exhaustive_dags(f in formula_strategy(4, 14), k in 0usize..3) {
        prop_assume!(!f.is_satisfiable());
        prop_assert_eq!(min_width(&f).unwrap().0, conjunction_closure_width(&f, ClosureMeasure::Width).unwrap());
        let n = f.var_count() as usize;
        let ell = [1, n, if n % 2 == 0 { 2 } else { 1 }][k];
        let blocks = BlockStructure::contiguous(n / ell, ell);
        prop_assert_eq!(
            min_block_width(&f, &blocks).unwrap().0,
            conjunction_closure_width(&f, ClosureMeasure::BlockWidth(&blocks)).unwrap()
        );
    }
}
