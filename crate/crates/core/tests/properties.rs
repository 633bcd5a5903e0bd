use std::cmp::Ordering;
use std::sync::OnceLock;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use invkb_core::distance::{element_distance, initial_word, weighted_distance};
use invkb_core::oracle::{coxeter_distance, lehmer_rank, lehmer_unrank, CayleyGraph, DistanceTable};
use invkb_core::perm::Permutation;
use invkb_core::presentation::{
    circular_presentation, coxeter_presentation, length_weighted_presentation, ModelFile, Precedence, Presentation,
};
use invkb_core::rewrite::{critical_pairs, interreduce, is_confluent, knuth_bendix, Limits, RewritingSystem};
use invkb_core::{Rational, Word};

fn complete(p: &Presentation) -> RewritingSystem {
    knuth_bendix(p, &p.generators().default_order(), Limits::default()).unwrap().0
}

fn linear5() -> &'static RewritingSystem {
    static SYS: OnceLock<RewritingSystem> = OnceLock::new();
    SYS.get_or_init(|| complete(&length_weighted_presentation(5, Precedence::WeightIJ).unwrap()))
}

fn perm(n: usize) -> impl Strategy<Value = Permutation> {
    Just((1..=n).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::from_images(&v).unwrap())
}

fn word(k: u16, max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(0..k, 0..=max).prop_map(Word)
}

proptest! {
    #[test]
    fn compose_is_associative(a in perm(6), b in perm(6), c in perm(6)) {
        prop_assert_eq!(a.then(&b).then(&c), a.then(&b.then(&c)));
    }

    #[test]
    fn inverse_cancels(a in perm(7)) {
        prop_assert!(a.then(&a.inverse()).is_identity());
        prop_assert!(a.inverse().then(&a).is_identity());
    }

    #[test]
    fn cycle_text_round_trips(a in perm(8)) {
        prop_assert_eq!(Permutation::parse(&a.to_string(), 8).unwrap(), a.clone());
        let one_line: Vec<String> = a.one_line().iter().map(|x| x.to_string()).collect();
        prop_assert_eq!(Permutation::parse(&one_line.join(" "), 8).unwrap(), a);
    }

    #[test]
    fn lehmer_round_trips(a in perm(8)) {
        prop_assert_eq!(lehmer_unrank(lehmer_rank(&a), 8), a);
    }

    #[test]
    fn order_is_compatible_with_concatenation(u in word(10, 8), v in word(10, 8), x in word(10, 4), y in word(10, 4)) {
        let ord = linear5().order();
        let c = ord.compare(&u, &v);
        let wrap = |w: &Word| x.concat(w).concat(&y);
        prop_assert_eq!(ord.compare(&wrap(&u), &wrap(&v)), c);
        prop_assert_eq!(ord.compare(&v, &u), c.reverse());
        if c == Ordering::Equal {
            prop_assert_eq!(u, v);
        }
    }

    #[test]
    fn reduction_is_sound_and_idempotent(w in word(10, 40)) {
        let sys = linear5();
        let r = sys.reduce(&w);
        prop_assert_eq!(sys.generators().evaluate(&r), sys.generators().evaluate(&w));
        prop_assert!(sys.is_irreducible(&r));
        prop_assert_eq!(sys.reduce(&r), r.clone());
        prop_assert!(sys.order().compare(&r, &w) != Ordering::Greater);
    }

    #[test]
    fn distance_is_symmetric(a in perm(5), b in perm(5)) {
        let sys = linear5();
        let ab = weighted_distance(&a, &b, sys).unwrap();
        let ba = weighted_distance(&b, &a, sys).unwrap();
        prop_assert_eq!(ab.value, ba.value);
        prop_assert_eq!(sys.generators().evaluate(&ab.witness).then(&a), b);
    }
}

#[test]
fn critical_pairs_are_balanced() {
    let sys = linear5();
    let rules: Vec<_> = sys.rules().map(|(_, r)| r.clone()).collect();
    let gens = sys.generators();
    let mut count = 0;
    for r1 in rules.iter().take(60) {
        for r2 in &rules {
            for (x, y) in critical_pairs(r1, r2) {
                assert_eq!(gens.evaluate(&x), gens.evaluate(&y));
                assert_eq!(sys.reduce(&x), sys.reduce(&y));
                count += 1;
            }
        }
    }
    assert!(count > 0);
}

#[test]
fn completed_systems_are_reduced() {
    for pres in [
        length_weighted_presentation(5, Precedence::WeightIJ).unwrap(),
        coxeter_presentation(5).unwrap(),
        circular_presentation(6).unwrap(),
    ] {
        let sys = complete(&pres);
        let rules: Vec<_> = sys.rules().map(|(_, r)| r.clone()).collect();
        for (i, r) in rules.iter().enumerate() {
            assert_eq!(sys.order().compare(&r.lhs, &r.rhs), Ordering::Greater);
            assert!(sys.is_irreducible(&r.rhs));
            for (j, s) in rules.iter().enumerate() {
                if i != j {
                    assert!(!r.lhs.contains_factor(s.lhs.letters()));
                }
            }
        }
        let again = interreduce(&sys);
        assert_eq!(again.len(), sys.len());
        for rel in pres.relations() {
            assert_eq!(sys.reduce(&rel.lhs), sys.reduce(&rel.rhs));
        }
    }
}

#[test]
fn pair_relators_alone_do_not_present_s3() {
    // three transpositions with pairwise products of order 3 generate an
    // infinite Coxeter group, so completion yields unboundedly many normal forms
    let pres = length_weighted_presentation(3, Precedence::WeightIJ).unwrap();
    let bare = Presentation::pair_relators_only(pres.generators().clone()).unwrap();
    let sys = complete(&bare);
    assert!(is_confluent(&sys).confluent);
    assert!(sys.normal_forms(1000).is_none());
    assert_eq!(complete(&pres).normal_forms(1000).map(|v| v.len()), Some(6));
}

#[test]
fn sampled_oracle_equivalence_n6_n7() {
    let mut rng = StdRng::seed_from_u64(7);
    for (n, samples) in [(6, 300), (7, 200)] {
        let pres = length_weighted_presentation(n, Precedence::WeightIJ).unwrap();
        let sys = complete(&pres);
        let table = DistanceTable::weighted(&CayleyGraph::new(pres.generators()).unwrap());
        let order: usize = (1..=n).product();
        for _ in 0..samples {
            let g = lehmer_unrank(rng.gen_range(0..order), n);
            assert_eq!(element_distance(&g, &sys).unwrap().value, table.get(&g).unwrap(), "{g}");
        }
    }
}

#[test]
fn coxeter_distance_matches_bubble_sort() {
    let pres = coxeter_presentation(5).unwrap();
    let sys = complete(&pres);
    for r in 0..120 {
        let g = lehmer_unrank(r, 5);
        let d = element_distance(&g, &sys).unwrap();
        assert_eq!(d.value, Rational::from_integer(coxeter_distance(&g) as i64));
        assert_eq!(initial_word(&g, pres.generators()).unwrap().len(), coxeter_distance(&g));
    }
}

#[test]
fn unit_oracle_lower_bounds_weighted_count() {
    let pres = length_weighted_presentation(5, Precedence::WeightIJ).unwrap();
    let sys = complete(&pres);
    let unit = DistanceTable::unit(&CayleyGraph::all_inversions(5, 8).unwrap());
    for r in 0..120 {
        let g = lehmer_unrank(r, 5);
        let steps = element_distance(&g, &sys).unwrap().witness.len() as i64;
        assert!(unit.get(&g).unwrap() <= Rational::from_integer(steps));
    }
}

#[test]
fn custom_model_with_rational_weights() {
    let text = r#"{"n": 4, "generators": [
        {"label": "a", "cycles": "(1,2)", "weight": "1/2"},
        {"label": "b", "cycles": "(2,3)", "weight": 1},
        {"label": "c", "cycles": "(3,4)", "weight": "1/2"},
        {"label": "x", "cycles": "(1,4)(2,3)", "weight": "3/2"}]}"#;
    let file: ModelFile = serde_json::from_str(text).unwrap();
    let pres = Presentation::from_model_file(&file).unwrap();
    let sys = complete(&pres);
    assert_eq!(sys.normal_forms(100).map(|v| v.len()), Some(24));
    let table = DistanceTable::weighted(&CayleyGraph::new(pres.generators()).unwrap());
    for r in 0..24 {
        let g = lehmer_unrank(r, 4);
        assert_eq!(element_distance(&g, &sys).unwrap().value, table.get(&g).unwrap());
    }
}
