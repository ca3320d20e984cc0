use std::sync::Arc;

use proptest::prelude::*;

use cl15_core::calculus::{fixture_p1, fixture_p2, parse_proof};
use cl15_core::cirquent::parse_cirquent;
use cl15_core::formula::{parse_formula, Atom, Formula};
use cl15_core::games::interpret_formula;
use cl15_core::harness::identities::standard_cases;
use cl15_core::harness::random::{self, random_cirquent, random_formula, random_move, random_run, rng, Arena};
use cl15_core::harness::random_finite_interpretation;
use cl15_core::runs::{
    negate_run, parse_run, project_branch, project_cell, project_prefix, InfiniteBitstring, Labmove, Move, Player, Run,
};
use cl15_core::strategy::{pair, pair_n, unpair, unpair_n, MoveTranslator};

fn atoms() -> Vec<Atom> {
    ["P", "Q"].iter().map(|a| Atom::new(*a).unwrap()).collect()
}

fn arb_move() -> impl Strategy<Value = String> {
    "[a-z0-9][a-z0-9.;,]{0,7}"
}

fn arb_run() -> impl Strategy<Value = Run> {
    prop::collection::vec((any::<bool>(), arb_move()), 0..8).prop_map(|items| {
        items.into_iter().map(|(t, m)| Labmove::new(if t { Player::Top } else { Player::Bot }, m)).collect()
    })
}

/// Runs of prefix-, branch- and cell-shaped moves mixed together.
fn arb_structured_run() -> impl Strategy<Value = Run> {
    let mv = prop_oneof![
        (1u64..4, "[a-c]").prop_map(|(u, r)| format!("{u}.{r}")),
        ("[01]{0,3}", "[a-c]").prop_map(|(w, r)| format!("{w}.{r}")),
        (1usize..3, 0u64..3, 0u64..3, "[a-c]").prop_map(|(a, x, y, r)| format!("{a};{x},{y}.{r}")),
    ];
    prop::collection::vec((any::<bool>(), mv), 0..10).prop_map(|items| {
        items.into_iter().map(|(t, m)| Labmove::new(if t { Player::Top } else { Player::Bot }, m)).collect()
    })
}

fn arb_formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        prop::sample::select(vec!["P", "Q", "R"]).prop_map(Formula::atom),
        prop::sample::select(vec!["P", "Q", "R"]).prop_map(Formula::neg_atom),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::and(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::or(l, r)),
            inner.clone().prop_map(Formula::pst),
            inner.clone().prop_map(Formula::pcost),
            inner.clone().prop_map(Formula::st),
            inner.prop_map(Formula::cost),
        ]
    })
}

proptest! {
    #[test]
    fn run_text_round_trip(run in arb_run()) {
        prop_assert_eq!(parse_run(&run.to_text()).unwrap(), run);
    }

    #[test]
    fn formula_round_trip(f in arb_formula()) {
        prop_assert_eq!(parse_formula(&f.to_string()).unwrap(), f.clone());
        prop_assert_eq!(f.negate().negate(), f);
    }

    #[test]
    fn cirquent_round_trip(seed in any::<u64>()) {
        let c = random_cirquent(&mut rng(seed), &atoms(), 4, 2, 3);
        prop_assert_eq!(parse_cirquent(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn prefix_projection_is_homomorphic(a in arb_structured_run(), b in arb_structured_run(), u in 1u64..4) {
        let p = format!("{u}.");
        prop_assert_eq!(project_prefix(&a.concat(&b), &p), project_prefix(&a, &p).concat(&project_prefix(&b, &p)));
    }

    #[test]
    fn branch_projection_is_homomorphic(a in arb_structured_run(), b in arb_structured_run(), stem in "[01]{0,3}", tail in "[01]{1,2}") {
        let x = InfiniteBitstring::parse(&format!("{stem}:{tail}")).unwrap();
        prop_assert_eq!(project_branch(&a.concat(&b), &x), project_branch(&a, &x).concat(&project_branch(&b, &x)));
    }

    #[test]
    fn cell_projection_is_homomorphic(a in arb_structured_run(), b in arb_structured_run(), x in 1u64..3, y in 1u64..3) {
        let ab = project_cell(&a.concat(&b), 1, &[x, y]).unwrap();
        prop_assert_eq!(ab, project_cell(&a, 1, &[x, y]).unwrap().concat(&project_cell(&b, 1, &[x, y]).unwrap()));
    }

    #[test]
    fn projections_commute_with_negation(r in arb_structured_run(), u in 1u64..4, x in 1u64..3) {
        let p = format!("{u}.");
        prop_assert_eq!(negate_run(&project_prefix(&r, &p)), project_prefix(&negate_run(&r), &p));
        prop_assert_eq!(
            negate_run(&project_cell(&r, 2, &[x, x]).unwrap()),
            project_cell(&negate_run(&r), 2, &[x, x]).unwrap()
        );
    }

    #[test]
    fn nested_prefix_projection(r in arb_structured_run(), u in 1u64..4, v in 1u64..4) {
        let lifted: Run = r.iter().map(|lm| Labmove::new(lm.player, format!("{u}.{}", lm.mv))).collect();
        prop_assert_eq!(project_prefix(&project_prefix(&lifted, &format!("{u}.")), &format!("{v}.")), project_prefix(&r, &format!("{v}.")));
    }

    #[test]
    fn negation_is_duality(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = random_formula(&mut r, &atoms(), 3);
        let interp = random_finite_interpretation(&f.atoms(), 2, 2, seed);
        let alpha = random::alphabets(&interp);
        let run = random_run(&mut r, &Arena::Formula(f.clone()), &alpha, 6);
        let g = interpret_formula(&f, &interp).unwrap();
        let ng = interpret_formula(&f.negate(), &interp).unwrap();
        prop_assert_eq!(ng.is_legal(&negate_run(&run)), g.is_legal(&run));
        prop_assert_eq!(ng.winner(&negate_run(&run)), !g.winner(&run));
    }

    #[test]
    fn de_morgan(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (e, f) = (random_formula(&mut r, &atoms(), 2), random_formula(&mut r, &atoms(), 2));
        let and = Formula::and(e.clone(), f.clone());
        let dual = Formula::or(e.negate(), f.negate());
        let interp = random_finite_interpretation(&and.atoms(), 2, 2, seed);
        let run = random_run(&mut r, &Arena::Formula(and.clone()), &random::alphabets(&interp), 6);
        let g = interpret_formula(&and.negate(), &interp).unwrap();
        let h = interpret_formula(&dual, &interp).unwrap();
        prop_assert_eq!(g.is_legal(&run), h.is_legal(&run));
        prop_assert_eq!(g.winner(&run), h.winner(&run));
    }

    #[test]
    fn legality_is_prefix_closed_and_offender_loses(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = random_formula(&mut r, &atoms(), 3);
        let interp = random_finite_interpretation(&f.atoms(), 2, 2, seed);
        let run = random_run(&mut r, &Arena::Formula(f.clone()), &random::alphabets(&interp), 8);
        let g = interpret_formula(&f, &interp).unwrap();
        let first_bad = (1..=run.len()).find(|&n| !g.is_legal(&run.prefix(n)));
        match first_bad {
            None => prop_assert_eq!(g.winner(&run), g.legal_winner(&run)),
            Some(n) => {
                prop_assert!((n..=run.len()).all(|m| !g.is_legal(&run.prefix(m))));
                prop_assert_eq!(g.winner(&run), !run.labmoves()[n - 1].player);
            }
        }
    }

    #[test]
    fn translators_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        for case in standard_cases() {
            let interp = random_finite_interpretation(&case.outer.atoms(), 2, 2, seed);
            let alpha = random::alphabets(&interp);
            let outer = random_move(&mut r, &case.outer, &alpha);
            if let Some(inner) = case.translator.to_inner(&outer) {
                prop_assert_eq!(case.translator.to_outer(&inner), Some(outer), "{}", case.name);
            }
            let inner = random_move(&mut r, &case.inner, &alpha);
            if let Some(out) = case.translator.to_outer(&inner) {
                prop_assert_eq!(case.translator.to_inner(&out), Some(inner), "{}", case.name);
            }
        }
    }

    #[test]
    fn pairing_is_bijective(a in 1u64..100_000, b in 1u64..100_000, u in 1u64..1_000_000_000) {
        prop_assert_eq!(unpair(pair(a, b).unwrap()), Some((a, b)));
        let (x, y) = unpair(u).unwrap();
        prop_assert_eq!(pair(x, y), Some(u));
    }

    #[test]
    fn pairing_fold_is_injective(v in prop::collection::vec(1u64..20, 0..4)) {
        let u = pair_n(&v).unwrap();
        prop_assert_eq!(unpair_n(u, v.len()), Some(v));
    }
}

#[test]
fn pairing_small_values() {
    assert_eq!(pair(1, 1), Some(1));
    assert_eq!(pair(1, 2), Some(2));
    assert_eq!(pair(2, 1), Some(3));
    assert_eq!(pair_n(&[]), Some(1));
    let mut seen = std::collections::BTreeSet::new();
    for a in 1..=30 {
        for b in 1..=30 {
            assert!(seen.insert(pair(a, b).unwrap()));
        }
    }
}

#[test]
fn fixture_proofs_round_trip() {
    for p in [fixture_p1(), fixture_p2()] {
        assert_eq!(parse_proof(&p.to_text()).unwrap(), p);
    }
}

#[test]
fn interpretation_shared_across_threads() {
    let f = parse_formula("!P \\/ ?~P").unwrap();
    let interp = random_finite_interpretation(&f.atoms(), 2, 2, 3);
    let g = interpret_formula(&f, &interp).unwrap();
    let g2 = Arc::clone(&g);
    let run = Run::from_labmoves(vec![Labmove::bot(Move::new("1.1.a"))]);
    let expected = g.winner(&run);
    let handle = std::thread::spawn(move || g2.winner(&run));
    assert_eq!(handle.join().unwrap(), expected);
}
