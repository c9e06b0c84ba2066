use proptest::prelude::*;
use starsurg_core::dualize::dual_cap;
use starsurg_core::embedder::{complement_euler, enumerate};
use starsurg_core::lefschetz::{euler_char, homology};
use starsurg_core::mcg::{
    act, equal, f_factorization, g_factorization, generalized_lantern, linking_matrix,
    proof_replay, ConvexTwist, Factorization,
};
use starsurg_core::plumbing::{make_dgamma, make_p};
use starsurg_core::substitution::{
    canonical_word, reachable, rule_set, MoveSet, ReachBudget, Reachability,
};

fn budget(max_depth: usize, max_states: usize) -> ReachBudget {
    ReachBudget {
        max_depth,
        max_states,
    }
}

fn check_path(start: &Factorization, r: &Reachability) {
    let Reachability::Reached { path } = r else {
        panic!("not reached: {r}");
    };
    let nf = act(start).unwrap();
    for step in path {
        assert!(step.word.is_positive());
        assert_eq!(act(&step.word).unwrap(), nf, "{}", step.rule);
    }
}

#[test]
fn generalized_lantern_from_daisies() {
    let g4 = generalized_lantern(4).unwrap();
    let rules = rule_set("daisy", 3).unwrap();
    let fwd = reachable(
        &g4.lhs,
        &g4.rhs,
        &rules,
        budget(4, 10_000),
        MoveSet::default(),
    )
    .unwrap();
    check_path(&g4.lhs, &fwd);
    let back = reachable(
        &g4.rhs,
        &g4.lhs,
        &rules,
        budget(4, 10_000),
        MoveSet::default(),
    )
    .unwrap();
    check_path(&g4.rhs, &back);
    let (Reachability::Reached { path: p }, Reachability::Reached { path: q }) = (&fwd, &back)
    else {
        unreachable!()
    };
    assert_eq!(p.len(), q.len());
}

#[test]
fn lantern_substitution_is_one_step() {
    let f = f_factorization(1, 1).unwrap();
    let g = g_factorization(1, 1).unwrap();
    let rules = rule_set("lantern", 2).unwrap();
    for (s, t) in [(&f, &g), (&g, &f)] {
        let r = reachable(s, t, &rules, budget(3, 1000), MoveSet::default()).unwrap();
        check_path(s, &r);
        let Reachability::Reached { path } = r else {
            unreachable!()
        };
        assert_eq!(path.len(), 1);
    }
}

#[test]
fn f22_to_g22_is_exhausted() {
    let f = f_factorization(2, 2).unwrap();
    let g = g_factorization(2, 2).unwrap();
    let rules = rule_set("lantern,daisy", 4).unwrap();
    let r = reachable(&f, &g, &rules, budget(6, 100_000), MoveSet::default()).unwrap();
    let Reachability::Exhausted(stats) = &r else {
        panic!("unexpected path: {r}");
    };
    assert!(stats.explored >= 1);
    assert!(r.to_string().contains("not a proof"));
    let back = reachable(&g, &f, &rules, budget(6, 100_000), MoveSet::default()).unwrap();
    assert!(!back.is_reached());
}

#[test]
fn hurwitz_moves_preserve_monodromy() {
    let g4 = generalized_lantern(4).unwrap();
    let rules = rule_set("lantern", 2).unwrap();
    let moves = MoveSet { hurwitz: true };
    let r = reachable(&g4.lhs, &g4.rhs, &rules, budget(5, 20_000), moves).unwrap();
    if r.is_reached() {
        check_path(&g4.lhs, &r);
    }
}

#[test]
fn replay_cases() {
    for (m, n) in [(1, 1), (2, 2)] {
        let d = proof_replay(m, n).unwrap();
        let nf = act(&d.f).unwrap();
        for s in &d.steps {
            assert_eq!(act(&s.word).unwrap(), nf);
        }
        assert_eq!(d.steps.last().unwrap().word, d.meeting);
    }
}

#[test]
fn invariants_match_the_embeddings() {
    for a in 2..=5usize {
        for b in 2..=5usize {
            let f = f_factorization(a, b).unwrap();
            let g = g_factorization(a, b).unwrap();
            let p = make_p(a as i64, b as i64).unwrap();
            assert_eq!(euler_char(&f).unwrap(), p.euler_characteristic());
            assert_eq!(
                euler_char(&f).unwrap() - euler_char(&g).unwrap(),
                (a * b) as i64
            );
            assert_eq!(homology(&g).unwrap().b1, 0);
            if a <= 4 && b <= 4 {
                let cap = make_dgamma(a as i64, b as i64).unwrap();
                let embs = enumerate(&cap).unwrap();
                assert_eq!(
                    complement_euler(&cap, &embs[1]).unwrap(),
                    euler_char(&g).unwrap()
                );
            }
        }
    }
    assert!(dual_cap(&make_p(2, 2).unwrap())
        .unwrap()
        .is_isomorphic(&make_dgamma(2, 2).unwrap()));
}

fn arb_subset(n: usize) -> impl Strategy<Value = ConvexTwist> {
    (1usize..(1 << n)).prop_map(move |s| {
        ConvexTwist::positive((1..=n).filter(|h| s & (1 << (h - 1)) != 0)).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn canonical_form_ignores_commuting_shuffles(
        word in prop::collection::vec(arb_subset(5), 0..9),
        swaps in prop::collection::vec(0usize..8, 0..20),
    ) {
        let mut shuffled = word.clone();
        for s in swaps {
            if s + 1 < shuffled.len() {
                let (a, b) = (&shuffled[s], &shuffled[s + 1]);
                if a == b || starsurg_core::mcg::curves_commute(a.holes(), b.holes()) {
                    shuffled.swap(s, s + 1);
                }
            }
        }
        prop_assert_eq!(canonical_word(&word), canonical_word(&shuffled));
        let f = Factorization::new(5, word.clone()).unwrap();
        let c = Factorization::new(5, canonical_word(&word)).unwrap();
        prop_assert!(equal(&f, &c).unwrap());
        let h = Factorization::new(5, shuffled).unwrap();
        prop_assert_eq!(homology(&f).unwrap(), homology(&h).unwrap());
        prop_assert_eq!(linking_matrix(&f), linking_matrix(&h));
    }
}
