use super::*;
use crate::causal::{caus, expansions_of, is_expansion};
use crate::samples::*;

#[test]
fn explanations_of_sample_positions() {
    let z2 = z_two_explanations();
    let ex = causal_explanations(&z2).unwrap();
    assert_eq!(ex.len(), 2);
    assert!(ex.iter().any(|q| q.iso(&kierstead_x_causal()).is_none()));
    let raw = search_expansions(&z2, Mode::Raw, Limits::default()).unwrap();
    assert!(raw.len() >= ex.len());
    let z1 = z_one_explanation();
    assert_eq!(causal_explanations(&z1).unwrap().len(), 1);
}

#[test]
fn expansion_search_agrees_with_enumeration() {
    let p = kierstead_x_causal();
    for (q, _) in expansions_of(&p, 9, true) {
        let found = search_expansions(&q.config(), Mode::Against(&p), Limits::default()).unwrap();
        assert!(found.iter().any(|r| r.iso(&q).is_some()));
        assert!(found.iter().all(|r| is_expansion(r, &p)));
    }
}

#[test]
fn characteristic_expansion_of_kierstead() {
    let p = kierstead_x_causal();
    let q = characteristic_expansion(&p).unwrap();
    assert!(is_characteristic(&q, &p));
    let mut cards: Vec<usize> = forks(&q).iter().map(|f| f.card()).collect();
    cards.sort_unstable();
    assert_eq!(cards[0], 1);
    assert!(cards.windows(2).all(|w| w[0] < w[1]));
    assert!(!is_characteristic(&p, &p) || forks(&p).len() == 1);
}

#[test]
fn decide_kierstead_terms() {
    let (x, y) = (kierstead_x_causal(), kierstead_y_causal());
    let r = decide_equality(&x, &y, 1 << 16).unwrap();
    assert!(!r.equal);
    assert!(r.separating.is_some());
    assert!(decide_equality(&y, &x, 1 << 16).map(|r| !r.equal).unwrap());
    let same = decide_equality(&x, &x, 1 << 16).unwrap();
    assert!(same.equal && same.iso.is_some());
    assert!(matches!(decide_equality(&x, &y, 3), Err(Error::Bound(_))));
}

#[test]
fn wide_expansion_copy_counts() {
    let sigma = kierstead_x();
    let s = sigma.maximal_pviews().remove(0);
    let q = wide_expansion(&sigma, &s).unwrap();
    assert_eq!(wide_copy_counts(&q), vec![1, 2, 2]);
    assert!(is_expansion(&q, &caus(&sigma).unwrap()));
    assert_eq!(tree_of_expansion(&q), Some(SimpleTree::t(2)));
}

#[test]
fn maximal_pview_transfer() {
    let sigma = strategy_of(BRANCHING_TERM);
    let same = maximal_pview_check(&sigma, &sigma, 1000).unwrap();
    assert!(same.transfer && same.shared && same.tree_is_t_n == Some(true));
    let short = maximal_pview_check(&sigma, &strategy_of(BRANCHING_SHORT_PRUNED), 1000).unwrap();
    assert!(short.transfer);
    let long = maximal_pview_check(&sigma, &strategy_of(BRANCHING_LONG_PRUNED), 1000).unwrap();
    assert!(!long.transfer);
}

#[test]
fn branching_term_is_not_positional() {
    let sigma = strategy_of(BRANCHING_TERM);
    let w = positionality_witness(&sigma, 8).unwrap();
    assert_eq!(w.sab.len(), w.ta.len() + 1);
    let arena = sigma.arena();
    assert_eq!(position_of(arena, &w.sab.prefix(w.sab.len() - 1)), position_of(arena, &w.ta));
    assert!(w.tab.as_ref().map(|t| position_of(arena, t)) != Some(position_of(arena, &w.sab)));
    assert!(positionality_witness(&kierstead_x(), 8).is_none());
}

#[test]
fn t1_t2_unfoldings() {
    let (t1, t2) = (RegularCausalStrategy::t1(), RegularCausalStrategy::t2());
    assert!(t1.unfold(2).iso(&t2.unfold(2)).is_some());
    assert!(t1.unfold(3).iso(&t2.unfold(3)).is_none());
    for k in 0..4 {
        assert!(t1.classify_expansion(&t1.unfold(k), false).is_some());
    }
}

#[test]
fn t1_t2_share_balanced_positions() {
    let r = t1_t2_counterexample(10).unwrap();
    assert!(!r.unfold_isomorphic);
    assert_eq!(r.agree_up_to, 2);
    assert!(r.equal_positions && r.all_balanced, "{r:?}");
    assert!(r.greedy_failures.is_empty(), "{:?}", r.greedy_failures);
}
