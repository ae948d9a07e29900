use std::sync::OnceLock;

use proptest::prelude::*;

use hog_core::bisim::{bisim_iso, bisimilar, clone_classes, is_clone, minimal_context, Context};
use hog_core::causal::{caus, expansions_of, is_expansion, Augmentation};
use hog_core::inject::{
    causal_explanations, characteristic_expansion, decide_equality, is_characteristic, search_expansions, Limits, Mode,
};
use hog_core::position::config_iso;
use hog_core::samples::corpus;

struct Fixture {
    types: Vec<&'static str>,
    causal: Vec<Augmentation>,
    characteristic: Vec<Augmentation>,
    /// (strategy index, expansion)
    expansions: Vec<(usize, Augmentation)>,
    /// Augmentations on the same positions that need not be expansions.
    wirings: Vec<(usize, Augmentation)>,
}

fn fixture() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let all = corpus();
        let types = all.iter().map(|(t, _)| *t).collect();
        let causal: Vec<Augmentation> = all.iter().map(|(_, s)| caus(s).unwrap()).collect();
        let characteristic = causal.iter().map(|p| characteristic_expansion(p).unwrap()).collect();
        let mut expansions = vec![];
        let mut wirings = vec![];
        for (i, p) in causal.iter().enumerate() {
            for (q, _) in expansions_of(p, 10, false) {
                for w in search_expansions(&q.config(), Mode::Raw, Limits::default()).unwrap() {
                    wirings.push((i, w));
                }
                expansions.push((i, q));
            }
        }
        Fixture { types, causal, characteristic, expansions, wirings }
    })
}

fn permutation(n: usize, root: usize, seed: u64) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut s = seed | 1;
    for i in (1..n).rev() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        perm.swap(i, (s % (i as u64 + 1)) as usize);
    }
    let r = perm.iter().position(|&x| x == root).unwrap();
    perm.swap(r, root);
    perm
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn characteristic_expansions_are_characteristic(i in 0usize..22) {
        let f = fixture();
        let i = i % f.causal.len();
        prop_assert!(is_characteristic(&f.characteristic[i], &f.causal[i]));
    }

    #[test]
    fn characteristic_events_clone_their_images(i in 0usize..22, seed in any::<u64>()) {
        let f = fixture();
        let i = i % f.causal.len();
        let q1 = &f.characteristic[i];
        let q2 = q1.permuted(&permutation(q1.len(), q1.root(), seed));
        let phi = config_iso(&q1.config(), &q2.config()).unwrap();
        prop_assert!(is_characteristic(&q2, &f.causal[i]));
        for a in (0..q1.len()).filter(|&a| q1.is_pos(a)).take(24) {
            prop_assert!(is_clone(q1, &q2, &phi, a, phi[a]));
        }
    }

    #[test]
    fn obsessional_expansions_are_the_bisimilar_ones(k in any::<prop::sample::Index>()) {
        let f = fixture();
        let (i, q) = &f.wirings[k.index(f.wirings.len())];
        let p = &f.causal[*i];
        prop_assert_eq!(is_expansion(q, p) && q.is_minus_obsessional(), bisimilar(q, p));
    }

    #[test]
    fn decision_is_symmetric(k in any::<prop::sample::Index>()) {
        let f = fixture();
        let n = f.causal.len();
        let pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| f.types[i] == f.types[j]).collect();
        let (i, j) = pairs[k.index(pairs.len())];
        let a = decide_equality(&f.causal[i], &f.causal[j], 1 << 16).unwrap();
        let b = decide_equality(&f.causal[j], &f.causal[i], 1 << 16).unwrap();
        prop_assert_eq!(a.equal, b.equal);
        if i == j {
            prop_assert!(a.equal);
        }
    }

    #[test]
    fn clones_share_display_and_co_depth(k in any::<prop::sample::Index>()) {
        let f = fixture();
        let (_, q) = &f.expansions[k.index(f.expansions.len())];
        let id: Vec<usize> = (0..q.len()).collect();
        for class in clone_classes(q) {
            for &b in &class[1..] {
                prop_assert_eq!(q.display(class[0]), q.display(b));
                prop_assert_eq!(q.co_depth(class[0]), q.co_depth(b));
                prop_assert!(is_clone(q, q, &id, class[0], b));
            }
        }
    }

    #[test]
    fn minimal_contexts_are_minimal(i in 0usize..22, seed in any::<u64>()) {
        let f = fixture();
        let q1 = &f.characteristic[i % f.causal.len()];
        prop_assume!(q1.len() <= 200);
        let q2 = q1.permuted(&permutation(q1.len(), q1.root(), seed));
        let phi = config_iso(&q1.config(), &q2.config()).unwrap();
        for a in (0..q1.len()).filter(|&a| q1.is_pos(a)).take(6) {
            let Some(w) = hog_core::bisim::clone_witness(q1, &q2, &phi, a, phi[a]) else { continue };
            let m = minimal_context(q1, &q2, &phi, a, phi[a], &w).unwrap();
            prop_assert!(bisim_iso(q1, &q2, &phi, a, phi[a], &m));
            for (c, d) in m.pairs() {
                let smaller = m.restrict(|x, y| (x, y) != (c, d));
                prop_assert!(!bisim_iso(q1, &q2, &phi, a, phi[a], &smaller));
            }
        }
    }
}

#[test]
fn characteristic_positions_have_bisimilar_explanations() {
    let f = fixture();
    for q in f.characteristic.iter().filter(|q| q.len() <= 40) {
        let ex = causal_explanations(&q.config()).unwrap();
        assert!(!ex.is_empty());
        for a in &ex {
            for b in &ex {
                assert!(bisimilar(a, b));
            }
        }
    }
}

#[test]
fn contexts_compose() {
    let g = Context::from_pairs(&[(1, 2), (3, 4)]).unwrap();
    let h = Context::from_pairs(&[(2, 5)]).unwrap();
    assert_eq!(g.then(&h).pairs(), vec![(1, 5)]);
    assert_eq!(g.inverse().inverse(), g);
}

#[test]
fn wirings_include_both_verdicts() {
    let f = fixture();
    let verdicts: Vec<bool> = f.wirings.iter().map(|(i, q)| bisimilar(q, &f.causal[*i])).collect();
    assert!(verdicts.contains(&true) && verdicts.contains(&false));
}
