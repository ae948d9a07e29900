//! Configurations, augmentations, causal strategies and expansions.

mod augmentation;
mod config;
mod expansion;

pub use augmentation::{Augmentation, Flags, RawAugmentation};
pub(crate) use augmentation::group_by;
pub use config::{Configuration, RawConfiguration};
pub use expansion::{build_from_shape, enumerate_expansions, enumerate_shapes, expansions_of, CausalSource, Shape};

use std::collections::HashMap;

use crate::arena::{MoveId, Polarity};
use crate::error::{Error, Result};
use crate::play::{Play, Strategy};

/// The causal strategy of a finite innocent strategy: its P-views and their
/// Opponent extensions, ordered by prefix.
pub fn caus(sigma: &Strategy) -> Result<Augmentation> {
    let arena = sigma.arena().clone();
    if !arena.is_well_opened() {
        return Err(Error::pre("caus needs a well-opened arena; decompose first"));
    }
    let mut index: HashMap<Play, usize> = HashMap::new();
    let mut display = Vec::new();
    let mut just = Vec::new();
    let mut pred = Vec::new();
    let mut stack: Vec<Play> = sigma.opponent_extensions(&Play::new());
    stack.reverse();
    while let Some(s) = stack.pop() {
        let n = s.len();
        let e = display.len();
        display.push(s.moves[n - 1]);
        pred.push(if n > 1 { Some(index[&s.prefix(n - 1)]) } else { None });
        just.push(s.just[n - 1].map(|j| index[&s.prefix(j + 1)]));
        index.insert(s.clone(), e);
        let next: Vec<Play> = if n % 2 == 1 {
            sigma.response(&s).map(|(m, j)| s.pushed(m, Some(j))).into_iter().collect()
        } else {
            sigma.opponent_extensions(&s)
        };
        stack.extend(next.into_iter().rev());
    }
    Augmentation::checked(arena, display, just, pred)
}

/// The unique morphism from `q` into the causal strategy `p`, if any.
pub fn find_morphism(q: &Augmentation, p: &Augmentation) -> Option<Vec<usize>> {
    if q.display(q.root()) != p.display(p.root()) {
        return None;
    }
    let mut phi = vec![usize::MAX; q.len()];
    phi[q.root()] = p.root();
    for e in q.causal_order() {
        let image = phi[e];
        for &c in q.succ(e) {
            let d = p.succ(image).iter().copied().find(|&d| {
                p.display(d) == q.display(c) && p.polarity(d) == q.polarity(c)
            })?;
            phi[c] = d;
        }
    }
    for e in 0..q.len() {
        if q.just(e).map(|j| phi[j]) != p.just(phi[e]) {
            return None;
        }
    }
    Some(phi)
}

/// `q` maps into `p` and never omits a Player answer available in `p`.
pub fn is_expansion(q: &Augmentation, p: &Augmentation) -> bool {
    let Some(phi) = find_morphism(q, p) else { return false };
    (0..q.len()).filter(|&a| !q.is_pos(a)).all(|a| {
        p.succ(phi[a]).iter().all(|&b| q.succ(a).iter().any(|&c| phi[c] == b))
    })
}

/// The expansion attached to a play: Player moves follow the previous move,
/// Opponent moves follow their justifier.
pub fn expansion_from_play(sigma: &Strategy, s: &Play) -> Result<Augmentation> {
    sigma.check_reachable(s)?;
    if s.is_empty() || s.len() % 2 == 1 || crate::play::initial_count(sigma.arena(), s) != 1 {
        return Err(Error::pre("expansion_from_play needs a nonempty even well-opened play"));
    }
    let arena = sigma.arena().clone();
    let pred: Vec<Option<usize>> = (0..s.len())
        .map(|i| match arena.polarity(s.moves[i]) {
            Polarity::Pos => Some(i - 1),
            Polarity::Neg => s.just[i],
        })
        .collect();
    let q = Augmentation::checked(arena, s.moves.clone(), s.just.clone(), pred)?;
    if !is_expansion(&q, &caus(sigma)?) {
        return Err(Error::pre("play does not yield an expansion of the strategy"));
    }
    Ok(q)
}

/// An alternating play realizing a +-covered augmentation. Returns the play
/// and the event played at each index.
pub fn sequentialize(q: &Augmentation) -> Result<(Play, Vec<usize>)> {
    fn segment(q: &Augmentation, a: usize, order: &mut Vec<usize>) -> Result<()> {
        order.push(a);
        let b = q.response(a).ok_or_else(|| Error::pre(format!("event {a} is a maximal Opponent event")))?;
        order.push(b);
        let mut negs: Vec<usize> = q.succ(b).to_vec();
        negs.sort_unstable();
        for c in negs {
            segment(q, c, order)?;
        }
        Ok(())
    }
    if q.is_pos(q.root()) {
        return Err(Error::pre("root must be negative"));
    }
    let mut order = Vec::with_capacity(q.len());
    segment(q, q.root(), &mut order)?;
    if order.len() != q.len() {
        return Err(Error::pre("augmentation is not sequentializable"));
    }
    let mut at = vec![0; q.len()];
    for (i, &e) in order.iter().enumerate() {
        at[e] = i;
    }
    let moves: Vec<MoveId> = order.iter().map(|&e| q.display(e)).collect();
    let just = order.iter().map(|&e| q.just(e).map(|j| at[j])).collect();
    Ok((Play { moves, just }, order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::{parse_simple_type, Arena};
    use crate::play::deseq_play;
    use crate::position::canonicalize;
    use std::sync::Arc;

    fn kier() -> Arc<Arena> {
        Arc::new(parse_simple_type("((o -> o) -> o) -> o").unwrap().0)
    }

    fn kx() -> Strategy {
        let s = Play::from_pairs(&[(0, None), (1, Some(0)), (2, Some(1)), (1, Some(0)), (2, Some(3)), (3, Some(2))]);
        Strategy::from_pviews(kier(), &[s]).unwrap()
    }

    #[test]
    fn caus_of_kx_is_a_six_event_chain() {
        let p = caus(&kx()).unwrap();
        assert_eq!(p.len(), 6);
        let f = p.classify();
        assert!(f.receptive && f.minus_linear && f.plus_covered);
        assert!(p.validate().is_empty());
        assert_eq!(find_morphism(&p, &p), Some((0..6).collect()));
        assert!(is_expansion(&p, &p));
    }

    #[test]
    fn identity_chain() {
        let a = Arc::new(parse_simple_type("o -> o").unwrap().0);
        let s = Strategy::from_pviews(a, &[Play::from_pairs(&[(0, None), (1, Some(0))])]).unwrap();
        let p = caus(&s).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.just(1), Some(0));
        let (play, _) = sequentialize(&p).unwrap();
        assert_eq!(play, Play::from_pairs(&[(0, None), (1, Some(0))]));
    }

    #[test]
    fn trailing_opponent_event_is_not_sequentializable() {
        let a = Arc::new(Arena::atom());
        let p = caus(&Strategy::minimal(a)).unwrap();
        assert_eq!(p.len(), 1);
        assert!(!p.classify().plus_covered);
        assert!(sequentialize(&p).is_err());
    }

    #[test]
    fn play_expansions_round_trip() {
        let sigma = kx();
        let p = caus(&sigma).unwrap();
        for s in sigma.plays(10) {
            let q = expansion_from_play(&sigma, &s).unwrap();
            assert!(is_expansion(&q, &p));
            let x = deseq_play(sigma.arena(), &s).unwrap();
            assert_eq!(canonicalize(&q.config()), canonicalize(&x));
            let (t, _) = sequentialize(&q).unwrap();
            let q2 = expansion_from_play(&sigma, &t).unwrap();
            assert_eq!(canonicalize(&q2.config()), canonicalize(&x));
        }
    }

    #[test]
    fn morphism_fails_on_foreign_display() {
        let a = kier();
        let p = caus(&kx()).unwrap();
        let q = Augmentation::checked(a, vec![0, 1, 2, 3], vec![None, Some(0), Some(1), Some(2)], vec![None, Some(0), Some(1), Some(2)]).unwrap();
        assert!(find_morphism(&q, &p).is_none());
    }
}
