//! Recovering causal strategies from positions: characteristic and wide
//! expansions, the equality decision, and the counterexamples around it.

mod regular;
mod search;
mod trees;

pub use regular::{
    greedy_realize, t1_t2_counterexample, JustRef, RegularCausalStrategy, RegularState, T1T2Report,
};
pub use search::{search_expansions, Limits, Mode};
pub use trees::{max_tree_search, t_size, tree_of_expansion, SimpleTree, TreeSearch};

use std::sync::Arc;

use serde::Serialize;

use crate::arena::Arena;
use crate::bisim::forks;
use crate::causal::{caus, find_morphism, is_expansion, Augmentation};
use crate::error::{Error, Result};
use crate::play::{deseq_play, Play, Strategy};
use crate::position::{canonicalize, Position};

/// Largest expansion built before giving up.
pub const DEFAULT_MAX_EVENTS: usize = 1 << 20;

struct Builder {
    display: Vec<usize>,
    just: Vec<Option<usize>>,
    pred: Vec<Option<usize>>,
    cap: usize,
}

impl Builder {
    fn new(cap: usize) -> Builder {
        Builder { display: vec![], just: vec![], pred: vec![], cap }
    }

    fn push(&mut self, m: usize, just: Option<usize>, pred: Option<usize>) -> Result<usize> {
        if self.display.len() >= self.cap {
            return Err(Error::Bound(format!("expansion larger than {} events", self.cap)));
        }
        self.display.push(m);
        self.just.push(just);
        self.pred.push(pred);
        Ok(self.display.len() - 1)
    }

    fn finish(self, arena: &Arc<Arena>) -> Result<Augmentation> {
        Augmentation::checked(arena.clone(), self.display, self.just, self.pred)
    }
}

/// The minus-obsessional expansion of a finite causal strategy whose reception
/// forks carry pairwise distinct powers of two (the root fork counts as 2^0;
/// exponents are handed out depth-first).
pub fn characteristic_expansion(p: &Augmentation) -> Result<Augmentation> {
    characteristic_expansion_bounded(p, DEFAULT_MAX_EVENTS)
}

pub fn characteristic_expansion_bounded(p: &Augmentation, max_events: usize) -> Result<Augmentation> {
    if !p.is_causal_strategy() {
        return Err(Error::pre("characteristic expansions need a causal strategy"));
    }
    struct Walk<'a> {
        p: &'a Augmentation,
        b: Builder,
        chain: Vec<usize>,
        next: u32,
    }
    impl Walk<'_> {
        fn neg(&mut self, s: usize, parent: Option<usize>) -> Result<()> {
            let e = self.b.push(self.p.display(s), parent, parent)?;
            self.chain.push(e);
            if let Some(r) = self.p.response(s) {
                self.pos(r, e)?;
            }
            self.chain.pop();
            Ok(())
        }
        fn pos(&mut self, r: usize, parent: usize) -> Result<()> {
            let jd = self.p.depth(self.p.just(r).expect("positive events are justified"));
            let e = self.b.push(self.p.display(r), Some(self.chain[jd]), Some(parent))?;
            self.chain.push(e);
            let mut recs: Vec<usize> = self.p.succ(r).to_vec();
            recs.sort_by_key(|&c| self.p.display(c));
            for c in recs {
                let k = self.next;
                self.next += 1;
                if k >= usize::BITS - 1 || (1usize << k) > self.b.cap {
                    return Err(Error::Bound(format!("fork of 2^{k} copies")));
                }
                for _ in 0..(1usize << k) {
                    self.neg(c, Some(e))?;
                }
            }
            self.chain.pop();
            Ok(())
        }
    }
    let mut w = Walk { p, b: Builder::new(max_events), chain: vec![], next: 1 };
    w.neg(p.root(), None)?;
    w.b.finish(p.arena())
}

/// `q` is a minus-obsessional expansion of `p` whose forks have pairwise
/// distinct cardinalities, all powers of two.
pub fn is_characteristic(q: &Augmentation, p: &Augmentation) -> bool {
    if !is_expansion(q, p) || !q.is_minus_obsessional() {
        return false;
    }
    let mut cards: Vec<usize> = forks(q).iter().map(|f| f.card()).collect();
    let n = cards.len();
    cards.sort_unstable();
    cards.dedup();
    cards.len() == n && cards.iter().all(|c| c.is_power_of_two())
}

/// Every causal strategy explaining a position (as a consistent
/// augmentation of it), up to isomorphism.
pub fn causal_explanations(x: &crate::causal::Configuration) -> Result<Vec<Augmentation>> {
    search_expansions(x, Mode::Consistent, Limits::default())
}

#[derive(Clone, Debug, Serialize)]
pub struct EqualityReport {
    pub equal: bool,
    /// Event map from the first strategy onto the second.
    pub iso: Option<Vec<usize>>,
    /// A position of the first strategy the second cannot reach.
    pub separating: Option<Position>,
    pub probe_events: usize,
    /// Both strategies are total, so the answer is backed by the theory.
    pub total: bool,
}

/// Decides `p1 ≅ p2` through positions only: the characteristic expansion
/// of `p1` is matched against the expansions of `p2`.
pub fn decide_equality(p1: &Augmentation, p2: &Augmentation, max_events: usize) -> Result<EqualityReport> {
    if **p1.arena() != **p2.arena() {
        return Err(Error::pre("strategies live on different arenas"));
    }
    if !p2.is_causal_strategy() {
        return Err(Error::pre("second argument is not a causal strategy"));
    }
    let q1 = characteristic_expansion_bounded(p1, max_events)?;
    let x = q1.config();
    let found = search_expansions(&x, Mode::Against(p2), Limits { results: 1, ..Limits::default() })?;
    let total = p1.classify().total && p2.classify().total;
    if found.is_empty() {
        return Ok(EqualityReport { equal: false, iso: None, separating: Some(canonicalize(&x)), probe_events: q1.len(), total });
    }
    let iso = p1.iso(p2);
    Ok(EqualityReport { equal: iso.is_some(), iso, separating: None, probe_events: q1.len(), total })
}

/// Even P-view as the causal chain it describes: Opponent moves follow the
/// preceding Player move, and the fork under the k-th Player move holds
/// n-k copies of the next Opponent move.
pub fn wide_expansion(sigma: &Strategy, s: &Play) -> Result<Augmentation> {
    if s.is_empty() || s.len() % 2 == 1 || !sigma.contains_pview(s) {
        return Err(Error::pre("wide expansions need a nonempty even P-view of the strategy"));
    }
    let n = s.len() / 2 - 1;
    let mut b = Builder::new(DEFAULT_MAX_EVENTS);
    fn go(s: &Play, n: usize, i: usize, parent: Option<usize>, chain: &mut Vec<usize>, b: &mut Builder) -> Result<()> {
        let o = b.push(s.moves[i], parent, parent)?;
        chain.push(o);
        let j = chain[s.just[i + 1].expect("player moves point")];
        let p = b.push(s.moves[i + 1], Some(j), Some(o))?;
        chain.push(p);
        if i + 2 < s.len() {
            let k = i / 2 + 1;
            for _ in 0..(n - k + 1) {
                go(s, n, i + 2, Some(p), chain, b)?;
            }
        }
        chain.truncate(chain.len() - 2);
        Ok(())
    }
    go(s, n, 0, None, &mut vec![], &mut b)?;
    b.finish(sigma.arena())
}

/// Number of positive events at each Player depth of an expansion.
pub fn wide_copy_counts(q: &Augmentation) -> Vec<usize> {
    let mut out = Vec::new();
    for e in 0..q.len() {
        if q.is_pos(e) {
            let k = q.depth(e) / 2;
            if out.len() <= k {
                out.resize(k + 1, 0);
            }
            out[k] += 1;
        }
    }
    out
}

/// The P-view of a causal strategy ending at event `e`.
pub fn pview_of_event(p: &Augmentation, e: usize) -> Play {
    let chain = p.chain(e);
    let idx = |x: usize| chain.iter().position(|&c| c == x).expect("justifiers lie on the chain");
    Play { moves: chain.iter().map(|&c| p.display(c)).collect(), just: chain.iter().map(|&c| p.just(c).map(idx)).collect() }
}

#[derive(Clone, Debug, Serialize)]
pub struct PviewReport {
    pub probe: Play,
    pub n: usize,
    pub wide_events: usize,
    /// The wide position is reached by the second strategy.
    pub transfer: bool,
    pub tree_is_t_n: Option<bool>,
    /// The maximal P-view read back from the matching expansion.
    pub recovered: Option<Play>,
    pub shared: bool,
}

/// Wide-expands a longest P-view of `s1` and looks for the same position
/// among the expansions of `s2`; on success reads the P-view back.
pub fn maximal_pview_check(s1: &Strategy, s2: &Strategy, max_events: usize) -> Result<PviewReport> {
    let probe = s1
        .maximal_pviews()
        .into_iter()
        .max_by_key(|p| p.len())
        .ok_or_else(|| Error::pre("the first strategy has no P-view"))?;
    let n = probe.len() / 2 - 1;
    let q1 = wide_expansion(s1, &probe)?;
    if q1.len() > max_events {
        return Err(Error::Bound(format!("wide expansion has {} events", q1.len())));
    }
    let p2 = caus(s2)?;
    let found = search_expansions(&q1.config(), Mode::Against(&p2), Limits { results: 1, ..Limits::default() })?;
    let Some(q2) = found.into_iter().next() else {
        return Ok(PviewReport { probe, n, wide_events: q1.len(), transfer: false, tree_is_t_n: None, recovered: None, shared: false });
    };
    let tree = tree_of_expansion(&q2);
    let tree_is_t_n = tree.as_ref().map(|t| *t == SimpleTree::t(n));
    let phi = find_morphism(&q2, &p2).ok_or_else(|| Error::pre("match is not an expansion"))?;
    let mut e = q2.root();
    while let Some(&c) = q2.succ(e).iter().max_by_key(|&&c| q2.co_depth(c)) {
        e = c;
    }
    let recovered = pview_of_event(&p2, phi[e]);
    let shared = recovered == probe;
    Ok(PviewReport { probe, n, wide_events: q1.len(), transfer: true, tree_is_t_n, recovered: Some(recovered), shared })
}

#[derive(Clone, Debug, Serialize)]
pub struct PositionalityWitness {
    pub sab: Play,
    pub ta: Play,
    /// The strategy's answer to `ta`, if any.
    pub tab: Option<Play>,
    pub position: Position,
}

fn position_of(arena: &Arc<Arena>, s: &Play) -> Position {
    canonicalize(&deseq_play(arena, s).expect("plays are well-opened"))
}

/// Two plays reaching the same position where the strategy's next move
/// leads to different positions (or only one of them is answered).
pub fn positionality_witness(sigma: &Strategy, max_len: usize) -> Option<PositionalityWitness> {
    let arena = sigma.arena();
    let all = sigma.closure(max_len);
    let mut odd: Vec<(Position, &Play)> = all.iter().filter(|s| s.len() % 2 == 1).map(|s| (position_of(arena, s), s)).collect();
    odd.sort_by(|a, b| (a.1.len(), a.1).cmp(&(b.1.len(), b.1)));
    let mut even: Vec<&Play> = all.iter().filter(|s| s.len() % 2 == 0 && !s.is_empty()).collect();
    even.sort_by(|a, b| (a.len(), *a).cmp(&(b.len(), *b)));
    for sab in even {
        let sa = sab.prefix(sab.len() - 1);
        let pos_sa = position_of(arena, &sa);
        let target = position_of(arena, sab);
        for (pos, ta) in &odd {
            if **ta == sa || *pos != pos_sa {
                continue;
            }
            let tab = sigma.innocent_extend(ta).ok().flatten();
            if tab.as_ref().map(|t| position_of(arena, t)) != Some(target.clone()) {
                return Some(PositionalityWitness { sab: sab.clone(), ta: (*ta).clone(), tab, position: pos_sa });
            }
        }
    }
    None
}

#[cfg(test)]
mod tests;
