//! Finitely presented infinite causal strategies over `(o^k → o) → o`.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;

use crate::arena::{Arena, MoveId, Polarity, SimpleType};
use crate::causal::{expansions_of, Augmentation, CausalSource};
use crate::error::{Error, Result};
use crate::position::{canonicalize, enumerate_arena_positions, Position};

/// Where a positive state points: a fixed causal depth, or a number of
/// causal steps back.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum JustRef {
    Absolute(usize),
    Back(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegularState {
    pub display: MoveId,
    pub response: Option<usize>,
    pub receptions: Vec<usize>,
    pub just: Option<JustRef>,
}

#[derive(Clone, Debug)]
pub struct RegularCausalStrategy {
    arena: Arc<Arena>,
    states: Vec<RegularState>,
    root: usize,
    /// For systems of equations: the term each positive state stands for.
    terms: Vec<Option<usize>>,
    names: Vec<String>,
}

impl RegularCausalStrategy {
    pub fn new(arena: Arc<Arena>, states: Vec<RegularState>, root: usize) -> Result<RegularCausalStrategy> {
        let n = states.len();
        if root >= n || arena.parent(states[root].display).is_some() {
            return Err(Error::pre("root state must display an initial move"));
        }
        for (i, s) in states.iter().enumerate() {
            if s.display >= arena.len() {
                return Err(Error::invalid("display", vec![i], "move outside the arena"));
            }
            let pol = arena.polarity(s.display);
            let bad = |m: &str| Err(Error::invalid("regular", vec![i], m.to_string()));
            match pol {
                Polarity::Neg => {
                    if !s.receptions.is_empty() {
                        return bad("negative state with receptions");
                    }
                    if let Some(r) = s.response {
                        if r >= n || arena.polarity(states[r].display) != Polarity::Pos || states[r].just.is_none() {
                            return bad("response is not a justified positive state");
                        }
                    }
                }
                Polarity::Pos => {
                    if s.response.is_some() || s.just.is_none() {
                        return bad("positive state with a response or without pointer");
                    }
                    let mut seen = BTreeSet::new();
                    for &c in &s.receptions {
                        if c >= n || arena.parent(states[c].display) != Some(s.display) || !seen.insert(states[c].display) {
                            return bad("receptions must be distinct children of the display");
                        }
                    }
                    if seen.len() != arena.children(s.display).len() {
                        return bad("state is not receptive");
                    }
                }
            }
        }
        Ok(RegularCausalStrategy { arena, states, root, terms: vec![None; n], names: vec![] })
    }

    /// One state per head occurrence of `f : o^k → o`; `eqs[t]` lists the
    /// term (or `None` for ⊥) passed as each argument by term `t`.
    pub fn from_system(names: &[&str], eqs: &[Vec<Option<usize>>], start: usize) -> Result<RegularCausalStrategy> {
        let k = eqs.first().map_or(0, |e| e.len());
        if eqs.iter().any(|e| e.len() != k || e.iter().flatten().any(|&t| t >= eqs.len())) || start >= eqs.len() {
            return Err(Error::pre("malformed system of equations"));
        }
        let mut fty = SimpleType::O;
        for _ in 0..k {
            fty = SimpleType::arrow(SimpleType::O, fty);
        }
        let arena = Arc::new(SimpleType::arrow(fty, SimpleType::O).arena());
        let root = arena.root().expect("well-opened");
        let f = arena.children(root)[0];
        let args: Vec<MoveId> = arena.children(f).to_vec();
        let pos = |t: usize| 1 + t * (k + 1);
        let mut states = vec![RegularState { display: root, response: Some(pos(start)), receptions: vec![], just: None }];
        let mut terms = vec![None];
        for (t, eq) in eqs.iter().enumerate() {
            states.push(RegularState { display: f, response: None, receptions: (0..k).map(|i| pos(t) + 1 + i).collect(), just: Some(JustRef::Absolute(0)) });
            terms.push(Some(t));
            for i in 0..k {
                states.push(RegularState { display: args[i], response: eq[i].map(pos), receptions: vec![], just: None });
                terms.push(None);
            }
        }
        let mut s = RegularCausalStrategy::new(arena, states, 0)?;
        s.terms = terms;
        s.names = names.iter().map(|x| x.to_string()).collect();
        Ok(s)
    }

    fn system(start: usize) -> RegularCausalStrategy {
        let eqs = vec![vec![Some(1), Some(3)], vec![Some(2), Some(0)], vec![Some(2), None], vec![None, Some(3)]];
        RegularCausalStrategy::from_system(&["T1", "T2", "L", "R"], &eqs, start).expect("well-formed system")
    }

    /// `T1 = f T2 R`, with `T2 = f L T1`, `L = f L ⊥`, `R = f ⊥ R`.
    pub fn t1() -> RegularCausalStrategy {
        RegularCausalStrategy::system(0)
    }

    /// `T2 = f L T1`, same system as [`RegularCausalStrategy::t1`].
    pub fn t2() -> RegularCausalStrategy {
        RegularCausalStrategy::system(1)
    }

    pub fn states(&self) -> &[RegularState] {
        &self.states
    }

    pub fn term_name(&self, state: usize) -> Option<&str> {
        self.terms.get(state).copied().flatten().and_then(|t| self.names.get(t)).map(|s| s.as_str())
    }

    /// The finite causal strategy of all events at causal depth ≤ `2k`.
    pub fn unfold(&self, k: usize) -> Augmentation {
        let mut display = vec![];
        let mut just = vec![];
        let mut pred = vec![];
        let mut stack: Vec<(usize, Option<usize>, Vec<usize>)> = vec![(self.root, None, vec![])];
        while let Some((s, parent, mut chain)) = stack.pop() {
            let e = display.len();
            let d = chain.len();
            display.push(self.states[s].display);
            pred.push(parent);
            just.push(match (parent, self.states[s].just) {
                (None, _) => None,
                (Some(_), Some(_)) => Some(chain[self.justifier_depth(s, d)]),
                (Some(p), None) => Some(p),
            });
            chain.push(e);
            if d < 2 * k {
                let next: Vec<usize> = match self.states[s].response {
                    Some(r) => vec![r],
                    None => self.states[s].receptions.clone(),
                };
                for c in next.into_iter().rev() {
                    stack.push((c, Some(e), chain.clone()));
                }
            }
        }
        Augmentation::checked(self.arena.clone(), display, just, pred).expect("unfoldings are augmentations")
    }

    /// States of the events of `q` if `q` is a (+-covered when asked)
    /// expansion of this strategy.
    pub fn classify_expansion(&self, q: &Augmentation, plus_covered: bool) -> Option<Vec<usize>> {
        if **q.arena() != *self.arena || q.display(q.root()) != self.states[self.root].display {
            return None;
        }
        let mut st = vec![usize::MAX; q.len()];
        st[q.root()] = self.root;
        let chain_at = |e: usize, d: usize| {
            let mut x = e;
            while q.depth(x) > d {
                x = q.pred(x).unwrap();
            }
            x
        };
        for e in q.causal_order() {
            let s = &self.states[st[e]];
            if q.is_pos(e) {
                for &c in q.succ(e) {
                    st[c] = *s.receptions.iter().find(|&&r| self.states[r].display == q.display(c))?;
                }
            } else {
                match (s.response, q.succ(e)) {
                    (_, []) if !plus_covered || s.response.is_none() => {}
                    (Some(r), [b]) => {
                        let want = chain_at(e, self.justifier_depth(r, q.depth(*b)));
                        if q.display(*b) != self.states[r].display || q.just(*b) != Some(want) {
                            return None;
                        }
                        st[*b] = r;
                    }
                    _ => return None,
                }
            }
        }
        Some(st)
    }
}

impl CausalSource for RegularCausalStrategy {
    fn arena(&self) -> &Arc<Arena> {
        &self.arena
    }

    fn root_state(&self) -> usize {
        self.root
    }

    fn state_display(&self, s: usize) -> MoveId {
        self.states[s].display
    }

    fn response(&self, s: usize) -> Option<usize> {
        self.states[s].response
    }

    fn receptions(&self, s: usize) -> Vec<usize> {
        self.states[s].receptions.clone()
    }

    fn justifier_depth(&self, s: usize, depth: usize) -> usize {
        match self.states[s].just {
            Some(JustRef::Absolute(d)) => d,
            Some(JustRef::Back(r)) => depth.saturating_sub(r),
            None => depth.saturating_sub(1),
        }
    }
}

/// Builds a +-covered expansion of `src` reaching `pos`, for strategies of
/// the shape `(o^k → o) → o` whose Player moves all point to the root.
/// Bricks (a head move with its argument copies) are placed one at a time:
/// first where only they fit, then mixed bricks, then bricks that keep an
/// all-accepting slot open; leaves fill what remains.
pub fn greedy_realize(src: &RegularCausalStrategy, pos: &Position) -> Result<Augmentation> {
    let arena = src.arena.clone();
    let x = pos.to_configuration(&arena)?;
    let root = x.root();
    if x.display(root) != src.states[src.root].display {
        return Err(Error::pre("position has the wrong root"));
    }
    let k = src.states.iter().map(|s| s.receptions.len()).max().unwrap_or(0);
    let mut bricks: Vec<(usize, Vec<usize>)> = vec![];
    for &f in x.children(root) {
        let fs = &src.states[src.states[src.root].response.ok_or_else(|| Error::pre("root is never answered"))?];
        if x.display(f) != fs.display {
            return Err(Error::pre("unexpected move under the root"));
        }
        let mut c = vec![0; k];
        for &a in x.children(f) {
            let i = fs.receptions.iter().position(|&r| src.states[r].display == x.display(a)).ok_or_else(|| Error::pre("unknown argument move"))?;
            if !x.children(a).is_empty() {
                return Err(Error::pre("moves above argument moves are out of scope"));
            }
            c[i] += 1;
        }
        bricks.push((f, c));
    }
    // slot: (negative event, its state)
    let mut display = vec![x.display(root)];
    let mut just: Vec<Option<usize>> = vec![None];
    let mut pred: Vec<Option<usize>> = vec![None];
    let mut slots: Vec<(usize, usize)> = vec![(0, src.root)];
    let target = |s: usize| src.states[s].response;
    let accepts = |s: usize, c: &[usize]| {
        target(s).map_or(false, |p| c.iter().enumerate().all(|(i, &n)| n == 0 || target(src.states[p].receptions[i]).is_some()))
    };
    let universal = |p: usize| src.states[p].receptions.iter().all(|&r| target(r).is_some());
    let keeps_spine = |p: usize, c: &[usize]| {
        c.iter().enumerate().any(|(i, &n)| n > 0 && target(src.states[p].receptions[i]).map_or(false, universal))
    };
    let (mut inner, leaves): (Vec<_>, Vec<_>) = bricks.into_iter().partition(|(_, c)| c.iter().any(|&n| n > 0));
    inner.sort_by_key(|(_, c)| std::cmp::Reverse(c.iter().sum::<usize>()));
    while !inner.is_empty() {
        let pairs: Vec<(usize, usize)> = (0..inner.len())
            .flat_map(|b| (0..slots.len()).map(move |s| (b, s)))
            .filter(|&(b, s)| accepts(slots[s].1, &inner[b].1))
            .collect();
        let kinds = |b: usize| inner[b].1.iter().filter(|&&n| n > 0).count();
        let pick = pairs
            .iter()
            .find(|&&(_, s)| !universal(target(slots[s].1).unwrap()))
            .or_else(|| pairs.iter().find(|&&(b, _)| kinds(b) > 1))
            .or_else(|| pairs.iter().find(|&&(b, s)| keeps_spine(target(slots[s].1).unwrap(), &inner[b].1)))
            .or_else(|| pairs.first())
            .copied();
        let Some((b, s)) = pick else {
            return Err(Error::pre("greedy realization is stuck"));
        };
        let (_, c) = inner.swap_remove(b);
        let (slot_event, slot_state) = slots.swap_remove(s);
        let p = target(slot_state).unwrap();
        let fe = display.len();
        display.push(src.states[p].display);
        just.push(Some(0));
        pred.push(Some(slot_event));
        for (i, &n) in c.iter().enumerate() {
            let r = src.states[p].receptions[i];
            for _ in 0..n {
                slots.push((display.len(), r));
                display.push(src.states[r].display);
                just.push(Some(fe));
                pred.push(Some(fe));
            }
        }
    }
    if leaves.len() != slots.len() {
        return Err(Error::pre("position is not balanced"));
    }
    for (slot_event, slot_state) in slots {
        let p = target(slot_state).ok_or_else(|| Error::pre("a slot has no answer"))?;
        display.push(src.states[p].display);
        just.push(Some(0));
        pred.push(Some(slot_event));
    }
    let q = Augmentation::checked(arena, display, just, pred)?;
    if src.classify_expansion(&q, true).is_none() || canonicalize(&q.config()) != *pos {
        return Err(Error::pre("greedy realization produced a wrong expansion"));
    }
    Ok(q)
}

#[derive(Clone, Debug, Serialize)]
pub struct T1T2Report {
    pub bound: usize,
    pub unfold_depth: usize,
    /// The depth-limited unfoldings are isomorphic (expected: false).
    pub unfold_isomorphic: bool,
    /// Largest depth at which the unfoldings still agree.
    pub agree_up_to: usize,
    pub t1_positions: usize,
    pub t2_positions: usize,
    pub equal_positions: bool,
    pub arena_balanced: usize,
    /// Both position sets are exactly the balanced arena positions.
    pub all_balanced: bool,
    pub greedy_failures: Vec<Position>,
}

/// Compares the +-covered positions of `T1` and `T2` up to `bound` events
/// and checks that their unfoldings differ.
pub fn t1_t2_counterexample(bound: usize) -> Result<T1T2Report> {
    let (t1, t2) = (RegularCausalStrategy::t1(), RegularCausalStrategy::t2());
    let unfold_depth = 3;
    let unfold_isomorphic = t1.unfold(unfold_depth).iso(&t2.unfold(unfold_depth)).is_some();
    let agree_up_to = (0..=unfold_depth).take_while(|&k| t1.unfold(k).iso(&t2.unfold(k)).is_some()).last().unwrap_or(0);
    let positions = |s: &RegularCausalStrategy| -> BTreeSet<Position> {
        expansions_of(s, bound, true).iter().map(|(q, _)| canonicalize(&q.config())).collect()
    };
    let p1 = positions(&t1);
    let p2 = positions(&t2);
    let balanced: BTreeSet<Position> =
        enumerate_arena_positions(&t1.arena, bound).into_iter().filter(|p| p.is_balanced(&t1.arena)).collect();
    let mut greedy_failures = vec![];
    for p in &balanced {
        if greedy_realize(&t1, p).is_err() || greedy_realize(&t2, p).is_err() {
            greedy_failures.push(p.clone());
        }
    }
    Ok(T1T2Report {
        bound,
        unfold_depth,
        unfold_isomorphic,
        agree_up_to,
        t1_positions: p1.len(),
        t2_positions: p2.len(),
        equal_positions: p1 == p2,
        arena_balanced: balanced.len(),
        all_balanced: p1 == balanced && p2 == balanced,
        greedy_failures,
    })
}
