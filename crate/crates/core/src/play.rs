//! Justified sequences, P-views and innocent strategies stored as
//! P-view forests.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arena::{Arena, MoveId, Polarity};
use crate::causal::Configuration;
use crate::error::{Error, Result, Violation};

/// A sequence of moves, each with an optional pointer to an earlier index.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Play {
    pub moves: Vec<MoveId>,
    pub just: Vec<Option<usize>>,
}

impl Play {
    pub fn new() -> Play {
        Play::default()
    }

    pub fn from_pairs(pairs: &[(MoveId, Option<usize>)]) -> Play {
        Play { moves: pairs.iter().map(|p| p.0).collect(), just: pairs.iter().map(|p| p.1).collect() }
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn prefix(&self, k: usize) -> Play {
        Play { moves: self.moves[..k].to_vec(), just: self.just[..k].to_vec() }
    }

    pub fn pushed(&self, m: MoveId, j: Option<usize>) -> Play {
        let mut p = self.clone();
        p.moves.push(m);
        p.just.push(j);
        p
    }

    pub fn is_prefix_of(&self, other: &Play) -> bool {
        self.len() <= other.len()
            && self.moves[..] == other.moves[..self.len()]
            && self.just[..] == other.just[..self.len()]
    }
}

/// Checks the play laws: pointers go back, rigid, alternating, legal.
pub fn validate_play(arena: &Arena, raw: &Play) -> Result<Play> {
    let mut v = Vec::new();
    if raw.moves.len() != raw.just.len() {
        return Err(Error::invalid("shape", vec![], "moves and just differ in length"));
    }
    for i in 0..raw.len() {
        let m = raw.moves[i];
        if m >= arena.len() {
            v.push(Violation::new("shape", vec![i], format!("unknown move {m}")));
            continue;
        }
        match raw.just[i] {
            Some(j) if j >= i => v.push(Violation::new("rigid", vec![i, j], "pointer does not go back")),
            Some(j) if raw.moves[j] >= arena.len() || arena.parent(m) != Some(raw.moves[j]) => {
                v.push(Violation::new("rigid", vec![i, j], "justifier is not the arena parent"))
            }
            None if !arena.is_minimal(m) => v.push(Violation::new("legal", vec![i], "non-initial move without pointer")),
            _ => {}
        }
        if i > 0 && raw.moves[i - 1] < arena.len() && arena.polarity(raw.moves[i - 1]) == arena.polarity(m) {
            v.push(Violation::new("alternating", vec![i - 1, i], "consecutive moves of equal polarity"));
        }
        if i == 0 && arena.polarity(m) != Polarity::Neg {
            v.push(Violation::new("alternating", vec![0], "play starts with a Player move"));
        }
    }
    if v.is_empty() {
        Ok(raw.clone())
    } else {
        Err(Error::Invalid(v))
    }
}

/// Indices of `s` that survive in the P-view of each prefix.
fn view_table(arena: &Arena, s: &Play) -> Vec<Option<Vec<usize>>> {
    let mut views: Vec<Option<Vec<usize>>> = Vec::with_capacity(s.len());
    for i in 0..s.len() {
        let m = s.moves[i];
        let v = if arena.is_minimal(m) {
            Some(vec![i])
        } else if arena.polarity(m) == Polarity::Pos {
            match (i.checked_sub(1).and_then(|k| views[k].as_ref()), s.just[i]) {
                (Some(prev), Some(j)) if prev.contains(&j) => {
                    let mut v = prev.clone();
                    v.push(i);
                    Some(v)
                }
                _ => None,
            }
        } else {
            s.just[i].and_then(|j| views[j].as_ref()).map(|v| {
                let mut v = v.clone();
                v.push(i);
                v
            })
        };
        views.push(v);
    }
    views
}

/// Indices of `s` forming its P-view; `None` if undefined.
pub fn pview_indices(arena: &Arena, s: &Play) -> Option<Vec<usize>> {
    if s.is_empty() {
        return Some(vec![]);
    }
    view_table(arena, s).pop().unwrap()
}

fn restrict(s: &Play, idx: &[usize]) -> Play {
    let pos: BTreeMap<usize, usize> = idx.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    Play {
        moves: idx.iter().map(|&i| s.moves[i]).collect(),
        just: idx.iter().map(|&i| s.just[i].and_then(|j| pos.get(&j).copied())).collect(),
    }
}

pub fn pview(arena: &Arena, s: &Play) -> Option<Play> {
    pview_indices(arena, s).map(|idx| restrict(s, &idx))
}

pub fn is_visible(arena: &Arena, s: &Play) -> bool {
    view_table(arena, s).iter().all(|v| v.is_some())
}

pub fn initial_count(arena: &Arena, s: &Play) -> usize {
    s.moves.iter().filter(|&&m| arena.is_minimal(m)).count()
}

/// The configuration of a well-opened play: events are indices, ordered by pointers.
pub fn deseq_play(arena: &Arc<Arena>, s: &Play) -> Result<Configuration> {
    if initial_count(arena, s) != 1 || s.is_empty() {
        return Err(Error::pre("desequentialization needs exactly one initial move"));
    }
    Configuration::new(arena.clone(), s.moves.clone(), s.just.clone())
}

/// An innocent strategy, as the map from odd P-views to Player responses
/// (the move and the index of its justifier in the P-view).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strategy {
    arena: Arc<Arena>,
    responses: BTreeMap<Play, (MoveId, usize)>,
}

impl Strategy {
    /// The minimal strategy `{ε}`.
    pub fn minimal(arena: Arc<Arena>) -> Strategy {
        Strategy { arena, responses: BTreeMap::new() }
    }

    /// Builds a strategy from even-length P-views; prefixes are added.
    pub fn from_pviews(arena: Arc<Arena>, forest: &[Play]) -> Result<Strategy> {
        let mut responses: BTreeMap<Play, (MoveId, usize)> = BTreeMap::new();
        for (n, s) in forest.iter().enumerate() {
            let s = validate_play(&arena, s)?;
            if s.len() % 2 == 1 {
                return Err(Error::invalid("even", vec![n], "P-view of odd length"));
            }
            if pview(&arena, &s).as_ref() != Some(&s) {
                return Err(Error::invalid("p-view", vec![n], "play is not its own P-view"));
            }
            for k in (1..s.len()).step_by(2) {
                let key = s.prefix(k);
                let val = (s.moves[k], s.just[k].expect("player moves point"));
                match responses.get(&key) {
                    Some(old) if *old != val => {
                        return Err(Error::invalid("deterministic", vec![n, k], "two Player answers to one P-view"))
                    }
                    _ => {
                        responses.insert(key, val);
                    }
                }
            }
        }
        Ok(Strategy { arena, responses })
    }

    pub fn arena(&self) -> &Arc<Arena> {
        &self.arena
    }

    /// Response to an odd P-view.
    pub fn response(&self, odd_pview: &Play) -> Option<(MoveId, usize)> {
        self.responses.get(odd_pview).copied()
    }

    pub fn responses(&self) -> &BTreeMap<Play, (MoveId, usize)> {
        &self.responses
    }

    /// All nonempty even P-views, sorted.
    pub fn pviews(&self) -> Vec<Play> {
        let set: BTreeSet<Play> = self.responses.iter().map(|(k, &(m, j))| k.pushed(m, Some(j))).collect();
        set.into_iter().collect()
    }

    pub fn maximal_pviews(&self) -> Vec<Play> {
        let all = self.pviews();
        all.iter()
            .filter(|p| !all.iter().any(|q| q.len() > p.len() && p.is_prefix_of(q)))
            .cloned()
            .collect()
    }

    pub fn contains_pview(&self, s: &Play) -> bool {
        if s.is_empty() {
            return true;
        }
        s.len() % 2 == 0 && self.response(&s.prefix(s.len() - 1)) == Some((s.moves[s.len() - 1], s.just[s.len() - 1].unwrap()))
            && (s.len() == 2 || self.contains_pview(&s.prefix(s.len() - 2)))
    }

    /// Opponent extensions of an even P-view (including the empty one).
    pub fn opponent_extensions(&self, even: &Play) -> Vec<Play> {
        if even.is_empty() {
            return self.arena.roots().iter().map(|&r| even.pushed(r, None)).collect();
        }
        let last = even.len() - 1;
        self.arena.children(even.moves[last]).iter().map(|&c| even.pushed(c, Some(last))).collect()
    }

    /// Odd P-views reachable in this strategy, answered or not.
    pub fn odd_pviews(&self) -> Vec<Play> {
        let mut out: Vec<Play> = self.opponent_extensions(&Play::new());
        for p in self.pviews() {
            out.extend(self.opponent_extensions(&p));
        }
        out.sort();
        out.dedup();
        out
    }

    pub fn is_total(&self) -> bool {
        self.odd_pviews().iter().all(|o| self.responses.contains_key(o))
    }

    pub fn is_finite(&self) -> bool {
        true
    }

    /// Checks that every Player move of `s` agrees with the forest.
    pub fn check_reachable(&self, s: &Play) -> Result<()> {
        validate_play(&self.arena, s)?;
        for k in (1..s.len()).step_by(2) {
            let idx = pview_indices(&self.arena, &s.prefix(k))
                .ok_or_else(|| Error::pre(format!("P-view undefined at {k}")))?;
            let key = restrict(s, &idx);
            let want = self.response(&key).map(|(m, j)| (m, idx[j]));
            if want != Some((s.moves[k], s.just[k].unwrap())) {
                return Err(Error::pre(format!("Player move at {k} disagrees with the strategy")));
            }
        }
        Ok(())
    }

    /// The innocent response to an odd-length play, copied from its P-view.
    pub fn innocent_extend(&self, s: &Play) -> Result<Option<Play>> {
        if s.len() % 2 == 0 {
            return Err(Error::pre("innocent_extend expects an odd-length play"));
        }
        self.check_reachable(s)?;
        Ok(self.respond(s))
    }

    fn respond(&self, s: &Play) -> Option<Play> {
        let idx = pview_indices(&self.arena, s)?;
        let key = restrict(s, &idx);
        self.response(&key).map(|(m, j)| s.pushed(m, Some(idx[j])))
    }

    /// Every well-opened play of length at most `max_len` reachable by this
    /// strategy, including odd ones awaiting a response.
    pub fn closure(&self, max_len: usize) -> Vec<Play> {
        let mut out = Vec::new();
        let mut stack: Vec<Play> = if max_len == 0 { vec![] } else { self.opponent_extensions(&Play::new()) };
        while let Some(s) = stack.pop() {
            if s.len() % 2 == 1 {
                if s.len() < max_len {
                    if let Some(t) = self.respond(&s) {
                        stack.push(t);
                    }
                }
            } else if s.len() < max_len {
                for j in 0..s.len() {
                    if self.arena.polarity(s.moves[j]) == Polarity::Pos {
                        for &c in self.arena.children(s.moves[j]) {
                            stack.push(s.pushed(c, Some(j)));
                        }
                    }
                }
            }
            out.push(s);
        }
        out.sort();
        out
    }

    /// Nonempty even plays of length at most `max_len`.
    pub fn plays(&self, max_len: usize) -> Vec<Play> {
        self.closure(max_len).into_iter().filter(|s| s.len() % 2 == 0).collect()
    }
}

/// All total strategies on a well-opened arena whose P-views have length at
/// most `max_len`, with at most `max_pviews` maximal P-views.
pub fn enumerate_total_strategies(arena: &Arc<Arena>, max_len: usize, max_pviews: usize) -> Vec<Strategy> {
    type Partial = (Vec<(Play, (MoveId, usize))>, usize);

    fn combine(a: Vec<Partial>, b: Vec<Partial>, cap: usize) -> Vec<Partial> {
        let mut out = Vec::new();
        for (ra, na) in &a {
            for (rb, nb) in &b {
                if na + nb <= cap {
                    let mut r = ra.clone();
                    r.extend(rb.iter().cloned());
                    out.push((r, na + nb));
                }
            }
        }
        out
    }

    fn gen(arena: &Arena, odd: &Play, max_len: usize, cap: usize) -> Vec<Partial> {
        if odd.len() + 1 > max_len {
            return vec![];
        }
        let mut out = Vec::new();
        for j in (0..odd.len()).step_by(2) {
            for &m in arena.children(odd.moves[j]) {
                let even = odd.pushed(m, Some(j));
                let mut acc: Vec<Partial> = vec![(vec![(odd.clone(), (m, j))], 0)];
                let kids = arena.children(m);
                if kids.is_empty() {
                    acc[0].1 = 1;
                }
                for &c in kids {
                    let sub = gen(arena, &even.pushed(c, Some(even.len() - 1)), max_len, cap);
                    acc = combine(acc, sub, cap);
                    if acc.is_empty() {
                        break;
                    }
                }
                out.extend(acc.into_iter().filter(|p| p.1 <= cap));
            }
        }
        out
    }

    let Some(root) = arena.root() else { return vec![] };
    gen(arena, &Play::from_pairs(&[(root, None)]), max_len, max_pviews)
        .into_iter()
        .map(|(r, _)| Strategy { arena: arena.clone(), responses: r.into_iter().collect() })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::parse_simple_type;

    fn arena(t: &str) -> Arc<Arena> {
        Arc::new(parse_simple_type(t).unwrap().0)
    }

    fn kx() -> (Arc<Arena>, Play) {
        let a = arena("((o -> o) -> o) -> o");
        let s = Play::from_pairs(&[(0, None), (1, Some(0)), (2, Some(1)), (1, Some(0)), (2, Some(3)), (3, Some(2))]);
        (a, s)
    }

    #[test]
    fn validate_examples() {
        let a = arena("(o -> o) -> o -> o");
        // λf.λx.f x
        let s = Play::from_pairs(&[(0, None), (1, Some(0)), (2, Some(1)), (3, Some(0))]);
        assert!(validate_play(&a, &s).is_ok());
        assert!(validate_play(&a, &Play::new()).is_ok());
        let bad = Play::from_pairs(&[(0, None), (2, None)]);
        assert!(validate_play(&a, &bad).is_err());
        let bad = Play::from_pairs(&[(0, None), (1, Some(0)), (3, Some(0))]);
        match validate_play(&a, &bad) {
            Err(Error::Invalid(v)) => assert!(v.iter().any(|v| v.law == "alternating")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn pview_clauses() {
        let (a, s) = kx();
        assert_eq!(pview(&a, &s), Some(s.clone()));
        assert_eq!(pview(&a, &s.prefix(1)), Some(s.prefix(1)));
        // Opponent jumps back to its justifier
        let t = s.prefix(4).pushed(2, Some(1));
        let v = pview(&a, &t).unwrap();
        assert_eq!(v, Play::from_pairs(&[(0, None), (1, Some(0)), (2, Some(1))]));
        // a Player move pointing outside the view
        let u = s.prefix(3).pushed(1, Some(0)).pushed(2, Some(1)).pushed(3, Some(2));
        assert!(validate_play(&a, &u).is_ok());
        assert!(pview(&a, &u).is_none());
        assert!(!is_visible(&a, &u));
        assert!(is_visible(&a, &s));
    }

    #[test]
    fn strategy_from_forest() {
        let (a, s) = kx();
        let kx = Strategy::from_pviews(a.clone(), &[s.clone()]).unwrap();
        assert_eq!(kx.pviews().len(), 3);
        assert!(kx.is_total());
        let r = kx.innocent_extend(&s.prefix(1)).unwrap().unwrap();
        assert_eq!(r, s.prefix(2));
        let eps = Strategy::minimal(a.clone());
        assert_eq!(eps.innocent_extend(&s.prefix(1)).unwrap(), None);
        assert!(!eps.is_total());
        let other = Play::from_pairs(&[(0, None), (1, Some(0)), (2, Some(1)), (3, Some(2))]);
        match Strategy::from_pviews(a, &[s, other]) {
            Err(Error::Invalid(v)) => assert_eq!(v[0].law, "deterministic"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn closure_pviews_in_forest() {
        let (a, s) = kx();
        let kx = Strategy::from_pviews(a.clone(), &[s]).unwrap();
        let plays = kx.plays(10);
        assert!(!plays.is_empty());
        for p in &plays {
            let v = pview(&a, p).unwrap();
            assert!(kx.contains_pview(&v), "{p:?}");
            assert_eq!(pview(&a, &v), Some(v.clone()));
            assert!(kx.check_reachable(p).is_ok());
        }
    }

    #[test]
    fn corpus_on_kierstead_arena() {
        let a = arena("((o -> o) -> o) -> o");
        let all = enumerate_total_strategies(&a, 6, 3);
        assert_eq!(all.len(), 3);
        assert!(all.iter().all(|s| s.is_total()));
    }

    #[test]
    fn deseq_needs_one_initial_move() {
        let (a, s) = kx();
        assert!(deseq_play(&a, &s).is_ok());
        assert!(deseq_play(&a, &Play::new()).is_err());
    }
}
