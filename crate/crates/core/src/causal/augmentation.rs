use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::config::{check_tree, children_of, Configuration};
use crate::arena::{escape, Arena, MoveId, Polarity};
use crate::error::{Error, Result, Violation};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawAugmentation {
    pub display: Vec<MoveId>,
    pub just_parent: Vec<Option<usize>>,
    pub caus_parent: Vec<Option<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Flags {
    pub receptive: bool,
    pub plus_covered: bool,
    pub minus_linear: bool,
    pub total: bool,
    pub causal_strategy: bool,
}

/// A configuration together with a causal tree refining it.
#[derive(Clone, Debug)]
pub struct Augmentation {
    arena: Arc<Arena>,
    display: Vec<MoveId>,
    just: Vec<Option<usize>>,
    pred: Vec<Option<usize>>,
    succ: Vec<Vec<usize>>,
    depth: Vec<usize>,
    tin: Vec<usize>,
    tout: Vec<usize>,
    root: usize,
}

impl Augmentation {
    /// Builds an augmentation after checking both trees; the laws of
    /// augmentations are checked separately by [`Augmentation::validate`].
    pub fn new(
        arena: Arc<Arena>,
        display: Vec<MoveId>,
        just: Vec<Option<usize>>,
        pred: Vec<Option<usize>>,
    ) -> Result<Augmentation> {
        let config = Configuration::new(arena.clone(), display.clone(), just.clone())?;
        if pred.len() != display.len() {
            return Err(Error::invalid("shape", vec![], "caus_parent length mismatch"));
        }
        let root = check_tree(&pred, "causal tree").map_err(|v| Error::Invalid(vec![v]))?;
        if root != config.root() {
            return Err(Error::invalid("causal tree", vec![root, config.root()], "roots differ"));
        }
        let succ = children_of(&pred);
        let n = display.len();
        let mut depth = vec![0; n];
        let mut tin = vec![0; n];
        let mut tout = vec![0; n];
        let mut clock = 0;
        let mut stack = vec![(root, false)];
        while let Some((e, done)) = stack.pop() {
            if done {
                tout[e] = clock;
                continue;
            }
            tin[e] = clock;
            clock += 1;
            stack.push((e, true));
            for &c in succ[e].iter().rev() {
                depth[c] = depth[e] + 1;
                stack.push((c, false));
            }
        }
        Ok(Augmentation { arena, display, just, pred, succ, depth, tin, tout, root })
    }

    pub fn from_raw(arena: Arc<Arena>, raw: RawAugmentation) -> Result<Augmentation> {
        Augmentation::new(arena, raw.display, raw.just_parent, raw.caus_parent)
    }

    /// Builds and checks the augmentation laws.
    pub fn checked(
        arena: Arc<Arena>,
        display: Vec<MoveId>,
        just: Vec<Option<usize>>,
        pred: Vec<Option<usize>>,
    ) -> Result<Augmentation> {
        let q = Augmentation::new(arena, display, just, pred)?;
        let v = q.validate();
        if v.is_empty() {
            Ok(q)
        } else {
            Err(Error::Invalid(v))
        }
    }

    pub fn to_raw(&self) -> RawAugmentation {
        RawAugmentation { display: self.display.clone(), just_parent: self.just.clone(), caus_parent: self.pred.clone() }
    }

    pub fn arena(&self) -> &Arc<Arena> {
        &self.arena
    }

    pub fn len(&self) -> usize {
        self.display.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn display(&self, e: usize) -> MoveId {
        self.display[e]
    }

    pub fn displays(&self) -> &[MoveId] {
        &self.display
    }

    pub fn just(&self, e: usize) -> Option<usize> {
        self.just[e]
    }

    pub fn pred(&self, e: usize) -> Option<usize> {
        self.pred[e]
    }

    pub fn succ(&self, e: usize) -> &[usize] {
        &self.succ[e]
    }

    pub fn depth(&self, e: usize) -> usize {
        self.depth[e]
    }

    pub fn polarity(&self, e: usize) -> Polarity {
        self.arena.polarity(self.display[e])
    }

    pub fn is_pos(&self, e: usize) -> bool {
        self.polarity(e) == Polarity::Pos
    }

    /// `a ≤ b` in the causal order.
    pub fn le(&self, a: usize, b: usize) -> bool {
        self.tin[a] <= self.tin[b] && self.tout[b] <= self.tout[a]
    }

    /// `a < b` in the causal order.
    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.le(a, b)
    }

    /// Causal ancestors of `e`, from the root down to `e` itself.
    pub fn chain(&self, e: usize) -> Vec<usize> {
        let mut c = vec![e];
        let mut cur = e;
        while let Some(p) = self.pred[cur] {
            c.push(p);
            cur = p;
        }
        c.reverse();
        c
    }

    /// Events causally above `e`, including `e`.
    pub fn up(&self, e: usize) -> Vec<usize> {
        let mut out = vec![e];
        let mut i = 0;
        while i < out.len() {
            out.extend(self.succ[out[i]].iter().copied());
            i += 1;
        }
        out
    }

    /// Events in an order where causal predecessors come first.
    pub fn causal_order(&self) -> Vec<usize> {
        let mut out = vec![self.root];
        let mut i = 0;
        while i < out.len() {
            out.extend(self.succ[out[i]].iter().copied());
            i += 1;
        }
        out
    }

    /// Length of the longest causal chain starting at `e` (in events).
    pub fn co_depth(&self, e: usize) -> usize {
        1 + self.succ[e].iter().map(|&c| self.co_depth(c)).max().unwrap_or(0)
    }

    pub fn config(&self) -> Configuration {
        Configuration::new(self.arena.clone(), self.display.clone(), self.just.clone()).expect("checked at construction")
    }

    /// Rule-abiding, courteous, deterministic.
    pub fn validate(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        for e in 0..self.len() {
            if let Some(j) = self.just[e] {
                if !self.le(j, e) {
                    v.push(Violation::new("rule-abiding", vec![j, e], "justifier not causally below"));
                }
            }
            if let Some(p) = self.pred[e] {
                let courteous_needed = self.is_pos(p) || !self.is_pos(e);
                if courteous_needed && self.just[e] != Some(p) {
                    v.push(Violation::new("courteous", vec![p, e], "causal edge is not a justification edge"));
                }
            }
            if !self.is_pos(e) && self.succ[e].iter().filter(|&&c| self.is_pos(c)).count() > 1 {
                v.push(Violation::new("deterministic", vec![e], "several positive successors"));
            }
        }
        v
    }

    pub fn classify(&self) -> Flags {
        let mut receptive = true;
        let mut plus_covered = true;
        let mut minus_linear = true;
        for e in 0..self.len() {
            if self.succ[e].is_empty() && !self.is_pos(e) {
                plus_covered = false;
            }
            let mut seen = Vec::new();
            for &c in &self.succ[e] {
                if !self.is_pos(c) {
                    if seen.contains(&self.display[c]) {
                        minus_linear = false;
                    }
                    seen.push(self.display[c]);
                }
            }
            for &b in self.arena.children(self.display[e]) {
                if self.arena.polarity(b) == Polarity::Neg
                    && !self.succ[e].iter().any(|&c| self.display[c] == b)
                {
                    receptive = false;
                }
            }
        }
        Flags {
            receptive,
            plus_covered,
            minus_linear,
            total: receptive && plus_covered,
            causal_strategy: receptive && minus_linear,
        }
    }

    pub fn is_causal_strategy(&self) -> bool {
        self.validate().is_empty() && self.classify().causal_strategy
    }

    /// The unique positive successor of a negative event, if any.
    pub fn response(&self, e: usize) -> Option<usize> {
        self.succ[e].iter().copied().find(|&c| self.is_pos(c))
    }

    /// Positive events exhaust the arena's negative children (the arena
    /// form of Opponent obsession).
    pub fn is_minus_obsessional(&self) -> bool {
        (0..self.len()).filter(|&e| self.is_pos(e)).all(|e| {
            self.arena.children(self.display[e]).iter().all(|&b| self.succ[e].iter().any(|&c| self.display[c] == b))
        })
    }

    /// Distance from `e` down to its justifier along the causal chain.
    pub fn just_distance(&self, e: usize) -> Option<usize> {
        self.just[e].map(|j| if self.le(j, e) { self.depth[e] - self.depth[j] } else { usize::MAX })
    }

    /// Canonical form of the causal tree labelled by display and justifier
    /// distance; equal keys iff isomorphic augmentations.
    pub fn canonical_key(&self) -> String {
        self.subtree_keys()[self.root].clone()
    }

    pub(crate) fn subtree_keys(&self) -> Vec<String> {
        let mut keys = vec![String::new(); self.len()];
        for &e in self.causal_order().iter().rev() {
            let mut kids: Vec<&str> = self.succ[e].iter().map(|&c| keys[c].as_str()).collect();
            kids.sort_unstable();
            let jd = match self.just_distance(e) {
                None => "r".to_string(),
                Some(usize::MAX) => "x".to_string(),
                Some(d) => d.to_string(),
            };
            let mut k = format!("({}/{}", self.display[e], jd);
            for c in kids {
                k.push(' ');
                k.push_str(c);
            }
            k.push(')');
            keys[e] = k;
        }
        keys
    }

    /// An isomorphism onto `other`, if one exists.
    pub fn iso(&self, other: &Augmentation) -> Option<Vec<usize>> {
        if self.len() != other.len() {
            return None;
        }
        let ka = self.subtree_keys();
        let kb = other.subtree_keys();
        if ka[self.root] != kb[other.root] {
            return None;
        }
        let mut map = vec![usize::MAX; self.len()];
        let mut stack = vec![(self.root, other.root)];
        while let Some((a, b)) = stack.pop() {
            map[a] = b;
            let mut pool: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
            for &c in &other.succ[b] {
                pool.entry(kb[c].as_str()).or_default().push(c);
            }
            for &c in &self.succ[a] {
                let d = pool.get_mut(ka[c].as_str())?.pop()?;
                stack.push((c, d));
            }
        }
        Some(map)
    }

    /// Renumbers events so that `perm[old] = new`.
    pub fn permuted(&self, perm: &[usize]) -> Augmentation {
        let n = self.len();
        let mut display = vec![0; n];
        let mut just = vec![None; n];
        let mut pred = vec![None; n];
        for e in 0..n {
            display[perm[e]] = self.display[e];
            just[perm[e]] = self.just[e].map(|j| perm[j]);
            pred[perm[e]] = self.pred[e].map(|j| perm[j]);
        }
        Augmentation::new(self.arena.clone(), display, just, pred).expect("permutation preserves validity")
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph augmentation {\n  node [shape=plaintext];\n");
        for e in 0..self.len() {
            s.push_str(&format!(
                "  e{e} [label=<{e}: q<sup>{}</sup><sub>{}</sub>>];\n",
                self.polarity(e).symbol(),
                escape(self.arena.label(self.display[e]))
            ));
        }
        for e in 0..self.len() {
            if let Some(p) = self.pred[e] {
                s.push_str(&format!("  e{p} -> e{e} [arrowhead=empty];\n"));
            }
            if let Some(j) = self.just[e] {
                if self.pred[e] != Some(j) {
                    s.push_str(&format!("  e{j} -> e{e} [style=dotted, arrowhead=none, constraint=false];\n"));
                }
            }
        }
        s.push_str("}\n");
        s
    }
}

/// Groups of events by a key, preserving first-seen order.
pub(crate) fn group_by<K: std::hash::Hash + Eq + Clone>(items: &[usize], key: impl Fn(usize) -> K) -> Vec<Vec<usize>> {
    let mut index: HashMap<K, usize> = HashMap::new();
    let mut out: Vec<Vec<usize>> = Vec::new();
    for &i in items {
        let k = key(i);
        match index.get(&k) {
            Some(&g) => out[g].push(i),
            None => {
                index.insert(k, out.len());
                out.push(vec![i]);
            }
        }
    }
    out
}
