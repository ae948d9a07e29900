//! Contexts, bisimulations between augmentations, clones and forks.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::causal::Augmentation;
use crate::error::{Error, Result, Violation};
use crate::MoveId;

/// A partial bijection between negative events of two augmentations.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Context {
    fwd: BTreeMap<usize, usize>,
    bwd: BTreeMap<usize, usize>,
}

impl Context {
    pub fn new() -> Context {
        Context::default()
    }

    pub fn from_pairs(pairs: &[(usize, usize)]) -> Result<Context> {
        let mut g = Context::new();
        for &(c, d) in pairs {
            if !g.insert(c, d) {
                return Err(Error::invalid("bijection", vec![c, d], "context pairs must form a bijection"));
            }
        }
        Ok(g)
    }

    /// Adds a pair; false if it would break injectivity.
    pub fn insert(&mut self, c: usize, d: usize) -> bool {
        if self.fwd.contains_key(&c) || self.bwd.contains_key(&d) {
            return false;
        }
        self.fwd.insert(c, d);
        self.bwd.insert(d, c);
        true
    }

    pub fn with(&self, c: usize, d: usize) -> Context {
        let mut g = self.clone();
        g.insert(c, d);
        g
    }

    pub fn get(&self, c: usize) -> Option<usize> {
        self.fwd.get(&c).copied()
    }

    pub fn inv(&self, d: usize) -> Option<usize> {
        self.bwd.get(&d).copied()
    }

    pub fn in_dom(&self, c: usize) -> bool {
        self.fwd.contains_key(&c)
    }

    pub fn in_cod(&self, d: usize) -> bool {
        self.bwd.contains_key(&d)
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.fwd.iter().map(|(&c, &d)| (c, d)).collect()
    }

    pub fn len(&self) -> usize {
        self.fwd.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fwd.is_empty()
    }

    pub fn inverse(&self) -> Context {
        Context { fwd: self.bwd.clone(), bwd: self.fwd.clone() }
    }

    /// `next ∘ self`, defined where both are.
    pub fn then(&self, next: &Context) -> Context {
        let mut g = Context::new();
        for (&c, &d) in &self.fwd {
            if let Some(e) = next.get(d) {
                g.insert(c, e);
            }
        }
        g
    }

    pub fn restrict(&self, keep: impl Fn(usize, usize) -> bool) -> Context {
        let mut g = Context::new();
        for (&c, &d) in &self.fwd {
            if keep(c, d) {
                g.insert(c, d);
            }
        }
        g
    }

    /// Negative events with matching displays.
    pub fn validate(&self, q: &Augmentation, p: &Augmentation) -> Vec<Violation> {
        let mut v = Vec::new();
        for (&c, &d) in &self.fwd {
            if c >= q.len() || d >= p.len() {
                v.push(Violation::new("context", vec![c, d], "event out of range"));
            } else if q.is_pos(c) || p.is_pos(d) {
                v.push(Violation::new("context", vec![c, d], "context pairs must be negative"));
            } else if q.display(c) != p.display(d) {
                v.push(Violation::new("context", vec![c, d], "context pairs must have equal displays"));
            }
        }
        v
    }

    /// `φ(just(c)) = just(Γ(c))` for every pair.
    pub fn preserves_pointers(&self, q: &Augmentation, p: &Augmentation, phi: &[usize]) -> bool {
        self.fwd.iter().all(|(&c, &d)| q.just(c).map(|j| phi[j]) == p.just(d))
    }

    /// No domain element strictly above `a`, no codomain element strictly above `b`.
    pub fn entails(&self, q: &Augmentation, p: &Augmentation, a: usize, b: usize) -> bool {
        self.fwd.keys().all(|&c| !q.lt(a, c)) && self.bwd.keys().all(|&d| !p.lt(b, d))
    }
}

impl Serialize for Context {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.pairs().serialize(s)
    }
}

struct Game<'a> {
    q: &'a Augmentation,
    p: &'a Augmentation,
    phi: Option<&'a [usize]>,
    memo: HashMap<(usize, usize, Vec<(usize, usize)>), bool>,
}

impl<'a> Game<'a> {
    fn new(q: &'a Augmentation, p: &'a Augmentation, phi: Option<&'a [usize]>) -> Game<'a> {
        Game { q, p, phi, memo: HashMap::new() }
    }

    fn rel(&mut self, a: usize, b: usize, g: &Context) -> bool {
        let (q, p) = (self.q, self.p);
        if q.display(a) != p.display(b) || !g.entails(q, p, a, b) {
            return false;
        }
        if q.is_pos(a) {
            let jb = p.just(b);
            match q.just(a) {
                None => {
                    if jb.is_some() {
                        return false;
                    }
                }
                Some(ja) => match g.get(ja) {
                    Some(d) => {
                        if jb != Some(d) {
                            return false;
                        }
                    }
                    None => {
                        let Some(phi) = self.phi else { return false };
                        if jb.is_some_and(|j| g.in_cod(j)) || jb != Some(phi[ja]) {
                            return false;
                        }
                    }
                },
            }
        }
        let key_ctx: Vec<(usize, usize)> = g.pairs().into_iter().filter(|&(c, d)| q.le(c, a) || p.le(d, b)).collect();
        let key = (a, b, key_ctx);
        if let Some(&r) = self.memo.get(&key) {
            return r;
        }
        let extend = q.is_pos(a);
        let sa = q.succ(a).to_vec();
        let sb = p.succ(b).to_vec();
        let mut row = vec![false; sa.len()];
        let mut col = vec![false; sb.len()];
        for (i, &x) in sa.iter().enumerate() {
            for (j, &y) in sb.iter().enumerate() {
                if row[i] && col[j] {
                    continue;
                }
                let ok = if extend { self.rel(x, y, &g.with(x, y)) } else { self.rel(x, y, g) };
                if ok {
                    row[i] = true;
                    col[j] = true;
                }
            }
        }
        let r = row.iter().all(|&x| x) && col.iter().all(|&x| x);
        self.memo.insert(key, r);
        r
    }
}

/// `a ∼^φ_Γ b`: bisimilarity across a configuration isomorphism `φ : ⌊q⌋ ≅ ⌊p⌋`.
pub fn bisim_iso(q: &Augmentation, p: &Augmentation, phi: &[usize], a: usize, b: usize, g: &Context) -> bool {
    Game::new(q, p, Some(phi)).rel(a, b, g)
}

/// `a ∼_Γ b`: every pointer must be matched by the context.
pub fn bisim_plain(q: &Augmentation, p: &Augmentation, a: usize, b: usize, g: &Context) -> bool {
    Game::new(q, p, None).rel(a, b, g)
}

/// `q ∼ p`, from the roots with the roots paired.
pub fn bisimilar(q: &Augmentation, p: &Augmentation) -> bool {
    let g = Context::from_pairs(&[(q.root(), p.root())]).expect("single pair");
    bisim_plain(q, p, q.root(), p.root(), &g)
}

/// `q ∼^φ p`, from the roots with the empty context.
pub fn bisimilar_iso(q: &Augmentation, p: &Augmentation, phi: &[usize]) -> bool {
    bisim_iso(q, p, phi, q.root(), p.root(), &Context::new())
}

/// Both sides of the equivalence between `q ∼^φ p` and `q ∼ p`.
pub fn agreement_check(q: &Augmentation, p: &Augmentation, phi: &[usize]) -> (bool, bool) {
    (bisimilar_iso(q, p, phi), bisimilar(q, p))
}

/// The least context, included in `g`, under which `a ∼^φ b` still holds.
pub fn minimal_context(q: &Augmentation, p: &Augmentation, phi: &[usize], a: usize, b: usize, g: &Context) -> Result<Context> {
    if !bisim_iso(q, p, phi, a, b, g) {
        return Err(Error::pre("the given context does not establish bisimilarity"));
    }
    let used_q: BTreeSet<usize> = q.up(a).into_iter().filter_map(|e| q.just(e)).collect();
    let used_p: BTreeSet<usize> = p.up(b).into_iter().filter_map(|e| p.just(e)).collect();
    Ok(g.restrict(|c, d| used_q.contains(&c) && used_p.contains(&d) && phi[c] != d))
}

/// Negative events below or equal to `e`, root first.
fn negative_chain(q: &Augmentation, e: usize) -> Vec<usize> {
    q.chain(e).into_iter().filter(|&c| !q.is_pos(c)).collect()
}

/// A pointer-preserving context witnessing `a ≈^φ b`, if one exists.
pub fn clone_witness(q: &Augmentation, p: &Augmentation, phi: &[usize], a: usize, b: usize) -> Option<Context> {
    if q.display(a) != p.display(b) {
        return None;
    }
    let left = negative_chain(q, a);
    let right = negative_chain(p, b);
    let options: Vec<Vec<usize>> = left
        .iter()
        .map(|&c| {
            right
                .iter()
                .copied()
                .filter(|&d| q.display(c) == p.display(d) && q.just(c).map(|j| phi[j]) == p.just(d) && phi[c] != d)
                .collect()
        })
        .collect();
    let mut game = Game::new(q, p, Some(phi));
    fn search(
        i: usize,
        left: &[usize],
        options: &[Vec<usize>],
        g: &mut Context,
        game: &mut Game,
        a: usize,
        b: usize,
    ) -> Option<Context> {
        if i == left.len() {
            return game.rel(a, b, g).then(|| g.clone());
        }
        if let Some(w) = search(i + 1, left, options, g, game, a, b) {
            return Some(w);
        }
        for &d in &options[i] {
            if g.insert(left[i], d) {
                let r = search(i + 1, left, options, g, game, a, b);
                g.fwd.remove(&left[i]);
                g.bwd.remove(&d);
                if r.is_some() {
                    return r;
                }
            }
        }
        None
    }
    search(0, &left, &options, &mut Context::new(), &mut game, a, b)
}

/// `a ≈^φ b`: bisimilar under some pointer-preserving context.
pub fn is_clone(q: &Augmentation, p: &Augmentation, phi: &[usize], a: usize, b: usize) -> bool {
    clone_witness(q, p, phi, a, b).is_some()
}

/// Equivalence classes of `≈` on the events of `q`, each sorted.
pub fn clone_classes(q: &Augmentation) -> Vec<Vec<usize>> {
    let id: Vec<usize> = (0..q.len()).collect();
    let codepth: Vec<usize> = (0..q.len()).map(|e| q.co_depth(e)).collect();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for e in 0..q.len() {
        let found = classes.iter_mut().find(|c| {
            let r = c[0];
            q.display(r) == q.display(e) && codepth[r] == codepth[e] && is_clone(q, q, &id, r, e)
        });
        match found {
            Some(c) => c.push(e),
            None => classes.push(vec![e]),
        }
    }
    classes
}

/// A maximal set of sibling negative events with one display.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fork {
    /// The common causal predecessor; `None` for the root fork.
    pub parent: Option<usize>,
    pub display: MoveId,
    pub events: Vec<usize>,
}

impl Fork {
    pub fn card(&self) -> usize {
        self.events.len()
    }
}

pub fn forks(q: &Augmentation) -> Vec<Fork> {
    let mut out = Vec::new();
    if !q.is_pos(q.root()) {
        out.push(Fork { parent: None, display: q.display(q.root()), events: vec![q.root()] });
    }
    for e in q.causal_order() {
        if !q.is_pos(e) {
            continue;
        }
        let negs: Vec<usize> = q.succ(e).iter().copied().filter(|&c| !q.is_pos(c)).collect();
        let mut groups: BTreeMap<MoveId, Vec<usize>> = BTreeMap::new();
        for c in negs {
            groups.entry(q.display(c)).or_default().push(c);
        }
        for (display, events) in groups {
            out.push(Fork { parent: Some(e), display, events });
        }
    }
    out
}

/// Every positive clone class splits into the successors of forks whose
/// sizes are exactly the binary digits of its own size.
pub fn check_partition(q: &Augmentation) -> Result<()> {
    let fs = forks(q);
    let mut fork_of = vec![usize::MAX; q.len()];
    for (i, f) in fs.iter().enumerate() {
        for &e in &f.events {
            fork_of[e] = i;
        }
    }
    let mut violations = Vec::new();
    for y in clone_classes(q) {
        if !q.is_pos(y[0]) {
            continue;
        }
        let mut used: BTreeSet<usize> = BTreeSet::new();
        let mut orphan = false;
        for &b in &y {
            match q.pred(b).map(|a| fork_of[a]) {
                Some(i) if i != usize::MAX => {
                    used.insert(i);
                }
                _ => orphan = true,
            }
        }
        let mut ok = !orphan;
        let n = y.len();
        let mut bits = 0usize;
        for &i in &used {
            let f = &fs[i];
            let card = f.card();
            let whole = f.events.iter().all(|&a| q.succ(a).iter().any(|b| y.binary_search(b).is_ok()));
            if !card.is_power_of_two() || bits & card != 0 || !whole {
                ok = false;
            }
            bits |= card;
        }
        if ok && bits != n {
            ok = false;
        }
        if !ok {
            violations.push(Violation::new(
                "partition",
                y.clone(),
                format!("clone class of size {n} is fed by forks of sizes {:?}", used.iter().map(|&i| fs[i].card()).collect::<Vec<_>>()),
            ));
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::Invalid(violations))
    }
}
