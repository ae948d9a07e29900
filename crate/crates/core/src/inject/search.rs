//! Searching the augmentations of a fixed configuration.

use std::collections::{HashMap, HashSet};

use crate::causal::{group_by, Augmentation, CausalSource, Configuration};
use crate::error::{Error, Result};
use crate::position::subtree_keys;

/// What the caus tree is allowed to be.
#[derive(Clone, Copy)]
pub enum Mode<'a> {
    /// Any deterministic, courteous, rule-abiding, +-obsessional augmentation.
    Raw,
    /// As `Raw`, plus: negative events reached by the same path of displays
    /// and pointer depths respond the same way.
    Consistent,
    /// Expansions of the given causal strategy.
    Against(&'a (dyn CausalSource + Sync)),
}

#[derive(Clone, Copy, Debug)]
pub struct Limits {
    pub results: usize,
    pub steps: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { results: usize::MAX, steps: 50_000_000 }
    }
}

struct Group {
    display: usize,
    members: Vec<usize>,
    used: usize,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Decision {
    Silent,
    Answer(usize, usize),
}

struct Search<'a> {
    x: &'a Configuration,
    mode: Mode<'a>,
    limits: Limits,
    groups: Vec<Vec<Group>>,
    pred: Vec<Option<usize>>,
    depth: Vec<usize>,
    state: Vec<usize>,
    sig: Vec<usize>,
    interned: HashMap<(usize, usize, Option<usize>), usize>,
    decisions: HashMap<usize, Decision>,
    stack: Vec<usize>,
    placed: usize,
    steps: u64,
    seen: HashSet<String>,
    out: Vec<Augmentation>,
}

/// Augmentations of `x` allowed by `mode`, up to isomorphism.
pub fn search_expansions(x: &Configuration, mode: Mode<'_>, limits: Limits) -> Result<Vec<Augmentation>> {
    let arena = x.arena();
    if arena.polarity(x.display(x.root())) != crate::arena::Polarity::Neg {
        return Err(Error::pre("the root of the configuration must be an Opponent move"));
    }
    let keys = subtree_keys(x);
    let groups = (0..x.len())
        .map(|j| {
            let pos: Vec<usize> = x.children(j).iter().copied().filter(|&c| arena.polarity(x.display(c)) == crate::arena::Polarity::Pos).collect();
            group_by(&pos, |c| keys[c].clone())
                .into_iter()
                .map(|members| Group { display: x.display(members[0]), members, used: 0 })
                .collect()
        })
        .collect();
    let n = x.len();
    let mut s = Search {
        x,
        mode,
        limits,
        groups,
        pred: vec![None; n],
        depth: vec![0; n],
        state: vec![usize::MAX; n],
        sig: vec![0; n],
        interned: HashMap::new(),
        decisions: HashMap::new(),
        stack: vec![x.root()],
        placed: 1,
        steps: 0,
        seen: HashSet::new(),
        out: Vec::new(),
    };
    if let Mode::Against(src) = mode {
        let r = src.root_state();
        if src.state_display(r) != x.display(x.root()) {
            return Ok(vec![]);
        }
        s.state[x.root()] = r;
    }
    s.sig[x.root()] = s.intern((usize::MAX, x.display(x.root()), None));
    // one frame per placed event
    std::thread::scope(|scope| {
        std::thread::Builder::new()
            .stack_size(STACK_BYTES)
            .spawn_scoped(scope, move || s.go().map(|_| s.out))
            .expect("search thread")
            .join()
            .expect("search thread panicked")
    })
}

const STACK_BYTES: usize = 1 << 30;

impl Search<'_> {
    fn intern(&mut self, k: (usize, usize, Option<usize>)) -> usize {
        let next = self.interned.len();
        *self.interned.entry(k).or_insert(next)
    }

    fn ancestor_at(&self, a: usize, d: usize) -> usize {
        let mut e = a;
        while self.depth[e] > d {
            e = self.pred[e].expect("depth above root");
        }
        e
    }

    fn open_groups(&self, j: usize, display: Option<usize>, out: &mut Vec<(usize, usize)>) {
        for (g, grp) in self.groups[j].iter().enumerate() {
            if grp.used < grp.members.len() && display.map_or(true, |d| d == grp.display) {
                out.push((j, g));
            }
        }
    }

    fn options(&self, a: usize) -> Vec<Option<(usize, usize)>> {
        let forced = |d: Decision| -> Vec<Option<(usize, usize)>> {
            match d {
                Decision::Silent => vec![None],
                Decision::Answer(m, jd) => {
                    if jd > self.depth[a] {
                        return vec![];
                    }
                    let mut v = Vec::new();
                    self.open_groups(self.ancestor_at(a, jd), Some(m), &mut v);
                    v.into_iter().map(Some).collect()
                }
            }
        };
        match self.mode {
            Mode::Against(src) => {
                let st = self.state[a];
                match src.response(st) {
                    None => vec![None],
                    Some(r) => forced(Decision::Answer(src.state_display(r), src.justifier_depth(r, self.depth[a] + 1))),
                }
            }
            Mode::Consistent if self.decisions.contains_key(&self.sig[a]) => forced(self.decisions[&self.sig[a]]),
            _ => {
                let mut v = Vec::new();
                let mut e = a;
                loop {
                    self.open_groups(e, None, &mut v);
                    match self.pred[e] {
                        Some(p) => e = p,
                        None => break,
                    }
                }
                let mut opts: Vec<Option<(usize, usize)>> = vec![None];
                opts.extend(v.into_iter().map(Some));
                opts
            }
        }
    }

    fn go(&mut self) -> Result<bool> {
        self.steps += 1;
        if self.steps > self.limits.steps {
            return Err(Error::Bound(format!("expansion search exceeded {} steps", self.limits.steps)));
        }
        let Some(a) = self.stack.pop() else {
            if self.placed == self.x.len() {
                self.emit();
            }
            return Ok(self.out.len() >= self.limits.results);
        };
        let record = matches!(self.mode, Mode::Consistent) && !self.decisions.contains_key(&self.sig[a]);
        for opt in self.options(a) {
            let stop = match opt {
                None => {
                    if record {
                        self.decisions.insert(self.sig[a], Decision::Silent);
                    }
                    self.go()?
                }
                Some((j, g)) => {
                    if record {
                        self.decisions.insert(self.sig[a], Decision::Answer(self.groups[j][g].display, self.depth[j]));
                    }
                    self.place(a, j, g)?
                }
            };
            if record {
                self.decisions.remove(&self.sig[a]);
            }
            if stop {
                return Ok(true);
            }
        }
        self.stack.push(a);
        Ok(false)
    }

    fn place(&mut self, a: usize, j: usize, g: usize) -> Result<bool> {
        let grp = &mut self.groups[j][g];
        let b = grp.members[grp.used];
        grp.used += 1;
        self.pred[b] = Some(a);
        self.depth[b] = self.depth[a] + 1;
        let bsig = self.intern((self.sig[a], self.x.display(b), Some(self.depth[j])));
        self.sig[b] = bsig;
        let mut ok = true;
        if let Mode::Against(src) = self.mode {
            let r = src.response(self.state[a]).expect("answered");
            self.state[b] = r;
        }
        let base = self.stack.len();
        let kids: Vec<usize> = self.x.children(b).to_vec();
        for &c in &kids {
            self.pred[c] = Some(b);
            self.depth[c] = self.depth[b] + 1;
            self.sig[c] = self.intern((bsig, self.x.display(c), None));
            if let Mode::Against(src) = self.mode {
                let dc = self.x.display(c);
                match src.receptions(self.state[b]).into_iter().find(|&r| src.state_display(r) == dc) {
                    Some(r) => self.state[c] = r,
                    None => ok = false,
                }
            }
            self.stack.push(c);
        }
        self.placed += 1 + kids.len();
        let stop = if ok { self.go()? } else { false };
        self.placed -= 1 + kids.len();
        self.stack.truncate(base);
        self.groups[j][g].used -= 1;
        Ok(stop)
    }

    fn emit(&mut self) {
        let x = self.x;
        let Ok(q) = Augmentation::new(x.arena().clone(), x.displays().to_vec(), x.parents().to_vec(), self.pred.clone()) else {
            return;
        };
        if !q.validate().is_empty() {
            return;
        }
        if self.seen.insert(q.canonical_key()) {
            self.out.push(q);
        }
    }
}
