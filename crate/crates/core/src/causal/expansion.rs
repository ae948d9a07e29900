use std::collections::HashMap;
use std::sync::Arc;

use super::Augmentation;
use crate::arena::{Arena, MoveId, Polarity};

/// A (possibly infinite, finitely presented) causal strategy, seen through
/// its states. Negative states have at most one response; positive states
/// have one reception per negative arena child they expose.
pub trait CausalSource {
    fn arena(&self) -> &Arc<Arena>;
    fn root_state(&self) -> usize;
    fn state_display(&self, s: usize) -> MoveId;
    fn response(&self, s: usize) -> Option<usize>;
    fn receptions(&self, s: usize) -> Vec<usize>;
    /// Causal depth of the justifier of a positive state occurring at `depth`.
    fn justifier_depth(&self, s: usize, depth: usize) -> usize;

    fn state_polarity(&self, s: usize) -> Polarity {
        self.arena().polarity(self.state_display(s))
    }
}

impl CausalSource for Augmentation {
    fn arena(&self) -> &Arc<Arena> {
        Augmentation::arena(self)
    }

    fn root_state(&self) -> usize {
        self.root()
    }

    fn state_display(&self, s: usize) -> MoveId {
        self.display(s)
    }

    fn response(&self, s: usize) -> Option<usize> {
        Augmentation::response(self, s)
    }

    fn receptions(&self, s: usize) -> Vec<usize> {
        self.succ(s).iter().copied().filter(|&c| !self.is_pos(c)).collect()
    }

    fn justifier_depth(&self, s: usize, _depth: usize) -> usize {
        self.depth(self.just(s).expect("positive events are justified"))
    }
}

/// An expansion up to isomorphism: a tree of states where the copies below
/// a positive state form a sorted multiset.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Shape {
    pub size: usize,
    pub state: usize,
    pub children: Vec<Arc<Shape>>,
}

struct ShapeGen<'a, S: CausalSource + ?Sized> {
    src: &'a S,
    plus_covered: bool,
    memo: HashMap<(usize, usize), Vec<Arc<Shape>>>,
}

impl<S: CausalSource + ?Sized> ShapeGen<'_, S> {
    fn shapes(&mut self, state: usize, budget: usize) -> Vec<Arc<Shape>> {
        if budget == 0 {
            return vec![];
        }
        if let Some(v) = self.memo.get(&(state, budget)) {
            return v.clone();
        }
        let out = if self.src.state_polarity(state) == Polarity::Neg {
            match self.src.response(state) {
                Some(r) => self
                    .shapes(r, budget - 1)
                    .into_iter()
                    .map(|c| Arc::new(Shape { size: c.size + 1, state, children: vec![c] }))
                    .collect(),
                None if self.plus_covered => vec![],
                None => vec![Arc::new(Shape { size: 1, state, children: vec![] })],
            }
        } else {
            let mut acc: Vec<(Vec<Arc<Shape>>, usize)> = vec![(vec![], 0)];
            for c in self.src.receptions(state) {
                let options = self.shapes(c, budget - 1);
                let mut next = Vec::new();
                for (kids, used) in &acc {
                    let mut chosen = kids.clone();
                    multisets(&options, 0, budget - 1 - used, &mut chosen, *used, &mut next);
                }
                acc = next;
            }
            let mut v: Vec<Arc<Shape>> = acc
                .into_iter()
                .map(|(children, used)| Arc::new(Shape { size: used + 1, state, children }))
                .collect();
            v.sort();
            v
        };
        self.memo.insert((state, budget), out.clone());
        out
    }
}

/// Extends `chosen` by every multiset drawn from `options[start..]` fitting in `room`.
fn multisets(
    options: &[Arc<Shape>],
    start: usize,
    room: usize,
    chosen: &mut Vec<Arc<Shape>>,
    used: usize,
    out: &mut Vec<(Vec<Arc<Shape>>, usize)>,
) {
    out.push((chosen.clone(), used));
    for i in start..options.len() {
        let s = options[i].size;
        if s <= room {
            chosen.push(options[i].clone());
            multisets(options, i, room - s, chosen, used + s, out);
            chosen.pop();
        }
    }
}

/// All expansion shapes with at most `max_events` events.
pub fn enumerate_shapes<S: CausalSource + ?Sized>(src: &S, max_events: usize, plus_covered: bool) -> Vec<Arc<Shape>> {
    let mut g = ShapeGen { src, plus_covered, memo: HashMap::new() };
    g.shapes(src.root_state(), max_events)
}

/// The augmentation of a shape, with the state of each event.
pub fn build_from_shape<S: CausalSource + ?Sized>(src: &S, shape: &Shape) -> (Augmentation, Vec<usize>) {
    let mut display = Vec::new();
    let mut just = Vec::new();
    let mut pred = Vec::new();
    let mut states = Vec::new();
    let mut chain: Vec<usize> = Vec::new();
    fn go<S: CausalSource + ?Sized>(
        src: &S,
        s: &Shape,
        parent: Option<usize>,
        chain: &mut Vec<usize>,
        out: (&mut Vec<MoveId>, &mut Vec<Option<usize>>, &mut Vec<Option<usize>>, &mut Vec<usize>),
    ) {
        let (display, just, pred, states) = out;
        let e = display.len();
        let d = chain.len();
        display.push(src.state_display(s.state));
        pred.push(parent);
        states.push(s.state);
        just.push(match parent {
            None => None,
            Some(p) if src.state_polarity(s.state) == Polarity::Neg => Some(p),
            Some(_) => Some(chain[src.justifier_depth(s.state, d)]),
        });
        chain.push(e);
        for c in &s.children {
            go(src, c, Some(e), chain, (&mut *display, &mut *just, &mut *pred, &mut *states));
        }
        chain.pop();
    }
    go(src, shape, None, &mut chain, (&mut display, &mut just, &mut pred, &mut states));
    let q = Augmentation::new(src.arena().clone(), display, just, pred).expect("shapes build valid augmentations");
    (q, states)
}

/// Expansions of a causal source with at most `max_events` events, up to isomorphism.
pub fn expansions_of<S: CausalSource + ?Sized>(src: &S, max_events: usize, plus_covered: bool) -> Vec<(Augmentation, Vec<usize>)> {
    enumerate_shapes(src, max_events, plus_covered).iter().map(|s| build_from_shape(src, s)).collect()
}

/// Expansions of a finite causal strategy with at most `max_events` events.
pub fn enumerate_expansions(p: &Augmentation, max_events: usize) -> Vec<Augmentation> {
    expansions_of(p, max_events, false).into_iter().map(|(q, _)| q).collect()
}
