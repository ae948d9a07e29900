//! Positions (isomorphism classes of configurations) as canonical
//! s-expressions, position sets, the arrow decomposition and the
//! relational reading of positions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arena::{Arena, MoveId, Polarity, SimpleType};
use crate::causal::{expansions_of, Augmentation, CausalSource, Configuration};
use crate::error::{Error, Result};
use crate::lambda::{Nf, NfHead};
use crate::play::{deseq_play, Strategy};

/// Canonical form of a configuration: `(m c1 c2 ...)` with the children's
/// forms sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Position {
    size: usize,
    sexpr: String,
}

impl Position {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn sexpr(&self) -> &str {
        &self.sexpr
    }

    pub fn parse(text: &str) -> Result<Position> {
        let (display, parent) = parse_sexpr(text)?;
        let mut keys = tree_keys(&display, &parent);
        let root = parent.iter().position(|p| p.is_none()).unwrap();
        Ok(Position { size: display.len(), sexpr: std::mem::take(&mut keys[root]) })
    }

    /// A representative configuration on `arena`.
    pub fn to_configuration(&self, arena: &Arc<Arena>) -> Result<Configuration> {
        let (display, parent) = parse_sexpr(&self.sexpr)?;
        Configuration::new(arena.clone(), display, parent)
    }

    pub fn is_balanced(&self, arena: &Arena) -> bool {
        let (display, _) = parse_sexpr(&self.sexpr).expect("canonical forms parse");
        let pos = display.iter().filter(|&&m| arena.polarity(m) == Polarity::Pos).count();
        2 * pos == display.len()
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.sexpr)
    }
}

fn parse_sexpr(text: &str) -> Result<(Vec<MoveId>, Vec<Option<usize>>)> {
    let b = text.as_bytes();
    let mut pos = 0;
    let mut display = Vec::new();
    let mut parent = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    let err = |pos: usize, m: &str| Error::Syntax { offset: pos, message: m.to_string() };
    loop {
        while pos < b.len() && b[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos >= b.len() {
            break;
        }
        match b[pos] {
            b'(' => {
                pos += 1;
                let start = pos;
                while pos < b.len() && b[pos].is_ascii_digit() {
                    pos += 1;
                }
                let m: MoveId = text[start..pos].parse().map_err(|_| err(start, "expected move id"))?;
                if stack.is_empty() && !display.is_empty() {
                    return Err(err(start, "several roots"));
                }
                parent.push(stack.last().copied());
                stack.push(display.len());
                display.push(m);
            }
            b')' => {
                stack.pop().ok_or_else(|| err(pos, "unbalanced ')'"))?;
                pos += 1;
            }
            _ => return Err(err(pos, "unexpected character")),
        }
    }
    if !stack.is_empty() || display.is_empty() {
        return Err(err(pos, "unbalanced or empty"));
    }
    Ok((display, parent))
}

/// Canonical subtree forms of a labelled rooted tree.
fn tree_keys(display: &[MoveId], parent: &[Option<usize>]) -> Vec<String> {
    let n = display.len();
    let mut children = vec![Vec::new(); n];
    let mut root = 0;
    for e in 0..n {
        match parent[e] {
            Some(p) => children[p].push(e),
            None => root = e,
        }
    }
    let mut order = vec![root];
    let mut i = 0;
    while i < order.len() {
        order.extend(children[order[i]].iter().copied());
        i += 1;
    }
    let mut keys = vec![String::new(); n];
    for &e in order.iter().rev() {
        let mut kids: Vec<String> = children[e].iter().map(|&c| std::mem::take(&mut keys[c])).collect();
        kids.sort_unstable();
        let mut k = format!("({}", display[e]);
        for c in kids {
            k.push(' ');
            k.push_str(&c);
        }
        k.push(')');
        keys[e] = k;
    }
    keys
}

/// Canonical subtree forms, without consuming children (needed for isos).
fn all_keys(x: &Configuration) -> Vec<String> {
    let mut order = vec![x.root()];
    let mut i = 0;
    while i < order.len() {
        order.extend(x.children(order[i]).iter().copied());
        i += 1;
    }
    let mut keys = vec![String::new(); x.len()];
    for &e in order.iter().rev() {
        let mut kids: Vec<&str> = x.children(e).iter().map(|&c| keys[c].as_str()).collect();
        kids.sort_unstable();
        let mut k = format!("({}", x.display(e));
        for c in kids {
            k.push(' ');
            k.push_str(c);
        }
        k.push(')');
        keys[e] = k;
    }
    keys
}

pub fn canonicalize(x: &Configuration) -> Position {
    let mut keys = tree_keys(x.displays(), x.parents());
    Position { size: x.len(), sexpr: std::mem::take(&mut keys[x.root()]) }
}

/// An explicit isomorphism `x → y` (as a map on events), if any.
pub fn config_iso(x: &Configuration, y: &Configuration) -> Option<Vec<usize>> {
    if x.len() != y.len() {
        return None;
    }
    let kx = all_keys(x);
    let ky = all_keys(y);
    if kx[x.root()] != ky[y.root()] {
        return None;
    }
    let mut map = vec![usize::MAX; x.len()];
    let mut stack = vec![(x.root(), y.root())];
    while let Some((a, b)) = stack.pop() {
        map[a] = b;
        let mut pool: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for &c in y.children(b).iter().rev() {
            pool.entry(ky[c].as_str()).or_default().push(c);
        }
        for &c in x.children(a) {
            let d = pool.get_mut(kx[c].as_str())?.pop()?;
            stack.push((c, d));
        }
    }
    Some(map)
}

/// Subtree forms of the events of a configuration.
pub fn subtree_keys(x: &Configuration) -> Vec<String> {
    all_keys(x)
}

/// Positions of the even plays of `sigma` with at most `max_moves` moves.
pub fn positions_of_strategy(sigma: &Strategy, max_moves: usize) -> BTreeSet<Position> {
    sigma
        .plays(max_moves)
        .iter()
        .map(|s| canonicalize(&deseq_play(sigma.arena(), s).expect("plays are well-opened")))
        .collect()
}

/// Positions of the expansions of a causal strategy with at most `max_events` events.
pub fn positions_of_causal<S: CausalSource + ?Sized>(p: &S, max_events: usize) -> BTreeSet<Position> {
    expansions_of(p, max_events, false).iter().map(|(q, _)| canonicalize(&q.config())).collect()
}

pub fn positions_of_augmentations(qs: &[Augmentation]) -> BTreeSet<Position> {
    qs.iter().map(|q| canonicalize(&q.config())).collect()
}

/// All positions of a well-opened arena with at most `max_events` events.
pub fn enumerate_arena_positions(arena: &Arena, max_events: usize) -> BTreeSet<Position> {
    fn trees(arena: &Arena, m: MoveId, budget: usize, memo: &mut BTreeMap<(MoveId, usize), Vec<(usize, String)>>) -> Vec<(usize, String)> {
        if budget == 0 {
            return vec![];
        }
        if let Some(v) = memo.get(&(m, budget)) {
            return v.clone();
        }
        let mut acc: Vec<(Vec<String>, usize)> = vec![(vec![], 1)];
        for &c in arena.children(m) {
            let opts = trees(arena, c, budget - 1, memo);
            let mut next = Vec::new();
            for (kids, used) in &acc {
                pick(&opts, 0, budget - used, &mut kids.clone(), *used, &mut next);
            }
            acc = next;
        }
        let out: Vec<(usize, String)> = acc
            .into_iter()
            .map(|(mut kids, size)| {
                kids.sort_unstable();
                let mut k = format!("({m}");
                for c in kids {
                    k.push(' ');
                    k.push_str(&c);
                }
                k.push(')');
                (size, k)
            })
            .collect();
        memo.insert((m, budget), out.clone());
        out
    }
    fn pick(opts: &[(usize, String)], start: usize, room: usize, chosen: &mut Vec<String>, used: usize, out: &mut Vec<(Vec<String>, usize)>) {
        out.push((chosen.clone(), used));
        for i in start..opts.len() {
            if opts[i].0 <= room {
                chosen.push(opts[i].1.clone());
                pick(opts, i, room - opts[i].0, chosen, used + opts[i].0, out);
                chosen.pop();
            }
        }
    }
    let mut memo = BTreeMap::new();
    let mut out = BTreeSet::new();
    for &r in arena.roots() {
        for (size, sexpr) in trees(arena, r, max_events, &mut memo) {
            out.insert(Position { size, sexpr });
        }
    }
    out
}

/// The two sides of an arrow arena `a ⇒ b` with `b` well-opened.
#[derive(Clone, Debug)]
pub struct ArrowArena {
    pub arena: Arc<Arena>,
    pub left: Arc<Arena>,
    pub right: Arc<Arena>,
    a_map: Vec<MoveId>,
    b_map: Vec<MoveId>,
}

impl ArrowArena {
    pub fn new(left: Arena, right: Arena) -> Result<ArrowArena> {
        if !right.is_well_opened() || !left.roots().iter().all(|_| true) {
            return Err(Error::pre("arrow decomposition needs a well-opened codomain"));
        }
        let (arena, a_map, b_map) = Arena::arrow_well_opened(&left, &right);
        Ok(ArrowArena { arena: Arc::new(arena), left: Arc::new(left), right: Arc::new(right), a_map, b_map })
    }

    /// Reads a type `A -> B` as an arrow arena.
    pub fn from_type(t: &SimpleType) -> Result<ArrowArena> {
        match t {
            SimpleType::Arrow(a, b) => ArrowArena::new(a.arena(), b.arena()),
            SimpleType::O => Err(Error::pre("type o is not an arrow")),
        }
    }

    /// Splits a position into the multiset of left positions hanging off the
    /// root and the remaining right position.
    pub fn split(&self, pos: &Position) -> Result<(Vec<Position>, Position)> {
        let x = pos.to_configuration(&self.arena)?;
        let mut a_inv = BTreeMap::new();
        for (i, &m) in self.a_map.iter().enumerate() {
            a_inv.insert(m, i);
        }
        let mut b_inv = BTreeMap::new();
        for (i, &m) in self.b_map.iter().enumerate() {
            b_inv.insert(m, i);
        }
        let mut lefts = Vec::new();
        let mut right_display = Vec::new();
        let mut right_parent = Vec::new();
        let mut right_index = BTreeMap::new();
        let mut stack = vec![x.root()];
        while let Some(e) = stack.pop() {
            if e != x.root() && a_inv.contains_key(&x.display(e)) && x.parent(e) == Some(x.root()) {
                // a left subtree
                let mut display = Vec::new();
                let mut parent = Vec::new();
                let mut local = BTreeMap::new();
                let mut inner = vec![e];
                while let Some(f) = inner.pop() {
                    local.insert(f, display.len());
                    display.push(a_inv[&x.display(f)]);
                    parent.push(if f == e { None } else { Some(local[&x.parent(f).unwrap()]) });
                    inner.extend(x.children(f).iter().copied());
                }
                let c = Configuration::new(self.left.clone(), display, parent)?;
                lefts.push(canonicalize(&c));
                continue;
            }
            right_index.insert(e, right_display.len());
            right_display.push(b_inv[&x.display(e)]);
            right_parent.push(x.parent(e).map(|p| right_index[&p]));
            stack.extend(x.children(e).iter().copied());
        }
        lefts.sort();
        let right = Configuration::new(self.right.clone(), right_display, right_parent)?;
        Ok((lefts, canonicalize(&right)))
    }

    pub fn join(&self, lefts: &[Position], right: &Position) -> Result<Position> {
        let y = right.to_configuration(&self.right)?;
        let mut display: Vec<MoveId> = y.displays().iter().map(|&m| self.b_map[m]).collect();
        let mut parent: Vec<Option<usize>> = y.parents().to_vec();
        let root = y.root();
        for l in lefts {
            let z = l.to_configuration(&self.left)?;
            let off = display.len();
            display.extend(z.displays().iter().map(|&m| self.a_map[m]));
            parent.extend((0..z.len()).map(|e| Some(z.parent(e).map(|p| p + off).unwrap_or(root))));
        }
        Ok(canonicalize(&Configuration::new(self.arena.clone(), display, parent)?))
    }
}

/// A point of the relational interpretation of a simple type:
/// `q` at `o`, and a pair (multiset of argument points, result point) at arrows.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum RelPoint {
    Q,
    Arrow(Vec<RelPoint>, Box<RelPoint>),
}

impl RelPoint {
    pub fn size(&self) -> usize {
        match self {
            RelPoint::Q => 1,
            RelPoint::Arrow(m, b) => m.iter().map(|p| p.size()).sum::<usize>() + b.size(),
        }
    }
}

impl fmt::Display for RelPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelPoint::Q => write!(f, "q"),
            RelPoint::Arrow(m, b) => {
                write!(f, "([")?;
                for (i, p) in m.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, "], {b})")
            }
        }
    }
}

/// Reads a position of the arena of `t` as a relational point.
pub fn rel_point(t: &SimpleType, pos: &Position) -> Result<RelPoint> {
    let arena = Arc::new(t.arena());
    let x = pos.to_configuration(&arena)?;
    fn go(t: &SimpleType, x: &Configuration, e: usize) -> RelPoint {
        let args = t.args();
        let m = x.display(e);
        let kids = x.arena().children(m).to_vec();
        let mut point = RelPoint::Q;
        for i in (0..args.len()).rev() {
            let mut ms: Vec<RelPoint> =
                x.children(e).iter().filter(|&&c| x.display(c) == kids[i]).map(|&c| go(args[i], x, c)).collect();
            ms.sort();
            point = RelPoint::Arrow(ms, Box::new(point));
        }
        point
    }
    Ok(go(t, &x, x.root()))
}

type Ctx = Vec<Vec<RelPoint>>;

/// Web points of the relational semantics of a closed normal form of type
/// `t`, of size at most `bound`.
pub fn rel_interpret(nf: &Nf, t: &SimpleType, bound: usize) -> BTreeSet<RelPoint> {
    let mut out = BTreeSet::new();
    for (ctx, p) in rel_judgements(nf, t, &[], bound) {
        debug_assert!(ctx.is_empty());
        out.insert(p);
    }
    out
}

fn add_ctx(a: &Ctx, b: &Ctx) -> Ctx {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let mut v = x.clone();
            v.extend(y.iter().cloned());
            v.sort();
            v
        })
        .collect()
}

fn ctx_size(c: &Ctx) -> usize {
    c.iter().flatten().map(|p| p.size()).sum()
}

/// Derivable judgements `ctx ⊢ nf : point` with total size at most `bound`.
fn rel_judgements(nf: &Nf, t: &SimpleType, env: &[SimpleType], bound: usize) -> BTreeSet<(Ctx, RelPoint)> {
    let args: Vec<SimpleType> = t.args().into_iter().cloned().collect();
    let mut inner_env = env.to_vec();
    inner_env.extend(args.iter().cloned());
    let n_outer = env.len();
    let mut out = BTreeSet::new();
    if bound < 2 {
        return out;
    }
    let head = match nf.head {
        NfHead::Bot => return out,
        NfHead::Var(l) => l,
    };
    let head_ty = inner_env[head].clone();
    let head_args: Vec<SimpleType> = head_ty.args().into_iter().cloned().collect();
    // for each argument, the judgements that can be used
    let subs: Vec<Vec<(Ctx, RelPoint, usize)>> = nf
        .args
        .iter()
        .zip(&head_args)
        .map(|(a, at)| {
            rel_judgements(a, at, &inner_env, bound - 2)
                .into_iter()
                .map(|(c, p)| {
                    let s = ctx_size(&c) + p.size();
                    (c, p, s)
                })
                .collect()
        })
        .collect();
    let empty: Ctx = vec![Vec::new(); inner_env.len()];
    let mut acc: Vec<(Ctx, Vec<Vec<RelPoint>>, usize)> = vec![(empty, vec![], 2)];
    for opts in &subs {
        let mut next = Vec::new();
        for (ctx, chosen, used) in &acc {
            let mut buf = Vec::new();
            multiset_judgements(opts, 0, bound - used, &mut Vec::new(), &mut buf);
            for picks in buf {
                let mut c = ctx.clone();
                let mut pts = Vec::new();
                let mut u = *used;
                for &k in &picks {
                    let (jc, jp, js) = &opts[k];
                    c = add_ctx(&c, jc);
                    pts.push(jp.clone());
                    u += js;
                }
                pts.sort();
                let mut ch = chosen.clone();
                ch.push(pts);
                next.push((c, ch, u));
            }
        }
        acc = next;
    }
    for (mut ctx, chosen, _) in acc {
        let mut point = RelPoint::Q;
        for ms in chosen.into_iter().rev() {
            point = RelPoint::Arrow(ms, Box::new(point));
        }
        ctx[head].push(point);
        ctx[head].sort();
        // abstract the binders of this node
        let mut result = RelPoint::Q;
        for i in (n_outer..inner_env.len()).rev() {
            result = RelPoint::Arrow(ctx[i].clone(), Box::new(result));
        }
        ctx.truncate(n_outer);
        if ctx_size(&ctx) + result.size() <= bound {
            out.insert((ctx, result));
        }
    }
    out
}

fn multiset_judgements(opts: &[(Ctx, RelPoint, usize)], start: usize, room: usize, chosen: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    out.push(chosen.clone());
    for i in start..opts.len() {
        if opts[i].2 <= room {
            chosen.push(i);
            multiset_judgements(opts, i, room - opts[i].2, chosen, out);
            chosen.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::parse_simple_type;
    use crate::play::Play;

    fn brute_iso(x: &Configuration, y: &Configuration) -> bool {
        // all display-preserving bijections, checking parents
        fn go(x: &Configuration, y: &Configuration, i: usize, used: &mut Vec<bool>, map: &mut Vec<usize>) -> bool {
            if i == x.len() {
                return (0..x.len()).all(|e| x.parent(e).map(|p| map[p]) == y.parent(map[e]));
            }
            for j in 0..y.len() {
                if !used[j] && x.display(i) == y.display(j) {
                    used[j] = true;
                    map[i] = j;
                    if go(x, y, i + 1, used, map) {
                        return true;
                    }
                    used[j] = false;
                }
            }
            false
        }
        x.len() == y.len() && go(x, y, 0, &mut vec![false; y.len()], &mut vec![0; x.len()])
    }

    #[test]
    fn canonical_forms_agree_with_brute_force() {
        let a = Arc::new(parse_simple_type("(o -> o -> o) -> o -> o").unwrap().0);
        let all: Vec<Configuration> = enumerate_arena_positions(&a, 6).iter().map(|p| p.to_configuration(&a).unwrap()).collect();
        // shuffle event numbering by reversing children order
        for x in all.iter().take(60) {
            for y in all.iter().take(60) {
                let same = canonicalize(x) == canonicalize(y);
                assert_eq!(same, brute_iso(x, y));
                if same {
                    let m = config_iso(x, y).unwrap();
                    assert!((0..x.len()).all(|e| x.parent(e).map(|p| m[p]) == y.parent(m[e])));
                }
            }
        }
    }

    #[test]
    fn kierstead_views_are_isomorphic() {
        let a = Arc::new(parse_simple_type("((o -> o) -> o) -> o").unwrap().0);
        let kx = Play::from_pairs(&[(0, None), (1, Some(0)), (2, Some(1)), (1, Some(0)), (2, Some(3)), (3, Some(2))]);
        let ky = Play::from_pairs(&[(0, None), (1, Some(0)), (2, Some(1)), (1, Some(0)), (2, Some(3)), (3, Some(4))]);
        let x = deseq_play(&a, &kx).unwrap();
        let y = deseq_play(&a, &ky).unwrap();
        assert_eq!(canonicalize(&x), canonicalize(&y));
        let iso = config_iso(&x, &y).unwrap();
        assert_eq!(iso, vec![0, 3, 4, 1, 2, 5]);
        assert_eq!(Position::parse(canonicalize(&x).sexpr()).unwrap(), canonicalize(&x));
        assert!(canonicalize(&x).is_balanced(&a));
    }

    #[test]
    fn split_of_single_event() {
        let t = crate::arena::parse_type("((o -> o) -> o) -> o").unwrap();
        let arr = ArrowArena::from_type(&t).unwrap();
        let p = Position::parse("(0)").unwrap();
        let (l, r) = arr.split(&p).unwrap();
        assert!(l.is_empty());
        assert_eq!(r.sexpr(), "(0)");
        assert_eq!(arr.join(&l, &r).unwrap(), p);
    }

    #[test]
    fn counting_positions() {
        let o = Arena::atom();
        assert_eq!(enumerate_arena_positions(&o, 5).len(), 1);
        let oo = parse_simple_type("o -> o").unwrap().0;
        // root with k copies of the answer
        assert_eq!(enumerate_arena_positions(&oo, 4).len(), 4);
    }
}
