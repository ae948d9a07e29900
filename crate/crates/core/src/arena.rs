//! Arenas: finite negative alternating forests of moves, and the simple
//! types over `o` that generate them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};

pub type MoveId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Polarity {
    #[serde(rename = "-")]
    Neg,
    #[serde(rename = "+")]
    Pos,
}

impl Polarity {
    pub fn flip(self) -> Polarity {
        match self {
            Polarity::Neg => Polarity::Pos,
            Polarity::Pos => Polarity::Neg,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Polarity::Neg => '-',
            Polarity::Pos => '+',
        }
    }
}

/// Serialized form of an arena. Not necessarily valid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawArena {
    pub moves: usize,
    pub parent: Vec<Option<MoveId>>,
    pub polarity: Vec<Polarity>,
    #[serde(default)]
    pub label: Vec<String>,
}

/// Checks the four arena laws on raw data.
pub fn validate_arena(raw: &RawArena) -> Vec<Violation> {
    let n = raw.moves;
    let mut out = Vec::new();
    if raw.parent.len() != n || raw.polarity.len() != n || (!raw.label.is_empty() && raw.label.len() != n) {
        out.push(Violation::new("shape", vec![], "field lengths disagree with move count"));
        return out;
    }
    for (m, p) in raw.parent.iter().enumerate() {
        if let Some(p) = *p {
            if p >= n {
                out.push(Violation::new("forestial", vec![m], format!("parent {p} out of range")));
                return out;
            }
        }
    }
    for m in 0..n {
        let mut cur = m;
        let mut steps = 0;
        while let Some(p) = raw.parent[cur] {
            cur = p;
            steps += 1;
            if steps > n {
                out.push(Violation::new("finitary", vec![m], "infinite ancestor chain"));
                break;
            }
        }
    }
    if !out.is_empty() {
        return out;
    }
    for m in 0..n {
        match raw.parent[m] {
            Some(p) if raw.polarity[p] == raw.polarity[m] => {
                out.push(Violation::new("alternating", vec![p, m], "edge between equal polarities"))
            }
            None if raw.polarity[m] != Polarity::Neg => {
                out.push(Violation::new("negative", vec![m], "minimal move is positive"))
            }
            _ => {}
        }
    }
    out
}

/// A valid arena. Children lists are sorted by id; for arenas built from
/// types the i-th child of a move is its i-th argument.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Arena {
    parent: Vec<Option<MoveId>>,
    polarity: Vec<Polarity>,
    label: Vec<String>,
    children: Vec<Vec<MoveId>>,
    roots: Vec<MoveId>,
}

impl Arena {
    pub fn from_raw(raw: RawArena) -> Result<Arena> {
        let v = validate_arena(&raw);
        if !v.is_empty() {
            return Err(Error::Invalid(v));
        }
        let label = if raw.label.is_empty() { path_labels(&raw.parent) } else { raw.label };
        Ok(Arena::build(raw.parent, raw.polarity, label))
    }

    fn build(parent: Vec<Option<MoveId>>, polarity: Vec<Polarity>, label: Vec<String>) -> Arena {
        let n = parent.len();
        let mut children = vec![Vec::new(); n];
        let mut roots = Vec::new();
        for (m, p) in parent.iter().enumerate() {
            match p {
                Some(p) => children[*p].push(m),
                None => roots.push(m),
            }
        }
        Arena { parent, polarity, label, children, roots }
    }

    fn structural(parent: Vec<Option<MoveId>>, polarity: Vec<Polarity>) -> Arena {
        let label = path_labels(&parent);
        Arena::build(parent, polarity, label)
    }

    pub fn to_raw(&self) -> RawArena {
        RawArena {
            moves: self.len(),
            parent: self.parent.clone(),
            polarity: self.polarity.clone(),
            label: self.label.clone(),
        }
    }

    /// The empty arena `1`.
    pub fn empty() -> Arena {
        Arena::build(vec![], vec![], vec![])
    }

    /// The arena `o`: one negative move.
    pub fn atom() -> Arena {
        Arena::structural(vec![None], vec![Polarity::Neg])
    }

    /// A question with one positive answer per label (`bool`, truncated `nat`).
    pub fn flat(answers: &[&str]) -> Arena {
        let mut parent = vec![None];
        let mut polarity = vec![Polarity::Neg];
        let mut label = vec!["q".to_string()];
        for a in answers {
            parent.push(Some(0));
            polarity.push(Polarity::Pos);
            label.push(a.to_string());
        }
        Arena::build(parent, polarity, label)
    }

    pub fn boolean() -> Arena {
        Arena::flat(&["tt", "ff"])
    }

    pub fn nat_truncated(width: usize) -> Arena {
        let names: Vec<String> = (0..width).map(|i| i.to_string()).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        Arena::flat(&refs)
    }

    pub fn product(a: &Arena, b: &Arena) -> Arena {
        let off = a.len();
        let mut parent = a.parent.clone();
        parent.extend(b.parent.iter().map(|p| p.map(|x| x + off)));
        let mut polarity = a.polarity.clone();
        polarity.extend(b.polarity.iter().copied());
        Arena::structural(parent, polarity)
    }

    /// `a ⇒ b`. For well-opened `b` the result has `b`'s root as move 0,
    /// then the moves of `a` in order (`a`'s move `i` becomes `1 + i`), then
    /// the remaining moves of `b` in order.
    pub fn arrow(a: &Arena, b: &Arena) -> Arena {
        let parts = b.decompose_well_opened();
        let mut acc = Arena::empty();
        for part in &parts {
            let (arr, _, _) = Arena::arrow_well_opened(a, part);
            acc = Arena::product(&acc, &arr);
        }
        acc
    }

    /// Arrow into a well-opened arena, with the embeddings of both sides.
    pub fn arrow_well_opened(a: &Arena, b: &Arena) -> (Arena, Vec<MoveId>, Vec<MoveId>) {
        assert!(b.is_well_opened(), "arrow target must be well-opened");
        let r = b.roots[0];
        let na = a.len();
        let a_map: Vec<MoveId> = (0..na).map(|i| 1 + i).collect();
        let mut b_map = vec![0; b.len()];
        let mut next = 1 + na;
        for (m, slot) in b_map.iter_mut().enumerate() {
            if m != r {
                *slot = next;
                next += 1;
            }
        }
        let total = na + b.len();
        let mut parent = vec![None; total];
        let mut polarity = vec![Polarity::Neg; total];
        for m in 0..na {
            parent[a_map[m]] = Some(match a.parent[m] {
                Some(p) => a_map[p],
                None => 0,
            });
            polarity[a_map[m]] = a.polarity[m].flip();
        }
        for m in 0..b.len() {
            parent[b_map[m]] = b.parent[m].map(|p| b_map[p]);
            polarity[b_map[m]] = b.polarity[m];
        }
        (Arena::structural(parent, polarity), a_map, b_map)
    }

    pub fn decompose_well_opened(&self) -> Vec<Arena> {
        self.decompose_with_maps().into_iter().map(|(a, _)| a).collect()
    }

    /// Sub-arenas below each minimal move; the map sends sub-arena ids to ids here.
    pub fn decompose_with_maps(&self) -> Vec<(Arena, Vec<MoveId>)> {
        self.roots
            .iter()
            .map(|&r| {
                let mut members = vec![r];
                let mut i = 0;
                while i < members.len() {
                    members.extend(self.children[members[i]].iter().copied());
                    i += 1;
                }
                members[1..].sort_unstable();
                let mut local = std::collections::HashMap::new();
                for (k, &m) in members.iter().enumerate() {
                    local.insert(m, k);
                }
                let parent = members.iter().map(|&m| self.parent[m].map(|p| local[&p])).collect();
                let polarity = members.iter().map(|&m| self.polarity[m]).collect();
                let label = members.iter().map(|&m| self.label[m].clone()).collect();
                (Arena::build(parent, polarity, label), members)
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn parent(&self, m: MoveId) -> Option<MoveId> {
        self.parent[m]
    }

    pub fn polarity(&self, m: MoveId) -> Polarity {
        self.polarity[m]
    }

    pub fn label(&self, m: MoveId) -> &str {
        &self.label[m]
    }

    pub fn children(&self, m: MoveId) -> &[MoveId] {
        &self.children[m]
    }

    pub fn roots(&self) -> &[MoveId] {
        &self.roots
    }

    pub fn is_minimal(&self, m: MoveId) -> bool {
        self.parent[m].is_none()
    }

    pub fn is_well_opened(&self) -> bool {
        self.roots.len() == 1
    }

    pub fn root(&self) -> Option<MoveId> {
        if self.is_well_opened() {
            Some(self.roots[0])
        } else {
            None
        }
    }

    pub fn depth(&self, m: MoveId) -> usize {
        let mut d = 0;
        let mut cur = m;
        while let Some(p) = self.parent[cur] {
            cur = p;
            d += 1;
        }
        d
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph arena {\n  node [shape=plaintext];\n");
        for m in 0..self.len() {
            s.push_str(&format!(
                "  m{m} [label=<q<sup>{}</sup><sub>{}</sub>>];\n",
                self.polarity[m].symbol(),
                escape(&self.label[m])
            ));
        }
        for m in 0..self.len() {
            if let Some(p) = self.parent[m] {
                s.push_str(&format!("  m{p} -> m{m} [style=dotted, arrowhead=none];\n"));
            }
        }
        s.push_str("}\n");
        s
    }
}

pub(crate) fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Labels recording the argument path: `q`, `q.1`, `q.1.2`, ...
fn path_labels(parent: &[Option<MoveId>]) -> Vec<String> {
    let n = parent.len();
    let mut label = vec![String::new(); n];
    let roots: Vec<MoveId> = (0..n).filter(|&m| parent[m].is_none()).collect();
    let mut index = vec![0usize; n];
    let mut counts = vec![0usize; n];
    for m in 0..n {
        if let Some(p) = parent[m] {
            counts[p] += 1;
            index[m] = counts[p];
        }
    }
    // ids are not necessarily topologically ordered, so resolve recursively
    fn go(m: MoveId, parent: &[Option<MoveId>], index: &[usize], roots: &[MoveId], label: &mut Vec<String>) {
        if !label[m].is_empty() {
            return;
        }
        label[m] = match parent[m] {
            None if roots.len() == 1 => "q".to_string(),
            None => format!("q#{}", roots.iter().position(|&r| r == m).unwrap() + 1),
            Some(p) => {
                go(p, parent, index, roots, label);
                format!("{}.{}", label[p], index[m])
            }
        };
    }
    for m in 0..n {
        go(m, parent, &index, &roots, &mut label);
    }
    label
}

/// Simple types over the single base type `o`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SimpleType {
    O,
    Arrow(Box<SimpleType>, Box<SimpleType>),
}

impl SimpleType {
    pub fn arrow(a: SimpleType, b: SimpleType) -> SimpleType {
        SimpleType::Arrow(Box::new(a), Box::new(b))
    }

    /// Argument types, outermost first.
    pub fn args(&self) -> Vec<&SimpleType> {
        let mut out = Vec::new();
        let mut t = self;
        while let SimpleType::Arrow(a, b) = t {
            out.push(a.as_ref());
            t = b;
        }
        out
    }

    pub fn arena(&self) -> Arena {
        match self {
            SimpleType::O => Arena::atom(),
            SimpleType::Arrow(a, b) => Arena::arrow(&a.arena(), &b.arena()),
        }
    }

    pub fn order(&self) -> usize {
        match self {
            SimpleType::O => 0,
            SimpleType::Arrow(a, b) => (a.order() + 1).max(b.order()),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            SimpleType::O => 1,
            SimpleType::Arrow(a, b) => a.size() + b.size(),
        }
    }
}

impl fmt::Display for SimpleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimpleType::O => write!(f, "o"),
            SimpleType::Arrow(a, b) => match a.as_ref() {
                SimpleType::O => write!(f, "o -> {b}"),
                _ => write!(f, "({a}) -> {b}"),
            },
        }
    }
}

/// Parses `T ::= o | T -> T | (T)`, arrow to the right.
pub fn parse_type(text: &str) -> Result<SimpleType> {
    let mut p = TypeParser { src: text.as_bytes(), pos: 0 };
    let t = p.ty()?;
    p.ws();
    if p.pos != p.src.len() {
        return Err(p.err("trailing input"));
    }
    Ok(t)
}

pub fn parse_simple_type(text: &str) -> Result<(Arena, SimpleType)> {
    let t = parse_type(text)?;
    Ok((t.arena(), t))
}

pub(crate) struct TypeParser<'a> {
    pub src: &'a [u8],
    pub pos: usize,
}

impl TypeParser<'_> {
    pub fn ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    pub fn err(&self, msg: &str) -> Error {
        Error::Syntax { offset: self.pos, message: msg.to_string() }
    }

    pub fn ty(&mut self) -> Result<SimpleType> {
        let a = self.atom()?;
        self.ws();
        if self.src[self.pos..].starts_with(b"->") {
            self.pos += 2;
            let b = self.ty()?;
            return Ok(SimpleType::arrow(a, b));
        }
        Ok(a)
    }

    fn atom(&mut self) -> Result<SimpleType> {
        self.ws();
        match self.src.get(self.pos) {
            Some(b'o') => {
                let next = self.src.get(self.pos + 1);
                if next.is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_') {
                    return Err(self.err("expected type"));
                }
                self.pos += 1;
                Ok(SimpleType::O)
            }
            Some(b'(') => {
                self.pos += 1;
                let t = self.ty()?;
                self.ws();
                if self.src.get(self.pos) != Some(&b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(t)
            }
            _ => Err(self.err("expected type")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Polarity::*;

    fn shape(a: &Arena) -> (Vec<Option<usize>>, Vec<Polarity>) {
        (a.parent.clone(), a.polarity.clone())
    }

    #[test]
    fn atom_and_arrow() {
        let o = Arena::atom();
        assert_eq!(shape(&o), (vec![None], vec![Neg]));
        assert!(validate_arena(&o.to_raw()).is_empty());
        let oo = Arena::arrow(&o, &o);
        assert_eq!(shape(&oo), (vec![None, Some(0)], vec![Neg, Pos]));
        assert_eq!(Arena::arrow(&Arena::empty(), &o), o);
        assert!(Arena::arrow(&o, &Arena::empty()).is_empty());
    }

    #[test]
    fn three_argument_arena() {
        let (a, _) = parse_simple_type("(o -> o) -> o -> o").unwrap();
        assert_eq!(shape(&a), (vec![None, Some(0), Some(1), Some(0)], vec![Neg, Pos, Neg, Pos]));
        assert_eq!(a.label(1), "q.1");
        assert_eq!(a.label(2), "q.1.1");
        assert_eq!(a.label(3), "q.2");
    }

    #[test]
    fn kierstead_chain() {
        let (a, _) = parse_simple_type("((o -> o) -> o) -> o").unwrap();
        assert_eq!(shape(&a), (vec![None, Some(0), Some(1), Some(2)], vec![Neg, Pos, Neg, Pos]));
        assert_eq!(parse_simple_type("o").unwrap().0, Arena::atom());
    }

    #[test]
    fn product_and_decompose() {
        let o = Arena::atom();
        let oo = Arena::product(&o, &o);
        assert_eq!(oo.roots(), &[0, 1]);
        assert!(oo.decompose_well_opened().iter().all(|p| shape(p) == shape(&o)));
        let (f3, _) = parse_simple_type("(o -> o) -> o -> o").unwrap();
        let p = Arena::product(&f3, &o);
        let parts = p.decompose_well_opened();
        assert_eq!(shape(&parts[0]), shape(&f3));
        assert_eq!(shape(&parts[1]), shape(&o));
        assert_eq!(Arena::product(&f3, &Arena::empty()), f3);
    }

    #[test]
    fn arrow_distributes_over_products() {
        let o = Arena::atom();
        let oo = Arena::product(&o, &o);
        let a = Arena::arrow(&o, &oo);
        assert_eq!(a.roots().len(), 2);
        assert_eq!(a.len(), 4);
    }

    #[test]
    fn violations() {
        let bad = RawArena { moves: 1, parent: vec![None], polarity: vec![Pos], label: vec![] };
        assert_eq!(validate_arena(&bad)[0].law, "negative");
        let bad = RawArena { moves: 2, parent: vec![None, Some(0)], polarity: vec![Neg, Neg], label: vec![] };
        assert_eq!(validate_arena(&bad)[0].law, "alternating");
        let bad = RawArena { moves: 2, parent: vec![Some(1), Some(0)], polarity: vec![Neg, Pos], label: vec![] };
        assert_eq!(validate_arena(&bad)[0].law, "finitary");
        assert!(validate_arena(&Arena::boolean().to_raw()).is_empty());
    }

    #[test]
    fn parse_errors_have_offsets() {
        match parse_type("o -> ") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("{other:?}"),
        }
        assert!(parse_type("(o -> o").is_err());
        assert_eq!(parse_type("o->o->o").unwrap().to_string(), "o -> o -> o");
    }
}
