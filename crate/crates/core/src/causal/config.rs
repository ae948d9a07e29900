use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arena::{escape, Arena, MoveId, Polarity};
use crate::error::{Error, Result, Violation};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawConfiguration {
    pub display: Vec<MoveId>,
    pub parent: Vec<Option<usize>>,
}

/// A finite tree of events labelled by arena moves.
#[derive(Clone, Debug)]
pub struct Configuration {
    arena: Arc<Arena>,
    display: Vec<MoveId>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    root: usize,
}

/// Checks that `parent` is a single rooted tree over `0..n`; returns the root.
pub(crate) fn check_tree(parent: &[Option<usize>], what: &str) -> std::result::Result<usize, Violation> {
    let n = parent.len();
    let roots: Vec<usize> = (0..n).filter(|&e| parent[e].is_none()).collect();
    if roots.len() != 1 {
        return Err(Violation::new(what, roots, "expected exactly one root"));
    }
    for e in 0..n {
        if let Some(p) = parent[e] {
            if p >= n {
                return Err(Violation::new(what, vec![e], "parent out of range"));
            }
        }
        let mut cur = e;
        let mut steps = 0;
        while let Some(p) = parent[cur] {
            cur = p;
            steps += 1;
            if steps > n {
                return Err(Violation::new(what, vec![e], "cycle"));
            }
        }
    }
    Ok(roots[0])
}

pub(crate) fn children_of(parent: &[Option<usize>]) -> Vec<Vec<usize>> {
    let mut ch = vec![Vec::new(); parent.len()];
    for (e, p) in parent.iter().enumerate() {
        if let Some(p) = p {
            ch[*p].push(e);
        }
    }
    ch
}

impl Configuration {
    pub fn new(arena: Arc<Arena>, display: Vec<MoveId>, parent: Vec<Option<usize>>) -> Result<Configuration> {
        if display.is_empty() || display.len() != parent.len() {
            return Err(Error::invalid("shape", vec![], "empty configuration or length mismatch"));
        }
        if let Some(e) = display.iter().position(|&m| m >= arena.len()) {
            return Err(Error::invalid("shape", vec![e], "display outside the arena"));
        }
        let root = check_tree(&parent, "tree").map_err(|v| Error::Invalid(vec![v]))?;
        let mut v = Vec::new();
        for e in 0..display.len() {
            match parent[e] {
                None if !arena.is_minimal(display[e]) => {
                    v.push(Violation::new("minimality-respecting", vec![e], "root displays a non-minimal move"))
                }
                Some(p) if arena.parent(display[e]) != Some(display[p]) => {
                    v.push(Violation::new("causality-preserving", vec![p, e], "edge is not an arena edge"))
                }
                _ => {}
            }
        }
        if !v.is_empty() {
            return Err(Error::Invalid(v));
        }
        let children = children_of(&parent);
        Ok(Configuration { arena, display, parent, children, root })
    }

    pub fn from_raw(arena: Arc<Arena>, raw: RawConfiguration) -> Result<Configuration> {
        Configuration::new(arena, raw.display, raw.parent)
    }

    pub fn to_raw(&self) -> RawConfiguration {
        RawConfiguration { display: self.display.clone(), parent: self.parent.clone() }
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

    pub fn parent(&self, e: usize) -> Option<usize> {
        self.parent[e]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    pub fn children(&self, e: usize) -> &[usize] {
        &self.children[e]
    }

    pub fn polarity(&self, e: usize) -> Polarity {
        self.arena.polarity(self.display[e])
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph configuration {\n  node [shape=plaintext];\n");
        for e in 0..self.len() {
            s.push_str(&format!(
                "  e{e} [label=<{e}: q<sup>{}</sup><sub>{}</sub>>];\n",
                self.polarity(e).symbol(),
                escape(self.arena.label(self.display[e]))
            ));
        }
        for e in 0..self.len() {
            if let Some(p) = self.parent[e] {
                s.push_str(&format!("  e{p} -> e{e} [style=dotted, arrowhead=none];\n"));
            }
        }
        s.push_str("}\n");
        s
    }
}
