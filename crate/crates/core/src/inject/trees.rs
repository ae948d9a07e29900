//! Simple trees with bounded branching budgets.

use std::collections::HashMap;

use serde::Serialize;

use crate::causal::Augmentation;
use crate::error::{Error, Result};

/// A finite unlabelled rooted tree; children are kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SimpleTree {
    pub children: Vec<SimpleTree>,
}

impl SimpleTree {
    pub fn leaf() -> SimpleTree {
        SimpleTree { children: vec![] }
    }

    pub fn node(mut children: Vec<SimpleTree>) -> SimpleTree {
        children.sort();
        SimpleTree { children }
    }

    /// Root of arity `k` over `k` copies of `t(k-1)`.
    pub fn t(k: usize) -> SimpleTree {
        if k == 0 {
            return SimpleTree::leaf();
        }
        SimpleTree::node(vec![SimpleTree::t(k - 1); k])
    }

    pub fn arity(&self) -> usize {
        self.children.len()
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(|c| c.size()).sum::<usize>()
    }

    /// Number of nodes on a longest branch.
    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    /// Index `k` holds the number of nodes of arity `k`.
    pub fn arity_counts(&self) -> Vec<usize> {
        let mut out = vec![];
        fn go(t: &SimpleTree, out: &mut Vec<usize>) {
            if out.len() <= t.arity() {
                out.resize(t.arity() + 1, 0);
            }
            out[t.arity()] += 1;
            for c in &t.children {
                go(c, out);
            }
        }
        go(self, &mut out);
        out
    }

    /// Depth at most `n + 1` and exactly `n!/k!` nodes of arity `k` for
    /// `2 ≤ k ≤ n`, none above `n`.
    pub fn in_trees(&self, n: usize) -> bool {
        let counts = self.arity_counts();
        self.depth() <= n + 1
            && counts.len() <= n + 1
            && (2..=n).all(|k| counts.get(k).copied().unwrap_or(0) as u64 == budget(n, k))
    }
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

fn budget(n: usize, k: usize) -> u64 {
    factorial(n) / factorial(k)
}

/// `|t(k)| = Σ_{i ≤ k} k!/i!`.
pub fn t_size(k: usize) -> u64 {
    (0..=k).map(|i| budget(k, i)).sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct TreeSearch {
    pub n: usize,
    pub size: usize,
    /// Distinct level profiles reaching the maximum.
    pub optimal_profiles: u64,
    pub tree: SimpleTree,
    pub is_t_n: bool,
}

/// Per level, the arity of each node (sorted decreasingly).
type Profile = Vec<Vec<usize>>;

struct Dp {
    n: usize,
    memo: HashMap<(usize, usize, Vec<usize>), Option<(usize, u64, Profile)>>,
}

impl Dp {
    /// Best completion with `m` nodes at `level` and `rem[k-2]` nodes of
    /// arity `k` still to place.
    fn best(&mut self, level: usize, m: usize, rem: Vec<usize>) -> Option<(usize, u64, Profile)> {
        if m == 0 {
            return rem.iter().all(|&r| r == 0).then(|| (0, 1, vec![]));
        }
        if level > self.n + 1 {
            return None;
        }
        let key = (level, m, rem.clone());
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let mut acc: Option<(usize, u64, Profile)> = None;
        let mut choice = vec![0; rem.len()];
        self.choose(level, m, &rem, 0, &mut choice, &mut acc);
        self.memo.insert(key, acc.clone());
        acc
    }

    fn choose(&mut self, level: usize, m: usize, rem: &[usize], i: usize, c: &mut Vec<usize>, acc: &mut Option<(usize, u64, Profile)>) {
        if i < rem.len() {
            let used: usize = c[..i].iter().sum();
            for x in 0..=rem[i].min(m - used) {
                c[i] = x;
                self.choose(level, m, rem, i + 1, c, acc);
            }
            c[i] = 0;
            return;
        }
        let used: usize = c.iter().sum();
        let wide: usize = c.iter().enumerate().map(|(i, x)| (i + 2) * x).sum();
        let next_rem: Vec<usize> = rem.iter().zip(c.iter()).map(|(r, x)| r - x).collect();
        for ones in 0..=(m - used) {
            let Some((sub, count, prof)) = self.best(level + 1, wide + ones, next_rem.clone()) else { continue };
            let total = m + sub;
            let mut row: Vec<usize> = Vec::with_capacity(m);
            for (i, &x) in c.iter().enumerate().rev() {
                row.extend(std::iter::repeat(i + 2).take(x));
            }
            row.extend(std::iter::repeat(1).take(ones));
            row.extend(std::iter::repeat(0).take(m - used - ones));
            match acc {
                Some((b, cnt, _)) if *b == total => *cnt += count,
                Some((b, _, _)) if *b > total => {}
                _ => {
                    let mut p = vec![row];
                    p.extend(prof);
                    *acc = Some((total, count, p));
                }
            }
        }
    }
}

fn tree_of_profile(p: &Profile) -> SimpleTree {
    let mut below: Vec<SimpleTree> = vec![];
    for row in p.iter().rev() {
        let mut it = below.into_iter();
        below = row.iter().map(|&a| SimpleTree::node(it.by_ref().take(a).collect())).collect();
    }
    below.pop().unwrap_or_else(SimpleTree::leaf)
}

/// The largest tree of `Trees(n)`, by dynamic programming over levels.
pub fn max_tree_search(n: usize) -> Result<TreeSearch> {
    if n > 5 {
        return Err(Error::Bound(format!("tree search limited to n ≤ 5, got {n}")));
    }
    let rem: Vec<usize> = (2..=n).map(|k| budget(n, k) as usize).collect();
    let mut dp = Dp { n, memo: HashMap::new() };
    let (size, optimal_profiles, prof) = dp.best(1, 1, rem).ok_or_else(|| Error::pre("no tree meets the budget"))?;
    let tree = tree_of_profile(&prof);
    let is_t_n = tree == SimpleTree::t(n);
    Ok(TreeSearch { n, size, optimal_profiles, tree, is_t_n })
}

/// The tree of Player events of an expansion: a Player event's children are
/// the Player events two causal steps above it.
pub fn tree_of_expansion(q: &Augmentation) -> Option<SimpleTree> {
    fn go(q: &Augmentation, b: usize) -> SimpleTree {
        let kids = q.succ(b).iter().filter_map(|&c| q.response(c)).map(|d| go(q, d)).collect();
        SimpleTree::node(kids)
    }
    q.response(q.root()).map(|r| go(q, r))
}
