//! Small named examples used by the tests and the command line.

use std::sync::Arc;

use crate::arena::{parse_simple_type, Arena};
use crate::causal::{caus, Augmentation, Configuration};
use crate::lambda::interpret_text;
use crate::play::{Play, Strategy};

/// `((o → o) → o) → o`: moves q, F, A, X in a chain.
pub fn kierstead_arena() -> Arc<Arena> {
    Arc::new(parse_simple_type("((o -> o) -> o) -> o").expect("valid type").0)
}

/// `λf. f(λx. f(λy. x))`
pub fn kierstead_x() -> Strategy {
    let s = Play::from_pairs(&[(0, None), (1, Some(0)), (2, Some(1)), (1, Some(0)), (2, Some(3)), (3, Some(2))]);
    Strategy::from_pviews(kierstead_arena(), &[s]).expect("valid P-view")
}

/// `λf. f(λx. f(λy. y))`
pub fn kierstead_y() -> Strategy {
    let s = Play::from_pairs(&[(0, None), (1, Some(0)), (2, Some(1)), (1, Some(0)), (2, Some(3)), (3, Some(4))]);
    Strategy::from_pviews(kierstead_arena(), &[s]).expect("valid P-view")
}

pub fn kierstead_x_causal() -> Augmentation {
    caus(&kierstead_x()).expect("finite strategy")
}

pub fn kierstead_y_causal() -> Augmentation {
    caus(&kierstead_y()).expect("finite strategy")
}

/// A position of the Kierstead arena with two causal explanations: three
/// head moves, two argument moves on the first and one on each other, and a
/// variable move above each argument move of the first head.
pub fn z_two_explanations() -> Configuration {
    Configuration::new(
        kierstead_arena(),
        vec![0, 1, 1, 1, 2, 2, 2, 2, 3, 3],
        vec![None, Some(0), Some(0), Some(0), Some(1), Some(1), Some(2), Some(3), Some(4), Some(5)],
    )
    .expect("valid configuration")
}

/// A position of the Kierstead arena with a single causal explanation.
pub fn z_one_explanation() -> Configuration {
    Configuration::new(
        kierstead_arena(),
        vec![0, 1, 2, 2, 3, 3, 3, 3, 1, 2, 2, 2, 1, 2],
        vec![None, Some(0), Some(1), Some(1), Some(2), Some(2), Some(2), Some(3), Some(0), Some(8), Some(8), Some(8), Some(0), Some(12)],
    )
    .expect("valid configuration")
}

pub const BRANCHING_TERM: &str = r"\f:o -> o -> o. \x:o. f (f bot x) (f bot bot)";
/// The branch without the variable replaced by ⊥.
pub const BRANCHING_SHORT_PRUNED: &str = r"\f:o -> o -> o. \x:o. f (f bot x) bot";
/// The branch with the variable replaced by ⊥.
pub const BRANCHING_LONG_PRUNED: &str = r"\f:o -> o -> o. \x:o. f (f bot bot) (f bot bot)";

/// The strategy of a closed term (panics on ill-typed input).
pub fn strategy_of(term: &str) -> Strategy {
    interpret_text(term, None).expect("well-typed term").2
}

/// Types whose small total strategies make up the comparison corpus.
pub const CORPUS_TYPES: [&str; 7] = [
    "((o -> o) -> o) -> o",
    "o -> o",
    "o -> o -> o",
    "o -> o -> o -> o",
    "(o -> o) -> o -> o",
    "(o -> o -> o) -> o -> o",
    "((o -> o) -> o) -> o -> o",
];

/// Every total strategy with at most three maximal P-views of length at most
/// six, over each of [`CORPUS_TYPES`].
pub fn corpus() -> Vec<(&'static str, Strategy)> {
    let mut out = vec![];
    for t in CORPUS_TYPES {
        let arena = Arc::new(parse_simple_type(t).expect("valid type").0);
        for s in crate::play::enumerate_total_strategies(&arena, 6, 3) {
            out.push((t, s));
        }
    }
    out
}
