//! Innocent strategies, causal strategies and positions for simply-typed
//! λ-terms, with tools to compare them.

pub mod arena;
pub mod bisim;
pub mod causal;
pub mod error;
pub mod inject;
pub mod lambda;
pub mod play;
pub mod position;
pub mod samples;

pub use arena::{Arena, MoveId, Polarity, RawArena, SimpleType};
pub use causal::{Augmentation, Configuration};
pub use error::{Error, Result, Violation};
pub use lambda::{Nf, NfHead, Term};
pub use play::{Play, Strategy};
pub use position::Position;
