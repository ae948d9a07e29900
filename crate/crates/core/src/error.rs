use std::fmt;

use serde::Serialize;

/// A broken law, with the offending indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub law: String,
    pub witness: Vec<usize>,
    pub detail: String,
}

impl Violation {
    pub fn new(law: &str, witness: Vec<usize>, detail: impl Into<String>) -> Self {
        Violation { law: law.to_string(), witness, detail: detail.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:?}: {}", self.law, self.witness, self.detail)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("type error: {0}")]
    Type(String),
    #[error("invalid input: {}", join(.0))]
    Invalid(Vec<Violation>),
    #[error("{0}")]
    Precondition(String),
    #[error("resource bound exceeded: {0}")]
    Bound(String),
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

impl Error {
    pub fn invalid(law: &str, witness: Vec<usize>, detail: impl Into<String>) -> Self {
        Error::Invalid(vec![Violation::new(law, witness, detail)])
    }

    pub fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
