use thiserror::Error;

use crate::famkit::FinSet;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("{0} is not a limit ordinal")]
    NotLimit(String),

    #[error("query {set} exceeds the family window {window}")]
    OutOfWindow { set: FinSet, window: u32 },

    #[error("index {index} is past the end of a finite index set of size {len}")]
    IndexOverflow { index: u32, len: usize },

    #[error("element {element} of {set} does not belong to the index set")]
    NotInIndexSet { element: u32, set: FinSet },

    #[error("family is not thin: {shorter} is a proper initial segment of {longer}")]
    NotThin { shorter: FinSet, longer: FinSet },

    #[error("empty part at position {0}")]
    EmptyPart(usize),

    #[error("tuple is not a block sequence: part {0} does not lie strictly after part {1}")]
    NotBlock(usize, usize),

    #[error("{0}")]
    Unsupported(String),

    #[error("{0}")]
    Precondition(String),

    #[error("support of size {size} exceeds the Tsirelson evaluation cap of {cap}")]
    SupportTooLarge { size: usize, cap: usize },

    #[error("component index {index} out of range for a direct sum of {len}")]
    BadComponent { index: usize, len: usize },

    #[error("rules do not share a host oracle: {0} vs {1}")]
    HostMismatch(String, String),

    #[error("table rule has no entry for {0}")]
    MissingEntry(FinSet),

    #[error("no member of the family is an initial segment of {diagonal} (s = {s}, i = {i})")]
    PrefixMissing { s: FinSet, i: usize, diagonal: FinSet },

    #[error("more than one member of the family is an initial segment of {diagonal} (s = {s}, i = {i})")]
    PrefixNotUnique { s: FinSet, i: usize, diagonal: FinSet },

    #[error("handle {0} is degenerate (identically zero on the tested points)")]
    Degenerate(String),

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn parse(pos: usize, msg: impl Into<String>) -> Self {
        Error::Parse { pos, msg: msg.into() }
    }
}
