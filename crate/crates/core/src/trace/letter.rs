// SPDX-License-Identifier: Apache-2.0

//! Letters of the free algebra on `p` processes and `r` deterministic matrices.

use std::fmt;

use crate::error::{Error, Result};

/// Which of the four matrices attached to a process a letter stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variant {
    Id,
    Star,
    Inv,
    InvStar,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Id, Variant::Star, Variant::Inv, Variant::InvStar];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Variant of the adjoint letter.
    pub fn adjoint(self) -> Variant {
        match self {
            Variant::Id => Variant::Star,
            Variant::Star => Variant::Id,
            Variant::Inv => Variant::InvStar,
            Variant::InvStar => Variant::Inv,
        }
    }

    pub fn suffix(self) -> &'static str {
        match self {
            Variant::Id => "",
            Variant::Star => "*",
            Variant::Inv => "^-1",
            Variant::InvStar => "^-1*",
        }
    }
}

/// Source of a letter: a random process or a deterministic matrix (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Source {
    Process(usize),
    Det(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub source: Source,
    pub variant: Variant,
}

impl Letter {
    /// Process letter with a 0-based index.
    pub const fn process(index: usize, variant: Variant) -> Self {
        Letter {
            source: Source::Process(index),
            variant,
        }
    }

    /// Deterministic letter; only `Id` and `Star` are meaningful.
    pub fn det(index: usize, variant: Variant) -> Result<Self> {
        match variant {
            Variant::Id | Variant::Star => Ok(Letter {
                source: Source::Det(index),
                variant,
            }),
            _ => Err(Error::UnsupportedLetter(format!(
                "a{}{} (deterministic letters admit no inverse)",
                index + 1,
                variant.suffix()
            ))),
        }
    }

    pub fn process_index(&self) -> Option<usize> {
        match self.source {
            Source::Process(l) => Some(l),
            Source::Det(_) => None,
        }
    }

    pub fn is_det(&self) -> bool {
        matches!(self.source, Source::Det(_))
    }

    pub fn adjoint(&self) -> Letter {
        Letter {
            source: self.source,
            variant: self.variant.adjoint(),
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.source {
            Source::Process(l) => write!(f, "g{}{}", l + 1, self.variant.suffix()),
            Source::Det(j) => write!(f, "a{}{}", j + 1, self.variant.suffix()),
        }
    }
}
