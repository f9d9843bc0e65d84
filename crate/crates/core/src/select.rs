//! Mapping of run-time facts onto dispatch ids.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::dispatch::{Element, TypeTag};
use crate::type_seq;

/// Canonical floating-point sequence; position = [`FloatPrecision::id`].
pub type FloatTypes = type_seq![f32, f64];

/// Canonical index sequence; position = [`IndexWidth::id`].
pub type IndexTypes = type_seq![u8, u16, u32, u64];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SelectError {
    #[error("no index width covers an array of {0} elements (need 1 <= size <= 2^64)")]
    OutOfDomain(u128),
    #[error("unsupported index width {0} (expected 8, 16, 32 or 64)")]
    UnsupportedWidth(u32),
    #[error("cannot read index width from {0:?}")]
    UnparsableWidth(String),
    #[error("unknown precision {0:?} (expected \"single\" or \"double\")")]
    UnknownPrecision(String),
}

/// Bit width of the unsigned integers used to store matrix indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IndexWidth {
    U8,
    U16,
    U32,
    U64,
}

impl IndexWidth {
    pub const ALL: [IndexWidth; 4] = [
        IndexWidth::U8,
        IndexWidth::U16,
        IndexWidth::U32,
        IndexWidth::U64,
    ];

    pub fn from_bits(bits: u32) -> Result<Self, SelectError> {
        match bits {
            8 => Ok(IndexWidth::U8),
            16 => Ok(IndexWidth::U16),
            32 => Ok(IndexWidth::U32),
            64 => Ok(IndexWidth::U64),
            other => Err(SelectError::UnsupportedWidth(other)),
        }
    }

    pub fn bits(self) -> u32 {
        8 << self.id()
    }

    pub fn bytes(self) -> u64 {
        u64::from(self.bits() / 8)
    }

    /// Position in [`IndexTypes`]: `log2(bits) - 3`.
    pub fn id(self) -> usize {
        self as usize
    }

    pub fn tag(self) -> TypeTag {
        match self {
            IndexWidth::U8 => u8::TAG,
            IndexWidth::U16 => u16::TAG,
            IndexWidth::U32 => u32::TAG,
            IndexWidth::U64 => u64::TAG,
        }
    }

    pub fn from_tag(tag: TypeTag) -> Option<Self> {
        Self::ALL.into_iter().find(|w| w.tag() == tag)
    }
}

impl fmt::Display for IndexWidth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bits())
    }
}

impl FromStr for IndexWidth {
    type Err = SelectError;

    /// Accepts `8`, `16`, `32`, `64` or the type names `u8` .. `u64`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let digits = s.strip_prefix('u').unwrap_or(s);
        match digits.parse::<u32>() {
            Ok(bits) => Self::from_bits(bits),
            Err(_) => Err(SelectError::UnparsableWidth(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FloatPrecision {
    Single,
    Double,
}

impl FloatPrecision {
    pub const ALL: [FloatPrecision; 2] = [FloatPrecision::Single, FloatPrecision::Double];

    /// Position in [`FloatTypes`].
    pub fn id(self) -> usize {
        self as usize
    }

    pub fn bytes(self) -> u64 {
        match self {
            FloatPrecision::Single => 4,
            FloatPrecision::Double => 8,
        }
    }

    pub fn tag(self) -> TypeTag {
        match self {
            FloatPrecision::Single => f32::TAG,
            FloatPrecision::Double => f64::TAG,
        }
    }

    pub fn from_tag(tag: TypeTag) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.tag() == tag)
    }

    pub fn name(self) -> &'static str {
        match self {
            FloatPrecision::Single => "single",
            FloatPrecision::Double => "double",
        }
    }
}

impl fmt::Display for FloatPrecision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FloatPrecision {
    type Err = SelectError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        precision_from_flag(s)
    }
}

/// Narrowest unsigned width `b` with `xi <= 2^b`, i.e. the narrowest type
/// able to index every element of an array of size `xi`.
pub fn min_index_width(xi: u128) -> Result<IndexWidth, SelectError> {
    if xi == 0 || xi > 1u128 << 64 {
        return Err(SelectError::OutOfDomain(xi));
    }
    Ok(IndexWidth::ALL
        .into_iter()
        .find(|w| xi <= 1u128 << w.bits())
        .expect("xi <= 2^64 is covered by the widest width"))
}

pub fn precision_from_flag(flag: &str) -> Result<FloatPrecision, SelectError> {
    match flag {
        "single" => Ok(FloatPrecision::Single),
        "double" => Ok(FloatPrecision::Double),
        other => Err(SelectError::UnknownPrecision(other.to_string())),
    }
}

/// Ordered conditions selecting an id in a sequence of `len()` types.
///
/// The first condition that holds at position `k` selects id `k`; when none
/// holds the last id is selected. Conditions are evaluated lazily and never
/// past the first one that holds.
#[derive(Default)]
pub struct SelectionLadder<'a> {
    conditions: Vec<Box<dyn Fn() -> bool + 'a>>,
}

impl<'a> SelectionLadder<'a> {
    pub fn new() -> Self {
        SelectionLadder {
            conditions: Vec::new(),
        }
    }

    pub fn case(mut self, condition: impl Fn() -> bool + 'a) -> Self {
        self.conditions.push(Box::new(condition));
        self
    }

    /// Length of the sequence the ladder selects into.
    pub fn len(&self) -> usize {
        self.conditions.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

pub fn select_id(ladder: &SelectionLadder<'_>) -> usize {
    ladder
        .conditions
        .iter()
        .position(|c| c())
        .unwrap_or(ladder.conditions.len())
}

/// The index-width ladder over [`IndexTypes`]:
/// `xi <= 2^8`, `xi <= 2^16`, `xi <= 2^32`, otherwise 64 bits.
pub fn width_ladder<'a>(xi: u128) -> SelectionLadder<'a> {
    SelectionLadder::new()
        .case(move || xi <= 1 << 8)
        .case(move || xi <= 1 << 16)
        .case(move || xi <= 1 << 32)
}
