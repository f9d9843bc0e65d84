//! Run-time selection of one statically specialized kernel instance.
//!
//! A kernel family is a type implementing one of [`Kernel1`] ..
//! [`Kernel4`], whose `apply` method is generic over one to four element
//! types. Given one type sequence per dimension and one zero-based id per
//! dimension, [`for_id`] invokes `apply` with the element types found at
//! those positions. Every member of the Cartesian product is compiled
//! ahead of time; at run time each dimension is resolved with a linear
//! scan, so a request costs `sum(id_i + 1)` position tests rather than a
//! ladder over all `prod(n_i)` combinations.
//!
//! ```
//! use forid::dispatch::{for_id, Element, Kernel2};
//! use forid::type_seq;
//!
//! struct Sizes(usize);
//!
//! impl Kernel2 for Sizes {
//!     type Output = ();
//!     fn apply<F: Element, I: Element>(&mut self) {
//!         self.0 = std::mem::size_of::<F>() + std::mem::size_of::<I>();
//!     }
//! }
//!
//! type Fp = type_seq![f32, f64];
//! type Ind = type_seq![u8, u16, u32, u64];
//!
//! let mut k = Sizes(0);
//! for_id::<(Fp, Ind), _>(&mut k, [1, 2]).unwrap();
//! assert_eq!(k.0, 8 + 4);
//! ```
//!
//! A sequence that repeats a type is rejected when the dispatch using it
//! is compiled:
//!
//! ```compile_fail
//! use forid::dispatch::{for_id, Element, Kernel1};
//! use forid::type_seq;
//!
//! struct Nop;
//! impl Kernel1 for Nop {
//!     type Output = ();
//!     fn apply<A: Element>(&mut self) {}
//! }
//!
//! for_id::<(type_seq![f32, f64, f32],), _>(&mut Nop, [0]).unwrap();
//! ```

mod arity;
mod element;
mod seq;

use std::time::{Duration, Instant};

use thiserror::Error;

pub use arity::{
    Bind, Dispatch, Kernel0, Kernel1, Kernel2, Kernel3, Kernel4, Peel, Sequences, MAX_DIMS,
};
pub use element::{Element, TypeTag};
pub use seq::{position, Cons, Mentions, Nil, Recorder, TypeList, TypeSeq, Untracked, Visit};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SequenceError {
    #[error("a type sequence needs at least one element")]
    Empty,
    #[error("type {0} occurs more than once in the sequence")]
    Duplicate(TypeTag),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DispatchError {
    /// `dimension` is one-based.
    #[error("id {id} is out of range for dimension {dimension} (sequence length {len})")]
    InvalidId {
        dimension: usize,
        id: usize,
        len: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountError {
    #[error("sequence length must be at least 1")]
    EmptySequence,
    #[error("instance count overflows u64")]
    Overflow,
}

/// Ordered, duplicate-free list of type tags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeSequence {
    tags: Vec<TypeTag>,
}

impl TypeSequence {
    pub fn new<I: IntoIterator<Item = TypeTag>>(tags: I) -> Result<Self, SequenceError> {
        let tags: Vec<TypeTag> = tags.into_iter().collect();
        if tags.is_empty() {
            return Err(SequenceError::Empty);
        }
        for (k, tag) in tags.iter().enumerate() {
            if tags[..k].contains(tag) {
                return Err(SequenceError::Duplicate(*tag));
            }
        }
        Ok(TypeSequence { tags })
    }

    /// The run-time description of a type-level sequence.
    pub fn of<S: TypeSeq>() -> Self {
        #[allow(clippy::let_unit_value)]
        let () = S::ASSERT_DISTINCT;
        TypeSequence { tags: S::tags() }
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn tags(&self) -> &[TypeTag] {
        &self.tags
    }

    pub fn get(&self, id: usize) -> Option<TypeTag> {
        self.tags.get(id).copied()
    }
}

/// Zero-based position of `tag` in `seq`.
pub fn index_of(seq: &TypeSequence, tag: TypeTag) -> Option<usize> {
    seq.tags.iter().position(|t| *t == tag)
}

/// Instrumentation filled in by [`for_id_with_stats`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DispatchStats {
    /// Position-equality tests performed.
    pub comparisons: u64,
    /// Selected tag per dimension; `None` when the dispatch failed.
    pub resolved: Option<Vec<TypeTag>>,
    /// Time from the start of resolution to the entry of the kernel member.
    pub resolve_duration: Duration,
}

impl DispatchStats {
    pub fn resolve_ns(&self) -> u64 {
        u64::try_from(self.resolve_duration.as_nanos()).unwrap_or(u64::MAX)
    }
}

struct Tracker {
    comparisons: u64,
    tags: Vec<TypeTag>,
    entered: Option<Instant>,
}

impl Recorder for Tracker {
    #[inline]
    fn compared(&mut self) {
        self.comparisons += 1;
    }

    #[inline]
    fn resolved(&mut self, tag: TypeTag) {
        self.tags.push(tag);
    }

    #[inline]
    fn entering(&mut self) {
        self.entered = Some(Instant::now());
    }
}

/// Invokes the member of `kernel` selected by `ids` over the sequences `L`.
///
/// Dimensions are resolved in ascending order; the error names the first
/// dimension whose id is out of range, and later ids are not looked at.
#[inline]
pub fn for_id<L, K>(kernel: &mut K, ids: L::Ids) -> Result<L::Output, DispatchError>
where
    L: Sequences + Dispatch<K>,
{
    L::dispatch(kernel, ids.as_ref(), 0, &mut Untracked)
}

/// Like [`for_id`], additionally recording comparisons, the resolved tags
/// and the resolution time into `stats`.
pub fn for_id_with_stats<L, K>(
    kernel: &mut K,
    ids: L::Ids,
    stats: &mut DispatchStats,
) -> Result<L::Output, DispatchError>
where
    L: Sequences + Dispatch<K>,
{
    let mut tracker = Tracker {
        comparisons: 0,
        tags: Vec::with_capacity(L::DIMS),
        entered: None,
    };
    let start = Instant::now();
    let out = L::dispatch(kernel, ids.as_ref(), 0, &mut tracker);
    stats.comparisons = tracker.comparisons;
    match (&out, tracker.entered) {
        (Ok(_), Some(entered)) => {
            stats.resolved = Some(tracker.tags);
            stats.resolve_duration = entered.saturating_duration_since(start);
        }
        _ => {
            stats.resolved = None;
            stats.resolve_duration = Duration::ZERO;
        }
    }
    out
}

/// Number of kernel members a dispatch over sequences of the given
/// lengths instantiates.
pub fn instance_count(lengths: &[u64]) -> Result<u64, CountError> {
    lengths.iter().try_fold(1u64, |acc, &n| {
        if n == 0 {
            return Err(CountError::EmptySequence);
        }
        acc.checked_mul(n).ok_or(CountError::Overflow)
    })
}
