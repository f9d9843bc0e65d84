//! Type-level sequences and the linear position scan over them.

use std::marker::PhantomData;

use super::element::{Element, TypeTag};

/// The empty type list.
pub struct Nil;

/// A type list with head `H` and tail `T`.
pub struct Cons<H, T>(PhantomData<fn() -> (H, T)>);

/// Builds a type sequence: `type_seq![f32, f64]` is
/// `Cons<f32, Cons<f64, Nil>>`.
#[macro_export]
macro_rules! type_seq {
    () => { $crate::dispatch::Nil };
    ($head:ty $(, $tail:ty)* $(,)?) => {
        $crate::dispatch::Cons<$head, $crate::type_seq![$($tail),*]>
    };
}

/// Continuation invoked with the element type found at the requested
/// position.
pub trait Visit {
    type Output;

    fn visit<T: Element, R: Recorder>(self, rec: &mut R) -> Self::Output;
}

/// Observer of the resolution process.
///
/// Dispatch is generic over the recorder, so with [`Untracked`] every hook
/// compiles to nothing.
pub trait Recorder {
    /// One position-equality test was performed.
    fn compared(&mut self);

    /// A dimension was resolved to `tag`.
    fn resolved(&mut self, tag: TypeTag);

    /// Called immediately before the selected kernel member runs.
    fn entering(&mut self);
}

/// Recorder that records nothing.
pub struct Untracked;

impl Recorder for Untracked {
    #[inline(always)]
    fn compared(&mut self) {}

    #[inline(always)]
    fn resolved(&mut self, _tag: TypeTag) {}

    #[inline(always)]
    fn entering(&mut self) {}
}

/// Whether a list mentions the element `E`. Helper for [`TypeList::DISTINCT`].
#[doc(hidden)]
pub trait Mentions<E: Element> {
    const MENTIONS: bool;
}

impl<E: Element> Mentions<E> for Nil {
    const MENTIONS: bool = false;
}

impl<E: Element, H: Element, T: Mentions<E>> Mentions<E> for Cons<H, T> {
    const MENTIONS: bool = H::TAG.same(E::TAG) || T::MENTIONS;
}

pub trait TypeList: 'static {
    const LEN: usize;

    /// No tag occurs twice.
    const DISTINCT: bool;

    fn push_tags(out: &mut Vec<TypeTag>);

    /// Tests positions `pos, pos + 1, ...` against `id` in order and hands
    /// the first matching element type to `visitor`. `Err(())` means the
    /// list was exhausted without a match.
    #[allow(clippy::result_unit_err)]
    fn scan_from<V: Visit, R: Recorder>(
        id: usize,
        pos: usize,
        visitor: V,
        rec: &mut R,
    ) -> Result<V::Output, ()>;
}

impl TypeList for Nil {
    const LEN: usize = 0;
    const DISTINCT: bool = true;

    fn push_tags(_out: &mut Vec<TypeTag>) {}

    #[inline(always)]
    fn scan_from<V: Visit, R: Recorder>(
        _id: usize,
        _pos: usize,
        _visitor: V,
        _rec: &mut R,
    ) -> Result<V::Output, ()> {
        Err(())
    }
}

impl<H: Element, T: TypeList + Mentions<H>> TypeList for Cons<H, T> {
    const LEN: usize = 1 + T::LEN;
    const DISTINCT: bool = !<T as Mentions<H>>::MENTIONS && T::DISTINCT;

    fn push_tags(out: &mut Vec<TypeTag>) {
        out.push(H::TAG);
        T::push_tags(out);
    }

    #[inline(always)]
    fn scan_from<V: Visit, R: Recorder>(
        id: usize,
        pos: usize,
        visitor: V,
        rec: &mut R,
    ) -> Result<V::Output, ()> {
        rec.compared();
        if pos == id {
            rec.resolved(H::TAG);
            Ok(visitor.visit::<H, R>(rec))
        } else {
            T::scan_from(id, pos + 1, visitor, rec)
        }
    }
}

/// A non-empty type list usable as one dimension of a dispatch.
pub trait TypeSeq: TypeList {
    /// Fails to compile (at monomorphization) when the sequence repeats a
    /// type, since the id of that type would be ambiguous.
    const ASSERT_DISTINCT: () = assert!(Self::DISTINCT, "type sequence repeats an element type");

    fn tags() -> Vec<TypeTag> {
        let mut out = Vec::with_capacity(Self::LEN);
        Self::push_tags(&mut out);
        out
    }

    #[inline(always)]
    #[allow(clippy::result_unit_err)]
    fn scan<V: Visit, R: Recorder>(id: usize, visitor: V, rec: &mut R) -> Result<V::Output, ()> {
        #[allow(clippy::let_unit_value)]
        let () = Self::ASSERT_DISTINCT;
        Self::scan_from(id, 0, visitor, rec)
    }
}

impl<H: Element, T: TypeList + Mentions<H>> TypeSeq for Cons<H, T> {}

/// Zero-based position of `E` in the list `L`, if present.
pub fn position<L: TypeList, E: Element>() -> Option<usize> {
    let mut tags = Vec::with_capacity(L::LEN);
    L::push_tags(&mut tags);
    tags.iter().position(|t| *t == E::TAG)
}
