//! Kernel families of each arity and the per-arity glue that resolves
//! them one dimension at a time.
//!
//! Resolution of a `d`-dimensional request scans the first sequence. The
//! element type found there is bound into the kernel with [`Bind`], which
//! turns a `d`-ary family into a `(d - 1)`-ary one, and the remaining
//! sequences are resolved against that. When no sequence is left the
//! fully bound kernel is a [`Kernel0`] and is applied.
//!
//! Each arity therefore costs a fixed number of definitions, all produced
//! by one `arity!` line:
//!
//! * the `KernelD` trait,
//! * `Bind` implementing `Kernel(D-1)` for a `KernelD`,
//! * [`Sequences`] and [`Dispatch`] for the `D`-tuple of sequences,
//! * the continuation that moves from dimension 1 to the remaining `D - 1`.
//!
//! To raise the maximum arity from 4 to 5, add a `Kernel5` line below,
//! naming `Kernel4` as its lower trait, five type parameters and five
//! sequence parameters. Nothing else changes.

use std::marker::PhantomData;

use super::element::Element;
use super::seq::{Recorder, TypeSeq, Visit};
use super::{DispatchError, TypeSequence};

/// A kernel with every type parameter already fixed.
pub trait Kernel0 {
    type Output;

    fn apply(&mut self) -> Self::Output;
}

/// A kernel family with its first type parameter fixed to `A`.
pub struct Bind<'k, K, A> {
    kernel: &'k mut K,
    _bound: PhantomData<fn() -> A>,
}

impl<'k, K, A> Bind<'k, K, A> {
    pub fn new(kernel: &'k mut K) -> Self {
        Bind {
            kernel,
            _bound: PhantomData,
        }
    }
}

/// A tuple of type sequences, one per dimension.
pub trait Sequences {
    const DIMS: usize;

    /// One zero-based id per dimension.
    type Ids: AsRef<[usize]> + Copy + for<'a> TryFrom<&'a [usize]>;

    fn sequences() -> Vec<TypeSequence>;

    fn lengths() -> Vec<usize>;
}

/// Resolution of a tuple of sequences for kernels of matching arity.
pub trait Dispatch<K> {
    type Output;

    /// Resolves `ids[0]` against the first sequence, then the rest.
    /// `dim` is the zero-based dimension of `ids[0]` within the whole
    /// request, used for error reporting.
    fn dispatch<R: Recorder>(
        kernel: &mut K,
        ids: &[usize],
        dim: usize,
        rec: &mut R,
    ) -> Result<Self::Output, DispatchError>;
}

impl<K: Kernel0> Dispatch<K> for () {
    type Output = K::Output;

    #[inline(always)]
    fn dispatch<R: Recorder>(
        kernel: &mut K,
        _ids: &[usize],
        _dim: usize,
        rec: &mut R,
    ) -> Result<K::Output, DispatchError> {
        rec.entering();
        Ok(kernel.apply())
    }
}

/// Continuation after the first of the remaining dimensions is resolved.
pub struct Peel<'k, 'i, K, Rest> {
    kernel: &'k mut K,
    ids: &'i [usize],
    dim: usize,
    _rest: PhantomData<fn() -> Rest>,
}

macro_rules! arity {
    (
        $dims:literal, $kernel:ident, $lower:ident;
        [$first:ident $(, $rest:ident)*];
        [$s1:ident $(, $srest:ident)*]
    ) => {
        pub trait $kernel {
            type Output;

            fn apply<$first: Element $(, $rest: Element)*>(&mut self) -> Self::Output;
        }

        impl<K: $kernel, $first: Element> $lower for Bind<'_, K, $first> {
            type Output = <K as $kernel>::Output;

            #[inline(always)]
            fn apply<$($rest: Element),*>(&mut self) -> Self::Output {
                <K as $kernel>::apply::<$first $(, $rest)*>(self.kernel)
            }
        }

        impl<$s1: TypeSeq $(, $srest: TypeSeq)*> Sequences for ($s1, $($srest,)*) {
            const DIMS: usize = $dims;
            type Ids = [usize; $dims];

            fn sequences() -> Vec<TypeSequence> {
                vec![TypeSequence::of::<$s1>() $(, TypeSequence::of::<$srest>())*]
            }

            fn lengths() -> Vec<usize> {
                vec![$s1::LEN $(, $srest::LEN)*]
            }
        }

        impl<K: $kernel, $s1: TypeSeq $(, $srest: TypeSeq)*> Dispatch<K> for ($s1, $($srest,)*) {
            type Output = <K as $kernel>::Output;

            #[inline(always)]
            fn dispatch<R: Recorder>(
                kernel: &mut K,
                ids: &[usize],
                dim: usize,
                rec: &mut R,
            ) -> Result<Self::Output, DispatchError> {
                let id = ids[0];
                let next = Peel::<K, ($($srest,)*)> {
                    kernel,
                    ids: &ids[1..],
                    dim: dim + 1,
                    _rest: PhantomData,
                };
                match $s1::scan(id, next, rec) {
                    Ok(inner) => inner,
                    Err(()) => Err(DispatchError::InvalidId {
                        dimension: dim + 1,
                        id,
                        len: $s1::LEN,
                    }),
                }
            }
        }

        impl<K: $kernel $(, $srest: TypeSeq)*> Visit for Peel<'_, '_, K, ($($srest,)*)> {
            type Output = Result<<K as $kernel>::Output, DispatchError>;

            #[inline(always)]
            fn visit<A: Element, R: Recorder>(self, rec: &mut R) -> Self::Output {
                let mut bound = Bind::<K, A>::new(self.kernel);
                <($($srest,)*) as Dispatch<Bind<K, A>>>::dispatch(&mut bound, self.ids, self.dim, rec)
            }
        }
    };
}

arity!(1, Kernel1, Kernel0; [A]; [S1]);
arity!(2, Kernel2, Kernel1; [A, B]; [S1, S2]);
arity!(3, Kernel3, Kernel2; [A, B, C]; [S1, S2, S3]);
arity!(4, Kernel4, Kernel3; [A, B, C, D]; [S1, S2, S3, S4]);

/// Largest supported number of dimensions.
pub const MAX_DIMS: usize = 4;
