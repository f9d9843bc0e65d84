use std::fmt::{self, Debug, Display};
use std::str::FromStr;

use num_traits::{Num, NumCast};

/// Symbolic name of an element type.
///
/// Two tags are equal when their names are equal. The order of tags is
/// never taken from the name; it comes from the position a tag occupies
/// inside a [`TypeSequence`](super::TypeSequence).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct TypeTag(&'static str);

impl TypeTag {
    pub const fn new(name: &'static str) -> Self {
        TypeTag(name)
    }

    pub const fn name(self) -> &'static str {
        self.0
    }

    /// `const` equality, usable from associated constants.
    pub const fn same(self, other: TypeTag) -> bool {
        let (a, b) = (self.0.as_bytes(), other.0.as_bytes());
        if a.len() != b.len() {
            return false;
        }
        let mut k = 0;
        while k < a.len() {
            if a[k] != b[k] {
                return false;
            }
            k += 1;
        }
        true
    }
}

impl Debug for TypeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

impl Display for TypeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

/// A concrete numeric type that can appear in a type sequence.
///
/// Every member of a kernel family is instantiated for every element of
/// the Cartesian product of its sequences, so kernels only get to rely on
/// the operations listed here. Implement it for further types to extend
/// the set of tags.
pub trait Element:
    Copy + PartialOrd + Default + Debug + Display + FromStr + Num + NumCast + Send + Sync + 'static
{
    const TAG: TypeTag;

    /// Absolute value (identity for unsigned types).
    fn magnitude(self) -> Self;

    fn is_finite_value(self) -> bool;
}

macro_rules! float_element {
    ($($t:ty),*) => {$(
        impl Element for $t {
            const TAG: TypeTag = TypeTag::new(stringify!($t));

            #[inline]
            fn magnitude(self) -> Self {
                self.abs()
            }

            #[inline]
            fn is_finite_value(self) -> bool {
                self.is_finite()
            }
        }
    )*};
}

macro_rules! unsigned_element {
    ($($t:ty),*) => {$(
        impl Element for $t {
            const TAG: TypeTag = TypeTag::new(stringify!($t));

            #[inline]
            fn magnitude(self) -> Self {
                self
            }

            #[inline]
            fn is_finite_value(self) -> bool {
                true
            }
        }
    )*};
}

float_element!(f32, f64);
unsigned_element!(u8, u16, u32, u64);
