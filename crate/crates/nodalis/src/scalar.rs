//! Scalar abstraction for the exact linear algebra and the Chow calculus.

use std::fmt::{Debug, Display};

use num_traits::{FromPrimitive, Num, Signed};

/// Field-like coefficient type. Everything in this crate is exact, so the
/// intended instance is an arbitrary-precision rational; any exact ordered
/// field with integer embedding works.
pub trait Scalar:
    Num + Signed + FromPrimitive + Clone + PartialOrd + Debug + Display + Send + Sync + 'static
{
    fn from_int(v: i64) -> Self {
        Self::from_i64(v).expect("integer embedding")
    }
}

impl<T> Scalar for T where
    T: Num + Signed + FromPrimitive + Clone + PartialOrd + Debug + Display + Send + Sync + 'static
{
}
