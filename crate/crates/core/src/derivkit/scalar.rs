use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Number-like type that parametrized maps are written against.
///
/// Implemented for `f64` (plain evaluation, used by the finite-difference
/// oracle) and for the jet types, so a single generic map definition yields
/// positions and exact derivatives alike.
pub trait Scalar:
    Clone
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn value(&self) -> f64;

    /// A constant carrying the same derivative dimension as `self`.
    fn lift(&self, c: f64) -> Self;

    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn powi(&self, k: i32) -> Self;
    fn atan2(&self, x: &Self) -> Self;

    fn recip(&self) -> Self {
        self.lift(1.0) / self.clone()
    }

    fn square(&self) -> Self {
        self.clone() * self.clone()
    }

    fn zero_like(&self) -> Self {
        self.lift(0.0)
    }
}

impl Scalar for f64 {
    fn value(&self) -> f64 {
        *self
    }
    fn lift(&self, c: f64) -> Self {
        c
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn powi(&self, k: i32) -> Self {
        f64::powi(*self, k)
    }
    fn atan2(&self, x: &Self) -> Self {
        f64::atan2(*self, *x)
    }
    fn recip(&self) -> Self {
        1.0 / *self
    }
}

/// Dot product of two equally long slices.
pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    assert_eq!(a.len(), b.len());
    assert!(!a.is_empty(), "dot of empty slices has no derivative carrier");
    let mut acc = a[0].clone() * b[0].clone();
    for (x, y) in a.iter().zip(b).skip(1) {
        acc = acc + x.clone() * y.clone();
    }
    acc
}

/// Sum of squares.
pub fn norm_sq<S: Scalar>(a: &[S]) -> S {
    dot(a, a)
}
