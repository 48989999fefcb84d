//! Forward-mode dual numbers.
//!
//! `Dual<S>` carries a value and one directional derivative. Nesting
//! (`Dual<Dual<f64>>`) yields exact second derivatives, which is how the
//! Hessians in [`crate::metric`] and [`crate::check`] are produced.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// The arithmetic needed by code that is generic over `f64` and dual numbers.
pub trait Scalar:
    Copy
    + fmt::Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    fn from_f64(v: f64) -> Self;
    /// The underlying real value (all derivative parts dropped).
    fn re(&self) -> f64;
    fn sqrt(self) -> Self;
    fn recip(self) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    fn one() -> Self {
        Self::from_f64(1.0)
    }
    fn powi(self, n: i32) -> Self {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut acc = Self::one();
        for _ in 0..n {
            acc *= self;
        }
        acc
    }
    fn scale(self, k: f64) -> Self {
        self * Self::from_f64(k)
    }
}

impl Scalar for f64 {
    #[inline]
    fn from_f64(v: f64) -> Self {
        v
    }
    #[inline]
    fn re(&self) -> f64 {
        *self
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn recip(self) -> Self {
        1.0 / self
    }
    #[inline]
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual<S> {
    pub v: S,
    pub d: S,
}

impl<S: Scalar> Dual<S> {
    pub fn new(v: S, d: S) -> Self {
        Self { v, d }
    }
    pub fn constant(v: S) -> Self {
        Self { v, d: S::zero() }
    }
    pub fn variable(v: S) -> Self {
        Self { v, d: S::one() }
    }
}

impl<S: Scalar> Add for Dual<S> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.v + o.v, self.d + o.d)
    }
}

impl<S: Scalar> Sub for Dual<S> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.v - o.v, self.d - o.d)
    }
}

impl<S: Scalar> Mul for Dual<S> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Self::new(self.v * o.v, self.d * o.v + self.v * o.d)
    }
}

impl<S: Scalar> Div for Dual<S> {
    type Output = Self;
    #[inline]
    fn div(self, o: Self) -> Self {
        let inv = o.v.recip();
        let q = self.v * inv;
        Self::new(q, (self.d - q * o.d) * inv)
    }
}

impl<S: Scalar> Neg for Dual<S> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.v, -self.d)
    }
}

impl<S: Scalar> AddAssign for Dual<S> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<S: Scalar> SubAssign for Dual<S> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<S: Scalar> MulAssign for Dual<S> {
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl<S: Scalar> Scalar for Dual<S> {
    fn from_f64(v: f64) -> Self {
        Self::constant(S::from_f64(v))
    }
    fn re(&self) -> f64 {
        self.v.re()
    }
    fn sqrt(self) -> Self {
        let r = self.v.sqrt();
        Self::new(r, self.d / (r + r))
    }
    fn recip(self) -> Self {
        let inv = self.v.recip();
        Self::new(inv, -self.d * inv * inv)
    }
}

pub type Dual2 = Dual<Dual<f64>>;

/// First derivative of a scalar function of one variable.
pub fn derivative(f: impl Fn(Dual<f64>) -> Dual<f64>, x: f64) -> f64 {
    f(Dual::variable(x)).d
}

/// Gradient of `f: R^N -> R`, one forward sweep per coordinate.
pub fn gradient<const N: usize>(f: impl Fn(&[Dual<f64>; N]) -> Dual<f64>, x: &[f64; N]) -> [f64; N] {
    let mut g = [0.0; N];
    for (k, gk) in g.iter_mut().enumerate() {
        let args = std::array::from_fn(|i| Dual::new(x[i], if i == k { 1.0 } else { 0.0 }));
        *gk = f(&args).d;
    }
    g
}

/// Hessian of `f: R^N -> R` by nested forward differentiation.
///
/// Entry `(a, b)` seeds the inner dual with direction `a` and the outer with
/// direction `b`; only the upper triangle is evaluated and then mirrored.
pub fn hessian<const N: usize>(f: impl Fn(&[Dual2; N]) -> Dual2, x: &[f64; N]) -> [[f64; N]; N] {
    let mut h = [[0.0; N]; N];
    for a in 0..N {
        for b in a..N {
            let args = std::array::from_fn(|i| {
                let inner = Dual::new(x[i], if i == a { 1.0 } else { 0.0 });
                let outer_d = Dual::new(if i == b { 1.0 } else { 0.0 }, 0.0);
                Dual::new(inner, outer_d)
            });
            let val = f(&args).d.d;
            h[a][b] = val;
            h[b][a] = val;
        }
    }
    h
}
