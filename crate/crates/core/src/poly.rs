//! Dense univariate polynomials over exact rationals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Coefficients in ascending order, no trailing zeros; the zero
/// polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    coeffs: Vec<BigRational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigRational::from_integer(BigInt::from(c))).collect())
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    pub fn x() -> Self {
        Self::from_i64(&[0, 1])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    /// Lowest power with a nonzero coefficient.
    pub fn lowest_nonzero(&self) -> Option<(usize, &BigRational)> {
        self.coeffs.iter().enumerate().find(|(_, c)| !c.is_zero())
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        use num_traits::ToPrimitive;
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// p(q(x)).
    pub fn compose(&self, q: &Poly) -> Self {
        self.coeffs.iter().rev().fold(Poly::zero(), |acc, c| &(&acc * q) + &Poly::constant(c.clone()))
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Poly::constant(BigRational::one()), |acc, _| &acc * self)
    }

    /// Euclidean division: self = q·d + r with deg r < deg d.
    pub fn div_rem(&self, d: &Poly) -> Result<(Poly, Poly)> {
        let dl = d.leading().ok_or_else(|| Error::Argument("division by the zero polynomial".into()))?.clone();
        let dd = d.degree().unwrap_or(0);
        let mut r = self.coeffs.clone();
        let mut q = vec![BigRational::zero(); r.len().saturating_sub(dd).max(1)];
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1 - dd;
            let f = r.last().expect("non-empty") / &dl;
            for (i, c) in d.coeffs.iter().enumerate() {
                r[k + i] = &r[k + i] - &f * c;
            }
            q[k] = f;
            r.pop();
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        Ok((Poly::new(q), Poly::new(r)))
    }

    /// Newton-form interpolation through (xs[i], ys[i]); the xs must be
    /// distinct. The result has degree < xs.len().
    pub fn interpolate(xs: &[BigRational], ys: &[BigRational]) -> Result<Self> {
        if xs.len() != ys.len() || xs.is_empty() {
            return Err(Error::Argument(format!(
                "interpolation needs matching non-empty nodes ({} vs {})",
                xs.len(),
                ys.len()
            )));
        }
        let n = xs.len();
        let mut dd = ys.to_vec();
        for level in 1..n {
            for i in (level..n).rev() {
                let den = &xs[i] - &xs[i - level];
                if den.is_zero() {
                    return Err(Error::Argument("interpolation nodes are not distinct".into()));
                }
                dd[i] = (&dd[i] - &dd[i - 1]) / den;
            }
        }
        let mut out = Poly::constant(dd[n - 1].clone());
        for i in (0..n - 1).rev() {
            let factor = Poly::new(vec![-xs[i].clone(), BigRational::one()]);
            out = &(&out * &factor) + &Poly::constant(dd[i].clone());
        }
        Ok(out)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Poly {
    /// Ascending powers of `var`, e.g. `4 + 10 p + 8 p^2 + 2 p^3`.
    pub fn display_in(&self, var: &str) -> String {
        let mut out = String::new();
        self.write_in(&mut out, var).expect("writing to a String");
        out
    }

    fn write_in(&self, f: &mut impl fmt::Write, var: &str) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{mag}")?,
                _ if mag.is_one() => {}
                _ => write!(f, "{mag} ")?,
            }
            match i {
                0 => {}
                1 => write!(f, "{var}")?,
                _ => write!(f, "{var}^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_in(f, "p")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rat;

    #[test]
    fn arithmetic() {
        let a = Poly::from_i64(&[1, 1]);
        let sq = &a * &a;
        assert_eq!(sq, Poly::from_i64(&[1, 2, 1]));
        assert_eq!(&sq - &sq, Poly::zero());
        assert_eq!(sq.degree(), Some(2));
        assert_eq!(Poly::zero().degree(), None);
        assert_eq!(sq.derivative(), Poly::from_i64(&[2, 2]));
        assert_eq!(sq.eval(&rat(1, 2)), rat(9, 4));
        assert_eq!(a.pow(3), Poly::from_i64(&[1, 3, 3, 1]));
    }

    #[test]
    fn division() {
        let l = Poly::from_i64(&[2, 4, 2]);
        let k = Poly::from_i64(&[4, 10, 8, 2]);
        let (q, r) = k.div_rem(&l).unwrap();
        assert_eq!(q, Poly::from_i64(&[2, 1]));
        assert!(r.is_zero());
        let (q, r) = Poly::from_i64(&[1, 0, 1]).div_rem(&Poly::from_i64(&[0, 2])).unwrap();
        assert_eq!(q, Poly::new(vec![rat(0, 1), rat(1, 2)]));
        assert_eq!(r, Poly::from_i64(&[1]));
        assert!(k.div_rem(&Poly::zero()).is_err());
    }

    #[test]
    fn composition() {
        let p = Poly::from_i64(&[0, 0, 1]);
        let q = Poly::from_i64(&[1, 1]);
        assert_eq!(p.compose(&q), Poly::from_i64(&[1, 2, 1]));
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        let p = Poly::new(vec![rat(3, 7), rat(-2, 5), rat(0, 1), rat(11, 3)]);
        let xs: Vec<_> = [0, 1, 4, 9, 16].iter().map(|&v| rat(v, 1)).collect();
        let ys: Vec<_> = xs.iter().map(|x| p.eval(x)).collect();
        assert_eq!(Poly::interpolate(&xs, &ys).unwrap(), p);
        assert!(Poly::interpolate(&[rat(1, 1), rat(1, 1)], &[rat(0, 1), rat(1, 1)]).is_err());
    }

    #[test]
    fn display() {
        assert_eq!(Poly::from_i64(&[4, 10, 8, 2]).to_string(), "4 + 10 p + 8 p^2 + 2 p^3");
        assert_eq!(Poly::new(vec![rat(0, 1), rat(-1, 2), rat(1, 1)]).to_string(), "-1/2 p + p^2");
        assert_eq!(Poly::zero().to_string(), "0");
        assert_eq!(Poly::from_i64(&[1, -1]).display_in("B"), "1 - B");
    }

    #[test]
    fn lowest_nonzero() {
        let p = Poly::from_i64(&[0, 0, -3, 1]);
        assert_eq!(p.lowest_nonzero(), Some((2, &rat(-3, 1))));
    }
}
