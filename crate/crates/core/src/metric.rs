//! (α,β)-Minkowski norms on R³ with α Euclidean and β = b·y³.

use nalgebra::{Matrix3, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::dual::{self, Dual2, Scalar};
use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhiFamily {
    /// φ(s) = 1/(1 − s), the slope metric α²/(α − β).
    Matsumoto,
    /// φ(s) = 1 + s.
    Randers,
    /// φ ≡ 1.
    Euclidean,
}

impl PhiFamily {
    /// Open interval of admissible `s = β/α`.
    pub fn s_interval(self) -> (f64, f64) {
        match self {
            PhiFamily::Matsumoto => (-0.5, 0.5),
            PhiFamily::Randers => (-1.0, 1.0),
            PhiFamily::Euclidean => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// Half-open interval `[0, b_max)` of admissible one-form norms.
    pub fn b_max(self) -> f64 {
        match self {
            PhiFamily::Matsumoto => 0.5,
            PhiFamily::Randers => 1.0,
            PhiFamily::Euclidean => f64::INFINITY,
        }
    }

    /// φ without range checks; callers guarantee admissibility.
    pub fn phi<S: Scalar>(self, s: S) -> S {
        match self {
            PhiFamily::Matsumoto => (S::one() - s).recip(),
            PhiFamily::Randers => S::one() + s,
            PhiFamily::Euclidean => S::one(),
        }
    }
}

impl std::str::FromStr for PhiFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "matsumoto" => Ok(PhiFamily::Matsumoto),
            "randers" => Ok(PhiFamily::Randers),
            "euclidean" => Ok(PhiFamily::Euclidean),
            other => Err(Error::InvalidParameter(format!(
                "unknown metric family '{other}' (expected matsumoto, randers or euclidean)"
            ))),
        }
    }
}

pub fn phi_eval(family: PhiFamily, s: f64) -> Result<f64> {
    let (lo, hi) = family.s_interval();
    if !(s > lo && s < hi) {
        return Err(Error::Domain(format!("s = {s} outside the admissible interval ({lo}, {hi}) for {family:?}")));
    }
    Ok(family.phi(s))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricParams {
    b: f64,
    family: PhiFamily,
}

impl MetricParams {
    /// Validates `0 ≤ b < b_max(family)`. `b = 0` is the Euclidean degeneration.
    pub fn new(b: f64, family: PhiFamily) -> Result<Self> {
        let hi = family.b_max();
        if !(b.is_finite() && b >= 0.0 && b < hi) {
            return Err(Error::InvalidParameter(format!("b = {b} outside [0, {hi}) for {family:?}")));
        }
        Ok(Self { b, family })
    }

    pub fn matsumoto(b: f64) -> Result<Self> {
        Self::new(b, PhiFamily::Matsumoto)
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn family(&self) -> PhiFamily {
        self.family
    }

    pub fn is_euclidean_degeneration(&self) -> bool {
        self.b == 0.0 || self.family == PhiFamily::Euclidean
    }

    /// F(y) = α φ(β/α) for any scalar type; `y` must be nonzero.
    pub fn norm_generic<S: Scalar>(&self, y: &[S; 3]) -> S {
        let alpha = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
        let beta = y[2].scale(self.b);
        alpha * self.family.phi(beta / alpha)
    }
}

fn check_nonzero(y: &Vec3) -> Result<()> {
    if y.iter().all(|c| *c == 0.0) || y.iter().any(|c| !c.is_finite()) {
        return Err(Error::Domain("the norm is defined on nonzero finite vectors only".into()));
    }
    Ok(())
}

pub fn minkowski_norm(params: &MetricParams, y: &Vec3) -> Result<f64> {
    check_nonzero(y)?;
    Ok(params.norm_generic(y))
}

/// g_ij = ½ ∂²F²/∂yⁱ∂yʲ by nested dual numbers.
pub fn fundamental_tensor(params: &MetricParams, y: &Vec3) -> Result<Mat3> {
    check_nonzero(y)?;
    Ok(dual::hessian(
        |v: &[Dual2; 3]| {
            let f = params.norm_generic(v);
            f * f * Dual2::from_f64(0.5)
        },
        y,
    ))
}

/// Central-difference variant of [`fundamental_tensor`], step `1e-5·max(1, |y|)`.
pub fn fundamental_tensor_fd(params: &MetricParams, y: &Vec3) -> Result<Mat3> {
    check_nonzero(y)?;
    let len = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
    let h = 1e-5 * len.max(1.0);
    let e = |y: &Vec3| {
        let f: f64 = params.norm_generic(y);
        0.5 * f * f
    };
    let mut g = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let shifted = |si: f64, sj: f64| {
                let mut p = *y;
                p[i] += si * h;
                p[j] += sj * h;
                e(&p)
            };
            g[i][j] =
                (shifted(1.0, 1.0) - shifted(1.0, -1.0) - shifted(-1.0, 1.0) + shifted(-1.0, -1.0)) / (4.0 * h * h);
        }
    }
    Ok(g)
}

/// Ascending eigenvalues of a symmetric 3×3 matrix.
pub fn symmetric_eigenvalues(m: &Mat3) -> [f64; 3] {
    let mat = Matrix3::from_fn(|i, j| m[i][j]);
    let mut ev: Vec<f64> = SymmetricEigen::new(mat).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    [ev[0], ev[1], ev[2]]
}
