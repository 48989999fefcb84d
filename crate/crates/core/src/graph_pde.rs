//! Minimal-graph PDE over the x¹x² plane and over tilted planes, and the
//! ellipticity of its normalized coefficients.

use nalgebra::{Matrix3, Rotation3, Unit, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dual::Scalar;
use crate::error::{Error, Result};
use crate::jet::{ImmersionJet1, ImmersionJet2};
use crate::metric::Mat3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphPoint {
    pub f1: f64,
    pub f2: f64,
    pub h11: f64,
    pub h12: f64,
    pub h22: f64,
}

impl GraphPoint {
    pub fn new(f1: f64, f2: f64, h11: f64, h12: f64, h22: f64) -> Result<Self> {
        let gp = Self { f1, f2, h11, h12, h22 };
        if [f1, f2, h11, h12, h22].iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument(format!("non-finite graph point {gp:?}")));
        }
        Ok(gp)
    }

    /// First derivatives only; zero Hessian.
    pub fn slope(f1: f64, f2: f64) -> Self {
        Self { f1, f2, h11: 0.0, h12: 0.0, h22: 0.0 }
    }

    pub fn w2(&self) -> f64 {
        1.0 + self.f1 * self.f1 + self.f2 * self.f2
    }

    fn hessian(&self) -> [[f64; 2]; 2] {
        [[self.h11, self.h12], [self.h12, self.h22]]
    }
}

/// Orthogonal change of ambient frame; the graph is taken over the plane
/// orthogonal to `k`, the last row of `m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TiltedFrame {
    m: Mat3,
}

impl TiltedFrame {
    pub fn new(m: Mat3) -> Result<Self> {
        let mm = Matrix3::from_fn(|i, j| m[i][j]);
        let dev = (mm * mm.transpose() - Matrix3::identity()).abs().max();
        if !(dev <= 1e-12) {
            return Err(Error::Domain(format!("frame is not orthogonal: |m mᵀ − I| = {dev:e}")));
        }
        Ok(Self { m })
    }

    pub fn identity() -> Self {
        Self { m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] }
    }

    /// An orthogonal frame whose last row is `k / |k|`.
    pub fn with_k(k: [f64; 3]) -> Result<Self> {
        let v = Vector3::from(k);
        let n = v.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Argument(format!("cannot build a frame from k = {k:?}")));
        }
        let rot = Rotation3::rotation_between(&Vector3::z(), &(v / n))
            .unwrap_or_else(|| Rotation3::from_axis_angle(&Vector3::x_axis(), std::f64::consts::PI));
        Self::from_rotation(&rot.inverse())
    }

    pub fn from_axis_angle(axis: [f64; 3], angle: f64) -> Result<Self> {
        let rot = Rotation3::from_axis_angle(&Unit::new_normalize(Vector3::from(axis)), angle);
        Self::from_rotation(&rot)
    }

    fn from_rotation(rot: &Rotation3<f64>) -> Result<Self> {
        let r = rot.matrix();
        Self::new(std::array::from_fn(|i| std::array::from_fn(|j| r[(i, j)])))
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.m
    }

    pub fn k(&self) -> [f64; 3] {
        self.m[2]
    }
}

/// Jets of x ↦ m·(x¹, x², f(x)) written as zⁱ_η = m_{iη} + f_η m_{i3} and
/// φⁱ_{εη} = f_{εη} m_{i3}.
pub fn tilted_jets(gp: &GraphPoint, frame: &TiltedFrame) -> (ImmersionJet1, ImmersionJet2) {
    let m = frame.matrix();
    let p = [gp.f1, gp.f2];
    let z = std::array::from_fn(|i| std::array::from_fn(|e| m[i][e] + p[e] * m[i][2]));
    let h = gp.hessian();
    let second = std::array::from_fn(|i| std::array::from_fn(|e| std::array::from_fn(|n| h[e][n] * m[i][2])));
    (ImmersionJet1::new(z), ImmersionJet2::new(second).expect("Hessian is symmetric"))
}

pub fn graph_jets(gp: &GraphPoint) -> (ImmersionJet1, ImmersionJet2) {
    (ImmersionJet1::graph(gp.f1, gp.f2), ImmersionJet2::graph(gp.h11, gp.h12, gp.h22))
}

struct TiltedScalars {
    w2: f64,
    w: f64,
    s: f64,
    u: [f64; 2],
}

fn tilted_scalars(f1: f64, f2: f64, k: &[f64; 3], b: f64) -> TiltedScalars {
    let w2 = 1.0 + f1 * f1 + f2 * f2;
    let w = k[2] - k[0] * f1 - k[1] * f2;
    let s = (2.0 + b * b) * w2 - b * b * w * w;
    let u = [k[0] + w * f1 / w2, k[1] + w * f2 / w2];
    TiltedScalars { w2, w, s, u }
}

/// S(S − 2b²w²)(δ − ppᵀ/W²):h + 2b²(S + 4b²w²)·W²·uᵀhu with
/// S = (2+b²)W² − b²w², w = k₃ − k₁f₁ − k₂f₂, u = (k₁, k₂) + w·p/W².
/// It equals the mean-curvature bracket of the tilted immersion divided by
/// a positive factor, so it vanishes exactly where the tilted graph is minimal.
pub fn tilted_graph_residual(gp: &GraphPoint, frame: &TiltedFrame, b: f64) -> f64 {
    tilted_residual_generic(&[gp.f1, gp.f2, gp.h11, gp.h12, gp.h22], &frame.k(), b)
}

/// [`tilted_graph_residual`] over any scalar type, with the point given as
/// `[f1, f2, h11, h12, h22]`.
pub fn tilted_residual_generic<S: Scalar>(g: &[S; 5], k: &[f64; 3], b: f64) -> S {
    let [f1, f2, h11, h12, h22] = *g;
    let one = S::one();
    let b2 = b * b;
    let w2 = one + f1 * f1 + f2 * f2;
    let w = S::from_f64(k[2]) - f1.scale(k[0]) - f2.scale(k[1]);
    let ww = w * w;
    let s = w2.scale(2.0 + b2) - ww.scale(b2);
    let u0 = S::from_f64(k[0]) + w * f1 / w2;
    let u1 = S::from_f64(k[1]) + w * f2 / w2;
    let classical = ((one + f2 * f2) * h11 - (f1 * f2 * h12).scale(2.0) + (one + f1 * f1) * h22) / w2;
    let uhu = h11 * u0 * u0 + (h12 * u0 * u1).scale(2.0) + h22 * u1 * u1;
    s * (s - ww.scale(2.0 * b2)) * classical + (s + ww.scale(4.0 * b2)).scale(2.0 * b2) * w2 * uhu
}

/// T(T − 2b²)(δ − ppᵀ/W²):h + 2b²(T + 4b²)(pᵀhp)/W² with
/// T = 2W² + b²(W² − 1). This is the k = (0, 0, 1) case of
/// [`tilted_graph_residual`].
pub fn graph_residual(gp: &GraphPoint, b: f64) -> f64 {
    tilted_graph_residual(gp, &TiltedFrame::identity(), b)
}

/// Normalized second-order coefficients a_{εη} of the tilted graph PDE.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PdeCoefficients {
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
    #[serde(rename = "W2")]
    pub w2: f64,
    pub w: f64,
    #[serde(rename = "Sb")]
    pub sb: f64,
    #[serde(rename = "Rb")]
    pub rb: f64,
}

impl PdeCoefficients {
    pub fn quadratic_form(&self, xi: [f64; 2]) -> f64 {
        self.a11 * xi[0] * xi[0] + 2.0 * self.a12 * xi[0] * xi[1] + self.a22 * xi[1] * xi[1]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let mean = 0.5 * (self.a11 + self.a22);
        let half = 0.5 * (self.a11 - self.a22);
        mean - half.hypot(self.a12)
    }
}

fn check_b(b: f64) -> Result<()> {
    if !(0.0..0.5).contains(&b) {
        return Err(Error::InvalidParameter(format!("b = {b} outside [0, 0.5)")));
    }
    Ok(())
}

/// a = (δ − ppᵀ/W²) + R_b·W²·uuᵀ, R_b = 2b²(S + 4b²w²)/(S(S − 2b²w²)).
/// The divisor is at least (2 − 2b²)W² · S > 0 for b < 1/2.
pub fn ellipticity_coefficients(gp: &GraphPoint, frame: &TiltedFrame, b: f64) -> Result<PdeCoefficients> {
    check_b(b)?;
    let k = frame.k();
    let TiltedScalars { w2, w, s, u } = tilted_scalars(gp.f1, gp.f2, &k, b);
    let b2 = b * b;
    let rb = 2.0 * b2 * (s + 4.0 * b2 * w * w) / (s * (s - 2.0 * b2 * w * w));
    let (f1, f2) = (gp.f1, gp.f2);
    Ok(PdeCoefficients {
        a11: 1.0 - f1 * f1 / w2 + rb * w2 * u[0] * u[0],
        a12: -f1 * f2 / w2 + rb * w2 * u[0] * u[1],
        a22: 1.0 - f2 * f2 / w2 + rb * w2 * u[1] * u[1],
        w2,
        w,
        sb: s,
        rb,
    })
}

/// S(S − 2b²w²), the factor divided out by [`ellipticity_coefficients`].
pub fn divisor(gp: &GraphPoint, frame: &TiltedFrame, b: f64) -> f64 {
    let k = frame.k();
    let t = tilted_scalars(gp.f1, gp.f2, &k, b);
    t.s * (t.s - 2.0 * b * b * t.w * t.w)
}

/// Grid for the sampled supremum of (a-form − h-form)/h-form, where the
/// h-form is (δ − ppᵀ/W²):ξξ = |ξ|²(1 + |t|² sin²θ)/W².
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub t_max: f64,
    pub t_min: f64,
    pub t_nodes: usize,
    pub angle_nodes: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self { t_max: 1e3, t_min: 1e-3, t_nodes: 512, angle_nodes: 256 }
    }
}

impl SamplerConfig {
    fn validate(&self) -> Result<()> {
        if !(self.t_min > 0.0 && self.t_max > self.t_min && self.t_nodes >= 2 && self.angle_nodes >= 4) {
            return Err(Error::InvalidParameter(format!("bad sampler configuration {self:?}")));
        }
        Ok(())
    }

    /// 0 followed by `t_nodes` log-spaced magnitudes in [t_min, t_max].
    pub fn magnitudes(&self) -> Vec<f64> {
        let (lo, hi) = (self.t_min.ln(), self.t_max.ln());
        let n = self.t_nodes;
        std::iter::once(0.0).chain((0..n).map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp())).collect()
    }
}

/// One sampled pair: gradient t and covector ξ.
#[derive(Clone, Copy, Debug)]
pub struct BoundSample {
    pub t: [f64; 2],
    pub xi: [f64; 2],
}

fn angle(i: usize, n: usize, span: f64) -> f64 {
    span * i as f64 / n as f64
}

/// Directions ξ for a given t: a uniform half-circle, ξ ∥ t, ξ ⊥ t and the
/// exact maximizer ξ* ∝ u + t(t·u) of the ratio.
fn xi_samples(t: [f64; 2], u: [f64; 2], n: usize) -> Vec<[f64; 2]> {
    let mut out: Vec<[f64; 2]> = (0..n)
        .map(|i| {
            let a = angle(i, n, std::f64::consts::PI);
            [a.cos(), a.sin()]
        })
        .collect();
    if t != [0.0, 0.0] {
        out.push(t);
        out.push([-t[1], t[0]]);
    }
    let tu = t[0] * u[0] + t[1] * u[1];
    let star = [u[0] + t[0] * tu, u[1] + t[1] * tu];
    if star != [0.0, 0.0] {
        out.push(star);
    }
    out
}

fn for_t_samples<R>(
    frame: &TiltedFrame,
    b: f64,
    cfg: &SamplerConfig,
    per_t: impl Fn(BoundSample, &PdeCoefficients) -> R + Sync,
    reduce: impl Fn(R, R) -> R + Sync,
    identity: R,
) -> Result<R>
where
    R: Clone + Send + Sync,
{
    check_b(b)?;
    cfg.validate()?;
    let k = frame.k();
    let n = cfg.angle_nodes;
    let ts: Vec<[f64; 2]> = cfg
        .magnitudes()
        .into_iter()
        .flat_map(|r| {
            let dirs = if r == 0.0 { 1 } else { n };
            (0..dirs).map(move |i| {
                let a = angle(i, dirs, 2.0 * std::f64::consts::PI);
                [r * a.cos(), r * a.sin()]
            })
        })
        .collect();
    let per_chunk: Vec<R> = ts
        .par_iter()
        .map(|&t| {
            let gp = GraphPoint::slope(t[0], t[1]);
            let coeffs = ellipticity_coefficients(&gp, frame, b).expect("b validated");
            let u = tilted_scalars(t[0], t[1], &k, b).u;
            xi_samples(t, u, n)
                .into_iter()
                .map(|xi| per_t(BoundSample { t, xi }, &coeffs))
                .fold(identity.clone(), &reduce)
        })
        .collect();
    Ok(per_chunk.into_iter().fold(identity, reduce))
}

fn h_form(t: [f64; 2], xi: [f64; 2], w2: f64) -> f64 {
    let txi = t[0] * xi[0] + t[1] * xi[1];
    xi[0] * xi[0] + xi[1] * xi[1] - txi * txi / w2
}

/// Sampled supremum of R_b[W²|k̃|cosγ + w|t|cosθ]²/(1 + |t|²sin²θ), the
/// constant 𝒞 with h-form ≤ a-form ≤ (1 + 𝒞)·h-form. An estimate from
/// below, not a proof.
pub fn mean_curvature_type_bound(frame: &TiltedFrame, b: f64, cfg: &SamplerConfig) -> Result<f64> {
    for_t_samples(
        frame,
        b,
        cfg,
        |s, c| {
            let h = h_form(s.t, s.xi, c.w2);
            (c.quadratic_form(s.xi) - h) / h
        },
        f64::max,
        0.0,
    )
}

/// h-form ≤ a-form ≤ (1 + c)·h-form on every sample of `cfg`, allowing a
/// relative rounding slack of 1e−12.
pub fn bound_sandwich_holds(frame: &TiltedFrame, b: f64, cfg: &SamplerConfig, c: f64) -> Result<bool> {
    for_t_samples(
        frame,
        b,
        cfg,
        |s, co| {
            let h = h_form(s.t, s.xi, co.w2);
            let a = co.quadratic_form(s.xi);
            let slack = 1e-12 * a.abs();
            h <= a + slack && a <= (1.0 + c) * h + slack
        },
        |x, y| x && y,
        true,
    )
}
