//! Busemann–Hausdorff volume factor f(b) of an (α,β)-metric, dV = f(b)·dV_α.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{MetricParams, PhiFamily};
use crate::quadrature::{self, PANEL_ORDER};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VolumeBranch {
    BusemannHausdorff,
    HolmesThompson,
}

/// Node-count policy: start at `initial_nodes`, double until the ratio
/// settles to `rel_tol` or `max_nodes` is exceeded.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraturePolicy {
    pub initial_nodes: usize,
    pub max_nodes: usize,
    pub rel_tol: f64,
}

impl Default for QuadraturePolicy {
    fn default() -> Self {
        Self { initial_nodes: 64, max_nodes: 16384, rel_tol: 1e-12 }
    }
}

impl QuadraturePolicy {
    fn validate(&self) -> Result<()> {
        for n in [self.initial_nodes, self.max_nodes] {
            if !n.is_power_of_two() || !(64..=16384).contains(&n) {
                return Err(Error::InvalidParameter(format!("node count {n} must be a power of two in [64, 16384]")));
            }
        }
        if self.initial_nodes > self.max_nodes {
            return Err(Error::InvalidParameter("initial node count exceeds the maximum".into()));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidParameter("rel_tol must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VolumeFactorRequest {
    params: MetricParams,
    n: usize,
    policy: QuadraturePolicy,
}

impl VolumeFactorRequest {
    pub fn new(params: MetricParams, n: usize, policy: QuadraturePolicy, branch: VolumeBranch) -> Result<Self> {
        if branch == VolumeBranch::HolmesThompson {
            return Err(Error::UnsupportedBranch(
                "Holmes–Thompson volume is not implemented; only Busemann–Hausdorff is available".into(),
            ));
        }
        if n < 2 {
            return Err(Error::InvalidParameter(format!("dimension n = {n} must be at least 2")));
        }
        policy.validate()?;
        Ok(Self { params, n, policy })
    }

    /// Busemann–Hausdorff request with the default policy.
    pub fn bh(params: MetricParams, n: usize) -> Result<Self> {
        Self::new(params, n, QuadraturePolicy::default(), VolumeBranch::BusemannHausdorff)
    }

    pub fn params(&self) -> &MetricParams {
        &self.params
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// Ratio ∫₀^π sinⁿ⁻²t dt / ∫₀^π sinⁿ⁻²t / φ(b cos t)ⁿ dt, with the stopping
/// test applied to the ratio itself.
pub fn bh_factor_quadrature(req: &VolumeFactorRequest) -> Result<f64> {
    let b = req.params.b();
    let family = req.params.family();
    let n = req.n;
    let integrand = |t: f64| {
        let w = t.sin().powi(n as i32 - 2);
        let phi: f64 = family.phi(b * t.cos());
        [w, w / phi.powi(n as i32)]
    };
    let mut nodes = req.policy.initial_nodes;
    let mut previous: Option<f64> = None;
    loop {
        let [num, den] = quadrature::composite(0.0, PI, nodes / PANEL_ORDER, integrand);
        let ratio = num / den;
        if !ratio.is_finite() {
            return Err(Error::Domain(format!("integrand not finite for b = {b}")));
        }
        if let Some(prev) = previous {
            if (ratio - prev).abs() < req.policy.rel_tol * ratio.abs() {
                return Ok(ratio);
            }
        }
        if nodes * 2 > req.policy.max_nodes {
            return Err(Error::QuadratureNonConvergence { previous: previous.unwrap_or(f64::NAN), last: ratio });
        }
        previous = Some(ratio);
        nodes *= 2;
    }
}

/// 2/(2 + b²), the closed form for the Matsumoto metric on surfaces.
pub fn bh_factor_closed_matsumoto(b: f64) -> Result<f64> {
    let params = MetricParams::matsumoto(b).map_err(|e| match e {
        Error::InvalidParameter(m) => Error::Domain(m),
        other => other,
    })?;
    let b = params.b();
    Ok(2.0 / (2.0 + b * b))
}

/// Known closed forms: Matsumoto n = 2, 3; Randers n = 2; Euclidean.
pub fn bh_factor_closed(params: &MetricParams, n: usize) -> Option<f64> {
    let b2 = params.b() * params.b();
    match (params.family(), n) {
        (PhiFamily::Matsumoto, 2) => Some(2.0 / (2.0 + b2)),
        (PhiFamily::Matsumoto, 3) => Some(1.0 / (1.0 + b2)),
        (PhiFamily::Randers, 2) => Some((1.0 - b2).powf(1.5)),
        (PhiFamily::Euclidean, _) => Some(1.0),
        _ => None,
    }
}

/// Quadrature over a sweep of requests, evaluated in parallel.
pub fn bh_factor_sweep(reqs: &[VolumeFactorRequest]) -> Vec<Result<f64>> {
    reqs.par_iter().map(bh_factor_quadrature).collect()
}
