//! Independent derivative oracles for 𝓕: forward-mode dual numbers and
//! central finite differences, plus the sampled self-check report.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dual::{self, Dual, Dual2};
use crate::error::Result;
use crate::jet::{
    area_integrand, area_integrand_generic, area_integrand_grad, area_integrand_hess, flat, Hess6, ImmersionJet1,
    ImmersionJet2, Mat32,
};

pub const FD_GRADIENT_STEP: f64 = 1e-6;
pub const FD_HESSIAN_STEP: f64 = 1e-4;

fn flatten(z: &Mat32) -> [f64; 6] {
    std::array::from_fn(|k| z[k / 2][k % 2])
}

fn unflatten<S: Copy>(x: &[S; 6]) -> [[S; 2]; 3] {
    [[x[0], x[1]], [x[2], x[3]], [x[4], x[5]]]
}

pub fn dual_gradient(j: &ImmersionJet1, b: f64) -> Mat32 {
    let g = dual::gradient(|x: &[Dual<f64>; 6]| area_integrand_generic(&unflatten(x), b), &flatten(&j.z));
    unflatten(&g)
}

pub fn dual_hessian(j: &ImmersionJet1, b: f64) -> Hess6 {
    dual::hessian(|x: &[Dual2; 6]| area_integrand_generic(&unflatten(x), b), &flatten(&j.z))
}

fn eval_flat(x: &[f64; 6], b: f64) -> Result<f64> {
    area_integrand(&ImmersionJet1::new(unflatten(x)), b)
}

pub fn fd_gradient(j: &ImmersionJet1, b: f64, h: f64) -> Result<Mat32> {
    let x0 = flatten(&j.z);
    let mut g = [0.0; 6];
    for (k, gk) in g.iter_mut().enumerate() {
        let (mut xp, mut xm) = (x0, x0);
        xp[k] += h;
        xm[k] -= h;
        *gk = (eval_flat(&xp, b)? - eval_flat(&xm, b)?) / (2.0 * h);
    }
    Ok(unflatten(&g))
}

/// Nested central differences of 𝓕 values (no gradient code involved).
pub fn fd_hessian(j: &ImmersionJet1, b: f64, h: f64) -> Result<Hess6> {
    let x0 = flatten(&j.z);
    let mut out = [[0.0; 6]; 6];
    for k in 0..6 {
        for l in k..6 {
            let mut v = 0.0;
            for (sk, sl, w) in [(1.0, 1.0, 1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0), (-1.0, -1.0, 1.0)] {
                let mut x = x0;
                x[k] += sk * h;
                x[l] += sl * h;
                v += w * eval_flat(&x, b)?;
            }
            out[k][l] = v / (4.0 * h * h);
            out[l][k] = out[k][l];
        }
    }
    Ok(out)
}

/// Residual contraction using the dual-number Hessian.
pub fn dual_mean_curvature_residual(j1: &ImmersionJet1, j2: &ImmersionJet2, b: f64, v: &[f64; 3]) -> f64 {
    let h = dual_hessian(j1, b);
    let mut s = 0.0;
    for (i, vi) in v.iter().enumerate() {
        for e in 0..2 {
            for (jj, comp) in j2.components().iter().enumerate() {
                for hh in 0..2 {
                    s += h[flat(i, e)][flat(jj, hh)] * comp[e][hh] * vi;
                }
            }
        }
    }
    s
}

/// max |a − b| / max |b|.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let diff = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    let scale = b.iter().fold(0.0f64, |m, y| m.max(y.abs()));
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

fn flat_mat(m: &Mat32) -> Vec<f64> {
    m.iter().flatten().copied().collect()
}

fn flat_hess(m: &Hess6) -> Vec<f64> {
    m.iter().flatten().copied().collect()
}

/// Entries uniform in [−2, 2], rejected until det A ≥ 0.02·(tr A)².
pub fn random_jet<R: Rng>(rng: &mut R) -> ImmersionJet1 {
    loop {
        let z: Mat32 = std::array::from_fn(|_| std::array::from_fn(|_| rng.random_range(-2.0..=2.0)));
        let j = ImmersionJet1::new(z);
        let a = crate::jet::gram(&j);
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        let tr = a[0][0] + a[1][1];
        if det >= 0.02 * tr * tr {
            return j;
        }
    }
}

pub fn random_second_jet<R: Rng>(rng: &mut R) -> ImmersionJet2 {
    let mut s = [[[0.0; 2]; 2]; 3];
    for comp in &mut s {
        comp[0][0] = rng.random_range(-2.0..=2.0);
        comp[1][1] = rng.random_range(-2.0..=2.0);
        comp[0][1] = rng.random_range(-2.0..=2.0);
        comp[1][0] = comp[0][1];
    }
    ImmersionJet2::new(s).expect("symmetric by construction")
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct DerivativeCheckReport {
    pub samples: usize,
    pub b_values: Vec<f64>,
    pub grad_vs_dual: f64,
    pub grad_vs_fd: f64,
    pub hess_vs_dual: f64,
    pub hess_vs_fd: f64,
    pub hess_asymmetry: f64,
}

impl DerivativeCheckReport {
    pub fn passes(&self, dual_tol: f64, fd_tol: f64) -> bool {
        self.grad_vs_dual <= dual_tol
            && self.hess_vs_dual <= dual_tol
            && self.grad_vs_fd <= fd_tol
            && self.hess_vs_fd <= fd_tol
            && self.hess_asymmetry == 0.0
    }
}

#[derive(Clone, Copy, Default)]
struct SampleErrors {
    grad_dual: f64,
    grad_fd: f64,
    hess_dual: f64,
    hess_fd: f64,
    asym: f64,
}

fn sample_errors(j: &ImmersionJet1, b: f64) -> Result<SampleErrors> {
    let g = flat_mat(&area_integrand_grad(j, b)?);
    let h = area_integrand_hess(j, b)?;
    let mut asym = 0.0f64;
    for k in 0..6 {
        for l in 0..6 {
            asym = asym.max((h[k][l] - h[l][k]).abs());
        }
    }
    let hf = flat_hess(&h);
    Ok(SampleErrors {
        grad_dual: relative_error(&g, &flat_mat(&dual_gradient(j, b))),
        grad_fd: relative_error(&g, &flat_mat(&fd_gradient(j, b, FD_GRADIENT_STEP)?)),
        hess_dual: relative_error(&hf, &flat_hess(&dual_hessian(j, b))),
        hess_fd: relative_error(&hf, &flat_hess(&fd_hessian(j, b, FD_HESSIAN_STEP)?)),
        asym,
    })
}

/// Closed-form gradient and Hessian against both oracles on `samples`
/// random jets for each b. The jets are drawn once from `seed`.
pub fn check_derivatives(samples: usize, b_values: &[f64], seed: u64) -> Result<DerivativeCheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jets: Vec<ImmersionJet1> = (0..samples).map(|_| random_jet(&mut rng)).collect();
    let cases: Vec<(ImmersionJet1, f64)> = b_values.iter().flat_map(|&b| jets.iter().map(move |j| (*j, b))).collect();
    let errs: Vec<SampleErrors> = cases.par_iter().map(|(j, b)| sample_errors(j, *b)).collect::<Result<_>>()?;
    let fold = |f: fn(&SampleErrors) -> f64| errs.iter().map(f).fold(0.0f64, f64::max);
    Ok(DerivativeCheckReport {
        samples,
        b_values: b_values.to_vec(),
        grad_vs_dual: fold(|e| e.grad_dual),
        grad_vs_fd: fold(|e| e.grad_fd),
        hess_vs_dual: fold(|e| e.hess_dual),
        hess_vs_fd: fold(|e| e.hess_fd),
        hess_asymmetry: fold(|e| e.asym),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::{mce0_bracket, mean_curvature_residual};

    #[test]
    fn closed_forms_match_dual_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for b in [0.0, 0.25, 0.45] {
            for _ in 0..20 {
                let j = random_jet(&mut rng);
                let g = flat_mat(&area_integrand_grad(&j, b).unwrap());
                assert!(relative_error(&g, &flat_mat(&dual_gradient(&j, b))) < 1e-12);
                let h = flat_hess(&area_integrand_hess(&j, b).unwrap());
                assert!(relative_error(&h, &flat_hess(&dual_hessian(&j, b))) < 1e-11);
            }
        }
    }

    #[test]
    fn finite_differences_track_dual_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let j = random_jet(&mut rng);
        let b = 0.25;
        let g = flat_mat(&fd_gradient(&j, b, FD_GRADIENT_STEP).unwrap());
        assert!(relative_error(&g, &flat_mat(&dual_gradient(&j, b))) < 1e-7);
        let h = flat_hess(&fd_hessian(&j, b, FD_HESSIAN_STEP).unwrap());
        assert!(relative_error(&h, &flat_hess(&dual_hessian(&j, b))) < 1e-5);
    }

    #[test]
    fn flat_graph_gradient_at_identity_gram() {
        // C at identity Gram has gradient z itself; E has zero gradient since z³ = 0.
        let j = ImmersionJet1::graph(0.0, 0.0);
        let g = area_integrand_grad(&j, 0.3).unwrap();
        assert_eq!(g, [[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]);
        let fd = fd_gradient(&j, 0.3, FD_GRADIENT_STEP).unwrap();
        assert!(relative_error(&flat_mat(&g), &flat_mat(&fd)) < 1e-8);
    }

    #[test]
    fn residual_matches_dual_contraction() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let j1 = random_jet(&mut rng);
            let j2 = random_second_jet(&mut rng);
            let v = j1.cross();
            let r = mean_curvature_residual(&j1, &j2, 0.3, None).unwrap();
            let o = dual_mean_curvature_residual(&j1, &j2, 0.3, &v);
            assert!((r - o).abs() <= 1e-10 * o.abs().max(1.0));
            let m = mce0_bracket(&j1, &j2, 0.3, None).unwrap();
            assert!(m / r > 0.0);
        }
    }

    #[test]
    fn report_is_deterministic_and_passes() {
        let a = check_derivatives(10, &[0.0, 0.2, 0.4], 42).unwrap();
        let b = check_derivatives(10, &[0.0, 0.2, 0.4], 42).unwrap();
        assert_eq!(a, b);
        assert!(a.passes(1e-9, 1e-6), "{a:?}");
    }
}
