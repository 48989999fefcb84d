//! First and second jets of an immersion into R³ and the Matsumoto area
//! integrand 𝓕 = 2C³/(2C² + E) built on them.
//!
//! Conventions: `z[i][e]` is ∂φⁱ/∂xᵉ with ambient index `i ∈ 0..3` and surface
//! index `e ∈ 0..2`. Derivatives with respect to z are flattened with the
//! index `2*i + e`.

use serde::{Deserialize, Serialize};

use crate::dual::Scalar;
use crate::error::{Error, Result};
use crate::field::Field;

pub type Mat32 = [[f64; 2]; 3];
pub type Mat2 = [[f64; 2]; 2];
pub type Hess6 = [[f64; 6]; 6];

#[inline]
pub fn flat(i: usize, e: usize) -> usize {
    2 * i + e
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImmersionJet1 {
    pub z: Mat32,
}

impl ImmersionJet1 {
    pub fn new(z: Mat32) -> Self {
        Self { z }
    }

    /// Columns ∂φ/∂x¹, ∂φ/∂x² of the graph x ↦ (x¹, x², f(x)).
    pub fn graph(f1: f64, f2: f64) -> Self {
        Self { z: [[1.0, 0.0], [0.0, 1.0], [f1, f2]] }
    }

    pub fn column(&self, e: usize) -> [f64; 3] {
        [self.z[0][e], self.z[1][e], self.z[2][e]]
    }

    /// Euclidean normal φ_{x¹} × φ_{x²}.
    pub fn cross(&self) -> [f64; 3] {
        cross(&self.column(0), &self.column(1))
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self { z: self.z.map(|r| r.map(|v| v * k)) }
    }
}

/// Second derivatives ∂²φⁱ/∂xᵉ∂xʰ, symmetric in the last two indices.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImmersionJet2 {
    second: [[[f64; 2]; 2]; 3],
}

impl ImmersionJet2 {
    pub fn new(second: [[[f64; 2]; 2]; 3]) -> Result<Self> {
        for (i, s) in second.iter().enumerate() {
            if s[0][1] != s[1][0] {
                return Err(Error::Argument(format!(
                    "second derivatives of component {i} are not symmetric: {} vs {}",
                    s[0][1], s[1][0]
                )));
            }
        }
        Ok(Self { second })
    }

    pub fn zero() -> Self {
        Self { second: [[[0.0; 2]; 2]; 3] }
    }

    /// Second jet of a graph: only the third component is curved.
    pub fn graph(h11: f64, h12: f64, h22: f64) -> Self {
        let mut second = [[[0.0; 2]; 2]; 3];
        second[2] = [[h11, h12], [h12, h22]];
        Self { second }
    }

    pub fn get(&self, i: usize, e: usize, h: usize) -> f64 {
        self.second[i][e][h]
    }

    pub fn components(&self) -> &[[[f64; 2]; 2]; 3] {
        &self.second
    }

    pub fn linear_combination(&self, a: f64, other: &Self, c: f64) -> Self {
        let mut second = self.second;
        for i in 0..3 {
            for e in 0..2 {
                for h in 0..2 {
                    second[i][e][h] = a * self.second[i][e][h] + c * other.second[i][e][h];
                }
            }
        }
        Self { second }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AreaJetScalars {
    pub a: Mat2,
    pub c: f64,
    pub e: f64,
    pub fval: f64,
}

impl AreaJetScalars {
    /// B = E/C², the squared α-norm of the pulled-back one-form.
    pub fn b_ratio(&self) -> f64 {
        self.e / (self.c * self.c)
    }
}

pub fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn gram(j: &ImmersionJet1) -> Mat2 {
    gram_generic(&j.z)
}

fn gram_generic<F: Field>(z: &[[F; 2]; 3]) -> [[F; 2]; 2] {
    let entry = |a: usize, b: usize| (0..3).fold(F::zero(), |acc, i| acc + z[i][a].clone() * z[i][b].clone());
    let a01 = entry(0, 1);
    [[entry(0, 0), a01.clone()], [a01, entry(1, 1)]]
}

/// E = b² Σ_k Σ_{γτ} (−1)^{γ+τ} z^k_{γ̄} z^k_{τ̄} z³_γ z³_τ, where γ̄ is the
/// other surface index.
pub fn e_scalar(j: &ImmersionJet1, b: f64) -> f64 {
    let z = &j.z;
    let mut sum = 0.0;
    for k in 0..3 {
        for g in 0..2 {
            for t in 0..2 {
                let sign = if (g + t) % 2 == 0 { 1.0 } else { -1.0 };
                sum += sign * z[k][1 - g] * z[k][1 - t] * z[2][g] * z[2][t];
            }
        }
    }
    b * b * sum
}

fn degeneracy(a: &Mat2) -> Result<f64> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let tr = a[0][0] + a[1][1];
    if !(det > 1e-14 * tr * tr) {
        return Err(Error::DegenerateJet { det_a: det, trace_a: tr });
    }
    Ok(det)
}

pub fn area_jet_scalars(j: &ImmersionJet1, b: f64) -> Result<AreaJetScalars> {
    let a = gram(j);
    let det = degeneracy(&a)?;
    let c = det.sqrt();
    let e = e_scalar(j, b);
    Ok(AreaJetScalars { a, c, e, fval: 2.0 * c * c * c / (2.0 * c * c + e) })
}

pub fn area_integrand(j: &ImmersionJet1, b: f64) -> Result<f64> {
    Ok(area_jet_scalars(j, b)?.fval)
}

/// 𝓕 straight from its definition for any scalar type: A from the columns,
/// C = √det A, E from the barred-index sum. Used as the differentiation
/// oracle; it shares no derivative code with the closed forms below.
pub fn area_integrand_generic<S: Scalar>(z: &[[S; 2]; 3], b: f64) -> S {
    let mut a = [[S::zero(); 2]; 2];
    for (p, row) in a.iter_mut().enumerate() {
        for (q, v) in row.iter_mut().enumerate() {
            for zi in z {
                *v += zi[p] * zi[q];
            }
        }
    }
    let c = (a[0][0] * a[1][1] - a[0][1] * a[1][0]).sqrt();
    let mut e = S::zero();
    for zk in z {
        for g in 0..2 {
            for t in 0..2 {
                let term = zk[1 - g] * zk[1 - t] * z[2][g] * z[2][t];
                if (g + t) % 2 == 0 {
                    e += term;
                } else {
                    e -= term;
                }
            }
        }
    }
    let e = e.scale(b * b);
    let c2 = c * c;
    (c2 * c).scale(2.0) / (c2.scale(2.0) + e)
}

/// Closed-form first and second z-derivatives of D = det A (= C²) and of
/// E, from the adjugate expansion of A.
#[derive(Clone, Debug)]
pub struct JetDerivatives<F> {
    pub d: F,
    pub e: F,
    pub dd: [F; 6],
    pub de: [F; 6],
    pub ddd: [[F; 6]; 6],
    pub dde: [[F; 6]; 6],
}

fn adj<F: Field>(m: &[[F; 2]; 2]) -> [[F; 2]; 2] {
    [[m[1][1].clone(), -m[0][1].clone()], [-m[1][0].clone(), m[0][0].clone()]]
}

fn trace_prod<F: Field>(x: &[[F; 2]; 2], y: &[[F; 2]; 2]) -> F {
    let mut s = F::zero();
    for p in 0..2 {
        for q in 0..2 {
            s = s + x[p][q].clone() * y[q][p].clone();
        }
    }
    s
}

fn quad_form<F: Field>(m: &[[F; 2]; 2], v: &[F; 2]) -> F {
    let mut s = F::zero();
    for p in 0..2 {
        for q in 0..2 {
            s = s + v[p].clone() * m[p][q].clone() * v[q].clone();
        }
    }
    s
}

fn mat_vec<F: Field>(m: &[[F; 2]; 2], v: &[F; 2]) -> [F; 2] {
    [
        m[0][0].clone() * v[0].clone() + m[0][1].clone() * v[1].clone(),
        m[1][0].clone() * v[0].clone() + m[1][1].clone() * v[1].clone(),
    ]
}

impl<F: Field> JetDerivatives<F> {
    /// `b2` is b², so that exact-rational callers never need a square root.
    pub fn compute(z: &[[F; 2]; 3], b2: &F) -> Self {
        let a = gram_generic(z);
        let adj_a = adj(&a);
        let z3 = [z[2][0].clone(), z[2][1].clone()];
        let d = a[0][0].clone() * a[1][1].clone() - a[0][1].clone() * a[1][0].clone();
        let q = quad_form(&adj_a, &z3);

        // ∂A_{αβ}/∂z^i_ε = δ_{αε} z^i_β + δ_{βε} z^i_α
        let da: Vec<[[F; 2]; 2]> = (0..6)
            .map(|k| {
                let (i, e) = (k / 2, k % 2);
                let mut m = [[F::zero(), F::zero()], [F::zero(), F::zero()]];
                for (al, row) in m.iter_mut().enumerate() {
                    for (be, v) in row.iter_mut().enumerate() {
                        let mut s = F::zero();
                        if al == e {
                            s = s + z[i][be].clone();
                        }
                        if be == e {
                            s = s + z[i][al].clone();
                        }
                        *v = s;
                    }
                }
                m
            })
            .collect();
        let adj_da: Vec<[[F; 2]; 2]> = da.iter().map(adj).collect();
        let adj_a_z3 = mat_vec(&adj_a, &z3);

        let dd: [F; 6] = std::array::from_fn(|k| trace_prod(&adj_a, &da[k]));
        let dq: [F; 6] = std::array::from_fn(|k| {
            let mut s = quad_form(&adj_da[k], &z3);
            if k / 2 == 2 {
                s = s + F::from_i64(2) * adj_a_z3[k % 2].clone();
            }
            s
        });

        let two = F::from_i64(2);
        let ddd: [[F; 6]; 6] = std::array::from_fn(|k| {
            std::array::from_fn(|l| {
                let (i, e) = (k / 2, k % 2);
                let (j, h) = (l / 2, l % 2);
                // ∂²A/∂z^i_ε∂z^j_η = δ_ij (δ_{αε}δ_{βη} + δ_{βε}δ_{αη})
                let mut s = trace_prod(&adj_da[l], &da[k]);
                if i == j {
                    let d2a = d2a_unit::<F>(e, h);
                    s = s + trace_prod(&adj_a, &d2a);
                }
                s
            })
        });
        let ddq: [[F; 6]; 6] = std::array::from_fn(|k| {
            std::array::from_fn(|l| {
                let (i, e) = (k / 2, k % 2);
                let (j, h) = (l / 2, l % 2);
                let mut s = F::zero();
                if i == j {
                    s = s + quad_form(&adj(&d2a_unit::<F>(e, h)), &z3);
                }
                if j == 2 {
                    s = s + two.clone() * mat_vec(&adj_da[k], &z3)[h].clone();
                }
                if i == 2 {
                    s = s + two.clone() * mat_vec(&adj_da[l], &z3)[e].clone();
                }
                if i == 2 && j == 2 {
                    s = s + two.clone() * adj_a[e][h].clone();
                }
                s
            })
        });
        let scale6 = |v: &[F; 6]| -> [F; 6] { std::array::from_fn(|k| b2.clone() * v[k].clone()) };
        let scale66 = |m: &[[F; 6]; 6]| -> [[F; 6]; 6] {
            std::array::from_fn(|k| std::array::from_fn(|l| b2.clone() * m[k][l].clone()))
        };
        Self { e: b2.clone() * q, de: scale6(&dq), dde: scale66(&ddq), d, dd, ddd }
    }
}

fn d2a_unit<F: Field>(e: usize, h: usize) -> [[F; 2]; 2] {
    let mut m = [[F::zero(), F::zero()], [F::zero(), F::zero()]];
    m[e][h] = m[e][h].clone() + F::one();
    m[h][e] = m[h][e].clone() + F::one();
    m
}

fn checked_derivs(j: &ImmersionJet1, b: f64) -> Result<(JetDerivatives<f64>, f64)> {
    let det = degeneracy(&gram(j))?;
    Ok((JetDerivatives::compute(&j.z, &(b * b)), det.sqrt()))
}

/// ∂C/∂z and ∂²C/∂z² from ∂D, ∂²D with C = √D.
fn c_derivatives(dv: &JetDerivatives<f64>, c: f64) -> ([f64; 6], Hess6) {
    let dc: [f64; 6] = std::array::from_fn(|k| dv.dd[k] / (2.0 * c));
    let ddc: Hess6 = std::array::from_fn(|k| {
        std::array::from_fn(|l| dv.ddd[k][l] / (2.0 * c) - dv.dd[k] * dv.dd[l] / (4.0 * c * c * c))
    });
    (dc, ddc)
}

/// ∂𝓕/∂z^i_ε = (4C⁴ + 6C²E)/(2C² + E)² ∂C − 2C³/(2C² + E)² ∂E.
pub fn area_integrand_grad(j: &ImmersionJet1, b: f64) -> Result<Mat32> {
    let (dv, c) = checked_derivs(j, b)?;
    let (dc, _) = c_derivatives(&dv, c);
    let e = dv.e;
    let t = 2.0 * c * c + e;
    let p = (4.0 * c.powi(4) + 6.0 * c * c * e) / (t * t);
    let q = 2.0 * c.powi(3) / (t * t);
    let mut g = [[0.0; 2]; 3];
    for (i, row) in g.iter_mut().enumerate() {
        for (e_idx, v) in row.iter_mut().enumerate() {
            let k = flat(i, e_idx);
            *v = p * dc[k] - q * dv.de[k];
        }
    }
    Ok(g)
}

/// Full second derivative of 𝓕 in z, assembled term by term from ∂C, ∂E,
/// ∂²C and ∂²E with T = 2C² + E:
///
/// (4C⁴+6C²E)/T² ∂²C − 2C³/T² ∂²E + (12CE² − 8C³E)/T³ ∂C∂C
/// + (4C⁴ − 6C²E)/T³ (∂C∂E + ∂E∂C) + 4C³/T³ ∂E∂E.
pub fn area_integrand_hess(j: &ImmersionJet1, b: f64) -> Result<Hess6> {
    let (dv, c) = checked_derivs(j, b)?;
    let (dc, ddc) = c_derivatives(&dv, c);
    let e = dv.e;
    let t = 2.0 * c * c + e;
    let (t2, t3) = (t * t, t * t * t);
    let k_ddc = (4.0 * c.powi(4) + 6.0 * c * c * e) / t2;
    let k_dde = -2.0 * c.powi(3) / t2;
    let k_cc = (12.0 * c * e * e - 8.0 * c.powi(3) * e) / t3;
    let k_ce = (4.0 * c.powi(4) - 6.0 * c * c * e) / t3;
    let k_ee = 4.0 * c.powi(3) / t3;
    let mut h = [[0.0; 6]; 6];
    for k in 0..6 {
        for l in k..6 {
            let v = k_ddc * ddc[k][l]
                + k_dde * dv.dde[k][l]
                + k_cc * dc[k] * dc[l]
                + k_ce * (dc[k] * dv.de[l] + dv.de[k] * dc[l])
                + k_ee * dv.de[k] * dv.de[l];
            h[k][l] = v;
            h[l][k] = v;
        }
    }
    Ok(h)
}

fn transversal(j: &ImmersionJet1, v: Option<[f64; 3]>) -> Result<[f64; 3]> {
    let n = j.cross();
    let v = v.unwrap_or(n);
    let triple = n[0] * v[0] + n[1] * v[1] + n[2] * v[2];
    let norm = |x: &[f64; 3]| (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    if !(triple.abs() > 1e-12 * norm(&n) * norm(&v)) {
        return Err(Error::DegenerateTransversal { triple });
    }
    Ok(v)
}

fn contract(h: &Hess6, j2: &ImmersionJet2, v: &[f64; 3]) -> f64 {
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

/// Σ (∂²𝓕/∂z^i_ε∂z^j_η)(∂²φʲ/∂xᵉ∂xʰ) vⁱ. Vanishes iff the immersion is
/// minimal at this jet. `v` defaults to the Euclidean normal φ_{x¹} × φ_{x²}.
pub fn mean_curvature_residual(j1: &ImmersionJet1, j2: &ImmersionJet2, b: f64, v: Option<[f64; 3]>) -> Result<f64> {
    let v = transversal(j1, v)?;
    let h = area_integrand_hess(j1, b)?;
    Ok(contract(&h, j2, &v))
}

/// The residual rewritten in terms of ∂²C² and with the positive factor
/// T³/C (T = 2C² + E) multiplied through:
///
/// (2C²+3E)T ∂²C² − 2C²T ∂²E − 2(4C⁴ + 12C²E − 3E²) ∂C∂C + 4C² ∂E∂E
/// + (4C³ − 6CE)(∂C∂E + ∂E∂C),
///
/// contracted with the second jet and `v`. Every C appears paired so the
/// expression is a rational function of D = C²; see [`mce0_bracket_exact`].
pub fn mce0_bracket(j1: &ImmersionJet1, j2: &ImmersionJet2, b: f64, v: Option<[f64; 3]>) -> Result<f64> {
    let v = transversal(j1, v)?;
    degeneracy(&gram(j1))?;
    Ok(mce0_bracket_exact(&j1.z, j2.components(), &(b * b), &v))
}

/// Field-generic bracket (no square roots): with ∂C = ∂D/(2C),
/// ∂C∂C = ∂D∂D/(4D) and (4C³ − 6CE)∂C = (2D − 3E)∂D.
pub fn mce0_bracket_exact<F: Field>(z: &[[F; 2]; 3], second: &[[[F; 2]; 2]; 3], b2: &F, v: &[F; 3]) -> F {
    let dv = JetDerivatives::compute(z, b2);
    let d = dv.d.clone();
    let e = dv.e.clone();
    let n = |x: i64| F::from_i64(x);
    let t = n(2) * d.clone() + e.clone();
    let k_ddd = (n(2) * d.clone() + n(3) * e.clone()) * t.clone();
    let k_dde = -(n(2) * d.clone() * t);
    // −2(4D² + 12DE − 3E²)/(4D)
    let k_dddd = -(n(4) * d.clone() * d.clone() + n(12) * d.clone() * e.clone() - n(3) * e.clone() * e.clone())
        / (n(2) * d.clone());
    let k_ee = n(4) * d.clone();
    let k_de = n(2) * d - n(3) * e;

    let mut total = F::zero();
    for (i, vi) in v.iter().enumerate() {
        for ee in 0..2 {
            let k = flat(i, ee);
            for (jj, comp) in second.iter().enumerate() {
                for hh in 0..2 {
                    let l = flat(jj, hh);
                    let w = comp[ee][hh].clone() * vi.clone();
                    if w.is_zero_value() {
                        continue;
                    }
                    let term = k_ddd.clone() * dv.ddd[k][l].clone()
                        + k_dde.clone() * dv.dde[k][l].clone()
                        + k_dddd.clone() * dv.dd[k].clone() * dv.dd[l].clone()
                        + k_ee.clone() * dv.de[k].clone() * dv.de[l].clone()
                        + k_de.clone() * (dv.dd[k].clone() * dv.de[l].clone() + dv.de[k].clone() * dv.dd[l].clone());
                    total = total + term * w;
                }
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gram_examples() {
        assert_eq!(gram(&ImmersionJet1::graph(0.0, 0.0)), [[1.0, 0.0], [0.0, 1.0]]);
        let (a, c) = (0.7, -1.3);
        let g = gram(&ImmersionJet1::graph(a, c));
        assert_eq!(g, [[1.0 + a * a, a * c], [a * c, 1.0 + c * c]]);
        assert_eq!(gram(&ImmersionJet1::new([[2.0, 0.0], [0.0, 1.0], [0.0, 0.0]])), [[4.0, 0.0], [0.0, 1.0]]);
    }

    #[test]
    fn e_scalar_on_graphs() {
        let (a, c, b) = (0.4, -0.9, 0.3);
        let w2 = 1.0 + a * a + c * c;
        assert_relative_eq!(e_scalar(&ImmersionJet1::graph(a, c), b), b * b * (w2 - 1.0), max_relative = 1e-14);
        let flat_jet = ImmersionJet1::new([[1.0, 2.0], [3.0, -1.0], [0.0, 0.0]]);
        assert_eq!(e_scalar(&flat_jet, 0.4), 0.0);
    }

    #[test]
    fn integrand_examples() {
        assert_eq!(area_integrand(&ImmersionJet1::graph(0.0, 0.0), 0.4).unwrap(), 1.0);
        // C = √2, E = 0.09: 2·2√2/(4 + 0.09)
        let v = area_integrand(&ImmersionJet1::graph(1.0, 0.0), 0.3).unwrap();
        assert_relative_eq!(v, 4.0 * 2f64.sqrt() / 4.09, max_relative = 1e-15);
        assert_relative_eq!(v, 1.383_093_948_531_144, max_relative = 1e-15);
        let j = ImmersionJet1::new([[1.2, -0.3], [0.4, 0.9], [0.5, 0.8]]);
        let c = area_jet_scalars(&j, 0.0).unwrap().c;
        assert_relative_eq!(area_integrand(&j, 0.0).unwrap(), c, max_relative = 1e-15);
    }

    #[test]
    fn b_ratio_is_the_pulled_back_one_form_norm() {
        // Graph: B = b²(W² − 1)/W².
        let (a, c, b) = (0.6, 0.2, 0.45);
        let s = area_jet_scalars(&ImmersionJet1::graph(a, c), b).unwrap();
        let w2 = 1.0 + a * a + c * c;
        assert_relative_eq!(s.b_ratio(), b * b * (w2 - 1.0) / w2, max_relative = 1e-14);
        assert_relative_eq!(s.fval, 2.0 * s.c / (2.0 + s.b_ratio()), max_relative = 1e-14);
    }

    #[test]
    fn degenerate_jets_are_rejected() {
        let j = ImmersionJet1::new([[1.0, 2.0], [1.0, 2.0], [1.0, 2.0]]);
        assert!(matches!(area_integrand(&j, 0.2), Err(Error::DegenerateJet { .. })));
        assert!(area_integrand_grad(&j, 0.2).is_err());
        assert!(area_integrand_hess(&j, 0.2).is_err());
    }

    #[test]
    fn tangential_field_is_rejected() {
        let j = ImmersionJet1::graph(0.3, 0.1);
        let v = j.column(0);
        let err = mean_curvature_residual(&j, &ImmersionJet2::graph(1.0, 0.0, 0.0), 0.2, Some(v)).unwrap_err();
        assert!(matches!(err, Error::DegenerateTransversal { .. }));
    }

    #[test]
    fn asymmetric_second_jet_is_rejected() {
        let mut s = [[[0.0; 2]; 2]; 3];
        s[1][0][1] = 1.0;
        assert!(ImmersionJet2::new(s).is_err());
    }

    #[test]
    fn affine_immersions_have_zero_residual() {
        let j = ImmersionJet1::new([[1.2, -0.3], [0.4, 0.9], [0.5, 0.8]]);
        for b in [0.0, 0.2, 0.45] {
            assert_eq!(mean_curvature_residual(&j, &ImmersionJet2::zero(), b, None).unwrap(), 0.0);
            assert_eq!(mce0_bracket(&j, &ImmersionJet2::zero(), b, None).unwrap(), 0.0);
        }
    }

    fn scherk_jets(x: f64, y: f64) -> (ImmersionJet1, ImmersionJet2) {
        // f = log(cos x / cos y)
        let f1 = -x.tan();
        let f2 = y.tan();
        let h11 = -1.0 / (x.cos() * x.cos());
        let h22 = 1.0 / (y.cos() * y.cos());
        (ImmersionJet1::graph(f1, f2), ImmersionJet2::graph(h11, 0.0, h22))
    }

    #[test]
    fn scherk_is_euclidean_minimal() {
        let (j1, j2) = scherk_jets(0.3, 0.4);
        assert!(mean_curvature_residual(&j1, &j2, 0.0, None).unwrap().abs() < 1e-9);
        assert!(mce0_bracket(&j1, &j2, 0.0, None).unwrap().abs() < 1e-9);
        assert!(mean_curvature_residual(&j1, &j2, 0.3, None).unwrap().abs() > 1e-4);
    }

    #[test]
    fn paraboloid_residual_is_positive() {
        let j1 = ImmersionJet1::graph(0.0, 0.0);
        let j2 = ImmersionJet2::graph(2.0, 0.0, 2.0);
        let r = mean_curvature_residual(&j1, &j2, 0.2, None).unwrap();
        // At the vertex W = 1, T = 2: Hessian of g(p) is (T − 2b²)·2W/T² · δ, traced against 2δ.
        let expected = 2.0 * (2.0 - 2.0 * 0.04) / 4.0 * 4.0;
        assert!(r > 0.0);
        assert_relative_eq!(r, expected, max_relative = 1e-13);
    }

    #[test]
    fn bracket_over_residual_is_t_cubed_over_c() {
        let j1 = ImmersionJet1::new([[1.1, 0.2], [-0.3, 0.8], [0.6, -0.4]]);
        let mut s = [[[0.0; 2]; 2]; 3];
        s[0] = [[0.3, -0.2], [-0.2, 0.5]];
        s[1] = [[-0.7, 0.1], [0.1, 0.2]];
        s[2] = [[0.4, 0.9], [0.9, -0.6]];
        let j2 = ImmersionJet2::new(s).unwrap();
        let b = 0.3;
        let sc = area_jet_scalars(&j1, b).unwrap();
        let t = 2.0 * sc.c * sc.c + sc.e;
        let r = mean_curvature_residual(&j1, &j2, b, None).unwrap();
        let m = mce0_bracket(&j1, &j2, b, None).unwrap();
        assert_relative_eq!(m / r, t.powi(3) / sc.c, max_relative = 1e-10);
    }

    #[test]
    fn bracket_at_b_zero_is_scaled_hessian_of_c() {
        let j1 = ImmersionJet1::new([[0.9, 0.1], [0.2, 1.1], [-0.5, 0.3]]);
        let mut s = [[[0.0; 2]; 2]; 3];
        s[2] = [[1.0, 0.3], [0.3, -0.2]];
        s[0] = [[0.2, 0.0], [0.0, 0.1]];
        let j2 = ImmersionJet2::new(s).unwrap();
        let c = area_jet_scalars(&j1, 0.0).unwrap().c;
        let hess_c_contraction = mean_curvature_residual(&j1, &j2, 0.0, None).unwrap();
        let m = mce0_bracket(&j1, &j2, 0.0, None).unwrap();
        assert_relative_eq!(m, 8.0 * c.powi(5) * hess_c_contraction, max_relative = 1e-11);
    }
}
