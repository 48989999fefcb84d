//! Damped Newton solver for the minimal-graph equation on a rectangle with
//! Dirichlet data.
//!
//! Nodes are indexed `(i, j)` with `i` along x, `j` along y, boundary
//! included, stored row-major with x fastest: `f[j * (nx + 2) + i]`.

use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dual::{self, Dual};
use crate::error::{Error, Result};
use crate::graph_pde::tilted_residual_generic;
use crate::linalg::BandMatrix;

const VERTICAL: [f64; 3] = [0.0, 0.0, 1.0];

/// Uniform tensor grid on [x0, x1] × [y0, y1] with `nx` × `ny` interior nodes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Grid {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64, nx: usize, ny: usize) -> Result<Self> {
        if nx < 8 || ny < 8 {
            return Err(Error::InvalidParameter(format!("need at least 8 interior nodes per axis, got {nx}×{ny}")));
        }
        if !(x1 > x0 && y1 > y0) || ![x0, x1, y0, y1].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter(format!("bad domain [{x0}, {x1}]×[{y0}, {y1}]")));
        }
        Ok(Self { x0, x1, y0, y1, nx, ny })
    }

    /// Square [lo, hi]² with `nodes` nodes per side, boundary included.
    pub fn square(lo: f64, hi: f64, nodes: usize) -> Result<Self> {
        let n = nodes.checked_sub(2).ok_or_else(|| Error::InvalidParameter(format!("{nodes} nodes per side")))?;
        Self::new(lo, hi, lo, hi, n, n)
    }

    pub fn hx(&self) -> f64 {
        (self.x1 - self.x0) / (self.nx + 1) as f64
    }

    pub fn hy(&self) -> f64 {
        (self.y1 - self.y0) / (self.ny + 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.hx()
    }

    pub fn y(&self, j: usize) -> f64 {
        self.y0 + j as f64 * self.hy()
    }

    pub fn width(&self) -> usize {
        self.nx + 2
    }

    pub fn len(&self) -> usize {
        (self.nx + 2) * (self.ny + 2)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn node(&self, i: usize, j: usize) -> usize {
        j * self.width() + i
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.nx + 1 || j == self.ny + 1
    }

    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for j in 0..self.ny + 2 {
            for i in 0..self.nx + 2 {
                out.push(f(self.x(i), self.y(j)));
            }
        }
        out
    }

    fn unknown(&self, i: usize, j: usize) -> usize {
        (j - 1) * self.nx + (i - 1)
    }

    fn interior(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..=self.ny).flat_map(move |j| (1..=self.nx).map(move |i| (i, j)))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridProblem {
    pub grid: Grid,
    pub b: f64,
    /// Full nodal array; only boundary entries are used.
    boundary: Vec<f64>,
}

impl GridProblem {
    pub fn new(grid: Grid, b: f64, data: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = grid.sample(data);
        Self::with_nodal_boundary(grid, b, values)
    }

    pub fn with_nodal_boundary(grid: Grid, b: f64, values: Vec<f64>) -> Result<Self> {
        if !(0.0..0.5).contains(&b) {
            return Err(Error::InvalidParameter(format!("b = {b} outside [0, 0.5)")));
        }
        if values.len() != grid.len() {
            return Err(Error::Argument(format!("expected {} nodal values, got {}", grid.len(), values.len())));
        }
        for j in 0..grid.ny + 2 {
            for i in 0..grid.nx + 2 {
                if grid.is_boundary(i, j) && !values[grid.node(i, j)].is_finite() {
                    return Err(Error::Argument(format!("non-finite boundary value at node ({i}, {j})")));
                }
            }
        }
        Ok(Self { grid, b, boundary: values })
    }

    pub fn boundary_value(&self, i: usize, j: usize) -> f64 {
        self.boundary[self.grid.node(i, j)]
    }

    /// Transfinite bilinear blend of the four edges. Exact for affine data.
    pub fn initial_guess(&self) -> Vec<f64> {
        let g = &self.grid;
        let (nx1, ny1) = (g.nx + 1, g.ny + 1);
        let bv = |i, j| self.boundary_value(i, j);
        let mut f = vec![0.0; g.len()];
        for j in 0..=ny1 {
            for i in 0..=nx1 {
                f[g.node(i, j)] = if g.is_boundary(i, j) {
                    bv(i, j)
                } else {
                    let s = i as f64 / nx1 as f64;
                    let t = j as f64 / ny1 as f64;
                    (1.0 - s) * bv(0, j) + s * bv(nx1, j) + (1.0 - t) * bv(i, 0) + t * bv(i, ny1)
                        - (1.0 - s) * (1.0 - t) * bv(0, 0)
                        - s * (1.0 - t) * bv(nx1, 0)
                        - (1.0 - s) * t * bv(0, ny1)
                        - s * t * bv(nx1, ny1)
                };
            }
        }
        f
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridSolution {
    pub grid: Grid,
    pub b: f64,
    pub f: Vec<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
    pub history: Vec<f64>,
}

/// Stencil weights taking the 3×3 neighbourhood (row-major, dy outer) to
/// (f₁, f₂, f₁₁, f₁₂, f₂₂).
fn stencil(grid: &Grid) -> [[f64; 9]; 5] {
    let (hx, hy) = (grid.hx(), grid.hy());
    let at = |dx: i32, dy: i32| ((dy + 1) * 3 + dx + 1) as usize;
    let mut w = [[0.0; 9]; 5];
    w[0][at(1, 0)] = 0.5 / hx;
    w[0][at(-1, 0)] = -0.5 / hx;
    w[1][at(0, 1)] = 0.5 / hy;
    w[1][at(0, -1)] = -0.5 / hy;
    w[2][at(1, 0)] = 1.0 / (hx * hx);
    w[2][at(-1, 0)] = 1.0 / (hx * hx);
    w[2][at(0, 0)] = -2.0 / (hx * hx);
    let c = 0.25 / (hx * hy);
    w[3][at(1, 1)] = c;
    w[3][at(-1, -1)] = c;
    w[3][at(1, -1)] = -c;
    w[3][at(-1, 1)] = -c;
    w[4][at(0, 1)] = 1.0 / (hy * hy);
    w[4][at(0, -1)] = 1.0 / (hy * hy);
    w[4][at(0, 0)] = -2.0 / (hy * hy);
    w
}

fn neighbourhood(grid: &Grid, f: &[f64], i: usize, j: usize) -> [f64; 9] {
    std::array::from_fn(|k| {
        let (dx, dy) = (k % 3, k / 3);
        f[grid.node(i + dx - 1, j + dy - 1)]
    })
}

fn local_derivatives(w: &[[f64; 9]; 5], nb: &[f64; 9]) -> [f64; 5] {
    std::array::from_fn(|m| w[m].iter().zip(nb).map(|(a, b)| a * b).sum())
}

fn check_shape(grid: &Grid, f: &[f64]) -> Result<()> {
    if f.len() != grid.len() {
        return Err(Error::Argument(format!("field has {} values, grid has {} nodes", f.len(), grid.len())));
    }
    Ok(())
}

/// Discrete residual at the interior nodes, ordered like the nodes.
pub fn assemble_residual(problem: &GridProblem, f: &[f64]) -> Result<Vec<f64>> {
    let grid = &problem.grid;
    check_shape(grid, f)?;
    let w = stencil(grid);
    let nodes: Vec<(usize, usize)> = grid.interior().collect();
    Ok(nodes
        .par_iter()
        .map(|&(i, j)| {
            tilted_residual_generic(&local_derivatives(&w, &neighbourhood(grid, f, i, j)), &VERTICAL, problem.b)
        })
        .collect())
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Jacobian of the residual with respect to the interior values: the
/// 5-vector of local derivatives is differentiated by dual numbers and
/// chained through the stencil weights.
fn assemble_jacobian(problem: &GridProblem, f: &[f64]) -> BandMatrix {
    let grid = &problem.grid;
    let w = stencil(grid);
    let n = grid.nx * grid.ny;
    let nodes: Vec<(usize, usize)> = grid.interior().collect();
    let rows: Vec<[f64; 9]> = nodes
        .par_iter()
        .map(|&(i, j)| {
            let g = local_derivatives(&w, &neighbourhood(grid, f, i, j));
            let dr = dual::gradient(|x: &[Dual<f64>; 5]| tilted_residual_generic(x, &VERTICAL, problem.b), &g);
            std::array::from_fn(|k| (0..5).map(|m| dr[m] * w[m][k]).sum())
        })
        .collect();
    let mut jac = BandMatrix::zeros(n, grid.nx + 1, grid.nx + 1);
    for (row, (&(i, j), coeffs)) in nodes.iter().zip(&rows).enumerate() {
        for (k, &c) in coeffs.iter().enumerate() {
            let (ii, jj) = (i + k % 3 - 1, j + k / 3 - 1);
            if c != 0.0 && !grid.is_boundary(ii, jj) {
                jac.add(row, grid.unknown(ii, jj), c);
            }
        }
    }
    jac
}

pub const ARMIJO_C: f64 = 1e-4;
pub const MIN_STEP: f64 = 1.0 / (1u64 << 20) as f64;

/// Damped Newton from the transfinite initial guess. Each step halves the
/// damping until the residual max-norm drops by the Armijo factor.
pub fn solve_minimal_graph(problem: &GridProblem, tol: f64, max_iter: usize) -> Result<GridSolution> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let grid = problem.grid;
    let mut f = problem.initial_guess();
    let mut r = assemble_residual(problem, &f)?;
    let mut norm = max_norm(&r);
    let mut history = vec![norm];
    let mut iterations = 0;
    while norm > tol {
        if iterations == max_iter {
            return Err(Error::SolverNonConvergence { history });
        }
        let lu = assemble_jacobian(problem, &f).factor()?;
        let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
        let delta = lu.solve(&rhs);
        let mut step = 1.0;
        loop {
            let mut trial = f.clone();
            for (k, (i, j)) in grid.interior().enumerate() {
                trial[grid.node(i, j)] += step * delta[k];
            }
            let tr = assemble_residual(problem, &trial)?;
            let tn = max_norm(&tr);
            if tn <= (1.0 - ARMIJO_C * step) * norm {
                f = trial;
                r = tr;
                norm = tn;
                break;
            }
            step *= 0.5;
            if step < MIN_STEP {
                return Err(Error::Stagnation { history });
            }
        }
        iterations += 1;
        history.push(norm);
    }
    Ok(GridSolution { grid, b: problem.b, f, residual_norm: norm, iterations, history })
}

/// Max-norm of the least-squares affine fit residual over all nodes.
pub fn planarity_deviation(sol: &GridSolution) -> f64 {
    field_planarity_deviation(&sol.grid, &sol.f)
}

pub fn field_planarity_deviation(grid: &Grid, f: &[f64]) -> f64 {
    let cx = 0.5 * (grid.x0 + grid.x1);
    let cy = 0.5 * (grid.y0 + grid.y1);
    let mut ata = Matrix3::<f64>::zeros();
    let mut atb = Vector3::<f64>::zeros();
    let mut pts = Vec::with_capacity(grid.len());
    for j in 0..grid.ny + 2 {
        for i in 0..grid.nx + 2 {
            let row = Vector3::new(grid.x(i) - cx, grid.y(j) - cy, 1.0);
            let v = f[grid.node(i, j)];
            ata += row * row.transpose();
            atb += row * v;
            pts.push((row, v));
        }
    }
    let coef = ata.lu().solve(&atb).expect("grid coordinates span an affine basis");
    pts.iter().fold(0.0f64, |m, (row, v)| m.max((row.dot(&coef) - v).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_pde::{graph_residual, GraphPoint};

    fn scherk(x: f64, y: f64) -> f64 {
        (x.cos() / y.cos()).ln()
    }

    #[test]
    fn affine_fields_have_zero_residual() {
        let grid = Grid::square(-1.0, 1.0, 17).unwrap();
        let p = GridProblem::new(grid, 0.4, |x, y| 0.3 * x + 0.2 * y + 0.1).unwrap();
        let r = assemble_residual(&p, &p.initial_guess()).unwrap();
        assert!(max_norm(&r) < 1e-12);
    }

    #[test]
    fn paraboloid_centre_residual() {
        let grid = Grid::new(-1.0, 1.0, -1.0, 1.0, 9, 9).unwrap();
        let p = GridProblem::new(grid, 0.0, |_, _| 0.0).unwrap();
        let f = grid.sample(|x, y| x * x + y * y);
        let r = assemble_residual(&p, &f).unwrap();
        let centre = grid.unknown(5, 5);
        assert!((grid.x(5)).abs() < 1e-15);
        assert!((r[centre] - 16.0).abs() < 1e-12);
    }

    #[test]
    fn residual_matches_pointwise_operator() {
        let grid = Grid::new(0.0, 1.0, 0.0, 2.0, 8, 10).unwrap();
        let p = GridProblem::new(grid, 0.3, |_, _| 0.0).unwrap();
        let f = grid.sample(|x, y| (x * y).sin() + x * x);
        let r = assemble_residual(&p, &f).unwrap();
        let (i, j) = (3, 4);
        let (hx, hy) = (grid.hx(), grid.hy());
        let v = |a: usize, b: usize| f[grid.node(a, b)];
        let gp = GraphPoint::new(
            (v(i + 1, j) - v(i - 1, j)) / (2.0 * hx),
            (v(i, j + 1) - v(i, j - 1)) / (2.0 * hy),
            (v(i + 1, j) - 2.0 * v(i, j) + v(i - 1, j)) / (hx * hx),
            (v(i + 1, j + 1) - v(i + 1, j - 1) - v(i - 1, j + 1) + v(i - 1, j - 1)) / (4.0 * hx * hy),
            (v(i, j + 1) - 2.0 * v(i, j) + v(i, j - 1)) / (hy * hy),
        )
        .unwrap();
        let expected = graph_residual(&gp, 0.3);
        assert!((r[grid.unknown(i, j)] - expected).abs() <= 1e-9 * expected.abs().max(1.0));
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let grid = Grid::new(0.0, 1.0, 0.0, 1.0, 8, 8).unwrap();
        let p = GridProblem::new(grid, 0.35, |x, y| x * y).unwrap();
        let f = grid.sample(|x, y| (2.0 * x).sin() * y + 0.3 * x * x);
        let jac = assemble_jacobian(&p, &f);
        let (ci, cj) = (4, 5);
        let col = grid.unknown(ci, cj);
        let h = 1e-6;
        let mut fp = f.clone();
        fp[grid.node(ci, cj)] += h;
        let mut fm = f.clone();
        fm[grid.node(ci, cj)] -= h;
        let rp = assemble_residual(&p, &fp).unwrap();
        let rm = assemble_residual(&p, &fm).unwrap();
        for row in 0..grid.nx * grid.ny {
            let fd = (rp[row] - rm[row]) / (2.0 * h);
            let an = jac.get(row, col);
            assert!((fd - an).abs() <= 1e-5 * an.abs().max(1.0), "row {row}: {fd} vs {an}");
        }
    }

    #[test]
    fn zero_boundary_gives_zero_solution() {
        let grid = Grid::square(0.0, 1.0, 12).unwrap();
        let p = GridProblem::new(grid, 0.3, |_, _| 0.0).unwrap();
        let s = solve_minimal_graph(&p, 1e-10, 20).unwrap();
        assert_eq!(s.iterations, 0);
        assert!(s.f.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn non_affine_boundary_converges() {
        let grid = Grid::square(-1.0, 1.0, 17).unwrap();
        let p = GridProblem::new(grid, 0.3, |x, y| 0.5 * (x * x - y * y) + 0.2 * x).unwrap();
        let s = solve_minimal_graph(&p, 1e-9, 30).unwrap();
        assert!(s.residual_norm <= 1e-9);
        assert!(s.iterations >= 1);
        let tail = &s.history[s.history.len().saturating_sub(3)..];
        assert!(tail.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn scherk_boundary_tracks_analytic_solution() {
        let grid = Grid::square(-1.0, 1.0, 17).unwrap();
        let p = GridProblem::new(grid, 0.0, scherk).unwrap();
        let s = solve_minimal_graph(&p, 1e-9, 30).unwrap();
        let exact = grid.sample(scherk);
        let err = s.f.iter().zip(&exact).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-2, "{err}");
    }

    #[test]
    fn iteration_cap_reports_history() {
        let grid = Grid::square(-1.0, 1.0, 17).unwrap();
        let p = GridProblem::new(grid, 0.3, |x, y| x * x - y * y).unwrap();
        match solve_minimal_graph(&p, 1e-12, 1) {
            Err(Error::SolverNonConvergence { history }) => assert_eq!(history.len(), 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn validation() {
        assert!(Grid::new(0.0, 1.0, 0.0, 1.0, 7, 8).is_err());
        assert!(Grid::new(1.0, 0.0, 0.0, 1.0, 8, 8).is_err());
        let grid = Grid::square(0.0, 1.0, 10).unwrap();
        assert!(GridProblem::new(grid, 0.5, |_, _| 0.0).is_err());
        assert!(GridProblem::with_nodal_boundary(grid, 0.1, vec![0.0; 3]).is_err());
        let p = GridProblem::new(grid, 0.1, |_, _| 0.0).unwrap();
        assert!(assemble_residual(&p, &[0.0; 4]).is_err());
        assert!(solve_minimal_graph(&p, 0.0, 5).is_err());
    }

    #[test]
    fn planarity_of_affine_and_quadratic_fields() {
        let grid = Grid::square(0.0, 1.0, 11).unwrap();
        let affine = grid.sample(|x, y| 2.0 * x - 3.0 * y + 0.5);
        assert!(field_planarity_deviation(&grid, &affine) <= 1e-13);

        // Best least-squares line for x² on the 11 nodes of [0, 1].
        let xs: Vec<f64> = (0..11).map(|i| i as f64 / 10.0).collect();
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = xs.iter().map(|x| x * x).sum::<f64>() / n;
        let sxy: f64 = xs.iter().map(|x| (x - mx) * (x * x - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        let slope = sxy / sxx;
        let icpt = my - slope * mx;
        let expected = xs.iter().fold(0.0f64, |m, x| m.max((x * x - slope * x - icpt).abs()));
        let quad = grid.sample(|x, _| x * x);
        let got = field_planarity_deviation(&grid, &quad);
        assert!(got > 0.0);
        assert!((got - expected).abs() < 1e-13, "{got} vs {expected}");
    }
}
