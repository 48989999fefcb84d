//! Composite Gauss–Legendre quadrature.

use std::sync::OnceLock;

/// Nodes per panel of the composite rule.
pub const PANEL_ORDER: usize = 16;

/// Gauss–Legendre nodes and weights on [-1, 1] for `n` points, by Newton
/// iteration on P_n from the Chebyshev initial guesses.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn panel_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_ORDER))
}

/// Integrates each of `fs` over `[a, b]` with `panels` equal panels of the
/// 16-point rule, sharing nodes between the integrands.
pub fn composite<const K: usize>(a: f64, b: f64, panels: usize, f: impl Fn(f64) -> [f64; K]) -> [f64; K] {
    let (x, w) = panel_rule();
    let width = (b - a) / panels as f64;
    let mut acc = [0.0; K];
    for p in 0..panels {
        let lo = a + p as f64 * width;
        let mid = lo + 0.5 * width;
        let mut part = [0.0; K];
        for (xi, wi) in x.iter().zip(w) {
            let vals = f(mid + 0.5 * width * xi);
            for k in 0..K {
                part[k] += wi * vals[k];
            }
        }
        for k in 0..K {
            acc[k] += 0.5 * width * part[k];
        }
    }
    acc
}
