use fm_core::graph_pde::{
    divisor, ellipticity_coefficients, graph_jets, graph_residual, tilted_graph_residual, tilted_jets, GraphPoint,
    TiltedFrame,
};
use fm_core::gridio::{read_grid, write_grid};
use fm_core::jet::{
    area_integrand, e_scalar, gram, mce0_bracket, mean_curvature_residual, ImmersionJet1, ImmersionJet2, Mat32,
};
use fm_core::metric::{fundamental_tensor, minkowski_norm, symmetric_eigenvalues, MetricParams};
use fm_core::solver::{solve_minimal_graph, Grid, GridProblem};
use fm_core::translation::{kl_polys, lambda_mu, lambda_mu_exact, translation_residual, TranslationPoint};
use fm_core::volume::bh_factor_closed_matsumoto;
use num_rational::BigRational;
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn admissible_b() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), 0.0..0.4999]
}

fn jet() -> impl Strategy<Value = ImmersionJet1> {
    prop::array::uniform3(prop::array::uniform2(-2.0..2.0f64)).prop_filter_map("degenerate jet", |z: Mat32| {
        let j = ImmersionJet1::new(z);
        let a = gram(&j);
        let det = a[0][0] * a[1][1] - a[0][1] * a[0][1];
        let tr = a[0][0] + a[1][1];
        (det >= 0.02 * tr * tr).then_some(j)
    })
}

fn second_jet() -> impl Strategy<Value = ImmersionJet2> {
    prop::array::uniform3(prop::array::uniform3(-2.0..2.0f64))
        .prop_map(|c| ImmersionJet2::new(std::array::from_fn(|i| [[c[i][0], c[i][1]], [c[i][1], c[i][2]]])).unwrap())
}

fn graph_point() -> impl Strategy<Value = GraphPoint> {
    (-3.0..3.0f64, -3.0..3.0f64, -2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64)
        .prop_map(|(f1, f2, a, b, c)| GraphPoint::new(f1, f2, a, b, c).unwrap())
}

fn frame() -> impl Strategy<Value = TiltedFrame> {
    (prop::array::uniform3(-1.0..1.0f64), 0.0..std::f64::consts::PI).prop_filter_map("zero axis", |(axis, angle)| {
        let n = axis.iter().map(|v| v * v).sum::<f64>().sqrt();
        (n > 1e-3).then(|| TiltedFrame::from_axis_angle(axis, angle).unwrap())
    })
}

fn unit_vector() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-1.0..1.0f64).prop_filter_map("short vector", |v| {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        (n > 0.1).then(|| v.map(|x| x / n))
    })
}

fn small_rational() -> impl Strategy<Value = BigRational> {
    (0i64..200, 1i64..50).prop_map(|(n, d)| BigRational::new(n.into(), d.into()))
}

fn rotate_rows(j: &ImmersionJet1, t: f64) -> ImmersionJet1 {
    let (c, s) = (t.cos(), t.sin());
    let z = j.z;
    ImmersionJet1::new([
        [c * z[0][0] - s * z[1][0], c * z[0][1] - s * z[1][1]],
        [s * z[0][0] + c * z[1][0], s * z[0][1] + c * z[1][1]],
        z[2],
    ])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn norm_is_positively_homogeneous(b in admissible_b(), y in unit_vector(), lambda in 0.01..100.0f64) {
        let m = MetricParams::matsumoto(b).unwrap();
        let scaled = y.map(|v| lambda * v);
        prop_assert!(rel(minkowski_norm(&m, &scaled).unwrap(), lambda * minkowski_norm(&m, &y).unwrap()) <= 1e-12);
    }

    #[test]
    fn norm_is_invariant_under_planar_rotation(b in admissible_b(), y in unit_vector(), t in 0.0..std::f64::consts::TAU) {
        let m = MetricParams::matsumoto(b).unwrap();
        let ry = [t.cos() * y[0] - t.sin() * y[1], t.sin() * y[0] + t.cos() * y[1], y[2]];
        prop_assert!(rel(minkowski_norm(&m, &ry).unwrap(), minkowski_norm(&m, &y).unwrap()) <= 1e-13);
    }

    #[test]
    fn fundamental_tensor_is_symmetric_positive(b in prop::sample::select(vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.45]), y in unit_vector()) {
        let g = fundamental_tensor(&MetricParams::matsumoto(b).unwrap(), &y).unwrap();
        for i in 0..3 {
            for k in 0..3 {
                prop_assert!((g[i][k] - g[k][i]).abs() <= 1e-7);
            }
        }
        prop_assert!(symmetric_eigenvalues(&g).iter().all(|&e| e > 0.0));
    }

    #[test]
    fn integrand_scales_quadratically(j in jet(), b in admissible_b(), lambda in 0.1..10.0f64) {
        let f = area_integrand(&j, b).unwrap();
        prop_assert!(rel(area_integrand(&j.scaled(lambda), b).unwrap(), lambda * lambda * f) <= 1e-12);
    }

    #[test]
    fn integrand_is_invariant_under_planar_rotation(j in jet(), b in admissible_b(), t in 0.0..std::f64::consts::TAU) {
        prop_assert!(rel(area_integrand(&rotate_rows(&j, t), b).unwrap(), area_integrand(&j, b).unwrap()) <= 1e-12);
    }

    #[test]
    fn integrand_is_reparametrization_covariant(j in jet(), b in admissible_b(), s in prop::array::uniform4(-2.0..2.0f64)) {
        let det = s[0] * s[3] - s[1] * s[2];
        prop_assume!(det > 0.05);
        let z = j.z;
        let zs: Mat32 = std::array::from_fn(|i| [z[i][0] * s[0] + z[i][1] * s[2], z[i][0] * s[1] + z[i][1] * s[3]]);
        let lhs = area_integrand(&ImmersionJet1::new(zs), b).unwrap();
        prop_assert!(rel(lhs, det * area_integrand(&j, b).unwrap()) <= 1e-11);
    }

    #[test]
    fn e_matches_inverse_gram_contraction(j in jet(), b in admissible_b()) {
        let a = gram(&j);
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        let inv = [[a[1][1] / det, -a[0][1] / det], [-a[1][0] / det, a[0][0] / det]];
        let z3 = j.z[2];
        let (mut q, mut scale) = (0.0, 0.0);
        for e in 0..2 {
            for h in 0..2 {
                q += inv[e][h] * z3[e] * z3[h];
                scale += (inv[e][h] * z3[e] * z3[h]).abs();
            }
        }
        let expected = b * b * det * q;
        prop_assert!((e_scalar(&j, b) - expected).abs() <= 1e-12 * (b * b * det * scale).max(f64::MIN_POSITIVE));
    }

    #[test]
    fn residual_is_linear(j in jet(), h1 in second_jet(), h2 in second_jet(), v1 in unit_vector(), v2 in unit_vector(),
                          b in admissible_b(), a in -2.0..2.0f64, c in -2.0..2.0f64) {
        let r = |h: &ImmersionJet2, v: [f64; 3]| mean_curvature_residual(&j, h, b, Some(v)).unwrap();
        let combo = h1.linear_combination(a, &h2, c);
        let lhs = r(&combo, v1);
        let rhs = a * r(&h1, v1) + c * r(&h2, v1);
        let scale = r(&h1, v1).abs().max(r(&h2, v1).abs()).max(1.0) * (a.abs() + c.abs()).max(1.0);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
        let vc: [f64; 3] = std::array::from_fn(|i| a * v1[i] + c * v2[i]);
        let lhs = r(&h1, vc);
        let rhs = a * r(&h1, v1) + c * r(&h1, v2);
        let scale = r(&h1, v1).abs().max(r(&h1, v2).abs()).max(1.0) * (a.abs() + c.abs()).max(1.0);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
    }

    #[test]
    fn bracket_over_residual_is_positive(j in jet(), h in second_jet(), b in admissible_b()) {
        let r = mean_curvature_residual(&j, &h, b, None).unwrap();
        let br = mce0_bracket(&j, &h, b, None).unwrap();
        prop_assume!(r.abs() > 1e-6);
        let ratio = br / r;
        prop_assert!(ratio.is_finite() && ratio > 0.0, "ratio {ratio}");
    }

    #[test]
    fn graph_residual_and_bracket_vanish_together(gp in graph_point(), fr in frame(), b in admissible_b()) {
        let residual = |h22: f64| {
            let g = GraphPoint::new(gp.f1, gp.f2, gp.h11, gp.h12, h22).unwrap();
            tilted_graph_residual(&g, &fr, b)
        };
        let (r0, r1) = (residual(0.0), residual(1.0));
        let slope = r1 - r0;
        prop_assume!(slope.abs() > 1e-6);
        let zero = GraphPoint::new(gp.f1, gp.f2, gp.h11, gp.h12, -r0 / slope).unwrap();
        let (j1, j2) = tilted_jets(&zero, &fr);
        let on = mce0_bracket(&j1, &j2, b, None).unwrap();
        let (j1u, j2u) = tilted_jets(&GraphPoint::new(gp.f1, gp.f2, 0.0, 0.0, 1.0).unwrap(), &fr);
        let scale = mce0_bracket(&j1u, &j2u, b, None).unwrap().abs().max(1.0) * (1.0 + (r0 / slope).abs() + gp.h11.abs() + gp.h12.abs());
        prop_assert!(on.abs() <= 1e-9 * scale, "bracket {on} at residual zero");

        let r = tilted_graph_residual(&gp, &fr, b);
        prop_assume!(r.abs() > 1e-6);
        let (j1, j2) = tilted_jets(&gp, &fr);
        let ratio = mce0_bracket(&j1, &j2, b, None).unwrap() / r;
        prop_assert!(ratio.is_finite() && ratio > 0.0, "ratio {ratio}");
    }

    #[test]
    fn graph_residual_reduces_to_classical_at_b0(gp in graph_point()) {
        let classical = (1.0 + gp.f2 * gp.f2) * gp.h11 - 2.0 * gp.f1 * gp.f2 * gp.h12 + (1.0 + gp.f1 * gp.f1) * gp.h22;
        let expected = 4.0 * gp.w2() * classical;
        let got = graph_residual(&gp, 0.0);
        let scale = 4.0 * gp.w2() * ((1.0 + gp.f2 * gp.f2) * gp.h11.abs() + 2.0 * (gp.f1 * gp.f2 * gp.h12).abs() + (1.0 + gp.f1 * gp.f1) * gp.h22.abs());
        prop_assert!((got - expected).abs() <= 1e-12 * scale.max(1e-300));
    }

    #[test]
    fn identity_frame_is_the_plain_graph(gp in graph_point(), b in admissible_b()) {
        prop_assert_eq!(tilted_graph_residual(&gp, &TiltedFrame::identity(), b), graph_residual(&gp, b));
        let (t1, t2) = tilted_jets(&gp, &TiltedFrame::identity());
        let (g1, g2) = graph_jets(&gp);
        prop_assert_eq!(t1.z, g1.z);
        prop_assert_eq!(t2.components(), g2.components());
    }

    #[test]
    fn divisor_is_positive(gp in graph_point(), fr in frame(), b in admissible_b()) {
        prop_assert!(divisor(&gp, &fr, b) > 0.0);
    }

    #[test]
    fn coefficients_dominate_the_classical_form(gp in graph_point(), fr in frame(), b in admissible_b(), t in 0.0..std::f64::consts::TAU) {
        let c = ellipticity_coefficients(&gp, &fr, b).unwrap();
        let xi = [t.cos(), t.sin()];
        let form = c.quadratic_form(xi);
        prop_assert!(form * c.w2 >= 1.0 - 1e-12, "W² a(ξ,ξ) = {}", form * c.w2);
    }

    #[test]
    fn lambda_mu_exchange_symmetry(r in small_rational(), s in small_rational(), b2 in prop::sample::select(vec![0i64, 1, 4, 9, 16, 24])) {
        let b2 = BigRational::new(b2.into(), 100.into());
        let (l1, m1) = lambda_mu_exact(&r, &s, &b2);
        let (l2, m2) = lambda_mu_exact(&s, &r, &b2);
        prop_assert_eq!(l1, m2);
        prop_assert_eq!(m1, l2);
    }

    #[test]
    fn lambda_mu_decompose_through_k_and_l(r in small_rational(), s in small_rational(), b2 in prop::sample::select(vec![0i64, 1, 4, 9, 16, 24])) {
        let b2 = BigRational::new(b2.into(), 100.into());
        let kl = kl_polys(&b2).unwrap();
        prop_assert_eq!(kl.lambda_mu(&r, &s), lambda_mu_exact(&r, &s, &b2));
    }

    #[test]
    fn translation_residual_matches_bracket(fp in -3.0..3.0f64, fpp in -2.0..2.0f64, gp in -3.0..3.0f64, gpp in -2.0..2.0f64,
                                            b in prop::sample::select(vec![0.0, 0.15, 0.3, 0.45])) {
        let tp = TranslationPoint::new(fp, fpp, gp, gpp);
        let (j1, j2) = tp.jets();
        let bracket = mce0_bracket(&j1, &j2, b, None).unwrap();
        let r = translation_residual(&tp, b);
        let (l, m) = lambda_mu(tp.r(), tp.s(), b);
        let scale = l.abs() * fpp.abs() + m.abs() * gpp.abs();
        prop_assert!((bracket - 2.0 * r).abs() <= 1e-10 * scale.max(1.0));
        if r.abs() > 1e-6 * scale {
            prop_assert!(bracket / r > 0.0);
        }
    }

    #[test]
    fn translation_residual_reduces_to_classical_at_b0(fp in -3.0..3.0f64, fpp in -2.0..2.0f64, gp in -3.0..3.0f64, gpp in -2.0..2.0f64) {
        let tp = TranslationPoint::new(fp, fpp, gp, gpp);
        let classical = (1.0 + tp.s()) * fpp + (1.0 + tp.r()) * gpp;
        let t = 2.0 + 2.0 * tp.p();
        let r = translation_residual(&tp, 0.0);
        prop_assert!((r - t * t * classical).abs() <= 1e-12 * t * t * ((1.0 + tp.s()) * fpp.abs() + (1.0 + tp.r()) * gpp.abs()).max(1e-300));
    }

    #[test]
    fn grid_files_round_trip(nx in 8usize..14, ny in 8usize..14, x0 in -3.0..0.0f64, y0 in -3.0..0.0f64, seed in any::<u64>()) {
        let grid = Grid::new(x0, x0 + 2.5, y0, y0 + 1.5, nx, ny).unwrap();
        let f: Vec<f64> = (0..grid.len()).map(|k| ((k as u64).wrapping_mul(seed | 1) % 1000) as f64 / 7.0 - 50.0).collect();
        let mut buf = Vec::new();
        write_grid(&mut buf, &grid, &f).unwrap();
        let (g2, f2) = read_grid(buf.as_slice()).unwrap();
        prop_assert_eq!(g2, grid);
        prop_assert_eq!(f2, f);
    }
}

#[test]
fn closed_volume_factor_decreases_in_b() {
    let vals: Vec<f64> = (0..50).map(|k| bh_factor_closed_matsumoto(k as f64 * 0.01).unwrap()).collect();
    assert!(vals.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn solutions_depend_continuously_on_b() {
    let grid = Grid::square(-1.0, 1.0, 17).unwrap();
    let solve = |b: f64| {
        let p = GridProblem::new(grid, b, |x, y| x * x - y * y + 0.5 * x * y * y).unwrap();
        solve_minimal_graph(&p, 1e-11, 40).unwrap().f
    };
    let dist = |a: &[f64], c: &[f64]| a.iter().zip(c).fold(0.0f64, |m, (u, v)| m.max((u - v).abs()));
    let (u0, u1, u2) = (solve(0.2), solve(0.225), solve(0.25));
    let (near, far) = (dist(&u0, &u1), dist(&u0, &u2));
    assert!(near > 0.0);
    assert!(far <= 10.0 * near, "far {far}, near {near}");
}

#[test]
fn newton_residuals_decrease_monotonically() {
    let grid = Grid::square(-1.0, 1.0, 33).unwrap();
    for b in [0.0, 0.2, 0.4] {
        let p = GridProblem::new(grid, b, |x, y| (x.cos() / y.cos()).ln()).unwrap();
        let sol = solve_minimal_graph(&p, 1e-11, 40).unwrap();
        assert!(sol.history.windows(2).all(|w| w[1] < w[0]), "{:?}", sol.history);
    }
}
