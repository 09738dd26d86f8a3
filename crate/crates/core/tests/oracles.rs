//! Comparisons against values computed independently of the library: 60-digit
//! references (frozen below) and brute-force recomputation in test code.

use std::f64::consts::PI;

use gaussamp::annihilator::*;
use gaussamp::frame::*;
use gaussamp::gabor::*;
use gaussamp::geometry::*;
use gaussamp::points::*;
use gaussamp::series::*;
use gaussamp::trajectory::*;
use num_complex::Complex64;

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs()
}

fn line_trend(set: PointSet1D, ns: &[i64]) -> TrendTable {
    bound_trend_with(1, PI, 1.0, ns, 5, |n| set.points(Interval::symmetric((n + 5) as f64)).into_iter().map(|x| [x, 0.0]).collect()).unwrap()
}

// squared extreme singular values of [exp(-pi (x - n)^2)] at 60 digits
#[test]
fn integer_frame_bounds_match_reference() {
    let t = line_trend(PointSet1D::integers(), &[10, 20]);
    assert!(rel(t.rows[0].estimate.a_est, 0.84005584813182637) < 1e-10);
    assert!(rel(t.rows[1].estimate.a_est, 0.83538938863806941) < 1e-10);
    assert!(rel(t.rows[0].estimate.b_est, 1.1784362925353288) < 1e-10);
    assert!(rel(t.rows[1].estimate.b_est, 1.1798163881050271) < 1e-10);
}

#[test]
fn punctured_integers_match_reference() {
    let z0 = PointSet1D::puncture(PointSet1D::integers(), vec![0.0]).unwrap();
    let t = line_trend(z0, &[10, 20]);
    let (e10, e20) = (&t.rows[0].estimate, &t.rows[1].estimate);
    assert_eq!(e10.method, LowerBoundMethod::DenseSvd);
    assert!(rel(e10.a_est, 8.4031324772039297e-17) < 1e-6);
    assert_eq!(e20.method, LowerBoundMethod::ExtendedJacobi);
    assert!(rel(e20.a_est, 4.3342517529725853e-44) < 1e-10);
}

#[test]
fn dense_progression_matches_reference() {
    let t = line_trend(PointSet1D::progression(0.9, 0.0).unwrap(), &[10]);
    assert!(rel(t.rows[0].estimate.a_est, 0.29342863629185115) < 1e-10);
}

#[test]
fn theta_value_at_origin() {
    // theta_4(0, e^{-pi})
    let g = alternating_theta(PI, 1.0).unwrap();
    assert!(rel(g.at(0.0).re, 0.913579138156116821) < 1e-14);
    let sup = g.sup_norm_estimate(&Window::D1(Interval::symmetric(3.0)), 0.01).unwrap();
    assert!(rel(sup, 0.913579138156116821) < 1e-14);
}

// Jacobi triple product: b_k = (-1)^k Q^{k(k-1)/2} e^{-0.6k} / prod (1 - Q^m), Q = e^{-4}
#[test]
fn laurent_coefficients_match_triple_product() {
    let gamma = PointSet1D::progression(2.0, 0.3).unwrap();
    let t = laurent_coeffs(&gamma, 1.0, (-12, 12), 0.25, 256).unwrap();
    let q = (-4.0f64).exp();
    let euler: f64 = (1..60).map(|m| 1.0 - q.powi(m)).product();
    for k in -12i64..=12 {
        let want = if k % 2 == 0 { 1.0 } else { -1.0 } * (-(4.0 * (k * (k - 1)) as f64 / 2.0) - 0.6 * k as f64).exp() / euler;
        let got = t.get(k).unwrap();
        let floor = t.floor[(k + 12) as usize];
        assert!((got.re - want).abs() <= 1e-8 * want.abs() + 10.0 * floor, "k={k}: {got} vs {want}");
        assert!(got.im.abs() <= 1e-8 * want.abs() + 10.0 * floor);
        if k.abs() <= 6 {
            assert!(floor <= 1e-8 * want.abs());
        }
    }
    assert!(rel(euler, 0.981348900545208370) < 1e-15);
}

#[test]
fn product_matches_direct_multiplication() {
    let gamma = PointSet1D::progression(2.0, 0.3).unwrap();
    let pts = gamma.points(Interval::symmetric(60.0));
    for z in [Complex64::new(0.1, 0.2), Complex64::new(-3.3, 1.0), Complex64::new(5.0, -0.4)] {
        let mut direct = Complex64::new(1.0, 0.0);
        for &g in &pts {
            let f = if g >= 0.0 { 1.0 - (2.0 * (z - g)).exp() } else { 1.0 - (-2.0 * (z - g)).exp() };
            direct *= f;
        }
        let got = product_g(&gamma, 1.0, z).unwrap();
        assert!((got - direct).norm() <= 1e-12 * direct.norm());
    }
}

#[test]
fn growth_of_product_is_subquadratic() {
    let gamma = PointSet1D::progression(2.0, 0.3).unwrap();
    let eps = 0.25;
    let mut c = f64::NEG_INFINITY;
    for i in 0..=1000 {
        let x = i as f64 * 0.01;
        let l = log_product_g(&gamma, 1.0, Complex64::new(x, 0.0)).unwrap().re;
        c = c.max(l - (1.0 - eps) * x * x);
    }
    assert!(c.is_finite() && c < 10.0);
}

#[test]
fn annihilator_of_sparse_progression() {
    let gamma = PointSet1D::progression(3.0, 0.0).unwrap();
    let an = build_annihilator_1d(&gamma, 1.0, (-12, 12), AnnihilatorOptions::default()).unwrap();
    let sup = an.report.sup;
    for k in -2..=2 {
        let x = 3.0 * k as f64;
        assert!(an.function.at(x).norm() <= 1e-8 * sup);
        let mid = x + 1.5;
        assert!(an.function.at(mid).norm() * (mid * mid).exp() > 1e-3);
    }
}

#[test]
fn empty_set_annihilator_is_a_gaussian() {
    let an = build_annihilator_1d(&PointSet1D::empty(), 1.0, (-3, 3), AnnihilatorOptions::default()).unwrap();
    assert!(rel(an.function.at(0.0).re, 1.0) < 1e-12);
    assert!(rel(an.function.at(1.3).re, (-1.69f64).exp()) < 1e-12);
}

fn brute_separation(pts: &[f64]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..pts.len() {
        for j in 0..pts.len() {
            if i != j {
                best = best.min((pts[i] - pts[j]).abs());
            }
        }
    }
    best
}

#[test]
fn perturbed_separation_by_enumeration() {
    let offs = vec![0.2, -0.15, 0.05, -0.2, 0.1];
    let s = PointSet1D::perturb(1.0, 0.0, offs).unwrap();
    let w = Interval::symmetric(30.0);
    let pts = s.points(w);
    let want = brute_separation(&pts);
    assert!((s.separation(w).unwrap() - want).abs() < 1e-12);
    assert!((0.6..=1.4).contains(&want));
}

#[test]
fn counts_by_enumeration() {
    let s = PointSet1D::parse("union { prog 2 0 } { prog 3 0.5 }", None).unwrap();
    let r = 30.0;
    let rep = s.beurling_density(&[r], Some(0.5), Some(60.0)).unwrap();
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    let all = s.points(Interval::symmetric(200.0));
    let mut c = -60.0;
    while c <= 60.0 + 1e-9 {
        let n = all.iter().filter(|&&x| x >= c - r && x < c + r).count() as f64 / (2.0 * r);
        lo = lo.min(n);
        hi = hi.max(n);
        c += 0.5;
    }
    assert!((rep.table[0].lower - lo).abs() < 1e-12);
    assert!((rep.table[0].upper - hi).abs() < 1e-12);
}

#[test]
fn gaussian_norms_closed_form() {
    for (beta, p) in [(1.0, 2.0), (PI, 1.0), (0.5, 3.0)] {
        let want = ((PI / (p * beta)).sqrt()).powf(1.0 / p);
        assert!(rel(gaussian_lp_norm(beta, Exponent::Finite(p), 1), want) < 1e-14);
        assert!(rel(gaussian_lp_norm(beta, Exponent::Finite(p), 2), want * want) < 1e-14);
    }
}

#[test]
fn distant_atoms_are_nearly_orthogonal() {
    let one = GaussSeriesFunction::new(1.0, 1.0, CoeffGrid::unit(1, [0, 0])).unwrap();
    let mut v = vec![0.0; 41];
    v[0] = 1.0;
    v[40] = 1.0;
    let two = GaussSeriesFunction::new(1.0, 1.0, CoeffGrid::from_real_1d(-20, &v).unwrap()).unwrap();
    let r1 = one.lp_norm_equivalence_check(Exponent::Finite(2.0), &Window::D1(Interval::symmetric(8.0))).unwrap().ratio.unwrap();
    let r2 = two.lp_norm_equivalence_check(Exponent::Finite(2.0), &Window::D1(Interval::symmetric(28.0))).unwrap().ratio.unwrap();
    assert!((r1 - r2).abs() < 1e-6);
    assert!(rel(r1, (PI / 2.0).sqrt().sqrt()) < 1e-9);
}

#[test]
fn lifted_single_coefficient_is_exact() {
    for (p, q) in [(1, 1), (1, 2), (3, 4)] {
        let s = ((p * p + q * q) as f64).sqrt();
        let g = GaussSeriesFunction::new(1.0, s, CoeffGrid::unit(1, [0, 0])).unwrap();
        let l = lift_to_2d(&g, p, q, 1.0).unwrap();
        for (z, w) in [(0.2f64, -0.3f64), (1.0, 1.5), (-2.0, 0.7)] {
            let want = (-(z * z) - w * w).exp();
            assert!((l.series.at2(z, w).re - want).abs() < 1e-15);
            assert!((l.closed.at(z, w).re - want).abs() < 1e-14);
        }
    }
}

#[test]
fn axis_counterexample_reduces_to_theta() {
    let (_, f2) = critical_counterexamples(1, 0, PI, 4.0).unwrap();
    let g = alternating_theta(PI, 1.0).unwrap();
    for (x, y) in [(0.0, 0.0), (0.3, 0.5), (-1.2, 1.7), (2.0, -0.25)] {
        let want = (-PI * x * x).exp() * g.at(y).re;
        assert!((f2.series.at2(x, y).re - want).abs() < 1e-13);
    }
}

#[test]
fn line_integral_at_distance() {
    let a = 1.3;
    let atom = GaussSeriesFunction::new(a, 1.0, CoeffGrid::unit(2, [1, -1])).unwrap();
    let fam = LineFamily::new(Direction::Rational { p: 1, q: 2 }, PointSet1D::explicit(vec![0.4]).unwrap()).unwrap();
    let t = TrajectoryWindowed::new(fam, Rect::square(12.0)).unwrap();
    let d = (1.0 * 1.0 + 2.0 * -1.0) / 5f64.sqrt() - 0.4;
    for p in [1.0, 2.0] {
        let want = (-p * a * d * d).exp() * (PI / (p * a)).sqrt();
        assert!(rel(line_integral_p(&atom, &t, p).unwrap(), want) < 1e-8);
    }
}

#[test]
fn sampling_entries_follow_formula() {
    let pts = [[0.3, -1.1], [2.0, 0.5], [-0.7, 0.0]];
    let m = SamplingMatrix::assemble(0.8, 1.5, 2, &pts, IndexBox::centered(2, 2)).unwrap();
    let d = m.dense(None);
    for (i, x) in pts.iter().enumerate() {
        for (j, n) in IndexBox::centered(2, 2).indices().iter().enumerate() {
            let r2 = (x[0] - n[0] as f64).powi(2) + (x[1] - n[1] as f64).powi(2);
            let want = (-0.8 * 2.25 * r2).exp();
            if want > 1e-20 {
                assert!(rel(d[(i, j)], want) < 1e-14);
            } else {
                assert!(d[(i, j)].abs() <= 1e-20);
            }
        }
    }
}

#[test]
fn reconstruction_recovers_lattice_coefficients() {
    let w = IndexBox::centered(2, 4);
    let pts: Vec<[f64; 2]> = IndexBox::centered(2, 7).indices().iter().map(|i| [i[0] as f64, i[1] as f64]).collect();
    let m = SamplingMatrix::assemble(PI, 1.0, 2, &pts, w).unwrap();
    let truth: Vec<f64> = (0..m.cols()).map(|i| ((i * 37 % 11) as f64 - 5.0) / 5.0).collect();
    let mut vals = vec![0.0; m.rows()];
    m.matvec(&truth, &mut vals);
    let rec = reconstruct(&m, &vals).unwrap();
    for (idx, t) in w.indices().iter().zip(&truth) {
        assert!((rec.coeffs.get(*idx).re - t).abs() < 1e-8);
    }
}

#[test]
fn delta_volume_is_product_of_spacings() {
    let specs = [(1, 2, 0.7, 1.3, 4.0, 0.2), (3, 4, 2.0, 0.5, 0.9, 0.9), (2, 3, 1.1, 1.1, 1.7, 0.3), (5, 1, 0.4, 2.5, 3.0, 0.05)];
    for (p, q, a, b, c, d) in specs {
        let s = GaborLatticeSpec::delta_abcd(p, q, a, b, c, d, PI).unwrap();
        let g = s.generator();
        // 2x2 block determinant times the modulation spacings
        let det = (g[0][0] * g[1][1] - g[0][1] * g[1][0]) * g[2][2] * g[3][3];
        assert!(rel(det.abs(), c * d) < 1e-12);
        assert!(rel(s.volume(), c * d) < 1e-12);
    }
}

#[test]
fn slanted_product_for_axis_direction() {
    let g1 = PointSet1D::progression(0.9, 0.0).unwrap();
    let g2 = PointSet1D::progression(0.8, 0.1).unwrap();
    let cfg = SlantedConfig::new(1, 0, g1.clone(), g2.clone()).unwrap();
    let w = Rect::square(4.0);
    let mut got = cfg.build(&w);
    let mut want = Vec::new();
    for x in g1.points(w.x) {
        for y in g2.points(w.y) {
            want.push([x, y]);
        }
    }
    let key = |p: &[f64; 2]| ((p[0] * 1e9).round() as i64, (p[1] * 1e9).round() as i64);
    got.sort_by_key(key);
    want.sort_by_key(key);
    assert_eq!(got.len(), want.len());
    for (a, b) in got.iter().zip(&want) {
        assert!((a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
    }
}

#[test]
fn separable_trajectory_annihilator() {
    let fam = LineFamily::new(Direction::Rational { p: 1, q: 0 }, PointSet1D::progression(2.0, 0.0).unwrap()).unwrap();
    let t = annihilator_on_trajectory(&fam, 1.0, Rect::square(4.0)).unwrap();
    assert!(t.residual_relative() <= 1e-6);
    // f(x, y) = g(x) times sum_n exp(-(y - 0)^2) restricted to n = 0: only q n = 0 entries
    for (x, y) in [(0.5f64, 0.3f64), (1.0, -1.0)] {
        let want = t.base.function.at(x) * (-y * y).exp();
        assert!((t.lift.series.at2(x, y) - want).norm() < 1e-12);
    }
}

#[test]
fn integer_torus_sweep_is_positive() {
    let z = PointSet1D::integers();
    let cfg = SlantedConfig::new(1, 0, z.clone(), z).unwrap();
    let rep = translate_sweep(&cfg, PI, 0.25, 6, 3).unwrap();
    assert_eq!(rep.entries.len(), 25);
    assert!(rep.min > 0.0);
}
