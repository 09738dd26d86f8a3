use std::f64::consts::PI;

use gaussamp::annihilator::*;
use gaussamp::frame::*;
use gaussamp::gabor::*;
use gaussamp::geometry::*;
use gaussamp::points::*;
use gaussamp::series::*;
use gaussamp::trajectory::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn coprime() -> impl Strategy<Value = (i64, i64)> {
    prop::sample::select(vec![(1, 0), (0, 1), (1, 1), (1, 2), (2, 1), (1, -2), (2, 3), (3, -1)])
}

fn series_1d(a: f64, scale: f64, lo: i64, vals: &[f64]) -> GaussSeriesFunction {
    GaussSeriesFunction::new(a, scale, CoeffGrid::from_real_1d(lo, vals).unwrap()).unwrap()
}

fn sorted(mut v: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    v.sort_by(|x, y| x[0].total_cmp(&y[0]).then(x[1].total_cmp(&y[1])));
    v
}

fn same_points(a: &[[f64; 2]], b: &[[f64; 2]]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    // every point of a has a partner in b
    a.iter().all(|x| b.iter().any(|y| (x[0] - y[0]).abs() < 1e-9 && (x[1] - y[1]).abs() < 1e-9))
}

fn bounds_1d(samples: &[f64], n: i64) -> FrameBoundsEstimate {
    let m = SamplingMatrix::assemble_1d(1.0, 1.0, samples, IndexBox::d1(-n, n)).unwrap();
    estimate_bounds(&m, 0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn series_is_linear(
        c1 in prop::collection::vec(-2.0f64..2.0, 9),
        c2 in prop::collection::vec(-2.0f64..2.0, 9),
        lam in -3.0f64..3.0,
        x in -6.0f64..6.0,
        a in 0.3f64..3.0,
    ) {
        let mix: Vec<f64> = c1.iter().zip(&c2).map(|(u, v)| u + lam * v).collect();
        let f = series_1d(a, 1.0, -4, &c1);
        let g = series_1d(a, 1.0, -4, &c2);
        let h = series_1d(a, 1.0, -4, &mix);
        let mass = 1.0 + c1.iter().chain(&c2).map(|v| v.abs()).sum::<f64>() * (1.0 + lam.abs());
        prop_assert!((h.at(x) - (f.at(x) + g.at(x) * lam)).norm() <= 1e-12 * mass);
    }

    #[test]
    fn series_translation_covariance(
        c in prop::collection::vec(-2.0f64..2.0, 7),
        k in -5i64..5,
        x in -5.0f64..5.0,
        scale in 0.5f64..2.0,
    ) {
        let f = series_1d(1.0, scale, -3, &c);
        let g = GaussSeriesFunction::new(1.0, scale, f.coeffs().shifted([k, 0])).unwrap();
        prop_assert!((g.at(x + k as f64) - f.at(x)).norm() <= 1e-12 * (1.0 + f.coeffs().lp_norm(Exponent::Finite(1.0))));
    }

    #[test]
    fn truncation_certificate_covers_full_sum(
        c in prop::collection::vec(-1.0f64..1.0, 41),
        x in -20.0f64..20.0,
        y in -0.5f64..0.5,
        a in 0.05f64..0.5,
    ) {
        let f = series_1d(a, 1.0, -20, &c);
        let v = f.eval_point(&[x], &[y]).unwrap();
        let z = Complex64::new(x, y);
        let full: Complex64 = c.iter().enumerate().map(|(i, ci)| {
            let d = z - (i as f64 - 20.0);
            (-(d * d) * a).exp() * ci
        }).sum();
        prop_assert!((v.value - full).norm() <= v.tail_bound + 1e-13 * (1.0 + v.included_mass));
    }

    #[test]
    fn density_scales_inversely(step in 0.3f64..2.0, offset in -1.0f64..1.0, s in 0.5f64..3.0) {
        let g = PointSet1D::progression(step, offset).unwrap();
        let h = g.affine(s, 0.0).unwrap();
        let rs = [20.0, 40.0];
        let d = g.beurling_density(&rs, None, None).unwrap();
        let e = h.beurling_density(&[20.0 * s, 40.0 * s], None, None).unwrap();
        prop_assert!((e.upper * s - d.upper).abs() <= 2.0 / 20.0);
        prop_assert!((e.lower * s - d.lower).abs() <= 2.0 / 20.0);
        prop_assert!((h.exact_density().unwrap() * s - 1.0 / step).abs() < 1e-12);
    }

    #[test]
    fn puncture_keeps_density(step in 0.5f64..2.0, removed in prop::collection::vec(-5i64..5, 1..4)) {
        let g = PointSet1D::progression(step, 0.0).unwrap();
        let mut pts: Vec<f64> = removed.iter().map(|&k| k as f64 * step).collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let h = PointSet1D::puncture(g.clone(), pts.clone()).unwrap();
        let rs = [100.0, 200.0];
        let d = g.beurling_density(&rs, None, None).unwrap();
        let e = h.beurling_density(&rs, None, None).unwrap();
        prop_assert!((d.upper - e.upper).abs() <= pts.len() as f64 / 100.0 + 1e-12);
        prop_assert!((d.lower - e.lower).abs() <= pts.len() as f64 / 100.0 + 1e-12);
        prop_assert_eq!(h.exact_density(), g.exact_density());
    }

    #[test]
    fn slanted_inversion(pq in coprime(), g1 in -10.0f64..10.0, g2 in -10.0f64..10.0) {
        let z = PointSet1D::integers();
        let c = SlantedConfig::new(pq.0, pq.1, z.clone(), z).unwrap();
        let s2 = c.sigma() * c.sigma();
        let x = c.point(g1, g2);
        let back = c.invert(x);
        prop_assert!((back[0] - g1 / s2).abs() < 1e-12 * (1.0 + g1.abs()));
        prop_assert!((back[1] - g2).abs() < 1e-12 * (1.0 + g2.abs()));
        let (p, q) = (pq.0 as f64, pq.1 as f64);
        prop_assert!((p * x[0] + q * x[1] - g1).abs() < 1e-10);
        prop_assert!((-q * x[0] + p * x[1] - s2 * g2).abs() < 1e-10);
    }

    #[test]
    fn alternative_representation_same_set(pq in coprime(), s1 in 0.5f64..2.0, s2 in 0.5f64..2.0, o in 0.0f64..1.0) {
        let c = SlantedConfig::new(pq.0, pq.1, PointSet1D::progression(s1, o).unwrap(), PointSet1D::progression(s2, 0.1).unwrap()).unwrap();
        let alt = c.alternative_representation().unwrap();
        let w = Rect::new(Interval::new(-4.123, 3.987), Interval::new(-3.951, 4.077));
        prop_assert!(same_points(&sorted(c.build(&w)), &sorted(alt.build(&w))));
    }

    #[test]
    fn translate_formula(pq in coprime(), step in 0.6f64..1.5, u in -1.0f64..1.0, v in -1.0f64..1.0) {
        let g = PointSet1D::progression(step, 0.0).unwrap();
        let c = SlantedConfig::new(pq.0, pq.1, g.clone(), g).unwrap();
        let w = Rect::new(Interval::new(-3.013, 3.029), Interval::new(-2.991, 3.007));
        let moved = c.translate([u, v]).unwrap().build(&w);
        let back = Rect::new(Interval::new(w.x.lo - u, w.x.hi - u), Interval::new(w.y.lo - v, w.y.hi - v));
        let want: Vec<[f64; 2]> = c.build(&back).into_iter().map(|x| [x[0] + u, x[1] + v]).collect();
        prop_assert!(same_points(&moved, &want));
    }

    #[test]
    fn sampling_entries_formula(x in -5.0f64..5.0, y in -5.0f64..5.0, a in 0.2f64..3.0, s in 0.5f64..2.0) {
        let m = SamplingMatrix::assemble(a, s, 2, &[[x, y]], IndexBox::centered(2, 3)).unwrap();
        for n in IndexBox::centered(2, 3).indices() {
            let r2 = (x - n[0] as f64).powi(2) + (y - n[1] as f64).powi(2);
            let want = (-a * s * s * r2).exp();
            prop_assert!((m.entry(0, n) - want).abs() <= 1e-14 * want.max(1e-300) + 1e-300);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn bounds_ignore_sample_order(pts in prop::collection::vec(-6.0f64..6.0, 12..30), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut shuffled = pts.clone();
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let e = bounds_1d(&pts, 4);
        let f = bounds_1d(&shuffled, 4);
        prop_assert!((e.a_est - f.a_est).abs() <= 1e-10 * e.b_est);
        prop_assert!((e.b_est - f.b_est).abs() <= 1e-10 * e.b_est);
    }

    #[test]
    fn bounds_grow_with_samples(pts in prop::collection::vec(-6.0f64..6.0, 12..24), extra in prop::collection::vec(-6.0f64..6.0, 1..8)) {
        let e = bounds_1d(&pts, 4);
        let mut all = pts.clone();
        all.extend(&extra);
        let f = bounds_1d(&all, 4);
        prop_assert!(f.a_est >= e.a_est - 1e-10 * f.b_est);
        prop_assert!(f.b_est >= e.b_est * (1.0 - 1e-10));
    }

    #[test]
    fn lift_matches_closed_form(pq in coprime(), c in prop::collection::vec(-1.0f64..1.0, 11), a in 0.5f64..2.0) {
        let (p, q) = pq;
        let sigma = ((p * p + q * q) as f64).sqrt();
        let g = series_1d(a, sigma, -5, &c);
        let l = lift_to_2d(&g, p, q, a).unwrap();
        let mut worst = 0.0f64;
        let mut top = 0.0f64;
        for i in 0..=16 {
            for j in 0..=16 {
                let (z, w) = (-4.0 + 0.5 * i as f64, -4.0 + 0.5 * j as f64);
                let s = l.series.at2(z, w);
                worst = worst.max((s - l.closed.at(z, w)).norm());
                top = top.max(s.norm());
            }
        }
        prop_assert!(worst <= 1e-8 * top.max(1e-12));
    }

    #[test]
    fn theta_is_antiperiodic(x in -2.0f64..2.0, a in 0.5f64..4.0, scale in 0.5f64..2.0) {
        let g = alternating_theta(a, scale).unwrap();
        prop_assert!((g.at(x + 1.0) + g.at(x)).norm() <= 1e-10 * (1.0 + g.at(x).norm()));
    }

    #[test]
    fn discretized_trajectory_is_separated(p in 1i64..5, q in -4i64..5, step in 0.5f64..2.0, delta_frac in 0.2f64..0.95) {
        prop_assume!(gaussamp::points::gcd(p, q) == 1);
        let fam = LineFamily::new(Direction::Rational { p, q }, PointSet1D::progression(step, 0.17).unwrap()).unwrap();
        let t = TrajectoryWindowed::new(fam, Rect::square(5.0)).unwrap();
        let delta = delta_frac * step / 3.0;
        let pts = discretize(&t, delta).unwrap();
        for i in 0..pts.len() {
            for j in 0..i {
                let d = ((pts[i][0] - pts[j][0]).powi(2) + (pts[i][1] - pts[j][1]).powi(2)).sqrt();
                prop_assert!(d >= delta * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn line_integral_rotation_equivariant(pq in coprime(), n in -2i64..=2, m in -2i64..=2) {
        let (p, q) = pq;
        let offs = PointSet1D::progression(1.3, 0.2).unwrap();
        let atom = |c: [i64; 2]| GaussSeriesFunction::new(1.0, 1.0, CoeffGrid::unit(2, c)).unwrap();
        let window = Rect::square(7.0);
        let t1 = TrajectoryWindowed::new(LineFamily::new(Direction::Rational { p, q }, offs.clone()).unwrap(), window).unwrap();
        let t2 = TrajectoryWindowed::new(LineFamily::new(Direction::Rational { p: -q, q: p }, offs).unwrap(), window).unwrap();
        // quarter turn of both the atom centre and the normal
        let i1 = line_integral_p(&atom([n, m]), &t1, 2.0).unwrap();
        let i2 = line_integral_p(&atom([-m, n]), &t2, 2.0).unwrap();
        prop_assert!((i1 - i2).abs() <= 1e-5 * i1);
    }

    #[test]
    fn discrete_sum_tracks_line_integral(pq in coprime(), c in prop::collection::vec(-1.0f64..1.0, 25), off in 0.0f64..1.0) {
        let (p, q) = pq;
        let grid = CoeffGrid::new(IndexBox::centered(2, 2), c.iter().map(|v| Complex64::new(*v, 0.0)).collect(), Exponent::Finite(2.0)).unwrap();
        let f = GaussSeriesFunction::new(1.0, 1.0, grid).unwrap();
        let fam = LineFamily::new(Direction::Rational { p, q }, PointSet1D::progression(1.0, off).unwrap()).unwrap();
        let t = TrajectoryWindowed::new(fam, Rect::square(6.0)).unwrap();
        let delta = 0.05;
        let sum: f64 = discretize(&t, delta).unwrap().iter().map(|x| f.at2(x[0], x[1]).norm_sqr()).sum::<f64>() * delta;
        let int = line_integral_p(&f, &t, 2.0).unwrap();
        prop_assert!(sum >= int / 4.0 && sum <= 4.0 * int, "sum {} integral {}", sum, int);
    }

    #[test]
    fn gabor_volume_is_cd(pq in coprime(), a in 0.3f64..3.0, b in 0.3f64..3.0, c in 0.1f64..4.0, d in 0.1f64..4.0) {
        let s = GaborLatticeSpec::delta_abcd(pq.0, pq.1, a, b, c, d, PI).unwrap();
        prop_assert!((s.volume() - c * d).abs() <= 1e-12 * c * d);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn laurent_values_are_finite(step in 1.6f64..3.0, off in -0.5f64..0.5) {
        let g = PointSet1D::progression(step, off).unwrap();
        let t = laurent_coeffs(&g, 1.0, (-6, 6), 0.25, 256).unwrap();
        prop_assert!(t.b.iter().all(|b| b.re.is_finite() && b.im.is_finite()));
        prop_assert!(t.normalized().iter().all(|v| v.is_finite() && *v >= 0.0));
        prop_assert!(t.b.iter().any(|b| b.norm() > 0.0));
    }

    #[test]
    fn torus_sweep_symmetric_and_refinement_monotone(g1 in prop::sample::select(vec![0.5, 1.0]), pq in prop::sample::select(vec![(1i64, 0i64), (0, 1)])) {
        let cfg = SlantedConfig::new(pq.0, pq.1, PointSet1D::progression(g1, 0.0).unwrap(), PointSet1D::integers()).unwrap();
        let coarse = translate_sweep(&cfg, PI, 0.25, 3, 2).unwrap();
        let fine = translate_sweep(&cfg, PI, 0.125, 3, 2).unwrap();
        prop_assert!(fine.min <= coarse.min);
        // the set is Z^2-periodic and centrally symmetric, so (u, v) and (1 - u, 1 - v) give the same set up to a sign
        for e in &coarse.entries {
            let twin = coarse.entries.iter().find(|f| (f.u - (1.0 - e.u)).abs() < 1e-12 && (f.v - (1.0 - e.v)).abs() < 1e-12).unwrap();
            prop_assert!((e.estimate.a_est - twin.estimate.a_est).abs() <= 1e-8 * e.estimate.b_est);
        }
    }
}
