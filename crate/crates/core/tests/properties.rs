use proptest::prelude::*;

use isomin::angle::{filtered_candidates, obstruction_coeffs, AngleField, CandidateOptions};
use isomin::compat::{check_compatibility, GaussCodazziData};
use isomin::gallery::{fixture, Fixture};
use isomin::jet::Jet;
use isomin::reconstruct::{reconstruct, IntegrateOptions, ReconstructOptions, ThetaOptions};
use isomin::surface::{curvature, curvature_jet, Domain, Expr, MetricChart, Point};

fn angle_fields() -> Vec<AngleField> {
    let mut out = Vec::new();
    for t in [-1.0, 0.0, 0.7, 2.0] {
        out.push(fixture(Fixture::ParabolicCatenoid { t }).unwrap().angle("mu").unwrap());
    }
    let s = fixture(Fixture::SaEarp { l: 1.0, d: 2.0 }).unwrap();
    out.push(s.angle("nu").unwrap());
    out.push(s.angle("nu_bar").unwrap());
    out
}

fn rotational(which: usize) -> MetricChart {
    let fx = [Fixture::Catenoid { beta: 2.0 }, Fixture::Unduloid { beta: 1.5 }, Fixture::SaEarp { l: 1.0, d: 2.0 }];
    fixture(fx[which]).unwrap().chart
}

fn inside(d: &Domain, a: f64, b: f64) -> Point {
    Point::new(d.u_min + a * (d.u_max - d.u_min), d.v_min + b * (d.v_max - d.v_min))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn negation_maps_residuals_by_parity(k in 0usize..6, a in 0.0..1.0f64, b in 0.0..1.0f64) {
        let field = &angle_fields()[k];
        let p = inside(&field.chart.domain, a, b);
        let (x, y) = (field.residuals(p).unwrap(), field.negated().residuals(p).unwrap());
        prop_assert!((x.m1 - y.m1).abs() <= 1e-12);
        prop_assert!((x.m2 + y.m2).abs() <= 1e-12);
        prop_assert!((x.m3 - y.m3).abs() <= 1e-12);
    }

    #[test]
    fn candidate_sets_are_closed_under_negation(k in 0usize..3, a in 0.05..0.95f64, b in 0.0..1.0f64, side in any::<bool>()) {
        let chart = rotational(k);
        let d = chart.domain;
        let u = if side { a * d.u_max } else { a * d.u_min };
        let p = Point::new(u, d.v_min + b * (d.v_max - d.v_min));
        let c = filtered_candidates(&chart, p, &CandidateOptions::default()).unwrap().candidates;
        prop_assert!(c.len() <= 12);
        for (x, y) in c.iter().zip(c.iter().rev()) {
            prop_assert_eq!(x.nu, -y.nu);
            prop_assert_eq!(x.admissible(), y.admissible());
        }
    }

    #[test]
    fn q_expansion_matches_the_bracket(k in 0usize..3, a in 0.05..0.95f64, s in 0.0..1.0f64) {
        let chart = rotational(k);
        let p = Point::new(a * chart.domain.u_max, 0.1);
        let coeffs = obstruction_coeffs(&curvature_jet(&chart, p).unwrap(), chart.c).unwrap();
        let scale = coeffs.term_scale.max(f64::MIN_POSITIVE);
        prop_assert!((coeffs.q_at(s) - coeffs.bracket(s)).abs() / scale < 1e-10);
    }

    /// Data built as `T = r e^{iφ}`, `σ = −(ν₁ + iν₂) e^{iφ} / r` satisfies
    /// the tangency and unit-length conditions for any `ν` and `φ`, while
    /// the Gauss equation generally fails.
    #[test]
    fn structural_compatibility_of_angle_data(
        amp in 0.1..0.6f64, bu in -2.0..2.0f64, bv in -2.0..2.0f64, shift in -0.3..0.3f64,
        pu in -1.0..1.0f64, qv in -1.0..1.0f64, a in 0.1..0.9f64, b in 0.1..0.9f64,
    ) {
        let chart = MetricChart::conformal(
            Expr::new(|u, _| u.cos().recip()),
            Domain::new(-1.2, 1.2, -1.0, 1.0).unwrap(),
            -1.0,
        ).unwrap();
        let nu = move |u: Jet, v: Jet| (u * bu + v * bv).sin() * amp + shift;
        // Frame derivatives for e_i = cos u ∂_i.
        let nu1 = move |u: Jet, v: Jet| u.cos() * (u * bu + v * bv).cos() * (amp * bu);
        let nu2 = move |u: Jet, v: Jet| u.cos() * (u * bu + v * bv).cos() * (amp * bv);
        let phi = move |u: Jet, v: Jet| u * pu + v * v * qv;
        let r = move |u: Jet, v: Jet| (1.0 - nu(u, v) * nu(u, v)).sqrt();
        let data = GaussCodazziData::from_closures(
            chart.clone(),
            Expr::new(nu),
            [Expr::new(move |u, v| r(u, v) * phi(u, v).cos()), Expr::new(move |u, v| r(u, v) * phi(u, v).sin())],
            [
                Expr::new(move |u, v| -(nu1(u, v) * phi(u, v).cos() - nu2(u, v) * phi(u, v).sin()) / r(u, v)),
                Expr::new(move |u, v| -(nu1(u, v) * phi(u, v).sin() + nu2(u, v) * phi(u, v).cos()) / r(u, v)),
            ],
        );
        let res = check_compatibility(&data, inside(&chart.domain, a, b)).unwrap();
        prop_assert!(res.c4 < 1e-12, "{:?}", res);
        prop_assert!(res.c5.abs() < 1e-12);
    }

    #[test]
    fn curvature_gradient_matches_finite_differences(a in 0.05..0.95f64, b in 0.0..1.0f64) {
        let chart = rotational(2);
        let p = inside(&chart.domain, a, b);
        let jet = curvature_jet(&chart, p).unwrap();
        let k = |du: f64, dv: f64| curvature(&chart, Point::new(p.u + du, p.v + dv)).unwrap();
        let central = |h: f64| ((k(h, 0.0) - k(-h, 0.0)) / (2.0 * h), (k(0.0, h) - k(0.0, -h)) / (2.0 * h));
        let (c1, c2) = (central(1e-3), central(5e-4));
        // Richardson extrapolation removes the h² term.
        let fd = ((4.0 * c2.0 - c1.0) / 3.0, (4.0 * c2.1 - c1.1) / 3.0);
        // Coordinate gradient from the frame gradient: ∂u K = e₁K, ∂v K = Λ e₂K.
        let lambda = chart.geometry(p, 0).unwrap().metric[2].value().sqrt();
        let scale = 1.0 + jet.grad_norm;
        prop_assert!((fd.0 - jet.grad[0]).abs() / scale < 1e-6);
        prop_assert!((fd.1 - lambda * jet.grad[1]).abs() / scale < 1e-6);
    }

    #[test]
    fn taylor_expansion_predicts_nearby_values(u0 in -1.0..1.0f64, v0 in -1.0..1.0f64, du in -0.05..0.05f64, dv in -0.05..0.05f64) {
        let f = |u: Jet, v: Jet| u.exp() * (v * 2.0).sin() + (u * v).cosh();
        let (u, v) = Jet::seed(u0, v0, 6);
        let predicted = f(u, v).eval_offset(du, dv);
        let exact = f(Jet::constant(u0 + du), Jet::constant(v0 + dv)).value();
        prop_assert!((predicted - exact).abs() < 1e-9);
    }
}

/// Shifting the gauge `θ₀` rotates the tangential field like an associate
/// angle: metric and angle function are unchanged.
#[test]
fn gauge_leaves_metric_and_angle_invariant() {
    let g = fixture(Fixture::ParabolicCatenoid { t: 0.7 }).unwrap();
    let field = g.angle("mu").unwrap();
    let grid = g.grid(81, 81).unwrap();
    let run = |theta0: f64| {
        let opts = ReconstructOptions {
            theta: ThetaOptions { theta0, ..Default::default() },
            integrate: IntegrateOptions { substeps: 2, ..Default::default() },
        };
        reconstruct(&field, &grid, 0.0, &opts).unwrap()
    };
    let (a, b) = (run(0.0), run(0.9));
    assert!(a.report.metric_error < 1e-5 && b.report.metric_error < 1e-5);
    for (x, y) in a.immersion.states.iter().zip(&b.immersion.states) {
        assert!((x.n[3] - y.n[3]).abs() < 1e-9);
    }
    let moved = a.immersion.states.iter().zip(&b.immersion.states).map(|(x, y)| (x.h - y.h).abs()).fold(0.0, f64::max);
    assert!(moved > 1e-3, "a gauge shift should act as an associate rotation on heights");
}
