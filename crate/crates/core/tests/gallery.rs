use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use isomin::angle::{residual_ricci, AngleField};
use isomin::gallery::{fixture, match_catalog, saearp_partner, translated_angle, CatalogMatch, Fixture};
use isomin::surface::{Expr, Point};

#[test]
fn saearp_angles_differ_by_the_profile() {
    for (l, d) in [(1.0, 2.0), (0.3, -1.7), (2.5, 1.1)] {
        let g = fixture(Fixture::SaEarp { l, d }).unwrap();
        let (nu, nu_bar) = (g.angle("nu").unwrap(), g.angle("nu_bar").unwrap());
        for p in g.grid(13, 3).unwrap().points() {
            let lam2 = g.chart.geometry(p, 0).unwrap().metric[2].value();
            let gap = nu.value(p).unwrap().powi(2) - nu_bar.value(p).unwrap().powi(2);
            assert!((gap - (d * d - 1.0) / lam2).abs() < 1e-14);
        }
    }
}

#[test]
fn both_saearp_angles_solve_the_system() {
    let g = fixture(Fixture::SaEarp { l: 1.0, d: 2.0 }).unwrap();
    for name in ["nu", "nu_bar", "-nu", "-nu_bar"] {
        let field = g.angle(name).unwrap();
        for p in g.grid(11, 5).unwrap().points() {
            let r = field.residuals(p).unwrap();
            assert!(r.m1.abs() < 1e-10 && r.m2.abs() < 1e-10 && r.m3.abs() < 1e-8, "{name} at {p:?}: {r:?}");
        }
    }
}

#[test]
fn partner_limits() {
    let p = saearp_partner(1.0, 2.0, 0.0).unwrap().unwrap();
    assert!((p.l_bar_sq - 2.0 / 3.0).abs() < 1e-15);
    let edge = (0.4f64).sqrt();
    assert!(saearp_partner(1.0, 2.0, edge - 1e-9).unwrap().is_some());
    assert!(saearp_partner(1.0, 2.0, edge + 1e-9).unwrap().is_none());
}

#[test]
fn catalog_recovers_translated_angles() {
    let base = fixture(Fixture::ParabolicCatenoid { t: 0.0 }).unwrap();
    let grid = base.grid(9, 9).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let (t, rho) = (rng.gen_range(-1.5..1.5), rng.gen_range(-3.0..3.0));
        let field = AngleField::new(base.chart.clone(), translated_angle(t, rho));
        match match_catalog(&field, &grid, 1e-6).unwrap() {
            Some(CatalogMatch::Translated { t: found, max_error, .. }) => {
                assert!((found - t).abs() < 1e-9 && max_error < 1e-6);
            }
            other => panic!("t = {t}, rho = {rho}: {other:?}"),
        }
    }
    let flat = AngleField::new(base.chart.clone(), Expr::constant(-1.0));
    assert_eq!(match_catalog(&flat, &grid, 1e-6).unwrap(), Some(CatalogMatch::Horizontal { sign: -1.0 }));
    let off = AngleField::new(base.chart.clone(), Expr::constant(0.3));
    assert_eq!(match_catalog(&off, &grid, 1e-6).unwrap(), None);
}

#[test]
fn ricci_residual_on_constant_curvature() {
    let hyperbolic = fixture(Fixture::ParabolicCatenoid { t: 0.0 }).unwrap();
    let flat = fixture(Fixture::VerticalPlane { c: 1.0 }).unwrap();
    for p in hyperbolic.grid(7, 7).unwrap().points() {
        assert!((residual_ricci(&hyperbolic.chart, p).unwrap().residual + 4.0).abs() < 1e-12);
    }
    for p in flat.grid(7, 7).unwrap().points() {
        assert_eq!(residual_ricci(&flat.chart, p).unwrap().residual, 0.0);
    }
}

#[test]
fn ricci_residual_reduces_from_the_third_order_residual() {
    let g = fixture(Fixture::SaEarp { l: 1.0, d: 2.0 }).unwrap();
    let d = g.chart.domain;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let p = Point::new(rng.gen_range(d.u_min..d.u_max), rng.gen_range(d.v_min..d.v_max));
        assert!(residual_ricci(&g.chart, p).unwrap().reduction_gap < 1e-12);
    }
}
