//! The first-order, Jacobi, third-order and frame second-order residuals
//! of known angle functions.

use isomin::angle::AngleField;
use isomin::gallery::{fixture, Fixture};
use isomin::surface::Point;

fn report(label: &str, field: &AngleField, points: &[Point]) -> isomin::error::Result<()> {
    for &p in points {
        let r = field.residuals(p)?;
        let e2 = r.e2.map_or("undefined".to_string(), |(a, b)| format!("({a:.1e}, {b:.1e})"));
        println!("{label:<24} ({:5.2}, {:5.2})  M1 {:9.1e}  M2 {:9.1e}  M3 {:9.1e}  E2 {e2}", p.u, p.v, r.m1, r.m2, r.m3);
    }
    Ok(())
}

fn main() -> isomin::error::Result<()> {
    let points = [Point::new(0.0, 0.0), Point::new(0.7, -0.4), Point::new(-1.1, 0.9)];
    for t in [0.0, 0.7] {
        let g = fixture(Fixture::ParabolicCatenoid { t })?;
        report(&format!("parabolic catenoid t={t}"), &g.angle("mu")?, &points)?;
    }
    let s = fixture(Fixture::SaEarp { l: 1.0, d: 2.0 })?;
    report("saearp nu", &s.angle("nu")?, &points)?;
    report("saearp -nu_bar", &s.angle("-nu_bar")?, &points)?;

    // A wrong guess violates the first-order equation.
    let wrong = AngleField::new(s.chart.clone(), isomin::surface::Expr::constant(0.5));
    report("saearp nu = 0.5", &wrong, &points[..1])?;
    Ok(())
}
