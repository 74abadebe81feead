//! Gauss–Codazzi compatibility residuals for explicit data, and what a
//! perturbation of the shape operator does to them.

use isomin::compat::check_compatibility;
use isomin::gallery::{fixture, Fixture};
use isomin::surface::Point;

fn main() -> isomin::error::Result<()> {
    let plane = fixture(Fixture::VerticalPlane { c: -1.0 })?;
    let data = plane.data.clone().expect("vertical plane carries explicit data");
    let p = Point::new(0.3, -0.2);
    println!("vertical plane:  {:?}", check_compatibility(&data, p)?.as_array());

    let bent = data.map(|c| c.s[0] = c.s[0] + 0.1);
    let r = check_compatibility(&bent, p)?;
    println!("with s1 += 0.1:  {:?}", r.as_array());
    println!("largest residual {:.3e} (Gauss equation picks up |sigma|^2 = 0.01)", r.max_abs());
    Ok(())
}
