//! Gaussian curvature, orthonormal frame and connection form of a chart.
//!
//! Run with `cargo run --example curvature_and_frames`.

use isomin::gallery::{fixture, Fixture};
use isomin::surface::{curvature, curvature_jet, frame_at, Point};

fn main() -> isomin::error::Result<()> {
    let catenoid = fixture(Fixture::Catenoid { beta: 2.0 })?;
    println!("catenoid chart, c = {}", catenoid.c);
    for u in [-1.0, -0.5, 0.0, 0.5, 1.0] {
        let p = Point::new(u, 0.2);
        let k = curvature(&catenoid.chart, p)?;
        let f = frame_at(&catenoid.chart, p)?;
        println!("u = {u:5.2}  K = {k:+.6}  alpha = ({:+.4}, {:+.4})  e2 = {:?}", f.alpha1, f.alpha2, f.e2_coords);
    }

    let jet = curvature_jet(&catenoid.chart, Point::new(0.4, 0.0))?;
    println!("\ncurvature jet at (0.4, 0):");
    println!("  grad K     = {:?}", jet.grad);
    println!("  Hessian    = {:?}", jet.hessian);
    println!("  Laplacian  = {:.6}", jet.laplacian);
    if let Some(g) = jet.gradient_frame {
        println!("  gradient frame: K11 = {:.6}, K22 = {:.6}, K12 = {:.2e}", g.k11, g.k22, g.k12);
    }
    Ok(())
}
