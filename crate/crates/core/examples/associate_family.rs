//! The associate family of one angle function: every member shares the
//! metric and `ν`; heights change, and `θ = π` mirrors `θ = 0`.

use isomin::gallery::{fixture, Fixture};
use isomin::reconstruct::{angle_range, associate_sweep, ReconstructOptions};
use isomin::surface::GridSpec;

fn main() -> isomin::error::Result<()> {
    let g = fixture(Fixture::ParabolicCatenoid { t: 0.7 })?;
    let field = g.angle("mu")?;
    let grid = GridSpec::new(g.chart.domain, 101, 101)?;
    let opts = ReconstructOptions::default();
    let members = associate_sweep(&field, &grid, &angle_range(0.0, std::f64::consts::PI, 4), &opts)?;
    let corner = grid.len() - 1;
    for m in &members {
        let s = &m.immersion.states[corner];
        println!(
            "theta = {:.4}  height at far corner {:+.6}  metric error {:.1e}  |H| {:.1e}",
            m.immersion.assoc_angle, s.h, m.report.metric_error, m.report.mean_curvature
        );
    }
    Ok(())
}
