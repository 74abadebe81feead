//! The Ricci-condition residual of chart metrics, compared with the third
//! order residual at `c = 0`.

use isomin::angle::residual_ricci;
use isomin::gallery::{fixture, Fixture};
use isomin::surface::Point;

fn main() -> isomin::error::Result<()> {
    for fx in [Fixture::Catenoid { beta: 2.0 }, Fixture::Unduloid { beta: 1.5 }, Fixture::SaEarp { l: 1.0, d: 2.0 }] {
        let g = fixture(fx)?;
        for u in [0.0, 0.5, 1.0] {
            let r = residual_ricci(&g.chart, Point::new(u, 0.0))?;
            println!("{:<10} u = {u:.1}  residual {:+.6e}  reduction gap {:.1e}", g.name(), r.residual, r.reduction_gap);
        }
    }
    Ok(())
}
