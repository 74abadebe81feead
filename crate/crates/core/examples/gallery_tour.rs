//! The fixture gallery: parameters, tags, Sa Earp partner families and
//! identification of translated angle functions.

use isomin::angle::AngleField;
use isomin::gallery::{fixture_by_name, match_catalog, saearp_partner_family, translated_angle, FixtureParams, FIXTURE_NAMES};

fn main() -> isomin::error::Result<()> {
    for name in FIXTURE_NAMES {
        let g = fixture_by_name(name, &FixtureParams::default())?;
        let angles: Vec<_> = g.angles.iter().map(|a| a.name).collect();
        println!("{name:<20} c = {:+}  tags {:?}  angles {angles:?}", g.c, g.tags);
    }

    println!("\nSa Earp partners of (l, d) = (1, 2):");
    for p in saearp_partner_family(1.0, 2.0, 6)? {
        println!("  d_bar = {:+.4}  l_bar = {:.6}", p.d_bar, p.l_bar);
    }

    let pc = fixture_by_name("parabolic-catenoid", &FixtureParams::default())?;
    let grid = pc.grid(21, 21)?;
    let field = AngleField::new(pc.chart.clone(), translated_angle(0.4, 0.3));
    println!("\ncatalogue match for a rotated translate: {:?}", match_catalog(&field, &grid, 1e-9)?);
    Ok(())
}
