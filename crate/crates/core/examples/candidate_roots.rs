//! Candidate angle values from the obstruction polynomial, with the
//! admissibility verdict of every root.

use isomin::angle::{filtered_candidates, CandidateOptions};
use isomin::gallery::{fixture, Fixture};
use isomin::surface::Point;

fn main() -> isomin::error::Result<()> {
    let opts = CandidateOptions::default();
    for (fx, p) in [
        (Fixture::Catenoid { beta: 2.0 }, Point::new(0.6, 0.0)),
        (Fixture::Unduloid { beta: 1.5 }, Point::new(0.3, 0.0)),
        (Fixture::SaEarp { l: 1.0, d: 2.0 }, Point::new(0.4, 0.1)),
    ] {
        let g = fixture(fx)?;
        let set = filtered_candidates(&g.chart, p, &opts)?;
        println!("{} at ({}, {}): {} roots", g.name(), p.u, p.v, set.candidates.len());
        for c in &set.candidates {
            let verdict = match c.rejection {
                None => "admissible".to_string(),
                Some(r) => format!("rejected: {r:?}"),
            };
            println!("  nu = {:+.10}  {verdict}", c.nu);
        }
        for (name, field) in g.angles.iter().map(|a| (a.name, g.angle(a.name))) {
            println!("  closed form {name}: {:+.10}", field?.value(p)?);
        }
    }
    Ok(())
}
