//! Reconstructs a minimal immersion from its angle function, checks it by
//! finite differences and writes CSV and OBJ files to the temp directory.

use std::fs::File;
use std::io::BufWriter;

use isomin::gallery::{fixture, Fixture};
use isomin::reconstruct::{export, reconstruct, ReconstructOptions, VerifyThresholds};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = fixture(Fixture::ParabolicCatenoid { t: 0.0 })?;
    let field = g.angle("mu")?;
    let grid = g.grid(201, 201)?;
    let rec = reconstruct(&field, &grid, 0.0, &ReconstructOptions::default())?;
    println!("{:#?}", rec.report);
    println!("failures: {:?}", rec.report.failures(&VerifyThresholds::default()));

    let dir = std::env::temp_dir();
    let csv = dir.join("parabolic_catenoid.csv");
    let obj = dir.join("parabolic_catenoid.obj");
    export::write_csv(&rec.immersion, BufWriter::new(File::create(&csv)?))?;
    export::write_obj(&rec.immersion, BufWriter::new(File::create(&obj)?))?;
    println!("wrote {} and {} ({})", csv.display(), obj.display(), export::projection_name(&rec.immersion));
    Ok(())
}
