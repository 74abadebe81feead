//! CSV and OBJ serialization of reconstructed immersions.

use std::io::{self, Write};

use super::integrate::ImmersionGrid;

fn model_line(im: &ImmersionGrid) -> String {
    let b = im.model.basepoint();
    format!(
        "# model M2(c)xR c={} signature={} basepoint=({},{},{}) assoc_angle={}",
        im.model.c, im.model.signature_label(), b[0], b[1], b[2], im.assoc_angle
    )
}

/// One row per node: `u,v,x0,x1,x2,h,nu`, after a comment line recording
/// the ambient model.
pub fn write_csv<W: Write>(im: &ImmersionGrid, mut w: W) -> io::Result<()> {
    writeln!(w, "{}", model_line(im))?;
    writeln!(w, "u,v,x0,x1,x2,h,nu")?;
    for i in 0..im.grid.nu {
        for j in 0..im.grid.nv {
            let p = im.grid.point(i, j);
            let s = im.state(i, j);
            let nu = im.nu[i * im.grid.nv + j];
            writeln!(w, "{:e},{:e},{:e},{:e},{:e},{:e},{:e}", p.u, p.v, s.p[0], s.p[1], s.p[2], s.h, nu)?;
        }
    }
    Ok(())
}

/// Name of the 3D projection used by [`write_obj`].
pub fn projection_name(im: &ImmersionGrid) -> &'static str {
    if im.model.c < 0.0 {
        "poincare-disk"
    } else {
        "orthographic"
    }
}

/// Projected vertex of a node: the Poincaré disk plus height for `c < 0`,
/// `(x₀, x₁, h)` for `c > 0`.
pub fn project(im: &ImmersionGrid, i: usize, j: usize) -> [f64; 3] {
    let s = im.state(i, j);
    if im.model.c < 0.0 {
        let d = 1.0 + s.p[2] * (-im.model.c).sqrt();
        [s.p[0] / d, s.p[1] / d, s.h]
    } else {
        [s.p[0], s.p[1], s.h]
    }
}

/// Triangulated mesh with two triangles per grid cell.
pub fn write_obj<W: Write>(im: &ImmersionGrid, mut w: W) -> io::Result<()> {
    writeln!(w, "{}", model_line(im))?;
    writeln!(w, "# projection: {}", projection_name(im))?;
    let (nu, nv) = (im.grid.nu, im.grid.nv);
    for i in 0..nu {
        for j in 0..nv {
            let [x, y, z] = project(im, i, j);
            writeln!(w, "v {x:e} {y:e} {z:e}")?;
        }
    }
    let id = |i: usize, j: usize| i * nv + j + 1;
    for i in 0..nu - 1 {
        for j in 0..nv - 1 {
            writeln!(w, "f {} {} {}", id(i, j), id(i + 1, j), id(i + 1, j + 1))?;
            writeln!(w, "f {} {} {}", id(i, j), id(i + 1, j + 1), id(i, j + 1))?;
        }
    }
    Ok(())
}
