use serde::Serialize;

use crate::error::{Error, Result};

/// The quadric model `{⟨x,x⟩ = 1/c}` of `M²(c)` in a 3-space, times `R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmbientModel {
    pub c: f64,
}

/// Ambient vectors are `(x₀, x₁, x₂, h)`: the 3-space part then the
/// vertical part.
pub type Vec4 = [f64; 4];

impl AmbientModel {
    pub fn new(c: f64) -> Result<Self> {
        if c == 0.0 || !c.is_finite() {
            return Err(Error::Parameter(format!("ambient curvature c must be finite and nonzero, got {c}")));
        }
        Ok(AmbientModel { c })
    }

    /// `+1` on every axis for `c > 0`; the last axis is negative for `c < 0`.
    pub fn signature(&self) -> [f64; 3] {
        if self.c > 0.0 {
            [1.0, 1.0, 1.0]
        } else {
            [1.0, 1.0, -1.0]
        }
    }

    pub fn signature_label(&self) -> &'static str {
        if self.c > 0.0 {
            "(+,+,+)"
        } else {
            "(+,+,-)"
        }
    }

    pub fn basepoint(&self) -> [f64; 3] {
        let r = 1.0 / self.c.abs().sqrt();
        if self.c > 0.0 {
            [r, 0.0, 0.0]
        } else {
            [0.0, 0.0, r]
        }
    }

    /// Orthonormal tangent basis `(E₁, E₂)` of the quadric at the basepoint.
    pub fn tangent_basis(&self) -> [[f64; 3]; 2] {
        if self.c > 0.0 {
            [[0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
        } else {
            [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]
        }
    }

    /// Bilinear form of the 3-space.
    pub fn dot3(&self, a: &[f64], b: &[f64]) -> f64 {
        let s = self.signature();
        s[0] * a[0] * b[0] + s[1] * a[1] * b[1] + s[2] * a[2] * b[2]
    }

    /// Product metric on the 3-space times `R`.
    pub fn dot4(&self, a: &Vec4, b: &Vec4) -> f64 {
        self.dot3(a, b) + a[3] * b[3]
    }

    /// `|c⟨p,p⟩ − 1|`, zero on the quadric.
    pub fn quadric_error(&self, p: &[f64]) -> f64 {
        (self.c * self.dot3(p, p) - 1.0).abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basepoints_lie_on_quadrics() {
        for c in [1.0, 0.25, -1.0, -4.0] {
            let m = AmbientModel::new(c).unwrap();
            let p = m.basepoint();
            assert!(m.quadric_error(&p) < 1e-15);
            for e in m.tangent_basis() {
                assert_eq!(m.dot3(&e, &p), 0.0);
                assert_eq!(m.dot3(&e, &e), 1.0);
            }
        }
        assert!(AmbientModel::new(0.0).is_err());
    }
}
