//! Dense univariate polynomials and real root isolation on an interval.

use std::ops::{Add, Mul};

use serde::Serialize;

use crate::jet::Scalar;

/// Coefficients in increasing degree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Poly<S = f64> {
    pub coeffs: Vec<S>,
}

impl<S: Scalar> Poly<S> {
    pub fn new(coeffs: Vec<S>) -> Self {
        Poly { coeffs }
    }

    /// Number of stored coefficients minus one; trailing zeros are kept.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: f64) -> S {
        let mut acc = S::from(0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn scale(&self, k: S) -> Self {
        Poly::new(self.coeffs.iter().map(|&c| c * k).collect())
    }

    pub fn map_values(&self) -> Poly<f64> {
        Poly::new(self.coeffs.iter().map(Scalar::val).collect())
    }
}

impl<S: Scalar> Add for &Poly<S> {
    type Output = Poly<S>;
    fn add(self, o: &Poly<S>) -> Poly<S> {
        let n = self.coeffs.len().max(o.coeffs.len());
        let zero = S::from(0.0);
        Poly::new(
            (0..n)
                .map(|k| *self.coeffs.get(k).unwrap_or(&zero) + *o.coeffs.get(k).unwrap_or(&zero))
                .collect(),
        )
    }
}

impl<S: Scalar> Mul for &Poly<S> {
    type Output = Poly<S>;
    fn mul(self, o: &Poly<S>) -> Poly<S> {
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return Poly::new(Vec::new());
        }
        let mut out = vec![S::from(0.0); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j] + a * b;
            }
        }
        Poly::new(out)
    }
}

impl Poly<f64> {
    pub fn derivative(&self) -> Self {
        Poly::new(self.coeffs.iter().enumerate().skip(1).map(|(k, &c)| k as f64 * c).collect())
    }

    /// Largest absolute coefficient.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// `Σ |cₖ| |x|ᵏ`, the rounding scale of an evaluation at `x`.
    pub fn abs_eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x.abs() + c.abs())
    }

    fn trimmed(&self) -> Self {
        let mut c = self.coeffs.clone();
        while c.last() == Some(&0.0) {
            c.pop();
        }
        Poly::new(c)
    }
}

/// A real root located on an interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Root {
    pub x: f64,
    /// Touches zero without a sign change, or a cluster of nearby roots.
    pub multiple: bool,
}

/// Roots closer than this are merged into one multiple root.
const MERGE: f64 = 1e-6;

/// Real roots of `p` in `[lo, hi]`.
///
/// The interval is split at the real roots of `p′` (found recursively), so
/// `p` is monotone on each piece and a sign change brackets exactly one
/// root, which is bisected down to adjacent floats. A critical point where
/// `|p|` is at rounding level is reported as a multiple root.
pub fn real_roots(p: &Poly, lo: f64, hi: f64, rel_tol: f64) -> Vec<Root> {
    let p = p.trimmed();
    let mut roots = isolate(&p, lo, hi, rel_tol);
    roots.sort_by(|a, b| a.x.total_cmp(&b.x));
    let mut merged: Vec<Root> = Vec::with_capacity(roots.len());
    for r in roots {
        match merged.last_mut() {
            Some(last) if (r.x - last.x).abs() <= MERGE * (1.0 + r.x.abs()) => {
                if r.multiple && !last.multiple {
                    last.x = r.x;
                }
                last.multiple = true;
            }
            _ => merged.push(r),
        }
    }
    merged
}

fn near_zero(p: &Poly, x: f64, rel_tol: f64) -> bool {
    p.eval(x).abs() <= rel_tol * p.abs_eval(x).max(f64::MIN_POSITIVE)
}

fn isolate(p: &Poly, lo: f64, hi: f64, rel_tol: f64) -> Vec<Root> {
    match p.coeffs.len() {
        0 | 1 => return Vec::new(),
        2 => {
            let x = -p.coeffs[0] / p.coeffs[1];
            return if x >= lo && x <= hi { vec![Root { x, multiple: false }] } else { Vec::new() };
        }
        _ => {}
    }
    let crit: Vec<f64> = isolate(&p.derivative(), lo, hi, rel_tol)
        .into_iter()
        .map(|r| r.x)
        .filter(|&x| x > lo && x < hi)
        .collect();
    let mut knots = Vec::with_capacity(crit.len() + 2);
    knots.push(lo);
    knots.extend(&crit);
    knots.push(hi);

    let mut out = Vec::new();
    for &x in &crit {
        if near_zero(p, x, rel_tol) {
            out.push(Root { x, multiple: true });
        }
    }
    for &x in &[lo, hi] {
        if p.eval(x) == 0.0 || near_zero(p, x, rel_tol) {
            out.push(Root { x, multiple: false });
        }
    }
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (fa, fb) = (p.eval(a), p.eval(b));
        if fa == 0.0 || fb == 0.0 || fa.signum() == fb.signum() {
            continue;
        }
        out.push(Root { x: bisect(p, a, b, fa), multiple: false });
    }
    out
}

fn bisect(p: &Poly, mut a: f64, mut b: f64, fa: f64) -> f64 {
    let sa = fa.signum();
    loop {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            return if p.eval(a).abs() <= p.eval(b).abs() { a } else { b };
        }
        let fm = p.eval(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == sa {
            a = m;
        } else {
            b = m;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_roots(rs: &[f64]) -> Poly {
        rs.iter().fold(Poly::new(vec![1.0]), |acc, &r| &acc * &Poly::new(vec![-r, 1.0]))
    }

    #[test]
    fn arithmetic() {
        let p = Poly::new(vec![1.0, 2.0]);
        let q = Poly::new(vec![0.0, 1.0, 3.0]);
        assert_eq!((&p * &q).coeffs, vec![0.0, 1.0, 5.0, 6.0]);
        assert_eq!((&p + &q).coeffs, vec![1.0, 3.0, 3.0]);
        assert_eq!(q.eval(2.0), 14.0);
        assert_eq!(q.derivative().coeffs, vec![1.0, 6.0]);
    }

    #[test]
    fn finds_simple_roots() {
        let p = from_roots(&[0.1, 0.35, 0.8, 1.7, -0.4]);
        let r = real_roots(&p, 0.0, 1.0, 1e-12);
        let xs: Vec<f64> = r.iter().map(|r| r.x).collect();
        assert_eq!(xs.len(), 3);
        for (x, e) in xs.iter().zip([0.1, 0.35, 0.8]) {
            assert!((x - e).abs() < 1e-14, "{x} vs {e}");
        }
        assert!(r.iter().all(|r| !r.multiple));
    }

    #[test]
    fn flags_double_roots() {
        let p = from_roots(&[0.3, 0.3, 0.6]);
        let r = real_roots(&p, 0.0, 1.0, 1e-12);
        assert_eq!(r.len(), 2);
        assert!(r[0].multiple && (r[0].x - 0.3).abs() < 1e-6);
        assert!(!r[1].multiple && (r[1].x - 0.6).abs() < 1e-14);
    }

    #[test]
    fn polishes_to_rounding_level() {
        let p = from_roots(&[0.123456789, 0.5, 0.9]).scale(1e8);
        for r in real_roots(&p, 0.0, 1.0, 1e-12) {
            assert!(p.eval(r.x).abs() <= 1e-12 * p.norm());
        }
    }

    #[test]
    fn no_roots_for_positive_polynomial() {
        let p = Poly::new(vec![1.0, 0.0, 1.0, 0.0, 2.0]);
        assert!(real_roots(&p, 0.0, 1.0, 1e-12).is_empty());
    }
}
