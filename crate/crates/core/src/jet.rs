//! Truncated bivariate Taylor arithmetic.
//!
//! A [`Jet`] carries the Taylor coefficients of a function of the chart
//! coordinates `(u, v)` around a base point, up to a total degree of
//! [`MAX_ORDER`]. Evaluating an analytic closure on seeded jets yields every
//! coordinate partial derivative up to that order, exactly up to rounding.
//!
//! Each jet records the total order up to which its coefficients are valid.
//! Binary operations take the smaller of the two orders, and differentiation
//! lowers it by one, so a quantity that needs more derivatives than its
//! inputs carry is caught instead of silently returning zeros.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Highest total derivative order carried by a [`Jet`].
pub const MAX_ORDER: usize = 6;

const LEN: usize = (MAX_ORDER + 1) * (MAX_ORDER + 2) / 2;

#[inline]
const fn idx(i: usize, j: usize) -> usize {
    let n = i + j;
    n * (n + 1) / 2 + j
}

const FACT: [f64; MAX_ORDER + 1] = [1.0, 1.0, 2.0, 6.0, 24.0, 120.0, 720.0];

/// Truncated Taylor polynomial in `(du, dv)`.
#[derive(Clone, Copy, PartialEq)]
pub struct Jet {
    order: usize,
    c: [f64; LEN],
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("order", &self.order)
            .field("coeffs", &&self.c[..idx(0, self.order) + 1])
            .finish()
    }
}

impl Jet {
    /// A constant, valid to every order.
    pub const fn constant(x: f64) -> Self {
        let mut c = [0.0; LEN];
        c[0] = x;
        Jet { order: MAX_ORDER, c }
    }

    /// The coordinate `u` seeded at `u0`, carrying derivatives up to `order`.
    pub fn var_u(u0: f64, order: usize) -> Self {
        assert!(order <= MAX_ORDER, "jet order {order} exceeds {MAX_ORDER}");
        let mut c = [0.0; LEN];
        c[0] = u0;
        if order >= 1 {
            c[idx(1, 0)] = 1.0;
        }
        Jet { order, c }
    }

    /// The coordinate `v` seeded at `v0`, carrying derivatives up to `order`.
    pub fn var_v(v0: f64, order: usize) -> Self {
        assert!(order <= MAX_ORDER, "jet order {order} exceeds {MAX_ORDER}");
        let mut c = [0.0; LEN];
        c[0] = v0;
        if order >= 1 {
            c[idx(0, 1)] = 1.0;
        }
        Jet { order, c }
    }

    /// Seeds for both coordinates at `(u0, v0)`.
    pub fn seed(u0: f64, v0: f64, order: usize) -> (Self, Self) {
        (Self::var_u(u0, order), Self::var_v(v0, order))
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.c[0]
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    /// Truncates to a lower order.
    pub fn truncate(mut self, order: usize) -> Self {
        if order < self.order {
            for k in idx(0, order) + 1..LEN {
                self.c[k] = 0.0;
            }
            self.order = order;
        }
        self
    }

    /// Taylor coefficient of `du^i dv^j`.
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        assert!(i + j <= self.order, "coefficient ({i},{j}) beyond jet order {}", self.order);
        self.c[idx(i, j)]
    }

    /// The partial derivative `∂u^i ∂v^j` at the base point.
    pub fn partial(&self, i: usize, j: usize) -> f64 {
        self.coeff(i, j) * FACT[i] * FACT[j]
    }

    /// `∂/∂u`, one order lower.
    pub fn d_du(&self) -> Self {
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        let order = self.order - 1;
        let mut c = [0.0; LEN];
        for n in 0..=order {
            for j in 0..=n {
                let i = n - j;
                c[idx(i, j)] = (i + 1) as f64 * self.c[idx(i + 1, j)];
            }
        }
        Jet { order, c }
    }

    /// `∂/∂v`, one order lower.
    pub fn d_dv(&self) -> Self {
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        let order = self.order - 1;
        let mut c = [0.0; LEN];
        for n in 0..=order {
            for j in 0..=n {
                let i = n - j;
                c[idx(i, j)] = (j + 1) as f64 * self.c[idx(i, j + 1)];
            }
        }
        Jet { order, c }
    }

    /// Builds the jet of a function from the jets of its two partial
    /// derivatives and its value at the base point. The partials must form
    /// a closed 1-form; only `du` for the `u`-carrying terms and the pure
    /// `dv` terms of `dv` are read.
    pub fn antiderivative(value: f64, du: &Jet, dv: &Jet) -> Self {
        let order = (du.order.min(dv.order) + 1).min(MAX_ORDER);
        let mut c = [0.0; LEN];
        c[0] = value;
        for n in 1..=order {
            for j in 0..=n {
                let i = n - j;
                c[idx(i, j)] = if i >= 1 {
                    du.c[idx(i - 1, j)] / i as f64
                } else {
                    dv.c[idx(0, j - 1)] / j as f64
                };
            }
        }
        Jet { order, c }
    }

    /// The Taylor polynomial evaluated at the offset `(du, dv)`.
    pub fn eval_offset(&self, du: f64, dv: f64) -> f64 {
        let mut acc = 0.0;
        for n in (0..=self.order).rev() {
            let mut term = 0.0;
            let mut dv_pow = 1.0;
            for j in 0..=n {
                term += self.c[idx(n - j, j)] * du.powi((n - j) as i32) * dv_pow;
                dv_pow *= dv;
            }
            acc += term;
        }
        acc
    }

    /// Sum of the absolute coefficients of total degree `n`.
    pub fn degree_norm(&self, n: usize) -> f64 {
        assert!(n <= self.order, "degree {n} beyond jet order {}", self.order);
        (0..=n).map(|j| self.c[idx(n - j, j)].abs()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.c[..=idx(0, self.order)].iter().all(|x| x.is_finite())
    }

    fn nilpotent(&self) -> Self {
        let mut h = *self;
        h.c[0] = 0.0;
        h
    }

    fn is_constant(&self) -> bool {
        self.c[1..=idx(0, self.order)].iter().all(|&x| x == 0.0)
    }

    /// Composes a univariate function, given its Taylor coefficients
    /// `g[k] = g⁽ᵏ⁾(x₀)/k!` at `x₀ = self.value()`.
    fn compose(&self, g: &[f64; MAX_ORDER + 1]) -> Self {
        if self.is_constant() {
            let mut r = *self;
            r.c[0] = g[0];
            return r;
        }
        let h = self.nilpotent();
        let n = self.order;
        let mut r = Jet::constant(g[n]).truncate(n);
        for k in (0..n).rev() {
            r *= h;
            r.c[0] += g[k];
        }
        r
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.value().sin_cos();
        let cyc = [s, c, -s, -c];
        self.compose(&std::array::from_fn(|k| cyc[k % 4] / FACT[k]))
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.value().sin_cos();
        let cyc = [c, -s, -c, s];
        self.compose(&std::array::from_fn(|k| cyc[k % 4] / FACT[k]))
    }

    pub fn sinh(self) -> Self {
        let x = self.value();
        let (s, c) = (x.sinh(), x.cosh());
        self.compose(&std::array::from_fn(|k| if k % 2 == 0 { s } else { c } / FACT[k]))
    }

    pub fn cosh(self) -> Self {
        let x = self.value();
        let (s, c) = (x.sinh(), x.cosh());
        self.compose(&std::array::from_fn(|k| if k % 2 == 0 { c } else { s } / FACT[k]))
    }

    pub fn exp(self) -> Self {
        let e = self.value().exp();
        self.compose(&std::array::from_fn(|k| e / FACT[k]))
    }

    pub fn ln(self) -> Self {
        let x = self.value();
        let mut g = [0.0; MAX_ORDER + 1];
        g[0] = x.ln();
        let mut p = 1.0;
        for (k, gk) in g.iter_mut().enumerate().skip(1) {
            p /= x;
            *gk = if k % 2 == 1 { p } else { -p } / k as f64;
        }
        self.compose(&g)
    }

    /// `self^p` for real `p`; the base value must be positive unless `p` is
    /// a non-negative integer.
    pub fn powf(self, p: f64) -> Self {
        let x = self.value();
        let mut g = [0.0; MAX_ORDER + 1];
        g[0] = x.powf(p);
        // binomial(p, k) x^(p-k)
        let mut binom = 1.0;
        for (k, gk) in g.iter_mut().enumerate().skip(1) {
            binom *= (p - (k - 1) as f64) / k as f64;
            *gk = binom * x.powf(p - k as f64);
        }
        self.compose(&g)
    }

    pub fn sqrt(self) -> Self {
        let x = self.value();
        let r = x.sqrt();
        let mut g = [0.0; MAX_ORDER + 1];
        g[0] = r;
        let mut binom = 1.0;
        let mut xp = r;
        for (k, gk) in g.iter_mut().enumerate().skip(1) {
            binom *= (0.5 - (k - 1) as f64) / k as f64;
            xp /= x;
            *gk = binom * xp;
        }
        self.compose(&g)
    }

    pub fn recip(self) -> Self {
        let x = self.value();
        let mut g = [0.0; MAX_ORDER + 1];
        let mut p = 1.0 / x;
        for (k, gk) in g.iter_mut().enumerate() {
            *gk = if k % 2 == 0 { p } else { -p };
            p /= x;
        }
        self.compose(&g)
    }

    pub fn powi(self, n: i32) -> Self {
        match n {
            0 => Jet::constant(1.0).truncate(self.order),
            n if n < 0 => self.powi(-n).recip(),
            _ => {
                let mut r = self;
                for _ in 1..n {
                    r *= self;
                }
                r
            }
        }
    }

    pub fn atan(self) -> Self {
        // d/dx atan = 1/(1+x²); expand that in h and integrate termwise.
        let x = self.value();
        let q = series_recip(&[1.0 + x * x, 2.0 * x, 1.0, 0.0, 0.0, 0.0, 0.0]);
        let mut g = [0.0; MAX_ORDER + 1];
        g[0] = x.atan();
        for k in 1..=MAX_ORDER {
            g[k] = q[k - 1] / k as f64;
        }
        self.compose(&g)
    }

    pub fn asin(self) -> Self {
        // d/dx asin = (1 - x²)^(-1/2)
        let x = self.value();
        let base = [1.0 - x * x, -2.0 * x, -1.0, 0.0, 0.0, 0.0, 0.0];
        let q = series_powf(&base, -0.5);
        let mut g = [0.0; MAX_ORDER + 1];
        g[0] = x.asin();
        for k in 1..=MAX_ORDER {
            g[k] = q[k - 1] / k as f64;
        }
        self.compose(&g)
    }
}

/// Reciprocal of a univariate power series with nonzero constant term.
fn series_recip(a: &[f64; MAX_ORDER + 1]) -> [f64; MAX_ORDER + 1] {
    let mut r = [0.0; MAX_ORDER + 1];
    r[0] = 1.0 / a[0];
    for k in 1..=MAX_ORDER {
        let s: f64 = (1..=k).map(|i| a[i] * r[k - i]).sum();
        r[k] = -s / a[0];
    }
    r
}

/// `a^p` for a univariate power series with positive constant term.
fn series_powf(a: &[f64; MAX_ORDER + 1], p: f64) -> [f64; MAX_ORDER + 1] {
    // r' a = p a' r, solved order by order.
    let mut r = [0.0; MAX_ORDER + 1];
    r[0] = a[0].powf(p);
    for k in 1..=MAX_ORDER {
        let mut s = 0.0;
        for i in 1..=k {
            s += (p * i as f64 - (k - i) as f64) * a[i] * r[k - i];
        }
        r[k] = s / (k as f64 * a[0]);
    }
    r
}

impl From<f64> for Jet {
    fn from(x: f64) -> Self {
        Jet::constant(x)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let order = self.order.min(rhs.order);
        let mut c = [0.0; LEN];
        for (k, ck) in c.iter_mut().enumerate().take(idx(0, order) + 1) {
            *ck = self.c[k] + rhs.c[k];
        }
        Jet { order, c }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        let order = self.order.min(rhs.order);
        let mut c = [0.0; LEN];
        for (k, ck) in c.iter_mut().enumerate().take(idx(0, order) + 1) {
            *ck = self.c[k] - rhs.c[k];
        }
        Jet { order, c }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let order = self.order.min(rhs.order);
        let mut c = [0.0; LEN];
        for da in 0..=order {
            for ja in 0..=da {
                let ia = da - ja;
                let x = self.c[idx(ia, ja)];
                if x == 0.0 {
                    continue;
                }
                for db in 0..=order - da {
                    for jb in 0..=db {
                        let ib = db - jb;
                        c[idx(ia + ib, ja + jb)] += x * rhs.c[idx(ib, jb)];
                    }
                }
            }
        }
        Jet { order, c }
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet) -> Jet {
        if rhs.is_constant() {
            return self * (1.0 / rhs.value());
        }
        self * rhs.recip()
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(mut self) -> Jet {
        for x in self.c.iter_mut() {
            *x = -*x;
        }
        self
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.c[0] += rhs;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: f64) -> Jet {
        self.c[0] -= rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(mut self, rhs: f64) -> Jet {
        for x in self.c.iter_mut() {
            *x *= rhs;
        }
        self
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(mut self, rhs: f64) -> Jet {
        for x in self.c.iter_mut() {
            *x /= rhs;
        }
        self
    }
}

impl Add<Jet> for f64 {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        rhs + self
    }
}

impl Sub<Jet> for f64 {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        -rhs + self
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        rhs * self
    }
}

impl Div<Jet> for f64 {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet) -> Jet {
        rhs.recip() * self
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        *self = *self + rhs;
    }
}

impl SubAssign for Jet {
    fn sub_assign(&mut self, rhs: Jet) {
        *self = *self - rhs;
    }
}

impl MulAssign for Jet {
    fn mul_assign(&mut self, rhs: Jet) {
        *self = *self * rhs;
    }
}

/// Field-like scalar shared by `f64` and [`Jet`], so pointwise formulas can
/// be written once and evaluated either on values or on jets.
pub trait Scalar:
    Copy
    + From<f64>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
{
    fn val(&self) -> f64;
    fn sqrt(self) -> Self;
}

impl Scalar for f64 {
    fn val(&self) -> f64 {
        *self
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
}

impl Scalar for Jet {
    fn val(&self) -> f64 {
        self.value()
    }
    fn sqrt(self) -> Self {
        Jet::sqrt(self)
    }
}
