//! Truncated-Taylor (jet) arithmetic in `n` variables up to order 3.
//!
//! A [`Jet`] carries the value of a function at a point together with its
//! partial derivatives up to a chosen order (at most 3): gradient, Hessian
//! and the fully symmetric third-derivative tensor. All arithmetic
//! propagates derivatives exactly via product/quotient/chain rules, so
//! jets of analytic inputs are exact to rounding.
//!
//! Derived quantities lose one exact order per extracted derivative:
//! [`Jet::deriv`] shifts the coefficient tables down and decrements
//! `order`. Code that needs `k` derivatives of a quantity must therefore
//! start from inputs carrying at least `k` more orders than any chain of
//! `deriv` calls consumes. Accessors panic when asked for an order the jet
//! does not carry, which turns bookkeeping mistakes into loud failures.

use crate::error::{GeomError, Result};

pub const MAX_ORDER: u8 = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    n: usize,
    order: u8,
    val: f64,
    grad: Vec<f64>,  // n          (order >= 1)
    hess: Vec<f64>,  // n*n        (order >= 2)
    third: Vec<f64>, // n*n*n      (order == 3)
}

impl Jet {
    pub fn constant(n: usize, order: u8, val: f64) -> Self {
        assert!(order <= MAX_ORDER);
        Jet {
            n,
            order,
            val,
            grad: if order >= 1 { vec![0.0; n] } else { Vec::new() },
            hess: if order >= 2 { vec![0.0; n * n] } else { Vec::new() },
            third: if order >= 3 { vec![0.0; n * n * n] } else { Vec::new() },
        }
    }

    /// Seed jet for the `idx`-th independent variable.
    pub fn variable(n: usize, order: u8, val: f64, idx: usize) -> Self {
        assert!(idx < n);
        let mut j = Self::constant(n, order, val);
        if order >= 1 {
            j.grad[idx] = 1.0;
        }
        j
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> u8 {
        self.order
    }

    pub fn val(&self) -> f64 {
        self.val
    }

    pub fn grad(&self, i: usize) -> f64 {
        assert!(self.order >= 1, "jet carries no gradient");
        self.grad[i]
    }

    pub fn hess(&self, i: usize, j: usize) -> f64 {
        assert!(self.order >= 2, "jet carries no Hessian");
        self.hess[i * self.n + j]
    }

    pub fn third(&self, i: usize, j: usize, k: usize) -> f64 {
        assert!(self.order >= 3, "jet carries no third order");
        self.third[(i * self.n + j) * self.n + k]
    }

    pub fn is_finite(&self) -> bool {
        self.val.is_finite()
            && self.grad.iter().all(|v| v.is_finite())
            && self.hess.iter().all(|v| v.is_finite())
            && self.third.iter().all(|v| v.is_finite())
    }

    /// Partial derivative with respect to variable `c`, as a jet one order
    /// lower: coefficient tables shift down by one slot.
    pub fn deriv(&self, c: usize) -> Jet {
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        let n = self.n;
        let order = self.order - 1;
        let mut out = Jet::constant(n, order, self.grad[c]);
        if order >= 1 {
            for i in 0..n {
                out.grad[i] = self.hess[c * n + i];
            }
        }
        if order >= 2 {
            for i in 0..n {
                for j in 0..n {
                    out.hess[i * n + j] = self.third[(c * n + i) * n + j];
                }
            }
        }
        out
    }

    /// Directional derivative of the value along `dir` (contracts the
    /// gradient only).
    pub fn dir_deriv(&self, dir: &[f64]) -> f64 {
        assert!(self.order >= 1);
        self.grad.iter().zip(dir).map(|(g, d)| g * d).sum()
    }

    fn binary_order(&self, rhs: &Jet) -> (usize, u8) {
        assert_eq!(self.n, rhs.n, "jet dimension mismatch");
        (self.n, self.order.min(rhs.order))
    }

    pub fn add(&self, rhs: &Jet) -> Jet {
        let (n, order) = self.binary_order(rhs);
        let mut out = Jet::constant(n, order, self.val + rhs.val);
        if order >= 1 {
            for i in 0..n {
                out.grad[i] = self.grad[i] + rhs.grad[i];
            }
        }
        if order >= 2 {
            for i in 0..n * n {
                out.hess[i] = self.hess[i] + rhs.hess[i];
            }
        }
        if order >= 3 {
            for i in 0..n * n * n {
                out.third[i] = self.third[i] + rhs.third[i];
            }
        }
        out
    }

    pub fn sub(&self, rhs: &Jet) -> Jet {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Jet {
        self.scale(-1.0)
    }

    pub fn scale(&self, c: f64) -> Jet {
        let mut out = self.clone();
        out.val *= c;
        for v in out.grad.iter_mut() {
            *v *= c;
        }
        for v in out.hess.iter_mut() {
            *v *= c;
        }
        for v in out.third.iter_mut() {
            *v *= c;
        }
        out
    }

    pub fn add_scalar(&self, c: f64) -> Jet {
        let mut out = self.clone();
        out.val += c;
        out
    }

    pub fn mul(&self, rhs: &Jet) -> Jet {
        let (n, order) = self.binary_order(rhs);
        let (a, b) = (self, rhs);
        let mut out = Jet::constant(n, order, a.val * b.val);
        if order >= 1 {
            for i in 0..n {
                out.grad[i] = a.grad[i] * b.val + a.val * b.grad[i];
            }
        }
        if order >= 2 {
            for i in 0..n {
                for j in 0..n {
                    out.hess[i * n + j] = a.hess[i * n + j] * b.val
                        + a.grad[i] * b.grad[j]
                        + a.grad[j] * b.grad[i]
                        + a.val * b.hess[i * n + j];
                }
            }
        }
        if order >= 3 {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let idx = (i * n + j) * n + k;
                        out.third[idx] = a.third[idx] * b.val
                            + a.hess[i * n + j] * b.grad[k]
                            + a.hess[i * n + k] * b.grad[j]
                            + a.hess[j * n + k] * b.grad[i]
                            + a.grad[i] * b.hess[j * n + k]
                            + a.grad[j] * b.hess[i * n + k]
                            + a.grad[k] * b.hess[i * n + j]
                            + a.val * b.third[idx];
                    }
                }
            }
        }
        out
    }

    pub fn div(&self, rhs: &Jet) -> Result<Jet> {
        Ok(self.mul(&rhs.recip()?))
    }

    /// Composition with a univariate function given its derivatives
    /// c0..c3 at `self.val`.
    fn compose(&self, c: [f64; 4]) -> Jet {
        let n = self.n;
        let order = self.order;
        let f = self;
        let mut out = Jet::constant(n, order, c[0]);
        if order >= 1 {
            for i in 0..n {
                out.grad[i] = c[1] * f.grad[i];
            }
        }
        if order >= 2 {
            for i in 0..n {
                for j in 0..n {
                    out.hess[i * n + j] = c[2] * f.grad[i] * f.grad[j] + c[1] * f.hess[i * n + j];
                }
            }
        }
        if order >= 3 {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let idx = (i * n + j) * n + k;
                        out.third[idx] = c[3] * f.grad[i] * f.grad[j] * f.grad[k]
                            + c[2]
                                * (f.hess[i * n + j] * f.grad[k]
                                    + f.hess[i * n + k] * f.grad[j]
                                    + f.hess[j * n + k] * f.grad[i])
                            + c[1] * f.third[idx];
                    }
                }
            }
        }
        out
    }

    pub fn recip(&self) -> Result<Jet> {
        let v = self.val;
        if v == 0.0 || !v.is_finite() {
            return Err(GeomError::Domain("division by zero".into()));
        }
        let iv = 1.0 / v;
        Ok(self.compose([iv, -iv * iv, 2.0 * iv * iv * iv, -6.0 * iv * iv * iv * iv]))
    }

    pub fn exp(&self) -> Jet {
        let e = self.val.exp();
        self.compose([e, e, e, e])
    }

    pub fn ln(&self) -> Result<Jet> {
        let v = self.val;
        if v <= 0.0 {
            return Err(GeomError::Domain(format!("log of non-positive value {v}")));
        }
        let iv = 1.0 / v;
        Ok(self.compose([v.ln(), iv, -iv * iv, 2.0 * iv * iv * iv]))
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.val.sin_cos();
        self.compose([s, c, -s, -c])
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.val.sin_cos();
        self.compose([c, -s, -c, s])
    }

    pub fn sqrt(&self) -> Result<Jet> {
        let v = self.val;
        if v <= 0.0 {
            return Err(GeomError::Domain(format!(
                "sqrt of non-positive value {v} (derivatives singular at 0)"
            )));
        }
        let r = v.sqrt();
        Ok(self.compose([
            r,
            0.5 / r,
            -0.25 / (r * v),
            0.375 / (r * v * v),
        ]))
    }

    pub fn powi(&self, k: i32) -> Result<Jet> {
        let v = self.val;
        if k < 0 && v == 0.0 {
            return Err(GeomError::Domain("zero base with negative exponent".into()));
        }
        let p = |e: i32| -> f64 {
            if e < 0 {
                v.powi(e)
            } else {
                v.powi(e)
            }
        };
        let kf = k as f64;
        let c0 = p(k);
        let c1 = if k == 0 { 0.0 } else { kf * p(k - 1) };
        let c2 = if k == 0 || k == 1 { 0.0 } else { kf * (kf - 1.0) * p(k - 2) };
        let c3 = if (0..=2).contains(&k) {
            0.0
        } else {
            kf * (kf - 1.0) * (kf - 2.0) * p(k - 3)
        };
        Ok(self.compose([c0, c1, c2, c3]))
    }

    pub fn powf(&self, r: f64) -> Result<Jet> {
        if r.fract() == 0.0 && r.abs() < 2147483647.0 {
            return self.powi(r as i32);
        }
        let v = self.val;
        if v <= 0.0 {
            return Err(GeomError::Domain(format!(
                "non-integer power of non-positive base {v}"
            )));
        }
        let c0 = v.powf(r);
        Ok(self.compose([
            c0,
            r * v.powf(r - 1.0),
            r * (r - 1.0) * v.powf(r - 2.0),
            r * (r - 1.0) * (r - 2.0) * v.powf(r - 3.0),
        ]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seed2(x: f64, y: f64) -> (Jet, Jet) {
        (Jet::variable(2, 3, x, 0), Jet::variable(2, 3, y, 1))
    }

    // f(x, y) = exp(x) * sin(y) + x^2 * y, exercised against hand derivatives.
    fn sample_fn(x: &Jet, y: &Jet) -> Jet {
        x.exp().mul(&y.sin()).add(&x.powi(2).unwrap().mul(y))
    }

    #[test]
    fn derivatives_match_hand_computation() {
        let (x0, y0) = (0.3_f64, -0.7_f64);
        let (x, y) = seed2(x0, y0);
        let f = sample_fn(&x, &y);
        let e = x0.exp();
        let (s, c) = y0.sin_cos();
        assert!((f.val() - (e * s + x0 * x0 * y0)).abs() < 1e-14);
        assert!((f.grad(0) - (e * s + 2.0 * x0 * y0)).abs() < 1e-14);
        assert!((f.grad(1) - (e * c + x0 * x0)).abs() < 1e-14);
        assert!((f.hess(0, 0) - (e * s + 2.0 * y0)).abs() < 1e-14);
        assert!((f.hess(0, 1) - (e * c + 2.0 * x0)).abs() < 1e-14);
        assert!((f.hess(1, 1) - (-e * s)).abs() < 1e-14);
        // third order: f_xxx = e*s, f_xxy = e*c + 2, f_xyy = -e*s, f_yyy = -e*c
        assert!((f.third(0, 0, 0) - e * s).abs() < 1e-14);
        assert!((f.third(0, 0, 1) - (e * c + 2.0)).abs() < 1e-14);
        assert!((f.third(0, 1, 1) + e * s).abs() < 1e-14);
        assert!((f.third(1, 1, 1) + e * c).abs() < 1e-14);
    }

    #[test]
    fn symmetry_is_exact() {
        let (x, y) = seed2(0.9, 1.7);
        let f = x
            .mul(&y)
            .add(&x.sqrt().unwrap().mul(&y.cos()))
            .div(&y.add_scalar(3.0))
            .unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(f.hess(i, j), f.hess(j, i));
                for k in 0..2 {
                    let t = f.third(i, j, k);
                    assert_eq!(t, f.third(i, k, j));
                    assert_eq!(t, f.third(j, i, k));
                    assert_eq!(t, f.third(k, j, i));
                }
            }
        }
    }

    #[test]
    fn deriv_shifts_orders() {
        let (x, y) = seed2(0.4, 0.2);
        let f = sample_fn(&x, &y);
        let fx = f.deriv(0);
        assert_eq!(fx.order(), 2);
        assert!((fx.val() - f.grad(0)).abs() < 1e-15);
        assert!((fx.grad(1) - f.hess(0, 1)).abs() < 1e-15);
        assert!((fx.hess(1, 1) - f.third(0, 1, 1)).abs() < 1e-15);
        let fxy = fx.deriv(1);
        assert_eq!(fxy.order(), 1);
        assert!((fxy.val() - f.hess(0, 1)).abs() < 1e-15);
    }

    #[test]
    fn finite_difference_cross_check() {
        // Independent oracle: central differences of the plain value
        // evaluation, h = 1e-4 for the gradient, 1e-3 for the Hessian.
        let eval = |x: f64, y: f64| -> f64 {
            let (jx, jy) = (Jet::variable(2, 0, x, 0), Jet::variable(2, 0, y, 1));
            sample_fn(&jx, &jy).val()
        };
        let (x0, y0) = (0.52, -0.31);
        let (jx, jy) = seed2(x0, y0);
        let f = sample_fn(&jx, &jy);

        let h = 1e-4;
        let fd_x = (eval(x0 + h, y0) - eval(x0 - h, y0)) / (2.0 * h);
        let fd_y = (eval(x0, y0 + h) - eval(x0, y0 - h)) / (2.0 * h);
        assert!((f.grad(0) - fd_x).abs() <= 1e-6 * (1.0 + fd_x.abs()));
        assert!((f.grad(1) - fd_y).abs() <= 1e-6 * (1.0 + fd_y.abs()));

        let h2 = 1e-3;
        let fd_xx = (eval(x0 + h2, y0) - 2.0 * eval(x0, y0) + eval(x0 - h2, y0)) / (h2 * h2);
        let fd_xy = (eval(x0 + h2, y0 + h2) - eval(x0 + h2, y0 - h2) - eval(x0 - h2, y0 + h2)
            + eval(x0 - h2, y0 - h2))
            / (4.0 * h2 * h2);
        assert!((f.hess(0, 0) - fd_xx).abs() <= 1e-4 * (1.0 + fd_xx.abs()));
        assert!((f.hess(0, 1) - fd_xy).abs() <= 1e-4 * (1.0 + fd_xy.abs()));
    }

    #[test]
    fn domain_errors() {
        let x = Jet::variable(1, 2, -1.0, 0);
        assert!(x.sqrt().is_err());
        assert!(x.ln().is_err());
        let z = Jet::constant(1, 2, 0.0);
        assert!(z.recip().is_err());
        assert!(z.powi(-1).is_err());
    }

    #[test]
    fn low_order_jets_skip_upper_tables() {
        let x = Jet::variable(3, 1, 2.0, 1);
        let y = Jet::variable(3, 1, 5.0, 2);
        let p = x.mul(&y);
        assert_eq!(p.order(), 1);
        assert_eq!(p.val(), 10.0);
        assert_eq!(p.grad(1), 5.0);
        assert_eq!(p.grad(2), 2.0);
    }
}
