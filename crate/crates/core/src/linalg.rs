//! Dense linear algebra for the small matrices this crate works with
//! (n <= 6). Inversion is pivoted Gauss-Jordan elimination with a hard
//! pivot threshold so a near-singular metric fails deterministically
//! instead of producing garbage.

use crate::error::{GeomError, Result};
use crate::jet::Jet;

pub const PIVOT_THRESHOLD: f64 = 1e-12;

/// Invert an n x n matrix of f64 (row-major).
pub fn invert(n: usize, a: &[f64]) -> Result<Vec<f64>> {
    let mut m = a.to_vec();
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if m[r * n + col].abs() > m[piv * n + col].abs() {
                piv = r;
            }
        }
        if m[piv * n + col].abs() < PIVOT_THRESHOLD {
            return Err(GeomError::SingularMetric);
        }
        if piv != col {
            for c in 0..n {
                m.swap(col * n + c, piv * n + c);
                inv.swap(col * n + c, piv * n + c);
            }
        }
        let d = m[col * n + col];
        for c in 0..n {
            m[col * n + c] /= d;
            inv[col * n + c] /= d;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = m[r * n + col];
            if factor == 0.0 {
                continue;
            }
            for c in 0..n {
                m[r * n + c] -= factor * m[col * n + c];
                inv[r * n + c] -= factor * inv[col * n + c];
            }
        }
    }
    Ok(inv)
}

/// Invert an n x n matrix of jets; pivoting is on the value parts.
pub fn invert_jets(n: usize, a: &[Jet]) -> Result<Vec<Jet>> {
    let nv = a[0].nvars();
    let order = a.iter().map(|j| j.order()).min().unwrap();
    let mut m: Vec<Jet> = a.to_vec();
    let mut inv: Vec<Jet> = (0..n * n)
        .map(|idx| Jet::constant(nv, order, if idx % (n + 1) == 0 { 1.0 } else { 0.0 }))
        .collect();
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if m[r * n + col].val().abs() > m[piv * n + col].val().abs() {
                piv = r;
            }
        }
        if m[piv * n + col].val().abs() < PIVOT_THRESHOLD {
            return Err(GeomError::SingularMetric);
        }
        if piv != col {
            for c in 0..n {
                m.swap(col * n + c, piv * n + c);
                inv.swap(col * n + c, piv * n + c);
            }
        }
        let d = m[col * n + col].recip()?;
        for c in 0..n {
            m[col * n + c] = m[col * n + c].mul(&d);
            inv[col * n + c] = inv[col * n + c].mul(&d);
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = m[r * n + col].clone();
            if factor.val() == 0.0 && factor.order() == 0 {
                continue;
            }
            for c in 0..n {
                m[r * n + c] = m[r * n + c].sub(&factor.mul(&m[col * n + c]));
                inv[r * n + c] = inv[r * n + c].sub(&factor.mul(&inv[col * n + c]));
            }
        }
    }
    Ok(inv)
}

/// Cholesky-style positivity test: succeeds iff the symmetric matrix is
/// positive definite (up to the pivot threshold).
pub fn is_spd(n: usize, a: &[f64]) -> bool {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= PIVOT_THRESHOLD {
                    return false;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    true
}

pub fn matvec(n: usize, a: &[f64], x: &[f64]) -> Vec<f64> {
    (0..n)
        .map(|i| (0..n).map(|j| a[i * n + j] * x[j]).sum())
        .collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// x^T A y for a row-major n x n matrix.
pub fn quad_form(n: usize, a: &[f64], x: &[f64], y: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += x[i] * a[i * n + j] * y[j];
        }
    }
    s
}

pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scaled(alpha: f64, x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| alpha * v).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invert_round_trip() {
        let a = [2.0, 1.0, 0.5, 1.0, 3.0, 0.0, 0.5, 0.0, 1.5];
        let inv = invert(3, &a).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for k in 0..3 {
                    s += a[i * 3 + k] * inv[k * 3 + j];
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((s - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn singular_matrix_fails() {
        let a = [1.0, 2.0, 2.0, 4.0];
        assert!(matches!(invert(2, &a), Err(GeomError::SingularMetric)));
    }

    #[test]
    fn jet_inverse_carries_derivatives() {
        // A(x) = [[1 + x^2, 0], [0, 2]] in one variable; d/dx A^{-1}[0][0] = -2x/(1+x^2)^2.
        let x0 = 0.7;
        let x = Jet::variable(1, 2, x0, 0);
        let a = vec![
            x.mul(&x).add_scalar(1.0),
            Jet::constant(1, 2, 0.0),
            Jet::constant(1, 2, 0.0),
            Jet::constant(1, 2, 2.0),
        ];
        let inv = invert_jets(2, &a).unwrap();
        let t = 1.0 + x0 * x0;
        assert!((inv[0].val() - 1.0 / t).abs() < 1e-14);
        assert!((inv[0].grad(0) + 2.0 * x0 / (t * t)).abs() < 1e-13);
        assert!((inv[3].val() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn spd_check() {
        assert!(is_spd(2, &[2.0, 0.5, 0.5, 1.0]));
        assert!(!is_spd(2, &[1.0, 2.0, 2.0, 1.0]));
        assert!(!is_spd(2, &[0.0, 0.0, 0.0, 1.0]));
    }
}
