//! Jet-level calculus of a base manifold with a scaling field at one
//! point: everything the closed-form connection and curvature evaluators
//! consume. Fields entering the formulas are constant-component in the
//! chart, so `nabla_X Y = Gamma(X, Y)` and brackets vanish; quantities
//! that appear differentiated (Gamma, A_f, R) are kept as jets.

use crate::engine::{BaseMetric, MetricJets};
use crate::error::Result;
use crate::jet::Jet;
use crate::linalg;
use crate::manifold::{seed_vars, ChartedManifold, ScalingField};

pub struct BasePoint {
    pub m: usize,
    pub x: Vec<f64>,
    /// Metric component jets (order 3).
    pub g: Vec<Jet>,
    pub g_inv: Vec<Jet>,
    /// Christoffel jets (order 2), layout [(k*m+i)*m+j].
    pub gamma: Vec<Jet>,
    /// Riemann jets (order 1), layout [((l*m+i)*m+j)*m+k] = R^l_{ijk}.
    pub riem: Vec<Jet>,
    /// (nabla_c R)^l_{ijk} values, layout [(((c*m+l)*m+i)*m+j)*m+k].
    pub nabla_riem: Vec<f64>,
    /// Scaling field jet (order 3) and its value.
    pub f: Jet,
    pub f_val: f64,
}

impl BasePoint {
    pub fn new(mf: &ChartedManifold, f: &ScalingField, x: &[f64]) -> Result<Self> {
        mf.check_inside(x)?;
        let m = mf.dim();
        let mj = MetricJets::compute(&BaseMetric(mf), x, 3)?;
        let riem = mj.riemann_jets();
        let nabla_riem = crate::engine::nabla_riemann_from(&mj);
        let fj = f.eval(&seed_vars(x, 3))?;
        let f_val = fj.val();
        Ok(BasePoint {
            m,
            x: x.to_vec(),
            g: mj.g,
            g_inv: mj.g_inv,
            gamma: mj.gamma,
            riem,
            nabla_riem,
            f: fj,
            f_val,
        })
    }

    pub fn g_val(&self, i: usize, j: usize) -> f64 {
        self.g[i * self.m + j].val()
    }

    pub fn g_vals(&self) -> Vec<f64> {
        self.g.iter().map(|j| j.val()).collect()
    }

    pub fn inner(&self, v: &[f64], w: &[f64]) -> f64 {
        let m = self.m;
        let mut s = 0.0;
        for i in 0..m {
            for j in 0..m {
                s += v[i] * self.g_val(i, j) * w[j];
            }
        }
        s
    }

    pub fn norm(&self, v: &[f64]) -> f64 {
        self.inner(v, v).max(0.0).sqrt()
    }

    pub fn gamma_val(&self, k: usize, i: usize, j: usize) -> f64 {
        self.gamma[(k * self.m + i) * self.m + j].val()
    }

    /// Gamma(v, w) values.
    pub fn gamma_apply(&self, v: &[f64], w: &[f64]) -> Vec<f64> {
        let m = self.m;
        (0..m)
            .map(|k| {
                let mut s = 0.0;
                for i in 0..m {
                    for j in 0..m {
                        s += self.gamma_val(k, i, j) * v[i] * w[j];
                    }
                }
                s
            })
            .collect()
    }

    pub fn riem_val(&self, l: usize, i: usize, j: usize, k: usize) -> f64 {
        self.riem[((l * self.m + i) * self.m + j) * self.m + k].val()
    }

    /// R(x, y) z values.
    pub fn r_apply(&self, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
        let m = self.m;
        (0..m)
            .map(|l| {
                let mut s = 0.0;
                for i in 0..m {
                    for j in 0..m {
                        for k in 0..m {
                            s += self.riem_val(l, i, j, k) * x[i] * y[j] * z[k];
                        }
                    }
                }
                s
            })
            .collect()
    }

    /// (nabla_d R)(x, y) z values.
    pub fn nabla_r_apply(&self, d: &[f64], x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
        let m = self.m;
        (0..m)
            .map(|l| {
                let mut s = 0.0;
                for c in 0..m {
                    for i in 0..m {
                        for j in 0..m {
                            for k in 0..m {
                                s += self.nabla_riem[(((c * m + l) * m + i) * m + j) * m + k]
                                    * d[c]
                                    * x[i]
                                    * y[j]
                                    * z[k];
                            }
                        }
                    }
                }
                s
            })
            .collect()
    }

    /// nabla_d (R(x, z) u~) with u~ parallel along d and x, z
    /// constant-component:
    /// (nabla_d R)(x,z)u + R(Gamma(d,x),z)u + R(x,Gamma(d,z))u.
    pub fn nabla_r_u_parallel(&self, d: &[f64], x: &[f64], z: &[f64], u: &[f64]) -> Vec<f64> {
        let mut out = self.nabla_r_apply(d, x, z, u);
        let gdx = self.gamma_apply(d, x);
        let gdz = self.gamma_apply(d, z);
        let t1 = self.r_apply(&gdx, z, u);
        let t2 = self.r_apply(x, &gdz, u);
        for l in 0..self.m {
            out[l] += t1[l] + t2[l];
        }
        out
    }

    pub fn df(&self, c: usize) -> f64 {
        self.f.grad(c)
    }

    /// df contracted with a vector: X(f).
    pub fn x_of_f(&self, x: &[f64]) -> f64 {
        (0..self.m).map(|c| self.df(c) * x[c]).sum()
    }

    /// grad f = G^{-1} df values.
    pub fn grad_f(&self) -> Vec<f64> {
        let m = self.m;
        (0..m)
            .map(|k| {
                let mut s = 0.0;
                for c in 0..m {
                    s += self.g_inv[k * m + c].val() * self.df(c);
                }
                s
            })
            .collect()
    }

    /// A_f(x, y) = (1/2f)(X(f) Y + Y(f) X - g(X,Y) grad f) values.
    pub fn a_f(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let m = self.m;
        let xf = self.x_of_f(x);
        let yf = self.x_of_f(y);
        let gxy = self.inner(x, y);
        let gf = self.grad_f();
        let c = 1.0 / (2.0 * self.f_val);
        (0..m)
            .map(|k| c * (xf * y[k] + yf * x[k] - gxy * gf[k]))
            .collect()
    }

    /// A_f(X, Y) as component jets (order 2) for constant-component X, Y;
    /// the field that covariant derivatives of A_f differentiate.
    pub fn a_f_field(&self, x: &[f64], y: &[f64]) -> Result<Vec<Jet>> {
        let m = self.m;
        let f_inv = self.f.recip()?;
        // X(f), Y(f), g(X,Y) as jets of the base point.
        let mut xf = Jet::constant(m, 3, 0.0);
        let mut yf = Jet::constant(m, 3, 0.0);
        for c in 0..m {
            xf = xf.add(&self.f.deriv(c).scale(x[c]));
            yf = yf.add(&self.f.deriv(c).scale(y[c]));
        }
        let mut gxy = Jet::constant(m, 3, 0.0);
        for i in 0..m {
            for j in 0..m {
                gxy = gxy.add(&self.g[i * m + j].scale(x[i] * y[j]));
            }
        }
        // grad f jets
        let mut gradf = Vec::with_capacity(m);
        for k in 0..m {
            let mut s = Jet::constant(m, 3, 0.0);
            for c in 0..m {
                s = s.add(&self.g_inv[k * m + c].mul(&self.f.deriv(c)));
            }
            gradf.push(s);
        }
        let half = f_inv.scale(0.5);
        let mut out = Vec::with_capacity(m);
        for k in 0..m {
            let t = xf
                .scale(y[k])
                .add(&yf.scale(x[k]))
                .sub(&gxy.mul(&gradf[k]));
            out.push(half.mul(&t));
        }
        Ok(out)
    }

    /// Gamma(X, Y) as component jets (order 2) for constant-component X, Y.
    pub fn gamma_field(&self, x: &[f64], y: &[f64]) -> Vec<Jet> {
        let m = self.m;
        (0..m)
            .map(|k| {
                let mut s = Jet::constant(m, 2, 0.0);
                for i in 0..m {
                    for j in 0..m {
                        s = s.add(&self.gamma[(k * m + i) * m + j].scale(x[i] * y[j]));
                    }
                }
                s
            })
            .collect()
    }

    /// Covariant derivative values of a component-jet field along `d`:
    /// (nabla_d V)^k = d^c d_c V^k + Gamma^k_{cb} d^c V^b.
    pub fn cov_deriv_field(&self, d: &[f64], field: &[Jet]) -> Vec<f64> {
        let m = self.m;
        (0..m)
            .map(|k| {
                let mut s = 0.0;
                for c in 0..m {
                    s += d[c] * field[k].grad(c);
                    for b in 0..m {
                        s += self.gamma_val(k, c, b) * d[c] * field[b].val();
                    }
                }
                s
            })
            .collect()
    }

    /// Base scalar curvature S = g^{jk} R^i_{ijk}.
    pub fn scalar(&self) -> f64 {
        let m = self.m;
        let mut s = 0.0;
        for j in 0..m {
            for k in 0..m {
                let mut ric = 0.0;
                for i in 0..m {
                    ric += self.riem_val(i, i, j, k);
                }
                s += self.g_inv[j * m + k].val() * ric;
            }
        }
        s
    }

    /// g-orthonormal frame at the point, seeded with the coordinate basis
    /// (or with `first` as the leading vector, for the adapted frames).
    pub fn orthonormal_frame(&self, first: Option<&[f64]>) -> Result<Vec<Vec<f64>>> {
        let m = self.m;
        let mut candidates: Vec<Vec<f64>> = Vec::new();
        if let Some(v) = first {
            candidates.push(v.to_vec());
        }
        for i in 0..m {
            let mut e = vec![0.0; m];
            e[i] = 1.0;
            candidates.push(e);
        }
        let g = self.g_vals();
        // Greedy Gram-Schmidt keeping the first m independent candidates.
        let mut frame: Vec<Vec<f64>> = Vec::new();
        for cand in candidates {
            if frame.len() == m {
                break;
            }
            let mut w = cand;
            for e in &frame {
                let c = linalg::quad_form(m, &g, &w, e);
                linalg::axpy(-c, e, &mut w);
            }
            let n2 = linalg::quad_form(m, &g, &w, &w);
            if n2 > 1e-20 {
                let n = n2.sqrt();
                for c in w.iter_mut() {
                    *c /= n;
                }
                frame.push(w);
            }
        }
        if frame.len() != m {
            return Err(crate::error::GeomError::DegenerateInput(
                "could not complete an orthonormal frame".into(),
            ));
        }
        Ok(frame)
    }
}
