//! Generic coordinate Riemannian calculus at any dimension: Christoffel
//! symbols, the Riemann tensor, sectional and scalar curvature, covariant
//! derivatives and the geodesic right-hand side.
//!
//! Everything is computed from jet derivatives of the metric components,
//! never finite differences. Applied to the assembled 2m x 2m bundle
//! metric this module is the independent oracle the closed-form formulas
//! are judged against.
//!
//! Index conventions, fixed once for the whole crate:
//!
//! * `Christoffel.gamma[k][i][j] = Gamma^k_{ij}` (symmetric in i, j).
//! * `RiemannTensor.r[l][i][j][k] = R^l_{ijk}`, the `l`-component of
//!   `R(e_i, e_j) e_k` with `R(X,Y)Z = [nabla_X, nabla_Y] Z - nabla_[X,Y] Z`.
//! * Lowered tensor `R_{lijk} = g_{ls} R^s_{ijk}`; sectional curvature of
//!   span{v, w} is `g(R(v,w)w, v) / (|v|^2 |w|^2 - g(v,w)^2)`.

use crate::error::{GeomError, Result};
use crate::jet::Jet;
use crate::linalg;

/// A metric presented as jet-evaluable components; the common interface
/// between base manifolds and assembled bundle metrics.
pub trait MetricFn {
    fn dim(&self) -> usize;
    /// Row-major n*n component jets at `y`, carrying `order` derivative
    /// orders of the raw components.
    fn metric_jets(&self, y: &[f64], order: u8) -> Result<Vec<Jet>>;
}

/// View of a charted manifold as a [`MetricFn`] over its base coordinates.
pub struct BaseMetric<'a>(pub &'a crate::manifold::ChartedManifold);

impl MetricFn for BaseMetric<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn metric_jets(&self, y: &[f64], order: u8) -> Result<Vec<Jet>> {
        self.0.check_inside(y)?;
        self.0.metric_jets(&crate::manifold::seed_vars(y, order))
    }
}

#[derive(Clone, Debug)]
pub struct Christoffel {
    pub n: usize,
    /// gamma[(k*n + i)*n + j] = Gamma^k_{ij}.
    pub gamma: Vec<f64>,
}

impl Christoffel {
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.gamma[(k * self.n + i) * self.n + j]
    }

    /// Gamma(v, w)^k.
    pub fn apply(&self, v: &[f64], w: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|k| {
                let mut s = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        s += self.get(k, i, j) * v[i] * w[j];
                    }
                }
                s
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct RiemannTensor {
    pub n: usize,
    /// r[((l*n + i)*n + j)*n + k] = R^l_{ijk}.
    pub r: Vec<f64>,
}

impl RiemannTensor {
    pub fn get(&self, l: usize, i: usize, j: usize, k: usize) -> f64 {
        self.r[((l * self.n + i) * self.n + j) * self.n + k]
    }

    /// R(x, y) z as a vector.
    pub fn apply(&self, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n];
        for l in 0..n {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        s += self.get(l, i, j, k) * x[i] * y[j] * z[k];
                    }
                }
            }
            out[l] = s;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        linalg::norm_inf(&self.r)
    }
}

/// Jet-level point data for a metric: components, inverse and Christoffel
/// symbols, each one derivative order shallower than its source.
pub struct MetricJets {
    pub n: usize,
    pub g: Vec<Jet>,
    pub g_inv: Vec<Jet>,
    /// gamma[(k*n+i)*n+j] as jets (one order below the metric jets).
    pub gamma: Vec<Jet>,
}

impl MetricJets {
    pub fn compute(mf: &dyn MetricFn, y: &[f64], order: u8) -> Result<Self> {
        let n = mf.dim();
        let g = mf.metric_jets(y, order)?;
        Self::from_component_jets(n, g)
    }

    /// Build from already-evaluated component jets (the bundle assembly
    /// uses this to share its jets).
    pub fn from_component_jets(n: usize, g: Vec<Jet>) -> Result<Self> {
        let g_inv = linalg::invert_jets(n, &g)?;
        // dg[(c*n+i)*n+j] = d_c g_{ij}
        let mut dg = Vec::with_capacity(n * n * n);
        for c in 0..n {
            for i in 0..n {
                for j in 0..n {
                    dg.push(g[i * n + j].deriv(c));
                }
            }
        }
        let idx = |c: usize, i: usize, j: usize| (c * n + i) * n + j;
        // Computed for i <= j and mirrored, so torsion symmetry is exact
        // by construction (bit-equal, not just within rounding).
        let mut gamma = vec![Jet::constant(g[0].nvars(), 0, 0.0); n * n * n];
        for k in 0..n {
            for i in 0..n {
                for j in i..n {
                    // Gamma^k_{ij} = 1/2 g^{kl} (d_i g_{jl} + d_j g_{il} - d_l g_{ij})
                    let mut acc: Option<Jet> = None;
                    for l in 0..n {
                        let term = dg[idx(i, j, l)]
                            .add(&dg[idx(j, i, l)])
                            .sub(&dg[idx(l, i, j)]);
                        let t = g_inv[k * n + l].mul(&term);
                        acc = Some(match acc {
                            None => t,
                            Some(a) => a.add(&t),
                        });
                    }
                    let value = acc.unwrap().scale(0.5);
                    gamma[(k * n + i) * n + j] = value.clone();
                    gamma[(k * n + j) * n + i] = value;
                }
            }
        }
        Ok(MetricJets { n, g, g_inv, gamma })
    }

    pub fn g_vals(&self) -> Vec<f64> {
        self.g.iter().map(|j| j.val()).collect()
    }

    pub fn g_inv_vals(&self) -> Vec<f64> {
        self.g_inv.iter().map(|j| j.val()).collect()
    }

    pub fn christoffel(&self) -> Christoffel {
        Christoffel {
            n: self.n,
            gamma: self.gamma.iter().map(|j| j.val()).collect(),
        }
    }

    /// Riemann tensor values. Requires gamma jets of order >= 1, i.e.
    /// metric jets of order >= 2.
    pub fn riemann(&self) -> RiemannTensor {
        let n = self.n;
        let gm = |k: usize, i: usize, j: usize| &self.gamma[(k * n + i) * n + j];
        let mut r = vec![0.0; n * n * n * n];
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let mut s = gm(l, j, k).grad(i) - gm(l, i, k).grad(j);
                        for a in 0..n {
                            s += gm(l, i, a).val() * gm(a, j, k).val()
                                - gm(l, j, a).val() * gm(a, i, k).val();
                        }
                        r[((l * n + i) * n + j) * n + k] = s;
                    }
                }
            }
        }
        RiemannTensor { n, r }
    }

    /// Riemann tensor as jets (base-manifold use; costs one more metric
    /// order than `riemann`).
    pub fn riemann_jets(&self) -> Vec<Jet> {
        let n = self.n;
        let gm = |k: usize, i: usize, j: usize| &self.gamma[(k * n + i) * n + j];
        let mut r = Vec::with_capacity(n * n * n * n);
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let mut s = gm(l, j, k).deriv(i).sub(&gm(l, i, k).deriv(j));
                        for a in 0..n {
                            s = s
                                .add(&gm(l, i, a).mul(gm(a, j, k)))
                                .sub(&gm(l, j, a).mul(gm(a, i, k)));
                        }
                        r.push(s);
                    }
                }
            }
        }
        r
    }
}

pub fn christoffel(mf: &dyn MetricFn, y: &[f64]) -> Result<Christoffel> {
    Ok(MetricJets::compute(mf, y, 1)?.christoffel())
}

pub fn riemann(mf: &dyn MetricFn, y: &[f64]) -> Result<RiemannTensor> {
    Ok(MetricJets::compute(mf, y, 2)?.riemann())
}

pub const PLANE_THRESHOLD: f64 = 1e-12;

/// Sectional curvature of span{v, w} at `y`.
pub fn sectional(mf: &dyn MetricFn, y: &[f64], v: &[f64], w: &[f64]) -> Result<f64> {
    let mj = MetricJets::compute(mf, y, 2)?;
    let g = mj.g_vals();
    let riem = mj.riemann();
    sectional_from(&g, &riem, v, w)
}

pub fn sectional_from(g: &[f64], riem: &RiemannTensor, v: &[f64], w: &[f64]) -> Result<f64> {
    let n = riem.n;
    let vv = linalg::quad_form(n, g, v, v);
    let ww = linalg::quad_form(n, g, w, w);
    let vw = linalg::quad_form(n, g, v, w);
    let denom = vv * ww - vw * vw;
    if denom <= PLANE_THRESHOLD {
        return Err(GeomError::DegeneratePlane);
    }
    let rvww = riem.apply(v, w, w);
    Ok(linalg::quad_form(n, g, &rvww, v) / denom)
}

/// Scalar curvature: g^{jk} Ric_{jk} with Ric_{jk} = R^i_{ijk}.
pub fn scalar(mf: &dyn MetricFn, y: &[f64]) -> Result<f64> {
    let mj = MetricJets::compute(mf, y, 2)?;
    let riem = mj.riemann();
    let g_inv = mj.g_inv_vals();
    let n = mj.n;
    let mut s = 0.0;
    for j in 0..n {
        for k in 0..n {
            let mut ric = 0.0;
            for i in 0..n {
                ric += riem.get(i, i, j, k);
            }
            s += g_inv[j * n + k] * ric;
        }
    }
    Ok(s)
}

/// A vector field given by jet-evaluable components.
pub trait VectorField {
    fn eval_jets(&self, y: &[f64], order: u8) -> Result<Vec<Jet>>;
}

impl<F> VectorField for F
where
    F: Fn(&[f64], u8) -> Result<Vec<Jet>>,
{
    fn eval_jets(&self, y: &[f64], order: u8) -> Result<Vec<Jet>> {
        self(y, order)
    }
}

/// Covariant derivative matrix of a vector field:
/// out[i*n + k] = (nabla_i V)^k = d_i V^k + Gamma^k_{ij} V^j.
pub fn covariant_deriv_field(
    mf: &dyn MetricFn,
    y: &[f64],
    field: &dyn VectorField,
) -> Result<Vec<f64>> {
    let n = mf.dim();
    let gamma = christoffel(mf, y)?;
    let v = field.eval_jets(y, 1)?;
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let mut s = v[k].grad(i);
            for j in 0..n {
                s += gamma.get(k, i, j) * v[j].val();
            }
            out[i * n + k] = s;
        }
    }
    Ok(out)
}

/// Position, velocity and acceleration of a curve at one parameter value.
#[derive(Clone, Debug)]
pub struct CurveJet {
    pub x: Vec<f64>,
    pub xdot: Vec<f64>,
    pub xddot: Vec<f64>,
}

/// Curve acceleration (nabla_{x'} x')^k = x''^k + Gamma^k_{ij} x'^i x'^j.
pub fn curve_accel(mf: &dyn MetricFn, curve: &CurveJet) -> Result<Vec<f64>> {
    let gamma = christoffel(mf, &curve.x)?;
    Ok(linalg::add(&curve.xddot, &gamma.apply(&curve.xdot, &curve.xdot)))
}

/// First-order geodesic system: returns (ydot, vdot) with
/// vdot^k = -Gamma^k_{ij} v^i v^j.
pub fn geodesic_rhs(mf: &dyn MetricFn, y: &[f64], v: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let gamma = christoffel(mf, y)?;
    let acc = gamma.apply(v, v);
    Ok((v.to_vec(), linalg::scaled(-1.0, &acc)))
}

/// Covariant derivative of the Riemann tensor:
/// out[(((c*n+l)*n+i)*n+j)*n+k] = (nabla_c R)^l_{ijk}.
pub fn nabla_riemann(mf: &dyn MetricFn, y: &[f64]) -> Result<Vec<f64>> {
    let mj = MetricJets::compute(mf, y, 3)?;
    Ok(nabla_riemann_from(&mj))
}

pub fn nabla_riemann_from(mj: &MetricJets) -> Vec<f64> {
    let n = mj.n;
    let rj = mj.riemann_jets();
    let r = |l: usize, i: usize, j: usize, k: usize| &rj[((l * n + i) * n + j) * n + k];
    let gm = |k: usize, i: usize, j: usize| mj.gamma[(k * n + i) * n + j].val();
    let mut out = vec![0.0; n * n * n * n * n];
    for c in 0..n {
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let mut s = r(l, i, j, k).grad(c);
                        for a in 0..n {
                            s += gm(l, c, a) * r(a, i, j, k).val();
                            s -= gm(a, c, i) * r(l, a, j, k).val();
                            s -= gm(a, c, j) * r(l, i, a, k).val();
                            s -= gm(a, c, k) * r(l, i, j, a).val();
                        }
                        out[(((c * n + l) * n + i) * n + j) * n + k] = s;
                    }
                }
            }
        }
    }
    out
}

/// Max residual of metric compatibility
/// d_i g_{jk} - Gamma^l_{ij} g_{lk} - Gamma^l_{ik} g_{jl} at a point.
pub fn metric_compatibility_residual(mj: &MetricJets) -> f64 {
    let n = mj.n;
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut s = mj.g[j * n + k].grad(i);
                for l in 0..n {
                    s -= mj.gamma[(l * n + i) * n + j].val() * mj.g[l * n + k].val();
                    s -= mj.gamma[(l * n + i) * n + k].val() * mj.g[j * n + l].val();
                }
                worst = worst.max(s.abs());
            }
        }
    }
    worst
}

/// Max residual of the first Bianchi identity
/// R^l_{ijk} + R^l_{jki} + R^l_{kij}.
pub fn first_bianchi_residual(riem: &RiemannTensor) -> f64 {
    let n = riem.n;
    let mut worst = 0.0_f64;
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let s = riem.get(l, i, j, k) + riem.get(l, j, k, i) + riem.get(l, k, i, j);
                    worst = worst.max(s.abs());
                }
            }
        }
    }
    worst
}

/// Max residual of pair symmetry R_{lijk} = R_{jkli} for the lowered
/// tensor R_{lijk} = g_{ls} R^s_{ijk} (pairs (l,i) and (j,k)).
pub fn pair_symmetry_residual(g: &[f64], riem: &RiemannTensor) -> f64 {
    let n = riem.n;
    let low = |l: usize, i: usize, j: usize, k: usize| -> f64 {
        let mut s = 0.0;
        for a in 0..n {
            s += g[l * n + a] * riem.get(a, i, j, k);
        }
        s
    };
    let mut worst = 0.0_f64;
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    // lowered convention: R(e_l, e_i, e_j, e_k) = g(R(e_l,e_i)e_k, e_j)?
                    // We compare g(R(e_i,e_j)e_k, e_l) with g(R(e_k,e_l)e_j, e_i).
                    let a = low(l, i, j, k);
                    let b = low(j, k, l, i);
                    worst = worst.max((a - b).abs());
                }
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::catalog;

    #[test]
    fn euclidean_is_flat() {
        let eu = catalog("euclidean", &[2.0]).unwrap();
        let mf = BaseMetric(&eu);
        let gamma = christoffel(&mf, &[0.3, -0.2]).unwrap();
        assert!(linalg::norm_inf(&gamma.gamma) == 0.0);
        let riem = riemann(&mf, &[0.3, -0.2]).unwrap();
        assert_eq!(riem.max_abs(), 0.0);
        assert_eq!(scalar(&mf, &[0.3, -0.2]).unwrap(), 0.0);
    }

    #[test]
    fn sphere_christoffel_structure() {
        let sp = catalog("sphere_stereo", &[1.0]).unwrap();
        let mf = BaseMetric(&sp);
        // Conformal factor has a critical point at the origin.
        let g0 = christoffel(&mf, &[0.0, 0.0]).unwrap();
        assert!(linalg::norm_inf(&g0.gamma) < 1e-15);
        let g1 = christoffel(&mf, &[0.2, 0.0]).unwrap();
        assert!(linalg::norm_inf(&g1.gamma) > 0.0);
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    assert_eq!(g1.get(k, i, j), g1.get(k, j, i));
                }
            }
        }
    }

    #[test]
    fn sphere_sectional_curvature_is_one() {
        let sp = catalog("sphere_stereo", &[1.0]).unwrap();
        let mf = BaseMetric(&sp);
        for &x in &[[0.0, 0.0], [0.2, -0.1], [0.4, 0.4], [-0.3, 0.25]] {
            let k = sectional(&mf, &x, &[1.0, 0.0], &[0.0, 1.0]).unwrap();
            assert!((k - 1.0).abs() < 1e-7, "K = {k} at {x:?}");
        }
    }

    #[test]
    fn space_form_scalar_curvature() {
        let hy = catalog("space_form", &[-1.0, 2.0]).unwrap();
        let mf = BaseMetric(&hy);
        let s = scalar(&mf, &[0.2, 0.1]).unwrap();
        assert!((s - (-2.0)).abs() < 1e-7, "S = {s}");
    }

    #[test]
    fn geodesic_rhs_examples() {
        let eu = catalog("euclidean", &[2.0]).unwrap();
        let mf = BaseMetric(&eu);
        let (dy, dv) = geodesic_rhs(&mf, &[0.1, 0.1], &[0.5, -0.2]).unwrap();
        assert_eq!(dy, vec![0.5, -0.2]);
        assert_eq!(dv, vec![0.0, 0.0]);

        let sp = catalog("sphere_stereo", &[1.0]).unwrap();
        let mf = BaseMetric(&sp);
        let (_, dv) = geodesic_rhs(&mf, &[0.0, 0.0], &[1.0, 0.0]).unwrap();
        assert!(linalg::norm_inf(&dv) < 1e-14);
    }

    #[test]
    fn curve_accel_straight_line_euclidean() {
        let eu = catalog("euclidean", &[2.0]).unwrap();
        let mf = BaseMetric(&eu);
        let c = CurveJet {
            x: vec![0.1, 0.2],
            xdot: vec![0.3, 0.4],
            xddot: vec![0.0, 0.0],
        };
        assert_eq!(curve_accel(&mf, &c).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn covariant_deriv_constant_field_euclidean() {
        let eu = catalog("euclidean", &[2.0]).unwrap();
        let mf = BaseMetric(&eu);
        let field = |y: &[f64], order: u8| -> Result<Vec<Jet>> {
            let n = y.len();
            Ok(vec![
                Jet::constant(n, order, 1.0),
                Jet::constant(n, order, -2.0),
            ])
        };
        let d = covariant_deriv_field(&mf, &[0.1, 0.1], &field).unwrap();
        assert!(linalg::norm_inf(&d) == 0.0);
    }

    #[test]
    fn covariant_deriv_finite_difference_cross_check() {
        // Analytic non-constant field on the sphere chart; the FD oracle
        // replaces the jet d_i V^k term.
        let sp = catalog("sphere_stereo", &[1.0]).unwrap();
        let mf = BaseMetric(&sp);
        let comp = |y: &[f64]| vec![y[1] * y[1], y[0] * y[1]];
        let field = move |y: &[f64], order: u8| -> Result<Vec<Jet>> {
            let n = y.len();
            let x0 = Jet::variable(n, order, y[0], 0);
            let x1 = Jet::variable(n, order, y[1], 1);
            Ok(vec![x1.mul(&x1), x0.mul(&x1)])
        };
        let x = [0.2, 0.0];
        let d = covariant_deriv_field(&mf, &x, &field).unwrap();
        let gamma = christoffel(&mf, &x).unwrap();
        let h = 1e-5;
        for i in 0..2 {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] += h;
            xm[i] -= h;
            let (vp, vm) = (comp(&xp), comp(&xm));
            for k in 0..2 {
                let fd = (vp[k] - vm[k]) / (2.0 * h);
                let mut expect = fd;
                for j in 0..2 {
                    expect += gamma.get(k, i, j) * comp(&x)[j];
                }
                assert!(
                    (d[i * 2 + k] - expect).abs() < 1e-5,
                    "slot ({i},{k}): {} vs {expect}",
                    d[i * 2 + k]
                );
            }
        }
    }

    #[test]
    fn curvature_invariants_on_catalog() {
        for (name, params) in [
            ("sphere_stereo", vec![1.0]),
            ("poincare_disk", vec![]),
            ("space_form", vec![0.7, 3.0]),
        ] {
            let man = catalog(name, &params).unwrap();
            let mf = BaseMetric(&man);
            let x: Vec<f64> = (0..man.dim()).map(|i| 0.07 * (i as f64 + 1.0)).collect();
            let mj = MetricJets::compute(&mf, &x, 2).unwrap();
            assert!(metric_compatibility_residual(&mj) < 1e-9, "{name}");
            let riem = mj.riemann();
            assert!(first_bianchi_residual(&riem) < 1e-8, "{name}");
            assert!(pair_symmetry_residual(&mj.g_vals(), &riem) < 1e-8, "{name}");
        }
    }

    #[test]
    fn nabla_riemann_vanishes_on_space_forms() {
        // Space forms have parallel curvature: nabla R = 0.
        let sp = catalog("sphere_stereo", &[1.0]).unwrap();
        let mf = BaseMetric(&sp);
        let nr = nabla_riemann(&mf, &[0.2, -0.1]).unwrap();
        assert!(linalg::norm_inf(&nr) < 1e-8, "max {}", linalg::norm_inf(&nr));
    }

    #[test]
    fn degenerate_plane_rejected() {
        let eu = catalog("euclidean", &[2.0]).unwrap();
        let mf = BaseMetric(&eu);
        assert!(matches!(
            sectional(&mf, &[0.0, 0.0], &[1.0, 0.0], &[2.0, 0.0]),
            Err(GeomError::DegeneratePlane)
        ));
    }
}
