//! Assembly of the rescaled Sasaki and Cheeger-Gromoll metrics on TM in
//! induced coordinates, plus the horizontal/vertical lift calculus and
//! the oracle-side evaluation of lifted fields.
//!
//! Induced coordinates are ordered (x_1..x_m, u_1..u_m). With
//! `N^a_i = Gamma^a_{ib}(x) u^b` the lifts of a base vector X are
//! `X^h = (X, -N X)` and `X^v = (0, X)`, and the assembled matrix has the
//! block form
//!
//! ```text
//! [ f G + N^T V N    N^T V ]        V = G                (Sasaki)
//! [ V N              V     ]        V = (G + Gu Gu^T)/a  (Cheeger-Gromoll)
//! ```
//!
//! which pairs lifts as f g(X,Y) / 0 / V(X,Y). All blocks are evaluated
//! jointly in (x, u) jets so the oracle can differentiate through the
//! assembly.

use crate::engine::{self, MetricFn, MetricJets};
use crate::error::Result;
use crate::jet::Jet;
use crate::linalg;
use crate::manifold::{ChartedManifold, ScalingField, TangentPoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricVariant {
    Sasaki,
    CheegerGromoll,
}

impl MetricVariant {
    pub fn name(self) -> &'static str {
        match self {
            MetricVariant::Sasaki => "sasaki",
            MetricVariant::CheegerGromoll => "cg",
        }
    }
}

/// A base vector paired with the kind of lift it enters a formula with.
#[derive(Clone, Debug)]
pub enum Lift {
    Horizontal(Vec<f64>),
    Vertical(Vec<f64>),
}

impl Lift {
    pub fn base(&self) -> &[f64] {
        match self {
            Lift::Horizontal(v) | Lift::Vertical(v) => v,
        }
    }

    pub fn is_horizontal(&self) -> bool {
        matches!(self, Lift::Horizontal(_))
    }
}

/// Horizontal/vertical components of a tangent vector of TM at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftDecomposition {
    pub hor: Vec<f64>,
    pub ver: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct BundleMetric {
    pub variant: MetricVariant,
    pub base: ChartedManifold,
    pub f: ScalingField,
}

impl BundleMetric {
    pub fn assemble(variant: MetricVariant, base: ChartedManifold, f: ScalingField) -> Self {
        BundleMetric { variant, base, f }
    }

    pub fn base_dim(&self) -> usize {
        self.base.dim()
    }

    /// Component jets of the 2m x 2m matrix in (x, u) variables, carrying
    /// at least `order` derivative orders. The variables are seeded one
    /// order higher because the base Christoffel symbols inside N consume
    /// one derivative of G; `order` is capped at 2 for that reason.
    pub fn component_jets(&self, tp: &TangentPoint, order: u8) -> Result<Vec<Jet>> {
        assert!(order <= 2, "bundle component jets carry at most 2 orders");
        self.base.check_inside(&tp.x)?;
        let m = self.base.dim();
        let n = 2 * m;
        let seed = order + 1;
        let x_vars: Vec<Jet> = (0..m)
            .map(|i| Jet::variable(n, seed, tp.x[i], i))
            .collect();
        let u_vars: Vec<Jet> = (0..m)
            .map(|i| Jet::variable(n, seed, tp.u[i], m + i))
            .collect();

        let g = self.base.metric_jets(&x_vars)?;
        let f = self.f.eval(&x_vars)?;

        // Base Christoffel symbols as jets in the 2m-variable space.
        let g_inv = linalg::invert_jets(m, &g)?;
        let mut dg = Vec::with_capacity(m * m * m);
        for c in 0..m {
            for i in 0..m {
                for j in 0..m {
                    dg.push(g[i * m + j].deriv(c));
                }
            }
        }
        let dgi = |c: usize, i: usize, j: usize| &dg[(c * m + i) * m + j];
        let mut gamma = Vec::with_capacity(m * m * m);
        for k in 0..m {
            for i in 0..m {
                for j in 0..m {
                    let mut acc: Option<Jet> = None;
                    for l in 0..m {
                        let term = dgi(i, j, l).add(dgi(j, i, l)).sub(dgi(l, i, j));
                        let t = g_inv[k * m + l].mul(&term);
                        acc = Some(match acc {
                            None => t,
                            Some(a) => a.add(&t),
                        });
                    }
                    gamma.push(acc.unwrap().scale(0.5));
                }
            }
        }

        // N^a_i = Gamma^a_{ib} u^b
        let mut nmat = Vec::with_capacity(m * m);
        for a in 0..m {
            for i in 0..m {
                let mut acc = Jet::constant(n, 3, 0.0);
                for b in 0..m {
                    acc = acc.add(&gamma[(a * m + i) * m + b].mul(&u_vars[b]));
                }
                nmat.push(acc);
            }
        }

        // Vertical block V.
        let v = match self.variant {
            MetricVariant::Sasaki => g.clone(),
            MetricVariant::CheegerGromoll => {
                let mut gu = Vec::with_capacity(m);
                for a in 0..m {
                    let mut acc = Jet::constant(n, 3, 0.0);
                    for b in 0..m {
                        acc = acc.add(&g[a * m + b].mul(&u_vars[b]));
                    }
                    gu.push(acc);
                }
                let mut r2 = Jet::constant(n, 3, 0.0);
                for a in 0..m {
                    r2 = r2.add(&gu[a].mul(&u_vars[a]));
                }
                let alpha = r2.add_scalar(1.0);
                let inv_alpha = alpha.recip()?;
                let mut v = Vec::with_capacity(m * m);
                for a in 0..m {
                    for b in 0..m {
                        v.push(g[a * m + b].add(&gu[a].mul(&gu[b])).mul(&inv_alpha));
                    }
                }
                v
            }
        };

        // V N and N^T V N.
        let mut vn = Vec::with_capacity(m * m);
        for a in 0..m {
            for i in 0..m {
                let mut acc = Jet::constant(n, 3, 0.0);
                for b in 0..m {
                    acc = acc.add(&v[a * m + b].mul(&nmat[b * m + i]));
                }
                vn.push(acc);
            }
        }
        let mut ntvn = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                let mut acc = Jet::constant(n, 3, 0.0);
                for a in 0..m {
                    acc = acc.add(&nmat[a * m + i].mul(&vn[a * m + j]));
                }
                ntvn.push(acc);
            }
        }

        let mut out = vec![Jet::constant(n, seed, 0.0); n * n];
        for i in 0..m {
            for j in 0..m {
                // [xx] block
                out[i * n + j] = f.mul(&g[i * m + j]).add(&ntvn[i * m + j]);
                // [xu] and [ux] blocks: (N^T V)_{i a} = (V N)_{a i}
                out[i * n + (m + j)] = vn[j * m + i].clone();
                out[(m + i) * n + j] = vn[i * m + j].clone();
                // [uu] block
                out[(m + i) * n + (m + j)] = v[i * m + j].clone();
            }
        }
        Ok(out)
    }

    /// Matrix of values at a tangent point.
    pub fn matrix_at(&self, tp: &TangentPoint) -> Result<Vec<f64>> {
        Ok(self
            .component_jets(tp, 1)?
            .iter()
            .map(|j| j.val())
            .collect())
    }

    /// The connection coefficients N^a_i = Gamma^a_{ib} u^b as jets in
    /// (x, u); `out[a*m + i]`.
    pub fn n_jets(&self, tp: &TangentPoint, order: u8) -> Result<Vec<Jet>> {
        self.base.check_inside(&tp.x)?;
        let m = self.base.dim();
        let n = 2 * m;
        let x_vars: Vec<Jet> = (0..m)
            .map(|i| Jet::variable(n, order + 1, tp.x[i], i))
            .collect();
        let u_vars: Vec<Jet> = (0..m)
            .map(|i| Jet::variable(n, order + 1, tp.u[i], m + i))
            .collect();
        let g = self.base.metric_jets(&x_vars)?;
        let g_inv = linalg::invert_jets(m, &g)?;
        let mut nmat = Vec::with_capacity(m * m);
        for a in 0..m {
            for i in 0..m {
                let mut acc = Jet::constant(n, 3, 0.0);
                for b in 0..m {
                    // Gamma^a_{ib} assembled inline from jet derivatives.
                    let mut gamma_aib: Option<Jet> = None;
                    for l in 0..m {
                        let term = g[b * m + l]
                            .deriv(i)
                            .add(&g[i * m + l].deriv(b))
                            .sub(&g[i * m + b].deriv(l));
                        let t = g_inv[a * m + l].mul(&term);
                        gamma_aib = Some(match gamma_aib {
                            None => t,
                            Some(acc) => acc.add(&t),
                        });
                    }
                    acc = acc.add(&gamma_aib.unwrap().scale(0.5).mul(&u_vars[b]));
                }
                nmat.push(acc);
            }
        }
        Ok(nmat)
    }

    fn n_values(&self, tp: &TangentPoint) -> Result<Vec<f64>> {
        Ok(self.n_jets(tp, 0)?.iter().map(|j| j.val()).collect())
    }

    /// Coordinate components of the lift field at `tp`.
    pub fn lift_coords(&self, tp: &TangentPoint, lift: &Lift) -> Result<Vec<f64>> {
        match lift {
            Lift::Horizontal(x) => horizontal_lift(&self.base, tp, x),
            Lift::Vertical(x) => Ok(vertical_lift(self.base.dim(), x)),
        }
    }

    /// Pairing of two lifts under the assembled metric.
    pub fn pair(&self, tp: &TangentPoint, a: &Lift, b: &Lift) -> Result<f64> {
        let g = self.matrix_at(tp)?;
        let va = self.lift_coords(tp, a)?;
        let vb = self.lift_coords(tp, b)?;
        Ok(linalg::quad_form(2 * self.base.dim(), &g, &va, &vb))
    }
}

impl MetricFn for BundleMetric {
    fn dim(&self) -> usize {
        2 * self.base.dim()
    }

    fn metric_jets(&self, y: &[f64], order: u8) -> Result<Vec<Jet>> {
        let m = self.base.dim();
        let tp = TangentPoint::new(y[..m].to_vec(), y[m..].to_vec());
        self.component_jets(&tp, order)
    }
}

/// X^h = (X, -N X) at a tangent point.
pub fn horizontal_lift(base: &ChartedManifold, tp: &TangentPoint, x: &[f64]) -> Result<Vec<f64>> {
    base.check_inside(&tp.x)?;
    let m = base.dim();
    let mj = MetricJets::compute(&engine::BaseMetric(base), &tp.x, 1)?;
    let gamma = mj.christoffel();
    let mut out = vec![0.0; 2 * m];
    out[..m].copy_from_slice(x);
    for a in 0..m {
        let mut s = 0.0;
        for i in 0..m {
            for b in 0..m {
                s += gamma.get(a, i, b) * tp.u[b] * x[i];
            }
        }
        out[m + a] = -s;
    }
    Ok(out)
}

/// X^v = (0, X).
pub fn vertical_lift(m: usize, x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; 2 * m];
    out[m..].copy_from_slice(x);
    out
}

/// The canonical vertical field U = u^v at (p, u).
pub fn canonical_u(tp: &TangentPoint) -> Vec<f64> {
    vertical_lift(tp.x.len(), &tp.u)
}

/// Split a coordinate vector Z on TM into horizontal and vertical parts:
/// hor = Z_x, ver = Z_u + N Z_x.
pub fn decompose(bm: &BundleMetric, tp: &TangentPoint, z: &[f64]) -> Result<LiftDecomposition> {
    let m = bm.base_dim();
    let nvals = bm.n_values(tp)?;
    let hor = z[..m].to_vec();
    let mut ver = z[m..].to_vec();
    for a in 0..m {
        for i in 0..m {
            ver[a] += nvals[a * m + i] * z[i];
        }
    }
    Ok(LiftDecomposition { hor, ver })
}

/// Inverse of [`decompose`].
pub fn recompose(bm: &BundleMetric, tp: &TangentPoint, d: &LiftDecomposition) -> Result<Vec<f64>> {
    let m = bm.base_dim();
    let nvals = bm.n_values(tp)?;
    let mut out = vec![0.0; 2 * m];
    out[..m].copy_from_slice(&d.hor);
    for a in 0..m {
        let mut s = d.ver[a];
        for i in 0..m {
            s -= nvals[a * m + i] * d.hor[i];
        }
        out[m + a] = s;
    }
    Ok(out)
}

/// Oracle covariant derivative of one lift field along another, as a 2m
/// coordinate vector: (nabla_A B)^K = A^I d_I B^K + Gamma^K_{IJ} A^I B^J.
///
/// Lift fields come from constant-component base vectors: a vertical lift
/// has constant components, a horizontal lift has fiber components
/// -N^a_b(x, u) X^b whose derivatives come from the N jets.
pub fn oracle_connection(
    bm: &BundleMetric,
    tp: &TangentPoint,
    a: &Lift,
    b: &Lift,
) -> Result<Vec<f64>> {
    let m = bm.base_dim();
    let n = 2 * m;
    let mj = MetricJets::compute(bm, &point_coords(tp), 1)?;
    let gamma = mj.christoffel();
    let av = bm.lift_coords(tp, a)?;
    let bv = bm.lift_coords(tp, b)?;

    let mut out = vec![0.0; n];
    // Directional derivative of B's components along A.
    if let Lift::Horizontal(xb) = b {
        let njets = bm.n_jets(tp, 1)?;
        for c in 0..m {
            // fiber component m+c of B is -sum_b N^c_b X^b
            let mut dd = 0.0;
            for i in 0..n {
                let mut dn = 0.0;
                for bidx in 0..m {
                    dn += njets[c * m + bidx].grad(i) * xb[bidx];
                }
                dd += av[i] * (-dn);
            }
            out[m + c] = dd;
        }
    }
    for k in 0..n {
        let mut s = out[k];
        for i in 0..n {
            for j in 0..n {
                s += gamma.get(k, i, j) * av[i] * bv[j];
            }
        }
        out[k] = s;
    }
    Ok(out)
}

/// Oracle curvature R(A, B) C of the assembled metric, contracted with
/// the pointwise lift coordinates (tensorial, so extensions do not
/// matter).
pub fn oracle_curvature(
    bm: &BundleMetric,
    tp: &TangentPoint,
    a: &Lift,
    b: &Lift,
    c: &Lift,
) -> Result<Vec<f64>> {
    let mj = MetricJets::compute(bm, &point_coords(tp), 2)?;
    let riem = mj.riemann();
    let av = bm.lift_coords(tp, a)?;
    let bv = bm.lift_coords(tp, b)?;
    let cv = bm.lift_coords(tp, c)?;
    Ok(riem.apply(&av, &bv, &cv))
}

/// Commutator [X^h, Y^h] of two horizontal lift fields of
/// constant-component base vectors, as a 2m coordinate vector.
pub fn bracket_hh(bm: &BundleMetric, tp: &TangentPoint, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    let m = bm.base_dim();
    let n = 2 * m;
    let njets = bm.n_jets(tp, 1)?;
    let xv = bm.lift_coords(tp, &Lift::Horizontal(x.to_vec()))?;
    let yv = bm.lift_coords(tp, &Lift::Horizontal(y.to_vec()))?;
    let mut out = vec![0.0; n];
    for c in 0..m {
        let mut s = 0.0;
        for i in 0..n {
            let mut dn_y = 0.0;
            let mut dn_x = 0.0;
            for b in 0..m {
                dn_y += njets[c * m + b].grad(i) * y[b];
                dn_x += njets[c * m + b].grad(i) * x[b];
            }
            s += xv[i] * (-dn_y) - yv[i] * (-dn_x);
        }
        out[m + c] = s;
    }
    Ok(out)
}

pub fn point_coords(tp: &TangentPoint) -> Vec<f64> {
    let mut y = tp.x.clone();
    y.extend_from_slice(&tp.u);
    y
}

/// Directional derivative along a lift of the scalar function
/// (x, u) -> pairing of two constant-component lifts under the bundle
/// metric. Used by the Koszul-relation checks.
pub fn pairing_directional_deriv(
    bm: &BundleMetric,
    tp: &TangentPoint,
    dir: &Lift,
    b: &Lift,
    c: &Lift,
) -> Result<f64> {
    let m = bm.base_dim();
    let n = 2 * m;
    let comp = bm.component_jets(tp, 1)?;
    let njets = if b.is_horizontal() || c.is_horizontal() {
        Some(bm.n_jets(tp, 1)?)
    } else {
        None
    };
    let dirv = bm.lift_coords(tp, dir)?;
    let bv = bm.lift_coords(tp, b)?;
    let cv = bm.lift_coords(tp, c)?;

    // d_I [ B^J(x,u) g_{JK}(x,u) C^K(x,u) ] contracted with dir^I.
    let mut total = 0.0;
    for i in 0..n {
        let mut s = 0.0;
        // metric term
        for jj in 0..n {
            for kk in 0..n {
                s += comp[jj * n + kk].grad(i) * bv[jj] * cv[kk];
            }
        }
        // component terms for horizontal lifts
        if let (Lift::Horizontal(xb), Some(nj)) = (b, njets.as_ref()) {
            for cfib in 0..m {
                let mut dn = 0.0;
                for bb in 0..m {
                    dn += nj[cfib * m + bb].grad(i) * xb[bb];
                }
                for kk in 0..n {
                    s += (-dn) * comp[(m + cfib) * n + kk].val() * cv[kk];
                }
            }
        }
        if let (Lift::Horizontal(xc), Some(nj)) = (c, njets.as_ref()) {
            for cfib in 0..m {
                let mut dn = 0.0;
                for bb in 0..m {
                    dn += nj[cfib * m + bb].grad(i) * xc[bb];
                }
                for jj in 0..n {
                    s += bv[jj] * comp[jj * n + (m + cfib)].val() * (-dn);
                }
            }
        }
        total += dirv[i] * s;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::GeomError;
    use crate::manifold::catalog;

    fn sphere() -> ChartedManifold {
        catalog("sphere_stereo", &[1.0]).unwrap()
    }

    #[test]
    fn sasaki_euclidean_unit_f_is_identity() {
        let eu = catalog("euclidean", &[2.0]).unwrap();
        let bm = BundleMetric::assemble(MetricVariant::Sasaki, eu, ScalingField::one());
        let tp = TangentPoint::new(vec![0.3, -0.2], vec![0.7, 0.1]);
        let g = bm.matrix_at(&tp).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((g[i * 4 + j] - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn sasaki_sphere_at_origin() {
        let bm = BundleMetric::assemble(MetricVariant::Sasaki, sphere(), ScalingField::one());
        let tp = TangentPoint::new(vec![0.0, 0.0], vec![1.0, 0.0]);
        let g = bm.matrix_at(&tp).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { 4.0 } else { 0.0 };
                assert!((g[i * 4 + j] - expect).abs() < 1e-14, "({i},{j}) = {}", g[i * 4 + j]);
            }
        }
    }

    #[test]
    fn cg_sphere_uu_block_at_origin() {
        let bm =
            BundleMetric::assemble(MetricVariant::CheegerGromoll, sphere(), ScalingField::one());
        let tp = TangentPoint::new(vec![0.0, 0.0], vec![1.0, 0.0]);
        let g = bm.matrix_at(&tp).unwrap();
        // alpha = 5, Gu = (4, 0): [uu] = [[4, 0], [0, 4/5]]
        assert!((g[2 * 4 + 2] - 4.0).abs() < 1e-14);
        assert!((g[3 * 4 + 3] - 0.8).abs() < 1e-14);
        assert!(g[2 * 4 + 3].abs() < 1e-15);
    }

    #[test]
    fn lifts_on_flat_and_critical_points() {
        let eu = catalog("euclidean", &[2.0]).unwrap();
        let tp = TangentPoint::new(vec![0.1, 0.1], vec![0.5, -0.5]);
        let h = horizontal_lift(&eu, &tp, &[1.0, 2.0]).unwrap();
        assert_eq!(h, vec![1.0, 2.0, 0.0, 0.0]);

        let sp = sphere();
        let tp0 = TangentPoint::new(vec![0.0, 0.0], vec![0.9, 0.4]);
        let h = horizontal_lift(&sp, &tp0, &[1.0, 2.0]).unwrap();
        assert!(linalg::norm_inf(&h[2..]) < 1e-15);

        assert_eq!(vertical_lift(2, &[3.0, 4.0]), vec![0.0, 0.0, 3.0, 4.0]);
    }

    #[test]
    fn decompose_recompose_round_trip() {
        let bm = BundleMetric::assemble(MetricVariant::Sasaki, sphere(), ScalingField::one());
        let tp = TangentPoint::new(vec![0.2, -0.3], vec![0.8, 0.5]);

        let xh = bm
            .lift_coords(&tp, &Lift::Horizontal(vec![1.5, -0.4]))
            .unwrap();
        let d = decompose(&bm, &tp, &xh).unwrap();
        assert!((d.hor[0] - 1.5).abs() < 1e-15 && (d.hor[1] + 0.4).abs() < 1e-15);
        assert!(linalg::norm_inf(&d.ver) < 1e-15);

        let xv = bm.lift_coords(&tp, &Lift::Vertical(vec![0.3, 0.9])).unwrap();
        let d = decompose(&bm, &tp, &xv).unwrap();
        assert!(linalg::norm_inf(&d.hor) < 1e-15);
        assert!((d.ver[0] - 0.3).abs() < 1e-15 && (d.ver[1] - 0.9).abs() < 1e-15);

        let z = vec![0.4, -1.2, 0.33, 0.8];
        let rt = recompose(&bm, &tp, &decompose(&bm, &tp, &z).unwrap()).unwrap();
        for i in 0..4 {
            assert!((rt[i] - z[i]).abs() <= 1e-14);
        }
    }

    #[test]
    fn canonical_u_pairings() {
        let zero = TangentPoint::new(vec![0.1, 0.1], vec![0.0, 0.0]);
        assert_eq!(canonical_u(&zero), vec![0.0, 0.0, 0.0, 0.0]);

        let f = ScalingField::from_str("exp(x1)", 2).unwrap();
        let sas = BundleMetric::assemble(MetricVariant::Sasaki, sphere(), f.clone());
        let cg = BundleMetric::assemble(MetricVariant::CheegerGromoll, sphere(), f);
        let tp = TangentPoint::new(vec![0.21, -0.14], vec![0.6, -0.3]);
        let x = vec![0.7, 0.33];

        // g~(X^v, U) = g(X, u); for Sasaki g^(U, U) = r^2.
        let gu_pair = cg.pair(&tp, &Lift::Vertical(x.clone()), &Lift::Vertical(tp.u.clone()));
        let gxu = crate::manifold::inner(&cg.base, &tp.x, &x, &tp.u).unwrap();
        assert!((gu_pair.unwrap() - gxu).abs() < 1e-12);

        let fs = crate::manifold::norm_r(&sas.base, &tp).unwrap();
        let uu = sas
            .pair(&tp, &Lift::Vertical(tp.u.clone()), &Lift::Vertical(tp.u.clone()))
            .unwrap();
        assert!((uu - fs.r * fs.r).abs() < 1e-12);
    }

    #[test]
    fn submersion_and_orthogonality_invariants() {
        let f = ScalingField::from_str("1 + 0.5*x1^2", 2).unwrap();
        for variant in [MetricVariant::Sasaki, MetricVariant::CheegerGromoll] {
            let bm = BundleMetric::assemble(variant, sphere(), f.clone());
            let tp = TangentPoint::new(vec![0.18, 0.07], vec![-0.42, 0.91]);
            let x = vec![1.1, -0.2];
            let y = vec![0.3, 0.77];
            let fg = bm.f.eval(&crate::manifold::seed_vars(&tp.x, 0)).unwrap().val()
                * crate::manifold::inner(&bm.base, &tp.x, &x, &y).unwrap();
            let hh = bm
                .pair(&tp, &Lift::Horizontal(x.clone()), &Lift::Horizontal(y.clone()))
                .unwrap();
            assert!((hh - fg).abs() < 1e-12, "{variant:?}");
            let hv = bm
                .pair(&tp, &Lift::Horizontal(x.clone()), &Lift::Vertical(y.clone()))
                .unwrap();
            assert!(hv.abs() < 1e-12, "{variant:?}");
        }
    }

    #[test]
    fn cg_equals_sasaki_at_zero_section() {
        let f = ScalingField::from_str("exp(x2)", 2).unwrap();
        let sas = BundleMetric::assemble(MetricVariant::Sasaki, sphere(), f.clone());
        let cg = BundleMetric::assemble(MetricVariant::CheegerGromoll, sphere(), f);
        let tp = TangentPoint::new(vec![0.3, 0.11], vec![0.0, 0.0]);
        let a = sas.matrix_at(&tp).unwrap();
        let b = cg.matrix_at(&tp).unwrap();
        for i in 0..16 {
            assert!((a[i] - b[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn assembled_matrices_are_spd() {
        let f = ScalingField::from_str("exp(x1)", 2).unwrap();
        for variant in [MetricVariant::Sasaki, MetricVariant::CheegerGromoll] {
            let bm = BundleMetric::assemble(variant, sphere(), f.clone());
            for s in 0..20 {
                let t = s as f64 / 20.0;
                let tp = TangentPoint::new(
                    vec![0.4 * t - 0.2, 0.3 - 0.5 * t],
                    vec![2.0 * t - 1.0, 1.0 - 1.7 * t],
                );
                let g = bm.matrix_at(&tp).unwrap();
                assert!(linalg::is_spd(4, &g), "{variant:?} sample {s}");
            }
        }
    }

    #[test]
    fn nonpositive_scaling_rejected() {
        let f = ScalingField::from_str("x1", 2).unwrap();
        let bm = BundleMetric::assemble(MetricVariant::Sasaki, sphere(), f);
        let tp = TangentPoint::new(vec![-0.2, 0.0], vec![0.1, 0.1]);
        assert!(matches!(
            bm.matrix_at(&tp),
            Err(GeomError::NonPositiveScaling)
        ));
    }

    #[test]
    fn bracket_identity_vertical_part() {
        // vertical part of [X^h, Y^h] equals -(R(X,Y)u)^v
        let bm = BundleMetric::assemble(MetricVariant::Sasaki, sphere(), ScalingField::one());
        let tp = TangentPoint::new(vec![0.25, -0.1], vec![0.4, 0.9]);
        let x = vec![1.0, 0.3];
        let y = vec![-0.2, 1.1];
        let br = bracket_hh(&bm, &tp, &x, &y).unwrap();
        let d = decompose(&bm, &tp, &br).unwrap();
        assert!(linalg::norm_inf(&d.hor) < 1e-12);

        let mj = MetricJets::compute(&engine::BaseMetric(&bm.base), &tp.x, 2).unwrap();
        let riem = mj.riemann();
        let rxyu = riem.apply(&x, &y, &tp.u);
        for a in 0..2 {
            assert!((d.ver[a] + rxyu[a]).abs() < 1e-7, "{} vs {}", d.ver[a], -rxyu[a]);
        }
    }
}
