//! Closed-form connection, curvature, sectional and scalar curvature of
//! the rescaled Sasaki metric, evaluated from base-manifold data only.
//!
//! Input vectors are constant-component fields in the chart, matching the
//! convention of the oracle-side lift fields: brackets of inputs vanish
//! and `nabla_X Y = Gamma(X, Y)`. Derivative-bearing intermediates (the
//! endomorphism u -> R(u,Y)Z along a horizontal direction, the A_f and
//! Gamma fields) are differentiated with the fiber vector parallel, which
//! is what the horizontal lift means geometrically.
//!
//! Two of the curvature patterns exist in two textual variants that
//! disagree in one vertical term; both are implemented and adjudicated
//! separately, never merged.

use crate::basecalc::BasePoint;
use crate::bundle::Lift;
use crate::error::Result;
use crate::jet::Jet;
use crate::linalg;
use crate::manifold::{ChartedManifold, ScalingField, TangentPoint};

/// A tangent vector of TM expressed as (horizontal part)^h + (vertical
/// part)^v at a tangent point.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameResult {
    pub hor: Vec<f64>,
    pub ver: Vec<f64>,
}

impl FrameResult {
    pub fn zero(m: usize) -> Self {
        FrameResult {
            hor: vec![0.0; m],
            ver: vec![0.0; m],
        }
    }

    pub fn neg(mut self) -> Self {
        for v in self.hor.iter_mut().chain(self.ver.iter_mut()) {
            *v = -*v;
        }
        self
    }
}

/// Which textual variant of an ambiguous formula to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reading {
    /// The version reconstructed from the derivation chain.
    Proof,
    /// The version exactly as displayed in the statement.
    Statement,
}

/// A_f(X, Y) = (1/2f)(X(f) Y + Y(f) X - g(X,Y) grad f).
pub fn a_f(
    mf: &ChartedManifold,
    f: &ScalingField,
    x: &[f64],
    xv: &[f64],
    yv: &[f64],
) -> Result<Vec<f64>> {
    let bp = BasePoint::new(mf, f, x)?;
    Ok(bp.a_f(xv, yv))
}

/// Rescaled Sasaki connection, all four lift patterns.
pub fn connection(
    mf: &ChartedManifold,
    f: &ScalingField,
    tp: &TangentPoint,
    a: &Lift,
    b: &Lift,
) -> Result<FrameResult> {
    let bp = BasePoint::new(mf, f, &tp.x)?;
    Ok(connection_at(&bp, &tp.u, a, b))
}

pub fn connection_at(bp: &BasePoint, u: &[f64], a: &Lift, b: &Lift) -> FrameResult {
    let m = bp.m;
    let inv2f = 1.0 / (2.0 * bp.f_val);
    match (a, b) {
        (Lift::Horizontal(x), Lift::Horizontal(y)) => {
            let mut hor = bp.gamma_apply(x, y);
            let af = bp.a_f(x, y);
            linalg::axpy(1.0, &af, &mut hor);
            let ver = linalg::scaled(-0.5, &bp.r_apply(x, y, u));
            FrameResult { hor, ver }
        }
        (Lift::Horizontal(x), Lift::Vertical(y)) => FrameResult {
            hor: linalg::scaled(inv2f, &bp.r_apply(u, y, x)),
            ver: bp.gamma_apply(x, y),
        },
        (Lift::Vertical(x), Lift::Horizontal(y)) => FrameResult {
            hor: linalg::scaled(inv2f, &bp.r_apply(u, x, y)),
            ver: vec![0.0; m],
        },
        (Lift::Vertical(_), Lift::Vertical(_)) => FrameResult::zero(m),
    }
}

/// Rescaled Sasaki curvature, all six slot patterns. Patterns with a
/// vertical first slot against a horizontal second slot are produced by
/// antisymmetry from the implemented ones.
pub fn curvature(
    mf: &ChartedManifold,
    f: &ScalingField,
    tp: &TangentPoint,
    a: &Lift,
    b: &Lift,
    c: &Lift,
    reading: Reading,
) -> Result<FrameResult> {
    let bp = BasePoint::new(mf, f, &tp.x)?;
    Ok(curvature_at(&bp, &tp.u, a, b, c, reading))
}

pub fn curvature_at(
    bp: &BasePoint,
    u: &[f64],
    a: &Lift,
    b: &Lift,
    c: &Lift,
    reading: Reading,
) -> FrameResult {
    use Lift::{Horizontal as H, Vertical as V};
    match (a, b, c) {
        (V(_), V(_), V(_)) => FrameResult::zero(bp.m),
        (H(x), V(y), V(z)) => hvv(bp, u, x, y, z),
        (V(x), H(y), V(z)) => hvv(bp, u, y, x, z).neg(),
        (V(x), V(y), H(z)) => vvh(bp, u, x, y, z),
        (H(x), V(y), H(z)) => hvh(bp, u, x, y, z, reading),
        (V(x), H(y), H(z)) => hvh(bp, u, y, x, z, reading).neg(),
        (H(x), H(y), V(z)) => hhv(bp, u, x, y, z, reading),
        (H(x), H(y), H(z)) => hhh(bp, u, x, y, z),
    }
}

/// R^(X^h, Y^v) Z^v = (-1/2f R(Y,Z)X - 1/4f^2 R(u,Y)(R(u,Z)X))^h.
fn hvv(bp: &BasePoint, u: &[f64], x: &[f64], y: &[f64], z: &[f64]) -> FrameResult {
    let f = bp.f_val;
    let mut hor = linalg::scaled(-1.0 / (2.0 * f), &bp.r_apply(y, z, x));
    let inner = bp.r_apply(u, z, x);
    linalg::axpy(-1.0 / (4.0 * f * f), &bp.r_apply(u, y, &inner), &mut hor);
    FrameResult {
        hor,
        ver: vec![0.0; bp.m],
    }
}

/// R^(X^v, Y^v) Z^h: antisymmetrized double-curvature horizontal part.
fn vvh(bp: &BasePoint, u: &[f64], x: &[f64], y: &[f64], z: &[f64]) -> FrameResult {
    let f = bp.f_val;
    let c2 = 1.0 / (2.0 * f);
    let c4 = 1.0 / (4.0 * f * f);
    let mut hor = linalg::scaled(-c2, &bp.r_apply(y, x, z));
    let ruxz = bp.r_apply(u, x, z);
    let ruyz = bp.r_apply(u, y, z);
    linalg::axpy(-c4, &bp.r_apply(u, y, &ruxz), &mut hor);
    linalg::axpy(c2, &bp.r_apply(x, y, z), &mut hor);
    linalg::axpy(c4, &bp.r_apply(u, x, &ruyz), &mut hor);
    FrameResult {
        hor,
        ver: vec![0.0; bp.m],
    }
}

/// nabla_X ((1/2f) R(u~, Y) Z) with u~ parallel and X, Y, Z
/// constant-component:
/// X(1/2f) R(u,Y)Z + (1/2f)[(nabla_X R)(u,Y)Z + R(u,Gamma(X,Y))Z + R(u,Y)Gamma(X,Z)].
fn nabla_half_r(bp: &BasePoint, u: &[f64], x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
    let f = bp.f_val;
    let xf = bp.x_of_f(x);
    let mut out = linalg::scaled(-xf / (2.0 * f * f), &bp.r_apply(u, y, z));
    let mut inner = bp.nabla_r_apply(x, u, y, z);
    let gxy = bp.gamma_apply(x, y);
    let gxz = bp.gamma_apply(x, z);
    linalg::axpy(1.0, &bp.r_apply(u, &gxy, z), &mut inner);
    linalg::axpy(1.0, &bp.r_apply(u, y, &gxz), &mut inner);
    linalg::axpy(1.0 / (2.0 * f), &inner, &mut out);
    out
}

/// R^(X^h, Y^v) Z^h. The two readings differ in the very last vertical
/// term: (1/2) R(X,Z)Y from the derivation, (1/2) R(X,Z)u as displayed.
fn hvh(
    bp: &BasePoint,
    u: &[f64],
    x: &[f64],
    y: &[f64],
    z: &[f64],
    reading: Reading,
) -> FrameResult {
    let f = bp.f_val;
    let c2 = 1.0 / (2.0 * f);
    let w = bp.r_apply(u, y, z); // R(u,Y)Z

    let mut hor = nabla_half_r(bp, u, x, y, z);
    linalg::axpy(c2, &bp.a_f(x, &w), &mut hor);
    let mut s = bp.gamma_apply(x, z);
    linalg::axpy(1.0, &bp.a_f(x, z), &mut s);
    linalg::axpy(-c2, &bp.r_apply(u, y, &s), &mut hor);
    let gxy = bp.gamma_apply(x, y);
    linalg::axpy(-c2, &bp.r_apply(u, &gxy, z), &mut hor);

    let mut ver = linalg::scaled(1.0 / (4.0 * f), &bp.r_apply(&w, x, u));
    let last = match reading {
        Reading::Proof => bp.r_apply(x, z, y),
        Reading::Statement => bp.r_apply(x, z, u),
    };
    linalg::axpy(0.5, &last, &mut ver);
    FrameResult { hor, ver }
}

/// R^(X^h, Y^h) Z^v, assembled as the first-Bianchi difference of two
/// mixed-pattern evaluations.
fn hhv(
    bp: &BasePoint,
    u: &[f64],
    x: &[f64],
    y: &[f64],
    z: &[f64],
    reading: Reading,
) -> FrameResult {
    let a = hvh(bp, u, x, z, y, reading);
    let b = hvh(bp, u, y, z, x, reading);
    FrameResult {
        hor: linalg::sub(&a.hor, &b.hor),
        ver: linalg::sub(&a.ver, &b.ver),
    }
}

/// R^(X^h, Y^h) Z^h.
fn hhh(bp: &BasePoint, u: &[f64], x: &[f64], y: &[f64], z: &[f64]) -> FrameResult {
    let f = bp.f_val;
    let m = bp.m;

    // S(A, B) = nabla_A B + A_f(A, B) as a component-jet field.
    let s_field = |a: &[f64], b: &[f64]| -> Vec<Jet> {
        let gam = bp.gamma_field(a, b);
        let af = bp.a_f_field(a, b).expect("f positive at base point");
        (0..m).map(|k| gam[k].add(&af[k])).collect()
    };
    let syz = s_field(y, z);
    let sxz = s_field(x, z);
    let syz_val: Vec<f64> = syz.iter().map(|j| j.val()).collect();
    let sxz_val: Vec<f64> = sxz.iter().map(|j| j.val()).collect();

    let mut hor = bp.cov_deriv_field(x, &syz);
    linalg::axpy(1.0, &bp.a_f(x, &syz_val), &mut hor);
    linalg::axpy(-1.0, &bp.cov_deriv_field(y, &sxz), &mut hor);
    linalg::axpy(-1.0, &bp.a_f(y, &sxz_val), &mut hor);

    let rxyu = bp.r_apply(x, y, u);
    let rxzu = bp.r_apply(x, z, u);
    let ryzu = bp.r_apply(y, z, u);
    linalg::axpy(1.0 / (2.0 * f), &bp.r_apply(u, &rxyu, z), &mut hor);
    linalg::axpy(1.0 / (4.0 * f), &bp.r_apply(u, &rxzu, y), &mut hor);
    linalg::axpy(-1.0 / (4.0 * f), &bp.r_apply(u, &ryzu, x), &mut hor);

    let mut ver = linalg::scaled(-0.5, &bp.r_apply(x, &syz_val, u));
    linalg::axpy(0.5, &bp.r_apply(y, &sxz_val, u), &mut ver);
    linalg::axpy(0.5, &bp.nabla_r_u_parallel(y, x, z, u), &mut ver);
    linalg::axpy(-0.5, &bp.nabla_r_u_parallel(x, y, z, u), &mut ver);
    FrameResult { hor, ver }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SectionalPattern {
    Hh,
    Hv,
    Vv,
}

impl SectionalPattern {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "hh" => Some(SectionalPattern::Hh),
            "hv" => Some(SectionalPattern::Hv),
            "vv" => Some(SectionalPattern::Vv),
            _ => None,
        }
    }
}

/// Sectional-curvature closed forms for the three plane patterns;
/// X, Y must be g-orthonormal at the base point.
pub fn sectional(
    mf: &ChartedManifold,
    f: &ScalingField,
    tp: &TangentPoint,
    x: &[f64],
    y: &[f64],
    pattern: SectionalPattern,
) -> Result<f64> {
    let bp = BasePoint::new(mf, f, &tp.x)?;
    Ok(sectional_at(&bp, &tp.u, x, y, pattern))
}

pub fn sectional_at(
    bp: &BasePoint,
    u: &[f64],
    x: &[f64],
    y: &[f64],
    pattern: SectionalPattern,
) -> f64 {
    let f = bp.f_val;
    match pattern {
        SectionalPattern::Vv => 0.0,
        SectionalPattern::Hv => {
            let w = bp.r_apply(u, y, x);
            bp.inner(&w, &w) / (4.0 * f * f)
        }
        SectionalPattern::Hh => {
            let rxyy = bp.r_apply(x, y, y);
            let k = bp.inner(&rxyy, x);
            let rxyu = bp.r_apply(x, y, u);
            k / f - 3.0 / (4.0 * f * f) * bp.inner(&rxyu, &rxyu) + l_f(bp, x, y)
        }
    }
}

/// The correction form L_f displayed under the sectional-curvature
/// proposition, evaluated exactly as printed (the bracket term vanishes
/// for constant-component inputs).
pub fn l_f(bp: &BasePoint, x: &[f64], y: &[f64]) -> f64 {
    let m = bp.m;
    let afyy = bp.a_f_field(y, y).expect("f positive");
    let afxy = bp.a_f_field(x, y).expect("f positive");
    let d1 = bp.cov_deriv_field(x, &afyy);
    let d2 = bp.cov_deriv_field(y, &afxy);
    let first = bp.inner(&linalg::sub(&d1, &d2), x);

    let mut syy = bp.gamma_apply(y, y);
    let afyy_val: Vec<f64> = (0..m).map(|k| afyy[k].val()).collect();
    linalg::axpy(1.0, &afyy_val, &mut syy);
    let second = bp.inner(&bp.a_f(x, &syy), x);

    let mut sxy = bp.gamma_apply(x, y);
    let afxy_val: Vec<f64> = (0..m).map(|k| afxy[k].val()).collect();
    linalg::axpy(1.0, &afxy_val, &mut sxy);
    let third = bp.inner(&bp.a_f(y, &sxy), x);

    (first - second - third) / bp.f_val
}

/// Scalar-curvature closed form: (1/f) S - (1/4f^2) sum |R(e_i,e_j)u|^2
/// + sum L_f(e_i, e_j) over a g-orthonormal frame.
pub fn scalar(mf: &ChartedManifold, f: &ScalingField, tp: &TangentPoint) -> Result<f64> {
    let bp = BasePoint::new(mf, f, &tp.x)?;
    let frame = bp.orthonormal_frame(None)?;
    Ok(scalar_at(&bp, &tp.u, &frame))
}

pub fn scalar_at(bp: &BasePoint, u: &[f64], frame: &[Vec<f64>]) -> f64 {
    let f = bp.f_val;
    let s = bp.scalar();
    let mut rsum = 0.0;
    let mut lsum = 0.0;
    for ei in frame {
        for ej in frame {
            let r = bp.r_apply(ei, ej, u);
            rsum += bp.inner(&r, &r);
            lsum += l_f(bp, ei, ej);
        }
    }
    s / f - rsum / (4.0 * f * f) + lsum
}

/// The same scalar quantity assembled as the frame sum of the sectional
/// closed forms (hh + 2 hv + vv over all frame pairs); an internal
/// consistency route that never reads the base scalar curvature.
pub fn scalar_frame_sum(bp: &BasePoint, u: &[f64], frame: &[Vec<f64>]) -> f64 {
    let f = bp.f_val;
    let mut total = 0.0;
    for ei in frame {
        for ej in frame {
            // hh formula evaluated directly (for i = j every curvature
            // term vanishes but the L_f term is kept, matching the
            // printed double sum).
            let rxyy = bp.r_apply(ei, ej, ej);
            let k = bp.inner(&rxyy, ei);
            let rxyu = bp.r_apply(ei, ej, u);
            total += k / f - 3.0 / (4.0 * f * f) * bp.inner(&rxyu, &rxyu) + l_f(bp, ei, ej);
            // two hv planes per (i, j)
            let w = bp.r_apply(u, ej, ei);
            total += 2.0 * bp.inner(&w, &w) / (4.0 * f * f);
            // vv planes contribute zero
        }
    }
    total
}

/// Max absolute oracle curvature component of the assembled Sasaki metric
/// over a set of sample points; the flatness probe.
pub struct FlatnessReport {
    pub max_component: f64,
    pub worst_sample: Option<TangentPoint>,
    pub worst_index: (usize, usize, usize, usize),
}

pub fn flatness_probe(
    mf: &ChartedManifold,
    f: &ScalingField,
    samples: &[TangentPoint],
) -> Result<FlatnessReport> {
    let bm = crate::bundle::BundleMetric::assemble(
        crate::bundle::MetricVariant::Sasaki,
        mf.clone(),
        f.clone(),
    );
    let n = 2 * mf.dim();
    let mut report = FlatnessReport {
        max_component: 0.0,
        worst_sample: None,
        worst_index: (0, 0, 0, 0),
    };
    for tp in samples {
        let mj = crate::engine::MetricJets::compute(&bm, &crate::bundle::point_coords(tp), 2)?;
        let riem = mj.riemann();
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let v = riem.get(l, i, j, k).abs();
                        if v > report.max_component {
                            report.max_component = v;
                            report.worst_sample = Some(tp.clone());
                            report.worst_index = (l, i, j, k);
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

/// hh sectional curvature along the ray u <- t u for each t in the grid;
/// demonstrates how the |R(X,Y)u|^2 term dominates for large fibers.
pub fn sectional_sweep(
    mf: &ChartedManifold,
    f: &ScalingField,
    tp: &TangentPoint,
    x: &[f64],
    y: &[f64],
    t_grid: &[f64],
) -> Result<Vec<f64>> {
    let bp = BasePoint::new(mf, f, &tp.x)?;
    Ok(t_grid
        .iter()
        .map(|t| {
            let ut: Vec<f64> = tp.u.iter().map(|c| c * t).collect();
            sectional_at(&bp, &ut, x, y, SectionalPattern::Hh)
        })
        .collect())
}
