//! Geodesic integration on (TM, g^f) and the residual checks for the
//! lift conditions: a base curve lifts to C^h = (x(s), x'(s)) and the
//! geodesic equations split into a horizontal condition (a) and a
//! vertical condition (b),
//!
//! ```text
//! (a)  nabla_{x'} x' + (1/f) R(y, nabla_{x'} y) x' + A_f(x', x') = 0
//! (b)  nabla_{x'} nabla_{x'} y = 0
//! ```
//!
//! with y = x' along the lift. Integration is fixed-step classic RK4 for
//! bitwise reproducibility of reports; the per-step energy g^f(T, T) is
//! recorded for the conservation checks.

use serde::Serialize;

use crate::basecalc::BasePoint;
use crate::bundle::BundleMetric;
use crate::engine::{self, BaseMetric, MetricFn, MetricJets};
use crate::error::{GeomError, Result};
use crate::linalg;
use crate::manifold::{ChartedManifold, ScalingField, TangentPoint};

#[derive(Clone, Debug, Serialize)]
pub struct BundleState {
    pub t: f64,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub xdot: Vec<f64>,
    pub udot: Vec<f64>,
    pub energy: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub h: f64,
    pub states: Vec<BundleState>,
}

impl Trajectory {
    /// Max relative energy drift against the initial energy.
    pub fn energy_drift(&self) -> f64 {
        let e0 = self.states[0].energy;
        self.states
            .iter()
            .map(|s| (s.energy - e0).abs())
            .fold(0.0_f64, f64::max)
            / e0.abs().max(1e-300)
    }

    pub fn to_csv(&self) -> String {
        let m = self.states[0].x.len();
        let mut out = String::from("t");
        for i in 1..=m {
            out.push_str(&format!(",x{i}"));
        }
        for i in 1..=m {
            out.push_str(&format!(",u{i}"));
        }
        for i in 1..=m {
            out.push_str(&format!(",xdot{i}"));
        }
        for i in 1..=m {
            out.push_str(&format!(",udot{i}"));
        }
        out.push_str(",energy\n");
        for s in &self.states {
            out.push_str(&format!("{}", s.t));
            for v in s.x.iter().chain(&s.u).chain(&s.xdot).chain(&s.udot) {
                out.push_str(&format!(",{v}"));
            }
            out.push_str(&format!(",{}\n", s.energy));
        }
        out
    }
}

fn rk4_step<F>(z: &[f64], h: f64, rhs: &F) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let n = z.len();
    let k1 = rhs(z)?;
    let mut tmp = vec![0.0; n];
    for i in 0..n {
        tmp[i] = z[i] + 0.5 * h * k1[i];
    }
    let k2 = rhs(&tmp)?;
    for i in 0..n {
        tmp[i] = z[i] + 0.5 * h * k2[i];
    }
    let k3 = rhs(&tmp)?;
    for i in 0..n {
        tmp[i] = z[i] + h * k3[i];
    }
    let k4 = rhs(&tmp)?;
    let mut out = vec![0.0; n];
    for i in 0..n {
        out[i] = z[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(out)
}

/// Integrate the geodesic system of the assembled bundle metric from the
/// given state with classic fixed-step RK4.
pub fn integrate(
    bm: &BundleMetric,
    s0: &BundleState,
    t_end: f64,
    h: f64,
) -> Result<Trajectory> {
    if h <= 0.0 || t_end <= 0.0 {
        return Err(GeomError::BadParams("step and horizon must be positive".into()));
    }
    let m = bm.base_dim();
    let rhs = |z: &[f64]| -> Result<Vec<f64>> {
        let (y, v) = z.split_at(2 * m);
        let (_, vdot) = engine::geodesic_rhs(bm, y, v)?;
        let mut out = Vec::with_capacity(4 * m);
        out.extend_from_slice(v);
        out.extend_from_slice(&vdot);
        Ok(out)
    };

    let mut z: Vec<f64> = s0
        .x
        .iter()
        .chain(&s0.u)
        .chain(&s0.xdot)
        .chain(&s0.udot)
        .copied()
        .collect();
    let steps = (t_end / h).round() as usize;
    let mut states = Vec::with_capacity(steps + 1);
    let mut t = s0.t;
    states.push(state_with_energy(bm, t, &z)?);
    for _ in 0..steps {
        z = rk4_step(&z, h, &rhs).map_err(|e| match e {
            GeomError::OutsideChart => GeomError::ChartExit(t),
            other => other,
        })?;
        if z.iter().any(|v| !v.is_finite()) {
            return Err(GeomError::NonFiniteState);
        }
        t += h;
        states.push(state_with_energy(bm, t, &z)?);
    }
    Ok(Trajectory { h, states })
}

fn state_with_energy(bm: &BundleMetric, t: f64, z: &[f64]) -> Result<BundleState> {
    let m = bm.base_dim();
    let (y, v) = z.split_at(2 * m);
    let tp = TangentPoint::new(y[..m].to_vec(), y[m..].to_vec());
    let g = bm.matrix_at(&tp)?;
    let energy = linalg::quad_form(2 * m, &g, v, v);
    Ok(BundleState {
        t,
        x: y[..m].to_vec(),
        u: y[m..].to_vec(),
        xdot: v[..m].to_vec(),
        udot: v[m..].to_vec(),
        energy,
    })
}

/// Base curves with exact jets up to third order, used to build lifts.
pub enum BaseCurve {
    /// x(t) = p0 + t v.
    Line { p0: Vec<f64>, v: Vec<f64> },
    /// x(t) = center + r (cos(w t) e_i + sin(w t) e_j).
    Circle {
        center: Vec<f64>,
        radius: f64,
        axes: (usize, usize),
        omega: f64,
    },
    /// A base geodesic integrated with RK4; jets at sample times come
    /// from the geodesic equation itself (x'' = -Gamma(x', x') and its
    /// derivative), so they are exact given the integrated state.
    Geodesic {
        manifold: ChartedManifold,
        states: Vec<(f64, Vec<f64>, Vec<f64>)>,
        h: f64,
    },
}

pub struct CurveJets {
    pub x: Vec<f64>,
    pub xdot: Vec<f64>,
    pub xddot: Vec<f64>,
    pub xdddot: Vec<f64>,
}

impl BaseCurve {
    /// Integrate a base geodesic from (x0, v0); stops early at the chart
    /// boundary, keeping the states collected so far.
    pub fn geodesic(
        mf: &ChartedManifold,
        x0: &[f64],
        v0: &[f64],
        t_end: f64,
        h: f64,
    ) -> Result<Self> {
        if h <= 0.0 || t_end <= 0.0 {
            return Err(GeomError::BadParams("step and horizon must be positive".into()));
        }
        let base = BaseMetric(mf);
        let m = mf.dim();
        let rhs = |z: &[f64]| -> Result<Vec<f64>> {
            let (y, v) = z.split_at(m);
            let (_, vdot) = engine::geodesic_rhs(&base, y, v)?;
            let mut out = Vec::with_capacity(2 * m);
            out.extend_from_slice(v);
            out.extend_from_slice(&vdot);
            Ok(out)
        };
        let mut z: Vec<f64> = x0.iter().chain(v0).copied().collect();
        let steps = (t_end / h).round() as usize;
        let mut states = vec![(0.0, x0.to_vec(), v0.to_vec())];
        let mut t = 0.0;
        for _ in 0..steps {
            match rk4_step(&z, h, &rhs) {
                Ok(next) => z = next,
                Err(GeomError::OutsideChart) => break,
                Err(e) => return Err(e),
            }
            t += h;
            states.push((t, z[..m].to_vec(), z[m..].to_vec()));
        }
        Ok(BaseCurve::Geodesic {
            manifold: mf.clone(),
            states,
            h,
        })
    }

    pub fn t_max(&self) -> f64 {
        match self {
            BaseCurve::Geodesic { states, .. } => states.last().map(|s| s.0).unwrap_or(0.0),
            _ => f64::INFINITY,
        }
    }

    /// Position and derivatives to third order at parameter t. For the
    /// integrated geodesic t snaps to the nearest stored step.
    pub fn jets(&self, t: f64) -> Result<CurveJets> {
        match self {
            BaseCurve::Line { p0, v } => Ok(CurveJets {
                x: p0.iter().zip(v).map(|(p, vi)| p + t * vi).collect(),
                xdot: v.clone(),
                xddot: vec![0.0; p0.len()],
                xdddot: vec![0.0; p0.len()],
            }),
            BaseCurve::Circle {
                center,
                radius,
                axes,
                omega,
            } => {
                let m = center.len();
                let (c, s) = ((omega * t).cos(), (omega * t).sin());
                let mut x = center.clone();
                let mut xdot = vec![0.0; m];
                let mut xddot = vec![0.0; m];
                let mut xdddot = vec![0.0; m];
                let (i, j) = *axes;
                x[i] += radius * c;
                x[j] += radius * s;
                xdot[i] = -radius * omega * s;
                xdot[j] = radius * omega * c;
                xddot[i] = -radius * omega * omega * c;
                xddot[j] = -radius * omega * omega * s;
                xdddot[i] = radius * omega * omega * omega * s;
                xdddot[j] = -radius * omega * omega * omega * c;
                Ok(CurveJets {
                    x,
                    xdot,
                    xddot,
                    xdddot,
                })
            }
            BaseCurve::Geodesic {
                manifold,
                states,
                h,
            } => {
                let idx = ((t / h).round() as usize).min(states.len() - 1);
                let (_, x, v) = &states[idx];
                let m = manifold.dim();
                let mj = MetricJets::compute(&BaseMetric(manifold), x, 2)?;
                let gamma = mj.christoffel();
                let xddot = linalg::scaled(-1.0, &gamma.apply(v, v));
                // third derivative from differentiating the geodesic ODE:
                // x'''^k = -dGamma^k_{ab,c} x'^c x'^a x'^b - 2 Gamma^k_{ab} x''^a x'^b
                let mut xdddot = vec![0.0; m];
                for k in 0..m {
                    let mut s = 0.0;
                    for a in 0..m {
                        for b in 0..m {
                            for c in 0..m {
                                s -= mj.gamma[(k * m + a) * m + b].grad(c) * v[c] * v[a] * v[b];
                            }
                            s -= 2.0 * gamma.get(k, a, b) * xddot[a] * v[b];
                        }
                    }
                    xdddot[k] = s;
                }
                Ok(CurveJets {
                    x: x.clone(),
                    xdot: v.clone(),
                    xddot,
                    xdddot,
                })
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LiftResidual {
    pub t: f64,
    /// ||nabla^_T T||_{g^f} along the lifted curve, from the oracle.
    pub oracle_accel: f64,
    /// Horizontal condition (a).
    pub res_a: f64,
    /// Vertical condition (b).
    pub res_b: f64,
}

/// Residuals of the geodesic conditions along the lift (x(s), x'(s)) of a
/// base curve.
pub fn lift_residual(
    bm: &BundleMetric,
    curve: &BaseCurve,
    t_samples: &[f64],
) -> Result<Vec<LiftResidual>> {
    let m = bm.base_dim();
    let mut out = Vec::with_capacity(t_samples.len());
    for &t in t_samples {
        let cj = curve.jets(t)?;
        let bp = BasePoint::new(&bm.base, &bm.f, &cj.x)?;

        // y = x', nabla_{x'} y = x'' + Gamma(x', x')
        let w = linalg::add(&cj.xddot, &bp.gamma_apply(&cj.xdot, &cj.xdot));

        // (a) nabla_{x'}x' + (1/f) R(y, nabla_{x'}y) x' + A_f(x', x')
        let mut a = w.clone();
        linalg::axpy(1.0 / bp.f_val, &bp.r_apply(&cj.xdot, &w, &cj.xdot), &mut a);
        linalg::axpy(1.0, &bp.a_f(&cj.xdot, &cj.xdot), &mut a);
        let res_a = bp.norm(&a);

        // (b) nabla_{x'} nabla_{x'} y with y = x':
        // Wdot + Gamma(x', W), Wdot = x''' + dGamma(x';x',x') + 2 Gamma(x'', x')
        let mut wdot = cj.xdddot.clone();
        for k in 0..m {
            let mut s = 0.0;
            for a_ in 0..m {
                for b_ in 0..m {
                    for c_ in 0..m {
                        s += bp.gamma[(k * m + a_) * m + b_].grad(c_)
                            * cj.xdot[c_]
                            * cj.xdot[a_]
                            * cj.xdot[b_];
                    }
                    s += 2.0 * bp.gamma_val(k, a_, b_) * cj.xddot[a_] * cj.xdot[b_];
                }
            }
            wdot[k] += s;
        }
        let b = linalg::add(&wdot, &bp.gamma_apply(&cj.xdot, &w));
        let res_b = bp.norm(&b);

        // oracle: curve acceleration of the lifted curve on TM
        let mut y2 = cj.x.clone();
        y2.extend_from_slice(&cj.xdot);
        let mut ydot = cj.xdot.clone();
        ydot.extend_from_slice(&cj.xddot);
        let mut yddot = cj.xddot.clone();
        yddot.extend_from_slice(&cj.xdddot);
        let accel = engine::curve_accel(
            bm,
            &engine::CurveJet {
                x: y2.clone(),
                xdot: ydot,
                xddot: yddot,
            },
        )?;
        let g = bm.metric_jets(&y2, 0)?;
        let gv: Vec<f64> = g.iter().map(|j| j.val()).collect();
        let oracle_accel = linalg::quad_form(2 * m, &gv, &accel, &accel).max(0.0).sqrt();

        out.push(LiftResidual {
            t,
            oracle_accel,
            res_a,
            res_b,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub enum ConstantSpeedReport {
    /// |y(t)| drifted beyond tolerance; the hypothesis of the check does
    /// not hold on this trajectory.
    NotApplicable { fiber_drift: f64 },
    /// max ||nabla_{x'}x' + A_f(x',x')|| over interior samples.
    Checked { fiber_drift: f64, max_residual: f64 },
}

/// Checks the constant-fiber-speed consequence: along a TM-geodesic with
/// |y(t)| constant, nabla_{x'}x' = -A_f(x', x').
pub fn constant_speed_check(bm: &BundleMetric, traj: &Trajectory) -> Result<ConstantSpeedReport> {
    let r0 = fiber_norm(bm, &traj.states[0])?;
    let mut drift = 0.0_f64;
    for s in &traj.states {
        drift = drift.max((fiber_norm(bm, s)? - r0).abs());
    }
    if drift > 1e-6 * (1.0 + r0) {
        return Ok(ConstantSpeedReport::NotApplicable { fiber_drift: drift });
    }
    let mut max_residual = 0.0_f64;
    for s in interior_samples(traj, 10) {
        let bp = BasePoint::new(&bm.base, &bm.f, &s.x)?;
        let xddot = base_accel_from_state(bm, s)?;
        let mut res = linalg::add(&xddot, &bp.gamma_apply(&s.xdot, &s.xdot));
        linalg::axpy(1.0, &bp.a_f(&s.xdot, &s.xdot), &mut res);
        max_residual = max_residual.max(bp.norm(&res));
    }
    Ok(ConstantSpeedReport::Checked {
        fiber_drift: drift,
        max_residual,
    })
}

fn fiber_norm(bm: &BundleMetric, s: &BundleState) -> Result<f64> {
    crate::manifold::norm_r(&bm.base, &TangentPoint::new(s.x.clone(), s.u.clone())).map(|fs| fs.r)
}

fn interior_samples(traj: &Trajectory, count: usize) -> Vec<&BundleState> {
    let n = traj.states.len();
    if n <= 2 {
        return Vec::new();
    }
    (1..=count)
        .map(|i| &traj.states[(i * (n - 2) / (count + 1)).max(1)])
        .collect()
}

/// Second derivative of the base projection x(t) along an integrated
/// bundle trajectory, read off the geodesic right-hand side.
fn base_accel_from_state(bm: &BundleMetric, s: &BundleState) -> Result<Vec<f64>> {
    let m = bm.base_dim();
    let mut y = s.x.clone();
    y.extend_from_slice(&s.u);
    let mut v = s.xdot.clone();
    v.extend_from_slice(&s.udot);
    let (_, vdot) = engine::geodesic_rhs(bm, &y, &v)?;
    Ok(vdot[..m].to_vec())
}

#[derive(Clone, Debug, Serialize)]
pub struct TwoGeodesicReport {
    pub grad_f_norm: f64,
    pub max_residual_a_first: f64,
    pub max_residual_a_second: f64,
}

/// Integrates two base geodesics from p with independent initial vectors
/// and reports the horizontal lift residual of each together with
/// |grad f(p)|; the numbers behind the non-liftability statement.
pub fn two_geodesic_probe(
    mf: &ChartedManifold,
    f: &ScalingField,
    p: &[f64],
    v1: &[f64],
    v2: &[f64],
) -> Result<TwoGeodesicReport> {
    let g11 = crate::manifold::inner(mf, p, v1, v1)?;
    let g22 = crate::manifold::inner(mf, p, v2, v2)?;
    let g12 = crate::manifold::inner(mf, p, v1, v2)?;
    if g11 * g22 - g12 * g12 < 1e-10 {
        return Err(GeomError::ParallelVectors);
    }
    let bm = BundleMetric::assemble(crate::bundle::MetricVariant::Sasaki, mf.clone(), f.clone());
    let bp = BasePoint::new(mf, f, p)?;
    let gf = bp.grad_f();
    let grad_f_norm = bp.norm(&gf);

    let mut max_res = [0.0_f64; 2];
    for (slot, v0) in [v1, v2].into_iter().enumerate() {
        let curve = BaseCurve::geodesic(mf, p, v0, 0.5, 1e-3)?;
        let tmax = curve.t_max();
        let samples: Vec<f64> = (1..=8).map(|i| tmax * i as f64 / 9.0).collect();
        for r in lift_residual(&bm, &curve, &samples)? {
            max_res[slot] = max_res[slot].max(r.res_a);
        }
    }
    Ok(TwoGeodesicReport {
        grad_f_norm,
        max_residual_a_first: max_res[0],
        max_residual_a_second: max_res[1],
    })
}

/// Curve-acceleration residual of the base projection of a TM-geodesic:
/// max ||x'' + Gamma(x', x')||_g over interior samples.
pub fn submersion_check(bm: &BundleMetric, traj: &Trajectory) -> Result<f64> {
    let mut worst = 0.0_f64;
    for s in interior_samples(traj, 10) {
        let bp = BasePoint::new(&bm.base, &bm.f, &s.x)?;
        let xddot = base_accel_from_state(bm, s)?;
        let res = linalg::add(&xddot, &bp.gamma_apply(&s.xdot, &s.xdot));
        worst = worst.max(bp.norm(&res));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::MetricVariant;
    use crate::manifold::catalog;

    fn flat_bundle() -> BundleMetric {
        BundleMetric::assemble(
            MetricVariant::Sasaki,
            catalog("euclidean", &[2.0]).unwrap(),
            ScalingField::one(),
        )
    }

    fn sphere_bundle(f: &str) -> BundleMetric {
        BundleMetric::assemble(
            MetricVariant::Sasaki,
            catalog("sphere_stereo", &[1.0]).unwrap(),
            ScalingField::from_str(f, 2).unwrap(),
        )
    }

    fn start(x: [f64; 2], u: [f64; 2], xd: [f64; 2], ud: [f64; 2]) -> BundleState {
        BundleState {
            t: 0.0,
            x: x.to_vec(),
            u: u.to_vec(),
            xdot: xd.to_vec(),
            udot: ud.to_vec(),
            energy: 0.0,
        }
    }

    #[test]
    fn flat_bundle_geodesics_are_straight_lines() {
        let bm = flat_bundle();
        let s0 = start([-0.5, -0.3], [0.2, 0.1], [0.6, 0.4], [-0.1, 0.3]);
        let traj = integrate(&bm, &s0, 1.0, 1e-2).unwrap();
        let last = traj.states.last().unwrap();
        for k in 0..2 {
            assert!((last.x[k] - (s0.x[k] + s0.xdot[k])).abs() < 1e-12);
            assert!((last.u[k] - (s0.u[k] + s0.udot[k])).abs() < 1e-12);
        }
        assert!(traj.energy_drift() <= 1e-14);
    }

    #[test]
    fn invalid_step_rejected() {
        let bm = flat_bundle();
        let s0 = start([0.0, 0.0], [0.0, 0.0], [1.0, 0.0], [0.0, 0.0]);
        assert!(matches!(
            integrate(&bm, &s0, 1.0, 0.0),
            Err(GeomError::BadParams(_))
        ));
        assert!(matches!(
            integrate(&bm, &s0, 1.0, -0.1),
            Err(GeomError::BadParams(_))
        ));
    }

    #[test]
    fn chart_exit_reported() {
        let bm = sphere_bundle("1");
        let s0 = start([0.4, 0.0], [0.1, 0.0], [2.0, 0.0], [0.0, 0.0]);
        assert!(matches!(
            integrate(&bm, &s0, 1.0, 1e-2),
            Err(GeomError::ChartExit(_))
        ));
    }

    #[test]
    fn sphere_energy_conservation_and_order() {
        let bm = sphere_bundle("1");
        // energetic start so truncation error stays above rounding noise,
        // otherwise the order ratio is unmeasurable
        let s0 = start([-0.3, 0.25], [1.4, -0.8], [0.5, 0.52], [1.1, 0.9]);
        let traj = integrate(&bm, &s0, 1.0, 1e-3).unwrap();
        let drift = traj.energy_drift();
        assert!(drift <= 1e-6, "drift {drift}");

        let traj_half = integrate(&bm, &s0, 1.0, 5e-4).unwrap();
        let ratio = drift / traj_half.energy_drift().max(1e-300);
        assert!(ratio >= 8.0, "order ratio {ratio}");
    }

    #[test]
    fn oracle_accel_small_along_integrated_geodesic() {
        let bm = sphere_bundle("1");
        let s0 = start([0.0, 0.0], [0.2, -0.1], [0.3, 0.15], [0.05, 0.1]);
        let traj = integrate(&bm, &s0, 0.5, 1e-3).unwrap();
        for s in interior_samples(&traj, 10) {
            // nabla_T T read from the RHS residual: both derivatives come
            // from the same field, so measure through curve_accel with
            // state-derived second derivatives.
            let m = 2;
            let mut y = s.x.clone();
            y.extend_from_slice(&s.u);
            let mut v = s.xdot.clone();
            v.extend_from_slice(&s.udot);
            let (_, vdot) = engine::geodesic_rhs(&bm, &y, &v).unwrap();
            let accel = engine::curve_accel(
                &bm,
                &engine::CurveJet {
                    x: y.clone(),
                    xdot: v,
                    xddot: vdot,
                },
            )
            .unwrap();
            assert!(linalg::norm_inf(&accel) <= 1e-5, "{:?}", accel);
            let _ = m;
        }
    }

    #[test]
    fn line_lift_residuals() {
        // flat base, f = 1: the lift of a straight line is a geodesic
        let bm = flat_bundle();
        let line = BaseCurve::Line {
            p0: vec![-0.4, 0.1],
            v: vec![0.8, -0.2],
        };
        let samples: Vec<f64> = (0..5).map(|i| 0.1 + 0.15 * i as f64).collect();
        for r in lift_residual(&bm, &line, &samples).unwrap() {
            assert!(r.res_a <= 1e-10, "a = {}", r.res_a);
            assert!(r.res_b <= 1e-10, "b = {}", r.res_b);
            assert!(r.oracle_accel <= 1e-10, "oracle = {}", r.oracle_accel);
        }

        // f = exp(x1): A_f(x', x') obstructs the lift
        let bm = BundleMetric::assemble(
            MetricVariant::Sasaki,
            catalog("euclidean", &[2.0]).unwrap(),
            ScalingField::from_str("exp(x1)", 2).unwrap(),
        );
        let line = BaseCurve::Line {
            p0: vec![-0.4, 0.0],
            v: vec![0.8, 0.0],
        };
        let rs = lift_residual(&bm, &line, &samples).unwrap();
        let max_a = rs.iter().map(|r| r.res_a).fold(0.0_f64, f64::max);
        assert!(max_a >= 1e-3, "max_a = {max_a}");
        // residual (a) must agree with the oracle acceleration here: the
        // vertical condition (b) is satisfied by straight lines in flat
        // space, so the full defect is horizontal.
        for r in &rs {
            assert!(r.res_b <= 1e-12);
        }
    }

    #[test]
    fn lift_residual_matches_oracle_decomposition() {
        // On a curved base with general f, ||nabla_T T||^2 should equal
        // f ||a||^2 + ||b||^2 when (a) and (b) are the closed-form
        // residual vectors; check the norms are consistent.
        let bm = sphere_bundle("exp(x1)");
        let curve = BaseCurve::geodesic(&bm.base, &[0.1, -0.05], &[0.3, 0.2], 0.4, 1e-3).unwrap();
        let samples = [0.1, 0.2, 0.3];
        for r in lift_residual(&bm, &curve, &samples).unwrap() {
            // the oracle acceleration should be bounded by the closed-form
            // residuals combined with the metric weights (f <= e^{0.5})
            let bound = (1.65 * r.res_a * r.res_a + r.res_b * r.res_b).sqrt() + 1e-8;
            assert!(
                r.oracle_accel <= bound,
                "oracle {} vs parts a={} b={}",
                r.oracle_accel,
                r.res_a,
                r.res_b
            );
            assert!(r.oracle_accel + 1e-8 >= 0.55 * r.res_a, "oracle too small");
        }
    }

    #[test]
    fn constant_speed_paths() {
        let bm = sphere_bundle("1");
        // fiber along a horizontal-ish geodesic stays constant-norm
        let s0 = start([0.0, 0.0], [0.3, 0.1], [0.25, -0.1], [0.0, 0.0]);
        let traj = integrate(&bm, &s0, 0.5, 1e-3).unwrap();
        match constant_speed_check(&bm, &traj).unwrap() {
            ConstantSpeedReport::Checked { max_residual, .. } => {
                assert!(max_residual < 1e-4, "residual {max_residual}");
            }
            ConstantSpeedReport::NotApplicable { fiber_drift } => {
                panic!("expected applicable, drift = {fiber_drift}")
            }
        }

        // a strongly fiber-driven start drifts |y| and is rejected
        let s1 = start([0.0, 0.0], [0.5, 0.0], [0.1, 0.0], [0.8, 0.9]);
        let traj = integrate(&bm, &s1, 0.5, 1e-3).unwrap();
        assert!(matches!(
            constant_speed_check(&bm, &traj).unwrap(),
            ConstantSpeedReport::NotApplicable { .. }
        ));
    }

    #[test]
    fn two_geodesic_probe_flags_nonconstant_f() {
        let eu = catalog("euclidean", &[2.0]).unwrap();
        let f = ScalingField::from_str("exp(x1)", 2).unwrap();
        let rep =
            two_geodesic_probe(&eu, &f, &[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert!((rep.grad_f_norm - 1.0).abs() < 1e-12);
        assert!(rep.max_residual_a_first >= 1e-3);
        assert!(rep.max_residual_a_second >= 1e-3);

        assert!(matches!(
            two_geodesic_probe(&eu, &f, &[0.0, 0.0], &[1.0, 0.0], &[2.0, 0.0]),
            Err(GeomError::ParallelVectors)
        ));
    }

    #[test]
    fn submersion_residual_flat_case() {
        let bm = flat_bundle();
        let s0 = start([-0.2, 0.1], [0.4, 0.0], [0.5, 0.3], [0.1, -0.2]);
        let traj = integrate(&bm, &s0, 1.0, 1e-2).unwrap();
        let res = submersion_check(&bm, &traj).unwrap();
        assert!(res <= 1e-8, "residual {res}");
    }
}
