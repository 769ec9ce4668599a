//! Charted base manifolds, scaling fields, tangent points and the
//! built-in catalog of test manifolds.
//!
//! A manifold here is a single coordinate chart: a box in R^m together
//! with a symmetric positive-definite matrix of expressions for the
//! metric components. The catalog covers flat space plus the conformal
//! constant-curvature models, which is all the desk-scale verification
//! needs.

use serde::Deserialize;

use crate::error::{GeomError, Result};
use crate::expr::{parse, Expr};
use crate::jet::Jet;
use crate::linalg;

#[derive(Clone, Debug)]
pub struct ChartedManifold {
    name: String,
    m: usize,
    /// Row-major m*m metric component expressions (symmetric).
    entries: Vec<Expr>,
    chart_box: Vec<(f64, f64)>,
    /// Declared constant sectional curvature, when known.
    kappa: Option<f64>,
}

impl ChartedManifold {
    pub fn new(
        name: impl Into<String>,
        m: usize,
        entries: Vec<Expr>,
        chart_box: Vec<(f64, f64)>,
        kappa: Option<f64>,
    ) -> Result<Self> {
        if m < 2 {
            return Err(GeomError::BadParams("dimension must be >= 2".into()));
        }
        if entries.len() != m * m || chart_box.len() != m {
            return Err(GeomError::BadParams(
                "metric must be m x m and box must have m intervals".into(),
            ));
        }
        if chart_box.iter().any(|(lo, hi)| !(lo < hi)) {
            return Err(GeomError::BadParams("chart box intervals must be nonempty".into()));
        }
        Ok(ChartedManifold {
            name: name.into(),
            m,
            entries,
            chart_box,
            kappa,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn chart_box(&self) -> &[(f64, f64)] {
        &self.chart_box
    }

    pub fn kappa(&self) -> Option<f64> {
        self.kappa
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.m
            && x.iter()
                .zip(&self.chart_box)
                .all(|(xi, (lo, hi))| *xi >= *lo && *xi <= *hi)
    }

    pub fn check_inside(&self, x: &[f64]) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(GeomError::OutsideChart)
        }
    }

    /// Metric components as jets, given jets for the base coordinates.
    /// The variable jets may live in a larger space (the tangent bundle
    /// passes 2m-dimensional jets).
    pub fn metric_jets(&self, x_vars: &[Jet]) -> Result<Vec<Jet>> {
        assert_eq!(x_vars.len(), self.m);
        let mut out = Vec::with_capacity(self.m * self.m);
        for e in &self.entries {
            out.push(e.eval(x_vars)?);
        }
        Ok(out)
    }

    /// Metric component values G(x).
    pub fn metric_at(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_inside(x)?;
        let jets = self.metric_jets(&seed_vars(x, 0))?;
        Ok(jets.iter().map(|j| j.val()).collect())
    }
}

pub fn seed_vars(x: &[f64], order: u8) -> Vec<Jet> {
    let n = x.len();
    (0..n).map(|i| Jet::variable(n, order, x[i], i)).collect()
}

#[derive(Clone, Debug)]
pub struct ScalingField {
    expr: Expr,
    text: String,
}

impl ScalingField {
    pub fn one() -> Self {
        ScalingField {
            expr: Expr::Num(1.0),
            text: "1".into(),
        }
    }

    pub fn from_str(text: &str, m: usize) -> Result<Self> {
        Ok(ScalingField {
            expr: parse(text, m)?,
            text: text.to_string(),
        })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    /// Evaluate f as a jet and enforce positivity.
    pub fn eval(&self, x_vars: &[Jet]) -> Result<Jet> {
        let j = self.expr.eval(x_vars)?;
        if j.val() <= 0.0 {
            return Err(GeomError::NonPositiveScaling);
        }
        Ok(j)
    }
}

/// A point of the tangent bundle: base coordinates plus fiber components
/// in the coordinate frame.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentPoint {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
}

impl TangentPoint {
    pub fn new(x: Vec<f64>, u: Vec<f64>) -> Self {
        assert_eq!(x.len(), u.len());
        TangentPoint { x, u }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiberScalars {
    pub r: f64,
    pub alpha: f64,
}

/// Built-in manifold catalog.
///
/// * `euclidean(m)` - identity metric on [-1,1]^m.
/// * `sphere_stereo(radius)` - round 2-sphere in stereographic
///   coordinates, conformal factor 4/(1 + |x|^2/radius^2)^2.
/// * `poincare_disk()` - hyperbolic plane, conformal factor 4/(1-|x|^2)^2.
/// * `space_form(kappa, m)` - conformal model 4/(1 + kappa |x|^2)^2 I.
///
/// The curved models use the box [-0.5, 0.5]^m to stay clear of chart
/// degeneracies.
pub fn catalog(name: &str, params: &[f64]) -> Result<ChartedManifold> {
    match name {
        "euclidean" => {
            let m = expect_dim(params.first().copied().unwrap_or(2.0))?;
            if params.len() > 1 {
                return Err(GeomError::BadParams("euclidean takes one parameter".into()));
            }
            let mut entries = Vec::with_capacity(m * m);
            for i in 0..m {
                for j in 0..m {
                    entries.push(Expr::Num(if i == j { 1.0 } else { 0.0 }));
                }
            }
            ChartedManifold::new("euclidean", m, entries, vec![(-1.0, 1.0); m], Some(0.0))
        }
        "sphere_stereo" => {
            let radius = params.first().copied().unwrap_or(1.0);
            if radius <= 0.0 {
                return Err(GeomError::BadParams(format!("radius must be positive, got {radius}")));
            }
            let kappa = 1.0 / (radius * radius);
            conformal_space_form("sphere_stereo", kappa, 2)
        }
        "poincare_disk" => conformal_space_form("poincare_disk", -1.0, 2),
        "space_form" => {
            if params.len() != 2 {
                return Err(GeomError::BadParams("space_form takes (kappa, m)".into()));
            }
            let kappa = params[0];
            let m = expect_dim(params[1])?;
            conformal_space_form("space_form", kappa, m)
        }
        other => Err(GeomError::UnknownManifold(other.to_string())),
    }
}

fn expect_dim(v: f64) -> Result<usize> {
    if v.fract() != 0.0 || v < 2.0 || v > 6.0 {
        return Err(GeomError::BadParams(format!(
            "dimension must be an integer in 2..=6, got {v}"
        )));
    }
    Ok(v as usize)
}

fn conformal_space_form(name: &str, kappa: f64, m: usize) -> Result<ChartedManifold> {
    // Box [-0.5, 0.5]^m; require 1 + kappa |x|^2 to stay well positive.
    let worst = 1.0 + kappa.min(0.0) * (m as f64) * 0.25;
    if worst < 0.05 {
        return Err(GeomError::BadParams(format!(
            "kappa = {kappa} degenerates the conformal chart on [-0.5,0.5]^{m}"
        )));
    }
    // |x|^2 = x1^2 + ... + xm^2
    let mut ss = Expr::Pow(Box::new(Expr::Var(0)), 2.0);
    for i in 1..m {
        ss = Expr::Add(Box::new(ss), Box::new(Expr::Pow(Box::new(Expr::Var(i)), 2.0)));
    }
    // lambda(x) = 4 / (1 + kappa |x|^2)^2
    let denom = Expr::Pow(
        Box::new(Expr::Add(
            Box::new(Expr::Num(1.0)),
            Box::new(Expr::Mul(Box::new(Expr::Num(kappa)), Box::new(ss))),
        )),
        2.0,
    );
    let lambda = Expr::Div(Box::new(Expr::Num(4.0)), Box::new(denom));
    let mut entries = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            entries.push(if i == j { lambda.clone() } else { Expr::Num(0.0) });
        }
    }
    ChartedManifold::new(name, m, entries, vec![(-0.5, 0.5); m], Some(kappa))
}

/// Parse a manifold spec of the form `name(p1,p2,...)` or bare `name`.
pub fn manifold_from_spec(spec: &str) -> Result<ChartedManifold> {
    let spec = spec.trim();
    if let Some(open) = spec.find('(') {
        if !spec.ends_with(')') {
            return Err(GeomError::BadParams(format!("malformed manifold spec '{spec}'")));
        }
        let name = &spec[..open];
        let inner = &spec[open + 1..spec.len() - 1];
        let params: Vec<f64> = if inner.trim().is_empty() {
            Vec::new()
        } else {
            inner
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| GeomError::BadParams(format!("bad parameter '{s}'")))
                })
                .collect::<Result<_>>()?
        };
        catalog(name, &params)
    } else {
        catalog(spec, &[])
    }
}

#[derive(Deserialize)]
struct MetricConfig {
    dimension: usize,
    metric: Vec<Vec<String>>,
    #[serde(rename = "box")]
    chart_box: Vec<[f64; 2]>,
    kappa: Option<f64>,
}

/// Load a custom metric from the JSON config document
/// `{"dimension": m, "metric": [[expr,...],...], "box": [[lo,hi],...]}`.
pub fn manifold_from_json(text: &str) -> Result<ChartedManifold> {
    let cfg: MetricConfig =
        serde_json::from_str(text).map_err(|e| GeomError::Config(e.to_string()))?;
    let m = cfg.dimension;
    if cfg.metric.len() != m || cfg.metric.iter().any(|row| row.len() != m) {
        return Err(GeomError::Config("metric must be an m x m array".into()));
    }
    let mut entries = Vec::with_capacity(m * m);
    for row in &cfg.metric {
        for s in row {
            entries.push(parse(s, m)?);
        }
    }
    let chart_box = cfg.chart_box.iter().map(|b| (b[0], b[1])).collect();
    ChartedManifold::new("custom", m, entries, chart_box, cfg.kappa)
}

/// v^T G(x) w.
pub fn inner(mf: &ChartedManifold, x: &[f64], v: &[f64], w: &[f64]) -> Result<f64> {
    let g = mf.metric_at(x)?;
    Ok(linalg::quad_form(mf.dim(), &g, v, w))
}

/// Fiber norm r = |u|_g and alpha = 1 + r^2 at a tangent point.
pub fn norm_r(mf: &ChartedManifold, tp: &TangentPoint) -> Result<FiberScalars> {
    let r2 = inner(mf, &tp.x, &tp.u, &tp.u)?;
    Ok(FiberScalars {
        r: r2.max(0.0).sqrt(),
        alpha: 1.0 + r2,
    })
}

/// Metric dual of df: G(x)^{-1} (df/dx).
pub fn grad_f(mf: &ChartedManifold, f: &ScalingField, x: &[f64]) -> Result<Vec<f64>> {
    mf.check_inside(x)?;
    let m = mf.dim();
    let fj = f.eval(&seed_vars(x, 1))?;
    let df: Vec<f64> = (0..m).map(|i| fj.grad(i)).collect();
    let g = mf.metric_at(x)?;
    let ginv = linalg::invert(m, &g)?;
    Ok(linalg::matvec(m, &ginv, &df))
}

pub const GRAM_PIVOT: f64 = 1e-10;

/// Gram-Schmidt orthonormalization with respect to G(x). Deterministic in
/// the input order; fails when the vectors are numerically dependent.
pub fn gram_schmidt(mf: &ChartedManifold, x: &[f64], vectors: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let g = mf.metric_at(x)?;
    gram_schmidt_with(mf.dim(), &g, vectors)
}

/// Gram-Schmidt against an explicit Gram matrix (also used for bundle
/// frames, where the matrix is 2m x 2m).
pub fn gram_schmidt_with(n: usize, gram: &[f64], vectors: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        for e in &out {
            let c = linalg::quad_form(n, gram, &w, e);
            linalg::axpy(-c, e, &mut w);
        }
        let nrm2 = linalg::quad_form(n, gram, &w, &w);
        if nrm2 <= GRAM_PIVOT * GRAM_PIVOT || !nrm2.is_finite() {
            return Err(GeomError::DegenerateInput(
                "vectors are numerically rank deficient".into(),
            ));
        }
        let nrm = nrm2.sqrt();
        for c in w.iter_mut() {
            *c /= nrm;
        }
        out.push(w);
    }
    Ok(out)
}
