//! Proposition adjudication harness: a registry of verification items,
//! each comparing a closed-form formula against the brute-force oracle
//! (or an internal consistency partner) over seeded samples, with
//! machine-readable reports.
//!
//! Statuses are CONFIRMED / DEVIATION / NOT_APPLICABLE / ERROR. An item
//! is CONFIRMED iff its max relative error (absolute error divided by
//! |reference| + 1e-3, which gives the documented absolute floor of
//! tol * 1e-3) stays within the item tolerance. Items whose formulas
//! carry known textual ambiguities appear once per variant so the report
//! localizes which variant the oracle supports. A DEVIATION is an honest
//! finding about the formula text, never an error of the harness; the
//! exit-code contract only requires the MUST_CONFIRM set.

use serde::Serialize;

use crate::basecalc::BasePoint;
use crate::bundle::{
    self, decompose, oracle_connection, oracle_curvature, BundleMetric, Lift, LiftDecomposition,
    MetricVariant,
};
use crate::cg;
use crate::engine::{self, MetricJets};
use crate::error::{GeomError, Result};
use crate::geodesics::{self, BaseCurve, BundleState};
use crate::linalg;
use crate::manifold::{manifold_from_spec, ChartedManifold, ScalingField, TangentPoint};
use crate::sample::{item_seed, sample_stream, Sample};
use crate::sasaki::{self, Reading, SectionalPattern};

pub const SCHEMA_VERSION: u32 = 1;
/// Relative errors divide by (|reference| + ABS_FLOOR_SCALE); with the
/// default tolerance 1e-6 this yields the documented 1e-9 absolute floor.
pub const ABS_FLOOR_SCALE: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "CONFIRMED")]
    Confirmed,
    #[serde(rename = "DEVIATION")]
    Deviation,
    #[serde(rename = "NOT_APPLICABLE")]
    NotApplicable,
    #[serde(rename = "ERROR")]
    Error,
}

#[derive(Clone, Debug, Serialize)]
pub struct WorstSample {
    pub manifold: String,
    pub f: String,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationItem {
    pub id: String,
    pub status: Status,
    pub max_abs_err: f64,
    pub max_rel_err: f64,
    pub tol: f64,
    pub n_samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_sample: Option<WorstSample>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub manifold: Option<String>,
    pub f: Option<String>,
    pub seed: u64,
    pub samples: usize,
    pub tol: f64,
    pub variants: Vec<String>,
    pub suite: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            manifold: None,
            f: None,
            seed: 42,
            samples: 20,
            tol: 1e-6,
            variants: vec!["sasaki".into(), "cg".into()],
            suite: "all".into(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub confirmed: usize,
    pub deviation: usize,
    pub error: usize,
    pub not_applicable: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub config: RunConfig,
    pub timestamp: u64,
    pub items: Vec<VerificationItem>,
    pub summary: Summary,
}

impl VerificationReport {
    /// Exit-code contract: every MUST_CONFIRM item is CONFIRMED (or not
    /// applicable under a custom fixture).
    pub fn passes(&self) -> bool {
        self.items.iter().all(|it| {
            !MUST_CONFIRM.contains(&it.id.as_str())
                || matches!(it.status, Status::Confirmed | Status::NotApplicable)
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// Items whose deviation fails the whole run. Everything else is
/// report-only: the adjudicated curvature statements may legitimately
/// deviate from the oracle.
pub const MUST_CONFIRM: &[&str] = &[
    "oracle.metric_compatibility",
    "oracle.torsion_free",
    "oracle.bracket_identity",
    "oracle.first_bianchi",
    "lemma2.2.i",
    "lemma2.2.ii",
    "lemma2.2.iii",
    "lemma2.2.iv",
    "lemma2.2.v",
    "lemma2.2.vi",
    "lemma2.2.vii",
    "lemma2.2.viii",
    "sasaki.prop3.2.unit_f",
    "sasaki.prop3.2.general_f",
    "cg.prop5.2.unit_f",
    "cg.prop5.2.general_f",
    "cg.lemma5.5.i",
    "cg.lemma5.5.ii",
    "cg.lemma5.5.iii",
    "sasaki.thm3.5.flatness",
    "geodesics.energy_conservation",
];

struct Fx {
    mf: ChartedManifold,
    f: ScalingField,
    mspec: String,
    ftext: String,
}

struct EvalEnv {
    fxs: Vec<Fx>,
    variants: Vec<MetricVariant>,
    seed: u64,
    samples: usize,
}

struct Outcome {
    max_abs: f64,
    max_rel: f64,
    n: usize,
    worst: Option<WorstSample>,
    /// Overrides the tolerance comparison for demonstration-style items.
    confirmed_override: Option<bool>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            max_abs: 0.0,
            max_rel: 0.0,
            n: 0,
            worst: None,
            confirmed_override: None,
        }
    }

    fn add(&mut self, abs: f64, scale: f64, worst: impl FnOnce() -> WorstSample) {
        let rel = abs / (scale.abs() + ABS_FLOOR_SCALE);
        if rel > self.max_rel {
            self.max_rel = rel;
            self.worst = Some(worst());
        }
        if abs > self.max_abs {
            self.max_abs = abs;
        }
    }

    fn bump(&mut self) {
        self.n += 1;
    }
}

struct ItemSpec {
    id: &'static str,
    tol: f64,
    /// Pinned fixtures for the full suite; custom runs override them.
    fixtures: &'static [(&'static str, &'static str)],
    /// Which metric variants the item concerns (empty: variant-free).
    variants: &'static [MetricVariant],
    /// Whether the item applies to a custom fixture.
    applicable: fn(&ChartedManifold, &ScalingField) -> bool,
    note: Option<&'static str>,
    eval: fn(&EvalEnv) -> Result<Outcome>,
}

fn always(_: &ChartedManifold, _: &ScalingField) -> bool {
    true
}

fn needs_flat_constant(mf: &ChartedManifold, f: &ScalingField) -> bool {
    mf.kappa() == Some(0.0) && f.expr().is_constant()
}

fn needs_nonconstant_f(_: &ChartedManifold, f: &ScalingField) -> bool {
    !f.expr().is_constant()
}

fn needs_kappa(mf: &ChartedManifold, _: &ScalingField) -> bool {
    mf.kappa().is_some()
}

const FIX_CLASSICAL: &[(&str, &str)] = &[("sphere_stereo(1)", "1"), ("poincare_disk()", "1")];
const FIX_GENERAL_F: &[(&str, &str)] = &[
    ("euclidean(2)", "exp(x1)"),
    ("euclidean(2)", "1 + 0.5*x1^2"),
    ("sphere_stereo(1)", "exp(x1)"),
    ("sphere_stereo(1)", "1 + 0.5*x1^2"),
];
const FIX_CURVED_MIX: &[(&str, &str)] = &[("sphere_stereo(1)", "1"), ("sphere_stereo(1)", "exp(x1)")];
const FIX_ORACLE: &[(&str, &str)] = &[
    ("sphere_stereo(1)", "1"),
    ("poincare_disk()", "1"),
    ("sphere_stereo(1)", "exp(x1)"),
    ("euclidean(2)", "1 + 0.5*x1^2"),
];
const FIX_FLAT_UNIT: &[(&str, &str)] = &[("euclidean(2)", "1")];
const FIX_FLAT_POLY: &[(&str, &str)] = &[("euclidean(2)", "1 + 0.5*x1^2")];
const FIX_SPHERE_UNIT: &[(&str, &str)] = &[("sphere_stereo(1)", "1")];
const FIX_SPACE_FORMS: &[(&str, &str)] = &[
    ("space_form(1,2)", "1"),
    ("space_form(-1,2)", "1"),
    ("space_form(1,2)", "exp(x1)"),
];
const FIX_GEODESIC: &[(&str, &str)] = &[
    ("sphere_stereo(1)", "exp(x1)"),
    ("euclidean(2)", "exp(x1)"),
];
const FIX_SCALAR_CG: &[(&str, &str)] = &[
    ("euclidean(2)", "1"),
    ("sphere_stereo(1)", "1"),
    ("sphere_stereo(1)", "exp(x1)"),
];

const SAS: &[MetricVariant] = &[MetricVariant::Sasaki];
const CG: &[MetricVariant] = &[MetricVariant::CheegerGromoll];
const BOTH: &[MetricVariant] = &[MetricVariant::Sasaki, MetricVariant::CheegerGromoll];

fn registry() -> Vec<ItemSpec> {
    let mut items = vec![
        ItemSpec {
            id: "oracle.metric_compatibility",
            tol: 1e-9,
            fixtures: FIX_ORACLE,
            variants: BOTH,
            applicable: always,
            note: None,
            eval: eval_metric_compatibility,
        },
        ItemSpec {
            id: "oracle.torsion_free",
            tol: 1e-12,
            fixtures: FIX_ORACLE,
            variants: BOTH,
            applicable: always,
            note: Some("bit-exact by construction"),
            eval: eval_torsion_free,
        },
        ItemSpec {
            id: "oracle.bracket_identity",
            tol: 1e-7,
            fixtures: FIX_ORACLE,
            variants: SAS,
            applicable: always,
            note: Some("vertical part of [X^h, Y^h] against -(R(X,Y)u)^v"),
            eval: eval_bracket_identity,
        },
        ItemSpec {
            id: "oracle.first_bianchi",
            tol: 1e-8,
            fixtures: FIX_ORACLE,
            variants: BOTH,
            applicable: always,
            note: None,
            eval: eval_first_bianchi,
        },
    ];

    const KOSZUL: [&str; 8] = [
        "lemma2.2.i",
        "lemma2.2.ii",
        "lemma2.2.iii",
        "lemma2.2.iv",
        "lemma2.2.v",
        "lemma2.2.vi",
        "lemma2.2.vii",
        "lemma2.2.viii",
    ];
    const KOSZUL_EVALS: [fn(&EvalEnv) -> Result<Outcome>; 8] = [
        |env| eval_koszul(env, 0),
        |env| eval_koszul(env, 1),
        |env| eval_koszul(env, 2),
        |env| eval_koszul(env, 3),
        |env| eval_koszul(env, 4),
        |env| eval_koszul(env, 5),
        |env| eval_koszul(env, 6),
        |env| eval_koszul(env, 7),
    ];
    for (idx, id) in KOSZUL.iter().enumerate() {
        items.push(ItemSpec {
            id,
            tol: 1e-7,
            fixtures: FIX_CURVED_MIX,
            variants: BOTH,
            applicable: always,
            note: Some("Koszul relation normalized to 2 g^(nabla_A B, C)"),
            eval: KOSZUL_EVALS[idx],
        });
    }

    items.extend([
        ItemSpec {
            id: "sasaki.prop3.2.unit_f",
            tol: 1e-6,
            fixtures: FIX_CLASSICAL,
            variants: SAS,
            applicable: |_, f| f.expr().is_constant(),
            note: Some("classical Sasaki reduction, all four lift patterns"),
            eval: |env| eval_connection(env, MetricVariant::Sasaki),
        },
        ItemSpec {
            id: "sasaki.prop3.2.general_f",
            tol: 1e-6,
            fixtures: FIX_GENERAL_F,
            variants: SAS,
            applicable: always,
            note: Some("all four lift patterns"),
            eval: |env| eval_connection(env, MetricVariant::Sasaki),
        },
        ItemSpec {
            id: "sasaki.prop3.4.i",
            tol: 1e-6,
            fixtures: FIX_CURVED_MIX,
            variants: SAS,
            applicable: always,
            note: None,
            eval: |env| eval_sasaki_curvature(env, CurvPattern::Vvv, Reading::Proof),
        },
        ItemSpec {
            id: "sasaki.prop3.4.ii",
            tol: 1e-6,
            fixtures: FIX_CURVED_MIX,
            variants: SAS,
            applicable: always,
            note: None,
            eval: |env| eval_sasaki_curvature(env, CurvPattern::Hvv, Reading::Proof),
        },
        ItemSpec {
            id: "sasaki.prop3.4.iii",
            tol: 1e-6,
            fixtures: FIX_CURVED_MIX,
            variants: SAS,
            applicable: always,
            note: Some("statement's lowercase-y slot read as X per the proof"),
            eval: |env| eval_sasaki_curvature(env, CurvPattern::Vvh, Reading::Proof),
        },
        ItemSpec {
            id: "sasaki.prop3.4.iv.proof",
            tol: 1e-6,
            fixtures: FIX_CURVED_MIX,
            variants: SAS,
            applicable: always,
            note: Some("vertical term (1/2) R(X,Z)Y from the derivation"),
            eval: |env| eval_sasaki_curvature(env, CurvPattern::Hvh, Reading::Proof),
        },
        ItemSpec {
            id: "sasaki.prop3.4.iv.statement",
            tol: 1e-6,
            fixtures: FIX_CURVED_MIX,
            variants: SAS,
            applicable: always,
            note: Some("vertical term (1/2) R(X,Z)u exactly as displayed"),
            eval: |env| eval_sasaki_curvature(env, CurvPattern::Hvh, Reading::Statement),
        },
        ItemSpec {
            id: "sasaki.prop3.4.v.proof",
            tol: 1e-6,
            fixtures: FIX_CURVED_MIX,
            variants: SAS,
            applicable: always,
            note: Some("vertical term (R(X,Y)Z)^v from the Bianchi assembly"),
            eval: |env| eval_sasaki_curvature(env, CurvPattern::Hhv, Reading::Proof),
        },
        ItemSpec {
            id: "sasaki.prop3.4.v.statement",
            tol: 1e-6,
            fixtures: FIX_CURVED_MIX,
            variants: SAS,
            applicable: always,
            note: Some("vertical term (R(X,Y)u)^v exactly as displayed"),
            eval: |env| eval_sasaki_curvature(env, CurvPattern::Hhv, Reading::Statement),
        },
        ItemSpec {
            id: "sasaki.prop3.4.vi",
            tol: 1e-6,
            fixtures: FIX_CURVED_MIX,
            variants: SAS,
            applicable: always,
            note: None,
            eval: |env| eval_sasaki_curvature(env, CurvPattern::Hhh, Reading::Proof),
        },
        ItemSpec {
            id: "sasaki.prop3.7.i",
            tol: 1e-6,
            fixtures: FIX_CURVED_MIX,
            variants: SAS,
            applicable: always,
            note: Some("vertical planes are flat"),
            eval: |env| eval_sasaki_sectional(env, SectionalPattern::Vv),
        },
        ItemSpec {
            id: "sasaki.prop3.7.ii",
            tol: 1e-6,
            fixtures: FIX_CURVED_MIX,
            variants: SAS,
            applicable: always,
            note: None,
            eval: |env| eval_sasaki_sectional(env, SectionalPattern::Hv),
        },
        ItemSpec {
            id: "sasaki.prop3.7.iii",
            tol: 1e-6,
            fixtures: FIX_CURVED_MIX,
            variants: SAS,
            applicable: always,
            note: Some("L_f evaluated exactly as displayed"),
            eval: |env| eval_sasaki_sectional(env, SectionalPattern::Hh),
        },
        ItemSpec {
            id: "sasaki.prop3.9",
            tol: 1e-6,
            fixtures: FIX_CURVED_MIX,
            variants: SAS,
            applicable: always,
            note: None,
            eval: eval_sasaki_scalar,
        },
        ItemSpec {
            id: "sasaki.prop3.9.frame_sum",
            tol: 1e-9,
            fixtures: FIX_CURVED_MIX,
            variants: SAS,
            applicable: always,
            note: Some("internal consistency: scalar formula vs frame sum of sectionals"),
            eval: eval_sasaki_scalar_frame_sum,
        },
        ItemSpec {
            id: "sasaki.thm3.5.flatness",
            tol: 1e-6,
            fixtures: FIX_FLAT_UNIT,
            variants: SAS,
            applicable: needs_flat_constant,
            note: Some("flat base, constant f: every oracle curvature component vanishes"),
            eval: eval_flatness,
        },
        ItemSpec {
            id: "sasaki.cor3.6.unflatness",
            tol: 1e-6,
            fixtures: FIX_FLAT_POLY,
            variants: SAS,
            applicable: needs_nonconstant_f,
            note: Some("demonstration: CONFIRMED iff some oracle curvature component >= 1e-3"),
            eval: eval_unflatness,
        },
        ItemSpec {
            id: "sasaki.thm3.8.sweep",
            tol: 1e-6,
            fixtures: FIX_SPHERE_UNIT,
            variants: SAS,
            applicable: always,
            note: Some("demonstration: hh sectional non-increasing along u <- t u for t >= 1"),
            eval: eval_sweep,
        },
        ItemSpec {
            id: "geodesics.eq4.2",
            tol: 1e-7,
            fixtures: FIX_GEODESIC,
            variants: SAS,
            applicable: always,
            note: Some("residuals (a), (b) against the oracle acceleration norm"),
            eval: eval_eq42,
        },
        ItemSpec {
            id: "geodesics.energy_conservation",
            tol: 1e-6,
            fixtures: FIX_SPHERE_UNIT,
            variants: SAS,
            applicable: always,
            note: Some("RK4 relative energy drift over unit time at h = 1e-3"),
            eval: eval_energy,
        },
        ItemSpec {
            id: "cg.prop5.2.unit_f",
            tol: 1e-6,
            fixtures: FIX_CLASSICAL,
            variants: CG,
            applicable: |_, f| f.expr().is_constant(),
            note: Some("all four lift patterns"),
            eval: |env| eval_connection(env, MetricVariant::CheegerGromoll),
        },
        ItemSpec {
            id: "cg.prop5.2.general_f",
            tol: 1e-6,
            fixtures: FIX_GENERAL_F,
            variants: CG,
            applicable: always,
            note: Some("all four lift patterns"),
            eval: |env| eval_connection(env, MetricVariant::CheegerGromoll),
        },
        ItemSpec {
            id: "cg.prop5.2.u_pairing",
            tol: 1e-12,
            fixtures: FIX_CURVED_MIX,
            variants: CG,
            applicable: always,
            note: Some("g~(X^v, U) = g(X, u)"),
            eval: eval_u_pairing,
        },
        ItemSpec {
            id: "cg.prop5.4.i",
            tol: 1e-6,
            fixtures: FIX_CURVED_MIX,
            variants: CG,
            applicable: always,
            note: None,
            eval: |env| eval_cg_curvature(env, CurvPattern::Hhh),
        },
        ItemSpec {
            id: "cg.prop5.4.ii",
            tol: 1e-6,
            fixtures: FIX_CURVED_MIX,
            variants: CG,
            applicable: always,
            note: Some("as displayed (nabla_Z read as the proof's nabla_X)"),
            eval: |env| eval_cg_curvature(env, CurvPattern::Hhv),
        },
        ItemSpec {
            id: "cg.prop5.4.iii",
            tol: 1e-6,
            fixtures: FIX_CURVED_MIX,
            variants: CG,
            applicable: always,
            note: None,
            eval: |env| eval_cg_curvature(env, CurvPattern::Hvh),
        },
        ItemSpec {
            id: "cg.prop5.4.iv",
            tol: 1e-6,
            fixtures: FIX_CURVED_MIX,
            variants: CG,
            applicable: always,
            note: None,
            eval: |env| eval_cg_curvature(env, CurvPattern::Hvv),
        },
        ItemSpec {
            id: "cg.prop5.4.v",
            tol: 1e-6,
            fixtures: FIX_CURVED_MIX,
            variants: CG,
            applicable: always,
            note: Some("as displayed"),
            eval: |env| eval_cg_curvature(env, CurvPattern::Vvh),
        },
        ItemSpec {
            id: "cg.prop5.4.vi",
            tol: 1e-6,
            fixtures: FIX_CURVED_MIX,
            variants: CG,
            applicable: always,
            note: None,
            eval: |env| eval_cg_curvature(env, CurvPattern::Vvv),
        },
        ItemSpec {
            id: "cg.lemma5.5.i",
            tol: 1e-10,
            fixtures: FIX_CURVED_MIX,
            variants: CG,
            applicable: always,
            note: Some("closed form against the direct Gram computation"),
            eval: |env| eval_q_area(env, cg::PlanePattern::Hh),
        },
        ItemSpec {
            id: "cg.lemma5.5.ii",
            tol: 1e-10,
            fixtures: FIX_CURVED_MIX,
            variants: CG,
            applicable: always,
            note: Some("closed form against the direct Gram computation"),
            eval: |env| eval_q_area(env, cg::PlanePattern::Hv),
        },
        ItemSpec {
            id: "cg.lemma5.5.iii",
            tol: 1e-10,
            fixtures: FIX_CURVED_MIX,
            variants: CG,
            applicable: always,
            note: Some("closed form against the direct Gram computation"),
            eval: |env| eval_q_area(env, cg::PlanePattern::Vv),
        },
        ItemSpec {
            id: "cg.lemma5.6.i",
            tol: 1e-6,
            fixtures: FIX_CURVED_MIX,
            variants: CG,
            applicable: always,
            note: Some("L~ substituted by the displayed L_f"),
            eval: |env| eval_g_form(env, cg::PlanePattern::Hh),
        },
        ItemSpec {
            id: "cg.lemma5.6.ii",
            tol: 1e-6,
            fixtures: FIX_CURVED_MIX,
            variants: CG,
            applicable: always,
            note: None,
            eval: |env| eval_g_form(env, cg::PlanePattern::Hv),
        },
        ItemSpec {
            id: "cg.lemma5.6.iii",
            tol: 1e-6,
            fixtures: FIX_CURVED_MIX,
            variants: CG,
            applicable: always,
            note: None,
            eval: |env| eval_g_form(env, cg::PlanePattern::Vv),
        },
        ItemSpec {
            id: "cg.prop5.7.i.statement",
            tol: 1e-6,
            fixtures: FIX_CURVED_MIX,
            variants: CG,
            applicable: always,
            note: Some("hh coefficient 3/(4 a f^4) exactly as printed"),
            eval: |env| eval_cg_sectional(env, cg::PlanePattern::Hh, cg::HhVariant::Statement),
        },
        ItemSpec {
            id: "cg.prop5.7.i.division",
            tol: 1e-6,
            fixtures: FIX_CURVED_MIX,
            variants: CG,
            applicable: always,
            note: Some("hh coefficient 3/(4 a^2 f^4) implied by G~/Q~"),
            eval: |env| eval_cg_sectional(env, cg::PlanePattern::Hh, cg::HhVariant::Division),
        },
        ItemSpec {
            id: "cg.prop5.7.ii",
            tol: 1e-6,
            fixtures: FIX_CURVED_MIX,
            variants: CG,
            applicable: always,
            note: None,
            eval: |env| eval_cg_sectional(env, cg::PlanePattern::Hv, cg::HhVariant::Division),
        },
        ItemSpec {
            id: "cg.prop5.7.iii",
            tol: 1e-6,
            fixtures: FIX_CURVED_MIX,
            variants: CG,
            applicable: always,
            note: None,
            eval: |env| eval_cg_sectional(env, cg::PlanePattern::Vv, cg::HhVariant::Division),
        },
        ItemSpec {
            id: "cg.prop5.7.division_consistency",
            tol: 1e-9,
            fixtures: FIX_CURVED_MIX,
            variants: CG,
            applicable: always,
            note: Some("internal consistency: sectional equals G~/Q~ for every pattern"),
            eval: eval_division_consistency,
        },
        ItemSpec {
            id: "cg.prop5.8.curvature_identity",
            tol: 1e-9,
            fixtures: FIX_SPACE_FORMS,
            variants: CG,
            applicable: needs_kappa,
            note: Some("|R(u,Y)X|^2 = kappa^2 g(X,u)^2 for orthonormal X, Y"),
            eval: eval_space_form_identity,
        },
        ItemSpec {
            id: "cg.prop5.8.consistency",
            tol: 1e-9,
            fixtures: FIX_SPACE_FORMS,
            variants: CG,
            applicable: needs_kappa,
            note: Some("5.8 formulas equal 5.7 formulas under the space-form substitution"),
            eval: eval_prop58_consistency,
        },
        ItemSpec {
            id: "cg.lemma5.11.frame",
            tol: 1e-10,
            fixtures: FIX_CLASSICAL,
            variants: CG,
            applicable: always,
            note: Some("adapted frame Gramian against the identity"),
            eval: eval_adapted_frame,
        },
        ItemSpec {
            id: "cg.prop5.12.base_Sp",
            tol: 1e-6,
            fixtures: FIX_SCALAR_CG,
            variants: CG,
            applicable: always,
            note: Some("base term S_p exactly as printed"),
            eval: |env| eval_cg_scalar(env, cg::ScalarBase::Plain),
        },
        ItemSpec {
            id: "cg.prop5.12.base_S_over_f",
            tol: 1e-6,
            fixtures: FIX_SCALAR_CG,
            variants: CG,
            applicable: always,
            note: Some("base term S/f, the Sasaki-scalar analog"),
            eval: |env| eval_cg_scalar(env, cg::ScalarBase::OverF),
        },
    ]);
    items
}

pub fn registry_ids() -> Vec<&'static str> {
    registry().iter().map(|it| it.id).collect()
}

/// Run the whole registry under the given configuration.
pub fn run_suite(cfg: &RunConfig) -> Result<VerificationReport> {
    let custom = cfg.manifold.is_some() || cfg.f.is_some();
    let variants: Vec<MetricVariant> = cfg
        .variants
        .iter()
        .filter_map(|v| match v.as_str() {
            "sasaki" => Some(MetricVariant::Sasaki),
            "cg" => Some(MetricVariant::CheegerGromoll),
            _ => None,
        })
        .collect();
    if variants.is_empty() {
        return Err(GeomError::Config("no valid variants selected".into()));
    }

    let mut items = Vec::new();
    for spec in registry() {
        let item = run_item(&spec, cfg, custom, &variants);
        items.push(item);
    }
    let summary = Summary {
        confirmed: items.iter().filter(|i| i.status == Status::Confirmed).count(),
        deviation: items.iter().filter(|i| i.status == Status::Deviation).count(),
        error: items.iter().filter(|i| i.status == Status::Error).count(),
        not_applicable: items
            .iter()
            .filter(|i| i.status == Status::NotApplicable)
            .count(),
    };
    let timestamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    Ok(VerificationReport {
        schema: SCHEMA_VERSION,
        config: cfg.clone(),
        timestamp,
        items,
        summary,
    })
}

fn run_item(
    spec: &ItemSpec,
    cfg: &RunConfig,
    custom: bool,
    variants: &[MetricVariant],
) -> VerificationItem {
    let mk = |status: Status, out: Option<Outcome>, note: Option<String>| VerificationItem {
        id: spec.id.to_string(),
        status,
        max_abs_err: out.as_ref().map(|o| o.max_abs).unwrap_or(0.0),
        max_rel_err: out.as_ref().map(|o| o.max_rel).unwrap_or(0.0),
        tol: spec.tol,
        n_samples: out.as_ref().map(|o| o.n).unwrap_or(0),
        worst_sample: out.and_then(|o| o.worst),
        note,
    };
    let note = spec.note.map(|s| s.to_string());

    // variant gating
    let active: Vec<MetricVariant> = spec
        .variants
        .iter()
        .copied()
        .filter(|v| variants.contains(v))
        .collect();
    if !active.is_empty() || spec.variants.is_empty() {
        // fall through
    }
    if active.is_empty() {
        return mk(Status::NotApplicable, None, Some("variant not selected".into()));
    }

    // fixture resolution
    let fixture_list: Vec<(String, String)> = if custom {
        let mspec = cfg.manifold.clone().unwrap_or_else(|| "euclidean(2)".into());
        let ftext = cfg.f.clone().unwrap_or_else(|| "1".into());
        vec![(mspec, ftext)]
    } else {
        spec.fixtures
            .iter()
            .map(|(m, f)| (m.to_string(), f.to_string()))
            .collect()
    };
    let mut fxs = Vec::new();
    for (mspec, ftext) in fixture_list {
        let mf = match manifold_from_spec(&mspec) {
            Ok(mf) => mf,
            Err(e) => return mk(Status::Error, None, Some(e.to_string())),
        };
        let f = match ScalingField::from_str(&ftext, mf.dim()) {
            Ok(f) => f,
            Err(e) => return mk(Status::Error, None, Some(e.to_string())),
        };
        if custom && !(spec.applicable)(&mf, &f) {
            return mk(
                Status::NotApplicable,
                None,
                Some("fixture does not satisfy the item hypothesis".into()),
            );
        }
        fxs.push(Fx {
            mf,
            f,
            mspec,
            ftext,
        });
    }

    let env = EvalEnv {
        fxs,
        variants: active,
        seed: item_seed(cfg.seed, spec.id),
        samples: cfg.samples,
    };
    match (spec.eval)(&env) {
        Ok(out) => {
            let confirmed = out
                .confirmed_override
                .unwrap_or(out.max_rel <= spec.tol);
            let status = if confirmed {
                Status::Confirmed
            } else {
                Status::Deviation
            };
            mk(status, Some(out), note)
        }
        Err(e) => mk(Status::Error, None, Some(e.to_string())),
    }
}

// ---------------------------------------------------------------------
// shared evaluation helpers

fn worst_of(fx: &Fx, s: &Sample, detail: String) -> WorstSample {
    WorstSample {
        manifold: fx.mspec.clone(),
        f: fx.ftext.clone(),
        x: s.tp.x.clone(),
        u: s.tp.u.clone(),
        detail,
    }
}

fn third_vector(s: &Sample) -> Vec<f64> {
    s.frame[0]
        .iter()
        .zip(&s.frame[1])
        .map(|(a, b)| a + 0.5 * b)
        .collect()
}

fn compare_frames(
    out: &mut Outcome,
    closed: &crate::sasaki::FrameResult,
    oracle: &LiftDecomposition,
    fx: &Fx,
    s: &Sample,
    tag: &str,
) {
    for (k, (c, o)) in closed.hor.iter().zip(&oracle.hor).enumerate() {
        out.add((c - o).abs(), *o, || worst_of(fx, s, format!("{tag} hor[{k}]")));
    }
    for (k, (c, o)) in closed.ver.iter().zip(&oracle.ver).enumerate() {
        out.add((c - o).abs(), *o, || worst_of(fx, s, format!("{tag} ver[{k}]")));
    }
}

fn for_samples<F>(env: &EvalEnv, count: usize, mut body: F) -> Result<Outcome>
where
    F: FnMut(&mut Outcome, &Fx, &Sample) -> Result<()>,
{
    let mut out = Outcome::new();
    for fx in &env.fxs {
        let seed = item_seed(env.seed, &format!("{}|{}", fx.mspec, fx.ftext));
        for s in sample_stream(seed, &fx.mf, count)? {
            body(&mut out, fx, &s)?;
            out.bump();
        }
    }
    Ok(out)
}

fn lift_patterns(s: &Sample, u: &[f64]) -> Vec<(String, Lift, Lift)> {
    let x = s.frame[0].clone();
    let y = s.frame[1].clone();
    let _ = u;
    vec![
        ("hh".into(), Lift::Horizontal(x.clone()), Lift::Horizontal(y.clone())),
        ("hv".into(), Lift::Horizontal(x.clone()), Lift::Vertical(y.clone())),
        ("vh".into(), Lift::Vertical(x.clone()), Lift::Horizontal(y.clone())),
        ("vv".into(), Lift::Vertical(x), Lift::Vertical(y)),
    ]
}

#[derive(Clone, Copy)]
enum CurvPattern {
    Vvv,
    Hvv,
    Vvh,
    Hvh,
    Hhv,
    Hhh,
}

impl CurvPattern {
    fn lifts(self, x: &[f64], y: &[f64], z: &[f64]) -> (Lift, Lift, Lift) {
        let h = |v: &[f64]| Lift::Horizontal(v.to_vec());
        let v = |w: &[f64]| Lift::Vertical(w.to_vec());
        match self {
            CurvPattern::Vvv => (v(x), v(y), v(z)),
            CurvPattern::Hvv => (h(x), v(y), v(z)),
            CurvPattern::Vvh => (v(x), v(y), h(z)),
            CurvPattern::Hvh => (h(x), v(y), h(z)),
            CurvPattern::Hhv => (h(x), h(y), v(z)),
            CurvPattern::Hhh => (h(x), h(y), h(z)),
        }
    }

    fn tag(self) -> &'static str {
        match self {
            CurvPattern::Vvv => "vvv",
            CurvPattern::Hvv => "hvv",
            CurvPattern::Vvh => "vvh",
            CurvPattern::Hvh => "hvh",
            CurvPattern::Hhv => "hhv",
            CurvPattern::Hhh => "hhh",
        }
    }
}

// ---------------------------------------------------------------------
// item evaluators

fn eval_metric_compatibility(env: &EvalEnv) -> Result<Outcome> {
    let variants = env.variants.clone();
    for_samples(env, env.samples.min(10), |out, fx, s| {
        for variant in &variants {
            let bm = BundleMetric::assemble(*variant, fx.mf.clone(), fx.f.clone());
            let mj = MetricJets::compute(&bm, &bundle::point_coords(&s.tp), 1)?;
            let res = engine::metric_compatibility_residual(&mj);
            let scale = linalg::norm_inf(&mj.g_vals());
            out.add(res, scale, || worst_of(fx, s, format!("{}", variant.name())));
        }
        Ok(())
    })
}

fn eval_torsion_free(env: &EvalEnv) -> Result<Outcome> {
    let variants = env.variants.clone();
    for_samples(env, env.samples.min(10), |out, fx, s| {
        for variant in &variants {
            let bm = BundleMetric::assemble(*variant, fx.mf.clone(), fx.f.clone());
            let gamma = engine::christoffel(&bm, &bundle::point_coords(&s.tp))?;
            let n = gamma.n;
            let mut worst = 0.0_f64;
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        worst = worst.max((gamma.get(k, i, j) - gamma.get(k, j, i)).abs());
                    }
                }
            }
            out.add(worst, 0.0, || worst_of(fx, s, format!("{}", variant.name())));
        }
        Ok(())
    })
}

fn eval_bracket_identity(env: &EvalEnv) -> Result<Outcome> {
    for_samples(env, env.samples.min(10), |out, fx, s| {
        let bm = BundleMetric::assemble(MetricVariant::Sasaki, fx.mf.clone(), fx.f.clone());
        let br = bundle::bracket_hh(&bm, &s.tp, &s.frame[0], &s.frame[1])?;
        let d = decompose(&bm, &s.tp, &br)?;
        let bp = BasePoint::new(&fx.mf, &fx.f, &s.tp.x)?;
        let rxyu = bp.r_apply(&s.frame[0], &s.frame[1], &s.tp.u);
        for k in 0..bp.m {
            out.add((d.ver[k] + rxyu[k]).abs(), rxyu[k], || {
                worst_of(fx, s, format!("ver[{k}]"))
            });
            out.add(d.hor[k].abs(), 0.0, || worst_of(fx, s, format!("hor[{k}]")));
        }
        Ok(())
    })
}

fn eval_first_bianchi(env: &EvalEnv) -> Result<Outcome> {
    let variants = env.variants.clone();
    for_samples(env, env.samples.min(10), |out, fx, s| {
        for variant in &variants {
            let bm = BundleMetric::assemble(*variant, fx.mf.clone(), fx.f.clone());
            let mj = MetricJets::compute(&bm, &bundle::point_coords(&s.tp), 2)?;
            let riem = mj.riemann();
            let res = engine::first_bianchi_residual(&riem);
            out.add(res, riem.max_abs(), || {
                worst_of(fx, s, format!("{}", variant.name()))
            });
        }
        Ok(())
    })
}

/// The eight Koszul relations, normalized to 2 g^(nabla_A B, C) with the
/// right-hand sides derived from the Koszul formula (the printed versions
/// mix rescaled and unrescaled pairings on the left).
fn eval_koszul(env: &EvalEnv, relation: usize) -> Result<Outcome> {
    let variants = env.variants.clone();
    for_samples(env, env.samples.min(10), |out, fx, s| {
        let bp = BasePoint::new(&fx.mf, &fx.f, &s.tp.x)?;
        let x = s.frame[0].clone();
        let y = s.frame[1].clone();
        let z = third_vector(s);
        let u = &s.tp.u;
        let xf = bp.x_of_f(&x);
        let yf = bp.x_of_f(&y);
        let zf = bp.x_of_f(&z);
        for variant in &variants {
            let bm = BundleMetric::assemble(*variant, fx.mf.clone(), fx.f.clone());
            let vert = |a: &[f64], b: &[f64]| -> Result<f64> {
                bm.pair(&s.tp, &Lift::Vertical(a.to_vec()), &Lift::Vertical(b.to_vec()))
            };
            let dd = |dir: &Lift, b: &Lift, c: &Lift| -> Result<f64> {
                bundle::pairing_directional_deriv(&bm, &s.tp, dir, b, c)
            };
            let h = |v: &Vec<f64>| Lift::Horizontal(v.clone());
            let v = |w: &Vec<f64>| Lift::Vertical(w.clone());

            let (a, b, c, rhs) = match relation {
                0 => {
                    let rhs = xf * bp.inner(&y, &z) + yf * bp.inner(&z, &x)
                        - zf * bp.inner(&x, &y)
                        + 2.0 * bp.f_val * bp.inner(&bp.gamma_apply(&x, &y), &z);
                    (h(&x), h(&y), h(&z), rhs)
                }
                1 => {
                    let rxyu = bp.r_apply(&x, &y, u);
                    (h(&x), h(&y), v(&z), -vert(&rxyu, &z)?)
                }
                2 => {
                    let rxzu = bp.r_apply(&x, &z, u);
                    (h(&x), v(&y), h(&z), vert(&rxzu, &y)?)
                }
                3 => {
                    let rhs = dd(&h(&x), &v(&y), &v(&z))?
                        - vert(&y, &bp.gamma_apply(&x, &z))?
                        + vert(&z, &bp.gamma_apply(&x, &y))?;
                    (h(&x), v(&y), v(&z), rhs)
                }
                4 => {
                    let ryzu = bp.r_apply(&y, &z, u);
                    (v(&x), h(&y), h(&z), vert(&ryzu, &x)?)
                }
                5 => {
                    let rhs = dd(&h(&y), &v(&z), &v(&x))?
                        - vert(&x, &bp.gamma_apply(&y, &z))?
                        - vert(&z, &bp.gamma_apply(&y, &x))?;
                    (v(&x), h(&y), v(&z), rhs)
                }
                6 => {
                    let rhs = -dd(&h(&z), &v(&x), &v(&y))?
                        + vert(&y, &bp.gamma_apply(&z, &x))?
                        + vert(&x, &bp.gamma_apply(&z, &y))?;
                    (v(&x), v(&y), h(&z), rhs)
                }
                7 => {
                    let rhs = dd(&v(&x), &v(&y), &v(&z))? + dd(&v(&y), &v(&z), &v(&x))?
                        - dd(&v(&z), &v(&x), &v(&y))?;
                    (v(&x), v(&y), v(&z), rhs)
                }
                _ => unreachable!(),
            };

            let nab = oracle_connection(&bm, &s.tp, &a, &b)?;
            let g = bm.matrix_at(&s.tp)?;
            let cv = bm.lift_coords(&s.tp, &c)?;
            let lhs = 2.0 * linalg::quad_form(2 * bp.m, &g, &nab, &cv);
            out.add((lhs - rhs).abs(), rhs, || {
                worst_of(fx, s, format!("{} relation {}", variant.name(), relation + 1))
            });
        }
        Ok(())
    })
}

fn eval_connection(env: &EvalEnv, variant: MetricVariant) -> Result<Outcome> {
    for_samples(env, env.samples, |out, fx, s| {
        let bm = BundleMetric::assemble(variant, fx.mf.clone(), fx.f.clone());
        for (tag, a, b) in lift_patterns(s, &s.tp.u) {
            let closed = match variant {
                MetricVariant::Sasaki => sasaki::connection(&fx.mf, &fx.f, &s.tp, &a, &b)?,
                MetricVariant::CheegerGromoll => cg::connection(&fx.mf, &fx.f, &s.tp, &a, &b)?,
            };
            let oracle = oracle_connection(&bm, &s.tp, &a, &b)?;
            let od = decompose(&bm, &s.tp, &oracle)?;
            compare_frames(out, &closed, &od, fx, s, &tag);
        }
        Ok(())
    })
}

fn eval_sasaki_curvature(env: &EvalEnv, pattern: CurvPattern, reading: Reading) -> Result<Outcome> {
    for_samples(env, env.samples, |out, fx, s| {
        let bm = BundleMetric::assemble(MetricVariant::Sasaki, fx.mf.clone(), fx.f.clone());
        let z = third_vector(s);
        let (a, b, c) = pattern.lifts(&s.frame[0], &s.frame[1], &z);
        let closed = sasaki::curvature(&fx.mf, &fx.f, &s.tp, &a, &b, &c, reading)?;
        let oracle = oracle_curvature(&bm, &s.tp, &a, &b, &c)?;
        let od = decompose(&bm, &s.tp, &oracle)?;
        compare_frames(out, &closed, &od, fx, s, pattern.tag());
        Ok(())
    })
}

fn eval_cg_curvature(env: &EvalEnv, pattern: CurvPattern) -> Result<Outcome> {
    for_samples(env, env.samples, |out, fx, s| {
        let bm = BundleMetric::assemble(MetricVariant::CheegerGromoll, fx.mf.clone(), fx.f.clone());
        let z = third_vector(s);
        let (a, b, c) = pattern.lifts(&s.frame[0], &s.frame[1], &z);
        let closed = cg::curvature(&fx.mf, &fx.f, &s.tp, &a, &b, &c)?;
        let oracle = oracle_curvature(&bm, &s.tp, &a, &b, &c)?;
        let od = decompose(&bm, &s.tp, &oracle)?;
        compare_frames(out, &closed, &od, fx, s, pattern.tag());
        Ok(())
    })
}

fn eval_sasaki_sectional(env: &EvalEnv, pattern: SectionalPattern) -> Result<Outcome> {
    for_samples(env, env.samples, |out, fx, s| {
        let bm = BundleMetric::assemble(MetricVariant::Sasaki, fx.mf.clone(), fx.f.clone());
        let closed = sasaki::sectional(&fx.mf, &fx.f, &s.tp, &s.frame[0], &s.frame[1], pattern)?;
        let (la, lb) = match pattern {
            SectionalPattern::Hh => (
                Lift::Horizontal(s.frame[0].clone()),
                Lift::Horizontal(s.frame[1].clone()),
            ),
            SectionalPattern::Hv => (
                Lift::Horizontal(s.frame[0].clone()),
                Lift::Vertical(s.frame[1].clone()),
            ),
            SectionalPattern::Vv => (
                Lift::Vertical(s.frame[0].clone()),
                Lift::Vertical(s.frame[1].clone()),
            ),
        };
        let va = bm.lift_coords(&s.tp, &la)?;
        let vb = bm.lift_coords(&s.tp, &lb)?;
        let oracle = engine::sectional(&bm, &bundle::point_coords(&s.tp), &va, &vb)?;
        out.add((closed - oracle).abs(), oracle, || {
            worst_of(fx, s, format!("{pattern:?}"))
        });
        Ok(())
    })
}

fn eval_sasaki_scalar(env: &EvalEnv) -> Result<Outcome> {
    for_samples(env, env.samples, |out, fx, s| {
        let bm = BundleMetric::assemble(MetricVariant::Sasaki, fx.mf.clone(), fx.f.clone());
        let closed = sasaki::scalar(&fx.mf, &fx.f, &s.tp)?;
        let oracle = engine::scalar(&bm, &bundle::point_coords(&s.tp))?;
        out.add((closed - oracle).abs(), oracle, || {
            worst_of(fx, s, "scalar".into())
        });
        Ok(())
    })
}

fn eval_sasaki_scalar_frame_sum(env: &EvalEnv) -> Result<Outcome> {
    for_samples(env, env.samples, |out, fx, s| {
        let bp = BasePoint::new(&fx.mf, &fx.f, &s.tp.x)?;
        let frame = bp.orthonormal_frame(None)?;
        let a = sasaki::scalar_at(&bp, &s.tp.u, &frame);
        let b = sasaki::scalar_frame_sum(&bp, &s.tp.u, &frame);
        out.add((a - b).abs(), a, || worst_of(fx, s, "frame sum".into()));
        Ok(())
    })
}

fn eval_flatness(env: &EvalEnv) -> Result<Outcome> {
    let mut out = Outcome::new();
    for fx in &env.fxs {
        let seed = item_seed(env.seed, &format!("{}|{}", fx.mspec, fx.ftext));
        let samples = sample_stream(seed, &fx.mf, env.samples.min(10))?;
        let tps: Vec<TangentPoint> = samples.iter().map(|s| s.tp.clone()).collect();
        let report = sasaki::flatness_probe(&fx.mf, &fx.f, &tps)?;
        for s in &samples {
            out.bump();
            let _ = s;
        }
        let (l, i, j, k) = report.worst_index;
        let tp = report.worst_sample.clone().unwrap_or_else(|| tps[0].clone());
        out.add(report.max_component, 0.0, || WorstSample {
            manifold: fx.mspec.clone(),
            f: fx.ftext.clone(),
            x: tp.x.clone(),
            u: tp.u.clone(),
            detail: format!("component R^{l}_{{{i}{j}{k}}}"),
        });
    }
    Ok(out)
}

fn eval_unflatness(env: &EvalEnv) -> Result<Outcome> {
    let mut out = eval_flatness(env)?;
    // inverted demonstration: confirmed iff some component reaches 1e-3
    out.confirmed_override = Some(out.max_abs >= 1e-3);
    Ok(out)
}

fn eval_sweep(env: &EvalEnv) -> Result<Outcome> {
    let grid = [0.0, 1.0, 2.0, 4.0];
    let mut ok = true;
    let mut out = for_samples(env, env.samples.min(10), |out, fx, s| {
        let vals = sasaki::sectional_sweep(&fx.mf, &fx.f, &s.tp, &s.frame[0], &s.frame[1], &grid)?;
        for w in 1..vals.len() - 1 {
            let rise = vals[w + 1] - vals[w];
            out.add(rise.max(0.0), vals[w], || {
                worst_of(fx, s, format!("t = {} -> {}", grid[w], grid[w + 1]))
            });
        }
        Ok(())
    })?;
    if out.max_abs > 1e-12 {
        ok = false;
    }
    out.confirmed_override = Some(ok);
    Ok(out)
}

fn eval_eq42(env: &EvalEnv) -> Result<Outcome> {
    let mut out = Outcome::new();
    for fx in &env.fxs {
        let seed = item_seed(env.seed, &format!("{}|{}", fx.mspec, fx.ftext));
        let samples = sample_stream(seed, &fx.mf, 3)?;
        let bm = BundleMetric::assemble(MetricVariant::Sasaki, fx.mf.clone(), fx.f.clone());
        for s in &samples {
            let v0: Vec<f64> = s.frame[0].iter().map(|c| 0.4 * c).collect();
            let curve = BaseCurve::geodesic(&fx.mf, &s.tp.x, &v0, 0.3, 1e-3)?;
            let tmax = curve.t_max();
            let ts: Vec<f64> = (1..=3).map(|i| tmax * i as f64 / 4.0).collect();
            for r in geodesics::lift_residual(&bm, &curve, &ts)? {
                let cj = curve.jets(r.t)?;
                let bp = BasePoint::new(&fx.mf, &fx.f, &cj.x)?;
                let combined =
                    (bp.f_val * r.res_a * r.res_a + r.res_b * r.res_b).sqrt();
                out.add((r.oracle_accel - combined).abs(), r.oracle_accel, || {
                    worst_of(fx, s, format!("t = {}", r.t))
                });
                out.bump();
            }
        }
    }
    Ok(out)
}

fn eval_energy(env: &EvalEnv) -> Result<Outcome> {
    let mut out = Outcome::new();
    for fx in &env.fxs {
        let bm = BundleMetric::assemble(MetricVariant::Sasaki, fx.mf.clone(), fx.f.clone());
        let box_scale: f64 = fx.mf.chart_box()[0].1.min(1.0);
        let s0 = BundleState {
            t: 0.0,
            x: vec![-0.6 * box_scale; fx.mf.dim()],
            u: {
                let mut u = vec![0.8; fx.mf.dim()];
                u[0] = 1.4;
                u
            },
            xdot: vec![0.5 * box_scale; fx.mf.dim()],
            udot: vec![0.9; fx.mf.dim()],
            energy: 0.0,
        };
        let traj = geodesics::integrate(&bm, &s0, 1.0, 1e-3)?;
        let drift = traj.energy_drift();
        out.add(drift, 1.0, || WorstSample {
            manifold: fx.mspec.clone(),
            f: fx.ftext.clone(),
            x: s0.x.clone(),
            u: s0.u.clone(),
            detail: "relative energy drift".into(),
        });
        out.bump();
    }
    Ok(out)
}

fn eval_u_pairing(env: &EvalEnv) -> Result<Outcome> {
    for_samples(env, env.samples.max(100), |out, fx, s| {
        let bm = BundleMetric::assemble(MetricVariant::CheegerGromoll, fx.mf.clone(), fx.f.clone());
        let x = &s.frame[0];
        let pair = bm.pair(
            &s.tp,
            &Lift::Vertical(x.clone()),
            &Lift::Vertical(s.tp.u.clone()),
        )?;
        let gxu = crate::manifold::inner(&fx.mf, &s.tp.x, x, &s.tp.u)?;
        out.add((pair - gxu).abs(), gxu, || worst_of(fx, s, "U pairing".into()));
        Ok(())
    })
}

fn eval_q_area(env: &EvalEnv, pattern: cg::PlanePattern) -> Result<Outcome> {
    for_samples(env, env.samples.max(100), |out, fx, s| {
        let bm = BundleMetric::assemble(MetricVariant::CheegerGromoll, fx.mf.clone(), fx.f.clone());
        let bp = BasePoint::new(&fx.mf, &fx.f, &s.tp.x)?;
        let ctx = cg::CgContext::new(&bp, &s.tp.u);
        let closed = cg::q_area_at(&bp, &ctx, &s.frame[0], &s.frame[1], pattern);
        let direct = cg::q_area_direct(&bm, &s.tp, &s.frame[0], &s.frame[1], pattern)?;
        out.add((closed - direct).abs(), direct, || {
            worst_of(fx, s, format!("{pattern:?}"))
        });
        Ok(())
    })
}

fn eval_g_form(env: &EvalEnv, pattern: cg::PlanePattern) -> Result<Outcome> {
    for_samples(env, env.samples, |out, fx, s| {
        let bm = BundleMetric::assemble(MetricVariant::CheegerGromoll, fx.mf.clone(), fx.f.clone());
        let bp = BasePoint::new(&fx.mf, &fx.f, &s.tp.x)?;
        let ctx = cg::CgContext::new(&bp, &s.tp.u);
        let closed = cg::g_form_at(&bp, &ctx, &s.frame[0], &s.frame[1], pattern);
        let oracle = cg::g_form_oracle(&bm, &s.tp, &s.frame[0], &s.frame[1], pattern)?;
        out.add((closed - oracle).abs(), oracle, || {
            worst_of(fx, s, format!("{pattern:?}"))
        });
        Ok(())
    })
}

fn eval_cg_sectional(
    env: &EvalEnv,
    pattern: cg::PlanePattern,
    variant: cg::HhVariant,
) -> Result<Outcome> {
    for_samples(env, env.samples, |out, fx, s| {
        let bm = BundleMetric::assemble(MetricVariant::CheegerGromoll, fx.mf.clone(), fx.f.clone());
        let closed = cg::sectional(&fx.mf, &fx.f, &s.tp, &s.frame[0], &s.frame[1], pattern, variant)?;
        let (la, lb) = cg::plane_lifts(&s.frame[0], &s.frame[1], pattern);
        let va = bm.lift_coords(&s.tp, &la)?;
        let vb = bm.lift_coords(&s.tp, &lb)?;
        let oracle = engine::sectional(&bm, &bundle::point_coords(&s.tp), &va, &vb)?;
        out.add((closed - oracle).abs(), oracle, || {
            worst_of(fx, s, format!("{pattern:?}"))
        });
        Ok(())
    })
}

fn eval_division_consistency(env: &EvalEnv) -> Result<Outcome> {
    for_samples(env, env.samples, |out, fx, s| {
        let bp = BasePoint::new(&fx.mf, &fx.f, &s.tp.x)?;
        let ctx = cg::CgContext::new(&bp, &s.tp.u);
        for pattern in [
            cg::PlanePattern::Hh,
            cg::PlanePattern::Hv,
            cg::PlanePattern::Vv,
        ] {
            let k = cg::sectional_at(
                &bp,
                &ctx,
                &s.frame[0],
                &s.frame[1],
                pattern,
                cg::HhVariant::Division,
            );
            let g = cg::g_form_at(&bp, &ctx, &s.frame[0], &s.frame[1], pattern);
            let q = cg::q_area_at(&bp, &ctx, &s.frame[0], &s.frame[1], pattern);
            out.add((k - g / q).abs(), k, || {
                worst_of(fx, s, format!("{pattern:?}"))
            });
        }
        Ok(())
    })
}

fn eval_space_form_identity(env: &EvalEnv) -> Result<Outcome> {
    for_samples(env, env.samples, |out, fx, s| {
        let kappa = fx
            .mf
            .kappa()
            .ok_or_else(|| GeomError::Config("space-form item needs kappa".into()))?;
        let bp = BasePoint::new(&fx.mf, &fx.f, &s.tp.x)?;
        let ctx = cg::CgContext::new(&bp, &s.tp.u);
        let w = bp.r_apply(&s.tp.u, &s.frame[1], &s.frame[0]);
        let lhs = bp.inner(&w, &w);
        let gxu = ctx.pair_u(&s.frame[0]);
        let rhs = kappa * kappa * gxu * gxu;
        out.add((lhs - rhs).abs(), rhs, || worst_of(fx, s, "identity".into()));
        Ok(())
    })
}

fn eval_prop58_consistency(env: &EvalEnv) -> Result<Outcome> {
    for_samples(env, env.samples, |out, fx, s| {
        let kappa = fx
            .mf
            .kappa()
            .ok_or_else(|| GeomError::Config("space-form item needs kappa".into()))?;
        let bp = BasePoint::new(&fx.mf, &fx.f, &s.tp.x)?;
        let ctx = cg::CgContext::new(&bp, &s.tp.u);
        let gxu = ctx.pair_u(&s.frame[0]);
        let gyu = ctx.pair_u(&s.frame[1]);
        let lt = sasaki::l_f(&bp, &s.frame[0], &s.frame[1]);
        for pattern in [
            cg::PlanePattern::Hh,
            cg::PlanePattern::Hv,
            cg::PlanePattern::Vv,
        ] {
            let direct = cg::sectional_at(
                &bp,
                &ctx,
                &s.frame[0],
                &s.frame[1],
                pattern,
                cg::HhVariant::Statement,
            );
            let via = cg::sectional_constant_kappa(
                kappa, bp.f_val, gxu, gyu, ctx.alpha, pattern, lt,
            );
            out.add((direct - via).abs(), direct, || {
                worst_of(fx, s, format!("{pattern:?}"))
            });
        }
        Ok(())
    })
}

fn eval_adapted_frame(env: &EvalEnv) -> Result<Outcome> {
    for_samples(env, env.samples.max(100), |out, fx, s| {
        let fs = crate::manifold::norm_r(&fx.mf, &s.tp)?;
        if fs.r < 1e-3 {
            return Ok(()); // adapted frame needs u != 0
        }
        let bm = BundleMetric::assemble(
            MetricVariant::CheegerGromoll,
            fx.mf.clone(),
            ScalingField::one(),
        );
        let frame = cg::adapted_frame(&fx.mf, &s.tp)?;
        let n = 2 * fx.mf.dim();
        let g = bm.matrix_at(&s.tp)?;
        for (i, a) in frame.iter().enumerate() {
            for (j, b) in frame.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                let got = linalg::quad_form(n, &g, a, b);
                out.add((got - expect).abs(), expect, || {
                    worst_of(fx, s, format!("gramian[{i}][{j}]"))
                });
            }
        }
        Ok(())
    })
}

fn eval_cg_scalar(env: &EvalEnv, base: cg::ScalarBase) -> Result<Outcome> {
    for_samples(env, env.samples, |out, fx, s| {
        let bm = BundleMetric::assemble(MetricVariant::CheegerGromoll, fx.mf.clone(), fx.f.clone());
        let closed = cg::scalar(&fx.mf, &fx.f, &s.tp, base)?;
        let oracle = engine::scalar(&bm, &bundle::point_coords(&s.tp))?;
        out.add((closed - oracle).abs(), oracle, || {
            worst_of(fx, s, "scalar".into())
        });
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The canonical proposition list, also the documentation of record
    /// for report consumers. The registry must match it exactly.
    const DOCUMENTED_IDS: &[&str] = &[
        "oracle.metric_compatibility",
        "oracle.torsion_free",
        "oracle.bracket_identity",
        "oracle.first_bianchi",
        "lemma2.2.i",
        "lemma2.2.ii",
        "lemma2.2.iii",
        "lemma2.2.iv",
        "lemma2.2.v",
        "lemma2.2.vi",
        "lemma2.2.vii",
        "lemma2.2.viii",
        "sasaki.prop3.2.unit_f",
        "sasaki.prop3.2.general_f",
        "sasaki.prop3.4.i",
        "sasaki.prop3.4.ii",
        "sasaki.prop3.4.iii",
        "sasaki.prop3.4.iv.proof",
        "sasaki.prop3.4.iv.statement",
        "sasaki.prop3.4.v.proof",
        "sasaki.prop3.4.v.statement",
        "sasaki.prop3.4.vi",
        "sasaki.prop3.7.i",
        "sasaki.prop3.7.ii",
        "sasaki.prop3.7.iii",
        "sasaki.prop3.9",
        "sasaki.prop3.9.frame_sum",
        "sasaki.thm3.5.flatness",
        "sasaki.cor3.6.unflatness",
        "sasaki.thm3.8.sweep",
        "geodesics.eq4.2",
        "geodesics.energy_conservation",
        "cg.prop5.2.unit_f",
        "cg.prop5.2.general_f",
        "cg.prop5.2.u_pairing",
        "cg.prop5.4.i",
        "cg.prop5.4.ii",
        "cg.prop5.4.iii",
        "cg.prop5.4.iv",
        "cg.prop5.4.v",
        "cg.prop5.4.vi",
        "cg.lemma5.5.i",
        "cg.lemma5.5.ii",
        "cg.lemma5.5.iii",
        "cg.lemma5.6.i",
        "cg.lemma5.6.ii",
        "cg.lemma5.6.iii",
        "cg.prop5.7.i.statement",
        "cg.prop5.7.i.division",
        "cg.prop5.7.ii",
        "cg.prop5.7.iii",
        "cg.prop5.7.division_consistency",
        "cg.prop5.8.curvature_identity",
        "cg.prop5.8.consistency",
        "cg.lemma5.11.frame",
        "cg.prop5.12.base_Sp",
        "cg.prop5.12.base_S_over_f",
    ];

    #[test]
    fn registry_matches_documented_list() {
        let ids = registry_ids();
        assert_eq!(ids, DOCUMENTED_IDS, "registry and documented list diverged");
    }

    #[test]
    fn must_confirm_is_subset_of_registry() {
        let ids = registry_ids();
        for id in MUST_CONFIRM {
            assert!(ids.contains(id), "unknown MUST_CONFIRM id {id}");
        }
    }

    #[test]
    fn item_ids_unique() {
        let mut ids = registry_ids();
        ids.sort();
        let before = ids.len();
        ids.dedup();
        assert_eq!(before, ids.len());
    }
}
