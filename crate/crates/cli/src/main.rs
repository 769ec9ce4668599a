//! `tbcurv` command line: evaluate bundle metrics, closed-form and oracle
//! curvature, integrate geodesics, and run the verification suite.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use tbcurv::bundle::{self, BundleMetric, Lift, MetricVariant};
use tbcurv::cg;
use tbcurv::engine;
use tbcurv::geodesics::{self, BundleState};
use tbcurv::manifold::{
    manifold_from_json, manifold_from_spec, ChartedManifold, ScalingField, TangentPoint,
};
use tbcurv::sample::sample_stream;
use tbcurv::sasaki::{self, Reading};
use tbcurv::verify::{run_suite, RunConfig};
use tbcurv::{GeomError, Result};

#[derive(Parser)]
#[command(
    name = "tbcurv",
    about = "Rescaled Sasaki / Cheeger-Gromoll tangent-bundle geometry with an independent curvature oracle",
    version
)]
struct Cli {
    #[command(flatten)]
    common: Common,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Manifold spec: euclidean(m), sphere_stereo(r), poincare_disk(),
    /// space_form(kappa,m), or @path/to/metric.json
    #[arg(long, global = true)]
    manifold: Option<String>,

    /// Scaling field f(x1..xm) as an expression, e.g. "exp(x1)"
    #[arg(long, global = true)]
    f: Option<String>,

    /// PRNG seed for sampled evaluations
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Number of samples per evaluation
    #[arg(long, global = true, default_value_t = 20)]
    samples: usize,

    /// Relative tolerance for the verification suite
    #[arg(long, global = true, default_value_t = 1e-6)]
    tol: f64,

    /// Write the output to a file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format
    #[arg(long, global = true, default_value = "json")]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in manifold catalog
    Catalog,
    /// Print the assembled 2m x 2m bundle metric at a point
    Metric {
        #[arg(long, default_value = "sasaki")]
        variant: String,
        /// Base point, comma-separated
        #[arg(long)]
        point: String,
        /// Fiber vector, comma-separated
        #[arg(long)]
        fiber: String,
    },
    /// Closed-form vs oracle curvature for one slot pattern over samples
    Curvature {
        #[arg(long, default_value = "sasaki")]
        variant: String,
        /// Slot pattern: vvv|hvv|vvh|hvh|hhv|hhh
        #[arg(long)]
        pattern: String,
        /// closed | oracle | both
        #[arg(long, default_value = "both")]
        mode: String,
    },
    /// Closed-form vs oracle sectional curvature for one plane pattern
    Sectional {
        #[arg(long, default_value = "sasaki")]
        variant: String,
        /// Plane pattern: hh|hv|vv
        #[arg(long)]
        pattern: String,
    },
    /// Closed-form vs oracle scalar curvature over samples
    Scalar {
        #[arg(long, default_value = "sasaki")]
        variant: String,
    },
    /// Integrate a bundle geodesic and emit the trajectory
    Geodesic {
        #[arg(long, default_value = "sasaki")]
        variant: String,
        /// Start state: 4m comma-separated numbers x,u,xdot,udot
        #[arg(long)]
        start: String,
        /// Integration horizon
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        /// Step size
        #[arg(long, default_value_t = 1e-3)]
        h: f64,
    },
    /// Run the proposition adjudication suite and emit the report
    Verify {
        /// "all" runs the pinned fixture matrix; with --manifold/--f the
        /// suite runs against that single fixture instead
        #[arg(long, default_value = "all")]
        suite: String,
        /// Restrict to one metric variant (sasaki|cg); default both
        #[arg(long)]
        variant: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let common = &cli.common;
    match &cli.command {
        Command::Catalog => {
            let text = serde_json::to_string_pretty(&json!([
                {"name": "euclidean", "params": ["dimension"], "box": "[-1,1]^m", "kappa": 0.0},
                {"name": "sphere_stereo", "params": ["radius"], "box": "[-0.5,0.5]^2",
                 "kappa": "1/radius^2"},
                {"name": "poincare_disk", "params": [], "box": "[-0.5,0.5]^2", "kappa": -1.0},
                {"name": "space_form", "params": ["kappa", "dimension"], "box": "[-0.5,0.5]^m",
                 "kappa": "kappa"},
            ]))
            .unwrap();
            emit(common, text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Metric {
            variant,
            point,
            fiber,
        } => {
            let (mf, f) = fixture(common)?;
            let bm = BundleMetric::assemble(parse_variant(variant)?, mf, f);
            let tp = TangentPoint::new(
                parse_vector(point, bm.base_dim())?,
                parse_vector(fiber, bm.base_dim())?,
            );
            let n = 2 * bm.base_dim();
            let g = bm.matrix_at(&tp)?;
            let rows: Vec<Vec<f64>> = (0..n).map(|i| g[i * n..(i + 1) * n].to_vec()).collect();
            let text = serde_json::to_string_pretty(&json!({
                "variant": variant,
                "dimension": bm.base_dim(),
                "point": tp.x,
                "fiber": tp.u,
                "matrix": rows,
            }))
            .unwrap();
            emit(common, text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Curvature {
            variant,
            pattern,
            mode,
        } => {
            let (mf, f) = fixture(common)?;
            let var = parse_variant(variant)?;
            let bm = BundleMetric::assemble(var, mf.clone(), f.clone());
            let mut records = Vec::new();
            for s in sample_stream(common.seed, &mf, common.samples)? {
                let z: Vec<f64> = s.frame[0]
                    .iter()
                    .zip(&s.frame[1])
                    .map(|(a, b)| a + 0.5 * b)
                    .collect();
                let (a, b, c) = lifts_for_pattern(pattern, &s.frame[0], &s.frame[1], &z)?;
                let mut rec = json!({
                    "x": s.tp.x, "u": s.tp.u,
                });
                if mode == "closed" || mode == "both" {
                    let closed = match var {
                        MetricVariant::Sasaki => {
                            sasaki::curvature(&mf, &f, &s.tp, &a, &b, &c, Reading::Proof)?
                        }
                        MetricVariant::CheegerGromoll => {
                            cg::curvature(&mf, &f, &s.tp, &a, &b, &c)?
                        }
                    };
                    rec["closed"] = json!({"hor": closed.hor, "ver": closed.ver});
                }
                if mode == "oracle" || mode == "both" {
                    let o = bundle::oracle_curvature(&bm, &s.tp, &a, &b, &c)?;
                    let od = bundle::decompose(&bm, &s.tp, &o)?;
                    rec["oracle"] = json!({"hor": od.hor, "ver": od.ver});
                }
                if mode == "both" {
                    let closed = &rec["closed"];
                    let oracle = &rec["oracle"];
                    let err = max_component_err(closed, oracle);
                    rec["max_abs_err"] = json!(err);
                }
                records.push(rec);
            }
            let text = serde_json::to_string_pretty(&json!({
                "variant": variant, "pattern": pattern, "mode": mode,
                "manifold": mf.name(), "f": f.text(),
                "seed": common.seed, "samples": records,
            }))
            .unwrap();
            emit(common, text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sectional { variant, pattern } => {
            let (mf, f) = fixture(common)?;
            let var = parse_variant(variant)?;
            let bm = BundleMetric::assemble(var, mf.clone(), f.clone());
            let mut records = Vec::new();
            for s in sample_stream(common.seed, &mf, common.samples)? {
                let closed = match var {
                    MetricVariant::Sasaki => {
                        let pat = sasaki::SectionalPattern::parse(pattern)
                            .ok_or_else(|| GeomError::Config(format!("bad pattern {pattern}")))?;
                        sasaki::sectional(&mf, &f, &s.tp, &s.frame[0], &s.frame[1], pat)?
                    }
                    MetricVariant::CheegerGromoll => {
                        let pat = cg::PlanePattern::parse(pattern)
                            .ok_or_else(|| GeomError::Config(format!("bad pattern {pattern}")))?;
                        cg::sectional(
                            &mf,
                            &f,
                            &s.tp,
                            &s.frame[0],
                            &s.frame[1],
                            pat,
                            cg::HhVariant::Division,
                        )?
                    }
                };
                let (la, lb) = sectional_lifts(pattern, &s.frame[0], &s.frame[1])?;
                let va = bm.lift_coords(&s.tp, &la)?;
                let vb = bm.lift_coords(&s.tp, &lb)?;
                let oracle = engine::sectional(&bm, &bundle::point_coords(&s.tp), &va, &vb)?;
                records.push(json!({
                    "x": s.tp.x, "u": s.tp.u,
                    "closed": closed, "oracle": oracle,
                    "abs_err": (closed - oracle).abs(),
                }));
            }
            let text = serde_json::to_string_pretty(&json!({
                "variant": variant, "pattern": pattern,
                "manifold": mf.name(), "f": f.text(),
                "seed": common.seed, "samples": records,
            }))
            .unwrap();
            emit(common, text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Scalar { variant } => {
            let (mf, f) = fixture(common)?;
            let var = parse_variant(variant)?;
            let bm = BundleMetric::assemble(var, mf.clone(), f.clone());
            let mut records = Vec::new();
            for s in sample_stream(common.seed, &mf, common.samples)? {
                let closed = match var {
                    MetricVariant::Sasaki => sasaki::scalar(&mf, &f, &s.tp)?,
                    MetricVariant::CheegerGromoll => {
                        cg::scalar(&mf, &f, &s.tp, cg::ScalarBase::Plain)?
                    }
                };
                let oracle = engine::scalar(&bm, &bundle::point_coords(&s.tp))?;
                records.push(json!({
                    "x": s.tp.x, "u": s.tp.u,
                    "closed": closed, "oracle": oracle,
                    "abs_err": (closed - oracle).abs(),
                }));
            }
            let text = serde_json::to_string_pretty(&json!({
                "variant": variant,
                "manifold": mf.name(), "f": f.text(),
                "seed": common.seed, "samples": records,
            }))
            .unwrap();
            emit(common, text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Geodesic {
            variant,
            start,
            t,
            h,
        } => {
            let (mf, f) = fixture(common)?;
            let bm = BundleMetric::assemble(parse_variant(variant)?, mf, f);
            let m = bm.base_dim();
            let z = parse_vector(start, 4 * m)?;
            let s0 = BundleState {
                t: 0.0,
                x: z[..m].to_vec(),
                u: z[m..2 * m].to_vec(),
                xdot: z[2 * m..3 * m].to_vec(),
                udot: z[3 * m..].to_vec(),
                energy: 0.0,
            };
            let traj = geodesics::integrate(&bm, &s0, *t, *h)?;
            let text = match common.format.as_str() {
                "csv" => traj.to_csv(),
                _ => serde_json::to_string_pretty(&traj).unwrap(),
            };
            emit(common, text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite, variant } => {
            let variants = match variant.as_deref() {
                None => vec!["sasaki".to_string(), "cg".to_string()],
                Some(v) => vec![v.to_string()],
            };
            let custom = common.manifold.is_some() || common.f.is_some();
            let cfg = RunConfig {
                manifold: common.manifold.clone(),
                f: common.f.clone(),
                seed: common.seed,
                samples: common.samples,
                tol: common.tol,
                variants,
                suite: if custom { "custom".into() } else { suite.clone() },
            };
            let report = run_suite(&cfg)?;
            emit(common, report.to_json())?;
            let ok = report.passes();
            eprintln!(
                "confirmed {} / deviation {} / error {} / n.a. {} -> {}",
                report.summary.confirmed,
                report.summary.deviation,
                report.summary.error,
                report.summary.not_applicable,
                if ok { "PASS" } else { "FAIL" }
            );
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
    }
}

fn fixture(common: &Common) -> Result<(ChartedManifold, ScalingField)> {
    let mspec = common
        .manifold
        .clone()
        .unwrap_or_else(|| "sphere_stereo(1)".into());
    let mf = if let Some(path) = mspec.strip_prefix('@') {
        let text = std::fs::read_to_string(path)
            .map_err(|e| GeomError::Config(format!("cannot read {path}: {e}")))?;
        manifold_from_json(&text)?
    } else {
        manifold_from_spec(&mspec)?
    };
    let f = match &common.f {
        Some(text) => ScalingField::from_str(text, mf.dim())?,
        None => ScalingField::one(),
    };
    Ok((mf, f))
}

fn parse_variant(s: &str) -> Result<MetricVariant> {
    match s {
        "sasaki" => Ok(MetricVariant::Sasaki),
        "cg" | "cheeger-gromoll" | "cheeger_gromoll" => Ok(MetricVariant::CheegerGromoll),
        other => Err(GeomError::Config(format!("unknown variant '{other}'"))),
    }
}

fn parse_vector(s: &str, expect: usize) -> Result<Vec<f64>> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| GeomError::Config(format!("bad number '{p}'")))
        })
        .collect::<Result<_>>()?;
    if v.len() != expect {
        return Err(GeomError::Config(format!(
            "expected {expect} components, got {}",
            v.len()
        )));
    }
    Ok(v)
}

fn lifts_for_pattern(pattern: &str, x: &[f64], y: &[f64], z: &[f64]) -> Result<(Lift, Lift, Lift)> {
    let assign = |c: char, v: &[f64]| -> Result<Lift> {
        match c {
            'h' => Ok(Lift::Horizontal(v.to_vec())),
            'v' => Ok(Lift::Vertical(v.to_vec())),
            _ => Err(GeomError::Config(format!("bad pattern char '{c}'"))),
        }
    };
    let chars: Vec<char> = pattern.chars().collect();
    if chars.len() != 3 {
        return Err(GeomError::Config(format!(
            "curvature pattern must have three slots, got '{pattern}'"
        )));
    }
    Ok((assign(chars[0], x)?, assign(chars[1], y)?, assign(chars[2], z)?))
}

fn sectional_lifts(pattern: &str, x: &[f64], y: &[f64]) -> Result<(Lift, Lift)> {
    match pattern {
        "hh" => Ok((Lift::Horizontal(x.to_vec()), Lift::Horizontal(y.to_vec()))),
        "hv" => Ok((Lift::Horizontal(x.to_vec()), Lift::Vertical(y.to_vec()))),
        "vv" => Ok((Lift::Vertical(x.to_vec()), Lift::Vertical(y.to_vec()))),
        other => Err(GeomError::Config(format!("bad plane pattern '{other}'"))),
    }
}

fn max_component_err(a: &serde_json::Value, b: &serde_json::Value) -> f64 {
    let collect = |v: &serde_json::Value| -> Vec<f64> {
        ["hor", "ver"]
            .iter()
            .flat_map(|k| {
                v[k].as_array()
                    .map(|arr| arr.iter().filter_map(|x| x.as_f64()).collect::<Vec<_>>())
                    .unwrap_or_default()
            })
            .collect()
    };
    collect(a)
        .iter()
        .zip(collect(b).iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn emit(common: &Common, text: String) -> Result<()> {
    match &common.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| GeomError::Config(format!("cannot write output: {e}"))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}
