//! Deterministic seeded sampling of tangent points and orthonormal
//! frames. The generator is ChaCha8 seeded from a 64-bit value, so the
//! same seed reproduces the same stream on every platform; per-item
//! sub-seeds are derived with FNV-1a over the item id.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{GeomError, Result};
use crate::manifold::{gram_schmidt, ChartedManifold, TangentPoint};

#[derive(Clone, Debug)]
pub struct Sample {
    pub tp: TangentPoint,
    /// Two g-orthonormal tangent vectors at the base point.
    pub frame: Vec<Vec<f64>>,
}

const MAX_REDRAWS: usize = 1000;

/// Deterministic stream of (tangent point, orthonormal pair) samples:
/// x uniform in the chart box, u uniform in [-1, 1]^m, frame via
/// Gram-Schmidt of random vectors with degenerate draws rejected.
pub fn sample_stream(seed: u64, mf: &ChartedManifold, n: usize) -> Result<Vec<Sample>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = mf.dim();
    let mut out = Vec::with_capacity(n);
    let mut attempts = 0;
    while out.len() < n {
        attempts += 1;
        if attempts > MAX_REDRAWS + n {
            return Err(GeomError::DegenerateInput(
                "sample redraw budget exhausted".into(),
            ));
        }
        let x: Vec<f64> = mf
            .chart_box()
            .iter()
            .map(|(lo, hi)| rng.gen_range(*lo..*hi))
            .collect();
        let u: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let v1: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let v2: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        match gram_schmidt(mf, &x, &[v1, v2]) {
            Ok(frame) => out.push(Sample {
                tp: TangentPoint::new(x, u),
                frame,
            }),
            Err(GeomError::DegenerateInput(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Stable 64-bit FNV-1a hash, used to derive per-item seeds.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

pub fn item_seed(base: u64, id: &str) -> u64 {
    base ^ fnv1a(id.as_bytes())
}
