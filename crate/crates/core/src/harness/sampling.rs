use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::families::GuardPolicy;
use crate::geom::ParamBox;

pub const DEFAULT_SEED: u64 = 20_240_901;

/// How many points to draw and from where.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplePlan {
    pub count: usize,
    pub seed: u64,
    /// Per-parameter intervals; the family's default box when absent.
    #[serde(rename = "box", skip_serializing_if = "Option::is_none")]
    pub sample_box: Option<Vec<(f64, f64)>>,
    /// Consecutive exclusions tolerated for a single point.
    pub max_rejects: usize,
    /// Guard thresholds overriding the family defaults.
    pub exclusion: GuardPolicy,
}

impl Default for SamplePlan {
    fn default() -> Self {
        Self {
            count: 1000,
            seed: DEFAULT_SEED,
            sample_box: None,
            max_rejects: 1000,
            exclusion: GuardPolicy::default(),
        }
    }
}

impl SamplePlan {
    pub fn new(count: usize, seed: u64) -> Self {
        Self {
            count,
            seed,
            ..Self::default()
        }
    }

    pub fn with_box(mut self, b: Vec<(f64, f64)>) -> Self {
        self.sample_box = Some(b);
        self
    }

    /// The plan's box if set, otherwise `default`; checked against `dim`.
    pub fn resolve_box(&self, default: &ParamBox) -> Result<ParamBox, HarnessError> {
        let b = match &self.sample_box {
            Some(b) => ParamBox(b.clone()),
            None => default.clone(),
        };
        if b.dim() != default.dim() {
            return Err(HarnessError::InvalidPlan(format!(
                "box has {} intervals but the family has {} parameters",
                b.dim(),
                default.dim()
            )));
        }
        if b.0.iter().any(|(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo <= hi)) {
            return Err(HarnessError::InvalidPlan("box intervals must be finite with lo <= hi".into()));
        }
        Ok(b)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.count == 0 {
            return Err(HarnessError::InvalidPlan("count must be positive".into()));
        }
        if self.max_rejects == 0 {
            return Err(HarnessError::InvalidPlan("max_rejects must be positive".into()));
        }
        Ok(())
    }
}

/// Independent random stream for point `index`; identical whether points
/// are evaluated serially or in parallel.
pub fn point_stream(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

pub fn draw_point<R: Rng>(b: &ParamBox, rng: &mut R) -> Vec<f64> {
    b.0.iter()
        .map(|&(lo, hi)| if lo == hi { lo } else { rng.random_range(lo..=hi) })
        .collect()
}

/// Accepted samples in index order.
#[derive(Clone, Debug)]
pub struct Sampled<T> {
    pub values: Vec<(Vec<f64>, T)>,
    pub excluded: usize,
}

/// Draws `plan.count` admissible points from `b` and evaluates each.
///
/// `eval` returns `Ok(None)` for an excluded point, which is then redrawn
/// from the same stream; it may draw further randomness from the stream.
pub fn sample_map<T, F>(plan: &SamplePlan, b: &ParamBox, eval: F) -> Result<Sampled<T>, HarnessError>
where
    T: Send,
    F: Fn(&[f64], &mut ChaCha8Rng) -> Result<Option<T>, HarnessError> + Sync,
{
    plan.validate()?;
    let per_point: Vec<Result<(Vec<f64>, T, usize), HarnessError>> = (0..plan.count)
        .into_par_iter()
        .map(|i| {
            let mut rng = point_stream(plan.seed, i);
            let mut rejects = 0;
            loop {
                let p = draw_point(b, &mut rng);
                if let Some(v) = eval(&p, &mut rng)? {
                    return Ok((p, v, rejects));
                }
                rejects += 1;
                if rejects >= plan.max_rejects {
                    return Err(HarnessError::SamplingExhausted {
                        excluded: rejects,
                        drawn: rejects,
                        reason: format!("point {i}: {rejects} consecutive exclusions"),
                    });
                }
            }
        })
        .collect();
    let mut values = Vec::with_capacity(plan.count);
    let mut excluded = 0;
    for r in per_point {
        let (p, v, rej) = r?;
        excluded += rej;
        values.push((p, v));
    }
    let drawn = excluded + values.len();
    if 2 * excluded >= drawn {
        return Err(HarnessError::SamplingExhausted {
            excluded,
            drawn,
            reason: "at least half of the drawn points were excluded".into(),
        });
    }
    Ok(Sampled { values, excluded })
}
