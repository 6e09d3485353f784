//! Random query rectangles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geom::SemiOpenRect;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AreaDist {
    /// `log(area)` uniform on `[log min, log max]`.
    LogUniform {
        min: f64,
        max: f64,
    },
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorkloadSpec {
    pub queries: usize,
    pub area: AreaDist,
    /// Width-to-height ratio, log-uniform on `[min, max]`.
    pub aspect: (f64, f64),
    pub seed: u64,
}

impl WorkloadSpec {
    pub fn log_uniform(queries: usize, area_min: f64, area_max: f64, seed: u64) -> Self {
        Self {
            queries,
            area: AreaDist::LogUniform {
                min: area_min,
                max: area_max,
            },
            aspect: (0.1, 10.0),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = match self.area {
            AreaDist::LogUniform { min, max } => (min, max),
            AreaDist::Fixed(a) => (a, a),
        };
        if !(lo > 0.0 && lo <= hi && hi <= 1.0) {
            return Err(invalid(format!(
                "areas must satisfy 0 < min <= max <= 1, got [{lo}, {hi}]"
            )));
        }
        let (a, b) = self.aspect;
        if !(a > 0.0 && a <= b && b.is_finite()) {
            return Err(invalid(format!("bad aspect range [{a}, {b}]")));
        }
        Ok(())
    }

    /// The query rectangles, all inside the unit square.
    pub fn generate(&self) -> Result<Vec<SemiOpenRect>> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        Ok((0..self.queries)
            .map(|_| {
                let area = match self.area {
                    AreaDist::LogUniform { min, max } => log_uniform(&mut rng, min, max),
                    AreaDist::Fixed(a) => a,
                };
                rect_with_area(&mut rng, area, self.aspect)
            })
            .collect())
    }
}

fn log_uniform(rng: &mut impl Rng, min: f64, max: f64) -> f64 {
    if min == max {
        return min;
    }
    (min.ln() + rng.gen::<f64>() * (max.ln() - min.ln())).exp()
}

/// A uniformly placed rectangle of the given area (at most 1) inside the
/// unit square. A side that would exceed 1 is clipped and the other side
/// stretched to keep the area.
pub fn rect_with_area(rng: &mut impl Rng, area: f64, aspect: (f64, f64)) -> SemiOpenRect {
    let rho = log_uniform(rng, aspect.0, aspect.1);
    let mut w = (area * rho).sqrt();
    let mut h = area / w;
    if w > 1.0 {
        w = 1.0;
        h = area;
    }
    if h > 1.0 {
        h = 1.0;
        w = area;
    }
    let x = rng.gen::<f64>() * (1.0 - w);
    let y = rng.gen::<f64>() * (1.0 - h);
    SemiOpenRect {
        x_lo: x,
        x_hi: (x + w).min(1.0),
        y_lo: y,
        y_hi: (y + h).min(1.0),
    }
}
