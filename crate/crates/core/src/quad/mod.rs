//! Four-dimensional integration of `u(p1) K(p1 − p2) v(p2)` over two diamonds.
//!
//! The production path is replicated quasi-Monte Carlo: a 4D Sobol stream,
//! independently shifted per replicate, mapped affinely onto the product of
//! the two support boxes. The spread of the replicate means gives the error
//! bar. A tensor Gauss-Legendre rule serves as a deterministic cross-check.

pub mod gauss_legendre;
pub mod sobol;
pub mod summation;
mod tensor;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::PointKernel;
use crate::testfns::DiamondTestFunction;

pub use gauss_legendre::gauss_legendre_unit;
pub use sobol::{low_discrepancy_stream, SobolSequence};
pub use summation::CompensatedSum;
pub use tensor::{integrate_tensor_oracle, tensor_oracle_with_error};

/// Sampling budget and seed for one bilinear.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadPlan {
    pub points_per_replicate: usize,
    pub replicates: usize,
    pub seed: u64,
    pub target_rel_error: f64,
}

impl Default for QuadPlan {
    fn default() -> Self {
        Self {
            points_per_replicate: 1 << 16,
            replicates: 16,
            seed: 0,
            target_rel_error: 1e-3,
        }
    }
}

impl QuadPlan {
    pub fn new(points_per_replicate: usize, replicates: usize, seed: u64) -> Result<Self> {
        let plan = Self {
            points_per_replicate,
            replicates,
            seed,
            ..Self::default()
        };
        plan.validate()?;
        Ok(plan)
    }

    /// The cheap plan used to screen search candidates (2^12 x 4).
    pub fn screening(seed: u64) -> Self {
        Self {
            points_per_replicate: 1 << 12,
            replicates: 4,
            seed,
            target_rel_error: 1e-2,
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates < 2 {
            return Err(Error::invalid(
                "replicates",
                format!("need at least 2 for an error estimate, got {}", self.replicates),
            ));
        }
        let n = self.points_per_replicate;
        if n == 0 || !n.is_power_of_two() || n > 1 << 31 {
            return Err(Error::invalid(
                "points_per_replicate",
                format!("must be a power of two up to 2^31, got {n}"),
            ));
        }
        if !(self.target_rel_error.is_finite() && self.target_rel_error > 0.0) {
            return Err(Error::invalid(
                "target_rel_error",
                format!("must be positive, got {}", self.target_rel_error),
            ));
        }
        Ok(())
    }

    pub fn total_points(&self) -> usize {
        self.points_per_replicate * self.replicates
    }

    /// Shift vector of replicate `index`, drawn from stream `index` of a
    /// ChaCha generator keyed by the plan seed.
    pub fn replicate_shift(&self, index: usize) -> [f64; 4] {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        std::array::from_fn(|_| rng.random::<f64>())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n_points: usize,
}

impl IntegralEstimate {
    pub fn exact_zero(n_points: usize) -> Self {
        Self {
            value: 0.0,
            std_error: 0.0,
            n_points,
        }
    }

    pub fn relative_error(&self) -> f64 {
        if self.value == 0.0 {
            if self.std_error == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.std_error / self.value.abs()
        }
    }

    /// Multiplies value and error by `factor` (bilinears scale with the
    /// product of the two amplitudes).
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            value: self.value * factor,
            std_error: self.std_error * factor.abs(),
            n_points: self.n_points,
        }
    }

    /// Combines replicate means into mean and standard error of the mean.
    pub fn from_replicates(means: &[f64], points_per_replicate: usize) -> Self {
        let r = means.len();
        let mean = means.iter().copied().collect::<CompensatedSum>().value() / r as f64;
        let var = if r > 1 {
            means
                .iter()
                .map(|m| (m - mean) * (m - mean))
                .collect::<CompensatedSum>()
                .value()
                / (r as f64 - 1.0)
        } else {
            0.0
        };
        Self {
            value: mean,
            std_error: (var / r as f64).sqrt(),
            n_points: r * points_per_replicate,
        }
    }
}

/// `∫∫ u(p1) K(p1 − p2) v(p2) d²p1 d²p2` by replicated shifted Sobol sampling.
///
/// Replicates run in parallel; each one sums its points sequentially with
/// compensated accumulation, and the replicate means are reduced in index
/// order, so results are bit-identical for any thread count.
pub fn integrate_bilinear<K: PointKernel + ?Sized>(
    u: &DiamondTestFunction,
    v: &DiamondTestFunction,
    kernel: &K,
    plan: &QuadPlan,
) -> Result<IntegralEstimate> {
    plan.validate()?;
    let box_u = u.support_box();
    let box_v = v.support_box();
    let volume = box_u.area() * box_v.area();
    let sequence = SobolSequence::new(4)?;
    let n = plan.points_per_replicate;

    let means = (0..plan.replicates)
        .into_par_iter()
        .map(|replicate| {
            let shift = plan.replicate_shift(replicate);
            let mut acc = CompensatedSum::new();
            for x in sequence.gray_code_points(n as u32, &shift) {
                let p1 = box_u.map_unit(x[0], x[1]);
                let fu = u.evaluate(p1);
                if fu == 0.0 {
                    continue;
                }
                let p2 = box_v.map_unit(x[2], x[3]);
                let fv = v.evaluate(p2);
                if fv == 0.0 {
                    continue;
                }
                let value = fu * kernel.eval(p1 - p2) * fv;
                if !value.is_finite() {
                    return Err(Error::NonFiniteIntegrand { p1, p2, value });
                }
                acc.add(value);
            }
            Ok(volume * acc.value() / n as f64)
        })
        .collect::<Result<Vec<f64>>>()?;

    Ok(IntegralEstimate::from_replicates(&means, n))
}
