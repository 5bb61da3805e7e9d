//! Pauli-Jordan and Hadamard two-point kernels of the free massive scalar
//! field in 1+1 dimensions.

use std::fmt;
use std::ops::{Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{bessel_j0, bessel_k0, bessel_y0};

/// An event `(t, x)` in 1+1D Minkowski coordinates, `c = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SpacetimePoint {
    pub t: f64,
    pub x: f64,
}

impl SpacetimePoint {
    pub const fn new(t: f64, x: f64) -> Self {
        Self { t, x }
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.x.is_finite()
    }

    /// Applies the boost `(t, x) -> (t cosh β + x sinh β, x cosh β + t sinh β)`.
    pub fn boosted(self, rapidity: f64) -> Self {
        let (ch, sh) = (rapidity.cosh(), rapidity.sinh());
        Self {
            t: self.t * ch + self.x * sh,
            x: self.x * ch + self.t * sh,
        }
    }
}

impl Sub for SpacetimePoint {
    type Output = SpacetimePoint;

    fn sub(self, rhs: Self) -> Self {
        Self::new(self.t - rhs.t, self.x - rhs.x)
    }
}

impl Neg for SpacetimePoint {
    type Output = SpacetimePoint;

    fn neg(self) -> Self {
        Self::new(-self.t, -self.x)
    }
}

impl fmt::Display for SpacetimePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(t={}, x={})", self.t, self.x)
    }
}

/// Field mass `m > 0` in natural units.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct MassParam(f64);

impl MassParam {
    pub fn new(m: f64) -> Result<Self> {
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::invalid("mass", format!("must be positive and finite, got {m}")));
        }
        Ok(Self(m))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for MassParam {
    type Error = Error;

    fn try_from(m: f64) -> Result<Self> {
        Self::new(m)
    }
}

impl From<MassParam> for f64 {
    fn from(m: MassParam) -> f64 {
        m.0
    }
}

/// Minimum `|λ|` fed to the Hadamard kernel, keeping the logarithmic
/// light-cone singularity finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelGuard {
    lambda_floor: f64,
}

impl KernelGuard {
    pub const DEFAULT_FLOOR: f64 = 1e-18;
    pub const MAX_FLOOR: f64 = 1e-12;

    pub fn new(lambda_floor: f64) -> Result<Self> {
        if !(lambda_floor > 0.0 && lambda_floor <= Self::MAX_FLOOR) {
            return Err(Error::invalid(
                "lambda_floor",
                format!("must lie in (0, {}], got {lambda_floor}", Self::MAX_FLOOR),
            ));
        }
        Ok(Self { lambda_floor })
    }

    /// Builds a guard without the range check. Only meant for fault-injection
    /// runs; any floor outside `(0, 1e-12]` biases every bilinear.
    pub fn new_unchecked(lambda_floor: f64) -> Self {
        Self { lambda_floor }
    }

    pub fn lambda_floor(&self) -> f64 {
        self.lambda_floor
    }
}

impl Default for KernelGuard {
    fn default() -> Self {
        Self {
            lambda_floor: Self::DEFAULT_FLOOR,
        }
    }
}

/// `λ(t, x) = t² − x²`.
#[inline]
pub fn lorentz_interval(p: SpacetimePoint) -> f64 {
    p.t * p.t - p.x * p.x
}

#[inline]
fn sign(t: f64) -> f64 {
    if t > 0.0 {
        1.0
    } else if t < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `Δ_PJ(t, x) = −½ sign(t) θ(λ) J0(m√λ)`, with `θ(0) = 0` and `sign(0) = 0`.
pub fn pauli_jordan_kernel(p: SpacetimePoint, m: MassParam) -> f64 {
    let lambda = lorentz_interval(p);
    if lambda <= 0.0 || p.t == 0.0 {
        return 0.0;
    }
    // m√λ is finite and nonnegative here
    -0.5 * sign(p.t) * bessel_j0(m.0 * lambda.sqrt()).unwrap_or(f64::NAN)
}

/// `H(t, x) = −½ θ(λ) Y0(m√λ) + (1/π) θ(−λ) K0(m√−λ)`, with `|λ|` clamped to
/// the guard floor. `λ = 0` is treated as spacelike.
pub fn hadamard_kernel(p: SpacetimePoint, m: MassParam, guard: KernelGuard) -> f64 {
    let lambda = lorentz_interval(p);
    let magnitude = lambda.abs().max(guard.lambda_floor);
    let arg = m.0 * magnitude.sqrt();
    if lambda > 0.0 {
        -0.5 * bessel_y0(arg).unwrap_or(f64::NAN)
    } else {
        std::f64::consts::FRAC_1_PI * bessel_k0(arg).unwrap_or(f64::NAN)
    }
}

/// A kernel `K(p1 − p2)` that can be integrated against two test functions.
pub trait PointKernel: Sync {
    fn eval(&self, separation: SpacetimePoint) -> f64;
}

impl<F> PointKernel for F
where
    F: Fn(SpacetimePoint) -> f64 + Sync,
{
    fn eval(&self, separation: SpacetimePoint) -> f64 {
        self(separation)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct HadamardKernel {
    pub mass: MassParam,
    pub guard: KernelGuard,
}

impl HadamardKernel {
    pub fn new(mass: MassParam) -> Self {
        Self {
            mass,
            guard: KernelGuard::default(),
        }
    }
}

impl PointKernel for HadamardKernel {
    #[inline]
    fn eval(&self, separation: SpacetimePoint) -> f64 {
        hadamard_kernel(separation, self.mass, self.guard)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PauliJordanKernel {
    pub mass: MassParam,
}

impl PointKernel for PauliJordanKernel {
    #[inline]
    fn eval(&self, separation: SpacetimePoint) -> f64 {
        pauli_jordan_kernel(separation, self.mass)
    }
}
