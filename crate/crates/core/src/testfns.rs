//! Smooth bump functions supported in causal diamonds.
//!
//! A right diamond of radius `r` is `|x − r| + |t| ≤ r`, a left one is
//! `|x + r| + |t| ≤ r`. Inside, the function is `η exp(−a / (r² − d²))`
//! with `d = |x ∓ r| + |t|`; it vanishes identically outside.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::SpacetimePoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiamondSide {
    /// Inside the right wedge `x > |t|`.
    Right,
    /// Inside the left wedge `−x > |t|`.
    Left,
}

impl DiamondSide {
    pub fn flipped(self) -> Self {
        match self {
            DiamondSide::Right => DiamondSide::Left,
            DiamondSide::Left => DiamondSide::Right,
        }
    }

    /// Whether `p` lies strictly inside the wedge that holds this side's diamonds.
    pub fn wedge_contains(self, p: SpacetimePoint) -> bool {
        match self {
            DiamondSide::Right => p.x > p.t.abs(),
            DiamondSide::Left => -p.x > p.t.abs(),
        }
    }
}

impl fmt::Display for DiamondSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiamondSide::Right => "right",
            DiamondSide::Left => "left",
        })
    }
}

impl FromStr for DiamondSide {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "right" | "r" => Ok(DiamondSide::Right),
            "left" | "l" => Ok(DiamondSide::Left),
            other => Err(Error::invalid("side", format!("expected right or left, got {other:?}"))),
        }
    }
}

/// Axis-aligned integration box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub t_min: f64,
    pub t_max: f64,
    pub x_min: f64,
    pub x_max: f64,
}

impl BoundingBox {
    pub fn area(&self) -> f64 {
        (self.t_max - self.t_min) * (self.x_max - self.x_min)
    }

    /// Maps `(u, w) ∈ [0,1)²` affinely onto the box.
    #[inline]
    pub fn map_unit(&self, u: f64, w: f64) -> SpacetimePoint {
        SpacetimePoint::new(
            self.t_min + (self.t_max - self.t_min) * u,
            self.x_min + (self.x_max - self.x_min) * w,
        )
    }
}

/// `η exp(−a / (r² − d²))` on one causal diamond.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiamondTestFunction {
    side: DiamondSide,
    radius: f64,
    sharpness: f64,
    amplitude: f64,
}

impl DiamondTestFunction {
    pub fn new(side: DiamondSide, radius: f64, sharpness: f64, amplitude: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::invalid("radius", format!("must be positive, got {radius}")));
        }
        if !(sharpness.is_finite() && sharpness > 0.0) {
            return Err(Error::invalid("sharpness", format!("must be positive, got {sharpness}")));
        }
        if !amplitude.is_finite() || amplitude == 0.0 {
            return Err(Error::invalid(
                "amplitude",
                format!("must be finite and nonzero, got {amplitude}"),
            ));
        }
        Ok(Self {
            side,
            radius,
            sharpness,
            amplitude,
        })
    }

    pub fn side(&self) -> DiamondSide {
        self.side
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn sharpness(&self) -> f64 {
        self.sharpness
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// Spatial center of the diamond (`t = 0`).
    pub fn center_x(&self) -> f64 {
        match self.side {
            DiamondSide::Right => self.radius,
            DiamondSide::Left => -self.radius,
        }
    }

    /// Same diamond with the amplitude multiplied by `scale` (nonzero).
    pub fn with_amplitude_scaled(&self, scale: f64) -> Result<Self> {
        Self::new(self.side, self.radius, self.sharpness, self.amplitude * scale)
    }

    /// Value of the normalized profile `exp(−a / (r² − d²))` at diamond
    /// "distance" `d = |x − c| + |t| ≥ 0`.
    #[inline]
    pub fn profile(&self, d: f64) -> f64 {
        if d >= self.radius {
            return 0.0;
        }
        let gap = (self.radius - d) * (self.radius + d);
        if gap < 1e-300 * self.sharpness {
            return 0.0;
        }
        (-self.sharpness / gap).exp()
    }

    #[inline]
    pub fn evaluate(&self, p: SpacetimePoint) -> f64 {
        let d = (p.x - self.center_x()).abs() + p.t.abs();
        if d >= self.radius {
            return 0.0;
        }
        self.amplitude * self.profile(d)
    }

    pub fn support_box(&self) -> BoundingBox {
        let r = self.radius;
        match self.side {
            DiamondSide::Right => BoundingBox {
                t_min: -r,
                t_max: r,
                x_min: 0.0,
                x_max: 2.0 * r,
            },
            DiamondSide::Left => BoundingBox {
                t_min: -r,
                t_max: r,
                x_min: -2.0 * r,
                x_max: 0.0,
            },
        }
    }

    /// Reflection `x → −x`: flips the side and keeps `(r, a, η)`.
    pub fn mirror(&self) -> Self {
        Self {
            side: self.side.flipped(),
            ..*self
        }
    }
}
