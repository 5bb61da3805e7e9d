//! Zeroth-order Bessel functions J0, Y0 and K0 on the positive real axis.
//!
//! Each function is piecewise:
//!
//! * `x <= 2`: ascending power series. For Y0 and K0 the logarithmic term is
//!   carried as `ln(x/2) + γ` so tiny arguments keep full relative accuracy.
//! * `2 < x <= 25` (J0, Y0): Miller backward recurrence over `J_n`, normalized
//!   with `J0 + 2 Σ J_2k = 1`; Y0 follows from the Neumann series.
//! * `x > 25` (J0, Y0): Hankel asymptotic expansion.
//! * `x > 2` (K0): Steed's continued fraction.

use std::f64::consts::{FRAC_2_PI, LN_2, PI};

use crate::error::{Error, Result};

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const SERIES_LIMIT: f64 = 2.0;
const RECURRENCE_LIMIT: f64 = 25.0;

/// Accuracy target for the Bessel routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselAccuracy {
    pub max_relative_error: f64,
}

impl BesselAccuracy {
    /// What the routines in this module are built and tested to.
    pub const SHIPPED: BesselAccuracy = BesselAccuracy {
        max_relative_error: 1e-12,
    };

    pub fn new(max_relative_error: f64) -> Result<Self> {
        if !(max_relative_error > 0.0 && max_relative_error <= 1e-10) {
            return Err(Error::InvalidParameter {
                name: "max_relative_error",
                reason: format!("must lie in (0, 1e-10], got {max_relative_error}"),
            });
        }
        Ok(Self { max_relative_error })
    }
}

impl Default for BesselAccuracy {
    fn default() -> Self {
        Self::SHIPPED
    }
}

/// Stitch points between the piecewise branches, exposed for continuity tests.
pub const STITCH_POINTS_J0_Y0: [f64; 2] = [SERIES_LIMIT, RECURRENCE_LIMIT];
pub const STITCH_POINTS_K0: [f64; 1] = [SERIES_LIMIT];

fn domain(function: &'static str, x: f64) -> Error {
    Error::Domain { function, x }
}

/// `ln(x/2) + γ`, evaluated without forming `ln(x/2)` for tiny `x` first.
#[inline]
fn log_half_plus_gamma(x: f64) -> f64 {
    (x.ln() - LN_2) + EULER_GAMMA
}

/// J0(x) for `x >= 0`.
pub fn bessel_j0(x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(domain("J0", x));
    }
    Ok(if x <= SERIES_LIMIT {
        j0_series(x)
    } else if x <= RECURRENCE_LIMIT {
        miller_j0_y0(x).0
    } else {
        hankel_j0_y0(x).0
    })
}

/// Y0(x) for `x > 0`.
pub fn bessel_y0(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(domain("Y0", x));
    }
    Ok(if x <= SERIES_LIMIT {
        y0_series(x)
    } else if x <= RECURRENCE_LIMIT {
        miller_j0_y0(x).1
    } else {
        hankel_j0_y0(x).1
    })
}

/// K0(x) for `x > 0`. Underflows to 0 past roughly x = 745.
pub fn bessel_k0(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(domain("K0", x));
    }
    Ok(if x <= SERIES_LIMIT {
        k0_series(x)
    } else {
        k0_continued_fraction(x)
    })
}

fn j0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..64 {
        let kf = k as f64;
        term *= -q / (kf * kf);
        sum += term;
        if term.abs() <= f64::EPSILON * 0.25 * sum.abs() {
            break;
        }
    }
    sum
}

fn y0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut j0 = 1.0;
    let mut harmonic = 0.0;
    let mut correction = 0.0;
    for k in 1..64 {
        let kf = k as f64;
        term *= -q / (kf * kf);
        harmonic += 1.0 / kf;
        j0 += term;
        // (-1)^(k+1) H_k q^k / (k!)^2 == -H_k * term
        let c = -harmonic * term;
        correction += c;
        if term.abs() * harmonic <= f64::EPSILON * 0.25 * correction.abs().max(j0.abs()) {
            break;
        }
    }
    FRAC_2_PI * (log_half_plus_gamma(x) * j0 + correction)
}

fn k0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut i0 = 1.0;
    let mut harmonic = 0.0;
    let mut correction = 0.0;
    for k in 1..64 {
        let kf = k as f64;
        term *= q / (kf * kf);
        harmonic += 1.0 / kf;
        i0 += term;
        correction += harmonic * term;
        if term * harmonic <= f64::EPSILON * 0.25 * correction.max(i0) {
            break;
        }
    }
    -log_half_plus_gamma(x) * i0 + correction
}

/// Backward recurrence for `J_n(x)` started well above `x`, returning
/// `(J0(x), Y0(x))`.
fn miller_j0_y0(x: f64) -> (f64, f64) {
    const RESCALE_AT: f64 = 1e200;
    const RESCALE_BY: f64 = 1e-200;

    let start = 2 * (((1.2 * x + 30.0) / 2.0).ceil() as usize);
    let two_over_x = 2.0 / x;

    let mut j_above = 0.0;
    let mut j_here = 1e-30;
    // norm = J0 + 2 Σ_{k>=1} J_2k ; neumann = Σ_{k>=1} (-1)^k J_2k / k
    let mut norm = 0.0;
    let mut neumann = 0.0;
    for n in (1..=start).rev() {
        if n % 2 == 0 {
            let k = n / 2;
            norm += 2.0 * j_here;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            neumann += sign * j_here / k as f64;
        }
        let j_below = n as f64 * two_over_x * j_here - j_above;
        j_above = j_here;
        j_here = j_below;
        if j_here.abs() > RESCALE_AT {
            j_here *= RESCALE_BY;
            j_above *= RESCALE_BY;
            norm *= RESCALE_BY;
            neumann *= RESCALE_BY;
        }
    }
    norm += j_here;
    let j0 = j_here / norm;
    let y0 = FRAC_2_PI * log_half_plus_gamma(x) * j0 - 2.0 * FRAC_2_PI * neumann / norm;
    (j0, y0)
}

/// Hankel expansion `sqrt(2/(πx)) (P cos χ ∓ Q sin χ)`, `χ = x − π/4`.
fn hankel_j0_y0(x: f64) -> (f64, f64) {
    let mut p = 1.0;
    let mut q = 0.0;
    let mut coeff = 1.0;
    let mut inv_pow = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        let odd = (2.0 * kf - 1.0) * (2.0 * kf - 1.0);
        coeff *= odd / (8.0 * kf);
        inv_pow /= x;
        let term = coeff * inv_pow;
        if term > last || term < 1e-18 {
            break;
        }
        last = term;
        // P = Σ (-1)^j t_2j, Q = Σ (-1)^(j+1) t_(2j+1)
        match k % 4 {
            0 => p += term,
            1 => q -= term,
            2 => p -= term,
            _ => q += term,
        }
    }
    let (s, c) = x.sin_cos();
    let cos_chi = (c + s) * std::f64::consts::FRAC_1_SQRT_2;
    let sin_chi = (s - c) * std::f64::consts::FRAC_1_SQRT_2;
    let scale = (FRAC_2_PI / x).sqrt();
    (
        scale * (p * cos_chi - q * sin_chi),
        scale * (p * sin_chi + q * cos_chi),
    )
}

/// Steed's continued fraction for K0, valid for `x >= 2`.
fn k0_continued_fraction(x: f64) -> f64 {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 1..10_000 {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let q_next = (q1 - b * q2) / a;
        q1 = q2;
        q2 = q_next;
        q += c * q_next;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 0.5 * f64::EPSILON {
            break;
        }
    }
    (-x + 0.5 * (PI / (2.0 * x)).ln() - s.ln()).exp()
}
