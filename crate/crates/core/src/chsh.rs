//! Vacuum Bell-CHSH correlator of Weyl operators smeared with diamond bumps.
//!
//! For spacelike pairs `(f, g)` the vacuum expectation of `A_f A_g` is
//! `exp(−½ ‖f + g‖²)` with `‖f + g‖² = H(f,f) + 2H(f,g) + H(g,g)`, so the
//! whole correlator is fixed by eight Hadamard bilinears.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{HadamardKernel, KernelGuard, MassParam, PauliJordanKernel};
use crate::quad::{integrate_bilinear, IntegralEstimate, QuadPlan};
use crate::testfns::{DiamondSide, DiamondTestFunction};

/// Tsirelson's bound `2√2`.
pub const TSIRELSON_BOUND: f64 = 2.0 * std::f64::consts::SQRT_2;
/// Values within this distance above `2√2` still count as a violation.
pub const TSIRELSON_TIE_EPSILON: f64 = 1e-9;

/// The eleven free parameters of a scenario, in table order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshParams {
    pub a: f64,
    pub eta: f64,
    pub b: f64,
    pub sigma: f64,
    pub a_prime: f64,
    pub eta_prime: f64,
    pub b_prime: f64,
    pub sigma_prime: f64,
    pub m: f64,
    pub r: f64,
    pub r_prime: f64,
}

impl ChshParams {
    pub const NAMES: [&'static str; 11] = [
        "a",
        "eta",
        "b",
        "sigma",
        "a_prime",
        "eta_prime",
        "b_prime",
        "sigma_prime",
        "m",
        "r",
        "r_prime",
    ];

    pub fn to_array(&self) -> [f64; 11] {
        [
            self.a,
            self.eta,
            self.b,
            self.sigma,
            self.a_prime,
            self.eta_prime,
            self.b_prime,
            self.sigma_prime,
            self.m,
            self.r,
            self.r_prime,
        ]
    }

    pub fn from_array(v: [f64; 11]) -> Self {
        Self {
            a: v[0],
            eta: v[1],
            b: v[2],
            sigma: v[3],
            a_prime: v[4],
            eta_prime: v[5],
            b_prime: v[6],
            sigma_prime: v[7],
            m: v[8],
            r: v[9],
            r_prime: v[10],
        }
    }

    pub fn scenario(&self) -> Result<ChshScenario> {
        ChshScenario::new(
            DiamondTestFunction::new(DiamondSide::Right, self.r, self.a, self.eta)?,
            DiamondTestFunction::new(DiamondSide::Right, self.r_prime, self.a_prime, self.eta_prime)?,
            DiamondTestFunction::new(DiamondSide::Left, self.r, self.b, self.sigma)?,
            DiamondTestFunction::new(DiamondSide::Left, self.r_prime, self.b_prime, self.sigma_prime)?,
            MassParam::new(self.m)?,
        )
    }
}

/// Three known violating parameter sets with their reference correlator values.
pub const REFERENCE_ROWS: [(ChshParams, f64); 3] = [
    (
        ChshParams {
            a: 0.453107,
            eta: 0.06256,
            b: 0.241230,
            sigma: 0.033623,
            a_prime: 3.008120,
            eta_prime: 4.486029,
            b_prime: 0.699209,
            sigma_prime: 4.096952,
            m: 0.009390,
            r: 1.859616,
            r_prime: 0.840575,
        },
        2.067,
    ),
    (
        ChshParams {
            a: 0.394546,
            eta: 0.170251,
            b: 0.446326,
            sigma: 0.080372,
            a_prime: 4.930245,
            eta_prime: 4.697725,
            b_prime: 3.659304,
            sigma_prime: 12.398896,
            m: 0.000193,
            r: 1.196910,
            r_prime: 1.192083,
        },
        2.071,
    ),
    (
        ChshParams {
            a: 0.693921,
            eta: 0.28891,
            b: 0.299133,
            sigma: 0.082498,
            a_prime: 4.6219,
            eta_prime: 0.397221,
            b_prime: 1.44436,
            sigma_prime: 4.03835,
            m: 0.000359,
            r: 1.34912,
            r_prime: 1.06941,
        },
        2.103,
    ),
];

/// Test functions `(f, f′)` on the right, `(g, g′)` on the left, and the mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshScenario {
    pub f: DiamondTestFunction,
    pub f_prime: DiamondTestFunction,
    pub g: DiamondTestFunction,
    pub g_prime: DiamondTestFunction,
    pub mass: MassParam,
}

impl ChshScenario {
    /// Requires `f, f′` on the right, `g, g′` on the left, `f` and `g`
    /// sharing one radius and `f′`, `g′` sharing another.
    pub fn new(
        f: DiamondTestFunction,
        f_prime: DiamondTestFunction,
        g: DiamondTestFunction,
        g_prime: DiamondTestFunction,
        mass: MassParam,
    ) -> Result<Self> {
        let s = Self::new_relaxed(f, f_prime, g, g_prime, mass)?;
        if f.radius() != g.radius() {
            return Err(Error::invalid("r", "f and g must share one radius"));
        }
        if f_prime.radius() != g_prime.radius() {
            return Err(Error::invalid("r_prime", "f′ and g′ must share one radius"));
        }
        Ok(s)
    }

    /// Like [`ChshScenario::new`] but lets all four radii differ.
    pub fn new_relaxed(
        f: DiamondTestFunction,
        f_prime: DiamondTestFunction,
        g: DiamondTestFunction,
        g_prime: DiamondTestFunction,
        mass: MassParam,
    ) -> Result<Self> {
        if f.side() != DiamondSide::Right || f_prime.side() != DiamondSide::Right {
            return Err(Error::invalid("f", "f and f′ must live in right diamonds"));
        }
        if g.side() != DiamondSide::Left || g_prime.side() != DiamondSide::Left {
            return Err(Error::invalid("g", "g and g′ must live in left diamonds"));
        }
        Ok(Self {
            f,
            f_prime,
            g,
            g_prime,
            mass,
        })
    }

    pub fn params(&self) -> ChshParams {
        ChshParams {
            a: self.f.sharpness(),
            eta: self.f.amplitude(),
            b: self.g.sharpness(),
            sigma: self.g.amplitude(),
            a_prime: self.f_prime.sharpness(),
            eta_prime: self.f_prime.amplitude(),
            b_prime: self.g_prime.sharpness(),
            sigma_prime: self.g_prime.amplitude(),
            m: self.mass.get(),
            r: self.f.radius(),
            r_prime: self.f_prime.radius(),
        }
    }

    /// Reflects every function through `x → −x`, exchanging the roles of
    /// the two wedges.
    pub fn mirrored(&self) -> Self {
        Self {
            f: self.g.mirror(),
            f_prime: self.g_prime.mirror(),
            g: self.f.mirror(),
            g_prime: self.f_prime.mirror(),
            mass: self.mass,
        }
    }

    /// Multiplies all four amplitudes by `scale`, which must be nonzero.
    pub fn with_amplitudes_scaled(&self, scale: f64) -> Result<Self> {
        Ok(Self {
            f: self.f.with_amplitude_scaled(scale)?,
            f_prime: self.f_prime.with_amplitude_scaled(scale)?,
            g: self.g.with_amplitude_scaled(scale)?,
            g_prime: self.g_prime.with_amplitude_scaled(scale)?,
            mass: self.mass,
        })
    }

    /// The eight `(u, v)` pairs in [`BilinearSet`] field order.
    pub fn bilinear_pairs(&self) -> [(&DiamondTestFunction, &DiamondTestFunction); 8] {
        [
            (&self.f, &self.f),
            (&self.f_prime, &self.f_prime),
            (&self.g, &self.g),
            (&self.g_prime, &self.g_prime),
            (&self.f, &self.g),
            (&self.f, &self.g_prime),
            (&self.f_prime, &self.g),
            (&self.f_prime, &self.g_prime),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BilinearSet {
    pub hff: IntegralEstimate,
    pub hfpfp: IntegralEstimate,
    pub hgg: IntegralEstimate,
    pub hgpgp: IntegralEstimate,
    pub hfg: IntegralEstimate,
    pub hfgp: IntegralEstimate,
    pub hfpg: IntegralEstimate,
    pub hfpgp: IntegralEstimate,
}

impl BilinearSet {
    pub const NAMES: [&'static str; 8] = ["Hff", "Hfpfp", "Hgg", "Hgpgp", "Hfg", "Hfgp", "Hfpg", "Hfpgp"];

    pub fn from_array(v: [IntegralEstimate; 8]) -> Self {
        Self {
            hff: v[0],
            hfpfp: v[1],
            hgg: v[2],
            hgpgp: v[3],
            hfg: v[4],
            hfgp: v[5],
            hfpg: v[6],
            hfpgp: v[7],
        }
    }

    pub fn to_array(&self) -> [IntegralEstimate; 8] {
        [
            self.hff, self.hfpfp, self.hgg, self.hgpgp, self.hfg, self.hfgp, self.hfpg, self.hfpgp,
        ]
    }

    pub fn zero() -> Self {
        Self::from_array([IntegralEstimate::exact_zero(0); 8])
    }

    /// The bilinears after scaling every amplitude by `scale`: each one is
    /// quadratic in the amplitudes, so `scale = 0` is allowed here.
    pub fn with_amplitudes_scaled(&self, scale: f64) -> Self {
        Self::from_array(self.to_array().map(|e| e.scaled(scale * scale)))
    }

    pub fn self_terms_positive(&self) -> bool {
        [self.hff, self.hfpfp, self.hgg, self.hgpgp]
            .iter()
            .all(|e| e.value > 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Classification {
    NoViolation,
    Violation,
    AboveTsirelson,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::NoViolation => "NoViolation",
            Classification::Violation => "Violation",
            Classification::AboveTsirelson => "AboveTsirelson",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Classification {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "NoViolation" => Ok(Classification::NoViolation),
            "Violation" => Ok(Classification::Violation),
            "AboveTsirelson" => Ok(Classification::AboveTsirelson),
            other => Err(format!("unknown classification {other:?}")),
        }
    }
}

/// `|C| ≤ 2` is classical, `2 < |C| ≤ 2√2` a violation, anything larger
/// cannot come from a quantum state and signals a numerical fault.
pub fn classify(correlator: f64) -> Classification {
    let c = correlator.abs();
    if c <= 2.0 {
        Classification::NoViolation
    } else if c <= TSIRELSON_BOUND + TSIRELSON_TIE_EPSILON {
        Classification::Violation
    } else {
        Classification::AboveTsirelson
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshResult {
    pub bilinears: BilinearSet,
    pub correlator: f64,
    pub correlator_error: f64,
    pub classification: Classification,
}

impl ChshResult {
    pub fn from_bilinears(bilinears: BilinearSet) -> Self {
        let (correlator, correlator_error) = correlator_from_bilinears(&bilinears);
        Self {
            bilinears,
            correlator,
            correlator_error,
            classification: classify(correlator),
        }
    }
}

/// The four norms `‖u + v‖²` entering the correlator, as (value, variance).
fn exponent_arguments(b: &BilinearSet) -> [(f64, f64); 4] {
    let norm = |uu: &IntegralEstimate, uv: &IntegralEstimate, vv: &IntegralEstimate| {
        (
            uu.value + 2.0 * uv.value + vv.value,
            uu.std_error.powi(2) + 4.0 * uv.std_error.powi(2) + vv.std_error.powi(2),
        )
    };
    [
        norm(&b.hff, &b.hfg, &b.hgg),
        norm(&b.hfpfp, &b.hfpg, &b.hgg),
        norm(&b.hff, &b.hfgp, &b.hgpgp),
        norm(&b.hfpfp, &b.hfpgp, &b.hgpgp),
    ]
}

/// The four Weyl expectation values `exp(−½‖u + v‖²)` in correlator order.
pub fn correlator_terms(b: &BilinearSet) -> [f64; 4] {
    exponent_arguments(b).map(|(x, _)| (-0.5 * x).exp())
}

/// Correlator and its first-order propagated error, treating the four
/// exponentials as independent.
pub fn correlator_from_bilinears(b: &BilinearSet) -> (f64, f64) {
    let args = exponent_arguments(b);
    let mut c = 0.0;
    let mut var = 0.0;
    for (i, (x, var_x)) in args.into_iter().enumerate() {
        let term = (-0.5 * x).exp();
        c += if i == 3 { -term } else { term };
        var += 0.25 * term * term * var_x;
    }
    (c, var.sqrt())
}

pub fn hadamard_bilinear(
    u: &DiamondTestFunction,
    v: &DiamondTestFunction,
    m: MassParam,
    plan: &QuadPlan,
) -> Result<IntegralEstimate> {
    hadamard_bilinear_guarded(u, v, m, KernelGuard::default(), plan)
}

pub fn hadamard_bilinear_guarded(
    u: &DiamondTestFunction,
    v: &DiamondTestFunction,
    m: MassParam,
    guard: KernelGuard,
    plan: &QuadPlan,
) -> Result<IntegralEstimate> {
    integrate_bilinear(u, v, &HadamardKernel { mass: m, guard }, plan)
}

/// Smeared commutator function; vanishes for spacelike-separated supports.
pub fn pauli_jordan_bilinear(
    u: &DiamondTestFunction,
    v: &DiamondTestFunction,
    m: MassParam,
    plan: &QuadPlan,
) -> Result<IntegralEstimate> {
    integrate_bilinear(u, v, &PauliJordanKernel { mass: m }, plan)
}

pub fn chsh_correlator(s: &ChshScenario, plan: &QuadPlan) -> Result<ChshResult> {
    chsh_correlator_guarded(s, KernelGuard::default(), plan)
}

pub fn chsh_correlator_guarded(
    s: &ChshScenario,
    guard: KernelGuard,
    plan: &QuadPlan,
) -> Result<ChshResult> {
    plan.validate()?;
    chsh_correlator_with(s, |u, v| hadamard_bilinear_guarded(u, v, s.mass, guard, plan))
}

/// Computes each of the eight bilinears once with `bilinear` (in parallel,
/// collected in fixed order) and assembles the correlator.
pub fn chsh_correlator_with<E>(s: &ChshScenario, bilinear: E) -> Result<ChshResult>
where
    E: Fn(&DiamondTestFunction, &DiamondTestFunction) -> Result<IntegralEstimate> + Sync,
{
    let values = s
        .bilinear_pairs()
        .par_iter()
        .map(|(u, v)| bilinear(u, v))
        .collect::<Result<Vec<_>>>()?;
    let arr: [IntegralEstimate; 8] = values.try_into().expect("eight bilinears");
    Ok(ChshResult::from_bilinears(BilinearSet::from_array(arr)))
}
