//! Bell-CHSH correlators of Weyl operators for a free massive real scalar
//! field in 1+1D Minkowski spacetime, smeared with smooth bumps supported in
//! causal diamonds.
//!
//! The layers build on each other:
//!
//! * [`special`]: J0, Y0, K0 on the positive axis.
//! * [`kernels`]: Pauli-Jordan and Hadamard two-point kernels.
//! * [`testfns`]: diamond bump functions.
//! * [`quad`]: replicated quasi-Monte Carlo for the 4D smeared bilinears,
//!   plus a tensor Gauss-Legendre cross-check.
//! * [`chsh`]: the eight bilinears, the correlator and its classification.
//! * [`search`]: random parameter search and record files.
//! * [`cli`]: the `diamond-chsh` command line.
//!
//! ```
//! use diamond_chsh::{chsh_correlator, ChshParams, QuadPlan, REFERENCE_ROWS};
//!
//! let params: ChshParams = REFERENCE_ROWS[0].0;
//! let plan = QuadPlan::new(1 << 10, 4, 7).unwrap();
//! let result = chsh_correlator(&params.scenario().unwrap(), &plan).unwrap();
//! assert!(result.correlator.is_finite());
//! ```

pub mod chsh;
pub mod cli;
pub mod error;
pub mod kernels;
pub mod quad;
pub mod search;
pub mod special;
pub mod testfns;

pub use chsh::{
    chsh_correlator, chsh_correlator_with, classify, correlator_from_bilinears, hadamard_bilinear,
    pauli_jordan_bilinear, BilinearSet, ChshParams, ChshResult, ChshScenario, Classification,
    REFERENCE_ROWS, TSIRELSON_BOUND,
};
pub use error::{Error, Result};
pub use kernels::{
    hadamard_kernel, lorentz_interval, pauli_jordan_kernel, HadamardKernel, KernelGuard, MassParam,
    PauliJordanKernel, PointKernel, SpacetimePoint,
};
pub use quad::{integrate_bilinear, integrate_tensor_oracle, IntegralEstimate, QuadPlan};
pub use search::{
    load_records, persist_records, random_search, sample_params, ParamRanges, RecordSummary,
    SearchRecord,
};
pub use special::{bessel_j0, bessel_k0, bessel_y0};
pub use testfns::{BoundingBox, DiamondSide, DiamondTestFunction};
