//! Reference values computed without touching the library's own numerics.
#![allow(dead_code)]

use std::f64::consts::PI;

use diamond_chsh::{ChshParams, DiamondSide, DiamondTestFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gl_nodes(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        let mut x = (PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Composite 20-point Gauss-Legendre over `[lo, hi]` split into `panels`.
pub fn composite(f: impl Fn(f64) -> f64, lo: f64, hi: f64, panels: usize) -> f64 {
    thread_local! {
        static NODES: Vec<(f64, f64)> = gl_nodes(20);
    }
    NODES.with(|nodes| {
        let h = (hi - lo) / panels as f64;
        let mut total = 0.0;
        for p in 0..panels {
            let mid = lo + (p as f64 + 0.5) * h;
            let mut s = 0.0;
            for &(x, w) in nodes {
                s += w * f(mid + 0.5 * h * x);
            }
            total += 0.5 * h * s;
        }
        total
    })
}

/// J0(x) = (1/π) ∫₀^π cos(x sin θ) dθ, periodic trapezoid rule.
pub fn j0_ref(x: f64) -> f64 {
    let n = 64 + (x as usize);
    let n = 2 * n;
    let mut s = 0.0;
    for k in 0..n {
        s += (x * (PI * k as f64 / n as f64).sin()).cos();
    }
    s / n as f64
}

/// Y0(x) = (1/π) ∫₀^π sin(x sin θ) dθ − (2/π) ∫₀^∞ exp(−x sinh t) dt.
pub fn y0_ref(x: f64) -> f64 {
    let osc_panels = 16 + (x.ceil() as usize);
    let first = composite(|th| (x * th.sin()).sin(), 0.0, PI, osc_panels) / PI;
    let tail_end = (60.0 / x).asinh();
    let panels = (tail_end / 0.25).ceil() as usize + 1;
    let second = composite(|t| (-x * t.sinh()).exp(), 0.0, tail_end, panels);
    first - 2.0 / PI * second
}

/// K0(x) = ∫₀^∞ exp(−x cosh t) dt, computed as e^{−x} ∫ exp(−x (cosh t − 1)).
pub fn k0_ref(x: f64) -> f64 {
    let end = (1.0 + 60.0 / x).acosh();
    let panels = (end / 0.25).ceil() as usize + 1;
    // cosh t − 1 = 2 sinh²(t/2) keeps small-t values accurate.
    let inner = composite(|t| (-2.0 * x * (0.5 * t).sinh().powi(2)).exp(), 0.0, end, panels);
    (-x).exp() * inner
}

/// `∫∫ f dt dx` over the diamond, via the level-set reduction `dA = 4 d dd`.
pub fn bump_integral(f: &DiamondTestFunction) -> f64 {
    let r = f.radius();
    let a = f.sharpness();
    f.amplitude()
        * composite(
            |d| {
                let gap = r * r - d * d;
                if gap <= 0.0 {
                    0.0
                } else {
                    4.0 * d * (-a / gap).exp()
                }
            },
            0.0,
            r,
            64,
        )
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_bump(rng: &mut ChaCha8Rng, side: DiamondSide) -> DiamondTestFunction {
    let r = rng.random_range(0.5..2.5);
    let a = rng.random_range(0.05..3.0);
    let eta = rng.random_range(0.1..3.0);
    DiamondTestFunction::new(side, r, a, eta).unwrap()
}

pub fn random_mass(rng: &mut ChaCha8Rng) -> f64 {
    10f64.powf(rng.random_range(-4.0..-1.0))
}

/// Parameters in the regime used by the default search box.
pub fn random_params(rng: &mut ChaCha8Rng) -> ChshParams {
    ChshParams {
        a: rng.random_range(0.05..3.0),
        eta: rng.random_range(0.05..3.0),
        b: rng.random_range(0.05..3.0),
        sigma: rng.random_range(0.05..3.0),
        a_prime: rng.random_range(0.05..3.0),
        eta_prime: rng.random_range(0.05..3.0),
        b_prime: rng.random_range(0.05..3.0),
        sigma_prime: rng.random_range(0.05..3.0),
        m: random_mass(rng),
        r: rng.random_range(0.5..2.5),
        r_prime: rng.random_range(0.5..2.5),
    }
}

/// Runs the CLI in-process and returns (status, stdout, stderr).
pub fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["diamond-chsh"];
    full.extend_from_slice(args);
    let status = diamond_chsh::cli::run(full, &mut out, &mut err);
    (
        status,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

pub fn row_flags(p: &ChshParams) -> Vec<String> {
    let values = p.to_array();
    ["--a", "--eta", "--b", "--sigma", "--a-prime", "--eta-prime", "--b-prime", "--sigma-prime", "--mass", "--r", "--r-prime"]
        .iter()
        .zip(values)
        .flat_map(|(flag, v)| [flag.to_string(), v.to_string()])
        .collect()
}

/// Proptest settings without on-disk regression files.
pub fn prop_config(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config {
        cases,
        failure_persistence: None,
        ..Default::default()
    }
}
