//! End-to-end acceptance checks, one line per criterion.
//!
//! Run with `cargo test -p diamond-chsh --test acceptance`. The process exits
//! nonzero when any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use common::{cli, j0_ref, k0_ref, random_bump, random_mass, random_params, rng, row_flags, y0_ref};
use diamond_chsh::chsh::correlator_terms;
use diamond_chsh::cli::{EXIT_ABOVE_TSIRELSON, EXIT_OK};
use diamond_chsh::quad::tensor_oracle_with_error;
use diamond_chsh::{
    bessel_j0, bessel_k0, bessel_y0, chsh_correlator, correlator_from_bilinears,
    hadamard_bilinear, hadamard_kernel, load_records, pauli_jordan_bilinear, pauli_jordan_kernel,
    ChshResult, Classification, DiamondSide, HadamardKernel, KernelGuard, MassParam, QuadPlan,
    SpacetimePoint, REFERENCE_ROWS,
};
use rand::Rng;

/// Every classification and exit status seen during the run.
static SEEN: Mutex<Vec<(String, Classification, Option<i32>)>> = Mutex::new(Vec::new());

fn note(source: impl Into<String>, class: Classification, status: Option<i32>) {
    SEEN.lock().unwrap().push((source.into(), class, status));
}

fn note_result(source: impl Into<String>, r: &ChshResult) {
    note(source, r.classification, None);
}

/// Outcome of one criterion: a one-line summary or the reason it failed.
type Outcome = Result<String, String>;

fn check(cond: bool, ok: String, fail: String) -> Outcome {
    if cond {
        Ok(ok)
    } else {
        Err(fail)
    }
}

fn mass(m: f64) -> MassParam {
    MassParam::new(m).unwrap()
}

fn eval_row(row: usize) -> Result<(i32, f64, f64, Classification), String> {
    let mut args = vec!["eval".to_string()];
    args.extend(row_flags(&REFERENCE_ROWS[row].0));
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    let (status, out, err) = cli(&refs);
    if out.is_empty() {
        return Err(format!("row {}: exit {status}: {}", row + 1, err.trim()));
    }
    let mut c = f64::NAN;
    let mut se = f64::NAN;
    let mut class = None;
    for line in out.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        match fields[0] {
            "correlator" => {
                c = fields[1].parse().unwrap();
                se = fields[2].parse().unwrap();
            }
            "classification" => class = Some(fields[1].parse::<Classification>().unwrap()),
            _ => {}
        }
    }
    let class = class.ok_or("no classification row")?;
    note(format!("eval row {}", row + 1), class, Some(status));
    Ok((status, c, se, class))
}

fn criterion_1() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (row, (_, printed)) in REFERENCE_ROWS.iter().enumerate() {
        let start = Instant::now();
        let (status, c, se, class) = eval_row(row)?;
        let pass = (c - printed).abs() <= 0.02 && class == Classification::Violation && status == EXIT_OK;
        ok &= pass;
        lines.push(format!(
            "row {}: C = {c:.5} ± {se:.1e} vs {printed} ({}, {:.0?})",
            row + 1,
            class.as_str(),
            start.elapsed()
        ));
    }
    check(ok, lines.join("; "), lines.join("; "))
}

fn criterion_3() -> Outcome {
    let p = REFERENCE_ROWS[0].0;
    let plan = QuadPlan::screening(3);
    let full = chsh_correlator(&p.scenario().unwrap(), &plan).unwrap();
    note_result("row 1 screening", &full);
    let zero = ChshResult::from_bilinears(full.bilinears.with_amplitudes_scaled(0.0));
    note_result("scale 0", &zero);
    let limit_err = (zero.correlator - 2.0).abs();

    let mut rng = rng(303);
    let mut worst = f64::NEG_INFINITY;
    for draw in 0..5 {
        let mut q = random_params(&mut rng);
        q.a_prime = q.a;
        q.eta_prime = q.eta;
        q.b_prime = q.b;
        q.sigma_prime = q.sigma;
        q.r_prime = q.r;
        let r = chsh_correlator(&q.scenario().unwrap(), &QuadPlan::default().with_seed(draw)).unwrap();
        note_result("degenerate", &r);
        let t = correlator_terms(&r.bilinears);
        assert_eq!(t[0], t[3]);
        worst = worst.max(r.correlator);
    }
    let (c0, e0) = correlator_from_bilinears(&diamond_chsh::BilinearSet::zero());
    let msg = format!("|C(s=0) − 2| = {limit_err:.1e} (zero set {c0}, err {e0}); max degenerate C = {worst:.6}");
    check(limit_err <= 1e-12 && c0 == 2.0 && worst <= 2.0, msg.clone(), msg)
}

fn criterion_4() -> Outcome {
    let mut rng = rng(404);
    let mut zero = 0;
    let mut worst: f64 = 0.0;
    for draw in 0..20 {
        let u = random_bump(&mut rng, DiamondSide::Right);
        let v = random_bump(&mut rng, DiamondSide::Left);
        let m = mass(random_mass(&mut rng));
        let e = pauli_jordan_bilinear(&u, &v, m, &QuadPlan::default().with_seed(draw)).unwrap();
        let z = if e.std_error > 0.0 { e.value.abs() / e.std_error } else if e.value == 0.0 { 0.0 } else { f64::INFINITY };
        worst = worst.max(z);
        if z <= 3.0 {
            zero += 1;
        }
    }
    let msg = format!("{zero}/20 draws within 3 std_error of zero (worst {worst:.2} se)");
    check(zero >= 18, msg.clone(), msg)
}

fn criterion_5() -> Outcome {
    let mut rng = rng(505);
    let mut spacelike = 0;
    let mut selfs = 0;
    let mut worst = [0.0f64; 2];
    for draw in 0..20u64 {
        let u = random_bump(&mut rng, DiamondSide::Right);
        let v = random_bump(&mut rng, DiamondSide::Left);
        let w = random_bump(&mut rng, if draw % 2 == 0 { DiamondSide::Right } else { DiamondSide::Left });
        let m = mass(random_mass(&mut rng));
        let kernel = HadamardKernel::new(m);
        for (k, (a, b, tol)) in [(&u, &v, 3.0), (&w, &w, 5.0)].into_iter().enumerate() {
            let plan = QuadPlan::default().with_seed(2 * draw + k as u64);
            let e = hadamard_bilinear(a, b, m, &plan).unwrap();
            let (oracle, oracle_err) = tensor_oracle_with_error(a, b, &kernel, 4).unwrap();
            let z = (e.value - oracle).abs() / e.std_error.hypot(oracle_err);
            worst[k] = worst[k].max(z);
            if z <= tol {
                if k == 0 {
                    spacelike += 1;
                } else {
                    selfs += 1;
                }
            }
        }
    }
    let msg = format!(
        "spacelike {spacelike}/20 within 3 (worst {:.2}), self {selfs}/20 within 5 (worst {:.2})",
        worst[0], worst[1]
    );
    check(spacelike == 20 && selfs == 20, msg.clone(), msg)
}

fn criterion_6() -> Outcome {
    let (lo, hi) = (1e-12f64.ln(), 100f64.ln());
    let n = 10_000;
    let mut bad = Vec::new();
    let mut worst = [0.0f64; 3];
    for i in 0..n {
        let x = (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp();
        let pairs = [
            (bessel_j0(x).unwrap(), j0_ref(x)),
            (bessel_y0(x).unwrap(), y0_ref(x)),
            (bessel_k0(x).unwrap(), k0_ref(x)),
        ];
        for (k, (got, want)) in pairs.into_iter().enumerate() {
            let diff = (got - want).abs();
            let allowed = (1e-10 * want.abs()).max(1e-12);
            worst[k] = worst[k].max(diff / allowed);
            if diff > allowed && bad.len() < 3 {
                bad.push(format!("{} at {x:e}: {got} vs {want}", ["J0", "Y0", "K0"][k]));
            }
        }
    }
    let msg = format!(
        "{n} points, worst error / tolerance J0 {:.1e}, Y0 {:.1e}, K0 {:.1e}",
        worst[0], worst[1], worst[2]
    );
    check(bad.is_empty(), msg.clone(), format!("{msg}; {}", bad.join("; ")))
}

fn criterion_7() -> Outcome {
    let mut draws = rng(707);
    let mut sym = 0;
    let mut mirror = 0;
    for draw in 0..10u64 {
        let s = random_params(&mut draws).scenario().unwrap();
        let plan = QuadPlan::default().with_seed(3 * draw);
        let f = s.f;
        let g = s.g;
        let fg = hadamard_bilinear(&f, &g, s.mass, &plan).unwrap();
        let gf = hadamard_bilinear(&g, &f, s.mass, &plan.with_seed(3 * draw + 1)).unwrap();
        if (fg.value - gf.value).abs() <= 2.0 * fg.std_error.hypot(gf.std_error) {
            sym += 1;
        }
        let a = chsh_correlator(&s, &plan).unwrap();
        let b = chsh_correlator(&s.mirrored(), &plan.with_seed(3 * draw + 2)).unwrap();
        note_result("symmetry scenario", &a);
        note_result("mirrored scenario", &b);
        if (a.correlator - b.correlator).abs() <= 2.0 * a.correlator_error.hypot(b.correlator_error) {
            mirror += 1;
        }
    }

    let mut points = rng(717);
    let guard = KernelGuard::default();
    let mut parity_fail = 0;
    for _ in 0..100_000 {
        let p = SpacetimePoint::new(points.random_range(-10.0..10.0), points.random_range(-10.0..10.0));
        let m = mass(random_mass(&mut points));
        let q = SpacetimePoint::new(-p.t, -p.x);
        let h = (hadamard_kernel(p, m, guard), hadamard_kernel(q, m, guard));
        let pj = (pauli_jordan_kernel(p, m), pauli_jordan_kernel(q, m));
        if h.0.to_bits() != h.1.to_bits() || pj.0 != -pj.1 {
            parity_fail += 1;
        }
    }
    let msg = format!(
        "H(f,g) = H(g,f) in {sym}/10, mirror C in {mirror}/10 (2 combined se); kernel parity broken at {parity_fail}/100000 points"
    );
    check(sym == 10 && mirror == 10 && parity_fail == 0, msg.clone(), msg)
}

fn search(dir: &std::path::Path, name: &str, extra: &[&str]) -> Result<(i32, Vec<u8>, Duration), String> {
    let path = dir.join(name);
    let path_str = path.to_str().unwrap().to_string();
    let mut args = vec!["search", "--out", &path_str];
    args.extend_from_slice(extra);
    let start = Instant::now();
    let (status, _, err) = cli(&args);
    let elapsed = start.elapsed();
    if status != EXIT_OK && status != EXIT_ABOVE_TSIRELSON {
        return Err(format!("search exit {status}: {}", err.trim()));
    }
    for r in load_records(&path).map_err(|e| e.to_string())? {
        note(format!("search {name}"), r.classification, Some(status));
    }
    Ok((status, std::fs::read(&path).unwrap(), elapsed))
}

fn criterion_8() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let small = ["--samples", "300", "--top-k", "5", "--seed", "8"];
    let (_, one, _) = search(dir.path(), "t1.csv", &[&small[..], &["--threads", "1"]].concat())?;
    let (_, four, _) = search(dir.path(), "t4.csv", &[&small[..], &["--threads", "4"]].concat())?;

    let (_, _, elapsed) = search(dir.path(), "big.csv", &["--samples", "10000", "--seed", "2024"])?;
    let top = load_records(&dir.path().join("big.csv")).map_err(|e| e.to_string())?;
    let top_c = top.first().map_or(f64::NAN, |r| r.correlator);
    let msg = format!(
        "thread-count CSVs identical: {}; 10^4-sample search took {elapsed:.0?}, top C = {top_c:.5}",
        one == four
    );
    check(
        one == four && elapsed <= Duration::from_secs(30 * 60) && top_c.abs() > 2.0,
        msg.clone(),
        msg,
    )
}

fn criterion_9() -> Outcome {
    let seen = SEEN.lock().unwrap();
    let above: Vec<&String> = seen
        .iter()
        .filter(|(_, c, s)| *c == Classification::AboveTsirelson || *s == Some(EXIT_ABOVE_TSIRELSON))
        .map(|(src, _, _)| src)
        .collect();
    let msg = format!("{} classified results, {} above Tsirelson", seen.len(), above.len());
    check(above.is_empty(), msg.clone(), format!("{msg}: {above:?}"))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 8] = [
        (1, "reference rows reproduce", criterion_1),
        (3, "trivial limits", criterion_3),
        (4, "causality", criterion_4),
        (5, "oracle equivalence", criterion_5),
        (6, "Bessel accuracy", criterion_6),
        (7, "symmetries", criterion_7),
        (8, "determinism and search", criterion_8),
        (9, "Tsirelson sanity", criterion_9),
    ];
    let mut failed = 0;
    println!("[N/A ] criterion 2: no reference data for wedge functions");
    for (n, name, run) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(msg) => println!("[PASS] criterion {n} ({name}): {msg}"),
            Err(msg) => {
                failed += 1;
                println!("[FAIL] criterion {n} ({name}): {msg}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
