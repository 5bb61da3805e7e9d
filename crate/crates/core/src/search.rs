//! Random search over the eleven scenario parameters.
//!
//! Every sample draws its parameters from its own ChaCha stream (key = seed,
//! stream = sample index), so the set of evaluated scenarios does not depend
//! on evaluation order. Candidates are screened with a cheap plan and the
//! leaders are re-evaluated with the full plan before ranking.

use std::cmp::Ordering;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chsh::{chsh_correlator, ChshParams, ChshResult, Classification};
use crate::error::{Error, Result};
use crate::quad::QuadPlan;

/// Closed interval `[lo, hi]` with `0 < lo <= hi`. `lo == hi` pins a value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi) {
            return Err(Error::invalid(
                "interval",
                format!("need 0 < lo <= hi, got [{lo}, {hi}]"),
            ));
        }
        Ok(Self { lo, hi })
    }

    pub fn point(v: f64) -> Result<Self> {
        Self::new(v, v)
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    fn uniform(&self, u: f64) -> f64 {
        if self.lo == self.hi {
            return self.lo;
        }
        self.lo + (self.hi - self.lo) * u
    }

    fn log_uniform(&self, u: f64) -> f64 {
        if self.lo == self.hi {
            return self.lo;
        }
        let (l, h) = (self.lo.log10(), self.hi.log10());
        10f64.powf(l + (h - l) * u).clamp(self.lo, self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.lo, self.hi)
    }
}

/// Parses `lo,hi`.
impl FromStr for Interval {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (lo, hi) = s
            .split_once(',')
            .ok_or_else(|| Error::invalid("interval", format!("expected lo,hi, got {s:?}")))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|e| Error::invalid("interval", format!("{v:?}: {e}")))
        };
        Interval::new(parse(lo)?, parse(hi)?)
    }
}

/// Sampling box for the eleven parameters; `m` is sampled log-uniformly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamRanges {
    pub a: Interval,
    pub eta: Interval,
    pub b: Interval,
    pub sigma: Interval,
    pub a_prime: Interval,
    pub eta_prime: Interval,
    pub b_prime: Interval,
    pub sigma_prime: Interval,
    pub m: Interval,
    pub r: Interval,
    pub r_prime: Interval,
}

impl Default for ParamRanges {
    fn default() -> Self {
        let sharp = Interval { lo: 1e-3, hi: 5.0 };
        let amp = Interval { lo: 1e-3, hi: 15.0 };
        let radius = Interval { lo: 0.5, hi: 2.5 };
        Self {
            a: sharp,
            eta: amp,
            b: sharp,
            sigma: amp,
            a_prime: sharp,
            eta_prime: amp,
            b_prime: sharp,
            sigma_prime: amp,
            m: Interval { lo: 1e-5, hi: 1e-1 },
            r: radius,
            r_prime: radius,
        }
    }
}

impl ParamRanges {
    /// Every range pinned to the corresponding value of `p`.
    pub fn pinned(p: &ChshParams) -> Result<Self> {
        Self::from_array(p.to_array().map(Interval::point).into_iter().collect::<Result<Vec<_>>>()?)
    }

    fn from_array(v: Vec<Interval>) -> Result<Self> {
        let v: [Interval; 11] = v
            .try_into()
            .map_err(|_| Error::invalid("ranges", "need eleven intervals"))?;
        Ok(Self {
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
        })
    }

    pub fn to_array(&self) -> [Interval; 11] {
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

    pub fn get_mut(&mut self, name: &str) -> Option<&mut Interval> {
        Some(match name {
            "a" => &mut self.a,
            "eta" => &mut self.eta,
            "b" => &mut self.b,
            "sigma" => &mut self.sigma,
            "a_prime" => &mut self.a_prime,
            "eta_prime" => &mut self.eta_prime,
            "b_prime" => &mut self.b_prime,
            "sigma_prime" => &mut self.sigma_prime,
            "m" | "mass" => &mut self.m,
            "r" => &mut self.r,
            "r_prime" => &mut self.r_prime,
            _ => return None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        for (iv, name) in self.to_array().iter().zip(ChshParams::NAMES) {
            Interval::new(iv.lo, iv.hi).map_err(|e| Error::invalid("ranges", format!("{name}: {e}")))?;
        }
        Ok(())
    }

    pub fn contains(&self, p: &ChshParams) -> bool {
        self.to_array().iter().zip(p.to_array()).all(|(iv, v)| iv.contains(v))
    }
}

/// Maps eleven uniforms in `[0, 1)` into the ranges.
pub fn sample_params(ranges: &ParamRanges, draw: &[f64; 11]) -> ChshParams {
    let iv = ranges.to_array();
    let mut out = [0.0; 11];
    for (i, (o, u)) in out.iter_mut().zip(draw).enumerate() {
        *o = if i == 8 {
            iv[i].log_uniform(*u)
        } else {
            iv[i].uniform(*u)
        };
    }
    ChshParams::from_array(out)
}

/// The uniforms for sample `index` under `seed`.
pub fn sample_draw(seed: u64, index: u64) -> [f64; 11] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    std::array::from_fn(|_| rng.random::<f64>())
}

/// One evaluated sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchRecord {
    pub sample_index: u64,
    pub params: ChshParams,
    pub result: ChshResult,
}

impl SearchRecord {
    pub fn summary(&self) -> RecordSummary {
        RecordSummary {
            sample_index: self.sample_index,
            params: self.params,
            correlator: self.result.correlator,
            correlator_error: self.result.correlator_error,
            classification: self.result.classification,
        }
    }
}

/// The persisted part of a [`SearchRecord`] (everything but the bilinears).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecordSummary {
    pub sample_index: u64,
    pub params: ChshParams,
    pub correlator: f64,
    pub correlator_error: f64,
    pub classification: Classification,
}

/// `|C|` descending, then sample index ascending.
pub fn ranking_order(c1: f64, i1: u64, c2: f64, i2: u64) -> Ordering {
    c2.abs().total_cmp(&c1.abs()).then(i1.cmp(&i2))
}

fn rank(records: &mut [SearchRecord]) {
    records.sort_by(|x, y| {
        ranking_order(
            x.result.correlator,
            x.sample_index,
            y.result.correlator,
            y.sample_index,
        )
    });
}

fn evaluate_all(
    candidates: &[(u64, ChshParams)],
    plan: &QuadPlan,
) -> Vec<SearchRecord> {
    candidates
        .par_iter()
        .filter_map(|&(sample_index, params)| {
            match params.scenario().and_then(|s| chsh_correlator(&s, plan)) {
                Ok(result) => Some(SearchRecord {
                    sample_index,
                    params,
                    result,
                }),
                Err(e) => {
                    log::warn!("sample {sample_index} dropped: {e}");
                    None
                }
            }
        })
        .collect()
}

/// Random search with the standard screening plan ([`QuadPlan::screening`]).
pub fn random_search(
    ranges: &ParamRanges,
    n_samples: usize,
    seed: u64,
    plan: &QuadPlan,
    top_k: usize,
) -> Result<Vec<SearchRecord>> {
    random_search_with_screening(ranges, n_samples, seed, plan, &QuadPlan::screening(plan.seed), top_k)
}

/// Screens all `n_samples` draws with `screening`, re-evaluates the best
/// `10 * top_k` with `plan` and returns the best `top_k` of those.
pub fn random_search_with_screening(
    ranges: &ParamRanges,
    n_samples: usize,
    seed: u64,
    plan: &QuadPlan,
    screening: &QuadPlan,
    top_k: usize,
) -> Result<Vec<SearchRecord>> {
    ranges.validate()?;
    plan.validate()?;
    screening.validate()?;
    if top_k == 0 || n_samples < top_k {
        return Err(Error::invalid(
            "top_k",
            format!("need 1 <= top_k <= n_samples, got top_k = {top_k}, n_samples = {n_samples}"),
        ));
    }

    let candidates: Vec<(u64, ChshParams)> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| (i, sample_params(ranges, &sample_draw(seed, i))))
        .collect();

    let mut screened = evaluate_all(&candidates, screening);
    rank(&mut screened);
    let survivors: Vec<(u64, ChshParams)> = screened
        .iter()
        .take(10 * top_k)
        .map(|r| (r.sample_index, r.params))
        .collect();

    let mut finals = evaluate_all(&survivors, plan);
    rank(&mut finals);
    finals.truncate(top_k);
    Ok(finals)
}

pub const RECORD_HEADER: [&str; 15] = [
    "sample_index",
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
    "correlator",
    "correlator_error",
    "classification",
];

/// Writes records as CSV; floats use the shortest decimal that round-trips.
pub fn write_records<W: std::io::Write>(records: &[RecordSummary], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RECORD_HEADER)?;
    for rec in records {
        let mut row = Vec::with_capacity(RECORD_HEADER.len());
        row.push(rec.sample_index.to_string());
        row.extend(rec.params.to_array().iter().map(|v| v.to_string()));
        row.push(rec.correlator.to_string());
        row.push(rec.correlator_error.to_string());
        row.push(rec.classification.to_string());
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

pub fn persist_records(records: &[SearchRecord], path: &Path) -> Result<()> {
    let summaries: Vec<RecordSummary> = records.iter().map(SearchRecord::summary).collect();
    persist_summaries(&summaries, path)
}

pub fn persist_summaries(records: &[RecordSummary], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_records(records, std::io::BufWriter::new(file))
}

pub fn load_records(path: &Path) -> Result<Vec<RecordSummary>> {
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_records(file, path)
}

fn read_records<R: std::io::Read>(input: R, path: &Path) -> Result<Vec<RecordSummary>> {
    let malformed = |line: u64, field: &str, reason: String| Error::Malformed {
        path: path.to_path_buf(),
        line,
        field: field.to_string(),
        reason,
    };
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = reader.headers()?.clone();
    if header.iter().ne(RECORD_HEADER) {
        return Err(malformed(
            1,
            "header",
            format!("expected {}", RECORD_HEADER.join(",")),
        ));
    }
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != RECORD_HEADER.len() {
            return Err(malformed(
                line,
                "row",
                format!("expected {} fields, got {}", RECORD_HEADER.len(), row.len()),
            ));
        }
        let float = |i: usize| -> Result<f64> {
            row[i]
                .parse::<f64>()
                .map_err(|e| malformed(line, RECORD_HEADER[i], format!("{:?}: {e}", &row[i])))
        };
        let sample_index = row[0]
            .parse::<u64>()
            .map_err(|e| malformed(line, RECORD_HEADER[0], format!("{:?}: {e}", &row[0])))?;
        let mut params = [0.0; 11];
        for (k, p) in params.iter_mut().enumerate() {
            *p = float(k + 1)?;
        }
        let correlator = float(12)?;
        let correlator_error = float(13)?;
        let classification = row[14]
            .parse::<Classification>()
            .map_err(|e| malformed(line, RECORD_HEADER[14], e))?;
        out.push(RecordSummary {
            sample_index,
            params: ChshParams::from_array(params),
            correlator,
            correlator_error,
            classification,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chsh::REFERENCE_ROWS;

    #[test]
    fn draw_extremes() {
        let ranges = ParamRanges::default();
        let p = sample_params(&ranges, &[0.0; 11]);
        for (v, iv) in p.to_array().iter().zip(ranges.to_array()) {
            assert_eq!(*v, iv.lo);
        }
        let top = 1.0 - f64::EPSILON;
        let p = sample_params(&ranges, &[top; 11]);
        for (v, iv) in p.to_array().iter().zip(ranges.to_array()) {
            assert!(*v <= iv.hi && *v > iv.hi * (1.0 - 1e-9), "{v} vs {}", iv.hi);
        }
    }

    #[test]
    fn mass_is_log_uniform() {
        let mut draw = [0.0; 11];
        draw[8] = 0.5;
        let p = sample_params(&ParamRanges::default(), &draw);
        assert!((p.m - 1e-3).abs() < 1e-18);
    }

    #[test]
    fn defaults_cover_table() {
        let ranges = ParamRanges::default();
        for (row, _) in REFERENCE_ROWS {
            assert!(ranges.contains(&row));
        }
    }

    #[test]
    fn pinned_ranges_reproduce_params() {
        let p = REFERENCE_ROWS[0].0;
        let ranges = ParamRanges::pinned(&p).unwrap();
        assert_eq!(sample_params(&ranges, &sample_draw(9, 4)), p);
    }

    #[test]
    fn draws_are_counter_based() {
        assert_eq!(sample_draw(1, 5), sample_draw(1, 5));
        assert_ne!(sample_draw(1, 5), sample_draw(1, 6));
        assert_ne!(sample_draw(1, 5), sample_draw(2, 5));
        assert!(sample_draw(3, 0).iter().all(|u| (0.0..1.0).contains(u)));
    }

    #[test]
    fn interval_parsing() {
        let iv: Interval = "0.5, 2".parse().unwrap();
        assert_eq!((iv.lo, iv.hi), (0.5, 2.0));
        assert!("2,1".parse::<Interval>().is_err());
        assert!("0,1".parse::<Interval>().is_err());
        assert!("x,1".parse::<Interval>().is_err());
        assert!("1".parse::<Interval>().is_err());
    }

    #[test]
    fn ordering_is_by_magnitude_then_index() {
        assert_eq!(ranking_order(2.1, 5, -2.0, 1), Ordering::Less);
        assert_eq!(ranking_order(-2.1, 5, 2.0, 1), Ordering::Less);
        assert_eq!(ranking_order(2.0, 1, 2.0, 3), Ordering::Less);
        assert_eq!(ranking_order(2.0, 3, -2.0, 1), Ordering::Greater);
    }

    #[test]
    fn top_k_precondition() {
        let plan = QuadPlan::new(1 << 4, 2, 0).unwrap();
        let r = ParamRanges::default();
        assert!(random_search(&r, 2, 0, &plan, 3).is_err());
        assert!(random_search(&r, 2, 0, &plan, 0).is_err());
    }

    #[test]
    fn empty_file_has_header_only() {
        let mut buf = Vec::new();
        write_records(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), RECORD_HEADER.join(",") + "\n");
        assert!(read_records(&buf[..], Path::new("mem")).unwrap().is_empty());
    }

    #[test]
    fn non_numeric_field_is_named() {
        let text = format!(
            "{}\n0,1,1,1,1,1,1,1,1,0.01,oops,1,2.05,0.001,Violation\n",
            RECORD_HEADER.join(",")
        );
        let err = read_records(text.as_bytes(), Path::new("mem.csv")).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("`r`"), "{msg}");
        assert!(msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn bad_header_and_classification() {
        let err = read_records("x,y\n".as_bytes(), Path::new("m")).unwrap_err();
        assert!(err.to_string().contains("header"));
        let text = format!(
            "{}\n0,1,1,1,1,1,1,1,1,0.01,1,1,2.05,0.001,Maybe\n",
            RECORD_HEADER.join(",")
        );
        let err = read_records(text.as_bytes(), Path::new("m")).unwrap_err();
        assert!(err.to_string().contains("classification"));
    }
}
