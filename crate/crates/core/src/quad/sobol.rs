//! Digital (Sobol) sequence in up to four dimensions with a Cranley-Patterson
//! random shift.
//!
//! Direction numbers follow the Joe-Kuo `new-joe-kuo-6.21201` table; the first
//! dimension is the van der Corput sequence in base 2.

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 4;
const BITS: usize = 32;

/// (degree s, polynomial coefficients a, initial m_1..m_s) for dimensions 2..=4.
const JOE_KUO: [(u32, u32, &[u32]); MAX_DIM - 1] = [(1, 0, &[1]), (2, 1, &[1, 3]), (3, 1, &[1, 3, 1])];

#[derive(Debug, Clone)]
pub struct SobolSequence {
    directions: Vec<[u32; BITS]>,
}

impl SobolSequence {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::invalid(
                "dim",
                format!("low-discrepancy stream supports 1..={MAX_DIM} dimensions, got {dim}"),
            ));
        }
        let mut directions = Vec::with_capacity(dim);
        let mut first = [0u32; BITS];
        for (k, v) in first.iter_mut().enumerate() {
            *v = 1 << (31 - k);
        }
        directions.push(first);
        for &(s, a, m) in JOE_KUO.iter().take(dim - 1) {
            let s = s as usize;
            let mut v = [0u32; BITS];
            for k in 0..BITS {
                v[k] = if k < s {
                    m[k] << (31 - k)
                } else {
                    let mut x = v[k - s] ^ (v[k - s] >> s);
                    for i in 1..s {
                        if (a >> (s - 1 - i)) & 1 == 1 {
                            x ^= v[k - i];
                        }
                    }
                    x
                };
            }
            directions.push(v);
        }
        Ok(Self { directions })
    }

    pub fn dim(&self) -> usize {
        self.directions.len()
    }

    /// Writes the unshifted point with index `index` into `out`.
    #[inline]
    pub fn point_into(&self, index: u32, out: &mut [f64]) {
        const SCALE: f64 = 1.0 / 4_294_967_296.0;
        for (o, v) in out.iter_mut().zip(&self.directions) {
            let mut bits = 0u32;
            let mut i = index;
            let mut k = 0;
            while i != 0 {
                if i & 1 == 1 {
                    bits ^= v[k];
                }
                i >>= 1;
                k += 1;
            }
            *o = f64::from(bits) * SCALE;
        }
    }

    /// The first `n` points in Gray-code order, shifted by `shift` modulo 1.
    /// For `n` a power of two this is the same point set as indices `0..n`.
    pub fn gray_code_points<'a>(&'a self, n: u32, shift: &'a [f64]) -> GrayCodePoints<'a> {
        GrayCodePoints {
            seq: self,
            shift,
            state: [0; MAX_DIM],
            index: 0,
            n,
        }
    }

    /// Point `index` shifted by `shift` modulo 1.
    #[inline]
    pub fn shifted_point_into(&self, index: u32, shift: &[f64], out: &mut [f64]) {
        self.point_into(index, out);
        for (o, s) in out.iter_mut().zip(shift) {
            let v = *o + s;
            *o = if v >= 1.0 { v - 1.0 } else { v };
        }
    }
}

pub struct GrayCodePoints<'a> {
    seq: &'a SobolSequence,
    shift: &'a [f64],
    state: [u32; MAX_DIM],
    index: u32,
    n: u32,
}

impl Iterator for GrayCodePoints<'_> {
    type Item = [f64; MAX_DIM];

    #[inline]
    fn next(&mut self) -> Option<Self::Item> {
        const SCALE: f64 = 1.0 / 4_294_967_296.0;
        if self.index >= self.n {
            return None;
        }
        if self.index > 0 {
            let bit = self.index.trailing_zeros() as usize;
            for (s, v) in self.state.iter_mut().zip(&self.seq.directions) {
                *s ^= v[bit];
            }
        }
        self.index += 1;
        let mut out = [0.0; MAX_DIM];
        for ((o, s), sh) in out.iter_mut().zip(&self.state).zip(self.shift).take(self.seq.dim()) {
            let v = f64::from(*s) * SCALE + sh;
            *o = if v >= 1.0 { v - 1.0 } else { v };
        }
        Some(out)
    }
}

/// The first `n` points of the shifted `dim`-dimensional sequence.
pub fn low_discrepancy_stream(dim: usize, n: usize, shift: &[f64]) -> Result<Vec<Vec<f64>>> {
    let seq = SobolSequence::new(dim)?;
    if n == 0 || !n.is_power_of_two() || n > 1 << 31 {
        return Err(Error::invalid("n", format!("must be a power of two, got {n}")));
    }
    if shift.len() != dim || shift.iter().any(|s| !(0.0..1.0).contains(s)) {
        return Err(Error::invalid("shift", format!("need {dim} values in [0, 1)")));
    }
    Ok((0..n as u32)
        .map(|i| {
            let mut p = vec![0.0; dim];
            seq.shifted_point_into(i, shift, &mut p);
            p
        })
        .collect())
}
