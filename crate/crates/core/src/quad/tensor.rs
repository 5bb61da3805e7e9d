//! Deterministic tensor Gauss-Legendre value of a bilinear.
//!
//! Outer integral over `u`: the diamond is cut into four triangles at its
//! center, where the profile has kinks, and each triangle is collapsed onto
//! the unit square with nodes graded toward the rim.
//!
//! Inner integral over `v`, once per outer node `p1`: in light-cone
//! coordinates `σ = t + x`, `τ = x − t` the diamond is a square, the
//! profile kinks are its diagonals and the light cone of `p1` is the pair
//! of lines `σ = σ1`, `τ = τ1`. The square is cut along all four lines and
//! the convex pieces are fanned into triangles, so the log singularity and
//! the kinks only ever sit on piece edges, where graded rules handle them.

use rayon::prelude::*;

use super::gauss_legendre::gauss_legendre_unit;
use super::summation::CompensatedSum;
use crate::error::{Error, Result};
use crate::kernels::{PointKernel, SpacetimePoint};
use crate::testfns::DiamondTestFunction;

/// `(σ, τ)`
type Vertex = [f64; 2];

fn to_spacetime(v: Vertex) -> SpacetimePoint {
    SpacetimePoint::new(0.5 * (v[0] - v[1]), 0.5 * (v[0] + v[1]))
}

/// Gauss-Legendre on [0, 1] pushed through `s²/(s² + (1 − s)²)`, which
/// clusters nodes at both ends.
fn graded_unit(n: usize) -> Vec<(f64, f64)> {
    let (nodes, weights) = gauss_legendre_unit(n);
    nodes
        .iter()
        .zip(&weights)
        .map(|(&s, &w)| {
            let c = 1.0 - s;
            let den = s * s + c * c;
            (s * s / den, w * 2.0 * s * c / (den * den))
        })
        .collect()
}

/// Collapsed rule on the reference triangle: `(ρ, w, weight)` with the
/// Jacobian factor `ρ` folded in. Maps via `A + ρ((1 − w)(B − A) + w(C − A))`.
fn triangle_rule(n: usize) -> Vec<(f64, f64, f64)> {
    let g = graded_unit(n);
    let mut out = Vec::with_capacity(n * n);
    for &(rho, wr) in &g {
        for &(w, ww) in &g {
            out.push((rho, w, rho * wr * ww));
        }
    }
    out
}

fn polygon_area(poly: &[Vertex]) -> f64 {
    let mut twice = 0.0;
    for i in 0..poly.len() {
        let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
        twice += p[0] * q[1] - q[0] * p[1];
    }
    0.5 * twice.abs()
}

/// Splits a convex polygon by the line `normal · P = offset`. Pieces that
/// degenerate (fewer than three vertices or no area) are dropped.
fn split(poly: Vec<Vertex>, normal: [f64; 2], offset: f64, min_area: f64, out: &mut Vec<Vec<Vertex>>) {
    let side = |p: Vertex| normal[0] * p[0] + normal[1] * p[1] - offset;
    let mut lo = Vec::with_capacity(poly.len() + 1);
    let mut hi = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
        let (sp, sq) = (side(p), side(q));
        if sp <= 0.0 {
            lo.push(p);
        }
        if sp >= 0.0 {
            hi.push(p);
        }
        if (sp < 0.0 && sq > 0.0) || (sp > 0.0 && sq < 0.0) {
            let f = sp / (sp - sq);
            let x = [p[0] + f * (q[0] - p[0]), p[1] + f * (q[1] - p[1])];
            lo.push(x);
            hi.push(x);
        }
    }
    for piece in [lo, hi] {
        if piece.len() >= 3 && polygon_area(&piece) > min_area {
            out.push(piece);
        }
    }
}

/// The four triangles between the center of `v`'s square and its edges.
fn diamond_quarters(v: &DiamondTestFunction) -> Vec<Vec<Vertex>> {
    let (c, r) = (v.center_x(), v.radius());
    let corners = [[c - r, c - r], [c + r, c - r], [c + r, c + r], [c - r, c + r]];
    (0..4)
        .map(|i| vec![[c, c], corners[i], corners[(i + 1) % 4]])
        .collect()
}

/// Weighted quadrature nodes on one diamond, with the function value folded
/// into the weight. Nodes where the function vanishes are dropped.
fn diamond_nodes(f: &DiamondTestFunction, per_axis: usize) -> Vec<(SpacetimePoint, f64)> {
    let (rho, w_rho) = gauss_legendre_unit(per_axis);
    let (mix, w_mix) = gauss_legendre_unit(per_axis);
    let r = f.radius();
    let c = f.center_x();
    let mut nodes = Vec::with_capacity(4 * per_axis * per_axis);
    // Each quadrant around the center is the triangle s_t + s_x < r with
    // s_t = |t|, s_x = |x − c|; collapse it with s_t = rρw, s_x = rρ(1 − w).
    for sign_t in [-1.0, 1.0] {
        for sign_x in [-1.0, 1.0] {
            for (&s, &ws) in rho.iter().zip(&w_rho) {
                // ρ = 1 − (1 − s)² crowds nodes into the boundary layer
                let p = 1.0 - (1.0 - s) * (1.0 - s);
                let wp = ws * 2.0 * (1.0 - s);
                let profile = f.profile(r * p);
                if profile == 0.0 {
                    continue;
                }
                let radial = f.amplitude() * profile * wp * r * r * p;
                for (&q, &wq) in mix.iter().zip(&w_mix) {
                    let t = sign_t * r * p * q;
                    let x = c + sign_x * r * p * (1.0 - q);
                    nodes.push((SpacetimePoint::new(t, x), radial * wq));
                }
            }
        }
    }
    nodes
}

/// `∫ K(p1 − p2) v(p2) d²p2` with the pieces cut along the light cone of `p1`.
fn inner_integral<K: PointKernel + ?Sized>(
    p1: SpacetimePoint,
    v: &DiamondTestFunction,
    quarters: &[Vec<Vertex>],
    rule: &[(f64, f64, f64)],
    kernel: &K,
) -> Result<f64> {
    let (s1, t1) = (p1.t + p1.x, p1.x - p1.t);
    let min_area = 1e-14 * v.radius() * v.radius();
    let mut pieces = Vec::with_capacity(16);
    let mut cut = Vec::with_capacity(16);
    for quarter in quarters {
        cut.clear();
        split(quarter.clone(), [1.0, 0.0], s1, min_area, &mut cut);
        for piece in cut.drain(..) {
            split(piece, [0.0, 1.0], t1, min_area, &mut pieces);
        }
    }
    let mut acc = CompensatedSum::new();
    for poly in &pieces {
        let a = poly[0];
        for k in 1..poly.len() - 1 {
            let (b, c) = (poly[k], poly[k + 1]);
            let e1 = [b[0] - a[0], b[1] - a[1]];
            let e2 = [c[0] - a[0], c[1] - a[1]];
            // dt dx = ½ dσ dτ
            let jac = 0.5 * (e1[0] * e2[1] - e1[1] * e2[0]).abs();
            for &(rho, w, weight) in rule {
                let q = [
                    a[0] + rho * ((1.0 - w) * e1[0] + w * e2[0]),
                    a[1] + rho * ((1.0 - w) * e1[1] + w * e2[1]),
                ];
                let p2 = to_spacetime(q);
                let fv = v.evaluate(p2);
                if fv == 0.0 {
                    continue;
                }
                let value = weight * jac * fv * kernel.eval(p1 - p2);
                if !value.is_finite() {
                    return Err(Error::NonFiniteIntegrand { p1, p2, value });
                }
                acc.add(value);
            }
        }
    }
    Ok(acc.value())
}

/// Tensor Gauss-Legendre value of the bilinear.
///
/// `4 * level` nodes per direction on each of the four outer triangles and
/// `4 * level` per direction on each inner piece. `level` lies in 1..=8.
pub fn integrate_tensor_oracle<K: PointKernel + ?Sized>(
    u: &DiamondTestFunction,
    v: &DiamondTestFunction,
    kernel: &K,
    level: usize,
) -> Result<f64> {
    if level == 0 || level > 8 {
        return Err(Error::invalid("level", format!("must lie in 1..=8, got {level}")));
    }
    let outer = diamond_nodes(u, 4 * level);
    let quarters = diamond_quarters(v);
    let rule = triangle_rule(4 * level);
    let rows = outer
        .par_iter()
        .map(|&(p1, w1)| Ok(w1 * inner_integral(p1, v, &quarters, &rule, kernel)?))
        .collect::<Result<Vec<f64>>>()?;
    Ok(rows.into_iter().collect::<CompensatedSum>().value())
}

/// Tensor value at `level` together with `|I(level) − I(level − 1)|` as an
/// error estimate. Requires `level >= 2`.
pub fn tensor_oracle_with_error<K: PointKernel + ?Sized>(
    u: &DiamondTestFunction,
    v: &DiamondTestFunction,
    kernel: &K,
    level: usize,
) -> Result<(f64, f64)> {
    if level < 2 {
        return Err(Error::invalid("level", "error estimate needs level >= 2"));
    }
    let fine = integrate_tensor_oracle(u, v, kernel, level)?;
    let coarse = integrate_tensor_oracle(u, v, kernel, level - 1)?;
    Ok((fine, (fine - coarse).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testfns::DiamondSide;

    fn bump(side: DiamondSide, r: f64, a: f64, eta: f64) -> DiamondTestFunction {
        DiamondTestFunction::new(side, r, a, eta).unwrap()
    }

    #[test]
    fn outer_weights_cover_diamond_area() {
        // with a flat-ish profile the weights integrate to ~ area 2r²
        let f = bump(DiamondSide::Left, 1.5, 1e-9, 1.0);
        let total: f64 = diamond_nodes(&f, 16).iter().map(|(_, w)| w).sum();
        assert!((total - 2.0 * 1.5 * 1.5).abs() < 1e-6, "{total}");
    }

    #[test]
    fn inner_pieces_cover_diamond_area() {
        let v = bump(DiamondSide::Right, 1.2, 1e-9, 1.0);
        let one = |_p: SpacetimePoint| 1.0;
        let rule = triangle_rule(12);
        let quarters = diamond_quarters(&v);
        for p1 in [
            SpacetimePoint::new(0.0, 1.2),
            SpacetimePoint::new(0.3, 0.7),
            SpacetimePoint::new(-2.0, 5.0),
        ] {
            let area = inner_integral(p1, &v, &quarters, &rule, &one).unwrap();
            assert!((area - 2.0 * 1.2 * 1.2).abs() < 1e-6, "{p1}: {area}");
        }
    }

    #[test]
    fn split_keeps_area() {
        let square = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let mut out = Vec::new();
        split(square.clone(), [1.0, 1.0], 0.5, 1e-14, &mut out);
        assert_eq!(out.len(), 2);
        let total: f64 = out.iter().map(|p| polygon_area(p)).sum();
        assert!((total - 1.0).abs() < 1e-15);
        out.clear();
        split(square, [1.0, 0.0], 3.0, 1e-14, &mut out);
        assert_eq!(out.len(), 1);
    }

    #[test]
    fn graded_rule_handles_endpoint_log() {
        let g = graded_unit(20);
        let s: f64 = g.iter().map(|(x, w)| w * x * x).sum();
        assert!((s - 1.0 / 3.0).abs() < 1e-10, "{s}");
        let l: f64 = g.iter().map(|(x, w)| w * x.ln()).sum();
        assert!((l + 1.0).abs() < 1e-5, "{l}");
    }
}
