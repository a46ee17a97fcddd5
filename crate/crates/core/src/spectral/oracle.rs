//! Exhaustive eigenpair enumeration for dimension at most two, by reduction
//! to real roots of a univariate polynomial in `t` with `x = (1, t)`.

use super::EigenKind;
use crate::tensor::DenseTensor;

/// Coefficients (low to high) of `(A x^(m-1))_i` at `x = (1, t)`.
fn component_polys(a: &DenseTensor) -> [Vec<f64>; 2] {
    let m = a.order();
    let mut out = [vec![0.0; m], vec![0.0; m]];
    for (i, poly) in out.iter_mut().enumerate() {
        let row = a.row(i);
        for (k, v) in row.iter().enumerate() {
            let degree = a.unravel_tail(k).iter().filter(|&&c| c == 1).count();
            poly[degree] += v;
        }
    }
    out
}

fn eval(p: &[f64], t: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, c| acc * t + c)
}

fn derivative(p: &[f64]) -> Vec<f64> {
    p.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect()
}

fn trim(p: &[f64]) -> Vec<f64> {
    let scale = p.iter().fold(0.0f64, |s, c| s.max(c.abs()));
    let mut q = p.to_vec();
    while q.last().is_some_and(|c| c.abs() <= 1e-13 * scale) {
        q.pop();
    }
    q
}

fn bisect(p: &[f64], mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = eval(p, lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = eval(p, mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Real roots, isolated between consecutive critical points. Critical points
/// where `|p|` is negligible are returned too, so even-multiplicity roots are
/// not lost; callers verify every root against the eigen equations.
pub(crate) fn real_roots(p: &[f64]) -> Vec<f64> {
    let p = trim(p);
    let deg = p.len().saturating_sub(1);
    if deg == 0 {
        return Vec::new();
    }
    if deg == 1 {
        return vec![-p[0] / p[1]];
    }
    let lead = p[deg];
    let bound = 1.0 + p[..deg].iter().map(|c| (c / lead).abs()).fold(0.0, f64::max);
    let mut crit: Vec<f64> = real_roots(&derivative(&p))
        .into_iter()
        .filter(|c| c.abs() < bound)
        .collect();
    crit.sort_by(f64::total_cmp);

    let magnitude = |t: f64| p.iter().enumerate().map(|(k, c)| c.abs() * t.abs().powi(k as i32)).sum::<f64>();
    let mut roots = Vec::new();
    let mut knots = vec![-bound];
    knots.extend(&crit);
    knots.push(bound);
    for w in knots.windows(2) {
        let (l, r) = (w[0], w[1]);
        let (fl, fr) = (eval(&p, l), eval(&p, r));
        if fl == 0.0 {
            roots.push(l);
        } else if fr != 0.0 && (fl < 0.0) != (fr < 0.0) {
            roots.push(bisect(&p, l, r));
        }
    }
    for &c in &crit {
        if eval(&p, c).abs() <= 1e-10 * magnitude(c) {
            roots.push(c);
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * (1.0 + b.abs()));
    roots
}

/// Unnormalized candidate eigenvectors, or `None` when every direction
/// solves the reduced equation (a continuum of eigenvectors).
pub(crate) fn candidates(a: &DenseTensor, kind: EigenKind) -> Option<Vec<Vec<f64>>> {
    if a.dim() == 1 {
        return Some(vec![vec![1.0], vec![-1.0]]);
    }
    let m = a.order();
    let [p1, p2] = component_polys(a);
    // the reduced equation: P2 - t^s P1 with s = m - 1 (H) or 1 (Z)
    let shift = match kind {
        EigenKind::H => m - 1,
        EigenKind::Z => 1,
    };
    let mut poly = vec![0.0; (m - 1 + shift) + 1];
    for (k, c) in p2.iter().enumerate() {
        poly[k] += c;
    }
    for (k, c) in p1.iter().enumerate() {
        poly[k + shift] -= c;
    }
    let scale = a.max_abs();
    if poly.iter().all(|c| c.abs() <= 1e-14 * scale) {
        return None;
    }
    let mut out: Vec<Vec<f64>> = Vec::new();
    for t in real_roots(&poly) {
        out.push(vec![1.0, t]);
        out.push(vec![-1.0, -t]);
    }
    // x = (0, 1) is outside the chart; it is an eigenvector exactly when a_{12..2} = 0
    out.push(vec![0.0, 1.0]);
    out.push(vec![0.0, -1.0]);
    Some(out)
}
