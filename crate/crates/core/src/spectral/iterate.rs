//! Shifted power iterations and Newton refinement for eigenpairs of a
//! symmetric tensor.

use nalgebra::{DMatrix, DVector};

use super::EigenKind;
use crate::tensor::{norm2, signed_root, DenseTensor, Summation};

const STALL: f64 = 1e-14;
const NEWTON_STEPS: usize = 40;

fn unit(mut x: Vec<f64>) -> Option<Vec<f64>> {
    let r = norm2(&x);
    if !(r > 0.0 && r.is_finite()) {
        return None;
    }
    x.iter_mut().for_each(|v| *v /= r);
    Some(x)
}

fn ipow(v: f64, k: usize) -> f64 {
    v.powi(k as i32)
}

/// Eigenvalue estimate at `x`: the Rayleigh quotient `x . A x^(m-1)` for Z,
/// the least-squares fit of `A x^(m-1) = lambda x^[m-1]` for H.
pub(crate) fn eigenvalue_at(a: &DenseTensor, kind: EigenKind, x: &[f64]) -> f64 {
    let ax = a.contract_unchecked(x, Summation::Lexicographic);
    match kind {
        EigenKind::Z => x.iter().zip(&ax).map(|(p, q)| p * q).sum::<f64>() / x.iter().map(|v| v * v).sum::<f64>(),
        EigenKind::H => {
            let k = a.order() - 1;
            let num: f64 = x.iter().zip(&ax).map(|(p, q)| ipow(*p, k) * q).sum();
            let den: f64 = x.iter().map(|p| ipow(*p, 2 * k)).sum();
            num / den
        }
    }
}

/// `|A x^(m-1) - lambda x|_inf` (Z) or `|A x^(m-1) - lambda x^[m-1]|_inf` (H).
pub(crate) fn residual(a: &DenseTensor, kind: EigenKind, lambda: f64, x: &[f64]) -> f64 {
    let ax = a.contract_unchecked(x, Summation::Lexicographic);
    let k = a.order() - 1;
    x.iter()
        .zip(&ax)
        .map(|(p, q)| {
            let rhs = match kind {
                EigenKind::Z => *p,
                EigenKind::H => ipow(*p, k),
            };
            (q - lambda * rhs).abs()
        })
        .fold(0.0, f64::max)
}

/// Shifted power iteration from a unit vector. `sign = 1` climbs towards
/// local maxima of the Rayleigh quotient, `sign = -1` towards minima.
/// The H variant is used for even order only.
pub(crate) fn power(a: &DenseTensor, kind: EigenKind, x0: &[f64], shift: f64, sign: f64, iters: usize) -> Option<Vec<f64>> {
    let k = a.order() - 1;
    let mut x = unit(x0.to_vec())?;
    for _ in 0..iters {
        let ax = a.contract_unchecked(&x, Summation::Lexicographic);
        let y: Vec<f64> = match kind {
            EigenKind::Z => ax.iter().zip(&x).map(|(q, p)| sign * q + shift * p).collect(),
            EigenKind::H => ax
                .iter()
                .zip(&x)
                .map(|(q, p)| signed_root(sign * q + shift * ipow(*p, k), k as u32))
                .collect(),
        };
        let y = unit(y)?;
        let moved = y.iter().zip(&x).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        x = y;
        if moved < STALL {
            break;
        }
    }
    Some(x)
}

/// Newton's method on `A x^(m-1) = lambda x^[p]`, `|x|_2 = 1`, with `p = 1`
/// for Z and `p = m - 1` for H. Returns a unit vector.
pub(crate) fn newton(a: &DenseTensor, kind: EigenKind, x0: &[f64]) -> Option<Vec<f64>> {
    let n = a.dim();
    let m = a.order();
    let k = m - 1;
    let mut x = unit(x0.to_vec())?;
    let mut lambda = eigenvalue_at(a, kind, &x);
    let scale = 1.0 + a.max_abs();
    for _ in 0..NEWTON_STEPS {
        let ax = a.contract_unchecked(&x, Summation::Lexicographic);
        let xp: Vec<f64> = match kind {
            EigenKind::Z => x.clone(),
            EigenKind::H => x.iter().map(|v| ipow(*v, k)).collect(),
        };
        let mut f = DVector::zeros(n + 1);
        for i in 0..n {
            f[i] = ax[i] - lambda * xp[i];
        }
        f[n] = 0.5 * (1.0 - x.iter().map(|v| v * v).sum::<f64>());
        if f.amax() <= 1e-15 * scale {
            break;
        }
        let mx = a.contract_twice(&x).ok()?;
        let mut j = DMatrix::zeros(n + 1, n + 1);
        for r in 0..n {
            for c in 0..n {
                j[(r, c)] = k as f64 * mx[r * n + c];
            }
            j[(r, r)] -= match kind {
                EigenKind::Z => lambda,
                EigenKind::H => k as f64 * lambda * ipow(x[r], k - 1),
            };
            j[(r, n)] = -xp[r];
            j[(n, r)] = -x[r];
        }
        let step = j.lu().solve(&(-f))?;
        if !step.iter().all(|v| v.is_finite()) {
            return None;
        }
        for i in 0..n {
            x[i] += step[i];
        }
        lambda += step[n];
    }
    unit(x)
}
