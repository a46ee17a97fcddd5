use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structure::row_norm_bound;
use crate::tensor::{signed_root, DenseTensor, Summation, Vector};

/// Which positively homogeneous operator the alpha quantity is taken over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Operator {
    /// `T_A(x) = |x|_2^(2-m) A x^(m-1)`.
    T,
    /// `F_A(x) = (A x^(m-1))^[1/(m-1)]`, even order only.
    F,
}

impl Operator {
    pub(crate) fn check_order(self, a: &DenseTensor) -> Result<()> {
        if self == Operator::F && a.order() % 2 == 1 {
            return Err(Error::OddOrderUnsupported { order: a.order() });
        }
        Ok(())
    }
}

/// `T_A(x)`; the zero vector maps to zero.
pub fn t_operator(a: &DenseTensor, x: &[f64]) -> Result<Vector> {
    let ax = a.contract_once(x)?;
    let r2 = x.iter().map(|v| v * v).sum::<f64>();
    if r2 == 0.0 {
        return Ok(Vector::zeros(a.dim()));
    }
    let s = t_scale(r2, a.order());
    Ok(ax.iter().map(|v| s * v).collect::<Vec<_>>().into())
}

/// `|x|_2^(2-m)` from `|x|_2^2`, exact for integer powers of the squared norm.
#[inline]
pub(crate) fn t_scale(norm_sq: f64, m: usize) -> f64 {
    if m.is_multiple_of(2) {
        let mut p = 1.0;
        for _ in 0..(m - 2) / 2 {
            p *= norm_sq;
        }
        1.0 / p
    } else {
        norm_sq.powf((2.0 - m as f64) / 2.0)
    }
}

/// `F_A(x)`, the componentwise signed `(m-1)`-th root of `A x^(m-1)`.
pub fn f_operator(a: &DenseTensor, x: &[f64]) -> Result<Vector> {
    Operator::F.check_order(a)?;
    let ax = a.contract_once(x)?;
    let k = (a.order() - 1) as u32;
    Ok(ax.iter().map(|&v| signed_root(v, k)).collect::<Vec<_>>().into())
}

pub fn apply(a: &DenseTensor, op: Operator, x: &[f64]) -> Result<Vector> {
    match op {
        Operator::T => t_operator(a, x),
        Operator::F => f_operator(a, x),
    }
}

/// The max-product objective `max_i x_i (op(x))_i`.
pub fn objective(a: &DenseTensor, op: Operator, x: &[f64]) -> Result<f64> {
    let y = apply(a, op, x)?;
    Ok(x.iter().zip(y.iter()).map(|(xi, yi)| xi * yi).fold(f64::NEG_INFINITY, f64::max))
}

/// Raw products `x_i (A x^(m-1))_i`.
pub fn products(a: &DenseTensor, x: &[f64]) -> Result<Vec<f64>> {
    let ax = a.contract_once(x)?;
    Ok(x.iter().zip(ax.iter()).map(|(xi, yi)| xi * yi).collect())
}

/// `max_{i : x_i != 0} x_i (A x^(m-1))_i`, or `None` for the zero vector.
/// Negative exactly when `x` certifies that `A` is not P0.
pub fn support_max_product(a: &DenseTensor, x: &[f64]) -> Result<Option<f64>> {
    let p = products(a, x)?;
    Ok(x.iter()
        .zip(&p)
        .filter(|(xi, _)| **xi != 0.0)
        .map(|(_, pi)| *pi)
        .reduce(f64::max))
}

pub(crate) fn products_unchecked(a: &DenseTensor, x: &[f64]) -> Vec<f64> {
    let ax = a.contract_unchecked(x, Summation::Lexicographic);
    x.iter().zip(&ax).map(|(xi, yi)| xi * yi).collect()
}

/// Lipschitz constant of the `T` objective on `{|x|_inf = 1}` with respect to
/// the infinity norm: `R (m + (m-2) sqrt(n))` where `R` is the largest
/// absolute row sum.
pub fn t_lipschitz(a: &DenseTensor) -> f64 {
    let r = row_norm_bound(a).t_bound;
    let m = a.order() as f64;
    r * (m + (m - 2.0) * (a.dim() as f64).sqrt())
}

/// Upper bound on how much the objective can change between two points of
/// the same sphere face at infinity-distance `d`.
///
/// For `T` this is `L d`. `F` is only Hölder continuous (exponent `1/(m-1)`),
/// giving `R^(1/k) d + 2^(1-1/k) ((m-1) R d)^(1/k)` with `k = m - 1`.
pub fn objective_modulus(a: &DenseTensor, op: Operator, d: f64) -> f64 {
    match op {
        Operator::T => t_lipschitz(a) * d,
        Operator::F => {
            let r = row_norm_bound(a).t_bound;
            let k = (a.order() - 1) as f64;
            let m = a.order() as f64;
            r.powf(1.0 / k) * d + 2f64.powf(1.0 - 1.0 / k) * ((m - 1.0) * r * d).powf(1.0 / k)
        }
    }
}

/// The band `2 * modulus(h)` inside which a lattice value of alpha may
/// disagree in sign with the continuous quantity.
pub fn grid_tolerance(a: &DenseTensor, op: Operator, h: f64) -> f64 {
    2.0 * objective_modulus(a, op, h)
}
