//! Independent reference computations for the integration suites. Nothing
//! here calls into the algorithms under test; tensors are read through
//! `order`, `dim` and `data` only.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tenstruct::DenseTensor;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Multi-index of a flat offset, first index most significant.
pub fn multi_index(mut flat: usize, n: usize, m: usize) -> Vec<usize> {
    let mut idx = vec![0; m];
    for slot in idx.iter_mut().rev() {
        *slot = flat % n;
        flat /= n;
    }
    idx
}

/// `(A x^(m-1))_i` straight from the definition.
pub fn contract(a: &DenseTensor, x: &[f64]) -> Vec<f64> {
    let (n, m) = (a.dim(), a.order());
    let mut out = vec![0.0; n];
    for (flat, v) in a.data().iter().enumerate() {
        let idx = multi_index(flat, n, m);
        let mut term = *v;
        for &k in &idx[1..] {
            term *= x[k];
        }
        out[idx[0]] += term;
    }
    out
}

pub fn products(a: &DenseTensor, x: &[f64]) -> Vec<f64> {
    contract(a, x).iter().zip(x).map(|(p, xi)| p * xi).collect()
}

pub fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |acc: f64, v| acc.max(v.abs()))
}

/// `max_i sum_j |a_{i j2..jm}|`.
pub fn max_abs_row_sum(a: &DenseTensor) -> f64 {
    let w = a.data().len() / a.dim();
    a.data().chunks(w).map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Exact integer image of a tensor: every entry equals `units[k] * 2^exp`.
pub struct Exact {
    pub units: Vec<i128>,
    pub n: usize,
    pub m: usize,
}

fn split(v: f64) -> (i128, i32) {
    let bits = v.to_bits();
    let sign = if bits >> 63 == 1 { -1 } else { 1 };
    let e = ((bits >> 52) & 0x7ff) as i32;
    let frac = (bits & ((1u64 << 52) - 1)) as i128;
    if e == 0 {
        (sign * frac, -1074)
    } else {
        (sign * (frac | (1i128 << 52)), e - 1075)
    }
}

impl Exact {
    /// `None` when the entries span too many binary orders of magnitude.
    pub fn new(a: &DenseTensor) -> Option<Exact> {
        let parts: Vec<(i128, i32)> = a.data().iter().map(|&v| split(v)).collect();
        let base = parts.iter().filter(|(u, _)| *u != 0).map(|(_, e)| *e).min().unwrap_or(0);
        let mut units = Vec::with_capacity(parts.len());
        for (u, e) in parts {
            if u == 0 {
                units.push(0);
                continue;
            }
            let shift = (e - base) as u32;
            if shift > 60 {
                return None;
            }
            units.push(u << shift);
        }
        Some(Exact { units, n: a.dim(), m: a.order() })
    }

    fn width(&self) -> usize {
        self.units.len() / self.n
    }

    pub fn row(&self, i: usize) -> &[i128] {
        let w = self.width();
        &self.units[i * w..(i + 1) * w]
    }

    /// Offset of `a_{i..i}` inside row `i`.
    pub fn diag_pos(&self, i: usize) -> usize {
        (0..self.m - 1).fold(0, |acc, _| acc * self.n + i)
    }

    pub fn row_sum(&self, i: usize) -> i128 {
        self.row(i).iter().sum()
    }

    pub fn is_z(&self) -> bool {
        (0..self.n).all(|i| self.row(i).iter().enumerate().all(|(k, v)| k == self.diag_pos(i) || *v <= 0))
    }

    /// `d_i - sum |off|` for each row.
    pub fn dominance_margins(&self) -> Vec<i128> {
        (0..self.n)
            .map(|i| {
                let d = self.diag_pos(i);
                let off: i128 = self.row(i).iter().enumerate().filter(|(k, _)| *k != d).map(|(_, v)| v.abs()).sum();
                self.row(i)[d] - off
            })
            .collect()
    }

    /// `(is_B, is_B0)` from the definition: the row average is positive and
    /// exceeds every off-diagonal entry (or both non-strictly).
    pub fn b_membership(&self) -> (bool, bool) {
        let w = self.width() as i128;
        let mut b = true;
        let mut b0 = true;
        for i in 0..self.n {
            let s = self.row_sum(i);
            let d = self.diag_pos(i);
            let worst = self.row(i).iter().enumerate().filter(|(k, _)| *k != d).map(|(_, v)| *v).max();
            b &= s > 0 && worst.is_none_or(|o| s > w * o);
            b0 &= s >= 0 && worst.is_none_or(|o| s >= w * o);
        }
        (b, b0)
    }
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut d = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= a[c][c];
        let pivot = a[c].clone();
        for row in a.iter_mut().skip(c + 1) {
            let f = row[c] / pivot[c];
            for (dst, src) in row.iter_mut().zip(&pivot).skip(c) {
                *dst -= f * src;
            }
        }
    }
    d
}

/// All principal minors of a matrix stored row-major are positive.
pub fn is_p_matrix(data: &[f64], n: usize) -> bool {
    (1u32..(1 << n)).all(|mask| {
        let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let sub = idx.iter().map(|&r| idx.iter().map(|&c| data[r * n + c]).collect()).collect();
        det(sub) > 0.0
    })
}

/// Lattice summary from enumerating the whole cube `{-1, -1 + 2/K, ..., 1}^n`
/// and keeping the points on the infinity sphere.
pub struct GridFacts {
    /// `min_x |x|_2^(2-m) max_i x_i (A x^(m-1))_i`.
    pub alpha_t: f64,
    /// Every point has a positive product.
    pub p: bool,
    /// Every point has a nonnegative product at a nonzero coordinate.
    pub p0: bool,
    pub points: usize,
}

pub fn grid_facts(a: &DenseTensor, h: f64) -> GridFacts {
    let n = a.dim();
    let m = a.order() as i32;
    let k = (2.0 / h - 1e-9).ceil() as usize;
    let values: Vec<f64> = (0..=k).map(|i| (2 * i) as f64 / k as f64 - 1.0).collect();
    let mut facts = GridFacts { alpha_t: f64::INFINITY, p: true, p0: true, points: 0 };
    let total = (k + 1).pow(n as u32);
    let mut x = vec![0.0; n];
    for flat in 0..total {
        let idx = multi_index(flat, k + 1, n);
        if !idx.iter().any(|&i| i == 0 || i == k) {
            continue;
        }
        for (xi, &i) in x.iter_mut().zip(&idx) {
            *xi = values[i];
        }
        facts.points += 1;
        let prods = products(a, &x);
        let top = prods.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let scale = norm2(&x).powi(2 - m);
        facts.alpha_t = facts.alpha_t.min(scale * top);
        facts.p &= top > 0.0;
        facts.p0 &= prods.iter().zip(&x).any(|(p, xi)| *xi != 0.0 && *p >= 0.0);
    }
    facts
}

/// Uniform entries in `[-1, 1]` on the grid `2^-10`.
pub fn dyadic(rng: &mut ChaCha8Rng) -> f64 {
    (rng.random_range(-1024i32..=1024) as f64) / 1024.0
}

/// Random tensor with dyadic entries, plus `shift` on the diagonal.
pub fn random_tensor(rng: &mut ChaCha8Rng, m: usize, n: usize, shift: f64) -> DenseTensor {
    let len = n.pow(m as u32);
    let mut data: Vec<f64> = (0..len).map(|_| dyadic(rng)).collect();
    let step: usize = (0..m).map(|p| n.pow(p as u32)).sum();
    for i in 0..n {
        data[i * step] += shift;
    }
    DenseTensor::from_dense(m, n, data).unwrap()
}
