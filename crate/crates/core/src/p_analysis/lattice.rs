//! Exhaustive evaluation over the lattice `{-1, -1 + h, ..., 1}^n` restricted
//! to the infinity-norm unit sphere.
//!
//! Each sphere point is visited once: a point belongs to the face `(j, ±1)`
//! where `j` is its first coordinate of modulus one, so coordinates before
//! `j` range over interior lattice values only. Within a face the last free
//! coordinate is swept as a line; `(A x^(m-1))_i` is a polynomial of degree
//! `m - 1` along the line, so its coefficients are built once per line and
//! evaluated by Horner's rule per point.

use std::cmp::Ordering;

use rayon::prelude::*;

use super::operators::{t_scale, Operator};
use crate::tensor::{signed_root, DenseTensor};

/// Lattice with `steps` intervals across `[-1, 1]`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Lattice {
    pub steps: usize,
}

impl Lattice {
    /// Smallest lattice whose spacing does not exceed `h`.
    pub fn for_spacing(h: f64) -> Lattice {
        let steps = (2.0 / h - 1e-9).ceil().max(1.0) as usize;
        Lattice { steps }
    }

    pub fn value(&self, k: usize) -> f64 {
        (2 * k) as f64 / self.steps as f64 - 1.0
    }

    /// Cost bound `2n (steps + 1)^(n-1)` used for the evaluation cap.
    pub fn cost_bound(&self, n: usize) -> u128 {
        2 * n as u128 * (self.steps as u128 + 1).pow(n as u32 - 1)
    }
}

/// Lowest value seen, ties broken by the lexicographically smallest point.
#[derive(Debug, Clone)]
pub(crate) struct Best {
    pub value: f64,
    pub x: Vec<f64>,
}

pub(crate) fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(p, q)| p.total_cmp(q))
        .find(|o| *o != Ordering::Equal)
        .unwrap_or(Ordering::Equal)
}

impl Best {
    pub fn better_than(&self, value: f64, x: &[f64]) -> bool {
        match self.value.total_cmp(&value) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => lex_cmp(&self.x, x) != Ordering::Greater,
        }
    }

    pub fn offer(slot: &mut Option<Best>, value: f64, x: &[f64]) {
        match slot {
            Some(b) if b.better_than(value, x) => {}
            _ => *slot = Some(Best { value, x: x.to_vec() }),
        }
    }

    pub fn merge(slot: &mut Option<Best>, other: Option<Best>) {
        if let Some(o) = other {
            Best::offer(slot, o.value, &o.x);
        }
    }
}

/// What to track during a scan.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ScanRequest {
    pub alpha: Option<Operator>,
    pub refute: bool,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct ScanOutcome {
    /// Minimum of `max_i x_i op(x)_i`.
    pub alpha: Option<Best>,
    /// Minimum of `max_{x_i != 0} x_i (A x^(m-1))_i`.
    pub refute: Option<Best>,
    pub points: u64,
}

impl ScanOutcome {
    fn absorb(&mut self, other: ScanOutcome) {
        Best::merge(&mut self.alpha, other.alpha);
        Best::merge(&mut self.refute, other.refute);
        self.points += other.points;
    }
}

pub(crate) fn scan(a: &DenseTensor, lattice: Lattice, req: ScanRequest) -> ScanOutcome {
    let n = a.dim();
    let faces: Vec<(usize, f64)> =
        (0..n).flat_map(|j| [(j, -1.0), (j, 1.0)]).collect();
    let parts: Vec<ScanOutcome> = faces
        .par_iter()
        .map(|&(j, s)| scan_face(a, lattice, req, j, s))
        .collect();
    let mut out = ScanOutcome::default();
    for p in parts {
        out.absorb(p);
    }
    out
}

struct PointEval<'a> {
    a: &'a DenseTensor,
    req: ScanRequest,
    out: ScanOutcome,
}

impl PointEval<'_> {
    #[inline]
    fn visit(&mut self, x: &[f64], ax: &[f64], norm_sq: f64) {
        self.out.points += 1;
        if let Some(op) = self.req.alpha {
            let m = self.a.order();
            let mut value = f64::NEG_INFINITY;
            match op {
                Operator::T => {
                    let s = t_scale(norm_sq, m);
                    for (xi, p) in x.iter().zip(ax) {
                        value = value.max(xi * (s * p));
                    }
                }
                Operator::F => {
                    let k = (m - 1) as u32;
                    for (xi, p) in x.iter().zip(ax) {
                        value = value.max(xi * signed_root(*p, k));
                    }
                }
            }
            offer_fast(&mut self.out.alpha, value, x);
        }
        if self.req.refute {
            let mut value = f64::NEG_INFINITY;
            for (xi, p) in x.iter().zip(ax) {
                if *xi != 0.0 {
                    value = value.max(xi * p);
                }
            }
            offer_fast(&mut self.out.refute, value, x);
        }
    }
}

/// Skips the full comparison for points that are clearly worse.
#[inline(always)]
fn offer_fast(slot: &mut Option<Best>, value: f64, x: &[f64]) {
    if let Some(b) = slot {
        if value > b.value {
            return;
        }
    }
    Best::offer(slot, value, x);
}

fn scan_face(a: &DenseTensor, lattice: Lattice, req: ScanRequest, j: usize, sign: f64) -> ScanOutcome {
    let n = a.dim();
    let m = a.order();
    let k = lattice.steps;
    let mut eval = PointEval { a, req, out: ScanOutcome::default() };
    let values: Vec<f64> = (0..=k).map(|i| lattice.value(i)).collect();
    let mut x = vec![0.0; n];
    x[j] = sign;

    if n == 1 {
        let ax = a.contract_unchecked(&x, Default::default());
        eval.visit(&x, &ax, 1.0);
        return eval.out;
    }

    // coordinates before the face index stay strictly inside (-1, 1)
    let range = |c: usize| if c < j { (1, k - 1) } else { (0, k) };
    let free: Vec<usize> = (0..n).filter(|&c| c != j).collect();
    let line = *free.last().unwrap();
    let others = &free[..free.len() - 1];
    if others.iter().chain([&line]).any(|&c| {
        let (lo, hi) = range(c);
        lo > hi
    }) {
        return eval.out;
    }

    let mut counter: Vec<usize> = others.iter().map(|&c| range(c).0).collect();
    let row_len = a.row_len();
    let mut coef = vec![0.0; n * m];
    let mut tail_count = vec![0u8; row_len];
    let mut tail_prod = vec![0.0; row_len];
    let mut ax = vec![0.0; n];
    let (line_lo, line_hi) = range(line);

    loop {
        for (slot, &c) in counter.iter().zip(others) {
            x[c] = values[*slot];
        }
        let fixed_sq: f64 = (0..n).filter(|&c| c != line).map(|c| x[c] * x[c]).sum();

        // tail tuples: how often the line coordinate appears and the product of the rest
        tail_count[0] = 0;
        tail_prod[0] = 1.0;
        let mut filled = 1;
        for _ in 0..m - 1 {
            for t in (0..filled).rev() {
                let (cnt, prod) = (tail_count[t], tail_prod[t]);
                for c in (0..n).rev() {
                    let dst = t * n + c;
                    if c == line {
                        tail_count[dst] = cnt + 1;
                        tail_prod[dst] = prod;
                    } else {
                        tail_count[dst] = cnt;
                        tail_prod[dst] = prod * x[c];
                    }
                }
            }
            filled *= n;
        }
        coef.iter_mut().for_each(|c| *c = 0.0);
        for i in 0..n {
            let row = a.row(i);
            let ci = &mut coef[i * m..(i + 1) * m];
            for t in 0..row_len {
                ci[tail_count[t] as usize] += row[t] * tail_prod[t];
            }
        }

        for &t in &values[line_lo..=line_hi] {
            x[line] = t;
            for i in 0..n {
                let ci = &coef[i * m..(i + 1) * m];
                ax[i] = ci.iter().rev().fold(0.0, |acc, c| acc * t + c);
            }
            eval.visit(&x, &ax, fixed_sq + t * t);
        }

        // odometer over the other free coordinates
        let mut pos = counter.len();
        loop {
            if pos == 0 {
                return eval.out;
            }
            pos -= 1;
            let (lo, hi) = range(others[pos]);
            if counter[pos] < hi {
                counter[pos] += 1;
                break;
            }
            counter[pos] = lo;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::p_analysis::operators::{objective, support_max_product};

    /// Brute force over the full cube, keeping only sphere points.
    fn brute(a: &DenseTensor, lattice: Lattice, op: Operator) -> (f64, f64, usize) {
        let n = a.dim();
        let k = lattice.steps;
        let mut idx = vec![0usize; n];
        let (mut alpha, mut refute, mut count) = (f64::INFINITY, f64::INFINITY, 0);
        loop {
            if idx.iter().any(|&i| i == 0 || i == k) {
                let x: Vec<f64> = idx.iter().map(|&i| lattice.value(i)).collect();
                alpha = alpha.min(objective(a, op, &x).unwrap());
                refute = refute.min(support_max_product(a, &x).unwrap().unwrap());
                count += 1;
            }
            let mut p = n;
            loop {
                if p == 0 {
                    return (alpha, refute, count);
                }
                p -= 1;
                if idx[p] < k {
                    idx[p] += 1;
                    break;
                }
                idx[p] = 0;
            }
        }
    }

    #[test]
    fn lattice_values_hit_endpoints_and_zero() {
        let l = Lattice::for_spacing(0.05);
        assert_eq!(l.steps, 40);
        assert_eq!(l.value(0), -1.0);
        assert_eq!(l.value(20), 0.0);
        assert_eq!(l.value(40), 1.0);
        assert_eq!(Lattice::for_spacing(0.03).steps, 67);
    }

    #[test]
    fn scan_matches_brute_force() {
        let a = DenseTensor::from_dense(
            3,
            3,
            (0..27).map(|k| ((k * 7 % 11) as f64 - 5.0) / 4.0).collect(),
        )
        .unwrap();
        let lattice = Lattice { steps: 8 };
        let out = scan(&a, lattice, ScanRequest { alpha: Some(Operator::T), refute: true });
        let (alpha, refute, count) = brute(&a, lattice, Operator::T);
        assert_eq!(out.points as usize, count);
        assert!((out.alpha.unwrap().value - alpha).abs() < 1e-12);
        assert!((out.refute.unwrap().value - refute).abs() < 1e-12);

        let b = DenseTensor::from_dense(4, 2, (0..16).map(|k| (k as f64 - 7.5) / 3.0).collect())
            .unwrap();
        let out = scan(&b, lattice, ScanRequest { alpha: Some(Operator::F), refute: false });
        let (alpha, _, count) = brute(&b, lattice, Operator::F);
        assert_eq!(out.points as usize, count);
        assert!((out.alpha.unwrap().value - alpha).abs() < 1e-12);
    }

    #[test]
    fn one_dimensional_sphere() {
        let a = DenseTensor::from_dense(3, 1, vec![2.0]).unwrap();
        let out = scan(&a, Lattice { steps: 4 }, ScanRequest { alpha: Some(Operator::T), refute: true });
        assert_eq!(out.points, 2);
        let best = out.alpha.unwrap();
        assert_eq!((best.value, best.x), (-2.0, vec![-1.0]));
    }
}
