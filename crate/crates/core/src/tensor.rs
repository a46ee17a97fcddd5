//! Dense real tensors of order `m` and dimension `n`, together with the
//! multilinear contractions used everywhere else in the crate.
//!
//! Storage is row-major over the index tuple `(i1, ..., im)`, so the `n^(m-1)`
//! entries of "row" `i` (all tuples with leading index `i`) are contiguous.
//! Indices are zero-based in this API; the JSON format in [`crate::io`] is
//! one-based.

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound on `n^m` for dense storage.
pub const MAX_ENTRIES: usize = 10_000_000;

/// A real vector with norm accessors.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(components: Vec<f64>) -> Self {
        Vector(components)
    }

    pub fn zeros(n: usize) -> Self {
        Vector(vec![0.0; n])
    }

    /// Unit vector `e_i` (zero-based `i`).
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        Vector(v)
    }

    pub fn norm_inf(&self) -> f64 {
        norm_inf(&self.0)
    }

    pub fn norm2(&self) -> f64 {
        norm2(&self.0)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl Deref for Vector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for Vector {
    fn from(v: Vec<f64>) -> Self {
        Vector(v)
    }
}

impl From<&[f64]> for Vector {
    fn from(v: &[f64]) -> Self {
        Vector(v.to_vec())
    }
}

pub fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

pub fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Exponent for [`componentwise_power`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Power {
    /// `x_i^k`.
    Int(u32),
    /// The real `k`-th root `x_i^(1/k)`; signed for odd `k`.
    Root(u32),
}

/// Componentwise power `x^[p]`.
pub fn componentwise_power(x: &[f64], p: Power) -> Result<Vector> {
    match p {
        Power::Int(k) => Ok(x.iter().map(|v| v.powi(k as i32)).collect::<Vec<_>>().into()),
        Power::Root(0) => Err(Error::InvalidConfig("zeroth root is undefined".into())),
        Power::Root(k) => {
            let mut out = Vec::with_capacity(x.len());
            for (i, &v) in x.iter().enumerate() {
                if k % 2 == 0 && v < 0.0 {
                    return Err(Error::EvenRootOfNegative { component: i + 1, value: v });
                }
                out.push(signed_root(v, k));
            }
            Ok(out.into())
        }
    }
}

/// Real `k`-th root preserving sign. Callers guarantee `v >= 0` when `k` is even.
pub(crate) fn signed_root(v: f64, k: u32) -> f64 {
    match k {
        1 => v,
        2 => v.sqrt(),
        3 => v.cbrt(),
        _ => v.signum() * v.abs().powf(1.0 / k as f64),
    }
}

/// Summation strategy for contractions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Summation {
    /// Plain left-to-right accumulation in lexicographic index order.
    #[default]
    Lexicographic,
    /// Compensated (Kahan) accumulation, same order.
    Kahan,
}

/// Sorted, duplicate-free, non-empty subset of `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    /// Builds an index set from zero-based indices; order of input is irrelevant.
    pub fn new(mut indices: Vec<usize>, dim: usize) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptyIndexSet);
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= dim) {
            return Err(Error::IndexOutOfRange { index: bad + 1, dim });
        }
        indices.sort_unstable();
        if let Some(w) = indices.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateIndex(w[0] + 1));
        }
        Ok(IndexSet(indices))
    }

    pub fn from_one_based(indices: &[usize], dim: usize) -> Result<Self> {
        let mut zero = Vec::with_capacity(indices.len());
        for &i in indices {
            if i == 0 || i > dim {
                return Err(Error::IndexOutOfRange { index: i, dim });
            }
            zero.push(i - 1);
        }
        Self::new(zero, dim)
    }

    pub fn full(dim: usize) -> Self {
        IndexSet((0..dim).collect())
    }

    /// Every non-empty subset of `0..dim`, ordered by bitmask.
    pub fn all_nonempty(dim: usize) -> impl Iterator<Item = IndexSet> {
        assert!(dim < 64, "subset enumeration limited to dim < 64");
        (1u64..(1u64 << dim)).map(move |mask| {
            IndexSet((0..dim).filter(|&i| mask & (1 << i) != 0).collect())
        })
    }

    /// Maps positions of `inner` (a subset of `0..self.len()`) through `self`.
    pub fn compose(&self, inner: &IndexSet) -> Result<IndexSet> {
        let mapped = inner
            .0
            .iter()
            .map(|&k| {
                self.0
                    .get(k)
                    .copied()
                    .ok_or(Error::IndexOutOfRange { index: k + 1, dim: self.0.len() })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(IndexSet(mapped))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }
}

/// Constructors for special tensors.
#[derive(Debug, Clone, PartialEq)]
pub enum Special {
    Identity,
    Diagonal(Vector),
    Zero,
}

/// Immutable dense tensor in `T_{m,n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    order: usize,
    dim: usize,
    data: Vec<f64>,
}

fn checked_len(order: usize, dim: usize) -> Result<usize> {
    if order < 2 || dim < 1 {
        return Err(Error::InvalidShape { order, dim });
    }
    let total = (dim as u128).checked_pow(order as u32).unwrap_or(u128::MAX);
    if total > MAX_ENTRIES as u128 {
        return Err(Error::TooLarge { entries: total, limit: MAX_ENTRIES });
    }
    Ok(total as usize)
}

impl DenseTensor {
    /// Wraps a row-major dense array of length `n^m`.
    pub fn from_dense(order: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        let len = checked_len(order, dim)?;
        if data.len() != len {
            return Err(Error::SizeMismatch { expected: len, got: data.len() });
        }
        let t = DenseTensor { order, dim, data };
        if let Some(pos) = t.data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteEntry {
                idx: t.unravel(pos).iter().map(|i| i + 1).collect(),
                value: t.data[pos],
            });
        }
        Ok(t)
    }

    /// Builds a tensor from zero-based coordinates; unspecified entries are zero.
    pub fn from_coords<I>(order: usize, dim: usize, coords: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        let len = checked_len(order, dim)?;
        let mut data = vec![0.0; len];
        let mut seen = vec![false; len];
        for (idx, value) in coords {
            if idx.len() != order {
                return Err(Error::WrongArity { idx: idx.iter().map(|i| i + 1).collect(), order });
            }
            if let Some(&bad) = idx.iter().find(|&&i| i >= dim) {
                return Err(Error::IndexOutOfRange { index: bad + 1, dim });
            }
            let one_based = || idx.iter().map(|i| i + 1).collect::<Vec<_>>();
            if !value.is_finite() {
                return Err(Error::NonFiniteEntry { idx: one_based(), value });
            }
            let flat = idx.iter().fold(0, |acc, &i| acc * dim + i);
            if seen[flat] {
                return Err(Error::DuplicateCoordinate { idx: one_based() });
            }
            seen[flat] = true;
            data[flat] = value;
        }
        Ok(DenseTensor { order, dim, data })
    }

    pub fn zeros(order: usize, dim: usize) -> Result<Self> {
        let len = checked_len(order, dim)?;
        Ok(DenseTensor { order, dim, data: vec![0.0; len] })
    }

    pub fn identity(order: usize, dim: usize) -> Result<Self> {
        let mut t = Self::zeros(order, dim)?;
        for i in 0..dim {
            let f = t.diagonal_flat(i);
            t.data[f] = 1.0;
        }
        Ok(t)
    }

    /// Diagonal tensor with `a_{i...i} = d_i`.
    pub fn diagonal(order: usize, d: &[f64]) -> Result<Self> {
        let mut t = Self::zeros(order, d.len())?;
        for (i, &v) in d.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteEntry { idx: vec![i + 1; order], value: v });
            }
            let f = t.diagonal_flat(i);
            t.data[f] = v;
        }
        Ok(t)
    }

    pub fn special(kind: &Special, order: usize, dim: usize) -> Result<Self> {
        match kind {
            Special::Identity => Self::identity(order, dim),
            Special::Zero => Self::zeros(order, dim),
            Special::Diagonal(d) => {
                if d.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: d.len() });
                }
                Self::diagonal(order, d)
            }
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Number of entries per row, `n^(m-1)`.
    pub fn row_len(&self) -> usize {
        self.data.len() / self.dim
    }

    /// Entries `a_{i, i2, ..., im}` in lexicographic order of the tail.
    pub fn row(&self, i: usize) -> &[f64] {
        let w = self.row_len();
        &self.data[i * w..(i + 1) * w]
    }

    /// Flat position of `a_{i...i}`.
    pub fn diagonal_flat(&self, i: usize) -> usize {
        let stride: usize = (0..self.order).map(|k| self.dim.pow(k as u32)).sum();
        i * stride
    }

    /// Offset of the diagonal entry inside row `i`.
    pub fn diagonal_in_row(&self, i: usize) -> usize {
        self.diagonal_flat(i) - i * self.row_len()
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.flat(idx)]
    }

    pub fn flat(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.order);
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.order];
        for slot in idx.iter_mut().rev() {
            *slot = flat % self.dim;
            flat /= self.dim;
        }
        idx
    }

    /// Tail tuple `(i2, ..., im)` of the `k`-th entry in a row.
    pub fn unravel_tail(&self, mut k: usize) -> Vec<usize> {
        let mut idx = vec![0; self.order - 1];
        for slot in idx.iter_mut().rev() {
            *slot = k % self.dim;
            k /= self.dim;
        }
        idx
    }

    fn check_vec(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        Ok(())
    }

    /// `A x^(m-1)`, summed in lexicographic tail order.
    pub fn contract_once(&self, x: &[f64]) -> Result<Vector> {
        self.contract_once_with(x, Summation::Lexicographic)
    }

    pub fn contract_once_with(&self, x: &[f64], summation: Summation) -> Result<Vector> {
        self.check_vec(x)?;
        Ok(self.contract_unchecked(x, summation).into())
    }

    pub(crate) fn contract_unchecked(&self, x: &[f64], summation: Summation) -> Vec<f64> {
        let prods = tail_products(x, self.order - 1);
        (0..self.dim)
            .map(|i| {
                let row = self.row(i);
                match summation {
                    Summation::Lexicographic => {
                        row.iter().zip(&prods).fold(0.0, |acc, (a, p)| acc + a * p)
                    }
                    Summation::Kahan => kahan(row.iter().zip(&prods).map(|(a, p)| a * p)),
                }
            })
            .collect()
    }

    /// The matrix `A x^(m-2)` with entries `sum a_{i j i3..im} x_{i3}..x_{im}`, row-major.
    pub fn contract_twice(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_vec(x)?;
        let n = self.dim;
        let prods = tail_products(x, self.order - 2);
        let block = prods.len();
        let mut out = vec![0.0; n * n];
        for (ij, slot) in out.iter_mut().enumerate() {
            let seg = &self.data[ij * block..(ij + 1) * block];
            *slot = seg.iter().zip(&prods).fold(0.0, |acc, (a, p)| acc + a * p);
        }
        Ok(out)
    }

    /// The homogeneous polynomial `A x^m = x . (A x^(m-1))`.
    pub fn polynomial_value(&self, x: &[f64]) -> Result<f64> {
        let ax = self.contract_once(x)?;
        Ok(x.iter().zip(ax.iter()).fold(0.0, |acc, (a, b)| acc + a * b))
    }

    /// Principal sub-tensor on the index set `j`.
    pub fn principal_subtensor(&self, j: &IndexSet) -> Result<DenseTensor> {
        if j.is_empty() {
            return Err(Error::EmptyIndexSet);
        }
        if let Some(&bad) = j.indices().iter().find(|&&i| i >= self.dim) {
            return Err(Error::IndexOutOfRange { index: bad + 1, dim: self.dim });
        }
        let r = j.len();
        let len = r.pow(self.order as u32);
        let mut data = Vec::with_capacity(len);
        let mut sub = vec![0usize; self.order];
        for _ in 0..len {
            let src = sub.iter().fold(0, |acc, &k| acc * self.dim + j.indices()[k]);
            data.push(self.data[src]);
            for slot in sub.iter_mut().rev() {
                *slot += 1;
                if *slot < r {
                    break;
                }
                *slot = 0;
            }
        }
        Ok(DenseTensor { order: self.order, dim: r, data })
    }

    /// Flat position of the canonical (sorted) representative of the orbit of `flat`.
    fn orbit_key(&self, flat: usize) -> usize {
        let mut idx = self.unravel(flat);
        idx.sort_unstable();
        self.flat(&idx)
    }

    /// Largest deviation of an entry from its permutation-orbit representative.
    pub fn symmetry_defect(&self) -> f64 {
        (0..self.data.len())
            .map(|f| (self.data[f] - self.data[self.orbit_key(f)]).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.symmetry_defect() <= tol
    }

    /// Averages every entry over its permutation orbit. Orbits whose entries
    /// already agree are left untouched, so the map is idempotent bit-for-bit.
    pub fn symmetrize(&self) -> DenseTensor {
        let len = self.data.len();
        let mut sum = vec![0.0; len];
        let mut count = vec![0usize; len];
        let mut uniform = vec![true; len];
        let keys: Vec<usize> = (0..len).map(|f| self.orbit_key(f)).collect();
        for (f, &k) in keys.iter().enumerate() {
            sum[k] += self.data[f];
            count[k] += 1;
            if self.data[f] != self.data[k] {
                uniform[k] = false;
            }
        }
        let data = keys
            .iter()
            .enumerate()
            .map(|(f, &k)| if uniform[k] { self.data[f] } else { sum[k] / count[k] as f64 })
            .collect();
        DenseTensor { order: self.order, dim: self.dim, data }
    }

    pub fn scaled(&self, c: f64) -> DenseTensor {
        DenseTensor {
            order: self.order,
            dim: self.dim,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    /// Entrywise sum; shapes must agree.
    pub fn try_add(&self, other: &DenseTensor) -> Result<DenseTensor> {
        if self.order != other.order || self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.len(), got: other.len() });
        }
        Ok(DenseTensor {
            order: self.order,
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn max_abs(&self) -> f64 {
        norm_inf(&self.data)
    }

    /// Copy with entries modified through `f(index tuple, value)`.
    pub fn map_indexed(&self, mut f: impl FnMut(&[usize], f64) -> f64) -> Result<DenseTensor> {
        let data = (0..self.data.len())
            .map(|k| f(&self.unravel(k), self.data[k]))
            .collect();
        DenseTensor::from_dense(self.order, self.dim, data)
    }
}

/// Products `x_{i1} * ... * x_{ik}` over all `k`-tuples in lexicographic order.
pub(crate) fn tail_products(x: &[f64], k: usize) -> Vec<f64> {
    let mut prods = vec![1.0];
    for _ in 0..k {
        let mut next = Vec::with_capacity(prods.len() * x.len());
        for &p in &prods {
            next.extend(x.iter().map(|&xi| p * xi));
        }
        prods = next;
    }
    prods
}

fn kahan(terms: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for t in terms {
        let y = t - c;
        let s = sum + y;
        c = (s - sum) - y;
        sum = s;
    }
    sum
}
