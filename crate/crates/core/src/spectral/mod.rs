//! H- and Z-eigenpairs of small tensors, extreme Z-eigenvalues and
//! definiteness verdicts for even-order symmetric tensors.
//!
//! Matrices go through a symmetric eigensolver. For dimension at most two
//! and order at most four the eigen equations reduce to one polynomial in a
//! single variable, whose real roots give every pair; results on that path
//! are flagged `certified`. Everything else uses seeded multistart shifted
//! power iterations followed by Newton refinement, which reports the pairs
//! it finds and makes no completeness claim.

mod iterate;
mod oracle;

use std::cmp::Ordering;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structure::row_norm_bound;
use crate::tensor::{DenseTensor, Vector};

use iterate::{eigenvalue_at, newton, power, residual};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EigenKind {
    /// `A x^(m-1) = lambda x^[m-1]`.
    H,
    /// `A x^(m-1) = lambda x`, `x^T x = 1`.
    Z,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub lambda: f64,
    pub x: Vector,
    pub kind: EigenKind,
    pub residual: f64,
}

fn default_starts() -> usize {
    64
}
fn default_iters() -> usize {
    1000
}
fn default_tol() -> f64 {
    1e-10
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenConfig {
    #[serde(default = "default_starts")]
    pub starts: usize,
    #[serde(default = "default_iters")]
    pub iters: usize,
    /// Residual tolerance, relative to `1 + t_bound`.
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub seed: u64,
    /// Fixed power-iteration shift; `None` uses `1 + (m - 1) t_bound`.
    #[serde(default)]
    pub shift: Option<f64>,
    /// Use the eigensolver for matrices and exact enumeration for
    /// `n <= 2, m <= 4`; when off every case goes through multistart.
    #[serde(default = "default_exact")]
    pub exact_small: bool,
}

fn default_exact() -> bool {
    true
}

impl Default for EigenConfig {
    fn default() -> Self {
        EigenConfig {
            starts: default_starts(),
            iters: default_iters(),
            tol: default_tol(),
            seed: 0,
            shift: None,
            exact_small: true,
        }
    }
}

/// Pairs found for one tensor, sorted by eigenvalue, largest first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSet {
    pub kind: EigenKind,
    pub pairs: Vec<EigenPair>,
    /// The input was not symmetric and its symmetrization was analysed.
    pub symmetrized: bool,
    /// The list is complete (exact enumeration path).
    pub certified: bool,
    /// Every direction is an eigenvector; `pairs` holds representatives.
    pub continuum: bool,
    /// Number of distinct starts that reached each pair (1 on the exact paths).
    pub hits: Vec<usize>,
}

impl EigenSet {
    pub fn values(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.lambda).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremeZ {
    pub lambda_max: f64,
    pub lambda_min: f64,
    pub argmax: Vector,
    pub argmin: Vector,
    pub certified: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Definiteness {
    PositiveDefinite,
    PositiveSemidefinite,
    Indefinite,
    NotApplicableOddOrder,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefinitenessEvidence {
    pub min_z_value: f64,
    pub min_h_estimate: Option<f64>,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefinitenessVerdict {
    pub status: Definiteness,
    pub evidence: DefinitenessEvidence,
    pub symmetrized: bool,
}

fn prepare(a: &DenseTensor) -> (DenseTensor, bool) {
    if a.is_symmetric(0.0) {
        (a.clone(), false)
    } else {
        (a.symmetrize(), true)
    }
}

fn threshold(a: &DenseTensor, tol: f64) -> f64 {
    tol * (1.0 + row_norm_bound(a).t_bound)
}

/// Makes the first non-negligible component positive, for kinds where `x`
/// and `-x` carry the same eigenvalue.
fn normalize_sign(x: &mut [f64]) {
    if let Some(v) = x.iter().find(|v| v.abs() > 1e-9) {
        if *v < 0.0 {
            x.iter_mut().for_each(|c| *c = -*c);
        }
    }
}

fn lex(a: &[f64], b: &[f64]) -> Ordering {
    a.iter().zip(b).map(|(p, q)| p.total_cmp(q)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
}

fn same_pair(p: &EigenPair, q: &EigenPair) -> bool {
    if (p.lambda - q.lambda).abs() > 1e-6 * (1.0 + p.lambda.abs()) {
        return false;
    }
    let minus: f64 = p.x.iter().zip(q.x.iter()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let plus: f64 = p.x.iter().zip(q.x.iter()).map(|(a, b)| (a + b).powi(2)).sum::<f64>().sqrt();
    minus.min(plus) <= 1e-4
}

/// Deterministic merge: sort by `(lambda, x)`, keep the first of every
/// cluster, then order by eigenvalue, largest first. Each candidate carries
/// the start that produced it.
fn dedup(mut pairs: Vec<(EigenPair, usize)>) -> (Vec<EigenPair>, Vec<usize>) {
    pairs.sort_by(|(p, _), (q, _)| p.lambda.total_cmp(&q.lambda).then_with(|| lex(&p.x, &q.x)));
    let mut kept: Vec<(EigenPair, Vec<usize>)> = Vec::new();
    for (p, s) in pairs {
        match kept.iter_mut().find(|(q, _)| same_pair(&p, q)) {
            Some((_, starts)) => {
                if !starts.contains(&s) {
                    starts.push(s);
                }
            }
            None => kept.push((p, vec![s])),
        }
    }
    kept.sort_by(|(p, _), (q, _)| q.lambda.total_cmp(&p.lambda).then_with(|| lex(&p.x, &q.x)));
    kept.into_iter().map(|(p, s)| (p, s.len())).unzip()
}

/// Turns a unit vector into a verified pair, or `None` if the residual test fails.
fn accept(a: &DenseTensor, kind: EigenKind, x: Vec<f64>, limit: f64) -> Option<EigenPair> {
    let mut x = x;
    let sign_free = kind == EigenKind::H || a.order().is_multiple_of(2);
    if sign_free {
        normalize_sign(&mut x);
    }
    // no negative zeros in reports
    x.iter_mut().for_each(|c| *c += 0.0);
    let lambda = eigenvalue_at(a, kind, &x);
    let r = residual(a, kind, lambda, &x);
    (r <= limit && lambda.is_finite()).then(|| EigenPair { lambda, x: x.into(), kind, residual: r })
}

fn unit_vec(x: &[f64]) -> Option<Vec<f64>> {
    let r = crate::tensor::norm2(x);
    (r > 0.0).then(|| x.iter().map(|v| v / r).collect())
}

/// Newton-polished version of `x` if that lowers the residual.
fn refine(a: &DenseTensor, kind: EigenKind, x: Vec<f64>) -> Vec<f64> {
    let before = residual(a, kind, eigenvalue_at(a, kind, &x), &x);
    match newton(a, kind, &x) {
        Some(y) if residual(a, kind, eigenvalue_at(a, kind, &y), &y) < before => y,
        _ => x,
    }
}

fn matrix_pairs(a: &DenseTensor, kind: EigenKind, limit: f64) -> Vec<EigenPair> {
    let n = a.dim();
    let eig = SymmetricEigen::new(DMatrix::from_row_slice(n, n, a.data()));
    (0..n)
        .filter_map(|c| {
            let x: Vec<f64> = eig.eigenvectors.column(c).iter().copied().collect();
            let x = refine(a, kind, x);
            accept(a, kind, x, limit)
        })
        .collect()
}

fn oracle_pairs(a: &DenseTensor, kind: EigenKind, limit: f64) -> (Vec<EigenPair>, bool) {
    match oracle::candidates(a, kind) {
        Some(cands) => {
            let pairs = cands
                .into_iter()
                .filter_map(|x| unit_vec(&x))
                .filter_map(|x| accept(a, kind, refine(a, kind, x), limit))
                .collect();
            (pairs, false)
        }
        None => {
            let reps = [vec![1.0, 0.0], vec![0.0, 1.0]];
            let pairs = reps.into_iter().filter_map(|x| accept(a, kind, x, limit)).collect();
            (pairs, true)
        }
    }
}

fn random_unit(n: usize, seed: u64, s: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(s as u64);
    loop {
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
        if let Some(u) = unit_vec(&x) {
            return u;
        }
    }
}

fn iterative_pairs(a: &DenseTensor, kind: EigenKind, cfg: &EigenConfig, limit: f64) -> Vec<(EigenPair, usize)> {
    let m = a.order();
    let t = row_norm_bound(a).t_bound;
    let shift = cfg.shift.unwrap_or(1.0 + (m - 1) as f64 * t);
    let use_power = kind == EigenKind::Z || m.is_multiple_of(2);
    let per_start: Vec<Vec<(EigenPair, usize)>> = (0..cfg.starts)
        .into_par_iter()
        .map(|s| {
            let x0 = random_unit(a.dim(), cfg.seed, s);
            let mut raw = vec![x0.clone()];
            if use_power {
                for sign in [1.0, -1.0] {
                    raw.extend(power(a, kind, &x0, shift, sign, cfg.iters));
                }
            }
            raw.into_iter()
                .filter_map(|x| accept(a, kind, refine(a, kind, x), limit))
                .map(|p| (p, s))
                .collect()
        })
        .collect();
    per_start.into_iter().flatten().collect()
}

fn with_odd_couples(
    a: &DenseTensor,
    kind: EigenKind,
    pairs: Vec<(EigenPair, usize)>,
    limit: f64,
) -> Vec<(EigenPair, usize)> {
    if kind != EigenKind::Z || a.order().is_multiple_of(2) {
        return pairs;
    }
    let mut out = Vec::with_capacity(2 * pairs.len());
    for (p, s) in pairs {
        let neg: Vec<f64> = p.x.iter().map(|v| -v).collect();
        out.extend(accept(a, kind, neg, limit).map(|q| (q, s)));
        out.push((p, s));
    }
    out
}

fn eigenpairs(a: &DenseTensor, kind: EigenKind, cfg: &EigenConfig) -> Result<EigenSet> {
    if !(cfg.tol.is_finite() && cfg.tol > 0.0) {
        return Err(Error::InvalidConfig(format!("eigen tolerance must be positive, got {}", cfg.tol)));
    }
    let (s, symmetrized) = prepare(a);
    let limit = threshold(&s, cfg.tol);
    let exact = |p: Vec<EigenPair>| p.into_iter().map(|p| (p, 0)).collect::<Vec<_>>();
    let (pairs, certified, continuum) = if cfg.exact_small && s.order() == 2 {
        (exact(matrix_pairs(&s, kind, limit)), true, false)
    } else if cfg.exact_small && s.dim() <= 2 && s.order() <= 4 {
        let (p, cont) = oracle_pairs(&s, kind, limit);
        (exact(p), !cont, cont)
    } else {
        if cfg.starts == 0 {
            return Err(Error::InvalidConfig("starts must be at least 1".into()));
        }
        (iterative_pairs(&s, kind, cfg, limit), false, false)
    };
    let (pairs, hits) = dedup(with_odd_couples(&s, kind, pairs, limit));
    if pairs.is_empty() {
        return Err(Error::NonConvergence { starts: cfg.starts, best_residual: f64::INFINITY });
    }
    Ok(EigenSet { kind, pairs, symmetrized, certified, continuum, hits })
}

/// Z-eigenpairs `A x^(m-1) = lambda x`, `|x|_2 = 1`. For odd order every
/// pair is reported together with `(-lambda, -x)`.
pub fn z_eigenpairs(a: &DenseTensor, cfg: &EigenConfig) -> Result<EigenSet> {
    eigenpairs(a, EigenKind::Z, cfg)
}

/// H-eigenpairs `A x^(m-1) = lambda x^[m-1]`, reported with `|x|_2 = 1`.
pub fn h_eigenpairs(a: &DenseTensor, cfg: &EigenConfig) -> Result<EigenSet> {
    eigenpairs(a, EigenKind::H, cfg)
}

/// Largest and smallest values of `A x^m` on the unit sphere, taken over the
/// Z-eigenpairs found (they include the sphere maximizers and minimizers
/// that the shifted iterations converge to).
pub fn extreme_z_values(a: &DenseTensor, cfg: &EigenConfig) -> Result<ExtremeZ> {
    let set = z_eigenpairs(a, cfg)?;
    let first = set.pairs.first().expect("non-empty set");
    let last = set.pairs.last().expect("non-empty set");
    Ok(ExtremeZ {
        lambda_max: first.lambda,
        lambda_min: last.lambda,
        argmax: first.x.clone(),
        argmin: last.x.clone(),
        certified: set.certified,
    })
}

/// Positive (semi-)definiteness from the sign of the smallest Z-eigenvalue,
/// with a band of `1e-8 (1 + t_bound)` around zero.
pub fn definiteness_check(a: &DenseTensor, cfg: &EigenConfig) -> Result<DefinitenessVerdict> {
    let symmetrized = !a.is_symmetric(0.0);
    let ext = extreme_z_values(a, cfg)?;
    let min_h_estimate = h_eigenpairs(a, cfg).ok().and_then(|s| s.pairs.last().map(|p| p.lambda));
    let band = 1e-8 * (1.0 + row_norm_bound(a).t_bound);
    let status = if a.order() % 2 == 1 {
        Definiteness::NotApplicableOddOrder
    } else if ext.lambda_min > band {
        Definiteness::PositiveDefinite
    } else if ext.lambda_min >= -band {
        Definiteness::PositiveSemidefinite
    } else {
        Definiteness::Indefinite
    };
    Ok(DefinitenessVerdict {
        status,
        evidence: DefinitenessEvidence { min_z_value: ext.lambda_min, min_h_estimate, certified: ext.certified },
        symmetrized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(p, q)| (p - q).abs() <= tol)
    }

    #[test]
    fn diagonal_z_spectrum() {
        let d = DenseTensor::diagonal(4, &[1.0, 2.0]).unwrap();
        let set = z_eigenpairs(&d, &EigenConfig::default()).unwrap();
        assert!(set.certified);
        let mut values = set.values();
        values.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        assert!(close(&values, &[2.0, 1.0, 2.0 / 3.0], 1e-12), "{values:?}");
    }

    #[test]
    fn diagonal_z_spectrum_iterative() {
        // a zero third coordinate keeps the spectrum of diag(1, 2) and forces the multistart path
        let d = DenseTensor::diagonal(4, &[1.0, 2.0, 0.0]).unwrap();
        let set = z_eigenpairs(&d, &EigenConfig::default()).unwrap();
        assert!(!set.certified);
        for want in [2.0, 1.0, 2.0 / 3.0, 0.0] {
            assert!(set.values().iter().any(|v| (v - want).abs() < 1e-9), "missing {want}");
        }
        for p in &set.pairs {
            assert!(p.residual <= 1e-8);
        }
    }

    #[test]
    fn matrix_cases() {
        let id = DenseTensor::identity(2, 2).unwrap();
        let set = z_eigenpairs(&id, &EigenConfig::default()).unwrap();
        assert!(set.values().iter().all(|v| (v - 1.0).abs() < 1e-14));
        let m = DenseTensor::from_dense(2, 2, vec![2.0, 1.0, 1.0, 2.0]).unwrap();
        let h = h_eigenpairs(&m, &EigenConfig::default()).unwrap();
        assert!(close(&h.values(), &[3.0, 1.0], 1e-12));
        let ns = DenseTensor::from_dense(2, 2, vec![2.0, 0.0, 2.0, 2.0]).unwrap();
        let z = z_eigenpairs(&ns, &EigenConfig::default()).unwrap();
        assert!(z.symmetrized);
        assert!(close(&z.values(), &[3.0, 1.0], 1e-12));
    }

    #[test]
    fn zero_and_identity_tensors() {
        let z = z_eigenpairs(&DenseTensor::zeros(4, 2).unwrap(), &EigenConfig::default()).unwrap();
        assert!(z.continuum);
        assert!(z.values().iter().all(|v| *v == 0.0));
        let h = h_eigenpairs(&DenseTensor::identity(4, 2).unwrap(), &EigenConfig::default()).unwrap();
        assert!(h.continuum);
        assert!(h.values().iter().all(|v| *v == 1.0));
        let h = h_eigenpairs(&DenseTensor::diagonal(3, &[4.0, -1.0]).unwrap(), &EigenConfig::default()).unwrap();
        assert!(close(&h.values(), &[4.0, -1.0], 1e-12));
    }

    #[test]
    fn odd_order_z_values_come_in_couples() {
        let a = DenseTensor::identity(3, 3).unwrap();
        let set = z_eigenpairs(&a, &EigenConfig::default()).unwrap();
        for p in &set.pairs {
            assert!(set.pairs.iter().any(|q| (q.lambda + p.lambda).abs() < 1e-9));
        }
        assert!(set.values().iter().any(|v| (v - 1.0).abs() < 1e-9));
    }

    #[test]
    fn extreme_values() {
        let d = DenseTensor::diagonal(2, &[1.0, -1.0]).unwrap();
        let e = extreme_z_values(&d, &EigenConfig::default()).unwrap();
        assert_eq!((e.lambda_max, e.lambda_min), (1.0, -1.0));
        let d = DenseTensor::diagonal(4, &[1.0, 2.0]).unwrap();
        let e = extreme_z_values(&d, &EigenConfig::default()).unwrap();
        assert!((e.lambda_max - 2.0).abs() < 1e-12 && (e.lambda_min - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn definiteness_examples() {
        let cfg = EigenConfig::default();
        let v = definiteness_check(&DenseTensor::identity(4, 3).unwrap(), &cfg).unwrap();
        assert_eq!(v.status, Definiteness::PositiveDefinite);
        let v = definiteness_check(&DenseTensor::zeros(4, 2).unwrap(), &cfg).unwrap();
        assert_eq!(v.status, Definiteness::PositiveSemidefinite);
        let v = definiteness_check(&DenseTensor::diagonal(4, &[1.0, -1.0]).unwrap(), &cfg).unwrap();
        assert_eq!(v.status, Definiteness::Indefinite);
        let v = definiteness_check(&DenseTensor::identity(3, 2).unwrap(), &cfg).unwrap();
        assert_eq!(v.status, Definiteness::NotApplicableOddOrder);
    }

    #[test]
    fn json_shape() {
        let set = z_eigenpairs(&DenseTensor::identity(2, 1).unwrap(), &EigenConfig::default()).unwrap();
        let v = serde_json::to_value(&set.pairs).unwrap();
        assert_eq!(v, serde_json::json!([{"lambda": 1.0, "x": [1.0], "kind": "Z", "residual": 0.0}]));
    }
}
