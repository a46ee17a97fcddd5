use std::cmp::Ordering;

use super::lattice::{lex_cmp, scan, Best, Lattice, ScanOutcome, ScanRequest};
use super::local::{multistart, LocalConfig};
use super::operators::{grid_tolerance, objective, products, products_unchecked, support_max_product, Operator};
use super::{AlphaEstimate, PClass, PVerdict, ScalingCertificate, SearchConfig, SearchMethod};
use crate::error::{Error, Result};
use crate::spectral::{z_eigenpairs, EigenConfig};
use crate::tensor::{norm_inf, DenseTensor, IndexSet, Vector};

/// Below this many dimensions the multistart refutation also searches every
/// principal sub-tensor, which finds witnesses with zero components.
const SUBSET_SEARCH_MAX_DIM: usize = 4;

fn grid_scan(a: &DenseTensor, h: f64, max_evals: u64, req: ScanRequest) -> Result<ScanOutcome> {
    let lattice = Lattice::for_spacing(h);
    let required = lattice.cost_bound(a.dim());
    if required > max_evals as u128 {
        return Err(Error::ResourceLimit { required, cap: max_evals });
    }
    Ok(scan(a, lattice, req))
}

fn finish(
    a: &DenseTensor,
    op: Operator,
    cfg: &SearchConfig,
    best: Best,
    evaluations: u64,
) -> Result<AlphaEstimate> {
    let value = objective(a, op, &best.x)?;
    let tolerance = match cfg.method {
        SearchMethod::Grid { h } => Some(grid_tolerance(a, op, h)),
        SearchMethod::Multistart { .. } => None,
    };
    Ok(AlphaEstimate {
        value,
        minimizer: best.x.into(),
        operator: op,
        method: cfg.method,
        certified: cfg.is_grid(),
        tolerance,
        evaluations,
    })
}

/// Estimates `min_{|x|_inf = 1} max_i x_i op(x)_i`.
///
/// The grid method visits every lattice point of the sphere and fails with
/// `ResourceLimit` when `2n (2/h + 1)^(n-1)` exceeds `cfg.max_evals`.
pub fn alpha_estimate(a: &DenseTensor, op: Operator, cfg: &SearchConfig) -> Result<AlphaEstimate> {
    op.check_order(a)?;
    cfg.validate()?;
    match cfg.method {
        SearchMethod::Grid { h } => {
            let out = grid_scan(a, h, cfg.max_evals, ScanRequest { alpha: Some(op), refute: false })?;
            let best = out.alpha.expect("sphere lattice is never empty");
            finish(a, op, cfg, best, out.points)
        }
        SearchMethod::Multistart { starts, iters, seed } => {
            let f = |x: &[f64]| objective(a, op, x).expect("dimension checked");
            let (best, _, evals) = multistart(a.dim(), LocalConfig { starts, iters, seed }, &f);
            finish(a, op, cfg, best, evals)
        }
    }
}

fn to_sphere(x: &[f64]) -> Option<Vec<f64>> {
    let r = norm_inf(x);
    (r > 0.0 && r.is_finite()).then(|| x.iter().map(|v| v / r).collect())
}

/// Candidate refutation points: the point itself and a copy with
/// negligible components set to exactly zero.
fn push_candidate(out: &mut Vec<Vec<f64>>, x: &[f64]) {
    let Some(x) = to_sphere(x) else { return };
    let cleaned: Vec<f64> = x.iter().map(|&v| if v.abs() <= 1e-9 { 0.0 } else { v }).collect();
    if let Some(c) = to_sphere(&cleaned) {
        out.push(c);
    }
    out.push(x);
}

fn best_witness(a: &DenseTensor, candidates: &[Vec<f64>]) -> Option<(f64, Vec<f64>)> {
    let mut best: Option<(f64, Vec<f64>)> = None;
    for x in candidates {
        let Some(psi) = support_max_product(a, x).ok().flatten() else { continue };
        if psi.is_nan() || psi >= 0.0 {
            continue;
        }
        let better = match &best {
            None => true,
            Some((b, bx)) => match psi.total_cmp(b) {
                Ordering::Less => true,
                Ordering::Equal => lex_cmp(x, bx) == Ordering::Less,
                Ordering::Greater => false,
            },
        };
        if better {
            best = Some((psi, x.clone()));
        }
    }
    best
}

fn multistart_candidates(a: &DenseTensor, cfg: LocalConfig) -> Vec<Vec<f64>> {
    let n = a.dim();
    let mut out = Vec::new();
    let subsets: Vec<IndexSet> = if n <= SUBSET_SEARCH_MAX_DIM {
        IndexSet::all_nonempty(n).collect()
    } else {
        vec![IndexSet::full(n)]
    };
    for j in subsets {
        let sub = a.principal_subtensor(&j).expect("valid index set");
        let f = |x: &[f64]| products_unchecked(&sub, x).into_iter().fold(f64::NEG_INFINITY, f64::max);
        let (_, finals, _) = multistart(j.len(), cfg, &f);
        for b in finals {
            let mut x = vec![0.0; n];
            for (v, &i) in b.x.iter().zip(j.indices()) {
                x[i] = *v;
            }
            push_candidate(&mut out, &x);
        }
    }
    out
}

/// Z-eigenvectors give witnesses for symmetric tensors: at a pair
/// `(lambda, x)` the products are `lambda x_i^2`, and for odd order `-x`
/// has products `-lambda x_i^2`.
fn spectral_candidates(a: &DenseTensor, out: &mut Vec<Vec<f64>>) {
    let Ok(set) = z_eigenpairs(a, &EigenConfig::default()) else { return };
    for pair in set.pairs {
        let x = pair.x.as_slice();
        push_candidate(out, x);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        push_candidate(out, &neg);
    }
}

/// Decides P / P0 membership.
///
/// A `NOT_P0` verdict always carries a witness whose products are negative on
/// its support; it is a proof regardless of the search method. `P` requires a
/// positive alpha over the search and no witness. Everything else is
/// `P0_NOT_P` with the alpha minimizer attached.
pub fn p_classify(a: &DenseTensor, cfg: &SearchConfig) -> Result<PVerdict> {
    cfg.validate()?;
    let n = a.dim();
    let mut notes = Vec::new();
    let mut candidates = Vec::new();

    let alpha = match cfg.method {
        SearchMethod::Grid { h } => {
            let req = ScanRequest { alpha: Some(Operator::T), refute: true };
            let out = grid_scan(a, h, cfg.max_evals, req)?;
            if let Some(r) = &out.refute {
                candidates.push(r.x.clone());
            }
            let best = out.alpha.expect("sphere lattice is never empty");
            finish(a, Operator::T, cfg, best, out.points)?
        }
        SearchMethod::Multistart { starts, iters, seed } => {
            candidates = multistart_candidates(a, LocalConfig { starts, iters, seed });
            alpha_estimate(a, Operator::T, cfg)?
        }
    };
    push_candidate(&mut candidates, &alpha.minimizer);
    let neg: Vec<f64> = alpha.minimizer.iter().map(|v| -v).collect();
    push_candidate(&mut candidates, &neg);
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; n];
            e[i] = s;
            candidates.push(e);
        }
    }

    let mut witness = best_witness(a, &candidates);
    if witness.is_none() {
        let mut extra = Vec::new();
        spectral_candidates(a, &mut extra);
        witness = best_witness(a, &extra);
    }

    let certified_search = cfg.is_grid();
    let (class, witness, certified) = match witness {
        Some((_, x)) => {
            if alpha.value >= 0.0 {
                notes.push(format!(
                    "alpha_T = {} is nonnegative but a point with negative products on its support \
                     exists; zero components contribute product 0 to alpha",
                    alpha.value
                ));
            }
            (PClass::NotP0, Some(x), true)
        }
        None if alpha.value > 0.0 => {
            if let Some(tol) = alpha.tolerance.filter(|t| alpha.value <= *t) {
                notes.push(format!(
                    "alpha_T = {} lies inside the lattice tolerance band {}",
                    alpha.value, tol
                ));
            }
            (PClass::P, None, certified_search)
        }
        None => (PClass::P0NotP, Some(alpha.minimizer.to_vec()), certified_search),
    };

    if !certified_search && class != PClass::NotP0 {
        notes.push("empirical: multistart search only".into());
    }
    if class != PClass::NotP0 && a.order() % 2 == 1 && !a.is_symmetric(0.0) {
        notes.push("inconclusive: no refutation found for a nonsymmetric odd-order tensor".into());
    }

    let witness_products = witness.as_ref().map(|x| products(a, x)).transpose()?;
    Ok(PVerdict {
        class,
        witness: witness.map(Vector::from),
        witness_products,
        alpha_t: alpha,
        certified,
        notes,
    })
}

/// Builds `D = diag(d)` with `d_k = 1`, `d_j = epsilon` and
/// `x^T D (A x^(m-1)) > 0`, where `k` is the first index of the largest
/// product `x_k (A x^(m-1))_k`.
pub fn scaling_certificate(a: &DenseTensor, x: &[f64]) -> Result<ScalingCertificate> {
    let p = products(a, x)?;
    let mut k = 0;
    for (i, v) in p.iter().enumerate() {
        if *v > p[k] {
            k = i;
        }
    }
    let pk = p[k];
    if pk.is_nan() || pk <= 0.0 {
        return Err(Error::NoPositiveProduct);
    }
    let rest: f64 = p.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, v)| v).sum();
    let epsilon = (pk / (2.0 * rest.abs() + 1.0)).min(1.0);
    let d: Vec<f64> = (0..p.len()).map(|i| if i == k { 1.0 } else { epsilon }).collect();
    let product: f64 = p.iter().zip(&d).map(|(pi, di)| pi * di).sum();
    if product.is_nan() || product <= 0.0 {
        return Err(Error::InternalDisagreement(format!(
            "scaled product {product} is not positive"
        )));
    }
    Ok(ScalingCertificate { x: x.into(), k: k + 1, epsilon, d: d.into(), product })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2(rows: [[f64; 2]; 2]) -> DenseTensor {
        DenseTensor::from_dense(2, 2, rows.concat()).unwrap()
    }

    #[test]
    fn alpha_of_identity_matrix() {
        let est = alpha_estimate(&DenseTensor::identity(2, 2).unwrap(), Operator::T, &SearchConfig::grid(0.05))
            .unwrap();
        assert_eq!(est.value, 1.0);
        assert!(est.certified);
        assert_eq!(norm_inf(&est.minimizer), 1.0);
    }

    #[test]
    fn alpha_of_identity_order_four() {
        let id = DenseTensor::identity(4, 2).unwrap();
        let est = alpha_estimate(&id, Operator::T, &SearchConfig::grid(0.01)).unwrap();
        assert!((est.value - 0.5).abs() < 1e-12);
        assert_eq!(est.minimizer.as_slice(), &[-1.0, -1.0]);
        let f = alpha_estimate(&id, Operator::F, &SearchConfig::grid(0.05)).unwrap();
        assert!((f.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn alpha_of_negative_identity() {
        let neg = DenseTensor::identity(2, 2).unwrap().scaled(-1.0);
        let est = alpha_estimate(&neg, Operator::T, &SearchConfig::grid(0.05)).unwrap();
        assert_eq!(est.value, -1.0);
        assert_eq!(est.minimizer.as_slice(), &[-1.0, -1.0]);
    }

    #[test]
    fn alpha_multistart_is_not_certified() {
        let id = DenseTensor::identity(4, 2).unwrap();
        let est = alpha_estimate(&id, Operator::T, &SearchConfig::multistart(16, 200, 1)).unwrap();
        assert!(!est.certified);
        assert!((est.value - 0.5).abs() < 1e-6);
        assert_eq!(est.value, objective(&id, Operator::T, &est.minimizer).unwrap());
    }

    #[test]
    fn alpha_errors() {
        let odd = DenseTensor::identity(3, 2).unwrap();
        assert_eq!(
            alpha_estimate(&odd, Operator::F, &SearchConfig::default()).unwrap_err(),
            Error::OddOrderUnsupported { order: 3 }
        );
        let big = DenseTensor::identity(2, 6).unwrap();
        let err = alpha_estimate(&big, Operator::T, &SearchConfig::grid(0.01).with_max_evals(1000)).unwrap_err();
        assert!(matches!(err, Error::ResourceLimit { cap: 1000, .. }));
    }

    #[test]
    fn classify_identities() {
        for m in [2, 4] {
            let v = p_classify(&DenseTensor::identity(m, 3).unwrap(), &SearchConfig::default()).unwrap();
            assert_eq!(v.class, PClass::P);
            assert!(v.certified && v.witness.is_none());
        }
        let v = p_classify(&DenseTensor::identity(3, 2).unwrap(), &SearchConfig::default()).unwrap();
        assert_eq!(v.class, PClass::NotP0);
        assert_eq!(v.witness.unwrap().as_slice(), &[-1.0, -1.0]);
        assert_eq!(v.witness_products.unwrap(), vec![-1.0, -1.0]);
    }

    #[test]
    fn classify_signed_diagonal() {
        let d = DenseTensor::diagonal(2, &[1.0, -1.0]).unwrap();
        let v = p_classify(&d, &SearchConfig::default()).unwrap();
        assert_eq!(v.class, PClass::NotP0);
        let w = v.witness.unwrap();
        assert_eq!(w[0], 0.0);
        assert_eq!(w[1].abs(), 1.0);
        // alpha ignores the support restriction and reports 0 here
        assert_eq!(v.alpha_t.value, 0.0);
        assert_eq!(v.notes.len(), 1);
    }

    #[test]
    fn classify_zero_tensor() {
        let v = p_classify(&DenseTensor::zeros(3, 2).unwrap(), &SearchConfig::default()).unwrap();
        assert_eq!(v.class, PClass::P0NotP);
        assert!(support_max_product(&DenseTensor::zeros(3, 2).unwrap(), &v.witness.unwrap()).unwrap().unwrap() <= 0.0);
    }

    #[test]
    fn classify_multistart_finds_support_witness() {
        let d = DenseTensor::diagonal(2, &[1.0, -1.0]).unwrap();
        let v = p_classify(&d, &SearchConfig::multistart(8, 100, 4)).unwrap();
        assert_eq!(v.class, PClass::NotP0);
        let v = p_classify(&DenseTensor::identity(2, 3).unwrap(), &SearchConfig::multistart(8, 100, 4)).unwrap();
        assert_eq!(v.class, PClass::P);
        assert!(!v.certified);
        assert_eq!(v.label(), "empirical");
    }

    #[test]
    fn scaling_examples() {
        let id = DenseTensor::identity(2, 2).unwrap();
        let c = scaling_certificate(&id, &[1.0, -1.0]).unwrap();
        assert_eq!(c.k, 1);
        assert_eq!(c.product, 1.0 + c.epsilon);

        let a = m2([[1.0, 2.0], [0.0, 1.0]]);
        let c = scaling_certificate(&a, &[1.0, -1.0]).unwrap();
        assert_eq!(c.k, 2);
        assert_eq!(c.epsilon, 1.0 / 3.0);
        assert_eq!(c.d.as_slice(), &[1.0 / 3.0, 1.0]);
        assert!((c.product - 2.0 / 3.0).abs() < 1e-15);

        let neg = id.scaled(-1.0);
        assert_eq!(scaling_certificate(&neg, &[0.3, -2.0]).unwrap_err(), Error::NoPositiveProduct);
        assert_eq!(scaling_certificate(&id, &[0.0, 0.0]).unwrap_err(), Error::NoPositiveProduct);
    }
}
