//! Entry-level class membership: Z tensors, (strict) diagonal dominance,
//! B / B0 tensors and the row-norm bounds on `T_A` and `F_A`.
//!
//! All checks are exact comparisons on the stored `f64` values. A non-zero
//! [`Tolerance`] turns a strict test `a > b` into `a - b > eps` and a weak
//! test `a >= b` into `a - b >= -eps`. For the B/B0 row-sum conditions the
//! comparison happens on the row-average scale `sum / n^(m-1)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::DenseTensor;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Tolerance {
    eps: f64,
}

impl Tolerance {
    pub const EXACT: Tolerance = Tolerance { eps: 0.0 };

    pub fn new(eps: f64) -> Result<Self> {
        if !eps.is_finite() || eps < 0.0 {
            return Err(Error::InvalidTolerance(eps));
        }
        Ok(Tolerance { eps })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    fn gt(&self, a: f64, b: f64) -> bool {
        a - b > self.eps
    }

    fn ge(&self, a: f64, b: f64) -> bool {
        a - b >= -self.eps
    }

    fn cmp(&self, strict: bool, a: f64, b: f64) -> bool {
        if strict {
            self.gt(a, b)
        } else {
            self.ge(a, b)
        }
    }
}

/// B-class verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BClass {
    B,
    #[serde(rename = "B0_NOT_B")]
    B0NotB,
    #[serde(rename = "NEITHER")]
    Neither,
}

impl BClass {
    /// `B > B0_NOT_B > NEITHER`.
    pub fn rank(self) -> u8 {
        match self {
            BClass::B => 2,
            BClass::B0NotB => 1,
            BClass::Neither => 0,
        }
    }
}

/// A failed condition, located at the lexicographically first offending tuple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub check: String,
    /// One-based row index.
    pub row: usize,
    /// One-based index tuple `(i, i2, ..., im)`.
    pub index: Vec<usize>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BVerdict {
    pub class: BClass,
    /// First violation of the strict (B) conditions, if any.
    pub violation: Option<Violation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowDiagnostics {
    /// One-based row index.
    pub i: usize,
    pub row_sum: f64,
    pub beta: f64,
    pub threshold: f64,
    pub offdiag_abs_sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    #[serde(rename = "is_Z")]
    pub is_z: bool,
    #[serde(rename = "is_B")]
    pub is_b: bool,
    #[serde(rename = "is_B0")]
    pub is_b0: bool,
    pub strictly_diag_dominated: bool,
    pub diag_dominated: bool,
    #[serde(rename = "entry_conditions_B")]
    pub entry_conditions_b: bool,
    #[serde(rename = "entry_conditions_B0")]
    pub entry_conditions_b0: bool,
    /// `is_Z && is_B0 <=> is_Z && diag_dominated`, and the strict analogue.
    pub z_dominance_consistent: bool,
    pub per_row: Vec<RowDiagnostics>,
    pub failures: Vec<Violation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormBounds {
    pub t_bound: f64,
    /// Present iff the order is even.
    pub f_bound: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BMode {
    B,
    B0,
}

fn one_based_tuple(a: &DenseTensor, i: usize, k: usize) -> Vec<usize> {
    std::iter::once(i + 1).chain(a.unravel_tail(k).into_iter().map(|j| j + 1)).collect()
}

fn off_entries(a: &DenseTensor, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
    let d = a.diagonal_in_row(i);
    a.row(i).iter().copied().enumerate().filter(move |(k, _)| *k != d)
}

fn diag(a: &DenseTensor, i: usize) -> f64 {
    a.row(i)[a.diagonal_in_row(i)]
}

fn row_sum(a: &DenseTensor, i: usize) -> f64 {
    a.row(i).iter().fold(0.0, |acc, v| acc + v)
}

fn offdiag_abs_sum(a: &DenseTensor, i: usize) -> f64 {
    off_entries(a, i).fold(0.0, |acc, (_, v)| acc + v.abs())
}

fn row_width(a: &DenseTensor) -> f64 {
    a.row_len() as f64
}

/// All off-diagonal entries `<= eps`.
pub fn is_z_tensor(a: &DenseTensor, tol: Tolerance) -> bool {
    first_z_violation(a, tol).is_none()
}

fn first_z_violation(a: &DenseTensor, tol: Tolerance) -> Option<Violation> {
    (0..a.dim()).find_map(|i| {
        off_entries(a, i).find(|&(_, v)| v > tol.eps).map(|(k, v)| Violation {
            check: "Z".into(),
            row: i + 1,
            index: one_based_tuple(a, i, k),
            detail: format!("off-diagonal entry {v} is positive"),
        })
    })
}

fn dominance_row(a: &DenseTensor, i: usize, strict: bool, tol: Tolerance) -> bool {
    tol.cmp(strict, diag(a, i), offdiag_abs_sum(a, i))
}

/// `a_{i...i} > (>=) sum of |off-diagonal entries of row i|` for every row.
pub fn diagonal_dominance(a: &DenseTensor, strict: bool, tol: Tolerance) -> bool {
    (0..a.dim()).all(|i| dominance_row(a, i, strict, tol))
}

/// `beta_i(B) = max{0, b_{i j2..jm} : (j2..jm) != (i..i)}` for zero-based row `i`.
pub fn beta_quantity(b: &DenseTensor, i: usize) -> Result<f64> {
    if i >= b.dim() {
        return Err(Error::IndexOutOfRange { index: i + 1, dim: b.dim() });
    }
    Ok(off_entries(b, i).fold(0.0f64, |acc, (_, v)| acc.max(v)))
}

/// Row verdict from the definition: average > 0 and average > every off entry.
/// Returns the offset of the first offending entry (the diagonal when the
/// average itself fails).
fn definition_row(b: &DenseTensor, i: usize, strict: bool, tol: Tolerance) -> Option<usize> {
    let avg = row_sum(b, i) / row_width(b);
    if !tol.cmp(strict, avg, 0.0) {
        return Some(b.diagonal_in_row(i));
    }
    off_entries(b, i).find(|&(_, v)| !tol.cmp(strict, avg, v)).map(|(k, _)| k)
}

/// Row verdict from `sum > (>=) n^(m-1) * beta_i`, plus the signed margin.
fn beta_row(b: &DenseTensor, i: usize, strict: bool, tol: Tolerance) -> (bool, f64) {
    let w = row_width(b);
    let beta = off_entries(b, i).fold(0.0f64, |acc, (_, v)| acc.max(v));
    let sum = row_sum(b, i);
    let margin = sum - w * beta;
    let ok = if strict { margin > w * tol.eps } else { margin >= -w * tol.eps };
    (ok, margin)
}

/// Checks both characterisations of one row and fails hard when they
/// disagree by more than rounding.
fn checked_row(b: &DenseTensor, i: usize, strict: bool, tol: Tolerance) -> Result<Option<usize>> {
    let def = definition_row(b, i, strict, tol);
    let (beta_ok, margin) = beta_row(b, i, strict, tol);
    if def.is_none() != beta_ok {
        let w = row_width(b);
        let scale = row_sum(b, i).abs()
            + w * beta_quantity(b, i)?
            + w * tol.eps
            + b.row(i).iter().map(|v| v.abs()).sum::<f64>();
        let slack = 8.0 * f64::EPSILON * scale;
        if (margin - if strict { w * tol.eps } else { -w * tol.eps }).abs() > slack {
            return Err(Error::InternalDisagreement(format!(
                "row {}: definition form says {}, beta form says {} (margin {margin:e})",
                i + 1,
                def.is_none(),
                beta_ok
            )));
        }
    }
    Ok(def)
}

/// B / B0 classification with the first violation of the B conditions.
pub fn b_classify(b: &DenseTensor, tol: Tolerance) -> Result<BVerdict> {
    let mut strict_fail = None;
    let mut weak_ok = true;
    for i in 0..b.dim() {
        if let Some(k) = checked_row(b, i, true, tol)? {
            if strict_fail.is_none() {
                strict_fail = Some((i, k));
            }
        }
        if checked_row(b, i, false, tol)?.is_some() {
            weak_ok = false;
        }
    }
    let class = match (strict_fail, weak_ok) {
        (None, true) => BClass::B,
        (None, false) => {
            return Err(Error::InternalDisagreement(
                "tensor satisfies the B conditions but not the B0 conditions".into(),
            ))
        }
        (Some(_), true) => BClass::B0NotB,
        (Some(_), false) => BClass::Neither,
    };
    let violation = strict_fail.map(|(i, k)| {
        let avg = row_sum(b, i) / row_width(b);
        let detail = if k == b.diagonal_in_row(i) {
            format!("row average {avg} is not positive")
        } else {
            format!("row average {avg} does not exceed entry {}", b.row(i)[k])
        };
        Violation { check: "B".into(), row: i + 1, index: one_based_tuple(b, i, k), detail }
    });
    Ok(BVerdict { class, violation })
}

/// First entry-level necessary condition violated in row `i`, if any.
fn entry_row(b: &DenseTensor, i: usize, strict: bool, tol: Tolerance) -> Option<(usize, String)> {
    let d = diag(b, i);
    let dk = b.diagonal_in_row(i);
    let beta = off_entries(b, i).fold(0.0f64, |acc, (_, v)| acc.max(v));
    if !tol.cmp(strict, d, beta) {
        let k = off_entries(b, i).find(|&(_, v)| v == beta).map_or(dk, |(k, _)| k);
        return Some((k, format!("diagonal {d} does not dominate max(0, off entries) = {beta}")));
    }
    let neg: f64 = off_entries(b, i).filter(|(_, v)| *v < 0.0).fold(0.0, |acc, (_, v)| acc - v);
    if !tol.cmp(strict, d, neg) {
        return Some((dk, format!("diagonal {d} does not dominate negative-part sum {neg}")));
    }
    off_entries(b, i)
        .find(|&(_, v)| !tol.cmp(strict, d, v.abs()))
        .map(|(k, v)| (k, format!("diagonal {d} does not dominate |{v}|")))
}

/// Necessary entry conditions of B (mode `B`) or B0 (mode `B0`) tensors.
pub fn entry_necessary_conditions(b: &DenseTensor, mode: BMode, tol: Tolerance) -> bool {
    let strict = mode == BMode::B;
    (0..b.dim()).all(|i| entry_row(b, i, strict, tol).is_none())
}

/// Upper bounds on the operator norms of `T_A` and `F_A`.
pub fn row_norm_bound(a: &DenseTensor) -> NormBounds {
    let t_bound = (0..a.dim())
        .map(|i| a.row(i).iter().fold(0.0, |acc, v| acc + v.abs()))
        .fold(0.0, f64::max);
    let f_bound = a.order().is_multiple_of(2).then(|| t_bound.powf(1.0 / (a.order() - 1) as f64));
    NormBounds { t_bound, f_bound }
}

/// Runs every structural check.
pub fn classify(a: &DenseTensor, tol: Tolerance) -> Result<ClassificationReport> {
    let w = row_width(a);
    let per_row: Vec<RowDiagnostics> = (0..a.dim())
        .map(|i| {
            let s = row_sum(a, i);
            Ok(RowDiagnostics {
                i: i + 1,
                row_sum: s,
                beta: beta_quantity(a, i)?,
                threshold: s / w,
                offdiag_abs_sum: offdiag_abs_sum(a, i),
            })
        })
        .collect::<Result<_>>()?;

    let mut failures = Vec::new();
    let z_violation = first_z_violation(a, tol);
    let is_z = z_violation.is_none();
    failures.extend(z_violation);

    let b = b_classify(a, tol)?;
    failures.extend(b.violation.clone());
    if b.class == BClass::Neither {
        for i in 0..a.dim() {
            if let Some(k) = checked_row(a, i, false, tol)? {
                failures.push(Violation {
                    check: "B0".into(),
                    row: i + 1,
                    index: one_based_tuple(a, i, k),
                    detail: "row violates the B0 conditions".into(),
                });
                break;
            }
        }
    }

    let mut strict_dd = true;
    let mut weak_dd = true;
    for (i, row) in per_row.iter().enumerate() {
        let diag_tuple = vec![i + 1; a.order()];
        if !dominance_row(a, i, true, tol) {
            if strict_dd {
                failures.push(Violation {
                    check: "strict_diag_dominance".into(),
                    row: i + 1,
                    index: diag_tuple.clone(),
                    detail: format!(
                        "diagonal {} does not exceed off-diagonal absolute sum {}",
                        diag(a, i),
                        row.offdiag_abs_sum
                    ),
                });
            }
            strict_dd = false;
        }
        if !dominance_row(a, i, false, tol) {
            if weak_dd {
                failures.push(Violation {
                    check: "diag_dominance".into(),
                    row: i + 1,
                    index: diag_tuple,
                    detail: format!(
                        "diagonal {} is below off-diagonal absolute sum {}",
                        diag(a, i),
                        row.offdiag_abs_sum
                    ),
                });
            }
            weak_dd = false;
        }
    }

    let mut entry_b = true;
    let mut entry_b0 = true;
    for i in 0..a.dim() {
        if let Some((k, detail)) = entry_row(a, i, true, tol) {
            if entry_b {
                failures.push(Violation {
                    check: "entry_conditions_B".into(),
                    row: i + 1,
                    index: one_based_tuple(a, i, k),
                    detail,
                });
            }
            entry_b = false;
        }
        if let Some((k, detail)) = entry_row(a, i, false, tol) {
            if entry_b0 {
                failures.push(Violation {
                    check: "entry_conditions_B0".into(),
                    row: i + 1,
                    index: one_based_tuple(a, i, k),
                    detail,
                });
            }
            entry_b0 = false;
        }
    }

    let is_b = b.class == BClass::B;
    let is_b0 = b.class.rank() >= 1;
    let z_dominance_consistent =
        (is_z && is_b0) == (is_z && weak_dd) && (is_z && is_b) == (is_z && strict_dd);

    let report = ClassificationReport {
        is_z,
        is_b,
        is_b0,
        strictly_diag_dominated: strict_dd,
        diag_dominated: weak_dd,
        entry_conditions_b: entry_b,
        entry_conditions_b0: entry_b0,
        z_dominance_consistent,
        per_row,
        failures,
    };
    check_report(&report, tol)?;
    Ok(report)
}

fn check_report(r: &ClassificationReport, tol: Tolerance) -> Result<()> {
    let mut broken = Vec::new();
    if r.is_b && !r.is_b0 {
        broken.push("is_B without is_B0");
    }
    if r.strictly_diag_dominated && !r.diag_dominated {
        broken.push("strict dominance without weak dominance");
    }
    if r.is_b && !r.entry_conditions_b {
        broken.push("is_B without the B entry conditions");
    }
    if r.is_b0 && !r.entry_conditions_b0 {
        broken.push("is_B0 without the B0 entry conditions");
    }
    // The Z/dominance equivalence is stated for exact comparisons; with a
    // positive eps the two sides use different scales and only the flag is kept.
    if tol.eps == 0.0 && !r.z_dominance_consistent {
        broken.push("Z tensor whose B/B0 verdict disagrees with diagonal dominance");
    }
    if broken.is_empty() {
        Ok(())
    } else {
        Err(Error::InternalDisagreement(broken.join("; ")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> DenseTensor {
        DenseTensor::from_coords(
            3,
            2,
            vec![(vec![0, 0, 0], 4.0), (vec![0, 1, 1], -1.0), (vec![1, 1, 1], 2.0)],
        )
        .unwrap()
    }

    fn upper() -> DenseTensor {
        DenseTensor::from_dense(2, 2, vec![1.0, 2.0, 0.0, 1.0]).unwrap()
    }

    const EXACT: Tolerance = Tolerance::EXACT;

    #[test]
    fn z_examples() {
        assert!(is_z_tensor(&DenseTensor::identity(4, 3).unwrap(), EXACT));
        assert!(is_z_tensor(&small(), EXACT));
        assert!(!is_z_tensor(&upper(), EXACT));
        let v = first_z_violation(&upper(), EXACT).unwrap();
        assert_eq!((v.row, v.index.clone()), (1, vec![1, 2]));
    }

    #[test]
    fn dominance_examples() {
        let id = DenseTensor::identity(3, 2).unwrap();
        assert!(diagonal_dominance(&id, true, EXACT));
        let z = DenseTensor::zeros(3, 2).unwrap();
        assert!(diagonal_dominance(&z, false, EXACT));
        assert!(!diagonal_dominance(&z, true, EXACT));
        let t = DenseTensor::from_coords(
            3,
            2,
            vec![
                (vec![0, 0, 0], 3.0),
                (vec![0, 0, 1], -1.0),
                (vec![0, 1, 0], -1.0),
                (vec![0, 1, 1], -1.0),
                (vec![1, 1, 1], 1.0),
            ],
        )
        .unwrap();
        assert!(diagonal_dominance(&t, false, EXACT));
        assert!(!diagonal_dominance(&t, true, EXACT));
    }

    #[test]
    fn beta_examples() {
        assert_eq!(beta_quantity(&DenseTensor::identity(3, 2).unwrap(), 0).unwrap(), 0.0);
        assert_eq!(beta_quantity(&small(), 0).unwrap(), 0.0);
        assert_eq!(beta_quantity(&upper(), 0).unwrap(), 2.0);
        assert_eq!(
            beta_quantity(&upper(), 2).unwrap_err(),
            Error::IndexOutOfRange { index: 3, dim: 2 }
        );
    }

    #[test]
    fn b_examples() {
        assert_eq!(b_classify(&DenseTensor::identity(3, 2).unwrap(), EXACT).unwrap().class, BClass::B);
        assert_eq!(
            b_classify(&DenseTensor::zeros(3, 2).unwrap(), EXACT).unwrap().class,
            BClass::B0NotB
        );
        assert_eq!(b_classify(&small(), EXACT).unwrap().class, BClass::B);
        let v = b_classify(&upper(), EXACT).unwrap();
        assert_eq!(v.class, BClass::Neither);
        assert_eq!(v.violation.unwrap().index, vec![1, 2]);
    }

    #[test]
    fn entry_condition_examples() {
        let id = DenseTensor::identity(3, 2).unwrap();
        assert!(entry_necessary_conditions(&id, BMode::B, EXACT));
        let z = DenseTensor::zeros(3, 2).unwrap();
        assert!(!entry_necessary_conditions(&z, BMode::B, EXACT));
        assert!(entry_necessary_conditions(&z, BMode::B0, EXACT));
        assert!(entry_necessary_conditions(&small(), BMode::B, EXACT));
    }

    #[test]
    fn norm_bound_examples() {
        let b = row_norm_bound(&DenseTensor::identity(4, 3).unwrap());
        assert_eq!((b.t_bound, b.f_bound), (1.0, Some(1.0)));
        let b = row_norm_bound(&DenseTensor::zeros(4, 2).unwrap());
        assert_eq!((b.t_bound, b.f_bound), (0.0, Some(0.0)));
        let b = row_norm_bound(&small());
        assert_eq!((b.t_bound, b.f_bound), (5.0, None));
    }

    #[test]
    fn classify_examples() {
        let r = classify(&DenseTensor::identity(3, 2).unwrap(), EXACT).unwrap();
        assert!(r.is_z && r.is_b && r.is_b0 && r.strictly_diag_dominated && r.diag_dominated);
        assert!(r.failures.is_empty());

        let r = classify(&DenseTensor::zeros(3, 2).unwrap(), EXACT).unwrap();
        assert!(r.is_z && !r.is_b && r.is_b0 && r.diag_dominated && !r.strictly_diag_dominated);

        let r = classify(&upper(), EXACT).unwrap();
        assert!(!r.is_z && !r.is_b);
        assert_eq!(r.per_row[0].threshold, 1.5);
        assert_eq!(r.per_row[0].beta, 2.0);
        assert!(r.failures.iter().any(|f| f.check == "B" && f.index == vec![1, 2]));
    }

    #[test]
    fn tolerance_validation() {
        assert!(Tolerance::new(-1.0).is_err());
        assert!(Tolerance::new(f64::NAN).is_err());
        let loose = Tolerance::new(0.1).unwrap();
        // 0.05 >= 0 - eps holds, 0.05 > 0 + eps does not
        let t = DenseTensor::from_dense(2, 1, vec![0.05]).unwrap();
        assert!(diagonal_dominance(&t, false, loose));
        assert!(!diagonal_dominance(&t, true, loose));
    }

    #[test]
    fn report_json_field_names() {
        let r = classify(&DenseTensor::identity(2, 2).unwrap(), EXACT).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        for key in [
            "is_Z",
            "is_B",
            "is_B0",
            "strictly_diag_dominated",
            "diag_dominated",
            "entry_conditions_B",
            "entry_conditions_B0",
            "per_row",
            "failures",
        ] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert!(v["per_row"][0].get("offdiag_abs_sum").is_some());
    }
}
