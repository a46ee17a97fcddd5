//! Seeded random tensors of a prescribed class.
//!
//! Randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64`),
//! so a seed gives the same tensor on every platform. Entries are multiples
//! of `2^(floor(log2 scale) - 10)`; with that grid every row sum the checks
//! compute is exact, and class membership does not hinge on rounding.
//! Membership is constructed directly and re-checked before returning.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structure::{b_classify, diagonal_dominance, is_z_tensor, BClass, Tolerance};
use crate::tensor::DenseTensor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GenClass {
    B,
    B0,
    #[serde(rename = "Z_diag_dominated")]
    ZDiagDominated,
    #[serde(rename = "symmetric")]
    Symmetric,
    #[serde(rename = "general")]
    General,
}

impl GenClass {
    pub const ALL: [GenClass; 5] =
        [GenClass::B, GenClass::B0, GenClass::ZDiagDominated, GenClass::Symmetric, GenClass::General];

    pub fn as_str(self) -> &'static str {
        match self {
            GenClass::B => "B",
            GenClass::B0 => "B0",
            GenClass::ZDiagDominated => "Z_diag_dominated",
            GenClass::Symmetric => "symmetric",
            GenClass::General => "general",
        }
    }

    pub fn parse(s: &str) -> Option<GenClass> {
        GenClass::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

fn default_scale() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub m: usize,
    pub n: usize,
    pub class: GenClass,
    pub seed: u64,
    #[serde(default = "default_scale")]
    pub scale: f64,
}

impl GenSpec {
    pub fn new(m: usize, n: usize, class: GenClass, seed: u64) -> Self {
        GenSpec { m, n, class, seed, scale: 1.0 }
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    /// File name used for corpus output.
    pub fn file_name(&self) -> String {
        format!("{}_{}_{}_{}.json", self.class.as_str(), self.m, self.n, self.seed)
    }
}

struct Sampler {
    rng: ChaCha8Rng,
    scale: f64,
    step: f64,
}

impl Sampler {
    fn new(spec: &GenSpec) -> Result<Sampler> {
        if !(spec.scale.is_finite() && spec.scale >= 0.0) {
            return Err(Error::InvalidConfig(format!("scale must be finite and >= 0, got {}", spec.scale)));
        }
        let step = if spec.scale > 0.0 { (spec.scale.log2().floor() - 10.0).exp2() } else { 0.0 };
        Ok(Sampler { rng: ChaCha8Rng::seed_from_u64(spec.seed), scale: spec.scale, step })
    }

    /// Uniform on `[-scale, scale]`, rounded to the step grid.
    fn value(&mut self) -> f64 {
        let u: f64 = self.rng.random_range(-1.0..=1.0);
        if self.step == 0.0 {
            return 0.0;
        }
        (u * self.scale / self.step).round() * self.step
    }

    /// Positive slack in `[step, scale]`, or zero when the scale is zero.
    fn slack(&mut self) -> f64 {
        let v = self.value().abs();
        if self.step == 0.0 {
            0.0
        } else {
            v.max(self.step)
        }
    }

    fn coin(&mut self) -> bool {
        self.rng.random_bool(0.5)
    }
}

fn check(ok: bool, what: &str, spec: &GenSpec) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InternalDisagreement(format!("generated tensor {} fails {what}", spec.file_name())))
    }
}

fn off_diagonal_fill(spec: &GenSpec, s: &mut Sampler, mut f: impl FnMut(&mut Sampler) -> f64) -> Result<DenseTensor> {
    let mut a = DenseTensor::zeros(spec.m, spec.n)?;
    let diag: Vec<usize> = (0..spec.n).map(|i| a.diagonal_flat(i)).collect();
    let mut data = a.data().to_vec();
    for (k, slot) in data.iter_mut().enumerate() {
        if !diag.contains(&k) {
            *slot = f(s);
        }
    }
    a = DenseTensor::from_dense(spec.m, spec.n, data)?;
    Ok(a)
}

fn set_diagonal(a: &DenseTensor, d: &[f64]) -> Result<DenseTensor> {
    let mut data = a.data().to_vec();
    for (i, v) in d.iter().enumerate() {
        data[a.diagonal_flat(i)] = *v;
    }
    DenseTensor::from_dense(a.order(), a.dim(), data)
}

/// Row slacks: positive everywhere for strict classes; for boundary classes
/// the first row is tight and every other row is tight with probability 1/2.
fn slacks(s: &mut Sampler, n: usize, strict: bool) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let tight = !strict && (i == 0 || s.coin());
            let v = s.slack();
            if tight {
                0.0
            } else {
                v
            }
        })
        .collect()
}

/// B tensor (`class = B`) or B0 tensor on the boundary (`class = B0`).
///
/// Off-diagonal entries are uniform; the diagonal of row `i` is then set to
/// `N M_i - S_i + slack_i` with `N = n^(m-1)`, `M_i` the largest of zero and
/// the row's off-diagonal entries and `S_i` their sum, so the row sum is
/// `N M_i + slack_i`.
pub fn gen_b_tensor(spec: &GenSpec) -> Result<DenseTensor> {
    let strict = match spec.class {
        GenClass::B => true,
        GenClass::B0 => false,
        other => return Err(Error::InvalidConfig(format!("gen_b_tensor needs class B or B0, got {}", other.as_str()))),
    };
    let mut s = Sampler::new(spec)?;
    let a = off_diagonal_fill(spec, &mut s, Sampler::value)?;
    let slack = slacks(&mut s, spec.n, strict);
    let width = a.row_len() as f64;
    let d: Vec<f64> = (0..spec.n)
        .map(|i| {
            let dk = a.diagonal_in_row(i);
            let off = a.row(i).iter().enumerate().filter(|(k, _)| *k != dk).map(|(_, v)| *v);
            let (max, sum) = off.fold((0.0f64, 0.0), |(m, s), v| (m.max(v), s + v));
            width * max - sum + slack[i]
        })
        .collect();
    let a = set_diagonal(&a, &d)?;
    let class = b_classify(&a, Tolerance::EXACT)?.class;
    if strict {
        check(class == BClass::B, "the B check", spec)?;
    } else {
        check(class != BClass::Neither, "the B0 check", spec)?;
    }
    Ok(a)
}

/// Z tensor whose diagonal is the absolute off-diagonal row sum plus a
/// slack, positive when `strict`; tight rows occur otherwise.
pub fn gen_z_diag_dominated(spec: &GenSpec, strict: bool) -> Result<DenseTensor> {
    let mut s = Sampler::new(spec)?;
    let a = off_diagonal_fill(spec, &mut s, |s| -s.value().abs())?;
    finish_z(spec, &mut s, a, strict)
}

fn finish_z(spec: &GenSpec, s: &mut Sampler, a: DenseTensor, strict: bool) -> Result<DenseTensor> {
    let slack = slacks(s, spec.n, strict);
    let d: Vec<f64> = (0..spec.n)
        .map(|i| {
            let dk = a.diagonal_in_row(i);
            let abs: f64 = a.row(i).iter().enumerate().filter(|(k, _)| *k != dk).map(|(_, v)| v.abs()).sum();
            abs + slack[i]
        })
        .collect();
    let a = set_diagonal(&a, &d)?;
    check(is_z_tensor(&a, Tolerance::EXACT), "the Z check", spec)?;
    check(diagonal_dominance(&a, false, Tolerance::EXACT), "weak dominance", spec)?;
    if strict {
        check(diagonal_dominance(&a, true, Tolerance::EXACT), "strict dominance", spec)?;
    }
    let class = b_classify(&a, Tolerance::EXACT)?.class;
    let expected = diagonal_dominance(&a, true, Tolerance::EXACT);
    check((class == BClass::B) == expected, "the B check", spec)?;
    check(class != BClass::Neither, "the B0 check", spec)?;
    Ok(a)
}

/// Fills every permutation orbit with one sample. The lexicographically
/// first tuple of an orbit is its sorted form, so samples are drawn in flat
/// order at the orbit representatives.
fn symmetric_fill(spec: &GenSpec, s: &mut Sampler, mut f: impl FnMut(&mut Sampler) -> f64) -> Result<DenseTensor> {
    let a = DenseTensor::zeros(spec.m, spec.n)?;
    let mut data = vec![0.0; a.len()];
    for k in 0..a.len() {
        let idx = a.unravel(k);
        let mut sorted = idx.clone();
        sorted.sort_unstable();
        data[k] = if sorted == idx { f(s) } else { data[a.flat(&sorted)] };
    }
    DenseTensor::from_dense(spec.m, spec.n, data)
}

/// Symmetric tensor with uniform orbit values.
pub fn gen_symmetric(spec: &GenSpec) -> Result<DenseTensor> {
    let mut s = Sampler::new(spec)?;
    let a = symmetric_fill(spec, &mut s, Sampler::value)?;
    check(a.is_symmetric(0.0), "the symmetry check", spec)?;
    Ok(a)
}

/// Symmetric Z tensor with diagonal dominance (strict when `strict`).
/// For even order and strict dominance the result is positive definite.
pub fn gen_symmetric_z_dominated(spec: &GenSpec, strict: bool) -> Result<DenseTensor> {
    let mut s = Sampler::new(spec)?;
    let a = symmetric_fill(spec, &mut s, |s| -s.value().abs())?;
    let a = finish_z(spec, &mut s, a, strict)?;
    check(a.is_symmetric(0.0), "the symmetry check", spec)?;
    Ok(a)
}

/// Independent uniform entries.
pub fn gen_general(spec: &GenSpec) -> Result<DenseTensor> {
    let mut s = Sampler::new(spec)?;
    let a = DenseTensor::zeros(spec.m, spec.n)?;
    let data = (0..a.len()).map(|_| s.value()).collect();
    DenseTensor::from_dense(spec.m, spec.n, data)
}

/// Dispatches on `spec.class`; `Z_diag_dominated` is generated strict.
pub fn generate(spec: &GenSpec) -> Result<DenseTensor> {
    match spec.class {
        GenClass::B | GenClass::B0 => gen_b_tensor(spec),
        GenClass::ZDiagDominated => gen_z_diag_dominated(spec, true),
        GenClass::Symmetric => gen_symmetric(spec),
        GenClass::General => gen_general(spec),
    }
}
