//! Structured tensor analysis: membership tests for the Z, B, B0, P and P0
//! classes and for diagonal dominance, the alpha quantities of the
//! positively homogeneous operators `T_A` and `F_A`, and H-/Z-eigenpairs of
//! small tensors.
//!
//! ```
//! use tenstruct::{p_classify, DenseTensor, PClass, SearchConfig};
//!
//! let a = DenseTensor::identity(3, 2).unwrap();
//! let verdict = p_classify(&a, &SearchConfig::default()).unwrap();
//! assert_eq!(verdict.class, PClass::NotP0);
//! assert_eq!(verdict.witness.unwrap().as_slice(), &[-1.0, -1.0]);
//! ```

pub mod error;
pub mod generators;
pub mod io;
pub mod p_analysis;
pub mod spectral;
pub mod structure;
pub mod tensor;

pub use error::{Error, Result};
pub use generators::{GenClass, GenSpec};
pub use io::{parse_tensor, tensor_to_json, TensorDocument};
pub use p_analysis::{
    alpha_estimate, f_operator, p_classify, scaling_certificate, t_operator, AlphaEstimate, Operator, PClass,
    PVerdict, ScalingCertificate, SearchConfig, SearchMethod,
};
pub use spectral::{
    definiteness_check, extreme_z_values, h_eigenpairs, z_eigenpairs, Definiteness, DefinitenessVerdict,
    EigenConfig, EigenKind, EigenPair, EigenSet, ExtremeZ,
};
pub use structure::{
    b_classify, classify, row_norm_bound, BClass, BMode, BVerdict, ClassificationReport, NormBounds, Tolerance,
};
pub use tensor::{DenseTensor, IndexSet, Special, Summation, Vector};

/// Crate version, embedded in CLI reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
