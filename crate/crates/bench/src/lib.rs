//! Fixed inputs for the criterion benchmarks in `benches/`.

use tenstruct::{generators::generate, DenseTensor, GenClass, GenSpec};

/// Seeded tensor of the given class, with the seed fixed so runs compare.
pub fn fixture(class: GenClass, m: usize, n: usize) -> DenseTensor {
    generate(&GenSpec::new(m, n, class, 42)).expect("valid generator spec")
}

/// A deterministic point with every coordinate nonzero.
pub fn point(n: usize) -> Vec<f64> {
    (0..n).map(|i| 1.0 - 1.7 * (i as f64 + 0.5) / n as f64).collect()
}
