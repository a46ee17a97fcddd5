//! Seeded multistart pattern search on the infinity-norm unit sphere.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::lattice::Best;
use crate::tensor::norm_inf;

#[derive(Debug, Clone, Copy)]
pub(crate) struct LocalConfig {
    pub starts: usize,
    pub iters: usize,
    pub seed: u64,
}

const INITIAL_STEP: f64 = 0.25;
const MIN_STEP: f64 = 1e-12;

/// Random point with `|x|_inf = 1`; start `s` uses its own ChaCha8 stream.
pub(crate) fn sphere_start(n: usize, seed: u64, s: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(s as u64);
    let mut x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let j = rng.random_range(0..n);
    x[j] = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let r = norm_inf(&x);
    x.iter_mut().for_each(|v| *v /= r);
    x
}

/// Projected coordinate pattern search from `x`. Each iteration tries every
/// coordinate move `±step`, clamps to the cube, rescales onto the sphere and
/// keeps the best improving candidate; the step halves when nothing improves.
pub(crate) fn descend<F>(mut x: Vec<f64>, iters: usize, f: &F) -> (Best, u64)
where
    F: Fn(&[f64]) -> f64,
{
    let n = x.len();
    let mut fx = f(&x);
    let mut evals = 1u64;
    let mut step = INITIAL_STEP;
    let mut y = vec![0.0; n];
    for _ in 0..iters {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for c in 0..n {
            for dir in [-1.0, 1.0] {
                y.copy_from_slice(&x);
                y[c] = (y[c] + dir * step).clamp(-1.0, 1.0);
                let r = norm_inf(&y);
                if r == 0.0 {
                    continue;
                }
                y.iter_mut().for_each(|v| *v /= r);
                let fy = f(&y);
                evals += 1;
                if fy < best.as_ref().map_or(fx, |b| b.0) {
                    best = Some((fy, y.clone()));
                }
            }
        }
        match best {
            Some((fy, y)) => {
                fx = fy;
                x = y;
            }
            None => {
                step *= 0.5;
                if step < MIN_STEP {
                    break;
                }
            }
        }
    }
    (Best { value: fx, x }, evals)
}

/// Runs every start in parallel and reduces in start order, so the result
/// does not depend on scheduling.
pub(crate) fn multistart<F>(n: usize, cfg: LocalConfig, f: &F) -> (Best, Vec<Best>, u64)
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let runs: Vec<(Best, u64)> = (0..cfg.starts)
        .into_par_iter()
        .map(|s| descend(sphere_start(n, cfg.seed, s), cfg.iters, f))
        .collect();
    let evals = runs.iter().map(|r| r.1).sum();
    let finals: Vec<Best> = runs.into_iter().map(|r| r.0).collect();
    let mut best = None;
    for b in &finals {
        Best::offer(&mut best, b.value, &b.x);
    }
    (best.expect("at least one start"), finals, evals)
}
