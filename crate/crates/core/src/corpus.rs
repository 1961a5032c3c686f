//! Seeded random filtered modules with `N = 0` and a diagonalizable φ whose
//! eigenvalues have distinct valuations.

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{ppow, q, Q};
use crate::error::Result;
use crate::filtered::FilteredModule;
use crate::linalg::QMat;

#[derive(Clone, Copy, Debug)]
pub struct CorpusSpec {
    pub p: u64,
    pub max_dim: usize,
    /// Inclusive range for eigenvalue valuations.
    pub valuations: (i64, i64),
    /// Inclusive range for Hodge weights.
    pub weights: (i64, i64),
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec { p: 2, max_dim: 3, valuations: (-2, 3), weights: (-2, 3) }
    }
}

fn unit(rng: &mut ChaCha8Rng, p: u64) -> Q {
    let choices: Vec<i64> = (-5i64..=5).filter(|x| *x != 0 && x.rem_euclid(p as i64) != 0).collect();
    q(*choices.choose(rng).unwrap())
}

fn invertible(rng: &mut ChaCha8Rng, d: usize) -> QMat {
    loop {
        let s = QMat::from_fn(d, d, |_, _| q(rng.gen_range(-2..=2)));
        if !s.det().is_zero() {
            return s;
        }
    }
}

/// One module. Half of the draws tie the eigenvalue valuations to the Hodge
/// weights so that `t_N = t_H`, which makes admissible modules common.
pub fn random_module(spec: &CorpusSpec, rng: &mut ChaCha8Rng) -> Result<FilteredModule> {
    let d = rng.gen_range(1..=spec.max_dim);
    let (w0, w1) = spec.weights;
    let balanced = rng.gen_bool(0.5);
    let mut weights: Vec<i64>;
    let vals: Vec<i64>;
    if balanced {
        let mut pool: Vec<i64> = (w0.max(spec.valuations.0)..=w1.min(spec.valuations.1)).collect();
        pool.shuffle(rng);
        weights = pool[..d].to_vec();
        let mut v = weights.clone();
        v.shuffle(rng);
        vals = v;
    } else {
        weights = (0..d).map(|_| rng.gen_range(w0..=w1)).collect();
        let mut pool: Vec<i64> = (spec.valuations.0..=spec.valuations.1).collect();
        pool.shuffle(rng);
        vals = pool[..d].to_vec();
    }
    weights.sort_unstable_by(|a, b| b.cmp(a));
    let lambdas: Vec<Q> = vals.iter().map(|&v| ppow(spec.p, v) * unit(rng, spec.p)).collect();
    let s = invertible(rng, d);
    let diag = QMat::from_fn(d, d, |i, j| if i == j { lambdas[i].clone() } else { q(0) });
    let phi = s.mul(&diag).mul(&s.inverse().unwrap());
    let b = invertible(rng, d);
    let mut distinct = weights.clone();
    distinct.dedup();
    let filtration = distinct
        .iter()
        .rev()
        .map(|&w| {
            let idx: Vec<usize> = (0..d).filter(|&j| weights[j] >= w).collect();
            (w, b.select_cols(&idx))
        })
        .collect();
    FilteredModule::new(spec.p, phi, QMat::zeros(d, d), filtration)
}

pub fn random_corpus(spec: &CorpusSpec, count: usize, seed: u64) -> Result<Vec<FilteredModule>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_module(spec, &mut rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::vp;

    #[test]
    fn corpus_is_deterministic_and_valid() {
        let a = random_corpus(&CorpusSpec::default(), 12, 3).unwrap();
        let b = random_corpus(&CorpusSpec::default(), 12, 3).unwrap();
        assert_eq!(a, b);
        for m in &a {
            assert!(m.validate().is_empty());
            assert!(m.dim() <= 3);
            let mut vs: Vec<i64> = m
                .phi
                .char_poly()
                .rational_roots()
                .iter()
                .map(|r| vp(2, r).unwrap())
                .collect();
            vs.sort();
            vs.dedup();
            assert_eq!(vs.len(), m.dim());
        }
    }
}
