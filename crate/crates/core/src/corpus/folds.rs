use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};

/// Assignment of every example of a dataset to one of `n_folds` folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    n_folds: usize,
    assignment: Vec<usize>,
    seed: u64,
}

impl FoldPlan {
    pub fn n_folds(&self) -> usize {
        self.n_folds
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Indices of the examples held out in `fold`, ascending.
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] == fold)
            .collect()
    }

    /// Indices of the examples used for training when `fold` is held out,
    /// ascending (i.e. in dataset order).
    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] != fold)
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.n_folds];
        for &fold in &self.assignment {
            sizes[fold] += 1;
        }
        sizes
    }
}

/// Seeded Fisher–Yates shuffle of the example indices followed by
/// round-robin assignment, so fold sizes differ by at most one.
pub fn split_folds(dataset: &Dataset, n_folds: usize, seed: u64) -> Result<FoldPlan> {
    plan_for_len(dataset.len(), n_folds, seed)
}

pub(crate) fn plan_for_len(len: usize, n_folds: usize, seed: u64) -> Result<FoldPlan> {
    if len == 0 {
        return Err(Error::Argument("cannot split an empty dataset".into()));
    }
    if n_folds < 2 || n_folds > len {
        return Err(Error::Argument(format!(
            "n_folds must be in [2, {len}], got {n_folds}"
        )));
    }
    let mut order: Vec<usize> = (0..len).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let mut assignment = vec![0; len];
    for (position, &index) in order.iter().enumerate() {
        assignment[index] = position % n_folds;
    }
    Ok(FoldPlan {
        n_folds,
        assignment,
        seed,
    })
}
