//! Soft-margin binary SVM trained in the dual.
//!
//! Maximizes
//!
//! ```text
//! L(α) = Σ α_i − ½ Σ_ij α_i α_j y_i y_j K(x_i, x_j)
//! s.t. 0 ≤ α_i ≤ C,  Σ α_i y_i = 0
//! ```
//!
//! by sequential minimal optimization: each step picks a maximal-violating
//! pair with second-order working-set selection and solves the two-variable
//! subproblem analytically. The solver works on the equivalent minimization
//! of `f(α) = ½ αᵀQα − eᵀα`, `Q_ij = y_i y_j K_ij`, and maintains its
//! gradient `G = Qα − e`.
//!
//! The bias is
//!
//! ```text
//! b = −(max_{i: y_i=−1} b_i + min_{i: y_i=+1} b_i) / 2,   b_i = Σ_j α_j y_j K(x_j, x_i)
//! ```
//!
//! with both extrema over all training examples.

use serde::{Deserialize, Serialize};

use super::kernel::{polynomial_kernel, KernelCache};
use crate::error::{Error, Result};
use crate::features::FeatureVector;

/// Curvature floor for non-positive-definite two-variable subproblems.
const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    /// Box constant.
    pub c: f64,
    /// Polynomial kernel degree.
    pub degree: u32,
    /// Maximal KKT violation at termination.
    pub tol: f64,
    /// Iteration cap as a multiple of the number of training examples.
    pub max_iter_factor: usize,
    /// Kernel row cache budget in bytes.
    pub cache_bytes: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            degree: 1,
            tol: 1e-3,
            max_iter_factor: 100,
            cache_bytes: 64 << 20,
        }
    }
}

impl SvmParams {
    pub fn with_degree(degree: u32) -> Self {
        Self {
            degree,
            ..Self::default()
        }
    }
}

/// Full solver output, including zero multipliers.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution {
    pub alpha: Vec<f64>,
    pub bias: f64,
    pub dual_objective: f64,
    pub iterations: usize,
    /// `max_{I_up} −y_t G_t − min_{I_low} −y_t G_t` at termination.
    pub kkt_gap: f64,
}

pub fn solve_dual(vectors: &[&FeatureVector], y: &[i8], params: &SvmParams) -> Result<DualSolution> {
    let l = vectors.len();
    if y.len() != l {
        return Err(Error::Argument("labels and vectors differ in length".into()));
    }
    if let Some(bad) = y.iter().find(|&&v| v != 1 && v != -1) {
        return Err(Error::Argument(format!("binary labels must be ±1, got {bad}")));
    }
    if !y.contains(&1) || !y.contains(&-1) {
        return Err(Error::training("binary SVM needs examples of both classes"));
    }
    if !(params.c > 0.0) {
        return Err(Error::Argument(format!("C must be positive, got {}", params.c)));
    }

    let c = params.c;
    let yf: Vec<f64> = y.iter().map(|&v| v as f64).collect();
    let mut cache = KernelCache::new(vectors, params.degree, params.cache_bytes);
    let diag = cache.diagonal().to_vec();
    let mut alpha = vec![0.0; l];
    let mut grad = vec![-1.0; l];
    let max_iter = params.max_iter_factor.saturating_mul(l).max(1);

    let in_up = |t: usize, a: &[f64]| if y[t] == 1 { a[t] < c } else { a[t] > 0.0 };
    let in_low = |t: usize, a: &[f64]| if y[t] == 1 { a[t] > 0.0 } else { a[t] < c };

    let mut iterations = 0;
    let kkt_gap = loop {
        // i: maximal violator in I_up.
        let mut g_max = f64::NEG_INFINITY;
        let mut i = usize::MAX;
        for t in 0..l {
            if in_up(t, &alpha) {
                let v = -yf[t] * grad[t];
                if v >= g_max {
                    g_max = v;
                    i = t;
                }
            }
        }
        // j: second-order choice in I_low; also track the I_low extremum.
        let mut g_max2 = f64::NEG_INFINITY;
        let mut j = usize::MAX;
        let mut best_obj = f64::INFINITY;
        let row_i = (i != usize::MAX).then(|| cache.row(i));
        for t in 0..l {
            if !in_low(t, &alpha) {
                continue;
            }
            let v = yf[t] * grad[t];
            g_max2 = g_max2.max(v);
            if let Some(row_i) = &row_i {
                let diff = g_max + v;
                if diff > 0.0 {
                    let quad = (diag[i] + diag[t] - 2.0 * row_i[t]).max(TAU);
                    let obj = -diff * diff / quad;
                    if obj <= best_obj {
                        best_obj = obj;
                        j = t;
                    }
                }
            }
        }
        let gap = g_max + g_max2;
        if gap < params.tol || j == usize::MAX {
            break gap.max(0.0);
        }
        if iterations >= max_iter {
            return Err(Error::Training {
                message: format!(
                    "SMO did not converge in {max_iter} iterations (KKT gap {gap:.3e})"
                ),
                best_dual: Some(dual_value(&alpha, &grad)),
            });
        }
        iterations += 1;

        let row_i = row_i.expect("i selected");
        let row_j = cache.row(j);
        let (old_i, old_j) = (alpha[i], alpha[j]);
        let quad = (diag[i] + diag[j] - 2.0 * row_i[j]).max(TAU);
        if y[i] != y[j] {
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..l {
            grad[t] += yf[t] * (yf[i] * row_i[t] * di + yf[j] * row_j[t] * dj);
        }
    };

    // b_i = Σ_j α_j y_j K(x_j, x_i) = y_i (G_i + 1)
    let mut max_neg = f64::NEG_INFINITY;
    let mut min_pos = f64::INFINITY;
    for t in 0..l {
        let b_t = yf[t] * (grad[t] + 1.0);
        if y[t] == 1 {
            min_pos = min_pos.min(b_t);
        } else {
            max_neg = max_neg.max(b_t);
        }
    }
    let bias = -(max_neg + min_pos) / 2.0;

    Ok(DualSolution {
        dual_objective: dual_value(&alpha, &grad),
        alpha,
        bias,
        iterations,
        kkt_gap,
    })
}

/// `L(α) = Σα − ½ αᵀQα`, using `Qα = G + e`.
fn dual_value(alpha: &[f64], grad: &[f64]) -> f64 {
    alpha
        .iter()
        .zip(grad)
        .map(|(a, g)| a - 0.5 * a * (g + 1.0))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportVector {
    pub x: FeatureVector,
    pub y: i8,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinarySvmModel {
    pub support_vectors: Vec<SupportVector>,
    pub bias: f64,
    pub degree: u32,
    pub c: f64,
    pub dual_objective: f64,
    pub iterations: usize,
    pub kkt_gap: f64,
}

impl BinarySvmModel {
    pub fn train(vectors: &[&FeatureVector], y: &[i8], params: &SvmParams) -> Result<Self> {
        let solution = solve_dual(vectors, y, params)?;
        Ok(Self::from_solution(vectors, y, &solution, params))
    }

    /// Keeps only the examples with `α_i > 0`.
    pub fn from_solution(
        vectors: &[&FeatureVector],
        y: &[i8],
        solution: &DualSolution,
        params: &SvmParams,
    ) -> Self {
        let support_vectors = solution
            .alpha
            .iter()
            .enumerate()
            .filter(|(_, &a)| a > 0.0)
            .map(|(i, &a)| SupportVector {
                x: vectors[i].clone(),
                y: y[i],
                alpha: a,
            })
            .collect();
        Self {
            support_vectors,
            bias: solution.bias,
            degree: params.degree,
            c: params.c,
            dual_objective: solution.dual_objective,
            iterations: solution.iterations,
            kkt_gap: solution.kkt_gap,
        }
    }

    /// Raw decision value and its sign (`+1` when the value is `≥ 0`).
    pub fn decide(&self, x: &FeatureVector) -> (f64, i8) {
        let raw = self
            .support_vectors
            .iter()
            .map(|sv| sv.alpha * sv.y as f64 * polynomial_kernel(&sv.x, x, self.degree))
            .sum::<f64>()
            + self.bias;
        (raw, sgn(raw))
    }
}

pub fn sgn(v: f64) -> i8 {
    if v >= 0.0 {
        1
    } else {
        -1
    }
}
