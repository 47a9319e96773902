//! Support-vector machines with the polynomial kernel `(x·y + 1)^d`,
//! extended to many labels by pairwise voting.

mod kernel;
mod pairwise;
mod smo;

pub use kernel::polynomial_kernel;
pub use pairwise::{Pair, PairClassifier, PairwiseModel, PairwisePrediction};
pub use smo::{sgn, solve_dual, BinarySvmModel, DualSolution, SupportVector, SvmParams};
