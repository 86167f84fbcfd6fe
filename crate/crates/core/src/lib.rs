//! Independence testing for two discrete random variables through the
//! asymptotic law of the plug-in mutual information estimator.
//!
//! Under independence the second-order expansion of `MI(p̂)` around the
//! product of the marginals has a vanishing linear term, so `2n·MI(p̂)` is
//! asymptotically a weighted sum of independent `χ²₁` variables. The weights
//! are the spectrum of `H·Σ` where `H` is the Hessian of the restricted MI and
//! `Σ` the multinomial covariance of the restricted empirical vector.
//!
//! The numeric core is generic over [`Real`] (any `num_traits::Float` such as
//! `f32` or `f64`); the aliases at the crate root fix it to `f64`, which is
//! what the simulation harness and the CLI use.
//!
//! ```
//! use mitest_core::{independence_test, JointTable, PValueMethod, Statistic, TestOptions};
//!
//! let table = JointTable::from_counts(&[vec![10, 20], vec![20, 10]]).unwrap();
//! let opts = TestOptions::new(Statistic::T2, PValueMethod::ClassicalDof);
//! let result = independence_test::<f64>(&table, &opts).unwrap();
//! assert!((result.value - 100.0 / 15.0).abs() < 1e-10);
//! assert!(result.reject);
//! ```

// NaN-rejecting `!(x > 0)` guards and index loops over matching tables are
// used on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod binning;
pub mod calculus;
mod error;
pub mod inference;
pub mod io;
mod linalg;
pub mod measures;
pub mod nulldist;
pub mod rng;
mod scalar;
pub mod sim;
pub mod special;
pub mod table;

pub use binning::{bin_count_rule, discretize, BinRule, BinningSpec, CountRule, Discretized, Strategy};
pub use calculus::{
    fd_derivatives, mi_gradient, mi_hessian, multinomial_cov, CovarianceMatrix, FdSteps,
    Gradient, HessianMatrix,
};
pub use error::{Error, Result};
pub use inference::{
    independence_test, null_weights, t1_statistic, t2_statistic, NullReference, PValueMethod,
    Statistic, TestOptions, TestResult,
};
pub use measures::{
    empirical_mutual_information, g2, joint_entropy, mutual_information, normalized_mutual_information, pearson_chi2,
};
pub use nulldist::{cdf, chi_bar_weights, pvalue, quantile, sample, ChiBarWeights, NullMethod, PValue};
pub use scalar::Real;
pub use table::{JointTable, ProbTable, RestrictedVector};

/// Double-precision probability table.
pub type ProbTableF64 = ProbTable<f64>;
/// Single-precision probability table.
pub type ProbTableF32 = ProbTable<f32>;
/// Double-precision restricted coordinate vector.
pub type RestrictedVectorF64 = RestrictedVector<f64>;
/// Double-precision MI gradient.
pub type GradientF64 = Gradient<f64>;
/// Double-precision MI Hessian.
pub type HessianMatrixF64 = HessianMatrix<f64>;
/// Double-precision restricted multinomial covariance.
pub type CovarianceMatrixF64 = CovarianceMatrix<f64>;
/// Double-precision null weights.
pub type ChiBarWeightsF64 = ChiBarWeights<f64>;
/// Double-precision test result.
pub type TestResultF64 = TestResult<f64>;
