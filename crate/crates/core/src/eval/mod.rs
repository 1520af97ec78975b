//! Statistical benchmarking: numeric Fisher information and the Cramér-Rao
//! bound on displacement error, a maximum-likelihood reference estimator,
//! and deterministic Monte-Carlo MSE sweeps over SNR or normalized frequency.

mod fisher;
mod mle;
mod sweep;

pub use fisher::{
    crb_displacement, fisher_matrix, fisher_matrix_for_image, fisher_matrix_with_step, CrbReport,
    FisherMatrix, FISHER_PARAMS,
};
pub use mle::{mle_fit, MleFit};
pub use sweep::{field_mse, run_sweep, Abscissa, EstimatorKind, MseCurve, MsePoint, SweepConfig};
