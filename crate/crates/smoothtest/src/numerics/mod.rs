//! Self-contained numerical kernels: special functions, seeded random
//! streams, quadrature, and a derivative-free simplex optimizer.

mod optim;
mod rng;
mod special;

pub use optim::{nelder_mead, OptimConfig};
pub use rng::RngStream;
pub use special::{
    adaptive_simpson, chi2_quantile, gamma_p, gauss_legendre, ln_gamma, normal_cdf, normal_pdf,
    normal_quantile,
};
