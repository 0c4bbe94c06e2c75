//! Exact and semi-exact evaluators.

mod gamma;
mod hyper;
mod poisson;
mod product;

pub use gamma::log_gamma;
pub use hyper::hyp3f2_unit;
pub use poisson::{lognormal_joint_from_sum, low_moment, poisson_i, poisson_j, poisson_joint, JointPair};
pub use product::{
    lognormal_moment, morris_product, morris_product_exact, selberg_product, selberg_product_exact,
    GammaProductResult,
};
