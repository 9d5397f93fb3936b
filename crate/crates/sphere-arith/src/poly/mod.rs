//! Exact polynomials, harmonic spaces on S² and S³, and zonal kernels.

pub mod gegenbauer;
pub mod harmonic;
pub mod linalg;
mod multipoly;
mod pi;

pub use gegenbauer::{
    gegenbauer_1d, kernel_s2, kernel_s2_at, kernel_s3, kernel_s3_at, legendre_1d, tensor_embed,
    tensor_embed_direct, UniPoly,
};
pub use harmonic::{
    basis, basis_with, cached_basis, harmonic_project, inner, laplacian, mean_product, monomial_moment,
    sphere_integral, sphere_mean, HarmonicBasis, Normalization,
};
pub use multipoly::{DDPoly, Exps, IntPoly, MultiPoly};
pub(crate) use multipoly::{rat, ratio};
pub use pi::PiScaled;
