//! Numerical building blocks: special functions, the deformed exponential
//! pair, Gaussian densities, quadrature and bracketing root finding.

mod deformed;
mod gaussian;
mod quadrature;
mod roots;
mod special;

pub use deformed::{beta_exp, beta_log};
pub use gaussian::{gaussian_pdf, gaussian_pdf_2d, spd_sqrt_2d, std_normal_pdf, truncated_std_moments};
pub use quadrature::{
    gauss_legendre, integrate_adaptive, integrate_fixed, integrate_fixed_2d,
    integrate_fixed_2d_chords, QuadratureSpec, Rect,
};
pub use roots::{bisect, RootSpec};
pub use special::{erf, erf_diff, erfc, gamma_fn};
