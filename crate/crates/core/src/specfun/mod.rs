//! Special functions and quadrature used by the analytic engine.
//!
//! Every routine here is a pure function of its arguments.

mod gamma;
mod meijer;
mod quad;

pub use gamma::{
    erfc, exp_integral_e1, ln_gamma, q_function, reg_lower_inc_gamma, reg_upper_inc_gamma,
};
pub use meijer::{meijer_g13_32, meijer_g21_22, meijer_g_ac, meijer_g_ber};
pub use quad::{expect_under_gamma, integrate, QuadSpec};

pub(crate) use gamma::{inc_gamma_pq, lgamma, ln_gamma_pdf};
