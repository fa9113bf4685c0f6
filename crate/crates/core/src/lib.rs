//! Higher Mahler measures `m_k(x - r)` for `|r| = 1`.
//!
//! The crate computes the Taylor coefficients `a_k = m_k / k!` of the zeta
//! Mahler measure `Z(s) = Gamma(s+1) / Gamma(s/2+1)^2` three ways:
//!
//! * the convolution recurrence driven by Dirichlet eta values
//!   ([`coefficients`]),
//! * exponentiation of the eta series for `log Z(s)` ([`coefficients::z_exp_eval`]),
//! * direct double-exponential quadrature of `log^k |e^{2 pi i t} - r|`
//!   ([`integral`]),
//!
//! and checks the asymptotic behaviour of the `a_k` (`|a_k| -> 1/pi`,
//! `a_{k+1}/a_k -> -1`, the `O(1/k)` and `o(1/k)` decay of `a_{k+1} + a_k`)
//! together with the supporting inequalities ([`verify`]).
//!
//! All arithmetic is arbitrary precision through MPFR; see
//! [`precision::PrecisionContext`].

pub mod coefficients;
pub mod error;
pub mod exec;
pub mod integral;
pub mod precision;
pub mod quadrature;
pub mod special;
pub mod verify;

pub use coefficients::{
    b_coeff, build_table, higher_mahler, z_exp_eval, z_series_eval, CoefficientTable, SeriesValue,
};
pub use error::{MahlerError, Result};
pub use exec::Exec;
pub use integral::{mahler_integral, zeta_mahler_integral, UnitCirclePoint};
pub use precision::{format_sci, HpReal, PrecisionContext};
pub use quadrature::{tanh_sinh, Abscissa, QuadratureResult};
pub use special::{eta_complement, eta_int, gamma_real, zeta_int};
pub use verify::{run_all, ClaimCheck, Comparison, InequalityRanges, Schedules, VerificationReport};
