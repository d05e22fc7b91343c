//! Special functions and distributions shared by every other module.
//!
//! All functions are pure. Probability weights that can underflow (Poisson
//! tails, rising factorials, binomial coefficients) are carried in log
//! space and exponentiated once at the end.

mod beta_expect;
mod quadrature;
mod special;
mod tdist;

pub use beta_expect::{beta_expectation_power, beta_expectation_power_with, GaussJacobiRule};
pub use quadrature::integrate_adaptive;
pub use special::{
    ln_binomial, ln_gamma, log_rising_factorial, normal_cdf, normal_quantile, poisson_sf, reg_inc_beta,
    reg_lower_gamma, reg_upper_gamma,
};
pub use tdist::{
    central_t_cdf, central_t_pdf, central_t_quantile, noncentral_t_cdf, noncentral_t_cdf_with, noncentral_t_sf,
    noncentral_t_sf_with,
};

use crate::{Error, Result};

/// Convergence controls for iterative routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs_tol: 1e-10,
            rel_tol: 1e-9,
            max_iter: 10_000,
        }
    }
}

impl Tolerance {
    pub fn new(abs_tol: f64, rel_tol: f64, max_iter: usize) -> Result<Self> {
        let tol = Tolerance {
            abs_tol,
            rel_tol,
            max_iter,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) {
            return Err(Error::domain("abs_tol", self.abs_tol, "must be > 0"));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::domain("rel_tol", self.rel_tol, "must be > 0"));
        }
        if self.max_iter == 0 {
            return Err(Error::domain("max_iter", 0.0, "must be >= 1"));
        }
        Ok(())
    }
}

pub(crate) fn check_probability(name: &'static str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::domain(name, p, "must lie in [0, 1]"))
    }
}
