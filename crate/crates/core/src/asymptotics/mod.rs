//! Product-integral asymptotics, empirical rate fitting and the Efron
//! identity.

mod aw;
mod efron;
mod fit;

pub use aw::{
    aw_asymptotic, aw_integral_numeric, aw_integral_numeric_with, aw_two_term, AwCase, AwConfig, AW_MAX_DIM,
    AW_TIE_TOLERANCE,
};
pub use efron::{efron_check, EfronOptions, EfronOutcome};
pub use fit::{
    fit_rate, fit_rate_fixed, fit_rate_free, log_power_coefficient, RateFit, RateFits, RateModel, RatePoint,
};
