//! Special functions in double precision: gamma, scaled modified Bessel
//! functions of fractional order, Kummer and Tricomi confluent
//! hypergeometric functions, and normalized Hermite functions.

mod bessel;
mod gamma;
mod hermite;
mod hyper;

pub use bessel::{
    bessel_i_scaled, bessel_i_scaled_reflected, bessel_k_scaled, exp_k_quarter,
    ln_exp_i_quarter_pair, scaled_i_quarter_pair, ScaledBesselValue, MAX_BESSEL_ORDER,
};
pub use gamma::{double_factorial, double_factorial_f64, gamma, ln_gamma};
pub use hermite::{hermite_normalized, hermite_table, HERMITE_MAX_ORDER};
pub use hyper::{
    kummer_1f1, kummer_1f1_scaled, ln_tricomi_u, tricomi_u, tricomi_u_connection, MAX_SERIES_TERMS,
    MAX_U_SUBDIVISIONS,
};
