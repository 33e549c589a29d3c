//! Coupled oscillator pairs built in a decoupling frame.

mod anharmonic;
mod expansion;
mod harmonic;

pub use anharmonic::{
    approx_moments_nonid, crosses_boundary, default_pair_window, f_boundary, identical_pi4_kernel,
    joint_psi0, ln_f, ln_joint_psi0, ln_reduced_identical_pi4, purity, reduced_excess_moment,
    reduced_identical_pi4, reduced_moment, reduced_moment_binomial, reduced_moment_x2,
    reduced_numeric, variance_relation, AnharmonicPair, ApproxMoments, GridConfig,
    VarianceRelation, NONID_VALIDITY_GAP,
};
pub use expansion::{
    expand_coupled_hamiltonian, CoupledCoefficients, MixingPair, Monomial, MIXING_TOL,
};
pub use harmonic::{
    harmonic_coupled_coeffs, harmonic_reduced, harmonic_reduced_params, to_coupled, to_decoupled,
    HarmonicCoupling, HarmonicPair, HarmonicReduced, HarmonicReducedParams,
};
