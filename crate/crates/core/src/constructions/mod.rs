//! Explicit families of submanifolds, the profile ODE and the curve
//! integrator on `LC^2`.

pub mod curve;
pub mod generators;
pub mod ode;

pub use curve::{curve_kappa, integrate_lc2_curve, standard_initial_data, CurveOnCone, CurveSample};
pub use generators::{
    gen_example61, gen_isotropic, gen_product, gen_pseudo_umbilical_n, gen_pseudo_umbilical_surface,
    gen_ruled_flat, gen_sigma_tau, generate, CurveInput, Family, PSEUDO_UMBILICAL_N_RANGE,
};
pub use ode::{solve_alpha_hat_ode, OdeSolution};
