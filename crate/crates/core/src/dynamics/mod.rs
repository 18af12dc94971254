//! Mild formulation of the controlled stochastic equation on a spectral
//! basis: parameter validation, the coefficient maps `G` and `ħ`, the
//! discretized map `𝓕_λ`, and its Picard solver.

mod kernels;
mod mild;
mod noise_coeff;
mod nonlinearity;
mod params;

pub use kernels::{subinterval_weights, MildKernels};
pub use mild::{
    ControlInputs, ControlLaw, MildSystem, NoControl, OpenLoop, PicardOptions, SolveResult,
};
pub use noise_coeff::{NoiseCoeffKind, NoiseCoeffSpec};
pub use nonlinearity::{
    fit_bilinear_constants, BilinearConstants, Nonlinearity, NonlinearityKind, NonlinearitySpec,
    NonlinearityWorkspace,
};
pub use params::{validate_params, Condition, ModelParams, ValidityReport};
