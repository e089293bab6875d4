//! Exposure-index and uplink-coverage analysis for cellular networks with
//! stochastically modeled base stations and users.
//!
//! The library computes the distribution (via characteristic-function
//! inversion), the mean and the component breakdown of the whole-body EMF
//! exposure index experienced by a passive bystander or an active uplink
//! transmitter, together with the uplink SINR coverage probability, and
//! cross-validates every analytical quantity against an internal Monte
//! Carlo simulator.

pub mod cheb;
pub mod coverage;
pub mod distribution;
pub mod error;
pub mod gil_pelaez;
pub mod laplace;
pub mod moments;
pub mod monte_carlo;
pub mod params;
pub mod point_process;
pub mod power_control;
pub mod quad;

pub use error::{ConfigError, FieldError, NumericalError, NumericalResult};
pub use params::{
    parse_config, to_config_string, ExposureBreakdown, NetworkParams, ObserverKind,
    QuadratureSpec, UserModel,
};
