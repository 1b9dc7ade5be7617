//! Adaptive model-predictive racing control over a bank of sampled vehicle
//! models.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases below
//! fix the scalar for the common cases.

pub mod bank;
pub mod dynamics;
pub mod error;
pub mod estimator;
pub mod harness;
pub mod mpc;
pub mod planner;
pub mod scalar;
pub mod track;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type State = dynamics::VehicleState<f64>;
pub type Input = dynamics::ControlInput<f64>;
pub type Theta = dynamics::TireSurfaceParams<f64>;
pub type FixedParams = dynamics::VehicleFixedParams<f64>;
pub type Model = dynamics::Dbm<f64>;
pub type Bank = bank::ModelBank<f64>;
pub type Window = bank::ErrorWindow<f64>;
pub type TrackF64 = track::Track<f64>;
pub type Reference = planner::ReferenceTrajectory<f64>;
pub type MpcSolution = mpc::Solution<f64>;

pub type State32 = dynamics::VehicleState<f32>;
pub type Input32 = dynamics::ControlInput<f32>;
pub type Theta32 = dynamics::TireSurfaceParams<f32>;
pub type Model32 = dynamics::Dbm<f32>;
pub type Bank32 = bank::ModelBank<f32>;
pub type Window32 = bank::ErrorWindow<f32>;
pub type TrackF32 = track::Track<f32>;
