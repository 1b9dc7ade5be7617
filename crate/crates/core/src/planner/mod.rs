//! Raceline generation, friction-indexed speed profiles and reference
//! trajectories for the controller.

mod profile;
mod raceline;
mod reference;

pub use profile::{build_library, velocity_profile, ProfileLimits, VelocityProfileLibrary};
pub use raceline::{min_curvature_raceline, min_curvature_raceline_traced, raceline_objective, RaceLine};
pub use reference::{reference, ReferenceTrajectory};
