//! Measures on the circle.

pub mod circle;
pub mod construct;
pub mod discretize;
pub mod driver;
pub mod kronecker;
pub mod layered;
pub mod orbit;
pub mod phase;
pub mod rotation;
pub mod serial;
pub mod trig;
pub mod weakconv;

pub use circle::{uniform_partition, CircleArc, CircleMeasure, Segment};
pub use rotation::{rotation_step, RotationOptions, RotationStep, StepChecks};
pub use trig::TrigPoly;
