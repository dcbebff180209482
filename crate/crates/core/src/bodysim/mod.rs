//! Simulated robot bodies: planar kinematics, walls, range finders and light
//! detection.

mod body;
mod world;

pub use body::{sense, step_body, Body, Pose, PoseNoise, SensorReading, SimBody, RAY_COUNT, WALL_STANDOFF};
pub use world::{BodyConfig, BodyKind, BodyKindName, Light, NoiseConfig, Rect, Segment, World};
