//! Domain types shared by every other module: geometry, agent snapshots,
//! behavior parameters, scenario configuration and seeded randomness.

mod behavior_spec;
pub mod config;
mod geometry;
mod rng;
mod state;

pub use behavior_spec::{BehaviorKind, BehaviorSpec, Goal, WallMode};
pub use config::{ConfigError, ScenarioConfig};
pub use geometry::{normalize, Heading, NotUnit, Vec2, ZeroVector, UNIT_TOL, ZERO_VECTOR_EPS};
pub use rng::{seeded_rng, SimRng};
pub use state::{AgentId, AgentState, RoleFlags};
