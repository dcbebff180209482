//! Hardware-agnostic cooperative control rules.
//!
//! Every rule is a pure function of the agent's own state, the states it has
//! received from neighbors, what it senses and its [`BehaviorSpec`]. Nothing
//! here knows about bodies, radios or the simulation clock, so the same rules
//! drive simulated and real robots.
//!
//! [`BehaviorSpec`]: crate::types::BehaviorSpec

mod consensus;
mod exploration;
mod perimeter;
mod search;
mod view;

use thiserror::Error;

use crate::types::AgentId;

pub use consensus::consensus_step;
pub use exploration::{exploration_step, exploration_velocity, leader_follower_goal, LeaderGoal};
pub use perimeter::{crowding_vector, perimeter_step, COINCIDENT_EPS};
pub use search::{known_target, search_and_explore_step, SearchOutcome, SearchPhase};
pub use view::{MotionCommand, Neighbor, NeighborView};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BehaviorError {
    /// Two agents report the same position; an upstream placement bug.
    #[error("agents {a} and {b} are at the same position")]
    CoincidentAgents { a: AgentId, b: AgentId },
    #[error("agent {0} seeks a goal but none is set")]
    MissingGoal(AgentId),
}

#[cfg(test)]
mod tests;
