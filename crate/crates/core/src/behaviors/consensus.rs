use crate::types::{normalize, AgentState, BehaviorSpec, Vec2};

use super::{MotionCommand, NeighborView};

/// Heading consensus: steer toward the mean of the agent's own heading and
/// every received neighbor heading, each weighted `1 / (N_i + 1)`.
///
/// A vanishing mean (for example two antiparallel headings) keeps the current
/// heading. Leaders ignore the swarm and hold their pinned heading.
pub fn consensus_step(own: &AgentState, neighbors: &NeighborView, spec: &BehaviorSpec) -> MotionCommand {
    if own.is_leader() {
        return MotionCommand::new(own.heading, spec.cruise_speed);
    }
    let weight = 1.0 / (neighbors.len() as f64 + 1.0);
    let sum: Vec2 = own.heading.vector() + neighbors.states().map(|s| s.heading.vector()).sum::<Vec2>();
    let heading = normalize(sum * weight).unwrap_or(own.heading);
    MotionCommand::new(heading, spec.cruise_speed)
}
