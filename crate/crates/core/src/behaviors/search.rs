use crate::types::{AgentState, BehaviorSpec, Goal, Vec2};

use super::{exploration_step, perimeter_step, BehaviorError, MotionCommand, NeighborView};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchPhase {
    /// No target known: spread out with perimeter defense.
    Searching,
    /// Target known: converge on it.
    Rendezvous,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOutcome {
    pub command: MotionCommand,
    /// The agent's target knowledge after this step, to be broadcast.
    pub target_found: Option<Vec2>,
    pub phase: SearchPhase,
}

/// Where the agent believes the target is. Own memory wins, then its own
/// sensor, then the lowest-id neighbor that reports one.
pub fn known_target(own: &AgentState, neighbors: &NeighborView, sensed_light: Option<Vec2>) -> Option<Vec2> {
    own.target_found
        .or(sensed_light)
        .or_else(|| neighbors.states().find_map(|s| s.target_found))
}

/// Two-phase search: perimeter defense until the target is known from any
/// source, then goal seeking (`h = 1`) toward it. Knowledge is never dropped.
pub fn search_and_explore_step(
    own: &AgentState,
    neighbors: &NeighborView,
    sensed_light: Option<Vec2>,
    obstacles: &[Vec2],
    spec: &BehaviorSpec,
    dt: f64,
) -> Result<SearchOutcome, BehaviorError> {
    match known_target(own, neighbors, sensed_light) {
        None => Ok(SearchOutcome {
            command: perimeter_step(own, neighbors, obstacles, spec)?,
            target_found: None,
            phase: SearchPhase::Searching,
        }),
        Some(target) => {
            let rendezvous = BehaviorSpec { h: 1, goal: Some(Goal::Point(target)), ..spec.clone() };
            Ok(SearchOutcome {
                command: exploration_step(own, neighbors, &rendezvous, dt)?,
                target_found: Some(target),
                phase: SearchPhase::Rendezvous,
            })
        }
    }
}
