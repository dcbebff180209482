use crate::types::{normalize, AgentId, AgentState, BehaviorSpec, Goal, Vec2, ZERO_VECTOR_EPS};

use super::perimeter::COINCIDENT_EPS;
use super::{BehaviorError, MotionCommand, NeighborView};

/// The scaled velocity of the attraction/repulsion lattice rule:
///
/// ```text
/// v = H b + 1/N sum_{j in N} g_ij ((1 - H) - p0^2 / |p_i - p_j|^2)
///         + H/N sum_{j in R ∪ {i}} t_j
/// ```
///
/// with `b` the unit bearing to the goal, `g_ij` the unit vector from this
/// agent toward neighbor `j`, `t_j` headings and `R` the neighbors within the
/// consensus radius. With no neighbors the middle sum vanishes and the last
/// term reduces to `H` times the agent's own heading.
pub fn exploration_velocity(own: &AgentState, neighbors: &NeighborView, spec: &BehaviorSpec) -> Result<Vec2, BehaviorError> {
    let h = spec.h_weight();
    let mut v = Vec2::ZERO;

    if spec.goal_seeking() {
        let goal = match spec.goal {
            Some(Goal::Point(p)) => p,
            _ => return Err(BehaviorError::MissingGoal(own.id)),
        };
        // sitting on the goal leaves the bearing undefined; it contributes nothing
        if let Ok(bearing) = normalize(goal - own.position) {
            v += bearing.vector() * h;
        }
    }

    let n = neighbors.len();
    if n == 0 {
        return Ok(v + own.heading.vector() * h);
    }

    let p0_sq = spec.p0 * spec.p0;
    let radius = spec.consensus_radius();
    let mut spacing = Vec2::ZERO;
    let mut local_headings = own.heading.vector();
    for other in neighbors.states() {
        let offset = other.position - own.position;
        let dist = offset.norm();
        if dist <= COINCIDENT_EPS {
            return Err(BehaviorError::CoincidentAgents { a: own.id, b: other.id });
        }
        let azimuth = offset / dist;
        spacing += azimuth * ((1.0 - h) - p0_sq / (dist * dist));
        if dist <= radius {
            local_headings += other.heading.vector();
        }
    }
    let inv_n = 1.0 / n as f64;
    v += spacing * inv_n;
    if spec.goal_seeking() {
        v += local_headings * (h * inv_n);
    }
    Ok(v)
}

/// Exploration / leader-follower step. The heading follows the scaled velocity
/// and the speed is `|v|` times the speed gain; a vanishing velocity stops the
/// agent without turning it. The body applies its own speed cap.
pub fn exploration_step(
    own: &AgentState,
    neighbors: &NeighborView,
    spec: &BehaviorSpec,
    dt: f64,
) -> Result<MotionCommand, BehaviorError> {
    let v = exploration_velocity(own, neighbors, spec)?;
    match normalize(v) {
        Ok(heading) if v.norm() > ZERO_VECTOR_EPS => Ok(MotionCommand::new(heading, v.norm() * spec.speed_gain(dt))),
        _ => Ok(MotionCommand::hold(own.heading)),
    }
}

/// Outcome of looking up the leader for a follower.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LeaderGoal {
    Known(Vec2),
    /// The leader has never been heard; the follower keeps spacing only.
    NoGoalYet,
}

impl LeaderGoal {
    pub fn position(self) -> Option<Vec2> {
        match self {
            LeaderGoal::Known(p) => Some(p),
            LeaderGoal::NoGoalYet => None,
        }
    }
}

/// The leader's freshest position in the view, else the last one remembered.
pub fn leader_follower_goal(leader: AgentId, neighbors: &NeighborView, last_known: Option<Vec2>) -> LeaderGoal {
    match neighbors.get(leader).map(|n| n.state.position).or(last_known) {
        Some(p) => LeaderGoal::Known(p),
        None => LeaderGoal::NoGoalYet,
    }
}
