use crate::types::{normalize, AgentState, BehaviorSpec, Vec2, WallMode};

use super::{BehaviorError, MotionCommand, NeighborView};

/// Two positions closer than this are treated as the same point.
pub const COINCIDENT_EPS: f64 = 1e-9;

/// Inverse-distance-weighted sum of unit offsets toward each point:
/// `sum_j (p_j - p_i) / |p_j - p_i|^2`.
pub fn crowding_vector(own: &AgentState, neighbors: &NeighborView) -> Result<Vec2, BehaviorError> {
    let mut s = Vec2::ZERO;
    for other in neighbors.states() {
        let d = other.position - own.position;
        let r2 = d.norm_sq();
        if r2.sqrt() <= COINCIDENT_EPS {
            return Err(BehaviorError::CoincidentAgents { a: own.id, b: other.id });
        }
        s += d / r2;
    }
    Ok(s)
}

/// Perimeter defense: move away from the crowding vector so that agents spread
/// out, with close neighbors pushing hardest.
///
/// `obstacles` are sensed wall points in world coordinates. In
/// [`WallMode::Stop`] the part of the command that points into a wall closer
/// than `spec.wall_standoff` is removed and the speed shrinks with it, down to
/// zero when the agent faces the wall head on. In
/// [`WallMode::VirtualNeighbors`] wall points simply join the sum.
pub fn perimeter_step(
    own: &AgentState,
    neighbors: &NeighborView,
    obstacles: &[Vec2],
    spec: &BehaviorSpec,
) -> Result<MotionCommand, BehaviorError> {
    let mut s = crowding_vector(own, neighbors)?;
    if spec.wall_mode == WallMode::VirtualNeighbors {
        for &w in obstacles {
            let d = w - own.position;
            let r2 = d.norm_sq();
            if r2.sqrt() > COINCIDENT_EPS {
                s += d / r2;
            }
        }
    }
    let desired = normalize(-s).unwrap_or(own.heading);
    if spec.wall_mode == WallMode::VirtualNeighbors {
        return Ok(MotionCommand::new(desired, spec.cruise_speed));
    }

    let mut near: Vec<(f64, Vec2)> = obstacles
        .iter()
        .map(|&w| ((w - own.position).norm(), w - own.position))
        .filter(|&(d, _)| d > COINCIDENT_EPS && d < spec.wall_standoff)
        .collect();
    if near.is_empty() {
        return Ok(MotionCommand::new(desired, spec.cruise_speed));
    }
    near.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.x.total_cmp(&b.1.x)).then(a.1.y.total_cmp(&b.1.y)));
    let mut free = desired.vector();
    for (d, offset) in near {
        let toward = offset / d;
        let into = free.dot(toward);
        if into > 0.0 {
            free -= toward * into;
        }
    }
    match normalize(free) {
        Ok(h) if free.norm() > 1e-6 => Ok(MotionCommand::new(h, spec.cruise_speed * free.norm().min(1.0))),
        _ => Ok(MotionCommand::hold(desired)),
    }
}
