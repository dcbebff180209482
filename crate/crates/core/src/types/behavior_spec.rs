use serde::{Deserialize, Serialize};

use super::{AgentId, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BehaviorKind {
    /// Heading alignment by local averaging.
    Consensus,
    /// Spread out, weighting close neighbors more.
    PerimeterDefense,
    /// Attraction/repulsion lattice with optional goal seeking.
    Exploration,
    /// Perimeter defense until a target is known, then rendezvous on it.
    SearchAndExplore,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Goal {
    Point(Vec2),
    /// Follow the last known position of this agent.
    Leader(AgentId),
}

/// How perimeter defense treats sensed wall points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WallMode {
    /// Drop the into-wall part of the command once inside the standoff distance.
    #[default]
    Stop,
    /// Add sensed wall points to the neighbor sum as repellers.
    VirtualNeighbors,
}

fn one() -> f64 {
    1.0
}

fn default_cruise() -> f64 {
    0.1
}

fn default_standoff() -> f64 {
    0.3
}

/// Which update rule an agent runs, plus its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BehaviorSpec {
    pub kind: BehaviorKind,
    /// Equilibrium distance in meters.
    #[serde(default = "one")]
    pub p0: f64,
    /// Binary heading-consensus weight: 1 seeks the goal, 0 only keeps spacing.
    #[serde(default)]
    pub h: u8,
    /// Time constant in seconds relating the scaled velocity to displacement.
    #[serde(default = "one")]
    pub delta: f64,
    #[serde(default)]
    pub goal: Option<Goal>,
    /// Radius of the local heading-consensus subset; `None` follows `p0`.
    #[serde(default)]
    pub consensus_radius: Option<f64>,
    /// m/s used by the heading-only rules.
    #[serde(default = "default_cruise")]
    pub cruise_speed: f64,
    /// Commanded m/s per unit of scaled velocity; `None` means `delta / dt`.
    #[serde(default)]
    pub speed_gain: Option<f64>,
    #[serde(default = "default_standoff")]
    pub wall_standoff: f64,
    #[serde(default)]
    pub wall_mode: WallMode,
}

impl BehaviorSpec {
    pub fn new(kind: BehaviorKind) -> Self {
        BehaviorSpec {
            kind,
            p0: 1.0,
            h: 0,
            delta: 1.0,
            goal: None,
            consensus_radius: None,
            cruise_speed: default_cruise(),
            speed_gain: None,
            wall_standoff: default_standoff(),
            wall_mode: WallMode::Stop,
        }
    }

    pub fn goal_seeking(&self) -> bool {
        self.h == 1
    }

    pub fn h_weight(&self) -> f64 {
        f64::from(self.h)
    }

    pub fn consensus_radius(&self) -> f64 {
        self.consensus_radius.unwrap_or(self.p0)
    }

    pub fn speed_gain(&self, dt: f64) -> f64 {
        self.speed_gain.unwrap_or(self.delta / dt)
    }

    /// Checks parameter ranges, returning a description of the first violation.
    pub fn check(&self) -> Result<(), String> {
        if !(self.p0 > 0.0 && self.p0.is_finite()) {
            return Err(format!("p0 must be positive, got {}", self.p0));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(format!("delta must be positive, got {}", self.delta));
        }
        if self.h > 1 {
            return Err(format!("h must be 0 or 1, got {}", self.h));
        }
        if let Some(r) = self.consensus_radius {
            if !(r > 0.0 && r.is_finite()) {
                return Err(format!("consensus_radius must be positive, got {r}"));
            }
        }
        if !(self.cruise_speed >= 0.0 && self.cruise_speed.is_finite()) {
            return Err(format!("cruise_speed must be non-negative, got {}", self.cruise_speed));
        }
        if let Some(g) = self.speed_gain {
            if !(g >= 0.0 && g.is_finite()) {
                return Err(format!("speed_gain must be non-negative, got {g}"));
            }
        }
        if !(self.wall_standoff >= 0.0 && self.wall_standoff.is_finite()) {
            return Err(format!("wall_standoff must be non-negative, got {}", self.wall_standoff));
        }
        if let Some(Goal::Point(p)) = self.goal {
            if !p.is_finite() {
                return Err("goal must be finite".into());
            }
        }
        if self.kind == BehaviorKind::Exploration && self.h == 1 && self.goal.is_none() {
            return Err("exploration with h = 1 needs a goal".into());
        }
        Ok(())
    }
}
