use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Heading, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AgentId(pub u32);

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u32> for AgentId {
    fn from(v: u32) -> Self {
        AgentId(v)
    }
}

/// Role markers carried in every broadcast.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RoleFlags {
    /// Ignores the swarm and holds a pinned heading.
    pub leader: bool,
    /// Running on a halved speed cap.
    pub degraded: bool,
}

impl RoleFlags {
    const LEADER: u8 = 0b01;
    const DEGRADED: u8 = 0b10;

    pub fn bits(self) -> u8 {
        (if self.leader { Self::LEADER } else { 0 }) | (if self.degraded { Self::DEGRADED } else { 0 })
    }

    /// `None` when unknown bits are set.
    pub fn from_bits(bits: u8) -> Option<Self> {
        if bits & !(Self::LEADER | Self::DEGRADED) != 0 {
            return None;
        }
        Some(RoleFlags { leader: bits & Self::LEADER != 0, degraded: bits & Self::DEGRADED != 0 })
    }
}

/// The snapshot an agent broadcasts about itself each tick.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    pub id: AgentId,
    pub tick: u64,
    pub position: Vec2,
    pub heading: Heading,
    /// m/s, never negative.
    pub speed: f64,
    pub target_found: Option<Vec2>,
    pub flags: RoleFlags,
}

impl AgentState {
    pub fn new(id: AgentId, position: Vec2, heading: Heading) -> Self {
        AgentState { id, tick: 0, position, heading, speed: 0.0, target_found: None, flags: RoleFlags::default() }
    }

    pub fn is_leader(&self) -> bool {
        self.flags.leader
    }
}
