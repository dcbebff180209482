use std::fmt;

use serde::{Deserialize, Serialize};

use crate::behaviors::MotionCommand;
use crate::bodysim::Pose;
use crate::netsim::LinkOutcome;
use crate::types::{AgentId, Vec2};

/// What an agent was doing during a tick.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    /// Tick 0, before anything ran.
    Initial,
    Consensus,
    Perimeter,
    Exploration,
    /// Exploration toward a leader's last known position.
    Following,
    /// Search-and-explore, no target known yet.
    Searching,
    /// Search-and-explore, converging on a known target.
    Rendezvous,
    /// Heading pinned by an event.
    Leader,
    Scripted,
    Frozen,
    /// The behavior rejected its inputs; the agent held still this tick.
    Fault,
    Removed,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Initial => "initial",
            Phase::Consensus => "consensus",
            Phase::Perimeter => "perimeter",
            Phase::Exploration => "exploration",
            Phase::Following => "following",
            Phase::Searching => "searching",
            Phase::Rendezvous => "rendezvous",
            Phase::Leader => "leader",
            Phase::Scripted => "scripted",
            Phase::Frozen => "frozen",
            Phase::Fault => "fault",
            Phase::Removed => "removed",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentRecord {
    pub id: AgentId,
    pub removed: bool,
    /// True pose at the end of the tick.
    pub pose: Pose,
    /// The agent's own pose estimate used this tick.
    pub sensed: Option<Pose>,
    pub command: Option<MotionCommand>,
    /// Distance actually covered this tick divided by the tick duration.
    pub speed: f64,
    pub phase: Phase,
    pub target_found: Option<Vec2>,
}

/// One tick of a run. Agent entries are in id order and never disappear.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub tick: u64,
    pub agents: Vec<AgentRecord>,
    /// Frames resolved by the mesh at the start of this tick.
    pub sent: usize,
    pub delivered: usize,
    /// Every delivery attempt, when networking is verbose.
    pub links: Option<Vec<LinkOutcome>>,
}

impl StepRecord {
    pub fn active(&self) -> impl Iterator<Item = &AgentRecord> {
        self.agents.iter().filter(|a| !a.removed)
    }

    pub fn agent(&self, id: AgentId) -> Option<&AgentRecord> {
        self.agents.get(id.0 as usize).filter(|a| a.id == id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    MaxTicks,
    AllReachedTarget,
    ConsensusReached,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::MaxTicks => "max_ticks",
            Termination::AllReachedTarget => "all_reached_target",
            Termination::ConsensusReached => "consensus_reached",
        }
    }
}

/// Headline numbers of a run, taken from the final tick unless noted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub ticks: u64,
    pub heading_order: f64,
    pub coverage_area: f64,
    pub min_pairwise_distance: Option<f64>,
    /// First tick at which any agent knew the target.
    pub first_find_tick: Option<u64>,
    /// First tick at which every active agent knew the target and was within
    /// 3 p0 of a light.
    pub all_reach_tick: Option<u64>,
    pub messages_sent: u64,
    pub messages_delivered: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub seed: u64,
    pub tick_duration: f64,
    pub termination: Termination,
    pub records: Vec<StepRecord>,
    pub summary: Summary,
}

impl RunResult {
    pub fn last(&self) -> &StepRecord {
        self.records.last().expect("a run always records tick 0")
    }

    /// Canonical serialization, used for byte-level comparisons.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("run results always serialize")
    }
}
