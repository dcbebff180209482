//! Scenario files: one JSON document with `seed`, `world`, `agents`,
//! `network`, `run` and optional `events`. Unknown keys are rejected.

use std::collections::BTreeSet;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use super::{seeded_rng, AgentId, BehaviorSpec, Goal, Heading, Vec2};
use crate::bodysim::{Rect, World};
use crate::netsim::NetworkModel;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("cannot parse scenario: {0}")]
    Parse(String),
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("cannot read scenario: {0}")]
    Io(String),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError::Invalid(msg.into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub world: World,
    pub agents: AgentsConfig,
    pub network: NetworkModel,
    pub run: RunConfig,
    #[serde(default)]
    pub events: Vec<ScheduledEvent>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentsConfig {
    pub n_agents: usize,
    pub placement: Placement,
    #[serde(default)]
    pub initial_heading: InitialHeading,
    /// Assigned to every agent without an override.
    pub behavior: BehaviorSpec,
    #[serde(default)]
    pub overrides: Vec<AgentOverride>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Placement {
    /// One position per agent, in id order.
    Explicit { positions: Vec<Vec2> },
    /// Square grid filled row by row, centered on `center`.
    Grid {
        center: Vec2,
        spacing: f64,
        #[serde(default)]
        columns: Option<usize>,
        /// Uniform offset in `[-jitter, jitter]` per axis.
        #[serde(default)]
        jitter: f64,
    },
    /// Triangular lattice, every other row shifted by half a spacing.
    Hex {
        center: Vec2,
        spacing: f64,
        #[serde(default)]
        columns: Option<usize>,
        #[serde(default)]
        jitter: f64,
    },
    /// Uniform in `region`, redrawn until `min_separation` from every other agent.
    Random { region: Rect, min_separation: f64 },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialHeading {
    #[default]
    Random,
    Fixed {
        degrees: f64,
    },
    Explicit {
        degrees: Vec<f64>,
    },
}

/// Per-agent exceptions to the shared defaults.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentOverride {
    pub ids: Vec<AgentId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub behavior: Option<BehaviorSpec>,
    /// Broadcasts but never moves.
    #[serde(default)]
    pub frozen: bool,
    /// Drives a fixed path instead of running a behavior.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub script: Option<Script>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position: Option<Vec2>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heading_degrees: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Script {
    pub waypoints: Vec<Vec2>,
    /// m/s
    pub speed: f64,
}

impl Script {
    pub fn length_from(&self, start: Vec2) -> f64 {
        let mut prev = start;
        let mut len = 0.0;
        for &w in &self.waypoints {
            len += prev.distance(w);
            prev = w;
        }
        len
    }
}

fn default_tick() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub max_ticks: u64,
    /// Seconds per tick.
    #[serde(default = "default_tick")]
    pub tick_duration: f64,
    #[serde(default)]
    pub termination: TerminationRule,
    /// Evaluate agents on a thread pool. Results do not depend on it.
    #[serde(default)]
    pub parallel: bool,
}

fn default_fraction() -> f64 {
    0.95
}

fn default_radius_p0() -> f64 {
    5.0
}

/// Early-exit predicate checked after every tick.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminationRule {
    /// Run to `max_ticks`.
    #[default]
    None,
    /// Heading spread under 1e-3 rad for 20 consecutive ticks.
    Consensus,
    /// Every agent knows the target and is within 3 p0 of a light.
    Search,
    /// Scripted agents done and `fraction` of the rest within `radius_p0 * p0`
    /// of the scripted endpoint.
    Arrival {
        #[serde(default = "default_fraction")]
        fraction: f64,
        #[serde(default = "default_radius_p0")]
        radius_p0: f64,
    },
}

/// Something that happens to the swarm at the start of a tick.
#[derive(Debug, Clone, PartialEq)]
pub enum Event {
    RemoveAgent(AgentId),
    /// Pin the agent's heading; `None` keeps the heading it has at that tick.
    SetLeader { id: AgentId, heading_degrees: Option<f64> },
    DegradeAgent(AgentId),
    /// New equilibrium distance for `ids`, or for everyone.
    SetP0 { p0: f64, ids: Option<Vec<AgentId>> },
    SetCommRange(f64),
}

impl Event {
    pub fn agents(&self) -> Vec<AgentId> {
        match self {
            Event::RemoveAgent(id) | Event::DegradeAgent(id) | Event::SetLeader { id, .. } => vec![*id],
            Event::SetP0 { ids: Some(ids), .. } => ids.clone(),
            _ => Vec::new(),
        }
    }

    fn check(&self) -> Result<(), String> {
        match self {
            Event::SetLeader { heading_degrees: Some(d), .. } if !d.is_finite() => Err("leader heading must be finite".into()),
            Event::SetP0 { p0, .. } if !(*p0 > 0.0 && p0.is_finite()) => Err(format!("set_p0 needs a positive p0, got {p0}")),
            Event::SetCommRange(r) if !(*r > 0.0 && r.is_finite()) => Err(format!("set_comm_range needs a positive range, got {r}")),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEvent", into = "RawEvent")]
pub struct ScheduledEvent {
    pub tick: u64,
    pub event: Event,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum EventType {
    RemoveAgent,
    SetLeader,
    DegradeAgent,
    SetP0,
    SetCommRange,
}

/// Flat on-disk form: `{"tick": 40, "type": "remove_agent", "id": 3}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEvent {
    tick: u64,
    #[serde(rename = "type")]
    kind: EventType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<AgentId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    heading_degrees: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ids: Option<Vec<AgentId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    comm_range: Option<f64>,
}

impl TryFrom<RawEvent> for ScheduledEvent {
    type Error = String;

    fn try_from(raw: RawEvent) -> Result<Self, String> {
        let need_id = |name: &str| raw.id.ok_or_else(|| format!("{name} event needs `id`"));
        let extra = |ok: bool, name: &str| if ok { Ok(()) } else { Err(format!("unexpected field in {name} event")) };
        let event = match raw.kind {
            EventType::RemoveAgent => {
                extra(raw.heading_degrees.is_none() && raw.p0.is_none() && raw.ids.is_none() && raw.comm_range.is_none(), "remove_agent")?;
                Event::RemoveAgent(need_id("remove_agent")?)
            }
            EventType::DegradeAgent => {
                extra(raw.heading_degrees.is_none() && raw.p0.is_none() && raw.ids.is_none() && raw.comm_range.is_none(), "degrade_agent")?;
                Event::DegradeAgent(need_id("degrade_agent")?)
            }
            EventType::SetLeader => {
                extra(raw.p0.is_none() && raw.ids.is_none() && raw.comm_range.is_none(), "set_leader")?;
                Event::SetLeader { id: need_id("set_leader")?, heading_degrees: raw.heading_degrees }
            }
            EventType::SetP0 => {
                extra(raw.id.is_none() && raw.heading_degrees.is_none() && raw.comm_range.is_none(), "set_p0")?;
                Event::SetP0 { p0: raw.p0.ok_or("set_p0 event needs `p0`")?, ids: raw.ids }
            }
            EventType::SetCommRange => {
                extra(raw.id.is_none() && raw.heading_degrees.is_none() && raw.p0.is_none() && raw.ids.is_none(), "set_comm_range")?;
                Event::SetCommRange(raw.comm_range.ok_or("set_comm_range event needs `comm_range`")?)
            }
        };
        Ok(ScheduledEvent { tick: raw.tick, event })
    }
}

impl From<ScheduledEvent> for RawEvent {
    fn from(e: ScheduledEvent) -> Self {
        let mut raw = RawEvent {
            tick: e.tick,
            kind: EventType::RemoveAgent,
            id: None,
            heading_degrees: None,
            p0: None,
            ids: None,
            comm_range: None,
        };
        match e.event {
            Event::RemoveAgent(id) => raw.id = Some(id),
            Event::DegradeAgent(id) => {
                raw.kind = EventType::DegradeAgent;
                raw.id = Some(id);
            }
            Event::SetLeader { id, heading_degrees } => {
                raw.kind = EventType::SetLeader;
                raw.id = Some(id);
                raw.heading_degrees = heading_degrees;
            }
            Event::SetP0 { p0, ids } => {
                raw.kind = EventType::SetP0;
                raw.p0 = Some(p0);
                raw.ids = ids;
            }
            Event::SetCommRange(r) => {
                raw.kind = EventType::SetCommRange;
                raw.comm_range = Some(r);
            }
        }
        raw
    }
}

/// Everything the engine needs to know about one agent at tick 0.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentSetup {
    pub id: AgentId,
    pub position: Vec2,
    pub heading: Heading,
    pub behavior: BehaviorSpec,
    pub frozen: bool,
    pub script: Option<Script>,
}

impl ScenarioConfig {
    pub fn from_json_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: ScenarioConfig = serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_value(value: Value) -> Result<Self, ConfigError> {
        let cfg: ScenarioConfig = serde_json::from_value(value).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario config always serializes")
    }

    pub fn n_agents(&self) -> usize {
        self.agents.n_agents
    }

    pub fn dt(&self) -> f64 {
        self.run.tick_duration
    }

    /// Behavior assigned to `id`: the override if any, else the shared default.
    pub fn behavior_for(&self, id: AgentId) -> &BehaviorSpec {
        self.agents
            .overrides
            .iter()
            .filter(|o| o.ids.contains(&id))
            .find_map(|o| o.behavior.as_ref())
            .unwrap_or(&self.agents.behavior)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let n = self.agents.n_agents;
        if n == 0 {
            return invalid("agents.n_agents must be at least 1");
        }
        self.world.check().map_err(|e| ConfigError::Invalid(format!("world: {e}")))?;
        self.network.check().map_err(|e| ConfigError::Invalid(format!("network: {e}")))?;
        if !(self.run.tick_duration > 0.0 && self.run.tick_duration.is_finite()) {
            return invalid("run.tick_duration must be positive");
        }
        if self.run.max_ticks == 0 {
            return invalid("run.max_ticks must be at least 1");
        }
        if let TerminationRule::Arrival { fraction, radius_p0 } = self.run.termination {
            if !((0.0..=1.0).contains(&fraction) && radius_p0 > 0.0) {
                return invalid("arrival termination needs fraction in [0, 1] and positive radius_p0");
            }
        }
        let known = |id: AgentId| (id.0 as usize) < n;

        let mut has_behavior = BTreeSet::new();
        for (k, o) in self.agents.overrides.iter().enumerate() {
            if o.ids.is_empty() {
                return invalid(format!("agents.overrides[{k}] lists no ids"));
            }
            for &id in &o.ids {
                if !known(id) {
                    return invalid(format!("agents.overrides[{k}] names unknown agent {id}"));
                }
                if o.behavior.is_some() && !has_behavior.insert(id) {
                    return invalid(format!("agent {id} is assigned more than one behavior"));
                }
            }
            if let Some(s) = &o.script {
                if s.waypoints.is_empty() || !(s.speed > 0.0 && s.speed.is_finite()) {
                    return invalid(format!("agents.overrides[{k}].script needs waypoints and a positive speed"));
                }
                if s.waypoints.iter().any(|w| !self.world.bounds.contains(*w)) {
                    return invalid(format!("agents.overrides[{k}].script leaves the world bounds"));
                }
            }
            if let Some(p) = o.position {
                if !self.world.bounds.contains(p) {
                    return invalid(format!("agents.overrides[{k}].position is outside the world bounds"));
                }
            }
        }
        for i in 0..n {
            let id = AgentId(i as u32);
            let spec = self.behavior_for(id);
            spec.check().map_err(|e| ConfigError::Invalid(format!("behavior of agent {id}: {e}")))?;
            let scripted = self.agents.overrides.iter().any(|o| o.script.is_some() && o.ids.contains(&id));
            if let Some(Goal::Leader(l)) = spec.goal {
                if !known(l) || (l == id && !scripted) {
                    return invalid(format!("agent {id} follows invalid leader {l}"));
                }
            }
        }
        match &self.agents.placement {
            Placement::Explicit { positions } if positions.len() != n => {
                return invalid(format!("placement lists {} positions for {n} agents", positions.len()));
            }
            Placement::Grid { spacing, jitter, columns, .. } | Placement::Hex { spacing, jitter, columns, .. } => {
                if !(*spacing > 0.0 && *jitter >= 0.0) || *columns == Some(0) {
                    return invalid("lattice placement needs positive spacing, non-negative jitter and columns ≥ 1");
                }
            }
            Placement::Random { min_separation, region } => {
                if !(*min_separation >= 0.0) || !(region.width() > 0.0 && region.height() > 0.0) {
                    return invalid("random placement needs a non-empty region and non-negative separation");
                }
            }
            _ => {}
        }
        if let InitialHeading::Explicit { degrees } = &self.agents.initial_heading {
            if degrees.len() != n {
                return invalid(format!("initial_heading lists {} headings for {n} agents", degrees.len()));
            }
        }
        for (k, e) in self.events.iter().enumerate() {
            if e.tick > self.run.max_ticks {
                return invalid(format!("events[{k}] is scheduled after max_ticks"));
            }
            e.event.check().map_err(|m| ConfigError::Invalid(format!("events[{k}]: {m}")))?;
            if let Some(id) = e.event.agents().into_iter().find(|&id| !known(id)) {
                return invalid(format!("events[{k}] names unknown agent {id}"));
            }
        }
        Ok(())
    }

    /// Resolves placement, headings and overrides into per-agent setups.
    /// Random choices come from the `init` stream.
    pub fn agent_setups(&self) -> Result<Vec<AgentSetup>, ConfigError> {
        let n = self.agents.n_agents;
        let mut rng = seeded_rng(self.seed, "init");
        let positions = place(&self.agents.placement, n, &mut rng)?;
        let headings: Vec<Heading> = match &self.agents.initial_heading {
            InitialHeading::Random => (0..n).map(|_| Heading::from_angle(rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))).collect(),
            InitialHeading::Fixed { degrees } => vec![Heading::from_degrees(*degrees); n],
            InitialHeading::Explicit { degrees } => degrees.iter().map(|&d| Heading::from_degrees(d)).collect(),
        };
        let mut setups: Vec<AgentSetup> = (0..n)
            .map(|i| {
                let id = AgentId(i as u32);
                AgentSetup { id, position: positions[i], heading: headings[i], behavior: self.behavior_for(id).clone(), frozen: false, script: None }
            })
            .collect();
        for o in &self.agents.overrides {
            for id in &o.ids {
                let s = &mut setups[id.0 as usize];
                s.frozen |= o.frozen;
                if o.script.is_some() {
                    s.script.clone_from(&o.script);
                }
                if let Some(p) = o.position {
                    s.position = p;
                }
                if let Some(d) = o.heading_degrees {
                    s.heading = Heading::from_degrees(d);
                }
            }
        }
        for s in &setups {
            if !self.world.bounds.contains(s.position) {
                return invalid(format!("agent {} starts outside the world bounds", s.id));
            }
        }
        for (i, a) in setups.iter().enumerate() {
            if let Some(b) = setups[i + 1..].iter().find(|b| a.position.distance(b.position) <= 1e-9) {
                return invalid(format!("agents {} and {} start at the same position", a.id, b.id));
            }
        }
        Ok(setups)
    }
}

fn place(placement: &Placement, n: usize, rng: &mut impl Rng) -> Result<Vec<Vec2>, ConfigError> {
    let lattice = |center: Vec2, spacing: f64, columns: Option<usize>, jitter: f64, hex: bool, rng: &mut dyn rand::RngCore| {
        let cols = columns.unwrap_or_else(|| (n as f64).sqrt().ceil() as usize).max(1);
        let rows = n.div_ceil(cols);
        let row_step = if hex { spacing * 3f64.sqrt() / 2.0 } else { spacing };
        let shift = if hex && rows > 1 { spacing / 4.0 } else { 0.0 };
        let origin = center - Vec2::new((cols - 1) as f64 * spacing / 2.0 + shift, (rows - 1) as f64 * row_step / 2.0);
        (0..n)
            .map(|i| {
                let (r, c) = (i / cols, i % cols);
                let offset = if hex && r % 2 == 1 { spacing / 2.0 } else { 0.0 };
                let mut p = origin + Vec2::new(c as f64 * spacing + offset, r as f64 * row_step);
                if jitter > 0.0 {
                    p += Vec2::new(rng.random_range(-jitter..=jitter), rng.random_range(-jitter..=jitter));
                }
                p
            })
            .collect::<Vec<_>>()
    };
    match placement {
        Placement::Explicit { positions } => Ok(positions.clone()),
        Placement::Grid { center, spacing, columns, jitter } => Ok(lattice(*center, *spacing, *columns, *jitter, false, rng)),
        Placement::Hex { center, spacing, columns, jitter } => Ok(lattice(*center, *spacing, *columns, *jitter, true, rng)),
        Placement::Random { region, min_separation } => {
            let mut out: Vec<Vec2> = Vec::with_capacity(n);
            for i in 0..n {
                let mut tries = 0;
                loop {
                    let p = Vec2::new(rng.random_range(region.min.x..=region.max.x), rng.random_range(region.min.y..=region.max.y));
                    if out.iter().all(|q| q.distance(p) >= *min_separation) {
                        out.push(p);
                        break;
                    }
                    tries += 1;
                    if tries > 10_000 {
                        return invalid(format!("could not place agent {i} with separation {min_separation}"));
                    }
                }
            }
            Ok(out)
        }
    }
}
