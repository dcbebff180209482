//! The synchronous tick loop.
//!
//! Every tick runs the same barrier-separated phases: scheduled events,
//! message delivery into each agent's mailbox, sensing, behavior, broadcast,
//! and finally body motion. Agents only ever learn about each other through
//! delivered messages, and every random draw comes from a per-purpose stream
//! derived from the scenario seed, so a run is a pure function of its
//! configuration.

mod agent;
mod record;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use log::{debug, info, warn};
use rand::seq::SliceRandom;
use rayon::prelude::*;
use thiserror::Error;

use crate::bodysim::{Body, Pose, SimBody, World};
use crate::metrics::{coverage_area, heading_order, min_pairwise_distance};
use crate::netsim::Mesh;
use crate::types::config::AgentSetup;
use crate::types::{seeded_rng, AgentId, ConfigError, Heading, ScenarioConfig, Vec2};

use agent::{Agent, Thought};

pub use crate::types::config::{Event, ScheduledEvent, TerminationRule};
pub use record::{AgentRecord, Phase, RunResult, StepRecord, Summary, Termination};

/// Consensus is declared once the heading spread stays below this many
/// radians...
pub const CONSENSUS_SPREAD: f64 = 1e-3;
/// ...for this many consecutive ticks.
pub const CONSENSUS_HOLD_TICKS: u32 = 20;
/// Search is complete once every agent is within this many p0 of a light.
pub const SEARCH_REACH_P0: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("no agent with id {0}")]
    UnknownAgent(AgentId),
    #[error("tick {tick} has already started (now at {now})")]
    PastTick { tick: u64, now: u64 },
    #[error("tick {tick} is beyond max_ticks {max}")]
    BeyondHorizon { tick: u64, max: u64 },
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// Knobs that change how a run is executed but never what it computes.
#[derive(Debug, Clone, Default)]
pub struct EngineOptions {
    /// Overrides `run.parallel`.
    pub parallel: Option<bool>,
    /// Evaluate agents in an order shuffled by this seed each tick.
    pub shuffle_seed: Option<u64>,
    /// Agents that receive nothing. For decentralization tests.
    pub isolate: BTreeSet<AgentId>,
    /// Overrides `network.verbose`.
    pub verbose_net: Option<bool>,
}

/// Runs a scenario to completion.
pub fn run(config: ScenarioConfig) -> Result<RunResult, ConfigError> {
    Ok(Engine::new(config)?.run_to_end())
}

pub struct Engine {
    config: ScenarioConfig,
    world: Arc<World>,
    agents: Vec<Agent>,
    mesh: Mesh,
    tick: u64,
    events: BTreeMap<u64, Vec<Event>>,
    records: Vec<StepRecord>,
    parallel: bool,
    order_rng: Option<crate::types::SimRng>,
    isolate: BTreeSet<AgentId>,
    consensus_streak: u32,
    termination: Option<Termination>,
    first_find: Option<u64>,
    all_reach: Option<u64>,
    sent_total: u64,
    delivered_total: u64,
}

impl Engine {
    pub fn new(config: ScenarioConfig) -> Result<Self, ConfigError> {
        Self::with_options(config, EngineOptions::default())
    }

    pub fn with_options(mut config: ScenarioConfig, options: EngineOptions) -> Result<Self, ConfigError> {
        config.validate()?;
        if let Some(v) = options.verbose_net {
            config.network.verbose = v;
        }
        let setups = config.agent_setups()?;
        let world = Arc::new(config.world.clone());
        let agents = setups.into_iter().map(|s| build_agent(&config, &world, s)).collect();
        let mut events: BTreeMap<u64, Vec<Event>> = BTreeMap::new();
        for e in &config.events {
            events.entry(e.tick).or_default().push(e.event.clone());
        }
        let mesh = Mesh::new(config.network.clone(), config.seed);
        let mut engine = Engine {
            parallel: options.parallel.unwrap_or(config.run.parallel),
            order_rng: options.shuffle_seed.map(|s| seeded_rng(s, "order")),
            isolate: options.isolate,
            config,
            world,
            agents,
            mesh,
            tick: 0,
            events,
            records: Vec::new(),
            consensus_streak: 0,
            termination: None,
            first_find: None,
            all_reach: None,
            sent_total: 0,
            delivered_total: 0,
        };
        let initial = engine.record_tick(0, None, 0, 0, None);
        engine.records.push(initial);
        Ok(engine)
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    /// Last completed tick.
    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn records(&self) -> &[StepRecord] {
        &self.records
    }

    pub fn is_finished(&self) -> bool {
        self.termination.is_some()
    }

    /// Schedules `event` for the start of `tick`.
    pub fn inject_event(&mut self, tick: u64, event: Event) -> Result<(), EngineError> {
        if let Some(id) = event.agents().into_iter().find(|id| self.agent_index(*id).is_none()) {
            return Err(EngineError::UnknownAgent(id));
        }
        if tick <= self.tick {
            return Err(EngineError::PastTick { tick, now: self.tick });
        }
        if tick > self.config.run.max_ticks {
            return Err(EngineError::BeyondHorizon { tick, max: self.config.run.max_ticks });
        }
        self.events.entry(tick).or_default().push(event);
        Ok(())
    }

    fn agent_index(&self, id: AgentId) -> Option<usize> {
        let i = id.0 as usize;
        (i < self.agents.len()).then_some(i)
    }

    /// Runs one tick. Returns `None` once the run has terminated.
    pub fn step(&mut self) -> Option<&StepRecord> {
        if self.termination.is_some() {
            return None;
        }
        let k = self.tick + 1;
        let dt = self.config.run.tick_duration;

        for event in self.events.remove(&k).unwrap_or_default() {
            self.apply(k, event);
        }

        // deliver last tick's broadcasts
        let positions: BTreeMap<AgentId, Vec2> =
            self.agents.iter().filter(|a| !a.removed).map(|a| (a.id, a.body.true_pose().position)).collect();
        let report = self.mesh.deliver(&positions).unwrap_or_else(|e| {
            warn!("tick {k}: delivery failed: {e}");
            Default::default()
        });
        let staleness = self.config.network.staleness;
        let mut delivered = 0;
        for d in &report.deliveries {
            if self.isolate.contains(&d.receiver) {
                continue;
            }
            if let Some(i) = self.agent_index(d.receiver) {
                self.agents[i].receive(d.message.payload, k);
                delivered += 1;
            }
        }
        for a in &mut self.agents {
            a.forget_older_than(k, staleness);
        }

        // sense and decide, each agent on its own data
        let thoughts = self.think_all(k, dt);

        for t in thoughts.iter().flatten() {
            self.mesh.broadcast(&t.broadcast);
        }

        let before: Vec<Pose> = self.agents.iter().map(|a| a.body.true_pose()).collect();
        let drive = |(a, t): (&mut Agent, &Option<Thought>)| {
            if let Some(t) = t {
                a.body.drive(&t.command, dt);
            }
        };
        if self.parallel {
            self.agents.par_iter_mut().zip(thoughts.par_iter()).for_each(drive);
        } else {
            self.agents.iter_mut().zip(thoughts.iter()).for_each(drive);
        }

        self.sent_total += report.sent as u64;
        self.delivered_total += delivered as u64;
        let record = self.record_tick(k, Some((&thoughts, &before)), report.sent, delivered, report.links);
        self.tick = k;
        self.check_termination(&record);
        self.records.push(record);
        if self.termination.is_none() && k >= self.config.run.max_ticks {
            self.termination = Some(Termination::MaxTicks);
        }
        self.records.last()
    }

    fn think_all(&mut self, k: u64, dt: f64) -> Vec<Option<Thought>> {
        let think = |a: &mut Agent| (!a.removed).then(|| a.think(k, dt));
        if self.parallel {
            return self.agents.par_iter_mut().map(think).collect();
        }
        match self.order_rng.as_mut() {
            None => self.agents.iter_mut().map(think).collect(),
            Some(rng) => {
                let mut order: Vec<usize> = (0..self.agents.len()).collect();
                order.shuffle(rng);
                let mut out: Vec<Option<Thought>> = vec![None; self.agents.len()];
                for i in order {
                    out[i] = think(&mut self.agents[i]);
                }
                out
            }
        }
    }

    fn apply(&mut self, k: u64, event: Event) {
        info!("tick {k}: {event:?}");
        let agent = |engine: &mut Engine, id: AgentId| -> Option<usize> {
            let i = engine.agent_index(id);
            match i {
                Some(i) if engine.agents[i].removed => {
                    warn!("tick {k}: event for removed agent {id} ignored");
                    None
                }
                None => {
                    warn!("tick {k}: event for unknown agent {id} ignored");
                    None
                }
                Some(i) => Some(i),
            }
        };
        match event {
            Event::RemoveAgent(id) => {
                if let Some(i) = agent(self, id) {
                    self.agents[i].removed = true;
                }
            }
            Event::SetLeader { id, heading_degrees } => {
                if let Some(i) = agent(self, id) {
                    let a = &mut self.agents[i];
                    a.pinned = Some(heading_degrees.map(Heading::from_degrees).unwrap_or(a.body.true_pose().heading));
                    a.flags.leader = true;
                }
            }
            Event::DegradeAgent(id) => {
                if let Some(i) = agent(self, id) {
                    let a = &mut self.agents[i];
                    a.body.set_speed_factor(0.5);
                    a.flags.degraded = true;
                }
            }
            Event::SetP0 { p0, ids } => {
                for a in &mut self.agents {
                    if ids.as_ref().is_none_or(|ids| ids.contains(&a.id)) {
                        a.spec.p0 = p0;
                    }
                }
            }
            Event::SetCommRange(r) => self.mesh.set_comm_range(r),
        }
    }

    fn record_tick(
        &self,
        tick: u64,
        step: Option<(&[Option<Thought>], &[Pose])>,
        sent: usize,
        delivered: usize,
        links: Option<Vec<crate::netsim::LinkOutcome>>,
    ) -> StepRecord {
        let dt = self.config.run.tick_duration;
        let agents = self
            .agents
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let pose = a.body.true_pose();
                let thought = step.and_then(|(t, _)| t[i].as_ref());
                let speed = step.map_or(0.0, |(_, before)| before[i].position.distance(pose.position) / dt);
                let phase = match (a.removed, step, thought) {
                    (true, _, _) => Phase::Removed,
                    (false, None, _) => Phase::Initial,
                    (false, Some(_), Some(t)) => t.phase,
                    (false, Some(_), None) => Phase::Fault,
                };
                AgentRecord {
                    id: a.id,
                    removed: a.removed,
                    pose,
                    sensed: thought.map(|t| t.sensed),
                    command: thought.map(|t| t.command),
                    speed,
                    phase,
                    target_found: a.target_found,
                }
            })
            .collect();
        StepRecord { tick, agents, sent, delivered, links: if self.config.network.verbose { Some(links.unwrap_or_default()) } else { None } }
    }

    fn check_termination(&mut self, record: &StepRecord) {
        let k = record.tick;
        if self.first_find.is_none() && record.active().any(|a| a.target_found.is_some()) {
            self.first_find = Some(k);
        }
        let reached = self.search_reached(record);
        if self.all_reach.is_none() && reached {
            self.all_reach = Some(k);
        }
        match self.config.run.termination {
            TerminationRule::None => {}
            TerminationRule::Consensus => {
                if heading_spread(record.active().map(|a| a.pose.heading)) < CONSENSUS_SPREAD {
                    self.consensus_streak += 1;
                } else {
                    self.consensus_streak = 0;
                }
                if self.consensus_streak >= CONSENSUS_HOLD_TICKS {
                    self.termination = Some(Termination::ConsensusReached);
                }
            }
            TerminationRule::Search => {
                if reached {
                    self.termination = Some(Termination::AllReachedTarget);
                }
            }
            TerminationRule::Arrival { fraction, radius_p0 } => {
                if self.arrived(record, fraction, radius_p0) {
                    self.termination = Some(Termination::AllReachedTarget);
                }
            }
        }
        if let Some(t) = self.termination {
            debug!("tick {k}: terminated with {t:?}");
        }
    }

    fn search_reached(&self, record: &StepRecord) -> bool {
        if self.world.lights.is_empty() {
            return false;
        }
        let mut any = false;
        for a in record.active() {
            any = true;
            let p0 = self.agents[a.id.0 as usize].spec.p0;
            let near = self.world.lights.iter().any(|l| l.center.distance(a.pose.position) <= SEARCH_REACH_P0 * p0);
            if a.target_found.is_none() || !near {
                return false;
            }
        }
        any
    }

    fn arrived(&self, record: &StepRecord, fraction: f64, radius_p0: f64) -> bool {
        let scripted: Vec<&Agent> = self.agents.iter().filter(|a| a.script.is_some() && !a.removed).collect();
        let Some(lead) = scripted.first() else {
            return false;
        };
        if !scripted.iter().all(|a| a.script_done()) {
            return false;
        }
        let end = *lead.script.as_ref().and_then(|s| s.waypoints.last()).expect("validated non-empty");
        let followers: Vec<&AgentRecord> = record
            .active()
            .filter(|r| {
                let a = &self.agents[r.id.0 as usize];
                a.script.is_none() && !a.frozen
            })
            .collect();
        let close = followers
            .iter()
            .filter(|r| r.pose.position.distance(end) <= radius_p0 * self.agents[r.id.0 as usize].spec.p0)
            .count();
        close as f64 >= fraction * followers.len() as f64
    }

    /// Runs until termination and returns the full log.
    pub fn run_to_end(mut self) -> RunResult {
        while self.step().is_some() {}
        self.into_result()
    }

    pub fn into_result(self) -> RunResult {
        let last = self.records.last().expect("tick 0 is always recorded");
        let positions: Vec<Vec2> = last.active().map(|a| a.pose.position).collect();
        let summary = Summary {
            ticks: self.tick,
            heading_order: heading_order(last.active().map(|a| a.pose.heading)),
            coverage_area: coverage_area(positions.iter().copied()),
            min_pairwise_distance: min_pairwise_distance(&positions),
            first_find_tick: self.first_find,
            all_reach_tick: self.all_reach,
            messages_sent: self.sent_total,
            messages_delivered: self.delivered_total,
        };
        RunResult {
            seed: self.config.seed,
            tick_duration: self.config.run.tick_duration,
            termination: self.termination.unwrap_or(Termination::MaxTicks),
            records: self.records,
            summary,
        }
    }
}

fn build_agent(config: &ScenarioConfig, world: &Arc<World>, setup: AgentSetup) -> Agent {
    let pose = Pose::new(setup.position, setup.heading);
    let rng = seeded_rng(config.seed, &format!("sense/{}", setup.id));
    let body = SimBody::new(Arc::clone(world), pose, rng);
    let mut agent = Agent::new(setup.id, setup.behavior, body);
    agent.frozen = setup.frozen;
    if setup.script.is_some() {
        agent.flags.leader = true;
    }
    agent.script = setup.script;
    agent
}

/// Largest angle between any heading and the mean heading, radians.
/// Infinite when the headings cancel out.
pub fn heading_spread(headings: impl IntoIterator<Item = Heading>) -> f64 {
    let hs: Vec<Heading> = headings.into_iter().collect();
    let sum: Vec2 = hs.iter().map(|h| h.vector()).sum();
    match crate::types::normalize(sum) {
        Ok(mean) => hs.iter().map(|h| h.angle_to(mean).abs()).fold(0.0, f64::max),
        Err(_) if hs.is_empty() => 0.0,
        Err(_) => f64::INFINITY,
    }
}
