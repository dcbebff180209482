use std::collections::BTreeMap;

use log::warn;

use super::Phase;
use crate::behaviors::{
    consensus_step, exploration_step, leader_follower_goal, perimeter_step, search_and_explore_step, BehaviorError,
    LeaderGoal, MotionCommand, Neighbor, NeighborView, SearchPhase,
};
use crate::bodysim::{Body, Pose, SimBody};
use crate::types::config::Script;
use crate::types::{normalize, AgentId, AgentState, BehaviorKind, BehaviorSpec, Goal, Heading, RoleFlags, Vec2};

/// What one agent decided during the sense and compute phases.
#[derive(Debug, Clone)]
pub(super) struct Thought {
    pub sensed: Pose,
    pub command: MotionCommand,
    pub phase: Phase,
    pub broadcast: AgentState,
}

/// Engine-side bookkeeping for one agent: its body, behavior and mailbox.
#[derive(Debug, Clone)]
pub(super) struct Agent {
    pub id: AgentId,
    pub spec: BehaviorSpec,
    pub body: SimBody,
    pub flags: RoleFlags,
    pub target_found: Option<Vec2>,
    pub removed: bool,
    pub frozen: bool,
    pub script: Option<Script>,
    pub next_waypoint: usize,
    pub pinned: Option<Heading>,
    last_speed: f64,
    last_leader_pos: Option<Vec2>,
    /// Freshest state per sender and the tick it arrived.
    inbox: BTreeMap<AgentId, (AgentState, u64)>,
}

impl Agent {
    pub fn new(id: AgentId, spec: BehaviorSpec, body: SimBody) -> Self {
        Agent {
            id,
            spec,
            body,
            flags: RoleFlags::default(),
            target_found: None,
            removed: false,
            frozen: false,
            script: None,
            next_waypoint: 0,
            pinned: None,
            last_speed: 0.0,
            last_leader_pos: None,
            inbox: BTreeMap::new(),
        }
    }

    pub fn receive(&mut self, state: AgentState, tick: u64) {
        match self.inbox.get(&state.id) {
            Some((old, _)) if old.tick > state.tick => {}
            _ => {
                self.inbox.insert(state.id, (state, tick));
            }
        }
    }

    pub fn forget_older_than(&mut self, tick: u64, staleness: u64) {
        self.inbox.retain(|_, (_, received)| tick - *received <= staleness);
    }

    pub fn script_done(&self) -> bool {
        self.script.as_ref().is_some_and(|s| self.next_waypoint >= s.waypoints.len())
    }

    /// Senses, then computes a command from its own estimate and the mailbox.
    pub fn think(&mut self, tick: u64, dt: f64) -> Thought {
        let reading = self.body.sense();
        let own = AgentState {
            id: self.id,
            tick,
            position: reading.pose.position,
            heading: reading.pose.heading,
            speed: self.last_speed,
            target_found: self.target_found,
            flags: self.flags,
        };
        let view = NeighborView::new(
            self.id,
            self.inbox.values().map(|&(state, received)| Neighbor { state, age: tick - received }),
        );

        let (command, phase) = if self.frozen {
            (MotionCommand::hold(own.heading), Phase::Frozen)
        } else if self.script.is_some() {
            (self.follow_script(dt), Phase::Scripted)
        } else {
            match self.behave(&own, &view, reading.light, &reading.obstacle_points, dt) {
                Ok((cmd, phase)) => match self.pinned {
                    Some(h) => (MotionCommand::new(h, cmd.target_speed), Phase::Leader),
                    None => (cmd, phase),
                },
                Err(e) => {
                    warn!("tick {tick}: agent {} holds position: {e}", self.id);
                    (MotionCommand::hold(own.heading), Phase::Fault)
                }
            }
        };
        self.last_speed = command.target_speed;
        let broadcast = AgentState { speed: command.target_speed, target_found: self.target_found, ..own };
        Thought { sensed: reading.pose, command, phase, broadcast }
    }

    fn behave(
        &mut self,
        own: &AgentState,
        view: &NeighborView,
        light: Option<Vec2>,
        obstacles: &[Vec2],
        dt: f64,
    ) -> Result<(MotionCommand, Phase), BehaviorError> {
        let spec = &self.spec;
        match spec.kind {
            BehaviorKind::Consensus => Ok((consensus_step(own, view, spec), Phase::Consensus)),
            BehaviorKind::PerimeterDefense => Ok((perimeter_step(own, view, obstacles, spec)?, Phase::Perimeter)),
            BehaviorKind::Exploration => match spec.goal {
                Some(Goal::Leader(leader)) => {
                    let resolved = match leader_follower_goal(leader, view, self.last_leader_pos) {
                        LeaderGoal::Known(p) => {
                            self.last_leader_pos = Some(p);
                            BehaviorSpec { goal: Some(Goal::Point(p)), ..spec.clone() }
                        }
                        LeaderGoal::NoGoalYet => BehaviorSpec { h: 0, goal: None, ..spec.clone() },
                    };
                    Ok((exploration_step(own, view, &resolved, dt)?, Phase::Following))
                }
                _ => Ok((exploration_step(own, view, spec, dt)?, Phase::Exploration)),
            },
            BehaviorKind::SearchAndExplore => {
                let out = search_and_explore_step(own, view, light, obstacles, spec, dt)?;
                self.target_found = out.target_found;
                let phase = match out.phase {
                    SearchPhase::Searching => Phase::Searching,
                    SearchPhase::Rendezvous => Phase::Rendezvous,
                };
                Ok((out.command, phase))
            }
        }
    }

    /// Drives the scripted path from the true pose: scripted agents stand in
    /// for a human-piloted or preprogrammed vehicle.
    fn follow_script(&mut self, dt: f64) -> MotionCommand {
        let pose = self.body.true_pose();
        let script = self.script.as_ref().expect("caller checked for a script");
        while let Some(&w) = script.waypoints.get(self.next_waypoint) {
            let remaining = w - pose.position;
            match normalize(remaining) {
                Ok(h) if remaining.norm() > 1e-9 => {
                    return MotionCommand::new(h, script.speed.min(remaining.norm() / dt));
                }
                _ => self.next_waypoint += 1,
            }
        }
        MotionCommand::hold(pose.heading)
    }
}
