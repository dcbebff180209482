use std::fmt::Write as _;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::engine::{RunResult, StepRecord};
use crate::metrics::{bin_links, convergence_speed, coverage_area, heading_order, min_pairwise_distance};
use crate::types::{ScenarioConfig, Vec2};

pub const TRAJECTORY_HEADER: &str = "tick,agent,x,y,hx,hy,speed,phase";
pub const METRICS_HEADER: &str =
    "tick,heading_order,coverage_area,min_pairwise_distance,mean_speed,found_fraction,active_agents,sent,delivered";
pub const COMM_HEADER: &str = "lower_m,upper_m,trials,delivered,ratio,insufficient";

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// SHA-256 of the effective configuration's canonical JSON.
pub fn config_hash(config: &ScenarioConfig) -> String {
    let digest = Sha256::digest(config.to_json().as_bytes());
    digest.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

pub fn trajectory_csv(run: &RunResult) -> String {
    let mut out = String::from(TRAJECTORY_HEADER);
    out.push('\n');
    for r in &run.records {
        for a in &r.agents {
            let p = a.pose;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.tick,
                a.id,
                p.position.x,
                p.position.y,
                p.heading.x(),
                p.heading.y(),
                a.speed,
                a.phase
            );
        }
    }
    out
}

fn metrics_row(out: &mut String, r: &StepRecord) {
    let positions: Vec<Vec2> = r.active().map(|a| a.pose.position).collect();
    let n = positions.len();
    let mean_speed = if n == 0 { 0.0 } else { r.active().map(|a| a.speed).sum::<f64>() / n as f64 };
    let found = if n == 0 { 0.0 } else { r.active().filter(|a| a.target_found.is_some()).count() as f64 / n as f64 };
    let _ = writeln!(
        out,
        "{},{},{},{},{},{},{},{},{}",
        r.tick,
        heading_order(r.active().map(|a| a.pose.heading)),
        coverage_area(positions.iter().copied()),
        opt(min_pairwise_distance(&positions)),
        mean_speed,
        found,
        n,
        r.sent,
        r.delivered
    );
}

pub fn metrics_csv(run: &RunResult) -> String {
    let mut out = String::from(METRICS_HEADER);
    out.push('\n');
    for r in &run.records {
        metrics_row(&mut out, r);
    }
    out
}

/// Per-bin delivery ratios; empty body when no links were logged.
pub fn comm_csv(run: &RunResult) -> String {
    let mut out = String::from(COMM_HEADER);
    out.push('\n');
    for b in bin_links(run.records.iter().filter_map(|r| r.links.as_ref()).flatten()) {
        let _ = writeln!(out, "{},{},{},{},{},{}", b.lower, b.upper, b.trials, b.delivered, b.ratio, b.insufficient);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub termination: &'static str,
    pub seed: u64,
    pub config_hash: String,
    pub n_agents: usize,
    pub active_agents: usize,
    pub ticks: u64,
    pub tick_duration: f64,
    pub heading_order: f64,
    pub coverage_area: f64,
    pub min_pairwise_distance: Option<f64>,
    pub first_find_tick: Option<u64>,
    pub all_reach_tick: Option<u64>,
    /// Inverse seconds until the first agent knew the target.
    pub speed_first_find: Option<f64>,
    /// Inverse seconds until the whole swarm reached it.
    pub speed_all_reach: Option<f64>,
    pub messages_sent: u64,
    pub messages_delivered: u64,
}

impl RunSummary {
    pub fn new(config: &ScenarioConfig, run: &RunResult) -> Self {
        let s = &run.summary;
        RunSummary {
            termination: run.termination.as_str(),
            seed: config.seed,
            config_hash: config_hash(config),
            n_agents: config.n_agents(),
            active_agents: run.last().active().count(),
            ticks: s.ticks,
            tick_duration: run.tick_duration,
            heading_order: s.heading_order,
            coverage_area: s.coverage_area,
            min_pairwise_distance: s.min_pairwise_distance,
            first_find_tick: s.first_find_tick,
            all_reach_tick: s.all_reach_tick,
            speed_first_find: s.first_find_tick.and_then(|t| convergence_speed(t, run.tick_duration)),
            speed_all_reach: s.all_reach_tick.and_then(|t| convergence_speed(t, run.tick_duration)),
            messages_sent: s.messages_sent,
            messages_delivered: s.messages_delivered,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("summary always serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Ok,
    Timeout,
    Error,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Ok => "ok",
            RunStatus::Timeout => "timeout",
            RunStatus::Error => "error",
        }
    }
}

/// One run of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n_agents: usize,
    pub seed: u64,
    pub status: RunStatus,
    pub ticks: Option<u64>,
    pub first_find_tick: Option<u64>,
    pub all_reach_tick: Option<u64>,
    pub tick_duration: f64,
}

impl SweepRow {
    pub fn speed_first_find(&self) -> Option<f64> {
        self.first_find_tick.and_then(|t| convergence_speed(t, self.tick_duration))
    }

    pub fn speed_all_reach(&self) -> Option<f64> {
        self.all_reach_tick.and_then(|t| convergence_speed(t, self.tick_duration))
    }
}

/// Speed for a run that may never have got there; a tick-0 event has no
/// finite speed and is skipped.
pub fn speed_or_zero(tick: Option<u64>, tick_duration: f64) -> Option<f64> {
    match tick {
        None => Some(0.0),
        Some(t) => convergence_speed(t, tick_duration),
    }
}

pub const SWEEP_HEADER: &str = "kind,n_agents,seed,status,ticks,first_find_tick,all_reach_tick,first_find_s,all_reach_s,\
speed_first_find,speed_all_reach,runs,timeouts,errors,mean_speed_first_find,var_speed_first_find,std_speed_first_find,\
mean_speed_all_reach,var_speed_all_reach,std_speed_all_reach";

/// Per-run rows followed by one aggregate row per swarm size. A run that
/// never found (or never reached) the target contributes speed 0, the inverse
/// of an unbounded time. Failed runs are counted but left out of the means.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    use crate::metrics::{mean, std_dev, variance};
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        let secs = |t: Option<u64>| t.map(|t| t as f64 * r.tick_duration);
        let _ = writeln!(
            out,
            "run,{},{},{},{},{},{},{},{},{},{},,,,,,,,,",
            r.n_agents,
            r.seed,
            r.status.as_str(),
            opt(r.ticks),
            opt(r.first_find_tick),
            opt(r.all_reach_tick),
            opt(secs(r.first_find_tick)),
            opt(secs(r.all_reach_tick)),
            opt(r.speed_first_find()),
            opt(r.speed_all_reach()),
        );
    }
    let mut sizes: Vec<usize> = rows.iter().map(|r| r.n_agents).collect();
    sizes.sort_unstable();
    sizes.dedup();
    for n in sizes {
        let group: Vec<&SweepRow> = rows.iter().filter(|r| r.n_agents == n).collect();
        let done: Vec<&&SweepRow> = group.iter().filter(|r| r.status != RunStatus::Error).collect();
        let first: Vec<f64> = done.iter().filter_map(|r| speed_or_zero(r.first_find_tick, r.tick_duration)).collect();
        let all: Vec<f64> = done.iter().filter_map(|r| speed_or_zero(r.all_reach_tick, r.tick_duration)).collect();
        let _ = writeln!(
            out,
            "aggregate,{n},,,,,,,,,,{},{},{},{},{},{},{},{},{}",
            group.len(),
            group.iter().filter(|r| r.status == RunStatus::Timeout).count(),
            group.iter().filter(|r| r.status == RunStatus::Error).count(),
            opt(mean(&first)),
            opt(variance(&first)),
            opt(std_dev(&first)),
            opt(mean(&all)),
            opt(variance(&all)),
            opt(std_dev(&all)),
        );
    }
    out
}
