//! Observables computed from run logs: heading order, coverage area, event
//! times, delivery statistics, and the small amount of statistics needed to
//! aggregate them over seeds.

mod stats;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{RunResult, StepRecord};
use crate::netsim::LinkOutcome;
use crate::types::{Heading, Vec2};

pub use stats::{mean, spearman, std_dev, variance};

/// Width of a distance bin in [`comm_stats`], meters.
pub const COMM_BIN_WIDTH: f64 = 10.0;
/// Bins with fewer trials than this are flagged.
pub const MIN_BIN_TRIALS: usize = 100;

/// `|Σ θ̂_i| / N`: 1 when aligned, 0 when the headings cancel. Empty input gives 0.
pub fn heading_order(headings: impl IntoIterator<Item = Heading>) -> f64 {
    let mut sum = Vec2::ZERO;
    let mut n = 0usize;
    for h in headings {
        sum += h.vector();
        n += 1;
    }
    if n == 0 {
        return 0.0;
    }
    sum.norm() / n as f64
}

/// Counter-clockwise hull vertices (monotone chain), collinear points dropped.
pub fn convex_hull(points: impl IntoIterator<Item = Vec2>) -> Vec<Vec2> {
    let mut pts: Vec<Vec2> = points.into_iter().collect();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let turn = |o: Vec2, a: Vec2, b: Vec2| (a - o).cross(b - o);
    let mut hull: Vec<Vec2> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Vec2>> = if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Area of the convex hull of the positions; 0 for fewer than three
/// non-collinear points.
pub fn coverage_area(points: impl IntoIterator<Item = Vec2>) -> f64 {
    let hull = convex_hull(points);
    if hull.len() < 3 {
        return 0.0;
    }
    let twice: f64 = (0..hull.len()).map(|i| hull[i].cross(hull[(i + 1) % hull.len()])).sum();
    twice.abs() / 2.0
}

/// Smallest distance between any two points; `None` for fewer than two.
pub fn min_pairwise_distance(points: &[Vec2]) -> Option<f64> {
    let mut best: Option<f64> = None;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            let d = a.distance(*b);
            best = Some(best.map_or(d, |m: f64| m.min(d)));
        }
    }
    best
}

/// First recorded tick at which `predicate` holds.
pub fn time_to_event(run: &RunResult, mut predicate: impl FnMut(&StepRecord) -> bool) -> Option<u64> {
    run.records.iter().find(|r| predicate(r)).map(|r| r.tick)
}

/// `1 / (ticks · tick_duration)`; `None` for an event at tick 0.
pub fn convergence_speed(ticks: u64, tick_duration: f64) -> Option<f64> {
    (ticks > 0).then(|| 1.0 / (ticks as f64 * tick_duration))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommBin {
    /// Inclusive lower edge, meters.
    pub lower: f64,
    /// Exclusive upper edge, meters.
    pub upper: f64,
    pub trials: usize,
    pub delivered: usize,
    pub ratio: f64,
    /// Fewer than [`MIN_BIN_TRIALS`] trials; the ratio is not trustworthy.
    pub insufficient: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CommStatsError {
    #[error("the run was recorded without per-link outcomes; enable verbose networking")]
    NotVerbose,
}

/// Delivery ratio per 10 m distance bin over every logged link attempt.
/// Only populated bins are returned, nearest first.
pub fn comm_stats(run: &RunResult) -> Result<Vec<CommBin>, CommStatsError> {
    let mut any = false;
    let links = run.records.iter().filter_map(|r| r.links.as_ref()).inspect(|_| any = true).flatten();
    let bins = bin_links(links);
    if !any {
        return Err(CommStatsError::NotVerbose);
    }
    Ok(bins)
}

/// [`comm_stats`] over any stream of link outcomes.
pub fn bin_links<'a>(links: impl IntoIterator<Item = &'a LinkOutcome>) -> Vec<CommBin> {
    let mut counts: std::collections::BTreeMap<u64, (usize, usize)> = Default::default();
    for l in links {
        let e = counts.entry((l.distance / COMM_BIN_WIDTH).floor() as u64).or_default();
        e.0 += 1;
        e.1 += usize::from(l.delivered);
    }
    counts
        .into_iter()
        .map(|(b, (trials, delivered))| CommBin {
            lower: b as f64 * COMM_BIN_WIDTH,
            upper: (b + 1) as f64 * COMM_BIN_WIDTH,
            trials,
            delivered,
            ratio: delivered as f64 / trials as f64,
            insufficient: trials < MIN_BIN_TRIALS,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("sample at tick {tick} does not follow tick {last}")]
pub struct NonIncreasingTick {
    pub tick: u64,
    pub last: u64,
}

/// A named time series with strictly increasing ticks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSeries {
    pub name: String,
    samples: Vec<(u64, f64)>,
}

impl MetricSeries {
    pub fn new(name: impl Into<String>) -> Self {
        MetricSeries { name: name.into(), samples: Vec::new() }
    }

    pub fn push(&mut self, tick: u64, value: f64) -> Result<(), NonIncreasingTick> {
        if let Some(&(last, _)) = self.samples.last() {
            if tick <= last {
                return Err(NonIncreasingTick { tick, last });
            }
        }
        self.samples.push((tick, value));
        Ok(())
    }

    pub fn samples(&self) -> &[(u64, f64)] {
        &self.samples
    }

    pub fn last(&self) -> Option<f64> {
        self.samples.last().map(|s| s.1)
    }
}
