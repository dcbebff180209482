use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

use super::NetError;

/// One measured density regime: success rate versus sender/receiver distance
/// for a swarm of `n` agents with mean nearest-neighbor distance
/// `mean_nn_distance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossRow {
    pub n: usize,
    pub mean_nn_distance: f64,
    /// `(distance m, success probability)` sorted by distance.
    pub points: Vec<(f64, f64)>,
}

impl LossRow {
    /// Piecewise-linear in distance, clamped to the end values.
    pub fn interpolate(&self, distance: f64) -> f64 {
        let pts = &self.points;
        let (first, last) = (pts[0], pts[pts.len() - 1]);
        if distance <= first.0 {
            return first.1;
        }
        if distance >= last.0 {
            return last.1;
        }
        let i = pts.partition_point(|&(d, _)| d <= distance);
        let (d0, p0) = pts[i - 1];
        let (d1, p1) = pts[i];
        p0 + (p1 - p0) * (distance - d0) / (d1 - d0)
    }
}

/// Field-measured pairwise delivery rates between XBee-equipped buoys at two
/// swarm densities.
pub fn measured_loss_table() -> Vec<LossRow> {
    vec![
        LossRow { n: 20, mean_nn_distance: 19.5, points: vec![(10.0, 0.96), (40.0, 0.91), (80.0, 0.88), (120.0, 0.84)] },
        LossRow { n: 40, mean_nn_distance: 6.9, points: vec![(10.0, 0.89), (40.0, 0.86), (80.0, 0.81), (160.0, 0.66)] },
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossMode {
    #[default]
    On,
    Off,
}

fn default_range() -> f64 {
    310.0
}

fn default_ttl() -> u32 {
    3
}

fn default_staleness() -> u64 {
    5
}

/// Communication range, relaying and the loss model of the broadcast mesh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkModel {
    /// Meters; nothing is delivered beyond it.
    #[serde(default = "default_range")]
    pub comm_range: f64,
    #[serde(default)]
    pub loss: LossMode,
    /// Re-broadcast received messages, up to `ttl` extra hops.
    #[serde(default)]
    pub relay: bool,
    #[serde(default = "default_ttl")]
    pub ttl: u32,
    /// Replaces the measured table when set.
    #[serde(default)]
    pub loss_table: Option<Vec<LossRow>>,
    /// Swarm size used to pick the table row instead of the live agent count.
    #[serde(default)]
    pub table_n: Option<usize>,
    /// Received states older than this many ticks are forgotten.
    #[serde(default = "default_staleness")]
    pub staleness: u64,
    /// Log every sender/receiver delivery attempt.
    #[serde(default)]
    pub verbose: bool,
}

impl Default for NetworkModel {
    fn default() -> Self {
        NetworkModel {
            comm_range: default_range(),
            loss: LossMode::On,
            relay: false,
            ttl: default_ttl(),
            loss_table: None,
            table_n: None,
            staleness: default_staleness(),
            verbose: false,
        }
    }
}

impl NetworkModel {
    pub fn lossless(comm_range: f64) -> Self {
        NetworkModel { comm_range, loss: LossMode::Off, ..Default::default() }
    }

    pub fn loss_enabled(&self) -> bool {
        self.loss == LossMode::On
    }

    pub fn table(&self) -> &[LossRow] {
        static MEASURED: LazyLock<Vec<LossRow>> = LazyLock::new(measured_loss_table);
        match &self.loss_table {
            Some(rows) => rows,
            None => &MEASURED,
        }
    }

    /// Relaying with a zero hop budget is the same as no relaying.
    pub fn relay_hops(&self) -> u32 {
        if self.relay {
            self.ttl
        } else {
            0
        }
    }

    pub fn check(&self) -> Result<(), String> {
        if !(self.comm_range >= 0.0 && self.comm_range.is_finite()) {
            return Err(format!("comm_range must be non-negative, got {}", self.comm_range));
        }
        if let Some(rows) = &self.loss_table {
            if rows.is_empty() && self.loss_enabled() {
                return Err("loss_table is empty while loss is on".into());
            }
            for row in rows {
                if row.points.is_empty() {
                    return Err(format!("loss_table row n={} has no points", row.n));
                }
                let mut prev: Option<(f64, f64)> = None;
                for &(d, p) in &row.points {
                    if !(d >= 0.0 && d.is_finite()) {
                        return Err(format!("loss_table row n={}: bad distance {d}", row.n));
                    }
                    if !(0.0..=1.0).contains(&p) {
                        return Err(format!("loss_table row n={}: probability {p} outside [0, 1]", row.n));
                    }
                    if let Some((pd, pp)) = prev {
                        if d <= pd {
                            return Err(format!("loss_table row n={}: distances must increase", row.n));
                        }
                        if p > pp {
                            return Err(format!("loss_table row n={}: success must not increase with distance", row.n));
                        }
                    }
                    prev = Some((d, p));
                }
            }
        }
        Ok(())
    }
}

/// Probability that a broadcast reaches a receiver `distance` meters away in
/// a swarm of `n` agents.
///
/// Picks the table row whose swarm size is nearest to `n` (ties go to the
/// smaller swarm), interpolates linearly in distance, clamps outside the
/// tabulated span and returns 0 beyond the communication range. With loss off
/// every in-range receiver gets the message.
pub fn success_probability(model: &NetworkModel, distance: f64, n: usize) -> Result<f64, NetError> {
    if distance > model.comm_range {
        return Ok(0.0);
    }
    if !model.loss_enabled() {
        return Ok(1.0);
    }
    let table = model.table();
    let key = model.table_n.unwrap_or(n);
    let row = table
        .iter()
        .filter(|r| !r.points.is_empty())
        .min_by_key(|r| (r.n.abs_diff(key), r.n))
        .ok_or(NetError::EmptyModel)?;
    Ok(row.interpolate(distance))
}
