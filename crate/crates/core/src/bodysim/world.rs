use serde::{Deserialize, Serialize};

use crate::types::Vec2;

/// Axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rect {
    pub min: Vec2,
    pub max: Vec2,
}

impl Rect {
    pub fn new(min: Vec2, max: Vec2) -> Self {
        Rect { min, max }
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    /// Strictly inside, at least `margin` from every edge.
    pub fn contains_inner(&self, p: Vec2, margin: f64) -> bool {
        p.x > self.min.x + margin && p.x < self.max.x - margin && p.y > self.min.y + margin && p.y < self.max.y - margin
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn center(&self) -> Vec2 {
        (self.min + self.max) * 0.5
    }

    pub fn edges(&self) -> [Segment; 4] {
        let (a, b) = (self.min, self.max);
        let c = Vec2::new(b.x, a.y);
        let d = Vec2::new(a.x, b.y);
        [Segment::new(a, c), Segment::new(c, b), Segment::new(b, d), Segment::new(d, a)]
    }
}

/// A wall between two endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[Vec2; 2]", into = "[Vec2; 2]")]
pub struct Segment {
    pub a: Vec2,
    pub b: Vec2,
}

impl Segment {
    pub fn new(a: Vec2, b: Vec2) -> Self {
        Segment { a, b }
    }

    /// Where the path `p + t (q - p)`, `t ∈ [0, 1]`, first meets this
    /// segment. Parallel paths never hit.
    pub fn intersect(&self, p: Vec2, q: Vec2) -> Option<f64> {
        let r = q - p;
        let s = self.b - self.a;
        let denom = r.cross(s);
        if denom.abs() < 1e-15 {
            return None;
        }
        let ap = self.a - p;
        let t = ap.cross(s) / denom;
        let u = ap.cross(r) / denom;
        ((0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u)).then_some(t)
    }

    pub fn closest_point(&self, p: Vec2) -> Vec2 {
        let s = self.b - self.a;
        let len2 = s.norm_sq();
        if len2 == 0.0 {
            return self.a;
        }
        let t = ((p - self.a).dot(s) / len2).clamp(0.0, 1.0);
        self.a + s * t
    }
}

impl From<[Vec2; 2]> for Segment {
    fn from([a, b]: [Vec2; 2]) -> Self {
        Segment { a, b }
    }
}

impl From<Segment> for [Vec2; 2] {
    fn from(s: Segment) -> Self {
        [s.a, s.b]
    }
}

/// A target that agents can detect within `radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Light {
    pub center: Vec2,
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BodyKindName {
    DifferentialDrive,
    Holonomic,
}

/// Kinematic limits of a body.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BodyKind {
    /// Wheeled robot that must turn before it can drive somewhere.
    DifferentialDrive { max_speed: f64, max_turn_rate: f64 },
    /// Vectored thrust: direction changes are instantaneous.
    Holonomic { max_speed: f64 },
}

impl BodyKind {
    pub const EBOT_MAX_SPEED: f64 = 0.20;
    pub const EBOT_TURN_RATE: f64 = 2.0;
    pub const BUOY_MAX_SPEED: f64 = 1.0;

    pub fn max_speed(&self) -> f64 {
        match *self {
            BodyKind::DifferentialDrive { max_speed, .. } | BodyKind::Holonomic { max_speed } => max_speed,
        }
    }

    pub fn scaled(self, factor: f64) -> BodyKind {
        match self {
            BodyKind::DifferentialDrive { max_speed, max_turn_rate } => {
                BodyKind::DifferentialDrive { max_speed: max_speed * factor, max_turn_rate }
            }
            BodyKind::Holonomic { max_speed } => BodyKind::Holonomic { max_speed: max_speed * factor },
        }
    }
}

fn default_pos_sigma() -> f64 {
    0.01
}

fn default_heading_sigma() -> f64 {
    0.5
}

/// Standard deviations of the additive localization noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    /// Meters, per axis.
    #[serde(default = "default_pos_sigma")]
    pub position: f64,
    /// Degrees.
    #[serde(default = "default_heading_sigma")]
    pub heading_deg: f64,
}

impl NoiseConfig {
    pub const OFF: NoiseConfig = NoiseConfig { position: 0.0, heading_deg: 0.0 };
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig { position: default_pos_sigma(), heading_deg: default_heading_sigma() }
    }
}

fn default_sensor_range() -> f64 {
    0.8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyConfig {
    pub kind: BodyKindName,
    /// m/s; defaults to the platform value for the kind.
    #[serde(default)]
    pub max_speed: Option<f64>,
    /// rad/s, differential drive only.
    #[serde(default)]
    pub max_turn_rate: Option<f64>,
    #[serde(default)]
    pub noise: NoiseConfig,
    /// Meters reached by each range-finder ray.
    #[serde(default = "default_sensor_range")]
    pub sensor_range: f64,
}

impl BodyConfig {
    pub fn new(kind: BodyKindName) -> Self {
        BodyConfig { kind, max_speed: None, max_turn_rate: None, noise: NoiseConfig::default(), sensor_range: default_sensor_range() }
    }

    pub fn body_kind(&self) -> BodyKind {
        match self.kind {
            BodyKindName::DifferentialDrive => BodyKind::DifferentialDrive {
                max_speed: self.max_speed.unwrap_or(BodyKind::EBOT_MAX_SPEED),
                max_turn_rate: self.max_turn_rate.unwrap_or(BodyKind::EBOT_TURN_RATE),
            },
            BodyKindName::Holonomic => BodyKind::Holonomic { max_speed: self.max_speed.unwrap_or(BodyKind::BUOY_MAX_SPEED) },
        }
    }
}

/// The arena: bounds, interior walls, lights and the robots' body model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct World {
    pub bounds: Rect,
    #[serde(default)]
    pub walls: Vec<Segment>,
    #[serde(default)]
    pub lights: Vec<Light>,
    pub body: BodyConfig,
}

impl World {
    pub fn open(bounds: Rect, body: BodyConfig) -> Self {
        World { bounds, walls: Vec::new(), lights: Vec::new(), body }
    }

    /// Interior walls followed by the four boundary edges.
    pub fn all_walls(&self) -> impl Iterator<Item = Segment> + '_ {
        self.walls.iter().copied().chain(self.bounds.edges())
    }

    /// Smallest path fraction at which `p → q` meets any wall.
    pub fn first_hit(&self, p: Vec2, q: Vec2) -> Option<f64> {
        self.all_walls().filter_map(|w| w.intersect(p, q)).min_by(f64::total_cmp)
    }

    /// True when the straight segment between the points crosses an interior wall.
    pub fn occluded(&self, p: Vec2, q: Vec2) -> bool {
        self.walls.iter().any(|w| w.intersect(p, q).is_some())
    }

    pub fn check(&self) -> Result<(), String> {
        let b = self.bounds;
        if !(b.min.is_finite() && b.max.is_finite() && b.width() > 0.0 && b.height() > 0.0) {
            return Err("world bounds must be a non-empty finite rectangle".into());
        }
        for (i, w) in self.walls.iter().enumerate() {
            if !(b.contains(w.a) && b.contains(w.b)) {
                return Err(format!("wall {i} lies outside the bounds"));
            }
        }
        for (i, l) in self.lights.iter().enumerate() {
            if !b.contains(l.center) {
                return Err(format!("light {i} lies outside the bounds"));
            }
            if !(l.radius > 0.0 && l.radius.is_finite()) {
                return Err(format!("light {i} needs a positive detection radius"));
            }
        }
        let kind = self.body.body_kind();
        if !(kind.max_speed() > 0.0 && kind.max_speed().is_finite()) {
            return Err("body max_speed must be positive".into());
        }
        if let BodyKind::DifferentialDrive { max_turn_rate, .. } = kind {
            if !(max_turn_rate > 0.0 && max_turn_rate.is_finite()) {
                return Err("body max_turn_rate must be positive".into());
            }
        }
        let n = self.body.noise;
        if !(n.position >= 0.0 && n.heading_deg >= 0.0 && n.position.is_finite() && n.heading_deg.is_finite()) {
            return Err("noise sigmas must be non-negative".into());
        }
        if !(self.body.sensor_range > 0.0 && self.body.sensor_range.is_finite()) {
            return Err("sensor_range must be positive".into());
        }
        Ok(())
    }
}
