use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{BodyKind, NoiseConfig, World};
use crate::behaviors::MotionCommand;
use crate::types::{Heading, SimRng, Vec2};

/// Gap kept between a body and any wall it runs into, in meters.
pub const WALL_STANDOFF: f64 = 0.01;
pub const RAY_COUNT: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub position: Vec2,
    pub heading: Heading,
}

impl Pose {
    pub fn new(position: Vec2, heading: Heading) -> Self {
        Pose { position, heading }
    }
}

/// Advances a body by one tick under `command`.
///
/// Holonomic bodies snap to the target heading and travel along it.
/// Differential-drive bodies turn toward it by at most `max_turn_rate * dt`
/// and only drive forward by the cosine of what is left of the heading error.
/// Motion that would cross a wall ends [`WALL_STANDOFF`] short of it.
pub fn step_body(kind: BodyKind, pose: Pose, command: &MotionCommand, dt: f64, world: &World) -> Pose {
    let speed = command.target_speed.clamp(0.0, kind.max_speed());
    let (heading, travel) = match kind {
        BodyKind::Holonomic { .. } => (command.target_heading, speed * dt),
        BodyKind::DifferentialDrive { max_turn_rate, .. } => {
            let error = pose.heading.angle_to(command.target_heading);
            let limit = max_turn_rate * dt;
            let turn = error.clamp(-limit, limit);
            let heading = if turn == error { command.target_heading } else { pose.heading.rotate(turn) };
            let residual = error - turn;
            (heading, speed * dt * residual.cos().max(0.0))
        }
    };
    if !(travel > 0.0) {
        return Pose::new(pose.position, heading);
    }
    let dir = heading.vector();
    let goal = pose.position + dir * travel;
    let position = match world.first_hit(pose.position, goal) {
        Some(t) => pose.position + dir * (t * travel - WALL_STANDOFF).max(0.0),
        None => goal,
    };
    Pose::new(position, heading)
}

/// What a body reports about itself and its surroundings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorReading {
    /// Detected wall points in world coordinates, placed with the estimated pose.
    pub obstacle_points: Vec<Vec2>,
    /// Center of a detected light.
    pub light: Option<Vec2>,
    /// Estimated pose.
    pub pose: Pose,
}

/// One draw of localization error.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PoseNoise {
    pub dx: f64,
    pub dy: f64,
    /// Radians.
    pub dtheta: f64,
}

impl PoseNoise {
    pub const ZERO: PoseNoise = PoseNoise { dx: 0.0, dy: 0.0, dtheta: 0.0 };

    pub fn sample(config: &NoiseConfig, rng: &mut impl Rng) -> PoseNoise {
        fn draw(sigma: f64, rng: &mut impl Rng) -> f64 {
            if sigma > 0.0 {
                Normal::new(0.0, sigma).expect("sigma is positive and finite").sample(rng)
            } else {
                0.0
            }
        }
        let dx = draw(config.position, rng);
        let dy = draw(config.position, rng);
        let dtheta = draw(config.heading_deg.to_radians(), rng);
        PoseNoise { dx, dy, dtheta }
    }

    pub fn apply(&self, pose: Pose) -> Pose {
        if *self == PoseNoise::ZERO {
            return pose;
        }
        Pose::new(pose.position + Vec2::new(self.dx, self.dy), pose.heading.rotate(self.dtheta))
    }
}

/// Range-finder and light sensing from the true pose, reported through the
/// estimated pose `true pose + noise`.
///
/// Six rays at 60° spacing starting at the current heading, each reporting
/// its nearest wall hit within `sensor_range`. A light is seen when the body
/// is inside its detection radius and no interior wall blocks the line of
/// sight; the nearest such light wins. Pure: the same pose and noise give the
/// same reading.
pub fn sense(world: &World, pose: Pose, sensor_range: f64, noise: &PoseNoise) -> SensorReading {
    let estimate = noise.apply(pose);
    let mut obstacle_points = Vec::new();
    for k in 0..RAY_COUNT {
        let offset = k as f64 * (2.0 * PI / RAY_COUNT as f64);
        let dir = if k == 0 { pose.heading.vector() } else { pose.heading.vector().rotate(offset) };
        let end = pose.position + dir * sensor_range;
        if let Some(t) = world.first_hit(pose.position, end) {
            let range = t * sensor_range;
            let est_dir = if k == 0 { estimate.heading.vector() } else { estimate.heading.vector().rotate(offset) };
            obstacle_points.push(estimate.position + est_dir * range);
        }
    }
    let light = world
        .lights
        .iter()
        .filter(|l| l.center.distance(pose.position) <= l.radius && !world.occluded(pose.position, l.center))
        .min_by(|a, b| a.center.distance(pose.position).total_cmp(&b.center.distance(pose.position)))
        .map(|l| l.center);
    SensorReading { obstacle_points, light, pose: estimate }
}

/// The robot-side adapter: move, localize, sense. Swap the simulated body for
/// a hardware driver without touching behaviors or networking.
pub trait Body {
    /// Best estimate of the current pose.
    fn localize(&mut self) -> Pose;
    fn sense(&mut self) -> SensorReading;
    fn drive(&mut self, command: &MotionCommand, dt: f64);
}

/// Simulated body: point robot with kinematic limits inside a shared world.
#[derive(Debug, Clone)]
pub struct SimBody {
    world: Arc<World>,
    kind: BodyKind,
    pose: Pose,
    noise: NoiseConfig,
    sensor_range: f64,
    rng: SimRng,
    speed_factor: f64,
}

impl SimBody {
    pub fn new(world: Arc<World>, pose: Pose, rng: SimRng) -> Self {
        let kind = world.body.body_kind();
        let noise = world.body.noise;
        let sensor_range = world.body.sensor_range;
        SimBody { world, kind, pose, noise, sensor_range, rng, speed_factor: 1.0 }
    }

    pub fn true_pose(&self) -> Pose {
        self.pose
    }

    pub fn kind(&self) -> BodyKind {
        self.kind.scaled(self.speed_factor)
    }

    pub fn set_speed_factor(&mut self, factor: f64) {
        self.speed_factor = factor;
    }

    /// Turns the body in place, e.g. to pin a leader's heading.
    pub fn set_heading(&mut self, heading: Heading) {
        self.pose.heading = heading;
    }
}

impl Body for SimBody {
    fn localize(&mut self) -> Pose {
        PoseNoise::sample(&self.noise, &mut self.rng).apply(self.pose)
    }

    fn sense(&mut self) -> SensorReading {
        let noise = PoseNoise::sample(&self.noise, &mut self.rng);
        sense(&self.world, self.pose, self.sensor_range, &noise)
    }

    fn drive(&mut self, command: &MotionCommand, dt: f64) {
        self.pose = step_body(self.kind(), self.pose, command, dt, &self.world);
    }
}
