//! An intruder heads for a goal on the far side of a buoy cluster. The
//! cluster makes way when it can move; when it is fixed in place a large p0
//! sends the intruder around it and a small one lets it slip through.
//!
//!     cargo run --release --example avoidance

use swarmkit::engine::run;
use swarmkit::metrics::convex_hull;
use swarmkit::types::{AgentId, ScenarioConfig, Vec2};

fn inside(hull: &[Vec2], p: Vec2) -> bool {
    (0..hull.len()).all(|i| (hull[(i + 1) % hull.len()] - hull[i]).cross(p - hull[i]) > 0.0)
}

fn main() {
    let intruder = AgentId(25);
    for name in ["yield", "around", "through"] {
        let path = format!("{}/scenarios/avoidance_{name}.json", env!("CARGO_MANIFEST_DIR"));
        let result = run(ScenarioConfig::from_path(path).unwrap()).unwrap();
        let hull = convex_hull(result.records[0].active().filter(|a| a.id != intruder).map(|a| a.pose.position));
        let track: Vec<Vec2> = result.records.iter().map(|r| r.agent(intruder).unwrap().pose.position).collect();
        let goal = Vec2::new(-450.0, 450.0);
        println!(
            "{name:>8}: {} ticks inside the cluster, closest approach to goal {:.1} m",
            track.iter().filter(|&&p| inside(&hull, p)).count(),
            track.iter().map(|p| p.distance(goal)).fold(f64::INFINITY, f64::min)
        );
    }
}
