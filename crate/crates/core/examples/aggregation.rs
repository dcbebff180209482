//! 45 buoys hold a loose formation at p0 = 50 m; at tick 400 p0 drops to 5 m
//! and the group pulls together.
//!
//!     cargo run --release --example aggregation

use swarmkit::engine::run;
use swarmkit::metrics::{coverage_area, min_pairwise_distance};
use swarmkit::types::{ScenarioConfig, Vec2};

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/aggregation_45.json");
    let result = run(ScenarioConfig::from_path(path).unwrap()).unwrap();
    println!("{:>5} {:>12} {:>10}", "tick", "hull m2", "closest m");
    for r in result.records.iter().step_by(50) {
        let pts: Vec<Vec2> = r.active().map(|a| a.pose.position).collect();
        println!("{:>5} {:>12.1} {:>10.2}", r.tick, coverage_area(pts.iter().copied()), min_pairwise_distance(&pts).unwrap());
    }
}
