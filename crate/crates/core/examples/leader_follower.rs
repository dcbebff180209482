//! One buoy is driven along a 400 m path and 45 others follow it. The second
//! run halves one follower's top speed partway through.
//!
//!     cargo run --release --example leader_follower

use swarmkit::engine::run;
use swarmkit::types::ScenarioConfig;

fn main() {
    for name in ["leader_follower_45.json", "leader_follower_45_degraded.json"] {
        let path = format!("{}/scenarios/{name}", env!("CARGO_MANIFEST_DIR"));
        let config = ScenarioConfig::from_path(path).unwrap();
        let script = config.agents.overrides[0].script.clone().unwrap();
        let end = *script.waypoints.last().unwrap();
        let result = run(config).unwrap();

        let last = result.last();
        let mut gaps: Vec<f64> = last.active().skip(1).map(|a| a.pose.position.distance(end)).collect();
        gaps.sort_by(f64::total_cmp);
        println!(
            "{name}: {} after {} s; followers {:.1} m (median) and {:.1} m (worst) from the end point",
            result.termination.as_str(),
            result.summary.ticks as f64 * result.tick_duration,
            gaps[gaps.len() / 2],
            gaps[gaps.len() - 1]
        );
    }
}
