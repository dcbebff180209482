//! Search for a light, then rendezvous on it, for growing swarm sizes. Runs
//! that never find it count as speed 0.
//!
//!     cargo run --release --example search_and_explore

use swarmkit::engine::run;
use swarmkit::metrics::mean;
use swarmkit::types::ScenarioConfig;

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/search_sweep.json");
    let text = std::fs::read_to_string(path).expect("bundled scenario");
    let base: serde_json::Value = serde_json::from_str(&text).unwrap();

    println!("{:>3} {:>6} {:>16} {:>16}", "n", "found", "mean first s", "speed 1/s");
    for n in [2, 4, 6, 8, 10] {
        let mut times = Vec::new();
        let mut speeds = Vec::new();
        for seed in 1..=10u64 {
            let mut doc = base.clone();
            doc["agents"]["n_agents"] = n.into();
            doc["seed"] = seed.into();
            let result = run(ScenarioConfig::from_value(doc).unwrap()).unwrap();
            match result.summary.first_find_tick {
                Some(t) => {
                    let secs = t as f64 * result.tick_duration;
                    times.push(secs);
                    speeds.push(1.0 / secs);
                }
                None => speeds.push(0.0),
            }
        }
        println!("{n:>3} {:>6} {:>16.1} {:>16.5}", times.len(), mean(&times).unwrap_or(f64::NAN), mean(&speeds).unwrap());
    }
}
