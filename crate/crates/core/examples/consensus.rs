//! Ten robots agree on a heading; at t = 22 s one of them is pinned to 90°
//! and drags the rest along.
//!
//!     cargo run --example consensus

use swarmkit::engine::run;
use swarmkit::metrics::heading_order;
use swarmkit::types::ScenarioConfig;

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/consensus_10.json");
    let config = ScenarioConfig::from_path(path).expect("bundled scenario");
    let result = run(config).expect("valid scenario");

    println!("{:>5} {:>8} {:>10}", "tick", "order", "mean deg");
    for r in result.records.iter().filter(|r| r.tick % 20 == 0 || r.tick < 8) {
        let order = heading_order(r.active().map(|a| a.pose.heading));
        let sum = r.active().fold((0.0, 0.0), |(x, y), a| (x + a.pose.heading.x(), y + a.pose.heading.y()));
        println!("{:>5} {:>8.5} {:>10.2}", r.tick, order, sum.1.atan2(sum.0).to_degrees());
    }
}
