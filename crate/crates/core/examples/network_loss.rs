//! Delivery ratio against distance for the measured buoy radio model, first
//! straight from the mesh and then from the link log of a full run.
//!
//!     cargo run --release --example network_loss

use std::collections::BTreeMap;

use swarmkit::engine::run;
use swarmkit::metrics::comm_stats;
use swarmkit::netsim::{Mesh, NetworkModel};
use swarmkit::types::{AgentId, AgentState, Heading, ScenarioConfig, Vec2};

fn main() {
    let model = NetworkModel { table_n: Some(40), ..NetworkModel::default() };
    let mut mesh = Mesh::new(model, 3);
    let sender = AgentState::new(AgentId(0), Vec2::ZERO, Heading::EAST);
    for d in [10.0, 40.0, 80.0, 120.0, 160.0, 300.0, 320.0] {
        let positions = BTreeMap::from([(AgentId(0), Vec2::ZERO), (AgentId(1), Vec2::new(d, 0.0))]);
        let mut ok = 0;
        for _ in 0..5000 {
            mesh.broadcast(&sender);
            ok += mesh.deliver(&positions).unwrap().deliveries.len();
        }
        println!("{d:>5} m: {:.3}", ok as f64 / 5000.0);
    }

    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/aggregation_45.json");
    let mut config = ScenarioConfig::from_path(path).unwrap();
    config.network.verbose = true;
    config.run.max_ticks = 100;
    config.events.clear();
    let result = run(config).unwrap();
    println!("\nlink log of 100 ticks of aggregation_45:");
    for bin in comm_stats(&result).unwrap().iter().filter(|b| b.trials > 0) {
        let note = if bin.insufficient { " (few trials)" } else { "" };
        println!("{:>4}-{:<4} m {:>7} trials {:.3}{note}", bin.lower, bin.upper, bin.trials, bin.ratio);
    }
}
