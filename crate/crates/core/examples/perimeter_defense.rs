//! Perimeter defense in the 13.5 m x 6.2 m arena: a tight cluster spreads
//! until the robots line the walls, for 5, 7, 8 and 10 robots.
//!
//!     cargo run --release --example perimeter_defense

use swarmkit::engine::run;
use swarmkit::metrics::{coverage_area, min_pairwise_distance};
use swarmkit::types::{ScenarioConfig, Vec2};

fn main() {
    for n in [5, 7, 8, 10] {
        let path = format!("{}/scenarios/perimeter_{n}.json", env!("CARGO_MANIFEST_DIR"));
        let result = run(ScenarioConfig::from_path(path).expect("bundled scenario")).expect("valid scenario");
        let at = |tick: usize| -> Vec<Vec2> { result.records[tick].active().map(|a| a.pose.position).collect() };
        let (first, last) = (at(0), at(result.records.len() - 1));
        println!(
            "N={n:>2}: closest pair {:.2} m -> {:.2} m, hull {:.1} m2 -> {:.1} m2",
            min_pairwise_distance(&first).unwrap(),
            min_pairwise_distance(&last).unwrap(),
            coverage_area(first),
            coverage_area(last)
        );
        for a in result.last().active() {
            println!("    robot {:>2} at ({:5.2}, {:4.2})", a.id, a.pose.position.x, a.pose.position.y);
        }
    }
}
