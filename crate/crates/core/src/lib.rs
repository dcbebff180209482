//! Swarm robotics toolkit: cooperative control rules for decentralized
//! robot swarms, plus a deterministic simulation harness built from the same
//! three pieces a real robot uses: a body, a network and a behavior.
//!
//! * [`types`]: geometry, agent snapshots, scenario configuration, seeded RNG.
//! * [`behaviors`]: consensus, perimeter defense, exploration / leader-follower
//!   and search-and-explore update rules.
//! * [`netsim`]: range-limited lossy broadcast mesh and the serial wire codec.
//! * [`bodysim`]: planar kinematic bodies, walls, range sensors, lights.
//! * [`engine`]: the synchronous per-tick update loop and run logs.
//! * [`metrics`]: heading order, coverage area, timing and link statistics.
//! * [`cli`]: scenario runner and parameter sweeps writing CSV/JSON outputs.

pub mod behaviors;
pub mod bodysim;
pub mod cli;
pub mod engine;
pub mod metrics;
pub mod netsim;
pub mod types;
