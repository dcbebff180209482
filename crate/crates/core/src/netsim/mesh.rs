use std::collections::{BTreeMap, HashSet};

use log::{debug, warn};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::codec::{decode, encode};
use super::{success_probability, NetError, NetworkModel};
use crate::types::{seeded_rng, AgentId, AgentState, SimRng, Vec2};

/// A state broadcast as it arrives at a receiver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub sender: AgentId,
    pub payload: AgentState,
    pub sent_tick: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Delivery {
    pub receiver: AgentId,
    pub message: Message,
    /// 0 for a direct reception, otherwise the number of relays traversed.
    pub hops: u32,
}

/// One attempted transmitter→receiver hop, logged in verbose mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkOutcome {
    pub transmitter: AgentId,
    pub receiver: AgentId,
    pub distance: f64,
    pub delivered: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DeliveryReport {
    /// Frames put on the air this round, relays included.
    pub sent: usize,
    pub deliveries: Vec<Delivery>,
    /// Frames that failed to decode and were dropped.
    pub corrupted: usize,
    /// Present only when the model is verbose.
    pub links: Option<Vec<LinkOutcome>>,
}

#[derive(Debug, Clone)]
struct Transmission {
    transmitter: AgentId,
    origin: AgentId,
    sent_tick: u64,
    hops: u32,
    hops_left: u32,
    frame: Vec<u8>,
}

/// Simulated metric-range broadcast medium.
///
/// Agents [`broadcast`](Mesh::broadcast) during a tick; the frames go out in
/// one serialized [`deliver`](Mesh::deliver) phase at the start of the next
/// tick. Every other live agent within range receives each frame
/// independently with the model's success probability, drawn from the
/// scenario's `"net"` stream.
#[derive(Debug, Clone)]
pub struct Mesh {
    model: NetworkModel,
    rng: SimRng,
    outbox: Vec<Transmission>,
    relayed: HashSet<(AgentId, AgentId, u64)>,
}

impl Mesh {
    pub fn new(model: NetworkModel, seed: u64) -> Self {
        Mesh { model, rng: seeded_rng(seed, "net"), outbox: Vec::new(), relayed: HashSet::new() }
    }

    pub fn model(&self) -> &NetworkModel {
        &self.model
    }

    pub fn set_comm_range(&mut self, range: f64) {
        self.model.comm_range = range;
    }

    /// Queues the agent's own state for delivery next round. Only the first
    /// broadcast per agent and tick is kept.
    pub fn broadcast(&mut self, state: &AgentState) {
        let dup = self.outbox.iter().any(|t| t.origin == state.id && t.transmitter == state.id && t.sent_tick == state.tick);
        if dup {
            warn!("agent {} broadcast twice in tick {}; keeping the first", state.id, state.tick);
            return;
        }
        self.outbox.push(Transmission {
            transmitter: state.id,
            origin: state.id,
            sent_tick: state.tick,
            hops: 0,
            hops_left: self.model.relay_hops(),
            frame: encode(state),
        });
    }

    pub fn pending(&self) -> usize {
        self.outbox.len()
    }

    /// Resolves every queued frame against the current agent positions.
    ///
    /// `positions` holds the live agents only; frames from agents missing
    /// there are discarded. Frames delivered with hop budget left are queued
    /// for one relay by each receiver.
    pub fn deliver(&mut self, positions: &BTreeMap<AgentId, Vec2>) -> Result<DeliveryReport, NetError> {
        let outbox = std::mem::take(&mut self.outbox);
        let n = positions.len();
        let mut report = DeliveryReport { links: self.model.verbose.then(Vec::new), ..Default::default() };
        let mut relays = Vec::new();
        let oldest = outbox.iter().map(|t| t.sent_tick).min();

        for tx in outbox {
            let Some(&from) = positions.get(&tx.transmitter) else {
                continue;
            };
            report.sent += 1;
            let payload = match decode(&tx.frame) {
                Ok(p) => p,
                Err(e) => {
                    debug!("dropping frame from {}: {e}", tx.transmitter);
                    report.corrupted += 1;
                    continue;
                }
            };
            let message = Message { sender: tx.origin, payload, sent_tick: tx.sent_tick };
            for (&rid, &pos) in positions {
                if rid == tx.transmitter || rid == tx.origin {
                    continue;
                }
                let distance = from.distance(pos);
                if distance > self.model.comm_range {
                    continue;
                }
                let p = success_probability(&self.model, distance, n)?;
                let delivered = self.rng.random::<f64>() < p;
                if let Some(links) = report.links.as_mut() {
                    links.push(LinkOutcome { transmitter: tx.transmitter, receiver: rid, distance, delivered });
                }
                if !delivered {
                    continue;
                }
                report.deliveries.push(Delivery { receiver: rid, message, hops: tx.hops });
                if tx.hops_left > 0 && self.relayed.insert((rid, tx.origin, tx.sent_tick)) {
                    relays.push(Transmission {
                        transmitter: rid,
                        origin: tx.origin,
                        sent_tick: tx.sent_tick,
                        hops: tx.hops + 1,
                        hops_left: tx.hops_left - 1,
                        frame: tx.frame.clone(),
                    });
                }
            }
        }

        if let Some(oldest) = oldest {
            let horizon = oldest.saturating_sub(u64::from(self.model.ttl) + 1);
            self.relayed.retain(|&(_, _, t)| t >= horizon);
        }
        self.outbox = relays;
        Ok(report)
    }
}

/// The agent-side network adapter: broadcast your own state, read what
/// others broadcast. No addressing, no neighbor discovery.
pub trait Network {
    fn broadcast(&mut self, state: &AgentState) -> std::io::Result<()>;
    /// Drains everything received since the last call. Corrupted frames are
    /// skipped.
    fn receive(&mut self) -> std::io::Result<Vec<AgentState>>;
}

/// [`Network`] over a byte stream pair, e.g. a radio module in transparent
/// serial mode: frames are written to `tx` and read line by line from `rx`.
pub struct FrameLink<R, W> {
    rx: R,
    tx: W,
    pub dropped: usize,
}

impl<R: std::io::BufRead, W: std::io::Write> FrameLink<R, W> {
    pub fn new(rx: R, tx: W) -> Self {
        FrameLink { rx, tx, dropped: 0 }
    }

    pub fn into_inner(self) -> (R, W) {
        (self.rx, self.tx)
    }
}

impl<R: std::io::BufRead, W: std::io::Write> Network for FrameLink<R, W> {
    fn broadcast(&mut self, state: &AgentState) -> std::io::Result<()> {
        self.tx.write_all(&encode(state))?;
        self.tx.flush()
    }

    fn receive(&mut self) -> std::io::Result<Vec<AgentState>> {
        let mut out = Vec::new();
        let mut line = Vec::new();
        loop {
            line.clear();
            if self.rx.read_until(b'\n', &mut line)? == 0 {
                break;
            }
            match decode(&line) {
                Ok(state) => out.push(state),
                Err(e) => {
                    debug!("serial link dropped a frame: {e}");
                    self.dropped += 1;
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netsim::LossMode;
    use crate::types::Heading;

    fn state(id: u32, tick: u64, x: f64) -> AgentState {
        let mut s = AgentState::new(AgentId(id), Vec2::new(x, 0.0), Heading::EAST);
        s.tick = tick;
        s
    }

    fn line(xs: &[f64]) -> BTreeMap<AgentId, Vec2> {
        xs.iter().enumerate().map(|(i, &x)| (AgentId(i as u32), Vec2::new(x, 0.0))).collect()
    }

    #[test]
    fn lossless_broadcast_reaches_everyone_once() {
        let mut mesh = Mesh::new(NetworkModel::lossless(100.0), 1);
        let pos = line(&[0.0, 10.0, 20.0]);
        mesh.broadcast(&state(0, 0, 0.0));
        mesh.broadcast(&state(0, 0, 0.0));
        let report = mesh.deliver(&pos).unwrap();
        let mut receivers: Vec<u32> = report.deliveries.iter().map(|d| d.receiver.0).collect();
        receivers.sort();
        assert_eq!(receivers, vec![1, 2]);
        assert!(report.deliveries.iter().all(|d| d.message.sender == AgentId(0) && d.message.payload == state(0, 0, 0.0)));
        assert_eq!(mesh.deliver(&pos).unwrap().deliveries.len(), 0);
    }

    #[test]
    fn out_of_range_never_receives() {
        let mut mesh = Mesh::new(NetworkModel::default(), 3);
        let pos = line(&[0.0, 311.0]);
        for t in 0..200 {
            mesh.broadcast(&state(0, t, 0.0));
            assert!(mesh.deliver(&pos).unwrap().deliveries.is_empty());
        }
    }

    #[test]
    fn no_self_delivery_even_with_relays() {
        let model = NetworkModel { relay: true, ttl: 5, ..NetworkModel::lossless(50.0) };
        let mut mesh = Mesh::new(model, 9);
        let pos = line(&[0.0, 10.0, 20.0, 30.0]);
        for id in 0..4 {
            mesh.broadcast(&state(id, 0, 10.0 * id as f64));
        }
        for _ in 0..6 {
            let report = mesh.deliver(&pos).unwrap();
            assert!(report.deliveries.iter().all(|d| d.receiver != d.message.sender));
        }
    }

    #[test]
    fn two_hop_relay_chain() {
        let model = NetworkModel { relay: true, ttl: 3, ..NetworkModel::lossless(15.0) };
        let mut mesh = Mesh::new(model, 0);
        let pos = line(&[0.0, 10.0, 20.0]);
        mesh.broadcast(&state(0, 0, 0.0));
        let first = mesh.deliver(&pos).unwrap();
        assert_eq!(first.deliveries.len(), 1);
        assert_eq!(first.deliveries[0].receiver, AgentId(1));
        let second = mesh.deliver(&pos).unwrap();
        let to_c: Vec<_> = second.deliveries.iter().filter(|d| d.receiver == AgentId(2)).collect();
        assert_eq!(to_c.len(), 1);
        assert_eq!(to_c[0].message.sender, AgentId(0));
        assert_eq!(to_c[0].hops, 1);
    }

    #[test]
    fn zero_ttl_equals_no_relay() {
        let pos = line(&[0.0, 10.0, 20.0, 25.0, 40.0]);
        let run = |model: NetworkModel| {
            let mut mesh = Mesh::new(model, 77);
            let mut all = Vec::new();
            for t in 0..50 {
                for (id, p) in &pos {
                    mesh.broadcast(&state(id.0, t, p.x));
                }
                all.push(mesh.deliver(&pos).unwrap());
            }
            all
        };
        let base = NetworkModel { comm_range: 15.0, ..NetworkModel::default() };
        let ttl0 = NetworkModel { relay: true, ttl: 0, ..base.clone() };
        assert_eq!(run(base), run(ttl0));
    }

    #[test]
    fn deterministic_for_a_seed() {
        let pos = line(&[0.0, 40.0, 80.0, 120.0]);
        let run = |seed| {
            let mut mesh = Mesh::new(NetworkModel { verbose: true, ..NetworkModel::default() }, seed);
            (0..100)
                .map(|t| {
                    for (id, p) in &pos {
                        mesh.broadcast(&state(id.0, t, p.x));
                    }
                    mesh.deliver(&pos).unwrap()
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(run(5), run(5));
        assert_ne!(run(5), run(6));
    }

    #[test]
    fn removed_transmitters_are_silent() {
        let mut mesh = Mesh::new(NetworkModel::lossless(100.0), 0);
        mesh.broadcast(&state(2, 0, 0.0));
        let report = mesh.deliver(&line(&[0.0, 1.0])).unwrap();
        assert_eq!(report.sent, 0);
        assert!(report.deliveries.is_empty());
    }

    #[test]
    fn empty_model_errors_on_delivery() {
        let model = NetworkModel { loss: LossMode::On, loss_table: Some(vec![]), ..NetworkModel::default() };
        let mut mesh = Mesh::new(model, 0);
        mesh.broadcast(&state(0, 0, 0.0));
        assert_eq!(mesh.deliver(&line(&[0.0, 1.0])).unwrap_err(), NetError::EmptyModel);
    }

    #[test]
    fn frame_link_over_byte_streams() {
        let mut wire = Vec::new();
        {
            let mut link = FrameLink::new(std::io::empty(), &mut wire);
            link.broadcast(&state(3, 4, 1.25)).unwrap();
            link.broadcast(&state(5, 4, -2.5)).unwrap();
        }
        // corrupt a byte of the second frame
        let first_len = encode(&state(3, 4, 1.25)).len();
        wire[first_len + 8] ^= 0x02;
        wire.extend_from_slice(&encode(&state(9, 5, 0.0)));
        let mut link = FrameLink::new(std::io::Cursor::new(wire), std::io::sink());
        let got = link.receive().unwrap();
        assert_eq!(got, vec![state(3, 4, 1.25), state(9, 5, 0.0)]);
        assert_eq!(link.dropped, 1);
    }
}
