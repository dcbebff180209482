//! Driving a behavior by hand, the way a robot's main loop would: read
//! neighbor frames off a serial line, compute a command, send our own state.
//!
//!     cargo run --example serial_link

use std::io::Cursor;

use swarmkit::behaviors::{consensus_step, Neighbor, NeighborView};
use swarmkit::netsim::{decode, encode, FrameLink, Network};
use swarmkit::types::{AgentId, AgentState, BehaviorKind, BehaviorSpec, Heading, Vec2};

fn main() {
    // what two neighbors put on the air
    let mut air = Vec::new();
    for (id, deg) in [(1, 80.0), (2, 100.0)] {
        air.extend(encode(&AgentState::new(AgentId(id), Vec2::new(f64::from(id), 0.0), Heading::from_degrees(deg))));
    }
    // and a frame that picked up a bit error
    let mut noisy = encode(&AgentState::new(AgentId(3), Vec2::ZERO, Heading::EAST));
    noisy[10] ^= 0x04;
    println!("corrupted frame: {:?}", decode(&noisy).unwrap_err());
    air.extend(noisy);

    let mut link = FrameLink::new(Cursor::new(air), Vec::new());
    let heard = link.receive().unwrap();
    println!("heard {} frames, dropped {}", heard.len(), link.dropped);

    let me = AgentState::new(AgentId(0), Vec2::ZERO, Heading::from_degrees(0.0));
    let view = NeighborView::new(me.id, heard.into_iter().map(|state| Neighbor { state, age: 0 }));
    let command = consensus_step(&me, &view, &BehaviorSpec::new(BehaviorKind::Consensus));
    println!("turn to {:.1} deg at {} m/s", command.target_heading.angle().to_degrees(), command.target_speed);

    let next = AgentState { heading: command.target_heading, speed: command.target_speed, ..me };
    link.broadcast(&next).unwrap();
    let (_, sent) = link.into_inner();
    print!("sent: {}", String::from_utf8(sent).unwrap());
}
