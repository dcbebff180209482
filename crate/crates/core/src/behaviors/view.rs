use serde::{Deserialize, Serialize};

use crate::types::{AgentId, AgentState, Heading};

/// One neighbor's last broadcast and how many ticks ago it arrived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Neighbor {
    pub state: AgentState,
    pub age: u64,
}

/// The states an agent has received from others, in canonical order.
///
/// Construction drops the owner's own id, keeps only the freshest copy per
/// sender and sorts by sender id. Every rule sums over the view in this order,
/// so shuffling the input never changes a result, not even in the last bit.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NeighborView {
    entries: Vec<Neighbor>,
}

impl NeighborView {
    pub fn new(owner: AgentId, entries: impl IntoIterator<Item = Neighbor>) -> Self {
        let mut entries: Vec<Neighbor> = entries.into_iter().filter(|n| n.state.id != owner).collect();
        // freshest first within each id: newest payload, then youngest receipt
        entries.sort_by(|a, b| {
            a.state.id.cmp(&b.state.id).then(b.state.tick.cmp(&a.state.tick)).then(a.age.cmp(&b.age))
        });
        entries.dedup_by_key(|n| n.state.id);
        NeighborView { entries }
    }

    pub fn empty() -> Self {
        NeighborView::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Neighbor> {
        self.entries.iter()
    }

    pub fn states(&self) -> impl Iterator<Item = &AgentState> {
        self.entries.iter().map(|n| &n.state)
    }

    pub fn get(&self, id: AgentId) -> Option<&Neighbor> {
        self.entries.binary_search_by_key(&id, |n| n.state.id).ok().map(|i| &self.entries[i])
    }
}

/// What the body should do during the next tick.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotionCommand {
    pub target_heading: Heading,
    /// m/s; the body clamps it to its own limit.
    pub target_speed: f64,
}

impl MotionCommand {
    pub fn new(target_heading: Heading, target_speed: f64) -> Self {
        MotionCommand { target_heading, target_speed }
    }

    pub fn hold(heading: Heading) -> Self {
        MotionCommand { target_heading: heading, target_speed: 0.0 }
    }
}
