//! Range-limited lossy broadcast mesh, its loss model and the wire codec.

pub mod codec;
mod mesh;
mod model;

use thiserror::Error;

pub use codec::{decode, encode, FrameError};
pub use mesh::{Delivery, DeliveryReport, FrameLink, LinkOutcome, Mesh, Message, Network};
pub use model::{measured_loss_table, success_probability, LossMode, LossRow, NetworkModel};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetError {
    #[error("loss is enabled but the loss table is empty")]
    EmptyModel,
}
