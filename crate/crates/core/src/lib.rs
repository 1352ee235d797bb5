pub mod atomic;
pub mod cli;
pub mod error;
pub mod fit;
pub mod io;
pub(crate) mod numerics;
pub mod panda;
pub mod pulse;
pub mod retrieval;
pub mod streak;
pub mod units;
pub mod wavepacket;

pub use error::{Error, Result};
