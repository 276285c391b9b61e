//! Simulation and verification laboratory for bootstrap percolation with
//! pollution: three-state product configurations on boxes in Z^d, standard
//! and modified neighborhood rules, exact monotone couplings, and the
//! combinatorial structures (curtains, sails, brick renormalization) used to
//! study growth and blocking at small p and q.

pub mod config;
pub mod coupling;
pub mod curtain;
pub mod dynamics;
pub mod error;
pub mod export;
pub mod renorm;
pub mod sail;
pub mod snapshot;
pub mod state;
pub mod stats;
pub mod svg;
pub mod window;

pub use config::{Configuration, FieldSource, Meta, ProductField};
pub use coupling::{CouplingSource, STREAM_U, STREAM_V, STREAM_W};
pub use error::{Error, Result};
pub use state::SiteState;
pub use window::BoxWindow;
