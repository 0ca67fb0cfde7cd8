//! Human-in-the-loop annotation engine for sounding-object localization.

pub mod change;
pub mod eval;
pub mod matching;
pub mod model;
pub mod perception;
pub mod propagation;
pub mod scheduler;
pub mod service;
pub mod session;
pub mod sim;
pub mod store;
pub mod synth;
