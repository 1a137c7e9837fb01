//! The robot case study: a grid simulator and the component
//! implementations deployed on the framework generated from
//! `design/robot.scc`.

pub mod generated {
    include!(concat!(env!("SCC_GENERATED_DIR"), "/generated/mod.rs"));
}

pub mod batch;
pub mod behavior;
pub mod components;
pub mod config;
pub mod console;
pub mod exec;
pub mod explore;
pub mod frontier;
pub mod map;
pub mod simulation;
pub mod world;

/// The case-study design this crate implements.
pub const DESIGN: &str = include_str!("../design/robot.scc");

pub use config::SimConfig;
pub use exec::Execution;
pub use generated::types::Mode;
pub use map::Map;
pub use simulation::{SimOptions, Simulation, TickReport};
