use crate::generated::{exploration, laser_scan, mode_selector};

/// The simulated laser. Scans are published by the tick loop.
pub struct LaserScan;

impl laser_scan::AbstractLaserScan for LaserScan {}

/// The operator's mode switch.
pub struct ModeSelector;

impl mode_selector::AbstractModeSelector for ModeSelector {}

/// Twist source backed by a frontier planner owned by the tick loop.
pub struct Exploration;

impl exploration::AbstractExploration for Exploration {}
