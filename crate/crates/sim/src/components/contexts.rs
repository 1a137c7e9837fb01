use scc_runtime::RuntimeError;

use super::{to_twist, zero_twist};
use crate::behavior::{in_zone, obstacle_in_front, RandomWalk};
use crate::generated::types::{Mode, Obstacle, Twist};
use crate::generated::{motion, obstacle_detection, obstacle_zone, random_motion};

pub struct ObstacleDetection {
    pub fov: f64,
    pub front_threshold: f64,
    pub front_cone: f64,
}

impl obstacle_detection::AbstractObstacleDetection for ObstacleDetection {
    fn post_initialize(
        &mut self,
        cx: &mut obstacle_detection::ObstacleDetectionContext<'_>,
    ) -> Result<(), RuntimeError> {
        cx.discover_laser_scan_for_subscribe().all().subscribe_ranges()
    }

    fn on_ranges(
        &mut self,
        ranges: Vec<f64>,
        cx: &mut obstacle_detection::ObstacleDetectionContext<'_>,
    ) -> Result<(), RuntimeError> {
        let front = obstacle_in_front(&ranges, self.fov, self.front_threshold, self.front_cone);
        cx.publish_obstacle_detection(Obstacle { front, ranges })
    }
}

pub struct RandomMotion {
    pub walk: RandomWalk,
}

impl random_motion::AbstractRandomMotion for RandomMotion {
    fn on_obstacle_detection(
        &mut self,
        obstacle: Obstacle,
        cx: &mut random_motion::RandomMotionContext<'_>,
    ) -> Result<(), RuntimeError> {
        let v = self.walk.next(obstacle.front);
        cx.publish_random_motion(to_twist(v))
    }
}

pub struct ObstacleZone {
    pub threshold: f64,
}

impl obstacle_zone::AbstractObstacleZone for ObstacleZone {
    fn on_obstacle_detection(
        &mut self,
        obstacle: Obstacle,
        cx: &mut obstacle_zone::ObstacleZoneContext<'_>,
    ) -> Result<(), RuntimeError> {
        cx.publish_obstacle_zone(in_zone(&obstacle.ranges, self.threshold))
    }
}

/// Keeps the latest value of each input and forwards the twist of the
/// selected mode.
pub struct Motion {
    pub mode: Mode,
    pub random: Option<Twist>,
    pub exploration: Option<Twist>,
}

impl Default for Motion {
    fn default() -> Self {
        Motion {
            mode: Mode::Random,
            random: None,
            exploration: None,
        }
    }
}

impl Motion {
    fn selected(&self) -> Twist {
        match self.mode {
            Mode::Random => self.random.clone(),
            Mode::Exploration => self.exploration.clone(),
        }
        .unwrap_or_else(zero_twist)
    }
}

impl motion::AbstractMotion for Motion {
    fn post_initialize(&mut self, cx: &mut motion::MotionContext<'_>) -> Result<(), RuntimeError> {
        cx.discover_exploration_for_subscribe().all().subscribe_twist()?;
        cx.discover_mode_selector_for_subscribe().all().subscribe_mode()
    }

    fn on_random_motion(&mut self, value: Twist, cx: &mut motion::MotionContext<'_>) -> Result<(), RuntimeError> {
        self.random = Some(value);
        if self.mode == Mode::Random {
            cx.publish_motion(self.selected())?;
        }
        Ok(())
    }

    fn on_twist(&mut self, value: Twist, cx: &mut motion::MotionContext<'_>) -> Result<(), RuntimeError> {
        self.exploration = Some(value);
        if self.mode == Mode::Exploration {
            cx.publish_motion(self.selected())?;
        }
        Ok(())
    }

    fn on_mode(&mut self, value: Mode, cx: &mut motion::MotionContext<'_>) -> Result<(), RuntimeError> {
        self.mode = value;
        cx.publish_motion(self.selected())
    }
}
