use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::behavior::RandomWalk;
use crate::config::SimConfig;
use crate::generated::{
    camera, deploy, exploration, laser_scan, light, mode_selector, motion, motion_controller, obstacle_detection,
    obstacle_manager, obstacle_zone, random_motion, wheel,
};

/// Builds every component of the case study and keeps the publishers the
/// tick loop drives.
pub struct SimDeploy {
    pub config: SimConfig,
    pub seed: u64,
    pub shared: Shared,
    pub laser: Option<laser_scan::LaserScanPublisher>,
    pub mode: Option<mode_selector::ModeSelectorPublisher>,
    pub exploration: Option<exploration::ExplorationPublisher>,
}

impl SimDeploy {
    pub fn new(config: SimConfig, seed: u64) -> Self {
        SimDeploy {
            config,
            seed,
            shared: Shared::default(),
            laser: None,
            mode: None,
            exploration: None,
        }
    }
}

/// Name of the Exploration instance created at deployment.
pub const FIRST_EXPLORER: &str = "explore-1";

impl deploy::MainDeploy for SimDeploy {
    fn create_laser_scan(
        &mut self,
        publisher: laser_scan::LaserScanPublisher,
    ) -> (Box<dyn laser_scan::AbstractLaserScan>, laser_scan::LaserScanAttributes) {
        self.laser = Some(publisher);
        (Box::new(LaserScan), laser_scan::LaserScanAttributes {})
    }

    fn create_mode_selector(
        &mut self,
        publisher: mode_selector::ModeSelectorPublisher,
    ) -> (Box<dyn mode_selector::AbstractModeSelector>, mode_selector::ModeSelectorAttributes) {
        self.mode = Some(publisher);
        (Box::new(ModeSelector), mode_selector::ModeSelectorAttributes {})
    }

    fn create_exploration(
        &mut self,
        publisher: exploration::ExplorationPublisher,
    ) -> (Box<dyn exploration::AbstractExploration>, exploration::ExplorationAttributes) {
        self.exploration = Some(publisher);
        (
            Box::new(Exploration),
            exploration::ExplorationAttributes {
                name: FIRST_EXPLORER.to_owned(),
            },
        )
    }

    fn create_light(
        &mut self,
        _publisher: light::LightPublisher,
    ) -> (Box<dyn light::AbstractLight>, light::LightAttributes) {
        let shared = self.shared.clone();
        (Box::new(Light { shared }), light::LightAttributes {})
    }

    fn create_camera(
        &mut self,
        _publisher: camera::CameraPublisher,
    ) -> (Box<dyn camera::AbstractCamera>, camera::CameraAttributes) {
        let shared = self.shared.clone();
        (Box::new(Camera { shared }), camera::CameraAttributes {})
    }

    fn create_wheel(
        &mut self,
        _publisher: wheel::WheelPublisher,
    ) -> (Box<dyn wheel::AbstractWheel>, wheel::WheelAttributes) {
        let shared = self.shared.clone();
        (Box::new(Wheel { shared }), wheel::WheelAttributes {})
    }

    fn create_obstacle_detection(&mut self) -> Box<dyn obstacle_detection::AbstractObstacleDetection> {
        Box::new(ObstacleDetection {
            fov: self.config.fov,
            front_threshold: self.config.front_threshold,
            front_cone: self.config.front_cone,
        })
    }

    fn create_random_motion(&mut self) -> Box<dyn random_motion::AbstractRandomMotion> {
        let c = &self.config;
        Box::new(RandomMotion {
            walk: RandomWalk::new(
                ChaCha8Rng::seed_from_u64(self.seed),
                c.forward_speed,
                c.turn_rate,
                c.rerandomize_turn,
            ),
        })
    }

    fn create_obstacle_zone(&mut self) -> Box<dyn obstacle_zone::AbstractObstacleZone> {
        Box::new(ObstacleZone {
            threshold: self.config.zone_threshold,
        })
    }

    fn create_motion(&mut self) -> Box<dyn motion::AbstractMotion> {
        Box::new(Motion::default())
    }

    fn create_motion_controller(&mut self) -> Box<dyn motion_controller::AbstractMotionController> {
        Box::new(MotionController)
    }

    fn create_obstacle_manager(&mut self) -> Box<dyn obstacle_manager::AbstractObstacleManager> {
        Box::new(ObstacleManager::default())
    }
}
