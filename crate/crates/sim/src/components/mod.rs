//! Hand-written implementations of the case-study components, compiled
//! against the generated framework.

mod actuators;
mod contexts;
mod controllers;
mod deploy;
mod sensors;

use std::sync::{Arc, Mutex, MutexGuard};

use crate::generated::types::{Twist, Vector3};
use crate::world::{Pose, Velocity};

pub use actuators::{Camera, Light, Wheel};
pub use contexts::{Motion, ObstacleDetection, ObstacleZone, RandomMotion};
pub use controllers::{MotionController, ObstacleManager};
pub use deploy::{SimDeploy, FIRST_EXPLORER};
pub use sensors::{Exploration, LaserScan, ModeSelector};

/// A photograph: when and where it was taken.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Picture {
    pub timestamp: u64,
    pub pose: Pose,
}

/// What the actuators did, read back by the tick loop.
#[derive(Clone, Debug, Default)]
pub struct Actuated {
    pub light_on: bool,
    pub pictures: Vec<Picture>,
    pub last_roll: Option<Twist>,
    pub rolls: u64,
    /// Pose and time the camera stamps pictures with.
    pub pose: Option<Pose>,
    pub now_ms: u64,
}

#[derive(Clone, Debug, Default)]
pub struct Shared(Arc<Mutex<Actuated>>);

impl Shared {
    pub fn lock(&self) -> MutexGuard<'_, Actuated> {
        self.0.lock().unwrap_or_else(|e| e.into_inner())
    }
}

pub fn to_twist(v: Velocity) -> Twist {
    Twist {
        linear: Vector3 {
            x: v.linear,
            y: 0.0,
            z: 0.0,
        },
        angular: Vector3 {
            x: 0.0,
            y: 0.0,
            z: v.angular,
        },
    }
}

pub fn to_velocity(t: &Twist) -> Velocity {
    Velocity {
        linear: t.linear.x,
        angular: t.angular.z,
    }
}

pub fn zero_twist() -> Twist {
    to_twist(Velocity::ZERO)
}
