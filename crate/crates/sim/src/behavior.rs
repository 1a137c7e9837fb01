//! Decision rules of the case-study operators, free of any bus plumbing.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::world::{beam_offsets, Velocity};

/// Whether an obstacle lies closer than `threshold` within the front cone.
/// Ranges are beams evenly spread over `fov`.
pub fn obstacle_in_front(ranges: &[f64], fov: f64, threshold: f64, cone: f64) -> bool {
    let offsets = beam_offsets(ranges.len(), fov);
    ranges
        .iter()
        .zip(offsets)
        .filter(|(_, o)| o.abs() <= cone / 2.0)
        .any(|(&r, _)| r < threshold)
}

/// Some obstacle anywhere in the scan is closer than `threshold`.
pub fn in_zone(ranges: &[f64], threshold: f64) -> bool {
    ranges.iter().any(|&r| r < threshold)
}

/// Goes straight, turns in place while blocked.
pub struct RandomWalk {
    rng: ChaCha8Rng,
    /// Direction of the turn in progress.
    turning: Option<f64>,
    pub forward_speed: f64,
    pub turn_rate: f64,
    pub rerandomize: bool,
}

impl RandomWalk {
    pub fn new(rng: ChaCha8Rng, forward_speed: f64, turn_rate: f64, rerandomize: bool) -> Self {
        RandomWalk {
            rng,
            turning: None,
            forward_speed,
            turn_rate,
            rerandomize,
        }
    }

    pub fn next(&mut self, front: bool) -> Velocity {
        if !front {
            self.turning = None;
            return Velocity::forward(self.forward_speed);
        }
        let sign = match self.turning {
            Some(s) if !self.rerandomize => s,
            _ => {
                let s = if self.rng.random_bool(0.5) { 1.0 } else { -1.0 };
                self.turning = Some(s);
                s
            }
        };
        Velocity::turn(sign * self.turn_rate)
    }
}

/// Light and camera orders for one zone reading.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ZoneOrders {
    pub light_on: bool,
    pub light_off: bool,
    pub picture: bool,
}

/// Tracks zone transitions: light follows the zone, a picture is taken on
/// every entry.
#[derive(Clone, Debug, Default)]
pub struct ZoneEdges {
    inside: bool,
}

impl ZoneEdges {
    pub fn update(&mut self, inside: bool) -> ZoneOrders {
        let was = std::mem::replace(&mut self.inside, inside);
        ZoneOrders {
            light_on: inside && !was,
            light_off: was && !inside,
            picture: inside && !was,
        }
    }
}
