use scc_runtime::RuntimeError;

use crate::behavior::ZoneEdges;
use crate::generated::types::Twist;
use crate::generated::{motion_controller, obstacle_manager};

pub struct MotionController;

impl motion_controller::AbstractMotionController for MotionController {
    fn on_motion(
        &mut self,
        twist: Twist,
        cx: &mut motion_controller::MotionControllerContext<'_>,
    ) -> Result<(), RuntimeError> {
        cx.wheel().roll(twist)?;
        Ok(())
    }
}

#[derive(Default)]
pub struct ObstacleManager {
    pub edges: ZoneEdges,
}

impl obstacle_manager::AbstractObstacleManager for ObstacleManager {
    fn on_obstacle_zone(
        &mut self,
        inside: bool,
        cx: &mut obstacle_manager::ObstacleManagerContext<'_>,
    ) -> Result<(), RuntimeError> {
        let orders = self.edges.update(inside);
        if orders.light_on {
            cx.light().on()?;
        }
        if orders.light_off {
            cx.light().off()?;
        }
        if orders.picture {
            cx.camera().take_picture()?;
        }
        Ok(())
    }
}
