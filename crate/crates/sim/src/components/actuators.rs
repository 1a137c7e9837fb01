use scc_runtime::RuntimeError;

use super::{Picture, Shared};
use crate::generated::types::Twist;
use crate::generated::{camera, light, wheel};

pub struct Light {
    pub shared: Shared,
}

impl light::AbstractLight for Light {
    fn on(&mut self) -> Result<(), RuntimeError> {
        self.shared.lock().light_on = true;
        Ok(())
    }

    fn off(&mut self) -> Result<(), RuntimeError> {
        self.shared.lock().light_on = false;
        Ok(())
    }
}

pub struct Camera {
    pub shared: Shared,
}

impl camera::AbstractCamera for Camera {
    fn take_picture(&mut self) -> Result<(), RuntimeError> {
        let mut s = self.shared.lock();
        let pose = s
            .pose
            .ok_or_else(|| RuntimeError::handler("camera has no pose yet"))?;
        let timestamp = s.now_ms;
        s.pictures.push(Picture { timestamp, pose });
        Ok(())
    }
}

pub struct Wheel {
    pub shared: Shared,
}

impl wheel::AbstractWheel for Wheel {
    fn roll(&mut self, twist: Twist) -> Result<(), RuntimeError> {
        let mut s = self.shared.lock();
        s.last_roll = Some(twist);
        s.rolls += 1;
        Ok(())
    }
}
