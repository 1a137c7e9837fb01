//! Simulation constants, overridable from a `key = value` file.

use std::f64::consts::PI;
use std::fmt;

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    /// Edge length of one grid cell, in meters.
    pub cell_size: f64,
    pub beams: usize,
    /// Laser field of view, centered on the heading.
    pub fov: f64,
    pub max_range: f64,
    /// Seconds per tick.
    pub dt: f64,
    /// Forward speed in random mode and while exploring.
    pub forward_speed: f64,
    /// Turn rate in random mode and while exploring.
    pub turn_rate: f64,
    pub front_threshold: f64,
    /// Width of the cone in which obstacles count as "in front".
    pub front_cone: f64,
    pub zone_threshold: f64,
    /// Heading error under which the explorer drives instead of turning.
    pub align_tolerance: f64,
    /// Draw a new turn direction every tick instead of holding one until
    /// the front clears.
    pub rerandomize_turn: bool,
    /// Publish the console state every this many ticks.
    pub console_every: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            cell_size: 0.1,
            beams: 181,
            fov: PI,
            max_range: 4.0,
            dt: 0.1,
            forward_speed: 0.5,
            turn_rate: 1.0,
            front_threshold: 0.6,
            front_cone: PI / 3.0,
            zone_threshold: 1.0,
            align_tolerance: 0.2,
            rerandomize_turn: false,
            console_every: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ConfigError {}

impl SimConfig {
    /// Applies `key = value` lines on top of the defaults. `#` starts a
    /// comment.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut c = SimConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| ConfigError { line: i + 1, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, found `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let float = || {
                value
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| err(format!("`{key}` needs a number, found `{value}`")))
            };
            let positive = || {
                float().and_then(|v| {
                    if v > 0.0 {
                        Ok(v)
                    } else {
                        Err(err(format!("`{key}` must be positive")))
                    }
                })
            };
            let count = || {
                value
                    .parse::<u64>()
                    .ok()
                    .filter(|&v| v >= 1)
                    .ok_or_else(|| err(format!("`{key}` needs a positive integer, found `{value}`")))
            };
            match key {
                "cell_size" => c.cell_size = positive()?,
                "beams" => c.beams = count()? as usize,
                "fov" => c.fov = positive()?,
                "max_range" => c.max_range = positive()?,
                "dt" => c.dt = positive()?,
                "forward_speed" => c.forward_speed = positive()?,
                "turn_rate" => c.turn_rate = positive()?,
                "front_threshold" => c.front_threshold = positive()?,
                "front_cone" => c.front_cone = positive()?,
                "zone_threshold" => c.zone_threshold = positive()?,
                "align_tolerance" => c.align_tolerance = positive()?,
                "rerandomize_turn" => {
                    c.rerandomize_turn = value
                        .parse()
                        .map_err(|_| err(format!("`{key}` needs true or false")))?
                }
                "console_every" => c.console_every = count()?,
                _ => return Err(err(format!("unknown key `{key}`"))),
            }
        }
        Ok(c)
    }

    /// Simulated milliseconds per tick.
    pub fn dt_ms(&self) -> u64 {
        (self.dt * 1000.0).round() as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_keep_a_stopping_margin() {
        let c = SimConfig::default();
        assert!(c.front_threshold >= 2.0 * c.forward_speed * c.dt);
        assert!(c.cell_size < c.forward_speed * c.dt * 10.0);
        assert_eq!(c.dt_ms(), 100);
    }

    #[test]
    fn parses_overrides_and_comments() {
        let c = SimConfig::parse("# tuned\nbeams = 91\nzone_threshold=1.5 # m\n\nrerandomize_turn = true\n").unwrap();
        assert_eq!(c.beams, 91);
        assert_eq!(c.zone_threshold, 1.5);
        assert!(c.rerandomize_turn);
        assert_eq!(c.dt, 0.1);
    }

    #[test]
    fn rejects_bad_lines() {
        assert_eq!(SimConfig::parse("beams 3").unwrap_err().line, 1);
        assert!(SimConfig::parse("\nspeed = 2").unwrap_err().message.contains("unknown key"));
        assert!(SimConfig::parse("dt = -1").is_err());
        assert!(SimConfig::parse("beams = 0").is_err());
        assert!(SimConfig::parse("fov = NaN").is_err());
    }
}
