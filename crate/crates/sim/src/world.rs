//! Ground truth, the robot's knowledge of it, laser raycasting and
//! unicycle kinematics.

use std::f64::consts::PI;

use crate::exec::Execution;
use crate::map::{CellIndex, Map};

/// Planar robot pose; `x` runs along columns, `y` along rows, `theta` is
/// measured from +x towards +y.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

/// The two velocity components the simulator uses.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Velocity {
    /// Forward speed, m/s.
    pub linear: f64,
    /// Yaw rate, rad/s.
    pub angular: f64,
}

impl Velocity {
    pub const ZERO: Velocity = Velocity {
        linear: 0.0,
        angular: 0.0,
    };

    pub fn forward(speed: f64) -> Self {
        Velocity {
            linear: speed,
            angular: 0.0,
        }
    }

    pub fn turn(rate: f64) -> Self {
        Velocity {
            linear: 0.0,
            angular: rate,
        }
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn normalize_angle(a: f64) -> f64 {
    let mut a = a % (2.0 * PI);
    if a <= -PI {
        a += 2.0 * PI;
    } else if a > PI {
        a -= 2.0 * PI;
    }
    a
}

/// Gap kept between a blocked robot and the cell boundary it ran into, so
/// that the robot's cell stays free.
const CONTACT_GAP: f64 = 1e-6;

/// Walks the cells crossed by a ray, calling `visit` on each one entered
/// including the first occupied one. Returns the distance to the first
/// occupied or out-of-map boundary, or `max` if there is none closer.
pub fn trace_ray(
    map: &Map,
    cell_size: f64,
    (x, y): (f64, f64),
    angle: f64,
    max: f64,
    mut visit: impl FnMut(CellIndex),
) -> f64 {
    let (dx, dy) = (angle.cos(), angle.sin());
    let mut col = (x / cell_size).floor() as i64;
    let mut row = (y / cell_size).floor() as i64;
    if !map.contains(row, col) {
        return 0.0;
    }
    visit((row as usize, col as usize));
    let axis = |pos: f64, cell: i64, d: f64| -> (i64, f64, f64) {
        if d > 0.0 {
            (1, ((cell + 1) as f64 * cell_size - pos) / d, cell_size / d)
        } else if d < 0.0 {
            (-1, (cell as f64 * cell_size - pos) / d, -cell_size / d)
        } else {
            (0, f64::INFINITY, f64::INFINITY)
        }
    };
    let (step_c, mut next_c, delta_c) = axis(x, col, dx);
    let (step_r, mut next_r, delta_r) = axis(y, row, dy);
    loop {
        let t = if next_c <= next_r {
            col += step_c;
            let t = next_c;
            next_c += delta_c;
            t
        } else {
            row += step_r;
            let t = next_r;
            next_r += delta_r;
            t
        };
        if t >= max {
            return max;
        }
        if !map.contains(row, col) {
            return t.max(0.0);
        }
        let cell = (row as usize, col as usize);
        visit(cell);
        if map.is_occupied(cell) {
            return t.max(0.0);
        }
    }
}

/// Relative angle of every beam, evenly spaced over `fov`, symmetric about
/// zero.
pub fn beam_offsets(beams: usize, fov: f64) -> Vec<f64> {
    if beams == 1 {
        return vec![0.0];
    }
    let step = fov / (beams - 1) as f64;
    let mid = (beams - 1) as f64 / 2.0;
    (0..beams).map(|i| (i as f64 - mid) * step).collect()
}

#[derive(Clone, Debug)]
pub struct World {
    pub map: Map,
    pub cell_size: f64,
    known: Vec<bool>,
    known_count: usize,
    pub pose: Pose,
    /// Set on the first blocked move and never cleared.
    pub collided: bool,
    pub collisions: u64,
}

impl World {
    pub fn new(map: Map, cell_size: f64) -> Self {
        let (r, c) = map.start;
        let pose = Pose {
            x: (c as f64 + 0.5) * cell_size,
            y: (r as f64 + 0.5) * cell_size,
            theta: 0.0,
        };
        let known = vec![false; map.len()];
        World {
            map,
            cell_size,
            known,
            known_count: 0,
            pose,
            collided: false,
            collisions: 0,
        }
    }

    pub fn robot_cell(&self) -> CellIndex {
        self.cell_at(self.pose.x, self.pose.y)
    }

    pub fn cell_at(&self, x: f64, y: f64) -> CellIndex {
        (
            (y / self.cell_size).floor() as usize,
            (x / self.cell_size).floor() as usize,
        )
    }

    pub fn cell_center(&self, (r, c): CellIndex) -> (f64, f64) {
        ((c as f64 + 0.5) * self.cell_size, (r as f64 + 0.5) * self.cell_size)
    }

    pub fn known(&self) -> &[bool] {
        &self.known
    }

    pub fn is_known(&self, cell: CellIndex) -> bool {
        self.known[self.map.index(cell)]
    }

    pub fn known_count(&self) -> usize {
        self.known_count
    }

    /// Marks `cell` as known.
    pub fn reveal(&mut self, cell: CellIndex) {
        let i = self.map.index(cell);
        if !self.known[i] {
            self.known[i] = true;
            self.known_count += 1;
        }
    }

    /// Range of each beam to the first occupied cell boundary, clamped to
    /// `max_range`. Every cell a beam crosses becomes known.
    pub fn raycast(&mut self, beams: usize, fov: f64, max_range: f64, exec: Execution) -> Vec<f64> {
        let offsets = beam_offsets(beams, fov);
        let origin = (self.pose.x, self.pose.y);
        let theta = self.pose.theta;
        let (map, cs) = (&self.map, self.cell_size);
        let cast = |offset: &f64| {
            let mut cells = Vec::new();
            let r = trace_ray(map, cs, origin, theta + offset, max_range, |c| cells.push(c));
            (r, cells)
        };
        let results: Vec<(f64, Vec<CellIndex>)> = exec.map(&offsets, cast);
        let mut ranges = Vec::with_capacity(beams);
        for (r, cells) in results {
            for c in cells {
                self.reveal(c);
            }
            ranges.push(r);
        }
        ranges
    }

    /// Unicycle update: turn first, then move along the new heading. A move
    /// into an occupied cell stops at its boundary and sets `collided`.
    pub fn step(&mut self, v: Velocity, dt: f64) -> bool {
        self.pose.theta = normalize_angle(self.pose.theta + v.angular * dt);
        let dist = v.linear * dt;
        if dist == 0.0 {
            return false;
        }
        let heading = if dist > 0.0 {
            self.pose.theta
        } else {
            self.pose.theta + PI
        };
        let len = dist.abs();
        let free = trace_ray(&self.map, self.cell_size, (self.pose.x, self.pose.y), heading, len, |_| {});
        let (travel, blocked) = if free < len {
            ((free - CONTACT_GAP).max(0.0), true)
        } else {
            (len, false)
        };
        self.pose.x += travel * heading.cos();
        self.pose.y += travel * heading.sin();
        if blocked {
            self.collided = true;
            self.collisions += 1;
        }
        blocked
    }
}
