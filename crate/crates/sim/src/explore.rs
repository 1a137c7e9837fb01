//! Frontier-based exploration: move to a frontier, look, repeat.

use crate::exec::Execution;
use crate::frontier::{clusters, frontier_cells, is_open, Search, UNREACHED};
use crate::map::CellIndex;
use crate::world::{normalize_angle, Velocity, World};

#[derive(Clone, Debug, PartialEq)]
pub struct ExploreParams {
    pub forward_speed: f64,
    pub turn_rate: f64,
    pub align_tolerance: f64,
    pub dt: f64,
}

#[derive(Clone, Debug)]
struct Goal {
    cell: CellIndex,
    path: Vec<CellIndex>,
    next: usize,
}

#[derive(Clone, Debug)]
pub struct Explorer {
    params: ExploreParams,
    goal: Option<Goal>,
    pub replans: u64,
    complete: bool,
}

impl Explorer {
    pub fn new(params: ExploreParams) -> Self {
        Explorer {
            params,
            goal: None,
            replans: 0,
            complete: false,
        }
    }

    /// No frontier was left at the last step.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    /// Drops the current goal, for instance after the robot was moved by
    /// something else.
    pub fn reset(&mut self) {
        self.goal = None;
        self.complete = false;
    }

    pub fn goal(&self) -> Option<CellIndex> {
        self.goal.as_ref().map(|g| g.cell)
    }

    /// Twist for this tick given the current knowledge.
    pub fn step(&mut self, world: &World, exec: Execution) -> Velocity {
        let frontier = frontier_cells(&world.map, world.known(), exec);
        self.step_with(world, &frontier)
    }

    pub fn step_with(&mut self, world: &World, frontier: &[CellIndex]) -> Velocity {
        if frontier.is_empty() {
            self.goal = None;
            self.complete = true;
            return Velocity::ZERO;
        }
        self.complete = false;
        let valid = self.goal.as_ref().is_some_and(|g| {
            frontier.binary_search(&g.cell).is_ok()
                && g.path[g.next.saturating_sub(1)..]
                    .iter()
                    .all(|&c| is_open(&world.map, world.known(), c))
        });
        if !valid {
            self.goal = plan(world, frontier);
            self.replans += 1;
        }
        let Some(goal) = self.goal.as_mut() else {
            return Velocity::ZERO;
        };
        let p = &self.params;
        let pose = world.pose;
        let reach = 0.25 * world.cell_size;
        while goal.next < goal.path.len() {
            let (wx, wy) = world.cell_center(goal.path[goal.next]);
            if (wx - pose.x).hypot(wy - pose.y) < reach {
                goal.next += 1;
            } else {
                break;
            }
        }
        let Some(&waypoint) = goal.path.get(goal.next) else {
            return look(world, goal.cell, p);
        };
        let (wx, wy) = world.cell_center(waypoint);
        let (dx, dy) = (wx - pose.x, wy - pose.y);
        let err = normalize_angle(dy.atan2(dx) - pose.theta);
        let angular = (err / p.dt).clamp(-p.turn_rate, p.turn_rate);
        if err.abs() >= p.align_tolerance {
            return Velocity::turn(angular);
        }
        Velocity {
            linear: (dx.hypot(dy) / p.dt).min(p.forward_speed),
            angular,
        }
    }
}

/// At the goal: face its first unknown neighbor so the next scan sees it.
fn look(world: &World, cell: CellIndex, p: &ExploreParams) -> Velocity {
    let Some(unknown) = world.map.neighbors(cell).find(|&n| !world.is_known(n)) else {
        return Velocity::ZERO;
    };
    let (cx, cy) = world.cell_center(cell);
    let (ux, uy) = world.cell_center(unknown);
    let err = normalize_angle((uy - cy).atan2(ux - cx) - world.pose.theta);
    if err.abs() < p.align_tolerance {
        Velocity::ZERO
    } else {
        Velocity::turn((err / p.dt).clamp(-p.turn_rate, p.turn_rate))
    }
}

/// Picks, among the cells nearest to each frontier cluster's centroid, the
/// one with the shortest path, ties to the smallest `(row, col)`.
fn plan(world: &World, frontier: &[CellIndex]) -> Option<Goal> {
    let map = &world.map;
    let known = world.known();
    let search = Search::run(map, world.robot_cell(), |c| is_open(map, known, c));
    let mut best: Option<(u32, CellIndex)> = None;
    for group in clusters(map, frontier) {
        let n = group.len() as f64;
        let (mr, mc) = group
            .iter()
            .fold((0.0, 0.0), |(r, c), &(gr, gc)| (r + gr as f64, c + gc as f64));
        let (mr, mc) = (mr / n, mc / n);
        let rep = *group
            .iter()
            .min_by(|a, b| {
                let da = (a.0 as f64 - mr).powi(2) + (a.1 as f64 - mc).powi(2);
                let db = (b.0 as f64 - mr).powi(2) + (b.1 as f64 - mc).powi(2);
                da.total_cmp(&db).then(a.cmp(b))
            })
            .expect("clusters are non-empty");
        let d = search.distance(rep);
        if d == UNREACHED {
            continue;
        }
        if best.is_none_or(|b| (d, rep) < b) {
            best = Some((d, rep));
        }
    }
    let (_, cell) = best?;
    Some(Goal {
        cell,
        path: search.path(cell).expect("reached cells have a path"),
        next: 0,
    })
}
