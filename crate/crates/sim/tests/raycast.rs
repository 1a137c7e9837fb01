use std::f64::consts::{FRAC_PI_4, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scc_sim::world::{beam_offsets, World};
use scc_sim::{Execution, Map};

const CELL: f64 = 0.1;

/// Marches along the ray in steps of a hundredth of a cell.
/// Returns the range and every cell entered, with the distance it was
/// entered at.
fn march(map: &Map, x: f64, y: f64, angle: f64, max: f64) -> (f64, Vec<((usize, usize), f64)>) {
    let step = CELL / 100.0;
    let mut cells = Vec::new();
    let mut t = 0.0;
    while t < max {
        let (px, py) = (x + t * angle.cos(), y + t * angle.sin());
        let (c, r) = ((px / CELL).floor(), (py / CELL).floor());
        if c < 0.0 || r < 0.0 || c as usize >= map.width || r as usize >= map.height {
            return (t, cells);
        }
        let cell = (r as usize, c as usize);
        if cells.last().map(|&(c, _)| c) != Some(cell) {
            cells.push((cell, t));
        }
        if map.is_occupied(cell) {
            return (t, cells);
        }
        t += step;
    }
    (max, cells)
}

/// Exact entry and exit distances of a ray through one cell's square.
fn slab(x: f64, y: f64, angle: f64, (r, c): (usize, usize)) -> Option<(f64, f64)> {
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for (p, d, min) in [(x, angle.cos(), c as f64 * CELL), (y, angle.sin(), r as f64 * CELL)] {
        if d.abs() < 1e-15 {
            if p < min || p > min + CELL {
                return None;
            }
            continue;
        }
        let (a, b) = ((min - p) / d, (min + CELL - p) / d);
        lo = lo.max(a.min(b));
        hi = hi.min(a.max(b));
    }
    (lo < hi).then_some((lo, hi))
}

/// The ray enters an occupied cell at `range` and leaves it again within
/// one march step: a corner graze the march cannot resolve.
fn grazes_occupied(map: &Map, x: f64, y: f64, angle: f64, range: f64) -> bool {
    let (hx, hy) = (x + (range + 1e-9) * angle.cos(), y + (range + 1e-9) * angle.sin());
    let cell = ((hy / CELL).floor() as usize, (hx / CELL).floor() as usize);
    map.is_occupied(cell)
        && slab(x, y, angle, cell).is_some_and(|(enter, exit)| (enter - range).abs() < 1e-9 && exit - enter < CELL / 100.0)
}

fn random_map(rng: &mut ChaCha8Rng, w: usize, h: usize) -> Map {
    let start = (rng.random_range(1..h - 1), rng.random_range(1..w - 1));
    let density = rng.random_range(0.05..0.3);
    let cells: Vec<bool> = (0..w * h).map(|_| rng.random_bool(density)).collect();
    Map::from_fn(w, h, start, |(r, c)| cells[r * w + c])
}

#[test]
fn ranges_match_a_fine_ray_march() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..40 {
        let map = random_map(&mut rng, 30, 30);
        let mut world = World::new(map.clone(), CELL);
        world.pose.x += rng.random_range(-0.049..0.049);
        world.pose.y += rng.random_range(-0.049..0.049);
        world.pose.theta = rng.random_range(-PI..PI);
        let ranges = world.raycast(61, PI, 4.0, Execution::Sequential);
        for (offset, range) in beam_offsets(61, PI).into_iter().zip(&ranges) {
            let angle = world.pose.theta + offset;
            let (expected, cells) = march(&map, world.pose.x, world.pose.y, angle, 4.0);
            let agrees = (range - expected).abs() <= CELL / 100.0 + 1e-9;
            assert!(
                agrees || (*range < expected && grazes_occupied(&map, world.pose.x, world.pose.y, angle, *range)),
                "beam at {angle}: {range} vs {expected}"
            );
            assert!(*range > 0.0 && *range <= 4.0);
            for (c, _) in cells.into_iter().filter(|&(_, t)| t <= *range) {
                assert!(world.is_known(c), "marched cell {c:?} not marked known");
            }
        }
    }
}

#[test]
fn wall_two_meters_ahead() {
    // robot centered in column 5, wall from x = 2.5: 1.95 m ahead
    let map = Map::from_fn(40, 11, (5, 5), |(_, c)| c == 25);
    let mut world = World::new(map.clone(), CELL);
    let ranges = world.raycast(181, PI, 4.0, Execution::Sequential);
    let (oracle, _) = march(&map, world.pose.x, world.pose.y, 0.0, 4.0);
    assert!((ranges[90] - 2.0).abs() <= CELL);
    assert!((ranges[90] - oracle).abs() <= CELL / 100.0 + 1e-9);
}

#[test]
fn corner_ahead_gives_symmetric_ranges() {
    // square room, robot on the diagonal facing the far corner
    let n = 21;
    let map = Map::from_fn(n, n, (10, 10), |(r, c)| r == 0 || c == 0 || r == n - 1 || c == n - 1);
    let mut world = World::new(map, CELL);
    world.pose.theta = FRAC_PI_4;
    let ranges = world.raycast(181, PI, 4.0, Execution::Sequential);
    for i in 0..ranges.len() {
        let j = ranges.len() - 1 - i;
        assert!((ranges[i] - ranges[j]).abs() < 1e-9, "beam {i}: {} vs {}", ranges[i], ranges[j]);
    }
}

#[test]
fn parallel_and_sequential_scans_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let map = random_map(&mut rng, 50, 50);
        let mut a = World::new(map.clone(), CELL);
        let mut b = World::new(map, CELL);
        let theta = rng.random_range(-PI..PI);
        a.pose.theta = theta;
        b.pose.theta = theta;
        assert_eq!(
            a.raycast(181, PI, 4.0, Execution::Sequential),
            b.raycast(181, PI, 4.0, Execution::Parallel)
        );
        assert_eq!(a.known(), b.known());
    }
}
