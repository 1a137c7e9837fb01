use std::f64::consts::PI;

use proptest::prelude::*;
use scc_sim::behavior::{obstacle_in_front, ZoneEdges};
use scc_sim::console::{decode_row, encode_row};
use scc_sim::world::{beam_offsets, normalize_angle, Velocity, World};
use scc_sim::{Map, Mode, SimOptions, Simulation};

fn grid() -> impl Strategy<Value = Map> {
    (4usize..24, 4usize..24).prop_flat_map(|(w, h)| {
        (
            proptest::collection::vec(proptest::bool::weighted(0.2), w * h),
            0..h,
            0..w,
        )
            .prop_map(move |(cells, r, c)| Map::from_fn(w, h, (r, c), |(rr, cc)| cells[rr * w + cc]))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn front_flag_is_the_cone_minimum(
        ranges in proptest::collection::vec(0.01f64..4.0, 1..200),
        threshold in 0.1f64..2.0,
        cone in 0.0f64..PI,
    ) {
        let offsets = beam_offsets(ranges.len(), PI);
        let min = ranges.iter().zip(&offsets).filter(|(_, o)| o.abs() <= cone / 2.0).map(|(r, _)| *r).fold(f64::INFINITY, f64::min);
        prop_assert_eq!(obstacle_in_front(&ranges, PI, threshold, cone), min < threshold);
    }

    #[test]
    fn pictures_equal_rising_edges(levels in proptest::collection::vec(any::<bool>(), 0..300)) {
        let mut edges = ZoneEdges::default();
        let mut light = false;
        let mut pictures = 0;
        for &level in &levels {
            let o = edges.update(level);
            if o.light_on { light = true; }
            if o.light_off { light = false; }
            pictures += o.picture as usize;
            prop_assert_eq!(light, level);
        }
        let rising = std::iter::once(false).chain(levels.iter().copied()).collect::<Vec<_>>()
            .windows(2).filter(|w| !w[0] && w[1]).count();
        prop_assert_eq!(pictures, rising);
    }

    #[test]
    fn rle_round_trips(row in "[UFO]{0,120}") {
        prop_assert_eq!(decode_row(&encode_row(row.chars())).unwrap(), row);
    }

    #[test]
    fn angles_normalize_into_half_open_interval(a in -1e4f64..1e4) {
        let n = normalize_angle(a);
        prop_assert!(n > -PI && n <= PI);
        prop_assert!((n.cos() - a.cos()).abs() < 1e-9 && (n.sin() - a.sin()).abs() < 1e-9);
    }

    #[test]
    fn moves_never_enter_occupied_cells(
        map in grid(),
        moves in proptest::collection::vec((-1.0f64..1.0, -3.0f64..3.0), 1..60),
    ) {
        let mut world = World::new(map, 0.1);
        for (linear, angular) in moves {
            world.step(Velocity { linear, angular }, 0.1);
            let (x, y) = (world.pose.x, world.pose.y);
            prop_assert!(x >= 0.0 && y >= 0.0);
            let cell = world.robot_cell();
            prop_assert!(cell.0 < world.map.height && cell.1 < world.map.width);
            prop_assert!(!world.map.is_occupied(cell));
        }
    }

    #[test]
    fn known_cells_only_grow(map in grid(), seed in 0u64..1000) {
        let mut sim = Simulation::new(map, SimOptions { seed, ..SimOptions::default() }).unwrap();
        let mut last = 0;
        for _ in 0..40 {
            let r = sim.step().unwrap();
            prop_assert!(r.known >= last);
            last = r.known;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn random_walk_is_safe_on_any_grid(map in grid(), seed in 0u64..1000) {
        let options = SimOptions { seed, mode: Mode::Random, ..SimOptions::default() };
        let mut sim = Simulation::new(map, options).unwrap();
        for _ in 0..300 {
            let r = sim.step().unwrap();
            prop_assert!(!r.blocked, "tick {}", r.tick);
        }
    }
}
