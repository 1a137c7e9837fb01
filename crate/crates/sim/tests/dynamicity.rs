use std::collections::{BTreeMap, BTreeSet};

use scc_sim::{Map, Mode, SimOptions, Simulation};

#[test]
fn explorer_handover_loses_no_events() {
    let map = Map::parse(scc_sim::map::BUNDLED[2].1).unwrap();
    let options = SimOptions {
        mode: Mode::Exploration,
        trace: true,
        deliveries: true,
        ..SimOptions::default()
    };
    let mut sim = Simulation::new(map, options).unwrap();
    let first = sim.explorer_ids()[0].to_string();
    for _ in 0..30 {
        sim.step().unwrap();
    }
    let second = sim.add_explorer("explore-2").unwrap().to_string();
    for _ in 0..30 {
        sim.step().unwrap();
    }
    assert!(sim.remove_explorer("explore-1"));
    let removed_at = sim.tick();
    for _ in 0..30 {
        sim.step().unwrap();
    }

    let trace = sim.take_trace();
    let delivered: Vec<_> = sim
        .take_deliveries()
        .into_iter()
        .filter(|d| d.consumer.starts_with("Motion#") && d.channel == "twist")
        .collect();

    // every published twist reached Motion, in order
    let mut ts_of = BTreeMap::new();
    for who in [&first, &second] {
        let published: Vec<u64> = trace
            .iter()
            .filter(|t| &t.producer == who && t.channel == "twist")
            .map(|t| {
                ts_of.insert((who.clone(), t.seq), t.ts);
                t.seq
            })
            .collect();
        let received: Vec<u64> = delivered.iter().filter(|d| &d.producer == who).map(|d| d.seq).collect();
        assert!(!published.is_empty());
        assert_eq!(published, received, "{who}");
    }

    // Motion hears from some explorer on every tick
    let step_ms = sim.config().dt_ms();
    let ticks: BTreeSet<u64> = delivered
        .iter()
        .map(|d| ts_of[&(d.producer.clone(), d.seq)] / step_ms)
        .collect();
    assert_eq!(ticks, (1..=90).collect());

    // and nothing from the first one after it left
    let last_first = delivered
        .iter()
        .filter(|d| d.producer == first)
        .map(|d| ts_of[&(d.producer.clone(), d.seq)] / step_ms)
        .max();
    assert_eq!(last_first, Some(removed_at));
    assert_eq!(sim.runtime().reentrancy_violations(), 0);
}

#[test]
fn late_explorer_takes_over_motion() {
    let map = Map::parse(scc_sim::map::BUNDLED[0].1).unwrap();
    let options = SimOptions {
        mode: Mode::Exploration,
        ..SimOptions::default()
    };
    let mut sim = Simulation::new(map, options).unwrap();
    assert!(sim.remove_explorer("explore-1"));
    sim.add_explorer("replacement").unwrap();
    let mut moved = false;
    sim.run(100_000, |_, r| moved |= r.applied.linear > 0.0).unwrap();
    assert!(moved);
    assert!(sim.exploration_complete());
    assert!(!sim.remove_explorer("explore-1"));
}
