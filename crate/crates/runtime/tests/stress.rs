use std::collections::{BTreeSet, HashMap};
use std::sync::atomic::{AtomicBool, AtomicI64, AtomicU64, Ordering};
use std::sync::Arc;
use std::thread;

use parking_lot::Mutex;
use proptest::prelude::*;
use scc_runtime::*;

fn design() -> Design {
    Design::default()
        .with_component(
            ComponentDecl::entity("Sensor")
                .attribute("room", TypeDesc::Str)
                .source("level", TypeDesc::Float),
        )
        .with_component(
            ComponentDecl::context("Level", TypeDesc::Float).source_input(
                "Sensor",
                "level",
                Interaction::Push,
            ),
        )
        .with_component(
            ComponentDecl::context("Lab", TypeDesc::Float).source_input(
                "Sensor",
                "level",
                Interaction::Push,
            ),
        )
        .with_component(
            ComponentDecl::context("Audit", TypeDesc::Float).context_input("Level", Interaction::Pull),
        )
}

/// Counts events, checks per-producer order, and detects overlapping calls
/// on its own.
#[derive(Default)]
struct Probe {
    inside: AtomicI64,
    overlapped: AtomicBool,
    received: AtomicU64,
    disorder: AtomicU64,
    last: Mutex<HashMap<ComponentId, (u64, f64)>>,
}

struct Counting(Arc<Probe>);

impl Counting {
    fn enter(&self) {
        if self.0.inside.fetch_add(1, Ordering::SeqCst) != 0 {
            self.0.overlapped.store(true, Ordering::SeqCst);
        }
        // widen the window in which an overlap would be visible
        std::hint::spin_loop();
    }

    fn exit(&self) {
        self.0.inside.fetch_sub(1, Ordering::SeqCst);
    }
}

impl Handler for Counting {
    fn on_event(&mut self, event: &Event, _: &mut Port) -> Result<(), RuntimeError> {
        self.enter();
        self.0.received.fetch_add(1, Ordering::SeqCst);
        let Value::Float(v) = event.value else { unreachable!() };
        let mut last = self.0.last.lock();
        let prev = last.insert(event.producer.clone(), (event.seq, v));
        if let Some((seq, pv)) = prev {
            if seq >= event.seq || pv >= v {
                self.0.disorder.fetch_add(1, Ordering::SeqCst);
            }
        }
        drop(last);
        self.exit();
        Ok(())
    }

    fn provide(&mut self, _: &str, _: &mut Port) -> Result<Value, ProviderError> {
        self.enter();
        let n = self.0.received.load(Ordering::SeqCst);
        self.exit();
        Ok(Value::Float(n as f64))
    }
}

struct Idle;
impl Handler for Idle {}

#[test]
fn hundred_thousand_events_no_loss_no_reentry() {
    const PRODUCERS: usize = 4;
    const PER_PRODUCER: usize = 25_000;

    let rt = Runtime::new(
        design(),
        RuntimeConfig {
            queue_capacity: 16,
            ..RuntimeConfig::default()
        },
    );
    let probe = Arc::new(Probe::default());
    let level = rt.add_operator("Level", Box::new(Counting(probe.clone()))).unwrap();
    rt.subscribe(&level, DiscoveryQuery::all("Sensor"), "level").unwrap();
    let audit = rt.add_operator("Audit", Box::new(Idle)).unwrap();

    let sensors: Vec<ComponentId> = (0..PRODUCERS)
        .map(|i| {
            rt.register_entity_with(
                "Sensor",
                vec![("room".into(), Value::Str(format!("r{i}")))],
                |_| Box::new(Idle),
            )
            .unwrap()
        })
        .collect();

    let done = Arc::new(AtomicBool::new(false));
    let puller = {
        let rt = rt.clone();
        let done = done.clone();
        thread::spawn(move || {
            let mut pulls = 0u64;
            while !done.load(Ordering::SeqCst) {
                assert!(rt.request_context(&audit, "Level").unwrap().is_some());
                pulls += 1;
            }
            pulls
        })
    };

    let producers: Vec<_> = sensors
        .iter()
        .cloned()
        .map(|id| {
            let publisher = rt.publisher(&id);
            thread::spawn(move || {
                for i in 0..PER_PRODUCER {
                    publisher.publish("level", Value::Float(i as f64)).unwrap();
                }
            })
        })
        .collect();
    for p in producers {
        p.join().unwrap();
    }
    rt.settle();
    done.store(true, Ordering::SeqCst);
    let pulls = puller.join().unwrap();

    let count_in = (PRODUCERS * PER_PRODUCER) as u64;
    assert_eq!(probe.received.load(Ordering::SeqCst), count_in);
    assert_eq!(probe.disorder.load(Ordering::SeqCst), 0);
    assert!(!probe.overlapped.load(Ordering::SeqCst));
    assert_eq!(rt.reentrancy_violations(), 0);
    assert!(pulls > 0);
    let last = probe.last.lock();
    for id in &sensors {
        assert_eq!(last[id], (PER_PRODUCER as u64, (PER_PRODUCER - 1) as f64));
    }
    drop(last);
    rt.shutdown();
}

#[derive(Clone, Debug)]
enum Op {
    Register(bool),
    Unregister(usize),
}

fn ops() -> impl Strategy<Value = Vec<Op>> {
    prop::collection::vec(
        prop_oneof![
            any::<bool>().prop_map(Op::Register),
            (0usize..16).prop_map(Op::Unregister),
        ],
        0..24,
    )
}

struct Collect(Arc<Mutex<BTreeSet<ComponentId>>>);

impl Handler for Collect {
    fn on_event(&mut self, event: &Event, _: &mut Port) -> Result<(), RuntimeError> {
        assert!(self.0.lock().insert(event.producer.clone()), "delivered twice");
        Ok(())
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// At a quiescent point each live query reaches exactly the registered
    /// entities it matches.
    #[test]
    fn live_queries_track_registrations(script in ops()) {
        let rt = Runtime::new(design(), RuntimeConfig::default());
        let all_seen = Arc::new(Mutex::new(BTreeSet::new()));
        let lab_seen = Arc::new(Mutex::new(BTreeSet::new()));
        let all = rt.add_operator("Level", Box::new(Collect(all_seen.clone()))).unwrap();
        let lab = rt.add_operator("Lab", Box::new(Collect(lab_seen.clone()))).unwrap();
        rt.subscribe(&all, DiscoveryQuery::all("Sensor"), "level").unwrap();
        rt.subscribe(
            &lab,
            DiscoveryQuery::all("Sensor").filter("room", Value::Str("lab".into())),
            "level",
        ).unwrap();

        let mut created: Vec<(ComponentId, bool)> = Vec::new();
        let mut live: BTreeSet<ComponentId> = BTreeSet::new();
        for op in &script {
            match op {
                Op::Register(in_lab) => {
                    let room = if *in_lab { "lab" } else { "hall" };
                    let id = rt.register_entity_with(
                        "Sensor",
                        vec![("room".into(), Value::Str(room.into()))],
                        |_| Box::new(Idle),
                    ).unwrap();
                    live.insert(id.clone());
                    created.push((id, *in_lab));
                }
                Op::Unregister(i) => {
                    if let Some((id, _)) = created.get(*i) {
                        rt.unregister_entity(id);
                        live.remove(id);
                    }
                }
            }
        }
        rt.settle();

        let expected_lab: BTreeSet<ComponentId> = created
            .iter()
            .filter(|(id, in_lab)| *in_lab && live.contains(id))
            .map(|(id, _)| id.clone())
            .collect();
        let discovered: BTreeSet<ComponentId> =
            rt.discover(&DiscoveryQuery::all("Sensor")).into_iter().collect();
        prop_assert_eq!(&discovered, &live);

        for (id, in_lab) in &created {
            let subs: BTreeSet<ComponentId> = rt.subscribers(id, "level").into_iter().collect();
            let mut want = BTreeSet::new();
            if live.contains(id) {
                want.insert(all.clone());
                if *in_lab {
                    want.insert(lab.clone());
                }
            }
            prop_assert_eq!(subs, want);
            let _ = rt.publish(id, "level", Value::Float(1.0));
        }
        rt.settle();
        prop_assert_eq!(&*all_seen.lock(), &live);
        prop_assert_eq!(&*lab_seen.lock(), &expected_lab);
        rt.shutdown();
    }
}
