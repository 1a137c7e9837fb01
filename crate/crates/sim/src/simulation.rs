//! The tick loop: sense, let the bus settle, act on the world.

use std::sync::Arc;

use scc_runtime::{ComponentId, DeliveryRecord, ManualClock, Runtime, RunningSystem, RuntimeConfig, RuntimeError, TraceRecord};

use crate::behavior::in_zone;
use crate::components::{to_twist, to_velocity, Exploration, Picture, Shared, SimDeploy, FIRST_EXPLORER};
use crate::config::SimConfig;
use crate::exec::Execution;
use crate::explore::{ExploreParams, Explorer};
use crate::frontier::frontier_cells;
use crate::generated::deploy::MainDeploy;
use crate::generated::exploration::{self, ExplorationAttributes, ExplorationPublisher};
use crate::generated::laser_scan::LaserScanPublisher;
use crate::generated::mode_selector::ModeSelectorPublisher;
use crate::generated::types::Mode;
use crate::map::{CellIndex, Map};
use crate::world::{Velocity, World};

#[derive(Clone, Debug)]
pub struct SimOptions {
    pub config: SimConfig,
    pub seed: u64,
    pub exec: Execution,
    pub mode: Mode,
    /// Keep the event trace.
    pub trace: bool,
    /// Keep per-consumer delivery records.
    pub deliveries: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            config: SimConfig::default(),
            seed: 0,
            exec: Execution::default(),
            mode: Mode::Random,
            trace: false,
            deliveries: false,
        }
    }
}

/// What one tick observed, after the bus settled.
#[derive(Clone, Debug, PartialEq)]
pub struct TickReport {
    pub tick: u64,
    pub ranges: Vec<f64>,
    /// The zone rule applied to this tick's scan.
    pub in_zone: bool,
    pub light_on: bool,
    pub pictures: usize,
    /// Twist applied to the world after the scan.
    pub applied: Velocity,
    /// The move of this tick was blocked.
    pub blocked: bool,
    pub known: usize,
}

struct ExplorerSlot {
    name: String,
    id: ComponentId,
    publisher: ExplorationPublisher,
    planner: Explorer,
}

pub struct Simulation {
    options: SimOptions,
    world: World,
    system: RunningSystem,
    clock: Arc<ManualClock>,
    shared: Shared,
    laser: LaserScanPublisher,
    mode_selector: ModeSelectorPublisher,
    explorers: Vec<ExplorerSlot>,
    mode: Mode,
    pending_mode: Option<Mode>,
    tick: u64,
    trace: Vec<TraceRecord>,
}

impl Simulation {
    pub fn new(map: Map, options: SimOptions) -> Result<Self, RuntimeError> {
        let clock = Arc::new(ManualClock::new(0));
        let runtime = RuntimeConfig {
            clock: clock.clone(),
            trace: options.trace,
            record_deliveries: options.deliveries,
            ..RuntimeConfig::default()
        };
        let mut deploy = SimDeploy::new(options.config.clone(), options.seed);
        let system = deploy.deploy_all(runtime)?;
        let first = deploy.exploration.take().expect("deployment creates an explorer");
        let mut sim = Simulation {
            world: World::new(map, options.config.cell_size),
            clock,
            shared: deploy.shared.clone(),
            laser: deploy.laser.take().expect("deployment creates the laser"),
            mode_selector: deploy.mode.take().expect("deployment creates the mode selector"),
            explorers: Vec::new(),
            mode: options.mode,
            pending_mode: None,
            tick: 0,
            trace: Vec::new(),
            system,
            options,
        };
        let planner = sim.new_planner();
        sim.explorers.push(ExplorerSlot {
            name: FIRST_EXPLORER.to_owned(),
            id: first.id().clone(),
            publisher: first,
            planner,
        });
        sim.shared.lock().pose = Some(sim.world.pose);
        sim.mode_selector.publish_mode(sim.mode)?;
        sim.settle();
        Ok(sim)
    }

    fn new_planner(&self) -> Explorer {
        let c = &self.options.config;
        Explorer::new(ExploreParams {
            forward_speed: c.forward_speed,
            turn_rate: c.turn_rate,
            align_tolerance: c.align_tolerance,
            dt: c.dt,
        })
    }

    fn settle(&mut self) {
        let rt = self.system.runtime();
        rt.settle();
        if self.options.trace {
            self.trace.extend(rt.drain_trace());
        }
    }

    pub fn runtime(&self) -> &Runtime {
        self.system.runtime()
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn config(&self) -> &SimConfig {
        &self.options.config
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn mode(&self) -> Mode {
        self.pending_mode.unwrap_or(self.mode)
    }

    /// Takes effect at the start of the next tick. The last request before
    /// a tick wins.
    pub fn set_mode(&mut self, mode: Mode) {
        self.pending_mode = Some(mode);
    }

    pub fn light_on(&self) -> bool {
        self.shared.lock().light_on
    }

    pub fn pictures(&self) -> Vec<Picture> {
        self.shared.lock().pictures.clone()
    }

    pub fn frontier(&self) -> Vec<CellIndex> {
        frontier_cells(&self.world.map, self.world.known(), self.options.exec)
    }

    /// Every explorer found no frontier left at its last step.
    pub fn exploration_complete(&self) -> bool {
        !self.explorers.is_empty() && self.explorers.iter().all(|e| e.planner.is_complete())
    }

    pub fn explorer_ids(&self) -> Vec<ComponentId> {
        self.explorers.iter().map(|e| e.id.clone()).collect()
    }

    /// Trace records gathered since the last call, in tick order.
    pub fn take_trace(&mut self) -> Vec<TraceRecord> {
        std::mem::take(&mut self.trace)
    }

    pub fn take_deliveries(&self) -> Vec<DeliveryRecord> {
        self.system.runtime().drain_deliveries()
    }

    /// Registers one more Exploration entity; it receives Motion's
    /// attention through the live discovery query.
    pub fn add_explorer(&mut self, name: &str) -> Result<ComponentId, RuntimeError> {
        let mut publisher = None;
        let id = exploration::register(self.system.runtime(), |p| {
            publisher = Some(p);
            (
                Box::new(Exploration),
                ExplorationAttributes { name: name.to_owned() },
            )
        })?;
        let planner = self.new_planner();
        self.explorers.push(ExplorerSlot {
            name: name.to_owned(),
            id: id.clone(),
            publisher: publisher.expect("register calls its builder"),
            planner,
        });
        Ok(id)
    }

    /// Unregisters the Exploration entity called `name`.
    pub fn remove_explorer(&mut self, name: &str) -> bool {
        let Some(i) = self.explorers.iter().position(|e| e.name == name) else {
            return false;
        };
        let slot = self.explorers.remove(i);
        self.system.runtime().unregister_entity(&slot.id);
        true
    }

    /// One tick: apply a pending mode, scan, let the operators react, then
    /// move the robot with the latest wheel order.
    pub fn step(&mut self) -> Result<TickReport, RuntimeError> {
        self.tick += 1;
        self.clock.set(self.tick * self.options.config.dt_ms());
        {
            let mut s = self.shared.lock();
            s.pose = Some(self.world.pose);
            s.now_ms = self.clock_ms();
        }
        if let Some(mode) = self.pending_mode.take() {
            if mode != self.mode {
                self.mode = mode;
                if mode == Mode::Exploration {
                    self.explorers.iter_mut().for_each(|e| e.planner.reset());
                }
                self.mode_selector.publish_mode(mode)?;
                self.settle();
            }
        }

        let c = &self.options.config;
        let ranges = self.world.raycast(c.beams, c.fov, c.max_range, self.options.exec);
        self.laser.publish_ranges(ranges.clone())?;
        if self.mode == Mode::Exploration {
            let frontier = self.frontier();
            for e in &mut self.explorers {
                let v = e.planner.step_with(&self.world, &frontier);
                e.publisher.publish_twist(to_twist(v))?;
            }
        }
        self.settle();

        let (light_on, pictures, roll) = {
            let s = self.shared.lock();
            (s.light_on, s.pictures.len(), s.last_roll.clone())
        };
        let applied = roll.as_ref().map(to_velocity).unwrap_or(Velocity::ZERO);
        let blocked = self.world.step(applied, self.options.config.dt);
        Ok(TickReport {
            tick: self.tick,
            in_zone: in_zone(&ranges, self.options.config.zone_threshold),
            ranges,
            light_on,
            pictures,
            applied,
            blocked,
            known: self.world.known_count(),
        })
    }

    fn clock_ms(&self) -> u64 {
        self.tick * self.options.config.dt_ms()
    }

    /// Runs until `steps` ticks have passed or, in exploration mode, the
    /// frontier is exhausted.
    pub fn run(&mut self, steps: u64, mut each: impl FnMut(&Simulation, &TickReport)) -> Result<(), RuntimeError> {
        for _ in 0..steps {
            let report = self.step()?;
            each(self, &report);
            if self.mode == Mode::Exploration && self.exploration_complete() {
                break;
            }
        }
        Ok(())
    }
}
