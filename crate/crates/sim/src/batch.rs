//! Many independent simulations at once.

use crate::exec::Execution;
use crate::frontier::reachable_free;
use crate::generated::types::Mode;
use crate::map::Map;
use crate::simulation::{SimOptions, Simulation};

#[derive(Clone, Debug)]
pub struct BatchJob {
    pub label: String,
    pub map: Map,
    pub seed: u64,
    pub steps: u64,
    pub mode: Mode,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BatchResult {
    pub label: String,
    pub seed: u64,
    pub ticks: u64,
    /// Ticks whose move was blocked.
    pub collisions: u64,
    pub pictures: usize,
    /// Reachable free cells the robot knows about.
    pub known_reachable: usize,
    pub reachable: usize,
    pub complete: bool,
    /// Known count never decreased.
    pub monotone: bool,
}

impl BatchResult {
    pub fn coverage(&self) -> f64 {
        if self.reachable == 0 {
            1.0
        } else {
            self.known_reachable as f64 / self.reachable as f64
        }
    }
}

/// Runs one simulation per job. `exec` spreads jobs across threads; each
/// simulation itself runs its inner loops sequentially so results do not
/// depend on the choice.
pub fn run_batch(jobs: &[BatchJob], exec: Execution) -> Vec<BatchResult> {
    exec.map(jobs, run_job)
}

pub fn run_job(job: &BatchJob) -> BatchResult {
    let options = SimOptions {
        seed: job.seed,
        mode: job.mode,
        exec: Execution::Sequential,
        ..SimOptions::default()
    };
    let mut sim = Simulation::new(job.map.clone(), options).expect("case study deploys");
    let mut monotone = true;
    let mut last = 0;
    sim.run(job.steps, |_, r| {
        monotone &= r.known >= last;
        last = r.known;
    })
    .expect("tick failed");
    let world = sim.world();
    let reachable = reachable_free(&world.map);
    let known_reachable = reachable
        .iter()
        .zip(world.known())
        .filter(|&(&r, &k)| r && k)
        .count();
    BatchResult {
        label: job.label.clone(),
        seed: job.seed,
        ticks: sim.tick(),
        collisions: world.collisions,
        pictures: sim.pictures().len(),
        known_reachable,
        reachable: reachable.iter().filter(|&&r| r).count(),
        complete: sim.exploration_complete(),
        monotone,
    }
}
