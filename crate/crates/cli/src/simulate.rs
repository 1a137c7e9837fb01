use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::thread;
use std::time::{Duration, Instant};

use clap::Args;
use scc_sim::console::state_message;
use scc_sim::frontier::reachable_free;
use scc_sim::{Execution, Map, Mode, SimConfig, SimOptions, Simulation};

use crate::{console, load, CliError};

#[derive(Args)]
pub struct SimulateArgs {
    /// The case-study design; must match the one built into `scc`.
    file: PathBuf,
    /// A bundled map (room, office, warehouse) or a map file.
    #[arg(long)]
    map: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Ticks to run; 1000 by default, unbounded with `--console`.
    #[arg(long)]
    steps: Option<u64>,
    /// Serve the operator console on this port.
    #[arg(long)]
    console: Option<u16>,
    /// Write the event trace as JSON lines, to standard output when no
    /// file is given.
    #[arg(long, num_args = 0..=1, default_missing_value = "-")]
    trace: Option<PathBuf>,
    /// `key = value` file overriding simulation constants.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Initial mode.
    #[arg(long, default_value = "RANDOM", value_parser = parse_mode)]
    mode: Mode,
    /// Run raycasts and frontier scans on one thread.
    #[arg(long)]
    sequential: bool,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    Mode::ALL
        .into_iter()
        .find(|m| m.label().eq_ignore_ascii_case(s))
        .ok_or_else(|| format!("expected RANDOM or EXPLORATION, found `{s}`"))
}

fn load_map(arg: &str) -> Result<Map, CliError> {
    if let Some((_, text)) = scc_sim::map::BUNDLED.iter().find(|(name, _)| *name == arg) {
        return Map::parse(text).map_err(|e| CliError::Usage(format!("bundled map {arg}: {e}")));
    }
    let path = Path::new(arg);
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Map::parse(&text).map_err(|e| CliError::io(path, e))
}

/// The binary runs only the case study it was built with.
fn ensure_case_study(file: &Path) -> Result<(), CliError> {
    let given = scc_core::emit(&load(file)?).map_err(|e| CliError::Usage(e.to_string()))?;
    let spec = scc_core::parse(scc_sim::DESIGN, "robot.scc").expect("built-in design parses");
    let built = scc_core::emit(&scc_core::check(&spec).expect("built-in design checks")).expect("built-in design emits");
    if given.units != built.units {
        return Err(CliError::Usage(format!(
            "{} differs from the case-study design built into this binary",
            file.display()
        )));
    }
    Ok(())
}

pub fn run(args: SimulateArgs) -> Result<(), CliError> {
    ensure_case_study(&args.file)?;
    let map = load_map(&args.map)?;
    let config = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            SimConfig::parse(&text).map_err(|e| CliError::io(path, e))?
        }
        None => SimConfig::default(),
    };
    let mut trace: Option<Box<dyn Write>> = match &args.trace {
        None => None,
        Some(p) if p.as_os_str() == "-" => Some(Box::new(io::stdout().lock())),
        Some(p) => Some(Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::io(p, e))?))),
    };
    let trace_on_stdout = args.trace.as_deref().is_some_and(|p| p.as_os_str() == "-");
    let server = match args.console {
        Some(port) => {
            let s = console::serve(port).map_err(|e| CliError::Usage(format!("console on port {port}: {e}")))?;
            eprintln!("operator console at http://{}/", s.local_addr());
            Some(s)
        }
        None => None,
    };
    let steps = args.steps.unwrap_or(if server.is_some() { u64::MAX } else { 1000 });

    let options = SimOptions {
        config: config.clone(),
        seed: args.seed,
        exec: if args.sequential { Execution::Sequential } else { Execution::Parallel },
        mode: args.mode,
        trace: trace.is_some(),
        deliveries: false,
    };
    let mut sim = Simulation::new(map, options).map_err(|e| CliError::Usage(e.to_string()))?;
    let tick_len = Duration::from_millis(config.dt_ms());
    let write_err = |e: io::Error| CliError::Usage(format!("writing trace: {e}"));
    for _ in 0..steps {
        let started = Instant::now();
        if let Some(s) = &server {
            if let Some(mode) = s.mode_requests().pop() {
                sim.set_mode(mode);
            }
        }
        sim.step().map_err(|e| CliError::Usage(e.to_string()))?;
        if let Some(out) = trace.as_mut() {
            for record in sim.take_trace() {
                writeln!(out, "{}", record.to_json()).map_err(write_err)?;
            }
        }
        if let Some(s) = &server {
            if sim.tick() % config.console_every == 0 {
                let msg = serde_json::to_string(&state_message(&sim)).expect("state serializes");
                s.broadcast(&msg);
            }
            thread::sleep(tick_len.saturating_sub(started.elapsed()));
        } else if sim.mode() == Mode::Exploration && sim.exploration_complete() {
            break;
        }
    }
    if let Some(mut out) = trace {
        out.flush().map_err(write_err)?;
    }

    let world = sim.world();
    let reachable = reachable_free(&world.map);
    let known = reachable.iter().zip(world.known()).filter(|&(&r, &k)| r && k).count();
    let total = reachable.iter().filter(|&&r| r).count();
    let summary = format!(
        "ticks {}  mode {}  collisions {}  known {}/{} reachable cells  pictures {}  light {}",
        sim.tick(),
        sim.mode().label(),
        world.collisions,
        known,
        total,
        sim.pictures().len(),
        if sim.light_on() { "on" } else { "off" },
    );
    if trace_on_stdout {
        eprintln!("{summary}");
    } else {
        println!("{summary}");
    }
    Ok(())
}
