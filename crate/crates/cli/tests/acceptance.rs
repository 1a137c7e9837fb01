//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode, Output};
use std::sync::atomic::{AtomicBool, AtomicI64, AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use quote::ToTokens;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scc_runtime::{
    ComponentDecl, ComponentId, Design, DiscoveryQuery, Event, Handler, Interaction, Port, Runtime, RuntimeConfig,
    RuntimeError, TypeDesc, Value,
};
use scc_sim::batch::{run_batch, BatchJob};
use scc_sim::frontier::frontier_cells;
use scc_sim::{Execution, Map, Mode, SimOptions, Simulation};

type Verdict = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

const SCC: &str = env!("CARGO_BIN_EXE_scc");
const MANIFEST_DIR: &str = env!("CARGO_MANIFEST_DIR");

fn workspace() -> PathBuf {
    Path::new(MANIFEST_DIR).join("../..").canonicalize().unwrap()
}

fn design_path() -> PathBuf {
    workspace().join("crates/sim/design/robot.scc")
}

fn scc(args: &[&str]) -> Output {
    Command::new(SCC).args(args).output().expect("scc runs")
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

fn bundled() -> Vec<(&'static str, Map)> {
    scc_sim::map::BUNDLED
        .iter()
        .map(|(name, text)| (*name, Map::parse(text).unwrap()))
        .collect()
}

// ---------------------------------------------------------------- fidelity

const COMPONENTS: [&str; 12] = [
    "LaserScan",
    "ModeSelector",
    "Exploration",
    "Light",
    "Camera",
    "Wheel",
    "ObstacleDetection",
    "RandomMotion",
    "ObstacleZone",
    "Motion",
    "MotionController",
    "ObstacleManager",
];

/// Connections of the decomposed case study: who feeds whom.
const CONNECTIONS: [(&str, &str); 11] = [
    ("LaserScan", "ObstacleDetection"),
    ("ObstacleDetection", "RandomMotion"),
    ("ObstacleDetection", "ObstacleZone"),
    ("RandomMotion", "Motion"),
    ("Exploration", "Motion"),
    ("ModeSelector", "Motion"),
    ("Motion", "MotionController"),
    ("MotionController", "Wheel"),
    ("ObstacleZone", "ObstacleManager"),
    ("ObstacleManager", "Light"),
    ("ObstacleManager", "Camera"),
];

fn case_study_fidelity() -> Verdict {
    let started = Instant::now();
    let design = design_path();
    let check = scc(&["check", design.to_str().unwrap()]);
    ensure!(check.status.code() == Some(0), "check exited {:?}: {}", check.status, text(&check.stderr));
    ensure!(check.stderr.is_empty(), "check reported: {}", text(&check.stderr));

    let tmp = tempfile::tempdir().unwrap();
    let dot_path = tmp.path().join("robot.dot");
    let graph = scc(&["graph", design.to_str().unwrap(), "-o", dot_path.to_str().unwrap()]);
    ensure!(graph.status.success(), "graph failed: {}", text(&graph.stderr));
    let dot = fs::read_to_string(&dot_path).unwrap();
    let mut nodes = BTreeSet::new();
    let mut edges = BTreeSet::new();
    for line in dot.lines().map(str::trim) {
        let quoted: Vec<&str> = line.split('"').skip(1).step_by(2).collect();
        if line.contains("->") {
            edges.insert((quoted[0].to_owned(), quoted[1].to_owned()));
        } else if line.contains("[shape=") {
            nodes.insert(quoted[0].to_owned());
        }
    }
    let expected_nodes: BTreeSet<String> = COMPONENTS.iter().map(|s| s.to_string()).collect();
    let expected_edges: BTreeSet<(String, String)> =
        CONNECTIONS.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    ensure!(edges == expected_edges, "edge set differs: {edges:?}");
    ensure!(
        nodes == expected_nodes,
        "node set differs: missing {:?}, extra {:?}",
        expected_nodes.difference(&nodes).collect::<Vec<_>>(),
        nodes.difference(&expected_nodes).collect::<Vec<_>>()
    );
    ensure!(
        nodes.len() == 11,
        "graph has {} nodes, one per listed component, where 11 are required",
        nodes.len()
    );
    let elapsed = started.elapsed();
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!("{} nodes, {} edges in {elapsed:?}", nodes.len(), edges.len()))
}

// ---------------------------------------------------------------- analyzer

const BASE: &str = "
structure Vector3 { x as Float; y as Float; z as Float; }
structure Twist { linear as Vector3; angular as Vector3; }
entity LaserScan { source ranges as Float[]; }
entity Wheel { action Roll(twist as Twist); }
context Obs as Boolean { source ranges from LaserScan; }
";

const CRAFTED: [(&str, &str); 8] = [
    ("R1", "controller C { source ranges from LaserScan; action Roll on Wheel; }"),
    ("R2", "controller C { context Obs; action Roll on Wheel; } context Bad as Boolean { context C; }"),
    ("R3", "entity Bad { source x as Float; context Obs; }"),
    ("R4", "context A as Float { context B; } context B as Float { context A; }"),
    ("R5", "context M as Speed { context Obs; }"),
    ("R6", "entity LaserScan { source other as Float; }"),
    ("R7", "context C as Float { source depth from LaserScan; }"),
    ("R8", "controller C { context Obs; action Fly on Wheel; }"),
];

fn analyzer_rule_suite() -> Verdict {
    let started = Instant::now();
    for (rule, extra) in CRAFTED {
        let spec = scc_core::parse(&format!("{BASE}{extra}"), "crafted.scc").map_err(|d| format!("{rule}: {d:?}"))?;
        let violations = scc_core::check(&spec).err().unwrap_or_default();
        let ids: Vec<String> = violations.iter().map(|v| v.rule.to_string()).collect();
        ensure!(ids == [rule], "{rule} spec reported {ids:?}");
    }
    let spec = scc_core::parse(scc_sim::DESIGN, "robot.scc").map_err(|d| format!("{d:?}"))?;
    ensure!(scc_core::check(&spec).is_ok(), "case study rejected");

    // and through the command line
    let tmp = tempfile::tempdir().unwrap();
    let file = tmp.path().join("cycle.scc");
    fs::write(&file, format!("{BASE}{}", CRAFTED[3].1)).unwrap();
    let out = scc(&["check", file.to_str().unwrap()]);
    ensure!(out.status.code() == Some(1), "cycle check exited {:?}", out.status);
    ensure!(text(&out.stderr).contains("[R4]"), "no [R4] in {}", text(&out.stderr));
    let elapsed = started.elapsed();
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!("8 rules isolated, case study clean, {elapsed:?}"))
}

// ---------------------------------------------------------------- codegen

/// A copy of the simulator crate that reads its framework from
/// `SCC_GENERATED_DIR` instead of generating it in a build script.
struct SimCopy {
    _tmp: tempfile::TempDir,
    root: PathBuf,
    krate: PathBuf,
}

fn copy_tree(from: &Path, to: &Path) {
    fs::create_dir_all(to).unwrap();
    for entry in fs::read_dir(from).unwrap() {
        let entry = entry.unwrap();
        let target = to.join(entry.file_name());
        if entry.file_type().unwrap().is_dir() {
            copy_tree(&entry.path(), &target);
        } else {
            fs::copy(entry.path(), target).unwrap();
        }
    }
}

fn sim_copy() -> SimCopy {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path().to_path_buf();
    let krate = root.join("sim");
    let source = workspace().join("crates/sim");
    for dir in ["src", "design", "maps"] {
        copy_tree(&source.join(dir), &krate.join(dir));
    }
    let manifest = fs::read_to_string(source.join("Cargo.toml")).unwrap();
    let runtime = workspace().join("crates/runtime");
    let mut out = String::new();
    let mut keep = true;
    for line in manifest.lines() {
        if line.starts_with('[') {
            keep = !matches!(line, "[build-dependencies]" | "[dev-dependencies]" | "[[bench]]");
        }
        if keep && !line.starts_with("build =") {
            out.push_str(&line.replace("\"../runtime\"", &format!("{:?}", runtime.display().to_string())));
            out.push('\n');
        }
    }
    out.push_str("\n[workspace]\n");
    fs::write(krate.join("Cargo.toml"), out).unwrap();
    fs::copy(workspace().join("Cargo.lock"), krate.join("Cargo.lock")).unwrap();
    SimCopy { _tmp: tmp, root, krate }
}

struct CheckRun {
    success: bool,
    /// (level, code, primary file, rendered)
    messages: Vec<(String, Option<String>, String, String)>,
}

fn cargo_check(copy: &SimCopy, framework: &Path) -> CheckRun {
    let out = Command::new(env!("CARGO"))
        .args(["check", "--offline", "--message-format=json", "--manifest-path"])
        .arg(copy.krate.join("Cargo.toml"))
        .env("SCC_GENERATED_DIR", framework)
        .env("CARGO_TARGET_DIR", workspace().join("target/acceptance"))
        .output()
        .expect("cargo runs");
    let mut messages = Vec::new();
    let mut success = false;
    for line in text(&out.stdout).lines() {
        let Ok(v) = serde_json::from_str::<serde_json::Value>(line) else { continue };
        match v["reason"].as_str() {
            Some("compiler-message") if v["target"]["name"] == "scc_sim" => {
                let m = &v["message"];
                let file = m["spans"]
                    .as_array()
                    .and_then(|s| s.iter().find(|s| s["is_primary"] == true))
                    .and_then(|s| s["file_name"].as_str())
                    .unwrap_or("")
                    .to_owned();
                messages.push((
                    m["level"].as_str().unwrap_or("").to_owned(),
                    m["code"]["code"].as_str().map(str::to_owned),
                    file,
                    m["rendered"].as_str().unwrap_or("").to_owned(),
                ));
            }
            Some("build-finished") => success = v["success"] == true,
            _ => {}
        }
    }
    if messages.is_empty() && !success {
        messages.push(("error".into(), None, String::new(), text(&out.stderr)));
    }
    CheckRun { success, messages }
}

fn compile(design: &Path, out: &Path, scaffold: Option<&Path>) -> Result<(), String> {
    let mut args = vec!["compile", design.to_str().unwrap(), "-o", out.to_str().unwrap()];
    if let Some(dir) = scaffold {
        args.extend(["--scaffold", dir.to_str().unwrap()]);
    }
    let o = scc(&args);
    ensure!(o.status.success(), "compile failed: {}", text(&o.stderr));
    Ok(())
}

/// Trait name to required member signatures, read from generated sources.
fn abstract_members(framework: &Path) -> BTreeMap<String, Vec<String>> {
    let mut out: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for entry in fs::read_dir(framework.join("generated")).unwrap() {
        let path = entry.unwrap().path();
        let file = syn::parse_file(&fs::read_to_string(&path).unwrap()).unwrap();
        for item in file.items {
            if let syn::Item::Trait(t) = item {
                for member in &t.items {
                    if let syn::TraitItem::Fn(f) = member {
                        if f.default.is_none() {
                            out.entry(t.ident.to_string()).or_default().push(f.sig.to_token_stream().to_string());
                        }
                    }
                }
            }
        }
    }
    out.values_mut().for_each(|v| v.sort());
    out
}

fn manifest_members(framework: &Path) -> BTreeMap<String, Vec<String>> {
    let manifest: Vec<serde_json::Value> =
        serde_json::from_str(&fs::read_to_string(framework.join("manifest.json")).unwrap()).unwrap();
    let mut out: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for point in manifest {
        let owner = match point["kind"].as_str().unwrap() {
            "DeployFactory" => "MainDeploy".to_owned(),
            _ => format!("Abstract{}", point["componentName"].as_str().unwrap()),
        };
        let sig: syn::TraitItemFn = syn::parse_str(&format!("{};", point["requiredSignature"].as_str().unwrap())).unwrap();
        out.entry(owner).or_default().push(sig.sig.to_token_stream().to_string());
    }
    out.values_mut().for_each(|v| v.sort());
    out
}

fn codegen_compile() -> Verdict {
    let copy = sim_copy();
    let framework = copy.root.join("framework");
    compile(&design_path(), &framework, None)?;
    let run = cargo_check(&copy, &framework);
    let framework_str = framework.display().to_string();
    let from_framework: Vec<_> = run.messages.iter().filter(|m| m.2.starts_with(&framework_str)).collect();
    ensure!(from_framework.is_empty(), "generated code diagnostics: {:?}", from_framework);
    ensure!(run.messages.is_empty(), "diagnostics: {:?}", run.messages);
    ensure!(run.success, "build failed");
    let (required, manifest) = (abstract_members(&framework), manifest_members(&framework));
    ensure!(required == manifest, "manifest {manifest:?} vs abstract members {required:?}");
    let points: usize = manifest.values().map(Vec::len).sum();
    Ok(format!("zero warnings, manifest = {points} abstract members"))
}

// ---------------------------------------------------------------- regeneration

fn snapshot(dirs: &[&Path]) -> BTreeMap<PathBuf, Vec<u8>> {
    fn walk(dir: &Path, out: &mut BTreeMap<PathBuf, Vec<u8>>) {
        for entry in fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(&path, out);
            } else {
                out.insert(path.clone(), fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    for d in dirs {
        walk(d, &mut out);
    }
    out
}

fn regeneration_safety() -> Verdict {
    let copy = sim_copy();
    let framework = copy.root.join("framework");
    let scaffold = copy.root.join("scaffold");
    compile(&design_path(), &framework, Some(&scaffold))?;
    // the developer fills in a stub
    let stub = scaffold.join("motion.rs");
    let mut edited = fs::read_to_string(&stub).unwrap();
    edited.push_str("// tuned by hand\n");
    fs::write(&stub, edited).unwrap();

    let developer = [copy.krate.join("src"), scaffold.clone()];
    let before = snapshot(&[&developer[0], &developer[1]]);

    let original = fs::read_to_string(design_path()).unwrap();
    let marker = "context Motion as Twist {\n";
    ensure!(original.contains(marker), "Motion declaration not found");
    let changed = original.replace(marker, &format!("{marker}  source ranges from LaserScan;\n"));
    let changed_path = copy.root.join("robot-v2.scc");
    fs::write(&changed_path, changed).unwrap();
    compile(&changed_path, &framework, Some(&scaffold))?;

    let after = snapshot(&[&developer[0], &developer[1]]);
    ensure!(before == after, "developer files changed: {:?}", {
        let changed: Vec<_> = after.keys().filter(|k| before.get(*k) != after.get(*k)).collect();
        changed
    });

    let run = cargo_check(&copy, &framework);
    ensure!(!run.success, "build unexpectedly succeeded");
    let errors: Vec<_> = run.messages.iter().filter(|m| m.0 == "error" && m.1.is_some()).collect();
    ensure!(errors.len() == 1, "expected one error, got {errors:#?}");
    let (_, code, _, rendered) = errors[0];
    ensure!(code.as_deref() == Some("E0046"), "got {code:?}: {rendered}");
    ensure!(rendered.contains("on_ranges"), "error does not name on_ranges: {rendered}");
    let others: Vec<&str> = ["on_random_motion", "on_twist", "on_mode"]
        .into_iter()
        .filter(|m| rendered.contains(m))
        .collect();
    ensure!(others.is_empty(), "error also names {others:?}");
    ensure!(
        run.messages.iter().all(|m| m.0 != "warning"),
        "warnings: {:?}",
        run.messages
    );
    Ok(format!("{} developer files untouched, single E0046 for on_ranges", before.len()))
}

// ---------------------------------------------------------------- dynamicity

fn handover() -> Result<String, String> {
    let map = bundled().remove(2).1;
    let options = SimOptions {
        mode: Mode::Exploration,
        trace: true,
        deliveries: true,
        ..SimOptions::default()
    };
    let mut sim = Simulation::new(map, options).map_err(|e| e.to_string())?;
    let first = sim.explorer_ids()[0].to_string();
    for _ in 0..25 {
        sim.step().map_err(|e| e.to_string())?;
    }
    let second = sim.add_explorer("explore-2").map_err(|e| e.to_string())?.to_string();
    for _ in 0..25 {
        sim.step().map_err(|e| e.to_string())?;
    }
    ensure!(sim.remove_explorer("explore-1"), "first explorer not found");
    for _ in 0..25 {
        sim.step().map_err(|e| e.to_string())?;
    }
    let trace = sim.take_trace();
    let received: Vec<_> = sim
        .take_deliveries()
        .into_iter()
        .filter(|d| d.consumer.starts_with("Motion#") && d.channel == "twist")
        .collect();
    let mut ts = HashMap::new();
    for who in [&first, &second] {
        let published: Vec<u64> = trace
            .iter()
            .filter(|t| &t.producer == who && t.channel == "twist")
            .map(|t| {
                ts.insert((who.clone(), t.seq), t.ts);
                t.seq
            })
            .collect();
        let got: Vec<u64> = received.iter().filter(|d| &d.producer == who).map(|d| d.seq).collect();
        ensure!(!published.is_empty() && published == got, "{who}: published {published:?}, received {got:?}");
    }
    let step = sim.config().dt_ms();
    let ticks: BTreeSet<u64> = received.iter().map(|d| ts[&(d.producer.clone(), d.seq)] / step).collect();
    ensure!(ticks == (1..=75).collect(), "ticks without explorer input");
    Ok(format!("{} twists delivered across the handover", received.len()))
}

#[derive(Default)]
struct Probe {
    inside: AtomicI64,
    overlapped: AtomicBool,
    received: AtomicU64,
    disorder: AtomicU64,
    last: Mutex<HashMap<ComponentId, u64>>,
}

struct Counting(Arc<Probe>);

impl Handler for Counting {
    fn on_event(&mut self, event: &Event, _: &mut Port) -> Result<(), RuntimeError> {
        if self.0.inside.fetch_add(1, Ordering::SeqCst) != 0 {
            self.0.overlapped.store(true, Ordering::SeqCst);
        }
        self.0.received.fetch_add(1, Ordering::SeqCst);
        let prev = self.0.last.lock().unwrap().insert(event.producer.clone(), event.seq);
        if prev.is_some_and(|p| p + 1 != event.seq) {
            self.0.disorder.fetch_add(1, Ordering::SeqCst);
        }
        self.0.inside.fetch_sub(1, Ordering::SeqCst);
        Ok(())
    }
}

struct Idle;
impl Handler for Idle {}

fn stress() -> Result<String, String> {
    const PRODUCERS: usize = 4;
    const EACH: usize = 25_000;
    let design = Design::default()
        .with_component(ComponentDecl::entity("Sensor").source("level", TypeDesc::Float))
        .with_component(ComponentDecl::context("Level", TypeDesc::Float).source_input(
            "Sensor",
            "level",
            Interaction::Push,
        ));
    let rt = Runtime::new(
        design,
        RuntimeConfig {
            queue_capacity: 64,
            ..RuntimeConfig::default()
        },
    );
    let probe = Arc::new(Probe::default());
    let level = rt.add_operator("Level", Box::new(Counting(probe.clone()))).map_err(|e| e.to_string())?;
    rt.subscribe(&level, DiscoveryQuery::all("Sensor"), "level").map_err(|e| e.to_string())?;
    let publishers: Vec<_> = (0..PRODUCERS)
        .map(|_| {
            let id = rt.register_entity_with("Sensor", vec![], |_| Box::new(Idle)).unwrap();
            rt.publisher(&id)
        })
        .collect();
    let sent = AtomicU64::new(0);
    thread::scope(|s| {
        for p in &publishers {
            let sent = &sent;
            s.spawn(move || {
                for i in 0..EACH {
                    p.publish("level", Value::Float(i as f64)).unwrap();
                    sent.fetch_add(1, Ordering::SeqCst);
                }
            });
        }
    });
    rt.settle();
    let (sent, got) = (sent.load(Ordering::SeqCst), probe.received.load(Ordering::SeqCst));
    ensure!(sent == 100_000 && got == sent, "sent {sent}, received {got}");
    ensure!(probe.disorder.load(Ordering::SeqCst) == 0, "out-of-order deliveries");
    ensure!(!probe.overlapped.load(Ordering::SeqCst), "callback reentered");
    ensure!(rt.reentrancy_violations() == 0, "runtime saw reentry");
    rt.shutdown();
    Ok(format!("{got} events in = out"))
}

fn runtime_dynamicity() -> Verdict {
    let a = handover()?;
    let b = stress()?;
    Ok(format!("{a}; {b}, FIFO, no reentry"))
}

// ---------------------------------------------------------------- random safety

fn random_mode_safety() -> Verdict {
    let started = Instant::now();
    let jobs: Vec<BatchJob> = bundled()
        .into_iter()
        .flat_map(|(name, map)| {
            (1..=5).map(move |seed| BatchJob {
                label: name.to_owned(),
                map: map.clone(),
                seed,
                steps: 10_000,
                mode: Mode::Random,
            })
        })
        .collect();
    let results = run_batch(&jobs, Execution::Parallel);
    for r in &results {
        ensure!(r.ticks == 10_000, "{} seed {} stopped at {}", r.label, r.seed, r.ticks);
        ensure!(r.collisions == 0, "{} seed {}: {} collisions", r.label, r.seed, r.collisions);
    }
    let elapsed = started.elapsed();
    ensure!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    Ok(format!("{} runs x 10^4 steps, zero collisions, {elapsed:?}", results.len()))
}

// ---------------------------------------------------------------- exploration

fn flood(map: &Map) -> Vec<(usize, usize)> {
    let mut seen = vec![false; map.width * map.height];
    let mut out = Vec::new();
    let mut queue = VecDeque::from([map.start]);
    seen[map.start.0 * map.width + map.start.1] = true;
    while let Some((r, c)) = queue.pop_front() {
        out.push((r, c));
        let around = [(r.wrapping_sub(1), c), (r + 1, c), (r, c.wrapping_sub(1)), (r, c + 1)];
        for (nr, nc) in around {
            if nr < map.height && nc < map.width && !seen[nr * map.width + nc] && !map.is_occupied((nr, nc)) {
                seen[nr * map.width + nc] = true;
                queue.push_back((nr, nc));
            }
        }
    }
    out
}

fn brute_frontier(w: usize, h: usize, occupied: &[bool], known: &[bool]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for r in 0..h {
        for c in 0..w {
            let i = r * w + c;
            let unknown = |rr: usize, cc: usize| rr < h && cc < w && !known[rr * w + cc];
            if known[i]
                && !occupied[i]
                && (unknown(r.wrapping_sub(1), c) || unknown(r + 1, c) || unknown(r, c.wrapping_sub(1)) || unknown(r, c + 1))
            {
                out.push((r, c));
            }
        }
    }
    out
}

fn exploration_completeness() -> Verdict {
    let started = Instant::now();
    let mut report = Vec::new();
    for (name, map) in bundled() {
        ensure!(map.width <= 60 && map.height <= 60, "{name} too large");
        let reachable = flood(&map);
        let options = SimOptions {
            mode: Mode::Exploration,
            ..SimOptions::default()
        };
        let mut sim = Simulation::new(map, options).map_err(|e| e.to_string())?;
        let mut last = sim.world().known_count();
        let mut monotone = true;
        sim.run(100_000, |_, r| {
            monotone &= r.known >= last;
            last = r.known;
        })
        .map_err(|e| e.to_string())?;
        let known = reachable.iter().filter(|&&c| sim.world().is_known(c)).count();
        let coverage = known as f64 / reachable.len() as f64;
        ensure!(sim.exploration_complete(), "{name}: did not terminate");
        ensure!(sim.frontier().is_empty(), "{name}: frontier not empty");
        ensure!(coverage >= 0.95, "{name}: coverage {coverage:.3}");
        ensure!(monotone, "{name}: known count decreased");
        report.push(format!("{name} {:.1}% in {} ticks", coverage * 100.0, sim.tick()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    for i in 0..200 {
        let density = rng.random_range(0.0..0.5);
        let rate = rng.random_range(0.0..1.0);
        let mut occupied: Vec<bool> = (0..1600).map(|_| rng.random_bool(density)).collect();
        let known: Vec<bool> = (0..1600).map(|_| rng.random_bool(rate)).collect();
        let start = rng.random_range(0..1600);
        occupied[start] = false;
        let map = Map::from_fn(40, 40, (start / 40, start % 40), |(r, c)| occupied[r * 40 + c]);
        let expected = brute_frontier(40, 40, &occupied, &known);
        ensure!(frontier_cells(&map, &known, Execution::Parallel) == expected, "map {i}: frontier differs");
        ensure!(frontier_cells(&map, &known, Execution::Sequential) == expected, "map {i}: sequential differs");
    }
    let elapsed = started.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!("{}; 200 oracle maps agree; {elapsed:?}", report.join(", ")))
}

// ---------------------------------------------------------------- zone

fn obstacle_zone_behavior() -> Verdict {
    let mut ticks = 0;
    let mut entries = 0;
    for (name, map) in bundled() {
        for (mode, seed) in [(Mode::Random, 1), (Mode::Random, 4), (Mode::Exploration, 0)] {
            let options = SimOptions {
                mode,
                seed,
                ..SimOptions::default()
            };
            let mut sim = Simulation::new(map.clone(), options).map_err(|e| e.to_string())?;
            let threshold = sim.config().zone_threshold;
            let (mut prev, mut rising) = (false, 0);
            for _ in 0..3_000 {
                let r = sim.step().map_err(|e| e.to_string())?;
                let min = r.ranges.iter().cloned().fold(f64::INFINITY, f64::min);
                let inside = min < threshold;
                rising += (inside && !prev) as usize;
                prev = inside;
                ensure!(r.light_on == inside, "{name} {mode:?} tick {}: light {}", r.tick, r.light_on);
                ensure!(sim.light_on() == inside, "{name}: light state");
                ensure!(r.pictures == rising, "{name} tick {}: {} pictures, {rising} entries", r.tick, r.pictures);
                ticks += 1;
            }
            entries += rising;
        }
    }
    Ok(format!("{ticks} ticks coherent, {entries} zone entries photographed"))
}

// ---------------------------------------------------------------- determinism

fn determinism() -> Verdict {
    let tmp = tempfile::tempdir().unwrap();
    let design = design_path();
    let mut traces = Vec::new();
    for run in ["a", "b"] {
        let path = tmp.path().join(format!("{run}.jsonl"));
        let out = scc(&[
            "simulate",
            design.to_str().unwrap(),
            "--map",
            "warehouse",
            "--seed",
            "7",
            "--steps",
            "1000",
            "--trace",
            path.to_str().unwrap(),
        ]);
        ensure!(out.status.success(), "simulate failed: {}", text(&out.stderr));
        traces.push(fs::read(&path).unwrap());
    }
    ensure!(!traces[0].is_empty(), "empty trace");
    ensure!(traces[0] == traces[1], "traces differ");
    let lines = traces[0].iter().filter(|&&b| b == b'\n').count();
    Ok(format!("{lines} identical trace lines"))
}

// ---------------------------------------------------------------- runner

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 9] = [
        ("case-study fidelity", case_study_fidelity),
        ("analyzer rule suite", analyzer_rule_suite),
        ("codegen compile test", codegen_compile),
        ("regeneration safety", regeneration_safety),
        ("runtime dynamicity", runtime_dynamicity),
        ("random-mode safety", random_mode_safety),
        ("exploration completeness", exploration_completeness),
        ("obstacle-zone behavior", obstacle_zone_behavior),
        ("determinism", determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let started = Instant::now();
        let verdict = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = started.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("PASS {name} ({secs:.2}s): {detail}"),
            Err(reason) => {
                failed += 1;
                println!("FAIL {name} ({secs:.2}s): {reason}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}
