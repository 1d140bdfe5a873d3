//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::any::Any;
use std::f64::consts::PI;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use holmc::bench::{self, BenchRow, FlowKind};
use holmc::format::{
    parse_instance, parse_solution, parse_trajectories, write_instance, write_solution, write_trajectories,
    ParseError,
};
use holmc_core::construction::{build, BuildMode, BuilderConfig};
use holmc_core::exact::solve_exact;
use holmc_core::kl::{self, Bipartition, Observer, Side, SolverConfig};
use holmc_core::model::{self, EdgeLabeling};
use holmc_core::motion::{
    angle_difference, estimate_euclidean_transform, triplet_distance, CostParams, EuclideanTransform, FlowStats,
    Trajectory, Vec2,
};
use holmc_core::synth::{generate_scene, presets, random_instance, score_partition, RandomInstanceSpec};
use holmc_core::{EdgeKind, LiftedHypergraph, NodePartition};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

/// Outer iteration counts of every heuristic run, for the convergence check.
#[derive(Default)]
struct Runs {
    runs: Vec<(String, usize, bool)>,
}

impl Runs {
    fn record(&mut self, what: impl Into<String>, sol: &kl::Solution) {
        self.runs.push((what.into(), sol.iterations, sol.converged));
    }
}

fn instance(nodes: usize, seed: u64) -> LiftedHypergraph {
    random_instance(
        &RandomInstanceSpec {
            nodes,
            ..RandomInstanceSpec::default()
        },
        seed,
    )
}

// ---------------------------------------------------------------------------
// independent brute force

fn find(parent: &mut [usize], mut v: usize) -> usize {
    while parent[v] != v {
        parent[v] = parent[parent[v]];
        v = parent[v];
    }
    v
}

/// Every class is connected by connectivity edges lying inside it.
fn classes_connected(g: &LiftedHypergraph, labels: &[usize]) -> bool {
    let n = g.node_count();
    let mut parent: Vec<usize> = (0..n).collect();
    for e in g.edges() {
        if e.kind != EdgeKind::Connectivity || !e.nodes.iter().all(|&v| labels[v] == labels[e.nodes[0]]) {
            continue;
        }
        for w in e.nodes.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[a] = b;
        }
    }
    let mut root_of_label = vec![usize::MAX; n];
    for v in 0..n {
        let r = find(&mut parent, v);
        let slot = &mut root_of_label[labels[v]];
        if *slot == usize::MAX {
            *slot = r;
        } else if *slot != r {
            return false;
        }
    }
    true
}

fn joined_cost(g: &LiftedHypergraph, labels: &[usize]) -> f64 {
    g.edges()
        .filter(|e| e.nodes.iter().all(|&v| labels[v] == labels[e.nodes[0]]))
        .map(|e| e.cost)
        .sum()
}

/// Calls `f` with every set partition of `0..n` as a restricted growth string.
fn for_each_partition(n: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(labels: &mut Vec<usize>, n: usize, max: usize, f: &mut dyn FnMut(&[usize])) {
        if labels.len() == n {
            f(labels);
            return;
        }
        let limit = if labels.is_empty() { 0 } else { max + 1 };
        for c in 0..=limit {
            labels.push(c);
            rec(labels, n, max.max(c), f);
            labels.pop();
        }
    }
    rec(&mut Vec::with_capacity(n), n, 0, f);
}

fn brute_force_optimum(g: &LiftedHypergraph) -> f64 {
    let mut best = f64::INFINITY;
    for_each_partition(g.node_count(), &mut |labels| {
        if classes_connected(g, labels) {
            best = best.min(joined_cost(g, labels));
        }
    });
    best
}

// ---------------------------------------------------------------------------

fn oracle_equivalence(runs: &mut Runs) -> Outcome {
    let start = Instant::now();
    let mut matched = 0;
    let mut lifted = 0;
    let mut edges = 0;
    for i in 0..200u64 {
        let n = 4 + (i % 5) as usize;
        let g = instance(n, 20_000 + i);
        lifted += g.count_edges(EdgeKind::Lifted, None);
        edges += g.edge_count();
        if g.edges().any(|e| !(-2.0..=2.0).contains(&e.cost)) {
            return Err(format!("instance {i}: cost outside [-2, 2]"));
        }
        let init = EdgeLabeling::uniform(&g, false);
        let sol = kl::solve(&g, &init, &SolverConfig::default()).map_err(|e| format!("instance {i}: {e}"))?;
        runs.record(format!("random instance {i}"), &sol);
        let exact = solve_exact(&g, 10).map_err(|e| e.to_string())?;
        let brute = brute_force_optimum(&g);
        if (exact.objective - brute).abs() > 1e-9 {
            return Err(format!("instance {i}: exact solver {} vs brute force {brute}", exact.objective));
        }
        if !model::is_feasible(&g, &sol.labeling) {
            return Err(format!("instance {i}: infeasible result"));
        }
        let recomputed = model::objective(&g, &sol.labeling);
        if (recomputed - sol.objective).abs() > 1e-9 {
            return Err(format!("instance {i}: reported {} but labeling costs {recomputed}", sol.objective));
        }
        if sol.objective > model::objective(&g, &init) + 1e-9 {
            return Err(format!("instance {i}: worse than the start"));
        }
        if sol.objective < brute - 1e-9 {
            return Err(format!("instance {i}: {} below the optimum {brute}", sol.objective));
        }
        if sol.objective <= brute + 1e-9 {
            matched += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 60.0 {
        return Err(format!("took {secs:.1} s"));
    }
    Ok(format!(
        "200 instances, optimum matched on {matched}/200 ({:.1}%), lifted share {:.1}%, {secs:.2} s",
        matched as f64 / 2.0,
        100.0 * lifted as f64 / edges as f64
    ))
}

/// Objective decrease of moving `w` to the other side, from scratch.
fn scratch_gain(bp: &Bipartition<'_>, w: usize) -> f64 {
    let g = bp.graph();
    let n = g.node_count();
    let labels = |flip: Option<usize>| -> Vec<usize> {
        (0..n)
            .map(|u| match bp.side(u) {
                None => 2 * n + u,
                Some(s) if (s == Side::A) != (flip == Some(u)) => n,
                Some(_) => n + 1,
            })
            .collect()
    };
    joined_cost(g, &labels(None)) - joined_cost(g, &labels(Some(w)))
}

#[derive(Default)]
struct GainCheck {
    checked: usize,
    worst: f64,
}

impl Observer for GainCheck {
    fn on_move(&mut self, bp: &Bipartition<'_>) {
        for w in bp.candidates() {
            let incremental = bp.gain(w).expect("candidates carry a gain");
            self.worst = self.worst.max((incremental - scratch_gain(bp, w)).abs());
            self.checked += 1;
        }
    }
}

fn gain_exactness(runs: &mut Runs) -> Outcome {
    let mut check = GainCheck::default();
    for i in 0..50u64 {
        let g = instance(5 + (i % 4) as usize, 30_000 + i);
        let sol = kl::solve_observed(&g, &EdgeLabeling::uniform(&g, false), &SolverConfig::default(), &mut check)
            .map_err(|e| e.to_string())?;
        runs.record(format!("gain replay {i}"), &sol);
    }
    if check.checked == 0 {
        return Err("no gains were replayed".into());
    }
    let msg = format!("{} gains on 50 instances, max error {:.1e}", check.checked, check.worst);
    if check.worst <= 1e-9 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn feasibility_semantics() -> Outcome {
    let mut graphs = 0;
    let mut labelings = 0u64;
    let mut accepted = 0u64;
    for i in 0..300u64 {
        let n = 1 + (i % 5) as usize;
        let g = instance(n, 40_000 + i);
        let m = g.edge_count();
        if m > 16 {
            continue;
        }
        graphs += 1;
        let mut induced = std::collections::BTreeSet::new();
        for_each_partition(n, &mut |labels| {
            if classes_connected(&g, labels) {
                let y: Vec<bool> = g
                    .edges()
                    .map(|e| e.nodes.iter().all(|&v| labels[v] == labels[e.nodes[0]]))
                    .collect();
                induced.insert(y);
            }
        });
        for bits in 0u32..1 << m {
            let y: Vec<bool> = (0..m).map(|e| bits >> e & 1 == 1).collect();
            let expected = induced.contains(&y);
            let y = EdgeLabeling::new(y);
            let feasible = model::is_feasible(&g, &y);
            labelings += 1;
            if feasible != expected {
                return Err(format!("instance {i}, labeling {bits:b}: is_feasible says {feasible}"));
            }
            if feasible {
                accepted += 1;
                let violations = model::local_diagnostics(&g, &y);
                if !violations.is_empty() {
                    return Err(format!("instance {i}: accepted labeling {bits:b} violates {violations:?}"));
                }
            }
        }
    }
    if graphs < 100 {
        return Err(format!("only {graphs} instances were small enough"));
    }
    Ok(format!("{graphs} instances with N <= 5, {labelings} labelings, {accepted} feasible"))
}

fn two_frame(p: Vec2, m: &EuclideanTransform) -> Trajectory {
    Trajectory::new(0, 0, vec![p, m.apply(p)]).expect("finite points")
}

fn motion_recovery() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut worst_model, mut worst_third) = (0.0f64, 0.0f64);
    let mut done = 0;
    while done < 1000 {
        let m = EuclideanTransform::new(
            rng.random_range(-PI..PI),
            rng.random_range(0.25..4.0),
            Vec2::new(rng.random_range(-100.0..100.0), rng.random_range(-100.0..100.0)),
        );
        let mut point = || Vec2::new(rng.random_range(-200.0..200.0), rng.random_range(-200.0..200.0));
        let (a, b, c) = (point(), point(), point());
        if a.distance(b) < 1.0 {
            continue;
        }
        done += 1;
        let est = estimate_euclidean_transform(&two_frame(a, &m), &two_frame(b, &m), 0, 1).map_err(|e| e.to_string())?;
        worst_model = worst_model
            .max(angle_difference(est.angle, m.angle).abs())
            .max((est.scale - m.scale).abs())
            .max(est.translation.distance(m.translation));
        worst_third = worst_third.max(triplet_distance(&est, &two_frame(c, &m), 0, 1).map_err(|e| e.to_string())?);
    }
    let msg = format!("1000 motions, max parameter error {worst_model:.1e}, max third-point distance {worst_third:.1e}");
    if worst_model <= 1e-6 && worst_third <= 1e-6 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

struct Segmentation {
    rand: f64,
    classes: usize,
}

fn segment(
    trajectories: &[Trajectory],
    truth: &[usize],
    config: &BuilderConfig,
    label: &str,
    runs: &mut Runs,
) -> Result<Segmentation, String> {
    let g = build(trajectories, &FlowStats::default(), &CostParams::default(), config).map_err(|e| e.to_string())?;
    let sol = kl::solve(&g, &EdgeLabeling::uniform(&g, false), &SolverConfig::default()).map_err(|e| e.to_string())?;
    runs.record(label, &sol);
    let s = score_partition(sol.partition.labels(), truth).map_err(|e| e.to_string())?;
    Ok(Segmentation {
        rand: s.rand_index,
        classes: sol.partition.num_classes(),
    })
}

fn rotation_scene(runs: &mut Runs) -> Outcome {
    let start = Instant::now();
    let mut lines = Vec::new();
    for seed in 0..3u64 {
        let spec = presets::rotation_scene(seed, 0.3);
        let scene = generate_scene(&spec).map_err(|e| e.to_string())?;
        let n = scene.trajectories.len();
        if !(150..=300).contains(&n) || spec.frames != 20 {
            return Err(format!("scene has {n} trajectories over {} frames", spec.frames));
        }
        let aomc = BuilderConfig {
            mode: BuildMode::Adaptive,
            lifted: true,
            seed,
            ..BuilderConfig::default()
        };
        let pairwise = BuilderConfig {
            mode: BuildMode::Pairwise,
            lifted: false,
            seed,
            ..BuilderConfig::default()
        };
        let a = segment(&scene.trajectories, &scene.labels, &aomc, &format!("rotation aomc {seed}"), runs)?;
        let p = segment(&scene.trajectories, &scene.labels, &pairwise, &format!("rotation pairwise {seed}"), runs)?;
        let line = format!(
            "seed {seed}: {n} trajectories, lifted aomc rand {:.3} ({} classes), pairwise rand {:.3} ({} classes)",
            a.rand, a.classes, p.rand, p.classes
        );
        if !(a.rand >= 0.95 && p.classes > a.classes && p.rand < a.rand) {
            return Err(line);
        }
        lines.push(line);
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 120.0 {
        return Err(format!("took {secs:.1} s"));
    }
    Ok(format!("{}; {secs:.2} s", lines.join("; ")))
}

fn lifted_disambiguation(runs: &mut Runs) -> Outcome {
    let spec = presets::separated_objects_scene(2, 10.0, 6, 5, 0);
    let scene = generate_scene(&spec).map_err(|e| e.to_string())?;
    let n = scene.trajectories.len();
    if n != 8 {
        return Err(format!("fixture has {n} trajectories"));
    }
    let truth = NodePartition::from_labels(&scene.labels);
    let lifted = BuilderConfig {
        mode: BuildMode::Adaptive,
        lifted: true,
        lift_knn: 3,
        ..BuilderConfig::default()
    };
    let plain = BuilderConfig {
        mode: BuildMode::Pairwise,
        lifted: false,
        ..BuilderConfig::default()
    };
    let params = CostParams::default();
    let gl = build(&scene.trajectories, &FlowStats::default(), &params, &lifted).map_err(|e| e.to_string())?;
    let gp = build(&scene.trajectories, &FlowStats::default(), &params, &plain).map_err(|e| e.to_string())?;
    let long_range = gp
        .edges()
        .filter(|e| e.nodes.len() == 2 && scene.labels[e.nodes[0]] != scene.labels[e.nodes[1]])
        .count();
    if long_range == 0 {
        return Err("the pairwise graph has no edges between the objects".into());
    }
    let opt_l = solve_exact(&gl, 10).map_err(|e| e.to_string())?;
    let opt_p = solve_exact(&gp, 10).map_err(|e| e.to_string())?;
    for (g, opt) in [(&gl, &opt_l), (&gp, &opt_p)] {
        if (brute_force_optimum(g) - opt.objective).abs() > 1e-9 {
            return Err("exact solver disagrees with brute force".into());
        }
    }
    let kl_l = kl::solve(&gl, &EdgeLabeling::uniform(&gl, false), &SolverConfig::default()).map_err(|e| e.to_string())?;
    runs.record("disambiguation lifted", &kl_l);
    let kl_p = kl::solve(&gp, &EdgeLabeling::uniform(&gp, false), &SolverConfig::default()).map_err(|e| e.to_string())?;
    runs.record("disambiguation pairwise", &kl_p);
    let msg = format!(
        "classes at the optimum: lifted {} (objective {}), pairwise {} ({long_range} cross edges); heuristic: lifted {}, pairwise {}",
        opt_l.partition.num_classes(),
        opt_l.objective,
        opt_p.partition.num_classes(),
        kl_l.partition.num_classes(),
        kl_p.partition.num_classes()
    );
    if opt_l.partition == truth && opt_p.partition == NodePartition::single_class(n) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn scaling(runs: &mut Runs) -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for lifted in [false, true] {
        let rows: Vec<BenchRow> =
            bench::run_sweep(3..=7, FlowKind::Composite, lifted, 3, &SolverConfig::default()).map_err(|e| e.to_string())?;
        for r in &rows {
            runs.runs.push((format!("grid k={} lifted={lifted}", r.k), r.iterations, r.converged));
        }
        let points: Vec<_> = rows.iter().map(|r| (r.higher_order_edges as f64, r.seconds)).collect();
        let slope = bench::loglog_slope(&points).ok_or("degenerate timings")?;
        let slowest = rows.iter().map(|r| r.seconds).fold(0.0, f64::max);
        ok &= slope <= 1.3 && slowest < 150.0;
        let table: Vec<String> = rows
            .iter()
            .map(|r| format!("k={} {}e {:.4}s rand {:.3}", r.k, r.higher_order_edges, r.seconds, r.rand_index))
            .collect();
        parts.push(format!(
            "{}: slope {slope:.3}, slowest {slowest:.3} s [{}]",
            if lifted { "lifted" } else { "plain" },
            table.join(", ")
        ));
    }
    let msg = parts.join("; ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn convergence(runs: &Runs) -> Outcome {
    let worst = runs.runs.iter().max_by_key(|r| r.1).ok_or("no runs recorded")?;
    if let Some(bad) = runs.runs.iter().find(|r| r.1 > 50 || !r.2) {
        return Err(format!("{}: {} iterations, converged {}", bad.0, bad.1, bad.2));
    }
    Ok(format!("{} runs, at most {} outer iterations ({})", runs.runs.len(), worst.1, worst.0))
}

// ---------------------------------------------------------------------------
// formats

fn fixture(name: &str) -> Result<String, String> {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name].iter().collect();
    fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))
}

fn position_ok(text: &str, e: &ParseError) -> bool {
    let lines = text.lines().count().max(1);
    let width = text.lines().nth(e.line.wrapping_sub(1)).map_or(1, |l| l.chars().count() + 1);
    e.line >= 1 && e.line <= lines && e.column >= 1 && e.column <= width
}

const TOKENS: &[&str] = &[
    "HOLMC", "TRAJ", "nodes", "edge", "traj", "objective", "F", "L", "0", "1", "2", "3", "7", "-1", "0.5", "1e-7",
    "1e400", "NaN", "inf", "-", "#", " ", "\n", "\t", "\r\n", "ß", "18446744073709551616", "",
];

fn mutate(rng: &mut ChaCha8Rng, base: &str) -> String {
    let mut parts: Vec<String> = base.split_inclusive(char::is_whitespace).map(str::to_owned).collect();
    for _ in 0..rng.random_range(1..6) {
        let tok = TOKENS[rng.random_range(0..TOKENS.len())].to_owned();
        if parts.is_empty() {
            parts.push(tok);
            continue;
        }
        let i = rng.random_range(0..parts.len());
        match rng.random_range(0..4) {
            0 => {
                parts.remove(i);
            }
            1 => parts.insert(i, tok),
            2 => parts[i] = tok,
            _ => {
                let j = rng.random_range(0..parts.len());
                parts.swap(i, j);
            }
        }
    }
    parts.concat()
}

fn format_stability() -> Outcome {
    let goldens = [
        ("path_lifted.txt", "path_lifted_canonical.txt"),
        ("triangle.txt", "triangle.txt"),
    ];
    for (input, canonical) in goldens {
        let want = fixture(canonical)?;
        let want = if input == canonical {
            want.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect()
        } else {
            want
        };
        let g = parse_instance(&fixture(input)?).map_err(|e| format!("{input}: {e}"))?;
        if write_instance(&g) != want {
            return Err(format!("{input} does not serialize to {canonical}"));
        }
        let again = write_instance(&parse_instance(&want).map_err(|e| e.to_string())?);
        if again != want {
            return Err(format!("{canonical} is not a fixed point"));
        }
    }
    let t = parse_trajectories(&fixture("trajectories.txt")?).map_err(|e| e.to_string())?;
    if write_trajectories(&t) != fixture("trajectories_canonical.txt")? {
        return Err("trajectory golden differs".into());
    }
    for (input, canonical) in [("labels.txt", "labels_canonical.txt"), ("triangle_solution.txt", "triangle_solution.txt")] {
        let s = parse_solution(&fixture(input)?).map_err(|e| e.to_string())?;
        if write_solution(&s) != fixture(canonical)? {
            return Err(format!("{input} does not serialize to {canonical}"));
        }
    }

    let bases = [
        fixture("path_lifted.txt")?,
        fixture("trajectories.txt")?,
        fixture("triangle_solution.txt")?,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut rejected, mut accepted) = (0, 0);
    let previous_hook = panic::take_hook();
    panic::set_hook(Box::new(|_| {}));
    let result = (|| {
        for round in 0..3000 {
            let text = if round % 10 == 9 {
                let bytes: Vec<u8> = (0..rng.random_range(0..120)).map(|_| rng.random()).collect();
                String::from_utf8_lossy(&bytes).into_owned()
            } else {
                mutate(&mut rng, &bases[round % 3])
            };
            let outcome = panic::catch_unwind(|| {
                [
                    parse_instance(&text).map(|g| write_instance(&g)),
                    parse_trajectories(&text).map(|t| write_trajectories(&t)),
                    parse_solution(&text).map(|s| write_solution(&s)),
                ]
            });
            let Ok(results) = outcome else {
                return Err(format!("parser panicked on {text:?}"));
            };
            for r in results {
                match r {
                    Ok(_) => accepted += 1,
                    Err(e) if position_ok(&text, &e) => rejected += 1,
                    Err(e) => return Err(format!("bad position {e} for {text:?}")),
                }
            }
        }
        Ok(())
    })();
    panic::set_hook(previous_hook);
    result?;
    Ok(format!(
        "5 golden files round-trip; 3000 fuzzed inputs x 3 parsers: {rejected} rejected with positions, {accepted} accepted, no panics"
    ))
}

// ---------------------------------------------------------------------------

fn describe_panic(payload: Box<dyn Any + Send>) -> String {
    payload
        .downcast_ref::<String>()
        .cloned()
        .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_else(|| "panic".into())
}

fn main() -> ExitCode {
    let mut runs = Runs::default();
    let mut failed = 0;
    let mut report = |name: &str, outcome: Result<Outcome, Box<dyn Any + Send>>| {
        let outcome = outcome.unwrap_or_else(|p| Err(format!("panicked: {}", describe_panic(p))));
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    };
    let run = |f: &mut dyn FnMut(&mut Runs) -> Outcome, runs: &mut Runs| {
        panic::catch_unwind(AssertUnwindSafe(|| f(runs)))
    };
    let r = run(&mut oracle_equivalence, &mut runs);
    report("oracle equivalence", r);
    let r = run(&mut gain_exactness, &mut runs);
    report("gain exactness", r);
    let r = run(&mut |_| feasibility_semantics(), &mut runs);
    report("feasibility semantics", r);
    let r = run(&mut |_| motion_recovery(), &mut runs);
    report("motion model recovery", r);
    let r = run(&mut rotation_scene, &mut runs);
    report("rotation/scaling scene", r);
    let r = run(&mut lifted_disambiguation, &mut runs);
    report("lifted disambiguation", r);
    let r = run(&mut scaling, &mut runs);
    report("scaling sweep", r);
    let r = run(&mut |runs| convergence(runs), &mut runs);
    report("convergence", r);
    let r = run(&mut |_| format_stability(), &mut runs);
    report("format stability", r);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
