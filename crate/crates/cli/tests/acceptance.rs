//! Acceptance suite. Runs without the libtest harness and prints one
//! `PASS`/`FAIL` line per criterion; exits non-zero if any criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use mrf_recovery::bounds::{
    epsilon1, f1, f2, g1, g2, h2, kappa1, kappa2, lemma3_l, ln_mle_failure_regime1,
    mle_success_lower_regime1, mle_success_lower_regime2, necessary_condition_violated_regime1,
    necessary_condition_violated_regime2, r_function, sufficient_condition_regime1,
    sufficient_condition_regime2, GraphShape,
};
use mrf_recovery::figures::{generate, FigureId, FigureSpec, Panel};
use mrf_recovery::graph::{
    build_family, cheeger_closed_form, cheeger_exact, CheegerPolicy, Graph, GraphFamily,
};
use mrf_recovery::mle::{mle_edge_node_with, mle_edge_only_with, MleOptions};
use mrf_recovery::model::ModelParams;
use mrf_recovery::montecarlo::{grid_configs, sweep, GraphSpec, McSummary, TrialConfig};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: f64, what: &str) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_s, || {
        format!("{what} took {:.1}s, limit {limit_s}s", elapsed.as_secs_f64())
    })
}

fn shape_of(g: &Graph) -> GraphShape {
    let m = g.metrics(&CheegerPolicy::default()).expect("metrics");
    GraphShape::from_graph(g, &m).expect("shape")
}

fn closed_shape(family: GraphFamily) -> GraphShape {
    let (n, e, d, phi) = common::closed_form_shape(&family);
    GraphShape::new(n, e, d, phi).expect("shape")
}

fn table_metrics() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for n in [4usize, 6, 8, 10, 12] {
        for family in [
            GraphFamily::Complete { n },
            GraphFamily::Chain { n },
            GraphFamily::Star { n },
        ] {
            let g = build_family(&family).map_err(|e| e.to_string())?;
            let cut = cheeger_exact(&g).map_err(|e| e.to_string())?;
            // Compare boundary/size with the closed form as exact fractions.
            let (num, den) = match family {
                GraphFamily::Complete { n } => (n, 2),
                GraphFamily::Chain { n } => (2, n),
                _ => (1, 1),
            };
            ensure(cut.boundary * den == num * cut.size, || {
                format!("{family}: exact {}/{} vs {num}/{den}", cut.boundary, cut.size)
            })?;
            ensure(cheeger_closed_form(&family) == Some(cut.value()), || {
                format!("{family}: closed form disagrees with enumeration")
            })?;
            checked += 1;
        }
    }
    within(start.elapsed(), 5.0, "metric table")?;
    Ok(format!("{checked} graphs match n/2, 2/n, 1 exactly"))
}

fn assouad_oracle() -> Outcome {
    let start = Instant::now();
    let ps = [0.0, 0.01, 0.1, 0.25, 0.4, 0.5];
    let qs = [0.02, 0.15, 0.3, 0.45];
    let mut worst: f64 = 0.0;
    let mut points = 0;
    for &p in &ps[1..] {
        for &q in &qs {
            points += 1;
            for delta in 1..=12 {
                let e2 = (f2(p, q, delta) - common::tv_f2(p, q, delta)).abs();
                worst = worst.max(e2);
                ensure(e2 < 1e-10, || format!("f2({p},{q},{delta}) off by {e2:e}"))?;
            }
        }
    }
    for &p in &ps {
        for delta in 1..=12 {
            let e1 = (f1(p, delta) - common::tv_f1(p, delta)).abs();
            worst = worst.max(e1);
            ensure(e1 < 1e-10, || format!("f1({p},{delta}) off by {e1:e}"))?;
        }
    }
    within(start.elapsed(), 30.0, "oracle comparison")?;
    Ok(format!(
        "{points} (p,q) points and {} p values, delta 1..=12, max error {worst:.1e}",
        ps.len()
    ))
}

fn analytic_anchors() -> Outcome {
    for delta in 1..=30 {
        ensure(f1(0.5, delta) == 0.5, || format!("f1(1/2, {delta}) = {}", f1(0.5, delta)))?;
        ensure(f1(0.0, delta) == 0.0, || format!("f1(0, {delta}) = {}", f1(0.0, delta)))?;
    }
    let ln2 = std::f64::consts::LN_2;
    let mut shapes = vec![
        closed_shape(GraphFamily::Complete { n: 4 }),
        closed_shape(GraphFamily::Complete { n: 9 }),
        closed_shape(GraphFamily::Complete { n: 30 }),
        closed_shape(GraphFamily::Chain { n: 10 }),
        closed_shape(GraphFamily::Star { n: 12 }),
    ];
    for (n, d) in [(12, 4), (16, 6), (20, 3)] {
        let g = build_family(&GraphFamily::RegularExpander { n, d, seed: 2 }).unwrap();
        shapes.push(shape_of(&g));
    }
    for s in &shapes {
        let (n, e) = (s.n as f64, s.num_edges as f64);
        let g_half = g1(0.5, s.n, s.num_edges);
        ensure((g_half - (n - 1.0) / n).abs() <= 1e-15, || {
            format!("g1(1/2) = {g_half} for n = {}", s.n)
        })?;
        let k1 = kappa1(s, 0.5).map_err(|e| e.to_string())?;
        let want1 = e * ln2;
        ensure((k1 - want1).abs() <= 1e-10 * want1.max(1.0), || {
            format!("kappa1(1/2) = {k1}, expected {want1} ({s:?})")
        })?;
        let k2 = kappa2(s, 0.5, 0.5).map_err(|e| e.to_string())?;
        let want2 = (e + n) * ln2 * 0.5 * (1.0 + (-n).exp2());
        ensure((k2 - want2).abs() <= 1e-10 * want2.max(1.0), || {
            format!("kappa2(1/2,1/2) = {k2}, expected {want2} ({s:?})")
        })?;
    }
    Ok(format!(
        "f1 endpoints exact for delta 1..=30; g1, kappa1, kappa2 at 1/2 on {} graphs",
        shapes.len()
    ))
}

fn condition_algebra() -> Outcome {
    let mut rng = StdRng::seed_from_u64(4);
    let mut counts = [0u32; 4];
    for _ in 0..200 {
        let shape = match rng.random_range(0..4) {
            0 => closed_shape(GraphFamily::Complete { n: rng.random_range(4..3000) }),
            1 => closed_shape(GraphFamily::Star { n: rng.random_range(4..200) }),
            2 => closed_shape(GraphFamily::Chain { n: 2 * rng.random_range(2..100) }),
            _ => {
                let n = 2 * rng.random_range(3..9);
                let d = rng.random_range(2..n);
                let seed = rng.random();
                shape_of(&build_family(&GraphFamily::RegularExpander { n, d, seed }).unwrap())
            }
        };
        let p: f64 = rng.random_range(0.0..0.5);
        let q = rng.random_range(1e-3..0.5);
        let params = ModelParams::edge_and_node(p.max(1e-6), q).map_err(|e| e.to_string())?;
        let n = shape.n as f64;

        if necessary_condition_violated_regime1(&shape, p).unwrap() {
            counts[0] += 1;
            let g = g1(p, shape.n, shape.num_edges);
            ensure(g >= 0.5 - 1e-12, || format!("g1 = {g} < 1/2 at {shape:?}, p = {p}"))?;
        }
        let pp = params.p();
        if necessary_condition_violated_regime2(&shape, pp, q).unwrap() {
            counts[1] += 1;
            let g = g2(pp, q, shape.n, shape.num_edges);
            ensure(g >= 0.5 - 1e-12, || format!("g2 = {g} < 1/2 at {shape:?}, p = {pp}, q = {q}"))?;
        }
        if sufficient_condition_regime1(&shape, p).unwrap() {
            counts[2] += 1;
            let b = mle_success_lower_regime1(&shape, p).unwrap().clamp(0.0, 1.0);
            ensure(b >= 1.0 - 2.0 / n, || format!("bound {b} < 1 - 2/n at {shape:?}, p = {p}"))?;
        }
        if sufficient_condition_regime2(&shape, &params).unwrap() {
            counts[3] += 1;
            let b = mle_success_lower_regime2(&shape, &params).unwrap().clamp(0.0, 1.0);
            ensure(b >= 1.0 - 5.0 / n, || {
                format!("bound {b} < 1 - 5/n at {shape:?}, p = {pp}, q = {q}")
            })?;
        }
    }
    ensure(counts.iter().all(|&c| c > 0), || {
        format!("grid never exercised some implication: {counts:?}")
    })?;
    Ok(format!(
        "200 points; implications exercised {}/{}/{}/{} times (necessary I/II, sufficient I/II)",
        counts[0], counts[1], counts[2], counts[3]
    ))
}

fn monotonicity_lemmas() -> Outcome {
    let grid: Vec<f64> = (1..=9).map(|i| i as f64 * 0.05).collect();
    let zs = [0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 100.0, 500.0, 1000.0];
    let mut min_r = f64::INFINITY;
    for &p in &grid {
        for &q in &grid {
            let mut prev = lemma3_l(0, p, q);
            for n in 1..=50 {
                let l = lemma3_l(n, p, q);
                ensure(l <= prev * (1.0 + 1e-12), || {
                    format!("l({n}) = {l} > l({}) = {prev} at p = {p}, q = {q}", n - 1)
                })?;
                prev = l;
            }
            if q < 0.5 {
                let params = ModelParams::edge_and_node(p, q).map_err(|e| e.to_string())?;
                let h = |z: f64, w: f64| h2(&params, z, w).unwrap();
                for &fixed in &zs {
                    for pair in zs.windows(2) {
                        let (a, b) = (pair[0], pair[1]);
                        ensure(h(b, fixed) <= h(a, fixed), || {
                            format!("h2 increases in z from {a} to {b} (w = {fixed}, p = {p}, q = {q})")
                        })?;
                        ensure(h(fixed, b) <= h(fixed, a), || {
                            format!("h2 increases in w from {a} to {b} (z = {fixed}, p = {p}, q = {q})")
                        })?;
                    }
                }
                let r = r_function(p, q).map_err(|e| e.to_string())?;
                min_r = min_r.min(r);
                ensure(r > 0.5, || format!("r({p}, {q}) = {r}"))?;
            }
        }
    }
    Ok(format!("l(n) and h2 monotone on the 9x9 grid; min r = {min_r:.4}"))
}

fn mle_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(6);
    let opts = MleOptions {
        parallel: true,
        ..MleOptions::default()
    };
    let mut tied = 0;
    for instance in 0..500 {
        let n = rng.random_range(2..=12);
        let g = common::random_connected_graph(n, rng.random_range(0.1..0.9), &mut rng);
        let x: Vec<i8> = (0..g.num_edges())
            .map(|_| if rng.random_bool(0.5) { 1 } else { -1 })
            .collect();
        let (got, want) = if instance % 2 == 0 {
            (
                mle_edge_only_with(&g, &x, &opts).map_err(|e| e.to_string())?,
                common::naive_mle(&g, &x, None),
            )
        } else {
            let c: Vec<i8> = (0..n).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect();
            // Every fourth node instance uses p = q, where alpha is exactly 1.
            let params = if instance % 4 == 1 {
                let p = rng.random_range(0.01..0.49);
                ModelParams::edge_and_node(p, p)
            } else {
                ModelParams::edge_and_node(rng.random_range(0.01..0.49), rng.random_range(0.01..0.49))
            }
            .map_err(|e| e.to_string())?;
            let alpha = params.alpha().unwrap();
            (
                mle_edge_node_with(&g, &x, &c, alpha, &opts).map_err(|e| e.to_string())?,
                common::naive_mle(&g, &x, Some((&c, alpha))),
            )
        };
        ensure(got.argmax.as_slice() == want.argmax.as_slice(), || {
            format!("instance {instance}: argmax {:?} vs {:?}", got.argmax, want.argmax)
        })?;
        ensure(got.score == want.score && got.ties == want.ties, || {
            format!(
                "instance {instance}: (score, ties) ({}, {}) vs ({}, {})",
                got.score, got.ties, want.score, want.ties
            )
        })?;
        if want.ties > 1 {
            tied += 1;
        }
    }
    within(start.elapsed(), 60.0, "solver comparison")?;
    Ok(format!("500 instances agree ({tied} with tied optima)"))
}

fn validation_grid() -> Vec<GraphFamily> {
    let mut graphs = Vec::new();
    graphs.extend((10..=14).map(|n| GraphFamily::Complete { n }));
    graphs.extend((10..=16).map(|n| GraphFamily::Star { n }));
    graphs.extend((10..=16).map(|n| GraphFamily::Chain { n }));
    graphs.extend([4, 6].map(|d| GraphFamily::RegularExpander { n: 12, d, seed: 0 }));
    graphs
}

fn monte_carlo() -> Outcome {
    const TRIALS: u64 = 2000;
    let start = Instant::now();
    let levels = [0.01, 0.05, 0.1, 0.2];
    let mut params: Vec<ModelParams> = levels.iter().map(|&p| ModelParams::edge_only(p).unwrap()).collect();
    for &p in &levels {
        for &q in &levels {
            params.push(ModelParams::edge_and_node(p, q).unwrap());
        }
    }
    let mut cells: Vec<McSummary> = Vec::new();
    for (i, family) in validation_grid().into_iter().enumerate() {
        let cfgs = grid_configs(&GraphSpec::Family(family), &params, TRIALS, 1000 + i as u64, None);
        cells.extend(sweep(&cfgs).map_err(|e| e.to_string())?);
    }
    let bad: Vec<String> = cells
        .iter()
        .filter(|c| !c.consistent())
        .map(|c| {
            format!(
                "{} p={} q={:?}: rate {} vs bound {} (slack {:.4}), nec {}",
                c.graph,
                c.p,
                c.q,
                c.rate,
                c.bounds.mle_success_lower,
                c.slack(),
                c.necessary_condition_violated
            )
        })
        .collect();
    ensure(bad.is_empty(), || format!("{} inconsistent cells: {}", bad.len(), bad.join("; ")))?;
    let nec = cells.iter().filter(|c| c.necessary_condition_violated).count();
    let nonvacuous = cells.iter().filter(|c| c.bounds.mle_success_lower > 0.0).count();
    let elapsed = start.elapsed().as_secs_f64();
    ensure(elapsed < 600.0, || format!("grid took {elapsed:.0}s"))?;
    Ok(format!(
        "{} cells x {TRIALS} trials; {nonvacuous} non-vacuous bounds dominated, {nec} necessary-condition cells fail >= 1/2; {:.0}s on {} threads",
        cells.len(),
        elapsed,
        std::thread::available_parallelism().map_or(1, |n| n.get())
    ))
}

fn panel<'a>(panels: &'a [Panel], name: &str) -> Result<&'a Panel, String> {
    panels
        .iter()
        .find(|p| p.name == name)
        .ok_or_else(|| format!("missing panel {name}"))
}

fn figure_anchors() -> Outcome {
    let fig3 = generate(&FigureSpec::new(FigureId::Fig3)).map_err(|e| e.to_string())?;
    let mut trees = 0;
    let mut non_trees = 0;
    for family in FigureId::Fig3.default_graphs() {
        let (n, e) = match family {
            GraphFamily::RegularExpander { n, d, .. } => (n, n * d / 2),
            other => {
                let (n, e, _, _) = common::closed_form_shape(&other);
                (n, e)
            }
        };
        let pn = fig3
            .iter()
            .find(|p| p.graph.as_deref() == Some(family.to_string().as_str()))
            .ok_or_else(|| format!("no panel for {family}"))?;
        let ps = pn.column("p").unwrap();
        let g = pn.column("g1").unwrap();
        if e == n - 1 {
            trees += 1;
            for (p, g) in ps.iter().zip(&g) {
                ensure(*p == 0.0 || *g > 0.0, || format!("{family}: g1({p}) = {g}"))?;
            }
        } else {
            non_trees += 1;
            let want = (n as f64 - 1.0 - e as f64) / n as f64;
            ensure(ps[0] == 0.0 && (g[0] - want).abs() < 1e-12, || {
                format!("{family}: g1(0) = {}, expected {want}", g[0])
            })?;
        }
    }
    let dense = panel(&fig3, "fig3_expander-n64-d60-s0")?;
    ensure(
        dense.column("tractable_lower_clamped").unwrap().iter().all(|&v| v == 0.0),
        || "n=64, d=60 tractable bound is not identically zero".into(),
    )?;

    let mut q_rows = 0;
    for id in [FigureId::Fig4, FigureId::AppendixB1, FigureId::AppendixB2] {
        let mut spec = FigureSpec::new(id);
        spec.q_values = vec![1e-3];
        for pn in generate(&spec).map_err(|e| e.to_string())? {
            let (f, g) = (pn.column("f2").unwrap(), pn.column("g2").unwrap());
            for (i, (f, g)) in f.iter().zip(&g).enumerate() {
                q_rows += 1;
                ensure(f >= g, || format!("{}: f2 = {f} < g2 = {g} at row {i}", pn.name))?;
            }
        }
    }

    let render = || -> Result<Vec<String>, String> {
        let mut out = Vec::new();
        for id in FigureId::ALL {
            for pn in generate(&FigureSpec::new(id)).map_err(|e| e.to_string())? {
                out.push(pn.to_csv());
            }
        }
        Ok(out)
    };
    let first = render()?;
    let second = render()?;
    ensure(first == second, || "CSV output differs between runs".into())?;
    Ok(format!(
        "{trees} tree and {non_trees} non-tree panels anchored, dense expander vacuous, f2 >= g2 on {q_rows} rows at q = 0.001, {} CSV files identical across runs",
        first.len()
    ))
}

fn decay_ratio() -> Outcome {
    let mut lines = Vec::new();
    for p in [0.05, 0.1, 0.2, 0.3] {
        let mut prev = f64::INFINITY;
        let mut row = Vec::new();
        for n in [50usize, 100, 200] {
            let shape = closed_shape(GraphFamily::Complete { n });
            let ln_fail = ln_mle_failure_regime1(&shape, p).map_err(|e| e.to_string())?;
            let eps = epsilon1(&shape, p).map_err(|e| e.to_string())?;
            let ratio = (ln_fail - eps.ln()).exp();
            ensure(ratio.is_finite() && ratio > 0.0, || {
                format!("ratio at n = {n}, p = {p} is {ratio}")
            })?;
            ensure(ratio < prev, || format!("ratio not decreasing at n = {n}, p = {p}"))?;
            // Where it is representable, the log form agrees with 1 - bound.
            let direct = 1.0 - mle_success_lower_regime1(&shape, p).unwrap();
            if direct > 1e-6 {
                ensure((direct / ln_fail.exp() - 1.0).abs() < 1e-6, || {
                    format!("log-space failure bound disagrees at n = {n}, p = {p}")
                })?;
            }
            prev = ratio;
            row.push(format!("{ratio:.2e}"));
        }
        lines.push(format!("p={p}: {}", row.join(" > ")));
    }
    Ok(lines.join(", "))
}

fn simulate_json(workers: usize, dir: &std::path::Path) -> Result<Vec<u8>, String> {
    let path = dir.join(format!("w{workers}.json"));
    let status = Command::new(env!("CARGO_BIN_EXE_mrf-recovery"))
        .args(["simulate", "--family", "complete", "--n", "12", "--p", "0.05", "--q", "0.2"])
        .args(["--trials", "400", "--seed", "7", "--workers", &workers.to_string()])
        .arg("--out")
        .arg(&path)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(status.status.success(), || {
        format!("simulate exited with {:?}", status.status.code())
    })?;
    std::fs::read(&path).map_err(|e| e.to_string())
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let reference = simulate_json(1, dir.path())?;
    for workers in [4, 8, 1] {
        let again = simulate_json(workers, dir.path())?;
        ensure(again == reference, || format!("JSON differs with {workers} workers"))?;
    }
    let cfg = |workers| TrialConfig {
        graph: GraphSpec::Family(GraphFamily::Chain { n: 12 }),
        params: ModelParams::edge_only(0.1).unwrap(),
        trials: 500,
        master_seed: 99,
        workers: Some(workers),
    };
    let base = serde_json::to_string(&sweep(&[cfg(1)]).map_err(|e| e.to_string())?).unwrap();
    for workers in [4, 8] {
        let other = serde_json::to_string(&sweep(&[cfg(workers)]).map_err(|e| e.to_string())?).unwrap();
        ensure(other == base, || format!("library summary differs with {workers} workers"))?;
    }
    Ok(format!(
        "simulate output ({} bytes) identical for 1/4/8 workers and on repeat",
        reference.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("metric table", table_metrics),
        ("assouad terms vs total-variation oracle", assouad_oracle),
        ("analytic anchors", analytic_anchors),
        ("condition algebra", condition_algebra),
        ("lemma monotonicity", monotonicity_lemmas),
        ("gray-code solver vs naive solver", mle_oracle),
        ("monte carlo bound dominance", monte_carlo),
        ("figure anchors and csv determinism", figure_anchors),
        ("finite-n decay ratio", decay_ratio),
        ("simulation determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
