//! Acceptance run. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. Pass criterion numbers as arguments to run a
//! subset: `cargo test --test acceptance -- 3 5`.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use pathmc_core::chain::{grand_coupling_step, run_with};
use pathmc_core::oracle::{
    build_transition_matrix, curvature_scan, empirical_tv, enumerate_family, geodesic_check, geodesic_step,
    sandwich_closure_check, tv_from_counts, Endpoint, FamilyEnumeration,
};
use pathmc_core::{
    cftp_sample, coupling_time, d1, default_steps, partial_le, CouplingOutcome, FamilyConstraint, FamilyKind,
    FamilySpec, FlipInstruction, Init, LatticePath, StepParams, TupleStream, WeightMode, WeightTable,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

type Criterion = (u32, &'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn spec(n: usize, a: i64, b: i64, c: FamilyConstraint) -> FamilySpec {
    FamilySpec::new(StepParams::new(n, a, b).unwrap(), c).unwrap()
}

fn label(s: &FamilySpec) -> String {
    let p = s.params();
    let mut out = format!("{} n={} a={} b={}", s.constraint().kind(), p.n(), p.a(), p.b());
    if let FamilyConstraint::Wall { h, r, s } = s.constraint() {
        write!(out, " wall=({h},{r},{s})").unwrap();
    }
    out
}

/// Families × (a,b) ∈ {(1,1),(1,2)} × n ∈ {6,8}, skipping empty excursions.
fn instance_grid() -> Vec<FamilySpec> {
    let mut out = Vec::new();
    for n in [6usize, 8] {
        for (a, b) in [(1i64, 1i64), (1, 2)] {
            let wall = FamilyConstraint::Wall {
                h: 2,
                r: 3,
                s: n - 2,
            };
            for c in [
                FamilyConstraint::Meander,
                FamilyConstraint::Excursion,
                FamilyConstraint::Culminating,
                wall,
            ] {
                if let Ok(s) = FamilySpec::new(StepParams::new(n, a, b).unwrap(), c) {
                    out.push(s);
                }
            }
        }
    }
    out
}

fn uniform_pair(rng: &mut impl Rng, e: &FamilyEnumeration) -> (LatticePath, LatticePath) {
    let m = e.members();
    (m[rng.gen_range(0..m.len())].clone(), m[rng.gen_range(0..m.len())].clone())
}

fn criterion_1() -> Outcome {
    let mut worst_stationarity = 0.0f64;
    let mut worst_asymmetry = 0.0f64;
    let mut worst_rows = 0.0f64;
    let grid = instance_grid();
    for s in &grid {
        let e = enumerate_family(s).unwrap();
        let p = build_transition_matrix(s, &WeightTable::new(s.n(), WeightMode::Quadratic), &e).unwrap();
        worst_stationarity = worst_stationarity.max(p.stationarity_error());
        worst_asymmetry = worst_asymmetry.max(p.max_asymmetry());
        worst_rows = worst_rows.max(p.max_row_sum_error());
    }
    Outcome {
        pass: worst_stationarity <= 1e-12 && worst_asymmetry == 0.0 && worst_rows <= 1e-12,
        detail: format!(
            "{} instances, max |uP-u| = {worst_stationarity:.2e}, max |P-P^T| = {worst_asymmetry:.2e}, max row error = {worst_rows:.2e}",
            grid.len()
        ),
    }
}

fn criterion_2() -> Outcome {
    let mut failures = Vec::new();
    let grid = instance_grid();
    for s in &grid {
        let e = enumerate_family(s).unwrap();
        let report = geodesic_check(s, &e);
        if !report.pass {
            let (i, j, g, d) = report.counterexample.unwrap();
            failures.push(format!(
                "{}: BFS {} vs d1 {d} for {} / {} (connected: {})",
                label(s),
                g.map_or("unreachable".to_string(), |g| g.to_string()),
                e.members()[i],
                e.members()[j],
                report.connected
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x6e0d + s.n() as u64);
        let mut bad_steps = 0u64;
        let mut first_bad = None;
        for _ in 0..10_000 {
            let (x, y) = uniform_pair(&mut rng, &e);
            if x == y {
                continue;
            }
            let before = d1(&x, &y).unwrap();
            let outcome = geodesic_step(&x, &y, s).map(|mv| {
                let other = if mv.replaced == Endpoint::First { &y } else { &x };
                (s.is_member(&mv.path), d1(&mv.path, other).unwrap())
            });
            let ok = matches!(outcome, Ok((true, after)) if after + 1 == before);
            if !ok {
                bad_steps += 1;
                first_bad.get_or_insert_with(|| format!("{x} / {y} -> {outcome:?} from {before}"));
            }
        }
        if bad_steps > 0 {
            failures.push(format!(
                "{}: geodesic_step missed on {bad_steps} pairs, e.g. {}",
                label(s),
                first_bad.unwrap()
            ));
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("{} instances, BFS = d1 on all pairs, 10^4 random steps each", grid.len())
        } else {
            failures.join("; ")
        },
    }
}

/// The bound must hold on every instance. Equality pairs and uniform-weight
/// witnesses need room away from the constraints, so each is required once
/// per family kind.
fn criterion_3() -> Outcome {
    let mut failures = Vec::new();
    let mut lines = Vec::new();
    let kinds = [FamilyKind::Meander, FamilyKind::Excursion, FamilyKind::Wall];
    let mut equality_seen = [0usize; 3];
    let mut uniform_seen = [0usize; 3];
    let mut instances = [0usize; 3];
    for s in instance_grid().iter().filter(|s| !s.is_culminating()) {
        let k = kinds.iter().position(|&k| k == s.constraint().kind()).unwrap();
        instances[k] += 1;
        let e = enumerate_family(s).unwrap();
        let q = WeightTable::new(s.n(), WeightMode::Quadratic);
        let kappa = q.effective_kappa().unwrap();
        let report = curvature_scan(s, &q, &e);
        if report.min_contraction < kappa - 1e-12 {
            failures.push(format!("{}: min {} < {kappa}", label(s), report.min_contraction));
        }
        let equality = 1.0 - q.kappa0() / q.z();
        let interior = report
            .pairs_at(equality, 1e-12)
            .filter(|p| p.position > 1 && p.position < s.n())
            .count();
        if interior > 0 {
            equality_seen[k] += 1;
        }
        let uniform = curvature_scan(s, &WeightTable::new(s.n(), WeightMode::Uniform), &e);
        if uniform.min_contraction <= 1e-12 {
            uniform_seen[k] += 1;
        }
        lines.push(format!(
            "{}: min {:.3e} vs {kappa:.3e}",
            label(s),
            report.min_contraction
        ));
    }
    for (k, kind) in kinds.iter().enumerate() {
        if equality_seen[k] == 0 {
            failures.push(format!("{kind}: no interior pair at 1 - k0/Z"));
        }
        if uniform_seen[k] == 0 {
            failures.push(format!("{kind}: no zero-contraction pair under uniform weights"));
        }
        lines.push(format!(
            "{kind}: equality pairs in {}/{} instances, uniform zero witness in {}/{}",
            equality_seen[k], instances[k], uniform_seen[k], instances[k]
        ));
    }
    if !failures.is_empty() {
        lines.insert(0, failures.join("; "));
    }
    Outcome {
        pass: failures.is_empty(),
        detail: lines.join("; "),
    }
}

fn criterion_4() -> Outcome {
    let mut failures = Vec::new();
    let mut lines = Vec::new();
    for s in [spec(6, 1, 1, FamilyConstraint::Excursion), spec(8, 1, 1, FamilyConstraint::Meander)] {
        let n = s.n() as f64;
        let e = enumerate_family(&s).unwrap();
        let q = WeightTable::new(s.n(), WeightMode::Quadratic);
        let kappa = q.effective_kappa().unwrap();
        let p = build_transition_matrix(&s, &q, &e).unwrap();
        let tv = p.worst_tv_decay(10_000);
        let diam = n * (n + 1.0) / 2.0;
        let mut tightest = 0.0f64;
        for (t, v) in tv.iter().enumerate() {
            let bound = diam * (1.0 - kappa).powi(t as i32);
            tightest = tightest.max(v / bound);
            if *v > bound + 1e-12 {
                failures.push(format!("{}: t={t} TV {v} > {bound}", label(&s)));
                break;
            }
        }
        lines.push(format!("{}: max TV/bound {tightest:.3e} over t <= 10^4", label(&s)));
    }
    Outcome {
        pass: failures.is_empty(),
        detail: if failures.is_empty() { lines.join("; ") } else { failures.join("; ") },
    }
}

fn criterion_5() -> Outcome {
    let s = spec(8, 1, 1, FamilyConstraint::Excursion);
    let e = enumerate_family(&s).unwrap();
    let q = WeightTable::new(8, WeightMode::Quadratic);
    let samples: Vec<LatticePath> = (0..50_000u64)
        .into_par_iter()
        .map(|k| cftp_sample(&s, &q, 0xc0ffee + k, 1, pathmc_core::cftp::DEFAULT_CAP).unwrap().path)
        .collect();
    let mut counts = vec![0u64; e.len()];
    for p in &samples {
        counts[e.index_of(p).unwrap()] += 1;
    }
    let expected = samples.len() as f64 / e.len() as f64;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let pvalue = ChiSquared::new((e.len() - 1) as f64).unwrap().sf(chi2);
    let tv = empirical_tv(&samples, &e).unwrap();
    Outcome {
        pass: e.len() == 14 && pvalue > 0.001 && tv <= 0.02,
        detail: format!("|family| = {}, chi2 = {chi2:.2}, p = {pvalue:.4}, TV = {tv:.4}", e.len()),
    }
}

fn criterion_6() -> Outcome {
    let s = spec(6, 1, 1, FamilyConstraint::Meander);
    let e = enumerate_family(&s).unwrap();
    let q = WeightTable::new(6, WeightMode::Quadratic);
    let steps = default_steps(6, 0.01);
    let runs = 100_000u64;
    let indices: Vec<usize> = (0..runs)
        .into_par_iter()
        .map(|k| {
            let p = run_with(&s, &q, steps, 0x5eed_0000 + k, Init::Top, |_, _| {}).unwrap();
            e.index_of(&p).unwrap()
        })
        .collect();
    let mut counts = vec![0u64; e.len()];
    for i in indices {
        counts[i] += 1;
    }
    let tv = tv_from_counts(&counts);
    Outcome {
        pass: tv <= 0.05,
        detail: format!("T = {steps}, {runs} runs over {} members, TV = {tv:.4}", e.len()),
    }
}

fn criterion_7() -> Outcome {
    let mut failures = Vec::new();
    let mut pairs_checked = 0u64;
    for n in 1..=8usize {
        for (a, b) in [(1i64, 1i64), (1, 2), (2, 1), (2, 3)] {
            for c in [
                FamilyConstraint::Meander,
                FamilyConstraint::Excursion,
                FamilyConstraint::Culminating,
                FamilyConstraint::Wall { h: 2, r: 2, s: n.min(5) },
            ] {
                let Ok(s) = FamilySpec::new(StepParams::new(n, a, b).unwrap(), c) else {
                    continue;
                };
                let e = enumerate_family(&s).unwrap();
                for x in e.members() {
                    for y in e.members().iter().filter(|y| partial_le(x, y)) {
                        pairs_checked += 1;
                        for f in FlipInstruction::all(n) {
                            let next = grand_coupling_step(&[x.clone(), y.clone()], &f, &s);
                            if !partial_le(&next[0], &next[1]) {
                                failures.push(format!("{}: {x} <= {y} broken by {f:?}", label(&s)));
                            }
                        }
                    }
                }
            }
        }
    }

    // Any two culminating paths, ordered or not, driven by one stream.
    let mut sup_violations = Vec::new();
    let mut coupled_steps = 0u64;
    for (n, a, b) in [(8usize, 1i64, 1i64), (10, 1, 2), (12, 2, 1), (20, 1, 1)] {
        let s = spec(n, a, b, FamilyConstraint::Culminating);
        let q = WeightTable::new(n, WeightMode::Quadratic);
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        for restart in 0..25u64 {
            let stream = TupleStream::new(1000 * n as u64 + restart);
            let start = |seed| pathmc_core::mcmc_run(&s, &q, 5_000, seed, Init::Top).unwrap();
            let mut pair = [start(rng.gen()), start(rng.gen())];
            let mut sup = sup_norm(&pair[0], &pair[1]);
            for t in 1..=100i64 {
                let f = stream.tuple(t, &q);
                let next = grand_coupling_step(&pair, &f, &s);
                pair = [next[0].clone(), next[1].clone()];
                coupled_steps += 1;
                let now = sup_norm(&pair[0], &pair[1]);
                if now > sup && sup_violations.len() < 3 {
                    sup_violations.push(format!("{}: {sup} -> {now} under {f:?}", label(&s)));
                }
                sup = now;
            }
        }
    }
    let mut detail = format!("{pairs_checked} ordered pairs x 4n tuples");
    if !failures.is_empty() {
        write!(detail, "; order broken {} times, e.g. {}", failures.len(), failures[0]).unwrap();
    }
    write!(detail, "; culminating sup-norm over {coupled_steps} coupled steps: ").unwrap();
    if sup_violations.is_empty() {
        detail.push_str("non-increasing");
    } else {
        write!(detail, "increased, e.g. {}", sup_violations.join(", ")).unwrap();
    }
    Outcome {
        pass: failures.is_empty() && sup_violations.is_empty(),
        detail,
    }
}

fn sup_norm(x: &LatticePath, y: &LatticePath) -> i64 {
    x.heights()
        .iter()
        .zip(y.heights())
        .map(|(p, q)| (p - q).abs())
        .max()
        .unwrap_or(0)
}

fn criterion_8() -> Outcome {
    let sizes = [16usize, 32, 64, 128];
    let mut points = Vec::new();
    let mut failures = Vec::new();
    for &n in &sizes {
        let s = spec(n, 1, 1, FamilyConstraint::Meander);
        let q = WeightTable::new(n, WeightMode::Quadratic);
        let times: Vec<CouplingOutcome> = (0..200u64)
            .into_par_iter()
            .map(|k| coupling_time(&s, &q, 0xabc0_0000 + k, pathmc_core::cftp::DEFAULT_CAP))
            .collect();
        let coalesced: Vec<f64> = times.iter().filter_map(|o| o.steps()).map(|t| t as f64).collect();
        if coalesced.len() != times.len() {
            failures.push(format!("n={n}: {} runs hit the cap", times.len() - coalesced.len()));
        }
        let mean = coalesced.iter().sum::<f64>() / coalesced.len().max(1) as f64;
        points.push(((n as f64).ln(), mean.ln(), mean));
    }
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let slope = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let means: Vec<String> = sizes
        .iter()
        .zip(&points)
        .map(|(n, p)| format!("n={n}: {:.3e}", p.2))
        .collect();
    Outcome {
        pass: failures.is_empty() && (2.3..=3.7).contains(&slope),
        detail: format!("slope {slope:.3} ({}){}", means.join(", "), if failures.is_empty() { String::new() } else { format!("; {}", failures.join(", ")) }),
    }
}

fn per_step_time(n: usize, steps: u64) -> Duration {
    let s = spec(n, 1, 1, FamilyConstraint::Meander);
    let q = WeightTable::new(n, WeightMode::Quadratic);
    // Warm the path away from 1̂ so the timed window sees typical states.
    let warm = pathmc_core::mcmc_run(&s, &q, steps / 10, 17, Init::Top).unwrap();
    let start = Instant::now();
    let out = pathmc_core::mcmc_run(&s, &q, steps, 18, Init::Explicit(warm)).unwrap();
    let elapsed = start.elapsed();
    std::hint::black_box(out);
    elapsed / steps as u32
}

fn criterion_9() -> Outcome {
    let steps = 10_000_000u64;
    // Best of three to keep scheduler noise out of the ratio.
    let best = |n| (0..3).map(|_| per_step_time(n, steps)).min().unwrap();
    let small = best(1_000);
    let large = best(100_000);
    let ratio = large.as_secs_f64() / small.as_secs_f64();
    Outcome {
        pass: ratio <= 3.0,
        detail: format!(
            "{steps} steps each: n=10^3 {:.1} ns/step, n=10^5 {:.1} ns/step, ratio {ratio:.2}",
            small.as_secs_f64() * 1e9,
            large.as_secs_f64() * 1e9
        ),
    }
}

fn criterion_10() -> Outcome {
    let mut failures = Vec::new();
    let mut witnesses = Vec::new();
    for n in 2..=8usize {
        for (a, b) in [(1i64, 1i64), (1, 2)] {
            for c in [
                FamilyConstraint::Meander,
                FamilyConstraint::Excursion,
                FamilyConstraint::Wall { h: 2, r: 3, s: n.max(3) },
                FamilyConstraint::Culminating,
            ] {
                let Ok(s) = FamilySpec::new(StepParams::new(n, a, b).unwrap(), c) else {
                    continue;
                };
                let report = sandwich_closure_check(&s, &enumerate_family(&s).unwrap()).unwrap();
                match (s.constraint().kind(), report.holds) {
                    (FamilyKind::Culminating, false) => {
                        if n == 8 {
                            let (r, m, t) = report.witness.unwrap();
                            witnesses.push(format!("{}: {r} <= {m} <= {t}", label(&s)));
                        }
                    }
                    (FamilyKind::Culminating, true) => {
                        if n == 8 {
                            failures.push(format!("{}: no witness", label(&s)));
                        }
                    }
                    (_, true) => {}
                    (_, false) => failures.push(format!("{}: {:?}", label(&s), report.witness)),
                }
            }
        }
    }
    Outcome {
        pass: failures.is_empty() && !witnesses.is_empty(),
        detail: if failures.is_empty() {
            format!("lower-bound families closed for n <= 8; culminating witnesses {}", witnesses.join(", "))
        } else {
            failures.join("; ")
        },
    }
}

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "uniform stationarity", criterion_1),
        (2, "geodesic moves", criterion_2),
        (3, "neighbour contraction", criterion_3),
        (4, "TV decay bound", criterion_4),
        (5, "CFTP exactness", criterion_5),
        (6, "MCMC uniformity", criterion_6),
        (7, "monotone coupling", criterion_7),
        (8, "coupling time scaling", criterion_8),
        (9, "per-step cost", criterion_9),
        (10, "sandwich closure", criterion_10),
    ];
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, name, run) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {id:>2} {status} {name} [{:.1}s]: {}",
            start.elapsed().as_secs_f64(),
            outcome.detail
        );
        if !outcome.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
