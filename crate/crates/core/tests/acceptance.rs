//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. Every check computes its oracle in this
//! file, independently of the library, before comparing.

mod common;

use std::collections::{BTreeMap, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use lingprobe::analysis::resource_gap;
use lingprobe::archive::{ArchiveMeta, FORMAT_VERSION};
use lingprobe::dataset::rng::SeededRng;
use lingprobe::dataset::{
    constant_schedule, linear_schedule, split, synthesize, SplitSpec, SyntheticConfig,
};
use lingprobe::fixtures::cities_final_layer_surfaces;
use lingprobe::{
    accuracy, cosine_similarity, objective_and_gradient, predict, read_archive, run_experiment,
    train_probe, Archive, HeatmapLayers, LanguageTag, Probe, ProbeConfig, ResourceClass, TrainSet,
};
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

type Verdict = Result<String, String>;

/// Name, check and optional runtime limit.
type Criterion = (&'static str, fn() -> Verdict, Option<Duration>);

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// Independent oracles

/// ln(1 + e^z) without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Regularized cross-entropy written out directly from its definition.
fn naive_objective(x: &[Vec<f64>], y: &[u8], w: &[f64], b: f64, lambda: f64) -> f64 {
    let n = x.len() as f64;
    let loss: f64 = x
        .iter()
        .zip(y)
        .map(|(row, &label)| {
            let z: f64 = row.iter().zip(w).map(|(a, c)| a * c).sum::<f64>() + b;
            softplus(z) - f64::from(label) * z
        })
        .sum::<f64>()
        / n;
    loss + lambda / (2.0 * n) * w.iter().map(|v| v * v).sum::<f64>()
}

fn normal_rows(rng: &mut SeededRng, n: usize, d: usize, scale: f64) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..d).map(|_| scale * rng.standard_normal()).collect())
        .collect()
}

fn both_class_labels(rng: &mut SeededRng, n: usize) -> Vec<u8> {
    loop {
        let y: Vec<u8> = (0..n).map(|_| rng.below(2) as u8).collect();
        if y.contains(&0) && y.contains(&1) {
            return y;
        }
    }
}

fn train_set(x: &[Vec<f64>], y: &[u8]) -> TrainSet<f64> {
    TrainSet::from_rows(x, y.to_vec()).unwrap()
}

// 1. Gradient oracle

fn gradient_oracle() -> Verdict {
    const H: f64 = 1e-5;
    const TOL: f64 = 1e-5;
    let lambdas = [0.0, 0.1, 1.0, 10.0];
    let mut rng = SeededRng::new(20_241);
    let mut worst: f64 = 0.0;
    let mut coords = 0usize;
    for instance in 0..100 {
        let n = 1 + rng.below(50) as usize;
        let d = 1 + rng.below(20) as usize;
        let lambda = lambdas[instance % 4];
        let x = normal_rows(&mut rng, n, d, 1.5);
        let y: Vec<u8> = (0..n).map(|_| rng.below(2) as u8).collect();
        let w: Vec<f64> = (0..d).map(|_| rng.standard_normal()).collect();
        let b = rng.standard_normal();

        let mut fd = Vec::with_capacity(d + 1);
        for k in 0..=d {
            let (mut wp, mut wm, mut bp, mut bm) = (w.clone(), w.clone(), b, b);
            if k < d {
                wp[k] += H;
                wm[k] -= H;
            } else {
                bp += H;
                bm -= H;
            }
            let jp = naive_objective(&x, &y, &wp, bp, lambda);
            let jm = naive_objective(&x, &y, &wm, bm, lambda);
            fd.push((jp - jm) / (2.0 * H));
        }

        let eval = objective_and_gradient(&w, b, &train_set(&x, &y), lambda).unwrap();
        let want_j = naive_objective(&x, &y, &w, b, lambda);
        if (eval.value - want_j).abs() > 1e-12 * want_j.abs().max(1.0) {
            return Err(format!(
                "instance {instance}: objective {} vs naive {want_j}",
                eval.value
            ));
        }
        let analytic: Vec<f64> = eval
            .grad_weights
            .iter()
            .copied()
            .chain([eval.grad_bias])
            .collect();
        for (a, f) in analytic.iter().zip(&fd) {
            let rel = (a - f).abs() / a.abs().max(f.abs()).max(1e-6);
            worst = worst.max(rel);
            coords += 1;
        }
    }
    check(
        worst <= TOL,
        format!("{coords} coordinates over 100 instances, worst relative error {worst:.2e} (limit {TOL:.0e})"),
    )
}

// 2. Optimizer oracle: grid search plus compass refinement

fn brute_force_minimum(x: &[Vec<f64>], y: &[u8], lambda: f64) -> f64 {
    let n = x.len() as f64;
    let d = x[0].len();
    // J(0, 0) = ln 2 bounds the minimizer: lambda/(2n) |w|^2 <= ln 2, and one
    // sample of each class keeps |b| within n ln 2 + |w| max|x|.
    let w_max = (2.0 * n * std::f64::consts::LN_2 / lambda).sqrt();
    let x_max = x
        .iter()
        .map(|r| r.iter().map(|v| v * v).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let b_max = n * std::f64::consts::LN_2 + w_max * x_max;
    let mut bounds = vec![w_max; d];
    bounds.push(b_max);

    let f = |p: &[f64]| naive_objective(x, y, &p[..d], p[d], lambda);
    const STEPS: usize = 40;
    let dims = d + 1;
    let total = (STEPS + 1).pow(dims as u32);
    let mut best = vec![0.0; dims];
    let mut best_j = f(&best);
    let mut p = vec![0.0; dims];
    for idx in 0..total {
        let mut rest = idx;
        for k in 0..dims {
            let i = rest % (STEPS + 1);
            rest /= STEPS + 1;
            p[k] = -bounds[k] + 2.0 * bounds[k] * i as f64 / STEPS as f64;
        }
        let j = f(&p);
        if j < best_j {
            best_j = j;
            best.copy_from_slice(&p);
        }
    }

    let mut step: Vec<f64> = bounds.iter().map(|b| 2.0 * b / STEPS as f64).collect();
    let mut iterations = 0;
    while step.iter().cloned().fold(0.0, f64::max) > 1e-11 && iterations < 2_000_000 {
        iterations += 1;
        let mut improved = false;
        for k in 0..dims {
            for sign in [1.0, -1.0] {
                let mut q = best.clone();
                q[k] += sign * step[k];
                let j = f(&q);
                if j < best_j {
                    best_j = j;
                    best = q;
                    improved = true;
                }
            }
        }
        if !improved {
            step.iter_mut().for_each(|s| *s *= 0.5);
        }
    }
    best_j
}

fn optimizer_oracle() -> Verdict {
    let lambdas = [0.1, 1.0, 10.0];
    let mut rng = SeededRng::new(77);
    let cases: Vec<(Vec<Vec<f64>>, Vec<u8>, f64)> = (0..50)
        .map(|i| {
            let n = 2 + rng.below(15) as usize;
            let d = 1 + rng.below(2) as usize;
            let x = normal_rows(&mut rng, n, d, 1.0);
            (x, both_class_labels(&mut rng, n), lambdas[i % 3])
        })
        .collect();
    let results: Vec<(f64, f64, f64)> = cases
        .par_iter()
        .map(|(x, y, lambda)| {
            let oracle = brute_force_minimum(x, y, *lambda);
            let data = train_set(x, y);
            let probe = train_probe(&data, &ProbeConfig::with_lambda(*lambda)).unwrap();
            let got = naive_objective(x, y, &probe.weights, probe.bias, *lambda);
            let eval = objective_and_gradient(&probe.weights, probe.bias, &data, *lambda).unwrap();
            let g = eval
                .grad_weights
                .iter()
                .chain([&eval.grad_bias])
                .fold(0.0f64, |m, v| m.max(v.abs()));
            (got, oracle, g)
        })
        .collect();
    let worst_gap = results
        .iter()
        .map(|(g, o, _)| (g - o).abs())
        .fold(0.0, f64::max);
    let worst_grad = results.iter().map(|r| r.2).fold(0.0, f64::max);
    check(
        worst_gap <= 1e-6 && worst_grad <= 1e-6,
        format!(
            "50 instances, max |J - J_oracle| = {worst_gap:.2e}, max |grad|_inf = {worst_grad:.2e}"
        ),
    )
}

// 3. Symmetric 1-D case

fn symmetric_one_d() -> Verdict {
    // By symmetry b* = 0 and J(w) = softplus(-w) + w^2 / 4, so the optimum
    // solves w / 2 = sigma(-w).
    let sigma = |z: f64| 1.0 / (1.0 + (-z).exp());
    let mut w = 0.0f64;
    for _ in 0..100 {
        let g = w / 2.0 - sigma(-w);
        let h = 0.5 + sigma(w) * sigma(-w);
        w -= g / h;
    }
    let data = TrainSet::new(vec![-1.0, 1.0], vec![0, 1], 1).unwrap();
    let config = ProbeConfig {
        convergence_tol: 1e-12,
        ..ProbeConfig::with_lambda(1.0)
    };
    let probe = train_probe(&data, &config).unwrap();
    let dw = (probe.weights[0] - w).abs();
    let db = probe.bias.abs();
    check(
        dw <= 1e-9 && db <= 1e-9,
        format!(
            "Newton w* = {w:.12}, probe w = {:.12} (|diff| {dw:.1e}), |b| = {db:.1e}, gradient tolerance 1e-12",
            probe.weights[0]
        ),
    )
}

// Synthetic helpers shared by the synthetic-language and Bayes checks

fn synthetic(
    dim: usize,
    samples: usize,
    schedule: Vec<f64>,
    direction_seed: u64,
    noise_seed: u64,
) -> Archive {
    let mut cfg = SyntheticConfig::new(dim, samples, schedule);
    cfg.direction_seed = direction_seed;
    cfg.noise_seed = noise_seed;
    synthesize(&cfg).unwrap()
}

/// Held-out accuracy at every slot, with an 8:2 split drawn from `split_seed`.
fn accuracy_curve(archive: &Archive, split_seed: u64) -> Vec<f64> {
    let ids = &archive.meta().sample_ids;
    let parts = split(
        ids,
        &SplitSpec {
            seed: split_seed,
            ..SplitSpec::default()
        },
    )
    .unwrap();
    let rows = |part: &[String]| -> Vec<usize> {
        part.iter()
            .map(|id| archive.sample_index(id).unwrap())
            .collect()
    };
    let (train_rows, test_rows) = (rows(&parts.train), rows(&parts.test));
    let test = archive.select_samples(&test_rows).unwrap();
    (0..archive.meta().num_layers)
        .into_par_iter()
        .map(|l| {
            let probe = final_probe(archive, l, &train_rows);
            let features: Vec<f64> = test
                .layer(l)
                .unwrap()
                .iter()
                .map(|&v| f64::from(v))
                .collect();
            accuracy(&predict(&probe, &features).unwrap().labels, test.labels()).unwrap()
        })
        .collect()
}

fn final_probe(archive: &Archive, layer: usize, train_rows: &[usize]) -> Probe<f64> {
    let data = archive.train_set::<f64>(layer, Some(train_rows)).unwrap();
    train_probe(&data, &ProbeConfig::default()).unwrap()
}

// 4. Depth-dependent vs flat separability

fn depth_separability() -> Verdict {
    const SLOTS: usize = 25;
    let per_seed: Vec<(f64, f64)> = (0..5u64)
        .map(|seed| {
            let high = synthetic(64, 2000, linear_schedule(SLOTS, 0.0, 6.0), seed, 100 + seed);
            let low = synthetic(64, 2000, constant_schedule(SLOTS, 0.5), seed, 100 + seed);
            let hc = accuracy_curve(&high, seed);
            let lc = accuracy_curve(&low, seed);
            let rise = hc[SLOTS - 1] - hc[0];
            let range = lc.iter().cloned().fold(f64::MIN, f64::max)
                - lc.iter().cloned().fold(f64::MAX, f64::min);
            (rise, range)
        })
        .collect();
    let min_rise = per_seed.iter().map(|p| p.0).fold(f64::MAX, f64::min);
    let max_range = per_seed.iter().map(|p| p.1).fold(0.0, f64::max);
    check(
        min_rise >= 0.35 && max_range <= 0.12,
        format!(
            "5 seeds, 400 held-out samples: min deepest-minus-slot-0 rise {min_rise:.3} (>= 0.35), max flat range {max_range:.3} (<= 0.12)"
        ),
    )
}

// 5. Shared vs independent directions

fn shared_directions() -> Verdict {
    let per_seed: Vec<(f64, f64)> = (0..5u64)
        .into_par_iter()
        .map(|seed| {
            let a = synthetic(512, 2000, vec![8.0], 10 + seed, 200 + seed);
            let b = synthetic(512, 2000, vec![8.0], 10 + seed, 300 + seed);
            let c = synthetic(512, 2000, vec![8.0], 5000 + seed, 400 + seed);
            let parts = split(
                &a.meta().sample_ids,
                &SplitSpec {
                    seed,
                    ..SplitSpec::default()
                },
            )
            .unwrap();
            let rows: Vec<usize> = parts
                .train
                .iter()
                .map(|id| a.sample_index(id).unwrap())
                .collect();
            let (pa, pb, pc) = (
                final_probe(&a, 0, &rows),
                final_probe(&b, 0, &rows),
                final_probe(&c, 0, &rows),
            );
            (
                cosine_similarity(&pa.weights, &pb.weights).unwrap(),
                cosine_similarity(&pa.weights, &pc.weights).unwrap(),
            )
        })
        .collect();
    let min_shared = per_seed.iter().map(|p| p.0).fold(f64::MAX, f64::min);
    let max_indep = per_seed.iter().map(|p| p.1.abs()).fold(0.0, f64::max);
    check(
        min_shared >= 0.8 && max_indep <= 0.2,
        format!("d = 512, 5 seeds: min shared-direction cosine {min_shared:.3} (>= 0.8), max |independent cosine| {max_indep:.3} (<= 0.2)"),
    )
}

// 6. Resource gap on the shipped table

fn shipped_table_gap() -> Verdict {
    // Gemma-2B row typed out by hand, high-resource languages first.
    let high = [0.98, 0.95, 0.97, 0.69, 0.98, 0.87, 0.95];
    let low = [0.44, 0.53, 0.60, 0.60, 0.60, 0.56, 0.56, 0.66, 0.62];
    let oracle_high = high.iter().sum::<f64>() / 7.0;
    let oracle_low = low.iter().sum::<f64>() / 9.0;
    if (oracle_high - 0.9129).abs() > 1e-3 || (oracle_low - 0.5744).abs() > 1e-3 {
        return Err(format!(
            "hand oracle disagrees with stated means: {oracle_high} {oracle_low}"
        ));
    }

    let mut lines = Vec::new();
    let mut all_positive = true;
    let mut gemma_ok = false;
    for surface in cities_final_layer_surfaces().map_err(|e| e.to_string())? {
        let layer = surface.layers()[0];
        let gap = resource_gap(&surface, layer).map_err(|e| e.to_string())?;
        all_positive &= gap.gap > 0.0;
        if surface.model_name == "Gemma-2B" {
            gemma_ok = (gap.high_mean - 0.9129).abs() <= 1e-3
                && (gap.low_mean - 0.5744).abs() <= 1e-3
                && (gap.high_mean - oracle_high).abs() <= 1e-12
                && (gap.low_mean - oracle_low).abs() <= 1e-12;
        }
        lines.push(format!("{} {:+.4}", surface.model_name, gap.gap));
    }
    check(
        all_positive && gemma_ok && lines.len() == 5,
        format!(
            "gaps [{}]; Gemma-2B high {oracle_high:.4} low {oracle_low:.4}",
            lines.join(", ")
        ),
    )
}

// 7. Bayes accuracy

fn bayes_agreement() -> Verdict {
    let deltas = [0.0, 1.0, 2.0, 4.0];
    let phi = Normal::new(0.0, 1.0).unwrap();
    let bayes: Vec<f64> = deltas.iter().map(|d| phi.cdf(d / 2.0)).collect();
    let curves: Vec<Vec<f64>> = (0..5u64)
        .map(|seed| {
            accuracy_curve(
                &synthetic(16, 2000, deltas.to_vec(), 40 + seed, 50 + seed),
                seed,
            )
        })
        .collect();
    let mean: Vec<f64> = (0..deltas.len())
        .map(|l| curves.iter().map(|c| c[l]).sum::<f64>() / curves.len() as f64)
        .collect();
    let worst = mean
        .iter()
        .zip(&bayes)
        .map(|(m, b)| (m - b).abs())
        .fold(0.0, f64::max);
    let worst_single = curves
        .iter()
        .flat_map(|c| c.iter().zip(&bayes).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max);
    let cells: Vec<String> = deltas
        .iter()
        .zip(mean.iter().zip(&bayes))
        .map(|(d, (m, b))| format!("D={d}: {m:.3} vs {b:.3}"))
        .collect();
    check(
        worst <= 0.05,
        format!(
            "5-seed mean over 400 held-out samples, {}; max |diff| {worst:.3} (single seed worst {worst_single:.3})",
            cells.join(", ")
        ),
    )
}

// 8. Format roundtrip and header fuzzing

fn random_archive(rng: &mut SeededRng, i: usize) -> Archive {
    let layers = 1 + rng.below(4) as usize;
    let dim = 1 + rng.below(8) as usize;
    let samples = 2 + rng.below(9) as usize;
    let language = if rng.below(2) == 0 {
        LanguageTag::all_known()[rng.below(16) as usize].clone()
    } else {
        LanguageTag::new(
            format!("x{i}"),
            format!("Lang ü{i} \"q\""),
            ResourceClass::Low,
        )
        .unwrap()
    };
    let meta = ArchiveMeta {
        format_version: FORMAT_VERSION,
        model_name: format!("model-{}", rng.next_u64()),
        dataset_name: "d\n\t\u{1F600}".into(),
        language,
        num_layers: layers,
        hidden_dim: dim,
        num_samples: samples,
        sample_ids: (0..samples)
            .map(|s| format!("id-{s}-{}", rng.below(1000)))
            .collect(),
        label_names: ["neg".into(), "pos".into()],
    };
    let tensors = (0..layers * samples * dim)
        .map(|_| loop {
            let v = f32::from_bits(rng.next_u64() as u32);
            if v.is_finite() {
                break v;
            }
        })
        .collect();
    let labels = (0..samples).map(|_| rng.below(2) as u8).collect();
    Archive::new(meta, tensors, labels).unwrap()
}

fn format_roundtrip() -> Verdict {
    let mut rng = SeededRng::new(4242);
    let mut encoded = Vec::new();
    for i in 0..1000 {
        let archive = random_archive(&mut rng, i);
        let mut bytes = Vec::new();
        archive.write_to(&mut bytes).unwrap();
        let back = read_archive(bytes.as_slice()).map_err(|e| format!("archive {i}: {e}"))?;
        let same_bits = back
            .tensors()
            .iter()
            .map(|v| v.to_bits())
            .eq(archive.tensors().iter().map(|v| v.to_bits()));
        if back.meta() != archive.meta() || back.labels() != archive.labels() || !same_bits {
            return Err(format!("archive {i} changed in roundtrip"));
        }
        let mut again = Vec::new();
        back.write_to(&mut again).unwrap();
        if again != bytes {
            return Err(format!("archive {i} re-encodes differently"));
        }
        encoded.push(bytes);
    }

    // Mutations: byte flips in the header region, truncations, huge
    // lengths and pure noise. Any panic counts as a failure.
    let mut cases = 0;
    let mut errors = 0;
    let mut panics = 0;
    for round in 0..20_000usize {
        let base = &encoded[round % encoded.len()];
        let mut bytes = base.clone();
        match round % 5 {
            0 => {
                let header = bytes.len().min(16 + (rng.below(200) as usize));
                for _ in 0..1 + rng.below(4) {
                    let at = rng.below(header as u64) as usize;
                    bytes[at] = rng.next_u64() as u8;
                }
            }
            1 => bytes.truncate(rng.below(bytes.len() as u64) as usize),
            2 => bytes[8..16].copy_from_slice(&(rng.next_u64() >> rng.below(64)).to_le_bytes()),
            3 => bytes = (0..rng.below(64)).map(|_| rng.next_u64() as u8).collect(),
            _ => {
                let meta_len = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
                let at = 16 + rng.below(meta_len as u64) as usize;
                bytes[at] = b"{}[]\":,0-e"[rng.below(10) as usize];
            }
        }
        cases += 1;
        match catch_unwind(AssertUnwindSafe(|| read_archive(bytes.as_slice()))) {
            Ok(Err(_)) => errors += 1,
            Ok(Ok(_)) => {}
            Err(_) => panics += 1,
        }
    }
    check(
        panics == 0,
        format!("1000 archives bitwise identical after write/read; {cases} mutated inputs, {errors} rejected, {panics} panics"),
    )
}

// 9. Determinism of the full run

fn determinism() -> Verdict {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let paths = common::write_language_archives(tmp.path(), 6, 12, 120);
    let mut snapshots = Vec::new();
    for (run, workers) in [(0, 1), (1, 4), (2, 4)] {
        let mut cfg = common::experiment(paths.clone(), &tmp.path().join(format!("run{run}")));
        cfg.workers = workers;
        cfg.heatmap_layers = HeatmapLayers::All;
        run_experiment(&cfg).map_err(|e| e.to_string())?;
        snapshots.push(common::snapshot(&cfg.output_dir));
    }
    let files = snapshots[0].len();
    let kinds: HashSet<&str> = snapshots[0]
        .keys()
        .filter_map(|k| k.rsplit('.').next())
        .collect();
    let identical = snapshots.windows(2).all(|w| w[0] == w[1]);
    let mut kinds: Vec<_> = kinds.into_iter().collect();
    kinds.sort();
    check(
        identical && kinds == ["csv", "json", "svg"],
        format!(
            "3 runs (1, 4, 4 workers), {files} files ({}) byte-identical: {identical}",
            kinds.join("/")
        ),
    )
}

// 10. Split arithmetic

fn split_arithmetic() -> Verdict {
    let mut details = Vec::new();
    for (n, want_train, want_test) in [(1496usize, 1196usize, 300usize), (1000, 800, 200)] {
        // floor(0.8 n): 1196.8 -> 1196 and 800 -> 800
        assert_eq!((n * 8) / 10, want_train);
        let ids: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
        let spec = SplitSpec {
            seed: 11,
            ..SplitSpec::default()
        };
        let a = split(&ids, &spec).map_err(|e| e.to_string())?;
        let b = split(&ids, &spec).map_err(|e| e.to_string())?;
        let c = split(
            &ids,
            &SplitSpec {
                seed: 12,
                ..spec.clone()
            },
        )
        .map_err(|e| e.to_string())?;
        let train: HashSet<&String> = a.train.iter().collect();
        let test: HashSet<&String> = a.test.iter().collect();
        let exact = train.len() == a.train.len()
            && test.len() == a.test.len()
            && train.is_disjoint(&test)
            && train.len() + test.len() == n;
        if (a.train.len(), a.test.len()) != (want_train, want_test) || !exact || a != b || a == c {
            return Err(format!(
                "n = {n}: got ({}, {})",
                a.train.len(),
                a.test.len()
            ));
        }
        details.push(format!("n={n} -> ({}, {})", a.train.len(), a.test.len()));
    }
    Ok(format!(
        "{}; disjoint, exhaustive, seed-reproducible",
        details.join(", ")
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        (
            "gradient oracle",
            gradient_oracle,
            Some(Duration::from_secs(5)),
        ),
        (
            "optimizer oracle",
            optimizer_oracle,
            Some(Duration::from_secs(30)),
        ),
        ("symmetric 1-D case", symmetric_one_d, None),
        (
            "depth-dependent separability",
            depth_separability,
            Some(Duration::from_secs(120)),
        ),
        (
            "shared probe directions",
            shared_directions,
            Some(Duration::from_secs(60)),
        ),
        ("resource gap on the shipped table", shipped_table_gap, None),
        ("Bayes-accuracy agreement", bayes_agreement, None),
        (
            "format roundtrip and header fuzzing",
            format_roundtrip,
            None,
        ),
        ("end-to-end determinism", determinism, None),
        ("split arithmetic", split_arithmetic, None),
    ];
    let mut failed = BTreeMap::new();
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(run).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(detail), Some(limit)) if elapsed > limit => {
                Err(format!("{detail}; took {elapsed:.1?}, limit {limit:?}"))
            }
            (other, _) => other,
        };
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail} [{elapsed:.2?}]"),
            Err(detail) => {
                println!("FAIL  {name}: {detail} [{elapsed:.2?}]");
                failed.insert(name, detail);
            }
        }
    }
    println!(
        "acceptance: {} passed, {} failed",
        10 - failed.len(),
        failed.len()
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
