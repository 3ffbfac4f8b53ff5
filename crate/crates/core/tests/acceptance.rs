//! Acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! Every criterion is run twice: once on the default thread pool and once on
//! a three-worker pool. The last criterion compares the CSV/JSON bytes the
//! two passes produced.
//!
//! A failing criterion makes the process exit non-zero unless it is listed in
//! `EXPECTED_FAILURES` with the analysis of why it cannot hold.

use std::path::Path;
use std::time::Instant;

use rand_distr::{Distribution, Exp1};

use labelnoise::distributions::{GaussianMixture, GroundTruth};
use labelnoise::estimators::{default_neighbors, fit_knn};
use labelnoise::evaluation::{
    peaked_discrete, shift_crossover, sub_threshold_grid, verify_lugosi_bound, verify_theorem1,
};
use labelnoise::experiment::{self, read_results, ExperimentConfig};
use labelnoise::mitigation::correct_known_symmetric;
use labelnoise::noise_channel::{breakdown_threshold, TransitionMatrix};
use labelnoise::seeding::{cell_seed, rng_from_seed};

/// Tolerance for the uniform output at the breakdown point.
const UNIFORM_TOL: f64 = 1e-12;
/// Accuracy tolerance of the benchmark sweep.
const ACCURACY_TOL: f64 = 0.05;

/// Criteria that fail for a documented reason.
const EXPECTED_FAILURES: &[(usize, &str)] = &[(
    5,
    "above (K-1)/K the noisy posterior ranks classes in reverse, so a consistent \
     plug-in converges to the arg-min of the clean posterior; its accuracy falls \
     well below 1/K instead of settling at 1/K",
)];

struct Outcome {
    pass: bool,
    detail: String,
    /// Bytes whose reproducibility criterion 8 checks.
    artifact: String,
}

fn criterion_1() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    let mut artifact = String::new();
    for k in [2, 3, 10] {
        let grid = sub_threshold_grid(k).unwrap();
        let r = verify_theorem1(k, &grid, 200, 11).unwrap();
        pass &= r.passed() && r.trials == 200 && r.support_size == 50;
        detail.push(format!(
            "K={k}: {} alphas, {} points, {} disagreements, {} tied",
            grid.len(),
            r.points_checked,
            r.disagreements.len(),
            r.tied_points
        ));
        artifact.push_str(&serde_json::to_string(&r).unwrap());
    }
    Outcome { pass, detail: detail.join("; "), artifact }
}

fn criterion_2() -> Outcome {
    let mut worst = 0.0f64;
    let mut artifact = String::new();
    for k in 2..=10usize {
        let a = TransitionMatrix::symmetric(k, breakdown_threshold(k).unwrap()).unwrap();
        let mut rng = rng_from_seed(cell_seed(22, k as u64));
        for _ in 0..1000 {
            let e: Vec<f64> = (0..k).map(|_| Exp1.sample(&mut rng)).collect();
            let s: f64 = e.iter().sum();
            let p: Vec<f64> = e.iter().map(|v| v / s).collect();
            let q = a.apply_to_posterior(&p).unwrap();
            let dev = q.iter().map(|v| (v - 1.0 / k as f64).abs()).fold(0.0, f64::max);
            worst = worst.max(dev);
        }
        artifact.push_str(&format!("{k}:{worst:e};"));
    }
    Outcome {
        pass: worst <= UNIFORM_TOL,
        detail: format!("9000 inputs over K=2..10, max deviation from uniform {worst:e}"),
        artifact,
    }
}

fn criterion_3() -> Outcome {
    let r = verify_lugosi_bound(1000, 33).unwrap();
    Outcome {
        pass: r.passed() && r.trials == 1000,
        detail: format!(
            "{} violations, max ratio {:.4} at alpha={:.3} beta={:.3}, equal-noise max deviation {:e}",
            r.violations.len(),
            r.max_ratio,
            r.max_ratio_alpha,
            r.max_ratio_beta,
            r.equal_noise_max_deviation
        ),
        artifact: serde_json::to_string(&r).unwrap(),
    }
}

fn criterion_4() -> Outcome {
    let below: Vec<f64> = (1..=9).map(|i| i as f64 * 5.0 / 100.0).collect();
    let above: Vec<f64> = (11..=16).map(|i| i as f64 * 5.0 / 100.0).collect();
    let mut pass = true;
    let mut detail = Vec::new();
    let mut artifact = String::new();
    for (k, seed) in [(2, 41), (3, 42), (10, 43)] {
        let d = peaked_discrete(k, 50, 0.9, seed).unwrap();
        let lo = shift_crossover(&d, &below).unwrap();
        let hi = shift_crossover(&d, &above).unwrap();
        let lo_bad: usize = lo.rows.iter().map(|r| r.disagreements).sum();
        let hi_missing = hi.rows.iter().filter(|r| r.disagreements == 0).count();
        pass &= lo_bad == 0 && hi_missing == 0;
        detail.push(format!("K={k}: {lo_bad} disagreements below 0.5, {hi_missing} alphas above 0.5 with none"));
        artifact.push_str(&serde_json::to_string(&(lo, hi)).unwrap());
    }
    Outcome { pass, detail: detail.join("; "), artifact }
}

const BENCHMARK: &str = r#"
[distribution]
kind = "circle"
k = 10
radius = 3.0
variance = 1.0

[estimator]
family = "knn"
"#;

fn criterion_5() -> Outcome {
    let text = format!(
        "[experiment]\nid = \"benchmark-sweep\"\nseed = 55\nn_train = 20000\nn_test = 10000\nseeds = 5\n\
         {BENCHMARK}\n[channel]\nkind = \"symmetric\"\nalphas = [0.0, 0.5, 0.95]\n"
    );
    let cfg = ExperimentConfig::parse(&text, Path::new(".")).unwrap();
    let out = experiment::run_sweep(&cfg).unwrap();
    let rows = read_results(&out.csv).unwrap();
    let mean_acc = |alpha: f64| {
        let accs: Vec<f64> = rows.iter().filter(|r| r.alpha == alpha).map(|r| 1.0 - r.risk.unwrap()).collect();
        assert_eq!(accs.len(), 5);
        accs.iter().sum::<f64>() / 5.0
    };
    let (a0, a5, a95) = (mean_acc(0.0), mean_acc(0.5), mean_acc(0.95));
    let half_ok = (a5 - a0).abs() <= ACCURACY_TOL;
    let chance_ok = (a95 - 0.1).abs() <= ACCURACY_TOL;
    let k = default_neighbors(20000);
    Outcome {
        pass: out.failures.is_empty() && half_ok && chance_ok,
        detail: format!(
            "kNN k={k}: acc(0)={a0:.4}, acc(0.5)={a5:.4} [{}], acc(0.95)={a95:.4} vs 0.1 [{}]",
            if half_ok { "ok" } else { "off" },
            if chance_ok { "ok" } else { "off" }
        ),
        artifact: out.csv,
    }
}

fn criterion_6() -> Outcome {
    let text = format!(
        "[experiment]\nid = \"benchmark-consistency\"\nseed = 66\nn_grid = [500, 5000, 50000]\nn_test = 10000\nseeds = 5\n\
         {BENCHMARK}\n[channel]\nkind = \"symmetric\"\nalpha = 0.3\n"
    );
    let cfg = ExperimentConfig::parse(&text, Path::new(".")).unwrap();
    let out = experiment::run_consistency(&cfg).unwrap();
    let summary = out.summary_csv.clone().unwrap();
    let means: Vec<f64> = summary.lines().skip(1).map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    let monotone = means.len() == 3 && means.windows(2).all(|w| w[1] <= w[0]);
    Outcome {
        pass: out.failures.is_empty() && monotone,
        detail: format!(
            "mean L1 error by n: {}",
            means.iter().map(|m| format!("{m:.4}")).collect::<Vec<_>>().join(" -> ")
        ),
        artifact: out.csv + &summary,
    }
}

fn criterion_7() -> Outcome {
    let (k, alpha) = (10, 0.4);
    let truth = GaussianMixture::default_benchmark();
    let mut rng = rng_from_seed(cell_seed(77, 0));
    let channel = TransitionMatrix::symmetric(k, alpha).unwrap();
    let train = truth.sample(20000, &mut rng).corrupted(&channel, &mut rng, 77).unwrap();
    let plain = fit_knn(&train, default_neighbors(train.len())).unwrap();
    let fixed = correct_known_symmetric(plain.clone(), alpha, k).unwrap();
    let test = truth.sample(10000, &mut rng);
    let mut differ = 0;
    let mut decisions = String::with_capacity(2 * test.len());
    for x in &test.features {
        let (a, b) = (plain.classify(x).unwrap(), fixed.classify(x).unwrap());
        differ += (a != b) as usize;
        decisions.push_str(&format!("{}", a + 1));
        decisions.push(',');
    }
    Outcome {
        pass: differ == 0,
        detail: format!("{differ} of {} test decisions differ between corrected and uncorrected kNN", test.len()),
        artifact: decisions,
    }
}

const DESCRIPTIONS: [&str; 7] = [
    "symmetric-noise plug-in agrees with Bayes below the threshold (exact)",
    "noisy posterior is uniform at the breakdown point",
    "binary class-dependent risk bound",
    "shift-noise crossover at 0.5",
    "benchmark accuracy under symmetric noise",
    "kNN posterior error decreases with n",
    "known-symmetric correction leaves decisions unchanged",
];

fn run_all() -> Vec<(Outcome, f64)> {
    let criteria: [fn() -> Outcome; 7] =
        [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7];
    criteria
        .iter()
        .map(|c| {
            let t = Instant::now();
            let o = c();
            (o, t.elapsed().as_secs_f64())
        })
        .collect()
}

fn main() {
    // Support `cargo test -- --list` and filters without running everything.
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }

    let first = run_all();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let second = pool.install(run_all);

    let mut unexpected = 0;
    let mut report = |n: usize, pass: bool, desc: &str, detail: &str, secs: f64| {
        let expected = EXPECTED_FAILURES.iter().find(|(c, _)| *c == n);
        println!("{} criterion {n}: {desc} ({detail}) [{secs:.1}s]", if pass { "PASS" } else { "FAIL" });
        if !pass {
            match expected {
                Some((_, why)) => println!("     known failure: {why}"),
                None => unexpected += 1,
            }
        }
    };
    for (i, (o, secs)) in first.iter().enumerate() {
        report(i + 1, o.pass, DESCRIPTIONS[i], &o.detail, *secs);
    }
    let mismatched: Vec<String> = first
        .iter()
        .zip(&second)
        .enumerate()
        .filter(|(_, ((a, _), (b, _)))| a.artifact != b.artifact)
        .map(|(i, _)| (i + 1).to_string())
        .collect();
    let bytes: usize = first.iter().map(|(o, _)| o.artifact.len()).sum();
    report(
        8,
        mismatched.is_empty(),
        "reruns give byte-identical outputs",
        &if mismatched.is_empty() {
            format!("{bytes} bytes identical across two runs on different pool sizes")
        } else {
            format!("outputs differ for criteria {}", mismatched.join(", "))
        },
        second.iter().map(|(_, s)| s).sum(),
    );

    if unexpected > 0 {
        eprintln!("{unexpected} acceptance criteria failed unexpectedly");
        std::process::exit(1);
    }
}
