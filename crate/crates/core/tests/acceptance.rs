//! The acceptance suite: ten criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so every criterion reports even when an
//! earlier one fails; the process exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use dyadic_cf::identification::{identify_from_samples, identify_from_slices, Identification, NegativeAxis};
use dyadic_cf::oracle::cf_value;
use dyadic_cf::{
    analytic_cf, compose_phi_y_slices, density_error_report, detect_zeros, ecf, ecf_partial_first, invert_cf,
    sample_components, validate_cf_curve, Complex64, ComplexCurve, ComponentDist, FreqGrid, IdentifyOptions,
    ModelConfig, SampleSet, Window,
};

type Outcome = Result<String, String>;

fn normal(s: f64) -> ComponentDist {
    ComponentDist::normal(s).unwrap()
}

fn uniform(a: f64) -> ComponentDist {
    ComponentDist::uniform_symmetric(a).unwrap()
}

fn truth(d: ComponentDist) -> impl Fn(f64) -> Complex64 {
    move |s| cf_value(&d, s)
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn near_any(s: f64, centres: &[f64], radius: f64) -> bool {
    centres.iter().any(|c| (s.abs() - c).abs() <= radius)
}

/// Oracle run of one of the four closed-form configurations.
struct OracleCase {
    name: &'static str,
    config: ModelConfig,
    grid: FreqGrid,
    /// Half-width of the comparison range.
    range: f64,
}

fn oracle_cases() -> Vec<OracleCase> {
    let n1 = normal(1.0);
    vec![
        OracleCase {
            name: "laplace alpha",
            config: ModelConfig::new(0.0, ComponentDist::laplace(1.0).unwrap(), n1, normal(0.5)),
            grid: FreqGrid::with_spacing(4.0, 0.01).unwrap(),
            range: 3.0,
        },
        OracleCase {
            name: "uniform alpha",
            config: ModelConfig::new(0.0, uniform(1.0), n1, n1),
            grid: FreqGrid::with_spacing(6.0, 0.01).unwrap(),
            range: 5.0,
        },
        OracleCase {
            name: "two-point eta",
            config: ModelConfig::new(0.0, n1, ComponentDist::two_point_symmetric(1.0).unwrap(), n1),
            grid: FreqGrid::with_spacing(6.0, 0.005).unwrap(),
            range: 4.0,
        },
        OracleCase {
            name: "uniform epsilon",
            config: ModelConfig::new(0.0, n1, n1, uniform(1.0)),
            grid: FreqGrid::with_spacing(6.0, 0.01).unwrap(),
            range: 5.0,
        },
    ]
}

fn run_oracle(
    config: &ModelConfig,
    grid: &FreqGrid,
    opts: &IdentifyOptions,
) -> Result<Identification, String> {
    identify_from_slices(&compose_phi_y_slices(config, grid), opts).map_err(|e| e.to_string())
}

fn criterion_1() -> Outcome {
    let case = &oracle_cases()[0];
    let (id, took) = timed(|| run_oracle(&case.config, &case.grid, &IdentifyOptions::default()));
    let id = id?;
    let err = id.alpha_cf().sup_error(3.0, truth(case.config.alpha), |_| false);
    check(
        err <= 1e-4 && took < Duration::from_secs(5),
        format!(
            "sup error {err:.2e} (≤ 1e-4), {:.2} s (< 5 s)",
            took.as_secs_f64()
        ),
    )
}

fn criterion_2() -> Outcome {
    let case = &oracle_cases()[1];
    let (id, took) = timed(|| run_oracle(&case.config, &case.grid, &IdentifyOptions::default()));
    let id = id?;
    let err = id
        .alpha_cf()
        .sup_error(5.0, truth(case.config.alpha), |s| near_any(s, &[PI], 0.05));
    let want: Vec<f64> = vec![-PI - 0.1, -PI + 0.1, PI - 0.1, PI + 0.1];
    let mut steps = Vec::new();
    for w in &want {
        match id.alpha.probes.iter().find(|p| (p.point - w).abs() < 1e-3) {
            Some(p) => steps.push(p.last_step),
            None => return Err(format!("no δ-trace at probe {w:.4}")),
        }
    }
    let worst_step = steps.iter().cloned().fold(0.0, f64::max);
    check(
        err <= 1e-3 && worst_step <= 1e-4 && took < Duration::from_secs(10),
        format!(
            "sup error {err:.2e} (≤ 1e-3), probe last step {worst_step:.2e} (≤ 1e-4), {:.2} s (< 10 s)",
            took.as_secs_f64()
        ),
    )
}

fn criterion_3() -> Outcome {
    let case = &oracle_cases()[2];
    let id = run_oracle(&case.config, &case.grid, &IdentifyOptions::default())?;
    let windows = [PI / 2.0, 1.5 * PI];
    let eta = id.eta_cf();
    let err = eta.sup_error(case.range, truth(case.config.eta), |s| {
        near_any(s, &windows, 0.05)
    });
    let negative_ok = eta
        .points()
        .filter(|(s, _)| *s > PI / 2.0 + 0.05 && *s < 1.5 * PI - 0.05)
        .all(|(_, v)| v.re < 0.0);
    check(
        err <= 1e-3 && negative_ok,
        format!("sup error {err:.2e} (≤ 1e-3), negative on (π/2, 3π/2): {negative_ok}"),
    )
}

fn criterion_4() -> Outcome {
    let case = &oracle_cases()[3];
    let slices = compose_phi_y_slices(&case.config, &case.grid);
    let zeros = detect_zeros(&slices.curve_00r, 0.1).map_err(|e| e.to_string())?;
    let locs = zeros.locations();
    let found = locs.len() == 2 && (locs[0] + PI).abs() < 1e-3 && (locs[1] - PI).abs() < 1e-3;
    let id = identify_from_slices(&slices, &IdentifyOptions::default()).map_err(|e| e.to_string())?;
    let removable = id.alpha.classification.len() == 2 && id.alpha.classification.iter().all(|c| !c.singular);
    let no_bridge = id.alpha.singular.is_empty() && id.alpha.reconstruction.bridges().is_empty();
    let err = id
        .alpha_cf()
        .sup_error(case.range, truth(case.config.alpha), |_| false);
    check(
        found && removable && no_bridge && err <= 1e-3,
        format!(
            "zeros {locs:?}, removable {removable}, no bridges {no_bridge}, sup error {err:.2e} (≤ 1e-3)"
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    for case in oracle_cases() {
        let id = run_oracle(&case.config, &case.grid, &IdentifyOptions::default())?;
        let eps = id.epsilon_cf();
        let filled: Vec<(f64, f64)> = id.epsilon.filled.clone();
        let in_window = |s: f64| filled.iter().any(|&(a, b)| s.abs() >= a && s.abs() <= b);
        let off = eps.sup_error(case.range, truth(case.config.epsilon), in_window);
        let on = eps.sup_error(case.range, truth(case.config.epsilon), |s| !in_window(s));
        ok &= off <= 1e-3 && on <= 1e-2;
        details.push(format!("{}: off {off:.1e}, windows {on:.1e}", case.name));
    }
    check(ok, format!("{} (≤ 1e-3 / ≤ 1e-2)", details.join("; ")))
}

fn mc_errors(samples: &SampleSet, grid: &FreqGrid) -> Result<[f64; 3], String> {
    let id = identify_from_samples(samples, grid, &IdentifyOptions::default()).map_err(|e| e.to_string())?;
    let f = truth(normal(1.0));
    Ok([
        id.alpha_cf().sup_error(2.0, &f, |_| false),
        id.eta_cf().sup_error(2.0, &f, |_| false),
        id.epsilon_cf().sup_error(2.0, &f, |_| false),
    ])
}

fn criterion_6() -> Outcome {
    const SEED: u64 = 20_240_601;
    let cfg = ModelConfig::new(0.0, normal(1.0), normal(1.0), normal(1.0));
    let grid = FreqGrid::with_spacing(2.5, 0.01).unwrap();
    let (errors, took) = timed(|| -> Result<_, String> {
        let s = sample_components(&cfg, 200_000, SEED).map_err(|e| e.to_string())?;
        let small = mc_errors(&s, &grid)?;
        let s = sample_components(&cfg, 400_000, SEED).map_err(|e| e.to_string())?;
        Ok((small, mc_errors(&s, &grid)?))
    });
    let (small, large) = errors?;
    let worst = small.iter().cloned().fold(0.0, f64::max);
    let ratios: Vec<f64> = small.iter().zip(&large).map(|(a, b)| a / b).collect();
    let ok = worst <= 0.05 && ratios.iter().all(|r| *r >= 1.25) && took < Duration::from_secs(60);
    check(
        ok,
        format!(
            "n=2e5 errors α {:.3} η {:.3} ε {:.3} (≤ 0.05); n=4e5 ratios {:.2} {:.2} {:.2} (≥ 1.25); {:.1} s (< 60 s)",
            small[0], small[1], small[2], ratios[0], ratios[1], ratios[2], took.as_secs_f64()
        ),
    )
}

fn fd_discrepancy(y: &[f64], h: f64) -> f64 {
    let grid = FreqGrid::with_spacing(3.0, h).unwrap();
    let phi = ecf(y, &grid).unwrap();
    let der = ecf_partial_first(y, y, &grid).unwrap();
    (1..grid.len() - 1)
        .filter(|&i| grid.value(i).abs() <= 2.0)
        .map(|i| {
            let fd = (phi.value_at(i + 1) - phi.value_at(i - 1)) / (2.0 * h);
            (fd - der.value_at(i)).norm()
        })
        .fold(0.0, f64::max)
}

fn criterion_7() -> Outcome {
    let s = sample_components(
        &ModelConfig::new(0.0, normal(1.0), normal(1.0), normal(1.0)),
        5_000,
        7,
    )
    .map_err(|e| e.to_string())?;
    let y = s.centered_column(dyadic_cf::model::Column::Yij);
    let coarse = fd_discrepancy(&y, 0.02);
    let fine = fd_discrepancy(&y, 0.01);
    let ratio = coarse / fine;
    check(
        (3.5..=4.5).contains(&ratio),
        format!("max discrepancy {coarse:.2e} → {fine:.2e}, ratio {ratio:.3} (in [3.5, 4.5])"),
    )
}

fn criterion_8() -> Outcome {
    let grid = FreqGrid::with_spacing(8.0, 0.01).unwrap();
    let est = invert_cf(&analytic_cf(&normal(1.0), &grid), 6.0, Window::Sharp).map_err(|e| e.to_string())?;
    let f0 = est
        .points()
        .find(|(x, _)| x.abs() < 1e-9)
        .map(|(_, f)| f)
        .ok_or("x = 0 is not on the spatial grid")?;
    let report = density_error_report(&est, &normal(1.0)).map_err(|e| e.to_string())?;
    check(
        (f0 - 0.39894).abs() <= 1e-3 && report.l1 <= 1e-2,
        format!("f(0) = {f0:.5} (0.39894 ± 1e-3), L1 {:.2e} (≤ 1e-2)", report.l1),
    )
}

fn hermitian(c: &ComplexCurve) -> bool {
    let g = c.grid();
    (0..g.len()).all(|i| c.value_at(g.mirror(i)) == c.value_at(i).conj())
}

fn criterion_9() -> Outcome {
    let grid = FreqGrid::with_spacing(10.0, 0.01).unwrap();
    let mut dists = Vec::new();
    for scale in [0.5, 1.0, 2.0] {
        dists.push(normal(scale));
        dists.push(ComponentDist::laplace(scale).unwrap());
        dists.push(uniform(scale));
        dists.push(ComponentDist::two_point_symmetric(scale).unwrap());
        dists.push(ComponentDist::shifted_exponential(scale).unwrap());
    }
    let invalid: Vec<String> = dists
        .iter()
        .filter(|d| !validate_cf_curve(&analytic_cf(d, &grid), 1e-12).passed)
        .map(|d| d.to_string())
        .collect();

    let mut non_hermitian = Vec::new();
    let mut worst_product: f64 = 0.0;
    for case in oracle_cases() {
        let id = run_oracle(&case.config, &case.grid, &IdentifyOptions::default())?;
        for (name, c) in [
            ("alpha", id.alpha_cf()),
            ("eta", id.eta_cf()),
            ("epsilon", id.epsilon_cf()),
        ] {
            if !hermitian(c) {
                non_hermitian.push(format!("{} {name}", case.name));
            }
        }
        let product = IdentifyOptions {
            negative_axis: NegativeAxis::Product,
            ..IdentifyOptions::default()
        };
        let pid = run_oracle(&case.config, &case.grid, &product)?;
        for (a, b) in [(id.alpha_cf(), pid.alpha_cf()), (id.eta_cf(), pid.eta_cf())] {
            let d = a
                .values()
                .iter()
                .zip(b.values())
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max);
            worst_product = worst_product.max(d);
        }
    }
    check(
        invalid.is_empty() && non_hermitian.is_empty() && worst_product <= 1e-3,
        format!(
            "invalid analytic CFs {invalid:?}, non-Hermitian {non_hermitian:?}, product vs symmetry {worst_product:.2e} (≤ 1e-3)"
        ),
    )
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect();
    out.sort();
    out
}

fn cli(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_dyadic-cf"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)))
    }
}

fn criterion_10() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p = |s: &str| tmp.path().join(s).to_string_lossy().into_owned();
    let config = p("config.json");
    ModelConfig::new(
        2.0,
        ComponentDist::laplace(1.0).unwrap(),
        normal(1.0),
        uniform(1.0),
    )
    .save(&config)
    .map_err(|e| e.to_string())?;
    for run in ["a", "b"] {
        std::fs::create_dir_all(p(run)).map_err(|e| e.to_string())?;
        let samples = p(&format!("{run}/samples.csv"));
        cli(&[
            "simulate", "--config", &config, "--n", "20000", "--seed", "11", "--out", &samples,
        ])?;
        cli(&[
            "identify",
            "--samples",
            &samples,
            "--s-max",
            "3",
            "--cutoff",
            "3",
            "--out-dir",
            &p(&format!("{run}/out")),
        ])?;
    }
    let same_samples = std::fs::read(p("a/samples.csv")).ok() == std::fs::read(p("b/samples.csv")).ok()
        && std::fs::read(p("a/samples.json")).ok() == std::fs::read(p("b/samples.json")).ok();
    // run.json records the samples path, which differs by directory
    let strip = |v: Vec<(String, Vec<u8>)>| -> Vec<(String, Vec<u8>)> {
        v.into_iter().filter(|(n, _)| n != "run.json").collect()
    };
    let a = strip(read_dir_sorted(Path::new(&p("a/out"))));
    let b = strip(read_dir_sorted(Path::new(&p("b/out"))));
    let same_outputs = !a.is_empty() && a == b;
    check(
        same_samples && same_outputs,
        format!(
            "samples identical {same_samples}, {} identify artifacts identical {same_outputs}",
            a.len()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("oracle identity (laplace alpha)", criterion_1),
        ("zero-crossing bridge (uniform alpha)", criterion_2),
        ("sign-flip bridge (two-point eta)", criterion_3),
        ("removable-zero classification", criterion_4),
        ("epsilon by division", criterion_5),
        ("Monte-Carlo consistency", criterion_6),
        ("derivative estimator order", criterion_7),
        ("deconvolution of the normal CF", criterion_8),
        ("property suite", criterion_9),
        ("determinism of simulate and identify", criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS  {:>2}. {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {:>2}. {name}: {detail}", k + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
