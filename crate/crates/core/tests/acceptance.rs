//! End-to-end acceptance checks. Runs as a plain binary so every criterion
//! prints its verdict line even when an earlier one fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use helicoid_stability::analytic::{
    bypass_beats_flat, const_coeff_eigenvalue, critical_rho, flat_eigenvalue, gbar_sampled,
    lambda1_bound, lambda1_problem, lambda2_bound, lambda2_problem, min_fraction_bound,
    rayleigh_quotient, sufficient_stable, SampledFunction, DEFAULT_SAMPLES,
};
use helicoid_stability::eigen1d::{lambda_hat, mode_sweep};
use helicoid_stability::geometry::{gaussian_curvature, mean_curvature_numeric, FilmParams};
use helicoid_stability::oracle2d::lambda_2d;
use helicoid_stability::stability::{crossing, region_map, GridSpec, TraceConfig};
use helicoid_stability::{ClassifyConfig, EnergyVariant, GbarVariant, Method, SolverConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn fp(rho: f64, theta: f64) -> FilmParams<f64> {
    FilmParams::new(rho, theta).expect("valid parameters")
}

fn fail_if(cond: bool, msg: String) -> Result<(), String> {
    if cond {
        Err(msg)
    } else {
        Ok(())
    }
}

const LATTICE: [(f64, f64); 9] = [
    (1.0, 0.0),
    (1.0, 0.75),
    (1.0, 1.5),
    (1.75, 0.0),
    (1.75, 0.75),
    (1.75, 1.5),
    (2.5, 0.0),
    (2.5, 0.75),
    (2.5, 1.5),
];

fn critical_ratio() -> Outcome {
    let start = Instant::now();
    let r: f64 = critical_rho();
    let elapsed = start.elapsed();
    fail_if((r - 2.6189).abs() > 1e-3, format!("rho* = {r}"))?;
    fail_if(
        (r * 100.0).round() / 100.0 != 2.62,
        format!("rho* = {r} does not round to 2.62"),
    )?;
    fail_if(
        elapsed > Duration::from_millis(10),
        format!("took {elapsed:?}"),
    )?;
    Ok(format!("rho* = {r:.10}, {elapsed:?}"))
}

fn flat_agreement() -> Outcome {
    let mut worst = 0.0f64;
    let mut slowest = Duration::ZERO;
    for rho in [0.5, 1.0, 2.0, 2.62, 4.0] {
        let start = Instant::now();
        let e = lambda_hat(&fp(rho, 0.0), 2001, 4).map_err(|e| e.to_string())?;
        slowest = slowest.max(start.elapsed());
        let diff = (e.lambda - flat_eigenvalue(rho).unwrap()).abs();
        fail_if(diff >= 1e-4, format!("rho = {rho}: |diff| = {diff:e}"))?;
        worst = worst.max(diff);
    }
    fail_if(
        slowest >= Duration::from_secs(1),
        format!("slowest point {slowest:?}"),
    )?;
    Ok(format!("max |diff| = {worst:.2e}, slowest {slowest:?}"))
}

fn k_minimality() -> Outcome {
    let mut min_gap = f64::INFINITY;
    for (rho, theta) in [(1.0, 0.0), (1.0, 1.0), (2.0, 0.5), (2.5, 1.5)] {
        let sweep = mode_sweep(&fp(rho, theta), 2001, 4, &SolverConfig::default())
            .map_err(|e| e.to_string())?;
        for w in sweep.windows(2) {
            let gap = w[1].lambda - w[0].lambda;
            fail_if(
                gap < 1e-3,
                format!("({rho}, {theta}) k={}: gap {gap:e}", w[0].k),
            )?;
            min_gap = min_gap.min(gap);
        }
    }
    Ok(format!("smallest consecutive gap {min_gap:.4}"))
}

fn oracle_agreement() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut worst_ratio = f64::INFINITY;
    for (rho, theta) in LATTICE {
        let p = fp(rho, theta);
        let one = lambda_hat(&p, 2001, 1).map_err(|e| e.to_string())?.lambda;
        let coarse = (lambda_2d(&p, 81, 81).map_err(|e| e.to_string())?.lambda - one).abs();
        let fine = (lambda_2d(&p, 161, 161).map_err(|e| e.to_string())?.lambda - one).abs();
        fail_if(
            coarse >= 1e-2,
            format!("({rho}, {theta}): |diff| = {coarse:e}"),
        )?;
        fail_if(
            fine >= coarse,
            format!("({rho}, {theta}): refinement {coarse:e} -> {fine:e}"),
        )?;
        worst = worst.max(coarse);
        worst_ratio = worst_ratio.min(coarse / fine);
    }
    let elapsed = start.elapsed();
    fail_if(
        elapsed >= Duration::from_secs(30),
        format!("took {elapsed:?}"),
    )?;
    Ok(format!(
        "max |diff| at 81x81 = {worst:.2e}, min shrink factor {worst_ratio:.2}, {elapsed:.1?}"
    ))
}

fn bound_sandwich() -> Outcome {
    for (rho, theta) in LATTICE {
        let p = fp(rho, theta);
        let l1 = lambda1_bound(&p).map_err(|e| e.to_string())?;
        let l2 = lambda2_bound(&p).map_err(|e| e.to_string())?;
        let mid = lambda_hat(&p, 2001, 1).map_err(|e| e.to_string())?.lambda;
        let g = gbar_sampled(&p, GbarVariant::Corrected, DEFAULT_SAMPLES);
        let hi = rayleigh_quotient(&g, &p).map_err(|e| e.to_string())?;
        fail_if(
            !(l1 <= mid && mid <= hi),
            format!("({rho}, {theta}): {l1} <= {mid} <= {hi}"),
        )?;
        fail_if(
            l2 < l1,
            format!("({rho}, {theta}): lambda2 {l2} < lambda1 {l1}"),
        )?;
    }
    Ok("lambda1 <= lambda_hat <= lambda_bar and lambda2 >= lambda1 on all 9 points".into())
}

fn region_soundness() -> Outcome {
    let start = Instant::now();
    let map =
        region_map(&GridSpec::default(), &ClassifyConfig::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let tol = 1e-4;
    let (mut false_stable, mut false_unstable, mut errors) = (0, 0, 0);
    for cell in &map.cells {
        let Some(v) = &cell.verdict else {
            errors += 1;
            continue;
        };
        let l = v.lambda_hat.expect("numeric solve runs by default");
        if v.method == Method::AnalyticSufficient && l < 1.0 - tol {
            false_stable += 1;
        }
        if v.lambda_bar.is_some_and(|b| b < 1.0) && l > 1.0 + tol {
            false_unstable += 1;
        }
    }
    let summary = format!(
        "{} cells, {false_stable} false stable, {false_unstable} false unstable, {errors} errors, {elapsed:.1?}",
        map.cells.len()
    );
    fail_if(false_stable + false_unstable + errors > 0, summary.clone())?;
    fail_if(elapsed >= Duration::from_secs(300), summary.clone())?;
    Ok(summary)
}

fn theta_ceiling() -> Outcome {
    let ceiling = PI / 2f64.sqrt();
    let mut checked = 0;
    for i in 0..=60 {
        let theta = ceiling + (4.0 - ceiling) * i as f64 / 60.0;
        for j in 0..=80 {
            let rho = 10f64.powf(-2.0 + 4.0 * j as f64 / 80.0);
            fail_if(
                sufficient_stable(&fp(rho, theta)),
                format!("sufficient_stable at ({rho}, {theta})"),
            )?;
            checked += 1;
        }
    }
    let sample = crossing(2.9, &TraceConfig::default()).map_err(|e| e.to_string())?;
    if let Some(r) = sample.rho_star {
        return Err(format!(
            "sufficient test silent on {checked} points past the ceiling, but the boundary at theta = 2.9 \
             crosses at rho* = {r:.6} (residual {:.1e}) instead of NA",
            sample.residual.unwrap_or(f64::NAN)
        ));
    }
    Ok(format!(
        "sufficient test silent on {checked} points, theta = 2.9 -> NA"
    ))
}

fn bypass_threshold() -> Outcome {
    let samples = 10_000;
    let mut found = Vec::new();
    for rho in [1.6, 2.0, 3.0] {
        let phi =
            bypass_beats_flat(rho, samples, EnergyVariant::Corrected).map_err(|e| e.to_string())?;
        let phi = phi.ok_or_else(|| format!("rho = {rho}: no beating angle"))?;
        found.push(format!("rho={rho}: phi={phi:.4}"));
    }
    for rho in [1.0, 1.5] {
        if let Some(phi) =
            bypass_beats_flat(rho, samples, EnergyVariant::Corrected).map_err(|e| e.to_string())?
        {
            return Err(format!("rho = {rho} < pi/2 beaten at phi = {phi}"));
        }
    }
    Ok(format!("{}; none below pi/2", found.join(", ")))
}

fn property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20_061_103);

    let p = fp(1.7, 1.1);
    let g = gbar_sampled(&p, GbarVariant::Corrected, 401);
    let base = rayleigh_quotient(&g, &p).map_err(|e| e.to_string())?;
    let mut worst_scale = 0.0f64;
    for _ in 0..1_000 {
        let mag = 10f64.powf(rng.gen_range(-6.0..6.0));
        let c = if rng.gen_bool(0.5) { mag } else { -mag };
        let trial = SampledFunction::new(
            g.nodes().to_vec(),
            g.values().iter().map(|v| v * c).collect(),
        )
        .map_err(|e| e.to_string())?;
        let r = rayleigh_quotient(&trial, &p).map_err(|e| e.to_string())?;
        worst_scale = worst_scale.max((r - base).abs() / base);
    }
    fail_if(
        worst_scale > 1e-12,
        format!("Rayleigh scale drift {worst_scale:e}"),
    )?;

    for _ in 0..10_000 {
        let pos = |rng: &mut ChaCha8Rng| 10f64.powf(rng.gen_range(-3.0..3.0));
        let (a, b, alpha, beta) = (pos(&mut rng), pos(&mut rng), pos(&mut rng), pos(&mut rng));
        let c_l = rng.gen_range(0.0..10.0);
        let c_u = c_l + rng.gen_range(0.0..10.0);
        let c = rng.gen_range(c_l..=c_u);
        let ok = min_fraction_bound(a, b, alpha, beta, c_l, c_u, c).map_err(|e| e.to_string())?;
        fail_if(
            !ok,
            format!(
                "fraction bound false at {:?}",
                (a, b, alpha, beta, c_l, c_u, c)
            ),
        )?;
    }

    let mut worst_h = 0.0f64;
    for _ in 0..100 {
        let (rho, theta) = (rng.gen_range(0.5..4.0), rng.gen_range(0.0..3.0));
        let p = fp(rho, theta);
        let y = rng.gen_range(-0.99..0.99);
        let z = rho * rng.gen_range(0.05..0.95);
        fail_if(
            gaussian_curvature(&p, y) > 0.0,
            format!("K > 0 at ({rho}, {theta}, {y})"),
        )?;
        let h = mean_curvature_numeric(&p, y, z, 1e-4).map_err(|e| e.to_string())?;
        worst_h = worst_h.max(h.abs());
    }
    fail_if(worst_h >= 1e-6, format!("|H| = {worst_h:e}"))?;

    let mut worst_res = 0.0f64;
    for _ in 0..100 {
        let p = fp(rng.gen_range(0.2..5.0), rng.gen_range(0.0..3.5));
        for prob in [lambda1_problem(&p), lambda2_problem(&p)] {
            let l = const_coeff_eigenvalue(&prob).map_err(|e| e.to_string())?;
            worst_res = worst_res.max(prob.residual(l).abs());
        }
    }
    fail_if(
        worst_res >= 1e-10,
        format!("fixed-point residual {worst_res:e}"),
    )?;

    Ok(format!(
        "scale drift {worst_scale:.1e}, 10^4 fraction trials, max |H| {worst_h:.1e}, max residual {worst_res:.1e}"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("flat-film critical ratio", critical_ratio),
        ("flat eigenvalue agreement", flat_agreement),
        ("k = 1 minimality", k_minimality),
        ("2D oracle agreement", oracle_agreement),
        ("bound sandwich", bound_sandwich),
        ("region soundness", region_soundness),
        ("theta ceiling", theta_ceiling),
        ("bypass threshold", bypass_threshold),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {}: {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {}: {name}: {detail}", i + 1);
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
