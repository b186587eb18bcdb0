//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Each criterion runs once on a four-thread pool (timed against its budget)
//! and once more on a single-thread pool; criterion 10 compares the
//! fingerprints of the two runs byte for byte.

use std::time::{Duration, Instant};

use besovclaw::besov::{besov_fit, Direction};
use besovclaw::cli::config::RunConfig;
use besovclaw::cli::{cutoff_for, shifts_for, solve_from_config};
use besovclaw::fields::{Grid2D, SpaceTimeField, TestWeight, VelocityGrid};
use besovclaw::flux_entropy::{
    certify_hyp_a, certify_hyp_a_with, make_entropy_pair_with, tartar_gap, CertificateMode, EntropySpec,
    FluxFunction,
};
use besovclaw::interaction::{check_identity_space, check_identity_time, manufactured_bump};
use besovclaw::kinetic::{
    check_hyp_f, extract_measure, lift, monotone_profile_density, DenseDensity, Profile, Window,
};
use besovclaw::solver::{exact_riemann, SolutionRecord};
use besovclaw::verify::{
    random_pairs, verify_lemma_delta, verify_lemma_tartar, verify_main_theorem, verify_velocity_averaging,
    VerifyOutcome, HYP_F_SHIFTS,
};

const SEED: u64 = 20240917;
const SLACK: f64 = 1.05;

struct Outcome {
    pass: bool,
    detail: String,
    fingerprint: String,
}

fn fp<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("serializable")
}

fn config(init: &str, scheme: &str, nx: usize, t1: f64) -> RunConfig {
    RunConfig { init: init.into(), scheme: scheme.into(), nx, t1, ..RunConfig::default() }
}

fn solve(init: &str, scheme: &str, nx: usize, t1: f64) -> (RunConfig, SolutionRecord) {
    let cfg = config(init, scheme, nx, t1);
    let rec = solve_from_config(&cfg).expect("solve");
    (cfg, rec)
}

fn max_ratio(o: &VerifyOutcome) -> f64 {
    o.verdicts
        .iter()
        .filter(|v| v.hard && v.rhs > 0.0)
        .map(|v| v.lhs / v.rhs)
        .fold(0.0, f64::max)
}

fn hard_pass(o: &VerifyOutcome) -> bool {
    o.verdicts.iter().filter(|v| v.hard).all(|v| v.lhs <= v.rhs * SLACK) && o.pass()
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn lemma_delta_burgers() -> Outcome {
    let flux = FluxFunction::burgers();
    let cert = certify_hyp_a(&flux, 1.0, 1000).unwrap();
    let rep = verify_lemma_delta(&flux, &cert, &random_pairs(1000, 1.0, SEED)).unwrap();
    let err = rep.max_oracle_error.unwrap_or(f64::INFINITY);
    let coincide = (rep.constant_stated - rep.constant_corrected).abs() <= 1e-15 * rep.constant_corrected.abs();
    Outcome {
        pass: rep.pairs == 1000 && err <= 1e-6 && coincide && rep.pass,
        detail: format!(
            "{} pairs, max |quadrature - closed form| = {err:.3e}, constants {:.6} / {:.6}",
            rep.pairs, rep.constant_stated, rep.constant_corrected
        ),
        fingerprint: fp(&rep),
    }
}

fn lemma_delta_quartic() -> Outcome {
    let flux = FluxFunction::even_power(2);
    let cert = certify_hyp_a_with(&flux, 1.0, 1000, CertificateMode::Sharp).unwrap();
    let rep = verify_lemma_delta(&flux, &cert, &random_pairs(10_000, 1.0, SEED)).unwrap();
    Outcome {
        pass: rep.pairs == 10_000 && rep.violations_corrected == 0 && rep.worst_ratio_stated < 1.0,
        detail: format!(
            "beta = {}, corrected violations {} (worst ratio {:.4}), stated-constant worst ratio {:.4} with {} violations",
            cert.beta, rep.violations_corrected, rep.worst_ratio_corrected, rep.worst_ratio_stated, rep.violations_stated
        ),
        fingerprint: fp(&rep),
    }
}

fn tartar() -> Outcome {
    let flux = FluxFunction::burgers();
    let cert = certify_hyp_a_with(&flux, 1.0, 1000, CertificateMode::Sharp).unwrap();
    let pair = make_entropy_pair_with(EntropySpec::Quadratic, &flux, 1.0, CertificateMode::Sharp).unwrap();
    let rep = verify_lemma_tartar(&pair, &flux, &cert, &random_pairs(10_000, 1.0, SEED)).unwrap();
    let g = tartar_gap(&pair, &flux, 0.0, 1.0);
    let gap_err = (g - 1.0 / 12.0).abs();
    Outcome {
        pass: rep.pairs == 10_000 && rep.negative == 0 && gap_err <= 1e-12 && rep.violations_corrected == 0,
        detail: format!(
            "negative gaps {}, gap(0,1) = {g:.15} (error {gap_err:.1e}), corrected violations {}",
            rep.negative, rep.violations_corrected
        ),
        fingerprint: format!("{}|{}", fp(&rep), g.to_bits()),
    }
}

fn interaction() -> Outcome {
    let mut rows = Vec::new();
    for n in [128usize, 256, 512, 1024] {
        let bf = manufactured_bump(n, n).unwrap();
        let s = check_identity_space(&bf).unwrap();
        let t = check_identity_time(&bf).unwrap();
        rows.push((s.residual, t.residual));
    }
    let factors: Vec<(f64, f64)> = rows.windows(2).map(|w| (w[0].0 / w[1].0, w[0].1 / w[1].1)).collect();
    let min_factor = factors.iter().flat_map(|f| [f.0, f.1]).fold(f64::INFINITY, f64::min);
    Outcome {
        pass: min_factor >= 1.6,
        detail: format!(
            "finest residuals {:.3e} / {:.3e}, minimum decrease factor {min_factor:.3}",
            rows[3].0, rows[3].1
        ),
        fingerprint: fp(&rows),
    }
}

fn main_theorem_on(init: &str, scheme: &str, t1: f64) -> (bool, f64, usize, String) {
    let (cfg, rec) = solve(init, scheme, 2048, t1);
    let grid = *rec.grid();
    let cutoff = cutoff_for(&cfg, &grid).unwrap();
    let u = rec.field.supnorm();
    let cert = certify_hyp_a(&rec.flux, u, 1000).unwrap();
    let sx = shifts_for(&cfg, &grid, &cutoff, Direction::X);
    let st = shifts_for(&cfg, &grid, &cutoff, Direction::T);
    let o = verify_main_theorem(&rec, &rec.flux, Some(&cert), &cutoff, &sx, &st, cfg.nv).unwrap();
    let ok = hard_pass(&o) && sx.len() >= 2 && st.len() >= 2 && (sx[0] - 8.0 * grid.dx()).abs() < 1e-12;
    (ok, max_ratio(&o), o.verdicts.len(), fp(&o))
}

fn main_theorem() -> Outcome {
    let (a, ra, na, fa) = main_theorem_on("sine:1,1", "godunov", 1.2);
    let (b, rb, nb, fb) = main_theorem_on("riemann:0,1", "nonentropic_shock", 1.0);
    Outcome {
        pass: a && b,
        detail: format!(
            "entropic sine: {na} verdicts, max lhs/rhs {ra:.4}; nonentropic shock: {nb} verdicts, max lhs/rhs {rb:.4}"
        ),
        fingerprint: format!("{fa}|{fb}"),
    }
}

fn besov_exponent() -> Outcome {
    let (cfg, shock) = {
        let cfg = config("riemann:1,0", "exact", 2048, 1.0);
        let grid = Grid2D::new(0.0, 1.0, -1.0, 1.0, 2048, 2048).unwrap();
        (cfg, exact_riemann(1.0, 0.0, &FluxFunction::burgers(), grid).unwrap())
    };
    let grid = *shock.grid();
    let cutoff = cutoff_for(&cfg, &grid).unwrap();
    let hs = shifts_for(&RunConfig { shifts: Some((4, usize::MAX)), ..cfg.clone() }, &grid, &cutoff, Direction::X);
    let rs = besov_fit(&shock.field, Direction::X, 3.0, &cutoff, &hs).unwrap();

    // Smooth data before the gradient catastrophe at t = 1/π.
    let mut smooth_cfg = config("sine:0.5,1", "godunov", 2048, 0.2);
    smooth_cfg.cutoff = Some([0.02, 0.2, 0.1, 0.9]);
    smooth_cfg.shifts = Some((4, usize::MAX));
    let smooth = solve_from_config(&smooth_cfg).unwrap();
    let sg = *smooth.grid();
    let sc = cutoff_for(&smooth_cfg, &sg).unwrap();
    let rsm = besov_fit(&smooth.field, Direction::X, 3.0, &sc, &shifts_for(&smooth_cfg, &sg, &sc, Direction::X)).unwrap();
    Outcome {
        pass: (rs.slope - 1.0).abs() <= 0.1 && rsm.slope >= 2.5,
        detail: format!("shock slope {:.4}, smooth slope {:.4}", rs.slope, rsm.slope),
        fingerprint: format!("{}|{}", fp(&rs), fp(&rsm)),
    }
}

fn measure_fraction(init: &str, scheme: &str, nx: usize, t1: f64, wrong_sign_positive: bool) -> f64 {
    let (cfg, rec) = solve(init, scheme, nx, t1);
    let kd = lift(&rec, VelocityGrid::covering(rec.field.supnorm(), cfg.nv).unwrap()).unwrap();
    let m = extract_measure(&kd, &rec.flux).unwrap();
    let t = m.totals(&Window::everything());
    let wrong = if wrong_sign_positive { t.positive } else { t.negative };
    wrong / t.total_variation
}

fn sign_discrimination() -> Outcome {
    let e1 = measure_fraction("sine:1,1", "godunov", 1024, 1.2, false);
    let e2 = measure_fraction("sine:1,1", "godunov", 2048, 1.2, false);
    let n1 = measure_fraction("riemann:0,1", "nonentropic_shock", 1024, 1.0, true);
    let n2 = measure_fraction("riemann:0,1", "nonentropic_shock", 2048, 1.0, true);
    Outcome {
        pass: e2 <= 0.02 && e2 <= e1 && n2 <= 0.02 && n2 <= n1,
        detail: format!(
            "entropic negative/TV {e1:.3e} -> {e2:.3e}, nonentropic positive/TV {n1:.3e} -> {n2:.3e}"
        ),
        fingerprint: [e1, e2, n1, n2].map(f64::to_bits).iter().map(|b| format!("{b:x}")).collect(),
    }
}

fn velocity_averaging() -> Outcome {
    let (cfg, rec) = solve("sine:1,1", "godunov", 2048, 1.2);
    let grid = *rec.grid();
    let cutoff = cutoff_for(&cfg, &grid).unwrap();
    let u = rec.field.supnorm();
    let kd = lift(&rec, VelocityGrid::covering(u, cfg.nv).unwrap()).unwrap();
    let m = extract_measure(&kd, &rec.flux).unwrap();
    let cert = certify_hyp_a(&rec.flux, u, 1000).unwrap();
    let flux = rec.flux.clone();
    let psi = TestWeight::plateau(u, 0.5, move |s| flux.da(s)).unwrap();
    let o = verify_velocity_averaging(
        &kd,
        &m,
        &rec.flux,
        Some(&cert),
        &cutoff,
        &psi,
        &shifts_for(&cfg, &grid, &cutoff, Direction::X),
        &shifts_for(&cfg, &grid, &cutoff, Direction::T),
    )
    .unwrap();
    let floor = 1.0 / (2.0 + cert.beta) - 0.1;
    let slopes: Vec<f64> = [Direction::X, Direction::T]
        .iter()
        .map(|d| {
            let pts: Vec<(f64, f64)> =
                o.verdicts.iter().filter(|v| v.direction == *d && v.lhs > 0.0).map(|v| (v.h, v.lhs)).collect();
            if pts.len() < 2 {
                f64::NAN
            } else {
                slope(&pts)
            }
        })
        .collect();
    Outcome {
        pass: hard_pass(&o) && slopes.iter().all(|s| *s >= floor),
        detail: format!(
            "{} verdicts, max lhs/rhs {:.4}, fitted slopes x {:.3} / t {:.3} (floor {floor:.4})",
            o.verdicts.len(),
            max_ratio(&o),
            slopes[0],
            slopes[1]
        ),
        fingerprint: fp(&o),
    }
}

fn hyp_f() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    let fixtures = [
        ("sine:1,1", "godunov", 1.2),
        ("sine:1,1", "lax_friedrichs", 1.2),
        ("riemann:1,0", "exact", 1.0),
        ("riemann:0,1", "exact", 1.0),
        ("riemann:0,1", "nonentropic_shock", 1.0),
    ];
    let mut fields: Vec<SpaceTimeField> = Vec::new();
    for (init, scheme, t1) in fixtures {
        let (cfg, rec) = solve(init, scheme, 512, t1);
        let kd = lift(&rec, VelocityGrid::covering(rec.field.supnorm(), cfg.nv).unwrap()).unwrap();
        let r = check_hyp_f(&kd, &HYP_F_SHIFTS, 2);
        ok &= r.pass && r.points_checked > 0;
        lines.push(fp(&r));
        fields.push(rec.field.clone());
    }
    let profiles = [Profile::Heaviside, Profile::Tanh { scale: 0.05 }, Profile::Tanh { scale: 1.0 }, Profile::Constant(0.7)];
    for rho in &fields {
        let vg = VelocityGrid::covering(rho.supnorm().max(1e-3) * 1.5, 48).unwrap();
        for p in &profiles {
            let r = check_hyp_f(&monotone_profile_density(rho, p.clone(), vg), &HYP_F_SHIFTS, 4);
            ok &= r.pass;
            lines.push(fp(&r));
        }
    }
    let lifted_profiles = lines.len();
    let g = Grid2D::new(0.0, 1.0, 0.0, 1.0, 64, 64).unwrap();
    let adversarial = check_hyp_f(
        &DenseDensity::random_signs(g, VelocityGrid::new(-1.0, 1.0, 16).unwrap(), SEED),
        &HYP_F_SHIFTS,
        1,
    );
    ok &= !adversarial.pass;
    lines.push(fp(&adversarial));
    Outcome {
        pass: ok,
        detail: format!(
            "{lifted_profiles} monotone fixtures without violations, random signs rejected with {} violations",
            adversarial.violations
        ),
        fingerprint: lines.join("|"),
    }
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() {
    let criteria: [Criterion; 9] = [
        ("delta lower bound, Burgers", lemma_delta_burgers, Duration::from_secs(5)),
        ("delta lower bound constants, quartic flux", lemma_delta_quartic, Duration::from_secs(30)),
        ("Tartar gap", tartar, Duration::from_secs(5)),
        ("interaction identities", interaction, Duration::from_secs(60)),
        ("main theorem inequalities", main_theorem, Duration::from_secs(300)),
        ("Besov exponent at p = 3", besov_exponent, Duration::from_secs(120)),
        ("entropy production sign", sign_discrimination, Duration::from_secs(120)),
        ("velocity averaging", velocity_averaging, Duration::from_secs(180)),
        ("monotonicity hypothesis", hyp_f, Duration::from_secs(60)),
    ];
    let wide = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();

    let mut failed = Vec::new();
    let mut identical = true;
    let mut differing = Vec::new();
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = wide.install(run);
        let elapsed = start.elapsed();
        let pass = o.pass && elapsed <= *budget;
        println!(
            "criterion {:>2} {}: {} ({}; {:.2}s of {}s)",
            i + 1,
            name,
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
        if !pass {
            failed.push(i + 1);
        }
        let again = single.install(run);
        if again.fingerprint != o.fingerprint {
            identical = false;
            differing.push(i + 1);
        }
    }
    println!(
        "criterion 10 determinism: {} (criteria 1-9 rerun on 1 and 4 threads{})",
        if identical { "PASS" } else { "FAIL" },
        if identical { ", byte-identical".to_string() } else { format!(", differing: {differing:?}") }
    );
    if !identical {
        failed.push(10);
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
