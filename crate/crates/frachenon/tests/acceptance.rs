//! Acceptance criteria A1-A12, one printed pass/fail line each.

use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use frachenon::energetics::{energy_e, pohozaev_residuals, stability_margin};
use frachenon::extension::{frac_laplacian_pv, homogeneity_residual, poisson_kernel};
use frachenon::quadrature::{integrate_power_weight, integrate_tail, QuadratureSpec};
use frachenon::regimes::{classical_jl, classical_jl_henon, classify, jl_threshold, Regime};
use frachenon::special::{
    kappa_s, kappa_s_ode_crosscheck, lambda_alpha, poisson_normalizer, sphere_area,
};
use frachenon::{ExtensionField, FracParams, HalfSpacePoint, ProblemParams, RadialProfile};

const A1_SET: [(u32, f64); 4] = [(2, 0.25), (3, 0.5), (5, 0.75), (11, 0.999)];

type Outcome = Result<String, String>;

fn a1_lambda_monotonic() -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    for (n, s) in A1_SET {
        let fp = FracParams::new(n, s).map_err(|e| e.to_string())?;
        let sup = 0.999 * fp.alpha_sup();
        let mut prev = f64::INFINITY;
        for k in 0..200 {
            let alpha = sup * k as f64 / 199.0;
            let lam = lambda_alpha(fp, alpha).map_err(|e| e.to_string())?;
            if k > 0 {
                let diff = lam - prev;
                worst = worst.max(diff);
                if diff >= -1e-12 {
                    return Err(format!(
                        "lambda not strictly decreasing at N={n} s={s} alpha={alpha}: diff {diff:e}"
                    ));
                }
            }
            prev = lam;
        }
    }
    Ok(format!("largest successive difference {worst:.3e}"))
}

fn a2_classical_limit() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in [3u32, 5, 11] {
        let fp = FracParams::new(n, 1.0 - 1e-6).map_err(|e| e.to_string())?;
        let scale = ((n - 2) as f64 / 2.0).powi(2);
        for frac in [0.0, 0.3, 0.7] {
            let alpha = frac * (n - 2) as f64 / 2.0;
            let lam = lambda_alpha(fp, alpha).map_err(|e| e.to_string())?;
            let classical = scale - alpha * alpha;
            let rel = (lam - classical).abs() / scale;
            worst = worst.max(rel);
            if rel >= 1e-4 {
                return Err(format!("N={n} alpha={alpha}: rel error {rel:e}"));
            }
        }
    }
    Ok(format!("worst relative error {worst:.3e}"))
}

fn a3_jl_thresholds() -> Outcome {
    let s = 1.0 - 1e-3;
    let mut worst: f64 = 0.0;
    for n in [11u32, 12, 15] {
        let got = jl_threshold(n, s, 0.0).map_err(|e| e.to_string())?;
        let want = classical_jl(n);
        let rel = (got - want).abs() / want;
        worst = worst.max(rel);
        if rel >= 0.01 {
            return Err(format!("jl_threshold({n}, {s}, 0) = {got}, p_c = {want}, rel {rel:e}"));
        }
    }
    let got = jl_threshold(15, s, 1.0).map_err(|e| e.to_string())?;
    let want = classical_jl_henon(15, 1.0).map_err(|e| e.to_string())?;
    let rel = (got - want).abs() / want;
    worst = worst.max(rel);
    if rel >= 0.01 {
        return Err(format!("jl_threshold(15, {s}, 1) = {got}, p_+ = {want}, rel {rel:e}"));
    }
    let low = jl_threshold(3, 0.5, 0.0).map_err(|e| e.to_string())?;
    if low.is_finite() {
        return Err(format!("jl_threshold(3, 0.5, 0) = {low}, expected infinite"));
    }
    // The criterion asks for an infinite report at N=10, s=1-1e-3, but the
    // JL defect genuinely changes sign there: p lambda(alpha~) - lambda(0)
    // crosses zero at p ~ 2.2486e3 (the asymptotic defect ~ 5.3e-3 is
    // overtaken at finite p). Reporting the measured crossing and failing
    // honestly instead of special-casing it away.
    let ten = jl_threshold(10, s, 0.0).map_err(|e| e.to_string())?;
    if ten.is_finite() {
        return Err(format!(
            "jl_threshold(10, {s}, 0) = {ten:.6} (finite crossing; the criterion expects an \
             infinite report, but the sign change is real and verified at high precision)"
        ));
    }
    Ok(format!("classical agreement worst rel {worst:.3e}"))
}

fn a4_eigen_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    for (n, s) in A1_SET {
        let fp = FracParams::new(n, s).map_err(|e| e.to_string())?;
        for frac in [0.2, 0.5, 0.8] {
            let alpha = frac * fp.alpha_sup();
            let m = fp.alpha_sup() - alpha;
            let profile = RadialProfile::power_law(m, 1.0);
            let pv = frac_laplacian_pv(&profile, fp, 1.0).map_err(|e| e.to_string())?;
            let lam = lambda_alpha(fp, alpha).map_err(|e| e.to_string())?;
            let diff = (pv - lam).abs();
            worst = worst.max(diff);
            if diff >= 1e-4 {
                return Err(format!("N={n} s={s} alpha={alpha:.4}: |pv - lambda| = {diff:e}"));
            }
        }
    }
    Ok(format!("worst |pv - lambda| {worst:.3e}"))
}

fn a5_poisson_mass() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in [2u32, 3, 5] {
        for s in [0.25, 0.5, 0.75] {
            let fp = FracParams::new(n, s).map_err(|e| e.to_string())?;
            let c = poisson_normalizer(fp).map_err(|e| e.to_string())?;
            for t in [0.5, 2.0] {
                let f = |r: f64| r.powf(n as f64 - 1.0) * poisson_kernel(fp, c, r, t);
                let spec = QuadratureSpec::with_tols(1e-13, 1e-11);
                let near = integrate_power_weight(&f, 0.0, 10.0 * t, &spec);
                let far = integrate_tail(&f, 10.0 * t, 1.0 + 2.0 * s, &spec);
                let mass = sphere_area(n) * (near.value + far.value);
                let err = (mass - 1.0).abs();
                worst = worst.max(err);
                if err >= 1e-8 {
                    return Err(format!("N={n} s={s} t={t}: |mass - 1| = {err:e}"));
                }
            }
        }
    }
    Ok(format!("worst |mass - 1| {worst:.3e}"))
}

fn a6_kappa() -> Outcome {
    let half = kappa_s(0.5).map_err(|e| e.to_string())?;
    if half != 1.0 {
        return Err(format!("kappa_s(0.5) = {half:?}, expected exactly 1"));
    }
    let mut worst: f64 = 0.0;
    for k in 1..=9 {
        let s = 0.1 * k as f64;
        let closed = kappa_s(s).map_err(|e| e.to_string())?;
        let ode = kappa_s_ode_crosscheck(s).map_err(|e| e.to_string())?;
        let rel = (ode - closed).abs() / closed;
        worst = worst.max(rel);
        if rel >= 1e-4 {
            return Err(format!("s={s}: ODE route rel error {rel:e}"));
        }
    }
    Ok(format!("kappa_s(1/2) = 1 exactly; worst ODE rel error {worst:.3e}"))
}

fn a7_homogeneity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x48454e4f4e);
    let mut worst: f64 = 0.0;
    for (n, s) in A1_SET {
        let fp = FracParams::new(n, s).map_err(|e| e.to_string())?;
        for _ in 0..12 {
            let alpha = rng.gen_range(0.05..0.95) * fp.alpha_sup();
            let r = rng.gen_range(0.1..2.0);
            let t = rng.gen_range(0.1..2.0);
            let k = rng.gen_range(0.25..4.0);
            let pt = HalfSpacePoint::new(r, t).map_err(|e| e.to_string())?;
            let res = homogeneity_residual(fp, alpha, pt, k).map_err(|e| e.to_string())?;
            worst = worst.max(res);
            if res >= 1e-6 {
                return Err(format!(
                    "N={n} s={s} alpha={alpha:.4} X=({r:.3},{t:.3}) k={k:.3}: residual {res:e}"
                ));
            }
        }
    }
    Ok(format!("worst residual {worst:.3e} over 48 draws"))
}

fn a8_pohozaev() -> Outcome {
    let mut worst: f64 = 0.0;
    for (ell, p) in [(0.0, 3.0), (1.0, 4.0)] {
        let pp = ProblemParams::new(5, 0.5, ell, p).map_err(|e| e.to_string())?;
        let field = ExtensionField::singular_solution(pp).map_err(|e| e.to_string())?;
        let amp = frachenon::regimes::singular_amplitude(pp).map_err(|e| e.to_string())?;
        let trace = RadialProfile::power_law(0.5 * pp.gamma(), amp);
        for radius in [0.5, 1.0, 2.0] {
            let (scaling, energy) =
                pohozaev_residuals(&field, &trace, radius, pp).map_err(|e| e.to_string())?;
            for res in [&scaling, &energy] {
                worst = worst.max(res.rel_residual);
                if res.rel_residual >= 1e-3 {
                    return Err(format!(
                        "ell={ell} p={p} R={radius}: {} rel residual {:e}",
                        res.identity_name, res.rel_residual
                    ));
                }
            }
        }
    }
    Ok(format!("worst relative residual {worst:.3e}"))
}

fn a9_monotonicity_degeneracy() -> Outcome {
    let pp = ProblemParams::new(5, 0.5, 0.0, 3.0).map_err(|e| e.to_string())?;
    let field = ExtensionField::singular_solution(pp).map_err(|e| e.to_string())?;
    let amp = frachenon::regimes::singular_amplitude(pp).map_err(|e| e.to_string())?;
    let trace = RadialProfile::power_law(0.5 * pp.gamma(), amp);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for lambda in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let e = energy_e(&field, &trace, lambda, pp).map_err(|e| e.to_string())?.e;
        lo = lo.min(e);
        hi = hi.max(e);
    }
    let spread = (hi - lo).abs() / hi.abs();
    if spread >= 1e-6 {
        return Err(format!("E(lambda) relative spread {spread:e}"));
    }
    // Closed-form degeneracy: for the gamma/2-homogeneous field the Eq. 4.4
    // integrand m U/|X| + dU/d|X| cancels identically; both terms come from
    // the same angular interpolant, so the cancellation survives rounding.
    let m = 0.5 * pp.gamma();
    for (r, t) in [(0.8, 0.6), (0.2, 1.7), (2.5, 0.1)] {
        let pt = HalfSpacePoint::new(r, t).map_err(|e| e.to_string())?;
        let v = field.value(pt).map_err(|e| e.to_string())?;
        let (gr, gt) = field.gradient(pt).map_err(|e| e.to_string())?;
        let rr = pt.radius();
        let integrand = m * v / rr + (gr * r + gt * t) / rr;
        let scale = (m * v / rr).abs();
        if integrand.abs() >= 1e-12 * scale {
            return Err(format!(
                "Eq. 4.4 integrand at ({r},{t}): {integrand:e} vs term scale {scale:e}"
            ));
        }
    }
    Ok(format!("E spread {spread:.3e}; Eq. 4.4 integrand vanishes to rounding"))
}

fn a10_dirichlet_identity() -> Outcome {
    let fp = FracParams::new(3, 0.5).map_err(|e| e.to_string())?;
    let grid: Vec<f64> = (1..=240).map(|k| 1.2 * k as f64 / 240.0).collect();
    let vals: Vec<f64> = grid.iter().map(|&r| (1.0 - r * r).max(0.0).powi(3)).collect();
    let bump = RadialProfile::sampled(grid, vals, f64::INFINITY).map_err(|e| e.to_string())?;
    let field = ExtensionField::poisson_of(fp, bump.clone()).map_err(|e| e.to_string())?;
    let lhs =
        frachenon::energetics::half_space_gradient_energy(&field, 12.0).map_err(|e| e.to_string())?;
    let rhs = kappa_s(fp.s).map_err(|e| e.to_string())?
        * frachenon::energetics::hs_bilinear_form(&bump, &bump, fp).map_err(|e| e.to_string())?;
    let rel = (lhs - rhs).abs() / rhs;
    if rel >= 1e-3 {
        return Err(format!("gradient energy {lhs} vs kappa_s form {rhs}: rel {rel:e}"));
    }
    Ok(format!("relative difference {rel:.3e}"))
}

fn a11_stability_coherence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x504f485a);
    let mut drawn = 0;
    while drawn < 100 {
        let n = rng.gen_range(1u32..=15);
        let s = rng.gen_range(0.05..0.95);
        if n as f64 <= 2.0 * s {
            continue;
        }
        let ell = rng.gen_range(-2.0 * s + 0.05..2.0);
        let p_s = match frachenon::regimes::sobolev_exponent(n, s, ell) {
            Ok(v) => v,
            Err(_) => continue,
        };
        let p = p_s * (1.0 + rng.gen_range(0.01..8.0));
        let pp = match ProblemParams::new(n, s, ell, p) {
            Ok(v) => v,
            Err(_) => continue,
        };
        let report = classify(pp).map_err(|e| e.to_string())?;
        let margin = stability_margin(pp).map_err(|e| e.to_string())?;
        let agree = match report.regime {
            Regime::SupercriticalNonexistence => margin < 0.0,
            Regime::SupercriticalExistenceSide => margin >= 0.0,
            other => {
                return Err(format!(
                    "supercritical draw N={n} s={s:.3} ell={ell:.3} p={p:.3} classified {other:?}"
                ))
            }
        };
        if !agree {
            return Err(format!(
                "sign disagreement at N={n} s={s:.4} ell={ell:.4} p={p:.4}: margin {margin:e}, \
                 regime {:?}",
                report.regime
            ));
        }
        drawn += 1;
    }
    Ok("sign agreement on 100 random supercritical tuples".into())
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_frachenon"))
}

fn a12_cli_contract() -> Outcome {
    let classify_args =
        ["classify", "--N", "5", "--s", "0.5", "--ell", "0", "--p", "3:6:4"];
    let first = bin().args(classify_args).output().map_err(|e| e.to_string())?;
    let second = bin().args(classify_args).output().map_err(|e| e.to_string())?;
    if first.stdout != second.stdout {
        return Err("repeated classify invocations differ byte-wise".into());
    }
    if first.status.code() != Some(0) {
        return Err(format!("classify exit {:?}, expected 0", first.status.code()));
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let bad = dir.path().join("bad.profile");
    std::fs::write(&bad, "N=3 tail=4\n0.5 1.0\noops not-a-number\n").map_err(|e| e.to_string())?;
    let steep = dir.path().join("steep.profile");
    let mut text = String::from("N=3 tail=4\n");
    for k in 1..=40 {
        let r = 0.05 * k as f64;
        text.push_str(&format!("{r} {}\n", r.powf(-3.0)));
    }
    std::fs::write(&steep, text).map_err(|e| e.to_string())?;
    let own = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let cases: Vec<(Vec<String>, i32, &str)> = vec![
            (own(&["verify", "eigen", "--N", "3", "--s", "0.5", "--tol", "1e-30"]), 1, "identity failure"),
            (own(&["classify", "--N", "3", "--s", "0.5", "--ell", "-1.0", "--p", "2"]), 2, "parameter rejection"),
            (own(&["verify", "dirichlet", "--N", "3", "--s", "0.5", "--profile", steep.to_str().unwrap()]), 3, "non-convergence"),
            (own(&["classify", "--bogus"]), 64, "usage"),
            (own(&["extend-eval", "--N", "3", "--s", "0.5", "--profile", bad.to_str().unwrap(), "--point", "1,1"]), 65, "data format"),
        ];
    for (args, want, label) in cases {
        let out = bin().args(&args).output().map_err(|e| e.to_string())?;
        if out.status.code() != Some(want) {
            return Err(format!(
                "{label} scenario {args:?}: exit {:?}, expected {want}; stderr: {}",
                out.status.code(),
                String::from_utf8_lossy(&out.stderr)
            ));
        }
    }
    Ok("deterministic output; exit codes 0/1/2/3/64/65 all reached".into())
}

#[test]
fn acceptance() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("A1  lambda monotonicity", a1_lambda_monotonic),
        ("A2  classical limit", a2_classical_limit),
        ("A3  JL thresholds", a3_jl_thresholds),
        ("A4  eigen identity", a4_eigen_identity),
        ("A5  Poisson kernel mass", a5_poisson_mass),
        ("A6  kappa_s crosscheck", a6_kappa),
        ("A7  extension homogeneity", a7_homogeneity),
        ("A8  Pohozaev identities", a8_pohozaev),
        ("A9  monotonicity degeneracy", a9_monotonicity_degeneracy),
        ("A10 Dirichlet trace energy", a10_dirichlet_identity),
        ("A11 stability coherence", a11_stability_coherence),
        ("A12 CLI contract", a12_cli_contract),
    ];
    let mut failures = Vec::new();
    for (name, run) in criteria {
        match run() {
            Ok(note) => println!("{name}: PASS ({note})"),
            Err(why) => {
                println!("{name}: FAIL ({why})");
                failures.push(format!("{name}: {why}"));
            }
        }
    }
    assert!(failures.is_empty(), "failed criteria:\n{}", failures.join("\n"));
}
