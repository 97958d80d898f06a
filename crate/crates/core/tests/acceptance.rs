//! Acceptance suite. Runs as a plain binary so every criterion prints one
//! PASS/FAIL line under `cargo test`.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use disslab::certificate::Certificate;
use disslab::cli::{cmd_search, cmd_verify, CERTIFICATE_FILE};
use disslab::dissipation::{
    energy_levels, rate_self_similar, rate_subsolution, self_similar_fan, BoxEnergy,
};
use disslab::riemann::{shock_curve, solve_middle_state, two_shock_condition};
use disslab::scenario::Scenario;
use disslab::solver::jacobian_check;
use disslab::subsolution::{margins, rh_residuals};
use disslab::weakform::{check_family, evaluate, FanField, QuadratureOptions, TestFunction};
use disslab::{Execution, FanPartition, FanSubsolution, GasLaw, RiemannData};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GAMMAS: [f64; 4] = [1.0, 1.4, 2.0, 2.5];
const BUNDLED: [&str; 4] = ["gamma10.toml", "gamma14.toml", "gamma20.toml", "gamma25.toml"];

type Outcome = Result<String, String>;

fn scenarios_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

/// Random data strictly inside the two-shock regime.
fn random_two_shock(rng: &mut ChaCha8Rng, law: &GasLaw, tangential: f64) -> RiemannData {
    let rho_minus = rng.gen_range(0.3..4.0);
    let rho_plus = rng.gen_range(0.3..4.0);
    let v_minus = rng.gen_range(-2.0..2.0);
    let v_plus = v_minus - shock_curve(law, rho_minus, rho_plus) - rng.gen_range(0.05..3.0);
    RiemannData::new(rho_minus, [tangential, v_minus], rho_plus, [tangential, v_plus]).unwrap()
}

fn criterion_1() -> Outcome {
    let law = GasLaw::new(2.0).unwrap();
    let w = 1.5f64.sqrt();
    let data = RiemannData::normal(1.0, w, 1.0, -w).unwrap();
    let s = solve_middle_state(&data, &law).map_err(|e| e.to_string())?;
    let d = rate_self_similar(&energy_levels(&data, &law, &s), s.nu1, s.nu2, 1.0);
    ensure(close(s.rho_m, 2.0, 1e-6), || format!("rho_m = {}", s.rho_m))?;
    ensure(close(s.v_bar, 0.0, 1e-6), || format!("v_bar = {}", s.v_bar))?;
    ensure(close(s.nu2, w, 1e-6) && close(s.nu1, -w, 1e-6), || format!("nu = {} {}", s.nu1, s.nu2))?;
    ensure(close(d, -11.022704, 1e-6), || format!("D_self = {d}"))?;

    // independent check: difference the box energy over a short time
    let fan = self_similar_fan(&data, &law, &s);
    let t = 1e-6 / s.nu1.abs().max(s.nu2.abs());
    let e0 = BoxEnergy::of_fan(&fan, 1.0, 0.0).unwrap().value;
    let e1 = BoxEnergy::of_fan(&fan, 1.0, t).unwrap().value;
    let differenced = -(e1 - e0) / t;
    ensure(close(differenced, d, 1e-6 * d.abs()), || format!("differenced {differenced} vs {d}"))?;
    Ok(format!("rho_m = {}, nu2 = {}, D_self = {d}", s.rho_m, s.nu2))
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = [0.0f64; 3];
    for i in 0..100 {
        let law = GasLaw::new(GAMMAS[i % 4]).unwrap();
        let data = random_two_shock(&mut rng, &law, 0.0);
        let s = solve_middle_state(&data, &law).map_err(|e| format!("{data:?}: {e}"))?;
        let sub = FanSubsolution::embed(&s);
        ensure(sub.alpha == 0.0 && sub.gamma2 == 0.0, || "tangential unknowns not zero".into())?;
        ensure(close(sub.gamma1, -0.5 * s.v_bar * s.v_bar, 1e-15 * (1.0 + s.v_bar * s.v_bar)), || {
            format!("gamma1 = {}", sub.gamma1)
        })?;
        let r = rh_residuals(&sub, &data, &law).max_abs();
        let m = margins(&sub, &data, &law);
        let d_self = rate_self_similar(&energy_levels(&data, &law, &s), s.nu1, s.nu2, 1.0);
        let d_sub = rate_subsolution(&data, &law, &sub, 1.0);
        worst[0] = worst[0].max(r);
        worst[1] = worst[1].max(m.m_trace.abs()).max(m.m_det.abs());
        worst[2] = worst[2].max((d_self - d_sub).abs());
        ensure(r <= 1e-10, || format!("{data:?}: residual {r:e}"))?;
        ensure(m.m_trace.abs() <= 1e-10 && m.m_det.abs() <= 1e-10, || format!("{data:?}: {m:?}"))?;
        ensure((d_self - d_sub).abs() <= 1e-10, || format!("{data:?}: rates {d_self} {d_sub}"))?;
    }
    Ok(format!("100 data, max residual {:e}, max |margin| {:e}, max rate gap {:e}", worst[0], worst[1], worst[2]))
}

fn run_bundled(file: &str, out_dir: &Path) -> Result<Certificate, String> {
    let scenario = Scenario::load(&scenarios_dir().join(file)).map_err(|e| e.to_string())?;
    let mut sink = Vec::new();
    let code = cmd_search(&scenario, out_dir, &mut sink).map_err(|e| format!("{file}: {e:#}"))?;
    ensure(code == 0, || format!("{file}: search exit code {code}"))?;
    let path = out_dir.join(CERTIFICATE_FILE);
    let cert = Certificate::from_toml(&std::fs::read_to_string(&path).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let r = cert.residuals.max_abs();
    let m = cert.margins.min();
    let d = cert.dissipation;
    ensure(r <= 1e-10, || format!("{file}: residual {r:e}"))?;
    ensure(m >= 1e-6, || format!("{file}: margin {m:e}"))?;
    ensure(d.d_sub < d.d_self && d.relative_gap() >= 1e-4, || format!("{file}: {d:?}"))?;
    let code = cmd_verify(&path, &mut sink).map_err(|e| e.to_string())?;
    ensure(code == 0, || format!("{file}: verify exit code {code}\n{}", String::from_utf8_lossy(&sink)))?;
    Ok(cert)
}

fn criterion_3(certs: &mut Vec<Certificate>) -> Outcome {
    let root = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut lines = Vec::new();
    for (gamma, file) in GAMMAS.iter().zip(BUNDLED) {
        let start = Instant::now();
        let cert = run_bundled(file, &root.path().join(file))?;
        let elapsed = start.elapsed();
        ensure(cert.gamma == *gamma, || format!("{file}: gamma {}", cert.gamma))?;
        ensure(elapsed < Duration::from_secs(60), || format!("{file}: {elapsed:?}"))?;
        lines.push(format!("gamma {gamma}: relative gap {:.3e}", cert.dissipation.relative_gap()));
        certs.push(cert);
    }
    Ok(lines.join(", "))
}

fn criterion_4(certs: &[Certificate]) -> Outcome {
    ensure(certs.len() == GAMMAS.len(), || "criterion 3 certificates missing".into())?;
    let opts = QuadratureOptions::default();
    let mut worst_balance = 0.0f64;
    let mut worst_adm = f64::INFINITY;
    let mut weakest_detection = f64::INFINITY;
    for cert in certs {
        let law = GasLaw::new(cert.gamma).unwrap();
        let family = TestFunction::family(cert.config.seed, 50, true);
        let fields = [
            FanField::self_similar(&cert.data, &law, &cert.self_similar),
            FanField::subsolution(&cert.data, &law, &cert.subsolution),
        ];
        for field in &fields {
            let rep = check_family(field, &family, &opts, Execution::Parallel).map_err(|e| e.to_string())?;
            worst_balance = worst_balance.max(rep.max_mass).max(rep.max_momentum);
            worst_adm = worst_adm.min(rep.min_admissibility);
        }

        let mut shock = cert.self_similar;
        shock.rho_m *= 1.01;
        let perturbed = FanField::self_similar(&cert.data, &law, &shock);
        let mut detected = 0.0f64;
        for tf in TestFunction::family(cert.config.seed, 50, false) {
            detected = detected.max(evaluate(&perturbed, &tf, &opts).map_err(|e| e.to_string())?.mass.abs());
        }
        weakest_detection = weakest_detection.min(detected);
    }
    ensure(worst_balance <= 1e-8, || format!("weak residual {worst_balance:e}"))?;
    ensure(worst_adm >= -1e-8, || format!("admissibility {worst_adm:e}"))?;
    ensure(weakest_detection > 1e-4, || format!("perturbation detected only at {weakest_detection:e}"))?;
    Ok(format!(
        "max balance {worst_balance:e}, min admissibility {worst_adm:e}, perturbed mass residual >= {weakest_detection:e}"
    ))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);

    // (a) the condition predicts when the middle state exists
    for i in 0..1000 {
        let law = GasLaw::new(rng.gen_range(1.0..3.0)).unwrap();
        let t_minus = rng.gen_range(-1.0..1.0);
        let t_plus = if i % 10 == 0 { rng.gen_range(-1.0..1.0) } else { t_minus };
        let data = RiemannData::new(
            rng.gen_range(0.1..5.0),
            [t_minus, rng.gen_range(-4.0..4.0)],
            rng.gen_range(0.1..5.0),
            [t_plus, rng.gen_range(-4.0..4.0)],
        )
        .unwrap();
        let holds = two_shock_condition(&data, &law).holds;
        let solved = solve_middle_state(&data, &law).is_ok();
        ensure(holds == solved, || format!("{data:?}: condition {holds}, solver {solved}"))?;
    }

    // (b) equivariances
    for i in 0..200 {
        let law = GasLaw::new(GAMMAS[i % 4]).unwrap();
        let tangential = rng.gen_range(-1.0..1.0);
        let data = random_two_shock(&mut rng, &law, tangential);
        let s = solve_middle_state(&data, &law).unwrap();
        let shift = rng.gen_range(-3.0..3.0);
        let tol = |x: f64| 1e-10 * (1.0 + x.abs());

        let b = solve_middle_state(&data.shifted_normal(shift), &law).unwrap();
        ensure(
            close(b.rho_m, s.rho_m, tol(s.rho_m))
                && close(b.v_bar, s.v_bar + shift, tol(s.v_bar + shift))
                && close(b.nu1, s.nu1 + shift, tol(s.nu1 + shift))
                && close(b.nu2, s.nu2 + shift, tol(s.nu2 + shift)),
            || format!("normal boost {data:?}"),
        )?;
        let t = solve_middle_state(&data.shifted_tangential(shift), &law).unwrap();
        ensure(
            close(t.rho_m, s.rho_m, tol(s.rho_m))
                && close(t.v_tangential, s.v_tangential + shift, tol(s.v_tangential + shift))
                && close(t.nu1, s.nu1, tol(s.nu1)),
            || format!("tangential boost {data:?}"),
        )?;
        let m = solve_middle_state(&data.mirrored(), &law).unwrap();
        ensure(
            close(m.rho_m, s.rho_m, tol(s.rho_m))
                && close(m.v_bar, -s.v_bar, tol(s.v_bar))
                && close(m.nu1, -s.nu2, tol(s.nu2))
                && close(m.nu2, -s.nu1, tol(s.nu1)),
            || format!("reflection {data:?}"),
        )?;
    }

    // (c) analytic Jacobian
    let mut worst_jac = 0.0f64;
    for i in 0..100 {
        let law = GasLaw::new(GAMMAS[i % 4]).unwrap();
        let tangential = rng.gen_range(-1.0..1.0);
        let data = random_two_shock(&mut rng, &law, tangential);
        let nu_minus = rng.gen_range(-3.0..0.0);
        let sub = FanSubsolution {
            partition: FanPartition::new(nu_minus, nu_minus + rng.gen_range(0.1..3.0)).unwrap(),
            rho1: rng.gen_range(0.5..5.0),
            alpha: rng.gen_range(-1.0..1.0),
            beta: rng.gen_range(-2.0..2.0),
            gamma1: rng.gen_range(-1.0..1.0),
            gamma2: rng.gen_range(-1.0..1.0),
            c: rng.gen_range(0.1..3.0),
        };
        let err = jacobian_check(&sub, &data, &law, 1e-6);
        worst_jac = worst_jac.max(err);
        ensure(err <= 1e-6, || format!("jacobian mismatch {err:e} at {sub:?}"))?;
    }

    // (d) linearity in L
    for i in 0..100 {
        let law = GasLaw::new(GAMMAS[i % 4]).unwrap();
        let data = random_two_shock(&mut rng, &law, 0.0);
        let s = solve_middle_state(&data, &law).unwrap();
        let levels = energy_levels(&data, &law, &s);
        let one = rate_self_similar(&levels, s.nu1, s.nu2, 1.0);
        let l = rng.gen_range(0.1..20.0);
        let scaled = rate_self_similar(&levels, s.nu1, s.nu2, l);
        ensure(close(scaled, l * one, 4.0 * f64::EPSILON * scaled.abs()), || format!("L = {l}: {scaled} vs {}", l * one))?;
    }
    Ok(format!("1000 classifications, 200 equivariance draws, max jacobian error {worst_jac:e}"))
}

fn report(index: usize, limit: Duration, run: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = run();
    let elapsed = start.elapsed();
    let outcome = outcome.and_then(|msg| {
        if elapsed <= limit {
            Ok(msg)
        } else {
            Err(format!("took {elapsed:.2?}, limit {limit:?}"))
        }
    });
    match &outcome {
        Ok(msg) => println!("criterion {index}: PASS ({elapsed:.2?}) {msg}"),
        Err(msg) => println!("criterion {index}: FAIL ({elapsed:.2?}) {msg}"),
    }
    outcome.is_ok()
}

fn main() {
    let mut certs = Vec::new();
    let results = [
        report(1, Duration::from_secs(1), criterion_1),
        report(2, Duration::from_secs(10), criterion_2),
        report(3, Duration::from_secs(240), || criterion_3(&mut certs)),
        report(4, Duration::from_secs(30), || criterion_4(&certs)),
        report(5, Duration::from_secs(60), criterion_5),
    ];
    let failed = results.iter().filter(|ok| !**ok).count();
    println!("acceptance: {} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
