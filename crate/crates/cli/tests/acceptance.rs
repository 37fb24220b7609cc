//! Acceptance suite: one pass/fail line per criterion, non-zero exit if any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use causalq_core::channels::{
    apply_channel, apply_instrument, apply_kraus, is_cptp, kraus_channel, kraus_from_choi,
};
use causalq_core::diagnostics::{emit_report, preset, Mode, Rule, Verdict};
use causalq_core::gates;
use causalq_core::process::{born_joint, supermap_joint, Arm, Wiring};
use causalq_core::random;
use causalq_core::sim::{
    build_switch_circuit, conditional_tv, run_switch_experiment, simulate_exact, target_given_control,
    NoiseModel,
};
use causalq_core::tensor::{SpaceLabel, DEFAULT_TOL};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Tolerances and golden values.
const IDEAL_TOL: f64 = 1e-10;
const TV_TOL: f64 = 1e-9;
const SAMPLED_TV_BAND: f64 = 0.01;
const EQUIVALENCE_TOL: f64 = 1e-9;
const RULE4_GOLDEN_RESIDUAL: f64 = 0.5;
const RULE4_MIN_RESIDUAL: f64 = 0.01;
const DECOHERED_MAX_RESIDUAL: f64 = 1e-9;
const LOCALITY_TOL: f64 = 1e-9;
const NOISY_MIN_TV: f64 = 0.3;
const ROUND_TRIP_TOL: f64 = 1e-8;
const BRANCH_SUM_TOL: f64 = 1e-10;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion1() -> Outcome {
    let start = Instant::now();
    let d = simulate_exact(&build_switch_circuit(None)).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let expected = [("00", 0.25), ("01", 0.25), ("10", 0.0), ("11", 0.5)];
    let err = expected
        .iter()
        .map(|(l, p)| (d.prob(l).unwrap_or(f64::NAN) - p).abs())
        .fold(0.0, f64::max);
    check(
        err <= IDEAL_TOL && elapsed < Duration::from_secs(1),
        format!("max |P - P_ideal| = {err:.2e} (tol {IDEAL_TOL:.0e}), {elapsed:.2?}"),
    )
}

fn criterion2() -> Outcome {
    let d = simulate_exact(&build_switch_circuit(None)).map_err(|e| e.to_string())?;
    let joint = d.joint_control_target().map_err(|e| e.to_string())?;
    let exact_tv = conditional_tv(&target_given_control(&joint)).ok_or("empty control bin")?;
    let seeds = 100u64;
    let mut within = 0;
    for seed in 0..seeds {
        let run = run_switch_experiment(100_000, seed, None).map_err(|e| e.to_string())?;
        if let Some(tv) = conditional_tv(&run.conditional) {
            if (tv - 0.5).abs() <= SAMPLED_TV_BAND {
                within += 1;
            }
        }
    }
    check(
        (exact_tv - 0.5).abs() <= TV_TOL && within * 100 >= seeds * 99,
        format!("exact TV = {exact_tv:.12}, sampled within +/-{SAMPLED_TV_BAND} in {within}/{seeds} seeds"),
    )
}

fn criterion3() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0003);
    let mut worst = 0.0f64;
    let mut pairs = 0usize;
    for _ in 0..50 {
        let s = random::switch_scenario(&mut rng);
        let inst = random::instrument(SpaceLabel::qubit("A"), 2, &mut rng);
        let sigma = random::density_matrix(2, &mut rng);
        let controls = match s.wiring {
            Wiring::Switch { .. } => vec![
                Some(gates::ket0()),
                Some(gates::ket1()),
                Some(gates::plus()),
                None,
            ],
            Wiring::Fixed(_) => vec![None],
        };
        for arm in [Arm::Natural, Arm::Observe(&inst), Arm::Do(&sigma)] {
            let r = s.resolve(arm).map_err(|e| e.to_string())?;
            for c in &controls {
                let a = supermap_joint(&r, c.as_ref()).map_err(|e| e.to_string())?;
                let b = born_joint(&r, c.as_ref()).map_err(|e| e.to_string())?;
                for (x, y) in a.iter().zip(&b) {
                    worst = worst.max((x - y).abs());
                    pairs += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    check(
        worst <= EQUIVALENCE_TOL && elapsed < Duration::from_secs(10),
        format!("50 scenarios, {pairs} (O_B, c) pairs, max gap {worst:.2e} (tol {EQUIVALENCE_TOL:.0e}), {elapsed:.2?}"),
    )
}

fn criterion4() -> Outcome {
    let fit = |name: &str| {
        let s = preset(name).map_err(|e| e.to_string())?;
        let r = emit_report(&s, &[Rule::R4], Mode::Exact, None).map_err(|e| e.to_string())?;
        r.rule4_fit.ok_or_else(|| format!("{name}: no fit"))
    };
    let coherent = fit("switch-coherent")?;
    let decohered = fit("switch-decohered")?;
    check(
        coherent.residual > RULE4_MIN_RESIDUAL
            && (coherent.residual - RULE4_GOLDEN_RESIDUAL).abs() <= 1e-9
            && decohered.residual <= DECOHERED_MAX_RESIDUAL,
        format!(
            "coherent residual {:.12} (golden {RULE4_GOLDEN_RESIDUAL}), decohered residual {:.2e}",
            coherent.residual, decohered.residual
        ),
    )
}

fn criterion5() -> Outcome {
    let s = preset("fixed-order-ba").map_err(|e| e.to_string())?;
    let r = emit_report(&s, &[Rule::R3], Mode::Exact, None).map_err(|e| e.to_string())?;
    let c = &r.checks[0];
    let tv = c.quantity.ok_or("no quantity")?;
    let rule3_ok = c.verdict == Verdict::Pass && tv <= LOCALITY_TOL;

    let ab = preset("fixed-order-ab").map_err(|e| e.to_string())?;
    let causalq_core::diagnostics::Generator::Process(scenario) = &ab.generator else {
        return Err("fixed-order-ab is not a process scenario".into());
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0005);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let sigma = random::density_matrix(2, &mut rng);
        let p = born_joint(
            &scenario
                .resolve(Arm::Do(&sigma))
                .map_err(|e| e.to_string())?,
            None,
        )
        .map_err(|e| e.to_string())?;
        let out = apply_kraus(&scenario.channel_b, &sigma);
        worst = worst
            .max((p[0] - out[(0, 0)].re).abs())
            .max((p[1] - out[(1, 1)].re).abs());
    }
    check(
        rule3_ok && worst <= LOCALITY_TOL,
        format!(
            "B<A rule-3 TV {tv:.2e} ({}), A<B do-at-A vs composition max gap {worst:.2e}",
            c.verdict.as_str()
        ),
    )
}

fn criterion6() -> Outcome {
    let tv = |noise: Option<NoiseModel>| -> Result<f64, String> {
        let d = simulate_exact(&build_switch_circuit(noise)).map_err(|e| e.to_string())?;
        let j = d.joint_control_target().map_err(|e| e.to_string())?;
        conditional_tv(&target_given_control(&j)).ok_or_else(|| "empty control bin".to_string())
    };
    let ideal = tv(None)?;
    let noisy = tv(Some(NoiseModel::reference()))?;
    let mut sweep = Vec::new();
    for p in [0.0, 0.05, 0.1, 0.2] {
        sweep.push(tv(Some(
            NoiseModel::uniform(p).map_err(|e| e.to_string())?,
        ))?);
    }
    let monotone = sweep.windows(2).all(|w| w[1] <= w[0] + 1e-9);
    check(
        noisy > NOISY_MIN_TV && noisy < ideal && monotone,
        format!("ideal {ideal:.6}, reference noise {noisy:.7}, sweep {sweep:.6?}"),
    )
}

fn criterion7() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0007);
    let (mut round_trip, mut apply_gap, mut branch_gap) = (0.0f64, 0.0f64, 0.0f64);
    let mut all_cptp = true;
    for _ in 0..200 {
        let k = random::cptp_kraus(2, 2, rng.gen_range(1..=4), &mut rng);
        let j = kraus_channel(&k).map_err(|e| e.to_string())?;
        all_cptp &= is_cptp(&j, DEFAULT_TOL).is_cptp();
        let back = kraus_channel(&kraus_from_choi(&j, DEFAULT_TOL).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        round_trip = round_trip.max(back.matrix.max_abs_diff(&j.matrix));
        let rho = random::density_matrix(2, &mut rng);
        let via_choi = apply_channel(&j, &rho).map_err(|e| e.to_string())?;
        apply_gap = apply_gap.max(via_choi.max_abs_diff(&apply_kraus(&k, &rho)));
        let inst = random::instrument(SpaceLabel::qubit("A"), rng.gen_range(2..=4), &mut rng);
        let total: f64 = apply_instrument(&inst, &rho)
            .map_err(|e| e.to_string())?
            .iter()
            .map(|b| b.prob)
            .sum();
        branch_gap = branch_gap.max((total - 1.0).abs());
    }
    let elapsed = start.elapsed();
    check(
        all_cptp
            && round_trip <= ROUND_TRIP_TOL
            && apply_gap <= ROUND_TRIP_TOL
            && branch_gap <= BRANCH_SUM_TOL
            && elapsed < Duration::from_secs(5),
        format!(
            "200 channels, cptp {all_cptp}, round trip {round_trip:.2e}, apply gap {apply_gap:.2e}, branch sum gap {branch_gap:.2e}, {elapsed:.2?}"
        ),
    )
}

fn criterion8() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_causalq");
    let run = |args: &[&str]| {
        Command::new(bin)
            .args(args)
            .env_remove("CAUSALQ_SEED")
            .output()
            .map_err(|e| e.to_string())
    };
    let a = run(&["tables", "--seed", "7", "--shots", "10000"])?;
    let b = run(&["tables", "--seed", "7", "--shots", "10000"])?;
    let coherent = run(&["diagnose", "--scenario", "switch-coherent"])?
        .status
        .code();
    let fixed = run(&["diagnose", "--scenario", "fixed-order-ab"])?
        .status
        .code();
    check(
        a.status.success() && a.stdout == b.stdout && !a.stdout.is_empty() && coherent == Some(1) && fixed == Some(0),
        format!(
            "tables identical: {}, switch-coherent exit {coherent:?}, fixed-order-ab exit {fixed:?}",
            a.stdout == b.stdout
        ),
    )
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("exact ideal switch distribution", criterion1),
        ("conditionals differ across control values", criterion2),
        (
            "supermap and process-matrix probabilities agree",
            criterion3,
        ),
        ("coherent switch leaves the convex hull", criterion4),
        ("fixed-order screening", criterion5),
        ("asymmetry survives reference noise", criterion6),
        ("channel-layer invariants", criterion7),
        ("CLI determinism and exit codes", criterion8),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (tag, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("acceptance criterion {} [{tag}] {name}: {detail}", i + 1);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
