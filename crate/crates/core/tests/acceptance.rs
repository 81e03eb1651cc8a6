//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

use qstfidlab::channel::{single_qubit_superoperator, TransitionAmplitude};
use qstfidlab::classes::{classify_canonical, sample_class_state, DEFAULT_TOL};
use qstfidlab::entanglement::{monogamy_residual, SquaredMeasures};
use qstfidlab::fidelity::{
    avg_fidelity_3q_fixed_invariants, avg_fidelity_haar_closed, class_avg_fidelity, class_fixed_entanglement_fidelity,
    reduction_factor, variants, ClassTag, ReductionKind, SingleQubitAvgFidelity,
};
use qstfidlab::montecarlo::{derive_seed, haar_pure_state, substream};
use serde_json::Value;

const SIGMA: f64 = 4.0;
const EXACT: f64 = 1e-12;
const SAMPLES: &str = "100000";
const SEED: &str = "7";

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn run_verify(workers: usize) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_qstfidlab"))
        .args(["verify", "--suite", "all", "--samples", SAMPLES, "--seed", SEED])
        .args(["--workers", &workers.to_string()])
        .output()
        .expect("verify runs");
    assert!(out.status.code().is_some(), "verify was killed");
    out.stdout
}

struct Checks<'a>(&'a [Value]);

impl Checks<'_> {
    fn with_prefix(&self, prefix: &str) -> Vec<&Value> {
        self.0
            .iter()
            .filter(|c| c["name"].as_str().unwrap().starts_with(prefix))
            .collect()
    }

    fn named(&self, name: &str) -> &Value {
        self.0
            .iter()
            .find(|c| c["name"] == name)
            .unwrap_or_else(|| panic!("no check {name}"))
    }
}

fn summarize(checks: &[&Value]) -> Outcome {
    let max = checks
        .iter()
        .map(|c| c["sigma_distance"].as_f64().unwrap())
        .fold(0.0, f64::max);
    let passed = checks.iter().filter(|c| c["pass"] == true).count();
    outcome(
        passed == checks.len() && !checks.is_empty(),
        format!(
            "{passed}/{} checks within {SIGMA} sigma, max {max:.2} sigma",
            checks.len()
        ),
    )
}

fn sigma_to(check: &Value, target: f64) -> f64 {
    let est = check["estimate"].as_f64().unwrap();
    let se = check["std_error"].as_f64().unwrap().max(1e-12);
    (est - target).abs() / se
}

fn f1_of(m: f64) -> SingleQubitAvgFidelity {
    SingleQubitAvgFidelity::from_amplitude(TransitionAmplitude::real(m).unwrap()).unwrap()
}

fn criterion_1(checks: &Checks) -> Outcome {
    summarize(&checks.with_prefix("haar "))
}

fn criterion_2(checks: &Checks, report: &Value) -> Outcome {
    let mut o = summarize(&checks.with_prefix("two_qubit C="));
    let reading = report["readings"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["topic"] == "two-qubit concurrence term at phase 0")
        .expect("sign reading present");
    let minus = &reading["candidates"][0];
    let plus = &reading["candidates"][1];
    let sign_ok = minus["form"] == "(3 - |f|^2 - 2|f|)" && minus["consistent"] == true && plus["consistent"] == false;
    o.pass &= sign_ok;
    o.detail = format!(
        "{}; report states: \"{}\" (minus {:.2} sigma, plus {:.0} sigma)",
        o.detail,
        reading["statement"].as_str().unwrap(),
        minus["max_sigma_distance"].as_f64().unwrap(),
        plus["max_sigma_distance"].as_f64().unwrap()
    );
    o
}

fn criterion_3(checks: &Checks) -> Outcome {
    summarize(&checks.with_prefix("invariants "))
}

fn three_qubit_content(tag: ClassTag) -> (usize, bool) {
    let mut rng = substream(derive_seed(0, "class content"), tag as u64);
    let c = sample_class_state(tag, &mut rng).unwrap();
    let j = c.invariants();
    let pairs = [j.j1(), j.j2(), j.j3()].iter().filter(|&&x| x > 1e-9).count();
    (pairs, j.j4() > 1e-9)
}

fn criterion_4(checks: &Checks) -> Outcome {
    let mut o = summarize(&checks.with_prefix("class "));
    let mut worst: f64 = 0.0;
    for tag in ClassTag::THREE_QUBIT {
        let (pairs, tangle) = three_qubit_content(tag);
        // Haar averages <J_k> = 1/24 and <J4> = 1/12 inserted into F1³ - 8 R3 (J1 + J2 + J3 + 3/2 J4).
        let weight = 8.0 * (pairs as f64 / 24.0 + if tangle { 1.5 / 12.0 } else { 0.0 });
        for i in 0..=500 {
            let f1 = f1_of(i as f64 / 500.0);
            let expected = f1.value().powi(3) - weight * reduction_factor(ReductionKind::R3, f1);
            worst = worst.max((class_avg_fidelity(tag, f1).unwrap() - expected).abs());
        }
    }
    o.pass &= worst <= EXACT;
    o.detail = format!(
        "{}; class averages vs invariant substitution max |diff| {worst:.1e}",
        o.detail
    );
    o
}

fn argmax(kind: ReductionKind) -> f64 {
    let r = |x: f64| reduction_factor(kind, SingleQubitAvgFidelity::new(x).unwrap());
    let n = 100_000;
    let best = (0..=n)
        .map(|i| 0.5 + 0.5 * i as f64 / n as f64)
        .fold(
            (0.5, f64::NEG_INFINITY),
            |acc, x| if r(x) > acc.1 { (x, r(x)) } else { acc },
        )
        .0;
    let (mut a, mut b) = ((best - 1e-5).max(0.5), (best + 1e-5).min(1.0));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..100 {
        let (c, d) = (b - g * (b - a), a + g * (b - a));
        if r(c) > r(d) {
            b = d;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

fn criterion_5() -> Outcome {
    let targets = [
        (ReductionKind::R2, 0.75),
        (ReductionKind::R3, (1.0 + 1.0 / 3f64.sqrt()) / 2.0),
        (ReductionKind::R4b, 0.8202),
        (ReductionKind::R4a, 0.85),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (kind, target) in targets {
        let x = argmax(kind);
        let ok = (x - target).abs() <= 1e-3;
        pass &= ok;
        parts.push(format!(
            "{} max at {x:.5} vs {target:.5} {}",
            kind.name(),
            if ok { "ok" } else { "OFF" }
        ));
    }
    outcome(pass, parts.join(", "))
}

fn criterion_6(checks: &Checks, report: &Value) -> Outcome {
    let mut worst_literal: f64 = 0.0;
    let mut failing = Vec::new();
    for m in [0.5, 0.8] {
        for tag in ClassTag::FOUR_QUBIT {
            let check = checks.named(&format!("four_qubit {tag} |f|={m}"));
            let s = sigma_to(check, variants::four_qubit_with_r4a(tag, f1_of(m)).unwrap());
            worst_literal = worst_literal.max(s);
            if s > SIGMA {
                failing.push(format!("{tag}@{m} {s:.1} sigma"));
            }
        }
    }
    let pairs = summarize(
        &checks
            .with_prefix("four_qubit")
            .into_iter()
            .filter(|c| c["name"].as_str().unwrap().contains(" vs "))
            .collect::<Vec<_>>(),
    );
    let validated = summarize(
        &checks
            .with_prefix("four_qubit")
            .into_iter()
            .filter(|c| !c["name"].as_str().unwrap().contains(" vs "))
            .collect::<Vec<_>>(),
    );
    let reading = report["readings"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["topic"] == "GHZ4 and B2 reduction term")
        .expect("four-qubit reading present");
    outcome(
        failing.is_empty() && pairs.pass,
        format!(
            "literal reading max {worst_literal:.1} sigma (failing: {}); degenerate pairs {}; \
             validated form {}; report states: \"{}\"",
            if failing.is_empty() {
                "none".to_owned()
            } else {
                failing.join(", ")
            },
            pairs.detail,
            validated.detail,
            reading["statement"].as_str().unwrap()
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..=500 {
        let m = i as f64 / 500.0;
        let f = TransitionAmplitude::real(m).unwrap();
        let f1 = f1_of(m);
        let x = f1.value();
        let two = x * x - 0.8 * reduction_factor(ReductionKind::R2, f1);
        let three = x.powi(3) - 2.0 * reduction_factor(ReductionKind::R3, f1);
        worst = worst.max((two - avg_fidelity_haar_closed(2, f).unwrap()).abs());
        worst = worst.max((three - avg_fidelity_haar_closed(3, f).unwrap()).abs());
    }
    let mut worst_class: f64 = 0.0;
    for tag in ClassTag::THREE_QUBIT {
        let mut rng = substream(derive_seed(0, "class substitution"), tag as u64);
        for k in 0..200 {
            let c = sample_class_state(tag, &mut rng).unwrap();
            let j = c.invariants();
            let f1 = f1_of(k as f64 / 199.0);
            let class = class_fixed_entanglement_fidelity(tag, f1, &SquaredMeasures::from_invariants(&j)).unwrap();
            let general = avg_fidelity_3q_fixed_invariants(f1, &j).unwrap();
            worst_class = worst_class.max((class - general).abs());
        }
    }
    outcome(
        worst <= EXACT && worst_class <= EXACT,
        format!(
            "Haar identities max |diff| {worst:.1e}; class formulas vs invariant form max |diff| {worst_class:.1e}"
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut min_choi = f64::INFINITY;
    for i in 0..=100 {
        for p in 0..36 {
            let f = TransitionAmplitude::new(i as f64 / 100.0, 2.0 * PI * p as f64 / 36.0).unwrap();
            let choi = single_qubit_superoperator(f).choi();
            let e = choi.symmetric_eigenvalues().min();
            min_choi = min_choi.min(e);
        }
    }
    let mut min_residual = f64::INFINITY;
    let seed = derive_seed(0, "monogamy");
    for i in 0..10_000 {
        let psi = haar_pure_state(3, &mut substream(seed, i)).unwrap();
        min_residual = min_residual.min(monogamy_residual(&psi).unwrap());
    }
    let mut bound_ok = true;
    let mut equality_ok = true;
    for n in 2..=4 {
        for i in 0..=100 {
            let m = i as f64 / 100.0;
            let bound = SingleQubitAvgFidelity::phase_optimal(m).unwrap().value().powi(n as i32);
            for p in 0..72 {
                let phase = 2.0 * PI * p as f64 / 72.0;
                let f = TransitionAmplitude::new(m, phase).unwrap();
                let gap = bound - avg_fidelity_haar_closed(n, f).unwrap();
                bound_ok &= gap >= -EXACT;
                let endpoint = m == 0.0 || (m == 1.0 && p == 0);
                equality_ok &= endpoint == (gap <= EXACT);
            }
        }
    }
    let mut round_trip = Vec::new();
    for tag in ClassTag::THREE_QUBIT {
        let seed = derive_seed(0, &format!("round trip {tag}"));
        let hits = (0..1000)
            .filter(|&i| {
                let c = sample_class_state(tag, &mut substream(seed, i)).unwrap();
                classify_canonical(&c, DEFAULT_TOL).unwrap().tag() == Some(tag)
            })
            .count();
        round_trip.push((tag, hits));
    }
    let all_round_trip = round_trip.iter().all(|&(_, h)| h == 1000);
    outcome(
        min_choi >= -1e-10 && min_residual >= -1e-9 && bound_ok && equality_ok && all_round_trip,
        format!(
            "min Choi eigenvalue {min_choi:.1e}; min monogamy residual {min_residual:.1e}; \
             <F_n> <= F1^n {}; equality only at f in {{0,1}} {}; classifier round trip {}",
            if bound_ok { "holds" } else { "VIOLATED" },
            if equality_ok { "holds" } else { "VIOLATED" },
            round_trip
                .iter()
                .map(|(t, h)| format!("{t} {h}/1000"))
                .collect::<Vec<_>>()
                .join(" ")
        ),
    )
}

fn main() {
    let start = Instant::now();
    let first = run_verify(1);
    let elapsed = start.elapsed().as_secs_f64();
    let report: Value = serde_json::from_slice(&first).expect("verify prints JSON");
    let checks = Checks(report["checks"].as_array().expect("checks array"));

    let mut results = vec![
        criterion_1(&checks),
        criterion_2(&checks, &report),
        criterion_3(&checks),
        criterion_4(&checks),
        criterion_5(),
        criterion_6(&checks, &report),
        criterion_7(),
        criterion_8(),
    ];
    let second = run_verify(1);
    let four = run_verify(4);
    results.push(outcome(
        first == second && first == four,
        format!(
            "verify --suite all --samples {SAMPLES} --seed {SEED}: {} bytes, repeat {}, 4 workers {} ({elapsed:.1} s per run)",
            first.len(),
            if first == second { "identical" } else { "DIFFERS" },
            if first == four { "identical" } else { "DIFFERS" },
        ),
    ));

    for (k, o) in results.iter().enumerate() {
        println!(
            "criterion {}: {} | {}",
            k + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    let failed: Vec<usize> = results
        .iter()
        .enumerate()
        .filter(|(_, o)| !o.pass)
        .map(|(k, _)| k + 1)
        .collect();
    if failed.is_empty() {
        println!("acceptance: all 9 criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
