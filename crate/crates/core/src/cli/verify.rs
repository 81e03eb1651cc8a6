use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};
use std::io::Write;

use clap::ValueEnum;
use serde::Serialize;

use super::{emit, CliError, CliResult, VerifyArgs, EXIT_CHECK_FAILED, EXIT_OK};
use crate::channel::TransitionAmplitude;
use crate::classes::named_four_qubit_state;
use crate::entanglement::{state_with_concurrence, CanonicalState};
use crate::fidelity::{
    avg_fidelity_2q_fixed_concurrence, avg_fidelity_3q_fixed_invariants, avg_fidelity_haar_closed,
    four_qubit_avg_fidelity, variants, ClassTag, SingleQubitAvgFidelity,
};
use crate::io::to_json;
use crate::montecarlo::{
    derive_seed, mc_class_residual, mc_fidelity_haar, mc_fidelity_local_unitary_orbit, mc_invariant_averages,
    with_workers, Estimate,
};
use crate::Result;

/// Largest accepted distance between estimate and closed form, in standard errors.
pub const PASS_SIGMA: f64 = 4.0;

pub const MIN_SAMPLES: usize = 100;

/// Class members drawn per class in the three-qubit suite.
pub const CLASS_MEMBERS: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    #[value(name = "two_qubit")]
    TwoQubit,
    #[value(name = "three_qubit")]
    ThreeQubit,
    #[value(name = "four_qubit")]
    FourQubit,
    #[value(name = "haar")]
    Haar,
    #[value(name = "invariants")]
    Invariants,
    #[value(name = "all")]
    All,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub closed_form: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub sigma_distance: f64,
    pub pass: bool,
}

impl Check {
    fn against(name: String, closed_form: f64, e: &Estimate) -> Self {
        let sigma_distance = e.sigma_distance(closed_form);
        Self {
            name,
            closed_form,
            estimate: e.mean,
            std_error: e.std_error,
            sigma_distance,
            pass: sigma_distance <= PASS_SIGMA,
        }
    }

    fn between(name: String, a: &Estimate, b: &Estimate) -> Self {
        let sigma_distance = a.sigma_distance_to(b);
        Self {
            name,
            closed_form: b.mean,
            estimate: a.mean,
            std_error: (a.std_error.powi(2) + b.std_error.powi(2)).sqrt(),
            sigma_distance,
            pass: sigma_distance <= PASS_SIGMA,
        }
    }
}

/// One candidate formula for a quantity whose printed form is ambiguous.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Candidate {
    pub form: String,
    pub max_sigma_distance: f64,
    pub consistent: bool,
}

/// Which of several readings of a formula the estimates support.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Reading {
    pub topic: String,
    pub candidates: Vec<Candidate>,
    pub statement: String,
}

impl Reading {
    fn new(topic: &str, candidates: Vec<Candidate>) -> Self {
        let ok: Vec<&str> = candidates
            .iter()
            .filter(|c| c.consistent)
            .map(|c| c.form.as_str())
            .collect();
        let bad: Vec<&str> = candidates
            .iter()
            .filter(|c| !c.consistent)
            .map(|c| c.form.as_str())
            .collect();
        let statement = match (ok.is_empty(), bad.is_empty()) {
            (false, false) => format!(
                "Monte Carlo matches {} and rejects {}",
                ok.join(" and "),
                bad.join(" and ")
            ),
            (false, true) => format!("Monte Carlo matches every candidate: {}", ok.join(", ")),
            (true, _) => format!("Monte Carlo matches no candidate: {}", bad.join(", ")),
        };
        Self {
            topic: topic.to_owned(),
            candidates,
            statement,
        }
    }
}

fn candidate(form: &str, pairs: &[(f64, Estimate)]) -> Candidate {
    let max = pairs
        .iter()
        .map(|(closed, e)| e.sigma_distance(*closed))
        .fold(0.0, f64::max);
    Candidate {
        form: form.to_owned(),
        max_sigma_distance: max,
        consistent: max <= PASS_SIGMA,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub samples: usize,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub readings: Vec<Reading>,
    pub all_pass: bool,
}

#[derive(Default)]
struct Collector {
    checks: Vec<Check>,
    readings: Vec<Reading>,
}

fn amp(m: f64, phase: f64) -> Result<TransitionAmplitude> {
    TransitionAmplitude::new(m, phase)
}

fn phase_label(phase: f64) -> &'static str {
    if phase == 0.0 {
        "0"
    } else {
        "pi/2"
    }
}

fn haar_suite(out: &mut Collector, samples: usize, seed: u64) -> Result<()> {
    for n in 1..=4 {
        for m in [0.0, 0.3, 0.7, 1.0] {
            for phase in [0.0, FRAC_PI_2] {
                let name = format!("haar n={n} |f|={m} phase={}", phase_label(phase));
                let f = amp(m, phase)?;
                let e = mc_fidelity_haar(n, f, samples, derive_seed(seed, &name))?;
                out.checks
                    .push(Check::against(name, avg_fidelity_haar_closed(n, f)?, &e));
            }
        }
    }
    Ok(())
}

fn two_qubit_suite(out: &mut Collector, samples: usize, seed: u64) -> Result<()> {
    let mut minus = Vec::new();
    let mut plus = Vec::new();
    for c in [0.0, 0.5, 1.0] {
        let psi = state_with_concurrence(c)?;
        for m in [0.3, 0.6, 0.9] {
            let name = format!("two_qubit C={c} |f|={m} phase=0");
            let f = amp(m, 0.0)?;
            let e = mc_fidelity_local_unitary_orbit(&psi, f, samples, derive_seed(seed, &name))?;
            let f1 = SingleQubitAvgFidelity::from_amplitude(f)?;
            out.checks
                .push(Check::against(name, avg_fidelity_2q_fixed_concurrence(f1, c)?, &e));
            minus.push((variants::two_qubit_minus_sign(m, c), e));
            plus.push((variants::two_qubit_plus_sign(m, c), e));
        }
    }
    let name = "two_qubit C=1 |f|=0.7 phase=pi/2".to_owned();
    let f = amp(0.7, FRAC_PI_2)?;
    let e = mc_fidelity_local_unitary_orbit(&state_with_concurrence(1.0)?, f, samples, derive_seed(seed, &name))?;
    let f1 = SingleQubitAvgFidelity::from_amplitude(f)?;
    out.checks
        .push(Check::against(name, avg_fidelity_2q_fixed_concurrence(f1, 1.0)?, &e));

    out.readings.push(Reading::new(
        "two-qubit concurrence term at phase 0",
        vec![
            candidate("(3 - |f|^2 - 2|f|)", &minus),
            candidate("(3 - |f|^2 + 2|f|)", &plus),
        ],
    ));
    Ok(())
}

fn named_three_qubit_states() -> Result<Vec<(&'static str, CanonicalState)>> {
    let t = 1.0 / 3f64.sqrt();
    Ok(vec![
        (
            "GHZ3",
            CanonicalState::new([FRAC_1_SQRT_2, 0.0, 0.0, 0.0, FRAC_1_SQRT_2], 0.0)?,
        ),
        ("W3", CanonicalState::new([t, 0.0, t, t, 0.0], 0.0)?),
        ("c4a-example", CanonicalState::new([0.5, 0.5, 0.5, 0.5, 0.0], 0.0)?),
    ])
}

fn three_qubit_suite(out: &mut Collector, samples: usize, seed: u64) -> Result<()> {
    for (label, c) in named_three_qubit_states()? {
        let psi = c.to_state();
        for m in [0.5, 0.8] {
            let name = format!("three_qubit {label} |f|={m}");
            let f = amp(m, 0.0)?;
            let e = mc_fidelity_local_unitary_orbit(&psi, f, samples, derive_seed(seed, &name))?;
            let f1 = SingleQubitAvgFidelity::from_amplitude(f)?;
            out.checks.push(Check::against(
                name,
                avg_fidelity_3q_fixed_invariants(f1, &c.invariants())?,
                &e,
            ));
        }
    }
    let per_state = samples.div_ceil(CLASS_MEMBERS);
    for tag in ClassTag::THREE_QUBIT {
        for m in [0.5, 0.8] {
            let name = format!("class {tag} residual |f|={m}");
            let f = amp(m, 0.0)?;
            let e = mc_class_residual(tag, f, CLASS_MEMBERS, per_state, derive_seed(seed, &name))?;
            out.checks.push(Check::against(name, 0.0, &e));
        }
    }
    Ok(())
}

fn four_qubit_suite(out: &mut Collector, samples: usize, seed: u64) -> Result<()> {
    let mut used = Vec::new();
    let mut extra_f1 = Vec::new();
    for m in [0.5, 0.8] {
        let f = amp(m, 0.0)?;
        let f1 = SingleQubitAvgFidelity::from_amplitude(f)?;
        let mut est = std::collections::BTreeMap::new();
        for tag in ClassTag::FOUR_QUBIT {
            let name = format!("four_qubit {tag} |f|={m}");
            let psi = named_four_qubit_state(tag)?;
            let e = mc_fidelity_local_unitary_orbit(&psi, f, samples, derive_seed(seed, &name))?;
            out.checks
                .push(Check::against(name, four_qubit_avg_fidelity(tag, f1)?, &e));
            if matches!(tag, ClassTag::Ghz4 | ClassTag::B2) {
                used.push((four_qubit_avg_fidelity(tag, f1)?, e));
                extra_f1.push((variants::four_qubit_with_r4a(tag, f1)?, e));
            }
            est.insert(tag, e);
        }
        for (a, b) in [(ClassTag::Ghz4, ClassTag::B2), (ClassTag::Cl4, ClassTag::X4)] {
            out.checks.push(Check::between(
                format!("four_qubit {a} vs {b} |f|={m}"),
                &est[&a],
                &est[&b],
            ));
        }
    }
    out.readings.push(Reading::new(
        "GHZ4 and B2 reduction term",
        vec![
            candidate("F1^4 - 2 R2 (1 - 3 F1 + 4 F1^2)", &used),
            candidate("F1^4 - 2 F1 R2 (1 - 3 F1 + 4 F1^2)", &extra_f1),
        ],
    ));
    Ok(())
}

fn invariants_suite(out: &mut Collector, samples: usize, seed: u64) -> Result<()> {
    let avg = mc_invariant_averages(samples, derive_seed(seed, "invariants"))?;
    for (i, e) in avg.j.iter().enumerate() {
        let target = if i == 3 { 1.0 / 12.0 } else { 1.0 / 24.0 };
        out.checks
            .push(Check::against(format!("invariants <J{}>", i + 1), target, e));
    }
    out.checks.push(Check::against(
        "invariants two-qubit <C^2>".into(),
        0.4,
        &avg.concurrence_sq_2q,
    ));
    Ok(())
}

/// Runs a suite. The report depends only on `(suite, samples, seed)`.
pub fn run_verify(suite: Suite, samples: usize, seed: u64) -> CliResult<VerifyReport> {
    if samples < MIN_SAMPLES {
        return Err(CliError::usage(format!("--samples must be at least {MIN_SAMPLES}")));
    }
    let mut out = Collector::default();
    let all = suite == Suite::All;
    if all || suite == Suite::Haar {
        haar_suite(&mut out, samples, seed)?;
    }
    if all || suite == Suite::TwoQubit {
        two_qubit_suite(&mut out, samples, seed)?;
    }
    if all || suite == Suite::ThreeQubit {
        three_qubit_suite(&mut out, samples, seed)?;
    }
    if all || suite == Suite::FourQubit {
        four_qubit_suite(&mut out, samples, seed)?;
    }
    if all || suite == Suite::Invariants {
        invariants_suite(&mut out, samples, seed)?;
    }
    let all_pass = out.checks.iter().all(|c| c.pass);
    Ok(VerifyReport {
        suite,
        samples,
        seed,
        checks: out.checks,
        readings: out.readings,
        all_pass,
    })
}

pub(super) fn command(args: VerifyArgs, stdout: &mut dyn Write) -> CliResult<i32> {
    let workers = args
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if workers == 0 {
        return Err(CliError::usage("--workers must be at least 1"));
    }
    let report = with_workers(workers, || run_verify(args.suite, args.samples, args.seed))??;
    emit(args.out.as_deref(), &to_json(&report)?, stdout)?;
    Ok(if report.all_pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}
