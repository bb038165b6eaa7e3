//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero when any
//! criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use hardy_cert::constants::{
    characterize_main, characterize_monotone, discrete_characterization, discrete_hardy_constant,
    embedding_constant, CaseTag, ConstantsSettings, SeqWeights,
};
use hardy_cert::discretize::build_discretizing_sequence;
use hardy_cert::oracle::{maximize_discrete_embedding, maximize_discrete_hardy, maximize_ratio_main, maximize_ratio_monotone};
use hardy_cert::report::{lemma_checks, run_certification, Format, Mode, RunConfig, Verdict};
use hardy_cert::ProblemSpec;

use common::power_suite;

const SEED: u64 = 42;
const CELLS: usize = 4096;
const CELLS_COARSE: usize = 2048;
const RESTARTS: usize = 32;

const TRIVIAL_TOL: f64 = 1e-6;
const TRIVIAL_SECONDS: f64 = 30.0;
const BAND: f64 = 100.0;
const DRIFT: f64 = 0.2;
const SUITE_SECONDS: f64 = 600.0;
const BETA_BAND: f64 = 50.0;
const EMBEDDING_TOL: f64 = 1e-3;
const HARDY_BAND: f64 = 8.0;
const RANDOM_INSTANCES: usize = 50;
const MAX_LEN: usize = 6;
const HOMOGENEITY_TOL: f64 = 1e-8;
const MONOTONE_AGREEMENT: f64 = 0.05;
const LEMMA_TRIALS: usize = 100;

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

fn within(a: f64, b: f64, factor: f64) -> bool {
    a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0 && a <= factor * b && b <= factor * a
}

fn settings() -> ConstantsSettings {
    ConstantsSettings::default()
}

fn trivial_sandwich() -> Outcome {
    let start = Instant::now();
    let spec = ProblemSpec::unit(1.0, 1.0, 1.0, 0.0).unwrap();
    let c = characterize_main(&spec, &settings()).unwrap();
    let c1 = c.value;
    let o = maximize_ratio_main(&spec, CELLS, RESTARTS, SEED).unwrap().estimate;
    let secs = start.elapsed().as_secs_f64();
    let pass = (c1 - 0.5).abs() <= TRIVIAL_TOL && within(c1, o, BAND) && secs < TRIVIAL_SECONDS;
    outcome(pass, format!("C1 = {c1:.9}, O = {o:.9}, {secs:.1} s"))
}

fn power_weight_suite() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut regimes = std::collections::BTreeSet::new();
    let mut worst_ratio: f64 = 1.0;
    let mut worst_drift: f64 = 0.0;
    for s in power_suite(0.0) {
        let k = characterize_main(&s.spec, &settings()).unwrap();
        regimes.insert(format!("{:?}", k.regime));
        let coarse = maximize_ratio_main(&s.spec, CELLS_COARSE, RESTARTS, SEED).unwrap().estimate;
        let fine = maximize_ratio_main(&s.spec, CELLS, RESTARTS, SEED).unwrap().estimate;
        let drift = ((fine / k.value) / (coarse / k.value) - 1.0).abs();
        let ratio = fine / k.value;
        worst_ratio = if (ratio.ln()).abs() > worst_ratio.ln().abs() { ratio } else { worst_ratio };
        worst_drift = worst_drift.max(drift);
        if !within(k.value, fine, BAND) || !(drift < DRIFT) {
            failures.push(format!("{}: K = {:.4e}, O = {fine:.4e}, drift {drift:.3}", s.label, k.value));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = failures.is_empty() && regimes.len() == 4 && secs < SUITE_SECONDS;
    outcome(
        pass,
        format!(
            "12 specs, {} regimes, worst O/K = {worst_ratio:.3}, worst drift = {worst_drift:.2e}, {secs:.1} s{}",
            regimes.len(),
            failures.iter().map(|f| format!("; {f}")).collect::<String>()
        ),
    )
}

fn beta_robustness() -> Outcome {
    let mut failures = Vec::new();
    let mut worst: f64 = 1.0;
    for (a, b) in power_suite(0.0).into_iter().zip(power_suite(0.5)) {
        let ka = characterize_main(&a.spec, &settings()).unwrap().value;
        let kb = characterize_main(&b.spec, &settings()).unwrap().value;
        let ok = if ka.is_finite() != kb.is_finite() {
            false
        } else if !ka.is_finite() {
            true
        } else {
            let r = ka / kb;
            if r.ln().abs() > worst.ln().abs() {
                worst = r;
            }
            within(ka, kb, BETA_BAND)
        };
        if !ok {
            failures.push(format!("{}: {ka:.4e} vs {kb:.4e}", a.label));
        }
    }
    outcome(
        failures.is_empty(),
        format!("worst K(0)/K(1/2) = {worst:.3}{}", failures.iter().map(|f| format!("; {f}")).collect::<String>()),
    )
}

fn random_weights(rng: &mut Xoshiro256PlusPlus) -> SeqWeights {
    let len = 1 + (rng.random::<f64>() * MAX_LEN as f64) as usize;
    let mut draw = || (rng.random::<f64>() * 2.0 - 1.0).mul_add(10f64.ln(), 0.0).exp();
    let a: Vec<f64> = (0..len).map(|_| draw()).collect();
    let b: Vec<f64> = (0..len).map(|_| draw()).collect();
    SeqWeights::new(0, a, b).unwrap()
}

fn embedding_exactness() -> Outcome {
    let pairs = [(1.0, 2.0), (2.0, 1.0), (2.0, 3.0), (3.0, 2.0)];
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for i in 0..RANDOM_INSTANCES {
        let (p, q) = pairs[i % pairs.len()];
        let sw = random_weights(&mut rng);
        let l = embedding_constant(&sw, p, q).unwrap().value;
        let o = maximize_discrete_embedding(&sw, p, q, RESTARTS, SEED + i as u64).unwrap().estimate;
        let err = (o - l).abs() / l;
        worst = worst.max(err);
        if !(err <= EMBEDDING_TOL) {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("{RANDOM_INSTANCES} instances, worst relative error {worst:.2e}, {failures} failures"))
}

fn hardy_sandwich() -> Outcome {
    let pairs = [(1.0, 2.0), (1.0, 0.5), (2.0, 1.0), (2.0, 3.0)];
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(SEED + 1);
    let mut regimes = std::collections::BTreeSet::new();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    let mut failures = 0;
    for i in 0..RANDOM_INSTANCES {
        let (p, q) = pairs[i % pairs.len()];
        regimes.insert(format!("{:?}", CaseTag::discrete_hardy(p, q)));
        let sw = random_weights(&mut rng);
        let h = discrete_hardy_constant(&sw, p, q).unwrap().value;
        let o = maximize_discrete_hardy(&sw, p, q, RESTARTS, SEED + i as u64).unwrap().estimate;
        let r = o / h;
        lo = lo.min(r);
        hi = hi.max(r);
        if !within(o, h, HARDY_BAND) {
            failures += 1;
        }
    }
    outcome(
        failures == 0 && regimes.len() == 4,
        format!("{RANDOM_INSTANCES} instances, {} regimes, O/H in [{lo:.3}, {hi:.3}], {failures} failures", regimes.len()),
    )
}

fn discrete_continuous() -> Outcome {
    let mut failures = Vec::new();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for s in power_suite(0.0) {
        let k = characterize_main(&s.spec, &settings()).unwrap().value;
        let w = &s.spec.weights.w;
        let seq = build_discretizing_sequence(w, &s.spec.interval, s.spec.k_max, &s.spec.quad).unwrap();
        let d = discrete_characterization(&s.spec, &seq, &settings()).unwrap().value;
        let r = d / k;
        lo = lo.min(r);
        hi = hi.max(r);
        if !within(d, k, BAND) {
            failures.push(format!("{}: A+B = {d:.4e}, K = {k:.4e}", s.label));
        }
    }
    outcome(
        failures.is_empty(),
        format!("(A+B)/K in [{lo:.3}, {hi:.3}]{}", failures.iter().map(|f| format!("; {f}")).collect::<String>()),
    )
}

fn homogeneity() -> Outcome {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(SEED + 2);
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    let mut checked = 0;
    for s in power_suite(0.0) {
        let base = characterize_main(&s.spec, &settings()).unwrap();
        let e = s.spec.exponents;
        for which in 0..3 {
            let lambda = 10f64.powf(rng.random::<f64>() * 6.0 - 3.0);
            let mut scaled = s.spec.clone();
            let expected = match which {
                0 => {
                    scaled.weights.w = scaled.weights.w.scaled(lambda);
                    lambda.powf(1.0 / e.r)
                }
                1 => {
                    scaled.weights.u = scaled.weights.u.scaled(lambda);
                    lambda.powf(1.0 / e.q)
                }
                _ => {
                    scaled.weights.v = scaled.weights.v.scaled(lambda);
                    lambda.powf(-1.0 / e.p)
                }
            };
            let got = characterize_main(&scaled, &settings()).unwrap();
            let mut pairs = vec![(base.value, got.value)];
            pairs.extend(base.constants.iter().zip(&got.constants).map(|(a, b)| (a.value, b.value)));
            for (a, b) in pairs {
                if !a.is_finite() {
                    if b.is_finite() {
                        failures.push(format!("{}: finiteness changed", s.label));
                    }
                    continue;
                }
                checked += 1;
                let err = (b / (a * expected) - 1.0).abs();
                worst = worst.max(err);
                if !(err <= HOMOGENEITY_TOL) {
                    failures.push(format!("{} weight {which}: relative error {err:.2e}", s.label));
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("{checked} scaled constants, worst relative error {worst:.2e}{}", failures.iter().map(|f| format!("; {f}")).collect::<String>()),
    )
}

fn monotone_reduction() -> Outcome {
    let suite = power_suite(0.0);
    let mut failures = Vec::new();
    let mut worst_gap: f64 = 0.0;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for i in [0, 1, 2, 6, 7, 11] {
        let s = &suite[i];
        let k = characterize_monotone(&s.spec, &settings()).unwrap().value;
        match maximize_ratio_monotone(&s.spec, CELLS, RESTARTS, SEED) {
            Ok(o) => {
                let alt = o.alternative.unwrap_or(f64::NAN);
                let gap = (o.estimate - alt).abs() / o.estimate;
                worst_gap = worst_gap.max(gap);
                let r = o.estimate / k;
                lo = lo.min(r);
                hi = hi.max(r);
                if !(gap <= MONOTONE_AGREEMENT) || !within(k, o.estimate, BAND) {
                    failures.push(format!("{}: K = {k:.4e}, O = {:.4e}, alternative {alt:.4e}", s.label, o.estimate));
                }
            }
            Err(e) => failures.push(format!("{}: {e}", s.label)),
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "6 specs, worst parametrization gap {worst_gap:.2e}, O/K in [{lo:.3}, {hi:.3}]{}",
            failures.iter().map(|f| format!("; {f}")).collect::<String>()
        ),
    )
}

fn lemma_suite() -> Outcome {
    let spec = ProblemSpec::unit(1.0, 1.0, 1.0, 0.0).unwrap();
    let trials = lemma_checks(&spec, LEMMA_TRIALS, SEED).unwrap();
    let assertions: usize = trials.iter().map(|t| t.report.entries.len()).sum();
    let failed: Vec<String> = trials
        .iter()
        .flat_map(|t| {
            t.report
                .entries
                .iter()
                .filter(|e| !e.holds)
                .map(move |e| format!("trial {} {} {}: {:.4}", t.trial, t.kind, e.name, e.ratio))
        })
        .collect();
    outcome(
        failed.is_empty(),
        format!(
            "{LEMMA_TRIALS} randomized inputs, {assertions} two-sided assertions, {} violations{}",
            failed.len(),
            failed.iter().take(5).map(|f| format!("; {f}")).collect::<String>()
        ),
    )
}

fn suite_reports() -> Vec<u8> {
    let mut out = Vec::new();
    for s in power_suite(0.0) {
        for mode in [Mode::Main, Mode::Monotone] {
            let cfg = RunConfig::for_problem(mode, s.spec.clone(), vec![0.0, 0.5]).unwrap();
            match run_certification(&cfg) {
                Ok(r) => out.extend(r.emit(Format::Json).unwrap()),
                Err(e) => out.extend(format!("{e}\n").into_bytes()),
            }
        }
    }
    out
}

fn determinism() -> Outcome {
    let a = suite_reports();
    let b = suite_reports();
    let verdicts = String::from_utf8_lossy(&a).matches(&format!("\"{}\"", Verdict::Consistent.label())).count();
    outcome(a == b, format!("24 reports, {} bytes, {verdicts} consistent", a.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("trivial-spec sandwich", trivial_sandwich),
        ("power-weight suite", power_weight_suite),
        ("beta robustness", beta_robustness),
        ("embedding constant exactness", embedding_exactness),
        ("discrete Hardy sandwich", hardy_sandwich),
        ("discrete and continuous agreement", discrete_continuous),
        ("homogeneity", homogeneity),
        ("monotone reduction", monotone_reduction),
        ("lemma checks", lemma_suite),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!("{} {:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
