//! Certification runs: configuration, orchestration, verdicts and output.

pub mod config;
pub mod emit;
pub mod lemmas;

use std::time::Instant;

use serde::Serialize;

pub use config::{parse_config, parse_config_str, Format, Mode, OracleConfig, OutputConfig, RunConfig};
pub use emit::{canonical_json, format_float, markdown};
pub use lemmas::{lemma_checks, LemmaTrial};

use crate::constants::{
    characterize_main, characterize_monotone, discrete_characterization, discrete_hardy_constant,
    embedding_constant, CaseTag, ConstantReport, ConstantsSettings, DiscreteConstant, DiscreteReport,
};
use crate::discretize::{build_discretizing_sequence, check_w_hypothesis};
use crate::error::{Error, Result};
use crate::oracle::{
    maximize_discrete_embedding, maximize_discrete_hardy, maximize_ratio_main, maximize_ratio_monotone,
    OracleResult,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Consistent,
    Inconsistent,
    Degenerate,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Consistent => "CONSISTENT",
            Verdict::Inconsistent => "INCONSISTENT",
            Verdict::Degenerate => "DEGENERATE",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Consistent => 0,
            Verdict::Inconsistent => 2,
            Verdict::Degenerate => 3,
        }
    }
}

/// Exit code for configuration errors.
pub const EXIT_CONFIG: i32 = 4;
/// Exit code for failures during a run.
pub const EXIT_NUMERICAL: i32 = 5;

/// Exit code of an error raised before or during a run.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::Schema { .. } | Error::Range(_) | Error::Io(_) => EXIT_CONFIG,
        _ => EXIT_NUMERICAL,
    }
}

/// Both ratios of a constant and an oracle estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sandwich {
    pub label: String,
    #[serde(with = "crate::serde_util::ext_real")]
    pub constant: f64,
    #[serde(with = "crate::serde_util::ext_real")]
    pub oracle: f64,
    #[serde(with = "crate::serde_util::ext_real")]
    pub constant_over_oracle: f64,
    #[serde(with = "crate::serde_util::ext_real")]
    pub oracle_over_constant: f64,
    pub in_band: bool,
}

fn ratio(a: f64, b: f64) -> f64 {
    if a == b {
        1.0
    } else if b == 0.0 {
        f64::INFINITY
    } else {
        a / b
    }
}

impl Sandwich {
    pub fn new(label: impl Into<String>, constant: f64, oracle: f64, band: (f64, f64)) -> Self {
        let co = ratio(constant, oracle);
        let oc = ratio(oracle, constant);
        let inside = |x: f64| x >= band.0 && x <= band.1;
        Sandwich {
            label: label.into(),
            constant,
            oracle,
            constant_over_oracle: co,
            oracle_over_constant: oc,
            in_band: inside(co) && inside(oc),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteAtBeta {
    #[serde(with = "crate::serde_util::ext_real")]
    pub beta: f64,
    pub report: DiscreteReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertReport {
    pub schema: u64,
    pub config: RunConfig,
    pub mode: Mode,
    pub regime: Option<CaseTag>,
    pub band: (f64, f64),
    /// Continuous constants, one report per β.
    pub constants: Vec<ConstantReport>,
    /// Discrete characterization, one report per β.
    pub discrete: Vec<DiscreteAtBeta>,
    /// `L_i` or `H_i` of the sequence modes.
    pub sequence_constant: Option<DiscreteConstant>,
    pub oracle: Option<OracleResult>,
    pub sandwich: Vec<Sandwich>,
    pub lemmas: Vec<LemmaTrial>,
    pub truncation: Vec<String>,
    pub verdict: Verdict,
    pub reasons: Vec<String>,
    /// Wall-clock seconds; kept out of the serialized report so that
    /// identical runs produce identical bytes.
    #[serde(skip)]
    pub wall_clock: f64,
}

impl CertReport {
    fn new(cfg: &RunConfig) -> CertReport {
        CertReport {
            schema: config::SCHEMA_VERSION,
            config: cfg.clone(),
            mode: cfg.mode,
            regime: None,
            band: cfg.band,
            constants: Vec::new(),
            discrete: Vec::new(),
            sequence_constant: None,
            oracle: None,
            sandwich: Vec::new(),
            lemmas: Vec::new(),
            truncation: Vec::new(),
            verdict: Verdict::Consistent,
            reasons: Vec::new(),
            wall_clock: 0.0,
        }
    }

    fn degenerate(mut self, reason: String) -> CertReport {
        self.verdict = Verdict::Degenerate;
        self.reasons.push(reason);
        self
    }

    fn settle(&mut self) {
        if self.verdict == Verdict::Degenerate {
            return;
        }
        let bad: Vec<String> = self.sandwich.iter().filter(|s| !s.in_band).map(|s| s.label.clone()).collect();
        let failed_lemmas = self.lemmas.iter().filter(|t| !t.report.all_hold()).count();
        if bad.is_empty() && failed_lemmas == 0 {
            self.verdict = Verdict::Consistent;
        } else {
            self.verdict = Verdict::Inconsistent;
            for b in bad {
                self.reasons.push(format!("{b} lies outside the band"));
            }
            if failed_lemmas > 0 {
                self.reasons.push(format!("{failed_lemmas} lemma trials violate their bounds"));
            }
        }
    }

    /// Serialized report in the requested format.
    pub fn emit(&self, format: Format) -> Result<Vec<u8>> {
        Ok(match format {
            Format::Json => canonical_json(self)?.into_bytes(),
            Format::Markdown => markdown(self).into_bytes(),
        })
    }
}

/// Errors that are hypothesis violations rather than failures.
fn degenerate_reason(e: &Error) -> Option<String> {
    match e {
        Error::TrivialRegime { .. } | Error::DegenerateW(_) => Some(e.to_string()),
        _ => None,
    }
}

fn beta_label(b: f64) -> String {
    format_float(b)
}

/// Runs the configured certification.
pub fn run_certification(cfg: &RunConfig) -> Result<CertReport> {
    let start = Instant::now();
    let mut report = CertReport::new(cfg);
    let result = match cfg.mode {
        Mode::Main | Mode::Monotone => run_continuous(cfg, report.clone()),
        Mode::DiscreteEmbedding | Mode::DiscreteHardy => run_sequence(cfg, report.clone()),
        Mode::LemmaChecks => {
            let spec = cfg.problem_or_unit()?;
            report.lemmas = lemma_checks(&spec, cfg.lemma_trials, cfg.oracle.seed)?;
            report.settle();
            Ok(report)
        }
    };
    result.map(|mut r| {
        r.wall_clock = start.elapsed().as_secs_f64();
        r
    })
}

fn run_continuous(cfg: &RunConfig, mut report: CertReport) -> Result<CertReport> {
    let spec = cfg.problem_or_unit()?;
    let e = spec.exponents;
    let main = cfg.mode == Mode::Main;
    report.regime = Some(if main { CaseTag::main(e.p, e.q, e.r) } else { CaseTag::monotone(e.p, e.q) });
    if main {
        if let Err(err) = e.require_main() {
            return Ok(report.degenerate(format!("{err}: only trivial functions satisfy the inequality")));
        }
    }
    if let Err(err) = check_w_hypothesis(&spec.weights.w, &spec.interval, &spec.quad) {
        return match degenerate_reason(&err) {
            Some(r) => Ok(report.degenerate(r)),
            None => Err(err),
        };
    }
    let settings = ConstantsSettings::default();
    let o = cfg.oracle;
    let (constants, oracle) = rayon::join(
        || -> Result<Vec<ConstantReport>> {
            cfg.beta_list
                .iter()
                .map(|&b| {
                    let s = spec.with_beta(b)?;
                    if main {
                        characterize_main(&s, &settings)
                    } else {
                        characterize_monotone(&s, &settings)
                    }
                })
                .collect()
        },
        || {
            if main {
                maximize_ratio_main(&spec, o.n_cells, o.restarts, o.seed)
            } else {
                maximize_ratio_monotone(&spec, o.n_cells, o.restarts, o.seed)
            }
        },
    );
    let constants = match constants {
        Ok(c) => c,
        Err(err) => {
            return match degenerate_reason(&err) {
                Some(r) => Ok(report.degenerate(r)),
                None => Err(err),
            }
        }
    };
    let oracle = oracle?;
    if main {
        let seq = build_discretizing_sequence(&spec.weights.w, &spec.interval, spec.k_max, &spec.quad)?;
        report.truncation.extend(seq.truncation.iter().cloned());
        for &b in &cfg.beta_list {
            let d = discrete_characterization(&spec.with_beta(b)?, &seq, &settings)?;
            report.discrete.push(DiscreteAtBeta { beta: b, report: d });
        }
    }
    for c in &constants {
        report.truncation.extend(c.notes.iter().cloned());
    }
    report.truncation.extend(oracle.notes.iter().cloned());
    report.truncation.sort();
    report.truncation.dedup();

    if spec.weights.u.is_zero() {
        report.constants = constants;
        report.oracle = Some(oracle);
        return Ok(report.degenerate("u vanishes identically: constants and oracle are zero".into()));
    }
    let name = if main { "C" } else { "calC" };
    for c in &constants {
        report.sandwich.push(Sandwich::new(
            format!("{name}(beta={}) vs oracle", beta_label(c.beta)),
            c.value,
            oracle.estimate,
            cfg.band,
        ));
    }
    for d in &report.discrete {
        report.sandwich.push(Sandwich::new(
            format!("A+B(beta={}) vs oracle", beta_label(d.beta)),
            d.report.value,
            oracle.estimate,
            cfg.band,
        ));
    }
    report.constants = constants;
    report.oracle = Some(oracle);
    report.settle();
    Ok(report)
}

fn run_sequence(cfg: &RunConfig, mut report: CertReport) -> Result<CertReport> {
    let sw = cfg
        .sequence
        .as_ref()
        .ok_or_else(|| Error::Schema { key: "sequence".into(), message: "missing required key".into() })?;
    let (p, q) = (cfg.exponents.p, cfg.exponents.q);
    let o = cfg.oracle;
    let (constant, oracle) = if cfg.mode == Mode::DiscreteEmbedding {
        (embedding_constant(sw, p, q)?, maximize_discrete_embedding(sw, p, q, o.restarts, o.seed)?)
    } else {
        report.regime = Some(CaseTag::discrete_hardy(p, q));
        (discrete_hardy_constant(sw, p, q)?, maximize_discrete_hardy(sw, p, q, o.restarts, o.seed)?)
    };
    if constant.value == 0.0 && oracle.estimate == 0.0 {
        report.sequence_constant = Some(constant);
        report.oracle = Some(oracle);
        return Ok(report.degenerate("the weights annihilate every sequence".into()));
    }
    report
        .sandwich
        .push(Sandwich::new(format!("{:?} vs oracle", constant.name), constant.value, oracle.estimate, cfg.band));
    report.sequence_constant = Some(constant);
    report.oracle = Some(oracle);
    report.settle();
    Ok(report)
}

/// Structured error document written in place of a report.
pub fn error_document(e: &Error) -> String {
    #[derive(Serialize)]
    struct Doc {
        schema: u64,
        error: Inner,
    }
    #[derive(Serialize)]
    struct Inner {
        kind: String,
        message: String,
        exit_code: i32,
    }
    let kind = format!("{e:?}");
    let kind = kind.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string();
    canonical_json(&Doc {
        schema: config::SCHEMA_VERSION,
        error: Inner {
            kind,
            message: e.to_string(),
            exit_code: error_exit_code(e),
        },
    })
    .unwrap_or_else(|_| format!("{e}\n"))
}
