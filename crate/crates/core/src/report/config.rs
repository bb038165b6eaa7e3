//! Run configuration: JSON ingestion with key-level validation.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::constants::SeqWeights;
use crate::error::{Error, Result};
use crate::measure::{IntervalSpec, QuadSettings, WeightExpr};
use crate::problem::{ExponentSet, ProblemSpec, Weights, DEFAULT_K_MAX};

pub const SCHEMA_VERSION: u64 = 1;
pub const DEFAULT_BAND: (f64, f64) = (0.01, 100.0);
pub const DEFAULT_LEMMA_TRIALS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Main,
    Monotone,
    DiscreteEmbedding,
    DiscreteHardy,
    LemmaChecks,
}

impl Mode {
    pub fn label(self) -> &'static str {
        match self {
            Mode::Main => "main",
            Mode::Monotone => "monotone",
            Mode::DiscreteEmbedding => "discrete-embedding",
            Mode::DiscreteHardy => "discrete-hardy",
            Mode::LemmaChecks => "lemma-checks",
        }
    }

    fn is_discrete(self) -> bool {
        matches!(self, Mode::DiscreteEmbedding | Mode::DiscreteHardy)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Mode> {
        [
            Mode::Main,
            Mode::Monotone,
            Mode::DiscreteEmbedding,
            Mode::DiscreteHardy,
            Mode::LemmaChecks,
        ]
        .into_iter()
        .find(|m| m.label() == s)
        .ok_or_else(|| Error::Schema {
            key: "mode".into(),
            message: format!("unknown mode `{s}`"),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Markdown,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Format> {
        match s {
            "json" => Ok(Format::Json),
            "markdown" | "md" => Ok(Format::Markdown),
            other => Err(Error::Schema {
                key: "output.format".into(),
                message: format!("unknown format `{other}`"),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleConfig {
    pub n_cells: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            n_cells: 4096,
            restarts: 32,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub schema: u64,
    pub mode: Mode,
    /// Continuous problem; absent for the discrete modes.
    pub problem: Option<ProblemSpec>,
    /// Exponents; `beta` is the first entry of `beta_list`.
    pub exponents: ExponentSet,
    pub beta_list: Vec<f64>,
    pub sequence: Option<SeqWeights>,
    pub oracle: OracleConfig,
    pub band: (f64, f64),
    pub lemma_trials: usize,
    pub output: OutputConfig,
}

impl RunConfig {
    /// Continuous-mode configuration with default oracle, band and output.
    pub fn for_problem(mode: Mode, spec: ProblemSpec, betas: Vec<f64>) -> Result<RunConfig> {
        spec.validate()?;
        let mut cfg = RunConfig {
            schema: SCHEMA_VERSION,
            mode,
            exponents: spec.exponents,
            problem: Some(spec),
            beta_list: Vec::new(),
            sequence: None,
            oracle: OracleConfig::default(),
            band: DEFAULT_BAND,
            lemma_trials: DEFAULT_LEMMA_TRIALS,
            output: OutputConfig {
                path: None,
                format: Format::Json,
            },
        };
        cfg.set_beta_list(betas)?;
        Ok(cfg)
    }

    /// Replaces the β list, re-checking the bound.
    pub fn set_beta_list(&mut self, betas: Vec<f64>) -> Result<()> {
        let betas = check_betas(betas, "exponents.beta")?;
        self.exponents = self.exponents.with_beta(betas[0])?;
        if let Some(p) = &mut self.problem {
            p.exponents = self.exponents;
        }
        self.beta_list = betas;
        Ok(())
    }

    pub fn set_oracle(&mut self, oracle: OracleConfig) -> Result<()> {
        check_cells(oracle.n_cells, "oracle.n_cells")?;
        self.oracle = oracle;
        Ok(())
    }

    /// Problem for the continuous modes; constant weights on `(0, 1)` when
    /// none was configured.
    pub fn problem_or_unit(&self) -> Result<ProblemSpec> {
        match &self.problem {
            Some(p) => Ok(p.clone()),
            None => ProblemSpec::unit(self.exponents.p, self.exponents.q, self.exponents.r, self.exponents.beta),
        }
    }
}

fn schema(key: &str, message: impl Into<String>) -> Error {
    Error::Schema {
        key: key.to_string(),
        message: message.into(),
    }
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn object<'a>(v: &'a Value, path: &str, allowed: &[&str]) -> Result<&'a Map<String, Value>> {
    let obj = v.as_object().ok_or_else(|| schema(path, "expected an object"))?;
    for k in obj.keys() {
        if !allowed.contains(&k.as_str()) {
            return Err(schema(&join(path, k), "unknown key"));
        }
    }
    Ok(obj)
}

fn number(v: &Value, path: &str) -> Result<f64> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| schema(path, "number out of range")),
        Value::String(s) => match s.as_str() {
            "inf" | "+inf" => Ok(f64::INFINITY),
            "-inf" => Ok(f64::NEG_INFINITY),
            _ => Err(schema(path, format!("expected a number, got \"{s}\""))),
        },
        _ => Err(schema(path, "expected a number")),
    }
}

fn uint(v: &Value, path: &str) -> Result<u64> {
    v.as_u64().ok_or_else(|| schema(path, "expected a nonnegative integer"))
}

fn numbers(v: &Value, path: &str) -> Result<Vec<f64>> {
    let arr = v.as_array().ok_or_else(|| schema(path, "expected an array of numbers"))?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| number(x, &format!("{path}[{i}]")))
        .collect()
}

fn required<'a>(obj: &'a Map<String, Value>, path: &str, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| schema(&join(path, key), "missing required key"))
}

fn check_betas(betas: Vec<f64>, path: &str) -> Result<Vec<f64>> {
    if betas.is_empty() {
        return Err(schema(path, "at least one beta is required"));
    }
    for &b in &betas {
        if !(b < 1.0) || !b.is_finite() {
            return Err(Error::Range("beta must be < 1".into()));
        }
    }
    Ok(betas)
}

fn check_cells(n: usize, path: &str) -> Result<()> {
    if n < 64 {
        return Err(Error::Range(format!("{path} must be at least 64, got {n}")));
    }
    Ok(())
}

fn weight(obj: &Map<String, Value>, key: &str) -> Result<WeightExpr> {
    let path = format!("weights.{key}");
    let v = required(obj, "weights", key)?;
    serde_json::from_value(v.clone()).map_err(|e| schema(&path, e.to_string()))
}

/// Parses a configuration file.
pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<RunConfig> {
    let root: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let top = object(
        &root,
        "",
        &[
            "schema",
            "mode",
            "interval",
            "exponents",
            "weights",
            "sequence",
            "oracle",
            "band",
            "output",
            "quadrature",
            "k_max",
            "lemma_trials",
        ],
    )?;
    let version = uint(required(top, "", "schema")?, "schema")?;
    if version != SCHEMA_VERSION {
        return Err(schema("schema", format!("unsupported schema version {version}")));
    }
    let mode = match top.get("mode") {
        None => Mode::Main,
        Some(Value::String(s)) => s.parse()?,
        Some(_) => return Err(schema("mode", "expected a string")),
    };

    let empty = Map::new();
    let ex = match top.get("exponents") {
        Some(v) => object(v, "exponents", &["p", "q", "r", "beta"])?,
        None if mode == Mode::LemmaChecks => &empty,
        None => return Err(schema("exponents", "missing required key")),
    };
    let lemma_default = |key: &str| -> Result<f64> {
        match ex.get(key) {
            Some(v) => number(v, &join("exponents", key)),
            None if mode == Mode::LemmaChecks => Ok(1.0),
            None => Err(schema(&join("exponents", key), "missing required key")),
        }
    };
    let p = lemma_default("p")?;
    let q = lemma_default("q")?;
    let r = match ex.get("r") {
        Some(v) => number(v, "exponents.r")?,
        None if mode == Mode::Main => return Err(schema("exponents.r", "missing required key")),
        None => 1.0,
    };
    let betas = match ex.get("beta") {
        None => vec![0.0],
        Some(v @ Value::Array(_)) => numbers(v, "exponents.beta")?,
        Some(v) => vec![number(v, "exponents.beta")?],
    };
    let betas = check_betas(betas, "exponents.beta")?;
    let exponents = ExponentSet::new(p, q, r, betas[0])?;

    let quad = match top.get("quadrature") {
        Some(v) => {
            object(v, "quadrature", &["rel_tol", "abs_tol", "max_depth", "sup_grid"])?;
            let s: QuadSettings = serde_json::from_value(v.clone()).map_err(|e| schema("quadrature", e.to_string()))?;
            s.validate()?;
            s
        }
        None => QuadSettings::default(),
    };
    let k_max = match top.get("k_max") {
        Some(v) => uint(v, "k_max")? as usize,
        None => DEFAULT_K_MAX,
    };

    let problem = if mode.is_discrete() {
        None
    } else {
        let needs = mode != Mode::LemmaChecks;
        match (top.get("interval"), top.get("weights")) {
            (None, None) if !needs => None,
            (iv, wt) => {
                let iv = iv.ok_or_else(|| schema("interval", "missing required key"))?;
                let ivo = object(iv, "interval", &["a", "b"])?;
                let a = number(required(ivo, "interval", "a")?, "interval.a")?;
                let b = number(required(ivo, "interval", "b")?, "interval.b")?;
                let wt = wt.ok_or_else(|| schema("weights", "missing required key"))?;
                let wo = object(wt, "weights", &["u", "v", "w"])?;
                let weights = Weights {
                    u: weight(wo, "u")?,
                    v: weight(wo, "v")?,
                    w: weight(wo, "w")?,
                };
                let spec = ProblemSpec {
                    interval: IntervalSpec::new(a, b)?,
                    exponents,
                    weights,
                    quad,
                    k_max,
                };
                spec.validate()?;
                Some(spec)
            }
        }
    };

    let sequence = match top.get("sequence") {
        Some(v) => {
            let so = object(v, "sequence", &["start", "a", "b"])?;
            let start = match so.get("start") {
                Some(s) => s.as_i64().ok_or_else(|| schema("sequence.start", "expected an integer"))?,
                None => 0,
            };
            let a = numbers(required(so, "sequence", "a")?, "sequence.a")?;
            let b = numbers(required(so, "sequence", "b")?, "sequence.b")?;
            Some(SeqWeights::new(start, a, b).map_err(|e| schema("sequence", e.to_string()))?)
        }
        None if mode.is_discrete() => return Err(schema("sequence", "missing required key")),
        None => None,
    };

    let mut oracle = OracleConfig::default();
    if let Some(v) = top.get("oracle") {
        let oo = object(v, "oracle", &["n_cells", "restarts", "seed"])?;
        if let Some(n) = oo.get("n_cells") {
            oracle.n_cells = uint(n, "oracle.n_cells")? as usize;
        }
        if let Some(n) = oo.get("restarts") {
            oracle.restarts = uint(n, "oracle.restarts")? as usize;
        }
        if let Some(n) = oo.get("seed") {
            oracle.seed = uint(n, "oracle.seed")?;
        }
    }
    check_cells(oracle.n_cells, "oracle.n_cells")?;

    let band = match top.get("band") {
        Some(v) => {
            let b = numbers(v, "band")?;
            if b.len() != 2 {
                return Err(schema("band", "expected [lo, hi]"));
            }
            if !(b[0] > 0.0 && b[0] <= b[1] && b[1].is_finite()) {
                return Err(Error::Range(format!("band must satisfy 0 < lo <= hi < inf, got [{}, {}]", b[0], b[1])));
            }
            (b[0], b[1])
        }
        None => DEFAULT_BAND,
    };

    let lemma_trials = match top.get("lemma_trials") {
        Some(v) => uint(v, "lemma_trials")? as usize,
        None => DEFAULT_LEMMA_TRIALS,
    };

    let mut output = OutputConfig {
        path: None,
        format: Format::Json,
    };
    if let Some(v) = top.get("output") {
        let oo = object(v, "output", &["path", "format"])?;
        if let Some(p) = oo.get("path") {
            let s = p.as_str().ok_or_else(|| schema("output.path", "expected a string"))?;
            output.path = Some(PathBuf::from(s));
        }
        if let Some(f) = oo.get("format") {
            let s = f.as_str().ok_or_else(|| schema("output.format", "expected a string"))?;
            output.format = s.parse()?;
        }
    }

    Ok(RunConfig {
        schema: version,
        mode,
        problem,
        exponents,
        beta_list: betas,
        sequence,
        oracle,
        band,
        lemma_trials,
        output,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
  "schema": 1,
  "interval": {"a": 0, "b": 1},
  "exponents": {"p": 1, "q": 1, "r": 1, "beta": [0.0]},
  "weights": {
    "u": {"power": {"c": 1, "alpha": 0}},
    "v": {"power": {"c": 1, "alpha": 0}},
    "w": {"power": {"c": 1, "alpha": 0}}
  }
}"#;

    #[test]
    fn minimal_config() {
        let cfg = parse_config_str(MINIMAL).unwrap();
        assert_eq!(cfg.mode, Mode::Main);
        assert_eq!(cfg.beta_list, vec![0.0]);
        assert_eq!(cfg.oracle, OracleConfig::default());
        assert_eq!(cfg.band, DEFAULT_BAND);
        assert_eq!(cfg.problem.unwrap(), ProblemSpec::unit(1.0, 1.0, 1.0, 0.0).unwrap());
    }

    #[test]
    fn beta_out_of_range() {
        let text = MINIMAL.replace("[0.0]", "[0.0, 1.5]");
        assert_eq!(parse_config_str(&text), Err(Error::Range("beta must be < 1".into())));
    }

    #[test]
    fn syntax_error_position() {
        let text = MINIMAL.replace("\"b\": 1}", "\"b\": 1,}");
        match parse_config_str(&text) {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 3);
                assert!(column > 20);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_keys_named() {
        let text = MINIMAL.replace("\"schema\": 1,", "\"schema\": 1, \"colour\": 3,");
        assert!(matches!(parse_config_str(&text), Err(Error::Schema { key, .. }) if key == "colour"));
        let text = MINIMAL.replace("\"a\": 0,", "\"a\": 0, \"c\": 2,");
        assert!(matches!(parse_config_str(&text), Err(Error::Schema { key, .. }) if key == "interval.c"));
        let text = MINIMAL.replace("\"alpha\": 0}}", "\"alpha\": 0, \"x\": 1}}");
        assert!(matches!(parse_config_str(&text), Err(Error::Schema { key, .. }) if key.starts_with("weights.")));
    }

    #[test]
    fn trivial_p_accepted_at_parse() {
        let text = MINIMAL.replace("\"p\": 1,", "\"p\": 0.5,");
        assert_eq!(parse_config_str(&text).unwrap().exponents.p, 0.5);
    }

    #[test]
    fn infinite_endpoint_and_overrides() {
        let text = MINIMAL.replace("\"b\": 1", "\"b\": \"inf\"").replace(
            "\"u\": {\"power\": {\"c\": 1, \"alpha\": 0}}",
            "\"u\": {\"exp_scale\": {\"c\": 1, \"lambda\": -1}}",
        );
        let text = text.replace(
            "\"w\": {\"power\": {\"c\": 1, \"alpha\": 0}}",
            "\"w\": {\"exp_scale\": {\"c\": 1, \"lambda\": -1}}",
        );
        let mut cfg = parse_config_str(&text).unwrap();
        assert_eq!(cfg.problem.as_ref().unwrap().interval.b, f64::INFINITY);
        cfg.set_beta_list(vec![0.0, 0.5]).unwrap();
        assert_eq!(cfg.problem.as_ref().unwrap().exponents.beta, 0.0);
        assert!(matches!(cfg.set_beta_list(vec![1.0]), Err(Error::Range(_))));
    }

    #[test]
    fn discrete_modes_need_a_sequence() {
        let text = r#"{"schema": 1, "mode": "discrete-hardy", "exponents": {"p": 2, "q": 1}}"#;
        assert!(matches!(parse_config_str(text), Err(Error::Schema { key, .. }) if key == "sequence"));
        let text = r#"{"schema": 1, "mode": "discrete-hardy", "exponents": {"p": 2, "q": 1},
            "sequence": {"a": [1, 2], "b": [1, 1]}}"#;
        let cfg = parse_config_str(text).unwrap();
        assert_eq!(cfg.sequence.unwrap().a, vec![1.0, 2.0]);
        assert!(cfg.problem.is_none());
    }

    #[test]
    fn schema_version_checked() {
        let text = MINIMAL.replace("\"schema\": 1", "\"schema\": 2");
        assert!(matches!(parse_config_str(&text), Err(Error::Schema { key, .. }) if key == "schema"));
    }
}
