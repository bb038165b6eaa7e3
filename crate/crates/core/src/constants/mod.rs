//! Characterizing constants: the continuous functionals of the main and the
//! monotone inequality, and their discrete counterparts.

pub mod continuous;
pub mod discrete;
pub(crate) mod tables;

use serde::Serialize;

pub use continuous::{
    characterize_main, characterize_monotone, compute_c, compute_calc, ConstantReport, ConstantsSettings,
};
pub use discrete::{
    discrete_characterization, discrete_hardy_constant, embedding_constant, local_hardy_b, DiscreteConstant,
    DiscreteName, DiscreteReport, DiscreteRow, SeqWeights,
};

/// Exponent regime; ties resolve towards the non-strict side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CaseTag {
    #[serde(rename = "i")]
    I,
    #[serde(rename = "ii")]
    II,
    #[serde(rename = "iii")]
    III,
    #[serde(rename = "iv")]
    IV,
}

impl CaseTag {
    /// Regime of the main inequality: `p` against `r` and `q`.
    pub fn main(p: f64, q: f64, r: f64) -> CaseTag {
        match (p <= r, p <= q) {
            (true, true) => CaseTag::I,
            (false, true) => CaseTag::II,
            (true, false) => CaseTag::III,
            (false, false) => CaseTag::IV,
        }
    }

    /// Regime of the monotone inequality: `p` against `q` and `1`.
    pub fn monotone(p: f64, q: f64) -> CaseTag {
        CaseTag::main(1.0, 1.0 / p, q / p)
    }

    /// Regime of the discrete Hardy inequality with weights `a_k, b_k`.
    pub fn discrete_hardy(p: f64, q: f64) -> CaseTag {
        match (p <= 1.0, p <= q) {
            (true, true) => CaseTag::I,
            (true, false) => CaseTag::II,
            (false, false) => CaseTag::III,
            (false, true) => CaseTag::IV,
        }
    }

    /// Constant indices (1..=5) whose sum characterizes the best constant.
    pub fn combination(self) -> [u8; 2] {
        match self {
            CaseTag::I => [1, 0],
            CaseTag::II => [2, 3],
            CaseTag::III => [1, 4],
            CaseTag::IV => [3, 5],
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            CaseTag::I => "i",
            CaseTag::II => "ii",
            CaseTag::III => "iii",
            CaseTag::IV => "iv",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstantName {
    C(u8),
    CalC(u8),
}

impl ConstantName {
    pub fn index(self) -> u8 {
        match self {
            ConstantName::C(i) | ConstantName::CalC(i) => i,
        }
    }

    pub fn label(self) -> String {
        match self {
            ConstantName::C(i) => format!("C{i}"),
            ConstantName::CalC(i) => format!("calC{i}"),
        }
    }

    pub fn parse(s: &str) -> Option<ConstantName> {
        let (kind, digit) = if let Some(d) = s.strip_prefix("calC") {
            (true, d)
        } else {
            (false, s.strip_prefix('C')?)
        };
        let i: u8 = digit.parse().ok().filter(|i| (1..=5).contains(i))?;
        Some(if kind { ConstantName::CalC(i) } else { ConstantName::C(i) })
    }
}

impl Serialize for ConstantName {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

/// A computed constant; `+inf` means the characterizing condition fails.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantValue {
    pub name: ConstantName,
    #[serde(with = "crate::serde_util::ext_real")]
    pub value: f64,
    #[serde(rename = "error", with = "crate::serde_util::ext_real")]
    pub quadrature_error: f64,
    pub finite: bool,
}

impl ConstantValue {
    pub fn new(name: ConstantName, value: f64, quadrature_error: f64) -> Self {
        ConstantValue {
            name,
            value,
            quadrature_error,
            finite: value.is_finite(),
        }
    }
}
