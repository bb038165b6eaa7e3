//! Canonical JSON (sorted keys, `%.12e` floats) and markdown rendering.

use std::fmt::Write;

use serde::Serialize;
use serde_json::Value;

use super::{CertReport, Sandwich};
use crate::error::{Error, Result};

/// C-style `%.12e`: twelve mantissa digits, signed exponent of at least two
/// digits.
pub fn format_float(x: f64) -> String {
    if let Some(tag) = crate::serde_util::ext_real_to_string(x) {
        return tag.to_string();
    }
    let s = format!("{x:.12e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                let _ = write!(out, "{i}");
            } else if let Some(u) = n.as_u64() {
                let _ = write!(out, "{u}");
            } else {
                out.push_str(&format_float(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string escape")),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(out, item, indent + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&serde_json::to_string(k).expect("key escape"));
                out.push_str(": ");
                write_value(out, &map[*k], indent + 1);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

/// Serializes any value canonically. Floats that happen to be integral are
/// still written in exponent form.
pub fn canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::Io(format!("serialization failed: {e}")))?;
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    Ok(out)
}

fn sandwich_row(s: &Sandwich) -> String {
    format!(
        "| {} | {} | {} | {} | {} | {} |\n",
        s.label,
        format_float(s.constant),
        format_float(s.oracle),
        format_float(s.constant_over_oracle),
        format_float(s.oracle_over_constant),
        if s.in_band { "yes" } else { "no" }
    )
}

pub fn markdown(report: &CertReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# Certification report\n");
    let _ = writeln!(out, "- mode: {}", report.mode);
    let _ = writeln!(out, "- verdict: **{}**", report.verdict.label());
    if let Some(r) = report.regime {
        let _ = writeln!(out, "- regime: {}", r.label());
    }
    let _ = writeln!(
        out,
        "- band: [{}, {}]",
        format_float(report.band.0),
        format_float(report.band.1)
    );
    for reason in &report.reasons {
        let _ = writeln!(out, "- note: {reason}");
    }
    for c in &report.constants {
        let _ = writeln!(
            out,
            "\n## {} constants, beta = {}\n",
            match c.problem {
                crate::constants::continuous::Problem::Main => "Main",
                crate::constants::continuous::Problem::Monotone => "Monotone",
            },
            format_float(c.beta)
        );
        let _ = writeln!(out, "| constant | value | error | finite |");
        let _ = writeln!(out, "|---|---|---|---|");
        for v in &c.constants {
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} |",
                v.name.label(),
                format_float(v.value),
                format_float(v.quadrature_error),
                v.finite
            );
        }
        let names: Vec<String> = c.combination.iter().map(|n| n.label()).collect();
        let _ = writeln!(out, "| {} (combination) | {} | {} | {} |", names.join(" + "), format_float(c.value), format_float(c.error), c.finite);
    }
    for d in &report.discrete {
        let _ = writeln!(out, "\n## Discrete constants, beta = {}\n", format_float(d.beta));
        let _ = writeln!(out, "| constant | value | error |");
        let _ = writeln!(out, "|---|---|---|");
        for c in &d.report.constants {
            let _ = writeln!(out, "| {:?} | {} | {} |", c.name, format_float(c.value), format_float(c.error));
        }
        let _ = writeln!(out, "| composite | {} | {} |", format_float(d.report.value), format_float(d.report.error));
    }
    if let Some(c) = &report.sequence_constant {
        let _ = writeln!(out, "\n## Sequence constant\n");
        let _ = writeln!(out, "| constant | value | exact |");
        let _ = writeln!(out, "|---|---|---|");
        let _ = writeln!(out, "| {:?} | {} | {} |", c.name, format_float(c.value), c.exact);
    }
    if let Some(o) = &report.oracle {
        let _ = writeln!(out, "\n## Oracle\n");
        let _ = writeln!(out, "| estimate | cells | restarts | seed | converged |");
        let _ = writeln!(out, "|---|---|---|---|---|");
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} |",
            format_float(o.estimate),
            o.n_cells,
            o.restarts,
            o.seed,
            o.converged
        );
    }
    if !report.sandwich.is_empty() {
        let _ = writeln!(out, "\n## Sandwich\n");
        let _ = writeln!(out, "| pair | constant | oracle | constant/oracle | oracle/constant | in band |");
        let _ = writeln!(out, "|---|---|---|---|---|---|");
        for s in &report.sandwich {
            out.push_str(&sandwich_row(s));
        }
    }
    if !report.lemmas.is_empty() {
        let _ = writeln!(out, "\n## Lemma checks\n");
        let _ = writeln!(out, "| trial | family | check | ratio | lower | upper | holds |");
        let _ = writeln!(out, "|---|---|---|---|---|---|---|");
        for t in &report.lemmas {
            for e in &t.report.entries {
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} | {} | {} | {} |",
                    t.trial,
                    t.kind,
                    e.name,
                    format_float(e.ratio),
                    format_float(e.lower),
                    format_float(e.upper),
                    e.holds
                );
            }
        }
    }
    if !report.truncation.is_empty() {
        let _ = writeln!(out, "\n## Truncation\n");
        for t in &report.truncation {
            let _ = writeln!(out, "- {t}");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_style_exponents() {
        assert_eq!(format_float(0.5), "5.000000000000e-01");
        assert_eq!(format_float(1.0), "1.000000000000e+00");
        assert_eq!(format_float(-12345.678), "-1.234567800000e+04");
        assert_eq!(format_float(1e-300), "1.000000000000e-300");
        assert_eq!(format_float(f64::INFINITY), "inf");
    }

    #[test]
    fn sorted_keys_and_float_format() {
        #[derive(Serialize)]
        struct S {
            zeta: f64,
            alpha: u32,
            mid: Vec<f64>,
        }
        let s = canonical_json(&S {
            zeta: 2.0,
            alpha: 3,
            mid: vec![0.25],
        })
        .unwrap();
        assert_eq!(s, "{\n  \"alpha\": 3,\n  \"mid\": [\n    2.500000000000e-01\n  ],\n  \"zeta\": 2.000000000000e+00\n}\n");
    }
}
