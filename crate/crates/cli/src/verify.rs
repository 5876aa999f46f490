//! Sweep a grid of rank-3 Gram matrices and compare `Int(L)` with `∂Den(L)`.

use std::io::Write;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::ValueEnum;
use rayon::prelude::*;
use serde::Serialize;

use ramified_kr::density::Engine;
use ramified_kr::kr::Analytic;
use ramified_kr::lattice::dsl::parse_gram;
use ramified_kr::tree::{int_total, IntPath};
use ramified_kr::RingConfig;

use crate::input::rat;

/// Report schema version, bumped on any field change.
pub const SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeArg {
    /// `Diag(u₁(-π₀)^a, u₂(-π₀)^b, u₃(-π₀)^c)`, `0 ≤ a ≤ b ≤ c`.
    Diag,
    /// `Diag(H_a, u(-π₀)^c)`, `a` odd.
    HBlock,
    /// `Diag(H, u(-π₀)^c)`, which has `v = -1`.
    VNeg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Jsonl,
    Csv,
}

#[derive(Clone, Debug)]
pub struct Case {
    pub id: String,
    pub gram: String,
}

fn unit_entry(u: char, k: i64) -> String {
    match k {
        0 => u.to_string(),
        _ => format!("{u}*(-pi0)^{k}"),
    }
}

/// Cases in lexicographic order of `(shape, exponents, unit classes)`.
pub fn grid(max_exp: i64, units: &[char], shapes: &[ShapeArg]) -> Vec<Case> {
    let mut shapes = shapes.to_vec();
    shapes.sort();
    shapes.dedup();
    let mut out = Vec::new();
    for shape in shapes {
        match shape {
            ShapeArg::Diag => {
                for a in 0..=max_exp {
                    for b in a..=max_exp {
                        for c in b..=max_exp {
                            for &u1 in units {
                                for &u2 in units {
                                    for &u3 in units {
                                        out.push(Case {
                                            id: format!("diag/a={a}/b={b}/c={c}/u={u1}{u2}{u3}"),
                                            gram: format!(
                                                "diag({}, {}, {})",
                                                unit_entry(u1, a),
                                                unit_entry(u2, b),
                                                unit_entry(u3, c)
                                            ),
                                        });
                                    }
                                }
                            }
                        }
                    }
                }
            }
            ShapeArg::HBlock => {
                for a in (1..=2 * max_exp - 1).step_by(2) {
                    for c in 0..=max_exp {
                        for &u in units {
                            out.push(Case {
                                id: format!("hblock/a={a}/c={c}/u={u}"),
                                gram: format!("Hodd({a}) + diag({})", unit_entry(u, c)),
                            });
                        }
                    }
                }
            }
            ShapeArg::VNeg => {
                for c in 0..=max_exp {
                    for &u in units {
                        out.push(Case { id: format!("vneg/c={c}/u={u}"), gram: format!("H + diag({})", unit_entry(u, c)) });
                    }
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct Methods {
    pub pden_method: &'static str,
    pub int_path: Option<&'static str>,
    pub geometric_terms: usize,
    pub bridge_terms: usize,
    pub bridge_used: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationRecord {
    pub schema: u32,
    pub case_id: String,
    pub gram: String,
    pub q: u64,
    pub twist: &'static str,
    pub pden: Option<String>,
    pub int: Option<String>,
    pub pden_integral: Option<bool>,
    #[serde(rename = "match")]
    pub matched: bool,
    pub error: Option<String>,
    #[serde(flatten)]
    pub methods: Methods,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

fn path_label(p: IntPath) -> &'static str {
    match p {
        IntPath::NotIntegral => "not-integral",
        IntPath::UnitSplit => "unit-split",
        IntPath::Decomposition => "decomposition",
    }
}

fn run_case(cfg: &RingConfig, twist: &'static str, an: &Analytic<Engine>, case: &Case, timing: bool) -> VerificationRecord {
    let start = Instant::now();
    let mut rec = VerificationRecord {
        schema: SCHEMA,
        case_id: case.id.clone(),
        gram: case.gram.clone(),
        q: cfg.q(),
        twist,
        pden: None,
        int: None,
        pden_integral: None,
        matched: false,
        error: None,
        methods: Methods { pden_method: "engine", int_path: None, geometric_terms: 0, bridge_terms: 0, bridge_used: false },
        timing_ms: None,
    };
    let outcome = (|| -> Result<()> {
        let g = parse_gram(cfg, &case.gram)?;
        let pden = an.pden(&g)?;
        rec.pden = Some(rat(&pden));
        rec.pden_integral = Some(pden.is_integer());
        let int = int_total(an, &g)?;
        rec.methods.int_path = Some(path_label(int.path));
        rec.methods.geometric_terms = int.geometric_terms;
        rec.methods.bridge_terms = int.bridge_terms;
        rec.methods.bridge_used = int.bridge_terms > 0;
        rec.int = Some(int.value.numer().to_string());
        if !int.value.is_integer() {
            rec.int = Some(rat(&int.value));
        }
        rec.matched = int.value == pden && pden.is_integer();
        Ok(())
    })();
    if let Err(e) = outcome {
        rec.error = Some(format!("{e:#}"));
        rec.matched = false;
    }
    if timing {
        rec.timing_ms = Some(start.elapsed().as_millis() as u64);
    }
    rec
}

/// Runs all cases in a work pool; records come back in grid order.
pub fn run(cfg: &RingConfig, twist: &'static str, cases: &[Case], timing: bool) -> Vec<VerificationRecord> {
    let an = Analytic::with_engine(cfg);
    cases.par_iter().map(|c| run_case(cfg, twist, &an, c, timing)).collect()
}

#[derive(Serialize)]
struct CsvRow<'a> {
    schema: u32,
    case_id: &'a str,
    gram: &'a str,
    q: u64,
    twist: &'a str,
    pden: &'a str,
    int: &'a str,
    pden_integral: String,
    #[serde(rename = "match")]
    matched: bool,
    error: &'a str,
    pden_method: &'a str,
    int_path: &'a str,
    geometric_terms: usize,
    bridge_terms: usize,
    bridge_used: bool,
    timing_ms: String,
}

pub fn write_report(out: &mut dyn Write, records: &[VerificationRecord], format: Format) -> Result<()> {
    match format {
        Format::Jsonl => {
            for r in records {
                serde_json::to_writer(&mut *out, r)?;
                out.write_all(b"\n")?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in records {
                w.serialize(CsvRow {
                    schema: r.schema,
                    case_id: &r.case_id,
                    gram: &r.gram,
                    q: r.q,
                    twist: r.twist,
                    pden: r.pden.as_deref().unwrap_or(""),
                    int: r.int.as_deref().unwrap_or(""),
                    pden_integral: r.pden_integral.map(|b| b.to_string()).unwrap_or_default(),
                    matched: r.matched,
                    error: r.error.as_deref().unwrap_or(""),
                    pden_method: r.methods.pden_method,
                    int_path: r.methods.int_path.unwrap_or(""),
                    geometric_terms: r.methods.geometric_terms,
                    bridge_terms: r.methods.bridge_terms,
                    bridge_used: r.methods.bridge_used,
                    timing_ms: r.timing_ms.map(|t| t.to_string()).unwrap_or_default(),
                })?;
            }
            w.flush().context("writing csv")?;
        }
    }
    Ok(())
}

/// `(total, matched, mismatched, errors)`.
pub fn tally(records: &[VerificationRecord]) -> (usize, usize, usize, usize) {
    let errors = records.iter().filter(|r| r.error.is_some()).count();
    let matched = records.iter().filter(|r| r.matched).count();
    (records.len(), matched, records.len() - matched - errors, errors)
}
