//! Result rows and their CSV/JSON serialization.
//!
//! Both formats round-trip byte-identically: floats are written in Rust's
//! shortest-round-trip form, and parsing followed by re-serialization
//! reproduces the input file exactly. JSON results additionally embed the
//! fully resolved spec so a file is self-describing.

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::spec::ExperimentSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerRow {
    pub snr_db: f64,
    pub system: String,
    pub trials: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub ci95: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleRow {
    pub snr_db: f64,
    pub angle_deg: f64,
    pub system: String,
    pub trials: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub ci95: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryRow {
    pub snr_db: f64,
    pub system: String,
    pub aber: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityRow {
    pub snr_db: f64,
    pub system: String,
    pub capacity_bits: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityRow {
    pub system: String,
    pub eta: f64,
    pub real_multiplications: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyRow {
    pub system: String,
    pub eta: f64,
    pub energy_saving_percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyRow {
    pub system: String,
    pub eta: f64,
    pub energy_saving_percent: f64,
    pub snr_db: f64,
    pub aber: f64,
    pub throughput: f64,
}

/// The typed result table of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "schema", content = "data", rename_all = "kebab-case")]
pub enum Rows {
    Ber(Vec<BerRow>),
    AngleSweep(Vec<AngleRow>),
    Theory(Vec<TheoryRow>),
    Capacity(Vec<CapacityRow>),
    Complexity(Vec<ComplexityRow>),
    EnergySaving(Vec<EnergyRow>),
    Efficiency(Vec<EfficiencyRow>),
}

const BER_HEADER: &str = "snr_db,system,trials,bit_errors,ber,ci95";
const ANGLE_HEADER: &str = "snr_db,angle_deg,system,trials,bit_errors,ber,ci95";
const THEORY_HEADER: &str = "snr_db,system,aber";
const CAPACITY_HEADER: &str = "snr_db,system,capacity_bits,stderr";
const COMPLEXITY_HEADER: &str = "system,eta,real_multiplications";
const ENERGY_HEADER: &str = "system,eta,energy_saving_percent";
const EFFICIENCY_HEADER: &str = "system,eta,energy_saving_percent,snr_db,aber,throughput";

impl Rows {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match self {
            Rows::Ber(rows) => {
                out.push_str(BER_HEADER);
                out.push('\n');
                for r in rows {
                    out.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        r.snr_db, r.system, r.trials, r.bit_errors, r.ber, r.ci95
                    ));
                }
            }
            Rows::AngleSweep(rows) => {
                out.push_str(ANGLE_HEADER);
                out.push('\n');
                for r in rows {
                    out.push_str(&format!(
                        "{},{},{},{},{},{},{}\n",
                        r.snr_db, r.angle_deg, r.system, r.trials, r.bit_errors, r.ber, r.ci95
                    ));
                }
            }
            Rows::Theory(rows) => {
                out.push_str(THEORY_HEADER);
                out.push('\n');
                for r in rows {
                    out.push_str(&format!("{},{},{}\n", r.snr_db, r.system, r.aber));
                }
            }
            Rows::Capacity(rows) => {
                out.push_str(CAPACITY_HEADER);
                out.push('\n');
                for r in rows {
                    out.push_str(&format!(
                        "{},{},{},{}\n",
                        r.snr_db, r.system, r.capacity_bits, r.stderr
                    ));
                }
            }
            Rows::Complexity(rows) => {
                out.push_str(COMPLEXITY_HEADER);
                out.push('\n');
                for r in rows {
                    out.push_str(&format!(
                        "{},{},{}\n",
                        r.system, r.eta, r.real_multiplications
                    ));
                }
            }
            Rows::EnergySaving(rows) => {
                out.push_str(ENERGY_HEADER);
                out.push('\n');
                for r in rows {
                    out.push_str(&format!(
                        "{},{},{}\n",
                        r.system, r.eta, r.energy_saving_percent
                    ));
                }
            }
            Rows::Efficiency(rows) => {
                out.push_str(EFFICIENCY_HEADER);
                out.push('\n');
                for r in rows {
                    out.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        r.system, r.eta, r.energy_saving_percent, r.snr_db, r.aber, r.throughput
                    ));
                }
            }
        }
        out
    }

    pub fn from_csv(text: &str) -> CliResult<Rows> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| CliError::Validation("empty results file".into()))?;
        let body: Vec<&str> = lines.filter(|l| !l.is_empty()).collect();
        match header {
            BER_HEADER => Ok(Rows::Ber(parse_rows(&body, |f| {
                Ok(BerRow {
                    snr_db: field(f, 0)?,
                    system: f[1].to_string(),
                    trials: field(f, 2)?,
                    bit_errors: field(f, 3)?,
                    ber: field(f, 4)?,
                    ci95: field(f, 5)?,
                })
            }, 6)?)),
            ANGLE_HEADER => Ok(Rows::AngleSweep(parse_rows(&body, |f| {
                Ok(AngleRow {
                    snr_db: field(f, 0)?,
                    angle_deg: field(f, 1)?,
                    system: f[2].to_string(),
                    trials: field(f, 3)?,
                    bit_errors: field(f, 4)?,
                    ber: field(f, 5)?,
                    ci95: field(f, 6)?,
                })
            }, 7)?)),
            THEORY_HEADER => Ok(Rows::Theory(parse_rows(&body, |f| {
                Ok(TheoryRow {
                    snr_db: field(f, 0)?,
                    system: f[1].to_string(),
                    aber: field(f, 2)?,
                })
            }, 3)?)),
            CAPACITY_HEADER => Ok(Rows::Capacity(parse_rows(&body, |f| {
                Ok(CapacityRow {
                    snr_db: field(f, 0)?,
                    system: f[1].to_string(),
                    capacity_bits: field(f, 2)?,
                    stderr: field(f, 3)?,
                })
            }, 4)?)),
            COMPLEXITY_HEADER => Ok(Rows::Complexity(parse_rows(&body, |f| {
                Ok(ComplexityRow {
                    system: f[0].to_string(),
                    eta: field(f, 1)?,
                    real_multiplications: field(f, 2)?,
                })
            }, 3)?)),
            ENERGY_HEADER => Ok(Rows::EnergySaving(parse_rows(&body, |f| {
                Ok(EnergyRow {
                    system: f[0].to_string(),
                    eta: field(f, 1)?,
                    energy_saving_percent: field(f, 2)?,
                })
            }, 3)?)),
            EFFICIENCY_HEADER => Ok(Rows::Efficiency(parse_rows(&body, |f| {
                Ok(EfficiencyRow {
                    system: f[0].to_string(),
                    eta: field(f, 1)?,
                    energy_saving_percent: field(f, 2)?,
                    snr_db: field(f, 3)?,
                    aber: field(f, 4)?,
                    throughput: field(f, 5)?,
                })
            }, 6)?)),
            other => Err(CliError::Validation(format!(
                "unrecognized results header '{other}'"
            ))),
        }
    }
}

fn field<T: std::str::FromStr>(fields: &[&str], i: usize) -> CliResult<T>
where
    T::Err: std::fmt::Display,
{
    fields[i]
        .parse()
        .map_err(|e| CliError::Validation(format!("bad field '{}': {e}", fields[i])))
}

fn parse_rows<T>(
    lines: &[&str],
    parse: impl Fn(&[&str]) -> CliResult<T>,
    n_fields: usize,
) -> CliResult<Vec<T>> {
    lines
        .iter()
        .map(|line| {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != n_fields {
                return Err(CliError::Validation(format!(
                    "expected {n_fields} fields, got {} in '{line}'",
                    fields.len()
                )));
            }
            parse(&fields)
        })
        .collect()
}

/// Run provenance embedded in JSON results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub version: String,
    pub seed: u64,
    pub spec: ExperimentSpec,
}

/// A complete JSON results document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub meta: Meta,
    #[serde(flatten)]
    pub rows: Rows,
}

impl Document {
    pub fn new(spec: &ExperimentSpec, rows: Rows) -> Self {
        Self {
            meta: Meta {
                version: env!("CARGO_PKG_VERSION").to_string(),
                seed: spec.seed,
                spec: spec.clone(),
            },
            rows,
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("results serialize");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> CliResult<Document> {
        serde_json::from_str(text)
            .map_err(|e| CliError::Validation(format!("results file does not parse: {e}")))
    }
}
