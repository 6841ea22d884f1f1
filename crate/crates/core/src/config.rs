//! Experiment configuration documents (TOML).
//!
//! ```toml
//! seed = 7
//! trials = 10000
//! distribution = "gaussian"   # gaussian | uniform | laplace
//! degree_cap = 4096
//! tolerance = 1e-6
//! pivot = "listed"            # listed | min | term index
//!
//! [[circuit.terms]]
//! degree_shift = 0
//! supports = [[0, 1, 3], [0, 2]]
//!
//! [[circuit.terms]]
//! degree_shift = 2
//! supports = [[0, 4]]
//!
//! [count]
//! method = "sturm"            # sturm | subdivision
//! regions = ["unit_pos", "tail_pos", "unit_neg", "tail_neg", "all"]
//! on_cap = "fallback"         # fallback | abort
//! ```
//!
//! Supports may contain any integers; each is shifted to start at 0 and the
//! shift is folded into the term's degree shift.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::distributions::{ConvenientDensity, DensityKind};
use crate::error::{Error, Result};
use crate::experiments::{CapPolicy, ExperimentConfig, Pivot, DEFAULT_TOLERANCE, DEFAULT_TRIALS};
use crate::polynomials::{normalize_support, Circuit, ProductTerm, DEFAULT_DEGREE_CAP};
use crate::realroots::{CountMethod, Region};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<SeedDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trials: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    distribution: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    degree_cap: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pivot: Option<PivotDoc>,
    circuit: CircuitDoc,
    #[serde(skip_serializing_if = "Option::is_none")]
    count: Option<CountDoc>,
}

/// TOML integers are signed, so seeds of 2^63 and above are written as strings.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum SeedDoc {
    Int(i64),
    Text(String),
}

impl SeedDoc {
    fn from_seed(seed: u64) -> Self {
        i64::try_from(seed).map_or_else(|_| SeedDoc::Text(seed.to_string()), SeedDoc::Int)
    }

    fn value(&self) -> Result<u64> {
        match self {
            SeedDoc::Int(n) => u64::try_from(*n).map_err(|_| Error::config("seed", format!("must be nonnegative, got {n}"))),
            SeedDoc::Text(t) => t
                .trim()
                .parse()
                .map_err(|_| Error::config("seed", format!("expected an integer in [0, 2^64), got `{t}`"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum PivotDoc {
    Index(i64),
    Name(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitDoc {
    terms: Vec<TermDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDoc {
    #[serde(default)]
    degree_shift: i64,
    supports: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CountDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    method: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    regions: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    on_cap: Option<String>,
}

/// A parsed configuration and the normalization applied to its supports.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    /// Per term, per factor: the smallest exponent removed from the support.
    pub factor_shifts: Vec<Vec<i64>>,
    /// Smallest combined term shift, removed from every term.
    pub global_shift: i64,
}

fn positive(field: &str, v: Option<i64>, default: usize) -> Result<usize> {
    match v {
        None => Ok(default),
        Some(n) if n >= 1 => Ok(n as usize),
        Some(n) => Err(Error::config(field, format!("must be at least 1, got {n}"))),
    }
}

pub fn parse_config(text: &str) -> Result<LoadedConfig> {
    let doc: ConfigDoc = toml::from_str(text).map_err(|e| Error::config("document", e.message().to_string()))?;

    let trials = positive("trials", doc.trials, DEFAULT_TRIALS)?;
    let degree_cap = positive("degree_cap", doc.degree_cap, DEFAULT_DEGREE_CAP)?;
    let tolerance = doc.tolerance.unwrap_or(DEFAULT_TOLERANCE);
    if !(tolerance > 0.0 && tolerance.is_finite()) {
        return Err(Error::config("tolerance", format!("must be positive and finite, got {tolerance}")));
    }
    let distribution = match doc.distribution.as_deref() {
        None => ConvenientDensity::gaussian(),
        Some(name) => ConvenientDensity::new(DensityKind::parse(name).ok_or_else(|| {
            Error::config("distribution", format!("unknown density '{name}', expected gaussian, uniform or laplace"))
        })?),
    };

    if doc.circuit.terms.is_empty() {
        return Err(Error::config("circuit.terms", "at least one term is required"));
    }
    let mut factor_shifts = Vec::new();
    let mut raw = Vec::new();
    for (i, term) in doc.circuit.terms.iter().enumerate() {
        if term.supports.is_empty() {
            return Err(Error::config(format!("circuit.terms[{i}].supports"), "at least one factor is required"));
        }
        let mut shifts = Vec::new();
        let mut factors = Vec::new();
        for (j, s) in term.supports.iter().enumerate() {
            let (support, shift) =
                normalize_support(s).map_err(|e| Error::config(format!("circuit.terms[{i}].supports[{j}]"), e.to_string()))?;
            shifts.push(shift);
            factors.push(support);
        }
        let total = shifts.iter().try_fold(term.degree_shift, |acc: i64, s| acc.checked_add(*s));
        let total = total.ok_or_else(|| Error::config(format!("circuit.terms[{i}].degree_shift"), "overflow"))?;
        raw.push((factors, total));
        factor_shifts.push(shifts);
    }
    let global_shift = raw.iter().map(|t| t.1).min().expect("nonempty");
    let mut terms = Vec::with_capacity(raw.len());
    for (i, (factors, total)) in raw.into_iter().enumerate() {
        let d = u32::try_from(total - global_shift)
            .map_err(|_| Error::config(format!("circuit.terms[{i}].degree_shift"), "shift spread exceeds 2^32"))?;
        terms.push(ProductTerm::new(factors, d));
    }
    let circuit = Circuit::new(terms).map_err(|e| Error::config("circuit", e.to_string()))?;

    let count = doc.count.unwrap_or(CountDoc {
        method: None,
        regions: None,
        on_cap: None,
    });
    let count_method = match count.method.as_deref() {
        None | Some("sturm") => CountMethod::Sturm,
        Some("subdivision") => CountMethod::Subdivision,
        Some(other) => {
            return Err(Error::config("count.method", format!("unknown method '{other}', expected sturm or subdivision")))
        }
    };
    let regions = match count.regions {
        None => Region::ALL.to_vec(),
        Some(names) => {
            if names.is_empty() {
                return Err(Error::config("count.regions", "at least one region is required"));
            }
            names
                .iter()
                .enumerate()
                .map(|(i, n)| {
                    Region::parse(n).ok_or_else(|| {
                        Error::config(
                            format!("count.regions[{i}]"),
                            format!("unknown region '{n}', expected unit_pos, tail_pos, unit_neg, tail_neg or all"),
                        )
                    })
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    let on_cap = match count.on_cap.as_deref() {
        None | Some("fallback") => CapPolicy::Fallback,
        Some("abort") => CapPolicy::Abort,
        Some(other) => return Err(Error::config("count.on_cap", format!("unknown policy '{other}', expected fallback or abort"))),
    };
    let pivot = match doc.pivot {
        None => Pivot::Listed,
        Some(PivotDoc::Name(n)) if n == "listed" => Pivot::Listed,
        Some(PivotDoc::Name(n)) if n == "min" => Pivot::Min,
        Some(PivotDoc::Index(i)) if i >= 0 && circuit.pivot_candidates().contains(&(i as usize)) => Pivot::Index(i as usize),
        Some(PivotDoc::Index(i)) => return Err(Error::config("pivot", format!("term {i} does not exist or has a nonzero shift"))),
        Some(PivotDoc::Name(n)) => return Err(Error::config("pivot", format!("unknown pivot '{n}', expected listed, min or an index"))),
    };

    let config = ExperimentConfig {
        circuit,
        distribution,
        trials,
        master_seed: doc.seed.as_ref().map_or(Ok(0), SeedDoc::value)?,
        regions,
        count_method,
        degree_cap,
        on_cap,
        tolerance,
        pivot,
    };
    config.validate()?;
    Ok(LoadedConfig {
        config,
        factor_shifts,
        global_shift,
    })
}

pub fn load_config(path: &Path) -> Result<LoadedConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

/// Serializes a configuration with its normalized supports.
pub fn emit_config(cfg: &ExperimentConfig) -> String {
    let doc = ConfigDoc {
        seed: Some(SeedDoc::from_seed(cfg.master_seed)),
        trials: Some(cfg.trials as i64),
        distribution: Some(cfg.distribution.name().to_string()),
        degree_cap: Some(cfg.degree_cap as i64),
        tolerance: Some(cfg.tolerance),
        pivot: Some(match cfg.pivot {
            Pivot::Listed => PivotDoc::Name("listed".into()),
            Pivot::Min => PivotDoc::Name("min".into()),
            Pivot::Index(i) => PivotDoc::Index(i as i64),
        }),
        circuit: CircuitDoc {
            terms: cfg
                .circuit
                .terms()
                .iter()
                .map(|t| TermDoc {
                    degree_shift: t.degree_shift as i64,
                    supports: t
                        .factors
                        .iter()
                        .map(|s| s.exponents().iter().map(|&e| e as i64).collect())
                        .collect(),
                })
                .collect(),
        },
        count: Some(CountDoc {
            method: Some(
                match cfg.count_method {
                    CountMethod::Sturm => "sturm",
                    CountMethod::Subdivision => "subdivision",
                }
                .into(),
            ),
            regions: Some(cfg.regions.iter().map(|r| r.name().to_string()).collect()),
            on_cap: Some(
                match cfg.on_cap {
                    CapPolicy::Fallback => "fallback",
                    CapPolicy::Abort => "abort",
                }
                .into(),
            ),
        }),
    };
    toml::to_string(&doc).expect("config document serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field_of(e: Error) -> String {
        match e {
            Error::Config { field, .. } => field,
            other => panic!("not a config error: {other:?}"),
        }
    }

    #[test]
    fn minimal_document_gets_defaults() {
        let l = parse_config("[[circuit.terms]]\nsupports = [[0, 1]]\n").unwrap();
        let c = &l.config;
        assert_eq!(c.trials, 10_000);
        assert_eq!(c.tolerance, 1e-6);
        assert_eq!(c.degree_cap, 4096);
        assert_eq!(c.distribution, ConvenientDensity::gaussian());
        assert_eq!(c.count_method, CountMethod::Sturm);
        assert_eq!(c.regions, Region::ALL.to_vec());
        assert_eq!(c.circuit.m(), 1);
    }

    #[test]
    fn negative_exponents_are_normalized() {
        let text = "[[circuit.terms]]\nsupports = [[-2, 0, 3]]\n[[circuit.terms]]\ndegree_shift = 1\nsupports = [[0, 1]]\n";
        let l = parse_config(text).unwrap();
        assert_eq!(l.factor_shifts, vec![vec![-2], vec![0]]);
        assert_eq!(l.global_shift, -2);
        let t = l.config.circuit.terms();
        assert_eq!(t[0].factors[0].exponents(), &[0, 2, 5]);
        assert_eq!(t[0].degree_shift, 0);
        assert_eq!(t[1].degree_shift, 3);
    }

    #[test]
    fn validation_names_the_field() {
        let base = "[[circuit.terms]]\nsupports = [[0, 1]]\n";
        assert_eq!(field_of(parse_config(&format!("trials = 0\n{base}")).unwrap_err()), "trials");
        assert_eq!(field_of(parse_config(&format!("tolerance = -1.0\n{base}")).unwrap_err()), "tolerance");
        assert_eq!(field_of(parse_config(&format!("distribution = \"cauchy\"\n{base}")).unwrap_err()), "distribution");
        assert_eq!(field_of(parse_config(&format!("{base}[count]\nmethod = \"newton\"\n")).unwrap_err()), "count.method");
        assert_eq!(field_of(parse_config(&format!("{base}[count]\nregions = [\"all\", \"x\"]\n")).unwrap_err()), "count.regions[1]");
        assert_eq!(field_of(parse_config("[[circuit.terms]]\nsupports = [[0, 2000000]]\n").unwrap_err()), "circuit.terms[0].supports[0]");
        assert_eq!(field_of(parse_config("[[circuit.terms]]\nsupports = []\n").unwrap_err()), "circuit.terms[0].supports");
        assert_eq!(field_of(parse_config("seed = 1\n").unwrap_err()), "document");
        assert_eq!(field_of(parse_config(&format!("pivot = 3\n{base}")).unwrap_err()), "pivot");
        let e = parse_config(&format!("colour = 1\n{base}")).unwrap_err();
        assert!(e.to_string().contains("colour"), "{e}");
    }

    #[test]
    fn seeds_span_u64() {
        let base = "[[circuit.terms]]\nsupports = [[0, 1]]\n";
        let mut cfg = parse_config(base).unwrap().config;
        cfg.master_seed = u64::MAX;
        let text = emit_config(&cfg);
        assert!(text.contains(&format!("\"{}\"", u64::MAX)));
        assert_eq!(parse_config(&text).unwrap().config.master_seed, u64::MAX);
        assert_eq!(field_of(parse_config(&format!("seed = -1\n{base}")).unwrap_err()), "seed");
        assert_eq!(field_of(parse_config(&format!("seed = \"x\"\n{base}")).unwrap_err()), "seed");
    }

    #[test]
    fn round_trip() {
        let text = r#"
seed = 99
trials = 123
distribution = "laplace"
tolerance = 1e-7
pivot = "min"

[[circuit.terms]]
degree_shift = 4
supports = [[0, 1, 3], [0, 2]]

[[circuit.terms]]
supports = [[-1, 0]]

[[circuit.terms]]
degree_shift = 1
supports = [[0, 5]]

[count]
method = "subdivision"
regions = ["unit_pos", "all"]
on_cap = "abort"
"#;
        let cfg = parse_config(text).unwrap().config;
        let again = parse_config(&emit_config(&cfg)).unwrap().config;
        assert_eq!(cfg, again);
        let cfg = parse_config("[[circuit.terms]]\nsupports = [[0]]\n").unwrap().config;
        assert_eq!(parse_config(&emit_config(&cfg)).unwrap().config, cfg);
    }
}
