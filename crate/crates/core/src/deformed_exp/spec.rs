use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{DeformedExponential, NumericTable};
use crate::error::{Error, Result};

const GRAMMAR: &str = "exp | qexp:<q> | affq:<q>,<b>,<a> | table:<path>";

/// Textual description of a deformed exponential as accepted on the command
/// line: `exp`, `qexp:<q>`, `affq:<q>,<b>,<a>` or `table:<path>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum PhiSpec {
    Exp,
    QExp(f64),
    AffQ { q: f64, b: f64, a: f64 },
    Table(PathBuf),
}

impl PhiSpec {
    pub fn build(&self) -> Result<DeformedExponential<f64>> {
        match self {
            PhiSpec::Exp => Ok(DeformedExponential::exponential()),
            PhiSpec::QExp(q) => DeformedExponential::q_exponential(*q),
            PhiSpec::AffQ { q, b, a } => DeformedExponential::affine_q_exp(*q, *b, *a),
            PhiSpec::Table(path) => Ok(DeformedExponential::from_table(
                NumericTable::from_csv_path(path)?,
            )),
        }
    }
}

fn usage(s: &str) -> Error {
    Error::Usage(format!(
        "unknown phi spec `{s}`; accepted grammar: {GRAMMAR}"
    ))
}

fn number(s: &str, whole: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| usage(whole))
}

impl FromStr for PhiSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "exp" {
            return Ok(PhiSpec::Exp);
        }
        let (head, rest) = s.split_once(':').ok_or_else(|| usage(s))?;
        match head {
            "qexp" => Ok(PhiSpec::QExp(number(rest, s)?)),
            "affq" => {
                let parts: Vec<&str> = rest.split(',').collect();
                if parts.len() != 3 {
                    return Err(usage(s));
                }
                Ok(PhiSpec::AffQ {
                    q: number(parts[0], s)?,
                    b: number(parts[1], s)?,
                    a: number(parts[2], s)?,
                })
            }
            "table" if !rest.is_empty() => Ok(PhiSpec::Table(PathBuf::from(rest))),
            _ => Err(usage(s)),
        }
    }
}

impl fmt::Display for PhiSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhiSpec::Exp => write!(f, "exp"),
            PhiSpec::QExp(q) => write!(f, "qexp:{q}"),
            PhiSpec::AffQ { q, b, a } => write!(f, "affq:{q},{b},{a}"),
            PhiSpec::Table(p) => write!(f, "table:{}", p.display()),
        }
    }
}

impl TryFrom<String> for PhiSpec {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<PhiSpec> for String {
    fn from(p: PhiSpec) -> String {
        p.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_grammar() {
        assert_eq!("exp".parse::<PhiSpec>().unwrap(), PhiSpec::Exp);
        assert_eq!("qexp:0.5".parse::<PhiSpec>().unwrap(), PhiSpec::QExp(0.5));
        assert_eq!(
            "affq:0.5,2,-1".parse::<PhiSpec>().unwrap(),
            PhiSpec::AffQ {
                q: 0.5,
                b: 2.0,
                a: -1.0
            }
        );
        assert_eq!(
            "table:/tmp/x.csv".parse::<PhiSpec>().unwrap(),
            PhiSpec::Table("/tmp/x.csv".into())
        );
    }

    #[test]
    fn unknown_spec_echoes_grammar() {
        for bad in ["kaniadakis:0.3", "qexp", "affq:1,2", "qexp:abc", "table:"] {
            let err = bad.parse::<PhiSpec>().unwrap_err().to_string();
            assert!(err.contains(GRAMMAR), "{err}");
        }
    }

    #[test]
    fn display_round_trip() {
        for s in ["exp", "qexp:0.3", "affq:0.4,3,-2"] {
            let p: PhiSpec = s.parse().unwrap();
            assert_eq!(p.to_string().parse::<PhiSpec>().unwrap(), p);
        }
    }

    #[test]
    fn build_validates_parameters() {
        assert!(PhiSpec::QExp(2.0).build().is_err());
        assert!(PhiSpec::Table("/nonexistent/phi.csv".into())
            .build()
            .is_err());
    }
}
