use ptlab::spectra::logspace;
use serde::Deserialize;

use crate::error::{CliError, CliResult};

/// A single value, an explicit list, or `{start, stop, num, log}`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Value(f64),
    List(Vec<f64>),
    Range(RangeSpec),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub start: f64,
    pub stop: f64,
    pub num: usize,
    /// Geometric spacing between `start` and `stop`.
    #[serde(default)]
    pub log: bool,
}

impl GridSpec {
    pub fn values(&self, name: &str) -> CliResult<Vec<f64>> {
        let v = match self {
            GridSpec::Value(x) => vec![*x],
            GridSpec::List(xs) => xs.clone(),
            GridSpec::Range(r) => {
                if !(r.start.is_finite() && r.stop.is_finite()) {
                    return Err(CliError::constraint(format!("grid {name}: bounds must be finite")));
                }
                if r.log {
                    if r.start <= 0.0 || r.stop <= 0.0 {
                        return Err(CliError::constraint(format!("grid {name}: log spacing needs positive bounds")));
                    }
                    logspace(r.start.log10(), r.stop.log10(), r.num)
                } else if r.num == 1 {
                    vec![r.start]
                } else {
                    let step = (r.stop - r.start) / (r.num.max(2) - 1) as f64;
                    (0..r.num).map(|k| r.start + step * k as f64).collect()
                }
            }
        };
        if v.is_empty() {
            return Err(CliError::constraint(format!("grid {name} is empty")));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(CliError::constraint(format!("grid {name}: values must be finite")));
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(s: &str) -> GridSpec {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn forms() {
        assert_eq!(spec("1.5").values("x").unwrap(), vec![1.5]);
        assert_eq!(spec("[1, 2]").values("x").unwrap(), vec![1.0, 2.0]);
        assert_eq!(spec(r#"{"start":0,"stop":2,"num":5}"#).values("x").unwrap(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        let g = spec(r#"{"start":1e-6,"stop":1e-2,"num":5,"log":true}"#).values("x").unwrap();
        assert!((g[2] - 1e-4).abs() < 1e-18);
    }

    #[test]
    fn empty_and_invalid() {
        assert_eq!(spec(r#"{"start":0,"stop":1,"num":0}"#).values("x").unwrap_err().code, 4);
        assert_eq!(spec("[]").values("x").unwrap_err().code, 4);
        assert_eq!(spec(r#"{"start":0,"stop":1,"num":3,"log":true}"#).values("x").unwrap_err().code, 4);
        assert!(serde_json::from_str::<GridSpec>(r#"{"start":0}"#).is_err());
    }
}
