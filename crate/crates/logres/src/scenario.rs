//! JSON input formats: scenario descriptions and blowup requests.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::algebra::poly::Rat;
use crate::charts::{Chart, Frame};
use crate::error::{Error, Result};

fn default_truncation() -> u64 {
    16
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VariableSpec {
    pub name: String,
    #[serde(default)]
    pub exceptional: bool,
}

/// Input scenario: adapted variables, morphism components as expressions,
/// and the working truncation degree for series computations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    pub variables: Vec<VariableSpec>,
    pub components: Vec<String>,
    #[serde(default = "default_truncation")]
    pub truncation_degree: u64,
    /// Optional rational probe points, each entry one value per variable,
    /// written as `p`, `-p` or `p/q`. Deterministic probes are generated
    /// when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probes: Option<Vec<Vec<String>>>,
}

/// A blowup request: the center as a list of coordinate names.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlowupRequest {
    pub center: Vec<String>,
}

/// Parses a rational written as `p`, `-p/q` or `p/q`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational `{s}`")))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational `{s}`")))?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in `{s}`")));
    }
    Ok(Rat::new(n, d))
}

impl Scenario {
    pub fn from_json(json: &str) -> Result<Scenario> {
        Ok(serde_json::from_str(json)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Validates the scenario and builds the root chart.
    pub fn root_chart(&self) -> Result<Chart> {
        if self.variables.is_empty() {
            return Err(Error::Unsupported("scenario has no variables".into()));
        }
        if self.components.is_empty() {
            return Err(Error::Unsupported("scenario has no components".into()));
        }
        let mut names = Vec::with_capacity(self.variables.len());
        for v in &self.variables {
            if v.name.is_empty() {
                return Err(Error::Parse("empty variable name".into()));
            }
            if names.contains(&v.name) {
                return Err(Error::Parse(format!("duplicate variable `{}`", v.name)));
            }
            names.push(v.name.clone());
        }
        let exceptional = self.variables.iter().map(|v| v.exceptional).collect();
        let frame = Frame::new(names, exceptional);
        let components = self
            .components
            .iter()
            .map(|s| frame.parse(s))
            .collect::<Result<Vec<_>>>()?;
        if components.iter().any(|c| c.is_zero()) {
            return Err(Error::Unsupported("zero component".into()));
        }
        Ok(Chart::new(frame, components, "root"))
    }

    /// Explicit probe points, when present, parsed and arity checked.
    pub fn parsed_probes(&self) -> Result<Option<Vec<Vec<Rat>>>> {
        let Some(raw) = &self.probes else {
            return Ok(None);
        };
        let n = self.variables.len();
        let mut out = Vec::with_capacity(raw.len());
        for row in raw {
            if row.len() != n {
                return Err(Error::Arity {
                    expected: n,
                    got: row.len(),
                });
            }
            out.push(row.iter().map(|s| parse_rat(s)).collect::<Result<Vec<_>>>()?);
        }
        Ok(Some(out))
    }
}

impl BlowupRequest {
    pub fn from_json(json: &str) -> Result<BlowupRequest> {
        Ok(serde_json::from_str(json)?)
    }

    /// Resolves the named center coordinates in a chart.
    pub fn resolve(&self, chart: &Chart) -> Result<Vec<usize>> {
        self.center
            .iter()
            .map(|n| chart.frame.index_of(n))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::rat_frac;

    #[test]
    fn scenario_roundtrip_and_chart() {
        let json = r#"{
            "variables": [
                {"name": "u", "exceptional": true},
                {"name": "v"},
                {"name": "w"}
            ],
            "components": ["u^2", "u^3*(v^2+u*w)", "u^4*v"],
            "truncation_degree": 16
        }"#;
        let sc = Scenario::from_json(json).unwrap();
        assert_eq!(sc.truncation_degree, 16);
        let chart = sc.root_chart().unwrap();
        assert_eq!(chart.n_vars(), 3);
        assert_eq!(chart.frame.exceptional, vec![true, false, false]);
        assert_eq!(chart.components.len(), 3);

        let back = Scenario::from_json(&sc.to_json().unwrap()).unwrap();
        assert_eq!(back.components, sc.components);
    }

    #[test]
    fn default_truncation_applies() {
        let sc = Scenario::from_json(
            r#"{"variables":[{"name":"u","exceptional":true}],"components":["u^2"]}"#,
        )
        .unwrap();
        assert_eq!(sc.truncation_degree, 16);
    }

    #[test]
    fn rejects_bad_scenarios() {
        let dup = r#"{"variables":[{"name":"u"},{"name":"u"}],"components":["u"]}"#;
        assert!(Scenario::from_json(dup).unwrap().root_chart().is_err());
        let none = r#"{"variables":[],"components":[]}"#;
        assert!(Scenario::from_json(none).unwrap().root_chart().is_err());
        let unknown = r#"{"variables":[{"name":"u"}],"components":["q^2"]}"#;
        assert!(Scenario::from_json(unknown).unwrap().root_chart().is_err());
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rat("3/4").unwrap(), rat_frac(3, 4));
        assert_eq!(parse_rat("-3/4").unwrap(), rat_frac(-3, 4));
        assert_eq!(parse_rat("5").unwrap(), rat_frac(5, 1));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn probes_are_arity_checked() {
        let sc = Scenario::from_json(
            r#"{"variables":[{"name":"u"},{"name":"v"}],
                "components":["u*v"],
                "probes":[["1/2","-1"],["0","3"]]}"#,
        )
        .unwrap();
        let probes = sc.parsed_probes().unwrap().unwrap();
        assert_eq!(probes.len(), 2);
        assert_eq!(probes[0][0], rat_frac(1, 2));

        let bad = Scenario::from_json(
            r#"{"variables":[{"name":"u"},{"name":"v"}],
                "components":["u*v"],
                "probes":[["1/2"]]}"#,
        )
        .unwrap();
        assert!(bad.parsed_probes().is_err());
    }

    #[test]
    fn blowup_request_resolves_names() {
        let sc = Scenario::from_json(
            r#"{"variables":[{"name":"u","exceptional":true},{"name":"v"}],
                "components":["u^2","u^3*v"]}"#,
        )
        .unwrap();
        let chart = sc.root_chart().unwrap();
        let req = BlowupRequest::from_json(r#"{"center":["u","v"]}"#).unwrap();
        assert_eq!(req.resolve(&chart).unwrap(), vec![0, 1]);
        let bad = BlowupRequest::from_json(r#"{"center":["u","z"]}"#).unwrap();
        assert!(bad.resolve(&chart).is_err());
    }
}
