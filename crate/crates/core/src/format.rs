//! Versioned JSON files for families, sets and prediction sheets.
//!
//! Every file carries a `schema` tag; readers reject unknown tags and report
//! the path of the offending field.

use std::fmt;

use num_rational::Ratio;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::constructions::Predictions;
use crate::subset_sums::Measure;
use crate::error::TypeError;
use crate::types::{ConstraintFamily, IntegerSet, ResidueConstraint};

pub const FAMILY_SCHEMA: &str = "sievelab/family/v1";
pub const SET_SCHEMA: &str = "sievelab/set/v1";
pub const PREDICTIONS_SCHEMA: &str = "sievelab/predictions/v1";
pub const MEASURE_SCHEMA: &str = "sievelab/measure/v1";

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("at `{path}`: {message}")]
    Field { path: String, message: String },
    #[error("schema `{found}` where `{expected}` was expected")]
    Schema { expected: &'static str, found: String },
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error("cannot write JSON: {0}")]
    Write(#[from] serde_json::Error),
}

/// Exponents as `"num/den"` strings.
pub mod ratio_str {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Ratio<u64>, D::Error> {
        let text = String::deserialize(d)?;
        parse_ratio(&text).map_err(serde::de::Error::custom)
    }
}

/// Parses `"a/b"` or `"a"`.
pub fn parse_ratio(text: &str) -> Result<Ratio<u64>, String> {
    let bad = || format!("expected a fraction like \"2/5\", got {text:?}");
    let (n, d) = match text.trim().split_once('/') {
        Some((n, d)) => (n.trim().parse::<u64>().map_err(|_| bad())?, d.trim().parse::<u64>().map_err(|_| bad())?),
        None => (text.trim().parse::<u64>().map_err(|_| bad())?, 1),
    };
    if d == 0 {
        return Err(bad());
    }
    Ok(Ratio::new(n, d))
}

/// Deserializes any JSON document, reporting failures with the field path.
pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T, FormatError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        FormatError::Field { path, message: e.into_inner().to_string() }
    })
}

fn check_schema(found: &str, expected: &'static str) -> Result<(), FormatError> {
    if found == expected {
        Ok(())
    } else {
        Err(FormatError::Schema { expected, found: found.to_string() })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyFile {
    pub schema: String,
    pub n_max: u64,
    #[serde(with = "ratio_str")]
    pub epsilon: Ratio<u64>,
    pub y_range: (u64, u64),
    pub constraints: Vec<ResidueConstraint>,
}

impl From<&ConstraintFamily> for FamilyFile {
    fn from(f: &ConstraintFamily) -> Self {
        FamilyFile {
            schema: FAMILY_SCHEMA.into(),
            n_max: f.n_max(),
            epsilon: f.epsilon(),
            y_range: (f.y_low(), f.y_high()),
            constraints: f.constraints().to_vec(),
        }
    }
}

/// One constraint per line, so large families stay diffable.
pub fn family_to_json(f: &ConstraintFamily) -> Result<String, FormatError> {
    let file = FamilyFile::from(f);
    let mut out = format!(
        "{{\n  \"schema\": {},\n  \"n_max\": {},\n  \"epsilon\": \"{}\",\n  \"y_range\": [{}, {}],\n  \"constraints\": [",
        serde_json::to_string(&file.schema)?,
        file.n_max,
        RatioText(file.epsilon),
        file.y_range.0,
        file.y_range.1,
    );
    for (i, c) in file.constraints.iter().enumerate() {
        out.push_str(if i == 0 { "\n    " } else { ",\n    " });
        out.push_str(&serde_json::to_string(c)?);
    }
    out.push_str(if file.constraints.is_empty() { "]\n}\n" } else { "\n  ]\n}\n" });
    Ok(out)
}

pub fn family_from_json(text: &str) -> Result<ConstraintFamily, FormatError> {
    let file: FamilyFile = from_json(text)?;
    check_schema(&file.schema, FAMILY_SCHEMA)?;
    Ok(ConstraintFamily::new(file.n_max, file.epsilon, file.y_range.0, file.y_range.1, file.constraints)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SetFile {
    schema: String,
    n_max: u64,
    elements: Vec<u64>,
}

pub fn set_to_json(s: &IntegerSet) -> Result<String, FormatError> {
    let file = SetFile { schema: SET_SCHEMA.into(), n_max: s.n_max(), elements: s.elements().to_vec() };
    Ok(serde_json::to_string(&file)?)
}

/// Elements may arrive unsorted; duplicates are merged.
pub fn set_from_json(text: &str) -> Result<IntegerSet, FormatError> {
    let mut file: SetFile = from_json(text)?;
    check_schema(&file.schema, SET_SCHEMA)?;
    file.elements.sort_unstable();
    file.elements.dedup();
    Ok(IntegerSet::from_sorted(file.elements, file.n_max)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct PredictionsFile {
    schema: String,
    #[serde(flatten)]
    predictions: Predictions,
}

pub fn predictions_to_json(p: &Predictions) -> Result<String, FormatError> {
    Ok(serde_json::to_string_pretty(&PredictionsFile { schema: PREDICTIONS_SCHEMA.into(), predictions: p.clone() })?)
}

pub fn predictions_from_json(text: &str) -> Result<Predictions, FormatError> {
    let file: PredictionsFile = from_json(text)?;
    check_schema(&file.schema, PREDICTIONS_SCHEMA)?;
    Ok(file.predictions)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureFile {
    schema: String,
    p: u64,
    /// Exact weights as `"num/den"` strings.
    weights: Vec<String>,
}

/// Reads a measure and checks it against the modulus `p`.
pub fn measure_from_json(text: &str, p: u64) -> Result<Measure, FormatError> {
    let file: MeasureFile = from_json(text)?;
    check_schema(&file.schema, MEASURE_SCHEMA)?;
    if file.p != p || file.weights.len() as u64 != p {
        return Err(FormatError::Field {
            path: "weights".into(),
            message: format!("expected {p} weights for p = {p}, file has p = {} and {} weights", file.p, file.weights.len()),
        });
    }
    let weights = file
        .weights
        .iter()
        .enumerate()
        .map(|(i, w)| {
            w.trim().parse::<num_rational::BigRational>().map_err(|_| FormatError::Field {
                path: format!("weights[{i}]"),
                message: format!("not a fraction: {w:?}"),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Measure::new(weights).map_err(|e| FormatError::Field { path: "weights".into(), message: e.to_string() })
}

/// Shortened display of a ratio for reports.
pub struct RatioText(pub Ratio<u64>);

impl fmt::Display for RatioText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::construct_kap_nonunion;

    #[test]
    fn family_round_trip() {
        let out = construct_kap_nonunion(2, 10_000, 20_000, Ratio::new(1, 10)).unwrap();
        let text = family_to_json(&out.family).unwrap();
        assert!(text.contains("\"epsilon\": \"1/10\""));
        assert_eq!(family_from_json(&text).unwrap(), out.family);
        let p = predictions_to_json(&out.predicted).unwrap();
        assert_eq!(predictions_from_json(&p).unwrap(), out.predicted);
    }

    #[test]
    fn minimal_family_parses() {
        let f = family_from_json(r#"{"schema":"sievelab/family/v1","n_max":0,"epsilon":"1/4","y_range":[2,2],"constraints":[]}"#).unwrap();
        assert_eq!(f.n_max(), 0);
        assert!(f.constraints().is_empty());
    }

    #[test]
    fn errors_name_the_field() {
        let bad_p = r#"{"schema":"sievelab/family/v1","n_max":100,"epsilon":"1/4","y_range":[2,20],
            "constraints":[{"p":7,"parts":[{"start":0,"step":1,"len":2}]},{"p":9,"parts":[]}]}"#;
        match family_from_json(bad_p) {
            Err(FormatError::Field { path, .. }) => assert_eq!(path, "constraints[1].p"),
            other => panic!("{other:?}"),
        }
        let bad_eps = r#"{"schema":"sievelab/family/v1","n_max":1,"epsilon":"x","y_range":[2,2],"constraints":[]}"#;
        assert!(matches!(family_from_json(bad_eps), Err(FormatError::Field { path, .. }) if path == "epsilon"));
        let wrong = r#"{"schema":"sievelab/set/v1","n_max":1,"elements":[1]}"#;
        assert!(matches!(family_from_json(wrong), Err(FormatError::Field { .. }) | Err(FormatError::Schema { .. })));
        assert!(matches!(set_from_json(r#"{"schema":"sievelab/family/v1","n_max":1,"elements":[1]}"#), Err(FormatError::Schema { .. })));
    }

    #[test]
    fn sets_sort_on_read() {
        let s = set_from_json(r#"{"schema":"sievelab/set/v1","n_max":50,"elements":[9,3,3,40]}"#).unwrap();
        assert_eq!(s.elements(), &[3, 9, 40]);
        assert_eq!(set_from_json(&set_to_json(&s).unwrap()).unwrap(), s);
        assert!(matches!(set_from_json(r#"{"schema":"sievelab/set/v1","n_max":5,"elements":[9]}"#), Err(FormatError::Type(_))));
    }

    #[test]
    fn measures() {
        let m = measure_from_json(r#"{"schema":"sievelab/measure/v1","p":3,"weights":["1/2","0","1/2"]}"#, 3).unwrap();
        assert_eq!(m.weights().len(), 3);
        let bad = measure_from_json(r#"{"schema":"sievelab/measure/v1","p":3,"weights":["1/2","x","1/2"]}"#, 3);
        assert!(matches!(bad, Err(FormatError::Field { path, .. }) if path == "weights[1]"));
        assert!(measure_from_json(r#"{"schema":"sievelab/measure/v1","p":3,"weights":["1/2","1/3","1/2"]}"#, 3).is_err());
        assert!(measure_from_json(r#"{"schema":"sievelab/measure/v1","p":3,"weights":["1/2","1/2"]}"#, 3).is_err());
    }

    #[test]
    fn ratio_parsing() {
        assert_eq!(parse_ratio("2/5").unwrap(), Ratio::new(2, 5));
        assert_eq!(parse_ratio(" 3 ").unwrap(), Ratio::from_integer(3));
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("-1/2").is_err());
    }
}
