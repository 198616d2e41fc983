//! JSON forms of number fields and IFS.

use num_rational::BigRational;
use ssm_ball::Mag;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebraic::{AlgebraicError, FieldElement, NumberField, RootSelector};
use crate::ifs::{build_ifs, Ifs, IfsError, IfsInput, RatioSpec};
use crate::poly::IntPoly;
use crate::real::{ParseError, Real};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum IoError {
    #[error("InvalidJson: {0}")]
    InvalidJson(String),
    #[error("InvalidSpec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Algebraic(#[from] AlgebraicError),
    #[error(transparent)]
    Ifs(#[from] IfsError),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum RootJson {
    LargestReal,
    Interval([String; 2]),
}

/// `{"min_poly": [c0, …, cd], "root": "largest_real" | {"interval": [lo, hi]}}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FieldJson {
    pub min_poly: Vec<i64>,
    #[serde(default = "largest")]
    pub root: RootJson,
}

fn largest() -> RootJson {
    RootJson::LargestReal
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MapJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<String>,
    pub a: String,
}

/// `{"field": {…}, "r": "…", "maps": [{"l": 1, "a": "…"}], "probs": ["1/2", …]}`.
/// Each map gives either an exponent `l` of the common base `r` or its own `ratio`.
/// Missing probabilities default to uniform.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct IfsJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<String>,
    pub maps: Vec<MapJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probs: Option<Vec<String>>,
}

pub fn parse_rational(s: &str) -> Result<BigRational, IoError> {
    Real::parse(s, None)?
        .as_rational()
        .ok_or_else(|| IoError::InvalidSpec(format!("`{s}` is not a rational number")))
}

impl FieldJson {
    pub fn build(&self) -> Result<NumberField, IoError> {
        let sel = match &self.root {
            RootJson::LargestReal => RootSelector::LargestReal,
            RootJson::Interval([lo, hi]) => RootSelector::Interval(parse_rational(lo)?, parse_rational(hi)?),
        };
        Ok(NumberField::new(IntPoly::from_i64(&self.min_poly), sel)?)
    }

    /// Describes `field`, selecting `λ` by a narrow isolating interval with
    /// 35-digit decimal endpoints.
    pub fn describe(field: &NumberField) -> Self {
        let p = field.min_poly();
        let b = field.lambda_ball(160).add_error(Mag::pow2(-100));
        FieldJson {
            min_poly: p.coeffs().iter().map(|c| i64::try_from(c).expect("small coefficients")).collect(),
            root: if field.degree() == 1 {
                RootJson::LargestReal
            } else {
                RootJson::Interval([b.lower().to_sci_string(35), b.upper().to_sci_string(35)])
            },
        }
    }
}

/// `[c0, c1, …]` for a field element, or the rational itself.
pub fn element_string(a: &FieldElement) -> String {
    match a.as_rational() {
        Some(q) => q.to_string(),
        None => format!("[{}]", a.coords().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ")),
    }
}

fn real_string(x: &Real, field: Option<&NumberField>) -> String {
    if let Some(q) = x.as_rational() {
        return q.to_string();
    }
    if let Some(a) = field.and_then(|k| x.as_field_element(k)) {
        return element_string(&a);
    }
    x.to_string()
}

impl IfsJson {
    pub fn from_str(s: &str) -> Result<Self, IoError> {
        serde_json::from_str(s).map_err(|e| IoError::InvalidJson(e.to_string()))
    }

    pub fn to_input(&self) -> Result<IfsInput, IoError> {
        let field = self.field.as_ref().map(FieldJson::build).transpose()?;
        let k = field.as_ref();
        if self.maps.is_empty() {
            return Err(IoError::InvalidSpec("no maps".into()));
        }
        let translations = self.maps.iter().map(|m| Real::parse(&m.a, k)).collect::<Result<Vec<_>, _>>()?;
        let ratios = match &self.r {
            Some(r) => {
                let exponents = self
                    .maps
                    .iter()
                    .enumerate()
                    .map(|(i, m)| match (m.l, &m.ratio) {
                        (Some(l), None) if l > 0 => Ok(l),
                        _ => Err(IoError::InvalidSpec(format!("map {i} needs a positive `l` and no `ratio` when `r` is given"))),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                RatioSpec::Base { r: Real::parse(r, k)?, exponents }
            }
            None => RatioSpec::Ratios(
                self.maps
                    .iter()
                    .enumerate()
                    .map(|(i, m)| match (&m.ratio, m.l) {
                        (Some(s), None) => Ok(Real::parse(s, k)?),
                        _ => Err(IoError::InvalidSpec(format!("map {i} needs `ratio` when `r` is absent"))),
                    })
                    .collect::<Result<Vec<_>, _>>()?,
            ),
        };
        let n = self.maps.len() as i64;
        let probs = match &self.probs {
            Some(p) => p.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>()?,
            None => (0..n).map(|_| BigRational::new(1.into(), n.into())).collect(),
        };
        Ok(IfsInput { field, ratios, translations, probs })
    }

    pub fn build(&self) -> Result<Ifs, IoError> {
        Ok(build_ifs(self.to_input()?)?)
    }

    /// The validated IFS in common-base form.
    pub fn describe(ifs: &Ifs) -> Self {
        let k = ifs.field().filter(|k| k.degree() > 1);
        IfsJson {
            field: k.map(FieldJson::describe),
            r: Some(real_string(ifs.r(), k)),
            maps: ifs
                .exponents()
                .iter()
                .zip(ifs.translations())
                .map(|(&l, a)| MapJson { l: Some(l), ratio: None, a: real_string(a, k) })
                .collect(),
            probs: Some(ifs.probs().iter().map(|p| p.to_string()).collect()),
        }
    }
}

/// Parses an IFS from JSON text.
pub fn ifs_from_json(s: &str) -> Result<Ifs, IoError> {
    IfsJson::from_str(s)?.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_round_trips() {
        let s = r#"{"field":{"min_poly":[-1,-1,1],"root":"largest_real"},"r":"[-1, 1]",
            "maps":[{"l":1,"a":"0"},{"l":2,"a":"[0, 1]"}],"probs":["1/3","2/3"]}"#;
        let ifs = ifs_from_json(s).unwrap();
        assert_eq!(ifs.exponents(), &[1, 2]);
        let back = IfsJson::describe(&ifs);
        let again = back.build().unwrap();
        assert_eq!(again.exponents(), ifs.exponents());
        assert!((again.r().to_f64() - 0.6180339887).abs() < 1e-9);
        assert!((again.translations()[1].to_f64() - 1.6180339887).abs() < 1e-9);
        let text = serde_json::to_string(&back).unwrap();
        assert_eq!(IfsJson::from_str(&text).unwrap(), back);
    }

    #[test]
    fn raw_ratios_and_defaults() {
        let s = r#"{"maps":[{"ratio":"1/4","a":"0"},{"ratio":"1/2","a":"0.5"}]}"#;
        let ifs = ifs_from_json(s).unwrap();
        assert_eq!(ifs.exponents(), &[2, 1]);
        assert_eq!(ifs.probs()[0], BigRational::new(1.into(), 2.into()));
        let s = r#"{"maps":[{"l":1,"a":"0"}]}"#;
        assert!(matches!(ifs_from_json(s), Err(IoError::InvalidSpec(_))));
        let s = r#"{"r":"1/3","maps":[{"l":1,"a":"0"},{"l":1,"a":"2/3"}],"extra":1}"#;
        assert!(matches!(ifs_from_json(s), Err(IoError::InvalidJson(_))));
        let f = FieldJson { min_poly: vec![-1, -1, 1], root: RootJson::Interval(["1.6".into(), "1.7".into()]) };
        assert!((f.build().unwrap().lambda_f64() - 1.6180339887).abs() < 1e-9);
        let f = FieldJson { min_poly: vec![-1, -1, 1], root: RootJson::Interval(["-1".into(), "0".into()]) };
        assert!(f.build().is_err());
    }
}
