use serde::{Deserialize, Serialize, Serializer};

use super::{ExactError, Poly, RatFunc, Rational, Var};

/// Wire form of a polynomial or rational function: ascending coefficients as
/// exact fraction strings such as `"3/4"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatFuncJson {
    pub variable: Var,
    pub num: Vec<String>,
    pub den: Vec<String>,
}

fn strings(p: &Poly) -> Vec<String> {
    p.coeffs().iter().map(|c| c.to_string()).collect()
}

fn parse(var: Var, cs: &[String]) -> Result<Poly, ExactError> {
    let coeffs = cs
        .iter()
        .map(|s| s.parse::<Rational>().map_err(|e| ExactError::Parse(format!("{s:?}: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Poly::from_coeffs(coeffs, var))
}

impl From<&RatFunc> for RatFuncJson {
    fn from(f: &RatFunc) -> Self {
        RatFuncJson { variable: f.var(), num: strings(f.num()), den: strings(f.den()) }
    }
}

impl From<&Poly> for RatFuncJson {
    fn from(p: &Poly) -> Self {
        RatFuncJson { variable: p.var(), num: strings(p), den: vec!["1".into()] }
    }
}

impl TryFrom<RatFuncJson> for RatFunc {
    type Error = ExactError;
    fn try_from(j: RatFuncJson) -> Result<Self, Self::Error> {
        RatFunc::new(parse(j.variable, &j.num)?, parse(j.variable, &j.den)?)
    }
}

impl Serialize for RatFunc {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RatFuncJson::from(self).serialize(s)
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RatFuncJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatFunc {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = RatFuncJson::deserialize(d)?;
        RatFunc::try_from(j).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let f = RatFunc::new(Poly::from_i64s(&[27, 1], Var::Disc), Poly::from_i64s(&[50, 2], Var::Disc)).unwrap();
        let text = serde_json::to_string(&f).unwrap();
        assert_eq!(text, r#"{"variable":"Z","num":["27/2","1/2"],"den":["25","1"]}"#);
        let back: RatFunc = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn zero_serializes_as_zero_over_one() {
        let z = RatFunc::zero(Var::S);
        assert_eq!(serde_json::to_string(&z).unwrap(), r#"{"variable":"s","num":[],"den":["1"]}"#);
    }
}
