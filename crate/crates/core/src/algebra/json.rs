use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::cla::C64;

use super::{AlgebraError, AlgebraTensor};

/// `{"dim": n, "terms": [{"i": 1, "j": 1, "k": 2, "c": [re, im]}, ...]}` with
/// one-based indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonAlgebra {
    pub dim: usize,
    pub terms: Vec<JsonTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonTerm {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub c: [f64; 2],
}

impl TryFrom<&JsonAlgebra> for AlgebraTensor {
    type Error = AlgebraError;

    fn try_from(doc: &JsonAlgebra) -> Result<Self, AlgebraError> {
        let n = doc.dim;
        let mut seen = HashSet::new();
        let mut terms = Vec::with_capacity(doc.terms.len());
        for t in &doc.terms {
            let key = (t.i, t.j, t.k);
            if t.i == 0 || t.j == 0 || t.k == 0 || t.i > n || t.j > n || t.k > n {
                return Err(AlgebraError::IndexOutOfRange { dim: n, index: key });
            }
            if !seen.insert(key) {
                return Err(AlgebraError::DuplicateTerm(key));
            }
            terms.push((t.i - 1, t.j - 1, t.k - 1, C64::new(t.c[0], t.c[1])));
        }
        AlgebraTensor::from_terms(n, &terms)
    }
}

impl From<&AlgebraTensor> for JsonAlgebra {
    fn from(t: &AlgebraTensor) -> Self {
        JsonAlgebra {
            dim: t.dim(),
            terms: t
                .terms()
                .into_iter()
                .map(|(i, j, k, c)| JsonTerm {
                    i: i + 1,
                    j: j + 1,
                    k: k + 1,
                    c: [c.re, c.im],
                })
                .collect(),
        }
    }
}

pub fn parse_json(text: &str) -> Result<AlgebraTensor, AlgebraError> {
    let doc: JsonAlgebra = serde_json::from_str(text).map_err(|e| AlgebraError::Json(e.to_string()))?;
    AlgebraTensor::try_from(&doc)
}

pub fn to_json_value(t: &AlgebraTensor) -> serde_json::Value {
    serde_json::to_value(JsonAlgebra::from(t)).expect("algebra JSON is always serializable")
}

pub fn to_json(t: &AlgebraTensor) -> String {
    serde_json::to_string(&JsonAlgebra::from(t)).expect("algebra JSON is always serializable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_d5() {
        let t = parse_json(r#"{"dim":2,"terms":[{"i":1,"j":1,"k":2,"c":[1,0]}]}"#).unwrap();
        assert_eq!(t, AlgebraTensor::from_unit_terms(2, &[(1, 1, 2)]));
    }

    #[test]
    fn serializes_d22_at_one_one() {
        let t = AlgebraTensor::from_unit_terms(3, &[(1, 2, 3), (2, 1, 3)]);
        assert_eq!(
            to_json(&t),
            r#"{"dim":3,"terms":[{"i":1,"j":2,"k":3,"c":[1.0,0.0]},{"i":2,"j":1,"k":3,"c":[1.0,0.0]}]}"#
        );
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(matches!(parse_json("{"), Err(AlgebraError::Json(_))));
        assert!(matches!(
            parse_json(r#"{"dim":2,"terms":[{"i":3,"j":1,"k":1,"c":[1,0]}]}"#),
            Err(AlgebraError::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            parse_json(r#"{"dim":2,"terms":[{"i":0,"j":1,"k":1,"c":[1,0]}]}"#),
            Err(AlgebraError::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            parse_json(
                r#"{"dim":2,"terms":[{"i":1,"j":1,"k":1,"c":[1,0]},{"i":1,"j":1,"k":1,"c":[2,0]}]}"#
            ),
            Err(AlgebraError::DuplicateTerm((1, 1, 1)))
        ));
    }

    proptest! {
        #[test]
        fn round_trip(n in 1usize..4, seed in proptest::collection::vec((0usize..64, -3i32..4, -3i32..4), 0..12)) {
            let mut doc = JsonAlgebra { dim: n, terms: Vec::new() };
            let mut seen = HashSet::new();
            for (ix, re, im) in seed {
                let (i, j, k) = (ix % n, (ix / n) % n, (ix / (n * n)) % n);
                if (re, im) == (0, 0) || !seen.insert((i, j, k)) {
                    continue;
                }
                doc.terms.push(JsonTerm { i: i + 1, j: j + 1, k: k + 1, c: [re as f64, im as f64] });
            }
            let text = serde_json::to_string(&doc).unwrap();
            let t = parse_json(&text).unwrap();
            let mut back = JsonAlgebra::from(&t);
            let key = |x: &JsonTerm| (x.i, x.j, x.k);
            doc.terms.sort_by_key(key);
            back.terms.sort_by_key(key);
            prop_assert_eq!(back, doc);
        }
    }
}
