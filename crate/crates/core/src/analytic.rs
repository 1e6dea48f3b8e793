//! Exact sizes of constructed classes, computed from the width schedule alone.

use num_bigint::BigUint;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelCounts {
    pub level: usize,
    #[serde(serialize_with = "big::ser")]
    pub points: BigUint,
    #[serde(serialize_with = "big::ser")]
    pub concepts: BigUint,
    /// `|A_i|`, headtail only.
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "big::ser_opt")]
    pub head_labelings: Option<BigUint>,
    /// `|B_i|`, headtail only.
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "big::ser_opt")]
    pub prefix_tuples: Option<BigUint>,
}

/// A named inequality and whether it holds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundCheck {
    pub name: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnalyticCounts {
    pub construction: String,
    pub levels: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(serialize_with = "big::ser_vec")]
    pub widths: Vec<BigUint>,
    pub paper_schedule: bool,
    pub per_level: Vec<LevelCounts>,
    #[serde(serialize_with = "big::ser")]
    pub domain_size: BigUint,
    #[serde(serialize_with = "big::ser")]
    pub class_size: BigUint,
    pub checks: Vec<BoundCheck>,
}

impl AnalyticCounts {
    pub fn check(&self, name: &str) -> Option<bool> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.holds)
    }

    pub fn failed_checks(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.holds).map(|c| c.name.as_str()).collect()
    }

    pub fn level_concepts(&self) -> Vec<BigUint> {
        self.per_level.iter().map(|l| l.concepts.clone()).collect()
    }
}

/// `floor(log2 n)` for `n >= 1`.
pub fn floor_log2(n: &BigUint) -> u64 {
    n.bits().saturating_sub(1)
}

/// An integer upper bound on `log2(log2 n)`: `log2 n < bits(n)`, so
/// `ceil(log2(bits(n)))` bounds it from above.
pub fn loglog2_upper(n: &BigUint) -> u64 {
    let b = n.bits().max(1);
    (b - 1).checked_ilog2().map_or(0, |l| l as u64 + 1)
}

/// Decimal-string (de)serialization for big integers.
pub(crate) mod big {
    use super::*;

    pub fn ser<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn ser_opt<S: Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => s.serialize_str(&v.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn ser_vec<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_string()))
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Num {
        Int(u64),
        Text(String),
    }

    impl Num {
        fn into_big<E: serde::de::Error>(self) -> Result<BigUint, E> {
            match self {
                Num::Int(n) => Ok(BigUint::from(n)),
                Num::Text(t) => t.parse().map_err(|_| E::custom(format!("bad integer {t:?}"))),
            }
        }
    }

    pub fn de_opt_vec<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<BigUint>>, D::Error> {
        let raw: Option<Vec<Num>> = Option::deserialize(d)?;
        raw.map(|v| v.into_iter().map(Num::into_big).collect()).transpose()
    }

    pub fn ser_opt_vec<S: Serializer>(v: &Option<Vec<BigUint>>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => ser_vec(v, s),
            None => s.serialize_none(),
        }
    }
}
