//! JSON interchange format for networks.
//!
//! Schema:
//!
//! ```json
//! {
//!   "input_dim": 2,
//!   "hidden": [
//!     {"weights": [["1", "0"], ["-1", "0"], ["-1", "1"]],
//!      "biases": ["0", "0", "0"]}
//!   ],
//!   "output": {"weights": [["1", "-1", "1"]], "biases": ["0"]}
//! }
//! ```
//!
//! Scalars are `"p/q"`, integer, or finite-decimal strings (plain JSON
//! integers are also accepted on input). Serialization always emits the
//! canonical `"p"` / `"p/q"` form, so round-trips are byte-stable. A layer
//! with zero neurons carries an explicit `"in_dim"` field, since its shape
//! cannot be inferred from an empty weight matrix.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::affine::AffineMap;
use crate::network::ReluNetwork;
use crate::rational::{format_rational, parse_rational, Rational};
use crate::{Error, Result};

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawScalar {
    Int(i64),
    Text(String),
}

impl RawScalar {
    fn to_rational(&self) -> Result<Rational> {
        match self {
            RawScalar::Int(n) => Ok(Rational::from_integer((*n).into())),
            RawScalar::Text(t) => parse_rational(t),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RawLayer {
    weights: Vec<Vec<RawScalar>>,
    biases: Vec<RawScalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    in_dim: Option<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawNetwork {
    input_dim: usize,
    hidden: Vec<RawLayer>,
    output: RawLayer,
}

fn layer_to_raw(map: &AffineMap) -> RawLayer {
    RawLayer {
        weights: map
            .rows()
            .iter()
            .map(|row| row.iter().map(|w| RawScalar::Text(format_rational(w))).collect())
            .collect(),
        biases: map
            .biases()
            .iter()
            .map(|b| RawScalar::Text(format_rational(b)))
            .collect(),
        in_dim: if map.out_dim() == 0 {
            Some(map.in_dim())
        } else {
            None
        },
    }
}

fn layer_from_raw(raw: &RawLayer, what: &str) -> Result<AffineMap> {
    let weights: Vec<Vec<Rational>> = raw
        .weights
        .iter()
        .map(|row| row.iter().map(RawScalar::to_rational).collect())
        .collect::<Result<_>>()?;
    let biases: Vec<Rational> = raw.biases.iter().map(RawScalar::to_rational).collect::<Result<_>>()?;
    let in_dim = match (weights.first(), raw.in_dim) {
        (Some(row), _) => row.len(),
        (None, Some(dim)) => dim,
        (None, None) => {
            return Err(Error::MalformedDocument(format!(
                "{what} layer has no neurons and no in_dim field"
            )))
        }
    };
    AffineMap::new(weights, biases, in_dim)
        .map_err(|e| Error::MalformedDocument(format!("{what} layer: {e}")))
}

impl Serialize for ReluNetwork {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let raw = RawNetwork {
            input_dim: self.input_dim(),
            hidden: self.hidden().iter().map(layer_to_raw).collect(),
            output: layer_to_raw(self.output()),
        };
        raw.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for ReluNetwork {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = RawNetwork::deserialize(de)?;
        let hidden = raw
            .hidden
            .iter()
            .enumerate()
            .map(|(i, l)| layer_from_raw(l, &format!("hidden[{i}]")))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        let output = layer_from_raw(&raw.output, "output").map_err(D::Error::custom)?;
        ReluNetwork::new(raw.input_dim, hidden, output).map_err(D::Error::custom)
    }
}

/// Serializes a network to the interchange JSON, pretty-printed.
pub fn network_to_json(net: &ReluNetwork) -> String {
    serde_json::to_string_pretty(net).expect("network serialization cannot fail")
}

/// Parses a network from interchange JSON.
pub fn network_from_json(text: &str) -> Result<ReluNetwork> {
    serde_json::from_str(text).map_err(|e| Error::MalformedDocument(e.to_string()))
}
