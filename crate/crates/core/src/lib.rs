//! Graph similarity through the maximum weighted co-k-plex relaxation of
//! maximum common subgraph matching.
//!
//! Two labelled graphs are compared by building their conflict graph
//! ([`conflict`]), turning it into a pseudo-Boolean objective ([`qubo`]),
//! solving that exactly ([`solve`]) and scoring the selection
//! ([`similarity`]). [`molgraph`] turns molecule files into ring-contracted
//! labelled graphs, and [`classify`] runs weighted κ-NN mutagenicity
//! prediction with cross-validation on top of the similarity.

pub mod classify;
pub mod cli;
pub mod conflict;
pub mod error;
pub mod molgraph;
pub mod qubo;
pub mod similarity;
pub mod solve;
pub mod synth;

pub use error::{Error, Result};

/// Serde for distance thresholds: finite values as numbers, `+∞` as `"inf"`.
pub(crate) mod threshold_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_str("inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.to_ascii_lowercase().as_str() {
                "inf" | "infinity" | "+inf" => Ok(f64::INFINITY),
                other => Err(serde::de::Error::custom(format!("invalid distance threshold {other:?}"))),
            },
        }
    }
}
