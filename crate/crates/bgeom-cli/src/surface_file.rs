//! The JSON surface-description format.
//!
//! A file names a base surface (a preset or raw lattice data), an
//! ordered list of blow-ups, and optionally a contraction and a pair
//! section. Parsing is strict: unknown fields are rejected, rationals
//! are `p/q` strings (plain integers are also accepted, floats never),
//! and `parse ∘ serialize ∘ parse` is the identity.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use bgeom::lattice::{build_model, BaseSurface, BlowupCenter, SurfaceModel};
use bgeom::pairs::{Carrier, GenPair};
use bgeom::rat::{format_rat, parse_rat, rint, Rat};
use bgeom::Contraction;

use crate::CliError;

/// A rational that serializes as a canonical `p/q` string.
#[derive(Debug, Clone, PartialEq)]
pub struct RatStr(pub Rat);

impl Serialize for RatStr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rat(&self.0))
    }
}

impl<'de> Deserialize<'de> for RatStr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = RatStr;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational as \"p/q\" or an integer")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<RatStr, E> {
                parse_rat(v).map(RatStr).map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<RatStr, E> {
                Ok(RatStr(rint(v)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<RatStr, E> {
                Ok(RatStr(Rat::from_integer(v.into())))
            }
            fn visit_f64<E: de::Error>(self, _: f64) -> Result<RatStr, E> {
                Err(E::custom("floating point rationals are not accepted"))
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceFile {
    pub version: u32,
    pub base: BaseSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub blowups: Vec<BlowupSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contraction: Option<ContractionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<PairSpec>,
}

/// Either `preset` (with `n` where the family needs it) or `raw`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw: Option<RawBaseSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawBaseSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis_names: Option<Vec<String>>,
    pub gram: Vec<Vec<RatStr>>,
    pub canonical: Vec<RatStr>,
    pub curves: Vec<RawCurveSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCurveSpec {
    pub name: String,
    pub class: Vec<RatStr>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlowupSpec {
    pub multiplicities: BTreeMap<String, u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractionSpec {
    pub curves: Vec<String>,
    pub log_resolution: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub boundary: BTreeMap<String, RatStr>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub nef_part: BTreeMap<String, RatStr>,
    pub cartier_index: u32,
}

/// Engine objects assembled from a parsed file.
#[derive(Debug)]
pub struct Built {
    pub model: SurfaceModel,
    pub contraction: Option<Contraction>,
}

/// Model-rank cap, read from `BGEOM_MAX_RANK` (default 64).
pub fn max_rank() -> usize {
    std::env::var("BGEOM_MAX_RANK")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(64)
}

impl SurfaceFile {
    pub fn parse(bytes: &[u8]) -> Result<SurfaceFile, CliError> {
        let text = std::str::from_utf8(bytes)
            .map_err(|_| CliError::Parse("input is not valid UTF-8".to_string()))?;
        serde_json::from_str(text)
            .map_err(|e| CliError::Parse(format!("invalid surface file: {e}")))
    }

    /// Canonical serialization: sorted keys, `p/q` rationals, no
    /// insignificant fields.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(self).expect("surface files always serialize")
    }

    fn base_surface(&self) -> Result<BaseSurface, CliError> {
        match (&self.base.preset, &self.base.raw) {
            (Some(_), Some(_)) => Err(CliError::Parse(
                "base must have either `preset` or `raw`, not both".to_string(),
            )),
            (None, None) => Err(CliError::Parse(
                "base requires `preset` or `raw`".to_string(),
            )),
            (Some(preset), None) => {
                let need_n = || {
                    self.base.n.ok_or_else(|| {
                        CliError::Parse(format!("preset `{preset}` requires the parameter `n`"))
                    })
                };
                match preset.as_str() {
                    "P2" => {
                        if self.base.n.is_some() {
                            return Err(CliError::Parse(
                                "preset `P2` takes no parameter".to_string(),
                            ));
                        }
                        Ok(BaseSurface::p2())
                    }
                    "Fn" => Ok(BaseSurface::hirzebruch(need_n()?)),
                    "ruled1" => Ok(BaseSurface::ruled_genus1(need_n()?)),
                    other => Err(CliError::Parse(format!("unknown preset `{other}`"))),
                }
            }
            (None, Some(raw)) => {
                if self.base.n.is_some() {
                    return Err(CliError::Parse(
                        "raw bases take no parameter `n`".to_string(),
                    ));
                }
                let gram = raw
                    .gram
                    .iter()
                    .map(|row| row.iter().map(|r| r.0.clone()).collect())
                    .collect();
                let canonical = raw.canonical.iter().map(|r| r.0.clone()).collect();
                let curves = raw
                    .curves
                    .iter()
                    .map(|c| {
                        (
                            c.name.clone(),
                            c.class.iter().map(|r| r.0.clone()).collect(),
                        )
                    })
                    .collect();
                BaseSurface::raw(&raw.name, raw.basis_names.clone(), gram, canonical, curves)
                    .map_err(CliError::from)
            }
        }
    }

    /// Validates the file and assembles the engine model and contraction.
    pub fn build(&self) -> Result<Built, CliError> {
        if self.version != 1 {
            return Err(CliError::Parse(format!(
                "unsupported version {} (expected 1)",
                self.version
            )));
        }
        let base = self.base_surface()?;
        let rank = base.rank() + self.blowups.len();
        let cap = max_rank();
        if rank > cap {
            return Err(CliError::domain(
                "RankLimitExceeded",
                format!("model rank {rank} exceeds BGEOM_MAX_RANK = {cap}"),
            ));
        }
        let centers: Vec<BlowupCenter> = self
            .blowups
            .iter()
            .map(|b| BlowupCenter::new(b.multiplicities.clone()))
            .collect();
        let model = build_model(base, centers)?;
        let contraction = match &self.contraction {
            None => None,
            Some(spec) => {
                let names: Vec<&str> = spec.curves.iter().map(|s| s.as_str()).collect();
                Some(Contraction::new(&model, &names, spec.log_resolution)?)
            }
        };
        Ok(Built { model, contraction })
    }

    /// The carrier implied by the file: the contraction when present,
    /// otherwise the smooth model.
    pub fn carrier(&self, built: &Built) -> Carrier {
        match &built.contraction {
            Some(c) => Carrier::Contracted(c.clone()),
            None => Carrier::Smooth(built.model.clone()),
        }
    }

    /// Assembles the pair section (empty boundary, zero nef part and
    /// Cartier index 1 when the section is absent).
    pub fn gen_pair(&self, built: &Built) -> Result<GenPair, CliError> {
        let (boundary, nef_part, index) = match &self.pair {
            None => (BTreeMap::new(), built.model.zero_divisor(), 1),
            Some(spec) => {
                let boundary: BTreeMap<String, Rat> = spec
                    .boundary
                    .iter()
                    .map(|(k, v)| (k.clone(), v.0.clone()))
                    .collect();
                let mut nef = built.model.zero_divisor();
                for (name, coeff) in &spec.nef_part {
                    let class = built.model.resolve_name(name).ok_or_else(|| {
                        CliError::from(bgeom::Error::UnknownCurveName(name.clone()))
                    })?;
                    nef = &nef + &class.scale(&coeff.0);
                }
                (boundary, nef, spec.cartier_index)
            }
        };
        GenPair::new(self.carrier(built), boundary, nef_part, index).map_err(CliError::from)
    }
}
