//! Material sidecar files.
//!
//! ```toml
//! # optional, Hz; defaults to [0, 176, 775, 3408, 22050]
//! bands = [0, 176, 775, 3408, 22050]
//!
//! [materials]
//! wall = [0.10, 0.15, 0.20, 0.25]
//! floor = [0.05, 0.05, 0.10, 0.10]
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const NUM_BANDS: usize = 4;

pub const DEFAULT_BAND_EDGES: [f64; NUM_BANDS + 1] = [0.0, 176.0, 775.0, 3408.0, 22050.0];

/// Frequency band edges in Hz; five strictly increasing edges bound four bands.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandLayout {
    pub edges: [f64; NUM_BANDS + 1],
}

impl Default for BandLayout {
    fn default() -> Self {
        BandLayout { edges: DEFAULT_BAND_EDGES }
    }
}

impl BandLayout {
    pub fn new(edges: [f64; NUM_BANDS + 1]) -> Result<BandLayout> {
        if edges.iter().any(|e| !e.is_finite()) || edges.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Materials(format!("band edges must be finite and strictly increasing: {edges:?}")));
        }
        Ok(BandLayout { edges })
    }

    pub fn len(&self) -> usize {
        NUM_BANDS
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub name: String,
    /// Energy absorption per band, each in `[0, 1)`.
    pub absorption: [f64; NUM_BANDS],
}

impl Material {
    pub fn new(name: impl Into<String>, absorption: [f64; NUM_BANDS]) -> Result<Material> {
        let name = name.into();
        if let Some(a) = absorption.iter().find(|a| !(0.0..1.0).contains(*a)) {
            return Err(Error::Materials(format!("material `{name}`: absorption {a} outside [0, 1)")));
        }
        Ok(Material { name, absorption })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaterialTable {
    pub bands: BandLayout,
    /// Sorted by name.
    pub materials: Vec<Material>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTable {
    bands: Option<Vec<f64>>,
    materials: BTreeMap<String, Vec<f64>>,
}

impl MaterialTable {
    pub fn parse(text: &str) -> Result<MaterialTable> {
        let raw: RawTable = toml::from_str(text).map_err(|e| Error::Materials(e.to_string()))?;
        let bands = match raw.bands {
            None => BandLayout::default(),
            Some(edges) => {
                let edges: [f64; NUM_BANDS + 1] = edges
                    .try_into()
                    .map_err(|v: Vec<f64>| Error::Materials(format!("expected 5 band edges, got {}", v.len())))?;
                BandLayout::new(edges)?
            }
        };
        let materials = raw
            .materials
            .into_iter()
            .map(|(name, coeffs)| {
                let absorption: [f64; NUM_BANDS] = coeffs.try_into().map_err(|v: Vec<f64>| {
                    Error::Materials(format!("material `{name}`: expected {NUM_BANDS} coefficients, got {}", v.len()))
                })?;
                Material::new(name, absorption)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MaterialTable { bands, materials })
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.materials.iter().position(|m| m.name == name)
    }

    pub fn to_toml(&self) -> String {
        let mut out = String::new();
        if self.bands != BandLayout::default() {
            out.push_str(&format!("bands = {:?}\n\n", self.bands.edges));
        }
        out.push_str("[materials]\n");
        for m in &self.materials {
            out.push_str(&format!("{} = {:?}\n", m.name, m.absorption));
        }
        out
    }
}
