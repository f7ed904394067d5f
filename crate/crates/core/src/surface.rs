//! Surface data: `χ(O_X)`, the intersection lattice, the canonical class and
//! the Seiberg–Witten table, together with the descriptor file format.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{IntersectionLattice, LatticeVector};

/// Current descriptor schema version.
pub const SURFACE_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tag {
    MinimalGeneralType,
    H20Positive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SwEntry {
    pub class: LatticeVector,
    pub value: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceData {
    pub chi: i64,
    pub lattice: IntersectionLattice,
    pub canonical: LatticeVector,
    pub sw_table: Vec<SwEntry>,
    pub tags: BTreeSet<Tag>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    GramNotSymmetric,
    Dimension,
    WuCharacteristic,
    SwDegree,
    MinimalGeneralTypeTable,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::GramNotSymmetric => "gram symmetry",
            Self::Dimension => "dimension",
            Self::WuCharacteristic => "Wu check (K characteristic)",
            Self::SwDegree => "SW degree condition a^2 = a.K",
            Self::MinimalGeneralTypeTable => "minimal general type SW table",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.detail)
    }
}

impl SurfaceData {
    /// Minimal surface of general type with the given `χ` and `K²`.
    ///
    /// Odd `K²` uses the rank-1 lattice `(K²)` with `K = (1)`; even `K²` uses
    /// `diag(K² − 1, 1)` with `K = (1, 1)`. In both cases `K` is
    /// characteristic and the SW table is `{(0, 1), (K, (−1)^χ)}`.
    pub fn preset_min_general_type(chi: i64, k2: i64) -> Result<Self> {
        if chi < 1 || k2 < 1 {
            return Err(Error::InvalidArgument(format!(
                "minimal general type preset needs chi >= 1 and K^2 >= 1, got chi = {chi}, K^2 = {k2}"
            )));
        }
        let (lattice, canonical) = if k2 % 2 == 1 {
            (IntersectionLattice::diagonal(&[k2]), LatticeVector(vec![1]))
        } else {
            (IntersectionLattice::diagonal(&[k2 - 1, 1]), LatticeVector(vec![1, 1]))
        };
        Self::min_general_type_on(lattice, canonical, chi)
    }

    /// Minimal-general-type SW data on a caller-chosen lattice realization.
    pub fn min_general_type_on(lattice: IntersectionLattice, canonical: LatticeVector, chi: i64) -> Result<Self> {
        let b = lattice.rank();
        let sign = if chi.rem_euclid(2) == 0 { 1 } else { -1 };
        let s = Self {
            chi,
            sw_table: vec![
                SwEntry { class: LatticeVector::zero(b), value: 1 },
                SwEntry { class: canonical.clone(), value: sign },
            ],
            lattice,
            canonical,
            tags: [Tag::MinimalGeneralType, Tag::H20Positive].into_iter().collect(),
        };
        s.ensure_valid()?;
        Ok(s)
    }

    pub fn k_squared(&self) -> i64 {
        self.lattice.square(&self.canonical).expect("validated canonical class")
    }

    pub fn has_tag(&self, tag: Tag) -> bool {
        self.tags.contains(&tag)
    }

    /// SW table entries with nonzero invariant.
    pub fn basic_classes(&self) -> impl Iterator<Item = &SwEntry> {
        self.sw_table.iter().filter(|e| e.value != 0)
    }

    /// Every violated invariant; empty when the data is consistent.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let b = self.lattice.rank();
        if !self.lattice.is_symmetric() {
            out.push(Violation { kind: ViolationKind::GramNotSymmetric, detail: "gram matrix is not symmetric".into() });
        }
        if self.canonical.len() != b {
            out.push(Violation {
                kind: ViolationKind::Dimension,
                detail: format!("K has length {}, lattice rank is {b}", self.canonical.len()),
            });
            return out;
        }
        if !self.lattice.is_characteristic(&self.canonical).unwrap_or(false) {
            out.push(Violation {
                kind: ViolationKind::WuCharacteristic,
                detail: format!("K = {:?} is not characteristic", self.canonical.0),
            });
        }
        for e in &self.sw_table {
            if e.class.len() != b {
                out.push(Violation {
                    kind: ViolationKind::Dimension,
                    detail: format!("SW class {:?} has length {}, lattice rank is {b}", e.class.0, e.class.len()),
                });
                continue;
            }
            if e.value == 0 {
                continue;
            }
            let a2 = self.lattice.square(&e.class).unwrap();
            let ak = self.lattice.pair(&e.class, &self.canonical).unwrap();
            if a2 != ak {
                out.push(Violation {
                    kind: ViolationKind::SwDegree,
                    detail: format!("class {:?} has a^2 = {a2} but a.K = {ak}", e.class.0),
                });
            }
        }
        if self.has_tag(Tag::MinimalGeneralType) {
            let sign = if self.chi.rem_euclid(2) == 0 { 1 } else { -1 };
            let mut want: Vec<(LatticeVector, i64)> =
                vec![(LatticeVector::zero(b), 1), (self.canonical.clone(), sign)];
            let mut got: Vec<(LatticeVector, i64)> =
                self.basic_classes().map(|e| (e.class.clone(), e.value)).collect();
            want.sort();
            got.sort();
            // K = 0 never happens for general type, but keep the check honest.
            want.dedup_by(|a, b| a.0 == b.0);
            if want != got {
                out.push(Violation {
                    kind: ViolationKind::MinimalGeneralTypeTable,
                    detail: format!("expected basic classes {{0: 1, K: {sign}}}, found {} entries", got.len()),
                });
            }
        }
        out
    }

    /// Non-fatal observations.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.lattice.is_symmetric() && self.lattice.rank() > 0 && !self.lattice.is_unimodular() {
            w.push(format!("gram determinant is {}, not unimodular", self.lattice.determinant()));
        }
        w
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(v.iter().map(ToString::to_string).collect()))
        }
    }

    pub fn to_descriptor(&self) -> SurfaceDescriptor {
        SurfaceDescriptor {
            schema_version: SURFACE_SCHEMA_VERSION,
            chi: self.chi,
            gram: self.lattice.gram().to_vec(),
            canonical: self.canonical.0.clone(),
            sw: self.sw_table.iter().map(|e| SwRecord { a: e.class.0.clone(), val: e.value }).collect(),
            tags: self.tags.iter().copied().collect(),
        }
    }

    /// Builds surface data from a descriptor. The result is not validated.
    pub fn from_descriptor(d: &SurfaceDescriptor) -> Result<Self> {
        if d.schema_version != SURFACE_SCHEMA_VERSION {
            return Err(Error::Parse(format!(
                "unsupported surface schema_version {} (expected {SURFACE_SCHEMA_VERSION})",
                d.schema_version
            )));
        }
        let b = d.canonical.len();
        if d.gram.len() != b * b {
            return Err(Error::Parse(format!(
                "key `gram`: expected {} entries for rank {b} (from `K`), found {}",
                b * b,
                d.gram.len()
            )));
        }
        Ok(Self {
            chi: d.chi,
            lattice: IntersectionLattice::new(b, d.gram.clone())?,
            canonical: LatticeVector(d.canonical.clone()),
            sw_table: d.sw.iter().map(|r| SwEntry { class: LatticeVector(r.a.clone()), value: r.val }).collect(),
            tags: d.tags.iter().copied().collect(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_descriptor()).expect("descriptor serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let d: SurfaceDescriptor = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_descriptor(&d)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwRecord {
    pub a: Vec<i64>,
    pub val: i64,
}

/// On-disk surface descriptor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceDescriptor {
    pub schema_version: u32,
    pub chi: i64,
    /// Row-major Gram matrix.
    pub gram: Vec<i64>,
    #[serde(rename = "K")]
    pub canonical: Vec<i64>,
    pub sw: Vec<SwRecord>,
    #[serde(default)]
    pub tags: Vec<Tag>,
}
