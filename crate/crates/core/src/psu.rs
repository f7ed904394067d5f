//! Assembly of `Σ_w ε_r^(c₁·w) VW_w(q)` from per-class series, either by
//! summing over every `w ∈ (Z/r)^b` or through the joint distribution of
//! `(c₁·w, K·w)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::cyclo::root_of_unity;
use crate::error::{Error, Result};
use crate::lattice::{character_counts, enumerate_mu_r, LatticeVector, MuRClass};
use crate::series::QSeries;
use crate::surface::SurfaceData;
use crate::{CycloNumber, Rational};

pub const TABLE_SCHEMA_VERSION: u32 = 1;

/// Per-class input series, keyed either by the full class or by `w·K mod r`.
#[derive(Clone, Debug, PartialEq)]
pub enum ClassSeriesTable {
    Full { r: u32, entries: BTreeMap<Vec<u32>, QSeries> },
    Collapsed { r: u32, entries: BTreeMap<u32, QSeries> },
}

impl ClassSeriesTable {
    pub fn r(&self) -> u32 {
        match self {
            ClassSeriesTable::Full { r, .. } | ClassSeriesTable::Collapsed { r, .. } => *r,
        }
    }

    /// Entry for `w` on surface `s`.
    pub fn lookup(&self, s: &SurfaceData, w: &MuRClass) -> Result<&QSeries> {
        match self {
            ClassSeriesTable::Full { entries, .. } => entries
                .get(w.entries())
                .ok_or_else(|| Error::Validation(vec![format!("table has no entry for class {:?}", w.entries())])),
            ClassSeriesTable::Collapsed { entries, .. } => {
                let t = s.lattice.pair_mod(&s.canonical, w)?;
                entries.get(&t).ok_or_else(|| Error::Validation(vec![format!("table has no entry for w.K = {t}")]))
            }
        }
    }

    pub fn to_json(&self) -> String {
        let file = match self {
            ClassSeriesTable::Full { r, entries } => TableFile {
                schema_version: TABLE_SCHEMA_VERSION,
                r: *r,
                full: Some(entries.iter().map(|(w, s)| FullEntry { w: w.clone(), series: s.clone(), note: None }).collect()),
                collapsed: None,
            },
            ClassSeriesTable::Collapsed { r, entries } => TableFile {
                schema_version: TABLE_SCHEMA_VERSION,
                r: *r,
                full: None,
                collapsed: Some(
                    entries.iter().map(|(t, s)| CollapsedEntry { wk: *t, series: s.clone(), note: None }).collect(),
                ),
            },
        };
        serde_json::to_string_pretty(&file).expect("table serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: TableFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if file.schema_version != TABLE_SCHEMA_VERSION {
            return Err(Error::Parse(format!("unsupported table schema_version {}", file.schema_version)));
        }
        let r = file.r;
        if r < 2 {
            return Err(Error::Parse(format!("table rank must be at least 2, got {r}")));
        }
        match (file.full, file.collapsed) {
            (Some(list), None) => {
                let mut entries = BTreeMap::new();
                for e in list {
                    if let Some(x) = e.w.iter().find(|&&x| x >= r) {
                        return Err(Error::Parse(format!("class entry {x} is not reduced mod {r}")));
                    }
                    if entries.insert(e.w.clone(), e.series).is_some() {
                        return Err(Error::Parse(format!("duplicate class {:?}", e.w)));
                    }
                }
                Ok(ClassSeriesTable::Full { r, entries })
            }
            (None, Some(list)) => {
                let mut entries = BTreeMap::new();
                for e in list {
                    if e.wk >= r {
                        return Err(Error::Parse(format!("key wk = {} is not reduced mod {r}", e.wk)));
                    }
                    if entries.insert(e.wk, e.series).is_some() {
                        return Err(Error::Parse(format!("duplicate key wk = {}", e.wk)));
                    }
                }
                Ok(ClassSeriesTable::Collapsed { r, entries })
            }
            _ => Err(Error::Parse("table needs exactly one of the keys full, collapsed".into())),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableFile {
    schema_version: u32,
    r: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    full: Option<Vec<FullEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    collapsed: Option<Vec<CollapsedEntry>>,
}

/// `note` is free text, e.g. marking a class with trivial Brauer class.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FullEntry {
    w: Vec<u32>,
    series: QSeries,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CollapsedEntry {
    wk: u32,
    series: QSeries,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

pub fn is_prime(r: u32) -> bool {
    r >= 2 && (2..r).take_while(|d| d * d <= r).all(|d| r % d != 0)
}

fn accumulate(acc: Option<QSeries>, term: QSeries) -> Result<Option<QSeries>> {
    Ok(Some(match acc {
        None => term,
        Some(a) => a.add(&term)?,
    }))
}

fn check_inputs(s: &SurfaceData, r: u32, c1: &LatticeVector, table: &ClassSeriesTable) -> Result<()> {
    if table.r() != r {
        return Err(Error::InvalidArgument(format!("table is for rank {} but rank {r} was requested", table.r())));
    }
    if c1.len() != s.lattice.rank() {
        return Err(Error::DimensionMismatch { expected: s.lattice.rank(), got: c1.len() });
    }
    Ok(())
}

/// `Σ_{w ∈ (Z/r)^b} ε_r^(c₁·w) · table[w]`, enumerating every class.
pub fn psu_bruteforce(
    s: &SurfaceData,
    r: u32,
    c1: &LatticeVector,
    table: &ClassSeriesTable,
    budget: u64,
) -> Result<QSeries> {
    check_inputs(s, r, c1, table)?;
    let conductor = 4 * r;
    let mut acc = None;
    for w in enumerate_mu_r(&s.lattice, r, budget)? {
        let e = s.lattice.pair_mod(c1, &w)?;
        let eps = root_of_unity(r, e as i64).embed(conductor)?;
        acc = accumulate(acc, table.lookup(s, &w)?.scale(&eps))?;
    }
    acc.ok_or_else(|| Error::InvalidArgument("empty class sum".into()))
}

/// `Σ_{s,t} N(s,t) · ε_r^s · table[t]` with `N` the joint count of
/// `(c₁·w, K·w) mod r`. Equals [`psu_bruteforce`] whenever the full table
/// factors through `w·K`.
pub fn psu_reduced(s: &SurfaceData, r: u32, c1: &LatticeVector, table: &BTreeMap<u32, QSeries>) -> Result<QSeries> {
    if c1.len() != s.lattice.rank() {
        return Err(Error::DimensionMismatch { expected: s.lattice.rank(), got: c1.len() });
    }
    let conductor = 4 * r;
    let counts = character_counts(&s.lattice, r, c1, &s.canonical)?;
    let mut by_t: BTreeMap<u32, CycloNumber> = BTreeMap::new();
    for (&(sv, t), n) in &counts.counts {
        let weight = root_of_unity(r, sv as i64)
            .embed(conductor)?
            .scale(&Rational::from_integer(BigInt::from(n.clone())));
        let slot = by_t.entry(t).or_insert_with(|| CycloNumber::zero_in(conductor));
        *slot += &weight;
    }
    let mut acc = None;
    for (t, weight) in by_t {
        let f = table
            .get(&t)
            .ok_or_else(|| Error::Validation(vec![format!("collapsed table has no entry for w.K = {t}")]))?;
        acc = accumulate(acc, f.scale(&weight))?;
    }
    acc.ok_or_else(|| Error::InvalidArgument("empty class sum".into()))
}
