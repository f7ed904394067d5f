//! Bounds on the minimal `c₂` of an Azumaya algebra with a prescribed
//! generic division algebra, for minimal surfaces of general type.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::formulas::{gkl_residue, gott_donaldson, leading_term, DEFAULT_Z_TRUNC};
use crate::lattice::MuRClass;
use crate::surface::{SurfaceData, Tag};

/// Where a bound comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    ArtinDeJong,
    Theorem,
    ConjectureGott,
    Expectation,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::ArtinDeJong => "ARTIN-DE-JONG",
            Provenance::Theorem => "THEOREM",
            Provenance::ConjectureGott => "CONJECTURE-GOTT",
            Provenance::Expectation => "EXPECTATION",
        }
    }

    fn for_rank(r: u32) -> Self {
        match r {
            2 => Provenance::Theorem,
            3 => Provenance::ConjectureGott,
            _ => Provenance::Expectation,
        }
    }
}

impl Serialize for Provenance {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

fn require_tag(s: &SurfaceData, tag: Tag, what: &str) -> Result<()> {
    if s.has_tag(tag) {
        Ok(())
    } else {
        let name = serde_json::to_value(tag).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
        Err(Error::Validation(vec![format!("{what} needs the surface to be tagged {name}")]))
    }
}

/// `h⁰(ω^⊗r) = ½r(r−1)K² + χ` for a minimal surface of general type.
pub fn plurigenus(r: i64, k2: i64, chi: i64) -> i64 {
    r * (r - 1) / 2 * k2 + chi
}

/// [`plurigenus`] for a surface, refusing when it is not tagged minimal of general type.
pub fn plurigenus_of(s: &SurfaceData, r: i64) -> Result<i64> {
    require_tag(s, Tag::MinimalGeneralType, "the plurigenus formula")?;
    Ok(plurigenus(r, s.k_squared(), s.chi))
}

/// `max{r²χ − h⁰(ω^⊗r) − 1, 0}`.
pub fn adj_lower(r: i64, chi: i64, k2: i64) -> i64 {
    (r * r * chi - plurigenus(r, k2, chi) - 1).max(0)
}

/// [`adj_lower`] for a surface, refusing when it is not tagged minimal of general type.
pub fn adj_lower_of(s: &SurfaceData, r: i64) -> Result<i64> {
    require_tag(s, Tag::MinimalGeneralType, "the lower bound")?;
    Ok(adj_lower(r, s.chi, s.k_squared()))
}

/// `δ + (r²−1)χ`.
pub fn upper_from_delta(r: i64, chi: i64, delta: i64) -> i64 {
    delta + (r * r - 1) * chi
}

/// The upper bound predicted from the parity of the leading term: `(r²−1)χ`,
/// plus one for even `r` when `w·K + χ` is odd.
pub fn closed_form_upper(r: i64, chi: i64, w_dot_k: i64) -> i64 {
    let bump = if r % 2 == 0 { (w_dot_k + chi).rem_euclid(2) } else { 0 };
    (r * r - 1) * chi + bump
}

/// An upper bound, or `"unknown"` when no nonzero coefficient was found.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UpperBound {
    Known(i64),
    Unknown,
}

impl UpperBound {
    pub fn value(self) -> Option<i64> {
        match self {
            UpperBound::Known(v) => Some(v),
            UpperBound::Unknown => None,
        }
    }
}

impl Serialize for UpperBound {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            UpperBound::Known(v) => s.serialize_i64(*v),
            UpperBound::Unknown => s.serialize_str("unknown"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundProvenance {
    pub lower: Provenance,
    pub upper: Provenance,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct C2MinReport {
    pub r: u32,
    pub lower: i64,
    pub upper: UpperBound,
    /// `z`-order of the leading term of the Donaldson series at `L = K`, `u = 0`.
    pub delta: Option<i64>,
    /// Whether `δ` lies in the class `−(r−1)w² − (r²−1)χ mod 2r`.
    pub delta_in_residue_class: Option<bool>,
    pub closed_form_upper: i64,
    pub agrees_with_closed_form: bool,
    pub parity_case: String,
    pub provenance: BoundProvenance,
}

/// Runs the leading-term strategy for a minimal surface of general type.
///
/// Ranks 2 and 3 reproduce the stated bounds; ranks 4 to 6 are reported as
/// expectations only.
pub fn c2min_report(s: &SurfaceData, r: u32, w: &MuRClass) -> Result<C2MinReport> {
    require_tag(s, Tag::MinimalGeneralType, "the c2min report")?;
    require_tag(s, Tag::H20Positive, "the c2min report")?;
    if !(2..=6).contains(&r) {
        return Err(Error::InvalidArgument(format!("c2min report supports ranks 2 to 6, got {r}")));
    }
    let ri = r as i64;
    let chi = s.chi;
    let lower = adj_lower(ri, chi, s.k_squared());
    let w_k = s.lattice.pair_mod(&s.canonical, w)? as i64;
    let k = s.canonical.clone();
    let donaldson = gott_donaldson(s, r, w, &k, DEFAULT_Z_TRUNC, 0)?;
    let closed = closed_form_upper(ri, chi, w_k);
    let (delta, upper) = match leading_term(&donaldson.series) {
        Ok((order, _)) => {
            let d = order as i64;
            (Some(d), UpperBound::Known(upper_from_delta(ri, chi, d)))
        }
        Err(Error::NoLeadingTerm(_)) => (None, UpperBound::Unknown),
        Err(e) => return Err(e),
    };
    let residue = gkl_residue(&s.lattice, r, w, chi)?;
    let parity_case = if r % 2 == 0 {
        format!("w.K + chi = {} mod 2", (w_k + chi).rem_euclid(2))
    } else {
        format!("w.K = {w_k} mod {r}, chi = {} mod 2", chi.rem_euclid(2))
    };
    Ok(C2MinReport {
        r,
        lower,
        upper,
        delta,
        delta_in_residue_class: delta.map(|d| d.rem_euclid(2 * ri) == residue),
        closed_form_upper: closed,
        agrees_with_closed_form: upper == UpperBound::Known(closed),
        parity_case,
        provenance: BoundProvenance { lower: Provenance::ArtinDeJong, upper: Provenance::for_rank(r) },
    })
}
