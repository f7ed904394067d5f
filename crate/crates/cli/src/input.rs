//! Turning command-line strings into surfaces, classes and vectors.

use std::fs;

use pglsl_core::lattice::{enumerate_mu_r, LatticeVector, MuRClass, DEFAULT_ENUMERATION_BUDGET};
use pglsl_core::surface::SurfaceData;
use pglsl_core::{Error, Result};

/// A preset name `mgt_chi{χ}_k{K²}` or a path to a descriptor file.
pub fn load_surface(spec: &str) -> Result<SurfaceData> {
    if let Some((chi, k2)) = parse_preset(spec) {
        return SurfaceData::preset_min_general_type(chi, k2);
    }
    let text = fs::read_to_string(spec).map_err(|e| Error::Parse(format!("cannot read surface `{spec}`: {e}")))?;
    let s = SurfaceData::from_json(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{spec}: {m}")),
        other => other,
    })?;
    s.ensure_valid()?;
    Ok(s)
}

fn parse_preset(spec: &str) -> Option<(i64, i64)> {
    let rest = spec.strip_prefix("mgt_chi")?;
    let (chi, k2) = rest.split_once("_k")?;
    Some((chi.parse().ok()?, k2.parse().ok()?))
}

pub fn parse_int_list(text: &str) -> Result<Vec<i64>> {
    let text = text.trim().trim_start_matches('[').trim_end_matches(']');
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|e| Error::Parse(format!("`{t}` is not an integer: {e}"))))
        .collect()
}

/// A lattice vector; `K` names the canonical class and `0` the zero vector.
pub fn parse_vector(text: &str, s: &SurfaceData) -> Result<LatticeVector> {
    let b = s.lattice.rank();
    match text.trim() {
        "K" => Ok(s.canonical.clone()),
        "0" => Ok(LatticeVector::zero(b)),
        other => {
            let v = parse_int_list(other)?;
            if v.len() != b {
                return Err(Error::Parse(format!("vector `{other}` has {} entries, lattice rank is {b}", v.len())));
            }
            Ok(LatticeVector(v))
        }
    }
}

/// A class mod `r`: an explicit list, `0`, `K`, `odd`/`even` (parity of
/// `w·K`, even `r` only), or `wk=<t>` (the first class with `w·K ≡ t`).
pub fn parse_class(text: &str, s: &SurfaceData, r: u32) -> Result<MuRClass> {
    let text = text.trim();
    let wanted = match text {
        "odd" | "even" => {
            if r % 2 != 0 {
                return Err(Error::Parse(format!("`--w {text}` needs an even rank, got {r}")));
            }
            Some((2, u32::from(text == "odd")))
        }
        _ => match text.strip_prefix("wk=") {
            Some(t) => {
                let t: i64 = t.parse().map_err(|e| Error::Parse(format!("`{text}`: {e}")))?;
                Some((r, t.rem_euclid(r as i64) as u32))
            }
            None => None,
        },
    };
    match wanted {
        Some((m, t)) => enumerate_mu_r(&s.lattice, r, DEFAULT_ENUMERATION_BUDGET)?
            .find(|w| {
                let k = s.lattice.pair_mod(&s.canonical, w).unwrap_or(u32::MAX);
                k != u32::MAX && k % m == t
            })
            .ok_or_else(|| {
                Error::InvalidArgument(format!("no class on this lattice has w.K = {t} mod {m}; use a larger lattice"))
            }),
        None => Ok(MuRClass::from_vector(&parse_vector(text, s)?, r)),
    }
}
