//! Closed-form generating functions: the Euler-characteristic series built
//! from universal series `D₀, D_ij`, the rank-2 Donaldson series, and its
//! higher-rank sine/β generalization. Also leading-term extraction.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::cyclo::{b_constant, beta, root_of_unity, sin_of};
use crate::error::{Error, Result};
use crate::lattice::{IntersectionLattice, LatticeVector, MuRClass, DEFAULT_ENUMERATION_BUDGET};
use crate::series::{eta_product, z_exp, z_exp_linear, QSeries, UPoly, ZSeries};
use crate::surface::{SurfaceData, SwEntry};
use crate::{CycloNumber, Rational};

pub const DEFAULT_Z_TRUNC: usize = 10;
pub const DEFAULT_U_DEGREE: usize = 4;
/// Default q-truncation in whole powers of `q`.
pub const DEFAULT_Q_ORDER: i64 = 6;
pub const PACK_SCHEMA_VERSION: u32 = 1;

/// Exponent-numerator truncation for `order` whole powers of `q` at rank `r`.
pub fn q_trunc_for(r: u32, order: i64) -> i64 {
    order * 2 * r as i64
}

/// Universal series `D₀` and `D_ij` (`1 ≤ i ≤ j ≤ r−1`), all at denominator `2r`.
#[derive(Clone, Debug, PartialEq)]
pub struct UniversalSeriesPack {
    pub r: u32,
    pub d0: QSeries,
    pub dij: BTreeMap<(u32, u32), QSeries>,
}

impl UniversalSeriesPack {
    /// The pack with every series equal to `1`.
    pub fn unit(r: u32, trunc: i64) -> Self {
        let one = QSeries::one(2 * r, trunc);
        let mut dij = BTreeMap::new();
        for i in 1..r {
            for j in i..r {
                dij.insert((i, j), one.clone());
            }
        }
        Self { r, d0: one, dij }
    }

    pub fn get(&self, i: u32, j: u32) -> Option<&QSeries> {
        self.dij.get(&(i.min(j), i.max(j)))
    }

    pub fn validate(&self) -> Result<()> {
        if self.r < 2 {
            return Err(Error::InvalidArgument(format!("pack rank must be at least 2, got {}", self.r)));
        }
        let denom = 2 * self.r;
        let mut missing = Vec::new();
        for i in 1..self.r {
            for j in i..self.r {
                match self.dij.get(&(i, j)) {
                    None => missing.push(format!("D_{i}{j} missing")),
                    Some(s) if s.denom() != denom => {
                        missing.push(format!("D_{i}{j} has denominator {} instead of {denom}", s.denom()))
                    }
                    _ => {}
                }
            }
        }
        for &(i, j) in self.dij.keys() {
            if i == 0 || i > j || j >= self.r {
                missing.push(format!("unexpected entry D_{i}{j}"));
            }
        }
        if self.d0.denom() != denom {
            missing.push(format!("D0 has denominator {} instead of {denom}", self.d0.denom()));
        }
        if missing.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(missing))
        }
    }

    pub fn to_json(&self) -> String {
        let file = PackFile {
            schema_version: PACK_SCHEMA_VERSION,
            r: self.r,
            d0: self.d0.clone(),
            dij: self.dij.iter().map(|(&(i, j), s)| PackEntry { i, j, series: s.clone() }).collect(),
        };
        serde_json::to_string_pretty(&file).expect("pack serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: PackFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if file.schema_version != PACK_SCHEMA_VERSION {
            return Err(Error::Parse(format!("unsupported pack schema_version {}", file.schema_version)));
        }
        let mut dij = BTreeMap::new();
        for e in file.dij {
            if dij.insert((e.i, e.j), e.series).is_some() {
                return Err(Error::Parse(format!("duplicate entry D_{}{}", e.i, e.j)));
            }
        }
        let pack = Self { r: file.r, d0: file.d0, dij };
        pack.validate()?;
        Ok(pack)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PackFile {
    schema_version: u32,
    r: u32,
    #[serde(rename = "D0")]
    d0: QSeries,
    #[serde(rename = "Dij")]
    dij: Vec<PackEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PackEntry {
    i: u32,
    j: u32,
    series: QSeries,
}

/// Result of the Euler-characteristic evaluator.
#[derive(Clone, Debug, PartialEq)]
pub struct GklSeries {
    /// Residue `δ mod 2r` on which the right-hand side is meaningful.
    pub residue: i64,
    /// The right-hand side with every other residue class removed.
    pub series: QSeries,
    /// The unrestricted right-hand side.
    pub full: QSeries,
}

fn rational_pow(base: i64, exp: i64) -> Rational {
    let b = Rational::from_integer(base.into());
    if exp >= 0 {
        num_traits::pow(b, exp as usize)
    } else {
        num_traits::pow(b.recip(), exp.unsigned_abs() as usize)
    }
}

fn nonzero_basic_classes(s: &SurfaceData) -> Vec<&SwEntry> {
    s.basic_classes().collect()
}

/// Calls `f` on every `(r−1)`-tuple of basic-class indices.
fn for_each_assignment(n: usize, len: usize, mut f: impl FnMut(&[usize]) -> Result<()>) -> Result<()> {
    let total = (n as u128).checked_pow(len as u32).unwrap_or(u128::MAX);
    if total > DEFAULT_ENUMERATION_BUDGET as u128 {
        return Err(Error::BudgetExceeded { count: format!("{n}^{len}"), budget: DEFAULT_ENUMERATION_BUDGET });
    }
    if n == 0 && len > 0 {
        return Ok(());
    }
    let mut idx = vec![0usize; len];
    loop {
        f(&idx)?;
        let mut k = 0;
        loop {
            if k == len {
                return Ok(());
            }
            idx[k] += 1;
            if idx[k] < n {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

fn check_class(s: &SurfaceData, w: &MuRClass, r: u32) -> Result<()> {
    if w.modulus() != r {
        return Err(Error::InvalidArgument(format!("class is taken mod {} but rank is {r}", w.modulus())));
    }
    if w.entries().len() != s.lattice.rank() {
        return Err(Error::DimensionMismatch { expected: s.lattice.rank(), got: w.entries().len() });
    }
    Ok(())
}

/// `δ ≡ −(r−1)w² − (r²−1)χ (mod 2r)`, using any integral lift of `w`.
pub fn gkl_residue(lattice: &IntersectionLattice, r: u32, w: &MuRClass, chi: i64) -> Result<i64> {
    let r = r as i64;
    let w2 = lattice.square(&w.lift())?;
    Ok((-(r - 1) * w2 - (r * r - 1) * chi).rem_euclid(2 * r))
}

/// `r^(2+K²−χ) · Δ̄(q^(1/r))^(−χ/2) · D₀^(K²) · Σ_a Π_i ε_r^(i·a_i·w) SW(a_i) Π_{i≤j} D_ij^(a_i·a_j)`
/// at denominator `2r`, truncated below `q^(trunc/2r)`.
pub fn gkl_euler_series(
    s: &SurfaceData,
    r: u32,
    w: &MuRClass,
    pack: &UniversalSeriesPack,
    trunc: i64,
) -> Result<GklSeries> {
    s.ensure_valid()?;
    if pack.r != r {
        return Err(Error::InvalidArgument(format!("pack is for rank {} but rank {r} was requested", pack.r)));
    }
    pack.validate()?;
    check_class(s, w, r)?;
    let denom = 2 * r;
    let conductor = 4 * r;
    let chi = s.chi;
    let k2 = s.k_squared();

    let basics = nonzero_basic_classes(s);
    let pair_w: Vec<u32> = basics.iter().map(|e| s.lattice.pair_mod(&e.class, w)).collect::<Result<_>>()?;
    let mut pow_cache: HashMap<(u32, u32, i64), QSeries> = HashMap::new();
    let mut sum = QSeries::zero(denom, 0, trunc);
    for_each_assignment(basics.len(), (r - 1) as usize, |idx| {
        let mut coeff = CycloNumber::one_in(conductor);
        let mut eps_exp = 0i64;
        for (pos, &k) in idx.iter().enumerate() {
            let i = pos as i64 + 1;
            eps_exp += i * pair_w[k] as i64;
            coeff = &coeff * &CycloNumber::from_int(basics[k].value);
        }
        coeff = &coeff * &root_of_unity(r, eps_exp).embed(conductor)?;
        let mut term = QSeries::monomial(denom, 0, coeff, trunc);
        for (p, &ki) in idx.iter().enumerate() {
            for (q, &kj) in idx.iter().enumerate().skip(p) {
                let e = s.lattice.pair(&basics[ki].class, &basics[kj].class)?;
                if e == 0 {
                    continue;
                }
                let (i, j) = (p as u32 + 1, q as u32 + 1);
                let factor = match pow_cache.get(&(i, j, e)) {
                    Some(f) => f.clone(),
                    None => {
                        let base = pack.get(i, j).expect("validated pack");
                        let f = base.pow(e).map_err(|_| {
                            Error::InvalidArgument(format!(
                                "D_{i}{j} has no invertible leading coefficient but exponent {e} is negative"
                            ))
                        })?;
                        pow_cache.insert((i, j, e), f.clone());
                        f
                    }
                };
                term = term.mul(&factor)?;
            }
        }
        sum = sum.add(&term)?;
        Ok(())
    })?;

    let eta = eta_product(denom, &[(Rational::new(1.into(), (r as i64).into()), -12 * chi)], trunc)?;
    let d0 = pack.d0.pow(k2).map_err(|_| {
        Error::InvalidArgument("D0 has no invertible leading coefficient but K² is negative".into())
    })?;
    let scalar = CycloNumber::from_rational(rational_pow(r as i64, 2 + k2 - chi));
    let full = embed_q(&eta.mul(&d0)?.mul(&sum)?.scale(&scalar), conductor)?;
    let residue = gkl_residue(&s.lattice, r, w, chi)?;
    let series = full.restrict_to_residue(2 * r as i64, residue);
    Ok(GklSeries { residue, series, full })
}

fn embed_q(s: &QSeries, conductor: u32) -> Result<QSeries> {
    let terms = s.terms().map(|(n, c)| Ok((n, c.embed(conductor)?))).collect::<Result<Vec<_>>>()?;
    QSeries::from_terms(s.denom(), s.min_exp(), s.trunc(), terms)
}

fn embed_z(zs: &ZSeries, conductor: u32) -> Result<ZSeries> {
    let coeffs = zs
        .coeffs()
        .iter()
        .map(|p| Ok(UPoly::new(p.coeffs().iter().map(|c| c.embed(conductor)).collect::<Result<Vec<_>>>()?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ZSeries::from_coeffs(zs.z_trunc(), zs.u_degree(), coeffs))
}

/// A Donaldson generating function together with its parity bookkeeping.
#[derive(Clone, Debug, PartialEq)]
pub struct DonaldsonSeries {
    pub r: u32,
    pub series: ZSeries,
    /// Parity of every virtual dimension for this `(r, w)`.
    pub vd_parity: i64,
    /// `z`-orders of the wrong parity whose coefficient is nonzero.
    pub off_parity: Vec<usize>,
}

impl DonaldsonSeries {
    fn new(r: u32, series: ZSeries, vd_parity: i64) -> Result<Self> {
        if !series.is_real() {
            return Err(Error::NotReal(format!("rank {r} Donaldson series has a non-real coefficient")));
        }
        let off_parity = (0..=series.z_trunc())
            .filter(|&k| (k as i64 - vd_parity).rem_euclid(2) == 1 && !series.coeff(k).is_zero())
            .collect();
        Ok(Self { r, series, vd_parity, off_parity })
    }

    /// The series with the wrong-parity coefficients removed.
    pub fn masked(&self) -> ZSeries {
        let coeffs = (0..=self.series.z_trunc())
            .map(|k| {
                if (k as i64 - self.vd_parity).rem_euclid(2) == 0 {
                    self.series.coeff(k).clone()
                } else {
                    UPoly::zero()
                }
            })
            .collect();
        ZSeries::from_coeffs(self.series.z_trunc(), self.series.u_degree(), coeffs)
    }
}

fn quadratic_part(lattice: &IntersectionLattice, l: &LatticeVector, r: u32) -> Result<UPoly> {
    let l2 = lattice.square(l)?;
    Ok(UPoly::new(vec![
        CycloNumber::from_rational(Rational::new(l2.into(), 2.into())),
        CycloNumber::from_int(r as i64),
    ]))
}

fn check_l(s: &SurfaceData, l: &LatticeVector) -> Result<()> {
    if l.len() != s.lattice.rank() {
        return Err(Error::DimensionMismatch { expected: s.lattice.rank(), got: l.len() });
    }
    Ok(())
}

/// `2^(2−χ+K²) · e^((½L² + 2u)z²) · Σ_a (−1)^(a·c₁) SW(a) e^(−(2a−K)·L z)`.
///
/// `c1` is the class of `c₁` mod 2.
pub fn gny_donaldson(
    s: &SurfaceData,
    c1: &MuRClass,
    l: &LatticeVector,
    z_trunc: usize,
    u_degree: usize,
) -> Result<DonaldsonSeries> {
    s.ensure_valid()?;
    check_class(s, c1, 2)?;
    check_l(s, l)?;
    let k_l = s.lattice.pair(&s.canonical, l)?;
    let mut sum = ZSeries::zero(z_trunc, u_degree);
    for e in s.basic_classes() {
        let sign = if s.lattice.pair_mod(&e.class, c1)? == 0 { 1 } else { -1 };
        let a_l = s.lattice.pair(&e.class, l)?;
        let lin = CycloNumber::from_int(-(2 * a_l - k_l));
        sum = sum.add(&z_exp_linear(&lin, z_trunc, u_degree).scale(&CycloNumber::from_int(sign * e.value)));
    }
    let quad = z_exp(&quadratic_part(&s.lattice, l, 2)?, z_trunc, u_degree);
    let scalar = CycloNumber::from_rational(rational_pow(2, 2 - s.chi + s.k_squared()));
    let series = quad.mul(&sum).scale(&scalar);
    let parity = (s.lattice.pair_mod(&s.canonical, c1)? as i64 + s.chi).rem_euclid(2);
    DonaldsonSeries::new(2, series, parity)
}

/// `r^(2−χ) B^(K²) e^((½L² + ru)z²) Σ_a Π_i ε_r^(i·a_i·w) SW(a_i) e^(−sin(iπ/r)(2a_i−K)·L z) Π_{i<j} β_ij^((2a_i−K)·(a_j−a_i))`.
///
/// Coefficients are returned at conductor `4r`.
pub fn gott_donaldson(
    s: &SurfaceData,
    r: u32,
    w: &MuRClass,
    l: &LatticeVector,
    z_trunc: usize,
    u_degree: usize,
) -> Result<DonaldsonSeries> {
    s.ensure_valid()?;
    if r < 2 {
        return Err(Error::InvalidArgument(format!("rank must be at least 2, got {r}")));
    }
    check_class(s, w, r)?;
    check_l(s, l)?;
    let conductor = 4 * r;
    let lat = &s.lattice;
    let k = &s.canonical;
    let k_l = lat.pair(k, l)?;
    let basics = nonzero_basic_classes(s);
    let pair_w: Vec<u32> = basics.iter().map(|e| lat.pair_mod(&e.class, w)).collect::<Result<_>>()?;
    // (2a − K)·L for each basic class
    let twice_minus_k: Vec<LatticeVector> = basics.iter().map(|e| e.class.scale(2).sub(k)).collect();
    let lin_pair: Vec<i64> = basics.iter().map(|e| Ok(2 * lat.pair(&e.class, l)? - k_l)).collect::<Result<_>>()?;
    let sines: Vec<CycloNumber> = (1..r).map(|i| sin_of(i as i64, r).embed(conductor)).collect::<Result<_>>()?;
    let mut betas = HashMap::new();
    for i in 1..r {
        for j in i + 1..r {
            betas.insert((i, j), beta(r, i, j)?.embed(conductor)?);
        }
    }
    let mut beta_pows: HashMap<(u32, u32, i64), CycloNumber> = HashMap::new();

    let mut sum = ZSeries::zero(z_trunc, u_degree);
    for_each_assignment(basics.len(), (r - 1) as usize, |idx| {
        let mut coeff = CycloNumber::one_in(conductor);
        let mut eps_exp = 0i64;
        let mut lin = CycloNumber::zero_in(conductor);
        for (pos, &kk) in idx.iter().enumerate() {
            let i = pos as i64 + 1;
            eps_exp += i * pair_w[kk] as i64;
            coeff = &coeff * &CycloNumber::from_int(basics[kk].value);
            lin = &lin - &(&sines[pos] * &CycloNumber::from_int(lin_pair[kk]));
        }
        coeff = &coeff * &root_of_unity(r, eps_exp).embed(conductor)?;
        for (p, &ki) in idx.iter().enumerate() {
            for (q, &kj) in idx.iter().enumerate().skip(p + 1) {
                let diff = basics[kj].class.sub(&basics[ki].class);
                let e = lat.pair(&twice_minus_k[ki], &diff)?;
                if e == 0 {
                    continue;
                }
                let key = (p as u32 + 1, q as u32 + 1, e);
                if !beta_pows.contains_key(&key) {
                    beta_pows.insert(key, betas[&(key.0, key.1)].pow(e)?);
                }
                coeff = &coeff * &beta_pows[&key];
            }
        }
        sum = sum.add(&z_exp_linear(&lin, z_trunc, u_degree).scale(&coeff));
        Ok(())
    })?;

    let quad = z_exp(&quadratic_part(lat, l, r)?, z_trunc, u_degree);
    let b = b_constant(r)?.embed(conductor)?.pow(s.k_squared())?;
    let scalar = &b * &CycloNumber::from_rational(rational_pow(r as i64, 2 - s.chi));
    let series = embed_z(&quad.mul(&sum).scale(&scalar), conductor)?;
    let w_k = lat.pair_mod(k, w)? as i64;
    let parity = if r % 2 == 1 { 0 } else { (w_k + s.chi).rem_euclid(2) };
    DonaldsonSeries::new(r, series, parity)
}

/// Least `z`-order with a nonzero coefficient, and that coefficient.
pub fn leading_term(zs: &ZSeries) -> Result<(usize, UPoly)> {
    (0..=zs.z_trunc())
        .find(|&k| !zs.coeff(k).is_zero())
        .map(|k| (k, zs.coeff(k).clone()))
        .ok_or(Error::NoLeadingTerm(zs.z_trunc()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeVector;

    fn pow_int(b: i64, e: i64) -> Rational {
        rational_pow(b, e)
    }

    fn class_with_wk(s: &SurfaceData, r: u32, target: u32) -> MuRClass {
        crate::lattice::enumerate_mu_r(&s.lattice, r, DEFAULT_ENUMERATION_BUDGET)
            .unwrap()
            .find(|w| s.lattice.pair_mod(&s.canonical, w).unwrap() == target)
            .expect("class with the requested w·K")
    }

    #[test]
    fn gny_leading_terms_small_cases() {
        for (chi, k2) in [(1, 1), (2, 1), (2, 3), (3, 2)] {
            let s = SurfaceData::preset_min_general_type(chi, k2).unwrap();
            let k = s.canonical.clone();
            for t in 0..2u32 {
                let w = class_with_wk(&s, 2, t);
                let d = gny_donaldson(&s, &w, &k, 6, 2).unwrap();
                assert!(d.off_parity.is_empty());
                let (order, c) = leading_term(&d.series).unwrap();
                let base = pow_int(2, 2 - chi + k2);
                if (t as i64 + chi) % 2 == 0 {
                    assert_eq!(order, 0);
                    assert_eq!(c, UPoly::constant(CycloNumber::from_rational(base * Rational::from_integer(2.into()))));
                } else {
                    assert_eq!(order, 1);
                    let want = base * Rational::from_integer((2 * k2).into());
                    assert_eq!(c, UPoly::constant(CycloNumber::from_rational(want)));
                }
            }
        }
    }

    #[test]
    fn empty_table_gives_zero() {
        let mut s = SurfaceData::preset_min_general_type(1, 1).unwrap();
        s.sw_table.clear();
        s.tags.clear();
        let d = gny_donaldson(&s, &MuRClass::zero(2, 1), &s.canonical.clone(), 6, 2).unwrap();
        assert!(d.series.is_zero());
        assert_eq!(leading_term(&d.series), Err(Error::NoLeadingTerm(6)));
    }

    #[test]
    fn gott_rank_two_is_gny() {
        let s = SurfaceData::preset_min_general_type(3, 2).unwrap();
        let l = LatticeVector(vec![2, -1]);
        for w in crate::lattice::enumerate_mu_r(&s.lattice, 2, 100).unwrap() {
            let a = gny_donaldson(&s, &w, &l, 8, 3).unwrap();
            let b = gott_donaldson(&s, 2, &w, &l, 8, 3).unwrap();
            assert_eq!(a.series, b.series);
        }
    }

    #[test]
    fn gott_rank_three_case_table() {
        for chi in 1..4 {
            let s = SurfaceData::preset_min_general_type(chi, 2).unwrap();
            let k = s.canonical.clone();
            for t in 0..3u32 {
                let Some(w) = crate::lattice::enumerate_mu_r(&s.lattice, 3, 100)
                    .unwrap()
                    .find(|w| s.lattice.pair_mod(&k, w).unwrap() == t)
                else {
                    continue;
                };
                let d = gott_donaldson(&s, 3, &w, &k, 4, 1).unwrap();
                let (order, c) = leading_term(&d.series).unwrap();
                assert_eq!(order, 0);
                let sign = if chi % 2 == 0 { 1 } else { -1 };
                let tail = if t == 0 { 2 * sign } else { -sign };
                let want = pow_int(3, 2 - chi + 2) * Rational::from_integer((8 + tail).into());
                assert_eq!(c, UPoly::constant(CycloNumber::from_rational(want)));
            }
        }
    }

    #[test]
    fn gkl_unit_pack_rank_two() {
        let s = SurfaceData::preset_min_general_type(2, 1).unwrap();
        let trunc = q_trunc_for(2, 3);
        for t in 0..2u32 {
            let w = class_with_wk(&s, 2, t);
            let out = gkl_euler_series(&s, 2, &w, &UniversalSeriesPack::unit(2, trunc), trunc).unwrap();
            let sw_sum = 1 + if (t + 2) % 2 == 0 { 1 } else { -1 };
            let eta = eta_product(4, &[(Rational::new(1.into(), 2.into()), -24)], trunc).unwrap();
            let want = eta.scale(&CycloNumber::from_rational(pow_int(2, 2 + 1 - 2) * Rational::from_integer(sw_sum.into())));
            assert_eq!(out.full, want);
            assert!(out.series.residues(4).iter().all(|&x| x == out.residue));
        }
    }

    #[test]
    fn pack_round_trip() {
        let mut pack = UniversalSeriesPack::unit(3, 12);
        pack.d0 = QSeries::from_terms(6, -1, 12, [(-1, CycloNumber::from_int(2)), (3, CycloNumber::from_int(-1))]).unwrap();
        let text = pack.to_json();
        assert_eq!(UniversalSeriesPack::from_json(&text).unwrap(), pack);
        let bad = text.replace("\"schema_version\": 1", "\"schema_version\": 9");
        assert!(UniversalSeriesPack::from_json(&bad).is_err());
    }
}
