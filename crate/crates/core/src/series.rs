//! Truncated exact series.
//!
//! [`QSeries`] is a Laurent–Puiseux series in `q` whose exponents lie on the
//! lattice `(1/denom)·Z`; exponents are stored by their integer numerator.
//! [`ZSeries`] is a power series in `z` whose coefficients are polynomials in
//! a formal variable `u`.
//!
//! Truncation follows one global rule: a product is known only on the window
//! where both operands are known, i.e. up to
//! `min(a.trunc + b.min_exp, b.trunc + a.min_exp)`; a sum up to the smaller
//! of the two bounds.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cyclo::CycloNumber;
use crate::error::{Error, Result};
use crate::Rational;

/// Truncated series `Σ c_n q^(n/denom)` with `min_exp ≤ n < trunc`.
#[derive(Clone, Debug)]
pub struct QSeries {
    denom: u32,
    min_exp: i64,
    trunc: i64,
    coeffs: BTreeMap<i64, CycloNumber>,
}

impl PartialEq for QSeries {
    /// Compares known coefficients and truncation; `min_exp` is only a
    /// declared lower bound and does not take part.
    fn eq(&self, other: &Self) -> bool {
        self.denom == other.denom && self.trunc == other.trunc && self.coeffs == other.coeffs
    }
}

impl QSeries {
    pub fn zero(denom: u32, min_exp: i64, trunc: i64) -> Self {
        assert!(denom >= 1, "denominator must be positive");
        Self { denom, min_exp, trunc: trunc.max(min_exp), coeffs: BTreeMap::new() }
    }

    pub fn one(denom: u32, trunc: i64) -> Self {
        Self::monomial(denom, 0, CycloNumber::one(), trunc)
    }

    /// `c · q^(num/denom)` known below `trunc`.
    pub fn monomial(denom: u32, num: i64, c: CycloNumber, trunc: i64) -> Self {
        let mut s = Self::zero(denom, num, trunc);
        s.set(num, c);
        s
    }

    /// Builds a series from `(numerator, coefficient)` pairs. Terms at or
    /// beyond `trunc` are dropped; terms below `min_exp` are rejected.
    pub fn from_terms<I>(denom: u32, min_exp: i64, trunc: i64, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, CycloNumber)>,
    {
        if denom == 0 {
            return Err(Error::InvalidArgument("series denominator must be positive".into()));
        }
        let mut s = Self::zero(denom, min_exp, trunc);
        for (n, c) in terms {
            if n < min_exp {
                return Err(Error::InvalidArgument(format!(
                    "term q^({n}/{denom}) lies below the declared minimum exponent {min_exp}"
                )));
            }
            let merged = match s.coeffs.remove(&n) {
                Some(old) => &old + &c,
                None => c,
            };
            s.set(n, merged);
        }
        Ok(s)
    }

    /// Integer-coefficient power series `Σ c_k q^(k/denom)`, `k ≥ 0`.
    pub fn from_integers(denom: u32, coeffs: &[BigInt], trunc: i64) -> Self {
        let mut s = Self::zero(denom, 0, trunc);
        for (k, c) in coeffs.iter().enumerate() {
            s.set(k as i64, CycloNumber::from_rational(Rational::from_integer(c.clone())));
        }
        s
    }

    fn set(&mut self, n: i64, c: CycloNumber) {
        if n >= self.trunc || c.is_zero() {
            self.coeffs.remove(&n);
        } else {
            debug_assert!(n >= self.min_exp);
            self.coeffs.insert(n, c);
        }
    }

    pub fn denom(&self) -> u32 {
        self.denom
    }

    pub fn min_exp(&self) -> i64 {
        self.min_exp
    }

    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    /// Coefficient of `q^(n/denom)`; `None` when `n` is beyond the truncation.
    pub fn coeff(&self, n: i64) -> Option<CycloNumber> {
        if n >= self.trunc {
            return None;
        }
        Some(self.coeffs.get(&n).cloned().unwrap_or_else(CycloNumber::zero))
    }

    /// Nonzero terms in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &CycloNumber)> {
        self.coeffs.iter().map(|(n, c)| (*n, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest exponent numerator carrying a nonzero coefficient.
    pub fn valuation(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    fn check_denom(&self, other: &Self) -> Result<()> {
        if self.denom != other.denom {
            return Err(Error::DenominatorMismatch(self.denom, other.denom));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_denom(other)?;
        let mut out = Self::zero(self.denom, self.min_exp.min(other.min_exp), self.trunc.min(other.trunc));
        for (n, c) in self.terms() {
            out.set(n, c.clone());
        }
        for (n, c) in other.terms() {
            if n >= out.trunc {
                continue;
            }
            let merged = match out.coeffs.remove(&n) {
                Some(old) => &old + c,
                None => c.clone(),
            };
            out.set(n, merged);
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c = -&*c;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &CycloNumber) -> Self {
        let mut out = Self::zero(self.denom, self.min_exp, self.trunc);
        for (n, c) in self.terms() {
            out.set(n, c * k);
        }
        out
    }

    /// Truncated product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_denom(other)?;
        let trunc = (self.trunc + other.min_exp).min(other.trunc + self.min_exp);
        let mut acc: BTreeMap<i64, CycloNumber> = BTreeMap::new();
        for (i, a) in self.terms() {
            for (j, b) in other.terms() {
                if i + j >= trunc {
                    break;
                }
                let p = a * b;
                acc.entry(i + j).and_modify(|c| *c += &p).or_insert(p);
            }
        }
        let mut out = Self::zero(self.denom, self.min_exp + other.min_exp, trunc);
        for (n, c) in acc {
            out.set(n, c);
        }
        Ok(out)
    }

    /// Multiplicative inverse as a Laurent series.
    pub fn inverse(&self) -> Result<Self> {
        let v = self.valuation().ok_or(Error::NotInvertible)?;
        let precision = self.trunc - v;
        let lead_inv = self.coeffs[&v].inverse()?;
        let mut out: Vec<CycloNumber> = Vec::with_capacity(precision.max(0) as usize);
        for k in 0..precision {
            if k == 0 {
                out.push(lead_inv.clone());
                continue;
            }
            let mut sum = CycloNumber::zero();
            for (n, a) in self.coeffs.range(v + 1..=v + k) {
                let b = &out[(k - (n - v)) as usize];
                if !b.is_zero() {
                    sum += &(a * b);
                }
            }
            out.push(-&(&sum * &lead_inv));
        }
        let mut s = Self::zero(self.denom, -v, -v + precision);
        for (k, c) in out.into_iter().enumerate() {
            s.set(-v + k as i64, c);
        }
        Ok(s)
    }

    /// Integer power; negative exponents go through [`QSeries::inverse`].
    pub fn pow(&self, n: i64) -> Result<Self> {
        let base = if n < 0 { self.inverse()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Self::one(base.denom, base.trunc - base.min_exp);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq)?;
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq)?;
            }
        }
        Ok(acc)
    }

    /// Coefficients whose exponent numerator is `≡ residue (mod denom)`.
    pub fn extract_progression(&self, residue: i64) -> Result<Vec<(i64, CycloNumber)>> {
        if residue < 0 || residue >= self.denom as i64 {
            return Err(Error::InvalidArgument(format!(
                "residue {residue} outside 0..{}",
                self.denom
            )));
        }
        Ok(self
            .terms()
            .filter(|(n, _)| n.rem_euclid(self.denom as i64) == residue)
            .map(|(n, c)| (n, c.clone()))
            .collect())
    }

    /// The same series with every coefficient off the progression
    /// `n ≡ residue (mod modulus)` set to zero.
    pub fn restrict_to_residue(&self, modulus: i64, residue: i64) -> Self {
        let mut out = Self::zero(self.denom, self.min_exp, self.trunc);
        for (n, c) in self.terms() {
            if (n - residue).rem_euclid(modulus) == 0 {
                out.set(n, c.clone());
            }
        }
        out
    }

    /// Exponent numerators (mod `modulus`) that carry a nonzero coefficient.
    pub fn residues(&self, modulus: i64) -> Vec<i64> {
        let mut r: Vec<i64> = self.terms().map(|(n, _)| n.rem_euclid(modulus)).collect();
        r.sort_unstable();
        r.dedup();
        r
    }

    pub fn conj(&self) -> Self {
        let mut out = Self::zero(self.denom, self.min_exp, self.trunc);
        for (n, c) in self.terms() {
            out.set(n, c.conj());
        }
        out
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.values().all(CycloNumber::is_real)
    }

    /// Same series with a smaller truncation.
    pub fn truncate(&self, trunc: i64) -> Self {
        let mut out = Self::zero(self.denom, self.min_exp, trunc.min(self.trunc));
        for (n, c) in self.terms() {
            out.set(n, c.clone());
        }
        out
    }
}

/// `Π_factors Π_{n≥1} (1 - q^(n·scale))^exponent`, expanded exactly below
/// `q^(trunc/denom)`.
///
/// Each `scale` must be a positive rational with denominator dividing
/// `denom`. With `factors = [(1, 24)]` this is `Δ̄(q) = Π (1 - qⁿ)²⁴`.
pub fn eta_product(denom: u32, factors: &[(Rational, i64)], trunc: i64) -> Result<QSeries> {
    if denom == 0 {
        return Err(Error::InvalidArgument("series denominator must be positive".into()));
    }
    let len = trunc.max(0) as usize;
    let mut c = vec![BigInt::zero(); len];
    if len > 0 {
        c[0] = BigInt::one();
    }
    for (scale, exponent) in factors {
        if !scale.is_positive() {
            return Err(Error::InvalidArgument(format!("eta scale {scale} must be positive")));
        }
        let step = scale * Rational::from_integer(denom.into());
        if !step.is_integer() {
            return Err(Error::InvalidArgument(format!(
                "eta scale {scale} has a denominator not dividing {denom}"
            )));
        }
        let step: usize = step
            .to_integer()
            .try_into()
            .map_err(|_| Error::InvalidArgument(format!("eta scale {scale} too large")))?;
        let mut k = step;
        while k < len {
            if *exponent > 0 {
                for _ in 0..*exponent {
                    for i in (k..len).rev() {
                        let t = c[i - k].clone();
                        c[i] -= t;
                    }
                }
            } else {
                for _ in 0..exponent.unsigned_abs() {
                    for i in k..len {
                        let t = c[i - k].clone();
                        c[i] += t;
                    }
                }
            }
            k += step;
        }
    }
    Ok(QSeries::from_integers(denom, &c, trunc))
}

/// Serialized term of a [`QSeries`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QTerm {
    pub num: i64,
    /// Always written; may be omitted on input, in which case the series
    /// denominator applies.
    #[serde(default)]
    pub den: Option<u32>,
    pub coeff: CycloNumber,
}

#[derive(Serialize, Deserialize)]
struct QSeriesRepr {
    den: u32,
    min_exp: i64,
    trunc: i64,
    terms: Vec<QTerm>,
}

impl Serialize for QSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        QSeriesRepr {
            den: self.denom,
            min_exp: self.min_exp,
            trunc: self.trunc,
            terms: self.terms().map(|(n, c)| QTerm { num: n, den: Some(self.denom), coeff: c.clone() }).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = QSeriesRepr::deserialize(d)?;
        if let Some(den) = repr.terms.iter().filter_map(|t| t.den).find(|&d| d != repr.den) {
            return Err(D::Error::custom(format!(
                "term denominator {den} differs from series denominator {}",
                repr.den
            )));
        }
        QSeries::from_terms(repr.den, repr.min_exp, repr.trunc, repr.terms.into_iter().map(|t| (t.num, t.coeff)))
            .map_err(D::Error::custom)
    }
}

/// Polynomial in the formal variable `u` with cyclotomic coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct UPoly(Vec<CycloNumber>);

impl UPoly {
    pub fn zero() -> Self {
        Self(Vec::new())
    }

    pub fn constant(c: CycloNumber) -> Self {
        Self::new(vec![c])
    }

    pub fn new(mut coeffs: Vec<CycloNumber>) -> Self {
        while coeffs.last().is_some_and(CycloNumber::is_zero) {
            coeffs.pop();
        }
        Self(coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> CycloNumber {
        self.0.get(k).cloned().unwrap_or_else(CycloNumber::zero)
    }

    pub fn coeffs(&self) -> &[CycloNumber] {
        &self.0
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        Self::new((0..n).map(|k| &self.coeff(k) + &other.coeff(k)).collect())
    }

    /// Product with `u`-powers above `max_deg` discarded.
    pub fn mul(&self, other: &Self, max_deg: usize) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let n = (self.0.len() + other.0.len() - 1).min(max_deg + 1);
        let mut out = vec![CycloNumber::zero(); n];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate().take(n.saturating_sub(i)) {
                if !b.is_zero() {
                    out[i + j] += &(a * b);
                }
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, k: &CycloNumber) -> Self {
        Self::new(self.0.iter().map(|c| c * k).collect())
    }

    pub fn conj(&self) -> Self {
        Self::new(self.0.iter().map(CycloNumber::conj).collect())
    }

    pub fn is_real(&self) -> bool {
        self.0.iter().all(CycloNumber::is_real)
    }
}

/// Power series in `z` known through `z^z_trunc`, with `u`-polynomial
/// coefficients known through `u^u_degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZSeries {
    z_trunc: usize,
    u_degree: usize,
    coeffs: Vec<UPoly>,
}

impl ZSeries {
    pub fn zero(z_trunc: usize, u_degree: usize) -> Self {
        Self { z_trunc, u_degree, coeffs: vec![UPoly::zero(); z_trunc + 1] }
    }

    pub fn one(z_trunc: usize, u_degree: usize) -> Self {
        let mut s = Self::zero(z_trunc, u_degree);
        s.coeffs[0] = UPoly::constant(CycloNumber::one());
        s
    }

    pub fn from_coeffs(z_trunc: usize, u_degree: usize, coeffs: Vec<UPoly>) -> Self {
        let mut s = Self::zero(z_trunc, u_degree);
        for (k, p) in coeffs.into_iter().enumerate().take(z_trunc + 1) {
            s.coeffs[k] = UPoly::new(p.0.into_iter().take(u_degree + 1).collect());
        }
        s
    }

    pub fn z_trunc(&self) -> usize {
        self.z_trunc
    }

    pub fn u_degree(&self) -> usize {
        self.u_degree
    }

    /// Coefficient of `z^k`; zero beyond the truncation.
    pub fn coeff(&self, k: usize) -> &UPoly {
        static ZERO: UPoly = UPoly(Vec::new());
        self.coeffs.get(k).unwrap_or(&ZERO)
    }

    pub fn coeffs(&self) -> &[UPoly] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(UPoly::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let z = self.z_trunc.min(other.z_trunc);
        let u = self.u_degree.min(other.u_degree);
        let coeffs = (0..=z).map(|k| self.coeffs[k].add(&other.coeffs[k])).collect();
        Self::from_coeffs(z, u, coeffs)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let z = self.z_trunc.min(other.z_trunc);
        let u = self.u_degree.min(other.u_degree);
        let mut out = Self::zero(z, u);
        for i in 0..=z {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=(z - i) {
                if other.coeffs[j].is_zero() {
                    continue;
                }
                let p = self.coeffs[i].mul(&other.coeffs[j], u);
                out.coeffs[i + j] = out.coeffs[i + j].add(&p);
            }
        }
        out
    }

    pub fn scale(&self, k: &CycloNumber) -> Self {
        Self { z_trunc: self.z_trunc, u_degree: self.u_degree, coeffs: self.coeffs.iter().map(|p| p.scale(k)).collect() }
    }

    pub fn conj(&self) -> Self {
        Self { z_trunc: self.z_trunc, u_degree: self.u_degree, coeffs: self.coeffs.iter().map(UPoly::conj).collect() }
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(UPoly::is_real)
    }
}

fn factorials(n: usize) -> Vec<Rational> {
    let mut f = vec![Rational::one(); n + 1];
    for k in 1..=n {
        f[k] = &f[k - 1] * Rational::from_integer(k.into());
    }
    f
}

/// `exp(Q(u)·z²)` where `quadratic` is the `u`-polynomial `Q`.
pub fn z_exp(quadratic: &UPoly, z_trunc: usize, u_degree: usize) -> ZSeries {
    let fact = factorials(z_trunc / 2);
    let mut out = ZSeries::zero(z_trunc, u_degree);
    let mut power = UPoly::constant(CycloNumber::one());
    for k in 0..=z_trunc / 2 {
        out.coeffs[2 * k] = power.scale(&CycloNumber::from_rational(fact[k].recip()));
        power = power.mul(quadratic, u_degree);
    }
    out
}

/// `exp(c·z)`.
pub fn z_exp_linear(c: &CycloNumber, z_trunc: usize, u_degree: usize) -> ZSeries {
    let fact = factorials(z_trunc);
    let mut out = ZSeries::zero(z_trunc, u_degree);
    let mut power = CycloNumber::one();
    for (k, f) in fact.iter().enumerate() {
        out.coeffs[k] = UPoly::constant(power.scale(&f.recip()));
        power = &power * c;
    }
    out
}

#[derive(Serialize)]
struct ZTerm<'a> {
    z: usize,
    u: usize,
    coeff: &'a CycloNumber,
}

impl Serialize for ZSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let terms: Vec<ZTerm<'_>> = self
            .coeffs
            .iter()
            .enumerate()
            .flat_map(|(z, p)| {
                p.coeffs().iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(u, c)| ZTerm { z, u, coeff: c })
            })
            .collect();
        let mut st = s.serialize_struct("ZSeries", 3)?;
        st.serialize_field("z_trunc", &self.z_trunc)?;
        st.serialize_field("u_degree", &self.u_degree)?;
        st.serialize_field("terms", &terms)?;
        st.end()
    }
}
