//! Exact arithmetic in cyclotomic fields `Q(ζ_m)`.
//!
//! An element is stored as a dense vector of rationals of length `φ(m)`,
//! the coefficients of a polynomial in `ζ_m` reduced modulo the cyclotomic
//! polynomial `Φ_m`. Binary operations between different conductors embed
//! both operands into the field of conductor `lcm(m, m')`.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::Rational;

/// Euler's totient.
pub fn totient(m: u32) -> u32 {
    let mut n = m;
    let mut result = m;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

fn poly_cache() -> &'static RwLock<HashMap<u32, Arc<Vec<BigInt>>>> {
    static CACHE: OnceLock<RwLock<HashMap<u32, Arc<Vec<BigInt>>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Coefficients (low to high) of the m-th cyclotomic polynomial.
pub fn cyclotomic_polynomial(m: u32) -> Arc<Vec<BigInt>> {
    assert!(m >= 1, "conductor must be positive");
    if let Some(p) = poly_cache().read().unwrap().get(&m) {
        return p.clone();
    }
    // x^m - 1 divided by Φ_d for every proper divisor d of m.
    let mut num: Vec<BigInt> = vec![BigInt::zero(); m as usize + 1];
    num[0] = BigInt::from(-1);
    num[m as usize] = BigInt::one();
    for d in 1..m {
        if m % d == 0 {
            let den = cyclotomic_polynomial(d);
            num = exact_div_monic(&num, &den);
        }
    }
    let phi = Arc::new(num);
    poly_cache().write().unwrap().insert(m, phi.clone());
    phi
}

fn exact_div_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let qlen = num.len() - dn;
    let mut quot = vec![BigInt::zero(); qlen];
    for k in (0..qlen).rev() {
        let c = rem[k + dn].clone();
        if c.is_zero() {
            continue;
        }
        for (i, d) in den.iter().enumerate() {
            rem[k + i] -= &c * d;
        }
        quot[k] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero));
    quot
}

/// An exact element of `Q(ζ_m)`.
#[derive(Clone, Debug)]
pub struct CycloNumber {
    conductor: u32,
    coeffs: Vec<Rational>,
}

/// Reduce a polynomial in ζ_m (any length) to the canonical basis.
fn reduce(m: u32, mut poly: Vec<Rational>) -> Vec<Rational> {
    let phi = cyclotomic_polynomial(m);
    let deg = phi.len() - 1;
    // Fold exponents mod m first since ζ^m = 1.
    if poly.len() > m as usize {
        let mut folded = vec![Rational::zero(); m as usize];
        for (k, c) in poly.into_iter().enumerate() {
            folded[k % m as usize] += c;
        }
        poly = folded;
    }
    for k in (deg..poly.len()).rev() {
        if poly[k].is_zero() {
            continue;
        }
        let c = std::mem::replace(&mut poly[k], Rational::zero());
        let base = k - deg;
        for (i, p) in phi.iter().take(deg).enumerate() {
            if !p.is_zero() {
                poly[base + i] -= &c * Rational::from_integer(p.clone());
            }
        }
    }
    poly.resize(deg, Rational::zero());
    poly
}

fn trim(p: &mut Vec<Rational>) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn poly_divrem(num: &[Rational], den: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut rem = num.to_vec();
    trim(&mut rem);
    let dn = den.len() - 1;
    let lead = den[dn].clone();
    if rem.len() < den.len() {
        return (Vec::new(), rem);
    }
    let mut quot = vec![Rational::zero(); rem.len() - dn];
    for k in (0..quot.len()).rev() {
        let c = &rem[k + dn] / &lead;
        if c.is_zero() {
            continue;
        }
        for (i, d) in den.iter().enumerate() {
            rem[k + i] -= &c * d;
        }
        quot[k] = c;
    }
    trim(&mut rem);
    (quot, rem)
}

fn poly_sub_mul(a: &[Rational], q: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let n = a.len().max(if q.is_empty() || b.is_empty() { 0 } else { q.len() + b.len() - 1 });
    let mut out = vec![Rational::zero(); n];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, x) in q.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] -= x * y;
        }
    }
    trim(&mut out);
    out
}

impl CycloNumber {
    pub fn zero_in(m: u32) -> Self {
        assert!(m >= 1, "conductor must be positive");
        Self { conductor: m, coeffs: vec![Rational::zero(); totient(m) as usize] }
    }

    pub fn from_rational(q: Rational) -> Self {
        Self { conductor: 1, coeffs: vec![q] }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(n.into()))
    }

    /// Builds an element from an arbitrary polynomial in `ζ_m`, reducing it.
    pub fn from_poly(m: u32, poly: Vec<Rational>) -> Self {
        assert!(m >= 1, "conductor must be positive");
        Self { conductor: m, coeffs: reduce(m, poly) }
    }

    /// Builds an element from already-reduced coefficients.
    pub fn from_coeffs(m: u32, coeffs: Vec<Rational>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("conductor must be positive".into()));
        }
        let n = totient(m) as usize;
        if coeffs.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: coeffs.len() });
        }
        Ok(Self { conductor: m, coeffs })
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.to_rational().is_some_and(|q| q.is_one())
    }

    /// `Some(q)` if this element lies in the rational subfield.
    pub fn to_rational(&self) -> Option<Rational> {
        if self.coeffs.iter().skip(1).all(Zero::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Re-expresses the element inside `Q(ζ_big)`; `big` must be a multiple of the conductor.
    pub fn embed(&self, big: u32) -> Result<Self> {
        if big == 0 || big % self.conductor != 0 {
            return Err(Error::InvalidArgument(format!(
                "cannot embed conductor {} into conductor {big}",
                self.conductor
            )));
        }
        if big == self.conductor {
            return Ok(self.clone());
        }
        let step = (big / self.conductor) as usize;
        let mut poly = vec![Rational::zero(); (self.coeffs.len().max(1) - 1) * step + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            poly[k * step] = c.clone();
        }
        Ok(Self::from_poly(big, poly))
    }

    fn aligned(a: &Self, b: &Self) -> (Self, Self) {
        if a.conductor == b.conductor {
            return (a.clone(), b.clone());
        }
        let m = a.conductor.lcm(&b.conductor);
        (a.embed(m).unwrap(), b.embed(m).unwrap())
    }

    /// Image under ζ → ζ^(-1), i.e. complex conjugation for the standard embedding.
    pub fn conj(&self) -> Self {
        let m = self.conductor as usize;
        let mut poly = vec![Rational::zero(); m];
        for (k, c) in self.coeffs.iter().enumerate() {
            poly[(m - k) % m] += c;
        }
        Self::from_poly(self.conductor, poly)
    }

    pub fn is_real(&self) -> bool {
        self.conj() == *self
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero("cyclotomic inverse"));
        }
        if let Some(q) = self.to_rational() {
            let mut out = Self::zero_in(self.conductor);
            out.coeffs[0] = q.recip();
            return Ok(out);
        }
        let modulus: Vec<Rational> = cyclotomic_polynomial(self.conductor)
            .iter()
            .map(|c| Rational::from_integer(c.clone()))
            .collect();
        let mut a = self.coeffs.clone();
        trim(&mut a);
        // Extended Euclid on (Φ_m, a), tracking only the cofactor of a.
        let (mut r0, mut r1) = (modulus, a);
        let (mut t0, mut t1): (Vec<Rational>, Vec<Rational>) = (Vec::new(), vec![Rational::one()]);
        while !r1.is_empty() {
            let (q, r) = poly_divrem(&r0, &r1);
            let t2 = poly_sub_mul(&t0, &q, &t1);
            r0 = std::mem::replace(&mut r1, r);
            t0 = std::mem::replace(&mut t1, t2);
        }
        debug_assert_eq!(r0.len(), 1, "Φ_m is irreducible");
        let c = r0[0].recip();
        let poly = t0.into_iter().map(|x| x * &c).collect();
        Ok(Self::from_poly(self.conductor, poly))
    }

    pub fn pow(&self, n: i64) -> Result<Self> {
        let base = if n < 0 { self.inverse()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Self::one_in(self.conductor);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc)
    }

    pub fn one_in(m: u32) -> Self {
        let mut out = Self::zero_in(m);
        out.coeffs[0] = Rational::one();
        out
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Self { conductor: self.conductor, coeffs: self.coeffs.iter().map(|c| c * q).collect() }
    }

    /// Value under the embedding ζ_m ↦ exp(2πi/m). Non-authoritative.
    pub fn to_complex(&self) -> Complex64 {
        let m = self.conductor as f64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| {
                let theta = 2.0 * std::f64::consts::PI * k as f64 / m;
                Complex64::from_polar(rational_to_f64(c), theta)
            })
            .sum()
    }
}

pub(crate) fn rational_to_f64(q: &Rational) -> f64 {
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Scale huge numerators and denominators down together.
            let shift = q.numer().bits().max(q.denom().bits()).saturating_sub(900);
            let n = (q.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (q.denom() >> shift).to_f64().unwrap_or(1.0);
            n / d
        }
    }
}

impl PartialEq for CycloNumber {
    fn eq(&self, other: &Self) -> bool {
        if self.conductor == other.conductor {
            return self.coeffs == other.coeffs;
        }
        let (a, b) = Self::aligned(self, other);
        a.coeffs == b.coeffs
    }
}

impl Eq for CycloNumber {}

impl Zero for CycloNumber {
    fn zero() -> Self {
        Self::from_int(0)
    }
    fn is_zero(&self) -> bool {
        CycloNumber::is_zero(self)
    }
}

impl One for CycloNumber {
    fn one() -> Self {
        Self::from_int(1)
    }
}

impl From<i64> for CycloNumber {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<Rational> for CycloNumber {
    fn from(q: Rational) -> Self {
        Self::from_rational(q)
    }
}

impl Add for &CycloNumber {
    type Output = CycloNumber;
    fn add(self, rhs: &CycloNumber) -> CycloNumber {
        if self.conductor != rhs.conductor {
            let (a, b) = CycloNumber::aligned(self, rhs);
            return &a + &b;
        }
        CycloNumber {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(x, y)| x + y).collect(),
        }
    }
}

impl Sub for &CycloNumber {
    type Output = CycloNumber;
    fn sub(self, rhs: &CycloNumber) -> CycloNumber {
        if self.conductor != rhs.conductor {
            let (a, b) = CycloNumber::aligned(self, rhs);
            return &a - &b;
        }
        CycloNumber {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(x, y)| x - y).collect(),
        }
    }
}

impl Mul for &CycloNumber {
    type Output = CycloNumber;
    fn mul(self, rhs: &CycloNumber) -> CycloNumber {
        // Rational scalars skip the polynomial product.
        if rhs.conductor == 1 {
            return self.scale(&rhs.coeffs[0]);
        }
        if self.conductor == 1 {
            return rhs.scale(&self.coeffs[0]);
        }
        if self.conductor != rhs.conductor {
            let (a, b) = CycloNumber::aligned(self, rhs);
            return &a * &b;
        }
        let n = self.coeffs.len();
        let mut prod = vec![Rational::zero(); 2 * n - 1];
        for (i, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in rhs.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        CycloNumber::from_poly(self.conductor, prod)
    }
}

impl Neg for &CycloNumber {
    type Output = CycloNumber;
    fn neg(self) -> CycloNumber {
        CycloNumber { conductor: self.conductor, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for CycloNumber {
            type Output = CycloNumber;
            fn $method(self, rhs: CycloNumber) -> CycloNumber {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&CycloNumber> for CycloNumber {
            type Output = CycloNumber;
            fn $method(self, rhs: &CycloNumber) -> CycloNumber {
                (&self).$method(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for CycloNumber {
    type Output = CycloNumber;
    fn neg(self) -> CycloNumber {
        -&self
    }
}

impl AddAssign<&CycloNumber> for CycloNumber {
    fn add_assign(&mut self, rhs: &CycloNumber) {
        if self.conductor == rhs.conductor {
            for (x, y) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
                *x += y;
            }
        } else {
            *self = &*self + rhs;
        }
    }
}

impl SubAssign<&CycloNumber> for CycloNumber {
    fn sub_assign(&mut self, rhs: &CycloNumber) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&CycloNumber> for CycloNumber {
    fn mul_assign(&mut self, rhs: &CycloNumber) {
        *self = &*self * rhs;
    }
}

impl fmt::Display for CycloNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.to_rational() {
            return write!(f, "{q}");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            let abs = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match (k, abs.is_one()) {
                (0, _) => write!(f, "{abs}")?,
                (_, true) => write!(f, "z{}^{k}", self.conductor)?,
                (_, false) => write!(f, "{abs}*z{}^{k}", self.conductor)?,
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct CycloRepr {
    conductor: u32,
    coeffs: Vec<String>,
}

pub(crate) fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl Serialize for CycloNumber {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CycloRepr { conductor: self.conductor, coeffs: self.coeffs.iter().map(|c| c.to_string()).collect() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycloNumber {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = CycloRepr::deserialize(d)?;
        let coeffs = repr
            .coeffs
            .iter()
            .map(|c| parse_rational(c))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        CycloNumber::from_coeffs(repr.conductor, coeffs).map_err(serde::de::Error::custom)
    }
}

/// `ζ_m^k`.
pub fn root_of_unity(m: u32, k: i64) -> CycloNumber {
    assert!(m >= 1, "conductor must be positive");
    let e = k.rem_euclid(m as i64) as usize;
    let mut poly = vec![Rational::zero(); e + 1];
    poly[e] = Rational::one();
    CycloNumber::from_poly(m, poly)
}

/// Exact `sin(kπ/denom)`, living in `Q(ζ_M)` with `M = lcm(2·denom, 4)`.
pub fn sin_of(k: i64, denom: u32) -> CycloNumber {
    assert!(denom >= 1, "denominator must be positive");
    let m = (2 * denom).lcm(&4);
    let step = (m / (2 * denom)) as i64;
    let diff = &root_of_unity(m, k * step) - &root_of_unity(m, -k * step);
    // 1/(2i) = -i/2
    let minus_i_half = root_of_unity(m, 3 * (m as i64) / 4).scale(&Rational::new(1.into(), 2.into()));
    &diff * &minus_i_half
}

/// Exact `cos(kπ/denom)` in the same field as [`sin_of`].
pub fn cos_of(k: i64, denom: u32) -> CycloNumber {
    assert!(denom >= 1, "denominator must be positive");
    let m = (2 * denom).lcm(&4);
    let step = (m / (2 * denom)) as i64;
    let sum = &root_of_unity(m, k * step) + &root_of_unity(m, -k * step);
    sum.scale(&Rational::new(1.into(), 2.into()))
}

/// `β_ij = sin((i+j)π/2r) / sin((j-i)π/2r)`, symmetric in `i, j`.
pub fn beta(r: u32, i: u32, j: u32) -> Result<CycloNumber> {
    if r < 2 {
        return Err(Error::InvalidArgument(format!("rank must be at least 2, got {r}")));
    }
    if i == j {
        return Err(Error::InvalidArgument(format!("beta({r}, {i}, {j}) needs distinct indices")));
    }
    if i == 0 || j == 0 || i >= r || j >= r {
        return Err(Error::InvalidArgument(format!("beta indices must lie in 1..{r}, got ({i}, {j})")));
    }
    let (lo, hi) = if i < j { (i, j) } else { (j, i) };
    let num = sin_of((lo + hi) as i64, 2 * r);
    let den = sin_of((hi - lo) as i64, 2 * r);
    Ok(&num * &den.inverse()?)
}

/// Sum over subsets `I ⊂ {1..r-1}` of `Π_{i∈I, j∉I} β_ij`.
pub fn b_constant(r: u32) -> Result<CycloNumber> {
    if r < 2 {
        return Err(Error::InvalidArgument(format!("rank must be at least 2, got {r}")));
    }
    let n = (r - 1) as usize;
    let mut betas = vec![vec![None; n + 1]; n + 1];
    for i in 1..=n {
        for j in (i + 1)..=n {
            let b = beta(r, i as u32, j as u32)?;
            betas[i][j] = Some(b.clone());
            betas[j][i] = Some(b);
        }
    }
    let mut total = CycloNumber::zero_in(4 * r);
    for mask in 0u64..(1u64 << n) {
        let mut term = CycloNumber::one_in(4 * r);
        for i in 1..=n {
            if mask >> (i - 1) & 1 == 0 {
                continue;
            }
            for j in 1..=n {
                if mask >> (j - 1) & 1 == 0 {
                    term = &term * betas[i][j].as_ref().unwrap();
                }
            }
        }
        total += &term;
    }
    Ok(total)
}
