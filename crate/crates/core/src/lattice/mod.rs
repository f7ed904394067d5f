//! Integer intersection lattices standing in for `H²(X, Z)` with its cup
//! product, plus mod-`r` classes `w ∈ H²(X, μ_r) ≅ H²(X, Z)/r`.

mod snf;

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

pub use snf::{smith_normal_form, IntMatrix, Snf};

use crate::error::{Error, Result};

/// Default cap on `r^b` for exhaustive class enumeration.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 1_000_000;

/// An integral class, written in the lattice basis.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeVector(pub Vec<i64>);

impl LatticeVector {
    pub fn zero(rank: usize) -> Self {
        Self(vec![0; rank])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: i64) -> Self {
        Self(self.0.iter().map(|a| a * k).collect())
    }
}

impl From<Vec<i64>> for LatticeVector {
    fn from(v: Vec<i64>) -> Self {
        Self(v)
    }
}

/// A class in `(Z/r)^b`, entries kept in `0..r`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MuRClass {
    r: u32,
    entries: Vec<u32>,
}

impl MuRClass {
    pub fn new(r: u32, entries: &[i64]) -> Self {
        assert!(r >= 1, "modulus must be positive");
        Self { r, entries: entries.iter().map(|&x| x.rem_euclid(r as i64) as u32).collect() }
    }

    pub fn zero(r: u32, rank: usize) -> Self {
        Self { r, entries: vec![0; rank] }
    }

    pub fn from_vector(v: &LatticeVector, r: u32) -> Self {
        Self::new(r, &v.0)
    }

    pub fn modulus(&self) -> u32 {
        self.r
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    /// The representative with entries in `0..r`. Any other lift differs by
    /// `r·γ` for an integral `γ`.
    pub fn lift(&self) -> LatticeVector {
        LatticeVector(self.entries.iter().map(|&x| x as i64).collect())
    }
}

/// A symmetric integer bilinear form on `Z^b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionLattice {
    rank: usize,
    gram: Vec<i64>,
}

impl IntersectionLattice {
    /// Builds a lattice from a row-major Gram matrix. Symmetry is not
    /// enforced here; [`IntersectionLattice::is_symmetric`] reports it.
    pub fn new(rank: usize, gram: Vec<i64>) -> Result<Self> {
        if gram.len() != rank * rank {
            return Err(Error::DimensionMismatch { expected: rank * rank, got: gram.len() });
        }
        Ok(Self { rank, gram })
    }

    pub fn diagonal(entries: &[i64]) -> Self {
        let b = entries.len();
        let mut gram = vec![0; b * b];
        for (i, &e) in entries.iter().enumerate() {
            gram[i * b + i] = e;
        }
        Self { rank: b, gram }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn gram(&self) -> &[i64] {
        &self.gram
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.gram[i * self.rank + j]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.rank).all(|i| (0..i).all(|j| self.entry(i, j) == self.entry(j, i)))
    }

    pub fn gram_matrix(&self) -> IntMatrix {
        IntMatrix::from_row_major(self.rank, self.rank, self.gram.clone())
    }

    pub fn determinant(&self) -> i64 {
        self.gram_matrix().determinant()
    }

    pub fn is_unimodular(&self) -> bool {
        self.determinant().abs() == 1
    }

    fn check_len(&self, v: &LatticeVector) -> Result<()> {
        if v.len() != self.rank {
            return Err(Error::DimensionMismatch { expected: self.rank, got: v.len() });
        }
        Ok(())
    }

    /// `xᵀ · gram · y`.
    pub fn pair(&self, x: &LatticeVector, y: &LatticeVector) -> Result<i64> {
        self.check_len(x)?;
        self.check_len(y)?;
        let mut total = 0i64;
        for (i, &xi) in x.0.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            let row = &self.gram[i * self.rank..(i + 1) * self.rank];
            let inner: i64 = row.iter().zip(&y.0).map(|(g, yj)| g * yj).sum();
            total += xi * inner;
        }
        Ok(total)
    }

    /// `x²`.
    pub fn square(&self, x: &LatticeVector) -> Result<i64> {
        self.pair(x, x)
    }

    /// The linear functional `y ↦ x·y` as a coefficient vector.
    pub fn functional(&self, x: &LatticeVector) -> Result<Vec<i64>> {
        self.check_len(x)?;
        Ok((0..self.rank)
            .map(|j| (0..self.rank).map(|i| x.0[i] * self.entry(i, j)).sum())
            .collect())
    }

    /// Pairing of an integral class with a mod-`r` class, reduced mod `r`.
    pub fn pair_mod(&self, x: &LatticeVector, w: &MuRClass) -> Result<u32> {
        let p = self.pair(x, &w.lift())?;
        Ok(p.rem_euclid(w.modulus() as i64) as u32)
    }

    /// Wu's relation: `x² ≡ x·K (mod 2)` for all `x`, checked on the basis.
    pub fn is_characteristic(&self, k: &LatticeVector) -> Result<bool> {
        self.check_len(k)?;
        let f = self.functional(k)?;
        Ok((0..self.rank).all(|i| (self.entry(i, i) - f[i]).rem_euclid(2) == 0))
    }

    /// Some characteristic vector, found by solving `gram·K ≡ diag (mod 2)`.
    pub fn characteristic_vector(&self) -> Option<LatticeVector> {
        let b = self.rank;
        // Augmented system over GF(2); gram is used via its transpose-free rows
        // since K·e_i = Σ_j K_j gram[j][i].
        let mut rows: Vec<Vec<u8>> = (0..b)
            .map(|i| {
                let mut row: Vec<u8> = (0..b).map(|j| self.entry(j, i).rem_euclid(2) as u8).collect();
                row.push(self.entry(i, i).rem_euclid(2) as u8);
                row
            })
            .collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..b {
            let Some(p) = (r..b).find(|&i| rows[i][c] == 1) else { continue };
            rows.swap(r, p);
            for i in 0..b {
                if i != r && rows[i][c] == 1 {
                    let pivot_row = rows[r].clone();
                    for (x, y) in rows[i].iter_mut().zip(pivot_row) {
                        *x ^= y;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        if rows[r..].iter().any(|row| row[b] == 1) {
            return None;
        }
        let mut k = vec![0i64; b];
        for (i, &c) in pivots.iter().enumerate() {
            k[c] = rows[i][b] as i64;
        }
        Some(LatticeVector(k))
    }
}

/// Iterator over all of `(Z/r)^b` in lexicographic order.
#[derive(Clone, Debug)]
pub struct MuRClasses {
    r: u32,
    current: Option<Vec<u32>>,
}

impl Iterator for MuRClasses {
    type Item = MuRClass;

    fn next(&mut self) -> Option<MuRClass> {
        let cur = self.current.take()?;
        let out = MuRClass { r: self.r, entries: cur.clone() };
        let mut next = cur;
        let mut carry = true;
        for x in next.iter_mut().rev() {
            *x += 1;
            if *x == self.r {
                *x = 0;
            } else {
                carry = false;
                break;
            }
        }
        if !carry {
            self.current = Some(next);
        }
        Some(out)
    }
}

/// Number of classes `r^b`, or `None` on overflow.
pub fn class_count(lattice: &IntersectionLattice, r: u32) -> Option<u64> {
    (r as u64).checked_pow(u32::try_from(lattice.rank()).ok()?)
}

/// Every `w ∈ (Z/r)^b` exactly once, refusing when `r^b > budget`.
pub fn enumerate_mu_r(lattice: &IntersectionLattice, r: u32, budget: u64) -> Result<MuRClasses> {
    if r == 0 {
        return Err(Error::InvalidArgument("modulus must be positive".into()));
    }
    match class_count(lattice, r) {
        Some(n) if n <= budget => Ok(MuRClasses { r, current: Some(vec![0; lattice.rank()]) }),
        n => Err(Error::BudgetExceeded {
            count: n.map_or_else(|| format!("{r}^{}", lattice.rank()), |n| n.to_string()),
            budget,
        }),
    }
}

/// `N(s, t) = #{w : c₁·w ≡ s, K·w ≡ t (mod r)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterCounts {
    pub r: u32,
    pub counts: BTreeMap<(u32, u32), BigUint>,
}

impl CharacterCounts {
    pub fn get(&self, s: u32, t: u32) -> BigUint {
        self.counts.get(&(s, t)).cloned().unwrap_or_default()
    }

    pub fn total(&self) -> BigUint {
        self.counts.values().sum()
    }
}

/// Joint distribution of the two pairing functionals `w ↦ c₁·w` and
/// `w ↦ K·w` over `(Z/r)^b`, computed from the Smith normal form of the
/// 2×b functional matrix instead of enumeration.
pub fn character_counts(
    lattice: &IntersectionLattice,
    r: u32,
    c1: &LatticeVector,
    k: &LatticeVector,
) -> Result<CharacterCounts> {
    if r == 0 {
        return Err(Error::InvalidArgument("modulus must be positive".into()));
    }
    let b = lattice.rank();
    let f1 = lattice.functional(c1)?;
    let f2 = lattice.functional(k)?;
    let a = IntMatrix::from_rows(&[f1, f2]);
    let snf = smith_normal_form(&a);
    let rr = r as i64;
    let free = BigUint::from(r).pow(b.saturating_sub(2) as u32);
    let mut counts = BTreeMap::new();
    for s in 0..r {
        for t in 0..r {
            // D·y ≡ U·(s, t) (mod r) with y = V⁻¹ w ranging over (Z/r)^b.
            let target = [s as i64, t as i64];
            let mut n = free.clone();
            for i in 0..2 {
                let c = (snf.u[(i, 0)] * target[0] + snf.u[(i, 1)] * target[1]).rem_euclid(rr);
                let solutions: u32 = if i < b {
                    let g = snf.d[(i, i)].rem_euclid(rr).gcd(&rr);
                    if c % g == 0 { g as u32 } else { 0 }
                } else if c == 0 {
                    1
                } else {
                    0
                };
                n *= solutions;
            }
            if !n.is_zero() {
                counts.insert((s, t), n);
            }
        }
    }
    debug_assert_eq!(counts.values().sum::<BigUint>(), BigUint::from(r).pow(b as u32));
    Ok(CharacterCounts { r, counts })
}

/// Brute-force tally of the same distribution, for small lattices.
pub fn character_counts_by_enumeration(
    lattice: &IntersectionLattice,
    r: u32,
    c1: &LatticeVector,
    k: &LatticeVector,
    budget: u64,
) -> Result<CharacterCounts> {
    let mut counts: BTreeMap<(u32, u32), BigUint> = BTreeMap::new();
    for w in enumerate_mu_r(lattice, r, budget)? {
        let key = (lattice.pair_mod(c1, &w)?, lattice.pair_mod(k, &w)?);
        *counts.entry(key).or_insert_with(BigUint::zero) += BigUint::one();
    }
    Ok(CharacterCounts { r, counts })
}
