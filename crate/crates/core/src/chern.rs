//! Rational cohomology classes on a surface, `H⁰ ⊕ H² ⊕ H⁴`, with cup
//! product, B-field twists and square roots of units.
//!
//! A class is stored as `(rank, c1, ch2)` where `ch2` is the coefficient of
//! the point class. For a sheaf, `ch = (r, c₁, ½c₁² − c₂)`, so `c₂` is derived.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cyclo::parse_rational;
use crate::error::{Error, Result};
use crate::lattice::{IntersectionLattice, LatticeVector};
use crate::Rational;

fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn half() -> Rational {
    Rational::new(1.into(), 2.into())
}

/// Pairing extended to rational vectors.
pub fn pair_q(lattice: &IntersectionLattice, x: &[Rational], y: &[Rational]) -> Result<Rational> {
    let b = lattice.rank();
    for v in [x, y] {
        if v.len() != b {
            return Err(Error::DimensionMismatch { expected: b, got: v.len() });
        }
    }
    let mut total = Rational::zero();
    for (i, xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        for (j, yj) in y.iter().enumerate() {
            let g = lattice.entry(i, j);
            if g != 0 && !yj.is_zero() {
                total += xi * yj * int(g);
            }
        }
    }
    Ok(total)
}

pub fn to_rational_vector(v: &LatticeVector) -> Vec<Rational> {
    v.0.iter().map(|&x| int(x)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistedChern {
    pub rank: Rational,
    pub c1: Vec<Rational>,
    pub ch2: Rational,
}

impl TwistedChern {
    pub fn new(rank: Rational, c1: Vec<Rational>, ch2: Rational) -> Self {
        Self { rank, c1, ch2 }
    }

    /// The unit `(1, 0, 0)` over a lattice of rank `b`.
    pub fn unit(b: usize) -> Self {
        Self { rank: Rational::one(), c1: vec![Rational::zero(); b], ch2: Rational::zero() }
    }

    /// `ch` of a sheaf with the given rank and Chern classes.
    pub fn of_sheaf(lattice: &IntersectionLattice, rank: i64, c1: &LatticeVector, c2: &Rational) -> Result<Self> {
        let c1 = to_rational_vector(c1);
        let c1sq = pair_q(lattice, &c1, &c1)?;
        Ok(Self { rank: int(rank), c1, ch2: c1sq * half() - c2 })
    }

    /// Derived second Chern class `½c₁² − ch₂`.
    pub fn c2(&self, lattice: &IntersectionLattice) -> Result<Rational> {
        Ok(pair_q(lattice, &self.c1, &self.c1)? * half() - &self.ch2)
    }

    /// Image under `H^{2i} ↦ (−1)^i`, i.e. `ch` of the dual.
    pub fn dual(&self) -> Self {
        Self { rank: self.rank.clone(), c1: self.c1.iter().map(|x| -x).collect(), ch2: self.ch2.clone() }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.c1.len() != other.c1.len() {
            return Err(Error::DimensionMismatch { expected: self.c1.len(), got: other.c1.len() });
        }
        Ok(())
    }

    pub fn cup(&self, other: &Self, lattice: &IntersectionLattice) -> Result<Self> {
        self.check(other)?;
        let c1 = self.c1.iter().zip(&other.c1).map(|(a, b)| &self.rank * b + &other.rank * a).collect();
        let ch2 = &self.rank * &other.ch2 + &other.rank * &self.ch2 + pair_q(lattice, &self.c1, &other.c1)?;
        Ok(Self { rank: &self.rank * &other.rank, c1, ch2 })
    }

    /// Multiplicative inverse; needs nonzero rank.
    pub fn inverse(&self, lattice: &IntersectionLattice) -> Result<Self> {
        if self.rank.is_zero() {
            return Err(Error::DivisionByZero("inverse of a class with zero rank"));
        }
        let r = &self.rank;
        let r2 = r * r;
        let c1: Vec<Rational> = self.c1.iter().map(|c| -c / &r2).collect();
        let ch2 = pair_q(lattice, &self.c1, &self.c1)? / (&r2 * r) - &self.ch2 / &r2;
        Ok(Self { rank: r.recip(), c1, ch2 })
    }
}

/// `e^v = (1, v, ½v²)`.
pub fn exp2(lattice: &IntersectionLattice, v: &[Rational]) -> Result<TwistedChern> {
    let sq = pair_q(lattice, v, v)?;
    Ok(TwistedChern { rank: Rational::one(), c1: v.to_vec(), ch2: sq * half() })
}

fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| Rational::new(n, d))
}

/// The square root with positive rank, solved degree by degree.
pub fn sqrt_unit(a: &TwistedChern, lattice: &IntersectionLattice) -> Result<TwistedChern> {
    if !a.rank.is_positive() {
        return Err(Error::InvalidArgument(format!("square root needs positive rank, got {}", a.rank)));
    }
    let rank = rational_sqrt(&a.rank)
        .ok_or_else(|| Error::InvalidArgument(format!("rank {} is not a rational square", a.rank)))?;
    let two_rank = &rank * int(2);
    let c1: Vec<Rational> = a.c1.iter().map(|c| c / &two_rank).collect();
    let ch2 = (&a.ch2 - pair_q(lattice, &c1, &c1)?) / &two_rank;
    Ok(TwistedChern { rank, c1, ch2 })
}

/// `e^(ξ/r) · ch(F) / √ch(A)`.
pub fn twisted_ch(
    ch_f: &TwistedChern,
    ch_a: &TwistedChern,
    xi: &LatticeVector,
    r: i64,
    lattice: &IntersectionLattice,
) -> Result<TwistedChern> {
    if r == 0 {
        return Err(Error::DivisionByZero("B-field xi/r"));
    }
    let b_field: Vec<Rational> = xi.0.iter().map(|&x| Rational::new(x.into(), r.into())).collect();
    let root = sqrt_unit(ch_a, lattice)?;
    exp2(lattice, &b_field)?.cup(ch_f, lattice)?.cup(&root.inverse(lattice)?, lattice)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntegralityReport {
    pub rank_integral: bool,
    pub c1_integral: bool,
    pub c2_integral: bool,
    #[serde(serialize_with = "ser_rational")]
    pub c2: Rational,
    pub violations: Vec<String>,
}

impl IntegralityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that `c₁` is integral and `c₂ = ½c₁² − ch₂` is an integer.
///
/// This is a necessary condition only; it cannot certify that a module with
/// this Chern character exists.
pub fn integrality_check(t: &TwistedChern, lattice: &IntersectionLattice) -> Result<IntegralityReport> {
    let c2 = t.c2(lattice)?;
    let mut violations = Vec::new();
    let rank_integral = t.rank.is_integer();
    if !rank_integral {
        violations.push(format!("rank {} is not an integer", t.rank));
    }
    let c1_integral = t.c1.iter().all(Rational::is_integer);
    if !c1_integral {
        let shown: Vec<String> = t.c1.iter().map(ToString::to_string).collect();
        violations.push(format!("c1 = ({}) is not integral", shown.join(", ")));
    }
    let c2_integral = c2.is_integer();
    if !c2_integral {
        violations.push(format!("c2 = {c2} is not an integer"));
    }
    Ok(IntegralityReport { rank_integral, c1_integral, c2_integral, c2, violations })
}

/// Virtual dimension `2r·c₂ − (r−1)·c₁² − (r²−1)·χ`.
pub fn vd(r: i64, c1sq: i64, c2: &Rational, chi: i64) -> Rational {
    int(2 * r) * c2 - int((r - 1) * c1sq) - int((r * r - 1) * chi)
}

/// Parity of `vd(r, ξ, c₂)` for any lift `ξ` of `w` and any integer `c₂`,
/// given `w·K mod 2` on a lattice where `K` is characteristic.
pub fn vd_parity(r: i64, w_dot_k: i64, chi: i64) -> i64 {
    if r % 2 == 1 {
        0
    } else {
        (w_dot_k + chi).rem_euclid(2)
    }
}

/// Changing the lift `ξ ↦ ξ + r·γ` moves `c₂` so that the moduli problem
/// (and its virtual dimension) is unchanged.
pub fn shift_bfield(
    r: i64,
    xi: &LatticeVector,
    gamma: &LatticeVector,
    c2: &Rational,
    lattice: &IntersectionLattice,
) -> Result<(LatticeVector, Rational)> {
    let gx = lattice.pair(gamma, xi)?;
    let gg = lattice.square(gamma)?;
    let new_xi = xi.add(&gamma.scale(r));
    let new_c2 = c2 + int((r - 1) * gx) + Rational::new((r * (r - 1) * gg).into(), 2.into());
    Ok((new_xi, new_c2))
}

/// `c₂` of the endomorphism algebra of a rank-one module with Chern classes
/// `(c₁, c₂)`: `2r·c₂ − (r−1)·c₁²`.
pub fn c2_of_endomorphism(r: i64, c1sq: i64, c2: i64) -> i64 {
    2 * r * c2 - (r - 1) * c1sq
}

fn ser_rational<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

#[derive(Serialize, Deserialize)]
struct ChernRepr {
    rank: String,
    c1: Vec<String>,
    ch2: String,
}

impl Serialize for TwistedChern {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ChernRepr {
            rank: self.rank.to_string(),
            c1: self.c1.iter().map(ToString::to_string).collect(),
            ch2: self.ch2.to_string(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TwistedChern {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = ChernRepr::deserialize(d)?;
        let p = |s: &str| parse_rational(s).map_err(D::Error::custom);
        Ok(Self {
            rank: p(&repr.rank)?,
            c1: repr.c1.iter().map(|s| p(s)).collect::<std::result::Result<_, _>>()?,
            ch2: p(&repr.ch2)?,
        })
    }
}
