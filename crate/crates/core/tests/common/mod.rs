//! Shared generators and independent oracles for the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{One, Zero};
use pglsl_core::lattice::{IntersectionLattice, LatticeVector};
use pglsl_core::series::QSeries;
use pglsl_core::surface::{SurfaceData, SwEntry};
use pglsl_core::{CycloNumber, Rational};
use rand::Rng;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn random_lattice<R: Rng>(rng: &mut R, b: usize, spread: i64) -> IntersectionLattice {
    let mut gram = vec![0i64; b * b];
    for i in 0..b {
        for j in i..b {
            let x = rng.gen_range(-spread..=spread);
            gram[i * b + j] = x;
            gram[j * b + i] = x;
        }
    }
    IntersectionLattice::new(b, gram).unwrap()
}

pub fn random_vector<R: Rng>(rng: &mut R, b: usize, spread: i64) -> LatticeVector {
    LatticeVector((0..b).map(|_| rng.gen_range(-spread..=spread)).collect())
}

/// A characteristic vector shifted by a random even vector.
pub fn random_characteristic<R: Rng>(rng: &mut R, lattice: &IntersectionLattice) -> LatticeVector {
    let k = lattice.characteristic_vector().expect("every integral form has a characteristic vector");
    k.add(&random_vector(rng, lattice.rank(), 2).scale(2))
}

/// Random surface on a random lattice: `K` characteristic, SW table of size
/// at most `max_sw` supported on classes with `a² = a·K`.
pub fn random_surface<R: Rng>(rng: &mut R, max_b: usize, max_sw: usize) -> SurfaceData {
    let b = rng.gen_range(1..=max_b);
    let lattice = random_lattice(rng, b, 3);
    let canonical = random_characteristic(rng, &lattice);
    let mut candidates = vec![LatticeVector::zero(b), canonical.clone()];
    for _ in 0..40 {
        let a = random_vector(rng, b, 3);
        if lattice.square(&a).unwrap() == lattice.pair(&a, &canonical).unwrap() && !candidates.contains(&a) {
            candidates.push(a);
        }
    }
    let n = rng.gen_range(1..=max_sw.min(candidates.len()));
    let mut sw_table = Vec::new();
    for _ in 0..n {
        let k = rng.gen_range(0..candidates.len());
        let class = candidates.swap_remove(k);
        let mut value = 0;
        while value == 0 {
            value = rng.gen_range(-3..=3);
        }
        sw_table.push(SwEntry { class, value });
    }
    let s = SurfaceData { chi: rng.gen_range(-2..=5), lattice, canonical, sw_table, tags: Default::default() };
    assert!(s.validate().is_empty(), "{:?}", s.validate());
    s
}

/// Random `QSeries` at denominator `denom` with small integer coefficients.
pub fn random_qseries<R: Rng>(rng: &mut R, denom: u32, trunc: i64, density: f64) -> QSeries {
    let mut terms = Vec::new();
    for n in 0..trunc {
        if rng.gen_bool(density) {
            terms.push((n, CycloNumber::from_int(rng.gen_range(-5..=5))));
        }
    }
    QSeries::from_terms(denom, 0, trunc, terms).unwrap()
}

/// `Π_{n=1}^{N} (1 − xⁿ)^e` for `e ≥ 0`, by repeated multiplication by `(1 − xⁿ)`.
pub fn naive_eta(e: u32, len: usize) -> Vec<BigInt> {
    let mut p = vec![BigInt::zero(); len];
    p[0] = BigInt::one();
    for n in 1..len {
        for _ in 0..e {
            for k in (n..len).rev() {
                let t = p[k - n].clone();
                p[k] -= t;
            }
        }
    }
    p
}

/// Power-series inverse of an integer series with constant term 1.
pub fn naive_inverse(p: &[BigInt]) -> Vec<BigInt> {
    assert!(p[0].is_one());
    let mut out = vec![BigInt::zero(); p.len()];
    out[0] = BigInt::one();
    for k in 1..p.len() {
        let mut s = BigInt::zero();
        for j in 1..=k {
            s += &p[j] * &out[k - j];
        }
        out[k] = -s;
    }
    out
}

pub fn trig_beta(r: u32, i: u32, j: u32) -> f64 {
    let r = r as f64;
    let (i, j) = (i as f64, j as f64);
    ((i + j) * std::f64::consts::PI / (2.0 * r)).sin() / ((j - i) * std::f64::consts::PI / (2.0 * r)).sin()
}

pub fn trig_b(r: u32) -> f64 {
    let n = r - 1;
    let mut total = 0.0;
    for mask in 0u32..(1 << n) {
        let mut prod = 1.0;
        for i in 1..=n {
            for j in 1..=n {
                if mask & (1 << (i - 1)) != 0 && mask & (1 << (j - 1)) == 0 {
                    prod *= trig_beta(r, i.min(j), i.max(j));
                }
            }
        }
        total += prod;
    }
    total
}

pub fn pow_rational(base: i64, e: i64) -> Rational {
    if e >= 0 {
        num_traits::pow(int(base), e as usize)
    } else {
        num_traits::pow(int(base).recip(), e.unsigned_abs() as usize)
    }
}

/// Second realization of a minimal-general-type surface with odd `K²`:
/// `diag(1, 1, K² − 2)` with `K = (1, 1, 1)`.
pub fn alternate_min_general_type(chi: i64, k2: i64) -> SurfaceData {
    assert!(k2 % 2 == 1);
    let lattice = IntersectionLattice::diagonal(&[1, 1, k2 - 2]);
    SurfaceData::min_general_type_on(lattice, LatticeVector(vec![1, 1, 1]), chi).unwrap()
}
