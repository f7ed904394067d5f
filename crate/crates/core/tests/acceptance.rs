//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::time::{Duration, Instant};

use common::*;
use num_bigint::BigInt;
use pglsl_core::bounds::{c2min_report, UpperBound};
use pglsl_core::chern::{shift_bfield, vd, vd_parity};
use pglsl_core::cyclo::{b_constant, beta};
use pglsl_core::formulas::{
    gkl_euler_series, gny_donaldson, gott_donaldson, leading_term, q_trunc_for, UniversalSeriesPack,
};
use pglsl_core::lattice::{enumerate_mu_r, MuRClass, DEFAULT_ENUMERATION_BUDGET};
use pglsl_core::psu::{psu_bruteforce, psu_reduced, ClassSeriesTable};
use pglsl_core::series::{eta_product, QSeries, UPoly};
use pglsl_core::surface::SurfaceData;
use pglsl_core::{CycloNumber, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn class_with(s: &SurfaceData, r: u32, pred: impl Fn(u32) -> bool) -> Option<MuRClass> {
    enumerate_mu_r(&s.lattice, r, DEFAULT_ENUMERATION_BUDGET)
        .ok()?
        .find(|w| pred(s.lattice.pair_mod(&s.canonical, w).unwrap()))
}

fn constant(q: Rational) -> UPoly {
    UPoly::constant(CycloNumber::from_rational(q))
}

fn rank_two_leading_terms() -> Check {
    let start = Instant::now();
    let mut cases = 0;
    for chi in 1..=5 {
        for k2 in 1..=5 {
            let s = SurfaceData::preset_min_general_type(chi, k2).map_err(|e| e.to_string())?;
            let k = s.canonical.clone();
            for parity in 0..2 {
                let w = class_with(&s, 2, |t| (t as i64 + chi) % 2 == parity)
                    .ok_or_else(|| format!("no class with parity {parity} at chi={chi}, K2={k2}"))?;
                let d = gny_donaldson(&s, &w, &k, 10, 4).map_err(|e| e.to_string())?;
                let got = leading_term(&d.series).map_err(|e| e.to_string())?;
                let base = pow_rational(2, 2 - chi + k2);
                let want = if parity == 0 {
                    (0, constant(base * int(2)))
                } else {
                    (1, constant(base * int(2 * k2)))
                };
                ensure(got == want, || format!("chi={chi}, K2={k2}, parity {parity}: got {got:?}"))?;
                cases += 1;
            }
        }
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(1), || format!("took {t:?}"))?;
    Ok(format!("{cases} cases in {t:?}"))
}

fn rank_three_case_table() -> Check {
    let start = Instant::now();
    let mut seen = std::collections::BTreeSet::new();
    let mut cases = 0;
    for chi in 1..=4 {
        for k2 in 1..=5 {
            for t in 0..3u32 {
                let mut s = SurfaceData::preset_min_general_type(chi, k2).map_err(|e| e.to_string())?;
                let mut w = class_with(&s, 3, |x| x == t);
                if w.is_none() {
                    s = alternate_min_general_type(chi, k2);
                    w = class_with(&s, 3, |x| x == t);
                }
                let w = w.ok_or_else(|| format!("no realization of wK={t} at K2={k2}"))?;
                let k = s.canonical.clone();
                let d = gott_donaldson(&s, 3, &w, &k, 4, 1).map_err(|e| e.to_string())?;
                ensure(d.series.coeff(0).coeffs().iter().all(|c| c.conductor() == 12), || "conductor is not 12".into())?;
                let (order, c) = leading_term(&d.series).map_err(|e| e.to_string())?;
                let pow2 = 1i64 << (1 + k2);
                let tail = match (t == 0, chi % 2 == 0) {
                    (true, true) => 2,
                    (true, false) => -2,
                    (false, true) => -1,
                    (false, false) => 1,
                };
                let want = constant(pow_rational(3, 2 - chi + k2) * int(pow2 + tail));
                ensure(order == 0 && c == want, || format!("chi={chi}, K2={k2}, wK={t}: got z^{order} {c:?}"))?;
                seen.insert((t == 0, chi % 2));
                cases += 1;
            }
        }
    }
    let t = start.elapsed();
    ensure(seen.len() == 4, || "not all four cases were exercised".into())?;
    ensure(t < Duration::from_secs(2), || format!("took {t:?}"))?;
    Ok(format!("{cases} cases covering all four rows in {t:?}"))
}

fn rank_degeneration() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 0..25 {
        let s = random_surface(&mut rng, 4, 4);
        let b = s.lattice.rank();
        let w = MuRClass::from_vector(&random_vector(&mut rng, b, 1), 2);
        let l = random_vector(&mut rng, b, 2);
        let a = gny_donaldson(&s, &w, &l, 10, 4).map_err(|e| e.to_string())?;
        let g = gott_donaldson(&s, 2, &w, &l, 10, 4).map_err(|e| e.to_string())?;
        for k in 0..=10 {
            ensure(a.series.coeff(k) == g.series.coeff(k), || format!("draw {n}: z^{k} differs"))?;
        }
    }
    Ok("25 random surfaces through z^10, u^4".into())
}

fn constants() -> Check {
    ensure(b_constant(2).unwrap() == CycloNumber::from_int(2), || "B(2) != 2".into())?;
    ensure(b_constant(3).unwrap() == CycloNumber::from_int(6), || "B(3) != 6".into())?;
    ensure(beta(3, 1, 2).unwrap() == CycloNumber::from_int(2), || "beta(3,1,2) != 2".into())?;
    let mut count = 0;
    for r in 2..=8u32 {
        for i in 1..r {
            for j in i + 1..r {
                let x = beta(r, i, j).unwrap().to_complex();
                let want = trig_beta(r, i, j);
                ensure(x.re > 1e-9 && x.im.abs() < 1e-9 && (x.re - want).abs() < 1e-9, || {
                    format!("beta({r},{i},{j}) = {x}, trig {want}")
                })?;
                count += 1;
            }
        }
    }
    Ok(format!("B(2)=2, B(3)=6, beta(3,1,2)=2, {count} betas positive"))
}

fn discriminant_oracle() -> Check {
    let oracle = naive_eta(24, 12);
    let head: Vec<i64> = [1, -24, 252, -1472].to_vec();
    ensure(oracle[..4].iter().zip(&head).all(|(a, b)| a == &BigInt::from(*b)), || "oracle head mismatch".into())?;
    let got = eta_product(1, &[(int(1), 24)], 12).map_err(|e| e.to_string())?;
    for (n, c) in oracle.iter().enumerate() {
        let want = CycloNumber::from_rational(Rational::from_integer(c.clone()));
        ensure(got.coeff(n as i64) == Some(want), || format!("q^{n} differs"))?;
    }
    Ok("first 12 coefficients match".into())
}

fn bfield_shift() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for n in 0..1000 {
        let r = rng.gen_range(1..=8i64);
        let b = rng.gen_range(1..=5);
        let l = random_lattice(&mut rng, b, 4);
        let xi = random_vector(&mut rng, b, 6);
        let gamma = random_vector(&mut rng, b, 6);
        let c2 = int(rng.gen_range(-50..=50));
        let chi = rng.gen_range(-3..=6);
        let (xi2, c2b) = shift_bfield(r, &xi, &gamma, &c2, &l).unwrap();
        let before = vd(r, l.square(&xi).unwrap(), &c2, chi);
        let after = vd(r, l.square(&xi2).unwrap(), &c2b, chi);
        ensure(before == after, || format!("draw {n}: {before} != {after}"))?;
    }
    Ok("1000 draws".into())
}

fn parity_law() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 0..1000 {
        let b = rng.gen_range(1..=5);
        let l = random_lattice(&mut rng, b, 4);
        let k = random_characteristic(&mut rng, &l);
        let r = rng.gen_range(2..=6i64);
        let xi = random_vector(&mut rng, b, 6);
        let c2 = rng.gen_range(-50..=50);
        let chi = rng.gen_range(-3..=6);
        let v = vd(r, l.square(&xi).unwrap(), &int(c2), chi);
        ensure(v.is_integer(), || format!("draw {n}: vd {v} not integral"))?;
        let got = v.to_integer() % BigInt::from(2);
        let got = if got < BigInt::from(0) { -got } else { got };
        let want = vd_parity(r, l.pair(&xi, &k).unwrap(), chi);
        ensure(got == BigInt::from(want), || format!("draw {n}: parity {got} vs {want}"))?;
    }
    Ok("1000 characteristic lattices, r in 2..=6".into())
}

fn psu_equivalence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for n in 0..50 {
        let r = if n % 2 == 0 { 2 } else { 3 };
        let s = random_surface(&mut rng, 5, 2);
        let b = s.lattice.rank();
        let c1 = random_vector(&mut rng, b, 4);
        let trunc = q_trunc_for(r, 6);
        let collapsed: std::collections::BTreeMap<u32, QSeries> =
            (0..r).map(|t| (t, random_qseries(&mut rng, 2 * r, trunc, 0.3))).collect();
        let mut full = std::collections::BTreeMap::new();
        for w in enumerate_mu_r(&s.lattice, r, DEFAULT_ENUMERATION_BUDGET).unwrap() {
            let t = s.lattice.pair_mod(&s.canonical, &w).unwrap();
            full.insert(w.entries().to_vec(), collapsed[&t].clone());
        }
        let brute = psu_bruteforce(&s, r, &c1, &ClassSeriesTable::Full { r, entries: full }, DEFAULT_ENUMERATION_BUDGET)
            .map_err(|e| e.to_string())?;
        let reduced = psu_reduced(&s, r, &c1, &collapsed).map_err(|e| e.to_string())?;
        ensure(brute == reduced, || format!("draw {n} (r={r}, b={b}) differs"))?;
        ensure(brute.trunc() == trunc, || format!("draw {n}: truncation {} instead of {trunc}", brute.trunc()))?;
    }
    Ok("50 draws, r in {2,3}, b <= 5".into())
}

fn c2min_ledger() -> Check {
    let s = SurfaceData::preset_min_general_type(2, 1).unwrap();
    let rep = c2min_report(&s, 2, &MuRClass::new(2, &[1])).map_err(|e| e.to_string())?;
    ensure(rep.lower == 4 && rep.upper == UpperBound::Known(7), || format!("r=2: got {} .. {:?}", rep.lower, rep.upper))?;
    ensure(rep.agrees_with_closed_form, || "r=2: delta disagrees with closed form".into())?;
    for k2 in 1..=4 {
        let s = SurfaceData::preset_min_general_type(1, k2).unwrap();
        for w in enumerate_mu_r(&s.lattice, 3, 100).unwrap() {
            let rep = c2min_report(&s, 3, &w).map_err(|e| e.to_string())?;
            ensure(rep.upper == UpperBound::Known(8) && rep.agrees_with_closed_form, || {
                format!("r=3, K2={k2}, w={:?}: upper {:?}", w.entries(), rep.upper)
            })?;
        }
    }
    Ok("window {4,...,7} at r=2; upper 8 at r=3, chi=1".into())
}

fn gkl_desk_check() -> Check {
    let mut cases = 0;
    for r in [2u32, 3] {
        let trunc = q_trunc_for(r, 6);
        let pack = UniversalSeriesPack::unit(r, trunc);
        for chi in 1..=4i64 {
            for k2 in 1..=4i64 {
                let s = SurfaceData::preset_min_general_type(chi, k2).unwrap();
                // Π(1 − x^n)^(12χ) inverted, with x = q^(1/r) = q^(2/2r).
                let len = (trunc / 2) as usize;
                let eta = naive_inverse(&naive_eta(12 * chi as u32, len));
                for w in enumerate_mu_r(&s.lattice, r, 100).unwrap() {
                    let t = s.lattice.pair_mod(&s.canonical, &w).unwrap() as i64;
                    let sign = if chi % 2 == 0 { 1 } else { -1 };
                    let sw_sum = match r {
                        2 => 1 + sign * if t % 2 == 0 { 1 } else { -1 },
                        _ => 2 + sign * if t == 0 { 2 } else { -1 },
                    };
                    let scalar = pow_rational(r as i64, 2 + k2 - chi) * int(sw_sum);
                    let w2 = s.lattice.square(&w.lift()).unwrap();
                    let ri = r as i64;
                    let delta = (-(ri - 1) * w2 - (ri * ri - 1) * chi).rem_euclid(2 * ri);
                    let out = gkl_euler_series(&s, r, &w, &pack, trunc).map_err(|e| e.to_string())?;
                    ensure(out.residue == delta, || format!("r={r}: residue {} vs {delta}", out.residue))?;
                    for (k, c) in eta.iter().enumerate() {
                        let n = 2 * k as i64;
                        let value = CycloNumber::from_rational(scalar.clone() * Rational::from_integer(c.clone()));
                        ensure(out.full.coeff(n) == Some(value.clone()), || format!("r={r}, chi={chi}, K2={k2}: full q^({n}/{})", 2 * r))?;
                        let masked = if n.rem_euclid(2 * ri) == delta { value } else { CycloNumber::from_int(0) };
                        ensure(out.series.coeff(n) == Some(masked), || format!("r={r}, chi={chi}, K2={k2}: q^({n}/{})", 2 * r))?;
                        ensure(out.full.coeff(n + 1).is_some_and(|c| c.is_zero()), || "odd numerator present".into())?;
                    }
                    ensure(out.series.residues(2 * ri).iter().all(|&x| x == delta), || "support leaves residue class".into())?;
                    cases += 1;
                }
            }
        }
    }
    Ok(format!("{cases} (r, surface, w) cases"))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("1 rank-2 leading terms", rank_two_leading_terms),
        ("2 rank-3 leading terms", rank_three_case_table),
        ("3 rank-2 degeneration", rank_degeneration),
        ("4 constants", constants),
        ("5 discriminant oracle", discriminant_oracle),
        ("6 B-field shift", bfield_shift),
        ("7 parity law", parity_law),
        ("8 PSU oracle equivalence", psu_equivalence),
        ("9 c2min ledger", c2min_ledger),
        ("10 GKL desk check", gkl_desk_check),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match std::panic::catch_unwind(check) {
            Ok(Ok(detail)) => println!("PASS  {name}: {detail}"),
            Ok(Err(why)) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
            Err(_) => {
                failed += 1;
                println!("FAIL  {name}: panicked");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
