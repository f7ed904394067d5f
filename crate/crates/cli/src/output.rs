//! JSON rendering. Exact values are always present; `approx` fields are
//! added only on request and are not authoritative.

use std::io::Write;

use pglsl_core::series::{UPoly, ZSeries};
use pglsl_core::CycloNumber;
use serde_json::{json, Value};

pub fn cyclo(c: &CycloNumber, approx: bool) -> Value {
    let mut v = serde_json::to_value(c).expect("cyclotomic number serializes");
    if let Some(q) = c.to_rational() {
        v["rational"] = json!(q.to_string());
    }
    if approx {
        let z = c.to_complex();
        v["approx"] = json!([z.re, z.im]);
    }
    v
}

/// A `u`-polynomial as a list of `{u, coeff}` records with nonzero coefficient.
pub fn upoly(p: &UPoly, approx: bool) -> Value {
    Value::Array(
        p.coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(u, c)| json!({ "u": u, "coeff": cyclo(c, approx) }))
            .collect(),
    )
}

pub fn zseries(z: &ZSeries, approx: bool) -> Value {
    let mut v = serde_json::to_value(z).expect("series serializes");
    if approx {
        let approx_terms: Vec<Value> = (0..=z.z_trunc())
            .flat_map(|k| {
                z.coeff(k).coeffs().iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(u, c)| {
                    let x = c.to_complex();
                    json!({ "z": k, "u": u, "approx": [x.re, x.im] })
                })
            })
            .collect();
        v["approx"] = Value::Array(approx_terms);
    }
    v
}

/// Writes to stdout; a closed pipe is not an error.
pub fn print(v: &Value) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{}", serde_json::to_string_pretty(v).expect("json renders"));
}
