//! `pglsl`: evaluate Donaldson and Euler-characteristic generating functions,
//! twisted Chern characters and `c₂^min` bounds from the command line.
//!
//! Output is pretty-printed JSON on stdout. Exit codes: 0 success, 1 parse or
//! I/O error, 2 validation failure, 3 enumeration budget exceeded, 4 no
//! leading term below the truncation.

mod input;
mod output;

use std::collections::BTreeMap;
use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use pglsl_core::bounds::c2min_report;
use pglsl_core::chern::{integrality_check, twisted_ch, vd, TwistedChern};
use pglsl_core::formulas::{
    gkl_euler_series, gny_donaldson, gott_donaldson, leading_term, q_trunc_for, DonaldsonSeries,
    UniversalSeriesPack, DEFAULT_Q_ORDER, DEFAULT_U_DEGREE, DEFAULT_Z_TRUNC,
};
use pglsl_core::lattice::{MuRClass, DEFAULT_ENUMERATION_BUDGET};
use pglsl_core::psu::{is_prime, psu_bruteforce, psu_reduced, ClassSeriesTable};
use pglsl_core::surface::SurfaceData;
use pglsl_core::{Error, Result};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "pglsl", version, about = "Exact calculator for twisted-sheaf generating functions")]
struct Cli {
    /// Add floating-point renderings next to exact values.
    #[arg(long, global = true)]
    float: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SurfaceArgs {
    /// Descriptor file, or a preset `mgt_chi<chi>_k<K^2>`.
    #[arg(long)]
    surface: String,
}

#[derive(Args)]
struct DonaldsonArgs {
    #[command(flatten)]
    surface: SurfaceArgs,
    /// Class mod r: comma list, `0`, `K`, `odd`, `even` or `wk=<t>`.
    #[arg(long, default_value = "0")]
    w: String,
    /// Class L: comma list, `0` or `K`.
    #[arg(long = "L", default_value = "K")]
    l: String,
    /// Highest power of z kept.
    #[arg(long = "z-order", default_value_t = DEFAULT_Z_TRUNC)]
    z_order: usize,
    /// Highest power of u kept.
    #[arg(long = "u-degree", default_value_t = DEFAULT_U_DEGREE)]
    u_degree: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum PsuMethod {
    Brute,
    Reduced,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Rank-2 Donaldson series; `--w` is the class of c1 mod 2.
    Gny(DonaldsonArgs),
    /// Rank-r Donaldson series with sine and beta weights.
    Gott {
        #[arg(long)]
        r: u32,
        #[command(flatten)]
        args: DonaldsonArgs,
    },
    /// Leading z-term of the rank-r Donaldson series.
    Leading {
        #[arg(long)]
        r: u32,
        #[command(flatten)]
        args: DonaldsonArgs,
    },
    /// Euler-characteristic series from a universal series pack.
    Gkl {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long)]
        r: u32,
        #[arg(long, default_value = "0")]
        w: String,
        /// Pack file; every series defaults to 1 when omitted.
        #[arg(long)]
        pack: Option<String>,
        /// Truncation in whole powers of q.
        #[arg(long = "q-order", default_value_t = DEFAULT_Q_ORDER)]
        q_order: i64,
    },
    /// Lower and upper bounds on c2 of Azumaya algebras.
    Bounds {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long)]
        r: u32,
        #[arg(long, default_value = "0")]
        w: String,
    },
    /// Sum of per-class series weighted by the character of c1.
    Psu {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long)]
        r: u32,
        #[arg(long, default_value = "0")]
        c1: String,
        /// Class series table file.
        #[arg(long)]
        table: String,
        #[arg(long, value_enum, default_value = "both")]
        method: PsuMethod,
    },
    /// Integrality of a (possibly twisted) Chern character.
    ChernCheck {
        #[command(flatten)]
        surface: SurfaceArgs,
        /// Chern character as JSON `{"rank": "p/q", "c1": [...], "ch2": "p/q"}`.
        #[arg(long)]
        ch: String,
        /// Chern character of the algebra; when given, `ch` is twisted first.
        #[arg(long = "ch-a")]
        ch_a: Option<String>,
        /// Integral class xi for the B-field xi/r.
        #[arg(long, default_value = "0")]
        xi: String,
        #[arg(long, default_value_t = 1)]
        r: i64,
    },
    /// Virtual dimension 2rc2 - (r-1)c1^2 - (r^2-1)chi.
    Vd {
        #[arg(long)]
        r: i64,
        #[arg(long)]
        c1sq: i64,
        #[arg(long)]
        c2: String,
        #[arg(long)]
        chi: i64,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Validation(_) => 2,
        Error::BudgetExceeded { .. } => 3,
        Error::NoLeadingTerm(_) => 4,
        _ => 1,
    }
}

fn rational(text: &str) -> Result<BigRational> {
    text.trim().parse::<BigRational>().map_err(|e| Error::Parse(format!("`{text}` is not a rational: {e}")))
}

fn chern_json(text: &str) -> Result<TwistedChern> {
    let body = if text.trim_start().starts_with('{') {
        text.to_owned()
    } else {
        fs::read_to_string(text).map_err(|e| Error::Parse(format!("cannot read `{text}`: {e}")))?
    };
    serde_json::from_str(&body).map_err(|e| Error::Parse(format!("Chern character: {e}")))
}

fn surface_header(s: &SurfaceData) -> Value {
    json!({ "chi": s.chi, "K2": s.k_squared(), "rank": s.lattice.rank() })
}

fn class_json(s: &SurfaceData, w: &MuRClass) -> Result<Value> {
    Ok(json!({ "entries": w.entries(), "wK": s.lattice.pair_mod(&s.canonical, w)? }))
}

fn donaldson_json(s: &SurfaceData, w: &MuRClass, d: &DonaldsonSeries, approx: bool) -> Result<Value> {
    let leading = match leading_term(&d.series) {
        Ok((order, c)) => json!({ "order": order, "coeff": output::upoly(&c, approx) }),
        Err(Error::NoLeadingTerm(_)) => Value::Null,
        Err(e) => return Err(e),
    };
    Ok(json!({
        "r": d.r,
        "surface": surface_header(s),
        "w": class_json(s, w)?,
        "vd_parity": d.vd_parity,
        "off_parity_orders": d.off_parity,
        "leading": leading,
        "series": output::zseries(&d.series, approx),
    }))
}

fn run(cli: Cli) -> Result<Value> {
    let approx = cli.float;
    match cli.command {
        Command::Gny(a) => {
            let s = input::load_surface(&a.surface.surface)?;
            let w = input::parse_class(&a.w, &s, 2)?;
            let l = input::parse_vector(&a.l, &s)?;
            let d = gny_donaldson(&s, &w, &l, a.z_order, a.u_degree)?;
            let mut v = donaldson_json(&s, &w, &d, approx)?;
            v["command"] = json!("gny");
            Ok(v)
        }
        Command::Gott { r, args: a } => {
            let s = input::load_surface(&a.surface.surface)?;
            let w = input::parse_class(&a.w, &s, r)?;
            let l = input::parse_vector(&a.l, &s)?;
            let d = gott_donaldson(&s, r, &w, &l, a.z_order, a.u_degree)?;
            let mut v = donaldson_json(&s, &w, &d, approx)?;
            v["command"] = json!("gott");
            Ok(v)
        }
        Command::Leading { r, args: a } => {
            let s = input::load_surface(&a.surface.surface)?;
            let w = input::parse_class(&a.w, &s, r)?;
            let l = input::parse_vector(&a.l, &s)?;
            let d = gott_donaldson(&s, r, &w, &l, a.z_order, a.u_degree)?;
            let (order, c) = leading_term(&d.series)?;
            Ok(json!({
                "command": "leading",
                "r": r,
                "surface": surface_header(&s),
                "w": class_json(&s, &w)?,
                "order": order,
                "coeff": output::upoly(&c, approx),
            }))
        }
        Command::Gkl { surface, r, w, pack, q_order } => {
            let s = input::load_surface(&surface.surface)?;
            let w = input::parse_class(&w, &s, r)?;
            let trunc = q_trunc_for(r, q_order);
            let pack = match pack {
                Some(path) => {
                    let text =
                        fs::read_to_string(&path).map_err(|e| Error::Parse(format!("cannot read `{path}`: {e}")))?;
                    UniversalSeriesPack::from_json(&text)?
                }
                None => UniversalSeriesPack::unit(r, trunc),
            };
            let out = gkl_euler_series(&s, r, &w, &pack, trunc)?;
            Ok(json!({
                "command": "gkl",
                "r": r,
                "surface": surface_header(&s),
                "w": class_json(&s, &w)?,
                "residue": out.residue,
                "rank_is_prime": is_prime(r),
                "series": out.series,
                "full": out.full,
            }))
        }
        Command::Bounds { surface, r, w } => {
            let s = input::load_surface(&surface.surface)?;
            let w = input::parse_class(&w, &s, r)?;
            let report = c2min_report(&s, r, &w)?;
            let mut v = serde_json::to_value(&report).expect("report serializes");
            v["command"] = json!("bounds");
            v["surface"] = surface_header(&s);
            v["w"] = class_json(&s, &w)?;
            Ok(v)
        }
        Command::Psu { surface, r, c1, table, method } => {
            let s = input::load_surface(&surface.surface)?;
            let c1 = input::parse_vector(&c1, &s)?;
            let text = fs::read_to_string(&table).map_err(|e| Error::Parse(format!("cannot read `{table}`: {e}")))?;
            let table = ClassSeriesTable::from_json(&text)?;
            let mut v = json!({ "command": "psu", "r": r, "surface": surface_header(&s), "rank_is_prime": is_prime(r) });
            let brute = match method {
                PsuMethod::Brute | PsuMethod::Both => Some(psu_bruteforce(&s, r, &c1, &table, DEFAULT_ENUMERATION_BUDGET)?),
                PsuMethod::Reduced => None,
            };
            let reduced = match (method, &table) {
                (PsuMethod::Reduced | PsuMethod::Both, ClassSeriesTable::Collapsed { entries, .. }) => {
                    Some(psu_reduced(&s, r, &c1, entries)?)
                }
                (PsuMethod::Reduced, ClassSeriesTable::Full { .. }) => {
                    return Err(Error::InvalidArgument("the reduced method needs a collapsed table".into()))
                }
                _ => None,
            };
            if let (Some(a), Some(b)) = (&brute, &reduced) {
                v["agree"] = json!(a == b);
            }
            v["series"] = json!(reduced.as_ref().or(brute.as_ref()));
            Ok(v)
        }
        Command::ChernCheck { surface, ch, ch_a, xi, r } => {
            let s = input::load_surface(&surface.surface)?;
            let mut t = chern_json(&ch)?;
            if t.c1.len() != s.lattice.rank() {
                return Err(Error::DimensionMismatch { expected: s.lattice.rank(), got: t.c1.len() });
            }
            if let Some(a) = ch_a {
                let a = chern_json(&a)?;
                t = twisted_ch(&t, &a, &input::parse_vector(&xi, &s)?, r, &s.lattice)?;
            }
            let report = integrality_check(&t, &s.lattice)?;
            Ok(json!({ "command": "chern-check", "twisted": t, "passed": report.passed(), "report": report }))
        }
        Command::Vd { r, c1sq, c2, chi } => {
            let value = vd(r, c1sq, &rational(&c2)?, chi);
            Ok(json!({ "command": "vd", "vd": value.to_string() }))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(v) => {
            output::print(&v);
            ExitCode::SUCCESS
        }
        Err(e) => {
            let details: BTreeMap<&str, Value> = match &e {
                Error::Validation(v) => [("violations", json!(v))].into_iter().collect(),
                _ => BTreeMap::new(),
            };
            eprintln!("error: {e}");
            for (k, v) in details {
                eprintln!("{k}: {v}");
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
