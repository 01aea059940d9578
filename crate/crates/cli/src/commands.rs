use std::path::Path;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use kstack::bun::{self, CurveData};
use kstack::catalog::{MotivicClass, SymPoly, SymbolTable};
use kstack::completed::{expand_symbolic, CompletedClass, GrowthCertificate};
use kstack::expr::{self, Expr};
use kstack::fforacle::{self, integer_json, rational_json, MassResult, Stratum};
use kstack::lring::TateRational;
use kstack::weights::{weight_series_symbolic, WeightSeries};
use kstack::{Error, Result};

pub struct Output {
    pub text: String,
    pub json: Value,
}

pub fn load_symbols(path: Option<&Path>) -> Result<SymbolTable> {
    match path {
        None => Ok(SymbolTable::new()),
        Some(p) => SymbolTable::from_manifest_file(p, closed_form),
    }
}

fn closed_form(text: &str) -> Result<TateRational> {
    let e = expr::parse(text)?;
    expr::eval(&e, &SymbolTable::new())?
        .as_tate()
        .ok_or_else(|| Error::Manifest(format!("closed form `{text}` mentions symbols")))
}

fn parse_eval(text: &str, table: &SymbolTable) -> Result<(Expr, MotivicClass)> {
    let e = expr::parse(text)?;
    let x = expr::eval(&e, table)?;
    Ok((e, x))
}

fn option_json(x: Option<i64>) -> Value {
    x.map_or(Value::Null, Value::from)
}

pub fn eval(text: &str, table: &SymbolTable) -> Result<Output> {
    let (e, x) = parse_eval(text, table)?;
    let dim = x.dim(table)?;
    Ok(Output {
        text: x.to_string(),
        json: json!({
            "command": "eval",
            "expr": e.to_string(),
            "class": x.to_string(),
            "dimension": option_json(dim),
        }),
    })
}

fn series_of(x: &MotivicClass, floor: i64) -> CompletedClass<SymPoly> {
    expand_symbolic(x, floor)
}

fn series_json(s: &CompletedClass<SymPoly>) -> Value {
    let terms: Vec<Value> = s
        .terms()
        .map(|(k, c)| json!({"exponent": k, "coeff": coeff_json(c)}))
        .collect();
    json!({"floor": option_json(s.floor()), "terms": terms, "text": s.to_string()})
}

fn coeff_json(c: &SymPoly) -> Value {
    let mut terms = c.terms();
    match (terms.next(), terms.next()) {
        (Some((m, n)), None) if m.is_one() => integer_json(n),
        _ => Value::String(c.to_string()),
    }
}

pub fn expand(text: &str, floor: i64, table: &SymbolTable) -> Result<Output> {
    let (e, x) = parse_eval(text, table)?;
    let s = series_of(&x, floor);
    let mut v = series_json(&s);
    v["command"] = json!("expand");
    v["expr"] = json!(e.to_string());
    Ok(Output {
        text: s.to_string(),
        json: v,
    })
}

fn parse_growth(text: &str) -> Result<GrowthCertificate> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let bad = || Error::InvalidArgument(format!("growth `{text}` is not `C,d,D`"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let c: u64 = parts[0].parse().map_err(|_| bad())?;
    let d: u32 = parts[1].parse().map_err(|_| bad())?;
    let big_d: u64 = parts[2].parse().map_err(|_| bad())?;
    Ok(GrowthCertificate::new(c, d, big_d))
}

pub fn count(
    text: &str,
    q: u64,
    floor: Option<i64>,
    growth: Option<&str>,
    table: &SymbolTable,
) -> Result<Output> {
    let (e, x) = parse_eval(text, table)?;
    let cert = growth.map(parse_growth).transpose()?;
    let Some(floor) = floor else {
        if cert.is_some() {
            return Err(Error::InvalidArgument("--growth needs --floor".into()));
        }
        let value = x.count(q, table)?;
        return Ok(Output {
            text: value.to_string(),
            json: json!({
                "command": "count",
                "expr": e.to_string(),
                "q": q,
                "value": rational_json(&value),
                "bound": Value::Null,
            }),
        });
    };
    let (value, bound, cert) = match x.as_tate() {
        Some(t) => {
            let cert = cert.unwrap_or_else(|| GrowthCertificate::for_tate(&t));
            let (v, b) = CompletedClass::expand(&t, floor).count_truncated(q, &cert)?;
            (v, b, cert)
        }
        None => {
            let cert = cert.ok_or_else(|| {
                Error::InvalidArgument("truncated counts of symbolic classes need --growth".into())
            })?;
            let s = series_of(&x, floor);
            let (v, b) = s.count_truncated_with(q, &cert, |c| c.count(table, q))?;
            (v, b, cert)
        }
    };
    Ok(Output {
        text: format!(
            "{value} ± {bound} (bound conditional on growth {},{},{})",
            cert.c, cert.d, cert.big_d
        ),
        json: json!({
            "command": "count",
            "expr": e.to_string(),
            "q": q,
            "floor": floor,
            "growth": {"C": cert.c, "d": cert.d, "D": cert.big_d},
            "value": rational_json(&value),
            "bound": rational_json(&bound),
        }),
    })
}

fn weights_json(ws: &WeightSeries) -> Value {
    let mult: Vec<Value> = ws
        .terms()
        .map(|(n, m)| json!({"weight": n, "mult": integer_json(&BigInt::from(m.clone()))}))
        .collect();
    json!({"floor": option_json(ws.floor()), "multiplicities": mult, "text": ws.to_string()})
}

pub fn weights(text: &str, floor: Option<i64>, table: &SymbolTable) -> Result<Output> {
    let (e, x) = parse_eval(text, table)?;
    let series = match floor {
        Some(f) => series_of(&x, f),
        None => {
            let mut acc = CompletedClass::from_terms([], None);
            for (m, c) in x.terms() {
                let Some(p) = c.as_laurent() else {
                    return Err(Error::InvalidArgument(format!(
                        "`{e}` is not a polynomial class; pass --floor"
                    )));
                };
                let part = CompletedClass::exact(p).map_coeffs(|k| SymPoly::term(k.clone(), m.clone()));
                acc = &acc + &part;
            }
            acc
        }
    };
    let ws = weight_series_symbolic(&series, table)?;
    let mut v = weights_json(&ws);
    v["command"] = json!("weights");
    v["expr"] = json!(e.to_string());
    Ok(Output {
        text: ws.to_string(),
        json: v,
    })
}

fn mass_output(m: MassResult) -> Output {
    Output {
        text: format!("{}  ({}, {} ms)", m.value, m.method, m.elapsed_ms),
        json: m.to_json(),
    }
}

fn integer_mass(value: u64, method: String, start: Instant) -> MassResult {
    MassResult {
        value: BigRational::from_integer(value.into()),
        method,
        elapsed_ms: start.elapsed().as_millis() as u64,
    }
}

pub fn oracle_gl(n: u32, q: u64) -> Result<Output> {
    let start = Instant::now();
    let c = fforacle::gl_count(n, q)?;
    Ok(mass_output(integer_mass(
        c,
        format!("enumeration of {n}x{n} matrices over F_{q}"),
        start,
    )))
}

pub fn oracle_cubics(q: u64) -> Result<Output> {
    let start = Instant::now();
    let c = fforacle::smooth_cubic_count(q)?;
    Ok(mass_output(integer_mass(
        c,
        format!("census of smooth ternary cubic forms over F_{q}"),
        start,
    )))
}

fn parse_stratum(text: &str) -> Result<Stratum> {
    match text {
        "all" => Ok(Stratum::All),
        "origin" => Ok(Stratum::Origin),
        _ => text
            .strip_prefix("zeros=")
            .and_then(|j| j.parse().ok())
            .map(Stratum::ExactlyZeros)
            .ok_or_else(|| {
                Error::InvalidArgument(format!("stratum `{text}` is not all, origin or zeros=J"))
            }),
    }
}

pub fn oracle_monomial(k: u32, q: u64, stratum: &str) -> Result<Output> {
    if !(1..=5).contains(&k) {
        return Err(Error::BudgetExceeded(format!("monomial oracle needs 1 <= k <= 5, got {k}")));
    }
    let s = parse_stratum(stratum)?;
    Ok(mass_output(fforacle::monomial_quotient_mass(k, q, s)?))
}

pub fn oracle_mass_m13(q: u64) -> Result<Output> {
    Ok(mass_output(fforacle::mass_m13(q)?))
}

pub fn curve_from(
    path: Option<&Path>,
    genus: Option<u32>,
    q: Option<u64>,
    zeta: Option<&str>,
) -> Result<CurveData> {
    if let Some(p) = path {
        return CurveData::from_file(p);
    }
    let q = q.ok_or_else(|| Error::InvalidArgument("--q is required".into()))?;
    let g = genus.ok_or_else(|| Error::InvalidArgument("--genus is required".into()))?;
    let p = match zeta {
        Some(z) => z
            .split(',')
            .map(|c| {
                c.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::InvalidArgument(format!("bad zeta coefficient `{c}`")))
            })
            .collect::<Result<Vec<_>>>()?,
        None if g == 0 => vec![1],
        None => return Err(Error::InvalidArgument("--zeta is required for g > 0".into())),
    };
    CurveData::new(q, g, p)
}

pub fn bun_sl2(curve: &CurveData, floor: Option<i64>) -> Result<Output> {
    let siegel = bun::siegel_mass_sl2(curve);
    let unstable = bun::unstable_sum_sl2(curve);
    let semistable = bun::semistable_mass_sl2(curve)?;
    let g = curve.genus();
    let strata: Vec<(u32, BigRational)> = (1..=3)
        .map(|a| bun::stratum_mass_sl2(a, curve).map(|m| (a, m)))
        .collect::<Result<_>>()?;
    let mut text = format!(
        "q = {}, g = {}, P(1) = {}\ntotal mass      {siegel}\nunstable strata {unstable}\nsemistable      {semistable}\n",
        curve.q(),
        g,
        curve.class_number()
    );
    for (a, m) in &strata {
        text += &format!("stratum a = {a} (dim {}): {m}\n", bun::stratum_dimension(*a, g));
    }
    let mut v = json!({
        "command": "bun sl2",
        "q": curve.q(),
        "genus": g,
        "class_number": curve.class_number(),
        "siegel_mass": rational_json(&siegel),
        "unstable_sum": rational_json(&unstable),
        "semistable_mass": rational_json(&semistable),
        "strata": strata.iter().map(|(a, m)| json!({
            "a": a,
            "dimension": bun::stratum_dimension(*a, g),
            "mass": rational_json(m),
        })).collect::<Vec<_>>(),
    });
    if let Some(f) = floor {
        let pic = curve.pic_symbol("Pic");
        let s = bun::strata_series_sl2(g, &pic, f)?;
        let (value, bound) = bun::count_strata_series(&s, curve, &pic)?;
        text += &format!("strata series {s}\ncount {value} ± {bound}\n");
        let mut sj = series_json(&s);
        sj["value"] = rational_json(&value);
        sj["bound"] = rational_json(&bound);
        v["series"] = sj;
    }
    Ok(Output {
        text: text.trim_end().to_string(),
        json: v,
    })
}
