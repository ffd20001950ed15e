//! Canonical JSON for every payload the CLI emits or caches.
//!
//! Objects are key-sorted and sequences follow the canonical order of the
//! underlying types, so equal values always serialize to equal text.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::fields::{ExpFactor, Field, NOProduct};
use crate::fock::{FockVector, Partition};
use crate::relations::{Params, VerificationReport, Witness};
use crate::ring::{Expansion, Monomial, ProductForm, QPoly, QRat, Rat, Scalar, EXACT};

fn bad(what: &str, v: &Value) -> Error {
    Error::Parse(format!("expected {what}, found {v}"))
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::Parse(format!("missing key {key:?} in {v}")))
}

fn int(v: &Value, key: &str) -> Result<i32> {
    let x = field(v, key)?;
    x.as_i64().and_then(|n| i32::try_from(n).ok()).ok_or_else(|| bad("a 32-bit integer", x))
}

fn array<'a>(v: &'a Value, key: &str) -> Result<&'a Vec<Value>> {
    let x = field(v, key)?;
    x.as_array().ok_or_else(|| bad("an array", x))
}

fn opt_int(v: &Value, key: &str) -> Result<Option<i32>> {
    match v.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(_) => int(v, key).map(Some),
    }
}

fn prec_json(p: i32) -> Value {
    if p >= EXACT {
        Value::Null
    } else {
        json!(p)
    }
}

pub fn rat_json(r: &Rat) -> Value {
    Value::String(format!("{}/{}", r.numer_string(), r.denom_string()))
}

pub fn rat_from(v: &Value) -> Result<Rat> {
    let s = v.as_str().ok_or_else(|| bad("a rational string", v))?;
    s.parse().map_err(Error::Parse)
}

pub fn qpoly_json(p: &QPoly) -> Value {
    json!({ "low": p.low(), "coeffs": p.coeffs().iter().map(rat_json).collect::<Vec<_>>() })
}

pub fn qpoly_from(v: &Value) -> Result<QPoly> {
    let c = array(v, "coeffs")?.iter().map(rat_from).collect::<Result<Vec<_>>>()?;
    Ok(QPoly::from_parts(int(v, "low")?, c))
}

pub fn qrat_json(r: &QRat) -> Value {
    json!({ "num": qpoly_json(r.num()), "den": qpoly_json(r.den()) })
}

pub fn qrat_from(v: &Value) -> Result<QRat> {
    let den = qpoly_from(field(v, "den")?)?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {v}")));
    }
    Ok(QRat::new(qpoly_from(field(v, "num")?)?, den))
}

pub fn scalar_json(s: &Scalar) -> Value {
    json!({
        "lower": s.lower(),
        "prec": prec_json(s.prec()),
        "coeffs": s.coeffs().iter().map(qrat_json).collect::<Vec<_>>(),
    })
}

pub fn scalar_from(v: &Value) -> Result<Scalar> {
    let c = array(v, "coeffs")?.iter().map(qrat_from).collect::<Result<Vec<_>>>()?;
    Ok(Scalar::from_parts(int(v, "lower")?, c, opt_int(v, "prec")?.unwrap_or(EXACT)))
}

pub fn monomial_json(m: &Monomial) -> Value {
    json!({ "c": rat_json(&m.c), "a2": m.a2, "b": m.b })
}

pub fn monomial_from(v: &Value) -> Result<Monomial> {
    Ok(Monomial::new(rat_from(field(v, "c")?)?, int(v, "a2")?, int(v, "b")?))
}

pub fn product_form_json(f: &ProductForm) -> Value {
    let factors: Vec<Value> = f
        .factors()
        .map(|(g, e)| json!({ "c": rat_json(&g.c), "a2": g.a2, "b": g.b, "e": e }))
        .collect();
    json!({
        "xpow": f.xpow(),
        "unit": scalar_json(f.unit()),
        "factors": factors,
        "tailX": f.tail_x(),
        "tailInv": f.tail_inv(),
        "prec": prec_json(f.prec()),
    })
}

pub fn product_form_from(v: &Value) -> Result<ProductForm> {
    let factors = array(v, "factors")?
        .iter()
        .map(|x| Ok((monomial_from(x)?, int(x, "e")?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ProductForm::from_parts(
        int(v, "xpow")?,
        scalar_from(field(v, "unit")?)?,
        factors,
        opt_int(v, "tailX")?,
        opt_int(v, "tailInv")?,
    ))
}

pub fn expansion_json(e: &Expansion) -> Value {
    let rows: Vec<Value> = e
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| json!({ "k": e.start + i as i32, "coeff": scalar_json(c) }))
        .collect();
    json!({ "direction": e.dir.to_string(), "terms": rows })
}

pub fn exp_factor_json(f: &ExpFactor) -> Value {
    json!({ "inverse": f.inverse, "shift": monomial_json(&f.shift), "derivOrder": f.deriv_order })
}

pub fn exp_factor_from(v: &Value) -> Result<ExpFactor> {
    let inv = field(v, "inverse")?;
    let d = field(v, "derivOrder")?;
    Ok(ExpFactor {
        shift: monomial_from(field(v, "shift")?)?,
        inverse: inv.as_bool().ok_or_else(|| bad("a boolean", inv))?,
        deriv_order: d.as_u64().and_then(|n| u32::try_from(n).ok()).ok_or_else(|| bad("a derivative order", d))?,
    })
}

pub fn field_json(f: &Field) -> Value {
    let terms: Vec<Value> = f
        .terms()
        .map(|(c, n)| {
            json!({
                "coefficient": scalar_json(c),
                "factors": n.factors().iter().map(exp_factor_json).collect::<Vec<_>>(),
                "prefactor": scalar_json(&n.prefactor()),
            })
        })
        .collect();
    json!({ "name": f.name, "terms": terms })
}

pub fn field_from(v: &Value) -> Result<Field> {
    let mut f = Field::zero();
    for t in array(v, "terms")? {
        let factors = array(t, "factors")?.iter().map(exp_factor_from).collect::<Result<Vec<_>>>()?;
        f.add_term(scalar_from(field(t, "coefficient")?)?, NOProduct::new(factors));
    }
    Ok(match field(v, "name")? {
        Value::Null => f,
        Value::String(s) => f.named(s),
        other => return Err(bad("a field name", other)),
    })
}

pub fn partition_json(p: &Partition) -> Value {
    json!(p.parts())
}

pub fn partition_from(v: &Value) -> Result<Partition> {
    let parts = v.as_array().ok_or_else(|| bad("a partition", v))?;
    let parts = parts
        .iter()
        .map(|x| x.as_u64().and_then(|n| u32::try_from(n).ok()).filter(|&n| n > 0).ok_or_else(|| bad("a positive part", x)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Partition::new(parts))
}

pub fn fock_vector_json(u: &FockVector) -> Value {
    let terms: Vec<Value> =
        u.terms().map(|(p, c)| json!({ "parts": partition_json(p), "coefficient": scalar_json(c) })).collect();
    json!({ "terms": terms })
}

pub fn fock_vector_from(v: &Value) -> Result<FockVector> {
    let mut u = FockVector::zero();
    for t in array(v, "terms")? {
        u.add_term(partition_from(field(t, "parts")?)?, scalar_from(field(t, "coefficient")?)?);
    }
    Ok(u)
}

pub fn params_json(p: &Params) -> Value {
    json!({
        "pOrder": p.p_order,
        "buffer": p.buffer,
        "degree": p.degree,
        "modeWindow": p.mode_window,
        "xOrder": p.x_order,
    })
}

pub fn witness_json(w: &Witness) -> Value {
    json!({
        "basis": w.basis,
        "modes": w.modes,
        "coordinate": w.coordinate,
        "lhs": scalar_json(&w.lhs),
        "rhs": scalar_json(&w.rhs),
    })
}

/// A report; `timing = false` zeroes the wall time for byte-stable output.
pub fn report_json(r: &VerificationReport, timing: bool) -> Value {
    json!({
        "relation": r.relation,
        "params": params_json(&r.params),
        "status": r.status.to_string(),
        "checks": r.checks,
        "witness": r.witness.as_ref().map(witness_json),
        "flags": r.flags,
        "wall_time_ms": if timing { r.wall_time_ms as u64 } else { 0 },
    })
}

/// The in-band form of an error.
pub fn error_json(context: &str, e: &Error) -> Value {
    let mut m = Map::new();
    m.insert("context".into(), json!(context));
    m.insert("status".into(), json!("error"));
    m.insert("error".into(), json!(e.to_string()));
    Value::Object(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::{self, Truncation};
    use crate::relations::{named_field, FieldName};

    fn round_trip<T>(x: &T, to: fn(&T) -> Value, from: fn(&Value) -> Result<T>) -> Value {
        let v = to(x);
        let text = serde_json::to_string(&v).unwrap();
        let back = from(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(to(&back), v);
        v
    }

    #[test]
    fn rationals_are_written_as_fractions() {
        assert_eq!(rat_json(&Rat::int(3)), json!("3/1"));
        assert_eq!(rat_json(&Rat::new(-2, 6)), json!("-1/3"));
        assert_eq!(rat_from(&json!("4/6")).unwrap(), Rat::new(2, 3));
        assert!(rat_from(&json!("1/0")).is_err());
    }

    #[test]
    fn structure_functions_round_trip() {
        let tr = Truncation::new(3, 2);
        for f in [qseries::f(tr).unwrap(), qseries::g(), qseries::s_tt(tr).unwrap()] {
            let v = round_trip(&f, product_form_json, product_form_from);
            assert_eq!(product_form_from(&v).unwrap(), f);
        }
    }

    #[test]
    fn fields_round_trip() {
        let tr = Truncation::new(3, 2);
        for name in [FieldName::T, FieldName::Ttilde, "T2q".parse().unwrap()] {
            let f = named_field(name, tr).unwrap();
            let v = round_trip(&f, field_json, field_from);
            assert!(field_from(&v).unwrap().agrees_with(&f));
        }
    }

    #[test]
    fn fock_vectors_round_trip() {
        let mut u = FockVector::vacuum();
        u.add_term(Partition::new(vec![2, 1]), Scalar::monomial(Rat::new(1, 2), -3, 1));
        round_trip(&u, fock_vector_json, fock_vector_from);
    }

    #[test]
    fn malformed_payloads_are_parse_errors() {
        assert!(matches!(scalar_from(&json!({ "lower": 0 })), Err(Error::Parse(_))));
        assert!(matches!(partition_from(&json!([1, 0])), Err(Error::Parse(_))));
    }
}
