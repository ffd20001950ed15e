//! Named fields and the four built-in quadratic relations.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use super::ratio;
use super::tower::{fusion_tower, TowerDirection};
use crate::error::{Error, Result};
use crate::fields::{residue, wick_expand, Field};
use crate::qseries::{self, DeltaTerm, Truncation};
use crate::ring::{Monomial, ProductForm};

/// Fields reachable by name from the command line and the cache.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldName {
    Omega,
    T,
    Ttilde,
    Tower { dir: TowerDirection, n: u32 },
}

impl fmt::Display for FieldName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldName::Omega => f.write_str("Omega"),
            FieldName::T => f.write_str("T"),
            FieldName::Ttilde => f.write_str("Ttilde"),
            FieldName::Tower { dir: TowerDirection::Q, n: 2 } => f.write_str("T2q"),
            FieldName::Tower { dir: TowerDirection::POverQ, n: 2 } => f.write_str("T2pq"),
            FieldName::Tower { dir, n } => write!(f, "Tn:{}:{n}", dir.tag()),
        }
    }
}

impl FromStr for FieldName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownField(s.to_string());
        Ok(match s {
            "Omega" | "Ω" => FieldName::Omega,
            "T" | "T1" => FieldName::T,
            "Ttilde" => FieldName::Ttilde,
            "T2q" => FieldName::Tower { dir: TowerDirection::Q, n: 2 },
            "T2pq" => FieldName::Tower { dir: TowerDirection::POverQ, n: 2 },
            _ => {
                let parts: Vec<&str> = s.split(':').collect();
                if parts.len() != 3 || parts[0] != "Tn" {
                    return Err(unknown());
                }
                let dir = match parts[1] {
                    "q" => TowerDirection::Q,
                    "pq" => TowerDirection::POverQ,
                    _ => return Err(unknown()),
                };
                let n: u32 = parts[2].parse().map_err(|_| unknown())?;
                match n {
                    0 => return Err(unknown()),
                    1 => FieldName::T,
                    _ => FieldName::Tower { dir, n },
                }
            }
        })
    }
}

/// `T̃(w) = Res_{z=wpq²} f(w/z) T(z)T(w) dz/(z − wpq²)`, rewritten with
/// measure `dz/z` and multiplier `f(x)/(1 − xpq²)`.
pub(crate) fn ttilde(tr: Truncation) -> Result<Field> {
    let e = wick_expand(&Field::t(), &Field::t(), tr)?;
    let m = qseries::f(tr)?.mul(&ProductForm::binomial(Monomial::pq(2, 2), -1));
    Ok(residue(&e, &Monomial::pq(2, 2), Some(&m), 0, tr)?.named("Ttilde"))
}

/// Build or fetch a named field at the given truncation.
pub fn named_field(name: FieldName, tr: Truncation) -> Result<Field> {
    static CACHE: OnceLock<Mutex<HashMap<(FieldName, Truncation), Field>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(f) = cache.lock().unwrap().get(&(name, tr)) {
        return Ok(f.clone());
    }
    let f = match name {
        FieldName::Omega => Field::omega(),
        FieldName::T => Field::t(),
        FieldName::Ttilde => ttilde(tr)?,
        FieldName::Tower { dir, n } => {
            let t = fusion_tower(n, dir, tr)?;
            t.fields[n as usize - 1].clone()
        }
    };
    let f = f.named(&name.to_string());
    cache.lock().unwrap().insert((name, tr), f.clone());
    Ok(f)
}

/// A quadratic relation from a splitting `S_AB(x) = g₊(x)⁻¹ g₋(x)`:
/// `g₊(w/z) A(z)B(w) − g₋(w/z) B(w)A(z) = Σ C(w) δ(wγ/z)`, with `g₊`
/// expanded in `x` and `g₋` in `1/x`.
#[derive(Clone, Debug)]
pub struct RelationSpec {
    pub name: String,
    pub g_plus: ProductForm,
    pub g_minus: ProductForm,
    pub a: Field,
    pub b: Field,
    pub rhs: Vec<DeltaTerm>,
    /// Where the relation departs from its commonly displayed form.
    pub notes: Vec<String>,
}

pub const PRESETS: [&str; 4] = ["odin", "alt", "F1", "F2"];

fn mono(a2: i32, b: i32) -> Monomial {
    Monomial::pq(a2, b)
}

/// The built-in relations: `odin`, `alt`, `F1` and `F2`.
pub fn preset(name: &str, tr: Truncation, window: i32) -> Result<RelationSpec> {
    let f = qseries::f(tr)?;
    let p = Monomial::p();
    let t = Field::t();
    let spec = match name {
        "odin" => {
            let c = ratio(&[(0, 1), (2, -1)], &[(2, 0)], window)?;
            RelationSpec {
                name: "odin".into(),
                g_plus: f.clone(),
                g_minus: f.reflect(),
                a: t.clone(),
                b: t,
                rhs: vec![DeltaTerm::constant(p.inv(), c.clone()), DeltaTerm::constant(p, c.neg())],
                notes: vec![],
            }
        }
        "alt" => {
            let t2q = named_field(FieldName::Tower { dir: TowerDirection::Q, n: 2 }, tr)?;
            let t2pq = named_field(FieldName::Tower { dir: TowerDirection::POverQ, n: 2 }, tr)?;
            let c1 = ratio(&[(0, -1), (2, -1)], &[(2, -2)], window)?;
            let c2 = ratio(&[(0, 1), (2, -1), (4, 0)], &[(2, 1), (4, -1)], window)?;
            RelationSpec {
                name: "alt".into(),
                g_plus: f.scale_var(&p).inv()?,
                g_minus: f.reflect().scale_var(&p).inv()?,
                a: t.clone(),
                b: t,
                rhs: vec![
                    DeltaTerm::field(Monomial::q(), t2q.scale(&c1)),
                    DeltaTerm::field(mono(2, -1), t2pq.scale(&c1.neg())),
                    DeltaTerm::constant(p.inv(), c2),
                ],
                notes: vec!["the field on the δ(wq/z) line is T2q; it is sometimes printed as T_w^q".into()],
            }
        }
        "F1" => {
            let f1 = qseries::f1(tr)?;
            let t2q = named_field(FieldName::Tower { dir: TowerDirection::Q, n: 2 }, tr)?;
            let c = ratio(&[(2, -1), (0, 2)], &[(2, 1)], window)?;
            RelationSpec {
                name: "F1".into(),
                g_plus: f1.clone(),
                g_minus: f1.reflect().scale_var(&Monomial::q()),
                a: t.clone(),
                b: t2q,
                rhs: vec![
                    DeltaTerm::field(p.inv(), t.shifted(&Monomial::q()).scale(&c)),
                    DeltaTerm::field(mono(2, 1), t.scale(&c.neg())),
                ],
                notes: vec![],
            }
        }
        "F2" => {
            let f2 = qseries::f2(tr)?;
            let t2q = named_field(FieldName::Tower { dir: TowerDirection::Q, n: 2 }, tr)?;
            let tt = named_field(FieldName::Ttilde, tr)?;
            // (1+q) written as (1−q²)/(1−q)
            let c1 = ratio(&[(2, 0), (0, 2), (0, 2), (2, -1)], &[(0, 1), (2, 1), (2, 1)], window)?;
            let c2 = ratio(&[(0, 1), (2, -1), (2, -2), (0, 2)], &[(2, 0), (0, -1), (2, 1)], window)?;
            RelationSpec {
                name: "F2".into(),
                g_plus: f2.clone(),
                g_minus: f2.reflect(),
                a: t2q.clone(),
                b: t2q,
                rhs: vec![
                    DeltaTerm::field(mono(-2, -1), tt.shifted(&mono(-2, -1)).scale(&c1)),
                    DeltaTerm::field(mono(2, 1), tt.scale(&c1.neg())),
                    DeltaTerm::constant(p.inv(), c2.clone()),
                    DeltaTerm::constant(p, c2.neg()),
                ],
                notes: vec!["the δ(w/(zpq)) line carries Ttilde(w*p^-1*q^-1); the form Ttilde(wq) does not match the residue".into()],
            }
        }
        _ => return Err(Error::UnknownRelation(name.to_string())),
    };
    Ok(spec)
}
