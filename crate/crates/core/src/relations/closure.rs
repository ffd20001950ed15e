//! Breadth-first closure of a set of fields under fusion.

use crate::error::Result;
use crate::fields::{exchange_function, pole_lines, residue, wick_expand, Field};
use crate::qseries::{self, Truncation};
use crate::ring::{Monomial, ProductForm};

/// A basis field together with the positions `wσ` of its `Λ` factors,
/// which determine its exchange functions.
#[derive(Clone, Debug)]
pub struct ClosureMember {
    pub name: String,
    pub field: Field,
    pub shifts: Vec<Monomial>,
}

#[derive(Clone, Debug)]
pub struct ClosureBasis {
    pub members: Vec<ClosureMember>,
    /// `S_{ij}` for every ordered pair of members.
    pub exchange: Vec<((usize, usize), ProductForm)>,
    /// Pairs whose exchange is not the predicted product of shifted `S_TT`.
    pub unexplained: Vec<(usize, usize)>,
}

impl ClosureBasis {
    pub fn find(&self, name: &str) -> Option<usize> {
        self.members.iter().position(|m| m.name == name)
    }

    pub fn exchange_of(&self, i: usize, j: usize) -> Option<&ProductForm> {
        self.exchange.iter().find(|(k, _)| *k == (i, j)).map(|(_, s)| s)
    }
}

/// `Π_{a ∈ A, b ∈ B} S_TT(x·b/a)`.
pub(crate) fn predicted_exchange(a: &[Monomial], b: &[Monomial], stt: &ProductForm) -> ProductForm {
    let mut r = ProductForm::one();
    for x in a {
        for y in b {
            r = r.mul(&stt.scale_var(&y.div(x)));
        }
    }
    r
}

fn normalize(f: &Field, window: i32) -> Result<Field> {
    match f.terms().next() {
        Some((c, _)) => Ok(f.scale(&c.inv_to(window)?)),
        None => Ok(f.clone()),
    }
}

/// Grow `seeds` by residues of pairwise products at pole lines with
/// `|ord γ| ≤ line_bound`, `depth` times. Each seed is taken to carry a single
/// `Λ` position unless it is constant.
pub fn fusion_closure(seeds: &[Field], depth: u32, line_bound: i32, tr: Truncation) -> Result<ClosureBasis> {
    let window = tr.cutoff() + 1;
    let stt = qseries::s_tt(tr)?;
    let mut members: Vec<ClosureMember> = seeds
        .iter()
        .enumerate()
        .map(|(i, f)| ClosureMember {
            name: f.name.clone().unwrap_or_else(|| format!("seed{i}")),
            field: f.clone(),
            shifts: if f.as_constant().is_some() { vec![] } else { vec![Monomial::one()] },
        })
        .collect();
    let mut frontier_start = 0;
    for _ in 0..depth {
        let frontier_end = members.len();
        let mut fresh = Vec::new();
        for i in 0..frontier_end {
            for j in 0..frontier_end {
                if i < frontier_start && j < frontier_start {
                    continue;
                }
                let (a, b) = (&members[i], &members[j]);
                let e = wick_expand(&a.field, &b.field, tr)?;
                for line in pole_lines(&e, tr) {
                    if line.gamma.ord().abs() > line_bound || line.order > 1 {
                        continue;
                    }
                    let r = residue(&e, &line.gamma, None, 0, tr)?;
                    if r.vanishes() {
                        continue;
                    }
                    let (field, shifts) = if r.as_constant().is_some() {
                        (Field::omega(), vec![])
                    } else {
                        let mut s: Vec<Monomial> = a.shifts.iter().map(|x| x.mul(&line.gamma)).collect();
                        s.extend(b.shifts.iter().cloned());
                        s.sort();
                        (normalize(&r, window)?, s)
                    };
                    let known = members.iter().chain(fresh.iter()).any(|m: &ClosureMember| {
                        m.shifts == shifts && m.field.agrees_with(&field)
                    });
                    if !known {
                        let name = if shifts.is_empty() {
                            "Omega".to_string()
                        } else {
                            format!("Res[{}]({},{})", line.gamma, a.name, b.name)
                        };
                        fresh.push(ClosureMember { name, field, shifts });
                    }
                }
            }
        }
        frontier_start = frontier_end;
        members.extend(fresh);
        if members.len() == frontier_end {
            break;
        }
    }
    let mut exchange = Vec::new();
    let mut unexplained = Vec::new();
    for i in 0..members.len() {
        for j in 0..members.len() {
            let s = exchange_function(&members[i].field, &members[j].field, tr)?;
            if !s.agrees_with(&predicted_exchange(&members[i].shifts, &members[j].shifts, &stt)) {
                unexplained.push((i, j));
            }
            exchange.push(((i, j), s));
        }
    }
    Ok(ClosureBasis { members, exchange, unexplained })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relations::{named_field, FieldName, TowerDirection};

    #[test]
    fn omega_is_a_fixed_point() {
        let b = fusion_closure(&[Field::omega()], 2, 2, Truncation::new(2, 1)).unwrap();
        assert_eq!(b.members.len(), 1);
        assert!(b.unexplained.is_empty());
    }

    #[test]
    fn depth_one_from_t() {
        let tr = Truncation::new(3, 2);
        let b = fusion_closure(&[Field::t()], 1, 2, tr).unwrap();
        assert!(b.unexplained.is_empty());
        let t2q = named_field(FieldName::Tower { dir: TowerDirection::Q, n: 2 }, tr).unwrap();
        let t2pq = named_field(FieldName::Tower { dir: TowerDirection::POverQ, n: 2 }, tr).unwrap();
        let has = |f: &Field| b.members.iter().any(|m| m.field.agrees_with(&normalize(f, 20).unwrap()));
        assert!(has(&t2q));
        assert!(has(&t2pq));
        assert!(b.members.iter().any(|m| m.shifts.is_empty()));
        let i = b.members.iter().position(|m| m.shifts == vec![Monomial::one(), Monomial::q()]).unwrap();
        let s = b.exchange_of(0, i).unwrap();
        let stt = qseries::s_tt(tr).unwrap();
        assert!(s.agrees_with(&stt.mul(&stt.scale_var(&Monomial::q()))));
    }
}
