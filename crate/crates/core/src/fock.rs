//! The Fock module of the deformed Heisenberg algebra.
//!
//! Basis vectors are the unnormalized monomials `λ_{−n₁}…λ_{−n_k} v`,
//! indexed by partitions. Annihilators act as derivations:
//! `[λ_m, λ_{−m}] = κ_m`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Mutex, OnceLock};

use crate::ring::{QPoly, QRat, Rat, Scalar};

/// Weakly decreasing positive parts.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn empty() -> Self {
        Partition::default()
    }

    pub fn new(mut parts: Vec<u32>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn degree(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Number of parts equal to `m`.
    pub fn multiplicity(&self, m: u32) -> u32 {
        self.parts.iter().filter(|&&p| p == m).count() as u32
    }

    /// `(part, multiplicity)` pairs, largest part first.
    pub fn multiplicities(&self) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = Vec::new();
        for &p in &self.parts {
            match out.last_mut() {
                Some((q, k)) if *q == p => *k += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }

    pub fn with_part(&self, m: u32) -> Partition {
        let mut parts = self.parts.clone();
        let at = parts.iter().position(|&p| p < m).unwrap_or(parts.len());
        parts.insert(at, m);
        Partition { parts }
    }

    pub fn without_part(&self, m: u32) -> Option<Partition> {
        let at = self.parts.iter().position(|&p| p == m)?;
        let mut parts = self.parts.clone();
        parts.remove(at);
        Some(Partition { parts })
    }

    pub fn union(&self, o: &Partition) -> Partition {
        let mut parts = self.parts.clone();
        parts.extend_from_slice(&o.parts);
        Partition::new(parts)
    }

    /// Multiset difference; `None` unless `o ⊆ self`.
    pub fn minus(&self, o: &Partition) -> Option<Partition> {
        let mut r = self.clone();
        for &p in &o.parts {
            r = r.without_part(p)?;
        }
        Some(r)
    }

    /// All partitions of `n`, in canonical order.
    pub fn of(n: u32) -> Vec<Partition> {
        fn rec(n: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
            if n == 0 {
                out.push(Partition { parts: cur.clone() });
                return;
            }
            for p in (1..=n.min(max)).rev() {
                cur.push(p);
                rec(n - p, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, n, &mut Vec::new(), &mut out);
        out.sort();
        out
    }

    /// All sub-multisets of the parts.
    pub fn sub_partitions(&self) -> Vec<Partition> {
        let mult = self.multiplicities();
        let mut out = vec![Partition::empty()];
        for (p, k) in mult {
            let mut next = Vec::with_capacity(out.len() * (k as usize + 1));
            for base in &out {
                let mut cur = base.clone();
                next.push(cur.clone());
                for _ in 0..k {
                    cur = cur.with_part(p);
                    next.push(cur.clone());
                }
            }
            out = next;
        }
        out
    }
}

impl Ord for Partition {
    fn cmp(&self, o: &Self) -> Ordering {
        self.degree().cmp(&o.degree()).then_with(|| o.parts.cmp(&self.parts))
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "v");
        }
        for p in &self.parts {
            write!(f, "λ_-{p} ")?;
        }
        write!(f, "v")
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.parts)
    }
}

/// Basis of the graded pieces of degree `0..=d`.
pub fn basis_up_to(d: u32) -> Vec<Partition> {
    (0..=d).flat_map(Partition::of).collect()
}

/// `κ_m = [λ_m, λ_{−m}] = −(1/m)(1 − q^m)(1 − (p/q)^m)/(1 + p^m)`, carried
/// to s-order `prec`.
pub fn kappa(m: u32, prec: i32) -> Scalar {
    static CACHE: OnceLock<Mutex<HashMap<(u32, i32), Scalar>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(k) = cache.lock().unwrap().get(&(m, prec)) {
        return k.clone();
    }
    let mi = m as i32;
    let one = Rat::one();
    let a = QRat::from_poly(QPoly::from_parts(0, vec![one.clone()]).sub(&QPoly::monomial(one.clone(), mi)));
    let num = Scalar::from_qrat(a)
        .mul(&Scalar::one().sub(&Scalar::monomial(one.clone(), 2 * mi, -mi)))
        .scale(&Rat::new(-1, m as i64));
    let den = Scalar::one().add(&Scalar::monomial(one, 2 * mi, 0)).truncate(prec.max(1));
    let k = num.mul(&den.inv().expect("1 + p^m is invertible")).truncate(prec);
    cache.lock().unwrap().insert((m, prec), k.clone());
    k
}

/// A finite combination of basis monomials.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct FockVector {
    terms: BTreeMap<Partition, Scalar>,
}

impl FockVector {
    pub fn zero() -> Self {
        FockVector::default()
    }

    pub fn vacuum() -> Self {
        FockVector::basis(Partition::empty())
    }

    pub fn basis(p: Partition) -> Self {
        FockVector::single(p, Scalar::one())
    }

    pub fn single(p: Partition, c: Scalar) -> Self {
        let mut v = FockVector::zero();
        v.add_term(p, c);
        v
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Partition, &Scalar)> + '_ {
        self.terms.iter()
    }

    pub fn coeff(&self, p: &Partition) -> Scalar {
        self.terms.get(p).cloned().unwrap_or_else(Scalar::exact_zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// True when no nonzero coefficient is stored.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Degree of the lowest and highest stored terms.
    pub fn degrees(&self) -> Option<(u32, u32)> {
        let lo = self.terms.keys().next()?.degree();
        let hi = self.terms.keys().next_back()?.degree();
        Some((lo, hi))
    }

    /// Homogeneous degree, if every term shares one.
    pub fn degree(&self) -> Option<u32> {
        match self.degrees()? {
            (a, b) if a == b => Some(a),
            _ => None,
        }
    }

    pub fn add_term(&mut self, p: Partition, c: Scalar) {
        match self.terms.get_mut(&p) {
            Some(x) => {
                *x = x.add(&c);
                if x.is_zero() && x.is_exact() {
                    self.terms.remove(&p);
                }
            }
            None => {
                if !(c.is_zero() && c.is_exact()) {
                    self.terms.insert(p, c);
                }
            }
        }
    }

    pub fn add(&self, o: &FockVector) -> FockVector {
        let mut r = self.clone();
        for (p, c) in &o.terms {
            r.add_term(p.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, o: &FockVector) -> FockVector {
        self.add(&o.scale(&Scalar::int(-1)))
    }

    pub fn scale(&self, s: &Scalar) -> FockVector {
        let mut r = FockVector::zero();
        for (p, c) in &self.terms {
            r.add_term(p.clone(), c.mul(s));
        }
        r
    }

    /// True when every coefficient vanishes on its window.
    pub fn vanishes(&self) -> bool {
        self.terms.values().all(Scalar::is_zero)
    }

    /// Smallest coefficient precision (EXACT when empty).
    pub fn prec(&self) -> i32 {
        self.terms.values().map(Scalar::prec).min().unwrap_or(crate::ring::EXACT)
    }

    pub fn truncate(&self, prec: i32) -> FockVector {
        let mut r = FockVector::zero();
        for (p, c) in &self.terms {
            r.add_term(p.clone(), c.truncate(prec));
        }
        r
    }
}

impl fmt::Display for FockVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (p, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, "\n + ")?;
            }
            write!(f, "[{c}] {p}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for FockVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Heisenberg generator `λ_n` on `v`, with `κ` carried to s-order `prec`.
pub fn apply_mode(n: i32, v: &FockVector, prec: i32) -> FockVector {
    let mut r = FockVector::zero();
    match n.cmp(&0) {
        Ordering::Equal => {}
        Ordering::Less => {
            for (p, c) in v.terms() {
                r.add_term(p.with_part(n.unsigned_abs()), c.clone());
            }
        }
        Ordering::Greater => {
            let m = n as u32;
            let k = kappa(m, prec);
            for (p, c) in v.terms() {
                let mult = p.multiplicity(m);
                if let Some(rest) = p.without_part(m) {
                    r.add_term(rest, c.mul(&k).scale(&Rat::int(mult as i64)));
                }
            }
        }
    }
    r
}

/// A functional reading off the named coefficients.
#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct DualVector {
    terms: BTreeMap<Partition, Scalar>,
}

impl DualVector {
    /// The coordinate functional `p*`.
    pub fn coordinate(p: Partition) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(p, Scalar::one());
        DualVector { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Partition, Scalar)>) -> Self {
        DualVector { terms: terms.into_iter().collect() }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Partition, &Scalar)> + '_ {
        self.terms.iter()
    }
}

pub fn pair(phi: &DualVector, v: &FockVector) -> Scalar {
    let mut acc = Scalar::exact_zero();
    for (p, c) in phi.terms() {
        if let Some(x) = v.terms.get(p) {
            acc = acc.add(&c.mul(x));
        }
    }
    acc
}
