//! Mode actions and matrix elements on the Fock module.
//!
//! A normal-ordered product collapses to
//! `P · exp(Σ_{m>0} b_m λ_{−m} z^m) · exp(Σ_{m>0} a_m λ_m z^{−m})`.
//! On a basis monomial with `k_m` parts equal to `m`, the annihilation
//! exponential removes `j_m` of them with weight `C(k_m, j_m)(a_m κ_m)^{j_m}`;
//! the creation exponential adds a partition with weight `Π b_m^{l_m}/l_m!`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use super::wick::{wick_expand, ExpansionTerm};
use super::{Field, NOProduct};
use crate::error::Result;
use crate::fock::{kappa, DualVector, FockVector, Partition};
use crate::qseries::Truncation;
use crate::ring::{Monomial, ProductForm, Rat, Scalar};

fn sum_monomials(ms: &[Monomial]) -> Scalar {
    ms.iter().fold(Scalar::exact_zero(), |acc, m| acc.add(&m.to_scalar()))
}

fn binom_int(k: u32, j: u32) -> Rat {
    let mut acc = Rat::one();
    for i in 0..j {
        acc = &(&acc * &Rat::int((k - i) as i64)) / &Rat::int((i + 1) as i64);
    }
    acc
}

fn factorial(l: u32) -> Rat {
    (1..=l).fold(Rat::one(), |acc, i| &acc * &Rat::int(i as i64))
}

/// `a_m`: coefficient of `λ_m z^{−m}` (annihilation for `m > 0`).
fn annihilation_coeff(nop: &NOProduct, m: u32) -> Scalar {
    sum_monomials(&nop.mode_coefficient(m as i32))
}

/// `b_m`: coefficient of `λ_{−m} z^m`.
fn creation_coeff(nop: &NOProduct, m: u32) -> Scalar {
    sum_monomials(&nop.mode_coefficient(-(m as i32)))
}

/// Removals from `u`: `(removed weight, remaining partition, weight)`.
fn annihilate(nop: &NOProduct, u: &Partition, prec: i32) -> Arc<Vec<(u32, Partition, Scalar)>> {
    type Key = (NOProduct, Partition, i32);
    type Entry = Arc<Vec<(u32, Partition, Scalar)>>;
    static CACHE: OnceLock<Mutex<HashMap<Key, Entry>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (nop.clone(), u.clone(), prec);
    if let Some(r) = cache.lock().unwrap().get(&key) {
        return r.clone();
    }
    let mult = u.multiplicities();
    let per_part: Vec<Scalar> = mult.iter().map(|&(m, _)| annihilation_coeff(nop, m).mul(&kappa(m, prec))).collect();
    let mut out = vec![(0u32, u.clone(), Scalar::one())];
    for (idx, &(m, k)) in mult.iter().enumerate() {
        let mut next = Vec::with_capacity(out.len() * (k as usize + 1));
        for (r, rest, c) in &out {
            let mut power = Scalar::one();
            let mut rest_j = rest.clone();
            for j in 0..=k {
                if j > 0 {
                    power = power.mul(&per_part[idx]);
                    rest_j = rest_j.without_part(m).expect("part present");
                }
                if power.is_zero() && power.is_exact() {
                    break;
                }
                let w = c.mul(&power).scale(&binom_int(k, j));
                next.push((r + j * m, rest_j.clone(), w));
            }
        }
        out = next;
    }
    let out = Arc::new(out);
    cache.lock().unwrap().insert(key, out.clone());
    out
}

/// Created partitions of weight `c` with their weights.
fn create(nop: &NOProduct, c: u32) -> Arc<Vec<(Partition, Scalar)>> {
    type Key = (NOProduct, u32);
    type Entry = Arc<Vec<(Partition, Scalar)>>;
    static CACHE: OnceLock<Mutex<HashMap<Key, Entry>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (nop.clone(), c);
    if let Some(r) = cache.lock().unwrap().get(&key) {
        return r.clone();
    }
    let coeffs: Vec<Scalar> = (0..=c).map(|m| if m == 0 { Scalar::one() } else { creation_coeff(nop, m) }).collect();
    let mut out = Vec::new();
    for lam in Partition::of(c) {
        let mut w = Scalar::one();
        for (m, l) in lam.multiplicities() {
            w = w.mul(&coeffs[m as usize].pow(l as i32).expect("nonnegative power"));
            w = w.scale(&factorial(l).recip());
        }
        if !(w.is_zero() && w.is_exact()) {
            out.push((lam, w));
        }
    }
    let out = Arc::new(out);
    cache.lock().unwrap().insert(key, out.clone());
    out
}

/// Mode `n` of a single normal-ordered product on a basis vector,
/// including the product's prefactor.
pub(crate) fn nop_mode(nop: &NOProduct, n: i32, u: &Partition, prec: i32) -> Arc<FockVector> {
    type Key = (NOProduct, i32, Partition, i32);
    static CACHE: OnceLock<Mutex<HashMap<Key, Arc<FockVector>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (nop.clone(), n, u.clone(), prec);
    if let Some(r) = cache.lock().unwrap().get(&key) {
        return r.clone();
    }
    let mut out = FockVector::zero();
    if n <= u.degree() as i32 {
        let pre = nop.prefactor();
        for (r, rest, a) in annihilate(nop, u, prec).iter() {
            let c = *r as i32 - n;
            if c < 0 {
                continue;
            }
            for (lam, b) in create(nop, c as u32).iter() {
                out.add_term(rest.union(lam), a.mul(b).mul(&pre));
            }
        }
    }
    let out = Arc::new(out);
    cache.lock().unwrap().insert(key, out.clone());
    out
}

/// `A_n · v` where `Y(A, z) = Σ A_n z^{−n}`; `κ` is carried to s-order
/// `prec` and the result's coefficients record what survives.
pub fn mode_apply(a: &Field, n: i32, v: &FockVector, prec: i32) -> Result<FockVector> {
    let mut out = FockVector::zero();
    for (c, nop) in a.terms() {
        nop.check()?;
        for (u, cu) in v.terms() {
            let w = nop_mode(nop, n, u, prec);
            let s = if c.is_one() { cu.clone() } else { c.mul(cu) };
            for (p, x) in w.terms() {
                out.add_term(p.clone(), x.mul(&s));
            }
        }
    }
    Ok(out)
}

/// Laurent polynomial in `z, w`: `(i, j) ↦` coefficient of `z^i w^j`.
pub type Poly2 = BTreeMap<(i32, i32), Scalar>;

fn poly_add(p: &mut Poly2, key: (i32, i32), c: Scalar) {
    match p.get_mut(&key) {
        Some(x) => *x = x.add(&c),
        None => {
            p.insert(key, c);
        }
    }
}

/// One Wick term of a matrix element: `C(x) · Σ c_{ij} z^i w^j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixTerm {
    pub c: ProductForm,
    pub poly: Poly2,
}

/// `⟨φ| :A(z) B(w): |u⟩` for single normal-ordered products.
fn normal_ordered_element(phi: &DualVector, a: &NOProduct, b: &NOProduct, u: &FockVector, prec: i32) -> Poly2 {
    let max_deg = phi.terms().map(|(p, _)| p.degree()).max().unwrap_or(0);
    // state: (partition, z power, w power) -> coefficient
    let mut states: BTreeMap<(Partition, i32, i32), Scalar> = BTreeMap::new();
    let put = |m: &mut BTreeMap<(Partition, i32, i32), Scalar>, k: (Partition, i32, i32), c: Scalar| match m
        .get_mut(&k)
    {
        Some(x) => *x = x.add(&c),
        None => {
            m.insert(k, c);
        }
    };
    for (p, c) in u.terms() {
        for (r, rest, x) in annihilate(b, p, prec).iter() {
            put(&mut states, (rest.clone(), 0, -(*r as i32)), c.mul(x));
        }
    }
    let mut next = BTreeMap::new();
    for ((p, i, j), c) in &states {
        for (r, rest, x) in annihilate(a, p, prec).iter() {
            put(&mut next, (rest.clone(), i - *r as i32, *j), c.mul(x));
        }
    }
    states = next;
    for (nop, on_z) in [(b, false), (a, true)] {
        let mut next = BTreeMap::new();
        for ((p, i, j), c) in &states {
            let room = max_deg.saturating_sub(p.degree());
            for w in 0..=room {
                for (lam, x) in create(nop, w).iter() {
                    let (ni, nj) = if on_z { (i + w as i32, *j) } else { (*i, j + w as i32) };
                    put(&mut next, (p.union(lam), ni, nj), c.mul(x));
                }
            }
        }
        states = next;
    }
    let pre = a.prefactor().mul(&b.prefactor());
    let mut out = Poly2::new();
    for ((p, i, j), c) in states {
        for (q, f) in phi.terms() {
            if *q == p {
                poly_add(&mut out, (i, j), c.mul(f).mul(&pre));
            }
        }
    }
    out.retain(|_, c| !(c.is_zero() && c.is_exact()));
    out
}

/// `⟨φ| Y(A,z) Y(B,w) |u⟩` as a list of contraction functions times
/// Laurent polynomials.
pub fn matrix_element(
    phi: &DualVector,
    a: &Field,
    b: &Field,
    u: &FockVector,
    tr: Truncation,
    prec: i32,
) -> Result<Vec<MatrixTerm>> {
    let e = wick_expand(a, b, tr)?;
    let mut out = Vec::new();
    for term in &e.terms {
        let ExpansionTerm { coeff, nops, .. } = term;
        let mut poly = normal_ordered_element(phi, &nops[0], &nops[1], u, prec);
        for c in poly.values_mut() {
            *c = c.mul(coeff);
        }
        out.push(MatrixTerm { c: term.pair(0, 1), poly });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::ExpFactor;
    use crate::qseries;

    const W: i32 = 16;

    fn tr() -> Truncation {
        Truncation::new(4, 2)
    }

    #[test]
    fn t0_on_vacuum() {
        let r = mode_apply(&Field::t(), 0, &FockVector::vacuum(), W).unwrap();
        let expect = Scalar::monomial(Rat::one(), -1, 0).add(&Scalar::monomial(Rat::one(), 1, 0));
        assert_eq!(r.len(), 1);
        assert!(r.coeff(&Partition::empty()).compare(&expect).0);
    }

    #[test]
    fn grading_kills_positive_modes() {
        for m in 1..4 {
            assert!(mode_apply(&Field::t(), m, &FockVector::vacuum(), W).unwrap().is_empty());
            let u = FockVector::basis(Partition::new(vec![1]));
            if m > 1 {
                assert!(mode_apply(&Field::t(), m, &u, W).unwrap().is_empty());
            }
        }
    }

    #[test]
    fn creation_mode_on_vacuum() {
        // Λ(z) = p^{-1/2} exp(-Σ λ_{-m} z^m) ... so Λ_{-1} v = -p^{-1/2} λ_{-1} v
        let lam = Field::single(Scalar::one(), NOProduct::new(vec![ExpFactor::plus(Monomial::one())]));
        let r = mode_apply(&lam, -1, &FockVector::vacuum(), W).unwrap();
        let c = r.coeff(&Partition::new(vec![1]));
        assert!(c.compare(&Scalar::monomial(Rat::int(-1), -1, 0)).0);
    }

    #[test]
    fn vacuum_expectation_of_tt() {
        let v = FockVector::vacuum();
        let phi = DualVector::coordinate(Partition::empty());
        let t = Field::t();
        let terms = matrix_element(&phi, &t, &t, &v, tr(), W).unwrap();
        let f = qseries::f(tr()).unwrap();
        let p = Monomial::p();
        let mut expect = vec![
            (f.inv().unwrap(), -2),
            (f.scale_var(&p.inv()), 0),
            (f.scale_var(&p), 0),
            (f.inv().unwrap(), 2),
        ];
        assert_eq!(terms.len(), 4);
        for t in &terms {
            assert_eq!(t.poly.len(), 1);
            let c = &t.poly[&(0, 0)];
            let hit = expect
                .iter()
                .position(|(form, a2)| t.c.agrees_with(form) && c.compare(&Scalar::monomial(Rat::one(), *a2, 0)).0)
                .expect("unexpected wick term");
            expect.remove(hit);
        }
    }

    #[test]
    fn brute_force_matrix_element_against_modes() {
        // <(λ_{-1}v)*, T(z)T(w) v>: resum the x-expansion of each Wick term
        // and compare with Σ_{n,m} <φ|T_n T_m|v> z^{-n} w^{-m}.
        let t = Field::t();
        let phi = DualVector::coordinate(Partition::new(vec![1]));
        let v = FockVector::vacuum();
        let terms = matrix_element(&phi, &t, &t, &v, tr(), W).unwrap();
        // series in x = w/z: total z^{-n} w^{-m} coefficient with n + m = -1
        for k in 0..6 {
            // coefficient of z^{-n} w^{-m} with n = k, m = -1 - k
            let n = k;
            let m = -1 - k;
            let mut lhs = Scalar::exact_zero();
            for term in &terms {
                let e = term.c.expand(crate::ring::Direction::InX, 8, W).unwrap();
                for ((i, j), c) in &term.poly {
                    // z^i w^j x^l = z^{i-l} w^{j+l}
                    let l = i + n;
                    if l < 0 || j + l != -m {
                        continue;
                    }
                    lhs = lhs.add(&c.mul(&e.coeff(l).unwrap()));
                }
            }
            let tm = mode_apply(&t, m, &v, W).unwrap();
            let tn = mode_apply(&t, n, &tm, W).unwrap();
            let rhs = crate::fock::pair(&phi, &tn);
            let (eq, _) = lhs.compare(&rhs);
            assert!(eq, "n={n}: {lhs} vs {rhs}");
        }
    }
}
