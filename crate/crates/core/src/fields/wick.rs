//! Wick contractions, product expansions, pole lines and residues.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Mutex, OnceLock};

use super::{ExpFactor, Field, NOProduct};
use crate::error::{Error, Result};
use crate::qseries::Truncation;
use crate::ring::{Monomial, ProductForm, Scalar};

/// `exp(Σ_{m>0} κ_m (x·c)^m)` in closed form.
///
/// Expanding `1/(1+p^m)` geometrically and resumming each
/// `Σ_m (x·γ)^m/m` as `−log(1 − x·γ)` gives
/// `(1 − xc) Π_{j≥0} [(1 − xc q p^j)(1 − xc q⁻¹ p^{j+1})]^{−(−1)^j}`.
fn heisenberg_kernel(c: &Monomial, tr: Truncation) -> ProductForm {
    let mut factors = vec![(c.clone(), 1)];
    let q = Monomial::q();
    let cut = tr.cutoff();
    for (start, e0) in [(c.mul(&q), -1), (c.mul(&q.inv()).mul(&Monomial::p()), -1)] {
        let mut g = start;
        let mut e = e0;
        while g.ord() <= cut {
            factors.push((g.clone(), e));
            g = g.mul(&Monomial::p());
            e = -e;
        }
    }
    ProductForm::from_parts(0, Scalar::one(), factors, Some(cut + 1), None)
}

type ContractKey = (ExpFactor, ExpFactor, Truncation);

/// Contraction of `a` at `z` with `b` at `w`, a function of `x = w/z`.
pub fn contract(a: &ExpFactor, b: &ExpFactor, tr: Truncation) -> Result<ProductForm> {
    a.check()?;
    b.check()?;
    static CACHE: OnceLock<Mutex<HashMap<ContractKey, ProductForm>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (a.clone(), b.clone(), tr);
    if let Some(r) = cache.lock().unwrap().get(&key) {
        return Ok(r.clone());
    }
    let c = b.shift.div(&a.shift);
    let k = heisenberg_kernel(&c, tr);
    let r = if a.sign() * b.sign() > 0 { k } else { k.inv()? };
    cache.lock().unwrap().insert(key, r.clone());
    Ok(r)
}

/// Product of pairwise contractions of two normal-ordered products.
pub fn contract_products(a: &NOProduct, b: &NOProduct, tr: Truncation) -> Result<ProductForm> {
    let mut r = ProductForm::one();
    for fa in a.factors() {
        for fb in b.factors() {
            r = r.mul(&contract(fa, fb, tr)?);
        }
    }
    Ok(r)
}

/// One term of an n-fold product: a coefficient, one normal-ordered
/// product per variable, and a contraction for every pair `i < j` as a
/// function of `z_j / z_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionTerm {
    pub coeff: Scalar,
    pub nops: Vec<NOProduct>,
    pub pairs: BTreeMap<(usize, usize), ProductForm>,
}

impl ExpansionTerm {
    pub fn pair(&self, i: usize, j: usize) -> ProductForm {
        self.pairs.get(&(i, j)).cloned().unwrap_or_else(ProductForm::one)
    }
}

/// `Y(A₁,z₁)…Y(A_n,z_n)` as a sum of contraction functions times
/// normal-ordered products.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductExpansion {
    pub arity: usize,
    pub terms: Vec<ExpansionTerm>,
}

impl ProductExpansion {
    /// The single-variable case read back as a field.
    pub fn to_field(&self) -> Field {
        assert_eq!(self.arity, 1, "only a one-variable expansion is a field");
        Field::from_terms(self.terms.iter().map(|t| (t.coeff.clone(), t.nops[0].clone())))
    }

    /// Multiply the contraction of pair `(i, j)` in every term.
    pub fn with_pair_factor(&self, i: usize, j: usize, g: &ProductForm) -> ProductExpansion {
        let mut r = self.clone();
        for t in &mut r.terms {
            let cur = t.pair(i, j);
            t.pairs.insert((i, j), cur.mul(g));
        }
        r
    }
}

pub fn wick_expand(a: &Field, b: &Field, tr: Truncation) -> Result<ProductExpansion> {
    wick_expand_n(&[a, b], tr)
}

pub fn wick_expand_n(fields: &[&Field], tr: Truncation) -> Result<ProductExpansion> {
    let n = fields.len();
    let mut terms = vec![ExpansionTerm { coeff: Scalar::one(), nops: Vec::new(), pairs: BTreeMap::new() }];
    for (j, f) in fields.iter().enumerate() {
        let mut next = Vec::with_capacity(terms.len() * f.len());
        for t in &terms {
            for (c, nop) in f.terms() {
                nop.check()?;
                let mut pairs = t.pairs.clone();
                for (i, prev) in t.nops.iter().enumerate() {
                    pairs.insert((i, j), contract_products(prev, nop, tr)?);
                }
                let mut nops = t.nops.clone();
                nops.push(nop.clone());
                next.push(ExpansionTerm { coeff: t.coeff.mul(c), nops, pairs });
            }
        }
        terms = next;
    }
    Ok(ProductExpansion { arity: n, terms })
}

/// A pole line `z = w·γ` and its largest order across terms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PoleLine {
    pub gamma: Monomial,
    pub order: i32,
}

/// Pole lines of the `(0, 1)` contraction with `p`-order below the
/// truncation order.
pub fn pole_lines(p: &ProductExpansion, tr: Truncation) -> Vec<PoleLine> {
    let mut lines: BTreeMap<Monomial, i32> = BTreeMap::new();
    for t in &p.terms {
        for (g, e) in t.pair(0, 1).factors() {
            if e < 0 && g.ord() < tr.window() {
                let o = lines.entry(g.clone()).or_insert(0);
                *o = (*o).max(-e);
            }
        }
    }
    lines.into_iter().map(|(gamma, order)| PoleLine { gamma, order }).collect()
}

/// `Res_{z_i = γ z_j} (…)(z_i − γ z_j)^n dz_i/z_i` for `i < j`, optionally
/// after multiplying the `(i, j)` contraction by `multiplier`.
pub fn residue_at(
    p: &ProductExpansion,
    i: usize,
    j: usize,
    gamma: &Monomial,
    multiplier: Option<&ProductForm>,
    n: u32,
    tr: Truncation,
) -> Result<ProductExpansion> {
    assert!(i < j && j < p.arity, "residue needs i < j < arity");
    let window = tr.cutoff() + 1;
    let x0 = gamma.inv();
    let remap = |k: usize| if k > i { k - 1 } else { k };
    let mut terms = Vec::new();
    for t in &p.terms {
        let mut c = t.pair(i, j);
        if let Some(m) = multiplier {
            c = c.mul(m);
        }
        let (rest, e) = c.take_factor(gamma);
        if e >= 0 || (n as i32) >= -e {
            continue;
        }
        if e < -1 || n > 0 {
            return Err(Error::HigherOrderPole { line: gamma.to_string(), order: -e });
        }
        let value = rest.eval_at(&x0, window)?;
        if value.is_zero() && value.is_exact() {
            continue;
        }
        let mut pairs: BTreeMap<(usize, usize), ProductForm> = BTreeMap::new();
        let mut put = |key: (usize, usize), g: ProductForm| {
            let cur = pairs.remove(&key).unwrap_or_else(ProductForm::one);
            pairs.insert(key, cur.mul(&g));
        };
        for (&(k, l), g) in &t.pairs {
            if (k, l) == (i, j) {
                continue;
            }
            if k != i && l != i {
                put((remap(k), remap(l)), g.clone());
            } else if k == i {
                // G(z_l / z_i) with z_i = γ z_j
                if j < l {
                    put((remap(j), remap(l)), g.scale_var(&gamma.inv()));
                } else {
                    put((remap(l), remap(j)), g.reflect().scale_var(gamma));
                }
            } else {
                // G(z_i / z_k), k < i < j
                put((remap(k), remap(j)), g.scale_var(gamma));
            }
        }
        let mut nops = t.nops.clone();
        let merged = nops[i].shifted(gamma).concat(&nops[j]);
        nops[j] = merged;
        nops.remove(i);
        terms.push(ExpansionTerm { coeff: t.coeff.mul(&value), nops, pairs });
    }
    Ok(ProductExpansion { arity: p.arity - 1, terms })
}

/// Residue of a two-field expansion at `z = w·γ`, as a field in `w`.
pub fn residue(
    p: &ProductExpansion,
    gamma: &Monomial,
    multiplier: Option<&ProductForm>,
    n: u32,
    tr: Truncation,
) -> Result<Field> {
    assert_eq!(p.arity, 2, "residue expects a two-field expansion");
    Ok(residue_at(p, 0, 1, gamma, multiplier, n, tr)?.to_field())
}

/// `S_AB(x) = C_AB(x) / C_BA(1/x)`, required to be the same for every
/// pair of terms.
pub fn exchange_function(a: &Field, b: &Field, tr: Truncation) -> Result<ProductForm> {
    let mut common: Option<ProductForm> = None;
    for (_, na) in a.terms() {
        for (_, nb) in b.terms() {
            let ab = contract_products(na, nb, tr)?;
            let ba = contract_products(nb, na, tr)?.reflect();
            let s = ab.div(&ba)?;
            match &common {
                None => common = Some(s),
                Some(c) => {
                    if !c.agrees_with(&s) {
                        return Err(Error::NonScalarExchange { a: na.to_string(), b: nb.to_string() });
                    }
                }
            }
        }
    }
    Ok(common.unwrap_or_else(ProductForm::one))
}
