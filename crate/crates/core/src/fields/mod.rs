//! Normal-ordered exponential fields built from `Λ(z)`.
//!
//! `Λ(z) = p^{−1/2} :exp(−Σ_{m≠0} λ_m z^{−m}):` on the vacuum module, so a
//! factor `Λ(z·γ)^{±1}` contributes `p^{∓1/2}` to its product's prefactor and
//! `∓γ^{−m}` to the exponent coefficient of `λ_m z^{−m}`.

mod modes;
mod wick;

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::ring::{Monomial, QTarget, Rat, Scalar};

pub use modes::{matrix_element, mode_apply, MatrixTerm, Poly2};
pub use wick::{
    contract, contract_products, exchange_function, pole_lines, residue, residue_at, wick_expand, wick_expand_n, ExpansionTerm,
    PoleLine, ProductExpansion,
};

/// `Λ(z·shift)` or its inverse, optionally differentiated.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExpFactor {
    pub shift: Monomial,
    pub inverse: bool,
    pub deriv_order: u32,
}

impl ExpFactor {
    pub fn lambda(shift: Monomial) -> Self {
        ExpFactor { shift, inverse: false, deriv_order: 0 }
    }

    pub fn lambda_inv(shift: Monomial) -> Self {
        ExpFactor { shift, inverse: true, deriv_order: 0 }
    }

    /// `Λ⁺(z·γ) = Λ(z·γ)`.
    pub fn plus(gamma: Monomial) -> Self {
        ExpFactor::lambda(gamma)
    }

    /// `Λ⁻(z·γ) = Λ(z·γ/p)⁻¹`.
    pub fn minus(gamma: Monomial) -> Self {
        ExpFactor::lambda_inv(gamma.div(&Monomial::p()))
    }

    /// Sign of the exponent: `−1` for `Λ`, `+1` for `Λ⁻¹`.
    pub fn sign(&self) -> i32 {
        if self.inverse {
            1
        } else {
            -1
        }
    }

    pub fn shifted(&self, g: &Monomial) -> ExpFactor {
        ExpFactor { shift: self.shift.mul(g), ..self.clone() }
    }

    fn check(&self) -> Result<()> {
        if self.deriv_order > 0 {
            return Err(Error::UnsupportedDerivative);
        }
        Ok(())
    }
}

impl fmt::Display for ExpFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arg = if self.shift.is_one() { "z".to_string() } else { format!("z*{}", self.shift) };
        let d = if self.deriv_order > 0 { format!("d^{} ", self.deriv_order) } else { String::new() };
        if self.inverse {
            write!(f, "{d}Λ({arg})^-1")
        } else {
            write!(f, "{d}Λ({arg})")
        }
    }
}

impl fmt::Debug for ExpFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A normal-ordered product of exponential factors in one variable.
///
/// Factors are kept sorted, and `Λ(zγ)Λ(zγ)⁻¹` pairs cancel, so equal
/// operators have equal representations.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct NOProduct {
    factors: Vec<ExpFactor>,
}

impl NOProduct {
    pub fn identity() -> Self {
        NOProduct::default()
    }

    pub fn new(factors: Vec<ExpFactor>) -> Self {
        let mut out: Vec<ExpFactor> = Vec::with_capacity(factors.len());
        for f in factors {
            let opposite = ExpFactor { inverse: !f.inverse, ..f.clone() };
            if f.deriv_order == 0 {
                if let Some(i) = out.iter().position(|g| *g == opposite) {
                    out.remove(i);
                    continue;
                }
            }
            out.push(f);
        }
        out.sort();
        NOProduct { factors: out }
    }

    pub fn factors(&self) -> &[ExpFactor] {
        &self.factors
    }

    pub fn is_identity(&self) -> bool {
        self.factors.is_empty()
    }

    /// `p^{(#Λ⁻¹ − #Λ)/2}`.
    pub fn prefactor(&self) -> Scalar {
        let a2: i32 = self.factors.iter().map(ExpFactor::sign).sum();
        Scalar::monomial(Rat::one(), a2, 0)
    }

    pub fn concat(&self, o: &NOProduct) -> NOProduct {
        let mut f = self.factors.clone();
        f.extend_from_slice(&o.factors);
        NOProduct::new(f)
    }

    pub fn shifted(&self, g: &Monomial) -> NOProduct {
        NOProduct::new(self.factors.iter().map(|f| f.shifted(g)).collect())
    }

    pub(crate) fn check(&self) -> Result<()> {
        self.factors.iter().try_for_each(ExpFactor::check)
    }

    /// Exponent coefficients: `λ_m z^{−m}` gets `Σ εᵢ γᵢ^{−m}`.
    pub fn mode_coefficient(&self, m: i32) -> Vec<Monomial> {
        self.factors
            .iter()
            .map(|f| {
                let g = f.shift.pow(-m);
                if f.inverse {
                    g
                } else {
                    g.neg()
                }
            })
            .collect()
    }
}

impl fmt::Display for NOProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        write!(f, ":")?;
        for (i, x) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ":")
    }
}

impl fmt::Debug for NOProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A Scalar-linear combination of normal-ordered products.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Field {
    pub name: Option<String>,
    terms: BTreeMap<NOProduct, Scalar>,
}

impl Field {
    pub fn zero() -> Self {
        Field::default()
    }

    /// `Ω`, the identity field.
    pub fn omega() -> Self {
        Field::from_terms([(Scalar::one(), NOProduct::identity())]).named("Omega")
    }

    /// `T(z) = Λ(z) + Λ(z/p)⁻¹`.
    pub fn t() -> Self {
        Field::from_terms([
            (Scalar::one(), NOProduct::new(vec![ExpFactor::plus(Monomial::one())])),
            (Scalar::one(), NOProduct::new(vec![ExpFactor::minus(Monomial::one())])),
        ])
        .named("T")
    }

    pub fn single(c: Scalar, nop: NOProduct) -> Self {
        Field::from_terms([(c, nop)])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Scalar, NOProduct)>) -> Self {
        let mut f = Field::zero();
        for (c, n) in terms {
            f.add_term(c, n);
        }
        f
    }

    pub fn named(mut self, name: &str) -> Self {
        self.name = Some(name.to_string());
        self
    }

    pub fn add_term(&mut self, c: Scalar, n: NOProduct) {
        match self.terms.get_mut(&n) {
            Some(x) => {
                *x = x.add(&c);
                if x.is_zero() && x.is_exact() {
                    self.terms.remove(&n);
                }
            }
            None => {
                if !(c.is_zero() && c.is_exact()) {
                    self.terms.insert(n, c);
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Scalar, &NOProduct)> + '_ {
        self.terms.iter().map(|(n, c)| (c, n))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when every coefficient vanishes on its window.
    pub fn vanishes(&self) -> bool {
        self.terms.values().all(Scalar::is_zero)
    }

    pub fn coefficient(&self, n: &NOProduct) -> Scalar {
        self.terms.get(n).cloned().unwrap_or_else(Scalar::exact_zero)
    }

    pub fn add(&self, o: &Field) -> Field {
        let mut r = Field { name: None, terms: self.terms.clone() };
        for (c, n) in o.terms() {
            r.add_term(c.clone(), n.clone());
        }
        r
    }

    pub fn scale(&self, s: &Scalar) -> Field {
        Field::from_terms(self.terms().map(|(c, n)| (c.mul(s), n.clone())))
    }

    pub fn sub(&self, o: &Field) -> Field {
        self.add(&o.scale(&Scalar::int(-1)))
    }

    /// `F(w) ↦ F(w·γ)`.
    pub fn shifted(&self, g: &Monomial) -> Field {
        Field::from_terms(self.terms().map(|(c, n)| (c.clone(), n.shifted(g))))
    }

    pub fn truncate(&self, prec: i32) -> Field {
        Field { name: self.name.clone(), terms: self.terms.iter().map(|(n, c)| (n.clone(), c.truncate(prec))).collect() }
    }

    /// Smallest coefficient precision.
    pub fn prec(&self) -> i32 {
        self.terms.values().map(Scalar::prec).min().unwrap_or(crate::ring::EXACT)
    }

    /// Multiple of `Ω`, if that is all this field is.
    pub fn as_constant(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::exact_zero()),
            1 => self.terms.get(&NOProduct::identity()).cloned(),
            _ => None,
        }
    }

    /// Coefficientwise agreement on shared windows.
    pub fn agrees_with(&self, o: &Field) -> bool {
        self.sub(o).vanishes()
    }

    /// Specialize `q` in coefficients and shifts. Coefficients are
    /// substituted on the combined term of each normal-ordered product.
    pub fn substitute_q(&self, target: QTarget, window: i32) -> Result<Field> {
        let mut out = Field::zero();
        for (c, n) in self.terms() {
            let c = c.substitute_q(target, window).map_err(|e| match e {
                Error::PoleAtSubstitution { target, coefficient } => {
                    Error::PoleAtSubstitution { target, coefficient: format!("{coefficient} on {n}") }
                }
                e => e,
            })?;
            let factors = n
                .factors()
                .iter()
                .map(|f| {
                    let s = &f.shift;
                    let shift = match target {
                        QTarget::One => Monomial::new(s.c.clone(), s.a2, 0),
                        QTarget::P => Monomial::new(s.c.clone(), s.a2 + 2 * s.b, 0),
                    };
                    ExpFactor { shift, ..f.clone() }
                })
                .collect();
            out.add_term(c, NOProduct::new(factors));
        }
        out.name = self.name.as_ref().map(|n| format!("{n}|{target}"));
        Ok(out)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (c, n)) in self.terms().enumerate() {
            if i > 0 {
                writeln!(f)?;
                write!(f, "  + ")?;
            }
            write!(f, "[{c}] {n}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
