//! Pochhammer symbols, theta functions and the named structure functions,
//! all as truncated `ProductForm`s, plus delta-distribution bookkeeping.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fields::Field;
use crate::ring::{Direction, Monomial, ProductForm, Rat, Scalar};

/// How far infinite products are carried.
///
/// Results are wanted through p-order `p_order`; factors are generated up to
/// p-order `p_order + buffer` so that substituting `x` by a monomial of
/// negative order does not eat into the target window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Truncation {
    pub p_order: i32,
    pub buffer: i32,
}

impl Truncation {
    pub fn new(p_order: i32, buffer: i32) -> Self {
        Truncation { p_order, buffer }
    }

    /// Largest s-order of a generated factor.
    pub fn cutoff(&self) -> i32 {
        2 * (self.p_order + self.buffer)
    }

    /// First s-order that is not guaranteed.
    pub fn window(&self) -> i32 {
        2 * self.p_order
    }
}

fn check_base(base: &Monomial) -> Result<()> {
    if base.ord() <= 0 {
        return Err(Error::NonterminatingProduct(base.to_string()));
    }
    Ok(())
}

/// `(a₁,…,a_k; base)_∞` as a constant product form.
pub fn pochhammer(args: &[Monomial], base: &Monomial, tr: Truncation) -> Result<ProductForm> {
    check_base(base)?;
    let mut unit = Scalar::one();
    for a in args {
        let mut t = a.clone();
        while t.ord() <= tr.cutoff() {
            unit = unit.mul(&Scalar::one().sub(&t.to_scalar()));
            t = t.mul(base);
        }
    }
    let unit = unit.truncate(unit.lower() + tr.cutoff() + 1);
    Ok(ProductForm::constant(unit))
}

/// `(x·a₁,…,x·a_k; base)_∞`.
pub fn pochhammer_x(args: &[Monomial], base: &Monomial, tr: Truncation) -> Result<ProductForm> {
    check_base(base)?;
    let mut factors = Vec::new();
    for a in args {
        let mut t = a.clone();
        while t.ord() <= tr.cutoff() {
            factors.push((t.clone(), 1));
            t = t.mul(base);
        }
    }
    Ok(ProductForm::from_parts(0, Scalar::one(), factors, Some(tr.cutoff() + 1), None))
}

/// `θ_a(x·c) = Π_{n>0} (1 − x c a^{n−1})(1 − x⁻¹ c⁻¹ aⁿ)(1 − aⁿ)`.
pub fn theta(a: &Monomial, c: &Monomial, tr: Truncation) -> Result<ProductForm> {
    let near = pochhammer_x(std::slice::from_ref(c), a, tr)?;
    let far = pochhammer_x(&[c.inv().mul(a)], a, tr)?.reflect();
    let consts = pochhammer(std::slice::from_ref(a), a, tr)?;
    Ok(near.mul(&far).mul(&consts))
}

fn p2() -> Monomial {
    Monomial::pq(4, 0)
}

fn m(a2: i32, b: i32) -> Monomial {
    Monomial::pq(a2, b)
}

/// `f(x) = (1−x)⁻¹ (x|q, pq⁻¹; p²)_∞ / (x|pq, p²q⁻¹; p²)_∞`.
pub fn f(tr: Truncation) -> Result<ProductForm> {
    let num = pochhammer_x(&[m(0, 1), m(2, -1)], &p2(), tr)?;
    let den = pochhammer_x(&[m(2, 1), m(4, -1)], &p2(), tr)?;
    Ok(num.div(&den)?.mul(&ProductForm::binomial(Monomial::one(), -1)))
}

/// `g(x) = (1−xq)(1−xp/q) / ((1−x)(1−xp))`, exact.
pub fn g() -> ProductForm {
    ProductForm::from_parts(
        0,
        Scalar::one(),
        [(m(0, 1), 1), (m(2, -1), 1), (Monomial::one(), -1), (m(2, 0), -1)],
        None,
        None,
    )
}

/// The exchange function of `T` with itself, as a quotient of six thetas.
pub fn s_tt(tr: Truncation) -> Result<ProductForm> {
    let a = p2();
    let mut r = ProductForm::one();
    for c in [m(2, 0), m(0, -1), m(-2, 1)] {
        r = r.mul(&theta(&a, &c, tr)?);
    }
    for c in [m(-2, 0), m(0, 1), m(2, -1)] {
        r = r.div(&theta(&a, &c, tr)?)?;
    }
    Ok(r)
}

pub fn f1(tr: Truncation) -> Result<ProductForm> {
    let num = pochhammer_x(&[m(2, 0), m(4, 1), m(2, -1), m(0, 2)], &p2(), tr)?;
    let den = pochhammer_x(&[Monomial::one(), m(2, 1), m(4, -1), m(2, 2)], &p2(), tr)?;
    num.div(&den)
}

pub fn f2(tr: Truncation) -> Result<ProductForm> {
    let num = pochhammer_x(&[m(4, 1), m(2, -1), m(2, -1), m(0, 1), m(0, 2), m(2, -2)], &p2(), tr)?;
    let den = pochhammer_x(&[m(2, 1), m(2, 1), m(0, -1), m(2, 2), m(4, -2), m(4, -1)], &p2(), tr)?;
    Ok(num.div(&den)?.mul(&ProductForm::binomial(Monomial::one(), -1)))
}

/// A product form that may only be expanded in one direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Directed {
    pub form: ProductForm,
    pub dir: Direction,
}

impl Directed {
    pub fn new(form: ProductForm, dir: Direction) -> Self {
        Directed { form, dir }
    }

    /// Coefficients in the mandated direction.
    pub fn expand(&self, order: i32, window: i32) -> Result<crate::ring::Expansion> {
        self.form.expand(self.dir, order, window)
    }
}

/// `f(x)/(1 − xpq²)`, whose `x^{−i}` coefficients are `α_i` for `i ≤ 0`.
pub fn alpha_plus(tr: Truncation) -> Result<Directed> {
    let form = f(tr)?.mul(&ProductForm::binomial(m(2, 2), -1));
    Ok(Directed::new(form, Direction::InX))
}

/// `f(x⁻¹)/(1 − xpq²)`, whose `x^{−i}` coefficients are `α_i` for `i > 0`.
pub fn alpha_minus(tr: Truncation) -> Result<Directed> {
    let form = f(tr)?.reflect().mul(&ProductForm::binomial(m(2, 2), -1));
    Ok(Directed::new(form, Direction::InInvX))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StructureName {
    F,
    G,
    STT,
    F1,
    F2,
    AlphaPlus,
    AlphaMinus,
}

impl StructureName {
    pub const ALL: [StructureName; 7] = [
        StructureName::F,
        StructureName::G,
        StructureName::STT,
        StructureName::F1,
        StructureName::F2,
        StructureName::AlphaPlus,
        StructureName::AlphaMinus,
    ];
}

impl fmt::Display for StructureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StructureName::F => "f",
            StructureName::G => "g",
            StructureName::STT => "S_TT",
            StructureName::F1 => "F1",
            StructureName::F2 => "F2",
            StructureName::AlphaPlus => "alpha+",
            StructureName::AlphaMinus => "alpha-",
        };
        f.write_str(s)
    }
}

impl FromStr for StructureName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "f" => StructureName::F,
            "g" => StructureName::G,
            "S_TT" | "STT" | "S" => StructureName::STT,
            "F1" => StructureName::F1,
            "F2" => StructureName::F2,
            "alpha+" | "alpha_plus" => StructureName::AlphaPlus,
            "alpha-" | "alpha_minus" => StructureName::AlphaMinus,
            _ => return Err(Error::UnknownSeries(s.to_string())),
        })
    }
}

/// Build a named structure function. Everything except the alpha series is
/// expanded in `x` by default.
pub fn structure_function(name: StructureName, tr: Truncation) -> Result<Directed> {
    let inx = |form| Directed::new(form, Direction::InX);
    Ok(match name {
        StructureName::F => inx(f(tr)?),
        StructureName::G => inx(g()),
        StructureName::STT => inx(s_tt(tr)?),
        StructureName::F1 => inx(f1(tr)?),
        StructureName::F2 => inx(f2(tr)?),
        StructureName::AlphaPlus => alpha_plus(tr)?,
        StructureName::AlphaMinus => alpha_minus(tr)?,
    })
}

/// What multiplies a delta line: a field in `w` or a constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DeltaCoefficient {
    Constant(Scalar),
    Field(Field),
}

/// `C(w)·(w∂_w)^k δ(wγ/z)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaTerm {
    pub gamma: Monomial,
    pub k: u32,
    pub coefficient: DeltaCoefficient,
}

impl DeltaTerm {
    pub fn constant(gamma: Monomial, c: Scalar) -> Self {
        DeltaTerm { gamma, k: 0, coefficient: DeltaCoefficient::Constant(c) }
    }

    pub fn field(gamma: Monomial, c: Field) -> Self {
        DeltaTerm { gamma, k: 0, coefficient: DeltaCoefficient::Field(c) }
    }
}

/// Coefficient of `z^{−n} w^{−m}` in `(w∂_w)^k δ(wγ/z)`.
pub fn delta_coefficient(gamma: &Monomial, k: u32, n: i32, m: i32) -> Scalar {
    if m != -n {
        return Scalar::exact_zero();
    }
    let g = gamma.pow(n);
    let nk = Rat::int(n as i64).pow(k as i32);
    Scalar::monomial(&g.c * &nk, g.a2, g.b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::QRat;

    fn tr(k: i32, b: i32) -> Truncation {
        Truncation::new(k, b)
    }

    fn mono(c: i64, a2: i32, b: i32) -> Scalar {
        Scalar::monomial(Rat::int(c), a2, b)
    }

    #[test]
    fn pochhammer_p_through_p3() {
        let r = pochhammer(&[m(2, 0)], &p2(), tr(3, 0)).unwrap();
        let expect = Scalar::one().sub(&mono(1, 2, 0)).sub(&mono(1, 6, 0));
        let (eq, window) = r.unit().compare(&expect);
        assert!(eq);
        assert_eq!(window, 7);
    }

    #[test]
    fn pochhammer_edge_cases() {
        let empty = pochhammer(&[], &p2(), tr(3, 0)).unwrap();
        assert!(empty.unit().is_one() || empty.unit().compare(&Scalar::one()).0);
        let q_mod_p2 = pochhammer(&[m(0, 1)], &p2(), tr(1, 0)).unwrap();
        assert!(q_mod_p2.unit().compare(&Scalar::one().sub(&mono(1, 0, 1))).0);
        assert!(matches!(pochhammer(&[m(0, 1)], &m(0, 1), tr(1, 0)), Err(Error::NonterminatingProduct(_))));
    }

    #[test]
    fn f_low_coefficients() {
        let e = f(tr(2, 0)).unwrap().expand(Direction::InX, 2, 4).unwrap();
        assert!(e.coeff(0).unwrap().compare(&Scalar::one()).0);
        // (1 - q) + p (q - q^-1)
        let f1 = Scalar::one().sub(&mono(1, 0, 1)).add(&mono(1, 2, 1)).sub(&mono(1, 2, -1));
        let c = e.coeff(1).unwrap();
        assert!(c.prec() >= 4);
        assert!(c.truncate(4).compare(&f1.truncate(4)).0, "{c}");
    }

    #[test]
    fn g_at_q() {
        let v = g().eval_at(&m(0, 1), 12).unwrap();
        // (1+q)(1-p)/(1-pq)
        let expect = Scalar::from_qrat(QRat::from_poly(crate::ring::QPoly::from_parts(0, vec![Rat::one(), Rat::one()])))
            .mul(&Scalar::one().sub(&mono(1, 2, 0)))
            .mul(&Scalar::one().sub(&mono(1, 2, 1)).inv_to(12).unwrap());
        assert!(v.compare(&expect).0);
    }

    #[test]
    fn theta_quasi_periodicity() {
        let t = tr(4, 2);
        let shifted = theta(&p2(), &p2(), t).unwrap();
        let base = theta(&p2(), &Monomial::one(), t).unwrap();
        let expect = base.mul(&ProductForm::x_power(-1)).mul_scalar(&Scalar::int(-1));
        let a = shifted.compare(&expect);
        assert!(a.equal, "{:?}", a.detail);
    }

    #[test]
    fn theta_mod_p2_keeps_one_minus_x() {
        let t = theta(&p2(), &Monomial::one(), tr(0, 1)).unwrap();
        assert_eq!(t.exponent_of(&Monomial::one()), 1);
    }

    #[test]
    fn stt_factorizations() {
        for k in [2, 4] {
            let t = tr(k, 2);
            let s = s_tt(t).unwrap();
            let ff = f(t).unwrap();
            let a = ff.inv().unwrap().mul(&ff.reflect());
            assert!(s.compare(&a).equal, "{:?}", s.compare(&a).detail);
            let p = Monomial::p();
            let b = ff.scale_var(&p).mul(&ff.reflect().scale_var(&p).inv().unwrap());
            assert!(s.compare(&b).equal, "{:?}", s.compare(&b).detail);
            let c = ff.scale_var(&p.inv()).mul(&ff.reflect().scale_var(&p.inv()).inv().unwrap());
            assert!(s.compare(&c).equal, "{:?}", s.compare(&c).detail);
            assert!(s.mul(&s.reflect()).compare(&ProductForm::one()).equal);
        }
    }

    #[test]
    fn alpha_leading_coefficients() {
        let t = tr(3, 2);
        let ap = alpha_plus(t).unwrap().expand(0, 6).unwrap();
        assert!(ap.coeff_x(0).unwrap().compare(&Scalar::one()).0);
        let am = alpha_minus(t).unwrap().expand(1, 6).unwrap();
        assert!(am.coeff_x(0).unwrap().is_zero());
        let a1 = am.coeff_x(-1).unwrap();
        assert!(a1.compare(&mono(-1, -2, -2)).0, "{a1}");
    }

    #[test]
    fn delta_coefficients() {
        let g = m(-2, 0);
        assert!(delta_coefficient(&g, 0, 3, -3).compare(&mono(1, -6, 0)).0);
        assert!(delta_coefficient(&g, 2, 3, 1).is_zero());
        assert!(delta_coefficient(&m(0, 1), 1, 2, -2).compare(&mono(2, 0, 2)).0);
    }
}
