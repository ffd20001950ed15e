//! Rational functions of an auxiliary variable `x` in factored form.
//!
//! A `ProductForm` is `x^xpow · unit · Π (1 − x·γ)^e`. Truncated infinite
//! products record where they were cut: `tail_x = t` means every omitted
//! factor has the shape `(1 − x·δ)` with `ord δ ≥ t`, and `tail_inv = t`
//! means every omitted factor is `(1 − δ/x)` with `ord δ ≥ t`. Both sides
//! are tracked because theta functions are cut on both.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use super::monomial::Monomial;
use super::qrat::QRat;
use super::rat::Rat;
use super::scalar::{Scalar, EXACT};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Power series in `x`.
    InX,
    /// Power series in `1/x`.
    InInvX,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::InX => write!(f, "in-x"),
            Direction::InInvX => write!(f, "in-1/x"),
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct ProductForm {
    xpow: i32,
    unit: Scalar,
    factors: BTreeMap<Monomial, i32>,
    tail_x: Option<i32>,
    tail_inv: Option<i32>,
}

fn min_opt(a: Option<i32>, b: Option<i32>) -> Option<i32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Generalized binomial coefficient `C(e, n)`.
fn binom(e: i32, n: i32) -> Rat {
    let mut acc = Rat::one();
    for i in 0..n {
        acc = &(&acc * &Rat::int((e - i) as i64)) / &Rat::int((i + 1) as i64);
    }
    acc
}

/// `(1 − t)^e` for `ord t > 0`, as a series truncated at s-order `window`.
pub(crate) fn binom_series(t: &Monomial, e: i32, window: i32) -> Scalar {
    debug_assert!(t.ord() > 0);
    let mut acc = Scalar::zero(window);
    let mut n = 0;
    while n * t.ord() < window {
        if e >= 0 && n > e {
            break;
        }
        let m = t.neg().pow(n);
        acc = acc.add(&Scalar::monomial(&binom(e, n) * &m.c, m.a2, m.b));
        n += 1;
    }
    acc.truncate(window)
}

/// Verdict of an equality test between two product forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Agreement {
    pub equal: bool,
    /// Absolute s-order up to which the unit parts were compared.
    pub window: i32,
    pub detail: Option<String>,
}

/// Laurent coefficients of a product form in one direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    pub dir: Direction,
    /// Exponent (of `x` or `1/x`) of `coeffs[0]`.
    pub start: i32,
    pub coeffs: Vec<Scalar>,
}

impl Expansion {
    /// Coefficient of `y^k`, `y` the expansion variable. `None` past the
    /// computed order.
    pub fn coeff(&self, k: i32) -> Option<Scalar> {
        if k < self.start {
            return Some(Scalar::exact_zero());
        }
        self.coeffs.get((k - self.start) as usize).cloned()
    }

    /// Coefficient of `x^n` regardless of direction.
    pub fn coeff_x(&self, n: i32) -> Option<Scalar> {
        match self.dir {
            Direction::InX => self.coeff(n),
            Direction::InInvX => self.coeff(-n),
        }
    }

    /// Highest exponent of the expansion variable available.
    pub fn order(&self) -> i32 {
        self.start + self.coeffs.len() as i32 - 1
    }
}

impl ProductForm {
    pub fn one() -> Self {
        ProductForm::constant(Scalar::one())
    }

    pub fn constant(unit: Scalar) -> Self {
        ProductForm { xpow: 0, unit, factors: BTreeMap::new(), tail_x: None, tail_inv: None }
    }

    pub fn x_power(k: i32) -> Self {
        ProductForm { xpow: k, ..ProductForm::one() }
    }

    /// Exact `(1 − x·γ)^e`.
    pub fn binomial(gamma: Monomial, e: i32) -> Self {
        let mut f = ProductForm::one();
        if e != 0 {
            f.factors.insert(gamma, e);
        }
        f
    }

    pub fn from_parts(
        xpow: i32,
        unit: Scalar,
        factors: impl IntoIterator<Item = (Monomial, i32)>,
        tail_x: Option<i32>,
        tail_inv: Option<i32>,
    ) -> Self {
        let mut f = ProductForm { xpow, unit, factors: BTreeMap::new(), tail_x, tail_inv };
        for (g, e) in factors {
            f.push(g, e);
        }
        f
    }

    fn push(&mut self, g: Monomial, e: i32) {
        let v = self.factors.entry(g.clone()).or_insert(0);
        *v += e;
        if *v == 0 {
            self.factors.remove(&g);
        }
    }

    pub fn with_tails(mut self, tail_x: Option<i32>, tail_inv: Option<i32>) -> Self {
        self.tail_x = min_opt(self.tail_x, tail_x);
        self.tail_inv = min_opt(self.tail_inv, tail_inv);
        self
    }

    pub fn xpow(&self) -> i32 {
        self.xpow
    }

    pub fn unit(&self) -> &Scalar {
        &self.unit
    }

    pub fn factors(&self) -> impl Iterator<Item = (&Monomial, i32)> + '_ {
        self.factors.iter().map(|(g, &e)| (g, e))
    }

    pub fn factor_count(&self) -> usize {
        self.factors.len()
    }

    pub fn exponent_of(&self, g: &Monomial) -> i32 {
        self.factors.get(g).copied().unwrap_or(0)
    }

    pub fn tail_x(&self) -> Option<i32> {
        self.tail_x
    }

    pub fn tail_inv(&self) -> Option<i32> {
        self.tail_inv
    }

    pub fn is_exact(&self) -> bool {
        self.tail_x.is_none() && self.tail_inv.is_none() && self.unit.is_exact()
    }

    /// Coarsest precision marker: the smaller tail, or the unit's window.
    pub fn prec(&self) -> i32 {
        let u = if self.unit.is_exact() { EXACT } else { self.unit.prec() - self.unit.lower() };
        min_opt(self.tail_x, self.tail_inv).unwrap_or(EXACT).min(u)
    }

    pub fn mul(&self, o: &ProductForm) -> ProductForm {
        let mut r = ProductForm {
            xpow: self.xpow + o.xpow,
            unit: self.unit.mul(&o.unit),
            factors: self.factors.clone(),
            tail_x: min_opt(self.tail_x, o.tail_x),
            tail_inv: min_opt(self.tail_inv, o.tail_inv),
        };
        for (g, &e) in &o.factors {
            r.push(g.clone(), e);
        }
        r
    }

    pub fn mul_scalar(&self, s: &Scalar) -> ProductForm {
        ProductForm { unit: self.unit.mul(s), ..self.clone() }
    }

    pub fn inv(&self) -> Result<ProductForm> {
        Ok(ProductForm {
            xpow: -self.xpow,
            unit: self.unit.inv()?,
            factors: self.factors.iter().map(|(g, &e)| (g.clone(), -e)).collect(),
            tail_x: self.tail_x,
            tail_inv: self.tail_inv,
        })
    }

    pub fn div(&self, o: &ProductForm) -> Result<ProductForm> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, e: i32) -> Result<ProductForm> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = ProductForm::one();
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// `F(x) ↦ F(x·c)`.
    pub fn scale_var(&self, c: &Monomial) -> ProductForm {
        let cp = c.pow(self.xpow);
        ProductForm {
            xpow: self.xpow,
            unit: self.unit.mul_monomial(&cp.c, cp.a2, cp.b),
            factors: self.factors.iter().map(|(g, &e)| (g.mul(c), e)).collect(),
            tail_x: self.tail_x.map(|t| t + c.ord()),
            tail_inv: self.tail_inv.map(|t| t - c.ord()),
        }
    }

    /// `F(x) ↦ F(1/x)`, using `(1 − γ/x) = (−γ/x)(1 − x/γ)`.
    pub fn reflect(&self) -> ProductForm {
        let mut xpow = -self.xpow;
        let mut m = Monomial::one();
        let mut factors = BTreeMap::new();
        for (g, &e) in &self.factors {
            xpow -= e;
            m = m.mul(&g.neg().pow(e));
            factors.insert(g.inv(), e);
        }
        ProductForm {
            xpow,
            unit: self.unit.mul_monomial(&m.c, m.a2, m.b),
            factors,
            tail_x: self.tail_inv,
            tail_inv: self.tail_x,
        }
    }

    /// Drop the factor at `γ` entirely, returning its exponent.
    pub fn take_factor(&self, g: &Monomial) -> (ProductForm, i32) {
        let mut r = self.clone();
        let e = r.factors.remove(g).unwrap_or(0);
        (r, e)
    }

    /// Value at `x = x0`, with relative precision at most `window` s-orders.
    pub fn eval_at(&self, x0: &Monomial, window: i32) -> Result<Scalar> {
        let o = x0.ord();
        let mut w = window;
        if let Some(t) = self.tail_x {
            w = w.min(t + o);
        }
        if let Some(t) = self.tail_inv {
            w = w.min(t - o);
        }
        if !self.unit.is_exact() {
            w = w.min(self.unit.prec() - self.unit.lower());
        }
        if w <= 0 {
            return Err(Error::InsufficientPrecision { got: w, need: 1 });
        }
        let mut mono = x0.pow(self.xpow);
        let mut series = Scalar::one();
        let mut vanishes = false;
        for (g, &e) in &self.factors {
            let t = x0.mul(g);
            match t.ord().cmp(&0) {
                Ordering::Greater => series = series.mul(&binom_series(&t, e, w)).truncate(w),
                Ordering::Equal => {
                    let v = QRat::one().sub(&t.to_qrat());
                    if v.is_zero() {
                        if e < 0 {
                            return Err(Error::PoleAtEvaluation(x0.to_string()));
                        }
                        vanishes = true;
                        continue;
                    }
                    series = series.mul(&Scalar::from_qrat(v.pow(e)));
                }
                Ordering::Less => {
                    mono = mono.mul(&t.neg().pow(e));
                    series = series.mul(&binom_series(&t.inv(), e, w)).truncate(w);
                }
            }
        }
        if vanishes {
            return Ok(Scalar::exact_zero());
        }
        Ok(series.truncate(w).mul(&mono.to_scalar()).mul(&self.unit))
    }

    /// Laurent expansion in `dir` through exponent `order` of the expansion
    /// variable. Coefficient of `y^(start+l)` is kept to s-order
    /// `window + l·ν`, where `ν ≤ 0` is the lowest factor order.
    pub fn expand(&self, dir: Direction, order: i32, window: i32) -> Result<Expansion> {
        match dir {
            Direction::InX => self.expand_x(order, window),
            Direction::InInvX => {
                let mut e = self.reflect().expand_x(order, window)?;
                e.dir = Direction::InInvX;
                Ok(e)
            }
        }
    }

    fn expand_x(&self, order: i32, window: i32) -> Result<Expansion> {
        if self.tail_inv.is_some() {
            return Err(Error::NotExpandable {
                direction: "in-x".into(),
                reason: "truncated factors in 1/x are present".into(),
            });
        }
        let nu = self.factors.keys().map(Monomial::ord).min().unwrap_or(0).min(0);
        let len = order - self.xpow + 1;
        if len <= 0 {
            return Ok(Expansion { dir: Direction::InX, start: self.xpow, coeffs: Vec::new() });
        }
        let len = len as usize;
        let cap = |l: usize| -> i32 {
            if l == 0 {
                return EXACT;
            }
            let l = l as i32;
            let t = self.tail_x.map_or(EXACT, |t| t + (l - 1) * nu);
            t.min(window + l * nu)
        };
        let mut poly: Vec<Scalar> = (0..len)
            .map(|l| if l == 0 { Scalar::one() } else { Scalar::zero(cap(l)) })
            .collect();
        for (g, &e) in &self.factors {
            let terms: Vec<Monomial> = (0..len as i32)
                .map_while(|n| {
                    if e >= 0 && n > e {
                        return None;
                    }
                    let m = g.neg().pow(n);
                    Some(Monomial::new(&binom(e, n) * &m.c, m.a2, m.b))
                })
                .collect();
            let mut next = Vec::with_capacity(len);
            for l in 0..len {
                let mut acc = Scalar::zero(cap(l));
                for (n, m) in terms.iter().enumerate().take(l + 1) {
                    let src = &poly[l - n];
                    if src.is_zero() {
                        continue;
                    }
                    acc = acc.add(&src.mul_monomial(&m.c, m.a2, m.b));
                }
                next.push(acc.truncate(cap(l)));
            }
            poly = next;
        }
        let coeffs = poly.into_iter().map(|c| c.mul(&self.unit)).collect();
        Ok(Expansion { dir: Direction::InX, start: self.xpow, coeffs })
    }

    /// Equality as rational functions up to the recorded truncation: the
    /// quotient's factors must cancel or lie beyond a tail, and what is left
    /// must be `1`.
    pub fn compare(&self, o: &ProductForm) -> Agreement {
        let tail_x = min_opt(self.tail_x, o.tail_x);
        let tail_inv = min_opt(self.tail_inv, o.tail_inv);
        let mut resid = self.factors.clone();
        for (g, &e) in &o.factors {
            let v = resid.entry(g.clone()).or_insert(0);
            *v -= e;
            if *v == 0 {
                resid.remove(g);
            }
        }
        let mut xpow = self.xpow - o.xpow;
        let mut m = Monomial::one();
        for (g, &e) in &resid {
            if tail_x.is_some_and(|t| g.ord() >= t) {
                continue;
            }
            if tail_inv.is_some_and(|t| -g.ord() >= t) {
                xpow += e;
                m = m.mul(&g.neg().pow(e));
                continue;
            }
            return Agreement {
                equal: false,
                window: 0,
                detail: Some(format!("unmatched factor (1 - x*{g})^{e}")),
            };
        }
        if xpow != 0 {
            return Agreement { equal: false, window: 0, detail: Some(format!("x-power differs by {xpow}")) };
        }
        let lhs = self.unit.mul_monomial(&m.c, m.a2, m.b);
        let (equal, window) = lhs.compare(&o.unit);
        Agreement {
            equal,
            window,
            detail: (!equal).then(|| format!("units differ: {} vs {}", lhs, o.unit)),
        }
    }

    pub fn agrees_with(&self, o: &ProductForm) -> bool {
        self.compare(o).equal
    }
}

impl fmt::Display for ProductForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.xpow != 0 {
            write!(f, "x^{} * ", self.xpow)?;
        }
        write!(f, "[{}]", self.unit)?;
        for (g, &e) in &self.factors {
            if g.is_one() {
                write!(f, " * (1 - x)")?;
            } else {
                write!(f, " * (1 - x*{g})")?;
            }
            if e != 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ProductForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} (tails x:{:?} 1/x:{:?})", self.tail_x, self.tail_inv)
    }
}
