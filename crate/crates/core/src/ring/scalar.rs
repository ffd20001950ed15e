//! Truncated Laurent series in `s = p^(1/2)` with `QRat` coefficients.
//!
//! A `Scalar` stores the coefficients of `s^lower … s^(prec-1)` and is
//! exact on that window. `prec == EXACT` marks a value with no truncation.

use std::fmt;

use super::qpoly::QPoly;
use super::qrat::QRat;
use super::rat::Rat;
use crate::error::{Error, Result};

/// Precision sentinel for exact (untruncated) scalars.
pub const EXACT: i32 = 1 << 28;

fn clamp(prec: i32) -> i32 {
    if prec >= EXACT / 2 {
        EXACT
    } else {
        prec
    }
}

fn lcm(a: i128, b: i128) -> Option<i128> {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    (a / x).checked_mul(b)
}

/// Polynomial coefficients over a common integer denominator, so that
/// products need one reduction per output coefficient.
struct IntForm {
    den: i128,
    /// `(lowest q power, numerators)` per s-order.
    rows: Vec<(i32, Vec<i128>)>,
    qlow: i32,
    qhigh: i32,
    /// Largest numerator magnitude.
    max: u128,
}

impl IntForm {
    fn new(coeffs: &[QRat]) -> Option<IntForm> {
        let mut den: i128 = 1;
        for c in coeffs {
            if !c.is_poly() {
                return None;
            }
            for r in c.num().coeffs() {
                let (_, d) = r.small_parts()?;
                if den % d as i128 != 0 {
                    den = lcm(den, d as i128)?;
                }
            }
        }
        let (mut qlow, mut qhigh) = (i32::MAX, i32::MIN);
        let mut rows = Vec::with_capacity(coeffs.len());
        let mut max = 0u128;
        for c in coeffs {
            let p = c.num();
            if !p.is_zero() {
                qlow = qlow.min(p.low());
                qhigh = qhigh.max(p.high());
            }
            let mut row = Vec::with_capacity(p.coeffs().len());
            for r in p.coeffs() {
                let (n, d) = r.small_parts()?;
                let v = (n as i128).checked_mul(den / d as i128)?;
                max = max.max(v.unsigned_abs());
                row.push(v);
            }
            rows.push((p.low(), row));
        }
        Some(IntForm { den, rows, qlow, qhigh, max })
    }

    fn mul(&self, o: &IntForm, len: usize) -> Option<Vec<QRat>> {
        let den = self.den.checked_mul(o.den)?;
        let base = self.qlow.checked_add(o.qlow)?;
        let width = (self.qhigh - self.qlow + o.qhigh - o.qlow + 1).max(0) as usize;
        let mut acc = vec![0i128; width];
        let mut out = Vec::with_capacity(len);
        // every accumulated entry is a sum of at most `terms` products
        let terms = (self.rows.len().min(o.rows.len()) * (self.qhigh - self.qlow + 1).max(1) as usize) as u128;
        let safe = self.max.checked_mul(o.max).and_then(|m| m.checked_mul(terms)).is_some_and(|b| b < (1u128 << 126));
        for k in 0..len {
            acc.iter_mut().for_each(|x| *x = 0);
            let mut any = false;
            for i in k.saturating_sub(o.rows.len() - 1)..=k.min(self.rows.len() - 1) {
                let (la, ra) = &self.rows[i];
                let (lb, rb) = &o.rows[k - i];
                if ra.is_empty() || rb.is_empty() {
                    continue;
                }
                any = true;
                let off = (la + lb - base) as usize;
                for (x, &a) in ra.iter().enumerate() {
                    if a == 0 {
                        continue;
                    }
                    let dst = &mut acc[off + x..off + x + rb.len()];
                    if safe {
                        for (t, &b) in dst.iter_mut().zip(rb) {
                            *t += a * b;
                        }
                    } else {
                        for (t, &b) in dst.iter_mut().zip(rb) {
                            *t = t.checked_add(a.checked_mul(b)?)?;
                        }
                    }
                }
            }
            if !any {
                out.push(QRat::zero());
                continue;
            }
            let c: Vec<Rat> = acc.iter().map(|&n| Rat::from_i128(n, den)).collect();
            out.push(QRat::from_poly(QPoly::from_parts(base, c)));
        }
        Some(out)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    lower: i32,
    coeffs: Vec<QRat>,
    prec: i32,
}

impl Scalar {
    pub fn from_parts(lower: i32, coeffs: Vec<QRat>, prec: i32) -> Self {
        let mut s = Scalar { lower, coeffs, prec: clamp(prec) };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        let keep = (self.prec as i64 - self.lower as i64).clamp(0, self.coeffs.len() as i64) as usize;
        self.coeffs.truncate(keep);
        while self.coeffs.last().is_some_and(QRat::is_zero) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.lower += lead as i32;
        }
        if self.coeffs.is_empty() {
            self.lower = self.prec;
        }
    }

    pub fn zero(prec: i32) -> Self {
        Scalar { lower: clamp(prec), coeffs: Vec::new(), prec: clamp(prec) }
    }

    pub fn exact_zero() -> Self {
        Scalar::zero(EXACT)
    }

    pub fn one() -> Self {
        Scalar::from_qrat(QRat::one())
    }

    pub fn from_qrat(q: QRat) -> Self {
        Scalar::from_parts(0, vec![q], EXACT)
    }

    pub fn from_rat(r: Rat) -> Self {
        Scalar::from_qrat(QRat::constant(r))
    }

    pub fn int(n: i64) -> Self {
        Scalar::from_rat(Rat::int(n))
    }

    /// Exact `c · s^a2 · q^b`.
    pub fn monomial(c: Rat, a2: i32, b: i32) -> Self {
        Scalar::from_parts(a2, vec![QRat::monomial(c, b)], EXACT)
    }

    /// `s^a2 · poly(q)` exactly.
    pub fn from_qpoly_at(a2: i32, p: QPoly) -> Self {
        Scalar::from_parts(a2, vec![QRat::from_poly(p)], EXACT)
    }

    pub fn lower(&self) -> i32 {
        self.lower
    }

    pub fn prec(&self) -> i32 {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec >= EXACT
    }

    /// `s`-adic valuation; equals `prec` for a zero scalar.
    pub fn valuation(&self) -> i32 {
        self.lower
    }

    pub fn coeffs(&self) -> &[QRat] {
        &self.coeffs
    }

    /// Coefficient of `s^k`; zero outside the stored range.
    pub fn coeff(&self, k: i32) -> QRat {
        let i = k - self.lower;
        if i < 0 || i as usize >= self.coeffs.len() {
            QRat::zero()
        } else {
            self.coeffs[i as usize].clone()
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &QRat)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.lower + i as i32, c))
    }

    /// True when every coefficient below `prec` vanishes.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.is_exact() && self.lower == 0 && self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Single stored coefficient (`c(q) s^k`), the shape that inverts exactly.
    pub fn is_single_term(&self) -> bool {
        self.coeffs.len() == 1
    }

    pub fn truncate(&self, prec: i32) -> Scalar {
        if prec >= self.prec {
            return self.clone();
        }
        Scalar::from_parts(self.lower, self.coeffs.clone(), prec)
    }

    /// Replace the declared window; only valid when the caller knows the
    /// tail beyond `prec` is genuinely unknown (it can only shrink).
    pub fn with_prec(&self, prec: i32) -> Scalar {
        self.truncate(prec)
    }

    pub fn neg(&self) -> Scalar {
        Scalar { lower: self.lower, coeffs: self.coeffs.iter().map(QRat::neg).collect(), prec: self.prec }
    }

    pub fn add(&self, o: &Scalar) -> Scalar {
        let prec = self.prec.min(o.prec);
        if o.is_zero() {
            return self.truncate(prec);
        }
        if self.is_zero() {
            return o.truncate(prec);
        }
        let lower = self.lower.min(o.lower);
        let top = (self.lower + self.coeffs.len() as i32)
            .max(o.lower + o.coeffs.len() as i32)
            .min(prec);
        if top <= lower {
            return Scalar::zero(prec);
        }
        let mut c = vec![QRat::zero(); (top - lower) as usize];
        for (k, q) in self.terms() {
            if k < top {
                c[(k - lower) as usize] = q.clone();
            }
        }
        for (k, q) in o.terms() {
            if k < top {
                let i = (k - lower) as usize;
                c[i] = c[i].add(q);
            }
        }
        Scalar::from_parts(lower, c, prec)
    }

    pub fn sub(&self, o: &Scalar) -> Scalar {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Scalar) -> Scalar {
        let prec = clamp(
            (self.prec as i64 + o.valuation() as i64)
                .min(o.prec as i64 + self.valuation() as i64)
                .min(EXACT as i64) as i32,
        );
        if self.is_zero() || o.is_zero() {
            return Scalar::zero(prec);
        }
        if o.coeffs.len() == 1 {
            return self.mul_qrat_shift(&o.coeffs[0], o.lower, prec);
        }
        if self.coeffs.len() == 1 {
            return o.mul_qrat_shift(&self.coeffs[0], self.lower, prec);
        }
        let lower = self.lower + o.lower;
        let len = ((prec as i64 - lower as i64).max(0) as usize).min(self.coeffs.len() + o.coeffs.len() - 1);
        if let Some(c) = IntForm::new(&self.coeffs).zip(IntForm::new(&o.coeffs)).and_then(|(a, b)| a.mul(&b, len)) {
            return Scalar::from_parts(lower, c, prec);
        }
        let mut c = vec![QRat::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i >= len {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                if b.is_zero() {
                    continue;
                }
                c[i + j] = c[i + j].add(&a.mul(b));
            }
        }
        Scalar::from_parts(lower, c, prec)
    }

    fn mul_qrat_shift(&self, q: &QRat, shift: i32, prec: i32) -> Scalar {
        let c = if q.is_poly() && q.num().coeffs().len() == 1 {
            let b = q.num().low();
            let r = &q.num().coeffs()[0];
            self.coeffs.iter().map(|x| x.mul_monomial(r, b)).collect()
        } else {
            self.coeffs.iter().map(|x| x.mul(q)).collect()
        };
        Scalar::from_parts(self.lower + shift, c, prec)
    }

    /// Multiply by the exact monomial `c · s^a2 · q^b`.
    pub fn mul_monomial(&self, c: &Rat, a2: i32, b: i32) -> Scalar {
        let prec = clamp(self.prec.saturating_add(a2).min(EXACT));
        Scalar::from_parts(self.lower + a2, self.coeffs.iter().map(|x| x.mul_monomial(c, b)).collect(), prec)
    }

    pub fn scale(&self, r: &Rat) -> Scalar {
        self.mul_monomial(r, 0, 0)
    }

    /// Multiplicative inverse keeping the relative window of `self`.
    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::InversionOfZero);
        }
        if self.is_exact() {
            if self.coeffs.len() == 1 {
                return Ok(Scalar::from_parts(-self.lower, vec![self.coeffs[0].inv()], EXACT));
            }
            return Err(Error::UnboundedInverse);
        }
        self.inv_to(self.prec - self.lower)
    }

    /// Inverse computed on a relative window of `window` s-orders.
    pub fn inv_to(&self, window: i32) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::InversionOfZero);
        }
        let window = window.min(self.prec.saturating_sub(self.lower));
        if self.coeffs.len() == 1 && self.is_exact() {
            return Ok(Scalar::from_parts(-self.lower, vec![self.coeffs[0].inv()], EXACT));
        }
        let n = window.max(0) as usize;
        let a0inv = self.coeffs[0].inv();
        let mut b: Vec<QRat> = Vec::with_capacity(n);
        for k in 0..n {
            if k == 0 {
                b.push(a0inv.clone());
                continue;
            }
            let mut acc = QRat::zero();
            for i in 1..=k.min(self.coeffs.len() - 1) {
                let ai = &self.coeffs[i];
                if ai.is_zero() || b[k - i].is_zero() {
                    continue;
                }
                acc = acc.add(&ai.mul(&b[k - i]));
            }
            b.push(acc.mul(&a0inv).neg());
        }
        Ok(Scalar::from_parts(-self.lower, b, -self.lower + window))
    }

    pub fn div(&self, o: &Scalar) -> Result<Scalar> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, e: i32) -> Result<Scalar> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Scalar::one();
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// Compare on the shared window. Returns `(equal, window)` where
    /// `window` is the first s-order at which agreement is no longer known.
    pub fn compare(&self, o: &Scalar) -> (bool, i32) {
        let d = self.sub(o);
        (d.is_zero(), d.prec)
    }

    /// Specialize `q`. For `q := p` each coefficient is re-expanded in `s`
    /// by long division; the unknown tail is assumed to carry no lower
    /// power of `q` than the stored terms, so the window shrinks by twice the
    /// most negative `q`-exponent. `window` bounds the result for exact
    /// inputs.
    pub fn substitute_q(&self, target: QTarget, window: i32) -> Result<Scalar> {
        match target {
            QTarget::One => {
                let mut c = Vec::with_capacity(self.coeffs.len());
                for q in &self.coeffs {
                    match q.eval_one() {
                        Some(v) => c.push(QRat::constant(v)),
                        None => {
                            return Err(Error::PoleAtSubstitution {
                                target: target.to_string(),
                                coefficient: q.to_string(),
                            })
                        }
                    }
                }
                Ok(Scalar::from_parts(self.lower, c, self.prec))
            }
            QTarget::P => {
                let minq = self
                    .coeffs
                    .iter()
                    .filter(|c| !c.is_zero())
                    .map(|c| c.num().low())
                    .min()
                    .unwrap_or(0)
                    .min(0);
                let prec = if self.is_exact() { window } else { (self.prec + 2 * minq).min(window) };
                let mut acc = Scalar::zero(prec);
                for (k, c) in self.terms() {
                    let num = poly_at_p(c.num(), k, prec);
                    if c.is_poly() {
                        acc = acc.add(&num);
                        continue;
                    }
                    let den = poly_at_p(c.den(), 0, prec - num.valuation());
                    acc = acc.add(&num.mul(&den.inv()?));
                }
                Ok(acc.truncate(prec))
            }
        }
    }

    /// Sum of stored terms as text, e.g. `(1 - q)*s^0 + …`.
    pub fn render(&self) -> String {
        format!("{self}")
    }
}

/// Specialization targets for `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QTarget {
    /// `q := 1`
    One,
    /// `q := p`
    P,
}

impl fmt::Display for QTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QTarget::One => write!(f, "q:=1"),
            QTarget::P => write!(f, "q:=p"),
        }
    }
}

/// `s^shift · poly(q = s^2)` truncated at s-order `prec`.
fn poly_at_p(p: &QPoly, shift: i32, prec: i32) -> Scalar {
    let mut acc = Scalar::zero(prec);
    for (e, r) in p.terms() {
        acc = acc.add(&Scalar::monomial(r.clone(), shift + 2 * e, 0));
    }
    acc.truncate(prec)
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                _ => write!(f, "({c})*s^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        if !self.is_exact() {
            write!(f, " + O(s^{})", self.prec)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qp(low: i32, c: &[i64]) -> QPoly {
        QPoly::from_parts(low, c.iter().map(|&x| Rat::int(x)).collect())
    }

    #[test]
    fn geometric_inverse() {
        // (1 + s^2)^-1 = 1 - s^2 + s^4 - ...
        let a = Scalar::one().add(&Scalar::monomial(Rat::one(), 2, 0)).truncate(10);
        let b = a.inv().unwrap();
        assert_eq!(b.prec(), 10);
        for k in 0..10 {
            let expect = match k % 4 {
                0 => QRat::one(),
                2 => QRat::constant(Rat::int(-1)),
                _ => QRat::zero(),
            };
            assert_eq!(b.coeff(k), expect, "s^{k}");
        }
    }

    #[test]
    fn exact_cancellation_of_q_factors() {
        let one_minus_q = QRat::from_poly(qp(0, &[1, -1]));
        let a = Scalar::from_parts(-1, vec![one_minus_q.clone()], EXACT);
        let b = Scalar::from_parts(1, vec![one_minus_q.inv()], EXACT);
        assert!(a.mul(&b).is_one());
    }

    #[test]
    fn invert_one_minus_s2q_matches_long_division() {
        let a = Scalar::one().sub(&Scalar::monomial(Rat::one(), 2, 1)).truncate(12);
        let b = a.inv().unwrap();
        // long division oracle: 1/(1 - t) with t = s^2 q gives t^k
        for k in 0..6 {
            assert_eq!(b.coeff(2 * k), QRat::monomial(Rat::one(), k));
            assert!(b.coeff(2 * k + 1).is_zero());
        }
    }

    #[test]
    fn precision_rules() {
        let a = Scalar::monomial(Rat::one(), -4, 0);
        let b = Scalar::one().add(&Scalar::monomial(Rat::one(), 2, 1)).truncate(10);
        assert_eq!(a.mul(&b).prec(), 6);
        assert_eq!(a.add(&b).prec(), 10);
        let z = Scalar::zero(8);
        assert_eq!(z.mul(&a).prec(), 4);
    }

    #[test]
    fn substitute_q_examples() {
        let one_minus_q = QRat::from_poly(qp(0, &[1, -1]));
        let a = Scalar::from_qrat(one_minus_q.mul(&one_minus_q.inv()));
        assert!(a.substitute_q(QTarget::One, 10).unwrap().is_one());

        let b = Scalar::from_qrat(QRat::from_poly(qp(-1, &[-1, 0, 1])));
        let r = b.substitute_q(QTarget::P, 10).unwrap();
        assert_eq!(r.coeff(2), QRat::one());
        assert_eq!(r.coeff(-2), QRat::constant(Rat::int(-1)));
        assert_eq!(r.prec(), 10);

        // (1+q)(1-p)/(1-pq) at q = p is exactly 1
        let g = Scalar::from_qrat(QRat::from_poly(qp(0, &[1, 1])))
            .mul(&Scalar::one().sub(&Scalar::monomial(Rat::one(), 2, 0)))
            .mul(&Scalar::one().sub(&Scalar::monomial(Rat::one(), 2, 1)).inv_to(12).unwrap());
        let r = g.substitute_q(QTarget::P, 12).unwrap();
        assert!(r.sub(&Scalar::one()).is_zero());
    }

    #[test]
    fn pole_at_q_one() {
        let pole = Scalar::from_qrat(QRat::new(qp(0, &[1]), qp(0, &[1, -1])));
        assert!(matches!(pole.substitute_q(QTarget::One, 4), Err(Error::PoleAtSubstitution { .. })));
    }

    #[test]
    fn unbounded_inverse_is_an_error() {
        let a = Scalar::one().add(&Scalar::monomial(Rat::one(), 2, 0));
        assert_eq!(a.inv(), Err(Error::UnboundedInverse));
        assert_eq!(Scalar::zero(4).inv(), Err(Error::InversionOfZero));
    }
}
