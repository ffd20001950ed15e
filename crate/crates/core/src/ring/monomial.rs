//! Monomials `c · p^(a2/2) · q^b`.

use std::fmt;

use super::qrat::QRat;
use super::rat::Rat;
use super::scalar::Scalar;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub a2: i32,
    pub b: i32,
    pub c: Rat,
}

impl Monomial {
    pub fn new(c: Rat, a2: i32, b: i32) -> Self {
        assert!(!c.is_zero(), "monomial with zero coefficient");
        Monomial { a2, b, c }
    }

    /// Unit-coefficient `p^(a2/2) q^b`.
    pub fn pq(a2: i32, b: i32) -> Self {
        Monomial::new(Rat::one(), a2, b)
    }

    pub fn one() -> Self {
        Monomial::pq(0, 0)
    }

    pub fn p() -> Self {
        Monomial::pq(2, 0)
    }

    pub fn q() -> Self {
        Monomial::pq(0, 1)
    }

    pub fn is_one(&self) -> bool {
        self.a2 == 0 && self.b == 0 && self.c.is_one()
    }

    /// Order in `s`, i.e. twice the `p`-order.
    pub fn ord(&self) -> i32 {
        self.a2
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        Monomial { a2: self.a2 + o.a2, b: self.b + o.b, c: &self.c * &o.c }
    }

    pub fn inv(&self) -> Monomial {
        Monomial { a2: -self.a2, b: -self.b, c: self.c.recip() }
    }

    pub fn div(&self, o: &Monomial) -> Monomial {
        self.mul(&o.inv())
    }

    pub fn pow(&self, e: i32) -> Monomial {
        Monomial { a2: self.a2 * e, b: self.b * e, c: self.c.pow(e) }
    }

    pub fn neg(&self) -> Monomial {
        Monomial { a2: self.a2, b: self.b, c: -&self.c }
    }

    pub fn to_scalar(&self) -> Scalar {
        Scalar::monomial(self.c.clone(), self.a2, self.b)
    }

    pub fn to_qrat(&self) -> QRat {
        QRat::monomial(self.c.clone(), self.b)
    }

    /// Exponent pair `(2a, b)` identifying a pole line.
    pub fn exponents(&self) -> (i32, i32) {
        (self.a2, self.b)
    }
}

fn write_pow(f: &mut fmt::Formatter<'_>, var: &str, e2: i32, half: bool) -> fmt::Result {
    if half && e2 % 2 != 0 {
        return write!(f, "{var}^({e2}/2)");
    }
    let e = if half { e2 / 2 } else { e2 };
    match e {
        1 => write!(f, "{var}"),
        _ => write!(f, "{var}^{e}"),
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = 0;
        if !self.c.is_one() || (self.a2 == 0 && self.b == 0) {
            write!(f, "{}", self.c)?;
            parts += 1;
        }
        if self.a2 != 0 {
            if parts > 0 {
                write!(f, "*")?;
            }
            write_pow(f, "p", self.a2, true)?;
            parts += 1;
        }
        if self.b != 0 {
            if parts > 0 {
                write!(f, "*")?;
            }
            write_pow(f, "q", self.b, false)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_forms() {
        assert_eq!(Monomial::pq(2, -1).to_string(), "p*q^-1");
        assert_eq!(Monomial::pq(-1, 0).to_string(), "p^(-1/2)");
        assert_eq!(Monomial::new(Rat::int(-1), 0, 0).to_string(), "-1");
        assert_eq!(Monomial::pq(4, 2).to_string(), "p^2*q^2");
    }

    #[test]
    fn group_laws() {
        let a = Monomial::new(Rat::new(2, 3), 3, -2);
        assert!(a.mul(&a.inv()).is_one());
        assert_eq!(a.pow(3), a.mul(&a).mul(&a));
        assert_eq!(a.pow(-1), a.inv());
    }
}
