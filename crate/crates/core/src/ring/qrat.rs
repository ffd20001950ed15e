//! Reduced rational functions in `q` over the rationals.

use std::fmt;

use super::qpoly::QPoly;
use super::rat::Rat;

/// `num / den` with `den` an ordinary polynomial whose constant term is 1
/// and `gcd(num, den) = 1`. Powers of `q` live in the numerator's offset,
/// so `den(0) != 0` always holds.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct QRat {
    num: QPoly,
    den: QPoly,
}

impl QRat {
    pub fn zero() -> Self {
        QRat { num: QPoly::zero(), den: QPoly::one() }
    }

    pub fn one() -> Self {
        QRat::from_poly(QPoly::one())
    }

    pub fn from_poly(num: QPoly) -> Self {
        QRat { num, den: QPoly::one() }
    }

    pub fn constant(r: Rat) -> Self {
        QRat::from_poly(QPoly::constant(r))
    }

    pub fn monomial(c: Rat, b: i32) -> Self {
        QRat::from_poly(QPoly::monomial(c, b))
    }

    pub fn new(num: QPoly, den: QPoly) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        if num.is_zero() {
            return QRat::zero();
        }
        // move q^k out of the denominator
        let k = den.low();
        let mut num = num.shift(-k);
        let mut den = den.shift(-k);
        if den.coeffs().len() == 1 {
            let c = den.coeffs()[0].recip();
            return QRat::from_poly(num.scale(&c));
        }
        let nlow = num.low();
        let core = num.shift(-nlow);
        let g = QPoly::gcd(&core, &den);
        if g.high() > 0 {
            num = core.div_rem(&g).0.shift(nlow);
            den = den.div_rem(&g).0;
        }
        let c0 = den.coeff(0).recip();
        let num = num.scale(&c0);
        let den = den.scale(&c0);
        if den.is_one() {
            QRat::from_poly(num)
        } else {
            QRat { num, den }
        }
    }

    pub fn num(&self) -> &QPoly {
        &self.num
    }

    pub fn den(&self) -> &QPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    pub fn add(&self, o: &QRat) -> QRat {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.is_poly() && o.is_poly() {
            return QRat::from_poly(self.num.add(&o.num));
        }
        if self.den == o.den {
            return QRat::new(self.num.add(&o.num), self.den.clone());
        }
        QRat::new(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den))
    }

    pub fn neg(&self) -> QRat {
        QRat { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &QRat) -> QRat {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &QRat) -> QRat {
        if self.is_zero() || o.is_zero() {
            return QRat::zero();
        }
        if self.is_poly() && o.is_poly() {
            return QRat::from_poly(self.num.mul(&o.num));
        }
        QRat::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    /// Multiply by `c · q^b`; no reduction is needed.
    pub fn mul_monomial(&self, c: &Rat, b: i32) -> QRat {
        if self.is_zero() || c.is_zero() {
            return QRat::zero();
        }
        QRat { num: self.num.scale(c).shift(b), den: self.den.clone() }
    }

    pub fn scale(&self, c: &Rat) -> QRat {
        self.mul_monomial(c, 0)
    }

    pub fn inv(&self) -> QRat {
        assert!(!self.is_zero(), "inverse of zero rational function");
        QRat::new(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, e: i32) -> QRat {
        let base = if e < 0 { self.inv() } else { self.clone() };
        let mut acc = QRat::one();
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    /// Value at `q = 1`, or `None` when the denominator vanishes there.
    pub fn eval_one(&self) -> Option<Rat> {
        let d = self.den.eval_one();
        if d.is_zero() {
            None
        } else {
            Some(&self.num.eval_one() / &d)
        }
    }
}

impl fmt::Display for QRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_poly() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for QRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
