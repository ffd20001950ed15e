//! Laurent polynomials in `q` with exact rational coefficients.

use std::fmt;

use super::rat::Rat;

/// `Σ c[i] q^(low + i)`. Normalized: no leading or trailing zero
/// coefficients; the zero polynomial has `c` empty and `low == 0`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct QPoly {
    low: i32,
    c: Vec<Rat>,
}

impl QPoly {
    pub fn zero() -> Self {
        QPoly::default()
    }

    pub fn constant(r: Rat) -> Self {
        QPoly::from_parts(0, vec![r])
    }

    pub fn one() -> Self {
        QPoly::constant(Rat::one())
    }

    /// `c · q^b`
    pub fn monomial(c: Rat, b: i32) -> Self {
        QPoly::from_parts(b, vec![c])
    }

    pub fn from_parts(low: i32, c: Vec<Rat>) -> Self {
        let mut p = QPoly { low, c };
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        while self.c.last().is_some_and(Rat::is_zero) {
            self.c.pop();
        }
        let lead = self.c.iter().take_while(|r| r.is_zero()).count();
        if lead > 0 {
            self.c.drain(..lead);
            self.low += lead as i32;
        }
        if self.c.is_empty() {
            self.low = 0;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.low == 0 && self.c.len() == 1 && self.c[0].is_one()
    }

    /// Lowest exponent present (0 for the zero polynomial).
    pub fn low(&self) -> i32 {
        self.low
    }

    /// Highest exponent present.
    pub fn high(&self) -> i32 {
        self.low + self.c.len() as i32 - 1
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.c
    }

    pub fn coeff(&self, e: i32) -> Rat {
        let i = e - self.low;
        if i < 0 || i as usize >= self.c.len() {
            Rat::zero()
        } else {
            self.c[i as usize].clone()
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &Rat)> + '_ {
        self.c
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.is_zero())
            .map(move |(i, r)| (self.low + i as i32, r))
    }

    /// Multiply by `q^k`.
    pub fn shift(&self, k: i32) -> QPoly {
        if self.is_zero() {
            return self.clone();
        }
        QPoly { low: self.low + k, c: self.c.clone() }
    }

    pub fn scale(&self, r: &Rat) -> QPoly {
        if r.is_zero() {
            return QPoly::zero();
        }
        QPoly { low: self.low, c: self.c.iter().map(|x| x * r).collect() }
    }

    pub fn add(&self, o: &QPoly) -> QPoly {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let low = self.low.min(o.low);
        let high = self.high().max(o.high());
        let mut c = vec![Rat::zero(); (high - low + 1) as usize];
        for (i, r) in self.c.iter().enumerate() {
            c[(self.low - low) as usize + i] = r.clone();
        }
        for (i, r) in o.c.iter().enumerate() {
            let k = (o.low - low) as usize + i;
            c[k] = &c[k] + r;
        }
        QPoly::from_parts(low, c)
    }

    pub fn neg(&self) -> QPoly {
        QPoly { low: self.low, c: self.c.iter().map(|r| -r).collect() }
    }

    pub fn sub(&self, o: &QPoly) -> QPoly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &QPoly) -> QPoly {
        if self.is_zero() || o.is_zero() {
            return QPoly::zero();
        }
        if o.c.len() == 1 {
            return QPoly::from_parts(self.low + o.low, self.c.iter().map(|x| x * &o.c[0]).collect());
        }
        if self.c.len() == 1 {
            return o.mul(self);
        }
        let mut c = vec![Rat::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                c[i + j] = &c[i + j] + &(a * b);
            }
        }
        QPoly::from_parts(self.low + o.low, c)
    }

    pub fn pow(&self, k: u32) -> QPoly {
        let mut acc = QPoly::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Value at `q = 1`.
    pub fn eval_one(&self) -> Rat {
        self.c.iter().fold(Rat::zero(), |acc, r| &acc + r)
    }

    pub fn lead(&self) -> Option<&Rat> {
        self.c.last()
    }

    /// Polynomial division for ordinary polynomials (`low >= 0`).
    pub fn div_rem(&self, d: &QPoly) -> (QPoly, QPoly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        debug_assert!(self.low >= 0 && d.low >= 0);
        let mut rem = self.dense();
        let dd = d.dense();
        let dl = dd.len();
        if rem.len() < dl {
            return (QPoly::zero(), self.clone());
        }
        let inv = dd[dl - 1].recip();
        let mut quo = vec![Rat::zero(); rem.len() - dl + 1];
        for k in (0..quo.len()).rev() {
            let t = &rem[k + dl - 1] * &inv;
            if t.is_zero() {
                continue;
            }
            for (j, dj) in dd.iter().enumerate() {
                rem[k + j] = &rem[k + j] - &(&t * dj);
            }
            quo[k] = t;
        }
        rem.truncate(dl - 1);
        (QPoly::from_parts(0, quo), QPoly::from_parts(0, rem))
    }

    fn dense(&self) -> Vec<Rat> {
        let mut v = vec![Rat::zero(); self.low.max(0) as usize];
        v.extend(self.c.iter().cloned());
        v
    }

    pub fn monic(&self) -> QPoly {
        match self.lead() {
            Some(l) => self.scale(&l.recip()),
            None => self.clone(),
        }
    }

    /// Monic gcd of two ordinary polynomials.
    pub fn gcd(a: &QPoly, b: &QPoly) -> QPoly {
        let mut x = a.clone();
        let mut y = b.clone();
        while !y.is_zero() {
            let (_, r) = x.div_rem(&y);
            x = y;
            y = r;
        }
        x.monic()
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, r) in self.terms() {
            let neg = r.is_negative();
            let mag = if neg { -r } else { r.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            match (e, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (_, true) => {}
                _ => write!(f, "{mag}*")?,
            }
            match e {
                0 => {}
                1 => write!(f, "q")?,
                _ => write!(f, "q^{e}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
