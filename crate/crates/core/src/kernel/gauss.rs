use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::poly::owned_ops;
use super::ratfn::RatFn;

/// `re + i·im` with a formal `i`, `i² = −1`. Coefficients stay exact.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Gauss {
    pub re: RatFn,
    pub im: RatFn,
}

impl Gauss {
    pub fn new(re: RatFn, im: RatFn) -> Self {
        Gauss { re, im }
    }

    pub fn real(re: RatFn) -> Self {
        Gauss { re, im: RatFn::zero() }
    }

    pub fn i() -> Self {
        Gauss { re: RatFn::zero(), im: RatFn::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Gauss { re: self.re.clone(), im: -&self.im }
    }
}

impl fmt::Display for Gauss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (true, true) => f.write_str("0"),
            (false, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "i*({})", self.im),
            (false, false) => write!(f, "{} + i*({})", self.re, self.im),
        }
    }
}

impl Add for &Gauss {
    type Output = Gauss;
    fn add(self, o: &Gauss) -> Gauss {
        Gauss { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl Sub for &Gauss {
    type Output = Gauss;
    fn sub(self, o: &Gauss) -> Gauss {
        Gauss { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl Mul for &Gauss {
    type Output = Gauss;
    fn mul(self, o: &Gauss) -> Gauss {
        Gauss {
            re: &(&self.re * &o.re) - &(&self.im * &o.im),
            im: &(&self.re * &o.im) + &(&self.im * &o.re),
        }
    }
}

impl Neg for &Gauss {
    type Output = Gauss;
    fn neg(self) -> Gauss {
        Gauss { re: -&self.re, im: -&self.im }
    }
}

owned_ops!(Gauss);
