use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::poly::{owned_ops, q, Monomial, Poly, Q};
use super::symbol::Var;

/// Quotient of polynomials.
///
/// The denominator is kept integral, primitive and with a positive leading
/// coefficient; it is `1` whenever the value is a polynomial that the cheap
/// reductions (monomial cancellation, exact division) can detect. No
/// multivariate gcd is attempted, so equality goes through cross
/// multiplication.
#[derive(Clone, Debug)]
pub struct RatFn {
    num: Poly,
    den: Poly,
}

impl RatFn {
    pub fn zero() -> Self {
        RatFn { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        RatFn::int(1)
    }

    pub fn int(n: i64) -> Self {
        RatFn { num: Poly::int(n), den: Poly::one() }
    }

    pub fn constant(c: Q) -> Self {
        RatFn { num: Poly::constant(c), den: Poly::one() }
    }

    pub fn var(v: Var) -> Self {
        RatFn { num: Poly::var(v), den: Poly::one() }
    }

    pub fn named(name: &str) -> Self {
        RatFn::var(Var::new(name))
    }

    pub fn poly(p: Poly) -> Self {
        RatFn { num: p, den: Poly::one() }
    }

    /// `num / den`; `None` when `den` is zero.
    pub fn frac(num: Poly, den: Poly) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        Some(RatFn::normalize(num, den))
    }

    fn normalize(mut num: Poly, mut den: Poly) -> Self {
        if num.is_zero() {
            return RatFn::zero();
        }
        if let Some(c) = den.as_constant() {
            return RatFn { num: num.scale(&(Q::one() / c)), den: Poly::one() };
        }
        let g = num.monomial_gcd().gcd(&den.monomial_gcd());
        if !g.is_one() {
            num = num.div_monomial(&g);
            den = den.div_monomial(&g);
        }
        if let Some(quot) = num.div_exact(&den) {
            return RatFn { num: quot, den: Poly::one() };
        }
        if num.as_constant().is_none() {
            if let Some(quot) = den.div_exact(&num) {
                num = Poly::one();
                den = quot;
                if let Some(c) = den.as_constant() {
                    return RatFn { num: Poly::constant(Q::one() / c), den: Poly::one() };
                }
            }
        }
        let mut c = den.content();
        if den.is_negative_lead() {
            c = -c;
        }
        let inv = Q::one() / c;
        RatFn { num: num.scale(&inv), den: den.scale(&inv) }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        self.is_poly().then_some(&self.num)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.is_poly() && self.num.is_one()
    }

    pub fn as_constant(&self) -> Option<Q> {
        if self.is_poly() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn scale(&self, c: &Q) -> RatFn {
        if c.is_zero() {
            return RatFn::zero();
        }
        RatFn { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn scale_int(&self, n: i64) -> RatFn {
        self.scale(&q(n))
    }

    pub fn inv(&self) -> Option<RatFn> {
        RatFn::frac(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, e: u32) -> RatFn {
        if self.is_poly() {
            return RatFn::poly(self.num.pow(e));
        }
        RatFn::normalize(self.num.pow(e), self.den.pow(e))
    }

    pub fn partial(&self, v: Var) -> RatFn {
        if self.is_poly() {
            return RatFn::poly(self.num.partial(v));
        }
        let top = &(&self.num.partial(v) * &self.den) - &(&self.num * &self.den.partial(v));
        RatFn::normalize(top, &self.den * &self.den)
    }

    pub fn subst(&self, map: &HashMap<Var, Poly>) -> RatFn {
        let num = self.num.subst(map);
        if self.is_poly() {
            return RatFn::poly(num);
        }
        let den = self.den.subst(map);
        assert!(!den.is_zero(), "substitution makes a denominator vanish");
        RatFn::normalize(num, den)
    }

    pub fn rename(&self, map: &HashMap<Var, Var>) -> RatFn {
        RatFn { num: self.num.rename(map), den: self.den.rename(map) }
    }

    pub fn variables(&self) -> Vec<Var> {
        let mut vs = self.num.variables();
        vs.extend(self.den.variables());
        vs.sort();
        vs.dedup();
        vs
    }

    pub fn contains_any(&self, pred: impl Fn(Var) -> bool + Copy) -> bool {
        self.num.contains_any(pred) || self.den.contains_any(pred)
    }
}

impl Default for RatFn {
    fn default() -> Self {
        RatFn::zero()
    }
}

impl From<Poly> for RatFn {
    fn from(p: Poly) -> Self {
        RatFn::poly(p)
    }
}

impl From<i64> for RatFn {
    fn from(n: i64) -> Self {
        RatFn::int(n)
    }
}

impl PartialEq for RatFn {
    fn eq(&self, other: &Self) -> bool {
        if self.den == other.den {
            return self.num == other.num;
        }
        &self.num * &other.den == &other.num * &self.den
    }
}

impl Eq for RatFn {}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_poly() {
            return write!(f, "{}", self.num);
        }
        write!(f, "({})/({})", self.num, self.den)
    }
}

impl Add for &RatFn {
    type Output = RatFn;
    fn add(self, rhs: &RatFn) -> RatFn {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        if self.den == rhs.den {
            if self.is_poly() {
                return RatFn::poly(&self.num + &rhs.num);
            }
            return RatFn::normalize(&self.num + &rhs.num, self.den.clone());
        }
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        RatFn::normalize(num, &self.den * &rhs.den)
    }
}

impl Sub for &RatFn {
    type Output = RatFn;
    fn sub(self, rhs: &RatFn) -> RatFn {
        self + &(-rhs)
    }
}

impl Mul for &RatFn {
    type Output = RatFn;
    fn mul(self, rhs: &RatFn) -> RatFn {
        if self.is_zero() || rhs.is_zero() {
            return RatFn::zero();
        }
        if self.is_poly() && rhs.is_poly() {
            return RatFn::poly(&self.num * &rhs.num);
        }
        RatFn::normalize(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Div for &RatFn {
    type Output = RatFn;
    /// Panics on division by zero; use [`RatFn::inv`] for a checked inverse.
    fn div(self, rhs: &RatFn) -> RatFn {
        assert!(!rhs.is_zero(), "division by zero");
        RatFn::normalize(&self.num * &rhs.den, &self.den * &rhs.num)
    }
}

impl Neg for &RatFn {
    type Output = RatFn;
    fn neg(self) -> RatFn {
        RatFn { num: -&self.num, den: self.den.clone() }
    }
}

owned_ops!(RatFn);

impl Div for RatFn {
    type Output = RatFn;
    fn div(self, rhs: RatFn) -> RatFn {
        &self / &rhs
    }
}

impl std::iter::Sum for RatFn {
    fn sum<I: Iterator<Item = RatFn>>(iter: I) -> RatFn {
        iter.fold(RatFn::zero(), |a, b| &a + &b)
    }
}

/// Leading sign of the numerator, used to orient witnesses in reports.
pub fn lead_is_negative(f: &RatFn) -> bool {
    f.num().leading().is_some_and(|(_, c)| c.is_negative())
}

pub fn monomial_fn(c: Q, m: Monomial) -> RatFn {
    RatFn::poly(Poly::term(c, m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reciprocal_times_variable_is_one() {
        let x = RatFn::named("rf_x");
        let r = &x.inv().unwrap() * &x;
        assert!(r.is_one());
        assert!(r.num().is_one() && r.den().is_one());
    }

    #[test]
    fn quotient_rule() {
        let x = Var::new("rf_qx");
        let y = RatFn::named("rf_qy");
        let f = &y / &RatFn::var(x);
        let expect = -&(&y / &RatFn::var(x).pow(2));
        assert_eq!(f.partial(x), expect);
    }

    #[test]
    fn denominator_normalized() {
        let x = RatFn::named("rf_nx");
        let f = &RatFn::one() / &(&x.scale_int(-6) + &RatFn::int(4));
        assert!(!lead_is_negative(&RatFn::poly(f.den().clone())));
        assert_eq!(f.den().content(), Q::one());
        assert_eq!(&f * &(&x.scale_int(-6) + &RatFn::int(4)), RatFn::one());
    }
}
