use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::symbol::Var;

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Power product with its total degree cached. Ordered graded-lex.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial {
    deg: u32,
    exps: Vec<(Var, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(v: Var) -> Self {
        Monomial { deg: 1, exps: vec![(v, 1)] }
    }

    pub fn from_exps(mut exps: Vec<(Var, u32)>) -> Self {
        exps.retain(|&(_, e)| e > 0);
        exps.sort_by_key(|&(v, _)| v);
        let mut merged: Vec<(Var, u32)> = Vec::with_capacity(exps.len());
        for (v, e) in exps {
            match merged.last_mut() {
                Some((w, f)) if *w == v => *f += e,
                _ => merged.push((v, e)),
            }
        }
        let deg = merged.iter().map(|&(_, e)| e).sum();
        Monomial { deg, exps: merged }
    }

    pub fn degree(&self) -> u32 {
        self.deg
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exps(&self) -> &[(Var, u32)] {
        &self.exps
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.exps
            .binary_search_by_key(&v, |&(w, _)| w)
            .map(|i| self.exps[i].1)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.exps, &other.exps);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial { deg: self.deg + other.deg, exps: out }
    }

    /// `self / other` when every exponent of `other` fits.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.exps.len());
        let mut j = 0;
        for &(v, e) in &self.exps {
            if j < other.exps.len() && other.exps[j].0 < v {
                return None;
            }
            if j < other.exps.len() && other.exps[j].0 == v {
                let f = other.exps[j].1;
                if f > e {
                    return None;
                }
                if e > f {
                    out.push((v, e - f));
                }
                j += 1;
            } else {
                out.push((v, e));
            }
        }
        if j < other.exps.len() {
            return None;
        }
        Some(Monomial { deg: self.deg - other.deg, exps: out })
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let exps = self
            .exps
            .iter()
            .filter_map(|&(v, e)| {
                let f = other.exponent(v);
                (f > 0).then(|| (v, e.min(f)))
            })
            .collect::<Vec<_>>();
        let deg = exps.iter().map(|&(_, e)| e).sum();
        Monomial { deg, exps }
    }

    /// Splits into the part over `keep` variables and the rest.
    pub fn split(&self, keep: impl Fn(Var) -> bool) -> (Monomial, Monomial) {
        let (a, b): (Vec<_>, Vec<_>) = self.exps.iter().partition(|&&(v, _)| keep(v));
        (Monomial::from_exps(a), Monomial::from_exps(b))
    }

    fn lex_cmp(&self, other: &Monomial) -> Ordering {
        let (a, b) = (&self.exps, &other.exps);
        let mut i = 0;
        loop {
            match (a.get(i), b.get(i)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&(va, ea)), Some(&(vb, eb))) => {
                    if va != vb {
                        // the earlier variable is the larger one
                        return vb.cmp(&va);
                    }
                    if ea != eb {
                        return ea.cmp(&eb);
                    }
                }
            }
            i += 1;
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.deg.cmp(&other.deg).then_with(|| self.lex_cmp(other))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exps.is_empty() {
            return f.write_str("1");
        }
        for (k, &(v, e)) in self.exps.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            if e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Sparse polynomial over the rationals; no zero coefficients are stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Q>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        Poly::term(c, Monomial::one())
    }

    pub fn int(n: i64) -> Self {
        Poly::constant(q(n))
    }

    pub fn var(v: Var) -> Self {
        Poly::term(Q::one(), Monomial::var(v))
    }

    pub fn term(c: Q, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Monomial, Q)>) -> Self {
        let mut p = Poly::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn leading(&self) -> Option<(&Monomial, &Q)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.leading().map(|(m, _)| m.degree())
    }

    pub fn variables(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = self.terms.keys().flat_map(|m| m.exps.iter().map(|&(v, _)| v)).collect();
        vs.sort();
        vs.dedup();
        vs
    }

    pub fn contains_any(&self, pred: impl Fn(Var) -> bool) -> bool {
        self.terms.keys().any(|m| m.exps.iter().any(|&(v, _)| pred(v)))
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(n, a)| (n.mul(m), a * c)).collect() }
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn partial(&self, v: Var) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e == 0 {
                continue;
            }
            let exps = m.exps.iter().map(|&(w, f)| if w == v { (w, f - 1) } else { (w, f) }).collect();
            out.add_term(Monomial::from_exps(exps), c * q(e as i64));
        }
        out
    }

    /// Simultaneous substitution of variables by polynomials.
    pub fn subst(&self, map: &HashMap<Var, Poly>) -> Poly {
        if map.is_empty() {
            return self.clone();
        }
        let mut powers: HashMap<(Var, u32), Poly> = HashMap::new();
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut kept = Vec::new();
            let mut factor = Poly::constant(c.clone());
            for &(v, e) in &m.exps {
                match map.get(&v) {
                    Some(p) => {
                        let pw = powers.entry((v, e)).or_insert_with(|| p.pow(e));
                        factor = &factor * pw;
                    }
                    None => kept.push((v, e)),
                }
            }
            if factor.is_zero() {
                continue;
            }
            let km = Monomial::from_exps(kept);
            for (n, a) in factor.terms {
                out.add_term(n.mul(&km), a);
            }
        }
        out
    }

    pub fn subst_one(&self, v: Var, p: &Poly) -> Poly {
        self.subst(&HashMap::from([(v, p.clone())]))
    }

    /// Renames variables; the map must be injective on the variables present.
    pub fn rename(&self, map: &HashMap<Var, Var>) -> Poly {
        Poly::from_terms(self.terms.iter().map(|(m, c)| {
            let exps = m.exps.iter().map(|&(v, e)| (*map.get(&v).unwrap_or(&v), e)).collect();
            (Monomial::from_exps(exps), c.clone())
        }))
    }

    /// Groups terms by their monomial over the variables selected by `keep`.
    pub fn split_by(&self, keep: impl Fn(Var) -> bool) -> BTreeMap<Monomial, Poly> {
        let mut out: BTreeMap<Monomial, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (k, rest) = m.split(&keep);
            out.entry(k).or_default().add_term(rest, c.clone());
        }
        out
    }

    pub fn degree_in(&self, pred: impl Fn(Var) -> bool) -> Vec<u32> {
        let mut ds: Vec<u32> = self
            .terms
            .keys()
            .map(|m| m.exps.iter().filter(|&&(v, _)| pred(v)).map(|&(_, e)| e).sum())
            .collect();
        ds.sort();
        ds.dedup();
        ds
    }

    /// Positive rational `c` with `self / c` integral and primitive.
    pub fn content(&self) -> Q {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            return Q::one();
        }
        Q::new(num, den)
    }

    pub fn monomial_gcd(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else { return Monomial::one() };
        it.fold(first.clone(), |g, m| g.gcd(m))
    }

    pub fn div_monomial(&self, m: &Monomial) -> Poly {
        Poly { terms: self.terms.iter().map(|(n, c)| (n.div(m).expect("monomial divides"), c.clone())).collect() }
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (dm, dc) = d.leading()?;
        let (dm, dc) = (dm.clone(), dc.clone());
        let mut r = self.clone();
        let mut quot = Poly::zero();
        while let Some((rm, rc)) = r.leading() {
            let t = rm.div(&dm)?;
            let c = rc / &dc;
            r = &r - &d.mul_monomial(&t, &c);
            quot.add_term(t, c);
        }
        Some(quot)
    }

    pub fn is_negative_lead(&self) -> bool {
        self.leading().is_some_and(|(_, c)| c.is_negative())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let a = c.abs();
            if m.is_one() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{a}*{m}")?;
            }
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let (big, small) = if self.terms.len() >= rhs.terms.len() { (self, rhs) } else { (rhs, self) };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m, a) in &self.terms {
            for (n, b) in &rhs.terms {
                out.add_term(m.mul(n), a * b);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

macro_rules! owned_ops {
    ($t:ty) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, rhs: $t) -> $t {
                &self + &rhs
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, rhs: $t) -> $t {
                &self - &rhs
            }
        }
        impl Mul for $t {
            type Output = $t;
            fn mul(self, rhs: $t) -> $t {
                &self * &rhs
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                -&self
            }
        }
    };
}
pub(crate) use owned_ops;

owned_ops!(Poly);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grlex_prefers_degree_then_earlier_variable() {
        let x = Var::new("grlex_a");
        let y = Var::new("grlex_b");
        let xy = Monomial::from_exps(vec![(x, 1), (y, 1)]);
        let x2 = Monomial::from_exps(vec![(x, 2)]);
        let y3 = Monomial::from_exps(vec![(y, 3)]);
        assert!(y3 > x2);
        assert!(x2 > xy);
        assert!(Monomial::var(x) > Monomial::var(y));
    }

    #[test]
    fn exact_division() {
        let x = Poly::var(Var::new("dv_x"));
        let y = Poly::var(Var::new("dv_y"));
        let a = &(&x + &y) * &(&x - &y);
        assert_eq!(a.div_exact(&(&x + &y)), Some(&x - &y));
        assert_eq!(a.div_exact(&(&x + &Poly::one())), None);
    }

    #[test]
    fn content_is_positive_and_primitive() {
        let x = Poly::var(Var::new("ct_x"));
        let p = &x.scale(&qr(-4, 3)) + &Poly::constant(qr(2, 9));
        let c = p.content();
        assert_eq!(c, qr(2, 9));
    }
}
