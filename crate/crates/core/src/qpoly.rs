//! Laurent polynomials in `q^{1/2}` with integer coefficients.
//!
//! Exponents are stored doubled, so the key `3` stands for `q^{3/2}`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QPoly {
    terms: BTreeMap<i32, i64>,
}

impl QPoly {
    pub fn zero() -> Self {
        QPoly::default()
    }

    pub fn one() -> Self {
        QPoly::constant(1)
    }

    pub fn constant(c: i64) -> Self {
        QPoly::monomial_half(c, 0)
    }

    /// `q`.
    pub fn q() -> Self {
        QPoly::monomial_half(1, 2)
    }

    /// `c * q^e`.
    pub fn monomial(c: i64, e: i32) -> Self {
        QPoly::monomial_half(c, 2 * e)
    }

    /// `c * q^{e2/2}`.
    pub fn monomial_half(c: i64, e2: i32) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(e2, c);
        }
        QPoly { terms }
    }

    /// Builds `sum c_i q^i` from integer-exponent pairs.
    pub fn from_terms(terms: impl IntoIterator<Item = (i32, i64)>) -> Self {
        let mut out = QPoly::zero();
        for (e, c) in terms {
            out.add_term(2 * e, c);
        }
        out
    }

    fn add_term(&mut self, e2: i32, c: i64) {
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(e2).or_insert(0);
        *entry += c;
        if *entry == 0 {
            self.terms.remove(&e2);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `(doubled exponent, coefficient)` pairs in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i32, i64)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    /// True if every exponent of `q` is an integer.
    pub fn has_integral_exponents(&self) -> bool {
        self.terms.keys().all(|e| e % 2 == 0)
    }

    /// The single term of a monomial, as `(coefficient, doubled exponent)`.
    pub fn as_monomial(&self) -> Option<(i64, i32)> {
        match self.terms.len() {
            1 => self.terms.iter().next().map(|(&e, &c)| (c, e)),
            _ => None,
        }
    }

    /// Multiplies by `q^{e2/2}`.
    pub fn shift_half(&self, e2: i32) -> Self {
        QPoly { terms: self.terms.iter().map(|(&e, &c)| (e + e2, c)).collect() }
    }

    pub fn scale(&self, c: i64) -> Self {
        if c == 0 {
            return QPoly::zero();
        }
        QPoly { terms: self.terms.iter().map(|(&e, &v)| (e, v * c)).collect() }
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(QPoly::one(), |acc, _| &acc * self)
    }

    /// Sum of the coefficients, i.e. the value at `q^{1/2} = 1`.
    pub fn coefficient_sum(&self) -> i64 {
        self.terms.values().sum()
    }

    /// Exact value at an integer `q`; fails on half-integral exponents.
    pub fn eval(&self, q: i64) -> Result<BigRational> {
        if !self.has_integral_exponents() {
            return Err(Error::Parse(format!("cannot evaluate {self} at an integer q")));
        }
        let base = BigRational::from_integer(BigInt::from(q));
        let mut acc = BigRational::zero();
        for (&e2, &c) in &self.terms {
            let e = e2 / 2;
            let pw = if e >= 0 {
                num_traits::pow(base.clone(), e as usize)
            } else {
                num_traits::pow(base.recip(), (-e) as usize)
            };
            acc += pw * BigRational::from_integer(BigInt::from(c));
        }
        Ok(acc)
    }

    /// Value at an integer `q` when it is an integer.
    pub fn eval_int(&self, q: i64) -> Result<i64> {
        let v = self.eval(q)?;
        if !v.is_integer() {
            return Err(Error::Parse(format!("{self} is not integral at q = {q}")));
        }
        i64::try_from(v.to_integer()).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Exact quotient by `q - 1`, if the exponents are integral and `q - 1`
    /// divides. Units `q^{±1}` do not affect divisibility, so this is the
    /// same test in `Z[q]` and `Z[q, q^{-1}]`.
    pub fn div_q_minus_one(&self) -> Option<QPoly> {
        if !self.has_integral_exponents() || self.coefficient_sum() != 0 {
            return None;
        }
        // Synthetic division from the top degree down.
        let mut out = QPoly::zero();
        let mut carry = 0i64;
        let (lo, hi) = match (self.terms.keys().next(), self.terms.keys().next_back()) {
            (Some(&lo), Some(&hi)) => (lo / 2, hi / 2),
            _ => return Some(QPoly::zero()),
        };
        for e in (lo + 1..=hi).rev() {
            carry += self.terms.get(&(2 * e)).copied().unwrap_or(0);
            out.add_term(2 * (e - 1), carry);
        }
        Some(out)
    }

    pub fn divisible_by_q_minus_one(&self) -> bool {
        self.div_q_minus_one().is_some()
    }

    /// Lowest and highest doubled exponents.
    pub fn degree_range(&self) -> Option<(i32, i32)> {
        Some((*self.terms.keys().next()?, *self.terms.keys().next_back()?))
    }
}

impl From<i64> for QPoly {
    fn from(c: i64) -> Self {
        QPoly::constant(c)
    }
}

impl Add<&QPoly> for &QPoly {
    type Output = QPoly;
    fn add(self, rhs: &QPoly) -> QPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for QPoly {
    type Output = QPoly;
    fn add(mut self, rhs: QPoly) -> QPoly {
        self += &rhs;
        self
    }
}

impl AddAssign<&QPoly> for QPoly {
    fn add_assign(&mut self, rhs: &QPoly) {
        for (&e, &c) in &rhs.terms {
            self.add_term(e, c);
        }
    }
}

impl Neg for &QPoly {
    type Output = QPoly;
    fn neg(self) -> QPoly {
        self.scale(-1)
    }
}

impl Neg for QPoly {
    type Output = QPoly;
    fn neg(self) -> QPoly {
        self.scale(-1)
    }
}

impl Sub<&QPoly> for &QPoly {
    type Output = QPoly;
    fn sub(self, rhs: &QPoly) -> QPoly {
        self + &(-rhs)
    }
}

impl Sub for QPoly {
    type Output = QPoly;
    fn sub(self, rhs: QPoly) -> QPoly {
        &self - &rhs
    }
}

impl Mul<&QPoly> for &QPoly {
    type Output = QPoly;
    fn mul(self, rhs: &QPoly) -> QPoly {
        let mut out = QPoly::zero();
        for (&e1, &c1) in &self.terms {
            for (&e2, &c2) in &rhs.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl Mul for QPoly {
    type Output = QPoly;
    fn mul(self, rhs: QPoly) -> QPoly {
        &self * &rhs
    }
}

/// Exponent label for a doubled exponent: `2`, `-1`, `3/2`.
pub fn exponent_label(e2: i32) -> String {
    if e2 % 2 == 0 {
        (e2 / 2).to_string()
    } else {
        format!("{e2}/2")
    }
}

fn parse_exponent_label(s: &str) -> Result<i32> {
    let bad = || Error::Parse(format!("bad exponent {s:?}"));
    match s.split_once('/') {
        Some((num, "2")) => {
            let n: i32 = num.trim().parse().map_err(|_| bad())?;
            if n % 2 == 0 {
                return Err(bad());
            }
            Ok(n)
        }
        Some(_) => Err(bad()),
        None => Ok(2 * s.trim().parse::<i32>().map_err(|_| bad())?),
    }
}

/// Highest power first: `q^2 - 2q + 1`, `-q^(3/2)`, `q^-1`.
impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (&e2, &c)) in self.terms.iter().rev().enumerate() {
            let mag = c.unsigned_abs();
            match (i, c < 0) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let power = match e2 {
                0 => String::new(),
                2 => "q".to_string(),
                e if e % 2 == 0 => format!("q^{}", e / 2),
                e => format!("q^({e}/2)"),
            };
            match (mag, power.is_empty()) {
                (_, true) => write!(f, "{mag}")?,
                (1, false) => write!(f, "{power}")?,
                (_, false) => write!(f, "{mag}{power}")?,
            }
        }
        Ok(())
    }
}

/// JSON form: an object from exponent label to coefficient, increasing
/// exponent order.
impl Serialize for QPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(self.terms.len()))?;
        for (&e2, &c) in &self.terms {
            map.serialize_entry(&exponent_label(e2), &c)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for QPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw: BTreeMap<String, i64> = BTreeMap::deserialize(d)?;
        let mut out = QPoly::zero();
        for (k, c) in raw {
            let e2 = parse_exponent_label(&k).map_err(D::Error::custom)?;
            out.add_term(e2, c);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qm1() -> QPoly {
        QPoly::from_terms([(1, 1), (0, -1)])
    }

    #[test]
    fn display_orders_by_descending_power() {
        let f = QPoly::from_terms([(2, 1), (1, -2), (0, 1)]);
        assert_eq!(f.to_string(), "q^2 - 2q + 1");
        assert_eq!(QPoly::monomial_half(-1, 3).to_string(), "-q^(3/2)");
        assert_eq!(QPoly::monomial(3, -1).to_string(), "3q^-1");
        assert_eq!(QPoly::zero().to_string(), "0");
    }

    #[test]
    fn square_of_q_minus_one() {
        assert_eq!(qm1().pow(2), QPoly::from_terms([(2, 1), (1, -2), (0, 1)]));
        assert_eq!(&qm1() - &qm1(), QPoly::zero());
    }

    #[test]
    fn division_by_q_minus_one() {
        let f = &qm1().pow(2) * &QPoly::from_terms([(2, 1), (1, 1), (0, -1)]);
        assert_eq!(f.div_q_minus_one().unwrap(), &qm1() * &QPoly::from_terms([(2, 1), (1, 1), (0, -1)]));
        assert!(QPoly::from_terms([(3, 1), (-2, -1)]).divisible_by_q_minus_one());
        assert!(!QPoly::from_terms([(1, 1)]).divisible_by_q_minus_one());
        assert!(!QPoly::monomial_half(1, 1).divisible_by_q_minus_one());
    }

    #[test]
    fn evaluation() {
        let f = QPoly::from_terms([(2, 1), (-1, 2)]);
        assert_eq!(f.eval_int(2).unwrap(), 5);
        assert!(QPoly::monomial_half(1, 1).eval(2).is_err());
        assert!(QPoly::monomial(1, -1).eval_int(3).is_err());
    }

    #[test]
    fn json_round_trip() {
        let f = QPoly::from_terms([(2, 1), (-1, 2)]) + QPoly::monomial_half(-4, 3);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"-1":2,"3/2":-4,"2":1}"#);
        assert_eq!(serde_json::from_str::<QPoly>(&s).unwrap(), f);
    }
}
