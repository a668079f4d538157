//! The spherical Hecke algebra of `GL_3 x GL_2`, its Satake transform into
//! functions on the dual torus, and the Hecke polynomial.
//!
//! Torus monomials `x1^a1 x2^a2 x3^a3 y1^b1 y2^b2` are exponent vectors
//! `[a1, a2, a3, b1, b2]`. Hecke monomials
//! `t_g1^a t_g2^b t_g3^c t_h1^d t_h2^e` are exponent vectors
//! `[a, b, c, d, e]`, where `t_g1, t_g2, t_g3` are the double cosets of
//! `diag(p,1,1)`, `diag(p,p,1)`, `p I_3` and `t_h1, t_h2` those of
//! `diag(p,1)`, `p I_2`. Only `t_g3` and `t_h2` are invertible.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qpoly::QPoly;

pub type TorusExp = [i32; 5];
pub type HeckeExp = [i32; 5];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Generator {
    #[serde(rename = "t_g1")]
    G1,
    #[serde(rename = "t_g2")]
    G2,
    #[serde(rename = "t_g3")]
    G3,
    #[serde(rename = "t_h1")]
    H1,
    #[serde(rename = "t_h2")]
    H2,
}

impl Generator {
    pub const ALL: [Generator; 5] = [Generator::G1, Generator::G2, Generator::G3, Generator::H1, Generator::H2];

    pub fn name(self) -> &'static str {
        match self {
            Generator::G1 => "t_g1",
            Generator::G2 => "t_g2",
            Generator::G3 => "t_g3",
            Generator::H1 => "t_h1",
            Generator::H2 => "t_h2",
        }
    }

    /// Position of the generator in a Hecke exponent vector.
    pub fn slot(self) -> usize {
        self as usize
    }

    pub fn is_central(self) -> bool {
        matches!(self, Generator::G3 | Generator::H2)
    }

    /// Number of single cosets in the double coset, as a polynomial in `q`.
    pub fn degree(self) -> QPoly {
        match self {
            Generator::G1 | Generator::G2 => QPoly::from_terms([(2, 1), (1, 1), (0, 1)]),
            Generator::H1 => QPoly::from_terms([(1, 1), (0, 1)]),
            Generator::G3 | Generator::H2 => QPoly::one(),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Generator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let g = match s.trim() {
            "t_g1" | "t_g'" | "g1" => Generator::G1,
            "t_g2" | "t_g''" | "g2" => Generator::G2,
            "t_g3" | "t_g'''" | "g3" => Generator::G3,
            "t_h1" | "t_h'" | "h1" => Generator::H1,
            "t_h2" | "t_h''" | "h2" => Generator::H2,
            other => return Err(Error::UnknownGenerator(other.to_string())),
        };
        Ok(g)
    }
}

fn add_into<K: Ord + Copy>(map: &mut BTreeMap<K, QPoly>, key: K, c: &QPoly) {
    if c.is_zero() {
        return;
    }
    let entry = map.entry(key).or_default();
    *entry += c;
    if entry.is_zero() {
        map.remove(&key);
    }
}

fn add_vec(a: &[i32; 5], b: &[i32; 5]) -> [i32; 5] {
    std::array::from_fn(|i| a[i] + b[i])
}

/// Elements of `Z[q^{±1/2}][x1^±, x2^±, x3^±, y1^±, y2^±]`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TorusElement {
    terms: BTreeMap<TorusExp, QPoly>,
}

impl TorusElement {
    pub fn zero() -> Self {
        TorusElement::default()
    }

    pub fn one() -> Self {
        TorusElement::monomial([0; 5], QPoly::one())
    }

    pub fn monomial(exp: TorusExp, c: QPoly) -> Self {
        let mut terms = BTreeMap::new();
        add_into(&mut terms, exp, &c);
        TorusElement { terms }
    }

    pub fn constant(c: QPoly) -> Self {
        TorusElement::monomial([0; 5], c)
    }

    fn unit_vector(i: usize, e: i32) -> Self {
        let mut exp = [0; 5];
        exp[i] = e;
        TorusElement::monomial(exp, QPoly::one())
    }

    /// `x_i^e`, `i ∈ {1, 2, 3}`.
    pub fn x(i: usize, e: i32) -> Self {
        assert!((1..=3).contains(&i));
        TorusElement::unit_vector(i - 1, e)
    }

    /// `y_j^e`, `j ∈ {1, 2}`.
    pub fn y(j: usize, e: i32) -> Self {
        assert!((1..=2).contains(&j));
        TorusElement::unit_vector(2 + j, e)
    }

    pub fn u_v() -> Self {
        TorusElement::monomial([1, 1, 1, 0, 0], QPoly::one())
    }

    pub fn u_w() -> Self {
        TorusElement::monomial([0, 0, 0, 1, 1], QPoly::one())
    }

    /// `s_{1,0}` for `sign = 1` and `s_{-1,0}` for `sign = -1`.
    pub fn s_v(sign: i32) -> Self {
        (1..=3).map(|i| TorusElement::x(i, sign)).fold(TorusElement::zero(), |a, b| a + b)
    }

    /// `s_{0,1}` for `sign = 1` and `s_{0,-1}` for `sign = -1`.
    pub fn s_w(sign: i32) -> Self {
        (1..=2).map(|j| TorusElement::y(j, sign)).fold(TorusElement::zero(), |a, b| a + b)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TorusExp, &QPoly)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exp: &TorusExp) -> QPoly {
        self.terms.get(exp).cloned().unwrap_or_default()
    }

    pub fn scale(&self, c: &QPoly) -> Self {
        let mut out = TorusElement::zero();
        for (e, v) in &self.terms {
            add_into(&mut out.terms, *e, &(v * c));
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(TorusElement::one(), |acc, _| &acc * self)
    }

    /// Inverse of a monomial whose coefficient is `±q^{e/2}`.
    pub fn monomial_inverse(&self) -> Result<Self> {
        let bad = || Error::Parse(format!("{self} is not an invertible monomial"));
        if self.terms.len() != 1 {
            return Err(bad());
        }
        let (exp, c) = self.terms.iter().next().ok_or_else(bad)?;
        let (coeff, e2) = c.as_monomial().ok_or_else(bad)?;
        if coeff.abs() != 1 {
            return Err(bad());
        }
        Ok(TorusElement::monomial(exp.map(|a| -a), QPoly::monomial_half(coeff, -e2)))
    }

    /// Applies a Weyl element: `x_i -> x_{sigma(i)}`, `y_j -> y_{tau(j)}`
    /// (zero-based).
    pub fn permute(&self, sigma: [usize; 3], tau: [usize; 2]) -> Self {
        let mut out = TorusElement::zero();
        for (e, c) in &self.terms {
            let mut f = [0; 5];
            for i in 0..3 {
                f[sigma[i]] = e[i];
            }
            for j in 0..2 {
                f[3 + tau[j]] = e[3 + j];
            }
            add_into(&mut out.terms, f, c);
        }
        out
    }

    /// All twelve elements of `S_3 x S_2`.
    pub fn weyl_group() -> Vec<([usize; 3], [usize; 2])> {
        let s3 = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        s3.iter().flat_map(|&s| [(s, [0, 1]), (s, [1, 0])]).collect()
    }

    pub fn is_weyl_invariant(&self) -> bool {
        TorusElement::weyl_group().into_iter().all(|(s, t)| &self.permute(s, t) == self)
    }

    /// Sets every `x_i` and `y_j` to 1.
    pub fn specialize_ones(&self) -> QPoly {
        self.terms.values().fold(QPoly::zero(), |a, b| &a + b)
    }

    /// Lexicographically largest monomial.
    pub fn leading(&self) -> Option<(&TorusExp, &QPoly)> {
        self.terms.iter().next_back()
    }
}

impl Add<&TorusElement> for &TorusElement {
    type Output = TorusElement;
    fn add(self, rhs: &TorusElement) -> TorusElement {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            add_into(&mut out.terms, *e, c);
        }
        out
    }
}

impl Add for TorusElement {
    type Output = TorusElement;
    fn add(self, rhs: TorusElement) -> TorusElement {
        &self + &rhs
    }
}

impl Neg for &TorusElement {
    type Output = TorusElement;
    fn neg(self) -> TorusElement {
        self.scale(&QPoly::constant(-1))
    }
}

impl Sub<&TorusElement> for &TorusElement {
    type Output = TorusElement;
    fn sub(self, rhs: &TorusElement) -> TorusElement {
        self + &(-rhs)
    }
}

impl Sub for TorusElement {
    type Output = TorusElement;
    fn sub(self, rhs: TorusElement) -> TorusElement {
        &self - &rhs
    }
}

impl Mul<&TorusElement> for &TorusElement {
    type Output = TorusElement;
    fn mul(self, rhs: &TorusElement) -> TorusElement {
        let mut out = TorusElement::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                add_into(&mut out.terms, add_vec(e1, e2), &(c1 * c2));
            }
        }
        out
    }
}

impl Mul for TorusElement {
    type Output = TorusElement;
    fn mul(self, rhs: TorusElement) -> TorusElement {
        &self * &rhs
    }
}

fn write_coeff_monomial(f: &mut fmt::Formatter<'_>, first: bool, c: &QPoly, vars: &str) -> fmt::Result {
    let (neg, c) = match c.as_monomial() {
        Some((k, _)) if k < 0 => (true, -c),
        _ => (false, c.clone()),
    };
    match (first, neg) {
        (true, true) => write!(f, "-")?,
        (true, false) => {}
        (false, true) => write!(f, " - ")?,
        (false, false) => write!(f, " + ")?,
    }
    match (c.as_monomial(), vars.is_empty()) {
        (_, true) => write!(f, "{c}"),
        (Some((1, 0)), false) => write!(f, "{vars}"),
        (Some(_), false) => write!(f, "{c}*{vars}"),
        (None, false) => write!(f, "({c})*{vars}"),
    }
}

fn monomial_string(exp: &[i32; 5], names: [&str; 5]) -> String {
    let parts: Vec<String> = exp
        .iter()
        .zip(names)
        .filter(|(e, _)| **e != 0)
        .map(|(&e, n)| if e == 1 { n.to_string() } else { format!("{n}^{e}") })
        .collect();
    parts.join("*")
}

impl fmt::Display for TorusElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            write_coeff_monomial(f, i == 0, c, &monomial_string(e, ["x1", "x2", "x3", "y1", "y2"]))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct Term {
    exp: [i32; 5],
    coeff: QPoly,
}

impl Serialize for TorusElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<Term> = self.terms.iter().map(|(e, c)| Term { exp: *e, coeff: c.clone() }).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for TorusElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<Term> = Vec::deserialize(d)?;
        let mut out = TorusElement::zero();
        for t in v {
            add_into(&mut out.terms, t.exp, &t.coeff);
        }
        Ok(out)
    }
}

/// Elements of `H[q^{±1/2}]`, as a monoid algebra on the five generators.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HeckeElement {
    terms: BTreeMap<HeckeExp, QPoly>,
}

fn check_hecke_exp(exp: &HeckeExp) -> Result<()> {
    for g in [Generator::G1, Generator::G2, Generator::H1] {
        if exp[g.slot()] < 0 {
            return Err(Error::InvalidTuple(format!("{g} is not invertible: exponent vector {exp:?}")));
        }
    }
    Ok(())
}

impl HeckeElement {
    pub fn zero() -> Self {
        HeckeElement::default()
    }

    pub fn one() -> Self {
        HeckeElement { terms: BTreeMap::from([([0; 5], QPoly::one())]) }
    }

    pub fn monomial(exp: HeckeExp, c: QPoly) -> Result<Self> {
        check_hecke_exp(&exp)?;
        let mut terms = BTreeMap::new();
        add_into(&mut terms, exp, &c);
        Ok(HeckeElement { terms })
    }

    pub fn generator(g: Generator) -> Self {
        let mut exp = [0; 5];
        exp[g.slot()] = 1;
        HeckeElement::monomial(exp, QPoly::one()).expect("nonnegative exponent")
    }

    /// `g^e`; negative powers only exist for the central generators.
    pub fn generator_pow(g: Generator, e: i32) -> Result<Self> {
        let mut exp = [0; 5];
        exp[g.slot()] = e;
        HeckeElement::monomial(exp, QPoly::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&HeckeExp, &QPoly)> {
        self.terms.iter()
    }

    pub fn scale(&self, c: &QPoly) -> Self {
        let mut out = HeckeElement::zero();
        for (e, v) in &self.terms {
            add_into(&mut out.terms, *e, &(v * c));
        }
        out
    }

    /// True if only integer powers of `q` occur.
    pub fn has_integral_coefficients(&self) -> bool {
        self.terms.values().all(QPoly::has_integral_exponents)
    }

    /// Image under the degree character `t -> #(K t K / K)`.
    pub fn degree(&self) -> QPoly {
        let mut out = QPoly::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for g in Generator::ALL {
                if !g.is_central() {
                    term = &term * &g.degree().pow(e[g.slot()] as u32);
                }
            }
            out += &term;
        }
        out
    }
}

impl Add<&HeckeElement> for &HeckeElement {
    type Output = HeckeElement;
    fn add(self, rhs: &HeckeElement) -> HeckeElement {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            add_into(&mut out.terms, *e, c);
        }
        out
    }
}

impl Add for HeckeElement {
    type Output = HeckeElement;
    fn add(self, rhs: HeckeElement) -> HeckeElement {
        &self + &rhs
    }
}

impl Neg for &HeckeElement {
    type Output = HeckeElement;
    fn neg(self) -> HeckeElement {
        self.scale(&QPoly::constant(-1))
    }
}

impl Sub<&HeckeElement> for &HeckeElement {
    type Output = HeckeElement;
    fn sub(self, rhs: &HeckeElement) -> HeckeElement {
        self + &(-rhs)
    }
}

impl Mul<&HeckeElement> for &HeckeElement {
    type Output = HeckeElement;
    fn mul(self, rhs: &HeckeElement) -> HeckeElement {
        let mut out = HeckeElement::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                add_into(&mut out.terms, add_vec(e1, e2), &(c1 * c2));
            }
        }
        out
    }
}

impl Mul for HeckeElement {
    type Output = HeckeElement;
    fn mul(self, rhs: HeckeElement) -> HeckeElement {
        &self * &rhs
    }
}

impl fmt::Display for HeckeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            write_coeff_monomial(f, i == 0, c, &monomial_string(e, ["t_g1", "t_g2", "t_g3", "t_h1", "t_h2"]))?;
        }
        Ok(())
    }
}

impl Serialize for HeckeElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<Term> = self.terms.iter().map(|(e, c)| Term { exp: *e, coeff: c.clone() }).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for HeckeElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let v: Vec<Term> = Vec::deserialize(d)?;
        let mut out = HeckeElement::zero();
        for t in v {
            check_hecke_exp(&t.exp).map_err(D::Error::custom)?;
            add_into(&mut out.terms, t.exp, &t.coeff);
        }
        Ok(out)
    }
}

/// Satake image of a generator or, for the central ones, its inverse.
pub fn satake_of_generator(g: Generator, inverse: bool) -> Result<TorusElement> {
    if inverse && !g.is_central() {
        return Err(Error::InvalidTuple(format!("{g} is not invertible")));
    }
    let image = match g {
        Generator::G1 => TorusElement::s_v(1).scale(&QPoly::q()),
        Generator::G2 => (TorusElement::u_v() * TorusElement::s_v(-1)).scale(&QPoly::q()),
        Generator::G3 => TorusElement::u_v(),
        Generator::H1 => TorusElement::s_w(1).scale(&QPoly::monomial_half(1, 1)),
        Generator::H2 => TorusElement::u_w(),
    };
    if inverse {
        image.monomial_inverse()
    } else {
        Ok(image)
    }
}

fn satake_of_power(g: Generator, e: i32) -> TorusElement {
    let base = satake_of_generator(g, e < 0).expect("exponent vector was validated");
    base.pow(e.unsigned_abs())
}

/// The Satake transform, extended multiplicatively from the generators.
pub fn satake(h: &HeckeElement) -> TorusElement {
    let mut out = TorusElement::zero();
    for (e, c) in h.terms() {
        let mut term = TorusElement::constant(c.clone());
        for g in Generator::ALL {
            if e[g.slot()] != 0 {
                term = &term * &satake_of_power(g, e[g.slot()]);
            }
        }
        out = &out + &term;
    }
    out
}

/// Inverts the Satake transform on a Weyl-invariant element by repeatedly
/// cancelling the lexicographically leading monomial.
pub fn inverse_satake(f: &TorusElement) -> Result<HeckeElement> {
    if !f.is_weyl_invariant() {
        return Err(Error::InvalidTuple(format!("{f} is not Weyl-invariant")));
    }
    let mut rest = f.clone();
    let mut out = HeckeElement::zero();
    for _ in 0..100_000 {
        let Some((lead, c)) = rest.leading() else {
            return Ok(out);
        };
        let [l1, l2, l3, m1, m2] = *lead;
        let exp = [l1 - l2, l2 - l3, l3, m1 - m2, m2];
        // The leading coefficient of the image of this monomial is q^{a+b+d/2}.
        let shift = 2 * (exp[0] + exp[1]) + exp[3];
        let mono = HeckeElement::monomial(exp, c.shift_half(-shift))?;
        rest = &rest - &satake(&mono);
        out = &out + &mono;
    }
    Err(Error::Internal("inverse Satake did not terminate".into()))
}

/// A polynomial in `z`; entry `i` is the coefficient of `z^i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeckePolynomial {
    pub coeffs: Vec<HeckeElement>,
}

impl HeckePolynomial {
    pub fn coefficient(&self, i: usize) -> &HeckeElement {
        &self.coeffs[i]
    }

    pub fn is_monic_sextic(&self) -> bool {
        self.coeffs.len() == 7 && self.coeffs[6] == HeckeElement::one()
    }

    pub fn has_integral_coefficients(&self) -> bool {
        self.coeffs.iter().all(HeckeElement::has_integral_coefficients)
    }
}

/// `prod_{i,j} (z - q^{3/2} x_i^{-1} y_j^{-1})`, expanded; entry `i` is the
/// coefficient of `z^i`.
pub fn torus_hecke_polynomial() -> Vec<TorusElement> {
    let mut poly = vec![TorusElement::one()];
    for i in 1..=3 {
        for j in 1..=2 {
            let root = (TorusElement::x(i, -1) * TorusElement::y(j, -1)).scale(&QPoly::monomial_half(1, 3));
            let mut next = vec![TorusElement::zero(); poly.len() + 1];
            for (k, c) in poly.iter().enumerate() {
                next[k + 1] = &next[k + 1] + c;
                next[k] = &next[k] - &(c * &root);
            }
            poly = next;
        }
    }
    poly
}

/// The Hecke polynomial, obtained by inverting the Satake transform on each
/// coefficient of the torus polynomial.
pub fn hecke_polynomial() -> HeckePolynomial {
    let coeffs = torus_hecke_polynomial()
        .iter()
        .map(|c| inverse_satake(c).expect("torus coefficients are Weyl-invariant"))
        .collect();
    HeckePolynomial { coeffs }
}
