//! Exact linear algebra over the rationals localized at a prime `p`.
//!
//! The localization `Z_(p)` stands in for the ring of integers `O` of the
//! local field, with uniformizer `p` and residue field `F_p`. Everything is
//! computed with arbitrary-precision rationals; nothing here is approximate.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Scalar = BigRational;

/// A rational prime, checked on construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if p < 2 || (2..).take_while(|d| d * d <= p).any(|d| p.is_multiple_of(d)) {
            return Err(Error::NotPrime(p));
        }
        Ok(Prime(p))
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn as_scalar(self) -> Scalar {
        Scalar::from_integer(BigInt::from(self.0))
    }

    /// `p^e` as an exact rational; `e` may be negative.
    pub fn pow(self, e: i64) -> Scalar {
        let base = BigInt::from(self.0);
        let mag = num_traits::pow(base, e.unsigned_abs() as usize);
        if e >= 0 {
            Scalar::from_integer(mag)
        } else {
            Scalar::new(BigInt::one(), mag)
        }
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `p`-adic valuation; zero has valuation `Infinity`, which orders above
/// every finite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Valuation {
    Finite(i64),
    Infinity,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Valuation::Infinity
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinity => f.write_str("inf"),
        }
    }
}

fn int_valuation(x: &BigInt, p: &BigInt) -> i64 {
    let mut x = x.abs();
    let mut v = 0;
    loop {
        let (q, r) = x.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        x = q;
        v += 1;
    }
}

pub fn valuation(x: &Scalar, p: Prime) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinity;
    }
    let pb = BigInt::from(p.get());
    Valuation::Finite(int_valuation(x.numer(), &pb) - int_valuation(x.denom(), &pb))
}

pub fn is_integral(x: &Scalar, p: Prime) -> bool {
    valuation(x, p) >= Valuation::Finite(0)
}

pub fn is_unit(x: &Scalar, p: Prime) -> bool {
    valuation(x, p) == Valuation::Finite(0)
}

/// Writes a nonzero `x` as `u * p^v` and returns the unit `u`.
pub fn unit_part(x: &Scalar, p: Prime) -> Scalar {
    match valuation(x, p) {
        Valuation::Finite(v) => x * p.pow(-v),
        Valuation::Infinity => panic!("unit part of zero"),
    }
}

/// Dense square matrix with exact rational entries (row-major).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    n: usize,
    e: Vec<Scalar>,
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.n {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for j in 0..self.n {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        &self.e[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        &mut self.e[i * self.n + j]
    }
}

impl Mat {
    pub fn zero(n: usize) -> Self {
        Mat { n, e: vec![Scalar::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m[(i, i)] = Scalar::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Shape(format!("expected a square matrix, got {n} rows")));
        }
        Ok(Mat { n, e: rows.into_iter().flatten().collect() })
    }

    /// Convenience constructor from integer entries.
    pub fn from_ints<const N: usize>(rows: [[i64; N]; N]) -> Self {
        Mat {
            n: N,
            e: rows
                .iter()
                .flat_map(|r| r.iter().map(|&x| Scalar::from_integer(BigInt::from(x))))
                .collect(),
        }
    }

    pub fn diag(entries: Vec<Scalar>) -> Self {
        let mut m = Self::zero(entries.len());
        for (i, x) in entries.into_iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> Vec<Vec<Scalar>> {
        self.e.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        Mat { n: self.n, e: self.e.iter().map(|x| x * c).collect() }
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self[(i, j)].is_zero()))
    }

    pub fn det(&self) -> Scalar {
        let mut a = self.clone();
        let n = self.n;
        let mut det = Scalar::one();
        for c in 0..n {
            let Some(piv) = (c..n).find(|&r| !a[(r, c)].is_zero()) else {
                return Scalar::zero();
            };
            if piv != c {
                a.swap_rows(piv, c);
                det = -det;
            }
            let pv = a[(c, c)].clone();
            det *= &pv;
            for r in c + 1..n {
                if a[(r, c)].is_zero() {
                    continue;
                }
                let f = &a[(r, c)] / &pv;
                for k in c..n {
                    let t = &f * &a[(c, k)];
                    a[(r, k)] -= t;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for c in 0..n {
            let piv = (c..n).find(|&r| !a[(r, c)].is_zero()).ok_or(Error::Singular)?;
            a.swap_rows(piv, c);
            inv.swap_rows(piv, c);
            let pv = a[(c, c)].clone();
            for k in 0..n {
                a[(c, k)] /= &pv;
                inv[(c, k)] /= &pv;
            }
            for r in 0..n {
                if r == c || a[(r, c)].is_zero() {
                    continue;
                }
                let f = a[(r, c)].clone();
                for k in 0..n {
                    let t = &f * &a[(c, k)];
                    a[(r, k)] -= t;
                    let t = &f * &inv[(c, k)];
                    inv[(r, k)] -= t;
                }
            }
        }
        Ok(inv)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for k in 0..self.n {
                self.e.swap(a * self.n + k, b * self.n + k);
            }
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for k in 0..self.n {
                self.e.swap(k * self.n + a, k * self.n + b);
            }
        }
    }

    /// `col[dst] -= f * col[src]`
    fn col_axpy(&mut self, dst: usize, src: usize, f: &Scalar) {
        for k in 0..self.n {
            let t = f * &self[(k, src)];
            self[(k, dst)] -= t;
        }
    }

    /// `row[dst] -= f * row[src]`
    fn row_axpy(&mut self, dst: usize, src: usize, f: &Scalar) {
        for k in 0..self.n {
            let t = f * &self[(src, k)];
            self[(dst, k)] -= t;
        }
    }

    fn scale_row(&mut self, r: usize, f: &Scalar) {
        for k in 0..self.n {
            self[(r, k)] *= f;
        }
    }

    pub fn is_integral(&self, p: Prime) -> bool {
        self.e.iter().all(|x| is_integral(x, p))
    }

    /// Entries in `O` and determinant a unit, i.e. an element of `GL_n(O)`.
    pub fn is_unimodular(&self, p: Prime) -> bool {
        self.is_integral(p) && is_unit(&self.det(), p)
    }

    pub fn min_valuation(&self, p: Prime) -> Valuation {
        self.e.iter().map(|x| valuation(x, p)).min().unwrap_or(Valuation::Infinity)
    }
}

impl Mul for &Mat {
    type Output = Mat;
    fn mul(self, rhs: &Mat) -> Mat {
        assert_eq!(self.n, rhs.n, "dimension mismatch in matrix product");
        let n = self.n;
        let mut out = Mat::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * &rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Mul for Mat {
    type Output = Mat;
    fn mul(self, rhs: Mat) -> Mat {
        &self * &rhs
    }
}

/// Parses `"num/den"` or an integer string.
pub fn parse_scalar(s: &str) -> Result<Scalar> {
    let s = s.trim();
    let parse_int = |t: &str| t.trim().parse::<BigInt>().map_err(|_| Error::Parse(format!("bad rational `{s}`")));
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in `{s}`")));
            }
            Ok(Scalar::new(parse_int(n)?, d))
        }
        None => Ok(Scalar::from_integer(parse_int(s)?)),
    }
}

pub fn format_scalar(x: &Scalar) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

impl Serialize for Mat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> =
            (0..self.n).map(|i| (0..self.n).map(|j| format_scalar(&self[(i, j)])).collect()).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let rows: Vec<Vec<String>> = Vec::deserialize(d)?;
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|x| parse_scalar(x)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        Mat::from_rows(rows).map_err(D::Error::custom)
    }
}

/// An invertible matrix whose columns are an `O`-basis of a lattice.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeMatrix(Mat);

impl LatticeMatrix {
    pub fn new(m: Mat) -> Result<Self> {
        if m.det().is_zero() {
            return Err(Error::Singular);
        }
        Ok(LatticeMatrix(m))
    }

    pub fn mat(&self) -> &Mat {
        &self.0
    }

    pub fn into_mat(self) -> Mat {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// Left action of a group element.
    pub fn act(&self, g: &Mat) -> Result<Self> {
        Self::new(g * &self.0)
    }

    /// Same lattice iff both change-of-basis matrices are integral.
    pub fn same_lattice(&self, other: &Self, p: Prime) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        let a = self.0.inverse().expect("lattice matrix is invertible");
        let b = other.0.inverse().expect("lattice matrix is invertible");
        (&a * &other.0).is_integral(p) && (&b * &self.0).is_integral(p)
    }
}

/// Brings `m` to upper-triangular form by `O`-linear column operations.
///
/// Rows are processed bottom-up; in each row the pivot is the entry of
/// minimal valuation among the still-free columns (leftmost on ties), which
/// is moved to the diagonal and used to clear the rest of the row.
pub fn column_reduce_upper(m: &LatticeMatrix, p: Prime) -> Result<LatticeMatrix> {
    let mut a = m.mat().clone();
    let n = a.dim();
    for row in (0..n).rev() {
        let piv = (0..=row)
            .filter(|&c| !a[(row, c)].is_zero())
            .min_by_key(|&c| (valuation(&a[(row, c)], p), c))
            .ok_or(Error::Singular)?;
        a.swap_cols(piv, row);
        let pv = a[(row, row)].clone();
        for c in 0..row {
            if a[(row, c)].is_zero() {
                continue;
            }
            let f = &a[(row, c)] / &pv;
            debug_assert!(is_integral(&f, p));
            a.col_axpy(c, row, &f);
        }
    }
    LatticeMatrix::new(a)
}

/// Result of a Smith-type reduction `left * m * right = diag`.
#[derive(Clone, Debug)]
struct SmithForm {
    left: Mat,
    diag: Mat,
    right: Mat,
}

/// Reduces `m` to diagonal form with valuations ascending down the diagonal,
/// using only `GL_n(O)` row and column operations. Diagonal entries are
/// normalized to exact powers of `p`.
fn smith_ascending(m: &Mat, p: Prime) -> Result<SmithForm> {
    let n = m.dim();
    let mut a = m.clone();
    let mut left = Mat::identity(n);
    let mut right = Mat::identity(n);
    for k in 0..n {
        let mut best: Option<(Valuation, usize, usize)> = None;
        for i in k..n {
            for j in k..n {
                if a[(i, j)].is_zero() {
                    continue;
                }
                let cand = (valuation(&a[(i, j)], p), i, j);
                if best.as_ref().is_none_or(|b| cand.0 < b.0) {
                    best = Some(cand);
                }
            }
        }
        let (_, i, j) = best.ok_or(Error::Singular)?;
        a.swap_rows(i, k);
        left.swap_rows(i, k);
        a.swap_cols(j, k);
        right.swap_cols(j, k);
        let pv = a[(k, k)].clone();
        for r in k + 1..n {
            if !a[(r, k)].is_zero() {
                let f = &a[(r, k)] / &pv;
                a.row_axpy(r, k, &f);
                left.row_axpy(r, k, &f);
            }
        }
        for c in k + 1..n {
            if !a[(k, c)].is_zero() {
                let f = &a[(k, c)] / &pv;
                a.col_axpy(c, k, &f);
                right.col_axpy(c, k, &f);
            }
        }
        let u = unit_part(&pv, p);
        let inv_u = u.recip();
        a.scale_row(k, &inv_u);
        left.scale_row(k, &inv_u);
    }
    Ok(SmithForm { left, diag: a, right })
}

/// Elementary-divisor exponents of an invertible matrix, descending.
pub fn elementary_divisors(m: &Mat, p: Prime) -> Result<Vec<i64>> {
    let s = smith_ascending(m, p)?;
    let mut v: Vec<i64> = (0..m.dim())
        .map(|i| valuation(&s.diag[(i, i)], p).finite().expect("nonzero pivot"))
        .collect();
    v.reverse();
    Ok(v)
}

/// Cartan decomposition `N = k1 * t * k2` of a 2x2 matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cartan {
    pub k1: Mat,
    pub t: Mat,
    pub k2: Mat,
}

impl Cartan {
    /// Valuations of the diagonal of `t`, `(v(t11), v(t22))`.
    pub fn exponents(&self, p: Prime) -> (i64, i64) {
        let f = |x: &Scalar| valuation(x, p).finite().expect("nonzero diagonal");
        (f(&self.t[(0, 0)]), f(&self.t[(1, 1)]))
    }
}

/// `t` has exact prime-power diagonal with `v(t11) >= v(t22)`; `k1, k2` lie in
/// `GL_2(O)`.
pub fn cartan(n: &LatticeMatrix, p: Prime) -> Result<Cartan> {
    if n.dim() != 2 {
        return Err(Error::Shape(format!("Cartan decomposition needs a 2x2 matrix, got {}x{}", n.dim(), n.dim())));
    }
    let s = smith_ascending(n.mat(), p)?;
    // Reverse the ascending diagonal with the flip w = w^{-1}.
    let w = Mat::from_ints([[0, 1], [1, 0]]);
    let left = &w * &s.left;
    let right = &s.right * &w;
    let t = &(&w * &s.diag) * &w;
    Ok(Cartan { k1: left.inverse()?, t, k2: right.inverse()? })
}

/// Relative position `{L'' : L'}`: exponents `a_1 >= ... >= a_n` such that
/// some basis `e'` of `L'` has `p^{a_i} e'_i` spanning `L''`.
pub fn relative_position(l1: &LatticeMatrix, l2: &LatticeMatrix, p: Prime) -> Result<Vec<i64>> {
    if l1.dim() != l2.dim() {
        return Err(Error::Shape(format!(
            "relative position of lattices of rank {} and {}",
            l1.dim(),
            l2.dim()
        )));
    }
    let change = &l1.mat().inverse()? * l2.mat();
    elementary_divisors(&change, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: u64) -> Prime {
        Prime::new(x).unwrap()
    }

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::new(n.into(), d.into())
    }

    #[test]
    fn valuation_basics() {
        assert_eq!(valuation(&Scalar::zero(), p(3)), Valuation::Infinity);
        assert_eq!(valuation(&q(1, 3), p(3)), Valuation::Finite(-1));
        assert_eq!(valuation(&q(27 * 5, 7), p(3)), Valuation::Finite(3));
        assert_eq!(valuation(&q(-8, 3), p(2)), Valuation::Finite(3));
        assert!(Valuation::Finite(1000) < Valuation::Infinity);
    }

    #[test]
    fn primes_are_checked() {
        assert!(Prime::new(2).is_ok());
        assert!(Prime::new(97).is_ok());
        assert!(Prime::new(1).is_err());
        assert!(Prime::new(9).is_err());
    }

    #[test]
    fn reduce_identity_and_flip() {
        let id = LatticeMatrix::new(Mat::identity(3)).unwrap();
        assert_eq!(column_reduce_upper(&id, p(2)).unwrap(), id);
        let anti = LatticeMatrix::new(Mat::from_ints([[0, 0, 1], [0, 1, 0], [1, 0, 0]])).unwrap();
        let red = column_reduce_upper(&anti, p(2)).unwrap();
        assert!(red.mat().is_upper_triangular());
        assert!(red.same_lattice(&anti, p(2)));
        assert!(red.same_lattice(&id, p(2)));
    }

    #[test]
    fn reduce_rejects_singular() {
        assert!(LatticeMatrix::new(Mat::from_ints([[1, 2], [2, 4]])).is_err());
    }

    #[test]
    fn cartan_diagonal_cases() {
        let pr = p(5);
        let n = LatticeMatrix::new(Mat::from_ints([[5, 0], [0, 1]])).unwrap();
        let c = cartan(&n, pr).unwrap();
        assert_eq!(c.k1, Mat::identity(2));
        assert_eq!(c.k2, Mat::identity(2));
        assert_eq!(c.t, Mat::from_ints([[5, 0], [0, 1]]));

        let n = LatticeMatrix::new(Mat::from_ints([[1, 0], [0, 5]])).unwrap();
        let c = cartan(&n, pr).unwrap();
        assert_eq!(c.t, Mat::from_ints([[5, 0], [0, 1]]));
        assert_eq!(c.k1, Mat::from_ints([[0, 1], [1, 0]]));
        assert_eq!(&(&c.k1 * &c.t) * &c.k2, *n.mat());
    }

    #[test]
    fn relative_position_examples() {
        let pr = p(3);
        let l = LatticeMatrix::new(Mat::from_ints([[1, 2, 0], [0, 3, 1], [1, 0, 9]])).unwrap();
        assert_eq!(relative_position(&l, &l, pr).unwrap(), vec![0, 0, 0]);
        let pl = LatticeMatrix::new(l.mat().scale(&pr.as_scalar())).unwrap();
        assert_eq!(relative_position(&l, &pl, pr).unwrap(), vec![1, 1, 1]);
        assert_eq!(relative_position(&pl, &l, pr).unwrap(), vec![-1, -1, -1]);

        let (r, d) = (-2, 3);
        let base = LatticeMatrix::new(Mat::identity(2)).unwrap();
        let other = LatticeMatrix::new(Mat::diag(vec![pr.pow(r), pr.pow(r + d)])).unwrap();
        assert_eq!(relative_position(&base, &other, pr).unwrap(), vec![r + d, r]);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = LatticeMatrix::new(Mat::identity(2)).unwrap();
        let b = LatticeMatrix::new(Mat::identity(3)).unwrap();
        assert!(matches!(relative_position(&a, &b, p(2)), Err(Error::Shape(_))));
    }
}
