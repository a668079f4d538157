//! Orbit invariants of lattice pairs `(Λ_V, Λ_W)` under the diagonally
//! embedded `GL_2`, their canonical form, and the local conductor.
//!
//! Conventions: `W = span(e1, e2)` and `D = span(e3)` inside `V = k0^3`;
//! `GL(W)` sits in `GL(V)` as block-diagonal matrices `diag(h, 1)`.
//!
//! The fiber coordinate of a pair is a vector `(u1, u2)` in `(k0/O)^2`
//! (the third column of the normalized matrix `U`). The tuple slot `m`
//! records the order of `u2` and `n` the order of `u1`. With that labelling
//! the stabilizer of the `W`-pair acts through `R_d^×` (lower-left entry in
//! `p^d O`) and the normal form below is a complete invariant.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::dvr::{cartan, column_reduce_upper, valuation, LatticeMatrix, Mat, Prime, Scalar, Valuation};
use crate::error::{Error, Result};

/// The six invariants `(k, s, r, d, m, n)` in canonical form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "[i64; 6]", try_from = "[i64; 6]")]
pub struct InvTuple {
    pub k: i64,
    pub s: i64,
    pub r: i64,
    pub d: i64,
    pub m: i64,
    pub n: i64,
}

impl InvTuple {
    pub const ZERO: InvTuple = InvTuple { k: 0, s: 0, r: 0, d: 0, m: 0, n: 0 };

    /// Canonicalizes a raw six-tuple; fails if `d`, `m` or `n` is negative.
    pub fn new(raw: [i64; 6]) -> Result<Self> {
        canonicalize(raw)
    }

    /// Accepts only tuples that are already canonical.
    pub fn from_canonical(raw: [i64; 6]) -> Result<Self> {
        let t = canonicalize(raw)?;
        if t.to_array() != raw {
            return Err(Error::NotCanonical { given: raw, canonical: t.to_array() });
        }
        Ok(t)
    }

    pub fn to_array(self) -> [i64; 6] {
        [self.k, self.s, self.r, self.d, self.m, self.n]
    }

    pub fn conductor(self) -> i64 {
        conductor(self)
    }

    pub fn with_k(self, k: i64) -> Self {
        InvTuple { k, ..self }
    }
}

impl From<InvTuple> for [i64; 6] {
    fn from(t: InvTuple) -> Self {
        t.to_array()
    }
}

impl TryFrom<[i64; 6]> for InvTuple {
    type Error = Error;
    fn try_from(raw: [i64; 6]) -> Result<Self> {
        InvTuple::from_canonical(raw)
    }
}

impl fmt::Display for InvTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{},{},{})", self.k, self.s, self.r, self.d, self.m, self.n)
    }
}

impl FromStr for InvTuple {
    type Err = Error;

    /// Parses `(k,s,r,d,m,n)` or `[k,s,r,d,m,n]`; the tuple must be canonical.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches(['(', '[']).trim_end_matches([')', ']']);
        let parts: Vec<i64> = inner
            .split(',')
            .map(|x| x.trim().parse::<i64>().map_err(|e| Error::Parse(format!("{x:?}: {e}"))))
            .collect::<Result<_>>()?;
        let raw: [i64; 6] = parts
            .try_into()
            .map_err(|v: Vec<i64>| Error::Parse(format!("expected 6 entries, got {}", v.len())))?;
        InvTuple::from_canonical(raw)
    }
}

/// Normal form on `(m, n)`:
/// * `d = 0`: only the order survives, `(max(m, n), 0)`;
/// * `d > 0`, `m <= n`: `(0, n)`;
/// * `d > 0`, `m >= n + d`: `(m, 0)`;
/// * otherwise unchanged (`n < m < n + d`).
pub fn canonicalize(raw: [i64; 6]) -> Result<InvTuple> {
    let [k, s, r, d, mut m, mut n] = raw;
    if d < 0 || m < 0 || n < 0 {
        return Err(Error::InvalidTuple(format!("d, m, n must be nonnegative in {raw:?}")));
    }
    if d == 0 {
        m = m.max(n);
        n = 0;
    } else if m <= n {
        m = 0;
    } else if m >= n + d {
        n = 0;
    }
    Ok(InvTuple { k, s, r, d, m, n })
}

/// Local conductor `max(0, min(m - n, n + d - m))`.
pub fn conductor(t: InvTuple) -> i64 {
    0.max((t.m - t.n).min(t.n + t.d - t.m))
}

/// A pair of lattices: `v` in `V = k0^3`, `w` in `W = k0^2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticePair {
    pub v: LatticeMatrix,
    pub w: LatticeMatrix,
}

#[derive(Serialize, Deserialize)]
struct PairJson {
    v: Mat,
    w: Mat,
}

impl Serialize for LatticePair {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PairJson { v: self.v.mat().clone(), w: self.w.mat().clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LatticePair {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = PairJson::deserialize(d)?;
        LatticePair::new(j.v, j.w).map_err(D::Error::custom)
    }
}

/// Embeds `h ∈ GL_2` as `diag(h, 1) ∈ GL_3`.
pub fn embed_w(h: &Mat) -> Mat {
    assert_eq!(h.dim(), 2);
    let mut g = Mat::identity(3);
    for i in 0..2 {
        for j in 0..2 {
            g[(i, j)] = h[(i, j)].clone();
        }
    }
    g
}

impl LatticePair {
    pub fn new(v: Mat, w: Mat) -> Result<Self> {
        if v.dim() != 3 || w.dim() != 2 {
            return Err(Error::Shape(format!(
                "expected a 3x3 and a 2x2 matrix, got {0}x{0} and {1}x{1}",
                v.dim(),
                w.dim()
            )));
        }
        Ok(LatticePair { v: LatticeMatrix::new(v)?, w: LatticeMatrix::new(w)? })
    }

    pub fn identity() -> Self {
        LatticePair::new(Mat::identity(3), Mat::identity(2)).expect("identity is invertible")
    }

    /// Left action of `h ∈ GL(W)` through the diagonal embedding.
    pub fn act_h(&self, h: &Mat) -> Result<Self> {
        Ok(LatticePair { v: self.v.act(&embed_w(h))?, w: self.w.act(h)? })
    }

    /// Right multiplication by a group element `(g_v, g_w)`; this is how a
    /// coset representative `b g K` is formed from `b K`.
    pub fn right_mul(&self, gv: &Mat, gw: &Mat) -> Result<Self> {
        Ok(LatticePair {
            v: LatticeMatrix::new(self.v.mat() * gv)?,
            w: LatticeMatrix::new(self.w.mat() * gw)?,
        })
    }

    pub fn same_pair(&self, other: &Self, p: Prime) -> bool {
        self.v.same_lattice(&other.v, p) && self.w.same_lattice(&other.w, p)
    }
}

/// Intermediate quantities of the invariant computation, before the fiber
/// coordinate is labelled and canonicalized.
#[derive(Clone, Debug)]
pub struct RawInvariants {
    pub k: i64,
    pub s: i64,
    pub r: i64,
    pub d: i64,
    /// `max(0, -v(U13))`, the order of the first fiber coordinate.
    pub ord_u1: i64,
    /// `max(0, -v(U23))`, the order of the second fiber coordinate.
    pub ord_u2: i64,
    pub u: Mat,
}

fn order_in_quotient(x: &Scalar, p: Prime) -> i64 {
    match valuation(x, p) {
        Valuation::Finite(v) if v < 0 => -v,
        _ => 0,
    }
}

/// Steps 1-8 of the invariant computation on a lattice pair.
pub fn raw_invariants(pair: &LatticePair, p: Prime) -> Result<RawInvariants> {
    let tri = column_reduce_upper(&pair.v, p)?;
    let t = tri.mat();
    let m33 = t[(2, 2)].clone();
    let s = valuation(&m33, p).finite().ok_or(Error::Singular)?;
    let m0 = t.scale(&m33.recip());
    let block = Mat::from_rows(vec![
        vec![m0[(0, 0)].clone(), m0[(0, 1)].clone()],
        vec![m0[(1, 0)].clone(), m0[(1, 1)].clone()],
    ])?;
    let block_inv = block.inverse()?;
    let transported = LatticeMatrix::new(&block_inv * pair.w.mat())?;
    let cd = cartan(&transported, p)?;
    let (v1, v2) = cd.exponents(p);
    let h = &cd.k1.inverse()? * &block_inv;
    let k = -valuation(&h.det(), p).finite().ok_or(Error::Singular)?;
    let u = &embed_w(&h) * &m0;

    // U must be column-equivalent to a unipotent matrix: its upper-left block
    // is k1^{-1}, which has to be in GL_2(O).
    let ul = Mat::from_rows(vec![
        vec![u[(0, 0)].clone(), u[(0, 1)].clone()],
        vec![u[(1, 0)].clone(), u[(1, 1)].clone()],
    ])?;
    if !ul.is_unimodular(p) || !u[(2, 0)].is_zero() || !u[(2, 1)].is_zero() || !u[(2, 2)].is_one() {
        return Err(Error::Internal(format!("U = {u:?} is not column-equivalent to a unipotent matrix")));
    }
    // Re-express the third column in the basis where the block is the
    // identity: U * diag(k1, 1) has the same lattice.
    let u = &u * &embed_w(&cd.k1);
    let ord_u1 = order_in_quotient(&u[(0, 2)], p);
    let ord_u2 = order_in_quotient(&u[(1, 2)], p);
    Ok(RawInvariants { k, s, r: v2, d: v1 - v2, ord_u1, ord_u2, u })
}

/// The canonical invariant tuple of a lattice pair.
pub fn invariants(pair: &LatticePair, p: Prime) -> Result<InvTuple> {
    let raw = raw_invariants(pair, p)?;
    canonicalize([raw.k, raw.s, raw.r, raw.d, raw.ord_u2, raw.ord_u1])
}

/// Representative pair for a canonical tuple:
/// `V`: `p^s [[p^k, 0, p^{k-n}], [0, 1, p^{-m}], [0, 0, 1]]`,
/// `W`: `diag(p^{k+d+r}, p^r)`.
pub fn canonical_rep(t: InvTuple, p: Prime) -> LatticePair {
    let ps = p.pow(t.s);
    let mut v = Mat::zero(3);
    v[(0, 0)] = p.pow(t.k);
    v[(0, 2)] = p.pow(t.k - t.n);
    v[(1, 1)] = Scalar::one();
    v[(1, 2)] = p.pow(-t.m);
    v[(2, 2)] = Scalar::one();
    let v = v.scale(&ps);
    let w = Mat::diag(vec![p.pow(t.k + t.d + t.r), p.pow(t.r)]);
    LatticePair::new(v, w).expect("canonical representative is invertible")
}

/// The `W`-lattice attached to `Λ_V`: the unique point of `UZ·Λ_V` lying in
/// `W` (identified through `L_D = O e3`), returned as a 2x2 basis matrix.
pub fn project_to_w(v: &LatticeMatrix, p: Prime) -> Result<LatticeMatrix> {
    if v.dim() != 3 {
        return Err(Error::Shape(format!("projection expects a 3x3 matrix, got {0}x{0}", v.dim())));
    }
    let t = column_reduce_upper(v, p)?;
    let t = t.mat();
    let c = t[(2, 2)].recip();
    LatticeMatrix::new(Mat::from_rows(vec![
        vec![&t[(0, 0)] * &c, &t[(0, 1)] * &c],
        vec![&t[(1, 0)] * &c, &t[(1, 1)] * &c],
    ])?)
}

/// Minimal working precision for [`stabilizer_conductor_oracle`].
pub fn oracle_precision(d: u32, m: u32, n: u32) -> u32 {
    m + n + d + 2
}

/// Brute-force conductor: enumerates `g ∈ R_d^×` modulo `p^N` stabilizing
/// `v_{m,n} = (p^{-m}, p^{-n})` in `(k0/O)^2`, collects `det g`, and returns
/// the largest `c` with `{det g} = 1 + p^c O` modulo `p^N`, or 0 when every
/// unit occurs.
pub fn stabilizer_conductor_oracle(d: u32, m: u32, n: u32, p: Prime) -> Result<i64> {
    stabilizer_conductor_oracle_at(d, m, n, p, oracle_precision(d, m, n))
}

pub fn stabilizer_conductor_oracle_at(d: u32, m: u32, n: u32, p: Prime, precision: u32) -> Result<i64> {
    let required = oracle_precision(d, m, n);
    if precision < required {
        return Err(Error::Precision { precision, required });
    }
    let pp = p.get();
    // Stabilizing v_{m,n} only depends on entries modulo p^e, and
    // diag(1 + p^e x, 1) always stabilizes, so the determinant image modulo
    // p^precision is the full preimage of its image modulo p^e.
    let e = m.max(n);
    let modulus = pp.pow(e);
    let pow = |k: u32| pp.pow(k) % modulus.max(1);
    // Scaled by p^e the conditions read, for g = [[a, b], [p^d c, dd]]:
    //   a p^{e-m} + b p^{e-n} ≡ p^{e-m}            (mod p^e)
    //   p^d c p^{e-m} + dd p^{e-n} ≡ p^{e-n}       (mod p^e)
    let (sm, sn) = (pow(e - m), pow(e - n));
    let pd = if d >= e { 0 } else { pow(d) };
    let mut top = Vec::new();
    let mut bottom = Vec::new();
    for x in 0..modulus {
        for y in 0..modulus {
            if (x * sm + y * sn) % modulus == sm % modulus {
                top.push((x, y));
            }
            if (pd * x % modulus * sm + y * sn) % modulus == sn % modulus {
                bottom.push((x, y));
            }
        }
    }
    let mut image = std::collections::BTreeSet::new();
    for &(a, b) in &top {
        for &(c, dd) in &bottom {
            let det = (a * dd % modulus + modulus - b * (pd * c % modulus) % modulus) % modulus;
            if modulus == 1 || !det.is_multiple_of(pp) {
                image.insert(det);
            }
        }
    }
    let units: Vec<u64> = (0..modulus).filter(|x| modulus == 1 || x % pp != 0).collect();
    if image.len() == units.len() {
        return Ok(0);
    }
    for c in (1..=e).rev() {
        let pc = pp.pow(c);
        let target: std::collections::BTreeSet<u64> =
            units.iter().copied().filter(|x| (x + pc - 1) % pc == 0 || pc == 1).collect();
        if image == target {
            return Ok(c as i64);
        }
    }
    Err(Error::Internal(format!(
        "determinant image for (d,m,n)=({d},{m},{n}) at p={pp} is not of the form 1 + p^c O"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2() -> Prime {
        Prime::new(2).unwrap()
    }

    fn t(raw: [i64; 6]) -> InvTuple {
        InvTuple::from_canonical(raw).unwrap()
    }

    #[test]
    fn canonicalize_examples() {
        assert_eq!(canonicalize([0, 0, 0, 3, 1, 2]).unwrap().to_array(), [0, 0, 0, 3, 0, 2]);
        assert_eq!(canonicalize([0, 0, 0, 0, 1, 2]).unwrap().to_array(), [0, 0, 0, 0, 2, 0]);
        assert_eq!(canonicalize([0, 0, -1, 2, 1, 0]).unwrap().to_array(), [0, 0, -1, 2, 1, 0]);
        assert_eq!(canonicalize([0, 0, 0, 0, 3, 3]).unwrap().to_array(), [0, 0, 0, 0, 3, 0]);
        assert_eq!(canonicalize([0, 0, 0, 2, 5, 1]).unwrap().to_array(), [0, 0, 0, 2, 5, 0]);
        assert!(canonicalize([0, 0, 0, -1, 0, 0]).is_err());
    }

    #[test]
    fn non_canonical_input_is_rejected() {
        let err = InvTuple::from_canonical([0, 0, 0, 0, 1, 2]).unwrap_err();
        assert!(matches!(err, Error::NotCanonical { canonical: [0, 0, 0, 0, 2, 0], .. }));
    }

    #[test]
    fn conductor_examples() {
        assert_eq!(conductor(InvTuple::ZERO), 0);
        assert_eq!(conductor(t([0, 0, -1, 2, 1, 0])), 1);
        assert_eq!(conductor(t([5, -2, 7, 5, 3, 1])), 2);
        assert_eq!(conductor(t([0, 0, 0, 3, 0, 2])), 0);
    }

    #[test]
    fn identity_pair_has_trivial_invariants() {
        assert_eq!(invariants(&LatticePair::identity(), p2()).unwrap(), InvTuple::ZERO);
        // The template has 1s in the third column when m = n = 0; same lattices.
        assert!(canonical_rep(InvTuple::ZERO, p2()).same_pair(&LatticePair::identity(), p2()));
    }

    #[test]
    fn canonical_rep_shapes() {
        let p = p2();
        let rep = canonical_rep(t([1, 0, 0, 1, 0, 0]), p);
        assert_eq!(*rep.v.mat(), Mat::from_ints([[2, 0, 2], [0, 1, 1], [0, 0, 1]]));
        assert_eq!(*rep.w.mat(), Mat::from_ints([[4, 0], [0, 1]]));

        let rep = canonical_rep(t([0, 0, -1, 2, 1, 0]), p);
        let half = Scalar::new(1.into(), 2.into());
        let mut v = Mat::identity(3);
        v[(0, 2)] = Scalar::one();
        v[(1, 2)] = half.clone();
        assert_eq!(*rep.v.mat(), v);
        assert_eq!(*rep.w.mat(), Mat::diag(vec![Scalar::from_integer(2.into()), half]));
    }

    #[test]
    fn hand_traced_pairs() {
        let p = p2();
        let half = Scalar::new(1.into(), 2.into());
        // Fiber vector (1, 1/p): order 0 in the first coordinate, 1 in the second.
        let mut v = Mat::identity(3);
        v[(0, 2)] = Scalar::one();
        v[(1, 2)] = half.clone();
        let pair = LatticePair::new(v.clone(), Mat::diag(vec![Scalar::from_integer(2.into()), half])).unwrap();
        assert_eq!(invariants(&pair, p).unwrap().to_array(), [0, 0, -1, 2, 1, 0]);
        let pair = LatticePair::new(v, Mat::from_ints([[4, 0], [0, 1]])).unwrap();
        assert_eq!(invariants(&pair, p).unwrap().to_array(), [0, 0, 0, 2, 1, 0]);
    }

    #[test]
    fn unit_diagonal_stabilizes_pairs_with_n_zero() {
        let p = Prime::new(3).unwrap();
        let rep = canonical_rep(t([0, 0, -1, 2, 1, 0]), p);
        // Fiber vector is (1, p^-1) ≡ (0, p^-1); diag(u, 1) fixes it and Λ_W.
        let h = Mat::from_ints([[2, 0], [0, 1]]);
        assert!(rep.act_h(&h).unwrap().same_pair(&rep, p));
    }

    #[test]
    fn projection_of_adapted_lattice() {
        let p = Prime::new(3).unwrap();
        let v = LatticeMatrix::new(Mat::from_ints([[3, 1, 0], [0, 9, 0], [0, 0, 1]])).unwrap();
        let w = project_to_w(&v, p).unwrap();
        assert!(w.same_lattice(&LatticeMatrix::new(Mat::from_ints([[3, 1], [0, 9]])).unwrap(), p));

        let rep = canonical_rep(t([2, -1, 0, 1, 0, 3]), p);
        let w = project_to_w(&rep.v, p).unwrap();
        let expected = LatticeMatrix::new(Mat::diag(vec![p.pow(2), p.pow(0)])).unwrap();
        assert!(w.same_lattice(&expected, p));
    }

    #[test]
    fn stabilizer_oracle_examples() {
        let p3 = Prime::new(3).unwrap();
        assert_eq!(stabilizer_conductor_oracle(2, 1, 1, p3).unwrap(), 0);
        assert_eq!(stabilizer_conductor_oracle(3, 2, 1, p3).unwrap(), 1);
        assert_eq!(stabilizer_conductor_oracle(4, 4, 2, p3).unwrap(), 2);
        assert_eq!(stabilizer_conductor_oracle(4, 2, 1, p3).unwrap(), 1);
        assert_eq!(stabilizer_conductor_oracle(1, 0, 3, p2()).unwrap(), 0);
        assert_eq!(stabilizer_conductor_oracle(4, 4, 2, p2()).unwrap(), 2);
        // n = 0 inside n < m < n + d: diag(1, u) stabilizes (p^-m, 0), so
        // every unit is a determinant.
        assert_eq!(stabilizer_conductor_oracle(3, 2, 0, p3).unwrap(), 0);
        assert_eq!(stabilizer_conductor_oracle(2, 1, 0, p3).unwrap(), 0);
        assert!(matches!(
            stabilizer_conductor_oracle_at(2, 1, 0, p2(), 4),
            Err(Error::Precision { required: 5, .. })
        ));
    }
}
