//! The module `Z[Inv]` of formal sums of invariants, the action of the Hecke
//! generators and of Frobenius on it, and the distribution relation.
//!
//! Every action is available twice: symbolically in `q` (`act_generator`)
//! and concretely at `q = p` by enumerating single cosets and recomputing
//! invariants (`oracle_act`). The second is the reference for the first.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dvr::{Mat, Prime};
use crate::error::{Error, Result};
use crate::hecke::{Generator, HeckeElement, HeckePolynomial};
use crate::invariants::{canonical_rep, invariants, InvTuple, LatticePair};
use crate::qpoly::QPoly;

/// A finite formal sum `sum c_t [t]` with `QPoly` coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InvSum {
    terms: BTreeMap<InvTuple, QPoly>,
}

impl InvSum {
    pub fn zero() -> Self {
        InvSum::default()
    }

    pub fn single(t: InvTuple) -> Self {
        let mut s = InvSum::zero();
        s.add_term(t, &QPoly::one());
        s
    }

    pub fn add_term(&mut self, t: InvTuple, c: &QPoly) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(t).or_default();
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&t);
        }
    }

    pub fn add(&mut self, other: &InvSum) {
        for (t, c) in &other.terms {
            self.add_term(*t, c);
        }
    }

    pub fn scale(&self, c: &QPoly) -> InvSum {
        let mut out = InvSum::zero();
        for (t, v) in &self.terms {
            out.add_term(*t, &(v * c));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&InvTuple, &QPoly)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, t: &InvTuple) -> QPoly {
        self.terms.get(t).cloned().unwrap_or_default()
    }

    pub fn support(&self) -> impl Iterator<Item = &InvTuple> {
        self.terms.keys()
    }

    /// Sum of all coefficients.
    pub fn mass(&self) -> QPoly {
        self.terms.values().fold(QPoly::zero(), |a, b| &a + b)
    }

    /// Integer multiset obtained by setting `q = p`; zero entries dropped.
    pub fn eval(&self, q: i64) -> Result<BTreeMap<InvTuple, i64>> {
        let mut out = BTreeMap::new();
        for (t, c) in &self.terms {
            let v = c.eval_int(q)?;
            if v != 0 {
                out.insert(*t, v);
            }
        }
        Ok(out)
    }

    pub fn map_tuples(&self, f: impl Fn(InvTuple) -> InvTuple) -> InvSum {
        let mut out = InvSum::zero();
        for (t, c) in &self.terms {
            out.add_term(f(*t), c);
        }
        out
    }
}

impl FromIterator<(InvTuple, QPoly)> for InvSum {
    fn from_iter<I: IntoIterator<Item = (InvTuple, QPoly)>>(iter: I) -> Self {
        let mut out = InvSum::zero();
        for (t, c) in iter {
            out.add_term(t, &c);
        }
        out
    }
}

impl fmt::Display for InvSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (t, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{t}  {c}")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct InvSumEntry {
    inv: InvTuple,
    coeff: QPoly,
}

/// JSON form: a list of `{"inv": [...], "coeff": {...}}` sorted by tuple.
impl Serialize for InvSum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<InvSumEntry> =
            self.terms.iter().map(|(t, c)| InvSumEntry { inv: *t, coeff: c.clone() }).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for InvSum {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<InvSumEntry> = Vec::deserialize(d)?;
        Ok(v.into_iter().map(|e| (e.inv, e.coeff)).collect())
    }
}

/// The Frobenius element `(diag(p^-1, 1, 1), diag(p^-1, 1))`.
pub fn frobenius_element(p: Prime) -> Mat {
    Mat::diag(vec![p.pow(-1), p.pow(0)])
}

pub fn act_frobenius(t: InvTuple) -> InvTuple {
    t.with_k(t.k - 1)
}

pub fn act_frobenius_sum(x: &InvSum) -> InvSum {
    x.map_tuples(act_frobenius)
}

/// One family of single cosets inside a double coset, parametrized by
/// `arity` residues mod `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CosetFamily {
    pub gen: Generator,
    pub name: &'static str,
    pub arity: usize,
}

impl CosetFamily {
    /// The group element `(g_V, g_W)` for residue lifts `params`.
    pub fn element(&self, params: &[i64], p: Prime) -> (Mat, Mat) {
        assert_eq!(params.len(), self.arity);
        let pi = p.get() as i64;
        let i3 = Mat::identity(3);
        let i2 = Mat::identity(2);
        match (self.gen, self.name) {
            (Generator::G1, "ab") => (Mat::from_ints([[pi, params[0], params[1]], [0, 1, 0], [0, 0, 1]]), i2),
            (Generator::G1, "c") => (Mat::from_ints([[1, 0, 0], [0, pi, params[0]], [0, 0, 1]]), i2),
            (Generator::G1, "pt") => (Mat::from_ints([[1, 0, 0], [0, 1, 0], [0, 0, pi]]), i2),
            (Generator::G2, "ab") => (Mat::from_ints([[pi, 0, params[0]], [0, pi, params[1]], [0, 0, 1]]), i2),
            (Generator::G2, "c") => (Mat::from_ints([[pi, params[0], 0], [0, 1, 0], [0, 0, pi]]), i2),
            (Generator::G2, "pt") => (Mat::from_ints([[1, 0, 0], [0, pi, 0], [0, 0, pi]]), i2),
            (Generator::G3, "pt") => (i3.scale(&p.as_scalar()), i2),
            (Generator::H1, "a") => (i3, Mat::from_ints([[pi, params[0]], [0, 1]])),
            (Generator::H1, "pt") => (i3, Mat::from_ints([[1, 0], [0, pi]])),
            (Generator::H2, "pt") => (i3, i2.scale(&p.as_scalar())),
            _ => unreachable!("unknown coset family {}/{}", self.gen, self.name),
        }
    }

    /// Number of cosets in the family, as a polynomial in `q`.
    pub fn size(&self) -> QPoly {
        QPoly::monomial(1, self.arity as i32)
    }
}

pub fn coset_families(gen: Generator) -> Vec<CosetFamily> {
    let fam = |name, arity| CosetFamily { gen, name, arity };
    match gen {
        Generator::G1 | Generator::G2 => vec![fam("ab", 2), fam("c", 1), fam("pt", 0)],
        Generator::G3 | Generator::H2 => vec![fam("pt", 0)],
        Generator::H1 => vec![fam("a", 1), fam("pt", 0)],
    }
}

/// A single coset `g K` of a generator's double coset.
#[derive(Clone, Debug)]
pub struct CosetRep {
    pub family: CosetFamily,
    pub params: Vec<i64>,
    pub gv: Mat,
    pub gw: Mat,
}

fn residue_tuples(arity: usize, p: i64) -> Vec<Vec<i64>> {
    (0..arity).fold(vec![vec![]], |acc, _| {
        acc.into_iter()
            .flat_map(|v| {
                (0..p).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect()
    })
}

/// All single cosets of the double coset of `gen`, with lifts in `0..p`.
pub fn coset_reps(gen: Generator, p: Prime) -> Vec<CosetRep> {
    let mut out = Vec::new();
    for family in coset_families(gen) {
        for params in residue_tuples(family.arity, p.get() as i64) {
            let (gv, gw) = family.element(&params, p);
            out.push(CosetRep { family, params, gv, gw });
        }
    }
    out
}

/// True if no two representatives define the same coset, i.e. `g_i^-1 g_j`
/// is never in `GL_3(O) x GL_2(O)`.
pub fn cosets_pairwise_distinct(reps: &[CosetRep], p: Prime) -> Result<bool> {
    let inverses: Vec<(Mat, Mat)> =
        reps.iter().map(|r| Ok((r.gv.inverse()?, r.gw.inverse()?))).collect::<Result<_>>()?;
    for i in 0..reps.len() {
        for j in i + 1..reps.len() {
            let v = &inverses[i].0 * &reps[j].gv;
            let w = &inverses[i].1 * &reps[j].gw;
            if v.is_unimodular(p) && w.is_unimodular(p) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Invariants of `b g K` for each coset `g K`, where `b K` is the canonical
/// representative of `t`.
pub fn oracle_images(gen: Generator, t: InvTuple, p: Prime) -> Result<Vec<(CosetRep, InvTuple)>> {
    let base = canonical_rep(t, p);
    coset_reps(gen, p)
        .into_iter()
        .map(|rep| {
            let pair = base.right_mul(&rep.gv, &rep.gw)?;
            let inv = invariants(&pair, p)?;
            Ok((rep, inv))
        })
        .collect()
}

/// The action of `gen` on `[t]`, computed by coset enumeration at `q = p`.
pub fn oracle_act(gen: Generator, t: InvTuple, p: Prime) -> Result<InvSum> {
    Ok(oracle_images(gen, t, p)?.into_iter().map(|(_, inv)| (inv, QPoly::one())).collect())
}

fn q() -> QPoly {
    QPoly::q()
}

fn q_minus(c: i64) -> QPoly {
    QPoly::from_terms([(1, 1), (0, -c)])
}

/// Residues `x` with one distinguished value: `(1, q - 1)` split when the
/// condition can fire, otherwise all `q` residues agree.
fn split_on_residue(fires: bool) -> Vec<(QPoly, bool)> {
    if fires {
        vec![(QPoly::one(), true), (q_minus(1), false)]
    } else {
        vec![(q(), false)]
    }
}

/// Raw (not yet canonical) images of `t` under one coset family, with the
/// number of residue parameters producing each image.
fn family_images(family: &CosetFamily, t: InvTuple) -> Vec<(QPoly, [i64; 6])> {
    let InvTuple { k, s, r, d, m, n } = t;
    let dec = |x: i64| (x - 1).max(0);
    let mut out = Vec::new();
    match (family.gen, family.name) {
        (Generator::G1, "ab") => {
            // a = 0: the fiber coordinate of order n picks up a factor p^-1
            // unless n = 0 and b = -1.
            for (c, special) in split_on_residue(n == 0) {
                let n2 = if special { 0 } else { n + 1 };
                let img = if d > 0 { [k + 1, s, r, d - 1, m, n2] } else { [k + 1, s, r - 1, 1, n2, m] };
                out.push((c, img));
            }
            // a != 0.
            if m == 0 && n == 0 {
                out.push((q_minus(1), [k + 1, s, r - 1, d + 1, 0, 0]));
                out.push((q_minus(1).pow(2), [k + 1, s, r - 1, d + 1, 1, 0]));
            } else {
                out.push((&q() * &q_minus(1), [k + 1, s, r - 1, d + 1, m.max(n) + 1, n]));
            }
        }
        (Generator::G1, "c") => {
            for (c, special) in split_on_residue(m == 0) {
                let m2 = if special { 0 } else { m + 1 };
                out.push((c, [k + 1, s, r - 1, d + 1, m2, n]));
            }
        }
        (Generator::G1, "pt") => out.push((QPoly::one(), [k - 2, s + 1, r + 1, d, dec(m), dec(n)])),
        (Generator::G2, "ab") => {
            for (cb, sb) in split_on_residue(m == 0) {
                for (ca, sa) in split_on_residue(n == 0) {
                    let m2 = if sb { 0 } else { m + 1 };
                    let n2 = if sa { 0 } else { n + 1 };
                    out.push((&ca * &cb, [k + 2, s, r - 1, d, m2, n2]));
                }
            }
        }
        (Generator::G2, "c") => {
            let zero = if d > 0 { [k - 1, s + 1, r + 1, d - 1, dec(m), n] } else { [k - 1, s + 1, r, 1, n, dec(m)] };
            out.push((QPoly::one(), zero));
            out.push((q_minus(1), [k - 1, s + 1, r, d + 1, m.max(n), dec(n)]));
        }
        (Generator::G2, "pt") => out.push((QPoly::one(), [k - 1, s + 1, r, d + 1, m, dec(n)])),
        (Generator::G3, "pt") => out.push((QPoly::one(), [k, s + 1, r, d, m, n])),
        (Generator::H1, "a") => {
            out.push((QPoly::one(), [k, s, r, d + 1, m, n]));
            out.push((q_minus(1), [k, s, r, d + 1, m, n.max(m - d)]));
        }
        (Generator::H1, "pt") => {
            let img = if d > 0 { [k, s, r + 1, d - 1, m, n] } else { [k, s, r, 1, n, m] };
            out.push((QPoly::one(), img));
        }
        (Generator::H2, "pt") => out.push((QPoly::one(), [k, s, r + 1, d, m, n])),
        _ => unreachable!("unknown coset family {}/{}", family.gen, family.name),
    }
    out
}

/// The action of one coset family on `[t]`, symbolically in `q`.
pub fn act_family(family: &CosetFamily, t: InvTuple) -> Result<InvSum> {
    let mut out = InvSum::zero();
    for (c, raw) in family_images(family, t) {
        out.add_term(InvTuple::new(raw)?, &c);
    }
    Ok(out)
}

/// The action of a Hecke generator on `[t]`, symbolically in `q`.
pub fn act_generator(gen: Generator, t: InvTuple) -> Result<InvSum> {
    InvTuple::from_canonical(t.to_array())?;
    let mut out = InvSum::zero();
    for family in coset_families(gen) {
        out.add(&act_family(&family, t)?);
    }
    Ok(out)
}

/// Applies a generator to every term of a sum.
pub fn act_generator_sum(gen: Generator, x: &InvSum) -> Result<InvSum> {
    let mut out = InvSum::zero();
    for (t, c) in x.terms() {
        out.add(&act_generator(gen, *t)?.scale(c));
    }
    Ok(out)
}

/// Applies a Hecke element. Negative powers of the central generators act
/// by the inverse shift.
pub fn act_hecke(h: &HeckeElement, x: &InvSum) -> Result<InvSum> {
    let mut out = InvSum::zero();
    for (exp, c) in h.terms() {
        let mut y = x.scale(c);
        for gen in [Generator::G1, Generator::G2, Generator::H1] {
            for _ in 0..exp[gen.slot()] {
                y = act_generator_sum(gen, &y)?;
            }
        }
        let (ds, dr) = (exp[Generator::G3.slot()] as i64, exp[Generator::H2.slot()] as i64);
        y = y.map_tuples(|t| InvTuple { s: t.s + ds, r: t.r + dr, ..t });
        out.add(&y);
    }
    Ok(out)
}

/// Oracle counterpart of `act_hecke` at `q = p`: generator powers act by
/// coset enumeration, coefficients are evaluated at `p`.
pub fn oracle_act_hecke(h: &HeckeElement, x: &InvSum, p: Prime) -> Result<BTreeMap<InvTuple, i64>> {
    let q = p.get() as i64;
    let mut out: BTreeMap<InvTuple, i64> = BTreeMap::new();
    for (exp, c) in h.terms() {
        let mut y = x.scale(c).eval(q)?;
        for gen in [Generator::G1, Generator::G2, Generator::H1] {
            for _ in 0..exp[gen.slot()] {
                let mut next: BTreeMap<InvTuple, i64> = BTreeMap::new();
                for (t, m) in &y {
                    for (_, u) in oracle_images(gen, *t, p)? {
                        *next.entry(u).or_insert(0) += m;
                    }
                }
                y = next;
            }
        }
        let (ds, dr) = (exp[Generator::G3.slot()] as i64, exp[Generator::H2.slot()] as i64);
        for (t, m) in y {
            *out.entry(InvTuple { s: t.s + ds, r: t.r + dr, ..t }).or_insert(0) += m;
        }
    }
    out.retain(|_, c| *c != 0);
    Ok(out)
}

/// `H(Fr) [nu0] = sum_i C_i Fr^i [nu0]`, with `C_i` the coefficient of `z^i`.
pub fn apply_polynomial_at_frobenius(poly: &HeckePolynomial, nu0: InvTuple) -> Result<InvSum> {
    let c = nu0.conductor();
    if c != 0 {
        return Err(Error::NonzeroConductor(c));
    }
    let mut out = InvSum::zero();
    let mut nu = nu0;
    for coeff in &poly.coeffs {
        out.add(&act_hecke(coeff, &InvSum::single(nu))?);
        nu = act_frobenius(nu);
    }
    Ok(out)
}

/// The distribution relation `H_w(Fr) [nu0]` for the Hecke polynomial.
pub fn distribution_relation(nu0: InvTuple) -> Result<InvSum> {
    apply_polynomial_at_frobenius(&crate::hecke::hecke_polynomial(), nu0)
}

/// Applies `h_Fr` to a lattice pair.
pub fn frobenius_pair(pair: &LatticePair, p: Prime) -> Result<LatticePair> {
    pair.act_h(&frobenius_element(p))
}
