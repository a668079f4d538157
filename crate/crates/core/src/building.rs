//! Neighbours of a hyperspecial vertex in the building of PGL_3, modelled
//! residually as lines and planes of F_p^3, and the hexagon counts that
//! give the preimage sizes of the canonical retraction.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::dvr::Prime;
use crate::error::{Error, Result};

pub type Vector = [u64; 3];

fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut r, mut base, mut e) = (1u64, a % p, p - 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    r
}

/// Reduced row echelon form of the given rows; zero rows dropped.
fn rref(rows: &[Vector], p: u64) -> Vec<Vector> {
    let mut m: Vec<Vector> = rows.iter().map(|r| r.map(|x| x % p)).collect();
    let mut out_rank = 0;
    for col in 0..3 {
        let Some(piv) = (out_rank..m.len()).find(|&i| m[i][col] != 0) else { continue };
        m.swap(out_rank, piv);
        let inv = inv_mod(m[out_rank][col], p);
        m[out_rank] = m[out_rank].map(|x| x * inv % p);
        for i in 0..m.len() {
            if i != out_rank && m[i][col] != 0 {
                let f = m[i][col];
                let pr = m[out_rank];
                for j in 0..3 {
                    m[i][j] = (m[i][j] + p * p - f * pr[j] % p) % p;
                }
            }
        }
        out_rank += 1;
    }
    m.truncate(out_rank);
    m
}

/// A line or a plane of F_p^3 in reduced echelon form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Subspace {
    p: u64,
    basis: Vec<Vector>,
}

impl Subspace {
    /// Span of `vectors`; the span must be a line or a plane.
    pub fn span(vectors: &[Vector], p: Prime) -> Result<Self> {
        let basis = rref(vectors, p.get());
        match basis.len() {
            1 | 2 => Ok(Subspace { p: p.get(), basis }),
            n => Err(Error::Incidence(format!("span has dimension {n}, expected a line or a plane"))),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_line(&self) -> bool {
        self.dim() == 1
    }

    pub fn is_plane(&self) -> bool {
        self.dim() == 2
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    fn prime(&self) -> Prime {
        Prime::new(self.p).expect("stored prime")
    }

    pub fn contains_vector(&self, v: &Vector) -> bool {
        let mut rows = self.basis.clone();
        rows.push(*v);
        rref(&rows, self.p).len() == self.dim()
    }

    pub fn contains(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains_vector(v))
    }

    /// Dimension of `self + other` inside F_p^3.
    pub fn sum_dim(&self, other: &Subspace) -> usize {
        let rows: Vec<Vector> = self.basis.iter().chain(&other.basis).copied().collect();
        rref(&rows, self.p).len()
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        let rows: Vec<Vector> = self.basis.iter().chain(&other.basis).copied().collect();
        Subspace::span(&rows, self.prime())
    }

    /// Orthogonal complement for the standard pairing. Swaps lines and planes
    /// and reverses inclusion.
    pub fn dual(&self) -> Subspace {
        let p = self.p;
        let kernel: Vec<Vector> = all_vectors(p)
            .filter(|v| self.basis.iter().all(|b| (0..3).map(|i| b[i] * v[i]).sum::<u64>() % p == 0))
            .collect();
        Subspace::span(&kernel, self.prime()).expect("complement of a line or plane")
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.basis.iter().map(|v| format!("({},{},{})", v[0], v[1], v[2])).collect();
        write!(f, "<{}>", rows.join(", "))
    }
}

fn all_vectors(p: u64) -> impl Iterator<Item = Vector> {
    (0..p).flat_map(move |a| (0..p).flat_map(move |b| (0..p).map(move |c| [a, b, c])))
}

/// Projective points of F_p^3, one normalized representative each.
fn projective_points(p: u64) -> Vec<Vector> {
    all_vectors(p)
        .filter(|v| v.iter().find(|&&x| x != 0) == Some(&1))
        .collect()
}

pub fn lines(p: Prime) -> Vec<Subspace> {
    projective_points(p.get()).into_iter().map(|v| Subspace::span(&[v], p).expect("nonzero")).collect()
}

pub fn planes(p: Prime) -> Vec<Subspace> {
    lines(p).iter().map(Subspace::dual).collect()
}

/// All neighbours of the base vertex: lines (odd) followed by planes (even).
pub fn neighbors(p: Prime) -> Vec<Subspace> {
    let mut out = lines(p);
    out.extend(planes(p));
    out
}

/// The chamber `(span(e1), span(e1, e2))`.
pub fn reference_chamber(p: Prime) -> (Subspace, Subspace) {
    let l1 = Subspace::span(&[[1, 0, 0]], p).expect("line");
    let p6 = Subspace::span(&[[1, 0, 0], [0, 1, 0]], p).expect("plane");
    (l1, p6)
}

/// A framing `{L1, L3, L5}` of F_p^3, kept with its labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Hexagon {
    pub l1: Subspace,
    pub l3: Subspace,
    pub l5: Subspace,
}

impl Hexagon {
    pub fn new(l1: Subspace, l3: Subspace, l5: Subspace) -> Result<Self> {
        if !(l1.is_line() && l3.is_line() && l5.is_line()) {
            return Err(Error::Incidence("a framing consists of three lines".into()));
        }
        let rows: Vec<Vector> = [&l1, &l3, &l5].iter().flat_map(|l| l.basis.clone()).collect();
        if rref(&rows, l1.p).len() != 3 {
            return Err(Error::Incidence("framing lines are not in direct sum".into()));
        }
        Ok(Hexagon { l1, l3, l5 })
    }

    /// Vertices in cyclic order `x1, y2, y3, y4, y5, x6`.
    pub fn vertices(&self) -> [Subspace; 6] {
        let s = |a: &Subspace, b: &Subspace| a.sum(b).expect("independent lines span a plane");
        [
            self.l1.clone(),
            s(&self.l1, &self.l3),
            self.l3.clone(),
            s(&self.l3, &self.l5),
            self.l5.clone(),
            s(&self.l5, &self.l1),
        ]
    }

    /// Position (1..=6) of `x` among the vertices.
    pub fn position_of(&self, x: &Subspace) -> Option<u8> {
        self.vertices().iter().position(|v| v == x).map(|i| i as u8 + 1)
    }
}

fn check_chamber(l1: &Subspace, p6: &Subspace) -> Result<()> {
    if !l1.is_line() || !p6.is_plane() {
        return Err(Error::Incidence("chamber needs a line and a plane".into()));
    }
    if !p6.contains(l1) {
        return Err(Error::Incidence(format!("{l1} is not contained in {p6}")));
    }
    Ok(())
}

/// All framings with `L1 = l1` and `L1 + L5 = p6`.
pub fn hexagons_containing_chamber(l1: &Subspace, p6: &Subspace, p: Prime) -> Result<Vec<Hexagon>> {
    check_chamber(l1, p6)?;
    let all = lines(p);
    let mut out = Vec::new();
    for l5 in all.iter().filter(|l| p6.contains(l) && *l != l1) {
        for l3 in all.iter().filter(|l| !p6.contains(l)) {
            out.push(Hexagon::new(l1.clone(), l3.clone(), l5.clone())?);
        }
    }
    Ok(out)
}

/// Type of a neighbour relative to the chamber, read off from incidence.
pub fn neighbor_type(x: &Subspace, l1: &Subspace, p6: &Subspace) -> Result<u8> {
    check_chamber(l1, p6)?;
    Ok(match (x.is_line(), x) {
        (true, x) if x == l1 => 1,
        (true, x) if p6.contains(x) => 5,
        (true, _) => 3,
        (false, x) if x == p6 => 6,
        (false, x) if x.contains(l1) => 2,
        (false, _) => 4,
    })
}

/// Number of hexagons through the chamber that have `x` in position `ty`.
pub fn hexagons_through_neighbor(x: &Subspace, ty: u8, l1: &Subspace, p6: &Subspace, p: Prime) -> Result<usize> {
    if !(2..=5).contains(&ty) {
        return Err(Error::Incidence(format!("type {ty} is not one of 2..5")));
    }
    let actual = neighbor_type(x, l1, p6)?;
    if actual != ty {
        return Err(Error::Incidence(format!("{x} has type {actual}, not {ty}")));
    }
    Ok(hexagons_containing_chamber(l1, p6, p)?
        .iter()
        .filter(|h| h.vertices()[ty as usize - 1] == *x)
        .count())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TypeCount {
    /// Neighbours of this type, by direct enumeration.
    pub neighbors: usize,
    /// Hexagons through the chamber and one fixed neighbour of this type.
    pub hexagons_through: usize,
    /// `total / hexagons_through`.
    pub preimages: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RetractionTable {
    pub p: u64,
    pub total_hexagons: usize,
    pub types: BTreeMap<u8, TypeCount>,
}

impl RetractionTable {
    pub fn preimages(&self) -> BTreeMap<u8, usize> {
        self.types.iter().map(|(t, c)| (*t, c.preimages)).collect()
    }
}

/// Full count table. Each neighbour is typed by where it sits in a hexagon
/// through the chamber; the preimage count of type i is the number of
/// hexagons divided by the number through a fixed type-i neighbour.
pub fn retraction_table(l1: &Subspace, p6: &Subspace, p: Prime) -> Result<RetractionTable> {
    let hexagons = hexagons_containing_chamber(l1, p6, p)?;
    let total = hexagons.len();
    let mut by_type: BTreeMap<u8, Vec<Subspace>> = BTreeMap::new();
    for x in neighbors(p) {
        let ty = hexagons
            .iter()
            .find_map(|h| h.position_of(&x))
            .ok_or_else(|| Error::Incidence(format!("{x} lies on no hexagon through the chamber")))?;
        by_type.entry(ty).or_default().push(x);
    }
    let mut types = BTreeMap::new();
    for (ty, xs) in by_type {
        let through = hexagons.iter().filter(|h| h.vertices()[ty as usize - 1] == xs[0]).count();
        types.insert(ty, TypeCount { neighbors: xs.len(), hexagons_through: through, preimages: total / through });
    }
    Ok(RetractionTable { p: p.get(), total_hexagons: total, types })
}

pub fn retraction_preimage_counts(l1: &Subspace, p6: &Subspace, p: Prime) -> Result<BTreeMap<u8, usize>> {
    Ok(retraction_table(l1, p6, p)?.preimages())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pr(p: u64) -> Prime {
        Prime::new(p).unwrap()
    }

    #[test]
    fn neighbor_counts() {
        assert_eq!(neighbors(pr(2)).len(), 14);
        assert_eq!(neighbors(pr(3)).len(), 26);
        let p = pr(3);
        for l in lines(p) {
            assert_eq!(planes(p).iter().filter(|pl| pl.contains(&l)).count(), 4);
        }
    }

    #[test]
    fn chamber_must_be_incident() {
        let p = pr(2);
        let l = Subspace::span(&[[0, 0, 1]], p).unwrap();
        let (_, p6) = reference_chamber(p);
        assert!(matches!(hexagons_containing_chamber(&l, &p6, p), Err(Error::Incidence(_))));
    }

    #[test]
    fn hexagon_contains_chamber() {
        let p = pr(2);
        let (l1, p6) = reference_chamber(p);
        let hs = hexagons_containing_chamber(&l1, &p6, p).unwrap();
        assert_eq!(hs.len(), 8);
        for h in &hs {
            assert_eq!(h.position_of(&l1), Some(1));
            assert_eq!(h.position_of(&p6), Some(6));
        }
    }

    #[test]
    fn worked_examples() {
        let (l1, p6) = reference_chamber(pr(2));
        let y2 = Subspace::span(&[[1, 0, 0], [0, 0, 1]], pr(2)).unwrap();
        assert_eq!(hexagons_through_neighbor(&y2, 2, &l1, &p6, pr(2)).unwrap(), 4);
        let y3 = Subspace::span(&[[0, 0, 1]], pr(2)).unwrap();
        assert_eq!(hexagons_through_neighbor(&y3, 3, &l1, &p6, pr(2)).unwrap(), 2);
        assert!(hexagons_through_neighbor(&y3, 2, &l1, &p6, pr(2)).is_err());
        let (l1, p6) = reference_chamber(pr(3));
        let y4 = Subspace::span(&[[0, 1, 0], [0, 0, 1]], pr(3)).unwrap();
        assert_eq!(hexagons_through_neighbor(&y4, 4, &l1, &p6, pr(3)).unwrap(), 3);
    }

    #[test]
    fn hexagon_type_agrees_with_incidence() {
        let p = pr(3);
        let (l1, p6) = reference_chamber(p);
        let hs = hexagons_containing_chamber(&l1, &p6, p).unwrap();
        for x in neighbors(p) {
            let from_hex = hs.iter().find_map(|h| h.position_of(&x)).unwrap();
            assert_eq!(from_hex, neighbor_type(&x, &l1, &p6).unwrap());
        }
    }

    #[test]
    fn preimage_counts() {
        for (p, want) in [(2, [1, 2, 4, 4, 2, 1]), (3, [1, 3, 9, 9, 3, 1])] {
            let (l1, p6) = reference_chamber(pr(p));
            let got = retraction_preimage_counts(&l1, &p6, pr(p)).unwrap();
            assert_eq!(got.values().copied().collect::<Vec<_>>(), want);
        }
    }

    #[test]
    fn dual_reverses_incidence() {
        let p = pr(3);
        for l in lines(p) {
            let d = l.dual();
            assert!(d.is_plane());
            assert_eq!(d.dual(), l);
            for pl in planes(p) {
                assert_eq!(pl.contains(&l), d.contains(&pl.dual()));
            }
        }
    }
}
