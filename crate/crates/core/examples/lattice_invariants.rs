//! Computes orbit invariants of a few lattice pairs, checks that moving a
//! pair by a random element of GL_2(Z_(p)) does not change them, and
//! rebuilds each pair from its invariants.

use splitlocal::dvr::{Mat, Prime, Scalar};
use splitlocal::invariants::{canonical_rep, invariants, raw_invariants, InvTuple, LatticePair};

fn q(n: i64, d: i64) -> Scalar {
    Scalar::new(n.into(), d.into())
}

fn main() -> splitlocal::Result<()> {
    let p = Prime::new(3)?;

    let v = Mat::from_rows(vec![
        vec![q(9, 1), q(1, 1), q(2, 1)],
        vec![q(0, 1), q(3, 1), q(1, 3)],
        vec![q(0, 1), q(0, 1), q(1, 1)],
    ])?;
    let w = Mat::from_rows(vec![vec![q(27, 1), q(0, 1)], vec![q(0, 1), q(1, 1)]])?;
    let pair = LatticePair::new(v, w)?;
    let raw = raw_invariants(&pair, p)?;
    let t = invariants(&pair, p)?;
    println!("raw invariants: {raw:?}");
    println!("canonical:      {t}   conductor {}", t.conductor());

    let h = Mat::from_ints([[2, 1], [7, 4]]);
    let moved = pair.act_h(&h)?;
    println!("after h = {h:?}: {}", invariants(&moved, p)?);

    let delta = Mat::from_ints([[3, 0], [0, 1]]);
    println!("after diag(p, 1): {}", invariants(&pair.act_h(&delta)?, p)?);

    for raw in [[0, 0, -1, 2, 1, 0], [1, 0, 0, 1, 0, 0], [-2, 1, 3, 4, 3, 1]] {
        let t = InvTuple::from_canonical(raw)?;
        let rep = canonical_rep(t, p);
        println!("{t}: V = {:?}, W = {:?} -> {}", rep.v.mat(), rep.w.mat(), invariants(&rep, p)?);
    }
    Ok(())
}
