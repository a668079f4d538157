use std::collections::BTreeMap;

use splitlocal::action::{act_frobenius, distribution_relation, oracle_act, InvSum};
use splitlocal::dvr::Prime;
use splitlocal::hecke::{hecke_polynomial, Generator};
use splitlocal::invariants::InvTuple;

type Multiset = BTreeMap<InvTuple, i64>;

fn add_into(acc: &mut Multiset, t: InvTuple, c: i64) {
    let e = acc.entry(t).or_insert(0);
    *e += c;
    if *e == 0 {
        acc.remove(&t);
    }
}

fn oracle_step(gen: Generator, x: &Multiset, p: Prime) -> Multiset {
    let mut out = Multiset::new();
    for (t, c) in x {
        let img: InvSum = oracle_act(gen, *t, p).unwrap();
        for (u, m) in img.eval(p.get() as i64).unwrap() {
            add_into(&mut out, u, c * m);
        }
    }
    out
}

// H(Fr)[0] evaluated at q = p using coset enumeration only.
fn oracle_relation(p: Prime) -> Multiset {
    let poly = hecke_polynomial();
    let mut out = Multiset::new();
    let mut nu = InvTuple::ZERO;
    for coeff in &poly.coeffs {
        for (exp, c) in coeff.terms() {
            let c = c.eval_int(p.get() as i64).unwrap();
            let mut x = Multiset::from([(nu, c)]);
            // reverse order from the symbolic side on purpose
            for gen in [Generator::H1, Generator::G2, Generator::G1] {
                for _ in 0..exp[gen.slot()] {
                    x = oracle_step(gen, &x, p);
                }
            }
            let (ds, dr) = (exp[Generator::G3.slot()] as i64, exp[Generator::H2.slot()] as i64);
            for (t, m) in x {
                add_into(&mut out, InvTuple { s: t.s + ds, r: t.r + dr, ..t }, m);
            }
        }
        nu = act_frobenius(nu);
    }
    out
}

#[test]
fn distribution_relation_matches_oracle() {
    let symbolic = distribution_relation(InvTuple::ZERO).unwrap();
    for p in [2, 3] {
        let p = Prime::new(p).unwrap();
        let expected: Multiset =
            symbolic.eval(p.get() as i64).unwrap().into_iter().filter(|(_, c)| *c != 0).collect();
        assert_eq!(oracle_relation(p), expected, "p = {}", p.get() as i64);
    }
}

#[test]
fn distribution_relation_is_divisible_and_massless() {
    let rel = distribution_relation(InvTuple::ZERO).unwrap();
    assert!(rel.mass().is_zero());
    for (_, c) in rel.terms() {
        assert!(c.divisible_by_q_minus_one(), "{c}");
    }
}
