use std::collections::BTreeMap;

use splitlocal::action::{act_generator, act_hecke, oracle_act, oracle_act_hecke, InvSum};
use splitlocal::dvr::Prime;
use splitlocal::hecke::{Generator, HeckeElement};
use splitlocal::invariants::InvTuple;
use splitlocal::qpoly::QPoly;

fn t(raw: [i64; 6]) -> InvTuple {
    InvTuple::from_canonical(raw).unwrap()
}

fn p(x: u64) -> Prime {
    Prime::new(x).unwrap()
}

#[test]
fn g1_on_origin_at_two() {
    let img = oracle_act(Generator::G1, InvTuple::ZERO, p(2)).unwrap().eval(2).unwrap();
    let want = BTreeMap::from([
        (t([-2, 1, 1, 0, 0, 0]), 1),
        (t([1, 0, -1, 1, 0, 0]), 3),
        (t([1, 0, -1, 1, 1, 0]), 3),
    ]);
    assert_eq!(img, want);
    let sym = act_generator(Generator::G1, InvTuple::ZERO).unwrap();
    assert_eq!(sym.eval(2).unwrap(), want);
    assert_eq!(sym.mass().eval_int(2).unwrap(), 7);
}

#[test]
fn central_generators() {
    for p in [2, 3, 5] {
        for x in [InvTuple::ZERO, t([2, -1, 3, 3, 2, 1])] {
            let g3 = oracle_act(Generator::G3, x, Prime::new(p).unwrap()).unwrap();
            assert_eq!(g3, InvSum::single(InvTuple { s: x.s + 1, ..x }));
            let h2 = oracle_act(Generator::H2, x, Prime::new(p).unwrap()).unwrap();
            assert_eq!(h2, InvSum::single(InvTuple { r: x.r + 1, ..x }));
        }
    }
}

#[test]
fn identity_acts_trivially() {
    let x = InvSum::single(t([0, 0, 0, 3, 2, 1]));
    assert_eq!(act_hecke(&HeckeElement::one(), &x).unwrap(), x);
}

#[test]
fn central_product_on_origin() {
    let h = &HeckeElement::generator(Generator::G3) * &HeckeElement::generator(Generator::H2);
    let y = act_hecke(&h, &InvSum::single(InvTuple::ZERO)).unwrap();
    assert_eq!(y, InvSum::single(t([0, 1, 1, 0, 0, 0])));
}

#[test]
fn generators_commute_under_the_oracle() {
    let x = InvSum::single(InvTuple::ZERO);
    let g = HeckeElement::generator(Generator::G1);
    let h = HeckeElement::generator(Generator::H1);
    let gh = oracle_act_hecke(&g, &x, p(2)).unwrap();
    let gh = oracle_act_hecke(&h, &InvSum::from_iter(gh.into_iter().map(|(t, c)| (t, QPoly::constant(c)))), p(2)).unwrap();
    let hg = oracle_act_hecke(&h, &x, p(2)).unwrap();
    let hg = oracle_act_hecke(&g, &InvSum::from_iter(hg.into_iter().map(|(t, c)| (t, QPoly::constant(c)))), p(2)).unwrap();
    assert_eq!(gh, hg);
    let sym = act_hecke(&(&g * &h), &x).unwrap().eval(2).unwrap();
    assert_eq!(sym.into_iter().filter(|(_, c)| *c != 0).collect::<BTreeMap<_, _>>(), gh);
}

#[test]
fn products_of_generators_match_oracle() {
    let monomials = [
        [1, 1, 0, 0, 0],
        [0, 2, -1, 1, 0],
        [1, 0, 0, 2, -2],
        [0, 1, 0, 1, 1],
    ];
    for e in monomials {
        let h = HeckeElement::monomial(e, QPoly::one()).unwrap();
        for x in [InvTuple::ZERO, t([0, 0, 0, 2, 1, 0]), t([1, 0, 0, 3, 0, 2])] {
            let sym = act_hecke(&h, &InvSum::single(x)).unwrap();
            for q in [2u64, 3] {
                let got: BTreeMap<_, _> =
                    sym.eval(q as i64).unwrap().into_iter().filter(|(_, c)| *c != 0).collect();
                assert_eq!(got, oracle_act_hecke(&h, &InvSum::single(x), p(q)).unwrap(), "{e:?} on {x} at {q}");
            }
        }
    }
}

#[test]
fn symbolic_rules_hold_at_five() {
    for d in 0..=3 {
        for m in 0..=3 {
            for n in 0..=3 {
                let Ok(x) = InvTuple::from_canonical([0, 0, 0, d, m, n]) else { continue };
                for gen in [Generator::G1, Generator::G2, Generator::H1] {
                    let sym: BTreeMap<_, _> = act_generator(gen, x)
                        .unwrap()
                        .eval(5)
                        .unwrap()
                        .into_iter()
                        .filter(|(_, c)| *c != 0)
                        .collect();
                    assert_eq!(sym, oracle_act(gen, x, p(5)).unwrap().eval(5).unwrap(), "{gen} on {x}");
                }
            }
        }
    }
}
