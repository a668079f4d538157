//! Verification suites shared by the command line and the acceptance tests.
//! Each suite returns one `Check` per property.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::action::{
    act_frobenius, act_generator, coset_reps, cosets_pairwise_distinct, distribution_relation, oracle_act, InvSum,
};
use crate::building::{hexagons_containing_chamber, neighbor_type, neighbors, reference_chamber, retraction_table};
use crate::dvr::Prime;
use crate::error::Result;
use crate::fixtures::{diff_expansion, diff_polynomial, DistrelReport, EntryStatus, Fixtures};
use crate::hecke::{hecke_polynomial, satake, torus_hecke_polynomial, Generator};
use crate::invariants::{conductor, stabilizer_conductor_oracle, InvTuple};

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(suite: &'static str, name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { suite, name: name.into(), passed, detail: detail.into() }
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

pub const SUITES: [&str; 5] = ["satake", "cosets", "retraction", "conductor", "distrel"];

/// Canonical tuples with `k, s, r` in `{-1, 0, 1}` and `d, m, n` in `0..=3`.
pub fn test_grid() -> Vec<InvTuple> {
    let mut out = Vec::new();
    for k in -1..=1 {
        for s in -1..=1 {
            for r in -1..=1 {
                for d in 0..=3 {
                    for m in 0..=3 {
                        for n in 0..=3 {
                            if let Ok(t) = InvTuple::from_canonical([k, s, r, d, m, n]) {
                                out.push(t);
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

pub fn satake_suite(fixtures: &Fixtures) -> Vec<Check> {
    const S: &str = "satake";
    let poly = hecke_polynomial();
    let torus = torus_hecke_polynomial();
    let mut out = Vec::new();
    for (i, c) in poly.coeffs.iter().enumerate() {
        let ok = satake(c) == torus[i];
        out.push(Check::new(S, format!("S(C_{i}) = z^{i} coefficient"), ok, c.to_string()));
    }
    out.push(Check::new(
        S,
        "coefficients have integral q-exponents",
        poly.has_integral_coefficients(),
        "",
    ));
    out.push(Check::new(S, "monic of degree 6", poly.is_monic_sextic(), ""));
    for d in diff_polynomial(&fixtures.polynomial, &poly) {
        if d.agrees {
            out.push(Check::new(S, format!("printed C_{} agrees", d.power), true, ""));
            continue;
        }
        // A printed coefficient may disagree only if the ledger records it and
        // the printed form demonstrably fails the Satake identity.
        let recorded = fixtures.ledger.entries.iter().any(|e| {
            e.status == EntryStatus::Confirmed && e.id.starts_with("hecke-") && e.location.ends_with(&format!("z^{}", d.power))
        });
        let refuted = torus.get(d.power).is_some_and(|t| satake(&d.printed) != *t);
        out.push(Check::new(
            S,
            format!("printed C_{} differs", d.power),
            recorded && refuted,
            format!("printed {} ; computed {}", d.printed, d.computed),
        ));
    }
    out
}

pub fn cosets_suite(p: Prime) -> Result<Vec<Check>> {
    const S: &str = "cosets";
    let q = p.get() as i64;
    let grid = test_grid();
    let mut out = Vec::new();
    for gen in Generator::ALL {
        let reps = coset_reps(gen, p);
        let want = gen.degree().eval_int(q)?;
        out.push(Check::new(
            S,
            format!("{gen} coset count at p={q}"),
            reps.len() as i64 == want && cosets_pairwise_distinct(&reps, p)?,
            format!("{} cosets, expected {want}", reps.len()),
        ));
        let mut mismatches = Vec::new();
        let mut mass_bad = Vec::new();
        for &t in &grid {
            let sym = act_generator(gen, t)?;
            let at_q = nonzero(sym.eval(q)?);
            if at_q != nonzero(oracle_act(gen, t, p)?.eval(q)?) {
                mismatches.push(t.to_string());
            }
            if sym.mass().eval_int(q)? != reps.len() as i64 {
                mass_bad.push(t.to_string());
            }
        }
        out.push(Check::new(
            S,
            format!("{gen} symbolic action = oracle at p={q} on {} tuples", grid.len()),
            mismatches.is_empty(),
            mismatches.join(" "),
        ));
        out.push(Check::new(S, format!("{gen} mass = coset count at p={q}"), mass_bad.is_empty(), mass_bad.join(" ")));
    }
    Ok(out)
}

fn nonzero(m: BTreeMap<InvTuple, i64>) -> BTreeMap<InvTuple, i64> {
    m.into_iter().filter(|(_, c)| *c != 0).collect()
}

pub fn retraction_suite(p: Prime) -> Result<Vec<Check>> {
    const S: &str = "retraction";
    let q = p.get() as usize;
    let (l1, p6) = reference_chamber(p);
    let table = retraction_table(&l1, &p6, p)?;
    let mut out = vec![
        Check::new(S, format!("neighbours at p={q}"), neighbors(p).len() == 2 * (q * q + q + 1), ""),
        Check::new(
            S,
            format!("hexagons through the chamber at p={q}"),
            table.total_hexagons == q * q * q,
            table.total_hexagons.to_string(),
        ),
    ];
    let through_want = BTreeMap::from([(2u8, q * q), (3, q), (4, q), (5, q * q)]);
    for (ty, want) in &through_want {
        let got = table.types.get(ty).map_or(0, |c| c.hexagons_through);
        out.push(Check::new(S, format!("hexagons through a type-{ty} neighbour"), got == *want, got.to_string()));
    }
    let pre_want = [1, q, q * q, q * q, q, 1];
    let pre: Vec<usize> = (1..=6).map(|t| table.types.get(&t).map_or(0, |c| c.preimages)).collect();
    out.push(Check::new(S, format!("preimage counts at p={q}"), pre == pre_want, format!("{pre:?}")));
    let identity = table.types.values().all(|c| c.neighbors * c.hexagons_through == table.total_hexagons);
    out.push(Check::new(S, "neighbours x hexagons through = total", identity, ""));
    // Dual chamber: the complement of P6 is a line inside the complement of l1.
    let (dl, dp) = (p6.dual(), l1.dual());
    let mut swapped = true;
    for x in neighbors(p) {
        let ty = neighbor_type(&x, &l1, &p6)?;
        let dual_ty = neighbor_type(&x.dual(), &dl, &dp)?;
        swapped &= dual_ty == 7 - ty;
    }
    let dual_total = hexagons_containing_chamber(&dl, &dp, p)?.len();
    out.push(Check::new(
        S,
        "duality swaps types 1<->6, 2<->5, 3<->4",
        swapped && dual_total == table.total_hexagons,
        "",
    ));
    Ok(out)
}

/// Conductor formula against the stabilizer oracle for `d, m, n <= 4`.
pub fn conductor_suite(p: Prime) -> Result<Vec<Check>> {
    const S: &str = "conductor";
    let mut bad = Vec::new();
    let mut total = 0;
    for d in 0..=4u32 {
        for m in 0..=4u32 {
            for n in 0..=4u32 {
                let Ok(t) = InvTuple::from_canonical([0, 0, 0, d as i64, m as i64, n as i64]) else { continue };
                total += 1;
                let formula = conductor(t);
                let oracle = stabilizer_conductor_oracle(d, m, n, p)?;
                if formula != oracle {
                    bad.push(format!("(d,m,n)=({d},{m},{n}) formula {formula} oracle {oracle}"));
                }
            }
        }
    }
    Ok(vec![Check::new(
        S,
        format!("formula = stabilizer oracle at p={} on {total} canonical (d,m,n)", p.get()),
        bad.is_empty(),
        bad.join("; "),
    )])
}

pub fn distrel_suite(fixtures: &Fixtures) -> Result<(Vec<Check>, DistrelReport)> {
    const S: &str = "distrel";
    let rel = distribution_relation(InvTuple::ZERO)?;
    let mut out = Vec::new();
    let not_divisible: Vec<String> =
        rel.terms().filter(|(_, c)| !c.divisible_by_q_minus_one()).map(|(t, _)| t.to_string()).collect();
    out.push(Check::new(S, "coefficients divisible by q-1", not_divisible.is_empty(), not_divisible.join(" ")));
    let big: Vec<String> = rel.support().filter(|t| t.conductor() > 1).map(|t| t.to_string()).collect();
    out.push(Check::new(S, "support has conductor 0 or 1", big.is_empty(), big.join(" ")));
    let ones: Vec<InvTuple> = rel.support().filter(|t| t.conductor() == 1).copied().collect();
    let expected = InvTuple::from_canonical([0, 0, -1, 2, 1, 0])?;
    out.push(Check::new(
        S,
        "unique conductor-1 tuple is (0,0,-1,2,1,0)",
        ones == [expected],
        ones.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" "),
    ));
    out.push(Check::new(S, "mass is zero", rel.mass().is_zero(), rel.mass().to_string()));
    let report = diff_expansion(&rel, &fixtures.expansion, &fixtures.ledger)?;
    out.push(Check::new(
        S,
        "printed expansion reproduced after ledger corrections",
        report.matches(),
        format!(
            "{}/{} classes agree; unreproduced printed terms {:?}; printed mass {}",
            report.agreeing_classes(),
            report.rows.len(),
            report.unreproduced_terms,
            report.printed_mass
        ),
    ));
    Ok((out, report))
}

/// Frobenius commutes with every generator on the grid.
pub fn frobenius_commutation(grid: &[InvTuple]) -> Result<Vec<String>> {
    let mut bad = Vec::new();
    for gen in Generator::ALL {
        for &t in grid {
            let lhs = act_generator(gen, act_frobenius(t))?;
            let rhs: InvSum = act_generator(gen, t)?.map_tuples(act_frobenius);
            if lhs != rhs {
                bad.push(format!("{gen} {t}"));
            }
        }
    }
    Ok(bad)
}

pub fn run_suite(name: &str, p: Prime, fixtures: &Fixtures) -> Result<Vec<Check>> {
    Ok(match name {
        "satake" => satake_suite(fixtures),
        "cosets" => cosets_suite(p)?,
        "retraction" => retraction_suite(p)?,
        "conductor" => conductor_suite(p)?,
        "distrel" => distrel_suite(fixtures)?.0,
        "all" => {
            let mut v = Vec::new();
            for s in SUITES {
                v.extend(run_suite(s, p, fixtures)?);
            }
            v
        }
        other => return Err(crate::Error::Parse(format!("unknown suite `{other}`"))),
    })
}
