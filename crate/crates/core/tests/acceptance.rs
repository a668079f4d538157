//! Exit criteria. Runs every criterion, prints one line each, and exits
//! nonzero if any of them fails.

use std::process::ExitCode;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use splitlocal::action::{act_generator, coset_reps};
use splitlocal::dvr::{Mat, Prime, Scalar};
use splitlocal::fixtures::Fixtures;
use splitlocal::hecke::Generator;
use splitlocal::invariants::{canonical_rep, invariants, InvTuple, LatticePair};
use splitlocal::verify::{
    conductor_suite, cosets_suite, distrel_suite, frobenius_commutation, retraction_suite, satake_suite, test_grid,
    Check,
};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn from_checks(checks: Vec<Check>) -> Outcome {
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| if c.detail.is_empty() { c.name.clone() } else { format!("{} ({})", c.name, c.detail) })
        .collect();
    Outcome { passed: failed.is_empty(), detail: format!("{} checks, failing: {}", checks.len(), failed.join("; ")) }
}

fn primes() -> [Prime; 2] {
    [Prime::new(2).unwrap(), Prime::new(3).unwrap()]
}

fn satake_identity() -> Outcome {
    let checks = satake_suite(&Fixtures::embedded())
        .into_iter()
        .filter(|c| c.name.starts_with("S(C_") || c.name.contains("integral"))
        .collect();
    from_checks(checks)
}

fn distribution_relation() -> Outcome {
    from_checks(distrel_suite(&Fixtures::embedded()).unwrap().0)
}

fn oracle_equivalence() -> Outcome {
    let mut checks = Vec::new();
    for p in primes() {
        checks.extend(cosets_suite(p).unwrap());
    }
    from_checks(checks)
}

fn conductor_formula() -> Outcome {
    let mut checks = Vec::new();
    for p in primes() {
        checks.extend(conductor_suite(p).unwrap());
    }
    from_checks(checks)
}

fn random_unimodular(rng: &mut ChaCha8Rng, n: usize, p: Prime) -> Mat {
    loop {
        let mut m = Mat::zero(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = Scalar::from_integer(rng.gen_range(-9i64..10).into());
            }
        }
        if m.is_unimodular(p) {
            return m;
        }
    }
}

fn round_trip_grid() -> Vec<InvTuple> {
    let mut out = Vec::new();
    for k in -2..=2 {
        for s in -2..=2 {
            for r in -2..=2 {
                for d in 0..=4 {
                    for m in 0..=4 {
                        for n in 0..=4 {
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

fn orbit_invariance() -> Outcome {
    let mut failures = Vec::new();
    let grid = round_trip_grid();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for p in primes() {
        for _ in 0..200 {
            let t = grid[rng.gen_range(0..grid.len())];
            let basis_change = (random_unimodular(&mut rng, 3, p), random_unimodular(&mut rng, 2, p));
            let pair = canonical_rep(t, p).right_mul(&basis_change.0, &basis_change.1).unwrap();
            let h = random_unimodular(&mut rng, 2, p);
            let moved = pair.act_h(&h).unwrap();
            if invariants(&moved, p).unwrap() != t {
                failures.push(format!("p={} {t} h={h:?}", p.get()));
            }
            let delta = Mat::diag(vec![Scalar::from_integer(p.get().into()), Scalar::from_integer(1.into())]);
            let shifted = invariants(&pair.act_h(&delta).unwrap(), p).unwrap();
            if shifted != t.with_k(t.k + 1) {
                failures.push(format!("p={} delta shift of {t} gave {shifted}", p.get()));
            }
        }
        for &t in &grid {
            if invariants(&canonical_rep(t, p), p).unwrap() != t {
                failures.push(format!("p={} round trip {t}", p.get()));
            }
        }
        if invariants(&LatticePair::identity(), p).unwrap() != InvTuple::ZERO {
            failures.push("identity pair".into());
        }
    }
    Outcome {
        passed: failures.is_empty(),
        detail: format!("200 random h per prime, {} grid tuples; {}", grid.len(), failures.join("; ")),
    }
}

fn retraction_counts() -> Outcome {
    let mut checks = Vec::new();
    for p in primes() {
        checks.extend(retraction_suite(p).unwrap());
    }
    from_checks(checks)
}

fn commutation_and_mass() -> Outcome {
    let grid = test_grid();
    let mut failures = frobenius_commutation(&grid).unwrap();
    for p in primes() {
        let q = p.get() as i64;
        for gen in Generator::ALL {
            let cosets = coset_reps(gen, p).len() as i64;
            for &t in &grid {
                let mass = act_generator(gen, t).unwrap().mass().eval_int(q).unwrap();
                if mass != cosets {
                    failures.push(format!("mass {gen} {t} at p={q}: {mass}"));
                }
            }
        }
    }
    Outcome { passed: failures.is_empty(), detail: failures.join("; ") }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("1 Satake identity", satake_identity),
        ("2 distribution relation", distribution_relation),
        ("3 oracle equivalence", oracle_equivalence),
        ("4 conductor formula", conductor_formula),
        ("5 orbit invariance", orbit_invariance),
        ("6 retraction counts", retraction_counts),
        ("7 Frobenius commutation and mass", commutation_and_mass),
    ];
    let mut all = true;
    for (name, run) in criteria {
        let o = run();
        all &= o.passed;
        if o.passed {
            println!("PASS criterion {name}");
        } else {
            println!("FAIL criterion {name}: {}", o.detail);
        }
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
