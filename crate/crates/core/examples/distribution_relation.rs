//! The distribution relation for the trivial tuple, and its comparison with
//! the checked-in printed expansion.

use splitlocal::action::distribution_relation;
use splitlocal::fixtures::{diff_expansion, Fixtures};
use splitlocal::invariants::InvTuple;

fn main() -> splitlocal::Result<()> {
    let rel = distribution_relation(InvTuple::ZERO)?;
    for (t, c) in rel.terms() {
        let quotient = c.div_q_minus_one().expect("divisible by q - 1");
        println!("{t}  c={}  (q - 1)({quotient})", t.conductor());
    }
    println!("mass: {}", rel.mass());

    let fx = Fixtures::embedded();
    let report = diff_expansion(&rel, &fx.expansion, &fx.ledger)?;
    println!(
        "\nprinted expansion: {}/{} classes agree, printed mass {}",
        report.agreeing_classes(),
        report.rows.len(),
        report.printed_mass
    );
    for row in report.rows.iter().filter(|r| !r.agrees) {
        println!("  {:?}: computed {} printed {}", row.class, row.computed, row.printed);
    }
    Ok(())
}
