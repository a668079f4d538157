//! Tabulates the conductor formula against the brute-force stabilizer
//! computation for small (d, m, n).

use splitlocal::dvr::Prime;
use splitlocal::invariants::{stabilizer_conductor_oracle, InvTuple};

fn main() -> splitlocal::Result<()> {
    let p: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let prime = Prime::new(p)?;
    println!(" d  m  n | formula  stabilizer");
    for d in 0..=4u32 {
        for m in 0..=4u32 {
            for n in 0..=4u32 {
                let Ok(t) = InvTuple::from_canonical([0, 0, 0, d as i64, m as i64, n as i64]) else { continue };
                let oracle = stabilizer_conductor_oracle(d, m, n, prime)?;
                let mark = if oracle == t.conductor() { "" } else { "  <-" };
                println!("{d:>2} {m:>2} {n:>2} | {:>7}  {oracle:>10}{mark}", t.conductor());
            }
        }
    }
    Ok(())
}
