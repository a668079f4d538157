//! Applies each generator of the spherical Hecke algebra to an invariant
//! tuple symbolically, then checks the result at q = p by enumerating the
//! coset representatives.

use splitlocal::action::{act_generator, coset_reps, oracle_images};
use splitlocal::dvr::Prime;
use splitlocal::hecke::Generator;
use splitlocal::invariants::InvTuple;

fn main() -> splitlocal::Result<()> {
    let t: InvTuple = std::env::args().nth(1).unwrap_or_else(|| "(0,0,0,2,1,0)".into()).parse()?;
    let p = Prime::new(2)?;
    for gen in Generator::ALL {
        let sym = act_generator(gen, t)?;
        println!("{gen} {t} =\n{sym}");
        let images = oracle_images(gen, t, p)?;
        for (rep, image) in images.iter().take(4) {
            println!("    coset {:<4} {:?} -> {image}", rep.family.name, rep.params);
        }
        if images.len() > 4 {
            println!("    ... {} cosets in total", coset_reps(gen, p).len());
        }
    }
    Ok(())
}
