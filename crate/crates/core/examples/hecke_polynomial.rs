//! Prints the Hecke polynomial coefficient by coefficient, together with the
//! Satake image of each coefficient.

use splitlocal::hecke::{hecke_polynomial, satake, torus_hecke_polynomial};

fn main() {
    let hp = hecke_polynomial();
    let torus = torus_hecke_polynomial();
    for i in (0..7).rev() {
        let c = hp.coefficient(i);
        println!("z^{i}: {c}");
        let ok = satake(c) == torus[i];
        println!("      satake matches torus coefficient: {ok}");
    }
}
