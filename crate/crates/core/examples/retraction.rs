//! Counts hexagons around a vertex of the PGL_3 building and the preimage
//! sizes of the canonical retraction onto a fixed apartment.

use splitlocal::building::{hexagons_containing_chamber, reference_chamber, retraction_table};
use splitlocal::dvr::Prime;

fn main() -> splitlocal::Result<()> {
    for p in [2, 3, 5] {
        let p = Prime::new(p)?;
        let (l1, p6) = reference_chamber(p);
        let table = retraction_table(&l1, &p6, p)?;
        println!("p = {}: {} hexagons through the chamber {l1} < {p6}", p.get(), table.total_hexagons);
        for (ty, c) in &table.types {
            println!(
                "  type {ty}: {:>3} neighbours, {:>3} hexagons through each, {:>3} preimages",
                c.neighbors, c.hexagons_through, c.preimages
            );
        }
    }
    let p = Prime::new(2)?;
    let (l1, p6) = reference_chamber(p);
    let h = &hexagons_containing_chamber(&l1, &p6, p)?[0];
    let names: Vec<String> = h.vertices().iter().map(|v| v.to_string()).collect();
    println!("one hexagon at p = 2: {}", names.join(" - "));
    Ok(())
}
