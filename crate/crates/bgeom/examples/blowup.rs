//! Blow up the plane at a point of a line and decompose piL + E.

use bgeom::lattice::{build_model, BaseSurface, BlowupCenter};
use bgeom::positivity::{volume, zariski};
use bgeom::rat::{format_rat, rint};

fn main() -> Result<(), bgeom::Error> {
    let model = build_model(BaseSurface::p2(), vec![BlowupCenter::on(&[("L", 1)])])?;
    let d = model.divisor_i64(&[1, 1])?; // piL + E
    let z = zariski(&model, &d)?;
    assert_eq!(z.support, vec!["E1".to_string()]);
    assert_eq!(volume(&model, &d)?, rint(1));

    println!("D = piL + E on the blown-up plane");
    println!(
        "P = {:?}, N = {:?}",
        z.p.coeffs().iter().map(format_rat).collect::<Vec<_>>(),
        z.n.coeffs().iter().map(format_rat).collect::<Vec<_>>(),
    );
    println!("vol(D) = {}", format_rat(&volume(&model, &d)?));
    Ok(())
}
