//! Hom spaces over a monomial Artinian ring and the unitalization of Cartier modules.

use forge::artinian::{f_flat, hom_module, ArtinRing, FinModule};
use forge::crystal::{is_unit, unitalize, StructuredModule, UnitalizeOutcome, DEFAULT_MAX_STEPS};
use forge::duality::dualizing_module;
use forge::{Field, Matrix};

fn main() -> forge::Result<()> {
    let f = Field::base(2, 1)?;
    let ring = ArtinRing::new(&f, vec!["x".into()], vec![vec![2]])?;
    let e = dualizing_module(&ring, 1)?;
    let k = FinModule::residue_field(&ring);
    println!("dim E = {}, unit: {}", e.module.dim(), e.is_unit);
    println!(
        "dim Hom(k, E) = {}",
        hom_module(&k, &e.module.module)?.0.dim()
    );
    println!("dim F^flat(k) = {}", f_flat(&k, 1)?.0.dim());

    let nil = StructuredModule::cartier(
        FinModule::free(&ring),
        Matrix::from_rows(&f, &[vec![0, 0], vec![1, 0]])?,
    )?;
    let sky = StructuredModule::cartier(k, Matrix::identity(&f, 1))?;
    for (name, m) in [("nilpotent", nil), ("residue field", sky)] {
        match unitalize(&m, DEFAULT_MAX_STEPS)? {
            UnitalizeOutcome::Stabilized(u) => println!(
                "{name}: unit {} -> dim {} after {} steps, unit {}, nil-iso {}",
                is_unit(&m)?,
                u.module.dim(),
                u.steps,
                u.is_unit,
                u.certificate.is_nil_isomorphism
            ),
            UnitalizeOutcome::NotStabilized { steps, .. } => {
                println!("{name}: no limit after {steps} steps")
            }
        }
    }
    Ok(())
}
