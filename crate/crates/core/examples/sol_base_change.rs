//! Solutions of the Frobenius on `F_q[x]/(x³)` and their behaviour under extension.

use forge::artinian::{ArtinRing, FinModule};
use forge::crystal::StructuredModule;
use forge::duality::{sol_base_change_check, sol_point};
use forge::{Field, FieldSpec};

fn main() -> forge::Result<()> {
    for (p, r) in [(2, 1), (2, 2), (3, 1)] {
        let f = Field::new(FieldSpec::new(p, r, 1))?;
        let ring = ArtinRing::new(&f, vec!["x".into()], vec![vec![3]])?;
        let m = StructuredModule::frobenius(FinModule::free(&ring), ring.frobenius_op(1))?;
        for s in 1..=3 {
            let sol = sol_point(&m, s)?;
            let bc = sol_base_change_check(&m, s)?;
            println!(
                "q = {}, s = {s}: Sol dim {} (geometric {}), base change agrees {}",
                f.q(),
                sol.arithmetic_dim,
                sol.geometric_dim,
                bc.agrees
            );
        }
    }
    Ok(())
}
