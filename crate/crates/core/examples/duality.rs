//! Dualizing a random Cartier module and checking the double dual.

use forge::crystal::Kind;
use forge::duality::{double_dual_check, dualize};
use forge::random::{random_artinian, rng};

fn main() -> forge::Result<()> {
    let mut r = rng(11);
    for i in 0..5 {
        let m = random_artinian(&mut r, Kind::Cartier, 4)?;
        let d = dualize(&m)?;
        let dd = double_dual_check(&m)?;
        println!(
            "#{i}: dim {} over a ring of dim {}, nilpotent {} / dual nilpotent {}, double dual {}",
            m.dim(),
            m.module.ring().dim(),
            m.is_nilpotent(),
            d.module.is_nilpotent(),
            dd.holds()
        );
    }
    Ok(())
}
