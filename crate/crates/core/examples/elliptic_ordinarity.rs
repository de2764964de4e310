//! Hasse invariants of short Weierstrass curves against the trace of Frobenius.

use forge::duality::{ordinarity, short_weierstrass_curves, trace_by_point_count};

fn main() -> forge::Result<()> {
    for p in [5u32, 7] {
        let curves = short_weierstrass_curves(p)?;
        let mut ordinary = 0;
        for f in &curves {
            let o = ordinarity(p, f)?;
            let ap = trace_by_point_count(p, f)?;
            assert_eq!(o.ordinary, ap.rem_euclid(p as i64) != 0);
            ordinary += o.ordinary as usize;
        }
        println!("p = {p}: {} curves, {ordinary} ordinary", curves.len());
    }
    Ok(())
}
