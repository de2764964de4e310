//! Fixed points of `v ↦ A·v^q` over growing extensions, and where they stabilize.

use forge::semilinear::{fixed_point_search, semilinear_fixed_points, stable_rank};
use forge::{Field, Matrix, TwistedOperator};

fn main() -> forge::Result<()> {
    let f = Field::base(3, 1)?;
    let a = Matrix::from_rows(&f, &[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 0]])?;
    let t = TwistedOperator::new(a, 1);
    println!("stable rank {}", stable_rank(&t)?);
    for s in 1..=4 {
        let fp = semilinear_fixed_points(&t, s)?;
        println!("s = {s}: dim over F_3 = {}", fp.dim());
    }
    let search = fixed_point_search(&t, 6)?;
    println!(
        "dims {:?}, attained at {:?}",
        search.dims, search.attained_at
    );
    Ok(())
}
