//! Local duality and perversity for Cartier modules on the affine line.

use forge::crystal::Kind;
use forge::local::{dualize_pid, is_perverse, local_duality_check, unit_free, PidComplex};
use forge::pid::PidModule;
use forge::{Field, Matrix};

fn main() -> forge::Result<()> {
    let f = Field::base(2, 1)?;
    let sky = PidModule::torsion(
        Matrix::zeros(&f, 1, 1),
        Matrix::identity(&f, 1),
        Kind::Cartier,
    )?;
    let omega = unit_free(&f, Kind::Cartier)?;
    for (name, m) in [("skyscraper", &sky), ("omega", &omega)] {
        let r = local_duality_check(m)?;
        for v in &r.verdicts {
            println!(
                "{name} degree {}: Ext nilpotent {}, local cohomology nilpotent {}",
                v.degree, v.ext_nilpotent, v.local_nilpotent
            );
        }
    }
    for degree in [0, -1] {
        let c = PidComplex::single(omega.clone(), degree);
        println!(
            "omega in degree {degree}: perverse {}",
            is_perverse(&c)?.perverse
        );
    }
    let d = dualize_pid(&PidComplex::single(sky, 0))?;
    println!(
        "dual of the skyscraper perverse: {}",
        is_perverse(&d)?.perverse
    );
    Ok(())
}
