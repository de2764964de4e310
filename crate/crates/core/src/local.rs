//! Complexes on `Spec F_q[x]`: duality, local duality at the origin and the
//! middle-perverse conditions.
//!
//! The dualizing complex is `(R, κ_S)` in degree `-1`. A torsion term in
//! degree `d` dualizes to degree `-d`, a free term to degree `-d-1`.

use serde::Serialize;

use crate::crystal::{Kind, Nilpotency};
use crate::error::{Error, Result};
use crate::pid::{cech_local_cohomology, matlis_dual, torsion_dual, x_primary_module, PidModule};
use crate::poly::PolyMatrix;

/// Complex with zero differentials, listed as `(degree, term)`.
#[derive(Clone, Debug)]
pub struct PidComplex {
    pub terms: Vec<(i32, PidModule)>,
}

impl PidComplex {
    pub fn single(m: PidModule, degree: i32) -> PidComplex {
        PidComplex {
            terms: vec![(degree, m)],
        }
    }

    pub fn kind(&self) -> Option<Kind> {
        self.terms.first().map(|(_, m)| m.kind())
    }

    pub fn shift(&self, n: i32) -> PidComplex {
        PidComplex {
            terms: self.terms.iter().map(|(d, m)| (d - n, m.clone())).collect(),
        }
    }

    fn at(&self, j: i32) -> impl Iterator<Item = &PidModule> {
        self.terms
            .iter()
            .filter(move |(d, _)| *d == j)
            .map(|(_, m)| m)
    }

    fn degrees(&self) -> Vec<i32> {
        let mut ds: Vec<i32> = self.terms.iter().map(|(d, _)| *d).collect();
        ds.sort_unstable();
        ds.dedup();
        ds
    }
}

/// `D(M)` of a free part with diagonal structure: the same diagonal, other kind.
fn dual_free(m: &PidModule) -> Result<PidModule> {
    let diag = m.free_diagonal_entries().ok_or_else(|| {
        Error::Unsupported("dual of a free part with non-diagonal structure".into())
    })?;
    let mut out = PidModule::free_diagonal(&m.field, &diag, m.kind().dual())?;
    out.twist = -m.twist;
    Ok(out)
}

pub fn dualize_pid(c: &PidComplex) -> Result<PidComplex> {
    let mut terms = Vec::new();
    for (d, m) in &c.terms {
        if m.torsion_dim() > 0 {
            terms.push((-d, torsion_dual(&m.torsion_part())?));
        }
        if m.free_rank() > 0 {
            terms.push((-d - 1, dual_free(&m.free_part())?));
        }
    }
    terms.sort_by_key(|(d, _)| *d);
    Ok(PidComplex { terms })
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeVerdict {
    pub degree: i32,
    pub ext_nilpotent: bool,
    pub local_nilpotent: bool,
    pub agree: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalDualityReport {
    pub verdicts: Vec<DegreeVerdict>,
    pub agree: bool,
}

/// Compares `Ext^{-i}(M, ω) ⊗ R̂ ~ 0` with `H^i_m(M) ~ 0` for `i = 0, 1`.
///
/// The Ext side is computed through duals: `Hom(M_tors, E)` for `i = 0` and the
/// dual of the free part for `i = 1`. The local side goes through the Čech
/// complex.
pub fn local_duality_check(m: &PidModule) -> Result<LocalDualityReport> {
    let lc = cech_local_cohomology(m)?;
    let ext0 = if m.torsion_dim() == 0 {
        true
    } else {
        matlis_dual(&m.torsion_part(), None)?.module.is_nilpotent()
    };
    let ext1 = if m.free_rank() == 0 {
        true
    } else {
        dual_free(&m.free_part())?.free_structure_nilpotent()?
    };
    let verdicts: Vec<DegreeVerdict> = [(0, ext0, lc.h0_nilpotent()), (1, ext1, lc.h1_nilpotent())]
        .into_iter()
        .map(|(degree, e, l)| DegreeVerdict {
            degree,
            ext_nilpotent: e,
            local_nilpotent: l,
            agree: e == l,
        })
        .collect();
    Ok(LocalDualityReport {
        agree: verdicts.iter().all(|v| v.agree),
        verdicts,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PointCondition {
    pub point: &'static str,
    pub degree: i32,
    pub condition: String,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PerversityReport {
    pub perverse: bool,
    pub conditions: Vec<PointCondition>,
}

struct TermVerdicts {
    origin: bool,
    elsewhere: bool,
    free: bool,
}

fn verdicts(m: &PidModule) -> Result<TermVerdicts> {
    let (origin, elsewhere) = m.torsion_nilpotency()?;
    Ok(TermVerdicts {
        origin: origin.is_finite(),
        elsewhere: elsewhere.is_finite(),
        free: m.free_structure_nilpotent()?,
    })
}

/// Middle perversity `p(η) = -1`, `p(closed) = 0`: `H^j(M_x) ~ 0` for
/// `j > p(x)` and `H^j_x(M) ~ 0` for `j < p(x)`. Closed points other than the
/// origin are aggregated.
pub fn is_perverse(c: &PidComplex) -> Result<PerversityReport> {
    let mut conditions = Vec::new();
    let degs = c.degrees();
    let all = |j: i32, f: &dyn Fn(&TermVerdicts) -> bool| -> Result<bool> {
        for m in c.at(j) {
            if !f(&verdicts(m)?) {
                return Ok(false);
            }
        }
        Ok(true)
    };
    for &j in &degs {
        if j != -1 {
            conditions.push(PointCondition {
                point: "generic",
                degree: j,
                condition: format!("H^{j} of the generic stalk ~ 0"),
                holds: all(j, &|v| v.free)?,
            });
        }
    }
    let mut closed_degs: Vec<i32> = degs.iter().flat_map(|&d| [d, d + 1]).collect();
    closed_degs.sort_unstable();
    closed_degs.dedup();
    for (point, torsion) in [
        (
            "origin",
            (|v: &TermVerdicts| v.origin) as fn(&TermVerdicts) -> bool,
        ),
        ("other closed points", |v: &TermVerdicts| v.elsewhere),
    ] {
        for &j in &closed_degs {
            if j > 0 && degs.contains(&j) {
                conditions.push(PointCondition {
                    point,
                    degree: j,
                    condition: format!("H^{j} of the stalk ~ 0"),
                    holds: all(j, &|v| torsion(v) && v.free)?,
                });
            }
            if j < 0 {
                let h0 = all(j, &|v| torsion(v))?;
                let h1 = all(j - 1, &|v| v.free)?;
                if degs.contains(&j) || degs.contains(&(j - 1)) {
                    conditions.push(PointCondition {
                        point,
                        degree: j,
                        condition: format!("H^{j} with supports ~ 0"),
                        holds: h0 && h1,
                    });
                }
            }
        }
    }
    Ok(PerversityReport {
        perverse: conditions.iter().all(|c| c.holds),
        conditions,
    })
}

/// Strict nilpotence of `H^0_m` computed two ways: directly on the
/// `x`-primary part and through the Matlis dual of the whole torsion part.
pub fn h0_nilpotence_pair(m: &PidModule) -> Result<(Nilpotency, Nilpotency)> {
    let (h0, _) = x_primary_module(m)?;
    let d = matlis_dual(&m.torsion_part(), None)?;
    Ok((h0.nilpotency_index(), d.module.nilpotency_index()))
}

/// The constant crystal `(R, κ_S)` of rank one.
pub fn unit_free(field: &crate::field::Field, kind: Kind) -> Result<PidModule> {
    PidModule::new(
        crate::matrix::Matrix::zeros(field, 0, 0),
        crate::matrix::Matrix::zeros(field, 0, 0),
        PolyMatrix::diagonal(field, &[crate::poly::Poly::one(field)]),
        kind.sign(),
    )
}
