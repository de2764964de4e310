//! Seeded invariant suites over random corpora.

use rayon::prelude::*;
use serde::Serialize;

use crate::artinian::{ArtinRing, FinModule};
use crate::crystal::{
    is_unit, kashiwara_roundtrip, structured_i_torsion, unitalize, Kind, StructuredModule,
    UnitalizeOutcome, DEFAULT_MAX_STEPS,
};
use crate::duality::{
    cartier_structure_on_ring, double_dual_check, dual_base_change_check, dualize, hasse_invariant,
    short_weierstrass_curves, sol_base_change_check, sol_point, trace_by_point_count,
};
use crate::error::{Error, Result};
use crate::field::{Field, FieldSpec};
use crate::local::{dualize_pid, is_perverse, local_duality_check, unit_free, PidComplex};
use crate::random::{artinian_corpus, pid_corpus, random_module, random_structure, rng};

pub const SUITES: &[&str] = &[
    "dual-basis",
    "double-dual",
    "nilpotence-exchange",
    "local-duality",
    "sol-normalization",
    "base-change",
    "kashiwara",
    "perversity",
    "ordinarity",
    "unitalization",
];

#[derive(Clone, Debug, Serialize)]
pub struct SuiteOutcome {
    pub name: String,
    pub cases: usize,
    pub passed: bool,
    pub failures: Vec<String>,
}

fn collect(name: &str, checks: Vec<std::result::Result<(), String>>) -> SuiteOutcome {
    let failures: Vec<String> = checks.into_iter().filter_map(|c| c.err()).collect();
    SuiteOutcome {
        name: name.into(),
        cases: 0,
        passed: failures.is_empty(),
        failures,
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn par_check<T: Sync>(
    name: &str,
    items: &[T],
    f: impl Fn(usize, &T) -> std::result::Result<(), String> + Sync,
) -> SuiteOutcome {
    let checks: Vec<_> = items.par_iter().enumerate().map(|(i, x)| f(i, x)).collect();
    let mut out = collect(name, checks);
    out.cases = items.len();
    out
}

fn err(i: usize) -> impl Fn(Error) -> String {
    move |e| format!("case {i}: {e}")
}

/// Runs a named suite on `count` seeded instances.
pub fn run_suite(name: &str, seed: u64, count: usize) -> Result<SuiteOutcome> {
    Ok(match name {
        "dual-basis" => {
            let cases: Vec<(u32, usize)> = [2, 3, 5]
                .iter()
                .flat_map(|&p| (1..=3).map(move |n| (p, n)))
                .collect();
            par_check(name, &cases, |_, &(p, n)| {
                let f = Field::base(p, 1).map_err(|e| e.to_string())?;
                check(
                    cartier_structure_on_ring(&f, n).dual_basis_law_holds(),
                    || format!("p = {p}, {n} variables"),
                )
            })
        }
        "double-dual" => {
            let corpus = artinian_corpus(seed, count, Kind::Cartier)?;
            par_check(name, &corpus, |i, m| {
                let r = double_dual_check(m).map_err(err(i))?;
                check(r.holds(), || format!("case {i}: {r:?}"))
            })
        }
        "nilpotence-exchange" => {
            let corpus = artinian_corpus(seed, count, Kind::Cartier)?;
            par_check(name, &corpus, |i, m| {
                let d = dualize(m).map_err(err(i))?;
                check(m.is_nilpotent() == d.module.is_nilpotent(), || {
                    format!("case {i}: verdicts differ")
                })
            })
        }
        "local-duality" => {
            let mut corpus = pid_corpus(seed, count.div_ceil(2), Kind::Cartier)?;
            corpus.extend(pid_corpus(
                seed.wrapping_add(1),
                count / 2,
                Kind::Frobenius,
            )?);
            par_check(name, &corpus, |i, m| {
                let r = local_duality_check(m).map_err(err(i))?;
                check(r.agree, || format!("case {i}: {r:?}"))
            })
        }
        "sol-normalization" => {
            let cases: Vec<(u32, u32, u32)> = [(2, 1), (3, 1), (2, 2), (5, 1)]
                .iter()
                .flat_map(|&(p, r)| (1..=3).map(move |s| (p, r, s)))
                .collect();
            par_check(name, &cases, |i, &(p, r, s)| {
                let f = Field::new(FieldSpec::new(p, r, 1)).map_err(err(i))?;
                let ring = ArtinRing::new(&f, vec!["x".into()], vec![vec![3]]).map_err(err(i))?;
                let m = StructuredModule::frobenius(FinModule::free(&ring), ring.frobenius_op(1))
                    .map_err(err(i))?;
                let rep = sol_point(&m, s).map_err(err(i))?;
                check(rep.arithmetic_dim == 1 && rep.geometric_dim == 1, || {
                    format!("q = {}, s = {s}: {rep:?}", f.q())
                })
            })
        }
        "base-change" => {
            let mut corpus = artinian_corpus(seed, count.div_ceil(2), Kind::Frobenius)?;
            corpus.extend(artinian_corpus(
                seed.wrapping_add(1),
                count / 2,
                Kind::Cartier,
            )?);
            par_check(name, &corpus, |i, m| {
                for s in [2, 3] {
                    if m.kind() == Kind::Frobenius {
                        let r = sol_base_change_check(m, s).map_err(err(i))?;
                        check(r.agrees, || format!("case {i}, s = {s}: {r:?}"))?;
                    }
                    let r = dual_base_change_check(m, s).map_err(err(i))?;
                    check(r.isomorphic, || format!("case {i}, s = {s}: duals differ"))?;
                }
                Ok(())
            })
        }
        "kashiwara" => {
            let mut r = rng(seed);
            let f2 = Field::base(2, 1)?;
            let f3 = Field::base(3, 1)?;
            let fixtures = [
                (&f2, vec![vec![2u32, 0], vec![0, 2]], vec![vec![1u32, 0]]),
                (&f2, vec![vec![3, 0], vec![0, 2]], vec![vec![0, 1]]),
                (
                    &f3,
                    vec![vec![3, 0], vec![0, 2], vec![1, 1]],
                    vec![vec![1, 0]],
                ),
                (
                    &f3,
                    vec![vec![2, 0], vec![0, 3]],
                    vec![vec![1, 0], vec![0, 2]],
                ),
            ];
            let mut cases = Vec::new();
            for i in 0..count {
                let (f, rels, j) = &fixtures[i % fixtures.len()];
                let ring = ArtinRing::new(f, vec!["x".into(), "y".into()], rels.clone())?;
                let module = random_module(&ring, &mut r, 5)?;
                cases.push((random_structure(&module, Kind::Cartier, &mut r)?, j.clone()));
            }
            par_check(name, &cases, |i, (n, j)| {
                let (sub, _) = structured_i_torsion(n, j).map_err(err(i))?;
                let rep = kashiwara_roundtrip(&sub, Some(n)).map_err(err(i))?;
                check(rep.roundtrip_exact, || {
                    format!("case {i}: round trip not exact")
                })?;
                check(
                    rep.counit.as_ref().is_some_and(|c| c.is_nil_isomorphism),
                    || format!("case {i}: counit is not a nil-isomorphism"),
                )
            })
        }
        "perversity" => {
            let corpus = pid_corpus(seed, count, Kind::Cartier)?;
            let mut out = par_check(name, &corpus, |i, m| {
                let d = dualize_pid(&PidComplex::single(m.clone(), 0)).map_err(err(i))?;
                let rep = is_perverse(&d).map_err(err(i))?;
                check(rep.perverse, || {
                    format!("case {i}: D(M[0]) is not perverse")
                })
            });
            for p in [2, 3] {
                let free = unit_free(&Field::base(p, 1)?, Kind::Cartier)?;
                let at0 = is_perverse(&PidComplex::single(free.clone(), 0))?.perverse;
                let at1 = is_perverse(&PidComplex::single(free, -1))?.perverse;
                if at0 || !at1 {
                    out.failures.push(format!(
                        "free crystal at p = {p}: degree 0 {at0}, degree -1 {at1}"
                    ));
                }
                out.cases += 1;
            }
            out.passed = out.failures.is_empty();
            out
        }
        "ordinarity" => {
            let mut curves = Vec::new();
            for p in [3u32, 5, 7, 11, 13] {
                curves.extend(short_weierstrass_curves(p)?.into_iter().map(|f| (p, f)));
            }
            par_check(name, &curves, |i, (p, f)| {
                let h = hasse_invariant(*p, f).map_err(err(i))?;
                let ap = trace_by_point_count(*p, f).map_err(err(i))?;
                check((h != 0) == (ap.rem_euclid(*p as i64) != 0), || {
                    format!("p = {p}, f = {f:?}: Hasse {h}, a_p {ap}")
                })
            })
        }
        "unitalization" => {
            let corpus = artinian_corpus(seed, count, Kind::Cartier)?;
            par_check(name, &corpus, |i, m| {
                match unitalize(m, DEFAULT_MAX_STEPS).map_err(err(i))? {
                    UnitalizeOutcome::NotStabilized { steps, .. } => {
                        Err(format!("case {i}: not stabilized after {steps} steps"))
                    }
                    UnitalizeOutcome::Stabilized(u) => {
                        if m.is_nilpotent() {
                            check(u.module.dim() == 0, || {
                                format!("case {i}: nilpotent with nonzero unitalization")
                            })
                        } else {
                            check(
                                u.module.dim() > 0
                                    && is_unit(&u.module).unwrap_or(false)
                                    && u.certificate.is_nil_isomorphism,
                                || {
                                    format!("case {i}: unitalization is not a unit nil-isomorphic target")
                                },
                            )
                        }
                    }
                }
            })
        }
        other => return Err(Error::Schema(format!("unknown suite {other:?}"))),
    })
}
