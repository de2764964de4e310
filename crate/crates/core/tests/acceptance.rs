use std::time::{Duration, Instant};

use forge::artinian::{ArtinRing, FinModule};
use forge::crystal::{
    is_unit, kashiwara_roundtrip, structured_i_torsion, unitalize, Kind, StructuredModule,
    UnitalizeOutcome, DEFAULT_MAX_STEPS,
};
use forge::duality::{
    cartier_structure_on_ring, double_dual_check, dual_base_change_check, dualize, hasse_invariant,
    short_weierstrass_curves, sol_base_change_check, sol_point, trace_by_point_count,
};
use forge::local::{dualize_pid, is_perverse, local_duality_check, unit_free, PidComplex};
use forge::random::{artinian_corpus, pid_corpus, random_structure, rng};
use forge::{Field, FieldSpec};

const SEED: u64 = 20240917;

struct Outcome {
    id: u32,
    name: &'static str,
    passed: bool,
    detail: String,
    elapsed: Duration,
    budget: Duration,
}

fn run(
    id: u32,
    name: &'static str,
    budget_secs: u64,
    f: impl FnOnce() -> Result<String, String>,
) -> Outcome {
    let start = Instant::now();
    let res = f();
    let elapsed = start.elapsed();
    let budget = Duration::from_secs(budget_secs);
    let (passed, detail) = match res {
        Ok(d) => (elapsed <= budget, d),
        Err(e) => (false, e),
    };
    Outcome {
        id,
        name,
        passed,
        detail,
        elapsed,
        budget,
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<T: std::fmt::Display>(x: T) -> String {
    x.to_string()
}

fn dual_basis_law() -> Result<String, String> {
    let mut checked = 0;
    for p in [2, 3, 5] {
        let field = Field::base(p, 1).map_err(e)?;
        for n in 1..=3 {
            let c = cartier_structure_on_ring(&field, n);
            ensure(c.dual_basis_law_holds(), || {
                format!("fails for p = {p}, {n} variables")
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} (p, n) cases"))
}

fn double_duality() -> Result<String, String> {
    let corpus = artinian_corpus(SEED, 200, Kind::Cartier).map_err(e)?;
    for (i, m) in corpus.iter().enumerate() {
        let r = double_dual_check(m).map_err(|err| format!("module {i}: {err}"))?;
        ensure(r.holds(), || format!("module {i}: {r:?}"))?;
    }
    Ok(format!("{} modules", corpus.len()))
}

fn nilpotence_exchange() -> Result<String, String> {
    let corpus = artinian_corpus(SEED, 200, Kind::Cartier).map_err(e)?;
    let mut nil = 0;
    for (i, m) in corpus.iter().enumerate() {
        let d = dualize(m).map_err(|err| format!("module {i}: {err}"))?;
        let a = m.is_nilpotent();
        ensure(a == d.module.is_nilpotent(), || {
            format!("module {i}: M nilpotent = {a}, D(M) disagrees")
        })?;
        nil += a as usize;
    }
    Ok(format!("{} modules, {nil} nilpotent", corpus.len()))
}

fn local_duality() -> Result<String, String> {
    let mut corpus = pid_corpus(SEED, 50, Kind::Cartier).map_err(e)?;
    corpus.extend(pid_corpus(SEED + 1, 50, Kind::Frobenius).map_err(e)?);
    let mut non_nil = 0;
    for (i, m) in corpus.iter().enumerate() {
        let r = local_duality_check(m).map_err(|err| format!("module {i}: {err}"))?;
        ensure(r.agree, || format!("module {i}: {r:?}"))?;
        non_nil += (!r.verdicts[0].local_nilpotent) as usize;
    }
    Ok(format!(
        "{} modules, {non_nil} with non-nilpotent H^0",
        corpus.len()
    ))
}

fn sol_normalization() -> Result<String, String> {
    for (p, r) in [(2, 1), (3, 1), (2, 2), (5, 1)] {
        let field = Field::new(FieldSpec::new(p, r, 1)).map_err(e)?;
        let ring = ArtinRing::new(
            &field,
            vec!["x".into(), "y".into()],
            vec![vec![3, 0], vec![0, 2]],
        )
        .map_err(e)?;
        let m =
            StructuredModule::frobenius(FinModule::free(&ring), ring.frobenius_op(1)).map_err(e)?;
        for s in 1..=3 {
            let rep = sol_point(&m, s).map_err(e)?;
            ensure(rep.geometric_dim == 1 && rep.arithmetic_dim == 1, || {
                format!("q = {}, s = {s}: {rep:?}", field.q())
            })?;
            let big = field.extension(s).map_err(e)?;
            let fixed: Vec<u32> = big
                .elements()
                .filter(|&a| big.pow(a, field.q()) == a)
                .collect();
            let v = rep.basis.column(0);
            let ambient = rep.basis.field();
            let in_fq =
                v.iter().all(|&c| ambient.pow(c, field.q()) == c) && v.iter().any(|&c| c != 0);
            ensure(in_fq && fixed.len() as u64 == field.q(), || {
                format!("q = {}, s = {s}: fixed points are not F_q", field.q())
            })?;
        }
    }
    Ok("q ∈ {2, 3, 4, 5}, s ∈ {1, 2, 3}".into())
}

fn base_change() -> Result<String, String> {
    let cartier = artinian_corpus(SEED, 60, Kind::Cartier).map_err(e)?;
    let frob = artinian_corpus(SEED + 2, 60, Kind::Frobenius).map_err(e)?;
    for s in [2, 3] {
        for (i, m) in frob.iter().enumerate() {
            let r = sol_base_change_check(m, s).map_err(|err| format!("F-module {i}: {err}"))?;
            ensure(r.agrees, || format!("F-module {i}, s = {s}: {r:?}"))?;
        }
        for (i, m) in cartier.iter().chain(frob.iter()).enumerate() {
            let r = dual_base_change_check(m, s).map_err(|err| format!("module {i}: {err}"))?;
            ensure(r.isomorphic, || {
                format!("module {i}, s = {s}: not isomorphic")
            })?;
        }
    }
    Ok(format!(
        "{} modules, s ∈ {{2, 3}}",
        cartier.len() + frob.len()
    ))
}

fn kashiwara() -> Result<String, String> {
    let mut r = rng(SEED);
    let field2 = Field::base(2, 1).map_err(e)?;
    let field3 = Field::base(3, 1).map_err(e)?;
    let fixtures = [
        (
            &field2,
            vec![vec![2u32, 0], vec![0, 2]],
            vec![vec![1u32, 0]],
        ),
        (&field2, vec![vec![3, 0], vec![0, 2]], vec![vec![0, 1]]),
        (
            &field3,
            vec![vec![3, 0], vec![0, 2], vec![1, 1]],
            vec![vec![1, 0]],
        ),
        (
            &field3,
            vec![vec![2, 0], vec![0, 3]],
            vec![vec![1, 0], vec![0, 2]],
        ),
        (&field2, vec![vec![4, 0], vec![0, 1]], vec![vec![2, 0]]),
    ];
    let mut count = 0;
    for (field, rels, j) in fixtures {
        let ring = ArtinRing::new(field, vec!["x".into(), "y".into()], rels).map_err(e)?;
        for _ in 0..8 {
            let module = forge::random::random_module(&ring, &mut r, 5).map_err(e)?;
            let n = random_structure(&module, Kind::Cartier, &mut r).map_err(e)?;
            let (sub, _) = structured_i_torsion(&n, &j).map_err(e)?;
            let rep = kashiwara_roundtrip(&sub, Some(&n)).map_err(e)?;
            ensure(rep.roundtrip_exact, || "i^♭ i_* is not the identity".into())?;
            let c = rep.counit.expect("ambient supplied");
            ensure(c.is_nil_isomorphism, || {
                format!("counit not a nil-isomorphism: {c:?}")
            })?;
            count += 1;
        }
    }
    Ok(format!("{count} quotient fixtures"))
}

fn perversity() -> Result<String, String> {
    let corpus = pid_corpus(SEED + 3, 50, Kind::Cartier).map_err(e)?;
    for (i, m) in corpus.iter().enumerate() {
        let d = dualize_pid(&PidComplex::single(m.clone(), 0))
            .map_err(|err| format!("module {i}: {err}"))?;
        let rep = is_perverse(&d).map_err(e)?;
        ensure(rep.perverse, || format!("module {i}: {rep:?}"))?;
    }
    for p in [2, 3] {
        let field = Field::base(p, 1).map_err(e)?;
        let free = unit_free(&field, Kind::Cartier).map_err(e)?;
        let at0 = is_perverse(&PidComplex::single(free.clone(), 0)).map_err(e)?;
        let at1 = is_perverse(&PidComplex::single(free, -1)).map_err(e)?;
        ensure(!at0.perverse && at1.perverse, || {
            format!("free crystal at p = {p}: {at0:?} {at1:?}")
        })?;
    }
    Ok(format!(
        "{} torsion modules, free crystal in degrees 0 and -1",
        corpus.len()
    ))
}

fn ordinarity_scan() -> Result<String, String> {
    let mut total = 0;
    for p in [3, 5, 7, 11, 13] {
        for f in short_weierstrass_curves(p).map_err(e)? {
            let h = hasse_invariant(p, &f).map_err(e)?;
            let ap = trace_by_point_count(p, &f).map_err(e)?;
            ensure((h != 0) == (ap.rem_euclid(p as i64) != 0), || {
                format!("p = {p}, f = {f:?}: Hasse {h}, a_p {ap}")
            })?;
            total += 1;
        }
    }
    Ok(format!("{total} curves"))
}

fn unitalization() -> Result<String, String> {
    let corpus = artinian_corpus(SEED, 200, Kind::Cartier).map_err(e)?;
    let (mut zero, mut unit) = (0, 0);
    for (i, m) in corpus.iter().enumerate() {
        let u = match unitalize(m, DEFAULT_MAX_STEPS).map_err(|err| format!("module {i}: {err}"))? {
            UnitalizeOutcome::Stabilized(u) => u,
            UnitalizeOutcome::NotStabilized { steps, .. } => {
                return Err(format!("module {i}: no stabilization in {steps} steps"))
            }
        };
        if m.is_nilpotent() {
            ensure(u.module.dim() == 0, || {
                format!("module {i}: nilpotent but M^u has dim {}", u.module.dim())
            })?;
            zero += 1;
        } else {
            ensure(u.module.dim() > 0, || {
                format!("module {i}: not nilpotent but M^u = 0")
            })?;
            ensure(is_unit(&u.module).map_err(e)?, || {
                format!("module {i}: M^u is not unit")
            })?;
            ensure(u.certificate.is_nil_isomorphism, || {
                format!("module {i}: {:?}", u.certificate)
            })?;
            unit += 1;
        }
    }
    Ok(format!(
        "{zero} nilpotent → 0, {unit} → unit with nil-isomorphism"
    ))
}

fn main() {
    let outcomes = vec![
        run(1, "dual-basis law", 1, dual_basis_law),
        run(2, "double duality", 30, double_duality),
        run(3, "nilpotence exchange under D", 30, nilpotence_exchange),
        run(4, "local duality", 60, local_duality),
        run(5, "Sol normalization", 1, sol_normalization),
        run(6, "base-change compatibilities", 30, base_change),
        run(7, "Kashiwara", 5, kashiwara),
        run(8, "perversity exchange", 30, perversity),
        run(9, "ordinarity scan", 60, ordinarity_scan),
        run(10, "unitalization", 30, unitalization),
    ];
    for o in &outcomes {
        println!(
            "[{}] {:>2}. {:<30} {:>9.3}s / {:>3}s  {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.id,
            o.name,
            o.elapsed.as_secs_f64(),
            o.budget.as_secs(),
            o.detail
        );
    }
    let failed: Vec<u32> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    println!("{} of {} criteria passed", outcomes.len() - failed.len(), outcomes.len());
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
