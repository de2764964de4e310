//! Worked examples checked against hand computations and brute-force enumeration.

use std::sync::Arc;

use forge::artinian::{f_flat, frobenius_pushforward, hom_module, i_torsion, ArtinRing, FinModule};
use forge::crystal::{
    adjoint_structural, is_unit, iterate_structure, kashiwara_roundtrip, nil_isomorphism_check,
    stable_image, structured_i_torsion, twist_by_unit_line, unitalize, Kind, Nilpotency,
    StructuredModule, UnitalizeOutcome, DEFAULT_MAX_STEPS,
};
use forge::duality::{
    dualize, dualizing_module, hasse_invariant, kappa_s, pair_f_to_c, short_weierstrass_curves,
    sol_base_change_check, sol_point, trace_by_point_count,
};
use forge::local::local_duality_check;
use forge::pid::{coherent_model_of_localization, PidModule};
use forge::poly::{frobenius_pushforward_presentation, smith_normal_form};
use forge::semilinear::{semilinear_fixed_points, twisted_compose};
use forge::{Elem, Field, FieldSpec, Matrix, Poly, PolyMatrix, TwistedOperator};

fn f2() -> Field {
    Field::base(2, 1).unwrap()
}

fn mat(field: &Field, rows: &[&[Elem]]) -> Matrix {
    Matrix::from_rows(field, &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
}

fn ring_a() -> Arc<ArtinRing> {
    ArtinRing::new(&f2(), vec!["x".into()], vec![vec![2]]).unwrap()
}

/// `R = F_2[x]/(x²)` with `κ(1) = x`, `κ(x) = 0`.
fn fixture_a() -> StructuredModule {
    let f = f2();
    StructuredModule::cartier(FinModule::free(&ring_a()), mat(&f, &[&[0, 0], &[1, 0]])).unwrap()
}

fn residue_id(ring: &Arc<ArtinRing>) -> StructuredModule {
    let f = ring.field().clone();
    StructuredModule::cartier(FinModule::residue_field(ring), Matrix::identity(&f, 1)).unwrap()
}

/// `v ↦ A·v^{q^t}` written out with field powers.
fn eval_twisted(field: &Field, a: &Matrix, twist: i32, v: &[Elem]) -> Vec<Elem> {
    let q = field.q();
    let w: Vec<Elem> = v
        .iter()
        .map(|&c| field.pow(c, q.pow(twist as u32)))
        .collect();
    (0..a.rows())
        .map(|i| (0..a.cols()).fold(0, |acc, j| field.add(acc, field.mul(a.get(i, j), w[j]))))
        .collect()
}

/// Number of matrices `H` with `H·X_i = Y_i·H` for all `i`, found by enumeration.
fn count_homs(field: &Field, xs: &[Matrix], ys: &[Matrix], dx: usize, dy: usize) -> usize {
    let size = field.size() as usize;
    let total = size.pow((dx * dy) as u32);
    let mut count = 0;
    for code in 0..total {
        let mut c = code;
        let h = Matrix::from_fn(field, dy, dx, |_, _| {
            let v = (c % size) as Elem;
            c /= size;
            v
        });
        if xs
            .iter()
            .zip(ys)
            .all(|(x, y)| h.mul(x).unwrap() == y.mul(&h).unwrap())
        {
            count += 1;
        }
    }
    count
}

fn log(base: usize, n: usize) -> usize {
    let (mut k, mut m) = (0, 1);
    while m < n {
        m *= base;
        k += 1;
    }
    assert_eq!(m, n, "{n} is not a power of {base}");
    k
}

#[test]
fn twisted_composition_matches_evaluation_over_f4() {
    let f = Field::base(2, 2).unwrap();
    let g = f.generator();
    let a = mat(&f, &[&[g, 1], &[0, f.mul(g, g)]]);
    let b = mat(&f, &[&[1, g], &[g, 0]]);
    let c = twisted_compose(
        &TwistedOperator::new(a.clone(), 1),
        &TwistedOperator::new(b.clone(), 1),
    )
    .unwrap();
    assert_eq!(c.twist, 2);
    let b_sq = Matrix::from_fn(&f, 2, 2, |i, j| f.pow(b.get(i, j), 4));
    assert_eq!(c.mat, a.mul(&b_sq).unwrap());
    for x in f.elements() {
        for y in f.elements() {
            let v = [x, y];
            let lhs = eval_twisted(&f, &a, 1, &eval_twisted(&f, &b, 1, &v));
            assert_eq!(lhs, eval_twisted(&f, &c.mat, 2, &v));
        }
    }
}

#[test]
fn fixture_a_operator_squares_to_zero() {
    let k = fixture_a().op;
    let sq = twisted_compose(&k, &k).unwrap();
    assert!(sq.is_zero());
    assert_eq!(fixture_a().nilpotency_index(), Nilpotency::Finite(2));
    assert_eq!(stable_image(&fixture_a()).unwrap().0.dim(), 0);
}

#[test]
fn fixed_points_of_generator_twist_over_f4() {
    let f = Field::new(FieldSpec::new(2, 1, 2)).unwrap();
    let g = f.generator();
    let brute = f.elements().filter(|&x| f.mul(g, f.mul(x, x)) == x).count();
    assert_eq!(brute, 2);
    let fp = semilinear_fixed_points(&TwistedOperator::new(mat(&f, &[&[g]]), 1), 1).unwrap();
    assert_eq!(fp.dim(), log(2, brute));
}

#[test]
fn standard_monomials_and_hull_dimension() {
    let f = Field::base(3, 1).unwrap();
    let ring = ArtinRing::new(
        &f,
        vec!["x".into(), "y".into()],
        vec![vec![3, 0], vec![0, 2], vec![1, 1]],
    )
    .unwrap();
    let mut expected = Vec::new();
    for a in 0..3u32 {
        for b in 0..2u32 {
            if !(a >= 1 && b >= 1) {
                expected.push(vec![a, b]);
            }
        }
    }
    assert_eq!(ring.dim(), 4);
    let mut got = ring.basis().to_vec();
    got.sort();
    expected.sort();
    assert_eq!(got, expected);
    assert_eq!(dualizing_module(&ring, 1).unwrap().module.dim(), 4);
}

#[test]
fn ring_as_module_over_itself() {
    let r = FinModule::free(&ring_a());
    let x = &r.actions()[0];
    assert!(!x.is_zero());
    assert!(x.mul(x).unwrap().is_zero());
}

#[test]
fn homs_into_the_hull_on_fixture_a() {
    let f = f2();
    let ring = ring_a();
    let e = dualizing_module(&ring, 1).unwrap().module;
    let k = FinModule::residue_field(&ring);
    let fr = frobenius_pushforward(&FinModule::free(&ring), 1);
    for (src, expected) in [(&k, 1), (&fr, 2)] {
        let brute = count_homs(&f, src.actions(), e.module.actions(), src.dim(), 2);
        assert_eq!(log(2, brute), expected);
        assert_eq!(hom_module(src, &e.module).unwrap().0.dim(), expected);
    }
}

#[test]
fn flat_pullback_dimensions() {
    let ring = ring_a();
    let e = dualizing_module(&ring, 1).unwrap();
    assert_eq!(f_flat(&e.module.module, 1).unwrap().0.dim(), 2);
    assert!(adjoint_structural(&e.module).unwrap().is_bijective());
    assert_eq!(
        f_flat(&FinModule::residue_field(&ring), 1).unwrap().0.dim(),
        2
    );
}

#[test]
fn torsion_along_x_is_the_socle() {
    let f = f2();
    let r = FinModule::free(&ring_a());
    let (sub, incl) = i_torsion(&r, &[vec![1]]).unwrap();
    assert_eq!(sub.dim(), 1);
    assert_eq!(incl.column(0), vec![0, 1]);
    let x = &r.actions()[0];
    assert_eq!(x.kernel().image(), mat(&f, &[&[0], &[1]]));
}

#[test]
fn pushforward_of_x_has_factors_one_and_x() {
    let f = f2();
    let p = PolyMatrix::diagonal(&f, &[Poly::x(&f)]);
    let blown = frobenius_pushforward_presentation(&p, 2);
    assert_eq!((blown.rows(), blown.cols()), (2, 2));
    let det = blown
        .get(0, 0)
        .mul(blown.get(1, 1))
        .sub(&blown.get(0, 1).mul(blown.get(1, 0)));
    assert_eq!(det.monic(), Poly::x(&f));
    let s = smith_normal_form(&blown);
    let diag: Vec<Poly> = s.diag.iter().map(|d| d.monic()).collect();
    assert_eq!(diag, vec![Poly::one(&f), Poly::x(&f)]);
}

#[test]
fn identity_is_not_a_cartier_structure_on_fixture_a() {
    let f = f2();
    let r = FinModule::free(&ring_a());
    let x = r.actions()[0].clone();
    let k = Matrix::identity(&f, 2);
    // K·X^q = X·K fails: X² = 0 but X ≠ 0.
    assert_ne!(k.mul(&x.mul(&x).unwrap()).unwrap(), x.mul(&k).unwrap());
    let m = StructuredModule::new(r, TwistedOperator::new(k, -1)).unwrap();
    assert!(!m.validate().valid);
    assert!(StructuredModule::checked(m.module.clone(), m.op.clone()).is_err());
}

#[test]
fn adjoint_kernel_of_fixture_a() {
    let f = f2();
    let adj = adjoint_structural(&fixture_a()).unwrap();
    assert_eq!(adj.matrix.kernel().image(), mat(&f, &[&[0], &[1]]));
}

#[test]
fn hull_structure_on_dual_numbers() {
    let f = f2();
    let e = dualizing_module(&ring_a(), 1).unwrap();
    assert!(e.is_unit);
    // Basis x^{-1}, x^{-2}: x·x^{-2} = x^{-1}, x·x^{-1} = 0.
    assert_eq!(e.module.module.actions()[0], mat(&f, &[&[0, 1], &[0, 0]]));
    assert_eq!(*e.module.mat(), mat(&f, &[&[1, 0], &[0, 0]]));
}

#[test]
fn polynomial_cartier_values() {
    let f = f2();
    let mono = |k: usize| Poly::monomial(&f, k, 1);
    assert!(kappa_s(&Poly::one(&f), 2).is_zero());
    assert_eq!(kappa_s(&mono(1), 2), Poly::one(&f));
    assert_eq!(kappa_s(&mono(3), 2), Poly::x(&f));
    let f3 = Field::base(3, 1).unwrap();
    assert_eq!(kappa_s(&Poly::monomial(&f3, 2, 1), 3), Poly::one(&f3));
    assert!(kappa_s(&Poly::x(&f3), 3).is_zero());
}

#[test]
fn twist_by_one_plus_x() {
    let f = f2();
    let ring = ring_a();
    let a = vec![1, 1];
    // On R: (1+x)·1 = 1 + x, (1+x)·x = x; (1+x)² = 1 so it is its own inverse.
    let mu = mat(&f, &[&[1, 0], &[1, 1]]);
    assert!(mu.mul(&mu).unwrap().is_identity());
    let e = dualizing_module(&ring, 1).unwrap().module;
    for m in [fixture_a(), e] {
        let mu_m = Matrix::identity(&f, 2).add(&m.module.actions()[0]).unwrap();
        let t = twist_by_unit_line(&m, &a).unwrap();
        assert_eq!(*t.mat(), m.mat().mul(&mu_m).unwrap());
    }
    assert_eq!(FinModule::free(&ring).element_action(&a), mu);
}

#[test]
fn hom_from_frobenius_ring_is_evaluation_at_one() {
    let ring = ring_a();
    let r = StructuredModule::frobenius(FinModule::free(&ring), ring.frobenius_op(1)).unwrap();
    let e = dualizing_module(&ring, 1).unwrap().module;
    let (h, hs) = pair_f_to_c(&r, &e).unwrap();
    assert_eq!(h.dim(), 2);
    let ev = Matrix::from_columns(
        e.field(),
        2,
        &(0..hs.dim())
            .map(|i| {
                let mut c = vec![0; hs.dim()];
                c[i] = 1;
                hs.element(&c).column(0)
            })
            .collect::<Vec<_>>(),
    );
    assert!(ev.is_invertible());
    assert_eq!(ev.mul(h.mat()).unwrap(), e.mat().mul(&ev).unwrap());
}

#[test]
fn dual_of_residue_field_is_the_skyscraper() {
    let f = f2();
    let d = dualize(&residue_id(&ring_a())).unwrap().module;
    assert_eq!(d.kind(), Kind::Frobenius);
    assert_eq!(*d.mat(), Matrix::identity(&f, 1));
    for s in 1..=3 {
        let big = f.extension(s).unwrap();
        let brute = big.elements().filter(|&x| big.pow(x, 2) == x).count();
        let rep = sol_point(&d, s).unwrap();
        assert_eq!(rep.geometric_dim, log(2, brute));
        assert_eq!(rep.arithmetic_dim, 1);
    }
}

#[test]
fn dual_of_truncated_ring_keeps_dimension() {
    let f = f2();
    let ring = ArtinRing::new(&f, vec!["x".into()], vec![vec![3]]).unwrap();
    let e = dualizing_module(&ring, 1).unwrap().module;
    let r = FinModule::free(&ring);
    let brute = count_homs(&f, r.actions(), e.module.actions(), 3, 3);
    assert_eq!(log(2, brute), 3);
    let m = StructuredModule::frobenius(r, ring.frobenius_op(1)).unwrap();
    assert_eq!(dualize(&m).unwrap().module.dim(), 3);
}

fn stabilized(m: &StructuredModule) -> StructuredModule {
    match unitalize(m, DEFAULT_MAX_STEPS).unwrap() {
        UnitalizeOutcome::Stabilized(u) => u.module,
        UnitalizeOutcome::NotStabilized { steps, .. } => {
            panic!("no stabilization after {steps} steps")
        }
    }
}

#[test]
fn unitalization_examples() {
    assert_eq!(stabilized(&fixture_a()).dim(), 0);
    let e = dualizing_module(&ring_a(), 1).unwrap().module;
    let eu = stabilized(&e);
    assert_eq!(eu.dim(), 2);
    assert!(is_unit(&eu).unwrap());

    let point = ArtinRing::new(&f2(), vec!["x".into()], vec![vec![1]]).unwrap();
    let k = residue_id(&point);
    assert!(is_unit(&k).unwrap());
    let ku = stabilized(&k);
    assert_eq!(*ku.mat(), *k.mat());

    // Over the dual numbers (k, id) is not unit: k → Hom(F_*R, k) = k² is not onto.
    let k2 = residue_id(&ring_a());
    assert!(!is_unit(&k2).unwrap());
    let k2u = stabilized(&k2);
    assert_eq!(k2u.dim(), 2);
    assert!(is_unit(&k2u).unwrap());
}

#[test]
fn stable_image_of_sum_with_residue_field() {
    let m = fixture_a().direct_sum(&residue_id(&ring_a())).unwrap();
    let k3 = m.mat().pow(3).unwrap();
    let (sub, incl) = stable_image(&m).unwrap();
    assert_eq!(sub.dim(), k3.rank());
    assert_eq!(sub.dim(), 1);
    assert!(
        nil_isomorphism_check(&incl, &sub, &m)
            .unwrap()
            .is_nil_isomorphism
    );
}

#[test]
fn iterating_fixture_a_twice_is_zero() {
    let it = iterate_structure(&fixture_a(), 2).unwrap();
    assert!(it.mat().is_zero());
    assert_eq!(it.op.twist, -2);
    let k = residue_id(&ring_a());
    assert_eq!(*iterate_structure(&k, 3).unwrap().mat(), *k.mat());
}

#[test]
fn kashiwara_on_fixture_a() {
    let n = fixture_a();
    let (sub, _) = structured_i_torsion(&n, &[vec![1]]).unwrap();
    let rep = kashiwara_roundtrip(&sub, Some(&n)).unwrap();
    assert!(rep.roundtrip_exact);
    assert!(rep.counit.unwrap().is_nil_isomorphism);
}

#[test]
fn local_duality_on_transported_fixtures() {
    let f = f2();
    let a = fixture_a();
    let m = PidModule::torsion(
        a.module.actions()[0].clone(),
        a.mat().clone(),
        Kind::Cartier,
    )
    .unwrap();
    let r = local_duality_check(&m).unwrap();
    assert!(r.agree);
    assert!(r
        .verdicts
        .iter()
        .all(|v| v.ext_nilpotent && v.local_nilpotent));

    let k = PidModule::torsion(
        Matrix::zeros(&f, 1, 1),
        Matrix::identity(&f, 1),
        Kind::Cartier,
    )
    .unwrap();
    let r = local_duality_check(&k).unwrap();
    assert!(r.agree);
    assert!(!r.verdicts[0].ext_nilpotent && !r.verdicts[0].local_nilpotent);
}

#[test]
fn localization_model_of_polynomial_ring() {
    let f = f2();
    let m = PidModule::free_diagonal(&f, &[Poly::one(&f)], Kind::Cartier).unwrap();
    let model = coherent_model_of_localization(&m, &Poly::x(&f), 3).unwrap();
    assert!(model.certified);
    let dims: Vec<usize> = model.layers.iter().map(|l| l.dim).collect();
    assert_eq!(dims, vec![1, 2, 3]);
    assert!(model.layers.iter().all(|l| l.valid && l.index.is_finite()));
}

#[test]
fn frobenius_ring_base_change() {
    let ring = ring_a();
    let m = StructuredModule::frobenius(FinModule::free(&ring), ring.frobenius_op(1)).unwrap();
    let r = sol_base_change_check(&m, 2).unwrap();
    assert!(r.agrees);
    assert_eq!((r.geometric_dim, r.geometric_dim_extended), (1, 1));
}

/// Coefficient of `x^{p-1}` in `f^{(p-1)/2}` by schoolbook multiplication mod `p`.
fn hasse_by_hand(p: i64, f: &[i64]) -> i64 {
    let mut acc = vec![1i64];
    for _ in 0..(p - 1) / 2 {
        let mut next = vec![0i64; acc.len() + f.len() - 1];
        for (i, a) in acc.iter().enumerate() {
            for (j, b) in f.iter().enumerate() {
                next[i + j] = (next[i + j] + a * b).rem_euclid(p);
            }
        }
        acc = next;
    }
    acc.get((p - 1) as usize).copied().unwrap_or(0)
}

#[test]
fn hasse_invariants_of_small_curves() {
    for (p, f, h) in [
        (5u32, [0i64, 1, 0, 1], 2u32),
        (5, [1, 0, 0, 1], 0),
        (7, [1, 0, 0, 1], 3),
    ] {
        assert_eq!(hasse_by_hand(p as i64, &f), h as i64);
        assert_eq!(hasse_invariant(p, &f).unwrap(), h);
        let ap = trace_by_point_count(p, &f).unwrap();
        assert_eq!(ap.rem_euclid(p as i64) != 0, h != 0);
    }
    assert_eq!(trace_by_point_count(5, &[1, 0, 0, 1]).unwrap(), 0);
}

#[test]
fn nonsingular_short_weierstrass_count_at_five() {
    let p = 5i64;
    let brute = (0..p)
        .flat_map(|a| (0..p).map(move |b| (a, b)))
        .filter(|&(a, b)| (4 * a * a * a + 27 * b * b).rem_euclid(p) != 0)
        .count();
    assert_eq!(brute, 20);
    assert_eq!(short_weierstrass_curves(5).unwrap().len(), brute);
}
