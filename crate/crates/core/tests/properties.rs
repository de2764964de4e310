use forge::artinian::{frobenius_pushforward, hom_module, i_torsion, restrict_scalars, FinModule};
use forge::crystal::{
    is_unit, iterate_structure, stable_part, twist_by_unit_line, unitalize, Kind, Nilpotency,
    UnitalizeOutcome, DEFAULT_MAX_STEPS,
};
use forge::duality::{double_dual_check, dualize, dualizing_module, sol_point};
use forge::local::{dualize_pid, is_perverse, PidComplex};
use forge::pid::{
    invariant_factors, matlis_double_dual_check, matlis_dual, truncated_ring, PidModule,
};
use forge::poly::{frobenius_pushforward_presentation, smith_normal_form};
use forge::random::{random_artinian, random_invertible, random_matrix, random_pid_torsion, rng};
use forge::semilinear::{
    change_basis, fixed_point_search, semilinear_fixed_points, stable_rank, twisted_compose,
};
use forge::{Field, FieldSpec, Matrix, Poly, PolyMatrix, TwistedOperator};
use proptest::prelude::*;
use rand::Rng;

fn small_field(i: u8) -> Field {
    let (p, r) = [(2, 1), (3, 1), (2, 2), (5, 1)][i as usize % 4];
    Field::new(FieldSpec::new(p, r, 1)).unwrap()
}

fn op(field: &Field, d: usize, twist: i32, seed: u64) -> TwistedOperator {
    TwistedOperator::new(random_matrix(field, d, d, &mut rng(seed)), twist)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn compose_is_associative_with_identity(fi in 0u8..4, d in 1usize..4, seed: u64, ta in -1i32..=1, tb in -1i32..=1, tc in -1i32..=1) {
        let f = small_field(fi).extension(2).unwrap();
        let (a, b, c) = (op(&f, d, ta, seed), op(&f, d, tb, seed ^ 1), op(&f, d, tc, seed ^ 2));
        let left = twisted_compose(&twisted_compose(&a, &b).unwrap(), &c).unwrap();
        let right = twisted_compose(&a, &twisted_compose(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(&left, &right);
        let id = TwistedOperator::identity(&f, d);
        prop_assert_eq!(&twisted_compose(&id, &a).unwrap(), &a);
        prop_assert_eq!(&twisted_compose(&a, &id).unwrap(), &a);
    }

    #[test]
    fn compose_matches_evaluation(d in 1usize..4, seed: u64) {
        let f = Field::new(FieldSpec::new(2, 1, 2)).unwrap();
        let (a, b) = (op(&f, d, 1, seed), op(&f, d, 1, seed ^ 9));
        let ab = twisted_compose(&a, &b).unwrap();
        let v: Vec<u32> = (0..d).map(|i| ((seed >> (2 * i)) & 3) as u32).collect();
        prop_assert_eq!(ab.apply(&v).unwrap(), a.apply(&b.apply(&v).unwrap()).unwrap());
    }

    #[test]
    fn stable_rank_is_basis_independent(fi in 0u8..4, d in 1usize..5, seed: u64) {
        let f = small_field(fi);
        let t = op(&f, d, 1, seed);
        let p = random_invertible(&f, d, &mut rng(seed ^ 3));
        prop_assert_eq!(stable_rank(&t).unwrap(), stable_rank(&change_basis(&t, &p).unwrap()).unwrap());
    }

    #[test]
    fn rank_chain_settles_after_first_repeat(fi in 0u8..4, d in 1usize..6, seed: u64) {
        let t = op(&small_field(fi), d, 1, seed);
        let chain = t.rank_chain(d + 2).unwrap();
        for w in chain.windows(2) {
            prop_assert!(w[1] <= w[0]);
        }
        if let Some(k) = chain.windows(2).position(|w| w[0] == w[1]) {
            prop_assert!(chain[k..].iter().all(|&r| r == chain[k]));
        }
    }

    #[test]
    fn fixed_points_bounded_and_monotone(q_is_4: bool, d in 1usize..4, seed: u64) {
        let f = if q_is_4 { Field::base(2, 2).unwrap() } else { Field::base(2, 1).unwrap() };
        let t = op(&f, d, 1, seed);
        let sr = stable_rank(&t).unwrap();
        let dims: Vec<usize> = [1u32, 2, 4].iter().map(|&s| semilinear_fixed_points(&t, s).unwrap().dim()).collect();
        prop_assert!(dims[0] <= dims[1] && dims[1] <= dims[2]);
        prop_assert!(dims.iter().all(|&x| x <= sr));
    }

    // element orders in GL_3(F_2), GL_2(F_3), GL_1(F_4) are at most 8
    #[test]
    fn fixed_points_attain_stable_rank(case in prop::sample::select(vec![(2u32, 1u32, 1usize), (2, 1, 2), (2, 1, 3), (3, 1, 1), (3, 1, 2), (2, 2, 1)]), seed: u64) {
        let (p, r, d) = case;
        let t = op(&Field::base(p, r).unwrap(), d, 1, seed);
        let search = fixed_point_search(&t, 8).unwrap();
        prop_assert!(search.attained_at.is_some(), "{:?}", search);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn artinian_constructors_validate(seed: u64, cartier: bool) {
        let kind = if cartier { Kind::Cartier } else { Kind::Frobenius };
        let m = random_artinian(&mut rng(seed), kind, 5).unwrap();
        prop_assert!(m.module.violations().is_empty());
        prop_assert!(m.validate().valid);
        let pushed = frobenius_pushforward(&m.module, 1);
        prop_assert_eq!(pushed.dim(), m.dim());
        prop_assert!(pushed.violations().is_empty());
        let (h, _) = hom_module(&FinModule::free(m.module.ring()), &m.module).unwrap();
        prop_assert_eq!(h.dim(), m.dim());
    }

    #[test]
    fn torsion_of_restriction_is_identity(seed: u64) {
        let m = random_artinian(&mut rng(seed), Kind::Cartier, 5).unwrap();
        let ring = m.module.ring().clone();
        let gens: Vec<Vec<u32>> = vec![(0..ring.nvars()).map(|i| (i == 0) as u32).collect()];
        let sub_ring = ring.quotient(&gens).unwrap();
        // a module over R/J: the J-torsion of M, pushed back and pulled again
        let (t, _) = i_torsion(&m.module, &gens).unwrap();
        prop_assert!(std::sync::Arc::ptr_eq(t.ring(), &sub_ring) || **t.ring() == *sub_ring);
        let (back, incl) = i_torsion(&restrict_scalars(&t).unwrap(), &gens).unwrap();
        prop_assert!(incl.is_identity());
        prop_assert_eq!(back, t);
    }

    #[test]
    fn nilpotency_and_stable_parts(seed: u64, cartier: bool, s in 1u32..4) {
        let kind = if cartier { Kind::Cartier } else { Kind::Frobenius };
        let m = random_artinian(&mut rng(seed), kind, 5).unwrap();
        let idx = m.nilpotency_index();
        if let Nilpotency::Finite(n) = idx {
            prop_assert!(n <= m.dim().max(1));
        }
        let (sp, _) = stable_part(&m).unwrap();
        prop_assert!(sp.validate().valid);
        let it = iterate_structure(&m, s).unwrap();
        match idx {
            Nilpotency::Finite(n) => prop_assert_eq!(it.nilpotency_index(), Nilpotency::Finite(n.div_ceil(s as usize).max(1))),
            Nilpotency::Infinite => prop_assert_eq!(it.nilpotency_index(), Nilpotency::Infinite),
        }
    }

    #[test]
    fn unit_twist_preserves_nilpotence(seed: u64, cartier: bool) {
        let kind = if cartier { Kind::Cartier } else { Kind::Frobenius };
        let mut r = rng(seed);
        let m = random_artinian(&mut r, kind, 5).unwrap();
        let ring = m.module.ring().clone();
        let mut a: Vec<u32> = (0..ring.dim()).map(|_| r.gen_range(0..ring.field().size())).collect();
        a[0] = 1 + r.gen_range(0..ring.field().size() - 1);
        let tw = twist_by_unit_line(&m, &a).unwrap();
        prop_assert!(tw.validate().valid);
        prop_assert_eq!(tw.is_nilpotent(), m.is_nilpotent());
    }

    #[test]
    fn unitalization_is_unit_and_nil_isomorphic(seed: u64) {
        let m = random_artinian(&mut rng(seed), Kind::Cartier, 5).unwrap();
        match unitalize(&m, DEFAULT_MAX_STEPS).unwrap() {
            UnitalizeOutcome::Stabilized(u) => {
                prop_assert!(is_unit(&u.module).unwrap());
                prop_assert!(u.certificate.is_nil_isomorphism);
                prop_assert_eq!(u.module.dim() == 0, m.is_nilpotent());
            }
            UnitalizeOutcome::NotStabilized { .. } => prop_assert!(false, "did not stabilize"),
        }
    }

    #[test]
    fn double_dual_and_nilpotence_exchange(seed: u64, cartier: bool) {
        let kind = if cartier { Kind::Cartier } else { Kind::Frobenius };
        let m = random_artinian(&mut rng(seed), kind, 5).unwrap();
        prop_assert!(double_dual_check(&m).unwrap().holds());
        prop_assert_eq!(dualize(&m).unwrap().module.is_nilpotent(), m.is_nilpotent());
    }

    #[test]
    fn dual_of_unit_twist_is_inverse_twist(seed: u64) {
        let mut r = rng(seed);
        let m = random_artinian(&mut r, Kind::Cartier, 5).unwrap();
        let ring = m.module.ring().clone();
        let mut a: Vec<u32> = (0..ring.dim()).map(|_| r.gen_range(0..ring.field().size())).collect();
        a[0] = 1 + r.gen_range(0..ring.field().size() - 1);
        let lhs = dualize(&twist_by_unit_line(&m, &a).unwrap()).unwrap().module;
        let d = dualize(&m).unwrap().module;
        let rhs = twist_by_unit_line(&d, &ring.inverse(&a).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn dual_commutes_with_iteration(seed: u64, s in 1u32..4) {
        let m = random_artinian(&mut rng(seed), Kind::Cartier, 5).unwrap();
        let lhs = dualize(&iterate_structure(&m, s).unwrap()).unwrap().module;
        let rhs = iterate_structure(&dualize(&m).unwrap().module, s).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn sol_geometric_dim_additive_and_basis_free(seed: u64) {
        let mut r = rng(seed);
        let a = random_artinian(&mut r, Kind::Frobenius, 3).unwrap();
        let ring = a.module.ring().clone();
        let mb = forge::random::random_module(&ring, &mut r, 3).unwrap();
        let b = forge::random::random_structure(&mb, Kind::Frobenius, &mut r).unwrap();
        let sum = a.direct_sum(&b).unwrap();
        let g = |m: &forge::StructuredModule| sol_point(m, 1).unwrap().geometric_dim;
        prop_assert_eq!(g(&sum), g(&a) + g(&b));
        let p = random_invertible(ring.field(), a.dim(), &mut r);
        prop_assert_eq!(g(&a.change_basis(&p).unwrap()), g(&a));
    }
}

fn random_poly_matrix(field: &Field, rows: usize, cols: usize, seed: u64) -> PolyMatrix {
    let mut r = rng(seed);
    let mut m = PolyMatrix::zeros(field, rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            let deg = r.gen_range(0..3);
            let c: Vec<u32> = (0..=deg).map(|_| r.gen_range(0..field.size())).collect();
            m.set(i, j, Poly::new(field, c));
        }
    }
    m
}

fn coker_dims(p: &PolyMatrix) -> (usize, usize) {
    let pm = forge::PresModule::new(p.clone());
    (pm.torsion_dim(), pm.free_rank)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn smith_form_is_a_divisibility_chain(p in prop::sample::select(vec![2u32, 3]), rows in 1usize..4, cols in 0usize..4, seed: u64) {
        let f = Field::base(p, 1).unwrap();
        let m = random_poly_matrix(&f, rows, cols, seed);
        let s = smith_normal_form(&m);
        let nz: Vec<&Poly> = s.diag.iter().filter(|d| !d.is_zero()).collect();
        for w in nz.windows(2) {
            prop_assert!(w[0].divides(w[1]));
        }
        let zero_after = s.diag.iter().position(|d| d.is_zero()).unwrap_or(s.diag.len());
        prop_assert!(s.diag[zero_after..].iter().all(|d| d.is_zero()));
        let prod = s.u.mul(&m).unwrap().mul(&s.v).unwrap();
        for i in 0..rows {
            for j in 0..cols {
                let want = if i == j { s.diag[i].clone() } else { Poly::zero(&f) };
                prop_assert_eq!(prod.get(i, j), &want);
            }
        }
    }

    #[test]
    fn pushforward_presentation_preserves_cokernel(p in prop::sample::select(vec![2u32, 3]), rows in 1usize..3, cols in 0usize..3, seed: u64) {
        let f = Field::base(p, 1).unwrap();
        let q = p as u64;
        let m = random_poly_matrix(&f, rows, cols, seed);
        let (t, r) = coker_dims(&m);
        let (tp, rp) = coker_dims(&frobenius_pushforward_presentation(&m, q));
        prop_assert_eq!(tp, t);
        prop_assert_eq!(rp, q as usize * r);
        let m2 = random_poly_matrix(&f, rows, cols, seed ^ 5);
        let mut sum = PolyMatrix::zeros(&f, 2 * rows, 2 * cols);
        for i in 0..rows {
            for j in 0..cols {
                sum.set(i, j, m.get(i, j).clone());
                sum.set(rows + i, cols + j, m2.get(i, j).clone());
            }
        }
        let a = coker_dims(&frobenius_pushforward_presentation(&sum, q));
        let b1 = coker_dims(&frobenius_pushforward_presentation(&m, q));
        let b2 = coker_dims(&frobenius_pushforward_presentation(&m2, q));
        prop_assert_eq!(a, (b1.0 + b2.0, b1.1 + b2.1));
    }

    #[test]
    fn matlis_duality_on_torsion(seed: u64, cartier: bool) {
        let kind = if cartier { Kind::Cartier } else { Kind::Frobenius };
        let f = Field::base(2 + (seed % 2) as u32, 1).unwrap();
        let m = random_pid_torsion(&f, &mut rng(seed), kind, 5).unwrap();
        let (prim, _) = m.primary_split();
        let d = matlis_dual(&m, None).unwrap();
        prop_assert_eq!(d.module.dim(), prim.cols());
        prop_assert!(d.module.validate().valid);
        let (a, _) = m.primary_split();
        let xm = forge::matrix::coordinates(&a, &m.torsion_x.mul(&a).unwrap()).unwrap();
        let om = forge::matrix::coordinates(&a, &m.torsion_op.mul(&a).unwrap()).unwrap();
        let local = PidModule::torsion(xm, om, kind).unwrap();
        prop_assert!(matlis_double_dual_check(&local).unwrap());
    }

    #[test]
    fn dual_of_torsion_is_perverse(seed: u64) {
        let f = Field::base(2 + (seed % 2) as u32, 1).unwrap();
        let m = random_pid_torsion(&f, &mut rng(seed), Kind::Cartier, 5).unwrap();
        let d = dualize_pid(&PidComplex::single(m.clone(), 0)).unwrap();
        prop_assert!(is_perverse(&d).unwrap().perverse);
        prop_assert_eq!(d.terms[0].1.torsion_dim(), m.torsion_dim());
        let ff = invariant_factors(&d.terms[0].1.torsion_x);
        prop_assert_eq!(ff, invariant_factors(&m.torsion_x));
    }

    #[test]
    fn inverse_hull_is_unit(p in prop::sample::select(vec![2u32, 3, 5]), n in 1usize..10) {
        let f = Field::base(p, 1).unwrap();
        let e = dualizing_module(&truncated_ring(&f, n).unwrap(), 1).unwrap();
        prop_assert!(e.is_unit);
        prop_assert!(is_unit(&e.module).unwrap());
    }
}

#[test]
fn zero_matrix_shapes() {
    let f = Field::base(2, 1).unwrap();
    let z = Matrix::zeros(&f, 0, 0);
    assert_eq!(stable_rank(&TwistedOperator::new(z, 1)).unwrap(), 0);
}
