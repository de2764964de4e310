//! Seeded random instances for the property suites.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::artinian::{ArtinRing, FinModule};
use crate::crystal::{structure_space, Kind, StructuredModule};
use crate::error::Result;
use crate::field::{Elem, Field};
use crate::matrix::Matrix;
use crate::pid::{companion, torsion_structure_space, PidModule};
use crate::poly::Poly;
use crate::semilinear::TwistedOperator;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_elem(field: &Field, rng: &mut impl Rng) -> Elem {
    rng.gen_range(0..field.size())
}

pub fn random_matrix(field: &Field, rows: usize, cols: usize, rng: &mut impl Rng) -> Matrix {
    Matrix::from_fn(field, rows, cols, |_, _| random_elem(field, rng))
}

pub fn random_invertible(field: &Field, n: usize, rng: &mut impl Rng) -> Matrix {
    loop {
        let m = random_matrix(field, n, n, rng);
        if m.is_invertible() {
            return m;
        }
    }
}

pub fn random_combination(
    field: &Field,
    basis: &[Matrix],
    rows: usize,
    cols: usize,
    rng: &mut impl Rng,
) -> Matrix {
    let mut acc = Matrix::zeros(field, rows, cols);
    for b in basis {
        let c = random_elem(field, rng);
        acc = acc.add(&b.scale(c)).expect("same shape");
    }
    acc
}

/// Monomial ring over `F_p` with `dim ≤ max_dim`, one or two variables.
pub fn random_ring(rng: &mut impl Rng, primes: &[u32], max_dim: usize) -> Result<Arc<ArtinRing>> {
    let p = *primes.choose(rng).expect("nonempty prime list");
    let field = Field::base(p, 1)?;
    let max_dim = max_dim.max(1);
    loop {
        let two = max_dim >= 2 && rng.gen_bool(0.5);
        let (vars, rels): (Vec<String>, Vec<Vec<u32>>) = if two {
            let a = rng.gen_range(1..=3u32);
            let b = rng.gen_range(1..=3u32);
            let mut rels = vec![vec![a, 0], vec![0, b]];
            if a > 1 && b > 1 && rng.gen_bool(0.5) {
                rels.push(vec![rng.gen_range(1..a), rng.gen_range(1..b)]);
            }
            (vec!["x".into(), "y".into()], rels)
        } else {
            (
                vec!["x".into()],
                vec![vec![rng.gen_range(1..=max_dim as u32)]],
            )
        };
        let ring = ArtinRing::new(&field, vars, rels)?;
        if ring.dim() <= max_dim {
            return Ok(ring);
        }
    }
}

/// Quotient of `R^k` by the submodule generated by random elements, with
/// `dim ≤ max_dim`, in a random basis.
pub fn random_module(
    ring: &Arc<ArtinRing>,
    rng: &mut impl Rng,
    max_dim: usize,
) -> Result<FinModule> {
    let field = ring.field().clone();
    if max_dim == 0 {
        return Ok(FinModule::zero(ring));
    }
    let k = rng.gen_range(1..=2usize);
    let n = k * ring.dim();
    let mut acts = Vec::new();
    for op in ring.mult_ops() {
        let mut b = Matrix::zeros(&field, 0, 0);
        for _ in 0..k {
            b = b.block_diag(op)?;
        }
        acts.push(b);
    }
    let free = FinModule::new(ring, n, acts)?;
    let monos = free.basis_actions();
    let mut gens = Matrix::zeros(&field, n, 0);
    let mut module = free.clone();
    while module.dim() > max_dim || (gens.cols() == 0 && rng.gen_bool(0.3)) {
        let v = random_matrix(&field, n, 1, rng);
        let span: Vec<Matrix> = monos.iter().map(|a| a.mul(&v)).collect::<Result<_>>()?;
        let mut all = gens.clone();
        for s in &span {
            all = all.hstack(s)?;
        }
        gens = all.image();
        module = free.quotient(&gens)?.0;
    }
    let p = random_invertible(&field, module.dim(), rng);
    module.change_basis(&p)
}

/// A random structure of the given kind drawn from the full structure space.
pub fn random_structure(
    module: &FinModule,
    kind: Kind,
    rng: &mut impl Rng,
) -> Result<StructuredModule> {
    let basis = structure_space(module, kind, 1)?;
    let d = module.dim();
    let mat = random_combination(module.field(), &basis, d, d, rng);
    StructuredModule::checked(module.clone(), TwistedOperator::new(mat, kind.sign()))
}

/// One element of the ART corpus: `p ∈ {2, 3}`, `dim R ≤ 6`, `dim M ≤ 5`.
pub fn random_artinian(rng: &mut impl Rng, kind: Kind, max_dim: usize) -> Result<StructuredModule> {
    let ring = random_ring(rng, &[2, 3], 6)?;
    let module = random_module(&ring, rng, max_dim)?;
    random_structure(&module, kind, rng)
}

pub fn artinian_corpus(seed: u64, count: usize, kind: Kind) -> Result<Vec<StructuredModule>> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| random_artinian(&mut r, kind, 5))
        .collect()
}

fn random_monic(field: &Field, deg: usize, rng: &mut impl Rng) -> Poly {
    let mut c: Vec<Elem> = (0..deg).map(|_| random_elem(field, rng)).collect();
    c.push(1);
    Poly::new(field, c)
}

/// Torsion module over `F_p[x]` with a random structure; factors are powers of
/// `x` or random monic polynomials, total dimension `≤ max_dim`.
pub fn random_pid_torsion(
    field: &Field,
    rng: &mut impl Rng,
    kind: Kind,
    max_dim: usize,
) -> Result<PidModule> {
    let field = field.clone();
    let mut x = Matrix::zeros(&field, 0, 0);
    let nblocks = rng.gen_range(1..=3);
    for _ in 0..nblocks {
        let room = max_dim.saturating_sub(x.rows());
        if room == 0 {
            break;
        }
        let deg = rng.gen_range(1..=room.min(3));
        let f = if rng.gen_bool(0.6) {
            Poly::monomial(&field, deg, 1)
        } else {
            random_monic(&field, deg, rng)
        };
        x = x.block_diag(&companion(&f))?;
    }
    let n = x.rows();
    let pm = random_invertible(&field, n, rng);
    let x = pm.inverse()?.mul(&x)?.mul(&pm)?;
    let basis = torsion_structure_space(&x, kind, 1)?;
    let op = random_combination(&field, &basis, n, n, rng);
    PidModule::torsion(x, op, kind)
}

pub fn pid_corpus(seed: u64, count: usize, kind: Kind) -> Result<Vec<PidModule>> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let p = *[2u32, 3].choose(&mut r).expect("nonempty");
            random_pid_torsion(&Field::base(p, 1)?, &mut r, kind, 5)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_reproducible_and_valid() {
        let a = artinian_corpus(7, 20, Kind::Cartier).unwrap();
        let b = artinian_corpus(7, 20, Kind::Cartier).unwrap();
        assert_eq!(a, b);
        for m in &a {
            assert!(m.dim() <= 5);
            assert!(m.module.ring().dim() <= 6);
            assert!(m.validate().valid);
        }
    }

    #[test]
    fn pid_corpus_is_valid() {
        for m in pid_corpus(3, 20, Kind::Cartier).unwrap() {
            assert!(m.validate().is_empty());
            assert!(m.torsion_dim() <= 5);
        }
    }
}
