//! Semilinear operators `v ↦ A·σ^e(v)` and their fixed points.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::matrix::Matrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistedOperator {
    pub mat: Matrix,
    pub twist: i32,
}

impl TwistedOperator {
    pub fn new(mat: Matrix, twist: i32) -> Self {
        TwistedOperator { mat, twist }
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        TwistedOperator::new(Matrix::identity(field, n), 0)
    }

    pub fn zero(field: &Field, n: usize, twist: i32) -> Self {
        TwistedOperator::new(Matrix::zeros(field, n, n), twist)
    }

    pub fn field(&self) -> &Field {
        self.mat.field()
    }

    pub fn dim(&self) -> usize {
        self.mat.cols()
    }

    pub fn apply(&self, v: &[Elem]) -> Result<Vec<Elem>> {
        let f = self.field();
        let tw: Vec<Elem> = v.iter().map(|&a| f.frob(a, self.twist as i64)).collect();
        self.mat.apply(&tw)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &TwistedOperator) -> Result<TwistedOperator> {
        twisted_compose(self, other)
    }

    /// The `n`-fold composite; `n = 0` gives the identity.
    pub fn power(&self, n: usize) -> Result<TwistedOperator> {
        let mut acc = TwistedOperator::identity(self.field(), self.dim());
        for _ in 0..n {
            acc = twisted_compose(self, &acc)?;
        }
        Ok(acc)
    }

    pub fn is_zero(&self) -> bool {
        self.mat.is_zero()
    }

    /// Ranks of `t^0, t^1, ..., t^n`.
    pub fn rank_chain(&self, n: usize) -> Result<Vec<usize>> {
        let mut out = vec![self.dim()];
        let mut acc = TwistedOperator::identity(self.field(), self.dim());
        for _ in 0..n {
            acc = twisted_compose(self, &acc)?;
            out.push(acc.mat.rank());
        }
        Ok(out)
    }

    /// Image of `t^{dim}` as column basis.
    pub fn stable_image(&self) -> Result<Matrix> {
        Ok(self.power(self.dim())?.mat.image())
    }

    /// Kernel of `t^{dim}` as column basis.
    pub fn stable_kernel(&self) -> Result<Matrix> {
        let p = self.power(self.dim())?;
        Ok(p.mat.kernel().frob(-(p.twist as i64)))
    }
}

pub fn twisted_compose(a: &TwistedOperator, b: &TwistedOperator) -> Result<TwistedOperator> {
    if a.field() != b.field() {
        return Err(Error::FieldMismatch(
            "twisted operators over different fields".into(),
        ));
    }
    if a.mat.cols() != b.mat.rows() {
        return Err(Error::DimensionMismatch(format!(
            "cannot compose {}x{} after {}x{}",
            a.mat.rows(),
            a.mat.cols(),
            b.mat.rows(),
            b.mat.cols()
        )));
    }
    Ok(TwistedOperator {
        mat: a.mat.mul(&b.mat.frob(a.twist as i64))?,
        twist: a.twist + b.twist,
    })
}

/// Rank of the `d`-fold composite, i.e. the dimension of the largest
/// subspace on which `t` is bijective.
pub fn stable_rank(t: &TwistedOperator) -> Result<usize> {
    if !t.mat.is_square() {
        return Err(Error::DimensionMismatch(
            "stable rank of a non-square operator".into(),
        ));
    }
    Ok(t.power(t.dim())?.mat.rank())
}

/// `P^{-1} · A · σ^e(P)`.
pub fn change_basis(t: &TwistedOperator, p: &Matrix) -> Result<TwistedOperator> {
    let inv = p.inverse()?;
    Ok(TwistedOperator {
        mat: inv.mul(&t.mat)?.mul(&p.frob(t.twist as i64))?,
        twist: t.twist,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FixedPoints {
    /// Field `F_{q^s}` in which the fixed vectors live.
    #[serde(skip)]
    pub field: Field,
    /// `F_q`-basis of the fixed space, as columns.
    pub basis: Matrix,
}

impl FixedPoints {
    pub fn dim(&self) -> usize {
        self.basis.cols()
    }
}

/// Solutions of `A·σ(v) = v` in `F_{q^s}^d`, as an `F_q`-basis. Here `q` is the
/// base of the operator's field and `s` extends it further.
pub fn semilinear_fixed_points(t: &TwistedOperator, s: u32) -> Result<FixedPoints> {
    if !t.mat.is_square() {
        return Err(Error::DimensionMismatch(
            "fixed points of a non-square operator".into(),
        ));
    }
    if t.twist != 1 {
        return Err(Error::InvalidStructure(format!(
            "fixed points need twist +1, got {}",
            t.twist
        )));
    }
    let small = t.field();
    let big = small.extension(s)?;
    let a = t.mat.embed(&big)?;
    let d = a.rows();
    let p = big.p();
    let n = big.degree() as usize;
    let prime = Field::base(p, 1)?;

    // F_p-coordinates: index (i, k) ↦ i·n + k, vector i-th entry digit k.
    let basis_units: Vec<Elem> = (0..n)
        .map(|k| {
            let mut dg = vec![0u32; n];
            dg[k] = 1;
            big.from_digits(&dg).expect("digit vector")
        })
        .collect();
    let mut cols = Vec::with_capacity(d * n);
    for i in 0..d {
        for &u in &basis_units {
            let mut v = vec![0; d];
            v[i] = u;
            let sv: Vec<Elem> = v.iter().map(|&x| big.frob(x, 1)).collect();
            let img = a.apply(&sv)?;
            let diff: Vec<Elem> = img.iter().zip(&v).map(|(&x, &y)| big.sub(x, y)).collect();
            cols.push(flatten(&big, &diff));
        }
    }
    let lin = Matrix::from_columns(&prime, d * n, &cols);
    let ker = lin.kernel();
    let fixed: Vec<Vec<Elem>> = ker
        .columns()
        .iter()
        .map(|c| unflatten(&big, c, d))
        .collect();

    // F_q-basis: greedy selection against the F_p-span of F_q-multiples.
    let base = big.base_field()?;
    let emb = big.embedding_from(&base)?;
    let r = base.degree() as usize;
    let fq_basis: Vec<Elem> = (0..r)
        .map(|k| {
            let mut dg = vec![0u32; r];
            dg[k] = 1;
            emb.apply(base.from_digits(&dg).expect("digit vector"))
        })
        .collect();
    let mut chosen: Vec<Vec<Elem>> = Vec::new();
    let mut span: Vec<Vec<Elem>> = Vec::new();
    for v in fixed {
        let mut trial = span.clone();
        for &c in &fq_basis {
            let w: Vec<Elem> = v.iter().map(|&x| big.mul(c, x)).collect();
            trial.push(flatten(&big, &w));
        }
        let before = Matrix::from_columns(&prime, d * n, &span).rank();
        let after = Matrix::from_columns(&prime, d * n, &trial).rank();
        if after > before {
            span = trial;
            chosen.push(v);
        }
    }
    Ok(FixedPoints {
        basis: Matrix::from_columns(&big, d, &chosen),
        field: big,
    })
}

fn flatten(f: &Field, v: &[Elem]) -> Vec<Elem> {
    v.iter().flat_map(|&x| f.digits(x)).collect()
}

fn unflatten(f: &Field, c: &[Elem], d: usize) -> Vec<Elem> {
    let n = f.degree() as usize;
    (0..d)
        .map(|i| {
            f.from_digits(&c[i * n..(i + 1) * n])
                .expect("digits in range")
        })
        .collect()
}

/// Fixed-space dimensions for `s = 1..=bound`, together with the first `s`
/// (if any) at which the dimension reaches the stable rank.
#[derive(Clone, Debug, Serialize)]
pub struct FixedPointSearch {
    pub stable_rank: usize,
    pub dims: Vec<(u32, usize)>,
    pub attained_at: Option<u32>,
}

pub fn default_search_bound(t: &TwistedOperator) -> u32 {
    (2 * t.dim() as u32 * t.field().r()).max(1)
}

pub fn fixed_point_search(t: &TwistedOperator, bound: u32) -> Result<FixedPointSearch> {
    let sr = stable_rank(t)?;
    let mut dims = Vec::new();
    let mut attained_at = None;
    for s in 1..=bound {
        let limit = t.field().size() as u64;
        if limit
            .checked_pow(s)
            .is_none_or(|v| v > crate::field::MAX_FIELD_SIZE)
        {
            break;
        }
        let d = semilinear_fixed_points(t, s)?.dim();
        dims.push((s, d));
        if d == sr {
            attained_at = Some(s);
            break;
        }
    }
    Ok(FixedPointSearch {
        stable_rank: sr,
        dims,
        attained_at,
    })
}
