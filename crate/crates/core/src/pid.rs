//! Finitely generated `F_q[x]`-modules with Cartier or Frobenius structure.
//!
//! A [`PidModule`] is a torsion part, an `F_q`-space with a (not necessarily
//! nilpotent) action of `x`, plus a free part of rank `ρ` whose structure is a
//! polynomial transition matrix `C`: `κ(g·e_i) = Σ_j κ_S(C_ji·g)·e_j` for
//! Cartier modules and `τ(g·e_i) = Σ_j C_ji·g^q·e_j` for F-modules.

use std::sync::Arc;

use serde::Serialize;

use crate::artinian::{hom_space, ArtinRing, FinModule, HomSpace};
use crate::crystal::{operator_nilpotency, Kind, Nilpotency, StructuredModule};
use crate::duality::{dualizing_module, kappa_s, pair_c_to_f_raw, pair_f_to_c_raw};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::{coordinates, Matrix};
use crate::poly::{smith_normal_form, Poly, PolyMatrix, Smith};
use crate::semilinear::TwistedOperator;

/// Module `F_q[x]^n / P·F_q[x]^m` with cached Smith data.
#[derive(Clone, Debug)]
pub struct PresModule {
    pub pres: PolyMatrix,
    pub smith: Smith,
    /// Non-unit nonzero invariant factors, monic.
    pub factors: Vec<Poly>,
    pub free_rank: usize,
}

impl PresModule {
    pub fn new(pres: PolyMatrix) -> PresModule {
        let smith = smith_normal_form(&pres);
        let nonzero = smith.diag.iter().filter(|d| !d.is_zero()).count();
        let factors = smith
            .diag
            .iter()
            .filter(|d| !d.is_zero() && !d.is_constant())
            .cloned()
            .collect();
        PresModule {
            free_rank: pres.rows() - nonzero,
            pres,
            smith,
            factors,
        }
    }

    pub fn field(&self) -> &Field {
        self.pres.field()
    }

    pub fn torsion_dim(&self) -> usize {
        self.factors.iter().map(|f| f.degree().unwrap_or(0)).sum()
    }

    pub fn is_torsion(&self) -> bool {
        self.free_rank == 0
    }

    /// Action of `x` on `⊕ F_q[x]/(f_i)` in the basis `x^k` of each block.
    pub fn torsion_action(&self) -> Matrix {
        let blocks: Vec<Matrix> = self.factors.iter().map(companion).collect();
        let mut acc = Matrix::zeros(self.field(), 0, 0);
        for b in &blocks {
            acc = acc.block_diag(b).expect("same field");
        }
        acc
    }
}

/// Multiplication by `x` on `F_q[x]/(f)`, `f` monic.
pub fn companion(f: &Poly) -> Matrix {
    let field = f.field();
    let d = f.degree().unwrap_or(0);
    let mut m = Matrix::zeros(field, d, d);
    for k in 0..d {
        if k + 1 < d {
            m.set(k + 1, k, 1);
        } else {
            for (i, &c) in f.coeffs().iter().take(d).enumerate() {
                m.set(i, k, field.neg(c));
            }
        }
    }
    m
}

/// `g(X)`.
pub fn poly_action(x: &Matrix, g: &Poly) -> Matrix {
    let f = x.field();
    let n = x.rows();
    let mut acc = Matrix::zeros(f, n, n);
    for &c in g.coeffs().iter().rev() {
        acc = acc
            .mul(x)
            .expect("square")
            .add(&Matrix::scalar(f, n, c))
            .expect("square");
    }
    acc
}

/// Invariant factors of the `F_q[x]`-module `(F_q^n, X)`, from the Smith form
/// of `x·I − X`.
pub fn invariant_factors(x: &Matrix) -> Vec<Poly> {
    let f = x.field();
    let n = x.rows();
    let mut p = PolyMatrix::zeros(f, n, n);
    for i in 0..n {
        for j in 0..n {
            let mut c = vec![f.neg(x.get(i, j))];
            if i == j {
                c.push(1);
            }
            p.set(i, j, Poly::new(f, c));
        }
    }
    PresModule::new(p).factors
}

/// `F_q[x]/(x^n)`.
pub fn truncated_ring(field: &Field, n: usize) -> Result<Arc<ArtinRing>> {
    ArtinRing::new(field, vec!["x".into()], vec![vec![n as u32]])
}

#[derive(Clone, Debug)]
pub struct PidModule {
    pub field: Field,
    pub twist: i32,
    pub torsion_x: Matrix,
    pub torsion_op: Matrix,
    pub free: PolyMatrix,
}

impl PidModule {
    pub fn new(
        torsion_x: Matrix,
        torsion_op: Matrix,
        free: PolyMatrix,
        twist: i32,
    ) -> Result<PidModule> {
        let field = torsion_x.field().clone();
        if twist == 0 {
            return Err(Error::InvalidStructure(
                "structure must have nonzero twist".into(),
            ));
        }
        let d = torsion_x.rows();
        if !torsion_x.is_square() || torsion_op.rows() != d || torsion_op.cols() != d {
            return Err(Error::DimensionMismatch(
                "torsion data must be square of equal size".into(),
            ));
        }
        if free.rows() != free.cols() {
            return Err(Error::DimensionMismatch(
                "free transition matrix must be square".into(),
            ));
        }
        if *free.field() != field || *torsion_op.field() != field {
            return Err(Error::FieldMismatch(
                "PID module data over different fields".into(),
            ));
        }
        Ok(PidModule {
            field,
            twist,
            torsion_x,
            torsion_op,
            free,
        })
    }

    pub fn torsion(x: Matrix, op: Matrix, kind: Kind) -> Result<PidModule> {
        let f = x.field().clone();
        PidModule::new(x, op, PolyMatrix::zeros(&f, 0, 0), kind.sign())
    }

    pub fn free_diagonal(field: &Field, cs: &[Poly], kind: Kind) -> Result<PidModule> {
        PidModule::new(
            Matrix::zeros(field, 0, 0),
            Matrix::zeros(field, 0, 0),
            PolyMatrix::diagonal(field, cs),
            kind.sign(),
        )
    }

    /// Structure on the canonical torsion basis of a presentation.
    pub fn from_presentation(
        pres: &PresModule,
        torsion_op: Matrix,
        free: PolyMatrix,
        kind: Kind,
    ) -> Result<PidModule> {
        if free.rows() != pres.free_rank {
            return Err(Error::DimensionMismatch(format!(
                "free structure of size {} for free rank {}",
                free.rows(),
                pres.free_rank
            )));
        }
        PidModule::new(pres.torsion_action(), torsion_op, free, kind.sign())
    }

    pub fn kind(&self) -> Kind {
        if self.twist < 0 {
            Kind::Cartier
        } else {
            Kind::Frobenius
        }
    }

    pub fn exponent(&self) -> u32 {
        self.twist.unsigned_abs()
    }

    pub fn qe(&self) -> u64 {
        self.field.q().pow(self.exponent())
    }

    pub fn torsion_dim(&self) -> usize {
        self.torsion_x.rows()
    }

    pub fn free_rank(&self) -> usize {
        self.free.rows()
    }

    pub fn is_torsion(&self) -> bool {
        self.free_rank() == 0
    }

    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        let x = &self.torsion_x;
        let a = &self.torsion_op;
        let xq = x.pow(self.qe()).expect("square");
        let ok = match self.kind() {
            Kind::Cartier => a.mul(&xq).ok() == x.mul(a).ok(),
            Kind::Frobenius => a.mul(x).ok() == xq.mul(a).ok(),
        };
        if !ok {
            out.push(match self.kind() {
                Kind::Cartier => format!("K·x^{} != x·K on the torsion part", self.qe()),
                Kind::Frobenius => format!("T·x != x^{}·T on the torsion part", self.qe()),
            });
        }
        out
    }

    /// Diagonal entries of the free structure, if it is diagonal.
    pub fn free_diagonal_entries(&self) -> Option<Vec<Poly>> {
        let n = self.free_rank();
        for i in 0..n {
            for j in 0..n {
                if i != j && !self.free.get(i, j).is_zero() {
                    return None;
                }
            }
        }
        Some((0..n).map(|i| self.free.get(i, i).clone()).collect())
    }

    pub fn torsion_part(&self) -> PidModule {
        PidModule {
            free: PolyMatrix::zeros(&self.field, 0, 0),
            ..self.clone()
        }
    }

    pub fn free_part(&self) -> PidModule {
        PidModule {
            torsion_x: Matrix::zeros(&self.field, 0, 0),
            torsion_op: Matrix::zeros(&self.field, 0, 0),
            ..self.clone()
        }
    }

    fn torsion_twisted(&self) -> TwistedOperator {
        TwistedOperator::new(self.torsion_op.clone(), self.twist)
    }

    /// The `x`-primary part `Γ_x` and the complementary summand, as bases.
    pub fn primary_split(&self) -> (Matrix, Matrix) {
        let n = self.torsion_dim();
        let p = self.torsion_x.pow(n.max(1) as u64).expect("square");
        (p.kernel(), p.image())
    }

    fn restrict_torsion(&self, b: &Matrix) -> Result<(Matrix, Matrix)> {
        let x = coordinates(b, &self.torsion_x.mul(b)?)?;
        let op = coordinates(b, &self.torsion_op.mul(b)?).map_err(|_| {
            Error::InvalidStructure("summand is not stable under the structure".into())
        })?;
        Ok((x, op))
    }

    /// Nilpotency of the structure on the `x`-primary part and on the rest.
    pub fn torsion_nilpotency(&self) -> Result<(Nilpotency, Nilpotency)> {
        let (a, b) = self.primary_split();
        let (_, oa) = self.restrict_torsion(&a)?;
        let (_, ob) = self.restrict_torsion(&b)?;
        Ok((
            operator_nilpotency(&TwistedOperator::new(oa, self.twist)),
            operator_nilpotency(&TwistedOperator::new(ob, self.twist)),
        ))
    }

    pub fn torsion_nilpotency_total(&self) -> Nilpotency {
        operator_nilpotency(&self.torsion_twisted())
    }

    /// Whether the free part's structure vanishes (the only nilpotent case
    /// for diagonal structures).
    pub fn free_structure_nilpotent(&self) -> Result<bool> {
        let diag = self
            .free_diagonal_entries()
            .ok_or_else(|| Error::Unsupported("non-diagonal structure on the free part".into()))?;
        Ok(diag.iter().all(|c| c.is_zero()))
    }
}

/// `x`-primary torsion as a structured module over `F_q[x]/(x^N)`.
pub fn x_primary_module(m: &PidModule) -> Result<(StructuredModule, Matrix)> {
    let (a, _) = m.primary_split();
    let (x, op) = m.restrict_torsion(&a)?;
    let n = match operator_nilpotency(&TwistedOperator::new(x.clone(), 0)) {
        Nilpotency::Finite(n) => n,
        Nilpotency::Infinite => unreachable!("x is nilpotent on the x-primary part"),
    };
    let ring = truncated_ring(&m.field, n.max(1))?;
    let module = FinModule::new(&ring, x.rows(), vec![x])?;
    Ok((
        StructuredModule::checked(module, TwistedOperator::new(op, m.twist))?,
        a,
    ))
}

/// Cartier structure on the truncation `E_n = span{x^{-1}, …, x^{-n}}` of
/// `H^1_x` of `(F_q[x], κ_S(c·))`, read off the Čech complex:
/// `κ(x^{-a}) = κ_S(c·x^{Qm-a})·x^{-m}` modulo `F_q[x]` with `Qm ≥ a`.
pub fn cech_inverse_structure(c: &Poly, qe: u64, n: usize) -> Matrix {
    let field = c.field();
    let mut k = Matrix::zeros(field, n, n);
    for a in 1..=n {
        let m = a.div_ceil(qe as usize);
        let g = kappa_s(&c.mul(&Poly::monomial(field, qe as usize * m - a, 1)), qe);
        for (t, &coef) in g.coeffs().iter().enumerate() {
            if t < m && coef != 0 {
                k.set(m - t - 1, a - 1, coef);
            }
        }
    }
    k
}

/// One free summand's contribution to `H^1_x`.
#[derive(Clone, Debug, Serialize)]
pub struct InverseSummand {
    pub kind: Kind,
    pub coefficient: Vec<u32>,
    /// Nilpotence of the structure on the whole (infinite) `E`.
    pub strictly_nilpotent: bool,
    /// Nilpotency indices on the truncations `E_n`, Cartier case only.
    pub truncated_indices: Vec<(usize, Nilpotency)>,
}

#[derive(Clone, Debug)]
pub struct LocalCohomology {
    pub h0: StructuredModule,
    pub h1: Vec<InverseSummand>,
}

impl LocalCohomology {
    pub fn h0_nilpotent(&self) -> bool {
        self.h0.is_nilpotent()
    }
    pub fn h1_nilpotent(&self) -> bool {
        self.h1.iter().all(|s| s.strictly_nilpotent)
    }
}

pub fn cech_local_cohomology(m: &PidModule) -> Result<LocalCohomology> {
    let (h0, _) = x_primary_module(m)?;
    let diag = m.free_diagonal_entries().ok_or_else(|| {
        Error::Unsupported("H^1 of a free part with non-diagonal structure".into())
    })?;
    let qe = m.qe();
    let h1 = diag
        .iter()
        .map(|c| {
            let truncated_indices = match m.kind() {
                Kind::Cartier => [qe as usize, (qe * qe) as usize, (qe * qe * qe) as usize]
                    .into_iter()
                    .map(|n| {
                        let k = cech_inverse_structure(c, qe, n);
                        (n, operator_nilpotency(&TwistedOperator::new(k, m.twist)))
                    })
                    .collect(),
                Kind::Frobenius => vec![],
            };
            InverseSummand {
                kind: m.kind(),
                coefficient: c.coeffs().to_vec(),
                strictly_nilpotent: c.is_zero(),
                truncated_indices,
            }
        })
        .collect();
    Ok(LocalCohomology { h0, h1 })
}

#[derive(Clone, Debug)]
pub struct MatlisDual {
    pub module: StructuredModule,
    pub hom: HomSpace,
    pub truncation: usize,
}

pub fn default_truncation(m: &PidModule) -> usize {
    let deg = invariant_factors(&m.torsion_x)
        .iter()
        .filter_map(|f| f.degree())
        .max()
        .unwrap_or(0);
    (4 * deg).max(1)
}

/// `Hom(M, E_N)` with the paired structure, for torsion `M`.
pub fn matlis_dual(m: &PidModule, truncation: Option<usize>) -> Result<MatlisDual> {
    if !m.is_torsion() {
        return Err(Error::NotTorsion);
    }
    let n = truncation.unwrap_or_else(|| default_truncation(m));
    let ring = truncated_ring(&m.field, n)?;
    let e = dualizing_module(&ring, m.exponent())?;
    let xe = e.module.module.actions()[0].clone();
    let ke = e.module.mat().clone();
    let d = m.torsion_dim();
    let hs = hom_space(
        &m.field,
        std::slice::from_ref(&m.torsion_x),
        std::slice::from_ref(&xe),
        d,
        n,
    )?;
    let (mat, twist) = match m.kind() {
        Kind::Cartier => {
            let lam_m = (0..n)
                .map(|k| m.torsion_x.pow(k as u64))
                .collect::<Result<Vec<_>>>()?;
            let lam_e = (0..n)
                .map(|k| xe.pow(k as u64))
                .collect::<Result<Vec<_>>>()?;
            (
                pair_c_to_f_raw(&hs, &m.torsion_op, &lam_m, &ke, &lam_e)?,
                m.exponent() as i32,
            )
        }
        Kind::Frobenius => (
            pair_f_to_c_raw(&hs, &m.torsion_op, &ke)?,
            -(m.exponent() as i32),
        ),
    };
    let act = hs.induced(|h| xe.mul(h))?;
    let module = FinModule::new(&ring, hs.dim(), vec![act])?;
    let module = StructuredModule::checked(module, TwistedOperator::new(mat, twist))?;
    Ok(MatlisDual {
        module,
        hom: hs,
        truncation: n,
    })
}

/// The dual as a torsion PID module again.
pub fn matlis_dual_pid(m: &PidModule, truncation: Option<usize>) -> Result<PidModule> {
    let d = matlis_dual(m, truncation)?;
    PidModule::torsion(
        d.module.module.actions()[0].clone(),
        d.module.mat().clone(),
        d.module.kind(),
    )
    .map(|mut p| {
        p.twist = d.module.op.twist;
        p
    })
}

/// Evaluation `M → Hom(Hom(M, E), E)` for torsion `M` supported at the
/// origin; returns whether it is a structure-preserving isomorphism.
pub fn matlis_double_dual_check(m: &PidModule) -> Result<bool> {
    let (a, _) = m.primary_split();
    if a.cols() != m.torsion_dim() {
        return Err(Error::Unsupported(
            "double Matlis dual needs x-primary torsion".into(),
        ));
    }
    let n = default_truncation(m);
    let d1 = matlis_dual(m, Some(n))?;
    let dp = matlis_dual_pid(m, Some(n))?;
    let d2 = matlis_dual(&dp, Some(n))?;
    let field = &m.field;
    let cols = (0..m.torsion_dim())
        .map(|j| {
            let imgs: Vec<Vec<u32>> = d1.hom.basis.iter().map(|h| h.column(j)).collect();
            d2.hom.coords(&Matrix::from_columns(field, n, &imgs))
        })
        .collect::<Result<Vec<_>>>()?;
    let ev = Matrix::from_columns(field, d2.hom.dim(), &cols);
    Ok(ev.is_invertible()
        && ev.mul(&m.torsion_op)? == d2.module.mat().mul(&ev)?
        && ev.mul(&m.torsion_x)? == d2.module.module.actions()[0].mul(&ev)?)
}

/// `g^{-1}R/R ≅ R/(g)` in the basis `x^k`, with `κ(h) = κ_S(h·g^{Q-1}) mod g`.
pub fn torsion_hull(g: &Poly, qe: u64) -> Result<(Matrix, Matrix)> {
    let field = g.field();
    let g = g.monic();
    let d = g.degree().unwrap_or(0);
    let gq = g.pow(qe - 1);
    let mut k = Matrix::zeros(field, d, d);
    for j in 0..d {
        let img = kappa_s(&Poly::monomial(field, j, 1).mul(&gq), qe).rem(&g)?;
        for (i, &c) in img.coeffs().iter().enumerate() {
            k.set(i, j, c);
        }
    }
    Ok((companion(&g), k))
}

/// `Ext^1(M, R) = Hom(M, K/R)` for torsion `M`, computed as `Hom(M, g^{-1}R/R)`
/// with `g` the minimal polynomial of `x` on `M`, as a torsion module of the
/// opposite kind.
pub fn torsion_dual(m: &PidModule) -> Result<PidModule> {
    if !m.is_torsion() {
        return Err(Error::NotTorsion);
    }
    let field = &m.field;
    let d = m.torsion_dim();
    let g = invariant_factors(&m.torsion_x)
        .last()
        .cloned()
        .unwrap_or_else(|| Poly::one(field));
    let (xe, ke) = torsion_hull(&g, m.qe())?;
    let n = xe.rows();
    let hs = hom_space(
        field,
        std::slice::from_ref(&m.torsion_x),
        std::slice::from_ref(&xe),
        d,
        n,
    )?;
    let mat = match m.kind() {
        Kind::Cartier => {
            let lam_m = (0..n)
                .map(|k| m.torsion_x.pow(k as u64))
                .collect::<Result<Vec<_>>>()?;
            let lam_e = (0..n)
                .map(|k| xe.pow(k as u64))
                .collect::<Result<Vec<_>>>()?;
            pair_c_to_f_raw(&hs, &m.torsion_op, &lam_m, &ke, &lam_e)?
        }
        Kind::Frobenius => pair_f_to_c_raw(&hs, &m.torsion_op, &ke)?,
    };
    let act = hs.induced(|h| xe.mul(h))?;
    let out = PidModule::new(act, mat, PolyMatrix::zeros(field, 0, 0), -m.twist)?;
    let bad = out.validate();
    if !bad.is_empty() {
        return Err(Error::NotEquivariant(bad.join("; ")));
    }
    Ok(out)
}

/// Basis of all structures of the given kind on the torsion module `(F_q^n, X)`.
pub fn torsion_structure_space(x: &Matrix, kind: Kind, e: u32) -> Result<Vec<Matrix>> {
    let q = x.field().q().pow(e);
    let xq = x.pow(q)?;
    let d = x.rows();
    let hs = match kind {
        Kind::Cartier => hom_space(x.field(), &[xq], std::slice::from_ref(x), d, d)?,
        Kind::Frobenius => hom_space(x.field(), std::slice::from_ref(x), &[xq], d, d)?,
    };
    Ok(hs.basis)
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalizationLayer {
    pub depth: usize,
    pub dim: usize,
    pub index: Nilpotency,
    pub valid: bool,
}

#[derive(Clone, Debug)]
pub struct LocalizationModel {
    pub model: PidModule,
    pub layers: Vec<LocalizationLayer>,
    pub certified: bool,
}

/// Coherent Cartier submodule `f^{-Q}·M` of `M_f` (free part) together with the
/// layers `f^{-Q-k}M / f^{-Q}M ≅ (R/f^k)^ρ` checked nilpotent for `k ≤ depth`.
/// On the torsion part `M_f` is the summand where `f` acts invertibly.
pub fn coherent_model_of_localization(
    m: &PidModule,
    f: &Poly,
    depth: usize,
) -> Result<LocalizationModel> {
    if f.is_zero() {
        return Err(Error::InvalidStructure("cannot localize at zero".into()));
    }
    if m.kind() != Kind::Cartier {
        return Err(Error::InvalidStructure(
            "localization model needs a Cartier module".into(),
        ));
    }
    let field = m.field.clone();
    let qe = m.qe();
    let n = m.torsion_dim();
    let fx = poly_action(&m.torsion_x, f).pow(n.max(1) as u64)?;
    let keep = fx.image();
    let (tx, top) = m.restrict_torsion(&keep)?;

    let scale = f.pow(qe * (qe - 1));
    let rho = m.free_rank();
    let mut free = PolyMatrix::zeros(&field, rho, rho);
    for i in 0..rho {
        for j in 0..rho {
            free.set(i, j, m.free.get(i, j).mul(&scale));
        }
    }
    let model = PidModule::new(tx, top, free, m.twist)?;

    let mut layers = Vec::new();
    let fd = f.degree().unwrap_or(0);
    if fd > 0 && rho > 0 {
        for k in 1..=depth {
            let modulus = f.pow(k as u64).monic();
            let block = modulus.degree().unwrap_or(0);
            let dim = block * rho;
            let x1 = companion(&modulus);
            let mut x = Matrix::zeros(&field, 0, 0);
            for _ in 0..rho {
                x = x.block_diag(&x1)?;
            }
            let twist = f.pow((qe - 1) * (qe + k as u64));
            let mut kbar = Matrix::zeros(&field, dim, dim);
            for i in 0..rho {
                for t in 0..block {
                    let g = Poly::monomial(&field, t, 1);
                    for j in 0..rho {
                        let img =
                            kappa_s(&m.free.get(j, i).mul(&twist).mul(&g), qe).rem(&modulus)?;
                        for (u, &c) in img.coeffs().iter().enumerate() {
                            kbar.set(j * block + u, i * block + t, c);
                        }
                    }
                }
            }
            let layer = PidModule::torsion(x, kbar, Kind::Cartier).map(|mut l| {
                l.twist = m.twist;
                l
            })?;
            layers.push(LocalizationLayer {
                depth: k,
                dim,
                index: layer.torsion_nilpotency_total(),
                valid: layer.validate().is_empty(),
            });
        }
    }
    let certified = layers.iter().all(|l| l.valid && l.index.is_finite());
    Ok(LocalizationModel {
        model,
        layers,
        certified,
    })
}
