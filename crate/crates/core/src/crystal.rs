//! Cartier modules and F-modules over Artinian rings.
//!
//! A [`StructuredModule`] is a [`FinModule`] together with a twisted operator.
//! Twist `-e` means a Cartier structure `K : F^e_*M → M` (so `K·X^{q^e} = X·K`),
//! twist `+e` an F-module structure `T : M → F^e_*M` (so `T·X = X^{q^e}·T`).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::artinian::{
    f_flat, hom_space, i_torsion, induced_on_quotient, restrict_scalars, FinModule, HomSpace,
};
use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::matrix::{coordinates, Matrix};
use crate::semilinear::{stable_rank, TwistedOperator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Cartier,
    Frobenius,
}

impl Kind {
    pub fn dual(self) -> Kind {
        match self {
            Kind::Cartier => Kind::Frobenius,
            Kind::Frobenius => Kind::Cartier,
        }
    }

    pub fn sign(self) -> i32 {
        match self {
            Kind::Cartier => -1,
            Kind::Frobenius => 1,
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Cartier => "cartier",
            Kind::Frobenius => "frobenius",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StructuredModule {
    pub module: FinModule,
    pub op: TwistedOperator,
}

pub type CartierModule = StructuredModule;
pub type FModule = StructuredModule;

/// Nilpotency index: least `n ≥ 1` with vanishing `n`-fold composite.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Nilpotency {
    Finite(usize),
    Infinite,
}

impl Nilpotency {
    pub fn is_finite(self) -> bool {
        matches!(self, Nilpotency::Finite(_))
    }
}

impl Serialize for Nilpotency {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Nilpotency::Finite(n) => s.serialize_u64(*n as u64),
            Nilpotency::Infinite => s.serialize_str("infinite"),
        }
    }
}

impl fmt::Display for Nilpotency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Nilpotency::Finite(n) => write!(f, "{n}"),
            Nilpotency::Infinite => f.write_str("infinite"),
        }
    }
}

/// Nilpotency of a square operator on a space of dimension `op.dim()`.
pub fn operator_nilpotency(op: &TwistedOperator) -> Nilpotency {
    let d = op.dim();
    let mut acc = op.clone();
    for n in 1..=d.max(1) {
        if acc.is_zero() {
            return Nilpotency::Finite(n);
        }
        acc = op.compose(&acc).expect("square operator");
    }
    Nilpotency::Infinite
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub violations: Vec<String>,
}

impl StructuredModule {
    pub fn new(module: FinModule, op: TwistedOperator) -> Result<StructuredModule> {
        if op.twist == 0 {
            return Err(Error::InvalidStructure(
                "structure must have nonzero twist".into(),
            ));
        }
        if op.mat.rows() != module.dim() || op.mat.cols() != module.dim() {
            return Err(Error::DimensionMismatch(format!(
                "structure matrix {}x{} on a module of dimension {}",
                op.mat.rows(),
                op.mat.cols(),
                module.dim()
            )));
        }
        if op.field() != module.field() {
            return Err(Error::FieldMismatch(
                "structure over a different field".into(),
            ));
        }
        Ok(StructuredModule { module, op })
    }

    pub fn cartier(module: FinModule, k: Matrix) -> Result<StructuredModule> {
        StructuredModule::new(module, TwistedOperator::new(k, -1))
    }

    pub fn frobenius(module: FinModule, t: Matrix) -> Result<StructuredModule> {
        StructuredModule::new(module, TwistedOperator::new(t, 1))
    }

    /// Like [`StructuredModule::new`] but rejects structures failing
    /// [`StructuredModule::validate`].
    pub fn checked(module: FinModule, op: TwistedOperator) -> Result<StructuredModule> {
        let m = StructuredModule::new(module, op)?;
        let rep = m.validate();
        if !rep.valid {
            return Err(Error::NotEquivariant(rep.violations.join("; ")));
        }
        Ok(m)
    }

    pub fn zero_structure(module: FinModule, kind: Kind) -> StructuredModule {
        let d = module.dim();
        let op = TwistedOperator::zero(module.field(), d, kind.sign());
        StructuredModule { module, op }
    }

    pub fn kind(&self) -> Kind {
        if self.op.twist < 0 {
            Kind::Cartier
        } else {
            Kind::Frobenius
        }
    }

    /// `e` for a structure relative to `q^e`.
    pub fn exponent(&self) -> u32 {
        self.op.twist.unsigned_abs()
    }

    pub fn dim(&self) -> usize {
        self.module.dim()
    }

    pub fn field(&self) -> &Field {
        self.module.field()
    }

    pub fn mat(&self) -> &Matrix {
        &self.op.mat
    }

    fn with_op(&self, mat: Matrix) -> StructuredModule {
        StructuredModule {
            module: self.module.clone(),
            op: TwistedOperator::new(mat, self.op.twist),
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = self.module.violations();
        let qe = self.module.ring().q().pow(self.exponent());
        let a = self.mat();
        for (i, x) in self.module.actions().iter().enumerate() {
            let xq = x.pow(qe).expect("square");
            let (lhs, rhs) = match self.kind() {
                Kind::Cartier => (a.mul(&xq), x.mul(a)),
                Kind::Frobenius => (a.mul(x), xq.mul(a)),
            };
            if lhs.expect("shape") != rhs.expect("shape") {
                let v = &self.module.ring().vars()[i];
                violations.push(match self.kind() {
                    Kind::Cartier => format!("K·{v}^{qe} != {v}·K"),
                    Kind::Frobenius => format!("T·{v} != {v}^{qe}·T"),
                });
            }
        }
        ValidationReport {
            valid: violations.is_empty(),
            violations,
        }
    }

    pub fn nilpotency_index(&self) -> Nilpotency {
        operator_nilpotency(&self.op)
    }

    pub fn is_nilpotent(&self) -> bool {
        self.nilpotency_index().is_finite()
    }

    pub fn stable_rank(&self) -> usize {
        stable_rank(&self.op).expect("square operator")
    }

    /// Restriction to the stable submodule spanned by the columns of `b`.
    pub fn restrict(&self, b: &Matrix) -> Result<StructuredModule> {
        let module = self.module.submodule(b)?;
        let img = self.mat().mul(b)?;
        let mat = coordinates(b, &img).map_err(|_| {
            Error::InvalidStructure("subspace is not stable under the structure".into())
        })?;
        StructuredModule::new(module, TwistedOperator::new(mat, self.op.twist))
    }

    /// Quotient by the stable submodule spanned by the columns of `b`.
    pub fn quotient(&self, b: &Matrix) -> Result<(StructuredModule, Vec<usize>)> {
        let (module, comp) = self.module.quotient(b)?;
        let mat = induced_on_quotient(self.mat(), b, &comp)?;
        Ok((
            StructuredModule::new(module, TwistedOperator::new(mat, self.op.twist))?,
            comp,
        ))
    }

    pub fn direct_sum(&self, o: &StructuredModule) -> Result<StructuredModule> {
        if self.op.twist != o.op.twist {
            return Err(Error::InvalidStructure(
                "direct sum of different structure types".into(),
            ));
        }
        let module = self.module.direct_sum(&o.module)?;
        let mat = self.mat().block_diag(o.mat())?;
        StructuredModule::new(module, TwistedOperator::new(mat, self.op.twist))
    }

    /// Transport along the basis change `p` (new basis = columns of `p`).
    pub fn change_basis(&self, p: &Matrix) -> Result<StructuredModule> {
        let module = self.module.change_basis(p)?;
        let op = crate::semilinear::change_basis(&self.op, p)?;
        StructuredModule::new(module, op)
    }
}

/// Stable image `κ^d(M)` of a Cartier module, or stable kernel of an
/// F-module; returned with its inclusion.
pub fn stable_part(m: &StructuredModule) -> Result<(StructuredModule, Matrix)> {
    let b = match m.kind() {
        Kind::Cartier => m.op.stable_image()?,
        Kind::Frobenius => m.op.stable_kernel()?,
    };
    Ok((m.restrict(&b)?, b))
}

pub fn stable_image(m: &CartierModule) -> Result<(CartierModule, Matrix)> {
    if m.kind() != Kind::Cartier {
        return Err(Error::InvalidStructure(
            "stable image needs a Cartier module".into(),
        ));
    }
    stable_part(m)
}

pub fn stable_kernel(m: &FModule) -> Result<(FModule, Matrix)> {
    if m.kind() != Kind::Frobenius {
        return Err(Error::InvalidStructure(
            "stable kernel needs an F-module".into(),
        ));
    }
    stable_part(m)
}

/// Whether `m` vanishes as a crystal.
pub fn crystal_is_zero(m: &StructuredModule) -> Result<bool> {
    let (s, _) = stable_part(m)?;
    Ok(match m.kind() {
        Kind::Cartier => s.dim() == 0,
        Kind::Frobenius => s.dim() == m.dim(),
    })
}

/// `m ↦ (F_*λ ↦ κ(F_*(λ m)))` as a matrix into `F^{e,♭}M`.
#[derive(Clone, Debug)]
pub struct AdjointMap {
    pub target: FinModule,
    pub hom: HomSpace,
    pub matrix: Matrix,
}

impl AdjointMap {
    pub fn is_bijective(&self) -> bool {
        self.matrix.is_invertible()
    }
}

pub fn adjoint_structural(m: &CartierModule) -> Result<AdjointMap> {
    if m.kind() != Kind::Cartier {
        return Err(Error::InvalidStructure(
            "adjoint map needs a Cartier module".into(),
        ));
    }
    let (target, hom) = f_flat(&m.module, m.exponent())?;
    let lam = m.module.basis_actions();
    let k = m.mat();
    let d = m.dim();
    let mut imgs = Vec::with_capacity(d);
    for j in 0..d {
        let cols: Vec<Vec<Elem>> = lam
            .iter()
            .map(|l| k.apply(&l.column(j)).expect("shape"))
            .collect();
        imgs.push(Matrix::from_columns(m.field(), d, &cols));
    }
    let matrix = hom.coords_matrix(&imgs)?;
    for (x, y) in m.module.actions().iter().zip(target.actions()) {
        if matrix.mul(x)? != y.mul(&matrix)? {
            return Err(Error::NotEquivariant("adjoint map is not R-linear".into()));
        }
    }
    Ok(AdjointMap {
        target,
        hom,
        matrix,
    })
}

pub fn is_unit(m: &CartierModule) -> Result<bool> {
    if m.dim() == 0 {
        return Ok(true);
    }
    Ok(adjoint_structural(m)?.is_bijective())
}

#[derive(Clone, Debug, Serialize)]
pub struct NilIsoReport {
    pub kernel_dim: usize,
    pub cokernel_dim: usize,
    pub kernel_index: Nilpotency,
    pub cokernel_index: Nilpotency,
    pub is_nil_isomorphism: bool,
}

/// Checks that `f : src → tgt` is structure-preserving and that kernel and
/// cokernel are nilpotent.
pub fn nil_isomorphism_check(
    f: &Matrix,
    src: &StructuredModule,
    tgt: &StructuredModule,
) -> Result<NilIsoReport> {
    if src.op.twist != tgt.op.twist {
        return Err(Error::NotEquivariant(
            "source and target carry different structure types".into(),
        ));
    }
    if f.rows() != tgt.dim() || f.cols() != src.dim() {
        return Err(Error::DimensionMismatch(
            "map shape does not match the modules".into(),
        ));
    }
    for (x, y) in src.module.actions().iter().zip(tgt.module.actions()) {
        if f.mul(x)? != y.mul(f)? {
            return Err(Error::NotEquivariant("map is not R-linear".into()));
        }
    }
    if f.mul(src.mat())? != tgt.mat().mul(f)? {
        return Err(Error::NotEquivariant(
            "map does not commute with the structures".into(),
        ));
    }
    let ker = src.restrict(&f.kernel())?;
    let (coker, _) = tgt.quotient(&f.image())?;
    let kernel_index = ker.nilpotency_index();
    let cokernel_index = coker.nilpotency_index();
    Ok(NilIsoReport {
        kernel_dim: ker.dim(),
        cokernel_dim: coker.dim(),
        kernel_index,
        cokernel_index,
        is_nil_isomorphism: kernel_index.is_finite() && cokernel_index.is_finite(),
    })
}

/// Replace the structure by its `s`-fold composite.
pub fn iterate_structure(m: &StructuredModule, s: u32) -> Result<StructuredModule> {
    if s == 0 {
        return Err(Error::InvalidStructure(
            "iteration count must be positive".into(),
        ));
    }
    StructuredModule::new(m.module.clone(), m.op.power(s as usize)?)
}

/// Tensor with the unit line `τ(v) = a·v`: `K·μ(a^{-1})` on Cartier modules,
/// `μ(a)·T` on F-modules.
pub fn twist_by_unit_line(m: &StructuredModule, a: &[Elem]) -> Result<StructuredModule> {
    let ring = m.module.ring();
    if a.len() != ring.dim() {
        return Err(Error::DimensionMismatch(
            "ring element has the wrong length".into(),
        ));
    }
    let mat = match m.kind() {
        Kind::Cartier => {
            let inv = ring.inverse(a)?;
            m.mat().mul(&m.module.element_action(&inv))?
        }
        Kind::Frobenius => {
            if !ring.is_unit(a) {
                return Err(Error::NotInvertible);
            }
            m.module.element_action(a).mul(m.mat())?
        }
    };
    Ok(m.with_op(mat))
}

#[derive(Clone, Debug)]
pub struct Unitalization {
    pub module: CartierModule,
    /// Canonical map `M → M^u`.
    pub canonical: Matrix,
    pub steps: usize,
    pub certificate: NilIsoReport,
    pub is_unit: bool,
}

#[derive(Clone, Debug)]
pub enum UnitalizeOutcome {
    Stabilized(Box<Unitalization>),
    NotStabilized { steps: usize, last_dim: usize },
}

pub const DEFAULT_MAX_STEPS: usize = 16;

/// Colimit of `M → F^♭M → F^{2♭}M → …`.
///
/// Once `q^{e n}` exceeds every pure-power bound, `F^{n♭}M` is the space of
/// `φ : R → M` with `x_i·φ = 0`, and the transition is `φ ↦ K∘φ`; the colimit
/// is the part of that space on which `K∘` is bijective.
pub fn unitalize(m: &CartierModule, max_steps: usize) -> Result<UnitalizeOutcome> {
    if m.kind() != Kind::Cartier {
        return Err(Error::InvalidStructure(
            "unitalization needs a Cartier module".into(),
        ));
    }
    let ring = m.module.ring().clone();
    let field = m.field().clone();
    let qe = ring.q().pow(m.exponent());
    let mut n0 = 0usize;
    while ring.bounds().iter().any(|&b| qe.pow(n0 as u32) < b as u64) {
        n0 += 1;
    }
    let dm = m.dim();
    let dr = ring.dim();
    let zeros = vec![Matrix::zeros(&field, dr, dr); ring.nvars()];
    let v = hom_space(&field, &zeros, m.module.actions(), dr, dm)?;
    let k = m.mat();
    let g = v.induced(|phi| k.mul(phi))?;
    let dv = v.dim();
    let mut ranks = vec![dv];
    let mut acc = Matrix::identity(&field, dv);
    let mut fitting = 0;
    loop {
        acc = g.mul(&acc)?;
        let r = acc.rank();
        if r == *ranks.last().unwrap() {
            break;
        }
        ranks.push(r);
        fitting += 1;
    }
    let steps = n0 + fitting;
    if steps > max_steps {
        return Ok(UnitalizeOutcome::NotStabilized {
            steps: max_steps,
            last_dim: dv,
        });
    }
    let gp = g.pow(dv.max(1) as u64)?;
    let u_coords = gp.image();
    let ker_coords = gp.kernel();
    let u_vecs: Vec<Matrix> = u_coords.columns().iter().map(|c| v.element(c)).collect();
    let du = u_vecs.len();
    let fr = ring.frobenius_op(m.exponent());

    // Fitting projection in V-coordinates.
    let full = u_coords.hstack(&ker_coords)?;
    let full_inv = full.inverse()?;
    let proj = Matrix::from_fn(&field, du, dv, |i, j| full_inv.get(i, j));
    let coords_in_u = |phi: &Matrix| -> Result<Vec<Elem>> {
        let c = v.coords(phi)?;
        proj.apply(&c)
    };

    let acts = ring
        .mult_ops()
        .iter()
        .map(|mu| {
            let cols = u_vecs
                .iter()
                .map(|phi| coords_in_u(&phi.mul(mu)?))
                .collect::<Result<Vec<_>>>()?;
            Ok(Matrix::from_columns(&field, du, &cols))
        })
        .collect::<Result<Vec<_>>>()?;
    let ku_cols = u_vecs
        .iter()
        .map(|phi| coords_in_u(&k.mul(phi)?.mul(&fr)?))
        .collect::<Result<Vec<_>>>()?;
    let module = FinModule::new(&ring, du, acts)?;
    let ku = Matrix::from_columns(&field, du, &ku_cols);
    let unital = StructuredModule::new(module, TwistedOperator::new(ku, m.op.twist))?;

    let kn = k.pow(n0 as u64)?;
    let lam = m.module.basis_actions();
    let can_cols = (0..dm)
        .map(|j| {
            let cols: Vec<Vec<Elem>> = lam
                .iter()
                .map(|l| kn.apply(&l.column(j)).expect("shape"))
                .collect();
            coords_in_u(&Matrix::from_columns(&field, dm, &cols))
        })
        .collect::<Result<Vec<_>>>()?;
    let canonical = Matrix::from_columns(&field, du, &can_cols);
    let certificate = nil_isomorphism_check(&canonical, m, &unital)?;
    let is_unit = is_unit(&unital)?;
    Ok(UnitalizeOutcome::Stabilized(Box::new(Unitalization {
        module: unital,
        canonical,
        steps,
        certificate,
        is_unit,
    })))
}

/// Cartier `I`-torsion `M[J]` as a module over `R/J`, with its inclusion.
pub fn structured_i_torsion(
    m: &CartierModule,
    j_gens: &[Vec<u32>],
) -> Result<(CartierModule, Matrix)> {
    if m.kind() != Kind::Cartier {
        return Err(Error::InvalidStructure(
            "torsion functor needs a Cartier module".into(),
        ));
    }
    let (sub, b) = i_torsion(&m.module, j_gens)?;
    let img = m.mat().mul(&b)?;
    let mat = coordinates(&b, &img)
        .map_err(|_| Error::InvalidStructure("torsion is not stable under the structure".into()))?;
    Ok((
        StructuredModule::new(sub, TwistedOperator::new(mat, m.op.twist))?,
        b,
    ))
}

pub fn structured_restrict_scalars(m: &StructuredModule) -> Result<StructuredModule> {
    StructuredModule::new(restrict_scalars(&m.module)?, m.op.clone())
}

#[derive(Clone, Debug, Serialize)]
pub struct KashiwaraReport {
    /// `i^♭ i_* M = M` with identical matrices.
    pub roundtrip_exact: bool,
    /// Counit `i_* i^♭ N → N` for a supplied `N` over the ambient ring.
    pub counit: Option<NilIsoReport>,
}

pub fn kashiwara_roundtrip(
    m: &CartierModule,
    ambient: Option<&CartierModule>,
) -> Result<KashiwaraReport> {
    let (_, j) = m
        .module
        .ring()
        .quotient_of()
        .ok_or_else(|| Error::InvalidRing("module is not over a declared quotient ring".into()))?
        .clone();
    let pushed = structured_restrict_scalars(m)?;
    let (back, incl) = structured_i_torsion(&pushed, &j)?;
    let roundtrip_exact = incl.is_identity() && back == *m;
    let counit = match ambient {
        Some(n) => {
            let (tors, b) = structured_i_torsion(n, &j)?;
            let tors = structured_restrict_scalars(&tors)?;
            Some(nil_isomorphism_check(&b, &tors, n)?)
        }
        None => None,
    };
    Ok(KashiwaraReport {
        roundtrip_exact,
        counit,
    })
}

/// Basis of all structures of the given kind and exponent on `module`.
pub fn structure_space(module: &FinModule, kind: Kind, e: u32) -> Result<Vec<Matrix>> {
    let qe = module.ring().q().pow(e);
    let xs: Vec<Matrix> = module.actions().to_vec();
    let xq: Vec<Matrix> = xs.iter().map(|x| x.pow(qe)).collect::<Result<_>>()?;
    let d = module.dim();
    let hs = match kind {
        Kind::Cartier => hom_space(module.field(), &xq, &xs, d, d)?,
        Kind::Frobenius => hom_space(module.field(), &xs, &xq, d, d)?,
    };
    Ok(hs.basis)
}

/// Coarse crystal invariants used to compare modules heuristically.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrystalSignature {
    pub kind: Kind,
    pub stable_dim: usize,
    pub nilpotent: bool,
}

pub fn crystal_signature(m: &StructuredModule) -> Result<CrystalSignature> {
    let (s, _) = stable_part(m)?;
    let stable_dim = match m.kind() {
        Kind::Cartier => s.dim(),
        Kind::Frobenius => m.dim() - s.dim(),
    };
    Ok(CrystalSignature {
        kind: m.kind(),
        stable_dim,
        nilpotent: m.is_nilpotent(),
    })
}

/// Heuristic: equal stable dimensions and, for F-modules, equal Sol dimensions
/// over `F_{q^s}` for `s ≤ 3`. Not a decision procedure.
pub fn heuristic_crystal_equivalent(a: &StructuredModule, b: &StructuredModule) -> Result<bool> {
    if crystal_signature(a)? != crystal_signature(b)? {
        return Ok(false);
    }
    if a.kind() == Kind::Frobenius {
        for s in 1..=3 {
            if crate::duality::sol_point(a, s)?.arithmetic_dim
                != crate::duality::sol_point(b, s)?.arithmetic_dim
            {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
