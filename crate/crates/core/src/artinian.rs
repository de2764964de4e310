//! Monomial Artinian algebras `F_q[x_1..x_n]/I` and modules over them given
//! by commuting action matrices.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Elem, Field, FieldSpec};
use crate::matrix::{complement_indices, coordinates, Matrix};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct RingSpec {
    pub p: u32,
    #[serde(default = "one")]
    pub r: u32,
    pub vars: Vec<String>,
    pub relations: Vec<Vec<u32>>,
}

fn one() -> u32 {
    1
}

pub struct ArtinRing {
    field: Field,
    vars: Vec<String>,
    relations: Vec<Vec<u32>>,
    bounds: Vec<u32>,
    basis: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
    mult: Vec<Matrix>,
    quotient_of: Option<(Arc<ArtinRing>, Vec<Vec<u32>>)>,
}

impl fmt::Debug for ArtinRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}[{}]/(", self.field.q(), self.vars.join(","))?;
        let rels: Vec<String> = self
            .relations
            .iter()
            .map(|r| self.monomial_name(r))
            .collect();
        write!(f, "{})", rels.join(", "))
    }
}

impl PartialEq for ArtinRing {
    fn eq(&self, o: &Self) -> bool {
        self.field == o.field && self.vars == o.vars && self.basis == o.basis
    }
}
impl Eq for ArtinRing {}

pub fn ring_make(spec: &RingSpec) -> Result<Arc<ArtinRing>> {
    let field = Field::base(spec.p, spec.r)?;
    ArtinRing::new(&field, spec.vars.clone(), spec.relations.clone())
}

/// `a` divides `b` as monomials.
pub fn mono_divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

impl ArtinRing {
    pub fn new(
        field: &Field,
        vars: Vec<String>,
        relations: Vec<Vec<u32>>,
    ) -> Result<Arc<ArtinRing>> {
        if field.s() != 1 {
            return Err(Error::InvalidRing(
                "coefficients must be the base field F_q".into(),
            ));
        }
        let n = vars.len();
        if let Some(bad) = relations.iter().find(|r| r.len() != n) {
            return Err(Error::InvalidRing(format!(
                "relation {bad:?} has the wrong number of exponents"
            )));
        }
        let mut bounds = Vec::with_capacity(n);
        for i in 0..n {
            let d = relations
                .iter()
                .filter(|r| r.iter().enumerate().all(|(j, &e)| j == i || e == 0))
                .map(|r| r[i])
                .min()
                .ok_or(Error::NotArtinian)?;
            bounds.push(d);
        }
        let unit_rel = relations.iter().any(|r| r.iter().all(|&e| e == 0));
        let mut basis = Vec::new();
        if !unit_rel {
            let mut cur = vec![0u32; n];
            loop {
                if !relations.iter().any(|r| mono_divides(r, &cur)) {
                    basis.push(cur.clone());
                }
                // odometer with the first variable fastest
                let mut i = 0;
                loop {
                    if i == n {
                        break;
                    }
                    cur[i] += 1;
                    if cur[i] < bounds[i] {
                        break;
                    }
                    cur[i] = 0;
                    i += 1;
                }
                if i == n {
                    break;
                }
            }
        }
        let index: HashMap<Vec<u32>, usize> = basis
            .iter()
            .enumerate()
            .map(|(k, b)| (b.clone(), k))
            .collect();
        let dim = basis.len();
        let mult = (0..n)
            .map(|i| {
                let mut m = Matrix::zeros(field, dim, dim);
                for (j, b) in basis.iter().enumerate() {
                    let mut t = b.clone();
                    t[i] += 1;
                    if let Some(&k) = index.get(&t) {
                        m.set(k, j, 1);
                    }
                }
                m
            })
            .collect();
        Ok(Arc::new(ArtinRing {
            field: field.clone(),
            vars,
            relations,
            bounds,
            basis,
            index,
            mult,
            quotient_of: None,
        }))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn q(&self) -> u64 {
        self.field.q()
    }
    pub fn vars(&self) -> &[String] {
        &self.vars
    }
    pub fn nvars(&self) -> usize {
        self.vars.len()
    }
    pub fn relations(&self) -> &[Vec<u32>] {
        &self.relations
    }
    /// Least pure power of each variable lying in the ideal.
    pub fn bounds(&self) -> &[u32] {
        &self.bounds
    }
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
    /// Standard monomials; the last variable is most significant.
    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }
    pub fn mult_ops(&self) -> &[Matrix] {
        &self.mult
    }
    pub fn quotient_of(&self) -> Option<&(Arc<ArtinRing>, Vec<Vec<u32>>)> {
        self.quotient_of.as_ref()
    }

    pub fn spec(&self) -> RingSpec {
        RingSpec {
            p: self.field.p(),
            r: self.field.r(),
            vars: self.vars.clone(),
            relations: self.relations.clone(),
        }
    }

    pub fn index_of(&self, mono: &[u32]) -> Option<usize> {
        self.index.get(mono).copied()
    }

    pub fn monomial_name(&self, e: &[u32]) -> String {
        let parts: Vec<String> = e
            .iter()
            .zip(&self.vars)
            .filter(|(&k, _)| k > 0)
            .map(|(&k, v)| {
                if k == 1 {
                    v.clone()
                } else {
                    format!("{v}^{k}")
                }
            })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    /// Coordinates of a monomial (zero if it lies in the ideal).
    pub fn monomial(&self, e: &[u32]) -> Vec<Elem> {
        let mut v = vec![0; self.dim()];
        if let Some(k) = self.index_of(e) {
            v[k] = 1;
        }
        v
    }

    /// Matrix of multiplication by the monomial `x^e`.
    pub fn mono_op(&self, e: &[u32]) -> Matrix {
        let dim = self.dim();
        let mut m = Matrix::zeros(&self.field, dim, dim);
        for (j, b) in self.basis.iter().enumerate() {
            let t: Vec<u32> = b.iter().zip(e).map(|(x, y)| x + y).collect();
            if let Some(k) = self.index_of(&t) {
                m.set(k, j, 1);
            }
        }
        m
    }

    /// Multiplication by the element with the given coordinates.
    pub fn element_op(&self, a: &[Elem]) -> Matrix {
        let f = &self.field;
        let mut acc = Matrix::zeros(f, self.dim(), self.dim());
        for (j, &c) in a.iter().enumerate() {
            if c != 0 {
                acc = acc
                    .add(&self.mono_op(&self.basis[j]).scale(c))
                    .expect("same shape");
            }
        }
        acc
    }

    pub fn mul(&self, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
        self.element_op(a).apply(b).expect("ring element length")
    }

    pub fn one(&self) -> Vec<Elem> {
        self.monomial(&vec![0; self.nvars()])
    }

    pub fn is_unit(&self, a: &[Elem]) -> bool {
        self.dim() > 0 && a.first().copied().unwrap_or(0) != 0
    }

    pub fn inverse(&self, a: &[Elem]) -> Result<Vec<Elem>> {
        if !self.is_unit(a) {
            return Err(Error::NotInvertible);
        }
        let op = self.element_op(a);
        let one = Matrix::from_columns(&self.field, self.dim(), &[self.one()]);
        Ok(op.solve_exact(&one)?.column(0))
    }

    /// Matrix of `λ ↦ λ^{q^e}` on the monomial basis.
    pub fn frobenius_op(&self, e: u32) -> Matrix {
        let qe = self.q().pow(e);
        let dim = self.dim();
        let mut m = Matrix::zeros(&self.field, dim, dim);
        for (j, b) in self.basis.iter().enumerate() {
            let t: Vec<u32> = b
                .iter()
                .map(|&x| (x as u64 * qe).min(u32::MAX as u64) as u32)
                .collect();
            if let Some(k) = self.index_of(&t) {
                m.set(k, j, 1);
            }
        }
        m
    }

    /// Ring `R/J` for a monomial ideal `J`, remembering the ambient ring.
    pub fn quotient(self: &Arc<Self>, j_gens: &[Vec<u32>]) -> Result<Arc<ArtinRing>> {
        if let Some(bad) = j_gens.iter().find(|g| g.len() != self.nvars()) {
            return Err(Error::InvalidRing(format!(
                "generator {bad:?} has the wrong arity"
            )));
        }
        let mut rels = self.relations.clone();
        rels.extend(j_gens.iter().cloned());
        let q = ArtinRing::new(&self.field, self.vars.clone(), rels)?;
        let mut q = Arc::try_unwrap(q).unwrap_or_else(|_| unreachable!());
        q.quotient_of = Some((self.clone(), j_gens.to_vec()));
        Ok(Arc::new(q))
    }

    /// `R ⊗ F_{q^s}`, viewed over its own base field `F_{q^s}`.
    pub fn extend_scalars(&self, s: u32) -> Result<Arc<ArtinRing>> {
        let f = Field::new(FieldSpec::new(self.field.p(), self.field.r() * s, 1))?;
        ArtinRing::new(&f, self.vars.clone(), self.relations.clone())
    }
}

/// Finite-dimensional module given by one action matrix per variable.
#[derive(Clone)]
pub struct FinModule {
    ring: Arc<ArtinRing>,
    actions: Vec<Matrix>,
    dim: usize,
}

impl fmt::Debug for FinModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FinModule")
            .field("ring", &self.ring)
            .field("dim", &self.dim)
            .field("actions", &self.actions)
            .finish()
    }
}

impl PartialEq for FinModule {
    fn eq(&self, o: &Self) -> bool {
        *self.ring == *o.ring && self.dim == o.dim && self.actions == o.actions
    }
}

impl FinModule {
    pub fn new(ring: &Arc<ArtinRing>, dim: usize, actions: Vec<Matrix>) -> Result<FinModule> {
        let m = FinModule::new_unchecked(ring, dim, actions)?;
        let v = m.violations();
        if !v.is_empty() {
            return Err(Error::InvalidModule(v.join("; ")));
        }
        Ok(m)
    }

    /// Shape-checked only; callers that construct actions by restriction
    /// use this.
    pub fn new_unchecked(
        ring: &Arc<ArtinRing>,
        dim: usize,
        actions: Vec<Matrix>,
    ) -> Result<FinModule> {
        if actions.len() != ring.nvars() {
            return Err(Error::InvalidModule(format!(
                "{} action matrices for {} variables",
                actions.len(),
                ring.nvars()
            )));
        }
        for a in &actions {
            if a.rows() != dim || a.cols() != dim {
                return Err(Error::InvalidModule(format!(
                    "action of shape {}x{} on a module of dimension {dim}",
                    a.rows(),
                    a.cols()
                )));
            }
            if a.field() != ring.field() {
                return Err(Error::FieldMismatch("action over a different field".into()));
            }
        }
        Ok(FinModule {
            ring: ring.clone(),
            actions,
            dim,
        })
    }

    pub fn zero(ring: &Arc<ArtinRing>) -> FinModule {
        let acts = vec![Matrix::zeros(ring.field(), 0, 0); ring.nvars()];
        FinModule::new_unchecked(ring, 0, acts).expect("shapes")
    }

    /// `R` as a module over itself.
    pub fn free(ring: &Arc<ArtinRing>) -> FinModule {
        FinModule::new_unchecked(ring, ring.dim(), ring.mult_ops().to_vec()).expect("shapes")
    }

    /// The residue field `k = R/m`.
    pub fn residue_field(ring: &Arc<ArtinRing>) -> FinModule {
        let acts = vec![Matrix::zeros(ring.field(), 1, 1); ring.nvars()];
        FinModule::new_unchecked(ring, 1, acts).expect("shapes")
    }

    pub fn ring(&self) -> &Arc<ArtinRing> {
        &self.ring
    }
    pub fn field(&self) -> &Field {
        self.ring.field()
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn actions(&self) -> &[Matrix] {
        &self.actions
    }

    /// Failed commutation and relation checks, in words.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.actions.len();
        for i in 0..n {
            for j in i + 1..n {
                let a = self.actions[i].mul(&self.actions[j]).expect("square");
                let b = self.actions[j].mul(&self.actions[i]).expect("square");
                if a != b {
                    out.push(format!(
                        "actions of {} and {} do not commute",
                        self.ring.vars[i], self.ring.vars[j]
                    ));
                }
            }
        }
        for rel in self.ring.relations() {
            if !self.mono_action(rel).is_zero() {
                out.push(format!(
                    "relation {} does not act as zero",
                    self.ring.monomial_name(rel)
                ));
            }
        }
        out
    }

    pub fn mono_action(&self, e: &[u32]) -> Matrix {
        let mut acc = Matrix::identity(self.field(), self.dim);
        for (i, &k) in e.iter().enumerate() {
            if k > 0 {
                acc = acc
                    .mul(&self.actions[i].pow(k as u64).expect("square"))
                    .expect("square");
            }
        }
        acc
    }

    /// Actions of the standard monomials, in basis order.
    pub fn basis_actions(&self) -> Vec<Matrix> {
        self.ring
            .basis()
            .iter()
            .map(|b| self.mono_action(b))
            .collect()
    }

    pub fn element_action(&self, a: &[Elem]) -> Matrix {
        let mut acc = Matrix::zeros(self.field(), self.dim, self.dim);
        for (j, &c) in a.iter().enumerate() {
            if c != 0 {
                let t = self.mono_action(&self.ring.basis()[j]).scale(c);
                acc = acc.add(&t).expect("same shape");
            }
        }
        acc
    }

    /// `Σ_i Im X_i` as a column basis.
    pub fn maximal_ideal_image(&self) -> Matrix {
        let mut acc = Matrix::zeros(self.field(), self.dim, 0);
        for a in &self.actions {
            acc = acc.hstack(a).expect("same rows");
        }
        acc.image()
    }

    /// Common kernel of the actions (the socle).
    pub fn socle(&self) -> Matrix {
        Matrix::vstack_all(self.field(), self.dim, &self.actions)
            .expect("same cols")
            .kernel()
    }

    pub fn direct_sum(&self, o: &FinModule) -> Result<FinModule> {
        if *self.ring != *o.ring {
            return Err(Error::RingMismatch);
        }
        let acts = self
            .actions
            .iter()
            .zip(&o.actions)
            .map(|(a, b)| a.block_diag(b))
            .collect::<Result<Vec<_>>>()?;
        FinModule::new_unchecked(&self.ring, self.dim + o.dim, acts)
    }

    /// Conjugate by `p`: the new basis is the columns of `p`.
    pub fn change_basis(&self, p: &Matrix) -> Result<FinModule> {
        let inv = p.inverse()?;
        let acts = self
            .actions
            .iter()
            .map(|a| inv.mul(a)?.mul(p))
            .collect::<Result<Vec<_>>>()?;
        FinModule::new_unchecked(&self.ring, self.dim, acts)
    }

    /// Submodule spanned by the columns of `b` (assumed independent and
    /// stable), in that basis.
    pub fn submodule(&self, b: &Matrix) -> Result<FinModule> {
        let acts = self
            .actions
            .iter()
            .map(|a| coordinates(b, &a.mul(b)?))
            .collect::<Result<Vec<_>>>()
            .map_err(|_| Error::InvalidModule("subspace is not a submodule".into()))?;
        FinModule::new_unchecked(&self.ring, b.cols(), acts)
    }

    /// Quotient by the span of the columns of `b`; returns the module and the
    /// standard basis indices representing the quotient basis.
    pub fn quotient(&self, b: &Matrix) -> Result<(FinModule, Vec<usize>)> {
        let comp = complement_indices(b);
        let acts = self
            .actions
            .iter()
            .map(|a| induced_on_quotient(a, b, &comp))
            .collect::<Result<Vec<_>>>()?;
        Ok((
            FinModule::new_unchecked(&self.ring, comp.len(), acts)?,
            comp,
        ))
    }
}

/// Matrix of the map induced by `a` on `V / span(b)`, in the basis given by the
/// standard vectors `comp`.
pub fn induced_on_quotient(a: &Matrix, b: &Matrix, comp: &[usize]) -> Result<Matrix> {
    let f = a.field();
    let n = a.rows();
    let full = b.hstack(&Matrix::identity(f, n).select_columns(comp))?;
    let img = a.select_columns(comp);
    let c = coordinates(&full, &img)?;
    let rows: Vec<usize> = (b.cols()..b.cols() + comp.len()).collect();
    let cols: Vec<usize> = (0..comp.len()).collect();
    Ok(c.submatrix(&rows, &cols))
}

/// Space of `dN × dM` matrices `H` with `H·X_i = Y_i·H` for all `i`.
#[derive(Clone, Debug)]
pub struct HomSpace {
    pub rows: usize,
    pub cols: usize,
    pub basis: Vec<Matrix>,
    stacked: Matrix,
}

impl HomSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of `h` in the basis.
    pub fn coords(&self, h: &Matrix) -> Result<Vec<Elem>> {
        let v = Matrix::from_columns(h.field(), h.rows() * h.cols(), &[h.vectorize()]);
        Ok(coordinates(&self.stacked, &v)
            .map_err(|_| Error::NotEquivariant("map is not in the Hom space".into()))?
            .column(0))
    }

    /// Coordinates of several maps, as columns.
    pub fn coords_matrix(&self, hs: &[Matrix]) -> Result<Matrix> {
        let f = self.stacked.field();
        let vecs: Vec<Vec<Elem>> = hs.iter().map(|h| h.vectorize()).collect();
        coordinates(
            &self.stacked,
            &Matrix::from_columns(f, self.rows * self.cols, &vecs),
        )
        .map_err(|_| Error::NotEquivariant("map is not in the Hom space".into()))
    }

    pub fn element(&self, c: &[Elem]) -> Matrix {
        let f = self.stacked.field();
        let v = self.stacked.apply(c).expect("coordinate length");
        Matrix::unvectorize(f, self.rows, self.cols, &v)
    }

    /// Matrix of `H ↦ op(H)` in the basis, where `op` preserves the space.
    pub fn induced(&self, op: impl Fn(&Matrix) -> Result<Matrix>) -> Result<Matrix> {
        let imgs = self.basis.iter().map(&op).collect::<Result<Vec<_>>>()?;
        self.coords_matrix(&imgs)
    }
}

/// Solve `H·X_i = Y_i·H` for `H` of shape `dy × dx`.
pub fn hom_space(
    field: &Field,
    x: &[Matrix],
    y: &[Matrix],
    dx: usize,
    dy: usize,
) -> Result<HomSpace> {
    if x.len() != y.len() {
        return Err(Error::RingMismatch);
    }
    let n = dx * dy;
    let mut eqs = Matrix::zeros(field, 0, n);
    for (xi, yi) in x.iter().zip(y) {
        // vec(H X) = (X^T ⊗ I) vec H, vec(Y H) = (I ⊗ Y) vec H
        let m = Matrix::from_fn(field, n, n, |row, col| {
            let (ri, rj) = (row % dy, row / dy);
            let (ci, cj) = (col % dy, col / dy);
            let hx = if ri == ci { xi.get(cj, rj) } else { 0 };
            let yh = if rj == cj { yi.get(ri, ci) } else { 0 };
            field.sub(hx, yh)
        });
        eqs = eqs.vstack(&m)?;
    }
    let stacked = eqs.kernel();
    let basis = stacked
        .columns()
        .iter()
        .map(|c| Matrix::unvectorize(field, dy, dx, c))
        .collect();
    Ok(HomSpace {
        rows: dy,
        cols: dx,
        basis,
        stacked,
    })
}

/// `Hom_R(M, N)` as a module (`a·H = X^N(a)·H`) together with its basis.
pub fn hom_module(m: &FinModule, n: &FinModule) -> Result<(FinModule, HomSpace)> {
    if *m.ring != *n.ring {
        return Err(Error::RingMismatch);
    }
    let hs = hom_space(m.field(), &m.actions, &n.actions, m.dim, n.dim)?;
    let acts = n
        .actions
        .iter()
        .map(|y| hs.induced(|h| y.mul(h)))
        .collect::<Result<Vec<_>>>()?;
    Ok((FinModule::new_unchecked(&m.ring, hs.dim(), acts)?, hs))
}

/// `F^e_*M`: actions `X_i^{q^e}`.
pub fn frobenius_pushforward(m: &FinModule, e: u32) -> FinModule {
    let qe = m.ring.q().pow(e);
    let acts = m
        .actions
        .iter()
        .map(|a| a.pow(qe).expect("square"))
        .collect();
    FinModule::new_unchecked(&m.ring, m.dim, acts).expect("shapes")
}

/// `F^{e,♭}M = Hom_R(F^e_*R, M)`, an `R`-module through the source.
/// Elements are `dim M × dim R` matrices.
pub fn f_flat(m: &FinModule, e: u32) -> Result<(FinModule, HomSpace)> {
    let r = &m.ring;
    let fr = frobenius_pushforward(&FinModule::free(r), e);
    let hs = hom_space(m.field(), &fr.actions, &m.actions, r.dim(), m.dim)?;
    let acts = r
        .mult_ops()
        .iter()
        .map(|mu| hs.induced(|h| h.mul(mu)))
        .collect::<Result<Vec<_>>>()?;
    Ok((FinModule::new_unchecked(r, hs.dim(), acts)?, hs))
}

/// `{v : J·v = 0}` as a module over `R/J`, with its inclusion (columns).
pub fn i_torsion(m: &FinModule, j_gens: &[Vec<u32>]) -> Result<(FinModule, Matrix)> {
    let quot = m.ring.quotient(j_gens)?;
    let ops: Vec<Matrix> = j_gens.iter().map(|g| m.mono_action(g)).collect();
    let b = Matrix::vstack_all(m.field(), m.dim, &ops)?.kernel();
    let sub = m.submodule(&b)?;
    let acts = sub.actions.clone();
    Ok((FinModule::new(&quot, b.cols(), acts)?, b))
}

/// View a module over `R/J` as an `R`-module.
pub fn restrict_scalars(m: &FinModule) -> Result<FinModule> {
    let (ambient, _) = m
        .ring
        .quotient_of()
        .ok_or_else(|| Error::InvalidRing("module is not over a declared quotient ring".into()))?;
    if ambient.vars() != m.ring.vars() || ambient.field() != m.ring.field() {
        return Err(Error::InvalidRing(
            "incompatible quotient declaration".into(),
        ));
    }
    FinModule::new(ambient, m.dim, m.actions.clone())
}
