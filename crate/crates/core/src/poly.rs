//! Univariate polynomials over `F_q` and polynomial matrices.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Elem, Field};

/// Polynomial with coefficients low degree first; no trailing zeros.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    field: Field,
    c: Vec<Elem>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &a) in self.c.iter().enumerate().rev() {
            if a == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, a) {
                (0, _) => write!(f, "{a}")?,
                (1, 1) => write!(f, "x")?,
                (1, _) => write!(f, "{a}x")?,
                (_, 1) => write!(f, "x^{i}")?,
                _ => write!(f, "{a}x^{i}")?,
            }
        }
        Ok(())
    }
}

impl Poly {
    pub fn new(field: &Field, mut c: Vec<Elem>) -> Poly {
        while c.last() == Some(&0) {
            c.pop();
        }
        Poly {
            field: field.clone(),
            c,
        }
    }

    pub fn zero(field: &Field) -> Poly {
        Poly::new(field, vec![])
    }

    pub fn one(field: &Field) -> Poly {
        Poly::constant(field, 1)
    }

    pub fn constant(field: &Field, a: Elem) -> Poly {
        Poly::new(field, vec![a])
    }

    /// `a·x^k`.
    pub fn monomial(field: &Field, k: usize, a: Elem) -> Poly {
        let mut c = vec![0; k + 1];
        c[k] = a;
        Poly::new(field, c)
    }

    pub fn x(field: &Field) -> Poly {
        Poly::monomial(field, 1, 1)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.c
    }

    pub fn coeff(&self, k: usize) -> Elem {
        self.c.get(k).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.c.len() <= 1
    }

    pub fn lead(&self) -> Elem {
        self.c.last().copied().unwrap_or(0)
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let f = &self.field;
        let n = self.c.len().max(o.c.len());
        Poly::new(
            f,
            (0..n).map(|i| f.add(self.coeff(i), o.coeff(i))).collect(),
        )
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Poly {
        let f = &self.field;
        Poly::new(f, self.c.iter().map(|&a| f.neg(a)).collect())
    }

    pub fn scale(&self, a: Elem) -> Poly {
        let f = &self.field;
        Poly::new(f, self.c.iter().map(|&b| f.mul(a, b)).collect())
    }

    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![0; k];
        c.extend_from_slice(&self.c);
        Poly::new(&self.field, c)
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero(&self.field);
        }
        let f = &self.field;
        let mut c = vec![0; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                c[i + j] = f.add(c[i + j], f.mul(a, b));
            }
        }
        Poly::new(f, c)
    }

    pub fn pow(&self, mut e: u64) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(&self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn div_rem(&self, d: &Poly) -> Result<(Poly, Poly)> {
        let f = &self.field;
        let dd = d.degree().ok_or(Error::NotInvertible)?;
        let inv = f.inv(d.lead())?;
        let mut r = self.c.clone();
        let mut q = vec![0; self.c.len().saturating_sub(dd)];
        while r.len() > dd {
            let top = *r.last().unwrap();
            let k = r.len() - 1 - dd;
            if top != 0 {
                let c = f.mul(top, inv);
                q[k] = c;
                for (i, &b) in d.c.iter().enumerate() {
                    r[k + i] = f.sub(r[k + i], f.mul(c, b));
                }
            }
            r.pop();
        }
        Ok((Poly::new(f, q), Poly::new(f, r)))
    }

    pub fn rem(&self, d: &Poly) -> Result<Poly> {
        Ok(self.div_rem(d)?.1)
    }

    pub fn divides(&self, o: &Poly) -> bool {
        if self.is_zero() {
            return o.is_zero();
        }
        o.rem(self).map(|r| r.is_zero()).unwrap_or(false)
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(self.field.inv(self.lead()).expect("nonzero lead"))
    }

    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn eval(&self, x: Elem) -> Elem {
        let f = &self.field;
        self.c
            .iter()
            .rev()
            .fold(0, |acc, &a| f.add(f.mul(acc, x), a))
    }

    /// `g(x)^q` computed coefficientwise (coefficients lie in `F_q`).
    pub fn frobenius(&self, q: u64) -> Poly {
        let f = &self.field;
        let mut c = vec![0; self.c.len().saturating_sub(1) * q as usize + 1];
        for (i, &a) in self.c.iter().enumerate() {
            c[i * q as usize] = f.pow(a, q);
        }
        Poly::new(f, c)
    }

    /// The unique `g_k` with `self = Σ_k g_k(x)^q x^k`, i.e.
    /// `g_k = Σ_u a_{qu+k} x^u` over `F_q`.
    pub fn frobenius_components(&self, q: u64) -> Vec<Poly> {
        let f = &self.field;
        let q = q as usize;
        (0..q)
            .map(|k| {
                let c: Vec<Elem> = self.c.iter().skip(k).step_by(q).copied().collect();
                Poly::new(f, c)
            })
            .collect()
    }
}

/// Matrix of polynomials, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Poly>,
}

impl fmt::Debug for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<&Poly>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j)).collect())
            .collect();
        f.debug_list().entries(rows).finish()
    }
}

impl PolyMatrix {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> PolyMatrix {
        PolyMatrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![Poly::zero(field); rows * cols],
        }
    }

    pub fn identity(field: &Field, n: usize) -> PolyMatrix {
        let mut m = PolyMatrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, Poly::one(field));
        }
        m
    }

    pub fn from_rows(
        field: &Field,
        rows: usize,
        cols: usize,
        entries: Vec<Vec<Poly>>,
    ) -> Result<PolyMatrix> {
        if entries.len() != rows || entries.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch(format!(
                "expected a {rows}x{cols} polynomial matrix"
            )));
        }
        Ok(PolyMatrix {
            field: field.clone(),
            rows,
            cols,
            data: entries.into_iter().flatten().collect(),
        })
    }

    pub fn diagonal(field: &Field, entries: &[Poly]) -> PolyMatrix {
        let n = entries.len();
        let mut m = PolyMatrix::zeros(field, n, n);
        for (i, e) in entries.iter().enumerate() {
            m.set(i, i, e.clone());
        }
        m
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Poly) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, o: &PolyMatrix) -> Result<PolyMatrix> {
        if self.cols != o.rows {
            return Err(Error::DimensionMismatch("polynomial matrix product".into()));
        }
        let mut out = PolyMatrix::zeros(&self.field, self.rows, o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = Poly::zero(&self.field);
                for k in 0..self.cols {
                    acc = acc.add(&self.get(i, k).mul(o.get(k, j)));
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row_a += c · row_b
    fn add_row(&mut self, a: usize, b: usize, c: &Poly) {
        for j in 0..self.cols {
            let v = self.get(a, j).add(&c.mul(self.get(b, j)));
            self.set(a, j, v);
        }
    }

    /// col_a += c · col_b
    fn add_col(&mut self, a: usize, b: usize, c: &Poly) {
        for i in 0..self.rows {
            let v = self.get(i, a).add(&c.mul(self.get(i, b)));
            self.set(i, a, v);
        }
    }

    fn scale_row(&mut self, a: usize, c: Elem) {
        for j in 0..self.cols {
            let v = self.get(a, j).scale(c);
            self.set(a, j, v);
        }
    }
}

/// Smith form `U·P·V = D`. `diag` has `min(rows, cols)` entries, each monic
/// or zero, each dividing the next.
#[derive(Clone, Debug)]
pub struct Smith {
    pub diag: Vec<Poly>,
    pub u: PolyMatrix,
    pub v: PolyMatrix,
}

pub fn smith_normal_form(p: &PolyMatrix) -> Smith {
    let field = p.field.clone();
    let mut a = p.clone();
    let mut u = PolyMatrix::identity(&field, p.rows);
    let mut v = PolyMatrix::identity(&field, p.cols);
    let n = p.rows.min(p.cols);
    for t in 0..n {
        loop {
            // pivot of least degree in the trailing block
            let mut best: Option<(usize, usize, usize)> = None;
            for i in t..a.rows {
                for j in t..a.cols {
                    if let Some(d) = a.get(i, j).degree() {
                        if best.is_none_or(|(_, _, bd)| d < bd) {
                            best = Some((i, j, d));
                        }
                    }
                }
            }
            let Some((pi, pj, _)) = best else {
                break;
            };
            if pi != t {
                a.swap_rows(pi, t);
                u.swap_rows(pi, t);
            }
            if pj != t {
                a.swap_cols(pj, t);
                v.swap_cols(pj, t);
            }
            let mut dirty = false;
            for i in t + 1..a.rows {
                if a.get(i, t).is_zero() {
                    continue;
                }
                let (q, r) = a.get(i, t).div_rem(a.get(t, t)).expect("pivot nonzero");
                let nq = q.neg();
                a.add_row(i, t, &nq);
                u.add_row(i, t, &nq);
                dirty |= !r.is_zero();
            }
            for j in t + 1..a.cols {
                if a.get(t, j).is_zero() {
                    continue;
                }
                let (q, r) = a.get(t, j).div_rem(a.get(t, t)).expect("pivot nonzero");
                let nq = q.neg();
                a.add_col(j, t, &nq);
                v.add_col(j, t, &nq);
                dirty |= !r.is_zero();
            }
            if dirty {
                continue;
            }
            // divisibility of the trailing block
            let piv = a.get(t, t).clone();
            let bad = (t + 1..a.rows).find(|&i| (t + 1..a.cols).any(|j| !piv.divides(a.get(i, j))));
            match bad {
                Some(i) => {
                    let one = Poly::one(&field);
                    a.add_row(t, i, &one);
                    u.add_row(t, i, &one);
                }
                None => break,
            }
        }
        let lead = a.get(t, t).lead();
        if lead != 0 && lead != 1 {
            let inv = field.inv(lead).expect("nonzero");
            a.scale_row(t, inv);
            u.scale_row(t, inv);
        }
    }
    Smith {
        diag: (0..n).map(|i| a.get(i, i).clone()).collect(),
        u,
        v,
    }
}

/// Blow-up presentation of `F_*(coker P)`: generator `(i, k)` is
/// `F_*(x^k e_i)`, relation `(c, j)` is `F_*(x^j · P_c)`.
pub fn frobenius_pushforward_presentation(p: &PolyMatrix, q: u64) -> PolyMatrix {
    let field = p.field.clone();
    let qs = q as usize;
    let mut out = PolyMatrix::zeros(&field, p.rows * qs, p.cols * qs);
    for i in 0..p.rows {
        for c in 0..p.cols {
            for j in 0..qs {
                let h = p.get(i, c).shift(j);
                for (k, g) in h.frobenius_components(q).into_iter().enumerate() {
                    out.set(i * qs + k, c * qs + j, g);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> Field {
        Field::base(p, 1).unwrap()
    }

    fn poly(field: &Field, c: &[u32]) -> Poly {
        Poly::new(field, c.to_vec())
    }

    #[test]
    fn division_and_gcd() {
        let k = f(3);
        let a = poly(&k, &[2, 0, 1]); // x^2 - 1
        let b = poly(&k, &[1, 1]); // x + 1
        let (q, r) = a.div_rem(&b).unwrap();
        assert!(r.is_zero());
        assert_eq!(q, poly(&k, &[2, 1]));
        assert_eq!(a.gcd(&poly(&k, &[2, 1])), poly(&k, &[2, 1]));
    }

    #[test]
    fn frobenius_components_recombine() {
        let k = f(2);
        let a = poly(&k, &[1, 1, 0, 1, 1, 0, 1]);
        let comps = a.frobenius_components(2);
        let mut acc = Poly::zero(&k);
        for (j, g) in comps.iter().enumerate() {
            acc = acc.add(&g.frobenius(2).shift(j));
        }
        assert_eq!(acc, a);
    }

    #[test]
    fn smith_examples() {
        let k = f(2);
        let x = Poly::x(&k);
        let p = PolyMatrix::diagonal(&k, &[x.clone(), x.mul(&x)]);
        let s = smith_normal_form(&p);
        assert_eq!(s.diag, vec![x.clone(), x.mul(&x)]);
        let blown = frobenius_pushforward_presentation(
            &PolyMatrix::diagonal(&k, std::slice::from_ref(&x)),
            2,
        );
        assert_eq!(blown.get(0, 1), &x);
        assert_eq!(blown.get(1, 0), &Poly::one(&k));
        let s = smith_normal_form(&blown);
        assert_eq!(s.diag, vec![Poly::one(&k), x]);
    }

    #[test]
    fn smith_reconstructs() {
        let k = f(3);
        let e = |c: &[u32]| poly(&k, c);
        let p = PolyMatrix::from_rows(
            &k,
            2,
            2,
            vec![vec![e(&[0, 1]), e(&[1, 1])], vec![e(&[2]), e(&[0, 0, 1])]],
        )
        .unwrap();
        let s = smith_normal_form(&p);
        let d = s.u.mul(&p).unwrap().mul(&s.v).unwrap();
        assert_eq!(d, PolyMatrix::diagonal(&k, &s.diag));
        assert!(s.diag[0].divides(&s.diag[1]));
    }
}
