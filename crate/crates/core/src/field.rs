//! Finite fields `F_{p^{r s}}` with table-driven arithmetic.
//!
//! Elements are `u32` values holding the coefficient vector of a polynomial in
//! the generator `t`, packed in base `p` (digit `i` is the coefficient of
//! `t^i`). The defining polynomial is the lexicographically smallest monic
//! primitive polynomial of degree `r·s`, so `t` generates the multiplicative
//! group and the polynomial is recorded in every report.
//!
//! A [`Field`] also remembers how it is viewed: the base field is `F_q` with
//! `q = p^r`, and `σ` is the `q`-power map.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported field size.
pub const MAX_FIELD_SIZE: u64 = 1 << 20;

/// Field element in the packed polynomial basis.
pub type Elem = u32;

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub r: u32,
    #[serde(default = "one")]
    pub s: u32,
}

fn one() -> u32 {
    1
}

impl FieldSpec {
    pub fn new(p: u32, r: u32, s: u32) -> Self {
        FieldSpec { p, r, s }
    }

    pub fn prime_tier(p: u32, r: u32) -> Self {
        FieldSpec { p, r, s: 1 }
    }

    /// `q = p^r`.
    pub fn q(&self) -> u64 {
        (self.p as u64).pow(self.r)
    }

    pub fn degree(&self) -> u32 {
        self.r * self.s
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

struct Tables {
    p: u32,
    n: u32,
    size: u32,
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    zech: Vec<u32>,
}

impl Tables {
    fn build(p: u32, n: u32) -> Result<Tables> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let size = (p as u64)
            .checked_pow(n)
            .filter(|&s| s <= MAX_FIELD_SIZE)
            .ok_or(Error::FieldTooLarge { p, n })? as u32;
        let order = size - 1;
        // Candidate tails c_0..c_{n-1} enumerated in increasing packed order.
        for tail in 0..size {
            let digits = to_digits(tail, p, n);
            if n > 1 && digits[0] == 0 {
                continue;
            }
            if n == 1 && digits[0] == 0 {
                continue;
            }
            // monic: t^n + c_{n-1} t^{n-1} + ... + c_0
            let mut modulus = digits.clone();
            modulus.push(1);
            if let Some(exp) = power_cycle(&modulus, p, n, size) {
                if exp.len() as u32 == order {
                    let mut log = vec![NONE; size as usize];
                    for (k, &e) in exp.iter().enumerate() {
                        log[e as usize] = k as u32;
                    }
                    let mut zech = vec![NONE; order as usize];
                    for k in 0..order as usize {
                        let mut d = to_digits(exp[k], p, n);
                        d[0] = (d[0] + 1) % p;
                        let v = from_digits(&d, p);
                        zech[k] = if v == 0 { NONE } else { log[v as usize] };
                    }
                    return Ok(Tables {
                        p,
                        n,
                        size,
                        modulus,
                        exp,
                        log,
                        zech,
                    });
                }
            }
        }
        unreachable!("every finite field has a primitive polynomial")
    }
}

/// Powers of `t` modulo `modulus`, stopping at the first return to `1`.
/// Returns `None` if a zero power shows up (reducible with root 0).
fn power_cycle(modulus: &[u32], p: u32, n: u32, size: u32) -> Option<Vec<u32>> {
    let mut cur = vec![0u32; n as usize];
    cur[0] = 1;
    let mut out = Vec::new();
    loop {
        let packed = from_digits(&cur, p);
        if !out.is_empty() && packed == 1 {
            return Some(out);
        }
        if packed == 0 || out.len() as u32 >= size {
            return None;
        }
        out.push(packed);
        // multiply by t
        let top = cur[n as usize - 1];
        for i in (1..n as usize).rev() {
            cur[i] = cur[i - 1];
        }
        cur[0] = 0;
        if n == 1 {
            cur[0] = 0;
        }
        if top != 0 {
            for i in 0..n as usize {
                let sub = (top * modulus[i]) % p;
                cur[i] = (cur[i] + p - sub) % p;
            }
        }
        if n == 1 {
            // t ≡ -c_0
            let v = (packed * ((p - modulus[0]) % p)) % p;
            cur[0] = v;
        }
    }
}

fn to_digits(mut a: u32, p: u32, n: u32) -> Vec<u32> {
    let mut d = Vec::with_capacity(n as usize);
    for _ in 0..n {
        d.push(a % p);
        a /= p;
    }
    d
}

fn from_digits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn tables(p: u32, n: u32) -> Result<Arc<Tables>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), Arc<Tables>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().unwrap().get(&(p, n)) {
        return Ok(t.clone());
    }
    let built = Arc::new(Tables::build(p, n)?);
    let mut guard = cache.lock().unwrap();
    Ok(guard.entry((p, n)).or_insert(built).clone())
}

/// A finite field together with its Frobenius convention. Cheap to clone.
#[derive(Clone)]
pub struct Field {
    spec: FieldSpec,
    t: Arc<Tables>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "F_{}^{} (q = {}^{}, s = {})",
            self.spec.p, self.t.n, self.spec.p, self.spec.r, self.spec.s
        )
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}
impl Eq for Field {}

impl Field {
    pub fn new(spec: FieldSpec) -> Result<Field> {
        if spec.r == 0 || spec.s == 0 {
            return Err(Error::FieldMismatch(format!(
                "r and s must be positive, got r = {}, s = {}",
                spec.r, spec.s
            )));
        }
        let t = tables(spec.p, spec.degree())?;
        Ok(Field { spec, t })
    }

    /// The prime-tier field `F_q`, `q = p^r`.
    pub fn base(p: u32, r: u32) -> Result<Field> {
        Field::new(FieldSpec::prime_tier(p, r))
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }
    pub fn p(&self) -> u32 {
        self.spec.p
    }
    pub fn r(&self) -> u32 {
        self.spec.r
    }
    pub fn s(&self) -> u32 {
        self.spec.s
    }
    /// Degree over the prime field.
    pub fn degree(&self) -> u32 {
        self.t.n
    }
    pub fn size(&self) -> u32 {
        self.t.size
    }
    pub fn q(&self) -> u64 {
        self.spec.q()
    }
    /// Defining polynomial, low degree first, monic.
    pub fn modulus(&self) -> &[u32] {
        &self.t.modulus
    }

    /// The field `F_{q^s}` over the same `F_q`.
    pub fn extension(&self, s: u32) -> Result<Field> {
        Field::new(FieldSpec::new(self.spec.p, self.spec.r, self.spec.s * s))
    }

    /// Same underlying field with base `F_{q^{s}}` (σ becomes the `q^s`-power).
    pub fn as_base(&self) -> Result<Field> {
        Field::new(FieldSpec::new(self.spec.p, self.spec.r * self.spec.s, 1))
    }

    pub fn base_field(&self) -> Result<Field> {
        Field::base(self.spec.p, self.spec.r)
    }

    #[inline]
    pub fn zero(&self) -> Elem {
        0
    }
    #[inline]
    pub fn one(&self) -> Elem {
        1
    }

    /// Image of an integer under `Z → F_p ⊂ F`.
    pub fn from_int(&self, v: i64) -> Elem {
        v.rem_euclid(self.spec.p as i64) as Elem
    }

    pub fn contains(&self, a: Elem) -> bool {
        a < self.t.size
    }

    /// The primitive generator `t`.
    pub fn generator(&self) -> Elem {
        self.t.exp[1 % self.t.exp.len()]
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if a == 0 {
            return b;
        }
        if b == 0 {
            return a;
        }
        let t = &*self.t;
        if t.n == 1 {
            return (a + b) % t.p;
        }
        if t.p == 2 {
            return a ^ b;
        }
        let order = t.size - 1;
        let la = t.log[a as usize];
        let lb = t.log[b as usize];
        let d = (lb + order - la) % order;
        let z = t.zech[d as usize];
        if z == NONE {
            0
        } else {
            t.exp[((la as u64 + z as u64) % order as u64) as usize]
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        if a == 0 {
            return 0;
        }
        let t = &*self.t;
        if t.p == 2 {
            return a;
        }
        if t.n == 1 {
            return t.p - a;
        }
        let order = t.size - 1;
        t.exp[((t.log[a as usize] + order / 2) % order) as usize]
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a == 0 || b == 0 {
            return 0;
        }
        let t = &*self.t;
        let order = t.size - 1;
        let s = t.log[a as usize] as u64 + t.log[b as usize] as u64;
        t.exp[(s % order as u64) as usize]
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a == 0 {
            return Err(Error::NotInvertible);
        }
        let t = &*self.t;
        let order = t.size - 1;
        Ok(t.exp[((order - t.log[a as usize]) % order) as usize])
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let t = &*self.t;
        let order = (t.size - 1) as u64;
        let l = t.log[a as usize] as u64;
        t.exp[((l * (e % order)) % order) as usize]
    }

    /// `σ^e(a)` where `σ` is the `q`-power map; `e` may be negative.
    pub fn frob(&self, a: Elem, e: i64) -> Elem {
        if a == 0 || self.t.n == self.spec.r {
            // σ is the identity on F_q itself.
            return a;
        }
        let s = self.spec.s as i64;
        let k = e.rem_euclid(s) as u32;
        let mut exp = 1u64;
        let order = (self.t.size - 1) as u64;
        for _ in 0..k {
            exp = exp * self.q() % order;
        }
        self.pow(a, exp)
    }

    /// The `p`-adic digits of `a` (coefficients of `1, t, ..., t^{n-1}`).
    pub fn digits(&self, a: Elem) -> Vec<u32> {
        to_digits(a, self.t.p, self.t.n)
    }

    pub fn from_digits(&self, d: &[u32]) -> Result<Elem> {
        if d.len() > self.t.n as usize || d.iter().any(|&c| c >= self.t.p) {
            return Err(Error::FieldMismatch(format!(
                "coefficient vector {d:?} does not describe an element of {self:?}"
            )));
        }
        Ok(from_digits(d, self.t.p))
    }

    /// All elements in packed order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.t.size
    }

    /// Embedding of the subfield `small` into this field. The image of the
    /// generator of `small` is the root of its defining polynomial of least
    /// exponent in this field's generator.
    pub fn embedding_from(&self, small: &Field) -> Result<Embedding> {
        if small.p() != self.p() || !self.degree().is_multiple_of(small.degree()) {
            return Err(Error::FieldMismatch(format!(
                "{small:?} does not embed into {self:?}"
            )));
        }
        embedding(small, self)
    }
}

/// A field embedding given by a lookup table.
#[derive(Clone)]
pub struct Embedding {
    table: Arc<Vec<Elem>>,
}

impl Embedding {
    #[inline]
    pub fn apply(&self, a: Elem) -> Elem {
        self.table[a as usize]
    }
}

fn embedding(small: &Field, big: &Field) -> Result<Embedding> {
    type Key = (u32, u32, u32);
    static CACHE: OnceLock<Mutex<HashMap<Key, Arc<Vec<Elem>>>>> = OnceLock::new();
    let key = (small.p(), small.degree(), big.degree());
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().unwrap().get(&key) {
        return Ok(Embedding { table: t.clone() });
    }
    let mut table = vec![0; small.size() as usize];
    if small.degree() == big.degree() {
        for a in small.elements() {
            table[a as usize] = a;
        }
    } else {
        let big_order = (big.size() - 1) as u64;
        let small_order = (small.size() - 1) as u64;
        let step = big_order / small_order;
        let modulus = small.modulus();
        let mut root = None;
        for j in 1..small_order.max(2) {
            if gcd(j, small_order) != 1 {
                continue;
            }
            let beta = big.pow(big.generator(), step * j);
            // evaluate the defining polynomial (coefficients lie in F_p)
            let mut acc = 0;
            for &c in modulus.iter().rev() {
                acc = big.add(big.mul(acc, beta), c);
            }
            if acc == 0 {
                root = Some(beta);
                break;
            }
        }
        let beta = root.expect("subfield generator has a root in the extension");
        table[0] = 0;
        let mut cur = 1;
        for k in 0..small_order {
            let a = small.t.exp[k as usize];
            table[a as usize] = cur;
            cur = big.mul(cur, beta);
        }
    }
    let table = Arc::new(table);
    cache.lock().unwrap().insert(key, table.clone());
    Ok(Embedding { table })
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_arithmetic() {
        let f = Field::base(7, 1).unwrap();
        assert_eq!(f.add(5, 4), 2);
        assert_eq!(f.mul(3, 5), 1);
        assert_eq!(f.inv(3).unwrap(), 5);
        assert_eq!(f.neg(2), 5);
        assert_eq!(f.modulus().len(), 2);
    }

    #[test]
    fn extension_field_axioms_exhaustive() {
        for (p, n) in [(2, 2), (2, 3), (3, 2), (5, 2)] {
            let f = Field::base(p, n).unwrap();
            for a in f.elements() {
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
                for b in f.elements() {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    // digitwise addition agrees with table addition
                    let da = f.digits(a);
                    let db = f.digits(b);
                    let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                    assert_eq!(f.add(a, b), f.from_digits(&sum).unwrap());
                }
            }
        }
    }

    #[test]
    fn frobenius_fixes_base_field() {
        let big = Field::new(FieldSpec::new(2, 1, 3)).unwrap();
        let small = Field::base(2, 1).unwrap();
        let emb = big.embedding_from(&small).unwrap();
        for a in small.elements() {
            assert_eq!(big.frob(emb.apply(a), 1), emb.apply(a));
        }
        let fixed: Vec<_> = big.elements().filter(|&a| big.frob(a, 1) == a).collect();
        assert_eq!(fixed.len(), 2);
        // σ^s = id
        for a in big.elements() {
            assert_eq!(big.frob(a, 3), a);
            assert_eq!(big.frob(big.frob(a, -1), 1), a);
        }
    }

    #[test]
    fn embedding_is_a_ring_map() {
        let small = Field::base(3, 2).unwrap();
        let big = Field::new(FieldSpec::new(3, 2, 2)).unwrap();
        let e = big.embedding_from(&small).unwrap();
        for a in small.elements() {
            for b in small.elements() {
                assert_eq!(e.apply(small.add(a, b)), big.add(e.apply(a), e.apply(b)));
                assert_eq!(e.apply(small.mul(a, b)), big.mul(e.apply(a), e.apply(b)));
            }
        }
    }

    #[test]
    fn rejects_composite_characteristic() {
        assert_eq!(Field::base(4, 1).unwrap_err(), Error::NotPrime(4));
    }
}
