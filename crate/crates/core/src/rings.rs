//! Finite fields and truncated power-series rings `F_{q^d}[t]/t^r`.
//!
//! Field elements are stored as `u32` indices: the base-`p` digits of the
//! index are the coefficients (constant first) of the representing
//! polynomial modulo the field's defining polynomial.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

/// Index of an element of a [`FiniteField`].
pub type FieldElem = u32;

pub(crate) fn is_prime(n: u32) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

pub(crate) fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Dense polynomials over `F_p`, constant term first, used only while
/// building field presentations.
mod fp_poly {
    pub fn trim(mut a: Vec<u32>) -> Vec<u32> {
        while a.len() > 1 && *a.last().unwrap() == 0 {
            a.pop();
        }
        a
    }

    pub fn is_zero(a: &[u32]) -> bool {
        a.iter().all(|&c| c == 0)
    }

    fn inv_mod(a: u32, p: u32) -> u32 {
        (1..p)
            .find(|&x| (a as u64 * x as u64) % p as u64 == 1)
            .expect("inverse mod p")
    }

    pub fn rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let mut r = a.to_vec();
        let dm = m.len() - 1;
        let lead_inv = inv_mod(m[dm], p);
        while r.len() > dm && !is_zero(&r) {
            let top = *r.last().unwrap();
            let shift = r.len() - 1 - dm;
            if top != 0 {
                let f = (top as u64 * lead_inv as u64 % p as u64) as u32;
                for (i, &mi) in m.iter().enumerate() {
                    let sub = (f as u64 * mi as u64 % p as u64) as u32;
                    r[shift + i] = (r[shift + i] + p - sub) % p;
                }
            }
            r.pop();
        }
        trim(if r.is_empty() { vec![0] } else { r })
    }

    pub fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
            }
        }
        trim(out.into_iter().map(|c| c as u32).collect())
    }

    pub fn mul_mod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        rem(&mul(a, b, p), m, p)
    }

    pub fn pow_mod(base: &[u32], mut e: u64, m: &[u32], p: u32) -> Vec<u32> {
        let mut result = vec![1u32];
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                result = mul_mod(&result, &b, m, p);
            }
            b = mul_mod(&b, &b, m, p);
            e >>= 1;
        }
        result
    }

    pub fn sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let n = a.len().max(b.len());
        let out = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(out)
    }

    pub fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let (mut x, mut y) = (trim(a.to_vec()), trim(b.to_vec()));
        while !is_zero(&y) {
            let r = rem(&x, &y, p);
            x = y;
            y = r;
        }
        x
    }

    /// Rabin-style test: no factor of degree `j <= k/2`.
    pub fn is_irreducible(f: &[u32], p: u32) -> bool {
        let k = f.len() - 1;
        if k == 1 {
            return true;
        }
        let x = vec![0, 1];
        let mut xp = x.clone();
        for _ in 1..=k / 2 {
            xp = pow_mod(&xp, p as u64, f, p);
            let g = gcd(f, &sub(&xp, &x, p), p);
            if g.len() > 1 {
                return false;
            }
        }
        true
    }
}

/// The finite field `F_{p^k}` with a deterministic presentation.
#[derive(Debug)]
pub struct FiniteField {
    p: u32,
    k: u32,
    size: u32,
    modulus: Vec<u32>,
    generator: FieldElem,
    exp: Vec<FieldElem>,
    log: Vec<u32>,
    add_table: Option<Vec<FieldElem>>,
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}

impl Eq for FiniteField {}

const FIELD_BUDGET: u64 = 1 << 16;

impl FiniteField {
    /// Builds `F_{p^k}` presented by the lexicographically smallest monic
    /// irreducible polynomial of degree `k` (coefficients compared constant
    /// term first).
    pub fn new(p: u32, k: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 {
            return Err(Error::Unsupported("field degree must be at least 1".into()));
        }
        let size64 = (p as u64).checked_pow(k).filter(|&s| s <= FIELD_BUDGET);
        let size = size64.ok_or_else(|| Error::TooLarge(format!("{p}^{k} exceeds 2^16")))? as u32;
        let modulus = Self::smallest_irreducible(p, k);

        let digits = |mut a: u32| -> Vec<u32> {
            let mut v = Vec::with_capacity(k as usize);
            for _ in 0..k {
                v.push(a % p);
                a /= p;
            }
            v
        };
        let index = |poly: &[u32]| -> u32 { poly.iter().rev().fold(0u32, |acc, &c| acc * p + c) };
        let order = size - 1;
        let primes = prime_factors(order);
        let generator = (1..size)
            .find(|&g| {
                let gp = digits(g);
                primes.iter().all(|&l| {
                    let r = fp_poly::pow_mod(&gp, (order / l) as u64, &modulus, p);
                    !(r.len() == 1 && r[0] == 1)
                })
            })
            .unwrap_or(1);
        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![u32::MAX; size as usize];
        let gpoly = digits(generator);
        let mut cur = vec![1u32];
        for e in 0..order {
            let idx = index(&cur);
            exp.push(idx);
            log[idx as usize] = e;
            cur = fp_poly::mul_mod(&cur, &gpoly, &modulus, p);
        }
        let add_table = (size <= 1024).then(|| {
            let mut t = vec![0u32; (size * size) as usize];
            for a in 0..size {
                for b in 0..size {
                    t[(a * size + b) as usize] = Self::add_digits(p, k, a, b);
                }
            }
            t
        });
        Ok(FiniteField {
            p,
            k,
            size,
            modulus,
            generator,
            exp,
            log,
            add_table,
        })
    }

    fn smallest_irreducible(p: u32, k: u32) -> Vec<u32> {
        // Enumerate (c_0, ..., c_{k-1}) with c_0 most significant.
        let total = (p as u64).pow(k);
        for code in 0..total {
            let mut coeffs = vec![0u32; k as usize + 1];
            let mut c = code;
            for i in (0..k as usize).rev() {
                coeffs[i] = (c % p as u64) as u32;
                c /= p as u64;
            }
            coeffs[k as usize] = 1;
            if k > 1 && coeffs[0] == 0 {
                continue;
            }
            if fp_poly::is_irreducible(&coeffs, p) {
                return coeffs;
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }

    fn add_digits(p: u32, k: u32, mut a: u32, mut b: u32) -> u32 {
        if p == 2 {
            return a ^ b;
        }
        let (mut out, mut place) = (0u32, 1u32);
        for _ in 0..k {
            out += ((a % p + b % p) % p) * place;
            a /= p;
            b /= p;
            place *= p;
        }
        out
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    /// Defining polynomial, constant term first, monic of degree `k`.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn generator(&self) -> FieldElem {
        self.generator
    }

    /// Base-`p` coefficients of an element, constant term first.
    pub fn digits(&self, mut a: FieldElem) -> Vec<u32> {
        (0..self.k)
            .map(|_| {
                let d = a % self.p;
                a /= self.p;
                d
            })
            .collect()
    }

    pub fn from_digits(&self, digits: &[u32]) -> FieldElem {
        digits
            .iter()
            .rev()
            .fold(0, |acc, &c| acc * self.p + c % self.p)
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        match &self.add_table {
            Some(t) => t[(a * self.size + b) as usize],
            None => Self::add_digits(self.p, self.k, a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        if self.p == 2 {
            return a;
        }
        let d: Vec<u32> = self
            .digits(a)
            .into_iter()
            .map(|c| (self.p - c) % self.p)
            .collect();
        self.from_digits(&d)
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a == 0 || b == 0 {
            return 0;
        }
        let e =
            (self.log[a as usize] as u64 + self.log[b as usize] as u64) % (self.size as u64 - 1);
        self.exp[e as usize]
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        let order = self.size - 1;
        Ok(self.exp[((order - self.log[a as usize]) % order) as usize])
    }

    pub fn pow(&self, a: FieldElem, e: u64) -> FieldElem {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let order = (self.size - 1) as u64;
        self.exp[((self.log[a as usize] as u64 * (e % order)) % order) as usize]
    }

    /// Discrete logarithm to the stored generator.
    pub fn log(&self, a: FieldElem) -> Option<u32> {
        (a != 0).then(|| self.log[a as usize])
    }

    /// Image of the smallest-index root of `sub`'s defining polynomial,
    /// giving an embedding `sub -> self`.
    pub fn embedding_from(&self, sub: &FiniteField) -> Result<Vec<FieldElem>> {
        if sub.p != self.p || self.k % sub.k != 0 {
            return Err(Error::Unsupported(format!(
                "F_{}^{} is not a subfield of F_{}^{}",
                sub.p, sub.k, self.p, self.k
            )));
        }
        let eval = |poly: &[u32], x: FieldElem| -> FieldElem {
            poly.iter()
                .rev()
                .fold(0, |acc, &c| self.add(self.mul(acc, x), c))
        };
        let root = if sub.k == 1 {
            0
        } else {
            (0..self.size)
                .find(|&x| eval(&sub.modulus, x) == 0)
                .ok_or_else(|| Error::Internal("no root of subfield modulus".into()))?
        };
        Ok((0..sub.size).map(|a| eval(&sub.digits(a), root)).collect())
    }
}

/// `O_{r,d} = F_{q^d}[t]/t^r`, described by its coefficient field and level.
#[derive(Debug, Clone)]
pub struct TruncRing {
    field: Arc<FiniteField>,
    level: usize,
}

/// An element `sum a_i t^i` of a truncated series ring.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TruncElem {
    coeffs: Vec<FieldElem>,
}

impl TruncElem {
    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn level(&self) -> usize {
        self.coeffs.len()
    }
}

impl TruncRing {
    pub fn new(field: Arc<FiniteField>, level: usize) -> Self {
        TruncRing { field, level }
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// Number of elements, `|F|^r`.
    pub fn size(&self) -> u64 {
        (self.field.size() as u64).pow(self.level as u32)
    }

    pub fn elem(&self, coeffs: &[FieldElem]) -> Result<TruncElem> {
        if coeffs.len() > self.level || coeffs.iter().any(|&c| c >= self.field.size()) {
            return Err(Error::Malformed(format!(
                "coefficients {coeffs:?} do not fit the ring"
            )));
        }
        let mut c = coeffs.to_vec();
        c.resize(self.level, 0);
        Ok(TruncElem { coeffs: c })
    }

    pub fn zero(&self) -> TruncElem {
        TruncElem {
            coeffs: vec![0; self.level],
        }
    }

    pub fn one(&self) -> TruncElem {
        self.teichmuller(1)
    }

    /// The uniformiser `t` (zero at level 1).
    pub fn uniformizer(&self) -> TruncElem {
        let mut c = vec![0; self.level];
        if self.level > 1 {
            c[1] = 1;
        }
        TruncElem { coeffs: c }
    }

    /// Constant series `a + 0 t + ...`: the multiplicative section of reduction to level 1.
    pub fn teichmuller(&self, a: FieldElem) -> TruncElem {
        let mut c = vec![0; self.level];
        if self.level > 0 {
            c[0] = a;
        }
        TruncElem { coeffs: c }
    }

    pub fn is_unit(&self, x: &TruncElem) -> bool {
        self.level > 0 && x.coeffs[0] != 0
    }

    #[inline]
    pub(crate) fn add_slices(&self, a: &[FieldElem], b: &[FieldElem], out: &mut [FieldElem]) {
        for i in 0..self.level {
            out[i] = self.field.add(a[i], b[i]);
        }
    }

    /// `out += a * b`, truncated.
    #[inline]
    pub(crate) fn mul_acc_slices(&self, a: &[FieldElem], b: &[FieldElem], out: &mut [FieldElem]) {
        let f = &*self.field;
        for i in 0..self.level {
            if a[i] == 0 {
                continue;
            }
            for j in 0..self.level - i {
                if b[j] != 0 {
                    out[i + j] = f.add(out[i + j], f.mul(a[i], b[j]));
                }
            }
        }
    }

    pub(crate) fn inv_slice(&self, a: &[FieldElem], out: &mut [FieldElem]) -> Result<()> {
        let f = &*self.field;
        if self.level == 0 {
            return Ok(());
        }
        let a0_inv = f.inv(a[0]).map_err(|_| Error::NonUnit)?;
        out[0] = a0_inv;
        for n in 1..self.level {
            let mut s = 0;
            for i in 1..=n {
                s = f.add(s, f.mul(a[i], out[n - i]));
            }
            out[n] = f.neg(f.mul(a0_inv, s));
        }
        Ok(())
    }

    pub fn add(&self, a: &TruncElem, b: &TruncElem) -> TruncElem {
        let mut out = self.zero();
        self.add_slices(&a.coeffs, &b.coeffs, &mut out.coeffs);
        out
    }

    pub fn neg(&self, a: &TruncElem) -> TruncElem {
        TruncElem {
            coeffs: a.coeffs.iter().map(|&c| self.field.neg(c)).collect(),
        }
    }

    pub fn sub(&self, a: &TruncElem, b: &TruncElem) -> TruncElem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &TruncElem, b: &TruncElem) -> TruncElem {
        let mut out = self.zero();
        self.mul_acc_slices(&a.coeffs, &b.coeffs, &mut out.coeffs);
        out
    }

    pub fn inv(&self, a: &TruncElem) -> Result<TruncElem> {
        let mut out = self.zero();
        self.inv_slice(&a.coeffs, &mut out.coeffs)?;
        Ok(out)
    }

    /// The reduction map to level `i`.
    pub fn reduce(&self, x: &TruncElem, i: usize) -> Result<TruncElem> {
        if i > self.level {
            return Err(Error::LevelOutOfRange {
                requested: i,
                level: self.level,
            });
        }
        Ok(TruncElem {
            coeffs: x.coeffs[..i].to_vec(),
        })
    }

    pub fn at_level(&self, i: usize) -> TruncRing {
        TruncRing {
            field: Arc::clone(&self.field),
            level: i,
        }
    }

    /// Raises every coefficient to the `q`-th power.
    pub fn frobenius(&self, x: &TruncElem, q: u64) -> TruncElem {
        TruncElem {
            coeffs: x.coeffs.iter().map(|&c| self.field.pow(c, q)).collect(),
        }
    }

    /// All elements, in index order.
    pub fn elements(&self) -> Vec<TruncElem> {
        let qf = self.field.size() as u64;
        (0..self.size())
            .map(|mut code| {
                let coeffs = (0..self.level)
                    .map(|_| {
                        let c = (code % qf) as u32;
                        code /= qf;
                        c
                    })
                    .collect();
                TruncElem { coeffs }
            })
            .collect()
    }
}

/// The unramified quadratic extension `O_{r,2}` of `O_r`, with the basis
/// `{1, beta}` used to embed `O_{r,2}` into `2x2` matrices over `O_r`.
#[derive(Debug, Clone)]
pub struct UnramifiedExt {
    base: TruncRing,
    ext: TruncRing,
    q: u64,
    embed: Vec<FieldElem>,
    beta: FieldElem,
    /// `beta^2 = trace_beta * beta - norm_beta`, both in the base field.
    trace_beta: FieldElem,
    norm_beta: FieldElem,
    /// Extension-field element -> (a, b) with element = a + b beta.
    decompose: Vec<(FieldElem, FieldElem)>,
}

impl UnramifiedExt {
    pub fn new(base: &TruncRing) -> Result<Self> {
        let bf = base.field();
        let ef = Arc::new(FiniteField::new(bf.characteristic(), 2 * bf.degree())?);
        let embed = ef.embedding_from(bf)?;
        let q = bf.size() as u64;
        let beta = (0..ef.size())
            .find(|&x| ef.pow(x, q) != x)
            .ok_or_else(|| Error::Internal("no element outside the base field".into()))?;
        let beta_q = ef.pow(beta, q);
        let mut preimage = vec![u32::MAX; ef.size() as usize];
        for (a, &img) in embed.iter().enumerate() {
            preimage[img as usize] = a as u32;
        }
        let restrict = |x: FieldElem| preimage[x as usize];
        let trace_beta = restrict(ef.add(beta, beta_q));
        let norm_beta = restrict(ef.mul(beta, beta_q));
        let mut decompose = vec![(0, 0); ef.size() as usize];
        for a in 0..bf.size() {
            for b in 0..bf.size() {
                let x = ef.add(embed[a as usize], ef.mul(embed[b as usize], beta));
                decompose[x as usize] = (a, b);
            }
        }
        let ext = TruncRing::new(ef, base.level());
        Ok(UnramifiedExt {
            base: base.clone(),
            ext,
            q,
            embed,
            beta,
            trace_beta,
            norm_beta,
            decompose,
        })
    }

    pub fn base(&self) -> &TruncRing {
        &self.base
    }

    pub fn ext(&self) -> &TruncRing {
        &self.ext
    }

    pub fn beta(&self) -> TruncElem {
        self.ext.teichmuller(self.beta)
    }

    pub fn beta_minimal_poly(&self) -> (FieldElem, FieldElem) {
        (self.trace_beta, self.norm_beta)
    }

    pub fn include_field(&self, a: FieldElem) -> FieldElem {
        self.embed[a as usize]
    }

    pub fn include(&self, x: &TruncElem) -> TruncElem {
        TruncElem {
            coeffs: x.coeffs.iter().map(|&c| self.embed[c as usize]).collect(),
        }
    }

    pub fn frobenius(&self, x: &TruncElem) -> TruncElem {
        self.ext.frobenius(x, self.q)
    }

    pub fn is_rational(&self, x: &TruncElem) -> bool {
        x.coeffs.iter().all(|&c| self.decompose[c as usize].1 == 0)
    }

    /// Inverse of [`include`](Self::include) on Frobenius-fixed elements.
    pub fn restrict(&self, x: &TruncElem) -> Result<TruncElem> {
        if !self.is_rational(x) {
            return Err(Error::NotMember("base ring"));
        }
        Ok(TruncElem {
            coeffs: x
                .coeffs
                .iter()
                .map(|&c| self.decompose[c as usize].0)
                .collect(),
        })
    }

    /// Writes `x = a + b beta` with `a, b` in the base ring.
    pub fn split(&self, x: &TruncElem) -> (TruncElem, TruncElem) {
        let (a, b) = x.coeffs.iter().map(|&c| self.decompose[c as usize]).unzip();
        (TruncElem { coeffs: a }, TruncElem { coeffs: b })
    }

    pub fn combine(&self, a: &TruncElem, b: &TruncElem) -> TruncElem {
        let e = &self.ext;
        e.add(&self.include(a), &e.mul(&self.include(b), &self.beta()))
    }

    pub fn norm(&self, x: &TruncElem) -> Result<TruncElem> {
        if !self.ext.is_unit(x) {
            return Err(Error::NonUnit);
        }
        self.restrict(&self.ext.mul(x, &self.frobenius(x)))
    }

    pub fn trace(&self, x: &TruncElem) -> TruncElem {
        self.restrict(&self.ext.add(x, &self.frobenius(x)))
            .expect("trace is Frobenius-fixed")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(p: u32, k: u32, r: usize) -> TruncRing {
        TruncRing::new(Arc::new(FiniteField::new(p, k).unwrap()), r)
    }

    #[test]
    fn field_presentations() {
        assert_eq!(FiniteField::new(2, 1).unwrap().modulus(), &[0, 1]);
        assert_eq!(FiniteField::new(2, 2).unwrap().modulus(), &[1, 1, 1]);
        assert_eq!(FiniteField::new(3, 1).unwrap().size(), 3);
        assert!(matches!(FiniteField::new(4, 1), Err(Error::NotPrime(4))));
        // deterministic
        assert_eq!(
            FiniteField::new(3, 2).unwrap(),
            FiniteField::new(3, 2).unwrap()
        );
    }

    #[test]
    fn only_monic_irreducible_quadratic_over_f2() {
        let irreducible: Vec<_> = (0..4u32)
            .map(|c| vec![c & 1, c >> 1, 1])
            .filter(|f| (0..2u32).all(|x| (f[0] + f[1] * x + x * x) % 2 != 0))
            .collect();
        assert_eq!(irreducible, vec![vec![1, 1, 1]]);
    }

    #[test]
    fn multiplicative_group_is_cyclic() {
        for (p, k) in [(2, 1), (2, 2), (3, 1), (3, 2), (2, 3), (5, 1), (2, 4)] {
            let f = FiniteField::new(p, k).unwrap();
            let g = f.generator();
            let mut x = 1;
            let mut seen = std::collections::HashSet::new();
            for _ in 0..f.size() - 1 {
                seen.insert(x);
                x = f.mul(x, g);
            }
            assert_eq!(seen.len() as u32, f.size() - 1);
            assert_eq!(x, 1);
        }
    }

    #[test]
    fn trunc_inverse_examples() {
        let r2 = ring(2, 1, 2);
        let one_t = r2.elem(&[1, 1]).unwrap();
        assert_eq!(r2.mul(&one_t, &one_t), r2.one());
        assert_eq!(r2.inv(&one_t).unwrap(), one_t);
        let r3 = ring(3, 1, 2);
        assert_eq!(
            r3.inv(&r3.elem(&[1, 1]).unwrap()).unwrap(),
            r3.elem(&[1, 2]).unwrap()
        );
        assert!(matches!(r3.inv(&r3.uniformizer()), Err(Error::NonUnit)));
    }

    #[test]
    fn reduce_examples() {
        let r = ring(3, 1, 4);
        let x = r.elem(&[1, 2, 0, 1]).unwrap();
        assert_eq!(r.reduce(&x, 2).unwrap().coeffs(), &[1, 2]);
        assert_eq!(r.reduce(&x, 0).unwrap().coeffs(), &[] as &[u32]);
        let r2 = r.at_level(2);
        assert_eq!(
            r2.reduce(&r.reduce(&x, 2).unwrap(), 1).unwrap(),
            r.reduce(&x, 1).unwrap()
        );
        assert!(matches!(
            r.reduce(&x, 5),
            Err(Error::LevelOutOfRange { .. })
        ));
    }

    #[test]
    fn unit_counts_and_decomposition() {
        for (p, k) in [(2, 1), (3, 1), (2, 2), (3, 2)] {
            for r in 1..=4usize {
                let ring = ring(p, k, r);
                let qd = ring.field().size() as u64;
                if qd.pow(r as u32) > 9u64.pow(4) {
                    continue;
                }
                let units: Vec<_> = ring
                    .elements()
                    .into_iter()
                    .filter(|x| ring.is_unit(x))
                    .collect();
                assert_eq!(units.len() as u64, (qd - 1) * qd.pow(r as u32 - 1));
                // unit = teichmuller(a0) * (1 + t...) uniquely
                for u in &units {
                    let c = ring.teichmuller(u.coeffs()[0]);
                    let one_plus = ring.mul(&ring.inv(&c).unwrap(), u);
                    assert_eq!(one_plus.coeffs()[0], 1);
                    assert_eq!(ring.mul(&c, &one_plus), *u);
                }
            }
        }
    }

    #[test]
    fn reduce_is_ring_hom() {
        let r = ring(3, 1, 3);
        let els = r.elements();
        let low = r.at_level(2);
        for a in els.iter().step_by(3) {
            for b in els.iter().step_by(5) {
                let lhs = r.reduce(&r.mul(a, b), 2).unwrap();
                let rhs = low.mul(&r.reduce(a, 2).unwrap(), &r.reduce(b, 2).unwrap());
                assert_eq!(lhs, rhs);
                let lhs = r.reduce(&r.add(a, b), 2).unwrap();
                assert_eq!(
                    lhs,
                    low.add(&r.reduce(a, 2).unwrap(), &r.reduce(b, 2).unwrap())
                );
            }
        }
    }

    #[test]
    fn teichmuller_section() {
        let r = ring(3, 2, 3);
        let f = r.field().clone();
        for a in 0..f.size() {
            assert_eq!(r.reduce(&r.teichmuller(a), 1).unwrap().coeffs(), &[a]);
            for b in 0..f.size() {
                assert_eq!(
                    r.mul(&r.teichmuller(a), &r.teichmuller(b)),
                    r.teichmuller(f.mul(a, b))
                );
            }
        }
        assert_eq!(r.teichmuller(1), r.one());
    }

    #[test]
    fn frobenius_on_f4_series() {
        let base = ring(2, 1, 2);
        let ext = UnramifiedExt::new(&base).unwrap();
        let e = ext.ext();
        let f4 = e.field().clone();
        // omega is the class of x in F_2[x]/(x^2+x+1), index 2
        let omega = 2;
        let omega2 = f4.mul(omega, omega);
        assert_eq!(omega2, 3);
        let x = e.elem(&[omega, omega]).unwrap();
        assert_eq!(ext.frobenius(&x), e.elem(&[omega2, omega2]).unwrap());
        assert_eq!(ext.frobenius(&ext.frobenius(&x)), x);
        for y in base.elements() {
            assert_eq!(base.frobenius(&y, 2), y);
        }
    }

    #[test]
    fn frobenius_commutes_with_reduce_and_teichmuller() {
        let base = ring(3, 1, 3);
        let ext = UnramifiedExt::new(&base).unwrap();
        let e = ext.ext();
        for x in e.elements().iter().step_by(7) {
            let lhs = e.at_level(2).frobenius(&e.reduce(x, 2).unwrap(), 3);
            assert_eq!(lhs, e.reduce(&ext.frobenius(x), 2).unwrap());
        }
        for a in 0..9 {
            assert_eq!(
                ext.frobenius(&e.teichmuller(a)),
                e.teichmuller(e.field().pow(a, 3))
            );
        }
    }

    #[test]
    fn norm_and_trace() {
        let base = ring(2, 1, 1);
        let ext = UnramifiedExt::new(&base).unwrap();
        let omega = ext.ext().teichmuller(2);
        assert_eq!(ext.norm(&omega).unwrap(), base.one());
        assert!(matches!(ext.norm(&ext.ext().zero()), Err(Error::NonUnit)));

        let base = ring(3, 1, 2);
        let ext = UnramifiedExt::new(&base).unwrap();
        let e = ext.ext();
        let els = e.elements();
        for x in &els {
            let tr = ext.trace(x);
            assert_eq!(ext.include(&tr), e.add(x, &ext.frobenius(x)));
            let (a, b) = ext.split(x);
            assert_eq!(ext.combine(&a, &b), *x);
        }
        let units: Vec<_> = els.iter().filter(|x| e.is_unit(x)).collect();
        for x in units.iter().step_by(3) {
            for y in units.iter().step_by(4) {
                let lhs = ext.norm(&e.mul(x, y)).unwrap();
                assert_eq!(lhs, base.mul(&ext.norm(x).unwrap(), &ext.norm(y).unwrap()));
            }
        }
        // constants: norm(a) = a^(q+1)
        let f = e.field();
        for a in 1..f.size() {
            let n = ext.norm(&e.teichmuller(a)).unwrap();
            assert_eq!(ext.include(&n), e.teichmuller(f.pow(a, 4)));
        }
    }
}
