//! Exact arithmetic in cyclotomic fields `Q(zeta_N)`.
//!
//! A [`CycloNum`] is a polynomial in `zeta_N` with rational coefficients,
//! reduced modulo the `N`-th cyclotomic polynomial. Values with different
//! moduli are compared and combined inside `Q(zeta_lcm)`.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Returns `Phi_n` with coefficients listed constant term first.
pub fn cyclotomic_poly(n: u32) -> Vec<i64> {
    assert!(n >= 1, "cyclotomic_poly: n must be positive");
    // x^n - 1 divided by Phi_d for every proper divisor d.
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n % d == 0 {
            num = exact_div(&num, &cyclotomic_poly(d));
        }
    }
    num
}

/// Exact division of integer polynomials by a monic divisor.
fn exact_div(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dl = den.len() - 1;
    debug_assert_eq!(den[dl], 1);
    let mut quot = vec![0i64; num.len() - dl];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dl];
        quot[i] = c;
        if c != 0 {
            for (j, &dj) in den.iter().enumerate() {
                rem[i + j] -= c * dj;
            }
        }
    }
    debug_assert!(rem.iter().all(|&x| x == 0), "non-exact division");
    quot
}

/// Multiplies integer polynomials (constant term first).
pub fn poly_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0i64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub(crate) fn lcm(a: u32, b: u32) -> u32 {
    a.lcm(&b)
}

/// Per-modulus reduction data: `x^j mod Phi_N` for `0 <= j < N`.
#[derive(Debug)]
struct FieldTables {
    degree: usize,
    powers: Vec<Vec<i64>>,
}

impl FieldTables {
    fn build(n: u32) -> Self {
        let phi = cyclotomic_poly(n);
        let degree = phi.len() - 1;
        let mut powers = Vec::with_capacity(n as usize);
        let mut cur = vec![0i64; degree];
        cur[0] = 1;
        for _ in 0..n {
            powers.push(cur.clone());
            // multiply by x and reduce with the monic relation x^d = -sum phi_i x^i
            let top = cur[degree - 1];
            for i in (1..degree).rev() {
                cur[i] = cur[i - 1];
            }
            cur[0] = 0;
            if top != 0 {
                for i in 0..degree {
                    cur[i] -= top * phi[i];
                }
            }
        }
        FieldTables { degree, powers }
    }
}

fn tables(n: u32) -> Arc<FieldTables> {
    static CACHE: OnceLock<RwLock<HashMap<u32, Arc<FieldTables>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(t) = cache
        .read()
        .expect("cyclotomic table cache poisoned")
        .get(&n)
    {
        return Arc::clone(t);
    }
    let built = Arc::new(FieldTables::build(n));
    let mut w = cache.write().expect("cyclotomic table cache poisoned");
    Arc::clone(w.entry(n).or_insert(built))
}

/// Degree of `Phi_n` (Euler's totient).
pub fn totient(n: u32) -> usize {
    tables(n).degree
}

/// An exact element of `Q(zeta_N)`.
#[derive(Clone, Debug)]
pub struct CycloNum {
    modulus: u32,
    coeffs: Vec<BigRational>,
}

impl CycloNum {
    pub fn zero(modulus: u32) -> Self {
        assert!(modulus >= 1);
        CycloNum {
            modulus,
            coeffs: vec![BigRational::zero(); totient(modulus)],
        }
    }

    pub fn one(modulus: u32) -> Self {
        Self::from_rational(modulus, BigRational::one())
    }

    pub fn from_int(modulus: u32, v: i64) -> Self {
        Self::from_rational(modulus, BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_rational(modulus: u32, v: BigRational) -> Self {
        let mut z = Self::zero(modulus);
        z.coeffs[0] = v;
        z
    }

    /// `zeta_N^k`.
    pub fn root_of_unity(modulus: u32, k: i64) -> Self {
        let t = tables(modulus);
        let e = k.rem_euclid(modulus as i64) as usize;
        CycloNum {
            modulus,
            coeffs: t.powers[e]
                .iter()
                .map(|&c| BigRational::from_integer(c.into()))
                .collect(),
        }
    }

    /// `sum_k counts[k] * zeta_N^k`; `counts` is indexed by exponent mod `N`.
    pub fn from_root_counts(modulus: u32, counts: &[i64]) -> Self {
        assert_eq!(counts.len(), modulus as usize);
        let t = tables(modulus);
        let mut acc = vec![0i64; t.degree];
        for (k, &c) in counts.iter().enumerate() {
            if c != 0 {
                for (a, &p) in acc.iter_mut().zip(&t.powers[k]) {
                    *a += c * p;
                }
            }
        }
        CycloNum {
            modulus,
            coeffs: acc
                .into_iter()
                .map(|c| BigRational::from_integer(c.into()))
                .collect(),
        }
    }

    /// Builds a value directly from canonical coefficients.
    pub fn from_coeffs(modulus: u32, coeffs: Vec<BigRational>) -> Result<Self> {
        if modulus == 0 || coeffs.len() != totient(modulus) {
            return Err(Error::Malformed(format!(
                "cyclotomic value with modulus {modulus} needs {} coefficients",
                if modulus == 0 { 0 } else { totient(modulus) }
            )));
        }
        Ok(CycloNum { modulus, coeffs })
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Image under `Q(zeta_M) -> Q(zeta_N)`, `zeta_M -> zeta_N^(N/M)`.
    pub fn embed(&self, target: u32) -> Self {
        assert!(
            target % self.modulus == 0,
            "cannot embed Q(zeta_{}) into Q(zeta_{})",
            self.modulus,
            target
        );
        if target == self.modulus {
            return self.clone();
        }
        let step = (target / self.modulus) as usize;
        let t = tables(target);
        let mut out = vec![BigRational::zero(); t.degree];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, &p) in out.iter_mut().zip(&t.powers[(i * step) % target as usize]) {
                if p != 0 {
                    *o += c * BigRational::from_integer(p.into());
                }
            }
        }
        CycloNum {
            modulus: target,
            coeffs: out,
        }
    }

    fn aligned(a: &CycloNum, b: &CycloNum) -> (CycloNum, CycloNum) {
        let m = lcm(a.modulus, b.modulus);
        (a.embed(m), b.embed(m))
    }

    fn reduce_poly(modulus: u32, prod: Vec<BigRational>) -> Self {
        let t = tables(modulus);
        let mut out = vec![BigRational::zero(); t.degree];
        for (j, c) in prod.into_iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let row = &t.powers[j % modulus as usize];
            for (o, &p) in out.iter_mut().zip(row) {
                if p != 0 {
                    *o += &c * BigRational::from_integer(p.into());
                }
            }
        }
        CycloNum {
            modulus,
            coeffs: out,
        }
    }

    /// Multiplies by `zeta_N^k`, where `N` is this value's own modulus.
    pub fn mul_root(&self, k: i64) -> Self {
        let e = k.rem_euclid(self.modulus as i64) as usize;
        let d = self.coeffs.len();
        let mut prod = vec![BigRational::zero(); d + e];
        for (i, c) in self.coeffs.iter().enumerate() {
            prod[i + e] = c.clone();
        }
        Self::reduce_poly(self.modulus, prod)
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        CycloNum {
            modulus: self.modulus,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Multiplicative inverse.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let d = self.coeffs.len();
        // Column i of the matrix is self * x^i; solve M y = e_0.
        let mut rows: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); d + 1]; d];
        let mut col = self.clone();
        for i in 0..d {
            for r in 0..d {
                rows[r][i] = col.coeffs[r].clone();
            }
            col = col.mul_root(1);
        }
        rows[0][d] = BigRational::one();
        for c in 0..d {
            let piv = (c..d)
                .find(|&r| !rows[r][c].is_zero())
                .ok_or(Error::DivisionByZero)?;
            rows.swap(c, piv);
            let inv = rows[c][c].recip();
            for x in rows[c].iter_mut() {
                *x = &*x * &inv;
            }
            for r in 0..d {
                if r != c && !rows[r][c].is_zero() {
                    let f = rows[r][c].clone();
                    for k in c..=d {
                        let v = &rows[c][k] * &f;
                        rows[r][k] -= v;
                    }
                }
            }
        }
        Ok(CycloNum {
            modulus: self.modulus,
            coeffs: rows.into_iter().map(|r| r[d].clone()).collect(),
        })
    }

    /// Complex conjugation `zeta_N -> zeta_N^(N-1)`.
    pub fn conjugate(&self) -> Self {
        let n = self.modulus as usize;
        let mut prod = vec![BigRational::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            prod[(n - i) % n] += c;
        }
        Self::reduce_poly(self.modulus, prod)
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn is_integer(&self) -> bool {
        self.as_rational().is_some_and(|q| q.is_integer())
    }

    pub fn as_i64(&self) -> Option<i64> {
        self.as_rational()
            .filter(|q| q.is_integer())
            .and_then(|q| q.to_integer().to_i64())
    }

    /// Human-readable rendering: rationals as `a` or `a/b`, otherwise a sum of roots.
    pub fn pretty(&self) -> String {
        if let Some(q) = self.as_rational() {
            return q.to_string();
        }
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => format!("z{}", self.modulus),
                _ => format!("z{}^{}", self.modulus, i),
            };
            let s = if mono.is_empty() {
                c.to_string()
            } else if c.is_one() {
                mono
            } else if (-c).is_one() {
                format!("-{mono}")
            } else {
                format!("({c})*{mono}")
            };
            parts.push(s);
        }
        parts.join(" + ").replace("+ -", "- ")
    }
}

impl PartialEq for CycloNum {
    fn eq(&self, other: &Self) -> bool {
        if self.modulus == other.modulus {
            return self.coeffs == other.coeffs;
        }
        let (a, b) = CycloNum::aligned(self, other);
        a.coeffs == b.coeffs
    }
}

impl Eq for CycloNum {}

impl fmt::Display for CycloNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pretty())
    }
}

impl<'a> Add<&'a CycloNum> for &'a CycloNum {
    type Output = CycloNum;
    fn add(self, rhs: &'a CycloNum) -> CycloNum {
        if self.modulus == rhs.modulus {
            return CycloNum {
                modulus: self.modulus,
                coeffs: self
                    .coeffs
                    .iter()
                    .zip(&rhs.coeffs)
                    .map(|(a, b)| a + b)
                    .collect(),
            };
        }
        let (a, b) = CycloNum::aligned(self, rhs);
        &a + &b
    }
}

impl<'a> Sub<&'a CycloNum> for &'a CycloNum {
    type Output = CycloNum;
    fn sub(self, rhs: &'a CycloNum) -> CycloNum {
        self + &(-rhs)
    }
}

impl Neg for &CycloNum {
    type Output = CycloNum;
    fn neg(self) -> CycloNum {
        CycloNum {
            modulus: self.modulus,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl<'a> Mul<&'a CycloNum> for &'a CycloNum {
    type Output = CycloNum;
    fn mul(self, rhs: &'a CycloNum) -> CycloNum {
        if self.modulus != rhs.modulus {
            let (a, b) = CycloNum::aligned(self, rhs);
            return &a * &b;
        }
        let d = self.coeffs.len();
        let mut prod = vec![BigRational::zero(); 2 * d - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        CycloNum::reduce_poly(self.modulus, prod)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<CycloNum> for CycloNum {
            type Output = CycloNum;
            fn $m(self, rhs: CycloNum) -> CycloNum {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a CycloNum> for CycloNum {
            type Output = CycloNum;
            fn $m(self, rhs: &'a CycloNum) -> CycloNum {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for CycloNum {
    type Output = CycloNum;
    fn neg(self) -> CycloNum {
        -&self
    }
}

impl std::iter::Sum for CycloNum {
    fn sum<I: Iterator<Item = CycloNum>>(mut iter: I) -> CycloNum {
        let first = iter.next().unwrap_or_else(|| CycloNum::zero(1));
        iter.fold(first, |acc, x| &acc + &x)
    }
}

#[derive(Serialize, Deserialize)]
struct CycloRecord {
    #[serde(rename = "N")]
    n: u32,
    coeffs: Vec<String>,
}

impl Serialize for CycloNum {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        CycloRecord {
            n: self.modulus,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| format!("{}/{}", c.numer(), c.denom()))
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CycloNum {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rec = CycloRecord::deserialize(deserializer)?;
        let coeffs = rec
            .coeffs
            .iter()
            .map(|s| {
                parse_rational(s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}")))
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        CycloNum::from_coeffs(rec.n, coeffs).map_err(D::Error::custom)
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let n: BigInt = n.trim().parse().ok()?;
    let d: BigInt = d.trim().parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn small_cyclotomic_polys() {
        assert_eq!(cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_poly(6), vec![1, -1, 1]);
    }

    #[test]
    fn product_over_divisors_is_x_n_minus_one() {
        for n in 1..=40u32 {
            let mut prod = vec![1i64];
            for d in (1..=n).filter(|d| n % d == 0) {
                prod = poly_mul(&prod, &cyclotomic_poly(d));
            }
            let mut expect = vec![0i64; n as usize + 1];
            expect[0] = -1;
            expect[n as usize] = 1;
            assert_eq!(prod, expect, "n = {n}");
        }
    }

    #[test]
    fn roots_of_unity_examples() {
        assert_eq!(CycloNum::root_of_unity(4, 2), CycloNum::from_int(4, -1));
        let s = &CycloNum::root_of_unity(3, 1) + &CycloNum::root_of_unity(3, 2);
        assert_eq!(s, CycloNum::from_int(3, -1));
        let p = &CycloNum::root_of_unity(5, 1) * &CycloNum::root_of_unity(5, 4);
        assert_eq!(p, CycloNum::one(5));
        assert_eq!(CycloNum::root_of_unity(7, 0), CycloNum::one(7));
    }

    #[test]
    fn arithmetic_examples() {
        let i = CycloNum::root_of_unity(4, 1);
        assert_eq!(&i * &i, CycloNum::from_int(4, -1));
        assert_eq!(
            CycloNum::root_of_unity(3, 1).inv().unwrap(),
            CycloNum::root_of_unity(3, 2)
        );
        let z3 = CycloNum::root_of_unity(3, 1).embed(12);
        assert_eq!(z3, CycloNum::root_of_unity(12, 4));
        assert_eq!(
            &z3 * &CycloNum::root_of_unity(12, 3),
            CycloNum::root_of_unity(12, 7)
        );
        // mixed moduli auto-embed
        assert_eq!(
            &CycloNum::root_of_unity(3, 1) * &CycloNum::root_of_unity(4, 1),
            CycloNum::root_of_unity(12, 7)
        );
        assert!(matches!(
            CycloNum::zero(5).inv(),
            Err(Error::DivisionByZero)
        ));
    }

    #[test]
    fn conjugation_examples() {
        assert_eq!(
            CycloNum::root_of_unity(5, 1).conjugate(),
            CycloNum::root_of_unity(5, 4)
        );
        let r = CycloNum::from_rational(9, q(7, 3));
        assert_eq!(r.conjugate(), r);
        let s = &CycloNum::root_of_unity(3, 1) + &CycloNum::root_of_unity(3, 2);
        assert_eq!(s.conjugate(), s);
    }

    #[test]
    fn rationality_tests() {
        let m1 = CycloNum::root_of_unity(4, 2);
        assert_eq!(m1.as_rational(), Some(q(-1, 1)));
        assert!(m1.is_integer());
        let half = CycloNum::from_rational(4, q(1, 2));
        assert_eq!(half.as_rational(), Some(q(1, 2)));
        assert!(!half.is_integer());
        assert_eq!(CycloNum::root_of_unity(5, 1).as_rational(), None);
    }

    #[test]
    fn serde_shape() {
        let z = CycloNum::from_rational(4, q(-3, 2));
        let s = serde_json::to_string(&z).unwrap();
        assert_eq!(s, r#"{"N":4,"coeffs":["-3/2","0/1"]}"#);
        let back: CycloNum = serde_json::from_str(&s).unwrap();
        assert_eq!(back, z);
    }

    #[test]
    fn pretty_rendering() {
        assert_eq!(CycloNum::from_int(3, 5).pretty(), "5");
        assert_eq!(CycloNum::root_of_unity(5, 1).pretty(), "z5");
    }
}
