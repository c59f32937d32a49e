//! The finite group `GL_n(O_r)`, fully enumerated.
//!
//! Elements are addressed by their index in a [`GroupTable`]; matrices are
//! stored flat, entry-major, each entry holding `r` field coefficients.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rings::{FieldElem, TruncElem, TruncRing};

/// Upper bound on the number of enumerated group elements.
pub const GROUP_BUDGET: usize = 1_000_000;
/// Upper bound on `|O_r|^(n^2)`, the number of matrices scanned.
pub const MATRIX_BUDGET: u64 = 1 << 24;
const MAX_STRIDE: usize = 64;

/// Square matrix with entries in a truncated series ring, stored flat.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Matrix {
    n: usize,
    level: usize,
    data: Vec<FieldElem>,
}

impl Matrix {
    pub fn from_entries(ring: &TruncRing, n: usize, entries: &[TruncElem]) -> Result<Self> {
        if entries.len() != n * n || entries.iter().any(|e| e.level() != ring.level()) {
            return Err(Error::Malformed(
                "matrix entries do not match the ring".into(),
            ));
        }
        let data = entries
            .iter()
            .flat_map(|e| e.coeffs().iter().copied())
            .collect();
        Ok(Matrix {
            n,
            level: ring.level(),
            data,
        })
    }

    pub fn identity(ring: &TruncRing, n: usize) -> Self {
        let mut m = Matrix {
            n,
            level: ring.level(),
            data: vec![0; n * n * ring.level()],
        };
        if ring.level() > 0 {
            for i in 0..n {
                m.data[(i * n + i) * ring.level()] = 1;
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn entry(&self, i: usize, j: usize) -> &[FieldElem] {
        let s = (i * self.n + j) * self.level;
        &self.data[s..s + self.level]
    }

    pub fn entry_elem(&self, ring: &TruncRing, i: usize, j: usize) -> TruncElem {
        ring.elem(self.entry(i, j)).expect("entry fits its ring")
    }

    pub fn raw(&self) -> &[FieldElem] {
        &self.data
    }

    /// Entrywise reduction modulo `t^i`.
    pub fn reduce(&self, i: usize) -> Result<Matrix> {
        if i > self.level {
            return Err(Error::LevelOutOfRange {
                requested: i,
                level: self.level,
            });
        }
        let data = self
            .data
            .chunks(self.level.max(1))
            .flat_map(|c| c[..i].iter().copied())
            .collect();
        Ok(Matrix {
            n: self.n,
            level: i,
            data,
        })
    }

    /// Entrywise constant embedding into level `r`.
    pub fn lift_constant(&self, r: usize) -> Matrix {
        let mut data = vec![0; self.n * self.n * r];
        for e in 0..self.n * self.n {
            if self.level > 0 && r > 0 {
                data[e * r] = self.data[e * self.level];
            }
        }
        Matrix {
            n: self.n,
            level: r,
            data,
        }
    }

    /// Entrywise map over coefficients (e.g. base-field inclusion).
    pub fn map_coeffs(&self, f: impl Fn(FieldElem) -> FieldElem) -> Matrix {
        Matrix {
            n: self.n,
            level: self.level,
            data: self.data.iter().map(|&c| f(c)).collect(),
        }
    }

    pub fn mul(&self, ring: &TruncRing, rhs: &Matrix) -> Matrix {
        let mut data = vec![0; self.data.len()];
        mat_mul_into(ring, self.n, &self.data, &rhs.data, &mut data);
        Matrix {
            n: self.n,
            level: self.level,
            data,
        }
    }

    pub fn det(&self, ring: &TruncRing) -> TruncElem {
        let mut out = vec![0; ring.level()];
        mat_det(ring, self.n, &self.data, &mut out);
        ring.elem(&out).expect("determinant fits")
    }

    pub fn inverse(&self, ring: &TruncRing) -> Result<Matrix> {
        let data = mat_inv(ring, self.n, &self.data)?;
        Ok(Matrix {
            n: self.n,
            level: self.level,
            data,
        })
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self.entry(i, j).iter().all(|&c| c == 0)))
    }

    /// Entries are constant series.
    pub fn is_identity(&self) -> bool {
        let r = self.level;
        (0..self.n * self.n).all(|e| {
            let c = &self.data[e * r..(e + 1) * r];
            let diag = e % (self.n + 1) == 0;
            c.iter()
                .enumerate()
                .all(|(k, &v)| v == u32::from(diag && k == 0))
        })
    }

    pub fn is_constant(&self) -> bool {
        self.data
            .chunks(self.level.max(1))
            .all(|c| c.iter().skip(1).all(|&x| x == 0))
    }
}

pub(crate) fn mat_mul_into(
    ring: &TruncRing,
    n: usize,
    a: &[FieldElem],
    b: &[FieldElem],
    out: &mut [FieldElem],
) {
    let r = ring.level();
    out.iter_mut().for_each(|x| *x = 0);
    for i in 0..n {
        for j in 0..n {
            let o = &mut out[(i * n + j) * r..(i * n + j + 1) * r];
            for k in 0..n {
                let x = &a[(i * n + k) * r..(i * n + k + 1) * r];
                let y = &b[(k * n + j) * r..(k * n + j + 1) * r];
                ring.mul_acc_slices(x, y, o);
            }
        }
    }
}

fn permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    if n == 0 {
        return vec![(vec![], false)];
    }
    let mut out = Vec::new();
    for (p, odd) in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            // inserting at `pos` adds (len - pos) inversions
            out.push((q, odd ^ ((p.len() - pos) % 2 == 1)));
        }
    }
    out
}

pub(crate) fn mat_det(ring: &TruncRing, n: usize, a: &[FieldElem], out: &mut [FieldElem]) {
    let r = ring.level();
    let f = ring.field();
    out.iter_mut().for_each(|x| *x = 0);
    for (perm, odd) in permutations(n) {
        let mut term = vec![0; r];
        if r > 0 {
            term[0] = 1;
        }
        for (i, &j) in perm.iter().enumerate() {
            let mut next = vec![0; r];
            ring.mul_acc_slices(&term, &a[(i * n + j) * r..(i * n + j + 1) * r], &mut next);
            term = next;
        }
        for c in 0..r {
            let t = if odd { f.neg(term[c]) } else { term[c] };
            out[c] = f.add(out[c], t);
        }
    }
}

/// Gauss-Jordan inversion over the local ring, pivoting on units.
pub(crate) fn mat_inv(ring: &TruncRing, n: usize, a: &[FieldElem]) -> Result<Vec<FieldElem>> {
    let r = ring.level();
    let mut m: Vec<Vec<TruncElem>> = (0..n)
        .map(|i| {
            let mut row: Vec<TruncElem> = (0..n)
                .map(|j| ring.elem(&a[(i * n + j) * r..(i * n + j + 1) * r]).unwrap())
                .collect();
            row.extend((0..n).map(|j| if i == j { ring.one() } else { ring.zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let piv = (c..n)
            .find(|&i| ring.is_unit(&m[i][c]))
            .ok_or(Error::NonUnit)?;
        m.swap(c, piv);
        let inv = ring.inv(&m[c][c])?;
        m[c] = m[c].iter().map(|x| ring.mul(x, &inv)).collect();
        for i in 0..n {
            if i != c {
                let factor = m[i][c].clone();
                if factor.coeffs().iter().all(|&x| x == 0) {
                    continue;
                }
                let pivot_row = m[c].clone();
                for (x, p) in m[i].iter_mut().zip(&pivot_row) {
                    *x = ring.sub(x, &ring.mul(&factor, p));
                }
            }
        }
    }
    Ok(m.into_iter()
        .flat_map(|row| {
            row[n..]
                .iter()
                .flat_map(|e| e.coeffs().to_vec())
                .collect::<Vec<_>>()
        })
        .collect())
}

/// Parameters identifying an enumerated group `GL_n(F_{p^k}[t]/t^r)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct GroupDescriptor {
    pub n: usize,
    pub p: u32,
    pub k: u32,
    pub r: usize,
    pub d: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConjClass {
    pub rep: usize,
    pub size: usize,
}

/// `GL_n(O_r)` with multiplication, inverses, orders and conjugacy classes.
#[derive(Debug)]
pub struct GroupTable {
    ring: TruncRing,
    n: usize,
    stride: usize,
    data: Vec<FieldElem>,
    code_index: Vec<u32>,
    place: Vec<u64>,
    identity: usize,
    inverse: Vec<u32>,
    orders: Vec<u32>,
    generators: Vec<usize>,
    class_of: Vec<u32>,
    classes: Vec<ConjClass>,
}

impl GroupTable {
    /// Enumerates `GL_n` over `ring` and computes conjugacy classes.
    pub fn enumerate(n: usize, ring: &TruncRing) -> Result<Self> {
        let r = ring.level();
        let qf = ring.field().size() as u64;
        let stride = n * n * r;
        let total = qf
            .checked_pow(stride as u32)
            .filter(|&t| t <= MATRIX_BUDGET && stride <= MAX_STRIDE)
            .ok_or_else(|| {
                Error::TooLarge(format!("{qf}^{stride} matrices exceed the scan budget"))
            })?;
        let place: Vec<u64> = (0..stride).map(|j| qf.pow(j as u32)).collect();

        // Invertible iff the constant-term matrix has nonzero determinant.
        let const_ring = ring.at_level(1);
        let const_ok: Vec<bool> = {
            let cstride = n * n;
            let ctotal = qf.pow(cstride as u32);
            (0..ctotal)
                .map(|code| {
                    let mut c = code;
                    let digits: Vec<u32> = (0..cstride)
                        .map(|_| {
                            let d = (c % qf) as u32;
                            c /= qf;
                            d
                        })
                        .collect();
                    let mut det = [0u32; 1];
                    mat_det(&const_ring, n, &digits, &mut det);
                    det[0] != 0
                })
                .collect()
        };
        let mut code_index = vec![u32::MAX; total as usize];
        let mut data = Vec::new();
        let mut count = 0usize;
        let mut digits = vec![0u32; stride];
        for code in 0..total {
            if code > 0 {
                // increment base-qf counter
                for d in digits.iter_mut() {
                    *d += 1;
                    if (*d as u64) < qf {
                        break;
                    }
                    *d = 0;
                }
            }
            let ccode = if r == 0 {
                0
            } else {
                (0..n * n)
                    .rev()
                    .fold(0u64, |acc, e| acc * qf + digits[e * r] as u64)
            };
            if r > 0 && !const_ok[ccode as usize] {
                continue;
            }
            if count >= GROUP_BUDGET {
                return Err(Error::TooLarge(format!(
                    "more than {GROUP_BUDGET} invertible matrices"
                )));
            }
            code_index[code as usize] = count as u32;
            data.extend_from_slice(&digits);
            count += 1;
        }
        let mut table = GroupTable {
            ring: ring.clone(),
            n,
            stride,
            data,
            code_index,
            place,
            identity: 0,
            inverse: Vec::new(),
            orders: Vec::new(),
            generators: Vec::new(),
            class_of: Vec::new(),
            classes: Vec::new(),
        };
        table.identity = table
            .index_of(&Matrix::identity(ring, n))
            .expect("identity is invertible");
        table.inverse = (0..count)
            .into_par_iter()
            .map(|i| {
                let inv = mat_inv(&table.ring, n, table.raw(i))
                    .expect("enumerated elements are invertible");
                table.lookup(&inv) as u32
            })
            .collect();
        table.orders = (0..count)
            .into_par_iter()
            .map(|i| table.compute_order(i))
            .collect();
        table.generators = table.find_generators();
        table.compute_classes();
        Ok(table)
    }

    pub fn ring(&self) -> &TruncRing {
        &self.ring
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn level(&self) -> usize {
        self.ring.level()
    }

    /// Size `q` of the residue field.
    pub fn q(&self) -> u64 {
        self.ring.field().size() as u64
    }

    pub fn p(&self) -> u64 {
        self.ring.field().characteristic() as u64
    }

    pub fn descriptor(&self) -> GroupDescriptor {
        let f = self.ring.field();
        GroupDescriptor {
            n: self.n,
            p: f.characteristic(),
            k: f.degree(),
            r: self.level(),
            d: 1,
        }
    }

    pub fn order(&self) -> usize {
        self.inverse.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    #[inline]
    pub(crate) fn raw(&self, i: usize) -> &[FieldElem] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    pub fn matrix(&self, i: usize) -> Matrix {
        Matrix {
            n: self.n,
            level: self.level(),
            data: self.raw(i).to_vec(),
        }
    }

    #[inline]
    fn code(&self, m: &[FieldElem]) -> u64 {
        m.iter().zip(&self.place).map(|(&d, &p)| d as u64 * p).sum()
    }

    #[inline]
    fn lookup(&self, m: &[FieldElem]) -> usize {
        self.code_index[self.code(m) as usize] as usize
    }

    pub fn index_of(&self, m: &Matrix) -> Option<usize> {
        if m.n != self.n || m.level != self.level() {
            return None;
        }
        let idx = *self.code_index.get(self.code(&m.data) as usize)?;
        (idx != u32::MAX).then_some(idx as usize)
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        let mut buf = [0u32; MAX_STRIDE];
        let out = &mut buf[..self.stride];
        mat_mul_into(&self.ring, self.n, self.raw(a), self.raw(b), out);
        self.lookup(out)
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a] as usize
    }

    /// `x^h = h^-1 x h`.
    #[inline]
    pub fn conj(&self, x: usize, h: usize) -> usize {
        self.mul(self.inv(h), self.mul(x, h))
    }

    pub fn pow(&self, a: usize, mut e: u64) -> usize {
        let mut result = self.identity;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        result
    }

    fn compute_order(&self, a: usize) -> u32 {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn element_order(&self, a: usize) -> u32 {
        self.orders[a]
    }

    pub fn det(&self, a: usize) -> TruncElem {
        self.matrix(a).det(&self.ring)
    }

    pub fn commute(&self, a: usize, b: usize) -> bool {
        self.mul(a, b) == self.mul(b, a)
    }

    /// Breadth-first closure of `gens` under right multiplication.
    fn closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        let mut out = vec![self.identity];
        seen[self.identity] = true;
        let mut queue = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    out.push(y);
                    queue.push_back(y);
                }
            }
        }
        out.sort_unstable();
        out
    }

    fn find_generators(&self) -> Vec<usize> {
        let mut by_order: Vec<usize> = (0..self.order()).collect();
        by_order.sort_by_key(|&i| (std::cmp::Reverse(self.orders[i]), i));
        let mut gens = Vec::new();
        let mut member = vec![false; self.order()];
        member[self.identity] = true;
        let mut size = 1;
        for &g in &by_order {
            if size == self.order() {
                break;
            }
            if !member[g] {
                gens.push(g);
                let c = self.closure(&gens);
                size = c.len();
                member.iter_mut().for_each(|m| *m = false);
                for x in c {
                    member[x] = true;
                }
            }
        }
        gens
    }

    fn compute_classes(&mut self) {
        let order = self.order();
        let mut parent: Vec<u32> = (0..order as u32).collect();
        fn find(parent: &mut [u32], mut x: u32) -> u32 {
            while parent[x as usize] != x {
                parent[x as usize] = parent[parent[x as usize] as usize];
                x = parent[x as usize];
            }
            x
        }
        let images: Vec<Vec<usize>> = self
            .generators
            .par_iter()
            .map(|&g| (0..order).map(|x| self.conj(x, g)).collect())
            .collect();
        for img in &images {
            for (x, &y) in img.iter().enumerate() {
                let (a, b) = (find(&mut parent, x as u32), find(&mut parent, y as u32));
                if a != b {
                    // keep the smaller index as root so roots are class minima
                    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                    parent[hi as usize] = lo;
                }
            }
        }
        let mut class_id = vec![u32::MAX; order];
        let mut classes: Vec<ConjClass> = Vec::new();
        let mut class_of = vec![0u32; order];
        for x in 0..order {
            let root = find(&mut parent, x as u32) as usize;
            if class_id[root] == u32::MAX {
                class_id[root] = classes.len() as u32;
                classes.push(ConjClass { rep: root, size: 0 });
            }
            let c = class_id[root];
            class_of[x] = c;
            classes[c as usize].size += 1;
        }
        self.class_of = class_of;
        self.classes = classes;
    }

    pub fn classes(&self) -> &[ConjClass] {
        &self.classes
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn class_of(&self, x: usize) -> usize {
        self.class_of[x] as usize
    }

    pub fn class_rep(&self, c: usize) -> usize {
        self.classes[c].rep
    }

    pub fn class_size(&self, c: usize) -> usize {
        self.classes[c].size
    }

    /// Order of the centralizer of `x`, read off its class size.
    pub fn centralizer_order(&self, x: usize) -> usize {
        self.order() / self.classes[self.class_of(x)].size
    }

    pub fn center(&self) -> Vec<usize> {
        (0..self.order())
            .filter(|&x| self.classes[self.class_of(x)].size == 1)
            .collect()
    }

    fn split_order(&self, a: usize) -> (u64, u64) {
        let p = self.p();
        let mut m = self.orders[a] as u64;
        let mut pa = 1;
        while m % p == 0 {
            m /= p;
            pa *= p;
        }
        (pa, m)
    }

    /// Multiplicative Jordan decomposition `g = s u` into commuting
    /// `p'`-order and `p`-power-order powers of `g`.
    pub fn jordan_decompose(&self, g: usize) -> (usize, usize) {
        let (pa, m) = self.split_order(g);
        let order = pa * m;
        // p^a x = 1 mod m, m y = 1 mod p^a
        let x = (0..m.max(1))
            .find(|&x| (pa * x) % m.max(1) == 1 % m.max(1))
            .unwrap_or(0);
        let y = (0..pa.max(1))
            .find(|&y| (m * y) % pa.max(1) == 1 % pa.max(1))
            .unwrap_or(0);
        let s = self.pow(g, (pa * x) % order);
        let u = self.pow(g, (m * y) % order);
        (s, u)
    }

    pub fn semisimple_part(&self, g: usize) -> usize {
        self.jordan_decompose(g).0
    }

    pub fn is_semisimple(&self, g: usize) -> bool {
        self.orders[g] as u64 % self.p() != 0
    }

    /// `p`-power order; cross-checked against nilpotency of `g - 1`.
    pub fn is_unipotent(&self, g: usize) -> bool {
        let by_order = self.split_order(g).1 == 1;
        debug_assert_eq!(by_order, self.is_unipotent_by_nilpotency(g));
        by_order
    }

    /// `(g - 1)^(n r) = 0`.
    pub fn is_unipotent_by_nilpotency(&self, g: usize) -> bool {
        let ring = &self.ring;
        let f = ring.field();
        let mut nil = self.matrix(g);
        for i in 0..self.n {
            if self.level() > 0 {
                let idx = (i * self.n + i) * self.level();
                nil.data[idx] = f.sub(nil.data[idx], 1);
            }
        }
        let mut acc = Matrix::identity(ring, self.n);
        for _ in 0..self.n * self.level() {
            acc = acc.mul(ring, &nil);
        }
        acc.data.iter().all(|&c| c == 0)
    }

    /// `{g : g = 1 mod t^i}`.
    pub fn congruence_kernel(&self, i: usize) -> Result<Subgroup> {
        let r = self.level();
        if i > r {
            return Err(Error::LevelOutOfRange {
                requested: i,
                level: r,
            });
        }
        let id = self.raw(self.identity).to_vec();
        let elems: Vec<usize> = (0..self.order())
            .filter(|&g| {
                let m = self.raw(g);
                (0..self.n * self.n).all(|e| m[e * r..e * r + i] == id[e * r..e * r + i])
            })
            .collect();
        Ok(Subgroup::from_sorted_unchecked(self, elems))
    }

    pub fn centralizer(&self, s: usize) -> Subgroup {
        let elems: Vec<usize> = (0..self.order())
            .into_par_iter()
            .filter(|&h| self.commute(h, s))
            .collect();
        Subgroup::from_sorted_unchecked(self, elems)
    }

    /// `{h : h^-1 s h in S}`.
    pub fn transporter_to_subset(&self, s: usize, target: &Subgroup) -> Vec<usize> {
        self.transporter_by(s, |y| target.contains(y))
    }

    pub fn transporter_by(&self, s: usize, member: impl Fn(usize) -> bool + Sync) -> Vec<usize> {
        (0..self.order())
            .into_par_iter()
            .filter(|&h| member(self.conj(s, h)))
            .collect()
    }

    pub fn subgroup_generate(&self, gens: &[usize]) -> Result<Subgroup> {
        if gens.is_empty() {
            return Err(Error::Precondition("generator list is empty".into()));
        }
        let elems = self.closure(gens);
        Ok(Subgroup::from_sorted_unchecked(self, elems))
    }

    /// One left-coset representative (the smallest index) per coset `xH`.
    pub fn coset_transversal(&self, h: &Subgroup) -> Vec<usize> {
        let mut covered = vec![false; self.order()];
        let mut reps = Vec::with_capacity(self.order() / h.order());
        for x in 0..self.order() {
            if covered[x] {
                continue;
            }
            reps.push(x);
            for &y in h.elements() {
                covered[self.mul(x, y)] = true;
            }
        }
        reps
    }

    /// `{g : g^-1 S g = S}` for a subgroup given by generators.
    pub fn normalizer(&self, s: &Subgroup) -> Subgroup {
        let gens = s.generating_set(self);
        let elems: Vec<usize> = (0..self.order())
            .into_par_iter()
            .filter(|&g| gens.iter().all(|&x| s.contains(self.conj(x, g))))
            .collect();
        Subgroup::from_sorted_unchecked(self, elems)
    }

    pub fn is_abelian_set(&self, elems: &[usize]) -> bool {
        let gens = Subgroup::greedy_generators(self, elems);
        gens.iter()
            .all(|&a| gens.iter().all(|&b| self.commute(a, b)))
    }

    /// Reduction of an element modulo `t^i`, as a matrix.
    pub fn reduce(&self, g: usize, i: usize) -> Result<Matrix> {
        self.matrix(g).reduce(i)
    }
}

/// A subgroup of an enumerated group, as a sorted index set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    elements: Vec<usize>,
    member: Vec<bool>,
}

impl Subgroup {
    fn from_sorted_unchecked(table: &GroupTable, mut elements: Vec<usize>) -> Self {
        elements.sort_unstable();
        let mut member = vec![false; table.order()];
        for &x in &elements {
            member[x] = true;
        }
        Subgroup { elements, member }
    }

    fn greedy_generators(table: &GroupTable, elems: &[usize]) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut inside = vec![false; table.order()];
        inside[table.identity()] = true;
        for &x in elems {
            if !inside[x] {
                gens.push(x);
                for y in table.closure(&gens) {
                    inside[y] = true;
                }
            }
        }
        gens
    }

    /// Builds a subgroup from an element set, verifying closure.
    pub fn from_elements(table: &GroupTable, elems: Vec<usize>) -> Result<Self> {
        let mut s = Self::from_sorted_unchecked(table, elems);
        s.elements.dedup();
        let gens = Self::greedy_generators(table, &s.elements);
        let closure = if gens.is_empty() {
            vec![table.identity()]
        } else {
            table.closure(&gens)
        };
        if closure != s.elements {
            return Err(Error::Precondition(
                "element set is not closed under multiplication".into(),
            ));
        }
        Ok(s)
    }

    pub fn trivial(table: &GroupTable) -> Self {
        Self::from_sorted_unchecked(table, vec![table.identity()])
    }

    pub fn whole(table: &GroupTable) -> Self {
        Self::from_sorted_unchecked(table, (0..table.order()).collect())
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    #[inline]
    pub fn contains(&self, x: usize) -> bool {
        self.member.get(x).copied().unwrap_or(false)
    }

    /// Position of `x` in the sorted element list.
    pub fn position(&self, x: usize) -> Option<usize> {
        self.elements.binary_search(&x).ok()
    }

    pub fn generating_set(&self, table: &GroupTable) -> Vec<usize> {
        Self::greedy_generators(table, &self.elements)
    }

    pub fn is_abelian(&self, table: &GroupTable) -> bool {
        table.is_abelian_set(&self.elements)
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|&x| other.contains(x))
    }

    pub fn is_normal(&self, table: &GroupTable) -> bool {
        let gens = self.generating_set(table);
        table
            .generators()
            .iter()
            .all(|&g| gens.iter().all(|&x| self.contains(table.conj(x, g))))
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::rings::FiniteField;
    use std::sync::Arc;

    pub(crate) fn gl2(p: u32, r: usize) -> GroupTable {
        let ring = TruncRing::new(Arc::new(FiniteField::new(p, 1).unwrap()), r);
        GroupTable::enumerate(2, &ring).unwrap()
    }

    fn mat(g: &GroupTable, rows: &[&[u32]]) -> usize {
        let r = g.level();
        let entries: Vec<TruncElem> = rows
            .iter()
            .map(|c| g.ring().elem(&c[..r.min(c.len())]).unwrap())
            .collect();
        g.index_of(&Matrix::from_entries(g.ring(), 2, &entries).unwrap())
            .unwrap()
    }

    #[test]
    fn group_orders() {
        assert_eq!(gl2(2, 1).order(), 6);
        assert_eq!(gl2(2, 2).order(), 96);
        assert_eq!(gl2(3, 2).order(), 3888);
    }

    #[test]
    fn class_sizes_sum_and_divide() {
        for g in [gl2(2, 1), gl2(3, 1), gl2(2, 2)] {
            let total: usize = g.classes().iter().map(|c| c.size).sum();
            assert_eq!(total, g.order());
            assert!(g.classes().iter().all(|c| g.order() % c.size == 0));
            // class reps are class minima and conjugation preserves class
            for x in 0..g.order() {
                assert!(g.class_rep(g.class_of(x)) <= x);
                for &h in g.generators() {
                    assert_eq!(g.class_of(g.conj(x, h)), g.class_of(x));
                }
            }
        }
        assert_eq!(gl2(2, 1).num_classes(), 3);
        assert_eq!(gl2(3, 1).num_classes(), 8);
    }

    #[test]
    fn congruence_kernels() {
        let g = gl2(2, 2);
        assert_eq!(g.congruence_kernel(2).unwrap().order(), 1);
        assert_eq!(g.congruence_kernel(0).unwrap().order(), 96);
        let k1 = g.congruence_kernel(1).unwrap();
        assert_eq!(k1.order(), 16);
        assert!(k1.is_abelian(&g));
        assert!(k1.is_normal(&g));
        assert!(Subgroup::from_elements(&g, k1.elements().to_vec()).is_ok());
        assert!(g.congruence_kernel(3).is_err());
    }

    #[test]
    fn jordan_example_over_f3() {
        let g = gl2(3, 1);
        let x = mat(&g, &[&[2], &[1], &[0], &[2]]);
        assert_eq!(g.element_order(x), 6);
        let (s, u) = g.jordan_decompose(x);
        assert_eq!(s, mat(&g, &[&[2], &[0], &[0], &[2]]));
        assert_eq!(u, mat(&g, &[&[1], &[2], &[0], &[1]]));
        assert_eq!(g.mul(s, u), x);
    }

    #[test]
    fn jordan_parts_exhaustive() {
        for g in [gl2(2, 2), gl2(3, 1)] {
            for x in 0..g.order() {
                let (s, u) = g.jordan_decompose(x);
                assert_eq!(g.mul(s, u), x);
                assert_eq!(g.mul(u, s), x);
                assert!(g.is_semisimple(s));
                assert!(g.is_unipotent(u));
                assert_eq!(g.is_unipotent(x), g.is_unipotent_by_nilpotency(x));
            }
        }
    }

    #[test]
    fn semisimple_and_unipotent_examples() {
        let g = gl2(3, 2);
        let id = g.identity();
        assert!(g.is_semisimple(id) && g.is_unipotent(id));
        let u = mat(&g, &[&[1, 0], &[0, 1], &[0, 0], &[1, 0]]);
        assert!(g.is_unipotent(u) && g.is_unipotent_by_nilpotency(u));
        assert_eq!(g.element_order(u), 3);
        let g1 = gl2(3, 1);
        let d = mat(&g1, &[&[1], &[0], &[0], &[2]]);
        assert!(g1.is_semisimple(d) && !g1.is_unipotent(d));
    }

    #[test]
    fn centralizers_and_transporters() {
        let g = gl2(3, 2);
        assert_eq!(g.centralizer(g.identity()).order(), g.order());
        let s = mat(&g, &[&[1, 0], &[0, 0], &[0, 0], &[2, 0]]);
        assert_eq!(g.centralizer(s).order(), 36);

        let g1 = gl2(3, 1);
        let s1 = mat(&g1, &[&[1], &[0], &[0], &[2]]);
        let diag: Vec<usize> = (0..g1.order())
            .filter(|&x| g1.matrix(x).is_diagonal())
            .collect();
        let torus = Subgroup::from_elements(&g1, diag).unwrap();
        assert_eq!(g1.transporter_to_subset(s1, &torus).len(), 8);
        assert_eq!(
            g1.transporter_to_subset(g1.identity(), &torus).len(),
            g1.order()
        );
        let u = mat(&g1, &[&[1], &[1], &[0], &[1]]);
        assert!(g1.transporter_to_subset(u, &torus).is_empty());
    }

    #[test]
    fn generate_and_transversal() {
        let g = gl2(2, 2);
        assert_eq!(g.subgroup_generate(&[g.identity()]).unwrap().order(), 1);
        assert!(g.subgroup_generate(&[]).is_err());
        let diag: Vec<usize> = (0..g.order())
            .filter(|&x| g.matrix(x).is_diagonal())
            .collect();
        let mut gens = diag.clone();
        gens.extend(g.congruence_kernel(1).unwrap().elements());
        let h = g.subgroup_generate(&gens).unwrap();
        assert_eq!(h.order(), 16);
        let tr = g.coset_transversal(&h);
        assert_eq!(tr.len(), 6);
        assert_eq!(tr[0], 0);
    }

    #[test]
    fn from_elements_rejects_non_subgroups() {
        let g = gl2(2, 1);
        let not_closed: Vec<usize> = vec![g.identity(), g.generators()[0]];
        if g.element_order(g.generators()[0]) > 2 {
            assert!(Subgroup::from_elements(&g, not_closed).is_err());
        }
    }

    #[test]
    fn semisimple_classes_meet_a_constant_torus() {
        // Every semisimple element is conjugate to a constant matrix.
        let g = gl2(2, 2);
        for c in g.classes() {
            if g.is_semisimple(c.rep) {
                let found = (0..g.order()).any(|h| g.matrix(g.conj(c.rep, h)).is_constant());
                assert!(found, "class of {} misses constants", c.rep);
            }
        }
    }
}
