//! Maximal tori of `GL_2(O_r)`, finite abelian structure and characters.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::cyclo::CycloNum;
use crate::error::{Error, Result};
use crate::grp::{GroupTable, Matrix, Subgroup};
use crate::rings::{TruncElem, UnramifiedExt};

/// An element of `Q/Z`; the value `exp(2 pi i num/den)` of a linear character.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Phase {
    num: u64,
    den: u64,
}

impl Phase {
    pub const ZERO: Phase = Phase { num: 0, den: 1 };

    pub fn new(num: i64, den: u64) -> Self {
        assert!(den > 0);
        let n = num.rem_euclid(den as i64) as u64;
        let g = n.gcd(&den);
        Phase {
            num: n / g,
            den: den / g,
        }
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn add(self, other: Phase) -> Phase {
        let den = self.den.lcm(&other.den);
        Phase::new(
            (self.num * (den / self.den) + other.num * (den / other.den)) as i64,
            den,
        )
    }

    pub fn neg(self) -> Phase {
        Phase::new(-(self.num as i64), self.den)
    }

    pub fn times(self, k: u64) -> Phase {
        Phase::new(
            ((self.num as u128 * k as u128) % self.den as u128) as i64,
            self.den,
        )
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// Exponent `k` with `self = k / modulus`.
    pub fn exponent_mod(&self, modulus: u32) -> u32 {
        assert!(
            modulus as u64 % self.den == 0,
            "phase {self} does not live in Q(zeta_{modulus})"
        );
        (self.num * (modulus as u64 / self.den)) as u32
    }

    pub fn to_cyclo(&self, modulus: u32) -> CycloNum {
        CycloNum::root_of_unity(modulus, self.exponent_mod(modulus) as i64)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CyclicFactor {
    pub generator: usize,
    pub order: u32,
}

/// A finite abelian subgroup presented as a direct product of cyclic groups.
#[derive(Debug, Clone)]
pub struct AbelianStructure {
    subgroup: Subgroup,
    factors: Vec<CyclicFactor>,
    /// Factor coordinates, indexed by position in the subgroup's element list.
    coords: Vec<Vec<u32>>,
    by_coords: Vec<usize>,
}

impl AbelianStructure {
    /// Cyclic peeling: repeatedly take an element of maximal order in the
    /// quotient by the factors found so far whose order does not drop.
    pub fn new(table: &GroupTable, subgroup: Subgroup) -> Result<Self> {
        if !subgroup.is_abelian(table) {
            return Err(Error::NotAbelian);
        }
        let mut inside = vec![false; table.order()];
        inside[table.identity()] = true;
        let mut span = vec![table.identity()];
        let mut factors: Vec<CyclicFactor> = Vec::new();
        while span.len() < subgroup.order() {
            let quotient_order = |x: usize| -> u32 {
                let mut y = x;
                let mut k = 1;
                while !inside[y] {
                    y = table.mul(y, x);
                    k += 1;
                }
                k
            };
            let (best, ord) = subgroup
                .elements()
                .iter()
                .map(|&x| (x, quotient_order(x)))
                .filter(|&(x, k)| table.element_order(x) == k)
                .max_by_key(|&(x, k)| (k, std::cmp::Reverse(x)))
                .ok_or_else(|| Error::Internal("cyclic peeling found no complement".into()))?;
            if ord == 1 {
                return Err(Error::Internal("cyclic peeling stalled".into()));
            }
            factors.push(CyclicFactor {
                generator: best,
                order: ord,
            });
            let mut next = Vec::with_capacity(span.len() * ord as usize);
            let mut power = table.identity();
            for _ in 0..ord {
                for &a in &span {
                    next.push(table.mul(a, power));
                }
                power = table.mul(power, best);
            }
            for &x in &next {
                inside[x] = true;
            }
            span = next;
        }
        let mut s = AbelianStructure {
            subgroup,
            factors,
            coords: Vec::new(),
            by_coords: Vec::new(),
        };
        s.build_coords(table)?;
        Ok(s)
    }

    fn build_coords(&mut self, table: &GroupTable) -> Result<()> {
        let n = self.subgroup.order();
        let mut coords = vec![Vec::new(); n];
        let mut by_coords = Vec::with_capacity(n);
        let mut filled = 0;
        for flat in 0..n {
            let c = self.unflatten(flat);
            let x = self
                .factors
                .iter()
                .zip(&c)
                .fold(table.identity(), |acc, (f, &e)| {
                    table.mul(acc, table.pow(f.generator, e as u64))
                });
            let pos = self
                .subgroup
                .position(x)
                .ok_or(Error::NotMember("subgroup"))?;
            if !coords[pos].is_empty() || (c.is_empty() && filled > 0) {
                return Err(Error::Internal("cyclic factors are not independent".into()));
            }
            coords[pos] = c;
            by_coords.push(x);
            filled += 1;
        }
        if filled != n {
            return Err(Error::Internal(
                "factor orders do not multiply to the group order".into(),
            ));
        }
        self.coords = coords;
        self.by_coords = by_coords;
        Ok(())
    }

    /// Mixed-radix decoding, first factor most significant.
    fn unflatten(&self, mut flat: usize) -> Vec<u32> {
        let mut c = vec![0u32; self.factors.len()];
        for (i, f) in self.factors.iter().enumerate().rev() {
            c[i] = (flat % f.order as usize) as u32;
            flat /= f.order as usize;
        }
        c
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    pub fn factors(&self) -> &[CyclicFactor] {
        &self.factors
    }

    pub fn order(&self) -> usize {
        self.subgroup.order()
    }

    pub fn exponent(&self) -> u32 {
        self.factors.iter().fold(1, |acc, f| acc.lcm(&f.order))
    }

    pub fn coords(&self, x: usize) -> Result<&[u32]> {
        let pos = self
            .subgroup
            .position(x)
            .ok_or(Error::NotMember("abelian subgroup"))?;
        Ok(&self.coords[pos])
    }

    pub fn element_at(&self, coords: &[u32]) -> usize {
        let flat = self
            .factors
            .iter()
            .zip(coords)
            .fold(0usize, |acc, (f, &e)| {
                acc * f.order as usize + (e % f.order) as usize
            });
        self.by_coords[flat]
    }

    /// Every character, ordered lexicographically by exponent vector.
    pub fn characters(&self) -> Vec<AbelianChar> {
        (0..self.order())
            .map(|flat| AbelianChar {
                exponents: self.unflatten(flat),
                orders: self.factors.iter().map(|f| f.order).collect(),
            })
            .collect()
    }
}

/// A linear character of an [`AbelianStructure`], given by the exponent
/// `e_i` of its value `zeta_{m_i}^{e_i}` on each factor generator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AbelianChar {
    exponents: Vec<u32>,
    orders: Vec<u32>,
}

impl AbelianChar {
    pub fn trivial(s: &AbelianStructure) -> Self {
        AbelianChar {
            exponents: vec![0; s.factors.len()],
            orders: s.factors.iter().map(|f| f.order).collect(),
        }
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn orders(&self) -> &[u32] {
        &self.orders
    }

    /// The character taking the given values on the factor generators.
    pub fn from_generator_phases(s: &AbelianStructure, phases: &[Phase]) -> Result<Self> {
        if phases.len() != s.factors.len() {
            return Err(Error::Malformed(
                "one phase per cyclic factor expected".into(),
            ));
        }
        let mut exponents = Vec::with_capacity(phases.len());
        for (f, ph) in s.factors.iter().zip(phases) {
            if f.order as u64 % ph.den() != 0 {
                return Err(Error::Precondition(format!(
                    "phase {ph} on a generator of order {} is not a homomorphism",
                    f.order
                )));
            }
            exponents.push(ph.exponent_mod(f.order));
        }
        Ok(AbelianChar {
            exponents,
            orders: s.factors.iter().map(|f| f.order).collect(),
        })
    }

    pub fn phase_of_coords(&self, coords: &[u32]) -> Phase {
        self.exponents
            .iter()
            .zip(&self.orders)
            .zip(coords)
            .fold(Phase::ZERO, |acc, ((&e, &m), &c)| {
                acc.add(Phase::new((e as u64 * c as u64) as i64, m as u64))
            })
    }

    pub fn eval(&self, s: &AbelianStructure, x: usize) -> Result<Phase> {
        Ok(self.phase_of_coords(s.coords(x)?))
    }

    pub fn value(&self, s: &AbelianStructure, x: usize, modulus: u32) -> Result<CycloNum> {
        Ok(self.eval(s, x)?.to_cyclo(modulus))
    }

    pub fn mul(&self, other: &AbelianChar) -> AbelianChar {
        AbelianChar {
            exponents: self
                .exponents
                .iter()
                .zip(&other.exponents)
                .zip(&self.orders)
                .map(|((&a, &b), &m)| (a + b) % m)
                .collect(),
            orders: self.orders.clone(),
        }
    }

    pub fn inverse(&self) -> AbelianChar {
        AbelianChar {
            exponents: self
                .exponents
                .iter()
                .zip(&self.orders)
                .map(|(&a, &m)| (m - a) % m)
                .collect(),
            orders: self.orders.clone(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    /// Restriction to a subgroup is trivial.
    pub fn is_trivial_on(&self, s: &AbelianStructure, sub: &Subgroup) -> Result<bool> {
        for &x in sub.elements() {
            if !self.eval(s, x)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Multiplicative order.
    pub fn order(&self) -> u64 {
        self.exponents
            .iter()
            .zip(&self.orders)
            .fold(1u64, |acc, (&e, &m)| {
                acc.lcm(&((m / (e.gcd(&m)).max(1)) as u64).max(1))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TorusKind {
    Split,
    Nonsplit,
}

impl fmt::Display for TorusKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TorusKind::Split => "split",
            TorusKind::Nonsplit => "nonsplit",
        })
    }
}

/// Change of basis over `O_{r,2}` conjugating the torus into diagonal
/// matrices: `P^-1 t P` is diagonal for every `t` in the torus.
#[derive(Debug, Clone)]
pub struct Frame {
    ext: UnramifiedExt,
    p: Matrix,
    p_inv: Matrix,
}

impl Frame {
    pub fn ext(&self) -> &UnramifiedExt {
        &self.ext
    }

    pub fn matrix(&self) -> &Matrix {
        &self.p
    }

    pub fn inverse(&self) -> &Matrix {
        &self.p_inv
    }

    /// `P^-1 g P` over `O_{r,2}`.
    pub fn to_frame(&self, g: &Matrix) -> Matrix {
        let e = self.ext.ext();
        let lifted = g.map_coeffs(|c| self.ext.include_field(c));
        self.p_inv.mul(e, &lifted).mul(e, &self.p)
    }

    /// `P m P^-1`, brought back to `O_r` if Frobenius-fixed.
    pub fn from_frame(&self, m: &Matrix) -> Result<Matrix> {
        let e = self.ext.ext();
        let back = self.p.mul(e, m).mul(e, &self.p_inv);
        let entries: Vec<TruncElem> = (0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .map(|(i, j)| self.ext.restrict(&back.entry_elem(e, i, j)))
            .collect::<Result<_>>()
            .map_err(|_| Error::Internal("projected torus part is not Frobenius-fixed".into()))?;
        Matrix::from_entries(self.ext.base(), 2, &entries)
    }
}

/// A maximal torus `T^F` of `GL_2(O_r)` with its decomposition
/// `T^F = T_1^F x (T^1)^F`, character group and Weyl representatives.
#[derive(Debug, Clone)]
pub struct TorusData {
    kind: TorusKind,
    structure: AbelianStructure,
    level_one: Subgroup,
    pro_part: Subgroup,
    weyl_reps: Vec<usize>,
    frame: Frame,
}

impl TorusData {
    /// Diagonal matrices with unit entries.
    pub fn split(table: &GroupTable) -> Result<Self> {
        Self::check_gl2(table)?;
        let elems: Vec<usize> = (0..table.order())
            .filter(|&x| table.matrix(x).is_diagonal())
            .collect();
        let ext = UnramifiedExt::new(table.ring())?;
        let e = ext.ext();
        let id = Matrix::identity(e, 2);
        let frame = Frame {
            p: id.clone(),
            p_inv: id,
            ext,
        };
        let ring = table.ring();
        let swap =
            Matrix::from_entries(ring, 2, &[ring.zero(), ring.one(), ring.one(), ring.zero()])?;
        let w = table.index_of(&swap).ok_or(Error::NotMember("group"))?;
        Self::assemble(
            table,
            TorusKind::Split,
            elems,
            vec![table.identity(), w],
            frame,
        )
    }

    /// Image of `O_{r,2}^x` under its regular representation on the basis `{1, beta}`.
    pub fn nonsplit(table: &GroupTable) -> Result<Self> {
        Self::check_gl2(table)?;
        let ext = UnramifiedExt::new(table.ring())?;
        let e = ext.ext().clone();
        let mut elems: Vec<usize> = e
            .elements()
            .iter()
            .filter(|x| e.is_unit(x))
            .map(|x| Self::regular_embedding(table, &ext, x))
            .collect::<Result<_>>()?;
        elems.sort_unstable();
        // Eigenvectors of beta's multiplication matrix: columns (-beta^q, 1), (-beta, 1).
        let beta = ext.beta();
        let beta_q = ext.frobenius(&beta);
        let p = Matrix::from_entries(&e, 2, &[e.neg(&beta_q), e.neg(&beta), e.one(), e.one()])?;
        let p_inv = p.inverse(&e)?;
        // Frobenius on the basis {1, beta}: beta -> beta^q = Tr - beta.
        let base = ext.base();
        let tr = base.teichmuller(ext.beta_minimal_poly().0);
        let sigma = Matrix::from_entries(
            base,
            2,
            &[base.one(), tr, base.zero(), base.neg(&base.one())],
        )?;
        let w = table.index_of(&sigma).ok_or(Error::NotMember("group"))?;
        let frame = Frame { ext, p, p_inv };
        Self::assemble(
            table,
            TorusKind::Nonsplit,
            elems,
            vec![table.identity(), w],
            frame,
        )
    }

    pub fn build(table: &GroupTable, kind: TorusKind) -> Result<Self> {
        match kind {
            TorusKind::Split => Self::split(table),
            TorusKind::Nonsplit => Self::nonsplit(table),
        }
    }

    fn check_gl2(table: &GroupTable) -> Result<()> {
        if table.dim() != 2 || table.level() == 0 {
            return Err(Error::Unsupported(
                "tori are implemented for GL_2 at level >= 1".into(),
            ));
        }
        Ok(())
    }

    /// Matrix of multiplication by `x = a + b beta`: `[[a, -b N], [b, a + b Tr]]`.
    pub fn regular_embedding(
        table: &GroupTable,
        ext: &UnramifiedExt,
        x: &TruncElem,
    ) -> Result<usize> {
        let base = ext.base();
        let (a, b) = ext.split(x);
        let (tr, nm) = ext.beta_minimal_poly();
        let tr = base.teichmuller(tr);
        let nm = base.teichmuller(nm);
        let m = Matrix::from_entries(
            base,
            2,
            &[
                a.clone(),
                base.neg(&base.mul(&b, &nm)),
                b.clone(),
                base.add(&a, &base.mul(&b, &tr)),
            ],
        )?;
        table.index_of(&m).ok_or(Error::NotMember("group"))
    }

    fn assemble(
        table: &GroupTable,
        kind: TorusKind,
        elems: Vec<usize>,
        weyl_reps: Vec<usize>,
        frame: Frame,
    ) -> Result<Self> {
        let subgroup = Subgroup::from_elements(table, elems)?;
        let level_one: Vec<usize> = subgroup
            .elements()
            .iter()
            .copied()
            .filter(|&x| table.matrix(x).is_constant())
            .collect();
        let kernel = table.congruence_kernel(1)?;
        let pro_part: Vec<usize> = subgroup
            .elements()
            .iter()
            .copied()
            .filter(|&x| kernel.contains(x))
            .collect();
        let level_one = Subgroup::from_elements(table, level_one)?;
        let pro_part = Subgroup::from_elements(table, pro_part)?;
        if level_one.order() * pro_part.order() != subgroup.order() {
            return Err(Error::Internal("torus is not T_1 x T^1".into()));
        }
        for &w in &weyl_reps {
            for &t in subgroup.elements() {
                if !subgroup.contains(table.conj(t, w)) {
                    return Err(Error::Internal(
                        "Weyl representative does not normalize the torus".into(),
                    ));
                }
            }
        }
        let structure = AbelianStructure::new(table, subgroup)?;
        Ok(TorusData {
            kind,
            structure,
            level_one,
            pro_part,
            weyl_reps,
            frame,
        })
    }

    pub fn kind(&self) -> TorusKind {
        self.kind
    }

    pub fn structure(&self) -> &AbelianStructure {
        &self.structure
    }

    pub fn elements(&self) -> &Subgroup {
        self.structure.subgroup()
    }

    pub fn order(&self) -> usize {
        self.structure.order()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.structure.subgroup().contains(x)
    }

    pub fn level_one(&self) -> &Subgroup {
        &self.level_one
    }

    pub fn pro_part(&self) -> &Subgroup {
        &self.pro_part
    }

    pub fn weyl_reps(&self) -> &[usize] {
        &self.weyl_reps
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn characters(&self) -> Vec<AbelianChar> {
        self.structure.characters()
    }

    /// `t = t' t''` with `t'` constant and `t'' = 1 mod t`.
    pub fn split_element(&self, table: &GroupTable, t: usize) -> Result<(usize, usize)> {
        if !self.contains(t) {
            return Err(Error::NotMember("torus"));
        }
        let constant = table.matrix(t).reduce(1)?.lift_constant(table.level());
        let t1 = table.index_of(&constant).ok_or(Error::NotMember("group"))?;
        let t2 = table.mul(table.inv(t1), t);
        debug_assert!(self.level_one.contains(t1) && self.pro_part.contains(t2));
        Ok((t1, t2))
    }

    /// `(^w theta)(t) = theta(w^-1 t w)`.
    pub fn weyl_action(
        &self,
        table: &GroupTable,
        w: usize,
        theta: &AbelianChar,
    ) -> Result<AbelianChar> {
        let phases = self
            .structure
            .factors()
            .iter()
            .map(|f| {
                let y = table.conj(f.generator, w);
                if !self.contains(y) {
                    return Err(Error::Precondition(
                        "element does not normalize the torus".into(),
                    ));
                }
                theta.eval(&self.structure, y)
            })
            .collect::<Result<Vec<_>>>()?;
        AbelianChar::from_generator_phases(&self.structure, &phases)
    }

    /// Weyl elements fixing `theta`.
    pub fn weyl_stabilizer_size(&self, table: &GroupTable, theta: &AbelianChar) -> Result<usize> {
        let mut n = 0;
        for &w in &self.weyl_reps {
            if self.weyl_action(table, w, theta)? == *theta {
                n += 1;
            }
        }
        Ok(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::{FiniteField, TruncRing};
    use std::sync::Arc;

    fn gl2(p: u32, r: usize) -> GroupTable {
        GroupTable::enumerate(
            2,
            &TruncRing::new(Arc::new(FiniteField::new(p, 1).unwrap()), r),
        )
        .unwrap()
    }

    #[test]
    fn split_torus_orders() {
        let g = gl2(2, 2);
        let t = TorusData::split(&g).unwrap();
        assert_eq!(
            (t.order(), t.level_one().order(), t.pro_part().order()),
            (4, 1, 4)
        );
        let g = gl2(3, 2);
        let t = TorusData::split(&g).unwrap();
        assert_eq!((t.order(), t.level_one().order()), (36, 4));
        assert_eq!(TorusData::split(&gl2(3, 1)).unwrap().order(), 4);
    }

    #[test]
    fn nonsplit_torus_orders_and_det_is_norm() {
        let g = gl2(2, 2);
        let t = TorusData::nonsplit(&g).unwrap();
        assert_eq!(
            (t.order(), t.level_one().order(), t.pro_part().order()),
            (12, 3, 4)
        );
        assert_eq!(TorusData::nonsplit(&gl2(2, 1)).unwrap().order(), 3);

        let g = gl2(3, 2);
        let ext = UnramifiedExt::new(g.ring()).unwrap();
        let e = ext.ext();
        for x in e.elements().iter().filter(|x| e.is_unit(x)) {
            let idx = TorusData::regular_embedding(&g, &ext, x).unwrap();
            assert_eq!(g.det(idx), ext.norm(x).unwrap());
        }
    }

    #[test]
    fn weyl_group_has_order_two() {
        for g in [gl2(2, 1), gl2(2, 2), gl2(3, 1), gl2(3, 2)] {
            for kind in [TorusKind::Split, TorusKind::Nonsplit] {
                let t = TorusData::build(&g, kind).unwrap();
                assert_eq!(t.weyl_reps().len(), 2, "{kind} q={} r={}", g.q(), g.level());
                assert_eq!(t.weyl_reps()[0], g.identity());
            }
        }
    }

    #[test]
    fn abelian_structure_examples() {
        let g = gl2(3, 2);
        // O_2^x embedded as diag(x, 1)
        let elems: Vec<usize> = (0..g.order())
            .filter(|&x| {
                let m = g.matrix(x);
                m.is_diagonal() && m.entry(1, 1) == [1, 0]
            })
            .collect();
        let s = AbelianStructure::new(&g, Subgroup::from_elements(&g, elems).unwrap()).unwrap();
        assert_eq!(s.factors().iter().map(|f| f.order).product::<u32>(), 6);

        let g2 = gl2(2, 2);
        let t = TorusData::split(&g2).unwrap();
        let pro = AbelianStructure::new(&g2, t.pro_part().clone()).unwrap();
        assert_eq!(
            pro.factors().iter().map(|f| f.order).collect::<Vec<_>>(),
            vec![2, 2]
        );
        let triv = AbelianStructure::new(&g2, Subgroup::trivial(&g2)).unwrap();
        assert!(triv.factors().is_empty());
        assert_eq!(triv.characters().len(), 1);

        let whole = Subgroup::whole(&g2);
        assert!(matches!(
            AbelianStructure::new(&g2, whole),
            Err(Error::NotAbelian)
        ));
    }

    #[test]
    fn characters_are_distinct_homomorphisms() {
        let g = gl2(3, 2);
        let t = TorusData::nonsplit(&g).unwrap();
        let s = t.structure();
        let chars = t.characters();
        assert_eq!(chars.len(), t.order());
        let els = s.subgroup().elements();
        for th in chars.iter().step_by(5) {
            for &x in els.iter().step_by(3) {
                for &y in els.iter().step_by(7) {
                    let lhs = th.eval(s, g.mul(x, y)).unwrap();
                    assert_eq!(lhs, th.eval(s, x).unwrap().add(th.eval(s, y).unwrap()));
                }
            }
        }
        let mut sorted = chars.clone();
        sorted.dedup();
        assert_eq!(sorted.len(), chars.len());
    }

    #[test]
    fn c2_nontrivial_character() {
        let g = gl2(3, 1);
        let s_elem = g
            .index_of(
                &Matrix::from_entries(
                    g.ring(),
                    2,
                    &[
                        g.ring().elem(&[2]).unwrap(),
                        g.ring().zero(),
                        g.ring().zero(),
                        g.ring().one(),
                    ],
                )
                .unwrap(),
            )
            .unwrap();
        let sub = Subgroup::from_elements(&g, vec![g.identity(), s_elem]).unwrap();
        let s = AbelianStructure::new(&g, sub).unwrap();
        let chars = s.characters();
        assert_eq!(chars[0].value(&s, s_elem, 2).unwrap(), CycloNum::one(2));
        assert_eq!(
            chars[1].value(&s, s_elem, 2).unwrap(),
            CycloNum::from_int(2, -1)
        );
    }

    #[test]
    fn split_element_examples() {
        let g = gl2(2, 2);
        let t = TorusData::split(&g).unwrap();
        let ring = g.ring();
        let m = Matrix::from_entries(
            ring,
            2,
            &[
                ring.elem(&[1, 1]).unwrap(),
                ring.zero(),
                ring.zero(),
                ring.one(),
            ],
        )
        .unwrap();
        let x = g.index_of(&m).unwrap();
        assert_eq!(t.split_element(&g, x).unwrap(), (g.identity(), x));

        let g = gl2(3, 2);
        for kind in [TorusKind::Split, TorusKind::Nonsplit] {
            let t = TorusData::build(&g, kind).unwrap();
            for &x in t.elements().elements() {
                let (a, b) = t.split_element(&g, x).unwrap();
                assert_eq!(g.mul(a, b), x);
                assert!(t.level_one().contains(a) && t.pro_part().contains(b));
                if t.level_one().contains(x) {
                    assert_eq!((a, b), (x, g.identity()));
                }
                if t.pro_part().contains(x) {
                    assert_eq!((a, b), (g.identity(), x));
                }
            }
            assert!(
                t.split_element(&g, g.generators()[0]).is_err() || t.contains(g.generators()[0])
            );
        }
    }

    #[test]
    fn weyl_action_examples() {
        let g = gl2(3, 2);
        let t = TorusData::split(&g).unwrap();
        let s = t.structure();
        let w = t.weyl_reps()[1];
        for th in t.characters().iter().step_by(7) {
            assert_eq!(t.weyl_action(&g, g.identity(), th).unwrap(), *th);
            let wth = t.weyl_action(&g, w, th).unwrap();
            assert_eq!(t.weyl_action(&g, w, &wth).unwrap(), *th);
            // swap of diagonal coordinates
            for &x in s.subgroup().elements() {
                let m = g.matrix(x);
                let swapped = Matrix::from_entries(
                    g.ring(),
                    2,
                    &[
                        m.entry_elem(g.ring(), 1, 1),
                        g.ring().zero(),
                        g.ring().zero(),
                        m.entry_elem(g.ring(), 0, 0),
                    ],
                )
                .unwrap();
                let y = g.index_of(&swapped).unwrap();
                assert_eq!(wth.eval(s, x).unwrap(), th.eval(s, y).unwrap());
            }
        }
    }

    #[test]
    fn nonsplit_weyl_action_is_frobenius() {
        let g = gl2(2, 1);
        let t = TorusData::nonsplit(&g).unwrap();
        let s = t.structure();
        let w = t.weyl_reps()[1];
        for th in t.characters() {
            let wth = t.weyl_action(&g, w, &th).unwrap();
            assert_eq!(wth, th.mul(&th));
        }
        let g = gl2(3, 2);
        let t = TorusData::nonsplit(&g).unwrap();
        let ext = UnramifiedExt::new(g.ring()).unwrap();
        let e = ext.ext();
        let w = t.weyl_reps()[1];
        let th = &t.characters()[5];
        let wth = t.weyl_action(&g, w, th).unwrap();
        for x in e.elements().iter().filter(|x| e.is_unit(x)) {
            let a = TorusData::regular_embedding(&g, &ext, x).unwrap();
            let b = TorusData::regular_embedding(&g, &ext, &ext.frobenius(x)).unwrap();
            assert_eq!(
                wth.eval(t.structure(), a).unwrap(),
                th.eval(s_of(&t), b).unwrap()
            );
        }
        fn s_of(t: &TorusData) -> &AbelianStructure {
            t.structure()
        }
        let _ = s;
    }

    #[test]
    fn frame_diagonalizes_torus() {
        let g = gl2(3, 2);
        let t = TorusData::nonsplit(&g).unwrap();
        let f = t.frame();
        for &x in t.elements().elements() {
            let d = f.to_frame(&g.matrix(x));
            assert!(d.is_diagonal());
            assert_eq!(f.from_frame(&d).unwrap(), g.matrix(x));
        }
    }

    #[test]
    fn phase_arithmetic() {
        let a = Phase::new(1, 3);
        assert_eq!(a.add(Phase::new(2, 3)), Phase::ZERO);
        assert_eq!(Phase::new(-1, 4), Phase::new(3, 4));
        assert_eq!(Phase::new(2, 4), Phase::new(1, 2));
        assert_eq!(a.times(3), Phase::ZERO);
        assert_eq!(a.to_cyclo(6), CycloNum::root_of_unity(6, 2));
    }
}
