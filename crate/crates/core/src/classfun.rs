//! Cyclotomic-valued class functions on a [`GroupTable`].

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use crate::cyclo::CycloNum;
use crate::error::{Error, Result};
use crate::grp::{GroupDescriptor, GroupTable, Subgroup};

/// A class function, stored as one value per conjugacy class of its group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassFunction {
    group: GroupDescriptor,
    values: Vec<CycloNum>,
}

impl ClassFunction {
    pub fn new(table: &GroupTable, values: Vec<CycloNum>) -> Result<Self> {
        if values.len() != table.num_classes() {
            return Err(Error::Malformed(format!(
                "{} values for {} classes",
                values.len(),
                table.num_classes()
            )));
        }
        Ok(ClassFunction {
            group: table.descriptor(),
            values,
        })
    }

    pub fn constant(table: &GroupTable, c: CycloNum) -> Self {
        ClassFunction {
            group: table.descriptor(),
            values: vec![c; table.num_classes()],
        }
    }

    pub fn one(table: &GroupTable) -> Self {
        Self::constant(table, CycloNum::one(1))
    }

    /// Evaluates `f` on each class representative.
    pub fn from_fn(table: &GroupTable, f: impl Fn(usize) -> CycloNum + Sync) -> Self {
        let values = (0..table.num_classes())
            .into_par_iter()
            .map(|c| f(table.class_rep(c)))
            .collect();
        ClassFunction {
            group: table.descriptor(),
            values,
        }
    }

    /// Value `|G|` at the identity and 0 elsewhere.
    pub fn regular(table: &GroupTable) -> Self {
        let id = table.class_of(table.identity());
        let values = (0..table.num_classes())
            .map(|c| CycloNum::from_int(1, if c == id { table.order() as i64 } else { 0 }))
            .collect();
        ClassFunction {
            group: table.descriptor(),
            values,
        }
    }

    /// Indicator of a union of classes.
    pub fn indicator(table: &GroupTable, pred: impl Fn(usize) -> bool) -> Self {
        let values = (0..table.num_classes())
            .map(|c| CycloNum::from_int(1, pred(table.class_rep(c)) as i64))
            .collect();
        ClassFunction {
            group: table.descriptor(),
            values,
        }
    }

    pub fn group(&self) -> GroupDescriptor {
        self.group
    }

    pub fn values(&self) -> &[CycloNum] {
        &self.values
    }

    pub fn class_value(&self, class: usize) -> &CycloNum {
        &self.values[class]
    }

    pub fn at(&self, table: &GroupTable, g: usize) -> &CycloNum {
        &self.values[table.class_of(g)]
    }

    fn check(&self, table: &GroupTable) -> Result<()> {
        if self.group != table.descriptor() || self.values.len() != table.num_classes() {
            return Err(Error::GroupMismatch);
        }
        Ok(())
    }

    fn same_group(&self, other: &ClassFunction) -> Result<()> {
        if self.group != other.group || self.values.len() != other.values.len() {
            return Err(Error::GroupMismatch);
        }
        Ok(())
    }

    fn zip_with(
        &self,
        other: &ClassFunction,
        f: impl Fn(&CycloNum, &CycloNum) -> CycloNum,
    ) -> Result<Self> {
        self.same_group(other)?;
        Ok(ClassFunction {
            group: self.group,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &ClassFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ClassFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn pointwise_mul(&self, other: &ClassFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: &CycloNum) -> Self {
        ClassFunction {
            group: self.group,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn conjugate(&self) -> Self {
        ClassFunction {
            group: self.group,
            values: self.values.iter().map(CycloNum::conjugate).collect(),
        }
    }

    /// `(1/|G|) sum_x f(x) conj(g(x))`.
    pub fn inner_product(&self, other: &ClassFunction, table: &GroupTable) -> Result<CycloNum> {
        self.check(table)?;
        self.same_group(other)?;
        let total: CycloNum = self
            .values
            .par_iter()
            .zip(&other.values)
            .enumerate()
            .map(|(c, (a, b))| (a * &b.conjugate()).scale(&int(table.class_size(c))))
            .reduce(|| CycloNum::zero(1), |x, y| &x + &y);
        Ok(total.scale(&BigRational::new(1.into(), BigInt::from(table.order()))))
    }

    /// Values on the elements of `h`, in the subgroup's element order.
    pub fn restrict(&self, table: &GroupTable, h: &Subgroup) -> Result<Vec<CycloNum>> {
        self.check(table)?;
        Ok(h.elements()
            .iter()
            .map(|&x| self.at(table, x).clone())
            .collect())
    }

    /// Induction from a subgroup: `(Ind f)(g) = sum_x [x^-1 g x in H] f(x^-1 g x)`
    /// over a left transversal; `f` is given by position in `h`.
    pub fn induce(table: &GroupTable, h: &Subgroup, f: &[CycloNum]) -> Result<Self> {
        if f.len() != h.order() {
            return Err(Error::Malformed(
                "function length differs from subgroup order".into(),
            ));
        }
        let transversal = table.coset_transversal(h);
        Ok(Self::from_fn(table, |g| {
            transversal
                .iter()
                .filter_map(|&x| h.position(table.conj(g, x)))
                .map(|pos| f[pos].clone())
                .fold(CycloNum::zero(1), |acc, v| &acc + &v)
        }))
    }

    /// `f(g) = f(s)` for the semisimple part `s` of every class representative.
    pub fn is_p_constant(&self, table: &GroupTable) -> Result<bool> {
        self.check(table)?;
        Ok((0..table.num_classes()).all(|c| {
            let g = table.class_rep(c);
            self.values[c] == *self.at(table, table.semisimple_part(g))
        }))
    }

    /// Extends values given on semisimple classes (keyed by class index) along
    /// the Jordan decomposition.
    pub fn p_constant_extend(
        table: &GroupTable,
        values: &BTreeMap<usize, CycloNum>,
    ) -> Result<Self> {
        let mut out = Vec::with_capacity(table.num_classes());
        for c in 0..table.num_classes() {
            let s = table.class_of(table.semisimple_part(table.class_rep(c)));
            out.push(values.get(&s).cloned().ok_or_else(|| {
                Error::Precondition(format!("no value for semisimple class {s}"))
            })?);
        }
        Self::new(table, out)
    }

    /// Values on semisimple classes only, keyed by class index.
    pub fn semisimple_values(&self, table: &GroupTable) -> BTreeMap<usize, CycloNum> {
        (0..table.num_classes())
            .filter(|&c| table.is_semisimple(table.class_rep(c)))
            .map(|c| (c, self.values[c].clone()))
            .collect()
    }

    /// `g -> chi(det g)` with `chi(a) = zeta_{q-1}^{j log(a mod t)}`, a character
    /// of `O_r^x` of order dividing `q-1`.
    pub fn det_character(table: &GroupTable, j: u32) -> Result<Self> {
        let field = table.ring().field().clone();
        let m = (table.q() - 1) as u32;
        let modulus = m.max(1);
        Ok(Self::from_fn(table, |g| {
            let a0 = table.det(g).coeffs()[0];
            let log = field.log(a0).expect("determinant is a unit");
            CycloNum::root_of_unity(modulus, (j as i64) * log as i64)
        }))
    }

    /// Serializable `{class representative index: value}` map.
    pub fn to_record(&self, table: &GroupTable) -> BTreeMap<usize, CycloNum> {
        (0..self.values.len())
            .map(|c| (table.class_rep(c), self.values[c].clone()))
            .collect()
    }
}

impl serde::Serialize for ClassFunction {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        self.values.serialize(serializer)
    }
}

pub(crate) fn int(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `(1/|H|) sum_{x in H} f(x) conj(g(x))` for functions given by position in `h`.
pub fn subgroup_inner_product(h: &Subgroup, f: &[CycloNum], g: &[CycloNum]) -> CycloNum {
    let total = f.iter().zip(g).fold(CycloNum::zero(1), |acc, (a, b)| {
        &acc + &(a * &b.conjugate())
    });
    total.scale(&BigRational::new(1.into(), BigInt::from(h.order())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grp::tests::gl2;
    use crate::tori::TorusData;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn inner_product_examples() {
        let g = gl2(3, 1);
        let one = ClassFunction::one(&g);
        assert_eq!(one.inner_product(&one, &g).unwrap(), CycloNum::one(1));
        let reg = ClassFunction::regular(&g);
        assert_eq!(reg.inner_product(&one, &g).unwrap(), CycloNum::one(1));
        let other = gl2(2, 1);
        assert!(matches!(
            one.inner_product(&ClassFunction::one(&other), &g),
            Err(Error::GroupMismatch)
        ));
    }

    #[test]
    fn torus_characters_orthonormal() {
        let g = gl2(3, 1);
        let t = TorusData::nonsplit(&g).unwrap();
        let s = t.structure();
        let n = s.exponent();
        let chars = t.characters();
        for a in &chars {
            let fa: Vec<_> = s
                .subgroup()
                .elements()
                .iter()
                .map(|&x| a.value(s, x, n).unwrap())
                .collect();
            for b in &chars {
                let fb: Vec<_> = s
                    .subgroup()
                    .elements()
                    .iter()
                    .map(|&x| b.value(s, x, n).unwrap())
                    .collect();
                let ip = subgroup_inner_product(s.subgroup(), &fa, &fb);
                assert_eq!(ip, CycloNum::from_int(1, (a == b) as i64));
            }
        }
    }

    #[test]
    fn induction_degree_and_permutation_character() {
        let g = gl2(2, 2);
        let t = TorusData::split(&g).unwrap();
        let mut gens = t.elements().elements().to_vec();
        gens.extend_from_slice(g.congruence_kernel(1).unwrap().elements());
        let h = g.subgroup_generate(&gens).unwrap();
        assert_eq!(h.order(), 16);
        let ones = vec![CycloNum::one(1); h.order()];
        let ind = ClassFunction::induce(&g, &h, &ones).unwrap();
        assert_eq!(*ind.at(&g, g.identity()), CycloNum::from_int(1, 6));
    }

    #[test]
    fn frobenius_reciprocity_random() {
        let g = gl2(3, 1);
        let t = TorusData::split(&g).unwrap();
        let s = t.structure();
        let n = s.exponent();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for th in t.characters() {
            let f: Vec<_> = s
                .subgroup()
                .elements()
                .iter()
                .map(|&x| th.value(s, x, n).unwrap())
                .collect();
            let ind = ClassFunction::induce(&g, s.subgroup(), &f).unwrap();
            let vals: Vec<_> = (0..g.num_classes())
                .map(|_| CycloNum::from_int(4, rng.gen_range(-3..4)))
                .collect();
            let psi = ClassFunction::new(&g, vals).unwrap();
            let lhs = ind.inner_product(&psi, &g).unwrap();
            let rhs =
                subgroup_inner_product(s.subgroup(), &f, &psi.restrict(&g, s.subgroup()).unwrap());
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn induction_is_transitive() {
        let g = gl2(2, 2);
        let t = TorusData::split(&g).unwrap();
        let k1 = g.congruence_kernel(1).unwrap();
        let mut gens = t.elements().elements().to_vec();
        gens.extend_from_slice(k1.elements());
        let k = g.subgroup_generate(&gens).unwrap();
        let h = t.elements();
        let s = t.structure();
        let th = &t.characters()[1];
        let f: Vec<_> = h
            .elements()
            .iter()
            .map(|&x| th.value(s, x, 2).unwrap())
            .collect();
        // induce H -> K by hand, then K -> G
        let mid: Vec<CycloNum> = k
            .elements()
            .iter()
            .map(|&y| {
                let inner: Vec<usize> = k.elements().to_vec();
                let total = inner
                    .iter()
                    .filter_map(|&x| h.position(g.conj(y, x)))
                    .fold(CycloNum::zero(1), |acc, p| &acc + &f[p]);
                total.scale(&BigRational::new(1.into(), BigInt::from(h.order())))
            })
            .collect();
        let two_step = ClassFunction::induce(&g, &k, &mid).unwrap();
        let direct = ClassFunction::induce(&g, h, &f).unwrap();
        assert_eq!(two_step, direct);
        // restriction after induction is not the original function
        let back = direct.restrict(&g, h).unwrap();
        assert_ne!(back, f);
    }

    #[test]
    fn p_constant_examples() {
        let g = gl2(3, 2);
        assert!(ClassFunction::one(&g).is_p_constant(&g).unwrap());
        let chi = ClassFunction::det_character(&g, 1).unwrap();
        assert!(chi.is_p_constant(&g).unwrap());
        assert!(!ClassFunction::regular(&g).is_p_constant(&g).unwrap());
        assert_eq!(
            ClassFunction::p_constant_extend(&g, &chi.semisimple_values(&g)).unwrap(),
            chi
        );

        let id = g.class_of(g.identity());
        let delta: BTreeMap<_, _> = chi
            .semisimple_values(&g)
            .keys()
            .map(|&c| (c, CycloNum::from_int(1, (c == id) as i64)))
            .collect();
        let ind = ClassFunction::p_constant_extend(&g, &delta).unwrap();
        assert_eq!(ind, ClassFunction::indicator(&g, |x| g.is_unipotent(x)));
        assert_eq!(ind.pointwise_mul(&ind).unwrap(), ind);
        let missing = BTreeMap::new();
        assert!(ClassFunction::p_constant_extend(&g, &missing).is_err());
    }

    #[test]
    fn det_characters_multiply() {
        let g = gl2(3, 2);
        let a = ClassFunction::det_character(&g, 1).unwrap();
        let b = ClassFunction::det_character(&g, 1).unwrap();
        assert_eq!(
            a.pointwise_mul(&b).unwrap(),
            ClassFunction::det_character(&g, 2).unwrap()
        );
        assert_eq!(a.pointwise_mul(&ClassFunction::one(&g)).unwrap(), a);
        // restriction to the split torus is chi(t11) chi(t22)
        let t = TorusData::split(&g).unwrap();
        let field = g.ring().field().clone();
        for &x in t.elements().elements() {
            let m = g.matrix(x);
            let e = field.log(m.entry(0, 0)[0]).unwrap() + field.log(m.entry(1, 1)[0]).unwrap();
            assert_eq!(*a.at(&g, x), CycloNum::root_of_unity(2, e as i64));
        }
    }
}
