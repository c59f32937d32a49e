//! Higher Deligne–Lusztig characters of `GL_2(O_r)`.
//!
//! At even `r` the character attached to `(T, theta)` is induced from the
//! trivial lift of `theta` to `H = T G^{r/2}`. At `r = 1` the classical
//! `GL_2(F_q)` characters are built directly.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classfun::ClassFunction;
use crate::cyclo::CycloNum;
use crate::error::{Error, Result};
use crate::grp::{GroupTable, Matrix, Subgroup};
use crate::tori::{AbelianChar, Phase, TorusData, TorusKind};

/// The data `(T, U, b, theta)`; the unipotent radical only enters as a label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DLConfig {
    pub torus: TorusKind,
    pub theta: AbelianChar,
    pub r: usize,
    pub b: usize,
}

impl DLConfig {
    pub fn new(torus: &TorusData, theta: AbelianChar, r: usize) -> Result<Self> {
        check_level(r)?;
        Ok(DLConfig {
            torus: torus.kind(),
            theta,
            r,
            b: r / 2,
        })
    }
}

fn check_level(r: usize) -> Result<()> {
    if r == 0 || (r > 1 && r % 2 == 1) {
        return Err(Error::Unsupported("r must be 1 or even".into()));
    }
    Ok(())
}

/// `theta(x)` as an exponent of `zeta_N`.
pub fn theta_exponent(
    torus: &TorusData,
    theta: &AbelianChar,
    x: usize,
    modulus: u32,
) -> Result<u32> {
    Ok(theta.eval(torus.structure(), x)?.exponent_mod(modulus))
}

/// Everything about the induction `Ind_H^G theta~` that does not depend on `theta`.
#[derive(Debug, Clone)]
pub struct LiftData {
    half: usize,
    subgroup: Subgroup,
    transversal: Vec<usize>,
    /// Retraction `H -> T` indexed by position in `subgroup`.
    retraction: Vec<usize>,
    /// For each class representative `g`, the multiset of `pi(x^-1 g x)` over
    /// transversal elements `x` with `x^-1 g x` in `H`.
    class_counts: Vec<Vec<(usize, u32)>>,
}

impl LiftData {
    pub fn new(table: &GroupTable, torus: &TorusData) -> Result<Self> {
        let r = table.level();
        if r < 2 || r % 2 == 1 {
            return Err(Error::Unsupported(
                "the lift subgroup needs even r >= 2".into(),
            ));
        }
        let half = r / 2;
        let subgroup = lift_subgroup(table, torus)?;

        let mut by_reduction: HashMap<Matrix, usize> = HashMap::new();
        for &t in torus.elements().elements() {
            by_reduction.entry(table.reduce(t, half)?).or_insert(t);
        }
        let retraction = subgroup
            .elements()
            .par_iter()
            .map(|&y| {
                let t = *by_reduction.get(&table.reduce(y, half)?).ok_or_else(|| {
                    Error::Internal("no torus element with matching reduction".into())
                })?;
                let k = table.mul(table.inv(t), y);
                Ok(table.mul(t, iwahori_project(table, torus, half, k)?))
            })
            .collect::<Result<Vec<_>>>()?;

        let transversal = table.coset_transversal(&subgroup);
        let class_counts = (0..table.num_classes())
            .into_par_iter()
            .map(|c| {
                let g = table.class_rep(c);
                let mut counts: HashMap<usize, u32> = HashMap::new();
                for &x in &transversal {
                    if let Some(pos) = subgroup.position(table.conj(g, x)) {
                        *counts.entry(retraction[pos]).or_default() += 1;
                    }
                }
                let mut v: Vec<_> = counts.into_iter().collect();
                v.sort_unstable();
                v
            })
            .collect();
        Ok(LiftData {
            half,
            subgroup,
            transversal,
            retraction,
            class_counts,
        })
    }

    pub fn half(&self) -> usize {
        self.half
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    pub fn transversal(&self) -> &[usize] {
        &self.transversal
    }

    pub fn degree(&self) -> usize {
        self.transversal.len()
    }

    /// `pi(y)` for `y` in `H`.
    pub fn retract(&self, y: usize) -> Result<usize> {
        let pos = self
            .subgroup
            .position(y)
            .ok_or(Error::NotMember("lift subgroup"))?;
        Ok(self.retraction[pos])
    }

    pub fn class_counts(&self, class: usize) -> &[(usize, u32)] {
        &self.class_counts[class]
    }

    /// `theta~(x) = theta(pi(x))`.
    pub fn trivial_lift_eval(
        &self,
        torus: &TorusData,
        theta: &AbelianChar,
        x: usize,
    ) -> Result<Phase> {
        theta.eval(torus.structure(), self.retract(x)?)
    }

    /// `Ind_H^G theta~`, evaluated through the stored retraction counts.
    pub fn character(
        &self,
        table: &GroupTable,
        torus: &TorusData,
        theta: &AbelianChar,
    ) -> Result<ClassFunction> {
        let modulus = torus.structure().exponent();
        let values = self
            .class_counts
            .iter()
            .map(|counts| {
                let mut roots = vec![0i64; modulus as usize];
                for &(t, n) in counts {
                    roots[theta_exponent(torus, theta, t, modulus)? as usize] += n as i64;
                }
                Ok(CycloNum::from_root_counts(modulus, &roots))
            })
            .collect::<Result<Vec<_>>>()?;
        ClassFunction::new(table, values)
    }

    /// The same character through the generic induction formula.
    pub fn character_by_induction(
        &self,
        table: &GroupTable,
        torus: &TorusData,
        theta: &AbelianChar,
    ) -> Result<ClassFunction> {
        let modulus = torus.structure().exponent();
        let f = self
            .subgroup
            .elements()
            .iter()
            .map(|&y| Ok(self.trivial_lift_eval(torus, theta, y)?.to_cyclo(modulus)))
            .collect::<Result<Vec<_>>>()?;
        ClassFunction::induce(table, &self.subgroup, &f)
    }
}

/// `H = T G^{r/2}`.
pub fn lift_subgroup(table: &GroupTable, torus: &TorusData) -> Result<Subgroup> {
    let r = table.level();
    if r < 2 || r % 2 == 1 {
        return Err(Error::Unsupported(
            "the lift subgroup needs even r >= 2".into(),
        ));
    }
    let kernel = table.congruence_kernel(r / 2)?;
    let mut gens = torus.elements().generating_set(table);
    gens.extend(kernel.generating_set(table));
    table.subgroup_generate(&gens)
}

/// Torus part of `g` in `G^b` (`2b >= r`): in the diagonalizing frame `g`
/// is `diag(a, d)` times a unipotent correction, and `diag(a, d)` is returned.
pub fn iwahori_project(table: &GroupTable, torus: &TorusData, b: usize, g: usize) -> Result<usize> {
    let r = table.level();
    if 2 * b < r || b == 0 {
        return Err(Error::Precondition("the projection needs 2b >= r".into()));
    }
    let m = table.matrix(g);
    if !m.reduce(b)?.is_identity() {
        return Err(Error::NotMember("congruence kernel"));
    }
    let frame = torus.frame();
    let e = frame.ext().ext();
    let conj = frame.to_frame(&m);
    let diag = Matrix::from_entries(
        e,
        2,
        &[
            conj.entry_elem(e, 0, 0),
            e.zero(),
            e.zero(),
            conj.entry_elem(e, 1, 1),
        ],
    )?;
    let back = frame.from_frame(&diag)?;
    let idx = table.index_of(&back).ok_or(Error::NotMember("group"))?;
    if !torus.contains(idx) {
        return Err(Error::Internal("projection left the torus".into()));
    }
    Ok(idx)
}

/// `Ind_H^G theta~` for even `r`.
pub fn dl_character(
    table: &GroupTable,
    torus: &TorusData,
    lift: &LiftData,
    theta: &AbelianChar,
) -> Result<ClassFunction> {
    check_level(table.level())?;
    lift.character(table, torus, theta)
}

/// An element `s^c` of `T_1` conjugate to `s`, if any.
pub fn conjugate_into_level_one(table: &GroupTable, torus: &TorusData, s: usize) -> Option<usize> {
    (0..table.order())
        .into_par_iter()
        .map(|h| table.conj(s, h))
        .find_first(|&y| torus.level_one().contains(y))
}

pub fn is_regular_semisimple(table: &GroupTable, s: usize) -> bool {
    table.is_semisimple(s) && table.centralizer_order(s) < table.order()
}

/// `sum_w (^w theta)(s^c)` for `s^c` in `T_1`, and 0 if the class of `s` misses `T_1`.
pub fn regular_ss_value(
    table: &GroupTable,
    torus: &TorusData,
    theta: &AbelianChar,
    s: usize,
) -> Result<CycloNum> {
    if !is_regular_semisimple(table, s) {
        return Err(Error::Precondition(
            "element is not regular semisimple".into(),
        ));
    }
    let modulus = torus.structure().exponent();
    match conjugate_into_level_one(table, torus, s) {
        None => Ok(CycloNum::zero(modulus)),
        Some(y) => weyl_sum(table, torus, theta, y),
    }
}

/// `sum_{w in W} theta(w^-1 y w)` for `y` in `T`.
pub fn weyl_sum(
    table: &GroupTable,
    torus: &TorusData,
    theta: &AbelianChar,
    y: usize,
) -> Result<CycloNum> {
    let modulus = torus.structure().exponent();
    let mut roots = vec![0i64; modulus as usize];
    for &w in torus.weyl_reps() {
        roots[theta_exponent(torus, theta, table.conj(y, w), modulus)? as usize] += 1;
    }
    Ok(CycloNum::from_root_counts(modulus, &roots))
}

/// The classical Deligne–Lusztig character `R_T^theta` of `GL_2(F_q)`.
pub fn classical_dl_level1(
    table: &GroupTable,
    torus: &TorusData,
    theta: &AbelianChar,
) -> Result<ClassFunction> {
    if table.level() != 1 || table.dim() != 2 {
        return Err(Error::Unsupported(
            "classical characters need GL_2 at level 1".into(),
        ));
    }
    let modulus = torus.structure().exponent();
    match torus.kind() {
        TorusKind::Split => {
            // Ind_B^G of theta extended trivially over the unipotent radical.
            let borel: Vec<usize> = (0..table.order())
                .filter(|&x| table.matrix(x).entry(1, 0)[0] == 0)
                .collect();
            let borel = Subgroup::from_elements(table, borel)?;
            let ring = table.ring();
            let f = borel
                .elements()
                .iter()
                .map(|&x| {
                    let m = table.matrix(x);
                    let d = Matrix::from_entries(
                        ring,
                        2,
                        &[
                            m.entry_elem(ring, 0, 0),
                            ring.zero(),
                            ring.zero(),
                            m.entry_elem(ring, 1, 1),
                        ],
                    )?;
                    let t = table.index_of(&d).ok_or(Error::NotMember("group"))?;
                    Ok(theta.eval(torus.structure(), t)?.to_cyclo(modulus))
                })
                .collect::<Result<Vec<_>>>()?;
            ClassFunction::induce(table, &borel, &f)
        }
        TorusKind::Nonsplit => {
            let q = table.q() as i64;
            let mut values = Vec::with_capacity(table.num_classes());
            let mut anchor = None;
            for c in 0..table.num_classes() {
                let g = table.class_rep(c);
                let (s, u) = table.jordan_decompose(g);
                let v = if table.centralizer_order(s) == table.order() {
                    let z = theta.eval(torus.structure(), s)?.to_cyclo(modulus);
                    if u == table.identity() {
                        z * CycloNum::from_int(1, 1 - q)
                    } else {
                        z
                    }
                } else {
                    let v = regular_ss_value(table, torus, theta, s)?;
                    if anchor.is_none()
                        && !v.is_zero()
                        && conjugate_into_level_one(table, torus, s).is_some()
                    {
                        anchor = Some(c);
                    }
                    v
                };
                values.push(v);
            }
            // Pin the global sign on an elliptic class where the Weyl sum is nonzero.
            if let Some(c) = anchor {
                let expected = regular_ss_value(table, torus, theta, table.class_rep(c))?;
                if values[c] != expected {
                    values.iter_mut().for_each(|v| *v = -&*v);
                }
            }
            ClassFunction::new(table, values)
        }
    }
}
