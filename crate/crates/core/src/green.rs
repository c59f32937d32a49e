//! Two-variable Green functions, recovered from the characters by inverting
//! the bimodule character formula, and the checks built on them.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::classfun::{int, subgroup_inner_product, ClassFunction};
use crate::cyclo::CycloNum;
use crate::dl::{dl_character, theta_exponent, LiftData};
use crate::error::{Error, Result};
use crate::grp::GroupTable;
use crate::tori::{AbelianChar, Phase, TorusData, TorusKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GreenRow {
    /// Unipotent representative (a group element index).
    pub rep: usize,
    /// Number of unipotent elements this row stands for.
    pub weight: usize,
    /// `Q(rep, tau)` for each `tau` of the table, in order.
    pub values: Vec<CycloNum>,
}

/// `Q(u, tau)` for unipotent `u` and `tau` in `T^1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GreenTable {
    pub torus: TorusKind,
    pub b: usize,
    pub taus: Vec<usize>,
    pub rows: Vec<GreenRow>,
    /// `|G| / |T_1|` of the group the table lives on.
    pub expected_total: usize,
    /// Rows are keyed by conjugacy class (group tables) or by element (torus tables).
    by_class: bool,
    #[serde(skip)]
    row_of: HashMap<usize, usize>,
    #[serde(skip)]
    tau_pos: HashMap<usize, usize>,
}

impl GreenTable {
    fn assemble(
        torus: &TorusData,
        b: usize,
        rows: Vec<GreenRow>,
        expected_total: usize,
        by_class: bool,
        table: &GroupTable,
    ) -> Self {
        let taus = torus.pro_part().elements().to_vec();
        let tau_pos = taus.iter().enumerate().map(|(i, &t)| (t, i)).collect();
        let row_of = rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                (
                    if by_class {
                        table.class_of(row.rep)
                    } else {
                        row.rep
                    },
                    i,
                )
            })
            .collect();
        GreenTable {
            torus: torus.kind(),
            b,
            taus,
            rows,
            expected_total,
            by_class,
            row_of,
            tau_pos,
        }
    }

    /// `Q(u, tau)`; `u` may be any unipotent element (group tables) or any
    /// element of `T^1` (torus tables).
    pub fn value(&self, table: &GroupTable, u: usize, tau: usize) -> Result<&CycloNum> {
        let key = if self.by_class { table.class_of(u) } else { u };
        let row = self
            .row_of
            .get(&key)
            .ok_or(Error::NotMember("unipotent locus of the Green table"))?;
        let col = self.tau_pos.get(&tau).ok_or(Error::NotMember("T^1"))?;
        Ok(&self.rows[*row].values[*col])
    }

    /// The table for `(^hT, ^hU)`: `(u, tau) -> Q(u^h, tau^h)`.
    pub fn transported(
        &self,
        table: &GroupTable,
        h: usize,
        u: usize,
        tau: usize,
    ) -> Result<&CycloNum> {
        self.value(table, table.conj(u, h), table.conj(tau, h))
    }

    pub fn total(&self) -> CycloNum {
        self.rows
            .iter()
            .flat_map(|row| row.values.iter().map(move |v| v.scale(&int(row.weight))))
            .fold(CycloNum::zero(1), |acc, v| &acc + &v)
    }

    /// `sum_tau Q(u, tau)` for each row.
    pub fn tau_sums(&self) -> Vec<(usize, CycloNum)> {
        self.rows
            .iter()
            .map(|row| {
                (
                    row.rep,
                    row.values.iter().fold(CycloNum::zero(1), |acc, v| &acc + v),
                )
            })
            .collect()
    }
}

/// `Q(u, tau) = (1/|T|) sum_theta theta(tau) R^theta(u)` over the whole dual.
pub fn green_from_characters(
    table: &GroupTable,
    torus: &TorusData,
    b: usize,
    characters: &[(AbelianChar, ClassFunction)],
) -> Result<GreenTable> {
    let mut seen: Vec<&AbelianChar> = characters.iter().map(|(th, _)| th).collect();
    seen.sort();
    seen.dedup();
    if seen.len() != torus.order() || characters.len() != torus.order() {
        return Err(Error::Precondition(format!(
            "{} distinct characters given, {} needed",
            seen.len(),
            torus.order()
        )));
    }
    let modulus = torus.structure().exponent();
    let norm = BigRational::new(1.into(), BigInt::from(torus.order()));
    let taus = torus.pro_part().elements().to_vec();
    let rows = (0..table.num_classes())
        .filter(|&c| table.is_unipotent(table.class_rep(c)))
        .map(|c| {
            let values = taus
                .iter()
                .map(|&tau| {
                    let mut acc = CycloNum::zero(modulus);
                    for (th, chi) in characters {
                        let e = theta_exponent(torus, th, tau, modulus)?;
                        let v = chi.class_value(c) * &CycloNum::root_of_unity(modulus, e as i64);
                        acc = &acc + &v;
                    }
                    Ok(acc.scale(&norm))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(GreenRow {
                rep: table.class_rep(c),
                weight: table.class_size(c),
                values,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let expected = table.order() / torus.level_one().order();
    Ok(GreenTable::assemble(torus, b, rows, expected, true, table))
}

/// The Green function of the torus itself, from the trace of `(u, tau)` on
/// the regular bimodule `x -> u x tau`.
pub fn torus_green(table: &GroupTable, torus: &TorusData) -> GreenTable {
    let t_elems = torus.elements().elements();
    let taus = torus.pro_part().elements();
    let norm = BigRational::new(1.into(), BigInt::from(torus.order()));
    let rows = taus
        .iter()
        .map(|&u| GreenRow {
            rep: u,
            weight: 1,
            values: taus
                .iter()
                .map(|&tau| {
                    let fixed = t_elems
                        .iter()
                        .filter(|&&x| table.mul(table.mul(u, x), tau) == x)
                        .count();
                    CycloNum::from_int(1, fixed as i64).scale(&norm)
                })
                .collect(),
        })
        .collect();
    let expected = torus.order() / torus.level_one().order();
    GreenTable::assemble(torus, 0, rows, expected, false, table)
}

/// The torus Green function by inversion: `(1/|T|) sum_theta theta(tau) theta(u)`.
pub fn torus_green_by_inversion(table: &GroupTable, torus: &TorusData) -> Result<GreenTable> {
    let s = torus.structure();
    let modulus = s.exponent();
    let chars = torus.characters();
    let taus = torus.pro_part().elements();
    let norm = BigRational::new(1.into(), BigInt::from(torus.order()));
    let rows = taus
        .iter()
        .map(|&u| {
            let values = taus
                .iter()
                .map(|&tau| {
                    let mut roots = vec![0i64; modulus as usize];
                    for th in &chars {
                        let e = th.eval(s, tau)?.add(th.eval(s, u)?);
                        roots[e.exponent_mod(modulus) as usize] += 1;
                    }
                    Ok(CycloNum::from_root_counts(modulus, &roots).scale(&norm))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(GreenRow {
                rep: u,
                weight: 1,
                values,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let expected = torus.order() / torus.level_one().order();
    Ok(GreenTable::assemble(torus, 0, rows, expected, false, table))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StabilizerShape {
    /// `s` is central: its stabilizer is the whole group.
    Whole,
    /// `s` is regular: its stabilizer is a conjugate of the torus.
    Torus,
}

/// The `theta`-independent part of the character formula at one class:
/// the transporter `{h : s^h in T_1}` grouped by `(s^h, u^h)`.
#[derive(Debug, Clone, Serialize)]
pub struct FormulaTerms {
    pub class: usize,
    pub shape: Option<StabilizerShape>,
    pub stabilizer_order: usize,
    /// `(s^h, u^h, number of h)`; `u^h` is replaced by its class
    /// representative when the stabilizer is the whole group.
    pub terms: Vec<(usize, usize, usize)>,
}

pub fn formula_terms(table: &GroupTable, torus: &TorusData) -> Result<Vec<FormulaTerms>> {
    (0..table.num_classes())
        .into_par_iter()
        .map(|c| {
            let g = table.class_rep(c);
            let (s, u) = table.jordan_decompose(g);
            let stabilizer_order = table.centralizer_order(s);
            let shape = if stabilizer_order == table.order() {
                StabilizerShape::Whole
            } else {
                StabilizerShape::Torus
            };
            let mut counts: HashMap<(usize, usize), usize> = HashMap::new();
            for h in 0..table.order() {
                let sh = table.conj(s, h);
                if !torus.level_one().contains(sh) {
                    continue;
                }
                let uh = table.conj(u, h);
                let key = match shape {
                    StabilizerShape::Whole => table.class_rep(table.class_of(uh)),
                    StabilizerShape::Torus => uh,
                };
                *counts.entry((sh, key)).or_default() += 1;
            }
            if counts.is_empty() {
                return Ok(FormulaTerms { class: c, shape: None, stabilizer_order, terms: Vec::new() });
            }
            if shape == StabilizerShape::Torus && stabilizer_order != torus.order() {
                return Err(Error::Unsupported(format!(
                    "stabilizer of order {stabilizer_order} is neither the group nor a torus conjugate"
                )));
            }
            let mut terms: Vec<_> = counts.into_iter().map(|((a, b), n)| (a, b, n)).collect();
            terms.sort_unstable();
            Ok(FormulaTerms { class: c, shape: Some(shape), stabilizer_order, terms })
        })
        .collect()
}

/// Right-hand side of the character formula at one class:
/// `1/|Stab(s)| sum_h sum_tau theta(s^h tau) Q_stab(u^h, tau^-1)`.
pub fn character_formula_rhs(
    table: &GroupTable,
    torus: &TorusData,
    theta: &AbelianChar,
    terms: &FormulaTerms,
    group_green: &GreenTable,
    torus_green: &GreenTable,
) -> Result<CycloNum> {
    let modulus = torus.structure().exponent();
    let Some(shape) = terms.shape else {
        return Ok(CycloNum::zero(modulus));
    };
    let green = match shape {
        StabilizerShape::Whole => group_green,
        StabilizerShape::Torus => torus_green,
    };
    let mut acc = CycloNum::zero(modulus);
    for &(sh, uh, n) in &terms.terms {
        for &tau in torus.pro_part().elements() {
            let q = green.value(table, uh, table.inv(tau))?;
            if q.is_zero() {
                continue;
            }
            let e = theta_exponent(torus, theta, table.mul(sh, tau), modulus)?;
            acc = &acc + &(q * &CycloNum::root_of_unity(modulus, e as i64)).scale(&int(n));
        }
    }
    Ok(acc.scale(&BigRational::new(
        1.into(),
        BigInt::from(terms.stabilizer_order),
    )))
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassCheck {
    pub class: usize,
    pub rep: usize,
    pub lhs: CycloNum,
    pub rhs: CycloNum,
    pub pass: bool,
}

/// Compares the character with the formula at every class.
pub fn verify_character_formula(
    table: &GroupTable,
    torus: &TorusData,
    theta: &AbelianChar,
    character: &ClassFunction,
    terms: &[FormulaTerms],
    group_green: &GreenTable,
    torus_green: &GreenTable,
) -> Result<Vec<ClassCheck>> {
    terms
        .iter()
        .map(|t| {
            let rhs = character_formula_rhs(table, torus, theta, t, group_green, torus_green)?;
            let lhs = character.class_value(t.class).clone();
            Ok(ClassCheck {
                class: t.class,
                rep: table.class_rep(t.class),
                pass: lhs == rhs,
                lhs,
                rhs,
            })
        })
        .collect()
}

/// `(sum over unipotent u and tau of Q(u, tau), |G|/|T_1|)`.
pub fn summation_check(q: &GreenTable) -> (CycloNum, usize) {
    (q.total(), q.expected_total)
}

/// `sum_tau Q(u, tau)` per row together with whether it is a rational integer.
pub fn integrality_check(q: &GreenTable) -> Vec<(usize, CycloNum, bool)> {
    q.tau_sums()
        .into_iter()
        .map(|(u, v)| {
            let ok = v.is_integer();
            (u, v, ok)
        })
        .collect()
}

/// `theta * Res f` for `f = chi o det`, `chi(a) = zeta_{q-1}^{j log a_0}`.
pub fn twist_by_det(
    table: &GroupTable,
    torus: &TorusData,
    theta: &AbelianChar,
    j: u32,
) -> Result<AbelianChar> {
    let field = table.ring().field().clone();
    let m = table.q() - 1;
    let phases = torus
        .structure()
        .factors()
        .iter()
        .map(|f| {
            let a0 = table.det(f.generator).coeffs()[0];
            let log = field.log(a0).ok_or(Error::NonUnit)? as i64;
            Ok(theta
                .eval(torus.structure(), f.generator)?
                .add(Phase::new(j as i64 * log, m)))
        })
        .collect::<Result<Vec<_>>>()?;
    AbelianChar::from_generator_phases(torus.structure(), &phases)
}

#[derive(Debug, Clone, Serialize)]
pub struct ProductReport {
    pub twisted: ClassFunction,
    pub product: ClassFunction,
    pub pass: bool,
}

/// `R^{theta Res f} = R^theta f` for `f = chi o det`.
pub fn product_property_check(
    table: &GroupTable,
    torus: &TorusData,
    lift: &LiftData,
    theta: &AbelianChar,
    j: u32,
) -> Result<ProductReport> {
    let f = ClassFunction::det_character(table, j)?;
    if !f.is_p_constant(table)? {
        return Err(Error::Precondition("f is not p-constant".into()));
    }
    let twisted_theta = twist_by_det(table, torus, theta, j)?;
    // Res f must be the quotient of the two torus characters.
    let modulus = torus.structure().exponent();
    for &t in torus.elements().elements() {
        let lhs = twisted_theta.eval(torus.structure(), t)?.to_cyclo(modulus);
        let rhs = theta.eval(torus.structure(), t)?.to_cyclo(modulus) * f.at(table, t);
        if lhs != rhs {
            return Err(Error::Precondition(
                "restriction of f is not multiplicative on T".into(),
            ));
        }
    }
    let twisted = dl_character(table, torus, lift, &twisted_theta)?;
    let product = dl_character(table, torus, lift, theta)?.pointwise_mul(&f)?;
    let pass = twisted == product;
    Ok(ProductReport {
        twisted,
        product,
        pass,
    })
}

/// `(<chi_R, R^theta>_G, <Res chi_R, theta>_T)` for `chi_R = chi o det`.
pub fn inner_product_check(
    table: &GroupTable,
    torus: &TorusData,
    lift: &LiftData,
    theta: &AbelianChar,
    j: u32,
) -> Result<(CycloNum, CycloNum)> {
    let f = ClassFunction::det_character(table, j)?;
    let r = dl_character(table, torus, lift, theta)?;
    let lhs = f.inner_product(&r, table)?;
    let modulus = torus.structure().exponent();
    let t = torus.elements();
    let res = f.restrict(table, t)?;
    let th: Vec<CycloNum> = t
        .elements()
        .iter()
        .map(|&x| Ok(theta.eval(torus.structure(), x)?.to_cyclo(modulus)))
        .collect::<Result<_>>()?;
    Ok((lhs, subgroup_inner_product(t, &res, &th)))
}
