//! Gamma functions `gamma(chi, psi) = (1/|G|) sum_g chi(g) psi(g)`.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::classfun::{int, ClassFunction};
use crate::cyclo::CycloNum;
use crate::dl::{dl_character, LiftData};
use crate::error::{Error, Result};
use crate::grp::GroupTable;
use crate::tori::{AbelianChar, TorusData};

pub fn gamma(table: &GroupTable, chi: &ClassFunction, psi: &ClassFunction) -> Result<CycloNum> {
    if chi.group() != table.descriptor() || psi.group() != table.descriptor() {
        return Err(Error::GroupMismatch);
    }
    let total = chi
        .values()
        .iter()
        .zip(psi.values())
        .enumerate()
        .fold(CycloNum::zero(1), |acc, (c, (a, b))| &acc + &(a * b).scale(&int(table.class_size(c))));
    Ok(total.scale(&BigRational::new(1.into(), BigInt::from(table.order()))))
}

/// Both sides of the torus reduction: `gamma_G(R^theta, psi)` and
/// `(1/|T_1|) sum_{t in T_1} theta(t) psi(t)`. No hypotheses are checked.
pub fn gamma_sides(
    table: &GroupTable,
    torus: &TorusData,
    lift: &LiftData,
    theta: &AbelianChar,
    psi: &ClassFunction,
) -> Result<(CycloNum, CycloNum)> {
    let r = dl_character(table, torus, lift, theta)?;
    let lhs = gamma(table, &r, psi)?;
    let modulus = torus.structure().exponent();
    let t1 = torus.level_one();
    let mut rhs = CycloNum::zero(modulus);
    for &t in t1.elements() {
        rhs = &rhs + &(theta.eval(torus.structure(), t)?.to_cyclo(modulus) * psi.at(table, t));
    }
    let rhs = rhs.scale(&BigRational::new(1.into(), BigInt::from(t1.order())));
    Ok((lhs, rhs))
}

/// The torus reduction for `p`-constant `theta` (trivial on `T^1`) and `p`-constant `psi`.
pub fn gamma_identity_check(
    table: &GroupTable,
    torus: &TorusData,
    lift: &LiftData,
    theta: &AbelianChar,
    psi: &ClassFunction,
) -> Result<(CycloNum, CycloNum)> {
    if !theta.is_trivial_on(torus.structure(), torus.pro_part())? {
        return Err(Error::Precondition("theta is not p-constant".into()));
    }
    if !psi.is_p_constant(table)? {
        return Err(Error::Precondition("psi is not p-constant".into()));
    }
    gamma_sides(table, torus, lift, theta, psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grp::tests::gl2;
    use crate::tori::TorusKind;

    #[test]
    fn gamma_examples() {
        let g = gl2(3, 1);
        let one = ClassFunction::one(&g);
        assert_eq!(gamma(&g, &one, &one).unwrap(), CycloNum::one(1));
        let chi = ClassFunction::det_character(&g, 1).unwrap();
        let reg = ClassFunction::regular(&g);
        let lhs = gamma(&g, &chi, &one.add(&reg).unwrap()).unwrap();
        assert_eq!(lhs, &gamma(&g, &chi, &one).unwrap() + &gamma(&g, &chi, &reg).unwrap());
        // chi * conj(chi) = 1, chi * conj(1) averages to 0
        assert_eq!(gamma(&g, &chi, &chi.conjugate()).unwrap(), CycloNum::one(1));
        assert_eq!(gamma(&g, &chi, &one).unwrap(), CycloNum::zero(1));
    }

    #[test]
    fn identity_and_negative_control() {
        let g = gl2(2, 2);
        for kind in [TorusKind::Split, TorusKind::Nonsplit] {
            let t = TorusData::build(&g, kind).unwrap();
            let lift = LiftData::new(&g, &t).unwrap();
            let one = ClassFunction::one(&g);
            for th in t.characters() {
                if th.is_trivial_on(t.structure(), t.pro_part()).unwrap() {
                    let (a, b) = gamma_identity_check(&g, &t, &lift, &th, &one).unwrap();
                    assert_eq!(a, b);
                } else {
                    assert!(gamma_identity_check(&g, &t, &lift, &th, &one).is_err());
                    if th.is_trivial_on(t.structure(), t.level_one()).unwrap() {
                        let (a, b) = gamma_sides(&g, &t, &lift, &th, &one).unwrap();
                        assert_eq!((a, b), (CycloNum::zero(1), CycloNum::one(1)));
                    }
                }
            }
        }
    }
}
