use higher_dl::cyclo::CycloNum;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

const MODULI: [u32; 6] = [1, 3, 4, 5, 8, 12];

fn cyclo() -> impl Strategy<Value = CycloNum> {
    (prop::sample::select(MODULI.to_vec()), prop::collection::vec((-6i64..6, 1i64..4), 12)).prop_map(
        |(n, terms)| {
            terms.iter().enumerate().fold(CycloNum::zero(n), |acc, (k, &(a, b))| {
                let c = BigRational::new(BigInt::from(a), BigInt::from(b));
                &acc + &CycloNum::root_of_unity(n, k as i64).scale(&c)
            })
        },
    )
}

proptest! {
    #[test]
    fn ring_axioms(a in cyclo(), b in cyclo(), c in cyclo()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
    }

    #[test]
    fn inverses(a in cyclo()) {
        prop_assume!(!a.is_zero());
        prop_assert_eq!(&a * &a.inv().unwrap(), CycloNum::one(1));
    }

    #[test]
    fn conjugation_is_a_ring_map(a in cyclo(), b in cyclo()) {
        prop_assert_eq!((&a * &b).conjugate(), &a.conjugate() * &b.conjugate());
        prop_assert_eq!((&a + &b).conjugate(), &a.conjugate() + &b.conjugate());
        prop_assert_eq!(a.conjugate().conjugate(), a.clone());
    }

    #[test]
    fn embedding_preserves_value(a in cyclo(), m in 1u32..4) {
        let target = a.modulus() * m;
        prop_assert_eq!(a.embed(target), a.clone());
    }

    #[test]
    fn serde_round_trip(a in cyclo()) {
        let s = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<CycloNum>(&s).unwrap(), a);
    }
}
