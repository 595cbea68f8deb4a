use apntri::equivalence::{compose_monomial, witness_holds, MonomialMap};
use apntri::trivariate::{diff_kernel_basis, diff_kernel_size};
use apntri::univariate::{companion_product_test, has_root};
use apntri::{Exec, Family, FieldCtx, PolyVariant, Triple};
use proptest::prelude::*;

fn field() -> impl Strategy<Value = FieldCtx> {
    prop_oneof![Just((3, 1)), Just((5, 2)), Just((7, 3)), Just((9, 4))].prop_map(|(m, i)| FieldCtx::new(m, i).unwrap())
}

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![Just(Family::G), Just(Family::H)]
}

fn triple(c: &FieldCtx, bits: (u32, u32, u32)) -> Triple {
    let mask = (1u32 << c.m()) - 1;
    Triple::new(c.elem(bits.0 & mask), c.elem(bits.1 & mask), c.elem(bits.2 & mask))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn derivative_is_affine(c in field(), fam in family(), a in 1u32.., w in any::<(u32, u32, u32)>(),
                            x in any::<(u32, u32, u32)>(), y in any::<(u32, u32, u32)>()) {
        let a = c.elem(a % c.order() as u32 + 1);
        let f = fam.make(&c, a).unwrap();
        let (w, x, y) = (triple(&c, w), triple(&c, x), triple(&c, y));
        let d = |v: Triple| f.eval(&c, v.add(&c, w)).add(&c, f.eval(&c, v)).add(&c, f.eval(&c, w));
        prop_assert_eq!(d(x.add(&c, y)), d(x).add(&c, d(y)));
    }

    #[test]
    fn kernel_basis_spans_kernel(c in field(), fam in family(), a in 1u32.., w in any::<(u32, u32, u32)>()) {
        let a = c.elem(a % c.order() as u32 + 1);
        let w = triple(&c, w);
        prop_assume!(!w.is_zero());
        let f = fam.make(&c, a).unwrap();
        let basis = diff_kernel_basis(&c, &f, w).unwrap();
        let size = diff_kernel_size(&c, &f, w).unwrap();
        prop_assert_eq!(1u128 << basis.len(), size);
        prop_assert!(size >= 2);
        let fw = f.eval(&c, w);
        for v in basis {
            let dv = f.eval(&c, v.add(&c, w)).add(&c, f.eval(&c, v)).add(&c, fw);
            prop_assert!(dv.is_zero());
        }
    }

    #[test]
    fn companion_test_matches_roots(m in prop_oneof![Just(11u32), Just(13)], i in 1u32..5, a in 1u32..) {
        let c = FieldCtx::new(m, i);
        prop_assume!(c.is_ok());
        let c = c.unwrap();
        let a = c.elem(a % c.order() as u32 + 1);
        prop_assert_eq!(companion_product_test(&c, a).unwrap(), has_root(&c, PolyVariant::Q, a, Exec::Sequential).unwrap());
    }

    #[test]
    fn diagonal_composition_matches_evaluation(c in field(), fam in family(), a in 1u32.., s in any::<[u32; 6]>(),
                                               x in any::<(u32, u32, u32)>()) {
        let a = c.elem(a % c.order() as u32 + 1);
        let nz = |b: u32| c.elem(b % c.order() as u32 + 1);
        let inner = MonomialMap::diagonal(&c, [nz(s[0]), nz(s[1]), nz(s[2])]);
        let outer = MonomialMap::diagonal(&c, [nz(s[3]), nz(s[4]), nz(s[5])]);
        let f = fam.make(&c, a).unwrap();
        let g = compose_monomial(&c, &f, &inner, &outer).unwrap();
        prop_assert!(witness_holds(&c, &f, &g, &inner, &outer));
        let x = triple(&c, x);
        prop_assert_eq!(g.eval(&c, x), outer.apply(&c, f.eval(&c, inner.apply(&c, x))));
    }
}
