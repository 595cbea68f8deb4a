//! Independent routes to the same verdict, compared over whole fields.

use apntri::checkers::{apn_exhaustive_violation, is_apn_kernel, is_permutation, is_permutation_linear};
use apntri::params::{good_set_family, good_set_gimage, good_set_rootscan};
use apntri::univariate::{companion_product_test, has_root, linearized_kernel_dim};
use apntri::{Exec, Family, FieldCtx, PolyVariant};

const EXEC: Exec = Exec::Parallel;

fn three_way(c: &FieldCtx, fam: Family) {
    for a in c.nonzero_elements() {
        let f = fam.make(c, a).unwrap();
        let crit = !has_root(c, fam.criterion_variant(), a, EXEC).unwrap();
        let perm_image = is_permutation(c, &f, EXEC).unwrap();
        let perm_linear = is_permutation_linear(c, &f, EXEC).unwrap();
        let apn_kernel = is_apn_kernel(c, &f, EXEC).unwrap();
        let apn_table = apn_exhaustive_violation(c, &f, EXEC).unwrap();
        let tag = format!("m={} i={} {fam} a={a}", c.m(), c.i());
        assert_eq!(perm_image, perm_linear, "{tag}: permutation tests disagree");
        assert_eq!(apn_kernel.is_apn, apn_table.is_none(), "{tag}: APN tests disagree");
        assert_eq!(crit, perm_image, "{tag}: criterion vs permutation");
        assert_eq!(crit, apn_kernel.is_apn, "{tag}: criterion vs APN");
        if let Some(v) = apn_table {
            assert!(v.solutions as u128 <= apn_kernel.max_kernel, "{tag}: {v:?}");
        }
    }
}

#[test]
fn three_way_m3_all_parameters() {
    for i in [1, 2] {
        let c = FieldCtx::new(3, i).unwrap();
        for fam in Family::BOTH {
            three_way(&c, fam);
        }
    }
}

#[test]
fn three_way_m5_g_i1() {
    three_way(&FieldCtx::new(5, 1).unwrap(), Family::G);
}

#[test]
fn three_way_m5_h_i2() {
    three_way(&FieldCtx::new(5, 2).unwrap(), Family::H);
}

#[test]
fn good_sets_agree_across_methods() {
    for (m, i) in [(3, 1), (5, 2), (7, 3), (9, 2), (11, 3), (13, 1)] {
        let c = FieldCtx::new(m, i).unwrap();
        let scan = good_set_rootscan(&c, EXEC).unwrap();
        let image = good_set_gimage(&c, EXEC).unwrap();
        assert_eq!(scan.good, image.good, "m={m} i={i}");
        let g = good_set_family(&c, Family::G, EXEC).unwrap();
        let h = good_set_family(&c, Family::H, EXEC).unwrap();
        assert_eq!(g.good, h.good, "m={m} i={i}: families differ");
        assert_eq!(g.good, scan.good, "m={m} i={i}");
    }
}

#[test]
fn matrix_kernel_and_roots_agree() {
    for (m, i) in [(7, 1), (9, 4), (11, 2)] {
        let c = FieldCtx::new(m, i).unwrap();
        for a in c.nonzero_elements().step_by(7) {
            let sing = companion_product_test(&c, a).unwrap();
            let dim = linearized_kernel_dim(&c, a).unwrap();
            let root = has_root(&c, PolyVariant::Q, a, EXEC).unwrap();
            assert_eq!(sing, dim > 0, "m={m} a={a}");
            assert_eq!(sing, root, "m={m} a={a}");
        }
    }
}

#[test]
fn sequential_and_parallel_agree() {
    let c = FieldCtx::new(9, 2).unwrap();
    let seq = good_set_rootscan(&c, Exec::Sequential).unwrap();
    let par = good_set_rootscan(&c, Exec::Parallel).unwrap();
    assert_eq!(seq, par);
    let c5 = FieldCtx::new(5, 1).unwrap();
    for a in c5.nonzero_elements().take(6) {
        let f = Family::G.make(&c5, a).unwrap();
        assert_eq!(
            is_apn_kernel(&c5, &f, Exec::Sequential).unwrap(),
            is_apn_kernel(&c5, &f, Exec::Parallel).unwrap()
        );
    }
}
