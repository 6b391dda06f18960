use std::sync::Arc;

use deltagroup_core::cohomology::Cohomology;
use deltagroup_core::delta::{
    are_isomorphic, build_t_g_a_alpha, check_d1, classify, prop41_crosscheck,
};
use deltagroup_core::{Cochain, FiniteGroup, GModule};

fn z2z2() -> Arc<GModule> {
    let g = Arc::new(FiniteGroup::cyclic(2).unwrap());
    Arc::new(GModule::trivial(g, 2, 1).unwrap())
}

fn valid_cochains(a: &Arc<GModule>) -> Vec<Cochain> {
    (0..256)
        .map(|i| Cochain::from_index(a.clone(), 3, i).unwrap())
        .filter(|al| al.is_cocycle() && check_d1(al).unwrap())
        .collect()
}

#[test]
fn all_degree_three_cochains_over_z2() {
    let a = z2z2();
    let mut valid = 0;
    for i in 0..256 {
        let alpha = Cochain::from_index(a.clone(), 3, i).unwrap();
        assert!(prop41_crosscheck(&alpha).unwrap(), "alpha #{i}");
        if build_t_g_a_alpha(&alpha).unwrap().verify().all_pass() {
            valid += 1;
        }
    }
    assert_eq!(valid, valid_cochains(&a).len());
}

#[test]
fn pairwise_isomorphism_is_an_equivalence() {
    let a = z2z2();
    let c = Cohomology::new(a.clone());
    let valid = valid_cochains(&a);
    let n = valid.len();
    let mut rel = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            rel[i][j] = are_isomorphic(&c, &valid[i], &valid[j]).unwrap().isomorphic;
        }
    }
    for i in 0..n {
        assert!(rel[i][i]);
        for j in 0..n {
            assert_eq!(rel[i][j], rel[j][i]);
            for k in 0..n {
                if rel[i][j] && rel[j][k] {
                    assert!(rel[i][k]);
                }
            }
        }
    }
    // count classes and compare with the quotient computed by linear algebra
    let mut seen = vec![false; n];
    let mut classes = 0;
    for i in 0..n {
        if !seen[i] {
            classes += 1;
            for j in 0..n {
                if rel[i][j] {
                    seen[j] = true;
                }
            }
        }
    }
    let cl = classify(&c).unwrap();
    assert_eq!(cl.valid.order(), Some(n as u128));
    assert_eq!(cl.classes.order(), Some(classes as u128));
}
