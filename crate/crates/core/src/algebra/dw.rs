//! The algebra on triples `(g,h,k)` with `khg = 1`, twisted by a
//! multiplicative 3-cochain.

use std::sync::Arc;

use num_traits::{One, Zero};

use super::{AlgebraError, Scalar, StrongThreeAlgebra};
use crate::group::FiniteGroup;

/// A map `G³ → ℚ \ {0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicativeCocycle {
    group: Arc<FiniteGroup>,
    values: Vec<Scalar>,
}

impl MultiplicativeCocycle {
    /// `values[(g*n + h)*n + k] = α(g,h,k)`.
    pub fn new(group: Arc<FiniteGroup>, values: Vec<Scalar>) -> Result<Self, AlgebraError> {
        let n = group.order();
        if values.len() != n * n * n {
            return Err(AlgebraError::Length {
                expected: n * n * n,
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(Zero::is_zero) {
            return Err(AlgebraError::ZeroValue([i / (n * n), (i / n) % n, i % n]));
        }
        Ok(Self { group, values })
    }

    pub fn constant(group: Arc<FiniteGroup>, c: Scalar) -> Result<Self, AlgebraError> {
        let n = group.order();
        Self::new(group, vec![c; n * n * n])
    }

    /// Value `-1` where bit `i` of `mask` is set, `1` elsewhere (triples in
    /// flat order).
    pub fn from_sign_mask(group: Arc<FiniteGroup>, mask: u64) -> Result<Self, AlgebraError> {
        let n = group.order();
        let values = (0..n * n * n)
            .map(|i| {
                if i < 64 && mask >> i & 1 == 1 {
                    -Scalar::one()
                } else {
                    Scalar::one()
                }
            })
            .collect();
        Self::new(group, values)
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn value(&self, g: usize, h: usize, k: usize) -> &Scalar {
        let n = self.group.order();
        &self.values[(g * n + h) * n + k]
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn set(&mut self, g: usize, h: usize, k: usize, v: Scalar) -> Result<(), AlgebraError> {
        if v.is_zero() {
            return Err(AlgebraError::ZeroValue([g, h, k]));
        }
        let n = self.group.order();
        self.values[(g * n + h) * n + k] = v;
        Ok(())
    }

    /// `α(h,k,l) α(g,hk,l) α(g,h,k) = α(gh,k,l) α(g,h,kl)` everywhere.
    pub fn is_cocycle(&self) -> bool {
        let g = &self.group;
        let n = g.order();
        (0..n).all(|a| {
            (0..n).all(|b| {
                (0..n).all(|c| {
                    (0..n).all(|d| {
                        let l = self.value(b, c, d) * self.value(a, g.mul(b, c), d) * self.value(a, b, c);
                        let r = self.value(g.mul(a, b), c, d) * self.value(a, b, g.mul(c, d));
                        l == r
                    })
                })
            })
        })
    }
}

/// Basis index of `(g, h, (hg)^{-1})`.
pub fn dw_index(group: &FiniteGroup, g: usize, h: usize) -> usize {
    g * group.order() + h
}

/// The triple with basis index `i`.
pub fn dw_triple(group: &FiniteGroup, i: usize) -> [usize; 3] {
    let n = group.order();
    let (g, h) = (i / n, i % n);
    [g, h, group.inv(group.mul(h, g))]
}

/// Labels of the cells `(v0,v1,v2)` when the side `u→v` carries
/// `φ(v) φ(u)^{-1}`. Such labelings are the ones on which `m` and `m̃` do not
/// vanish identically.
pub fn flat_labels(group: &FiniteGroup, cells: &[[usize; 3]], phi: &[usize]) -> Vec<usize> {
    let side = |u: usize, v: usize| group.mul(phi[v], group.inv(phi[u]));
    cells
        .iter()
        .map(|c| dw_index(group, side(c[0], c[1]), side(c[1], c[2])))
        .collect()
}

/// `m((x,y,z),(p,q,r),(a,b,c)) = δ(az)δ(br)δ(py) α(z,r,q) (x,q,c)` with
/// `δ(t) = 1` iff `t` is the identity, `P(g,h,k) = (h,k,g)`, and
/// `u(1) = Σ (g,h,(hg)^{-1}) ⊗ (g^{-1},hg,h^{-1})`.
pub fn build_dw(alpha: &MultiplicativeCocycle) -> StrongThreeAlgebra {
    let g = alpha.group();
    let n = g.order();
    let e = g.identity();
    let dim = n * n;
    let u = (0..n)
        .flat_map(|a| {
            (0..n).map(move |b| {
                let second = dw_index(g, g.inv(a), g.mul(b, a));
                ([dw_index(g, a, b), second], Scalar::one())
            })
        })
        .collect();
    let names = (0..dim)
        .map(|i| {
            let t = dw_triple(g, i);
            format!("({},{},{})", g.name(t[0]), g.name(t[1]), g.name(t[2]))
        })
        .collect();
    let mut s = StrongThreeAlgebra::new(dim, u)
        .and_then(|s| s.with_names(names))
        .expect("dimension and names agree");
    for i in 0..dim {
        let [x, y, z] = dw_triple(g, i);
        for j in 0..dim {
            let [p, q, r] = dw_triple(g, j);
            if g.mul(p, y) != e {
                continue;
            }
            for k in 0..dim {
                let [a, b, c] = dw_triple(g, k);
                if g.mul(a, z) != e || g.mul(b, r) != e {
                    continue;
                }
                let out = dw_index(g, x, q);
                debug_assert_eq!(dw_triple(g, out)[2], c);
                s.add_m([i, j, k], out, alpha.value(z, r, q).clone())
                    .expect("indices in range");
            }
        }
        let [a, b, c] = dw_triple(g, i);
        debug_assert_eq!(dw_triple(g, dw_index(g, b, c))[2], a);
        s.add_p(i, dw_index(g, b, c), Scalar::one()).expect("indices in range");
    }
    s
}

/// `α(g,h,k) = α(gh,k,(hk)^{-1}) = α((hk)^{-1},g^{-1},gh) = α(hk,k^{-1},(gh)^{-1})`
/// for all `g, h, k`.
pub fn check_dw_condition(alpha: &MultiplicativeCocycle) -> bool {
    first_dw_violation(alpha).is_none()
}

/// The first `(g,h,k)` where one of the equalities breaks.
pub fn first_dw_violation(alpha: &MultiplicativeCocycle) -> Option<[usize; 3]> {
    let g = alpha.group();
    let n = g.order();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let v = alpha.value(a, b, c);
                let hk = g.mul(b, c);
                let gh = g.mul(a, b);
                let others = [
                    alpha.value(gh, c, g.inv(hk)),
                    alpha.value(g.inv(hk), g.inv(a), gh),
                    alpha.value(hk, g.inv(c), g.inv(gh)),
                ];
                if others.iter().any(|o| *o != v) {
                    return Some([a, b, c]);
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{int, u_symmetric, verify_strong, DEFAULT_MAX_DIM};

    fn z2() -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::cyclic(2).unwrap())
    }

    #[test]
    fn basis_and_u() {
        let g = z2();
        let names: Vec<_> = (0..4).map(|i| dw_triple(&g, i)).collect();
        assert_eq!(names, vec![[0, 0, 0], [0, 1, 1], [1, 0, 1], [1, 1, 0]]);
        let s = build_dw(&MultiplicativeCocycle::constant(g, int(1)).unwrap());
        assert_eq!(s.dim(), 4);
        assert_eq!(s.u_entries().len(), 4);
        assert_eq!(s.m(0, 0, 0), &[(0, int(1))]);
        assert!(u_symmetric(&s));
    }

    #[test]
    fn m_lands_in_valid_triples() {
        let g = Arc::new(FiniteGroup::symmetric(3).unwrap());
        let s = build_dw(&MultiplicativeCocycle::constant(g.clone(), int(1)).unwrap());
        // each input triple has at most one output, and outputs respect khg = 1
        for (_, out, _) in s.m_entries() {
            let [a, b, c] = dw_triple(&g, out);
            assert_eq!(g.mul(g.mul(c, b), a), g.identity());
        }
        assert!(u_symmetric(&s));
    }

    #[test]
    fn condition_examples() {
        let g = z2();
        assert!(check_dw_condition(&MultiplicativeCocycle::constant(g.clone(), int(1)).unwrap()));
        let mut a = MultiplicativeCocycle::constant(g.clone(), int(1)).unwrap();
        a.set(1, 1, 0, int(-1)).unwrap();
        assert!(!check_dw_condition(&a));
        assert_eq!(first_dw_violation(&a), Some([0, 0, 1]));
        let r = verify_strong(&build_dw(&a), DEFAULT_MAX_DIM).unwrap();
        assert!(!r.all_pass());
        assert!(MultiplicativeCocycle::constant(g, int(0)).is_err());
    }

    #[test]
    fn trivial_alpha_is_strong() {
        let s = build_dw(&MultiplicativeCocycle::constant(z2(), int(1)).unwrap());
        let r = verify_strong(&s, DEFAULT_MAX_DIM).unwrap();
        assert!(r.all_pass(), "{r}");
    }

    #[test]
    fn cocycle_test() {
        let g = z2();
        assert!(MultiplicativeCocycle::constant(g.clone(), int(1)).unwrap().is_cocycle());
        // the nontrivial class: -1 exactly at (1,1,1)
        let a = MultiplicativeCocycle::from_sign_mask(g.clone(), 1 << 7).unwrap();
        assert!(a.is_cocycle());
        let b = MultiplicativeCocycle::from_sign_mask(g, 1 << 6).unwrap();
        assert!(!b.is_cocycle());
    }
}
