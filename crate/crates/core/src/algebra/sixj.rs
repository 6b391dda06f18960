//! The algebra spanned by `e_{ijk}`, built from a tetrahedrally symmetric
//! symbol `f: I⁶ → ℚ` and weights `w: I → ℚ`.
//!
//! The symbol is written `|a b c; i j k|` with arguments in the order
//! `(a,b,c,i,j,k)`. Invariance is required under the group generated by
//! exchanging two columns, `(b,a,c,j,i,k)` and `(a,c,b,i,k,j)`, and by
//! exchanging the rows within the first two columns, `(i,j,c,a,b,k)`. These
//! generate a group of order 24.

use std::collections::HashSet;

use num_traits::{One, Zero};
use rand::Rng;

use super::{AlgebraError, Scalar, SparseTrilinearSystem, StrongThreeAlgebra};

type Args = [usize; 6];

/// The three generators of the symmetry group.
pub fn symmetry_generators(x: Args) -> [Args; 3] {
    let [a, b, c, i, j, k] = x;
    [[b, a, c, j, i, k], [a, c, b, i, k, j], [i, j, c, a, b, k]]
}

/// The orbit of `x` under the symmetry group.
pub fn orbit(x: Args) -> Vec<Args> {
    let mut seen = HashSet::from([x]);
    let mut out = vec![x];
    let mut i = 0;
    while i < out.len() {
        for y in symmetry_generators(out[i]) {
            if seen.insert(y) {
                out.push(y);
            }
        }
        i += 1;
    }
    out.sort_unstable();
    out
}

fn decode(mut idx: usize, n: usize) -> Args {
    let mut x = [0; 6];
    for slot in x.iter_mut().rev() {
        *slot = idx % n;
        idx /= n;
    }
    x
}

fn encode(x: &Args, n: usize) -> usize {
    x.iter().fold(0, |acc, &v| acc * n + v)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SixJData {
    n: usize,
    f: Vec<Scalar>,
    w: Vec<Scalar>,
}

impl SixJData {
    /// `f` is indexed in base `n` by `(a,b,c,i,j,k)`, most significant first.
    pub fn new(n: usize, f: Vec<Scalar>, w: Vec<Scalar>) -> Result<Self, AlgebraError> {
        if n == 0 {
            return Err(AlgebraError::ZeroDim);
        }
        let total = n.pow(6);
        if f.len() != total {
            return Err(AlgebraError::Length {
                expected: total,
                got: f.len(),
            });
        }
        if w.len() != n {
            return Err(AlgebraError::Length {
                expected: n,
                got: w.len(),
            });
        }
        for idx in 0..total {
            let x = decode(idx, n);
            for y in symmetry_generators(x) {
                if f[encode(&y, n)] != f[idx] {
                    return Err(AlgebraError::NotSymmetric { from: x, to: y });
                }
            }
        }
        Ok(Self { n, f, w })
    }

    pub fn constant(n: usize, c: Scalar, w: Vec<Scalar>) -> Result<Self, AlgebraError> {
        Self::new(n, vec![c; n.pow(6)], w)
    }

    /// One value per orbit, drawn uniformly from `-range..=range`.
    pub fn random<R: Rng>(n: usize, w: Vec<Scalar>, range: i64, rng: &mut R) -> Result<Self, AlgebraError> {
        let total = n.pow(6);
        let mut f: Vec<Option<Scalar>> = vec![None; total];
        for idx in 0..total {
            if f[idx].is_some() {
                continue;
            }
            let v = super::int(rng.gen_range(-range..=range));
            for y in orbit(decode(idx, n)) {
                f[encode(&y, n)] = Some(v.clone());
            }
        }
        Self::new(n, f.into_iter().map(|v| v.expect("every orbit assigned")).collect(), w)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn f(&self, a: usize, b: usize, c: usize, i: usize, j: usize, k: usize) -> &Scalar {
        &self.f[encode(&[a, b, c, i, j, k], self.n)]
    }

    pub fn w(&self, j: usize) -> &Scalar {
        &self.w[j]
    }

    pub fn symbols(&self) -> &[Scalar] {
        &self.f
    }

    pub fn weights(&self) -> &[Scalar] {
        &self.w
    }

    fn e(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    fn names(&self) -> Vec<String> {
        let n = self.n;
        (0..n * n * n)
            .map(|x| format!("e({},{},{})", x / (n * n), (x / n) % n, x % n))
            .collect()
    }

    fn fill_m_and_p(&self, mut add_m: impl FnMut([usize; 3], usize, Scalar), mut add_p: impl FnMut(usize, usize)) {
        let n = self.n;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for i in 0..n {
                        for j in 0..n {
                            for k in 0..n {
                                let v = self.f(a, b, c, i, j, k);
                                if !v.is_zero() {
                                    add_m(
                                        [self.e(a, k, j), self.e(k, b, i), self.e(j, i, c)],
                                        self.e(a, b, c),
                                        v.clone(),
                                    );
                                }
                            }
                        }
                    }
                    add_p(self.e(a, b, c), self.e(b, c, a));
                }
            }
        }
    }
}

/// `m(e_{akj} ⊗ e_{kbi} ⊗ e_{jic}) = |a b c; i j k| e_{abc}`, `P(e_{ijk}) = e_{jki}`,
/// `u(1) = Σ_{j,u,v} w_j² e_{uvj} ⊗ e_{ujv}`.
/// Fails only when every weight is zero, leaving `u(1) = 0`.
pub fn build_sixj(d: &SixJData) -> Result<StrongThreeAlgebra, AlgebraError> {
    let n = d.n;
    let mut u = Vec::new();
    for j in 0..n {
        let w2 = &d.w[j] * &d.w[j];
        for a in 0..n {
            for b in 0..n {
                u.push(([d.e(a, b, j), d.e(a, j, b)], w2.clone()));
            }
        }
    }
    let mut s = StrongThreeAlgebra::new(n * n * n, u)?.with_names(d.names())?;
    let mut ms = Vec::new();
    let mut ps = Vec::new();
    d.fill_m_and_p(|i, o, c| ms.push((i, o, c)), |i, o| ps.push((i, o)));
    for (i, o, c) in ms {
        s.add_m(i, o, c).expect("indices in range");
    }
    for (i, o) in ps {
        s.add_p(i, o, Scalar::one()).expect("indices in range");
    }
    Ok(s)
}

/// The same `m` and `P` with `m̄` given directly:
/// `m̄(e_{j₂bc} ⊗ e_{baj₁}) = Σ_j w_j² |j₂ a j; j₁ c b| e_{j₂aj} ⊗ e_{cjj₁}`.
pub fn explicit_sixj_system(d: &SixJData) -> SparseTrilinearSystem {
    let n = d.n;
    let mut s = SparseTrilinearSystem::new(n * n * n)
        .and_then(|s| s.with_names(d.names()))
        .expect("dimension and names agree");
    let mut ms = Vec::new();
    let mut ps = Vec::new();
    d.fill_m_and_p(|i, o, c| ms.push((i, o, c)), |i, o| ps.push((i, o)));
    for (i, o, c) in ms {
        s.add_m(i, o, c).expect("indices in range");
    }
    for (i, o) in ps {
        s.add_p(i, o, Scalar::one()).expect("indices in range");
    }
    for j2 in 0..n {
        for b in 0..n {
            for c in 0..n {
                for a in 0..n {
                    for j1 in 0..n {
                        for j in 0..n {
                            let coef = &d.w[j] * &d.w[j] * d.f(j2, a, j, j1, c, b);
                            s.add_mbar(
                                [d.e(j2, b, c), d.e(b, a, j1)],
                                [d.e(j2, a, j), d.e(c, j, j1)],
                                coef,
                            )
                            .expect("indices in range");
                        }
                    }
                }
            }
        }
    }
    s
}

/// The nine-index identity on the symbols, over all of `I⁹`.
pub fn check_sixj_identity(d: &SixJData) -> bool {
    first_sixj_violation(d).is_none()
}

/// First `(a,b,c,e,f,j₁,j₂,j₃,j₂₃)` where the identity fails.
pub fn first_sixj_violation(d: &SixJData) -> Option<[usize; 9]> {
    let n = d.n;
    let total = n.pow(9);
    for idx in 0..total {
        let mut x = [0usize; 9];
        let mut r = idx;
        for slot in x.iter_mut().rev() {
            *slot = r % n;
            r /= n;
        }
        let [a, b, c, e, f, j1, j2, j3, j23] = x;
        let mut lhs = Scalar::zero();
        for j in 0..n {
            lhs += &d.w[j] * &d.w[j] * d.f(e, j3, j, j2, a, j23) * d.f(j, c, j1, b, a, j2) * d.f(j3, c, f, j1, e, j);
        }
        let rhs = d.f(j3, c, f, b, j23, j2) * d.f(e, f, j1, b, a, j23);
        if lhs != rhs {
            return Some(x);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{derive_mtilde, int, u_symmetric, verify_three_algebra, DEFAULT_MAX_DIM};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn singleton(w: i64) -> SixJData {
        SixJData::constant(1, int(1), vec![int(w)]).unwrap()
    }

    #[test]
    fn symmetry_group_has_order_24() {
        assert_eq!(orbit([0, 1, 2, 3, 4, 5]).len(), 24);
    }

    #[test]
    fn asymmetric_symbol_rejected() {
        let mut f = vec![int(0); 64];
        f[1] = int(1);
        assert!(matches!(
            SixJData::new(2, f, vec![int(1), int(1)]),
            Err(AlgebraError::NotSymmetric { .. })
        ));
    }

    #[test]
    fn singleton_examples() {
        let s = build_sixj(&singleton(1)).unwrap();
        assert_eq!(s.m(0, 0, 0), &[(0, int(1))]);
        assert_eq!(s.u_entries(), &[([0, 0], int(1))]);
        assert!(check_sixj_identity(&singleton(1)));
        assert!(!check_sixj_identity(&singleton(2)));
        let r = verify_three_algebra(&derive_mtilde(&s), DEFAULT_MAX_DIM).unwrap();
        assert!(r.all_pass(), "{r}");
    }

    #[test]
    fn mtilde_matches_explicit_mbar() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..3 {
            let d = SixJData::random(2, vec![int(1), int(3)], 2, &mut rng).unwrap();
            let s = build_sixj(&d).unwrap();
            assert!(u_symmetric(&s));
            assert_eq!(derive_mtilde(&s).mbar_entries(), explicit_sixj_system(&d).mbar_entries());
        }
    }

    #[test]
    fn p_has_order_three() {
        let d = SixJData::constant(2, int(1), vec![int(1), int(1)]).unwrap();
        let s = build_sixj(&d).unwrap();
        for i in 0..8 {
            let once = s.p_entries()[i].1;
            let twice = s.p_entries()[once].1;
            assert_eq!(s.p_entries()[twice].1, i);
        }
    }
}
