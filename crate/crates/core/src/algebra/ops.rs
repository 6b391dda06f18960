//! Composite multilinear maps as op lists, evaluated by sparse rewriting of
//! basis tuples.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use rayon::prelude::*;

use super::Scalar;

/// Access to the structure maps of an algebra on basis elements.
pub trait Structure: Sync {
    fn dim(&self) -> usize;
    fn m_terms(&self, input: [usize; 3]) -> &[(usize, Scalar)];
    fn mbar_terms(&self, input: [usize; 2]) -> &[([usize; 2], Scalar)];
    fn p_terms(&self, input: usize) -> &[(usize, Scalar)];
    fn u_terms(&self) -> &[([usize; 2], Scalar)];
}

/// One tensor factor operation. Positions are 0-based slots of the current
/// tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Op {
    /// `m` on slots `i, i+1, i+2`.
    M(usize),
    /// `m̄` on slots `i, i+1`.
    Mbar(usize),
    /// `P^k` on slot `i`.
    P(usize, u8),
    /// Exchange slots `i` and `j`.
    Swap(usize, usize),
    /// Output slot `i` takes input slot `perm[i]`.
    Perm(Vec<usize>),
    /// Insert `u(1)` at slots `i, i+1`.
    U(usize),
}

/// A sparse element of `A^{⊗n}` (zero coefficients never stored).
pub type Tensor = BTreeMap<Vec<usize>, Scalar>;

fn merge(terms: Vec<(Vec<usize>, Scalar)>) -> Vec<(Vec<usize>, Scalar)> {
    if terms.len() <= 1 {
        return terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    }
    let mut acc: HashMap<Vec<usize>, Scalar> = HashMap::with_capacity(terms.len());
    for (t, c) in terms {
        *acc.entry(t).or_insert_with(Scalar::zero) += c;
    }
    acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

fn step<S: Structure + ?Sized>(s: &S, op: &Op, terms: Vec<(Vec<usize>, Scalar)>) -> Vec<(Vec<usize>, Scalar)> {
    let mut out = Vec::with_capacity(terms.len());
    for (t, c) in terms {
        match op {
            Op::M(i) => {
                let i = *i;
                for (r, k) in s.m_terms([t[i], t[i + 1], t[i + 2]]) {
                    let mut n = Vec::with_capacity(t.len() - 2);
                    n.extend_from_slice(&t[..i]);
                    n.push(*r);
                    n.extend_from_slice(&t[i + 3..]);
                    out.push((n, &c * k));
                }
            }
            Op::Mbar(i) => {
                let i = *i;
                for (r, k) in s.mbar_terms([t[i], t[i + 1]]) {
                    let mut n = t.clone();
                    n[i] = r[0];
                    n[i + 1] = r[1];
                    out.push((n, &c * k));
                }
            }
            Op::P(i, pow) => {
                let mut cur = vec![(t, c)];
                for _ in 0..*pow {
                    let mut next = Vec::new();
                    for (t, c) in cur {
                        for (r, k) in s.p_terms(t[*i]) {
                            let mut n = t.clone();
                            n[*i] = *r;
                            next.push((n, &c * k));
                        }
                    }
                    cur = next;
                }
                out.extend(cur);
            }
            Op::Swap(i, j) => {
                let mut n = t;
                n.swap(*i, *j);
                out.push((n, c));
            }
            Op::Perm(perm) => {
                let n = perm.iter().map(|&k| t[k]).collect();
                out.push((n, c));
            }
            Op::U(i) => {
                for (r, k) in s.u_terms() {
                    let mut n = Vec::with_capacity(t.len() + 2);
                    n.extend_from_slice(&t[..*i]);
                    n.extend_from_slice(r);
                    n.extend_from_slice(&t[*i..]);
                    out.push((n, &c * k));
                }
            }
        }
    }
    merge(out)
}

/// Applies `ops` in order (first op first) to a basis tuple.
pub fn apply_ops<S: Structure + ?Sized>(s: &S, ops: &[Op], input: &[usize]) -> Tensor {
    let mut terms = vec![(input.to_vec(), Scalar::one())];
    for op in ops {
        if terms.is_empty() {
            break;
        }
        terms = step(s, op, terms);
    }
    terms.into_iter().collect()
}

/// Applies `ops` to a sparse tensor, by linearity.
pub fn apply_ops_to<S: Structure + ?Sized>(s: &S, ops: &[Op], input: &Tensor) -> Tensor {
    let mut terms: Vec<(Vec<usize>, Scalar)> =
        input.iter().map(|(t, c)| (t.clone(), c.clone())).collect();
    for op in ops {
        if terms.is_empty() {
            break;
        }
        terms = step(s, op, terms);
    }
    terms.into_iter().collect()
}

/// An identity between two composites on `A^{⊗arity}`.
#[derive(Debug, Clone)]
pub struct Law {
    pub name: &'static str,
    pub arity: usize,
    pub lhs: Vec<Op>,
    pub rhs: Vec<Op>,
}

/// Outcome of one law.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Pass,
    /// First basis tuple (in lexicographic order) where the sides differ.
    Fail(Vec<usize>),
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub status: Status,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed())
    }

    pub fn skip(&mut self, name: &'static str) {
        self.checks.push(Check {
            name,
            status: Status::Skipped,
        });
    }
}

fn decode(mut idx: usize, dim: usize, arity: usize) -> Vec<usize> {
    let mut t = vec![0; arity];
    for slot in t.iter_mut().rev() {
        *slot = idx % dim;
        idx /= dim;
    }
    t
}

/// Checks a law on every basis tuple of its domain.
pub fn check_law<S: Structure + ?Sized>(s: &S, law: &Law) -> Check {
    let dim = s.dim();
    let total = dim.pow(law.arity as u32);
    let witness = (0..total).into_par_iter().find_map_first(|idx| {
        let t = decode(idx, dim, law.arity);
        let l = apply_ops(s, &law.lhs, &t);
        let r = apply_ops(s, &law.rhs, &t);
        (l != r).then_some(t)
    });
    Check {
        name: law.name,
        status: witness.map_or(Status::Pass, Status::Fail),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    struct Toy {
        m: HashMap<[usize; 3], Vec<(usize, Scalar)>>,
        p: Vec<Vec<(usize, Scalar)>>,
        u: Vec<([usize; 2], Scalar)>,
    }

    impl Structure for Toy {
        fn dim(&self) -> usize {
            2
        }
        fn m_terms(&self, input: [usize; 3]) -> &[(usize, Scalar)] {
            self.m.get(&input).map_or(&[], Vec::as_slice)
        }
        fn mbar_terms(&self, _: [usize; 2]) -> &[([usize; 2], Scalar)] {
            &[]
        }
        fn p_terms(&self, input: usize) -> &[(usize, Scalar)] {
            &self.p[input]
        }
        fn u_terms(&self) -> &[([usize; 2], Scalar)] {
            &self.u
        }
    }

    fn q(n: i64) -> Scalar {
        Scalar::from_integer(BigInt::from(n))
    }

    fn toy() -> Toy {
        let mut m = HashMap::new();
        m.insert([0, 1, 1], vec![(0, q(2)), (1, q(3))]);
        Toy {
            m,
            p: vec![vec![(1, q(1))], vec![(0, q(1))]],
            u: vec![([0, 1], q(5))],
        }
    }

    #[test]
    fn ops_on_tuples() {
        let t = toy();
        let r = apply_ops(&t, &[Op::M(0)], &[0, 1, 1]);
        assert_eq!(r.len(), 2);
        assert_eq!(r[&vec![1]], q(3));
        assert!(apply_ops(&t, &[Op::M(0)], &[1, 1, 1]).is_empty());
        let r = apply_ops(&t, &[Op::U(1)], &[1]);
        assert_eq!(r[&vec![1, 0, 1]], q(5));
        let r = apply_ops(&t, &[Op::Perm(vec![2, 0, 1])], &[7, 8, 9]);
        assert!(r.contains_key(&vec![9, 7, 8]));
        let r = apply_ops(&t, &[Op::P(0, 3)], &[0]);
        assert!(r.contains_key(&vec![1]));
    }

    #[test]
    fn cancellation_drops_terms() {
        let mut t = toy();
        t.m.insert([1, 1, 1], vec![(0, q(-2))]);
        let mut input = Tensor::new();
        input.insert(vec![0, 1, 1], q(1));
        input.insert(vec![1, 1, 1], q(1));
        let r = apply_ops_to(&t, &[Op::M(0)], &input);
        assert_eq!(r.len(), 1);
        assert_eq!(r[&vec![1]], q(3));
    }

    #[test]
    fn law_reports_first_witness() {
        let t = toy();
        let law = Law {
            name: "p-involution",
            arity: 1,
            lhs: vec![Op::P(0, 2)],
            rhs: vec![],
        };
        assert!(check_law(&t, &law).passed());
        let law = Law {
            name: "p-identity",
            arity: 1,
            lhs: vec![Op::P(0, 1)],
            rhs: vec![],
        };
        assert_eq!(check_law(&t, &law).status, Status::Fail(vec![0]));
    }
}
