//! 3-algebras and strong 3-algebras over the rationals, stored as sparse
//! structure constants.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::delta::DeltaGroup;

pub mod dw;
pub mod ops;
pub mod sixj;

pub use ops::{apply_ops, apply_ops_to, check_law, Check, Law, Op, Report, Status, Structure, Tensor};

pub type Scalar = BigRational;

/// Default bound on `dim` for the arity 4 and 5 checks.
pub const DEFAULT_MAX_DIM: usize = 40;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("basis index {index} out of range for dimension {dim}")]
    Index { index: usize, dim: usize },
    #[error("dimension must be positive")]
    ZeroDim,
    #[error("dimension {dim} exceeds the cap {max} for exhaustive checks")]
    TooLarge { dim: usize, max: usize },
    #[error("u(1) has no terms")]
    EmptyU,
    #[error("bad scalar {0:?}")]
    BadScalar(String),
    #[error("expected {expected} basis names, got {got}")]
    Names { expected: usize, got: usize },
    #[error("u(1) does not satisfy its symmetry condition")]
    USymmetry,
    #[error("6j symbol not invariant: f{from:?} != f{to:?}")]
    NotSymmetric { from: [usize; 6], to: [usize; 6] },
    #[error("cocycle value at {0:?} is zero")]
    ZeroValue([usize; 3]),
    #[error("expected {expected} values, got {got}")]
    Length { expected: usize, got: usize },
}

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

pub fn parse_scalar(s: &str) -> Result<Scalar, AlgebraError> {
    let bad = || AlgebraError::BadScalar(s.to_string());
    let t = s.trim();
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Scalar::new(n, d))
}

/// `"n"` for integers, `"n/d"` otherwise.
pub fn format_scalar(x: &Scalar) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

type Map3 = HashMap<[usize; 3], Vec<(usize, Scalar)>>;
type Map2 = HashMap<[usize; 2], Vec<([usize; 2], Scalar)>>;

fn push_term<K: PartialEq + Copy>(terms: &mut Vec<(K, Scalar)>, key: K, c: Scalar) {
    if let Some(pos) = terms.iter().position(|(k, _)| *k == key) {
        terms[pos].1 += c;
        if terms[pos].1.is_zero() {
            terms.remove(pos);
        }
    } else if !c.is_zero() {
        terms.push((key, c));
    }
}

fn check_index(i: usize, dim: usize) -> Result<(), AlgebraError> {
    if i < dim {
        Ok(())
    } else {
        Err(AlgebraError::Index { index: i, dim })
    }
}

fn default_names(dim: usize) -> Vec<String> {
    (0..dim).map(|i| format!("e{i}")).collect()
}

fn sorted_m(m: &Map3) -> Vec<([usize; 3], usize, Scalar)> {
    let mut out: Vec<_> = m
        .iter()
        .flat_map(|(k, v)| v.iter().map(move |(o, c)| (*k, *o, c.clone())))
        .collect();
    out.sort_by_key(|a| (a.0, a.1));
    out
}

fn sorted_p(p: &[Vec<(usize, Scalar)>]) -> Vec<(usize, usize, Scalar)> {
    let mut out: Vec<_> = p
        .iter()
        .enumerate()
        .flat_map(|(i, v)| v.iter().map(move |(o, c)| (i, *o, c.clone())))
        .collect();
    out.sort_by_key(|a| (a.0, a.1));
    out
}

/// `(A, m, m̄, P)` with sparse structure constants.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseTrilinearSystem {
    dim: usize,
    names: Vec<String>,
    m: Map3,
    mbar: Map2,
    p: Vec<Vec<(usize, Scalar)>>,
}

impl SparseTrilinearSystem {
    /// All maps zero.
    pub fn new(dim: usize) -> Result<Self, AlgebraError> {
        if dim == 0 {
            return Err(AlgebraError::ZeroDim);
        }
        Ok(Self {
            dim,
            names: default_names(dim),
            m: HashMap::new(),
            mbar: HashMap::new(),
            p: vec![Vec::new(); dim],
        })
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self, AlgebraError> {
        if names.len() != self.dim {
            return Err(AlgebraError::Names {
                expected: self.dim,
                got: names.len(),
            });
        }
        self.names = names;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis_names(&self) -> &[String] {
        &self.names
    }

    /// Adds `c · e_out` to `m(e_i ⊗ e_j ⊗ e_k)`.
    pub fn add_m(&mut self, input: [usize; 3], out: usize, c: Scalar) -> Result<(), AlgebraError> {
        for i in input.into_iter().chain([out]) {
            check_index(i, self.dim)?;
        }
        let terms = self.m.entry(input).or_default();
        push_term(terms, out, c);
        if terms.is_empty() {
            self.m.remove(&input);
        }
        Ok(())
    }

    pub fn add_mbar(&mut self, input: [usize; 2], out: [usize; 2], c: Scalar) -> Result<(), AlgebraError> {
        for i in input.into_iter().chain(out) {
            check_index(i, self.dim)?;
        }
        let terms = self.mbar.entry(input).or_default();
        push_term(terms, out, c);
        if terms.is_empty() {
            self.mbar.remove(&input);
        }
        Ok(())
    }

    pub fn add_p(&mut self, input: usize, out: usize, c: Scalar) -> Result<(), AlgebraError> {
        check_index(input, self.dim)?;
        check_index(out, self.dim)?;
        push_term(&mut self.p[input], out, c);
        Ok(())
    }

    pub fn m_entries(&self) -> Vec<([usize; 3], usize, Scalar)> {
        sorted_m(&self.m)
    }

    pub fn mbar_entries(&self) -> Vec<([usize; 2], [usize; 2], Scalar)> {
        let mut out: Vec<_> = self
            .mbar
            .iter()
            .flat_map(|(k, v)| v.iter().map(move |(o, c)| (*k, *o, c.clone())))
            .collect();
        out.sort_by_key(|a| (a.0, a.1));
        out
    }

    pub fn p_entries(&self) -> Vec<(usize, usize, Scalar)> {
        sorted_p(&self.p)
    }

    /// `m̄(e_a ⊗ e_b)`.
    pub fn mbar_of(&self, a: usize, b: usize) -> Tensor {
        apply_ops(self, &[Op::Mbar(0)], &[a, b])
    }
}

impl Structure for SparseTrilinearSystem {
    fn dim(&self) -> usize {
        self.dim
    }
    fn m_terms(&self, input: [usize; 3]) -> &[(usize, Scalar)] {
        self.m.get(&input).map_or(&[], Vec::as_slice)
    }
    fn mbar_terms(&self, input: [usize; 2]) -> &[([usize; 2], Scalar)] {
        self.mbar.get(&input).map_or(&[], Vec::as_slice)
    }
    fn p_terms(&self, input: usize) -> &[(usize, Scalar)] {
        &self.p[input]
    }
    fn u_terms(&self) -> &[([usize; 2], Scalar)] {
        &[]
    }
}

/// `(A, m, u, P)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StrongThreeAlgebra {
    dim: usize,
    names: Vec<String>,
    m: Map3,
    p: Vec<Vec<(usize, Scalar)>>,
    u: Vec<([usize; 2], Scalar)>,
}

impl StrongThreeAlgebra {
    /// Zero `m`, zero `P`, and the given `u(1)`.
    pub fn new(dim: usize, u: Vec<([usize; 2], Scalar)>) -> Result<Self, AlgebraError> {
        if dim == 0 {
            return Err(AlgebraError::ZeroDim);
        }
        let mut agg = Vec::new();
        for (pq, c) in u {
            check_index(pq[0], dim)?;
            check_index(pq[1], dim)?;
            push_term(&mut agg, pq, c);
        }
        if agg.is_empty() {
            return Err(AlgebraError::EmptyU);
        }
        agg.sort_by_key(|a| a.0);
        Ok(Self {
            dim,
            names: default_names(dim),
            m: HashMap::new(),
            p: vec![Vec::new(); dim],
            u: agg,
        })
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self, AlgebraError> {
        if names.len() != self.dim {
            return Err(AlgebraError::Names {
                expected: self.dim,
                got: names.len(),
            });
        }
        self.names = names;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis_names(&self) -> &[String] {
        &self.names
    }

    pub fn add_m(&mut self, input: [usize; 3], out: usize, c: Scalar) -> Result<(), AlgebraError> {
        for i in input.into_iter().chain([out]) {
            check_index(i, self.dim)?;
        }
        let terms = self.m.entry(input).or_default();
        push_term(terms, out, c);
        if terms.is_empty() {
            self.m.remove(&input);
        }
        Ok(())
    }

    pub fn add_p(&mut self, input: usize, out: usize, c: Scalar) -> Result<(), AlgebraError> {
        check_index(input, self.dim)?;
        check_index(out, self.dim)?;
        push_term(&mut self.p[input], out, c);
        Ok(())
    }

    pub fn m_entries(&self) -> Vec<([usize; 3], usize, Scalar)> {
        sorted_m(&self.m)
    }

    pub fn p_entries(&self) -> Vec<(usize, usize, Scalar)> {
        sorted_p(&self.p)
    }

    pub fn u_entries(&self) -> &[([usize; 2], Scalar)] {
        &self.u
    }

    pub fn m(&self, a: usize, b: usize, c: usize) -> &[(usize, Scalar)] {
        self.m_terms([a, b, c])
    }

    /// `u(1)` as a tensor.
    pub fn u_tensor(&self) -> Tensor {
        self.u.iter().map(|(k, c)| (k.to_vec(), c.clone())).collect()
    }
}

impl Structure for StrongThreeAlgebra {
    fn dim(&self) -> usize {
        self.dim
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

fn swap(i: usize, j: usize) -> Op {
    Op::Swap(i - 1, j - 1)
}

fn p_order_law() -> Law {
    Law {
        name: "p-order",
        arity: 1,
        lhs: vec![Op::P(0, 3)],
        rhs: vec![],
    }
}

fn p_m_law() -> Law {
    Law {
        name: "p-m",
        arity: 3,
        lhs: vec![Op::M(0), Op::P(0, 1)],
        rhs: vec![swap(1, 2), swap(2, 3), Op::P(0, 1), Op::P(1, 1), Op::P(2, 1), Op::M(0)],
    }
}

/// The seven defining identities, in a fixed order. `P^{-1}` is taken as `P²`.
pub fn three_algebra_laws() -> Vec<Law> {
    vec![
        Law {
            name: "m-m",
            arity: 5,
            lhs: vec![Op::M(0), Op::M(0)],
            rhs: vec![swap(3, 4), Op::Mbar(1), swap(3, 4), Op::M(2), Op::M(0)],
        },
        Law {
            name: "mbar-then-m",
            arity: 4,
            lhs: vec![Op::Mbar(0), swap(2, 3), Op::M(1)],
            rhs: vec![
                swap(2, 3),
                Op::P(0, 1),
                Op::P(1, 1),
                Op::Mbar(0),
                Op::P(0, 2),
                swap(1, 2),
                Op::M(1),
                Op::Mbar(0),
            ],
        },
        Law {
            name: "m-then-mbar",
            arity: 4,
            lhs: vec![Op::M(0), Op::Mbar(0)],
            rhs: vec![
                swap(2, 3),
                swap(1, 2),
                Op::Mbar(2),
                Op::P(0, 2),
                Op::Mbar(1),
                swap(1, 2),
                Op::M(1),
            ],
        },
        Law {
            name: "mbar-mbar",
            arity: 3,
            lhs: vec![Op::Mbar(1), swap(1, 2), Op::Mbar(1)],
            rhs: vec![
                Op::P(1, 2),
                Op::Mbar(0),
                Op::P(0, 1),
                Op::P(1, 1),
                Op::Mbar(1),
                Op::Mbar(0),
            ],
        },
        Law {
            name: "mbar-p-m",
            arity: 4,
            lhs: vec![Op::Mbar(0), Op::P(2, 2), swap(2, 3), Op::M(1)],
            rhs: vec![Op::Mbar(2), Op::M(0)],
        },
        p_m_law(),
        Law {
            name: "mbar-rotation",
            arity: 2,
            lhs: vec![swap(1, 2), Op::P(0, 2), Op::P(1, 1), Op::Mbar(0)],
            rhs: vec![Op::Mbar(0), swap(1, 2), Op::P(0, 2), Op::P(1, 1)],
        },
    ]
}

/// `Q = (1⊗P²)τ₁₂ m̄ (P⊗P) m̄`, in application order.
pub fn q_ops() -> Vec<Op> {
    vec![
        Op::Mbar(0),
        Op::P(0, 1),
        Op::P(1, 1),
        Op::Mbar(0),
        swap(1, 2),
        Op::P(1, 2),
    ]
}

/// The four tuple identities of the strong characterization (after the
/// `P³ = id` check).
pub fn strong_laws() -> Vec<Law> {
    vec![
        p_m_law(),
        Law {
            name: "u-exchange",
            arity: 2,
            lhs: vec![swap(1, 2), Op::P(0, 1), Op::U(2), Op::M(0)],
            rhs: vec![Op::U(0), swap(3, 4), swap(2, 3), Op::M(1)],
        },
        Law {
            name: "m-m-u",
            arity: 5,
            lhs: vec![Op::M(0), Op::M(0)],
            rhs: vec![
                Op::U(5),
                Op::Perm(vec![0, 1, 3, 5, 2, 6, 4]),
                Op::M(1),
                Op::M(2),
                Op::M(0),
            ],
        },
    ]
}

fn guard(dim: usize, max_dim: usize) -> Result<(), AlgebraError> {
    if dim > max_dim {
        Err(AlgebraError::TooLarge { dim, max: max_dim })
    } else {
        Ok(())
    }
}

fn run_laws<S: Structure>(s: &S, laws: Vec<Law>, report: &mut Report) {
    let p = check_law(s, &p_order_law());
    let ok = p.passed();
    report.checks.push(p);
    for law in laws {
        if ok {
            report.checks.push(check_law(s, &law));
        } else {
            report.skip(law.name);
        }
    }
}

/// Checks `P³ = id` and then the seven identities on every basis tuple.
/// When `P³ ≠ id` the remaining checks are reported as skipped.
pub fn verify_three_algebra(a: &SparseTrilinearSystem, max_dim: usize) -> Result<Report, AlgebraError> {
    guard(a.dim, max_dim)?;
    let mut report = Report::default();
    run_laws(a, three_algebra_laws(), &mut report);
    Ok(report)
}

/// Checks that `Q` is idempotent and that `m` vanishes on `ker Q ⊗ A`.
///
/// For an idempotent `Q`, `ker Q = im(1 - Q)`, so the second condition is
/// `m ∘ (Q ⊗ 1) = m` on basis triples.
pub fn verify_orthogonal(a: &SparseTrilinearSystem) -> Report {
    let q = q_ops();
    let mut qq = q.clone();
    qq.extend(q.iter().cloned());
    let idem = check_law(
        a,
        &Law {
            name: "q-projection",
            arity: 2,
            lhs: qq,
            rhs: q.clone(),
        },
    );
    let mut report = Report::default();
    let ok = idem.passed();
    report.checks.push(idem);
    if ok {
        let mut lhs = q;
        lhs.push(Op::M(0));
        report.checks.push(check_law(
            a,
            &Law {
                name: "m-kills-ker-q",
                arity: 3,
                lhs,
                rhs: vec![Op::M(0)],
            },
        ));
    } else {
        report.skip("m-kills-ker-q");
    }
    report
}

/// Whether `u(1) = Σ P²(u₂) ⊗ P(u₁)`.
pub fn u_symmetric(s: &StrongThreeAlgebra) -> bool {
    let u = s.u_tensor();
    apply_ops_to(s, &[swap(1, 2), Op::P(0, 2), Op::P(1, 1)], &u) == u
}

/// The `u` symmetry, `P³ = id`, and the three tuple identities.
pub fn verify_strong(s: &StrongThreeAlgebra, max_dim: usize) -> Result<Report, AlgebraError> {
    guard(s.dim, max_dim)?;
    let mut report = Report::default();
    report.checks.push(Check {
        name: "u-symmetry",
        status: if u_symmetric(s) {
            Status::Pass
        } else {
            Status::Fail(Vec::new())
        },
    });
    run_laws(s, strong_laws(), &mut report);
    Ok(report)
}

/// The 3-algebra candidate with `m̄ = m̃`, `m̃(a⊗b) = Σ m(a⊗b⊗u₁) ⊗ u₂`.
pub fn derive_mtilde(s: &StrongThreeAlgebra) -> SparseTrilinearSystem {
    let mut out = SparseTrilinearSystem {
        dim: s.dim,
        names: s.names.clone(),
        m: s.m.clone(),
        mbar: HashMap::new(),
        p: s.p.clone(),
    };
    // only pairs (a,b) with some m(a,b,u1) nonzero contribute
    let mut by_third: HashMap<usize, Vec<(usize, Scalar)>> = HashMap::new();
    for (u, c) in &s.u {
        by_third.entry(u[0]).or_default().push((u[1], c.clone()));
    }
    let mut acc: BTreeMap<([usize; 2], [usize; 2]), Scalar> = BTreeMap::new();
    for ([a, b, k], terms) in &s.m {
        let Some(us) = by_third.get(k) else { continue };
        for (r, c) in terms {
            for (u2, cu) in us {
                *acc.entry(([*a, *b], [*r, *u2])).or_insert_with(Scalar::zero) += c * cu;
            }
        }
    }
    for ((i, o), c) in acc {
        if !c.is_zero() {
            out.mbar.entry(i).or_default().push((o, c));
        }
    }
    out
}

/// Whether the strong check and the 3-algebra check with `m̄ = m̃` agree.
pub fn prop22_crosscheck(s: &StrongThreeAlgebra, max_dim: usize) -> Result<bool, AlgebraError> {
    if !u_symmetric(s) {
        return Err(AlgebraError::USymmetry);
    }
    let strong = verify_strong(s, max_dim)?.all_pass();
    let three = verify_three_algebra(&derive_mtilde(s), max_dim)?.all_pass();
    Ok(strong == three)
}

/// The linearization of a finite Δ-group: basis its elements, `m` and `P`
/// extended linearly (`m` zero off typed triples), and
/// `u(1) = Σ_{g,h} (1/#T(g,h)) Σ_{x ∈ T(g,h)} x ⊗ Q(x)`.
pub fn delta_to_strong(t: &DeltaGroup) -> Result<StrongThreeAlgebra, AlgebraError> {
    let n = t.base().order();
    let mut u = Vec::new();
    for g in 0..n {
        for h in 0..n {
            let carrier = t.carrier(g, h);
            if carrier.is_empty() {
                continue;
            }
            let w = Scalar::new(BigInt::one(), BigInt::from(carrier.len()));
            for &x in carrier {
                u.push(([x, t.q(x)], w.clone()));
            }
        }
    }
    let mut s = StrongThreeAlgebra::new(t.len(), u)?.with_names(t.labels().to_vec())?;
    for (abc, out) in t.m_entries() {
        s.add_m(abc, out, Scalar::one())?;
    }
    for x in 0..t.len() {
        s.add_p(x, t.p(x), Scalar::one())?;
    }
    Ok(s)
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            match &c.status {
                Status::Pass => writeln!(f, "{}: pass", c.name)?,
                Status::Skipped => writeln!(f, "{}: skipped", c.name)?,
                Status::Fail(w) => writeln!(f, "{}: FAIL at {:?}", c.name, w)?,
            }
        }
        Ok(())
    }
}
