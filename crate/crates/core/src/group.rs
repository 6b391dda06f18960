//! Finite groups given by multiplication tables, and finite modules
//! `(Z/m)^k` on which a group acts by automorphisms.
//!
//! Every axiom is checked exhaustively at construction, so a value of either
//! type is always valid. Elements are dense indices `0..order`; the identity
//! is stored explicitly and need not be element `0`.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("a group needs at least one element")]
    Empty,
    #[error("table row {row} has {len} entries, expected {order}")]
    NotSquare { row: usize, len: usize, order: usize },
    #[error("table entry {a}*{b} = {value} is not an element (order {order})")]
    NotClosed {
        a: usize,
        b: usize,
        value: usize,
        order: usize,
    },
    #[error("associativity fails at ({a}, {b}, {c})")]
    NotAssociative { a: usize, b: usize, c: usize },
    #[error("the table has no two-sided identity")]
    NoIdentity,
    #[error("no inverse for element {0}")]
    NoInverse(usize),
    #[error("{given} names supplied for a group of order {order}")]
    NameCount { given: usize, order: usize },
    #[error("{0}")]
    Unsupported(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModuleError {
    #[error("modulus must be at least 2, got {0}")]
    ModulusTooSmall(u64),
    #[error("modulus {0} is too large (limit 2^31)")]
    ModulusTooLarge(u64),
    #[error("expected one action matrix per group element ({expected}), got {given}")]
    MatrixCount { expected: usize, given: usize },
    #[error("action matrix of element {element} is not {rank}x{rank}")]
    MatrixShape { element: usize, rank: usize },
    #[error("action matrix of element {element} is not invertible mod {modulus}")]
    NotInvertible { element: usize, modulus: u64 },
    #[error("the identity element does not act trivially")]
    IdentityActsNontrivially,
    #[error("action(g*h) != action(g)*action(h) at g={g}, h={h}")]
    NotHomomorphism { g: usize, h: usize },
    #[error("coordinate vector has length {given}, module rank is {rank}")]
    WrongRank { given: usize, rank: usize },
}

/// A finite group stored as its full multiplication table.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<usize>,
    identity: usize,
    inverse: Vec<usize>,
    names: Option<Vec<String>>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("order", &self.order)
            .field("identity", &self.identity)
            .finish_non_exhaustive()
    }
}

impl FiniteGroup {
    /// Validates a multiplication table and derives identity and inverses.
    pub fn from_table(
        table: Vec<Vec<usize>>,
        names: Option<Vec<String>>,
    ) -> Result<Self, GroupError> {
        let order = table.len();
        if order == 0 {
            return Err(GroupError::Empty);
        }
        if let Some(names) = &names {
            if names.len() != order {
                return Err(GroupError::NameCount {
                    given: names.len(),
                    order,
                });
            }
        }
        let mut flat = Vec::with_capacity(order * order);
        for (row, entries) in table.iter().enumerate() {
            if entries.len() != order {
                return Err(GroupError::NotSquare {
                    row,
                    len: entries.len(),
                    order,
                });
            }
            for (col, &value) in entries.iter().enumerate() {
                if value >= order {
                    return Err(GroupError::NotClosed {
                        a: row,
                        b: col,
                        value,
                        order,
                    });
                }
            }
            flat.extend_from_slice(entries);
        }
        let mul = |a: usize, b: usize| flat[a * order + b];
        for a in 0..order {
            for b in 0..order {
                let ab = mul(a, b);
                for c in 0..order {
                    if mul(ab, c) != mul(a, mul(b, c)) {
                        return Err(GroupError::NotAssociative { a, b, c });
                    }
                }
            }
        }
        let identity = (0..order)
            .find(|&e| (0..order).all(|g| mul(e, g) == g && mul(g, e) == g))
            .ok_or(GroupError::NoIdentity)?;
        let mut inverse = Vec::with_capacity(order);
        for g in 0..order {
            let inv = (0..order)
                .find(|&h| mul(g, h) == identity && mul(h, g) == identity)
                .ok_or(GroupError::NoInverse(g))?;
            inverse.push(inv);
        }
        Ok(Self {
            order,
            table: flat,
            identity,
            inverse,
            names,
        })
    }

    /// `Z/n` under addition; element `i` is the residue `i`.
    pub fn cyclic(n: usize) -> Result<Self, GroupError> {
        if n == 0 {
            return Err(GroupError::Empty);
        }
        let table = (0..n)
            .map(|a| (0..n).map(|b| (a + b) % n).collect())
            .collect();
        Self::from_table(table, None)
    }

    pub fn trivial() -> Self {
        Self::cyclic(1).expect("order 1 is valid")
    }

    /// The symmetric group on `n` letters, elements in lexicographic order
    /// of their one-line notation (element 0 is the identity). The product
    /// `a*b` is the composition "first `b`, then `a`".
    pub fn symmetric(n: usize) -> Result<Self, GroupError> {
        if n == 0 {
            return Err(GroupError::Empty);
        }
        if n > 5 {
            return Err(GroupError::Unsupported(format!(
                "symmetric group on {n} letters is beyond desk scale"
            )));
        }
        let perms = permutations(n);
        let index = |p: &[usize]| perms.iter().position(|q| q == p).expect("closed");
        let table = perms
            .iter()
            .map(|a| {
                perms
                    .iter()
                    .map(|b| {
                        let ab: Vec<usize> = (0..n).map(|i| a[b[i]]).collect();
                        index(&ab)
                    })
                    .collect()
            })
            .collect();
        let names = perms
            .iter()
            .map(|p| p.iter().map(|x| (x + 1).to_string()).collect::<String>())
            .collect();
        Self::from_table(table, Some(names))
    }

    /// Pairs `(a, b)` encoded as `a * |right| + b`.
    pub fn direct_product(left: &Self, right: &Self) -> Self {
        let (n, k) = (left.order, right.order);
        let table = (0..n * k)
            .map(|x| {
                (0..n * k)
                    .map(|y| left.mul(x / k, y / k) * k + right.mul(x % k, y % k))
                    .collect()
            })
            .collect();
        Self::from_table(table, None).expect("products of groups are groups")
    }

    pub fn klein_four() -> Self {
        let z2 = Self::cyclic(2).expect("valid");
        Self::direct_product(&z2, &z2)
    }

    /// Every group of order at most `max_order` (up to isomorphism), for
    /// `max_order <= 7`, with a short display name.
    pub fn small_groups(max_order: usize) -> Result<Vec<(String, Self)>, GroupError> {
        if max_order > 7 {
            return Err(GroupError::Unsupported(
                "small group list only covers orders up to 7".into(),
            ));
        }
        let mut out = Vec::new();
        for n in 1..=max_order {
            out.push((format!("Z{n}"), Self::cyclic(n)?));
            if n == 4 {
                out.push(("Z2xZ2".to_string(), Self::klein_four()));
            }
            if n == 6 {
                out.push(("S3".to_string(), Self::symmetric(3)?));
            }
        }
        Ok(out)
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    pub fn name(&self, g: usize) -> String {
        match &self.names {
            Some(names) => names[g].clone(),
            None => g.to_string(),
        }
    }

    pub fn table_rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order).map(<[usize]>::to_vec).collect()
    }

    /// A small generating set, chosen greedily.
    pub fn generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span = vec![false; self.order];
        span[self.identity] = true;
        let mut reached = 1;
        for g in self.elements() {
            if span[g] {
                continue;
            }
            gens.push(g);
            // closure under right multiplication by the generators
            let mut stack: Vec<usize> = (0..self.order).filter(|&x| span[x]).collect();
            while let Some(x) = stack.pop() {
                for &s in &gens {
                    let y = self.mul(x, s);
                    if !span[y] {
                        span[y] = true;
                        reached += 1;
                        stack.push(y);
                    }
                }
            }
            if reached == self.order {
                break;
            }
        }
        gens
    }

    /// All homomorphisms to `Z/2`, as parity vectors (`true` = odd).
    /// The trivial homomorphism is always first.
    pub fn characters_to_z2(&self) -> Vec<Vec<bool>> {
        let gens = self.generators();
        let mut out = Vec::new();
        for mask in 0u32..(1 << gens.len()) {
            let mut value: Vec<Option<bool>> = vec![None; self.order];
            value[self.identity] = Some(false);
            let mut stack = vec![self.identity];
            let mut consistent = true;
            while let Some(x) = stack.pop() {
                let vx = value[x].expect("assigned");
                for (i, &s) in gens.iter().enumerate() {
                    let y = self.mul(x, s);
                    let vy = vx ^ (mask >> i & 1 == 1);
                    match value[y] {
                        None => {
                            value[y] = Some(vy);
                            stack.push(y);
                        }
                        Some(v) if v != vy => consistent = false,
                        Some(_) => {}
                    }
                }
            }
            if !consistent {
                continue;
            }
            let chi: Vec<bool> = value.into_iter().map(|v| v.expect("generated")).collect();
            let hom = self.elements().all(|a| {
                self.elements()
                    .all(|b| chi[self.mul(a, b)] == (chi[a] ^ chi[b]))
            });
            if hom {
                out.push(chi);
            }
        }
        out
    }
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    loop {
        out.push(current.clone());
        // next permutation
        let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).expect("exists");
        current.swap(i - 1, j);
        current[i..].reverse();
    }
    out
}

/// An element of `(Z/m)^k`, every coordinate reduced into `0..m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModuleElement {
    coords: Vec<u64>,
}

impl ModuleElement {
    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<u64> {
        self.coords
    }
}

/// The finite module `(Z/m)^k` with a left action of a finite group by
/// automorphisms, one `k x k` matrix per group element.
#[derive(Clone, PartialEq, Eq)]
pub struct GModule {
    group: Arc<FiniteGroup>,
    modulus: u64,
    rank: usize,
    action: Vec<Vec<u64>>,
}

impl fmt::Debug for GModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GModule")
            .field("group_order", &self.group.order())
            .field("modulus", &self.modulus)
            .field("rank", &self.rank)
            .finish_non_exhaustive()
    }
}

const MAX_MODULUS: u64 = 1 << 31;

impl GModule {
    /// Validates the action: identity acts trivially, every matrix is
    /// invertible mod `m`, and `g -> action(g)` is a homomorphism.
    pub fn new(
        group: Arc<FiniteGroup>,
        modulus: u64,
        rank: usize,
        matrices: Vec<Vec<Vec<i64>>>,
    ) -> Result<Self, ModuleError> {
        if modulus < 2 {
            return Err(ModuleError::ModulusTooSmall(modulus));
        }
        if modulus > MAX_MODULUS {
            return Err(ModuleError::ModulusTooLarge(modulus));
        }
        if matrices.len() != group.order() {
            return Err(ModuleError::MatrixCount {
                expected: group.order(),
                given: matrices.len(),
            });
        }
        let m = modulus as i64;
        let mut action = Vec::with_capacity(matrices.len());
        for (element, rows) in matrices.iter().enumerate() {
            if rows.len() != rank || rows.iter().any(|r| r.len() != rank) {
                return Err(ModuleError::MatrixShape { element, rank });
            }
            action.push(
                rows.iter()
                    .flatten()
                    .map(|&x| x.rem_euclid(m) as u64)
                    .collect::<Vec<_>>(),
            );
        }
        let module = Self {
            group,
            modulus,
            rank,
            action,
        };
        module.validate()?;
        Ok(module)
    }

    /// `(Z/m)^k` with every element acting as the identity.
    pub fn trivial(group: Arc<FiniteGroup>, modulus: u64, rank: usize) -> Result<Self, ModuleError> {
        let id = identity_matrix(rank);
        let matrices = vec![id; group.order()];
        Self::new(group, modulus, rank, matrices)
    }

    /// `Z/m` where elements with odd `parity` act by `-1`.
    pub fn sign(group: Arc<FiniteGroup>, modulus: u64, parity: &[bool]) -> Result<Self, ModuleError> {
        if parity.len() != group.order() {
            return Err(ModuleError::MatrixCount {
                expected: group.order(),
                given: parity.len(),
            });
        }
        let matrices = parity
            .iter()
            .map(|&odd| vec![vec![if odd { -1 } else { 1 }]])
            .collect();
        Self::new(group, modulus, 1, matrices)
    }

    fn validate(&self) -> Result<(), ModuleError> {
        let k = self.rank;
        let id: Vec<u64> = identity_matrix(k)
            .into_iter()
            .flatten()
            .map(|x| x as u64)
            .collect();
        if self.action[self.group.identity()] != id {
            return Err(ModuleError::IdentityActsNontrivially);
        }
        for (element, mat) in self.action.iter().enumerate() {
            let det = determinant(mat, k, self.modulus);
            if num_integer::gcd(det, self.modulus) != 1 {
                return Err(ModuleError::NotInvertible {
                    element,
                    modulus: self.modulus,
                });
            }
        }
        for g in self.group.elements() {
            for h in self.group.elements() {
                let gh = self.group.mul(g, h);
                if self.action[gh] != self.mat_mul(&self.action[g], &self.action[h]) {
                    return Err(ModuleError::NotHomomorphism { g, h });
                }
            }
        }
        Ok(())
    }

    fn mat_mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let k = self.rank;
        let mut out = vec![0; k * k];
        for i in 0..k {
            for j in 0..k {
                let mut acc = 0;
                for l in 0..k {
                    acc = (acc + a[i * k + l] * b[l * k + j]) % self.modulus;
                }
                out[i * k + j] = acc;
            }
        }
        out
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Number of elements, `m^k`, if it fits in a `u64`.
    pub fn size(&self) -> Option<u64> {
        self.modulus.checked_pow(self.rank as u32)
    }

    pub fn matrix(&self, g: usize) -> &[u64] {
        &self.action[g]
    }

    pub fn matrix_rows(&self, g: usize) -> Vec<Vec<u64>> {
        self.action[g].chunks(self.rank.max(1)).map(<[u64]>::to_vec).collect()
    }

    pub fn acts_trivially(&self) -> bool {
        let id = &self.action[self.group.identity()];
        self.action.iter().all(|a| a == id)
    }

    /// Writes `g . x` into `out`.
    #[inline]
    pub fn act_into(&self, g: usize, x: &[u64], out: &mut [u64]) {
        let k = self.rank;
        let mat = &self.action[g];
        for i in 0..k {
            let mut acc = 0;
            for j in 0..k {
                acc = (acc + mat[i * k + j] * x[j]) % self.modulus;
            }
            out[i] = acc;
        }
    }

    pub fn act(&self, g: usize, x: &[u64]) -> Vec<u64> {
        let mut out = vec![0; self.rank];
        self.act_into(g, x, &mut out);
        out
    }

    pub fn element(&self, coords: &[i64]) -> Result<ModuleElement, ModuleError> {
        if coords.len() != self.rank {
            return Err(ModuleError::WrongRank {
                given: coords.len(),
                rank: self.rank,
            });
        }
        let m = self.modulus as i64;
        Ok(ModuleElement {
            coords: coords.iter().map(|&c| c.rem_euclid(m) as u64).collect(),
        })
    }

    /// The `index`-th element in base-`m` order (first coordinate most
    /// significant).
    pub fn element_at(&self, mut index: u64) -> ModuleElement {
        let mut coords = vec![0; self.rank];
        for c in coords.iter_mut().rev() {
            *c = index % self.modulus;
            index /= self.modulus;
        }
        ModuleElement { coords }
    }

    pub fn element_index(&self, x: &[u64]) -> u64 {
        x.iter().fold(0, |acc, &c| acc * self.modulus + c)
    }

    pub fn zero(&self) -> ModuleElement {
        ModuleElement {
            coords: vec![0; self.rank],
        }
    }

    pub fn add(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        x.iter().zip(y).map(|(a, b)| (a + b) % self.modulus).collect()
    }

    pub fn neg(&self, x: &[u64]) -> Vec<u64> {
        x.iter().map(|&a| (self.modulus - a) % self.modulus).collect()
    }

    /// Fixed points `A^G`, by enumeration. Only for small modules.
    pub fn fixed_points(&self) -> Vec<ModuleElement> {
        let size = self.size().expect("small module");
        (0..size)
            .map(|i| self.element_at(i))
            .filter(|x| {
                self.group
                    .elements()
                    .all(|g| self.act(g, x.coords()) == x.coords())
            })
            .collect()
    }
}

fn identity_matrix(k: usize) -> Vec<Vec<i64>> {
    (0..k)
        .map(|i| (0..k).map(|j| i64::from(i == j)).collect())
        .collect()
}

/// Determinant mod `m` by cofactor expansion; ranks here are tiny.
fn determinant(mat: &[u64], k: usize, m: u64) -> u64 {
    if k == 0 {
        return 1 % m;
    }
    if k == 1 {
        return mat[0] % m;
    }
    let mut acc = 0u64;
    for col in 0..k {
        let minor: Vec<u64> = (1..k)
            .flat_map(|r| (0..k).filter(move |&c| c != col).map(move |c| (r, c)))
            .map(|(r, c)| mat[r * k + c])
            .collect();
        let term = mat[col] * determinant(&minor, k - 1, m) % m;
        acc = if col % 2 == 0 {
            (acc + term) % m
        } else {
            (acc + m - term) % m
        };
    }
    acc
}
