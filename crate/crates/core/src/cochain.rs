//! Inhomogeneous cochains `C^n(G, A) = { G^n -> A }`, the differential, the
//! face maps `d^j`, and the action of `Sigma_{n+1}` by adjacent
//! transpositions.
//!
//! Values are stored densely: tuple `(g_1, ..., g_n)` has rank
//! `sum g_i |G|^(n-i)` and occupies `k` consecutive slots (`k` = rank of the
//! module). The flat vector doubles as the coordinate vector of the cochain
//! in `(Z/m)^(|G|^n k)`.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::group::{FiniteGroup, GModule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CochainError {
    #[error("transposition ({i},{}) does not act in degree {degree}", i + 1)]
    TranspositionOutOfRange { i: usize, degree: usize },
    #[error("face map d^{j} does not exist on degree {degree} cochains")]
    FaceOutOfRange { j: usize, degree: usize },
    #[error("expected {expected} values, got {given}")]
    WrongLength { expected: usize, given: usize },
    #[error("cochains live over different modules")]
    ModuleMismatch,
    #[error("cochains have degrees {0} and {1}")]
    DegreeMismatch(usize, usize),
    #[error("{0:?} is not a permutation of 0..{1}")]
    NotAPermutation(Vec<usize>, usize),
    #[error("tuple {tuple:?} is not in G^{degree}")]
    BadTuple { tuple: Vec<usize>, degree: usize },
    #[error("degree {0} cochain table is too large")]
    TooLarge(usize),
}

/// Number of tuples in `G^n`, if it fits comfortably in memory.
pub fn tuple_count(order: usize, degree: usize) -> Option<usize> {
    order
        .checked_pow(u32::try_from(degree).ok()?)
        .filter(|&n| n <= 1 << 26)
}

/// Decodes a tuple rank into its entries (first entry most significant).
pub fn decode_tuple(mut index: usize, order: usize, degree: usize) -> Vec<usize> {
    let mut tuple = vec![0; degree];
    for slot in tuple.iter_mut().rev() {
        *slot = index % order;
        index /= order;
    }
    tuple
}

pub fn encode_tuple(tuple: &[usize], order: usize) -> usize {
    tuple.iter().fold(0, |acc, &g| acc * order + g)
}

/// An adjacent transposition `(i, i+1)` of `Sigma_{n+1}`, `1 <= i <= n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transposition {
    i: usize,
}

impl Transposition {
    pub fn new(i: usize, degree: usize) -> Result<Self, CochainError> {
        if i == 0 || i > degree {
            return Err(CochainError::TranspositionOutOfRange { i, degree });
        }
        Ok(Self { i })
    }

    pub fn index(self) -> usize {
        self.i
    }

    /// All generators `(1,2), ..., (n,n+1)` acting in degree `n`.
    pub fn generators(degree: usize) -> impl Iterator<Item = Transposition> {
        (1..=degree).map(|i| Transposition { i })
    }
}

impl fmt::Display for Transposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.i + 1)
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Cochain {
    degree: usize,
    module: Arc<GModule>,
    values: Vec<u64>,
}

impl fmt::Debug for Cochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Cochain")
            .field("degree", &self.degree)
            .field("values", &self.values)
            .finish()
    }
}

impl Cochain {
    fn len_for(module: &GModule, degree: usize) -> Result<usize, CochainError> {
        tuple_count(module.group().order(), degree)
            .map(|t| t * module.rank())
            .ok_or(CochainError::TooLarge(degree))
    }

    pub fn zero(module: Arc<GModule>, degree: usize) -> Result<Self, CochainError> {
        let len = Self::len_for(&module, degree)?;
        Ok(Self {
            degree,
            module,
            values: vec![0; len],
        })
    }

    /// Builds a cochain from its flat coordinate vector (reduced mod `m`).
    pub fn from_values(
        module: Arc<GModule>,
        degree: usize,
        values: Vec<u64>,
    ) -> Result<Self, CochainError> {
        let expected = Self::len_for(&module, degree)?;
        if values.len() != expected {
            return Err(CochainError::WrongLength {
                expected,
                given: values.len(),
            });
        }
        let m = module.modulus();
        let values = values.into_iter().map(|v| v % m).collect();
        Ok(Self {
            degree,
            module,
            values,
        })
    }

    /// Builds a cochain pointwise; `f` returns the coordinates of the value.
    pub fn from_fn(
        module: Arc<GModule>,
        degree: usize,
        mut f: impl FnMut(&[usize]) -> Vec<i64>,
    ) -> Result<Self, CochainError> {
        let mut out = Self::zero(module, degree)?;
        let (order, k) = (out.group().order(), out.module.rank());
        let m = out.module.modulus() as i64;
        for t in 0..out.tuple_count() {
            let tuple = decode_tuple(t, order, degree);
            let value = f(&tuple);
            if value.len() != k {
                return Err(CochainError::WrongLength {
                    expected: k,
                    given: value.len(),
                });
            }
            for (slot, v) in out.values[t * k..(t + 1) * k].iter_mut().zip(value) {
                *slot = v.rem_euclid(m) as u64;
            }
        }
        Ok(out)
    }

    /// The cochain taking value `coords` at `tuple` and zero elsewhere.
    pub fn indicator(
        module: Arc<GModule>,
        degree: usize,
        tuple: &[usize],
        coords: &[i64],
    ) -> Result<Self, CochainError> {
        let order = module.group().order();
        if tuple.len() != degree || tuple.iter().any(|&g| g >= order) {
            return Err(CochainError::BadTuple {
                tuple: tuple.to_vec(),
                degree,
            });
        }
        let target = tuple.to_vec();
        let k = module.rank();
        Self::from_fn(module, degree, |t| {
            if t == target.as_slice() {
                coords.to_vec()
            } else {
                vec![0; k]
            }
        })
    }

    /// A cochain constant on all tuples.
    pub fn constant(module: Arc<GModule>, degree: usize, coords: &[i64]) -> Result<Self, CochainError> {
        Self::from_fn(module, degree, |_| coords.to_vec())
    }

    /// The `index`-th cochain when all of `C^n` is enumerated in base `m`.
    pub fn from_index(module: Arc<GModule>, degree: usize, mut index: u64) -> Result<Self, CochainError> {
        let mut out = Self::zero(module, degree)?;
        let m = out.module.modulus();
        for v in out.values.iter_mut().rev() {
            *v = index % m;
            index /= m;
        }
        Ok(out)
    }

    /// `|C^n|` if it fits in a `u64`.
    pub fn space_size(module: &GModule, degree: usize) -> Option<u64> {
        let len = Self::len_for(module, degree).ok()?;
        module.modulus().checked_pow(u32::try_from(len).ok()?)
    }

    pub fn random<R: Rng + ?Sized>(
        module: Arc<GModule>,
        degree: usize,
        rng: &mut R,
    ) -> Result<Self, CochainError> {
        let mut out = Self::zero(module, degree)?;
        let m = out.module.modulus();
        for v in out.values.iter_mut() {
            *v = rng.gen_range(0..m);
        }
        Ok(out)
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn module(&self) -> &Arc<GModule> {
        &self.module
    }

    pub fn group(&self) -> &FiniteGroup {
        self.module.group()
    }

    /// Flat coordinate vector.
    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn tuple_count(&self) -> usize {
        self.values.len() / self.module.rank().max(1)
    }

    #[inline]
    pub fn value(&self, tuple: &[usize]) -> &[u64] {
        let k = self.module.rank();
        let t = encode_tuple(tuple, self.group().order());
        &self.values[t * k..(t + 1) * k]
    }

    #[inline]
    fn value_at(&self, t: usize) -> &[u64] {
        let k = self.module.rank();
        &self.values[t * k..(t + 1) * k]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    fn check_compatible(&self, other: &Self) -> Result<(), CochainError> {
        if !Arc::ptr_eq(&self.module, &other.module) && self.module != other.module {
            return Err(CochainError::ModuleMismatch);
        }
        if self.degree != other.degree {
            return Err(CochainError::DegreeMismatch(self.degree, other.degree));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, CochainError> {
        self.check_compatible(other)?;
        let m = self.module.modulus();
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a + b) % m)
            .collect();
        Ok(self.with_values(values))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, CochainError> {
        self.check_compatible(other)?;
        let m = self.module.modulus();
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a + m - b) % m)
            .collect();
        Ok(self.with_values(values))
    }

    pub fn neg(&self) -> Self {
        let m = self.module.modulus();
        self.with_values(self.values.iter().map(|&a| (m - a) % m).collect())
    }

    pub fn scale(&self, c: i64) -> Self {
        let m = self.module.modulus();
        let c = c.rem_euclid(m as i64) as u64;
        self.with_values(self.values.iter().map(|&a| a * c % m).collect())
    }

    fn with_values(&self, values: Vec<u64>) -> Self {
        Self {
            degree: self.degree,
            module: self.module.clone(),
            values,
        }
    }

    /// `d^j`: degree `n` to degree `n+1`, `0 <= j <= n+1`.
    pub fn face_map(&self, j: usize) -> Result<Self, CochainError> {
        let n = self.degree;
        if j > n + 1 {
            return Err(CochainError::FaceOutOfRange { j, degree: n });
        }
        let group = self.group();
        let order = group.order();
        let k = self.module.rank();
        let mut out = Self::zero(self.module.clone(), n + 1)?;
        let mut src = vec![0; n];
        for t in 0..out.tuple_count() {
            let g = decode_tuple(t, order, n + 1);
            let slot = &mut out.values[t * k..(t + 1) * k];
            if j == 0 {
                src.copy_from_slice(&g[1..]);
                let v = self.value(&src);
                self.module.act_into(g[0], v, slot);
            } else {
                src.clear();
                src.extend_from_slice(&g[..j - 1]);
                if j <= n {
                    src.push(group.mul(g[j - 1], g[j]));
                    src.extend_from_slice(&g[j + 1..]);
                }
                src.truncate(n);
                slot.copy_from_slice(self.value(&src));
            }
        }
        Ok(out)
    }

    /// The coboundary `∂σ = Σ_j (-1)^j d^j σ`.
    pub fn differential(&self) -> Self {
        let n = self.degree;
        let group = self.group();
        let order = group.order();
        let k = self.module.rank();
        let m = self.module.modulus();
        let mut out = Self::zero(self.module.clone(), n + 1).expect("degree n+1 fits");
        let mut src = vec![0; n];
        let mut acted = vec![0; k];
        for t in 0..out.tuple_count() {
            let g = decode_tuple(t, order, n + 1);
            let mut acc = vec![0u64; k];
            // d^0
            src.copy_from_slice(&g[1..]);
            self.module.act_into(g[0], self.value(&src), &mut acted);
            for (a, v) in acc.iter_mut().zip(&acted) {
                *a = (*a + v) % m;
            }
            for j in 1..=n + 1 {
                src.clear();
                src.extend_from_slice(&g[..j - 1]);
                if j <= n {
                    src.push(group.mul(g[j - 1], g[j]));
                    src.extend_from_slice(&g[j + 1..]);
                }
                src.truncate(n);
                let v = self.value(&src);
                for (a, x) in acc.iter_mut().zip(v) {
                    *a = if j % 2 == 0 { (*a + x) % m } else { (*a + m - x) % m };
                }
            }
            out.values[t * k..(t + 1) * k].copy_from_slice(&acc);
        }
        out
    }

    /// `(i, i+1) . σ`:
    ///
    /// * `i = 1`: `-g_1 σ(g_1^-1, g_1 g_2, g_3, ...)`
    /// * `i > 1`: `-σ(..., g_{i-1} g_i, g_i^-1, g_i g_{i+1}, ...)`, where
    ///   the last substitution is dropped when `i = n`.
    pub fn transposition_action(&self, t: Transposition) -> Result<Self, CochainError> {
        let n = self.degree;
        let i = t.index();
        if i == 0 || i > n {
            return Err(CochainError::TranspositionOutOfRange { i, degree: n });
        }
        let group = self.group();
        let order = group.order();
        let k = self.module.rank();
        let m = self.module.modulus();
        let mut out = self.with_values(vec![0; self.values.len()]);
        let mut src = vec![0; n];
        let mut acted = vec![0; k];
        for idx in 0..self.tuple_count() {
            let g = decode_tuple(idx, order, n);
            src.copy_from_slice(&g);
            let slot = &mut out.values[idx * k..(idx + 1) * k];
            if i == 1 {
                src[0] = group.inv(g[0]);
                if n >= 2 {
                    src[1] = group.mul(g[0], g[1]);
                }
                self.module.act_into(g[0], self.value(&src), &mut acted);
            } else {
                src[i - 2] = group.mul(g[i - 2], g[i - 1]);
                src[i - 1] = group.inv(g[i - 1]);
                if i < n {
                    src[i] = group.mul(g[i - 1], g[i]);
                }
                acted.copy_from_slice(self.value(&src));
            }
            for (s, v) in slot.iter_mut().zip(&acted) {
                *s = (m - v) % m;
            }
        }
        Ok(out)
    }

    /// Action of a permutation of `n+1` letters, given in 0-based one-line
    /// notation. The permutation is bubble-sorted into adjacent
    /// transpositions, which are then applied right to left.
    pub fn permutation_action(&self, perm: &[usize]) -> Result<Self, CochainError> {
        let word = adjacent_word(perm, self.degree + 1)?;
        let mut out = self.clone();
        for t in word {
            out = out.transposition_action(Transposition { i: t })?;
        }
        Ok(out)
    }

    pub fn is_symmetric(&self) -> bool {
        Transposition::generators(self.degree).all(|t| {
            self.transposition_action(t)
                .map(|s| s == *self)
                .unwrap_or(false)
        })
    }

    pub fn is_cocycle(&self) -> bool {
        self.differential().is_zero()
    }

    /// `Σ_{π ∈ Σ_{n+1}} π.σ`, always a symmetric cochain.
    pub fn symmetrize(&self) -> Self {
        let n = self.degree;
        // breadth-first walk over Sigma_{n+1} via adjacent transpositions
        let mut seen = std::collections::HashSet::new();
        let start: Vec<usize> = (0..=n).collect();
        seen.insert(start.clone());
        let mut frontier = vec![(start, self.clone())];
        let mut total = self.clone();
        while let Some((perm, image)) = frontier.pop() {
            for t in Transposition::generators(n) {
                // s_t ∘ perm: swap the values t-1 and t
                let next: Vec<usize> = perm
                    .iter()
                    .map(|&x| match x {
                        x if x == t.i - 1 => t.i,
                        x if x == t.i => t.i - 1,
                        x => x,
                    })
                    .collect();
                if seen.insert(next.clone()) {
                    let acted = image.transposition_action(t).expect("in range");
                    total = total.add(&acted).expect("same module");
                    frontier.push((next, acted));
                }
            }
        }
        total
    }

    /// Entries as `(tuple, coordinates)` pairs in tuple order.
    pub fn entries(&self) -> impl Iterator<Item = (Vec<usize>, &[u64])> + '_ {
        let order = self.group().order();
        (0..self.tuple_count()).map(move |t| (decode_tuple(t, order, self.degree), self.value_at(t)))
    }
}

/// Adjacent transpositions `i` (meaning `(i,i+1)`, 1-based) whose product,
/// applied first-to-last, realises `perm`.
pub fn adjacent_word(perm: &[usize], letters: usize) -> Result<Vec<usize>, CochainError> {
    let mut seen = vec![false; letters];
    if perm.len() != letters
        || perm
            .iter()
            .any(|&x| x >= letters || std::mem::replace(&mut seen[x], true))
    {
        return Err(CochainError::NotAPermutation(perm.to_vec(), letters));
    }
    let mut w = perm.to_vec();
    let mut word = Vec::new();
    loop {
        let mut swapped = false;
        for p in 0..letters.saturating_sub(1) {
            if w[p] > w[p + 1] {
                w.swap(p, p + 1);
                word.push(p + 1);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
    Ok(word)
}
