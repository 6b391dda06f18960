//! Dense linear algebra over `Z/m`.
//!
//! Matrices are diagonalised by invertible row and column operations
//! (`U A V = D`), which is the Smith normal form computation for the
//! integer lift `[A; m I]` carried out with all entries reduced mod `m`.
//! Submodules of `(Z/m)^N` are kept in the form
//! `{ x : (W x)_i ∈ c_i Z/m }` with `W` invertible and `c_i | m`.

use std::fmt;

use num_integer::Integer;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModularError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("modulus must be at least 2 and at most 2^31")]
    BadModulus,
    #[error("moduli differ ({0} vs {1})")]
    ModulusMismatch(u64, u64),
    #[error("quotient taken by a module that is not a submodule")]
    NotContained,
}

/// Extended gcd on non-negative integers: `(g, x, y)` with `a x + b y = g`.
pub fn egcd(a: i128, b: i128) -> (i128, i128, i128) {
    let e = a.extended_gcd(&b);
    (e.gcd, e.x, e.y)
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (g, x, _) = egcd(a as i128, m as i128);
    (g == 1).then(|| x.rem_euclid(m as i128) as u64)
}

fn reduce(v: i128, m: u64) -> u64 {
    v.rem_euclid(m as i128) as u64
}

#[derive(Clone, PartialEq, Eq)]
pub struct ModMatrix {
    rows: usize,
    cols: usize,
    modulus: u64,
    data: Vec<u64>,
}

impl fmt::Debug for ModMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ModMatrix {}x{} mod {}", self.rows, self.cols, self.modulus)?;
        for r in 0..self.rows.min(12) {
            writeln!(f, "  {:?}", &self.row(r)[..self.cols.min(16)])?;
        }
        Ok(())
    }
}

impl ModMatrix {
    pub fn zeros(rows: usize, cols: usize, modulus: u64) -> Self {
        Self {
            rows,
            cols,
            modulus,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize, modulus: u64) -> Self {
        let mut out = Self::zeros(n, n, modulus);
        for i in 0..n {
            out.data[i * n + i] = 1 % modulus;
        }
        out
    }

    pub fn from_rows(rows: &[Vec<i64>], modulus: u64) -> Result<Self, ModularError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(ModularError::Shape("ragged rows".into()));
        }
        let data = rows
            .iter()
            .flatten()
            .map(|&v| reduce(v as i128, modulus))
            .collect();
        Ok(Self {
            rows: rows.len(),
            cols,
            modulus,
            data,
        })
    }

    /// Wraps row-major data (entries reduced mod `m`).
    pub fn from_raw(rows: usize, cols: usize, modulus: u64, data: Vec<u64>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length");
        let data = data.into_iter().map(|v| v % modulus).collect();
        Self {
            rows,
            cols,
            modulus,
            data,
        }
    }

    /// Builds a matrix whose columns are the given vectors (each of length `rows`).
    pub fn from_columns(rows: usize, columns: &[Vec<u64>], modulus: u64) -> Self {
        let mut out = Self::zeros(rows, columns.len(), modulus);
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length");
            for (i, &v) in col.iter().enumerate() {
                out.data[i * out.cols + j] = v % modulus;
            }
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = v % self.modulus;
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows, self.modulus);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.get(r, c);
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self, ModularError> {
        if self.modulus != other.modulus {
            return Err(ModularError::ModulusMismatch(self.modulus, other.modulus));
        }
        if self.cols != other.rows {
            return Err(ModularError::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let m = self.modulus;
        let mut out = Self::zeros(self.rows, other.cols, m);
        for r in 0..self.rows {
            let acc = &mut out.data[r * other.cols..(r + 1) * other.cols];
            for (k, &a) in self.row(r).iter().enumerate() {
                if a == 0 {
                    continue;
                }
                for (o, &b) in acc.iter_mut().zip(other.row(k)) {
                    *o = (*o + a * b) % m;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[u64]) -> Vec<u64> {
        assert_eq!(x.len(), self.cols, "vector length");
        let m = self.modulus;
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(x)
                    .fold(0, |acc, (&a, &b)| (acc + a * b) % m)
            })
            .collect()
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &Self) -> Result<Self, ModularError> {
        if self.cols != other.cols {
            return Err(ModularError::Shape("vstack column count".into()));
        }
        if self.modulus != other.modulus {
            return Err(ModularError::ModulusMismatch(self.modulus, other.modulus));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Self {
            rows: self.rows + other.rows,
            cols: self.cols,
            modulus: self.modulus,
            data,
        })
    }

    pub fn diagonalize(&self, track_left: bool, track_right: bool) -> Diagonalization {
        Reducer::new(self.clone(), track_left, track_right).run()
    }
}

/// `U A V = D` with `D` diagonal. `U`/`U^-1` are present when left
/// tracking was requested, `V`/`V^-1` for right tracking.
#[derive(Debug, Clone)]
pub struct Diagonalization {
    pub diagonal: Vec<u64>,
    pub rows: usize,
    pub cols: usize,
    pub u: Option<ModMatrix>,
    pub u_inv: Option<ModMatrix>,
    pub v: Option<ModMatrix>,
    pub v_inv: Option<ModMatrix>,
}

struct Reducer {
    a: ModMatrix,
    u: Option<ModMatrix>,
    u_inv: Option<ModMatrix>,
    v: Option<ModMatrix>,
    v_inv: Option<ModMatrix>,
}

fn row_apply(mat: &mut ModMatrix, r: usize, i: usize, k: [[u64; 2]; 2], from: usize) {
    let m = mat.modulus;
    let cols = mat.cols;
    for c in from..cols {
        let x = mat.data[r * cols + c];
        let y = mat.data[i * cols + c];
        if x == 0 && y == 0 {
            continue;
        }
        mat.data[r * cols + c] = (k[0][0] * x + k[0][1] * y) % m;
        mat.data[i * cols + c] = (k[1][0] * x + k[1][1] * y) % m;
    }
}

fn col_apply(mat: &mut ModMatrix, r: usize, j: usize, k: [[u64; 2]; 2], from: usize) {
    let m = mat.modulus;
    let cols = mat.cols;
    for row in from..mat.rows {
        let x = mat.data[row * cols + r];
        let y = mat.data[row * cols + j];
        if x == 0 && y == 0 {
            continue;
        }
        mat.data[row * cols + r] = (x * k[0][0] + y * k[1][0]) % m;
        mat.data[row * cols + j] = (x * k[0][1] + y * k[1][1]) % m;
    }
}

fn inverse2(k: [[u64; 2]; 2], m: u64) -> [[u64; 2]; 2] {
    // determinant is 1
    [[k[1][1], (m - k[0][1]) % m], [(m - k[1][0]) % m, k[0][0]]]
}

fn swap_rows(mat: &mut ModMatrix, a: usize, b: usize) {
    if a != b {
        for c in 0..mat.cols {
            mat.data.swap(a * mat.cols + c, b * mat.cols + c);
        }
    }
}

fn swap_cols(mat: &mut ModMatrix, a: usize, b: usize) {
    if a != b {
        for r in 0..mat.rows {
            mat.data.swap(r * mat.cols + a, r * mat.cols + b);
        }
    }
}

/// A unit `u` with `p ≡ gcd(p, m) u (mod m)`.
fn unit_part(p: u64, m: u64) -> u64 {
    let d = p.gcd(&m);
    let (p1, m1) = (p / d, m / d);
    let mut u = p1 % m1.max(1);
    if m1 == 1 {
        u = 1;
    }
    while u.gcd(&m) != 1 {
        u += m1;
    }
    u % m
}

impl Reducer {
    fn new(a: ModMatrix, track_left: bool, track_right: bool) -> Self {
        let m = a.modulus;
        let (r, c) = (a.rows, a.cols);
        Self {
            u: track_left.then(|| ModMatrix::identity(r, m)),
            u_inv: track_left.then(|| ModMatrix::identity(r, m)),
            v: track_right.then(|| ModMatrix::identity(c, m)),
            v_inv: track_right.then(|| ModMatrix::identity(c, m)),
            a,
        }
    }

    fn row_op(&mut self, r: usize, i: usize, k: [[u64; 2]; 2], from: usize) {
        row_apply(&mut self.a, r, i, k, from);
        if let Some(u) = self.u.as_mut() {
            row_apply(u, r, i, k, 0);
        }
        if let Some(ui) = self.u_inv.as_mut() {
            col_apply(ui, r, i, inverse2(k, self.a.modulus), 0);
        }
    }

    fn col_op(&mut self, r: usize, j: usize, k: [[u64; 2]; 2], from: usize) {
        col_apply(&mut self.a, r, j, k, from);
        if let Some(v) = self.v.as_mut() {
            col_apply(v, r, j, k, 0);
        }
        if let Some(vi) = self.v_inv.as_mut() {
            row_apply(vi, r, j, inverse2(k, self.a.modulus), 0);
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        swap_rows(&mut self.a, a, b);
        if let Some(u) = self.u.as_mut() {
            swap_rows(u, a, b);
        }
        if let Some(ui) = self.u_inv.as_mut() {
            swap_cols(ui, a, b);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        swap_cols(&mut self.a, a, b);
        if let Some(v) = self.v.as_mut() {
            swap_cols(v, a, b);
        }
        if let Some(vi) = self.v_inv.as_mut() {
            swap_rows(vi, a, b);
        }
    }

    fn scale_row(&mut self, t: usize, unit: u64) {
        let m = self.a.modulus;
        let inv = mod_inverse(unit, m).expect("unit");
        let cols = self.a.cols;
        for c in t..cols {
            let v = &mut self.a.data[t * cols + c];
            *v = *v * inv % m;
        }
        if let Some(u) = self.u.as_mut() {
            let cols = u.cols;
            for v in &mut u.data[t * cols..(t + 1) * cols] {
                *v = *v * inv % m;
            }
        }
        if let Some(ui) = self.u_inv.as_mut() {
            let cols = ui.cols;
            for r in 0..ui.rows {
                let v = &mut ui.data[r * cols + t];
                *v = *v * unit % m;
            }
        }
    }

    /// 2x2 transform killing `a` against pivot `p` (both as integers in `[0, m)`).
    fn killer(p: u64, a: u64, m: u64) -> [[u64; 2]; 2] {
        if a.is_multiple_of(p) {
            let q = a / p;
            [[1, 0], [(m - q % m) % m, 1]]
        } else {
            let (g, x, y) = egcd(p as i128, a as i128);
            [
                [reduce(x, m), reduce(y, m)],
                [reduce(-(a as i128 / g), m), reduce(p as i128 / g, m)],
            ]
        }
    }

    fn run(mut self) -> Diagonalization {
        let m = self.a.modulus;
        let (rows, cols) = (self.a.rows, self.a.cols);
        let mut t = 0;
        while t < rows.min(cols) {
            // pivot of minimal ideal
            let mut best: Option<(u64, u64, usize, usize)> = None;
            'search: for r in t..rows {
                for c in t..cols {
                    let v = self.a.get(r, c);
                    if v != 0 {
                        let key = (v.gcd(&m), v, r, c);
                        if best.is_none_or(|b| (key.0, key.1) < (b.0, b.1)) {
                            best = Some(key);
                            if key.0 == 1 && key.1 == 1 {
                                break 'search;
                            }
                        }
                    }
                }
            }
            let Some((_, _, pr, pc)) = best else { break };
            self.swap_rows(t, pr);
            self.swap_cols(t, pc);
            loop {
                let p = self.a.get(t, t);
                let unit = unit_part(p, m);
                if unit != 1 {
                    self.scale_row(t, unit);
                }
                for i in t + 1..rows {
                    let a = self.a.get(i, t);
                    if a != 0 {
                        let p = self.a.get(t, t);
                        let k = Self::killer(p, a, m);
                        self.row_op(t, i, k, t);
                    }
                }
                for j in t + 1..cols {
                    let a = self.a.get(t, j);
                    if a != 0 {
                        let p = self.a.get(t, t);
                        let k = Self::killer(p, a, m);
                        // column form: new col_t = x col_t + y col_j
                        let n = [[k[0][0], k[1][0]], [k[0][1], k[1][1]]];
                        self.col_op(t, j, n, t);
                    }
                }
                if (t + 1..rows).all(|i| self.a.get(i, t) == 0) {
                    break;
                }
            }
            t += 1;
        }
        let diagonal = (0..rows.min(cols)).map(|i| self.a.get(i, i)).collect();
        Diagonalization {
            diagonal,
            rows,
            cols,
            u: self.u,
            u_inv: self.u_inv,
            v: self.v,
            v_inv: self.v_inv,
        }
    }
}

/// A submodule `{ x ∈ (Z/m)^N : (W x)_i ∈ c_i Z/m }`.
#[derive(Debug, Clone)]
pub struct Submodule {
    modulus: u64,
    w: ModMatrix,
    w_inv: ModMatrix,
    divisors: Vec<u64>,
}

impl Submodule {
    pub fn whole(n: usize, modulus: u64) -> Self {
        Self {
            modulus,
            w: ModMatrix::identity(n, modulus),
            w_inv: ModMatrix::identity(n, modulus),
            divisors: vec![1; n],
        }
    }

    /// `{ x : A x = 0 }` inside `(Z/m)^cols`.
    pub fn kernel(a: &ModMatrix) -> Self {
        let m = a.modulus;
        let d = a.diagonalize(false, true);
        let divisors = (0..a.cols)
            .map(|i| match d.diagonal.get(i) {
                Some(&s) => m / s.gcd(&m),
                None => 1,
            })
            .collect();
        Self {
            modulus: m,
            w: d.v_inv.expect("tracked"),
            w_inv: d.v.expect("tracked"),
            divisors,
        }
    }

    /// Span of the columns of `g` inside `(Z/m)^rows`.
    pub fn image(g: &ModMatrix) -> Self {
        let m = g.modulus;
        let d = g.diagonalize(true, false);
        let divisors = (0..g.rows)
            .map(|i| match d.diagonal.get(i) {
                Some(&s) => s.gcd(&m),
                None => m,
            })
            .collect();
        Self {
            modulus: m,
            w: d.u.expect("tracked"),
            w_inv: d.u_inv.expect("tracked"),
            divisors,
        }
    }

    pub fn span(ambient: usize, vectors: &[Vec<u64>], modulus: u64) -> Self {
        Self::image(&ModMatrix::from_columns(ambient, vectors, modulus))
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn ambient_dim(&self) -> usize {
        self.divisors.len()
    }

    pub fn contains(&self, x: &[u64]) -> bool {
        self.w
            .mul_vec(x)
            .iter()
            .zip(&self.divisors)
            .all(|(v, c)| v % c == 0)
    }

    /// Independent generators with their additive orders (order ≥ 2 only).
    pub fn basis(&self) -> Vec<(Vec<u64>, u64)> {
        let m = self.modulus;
        self.divisors
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != m)
            .map(|(i, &c)| {
                let v = self.w_inv.column(i).into_iter().map(|x| x * c % m).collect();
                (v, m / c)
            })
            .collect()
    }

    /// Orders of the cyclic summands (not normalised).
    pub fn cyclic_orders(&self) -> Vec<u64> {
        let m = self.modulus;
        self.divisors
            .iter()
            .filter(|&&c| c != m)
            .map(|&c| m / c)
            .collect()
    }

    /// Coordinates of `x` against [`Submodule::basis`], if `x` lies here.
    pub fn coordinates(&self, x: &[u64]) -> Option<Vec<u64>> {
        let m = self.modulus;
        let wx = self.w.mul_vec(x);
        let mut out = Vec::new();
        for (v, &c) in wx.iter().zip(&self.divisors) {
            if v % c != 0 {
                return None;
            }
            if c != m {
                out.push(v / c % (m / c));
            }
        }
        Some(out)
    }

    /// Rows `E` with `x ∈ self ⇔ E x = 0`.
    pub fn equations(&self) -> ModMatrix {
        let m = self.modulus;
        let n = self.ambient_dim();
        let keep: Vec<usize> = (0..n).filter(|&i| self.divisors[i] != 1).collect();
        let mut e = ModMatrix::zeros(keep.len(), n, m);
        for (r, &i) in keep.iter().enumerate() {
            let f = m / self.divisors[i];
            for c in 0..n {
                e.set(r, c, self.w.get(i, c) * f % m);
            }
        }
        e
    }

    pub fn intersect(&self, other: &Self) -> Result<Self, ModularError> {
        if self.ambient_dim() != other.ambient_dim() {
            return Err(ModularError::Shape("ambient dimensions differ".into()));
        }
        let mut e = self.equations().vstack(&other.equations())?;
        if e.rows == 0 {
            e = ModMatrix::zeros(1, self.ambient_dim(), self.modulus);
        }
        Ok(Self::kernel(&e))
    }

    /// Cyclic orders of `self / sub`, not normalised.
    pub fn quotient(&self, sub: &Self) -> Result<Vec<u64>, ModularError> {
        let m = self.modulus;
        let orders = self.cyclic_orders();
        let r = orders.len();
        let mut rel: Vec<Vec<i64>> = Vec::new();
        for (i, &o) in orders.iter().enumerate() {
            let mut row = vec![0i64; r];
            row[i] = (o % m) as i64;
            rel.push(row);
        }
        for (g, _) in sub.basis() {
            let t = self.coordinates(&g).ok_or(ModularError::NotContained)?;
            rel.push(t.into_iter().map(|v| v as i64).collect());
        }
        if r == 0 {
            return Ok(Vec::new());
        }
        let mat = ModMatrix::from_rows(&rel, m)?;
        let d = mat.diagonalize(false, false);
        let mut out: Vec<u64> = d.diagonal.iter().map(|&s| s.gcd(&m)).collect();
        out.extend(std::iter::repeat_n(m, r.saturating_sub(d.diagonal.len())));
        out.retain(|&o| o != 1);
        Ok(out)
    }
}

/// Solves `A x = b` over `Z/m`, returning some solution if one exists.
pub fn solve(a: &ModMatrix, b: &[u64]) -> Option<Vec<u64>> {
    let m = a.modulus;
    assert_eq!(b.len(), a.rows, "right-hand side length");
    let d = a.diagonalize(true, true);
    let u = d.u.as_ref().expect("tracked");
    let v = d.v.as_ref().expect("tracked");
    let ub = u.mul_vec(b);
    let mut y = vec![0u64; a.cols];
    for (i, &rhs) in ub.iter().enumerate() {
        match d.diagonal.get(i) {
            Some(&s) => {
                let g = s.gcd(&m);
                if rhs % g != 0 {
                    return None;
                }
                let mg = m / g;
                let inv = if mg == 1 { 0 } else { mod_inverse((s / g) % mg, mg)? };
                y[i] = (rhs / g) % mg * inv % mg;
            }
            None => {
                if rhs != 0 {
                    return None;
                }
            }
        }
    }
    let x = v.mul_vec(&y);
    (a.mul_vec(&x) == b).then_some(x)
}

/// Groups cyclic orders into the invariant-factor chain `d_1 | d_2 | ...`.
pub fn invariant_factors(orders: &[u64]) -> Vec<u64> {
    use std::collections::BTreeMap;
    let mut by_prime: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for &o in orders {
        let mut n = o;
        let mut p = 2;
        while p * p <= n {
            if n % p == 0 {
                let mut q = 1;
                while n % p == 0 {
                    n /= p;
                    q *= p;
                }
                by_prime.entry(p).or_default().push(q);
            }
            p += 1;
        }
        if n > 1 {
            by_prime.entry(n).or_default().push(n);
        }
    }
    let len = by_prime.values().map(Vec::len).max().unwrap_or(0);
    let mut out = vec![1u64; len];
    for powers in by_prime.values_mut() {
        powers.sort_unstable();
        // largest powers go to the last factors
        for (k, &q) in powers.iter().rev().enumerate() {
            out[len - 1 - k] *= q;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_kernel_size(a: &ModMatrix) -> usize {
        let m = a.modulus();
        let n = a.cols();
        let total = (m as usize).pow(n as u32);
        (0..total)
            .filter(|&idx| {
                let mut x = vec![0u64; n];
                let mut k = idx;
                for v in x.iter_mut() {
                    *v = (k % m as usize) as u64;
                    k /= m as usize;
                }
                a.mul_vec(&x).iter().all(|&v| v == 0)
            })
            .count()
    }

    fn brute_image(g: &ModMatrix) -> std::collections::HashSet<Vec<u64>> {
        let m = g.modulus() as usize;
        let q = g.cols();
        (0..m.pow(q as u32))
            .map(|idx| {
                let mut z = vec![0u64; q];
                let mut k = idx;
                for v in z.iter_mut() {
                    *v = (k % m) as u64;
                    k /= m;
                }
                g.mul_vec(&z)
            })
            .collect()
    }

    fn matrix_strategy() -> impl Strategy<Value = ModMatrix> {
        (prop::sample::select(vec![2u64, 3, 4, 6, 8, 9, 12]), 1usize..4, 1usize..4).prop_flat_map(
            |(m, r, c)| {
                prop::collection::vec(0..m as i64, r * c).prop_map(move |v| {
                    let rows: Vec<Vec<i64>> = v.chunks(c).map(<[i64]>::to_vec).collect();
                    ModMatrix::from_rows(&rows, m).unwrap()
                })
            },
        )
    }

    #[test]
    fn invariant_factor_examples() {
        assert_eq!(invariant_factors(&[2, 3]), vec![6]);
        assert_eq!(invariant_factors(&[2, 2]), vec![2, 2]);
        assert_eq!(invariant_factors(&[4, 6]), vec![2, 12]);
        assert_eq!(invariant_factors(&[]), Vec::<u64>::new());
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(mod_inverse(3, 7), Some(5));
        assert_eq!(mod_inverse(2, 4), None);
    }

    #[test]
    fn diagonalization_of_zero_divisor_matrix() {
        let a = ModMatrix::from_rows(&[vec![2, 3], vec![4, 0]], 6).unwrap();
        let d = a.diagonalize(true, true);
        let u = d.u.unwrap();
        let v = d.v.unwrap();
        let prod = u.mul(&a).unwrap().mul(&v).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                if r != c {
                    assert_eq!(prod.get(r, c), 0);
                } else {
                    assert_eq!(prod.get(r, c), d.diagonal[r]);
                }
            }
        }
    }

    #[test]
    fn quotient_example() {
        // Z/4 ⊃ 2Z/4, quotient Z/2
        let whole = Submodule::whole(1, 4);
        let half = Submodule::span(1, &[vec![2]], 4);
        assert_eq!(whole.quotient(&half).unwrap(), vec![2]);
        assert_eq!(half.cyclic_orders(), vec![2]);
        assert_eq!(half.quotient(&whole), Err(ModularError::NotContained));
    }

    proptest! {
        #[test]
        fn transforms_diagonalize(a in matrix_strategy()) {
            let d = a.diagonalize(true, true);
            let (u, ui, v, vi) = (d.u.unwrap(), d.u_inv.unwrap(), d.v.unwrap(), d.v_inv.unwrap());
            let m = a.modulus();
            prop_assert_eq!(u.mul(&ui).unwrap(), ModMatrix::identity(a.rows(), m));
            prop_assert_eq!(v.mul(&vi).unwrap(), ModMatrix::identity(a.cols(), m));
            let prod = u.mul(&a).unwrap().mul(&v).unwrap();
            for r in 0..a.rows() {
                for c in 0..a.cols() {
                    let want = if r == c { d.diagonal[r] } else { 0 };
                    prop_assert_eq!(prod.get(r, c), want);
                }
            }
        }

        #[test]
        fn kernel_matches_enumeration(a in matrix_strategy()) {
            let k = Submodule::kernel(&a);
            let size: u64 = k.cyclic_orders().iter().product();
            prop_assert_eq!(size as usize, brute_kernel_size(&a));
            for (g, _) in k.basis() {
                prop_assert!(a.mul_vec(&g).iter().all(|&v| v == 0));
            }
        }

        #[test]
        fn image_matches_enumeration(g in matrix_strategy()) {
            let img = Submodule::image(&g);
            let brute = brute_image(&g);
            let size: u64 = img.cyclic_orders().iter().product();
            prop_assert_eq!(size as usize, brute.len());
            for x in &brute {
                prop_assert!(img.contains(x));
            }
        }

        #[test]
        fn solve_finds_preimages(a in matrix_strategy(), seed in 0u64..1000) {
            let m = a.modulus();
            let x0: Vec<u64> = (0..a.cols()).map(|i| (seed / (i as u64 + 1)) % m).collect();
            let b = a.mul_vec(&x0);
            let x = solve(&a, &b).expect("solvable by construction");
            prop_assert_eq!(a.mul_vec(&x), b);
        }

        #[test]
        fn quotient_order(a in matrix_strategy()) {
            // image of A^T A inside image of A^T
            let at = a.transpose();
            let big = Submodule::image(&at);
            let small = Submodule::image(&at.mul(&a).unwrap());
            let q = big.quotient(&small).unwrap();
            let qo: u64 = q.iter().product();
            let bo: u64 = big.cyclic_orders().iter().product();
            let so: u64 = small.cyclic_orders().iter().product();
            prop_assert_eq!(qo * so, bo);
        }
    }
}
