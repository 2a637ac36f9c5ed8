//! Dense integer matrices and exact rank computations over `Q` and `Z/p`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::augment::RingDesc;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        IntMatrix { rows, cols, data }
    }

    /// Panics if the rows have different lengths.
    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        IntMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j].clone().into())
    }

    pub fn diagonal(entries: &[BigInt]) -> Self {
        let n = entries.len();
        IntMatrix::from_fn(n, n, |i, j| if i == j { entries[i].clone() } else { BigInt::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> IntMatrix {
        IntMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Panics on a shape mismatch.
    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "shape mismatch in product");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * &v[j]).sum())
            .collect()
    }

    /// Entrywise reduction into `0..m`.
    pub fn reduce_mod(&self, m: u64) -> IntMatrix {
        let m = BigInt::from(m);
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.mod_floor(&m)).collect(),
        }
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// `row[dst] += k * row[src]`
    pub(crate) fn add_row_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = self.get(src, j) * k;
            self.data[dst * self.cols + j] += v;
        }
    }

    /// `col[dst] += k * col[src]`
    pub(crate) fn add_col_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = self.get(i, src) * k;
            self.data[i * self.cols + dst] += v;
        }
    }

    pub(crate) fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j);
            self.set(i, j, v);
        }
    }

    /// Determinant by fraction-free (Bareiss) elimination. Panics unless
    /// square.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a.get(k, k).is_zero() {
                match (k + 1..n).find(|&i| !a.get(i, k).is_zero()) {
                    Some(i) => {
                        a.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                    a.set(i, j, v);
                }
            }
            prev = a.get(k, k).clone();
        }
        sign * a.get(n - 1, n - 1)
    }

    /// Rank over `Q`.
    pub fn rank_rational(&self) -> usize {
        let mut a = self.clone();
        let mut rank = 0;
        for col in 0..a.cols {
            let Some(p) = (rank..a.rows).find(|&i| !a.get(i, col).is_zero()) else {
                continue;
            };
            a.swap_rows(p, rank);
            let pivot = a.get(rank, col).clone();
            for i in rank + 1..a.rows {
                let x = a.get(i, col).clone();
                if x.is_zero() {
                    continue;
                }
                let mut g = BigInt::zero();
                for j in 0..a.cols {
                    let v = a.get(i, j) * &pivot - &x * a.get(rank, j);
                    g = g.gcd(&v);
                    a.set(i, j, v);
                }
                if g > BigInt::one() {
                    for j in 0..a.cols {
                        let v = a.get(i, j) / &g;
                        a.set(i, j, v);
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    fn to_mod_p(&self, p: u64) -> Vec<Vec<u64>> {
        let pb = BigInt::from(p);
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.get(i, j).mod_floor(&pb).to_u64().expect("reduced mod p"))
                    .collect()
            })
            .collect()
    }

    /// Rank over `Z/p`, `p` prime.
    pub fn rank_mod_p(&self, p: u64) -> usize {
        row_echelon_mod_p(&mut self.to_mod_p(p), p).len()
    }

    /// Basis of the kernel over `Z/p`, entries in `0..p`.
    pub fn nullspace_mod_p(&self, p: u64) -> Vec<Vec<u64>> {
        let mut a = self.to_mod_p(p);
        let pivots = row_echelon_mod_p(&mut a, p);
        reduce_upward(&mut a, &pivots, p);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![0u64; self.cols];
                v[f] = 1;
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = (p - a[row][f] % p) % p;
                }
                v
            })
            .collect()
    }

    /// Rank over a field ring descriptor.
    pub fn rank_over(&self, field: RingDesc) -> Result<usize> {
        match field {
            RingDesc::Rationals => Ok(self.rank_rational()),
            RingDesc::Mod(p) if field.is_field() => Ok(self.rank_mod_p(p)),
            other => Err(Error::FieldRequired(other)),
        }
    }
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // p prime, a != 0 mod p
    pow_mod(a, p - 2, p)
}

fn pow_mod(b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u128;
    let mut base = u128::from(b % p);
    let m = u128::from(p);
    while e > 0 {
        if e & 1 == 1 {
            r = r * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    r as u64
}

/// Gauss-Jordan to row echelon form with unit pivots; returns pivot columns.
fn row_echelon_mod_p(a: &mut [Vec<u64>], p: u64) -> Vec<usize> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let m = u128::from(p);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !a[i][c].is_multiple_of(p)) else {
            continue;
        };
        a.swap(pr, r);
        let inv = u128::from(inv_mod(a[r][c], p));
        for x in a[r].iter_mut() {
            *x = (u128::from(*x) * inv % m) as u64;
        }
        for i in r + 1..rows {
            let f = u128::from(a[i][c]);
            if f == 0 {
                continue;
            }
            let pivot = a[r].clone();
            for (x, &y) in a[i].iter_mut().zip(&pivot) {
                let sub = f * u128::from(y) % m;
                *x = ((u128::from(*x) + m - sub) % m) as u64;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

fn reduce_upward(a: &mut [Vec<u64>], pivots: &[usize], p: u64) {
    let m = u128::from(p);
    for (r, &c) in pivots.iter().enumerate().rev() {
        for i in 0..r {
            let f = u128::from(a[i][c]);
            if f == 0 {
                continue;
            }
            let pivot = a[r].clone();
            for (x, &y) in a[i].iter_mut().zip(&pivot) {
                let sub = f * u128::from(y) % m;
                *x = ((u128::from(*x) + m - sub) % m) as u64;
            }
        }
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}
