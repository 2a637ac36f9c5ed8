//! Oracles shared by the integration tests. Nothing here calls the Smith
//! normal form or the linearization code under test.

#![allow(dead_code)]

use rand::Rng;

/// Determinant by fraction-free elimination in `i128`. Entries of the
/// matrices used here are small enough that no intermediate overflows.
pub fn det_i128(mut a: Vec<Vec<i128>>) -> i128 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// Greatest common divisor of all `k x k` minors; stops early at 1.
pub fn minor_gcd(m: &[Vec<i64>], k: usize) -> i128 {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut g = 0i128;
    let col_sets = combinations(cols, k);
    for rs in combinations(rows, k) {
        for cs in &col_sets {
            let sub: Vec<Vec<i128>> = rs
                .iter()
                .map(|&i| cs.iter().map(|&j| i128::from(m[i][j])).collect())
                .collect();
            g = gcd(g, det_i128(sub));
            if g == 1 {
                return 1;
            }
        }
    }
    g
}

/// Invariant factors `d_k / d_(k-1)` from determinantal divisors, for
/// `k = 1..=rank`.
pub fn determinantal_invariant_factors(m: &[Vec<i64>], rank: usize) -> Vec<i128> {
    let mut prev = 1i128;
    let mut out = Vec::with_capacity(rank);
    for k in 1..=rank {
        let d = minor_gcd(m, k);
        assert!(d != 0, "rank {rank} but all {k}-minors vanish");
        out.push(d / prev);
        prev = d;
    }
    out
}

/// Dimensions up to `max_dim` each, entries uniform in `[-bound, bound]`.
pub fn random_matrix(rng: &mut impl Rng, max_dim: usize, bound: i64) -> Vec<Vec<i64>> {
    let rows = rng.gen_range(1..=max_dim);
    let cols = rng.gen_range(1..=max_dim);
    (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(-bound..=bound)).collect())
        .collect()
}
