//! The linearized complex `(V, d^eps)` of a DGA at an augmentation.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::augment::{Augmentation, RingDesc};
use crate::dga::Dga;
use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

/// Free graded module on the chords with boundary matrices `M_d`, of shape
/// `|basis(d-1)| x |basis(d)|`, for every `d` from the lowest chord degree
/// to one above the highest.
///
/// Entries are integers. Over `Z/m` they are reduced into `0..m`; over `Q`
/// the basis has been rescaled so that every entry is integral.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    ring: RingDesc,
    basis: BTreeMap<i64, Vec<String>>,
    boundary: BTreeMap<i64, IntMatrix>,
}

impl ChainComplex {
    /// Builds a complex from explicit data. Degrees between the extremes of
    /// `basis` are filled in; missing boundary maps are zero. Shapes must
    /// match the bases.
    pub fn from_parts(
        ring: RingDesc,
        basis: BTreeMap<i64, Vec<String>>,
        boundary: BTreeMap<i64, IntMatrix>,
    ) -> Result<Self> {
        let mut c = ChainComplex {
            ring,
            basis: BTreeMap::new(),
            boundary: BTreeMap::new(),
        };
        let lo = basis.keys().next().copied();
        let hi = basis.keys().next_back().copied();
        if let (Some(lo), Some(hi)) = (lo, hi) {
            for d in lo..=hi {
                c.basis.insert(d, basis.get(&d).cloned().unwrap_or_default());
            }
            for d in lo..=hi + 1 {
                let shape = (c.basis(d - 1).len(), c.basis(d).len());
                let m = boundary
                    .get(&d)
                    .cloned()
                    .unwrap_or_else(|| IntMatrix::zeros(shape.0, shape.1));
                if (m.rows(), m.cols()) != shape {
                    return Err(Error::InvalidParameter(format!(
                        "boundary in degree {d} has shape {}x{}, expected {}x{}",
                        m.rows(),
                        m.cols(),
                        shape.0,
                        shape.1
                    )));
                }
                c.boundary.insert(d, m);
            }
        }
        if let Some(d) = boundary.keys().find(|d| !c.boundary.contains_key(d)) {
            if !boundary[d].is_zero() {
                return Err(Error::InvalidParameter(format!(
                    "boundary in degree {d} lies outside the basis range"
                )));
            }
        }
        Ok(c)
    }

    pub fn ring(&self) -> RingDesc {
        self.ring
    }

    /// Degrees carrying a basis (possibly empty ones in between).
    pub fn degrees(&self) -> Vec<i64> {
        self.basis.keys().copied().collect()
    }

    pub fn basis(&self, degree: i64) -> &[String] {
        self.basis.get(&degree).map_or(&[], Vec::as_slice)
    }

    /// `M_d : C_d -> C_{d-1}`; an explicit zero matrix outside the stored
    /// range.
    pub fn boundary(&self, degree: i64) -> IntMatrix {
        self.boundary.get(&degree).cloned().unwrap_or_else(|| {
            IntMatrix::zeros(self.basis(degree - 1).len(), self.basis(degree).len())
        })
    }

    pub fn rank(&self) -> usize {
        self.basis.values().map(Vec::len).sum()
    }

    /// Checks `M_{d-1} M_d = 0` in the coefficient ring.
    pub fn check_square_zero(&self) -> Result<()> {
        for (&d, m) in &self.boundary {
            let below = self.boundary(d - 1);
            let mut prod = below.mul(m);
            if let RingDesc::Mod(p) = self.ring {
                prod = prod.reduce_mod(p);
            }
            if !prod.is_zero() {
                return Err(Error::NotAComplex(d));
            }
        }
        Ok(())
    }

    /// Reduction of an integral complex modulo `p`.
    pub fn reduce_mod(&self, p: u64) -> Result<ChainComplex> {
        match self.ring {
            RingDesc::Integers => {}
            RingDesc::Mod(m) if m == p => return Ok(self.clone()),
            other => return Err(Error::RingMismatch(other, RingDesc::Mod(p))),
        }
        Ok(ChainComplex {
            ring: RingDesc::Mod(p),
            basis: self.basis.clone(),
            boundary: self
                .boundary
                .iter()
                .map(|(d, m)| (*d, m.reduce_mod(p)))
                .collect(),
        })
    }

    /// Euler characteristic of the chain groups.
    pub fn euler_characteristic(&self) -> i64 {
        self.basis
            .iter()
            .map(|(d, b)| if d.rem_euclid(2) == 0 { b.len() as i64 } else { -(b.len() as i64) })
            .sum()
    }
}

impl fmt::Display for ChainComplex {
    /// Degree-indexed blocks; columns are the chords of degree `d`, rows
    /// those of degree `d - 1`. Zero and empty blocks are skipped.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "complex over {}", self.ring)?;
        for (&d, m) in self.boundary.iter().rev() {
            if m.rows() == 0 || m.cols() == 0 || m.is_zero() {
                continue;
            }
            let cols = self.basis(d);
            let rows = self.basis(d - 1);
            let cells: Vec<Vec<String>> = (0..m.rows())
                .map(|i| (0..m.cols()).map(|j| m.get(i, j).to_string()).collect())
                .collect();
            let label_w = rows.iter().map(String::len).max().unwrap_or(0);
            let col_w: Vec<usize> = (0..m.cols())
                .map(|j| cells.iter().map(|r| r[j].len()).max().unwrap_or(0).max(cols[j].len()))
                .collect();
            writeln!(f, "d_{d}: C_{d} -> C_{}", d - 1)?;
            write!(f, "{:label_w$}", "")?;
            for (j, c) in cols.iter().enumerate() {
                write!(f, " {:>w$}", c, w = col_w[j])?;
            }
            writeln!(f)?;
            for (i, r) in rows.iter().enumerate() {
                write!(f, "{r:label_w$}")?;
                for (j, cell) in cells[i].iter().enumerate() {
                    write!(f, " {:>w$}", cell, w = col_w[j])?;
                }
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

/// Serializable view of a complex: per degree, chord labels and the matrix
/// rows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixBlock {
    pub degree: i64,
    pub columns: Vec<String>,
    pub rows: Vec<String>,
    pub entries: Vec<Vec<String>>,
}

impl ChainComplex {
    pub fn blocks(&self) -> Vec<MatrixBlock> {
        self.boundary
            .iter()
            .map(|(&d, m)| MatrixBlock {
                degree: d,
                columns: self.basis(d).to_vec(),
                rows: self.basis(d - 1).to_vec(),
                entries: (0..m.rows())
                    .map(|i| (0..m.cols()).map(|j| m.get(i, j).to_string()).collect())
                    .collect(),
            })
            .collect()
    }
}

/// `d^eps a = d/ds|_{s=0} phi^eps(d a)` with `phi^eps(x) = s x + eps(x)`.
///
/// Fails with `NotAnAugmentation` when the constant part of some
/// `phi^eps(d a)` is nonzero in the ring.
pub fn linearized_differential(dga: &Dga, aug: &Augmentation) -> Result<ChainComplex> {
    let ring = aug.ring();
    let eps = aug.scalar_map(dga)?;
    let mut basis: BTreeMap<i64, Vec<String>> = BTreeMap::new();
    for c in dga.chords() {
        basis.entry(c.degree).or_default().push(c.name.clone());
    }
    let (Some(&lo), Some(&hi)) = (basis.keys().next(), basis.keys().next_back()) else {
        return ChainComplex::from_parts(ring, basis, BTreeMap::new());
    };
    for d in lo..=hi {
        basis.entry(d).or_default();
    }
    let position = |d: i64, name: &str| {
        basis
            .get(&d)
            .and_then(|b| b.iter().position(|n| n == name))
    };

    let mut rational: BTreeMap<i64, Vec<Vec<BigRational>>> = BTreeMap::new();
    for d in lo..=hi + 1 {
        let rows = basis.get(&(d - 1)).map_or(0, Vec::len);
        let cols = basis.get(&d).map_or(0, Vec::len);
        rational.insert(d, vec![vec![BigRational::zero(); cols]; rows]);
    }
    for chord in dga.chords() {
        let p = dga.diff(&chord.name);
        let constant = p.evaluate(&eps)?;
        if !ring.is_zero(&constant) {
            return Err(Error::NotAnAugmentation(format!(
                "eps(d {}) = {} in {ring}",
                chord.name,
                ring.canonical(&constant).unwrap_or(constant)
            )));
        }
        let col = position(chord.degree, &chord.name).expect("chord is in its degree");
        let target = chord.degree - 1;
        let block = rational.get_mut(&chord.degree).expect("degree in range");
        for (name, v) in p.s_linear_part(&eps)? {
            if ring.is_zero(&v) {
                continue;
            }
            let row = position(target, &name).ok_or_else(|| {
                Error::ValidationFailed(format!(
                    "d {} has a linear term in `{name}` of the wrong degree",
                    chord.name
                ))
            })?;
            block[row][col] = v;
        }
    }

    let width = |d: i64| basis.get(&d).map_or(0, Vec::len);
    let boundary = match ring {
        RingDesc::Integers => rational
            .into_iter()
            .map(|(d, rows)| (d, to_int_matrix(&rows, width(d), |v| v.to_integer())))
            .collect(),
        RingDesc::Mod(m) => {
            let modulus = BigInt::from(m);
            rational
                .into_iter()
                .map(|(d, rows)| {
                    let m = to_int_matrix(&rows, width(d), |v| v.to_integer().mod_floor(&modulus));
                    (d, m)
                })
                .collect()
        }
        RingDesc::Rationals => clear_denominators(&basis, rational),
    };
    let complex = ChainComplex::from_parts(ring, basis, boundary)?;
    Ok(complex)
}

fn to_int_matrix(rows: &[Vec<BigRational>], cols: usize, f: impl Fn(&BigRational) -> BigInt) -> IntMatrix {
    IntMatrix::from_fn(rows.len(), cols, |i, j| f(&rows[i][j]))
}

/// Rescales basis vectors, lowest degree first, so every entry becomes an
/// integer. With `e'_j = s_j e_j` the entry `(i, j)` becomes
/// `M_ij s_j / s_i`; `s_j` is the lcm of the denominators of `M_ij / s_i`.
fn clear_denominators(
    basis: &BTreeMap<i64, Vec<String>>,
    rational: BTreeMap<i64, Vec<Vec<BigRational>>>,
) -> BTreeMap<i64, IntMatrix> {
    let mut scale: BTreeMap<i64, Vec<BigInt>> = BTreeMap::new();
    let mut out = BTreeMap::new();
    for (d, rows) in rational {
        let below = scale
            .get(&(d - 1))
            .cloned()
            .unwrap_or_else(|| vec![BigInt::one(); rows.len()]);
        let cols = basis.get(&d).map_or(0, Vec::len);
        let mut col_scale = Vec::with_capacity(cols);
        for j in 0..cols {
            let lcm = (0..rows.len()).fold(BigInt::one(), |acc, i| {
                let q = &rows[i][j] / BigRational::from_integer(below[i].clone());
                acc.lcm(q.denom())
            });
            col_scale.push(lcm);
        }
        let m = IntMatrix::from_fn(rows.len(), cols, |i, j| {
            let v = &rows[i][j] * BigRational::from_integer(col_scale[j].clone())
                / BigRational::from_integer(below[i].clone());
            v.to_integer()
        });
        scale.insert(d, col_scale);
        out.insert(d, m);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Poly;
    use crate::dga::{lambda0, lambda0_epsilon};

    fn column(c: &ChainComplex, degree: i64, chord: &str) -> BTreeMap<String, i64> {
        let j = c.basis(degree).iter().position(|n| n == chord).unwrap();
        let m = c.boundary(degree);
        c.basis(degree - 1)
            .iter()
            .enumerate()
            .filter(|(i, _)| !m.get(*i, j).is_zero())
            .map(|(i, n)| (n.clone(), i64::try_from(m.get(i, j).clone()).unwrap()))
            .collect()
    }

    #[test]
    fn lambda0_columns() {
        for n in [-2i64, 0, 3, 7] {
            let c = linearized_differential(&lambda0(), &lambda0_epsilon(n)).unwrap();
            let expect = |pairs: &[(&str, i64)]| -> BTreeMap<String, i64> {
                pairs
                    .iter()
                    .filter(|(_, v)| *v != 0)
                    .map(|(k, v)| (k.to_string(), *v))
                    .collect()
            };
            assert_eq!(column(&c, 1, "a8"), expect(&[("a2", n), ("a3", -(n - 1))]));
            assert_eq!(column(&c, 1, "a10"), expect(&[("a4", -1), ("a6", -1)]));
            assert_eq!(column(&c, 1, "a7"), expect(&[("a4", -n)]));
            assert_eq!(
                column(&c, 1, "a9"),
                expect(&[("a4", -1), ("a6", -1), ("a2", -n), ("a3", n - 1)])
            );
            assert_eq!(column(&c, 0, "a5"), expect(&[("a11", -n)]));
            assert!(column(&c, 0, "a2").is_empty());
            c.check_square_zero().unwrap();
        }
    }

    #[test]
    fn shapes_cover_the_degree_range() {
        let c = linearized_differential(&lambda0(), &lambda0_epsilon(1)).unwrap();
        assert_eq!(c.degrees(), vec![-1, 0, 1]);
        let m = c.boundary(-1);
        assert_eq!((m.rows(), m.cols()), (0, 1));
        let m = c.boundary(2);
        assert_eq!((m.rows(), m.cols()), (4, 0));
        assert_eq!(c.euler_characteristic(), 1);
    }

    #[test]
    fn zero_differential_gives_zero_matrices() {
        let mut d = Dga::new("z");
        d.add_chord("x", 0).unwrap();
        d.add_chord("y", 1).unwrap();
        let aug = Augmentation::integral([("x", 5)]);
        let c = linearized_differential(&d, &aug).unwrap();
        assert!(c.boundary(1).is_zero());
        assert!(c.boundary(0).is_zero());
    }

    #[test]
    fn rejects_non_augmentation() {
        let aug = Augmentation::integral([("a1", 1)]);
        assert!(matches!(
            linearized_differential(&lambda0(), &aug),
            Err(Error::NotAnAugmentation(_))
        ));
    }

    #[test]
    fn rational_values_are_rescaled() {
        // d y = 2 x w - 1 with x = 1/3, w = 3/2
        let mut d = Dga::new("q");
        d.add_chord("x", 0).unwrap();
        d.add_chord("y", 1).unwrap();
        d.add_chord("w", 0).unwrap();
        d.set_diff("y", Poly::word(&["x", "w"]).scale(&BigInt::from(2)) - Poly::one())
            .unwrap();
        let mut aug = Augmentation::new(RingDesc::Rationals);
        aug.set("x", BigRational::new(1.into(), 3.into())).unwrap();
        aug.set("w", BigRational::new(3.into(), 2.into())).unwrap();
        let c = linearized_differential(&d, &aug).unwrap();
        // column of y is (2*w, 2*x) = (3, 2/3) -> rescaled by 3 to (9, 2)
        let m = c.boundary(1);
        assert_eq!(m.column(0), vec![BigInt::from(9), BigInt::from(2)]);
        assert_eq!(m.rank_rational(), 1);
    }
}
