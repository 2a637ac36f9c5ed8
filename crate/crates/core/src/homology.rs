//! Homology of graded integer complexes: Smith normal form, field
//! dimensions, the mod-2 Bockstein and universal-coefficient checks.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::augment::RingDesc;
use crate::error::{Error, Result};
use crate::linearize::ChainComplex;
use crate::matrix::IntMatrix;

/// `D = U * M * V` with `U`, `V` unimodular and `D` diagonal, its nonzero
/// entries positive and each dividing the next.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snf {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl Snf {
    /// Nonzero diagonal entries of `D`, in order.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d.get(i, i).clone())
            .take_while(|x| !x.is_zero())
            .collect()
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> Snf {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    for t in 0..rows.min(cols) {
        loop {
            // smallest nonzero entry of the trailing block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let x = a.get(i, j);
                    if x.is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| x.abs() < a.get(bi, bj).abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return Snf { u, d: a, v };
            };
            a.swap_rows(t, pi);
            u.swap_rows(t, pi);
            a.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let pivot = a.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..rows {
                let q = -(a.get(i, t).div_floor(&pivot));
                a.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                clean &= a.get(i, t).is_zero();
            }
            for j in t + 1..cols {
                let q = -(a.get(t, j).div_floor(&pivot));
                a.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                clean &= a.get(t, j).is_zero();
            }
            if !clean {
                continue;
            }
            let offender = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| !a.get(i, j).is_multiple_of(&pivot)));
            match offender {
                Some(i) => {
                    a.add_row_multiple(t, i, &BigInt::one());
                    u.add_row_multiple(t, i, &BigInt::one());
                }
                None => break,
            }
        }
        if a.get(t, t).is_negative() {
            a.negate_row(t);
            u.negate_row(t);
        }
    }
    Snf { u, d: a, v }
}

/// Nonzero invariant factors of `m`, each dividing the next.
pub fn invariant_factors(m: &IntMatrix) -> Vec<BigInt> {
    smith_normal_form(m).diagonal()
}

/// `Z^free_rank + Z/d1 + Z/d2 + ...` with `2 <= d1 | d2 | ...`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct HomologyGroup {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl HomologyGroup {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn free(rank: usize) -> Self {
        HomologyGroup { free_rank: rank, torsion: Vec::new() }
    }

    /// Group with the given free rank and cyclic summands `Z/n` for each
    /// order, normalized to invariant-factor form. Orders `0` count as free
    /// summands and orders `1` are dropped.
    pub fn from_orders<T: Into<BigInt>>(free_rank: usize, orders: impl IntoIterator<Item = T>) -> Self {
        let mut free = free_rank;
        let mut cyclic = Vec::new();
        for n in orders {
            let n: BigInt = n.into();
            if n.is_zero() {
                free += 1;
            } else {
                cyclic.push(n.abs());
            }
        }
        HomologyGroup { free_rank: free, torsion: normalize_torsion(&cyclic) }
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn direct_sum(&self, other: &HomologyGroup) -> HomologyGroup {
        let orders: Vec<BigInt> = self.torsion.iter().chain(&other.torsion).cloned().collect();
        HomologyGroup::from_orders(self.free_rank + other.free_rank, orders)
    }

    /// Number of invariant factors divisible by `p`; the dimension of the
    /// `p`-torsion tensored down to `Z/p`.
    pub fn p_rank(&self, p: u64) -> usize {
        let p = BigInt::from(p);
        self.torsion.iter().filter(|d| d.is_multiple_of(&p)).count()
    }

    /// Torsion as prime powers `(p, p^e)`, sorted.
    pub fn primary_decomposition(&self) -> Vec<(BigInt, BigInt)> {
        let mut out = Vec::new();
        for d in &self.torsion {
            let mut n = d.clone();
            let mut p = BigInt::from(2);
            while &p * &p <= n {
                if n.is_multiple_of(&p) {
                    let mut q = BigInt::one();
                    while n.is_multiple_of(&p) {
                        n /= &p;
                        q *= &p;
                    }
                    out.push((p.clone(), q));
                }
                p += 1;
            }
            if n > BigInt::one() {
                out.push((n.clone(), n));
            }
        }
        out.sort();
        out
    }
}

fn normalize_torsion(orders: &[BigInt]) -> Vec<BigInt> {
    let diag = IntMatrix::diagonal(orders);
    invariant_factors(&diag)
        .into_iter()
        .filter(|d| !d.is_one())
        .collect()
}

impl fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        f.write_str(&parts.join(" + "))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum WireInt {
    Small(u64),
    Big(String),
}

fn to_wire(x: &BigInt) -> WireInt {
    match x.to_u64() {
        Some(v) => WireInt::Small(v),
        None => WireInt::Big(x.to_string()),
    }
}

fn from_wire<E: serde::de::Error>(w: WireInt) -> std::result::Result<BigInt, E> {
    match w {
        WireInt::Small(v) => Ok(BigInt::from(v)),
        WireInt::Big(s) => s.parse().map_err(E::custom),
    }
}

#[derive(Serialize, Deserialize)]
struct GroupWire {
    free_rank: usize,
    torsion: Vec<WireInt>,
}

impl Serialize for HomologyGroup {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GroupWire {
            free_rank: self.free_rank,
            torsion: self.torsion.iter().map(to_wire).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for HomologyGroup {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = GroupWire::deserialize(d)?;
        let torsion = w
            .torsion
            .into_iter()
            .map(from_wire)
            .collect::<std::result::Result<Vec<_>, D::Error>>()?;
        let g = HomologyGroup::from_orders(w.free_rank, torsion.clone());
        if g.torsion != torsion {
            return Err(serde::de::Error::custom("torsion is not in invariant-factor form"));
        }
        Ok(g)
    }
}

/// Homology in each degree; only nonzero groups are stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GradedHomology {
    groups: BTreeMap<i64, HomologyGroup>,
}

impl GradedHomology {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_groups(groups: impl IntoIterator<Item = (i64, HomologyGroup)>) -> Self {
        let mut h = Self::new();
        for (d, g) in groups {
            h.insert(d, g);
        }
        h
    }

    pub fn insert(&mut self, degree: i64, group: HomologyGroup) {
        if group.is_zero() {
            self.groups.remove(&degree);
        } else {
            self.groups.insert(degree, group);
        }
    }

    pub fn get(&self, degree: i64) -> HomologyGroup {
        self.groups.get(&degree).cloned().unwrap_or_default()
    }

    pub fn groups(&self) -> &BTreeMap<i64, HomologyGroup> {
        &self.groups
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.groups
            .iter()
            .map(|(d, g)| if d.rem_euclid(2) == 0 { g.free_rank as i64 } else { -(g.free_rank as i64) })
            .sum()
    }

    /// Dimensions over `Z/p` (or `Q` when `field` is `Rationals`) predicted
    /// by the universal coefficient theorem.
    pub fn field_dims(&self, field: RingDesc) -> Result<BTreeMap<i64, usize>> {
        field.require_field()?;
        let mut out = BTreeMap::new();
        for &d in self.groups.keys() {
            for deg in [d, d + 1] {
                let here = self.get(deg);
                let below = self.get(deg - 1);
                let dim = match field {
                    RingDesc::Mod(p) => here.free_rank + here.p_rank(p) + below.p_rank(p),
                    _ => here.free_rank,
                };
                if dim > 0 {
                    out.insert(deg, dim);
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for GradedHomology {
    /// One `H_d = ...` line per nonzero degree, highest degree first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.groups.is_empty() {
            return writeln!(f, "H_* = 0");
        }
        for (d, g) in self.groups.iter().rev() {
            writeln!(f, "H_{d} = {g}")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct DegreeWire {
    degree: i64,
    #[serde(flatten)]
    group: HomologyGroup,
}

impl Serialize for GradedHomology {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.groups
            .iter()
            .rev()
            .map(|(d, g)| DegreeWire { degree: *d, group: g.clone() })
            .collect::<Vec<_>>()
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GradedHomology {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let entries = Vec::<DegreeWire>::deserialize(d)?;
        Ok(GradedHomology::from_groups(entries.into_iter().map(|e| (e.degree, e.group))))
    }
}

fn require_integral(c: &ChainComplex) -> Result<()> {
    if c.ring() != RingDesc::Integers {
        return Err(Error::RingMismatch(c.ring(), RingDesc::Integers));
    }
    c.check_square_zero()
}

/// `H_d = ker M_d / im M_{d+1}`: free rank `n_d - rank M_d - rank M_{d+1}`,
/// torsion the invariant factors of `M_{d+1}` above one.
pub fn integral_homology(c: &ChainComplex) -> Result<GradedHomology> {
    require_integral(c)?;
    let mut h = GradedHomology::new();
    let degrees = c.degrees();
    let factors: BTreeMap<i64, Vec<BigInt>> = degrees
        .iter()
        .map(|&d| (d, invariant_factors(&c.boundary(d))))
        .chain(degrees.last().map(|&d| (d + 1, invariant_factors(&c.boundary(d + 1)))))
        .collect();
    let empty = Vec::new();
    for &d in &degrees {
        let out = factors.get(&d).unwrap_or(&empty);
        let inc = factors.get(&(d + 1)).unwrap_or(&empty);
        let free = c.basis(d).len() - out.len() - inc.len();
        h.insert(d, HomologyGroup::from_orders(free, inc.iter().cloned()));
    }
    Ok(h)
}

/// Homology dimensions over a field; only nonzero degrees are listed.
///
/// An integral complex is reduced into the field. A complex already over a
/// field must be over `field` itself.
pub fn field_homology(c: &ChainComplex, field: RingDesc) -> Result<BTreeMap<i64, usize>> {
    field.require_field()?;
    match (c.ring(), field) {
        (RingDesc::Integers, _) => {}
        (ring, f) if ring == f => {}
        (ring, f) => return Err(Error::RingMismatch(ring, f)),
    }
    let rank = |d: i64| c.boundary(d).rank_over(field);
    let mut dims = BTreeMap::new();
    for d in c.degrees() {
        let dim = c.basis(d).len() - rank(d)? - rank(d + 1)?;
        if dim > 0 {
            dims.insert(d, dim);
        }
    }
    Ok(dims)
}

/// Ranks of the mod-2 Bockstein `H_d(C; Z/2) -> H_{d-1}(C; Z/2)`, keyed by
/// the source degree `d`; zero ranks are omitted.
///
/// Each mod-2 cycle is lifted to a `0/1` integer vector, pushed through the
/// integral boundary and halved. The rank of the induced map is the rank of
/// those images modulo the mod-2 boundaries in degree `d - 1`.
pub fn bockstein(c: &ChainComplex) -> Result<BTreeMap<i64, usize>> {
    require_integral(c)?;
    let two = BigInt::from(2);
    let mut out = BTreeMap::new();
    for d in c.degrees() {
        let m = c.boundary(d);
        let below = c.basis(d - 1).len();
        if below == 0 {
            continue;
        }
        let images: Vec<Vec<BigInt>> = m
            .nullspace_mod_p(2)
            .into_iter()
            .map(|k| {
                let lift: Vec<BigInt> = k.into_iter().map(BigInt::from).collect();
                m.mul_vec(&lift)
                    .into_iter()
                    .map(|x| {
                        debug_assert!(x.is_even());
                        (x / &two).mod_floor(&two)
                    })
                    .collect()
            })
            .collect();
        if images.is_empty() {
            continue;
        }
        // columns: mod-2 boundaries into degree d - 1, then the images
        let boundaries = c.boundary(d);
        let mut joint = IntMatrix::zeros(below, boundaries.cols() + images.len());
        for i in 0..below {
            for j in 0..boundaries.cols() {
                joint.set(i, j, boundaries.get(i, j).clone());
            }
            for (k, img) in images.iter().enumerate() {
                joint.set(i, boundaries.cols() + k, img[i].clone());
            }
        }
        let rank = joint.rank_mod_p(2) - boundaries.rank_mod_p(2);
        if rank > 0 {
            out.insert(d, rank);
        }
    }
    Ok(out)
}

/// True iff `dims` (over `field`) is what the universal coefficient theorem
/// predicts from the integral homology `h`.
pub fn uct_check(h: &GradedHomology, field: RingDesc, dims: &BTreeMap<i64, usize>) -> Result<bool> {
    let predicted = h.field_dims(field)?;
    let nonzero: BTreeMap<i64, usize> = dims.iter().filter(|(_, v)| **v > 0).map(|(k, v)| (*k, *v)).collect();
    Ok(predicted == nonzero)
}
