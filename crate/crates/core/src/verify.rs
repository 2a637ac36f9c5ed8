//! Structural checks on linearized homology: duality, positivity, the
//! filling dimension count, torsion scans and connected-sum additivity.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::augment::{enumerate_augmentations, enumerate_augmentations_bounded, is_prime, Augmentation, RingDesc};
use crate::dga::{connected_sum, euler_tb, Dga};
use crate::error::{Error, Result};
use crate::homology::{field_homology, integral_homology, GradedHomology, HomologyGroup};
use crate::linearize::linearized_differential;

/// Linearized homology dimensions over the augmentation's own field.
pub fn field_dims(dga: &Dga, aug: &Augmentation) -> Result<BTreeMap<i64, usize>> {
    aug.ring().require_field()?;
    let c = linearized_differential(dga, aug)?;
    field_homology(&c, aug.ring())
}

/// Integral linearized homology of an integer augmentation.
pub fn integral_lch(dga: &Dga, aug: &Augmentation) -> Result<GradedHomology> {
    if aug.ring() != RingDesc::Integers {
        return Err(Error::RingMismatch(aug.ring(), RingDesc::Integers));
    }
    integral_homology(&linearized_differential(dga, aug)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualityPair {
    pub degree: i64,
    pub dim: usize,
    pub mirror_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualityReport {
    pub field: RingDesc,
    /// `(dim_i, dim_-i)` for `i >= 0` up to the largest nonzero degree.
    pub pairs: Vec<DualityPair>,
    pub duality_ok: bool,
    /// `dim_1 - dim_-1`; duality predicts 1.
    pub degree1_excess: i64,
}

impl fmt::Display for DualityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "field {}", self.field)?;
        for p in self.pairs.iter().rev() {
            let want = if p.degree == 1 { "dim_1 = dim_-1 + 1" } else { "symmetric" };
            let ok = if p.degree == 1 {
                p.dim == p.mirror_dim + 1
            } else {
                p.dim == p.mirror_dim
            };
            writeln!(
                f,
                "dim_{} = {}, dim_{} = {} ({want}: {})",
                p.degree,
                p.dim,
                -p.degree,
                p.mirror_dim,
                if ok { "ok" } else { "FAILS" }
            )?;
        }
        writeln!(f, "duality {}", if self.duality_ok { "holds" } else { "FAILS" })
    }
}

pub fn duality_report(field: RingDesc, dims: &BTreeMap<i64, usize>) -> DualityReport {
    let dim = |d: i64| dims.get(&d).copied().unwrap_or(0);
    let top = dims.keys().map(|d| d.abs()).max().unwrap_or(0).max(1);
    let pairs: Vec<DualityPair> = (0..=top)
        .map(|i| DualityPair { degree: i, dim: dim(i), mirror_dim: dim(-i) })
        .collect();
    let duality_ok = pairs.iter().all(|p| {
        if p.degree == 1 {
            p.dim == p.mirror_dim + 1
        } else {
            p.dim == p.mirror_dim
        }
    });
    DualityReport {
        field,
        pairs,
        duality_ok,
        degree1_excess: dim(1) as i64 - dim(-1) as i64,
    }
}

pub fn sabloff_check(dga: &Dga, aug: &Augmentation) -> Result<DualityReport> {
    let dims = field_dims(dga, aug)?;
    Ok(duality_report(aug.ring(), &dims))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Positivity {
    Holds,
    Fails,
    /// Some chord has negative degree.
    NotApplicable,
}

/// With all chord degrees nonnegative the homology must be `Z` in degree 1,
/// `Z^(tb + 1)` in degree 0 and zero elsewhere (over a field: the same
/// dimensions).
pub fn positivity_check(dga: &Dga, aug: &Augmentation) -> Result<Positivity> {
    if dga.chords().iter().any(|c| c.degree < 0) {
        return Ok(Positivity::NotApplicable);
    }
    let tb = euler_tb(dga);
    let rank0 = usize::try_from(tb + 1).ok();
    let holds = match aug.ring() {
        RingDesc::Integers => {
            let h = integral_lch(dga, aug)?;
            let expected = rank0.map(|r0| {
                GradedHomology::from_groups([(1, HomologyGroup::free(1)), (0, HomologyGroup::free(r0))])
            });
            expected.as_ref() == Some(&h)
        }
        _ => {
            let dims = field_dims(dga, aug)?;
            let expected = rank0.map(|r0| {
                [(1, 1), (0, r0)]
                    .into_iter()
                    .filter(|(_, v)| *v > 0)
                    .collect::<BTreeMap<i64, usize>>()
            });
            expected.as_ref() == Some(&dims)
        }
    };
    Ok(if holds { Positivity::Holds } else { Positivity::Fails })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionVerdict {
    pub field: RingDesc,
    pub tb: i64,
    pub total_dim: usize,
    /// Genus `(tb + 1) / 2` forced on an orientable filling; absent when
    /// `tb` is even or below `-1`.
    pub filling_genus: Option<i64>,
    /// `tb + 2`, the total dimension of the relative homology of such a
    /// filling.
    pub expected_filling_dim: Option<i64>,
    /// `false` is conclusive; `true` only means the count does not rule a
    /// filling out.
    pub geometric_possible: bool,
}

impl fmt::Display for ObstructionVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "field {}, tb = {}", self.field, self.tb)?;
        writeln!(f, "total dimension {}", self.total_dim)?;
        match (self.filling_genus, self.expected_filling_dim) {
            (Some(g), Some(e)) => {
                writeln!(f, "a filling has genus {g} and total relative dimension {e}")?;
                if self.geometric_possible {
                    writeln!(f, "not obstructed")
                } else {
                    writeln!(f, "not induced by any orientable exact filling")
                }
            }
            _ => writeln!(f, "no orientable exact filling exists for this tb"),
        }
    }
}

pub fn filling_obstruction(dga: &Dga, aug: &Augmentation) -> Result<ObstructionVerdict> {
    let dims = field_dims(dga, aug)?;
    let total_dim = dims.values().sum();
    let tb = euler_tb(dga);
    let fillable = tb >= -1 && tb.rem_euclid(2) == 1;
    let (filling_genus, expected_filling_dim) = if fillable {
        (Some((tb + 1) / 2), Some(tb + 2))
    } else {
        (None, None)
    };
    Ok(ObstructionVerdict {
        field: aug.ring(),
        tb,
        total_dim,
        filling_genus,
        expected_filling_dim,
        geometric_possible: expected_filling_dim == Some(total_dim as i64),
    })
}

/// Field augmentations sharing one dimension vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionClass {
    pub dims: BTreeMap<i64, usize>,
    pub augmentations: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeScan {
    pub prime: u64,
    pub classes: Vec<DimensionClass>,
    /// More than one dimension vector occurs.
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegralEntry {
    pub augmentation: String,
    pub homology: GradedHomology,
    pub torsion_primes: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionScan {
    pub primes: Vec<PrimeScan>,
    pub bound: u64,
    pub integral: Vec<IntegralEntry>,
    /// Primes occurring in some integral torsion group.
    pub torsion_primes: Vec<u64>,
}

impl fmt::Display for TorsionScan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for scan in &self.primes {
            let total: usize = scan.classes.iter().map(|c| c.augmentations.len()).sum();
            writeln!(
                f,
                "Z/{}: {total} augmentations, {} dimension classes{}",
                scan.prime,
                scan.classes.len(),
                if scan.flagged { " (dimension jump)" } else { "" }
            )?;
            for class in &scan.classes {
                writeln!(f, "  {}: {} augmentations", fmt_dims(&class.dims), class.augmentations.len())?;
            }
        }
        writeln!(f, "Z, values in [-{0}, {0}]: {1} augmentations", self.bound, self.integral.len())?;
        for e in &self.integral {
            let groups: Vec<String> = e
                .homology
                .groups()
                .iter()
                .rev()
                .filter(|(_, g)| !g.torsion.is_empty())
                .map(|(d, g)| format!("H_{d} = {g}"))
                .collect();
            if !groups.is_empty() {
                writeln!(f, "  {}: {}", e.augmentation, groups.join(", "))?;
            }
        }
        let primes: Vec<String> = self.torsion_primes.iter().map(u64::to_string).collect();
        writeln!(
            f,
            "integral torsion primes: {}",
            if primes.is_empty() { "none".to_string() } else { primes.join(", ") }
        )
    }
}

/// `{1: 1, 0: 2}` style rendering of a dimension vector, highest degree
/// first.
pub fn fmt_dims(dims: &BTreeMap<i64, usize>) -> String {
    let parts: Vec<String> = dims.iter().rev().map(|(d, v)| format!("{d}: {v}")).collect();
    format!("{{{}}}", parts.join(", "))
}

fn torsion_primes_of(h: &GradedHomology) -> BTreeSet<u64> {
    h.groups()
        .values()
        .flat_map(HomologyGroup::primary_decomposition)
        .filter_map(|(p, _)| u64::try_from(p).ok())
        .collect()
}

pub fn torsion_scan(dga: &Dga, primes: &[u64], bound: u64, cap: u128) -> Result<TorsionScan> {
    let mut scans = Vec::new();
    for &p in primes {
        if !is_prime(p) {
            return Err(Error::InvalidParameter(format!("{p} is not prime")));
        }
        let mut classes: Vec<DimensionClass> = Vec::new();
        for aug in enumerate_augmentations(dga, RingDesc::Mod(p), cap)? {
            let dims = field_dims(dga, &aug)?;
            match classes.iter_mut().find(|c| c.dims == dims) {
                Some(c) => c.augmentations.push(aug.to_literal()),
                None => classes.push(DimensionClass { dims, augmentations: vec![aug.to_literal()] }),
            }
        }
        scans.push(PrimeScan { prime: p, flagged: classes.len() > 1, classes });
    }
    let mut integral = Vec::new();
    let mut all_primes = BTreeSet::new();
    for aug in enumerate_augmentations_bounded(dga, bound, cap)? {
        let homology = integral_lch(dga, &aug)?;
        let primes = torsion_primes_of(&homology);
        all_primes.extend(primes.iter().copied());
        integral.push(IntegralEntry {
            augmentation: aug.to_literal(),
            homology,
            torsion_primes: primes.into_iter().collect(),
        });
    }
    Ok(TorsionScan {
        primes: scans,
        bound,
        integral,
        torsion_primes: all_primes.into_iter().collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdditivityRow {
    pub degree: i64,
    pub left: HomologyGroup,
    pub right: HomologyGroup,
    pub sum: HomologyGroup,
    pub combined: HomologyGroup,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdditivityReport {
    pub ring: RingDesc,
    pub rows: Vec<AdditivityRow>,
    pub ok: bool,
}

fn lch_groups(dga: &Dga, aug: &Augmentation) -> Result<GradedHomology> {
    match aug.ring() {
        RingDesc::Integers => integral_lch(dga, aug),
        _ => Ok(GradedHomology::from_groups(
            field_dims(dga, aug)?
                .into_iter()
                .map(|(d, n)| (d, HomologyGroup::free(n))),
        )),
    }
}

/// Compares the homology of `left # right` at the combined augmentation
/// with the direct sum of the summands' homology in every degree other
/// than 0 and 1. Over a field only dimensions are compared.
pub fn connected_sum_additivity_check(
    left: &Dga,
    left_aug: &Augmentation,
    right: &Dga,
    right_aug: &Augmentation,
) -> Result<AdditivityReport> {
    if left_aug.ring() != right_aug.ring() {
        return Err(Error::RingMismatch(left_aug.ring(), right_aug.ring()));
    }
    let sum = connected_sum(left, right)?;
    let aug = sum.combine(left_aug, right_aug)?;
    let hl = lch_groups(left, left_aug)?;
    let hr = lch_groups(right, right_aug)?;
    let hs = lch_groups(&sum.dga, &aug)?;
    let degrees: BTreeSet<i64> = [&hl, &hr, &hs]
        .iter()
        .flat_map(|h| h.groups().keys().copied())
        .filter(|d| *d != 0 && *d != 1)
        .collect();
    let rows: Vec<AdditivityRow> = degrees
        .into_iter()
        .rev()
        .map(|d| {
            let (l, r, c) = (hl.get(d), hr.get(d), hs.get(d));
            let s = l.direct_sum(&r);
            AdditivityRow { degree: d, ok: s == c, left: l, right: r, sum: s, combined: c }
        })
        .collect();
    Ok(AdditivityReport {
        ring: left_aug.ring(),
        ok: rows.iter().all(|r| r.ok),
        rows,
    })
}

impl fmt::Display for AdditivityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            writeln!(
                f,
                "degree {}: {} + {} = {} vs {} ({})",
                r.degree,
                r.left,
                r.right,
                r.sum,
                r.combined,
                if r.ok { "ok" } else { "MISMATCH" }
            )?;
        }
        writeln!(f, "additivity {}", if self.ok { "holds" } else { "FAILS" })
    }
}
