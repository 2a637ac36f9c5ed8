//! Graded DGAs on Reeb chords, their validation, the built-in knots, and
//! connected sums.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::algebra::{degree_of_word, Gen, Poly, Word};
use crate::augment::Augmentation;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Chord {
    pub name: String,
    pub degree: i64,
}

/// A semi-free DGA `Z<a_1, ..., a_n, t^{+-1}>` with `|t| = 0` and `dt = 0`.
///
/// Chords keep their declaration order; only nonzero differentials are
/// stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dga {
    name: String,
    chords: Vec<Chord>,
    diff: BTreeMap<String, Poly>,
    tb: Option<i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    Grading,
    DSquared,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationFailure {
    pub chord: String,
    pub kind: FailureKind,
    /// Offending monomials (grading) or the nonzero value of `d(d a)`.
    pub offending: Poly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub grading_ok: bool,
    pub d_squared_ok: bool,
    pub failures: Vec<ValidationFailure>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.grading_ok && self.d_squared_ok
    }
}

impl Dga {
    pub fn new(name: impl Into<String>) -> Self {
        Dga {
            name: name.into(),
            chords: Vec::new(),
            diff: BTreeMap::new(),
            tb: None,
        }
    }

    pub fn add_chord(&mut self, name: impl Into<String>, degree: i64) -> Result<()> {
        let name = name.into();
        if name == "t" {
            return Err(Error::InvalidParameter("`t` is reserved for the basepoint".into()));
        }
        if self.degree(&name).is_some() {
            return Err(Error::DuplicateGenerator(name));
        }
        self.chords.push(Chord { name, degree });
        Ok(())
    }

    /// Sets `d(chord) = p`. Every chord occurring in `p` must be declared.
    pub fn set_diff(&mut self, chord: &str, p: Poly) -> Result<()> {
        if self.degree(chord).is_none() {
            return Err(Error::UnknownGenerator(chord.to_string()));
        }
        if let Some(unknown) = p
            .letters()
            .filter_map(Gen::chord_name)
            .find(|n| self.degree(n).is_none())
        {
            return Err(Error::UnknownGenerator(unknown.to_string()));
        }
        if p.is_zero() {
            self.diff.remove(chord);
        } else {
            self.diff.insert(chord.to_string(), p);
        }
        Ok(())
    }

    pub fn set_tb(&mut self, tb: Option<i64>) {
        self.tb = tb;
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn chords(&self) -> &[Chord] {
        &self.chords
    }

    pub fn degree(&self, chord: &str) -> Option<i64> {
        self.chords.iter().find(|c| c.name == chord).map(|c| c.degree)
    }

    pub fn grading(&self) -> BTreeMap<String, i64> {
        self.chords
            .iter()
            .map(|c| (c.name.clone(), c.degree))
            .collect()
    }

    pub fn chords_in_degree(&self, degree: i64) -> impl Iterator<Item = &Chord> {
        self.chords.iter().filter(move |c| c.degree == degree)
    }

    /// `d(chord)`; zero for generators without a stored differential.
    pub fn diff(&self, chord: &str) -> Poly {
        self.diff.get(chord).cloned().unwrap_or_default()
    }

    /// Stored tb, falling back to the Euler characteristic of the chords.
    pub fn tb(&self) -> i64 {
        self.tb.unwrap_or_else(|| euler_tb(self))
    }

    pub fn tb_metadata(&self) -> Option<i64> {
        self.tb
    }

    /// Extends `d` to all of the algebra by the signed Leibniz rule
    /// `d(xy) = d(x) y + (-1)^{|x|} x d(y)`.
    pub fn apply_differential(&self, p: &Poly) -> Result<Poly> {
        let grading = self.grading();
        let mut out = Poly::zero();
        for (word, c) in p.terms() {
            let letters = word.letters();
            let mut prefix_degree = 0i64;
            for (j, g) in letters.iter().enumerate() {
                if let Gen::Chord(name) = g {
                    let dg = self.diff(name);
                    let sign: BigInt = if prefix_degree.rem_euclid(2) == 0 {
                        c.clone()
                    } else {
                        -c.clone()
                    };
                    if !dg.is_zero() {
                        let left = Poly::monomial(sign, Word::from_letters(letters[..j].iter().cloned()));
                        let right =
                            Poly::monomial(1, Word::from_letters(letters[j + 1..].iter().cloned()));
                        out = out + &(&left * &dg) * &right;
                    }
                    prefix_degree += grading
                        .get(name)
                        .ok_or_else(|| Error::UnknownGenerator(name.clone()))?;
                }
            }
        }
        Ok(out)
    }
}

/// Checks that `d` lowers degree by one and squares to zero.
pub fn validate(dga: &Dga) -> Result<ValidationReport> {
    let grading = dga.grading();
    let lookup = |n: &str| grading.get(n).copied();
    let mut failures = Vec::new();
    for chord in dga.chords() {
        let d = dga.diff(&chord.name);
        let mut bad = Poly::zero();
        for (word, c) in d.terms() {
            if degree_of_word(word, lookup)? != chord.degree - 1 {
                bad.add_term(c.clone(), word.clone());
            }
        }
        if !bad.is_zero() {
            failures.push(ValidationFailure {
                chord: chord.name.clone(),
                kind: FailureKind::Grading,
                offending: bad,
            });
        }
    }
    let grading_ok = failures.is_empty();
    for chord in dga.chords() {
        let dd = dga.apply_differential(&dga.diff(&chord.name))?;
        if !dd.is_zero() {
            failures.push(ValidationFailure {
                chord: chord.name.clone(),
                kind: FailureKind::DSquared,
                offending: dd,
            });
        }
    }
    let d_squared_ok = failures.iter().all(|f| f.kind != FailureKind::DSquared);
    Ok(ValidationReport {
        grading_ok,
        d_squared_ok,
        failures,
    })
}

/// Signed count of chords, `sum (-1)^{|a|}`.
pub fn euler_tb(dga: &Dga) -> i64 {
    dga.chords()
        .iter()
        .map(|c| if c.degree.rem_euclid(2) == 0 { 1 } else { -1 })
        .sum()
}

fn w(names: &[&str]) -> Poly {
    Poly::word(names)
}

fn a(i: i64) -> String {
    format!("a{i}")
}

/// The 11-chord DGA of the Legendrian `m(8_21)` with basepoint at the cusp
/// `a8`.
pub fn lambda0() -> Dga {
    let mut d = Dga::new("lambda0");
    for i in 1..=11 {
        let degree = match i {
            1..=6 => 0,
            7..=10 => 1,
            _ => -1,
        };
        d.add_chord(a(i), degree).expect("fresh names");
    }
    let one = Poly::one;
    let diffs = [
        ("a2", w(&["a4", "a11"])),
        ("a5", -w(&["a11", "a1"])),
        ("a7", -w(&["a1", "a4"])),
        (
            "a8",
            Poly::t() + w(&["a1"]) + w(&["a3"]) + w(&["a1", "a2", "a3"]) + w(&["a7", "a11", "a3"]),
        ),
        (
            "a9",
            one()
                - &(one() + w(&["a3", "a2"])) * &w(&["a1", "a6"])
                - &w(&["a3"]) * &(w(&["a4"]) + w(&["a6"]) + w(&["a4", "a5", "a6"])),
        ),
        (
            "a10",
            one() - w(&["a4"]) - w(&["a6"]) - w(&["a6", "a5", "a4"]) - w(&["a6", "a11", "a7"]),
        ),
    ];
    for (chord, p) in diffs {
        d.set_diff(chord, p).expect("declared chords");
    }
    d.set_tb(Some(1));
    d
}

/// The `(2k + 11)`-chord DGA of the family `Lambda_k`, `k >= 1`, basepoint at
/// the cusp `a8`.
///
/// Besides the published nonzero differentials this sets `d a2 = a4*a6`:
/// without that term `d^2 a8` and `d^2 a9` are nonzero.
pub fn lambda_k(k: i64) -> Result<Dga> {
    if k < 1 {
        return Err(Error::InvalidParameter(format!("lambda_k needs k >= 1, got {k}")));
    }
    let mut d = Dga::new(format!("lambda_k({k})"));
    for i in 1..=2 * k + 11 {
        let degree = match i {
            1..=3 => 0,
            4 => k,
            5 => k + 1,
            6 => -k - 1,
            7 => -k,
            8 | 9 => 1,
            i if (10..=k + 10).contains(&i) => 0,
            _ => 1,
        };
        d.add_chord(a(i), degree)?;
    }
    let one = Poly::one;
    let sign: i64 = if (k + 1) % 2 == 0 { 1 } else { -1 };
    d.set_diff("a2", w(&["a4", "a6"]))?;
    d.set_diff("a5", -w(&["a1", "a4"]))?;
    d.set_diff("a7", w(&["a6", "a1"]).scale(&BigInt::from(sign)))?;
    d.set_diff(
        "a8",
        Poly::t() + w(&["a1"]) + w(&["a3"]) + w(&["a1", "a2", "a3"]) + w(&["a5", "a6", "a3"]),
    )?;
    d.set_diff(
        "a9",
        one()
            - &(w(&["a1"]) + w(&["a3"]) + w(&["a3", "a2", "a1"]) + w(&["a3", "a4", "a7"]))
                * &w(&["a10"]),
    )?;
    for i in 0..k {
        let lo = a(10 + i);
        let hi = a(11 + i);
        d.set_diff(&a(k + 11 + i), one() - w(&[&lo, &hi]))?;
    }
    let last = a(k + 10);
    d.set_diff(
        &a(2 * k + 11),
        one() - &w(&[&last]) * &(one() + w(&["a6", "a5"]) + w(&["a7", "a4"])),
    )?;
    d.set_tb(Some(1));
    Ok(d)
}

/// One right cusp `a` with `d a = t + 1`.
pub fn unknot() -> Dga {
    let mut d = Dga::new("unknot");
    d.add_chord("a", 1).expect("fresh name");
    d.set_diff("a", Poly::t() + Poly::one()).expect("declared chord");
    d.set_tb(Some(-1));
    d
}

/// `epsilon_n` on `lambda0`: `(a1, ..., a6) = (n, -1, 1, 0, 0, 1)`.
pub fn lambda0_epsilon(n: i64) -> Augmentation {
    Augmentation::integral([("a1", n), ("a2", -1), ("a3", 1), ("a6", 1)])
}

/// `epsilon_n` on `lambda_k(k)`: `a1 = n, a2 = -1, a3 = 1`, `a10..a(k+10) = 1`.
pub fn lambda_k_epsilon(k: i64, n: i64) -> Augmentation {
    let mut values = vec![("a1".to_string(), n), ("a2".into(), -1), ("a3".into(), 1)];
    values.extend((10..=k + 10).map(|i| (a(i), 1)));
    Augmentation::integral(values)
}

/// Result of [`connected_sum`]: the new DGA plus the chord names used for the
/// right summand and the connecting chord.
#[derive(Clone, Debug)]
pub struct ConnectedSum {
    pub dga: Dga,
    /// Old name in the right summand -> name in the sum.
    pub right_names: BTreeMap<String, String>,
    /// Name of the new degree-0 chord `c`.
    pub bridge: String,
}

impl ConnectedSum {
    /// Augmentation of the sum induced by augmentations of the summands,
    /// with the connecting chord sent to `-1`.
    pub fn combine(&self, left: &Augmentation, right: &Augmentation) -> Result<Augmentation> {
        if left.ring() != right.ring() {
            return Err(Error::RingMismatch(left.ring(), right.ring()));
        }
        let mut out = Augmentation::new(left.ring());
        for (name, v) in left.values() {
            out.set(name, v.clone())?;
        }
        for (name, v) in right.values() {
            let renamed = self
                .right_names
                .get(name)
                .ok_or_else(|| Error::UnknownGenerator(name.clone()))?;
            out.set(renamed, v.clone())?;
        }
        out.set(&self.bridge, -num_rational::BigRational::one())?;
        Ok(out)
    }
}

/// Connected sum: `t -> c` in the left differential, `t -> -t c` in the
/// right one, and `d c = 0` with `|c| = 0`.
///
/// Right-hand chords are renamed with a `#j` suffix when any of them would
/// collide with a left-hand chord.
pub fn connected_sum(left: &Dga, right: &Dga) -> Result<ConnectedSum> {
    for (side, d) in [("left", left), ("right", right)] {
        let report = validate(d)?;
        if !report.is_ok() {
            return Err(Error::ValidationFailed(format!(
                "{side} summand `{}` is not a valid DGA",
                d.name()
            )));
        }
    }
    let left_names: BTreeSet<&str> = left.chords().iter().map(|c| c.name.as_str()).collect();
    let collides = right.chords().iter().any(|c| left_names.contains(c.name.as_str()));
    let j = (2..)
        .find(|j| {
            let suffixed = |n: &str| format!("{n}#{j}");
            right
                .chords()
                .iter()
                .all(|c| !left_names.contains(suffixed(&c.name).as_str()))
                && !left_names.contains(suffixed("c").as_str())
                && !right.chords().iter().any(|c| c.name == suffixed("c"))
        })
        .expect("some suffix is free");
    let right_names: BTreeMap<String, String> = right
        .chords()
        .iter()
        .map(|c| {
            let new = if collides {
                format!("{}#{j}", c.name)
            } else {
                c.name.clone()
            };
            (c.name.clone(), new)
        })
        .collect();
    let taken = |n: &str| left_names.contains(n) || right_names.values().any(|v| v == n);
    let bridge = if taken("c") { format!("c#{j}") } else { "c".to_string() };

    let mut sum = Dga::new(format!("{}#{}", left.name(), right.name()));
    for c in left.chords() {
        sum.add_chord(c.name.clone(), c.degree)?;
    }
    for c in right.chords() {
        sum.add_chord(right_names[&c.name].clone(), c.degree)?;
    }
    sum.add_chord(bridge.clone(), 0)?;

    let mut left_images: BTreeMap<Gen, Poly> = left
        .chords()
        .iter()
        .map(|c| (Gen::chord(c.name.clone()), Poly::chord(c.name.clone())))
        .collect();
    left_images.insert(Gen::T, Poly::chord(bridge.clone()));
    for c in left.chords() {
        let d = left.diff(&c.name).substitute(&left_images)?;
        sum.set_diff(&c.name, d)?;
    }

    let mut right_images: BTreeMap<Gen, Poly> = right_names
        .iter()
        .map(|(old, new)| (Gen::chord(old.clone()), Poly::chord(new.clone())))
        .collect();
    right_images.insert(Gen::T, -(Poly::t() * Poly::chord(bridge.clone())));
    for c in right.chords() {
        let d = right.diff(&c.name).substitute(&right_images)?;
        sum.set_diff(&right_names[&c.name], d)?;
    }
    if let (Some(t1), Some(t2)) = (left.tb_metadata(), right.tb_metadata()) {
        sum.set_tb(Some(t1 + t2 + 1));
    }
    Ok(ConnectedSum {
        dga: sum,
        right_names,
        bridge,
    })
}

type EpsilonFamily = Box<dyn Fn(i64) -> Augmentation>;

/// Summand used by [`geography_dga`] for a target degree, together with its
/// `epsilon_n` family.
fn geography_summand(i: i64) -> Result<(Dga, EpsilonFamily)> {
    match i {
        0 | 1 => Err(Error::InvalidParameter(format!(
            "degree {i} is excluded: duality constrains degrees 0 and 1"
        ))),
        -1 => Ok((lambda0(), Box::new(lambda0_epsilon))),
        i if i > 1 => Ok((lambda_k(i)?, Box::new(move |n| lambda_k_epsilon(i, n)))),
        i => {
            let k = -i - 1;
            Ok((lambda_k(k)?, Box::new(move |n| lambda_k_epsilon(k, n))))
        }
    }
}

/// A DGA and integral augmentation whose linearized homology in degree `i`
/// is `Z^free + Z/n_1 + ... + Z/n_r`.
///
/// Iterated left-associated connected sum of `free + r` copies of a family
/// member carrying `Z/n` in degree `i`, with `epsilon_0` on the first `free`
/// copies and `epsilon_{n_j}` on the rest. Degrees `i > 1` use
/// `lambda_k(i)`, degrees `i < -1` use `lambda_k(-i - 1)`, and `i = -1` uses
/// `lambda0`.
pub fn geography_dga(i: i64, free: usize, torsion: &[i64]) -> Result<(Dga, Augmentation)> {
    if free + torsion.len() == 0 {
        return Err(Error::InvalidParameter(
            "geography needs at least one summand".into(),
        ));
    }
    if let Some(n) = torsion.iter().find(|n| **n < 2) {
        return Err(Error::InvalidParameter(format!(
            "torsion orders must be >= 2, got {n}"
        )));
    }
    let (piece, epsilon) = geography_summand(i)?;
    let params: Vec<i64> = std::iter::repeat_n(0, free)
        .chain(torsion.iter().copied())
        .collect();
    let mut dga = piece.clone();
    let mut aug = epsilon(params[0]);
    for &n in &params[1..] {
        let sum = connected_sum(&dga, &piece)?;
        aug = sum.combine(&aug, &epsilon(n))?;
        dga = sum.dga;
    }
    let summary: Vec<String> = params.iter().map(|n| format!("eps{n}")).collect();
    dga.set_name(format!("geography(i={i}; {})", summary.join("#")));
    Ok((dga, aug))
}
