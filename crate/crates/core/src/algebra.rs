//! Integer-coefficient polynomials in the free unital algebra on Reeb chords
//! and an invertible basepoint generator `t`.
//!
//! The only relation is `t * t^-1 = t^-1 * t = 1`; words are kept reduced by
//! cancelling adjacent `t`, `t^-1` pairs. Terms are stored in a `BTreeMap`
//! keyed by [`Word`], whose ordering is length-lexicographic, so iteration
//! order (and therefore serialization) is canonical.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{Num, One, Signed, Zero};

use crate::error::{Error, Result};

/// A letter of the free algebra.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Gen {
    T,
    TInv,
    Chord(String),
}

impl Gen {
    pub fn chord(name: impl Into<String>) -> Self {
        Gen::Chord(name.into())
    }

    pub fn is_basepoint(&self) -> bool {
        matches!(self, Gen::T | Gen::TInv)
    }

    pub fn chord_name(&self) -> Option<&str> {
        match self {
            Gen::Chord(name) => Some(name),
            _ => None,
        }
    }

    fn inverse(&self) -> Option<Gen> {
        match self {
            Gen::T => Some(Gen::TInv),
            Gen::TInv => Some(Gen::T),
            Gen::Chord(_) => None,
        }
    }
}

impl Ord for Gen {
    fn cmp(&self, other: &Self) -> Ordering {
        fn rank(g: &Gen) -> u8 {
            match g {
                Gen::T => 0,
                Gen::TInv => 1,
                Gen::Chord(_) => 2,
            }
        }
        match (self, other) {
            (Gen::Chord(a), Gen::Chord(b)) => natural_cmp(a, b),
            _ => rank(self).cmp(&rank(other)),
        }
    }
}

impl PartialOrd for Gen {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gen::T => f.write_str("t"),
            Gen::TInv => f.write_str("t^-1"),
            Gen::Chord(name) => f.write_str(name),
        }
    }
}

/// Compares identifiers so that embedded numbers sort numerically:
/// `a2 < a10`, `a1 < a1#2 < a2`.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    let mut xs = chunks(a);
    let mut ys = chunks(b);
    loop {
        match (xs.next(), ys.next()) {
            (None, None) => return a.cmp(b),
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(x), Some(y)) => {
                let x_num = x.bytes().all(|c| c.is_ascii_digit());
                let y_num = y.bytes().all(|c| c.is_ascii_digit());
                let ord = match (x_num, y_num) {
                    (true, true) => {
                        let xt = x.trim_start_matches('0');
                        let yt = y.trim_start_matches('0');
                        xt.len().cmp(&yt.len()).then_with(|| xt.cmp(yt))
                    }
                    _ => x.cmp(y),
                };
                if ord != Ordering::Equal {
                    return ord;
                }
            }
        }
    }
}

fn chunks(s: &str) -> impl Iterator<Item = &str> {
    let bytes = s.as_bytes();
    let mut start = 0;
    std::iter::from_fn(move || {
        if start >= bytes.len() {
            return None;
        }
        let digit = bytes[start].is_ascii_digit();
        let mut end = start + 1;
        while end < bytes.len() && bytes[end].is_ascii_digit() == digit {
            end += 1;
        }
        let chunk = &s[start..end];
        start = end;
        Some(chunk)
    })
}

/// A reduced word: no `t` adjacent to `t^-1`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<Gen>);

impl Word {
    pub fn unit() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: impl IntoIterator<Item = Gen>) -> Self {
        let mut w = Word::unit();
        for g in letters {
            w.push(g);
        }
        w
    }

    pub fn push(&mut self, g: Gen) {
        if let (Some(last), Some(inv)) = (self.0.last(), g.inverse()) {
            if *last == inv {
                self.0.pop();
                return;
            }
        }
        self.0.push(g);
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut w = self.clone();
        for g in &other.0 {
            w.push(g.clone());
        }
        w
    }

    pub fn letters(&self) -> &[Gen] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, g) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

/// Sum of the gradings of the letters of `word`; `t` and `t^-1` have degree 0.
pub fn degree_of_word<F>(word: &Word, grading: F) -> Result<i64>
where
    F: Fn(&str) -> Option<i64>,
{
    word.letters().iter().try_fold(0i64, |acc, g| match g {
        Gen::T | Gen::TInv => Ok(acc),
        Gen::Chord(name) => grading(name)
            .map(|d| acc + d)
            .ok_or_else(|| Error::UnknownGenerator(name.clone())),
    })
}

/// Element of the free algebra with integer coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    terms: BTreeMap<Word, BigInt>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(1)
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Poly::monomial(c, Word::unit())
    }

    pub fn monomial(c: impl Into<BigInt>, word: Word) -> Self {
        let mut p = Poly::zero();
        p.add_term(c.into(), word);
        p
    }

    pub fn gen(g: Gen) -> Self {
        Poly::monomial(1, Word::from_letters([g]))
    }

    pub fn chord(name: impl Into<String>) -> Self {
        Poly::gen(Gen::chord(name))
    }

    pub fn t() -> Self {
        Poly::gen(Gen::T)
    }

    pub fn t_inv() -> Self {
        Poly::gen(Gen::TInv)
    }

    /// Product of chords given by name, e.g. `Poly::word(&["a1", "a4"])`.
    pub fn word(names: &[&str]) -> Self {
        Poly::monomial(1, Word::from_letters(names.iter().map(|n| Gen::chord(*n))))
    }

    /// Builds a polynomial from arbitrary (possibly unreduced, repeated)
    /// terms; the result is normalized.
    pub fn from_terms(terms: impl IntoIterator<Item = (BigInt, Vec<Gen>)>) -> Self {
        let mut p = Poly::zero();
        for (c, letters) in terms {
            p.add_term(c, Word::from_letters(letters));
        }
        p
    }

    pub fn add_term(&mut self, c: BigInt, word: Word) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(word);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&Word, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, word: &Word) -> BigInt {
        self.terms.get(word).cloned().unwrap_or_default()
    }

    /// All letters occurring in the polynomial.
    pub fn letters(&self) -> impl Iterator<Item = &Gen> {
        self.terms.keys().flat_map(|w| w.letters().iter())
    }

    pub fn scale(&self, c: &BigInt) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(w, k)| (w.clone(), k * c))
                .collect(),
        }
    }

    /// If this polynomial is `±w` with `w` a word in `t, t^-1` only, returns
    /// its two-sided inverse.
    pub fn unit_inverse(&self) -> Option<Poly> {
        if self.terms.len() != 1 {
            return None;
        }
        let (word, c) = self.terms.iter().next()?;
        if !(c.is_one() || (-c).is_one()) || !word.letters().iter().all(Gen::is_basepoint) {
            return None;
        }
        let inv = Word::from_letters(word.letters().iter().rev().filter_map(Gen::inverse));
        Some(Poly::monomial(c.clone(), inv))
    }

    /// Applies the unital algebra homomorphism determined by `images`.
    ///
    /// Every chord occurring in `self` must have an image. `t` is left fixed
    /// unless it has an image; `t^-1` is sent to the inverse of the image of
    /// `t` (or to its own image, if one is given).
    pub fn substitute(&self, images: &BTreeMap<Gen, Poly>) -> Result<Poly> {
        let t_inv_image = if self.letters().any(|g| *g == Gen::TInv) {
            match (images.get(&Gen::TInv), images.get(&Gen::T)) {
                (Some(p), _) => Some(p.clone()),
                (None, Some(t)) => {
                    Some(t.unit_inverse().ok_or_else(|| Error::NotAUnit("t".into()))?)
                }
                (None, None) => Some(Poly::t_inv()),
            }
        } else {
            None
        };
        let mut out = Poly::zero();
        for (word, c) in &self.terms {
            let mut acc = Poly::constant(c.clone());
            for g in word.letters() {
                let img = match g {
                    Gen::TInv => t_inv_image.clone().unwrap_or_else(Poly::t_inv),
                    Gen::T => images.get(g).cloned().unwrap_or_else(Poly::t),
                    Gen::Chord(name) => images
                        .get(g)
                        .cloned()
                        .ok_or_else(|| Error::UnknownGenerator(name.clone()))?,
                };
                acc = &acc * &img;
                if acc.is_zero() {
                    break;
                }
            }
            out = out + acc;
        }
        Ok(out)
    }

    /// Value of the polynomial after sending each letter to a scalar.
    /// `t^-1` takes the value of `eps(t)`'s inverse, which must be `±1`.
    pub fn evaluate<T>(&self, eps: &BTreeMap<Gen, T>) -> Result<T>
    where
        T: Clone + Num + Neg<Output = T>,
    {
        let lookup = Lookup::new(eps);
        let mut total = T::zero();
        for (word, c) in &self.terms {
            let mut v = int_to::<T>(c)?;
            for g in word.letters() {
                v = v * lookup.get(g)?;
            }
            total = total + v;
        }
        Ok(total)
    }

    /// Coefficients of the part of degree one in `s` after substituting
    /// `x -> s*x + eps(x)` for every chord `x`.
    ///
    /// A monomial `c * x_1 ... x_m` contributes `c * prod_{l != j} eps(x_l)`
    /// to chord `x_j` for every chord position `j`. Basepoint letters only
    /// contribute their scalar values. Entries that come out zero are
    /// omitted.
    pub fn s_linear_part<T>(&self, eps: &BTreeMap<Gen, T>) -> Result<BTreeMap<String, T>>
    where
        T: Clone + Num + Neg<Output = T>,
    {
        let lookup = Lookup::new(eps);
        let mut out: BTreeMap<String, T> = BTreeMap::new();
        for (word, c) in &self.terms {
            let c = int_to::<T>(c)?;
            let values = word
                .letters()
                .iter()
                .map(|g| lookup.get(g))
                .collect::<Result<Vec<T>>>()?;
            // prefix[j] * suffix[j+1] is the product of all values but the j-th
            let mut prefix = Vec::with_capacity(values.len() + 1);
            prefix.push(c);
            for v in &values {
                let next = prefix.last().unwrap().clone() * v.clone();
                prefix.push(next);
            }
            let mut suffix = T::one();
            for (j, g) in word.letters().iter().enumerate().rev() {
                if let Gen::Chord(name) = g {
                    let contribution = prefix[j].clone() * suffix.clone();
                    if !contribution.is_zero() {
                        let slot = out.entry(name.clone()).or_insert_with(T::zero);
                        *slot = slot.clone() + contribution;
                    }
                }
                suffix = values[j].clone() * suffix;
            }
        }
        out.retain(|_, v| !v.is_zero());
        Ok(out)
    }
}

struct Lookup<'a, T> {
    eps: &'a BTreeMap<Gen, T>,
}

impl<'a, T> Lookup<'a, T>
where
    T: Clone + Num + Neg<Output = T>,
{
    fn new(eps: &'a BTreeMap<Gen, T>) -> Self {
        Lookup { eps }
    }

    fn get(&self, g: &Gen) -> Result<T> {
        if let Some(v) = self.eps.get(g) {
            return Ok(v.clone());
        }
        match g {
            Gen::TInv => {
                let t = self
                    .eps
                    .get(&Gen::T)
                    .ok_or_else(|| Error::UnknownGenerator("t".into()))?;
                if t.is_one() || (-t.clone()).is_one() {
                    Ok(t.clone())
                } else {
                    Err(Error::NotAUnit("t".into()))
                }
            }
            Gen::T => Err(Error::UnknownGenerator("t".into())),
            Gen::Chord(name) => Err(Error::UnknownGenerator(name.clone())),
        }
    }
}

fn int_to<T: Num>(c: &BigInt) -> Result<T> {
    // rational types only parse the `p/q` form
    let text = c.to_str_radix(10);
    T::from_str_radix(&text, 10)
        .or_else(|_| T::from_str_radix(&format!("{text}/1"), 10))
        .map_err(|_| Error::InvalidValue(format!("coefficient {c} not representable")))
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        for (w, c) in rhs.terms {
            self.add_term(c, w);
        }
        self
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.clone() + rhs.clone()
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.into_iter().map(|(w, c)| (w, -c)).collect(),
        }
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -self.clone()
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        self + (-rhs)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.clone() - rhs.clone()
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &rhs.terms {
                out.add_term(c1 * c2, w1.concat(w2));
            }
        }
        out
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl From<i64> for Poly {
    fn from(c: i64) -> Self {
        Poly::constant(c)
    }
}

impl fmt::Display for Poly {
    /// `1 - a4 - 2*a6*a5*a4 + t^-1`; the zero polynomial prints as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (word, c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else if c.is_negative() {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            if word.is_unit() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{word}")?;
            } else {
                write!(f, "{mag}*{word}")?;
            }
        }
        Ok(())
    }
}
