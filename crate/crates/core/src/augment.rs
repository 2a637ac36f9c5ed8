//! Augmentations: ring-valued DGA maps that kill the differential.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{Gen, Poly};
use crate::dga::Dga;
use crate::error::{Error, Result};
use crate::linearize::linearized_differential;

/// Default bound on the number of grid points an enumeration may cover.
pub const DEFAULT_SEARCH_CAP: u128 = 100_000_000;

/// Coefficient ring of an augmentation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RingDesc {
    Integers,
    Rationals,
    Mod(u64),
}

impl RingDesc {
    pub fn is_field(&self) -> bool {
        match self {
            RingDesc::Integers => false,
            RingDesc::Rationals => true,
            RingDesc::Mod(m) => is_prime(*m),
        }
    }

    pub fn require_field(&self) -> Result<()> {
        if self.is_field() {
            Ok(())
        } else {
            Err(Error::FieldRequired(*self))
        }
    }

    /// Canonical representative of `v` in this ring, or `InvalidValue`.
    pub fn canonical(&self, v: &BigRational) -> Result<BigRational> {
        match self {
            RingDesc::Rationals => Ok(v.clone()),
            RingDesc::Integers if v.is_integer() => Ok(v.clone()),
            RingDesc::Mod(m) if v.is_integer() => Ok(BigRational::from_integer(
                v.to_integer().mod_floor(&BigInt::from(*m)),
            )),
            _ => Err(Error::InvalidValue(format!("{v} is not an element of {self}"))),
        }
    }

    pub fn is_zero(&self, v: &BigRational) -> bool {
        match self {
            RingDesc::Mod(m) => v.is_integer() && v.to_integer().is_multiple_of(&BigInt::from(*m)),
            _ => v.is_zero(),
        }
    }
}

impl fmt::Display for RingDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingDesc::Integers => f.write_str("Z"),
            RingDesc::Rationals => f.write_str("Q"),
            RingDesc::Mod(m) => write!(f, "Z/{m}"),
        }
    }
}

impl FromStr for RingDesc {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "Z" => Ok(RingDesc::Integers),
            "Q" => Ok(RingDesc::Rationals),
            _ => {
                let m = s
                    .strip_prefix("Z/")
                    .and_then(|m| m.trim().parse::<u64>().ok())
                    .ok_or_else(|| Error::InvalidValue(format!("unknown ring `{s}`")))?;
                if m < 2 {
                    return Err(Error::InvalidValue(format!("modulus must be >= 2, got {m}")));
                }
                Ok(RingDesc::Mod(m))
            }
        }
    }
}

impl Serialize for RingDesc {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RingDesc {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Values of an augmentation on degree-0 chords; every other chord goes to
/// zero and `t` goes to `-1`. Only nonzero values are stored, in canonical
/// form for the ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Augmentation {
    ring: RingDesc,
    values: BTreeMap<String, BigRational>,
}

impl Augmentation {
    pub fn new(ring: RingDesc) -> Self {
        Augmentation {
            ring,
            values: BTreeMap::new(),
        }
    }

    /// Integer-valued augmentation from `(chord, value)` pairs.
    pub fn integral<S: Into<String>>(pairs: impl IntoIterator<Item = (S, i64)>) -> Self {
        let mut aug = Augmentation::new(RingDesc::Integers);
        for (name, v) in pairs {
            aug.set(&name.into(), BigRational::from_integer(v.into()))
                .expect("integers are integral");
        }
        aug
    }

    pub fn ring(&self) -> RingDesc {
        self.ring
    }

    pub fn set(&mut self, chord: &str, value: BigRational) -> Result<()> {
        let v = self.ring.canonical(&value)?;
        if v.is_zero() {
            self.values.remove(chord);
        } else {
            self.values.insert(chord.to_string(), v);
        }
        Ok(())
    }

    pub fn value(&self, chord: &str) -> BigRational {
        self.values.get(chord).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Nonzero values in chord-name order.
    pub fn values(&self) -> impl Iterator<Item = (&String, &BigRational)> {
        self.values.iter()
    }

    pub fn t_value(&self) -> BigRational {
        self.ring
            .canonical(&-BigRational::one())
            .expect("-1 lies in every ring")
    }

    /// Composition with `Z -> Z/p` (or `Z/m -> Z/p` for `p | m`).
    pub fn reduce_mod(&self, p: u64) -> Result<Augmentation> {
        match self.ring {
            RingDesc::Integers => {}
            RingDesc::Mod(m) if m % p == 0 => {}
            other => {
                return Err(Error::RingMismatch(other, RingDesc::Mod(p)));
            }
        }
        let mut out = Augmentation::new(RingDesc::Mod(p));
        for (name, v) in &self.values {
            out.set(name, v.clone())?;
        }
        Ok(out)
    }

    /// Same values read in another ring (e.g. an integral augmentation viewed
    /// over `Q`).
    pub fn with_ring(&self, ring: RingDesc) -> Result<Augmentation> {
        if let RingDesc::Mod(p) = ring {
            return self.reduce_mod(p);
        }
        let mut out = Augmentation::new(ring);
        for (name, v) in &self.values {
            out.set(name, v.clone())?;
        }
        Ok(out)
    }

    /// Checks that every assigned chord exists in `dga` and has degree 0.
    pub fn check_support(&self, dga: &Dga) -> Result<()> {
        for name in self.values.keys() {
            match dga.degree(name) {
                None => return Err(Error::UnknownGenerator(name.clone())),
                Some(0) => {}
                Some(d) => {
                    return Err(Error::InvalidValue(format!(
                        "chord `{name}` has degree {d} and must map to 0"
                    )))
                }
            }
        }
        Ok(())
    }

    /// Rational values of every letter of `dga`, including `t -> -1`.
    pub fn scalar_map(&self, dga: &Dga) -> Result<BTreeMap<Gen, BigRational>> {
        self.check_support(dga)?;
        let mut map: BTreeMap<Gen, BigRational> = dga
            .chords()
            .iter()
            .map(|c| (Gen::chord(c.name.clone()), self.value(&c.name)))
            .collect();
        map.insert(Gen::T, -BigRational::one());
        map.insert(Gen::TInv, -BigRational::one());
        Ok(map)
    }

    /// Literal form `a1=2, a2=-1 @ Z`; zero values are omitted.
    pub fn to_literal(&self) -> String {
        let body: Vec<String> = self
            .values
            .iter()
            .map(|(n, v)| format!("{n}={v}"))
            .collect();
        if body.is_empty() {
            format!("@ {}", self.ring)
        } else {
            format!("{} @ {}", body.join(", "), self.ring)
        }
    }

    /// Parses `a1=2, a2=-1, a3=1 @ Z/5`. Without an `@` suffix the ring is
    /// `default_ring`.
    pub fn parse_literal(text: &str, default_ring: RingDesc) -> Result<Augmentation> {
        let (body, ring) = match text.rsplit_once('@') {
            Some((body, ring)) => (body, ring.parse::<RingDesc>()?),
            None => (text, default_ring),
        };
        let mut aug = Augmentation::new(ring);
        for item in body.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidValue(format!("expected `chord=value`, got `{item}`")))?;
            let name = name.trim();
            if name == "t" {
                return Err(Error::InvalidValue("t is always sent to -1".into()));
            }
            if name.is_empty() {
                return Err(Error::InvalidValue(format!("missing chord name in `{item}`")));
            }
            if aug.values.contains_key(name) {
                return Err(Error::InvalidValue(format!("`{name}` assigned twice")));
            }
            let v = value
                .trim()
                .parse::<BigRational>()
                .map_err(|_| Error::InvalidValue(format!("bad value `{}`", value.trim())))?;
            aug.set(name, v)?;
        }
        Ok(aug)
    }
}

impl fmt::Display for Augmentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_literal())
    }
}

/// `true` iff `eps(d a) = 0` in the ring for every chord `a`.
pub fn is_augmentation(dga: &Dga, aug: &Augmentation) -> Result<bool> {
    let eps = aug.scalar_map(dga)?;
    for chord in dga.chords() {
        let v = dga.diff(&chord.name).evaluate(&eps)?;
        if !aug.ring().is_zero(&v) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Degree-1 differentials restricted to monomials in degree-0 chords, with
/// `t` evaluated at `-1`. These are the only constraints an assignment on
/// degree-0 chords can violate.
struct Constraint {
    id: usize,
    terms: Vec<(BigInt, Vec<usize>)>,
    vars: Vec<usize>,
}

fn compile_constraints(dga: &Dga, vars: &[String]) -> Vec<Constraint> {
    let index: BTreeMap<&str, usize> = vars.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let mut out = Vec::new();
    for chord in dga.chords_in_degree(1) {
        let mut terms = Vec::new();
        'mono: for (word, c) in dga.diff(&chord.name).terms() {
            let mut coeff = c.clone();
            let mut factors = Vec::new();
            for g in word.letters() {
                match g {
                    Gen::T | Gen::TInv => coeff = -coeff,
                    Gen::Chord(name) => match index.get(name.as_str()) {
                        Some(&i) => factors.push(i),
                        None => continue 'mono,
                    },
                }
            }
            terms.push((coeff, factors));
        }
        let mut vars: Vec<usize> = terms.iter().flat_map(|(_, f)| f.iter().copied()).collect();
        vars.sort_unstable();
        vars.dedup();
        out.push(Constraint {
            id: out.len(),
            terms,
            vars,
        });
    }
    out
}

/// Greedy variable order: next is the variable completing the most
/// constraints, then the one touching the most partially assigned ones.
fn search_order(n: usize, constraints: &[Constraint]) -> Vec<usize> {
    let mut assigned = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let best = (0..n)
            .filter(|v| !assigned[*v])
            .max_by_key(|&v| {
                let mut completes = 0usize;
                let mut touches = 0usize;
                for c in constraints.iter().filter(|c| c.vars.contains(&v)) {
                    let missing = c.vars.iter().filter(|u| !assigned[**u]).count();
                    if missing == 1 {
                        completes += 1;
                    }
                    if missing < c.vars.len() {
                        touches += 1;
                    }
                }
                (completes, touches, std::cmp::Reverse(v))
            })
            .expect("unassigned variable remains");
        assigned[best] = true;
        order.push(best);
    }
    order
}

/// Depth-first search over `domain_len^n` index assignments, checking each
/// constraint as soon as its last variable is set. Returns solutions as
/// domain indices, sorted lexicographically.
fn backtrack<F>(n: usize, domain_len: usize, constraints: &[Constraint], holds: F) -> Vec<Vec<usize>>
where
    F: Fn(&Constraint, &[usize]) -> bool,
{
    let assignment = vec![0usize; n];
    if constraints
        .iter()
        .filter(|c| c.vars.is_empty())
        .any(|c| !holds(c, &assignment))
    {
        return Vec::new();
    }
    if n == 0 {
        return vec![Vec::new()];
    }
    let order = search_order(n, constraints);
    let mut position = vec![0usize; n];
    for (depth, &v) in order.iter().enumerate() {
        position[v] = depth;
    }
    let mut ready: Vec<Vec<&Constraint>> = vec![Vec::new(); n];
    for c in constraints.iter().filter(|c| !c.vars.is_empty()) {
        let last = c.vars.iter().map(|v| position[*v]).max().expect("nonempty");
        ready[last].push(c);
    }

    struct State<'a, F> {
        order: Vec<usize>,
        ready: Vec<Vec<&'a Constraint>>,
        domain_len: usize,
        holds: F,
        assignment: Vec<usize>,
        solutions: Vec<Vec<usize>>,
    }

    fn go<F: Fn(&Constraint, &[usize]) -> bool>(s: &mut State<'_, F>, depth: usize) {
        if depth == s.order.len() {
            s.solutions.push(s.assignment.clone());
            return;
        }
        let var = s.order[depth];
        for value in 0..s.domain_len {
            s.assignment[var] = value;
            if s.ready[depth].iter().all(|c| (s.holds)(c, &s.assignment)) {
                go(s, depth + 1);
            }
        }
    }

    let mut state = State {
        order,
        ready,
        domain_len,
        holds,
        assignment,
        solutions: Vec::new(),
    };
    go(&mut state, 0);
    let mut solutions = state.solutions;
    solutions.sort();
    solutions
}

fn grid_size(domain_len: u128, vars: usize, cap: u128) -> Result<()> {
    let size = u32::try_from(vars)
        .ok()
        .and_then(|v| domain_len.checked_pow(v));
    match size {
        Some(s) if s <= cap => Ok(()),
        Some(s) => Err(Error::SearchTooLarge {
            size: s.to_string(),
            cap,
        }),
        None => Err(Error::SearchTooLarge {
            size: format!("{domain_len}^{vars}"),
            cap,
        }),
    }
}

fn degree_zero_chords(dga: &Dga) -> Vec<String> {
    dga.chords_in_degree(0).map(|c| c.name.clone()).collect()
}

fn finish(
    dga: &Dga,
    ring: RingDesc,
    vars: &[String],
    solutions: Vec<Vec<usize>>,
    value_of: impl Fn(usize) -> BigRational,
) -> Result<Vec<Augmentation>> {
    let mut out = Vec::with_capacity(solutions.len());
    for sol in solutions {
        let mut aug = Augmentation::new(ring);
        for (name, &idx) in vars.iter().zip(&sol) {
            aug.set(name, value_of(idx))?;
        }
        if is_augmentation(dga, &aug)? {
            out.push(aug);
        }
    }
    Ok(out)
}

/// All `Z/m`-valued augmentations, ordered lexicographically by the values
/// (representatives `0..m`) of the degree-0 chords in declaration order.
pub fn enumerate_augmentations(dga: &Dga, ring: RingDesc, cap: u128) -> Result<Vec<Augmentation>> {
    let RingDesc::Mod(m) = ring else {
        return Err(Error::InvalidParameter(format!(
            "exhaustive enumeration needs a finite ring Z/m, got {ring}"
        )));
    };
    let vars = degree_zero_chords(dga);
    grid_size(u128::from(m), vars.len(), cap)?;
    let constraints = compile_constraints(dga, &vars);
    let modulus = u128::from(m);
    let reduced: Vec<Vec<(u128, &[usize])>> = constraints
        .iter()
        .map(|c| {
            c.terms
                .iter()
                .map(|(k, f)| {
                    let k = k.mod_floor(&BigInt::from(m)).to_u128().expect("reduced below m");
                    (k, f.as_slice())
                })
                .collect()
        })
        .collect();
    let domain = usize::try_from(m).map_err(|_| Error::InvalidParameter("modulus too large".into()))?;
    let solutions = backtrack(vars.len(), domain, &constraints, |c, assignment| {
        let terms = &reduced[c.id];
        let mut total = 0u128;
        for (k, factors) in terms {
            let mut v = *k;
            for &f in *factors {
                v = v * assignment[f] as u128 % modulus;
            }
            total = (total + v) % modulus;
        }
        total == 0
    });
    finish(dga, ring, &vars, solutions, |i| {
        BigRational::from_integer(BigInt::from(i))
    })
}

/// All integer augmentations with every value in `[-bound, bound]`.
pub fn enumerate_augmentations_bounded(dga: &Dga, bound: u64, cap: u128) -> Result<Vec<Augmentation>> {
    let vars = degree_zero_chords(dga);
    let width = 2 * u128::from(bound) + 1;
    grid_size(width, vars.len(), cap)?;
    let constraints = compile_constraints(dga, &vars);
    let offset = BigInt::from(bound);
    let values: Vec<BigInt> = (0..width as usize)
        .map(|i| BigInt::from(i) - &offset)
        .collect();
    let solutions = backtrack(vars.len(), values.len(), &constraints, |c, assignment| {
        let mut total = BigInt::zero();
        for (k, factors) in &c.terms {
            let mut v = k.clone();
            for &f in factors {
                v *= &values[assignment[f]];
            }
            total += v;
        }
        total.is_zero()
    });
    finish(dga, RingDesc::Integers, &vars, solutions, |i| {
        BigRational::from_integer(values[i].clone())
    })
}

/// Dimension of the Zariski tangent space of the augmentation variety at
/// `aug`: `dim A_0 - rank(d^eps : A_1 -> A_0)`.
pub fn tangent_space_dim(dga: &Dga, aug: &Augmentation) -> Result<usize> {
    aug.ring().require_field()?;
    let complex = linearized_differential(dga, aug)?;
    let rank = complex.boundary(1).rank_over(aug.ring())?;
    Ok(complex.basis(0).len() - rank)
}

/// Evaluates `p` under `aug`, for reporting which differential fails.
pub fn evaluate(dga: &Dga, aug: &Augmentation, p: &Poly) -> Result<BigRational> {
    let eps = aug.scalar_map(dga)?;
    let v = p.evaluate(&eps)?;
    aug.ring().canonical(&v)
}
