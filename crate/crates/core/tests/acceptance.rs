//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any fails. All comparisons are exact.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lch::augment::{
    enumerate_augmentations, enumerate_augmentations_bounded, is_augmentation, tangent_space_dim, Augmentation,
    RingDesc, DEFAULT_SEARCH_CAP,
};
use lch::dga::{
    connected_sum, euler_tb, geography_dga, lambda0, lambda0_epsilon, lambda_k, lambda_k_epsilon, unknot, validate,
    Dga,
};
use lch::homology::{bockstein, field_homology, integral_homology, smith_normal_form, uct_check, GradedHomology, HomologyGroup};
use lch::linearize::{linearized_differential, ChainComplex};
use lch::matrix::IntMatrix;
use lch::verify::{connected_sum_additivity_check, filling_obstruction, sabloff_check};
use lch::{cli, format, Error};

type Outcome = Result<String, String>;
type Criterion<'a> = Box<dyn Fn() -> Outcome + 'a>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e(err: Error) -> String {
    err.to_string()
}

fn lch_z(d: &Dga, aug: &Augmentation) -> Result<GradedHomology, String> {
    integral_homology(&linearized_differential(d, aug).map_err(e)?).map_err(e)
}

fn cyclic(n: i64) -> HomologyGroup {
    HomologyGroup::from_orders(0, [n])
}

/// Degree-by-degree table; degrees not listed must vanish.
fn expect_table(h: &GradedHomology, table: &[(i64, HomologyGroup)], what: &str) -> Result<(), String> {
    let expected = GradedHomology::from_groups(table.iter().cloned());
    ensure(h == &expected, || format!("{what}: got\n{h}expected\n{expected}"))
}

fn criterion_1() -> Outcome {
    for n in [2, 3, 4, 6, 12] {
        let h = lch_z(&lambda0(), &lambda0_epsilon(n))?;
        expect_table(
            &h,
            &[
                (1, HomologyGroup::free(1)),
                (0, HomologyGroup::from_orders(2, [n])),
                (-1, cyclic(n)),
            ],
            &format!("lambda0, eps_{n}"),
        )?;
    }
    Ok("n = 2, 3, 4, 6, 12".into())
}

fn criterion_2() -> Outcome {
    let d = lambda_k(1).map_err(e)?;
    for n in [2, 5] {
        let h = lch_z(&d, &lambda_k_epsilon(1, n))?;
        expect_table(
            &h,
            &[
                (1, HomologyGroup::from_orders(1, [n])),
                (0, HomologyGroup::free(2)),
                (-2, cyclic(n)),
            ],
            &format!("lambda_1, eps_{n}"),
        )?;
    }
    Ok("n = 2, 5".into())
}

fn criterion_3() -> Outcome {
    for k in [2, 3] {
        let d = lambda_k(k).map_err(e)?;
        for n in [3, 4] {
            let h = lch_z(&d, &lambda_k_epsilon(k, n))?;
            expect_table(
                &h,
                &[
                    (1, HomologyGroup::free(1)),
                    (0, HomologyGroup::free(2)),
                    (k, cyclic(n)),
                    (-k - 1, cyclic(n)),
                ],
                &format!("lambda_{k}, eps_{n}"),
            )?;
        }
    }
    Ok("k = 2, 3; n = 3, 4".into())
}

fn criterion_4() -> Outcome {
    let mut seen = Vec::new();
    for (n, p) in [(6, 2), (6, 3), (6, 5), (5, 2)] {
        let aug = lambda0_epsilon(n).reduce_mod(p).map_err(e)?;
        let c = linearized_differential(&lambda0(), &aug).map_err(e)?;
        let dims = field_homology(&c, RingDesc::Mod(p)).map_err(e)?;
        let dim0 = dims.get(&0).copied().unwrap_or(0);
        let want = if n % p as i64 == 0 { 4 } else { 2 };
        ensure(dim0 == want, || format!("(n, p) = ({n}, {p}): dim LCH_0 = {dim0}, expected {want}"))?;
        seen.push(format!("({n},{p})->{dim0}"));
    }
    Ok(seen.join(" "))
}

fn criterion_5() -> Outcome {
    let d = lambda0();
    // a1 = 0, a3 = 1, a4 = 0, a6 = 1 lies on both components
    let both = Augmentation::integral([("a3", 1), ("a6", 1), ("a2", 2), ("a5", -1)]);
    let only_v1 = lambda0_epsilon(2);
    let only_v2 = Augmentation::integral([("a3", 1), ("a4", 1), ("a5", 7)]);
    for ring in [RingDesc::Mod(5), RingDesc::Rationals] {
        for (aug, want, label) in [(&both, 4, "V1 cap V2"), (&only_v1, 3, "V1 minus V2"), (&only_v2, 3, "V2 minus V1")] {
            let aug = aug.with_ring(ring).map_err(e)?;
            ensure(is_augmentation(&d, &aug).map_err(e)?, || format!("{label} point is not an augmentation"))?;
            let dim = tangent_space_dim(&d, &aug).map_err(e)?;
            ensure(dim == want, || format!("{label} over {ring}: tangent dimension {dim}, expected {want}"))?;
        }
    }
    Ok("4 on the intersection, 3 off it, over Z/5 and Q".into())
}

fn criterion_6() -> Outcome {
    let d = lambda0();
    let names: Vec<String> = d.chords_in_degree(0).map(|c| c.name.clone()).collect();
    ensure(names.len() == 6, || format!("{} degree-0 chords", names.len()))?;
    let mut brute = BTreeSet::new();
    for mask in 0u32..64 {
        let mut aug = Augmentation::new(RingDesc::Mod(2));
        for (i, n) in names.iter().enumerate() {
            if mask >> i & 1 == 1 {
                aug.set(n, BigInt::from(1).into()).map_err(e)?;
            }
        }
        // direct evaluation of every differential, independent of the solver
        let eps = aug.scalar_map(&d).map_err(e)?;
        let ok = d.chords().iter().all(|c| {
            let v = d.diff(&c.name).evaluate(&eps).unwrap();
            v.to_integer() % 2 == BigInt::zero()
        });
        if ok {
            brute.insert(aug);
        }
    }
    let found: BTreeSet<Augmentation> = enumerate_augmentations(&d, RingDesc::Mod(2), DEFAULT_SEARCH_CAP)
        .map_err(e)?
        .into_iter()
        .collect();
    ensure(brute.len() == 16, || format!("brute force found {}", brute.len()))?;
    ensure(found == brute, || "enumerator disagrees with brute force".into())?;
    Ok("16 of 64".into())
}

struct Corpus {
    dgas: Vec<(String, Dga)>,
    /// Per corpus entry, the enumerated `Z/2` and `Z/3` augmentations.
    field_augs: Vec<Vec<Augmentation>>,
}

fn corpus() -> Result<Corpus, String> {
    let l1 = lambda_k(1).map_err(e)?;
    let mut dgas = vec![("lambda0".to_string(), lambda0())];
    for k in 1..=4 {
        dgas.push((format!("lambda_k({k})"), lambda_k(k).map_err(e)?));
    }
    dgas.push(("unknot".into(), unknot()));
    dgas.push(("unknot#unknot".into(), connected_sum(&unknot(), &unknot()).map_err(e)?.dga));
    dgas.push(("lambda0#lambda_1".into(), connected_sum(&lambda0(), &l1).map_err(e)?.dga));
    dgas.push(("lambda0#unknot".into(), connected_sum(&lambda0(), &unknot()).map_err(e)?.dga));
    dgas.push(("geography(2; 1; 4)".into(), geography_dga(2, 1, &[4]).map_err(e)?.0));
    dgas.push(("geography(-2; 1; 3)".into(), geography_dga(-2, 1, &[3]).map_err(e)?.0));
    let mut field_augs = Vec::new();
    for (_, d) in &dgas {
        let mut augs = Vec::new();
        for p in [2, 3] {
            augs.extend(enumerate_augmentations(d, RingDesc::Mod(p), DEFAULT_SEARCH_CAP).map_err(e)?);
        }
        field_augs.push(augs);
    }
    Ok(Corpus { dgas, field_augs })
}

fn products_vanish(c: &ChainComplex) -> bool {
    c.degrees().iter().chain(c.degrees().last().map(|d| d + 1).iter()).all(|&d| {
        let mut prod = c.boundary(d - 1).mul(&c.boundary(d));
        if let RingDesc::Mod(p) = c.ring() {
            prod = prod.reduce_mod(p);
        }
        prod.is_zero()
    })
}

fn criterion_7(corpus: &Corpus) -> Outcome {
    let mut total = 0;
    for ((name, d), augs) in corpus.dgas.iter().zip(&corpus.field_augs) {
        let report = validate(d).map_err(e)?;
        ensure(report.d_squared_ok && report.grading_ok, || format!("{name}: validation fails"))?;
        ensure(!augs.is_empty(), || format!("{name}: no field augmentations"))?;
        for aug in augs {
            let c = linearized_differential(d, aug).map_err(e)?;
            ensure(products_vanish(&c), || format!("{name}, {aug}: linearized square nonzero"))?;
            total += 1;
        }
    }
    Ok(format!("{} DGAs, {total} augmentations over Z/2 and Z/3", corpus.dgas.len()))
}

fn criterion_8(corpus: &Corpus) -> Outcome {
    let mut total = 0;
    for ((name, d), augs) in corpus.dgas.iter().zip(&corpus.field_augs) {
        for aug in augs {
            let r = sabloff_check(d, aug).map_err(e)?;
            ensure(r.duality_ok, || format!("{name}, {aug}:\n{r}"))?;
            total += 1;
        }
    }
    Ok(format!("{total} field augmentations"))
}

fn criterion_9() -> Outcome {
    let out = cli::run(["lch", "geography", "--grading", "2", "--free", "1", "--torsion", "4,6"]);
    ensure(out.code == 0, || format!("exit {}: {}{}", out.code, out.stdout, out.stderr))?;
    ensure(out.stdout.lines().any(|l| l == "H_2 = Z + Z/4 + Z/6"), || out.stdout.clone())?;
    let (d, aug) = geography_dga(2, 1, &[4, 6]).map_err(e)?;
    let h = lch_z(&d, &aug)?;
    let want = HomologyGroup::free(1).direct_sum(&cyclic(4)).direct_sum(&cyclic(6));
    ensure(h.get(2) == want, || format!("H_2 = {}, expected {want}", h.get(2)))?;

    let out = cli::run(["lch", "geography", "--grading", "-3", "--torsion", "5"]);
    ensure(out.code == 0, || format!("exit {}: {}{}", out.code, out.stdout, out.stderr))?;
    ensure(out.stdout.lines().any(|l| l == "H_-3 = Z/5"), || out.stdout.clone())?;
    let (d, aug) = geography_dga(-3, 0, &[5]).map_err(e)?;
    let h = lch_z(&d, &aug)?;
    ensure(h.get(-3) == cyclic(5), || format!("H_-3 = {}", h.get(-3)))?;
    Ok("H_2 = Z + Z/4 + Z/6, H_-3 = Z/5".into())
}

fn criterion_10() -> Outcome {
    let l1 = lambda_k(1).map_err(e)?;
    let r = connected_sum_additivity_check(&lambda0(), &lambda0_epsilon(2), &l1, &lambda_k_epsilon(1, 3)).map_err(e)?;
    ensure(r.ok, || r.to_string())?;
    let row = |deg: i64| r.rows.iter().find(|x| x.degree == deg).map(|x| x.combined.clone());
    ensure(row(-1) == Some(cyclic(2)), || format!("degree -1: {:?}", row(-1)))?;
    ensure(row(-2) == Some(cyclic(3)), || format!("degree -2: {:?}", row(-2)))?;
    Ok(format!("{} degrees compared", r.rows.len()))
}

fn criterion_11() -> Outcome {
    let aug = lambda_k_epsilon(1, 3).reduce_mod(3).map_err(e)?;
    let v = filling_obstruction(&lambda_k(1).map_err(e)?, &aug).map_err(e)?;
    ensure(
        v.total_dim == 7 && v.expected_filling_dim == Some(3) && !v.geometric_possible,
        || format!("lambda_1: {v:?}"),
    )?;
    let u = filling_obstruction(&unknot(), &Augmentation::new(RingDesc::Mod(3))).map_err(e)?;
    ensure(
        u.total_dim == 1 && u.expected_filling_dim == Some(1) && u.geometric_possible,
        || format!("unknot: {u:?}"),
    )?;
    Ok("lambda_1: 7 vs 3, not geometric; unknot: 1 = 1".into())
}

/// Integral augmentations of a corpus DGA: all with values in `{-1, 0, 1}`,
/// plus the `epsilon_n` families where they apply.
fn integral_augs(name: &str, d: &Dga) -> Result<Vec<Augmentation>, String> {
    let mut augs = enumerate_augmentations_bounded(d, 1, DEFAULT_SEARCH_CAP).map_err(e)?;
    let ns = [2, 3, 4, 6, 12];
    match name {
        "lambda0" => augs.extend(ns.iter().map(|&n| lambda0_epsilon(n))),
        n if n.starts_with("lambda_k(") => {
            let k: i64 = n["lambda_k(".len()..n.len() - 1].parse().unwrap();
            augs.extend(ns.iter().map(|&n| lambda_k_epsilon(k, n)));
        }
        _ => {}
    }
    Ok(augs)
}

fn criterion_12(corpus: &Corpus) -> Outcome {
    let mut triples = 0;
    let mut groups = 0;
    for (name, d) in &corpus.dgas {
        let tb = euler_tb(d);
        for aug in integral_augs(name, d)? {
            let c = linearized_differential(d, &aug).map_err(e)?;
            let h = integral_homology(&c).map_err(e)?;
            groups += 1;
            ensure(h.euler_characteristic() == tb, || {
                format!("{name}, {aug}: Euler characteristic {} vs tb {tb}", h.euler_characteristic())
            })?;
            for p in [2, 3, 5, 7] {
                let field = RingDesc::Mod(p);
                let dims = field_homology(&c, field).map_err(e)?;
                let reduced = aug.reduce_mod(p).map_err(e)?;
                let direct = field_homology(&linearized_differential(d, &reduced).map_err(e)?, field).map_err(e)?;
                ensure(dims == direct, || format!("{name}, {aug}, p = {p}: reduction is not natural"))?;
                ensure(uct_check(&h, field, &dims).map_err(e)?, || {
                    format!("{name}, {aug}, p = {p}: dims {dims:?} vs\n{h}")
                })?;
                triples += 1;
            }
        }
    }
    Ok(format!("{triples} triples, {groups} Euler characteristics"))
}

/// Number of cyclic summands of order exactly 2 in the primary
/// decomposition, which is what the first Bockstein detects.
fn order_two_summands(g: &HomologyGroup) -> usize {
    g.primary_decomposition()
        .iter()
        .filter(|(p, q)| *p == BigInt::from(2) && *q == BigInt::from(2))
        .count()
}

fn criterion_13() -> Outcome {
    let c = linearized_differential(&lambda0(), &lambda0_epsilon(2)).map_err(e)?;
    let ranks = bockstein(&c).map_err(e)?;
    ensure(ranks.get(&0) == Some(&1), || format!("eps_2: ranks {ranks:?}"))?;
    let c = linearized_differential(&lambda0(), &lambda0_epsilon(3)).map_err(e)?;
    let ranks = bockstein(&c).map_err(e)?;
    ensure(ranks.is_empty(), || format!("eps_3: ranks {ranks:?}"))?;
    for n in [2, 3, 4, 6, 12] {
        let c = linearized_differential(&lambda0(), &lambda0_epsilon(n)).map_err(e)?;
        let h = integral_homology(&c).map_err(e)?;
        let ranks = bockstein(&c).map_err(e)?;
        for d in c.degrees().into_iter().chain([c.degrees().last().unwrap() + 1]) {
            let got = ranks.get(&d).copied().unwrap_or(0);
            let want = order_two_summands(&h.get(d - 1));
            ensure(got == want, || format!("eps_{n}, degree {d}: rank {got}, torsion predicts {want}"))?;
        }
    }
    Ok("eps_2: rank 1 from degree 0; eps_3: zero".into())
}

fn criterion_14() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0014);
    for case in 0..1000 {
        let rows = common::random_matrix(&mut rng, 12, 9);
        let m = IntMatrix::from_rows(&rows);
        let s = smith_normal_form(&m);
        let fail = |what: &str| format!("case {case}: {what} for {m}");
        ensure(s.u.mul(&m).mul(&s.v) == s.d, || fail("U M V != D"))?;
        ensure(s.u.determinant().abs() == BigInt::from(1), || fail("U not unimodular"))?;
        ensure(s.v.determinant().abs() == BigInt::from(1), || fail("V not unimodular"))?;
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                ensure(i == j || s.d.get(i, j).is_zero(), || fail("D not diagonal"))?;
            }
        }
        let diag = s.diagonal();
        let n = s.d.rows().min(s.d.cols());
        ensure((diag.len()..n).all(|i| s.d.get(i, i).is_zero()), || fail("zeros not trailing"))?;
        ensure(diag.iter().all(|x| x.is_positive()), || fail("negative factor"))?;
        ensure(diag.windows(2).all(|w| (&w[1] % &w[0]).is_zero()), || fail("divisibility chain"))?;
        let rank = m.rank_rational();
        ensure(diag.len() == rank, || fail("rank"))?;
        let oracle = common::determinantal_invariant_factors(&rows, rank);
        let got: Vec<i128> = diag.iter().map(|x| i128::try_from(x).unwrap()).collect();
        ensure(got == oracle, || fail(&format!("factors {got:?} vs minors {oracle:?}")))?;
    }
    Ok("1000 matrices up to 12x12".into())
}

fn fixtures() -> Vec<(&'static str, Dga)> {
    vec![
        ("lambda0.dga", lambda0()),
        ("lambda_k1.dga", lambda_k(1).unwrap()),
        ("lambda_k2.dga", lambda_k(2).unwrap()),
        ("lambda_k3.dga", lambda_k(3).unwrap()),
        ("unknot.dga", unknot()),
    ]
}

fn mutate(rng: &mut ChaCha8Rng, text: &str) -> String {
    const ALPHABET: &[char] = &[
        'a', 'd', 'g', 't', '1', '0', '9', ' ', '\n', '\r', '*', '+', '-', '^', '=', '#', '"', '\\', 'é', '\t',
    ];
    let mut chars: Vec<char> = text.chars().collect();
    for _ in 0..rng.gen_range(1..=6) {
        let pos = rng.gen_range(0..=chars.len());
        match rng.gen_range(0..3) {
            0 => chars.insert(pos, ALPHABET[rng.gen_range(0..ALPHABET.len())]),
            1 if pos < chars.len() => {
                chars.remove(pos);
            }
            _ if pos < chars.len() => chars[pos] = ALPHABET[rng.gen_range(0..ALPHABET.len())],
            _ => {}
        }
    }
    chars.into_iter().collect()
}

fn criterion_15() -> Outcome {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let mut texts = Vec::new();
    for (file, expected) in fixtures() {
        let text = std::fs::read_to_string(dir.join(file)).map_err(|err| format!("{file}: {err}"))?;
        let parsed = format::parse(&text).map_err(|err| format!("{file}: {err}"))?;
        ensure(parsed == expected, || format!("{file} differs from its constructor"))?;
        ensure(format::serialize(&parsed) == text, || format!("{file} is not in canonical form"))?;
        ensure(format::parse(&format::serialize(&parsed)).map_err(e)? == parsed, || format!("{file} round trip"))?;
        texts.push(text);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0015);
    let (mut accepted, mut rejected) = (0, 0);
    for i in 0..10_000 {
        let input = if i % 4 == 0 {
            let len = rng.gen_range(0..200);
            let bytes: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
            String::from_utf8_lossy(&bytes).into_owned()
        } else {
            let pick = rng.gen_range(0..texts.len());
            mutate(&mut rng, &texts[pick])
        };
        let result = catch_unwind(|| format::parse(&input)).map_err(|_| format!("parser panicked on {input:?}"))?;
        match result {
            Ok(d) => {
                let again = format::parse(&format::serialize(&d)).map_err(|err| format!("{input:?}: {err}"))?;
                ensure(again == d, || format!("round trip lost data for {input:?}"))?;
                accepted += 1;
            }
            Err(Error::Parse { .. } | Error::DuplicateGenerator(_) | Error::UnknownGenerator(_)) => rejected += 1,
            Err(other) => return Err(format!("unexpected error {other:?} for {input:?}")),
        }
    }
    Ok(format!("{} fixtures; fuzz: {accepted} accepted, {rejected} rejected", texts.len()))
}

fn main() {
    let corpus = catch_unwind(corpus);
    let corpus = match corpus {
        Ok(Ok(c)) => Some(c),
        Ok(Err(msg)) => {
            println!("corpus construction failed: {msg}");
            None
        }
        Err(_) => {
            println!("corpus construction panicked");
            None
        }
    };
    let corpus = &corpus;
    let with_corpus = |f: fn(&Corpus) -> Outcome| -> Box<dyn Fn() -> Outcome + '_> {
        Box::new(move || match corpus {
            Some(c) => f(c),
            None => Err("no corpus".into()),
        })
    };
    let criteria: Vec<(&str, Criterion<'_>)> = vec![
        ("lambda0 integral table", Box::new(criterion_1)),
        ("lambda_1 integral table", Box::new(criterion_2)),
        ("lambda_k integral table, k = 2, 3", Box::new(criterion_3)),
        ("mod-p dimension of LCH_0 for lambda0", Box::new(criterion_4)),
        ("tangent space dimensions", Box::new(criterion_5)),
        ("Z/2 augmentation census of lambda0", Box::new(criterion_6)),
        ("d^2 = 0 and linearized square zero on the corpus", with_corpus(criterion_7)),
        ("duality on every corpus field augmentation", with_corpus(criterion_8)),
        ("geography constructions", Box::new(criterion_9)),
        ("connected-sum additivity", Box::new(criterion_10)),
        ("filling obstruction", Box::new(criterion_11)),
        ("universal coefficients and Euler characteristic", with_corpus(criterion_12)),
        ("mod-2 Bockstein", Box::new(criterion_13)),
        ("Smith normal form property suite", Box::new(criterion_14)),
        ("parser round trip and fuzz", Box::new(criterion_15)),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({detail})", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {msg}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
