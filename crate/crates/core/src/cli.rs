//! Command-line front end. [`run`] takes the argument vector and returns the
//! exit code with everything that would be printed, so it can be tested
//! without spawning processes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::augment::{
    enumerate_augmentations, enumerate_augmentations_bounded, is_augmentation, Augmentation, RingDesc,
    DEFAULT_SEARCH_CAP,
};
use crate::dga::{self, geography_dga, validate, Chord, Dga, FailureKind};
use crate::error::{Error, Result};
use crate::format;
use crate::homology::{bockstein, field_homology, integral_homology, GradedHomology, HomologyGroup};
use crate::linearize::{linearized_differential, MatrixBlock};
use crate::verify::{filling_obstruction, fmt_dims, sabloff_check, torsion_scan};

/// Exit status for a check that ran and failed.
pub const EXIT_CHECK_FAILED: i32 = 1;
/// Exit status for usage, parse and input errors.
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "lch", version, about = "Linearized Legendrian contact homology calculator")]
struct Cli {
    /// Emit structured JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check gradings and d^2 = 0.
    Validate { input: String },
    /// Print a built-in DGA in `.dga` format.
    Builtin {
        #[arg(value_parser = ["lambda0", "lambda_k", "unknot"])]
        which: String,
        #[arg(long)]
        k: Option<i64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerate augmentations over Z/m, or over Z with values in [-N, N].
    Augs {
        input: String,
        #[arg(long, value_parser = parse_ring)]
        ring: RingDesc,
        #[arg(long)]
        bound: Option<u64>,
    },
    /// Linearized homology at an augmentation.
    Homology {
        input: String,
        #[command(flatten)]
        aug: AugArgs,
        #[arg(long, value_parser = parse_ring)]
        ring: Option<RingDesc>,
        /// Also print the boundary matrices.
        #[arg(long)]
        matrices: bool,
    },
    /// Duality check over a field.
    Duality {
        input: String,
        #[command(flatten)]
        aug: AugArgs,
        #[arg(long, value_parser = parse_ring)]
        field: Option<RingDesc>,
    },
    /// Field dimension classes per prime and integral torsion of small
    /// integer augmentations.
    Scan {
        input: String,
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        primes: Vec<u64>,
        #[arg(long, default_value_t = 2)]
        bound: u64,
    },
    /// Build a DGA with prescribed homology in one degree.
    Geography {
        #[arg(long, allow_hyphen_values = true)]
        grading: i64,
        #[arg(long, default_value_t = 0)]
        free: usize,
        #[arg(long, value_delimiter = ',')]
        torsion: Vec<i64>,
        /// Print the full graded homology of the constructed complex.
        #[arg(long)]
        full: bool,
        /// Write the constructed DGA here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ranks of the mod-2 Bockstein of an integral linearized complex.
    Bockstein {
        input: String,
        #[command(flatten)]
        aug: AugArgs,
    },
    /// Dimension obstruction to the augmentation coming from a filling.
    Obstruction {
        input: String,
        #[command(flatten)]
        aug: AugArgs,
        #[arg(long, value_parser = parse_ring)]
        field: Option<RingDesc>,
    },
}

#[derive(Args, Debug)]
struct AugArgs {
    /// Augmentation literal, e.g. "a1=2,a2=-1,a3=1,a6=1" or "... @ Z/3";
    /// unlisted chords map to 0.
    #[arg(long, allow_hyphen_values = true)]
    aug: String,
}

fn parse_ring(s: &str) -> std::result::Result<RingDesc, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Result of one invocation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the command line `args` (including the program name).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: 0, stdout: text, stderr: String::new() }
            };
        }
    };
    let mut out = Outcome::default();
    match execute(&cli, &mut out) {
        Ok(code) => out.code = code,
        Err(e) => {
            out.code = EXIT_USAGE;
            writeln!(out.stderr, "error: {e}").unwrap();
        }
    }
    out
}

fn search_cap() -> Result<u128> {
    match std::env::var("LCH_SEARCH_CAP") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidValue(format!("LCH_SEARCH_CAP must be a positive integer, got `{v}`"))),
        Err(_) => Ok(DEFAULT_SEARCH_CAP),
    }
}

/// Resolves `builtin:lambda0`, `builtin:lambda_k:K`, `builtin:unknot` or a
/// path to a `.dga` file.
pub fn load_dga(input: &str) -> Result<Dga> {
    if let Some(rest) = input.strip_prefix("builtin:") {
        return match rest.split_once(':') {
            None if rest == "lambda0" => Ok(dga::lambda0()),
            None if rest == "unknot" => Ok(dga::unknot()),
            Some(("lambda_k", k)) => {
                let k = k
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("bad k in `{input}`")))?;
                dga::lambda_k(k)
            }
            _ => Err(Error::InvalidParameter(format!("unknown built-in `{input}`"))),
        };
    }
    let text = std::fs::read_to_string(input)
        .map_err(|e| Error::InvalidParameter(format!("cannot read `{input}`: {e}")))?;
    format::parse(&text)
}

/// Loads and validates; a DGA failing validation is a check failure.
fn load_valid(input: &str, out: &mut Outcome) -> Result<Option<Dga>> {
    let d = load_dga(input)?;
    let report = validate(&d)?;
    if report.is_ok() {
        return Ok(Some(d));
    }
    writeln!(out.stderr, "`{}` is not a valid DGA; run `lch validate` for details", d.name()).unwrap();
    Ok(None)
}

/// Parses the literal, reads it in `ring` if given and checks it.
fn load_aug(dga: &Dga, literal: &str, ring: Option<RingDesc>) -> Result<Augmentation> {
    let mut aug = Augmentation::parse_literal(literal, ring.unwrap_or(RingDesc::Integers))?;
    if let Some(r) = ring {
        if aug.ring() != r {
            aug = aug.with_ring(r)?;
        }
    }
    if !is_augmentation(dga, &aug)? {
        let failing: Vec<String> = dga
            .chords()
            .iter()
            .filter(|c| {
                crate::augment::evaluate(dga, &aug, &dga.diff(&c.name))
                    .map(|v| !aug.ring().is_zero(&v))
                    .unwrap_or(true)
            })
            .map(|c| c.name.clone())
            .collect();
        return Err(Error::NotAnAugmentation(format!(
            "{} does not kill d of {}",
            aug.to_literal(),
            failing.join(", ")
        )));
    }
    Ok(aug)
}

fn emit_json<T: Serialize>(out: &mut Outcome, value: &T) {
    out.stdout
        .push_str(&serde_json::to_string_pretty(value).expect("report types serialize"));
    out.stdout.push('\n');
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationOutput {
    pub dga: String,
    pub grading_ok: bool,
    pub d_squared_ok: bool,
    pub failures: Vec<FailureOutput>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureOutput {
    pub chord: String,
    pub kind: FailureKind,
    pub offending: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DgaOutput {
    pub name: String,
    pub tb: i64,
    pub chords: Vec<Chord>,
    pub differentials: BTreeMap<String, String>,
    pub document: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugmentationList {
    pub dga: String,
    pub ring: RingDesc,
    pub augmentations: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyOutput {
    pub dga: String,
    pub ring: RingDesc,
    pub augmentation: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub homology: Option<GradedHomology>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<BTreeMap<i64, usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrices: Option<Vec<MatrixBlock>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeographyOutput {
    pub grading: i64,
    pub dga: String,
    pub chords: usize,
    pub augmentation: String,
    /// Target group, one summand per constructed copy.
    pub summands: Vec<HomologyGroup>,
    /// `H_grading` of the constructed complex.
    pub group: HomologyGroup,
    pub matches: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub homology: Option<GradedHomology>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BocksteinOutput {
    pub dga: String,
    pub augmentation: String,
    /// Source degree -> rank of `H_d(Z/2) -> H_{d-1}(Z/2)`; zeros omitted.
    pub ranks: BTreeMap<i64, usize>,
}

fn summand_line(degree: i64, summands: &[HomologyGroup]) -> String {
    let parts: Vec<String> = summands.iter().filter(|g| !g.is_zero()).map(ToString::to_string).collect();
    if parts.is_empty() {
        format!("H_{degree} = 0")
    } else {
        format!("H_{degree} = {}", parts.join(" + "))
    }
}

fn field_power(field: RingDesc, dim: usize) -> String {
    match (dim, field) {
        (0, _) => "0".into(),
        (1, f) => f.to_string(),
        (n, RingDesc::Mod(p)) => format!("(Z/{p})^{n}"),
        (n, f) => format!("{f}^{n}"),
    }
}

fn execute(cli: &Cli, out: &mut Outcome) -> Result<i32> {
    let json = cli.json;
    match &cli.command {
        Command::Validate { input } => {
            let d = load_dga(input)?;
            let report = validate(&d)?;
            if json {
                emit_json(
                    out,
                    &ValidationOutput {
                        dga: d.name().to_string(),
                        grading_ok: report.grading_ok,
                        d_squared_ok: report.d_squared_ok,
                        failures: report
                            .failures
                            .iter()
                            .map(|f| FailureOutput {
                                chord: f.chord.clone(),
                                kind: f.kind,
                                offending: f.offending.to_string(),
                            })
                            .collect(),
                    },
                );
            } else {
                writeln!(out.stdout, "{}: {} chords, tb = {}", d.name(), d.chords().len(), d.tb()).unwrap();
                writeln!(out.stdout, "grading {}", if report.grading_ok { "ok" } else { "FAILS" }).unwrap();
                writeln!(out.stdout, "d^2 = 0 {}", if report.d_squared_ok { "ok" } else { "FAILS" }).unwrap();
                for f in &report.failures {
                    match f.kind {
                        FailureKind::Grading => writeln!(
                            out.stdout,
                            "chord {}: terms of wrong degree in d {}: {}",
                            f.chord, f.chord, f.offending
                        ),
                        FailureKind::DSquared => {
                            writeln!(out.stdout, "chord {}: d(d {}) = {}", f.chord, f.chord, f.offending)
                        }
                    }
                    .unwrap();
                }
            }
            Ok(if report.is_ok() { 0 } else { EXIT_CHECK_FAILED })
        }

        Command::Builtin { which, k, out: path } => {
            let d = match (which.as_str(), k) {
                ("lambda0", None) => dga::lambda0(),
                ("unknot", None) => dga::unknot(),
                ("lambda_k", Some(k)) => dga::lambda_k(*k)?,
                ("lambda_k", None) => return Err(Error::InvalidParameter("lambda_k needs --k".into())),
                (_, Some(_)) => return Err(Error::InvalidParameter("--k only applies to lambda_k".into())),
                _ => unreachable!("clap restricts the choices"),
            };
            let text = format::serialize(&d);
            if let Some(path) = path {
                std::fs::write(path, &text)
                    .map_err(|e| Error::InvalidParameter(format!("cannot write {}: {e}", path.display())))?;
            }
            if json {
                emit_json(
                    out,
                    &DgaOutput {
                        name: d.name().to_string(),
                        tb: d.tb(),
                        chords: d.chords().to_vec(),
                        differentials: d
                            .chords()
                            .iter()
                            .filter(|c| !d.diff(&c.name).is_zero())
                            .map(|c| (c.name.clone(), d.diff(&c.name).to_string()))
                            .collect(),
                        document: text,
                    },
                );
            } else if path.is_none() {
                out.stdout.push_str(&text);
            }
            Ok(0)
        }

        Command::Augs { input, ring, bound } => {
            let Some(d) = load_valid(input, out)? else {
                return Ok(EXIT_CHECK_FAILED);
            };
            let cap = search_cap()?;
            let augs = match (ring, bound) {
                (RingDesc::Mod(_), None) => enumerate_augmentations(&d, *ring, cap)?,
                (RingDesc::Mod(_), Some(_)) => {
                    return Err(Error::InvalidParameter("--bound applies only to --ring Z".into()))
                }
                (RingDesc::Integers, Some(b)) => enumerate_augmentations_bounded(&d, *b, cap)?,
                (RingDesc::Integers, None) => {
                    return Err(Error::InvalidParameter("--ring Z needs --bound N".into()))
                }
                (RingDesc::Rationals, _) => {
                    return Err(Error::InvalidParameter("cannot enumerate over Q".into()))
                }
            };
            let literals: Vec<String> = augs.iter().map(Augmentation::to_literal).collect();
            if json {
                emit_json(out, &AugmentationList { dga: d.name().to_string(), ring: *ring, augmentations: literals });
            } else {
                for l in &literals {
                    writeln!(out.stdout, "{l}").unwrap();
                }
                writeln!(out.stdout, "{} augmentations over {ring}", literals.len()).unwrap();
            }
            Ok(0)
        }

        Command::Homology { input, aug, ring, matrices } => {
            let Some(d) = load_valid(input, out)? else {
                return Ok(EXIT_CHECK_FAILED);
            };
            let aug = load_aug(&d, &aug.aug, *ring)?;
            let c = linearized_differential(&d, &aug)?;
            let mut report = HomologyOutput {
                dga: d.name().to_string(),
                ring: aug.ring(),
                augmentation: aug.to_literal(),
                homology: None,
                dims: None,
                matrices: matrices.then(|| c.blocks()),
            };
            match aug.ring() {
                RingDesc::Integers => report.homology = Some(integral_homology(&c)?),
                r => report.dims = Some(field_homology(&c, r)?),
            }
            if json {
                emit_json(out, &report);
                return Ok(0);
            }
            if *matrices {
                write!(out.stdout, "{c}").unwrap();
            }
            if let Some(h) = &report.homology {
                write!(out.stdout, "{h}").unwrap();
            }
            if let Some(dims) = &report.dims {
                if dims.is_empty() {
                    writeln!(out.stdout, "H_* = 0").unwrap();
                }
                for (deg, n) in dims.iter().rev() {
                    writeln!(out.stdout, "H_{deg} = {}", field_power(aug.ring(), *n)).unwrap();
                }
            }
            Ok(0)
        }

        Command::Duality { input, aug, field } => {
            let Some(d) = load_valid(input, out)? else {
                return Ok(EXIT_CHECK_FAILED);
            };
            let aug = load_aug(&d, &aug.aug, *field)?;
            let report = sabloff_check(&d, &aug)?;
            if json {
                emit_json(out, &report);
            } else {
                write!(out.stdout, "{report}").unwrap();
            }
            Ok(if report.duality_ok { 0 } else { EXIT_CHECK_FAILED })
        }

        Command::Scan { input, primes, bound } => {
            let Some(d) = load_valid(input, out)? else {
                return Ok(EXIT_CHECK_FAILED);
            };
            let scan = torsion_scan(&d, primes, *bound, search_cap()?)?;
            if json {
                emit_json(out, &scan);
            } else {
                write!(out.stdout, "{scan}").unwrap();
            }
            Ok(0)
        }

        Command::Geography { grading, free, torsion, full, out: path } => {
            let (d, aug) = geography_dga(*grading, *free, torsion)?;
            if let Some(path) = path {
                std::fs::write(path, format::serialize(&d))
                    .map_err(|e| Error::InvalidParameter(format!("cannot write {}: {e}", path.display())))?;
            }
            let h = integral_homology(&linearized_differential(&d, &aug)?)?;
            let summands: Vec<HomologyGroup> = std::iter::repeat_n(HomologyGroup::free(1), *free)
                .chain(torsion.iter().map(|&n| HomologyGroup::from_orders(0, [n])))
                .collect();
            let target = summands.iter().fold(HomologyGroup::zero(), |acc, g| acc.direct_sum(g));
            let group = h.get(*grading);
            let matches = group == target;
            if json {
                emit_json(
                    out,
                    &GeographyOutput {
                        grading: *grading,
                        dga: d.name().to_string(),
                        chords: d.chords().len(),
                        augmentation: aug.to_literal(),
                        summands,
                        group,
                        matches,
                        homology: full.then(|| h.clone()),
                    },
                );
            } else {
                writeln!(out.stdout, "{}", summand_line(*grading, &summands)).unwrap();
                writeln!(out.stdout, "invariant factors: {group}").unwrap();
                writeln!(out.stdout, "constructed from {} chords, tb = {}", d.chords().len(), d.tb()).unwrap();
                if !matches {
                    writeln!(out.stdout, "MISMATCH: computed H_{grading} = {group}, expected {target}").unwrap();
                }
                if *full {
                    write!(out.stdout, "{h}").unwrap();
                }
            }
            Ok(if matches { 0 } else { EXIT_CHECK_FAILED })
        }

        Command::Bockstein { input, aug } => {
            let Some(d) = load_valid(input, out)? else {
                return Ok(EXIT_CHECK_FAILED);
            };
            let aug = load_aug(&d, &aug.aug, Some(RingDesc::Integers))?;
            let ranks = bockstein(&linearized_differential(&d, &aug)?)?;
            if json {
                emit_json(
                    out,
                    &BocksteinOutput { dga: d.name().to_string(), augmentation: aug.to_literal(), ranks },
                );
            } else if ranks.is_empty() {
                writeln!(out.stdout, "Bockstein is zero").unwrap();
            } else {
                for (deg, r) in ranks.iter().rev() {
                    writeln!(out.stdout, "rank(H_{deg} -> H_{}) = {r}", deg - 1).unwrap();
                }
            }
            Ok(0)
        }

        Command::Obstruction { input, aug, field } => {
            let Some(d) = load_valid(input, out)? else {
                return Ok(EXIT_CHECK_FAILED);
            };
            let aug = load_aug(&d, &aug.aug, *field)?;
            let verdict = filling_obstruction(&d, &aug)?;
            if json {
                emit_json(out, &verdict);
            } else {
                write!(out.stdout, "{verdict}").unwrap();
                let dims = crate::verify::field_dims(&d, &aug)?;
                writeln!(out.stdout, "dimensions {}", fmt_dims(&dims)).unwrap();
            }
            Ok(if verdict.geometric_possible { 0 } else { EXIT_CHECK_FAILED })
        }
    }
}
