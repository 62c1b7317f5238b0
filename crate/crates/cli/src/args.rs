// SPDX-License-Identifier: Apache-2.0
//! Argument types shared by the command line and JSON run configurations.
//!
//! Every command's arguments derive both `clap::Args` and
//! `serde::Deserialize`, so a configuration file is the same set of options
//! spelled as JSON keys.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, ValueEnum};
use serde::Deserialize;

use tropvert::{rational, LatticeVector, Q};

/// A lattice direction, written `a,b` on the command line and `[a, b]` in
/// JSON.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dir(pub LatticeVector);

impl FromStr for Dir {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<&str> = t.split(',').map(str::trim).collect();
        if parts.len() != 2 {
            return Err(format!("expected a direction \"a,b\", got {s:?}"));
        }
        let a = parts[0].parse::<i64>().map_err(|e| format!("{s:?}: {e}"))?;
        let b = parts[1].parse::<i64>().map_err(|e| format!("{s:?}: {e}"))?;
        if a == 0 && b == 0 {
            return Err("the zero vector is not a direction".into());
        }
        Ok(Dir(LatticeVector::new(a, b)))
    }
}

impl<'de> Deserialize<'de> for Dir {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Pair([i64; 2]),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Pair([a, b]) => format!("{a},{b}").parse(),
            Raw::Text(s) => s.parse(),
        }
        .map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Dir {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.0.a, self.0.b)
    }
}

/// An exact rational, written `p/q` or as an integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rational(pub Q);

impl FromStr for Rational {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        rational::parse(s.trim()).map(Rational).map_err(|e| e.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(n) => Ok(Rational(rational::q(n))),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// A line direction with a list of small integers: the level lengths of a
/// graded geometry or the weights of a tropical count. Written
/// `a,b:n1,n2,...`, or in JSON as that string or as
/// `{"direction": [a, b], "values": [...]}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineArg {
    pub direction: Dir,
    pub values: Vec<u32>,
}

impl FromStr for LineArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (dir, rest) = s.split_once(':').ok_or_else(|| format!("expected \"a,b:n1,n2,...\", got {s:?}"))?;
        let values = if rest.trim().is_empty() {
            Vec::new()
        } else {
            rest.split(',').map(|v| v.trim().parse::<u32>().map_err(|e| format!("{s:?}: {e}"))).collect::<Result<_, _>>()?
        };
        Ok(LineArg { direction: dir.parse()?, values })
    }
}

impl<'de> Deserialize<'de> for LineArg {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Obj {
            direction: Dir,
            #[serde(alias = "lengths", alias = "weights")]
            values: Vec<u32>,
        }
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Obj(Obj),
        }
        match Raw::deserialize(d)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Obj(o) => Ok(LineArg { direction: o.direction, values: o.values }),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Direct,
    Perturbation,
}

/// Where artifacts go. In a configuration file these keys sit next to the
/// command's own options.
#[derive(Args, Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputArgs {
    /// Main artifact path; standard output when absent.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    /// Output format of the main artifact.
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Also write an SVG picture (presentation only).
    #[arg(long, global = true)]
    pub svg: Option<PathBuf>,
    /// Write tropical curve records to this path.
    #[arg(long, global = true)]
    pub curves: Option<PathBuf>,
    /// Config-file switch: write curves next to the main output.
    #[arg(skip)]
    #[serde(default)]
    pub emit_curves: bool,
    /// Config-file switch: write an SVG next to the main output.
    #[arg(skip)]
    #[serde(default)]
    pub emit_svg: bool,
}

impl OutputArgs {
    pub const KEYS: [&'static str; 6] = ["output", "format", "svg", "curves", "emit_curves", "emit_svg"];

    /// The curve path, derived from the main output when only the switch is
    /// set.
    pub fn curves_path(&self) -> Result<Option<PathBuf>, String> {
        derived(&self.curves, self.emit_curves, &self.output, "curves.json", "emit_curves")
    }

    pub fn svg_path(&self) -> Result<Option<PathBuf>, String> {
        derived(&self.svg, self.emit_svg, &self.output, "svg", "emit_svg")
    }
}

fn derived(
    explicit: &Option<PathBuf>,
    switch: bool,
    main: &Option<PathBuf>,
    ext: &str,
    key: &str,
) -> Result<Option<PathBuf>, String> {
    match (explicit, switch, main) {
        (Some(p), _, _) => Ok(Some(p.clone())),
        (None, false, _) => Ok(None),
        (None, true, Some(m)) => Ok(Some(m.with_extension(ext))),
        (None, true, None) => Err(format!("{key} needs an explicit path when the main output is standard output")),
    }
}

fn default_one() -> u32 {
    1
}

fn default_out() -> Dir {
    Dir(LatticeVector::new(1, 1))
}

fn default_e1() -> Dir {
    Dir(LatticeVector::E1)
}

fn default_e2() -> Dir {
    Dir(LatticeVector::E2)
}

/// Scatter a diagram read from a JSON file.
#[derive(Args, Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScatterArgs {
    /// Diagram JSON path, or "-" for standard input.
    #[arg(long, short)]
    pub input: Option<String>,
    /// Inline diagram (configuration files only).
    #[arg(skip)]
    pub diagram: Option<serde_json::Value>,
    /// Truncation order; at most the order of the input ring.
    #[arg(long)]
    pub order: Option<u32>,
    #[arg(long, value_enum, default_value_t = Method::Direct)]
    #[serde(default)]
    pub method: Method,
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Factor the commutator of (1+t1 x)^l1 and (1+t2 y)^l2 into ordered
/// ray factors and tabulate their coefficients c^k.
#[derive(Args, Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommutatorArgs {
    #[arg(long)]
    pub l1: u32,
    #[arg(long)]
    pub l2: u32,
    #[arg(long)]
    pub order: u32,
    /// Only report this ray.
    #[arg(long)]
    pub direction: Option<Dir>,
    /// Require c^1..c^max_k of the chosen ray; fails with exit code 4 when
    /// the order is too small.
    #[arg(long, requires = "direction")]
    pub max_k: Option<u32>,
}

/// Relative Gromov-Witten invariants N[P1|P2] of the two-line geometry.
#[derive(Args, Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GwArgs {
    #[arg(long)]
    pub l1: usize,
    #[arg(long)]
    pub l2: usize,
    /// Primitive outgoing direction.
    #[arg(long, default_value = "1,1")]
    #[serde(default = "default_out")]
    pub out: Dir,
    #[arg(long)]
    pub order: u32,
    #[arg(long, default_value = "1,0")]
    #[serde(default = "default_e1")]
    pub m1: Dir,
    #[arg(long, default_value = "0,1")]
    #[serde(default = "default_e2")]
    pub m2: Dir,
    /// Only these keys, e.g. "2+1+0|1+1+1"; fails with exit code 4 when the
    /// order is too small.
    #[arg(long = "partition")]
    #[serde(default, alias = "partition")]
    pub partitions: Vec<String>,
}

/// Graded invariants N[G] for lines carrying factors (1 + s z^{r m}).
#[derive(Args, Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradedGwArgs {
    /// `a,b:n1,n2,...` with n_r factors at level r. Repeat per line.
    #[arg(long = "line", required = true)]
    #[serde(alias = "line")]
    pub lines: Vec<LineArg>,
    #[arg(long, default_value = "1,1")]
    #[serde(default = "default_out")]
    pub out: Dir,
    #[arg(long)]
    pub order: u32,
    /// Only these keys, e.g. "1+0/1|1+1"; levels separated by "/".
    #[arg(long = "partition")]
    #[serde(default, alias = "partition")]
    pub partitions: Vec<String>,
}

/// The tropical count N^trop for lines of the given weights.
#[derive(Args, Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TropicalCountArgs {
    /// `a,b:w1,w2,...`: weights of the incoming edges parallel to (a,b).
    #[arg(long = "line", required = true)]
    #[serde(alias = "line")]
    pub lines: Vec<LineArg>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Accepted for uniformity with the other commands; the count needs no
    /// truncation order.
    #[arg(long)]
    pub order: Option<u32>,
}

/// BPS state counts n[k] from a series N[1], N[2], ...
#[derive(Args, Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BpsArgs {
    /// Comma-separated exact values N[1],N[2],...
    #[arg(long, value_delimiter = ',', required = true)]
    pub series: Vec<Rational>,
    #[arg(long, default_value_t = 1)]
    #[serde(default = "default_one")]
    pub w: u32,
    /// The series comes from a graded geometry (refused).
    #[arg(long)]
    #[serde(default)]
    pub graded: bool,
}

/// Tables of the multiple-cover contributions R_d, R^r_d and M_P[d].
#[derive(Args, Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MulticoverArgs {
    #[arg(long, default_value_t = 10)]
    pub max_d: u32,
    #[arg(long, default_value_t = 5)]
    pub max_r: u32,
    /// Weights w for M_P[d].
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    pub w: Vec<u32>,
}

/// Run the verification suite on a commutator or check a diagram file.
#[derive(Args, Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyArgs {
    #[arg(long, conflicts_with = "diagram", required_unless_present = "diagram")]
    pub l1: Option<u32>,
    #[arg(long, conflicts_with = "diagram", required_unless_present = "diagram")]
    pub l2: Option<u32>,
    #[arg(long, required_unless_present = "diagram")]
    pub order: Option<u32>,
    /// Seeds compared by the seed-independence check; defaults to
    /// `seed` and `seed + 1`.
    #[arg(long, value_delimiter = ',')]
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Check loop consistency of an already scattered diagram file instead.
    #[arg(long)]
    pub diagram: Option<String>,
}
