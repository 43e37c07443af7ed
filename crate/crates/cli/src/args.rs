use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "hurwitz",
    version,
    about = "Count braid orbits of Nielsen tuples and compare with closed-form predictions"
)]
pub struct Cli {
    #[command(flatten)]
    pub budget: BudgetArgs,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Serialize)]
pub struct BudgetArgs {
    /// Worker threads for the orbit engine.
    #[arg(long, global = true, env = "HURWITZ_WORKERS", default_value_t = 1)]
    pub workers: usize,

    /// Maximum number of states per query.
    #[arg(
        long,
        global = true,
        env = "HURWITZ_MAX_STATES",
        default_value_t = 200_000_000
    )]
    pub max_states: u64,

    /// Memory budget, in bytes or with a K/M/G (or KiB/MiB/GiB) suffix.
    #[arg(long, global = true, env = "HURWITZ_MAX_MEMORY", default_value = "8GiB", value_parser = parse_bytes)]
    pub max_memory: u64,

    /// Whether to quotient states by commuting adjacent swaps.
    #[arg(long, global = true, value_enum, default_value_t = ReductionArg::Auto)]
    pub reduction: ReductionArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReductionArg {
    Auto,
    Raw,
    Commutation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceArg {
    Affine,
    Projective,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Identities,
    Growth,
    Factorization,
}

/// Inclusive degree range `a..b`, `a..=b` or a single `n`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Range {
    pub start: u32,
    pub end: u32,
}

impl Range {
    pub fn iter(&self) -> std::ops::RangeInclusive<u32> {
        self.start..=self.end
    }
}

pub fn parse_range(s: &str) -> Result<Range, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<u32>()
            .map_err(|_| format!("not a degree: {t:?}"))
    };
    let r = match s.split_once("..") {
        Some((a, b)) => Range {
            start: num(a)?,
            end: num(b.strip_prefix('=').unwrap_or(b))?,
        },
        None => {
            let n = num(s)?;
            Range { start: n, end: n }
        }
    };
    if r.start > r.end {
        return Err(format!("empty range {s:?}"));
    }
    Ok(r)
}

/// Where |H₂(G, c)| comes from.
#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum H2Source {
    Value(u64),
    Estimate,
    Table,
}

pub fn parse_h2(s: &str) -> Result<H2Source, String> {
    match s {
        "estimate" => Ok(H2Source::Estimate),
        "table" => Ok(H2Source::Table),
        _ => match s.parse::<u64>() {
            Ok(0) => Err("h2 must be at least 1".into()),
            Ok(v) => Ok(H2Source::Value(v)),
            Err(_) => Err(format!(
                "expected an integer, \"estimate\" or \"table\", got {s:?}"
            )),
        },
    }
}

pub fn parse_bytes(s: &str) -> Result<u64, String> {
    let t = s.trim();
    let split = t.find(|c: char| !c.is_ascii_digit()).unwrap_or(t.len());
    let (num, unit) = t.split_at(split);
    let n: u64 = num.parse().map_err(|_| format!("not a size: {s:?}"))?;
    let mult: u64 = match unit.trim().to_ascii_lowercase().as_str() {
        "" | "b" => 1,
        "k" | "kb" | "kib" => 1 << 10,
        "m" | "mb" | "mib" => 1 << 20,
        "g" | "gb" | "gib" => 1 << 30,
        "t" | "tb" | "tib" => 1 << 40,
        other => return Err(format!("unknown size unit {other:?}")),
    };
    n.checked_mul(mult)
        .filter(|&v| v > 0)
        .ok_or_else(|| format!("size out of range: {s:?}"))
}

#[derive(Debug, Args, Serialize)]
pub struct GroupArgs {
    /// Group: shorthand like S4, C3, D4, Q8, S3xC2, inline JSON, or a JSON file.
    #[arg(long)]
    pub group: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct SetupArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub group: GroupArgs,

    /// One block of D: representatives separated by commas. Repeatable.
    #[arg(long = "block")]
    pub blocks: Vec<String>,

    /// Multiplicities, one per block, comma separated (default all 1).
    #[arg(long)]
    pub xi: Option<String>,

    /// Setup document `{"blocks": [[...]], "xi": [...]}` instead of --block/--xi.
    #[arg(long, conflicts_with_all = ["blocks", "xi"])]
    pub setup: Option<PathBuf>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Number of components for each degree in a range.
    Count {
        #[command(flatten)]
        setup: SetupArgs,
        #[arg(long, value_enum, default_value_t = SpaceArg::Affine)]
        space: SpaceArg,
        /// Only tuples generating the whole group.
        #[arg(long)]
        connected: bool,
        #[arg(long, value_parser = parse_range)]
        n: Range,
    },
    /// Leading term predicted by the applicable closed form.
    Predict {
        #[command(flatten)]
        setup: SetupArgs,
        #[arg(long, value_enum, default_value_t = SpaceArg::Affine)]
        space: SpaceArg,
        /// An integer, "estimate" (from enumeration) or "table" (built-in values).
        #[arg(long, value_parser = parse_h2)]
        h2: Option<H2Source>,
        /// Symmetric group S_d with transpositions, in the variable n/2.
        #[arg(long, conflicts_with_all = ["group", "blocks", "setup"])]
        symmetric_example: Option<u64>,
        /// Also report the leading coefficient along degrees divisible by d.
        #[arg(long)]
        generator_degree: Option<u64>,
        /// Largest degree used by --h2 estimate.
        #[arg(long, default_value_t = 12)]
        n_max: u64,
        /// Number of equal consecutive values that count as a plateau.
        #[arg(long, default_value_t = 3)]
        window: usize,
    },
    /// Connected counts per subgroup and their sum.
    Decompose {
        #[command(flatten)]
        setup: SetupArgs,
        #[arg(long, value_enum, default_value_t = SpaceArg::Affine)]
        space: SpaceArg,
        #[arg(long, value_parser = parse_range)]
        n: Range,
        #[arg(long, default_value_t = 200)]
        lattice_bound: usize,
    },
    /// Fit a quasi-polynomial to a CSV series with columns n and a value.
    Fit {
        #[arg(long)]
        series: PathBuf,
        /// Value column (default: the column after n).
        #[arg(long)]
        column: Option<String>,
        #[arg(long, default_value_t = 6)]
        max_period: usize,
        #[arg(long, default_value_t = 6)]
        max_degree: usize,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[command(flatten)]
        setup: SetupArgs,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Largest tuple size for the identity and factorization suites.
        #[arg(long)]
        max_len: Option<usize>,
        #[arg(long, default_value_t = 10)]
        n_max: u32,
        #[arg(long, value_parser = parse_h2)]
        h2: Option<H2Source>,
        #[arg(long, default_value_t = 0.15)]
        tolerance: f64,
        #[arg(long, default_value_t = 3)]
        window: usize,
    },
    /// Read |H₂(G, c)| off the plateau of connected counts.
    EstimateH2 {
        #[command(flatten)]
        setup: SetupArgs,
        #[arg(long, default_value_t = 12)]
        n_max: u64,
        #[arg(long, default_value_t = 3)]
        window: usize,
    },
    /// Order, classes, abelianization and subgroup count of a group.
    GroupInfo {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value_t = 200)]
        lattice_bound: usize,
    },
}
