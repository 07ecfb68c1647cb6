//! Command-line front end.

use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::cech::CechOptions;
use crate::curves::{self, ChainData, GammaMode, GenusContext, Mode, PairVariant, Regime};
use crate::error::Error;
use crate::geometry::{Bundle, ExtensionBundle, SplitBundle, TotalSpace};
use crate::invariants::{self, InvariantReport};
use crate::laurent::LaurentPoly;
use crate::table::{self, TableRow};

#[derive(Debug, Parser)]
#[command(name = "local-bundles", version, about = "Invariants of vector bundles near a rational curve")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, value_enum, default_value_t = Format::Pretty, global = true)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Pretty,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Truncation {
    /// Minimum number of levels inspected in formal computations.
    #[arg(long)]
    pub depth: Option<u32>,
    /// Multiplier for the z-window and the width box.
    #[arg(long, default_value_t = 1)]
    pub window_scale: u32,
}

impl Truncation {
    fn options(&self) -> CechOptions {
        CechOptions { window_scale: self.window_scale.max(1), depth: self.depth }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChainMode {
    A5,
    A81,
    A82,
    A6,
    H1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlphaRegime {
    Semistable,
    Stable,
    General,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Invariants of one bundle.
    Invariants {
        /// W1, W2, W3 or D<i>.
        #[arg(long, conflicts_with = "twists")]
        space: Option<String>,
        /// Conormal degrees, e.g. `1,1,1`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        twists: Option<Vec<i64>>,
        #[arg(long, conflicts_with = "split")]
        j: Option<u32>,
        /// Extension class.
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        p: String,
        /// Degrees of a split bundle instead of an extension.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        split: Option<Vec<i64>>,
        #[command(flatten)]
        trunc: Truncation,
    },
    /// Recompute the W_1/W_2/W_3 table and compare it with the published one.
    Table {
        /// Values of j for the split row.
        #[arg(long, value_delimiter = ',', default_values_t = vec![2, 3, 4, 5, 6, 7, 8])]
        split_j: Vec<u64>,
        #[command(flatten)]
        trunc: Truncation,
    },
    /// Deformation-space dimension of a splitting type.
    Gamma {
        /// Number of conormal summands, each O(1).
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long = "type", value_delimiter = ',', allow_hyphen_values = true, required = true)]
        degrees: Vec<i64>,
        /// Sum the levels on this space instead of using the closed form.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        twists: Option<Vec<i64>>,
    },
    /// Formulas for curves of genus g.
    Genus {
        #[arg(long)]
        g: u32,
        #[arg(long, default_value_t = 2)]
        n: u32,
        /// Rank; must match the number of degrees when both are given.
        #[arg(long)]
        r: Option<usize>,
        /// Filtration quotient degrees.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        a: Vec<i64>,
        /// Degree of the normal bundle.
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
        #[arg(long, default_value_t = 1)]
        t: u32,
        /// Treat the value as a bound for a filtered bundle.
        #[arg(long)]
        filtered: bool,
        /// Evaluate the general-pair bound for a bundle of this degree.
        #[arg(long, allow_hyphen_values = true)]
        pair_degree: Option<i64>,
        /// Also check vanishing of α in this regime.
        #[arg(long, value_enum)]
        alpha: Option<AlphaRegime>,
    },
    /// Sufficient conditions for chains of rational curves.
    Chain {
        /// Gaps ε_i per component.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        eps: Vec<i64>,
        /// Conormal degrees b_i per component.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        b: Vec<i64>,
        #[arg(long, value_enum)]
        mode: ChainMode,
        /// Neighbourhood level for a82.
        #[arg(long, default_value_t = 0)]
        m: u32,
        /// Minimal splitting degrees a_{i,r} (for mode h1).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        mins: Vec<i64>,
    },
    /// Closed forms for split bundles on W_i.
    Formulas {
        #[arg(long)]
        i: u32,
        #[arg(long, value_delimiter = ',', required = true)]
        j: Vec<u64>,
    },
}

/// Exit code for internal disagreements and table mismatches.
pub const EXIT_MISMATCH: i32 = 2;

fn error_code(e: &Error) -> i32 {
    match e {
        Error::InternalMismatch(_) => EXIT_MISMATCH,
        _ => 1,
    }
}

fn emit_records<W: Write>(out: &mut W, header: &[String], rows: &[Vec<String>]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

fn emit<W: Write, T: Serialize>(
    out: &mut W,
    format: Format,
    value: &T,
    header: &[String],
    rows: &[Vec<String>],
) -> anyhow::Result<()> {
    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(value)?)?,
        Format::Csv => emit_records(out, header, rows)?,
        Format::Pretty => {
            let widths: Vec<usize> = (0..header.len())
                .map(|c| rows.iter().map(|r| r[c].chars().count()).chain([header[c].len()]).max().unwrap_or(0))
                .collect();
            for line in std::iter::once(header.to_vec()).chain(rows.iter().cloned()) {
                let cells: Vec<String> =
                    line.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
                writeln!(out, "{}", cells.join("  ").trim_end())?;
            }
        }
    }
    Ok(())
}

fn strings<const N: usize>(a: [&str; N]) -> Vec<String> {
    a.iter().map(|s| s.to_string()).collect()
}

fn build_bundle(
    space: Option<String>,
    twists: Option<Vec<i64>>,
    j: Option<u32>,
    p: &str,
    split: Option<Vec<i64>>,
) -> Result<(TotalSpace, Bundle), Error> {
    let space = match (space, twists) {
        (Some(name), _) => TotalSpace::from_name(&name)?,
        (None, Some(t)) => TotalSpace::new(t)?,
        (None, None) => return Err(Error::InvalidInput("give --space or --twists".into())),
    };
    let bundle = match (split, j) {
        (Some(d), _) => SplitBundle::new(space.clone(), d)?.into(),
        (None, Some(j)) => ExtensionBundle::new(space.clone(), j, LaurentPoly::parse(p, space.n())?)?.into(),
        (None, None) => return Err(Error::InvalidInput("give --j or --split".into())),
    };
    Ok((space, bundle))
}

/// Runs a parsed command, returning the process exit code.
pub fn run<W: Write>(cli: Cli, out: &mut W, err: &mut impl Write) -> i32 {
    match execute(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let code = e.downcast_ref::<Error>().map_or(1, error_code);
            let _ = writeln!(err, "error: {e}");
            code
        }
    }
}

fn execute<W: Write>(cli: Cli, out: &mut W) -> anyhow::Result<i32> {
    let format = cli.format;
    match cli.command {
        Command::Invariants { space, twists, j, p, split, trunc } => {
            let (space, bundle) = build_bundle(space, twists, j, &p, split)?;
            let report = invariants::invariant_report(&space, &bundle, &trunc.options())?;
            emit(out, format, &report, &strings(InvariantReport::csv_header()), &[report.csv_record().to_vec()])?;
            Ok(0)
        }
        Command::Table { split_j, trunc } => {
            let rows = table::reproduce_table(&split_j, &trunc.options())?;
            let records: Vec<Vec<String>> = rows.iter().map(TableRow::csv_record).collect();
            emit(out, format, &rows, &TableRow::csv_header(), &records)?;
            let diffs = table::compare_with_published(&rows, &split_j);
            if diffs.is_empty() {
                Ok(0)
            } else {
                for d in diffs {
                    eprintln!("mismatch: {d}");
                }
                Ok(EXIT_MISMATCH)
            }
        }
        Command::Gamma { n, mut degrees, twists } => {
            degrees.sort_unstable_by(|a, b| b.cmp(a));
            #[derive(Serialize)]
            struct Out {
                splitting_type: Vec<i64>,
                gamma: String,
                certificate: String,
            }
            let o = match twists {
                None => Out {
                    splitting_type: degrees.clone(),
                    gamma: invariants::gamma_closed(n, &degrees).to_string(),
                    certificate: "ClosedForm".into(),
                },
                Some(t) => {
                    let space = TotalSpace::new(t)?;
                    let bundle: Bundle = SplitBundle::new(space.clone(), degrees.clone())?.into();
                    let r = invariants::gamma_formal(&space, &bundle)?;
                    Out { splitting_type: degrees.clone(), gamma: r.value.to_string(), certificate: r.certificate.to_string() }
                }
            };
            let st: Vec<String> = o.splitting_type.iter().map(i64::to_string).collect();
            let row = vec![st.join(" "), o.gamma.clone(), o.certificate.clone()];
            emit(out, format, &o, &strings(["splitting_type", "gamma", "certificate"]), &[row])?;
            Ok(0)
        }
        Command::Genus { g, n, r, a, d, t, filtered, pair_degree, alpha } => {
            let degrees = if a.is_empty() { vec![0; r.unwrap_or(1)] } else { a };
            if let Some(r) = r {
                if r != degrees.len() {
                    return Err(Error::InvalidInput(format!("--r {r} but {} degrees", degrees.len())).into());
                }
            }
            let rank = degrees.len();
            let mode = if filtered { GammaMode::UpperBound } else { GammaMode::Exact };
            let ctx = GenusContext { g, n, d, degrees };
            let v = curves::gamma_genus_split(&ctx, t, mode)?;
            #[derive(Serialize)]
            struct Out {
                gamma: String,
                integral: bool,
                mode: GammaMode,
                pair_bound: Option<String>,
                alpha: Option<curves::Verdict>,
            }
            let pair_bound = pair_degree
                .map(|deg| curves::gamma_general_pair_bound(g, n, rank, d, t, PairVariant::DegreeReduced(deg)))
                .transpose()?
                .map(|x| x.to_string());
            let alpha = alpha.map(|reg| {
                let regime = match reg {
                    AlphaRegime::Semistable => Regime::Semistable,
                    AlphaRegime::Stable => Regime::Stable,
                    AlphaRegime::General => Regime::General,
                };
                curves::alpha_vanishes(g, n, d, regime)
            });
            let o = Out { gamma: v.value.to_string(), integral: v.integral, mode, pair_bound, alpha };
            let row = vec![
                o.gamma.clone(),
                o.integral.to_string(),
                format!("{:?}", o.mode),
                o.pair_bound.clone().unwrap_or_default(),
                o.alpha.map(|x| format!("{x:?}")).unwrap_or_default(),
            ];
            emit(out, format, &o, &strings(["gamma", "integral", "mode", "pair_bound", "alpha"]), &[row])?;
            Ok(0)
        }
        Command::Chain { eps, b, mode, m, mins } => {
            let verdict = if mode == ChainMode::H1 {
                let rows = mins.iter().map(|&x| vec![x.max(0), x]).collect();
                let data = ChainData::new(rows, vec![vec![1]; mins.len()])?;
                curves::chain_h1_vanishes(&data)
            } else {
                let data = ChainData::from_gaps(&eps, &b)?;
                match mode {
                    ChainMode::A5 => curves::chain_restriction_bijective(&data, Mode::PlainA5),
                    ChainMode::A81 => curves::chain_restriction_bijective(&data, Mode::EndFormalA81),
                    ChainMode::A82 => curves::chain_restriction_bijective(&data, Mode::EndLevelA82(m)),
                    ChainMode::A6 => curves::chain_formally_split(&data),
                    ChainMode::H1 => unreachable!(),
                }
            };
            #[derive(Serialize)]
            struct Out {
                verdict: curves::Verdict,
            }
            emit(out, format, &Out { verdict }, &strings(["verdict"]), &[vec![format!("{verdict:?}")]])?;
            Ok(0)
        }
        Command::Formulas { i, j } => {
            #[derive(Serialize)]
            struct Out {
                i: u32,
                j: u64,
                chi: crate::cech::Dim,
                h_prime: u64,
                w_prime: u64,
            }
            let mut all = Vec::new();
            for j in j {
                let s = invariants::split_formulas(i, j)?;
                all.push(Out { i, j, chi: s.chi, h_prime: s.h_prime, w_prime: s.w_prime });
            }
            let rows: Vec<Vec<String>> = all
                .iter()
                .map(|o| vec![o.i.to_string(), o.j.to_string(), o.chi.to_string(), o.h_prime.to_string(), o.w_prime.to_string()])
                .collect();
            emit(out, format, &all, &strings(["i", "j", "chi", "h_prime", "w_prime"]), &rows)?;
            Ok(0)
        }
    }
}

/// Parses `args` (including the program name) and runs them.
pub fn run_args<I, T, W: Write>(args: I, out: &mut W, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli, out, err),
        Err(e) => {
            let _ = write!(err, "{e}");
            if e.use_stderr() {
                1
            } else {
                0
            }
        }
    }
}
