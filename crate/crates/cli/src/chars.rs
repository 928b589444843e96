use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use pslab_core::characters::{
    compare, difference_two_table, dimension_table, fermionic_sum, BivariateSeries, LinearTerm,
};
use pslab_core::Engine;

use crate::cache::{resolve_path, DimensionCache};
use crate::{check_level, emit, with_jobs, CliError, Format, IndexSel, VERSION};

#[derive(Debug, Args)]
pub struct CharArgs {
    #[arg(long)]
    k: u32,
    /// Index i, or `all`.
    #[arg(long, default_value = "all")]
    i: IndexSel,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    max_weight: u32,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long, default_value = "last-i")]
    convention: LinearTerm,
    /// Cache file (default: $PSLAB_CACHE, then the user cache directory).
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Neither read nor write the cache.
    #[arg(long)]
    no_cache: bool,
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: Option<u16>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    max_level: u32,
}

#[derive(Debug, Serialize)]
struct ChargeSummed {
    dimension: Vec<i64>,
    difference_two: Vec<i64>,
    fermionic: Vec<i64>,
}

#[derive(Debug, Serialize)]
struct CharTable {
    k: u32,
    i: u32,
    max_weight: u32,
    convention: LinearTerm,
    difference_two_matches: bool,
    fermionic_matches: bool,
    dimension: BivariateSeries,
    difference_two: BivariateSeries,
    fermionic: BivariateSeries,
    charge_summed: ChargeSummed,
}

#[derive(Debug, Serialize)]
struct CharReport {
    tool: &'static str,
    version: &'static str,
    passed: bool,
    tables: Vec<CharTable>,
}

fn table_for(
    k: u32,
    i: u32,
    n: u32,
    convention: LinearTerm,
    dimension: BivariateSeries,
) -> CharTable {
    let order = n as usize;
    let difference_two = difference_two_table(k, i, order);
    let fermionic = fermionic_sum(k, i, order, convention);
    CharTable {
        k,
        i,
        max_weight: n,
        convention,
        difference_two_matches: compare(&dimension, &difference_two, order).is_equal(),
        fermionic_matches: compare(&dimension, &fermionic, order).is_equal(),
        charge_summed: ChargeSummed {
            dimension: dimension.charge_summed().coeffs().to_vec(),
            difference_two: difference_two.charge_summed().coeffs().to_vec(),
            fermionic: fermionic.charge_summed().coeffs().to_vec(),
        },
        dimension,
        difference_two,
        fermionic,
    }
}

fn render_table(report: &CharReport) -> String {
    let mut out = String::new();
    for t in &report.tables {
        writeln!(
            out,
            "k={} i={} max-weight={} convention={}",
            t.k, t.i, t.max_weight, t.convention
        )
        .unwrap();
        writeln!(
            out,
            "{:>6} {:>10} {:>15} {:>10}  match",
            "weight", "dimension", "difference-two", "fermionic"
        )
        .unwrap();
        let s = &t.charge_summed;
        for n in 0..s.dimension.len() {
            let ok = s.dimension[n] == s.difference_two[n] && s.dimension[n] == s.fermionic[n];
            writeln!(
                out,
                "{n:>6} {:>10} {:>15} {:>10}  {}",
                s.dimension[n],
                s.difference_two[n],
                s.fermionic[n],
                if ok { "yes" } else { "NO" }
            )
            .unwrap();
        }
        let verdict = |b: bool| if b { "equal" } else { "DIFFERENT" };
        writeln!(
            out,
            "bigraded: difference-two {}, fermionic {}\n",
            verdict(t.difference_two_matches),
            verdict(t.fermionic_matches)
        )
        .unwrap();
    }
    writeln!(
        out,
        "overall: {}",
        if report.passed { "PASS" } else { "FAIL" }
    )
    .unwrap();
    out
}

fn render_csv(report: &CharReport) -> String {
    let mut out = String::from("k,i,weight,charge,dimension,difference_two,fermionic\n");
    for t in &report.tables {
        for n in 0..=t.max_weight {
            let charges = if n == 0 { 0..=0 } else { 1..=n };
            for c in charges {
                let n_ = n as usize;
                writeln!(
                    out,
                    "{},{},{n},{c},{},{},{}",
                    t.k,
                    t.i,
                    t.dimension.coefficient(c, n_),
                    t.difference_two.coefficient(c, n_),
                    t.fermionic.coefficient(c, n_)
                )
                .unwrap();
            }
        }
    }
    out
}

pub fn run(args: CharArgs) -> Result<bool, CliError> {
    check_level(args.k, args.max_level)?;
    let indices = args.i.resolve(args.k)?;
    let (k, n) = (args.k, args.max_weight);
    let mut cache =
        (!args.no_cache).then(|| DimensionCache::open(resolve_path(args.cache.clone())));

    let engine = Engine::new();
    let mut tables = Vec::new();
    let mut dirty = false;
    for &i in &indices {
        let cached = cache.as_ref().and_then(|c| c.get(k, i, n).cloned());
        let dimension = match cached {
            Some(d) => d,
            None => {
                let d = with_jobs(args.jobs.map(usize::from), || {
                    dimension_table(&engine, k, i, n as usize)
                })?;
                if let Some(c) = cache.as_mut() {
                    c.insert(k, i, n, d.clone());
                    dirty = true;
                }
                d
            }
        };
        tables.push(table_for(k, i, n, args.convention, dimension));
    }
    if let (Some(c), true) = (&cache, dirty) {
        c.save()?;
    }

    let passed = tables
        .iter()
        .all(|t| t.difference_two_matches && t.fermionic_matches);
    let report = CharReport {
        tool: "pslab",
        version: VERSION,
        passed,
        tables,
    };
    let text = match args.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report)
                .map_err(|e| CliError::Internal(e.to_string()))?;
            s.push('\n');
            s
        }
        Format::Csv => render_csv(&report),
        Format::Table => render_table(&report),
    };
    emit(&text, args.output.as_ref())?;
    Ok(passed)
}
