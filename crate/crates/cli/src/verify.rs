use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, ValueEnum};
use serde::Serialize;

use pslab_core::characters::{
    compare, difference_two_table, dimension_table, fermionic_sum, Comparison, LinearTerm,
};
use pslab_core::ideal::{CheckFailure, CheckReport, GradedPieceReport};
use pslab_core::Engine;

use crate::{check_level, emit, with_jobs, CliError, Format, IndexSel, VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Presentation,
    Primed,
    Ideals,
    Lifting,
    Tau,
    Chain,
    Annihilation,
    ChargeBound,
    Pattern,
    Characters,
    All,
}

impl Check {
    const EACH: [Check; 10] = [
        Check::Presentation,
        Check::Primed,
        Check::Ideals,
        Check::Lifting,
        Check::Tau,
        Check::Chain,
        Check::Annihilation,
        Check::ChargeBound,
        Check::Pattern,
        Check::Characters,
    ];
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Level k.
    #[arg(long)]
    k: u32,
    /// Index i, or `all`.
    #[arg(long, default_value = "all")]
    i: IndexSel,
    /// Largest weight checked.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    max_weight: u32,
    /// Largest charge checked (default: the max weight).
    #[arg(long)]
    max_charge: Option<u32>,
    /// Comma-separated checks.
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_value = "presentation"
    )]
    checks: Vec<Check>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Worker threads (default: all cores). Does not affect the output.
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: Option<u16>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Largest accepted level.
    #[arg(long, default_value_t = 4)]
    max_level: u32,
    /// Linear term of the fermionic sums used by the `characters` check.
    #[arg(long, default_value = "last-i")]
    convention: LinearTerm,
    /// Include wall-clock time in the report, which makes it nondeterministic.
    #[arg(long)]
    timing: bool,
}

#[derive(Debug, Serialize)]
struct ConfigEcho {
    k: u32,
    i: Vec<u32>,
    max_weight: u32,
    max_charge: u32,
    checks: Vec<Check>,
    convention: LinearTerm,
}

#[derive(Debug, Serialize)]
struct CheckSummary {
    check: String,
    k: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    i: Option<u32>,
    passed: bool,
    cases: usize,
    failures: usize,
}

#[derive(Debug, Serialize)]
struct Counterexample {
    check: String,
    k: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    i: Option<u32>,
    weight: u32,
    charge: u32,
    claim: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<String>,
}

#[derive(Debug, Serialize)]
struct VerificationReport {
    tool: &'static str,
    version: &'static str,
    config: ConfigEcho,
    passed: bool,
    checks: Vec<CheckSummary>,
    pieces: Vec<GradedPieceReport>,
    first_counterexample: Option<Counterexample>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timing_ms: Option<u128>,
}

impl VerificationReport {
    fn push_rows(&mut self, check: &str, k: u32, i: u32, rows: Vec<GradedPieceReport>) {
        let failed: Vec<_> = rows.iter().filter(|r| !r.equal).collect();
        if let (None, Some(r)) = (&self.first_counterexample, failed.first()) {
            self.first_counterexample = Some(Counterexample {
                check: check.to_string(),
                k,
                i: Some(i),
                weight: r.weight,
                charge: r.charge,
                claim: format!(
                    "ideal piece (dim {}) equals kernel piece (dim {})",
                    r.dim_ideal, r.dim_kernel
                ),
                witness: r.witness.clone(),
            });
        }
        self.checks.push(CheckSummary {
            check: check.to_string(),
            k,
            i: Some(i),
            passed: failed.is_empty(),
            cases: rows.len(),
            failures: failed.len(),
        });
        self.pieces.extend(rows);
    }

    fn push_check(&mut self, report: CheckReport) {
        if let (None, Some(f)) = (&self.first_counterexample, report.failures.first()) {
            self.first_counterexample = Some(Counterexample {
                check: report.check.clone(),
                k: report.k,
                i: report.i,
                weight: f.weight,
                charge: f.charge,
                claim: f.claim.clone(),
                witness: f.witness.clone(),
            });
        }
        self.checks.push(CheckSummary {
            check: report.check.clone(),
            k: report.k,
            i: report.i,
            passed: report.passed(),
            cases: report.cases_checked,
            failures: report.failures.len(),
        });
    }
}

fn characters_check(
    engine: &Engine,
    k: u32,
    i: u32,
    order: usize,
    linear: LinearTerm,
) -> CheckReport {
    let dims = dimension_table(engine, k, i, order);
    let mut failures = Vec::new();
    let sides = [
        ("difference-two count", difference_two_table(k, i, order)),
        ("fermionic sum", fermionic_sum(k, i, order, linear)),
    ];
    for (label, other) in &sides {
        if let Comparison::Mismatch {
            charge,
            power,
            left,
            right,
        } = compare(&dims, other, order)
        {
            failures.push(CheckFailure {
                weight: power as u32,
                charge,
                claim: format!("dimension {left} equals {label} {right}"),
                witness: None,
            });
        }
    }
    CheckReport {
        check: "characters".into(),
        k,
        i: Some(i),
        cases_checked: sides.len(),
        failures,
    }
}

fn build_report(args: &VerifyArgs, indices: &[u32], checks: &[Check]) -> VerificationReport {
    let (k, n, c) = (
        args.k,
        args.max_weight,
        args.max_charge.unwrap_or(args.max_weight),
    );
    let linear = args.convention;
    let engine = Engine::new();
    let mut report = VerificationReport {
        tool: "pslab",
        version: VERSION,
        config: ConfigEcho {
            k,
            i: indices.to_vec(),
            max_weight: n,
            max_charge: c,
            checks: checks.to_vec(),
            convention: linear,
        },
        passed: false,
        checks: Vec::new(),
        pieces: Vec::new(),
        first_counterexample: None,
        timing_ms: None,
    };
    for &check in checks {
        match check {
            Check::Presentation => {
                for &i in indices {
                    report.push_rows("presentation", k, i, engine.verify_presentation(k, i, n, c));
                }
            }
            Check::Primed => {
                report.push_rows("primed", k, k, engine.verify_primed_presentation(k, n, c))
            }
            Check::Ideals => report.push_check(engine.verify_ideal_relations(k, n, c)),
            Check::Lifting => {
                for &i in indices {
                    report.push_check(engine.verify_lifting(k, i, n, c));
                }
            }
            Check::Tau => report.push_check(engine.verify_tau_inclusion(k, n, c)),
            Check::Chain => report.push_check(engine.verify_kernel_chain(k, n, c)),
            Check::Annihilation => report.push_check(engine.verify_annihilation(k, n)),
            Check::ChargeBound => report.push_check(engine.verify_charge_bound(k, n)),
            Check::Pattern => {
                for &i in indices {
                    report.push_check(engine.verify_pattern_independence(k, i, n, c));
                }
            }
            Check::Characters => {
                for &i in indices {
                    report.push_check(characters_check(&engine, k, i, n as usize, linear));
                }
            }
            Check::All => unreachable!("expanded before running"),
        }
    }
    report.passed = report.checks.iter().all(|s| s.passed);
    report
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn render_csv(report: &VerificationReport) -> String {
    let mut out = String::from(
        "check,k,i,weight,charge,dim_monomials,dim_ideal,dim_kernel,passed,cases,witness\n",
    );
    let opt = |v: Option<u32>| v.map(|x| x.to_string()).unwrap_or_default();
    for s in &report.checks {
        writeln!(
            out,
            "{},{},{},,,,,,{},{},",
            s.check,
            s.k,
            opt(s.i),
            s.passed,
            s.cases
        )
        .unwrap();
    }
    for r in &report.pieces {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},1,{}",
            if r.primed { "primed" } else { "presentation" },
            r.k,
            r.i,
            r.weight,
            r.charge,
            r.dim_monomials,
            r.dim_ideal,
            r.dim_kernel,
            r.equal,
            csv_field(r.witness.as_deref().unwrap_or(""))
        )
        .unwrap();
    }
    out
}

fn render_table(report: &VerificationReport) -> String {
    let cfg = &report.config;
    let indices: Vec<String> = cfg.i.iter().map(|i| i.to_string()).collect();
    let mut out = format!(
        "pslab {}  k={} i={} max-weight={} max-charge={}\n\n",
        report.version,
        cfg.k,
        indices.join(","),
        cfg.max_weight,
        cfg.max_charge
    );
    writeln!(
        out,
        "{:<14} {:>2} {:>2} {:>7} {:>8}  result",
        "check", "k", "i", "cases", "failures"
    )
    .unwrap();
    for s in &report.checks {
        let i = s.i.map(|i| i.to_string()).unwrap_or_else(|| "-".into());
        let result = if s.passed { "PASS" } else { "FAIL" };
        writeln!(
            out,
            "{:<14} {:>2} {:>2} {:>7} {:>8}  {result}",
            s.check, s.k, i, s.cases, s.failures
        )
        .unwrap();
    }
    if !report.pieces.is_empty() {
        writeln!(
            out,
            "\n{:<7} {:>2} {:>6} {:>6} {:>9} {:>9} {:>10}  equal",
            "", "i", "weight", "charge", "monomials", "dim ideal", "dim kernel"
        )
        .unwrap();
        for r in &report.pieces {
            let tag = if r.primed { "primed" } else { "" };
            writeln!(
                out,
                "{tag:<7} {:>2} {:>6} {:>6} {:>9} {:>9} {:>10}  {}",
                r.i, r.weight, r.charge, r.dim_monomials, r.dim_ideal, r.dim_kernel, r.equal
            )
            .unwrap();
        }
    }
    if let Some(ce) = &report.first_counterexample {
        writeln!(
            out,
            "\nfirst counterexample: {} at (weight {}, charge {}): {} {}",
            ce.check,
            ce.weight,
            ce.charge,
            ce.claim,
            ce.witness.as_deref().unwrap_or("")
        )
        .unwrap();
    }
    if let Some(ms) = report.timing_ms {
        writeln!(out, "time: {ms} ms").unwrap();
    }
    writeln!(
        out,
        "\noverall: {}",
        if report.passed { "PASS" } else { "FAIL" }
    )
    .unwrap();
    out
}

pub fn run(args: VerifyArgs) -> Result<bool, CliError> {
    check_level(args.k, args.max_level)?;
    let indices = args.i.resolve(args.k)?;
    let mut checks: Vec<Check> = if args.checks.contains(&Check::All) {
        Check::EACH.to_vec()
    } else {
        args.checks.clone()
    };
    checks.sort();
    checks.dedup();

    let start = Instant::now();
    let mut report = with_jobs(args.jobs.map(usize::from), || {
        build_report(&args, &indices, &checks)
    })?;
    if args.timing {
        report.timing_ms = Some(start.elapsed().as_millis());
    }
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
    Ok(report.passed)
}
