use clap::{Args, ValueEnum};

use pslab_core::algebra::{r_generator, Truncation};
use pslab_core::ideal::PieceBasis;
use pslab_core::lattice::ModuleConfig;
use pslab_core::{Engine, Polynomial};

use crate::{check_level, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DumpWhat {
    /// Monomials whose images form a basis of the piece of W(Lambda_{k,i})
    Basis,
    /// The relation R^0_{k,t}, or R^1_{k,t} with --primed
    Generators,
    /// Reduced basis of the kernel piece
    Kernel,
}

#[derive(Debug, Args)]
pub struct DumpArgs {
    what: DumpWhat,
    #[arg(long)]
    k: u32,
    #[arg(long, default_value_t = 0)]
    i: u32,
    /// Weight of the relation, for `generators`.
    #[arg(long)]
    t: Option<u32>,
    #[arg(long)]
    weight: Option<u32>,
    #[arg(long)]
    charge: Option<u32>,
    /// Use the subalgebra generated by x(-2), x(-3), ... (forces i = k).
    #[arg(long)]
    primed: bool,
    #[arg(long, default_value_t = 4)]
    max_level: u32,
}

fn bigrade(args: &DumpArgs) -> Result<(u32, u32), CliError> {
    match (args.weight, args.charge) {
        (Some(n), Some(c)) => Ok((n, c)),
        _ => Err(CliError::Usage("--weight and --charge are required".into())),
    }
}

pub fn run(args: DumpArgs) -> Result<(), CliError> {
    check_level(args.k, args.max_level)?;
    if args.i > args.k {
        return Err(CliError::Usage(format!(
            "index {} exceeds level {}",
            args.i, args.k
        )));
    }
    let i = if args.primed { args.k } else { args.i };
    let min_part = if args.primed { 2 } else { 1 };
    let mut lines: Vec<String> = Vec::new();
    match args.what {
        DumpWhat::Generators => {
            let t = args
                .t
                .ok_or_else(|| CliError::Usage("--t is required for generators".into()))?;
            let truncation = if args.primed {
                Truncation::BelowMinusOne
            } else {
                Truncation::Negative
            };
            let r: Polynomial = r_generator(args.k, t, truncation);
            if !r.is_zero() {
                lines.push(r.to_string());
            }
        }
        DumpWhat::Kernel | DumpWhat::Basis => {
            let (n, c) = bigrade(&args)?;
            let cfg = ModuleConfig::new(args.k, i).map_err(|e| CliError::Usage(e.to_string()))?;
            let engine = Engine::new();
            let kernel = if args.primed {
                engine.primed_kernel_piece(args.k, n, c)
            } else {
                engine.kernel_piece(&cfg, n, c)
            };
            let basis = PieceBasis::new(n, c, min_part);
            if args.what == DumpWhat::Kernel {
                lines.extend(
                    kernel
                        .basis()
                        .iter()
                        .map(|v| basis.polynomial(v).to_string()),
                );
            } else {
                lines.extend(
                    basis
                        .monomials()
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| !kernel.pivots().contains(j))
                        .map(|(_, m)| m.to_string()),
                );
            }
        }
    }
    for line in lines {
        println!("{line}");
    }
    Ok(())
}
