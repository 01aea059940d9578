use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

mod commands;

use commands::Output;
use kstack::Error;

/// Exact computations with classes of stacks, and the finite-field oracles
/// that check them.
#[derive(Parser)]
#[command(name = "kstack", version, about)]
struct Cli {
    /// Emit machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,
    /// JSON manifest declaring symbols used in expressions.
    #[arg(long, global = true, value_name = "FILE")]
    symbols: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Canonical form of an expression.
    Eval {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Expansion in powers of L^-1 down to L^floor.
    Expand {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long, allow_hyphen_values = true)]
        floor: i64,
    },
    /// Point count over F_q, exact or truncated with a tail bound.
    Count {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long)]
        q: u64,
        #[arg(long, allow_hyphen_values = true)]
        floor: Option<i64>,
        /// Growth certificate `C,d,D`: |c_k| <= C(2|k|)^d + D.
        #[arg(long, value_name = "C,d,D")]
        growth: Option<String>,
    },
    /// Weight multiplicity series (an upper bound).
    Weights {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long, allow_hyphen_values = true)]
        floor: Option<i64>,
    },
    /// Enumeration oracles.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Harder–Narasimhan strata of Bun.
    #[command(subcommand)]
    Bun(BunCommand),
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Number of invertible n×n matrices over F_q.
    Gl {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        q: u64,
    },
    /// Number of nonzero ternary cubic forms over F_q defining smooth curves.
    Cubics {
        #[arg(long)]
        q: u64,
    },
    /// Mass of a stratum of [A^k / (G_m^k ⋊ Σ_k)] over F_q.
    Monomial {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        q: u64,
        /// `all`, `origin` or `zeros=J`.
        #[arg(long, default_value = "all")]
        stratum: String,
    },
    /// Mass of the moduli stack of smooth plane cubics.
    MassM13 {
        #[arg(long)]
        q: u64,
    },
}

#[derive(Subcommand)]
enum BunCommand {
    /// SL_2 over a curve given by its zeta numerator.
    Sl2(Sl2Args),
}

#[derive(Args)]
struct Sl2Args {
    #[arg(long)]
    genus: Option<u32>,
    #[arg(long)]
    q: Option<u64>,
    /// Zeta numerator coefficients `1,c1,...,c2g`.
    #[arg(long, allow_hyphen_values = true)]
    zeta: Option<String>,
    /// Curve manifest `{"q": .., "g": .., "P": [..]}` instead of the flags.
    #[arg(long, conflicts_with_all = ["genus", "q", "zeta"])]
    curve: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    floor: Option<i64>,
}

fn run(cli: &Cli) -> Result<Output, Error> {
    let table = commands::load_symbols(cli.symbols.as_deref())?;
    match &cli.command {
        Command::Eval { expr } => commands::eval(expr, &table),
        Command::Expand { expr, floor } => commands::expand(expr, *floor, &table),
        Command::Count {
            expr,
            q,
            floor,
            growth,
        } => commands::count(expr, *q, *floor, growth.as_deref(), &table),
        Command::Weights { expr, floor } => commands::weights(expr, *floor, &table),
        Command::Oracle(o) => match o {
            OracleCommand::Gl { n, q } => commands::oracle_gl(*n, *q),
            OracleCommand::Cubics { q } => commands::oracle_cubics(*q),
            OracleCommand::Monomial { k, q, stratum } => commands::oracle_monomial(*k, *q, stratum),
            OracleCommand::MassM13 { q } => commands::oracle_mass_m13(*q),
        },
        Command::Bun(BunCommand::Sl2(a)) => {
            let curve = commands::curve_from(a.curve.as_deref(), a.genus, a.q, a.zeta.as_deref())?;
            commands::bun_sl2(&curve, a.floor)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.json).unwrap());
            } else {
                println!("{}", out.text);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let code = if e.is_parse() { 2 } else { 3 };
            if cli.json {
                let mut v = json!({"error": e.name(), "message": e.to_string()});
                if let Error::Parse { offset, expected } = &e {
                    v["offset"] = json!(offset);
                    v["expected"] = json!(expected);
                }
                println!("{}", serde_json::to_string_pretty(&v).unwrap());
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(code)
        }
    }
}
