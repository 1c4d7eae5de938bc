//! Command-line front end for the flagcodes library: construct spreads,
//! groups, and optimum-distance flag codes as JSON; run the named
//! verification suites; and push codes through the seeded subspace
//! channel.
//!
//! Exit codes are a stable contract: 0 success (all checks passed), 1 a
//! verification check failed, 2 invalid arguments or configuration, 3 a
//! resource cap was exceeded.  The environment variable `FLAGCODES_CAP`
//! overrides the enumeration cap used by the verification suites.

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use flagcodes::channel::{simulate, ChannelConfig};
use flagcodes::flags::build_odfc;
use flagcodes::galois::FieldTower;
use flagcodes::groups::{build_g, build_singer, DEFAULT_TABLE_CAP};
use flagcodes::spread::{build_segre_spread, SpreadDoc};
use flagcodes::suites::{run_suite, Suite};
use flagcodes::Error;

const EXIT_PASS: i32 = 0;
const EXIT_CHECK_FAILED: i32 = 1;
const EXIT_USAGE: i32 = 2;
const EXIT_CAP: i32 = 3;

#[derive(Parser)]
#[command(
    name = "flagcodes",
    version,
    about = "Construct, verify, and simulate optimum-distance flag codes on F_q^(2k)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct an object and write it as JSON
    Construct(ConstructArgs),
    /// Run a verification suite and print its report as JSON
    Verify(VerifyArgs),
    /// Monte-Carlo the constructed code through the subspace channel
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct TowerArgs {
    /// Field characteristic (must be prime)
    #[arg(long)]
    p: u64,
    /// Degree of the ground field over the prime field (q = p^e)
    #[arg(long)]
    e: usize,
    /// Half the ambient dimension: everything lives on 2k coordinates
    #[arg(long)]
    k: usize,
    /// Override extension polynomials, one per tower level in order:
    /// comma-separated coefficients, constant term first, monic, primitive
    #[arg(long = "poly", value_name = "CSV")]
    polys: Vec<String>,
}

impl TowerArgs {
    fn build(&self) -> Result<FieldTower, Error> {
        let overrides = self
            .polys
            .iter()
            .map(|csv| parse_csv(csv))
            .collect::<Result<Vec<_>, Error>>()?;
        FieldTower::with_polys(self.p, self.e, self.k, &overrides)
    }
}

fn parse_csv(csv: &str) -> Result<Vec<u64>, Error> {
    csv.split(',')
        .map(|c| {
            c.trim()
                .parse::<u64>()
                .map_err(|_| Error::BadInput(format!("polynomial coefficient {c:?} is not an integer")))
        })
        .collect()
}

#[derive(Clone, Copy, ValueEnum)]
enum What {
    /// The standard planar spread of F_q^(2k)
    Spread,
    /// The block group generated by the swap and the shears
    #[value(name = "group-G")]
    GroupG,
    /// The embedded cyclic subgroup of order q^k+1
    #[value(name = "group-H")]
    GroupH,
    /// The optimum-distance full flag code of size q^k+1
    Odfc,
}

#[derive(Args)]
struct ConstructArgs {
    #[command(flatten)]
    tower: TowerArgs,
    /// Which object to construct
    #[arg(long, value_enum)]
    what: What,
    /// Output file; "-" writes to standard output
    #[arg(long, default_value = "-")]
    out: String,
    /// Include the full element list in group output
    #[arg(long)]
    dump_elements: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    tower: TowerArgs,
    /// Which checks to run: all, spread, groups, flags, or slow
    #[arg(long, default_value = "all")]
    suite: String,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    tower: TowerArgs,
    /// Number of independent trials
    #[arg(long)]
    trials: usize,
    /// Rows erased per shot (clamped per shot to dimension − 1)
    #[arg(long)]
    erasures: usize,
    /// Dimension of the random error subspace adjoined on every shot
    #[arg(long)]
    errordim: usize,
    /// Base seed; trial i uses seed + i
    #[arg(long)]
    seed: u64,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_PASS,
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    let code = match cli.command {
        Command::Construct(args) => cmd_construct(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Simulate(args) => cmd_simulate(args),
    };
    std::process::exit(code);
}

fn fail(err: &Error) -> i32 {
    eprintln!("error: {err}");
    if err.is_cap() {
        EXIT_CAP
    } else {
        EXIT_USAGE
    }
}

fn table_cap() -> Result<u64, String> {
    match std::env::var("FLAGCODES_CAP") {
        Ok(v) => v
            .parse::<u64>()
            .map_err(|_| format!("FLAGCODES_CAP must be a nonnegative integer, got {v:?}")),
        Err(_) => Ok(DEFAULT_TABLE_CAP),
    }
}

fn write_out(path: &str, contents: &str) -> i32 {
    if path == "-" {
        println!("{contents}");
        EXIT_PASS
    } else if let Err(err) = std::fs::write(path, format!("{contents}\n")) {
        eprintln!("error: cannot write {path}: {err}");
        EXIT_USAGE
    } else {
        EXIT_PASS
    }
}

fn cmd_construct(args: ConstructArgs) -> i32 {
    let tower = match args.tower.build() {
        Ok(t) => t,
        Err(err) => return fail(&err),
    };
    let rendered = match args.what {
        What::Spread => {
            serde_json::to_value(SpreadDoc::new(&tower, &build_segre_spread(&tower)))
        }
        What::GroupG => match build_g(&tower) {
            Ok(g) => serde_json::to_value(g.to_doc(&tower, args.dump_elements)),
            Err(err) => return fail(&err),
        },
        What::GroupH => match build_singer(&tower) {
            Ok(singer) => {
                serde_json::to_value(singer.embedded.to_doc(&tower, args.dump_elements))
            }
            Err(err) => return fail(&err),
        },
        What::Odfc => match build_odfc(&tower) {
            Ok(code) => serde_json::to_value(code.to_doc(&tower)),
            Err(err) => return fail(&err),
        },
    };
    let value = rendered.expect("library documents serialize");
    write_out(&args.out, &value.to_string())
}

fn cmd_verify(args: VerifyArgs) -> i32 {
    let cap = match table_cap() {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let suite = match Suite::parse(&args.suite) {
        Ok(s) => s,
        Err(err) => return fail(&err),
    };
    let tower = match args.tower.build() {
        Ok(t) => t,
        Err(err) => return fail(&err),
    };
    let report = match run_suite(&tower, suite, cap) {
        Ok(r) => r,
        Err(err) => return fail(&err),
    };
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    if report.passed {
        EXIT_PASS
    } else {
        EXIT_CHECK_FAILED
    }
}

fn cmd_simulate(args: SimulateArgs) -> i32 {
    let tower = match args.tower.build() {
        Ok(t) => t,
        Err(err) => return fail(&err),
    };
    let code = match build_odfc(&tower) {
        Ok(c) => c,
        Err(err) => return fail(&err),
    };
    let erasures: Vec<usize> =
        code.type_vec().iter().map(|&t| args.erasures.min(t - 1)).collect();
    let error_dims = vec![args.errordim; code.type_vec().len()];
    let cfg = match ChannelConfig::new(erasures, error_dims, args.seed) {
        Ok(c) => c,
        Err(err) => return fail(&err),
    };
    if let Err(err) = cfg.validate_for(&code.flags()[0]) {
        return fail(&err);
    }
    let sim = match simulate(&tower, &code, &cfg, args.trials) {
        Ok(s) => s,
        Err(err) => return fail(&err),
    };
    for record in &sim.records {
        println!("{}", serde_json::to_string(record).expect("records serialize"));
    }
    println!("{}", serde_json::to_string(&sim.summary).expect("summary serializes"));
    EXIT_PASS
}
