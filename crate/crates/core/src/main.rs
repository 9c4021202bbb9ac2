use clap::{Args, Parser, Subcommand};
use oblijoin::audit::{self, AuditVerdict, CommOperator, Primitive, ProbeConfig, SizeProfile, SlackMode};
use oblijoin::cluster::ClusterConfig;
use oblijoin::io;
use oblijoin::runner::{self, Operator, Padding, RunSpec};
use oblijoin::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "oblijoin", version, about = "Oblivious distributed joins on a simulated cluster")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Number of simulated servers.
    #[arg(long, global = true, default_value_t = 4)]
    servers: usize,
    /// Security parameter: padding fails with probability at most 2^-sigma.
    #[arg(long, global = true, default_value_t = 40)]
    sigma: u32,
    /// Master seed for every random stream.
    #[arg(long, global = true, env = "OBLIJOIN_SEED", default_value_t = 0)]
    seed: u64,
    /// Where to write the JSON report.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a (key, value) table with Zipf-distributed keys.
    Gen {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        domain: u64,
        #[arg(long, default_value_t = 0.0)]
        z: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Convert an edge list into a (src, dst) table.
    LoadEdges {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// General equi-join R(A, B) ⋈ S(B, C).
    Join {
        left: PathBuf,
        right: PathBuf,
        #[command(flatten)]
        keys: JoinKeys,
        /// `infer` or `given:M`.
        #[arg(long, default_value = "infer")]
        padding: Padding,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Join against a primary-key right side (left-outer).
    Pkjoin {
        left: PathBuf,
        right: PathBuf,
        #[command(flatten)]
        keys: JoinKeys,
        #[arg(long, default_value = "pk")]
        padding: Padding,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sort a table by its key column.
    Sort {
        input: PathBuf,
        #[arg(long)]
        key: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repeat every row `count` times into an output of public size M.
    Expand {
        input: PathBuf,
        #[arg(long)]
        count: Option<String>,
        /// `given:M`.
        #[arg(long)]
        padding: Padding,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Obliviousness and padding checks.
    Audit {
        #[command(subcommand)]
        check: AuditCheck,
    },
}

#[derive(Args)]
struct JoinKeys {
    /// Key column of the left table (name or index).
    #[arg(long)]
    left_key: Option<String>,
    /// Key column of the right table (name or index).
    #[arg(long)]
    right_key: Option<String>,
}

#[derive(Subcommand)]
enum AuditCheck {
    /// Transcript equality over same-size inputs.
    Comm {
        #[arg(long, default_value = "shuffle-by-key")]
        operator: String,
        #[arg(long, default_value_t = 1000)]
        n1: usize,
        #[arg(long, default_value_t = 1000)]
        n2: usize,
        #[arg(long, default_value_t = 4000)]
        bound: u64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// Access-trace equality over same-size inputs.
    Comp {
        #[arg(long, default_value = "osort")]
        primitive: String,
        #[arg(long, default_value_t = 256)]
        size: usize,
        #[arg(long, default_value_t = 50)]
        trials: usize,
    },
    /// Overflow rate of shuffle-by-key padding.
    Probe {
        #[arg(long, default_value_t = 256)]
        per_server: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        /// Pad with no slack at all (sanity check: overflows expected).
        #[arg(long)]
        zero_slack: bool,
    },
    /// Every check at its default size.
    All {
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
}

enum Failure {
    Input(Error),
    Overflow(Error),
    Audit(Vec<String>),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::PaddingOverflow { .. } => Failure::Overflow(e),
            other => Failure::Input(other),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Overflow(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        Err(Failure::Audit(failed)) => {
            for id in failed {
                eprintln!("audit failed: {id}");
            }
            ExitCode::from(4)
        }
    }
}

fn execute(cli: Cli) -> Result<(), Failure> {
    let c = cli.common;
    let spec = |operator: Operator, inputs: Vec<PathBuf>, padding: Padding, out: Option<PathBuf>| RunSpec {
        servers: c.servers,
        sigma: c.sigma,
        seed: c.seed,
        padding,
        report: c.report.clone(),
        output: out,
        ..RunSpec::new(operator, inputs)
    };
    let outcome = match cli.command {
        Command::Gen { rows, domain, z, out } => {
            let (table, stats) = io::gen_zipf(rows, domain, z, c.seed)?;
            table.write(&out)?;
            let json = serde_json::to_string_pretty(&stats).map_err(Error::from)?;
            write_or_print(c.report.as_ref(), &json)?;
            return Ok(());
        }
        Command::LoadEdges { input, out } => {
            let table = io::load_edges(&input)?;
            table.write(&out)?;
            println!("{} edges", table.rows.len());
            return Ok(());
        }
        Command::Join {
            left,
            right,
            keys,
            padding,
            out,
        } => {
            let mut s = spec(Operator::Join, vec![left, right], padding, out);
            s.keys = vec![keys.left_key, keys.right_key];
            runner::run(&s)?
        }
        Command::Pkjoin {
            left,
            right,
            keys,
            padding,
            out,
        } => {
            let mut s = spec(Operator::PkJoin, vec![left, right], padding, out);
            s.keys = vec![keys.left_key, keys.right_key];
            runner::run(&s)?
        }
        Command::Sort { input, key, out } => {
            let mut s = spec(Operator::Sort, vec![input], Padding::Infer, out);
            s.keys = vec![key];
            runner::run(&s)?
        }
        Command::Expand {
            input,
            count,
            padding,
            out,
        } => {
            let mut s = spec(Operator::Expand, vec![input], padding, out);
            s.count_column = count;
            runner::run(&s)?
        }
        Command::Audit { check } => return run_audit(check, &c),
    };
    let t = &outcome.report.totals;
    println!(
        "{} output rows, {} rounds, {} elements sent ({} nominal)",
        outcome.output.rows.len(),
        t.rounds,
        t.comm_elements,
        t.comm_nominal
    );
    for b in &outcome.report.bound_formulas {
        let status = if b.ok { "ok" } else { "VIOLATED" };
        println!("  {} ({}): measured {} against {} [{status}]", b.name, b.formula, b.measured, b.bound);
    }
    Ok(())
}

fn write_or_print(path: Option<&PathBuf>, json: &str) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, format!("{json}\n"))?,
        None => println!("{json}"),
    }
    Ok(())
}

fn run_audit(check: AuditCheck, c: &Common) -> Result<(), Failure> {
    let config = ClusterConfig::new(c.servers, c.sigma, c.seed);
    config.validate()?;
    let verdicts = match check {
        AuditCheck::Comm {
            operator,
            n1,
            n2,
            bound,
            trials,
        } => {
            let op = CommOperator::from_name(&operator)?;
            let profile = SizeProfile::balanced(c.servers, n1, n2, bound);
            vec![audit::check_comm_oblivious(op, &profile, trials, &config, c.seed ^ 1)]
        }
        AuditCheck::Comp { primitive, size, trials } => {
            let prim = Primitive::from_name(&primitive).ok_or_else(|| Error::UnknownOperator(primitive.clone()))?;
            vec![audit::check_comp_oblivious(prim, size, trials, c.seed)]
        }
        AuditCheck::Probe {
            per_server,
            trials,
            zero_slack,
        } => {
            let cfg = ProbeConfig {
                servers: c.servers,
                per_server,
                sigma: c.sigma,
                trials,
                seed: c.seed,
                mode: if zero_slack { SlackMode::Zero } else { SlackMode::Theorem },
            };
            let outcome = audit::failure_probe(&cfg);
            let json = serde_json::to_string_pretty(&outcome).map_err(Error::from)?;
            write_or_print(c.report.as_ref(), &json)?;
            // With no slack, overflows are the expected outcome.
            let passed = if zero_slack { outcome.overflows > 0 } else { outcome.within(3.0) };
            return if passed { Ok(()) } else { Err(Failure::Audit(vec!["failure-probe".into()])) };
        }
        AuditCheck::All { trials } => {
            let profile = SizeProfile::balanced(c.servers, 600, 400, 2400);
            let mut v: Vec<AuditVerdict> = CommOperator::PADDED
                .into_iter()
                .map(|op| audit::check_comm_oblivious(op, &profile, trials, &config, c.seed ^ 1))
                .collect();
            for prim in Primitive::OBLIVIOUS {
                for size in [16, 64, 256, 1024] {
                    v.push(audit::check_comp_oblivious(prim, size, trials, c.seed));
                }
            }
            v
        }
    };
    let json = serde_json::to_string_pretty(&verdicts).map_err(Error::from)?;
    write_or_print(c.report.as_ref(), &json)?;
    let failed: Vec<String> = verdicts.into_iter().filter(|v| !v.passed).map(|v| v.check_id).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Audit(failed))
    }
}
