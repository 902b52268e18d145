mod eval;
mod parse;
mod report;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fhtdiag::asymptotics::AnnulusConfig;
use fhtdiag::spectral::Geometry;
use fhtdiag::verify::{self, Check};
use report::{Format, Record};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "fhtdiag", version, about = "Evaluate and verify the diagonalization of the finite Hilbert transform on two touching intervals")]
struct Cli {
    /// Left endpoint b_L < 0.
    #[arg(long, global = true, default_value_t = -1.0, allow_negative_numbers = true)]
    bl: f64,
    /// Right endpoint b_R > 0.
    #[arg(long, global = true, default_value_t = 1.0)]
    br: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write records here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Override the tolerance of every emitted record.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for the randomized special-function suite.
    #[arg(long, global = true, default_value_t = 20240611)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one quantity, with an identity it must satisfy as the residual.
    Eval {
        #[command(subcommand)]
        what: eval::Quantity,
    },
    /// Run verification suites.
    Verify(VerifyArgs),
    /// Small-lambda asymptotics.
    Asymptotics {
        #[command(subcommand)]
        what: AsymptoticsCmd,
    },
    /// Run every suite and print one summary record per suite.
    Report(VerifyArgs),
}

#[derive(Args, Clone)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    suite: Suite,
    /// Sample points per subinterval for the z-jump suite.
    #[arg(long, default_value_t = 50)]
    grid: usize,
    /// Relative distance of the z-jump sample points from the interval ends.
    #[arg(long, default_value_t = 0.01, value_parser = parse::margin)]
    margin: f64,
    /// Quadrature nodes for the Nystrom and spectral suites; each suite has its own default.
    #[arg(long)]
    nodes: Option<usize>,
    /// Parameter draws for the special-function suite.
    #[arg(long, default_value_t = 100)]
    draws: usize,
}

#[derive(Subcommand)]
enum AsymptoticsCmd {
    /// Deviation of Gamma from its leading-order form over a kappa sweep.
    Sweep(KappaArgs),
    /// The annulus around 0 and the deviation in its three sectors.
    Annulus(KappaArgs),
    /// Saddle-point leading term against quadrature.
    Saddle(KappaArgs),
    /// Jumps of the error matrix on the lens edges and the zero disc.
    ErrorMatrix(KappaArgs),
}

#[derive(Args)]
struct KappaArgs {
    /// Comma-separated kappa = -ln lambda values, increasing.
    #[arg(long, value_parser = parse::kappas, default_value = "6,9,12")]
    kappa: parse::Kappas,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum Suite {
    Jumps,
    LambdaJumps,
    Resolvent,
    Svd,
    Isometry,
    Diag,
    Equivalence,
    Ode,
    Asymptotics,
    Saddle,
    Special,
    All,
}

const SUITES: [Suite; 11] = [
    Suite::Jumps,
    Suite::LambdaJumps,
    Suite::Resolvent,
    Suite::Svd,
    Suite::Isometry,
    Suite::Diag,
    Suite::Ode,
    Suite::Equivalence,
    Suite::Asymptotics,
    Suite::Saddle,
    Suite::Special,
];

fn acceptance_kappas() -> Vec<f64> {
    [3.0, 4.0, 5.0].iter().map(|k| k * 10f64.ln()).collect()
}

fn run_suite(suite: Suite, geom: Geometry, a: &VerifyArgs, seed: u64) -> fhtdiag::Result<Vec<Check>> {
    let cfg = AnnulusConfig::default();
    let keep = |checks: Vec<Check>, f: &dyn Fn(&str) -> bool| checks.into_iter().filter(|c| f(&c.check_id)).collect();
    Ok(match suite {
        Suite::Jumps => verify::z_jumps(geom, &verify::z_jump_lambdas(), a.grid, a.margin)?,
        Suite::LambdaJumps => verify::lambda_jumps(geom)?,
        Suite::Resolvent => verify::resolvent(geom, a.nodes.unwrap_or(300))?,
        Suite::Svd => verify::svd(geom, &[-0.1, -0.25, -0.45])?,
        Suite::Isometry => keep(verify::diagonalization(geom, a.nodes.unwrap_or(400))?, &|id| id == "isometry"),
        Suite::Diag => keep(verify::diagonalization(geom, a.nodes.unwrap_or(400))?, &|id| id != "isometry"),
        Suite::Ode => keep(verify::ode(geom, a.nodes.unwrap_or(300))?, &|id| id != "ode-equivalence"),
        Suite::Equivalence => keep(verify::ode(geom, a.nodes.unwrap_or(300))?, &|id| id == "ode-equivalence"),
        Suite::Asymptotics => {
            geom.require_symmetric()?;
            verify::asymptotic_sweep(&acceptance_kappas(), &cfg)?.0
        }
        Suite::Saddle => verify::saddle(&acceptance_kappas(), &cfg)?,
        Suite::Special => verify::special_functions(seed, a.draws)?,
        Suite::All => {
            let mut all = Vec::new();
            for s in SUITES {
                all.extend(run_suite(s, geom, a, seed)?);
            }
            all
        }
    })
}

fn suite_name(s: Suite) -> String {
    s.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
}

fn summary(suite: Suite, checks: &[Check]) -> Record {
    let failed = checks.iter().filter(|c| !c.pass).count();
    let (ratio, worst) = match verify::worst(checks) {
        Some(w) => (w.residual / w.tolerance, format!("{} at {}", w.check_id, w.inputs)),
        None => (f64::NAN, "no checks".into()),
    };
    let mut r = Record::from_check(Check::new(
        &suite_name(suite),
        "worst residual / tolerance over the suite",
        format!("checks={} failed={failed} worst={worst}", checks.len()),
        ratio,
        1.0,
    ));
    r.pass = failed == 0 && !checks.is_empty();
    r
}

/// Attaches (deviation before, deviation after) to each sweep check.
fn sweep_records(kappas: &[f64]) -> fhtdiag::Result<Vec<Record>> {
    let (checks, rows) = verify::asymptotic_sweep(kappas, &AnnulusConfig::default())?;
    let k = kappas.len();
    let mut out = Vec::new();
    let mut it = checks.into_iter();
    for group in rows.chunks(k) {
        for i in 1..k {
            let pair = [group[i - 1].deviation, group[i].deviation].map(|d| fhtdiag::C64::new(d, 0.0));
            for c in it.by_ref().take(2) {
                out.push(Record::with_value(c, &pair));
            }
        }
    }
    Ok(out)
}

fn execute(cli: &Cli) -> fhtdiag::Result<Vec<Record>> {
    let geom = Geometry::new(cli.bl, cli.br)?;
    let tolerate = |mut checks: Vec<Check>| {
        if let Some(t) = cli.tol {
            for c in &mut checks {
                *c = Check::new(&c.check_id, &c.anchor, std::mem::take(&mut c.inputs), c.residual, t);
            }
        }
        checks
    };
    let records = |checks: Vec<Check>| tolerate(checks).into_iter().map(Record::from_check).collect::<Vec<_>>();
    Ok(match &cli.command {
        Command::Eval { what } => {
            let mut r = eval::evaluate(what, geom)?;
            if let Some(t) = cli.tol {
                r.retolerate(t);
            }
            vec![r]
        }
        Command::Verify(a) => records(run_suite(a.suite, geom, a, cli.seed)?),
        Command::Report(a) => {
            let suites: Vec<Suite> = if a.suite == Suite::All { SUITES.to_vec() } else { vec![a.suite] };
            let mut out = Vec::new();
            for s in suites {
                let r = match run_suite(s, geom, a, cli.seed) {
                    Ok(checks) => summary(s, &tolerate(checks)),
                    Err(e) => {
                        let mut r = Record::from_check(Check::new(&suite_name(s), "suite ran", format!("error: {e}"), f64::NAN, 1.0));
                        r.pass = false;
                        r
                    }
                };
                out.push(r);
            }
            out
        }
        Command::Asymptotics { what } => {
            geom.require_symmetric()?;
            let cfg = AnnulusConfig::default();
            match what {
                AsymptoticsCmd::Sweep(k) => {
                    let mut out = sweep_records(&k.kappa.0)?;
                    if let Some(t) = cli.tol {
                        out.iter_mut().for_each(|r| r.retolerate(t));
                    }
                    out
                }
                AsymptoticsCmd::Annulus(k) => records(verify::annulus(&k.kappa.0, &cfg)?),
                AsymptoticsCmd::Saddle(k) => records(verify::saddle(&k.kappa.0, &cfg)?),
                AsymptoticsCmd::ErrorMatrix(k) => records(verify::error_matrix(&k.kappa.0, &cfg)?),
            }
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("fhtdiag: {e}");
            return ExitCode::FAILURE;
        }
    }
    let records = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("fhtdiag: {e}");
            return ExitCode::FAILURE;
        }
    };
    let mut sink: Box<dyn Write> = match &cli.out {
        Some(p) => match File::create(p) {
            Ok(f) => Box::new(BufWriter::new(f)),
            Err(e) => {
                eprintln!("fhtdiag: {}: {e}", p.display());
                return ExitCode::FAILURE;
            }
        },
        None => Box::new(io::stdout().lock()),
    };
    if let Err(e) = report::write(&records, cli.format, &mut sink).and_then(|_| sink.flush()) {
        eprintln!("fhtdiag: {e}");
        return ExitCode::FAILURE;
    }
    let failed = records.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        eprintln!("fhtdiag: {failed} of {} checks failed", records.len());
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}
