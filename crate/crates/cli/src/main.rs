//! `tracecone`: geometry of the positive cone of a finite trace algebra on
//! the command line: distances, geodesics, enclosing balls, group
//! unitarization with verifiable certificates, instance synthesis, and
//! seeded property fuzzing.

use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;
use tracecone::Method;
use tracecone_cli::{commands, CliError};

#[derive(Parser)]
#[command(
    name = "tracecone",
    version,
    about = "Trace-metric geometry of positive cones: distances, geodesics, \
             circumcenters, and group unitarization",
    after_help = "Exit codes: 0 pass, 1 internal error, 2 invalid input, \
                  3 unbounded or order-exceeded, 4 property failure.\n\
                  TRACECONE_THREADS overrides parallelism width (0 = auto)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    /// Circumcenter of the orbit of the identity (minimax center).
    Circumcenter,
    /// Karcher mean of the orbit (least-squares center, cross-check).
    Karcher,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Circumcenter => Method::Circumcenter,
            MethodArg::Karcher => Method::Karcher,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the trace-metric distance between two named positive elements.
    Distance {
        /// Instance file.
        instance: PathBuf,
        /// Name of the first element.
        a: String,
        /// Name of the second element.
        b: String,
        /// Optional report file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the geodesic between two named positive elements at time t.
    Geodesic {
        /// Instance file.
        instance: PathBuf,
        /// Name of the start element.
        a: String,
        /// Name of the end element.
        b: String,
        /// Geodesic parameter (0 = a, 1 = b; values outside [0,1] extend).
        #[arg(long, default_value_t = 0.5)]
        t: f64,
        /// Optional report file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minimum enclosing ball of the elements tagged role "point".
    Circumcenter {
        /// Instance file.
        instance: PathBuf,
        /// Convergence tolerance (0 selects the built-in default 1e-8).
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Iteration budget (0 selects 50·n+1000).
        #[arg(long, default_value_t = 0)]
        max_iter: usize,
        /// Optional report file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Unitarize the group generated by the elements tagged role
    /// "generator"; exit 0 iff the certificate verifies at --tol.
    Unitarize {
        /// Instance file.
        instance: PathBuf,
        /// Verification tolerance on the recomputed residuals.
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        /// Center-solver iteration budget (0 = solver default).
        #[arg(long, default_value_t = 0)]
        max_iter: usize,
        /// Group closure element cap.
        #[arg(long, default_value_t = 10_000)]
        max_order: usize,
        /// Center method.
        #[arg(long, value_enum, default_value_t = MethodArg::Circumcenter)]
        method: MethodArg,
        /// Optional report file carrying the certificate.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Synthesize an instance: a disguised finite unitary group with a
    /// hidden conjugator, recorded in a .truth.json sidecar.
    Synth {
        /// Block structure: `dim` or `dim:weight`, comma-separated
        /// (e.g. `2`, `2,3`, `2:0.4,3:0.6`).
        #[arg(long)]
        blocks: String,
        /// Group family: cyclic-k, dihedral-k, perm-k,
        /// random-unitary-order-n.
        #[arg(long)]
        group: String,
        /// Conjugator difficulty: singular values log-uniform in
        /// [1/cond, cond]; 1 publishes the unitary generators unchanged.
        #[arg(long, default_value_t = 1.0)]
        cond: f64,
        /// Random seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Instance file to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run seeded property suites; exit 0 iff every check passes.
    Fuzz {
        /// Suite: metric, band, hull, circumcenter, unitarize, or all.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Trials per suite.
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Base seed; trial i uses seed + i.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Optional report file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn configure_threads() -> Result<(), CliError> {
    match std::env::var("TRACECONE_THREADS") {
        Err(_) => Ok(()),
        Ok(text) => {
            let n: usize = text.trim().parse().map_err(|_| {
                CliError::input(format!(
                    "invalid TRACECONE_THREADS {text:?}: expected an integer"
                ))
            })?;
            if n == 0 {
                return Ok(()); // 0 = auto: keep the default pool.
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::internal(format!("thread pool setup failed: {e}")))
        }
    }
}

fn run() -> Result<i32, CliError> {
    configure_threads()?;
    let cli = Cli::parse();
    match cli.command {
        Command::Distance {
            instance,
            a,
            b,
            out,
        } => commands::cmd_distance(&instance, &a, &b, out.as_deref()),
        Command::Geodesic {
            instance,
            a,
            b,
            t,
            out,
        } => commands::cmd_geodesic(&instance, &a, &b, t, out.as_deref()),
        Command::Circumcenter {
            instance,
            tol,
            max_iter,
            out,
        } => commands::cmd_circumcenter(&instance, tol, max_iter, out.as_deref()),
        Command::Unitarize {
            instance,
            tol,
            max_iter,
            max_order,
            method,
            out,
        } => commands::cmd_unitarize(
            &instance,
            tol,
            max_iter,
            max_order,
            method.into(),
            out.as_deref(),
        ),
        Command::Synth {
            blocks,
            group,
            cond,
            seed,
            out,
        } => commands::cmd_synth(&blocks, &group, cond, seed, &out),
        Command::Fuzz {
            suite,
            trials,
            seed,
            out,
        } => commands::cmd_fuzz(&suite, trials, seed, out.as_deref()),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code.clamp(0, 255) as u8),
        Err(err) => {
            eprintln!("tracecone: {}", err.message);
            ExitCode::from(err.exit_code.clamp(0, 255) as u8)
        }
    }
}
