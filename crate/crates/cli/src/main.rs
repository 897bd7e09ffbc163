//! planarcav: form-factor curves, cavity-QED triplets and sweeps for an atom
//! in a leaky planar resonator.

/// `println!` that exits quietly when stdout is a closed pipe.
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        if let Err(e) = writeln!(std::io::stdout().lock(), $($arg)*) {
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                std::process::exit(0);
            }
        }
    }};
}

mod commands;
mod config;
mod error;
mod selftest;
mod svg;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;
use error::{CliError, EXIT_CONFIG, EXIT_OK};

#[derive(Parser)]
#[command(name = "planarcav", version, about = "Cavity-QED parameters of an atom in a leaky planar resonator")]
struct Cli {
    /// Flat key = value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Comma-separated output formats: csv, json, svg.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct SetupArgs {
    /// Cavity length in half-wavelengths N.
    #[arg(long = "n")]
    n: Option<u32>,
    /// Mirror transmission amplitude.
    #[arg(long)]
    tau: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Total, cavity or non-cavity form-factor on a peak-adaptive grid.
    Formfactor {
        #[command(flatten)]
        setup: SetupArgs,
        /// total, cavity-optimal, cavity-hg or noncavity.
        #[arg(long)]
        kind: Option<String>,
        /// Profile of a non-cavity curve: optimal or hg.
        #[arg(long)]
        profile: Option<String>,
        #[arg(long)]
        waist_um: Option<f64>,
        /// Centre of the optimal profile in units of w_c.
        #[arg(long)]
        f_over_wc: Option<f64>,
        /// Lower end of the grid in units of w_c.
        #[arg(long)]
        from: Option<f64>,
        /// Upper end of the grid in units of w_c.
        #[arg(long)]
        to: Option<f64>,
        /// closed or quadrature.
        #[arg(long)]
        method: Option<String>,
    },
    /// (g, kappa, gamma) of one cavity form-factor peak.
    Triplet {
        #[command(flatten)]
        setup: SetupArgs,
        /// optimal or hg.
        #[arg(long)]
        profile: Option<String>,
        #[arg(long)]
        waist_um: Option<f64>,
        #[arg(long)]
        f_over_wc: Option<f64>,
        /// Odd branch of the peak (hg only).
        #[arg(long)]
        peak: Option<u32>,
        /// Frequency of the gamma evaluation in units of w_c.
        #[arg(long)]
        gamma_u: Option<f64>,
    },
    /// Triplets over N (optimal profile) or over the waist (Hermite-Gauss).
    Sweep {
        #[command(flatten)]
        setup: SetupArgs,
        /// n or waist.
        #[arg(long)]
        axis: Option<String>,
        /// Odd N range such as 1..29.
        #[arg(long)]
        odd: Option<String>,
        #[arg(long)]
        from_um: Option<f64>,
        #[arg(long)]
        to_um: Option<f64>,
        /// Number of log-spaced waists.
        #[arg(long)]
        points: Option<usize>,
    },
    /// Lateral profile magnitude on a polar grid.
    Profile {
        #[command(flatten)]
        setup: SetupArgs,
        /// optimal or hg.
        #[arg(long)]
        kind: Option<String>,
        #[arg(long)]
        waist_um: Option<f64>,
        #[arg(long)]
        f_over_wc: Option<f64>,
        /// Largest k c / w_c.
        #[arg(long)]
        k_max: Option<f64>,
        #[arg(long)]
        k_points: Option<usize>,
        #[arg(long)]
        theta_points: Option<usize>,
    },
    /// Invariant and oracle checks.
    Selftest {
        #[command(flatten)]
        setup: SetupArgs,
        /// Perturb closed-form values to exercise the oracle checks.
        #[arg(long, hide = true)]
        tamper_closed_form: bool,
    },
}

enum Action {
    Command(fn(&RunConfig) -> Result<(), CliError>),
    Selftest { tamper: bool },
}

struct Overrides(BTreeMap<String, String>);

impl Overrides {
    fn set<T: ToString>(&mut self, key: &str, v: Option<T>) {
        if let Some(v) = v {
            self.0.insert(key.to_string(), v.to_string());
        }
    }

    fn setup(&mut self, s: SetupArgs) {
        self.set("cavity.n_wavelengths", s.n);
        self.set("cavity.tau", s.tau);
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut o = Overrides(BTreeMap::new());
    o.set("output.dir", cli.out.map(|p| p.display().to_string()));
    o.set("output.format", cli.format);
    o.set("run.threads", cli.threads);
    let action: Action;
    match cli.command {
        Command::Formfactor { setup, kind, profile, waist_um, f_over_wc, from, to, method } => {
            o.setup(setup);
            o.set("formfactor.kind", kind);
            o.set("formfactor.profile", profile);
            o.set("formfactor.waist_um", waist_um);
            o.set("formfactor.f_over_wc", f_over_wc);
            o.set("formfactor.u_from", from);
            o.set("formfactor.u_to", to);
            o.set("formfactor.method", method);
            action = Action::Command(commands::formfactor);
        }
        Command::Triplet { setup, profile, waist_um, f_over_wc, peak, gamma_u } => {
            o.setup(setup);
            o.set("triplet.profile", profile);
            o.set("triplet.waist_um", waist_um);
            o.set("triplet.f_over_wc", f_over_wc);
            o.set("triplet.peak", peak);
            o.set("triplet.gamma_u", gamma_u);
            action = Action::Command(commands::triplet);
        }
        Command::Sweep { setup, axis, odd, from_um, to_um, points } => {
            o.setup(setup);
            o.set("sweep.axis", axis);
            o.set("sweep.odd", odd);
            o.set("sweep.from_um", from_um);
            o.set("sweep.to_um", to_um);
            o.set("sweep.points", points);
            action = Action::Command(commands::sweep);
        }
        Command::Profile { setup, kind, waist_um, f_over_wc, k_max, k_points, theta_points } => {
            o.setup(setup);
            o.set("profile.kind", kind);
            o.set("profile.waist_um", waist_um);
            o.set("profile.f_over_wc", f_over_wc);
            o.set("profile.k_max", k_max);
            o.set("profile.k_points", k_points);
            o.set("profile.theta_points", theta_points);
            action = Action::Command(commands::profile);
        }
        Command::Selftest { setup, tamper_closed_form } => {
            o.setup(setup);
            action = Action::Selftest { tamper: tamper_closed_form };
        }
    }
    let cfg = RunConfig::load(cli.config.as_deref(), o.0)?;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot start {n} threads: {e}")))?;
    }
    match action {
        Action::Command(f) => f(&cfg),
        Action::Selftest { tamper } => selftest::run(&cfg, tamper),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
