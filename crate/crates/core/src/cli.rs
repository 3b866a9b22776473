//! Command-line front end: `synthesize`, `characterize`, `analyze`, `verify`.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::analysis::svd_channel;
use crate::characterization::characterize;
use crate::error::{Error, Result};
use crate::io::{analyze_channel, write_matrix_figures, ChannelFile, ExperimentConfig, Tolerances};
use crate::linalg::{max_abs_diff, subspace_overlap};
use crate::symplectic::{physicality_margin, GaussianChannel};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;

/// Environment variable that fixes the worker thread count. Results do not
/// depend on it.
pub const THREADS_ENV: &str = "CVCHANNEL_THREADS";

/// Margin below which a reconstruction is reported unphysical.
pub const MARGIN_TOL: f64 = -1e-8;

#[derive(Debug, Parser)]
#[command(
    name = "cvchannel",
    version,
    about = "Gaussian channel synthesis and characterization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the configured channel and write it as `channel.json`.
    Synthesize {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate the probe protocol and write `truth.json` and `result.json`.
    Characterize {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Shots per quadrature (mean stage) and per setting (vacuum stage).
        #[arg(long)]
        shots: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        emit_figures: bool,
    },
    /// Decompose a channel file and write `analysis.json` plus CSV tables.
    Analyze {
        channel: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Zero-based modes to partially transpose, comma separated. Repeatable.
        #[arg(long)]
        partition: Vec<String>,
    },
    /// Compare a reconstruction against ground truth.
    Verify {
        result: PathBuf,
        truth: PathBuf,
        #[arg(long)]
        amp_tol: Option<f64>,
        #[arg(long)]
        noise_tol: Option<f64>,
    },
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_INPUT_ERROR
            } else {
                EXIT_OK
            };
        }
    };
    configure_threads();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT_ERROR
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        // fails only if a pool already exists, which is harmless
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

fn out_dir(flag: Option<PathBuf>, cfg: Option<&ExperimentConfig>) -> PathBuf {
    flag.or_else(|| cfg.and_then(|c| c.outputs.dir.clone()))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn config_dir(path: &Path) -> &Path {
    path.parent().unwrap_or(Path::new("."))
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Synthesize { config, out } => {
            let cfg = ExperimentConfig::read(&config)?;
            let ch = cfg.channel.build(config_dir(&config))?;
            let path = out_dir(out, Some(&cfg)).join("channel.json");
            ChannelFile::from_channel(&ch).write(&path)?;
            if ch.margin() < 0.0 {
                eprintln!(
                    "warning: channel is unphysical (margin {:.3e})",
                    ch.margin()
                );
            }
            println!(
                "wrote {} ({} modes, margin {:.3e})",
                path.display(),
                ch.modes(),
                ch.margin()
            );
            Ok(EXIT_OK)
        }
        Command::Characterize {
            config,
            seed,
            shots,
            out,
            emit_figures,
        } => {
            let mut cfg = ExperimentConfig::read(&config)?;
            if let Some(s) = seed {
                cfg.protocol.seed = s;
            }
            if let Some(n) = shots {
                cfg.protocol.shots_mean_stage = n;
                cfg.protocol.shots_vacuum_stage = n;
            }
            cfg.protocol.validate()?;
            let truth = cfg.channel.build(config_dir(&config))?;
            let opts = cfg.protocol.options();
            let res = characterize(&truth, &opts)?;
            let dir = out_dir(out, Some(&cfg));
            ChannelFile::from_channel(&truth).write(&dir.join("truth.json"))?;
            ChannelFile::from_result(&res, &opts)?.write(&dir.join("result.json"))?;
            if emit_figures || cfg.outputs.emit_figures {
                let fig = dir.join("figures");
                write_matrix_figures(&truth, &fig, "truth_")?;
                write_matrix_figures(&res.channel()?, &fig, "result_")?;
            }
            println!(
                "modes {}  iterations {}  converged {}  loglik {:.6}  margin {:.3e}",
                truth.modes(),
                res.iterations,
                res.converged,
                res.loglik,
                res.margin
            );
            println!(
                "max |A_hat - A| {:.3e}  max |N_hat - N| {:.3e}",
                max_abs_diff(&res.amp_hat, truth.amp()),
                max_abs_diff(&res.noise_hat, truth.noise())
            );
            Ok(if res.converged {
                EXIT_OK
            } else {
                EXIT_NOT_CONVERGED
            })
        }
        Command::Analyze {
            channel,
            out,
            partition,
        } => {
            let ch = ChannelFile::read(&channel)?.to_channel()?;
            let partitions = partition
                .iter()
                .map(|p| parse_modes(p, ch.modes()))
                .collect::<Result<Vec<_>>>()?;
            let dir = out_dir(out, None);
            let (report, written) = analyze_channel(&ch, &partitions, &dir)?;
            println!("margin {:.3e}", report.margin);
            println!("singular values {:?}", report.singular_values);
            for p in &report.pair_ppt {
                println!("pair {:?}  ppt {:.6}", p.modes, p.ppt_min_eigenvalue);
            }
            for p in &report.partitions {
                println!(
                    "transposed {:?}  ppt {:.6}",
                    p.transposed, p.ppt_min_eigenvalue
                );
            }
            println!("wrote {} files to {}", written.len(), dir.display());
            Ok(EXIT_OK)
        }
        Command::Verify {
            result,
            truth,
            amp_tol,
            noise_tol,
        } => {
            let res = ChannelFile::read(&result)?.to_channel()?;
            let truth = ChannelFile::read(&truth)?.to_channel()?;
            let defaults = Tolerances::default();
            let tol = Tolerances {
                amp: amp_tol.unwrap_or(defaults.amp),
                noise: noise_tol.unwrap_or(defaults.noise),
            };
            let report = verify(&res, &truth, &tol)?;
            println!("{report}");
            Ok(if report.passed() {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            })
        }
    }
}

fn parse_modes(spec: &str, modes: usize) -> Result<Vec<usize>> {
    spec.split(',')
        .map(|s| {
            let m: usize = s
                .trim()
                .parse()
                .map_err(|_| Error::InvalidPartition(format!("'{s}' is not a mode index")))?;
            if m >= modes {
                return Err(Error::InvalidPartition(format!(
                    "mode {m} out of range for {modes} modes"
                )));
            }
            Ok(m)
        })
        .collect()
}

/// Outcome of comparing a reconstruction with ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub amp_error: f64,
    pub noise_error: f64,
    pub margin: f64,
    pub truth_margin: f64,
    pub tolerances: Tolerances,
    /// Per singular value: `(d_m, d̂_m, overlap)` where the overlap is the
    /// squared projection of the result's output eigenquadrature onto the
    /// truth's eigenspace for `d_m`.
    pub overlaps: Vec<(f64, f64, f64)>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.amp_error <= self.tolerances.amp
            && self.noise_error <= self.tolerances.noise
            && self.margin >= MARGIN_TOL
    }
}

impl std::fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mark = |ok: bool| if ok { "PASS" } else { "FAIL" };
        writeln!(
            f,
            "{} amp   max abs error {:.3e} (tol {})",
            mark(self.amp_error <= self.tolerances.amp),
            self.amp_error,
            self.tolerances.amp
        )?;
        writeln!(
            f,
            "{} noise max abs error {:.3e} (tol {})",
            mark(self.noise_error <= self.tolerances.noise),
            self.noise_error,
            self.tolerances.noise
        )?;
        writeln!(
            f,
            "{} physicality margin {:.3e} (tol {MARGIN_TOL:e}), truth margin {:.3e}",
            mark(self.margin >= MARGIN_TOL),
            self.margin,
            self.truth_margin
        )?;
        write!(f, "   m  d_truth   d_result  overlap")?;
        for (m, (d, d_hat, o)) in self.overlaps.iter().enumerate() {
            write!(f, "\n{:>4}  {d:.6}  {d_hat:.6}  {o:.6}", m + 1)?;
        }
        Ok(())
    }
}

pub fn verify(
    result: &GaussianChannel,
    truth: &GaussianChannel,
    tol: &Tolerances,
) -> Result<VerifyReport> {
    if result.modes() != truth.modes() {
        return Err(Error::dim(format!(
            "result has {} modes, truth has {}",
            result.modes(),
            truth.modes()
        )));
    }
    let t = svd_channel(truth.amp())?;
    let r = svd_channel(result.amp())?;
    let blocks = t.degenerate_blocks(1e-8);
    let overlaps = blocks
        .iter()
        .flat_map(|b| b.clone().map(move |m| (m, b.clone())))
        .map(|(m, b)| {
            let basis = t.u.columns(b.start, b.len()).into_owned();
            (
                t.d[m],
                r.d[m],
                subspace_overlap(&r.output_eigenquadrature(m), &basis),
            )
        })
        .collect();
    Ok(VerifyReport {
        amp_error: max_abs_diff(result.amp(), truth.amp()),
        noise_error: max_abs_diff(result.noise(), truth.noise()),
        margin: physicality_margin(result),
        truth_margin: physicality_margin(truth),
        tolerances: *tol,
        overlaps,
    })
}
