//! Command-line surface. `dispatch` is exposed so the commands can be driven
//! in-process (the acceptance suite checks exit codes without spawning).
//!
//! Exit codes: 0 success, 1 domain error (bad data, unstable math, file
//! contents), 2 usage error (bad flags or arguments).

use std::fmt;
use std::fs;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use rtf_core::params::NumeratorForm;
use rtf_core::spectral::{fft_conv, kernel_generate};
use rtf_core::stability::stability_report;
use rtf_core::statespace::{
    companion_realize, correct_params, recurrent_apply, truncate_params,
};
use rtf_core::{RtfParams, Signal};

use crate::bench;
use crate::io::{self, IoError};
use crate::selftest;
use crate::train;

#[derive(Parser)]
#[command(
    name = "rtf",
    about = "Rational transfer function filters: state-free kernels, recurrences, conversions, training, and benchmarks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ApplyMode {
    /// State-free: generate the kernel with FFTs and convolve.
    Fft,
    /// O(n)-per-step companion recurrence.
    Recurrent,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConvertKind {
    /// Dense state space to transfer function coefficients.
    Ssm2tf,
    /// Transfer function to its companion-form dense realization.
    Tf2ssm,
    /// Transfer function to first-order (modal) form.
    Tf2modal,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a length-L kernel and write it as CSV.
    Kernel {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        len: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Filter a signal, either state-free or recurrently.
    Apply {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        mode: ApplyMode,
        #[arg(long)]
        out: PathBuf,
    },
    /// Convert between representations.
    Convert {
        #[arg(value_enum)]
        kind: ConvertKind,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the stability report of every denominator row as JSON.
    Check {
        #[arg(long)]
        params: PathBuf,
    },
    /// Switch numerator form: corrected params are truncated at --len,
    /// truncated params are corrected (--len must match their length).
    Correct {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        len: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train the delay task from a JSON config.
    TrainDelay {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Optional CSV destination for the per-step loss trace.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Fit parameters to a target kernel (CSV, same layout as signals).
    Distill {
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        state_size: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 5000)]
        iterations: usize,
        #[arg(long, default_value_t = 2e-2)]
        lr: f64,
    },
    /// Time every method over a grid and write CSV rows.
    Bench {
        /// Comma-separated sequence lengths.
        #[arg(long, value_delimiter = ',')]
        lens: Vec<usize>,
        /// Comma-separated state sizes.
        #[arg(long, value_delimiter = ',')]
        states: Vec<usize>,
        #[arg(long, default_value_t = bench::DEFAULT_REPEATS)]
        repeats: usize,
        #[arg(long, default_value_t = 1)]
        channels: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the condensed oracle suite of every module.
    Selftest,
}

/// Anything a subcommand can fail with after successful argument parsing.
#[derive(Debug)]
enum CmdError {
    Io(IoError),
    Core(rtf_core::error::RtfError),
    Invalid(String),
}

impl fmt::Display for CmdError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CmdError::Io(e) => write!(f, "{e}"),
            CmdError::Core(e) => write!(f, "{e}"),
            CmdError::Invalid(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<IoError> for CmdError {
    fn from(e: IoError) -> Self {
        CmdError::Io(e)
    }
}

impl From<rtf_core::error::RtfError> for CmdError {
    fn from(e: rtf_core::error::RtfError) -> Self {
        CmdError::Core(e)
    }
}

/// Parses argv and runs the selected subcommand; returns the exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn run(command: Command) -> Result<(), CmdError> {
    match command {
        Command::Kernel { params, len, out } => {
            let p = io::load_params(&params)?;
            let kernel = kernel_generate(&p, len)?;
            fs::write(&out, io::signal_to_csv(&kernel.values)).map_err(IoError::Io)?;
            Ok(())
        }
        Command::Apply { params, input, mode, out } => {
            let p = io::load_params(&params)?;
            let u = io::load_signal(&input)?;
            if u.channels() != p.channels() {
                return Err(CmdError::Invalid(format!(
                    "signal has {} channels, params have {}",
                    u.channels(),
                    p.channels()
                )));
            }
            let y = match mode {
                ApplyMode::Fft => apply_fft(&p, &u)?,
                ApplyMode::Recurrent => apply_recurrent(&p, &u)?,
            };
            io::save_signal(&out, &y)?;
            Ok(())
        }
        Command::Convert { kind, input, out } => match kind {
            ConvertKind::Ssm2tf => {
                let ssm = io::load_ssm(&input)?;
                let p = rtf_core::convert::ssm_to_tf(&ssm)?;
                io::save_params(&out, &p)?;
                Ok(())
            }
            ConvertKind::Tf2ssm => {
                let p = single_channel(io::load_params(&input)?)?;
                let ssm = companion_realize(&p, 0)?.to_dense();
                io::save_ssm(&out, &ssm)?;
                Ok(())
            }
            ConvertKind::Tf2modal => {
                let p = single_channel(io::load_params(&input)?)?;
                let modal = rtf_core::convert::tf_to_modal(&p, 0)?;
                io::save_modal(&out, &modal)?;
                Ok(())
            }
        },
        Command::Check { params } => {
            let p = io::load_params(&params)?;
            let mut rows = Vec::new();
            for a in &p.a {
                let report = stability_report(a)?;
                rows.push(serde_json::json!({
                    "jury_stable": report.jury_stable,
                    "pole_radii": report.pole_radii,
                    "montel_margin": report.montel_margin,
                }));
            }
            let doc = serde_json::json!({ "rows": rows });
            println!("{}", serde_json::to_string_pretty(&doc).expect("static schema"));
            Ok(())
        }
        Command::Correct { params, len, out } => {
            let p = io::load_params(&params)?;
            let converted = match p.numerator_form() {
                NumeratorForm::Corrected => truncate_params(&p, len)?,
                NumeratorForm::Truncated => {
                    let trained = p.trained_length().expect("validated at load");
                    if trained != len {
                        return Err(CmdError::Invalid(format!(
                            "--len {len} does not match trained_length {trained}"
                        )));
                    }
                    correct_params(&p)?
                }
            };
            io::save_params(&out, &converted)?;
            Ok(())
        }
        Command::TrainDelay { config, out, trace } => {
            let text = fs::read_to_string(&config).map_err(IoError::Io)?;
            let cfg: train::TrainConfig = serde_json::from_str(&text)
                .map_err(|e| IoError::SchemaError(e.to_string()))?;
            let report = train::train_delay(&cfg)?;
            io::save_params(&out, &report.params)?;
            if let Some(path) = trace {
                let mut csv = String::from("step,loss\n");
                for (step, loss) in report.loss_trace.iter().enumerate() {
                    csv.push_str(&format!("{step},{loss}\n"));
                }
                fs::write(&path, csv).map_err(IoError::Io)?;
            }
            println!(
                "final_rmse {} wall_seconds {}",
                report.final_rmse, report.wall_seconds
            );
            Ok(())
        }
        Command::Distill { target, state_size, out, iterations, lr } => {
            let signal = io::load_signal(&target)?;
            let kernel = rtf_core::params::Kernel::new(signal.samples)?;
            let (params, mse) = train::distill(&kernel, state_size, iterations, lr)?;
            io::save_params(&out, &params)?;
            println!("final_mse {mse}");
            Ok(())
        }
        Command::Bench { lens, states, repeats, channels, out } => {
            if lens.is_empty() || states.is_empty() || repeats < 3 || channels == 0 {
                return Err(CmdError::Invalid(
                    "bench needs nonempty --lens/--states, --repeats >= 3, --channels >= 1"
                        .into(),
                ));
            }
            let rows = bench::run_bench(&lens, &states, channels, repeats)?;
            fs::write(&out, bench::rows_to_csv(&rows)).map_err(IoError::Io)?;
            Ok(())
        }
        Command::Selftest => {
            if selftest::run() == 0 {
                Ok(())
            } else {
                Err(CmdError::Invalid("selftest failed".into()))
            }
        }
    }
}

fn single_channel(p: RtfParams) -> Result<RtfParams, CmdError> {
    if p.channels() != 1 {
        return Err(CmdError::Invalid(
            "this conversion expects single-channel parameters".into(),
        ));
    }
    Ok(p)
}

/// State-free apply. Corrected-form parameters are first truncated at the
/// input length so the kernel is exact (not aliased) over the window and the
/// two modes agree to roundoff.
fn apply_fft(p: &RtfParams, u: &Signal) -> Result<Signal, CmdError> {
    let exact = match p.numerator_form() {
        NumeratorForm::Corrected => truncate_params(p, u.length)?,
        NumeratorForm::Truncated => p.clone(),
    };
    let kernel = kernel_generate(&exact, u.length)?;
    Ok(fft_conv(u, &kernel)?)
}

/// Recurrent apply; truncated-form parameters are corrected first, since the
/// recurrence realizes the true infinite-response system.
fn apply_recurrent(p: &RtfParams, u: &Signal) -> Result<Signal, CmdError> {
    let corrected = match p.numerator_form() {
        NumeratorForm::Corrected => p.clone(),
        NumeratorForm::Truncated => correct_params(p)?,
    };
    let mut samples = Vec::with_capacity(u.channels());
    for c in 0..u.channels() {
        let ssm = companion_realize(&corrected, c)?;
        samples.push(recurrent_apply(&ssm, &u.samples[c])?);
    }
    Ok(Signal::new(samples)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rtf_core::stability::{initialize, InitScheme};

    fn tmp(name: &str) -> PathBuf {
        let dir = std::env::temp_dir().join("rtf-cli-tests");
        fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    fn args(parts: &[&str]) -> Vec<String> {
        std::iter::once("rtf").chain(parts.iter().copied()).map(String::from).collect()
    }

    #[test]
    fn kernel_of_zero_init_is_identity_impulse() {
        let p = initialize(InitScheme::Zero, 2, 1, 1).unwrap();
        let params_path = tmp("zero.json");
        io::save_params(&params_path, &p).unwrap();
        let out = tmp("zero-kernel.csv");
        let code = dispatch(args(&[
            "kernel",
            "--params",
            params_path.to_str().unwrap(),
            "--len",
            "8",
            "--out",
            out.to_str().unwrap(),
        ]));
        assert_eq!(code, 0);
        let text = fs::read_to_string(&out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,c0"));
        assert_eq!(lines.next(), Some("0,1"));
        for (t, line) in lines.enumerate() {
            assert_eq!(line, format!("{},0", t + 1));
        }
    }

    #[test]
    fn unknown_subcommand_is_usage_error() {
        assert_eq!(dispatch(args(&["frobnicate"])), 2);
    }

    #[test]
    fn help_exits_zero() {
        assert_eq!(dispatch(args(&["--help"])), 0);
    }

    #[test]
    fn missing_file_is_domain_error() {
        assert_eq!(
            dispatch(args(&["check", "--params", "/nonexistent/params.json"])),
            1
        );
    }

    #[test]
    fn check_reports_instability_with_exit_zero() {
        let p = RtfParams::siso(vec![-1.0, 1.1], vec![1.0, 0.0], 0.0).unwrap();
        let path = tmp("unstable.json");
        io::save_params(&path, &p).unwrap();
        // A report, not a failure: exit code must be 0.
        assert_eq!(dispatch(args(&["check", "--params", path.to_str().unwrap()])), 0);
        let report = stability_report(&p.a[0]).unwrap();
        assert!(!report.jury_stable);
        assert!(report.pole_radii[0] > 1.0);
    }

    #[test]
    fn correct_round_trips_through_truncated_form() {
        let p = RtfParams::siso(vec![0.4, -0.1], vec![1.0, 0.5], 0.25).unwrap();
        let corrected_path = tmp("c.json");
        let truncated_path = tmp("t.json");
        let back_path = tmp("back.json");
        io::save_params(&corrected_path, &p).unwrap();
        assert_eq!(
            dispatch(args(&[
                "correct",
                "--params",
                corrected_path.to_str().unwrap(),
                "--len",
                "64",
                "--out",
                truncated_path.to_str().unwrap(),
            ])),
            0
        );
        let t = io::load_params(&truncated_path).unwrap();
        assert_eq!(t.numerator_form(), NumeratorForm::Truncated);
        assert_eq!(t.trained_length(), Some(64));
        assert_eq!(
            dispatch(args(&[
                "correct",
                "--params",
                truncated_path.to_str().unwrap(),
                "--len",
                "64",
                "--out",
                back_path.to_str().unwrap(),
            ])),
            0
        );
        let back = io::load_params(&back_path).unwrap();
        for (g, w) in back.b[0].iter().zip(p.b[0].iter()) {
            assert!((g - w).abs() < 1e-12);
        }
    }

    #[test]
    fn apply_modes_agree() {
        let p = RtfParams::siso(vec![0.3, -0.2], vec![0.8, -0.4], 0.5).unwrap();
        let params_path = tmp("apply.json");
        io::save_params(&params_path, &p).unwrap();
        let mut rng = rtf_core::rng::SplitMix64::new(21);
        let u = Signal::new(vec![(0..128).map(|_| rng.uniform(-1.0, 1.0)).collect()]).unwrap();
        let input_path = tmp("apply-in.csv");
        io::save_signal(&input_path, &u).unwrap();
        let fft_out = tmp("apply-fft.csv");
        let rec_out = tmp("apply-rec.csv");
        for (mode, out) in [("fft", &fft_out), ("recurrent", &rec_out)] {
            assert_eq!(
                dispatch(args(&[
                    "apply",
                    "--params",
                    params_path.to_str().unwrap(),
                    "--input",
                    input_path.to_str().unwrap(),
                    "--mode",
                    mode,
                    "--out",
                    out.to_str().unwrap(),
                ])),
                0
            );
        }
        let y_fft = io::load_signal(&fft_out).unwrap();
        let y_rec = io::load_signal(&rec_out).unwrap();
        for (g, w) in y_fft.samples[0].iter().zip(y_rec.samples[0].iter()) {
            assert!((g - w).abs() < 1e-8, "{g} vs {w}");
        }
    }

    #[test]
    fn convert_chain_preserves_coefficients() {
        let p = RtfParams::siso(vec![0.2, -0.15], vec![1.0, -0.5], 0.1).unwrap();
        let tf_path = tmp("conv-tf.json");
        let ssm_path = tmp("conv-ssm.json");
        let back_path = tmp("conv-back.json");
        io::save_params(&tf_path, &p).unwrap();
        assert_eq!(
            dispatch(args(&[
                "convert",
                "tf2ssm",
                "--in",
                tf_path.to_str().unwrap(),
                "--out",
                ssm_path.to_str().unwrap(),
            ])),
            0
        );
        assert_eq!(
            dispatch(args(&[
                "convert",
                "ssm2tf",
                "--in",
                ssm_path.to_str().unwrap(),
                "--out",
                back_path.to_str().unwrap(),
            ])),
            0
        );
        let back = io::load_params(&back_path).unwrap();
        for (g, w) in back.a[0].iter().zip(p.a[0].iter()) {
            assert!((g - w).abs() < 1e-10);
        }
        for (g, w) in back.b[0].iter().zip(p.b[0].iter()) {
            assert!((g - w).abs() < 1e-10);
        }
        let modal_path = tmp("conv-modal.json");
        assert_eq!(
            dispatch(args(&[
                "convert",
                "tf2modal",
                "--in",
                tf_path.to_str().unwrap(),
                "--out",
                modal_path.to_str().unwrap(),
            ])),
            0
        );
        let modal = io::load_modal(&modal_path).unwrap();
        assert_eq!(modal.state_size(), 2);
    }
}
