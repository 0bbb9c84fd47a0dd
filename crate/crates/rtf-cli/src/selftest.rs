//! End-to-end self-test: one condensed oracle run per module, printed as a
//! pass/fail line each, exiting nonzero on any violation.
//!
//! `RTF_SELFTEST_SCALE=full` enlarges every suite; the default (`quick`) runs
//! in a few seconds. `RTF_SELFTEST_INJECT_FAULT=1` deliberately corrupts one
//! kernel sample inside the first check, which must make the run fail — the
//! mutation probe that proves the harness can actually detect a fault.

use std::path::PathBuf;

use rtf_core::convert::{modal_kernel, ssm_to_tf, tf_to_modal};
use rtf_core::grad::{fd_check, kernel_backward};
use rtf_core::params::{series_expand, Kernel, NumeratorForm};
use rtf_core::rng::SplitMix64;
use rtf_core::spectral::{fft_conv, kernel_generate};
use rtf_core::stability::{jury_stable, montel_project, pole_radii};
use rtf_core::statespace::{companion_realize, recurrent_apply, truncate_params};
use rtf_core::{RtfParams, Signal};

use crate::io;
use crate::train::{self, TrainConfig};

struct Scale {
    systems: usize,
    len: usize,
    polys: usize,
}

fn scale() -> Scale {
    match std::env::var("RTF_SELFTEST_SCALE").as_deref() {
        Ok("full") => Scale { systems: 40, len: 2048, polys: 2000 },
        _ => Scale { systems: 8, len: 256, polys: 200 },
    }
}

fn fault_injection() -> bool {
    std::env::var("RTF_SELFTEST_INJECT_FAULT").map_or(false, |v| v == "1")
}

fn stable_params(seed: u64, n: usize) -> RtfParams {
    let mut rng = SplitMix64::new(seed);
    let raw: Vec<f64> = (0..n + 1).map(|_| rng.uniform(-1.0, 1.0)).collect();
    let a = montel_project(&raw).unwrap();
    let b: Vec<f64> = (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect();
    RtfParams::siso(a, b, rng.uniform(-1.0, 1.0)).unwrap()
}

type Check = (&'static str, fn(&Scale) -> Result<(), String>);

fn kernel_vs_series(s: &Scale) -> Result<(), String> {
    for seed in 0..s.systems as u64 {
        let n = 1 + (seed as usize % 12);
        let p = stable_params(seed, n);
        let truncated = truncate_params(&p, s.len).map_err(|e| e.to_string())?;
        let mut got = kernel_generate(&truncated, s.len).map_err(|e| e.to_string())?;
        if seed == 0 && fault_injection() {
            got.values[0][s.len / 2] += 1e-3;
        }
        let want = series_expand(&p, s.len).map_err(|e| e.to_string())?;
        let scale = want.values[0].iter().fold(1e-12f64, |m, v| m.max(v.abs()));
        for (t, (g, w)) in got.values[0].iter().zip(want.values[0].iter()).enumerate() {
            if (g - w).abs() > 1e-9 * scale {
                return Err(format!("seed {seed} n {n} t {t}: {g} vs {w}"));
            }
        }
    }
    Ok(())
}

fn fft_vs_recurrent(s: &Scale) -> Result<(), String> {
    for seed in 0..s.systems as u64 {
        let n = 1 + (seed as usize % 8);
        let p = stable_params(1000 + seed, n);
        let mut rng = SplitMix64::fork(2000, seed);
        let u = Signal::new(vec![(0..s.len).map(|_| rng.uniform(-1.0, 1.0)).collect()])
            .map_err(|e| e.to_string())?;
        let truncated = truncate_params(&p, s.len).map_err(|e| e.to_string())?;
        let kernel = kernel_generate(&truncated, s.len).map_err(|e| e.to_string())?;
        let y_fft = fft_conv(&u, &kernel).map_err(|e| e.to_string())?;
        let ssm = companion_realize(&p, 0).map_err(|e| e.to_string())?;
        let y_rec = recurrent_apply(&ssm, &u.samples[0]).map_err(|e| e.to_string())?;
        for (t, (g, w)) in y_fft.samples[0].iter().zip(y_rec.iter()).enumerate() {
            if (g - w).abs() > 1e-8 {
                return Err(format!("seed {seed} t {t}: {g} vs {w}"));
            }
        }
    }
    Ok(())
}

fn modal_and_conversions(s: &Scale) -> Result<(), String> {
    for seed in 0..s.systems as u64 {
        let n = 1 + (seed as usize % 6);
        let p = stable_params(3000 + seed, n);
        let ssm = companion_realize(&p, 0).map_err(|e| e.to_string())?.to_dense();
        let back = ssm_to_tf(&ssm).map_err(|e| e.to_string())?;
        for (g, w) in back.a[0].iter().zip(p.a[0].iter()) {
            if (g - w).abs() > 1e-8 {
                return Err(format!("seed {seed}: a {g} vs {w}"));
            }
        }
        let modal = match tf_to_modal(&p, 0) {
            Ok(m) => m,
            // Clustered random poles are legitimately rejected.
            Err(rtf_core::error::RtfError::RepeatedPoles) => continue,
            Err(e) => return Err(e.to_string()),
        };
        let got = modal_kernel(&modal, 128).map_err(|e| e.to_string())?;
        let want = series_expand(&p, 128).map_err(|e| e.to_string())?;
        let scale = want.values[0].iter().fold(1e-9f64, |m, v| m.max(v.abs()));
        for (g, w) in got.values[0].iter().zip(want.values[0].iter()) {
            if (g - w).abs() > 1e-6 * scale {
                return Err(format!("seed {seed}: modal {g} vs {w}"));
            }
        }
    }
    Ok(())
}

fn stability_suite(s: &Scale) -> Result<(), String> {
    let mut rng = SplitMix64::new(77);
    for i in 0..s.polys {
        let n = 1 + i % 8;
        let a: Vec<f64> = (0..n).map(|_| rng.uniform(-1.5, 1.5)).collect();
        let radii = pole_radii(&a).map_err(|e| e.to_string())?;
        let by_roots = radii[0] < 1.0 - 1e-9;
        let clear_of_boundary = (radii[0] - 1.0).abs() > 1e-9;
        if clear_of_boundary && jury_stable(&a) != by_roots {
            return Err(format!("poly {i}: jury {} vs roots {by_roots}", jury_stable(&a)));
        }
        let raw: Vec<f64> = (0..n + 1).map(|_| rng.uniform(-2.0, 2.0)).collect();
        if raw.iter().all(|v| v.abs() < 1e-12) {
            continue;
        }
        let projected = montel_project(&raw).map_err(|e| e.to_string())?;
        if !jury_stable(&projected) {
            return Err(format!("poly {i}: Montel projection left the stable region"));
        }
    }
    if !jury_stable(&[-1.0, 0.9]) {
        return Err("a = [-1, 0.9] must be stable".into());
    }
    if [-1.0f64, 0.9].iter().map(|v| v.abs()).sum::<f64>() <= 1.0 {
        return Err("a = [-1, 0.9] must be Montel-infeasible".into());
    }
    Ok(())
}

fn gradient_checks(s: &Scale) -> Result<(), String> {
    let len = 64;
    for seed in 0..(s.systems as u64).min(16) {
        let n = 1 + (seed as usize % 4);
        let p = stable_params(5000 + seed, n)
            .with_form(NumeratorForm::Truncated, Some(len))
            .map_err(|e| e.to_string())?;
        let mut rng = SplitMix64::fork(6000, seed);
        let g: Vec<f64> = (0..len).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let grad_h = Kernel::new(vec![g.clone()]).map_err(|e| e.to_string())?;
        let grads = kernel_backward(&p, &grad_h, len).map_err(|e| e.to_string())?;
        let point: Vec<f64> = p.a[0].iter().chain(p.b[0].iter()).copied().collect();
        let analytic: Vec<f64> =
            grads.grad_a[0].iter().chain(grads.grad_b[0].iter()).copied().collect();
        let g_ref = g.clone();
        let p_ref = p.clone();
        let err = fd_check(
            move |x| {
                let params = RtfParams::new(
                    vec![x[..n].to_vec()],
                    vec![x[n..].to_vec()],
                    p_ref.h0.clone(),
                    p_ref.numerator_form(),
                    p_ref.trained_length(),
                )?;
                let k = kernel_generate(&params, len)?;
                Ok(k.values[0].iter().zip(g_ref.iter()).map(|(a, b)| a * b).sum())
            },
            &point,
            &analytic,
            1e-6,
        )
        .map_err(|e| e.to_string())?;
        if err > 1e-5 {
            return Err(format!("seed {seed}: fd error {err}"));
        }
    }
    Ok(())
}

fn training_sanity(_s: &Scale) -> Result<(), String> {
    let config = TrainConfig {
        state_size: 8,
        channels: 1,
        seq_len: 64,
        delay: 4,
        band_fraction: 0.5,
        learning_rate: 1e-2,
        steps: 150,
        batch_size: 1,
        seed: 7,
        montel_projection: false,
    };
    let report = train::train_delay(&config).map_err(|e| e.to_string())?;
    let initial = report.loss_trace[0].sqrt();
    if report.final_rmse >= initial {
        return Err(format!("rmse {} did not improve on {initial}", report.final_rmse));
    }
    Ok(())
}

fn serialization_round_trips(_s: &Scale) -> Result<(), String> {
    let dir = std::env::temp_dir().join("rtf-selftest");
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let p = stable_params(9, 3);
    let path: PathBuf = dir.join("params.json");
    io::save_params(&path, &p).map_err(|e| e.to_string())?;
    let loaded = io::load_params(&path).map_err(|e| e.to_string())?;
    if loaded.a != p.a || loaded.b != p.b || loaded.h0 != p.h0 {
        return Err("params round trip mismatch".into());
    }
    let mut rng = SplitMix64::new(10);
    let s = Signal::new(vec![(0..32).map(|_| rng.normal()).collect()])
        .map_err(|e| e.to_string())?;
    let path = dir.join("signal.csv");
    io::save_signal(&path, &s).map_err(|e| e.to_string())?;
    let loaded = io::load_signal(&path).map_err(|e| e.to_string())?;
    if loaded.samples != s.samples {
        return Err("signal round trip mismatch".into());
    }
    Ok(())
}

/// Runs every check, printing one line each; returns the process exit code.
pub fn run() -> i32 {
    let s = scale();
    let checks: &[Check] = &[
        ("kernel generation vs series oracle", kernel_vs_series),
        ("fft apply vs recurrent apply", fft_vs_recurrent),
        ("conversions and modal kernel", modal_and_conversions),
        ("stability suite", stability_suite),
        ("gradient finite-difference checks", gradient_checks),
        ("delay-task training sanity", training_sanity),
        ("serialization round trips", serialization_round_trips),
    ];
    let mut failures = 0;
    for (name, check) in checks {
        match check(&s) {
            Ok(()) => println!("ok   - {name}"),
            Err(msg) => {
                println!("FAIL - {name}: {msg}");
                failures += 1;
            }
        }
    }
    if failures == 0 {
        println!("selftest: all {} checks passed", checks.len());
        0
    } else {
        println!("selftest: {failures} check(s) failed");
        1
    }
}
