//! End-to-end smoke coverage of every subcommand and backend through the
//! compiled binary: each run must exit 0 and emit an envelope whose payload
//! kind and headline numbers are sane. Tolerance-grade numerics live in the
//! core acceptance suite; this file guards the plumbing.

use std::process::Command;

use ptcubic::envelope::{Payload, ResultEnvelope};

const BIN: &str = env!("CARGO_BIN_EXE_ptcubic");

fn run_json(args: &[&str]) -> ResultEnvelope {
    let output = Command::new(BIN).args(args).output().expect("binary launches");
    assert_eq!(
        output.status.code(),
        Some(0),
        "args {args:?}\nstderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("stdout parses as an envelope")
}

#[test]
fn spectrum_with_the_basis_backend() {
    let envelope = run_json(&["spectrum", "--m2", "1", "--f", "1", "--levels", "3", "--n-basis", "128"]);
    match envelope.payload {
        Payload::Spectrum(result) => {
            assert_eq!(result.converged_count, 3);
            assert!((result.eigenvalues[0].re - 1.2917541619740423).abs() < 1e-9);
        }
        other => panic!("wrong payload: {other:?}"),
    }
}

#[test]
fn spectrum_with_the_shooting_backend() {
    let envelope = run_json(&[
        "spectrum", "--m2", "1", "--f", "1", "--levels", "2", "--backend", "shooting",
    ]);
    match envelope.payload {
        Payload::Spectrum(result) => {
            assert!(result.converged_count >= 2);
            assert!((result.eigenvalues[0].re - 1.2917541619740423).abs() < 1e-7);
            assert!((result.eigenvalues[1].re - 4.368958079847683).abs() < 1e-7);
        }
        other => panic!("wrong payload: {other:?}"),
    }
}

#[test]
fn spectrum_with_both_backends_cross_validates() {
    let envelope = run_json(&[
        "spectrum", "--m2", "-1", "--f", "1", "--levels", "2", "--backend", "both",
        "--n-basis", "128",
    ]);
    match envelope.payload {
        Payload::Spectrum(result) => {
            assert_eq!(result.converged_count, 2);
            assert!((result.eigenvalues[0].re - 1.439902310122191).abs() < 1e-8);
        }
        other => panic!("wrong payload: {other:?}"),
    }
}

#[test]
fn duality_reports_the_band_shift() {
    let envelope = run_json(&[
        "duality", "--m2", "1", "--f", "1", "--levels", "3", "--n-basis", "128",
    ]);
    match envelope.payload {
        Payload::Duality(report) => {
            assert!(report.verdict);
            assert_eq!(report.predicted_delta.to_bits(), (4.0f64 / 27.0).to_bits());
            assert_eq!(report.per_level.len(), 3);
        }
        other => panic!("wrong payload: {other:?}"),
    }
}

#[test]
fn duality_with_the_shooting_backend_agrees() {
    let envelope = run_json(&[
        "duality", "--m2", "1", "--f", "1", "--levels", "2", "--backend", "shooting",
    ]);
    match envelope.payload {
        Payload::Duality(report) => {
            assert!(report.verdict, "max_abs_error = {:.3e}", report.max_abs_error);
            assert_eq!(report.predicted_delta.to_bits(), (4.0f64 / 27.0).to_bits());
        }
        other => panic!("wrong payload: {other:?}"),
    }
}

#[test]
fn series_matches_the_documented_example() {
    let envelope = run_json(&["series", "--m2", "1", "--level", "0"]);
    match envelope.payload {
        Payload::Series(series) => {
            assert_eq!(series.c1.re, 0.0);
            assert_eq!(series.c1.im, 0.0);
            assert!((series.c2.re - 0.6875).abs() < 1e-14);
        }
        other => panic!("wrong payload: {other:?}"),
    }
}

#[test]
fn sweep_passes_on_an_ascending_grid() {
    let envelope = run_json(&[
        "sweep", "--f", "1", "--m2-grid", "0.25,1.0", "--levels", "2", "--n-basis", "96",
    ]);
    match envelope.payload {
        Payload::Sweep(sweep) => {
            assert!(sweep.all_pass);
            assert_eq!(sweep.points.len(), 2);
            // Δ = 4m⁶/27f²: the grid's shifts must ascend with m²
            assert!(sweep.points[0].predicted_delta < sweep.points[1].predicted_delta);
        }
        other => panic!("wrong payload: {other:?}"),
    }
}

#[test]
fn crosscheck_certifies_backend_agreement() {
    let envelope = run_json(&[
        "crosscheck", "--m2", "1", "--f", "1", "--levels", "2", "--n-basis", "96",
    ]);
    match envelope.payload {
        Payload::Crosscheck(report) => {
            assert!(report.pass, "max_abs_diff = {:.3e}", report.max_abs_diff);
            assert!(report.max_abs_diff < 1e-6);
            assert_eq!(report.per_level.len(), 2);
        }
        other => panic!("wrong payload: {other:?}"),
    }
}

#[test]
fn csv_format_emits_the_spectrum_table() {
    let output = Command::new(BIN)
        .args(["spectrum", "--m2", "1", "--f", "1", "--levels", "2", "--n-basis", "96",
               "--format", "csv"])
        .output()
        .expect("binary launches");
    assert_eq!(output.status.code(), Some(0));
    let text = String::from_utf8(output.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "n,re_E,im_E,drift,converged");
    assert_eq!(lines.clone().count(), 2);
    assert!(lines.all(|line| line.ends_with(",true")), "{text}");
}
