//! Subcommand execution: translate a validated [`RunConfig`] into core
//! library calls and fold the result into a payload plus semantic exit
//! code (0 pass, 2 non-convergence/disagreement, 3 failed duality verdict).

use ptcubic_core::{
    auto_omega, find_eigenvalue, rs_coefficients, scan_for_levels, solve_spectrum,
    verify_duality, BackendChoice, BasisConfig, DualityOptions, OscillatorSpec, ShootingConfig,
    SpectrumResult,
};

use crate::config::{BackendKind, CommandKind, RunConfig};
use crate::envelope::{exit_for, CrosscheckLevel, CrosscheckReport, Payload, SweepSummary};
use crate::error::CliError;

pub struct RunOutput {
    pub payload: Payload,
    pub exit: u8,
}

pub fn execute(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let payload = match cfg.command {
        CommandKind::Spectrum => spectrum(cfg)?,
        CommandKind::Duality => duality(cfg)?,
        CommandKind::Series => series(cfg)?,
        CommandKind::Sweep => sweep(cfg)?,
        CommandKind::Crosscheck => crosscheck(cfg)?,
    };
    let exit = exit_for(cfg, &payload);
    Ok(RunOutput { payload, exit })
}

fn spec_of(cfg: &RunConfig) -> Result<OscillatorSpec, CliError> {
    Ok(OscillatorSpec::new(cfg.m_squared, cfg.coupling)?)
}

fn basis_config(
    cfg: &RunConfig,
    spec: &OscillatorSpec,
    drift_tol: f64,
) -> Result<BasisConfig, CliError> {
    let omega = cfg.omega.unwrap_or_else(|| auto_omega(spec));
    Ok(BasisConfig::new(cfg.n_basis, omega, drift_tol, cfg.levels)?)
}

fn shooting_config(root_tol: Option<f64>) -> ShootingConfig {
    ShootingConfig {
        root_tol: root_tol.unwrap_or(ShootingConfig::default().root_tol),
        ..ShootingConfig::default()
    }
}

/// Drop uncertified trailing candidates beyond the requested level count;
/// the envelope should answer exactly what was asked.
fn truncate_to_levels(mut result: SpectrumResult, levels: usize) -> SpectrumResult {
    result.eigenvalues.truncate(levels);
    result.per_level_drift.truncate(levels);
    result.converged_count = result.converged_count.min(levels);
    result
}

fn duality_options(cfg: &RunConfig) -> DualityOptions {
    DualityOptions {
        n_basis: Some(cfg.n_basis),
        omega: cfg.omega,
        ..DualityOptions::default()
    }
}

fn backend_choice(kind: BackendKind) -> BackendChoice {
    match kind {
        BackendKind::Basis => BackendChoice::Basis,
        BackendKind::Shooting => BackendChoice::Shooting,
        BackendKind::Both => BackendChoice::Both,
    }
}

fn spectrum(cfg: &RunConfig) -> Result<Payload, CliError> {
    let spec = spec_of(cfg)?;
    let result = match cfg.backend {
        BackendKind::Basis => {
            solve_spectrum(&spec, &basis_config(cfg, &spec, cfg.tol)?)?
        }
        BackendKind::Shooting => {
            let report = scan_for_levels(&spec, cfg.levels, &shooting_config(Some(cfg.tol)))?;
            if report.failed_seeds > 0 {
                eprintln!(
                    "note: {} of the scan seeds failed to converge (roots from the rest)",
                    report.failed_seeds
                );
            }
            report.result
        }
        BackendKind::Both => {
            // basis numbers, every reported level re-derived by shooting
            let result =
                solve_spectrum(&spec, &basis_config(cfg, &spec, BasisConfig::DEFAULT_TOL)?)?;
            let cross_tol = DualityOptions::default().cross_backend_tol;
            let shoot_cfg = shooting_config(None);
            for (n, &e) in result.converged().iter().take(cfg.levels).enumerate() {
                let matched = find_eigenvalue(&spec, e, &shoot_cfg)?;
                let diff = (matched.energy - e).norm();
                if !matched.converged || diff > cross_tol {
                    return Err(CliError::Numerical(format!(
                        "backends disagree at level {n}: basis {e}, shooting {} \
                         (|diff| = {diff:.3e} > {cross_tol:.3e})",
                        matched.energy
                    )));
                }
            }
            result
        }
    };
    Ok(Payload::Spectrum(truncate_to_levels(result, cfg.levels)))
}

fn duality(cfg: &RunConfig) -> Result<Payload, CliError> {
    let report = verify_duality(
        cfg.m_squared,
        cfg.coupling,
        cfg.levels,
        cfg.tol,
        backend_choice(cfg.backend),
        &duality_options(cfg),
    )?;
    Ok(Payload::Duality(report))
}

fn series(cfg: &RunConfig) -> Result<Payload, CliError> {
    let coeffs = rs_coefficients(cfg.m_squared, cfg.series_level, cfg.n_basis)?;
    Ok(Payload::Series(coeffs))
}

fn sweep(cfg: &RunConfig) -> Result<Payload, CliError> {
    let reports = ptcubic_core::mass_sweep(
        cfg.coupling,
        &cfg.m2_grid,
        cfg.levels,
        cfg.tol,
        &duality_options(cfg),
    )?;
    let all_pass = reports.iter().all(|r| r.verdict);
    Ok(Payload::Sweep(SweepSummary {
        coupling: cfg.coupling,
        n_levels: cfg.levels,
        tol: cfg.tol,
        points: reports,
        all_pass,
    }))
}

fn crosscheck(cfg: &RunConfig) -> Result<Payload, CliError> {
    let spec = spec_of(cfg)?;
    let result = solve_spectrum(&spec, &basis_config(cfg, &spec, BasisConfig::DEFAULT_TOL)?)?;
    if result.converged_count < cfg.levels {
        return Err(CliError::Numerical(format!(
            "basis backend certified only {} of {} requested levels; raise --n-basis",
            result.converged_count, cfg.levels
        )));
    }
    let shoot_cfg = shooting_config(None);
    let mut per_level = Vec::with_capacity(cfg.levels);
    let mut max_abs_diff = 0.0f64;
    for (n, &e_basis) in result.converged()[..cfg.levels].iter().enumerate() {
        let matched = find_eigenvalue(&spec, e_basis, &shoot_cfg)?;
        if !matched.converged {
            return Err(CliError::Numerical(format!(
                "shooting did not certify convergence at level {n} (last step {:.3e})",
                matched.final_step
            )));
        }
        let abs_diff = (matched.energy - e_basis).norm();
        max_abs_diff = max_abs_diff.max(abs_diff);
        per_level.push(CrosscheckLevel {
            n,
            e_basis,
            e_shooting: matched.energy,
            abs_diff,
        });
    }
    Ok(Payload::Crosscheck(CrosscheckReport {
        spec,
        tol: cfg.tol,
        per_level,
        max_abs_diff,
        pass: max_abs_diff <= cfg.tol,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{CommonArgs, FormatKind};
    use num_complex::Complex64;

    fn cfg_for(command: CommandKind, args: CommonArgs) -> RunConfig {
        crate::config::resolve(command, &args, None, None).unwrap()
    }

    #[test]
    fn series_payload_matches_the_closed_form() {
        let cfg = cfg_for(CommandKind::Series, CommonArgs::default());
        let out = execute(&cfg).unwrap();
        assert_eq!(out.exit, 0);
        match out.payload {
            Payload::Series(series) => {
                assert_eq!(series.c1, Complex64::new(0.0, 0.0));
                // literal sum-over-states vs closed form 11/16: roundoff only
                assert!((series.c2.re - 0.6875).abs() < 1e-14, "c2 = {}", series.c2);
                assert_eq!(series.c2.im, 0.0);
            }
            other => panic!("wrong payload: {other:?}"),
        }
    }

    #[test]
    fn small_basis_spectrum_converges_and_truncates() {
        let args = CommonArgs {
            n_basis: Some(64),
            levels: Some(3),
            ..CommonArgs::default()
        };
        let cfg = cfg_for(CommandKind::Spectrum, args);
        let out = execute(&cfg).unwrap();
        assert_eq!(out.exit, 0);
        match out.payload {
            Payload::Spectrum(result) => {
                assert_eq!(result.eigenvalues.len(), 3);
                assert_eq!(result.converged_count, 3);
                assert!((result.eigenvalues[0].re - 1.291754161974042).abs() < 1e-9);
            }
            other => panic!("wrong payload: {other:?}"),
        }
    }

    #[test]
    fn under_resolved_spectrum_reports_exit_two() {
        // N = 24 cannot certify 6 levels at 1e-8 drift
        let args = CommonArgs {
            n_basis: Some(24),
            levels: Some(6),
            ..CommonArgs::default()
        };
        let cfg = cfg_for(CommandKind::Spectrum, args);
        let out = execute(&cfg).unwrap();
        assert_eq!(out.exit, 2);
    }

    #[test]
    fn format_flag_does_not_change_the_numbers() {
        let mut args = CommonArgs {
            n_basis: Some(64),
            levels: Some(2),
            ..CommonArgs::default()
        };
        let a = execute(&cfg_for(CommandKind::Spectrum, args.clone())).unwrap();
        args.format = Some(FormatKind::Csv);
        let b = execute(&cfg_for(CommandKind::Spectrum, args)).unwrap();
        assert_eq!(a.payload, b.payload);
    }
}
