//! The five subcommands. Each validates every input before computing and
//! returns the process exit status on success.

use std::path::Path;
use std::process::ExitCode;

use prelog_core::analysis::{
    log_grid, prelog_classify, rates_at_fixed_point, solve_fixed_point, sweep_point, validate_sweep,
    verify_asymptotics, Prelog,
};
use prelog_core::simulate::{Campaign, InitMode, MessageConfig, Mode};
use prelog_core::{ChannelParams, NoiseSpec, Receiver};
use rayon::prelude::*;

use crate::args::*;
use crate::error::CliError;
use crate::output::{emit, opt_real, real, Record, Table};

fn noise_spec(noise: &Noise, settings: &mut Record) -> Result<NoiseSpec, CliError> {
    settings.real("sigma1", noise.sigma1).real("sigma2", noise.sigma2).real("rhoz", noise.rhoz);
    Ok(NoiseSpec::new(noise.sigma1, noise.sigma2, noise.rhoz)?)
}

fn grid_points(grid: &Grid, settings: &mut Record) -> Result<Vec<f64>, CliError> {
    settings.real("p-start", grid.p_start).real("p-stop", grid.p_stop).push("points-per-decade", grid.per_decade);
    Ok(log_grid(grid.p_start, grid.p_stop, grid.per_decade)?)
}

pub fn analyze(args: &AnalyzeArgs) -> Result<ExitCode, CliError> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let mut rec = Record::new();
    rec.push("command", "analyze");
    let power = pick(args.power, file.power, DEFAULT_POWER);
    let tol = pick(args.tol, file.tol, DEFAULT_TOL);
    rec.real("power", power);
    let noise = noise_spec(&args.noise.resolve(&file), &mut rec)?;
    rec.real("tol", tol);
    let params = ChannelParams::new(power, noise)?;

    let fp = solve_fixed_point(&params, tol)?;
    let rates = rates_at_fixed_point(&params, &fp);
    rec.real("rho_star", fp.rho_star)
        .real("gap", fp.gap)
        .real("residual", fp.residual)
        .real("recursion_residual", fp.recursion_residual)
        .real("r1", rates.r1)
        .real("r2", rates.r2)
        .real("sum", rates.sum)
        .real("prelog_ratio", rates.prelog_ratio);
    emit(args.common.out.as_deref(), &rec.render())?;
    Ok(ExitCode::SUCCESS)
}

pub const SWEEP_COLUMNS: &[&str] = &["P", "rho_star", "g", "R1", "R2", "sum", "prelog_ratio", "scaled_gap"];

pub fn sweep(args: &SweepArgs) -> Result<ExitCode, CliError> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let mut settings = Record::new();
    settings.push("command", "sweep");
    let noise = noise_spec(&args.noise.resolve(&file), &mut settings)?;
    let grid = grid_points(&args.grid.resolve(&file), &mut settings)?;
    let delta = pick(args.delta, file.delta, DEFAULT_DELTA);
    let tol = pick(args.tol, file.tol, DEFAULT_TOL);
    settings.real("delta", delta).real("tol", tol);
    validate_sweep(&grid, delta)?;

    // collect preserves grid order, so the output does not depend on scheduling
    let rows = grid.par_iter().map(|&p| sweep_point(&noise, p, delta, tol)).collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(settings, SWEEP_COLUMNS);
    for r in rows {
        table.push(
            [r.power, r.rho_star, r.gap, r.r1, r.r2, r.sum, r.prelog_ratio, r.scaled_gap]
                .into_iter()
                .map(real)
                .collect(),
        );
    }
    emit(args.common.out.as_deref(), &table.render()?)?;
    Ok(ExitCode::SUCCESS)
}

pub const SIMULATE_COLUMNS: &[&str] = &[
    "k",
    "mean1",
    "mean2",
    "var1",
    "var2",
    "corr",
    "alpha1",
    "alpha2",
    "rho",
    "z_mean1",
    "z_mean2",
    "z_var1",
    "z_var2",
    "z_corr",
    "z_orth1",
    "z_orth2",
    "power",
    "z_power",
    "power_tx1",
    "power_tx2",
];

pub fn simulate(args: &SimulateArgs) -> Result<ExitCode, CliError> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let mut settings = Record::new();
    settings.push("command", "simulate");
    let power = pick(args.power, file.power, DEFAULT_POWER);
    settings.real("power", power);
    let noise = noise_spec(&args.noise.resolve(&file), &mut settings)?;
    let params = ChannelParams::new(power, noise)?;

    let trials = pick(args.trials, file.trials, DEFAULT_TRIALS);
    let n = pick(args.block_length, file.block_length, DEFAULT_BLOCK_LENGTH);
    let rate1 = args.rate1.or(file.rate1);
    let rate2 = args.rate2.or(file.rate2);
    let fraction = args.rate_fraction.or(file.rate_fraction);
    let mode_arg = pick(args.mode, file.mode, ModeArg::Broadcast);
    let fed_back = pick(args.fed_back_receiver, file.fed_back_receiver, 1);
    let init_arg = pick(args.init, file.init, InitArg::Natural);
    let seed = pick(args.seed, file.seed, DEFAULT_SEED);

    let config = match (rate1, rate2, fraction) {
        (Some(r1), Some(r2), None) => MessageConfig::new(n, r1, r2)?,
        (None, None, f) => {
            let f = f.unwrap_or(DEFAULT_RATE_FRACTION);
            settings.real("rate-fraction", f);
            MessageConfig::from_rate_fraction(n, &params, f)?
        }
        (_, _, Some(_)) => return Err(CliError::Input("--rate-fraction conflicts with --rate1/--rate2".into())),
        _ => return Err(CliError::Input("--rate1 and --rate2 must be given together".into())),
    };
    let mode = match mode_arg {
        ModeArg::Broadcast => Mode::Broadcast,
        ModeArg::Interference => Mode::Interference,
        ModeArg::Limited => Mode::LimitedFeedback(Receiver::from_index(fed_back)?),
    };
    let init = match init_arg {
        InitArg::Natural => InitMode::Natural,
        InitArg::FixedPoint => InitMode::FixedPoint,
    };
    let (l1, l2) = config.level_counts();
    settings
        .push("trials", trials)
        .push("block-length", n)
        .real("rate1", config.rate1())
        .real("rate2", config.rate2())
        .push("levels1", l1)
        .push("levels2", l2)
        .push("mode", mode_arg.name());
    if mode_arg == ModeArg::Limited {
        settings.push("fed-back-receiver", fed_back);
    }
    settings.push("init", init_arg.name()).push("seed", seed);

    let campaign = Campaign::new(config, params, mode, init, trials, seed)?;
    let chunks =
        (0..campaign.chunk_count()).into_par_iter().map(|c| campaign.run_chunk(c)).collect::<Result<Vec<_>, _>>()?;
    let summary = campaign.summarize(&campaign.merge_chunks(chunks))?;

    let mut table = Table::new(settings, SIMULATE_COLUMNS);
    for p in &summary.power {
        let step = summary.steps.iter().find(|s| s.step_index == p.t);
        let moments = match step {
            Some(s) => [
                s.mean1,
                s.mean2,
                s.var1,
                s.var2,
                s.corr,
                s.analytic.alpha1,
                s.analytic.alpha2,
                s.analytic.rho,
                s.z_mean1,
                s.z_mean2,
                s.z_var1,
                s.z_var2,
                s.z_corr,
            ]
            .map(real),
            None => Default::default(),
        };
        let orth = step.and_then(|s| s.z_orth);
        let mut row = vec![p.t.to_string()];
        row.extend(moments);
        row.push(opt_real(orth.map(|o| o.0)));
        row.push(opt_real(orth.map(|o| o.1)));
        row.push(real(p.mean));
        row.push(opt_real(p.z));
        row.push(opt_real(p.transmitters.map(|t| t.0)));
        row.push(opt_real(p.transmitters.map(|t| t.1)));
        table.push(row);
    }

    let mut rec = Record::new();
    rec.push("trials", summary.trials)
        .push("block_errors", summary.block_errors)
        .push("errors1", summary.errors1)
        .push("errors2", summary.errors2)
        .real("block_error_rate", summary.block_error_rate)
        .real("ci_low", summary.block_error_ci.0)
        .real("ci_high", summary.block_error_ci.1)
        .real("mean_power", summary.mean_power)
        .real("max_moment_z", summary.max_moment_z())
        .real("max_orthogonality_z", summary.max_orthogonality_z())
        .real("max_power_z", summary.max_power_z())
        .real("rho_star", summary.rho_star)
        .real("analytic_rho_distance", summary.analytic_rho_distance)
        .real("empirical_rho_distance", summary.empirical_rho_distance);

    let table = table.render()?;
    match (&args.common.out, &args.summary) {
        (None, None) => emit(None, &format!("{table}\n{}", rec.render()))?,
        (out, summary_path) => {
            emit(out.as_deref(), &table)?;
            emit(summary_path.as_deref(), &rec.render())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

pub const VERIFY_COLUMNS: &[&str] = &[
    "P",
    "lambda2",
    "lambda2_dev",
    "scaled_lambda1",
    "root_gap_scaled",
    "root_gap_dev",
    "scaled_lambda0",
    "scaled_gap",
];

pub fn verify(args: &VerifyArgs) -> Result<ExitCode, CliError> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let mut settings = Record::new();
    settings.push("command", "verify");
    let noise = noise_spec(&args.noise.resolve(&file), &mut settings)?;
    let grid = grid_points(&args.grid.resolve(&file), &mut settings)?;
    let delta = pick(args.delta, file.delta, DEFAULT_DELTA);
    let eps = pick(args.eps, file.eps, DEFAULT_EPS);
    settings.real("delta", delta).real("eps", eps);

    let report = verify_asymptotics(&noise, &grid, delta, eps)?;
    settings.real("root_gap_limit", report.root_gap_limit);
    let mut table = Table::new(settings, VERIFY_COLUMNS);
    for r in &report.rows {
        table.push(vec![
            real(r.power),
            real(r.lambda2),
            real(r.lambda2_dev),
            real(r.scaled_lambda1),
            real(r.root_gap_scaled),
            real(r.root_gap_dev),
            opt_real(r.scaled_lambda0),
            real(r.scaled_gap),
        ]);
    }
    let verdicts: String =
        report.verdicts.iter().map(|v| format!("{} {}\n", if v.passed { "PASS" } else { "FAIL" }, v.name)).collect();
    let table = table.render()?;
    match &args.common.out {
        None => emit(None, &format!("{table}\n{verdicts}"))?,
        Some(path) => {
            emit(Some(path), &table)?;
            emit(None, &verdicts)?;
        }
    }
    Ok(if report.all_passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

/// Rows of whitespace-separated reals; blank lines and `#` comments are skipped.
pub fn parse_matrix(text: &str) -> Result<Vec<Vec<f64>>, CliError> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>().map_err(|_| CliError::Input(format!("line {}: `{tok}` is not a number", i + 1)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::Input("matrix file contains no rows".into()));
    }
    Ok(rows)
}

pub fn classify(args: &ClassifyArgs) -> Result<ExitCode, CliError> {
    let text = read_input(&args.matrix)?;
    let matrix = parse_matrix(&text)?;
    let class = prelog_classify(&matrix)?;
    let mut rec = Record::new();
    rec.push("receivers", matrix.len())
        .push(
            "class",
            match class.value {
                Prelog::One => "One",
                Prelog::Two => "Two",
                Prelog::Undefined => "Undefined",
            },
        )
        .push("reason", &class.reason);
    emit(args.common.out.as_deref(), &rec.render())?;
    Ok(if class.value == Prelog::Undefined { ExitCode::from(3) } else { ExitCode::SUCCESS })
}

fn read_input(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}
