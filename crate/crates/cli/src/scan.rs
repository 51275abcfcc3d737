//! The subcommands. Every scan expands its grid in the fixed order
//! N, κ, α, ℓ, evaluates the points in parallel and keeps the rows in grid
//! order.

use std::path::Path;

use gaussent::chain::coupling_matrix;
use gaussent::spectrum::{entropy_in, entropy_terms_in};
use gaussent::{
    evolve, fit_log_sin, fit_size_scaling, ground_state_moments, mode_spectrum_from_moments, moments_from_params,
    params_from_moments, product_identification, reduce_region, region_spectrum_extended, top_eigenvalues, Boundary,
    ChainConfig, ConformalThresholds, FitMode, FitResult, LogBase, ModeSpectrum, MomentSet, QuadraticModel, Region,
    Validate,
};
use rayon::prelude::*;

use crate::args::{Arith, Command, FitModeArg, LogBaseArg, Measure, ScanArgs};
use crate::error::{CliError, Result};
use crate::output::{Cell, FitRecord, ScanResult};
use crate::state_file::{read_theta, write_theta};

/// One chain of the grid.
#[derive(Debug, Clone, Copy)]
struct Point {
    n: usize,
    kappa: f64,
    alpha: u8,
}

/// A computed row plus any advisory validation messages for it.
type Evaluated = (Vec<Cell>, Vec<String>);

pub fn execute(cmd: &Command) -> Result<ScanResult> {
    let args = cmd.args();
    let run = || match cmd {
        Command::KappaScan(a) => fixed_region_scan(a, "kappa-scan", &[Measure::Entropy, Measure::ProductId(2)], false),
        Command::SizeScan(a) => fixed_region_scan(a, "size-scan", &[Measure::Entropy], a.fit),
        Command::SigmaScan(a) => sigma_scan(a),
        Command::Spectrum(a) => spectrum_report(a),
        Command::Evolve(a) => evolution(a),
        Command::Fit(a) => fit_file(a),
    };
    match args.threads {
        Some(0) => Err(CliError::spec("--threads must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::spec(format!("cannot start thread pool: {e}")))?
            .install(run),
        None => run(),
    }
}

fn log_base(args: &ScanArgs) -> LogBase {
    match args.log_base {
        LogBaseArg::Two => LogBase::Two,
        LogBaseArg::E => LogBase::E,
    }
}

fn thresholds(args: &ScanArgs) -> ConformalThresholds {
    // the conformal slope 1/3 is in ebits
    let unit = match args.log_base {
        LogBaseArg::Two => 1.0,
        LogBaseArg::E => std::f64::consts::LN_2,
    };
    ConformalThresholds {
        target_slope: unit / 3.0,
        slope_tolerance: args.slope_tolerance,
        max_rms: args.max_rms,
    }
}

fn fit_mode(args: &ScanArgs) -> FitMode {
    match args.fit_mode {
        FitModeArg::Free => FitMode::Free,
        FitModeArg::Fixed => FitMode::FixedSlope(args.fit_slope),
        FitModeArg::Anchored => FitMode::EndAnchored(args.fit_slope),
    }
}

fn measures(args: &ScanArgs, default: &[Measure], need_entropy: bool) -> Vec<Measure> {
    let mut m = if args.measure.is_empty() {
        default.to_vec()
    } else {
        args.measure.clone()
    };
    if need_entropy && !m.contains(&Measure::Entropy) {
        m.insert(0, Measure::Entropy);
    }
    m.dedup();
    m
}

fn grid(args: &ScanArgs) -> Result<Vec<Point>> {
    if let Some(&k) = args.kappa.0.iter().find(|k| !(**k >= 0.0)) {
        return Err(CliError::spec(format!("kappa must be non-negative, got {k}")));
    }
    if args.sites.0.contains(&0) {
        return Err(CliError::spec("chain sizes must be positive"));
    }
    let mut points = Vec::new();
    for &n in &args.sites.0 {
        for &kappa in &args.kappa.0 {
            for &alpha in &args.alpha.0 {
                points.push(Point { n, kappa, alpha });
            }
        }
    }
    Ok(points)
}

fn single_point(args: &ScanArgs, what: &str) -> Result<Point> {
    let points = grid(args)?;
    match points.as_slice() {
        [p] => Ok(*p),
        _ => Err(CliError::spec(format!(
            "{what} takes a single N, kappa and alpha, got {} combinations",
            points.len()
        ))),
    }
}

fn check_cap(args: &ScanArgs, evals: usize) -> Result<()> {
    if evals > args.max_evals {
        return Err(CliError::spec(format!(
            "{evals} evaluations exceed the safety cap of {} (raise --max-evals)",
            args.max_evals
        )));
    }
    Ok(())
}

fn chain(args: &ScanArgs, p: Point) -> Result<ChainConfig> {
    let boundary = Boundary::from_alpha(p.alpha)?;
    Ok(match args.length {
        Some(length) => ChainConfig::fixed_length(p.n, length, p.kappa, boundary)?,
        None => ChainConfig::with_lattice_const(p.n, args.lattice_const, p.kappa, boundary)?,
    })
}

/// Region length for scans at a fixed region: `--region-len` if given,
/// otherwise `⌊σN⌋` clamped to `1..=N`.
fn fixed_region_len(args: &ScanArgs, n: usize) -> Result<usize> {
    match &args.region_len {
        Some(grid) if grid.0.len() == 1 => Ok(grid.0[0]),
        Some(_) => Err(CliError::spec("this command takes a single --region-len")),
        None => {
            if !(args.sigma > 0.0 && args.sigma <= 1.0) {
                return Err(CliError::spec(format!("sigma must be in (0, 1], got {}", args.sigma)));
            }
            Ok(((args.sigma * n as f64 + 1e-9).floor() as usize).clamp(1, n))
        }
    }
}

fn region(args: &ScanArgs, n: usize, len: usize) -> Result<Region> {
    if len == 0 || len > n || args.region_start >= n {
        return Err(CliError::spec(format!(
            "region (start {}, length {len}) does not fit a chain of {n} sites",
            args.region_start
        )));
    }
    Ok(Region::new(args.region_start, len))
}

fn check_state(args: &ScanArgs, xi: &MomentSet, label: &str) -> Result<Vec<String>> {
    let report = xi.validate();
    if report.is_valid() {
        return Ok(Vec::new());
    }
    let msg = report
        .violations()
        .map(|c| format!("{} (worst violation {:e})", c.name, c.worst_violation))
        .collect::<Vec<_>>()
        .join("; ");
    if args.strict_validation {
        return Err(CliError::Validation(format!("{label}: {msg}")));
    }
    Ok(vec![format!("{label}: {msg}")])
}

/// Spectrum of `region` of the chain whose full ground state is `full`.
fn region_state(
    args: &ScanArgs,
    config: &ChainConfig,
    full: &MomentSet,
    region: Region,
    label: &str,
) -> Result<(ModeSpectrum, Vec<String>)> {
    let reduced = reduce_region(full, region)?;
    let warnings = check_state(args, &reduced, label)?;
    let spec = match args.arith {
        Arith::Double => mode_spectrum_from_moments(&reduced)?,
        Arith::Extended => region_spectrum_extended(config, region)?,
    };
    Ok((spec, warnings))
}

fn measure_cells(spec: &ModeSpectrum, measures: &[Measure], base: LogBase) -> Result<Vec<Cell>> {
    measures
        .iter()
        .map(|m| {
            Ok(Cell::Float(match *m {
                Measure::Entropy => entropy_in(spec, base),
                Measure::ProductId(order) => product_identification(spec, order)?,
            }))
        })
        .collect()
}

fn label(p: Point, l: usize) -> String {
    format!("N={} kappa={:e} alpha={} l={l}", p.n, p.kappa, p.alpha)
}

/// Keeps grid order, reports the first failure in grid order, and prints
/// advisory warnings in the same order.
fn collect(results: Vec<Result<Evaluated>>) -> Result<Vec<Vec<Cell>>> {
    let mut rows = Vec::with_capacity(results.len());
    for r in results {
        let (row, warnings) = r?;
        for w in warnings {
            eprintln!("gaussent: warning: {w}");
        }
        rows.push(row);
    }
    Ok(rows)
}

fn base_result(command: &str, args: &ScanArgs, columns: Vec<String>, rows: Vec<Vec<Cell>>) -> ScanResult {
    ScanResult {
        command: command.into(),
        parameters: args.echo(),
        columns,
        rows,
        fits: Vec::new(),
    }
}

fn columns(prefix: &[&str], measures: &[Measure]) -> Vec<String> {
    prefix
        .iter()
        .map(|s| s.to_string())
        .chain(measures.iter().map(|m| m.column()))
        .collect()
}

/// kappa-scan and size-scan: one region per chain.
fn fixed_region_scan(args: &ScanArgs, command: &str, default: &[Measure], with_fit: bool) -> Result<ScanResult> {
    let points = grid(args)?;
    check_cap(args, points.len())?;
    let measures = measures(args, default, with_fit);
    let base = log_base(args);
    let results: Vec<Result<Evaluated>> = points
        .par_iter()
        .map(|&p| {
            let config = chain(args, p)?;
            let len = fixed_region_len(args, p.n)?;
            let full = ground_state_moments(&config)?;
            let (spec, warnings) = region_state(args, &config, &full, region(args, p.n, len)?, &label(p, len))?;
            let mut row = vec![p.n.into(), p.kappa.into(), p.alpha.into(), len.into()];
            row.extend(measure_cells(&spec, &measures, base)?);
            Ok((row, warnings))
        })
        .collect();
    let rows = collect(results)?;
    let mut result = base_result(command, args, columns(&["N", "kappa", "alpha", "l"], &measures), rows);
    if with_fit {
        result.fits = size_fits(args, &result)?;
    }
    Ok(result)
}

fn size_fits(args: &ScanArgs, result: &ScanResult) -> Result<Vec<FitRecord>> {
    let (i_n, i_k, i_a, i_s) = (0, 1, 2, result.column("S").expect("entropy column present"));
    let thresholds = thresholds(args);
    let mut fits = Vec::new();
    for &kappa in &args.kappa.0 {
        for &alpha in &args.alpha.0 {
            let points: Vec<(usize, f64)> = result
                .rows
                .iter()
                .filter(|r| r[i_k] == Cell::Float(kappa) && r[i_a] == Cell::from(alpha))
                .map(|r| (r[i_n].as_f64().unwrap() as usize, r[i_s].as_f64().unwrap()))
                .collect();
            let fit = match fit_mode(args) {
                FitMode::Free => fit_size_scaling(&points)?,
                mode => {
                    let xy: Vec<(f64, f64)> = points.iter().map(|&(n, s)| ((n as f64).log2(), s)).collect();
                    gaussent::cft::fit_line(&xy, mode)?
                }
            };
            fits.push(record(
                vec![("kappa", kappa.into()), ("alpha", alpha.into())],
                "size",
                fit,
                &thresholds,
            ));
        }
    }
    Ok(fits)
}

fn record(group: Vec<(&str, Cell)>, kind: &'static str, fit: FitResult, thresholds: &ConformalThresholds) -> FitRecord {
    FitRecord {
        group: group.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        kind,
        conformal: thresholds.is_conformal(&fit),
        fit,
    }
}

fn sigma_lengths(args: &ScanArgs, n: usize) -> Result<Vec<usize>> {
    let lengths = match &args.region_len {
        Some(grid) => grid.0.clone(),
        None if n >= 2 => (1..n).collect(),
        None => return Err(CliError::spec("sigma-scan needs at least 2 sites")),
    };
    if let Some(&l) = lengths.iter().find(|&&l| l == 0 || l > n) {
        return Err(CliError::spec(format!(
            "region length {l} does not fit a chain of {n} sites"
        )));
    }
    Ok(lengths)
}

fn sigma_scan(args: &ScanArgs) -> Result<ScanResult> {
    let points = grid(args)?;
    let mut tasks = Vec::new();
    for (i, p) in points.iter().enumerate() {
        for l in sigma_lengths(args, p.n)? {
            tasks.push((i, l));
        }
    }
    check_cap(args, tasks.len())?;
    let measures = measures(args, &[Measure::Entropy], args.fit);
    let base = log_base(args);

    let states: Vec<Result<(ChainConfig, MomentSet)>> = points
        .par_iter()
        .map(|&p| {
            let config = chain(args, p)?;
            let full = ground_state_moments(&config)?;
            Ok((config, full))
        })
        .collect();
    let states = states.into_iter().collect::<Result<Vec<_>>>()?;

    let results: Vec<Result<Evaluated>> = tasks
        .par_iter()
        .map(|&(i, l)| {
            let p = points[i];
            let (config, full) = &states[i];
            let (spec, warnings) = region_state(args, config, full, region(args, p.n, l)?, &label(p, l))?;
            let mut row = vec![
                p.n.into(),
                p.kappa.into(),
                p.alpha.into(),
                l.into(),
                (l as f64 / p.n as f64).into(),
            ];
            row.extend(measure_cells(&spec, &measures, base)?);
            Ok((row, warnings))
        })
        .collect();
    let rows = collect(results)?;
    let mut result = base_result(
        "sigma-scan",
        args,
        columns(&["N", "kappa", "alpha", "l", "sigma"], &measures),
        rows,
    );

    if args.fit {
        let i_s = result.column("S").expect("entropy column present");
        let thresholds = thresholds(args);
        for p in &points {
            let pts: Vec<(f64, f64)> = result
                .rows
                .iter()
                .filter(|r| r[0] == Cell::from(p.n) && r[1] == Cell::Float(p.kappa) && r[2] == Cell::from(p.alpha))
                .filter(|r| {
                    let l = r[3].as_f64().unwrap() as usize;
                    !(args.trim && (l == 1 || l + 1 == p.n)) && l < p.n
                })
                .map(|r| (r[4].as_f64().unwrap(), r[i_s].as_f64().unwrap()))
                .collect();
            let fit = fit_log_sin(&pts, fit_mode(args))?;
            let group = vec![("N", p.n.into()), ("kappa", p.kappa.into()), ("alpha", p.alpha.into())];
            result.fits.push(record(group, "log-sin", fit, &thresholds));
        }
    }
    Ok(result)
}

/// Sparse occupation label: `mode:count` pairs, `vac` for the vacuum.
fn occupation_label(occ: &[u32]) -> String {
    let parts: Vec<String> = occ
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(i, c)| format!("{i}:{c}"))
        .collect();
    if parts.is_empty() {
        "vac".into()
    } else {
        parts.join(";")
    }
}

fn spectrum_report(args: &ScanArgs) -> Result<ScanResult> {
    check_cap(args, args.top_k.max(1))?;
    let (spec, warnings) = match &args.theta {
        Some(path) => {
            if args.arith == Arith::Extended {
                return Err(CliError::spec("--arith extended applies to chain states only"));
            }
            let xi = moments_from_params(&read_theta(path)?)?;
            let xi = match &args.region_len {
                Some(_) => {
                    let n = xi.n_modes();
                    reduce_region(&xi, region(args, n, fixed_region_len(args, n)?)?)?
                }
                None => xi,
            };
            let warnings = check_state(args, &xi, &path.display().to_string())?;
            (mode_spectrum_from_moments(&xi)?, warnings)
        }
        None => {
            let p = single_point(args, "spectrum")?;
            let config = chain(args, p)?;
            let len = fixed_region_len(args, p.n)?;
            let full = ground_state_moments(&config)?;
            region_state(args, &config, &full, region(args, p.n, len)?, &label(p, len))?
        }
    };
    for w in warnings {
        eprintln!("gaussent: warning: {w}");
    }

    let base = log_base(args);
    let terms: Vec<(f64, f64)> = spec
        .xi
        .iter()
        .copied()
        .zip(entropy_terms_in(&spec, base))
        .filter(|&(_, s)| s > 0.0)
        .collect();
    let records = top_eigenvalues(&spec, args.top_k);
    let mut rows = Vec::new();
    let mut cumulative = 0.0;
    for rank in 0..terms.len().max(records.len()) {
        let mut row: Vec<Cell> = vec![(rank + 1).into()];
        match terms.get(rank) {
            Some(&(xi, s)) => {
                cumulative += s;
                row.extend([xi.into(), s.into(), cumulative.into()]);
            }
            None => row.extend([Cell::Empty, Cell::Empty, Cell::Empty]),
        }
        match records.get(rank) {
            Some(rec) => row.extend([rec.lambda.into(), Cell::Text(occupation_label(&rec.occupation))]),
            None => row.extend([Cell::Empty, Cell::Empty]),
        }
        rows.push(row);
    }
    let cols = ["rank", "xi", "s_n", "cumulative_S", "lambda", "occupation"];
    Ok(base_result(
        "spectrum",
        args,
        cols.iter().map(|s| s.to_string()).collect(),
        rows,
    ))
}

fn step_count(t_final: f64, dt: f64) -> usize {
    let ratio = t_final / dt;
    let nearest = ratio.round();
    if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest as usize
    } else {
        ratio.ceil() as usize
    }
}

fn evolution(args: &ScanArgs) -> Result<ScanResult> {
    if args.arith == Arith::Extended {
        return Err(CliError::spec("--arith extended is not available for evolve"));
    }
    if !(args.dt > 0.0 && args.dt.is_finite()) || !(args.t_final >= 0.0 && args.t_final.is_finite()) {
        return Err(CliError::spec("evolve needs dt > 0 and t-final >= 0"));
    }
    if args.sample_every == 0 {
        return Err(CliError::spec("--sample-every must be at least 1"));
    }
    check_cap(args, step_count(args.t_final, args.dt))?;
    if let Some(k) = args.quench_kappa {
        if !(k >= 0.0) {
            return Err(CliError::spec(format!("quench-kappa must be non-negative, got {k}")));
        }
    }

    let mut p = single_point(args, "evolve")?;
    let xi0 = match &args.theta {
        Some(path) => {
            let xi = moments_from_params(&read_theta(path)?)?;
            p.n = xi.n_modes();
            xi
        }
        None => ground_state_moments(&chain(args, p)?)?,
    };
    for w in check_state(args, &xi0, "initial state")? {
        eprintln!("gaussent: warning: {w}");
    }
    let model_point = Point {
        kappa: args.quench_kappa.unwrap_or(p.kappa),
        ..p
    };
    let model = QuadraticModel::unforced(coupling_matrix(&chain(args, model_point)?))?;
    let traj = evolve(&xi0, &model, args.t_final, args.dt, args.sample_every)?;
    if let Some(path) = &args.theta_out {
        write_theta(path, &params_from_moments(traj.final_state())?)?;
    }

    let n = p.n;
    let sub = match &args.region_len {
        Some(_) => Some(region(args, n, fixed_region_len(args, n)?)?),
        None => None,
    };
    let base = log_base(args);
    let results: Vec<Result<Evaluated>> = traj
        .samples
        .par_iter()
        .map(|(t, xi)| {
            let mut row: Vec<Cell> = vec![(*t).into()];
            for m in [&xi.q_mat, &xi.p_mat] {
                for i in 0..n {
                    for j in i..n {
                        row.push(m[(i, j)].into());
                    }
                }
            }
            for i in 0..n {
                for j in 0..n {
                    row.push(xi.s_mat[(i, j)].into());
                }
            }
            row.extend(xi.mean_q.iter().map(|&x| Cell::from(x)));
            row.extend(xi.mean_p.iter().map(|&x| Cell::from(x)));
            row.push(entropy_in(&mode_spectrum_from_moments(xi)?, base).into());
            if let Some(r) = sub {
                row.push(entropy_in(&mode_spectrum_from_moments(&reduce_region(xi, r)?)?, base).into());
            }
            Ok((row, Vec::new()))
        })
        .collect();
    let rows = collect(results)?;

    let mut cols = vec!["t".to_string()];
    for name in ["Q", "P"] {
        for i in 0..n {
            for j in i..n {
                cols.push(format!("{name}_{i}_{j}"));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            cols.push(format!("S_{i}_{j}"));
        }
    }
    cols.extend((0..n).map(|i| format!("mean_q_{i}")));
    cols.extend((0..n).map(|i| format!("mean_p_{i}")));
    cols.push("S_global".into());
    if sub.is_some() {
        cols.push("S_region".into());
    }
    Ok(base_result("evolve", args, cols, rows))
}

/// A parsed CSV written by this tool: header and text cells.
struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn read_table(path: &Path) -> Result<Table> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?;
    let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| CliError::spec(format!("{}: no header row", path.display())))?;
    let columns: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
    let rows: Vec<Vec<String>> = lines
        .map(|l| l.split(',').map(|s| s.trim().to_string()).collect())
        .collect();
    if let Some(bad) = rows.iter().position(|r| r.len() != columns.len()) {
        return Err(CliError::spec(format!(
            "{}: data row {} has the wrong width",
            path.display(),
            bad + 1
        )));
    }
    Ok(Table { columns, rows })
}

fn fit_file(args: &ScanArgs) -> Result<ScanResult> {
    let path = args
        .input
        .as_ref()
        .ok_or_else(|| CliError::spec("fit needs --input FILE"))?;
    let table = read_table(path)?;
    let col = |name: &str| table.columns.iter().position(|c| c == name);
    let num = |s: &str| -> Result<f64> {
        s.parse::<f64>()
            .map_err(|_| CliError::spec(format!("{}: `{s}` is not a number", path.display())))
    };
    let i_s = col("S").ok_or_else(|| CliError::spec("input has no entropy column S"))?;
    let (kind, x_col, keys): (&'static str, usize, &[&str]) = match (col("sigma"), col("N")) {
        (Some(i), _) => ("log-sin", i, &["N", "kappa", "alpha"]),
        (None, Some(i)) => ("size", i, &["kappa", "alpha"]),
        _ => {
            return Err(CliError::spec(
                "input needs a sigma column (log-sin fit) or an N column (size fit)",
            ))
        }
    };
    let key_cols: Vec<(&str, usize)> = keys.iter().filter_map(|k| col(k).map(|i| (*k, i))).collect();

    // groups in order of first appearance
    let mut groups: Vec<(Vec<String>, Vec<usize>)> = Vec::new();
    for (r, row) in table.rows.iter().enumerate() {
        let key: Vec<String> = key_cols.iter().map(|&(_, i)| row[i].clone()).collect();
        match groups.iter_mut().find(|g| g.0 == key) {
            Some(g) => g.1.push(r),
            None => groups.push((key, vec![r])),
        }
    }

    let thresholds = thresholds(args);
    let mut rows = Vec::new();
    for (key, members) in groups {
        let mut pts = Vec::new();
        for &r in &members {
            let row = &table.rows[r];
            if kind == "log-sin" && args.trim {
                if let (Some(il), Some(in_)) = (col("l"), col("N")) {
                    let (l, n) = (num(&row[il])?, num(&row[in_])?);
                    if l == 1.0 || l == n - 1.0 {
                        continue;
                    }
                }
            }
            pts.push((num(&row[x_col])?, num(&row[i_s])?));
        }
        let fit = match kind {
            "log-sin" => fit_log_sin(&pts, fit_mode(args))?,
            _ => {
                let xy: Vec<(f64, f64)> = pts.iter().map(|&(n, s)| (n.log2(), s)).collect();
                gaussent::cft::fit_line(&xy, fit_mode(args))?
            }
        };
        let mut row: Vec<Cell> = key.into_iter().map(Cell::Text).collect();
        row.extend([
            Cell::Text(kind.into()),
            fit.slope.into(),
            fit.offset.into(),
            fit.rms_residual.into(),
            fit.max_residual.into(),
            fit.n_points.into(),
            fit.covariance[0][0].into(),
            fit.covariance[1][1].into(),
            fit.covariance[0][1].into(),
            Cell::Text(thresholds.is_conformal(&fit).to_string()),
        ]);
        rows.push(row);
    }
    let mut cols: Vec<String> = key_cols.iter().map(|(k, _)| k.to_string()).collect();
    cols.extend(
        [
            "kind",
            "slope",
            "offset",
            "rms_residual",
            "max_residual",
            "n_points",
            "var_slope",
            "var_offset",
            "cov_slope_offset",
            "conformal",
        ]
        .iter()
        .map(|s| s.to_string()),
    );
    Ok(base_result("fit", args, cols, rows))
}
