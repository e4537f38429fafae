use rayon::prelude::*;
use selfsim_core::arith::{intersection_finite, pisot_distance, weak_limit_times, PisotSpec};
use selfsim_core::flow::FlowParams;
use selfsim_core::selfsim::{component_discrepancies, conjugacy_check};
use selfsim_core::spectral::{
    correlation_sequence, fejer_density_of, quasi_invariance_report, weak_limit_scan, ScanReport,
    TensorPairs, TowerPairs,
};
use selfsim_core::tower::{LevelSet, SelfSimilarParams};
use selfsim_core::{ratio, BigInt, BigRational};
use serde_json::Value;

use crate::args::{Cli, Command, FlowCommand, RunConfig};
use crate::fock_expr;
use crate::literal;
use crate::output::{float, float_cell, int, object, rational, rational_float, uint, Report};
use crate::CliError;

fn usage<T>(result: Result<T, String>) -> Result<T, CliError> {
    result.map_err(CliError::Usage)
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Failure(e.to_string()))
}

fn params_json(params: &SelfSimilarParams) -> Value {
    object([
        ("h", int(params.initial_height())),
        ("q", Value::from(params.similarity())),
        ("r", Value::from(params.cuts())),
        ("s", Value::from(params.spacer_multipliers().to_vec())),
        ("base_width", rational(params.base_width())),
    ])
}

fn level_set_json(set: &LevelSet) -> Value {
    object([
        ("stage", Value::from(set.stage())),
        (
            "levels",
            Value::Array(set.indices().iter().map(int).collect()),
        ),
    ])
}

pub fn run(cli: &Cli, config: &RunConfig) -> Result<Report, CliError> {
    match &cli.command {
        Command::Build { stage, .. } => build(config, *stage),
        Command::Corr { set_a, set_b, .. } => corr(config, set_a, set_b.as_deref()),
        Command::Scan {
            pairs,
            times,
            m_max,
            shift_min,
            shift_max,
            tensor,
            ..
        } => {
            if shift_min > shift_max {
                return Err(CliError::Usage("--shift-min exceeds --shift-max".into()));
            }
            scan(
                config,
                pairs,
                times,
                *m_max,
                *shift_min..=*shift_max,
                *tensor,
            )
        }
        Command::Spectrum { set_a, grid, .. } => spectrum(config, set_a, *grid),
        Command::Qinv {
            set_a,
            grid,
            rotations,
            rotation_base,
            floor,
            ..
        } => {
            let base = rotation_base.unwrap_or(config.params().similarity());
            qinv(config, set_a, *grid, base, *rotations, *floor)
        }
        Command::Check { stage, .. } => check(config, *stage),
        Command::Components { stage, .. } => components(config, *stage),
        Command::Flow { command } => flow(config, command),
        Command::Times { q, p, i_max } => times(*q, *p, *i_max),
        Command::Collide { m, n, s, p, bound } => collide(*m, *n, *s, *p, *bound),
        Command::Pisot { poly, .. } => pisot(poly, config.n_max as u32),
        Command::Fock { expr, exclude_zero } => fock(expr, *exclude_zero),
    }
}

fn build(config: &RunConfig, stage: u32) -> Result<Report, CliError> {
    let layout = config
        .params()
        .build_stage(stage)
        .map_err(CliError::usage)?;
    let mut rows = Vec::new();
    let column_height = layout
        .column_height
        .clone()
        .unwrap_or_else(|| layout.height.clone());
    let columns: Vec<Value> = layout
        .column_offsets
        .iter()
        .map(|c| {
            let end = c + &column_height;
            rows.push(vec!["column".into(), c.to_string(), end.to_string()]);
            Value::Array(vec![int(c), int(&end)])
        })
        .collect();
    let spacers: Vec<Value> = layout
        .spacers
        .iter()
        .map(|(a, b)| {
            rows.push(vec!["spacer".into(), a.to_string(), b.to_string()]);
            Value::Array(vec![int(a), int(b)])
        })
        .collect();
    rows.sort_by_key(|row| row[1].parse::<BigInt>().ok());
    let json = object([
        ("params", params_json(config.params())),
        ("stage", Value::from(layout.stage)),
        ("height", int(&layout.height)),
        ("width", rational(&layout.width)),
        ("width_float", rational_float(&layout.width)),
        (
            "column_offsets",
            Value::Array(layout.column_offsets.iter().map(int).collect()),
        ),
        (
            "column_height",
            layout.column_height.as_ref().map_or(Value::Null, int),
        ),
        ("columns", Value::Array(columns)),
        ("spacers", Value::Array(spacers)),
    ]);
    Ok(Report {
        json,
        header: vec!["kind", "start", "end"],
        rows,
    })
}

fn corr(config: &RunConfig, set_a: &str, set_b: Option<&str>) -> Result<Report, CliError> {
    let a = usage(literal::level_set(set_a))?;
    let b = match set_b {
        Some(text) => usage(literal::level_set(text))?,
        None => a.clone(),
    };
    let seq = correlation_sequence(config.params(), &a, &b, config.n_max, config.stage_cap)?;
    let mut rows = Vec::with_capacity(seq.values.len());
    let values: Vec<Value> = seq
        .values
        .iter()
        .enumerate()
        .map(|(n, v)| {
            rows.push(vec![
                n.to_string(),
                ratio::to_string(v),
                float_cell(ratio::to_f64(v)),
            ]);
            object([
                ("n", Value::from(n)),
                ("value", rational(v)),
                ("float", rational_float(v)),
            ])
        })
        .collect();
    let json = object([
        ("params", params_json(config.params())),
        ("set_a", level_set_json(&a)),
        ("set_b", level_set_json(&b)),
        ("n_max", Value::from(config.n_max)),
        ("values", Value::Array(values)),
    ]);
    Ok(Report {
        json,
        header: vec!["n", "value", "float"],
        rows,
    })
}

fn parse_pair(text: &str) -> Result<(LevelSet, LevelSet), String> {
    match text.split_once('/') {
        Some((a, b)) => Ok((literal::level_set(a)?, literal::level_set(b)?)),
        None => {
            let a = literal::level_set(text)?;
            Ok((a.clone(), a))
        }
    }
}

fn scan(
    config: &RunConfig,
    pairs: &[String],
    times: &str,
    m_max: u32,
    shifts: std::ops::RangeInclusive<i64>,
    tensor: bool,
) -> Result<Report, CliError> {
    let pairs = usage(
        pairs
            .iter()
            .map(|p| parse_pair(p))
            .collect::<Result<Vec<_>, _>>(),
    )?;
    let times: Vec<i64> = usage(literal::int_list(times))?;
    let source = TowerPairs {
        params: config.params(),
        pairs: &pairs,
        stage_cap: config.stage_cap,
    };
    let scan_chunk = |chunk: &[i64]| -> Result<ScanReport, selfsim_core::Error> {
        if tensor {
            let product = TensorPairs {
                left: source.clone(),
                right: source.clone(),
            };
            weak_limit_scan(&product, chunk, m_max, shifts.clone())
        } else {
            weak_limit_scan(&source, chunk, m_max, shifts.clone())
        }
    };
    // one time per task; results are merged back in input order
    let per_time: Vec<ScanReport> = pool(config.jobs)?.install(|| {
        times
            .par_iter()
            .map(|t| scan_chunk(std::slice::from_ref(t)))
            .collect::<Result<_, _>>()
    })?;

    let mut rows = Vec::new();
    let mut entries = Vec::new();
    for (time, report) in times.iter().zip(&per_time) {
        match report.hits.first() {
            Some(hit) => {
                rows.push(vec![
                    time.to_string(),
                    hit.exponent.to_string(),
                    hit.shift.to_string(),
                    ratio::to_string(&hit.residual),
                    float_cell(ratio::to_f64(&hit.residual)),
                ]);
                entries.push(object([
                    ("time", Value::from(*time)),
                    ("zero_limit", Value::Bool(false)),
                    ("exponent", Value::from(hit.exponent)),
                    ("shift", Value::from(hit.shift)),
                    (
                        "coefficient",
                        rational(&ratio::inverse_power_of_two(hit.exponent)),
                    ),
                    ("residual", rational(&hit.residual)),
                    ("residual_float", rational_float(&hit.residual)),
                    (
                        "pair_residuals",
                        Value::Array(hit.pair_residuals.iter().map(rational).collect()),
                    ),
                ]));
            }
            None => {
                rows.push(vec![
                    time.to_string(),
                    "zero".into(),
                    "zero".into(),
                    "0/1".into(),
                    "0.0".into(),
                ]);
                entries.push(object([
                    ("time", Value::from(*time)),
                    ("zero_limit", Value::Bool(true)),
                ]));
            }
        }
    }
    let json = object([
        ("params", params_json(config.params())),
        (
            "pairs",
            Value::Array(
                pairs
                    .iter()
                    .map(|(a, b)| Value::Array(vec![level_set_json(a), level_set_json(b)]))
                    .collect(),
            ),
        ),
        ("tensor", Value::Bool(tensor)),
        ("m_max", Value::from(m_max)),
        (
            "shifts",
            Value::Array(vec![
                Value::from(*shifts.start()),
                Value::from(*shifts.end()),
            ]),
        ),
        ("results", Value::Array(entries)),
    ]);
    Ok(Report {
        json,
        header: vec!["time", "exponent", "shift", "residual", "residual_float"],
        rows,
    })
}

fn autocorrelation(
    config: &RunConfig,
    set_a: &str,
) -> Result<selfsim_core::spectral::CorrelationSeq, CliError> {
    let a = usage(literal::level_set(set_a))?;
    Ok(correlation_sequence(
        config.params(),
        &a,
        &a,
        config.n_max,
        config.stage_cap,
    )?)
}

fn spectrum(config: &RunConfig, set_a: &str, grid: usize) -> Result<Report, CliError> {
    let seq = autocorrelation(config, set_a)?;
    let density = fejer_density_of(&seq, grid).map_err(CliError::usage)?;
    let step = std::f64::consts::TAU / grid as f64;
    let rows = density
        .samples
        .iter()
        .enumerate()
        .map(|(g, f)| vec![g.to_string(), float_cell(g as f64 * step), float_cell(*f)])
        .collect();
    let json = object([
        ("params", params_json(config.params())),
        ("set_a", level_set_json(&seq.set_a)),
        ("order", Value::from(density.order)),
        ("grid", Value::from(density.grid())),
        ("a0", rational(&seq.values[0])),
        ("total_mass", float(density.total_mass())),
        ("min", float(density.min())),
        ("max", float(density.max())),
        (
            "samples",
            Value::Array(density.samples.iter().map(|f| float(*f)).collect()),
        ),
    ]);
    Ok(Report {
        json,
        header: vec!["g", "theta", "density"],
        rows,
    })
}

fn qinv(
    config: &RunConfig,
    set_a: &str,
    grid: usize,
    base: u64,
    rotations: u32,
    floor: f64,
) -> Result<Report, CliError> {
    if !(0.0..1.0).contains(&floor) {
        return Err(CliError::Usage("--floor must lie in [0, 1)".into()));
    }
    let seq = autocorrelation(config, set_a)?;
    let density = fejer_density_of(&seq, grid).map_err(CliError::usage)?;
    let report = quasi_invariance_report(&density, base, rotations, floor * density.max())
        .map_err(CliError::usage)?;
    let opt = |v: Option<f64>| v.map_or(Value::Null, float);
    let cell = |v: Option<f64>| v.map_or(String::new(), float_cell);
    let rows = vec![vec![
        report.p.to_string(),
        report.rotations.to_string(),
        report.step.to_string(),
        report.considered.to_string(),
        report.degenerate.to_string(),
        cell(report.min_ratio),
        cell(report.max_ratio),
        cell(report.median_ratio),
    ]];
    let json = object([
        ("params", params_json(config.params())),
        ("set_a", level_set_json(&seq.set_a)),
        ("grid", Value::from(grid)),
        ("p", Value::from(report.p)),
        ("rotations", Value::from(report.rotations)),
        ("step", Value::from(report.step)),
        ("floor", float(report.floor)),
        ("considered", Value::from(report.considered)),
        ("degenerate", Value::from(report.degenerate)),
        ("flagged", Value::Bool(report.flagged())),
        ("min_ratio", opt(report.min_ratio)),
        ("max_ratio", opt(report.max_ratio)),
        ("median_ratio", opt(report.median_ratio)),
    ]);
    let header = vec![
        "p",
        "rotations",
        "step",
        "considered",
        "degenerate",
        "min_ratio",
        "max_ratio",
        "median_ratio",
    ];
    Ok(Report { json, header, rows })
}

fn check(config: &RunConfig, stage: u32) -> Result<Report, CliError> {
    if stage == 0 {
        return Err(CliError::Usage("--stage must be at least 1".into()));
    }
    let report = conjugacy_check(config.params(), stage)?;
    let failure = report.first_failure.clone().unwrap_or_default();
    let rows = vec![vec![
        report.stage.to_string(),
        report.checks_attempted.to_string(),
        report.checks_passed.to_string(),
        report.skipped.to_string(),
        failure,
    ]];
    let json = object([
        ("params", params_json(config.params())),
        ("stage", Value::from(report.stage)),
        ("attempted", Value::from(report.checks_attempted)),
        ("passed", Value::from(report.checks_passed)),
        ("skipped", Value::from(report.skipped)),
        ("all_passed", Value::Bool(report.all_passed())),
        (
            "first_failure",
            report.first_failure.map_or(Value::Null, Value::String),
        ),
    ]);
    Ok(Report {
        json,
        header: vec!["stage", "attempted", "passed", "skipped", "first_failure"],
        rows,
    })
}

fn components(config: &RunConfig, stage: u32) -> Result<Report, CliError> {
    if stage == 0 {
        return Err(CliError::Usage("--stage must be at least 1".into()));
    }
    let rows_in = component_discrepancies(config.params(), stage, config.stage_cap)?;
    let mut rows = Vec::new();
    let entries = rows_in
        .iter()
        .map(|d| {
            let total = d.total();
            rows.push(vec![
                d.component.to_string(),
                ratio::to_string(&d.gained),
                ratio::to_string(&d.lost),
                ratio::to_string(&total),
            ]);
            object([
                ("component", Value::from(d.component)),
                ("gained", rational(&d.gained)),
                ("lost", rational(&d.lost)),
                ("total", rational(&total)),
                ("total_float", rational_float(&total)),
            ])
        })
        .collect();
    let json = object([
        ("params", params_json(config.params())),
        ("stage", Value::from(stage)),
        ("width", rational(&config.params().width(stage))),
        ("components", Value::Array(entries)),
    ]);
    Ok(Report {
        json,
        header: vec!["component", "gained", "lost", "total"],
        rows,
    })
}

fn flow_params(q: &str) -> Result<FlowParams, CliError> {
    FlowParams::new(usage(literal::rational(q))?).map_err(CliError::usage)
}

fn flow(config: &RunConfig, command: &FlowCommand) -> Result<Report, CliError> {
    match command {
        FlowCommand::Corr {
            q, set_a, set_b, t, ..
        } => {
            let flow = flow_params(q)?;
            let a = match set_a {
                Some(text) => usage(literal::rect_set(text))?,
                None => flow.tower(1),
            };
            let b = match set_b {
                Some(text) => usage(literal::rect_set(text))?,
                None => a.clone(),
            };
            flow.validate_set(&a).map_err(CliError::usage)?;
            flow.validate_set(&b).map_err(CliError::usage)?;
            let times = usage(literal::rational_list(t))?;
            let values: Vec<BigRational> = pool(config.jobs)?.install(|| {
                times
                    .par_iter()
                    .map(|t| flow.flow_correlation(&a, &b, t, config.stage_cap))
                    .collect::<Result<_, _>>()
            })?;
            let mut rows = Vec::new();
            let entries = times
                .iter()
                .zip(&values)
                .map(|(t, v)| {
                    rows.push(vec![
                        ratio::to_string(t),
                        ratio::to_string(v),
                        float_cell(ratio::to_f64(v)),
                    ]);
                    object([
                        ("t", rational(t)),
                        ("value", rational(v)),
                        ("float", rational_float(v)),
                    ])
                })
                .collect();
            let json = object([("q", rational(flow.q())), ("values", Value::Array(entries))]);
            Ok(Report {
                json,
                header: vec!["t", "value", "float"],
                rows,
            })
        }
        FlowCommand::Check {
            q,
            t,
            samples,
            stage,
            ..
        } => {
            let flow = flow_params(q)?;
            if *stage < 2 {
                return Err(CliError::Usage(
                    "the similarity map needs --stage of at least 2".into(),
                ));
            }
            let points = flow.grid_samples(*stage, *samples);
            let times = usage(literal::rational_list(t))?;
            let mut rows = Vec::new();
            let mut entries = Vec::new();
            for t in &times {
                let report = flow.flow_conjugacy_check(t, &points, config.stage_cap)?;
                rows.push(vec![
                    ratio::to_string(t),
                    report.attempted.to_string(),
                    report.passed.to_string(),
                    report.first_failure.clone().unwrap_or_default(),
                ]);
                entries.push(object([
                    ("t", rational(t)),
                    ("attempted", Value::from(report.attempted)),
                    ("passed", Value::from(report.passed)),
                    ("all_passed", Value::Bool(report.all_passed())),
                    (
                        "first_failure",
                        report.first_failure.map_or(Value::Null, Value::String),
                    ),
                ]));
            }
            let json = object([
                ("q", rational(flow.q())),
                ("stage", Value::from(*stage)),
                ("checks", Value::Array(entries)),
            ]);
            Ok(Report {
                json,
                header: vec!["t", "attempted", "passed", "first_failure"],
                rows,
            })
        }
    }
}

fn times(q: u64, p: u64, i_max: u32) -> Result<Report, CliError> {
    let report = weak_limit_times(q, p, i_max).map_err(CliError::usage)?;
    let mut rows = Vec::new();
    let entries = report
        .entries
        .iter()
        .map(|e| {
            let (exponent, n, s) = e.reduced();
            rows.push(vec![
                e.i.to_string(),
                e.n.to_string(),
                e.s.to_string(),
                exponent.to_string(),
                n.to_string(),
                s.to_string(),
            ]);
            let reduction = e.reduction.as_ref().map_or(Value::Null, |r| {
                object([
                    ("power", Value::from(r.power)),
                    ("exponent", Value::from(r.exponent)),
                    ("n", int(&r.n)),
                    ("s", Value::from(r.s)),
                ])
            });
            object([
                ("i", Value::from(e.i)),
                ("n", int(&e.n)),
                ("s", Value::from(e.s)),
                ("reduction", reduction),
            ])
        })
        .collect();
    let json = object([
        ("q", Value::from(q)),
        ("p", Value::from(p)),
        ("entries", Value::Array(entries)),
    ]);
    Ok(Report {
        json,
        header: vec!["i", "n", "s", "reduced_exponent", "reduced_n", "reduced_s"],
        rows,
    })
}

fn collide(m: u64, n: u64, s: i64, p: u64, bound: u32) -> Result<Report, CliError> {
    let report = intersection_finite(m, n, s, p, bound).map_err(CliError::usage)?;
    let rows = report
        .collisions
        .iter()
        .map(|(j, i)| vec![j.to_string(), i.to_string()])
        .collect();
    let json = object([
        ("m", Value::from(m)),
        ("n", Value::from(n)),
        ("s", Value::from(s)),
        ("p", Value::from(p)),
        ("bound", Value::from(report.bound)),
        ("settled", Value::Bool(report.settled)),
        ("empty", Value::Bool(report.collisions.is_empty())),
        (
            "collisions",
            Value::Array(
                report
                    .collisions
                    .iter()
                    .map(|(j, i)| Value::from(vec![*j, *i]))
                    .collect(),
            ),
        ),
    ]);
    Ok(Report {
        json,
        header: vec!["j", "i"],
        rows,
    })
}

fn pisot(poly: &str, n_max: u32) -> Result<Report, CliError> {
    let coeffs: Vec<BigInt> = usage(literal::int_list(poly))?;
    let spec = PisotSpec::new(coeffs).map_err(CliError::usage)?;
    let rows_in = pisot_distance(&spec, n_max).map_err(CliError::usage)?;
    let mut rows = Vec::new();
    let entries = rows_in
        .iter()
        .map(|row| {
            rows.push(vec![
                row.n.to_string(),
                row.trace.to_string(),
                row.nearest.to_string(),
                float_cell(row.distance),
            ]);
            object([
                ("n", Value::from(row.n)),
                ("trace", int(&row.trace)),
                ("nearest", int(&row.nearest)),
                ("distance", float(row.distance)),
            ])
        })
        .collect();
    let json = object([
        (
            "coefficients",
            Value::Array(spec.coefficients().iter().map(int).collect()),
        ),
        ("rows", Value::Array(entries)),
    ]);
    Ok(Report {
        json,
        header: vec!["n", "trace", "nearest", "distance"],
        rows,
    })
}

fn fock(expr: &str, exclude_zero: bool) -> Result<Report, CliError> {
    let spectrum = usage(fock_expr::parse(expr))?;
    let mut rows = Vec::new();
    let entries = spectrum
        .iter()
        .map(|(theta, count)| {
            rows.push(vec![ratio::to_string(theta), count.to_string()]);
            object([("theta", rational(theta)), ("multiplicity", uint(count))])
        })
        .collect();
    let json = object([
        ("expr", Value::String(expr.to_string())),
        ("exclude_zero", Value::Bool(exclude_zero)),
        ("dim", uint(&spectrum.dim())),
        ("distinct", Value::from(spectrum.distinct())),
        ("max_multiplicity", uint(&spectrum.max_multiplicity())),
        (
            "multiplicity_set",
            Value::Array(
                fock_expr::multiplicities(&spectrum, exclude_zero)
                    .iter()
                    .map(uint)
                    .collect(),
            ),
        ),
        ("spectrum", Value::Array(entries)),
    ]);
    Ok(Report {
        json,
        header: vec!["theta", "multiplicity"],
        rows,
    })
}
