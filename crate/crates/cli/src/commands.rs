//! Implementations of the subcommands.

use std::collections::BTreeMap;
use std::process::ExitCode;

use rayon::prelude::*;
use serde::Serialize;

use circulant_core::ppt::{MaskVerdict, PptReport};
use circulant_core::zoo::ThresholdInfo;
use circulant_core::{
    bisect_threshold, io as state_io, is_psd, min_eigenvalue_over_masks, oracle_compare,
    partial_transpose, ppt_check, ppt_check_all, CirculantState, ComplexMatrix, DimsProfile,
    FamilyKind, PsdTolerance, Scheme, ThresholdEstimate, TransposeMask, ZooState, ORACLE_TOL,
};

use crate::{Command, Format, OutputArgs, StateArgs};

pub(crate) type CliResult<T> = Result<T, Box<dyn std::error::Error>>;

/// Schema version stamped into every JSON report.
const REPORT_SCHEMA_VERSION: u32 = 1;

/// The CLI accepts local dimensions up to 4 and total dimensions up to 256.
const MAX_LOCAL_DIM: usize = 4;
const MAX_TOTAL_DIM: usize = 256;

#[derive(Serialize)]
struct RunHeader {
    schema_version: u32,
    tool_version: &'static str,
    command: &'static str,
    psd_tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

fn header(command: &'static str, tol: PsdTolerance, seed: Option<u64>) -> RunHeader {
    RunHeader {
        schema_version: REPORT_SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION"),
        command,
        psd_tolerance: tol.relative,
        seed,
    }
}

fn psd_tolerance(tol: Option<f64>) -> PsdTolerance {
    tol.map(PsdTolerance::new).unwrap_or_default()
}

fn guard_dims(d: usize, n: usize) -> CliResult<DimsProfile> {
    if !(2..=MAX_LOCAL_DIM).contains(&d) {
        return Err(format!("local dimension d = {d} outside 2..={MAX_LOCAL_DIM}").into());
    }
    if n < 2 {
        return Err(format!("factor count n = {n} must be at least 2").into());
    }
    let total = d.checked_pow(n as u32).unwrap_or(usize::MAX);
    if total > MAX_TOTAL_DIM {
        return Err(format!("refused: d^n = {d}^{n} exceeds {MAX_TOTAL_DIM}").into());
    }
    Ok(DimsProfile::new(d, n)?)
}

/// A state resolved from the CLI surface: block form or a dense fixture.
enum Resolved {
    Block(CirculantState),
    Dense(ComplexMatrix, DimsProfile),
}

impl Resolved {
    fn dims(&self) -> DimsProfile {
        match self {
            Resolved::Block(s) => s.dims(),
            Resolved::Dense(_, dims) => *dims,
        }
    }
}

fn resolve_zoo(args: &StateArgs, name: &str) -> CliResult<(String, Resolved)> {
    let kind = FamilyKind::lookup(name)?;
    let (default_d, default_n) = kind.default_dims();
    let d = args.d.unwrap_or(default_d);
    let n = args.n.unwrap_or(default_n);
    guard_dims(d, n)?;
    let params = args.param_map();
    let source = if params.is_empty() {
        format!("zoo:{name}(d={d}, n={n})")
    } else {
        let rendered: Vec<String> = params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("zoo:{name}(d={d}, n={n}, {})", rendered.join(", "))
    };
    let resolved = match kind.build(d, n, &params)? {
        ZooState::Circulant(state) => Resolved::Block(state),
        ZooState::Dense(rho) => {
            let dims = DimsProfile::new(d, n)?;
            Resolved::Dense(rho, dims)
        }
    };
    Ok((source, resolved))
}

fn resolve_state(args: &StateArgs) -> CliResult<(String, Resolved)> {
    match (&args.zoo, &args.file) {
        (Some(name), None) => resolve_zoo(args, name),
        (None, Some(path)) => {
            if args.d.is_some() || args.n.is_some() || !args.params.is_empty() {
                return Err("--d/--n/--param apply to zoo states only".into());
            }
            let text = std::fs::read_to_string(path)?;
            let state = state_io::state_from_json(&text)?;
            guard_dims(state.dims().d(), state.dims().n())?;
            Ok((format!("file:{}", path.display()), Resolved::Block(state)))
        }
        _ => Err("pass exactly one of --zoo or --file".into()),
    }
}

fn require_json(output: &OutputArgs, command: &str) -> CliResult<()> {
    if output.format == Format::Csv {
        return Err(format!("csv output is only available for sweep, not {command}").into());
    }
    Ok(())
}

fn emit(output: &OutputArgs, text: String) -> CliResult<()> {
    match &output.out {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn emit_json<T: Serialize>(output: &OutputArgs, doc: &T) -> CliResult<()> {
    emit(output, serde_json::to_string_pretty(doc)?)
}

/// Dense-route verdicts for states without a block form.
fn dense_verdict(
    rho: &ComplexMatrix,
    dims: DimsProfile,
    mask: &TransposeMask,
    tol: PsdTolerance,
) -> CliResult<MaskVerdict> {
    let transposed = partial_transpose(rho, dims, &mask.to_factor_mask())?;
    let (psd, min) = is_psd(&transposed, tol)?;
    Ok(MaskVerdict {
        mask: mask.to_string(),
        ppt: psd,
        min_eigenvalue: min,
        block_min_eigenvalues: vec![min],
        oracle_deviation: None,
        dense_fallback: true,
    })
}

fn dense_report(rho: &ComplexMatrix, dims: DimsProfile, tol: PsdTolerance) -> CliResult<PptReport> {
    let mut masks = Vec::new();
    let mut fully = true;
    let mut min_eig = f64::INFINITY;
    for mask in TransposeMask::all(dims.n() - 1) {
        let verdict = dense_verdict(rho, dims, &mask, tol)?;
        if !mask.is_zero() {
            fully &= verdict.ppt;
            min_eig = min_eig.min(verdict.min_eigenvalue);
        }
        masks.push(verdict);
    }
    Ok(PptReport {
        d: dims.d(),
        n: dims.n(),
        scheme: "dense".to_string(),
        fully_ppt: fully,
        min_eigenvalue: min_eig,
        masks,
    })
}

#[derive(Serialize)]
struct CheckDocument {
    header: RunHeader,
    source: String,
    report: PptReport,
}

fn cmd_check(
    state_args: StateArgs,
    mask: Option<String>,
    masks: Option<String>,
    tol: Option<f64>,
    oracle: bool,
    output: OutputArgs,
) -> CliResult<ExitCode> {
    require_json(&output, "check")?;
    if let Some(selection) = &masks {
        if selection != "all" {
            return Err(format!("--masks accepts only \"all\", got {selection:?}").into());
        }
    }
    let tol = psd_tolerance(tol);
    let (source, resolved) = resolve_state(&state_args)?;
    let dims = resolved.dims();

    let report = match &mask {
        Some(bits) => {
            let mask = TransposeMask::parse(bits)?;
            if mask.len() != dims.n() - 1 {
                return Err(format!(
                    "mask {bits} has {} bits; expected {}",
                    mask.len(),
                    dims.n() - 1
                )
                .into());
            }
            let verdict = match &resolved {
                Resolved::Block(state) => {
                    let mut v = ppt_check(state, &mask, tol)?;
                    if oracle {
                        v.oracle_deviation = oracle_compare(state, &mask).ok();
                    }
                    v
                }
                Resolved::Dense(rho, dims) => dense_verdict(rho, *dims, &mask, tol)?,
            };
            let passed = verdict.ppt;
            let report = PptReport {
                d: dims.d(),
                n: dims.n(),
                scheme: match &resolved {
                    Resolved::Block(state) => match state.family() {
                        circulant_core::BlockFamily::Small(_) => "small".to_string(),
                        circulant_core::BlockFamily::Big(f) => f.scheme().to_string(),
                    },
                    Resolved::Dense(..) => "dense".to_string(),
                },
                fully_ppt: passed,
                min_eigenvalue: verdict.min_eigenvalue,
                masks: vec![verdict],
            };
            report
        }
        None => match &resolved {
            Resolved::Block(state) => ppt_check_all(state, tol, oracle)?,
            Resolved::Dense(rho, dims) => dense_report(rho, *dims, tol)?,
        },
    };

    let passed = report.fully_ppt;
    let doc = CheckDocument {
        header: header("check", tol, None),
        source,
        report,
    };
    emit_json(&output, &doc)?;
    Ok(if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

#[derive(Serialize)]
struct ThresholdDocument {
    header: RunHeader,
    family: String,
    d: usize,
    n: usize,
    param: String,
    bracket: (f64, f64),
    width_tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    expected: Option<f64>,
    estimate: ThresholdEstimate,
}

fn cmd_threshold(
    state_args: StateArgs,
    sweep_param: Option<String>,
    bracket: Option<(f64, f64)>,
    width: f64,
    tol: Option<f64>,
    output: OutputArgs,
) -> CliResult<ExitCode> {
    require_json(&output, "threshold")?;
    let name = state_args
        .zoo
        .as_deref()
        .ok_or("threshold needs a parametric family (--zoo)")?;
    let kind = FamilyKind::lookup(name)?;
    let (default_d, default_n) = kind.default_dims();
    let d = state_args.d.unwrap_or(default_d);
    let n = state_args.n.unwrap_or(default_n);
    guard_dims(d, n)?;
    let tol = psd_tolerance(tol);
    let info: Option<ThresholdInfo> = kind.threshold_info(d, n);
    let param = match sweep_param.or_else(|| info.map(|i| i.param.to_string())) {
        Some(p) => p,
        None => {
            return Err(format!(
                "family {name} has no registered threshold parameter; pass --sweep-param"
            )
            .into())
        }
    };
    let bracket = match bracket.or_else(|| info.map(|i| i.bracket)) {
        Some(b) => b,
        None => return Err("no bracket known for this family; pass --bracket lo:hi".into()),
    };
    let fixed = state_args.param_map();
    let estimate = bisect_threshold(
        |x| {
            let state = match kind.build_with(d, n, &fixed, &param, x)? {
                ZooState::Circulant(s) => s,
                ZooState::Dense(_) => {
                    return Err(circulant_core::Error::InvalidScheme {
                        reason: "dense fixtures have no parametric threshold".to_string(),
                    })
                }
            };
            min_eigenvalue_over_masks(&state, tol)
        },
        bracket.0,
        bracket.1,
        width,
    )?;
    let doc = ThresholdDocument {
        header: header("threshold", tol, None),
        family: name.to_string(),
        d,
        n,
        param,
        bracket,
        width_tolerance: width,
        expected: info.map(|i| i.expected),
        estimate,
    };
    emit_json(&output, &doc)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct SweepRow {
    params: BTreeMap<String, f64>,
    fully_ppt: bool,
    min_eigenvalue: f64,
}

#[derive(Serialize)]
struct GridSpec {
    param: String,
    lo: f64,
    hi: f64,
    count: usize,
}

#[derive(Serialize)]
struct SweepDocument {
    header: RunHeader,
    family: String,
    d: usize,
    n: usize,
    grids: Vec<GridSpec>,
    evaluated: usize,
    skipped: usize,
    rows: Vec<SweepRow>,
}

fn cmd_sweep(
    state_args: StateArgs,
    grids: Vec<(String, f64, f64, usize)>,
    tol: Option<f64>,
    output: OutputArgs,
) -> CliResult<ExitCode> {
    let name = state_args
        .zoo
        .as_deref()
        .ok_or("sweep needs a parametric family (--zoo)")?;
    let kind = FamilyKind::lookup(name)?;
    let (default_d, default_n) = kind.default_dims();
    let d = state_args.d.unwrap_or(default_d);
    let n = state_args.n.unwrap_or(default_n);
    guard_dims(d, n)?;
    let tol = psd_tolerance(tol);
    let fixed = state_args.param_map();

    // Cartesian product of the grid axes, row-major in axis order.
    let mut points: Vec<BTreeMap<String, f64>> = vec![BTreeMap::new()];
    for (axis, lo, hi, count) in &grids {
        let mut extended = Vec::with_capacity(points.len() * count);
        for point in &points {
            for i in 0..*count {
                let value = if *count == 1 {
                    *lo
                } else {
                    lo + (hi - lo) * i as f64 / (*count as f64 - 1.0)
                };
                let mut next = point.clone();
                next.insert(axis.clone(), value);
                extended.push(next);
            }
        }
        points = extended;
    }

    let results: Vec<Option<SweepRow>> = points
        .par_iter()
        .map(|point| {
            let mut merged = fixed.clone();
            for (k, v) in point {
                merged.insert(k.clone(), format!("{v:.17e}"));
            }
            let state = match kind.build(d, n, &merged) {
                Ok(ZooState::Circulant(s)) => s,
                _ => return None,
            };
            let report = ppt_check_all(&state, tol, false).ok()?;
            Some(SweepRow {
                params: point.clone(),
                fully_ppt: report.fully_ppt,
                min_eigenvalue: report.min_eigenvalue,
            })
        })
        .collect();

    let skipped = results.iter().filter(|r| r.is_none()).count();
    let rows: Vec<SweepRow> = results.into_iter().flatten().collect();

    match output.format {
        Format::Json => {
            let doc = SweepDocument {
                header: header("sweep", tol, None),
                family: name.to_string(),
                d,
                n,
                grids: grids
                    .iter()
                    .map(|(param, lo, hi, count)| GridSpec {
                        param: param.clone(),
                        lo: *lo,
                        hi: *hi,
                        count: *count,
                    })
                    .collect(),
                evaluated: rows.len(),
                skipped,
                rows,
            };
            emit_json(&output, &doc)?;
        }
        Format::Csv => {
            let axes: Vec<&String> = grids.iter().map(|(axis, ..)| axis).collect();
            let mut text = String::new();
            text.push_str(
                &axes
                    .iter()
                    .map(|a| a.as_str())
                    .collect::<Vec<_>>()
                    .join(","),
            );
            text.push_str(",min_eigenvalue,fully_ppt\n");
            for row in &rows {
                let values: Vec<String> = axes
                    .iter()
                    .map(|axis| format!("{}", row.params[axis.as_str()]))
                    .collect();
                text.push_str(&format!(
                    "{},{},{}\n",
                    values.join(","),
                    row.min_eigenvalue,
                    row.fully_ppt
                ));
            }
            emit(&output, text.trim_end().to_string())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct OracleMaskSummary {
    mask: String,
    max_deviation: f64,
}

#[derive(Serialize)]
struct OracleDocument {
    header: RunHeader,
    d: usize,
    n: usize,
    scheme: String,
    count: u64,
    tolerance: f64,
    masks: Vec<OracleMaskSummary>,
    max_deviation: f64,
    pass: bool,
}

fn cmd_oracle(
    d: usize,
    n: usize,
    count: u64,
    seed: u64,
    scheme: String,
    output: OutputArgs,
) -> CliResult<ExitCode> {
    require_json(&output, "oracle")?;
    let dims = guard_dims(d, n)?;
    enum Layout {
        Small,
        Big(Scheme),
    }
    let layout = match scheme.as_str() {
        "small" => Layout::Small,
        "sigma" => {
            if d > 2 {
                return Err(
                    "no closed-form transform to validate for the sigma scheme at d > 2".into(),
                );
            }
            Layout::Big(Scheme::Sigma)
        }
        "xi" => Layout::Big(Scheme::xi_last(dims)),
        other => return Err(format!("unknown scheme {other:?}").into()),
    };

    let masks = TransposeMask::all(n - 1);
    let per_family: Vec<Vec<f64>> = (0..count)
        .into_par_iter()
        .map(|i| {
            let family_seed = seed + i;
            let state = match &layout {
                Layout::Small => CirculantState::new(
                    circulant_core::BlockFamily::Small(
                        circulant_core::random::random_small_family(dims, family_seed)
                            .expect("valid dims"),
                    ),
                    true,
                ),
                Layout::Big(scheme) => CirculantState::new(
                    circulant_core::BlockFamily::Big(
                        circulant_core::random::random_big_family(dims, *scheme, family_seed)
                            .expect("valid dims"),
                    ),
                    true,
                ),
            };
            masks
                .iter()
                .map(|mask| oracle_compare(&state, mask).expect("transform exists"))
                .collect()
        })
        .collect();

    let mut mask_summaries = Vec::with_capacity(masks.len());
    let mut overall: f64 = 0.0;
    for (mi, mask) in masks.iter().enumerate() {
        let max = per_family
            .iter()
            .map(|devs| devs[mi])
            .fold(0.0f64, f64::max);
        overall = overall.max(max);
        mask_summaries.push(OracleMaskSummary {
            mask: mask.to_string(),
            max_deviation: max,
        });
    }
    let pass = overall <= ORACLE_TOL;
    let doc = OracleDocument {
        header: header("oracle", PsdTolerance::default(), Some(seed)),
        d,
        n,
        scheme,
        count,
        tolerance: ORACLE_TOL,
        masks: mask_summaries,
        max_deviation: overall,
        pass,
    };
    emit_json(&output, &doc)?;
    Ok(if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_export(state_args: StateArgs, out: std::path::PathBuf) -> CliResult<ExitCode> {
    let name = state_args
        .zoo
        .as_deref()
        .ok_or("export needs a zoo family (--zoo)")?;
    let (_, resolved) = resolve_zoo(&state_args, name)?;
    match resolved {
        Resolved::Block(state) => {
            std::fs::write(&out, state_io::state_to_json(&state) + "\n")?;
            eprintln!("wrote {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Resolved::Dense(..) => {
            Err(format!("family {name} is a dense fixture without a block form").into())
        }
    }
}

fn cmd_zoo() -> CliResult<ExitCode> {
    for kind in FamilyKind::all() {
        let (d, n) = kind.default_dims();
        let dims = if kind.dims_are_free() {
            format!("default d={d}, n={n} (overridable)")
        } else {
            format!("d={d}, n={n}")
        };
        println!("{:<14} {:<28} {}", kind.name(), dims, kind.summary());
    }
    Ok(ExitCode::SUCCESS)
}

pub(crate) fn run(command: Command) -> CliResult<ExitCode> {
    match command {
        Command::Check {
            state,
            mask,
            masks,
            tol,
            oracle,
            output,
        } => cmd_check(state, mask, masks, tol, oracle, output),
        Command::Threshold {
            state,
            sweep_param,
            bracket,
            width,
            tol,
            output,
        } => cmd_threshold(state, sweep_param, bracket, width, tol, output),
        Command::Sweep {
            state,
            grids,
            tol,
            output,
        } => cmd_sweep(state, grids, tol, output),
        Command::Oracle {
            d,
            n,
            count,
            seed,
            scheme,
            output,
        } => cmd_oracle(d, n, count, seed, scheme, output),
        Command::Export { state, out } => cmd_export(state, out),
        Command::Zoo => cmd_zoo(),
    }
}
