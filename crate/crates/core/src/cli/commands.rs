use num_complex::Complex64;
use serde::Serialize;

use super::config::{
    ClassifyArgs, CoeffsArgs, Common, FileConfig, GrowthArgs, ScanArgs, VerifyArgs,
};
use super::{CliError, Command, Output, Table};
use crate::acceptance;
use crate::diagnostics::{
    classify, completeness_witness_probe, default_eps_grid, frame_lower_bound_probe, growth_fit,
    minimality_divergence_probe, schauder_obstruction_report, ClassifierVerdict, GrowthFit,
    ObstructionReport, ProbeSeries, Regime, WeightedSystemSpec,
};
use crate::dual_system::{
    biorthogonality_exact, biorthogonality_from_table, dual_coefficients, Arithmetic,
    DualCoefficientTable, DualRow, ExclusionSet,
};
use crate::report::ReportDocument;

/// Biorthogonality tolerance for the float path.
const BIORTHOGONALITY_TOL: f64 = 1e-10;
const MIN_N_MAX: i64 = 64;
/// Growth fits fail when more than this share of the tail is flagged.
const FLAGGED_SATURATION: f64 = 0.5;

pub(crate) fn dispatch(
    command: &Command,
    file: &FileConfig,
    common: &Common,
) -> Result<Output, CliError> {
    match command {
        Command::Classify(a) => cmd_classify(a, file, common),
        Command::Coeffs(a) => cmd_coeffs(a, file, common),
        Command::Verify(a) => cmd_verify(a, file, common),
        Command::Scan(a) => cmd_scan(a, file, common),
        Command::Growth(a) => cmd_growth(a, file, common),
        Command::Report => cmd_report(common),
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn exclusion(flag: &Option<Vec<i64>>, file: &FileConfig) -> Result<ExclusionSet, CliError> {
    let ints = flag
        .clone()
        .or_else(|| file.exclude.clone())
        .ok_or_else(|| usage("--exclude is required"))?;
    Ok(ExclusionSet::trigonometric(&ints)?)
}

fn csv_table(
    name: &str,
    write: impl FnOnce(&mut Vec<u8>) -> crate::Result<()>,
) -> Result<Table, CliError> {
    let mut bytes = Vec::new();
    write(&mut bytes)?;
    Ok(Table {
        name: name.to_string(),
        bytes,
    })
}

fn csv_rows(name: &str, header: &[&str], rows: Vec<Vec<String>>) -> Result<Table, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(Table {
        name: name.to_string(),
        bytes,
    })
}

fn document(
    command: &str,
    input: &impl Serialize,
    common: &Common,
    results: &impl Serialize,
    failures: Vec<String>,
) -> Result<ReportDocument, CliError> {
    Ok(ReportDocument::new(
        command,
        input,
        &common.tolerance,
        results,
        failures,
    )?)
}

#[derive(Serialize)]
struct ClassifyInput {
    alpha: f64,
    m: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    exclude: Option<Vec<i64>>,
}

#[derive(Serialize)]
struct ClassifyResults {
    verdict: ClassifierVerdict,
}

fn cmd_classify(a: &ClassifyArgs, file: &FileConfig, common: &Common) -> Result<Output, CliError> {
    let alpha = a
        .alpha
        .or(file.alpha)
        .ok_or_else(|| usage("--alpha is required"))?;
    let exclude = a.exclude.clone().or_else(|| {
        if a.m.is_some() {
            None
        } else {
            file.exclude.clone()
        }
    });
    let m = match (
        a.m.or(if a.exclude.is_some() { None } else { file.m }),
        &exclude,
    ) {
        (Some(m), _) => m,
        (None, Some(ex)) => ExclusionSet::trigonometric(ex)?.m() as i64,
        (None, None) => return Err(usage("one of --m or --exclude is required")),
    };
    if m < 1 {
        return Err(usage(format!("--m must be at least 1, got {m}")));
    }
    let verdict = classify(alpha, m as usize)?;
    let input = ClassifyInput {
        alpha,
        m: m as usize,
        exclude,
    };
    let table = csv_rows(
        "classify",
        &["alpha", "m", "regime", "window_lower", "window_upper"],
        vec![vec![
            alpha.to_string(),
            m.to_string(),
            format!("{:?}", verdict.regime),
            verdict.window.lower.to_string(),
            verdict.window.upper.to_string(),
        ]],
    )?;
    Ok(Output {
        report: document(
            "classify",
            &input,
            common,
            &ClassifyResults { verdict },
            vec![],
        )?,
        tables: vec![table],
        log: vec![format!(
            "{:?} on [{}, {})",
            verdict.regime, verdict.window.lower, verdict.window.upper
        )],
    })
}

#[derive(Serialize)]
struct TableInput {
    exclude: Vec<i64>,
    window: i64,
    exact: bool,
}

fn window_arg(flag: Option<i64>, file: &FileConfig, a: &ExclusionSet) -> Result<i64, CliError> {
    let n = flag
        .or(file.window)
        .ok_or_else(|| usage("--window is required"))?;
    if n < a.max_abs_index() {
        return Err(usage(format!(
            "--window {n} must be at least max|exclude| = {}",
            a.max_abs_index()
        )));
    }
    Ok(n)
}

#[derive(Serialize)]
struct CoeffsResults<'a> {
    m: usize,
    rows: usize,
    arithmetic: Arithmetic,
    max_residual: f64,
    conditioning_warnings: usize,
    coefficients: Vec<&'a DualRow>,
}

fn cmd_coeffs(a: &CoeffsArgs, file: &FileConfig, common: &Common) -> Result<Output, CliError> {
    let ex = exclusion(&a.exclude, file)?;
    let window = window_arg(a.window, file, &ex)?;
    let exact = a.exact || file.exact.unwrap_or(false);
    let arithmetic = if exact {
        Arithmetic::Exact
    } else {
        Arithmetic::Float
    };
    let table = dual_coefficients(&ex, -window..=window, arithmetic)?;
    let results = CoeffsResults {
        m: ex.m(),
        rows: table.len(),
        arithmetic,
        max_residual: table.max_residual(),
        conditioning_warnings: table.warning_count(),
        coefficients: table.rows().collect(),
    };
    let input = TableInput {
        exclude: ex.indices().to_vec(),
        window,
        exact,
    };
    let csv = csv_table("coeffs", |w| table.write_csv(w))?;
    let log = vec![format!(
        "{} rows over [-{window}, {window}], max residual {:e}, {} conditioning warnings",
        table.len(),
        results.max_residual,
        results.conditioning_warnings
    )];
    Ok(Output {
        report: document("coeffs", &input, common, &results, vec![])?,
        tables: vec![csv],
        log,
    })
}

#[derive(Serialize)]
struct VerifyInput {
    exclude: Vec<i64>,
    window: i64,
    exact: bool,
    max_m_check: u32,
}

#[derive(Serialize)]
struct VerifyRow {
    n: i64,
    vanishing_order: u32,
    max_biorthogonality_deviation: f64,
}

#[derive(Serialize)]
struct VerifyResults {
    m: usize,
    expected_order: usize,
    biorthogonality_tolerance: f64,
    max_biorthogonality_deviation: f64,
    orders: Vec<VerifyRow>,
}

fn cmd_verify(a: &VerifyArgs, file: &FileConfig, common: &Common) -> Result<Output, CliError> {
    let ex = exclusion(&a.exclude, file)?;
    let window = window_arg(a.window, file, &ex)?;
    let exact = a.exact || file.exact.unwrap_or(false);
    let m = ex.m();
    let max_order = a.max_m_check.or(file.max_m_check).unwrap_or(m as u32 + 2);
    if max_order as usize <= m {
        return Err(usage(format!("--max-m-check must exceed M = {m}")));
    }
    let arithmetic = if exact {
        Arithmetic::Exact
    } else {
        Arithmetic::Float
    };
    let table = dual_coefficients(&ex, -window..=window, arithmetic)?;
    let indices: Vec<i64> = table.rows().map(|r| r.n).collect();
    let mut rows = Vec::with_capacity(indices.len());
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for &n in &indices {
        let order = if exact {
            table.f_n_exact(n)?.vanishing_order(max_order)?
        } else {
            table.build_f_n(n)?.vanishing_order(max_order)?
        };
        if order as usize != m {
            failures.push(format!("n = {n}: vanishing order {order}, expected {m}"));
        }
        let mut row_worst = 0.0f64;
        for &k in &indices {
            let delta = if k == n { 1.0 } else { 0.0 };
            let dev = if exact {
                let v = biorthogonality_exact(&ex, n, k)?;
                (v.to_f64() - delta).abs()
            } else {
                (biorthogonality_from_table(&table, n, k)? - Complex64::new(delta, 0.0)).norm()
            };
            row_worst = row_worst.max(dev);
        }
        worst = worst.max(row_worst);
        rows.push(VerifyRow {
            n,
            vanishing_order: order,
            max_biorthogonality_deviation: row_worst,
        });
    }
    let tol = if exact { 0.0 } else { BIORTHOGONALITY_TOL };
    if worst > tol {
        failures.push(format!(
            "biorthogonality deviation {worst:e} exceeds {tol:e}"
        ));
    }
    let csv = csv_rows(
        "verify",
        &["n", "vanishing_order", "max_biorthogonality_deviation"],
        rows.iter()
            .map(|r| {
                vec![
                    r.n.to_string(),
                    r.vanishing_order.to_string(),
                    r.max_biorthogonality_deviation.to_string(),
                ]
            })
            .collect(),
    )?;
    let results = VerifyResults {
        m,
        expected_order: m,
        biorthogonality_tolerance: tol,
        max_biorthogonality_deviation: worst,
        orders: rows,
    };
    let input = VerifyInput {
        exclude: ex.indices().to_vec(),
        window,
        exact,
        max_m_check: max_order,
    };
    let log = vec![format!(
        "{}: {} indices, max biorthogonality deviation {worst:e}",
        if failures.is_empty() { "pass" } else { "FAIL" },
        indices.len()
    )];
    Ok(Output {
        report: document("verify", &input, common, &results, failures)?,
        tables: vec![csv],
        log,
    })
}

/// Parses `lo:hi:step` or `a,b,c`. Range points are rounded to 1e-12 so
/// window endpoints land exactly.
pub(crate) fn parse_alpha_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| usage(format!("bad number '{t}' in --alpha-grid")))
    };
    let grid: Vec<f64> = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(usage("--alpha-grid range must be lo:hi:step"));
        }
        let (lo, hi, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if !(step > 0.0) || hi < lo {
            return Err(usage("--alpha-grid needs lo <= hi and step > 0"));
        }
        let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
        if count > 10_000 {
            return Err(usage("--alpha-grid has more than 10000 points"));
        }
        (0..count)
            .map(|k| ((lo + k as f64 * step) * 1e12).round() / 1e12)
            .collect()
    } else {
        s.split(',').map(num).collect::<Result<_, _>>()?
    };
    if grid.is_empty() || grid.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
        return Err(usage("--alpha-grid values must be positive"));
    }
    Ok(grid)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
enum Probe {
    Minimality,
    Witness,
    Frame,
}

fn parse_probes(list: &[String]) -> Result<Vec<Probe>, CliError> {
    let mut out = Vec::new();
    for p in list {
        let probe = match p.trim() {
            "minimality" => Probe::Minimality,
            "witness" => Probe::Witness,
            "frame" => Probe::Frame,
            other => {
                return Err(usage(format!(
                    "unknown probe '{other}' (minimality, witness, frame)"
                )))
            }
        };
        if !out.contains(&probe) {
            out.push(probe);
        }
    }
    if out.is_empty() {
        return Err(usage("--probes must name at least one probe"));
    }
    Ok(out)
}

#[derive(Serialize)]
struct ScanInput {
    exclude: Vec<i64>,
    alpha_grid: Vec<f64>,
    probes: Vec<Probe>,
    frame_grid: Vec<usize>,
    minimality_index: i64,
}

#[derive(Serialize)]
struct ScanPoint {
    alpha: f64,
    verdict: ClassifierVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    minimality: Option<ProbeSeries>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<ProbeSeries>,
    #[serde(skip_serializing_if = "Option::is_none")]
    frame: Option<ProbeSeries>,
    consistent: bool,
}

#[derive(Serialize)]
struct ScanResults {
    points: Vec<ScanPoint>,
    inconsistencies: usize,
}

fn cmd_scan(a: &ScanArgs, file: &FileConfig, common: &Common) -> Result<Output, CliError> {
    let ex = exclusion(&a.exclude, file)?;
    let m = ex.m() as f64;
    let grid = match a.alpha_grid.clone().or_else(|| file.alpha_grid.clone()) {
        Some(s) => parse_alpha_grid(&s)?,
        None => parse_alpha_grid(&format!("{}:{}:0.25", (m - 1.5).max(0.25), m + 1.5))?,
    };
    let probes = match a.probes.clone().or_else(|| file.probes.clone()) {
        Some(list) => parse_probes(&list)?,
        None => vec![Probe::Minimality, Probe::Witness],
    };
    let frame_max = a.window.or(file.window).unwrap_or(64);
    if frame_max < 16 {
        return Err(usage("--window for the frame probe must be at least 16"));
    }
    let frame_grid: Vec<usize> = std::iter::successors(Some(16usize), |n| Some(n * 2))
        .take_while(|n| *n as i64 <= frame_max)
        .collect();
    let n_probe = (1..).find(|n| !ex.contains(*n)).expect("A is finite");
    let eps = default_eps_grid();

    let mut points = Vec::new();
    let mut tables = Vec::new();
    let mut failures = Vec::new();
    for (idx, &alpha) in grid.iter().enumerate() {
        let spec = WeightedSystemSpec::new(alpha, ex.clone())?;
        let verdict = spec.verdict();
        let mut point = ScanPoint {
            alpha,
            verdict,
            minimality: None,
            witness: None,
            frame: None,
            consistent: true,
        };
        for probe in &probes {
            match probe {
                Probe::Minimality => {
                    let s = minimality_divergence_probe(&spec, n_probe, &eps, &common.tolerance)?;
                    if s.convergent != verdict.regime.is_minimal() {
                        point.consistent = false;
                        failures.push(format!(
                            "alpha = {alpha}: minimality probe disagrees with {:?}",
                            verdict.regime
                        ));
                    }
                    point.minimality = Some(s);
                }
                Probe::Witness => {
                    let s = completeness_witness_probe(&spec, &eps, &common.tolerance)?;
                    if s.convergent == verdict.regime.is_complete() {
                        point.consistent = false;
                        failures.push(format!(
                            "alpha = {alpha}: witness probe disagrees with {:?}",
                            verdict.regime
                        ));
                    }
                    point.witness = Some(s);
                }
                Probe::Frame if verdict.regime == Regime::Exact => {
                    point.frame = Some(frame_lower_bound_probe(
                        &spec,
                        &frame_grid,
                        &common.tolerance,
                    )?);
                }
                Probe::Frame => {}
            }
        }
        for (label, series) in [
            ("minimality", &point.minimality),
            ("witness", &point.witness),
            ("frame", &point.frame),
        ] {
            if let Some(s) = series {
                tables.push(csv_table(&format!("scan_{idx:03}_{label}"), |w| {
                    s.write_csv(w)
                })?);
            }
        }
        points.push(point);
    }
    let summary = csv_rows(
        "scan",
        &[
            "alpha",
            "regime",
            "minimality_exponent",
            "witness_exponent",
            "frame_last",
            "consistent",
        ],
        points
            .iter()
            .map(|p| {
                let fit = |s: &Option<ProbeSeries>| {
                    s.as_ref()
                        .and_then(|s| s.fitted_exponent)
                        .map(|x| x.to_string())
                        .unwrap_or_default()
                };
                let last = p
                    .frame
                    .as_ref()
                    .and_then(|s| s.values.last())
                    .map(|x| x.to_string())
                    .unwrap_or_default();
                vec![
                    p.alpha.to_string(),
                    format!("{:?}", p.verdict.regime),
                    fit(&p.minimality),
                    fit(&p.witness),
                    last,
                    p.consistent.to_string(),
                ]
            })
            .collect(),
    )?;
    tables.insert(0, summary);
    let inconsistencies = points.iter().filter(|p| !p.consistent).count();
    let input = ScanInput {
        exclude: ex.indices().to_vec(),
        alpha_grid: grid,
        probes,
        frame_grid,
        minimality_index: n_probe,
    };
    let log = vec![format!(
        "{} alpha values, {inconsistencies} inconsistent",
        points.len()
    )];
    let results = ScanResults {
        points,
        inconsistencies,
    };
    Ok(Output {
        report: document("scan", &input, common, &results, failures)?,
        tables,
        log,
    })
}

#[derive(Serialize)]
struct GrowthInput {
    exclude: Vec<i64>,
    n_max: i64,
    alpha: f64,
    tail: (i64, i64),
}

#[derive(Serialize)]
struct GrowthSummary {
    j: usize,
    fitted_slope: f64,
    expected_slope: f64,
    delta_estimate: f64,
    flagged: Vec<i64>,
    flagged_fraction: f64,
}

#[derive(Serialize)]
struct GrowthResults {
    fits: Vec<GrowthSummary>,
    obstruction: Vec<ObstructionReport>,
}

fn cmd_growth(a: &GrowthArgs, file: &FileConfig, common: &Common) -> Result<Output, CliError> {
    let ex = exclusion(&a.exclude, file)?;
    let n_max = a
        .n_max
        .or(file.n_max)
        .ok_or_else(|| usage("--n-max is required"))?;
    if n_max < MIN_N_MAX {
        return Err(usage(format!("--n-max must be at least {MIN_N_MAX}")));
    }
    let tail_lo = MIN_N_MAX.max(2 * ex.max_abs_index());
    if tail_lo >= n_max {
        return Err(usage(format!(
            "--n-max must exceed the tail start {tail_lo}"
        )));
    }
    let alpha = a.alpha.or(file.alpha).unwrap_or(ex.m() as f64);
    let spec = WeightedSystemSpec::new(alpha, ex.clone())?;
    let table: DualCoefficientTable = dual_coefficients(&ex, -n_max..=n_max, Arithmetic::Float)?;

    let m = ex.m();
    let mut failures = Vec::new();
    let mut fits: Vec<GrowthFit> = Vec::new();
    for j in 1..=m {
        let fit = growth_fit(&table, j, tail_lo..=n_max)?;
        if fit.flagged_fraction > FLAGGED_SATURATION {
            failures.push(format!(
                "j = {j}: {:.0}% of the tail has a_(n,j) = 0",
                100.0 * fit.flagged_fraction
            ));
        }
        if !(fit.delta_estimate > 0.0) {
            failures.push(format!("j = {j}: delta estimate is not positive"));
        }
        fits.push(fit);
    }
    let obstruction: Vec<ObstructionReport> = ex
        .indices()
        .iter()
        .map(|&mi| schauder_obstruction_report(&spec, mi, n_max, &common.tolerance))
        .collect::<crate::Result<_>>()?;
    for r in &obstruction {
        if !r.non_decaying {
            failures.push(format!("m = {}: obstruction series decays", r.m));
        }
    }

    let mut rows = Vec::new();
    for f in &fits {
        for (l, v) in &f.samples {
            rows.push(vec![f.j.to_string(), l.to_string(), v.to_string()]);
        }
    }
    let mut tables = vec![csv_rows("growth", &["j", "abs_lambda", "abs_a"], rows)?];
    for r in &obstruction {
        tables.push(csv_table(&format!("obstruction_m{}", r.m), |w| {
            r.series.write_csv(w)
        })?);
    }
    let summaries = fits
        .iter()
        .map(|f| GrowthSummary {
            j: f.j,
            fitted_slope: f.fitted_slope,
            expected_slope: (m - 1) as f64,
            delta_estimate: f.delta_estimate,
            flagged: f.flagged.clone(),
            flagged_fraction: f.flagged_fraction,
        })
        .collect::<Vec<_>>();
    let log = summaries
        .iter()
        .map(|s| {
            format!(
                "j = {}: slope {:.4}, delta {:.4e}",
                s.j, s.fitted_slope, s.delta_estimate
            )
        })
        .collect();
    let input = GrowthInput {
        exclude: ex.indices().to_vec(),
        n_max,
        alpha,
        tail: (tail_lo, n_max),
    };
    let results = GrowthResults {
        fits: summaries,
        obstruction,
    };
    Ok(Output {
        report: document("growth", &input, common, &results, failures)?,
        tables,
        log,
    })
}

#[derive(Serialize)]
struct ReportInput {
    seed: u64,
}

fn cmd_report(common: &Common) -> Result<Output, CliError> {
    let report = acceptance::run_all(common.seed);
    let failures = report
        .outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| format!("criterion {} failed", o.id))
        .collect();
    let log = report.outcomes.iter().map(|o| o.line()).collect();
    let table = csv_rows(
        "acceptance",
        &[
            "id",
            "name",
            "passed",
            "runtime_secs",
            "runtime_limit_secs",
            "detail",
        ],
        report
            .outcomes
            .iter()
            .map(|o| {
                vec![
                    o.id.to_string(),
                    o.name.to_string(),
                    o.passed.to_string(),
                    format!("{:.3}", o.runtime_secs),
                    o.runtime_limit_secs.to_string(),
                    o.detail.clone(),
                ]
            })
            .collect(),
    )?;
    Ok(Output {
        report: document(
            "report",
            &ReportInput { seed: common.seed },
            common,
            &report,
            failures,
        )?,
        tables: vec![table],
        log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_grid_forms() {
        assert_eq!(
            parse_alpha_grid("0.5:1.5:0.5").unwrap(),
            vec![0.5, 1.0, 1.5]
        );
        let g = parse_alpha_grid("0.4:2.0:0.1").unwrap();
        assert_eq!(g.len(), 17);
        assert!(g.contains(&1.5));
        assert_eq!(parse_alpha_grid("0.4,1.5").unwrap(), vec![0.4, 1.5]);
        assert!(parse_alpha_grid("1:0:0.1").is_err());
        assert!(parse_alpha_grid("0:1:0.5").is_err());
        assert!(parse_alpha_grid("a,b").is_err());
        assert!(parse_alpha_grid("1:2").is_err());
    }

    #[test]
    fn probe_names() {
        assert_eq!(
            parse_probes(&["witness".into(), "witness".into()]).unwrap(),
            vec![Probe::Witness]
        );
        assert!(parse_probes(&["nope".into()]).is_err());
    }
}
