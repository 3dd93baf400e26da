//! Experiment driver: configures the built-in examples, sweeps the time-step
//! counts, attaches convergence orders and emits machine-readable tables.

use crate::bounds::{final_bounds, GlobalBounds};
use crate::config::{ExampleId, GradingMode, OutputFormat, RunConfig};
use crate::error::{Error, Result};
use crate::estimators::{compute_components, Components};
use crate::fem::FemSpace;
use crate::l1::march;
use crate::mesh::{SpaceMesh, TimeMesh};
use crate::problem::ProblemSpec;
use crate::reconstruct::build_pack;
use serde::Serialize;
use std::time::Instant;

/// One table row: estimator values for a single (alpha, N) cell plus the
/// orders against the previous row when N doubles.
#[derive(Debug, Clone, Serialize)]
pub struct TableRow {
    pub alpha: f64,
    pub n: usize,
    pub m: usize,
    pub r: f64,
    pub e_u: Option<f64>,
    pub order_e_u: Option<f64>,
    pub e_t_alpha: Option<f64>,
    pub order_e_t_alpha: Option<f64>,
    pub e_u_big: f64,
    pub order_e_u_big: Option<f64>,
    pub e_f: f64,
    pub order_e_f: Option<f64>,
    pub e_u_hat: f64,
    pub order_e_u_hat: Option<f64>,
    pub e_w: f64,
    pub order_e_w: Option<f64>,
    pub thm1: f64,
    pub thm3: f64,
    pub thm5: f64,
    pub thm7: f64,
    pub walltime_ms: u128,
    /// Present when orders were suppressed because N_list does not double.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Build the problem for an example id. Custom problems enter through
/// [`run_problem`] directly.
pub fn example_problem(id: ExampleId, alpha: f64, theta: f64) -> Result<ProblemSpec> {
    let mut spec = match id {
        ExampleId::Smooth => ProblemSpec::example_smooth(alpha),
        ExampleId::Nonsmooth => ProblemSpec::example_nonsmooth(alpha),
        ExampleId::Custom => {
            return Err(Error::InvalidConfig(
                "custom problems must be supplied through the library API".into(),
            ))
        }
    };
    spec.theta = theta;
    Ok(spec)
}

/// Full pipeline for one problem instance; returns the estimator components
/// and assembled bounds.
pub fn run_problem(
    spec: &ProblemSpec,
    n_steps: usize,
    m: usize,
    grading: f64,
) -> Result<(Components, GlobalBounds)> {
    let violations = spec.check();
    if let Some(first) = violations.into_iter().next() {
        return Err(first);
    }
    let tmesh = TimeMesh::graded(spec.t_final, n_steps, grading)?;
    let smesh = SpaceMesh::uniform(m)?;
    let space = FemSpace::build(smesh, spec.diffusion.clone())?;
    let traj = march(spec, &tmesh, &space)?;
    let pack = build_pack(&traj, &tmesh, &space)?;
    let table = crate::coefficients::build_coefficients(&tmesh, spec.alpha)?;
    let comp = compute_components(spec, &traj, &pack, &table, &tmesh, &space)?;
    let bounds = final_bounds(&comp);
    Ok((comp, bounds))
}

/// Run one example cell and format it as a table row (orders unattached).
pub fn run_example(
    id: ExampleId,
    alpha: f64,
    n_steps: usize,
    m: usize,
    grading_mode: GradingMode,
    theta: f64,
) -> Result<TableRow> {
    let spec = example_problem(id, alpha, theta)?;
    let r = grading_mode.exponent(alpha)?;
    let started = Instant::now();
    let (comp, bounds) = run_problem(&spec, n_steps, m, r)?;
    let walltime_ms = started.elapsed().as_millis();
    Ok(TableRow {
        alpha,
        n: n_steps,
        m,
        r,
        e_u: comp.e_u,
        order_e_u: None,
        e_t_alpha: comp.e_t_alpha,
        order_e_t_alpha: None,
        e_u_big: comp.e_u_big,
        order_e_u_big: None,
        e_f: comp.e_f,
        order_e_f: None,
        e_u_hat: comp.e_u_hat,
        order_e_u_hat: None,
        e_w: comp.e_w,
        order_e_w: None,
        thm1: bounds.thm1,
        thm3: bounds.thm3,
        thm5: bounds.thm5,
        thm7: bounds.thm7,
        walltime_ms,
        warning: None,
    })
}

fn order(coarse: f64, fine: f64) -> Option<f64> {
    if coarse > 0.0 && fine > 0.0 {
        Some((coarse / fine).log2())
    } else {
        None
    }
}

/// Sweep every (alpha, N) cell of the configuration, attaching orders
/// log2(e_N / e_2N) between rows that differ only by a doubled N.
pub fn sweep(cfg: &RunConfig) -> Result<Vec<TableRow>> {
    if let Some(first) = cfg.check().into_iter().next() {
        return Err(first);
    }
    let doubling = cfg.n_list.windows(2).all(|w| w[1] == 2 * w[0]);
    let warning = (!doubling).then(|| {
        "orders omitted: N_list entries do not double".to_string()
    });
    if let Some(w) = &warning {
        eprintln!("warning: {w}");
    }
    let mut rows = Vec::new();
    for &alpha in &cfg.alphas {
        let mut prev: Option<TableRow> = None;
        for &n in &cfg.n_list {
            let mut row = run_example(cfg.example_id, alpha, n, cfg.m, cfg.grading_mode, cfg.theta)?;
            if doubling {
                if let Some(p) = &prev {
                    row.order_e_u = p.e_u.zip(row.e_u).and_then(|(a, b)| order(a, b));
                    row.order_e_t_alpha =
                        p.e_t_alpha.zip(row.e_t_alpha).and_then(|(a, b)| order(a, b));
                    row.order_e_u_big = order(p.e_u_big, row.e_u_big);
                    row.order_e_f = order(p.e_f, row.e_f);
                    row.order_e_u_hat = order(p.e_u_hat, row.e_u_hat);
                    row.order_e_w = order(p.e_w, row.e_w);
                }
            } else {
                row.warning = warning.clone();
            }
            prev = Some(row.clone());
            rows.push(row);
        }
    }
    Ok(rows)
}

pub const CSV_HEADER: &str = "alpha,N,M,r,Eu,order_Eu,Eta,order_Eta,EU,order_EU,Ef,order_Ef,EUhat,order_EUhat,EW,order_EW,thm1,thm3,thm5,thm7,walltime_ms";

fn sci(v: f64) -> String {
    format!("{v:.4e}")
}

fn opt_sci(v: Option<f64>) -> String {
    v.map(sci).unwrap_or_default()
}

/// Serialize rows as CSV with a fixed 21-column header; all numeric values
/// carry 5 significant digits in scientific notation. Identical configs
/// produce byte-identical output except for the walltime column.
pub fn to_csv(rows: &[TableRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let cols = [
            sci(r.alpha),
            r.n.to_string(),
            r.m.to_string(),
            sci(r.r),
            opt_sci(r.e_u),
            opt_sci(r.order_e_u),
            opt_sci(r.e_t_alpha),
            opt_sci(r.order_e_t_alpha),
            sci(r.e_u_big),
            opt_sci(r.order_e_u_big),
            sci(r.e_f),
            opt_sci(r.order_e_f),
            sci(r.e_u_hat),
            opt_sci(r.order_e_u_hat),
            sci(r.e_w),
            opt_sci(r.order_e_w),
            sci(r.thm1),
            sci(r.thm3),
            sci(r.thm5),
            sci(r.thm7),
            r.walltime_ms.to_string(),
        ];
        out.push_str(&cols.join(","));
        out.push('\n');
    }
    out
}

/// Serialize rows as a JSON array with the same field names as the CSV.
pub fn to_json(rows: &[TableRow]) -> Result<String> {
    #[derive(Serialize)]
    struct JsonRow<'a> {
        alpha: String,
        #[serde(rename = "N")]
        n: usize,
        #[serde(rename = "M")]
        m: usize,
        r: String,
        #[serde(rename = "Eu")]
        e_u: Option<String>,
        order_eu: Option<String>,
        #[serde(rename = "Eta")]
        e_t_alpha: Option<String>,
        order_eta: Option<String>,
        #[serde(rename = "EU")]
        e_u_big: String,
        order_eu_big: Option<String>,
        #[serde(rename = "Ef")]
        e_f: String,
        order_ef: Option<String>,
        #[serde(rename = "EUhat")]
        e_u_hat: String,
        order_euhat: Option<String>,
        #[serde(rename = "EW")]
        e_w: String,
        order_ew: Option<String>,
        thm1: String,
        thm3: String,
        thm5: String,
        thm7: String,
        walltime_ms: u128,
        #[serde(skip_serializing_if = "Option::is_none")]
        warning: &'a Option<String>,
    }
    let shadow: Vec<JsonRow> = rows
        .iter()
        .map(|r| JsonRow {
            alpha: sci(r.alpha),
            n: r.n,
            m: r.m,
            r: sci(r.r),
            e_u: r.e_u.map(sci),
            order_eu: r.order_e_u.map(sci),
            e_t_alpha: r.e_t_alpha.map(sci),
            order_eta: r.order_e_t_alpha.map(sci),
            e_u_big: sci(r.e_u_big),
            order_eu_big: r.order_e_u_big.map(sci),
            e_f: sci(r.e_f),
            order_ef: r.order_e_f.map(sci),
            e_u_hat: sci(r.e_u_hat),
            order_euhat: r.order_e_u_hat.map(sci),
            e_w: sci(r.e_w),
            order_ew: r.order_e_w.map(sci),
            thm1: sci(r.thm1),
            thm3: sci(r.thm3),
            thm5: sci(r.thm5),
            thm7: sci(r.thm7),
            walltime_ms: r.walltime_ms,
            warning: &r.warning,
        })
        .collect();
    Ok(serde_json::to_string_pretty(&shadow)?)
}

/// Emit rows in the configured format.
pub fn emit(rows: &[TableRow], format: OutputFormat, path: &str) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::InvalidConfig("no rows to emit".into()));
    }
    let body = match format {
        OutputFormat::Csv => to_csv(rows),
        OutputFormat::Json => to_json(rows)?,
    };
    std::fs::write(path, body)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{ConstantsConvention, OutputSpec};

    fn tiny_cfg() -> RunConfig {
        RunConfig {
            example_id: ExampleId::Smooth,
            alphas: vec![0.5],
            n_list: vec![4, 8],
            m: 16,
            grading_mode: GradingMode::Uniform,
            output: Some(OutputSpec { format: OutputFormat::Csv, path: "unused".into() }),
            constants_convention: ConstantsConvention::Unit,
            theta: std::f64::consts::FRAC_PI_4,
        }
    }

    #[test]
    fn csv_has_fixed_column_count() {
        let rows = sweep(&tiny_cfg()).unwrap();
        let csv = to_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        for line in lines {
            assert_eq!(line.split(',').count(), 21, "line: {line}");
        }
    }

    #[test]
    fn single_row_emission() {
        let mut cfg = tiny_cfg();
        cfg.n_list = vec![4];
        let rows = sweep(&cfg).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].order_e_u.is_none(), "single N has no order");
        let csv = to_csv(&rows);
        assert_eq!(csv.lines().count(), 2);
    }

    #[test]
    fn orders_attach_only_on_doubling() {
        let rows = sweep(&tiny_cfg()).unwrap();
        assert!(rows[0].order_e_w.is_none());
        assert!(rows[1].order_e_w.is_some());

        let mut cfg = tiny_cfg();
        cfg.n_list = vec![4, 12];
        let rows = sweep(&cfg).unwrap();
        assert!(rows[1].order_e_w.is_none());
        assert!(rows[1].warning.is_some());
    }

    #[test]
    fn order_arithmetic() {
        assert!((order(4e-4, 1e-4).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn json_round_trips() {
        let rows = sweep(&tiny_cfg()).unwrap();
        let doc = to_json(&rows).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&doc).unwrap();
        assert_eq!(parsed.as_array().unwrap().len(), rows.len());
        assert!(parsed[0]["EW"].is_string());
        assert_eq!(parsed[0]["N"], 4);
    }

    #[test]
    fn deterministic_csv_modulo_walltime() {
        let strip = |csv: String| -> String {
            csv.lines()
                .map(|l| l.rsplit_once(',').map(|(head, _)| head.to_string()).unwrap_or_default())
                .collect::<Vec<_>>()
                .join("\n")
        };
        let a = strip(to_csv(&sweep(&tiny_cfg()).unwrap()));
        let b = strip(to_csv(&sweep(&tiny_cfg()).unwrap()));
        assert_eq!(a, b);
    }

    #[test]
    fn custom_example_is_api_only() {
        assert!(example_problem(ExampleId::Custom, 0.5, 1.0).is_err());
    }

    #[test]
    fn emit_error_paths() {
        let rows = sweep(&{
            let mut cfg = tiny_cfg();
            cfg.n_list = vec![4];
            cfg
        })
        .unwrap();
        assert!(matches!(
            emit(&rows, OutputFormat::Csv, "/nonexistent-dir/out.csv"),
            Err(crate::error::Error::Io(_))
        ));
        assert!(emit(&[], OutputFormat::Csv, "/tmp/unused.csv").is_err());
    }
}
