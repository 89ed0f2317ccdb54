//! The four subcommands.

use std::path::PathBuf;

use anyhow::Result;
use fracdiff::convergence::{expected_slope, fit_sweep};
use fracdiff::{gauss_laguerre, max_error, Approximation, Method, SweepPoint};
use serde_json::json;

use crate::config::{NodesArgs, OrderSpec, Run, RunArgs};
use crate::report::{
    fmt_f64, output_path, write_meta, write_pointwise, write_table, write_text, ErrorReport, FitSummary, PlotScript,
    PointRow,
};

/// What a command wrote and what it has to say about it.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub summary: Vec<String>,
    pub warnings: Vec<String>,
}

pub fn deriv(args: &RunArgs) -> Result<Outcome> {
    let run = Run::resolve(args, OrderSpec::Single, &[args.method])?;
    let warnings = run.stability_warnings(&[run.method]);
    let order = run.orders[0];
    let approx = Approximation::new(run.method, run.alpha, order)?
        .with_solver(run.solver)
        .with_stepping(run.stepping)
        .evaluate(&run.grid, &run.signal)?;
    let exact = run.case.as_ref().map(|c| c.exact_on(&run.grid)).transpose()?;
    let rows = (0..run.grid.count())
        .map(|k| PointRow::new(run.grid.point(k), approx[k], exact.as_ref().map(|e| e[k])))
        .collect();
    let report = ErrorReport::new(rows);

    let csv = output_path(&run.prefix, "pointwise", "csv");
    let gp = output_path(&run.prefix, "pointwise", "gp");
    let meta = output_path(&run.prefix, "pointwise", "meta.json");
    write_pointwise(&csv, &report)?;
    let (ylabel, column) = if exact.is_some() {
        ("relative error", 5)
    } else {
        ("approximation", 2)
    };
    let script = PlotScript {
        csv: csv.clone(),
        title: format!("{} {}, N={order}, n={}", run.method, run.solver, run.grid.count()),
        xlabel: "t".into(),
        ylabel: ylabel.into(),
        log_x: false,
        log_y: exact.is_some(),
        series: vec![(1, column, run.method.name().into())],
    };
    write_text(&gp, &script.render())?;
    write_meta(
        &meta,
        "deriv",
        &run.config,
        json!({ "E_inf": report.e_inf, "rows": report.rows.len(), "warnings": warnings }),
    )?;

    let mut summary = vec![format!(
        "{}: {} points written to {}",
        run.method,
        report.rows.len(),
        csv.display()
    )];
    if let Some(e) = report.e_inf {
        summary.push(format!("E_inf = {}", fmt_f64(e)));
    }
    Ok(Outcome {
        files: vec![csv, gp, meta],
        summary,
        warnings,
    })
}

fn sweep_for(run: &Run, method: Method) -> Result<(Vec<SweepPoint<f64>>, FitSummary)> {
    let exact = run.require_case()?.exact_on(&run.grid)?;
    let points = run
        .orders
        .iter()
        .map(|&order| {
            let approx = Approximation::new(method, run.alpha, order)?
                .with_solver(run.solver)
                .with_stepping(run.stepping)
                .evaluate(&run.grid, &run.signal)?;
            Ok(SweepPoint {
                order,
                e_inf: max_error(&approx, &exact)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let fit = FitSummary::new(fit_sweep(&points)?, expected_slope(method, run.alpha));
    Ok((points, fit))
}

pub fn convergence(args: &RunArgs) -> Result<Outcome> {
    let run = Run::resolve(args, OrderSpec::Sweep, &[args.method])?;
    let warnings = run.stability_warnings(&[run.method]);
    let (points, fit) = sweep_for(&run, run.method)?;

    let csv = output_path(&run.prefix, "sweep", "csv");
    let gp = output_path(&run.prefix, "sweep", "gp");
    let meta = output_path(&run.prefix, "sweep", "meta.json");
    write_table(
        &csv,
        &["N", "E_inf"],
        points.iter().map(|p| vec![p.order.to_string(), fmt_f64(p.e_inf)]),
    )?;
    let script = PlotScript {
        csv: csv.clone(),
        title: format!("{} {}, n={}", run.method, run.solver, run.grid.count()),
        xlabel: "N".into(),
        ylabel: "E_inf".into(),
        log_x: true,
        log_y: true,
        series: vec![(1, 2, run.method.name().into())],
    };
    write_text(&gp, &script.render())?;
    write_meta(
        &meta,
        "convergence",
        &run.config,
        json!({ "fit": fit, "warnings": warnings }),
    )?;

    let mut summary: Vec<String> = points
        .iter()
        .map(|p| format!("N={:<5} E_inf = {}", p.order, fmt_f64(p.e_inf)))
        .collect();
    summary.push(format!(
        "slope = {:.4} +/- {:.4} (expected {:.4}){}",
        fit.slope,
        fit.stderr,
        fit.expected_slope,
        if fit.excluded_first {
            ", smallest N excluded"
        } else {
            ""
        }
    ));
    Ok(Outcome {
        files: vec![csv, gp, meta],
        summary,
        warnings,
    })
}

pub fn compare(args: &RunArgs) -> Result<Outcome> {
    let methods = Method::ALL;
    let run = Run::resolve(args, OrderSpec::Sweep, &methods)?;
    let warnings = run.stability_warnings(&methods);
    let mut columns = Vec::new();
    let mut fits = serde_json::Map::new();
    for m in methods {
        let (points, fit) = sweep_for(&run, m)?;
        fits.insert(m.name().to_string(), serde_json::to_value(fit)?);
        columns.push(points);
    }

    let csv = output_path(&run.prefix, "compare", "csv");
    let gp = output_path(&run.prefix, "compare", "gp");
    let meta = output_path(&run.prefix, "compare", "meta.json");
    let header: Vec<String> = std::iter::once("N".to_string())
        .chain(methods.iter().map(|m| format!("E_{}", m.name())))
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = run.orders.iter().enumerate().map(|(i, &order)| {
        std::iter::once(order.to_string())
            .chain(columns.iter().map(|c| fmt_f64(c[i].e_inf)))
            .collect()
    });
    write_table(&csv, &header, rows)?;
    let script = PlotScript {
        csv: csv.clone(),
        title: format!("{} solver, n={}", run.solver, run.grid.count()),
        xlabel: "N".into(),
        ylabel: "E_inf".into(),
        log_x: true,
        log_y: true,
        series: methods
            .iter()
            .enumerate()
            .map(|(i, m)| (1, i + 2, m.name().to_string()))
            .collect(),
    };
    write_text(&gp, &script.render())?;
    write_meta(
        &meta,
        "compare",
        &run.config,
        json!({ "fits": fits, "warnings": warnings }),
    )?;

    let summary = methods
        .iter()
        .map(|m| {
            let f = &fits[m.name()];
            format!(
                "{:<4} slope = {:.4} +/- {:.4}",
                m.name(),
                f["slope"].as_f64().unwrap_or(f64::NAN),
                f["stderr"].as_f64().unwrap_or(f64::NAN)
            )
        })
        .collect();
    Ok(Outcome {
        files: vec![csv, gp, meta],
        summary,
        warnings,
    })
}

pub fn nodes(args: &NodesArgs) -> Result<Outcome> {
    let rule = gauss_laguerre(args.order, args.gamma)?;
    let csv = output_path(&args.out, "nodes", "csv");
    let gp = output_path(&args.out, "nodes", "gp");
    let meta = output_path(&args.out, "nodes", "meta.json");
    let rows = (0..rule.order()).map(|k| {
        vec![
            k.to_string(),
            fmt_f64(rule.nodes()[k]),
            fmt_f64(rule.weights()[k]),
            fmt_f64(rule.scaled_weights()[k]),
        ]
    });
    write_table(&csv, &["index", "node", "weight", "scaled_weight"], rows)?;
    let script = PlotScript {
        csv: csv.clone(),
        title: format!("Gauss-Laguerre rule, N={}, gamma={}", args.order, args.gamma),
        xlabel: "node".into(),
        ylabel: "weight".into(),
        log_x: true,
        log_y: true,
        series: vec![(2, 3, "weight".into()), (2, 4, "scaled weight".into())],
    };
    write_text(&gp, &script.render())?;
    let total: f64 = rule.weights().iter().sum();
    write_meta(
        &meta,
        "nodes",
        &json!({ "N": args.order, "gamma": args.gamma, "output": args.out.display().to_string() }),
        json!({ "weight_sum": total }),
    )?;
    let summary = vec![format!(
        "{} nodes written to {}, weight sum {}",
        rule.order(),
        csv.display(),
        fmt_f64(total)
    )];
    Ok(Outcome {
        files: vec![csv, gp, meta],
        summary,
        warnings: Vec::new(),
    })
}
