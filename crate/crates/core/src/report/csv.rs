//! One row per grid node with every scalar invariant, in a fixed column
//! order. Missing values are empty cells.

use super::{AnalysisReport, PointEntry, Status};
use std::fmt::Write as _;

/// Columns after the parameter values, for cylinder-mode reports.
pub const CYLINDER_COLUMNS: [&str; 32] = [
    "status",
    "alpha",
    "e1_alpha",
    "ea_alpha_max",
    "beta_min",
    "beta_max",
    "K",
    "K_perp",
    "H_theta",
    "H_norm2",
    "isotropy_spread",
    "lambda",
    "pseudo_umbilical",
    "isotropic",
    "flat",
    "flat_normal_bundle",
    "marginally_trapped",
    "minimal",
    "totally_umbilical",
    "a_h_zero",
    "alpha_zero",
    "consistent",
    "res_pairing",
    "res_decomposition",
    "res_frame_c",
    "res_h_offdiag",
    "res_h11_null",
    "res_frame_e",
    "res_weingarten_xi",
    "res_ricci",
    "res_codazzi",
    "res_gauss",
];

/// Columns after the parameter values, for cone-mode reports.
pub const CONE_COLUMNS: [&str; 5] = [
    "status",
    "cone_residual",
    "a_gamma_defect",
    "a_eta_umbilicity",
    "a_eta_mean",
];

fn num(x: f64) -> String {
    format!("{x}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn bit(b: bool) -> String {
    if b { "1" } else { "0" }.to_string()
}

fn status(p: &PointEntry) -> &'static str {
    match p.status {
        Status::Ok => "ok",
        Status::Inadmissible => "inadmissible",
        Status::Degenerate => "degenerate",
    }
}

fn cylinder_cells(p: &PointEntry) -> Vec<String> {
    let mut c = vec![status(p).to_string()];
    let Some(r) = &p.report else {
        c.resize(CYLINDER_COLUMNS.len(), String::new());
        return c;
    };
    let f = &r.flags;
    let fold = |v: &[f64], init: f64, op: fn(f64, f64) -> f64| v.iter().copied().fold(init, op);
    c.push(num(r.alpha));
    c.push(num(r.e1_alpha));
    c.push(num(fold(&r.ea_alpha, 0.0, |m, x| m.max(x.abs()))));
    c.push(num(fold(&r.beta, f64::INFINITY, f64::min)));
    c.push(num(fold(&r.beta, f64::NEG_INFINITY, f64::max)));
    c.push(opt(r.gauss_curvature));
    c.push(opt(r.normal_curvature));
    c.push(num(r.mean_curvature_theta));
    c.push(num(r.mean_curvature_norm2));
    c.push(num(f.isotropy_spread));
    c.push(opt(f.lambda));
    c.push(bit(f.pseudo_umbilical));
    c.push(bit(f.isotropic));
    c.push(f.flat.map(bit).unwrap_or_default());
    c.push(bit(f.flat_normal_bundle));
    c.push(bit(f.marginally_trapped));
    c.push(bit(f.minimal));
    c.push(bit(f.totally_umbilical));
    c.push(bit(f.a_h_zero));
    c.push(bit(f.alpha_zero));
    c.push(bit(f.inconsistent.is_empty()));
    for name in CYLINDER_COLUMNS.iter().skip(22) {
        c.push(opt(r.residuals.get(&name[4..]).copied()));
    }
    c
}

fn cone_cells(p: &PointEntry) -> Vec<String> {
    let mut c = vec![status(p).to_string()];
    match &p.cone {
        Some(r) => {
            let ev = &r.a_eta_eigenvalues;
            c.push(num(r.cone_residual));
            c.push(num(r.a_gamma_defect));
            c.push(num(r.a_eta_umbilicity));
            c.push(num(ev.iter().sum::<f64>() / ev.len().max(1) as f64));
        }
        None => c.resize(CONE_COLUMNS.len(), String::new()),
    }
    c
}

pub fn to_csv(report: &AnalysisReport) -> String {
    let cone = report.mode == crate::expr::Mode::Cone;
    let mut out = String::new();
    let mut header: Vec<String> = report.params.clone();
    let cols: &[&str] = if cone { &CONE_COLUMNS } else { &CYLINDER_COLUMNS };
    header.extend(cols.iter().map(|s| s.to_string()));
    let _ = writeln!(out, "{}", header.join(","));
    for p in &report.per_point {
        let mut row: Vec<String> = p.point.iter().map(|&x| num(x)).collect();
        row.extend(if cone { cone_cells(p) } else { cylinder_cells(p) });
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}
