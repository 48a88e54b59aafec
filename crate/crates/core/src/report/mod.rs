//! Grid sweeps, aggregated reports and their serializations.

pub mod csv;
pub mod mesh;
pub mod verify;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::expr::{eval_jet2, ImmersionSpec, Mode};
use crate::invariants::cone::{cone_shape_operators, ConeReport};
use crate::invariants::{analyze_point, AnalysisOptions, InvariantReport};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Node counts and parameter box of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub counts: Vec<usize>,
    pub domain: Vec<(f64, f64)>,
}

impl Grid {
    /// Parses `AxB[xC...]`; missing trailing counts repeat the last one.
    pub fn parse_counts(text: &str, n: usize) -> Result<Vec<usize>> {
        let parts: Vec<usize> = text
            .split(['x', 'X'])
            .map(|p| p.trim().parse::<usize>().ok().filter(|&c| c > 0))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::Precondition(format!("bad grid `{text}`, expected e.g. 16x16")))?;
        if parts.is_empty() || parts.len() > n {
            return Err(Error::Precondition(format!(
                "grid `{text}` has {} counts for {n} parameters",
                parts.len()
            )));
        }
        let last = parts[parts.len() - 1];
        Ok((0..n).map(|i| parts.get(i).copied().unwrap_or(last)).collect())
    }

    /// Parses `lo:hi,lo:hi,...`, one interval per parameter.
    pub fn parse_domain(text: &str, n: usize) -> Result<Vec<(f64, f64)>> {
        let bad = || Error::Precondition(format!("bad domain `{text}`, expected lo:hi,lo:hi"));
        let d: Vec<(f64, f64)> = text
            .split(',')
            .map(|iv| {
                let (a, b) = iv.split_once(':')?;
                let (a, b) = (a.trim().parse::<f64>().ok()?, b.trim().parse::<f64>().ok()?);
                (a < b).then_some((a, b))
            })
            .collect::<Option<_>>()
            .ok_or_else(bad)?;
        if d.len() != n {
            return Err(Error::Precondition(format!(
                "domain `{text}` has {} intervals for {n} parameters",
                d.len()
            )));
        }
        Ok(d)
    }

    /// Grid over `domain` (defaults to the spec's), which must lie inside
    /// the spec's declared domain.
    pub fn new(spec: &ImmersionSpec, counts: Vec<usize>, domain: Option<Vec<(f64, f64)>>) -> Result<Grid> {
        let domain = domain.unwrap_or_else(|| spec.domain.clone());
        for (i, ((a, b), (lo, hi))) in domain.iter().zip(&spec.domain).enumerate() {
            if a < lo || b > hi {
                return Err(Error::Precondition(format!(
                    "grid interval [{a}, {b}] for `{}` leaves the declared domain [{lo}, {hi}]",
                    spec.param_names[i]
                )));
            }
        }
        Ok(Grid { counts, domain })
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Multi-index of node `k`, first parameter slowest.
    pub fn index(&self, mut k: usize) -> Vec<usize> {
        let mut idx = vec![0; self.counts.len()];
        for d in (0..self.counts.len()).rev() {
            idx[d] = k % self.counts[d];
            k /= self.counts[d];
        }
        idx
    }

    /// Cell-centred parameter values of a node.
    pub fn point(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter()
            .zip(&self.counts)
            .zip(&self.domain)
            .map(|((&i, &c), &(a, b))| a + (b - a) * (i as f64 + 0.5) / c as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    /// Not on the light-like hypercylinder (or cone).
    Inadmissible,
    /// On the hypersurface but the computation broke down.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointEntry {
    pub index: Vec<usize>,
    pub point: Vec<f64>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub message: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub report: Option<InvariantReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cone: Option<ConeReport>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    All,
    None,
    Mixed,
}

impl Verdict {
    pub fn of(values: impl IntoIterator<Item = bool>) -> Verdict {
        let (mut t, mut f) = (false, false);
        for v in values {
            if v {
                t = true;
            } else {
                f = true;
            }
        }
        match (t, f) {
            (true, false) => Verdict::All,
            (true, true) => Verdict::Mixed,
            _ => Verdict::None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    /// Verdict per flag over admissible nodes, plus `admissible` over all.
    pub flags: BTreeMap<String, Verdict>,
    pub max_residuals: BTreeMap<String, f64>,
    pub counts: BTreeMap<String, usize>,
}

impl Aggregate {
    pub fn from_points(points: &[PointEntry], tol: &Tolerances) -> Aggregate {
        let mut flags: BTreeMap<String, Vec<bool>> = BTreeMap::new();
        let mut max_residuals: BTreeMap<String, f64> = BTreeMap::new();
        let mut counts = BTreeMap::new();
        for p in points {
            let key = match p.status {
                Status::Ok => "ok",
                Status::Inadmissible => "inadmissible",
                Status::Degenerate => "degenerate",
            };
            *counts.entry(key.to_string()).or_insert(0) += 1;
            let named: Vec<(String, bool)> = if let Some(r) = &p.report {
                r.flags.entries().into_iter().map(|(k, v)| (k.to_string(), v)).collect()
            } else if let Some(c) = &p.cone {
                cone_flags(c, tol).into_iter().map(|(k, v)| (k.to_string(), v)).collect()
            } else {
                vec![]
            };
            for (k, v) in named {
                flags.entry(k).or_default().push(v);
            }
            let residuals: Vec<(String, f64)> = if let Some(r) = &p.report {
                r.residuals.iter().map(|(k, v)| (k.clone(), *v)).collect()
            } else if let Some(c) = &p.cone {
                vec![
                    ("cone".into(), c.cone_residual.abs()),
                    ("a_gamma_defect".into(), c.a_gamma_defect),
                    ("a_eta_umbilicity".into(), c.a_eta_umbilicity),
                ]
            } else {
                vec![]
            };
            for (k, v) in residuals {
                let e = max_residuals.entry(k).or_insert(0.0);
                *e = e.max(v);
            }
        }
        let mut flags: BTreeMap<String, Verdict> =
            flags.into_iter().map(|(k, v)| (k, Verdict::of(v))).collect();
        flags.insert(
            "admissible".into(),
            Verdict::of(points.iter().map(|p| p.status != Status::Inadmissible)),
        );
        Aggregate {
            flags,
            max_residuals,
            counts,
        }
    }
}

/// Flags of a cone-mode node.
pub fn cone_flags(c: &ConeReport, tol: &Tolerances) -> Vec<(&'static str, bool)> {
    vec![
        ("a_eta_umbilical", c.a_eta_umbilicity < tol.alg),
        ("a_gamma_minus_identity", c.a_gamma_defect < tol.alg),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub version: String,
    /// SHA-256 of the spec text in canonical DSL form.
    pub spec_fingerprint: String,
    pub mode: Mode,
    pub params: Vec<String>,
    pub grid: Grid,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub per_point: Vec<PointEntry>,
    pub aggregate: Aggregate,
}

pub fn fingerprint(spec: &ImmersionSpec) -> String {
    hex::encode(Sha256::digest(spec.to_dsl().as_bytes()))
}

fn classify_error(e: Error) -> (Status, String) {
    let status = match e {
        Error::NotAdmissible(_) => Status::Inadmissible,
        _ => Status::Degenerate,
    };
    (status, e.to_string())
}

fn analyze_node(spec: &ImmersionSpec, grid: &Grid, k: usize, tol: &Tolerances, opts: &AnalysisOptions) -> PointEntry {
    let index = grid.index(k);
    let point = grid.point(&index);
    let mut entry = PointEntry {
        index,
        point,
        status: Status::Ok,
        message: None,
        report: None,
        cone: None,
    };
    let res = match spec.mode {
        Mode::Cylinder => analyze_point(spec, &entry.point, tol, opts).map(|r| entry.report = Some(r)),
        Mode::Cone => eval_jet2(spec, &entry.point)
            .and_then(|j| cone_shape_operators(&j, tol))
            .map(|mut c| {
                c.point = entry.point.clone();
                entry.cone = Some(c);
            }),
    };
    if let Err(e) = res {
        let (s, m) = classify_error(e);
        entry.status = s;
        entry.message = Some(m);
    }
    entry
}

/// Analyzes every grid node in parallel; output order is the grid order.
pub fn analyze_grid(spec: &ImmersionSpec, grid: Grid, tol: &Tolerances, seed: u64) -> AnalysisReport {
    let opts = AnalysisOptions { structure: true, seed };
    let per_point: Vec<PointEntry> = (0..grid.len())
        .into_par_iter()
        .map(|k| analyze_node(spec, &grid, k, tol, &opts))
        .collect();
    AnalysisReport {
        version: VERSION.to_string(),
        spec_fingerprint: fingerprint(spec),
        mode: spec.mode,
        params: spec.param_names.clone(),
        aggregate: Aggregate::from_points(&per_point, tol),
        grid,
        tolerances: *tol,
        seed,
        per_point,
    }
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<AnalysisReport> {
        serde_json::from_str(text).map_err(|e| Error::InvalidSpec(format!("report json: {e}")))
    }
}
