//! Acceptance criteria. Each criterion prints one PASS/FAIL line; the test
//! fails if any criterion fails.

mod common;

use common::*;
use conecyl::constructions::*;
use conecyl::error::Error;
use conecyl::expr::{eval_jet2, parse_immersion_spec, ImmersionSpec, JetSource};
use conecyl::invariants::structure::intrinsic_gauss_curvature;
use conecyl::invariants::{analyze_point, AnalysisOptions, InvariantReport};
use conecyl::report::verify::{surface_over_circle, FlattenedJets};
use conecyl::Tolerances;
use rand::Rng;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::time::Instant;

type Outcome = (bool, String);

/// Interior points of the spec's domain: a grid with `per_axis` nodes per
/// parameter, kept 5% away from the boundary.
fn interior(spec: &ImmersionSpec, per_axis: usize) -> Vec<Vec<f64>> {
    let d = spec.param_domain();
    let n = d.len();
    let total = per_axis.pow(n as u32);
    (0..total)
        .map(|mut k| {
            let mut p = vec![0.0; n];
            for i in (0..n).rev() {
                let idx = k % per_axis;
                k /= per_axis;
                let (a, b) = d[i];
                let f = 0.05 + 0.9 * (idx as f64 + 0.5) / per_axis as f64;
                p[i] = a + f * (b - a);
            }
            p
        })
        .collect()
}

fn reports(spec: &ImmersionSpec, per_axis: usize, structure: bool) -> Result<Vec<InvariantReport>, String> {
    let tol = Tolerances::default();
    let opts = AnalysisOptions { structure, seed: 0 };
    interior(spec, per_axis)
        .iter()
        .map(|p| analyze_point(spec, p, &tol, &opts).map_err(|e| format!("{p:?}: {e}")))
        .collect()
}

fn families() -> Vec<(&'static str, ImmersionSpec, usize)> {
    vec![
        ("pseudo_umbilical_surface", gen_pseudo_umbilical_surface(1.0).unwrap(), 10),
        ("isotropic n=3", gen_isotropic(3, 1.0, 2.0, None).unwrap(), 5),
        ("ruled_flat a=sin t", gen_ruled_flat("sin(t)", &CurveInput::kappa_half(), None).unwrap(), 10),
        ("product", gen_product(&CurveInput::circle(), (-1.0, 1.0)).unwrap(), 10),
        ("example61", gen_example61().unwrap(), 10),
        ("pseudo_umbilical_n n=3", gen_pseudo_umbilical_n(3, -1, 1.0, (1.0, 0.0), (0.0, 0.5)).unwrap(), 5),
    ]
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst_frame: f64 = 0.0;
    let mut worst_h: f64 = 0.0;
    let mut samples = 0;
    for (name, spec, k) in families() {
        let rs = match reports(&spec, k, false) {
            Ok(r) => r,
            Err(e) => return (false, format!("{name}: {e}")),
        };
        samples += rs.len();
        for r in &rs {
            for key in ["pairing", "frame_c", "decomposition"] {
                worst_frame = worst_frame.max(r.residuals[key]);
            }
            // A_theta = diag(0, -1, ..., -1), read from the reported matrix
            for (i, row) in r.a_theta.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    let want = if i == j && i > 0 { -1.0 } else { 0.0 };
                    worst_frame = worst_frame.max((v - want).abs());
                }
            }
            worst_h = worst_h.max(r.residuals["h_offdiag"]).max(r.residuals["h11_null"]);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    (
        worst_frame < 1e-6 && worst_h < 1e-8 && secs < 30.0,
        format!("{samples} samples, frame {worst_frame:.2e}, h {worst_h:.2e}, {secs:.1} s"),
    )
}

fn criterion_2() -> Outcome {
    let mut worst: f64 = 0.0;
    for (name, spec, k) in families() {
        let rs = match reports(&spec, (k / 2).max(3), true) {
            Ok(r) => r,
            Err(e) => return (false, format!("{name}: {e}")),
        };
        for r in &rs {
            for key in ["gauss", "codazzi", "ricci"] {
                worst = worst.max(r.residuals[key]);
            }
        }
    }
    let curved = surface_over_circle("2 + sin(s)", [(-1.0, 1.0), (-PI, PI)]).unwrap();
    let bad = FlattenedJets(&curved);
    let tol = Tolerances::default();
    let mut control = f64::INFINITY;
    for p in [[-0.7, -1.0], [-0.4, 2.0], [0.4, 0.0], [0.7, 1.0]] {
        match analyze_point(&bad, &p, &tol, &AnalysisOptions::default()) {
            Ok(r) => control = control.min(r.residuals["gauss"]),
            Err(e) => return (false, format!("control: {e}")),
        }
    }
    (
        worst < 1e-4 && control > 1e-2,
        format!("max Gauss/Codazzi/Ricci {worst:.2e}, corrupted min {control:.2e}"),
    )
}

fn criterion_3() -> Outcome {
    let mut msgs = Vec::new();
    let mut ok = true;
    let mut check = |cond: bool, msg: String| {
        ok &= cond;
        msgs.push(msg);
    };
    let pus = reports(&gen_pseudo_umbilical_surface(1.0).unwrap(), 6, false).unwrap();
    let five = pus.iter().all(|r| {
        let f = &r.flags;
        f.pseudo_umbilical
            && f.isotropic
            && f.flat == Some(true)
            && f.flat_normal_bundle
            && f.marginally_trapped
            && f.inconsistent.is_empty()
    });
    check(five, format!("surface five predicates {five}"));
    let mut umb = pus.iter().all(|r| !r.flags.totally_umbilical);
    for n in [3, 4] {
        let rs = reports(&gen_isotropic(n, 1.0, 2.0, None).unwrap(), 3, false).unwrap();
        let lam = rs.iter().map(|r| r.flags.lambda.map_or(f64::MAX, f64::abs)).fold(0.0, f64::max);
        let a_h = rs
            .iter()
            .map(|r| r.a_h.iter().flatten().map(|x| x * x).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        let flags = rs
            .iter()
            .all(|r| r.flags.isotropic && r.flags.pseudo_umbilical && r.flags.marginally_trapped);
        umb &= rs.iter().all(|r| !r.flags.totally_umbilical);
        check(flags && lam < 1e-6 && a_h < 1e-5, format!("isotropic n={n} lambda {lam:.1e} |A_H| {a_h:.1e}"));
    }
    let ruled = reports(&gen_ruled_flat("sin(t)", &CurveInput::kappa_half(), None).unwrap(), 6, false).unwrap();
    let k = ruled.iter().map(|r| r.gauss_curvature.unwrap().abs()).fold(0.0, f64::max);
    umb &= ruled.iter().all(|r| !r.flags.totally_umbilical);
    check(k < 1e-6, format!("ruled |K| {k:.1e}"));
    let prod = reports(&gen_product(&CurveInput::circle(), (-1.0, 1.0)).unwrap(), 6, false).unwrap();
    let a = prod.iter().map(|r| r.alpha.abs()).fold(0.0, f64::max);
    umb &= prod.iter().all(|r| !r.flags.totally_umbilical);
    check(a < 1e-8, format!("product |alpha| {a:.1e}"));
    check(umb, format!("totally umbilical never {umb}"));
    (ok, msgs.join(", "))
}

fn criterion_4() -> Outcome {
    let sol = solve_alpha_hat_ode(3, -1.0, 1.0, (1.0, 1.0), (0.0, 2.0), 1e-10).unwrap();
    let lin = sol.grid.iter().map(|&(s, a, _)| (a - 1.0 - s).abs()).fold(0.0, f64::max);
    let reached = sol.grid.last().map(|g| g.0) == Some(2.0);
    let mut worst: f64 = 0.0;
    let mut flags = true;
    for n in [3usize, 4] {
        let spec = gen_pseudo_umbilical_n(n, -1, 1.0, (1.0, 0.0), (0.0, 0.5)).unwrap();
        let nf = n as f64;
        let mut rng = rng(40 + n as u64);
        let d = spec.param_domain();
        for _ in 0..20 {
            let p: Vec<f64> = d
                .iter()
                .map(|&(a, b)| a + (b - a) * rng.gen_range(0.05..0.95))
                .collect();
            let r = analyze_point(&spec, &p, &Tolerances::default(), &AnalysisOptions { structure: false, seed: 0 })
                .unwrap();
            let mean = r.beta.iter().sum::<f64>() / (nf - 1.0);
            let spread = r.beta.iter().map(|b| (b - mean).abs()).fold(0.0, f64::max);
            let rel = r.e1_alpha + r.alpha * r.alpha + (2.0 * nf - 2.0) / (nf - 2.0) * mean;
            let ea = r.ea_alpha.iter().map(|x| x.abs()).fold(0.0, f64::max);
            worst = worst.max(rel.abs()).max(spread).max(ea);
            flags &= r.flags.pseudo_umbilical && r.flags.pseudo_umbilical_alt;
        }
    }
    (
        lin < 1e-8 && reached && worst < 1e-5 && flags,
        format!("linear {lin:.1e}, n=3,4 relation/spread/e_a(alpha) {worst:.1e}, flags {flags}"),
    )
}

fn criterion_5() -> Outcome {
    let c = integrate_lc2_curve(&|_| -0.5, standard_initial_data(), (0.0, 2.0 * PI), 1e-10, 629).unwrap();
    let mut dev: f64 = 0.0;
    for s in &c.samples {
        let (co, si) = (s.t.cos(), s.t.sin());
        let (a, b) = ((co + 1.0) / 2.0, 1.0 - co);
        // (a v1 + b v2 + sin t v3) in coordinates
        let closed = [FRAC_1_SQRT_2 * (a + b), si, FRAC_1_SQRT_2 * (a - b)];
        for i in 0..3 {
            dev = dev.max((s.gamma[i] - closed[i]).abs());
        }
    }
    let drift = c.max_constraint_drift();
    let long = integrate_lc2_curve(&|_| -0.5, standard_initial_data(), (0.0, 4.0 * PI), 1e-8, 400).unwrap();
    let long_drift = long.max_constraint_drift();
    let k = c.recomputed_kappa().iter().map(|(_, k)| (k + 0.5).abs()).fold(0.0, f64::max);
    (
        dev < 1e-6 && drift < 1e-6 && long_drift < 1e-6 && k < 1e-6,
        format!("closed form {dev:.1e}, drift {drift:.1e} (4 pi at 1e-8: {long_drift:.1e}), kappa {k:.1e}"),
    )
}

fn criterion_6() -> Outcome {
    let tol = Tolerances::default();
    let mut worst: f64 = 0.0;
    let mut worst_closed: f64 = 0.0;
    // metric ds^2 + a^2 dt^2, so K = -a_ss / a
    let cases: [(&str, fn(f64, f64) -> f64); 2] = [
        ("2 + s*t/2 + sin(s)/4", |s, t| (s.sin() / 4.0) / (2.0 + s * t / 2.0 + s.sin() / 4.0)),
        ("2 + sin(s)", |s, _| s.sin() / (2.0 + s.sin())),
    ];
    for (a, k_closed) in cases {
        let spec = surface_over_circle(a, [(-1.0, 1.0), (-1.0, 1.0)]).unwrap();
        for p in interior(&spec, 7) {
            let r = analyze_point(&spec, &p, &tol, &AnalysisOptions { structure: false, seed: 0 }).unwrap();
            let ke = r.gauss_curvature.unwrap();
            let ki = intrinsic_gauss_curvature(&spec, &p, &tol).unwrap();
            worst = worst.max((ke - ki).abs());
            worst_closed = worst_closed.max((ke - k_closed(p[0], p[1])).abs());
        }
    }
    (
        worst < 1e-3 && worst_closed < 1e-10,
        format!("extrinsic vs intrinsic {worst:.1e}, extrinsic vs closed form {worst_closed:.1e}"),
    )
}

fn criterion_7() -> Outcome {
    let mut rng = rng(7);
    let mut jet_err: f64 = 0.0;
    let mut rt_err: f64 = 0.0;
    for _ in 0..100 {
        let e = random_expr(&mut rng, 4);
        let spec = scalar_spec(&e);
        let again = parse_immersion_spec(&spec.to_dsl()).unwrap();
        for _ in 0..3 {
            let p = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let jet = eval_jet2(&spec, &p).unwrap();
            let (g, h) = fd_derivatives(&|q| value(&spec, q), p, 1e-3);
            for i in 0..2 {
                jet_err = jet_err.max((jet.first[0][i] - g[i]).abs() / (1.0 + g[i].abs()));
                for j in 0..2 {
                    jet_err = jet_err.max((jet.second[0][i][j] - h[i][j]).abs() / (1.0 + h[i][j].abs()));
                }
            }
            let (v1, v2) = (value(&spec, p), value(&again, p));
            rt_err = rt_err.max((v1 - v2).abs() / (1.0 + v1.abs()));
        }
    }
    let malformed = [
        "params s, t;\nambient 4;\nmap [s +, t, s, t];",
        "params s, t;\nambient 4;\nmap [s, (t, s, t];",
        "params s, t;\nambient 4;\nmap [s, q, s, t];",
        "params s, t;\nambient 4;\nmap [sin(s, t), t, s, t];",
        "params s, t;\nambient 4;\nmap [s ^ t ^ 2, t, s, t];",
        "params s, t;\nambient 4;\nmap [s $ t, t, s, t];",
        "params s, t\nambient 4;\nmap [s, t, s, t];",
        "params s, t;\nambient 4;\nmap [s, t, s, t,];",
        "params s, t;\nparams u;\nambient 4;\nmap [s, t, s, t];",
        "params s, t;\nambient 4;\nmap [s, t, s, 2 3];",
    ];
    let mut positioned = 0;
    for m in malformed {
        if let Err(Error::Syntax { .. } | Error::Undeclared { .. } | Error::Arity { .. }) = parse_immersion_spec(m) {
            positioned += 1;
        }
    }
    (
        jet_err < 1e-7 && rt_err < 1e-14 && positioned == malformed.len(),
        format!(
            "jet vs FD {jet_err:.1e}, round trip {rt_err:.1e}, positioned errors {positioned}/{}",
            malformed.len()
        ),
    )
}

fn criterion_8() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let gen = conecyl(&["generate", "pseudo_umbilical_surface", "c1=1", "--out", "s.dsl"], dir.path());
    if !gen.status.success() {
        return (false, "generate failed".into());
    }
    let v1 = conecyl(&["verify"], dir.path());
    let v2 = conecyl(&["verify"], dir.path());
    let a1 = conecyl(&["analyze", "s.dsl", "--grid", "16x16"], dir.path());
    let a2 = conecyl(&["analyze", "s.dsl", "--grid", "16x16"], dir.path());
    let same_v = v1.stdout == v2.stdout && v1.status.code() == v2.status.code();
    let same_a = a1.stdout == a2.stdout && a1.status.success() && !a1.stdout.is_empty();
    (
        same_v && same_a,
        format!(
            "verify identical {same_v} ({} bytes), analyze identical {same_a} ({} bytes)",
            v1.stdout.len(),
            a1.stdout.len()
        ),
    )
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("frame lemma suite", criterion_1),
        ("structure equations", criterion_2),
        ("classification round trips", criterion_3),
        ("profile ODE closure", criterion_4),
        ("curve suite", criterion_5),
        ("curvature cross-oracle", criterion_6),
        ("parser and jet suite", criterion_7),
        ("determinism", criterion_8),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (ok, detail) = f();
        println!("criterion {} {name}: {} ({detail})", i + 1, if ok { "PASS" } else { "FAIL" });
        if !ok {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
