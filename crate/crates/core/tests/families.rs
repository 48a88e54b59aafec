mod common;

use common::fd_derivatives;
use conecyl::constructions::*;
use conecyl::expr::{eval_jet2, ImmersionSpec, JetSource};
use conecyl::frame::{build_adapted_frame, frame_core};
use conecyl::invariants::cone::cone_shape_operators;
use conecyl::invariants::{analyze_point, second_fundamental_form, AnalysisOptions, InvariantReport};
use conecyl::report::verify::surface_over_circle;
use conecyl::Tolerances;
use std::collections::BTreeMap;

fn midpoints(spec: &ImmersionSpec, per_axis: usize) -> Vec<Vec<f64>> {
    let d = spec.param_domain();
    let total = per_axis.pow(d.len() as u32);
    (0..total)
        .map(|mut k| {
            d.iter()
                .map(|&(a, b)| {
                    let idx = k % per_axis;
                    k /= per_axis;
                    a + (b - a) * (0.1 + 0.8 * (idx as f64 + 0.5) / per_axis as f64)
                })
                .collect()
        })
        .collect()
}

fn analyze(spec: &ImmersionSpec, p: &[f64]) -> InvariantReport {
    let opts = AnalysisOptions { structure: false, seed: 0 };
    analyze_point(spec, p, &Tolerances::default(), &opts).unwrap()
}

#[test]
fn every_family_sets_its_advertised_flags() {
    for fam in Family::ALL {
        if fam == Family::SigmaTau {
            continue;
        }
        let spec = generate(fam, &BTreeMap::new()).unwrap();
        for p in midpoints(&spec, 3) {
            let r = analyze(&spec, &p);
            let entries: BTreeMap<_, _> = r.flags.entries().into_iter().collect();
            for flag in fam.advertised() {
                assert_eq!(entries.get(flag), Some(&true), "{} {flag} at {p:?}", fam.name());
            }
        }
    }
}

#[test]
fn sigma_tau_shape_operators() {
    let tol = Tolerances::default();
    for (n, tau) in [(3, 2.0), (4, 0.7)] {
        let spec = gen_sigma_tau(n, tau).unwrap();
        for p in midpoints(&spec, 2) {
            let c = cone_shape_operators(&eval_jet2(&spec, &p).unwrap(), &tol).unwrap();
            assert!(c.cone_residual.abs() < 1e-12);
            assert!(c.a_gamma_defect < 1e-10);
            for ev in &c.a_eta_eigenvalues {
                assert!((ev - 1.0 / (2.0 * tau * tau)).abs() < 1e-10, "{ev}");
            }
        }
    }
}

#[test]
fn product_has_constant_beta() {
    let spec = gen_product(&CurveInput::kappa_half(), (-1.0, 1.0)).unwrap();
    let tol = Tolerances::default();
    for p in midpoints(&spec, 4) {
        let jet = eval_jet2(&spec, &p).unwrap();
        let frame = frame_core(&jet, &tol).unwrap();
        assert!(frame.alpha.abs() < 1e-10);
        assert!((frame.beta[0] - 0.5).abs() < 1e-9, "{:?}", frame.beta);
        let sff = second_fundamental_form(&jet, &frame);
        assert!((sff.pair(1, 1, 1, 1) - 2.0 * frame.beta[0]).abs() < 1e-9);
    }
}

#[test]
fn linear_profile_reproduces_isotropic_family() {
    let a = gen_pseudo_umbilical_n(3, -1, 1.0, (1.0, 1.0), (0.0, 1.0)).unwrap();
    let b = gen_isotropic(3, 1.0, 1.0, Some((0.0, 1.0))).unwrap();
    assert_eq!(a.param_domain(), b.param_domain());
    for p in midpoints(&a, 3) {
        let (x, y) = (a.eval_point(&p).unwrap(), b.eval_point(&p).unwrap());
        for i in 0..x.len() {
            assert!((x[i] - y[i]).abs() < 1e-12, "{p:?}");
        }
    }
}

#[test]
fn ruled_metric_is_warped() {
    let spec = gen_ruled_flat("sin(t)", &CurveInput::kappa_half(), None).unwrap();
    for p in midpoints(&spec, 5) {
        let g = eval_jet2(&spec, &p).unwrap().metric();
        let w = p[0] + p[1].sin();
        assert!((g[0][0] - 1.0).abs() < 1e-12);
        assert!(g[0][1].abs() < 1e-12);
        assert!((g[1][1] - w * w).abs() < 1e-12);
    }
}

#[test]
fn alpha_is_log_derivative_of_profile() {
    let sol = solve_alpha_hat_ode(3, -1.0, 1.0, (1.0, 0.3), (0.0, 0.5), 1e-12).unwrap();
    let spec = gen_pseudo_umbilical_n(3, -1, 1.0, (1.0, 0.3), (0.0, 0.5)).unwrap();
    let tol = Tolerances::default();
    for &(s, a, ap) in sol.grid.iter().step_by(4).skip(1) {
        if s >= 0.5 {
            break;
        }
        let frame = frame_core(&eval_jet2(&spec, &[s, 1.2, 0.3]).unwrap(), &tol).unwrap();
        assert!((frame.alpha - ap / a).abs() < 1e-9, "s={s}");
        for b in &frame.beta {
            assert!((b - sol.beta(a, ap)).abs() < 1e-8);
        }
    }

    let spec = gen_isotropic(3, -1.0, 5.0, Some((0.0, 4.0))).unwrap();
    for p in midpoints(&spec, 3) {
        let r = analyze(&spec, &p);
        assert!((r.alpha + 1.0 / (5.0 - p[0])).abs() < 1e-10);
        assert!(r.flags.isotropic && r.flags.pseudo_umbilical);
    }
}

/// `a^2 (a_s^2 + 2k) + 2 a a_tt - 3 a_t^2` with `k = -1/2`, from finite
/// differences of the profile.
fn isotropy_defect(profile: &dyn Fn(f64, f64) -> f64, s: f64, t: f64) -> f64 {
    let v = profile(s, t);
    let (g, h) = fd_derivatives(&|p: [f64; 2]| profile(p[0], p[1]), [s, t], 1e-3);
    v * v * (g[0] * g[0] - 1.0) + 2.0 * v * h[1][1] - 3.0 * g[1] * g[1]
}

#[test]
fn isotropy_matches_profile_equation() {
    let r3 = 3f64.sqrt();
    let cases: Vec<(&str, Box<dyn Fn(f64, f64) -> f64>, bool)> = vec![
        ("s + 1", Box::new(|s, _| s + 1.0), true),
        ("3 - s", Box::new(|s, _| 3.0 - s), true),
        (
            "s/(2 + 1.7320508075688772*cos(t))",
            Box::new(move |s, t| s / (2.0 + r3 * t.cos())),
            true,
        ),
        ("s*s", Box::new(|s, _| s * s), false),
        ("s + 0.2*sin(t)", Box::new(|s, t| s + 0.2 * t.sin()), false),
        ("exp(s/2)", Box::new(|s, _| (s / 2.0).exp()), false),
    ];
    for (expr, f, iso) in cases {
        let spec = surface_over_circle(expr, [(0.5, 2.0), (-2.0, 2.0)]).unwrap();
        for p in midpoints(&spec, 4) {
            let d = isotropy_defect(f.as_ref(), p[0], p[1]);
            assert_eq!(d.abs() < 1e-6, iso, "{expr} defect {d} at {p:?}");
            let r = analyze(&spec, &p);
            assert_eq!(r.flags.isotropic, iso, "{expr} at {p:?}");
            assert_eq!(r.flags.isotropic_alt, iso, "{expr} at {p:?}");
        }
    }
}

#[test]
fn ruled_alpha_gradient_at_a_point() {
    let curve = CurveInput::ClosedForm {
        components: ["1".into(), "cos(t)".into(), "sin(t)".into()],
        t_range: (-0.5, 0.5),
    };
    let spec = gen_ruled_flat("t", &curve, Some((0.75, 2.5))).unwrap();
    let tol = Tolerances::default();
    // alpha = 1/(s + t), so d alpha/dt = -1/(s + t)^2
    for (p, want) in [([1.0, 0.0], -1.0), ([2.0, 0.0], -0.25), ([1.5, 0.3], -1.0 / 3.24)] {
        let f = build_adapted_frame(&spec, &p, &tol).unwrap();
        assert!((f.alpha - 1.0 / (p[0] + p[1])).abs() < 1e-12);
        assert!((f.alpha_grad[1] - want).abs() < 1e-7, "{p:?}: {}", f.alpha_grad[1]);
    }

    let flat = gen_ruled_flat("0", &curve, Some((1.0, 3.0))).unwrap();
    let f = build_adapted_frame(&flat, &[2.0, 0.1], &tol).unwrap();
    assert!((f.alpha - 0.5).abs() < 1e-12);
}
