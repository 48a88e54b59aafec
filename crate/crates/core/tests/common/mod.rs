#![allow(dead_code)]

use conecyl::expr::{parse_immersion_spec, ImmersionSpec};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::process::{Command, Output};

/// Random smooth expression in `x, y` that stays finite and away from
/// domain faults on `[-1, 1]^2`.
pub fn random_expr(rng: &mut StdRng, depth: u32) -> String {
    if depth == 0 || rng.gen_bool(0.2) {
        return match rng.gen_range(0..4) {
            0 => "x".into(),
            1 => "y".into(),
            2 => format!("{:.3}", rng.gen_range(-2.0..2.0)),
            _ => "pi".into(),
        };
    }
    let a = random_expr(rng, depth - 1);
    match rng.gen_range(0..11) {
        0 => format!("({a} + {})", random_expr(rng, depth - 1)),
        1 => format!("({a} - {})", random_expr(rng, depth - 1)),
        2 => format!("{a} * {}", random_expr(rng, depth - 1)),
        3 => format!("{a} / (2 + cos({}))", random_expr(rng, depth - 1)),
        4 => format!("sin({a})"),
        5 => format!("cos({a})"),
        6 => format!("exp(sin({a}))"),
        7 => format!("log(1.5 + sin({a}))"),
        8 => format!("sqrt(1 + ({a})^2)"),
        9 => format!("(cos({a}))^{}", rng.gen_range(2..4)),
        _ => format!("-{a}"),
    }
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Spec with a single interesting component in two parameters.
pub fn scalar_spec(expr: &str) -> ImmersionSpec {
    parse_immersion_spec(&format!(
        "params x, y;\nambient 4;\ndomain x in [-2, 2];\ndomain y in [-2, 2];\nmap [{expr}, 0, 0, 0];\n"
    ))
    .unwrap_or_else(|e| panic!("{expr}: {e}"))
}

/// Scalar value of the first component.
pub fn value(spec: &ImmersionSpec, p: [f64; 2]) -> f64 {
    spec.eval_point(&p).unwrap()[0]
}

/// Richardson-extrapolated central differences of `f`: gradient and Hessian.
pub fn fd_derivatives(f: &dyn Fn([f64; 2]) -> f64, p: [f64; 2], h: f64) -> ([f64; 2], [[f64; 2]; 2]) {
    let shift = |d: [f64; 2]| f([p[0] + d[0], p[1] + d[1]]);
    let first = |i: usize, h: f64| {
        let mut e = [0.0; 2];
        e[i] = h;
        (shift(e) - shift([-e[0], -e[1]])) / (2.0 * h)
    };
    let second = |i: usize, j: usize, h: f64| {
        let mut a = [0.0; 2];
        let mut b = [0.0; 2];
        a[i] = h;
        b[j] = h;
        if i == j {
            (shift(a) - 2.0 * f(p) + shift([-a[0], -a[1]])) / (h * h)
        } else {
            (shift([a[0] + b[0], a[1] + b[1]]) - shift([a[0] - b[0], a[1] - b[1]])
                - shift([b[0] - a[0], b[1] - a[1]])
                + shift([-a[0] - b[0], -a[1] - b[1]]))
                / (4.0 * h * h)
        }
    };
    let rich = |d1: f64, d2: f64| (4.0 * d2 - d1) / 3.0;
    let g = [rich(first(0, h), first(0, h / 2.0)), rich(first(1, h), first(1, h / 2.0))];
    let mut hess = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            hess[i][j] = rich(second(i, j, h), second(i, j, h / 2.0));
        }
    }
    (g, hess)
}

pub fn conecyl(args: &[&str], dir: &std::path::Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conecyl"))
        .args(args)
        .current_dir(dir)
        .env_remove("CONECYL_CONFIG")
        .output()
        .expect("binary runs")
}
