//! Generators for the explicit families of submanifolds of `LC^n x R`.
//! Every generator assembles DSL text and parses it, so its output always
//! round-trips through `to_dsl`.

use super::curve::{curve_kappa, integrate_lc2_curve, standard_initial_data, CurveOnCone};
use super::ode::solve_alpha_hat_ode;
use crate::error::{Error, Result};
use crate::expr::ast::fmt_num;
use crate::expr::{parse_immersion_spec, ImmersionSpec, JetSource, Table};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

/// Polar angles stay this far from the poles, where the chart degenerates.
const POLE_MARGIN: f64 = 0.4;
const CURVE_CHECK_POINTS: usize = 33;

fn num(x: f64) -> String {
    if x.is_sign_negative() {
        format!("(-{})", fmt_num(-x))
    } else {
        fmt_num(x)
    }
}

#[derive(Default)]
struct SpecText {
    params: Vec<String>,
    domain: Vec<(f64, f64)>,
    cone: bool,
    tables: Vec<(String, Table)>,
    map: Vec<String>,
}

impl SpecText {
    fn param(&mut self, name: &str, lo: f64, hi: f64) {
        self.params.push(name.to_string());
        self.domain.push((lo.min(hi), lo.max(hi)));
    }

    fn build(&self) -> Result<ImmersionSpec> {
        let mut s = String::new();
        let _ = writeln!(s, "params {};", self.params.join(", "));
        let _ = writeln!(s, "ambient {};", self.map.len());
        if self.cone {
            let _ = writeln!(s, "mode cone;");
        }
        for (p, (a, b)) in self.params.iter().zip(&self.domain) {
            let _ = writeln!(s, "domain {p} in [{}, {}];", num(*a), num(*b));
        }
        for (name, t) in &self.tables {
            let rows: Vec<String> = t
                .rows()
                .iter()
                .map(|r| format!("  {}, {}, {}, {}", num(r[0]), num(r[1]), num(r[2]), num(r[3])))
                .collect();
            let _ = writeln!(s, "table {name} = [\n{}\n];", rows.join(";\n"));
        }
        let _ = writeln!(s, "map [\n  {}\n];", self.map.join(",\n  "));
        parse_immersion_spec(&s)
    }
}

/// Angle parameter names `t2..tn` for `S^{n-1}`.
fn angle_names(n: usize) -> Vec<String> {
    (2..=n).map(|i| format!("t{i}")).collect()
}

/// Components of the unit sphere `S^{n-1} in R^n` in hyperspherical angles.
fn sphere_components(angles: &[String]) -> Vec<String> {
    let m = angles.len();
    let mut out = Vec::with_capacity(m + 1);
    let mut prefix = String::new();
    for (i, a) in angles.iter().enumerate() {
        out.push(format!("{prefix}cos({a})"));
        prefix.push_str(&format!("sin({a})*"));
        if i + 1 == m {
            out.push(prefix.trim_end_matches('*').to_string());
        }
    }
    out
}

fn add_angles(st: &mut SpecText, angles: &[String]) {
    for (i, a) in angles.iter().enumerate() {
        if i + 1 == angles.len() {
            st.param(a, -PI, PI);
        } else {
            st.param(a, POLE_MARGIN, PI - POLE_MARGIN);
        }
    }
}

/// The totally umbilical `gamma = (tau, tau Theta)` in the light cone of
/// `E_1^{n+1}`, parametrized by `n - 1` angles.
pub fn gen_sigma_tau(n: usize, tau: f64) -> Result<ImmersionSpec> {
    if n < 3 {
        return Err(Error::Dimension { expected: 3, got: n });
    }
    positive("tau", tau)?;
    let angles = angle_names(n);
    let mut st = SpecText {
        cone: true,
        ..Default::default()
    };
    add_angles(&mut st, &angles);
    st.map.push(num(tau));
    for c in sphere_components(&angles) {
        st.map.push(format!("{}*{c}", num(tau)));
    }
    st.build()
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{name} must be positive, got {x}")))
    }
}

/// Arc-length curve on `LC^2`, in closed form (DSL text in `t`) or sampled.
#[derive(Debug, Clone)]
pub enum CurveInput {
    ClosedForm { components: [String; 3], t_range: (f64, f64) },
    Samples(CurveOnCone),
}

impl CurveInput {
    /// The curve with constant `kappa = -1/2` through `(1,0,1)/sqrt2`.
    pub fn kappa_half() -> Self {
        CurveInput::ClosedForm {
            components: [
                "(3 - cos(t))/(2*sqrt2)".into(),
                "sin(t)".into(),
                "(3*cos(t) - 1)/(2*sqrt2)".into(),
            ],
            t_range: (-PI, PI),
        }
    }

    /// `(1, cos t, sin t)`, also `kappa = -1/2`.
    pub fn circle() -> Self {
        CurveInput::ClosedForm {
            components: ["1".into(), "cos(t)".into(), "sin(t)".into()],
            t_range: (-PI, PI),
        }
    }

    pub fn t_range(&self) -> (f64, f64) {
        match self {
            CurveInput::ClosedForm { t_range, .. } => *t_range,
            CurveInput::Samples(c) => c.t_range(),
        }
    }

    /// The curve as a cone-mode spec in the single parameter `t`.
    pub fn to_spec(&self) -> Result<ImmersionSpec> {
        let mut st = SpecText {
            cone: true,
            ..Default::default()
        };
        let (a, b) = self.t_range();
        st.param("t", a, b);
        st.map = self.component_texts(&mut st.tables)?;
        st.build()
    }

    fn component_texts(&self, tables: &mut Vec<(String, Table)>) -> Result<Vec<String>> {
        match self {
            CurveInput::ClosedForm { components, .. } => {
                Ok(components.iter().map(|c| format!("({c})")).collect())
            }
            CurveInput::Samples(c) => {
                let [g1, g2, g3] = c.component_tables()?;
                for (name, t) in [("g1", g1), ("g2", g2), ("g3", g3)] {
                    tables.push((name.to_string(), t));
                }
                Ok(vec!["g1(t)".into(), "g2(t)".into(), "g3(t)".into()])
            }
        }
    }

    /// Checks the cone and arc-length conditions on a sample of `t` values.
    pub fn validate(&self) -> Result<()> {
        let spec = self.to_spec()?;
        let (a, b) = self.t_range();
        for i in 0..CURVE_CHECK_POINTS {
            let t = a + (b - a) * (i as f64 + 0.5) / CURVE_CHECK_POINTS as f64;
            let jet = spec.jet(&[t])?;
            curve_kappa(&jet.value, &jet.tangent(0), &jet.second_vec(0, 0), 1e-7)
                .map_err(|e| Error::Precondition(format!("curve at t = {t}: {e}")))?;
        }
        Ok(())
    }
}

/// Evaluable scalar expression in `t`, parsed through the DSL.
fn scalar_in_t(text: &str, t_range: (f64, f64)) -> Result<ImmersionSpec> {
    let mut st = SpecText::default();
    st.param("t", t_range.0, t_range.1);
    st.map = vec![format!("({text})"), "0".into(), "0".into()];
    st.build()
}

/// Flat ruled surface `((s + a(t)) gamma(t), s)`. Without `s_range` the
/// `s`-interval is chosen so that `s + a(t) >= 1/2`.
pub fn gen_ruled_flat(a_expr: &str, curve: &CurveInput, s_range: Option<(f64, f64)>) -> Result<ImmersionSpec> {
    curve.validate()?;
    let t_range = curve.t_range();
    let a = scalar_in_t(a_expr, t_range)?;
    let mut lo = f64::INFINITY;
    for i in 0..=1000 {
        let t = t_range.0 + (t_range.1 - t_range.0) * i as f64 / 1000.0;
        lo = lo.min(a.eval_point(&[t])?[0]);
    }
    let s_range = s_range.unwrap_or_else(|| {
        let s0 = 0.5 - lo;
        (s0, s0 + 2.0)
    });
    let s_min = s_range.0.min(s_range.1);
    if !(s_min + lo > 0.0) {
        return Err(Error::Domain {
            expr: format!("s + ({a_expr})"),
            point: vec![s_min],
            msg: format!("s + a(t) reaches {} <= 0 on the requested domain", s_min + lo),
        });
    }
    let mut st = SpecText::default();
    st.param("s", s_range.0, s_range.1);
    st.param("t", t_range.0, t_range.1);
    let comps = curve.component_texts(&mut st.tables)?;
    st.map = comps
        .iter()
        .map(|g| format!("(s + ({a_expr}))*{g}"))
        .chain(["s".to_string()])
        .collect();
    st.build()
}

/// The pseudo-umbilical, isotropic flat surface with offset `c1`.
pub fn gen_pseudo_umbilical_surface(c1: f64) -> Result<ImmersionSpec> {
    let s0 = (0.5 - c1).max(-1.0);
    let mut st = SpecText::default();
    st.param("s", s0, s0 + 2.0);
    st.param("t", -PI, PI);
    let r = format!("(s + {})", num(c1));
    st.map = vec![
        format!("-{r}*(cos(t) - 3)/(2*sqrt2)"),
        format!("{r}*sin(t)"),
        format!("{r}*(3*cos(t) - 1)/(2*sqrt2)"),
        "s".into(),
    ];
    st.build()
}

/// `((eps s + c0), (eps s + c0) Theta, s)` over the unit sphere `S^{n-1}`.
/// Without `s_range`, `eps s + c0` runs over `[max(c0 - 1, 1/2), +2]`.
pub fn gen_isotropic(n: usize, eps: f64, c0: f64, s_range: Option<(f64, f64)>) -> Result<ImmersionSpec> {
    if n <= 2 {
        return Err(Error::Dimension { expected: 3, got: n });
    }
    if eps != 1.0 && eps != -1.0 {
        return Err(Error::Precondition(format!("eps must be 1 or -1, got {eps}")));
    }
    let s_range = s_range.unwrap_or_else(|| {
        let r0 = (c0 - 1.0).max(0.5);
        ((r0 - c0) / eps, (r0 + 2.0 - c0) / eps)
    });
    let r_min = (eps * s_range.0 + c0).min(eps * s_range.1 + c0);
    if !(r_min > 0.0) {
        return Err(Error::Domain {
            expr: "eps*s + c0".into(),
            point: vec![s_range.0, s_range.1],
            msg: format!("eps*s + c0 reaches {r_min} <= 0"),
        });
    }
    let angles = angle_names(n);
    let mut st = SpecText::default();
    st.param("s", s_range.0, s_range.1);
    add_angles(&mut st, &angles);
    let r = format!("({}*s + {})", num(eps), num(c0));
    st.map.push(r.clone());
    for c in sphere_components(&angles) {
        st.map.push(format!("{r}*{c}"));
    }
    st.map.push("s".into());
    st.build()
}

/// Default `s`-interval of [`gen_pseudo_umbilical_n`].
pub const PSEUDO_UMBILICAL_N_RANGE: (f64, f64) = (0.0, 0.5);

/// `(a(s) gamma(t), s)` with `gamma` in `Sigma(a, tau)` and `a` solving the
/// profile ODE from `ivp` at `s_range.0`.
pub fn gen_pseudo_umbilical_n(
    n: usize,
    c: i32,
    tau: f64,
    ivp: (f64, f64),
    s_range: (f64, f64),
) -> Result<ImmersionSpec> {
    if n <= 2 {
        return Err(Error::Dimension { expected: 3, got: n });
    }
    if c != -1 {
        return Err(Error::Precondition(format!(
            "only the c = -1 base is implemented, got c = {c}"
        )));
    }
    positive("tau", tau)?;
    let sol = solve_alpha_hat_ode(n, c as f64, tau, ivp, s_range, 1e-12)?;
    if let Some(s) = sol.blow_down {
        return Err(Error::BlowDown { s });
    }
    let angles = angle_names(n);
    let mut st = SpecText::default();
    st.param("s", s_range.0, s_range.1);
    add_angles(&mut st, &angles);
    st.tables.push(("ah".into(), sol.to_table()?));
    let r = format!("{}*ah(s)", num(tau));
    st.map.push(r.clone());
    for comp in sphere_components(&angles) {
        st.map.push(format!("{r}*{comp}"));
    }
    st.map.push("s".into());
    st.build()
}

/// Product `(gamma(t), s)` of a cone curve with an interval.
pub fn gen_product(curve: &CurveInput, s_range: (f64, f64)) -> Result<ImmersionSpec> {
    curve.validate()?;
    let t_range = curve.t_range();
    let mut st = SpecText::default();
    st.param("s", s_range.0, s_range.1);
    st.param("t", t_range.0, t_range.1);
    st.map = curve.component_texts(&mut st.tables)?;
    st.map.push("s".into());
    st.build()
}

/// `(s, s/sqrt(t^2+1), s t/sqrt(t^2+1), s)`, which lies in `x1 = x4`.
pub fn gen_example61() -> Result<ImmersionSpec> {
    let mut st = SpecText::default();
    st.param("s", 0.5, 2.0);
    st.param("t", -1.0, 1.0);
    st.map = vec![
        "s".into(),
        "s/sqrt(t^2 + 1)".into(),
        "s*t/sqrt(t^2 + 1)".into(),
        "s".into(),
    ];
    st.build()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    SigmaTau,
    RuledFlat,
    PseudoUmbilicalSurface,
    Isotropic,
    PseudoUmbilicalN,
    Product,
    Example61,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::SigmaTau,
        Family::RuledFlat,
        Family::PseudoUmbilicalSurface,
        Family::Isotropic,
        Family::PseudoUmbilicalN,
        Family::Product,
        Family::Example61,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::SigmaTau => "sigma_tau",
            Family::RuledFlat => "ruled_flat",
            Family::PseudoUmbilicalSurface => "pseudo_umbilical_surface",
            Family::Isotropic => "isotropic",
            Family::PseudoUmbilicalN => "pseudo_umbilical_n",
            Family::Product => "product",
            Family::Example61 => "example61",
        }
    }

    pub fn from_name(s: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.name() == s)
    }

    /// Classification flags every interior point of the family must carry.
    pub fn advertised(self) -> &'static [&'static str] {
        match self {
            Family::SigmaTau => &[],
            Family::RuledFlat => &["flat", "flat_alt"],
            Family::PseudoUmbilicalSurface => &[
                "pseudo_umbilical",
                "pseudo_umbilical_alt",
                "isotropic",
                "isotropic_alt",
                "flat",
                "flat_alt",
                "flat_normal_bundle",
                "flat_normal_bundle_alt",
                "marginally_trapped",
                "a_h_zero",
                "consistent",
            ],
            Family::Isotropic => &[
                "isotropic",
                "isotropic_alt",
                "pseudo_umbilical",
                "pseudo_umbilical_alt",
                "flat_normal_bundle",
                "flat_normal_bundle_alt",
                "marginally_trapped",
                "a_h_zero",
                "consistent",
            ],
            Family::PseudoUmbilicalN => &[
                "pseudo_umbilical",
                "pseudo_umbilical_alt",
                "flat_normal_bundle",
                "flat_normal_bundle_alt",
                "consistent",
            ],
            Family::Product => &["alpha_zero"],
            Family::Example61 => &["pseudo_umbilical", "pseudo_umbilical_alt"],
        }
    }

    /// Option keys accepted by [`generate`].
    pub fn option_keys(self) -> &'static [&'static str] {
        match self {
            Family::SigmaTau => &["n", "tau"],
            Family::RuledFlat => &["a", "curve", "kappa", "s0", "s1"],
            Family::PseudoUmbilicalSurface => &["c1"],
            Family::Isotropic => &["n", "eps", "c0", "s0", "s1"],
            Family::PseudoUmbilicalN => &["n", "c", "tau", "a0", "a1", "s0", "s1"],
            Family::Product => &["curve", "kappa", "s0", "s1"],
            Family::Example61 => &[],
        }
    }
}

struct Opts<'a>(&'a BTreeMap<String, String>);

impl Opts<'_> {
    fn str_or<'b>(&'b self, k: &str, d: &'b str) -> &'b str {
        self.0.get(k).map_or(d, |s| s.as_str())
    }

    fn f64_or(&self, k: &str, d: f64) -> Result<f64> {
        match self.0.get(k) {
            None => Ok(d),
            Some(v) => v
                .trim()
                .parse()
                .map_err(|_| Error::Precondition(format!("option {k}: `{v}` is not a number"))),
        }
    }

    fn usize_or(&self, k: &str, d: usize) -> Result<usize> {
        match self.0.get(k) {
            None => Ok(d),
            Some(v) => v
                .trim()
                .parse()
                .map_err(|_| Error::Precondition(format!("option {k}: `{v}` is not a non-negative integer"))),
        }
    }

    fn range(&self) -> Result<Option<(f64, f64)>> {
        match (self.0.get("s0"), self.0.get("s1")) {
            (None, None) => Ok(None),
            _ => Ok(Some((self.f64_or("s0", 0.0)?, self.f64_or("s1", 1.0)?))),
        }
    }

    fn curve(&self) -> Result<CurveInput> {
        match self.str_or("curve", "kappa_half") {
            "kappa_half" => Ok(CurveInput::kappa_half()),
            "circle" => Ok(CurveInput::circle()),
            "integrated" => {
                let t_range = (0.0, 2.0 * PI);
                let k = scalar_in_t(self.str_or("kappa", "-1/2"), t_range)?;
                let kappa = |t: f64| k.eval_point(&[t]).map_or(f64::NAN, |v| v[0]);
                let c = integrate_lc2_curve(&kappa, standard_initial_data(), t_range, 1e-11, 257)?;
                Ok(CurveInput::Samples(c))
            }
            other => Err(Error::Precondition(format!(
                "unknown curve `{other}` (expected kappa_half, circle or integrated)"
            ))),
        }
    }
}

/// Builds a family member from string options, as given on the command line.
pub fn generate(family: Family, options: &BTreeMap<String, String>) -> Result<ImmersionSpec> {
    if let Some(k) = options.keys().find(|k| !family.option_keys().contains(&k.as_str())) {
        return Err(Error::Precondition(format!(
            "unknown option `{k}` for {} (accepted: {})",
            family.name(),
            family.option_keys().join(", ")
        )));
    }
    let o = Opts(options);
    match family {
        Family::SigmaTau => gen_sigma_tau(o.usize_or("n", 3)?, o.f64_or("tau", 1.0)?),
        Family::RuledFlat => gen_ruled_flat(o.str_or("a", "0"), &o.curve()?, o.range()?),
        Family::PseudoUmbilicalSurface => gen_pseudo_umbilical_surface(o.f64_or("c1", 1.0)?),
        Family::Isotropic => gen_isotropic(
            o.usize_or("n", 3)?,
            o.f64_or("eps", 1.0)?,
            o.f64_or("c0", 2.0)?,
            o.range()?,
        ),
        Family::PseudoUmbilicalN => {
            let c = o.f64_or("c", -1.0)?;
            if c.fract() != 0.0 {
                return Err(Error::Precondition(format!("c must be -1, 0 or 1, got {c}")));
            }
            gen_pseudo_umbilical_n(
                o.usize_or("n", 3)?,
                c as i32,
                o.f64_or("tau", 1.0)?,
                (o.f64_or("a0", 1.0)?, o.f64_or("a1", 0.0)?),
                o.range()?.unwrap_or(PSEUDO_UMBILICAL_N_RANGE),
            )
        }
        Family::Product => gen_product(&o.curve()?, o.range()?.unwrap_or((-1.0, 1.0))),
        Family::Example61 => gen_example61(),
    }
}
