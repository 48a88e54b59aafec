//! Classification predicates, each evaluated through two independent routes
//! where two characterizations exist.

use super::{ricci_normal_curvature, MeanCurvature, SecondFundamentalForm};
use crate::config::Tolerances;
use crate::frame::AdaptedFrame;
use crate::lorentz::SymmetricOperator;
use serde::{Deserialize, Serialize};

/// Number of tangent directions sampled by the isotropy test.
pub const ISOTROPY_DIRECTIONS: usize = 128;

/// Classification flags at one point. The primary flag follows the
/// definition; the `*_alt` fields hold the frame-scalar characterization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flags {
    pub pseudo_umbilical: bool,
    pub pseudo_umbilical_alt: bool,
    pub isotropic: bool,
    pub isotropic_alt: bool,
    /// Mean of the sampled `<h(X,X),h(X,X)>` when `isotropic`.
    pub lambda: Option<f64>,
    /// Spread (max - min) of the sampled quartic form.
    pub isotropy_spread: f64,
    pub flat: Option<bool>,
    pub flat_alt: Option<bool>,
    pub flat_normal_bundle: bool,
    pub flat_normal_bundle_alt: bool,
    pub marginally_trapped: bool,
    pub minimal: bool,
    pub totally_umbilical: bool,
    pub a_h_zero: bool,
    pub alpha_zero: bool,
    /// Names of predicates whose two routes disagree.
    pub inconsistent: Vec<String>,
}

impl Flags {
    /// Named boolean view used for aggregation; alternates included.
    pub fn entries(&self) -> Vec<(&'static str, bool)> {
        let mut v = vec![
            ("pseudo_umbilical", self.pseudo_umbilical),
            ("pseudo_umbilical_alt", self.pseudo_umbilical_alt),
            ("isotropic", self.isotropic),
            ("isotropic_alt", self.isotropic_alt),
            ("flat_normal_bundle", self.flat_normal_bundle),
            ("flat_normal_bundle_alt", self.flat_normal_bundle_alt),
            ("marginally_trapped", self.marginally_trapped),
            ("minimal", self.minimal),
            ("totally_umbilical", self.totally_umbilical),
            ("a_h_zero", self.a_h_zero),
            ("alpha_zero", self.alpha_zero),
        ];
        if let (Some(a), Some(b)) = (self.flat, self.flat_alt) {
            v.push(("flat", a));
            v.push(("flat_alt", b));
        }
        v.push(("consistent", self.inconsistent.is_empty()));
        v
    }
}

/// `i`-th element of the van der Corput sequence in base `b`.
fn radical_inverse(mut i: u64, b: u64) -> f64 {
    let (mut f, mut r) = (1.0, 0.0);
    let bf = b as f64;
    while i > 0 {
        f /= bf;
        r += f * (i % b) as f64;
        i /= b;
    }
    r
}

const PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic unit vectors in `R^n` from a Halton sequence starting at
/// index `seed * count + 1`.
pub fn halton_directions(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(count);
    let mut i = seed.wrapping_mul(count as u64).wrapping_add(1);
    while out.len() < count {
        let v: Vec<f64> = if n == 2 {
            let a = 2.0 * std::f64::consts::PI * radical_inverse(i, 2);
            vec![a.cos(), a.sin()]
        } else {
            (0..n)
                .map(|d| 2.0 * radical_inverse(i, PRIMES[d % PRIMES.len()]) - 1.0)
                .collect()
        };
        i = i.wrapping_add(1);
        let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if r > 1e-3 {
            out.push(v.iter().map(|x| x / r).collect());
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
pub fn classify(
    frame: &AdaptedFrame,
    sff: &SecondFundamentalForm,
    a_theta: &SymmetricOperator,
    a_xi: &SymmetricOperator,
    mc: &MeanCurvature,
    k: Option<f64>,
    k_perp: Option<f64>,
    tol: &Tolerances,
    seed: u64,
) -> crate::error::Result<Flags> {
    let t = tol.class;
    let n = frame.n();
    let nf = n as f64;
    let alpha = frame.alpha;
    let x = frame.e1_alpha + alpha * alpha;
    let ea_max = frame.ea_alpha.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut inconsistent = Vec::new();

    let pu = mc.a_h.umbilicity_defect() < t;
    let pu_alt = if n == 2 {
        x.abs() < t && ea_max < t && frame.beta[0].abs() < t
    } else {
        let mean = frame.beta.iter().sum::<f64>() / (nf - 1.0);
        let spread = frame.beta.iter().fold(0.0_f64, |m, b| m.max((b - mean).abs()));
        let rel = x + (2.0 * nf - 2.0) / (nf - 2.0) * mean;
        spread < t && rel.abs() < t && ea_max < t
    };
    if pu != pu_alt {
        inconsistent.push("pseudo_umbilical".to_string());
    }

    let mt = mc.norm2.abs() < t && mc.h.euclid_norm() > t;
    let a_h_zero = mc.a_h.norm() < t;

    let dirs = halton_directions(n, ISOTROPY_DIRECTIONS, seed);
    let (mut lo, mut hi, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
    for d in &dirs {
        let q = sff.quartic(d);
        lo = lo.min(q);
        hi = hi.max(q);
        sum += q;
    }
    let spread = hi - lo;
    let iso = spread < t;
    let iso_alt = if n == 2 {
        frame.beta[0].abs() < t
    } else {
        mt && a_h_zero
    };
    if iso != iso_alt {
        inconsistent.push("isotropic".to_string());
    }

    let (flat, flat_alt) = match k {
        Some(k) => {
            let a = k.abs() < t;
            let b = x.abs() < t;
            if a != b {
                inconsistent.push("flat".to_string());
            }
            (Some(a), Some(b))
        }
        None => (None, None),
    };

    let fnb = match k_perp {
        Some(kp) => kp.abs() < t,
        None => {
            let mut worst: f64 = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let (ct, cx) = ricci_normal_curvature(sff, a_theta.matrix(), i, j);
                    worst = worst.max(ct.abs()).max(cx.abs());
                }
            }
            worst < t
        }
    };
    let fnb_alt = ea_max < t;
    if fnb != fnb_alt {
        inconsistent.push("flat_normal_bundle".to_string());
    }

    Ok(Flags {
        pseudo_umbilical: pu,
        pseudo_umbilical_alt: pu_alt,
        isotropic: iso,
        isotropic_alt: iso_alt,
        lambda: iso.then(|| sum / dirs.len() as f64),
        isotropy_spread: spread,
        flat,
        flat_alt,
        flat_normal_bundle: fnb,
        flat_normal_bundle_alt: fnb_alt,
        marginally_trapped: mt,
        minimal: mc.h.euclid_norm() < t,
        totally_umbilical: a_theta.umbilicity_defect() < t && a_xi.umbilicity_defect() < t,
        a_h_zero,
        alpha_zero: alpha.abs() < t,
        inconsistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directions_are_unit_and_deterministic() {
        for n in 2..6 {
            let a = halton_directions(n, 128, 0);
            assert_eq!(a.len(), 128);
            for v in &a {
                let r: f64 = v.iter().map(|x| x * x).sum();
                assert!((r - 1.0).abs() < 1e-12);
            }
            assert_eq!(a, halton_directions(n, 128, 0));
            assert_ne!(a, halton_directions(n, 128, 1));
        }
    }
}
