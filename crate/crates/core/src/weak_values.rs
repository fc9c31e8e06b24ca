//! Weak values of the ancilla photon number.
//!
//! For pre-selection `|Φ_1⟩` and post-selection `⟨Φ_2|` the weak value of
//! `n̂` is `⟨Φ_2|n̂|Φ_1⟩ / ⟨Φ_2|Φ_1⟩`. Its imaginary part decides whether the
//! weakly coupled two-mode squeezed vacuum gains or loses entanglement.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{AncillaSpec, FockVector, PostSelector, QuadraturePhase};

/// Relative overlap below which a post-selection is declared unusable.
pub const DEFAULT_ORTHO_THRESHOLD: f64 = 1e-8;

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakValue {
    pub value: C64,
    /// `|⟨Φ_2|Φ_1⟩|`
    pub overlap_mag: f64,
}

/// Weak moments `O^1_W .. O^m_W`; `moments[0]` is the first moment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakMoments {
    pub moments: Vec<C64>,
}

impl WeakMoments {
    /// `O^m_W` for `m ≥ 1`.
    pub fn get(&self, m: usize) -> Option<C64> {
        m.checked_sub(1).and_then(|i| self.moments.get(i).copied())
    }
}

/// Bra components and the overlap `⟨Φ_2|Φ_1⟩`, rejecting near-orthogonal
/// pairs.
pub(crate) fn checked_overlap(pre: &FockVector, post: &PostSelector, threshold: f64) -> Result<(Vec<C64>, C64)> {
    let bra = post.bra(pre.amps().len());
    let ov: C64 = bra.iter().zip(pre.amps()).map(|(b, k)| b * k).sum();
    let scale = pre.norm() * bra.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let limit = threshold * scale;
    if !(ov.norm() >= limit) || ov.norm() == 0.0 {
        return Err(Error::NearOrthogonalPostSelection { overlap: ov.norm(), threshold: limit });
    }
    Ok((bra, ov))
}

pub fn weak_value_numeric(pre: &FockVector, post: &PostSelector) -> Result<WeakValue> {
    weak_value_numeric_with(pre, post, DEFAULT_ORTHO_THRESHOLD)
}

pub fn weak_value_numeric_with(pre: &FockVector, post: &PostSelector, threshold: f64) -> Result<WeakValue> {
    let (bra, ov) = checked_overlap(pre, post, threshold)?;
    let num: C64 = bra.iter().zip(pre.amps()).enumerate().map(|(n, (b, k))| b * k * n as f64).sum();
    Ok(WeakValue { value: num / ov, overlap_mag: ov.norm() })
}

pub fn weak_moments(pre: &FockVector, post: &PostSelector, m_max: usize) -> Result<WeakMoments> {
    weak_moments_with(pre, post, m_max, DEFAULT_ORTHO_THRESHOLD)
}

pub fn weak_moments_with(pre: &FockVector, post: &PostSelector, m_max: usize, threshold: f64) -> Result<WeakMoments> {
    if m_max == 0 {
        return Err(Error::InvalidParameter { name: "m_max", value: 0.0, reason: "need at least one moment" });
    }
    let (bra, ov) = checked_overlap(pre, post, threshold)?;
    let weighted: Vec<C64> = bra.iter().zip(pre.amps()).map(|(b, k)| b * k).collect();
    let moments = (1..=m_max)
        .map(|m| {
            let num: C64 = weighted.iter().enumerate().map(|(n, w)| w * (n as f64).powi(m as i32)).sum();
            num / ov
        })
        .collect();
    Ok(WeakMoments { moments })
}

/// Closed-form `n_W` for a real coherent pre-selection `|α⟩` and one of the
/// built-in post-selections:
///
/// * coherent `|β⟩`: `α β*`
/// * quadrature `⟨x_φ|`: `√2 x α e^{±iφ} − α² e^{±2iφ}` (sign from the
///   phase convention)
/// * squeezed vacuum `|r e^{iφ}⟩`: `−α² e^{−iφ} tanh r`
pub fn n_w_analytic(post: &AncillaSpec, alpha: f64) -> Result<C64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter {
            name: "alpha",
            value: alpha,
            reason: "pre-selected amplitude must be > 0",
        });
    }
    post.validate()?;
    Ok(match *post {
        AncillaSpec::Coherent { magnitude, phase } => alpha * C64::from_polar(magnitude, -phase),
        AncillaSpec::QuadratureEigenstate { x, phi, phase } => {
            let s = match phase {
                QuadraturePhase::Positive => 1.0,
                QuadraturePhase::Negative => -1.0,
            };
            2f64.sqrt() * x * alpha * C64::from_polar(1.0, s * phi)
                - alpha * alpha * C64::from_polar(1.0, 2.0 * s * phi)
        }
        AncillaSpec::SqueezedVacuum { r, phi } => -alpha * alpha * r.tanh() * C64::from_polar(1.0, -phi),
        AncillaSpec::CustomFock(_) => {
            return Err(Error::UnsupportedScheme("custom Fock post-selection has no closed form".into()))
        }
    })
}

/// Concentration succeeds iff `Im(n_W) > 0`, for positive coupling.
pub fn success_condition(w: &WeakValue, kappa_t: f64) -> Result<bool> {
    if !(kappa_t > 0.0) {
        return Err(Error::NonPositiveCoupling { kappa_t });
    }
    Ok(w.value.im > 0.0)
}

/// Quadrature value `√2 α cos φ` where the homodyne success flag flips
/// (positive phase convention). Success lies above it when `sin φ > 0` and
/// below it when `sin φ < 0`.
pub fn quadrature_success_boundary(alpha: f64, phi: f64) -> f64 {
    2f64.sqrt() * alpha * phi.cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{coherent_fock, coherent_fock_complex, squeezed_vacuum_fock, Cutoff};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn coh(alpha: f64) -> FockVector {
        coherent_fock(alpha, Cutoff::with_n_max(80)).unwrap()
    }

    #[test]
    fn self_post_selection_is_expectation() {
        let a = coh(1.3);
        let w = weak_value_numeric(&a, &PostSelector::Normalizable(a.clone())).unwrap();
        assert_abs_diff_eq!(w.value.re, 1.69, epsilon = 1e-10);
        assert_eq!(w.value.im, 0.0);
    }

    #[test]
    fn coherent_post_imaginary_part() {
        let beta = C64::from_polar(1.0, 3.0 * PI / 2.0);
        let post = PostSelector::Normalizable(coherent_fock_complex(beta, Cutoff::with_n_max(80)).unwrap());
        let w = weak_value_numeric(&coh(1.0), &post).unwrap();
        assert_abs_diff_eq!(w.value.im, 1.0, epsilon = 1e-10);
        assert!(success_condition(&w, 0.05).unwrap());
    }

    #[test]
    fn squeezed_post_weak_value() {
        let (r, phi) = (0.6, PI / 4.0);
        let post = PostSelector::Normalizable(squeezed_vacuum_fock(r, phi, Cutoff::with_n_max(200)).unwrap());
        let w = weak_value_numeric(&coh(0.8), &post).unwrap();
        let expect = -0.64 * r.tanh() * C64::from_polar(1.0, -phi);
        assert_abs_diff_eq!((w.value - expect).norm(), 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(w.value.im, 0.64 * r.tanh() * phi.sin(), epsilon = 1e-10);
        assert!(success_condition(&w, 0.1).unwrap());
    }

    #[test]
    fn moments() {
        let a = coh(1.1);
        let post = PostSelector::Normalizable(a.clone());
        let m = weak_moments(&a, &post, 3).unwrap();
        let w = weak_value_numeric(&a, &post).unwrap();
        assert_eq!(m.get(1).unwrap(), w.value);
        let a2 = 1.21;
        assert_abs_diff_eq!(m.get(2).unwrap().re, a2 * a2 + a2, epsilon = 1e-10);
        assert!(m.get(0).is_none());
        assert!(weak_moments(&a, &post, 0).is_err());
    }

    #[test]
    fn second_moment_against_double_sum() {
        // ⟨β|n̂ n̂|α⟩ as an explicit matrix product with n̂ built as a full matrix
        let cut = Cutoff::with_n_max(80);
        let pre = coherent_fock(1.0, cut).unwrap();
        let beta = C64::new(0.0, -0.5);
        let post_v = coherent_fock_complex(beta, cut).unwrap();
        let dim = cut.dim();
        let number = |i: usize, j: usize| if i == j { i as f64 } else { 0.0 };
        let mut num = C64::new(0.0, 0.0);
        let mut den = C64::new(0.0, 0.0);
        for i in 0..dim {
            den += post_v.amps()[i].conj() * pre.amps()[i];
            for j in 0..dim {
                let nn: f64 = (0..dim).map(|k| number(i, k) * number(k, j)).sum();
                num += post_v.amps()[i].conj() * nn * pre.amps()[j];
            }
        }
        let m = weak_moments(&pre, &PostSelector::Normalizable(post_v), 2).unwrap();
        assert_abs_diff_eq!((m.get(2).unwrap() - num / den).norm(), 0.0, epsilon = 1e-10);
        // z² + z with z = α β*
        let z = beta.conj();
        assert_abs_diff_eq!((m.get(2).unwrap() - (z * z + z)).norm(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn analytic_forms() {
        let nw = n_w_analytic(&AncillaSpec::Coherent { magnitude: 0.7, phase: 2.0 }, 1.5).unwrap();
        assert_abs_diff_eq!(nw.im, -1.5 * 0.7 * 2f64.sin(), epsilon = 1e-14);
        let (x, phi, a) = (0.9, 0.6, 0.8);
        let q = AncillaSpec::QuadratureEigenstate { x, phi, phase: QuadraturePhase::Positive };
        let nw = n_w_analytic(&q, a).unwrap();
        assert_abs_diff_eq!(nw.im, 2f64.sqrt() * a * phi.sin() * x - a * a * (2.0 * phi).sin(), epsilon = 1e-14);
        let sq = AncillaSpec::SqueezedVacuum { r: 0.5, phi: 0.0 };
        assert_eq!(n_w_analytic(&sq, 1.0).unwrap().im, 0.0);
        let custom = AncillaSpec::CustomFock(coh(0.5));
        assert!(matches!(n_w_analytic(&custom, 1.0), Err(Error::UnsupportedScheme(_))));
    }

    #[test]
    fn quadrature_success_region() {
        let a = 0.8;
        let phi = 1.0;
        let b = quadrature_success_boundary(a, phi);
        for (x, expect) in [(b + 0.1, true), (b - 0.1, false)] {
            let post = PostSelector::QuadratureFunctional { x, phi, phase: QuadraturePhase::Positive };
            let w = weak_value_numeric(&coh(a), &post).unwrap();
            assert_eq!(success_condition(&w, 0.1).unwrap(), expect);
        }
    }

    #[test]
    fn non_positive_coupling() {
        let w = WeakValue { value: C64::new(0.0, 1.0), overlap_mag: 1.0 };
        assert!(matches!(success_condition(&w, 0.0), Err(Error::NonPositiveCoupling { .. })));
        assert!(matches!(success_condition(&w, -1.0), Err(Error::NonPositiveCoupling { .. })));
    }

    #[test]
    fn orthogonal_post_rejected() {
        let one = FockVector::from_amplitudes(
            vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            Cutoff::with_n_max(2),
        )
        .unwrap();
        let two = FockVector::from_amplitudes(
            vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            Cutoff::with_n_max(2),
        )
        .unwrap();
        let err = weak_value_numeric(&one, &PostSelector::Normalizable(two)).unwrap_err();
        assert!(matches!(err, Error::NearOrthogonalPostSelection { .. }));
    }
}
