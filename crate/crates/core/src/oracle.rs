//! Reference computations that do not go through the filter-function
//! reduction: the full tripartite state vector, reduced density matrices
//! diagonalized numerically, and closed-form overlaps and filter ratios for
//! the built-in schemes.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hilbert::{FockVector, PostSelector, QuadraturePhase};

/// Post-selected A⊗B state built on the full A⊗B⊗C space.
///
/// Forms `|ζ(λ)⟩_{AB} ⊗ |Φ_1⟩_C` with `dim_ab` levels per mode, multiplies
/// each basis component `|a,b,c⟩` by `e^{−iκ_T b c}`, contracts mode C with
/// the post-selection bra and normalizes. Returns the `dim_ab × dim_ab`
/// amplitude matrix `M[a][b]` and the squared norm before normalization.
pub fn tripartite_protocol(
    lambda: f64,
    kappa_t: f64,
    pre: &FockVector,
    post: &PostSelector,
    dim_ab: usize,
) -> Result<(DMatrix<C64>, f64)> {
    let dim_c = pre.amps().len();
    let bra = post.bra(dim_c);
    let zeta = |a: usize, b: usize| {
        if a == b {
            C64::new((1.0 - lambda * lambda).sqrt() * lambda.powi(a as i32), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    };
    let mut psi = vec![C64::new(0.0, 0.0); dim_ab * dim_ab * dim_c];
    let idx = |a: usize, b: usize, c: usize| (a * dim_ab + b) * dim_c + c;
    for a in 0..dim_ab {
        for b in 0..dim_ab {
            for c in 0..dim_c {
                psi[idx(a, b, c)] = zeta(a, b) * pre.amps()[c];
            }
        }
    }
    for a in 0..dim_ab {
        for b in 0..dim_ab {
            for c in 0..dim_c {
                psi[idx(a, b, c)] *= C64::from_polar(1.0, -kappa_t * (b * c) as f64);
            }
        }
    }
    let mut m = DMatrix::<C64>::zeros(dim_ab, dim_ab);
    for a in 0..dim_ab {
        for b in 0..dim_ab {
            m[(a, b)] = (0..dim_c).map(|c| bra[c] * psi[idx(a, b, c)]).sum();
        }
    }
    let weight: f64 = m.iter().map(|z| z.norm_sqr()).sum();
    if !(weight > 0.0) {
        return Err(Error::VanishingPostSelection { prob: weight });
    }
    Ok((m.unscale(weight.sqrt()), weight))
}

/// Eigenvalues of `ρ_A = M M†`, sorted descending.
pub fn reduced_spectrum(m: &DMatrix<C64>) -> Vec<f64> {
    let rho = m * m.adjoint();
    let mut ev: Vec<f64> = rho.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// `⟨β|α⟩ = e^{−α²/2} e^{−|β|²/2} e^{αβ*}`.
pub fn coherent_overlap(beta: C64, alpha: f64) -> C64 {
    (-0.5 * alpha * alpha - 0.5 * beta.norm_sqr() + alpha * beta.conj()).exp()
}

/// `⟨x_φ|α⟩` including the `e^{−α²/2}` normalization. In the `Negative`
/// convention this is `π^{−1/4} exp(−x²/2 + √2 e^{−iφ} x α − e^{−2iφ} α²/2)
/// e^{−α²/2}`; `Positive` flips the sign of `φ`.
pub fn quadrature_overlap(x: f64, phi: f64, alpha: f64, phase: QuadraturePhase) -> C64 {
    let s = match phase {
        QuadraturePhase::Positive => 1.0,
        QuadraturePhase::Negative => -1.0,
    };
    let e1 = C64::from_polar(1.0, s * phi);
    let e2 = C64::from_polar(1.0, 2.0 * s * phi);
    PI.powf(-0.25)
        * (-0.5 * x * x + 2f64.sqrt() * e1 * x * alpha - 0.5 * e2 * alpha * alpha - 0.5 * alpha * alpha).exp()
}

/// `⟨r e^{iφ}|α⟩ = √(sech r) exp(−α²/2 (1 + e^{−iφ} tanh r))`.
pub fn squeezed_overlap(r: f64, phi: f64, alpha: f64) -> C64 {
    (1.0 / r.cosh()).sqrt() * (-0.5 * alpha * alpha * (1.0 + C64::from_polar(r.tanh(), -phi))).exp()
}

/// `G(n)/G(0)` for coherent post-selection: `e^{(e^{−iκ_T n}−1) β* α}`.
pub fn coherent_filter_ratio(beta: C64, alpha: f64, kappa_t: f64, n: usize) -> C64 {
    ((C64::from_polar(1.0, -kappa_t * n as f64) - 1.0) * beta.conj() * alpha).exp()
}

/// `G(n)/G(0)` for quadrature post-selection: the coherent amplitude in the
/// closed-form overlap is rotated to `α e^{−iκ_T n}`.
pub fn quadrature_filter_ratio(x: f64, phi: f64, alpha: f64, phase: QuadraturePhase, kappa_t: f64, n: usize) -> C64 {
    let s = match phase {
        QuadraturePhase::Positive => 1.0,
        QuadraturePhase::Negative => -1.0,
    };
    let rot = C64::from_polar(1.0, -kappa_t * n as f64);
    let e1 = C64::from_polar(1.0, s * phi);
    let e2 = C64::from_polar(1.0, 2.0 * s * phi);
    let expo = 2f64.sqrt() * x * alpha * e1 * (rot - 1.0) - 0.5 * alpha * alpha * e2 * (rot * rot - 1.0);
    expo.exp()
}

/// `G(n)/G(0)` for squeezed-vacuum post-selection:
/// `exp(−α²/2 (e^{−2iκ_T n} − 1) e^{−iφ} tanh r)`.
pub fn squeezed_filter_ratio(r: f64, phi: f64, alpha: f64, kappa_t: f64, n: usize) -> C64 {
    let rot2 = C64::from_polar(1.0, -2.0 * kappa_t * n as f64);
    (-0.5 * alpha * alpha * (rot2 - 1.0) * C64::from_polar(r.tanh(), -phi)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{coherent_fock, Cutoff};

    #[test]
    fn tripartite_zero_coupling_is_tmsv() {
        let pre = coherent_fock(1.0, Cutoff::with_n_max(20)).unwrap();
        let post = PostSelector::Normalizable(pre.clone());
        let (m, w) = tripartite_protocol(0.5, 0.0, &pre, &post, 30).unwrap();
        assert!((w - 1.0).abs() < 1e-9);
        for a in 0..30 {
            for b in 0..30 {
                let expect = if a == b { 0.75f64.sqrt() * 0.5f64.powi(a as i32) } else { 0.0 };
                assert!((m[(a, b)].re - expect).abs() < 1e-9 && m[(a, b)].im.abs() < 1e-12);
            }
        }
        let ev = reduced_spectrum(&m);
        assert!((ev[0] - 0.75).abs() < 1e-9);
        assert!((ev[1] - 0.1875).abs() < 1e-9);
    }
}
