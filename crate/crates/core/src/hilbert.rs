//! Truncated Fock-space states and overlaps.
//!
//! Every single-mode state is stored as amplitudes `c_0..c_{n_max}` in the
//! photon-number basis. Constructors for analytic families (coherent,
//! squeezed vacuum, two-mode squeezed vacuum) check the probability mass
//! discarded by the truncation against the cutoff's `tail_tol` and refuse
//! to build a state that silently loses more than that.
//!
//! Bipartite states only ever appear in the Schmidt-diagonal form
//! `Σ c_n |n,n⟩`, since the cross-Kerr coupling is diagonal in the Fock
//! basis of the coupled mode.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default admissible truncated probability mass.
pub const DEFAULT_TAIL_TOL: f64 = 1e-10;

/// Largest cutoff the automatic cutoff search will consider.
pub const MAX_AUTO_N: usize = 4096;

/// Photon-number truncation of a single mode.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cutoff {
    n_max: usize,
    tail_tol: f64,
}

impl Cutoff {
    pub fn new(n_max: usize, tail_tol: f64) -> Result<Self> {
        if !(tail_tol > 0.0 && tail_tol < 1.0) {
            return Err(Error::InvalidParameter { name: "tail_tol", value: tail_tol, reason: "must lie in (0, 1)" });
        }
        Ok(Self { n_max, tail_tol })
    }

    /// Cutoff with the default tail tolerance.
    pub fn with_n_max(n_max: usize) -> Self {
        Self { n_max, tail_tol: DEFAULT_TAIL_TOL }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    /// Number of retained levels, `n_max + 1`.
    pub fn dim(&self) -> usize {
        self.n_max + 1
    }

    /// Same tolerance, different `n_max`.
    pub fn resized(&self, n_max: usize) -> Self {
        Self { n_max, tail_tol: self.tail_tol }
    }

    pub(crate) fn guard(&self, tail: f64) -> Result<()> {
        if tail > self.tail_tol {
            Err(Error::CutoffTooSmall { n_max: self.n_max, tail, tol: self.tail_tol })
        } else {
            Ok(())
        }
    }

    /// Smallest cutoff for which a coherent state of amplitude `magnitude`
    /// passes the tail guard.
    pub fn for_coherent(magnitude: f64, tail_tol: f64) -> Result<Self> {
        let amps = coherent_amplitudes(C64::new(magnitude.abs(), 0.0), MAX_AUTO_N + 1);
        smallest_passing(&amps, tail_tol)
    }

    /// Smallest cutoff for which a squeezed vacuum of strength `r` passes
    /// the tail guard.
    pub fn for_squeezed(r: f64, tail_tol: f64) -> Result<Self> {
        let amps = squeezed_amplitudes(r, 0.0, MAX_AUTO_N + 1);
        smallest_passing(&amps, tail_tol)
    }

    /// Smallest cutoff for which `tmsv(lambda)` passes the tail guard.
    pub fn for_tmsv(lambda: f64, tail_tol: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&lambda) {
            return Err(Error::UnphysicalSqueezing { lambda });
        }
        let mut n = 0;
        while tmsv_tail(lambda, n) > tail_tol {
            n += 1;
            if n > MAX_AUTO_N {
                return Err(Error::CutoffTooSmall {
                    n_max: MAX_AUTO_N,
                    tail: tmsv_tail(lambda, MAX_AUTO_N),
                    tol: tail_tol,
                });
            }
        }
        Cutoff::new(n, tail_tol)
    }
}

pub(crate) fn tmsv_tail(lambda: f64, n_max: usize) -> f64 {
    lambda.powi(2 * (n_max as i32 + 1))
}

/// Mass of `amps` beyond the first `dim` entries, summed from the far end.
fn tail_beyond(amps: &[C64], dim: usize) -> f64 {
    amps.iter().skip(dim).rev().map(|c| c.norm_sqr()).sum()
}

fn smallest_passing(amps: &[C64], tail_tol: f64) -> Result<Cutoff> {
    // suffix sums, accumulated from the smallest terms up
    let mut tail = 0.0;
    let mut best = None;
    for n in (0..amps.len()).rev() {
        // tail currently holds mass strictly beyond n
        if tail <= tail_tol {
            best = Some(n);
        } else {
            break;
        }
        tail += amps[n].norm_sqr();
    }
    match best {
        Some(n) if n < amps.len() - 1 => Cutoff::new(n, tail_tol),
        _ => Err(Error::CutoffTooSmall { n_max: MAX_AUTO_N, tail: tail_beyond(amps, amps.len() - 1), tol: tail_tol }),
    }
}

/// Truncated single-mode state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FockVector {
    amps: Vec<C64>,
    cutoff: Cutoff,
}

impl FockVector {
    /// Wraps raw amplitudes. The vector must have exactly `n_max + 1`
    /// entries and squared norm at most `1 + 10 ε`.
    pub fn from_amplitudes(amps: Vec<C64>, cutoff: Cutoff) -> Result<Self> {
        if amps.len() != cutoff.dim() {
            return Err(Error::CutoffMismatch { left: amps.len(), right: cutoff.dim() });
        }
        if amps.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "amplitude",
                value: f64::NAN,
                reason: "amplitudes must be finite",
            });
        }
        let norm_sqr: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
        if norm_sqr > 1.0 + 10.0 * f64::EPSILON {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self { amps, cutoff })
    }

    /// Like [`FockVector::from_amplitudes`] but rescales a nonzero vector to
    /// unit norm first.
    pub fn normalized_from(amps: Vec<C64>, cutoff: Cutoff) -> Result<Self> {
        let norm = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::NotNormalized { norm_sqr: norm * norm });
        }
        Self::from_amplitudes(amps.into_iter().map(|c| c / norm).collect(), cutoff)
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn cutoff(&self) -> Cutoff {
        self.cutoff
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Probability mass missing from a state that should be normalized.
    pub fn tail_mass(&self) -> f64 {
        (1.0 - self.norm_sqr()).max(0.0)
    }

    /// Multiplies every amplitude by `e^{iθ}`.
    pub fn with_global_phase(&self, theta: f64) -> Self {
        let ph = C64::from_polar(1.0, theta);
        Self { amps: self.amps.iter().map(|c| c * ph).collect(), cutoff: self.cutoff }
    }

    /// `⟨n̂⟩` over the retained levels.
    pub fn mean_photons(&self) -> f64 {
        self.amps.iter().enumerate().map(|(n, c)| n as f64 * c.norm_sqr()).sum()
    }
}

fn coherent_amplitudes(beta: C64, len: usize) -> Vec<C64> {
    let mut amps = Vec::with_capacity(len);
    let mut c = C64::new((-0.5 * beta.norm_sqr()).exp(), 0.0);
    for n in 0..len {
        amps.push(c);
        c = c * beta / ((n + 1) as f64).sqrt();
    }
    amps
}

fn squeezed_amplitudes(r: f64, phi: f64, len: usize) -> Vec<C64> {
    let mut amps = vec![C64::new(0.0, 0.0); len];
    let ratio = -C64::from_polar(r.tanh(), phi);
    let mut c = C64::new((1.0 / r.cosh()).sqrt(), 0.0);
    let mut m = 0usize;
    while 2 * m < len {
        amps[2 * m] = c;
        let k = (2 * m) as f64;
        c = c * ratio * ((k + 1.0) * (k + 2.0)).sqrt() / (2.0 * (m as f64 + 1.0));
        m += 1;
    }
    amps
}

fn tmsv_coefficients(lambda: f64, len: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(len);
    let mut c = (1.0 - lambda * lambda).sqrt();
    for _ in 0..len {
        out.push(C64::new(c, 0.0));
        c *= lambda;
    }
    out
}

/// Coherent state `|α⟩` with real `α ≥ 0`:
/// `c_n = e^{−α²/2} αⁿ/√(n!)`.
pub fn coherent_fock(alpha: f64, cutoff: Cutoff) -> Result<FockVector> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter {
            name: "alpha",
            value: alpha,
            reason: "coherent amplitude must be real and >= 0",
        });
    }
    coherent_fock_complex(C64::new(alpha, 0.0), cutoff)
}

/// Coherent state with complex amplitude `β`.
pub fn coherent_fock_complex(beta: C64, cutoff: Cutoff) -> Result<FockVector> {
    if !beta.re.is_finite() || !beta.im.is_finite() {
        return Err(Error::InvalidParameter {
            name: "beta",
            value: beta.norm(),
            reason: "coherent amplitude must be finite",
        });
    }
    let mut amps = coherent_amplitudes(beta, cutoff.dim().max(MAX_AUTO_N + 1));
    cutoff.guard(tail_beyond(&amps, cutoff.dim()))?;
    amps.truncate(cutoff.dim());
    Ok(FockVector { amps, cutoff })
}

/// Single-mode squeezed vacuum `|r e^{iφ}⟩`:
/// `c_{2m} = (sech r)^{1/2} (−e^{iφ} tanh r)^m √((2m)!)/(2^m m!)`, odd
/// amplitudes zero.
pub fn squeezed_vacuum_fock(r: f64, phi: f64, cutoff: Cutoff) -> Result<FockVector> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter { name: "r", value: r, reason: "squeezing strength must be >= 0" });
    }
    if !phi.is_finite() {
        return Err(Error::InvalidParameter { name: "phi", value: phi, reason: "must be finite" });
    }
    let mut amps = squeezed_amplitudes(r, phi, cutoff.dim().max(MAX_AUTO_N + 1));
    cutoff.guard(tail_beyond(&amps, cutoff.dim()))?;
    amps.truncate(cutoff.dim());
    Ok(FockVector { amps, cutoff })
}

/// Bipartite pure state `Σ c_n |n,n⟩`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchmidtDiagonalState {
    coeffs: Vec<C64>,
    cutoff: Cutoff,
    normalized: bool,
}

impl SchmidtDiagonalState {
    /// Wraps coefficients; `normalized` is set when the squared norm is
    /// within `max(1e-12, tail_tol)` of one.
    pub fn from_coefficients(coeffs: Vec<C64>, cutoff: Cutoff) -> Result<Self> {
        if coeffs.len() != cutoff.dim() {
            return Err(Error::CutoffMismatch { left: coeffs.len(), right: cutoff.dim() });
        }
        let norm_sqr: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        let normalized = (norm_sqr - 1.0).abs() <= cutoff.tail_tol().max(1e-12);
        Ok(Self { coeffs, cutoff, normalized })
    }

    /// Rescales unnormalized coefficients to unit norm.
    pub fn normalize(coeffs: Vec<C64>, cutoff: Cutoff) -> Result<Self> {
        let norm_sqr: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if !(norm_sqr > 0.0) || !norm_sqr.is_finite() {
            return Err(Error::NotNormalized { norm_sqr });
        }
        let s = norm_sqr.sqrt();
        Self::from_coefficients(coeffs.into_iter().map(|c| c / s).collect(), cutoff)
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn cutoff(&self) -> Cutoff {
        self.cutoff
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Total photon number over both modes, `Σ 2n |c_n|²`, relative to the
    /// retained mass.
    pub fn mean_photons(&self) -> f64 {
        let total: f64 = self.coeffs.iter().enumerate().map(|(n, c)| 2.0 * n as f64 * c.norm_sqr()).sum();
        total / self.norm_sqr()
    }
}

/// Two-mode squeezed vacuum `√(1−λ²) Σ λⁿ |n,n⟩`.
pub fn tmsv(lambda: f64, cutoff: Cutoff) -> Result<SchmidtDiagonalState> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::UnphysicalSqueezing { lambda });
    }
    let coeffs = tmsv_coefficients(lambda, cutoff.dim());
    cutoff.guard(tmsv_tail(lambda, cutoff.n_max()))?;
    SchmidtDiagonalState::from_coefficients(coeffs, cutoff)
}

/// Phase convention for rotated-quadrature eigenstates.
///
/// `Negative` is `⟨x_φ|n⟩ = e^{−inφ}⟨x|n⟩`, the eigenstate of
/// `(e^{iφ}â† + e^{−iφ}â)/√2`; its overlap with `|α⟩` is
/// `π^{−1/4} exp(−x²/2 + √2 e^{−iφ} x α − e^{−2iφ} α²/2) e^{−α²/2}`.
///
/// `Positive` is `⟨x_φ|n⟩ = e^{+inφ}⟨x|n⟩`, which gives the weak value
/// `Im n_W = √2 α x sin φ − α² sin 2φ` and the success region
/// `x > √2 α cos φ`. The protocol uses `Positive` by default.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuadraturePhase {
    #[default]
    Positive,
    Negative,
}

impl QuadraturePhase {
    fn sign(self) -> f64 {
        match self {
            QuadraturePhase::Positive => 1.0,
            QuadraturePhase::Negative => -1.0,
        }
    }
}

/// Normalized Hermite functions `ψ_0(x)..ψ_{n_max}(x)`,
/// `ψ_n(x) = H_n(x) e^{−x²/2} / √(2ⁿ n! √π)`, by the three-term recurrence
/// `ψ_{n+1} = √(2/(n+1)) x ψ_n − √(n/(n+1)) ψ_{n−1}`.
pub fn hermite_functions(x: f64, n_max: usize) -> Vec<f64> {
    let mut psi = Vec::with_capacity(n_max + 1);
    psi.push(PI.powf(-0.25) * (-0.5 * x * x).exp());
    if n_max >= 1 {
        psi.push(2f64.sqrt() * x * psi[0]);
    }
    for n in 1..n_max {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * x * psi[n] - (nf / (nf + 1.0)).sqrt() * psi[n - 1];
        psi.push(next);
    }
    psi
}

/// `⟨x_φ|n⟩` in the `Negative` convention, `e^{−inφ} ψ_n(x)`.
pub fn quadrature_fock_overlap(x: f64, phi: f64, n: usize) -> C64 {
    quadrature_fock_overlap_with(x, phi, n, QuadraturePhase::Negative)
}

/// `⟨x_φ|n⟩` under an explicit phase convention.
pub fn quadrature_fock_overlap_with(x: f64, phi: f64, n: usize, phase: QuadraturePhase) -> C64 {
    let psi = hermite_functions(x, n)[n];
    C64::from_polar(1.0, phase.sign() * n as f64 * phi) * psi
}

/// Bra components of `⟨x_φ|` on levels `0..dim`.
pub fn quadrature_bra(x: f64, phi: f64, phase: QuadraturePhase, dim: usize) -> Vec<C64> {
    if dim == 0 {
        return Vec::new();
    }
    hermite_functions(x, dim - 1)
        .into_iter()
        .enumerate()
        .map(|(n, psi)| C64::from_polar(1.0, phase.sign() * n as f64 * phi) * psi)
        .collect()
}

/// The post-selected ancilla state, as a bra functional.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum PostSelector {
    Normalizable(FockVector),
    /// Ideal homodyne outcome `⟨x_φ|`; not normalizable, so event weights
    /// are probability densities per unit `x`.
    QuadratureFunctional {
        x: f64,
        phi: f64,
        phase: QuadraturePhase,
    },
}

impl PostSelector {
    pub fn is_density(&self) -> bool {
        matches!(self, PostSelector::QuadratureFunctional { .. })
    }

    /// Components `b_n` with `⟨Φ_2|ψ⟩ = Σ b_n ψ_n`, for `dim` levels.
    /// Normalizable bras are padded with zeros past their cutoff.
    pub fn bra(&self, dim: usize) -> Vec<C64> {
        match self {
            PostSelector::Normalizable(v) => {
                (0..dim).map(|n| v.amps.get(n).map_or(C64::new(0.0, 0.0), |c| c.conj())).collect()
            }
            PostSelector::QuadratureFunctional { x, phi, phase } => quadrature_bra(*x, *phi, *phase, dim),
        }
    }

    /// Euclidean norm of the bra restricted to `dim` levels.
    pub fn bra_scale(&self, dim: usize) -> f64 {
        self.bra(dim).iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Multiplies the post-selected state by `e^{iθ}` (the bra picks up
    /// `e^{−iθ}`).
    pub fn with_global_phase(&self, theta: f64) -> Self {
        match self {
            PostSelector::Normalizable(v) => PostSelector::Normalizable(v.with_global_phase(theta)),
            PostSelector::QuadratureFunctional { .. } => self.clone(),
        }
    }
}

/// `⟨bra|ket⟩`; a shorter normalizable bra is padded with zeros.
pub fn overlap(bra: &PostSelector, ket: &FockVector) -> C64 {
    bra.bra(ket.amps.len()).iter().zip(&ket.amps).map(|(b, k)| b * k).sum()
}

/// Symmetric inner product `⟨a|b⟩` of two normalizable states.
pub fn inner(a: &FockVector, b: &FockVector) -> C64 {
    a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum()
}

/// Ancilla state descriptions used for pre- and post-selection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum AncillaSpec {
    /// `| |β| e^{i·phase} ⟩`. The closed-form weak values assume a real
    /// positive pre-selected amplitude (`phase = 0`).
    Coherent {
        magnitude: f64,
        phase: f64,
    },
    SqueezedVacuum {
        r: f64,
        phi: f64,
    },
    QuadratureEigenstate {
        x: f64,
        phi: f64,
        phase: QuadraturePhase,
    },
    CustomFock(FockVector),
}

impl AncillaSpec {
    pub fn coherent(alpha: f64) -> Self {
        AncillaSpec::Coherent { magnitude: alpha, phase: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            AncillaSpec::Coherent { magnitude, phase } => {
                if !(magnitude > 0.0) || !magnitude.is_finite() {
                    return Err(Error::InvalidParameter {
                        name: "alpha",
                        value: magnitude,
                        reason: "coherent amplitude must be > 0",
                    });
                }
                if !phase.is_finite() {
                    return Err(Error::InvalidParameter { name: "phase", value: phase, reason: "must be finite" });
                }
            }
            AncillaSpec::SqueezedVacuum { r, phi } => {
                if !(r >= 0.0) || !r.is_finite() {
                    return Err(Error::InvalidParameter {
                        name: "r",
                        value: r,
                        reason: "squeezing strength must be >= 0",
                    });
                }
                if !phi.is_finite() {
                    return Err(Error::InvalidParameter { name: "phi", value: phi, reason: "must be finite" });
                }
            }
            AncillaSpec::QuadratureEigenstate { x, phi, .. } => {
                if !x.is_finite() {
                    return Err(Error::InvalidParameter { name: "x", value: x, reason: "must be finite" });
                }
                if !phi.is_finite() {
                    return Err(Error::InvalidParameter { name: "phi", value: phi, reason: "must be finite" });
                }
            }
            AncillaSpec::CustomFock(_) => {}
        }
        Ok(())
    }

    /// Smallest cutoff passing the tail guard, when the state is
    /// normalizable.
    pub fn auto_cutoff(&self, tail_tol: f64) -> Result<Option<Cutoff>> {
        Ok(match self {
            AncillaSpec::Coherent { magnitude, .. } => Some(Cutoff::for_coherent(*magnitude, tail_tol)?),
            AncillaSpec::SqueezedVacuum { r, .. } => Some(Cutoff::for_squeezed(*r, tail_tol)?),
            AncillaSpec::QuadratureEigenstate { .. } => None,
            AncillaSpec::CustomFock(v) => Some(v.cutoff()),
        })
    }

    /// Fock representation; quadrature eigenstates have none.
    pub fn to_fock(&self, cutoff: Cutoff) -> Result<FockVector> {
        self.validate()?;
        match *self {
            AncillaSpec::Coherent { magnitude, phase } => {
                coherent_fock_complex(C64::from_polar(magnitude, phase), cutoff)
            }
            AncillaSpec::SqueezedVacuum { r, phi } => squeezed_vacuum_fock(r, phi, cutoff),
            AncillaSpec::QuadratureEigenstate { x, .. } => Err(Error::InvalidParameter {
                name: "x",
                value: x,
                reason: "quadrature eigenstates are not normalizable and cannot be pre-selected",
            }),
            AncillaSpec::CustomFock(ref v) => Ok(v.clone()),
        }
    }

    pub fn to_post_selector(&self, cutoff: Cutoff) -> Result<PostSelector> {
        self.validate()?;
        match *self {
            AncillaSpec::QuadratureEigenstate { x, phi, phase } => {
                Ok(PostSelector::QuadratureFunctional { x, phi, phase })
            }
            _ => Ok(PostSelector::Normalizable(self.to_fock(cutoff)?)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    #[test]
    fn coherent_vacuum() {
        let v = coherent_fock(0.0, Cutoff::with_n_max(5)).unwrap();
        assert_eq!(v.amps()[0], C64::new(1.0, 0.0));
        assert!(v.amps()[1..].iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn coherent_ratio() {
        let v = coherent_fock(1.0, Cutoff::with_n_max(20)).unwrap();
        assert_eq!(v.amps()[1] / v.amps()[0], C64::new(1.0, 0.0));
        for n in 0..20 {
            let ratio = v.amps()[n + 1] / v.amps()[n];
            assert_abs_diff_eq!(ratio.re, 1.0 / ((n + 1) as f64).sqrt(), epsilon = 1e-14);
        }
    }

    #[test]
    fn coherent_norm_alpha_two() {
        // Poisson weights summed directly
        let poisson: f64 = (0..=30).map(|n| (-4.0f64).exp() * 4f64.powi(n as i32) / factorial(n)).sum();
        let v = coherent_fock(2.0, Cutoff::with_n_max(30)).unwrap();
        assert_abs_diff_eq!(v.norm_sqr(), poisson, epsilon = 1e-14);
        assert!(1.0 - v.norm_sqr() <= 1e-10);
    }

    #[test]
    fn coherent_too_small_cutoff() {
        let err = coherent_fock(3.0, Cutoff::with_n_max(5)).unwrap_err();
        assert!(matches!(err, Error::CutoffTooSmall { n_max: 5, .. }));
        assert!(coherent_fock(-0.1, Cutoff::with_n_max(5)).is_err());
    }

    #[test]
    fn squeezed_unsqueezed_is_vacuum() {
        let v = squeezed_vacuum_fock(0.0, 1.3, Cutoff::with_n_max(6)).unwrap();
        assert_eq!(v.amps()[0], C64::new(1.0, 0.0));
        assert!(v.amps()[1..].iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn squeezed_matches_direct_factorial_form() {
        let (r, phi) = (0.7, 0.4);
        let v = squeezed_vacuum_fock(r, phi, Cutoff::for_squeezed(r, 1e-12).unwrap()).unwrap();
        for m in 0..10 {
            let direct = C64::new((1.0 / r.cosh()).sqrt(), 0.0)
                * (-C64::from_polar(r.tanh(), phi)).powu(m as u32)
                * factorial(2 * m).sqrt()
                / (2f64.powi(m as i32) * factorial(m));
            assert_abs_diff_eq!((v.amps()[2 * m] - direct).norm(), 0.0, epsilon = 1e-13);
            assert_eq!(v.amps()[2 * m + 1], C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn tmsv_geometric_and_errors() {
        let s = tmsv(0.5, Cutoff::with_n_max(40)).unwrap();
        assert!(s.is_normalized());
        for n in 0..40 {
            assert_eq!(s.coeffs()[n + 1], s.coeffs()[n] * 0.5);
        }
        assert_abs_diff_eq!(s.mean_photons(), 2.0 / 3.0, epsilon = 1e-12);
        let vac = tmsv(0.0, Cutoff::with_n_max(3)).unwrap();
        assert_eq!(vac.coeffs()[0], C64::new(1.0, 0.0));
        assert!(matches!(tmsv(1.0, Cutoff::with_n_max(3)), Err(Error::UnphysicalSqueezing { .. })));
        assert!(matches!(tmsv(0.9, Cutoff::with_n_max(3)), Err(Error::CutoffTooSmall { .. })));
    }

    #[test]
    fn hermite_at_origin() {
        assert_abs_diff_eq!(quadrature_fock_overlap(0.0, 0.0, 0).re, PI.powf(-0.25), epsilon = 1e-15);
        assert_abs_diff_eq!(quadrature_fock_overlap(0.0, 0.0, 1).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn hermite_recurrence_matches_factorial_formula() {
        // physicists' Hermite polynomials from their explicit sum
        fn hermite_poly(n: usize, x: f64) -> f64 {
            (0..=n / 2)
                .map(|m| {
                    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                    sign * factorial(n) / (factorial(m) * factorial(n - 2 * m)) * (2.0 * x).powi((n - 2 * m) as i32)
                })
                .sum()
        }
        for &x in &[-2.3, -0.4, 0.0, 0.9, 1.7] {
            let psi = hermite_functions(x, 20);
            for (n, &value) in psi.iter().enumerate() {
                let direct =
                    hermite_poly(n, x) * (-0.5 * x * x).exp() / (2f64.powi(n as i32) * factorial(n) * PI.sqrt()).sqrt();
                assert_abs_diff_eq!(value, direct, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn hermite_high_order_finite() {
        let psi = hermite_functions(3.0, 400);
        assert!(psi.iter().all(|p| p.is_finite() && p.abs() < 1.0));
    }

    #[test]
    fn overlap_pads_and_normalizes() {
        let a = coherent_fock(1.2, Cutoff::with_n_max(40)).unwrap();
        let bra = PostSelector::Normalizable(a.clone());
        assert_abs_diff_eq!(overlap(&bra, &a).re, a.norm_sqr(), epsilon = 1e-14);
        assert_abs_diff_eq!(overlap(&bra, &a).re, 1.0, epsilon = 1e-10);
        let short = PostSelector::Normalizable(coherent_fock(0.0, Cutoff::with_n_max(2)).unwrap());
        assert_abs_diff_eq!(overlap(&short, &a).re, (-0.72f64).exp(), epsilon = 1e-14);
    }

    #[test]
    fn quadrature_custom_pre_rejected() {
        let spec = AncillaSpec::QuadratureEigenstate { x: 0.0, phi: 0.0, phase: QuadraturePhase::Positive };
        assert!(spec.to_fock(Cutoff::with_n_max(3)).is_err());
        assert!(spec.to_post_selector(Cutoff::with_n_max(3)).unwrap().is_density());
        assert!(AncillaSpec::coherent(0.0).validate().is_err());
    }
}
