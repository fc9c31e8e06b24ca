//! The concentration protocol.
//!
//! Coupling Bob's mode to the ancilla with `e^{−iκ_T n̂_B n̂_C}` and then
//! post-selecting the ancilla multiplies the `n`-th Schmidt coefficient of
//! the input by the filter
//!
//! ```text
//! G(n) = ⟨Φ_2| e^{−iκ_T n n̂_C} |Φ_1⟩
//! ```
//!
//! so the exact output is `∝ √(1−λ²) λⁿ G(n) |n,n⟩`. In the weak regime
//! `G(n)/G(0) ≈ e^{−iκ_T n n_W}` and the output is again a two-mode squeezed
//! vacuum with `λ' = λ e^{−iκ_T n_W}`. The residuals and the fidelity below
//! measure how far the exact output is from that prediction.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::entanglement::{self, EntanglementVerdict, DEFAULT_MAJORIZATION_EPS};
use crate::error::{Error, Result};
use crate::hilbert::{self, AncillaSpec, Cutoff, FockVector, PostSelector, SchmidtDiagonalState, DEFAULT_TAIL_TOL};
use crate::weak_values::{self, WeakValue, DEFAULT_ORTHO_THRESHOLD};

/// Probability below which the post-selection event is treated as
/// impossible.
pub const VANISHING_PROB: f64 = 1e-30;

/// Simpson panels used to integrate a finite homodyne acceptance window.
pub const WINDOW_PANELS: usize = 256;

/// Which weak value feeds the predicted output state.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeakValueSource {
    #[default]
    Numeric,
    Analytic,
}

/// A complete protocol scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    /// Input squeezing, `0 ≤ λ < 1`.
    pub lambda: f64,
    /// Integrated coupling `κ_T`.
    pub kappa_t: f64,
    pub pre: AncillaSpec,
    pub post: AncillaSpec,
    /// Truncation of modes A and B.
    pub cutoff: Cutoff,
    /// Truncation of the ancilla mode.
    pub ancilla_cutoff: Cutoff,
    pub ortho_threshold: f64,
    pub majorization_eps: f64,
    pub weak_value_source: WeakValueSource,
    /// Full width of a homodyne acceptance window; `None` is the ideal
    /// quadrature functional.
    pub acceptance_window: Option<f64>,
}

impl ProtocolConfig {
    /// Scenario with cutoffs chosen by the tail guard at the default
    /// tolerance and default thresholds.
    pub fn new(lambda: f64, kappa_t: f64, pre: AncillaSpec, post: AncillaSpec) -> Result<Self> {
        Self::with_tail_tol(lambda, kappa_t, pre, post, DEFAULT_TAIL_TOL)
    }

    pub fn with_tail_tol(
        lambda: f64,
        kappa_t: f64,
        pre: AncillaSpec,
        post: AncillaSpec,
        tail_tol: f64,
    ) -> Result<Self> {
        pre.validate()?;
        let cutoff = Cutoff::for_tmsv(lambda, tail_tol)?;
        let ancilla_cutoff = pre.auto_cutoff(tail_tol)?.ok_or(Error::InvalidParameter {
            name: "pre",
            value: f64::NAN,
            reason: "pre-selected ancilla must be normalizable",
        })?;
        let config = Self {
            lambda,
            kappa_t,
            pre,
            post,
            cutoff,
            ancilla_cutoff,
            ortho_threshold: DEFAULT_ORTHO_THRESHOLD,
            majorization_eps: DEFAULT_MAJORIZATION_EPS,
            weak_value_source: WeakValueSource::Numeric,
            acceptance_window: None,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.lambda) {
            return Err(Error::UnphysicalSqueezing { lambda: self.lambda });
        }
        if !self.kappa_t.is_finite() {
            return Err(Error::InvalidParameter { name: "kappa_T", value: self.kappa_t, reason: "must be finite" });
        }
        if !(self.ortho_threshold > 0.0 && self.ortho_threshold < 1.0) {
            return Err(Error::InvalidParameter {
                name: "ortho_threshold",
                value: self.ortho_threshold,
                reason: "must lie in (0, 1)",
            });
        }
        if !(self.majorization_eps >= 0.0) || !self.majorization_eps.is_finite() {
            return Err(Error::InvalidParameter {
                name: "majorization_eps",
                value: self.majorization_eps,
                reason: "must be finite and >= 0",
            });
        }
        if let Some(w) = self.acceptance_window {
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::InvalidParameter { name: "window", value: w, reason: "must be finite and > 0" });
            }
            if !matches!(self.post, AncillaSpec::QuadratureEigenstate { .. }) {
                return Err(Error::InvalidParameter {
                    name: "window",
                    value: w,
                    reason: "acceptance window applies only to quadrature post-selection",
                });
            }
        }
        self.post.validate()?;
        // tail guards
        self.pre.to_fock(self.ancilla_cutoff)?;
        hilbert::tmsv(self.lambda, self.cutoff)?;
        Ok(())
    }

    pub fn pre_state(&self) -> Result<FockVector> {
        self.pre.to_fock(self.ancilla_cutoff)
    }

    /// Post-selector on the ancilla cutoff. Normalizable post-selections are
    /// built on their own tail-guarded cutoff and padded or clipped.
    pub fn post_selector(&self) -> Result<PostSelector> {
        match self.post.auto_cutoff(self.ancilla_cutoff.tail_tol())? {
            Some(c) if c.n_max() > self.ancilla_cutoff.n_max() => self.post.to_post_selector(c),
            _ => self.post.to_post_selector(self.ancilla_cutoff),
        }
    }

    /// Real amplitude of a coherent pre-selection, when that is what it is.
    pub fn coherent_pre_amplitude(&self) -> Option<f64> {
        match self.pre {
            AncillaSpec::Coherent { magnitude, phase } if phase == 0.0 && magnitude > 0.0 => Some(magnitude),
            _ => None,
        }
    }
}

/// `G(0)..G(n_max)` for mode B.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterFunction {
    pub g: Vec<C64>,
}

impl FilterFunction {
    /// `G(n)/G(0)`.
    pub fn ratio(&self, n: usize) -> C64 {
        self.g[n] / self.g[0]
    }
}

/// `G(n) = Σ_m b_m e^{−iκ_T n m} Φ_1(m)` with `b` the post-selection bra.
pub fn filter_function(pre: &FockVector, post: &PostSelector, kappa_t: f64, n_max_b: usize) -> FilterFunction {
    let weighted: Vec<C64> = post.bra(pre.amps().len()).iter().zip(pre.amps()).map(|(b, k)| b * k).collect();
    let g = (0..=n_max_b)
        .map(|n| weighted.iter().enumerate().map(|(m, w)| w * C64::from_polar(1.0, -kappa_t * (n * m) as f64)).sum())
        .collect();
    FilterFunction { g }
}

/// Exact post-selected output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactOutput {
    pub state: SchmidtDiagonalState,
    /// Probability of the post-selection event, or a density per unit `x`
    /// when `is_density`.
    pub success_prob: f64,
    pub is_density: bool,
}

fn exact_on(
    config: &ProtocolConfig,
    cutoff: Cutoff,
    pre: &FockVector,
    post: &PostSelector,
) -> Result<(ExactOutput, FilterFunction)> {
    let filter = filter_function(pre, post, config.kappa_t, cutoff.n_max());
    let norm0 = (1.0 - config.lambda * config.lambda).sqrt();
    let mut lam_n = 1.0;
    let coeffs: Vec<C64> = filter
        .g
        .iter()
        .map(|g| {
            let c = g * norm0 * lam_n;
            lam_n *= config.lambda;
            c
        })
        .collect();
    let weight: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    let (success_prob, is_density) = match (config.acceptance_window, post) {
        (Some(width), PostSelector::QuadratureFunctional { x, phi, phase }) => {
            let p = integrate_window(config, cutoff, pre, *x, *phi, *phase, width);
            (p, false)
        }
        _ => (weight, post.is_density()),
    };
    if !(weight >= VANISHING_PROB) {
        return Err(Error::VanishingPostSelection { prob: weight });
    }
    let state = SchmidtDiagonalState::normalize(coeffs, cutoff)?;
    Ok((ExactOutput { state, success_prob, is_density }, filter))
}

fn integrate_window(
    config: &ProtocolConfig,
    cutoff: Cutoff,
    pre: &FockVector,
    x: f64,
    phi: f64,
    phase: hilbert::QuadraturePhase,
    width: f64,
) -> f64 {
    let density = |xv: f64| {
        let post = PostSelector::QuadratureFunctional { x: xv, phi, phase };
        let filter = filter_function(pre, &post, config.kappa_t, cutoff.n_max());
        let l2 = config.lambda * config.lambda;
        let mut w = 1.0 - l2;
        filter
            .g
            .iter()
            .map(|g| {
                let p = g.norm_sqr() * w;
                w *= l2;
                p
            })
            .sum::<f64>()
    };
    let (a, b) = (x - 0.5 * width, x + 0.5 * width);
    let h = (b - a) / WINDOW_PANELS as f64;
    let mut acc = density(a) + density(b);
    for k in 1..WINDOW_PANELS {
        let coef = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += coef * density(a + k as f64 * h);
    }
    acc * h / 3.0
}

/// Runs the protocol exactly on the configured cutoffs.
pub fn apply_protocol_exact(config: &ProtocolConfig) -> Result<ExactOutput> {
    config.validate()?;
    let pre = config.pre_state()?;
    let post = config.post_selector()?;
    exact_on(config, config.cutoff, &pre, &post).map(|(out, _)| out)
}

/// The two-mode squeezed vacuum predicted by the weak value,
/// `c_n = √(1−|λ'|²) λ'ⁿ` with `λ' = λ e^{−iκ_T o_w}`.
pub fn predicted_tmsv(lambda: f64, kappa_t: f64, o_w: C64, cutoff: Cutoff) -> Result<SchmidtDiagonalState> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::UnphysicalSqueezing { lambda });
    }
    let growth = lambda * lambda * (2.0 * kappa_t * o_w.im).exp();
    if !(growth < 1.0) {
        return Err(Error::UnphysicalOutput { growth });
    }
    let lambda_prime = lambda_prime(lambda, kappa_t, o_w);
    let mut c = C64::new((1.0 - lambda_prime.norm_sqr()).sqrt(), 0.0);
    let coeffs: Vec<C64> = (0..cutoff.dim())
        .map(|_| {
            let out = c;
            c *= lambda_prime;
            out
        })
        .collect();
    cutoff.guard(hilbert::tmsv_tail(lambda_prime.norm(), cutoff.n_max()))?;
    SchmidtDiagonalState::from_coefficients(coeffs, cutoff)
}

/// `λ' = λ e^{−iκ_T o_w}`.
pub fn lambda_prime(lambda: f64, kappa_t: f64, o_w: C64) -> C64 {
    lambda * (C64::new(0.0, -kappa_t) * o_w).exp()
}

/// Per-level deviation from the weak-value prediction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// `λⁿ (G(n)/G(0) − e^{−iκ_T n o_w})`
    pub raw: Vec<C64>,
    /// `G(n)/G(0) − e^{−iκ_T n o_w}` without the `λⁿ` damping.
    pub relative: Vec<C64>,
    pub max_abs: f64,
    pub argmax: usize,
}

fn residuals_from(filter: &FilterFunction, lambda: f64, kappa_t: f64, o_w: C64) -> Residuals {
    let mut lam_n = 1.0;
    let mut raw = Vec::with_capacity(filter.g.len());
    let mut relative = Vec::with_capacity(filter.g.len());
    for n in 0..filter.g.len() {
        let predicted = (C64::new(0.0, -kappa_t * n as f64) * o_w).exp();
        let rel = if n == 0 { C64::new(0.0, 0.0) } else { filter.ratio(n) - predicted };
        relative.push(rel);
        raw.push(rel * lam_n);
        lam_n *= lambda;
    }
    let (argmax, max_abs) =
        raw.iter().map(|r| r.norm()).enumerate().fold((0, 0.0), |best, (n, v)| if v > best.1 { (n, v) } else { best });
    Residuals { raw, relative, max_abs, argmax }
}

pub fn weakness_residuals(config: &ProtocolConfig, o_w: C64) -> Result<Residuals> {
    config.validate()?;
    let pre = config.pre_state()?;
    let post = config.post_selector()?;
    weak_values::checked_overlap(&pre, &post, config.ortho_threshold)?;
    let filter = filter_function(&pre, &post, config.kappa_t, config.cutoff.n_max());
    Ok(residuals_from(&filter, config.lambda, config.kappa_t, o_w))
}

/// `|⟨predicted|exact⟩|²`, with both states renormalized on the retained
/// levels so that truncation loss does not register as infidelity.
pub fn approximation_fidelity(exact: &SchmidtDiagonalState, predicted: &SchmidtDiagonalState) -> Result<f64> {
    for s in [exact, predicted] {
        if !s.is_normalized() {
            return Err(Error::NotNormalized { norm_sqr: s.norm_sqr() });
        }
    }
    if exact.coeffs().len() != predicted.coeffs().len() {
        return Err(Error::CutoffMismatch { left: exact.coeffs().len(), right: predicted.coeffs().len() });
    }
    let amp: C64 = predicted.coeffs().iter().zip(exact.coeffs()).map(|(p, e)| p.conj() * e).sum();
    Ok((amp.norm_sqr() / (exact.norm_sqr() * predicted.norm_sqr())).min(1.0))
}

/// Everything a single run reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationResult {
    pub input: SchmidtDiagonalState,
    pub exact_output: SchmidtDiagonalState,
    pub success_prob: f64,
    pub is_density: bool,
    pub weak_value: WeakValue,
    pub weak_value_analytic: Option<C64>,
    /// Weak value fed into the prediction.
    pub weak_value_used: C64,
    /// `Im n_W > 0`; absent when `κ_T ≤ 0`.
    pub success: Option<bool>,
    pub lambda_prime: C64,
    pub predicted_output: Option<SchmidtDiagonalState>,
    /// Why the prediction is absent.
    pub predicted_note: Option<String>,
    pub residuals: Residuals,
    pub fidelity: Option<f64>,
    pub verdict: EntanglementVerdict,
    /// Cutoff actually used for modes A and B.
    pub n_max: usize,
    pub ancilla_n_max: usize,
    /// Mass discarded from the input TMSV.
    pub input_tail_mass: f64,
    /// Weight of the exact output on its highest retained level.
    pub output_edge_weight: f64,
}

pub fn run(config: &ProtocolConfig) -> Result<ConcentrationResult> {
    config.validate()?;
    let pre = config.pre_state()?;
    let post = config.post_selector()?;
    let weak_value = weak_values::weak_value_numeric_with(&pre, &post, config.ortho_threshold)?;
    let weak_value_analytic =
        config.coherent_pre_amplitude().and_then(|alpha| weak_values::n_w_analytic(&config.post, alpha).ok());
    let weak_value_used = match config.weak_value_source {
        WeakValueSource::Numeric => weak_value.value,
        WeakValueSource::Analytic => weak_value_analytic.ok_or_else(|| {
            Error::UnsupportedScheme("analytic weak value requested but unavailable for this scheme".into())
        })?,
    };
    let success = weak_values::success_condition(&weak_value, config.kappa_t).ok();
    let lp = lambda_prime(config.lambda, config.kappa_t, weak_value_used);

    // widen the cutoff so the predicted state also passes the tail guard
    let mut cutoff = config.cutoff;
    if lp.norm() < 1.0 {
        let needed = Cutoff::for_tmsv(lp.norm(), config.cutoff.tail_tol())?;
        if needed.n_max() > cutoff.n_max() {
            cutoff = cutoff.resized(needed.n_max());
        }
    }

    let input = hilbert::tmsv(config.lambda, cutoff)?;
    let (exact, filter) = exact_on(config, cutoff, &pre, &post)?;
    let residuals = residuals_from(&filter, config.lambda, config.kappa_t, weak_value_used);

    let (predicted_output, predicted_note) =
        match predicted_tmsv(config.lambda, config.kappa_t, weak_value_used, cutoff) {
            Ok(s) => (Some(s), None),
            Err(e @ Error::UnphysicalOutput { .. }) => (None, Some(e.to_string())),
            Err(e) => return Err(e),
        };
    let fidelity = predicted_output.as_ref().map(|p| approximation_fidelity(&exact.state, p)).transpose()?;
    let verdict = entanglement::compare_with(&input, &exact.state, config.majorization_eps)?;
    let output_edge_weight = exact.state.coeffs().last().map_or(0.0, |c| c.norm_sqr());

    Ok(ConcentrationResult {
        input_tail_mass: (1.0 - input.norm_sqr()).max(0.0),
        input,
        exact_output: exact.state,
        success_prob: exact.success_prob,
        is_density: exact.is_density,
        weak_value,
        weak_value_analytic,
        weak_value_used,
        success,
        lambda_prime: lp,
        predicted_output,
        predicted_note,
        residuals,
        fidelity,
        verdict,
        n_max: cutoff.n_max(),
        ancilla_n_max: config.ancilla_cutoff.n_max(),
        output_edge_weight,
    })
}
