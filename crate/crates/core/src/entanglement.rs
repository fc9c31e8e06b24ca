//! Schmidt spectra and the majorization certificate.
//!
//! For `Σ c_n |n,n⟩` both reduced density matrices are diagonal with entries
//! `|c_n|²`, so the spectrum is read off the coefficients directly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::SchmidtDiagonalState;

/// Absolute slack on partial sums when testing majorization.
pub const DEFAULT_MAJORIZATION_EPS: f64 = 1e-9;

const SUM_TOL: f64 = 1e-10;

/// Eigenvalues of a reduced density matrix, sorted descending.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchmidtSpectrum {
    probs: Vec<f64>,
}

impl SchmidtSpectrum {
    pub fn from_probs(mut probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::NotNormalized { norm_sqr: 0.0 });
        }
        if let Some(&p) = probs.iter().find(|p| !(**p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidParameter { name: "probability", value: p, reason: "must be finite and >= 0" });
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::NotNormalized { norm_sqr: total });
        }
        probs.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Zero-padded copy of length `len` (never truncates).
    pub fn padded(&self, len: usize) -> Vec<f64> {
        let mut p = self.probs.clone();
        if p.len() < len {
            p.resize(len, 0.0);
        }
        p
    }
}

pub fn schmidt_spectrum(state: &SchmidtDiagonalState) -> Result<SchmidtSpectrum> {
    if !state.is_normalized() {
        return Err(Error::NotNormalized { norm_sqr: state.norm_sqr() });
    }
    let total = state.norm_sqr();
    SchmidtSpectrum::from_probs(state.coeffs().iter().map(|c| c.norm_sqr() / total).collect())
}

/// Von Neumann entropy in bits, `−Σ p log₂ p`.
pub fn von_neumann_entropy(s: &SchmidtSpectrum) -> f64 {
    entropy_in_base(s, 2.0)
}

pub fn entropy_in_base(s: &SchmidtSpectrum, base: f64) -> f64 {
    let h: f64 = s.probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).sum();
    h / base.ln()
}

pub fn purity(s: &SchmidtSpectrum) -> f64 {
    s.probs.iter().map(|p| p * p).sum()
}

/// `d ≺ c`: every head partial sum of `d` is at most that of `c`, up to
/// `eps`. True means `d` is at least as mixed as `c`.
pub fn majorizes(d: &SchmidtSpectrum, c: &SchmidtSpectrum, eps: f64) -> bool {
    let len = d.len().max(c.len());
    let (d, c) = (d.padded(len), c.padded(len));
    let (mut sd, mut sc) = (0.0, 0.0);
    for k in 0..len {
        sd += d[k];
        sc += c[k];
        if sd > sc + eps {
            return false;
        }
    }
    true
}

/// Tail-sum form of `d ≺ c`: `Σ_{k≥ℓ} d_k ≥ Σ_{k≥ℓ} c_k − eps` for every
/// `ℓ`, including the total mass at `ℓ = 0`.
pub fn majorizes_tail(d: &SchmidtSpectrum, c: &SchmidtSpectrum, eps: f64) -> bool {
    let len = d.len().max(c.len());
    let (d, c) = (d.padded(len), c.padded(len));
    (0..len).all(|l| d[l..].iter().sum::<f64>() >= c[l..].iter().sum::<f64>() - eps)
}

/// Total photon number `2λ²/(1−λ²)` of a two-mode squeezed vacuum.
pub fn mean_photon_number(lambda_mag: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&lambda_mag) {
        return Err(Error::UnphysicalSqueezing { lambda: lambda_mag });
    }
    let l2 = lambda_mag * lambda_mag;
    Ok(2.0 * l2 / (1.0 - l2))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntanglementVerdict {
    /// Output spectrum majorized by the input spectrum.
    pub majorized: bool,
    pub entropy_in: f64,
    pub entropy_out: f64,
    pub purity_in: f64,
    pub purity_out: f64,
    pub mean_photons_in: f64,
    pub mean_photons_out: f64,
    /// Majorized and strictly more entropic (gain above the tolerance).
    pub concentrated: bool,
}

impl EntanglementVerdict {
    pub fn entropy_gain(&self) -> f64 {
        self.entropy_out - self.entropy_in
    }
}

pub fn compare(input: &SchmidtDiagonalState, output: &SchmidtDiagonalState) -> Result<EntanglementVerdict> {
    compare_with(input, output, DEFAULT_MAJORIZATION_EPS)
}

pub fn compare_with(
    input: &SchmidtDiagonalState,
    output: &SchmidtDiagonalState,
    eps: f64,
) -> Result<EntanglementVerdict> {
    let s_in = schmidt_spectrum(input)?;
    let s_out = schmidt_spectrum(output)?;
    let majorized = majorizes(&s_out, &s_in, eps);
    let entropy_in = von_neumann_entropy(&s_in);
    let entropy_out = von_neumann_entropy(&s_out);
    Ok(EntanglementVerdict {
        majorized,
        entropy_in,
        entropy_out,
        purity_in: purity(&s_in),
        purity_out: purity(&s_out),
        mean_photons_in: input.mean_photons(),
        mean_photons_out: output.mean_photons(),
        concentrated: majorized && entropy_out - entropy_in > eps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{tmsv, Cutoff};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn spec(p: &[f64]) -> SchmidtSpectrum {
        SchmidtSpectrum::from_probs(p.to_vec()).unwrap()
    }

    #[test]
    fn tmsv_spectrum_is_geometric() {
        let s = schmidt_spectrum(&tmsv(0.5, Cutoff::with_n_max(60)).unwrap()).unwrap();
        for (n, p) in s.probs().iter().enumerate() {
            assert_abs_diff_eq!(*p, 0.75 * 0.25f64.powi(n as i32), epsilon = 1e-15);
        }
    }

    #[test]
    fn simple_entropies() {
        assert_eq!(von_neumann_entropy(&spec(&[1.0])), 0.0);
        assert_abs_diff_eq!(von_neumann_entropy(&spec(&[0.5, 0.5])), 1.0, epsilon = 1e-15);
        assert_eq!(purity(&spec(&[1.0])), 1.0);
        assert_eq!(purity(&spec(&[0.5, 0.5])), 0.5);
        assert_abs_diff_eq!(entropy_in_base(&spec(&[0.5, 0.5]), std::f64::consts::E), 2f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn tmsv_entropy_and_purity() {
        let lam: f64 = 0.5;
        let l2 = lam * lam;
        let closed = -(1.0 - l2).log2() - l2 / (1.0 - l2) * l2.log2();
        let direct: f64 = (0..200).map(|n| (1.0 - l2) * l2.powi(n)).filter(|p| *p > 0.0).map(|p| -p * p.log2()).sum();
        assert_abs_diff_eq!(closed, direct, epsilon = 1e-9);
        let s = schmidt_spectrum(&tmsv(lam, Cutoff::with_n_max(60)).unwrap()).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&s), closed, epsilon = 1e-9);
        assert_abs_diff_eq!(von_neumann_entropy(&s), 1.081704, epsilon = 1e-6);
        assert_abs_diff_eq!(purity(&s), 0.6, epsilon = 1e-12);
    }

    #[test]
    fn majorization_examples() {
        let a = spec(&[0.6, 0.3, 0.1]);
        assert!(majorizes(&a, &a, 0.0));
        let mixed = schmidt_spectrum(&tmsv(0.55, Cutoff::with_n_max(60)).unwrap()).unwrap();
        let less = schmidt_spectrum(&tmsv(0.5, Cutoff::with_n_max(60)).unwrap()).unwrap();
        assert!(majorizes(&mixed, &less, DEFAULT_MAJORIZATION_EPS));
        assert!(!majorizes(&less, &mixed, DEFAULT_MAJORIZATION_EPS));
        assert!(!majorizes(&spec(&[1.0]), &spec(&[0.5, 0.5]), DEFAULT_MAJORIZATION_EPS));
        assert!(majorizes(&spec(&[0.5, 0.5]), &spec(&[1.0]), DEFAULT_MAJORIZATION_EPS));
    }

    #[test]
    fn spectrum_validation() {
        assert!(SchmidtSpectrum::from_probs(vec![0.5, 0.4]).is_err());
        assert!(SchmidtSpectrum::from_probs(vec![1.2, -0.2]).is_err());
        assert!(SchmidtSpectrum::from_probs(vec![]).is_err());
        assert_eq!(spec(&[0.1, 0.9]).probs(), &[0.9, 0.1]);
    }

    #[test]
    fn mean_photons() {
        assert_eq!(mean_photon_number(0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(mean_photon_number(0.5).unwrap(), 2.0 / 3.0, epsilon = 1e-15);
        assert!(matches!(mean_photon_number(1.0), Err(Error::UnphysicalSqueezing { .. })));
    }

    #[test]
    fn compare_identical_states() {
        let s = tmsv(0.5, Cutoff::with_n_max(60)).unwrap();
        let v = compare(&s, &s).unwrap();
        assert!(v.majorized);
        assert!(!v.concentrated);
        assert_eq!(v.entropy_gain(), 0.0);
    }

    #[test]
    fn tmsv_monotone_in_lambda() {
        let lams = [0.0, 0.1, 0.3, 0.5, 0.7, 0.8];
        let specs: Vec<_> = lams
            .iter()
            .map(|&l| schmidt_spectrum(&tmsv(l, Cutoff::for_tmsv(l, 1e-12).unwrap()).unwrap()).unwrap())
            .collect();
        for w in specs.windows(2) {
            assert!(majorizes(&w[1], &w[0], DEFAULT_MAJORIZATION_EPS));
            assert!(von_neumann_entropy(&w[1]) > von_neumann_entropy(&w[0]));
        }
    }

    fn arb_spectrum() -> impl Strategy<Value = SchmidtSpectrum> {
        prop::collection::vec(0.0f64..1.0, 1..12).prop_filter_map("zero mass", |w| {
            let t: f64 = w.iter().sum();
            (t > 1e-6).then(|| SchmidtSpectrum::from_probs(w.iter().map(|x| x / t).collect()).unwrap())
        })
    }

    proptest! {
        #[test]
        fn head_and_tail_forms_agree(d in arb_spectrum(), c in arb_spectrum()) {
            prop_assert_eq!(majorizes(&d, &c, 1e-12), majorizes_tail(&d, &c, 1e-12));
        }

        #[test]
        fn entropy_bounds(s in arb_spectrum()) {
            let h = von_neumann_entropy(&s);
            prop_assert!(h >= 0.0);
            prop_assert!(h <= (s.len() as f64).log2() + 1e-12);
            let p = purity(&s);
            prop_assert!(p > 0.0 && p <= 1.0 + 1e-12);
        }
    }
}
