//! Scenario files.
//!
//! A scenario is a TOML document:
//!
//! ```toml
//! [protocol]
//! lambda = 0.5
//! kappa_t = 0.05
//!
//! [ancilla.pre]
//! scheme = "coherent"
//! magnitude = 1.0
//!
//! [ancilla.post]
//! scheme = "coherent"      # coherent | squeezed | quadrature | fock
//! magnitude = 1.0
//! phase = 4.71238898038469 # radians
//!
//! [numerics]               # all optional
//! n_max = 40
//! tail_tol = 1e-10
//!
//! [[sweep.axis]]           # optional, one or two axes
//! param = "post.phase"
//! start = 0.0
//! stop = 6.283185307179586
//! steps = 629
//! ```
//!
//! Unknown keys anywhere are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};
use weakconc::concentration::{ProtocolConfig, WeakValueSource};
use weakconc::entanglement::DEFAULT_MAJORIZATION_EPS;
use weakconc::hilbert::{AncillaSpec, Cutoff, FockVector, QuadraturePhase, DEFAULT_TAIL_TOL};
use weakconc::weak_values::DEFAULT_ORTHO_THRESHOLD;
use weakconc::C64;

use crate::ScenarioError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub protocol: ProtocolSection,
    pub ancilla: AncillaSection,
    #[serde(default)]
    pub numerics: NumericsSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolSection {
    pub lambda: f64,
    pub kappa_t: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AncillaSection {
    pub pre: StateSpec,
    pub post: StateSpec,
}

/// Ancilla state with a scheme discriminator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "lowercase", deny_unknown_fields)]
pub enum StateSpec {
    Coherent {
        magnitude: f64,
        #[serde(default)]
        phase: f64,
    },
    Squeezed {
        r: f64,
        phi: f64,
    },
    Quadrature {
        x: f64,
        phi: f64,
        #[serde(default)]
        convention: QuadraturePhase,
    },
    /// Explicit amplitudes; `im` defaults to zeros.
    Fock {
        re: Vec<f64>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        im: Vec<f64>,
    },
}

impl StateSpec {
    pub fn name(&self) -> &'static str {
        match self {
            StateSpec::Coherent { .. } => "coherent",
            StateSpec::Squeezed { .. } => "squeezed",
            StateSpec::Quadrature { .. } => "quadrature",
            StateSpec::Fock { .. } => "fock",
        }
    }

    pub fn to_ancilla(&self, tail_tol: f64) -> Result<AncillaSpec, ScenarioError> {
        Ok(match self {
            StateSpec::Coherent { magnitude, phase } => AncillaSpec::Coherent { magnitude: *magnitude, phase: *phase },
            StateSpec::Squeezed { r, phi } => AncillaSpec::SqueezedVacuum { r: *r, phi: *phi },
            StateSpec::Quadrature { x, phi, convention } => {
                AncillaSpec::QuadratureEigenstate { x: *x, phi: *phi, phase: *convention }
            }
            StateSpec::Fock { re, im } => {
                if re.is_empty() {
                    return Err(ScenarioError::Parse("fock state needs at least one amplitude".into()));
                }
                if !im.is_empty() && im.len() != re.len() {
                    return Err(ScenarioError::Parse(format!(
                        "fock state: re has {} entries but im has {}",
                        re.len(),
                        im.len()
                    )));
                }
                let amps =
                    re.iter().enumerate().map(|(n, r)| C64::new(*r, im.get(n).copied().unwrap_or(0.0))).collect();
                let cutoff = Cutoff::new(re.len() - 1, tail_tol)?;
                AncillaSpec::CustomFock(FockVector::from_amplitudes(amps, cutoff)?)
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsSection {
    /// Cutoff of modes A and B; chosen by the tail guard when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    /// Cutoff of the ancilla; chosen by the tail guard when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ancilla_n_max: Option<usize>,
    #[serde(default = "default_tail_tol")]
    pub tail_tol: f64,
    #[serde(default = "default_ortho")]
    pub ortho_threshold: f64,
    #[serde(default = "default_eps")]
    pub majorization_eps: f64,
    /// Homodyne acceptance window width (quadrature post-selection only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub acceptance_window: Option<f64>,
    #[serde(default)]
    pub weak_value: WeakValueSource,
}

fn default_tail_tol() -> f64 {
    DEFAULT_TAIL_TOL
}

fn default_ortho() -> f64 {
    DEFAULT_ORTHO_THRESHOLD
}

fn default_eps() -> f64 {
    DEFAULT_MAJORIZATION_EPS
}

impl Default for NumericsSection {
    fn default() -> Self {
        Self {
            n_max: None,
            ancilla_n_max: None,
            tail_tol: DEFAULT_TAIL_TOL,
            ortho_threshold: DEFAULT_ORTHO_THRESHOLD,
            majorization_eps: DEFAULT_MAJORIZATION_EPS,
            acceptance_window: None,
            weak_value: WeakValueSource::Numeric,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub axis: Vec<SweepAxis>,
}

/// Inclusive grid `start..=stop` with `steps` points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub param: SweepParam,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl SweepAxis {
    pub fn values(&self) -> Vec<f64> {
        match self.steps {
            0 => Vec::new(),
            1 => vec![self.start],
            n => (0..n)
                .map(|k| {
                    if k == n - 1 {
                        self.stop
                    } else {
                        self.start + (self.stop - self.start) * k as f64 / (n - 1) as f64
                    }
                })
                .collect(),
        }
    }
}

/// Sweepable scenario fields. Angles are in radians.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepParam {
    #[serde(rename = "lambda")]
    Lambda,
    #[serde(rename = "kappa_t")]
    KappaT,
    #[serde(rename = "pre.magnitude")]
    PreMagnitude,
    #[serde(rename = "post.magnitude")]
    PostMagnitude,
    #[serde(rename = "post.phase")]
    PostPhase,
    #[serde(rename = "post.r")]
    PostR,
    #[serde(rename = "post.phi")]
    PostPhi,
    #[serde(rename = "post.x")]
    PostX,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Lambda => "lambda",
            SweepParam::KappaT => "kappa_t",
            SweepParam::PreMagnitude => "pre.magnitude",
            SweepParam::PostMagnitude => "post.magnitude",
            SweepParam::PostPhase => "post.phase",
            SweepParam::PostR => "post.r",
            SweepParam::PostPhi => "post.phi",
            SweepParam::PostX => "post.x",
        }
    }
}

impl ScenarioFile {
    pub fn from_toml_str(text: &str) -> Result<Self, ScenarioError> {
        toml::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ScenarioError::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    /// Sets one swept parameter; errors if it does not apply to the
    /// configured schemes.
    pub fn set(&mut self, param: SweepParam, value: f64) -> Result<(), ScenarioError> {
        let slot = match (param, &mut self.ancilla.pre, &mut self.ancilla.post) {
            (SweepParam::Lambda, _, _) => &mut self.protocol.lambda,
            (SweepParam::KappaT, _, _) => &mut self.protocol.kappa_t,
            (SweepParam::PreMagnitude, StateSpec::Coherent { magnitude, .. }, _) => magnitude,
            (SweepParam::PostMagnitude, _, StateSpec::Coherent { magnitude, .. }) => magnitude,
            (SweepParam::PostPhase, _, StateSpec::Coherent { phase, .. }) => phase,
            (SweepParam::PostR, _, StateSpec::Squeezed { r, .. }) => r,
            (SweepParam::PostPhi, _, StateSpec::Squeezed { phi, .. }) => phi,
            (SweepParam::PostPhi, _, StateSpec::Quadrature { phi, .. }) => phi,
            (SweepParam::PostX, _, StateSpec::Quadrature { x, .. }) => x,
            (p, pre, post) => {
                return Err(ScenarioError::Sweep(format!(
                    "parameter {} does not apply to pre={} post={}",
                    p.name(),
                    pre.name(),
                    post.name()
                )))
            }
        };
        *slot = value;
        Ok(())
    }

    /// Checks the sweep section, if any, and returns its axes.
    pub fn sweep_axes(&self) -> Result<Vec<SweepAxis>, ScenarioError> {
        let sweep =
            self.sweep.as_ref().ok_or_else(|| ScenarioError::Sweep("scenario has no [sweep] section".into()))?;
        if sweep.axis.is_empty() || sweep.axis.len() > 2 {
            return Err(ScenarioError::Sweep(format!("need 1 or 2 sweep axes, got {}", sweep.axis.len())));
        }
        for ax in &sweep.axis {
            if ax.steps == 0 {
                return Err(ScenarioError::Sweep(format!("axis {} has zero steps", ax.param.name())));
            }
            if !ax.start.is_finite() || !ax.stop.is_finite() {
                return Err(ScenarioError::Sweep(format!("axis {} has a non-finite bound", ax.param.name())));
            }
            let mut probe = self.clone();
            probe.set(ax.param, ax.start)?;
        }
        if sweep.axis.len() == 2 && sweep.axis[0].param == sweep.axis[1].param {
            return Err(ScenarioError::Sweep("the two sweep axes must differ".into()));
        }
        Ok(sweep.axis.clone())
    }

    /// Resolves the scenario into a validated protocol configuration.
    pub fn to_config(&self) -> Result<ProtocolConfig, ScenarioError> {
        let num = &self.numerics;
        let tol = num.tail_tol;
        let pre = self.ancilla.pre.to_ancilla(tol)?;
        let post = self.ancilla.post.to_ancilla(tol)?;
        pre.validate()?;
        post.validate()?;
        if let AncillaSpec::QuadratureEigenstate { .. } = pre {
            return Err(ScenarioError::Parse("pre-selection cannot be a quadrature eigenstate".into()));
        }
        let cutoff = match num.n_max {
            Some(n) => Cutoff::new(n, tol)?,
            None => Cutoff::for_tmsv(self.protocol.lambda, tol)?,
        };
        let ancilla_cutoff = match num.ancilla_n_max {
            Some(n) => Cutoff::new(n, tol)?,
            None => pre.auto_cutoff(tol)?.expect("normalizable pre-selection"),
        };
        let config = ProtocolConfig {
            lambda: self.protocol.lambda,
            kappa_t: self.protocol.kappa_t,
            pre,
            post,
            cutoff,
            ancilla_cutoff,
            ortho_threshold: num.ortho_threshold,
            majorization_eps: num.majorization_eps,
            weak_value_source: num.weak_value,
            acceptance_window: num.acceptance_window,
        };
        config.validate()?;
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
[protocol]
lambda = 0.5
kappa_t = 0.05

[ancilla.pre]
scheme = "coherent"
magnitude = 1.0

[ancilla.post]
scheme = "coherent"
magnitude = 1.0
phase = 4.71238898038469
"#;

    #[test]
    fn parses_minimal() {
        let s = ScenarioFile::from_toml_str(BASE).unwrap();
        assert_eq!(s.numerics, NumericsSection::default());
        let cfg = s.to_config().unwrap();
        assert_eq!(cfg.lambda, 0.5);
        assert_eq!(cfg.cutoff.n_max(), Cutoff::for_tmsv(0.5, 1e-10).unwrap().n_max());
    }

    #[test]
    fn rejects_unknown_keys() {
        let text = BASE.replace("kappa_t = 0.05", "kappa_t = 0.05\nkapa = 1");
        assert!(matches!(ScenarioFile::from_toml_str(&text), Err(ScenarioError::Parse(_))));
        let text = BASE.replace("magnitude = 1.0\n\n[ancilla.post]", "magnitude = 1.0\nbogus = 2\n\n[ancilla.post]");
        assert!(matches!(ScenarioFile::from_toml_str(&text), Err(ScenarioError::Parse(_))));
    }

    #[test]
    fn toml_round_trip() {
        let mut s = ScenarioFile::from_toml_str(BASE).unwrap();
        s.sweep = Some(SweepSection {
            axis: vec![SweepAxis { param: SweepParam::PostPhase, start: 0.0, stop: 1.0, steps: 3 }],
        });
        let again = ScenarioFile::from_toml_str(&s.to_toml_string()).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn grid_is_inclusive() {
        let ax = SweepAxis { param: SweepParam::KappaT, start: 0.0, stop: 1.0, steps: 5 };
        assert_eq!(ax.values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let one = SweepAxis { steps: 1, ..ax };
        assert_eq!(one.values(), vec![0.0]);
    }

    #[test]
    fn set_rejects_inapplicable_param() {
        let mut s = ScenarioFile::from_toml_str(BASE).unwrap();
        assert!(s.set(SweepParam::PostR, 0.3).is_err());
        s.set(SweepParam::PostPhase, 1.0).unwrap();
        assert_eq!(s.ancilla.post, StateSpec::Coherent { magnitude: 1.0, phase: 1.0 });
    }
}
