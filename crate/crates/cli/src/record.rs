//! Flat, serializable result of a single run.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use weakconc::concentration::{ConcentrationResult, ProtocolConfig};
use weakconc::entanglement::mean_photon_number;
use weakconc::C64;

use crate::scenario::ScenarioFile;
use crate::ScenarioError;

/// Complex number as a `{re, im}` pair.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for Complex {
    fn from(z: C64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<Complex> for C64 {
    fn from(z: Complex) -> Self {
        C64::new(z.re, z.im)
    }
}

/// Absent values serialize as `null`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultRecord {
    pub scenario: ScenarioFile,
    pub lambda: f64,
    pub kappa_t: f64,
    pub n_max: usize,
    pub ancilla_n_max: usize,
    pub tail_tol: f64,

    pub weak_value: Complex,
    pub overlap_mag: f64,
    pub weak_value_analytic: Option<Complex>,
    pub weak_value_used: Complex,
    pub success: Option<bool>,

    pub success_prob: f64,
    pub is_density: bool,

    pub lambda_prime: Complex,
    pub lambda_prime_abs: f64,
    pub predicted_note: Option<String>,
    pub fidelity: Option<f64>,
    pub mean_photons_predicted: Option<f64>,

    pub max_residual: f64,
    pub residual_argmax: usize,
    pub max_relative_residual: f64,

    pub majorized: bool,
    pub concentrated: bool,
    pub entropy_in: f64,
    pub entropy_out: f64,
    pub entropy_gain: f64,
    pub purity_in: f64,
    pub purity_out: f64,
    pub mean_photons_in: f64,
    pub mean_photons_out: f64,

    pub input_tail_mass: f64,
    pub output_edge_weight: f64,

    pub exact_output: Vec<Complex>,
    pub predicted_output: Option<Vec<Complex>>,
    pub residuals: Vec<Complex>,
}

fn cvec(v: &[C64]) -> Vec<Complex> {
    v.iter().copied().map(Complex::from).collect()
}

impl ResultRecord {
    pub fn new(
        scenario: &ScenarioFile,
        config: &ProtocolConfig,
        r: &ConcentrationResult,
    ) -> Result<Self, ScenarioError> {
        let lp_abs = r.lambda_prime.norm();
        let record = Self {
            scenario: scenario.clone(),
            lambda: config.lambda,
            kappa_t: config.kappa_t,
            n_max: r.n_max,
            ancilla_n_max: r.ancilla_n_max,
            tail_tol: config.cutoff.tail_tol(),
            weak_value: r.weak_value.value.into(),
            overlap_mag: r.weak_value.overlap_mag,
            weak_value_analytic: r.weak_value_analytic.map(Complex::from),
            weak_value_used: r.weak_value_used.into(),
            success: r.success,
            success_prob: r.success_prob,
            is_density: r.is_density,
            lambda_prime: r.lambda_prime.into(),
            lambda_prime_abs: lp_abs,
            predicted_note: r.predicted_note.clone(),
            fidelity: r.fidelity,
            mean_photons_predicted: r.predicted_output.as_ref().and_then(|_| mean_photon_number(lp_abs).ok()),
            max_residual: r.residuals.max_abs,
            residual_argmax: r.residuals.argmax,
            max_relative_residual: r.residuals.relative.iter().map(|z| z.norm()).fold(0.0, f64::max),
            majorized: r.verdict.majorized,
            concentrated: r.verdict.concentrated,
            entropy_in: r.verdict.entropy_in,
            entropy_out: r.verdict.entropy_out,
            entropy_gain: r.verdict.entropy_gain(),
            purity_in: r.verdict.purity_in,
            purity_out: r.verdict.purity_out,
            mean_photons_in: r.verdict.mean_photons_in,
            mean_photons_out: r.verdict.mean_photons_out,
            input_tail_mass: r.input_tail_mass,
            output_edge_weight: r.output_edge_weight,
            exact_output: cvec(r.exact_output.coeffs()),
            predicted_output: r.predicted_output.as_ref().map(|s| cvec(s.coeffs())),
            residuals: cvec(&r.residuals.raw),
        };
        record.check_finite()?;
        Ok(record)
    }

    /// Every number in the record must be finite.
    pub fn check_finite(&self) -> Result<(), ScenarioError> {
        let scalars = [
            ("lambda", self.lambda),
            ("kappa_t", self.kappa_t),
            ("tail_tol", self.tail_tol),
            ("overlap_mag", self.overlap_mag),
            ("success_prob", self.success_prob),
            ("lambda_prime_abs", self.lambda_prime_abs),
            ("max_residual", self.max_residual),
            ("max_relative_residual", self.max_relative_residual),
            ("entropy_in", self.entropy_in),
            ("entropy_out", self.entropy_out),
            ("entropy_gain", self.entropy_gain),
            ("purity_in", self.purity_in),
            ("purity_out", self.purity_out),
            ("mean_photons_in", self.mean_photons_in),
            ("mean_photons_out", self.mean_photons_out),
            ("input_tail_mass", self.input_tail_mass),
            ("output_edge_weight", self.output_edge_weight),
            ("fidelity", self.fidelity.unwrap_or(0.0)),
            ("mean_photons_predicted", self.mean_photons_predicted.unwrap_or(0.0)),
        ];
        if let Some((name, _)) = scalars.iter().find(|(_, v)| !v.is_finite()) {
            return Err(ScenarioError::Record(format!("field {name} is not finite")));
        }
        let complexes =
            [Some(self.weak_value), self.weak_value_analytic, Some(self.weak_value_used), Some(self.lambda_prime)];
        let vectors = [Some(&self.exact_output), self.predicted_output.as_ref(), Some(&self.residuals)];
        let all_finite = complexes
            .iter()
            .flatten()
            .chain(vectors.iter().flatten().flat_map(|v| v.iter()))
            .all(|z| z.re.is_finite() && z.im.is_finite());
        if !all_finite {
            return Err(ScenarioError::Record("complex field is not finite".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let record: Self = serde_json::from_str(text).map_err(|e| ScenarioError::Record(e.to_string()))?;
        record.check_finite()?;
        Ok(record)
    }

    /// Scalar fields as `(column, value)` pairs; absent values are `NA`.
    pub fn scalar_columns(&self) -> Vec<(&'static str, String)> {
        let opt = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |x| x.to_string());
        let optb = |v: Option<bool>| v.map_or_else(|| "NA".to_string(), |x| x.to_string());
        vec![
            ("pre_scheme", self.scenario.ancilla.pre.name().to_string()),
            ("post_scheme", self.scenario.ancilla.post.name().to_string()),
            ("lambda", self.lambda.to_string()),
            ("kappa_t", self.kappa_t.to_string()),
            ("n_max", self.n_max.to_string()),
            ("ancilla_n_max", self.ancilla_n_max.to_string()),
            ("nw_re", self.weak_value.re.to_string()),
            ("nw_im", self.weak_value.im.to_string()),
            ("nw_analytic_re", opt(self.weak_value_analytic.map(|z| z.re))),
            ("nw_analytic_im", opt(self.weak_value_analytic.map(|z| z.im))),
            ("overlap_mag", self.overlap_mag.to_string()),
            ("success", optb(self.success)),
            ("success_prob", self.success_prob.to_string()),
            ("is_density", self.is_density.to_string()),
            ("lambda_prime_re", self.lambda_prime.re.to_string()),
            ("lambda_prime_im", self.lambda_prime.im.to_string()),
            ("lambda_prime_abs", self.lambda_prime_abs.to_string()),
            ("fidelity", opt(self.fidelity)),
            ("mean_photons_predicted", opt(self.mean_photons_predicted)),
            ("max_residual", self.max_residual.to_string()),
            ("residual_argmax", self.residual_argmax.to_string()),
            ("max_relative_residual", self.max_relative_residual.to_string()),
            ("majorized", self.majorized.to_string()),
            ("concentrated", self.concentrated.to_string()),
            ("entropy_in", self.entropy_in.to_string()),
            ("entropy_out", self.entropy_out.to_string()),
            ("entropy_gain", self.entropy_gain.to_string()),
            ("purity_in", self.purity_in.to_string()),
            ("purity_out", self.purity_out.to_string()),
            ("mean_photons_in", self.mean_photons_in.to_string()),
            ("mean_photons_out", self.mean_photons_out.to_string()),
            ("input_tail_mass", self.input_tail_mass.to_string()),
            ("output_edge_weight", self.output_edge_weight.to_string()),
        ]
    }

    /// Header plus one row of scalar columns.
    pub fn to_csv(&self) -> String {
        let cols = self.scalar_columns();
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(cols.iter().map(|(k, _)| *k)).expect("in-memory write");
        w.write_record(cols.iter().map(|(_, v)| v.as_str())).expect("in-memory write");
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let prob_label = if self.is_density { "success density (per unit x)" } else { "success probability" };
        let opt = |v: Option<f64>| v.map_or_else(|| "absent".to_string(), |x| format!("{x:.6e}"));
        let _ = writeln!(
            out,
            "scheme              {} -> {}",
            self.scenario.ancilla.pre.name(),
            self.scenario.ancilla.post.name()
        );
        let _ = writeln!(out, "lambda, kappa_T     {}, {}", self.lambda, self.kappa_t);
        let _ = writeln!(out, "cutoffs (AB, C)     {}, {}", self.n_max, self.ancilla_n_max);
        let _ = writeln!(out, "weak value n_W      {:+.9} {:+.9}i", self.weak_value.re, self.weak_value.im);
        if let Some(a) = self.weak_value_analytic {
            let _ = writeln!(out, "  closed form       {:+.9} {:+.9}i", a.re, a.im);
        }
        let flag = self.success.map_or("absent (kappa_T <= 0)".to_string(), |s| s.to_string());
        let _ = writeln!(out, "success condition   {flag}");
        let _ = writeln!(out, "{prob_label:<20}{:.9e}", self.success_prob);
        let _ = writeln!(out, "|lambda'|           {:.12}", self.lambda_prime_abs);
        let _ = writeln!(out, "fidelity            {}", opt(self.fidelity));
        if let Some(note) = &self.predicted_note {
            let _ = writeln!(out, "  prediction        {note}");
        }
        let _ = writeln!(out, "max residual        {:.6e} at n={}", self.max_residual, self.residual_argmax);
        let _ = writeln!(
            out,
            "entropy in/out      {:.9} / {:.9} bits (gain {:+.3e})",
            self.entropy_in, self.entropy_out, self.entropy_gain
        );
        let _ = writeln!(out, "purity in/out       {:.9} / {:.9}", self.purity_in, self.purity_out);
        let _ = writeln!(out, "photons in/out      {:.9} / {:.9}", self.mean_photons_in, self.mean_photons_out);
        let _ = writeln!(out, "majorized           {}", self.majorized);
        let _ = writeln!(out, "more entangled      {}", self.concentrated);
        let _ = writeln!(out, "tail mass / edge    {:.3e} / {:.3e}", self.input_tail_mass, self.output_edge_weight);
        out
    }
}

/// Tail tolerance of the `weakvalue` subcommand's default cutoff.
pub const WEAKVALUE_TAIL_TOL: f64 = 1e-16;

/// Output of the `weakvalue` subcommand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeakValueReport {
    pub alpha: f64,
    pub scheme: String,
    pub ancilla_n_max: usize,
    pub numeric: Complex,
    pub analytic: Complex,
    pub overlap_mag: f64,
    /// `Im n_W > 0` (for positive coupling).
    pub success: bool,
    /// Quadrature value where the success flag flips, for homodyne schemes.
    pub quadrature_boundary: Option<f64>,
}

impl WeakValueReport {
    pub fn compute(
        alpha: f64,
        n_max: Option<usize>,
        post: &weakconc::hilbert::AncillaSpec,
    ) -> Result<Self, ScenarioError> {
        use weakconc::hilbert::{AncillaSpec, Cutoff};
        use weakconc::weak_values;

        let pre_spec = AncillaSpec::coherent(alpha);
        pre_spec.validate()?;
        let cutoff = match n_max {
            Some(n) => Cutoff::new(n, WEAKVALUE_TAIL_TOL)?,
            None => {
                let pre_cut = Cutoff::for_coherent(alpha, WEAKVALUE_TAIL_TOL)?;
                match post.auto_cutoff(WEAKVALUE_TAIL_TOL)? {
                    Some(c) if c.n_max() > pre_cut.n_max() => c,
                    _ => pre_cut,
                }
            }
        };
        let pre = pre_spec.to_fock(cutoff)?;
        let selector = post.to_post_selector(cutoff)?;
        let w = weak_values::weak_value_numeric(&pre, &selector)?;
        let analytic = weak_values::n_w_analytic(post, alpha)?;
        let (scheme, boundary) = match post {
            AncillaSpec::Coherent { .. } => ("coherent", None),
            AncillaSpec::SqueezedVacuum { .. } => ("squeezed", None),
            AncillaSpec::QuadratureEigenstate { phi, .. } => {
                ("quadrature", Some(weak_values::quadrature_success_boundary(alpha, *phi)))
            }
            AncillaSpec::CustomFock(_) => ("fock", None),
        };
        Ok(Self {
            alpha,
            scheme: scheme.into(),
            ancilla_n_max: cutoff.n_max(),
            numeric: w.value.into(),
            analytic: analytic.into(),
            overlap_mag: w.overlap_mag,
            success: w.value.im > 0.0,
            quadrature_boundary: boundary,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let b = self.quadrature_boundary.map_or_else(|| "NA".to_string(), |v| v.to_string());
        format!(
            "alpha,scheme,ancilla_n_max,nw_re,nw_im,analytic_re,analytic_im,overlap_mag,success,quadrature_boundary\n{},{},{},{},{},{},{},{},{},{}\n",
            self.alpha,
            self.scheme,
            self.ancilla_n_max,
            self.numeric.re,
            self.numeric.im,
            self.analytic.re,
            self.analytic.im,
            self.overlap_mag,
            self.success,
            b
        )
    }

    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "scheme          {} (alpha = {})", self.scheme, self.alpha);
        let _ = writeln!(out, "n_W numeric     {:+.12} {:+.12}i", self.numeric.re, self.numeric.im);
        let _ = writeln!(out, "n_W closed form {:+.12} {:+.12}i", self.analytic.re, self.analytic.im);
        let _ = writeln!(out, "|<post|pre>|    {:.6e}", self.overlap_mag);
        let _ = writeln!(out, "Im n_W > 0      {}", self.success);
        if let Some(b) = self.quadrature_boundary {
            let _ = writeln!(out, "flag flips at x = {b:.12}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::StateSpec;
    use proptest::prelude::*;
    use std::f64::consts::{PI, TAU};
    use weakconc::concentration;
    use weakconc::hilbert::QuadraturePhase;

    fn arb_post() -> impl Strategy<Value = StateSpec> {
        prop_oneof![
            (0.3f64..1.5, 0.0..TAU).prop_map(|(magnitude, phase)| StateSpec::Coherent { magnitude, phase }),
            (0.1f64..1.0, -PI..PI).prop_map(|(r, phi)| StateSpec::Squeezed { r, phi }),
            (-1.5f64..1.5, -PI..PI).prop_map(|(x, phi)| StateSpec::Quadrature {
                x,
                phi,
                convention: QuadraturePhase::Positive
            }),
        ]
    }

    fn scenario(lambda: f64, kappa_t: f64, post: StateSpec) -> ScenarioFile {
        let text = format!(
            "[protocol]\nlambda = {lambda:?}\nkappa_t = {kappa_t:?}\n[ancilla.pre]\nscheme = \"coherent\"\nmagnitude = 1.0\n[ancilla.post]\nscheme = \"coherent\"\nmagnitude = 1.0\n"
        );
        let mut s = ScenarioFile::from_toml_str(&text).unwrap();
        s.ancilla.post = post;
        s
    }

    fn record_for(s: &ScenarioFile) -> ResultRecord {
        let config = s.to_config().unwrap();
        let r = concentration::run(&config).unwrap();
        ResultRecord::new(s, &config, &r).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn json_round_trip_is_identity(lambda in 0.0f64..0.8, kappa in 0.0f64..0.2, post in arb_post()) {
            let rec = record_for(&scenario(lambda, kappa, post));
            let back = ResultRecord::from_json(&rec.to_json()).unwrap();
            prop_assert_eq!(&back, &rec);
            prop_assert_eq!(back.to_json(), rec.to_json());
        }

        #[test]
        fn csv_floats_round_trip(lambda in 0.0f64..0.8, kappa in 0.01f64..0.2, post in arb_post()) {
            let rec = record_for(&scenario(lambda, kappa, post));
            let csv = rec.to_csv();
            let mut reader = csv::Reader::from_reader(csv.as_bytes());
            let header = reader.headers().unwrap().clone();
            let row = reader.records().next().unwrap().unwrap();
            let idx = |name: &str| header.iter().position(|h| h == name).unwrap();
            prop_assert_eq!(row[idx("nw_re")].parse::<f64>().unwrap().to_bits(), rec.weak_value.re.to_bits());
            prop_assert_eq!(row[idx("entropy_gain")].parse::<f64>().unwrap().to_bits(), rec.entropy_gain.to_bits());
        }
    }

    #[test]
    fn non_finite_fields_are_rejected() {
        let mut rec = record_for(&scenario(0.5, 0.05, StateSpec::Coherent { magnitude: 1.0, phase: 4.0 }));
        rec.success_prob = f64::NAN;
        assert!(rec.check_finite().is_err());
        let text = rec.to_json();
        assert!(text.contains("\"success_prob\": null"));
        assert!(ResultRecord::from_json(&text).is_err());
    }

    #[test]
    fn absent_values_are_explicit() {
        let rec = record_for(&scenario(0.5, 0.0, StateSpec::Coherent { magnitude: 1.0, phase: 4.0 }));
        assert!(rec.to_json().contains("\"success\": null"));
        let csv = rec.to_csv();
        assert!(csv.lines().nth(1).unwrap().split(',').any(|f| f == "NA"));
    }

    #[test]
    fn weak_value_report_matches_closed_form() {
        let post = weakconc::hilbert::AncillaSpec::SqueezedVacuum { r: 0.6, phi: 0.7 };
        let rep = WeakValueReport::compute(0.8, None, &post).unwrap();
        assert!((C64::from(rep.numeric) - C64::from(rep.analytic)).norm() < 1e-8);
        assert!(rep.success);
        let back: WeakValueReport = serde_json::from_str(&rep.to_json()).unwrap();
        assert_eq!(back, rep);
    }
}
