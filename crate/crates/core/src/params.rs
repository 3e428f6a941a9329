//! Model parameters in absolute units and their dimensionless counterparts.
//!
//! Every downstream computation works with [`RenormalizedParams`]; the
//! absolute [`ModelParams`] only matter where the frequency ratio
//! `eta = Omega / omega0` enters explicitly (finite-`eta` quantum and
//! semiclassical dynamics).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical parameters of the anisotropic open Rabi model (`hbar = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Oscillator frequency.
    pub omega0: f64,
    /// Qubit transition frequency.
    #[serde(rename = "Omega")]
    pub omega: f64,
    /// Rotating (Jaynes-Cummings) coupling.
    pub lambda_r: f64,
    /// Counterrotating coupling.
    pub lambda_cr: f64,
    /// Oscillator damping rate.
    pub kappa: f64,
    /// Optional spin damping rate.
    #[serde(default)]
    pub gamma_spin: f64,
}

/// Dimensionless couplings and damping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RenormalizedParams {
    pub g_r: f64,
    pub g_cr: f64,
    pub kappa_bar: f64,
    /// Coupling scale, equal to `g_r`.
    pub g: f64,
    /// Anisotropy `g_cr / g_r`; `+inf` for the anti-JC limit and NaN when
    /// both couplings vanish.
    pub epsilon: f64,
}

/// A violated parameter invariant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    Omega0NotPositive,
    OmegaNotPositive,
    LambdaRNegative,
    LambdaCrNegative,
    KappaNegative,
    GammaSpinNegative,
    NotFinite,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Violation::Omega0NotPositive => "omega0 > 0",
            Violation::OmegaNotPositive => "Omega > 0",
            Violation::LambdaRNegative => "lambda_r ≥ 0",
            Violation::LambdaCrNegative => "lambda_cr ≥ 0",
            Violation::KappaNegative => "kappa ≥ 0",
            Violation::GammaSpinNegative => "gamma_spin ≥ 0",
            Violation::NotFinite => "all parameters finite",
        };
        f.write_str(s)
    }
}

impl ModelParams {
    pub fn new(omega0: f64, omega: f64, lambda_r: f64, lambda_cr: f64, kappa: f64) -> Self {
        Self {
            omega0,
            omega,
            lambda_r,
            lambda_cr,
            kappa,
            gamma_spin: 0.0,
        }
    }

    pub fn with_gamma_spin(mut self, gamma_spin: f64) -> Self {
        self.gamma_spin = gamma_spin;
        self
    }

    /// Absolute parameters with `omega0 = 1` and `Omega = eta` reproducing
    /// the given dimensionless couplings and damping.
    pub fn from_renormalized(g_r: f64, g_cr: f64, kappa_bar: f64, eta: f64) -> Self {
        let scale = eta.sqrt();
        Self::new(1.0, eta, g_r * scale, g_cr * scale, kappa_bar)
    }

    /// Frequency ratio `Omega / omega0`.
    pub fn eta(&self) -> f64 {
        self.omega / self.omega0
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate(self)
    }

    pub fn renormalize(&self) -> Result<RenormalizedParams> {
        renormalize(self)
    }
}

/// Lists every violated invariant; an empty list means the parameters are valid.
pub fn validate(p: &ModelParams) -> Vec<Violation> {
    let mut out = Vec::new();
    let all = [p.omega0, p.omega, p.lambda_r, p.lambda_cr, p.kappa, p.gamma_spin];
    if all.iter().any(|v| !v.is_finite()) {
        out.push(Violation::NotFinite);
    }
    if !(p.omega0 > 0.0) {
        out.push(Violation::Omega0NotPositive);
    }
    if !(p.omega > 0.0) {
        out.push(Violation::OmegaNotPositive);
    }
    if p.lambda_r < 0.0 {
        out.push(Violation::LambdaRNegative);
    }
    if p.lambda_cr < 0.0 {
        out.push(Violation::LambdaCrNegative);
    }
    if p.kappa < 0.0 {
        out.push(Violation::KappaNegative);
    }
    if p.gamma_spin < 0.0 {
        out.push(Violation::GammaSpinNegative);
    }
    out
}

pub fn renormalize(p: &ModelParams) -> Result<RenormalizedParams> {
    if !(p.omega0 > 0.0) || !(p.omega > 0.0) {
        let v = validate(p).iter().map(ToString::to_string).collect();
        return Err(Error::InvalidParams(v));
    }
    let scale = (p.omega0 * p.omega).sqrt();
    Ok(RenormalizedParams::new(
        p.lambda_r / scale,
        p.lambda_cr / scale,
        p.kappa / p.omega0,
    ))
}

impl RenormalizedParams {
    pub fn new(g_r: f64, g_cr: f64, kappa_bar: f64) -> Self {
        Self {
            g_r,
            g_cr,
            kappa_bar,
            g: g_r,
            epsilon: anisotropy(g_r, g_cr),
        }
    }

    /// Builds the point `(g_r, g_cr) = (g, epsilon * g)`.
    pub fn from_polar(g: f64, epsilon: f64, kappa_bar: f64) -> Self {
        Self {
            g_r: g,
            g_cr: epsilon * g,
            kappa_bar,
            g,
            epsilon,
        }
    }

    /// True when only the counterrotating coupling is present.
    pub fn is_anti_jc(&self) -> bool {
        self.epsilon.is_infinite()
    }

    /// Absolute parameters with `omega0 = 1`, `Omega = eta`.
    pub fn denormalize(&self, eta: f64) -> ModelParams {
        ModelParams::from_renormalized(self.g_r, self.g_cr, self.kappa_bar, eta)
    }
}

fn anisotropy(g_r: f64, g_cr: f64) -> f64 {
    if g_r == 0.0 {
        if g_cr == 0.0 {
            f64::NAN
        } else {
            f64::INFINITY
        }
    } else {
        g_cr / g_r
    }
}

/// On-disk parameter file: either absolute parameters or the dimensionless
/// triple plus the frequency ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamFile {
    Absolute(ModelParams),
    Renormalized {
        g_r: f64,
        g_cr: f64,
        kappa_bar: f64,
        eta: f64,
        /// Spin damping in units of `omega0`.
        #[serde(default)]
        gamma_spin: f64,
    },
}

impl ParamFile {
    pub fn into_model(self) -> ModelParams {
        match self {
            ParamFile::Absolute(p) => p,
            ParamFile::Renormalized {
                g_r,
                g_cr,
                kappa_bar,
                eta,
                gamma_spin,
            } => ModelParams::from_renormalized(g_r, g_cr, kappa_bar, eta).with_gamma_spin(gamma_spin),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn renormalize_symmetric_point() {
        let r = ModelParams::new(1.0, 100.0, 5.0, 5.0, 0.5).renormalize().unwrap();
        assert_relative_eq!(r.g_r, 0.5, epsilon = 1e-15);
        assert_relative_eq!(r.g_cr, 0.5, epsilon = 1e-15);
        assert_relative_eq!(r.kappa_bar, 0.5);
        assert_relative_eq!(r.epsilon, 1.0);
    }

    #[test]
    fn renormalize_zero_couplings() {
        let r = ModelParams::new(1.0, 1.0, 0.0, 0.0, 0.0).renormalize().unwrap();
        assert_eq!((r.g_r, r.g_cr, r.kappa_bar), (0.0, 0.0, 0.0));
        assert!(r.epsilon.is_nan());
    }

    #[test]
    fn renormalize_hand_evaluated() {
        // sqrt(2 * 800) = 40
        let r = ModelParams::new(2.0, 800.0, 20.0, 8.0, 1.0).renormalize().unwrap();
        assert_relative_eq!(r.g_r, 0.5, epsilon = 1e-15);
        assert_relative_eq!(r.g_cr, 0.2, epsilon = 1e-15);
        assert_relative_eq!(r.kappa_bar, 0.5);
        assert_relative_eq!(r.epsilon, 0.4, epsilon = 1e-15);
    }

    #[test]
    fn anti_jc_sentinel() {
        let r = RenormalizedParams::new(0.0, 0.7, 0.5);
        assert!(r.is_anti_jc());
        assert_eq!(r.epsilon, f64::INFINITY);
    }

    #[test]
    fn renormalize_rejects_bad_frequencies() {
        let err = ModelParams::new(0.0, 1.0, 0.1, 0.1, 0.1).renormalize().unwrap_err();
        assert!(matches!(err, Error::InvalidParams(_)));
        assert!(ModelParams::new(1.0, -2.0, 0.1, 0.1, 0.1).renormalize().is_err());
    }

    #[test]
    fn validate_reports_each_violation() {
        assert!(ModelParams::new(1.0, 50.0, 1.0, 2.0, 0.5).validate().is_empty());

        let v = ModelParams::new(-1.0, 50.0, 1.0, 2.0, 0.5).validate();
        assert_eq!(v, vec![Violation::Omega0NotPositive]);
        assert_eq!(v[0].to_string(), "omega0 > 0");

        let v = ModelParams::new(1.0, 50.0, 1.0, 2.0, -0.1).validate();
        assert_eq!(v, vec![Violation::KappaNegative]);
        assert_eq!(v[0].to_string(), "kappa ≥ 0");

        let v = ModelParams::new(-1.0, 0.0, -1.0, 2.0, -0.1).validate();
        assert_eq!(v.len(), 4);
    }

    #[test]
    fn param_file_both_forms() {
        let abs: ParamFile = serde_json::from_str(
            r#"{"omega0": 1, "Omega": 100, "lambda_r": 5, "lambda_cr": 5, "kappa": 0.5}"#,
        )
        .unwrap();
        let p = abs.into_model();
        assert_eq!(p.omega, 100.0);
        assert_eq!(p.gamma_spin, 0.0);

        let ren: ParamFile =
            serde_json::from_str(r#"{"g_r": 0.5, "g_cr": 0.8, "kappa_bar": 0.5, "eta": 50}"#).unwrap();
        let r = ren.into_model().renormalize().unwrap();
        assert_relative_eq!(r.g_r, 0.5, epsilon = 1e-14);
        assert_relative_eq!(r.g_cr, 0.8, epsilon = 1e-14);

        let json = serde_json::to_string(&p).unwrap();
        assert!(json.contains("\"Omega\""));
        assert!(json.contains("\"lambda_cr\""));
    }

    proptest! {
        #[test]
        fn renormalize_is_scale_invariant(
            omega0 in 0.1f64..10.0,
            omega in 0.1f64..1e4,
            lr in 0.0f64..50.0,
            lcr in 0.0f64..50.0,
            kappa in 0.0f64..5.0,
            c in 1e-3f64..1e3,
        ) {
            let a = ModelParams::new(omega0, omega, lr, lcr, kappa).renormalize().unwrap();
            let b = ModelParams::new(c * omega0, c * omega, c * lr, c * lcr, c * kappa)
                .renormalize()
                .unwrap();
            prop_assert!((a.g_r - b.g_r).abs() <= 1e-12 * a.g_r.abs().max(1.0));
            prop_assert!((a.g_cr - b.g_cr).abs() <= 1e-12 * a.g_cr.abs().max(1.0));
            prop_assert!((a.kappa_bar - b.kappa_bar).abs() <= 1e-12 * a.kappa_bar.max(1.0));
        }

        #[test]
        fn denormalize_roundtrip(g_r in 0.0f64..3.0, g_cr in 0.0f64..3.0, kb in 0.0f64..2.0, eta in 1.0f64..1e4) {
            let r = RenormalizedParams::new(g_r, g_cr, kb);
            let back = r.denormalize(eta).renormalize().unwrap();
            prop_assert!((back.g_r - g_r).abs() < 1e-12);
            prop_assert!((back.g_cr - g_cr).abs() < 1e-12);
            prop_assert!((back.kappa_bar - kb).abs() < 1e-15);
        }
    }
}
