//! Run configurations. Every field has a default, so `{}` is a valid block
//! for any command and the defaults regenerate the reference data sets.

use rabi_core::fit::{Observable, Side, DEFAULT_SAMPLES, DEFAULT_WINDOW};
use rabi_core::fluctuations::{np_tangent_line, FluctuationPhase};
use rabi_core::meanfield::{critical_couplings, epsilon_bounds, tricritical_points};
use rabi_core::numeric::{linspace, logspace};
use rabi_core::semiclassical::Dynamics;
use rabi_core::{Line, ParamFile};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

const KAPPA_BAR: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

/// `points` values from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default)]
    pub scale: Scale,
}

impl Axis {
    pub fn linear(min: f64, max: f64, points: usize) -> Self {
        Self {
            min,
            max,
            points,
            scale: Scale::Linear,
        }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        let bad = |m: String| Err(CliError::Config(format!("axis {name}: {m}")));
        if !self.min.is_finite() || !self.max.is_finite() {
            return bad("bounds must be finite".into());
        }
        if !(self.min < self.max) {
            return bad(format!("empty range [{}, {}]", self.min, self.max));
        }
        if self.points < 2 {
            return bad(format!("resolution {} is below 2", self.points));
        }
        if self.scale == Scale::Log && !(self.min > 0.0) {
            return bad("logarithmic axis needs a positive lower bound".into());
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        match self.scale {
            Scale::Linear => linspace(self.min, self.max, self.points),
            Scale::Log => logspace(self.min, self.max, self.points),
        }
    }
}

/// Grid over the `(g_r, g_cr)` plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub g_r: Axis,
    pub g_cr: Axis,
    pub kappa_bar: f64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.g_r.validate("g_r")?;
        self.g_cr.validate("g_cr")?;
        if self.g_r.min < 0.0 || self.g_cr.min < 0.0 {
            return Err(CliError::Config("couplings must be non-negative".into()));
        }
        check_kappa_bar(self.kappa_bar)
    }
}

fn check_kappa_bar(kappa_bar: f64) -> Result<()> {
    if !(kappa_bar >= 0.0) || !kappa_bar.is_finite() {
        return Err(CliError::Config(format!("kappa_bar must be finite and non-negative, got {kappa_bar}")));
    }
    Ok(())
}

/// A straight line through the coupling plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum LineSpec {
    /// `g_cr = slope * g_r + intercept`, parametrized by `g_r`.
    Affine { slope: f64, intercept: f64 },
    /// `g_cr = epsilon * g_r`.
    Ray { epsilon: f64 },
    /// Tangent to the normal-phase boundary at the given point.
    Tangent { g_r: f64, g_cr: f64 },
    /// `origin + t * direction`.
    Points { origin: (f64, f64), direction: (f64, f64) },
}

impl LineSpec {
    pub fn line(&self) -> Line {
        match *self {
            LineSpec::Affine { slope, intercept } => Line::affine(slope, intercept),
            LineSpec::Ray { epsilon } => Line::ray(epsilon),
            LineSpec::Tangent { g_r, g_cr } => np_tangent_line(g_r, g_cr),
            LineSpec::Points { origin, direction } => Line::new(origin, direction),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let l = self.line();
        let all = [l.origin.0, l.origin.1, l.direction.0, l.direction.1];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(CliError::Config(format!("line {self:?} is not finite")));
        }
        if l.direction.0 == 0.0 && l.direction.1 == 0.0 {
            return Err(CliError::Config("line direction vanishes".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhaseDiagramConfig {
    pub sweep: SweepSpec,
}

impl Default for PhaseDiagramConfig {
    fn default() -> Self {
        Self {
            sweep: SweepSpec {
                g_r: Axis::linear(0.0, 2.5, 200),
                g_cr: Axis::linear(0.0, 2.5, 200),
                kappa_bar: KAPPA_BAR,
            },
        }
    }
}

/// Quasi-static sweep of the adiabatic dynamics, forward and back.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HysteresisSpec {
    pub t_per_point: f64,
    pub kick: f64,
}

impl Default for HysteresisSpec {
    fn default() -> Self {
        Self {
            t_per_point: 200.0,
            kick: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LineScanConfig {
    pub line: LineSpec,
    pub kappa_bar: f64,
    /// Values of the line parameter.
    pub t: Axis,
    pub hysteresis: Option<HysteresisSpec>,
}

impl Default for LineScanConfig {
    fn default() -> Self {
        Self {
            line: LineSpec::Affine {
                slope: 0.05,
                intercept: 0.475,
            },
            kappa_bar: KAPPA_BAR,
            t: Axis::linear(0.0, 3.0, 601),
            hysteresis: None,
        }
    }
}

/// Where the critical parameter value on a line comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Critical {
    At(f64),
    /// The `index`-th boundary crossing on `[t_lo, t_hi]`.
    Landmark { t_lo: f64, t_hi: f64, index: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentRequest {
    pub name: String,
    pub line: LineSpec,
    pub critical: Critical,
    pub side: Side,
    pub phase: FluctuationPhase,
    #[serde(default = "both_observables")]
    pub observables: Vec<Observable>,
}

fn both_observables() -> Vec<Observable> {
    vec![Observable::Adr, Observable::Excitation]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExponentsConfig {
    pub kappa_bar: f64,
    /// Range of `|t - t_c|` sampled log-uniformly.
    pub window: (f64, f64),
    pub samples: usize,
    pub requests: Vec<ExponentRequest>,
}

impl Default for ExponentsConfig {
    fn default() -> Self {
        let cut = LineSpec::Affine {
            slope: 0.05,
            intercept: 0.475,
        };
        let crossing = |index| Critical::Landmark {
            t_lo: 0.0,
            t_hi: 3.0,
            index,
        };
        let req = |name: &str, line, critical, side, phase| ExponentRequest {
            name: name.into(),
            line,
            critical,
            side,
            phase,
            observables: both_observables(),
        };
        let (eps_min, _) = epsilon_bounds(KAPPA_BAR);
        let tri = tricritical_points(KAPPA_BAR)[0];
        let tangent_at = |epsilon: f64| {
            let (g, _) = critical_couplings(epsilon, KAPPA_BAR).expect("epsilon inside the window");
            (LineSpec::Tangent { g_r: g, g_cr: epsilon * g }, g)
        };
        let (tan_a, g_a) = tangent_at(0.5);
        let (tan_b, g_b) = tangent_at(2.0);
        use FluctuationPhase::{Np, Sp};
        Self {
            kappa_bar: KAPPA_BAR,
            window: DEFAULT_WINDOW,
            samples: DEFAULT_SAMPLES,
            requests: vec![
                req("g_c_minus_np", cut, crossing(0), Side::Below, Np),
                req("g_c_minus_sp", cut, crossing(0), Side::Above, Sp),
                req("g_c_plus_np", cut, crossing(1), Side::Above, Np),
                req("first_order_sp", cut, crossing(2), Side::Below, Sp),
                req("tricritical_tangent_below", LineSpec::Ray { epsilon: eps_min }, Critical::At(tri.0), Side::Below, Np),
                req("tricritical_tangent_above", LineSpec::Ray { epsilon: eps_min }, Critical::At(tri.0), Side::Above, Np),
                req("tangent_eps_0.5", tan_a, Critical::At(g_a), Side::Below, Np),
                req("tangent_eps_2", tan_b, Critical::At(g_b), Side::Below, Np),
            ],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryRun {
    pub g_r: f64,
    pub g_cr: f64,
    /// Initial cavity coherence `(Re, Im)`; the spin starts slaved on the lower sheet.
    pub alpha: (f64, f64),
}

/// `count` initial coherences drawn uniformly from the disk of `radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomRuns {
    pub g_r: f64,
    pub g_cr: f64,
    pub count: usize,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrajectoryConfig {
    pub kappa_bar: f64,
    pub dynamics: Dynamics,
    pub t_max: f64,
    pub samples: usize,
    pub runs: Vec<TrajectoryRun>,
    pub random: Option<RandomRuns>,
    pub seed: u64,
}

impl Default for TrajectoryConfig {
    fn default() -> Self {
        let run = |g_r, g_cr, alpha| TrajectoryRun { g_r, g_cr, alpha };
        Self {
            kappa_bar: KAPPA_BAR,
            dynamics: Dynamics::Adiabatic { sz_sign: -1.0 },
            t_max: 120.0,
            samples: 1001,
            runs: vec![
                run(0.3, 2.0, (0.3, 0.3)),
                run(1.0, 1.5, (0.05, -0.05)),
                run(1.0, 2.1, (0.05, -0.05)),
                run(1.0, 2.1, (0.1, -0.05)),
            ],
            random: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BasinConfig {
    pub g_r: f64,
    pub g_cr: f64,
    pub kappa_bar: f64,
    pub dynamics: Dynamics,
    pub t_max: f64,
    pub re_alpha: Axis,
    pub im_alpha: Axis,
}

impl Default for BasinConfig {
    fn default() -> Self {
        Self {
            g_r: 1.0,
            g_cr: 2.1,
            kappa_bar: KAPPA_BAR,
            dynamics: Dynamics::Adiabatic { sz_sign: -1.0 },
            t_max: 120.0,
            re_alpha: Axis::linear(-0.5, 0.5, 41),
            im_alpha: Axis::linear(-0.5, 0.5, 41),
        }
    }
}

/// Which oscillator state the Wigner function is taken of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Projection {
    /// `<down| rho |down>`, renormalized.
    #[default]
    SpinDown,
    /// Partial trace over the spin.
    Reduced,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuantumConfig {
    pub params: ParamFile,
    pub dim_fock: usize,
    pub check_truncation: bool,
    pub projection: Projection,
    pub grid_points: usize,
    /// Half-width of the square phase-space window; chosen from the photon
    /// distribution when absent.
    pub extent: Option<f64>,
    /// Also locate the cavity relaxation mode near its linearized eigenvalue.
    pub cavity_mode: bool,
}

impl Default for QuantumConfig {
    fn default() -> Self {
        Self {
            params: ParamFile::Renormalized {
                g_r: 0.43,
                g_cr: 0.7,
                kappa_bar: KAPPA_BAR,
                eta: 50.0,
                gamma_spin: 0.0,
            },
            dim_fock: 120,
            check_truncation: true,
            projection: Projection::SpinDown,
            grid_points: 121,
            extent: None,
            cavity_mode: false,
        }
    }
}

/// A complete run: the command and its parameter block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum RunConfig {
    PhaseDiagram(PhaseDiagramConfig),
    LineScan(LineScanConfig),
    Exponents(ExponentsConfig),
    Trajectory(TrajectoryConfig),
    Basin(BasinConfig),
    Quantum(QuantumConfig),
}

impl RunConfig {
    pub fn name(&self) -> &'static str {
        match self {
            RunConfig::PhaseDiagram(_) => "phase-diagram",
            RunConfig::LineScan(_) => "line-scan",
            RunConfig::Exponents(_) => "exponents",
            RunConfig::Trajectory(_) => "trajectory",
            RunConfig::Basin(_) => "basin",
            RunConfig::Quantum(_) => "quantum",
        }
    }

    /// Default block for the named command.
    pub fn default_for(command: &str) -> Result<Self> {
        Ok(match command {
            "phase-diagram" => RunConfig::PhaseDiagram(Default::default()),
            "line-scan" => RunConfig::LineScan(Default::default()),
            "exponents" => RunConfig::Exponents(Default::default()),
            "trajectory" => RunConfig::Trajectory(Default::default()),
            "basin" => RunConfig::Basin(Default::default()),
            "quantum" => RunConfig::Quantum(Default::default()),
            other => return Err(CliError::Config(format!("unknown command {other}"))),
        })
    }

    /// Parses either a full config (with a `command` tag, which must match)
    /// or a bare parameter block for `command`.
    pub fn from_json(command: &str, text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let tagged = value.get("command").is_some();
        let cfg = if tagged {
            serde_json::from_value::<RunConfig>(value)?
        } else {
            let mut obj = serde_json::Map::new();
            obj.insert("command".into(), command.into());
            match value {
                serde_json::Value::Object(m) => obj.extend(m),
                _ => return Err(CliError::Config("config must be a JSON object".into())),
            }
            serde_json::from_value::<RunConfig>(obj.into())?
        };
        if cfg.name() != command {
            return Err(CliError::Config(format!(
                "config is for {}, not {command}",
                cfg.name()
            )));
        }
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("configs always serialize")
    }

    /// SHA-256 of the compact JSON form.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }

    pub fn apply_seed(&mut self, seed: u64) -> bool {
        match self {
            RunConfig::Trajectory(c) => {
                c.seed = seed;
                true
            }
            _ => false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            RunConfig::PhaseDiagram(c) => c.sweep.validate(),
            RunConfig::LineScan(c) => {
                c.line.validate()?;
                c.t.validate("t")?;
                check_kappa_bar(c.kappa_bar)?;
                if let Some(h) = &c.hysteresis {
                    if !(h.t_per_point > 0.0) || !(h.kick > 0.0) {
                        return Err(CliError::Config("hysteresis needs positive t_per_point and kick".into()));
                    }
                }
                Ok(())
            }
            RunConfig::Exponents(c) => {
                check_kappa_bar(c.kappa_bar)?;
                let (lo, hi) = c.window;
                if !(lo > 0.0 && lo < hi && hi.is_finite()) {
                    return Err(CliError::Config(format!("invalid window ({lo}, {hi})")));
                }
                if c.samples < 2 {
                    return Err(CliError::Config("samples must be at least 2".into()));
                }
                for r in &c.requests {
                    r.line.validate()?;
                    if r.observables.is_empty() {
                        return Err(CliError::Config(format!("request {} has no observables", r.name)));
                    }
                    if let Critical::Landmark { t_lo, t_hi, .. } = r.critical {
                        if !(t_lo < t_hi) {
                            return Err(CliError::Config(format!("request {}: empty landmark range", r.name)));
                        }
                    }
                }
                Ok(())
            }
            RunConfig::Trajectory(c) => {
                check_kappa_bar(c.kappa_bar)?;
                check_dynamics(&c.dynamics, c.t_max)?;
                if c.samples < 2 {
                    return Err(CliError::Config("samples must be at least 2".into()));
                }
                if c.runs.is_empty() && c.random.map_or(true, |r| r.count == 0) {
                    return Err(CliError::Config("no trajectories requested".into()));
                }
                if let Some(r) = c.random {
                    if !(r.radius > 0.0) {
                        return Err(CliError::Config("random radius must be positive".into()));
                    }
                }
                Ok(())
            }
            RunConfig::Basin(c) => {
                check_kappa_bar(c.kappa_bar)?;
                check_dynamics(&c.dynamics, c.t_max)?;
                c.re_alpha.validate("re_alpha")?;
                c.im_alpha.validate("im_alpha")
            }
            RunConfig::Quantum(c) => {
                let p = c.params.into_model();
                let v = p.validate();
                if !v.is_empty() {
                    let msgs = v.iter().map(ToString::to_string).collect::<Vec<_>>();
                    return Err(CliError::Config(format!("invalid model parameters: {}", msgs.join(", "))));
                }
                if c.dim_fock < 2 {
                    return Err(CliError::Config("dim_fock must be at least 2".into()));
                }
                if c.grid_points < 2 {
                    return Err(CliError::Config("grid_points must be at least 2".into()));
                }
                if let Some(e) = c.extent {
                    if !(e > 0.0) || !e.is_finite() {
                        return Err(CliError::Config(format!("extent must be positive, got {e}")));
                    }
                }
                Ok(())
            }
        }
    }
}

fn check_dynamics(d: &Dynamics, t_max: f64) -> Result<()> {
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(CliError::Config(format!("t_max must be positive, got {t_max}")));
    }
    match *d {
        Dynamics::Full { eta } if !(eta > 0.0) || !eta.is_finite() => {
            Err(CliError::Config(format!("eta must be positive, got {eta}")))
        }
        Dynamics::Adiabatic { sz_sign } if sz_sign != 1.0 && sz_sign != -1.0 => {
            Err(CliError::Config(format!("sz_sign must be -1 or 1, got {sz_sign}")))
        }
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const COMMANDS: [&str; 6] = ["phase-diagram", "line-scan", "exponents", "trajectory", "basin", "quantum"];

    #[test]
    fn defaults_round_trip_and_validate() {
        for c in COMMANDS {
            let cfg = RunConfig::default_for(c).unwrap();
            cfg.validate().unwrap();
            let back = RunConfig::from_json(c, &cfg.to_json()).unwrap();
            assert_eq!(back, cfg);
            assert_eq!(back.hash(), cfg.hash());
        }
    }

    #[test]
    fn bare_block_fills_defaults() {
        let cfg = RunConfig::from_json("basin", r#"{"g_r": 0.8}"#).unwrap();
        match cfg {
            RunConfig::Basin(b) => {
                assert_eq!(b.g_r, 0.8);
                assert_eq!(b.g_cr, 2.1);
            }
            _ => panic!("wrong command"),
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(RunConfig::from_json("basin", r#"{"command": "quantum"}"#).is_err());
        assert!(RunConfig::from_json("basin", r#"{"g_rr": 0.8}"#).is_err());
        assert!(RunConfig::from_json("basin", "[1]").is_err());
        let one_point = r#"{"sweep": {"g_r": {"min": 0, "max": 1, "points": 1},
            "g_cr": {"min": 0, "max": 1, "points": 5}, "kappa_bar": 0.5}}"#;
        let cfg = RunConfig::from_json("phase-diagram", one_point).unwrap();
        assert!(cfg.validate().is_err());
        let empty = one_point.replace("\"points\": 1", "\"points\": 3").replace("\"max\": 1, \"points\": 3", "\"max\": 0, \"points\": 3");
        assert!(RunConfig::from_json("phase-diagram", &empty).unwrap().validate().is_err());
    }

    proptest! {
        #[test]
        fn arbitrary_floats_round_trip(
            a in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO,
            b in proptest::num::f64::ANY.prop_filter("finite", |x| x.is_finite()),
            n in 2usize..10_000,
            seed in any::<u64>(),
        ) {
            let mut t = TrajectoryConfig::default();
            t.runs.push(TrajectoryRun { g_r: a, g_cr: b, alpha: (b, a) });
            t.kappa_bar = a.abs();
            t.samples = n;
            t.seed = seed;
            t.random = Some(RandomRuns { g_r: b, g_cr: a, count: n, radius: a });
            let cfg = RunConfig::Trajectory(t);
            prop_assert_eq!(RunConfig::from_json("trajectory", &cfg.to_json()).unwrap(), cfg);
            let q = QuantumConfig {
                extent: Some(b),
                params: ParamFile::Renormalized { g_r: a, g_cr: b, kappa_bar: b, eta: a, gamma_spin: b },
                ..QuantumConfig::default()
            };
            let cfg = RunConfig::Quantum(q);
            prop_assert_eq!(RunConfig::from_json("quantum", &cfg.to_json()).unwrap(), cfg);
        }
    }

    #[test]
    fn hash_tracks_content() {
        let a = RunConfig::default_for("trajectory").unwrap();
        let mut b = a.clone();
        assert!(b.apply_seed(7));
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
