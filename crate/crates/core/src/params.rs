//! Shared domain types, parameter validation and unit normalization.
//!
//! All internal computation is in SI units (m, W, Hz, linear gain). Unit
//! conversions (dBi, dB, per_km2, mW) happen once at config ingestion.

use std::fmt;

use crate::error::{ConfigError, FieldError};

/// Speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Which spatial model generates the uplink users.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UserModel {
    /// Users form a homogeneous PPP of density `lambda_u`.
    Ppp,
    /// Matern cluster process; cluster centers independent of the BSs.
    Mcp1,
    /// Matern cluster process; clusters centered at the BSs.
    Mcp2,
}

impl UserModel {
    pub fn is_clustered(self) -> bool {
        matches!(self, UserModel::Mcp1 | UserModel::Mcp2)
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ppp" => Some(UserModel::Ppp),
            "mcp1" => Some(UserModel::Mcp1),
            "mcp2" => Some(UserModel::Mcp2),
            _ => None,
        }
    }
}

impl fmt::Display for UserModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UserModel::Ppp => write!(f, "ppp"),
            UserModel::Mcp1 => write!(f, "mcp1"),
            UserModel::Mcp2 => write!(f, "mcp2"),
        }
    }
}

/// The observer whose exposure is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObserverKind {
    /// Not transmitting; exposed to BSs and other users' uplinks only.
    Passive,
    /// An uplink transmitter; adds the self-exposure term.
    Active,
}

impl ObserverKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "passive" => Some(ObserverKind::Passive),
            "active" => Some(ObserverKind::Active),
            _ => None,
        }
    }
}

impl fmt::Display for ObserverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObserverKind::Passive => write!(f, "passive"),
            ObserverKind::Active => write!(f, "active"),
        }
    }
}

/// Per-observer exposure index split into its components, W/kg.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExposureBreakdown {
    /// Downlink exposure from all BSs.
    pub ei_bs: f64,
    /// Exposure from other users' uplink transmissions.
    pub ei_ul_u: f64,
    /// Self-exposure of the active observer (zero for passive).
    pub ei_ul_tr: f64,
}

impl ExposureBreakdown {
    pub fn zero() -> Self {
        ExposureBreakdown {
            ei_bs: 0.0,
            ei_ul_u: 0.0,
            ei_ul_tr: 0.0,
        }
    }

    /// Exact sum of the components.
    pub fn total(&self) -> f64 {
        self.ei_bs + self.ei_ul_u + self.ei_ul_tr
    }
}

/// Numerical-control knobs for the quadrature and inversion machinery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Upper limit for the Gil-Pelaez t-integral, in units of the
    /// reciprocal decay scale of the characteristic function.
    pub truncation_t_max: f64,
    /// Lower cutoff near t = 0, same scaling.
    pub t_min: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_subdivisions: 2000,
            truncation_t_max: 2e4,
            t_min: 1e-12,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<(), FieldError> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(FieldError::new("quad", "tolerances must be positive"));
        }
        if !(self.truncation_t_max > self.t_min && self.t_min > 0.0) {
            return Err(FieldError::new(
                "quad",
                "requires truncation_t_max > t_min > 0",
            ));
        }
        Ok(())
    }
}

/// The power-control cutoff distance `r0`; infinite when `eta = 0`
/// (power control degenerates to constant `rho_u`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CutoffRadius {
    Finite(f64),
    Infinite,
}

/// All physical and model parameters, in SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams {
    /// BS density, per m^2.
    pub lambda_b: f64,
    /// PPP user density, per m^2.
    pub lambda_u: f64,
    /// Cluster-center density, per m^2.
    pub lambda_c: f64,
    /// Per-cluster user density, per m^2.
    pub lambda_cu: f64,
    /// Cluster radius, m.
    pub r_c: f64,
    /// Active probability.
    pub p_a: f64,
    /// BS transmit power, W.
    pub rho_b: f64,
    /// Minimum UE transmit power, W.
    pub rho_u: f64,
    /// Maximum UE transmit power, W.
    pub p_max: f64,
    /// BS antenna gain, linear.
    pub g_b: f64,
    /// Communication path-loss exponent.
    pub alpha: f64,
    /// EMF exposure path-loss exponent.
    pub beta: f64,
    /// Path-loss compensation factor.
    pub eta: f64,
    /// Reference downlink SAR, (W/kg)/(W/m^2).
    pub sar_dl: f64,
    /// Reference uplink SAR, (W/kg)/W.
    pub sar_ul: f64,
    /// Raw noise power, W.
    pub sigma_prime_sq: f64,
    /// Uplink carrier frequency, Hz.
    pub f_u: f64,
    /// SINR threshold, linear.
    pub gamma: f64,
    /// Minimum source-observer distance, m.
    pub d_min: f64,
    /// Simulation window radius, m.
    pub window_radius: f64,
}

impl Default for NetworkParams {
    /// Table-of-Parameters defaults with a user-to-BS density ratio of 100.
    fn default() -> Self {
        let lambda_b = 1e-6;
        NetworkParams {
            lambda_b,
            lambda_u: 1e-4,
            lambda_c: 1e-6,
            lambda_cu: 1e-4,
            r_c: 100.0,
            p_a: 1.0,
            rho_b: 10.0,
            rho_u: 8e-6,
            p_max: 0.2,
            g_b: 10.0,
            alpha: 4.0,
            beta: 2.5,
            eta: 0.4,
            sar_dl: 0.0042,
            sar_ul: 0.0053,
            sigma_prime_sq: 1e-12,
            f_u: 2.6e9,
            gamma: 100.0,
            d_min: 1.0,
            window_radius: 30.0 / lambda_b.sqrt(),
        }
    }
}

impl NetworkParams {
    /// Checks every invariant; on success returns the params (with
    /// `lambda_c` coerced to `lambda_b` for MCP Scenario 2).
    pub fn validate(mut self, model: UserModel) -> Result<Self, ConfigError> {
        let mut errors = Vec::new();
        let mut positive = |name: &str, v: f64| {
            if !(v > 0.0) || !v.is_finite() {
                errors.push(FieldError::new(name, "must be positive and finite"));
            }
        };
        positive("lambda_b", self.lambda_b);
        positive("rho_b", self.rho_b);
        positive("rho_u", self.rho_u);
        positive("p_max", self.p_max);
        positive("g_b", self.g_b);
        positive("sar_dl", self.sar_dl);
        positive("sar_ul", self.sar_ul);
        positive("f_u", self.f_u);
        positive("gamma", self.gamma);
        positive("d_min", self.d_min);
        positive("window_radius", self.window_radius);
        positive("r_c", self.r_c);
        match model {
            UserModel::Ppp => positive("lambda_u", self.lambda_u),
            UserModel::Mcp1 | UserModel::Mcp2 => {
                positive("lambda_c", self.lambda_c);
                positive("lambda_cu", self.lambda_cu);
            }
        }
        if !(self.p_a >= 0.0 && self.p_a <= 1.0) {
            errors.push(FieldError::new("p_a", "must lie in [0, 1]"));
        }
        if !(self.rho_u <= self.p_max) {
            errors.push(FieldError::new("rho_u", "requires rho_u <= p_max"));
        }
        if !(self.beta > 2.0) {
            errors.push(FieldError::new(
                "beta",
                "beta must exceed 2 (exposure integrals diverge otherwise)",
            ));
        }
        if !(self.alpha > 2.0) {
            errors.push(FieldError::new("alpha", "must exceed 2"));
        }
        if !(self.eta >= 0.0) {
            errors.push(FieldError::new("eta", "must be nonnegative"));
        }
        if self.sigma_prime_sq < 0.0 {
            errors.push(FieldError::new("sigma_prime_sq", "must be nonnegative"));
        }
        if model == UserModel::Mcp2 {
            // clusters are centered at BSs, so the center density is the BS density
            self.lambda_c = self.lambda_b;
        }
        if errors.is_empty() {
            Ok(self)
        } else {
            Err(ConfigError::Invalid(errors))
        }
    }

    /// Normalized noise power `sigma^2 = sigma'^2 / l_u` with
    /// `l_u = ((c/f_u) / (4 pi d_0))^2` at the 1 m reference distance.
    pub fn normalized_noise(&self) -> f64 {
        let wavelength = SPEED_OF_LIGHT / self.f_u;
        let l_u = (wavelength / (4.0 * std::f64::consts::PI)).powi(2);
        self.sigma_prime_sq / l_u
    }

    /// Power-control cutoff distance `r0 = (p_max/rho_u)^(1/(alpha eta))`.
    pub fn cutoff_radius(&self) -> CutoffRadius {
        if self.eta == 0.0 {
            CutoffRadius::Infinite
        } else {
            CutoffRadius::Finite((self.p_max / self.rho_u).powf(1.0 / (self.alpha * self.eta)))
        }
    }

    /// Mean number of users per cluster before thinning.
    pub fn cluster_mean_users(&self) -> f64 {
        self.lambda_cu * std::f64::consts::PI * self.r_c * self.r_c
    }
}

/// Order and definition of the config keys.
const KEYS: &[&str] = &[
    "lambda_b",
    "lambda_u",
    "lambda_c",
    "lambda_cu",
    "r_c",
    "p_a",
    "rho_b",
    "rho_u",
    "p_max",
    "g_b",
    "alpha",
    "beta",
    "eta",
    "sar_dl",
    "sar_ul",
    "sigma_prime_sq",
    "f_u",
    "gamma",
    "d_min",
    "window_radius",
];

fn field_mut<'a>(p: &'a mut NetworkParams, key: &str) -> Option<&'a mut f64> {
    Some(match key {
        "lambda_b" => &mut p.lambda_b,
        "lambda_u" => &mut p.lambda_u,
        "lambda_c" => &mut p.lambda_c,
        "lambda_cu" => &mut p.lambda_cu,
        "r_c" => &mut p.r_c,
        "p_a" => &mut p.p_a,
        "rho_b" => &mut p.rho_b,
        "rho_u" => &mut p.rho_u,
        "p_max" => &mut p.p_max,
        "g_b" => &mut p.g_b,
        "alpha" => &mut p.alpha,
        "beta" => &mut p.beta,
        "eta" => &mut p.eta,
        "sar_dl" => &mut p.sar_dl,
        "sar_ul" => &mut p.sar_ul,
        "sigma_prime_sq" => &mut p.sigma_prime_sq,
        "f_u" => &mut p.f_u,
        "gamma" => &mut p.gamma,
        "d_min" => &mut p.d_min,
        "window_radius" => &mut p.window_radius,
        _ => return None,
    })
}

fn field_get(p: &NetworkParams, key: &str) -> f64 {
    let mut q = p.clone();
    *field_mut(&mut q, key).expect("known key")
}

/// Converts a raw `value [suffix]` pair to SI.
fn apply_suffix(key: &str, value: f64, suffix: Option<&str>) -> Result<f64, FieldError> {
    match suffix {
        None => Ok(value),
        Some("dBi") | Some("dB") => Ok(10f64.powf(value / 10.0)),
        Some("per_km2") => Ok(value * 1e-6),
        Some("mW") => Ok(value * 1e-3),
        Some(other) => Err(FieldError::new(
            key,
            format!("unknown unit suffix '{other}' (accepted: dBi, dB, per_km2, mW)"),
        )),
    }
}

/// Parses the flat key-value config text into raw (un-validated) params.
/// Lines are `key = value [suffix]`; `#` starts a comment. Unknown keys
/// are errors. Keys not present keep their defaults.
pub fn parse_config(text: &str) -> Result<NetworkParams, ConfigError> {
    let mut params = NetworkParams::default();
    let mut errors = Vec::new();
    for (lineno, raw_line) in text.lines().enumerate() {
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, rest)) = line.split_once('=') else {
            errors.push(FieldError::new(
                format!("line {}", lineno + 1),
                "expected 'key = value'",
            ));
            continue;
        };
        let key = key.trim();
        let mut parts = rest.trim().split_whitespace();
        let value_str = parts.next().unwrap_or("");
        let suffix = parts.next();
        if parts.next().is_some() {
            errors.push(FieldError::new(key, "trailing tokens after value"));
            continue;
        }
        let Ok(value) = value_str.parse::<f64>() else {
            errors.push(FieldError::new(key, format!("not a number: '{value_str}'")));
            continue;
        };
        let si = match apply_suffix(key, value, suffix) {
            Ok(v) => v,
            Err(e) => {
                errors.push(e);
                continue;
            }
        };
        match field_mut(&mut params, key) {
            Some(slot) => *slot = si,
            None => errors.push(FieldError::new(key, "unknown key")),
        }
    }
    if errors.is_empty() {
        Ok(params)
    } else {
        Err(ConfigError::Invalid(errors))
    }
}

/// Serializes validated params to config text in SI units. Re-ingesting
/// the output yields bit-identical values.
pub fn to_config_string(p: &NetworkParams) -> String {
    let mut out = String::new();
    for key in KEYS {
        let v = field_get(p, key);
        // {:?} prints the shortest representation that round-trips
        out.push_str(&format!("{key} = {v:?}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_params_validate() {
        for model in [UserModel::Ppp, UserModel::Mcp1, UserModel::Mcp2] {
            NetworkParams::default().validate(model).unwrap();
        }
    }

    #[test]
    fn dbi_and_unit_conversions() {
        let cfg = "g_b = 10 dBi\nlambda_b = 1 per_km2\nrho_u = 0.008 mW\ngamma = 20 dB\n";
        let p = parse_config(cfg).unwrap();
        assert!((p.g_b - 10.0).abs() < 1e-12);
        assert!((p.lambda_b - 1e-6).abs() < 1e-18);
        assert!((p.rho_u - 8e-6).abs() < 1e-18);
        assert!((p.gamma - 100.0).abs() < 1e-10);
    }

    #[test]
    fn beta_at_two_is_hard_error() {
        let mut p = NetworkParams::default();
        p.beta = 2.0;
        let err = p.validate(UserModel::Ppp).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("beta"), "got: {msg}");
        assert!(msg.contains("exceed 2"), "got: {msg}");
    }

    #[test]
    fn unknown_key_is_error() {
        assert!(parse_config("lambda_x = 3\n").is_err());
    }

    #[test]
    fn config_round_trip_is_bit_identical() {
        let p = NetworkParams::default().validate(UserModel::Ppp).unwrap();
        let text = to_config_string(&p);
        let q = parse_config(&text).unwrap().validate(UserModel::Ppp).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn normalized_noise_reference_values() {
        let p = NetworkParams::default();
        // l_u = ((c/f_u)/(4 pi))^2 with c = 299792458, f_u = 2.6 GHz
        let sigma_sq = p.normalized_noise();
        assert!(
            (sigma_sq - 1.19e-8).abs() / 1.19e-8 < 0.01,
            "sigma^2 = {sigma_sq}"
        );

        let mut z = p.clone();
        z.sigma_prime_sq = 0.0;
        assert_eq!(z.normalized_noise(), 0.0);

        // pick f_u so that l_u = 1 exactly: c/f_u = 4 pi
        let mut id = p.clone();
        id.f_u = SPEED_OF_LIGHT / (4.0 * std::f64::consts::PI);
        assert!((id.normalized_noise() - id.sigma_prime_sq).abs() < 1e-24);
    }

    #[test]
    fn cutoff_radius_cases() {
        let p = NetworkParams::default();
        match p.cutoff_radius() {
            CutoffRadius::Finite(r0) => {
                // 25000^(1/1.6)
                assert!((r0 - 25000f64.powf(1.0 / 1.6)).abs() < 1e-9);
                assert!((r0 - 560.6).abs() < 0.5, "r0 = {r0}");
            }
            CutoffRadius::Infinite => panic!("expected finite cutoff"),
        }

        let mut unit = p.clone();
        unit.p_max = unit.rho_u;
        assert_eq!(unit.cutoff_radius(), CutoffRadius::Finite(1.0));

        let mut flat = p.clone();
        flat.eta = 0.0;
        assert_eq!(flat.cutoff_radius(), CutoffRadius::Infinite);
    }

    #[test]
    fn exposure_breakdown_total_is_exact_sum() {
        let b = ExposureBreakdown {
            ei_bs: 0.1,
            ei_ul_u: 0.2,
            ei_ul_tr: 0.3,
        };
        assert_eq!(b.total(), 0.1 + 0.2 + 0.3);
    }

    #[test]
    fn mcp2_coerces_cluster_density() {
        let mut p = NetworkParams::default();
        p.lambda_c = 5e-6;
        let v = p.validate(UserModel::Mcp2).unwrap();
        assert_eq!(v.lambda_c, v.lambda_b);
    }
}
