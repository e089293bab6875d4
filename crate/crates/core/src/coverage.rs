//! Uplink SINR coverage probability.
//!
//! The interfering uplink users (one per foreign cell) are approximated
//! by an inhomogeneous PPP of density `lambda_b (1 - exp(-pi lambda_b
//! x^2))` around the tagged BS; each interferer's transmit power follows
//! its own link-distance law. The coverage probability integrates the
//! interference-plus-noise transform against the serving-distance
//! density, with the BS antenna gain divided out of the threshold.

use std::f64::consts::PI;

use crate::cheb::ChebInterp;
use crate::error::{NumericalError, NumericalResult};
use crate::params::{NetworkParams, QuadratureSpec, UserModel};
use crate::point_process::interferer_link_distance_pdf;
use crate::power_control::{mean_tx_power_cluster, mean_tx_power_ppp, tx_power};
use crate::quad::integrate_real;

/// Fading bracket of one interferer at distance `x` with power `p`:
/// `s p x^{-alpha} / (1 + s p x^{-alpha})`.
fn interference_bracket(s: f64, p: f64, x: f64, alpha: f64) -> f64 {
    let v = s * p * x.powf(-alpha);
    v / (1.0 + v)
}

/// Mean bracket over the interferer's link-distance (and hence power)
/// law, at interferer-to-tagged-BS distance `x`.
fn mean_bracket(
    s: f64,
    x: f64,
    params: &NetworkParams,
    model: UserModel,
    spec: &QuadratureSpec,
) -> f64 {
    let alpha = params.alpha;
    match model {
        UserModel::Mcp2 => {
            // the interferer is a cluster user of a foreign BS: link
            // distance uniform in the disc, independent of x
            integrate_real(
                |v| {
                    let r = params.r_c * v.sqrt();
                    interference_bracket(s, tx_power(r, params), x, alpha)
                },
                0.0,
                1.0,
                spec,
            )
            .expect("in-cluster bracket is smooth")
        }
        _ => {
            // truncated-Rayleigh link distance given the interferer lies
            // within x of its own serving BS
            integrate_real(
                |r| {
                    let f = interferer_link_distance_pdf(r, x, params.lambda_b)
                        .expect("x > 0 inside the radial integral");
                    f * interference_bracket(s, tx_power(r, params), x, alpha)
                },
                0.0,
                x,
                spec,
            )
            .expect("link-distance bracket is smooth")
        }
    }
}

/// Laplace transform of interference plus noise at the tagged BS,
/// `exp(-s sigma^2) exp(-2 pi lambda_b int (1 - e^{-pi lambda_b x^2})
/// E[bracket] x dx)`.
pub fn lt_interference_noise(
    s: f64,
    params: &NetworkParams,
    model: UserModel,
    spec: &QuadratureSpec,
) -> NumericalResult<f64> {
    if s < 0.0 {
        return Err(NumericalError::Domain(
            "interference transform requires s >= 0".into(),
        ));
    }
    if s == 0.0 {
        return Ok(1.0);
    }
    let sigma_sq = params.normalized_noise();
    let lb = params.lambda_b;
    let alpha = params.alpha;
    // Interferers inside x_lo contribute O((pi lambda_b x_lo^2)^2) to the
    // exponent; beyond x_hi the bracket is in its linear far-field regime
    // and the thinning factor is 1, so that tail is integrated in closed
    // form. In between the expectation is smooth in ln x and is evaluated
    // through a Chebyshev proxy so the outer quadrature stays cheap.
    let x_lo = 1.0_f64;
    let x_hi = (s * params.p_max * 1e4).powf(1.0 / alpha).max(1e4);
    // the exponent is bounded by pi lambda_b x_hi^2 plus the linear tail;
    // with essentially no interferers only the noise factor survives
    if PI * lb * x_hi * x_hi < 1e-10 {
        return Ok((-s * sigma_sq).exp());
    }
    let proxy = ChebInterp::build(
        |lx| mean_bracket(s, lx.exp(), params, model, spec).into(),
        x_lo.ln(),
        x_hi.ln(),
        48,
    );
    let body = integrate_real(
        |x| {
            let thin = 1.0 - (-PI * lb * x * x).exp();
            thin * proxy.eval(x.ln()).re * x
        },
        x_lo,
        x_hi,
        spec,
    )?;
    let pbar = match model {
        UserModel::Mcp2 => mean_tx_power_cluster(params, spec),
        _ => mean_tx_power_ppp(params, spec),
    };
    let tail = s * pbar * x_hi.powf(2.0 - alpha) / (alpha - 2.0);
    Ok((-s * sigma_sq - 2.0 * PI * lb * (body + tail)).exp())
}

/// Uplink coverage probability `P(SINR > gamma)` for the threshold and
/// model in `params`.
pub fn coverage_probability(
    params: &NetworkParams,
    model: UserModel,
    spec: &QuadratureSpec,
) -> NumericalResult<f64> {
    let arg = |r: f64| params.gamma * r.powf(params.alpha) / (params.g_b * tx_power(r, params));
    match model {
        UserModel::Mcp2 => integrate_real(
            |v| {
                let r = params.r_c * v.sqrt();
                lt_interference_noise(arg(r), params, model, spec)
                    .expect("interference transform converges")
            },
            0.0,
            1.0,
            spec,
        ),
        _ => integrate_real(
            |u| {
                let r = (-u.ln() / (PI * params.lambda_b)).sqrt();
                lt_interference_noise(arg(r), params, model, spec)
                    .expect("interference transform converges")
            },
            0.0,
            1.0,
            spec,
        ),
    }
}

/// Coverage across a grid of power-control compensation factors.
#[derive(Debug, Clone)]
pub struct EtaSweep {
    /// `(eta, coverage)` pairs in grid order.
    pub points: Vec<(f64, f64)>,
    /// Index of the maximizing grid point.
    pub argmax: usize,
}

pub fn eta_sweep_coverage(
    params: &NetworkParams,
    model: UserModel,
    eta_grid: &[f64],
    spec: &QuadratureSpec,
) -> NumericalResult<EtaSweep> {
    if eta_grid.is_empty() {
        return Err(NumericalError::Domain("empty eta grid".into()));
    }
    let mut points = Vec::with_capacity(eta_grid.len());
    for &eta in eta_grid {
        let mut p = params.clone();
        p.eta = eta;
        points.push((eta, coverage_probability(&p, model, spec)?));
    }
    let argmax = points
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(i, _)| i)
        .unwrap();
    Ok(EtaSweep { points, argmax })
}
