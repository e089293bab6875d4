//! Mean exposure index and its component breakdown, from first-moment
//! (Campbell) formulas. Everything here is linear in the source powers,
//! so no transform inversion is involved.

use std::f64::consts::PI;

use crate::error::NumericalResult;
use crate::laplace::IntraClusterVariant;
use crate::params::{ExposureBreakdown, NetworkParams, ObserverKind, QuadratureSpec, UserModel};
use crate::point_process::conditional_cluster_distance_pdf;
use crate::power_control::{mean_tx_power_cluster, mean_tx_power_ppp};
use crate::quad::integrate_real;

/// `int_lower^inf z^{1-beta} dz = lower^{2-beta} / (beta - 2)`.
fn radial_moment(lower: f64, beta: f64) -> f64 {
    lower.powf(2.0 - beta) / (beta - 2.0)
}

/// Mean over the Rayleigh serving distance of a PPP of density `lambda`,
/// through the uniform substitution `u = exp(-pi lambda r^2)`.
fn expect_rayleigh<F>(lambda: f64, f: F, spec: &QuadratureSpec) -> NumericalResult<f64>
where
    F: Fn(f64) -> f64,
{
    integrate_real(|u| f((-u.ln() / (PI * lambda)).sqrt()), 0.0, 1.0, spec)
}

/// Mean over the in-cluster distance density `2r/r_c^2` on (0, r_c].
fn expect_in_cluster<F>(r_c: f64, f: F, spec: &QuadratureSpec) -> NumericalResult<f64>
where
    F: Fn(f64) -> f64,
{
    integrate_real(|v| f(r_c * v.sqrt()), 0.0, 1.0, spec)
}

/// `E[max(R, d_min)^{-beta} 1{R >= d_min}]`-style terms for the serving
/// BS plus the field of all BSs beyond the serving distance.
fn mean_wb_active<E>(params: &NetworkParams, expect: E) -> f64
where
    E: Fn(&dyn Fn(f64) -> f64) -> f64,
{
    let a_b = params.rho_b * params.g_b / (4.0 * PI);
    let d = params.d_min;
    let beta = params.beta;
    let serving = expect(&|r: f64| if r >= d { a_b * r.powf(-beta) } else { 0.0 });
    let field =
        expect(&|r: f64| 2.0 * PI * params.lambda_b * a_b * radial_moment(r.max(d), beta));
    serving + field
}

/// Mean path loss `E[R2^{-beta} 1{R2 >= d_min}]` from the observer to one
/// user of its own cluster (center at distance `R1 ~ 2 r/r_c^2`, user
/// uniform in the disc around the center).
fn rep_cluster_pathloss(params: &NetworkParams, spec: &QuadratureSpec) -> NumericalResult<f64> {
    let rc = params.r_c;
    let d = params.d_min;
    let beta = params.beta;
    integrate_real(
        |v| {
            let r1 = rc * v.sqrt();
            let hi = r1 + rc;
            if hi <= d {
                return 0.0;
            }
            let kink = (rc - r1).abs();
            let mut cuts = vec![d];
            if kink > d && kink < hi {
                cuts.push(kink);
            }
            cuts.push(hi);
            let mut acc = 0.0;
            for pair in cuts.windows(2) {
                acc += integrate_real(
                    |r2| conditional_cluster_distance_pdf(r2, r1, rc) * r2.powf(-beta),
                    pair[0],
                    pair[1],
                    spec,
                )
                .expect("cluster path-loss integrand is piecewise smooth");
            }
            acc
        },
        0.0,
        1.0,
        spec,
    )
}

/// Mean number of other transmitters in the observer's own cluster.
fn rep_cluster_count(params: &NetworkParams, variant: IntraClusterVariant) -> f64 {
    let m = params.p_a * params.cluster_mean_users();
    match variant {
        IntraClusterVariant::Palm => m,
        IntraClusterVariant::Conditioned => {
            if m < 1e-12 {
                0.0
            } else {
                m / (1.0 - (-m).exp()) - 1.0
            }
        }
    }
}

/// Mean exposure index of the given observer under the given user model,
/// split into its components.
pub fn mean_ei(
    params: &NetworkParams,
    model: UserModel,
    observer: ObserverKind,
    variant: IntraClusterVariant,
    spec: &QuadratureSpec,
) -> NumericalResult<ExposureBreakdown> {
    let a_b = params.rho_b * params.g_b / (4.0 * PI);
    let d = params.d_min;
    let beta = params.beta;
    let rc = params.r_c;
    let sar = params.sar_dl;

    // downlink component
    let wb = match observer {
        ObserverKind::Passive => {
            let base = 2.0 * PI * params.lambda_b * a_b * radial_moment(d, beta);
            let center = if model == UserModel::Mcp2 {
                // cluster-center BS at distance 2r/r_c^2
                expect_in_cluster(
                    rc,
                    |r| if r >= d { a_b * r.powf(-beta) } else { 0.0 },
                    spec,
                )?
            } else {
                0.0
            };
            base + center
        }
        ObserverKind::Active => match model {
            UserModel::Mcp2 => {
                // the serving cluster-center BS is not the nearest one, so
                // the rest of the field is unrestricted
                let serving = expect_in_cluster(
                    rc,
                    |r| if r >= d { a_b * r.powf(-beta) } else { 0.0 },
                    spec,
                )?;
                serving + 2.0 * PI * params.lambda_b * a_b * radial_moment(d, beta)
            }
            _ => mean_wb_active(params, |f| {
                expect_rayleigh(params.lambda_b, f, spec).expect("serving mean is smooth")
            }),
        },
    };

    // other users' uplink component
    let wu = match model {
        UserModel::Ppp => {
            let pbar = mean_tx_power_ppp(params, spec);
            2.0 * PI * params.lambda_u * params.p_a * (pbar / (4.0 * PI)) * radial_moment(d, beta)
        }
        _ => {
            let m = params.p_a * params.cluster_mean_users();
            let pbar = match model {
                UserModel::Mcp2 => mean_tx_power_cluster(params, spec),
                _ => mean_tx_power_ppp(params, spec),
            };
            let stationary =
                2.0 * PI * params.lambda_c * m * (pbar / (4.0 * PI)) * radial_moment(d, beta);
            let rep = rep_cluster_count(params, variant)
                * (pbar / (4.0 * PI))
                * rep_cluster_pathloss(params, spec)?;
            stationary + rep
        }
    };

    // self-exposure of the active observer
    let ul_tr = match observer {
        ObserverKind::Passive => 0.0,
        ObserverKind::Active => {
            let pbar = match model {
                UserModel::Mcp2 => mean_tx_power_cluster(params, spec),
                _ => mean_tx_power_ppp(params, spec),
            };
            params.sar_ul * pbar
        }
    };

    Ok(ExposureBreakdown {
        ei_bs: sar * wb,
        ei_ul_u: sar * wu,
        ei_ul_tr: ul_tr,
    })
}

/// Component shares of the total, in the order (BS, other uplinks, own
/// uplink). Zero total yields zero shares.
pub fn component_percentages(b: &ExposureBreakdown) -> [f64; 3] {
    let total = b.total();
    if total <= 0.0 {
        return [0.0; 3];
    }
    [b.ei_bs / total, b.ei_ul_u / total, b.ei_ul_tr / total]
}
