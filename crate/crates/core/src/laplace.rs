//! Laplace transforms of the exposure-index components.
//!
//! Every field is a shot-noise sum `sum_i a_i H_i D_i^{-beta} / (4 pi)`
//! over a point process with unit-mean exponential fading `H_i`, so each
//! transform reduces to a probability generating functional in the
//! canonical form `exp(-2 pi lambda int (1 - 1/(1 + c z^{-beta})) z dz)`
//! with `c = s a / (4 pi)`. Sources closer than `d_min` contribute
//! nothing (they are dropped, not clamped), which truncates every radial
//! integral at `d_min`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::cheb::ChebInterp;
use crate::error::{NumericalError, NumericalResult};
use crate::params::{NetworkParams, ObserverKind, QuadratureSpec, UserModel};
use crate::point_process::conditional_cluster_distance_pdf;
use crate::power_control::{mean_tx_power_cluster, mean_tx_power_ppp, tx_power};
use crate::quad::integrate;

/// How the active observer's own cluster is counted in the clustered
/// uplink transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntraClusterVariant {
    /// The observer is an extra point of its cluster; the number of other
    /// transmitters in the cluster stays Poisson.
    Palm,
    /// The observer is counted among the users of a nonempty cluster and
    /// the remaining n - 1 transmit.
    Conditioned,
}

impl Default for IntraClusterVariant {
    fn default() -> Self {
        IntraClusterVariant::Palm
    }
}

/// `1 - E_H[exp(-c H z^{-beta})] = c z^{-beta} / (1 + c z^{-beta})` for
/// unit-mean exponential fading.
fn fading_kernel(c: Complex64, z: f64, beta: f64) -> Complex64 {
    let czb = c * z.powf(-beta);
    czb / (czb + 1.0)
}

/// `int_lower^inf [1 - 1/(1 + c z^{-beta})] z dz`.
///
/// The range is split at the point where `|c| z^{-beta}` drops to 1e-4;
/// beyond it the bracket is summed as a four-term geometric series in
/// `c z^{-beta}`, which integrates termwise in closed form.
pub fn radial_pgfl_integral(
    c: Complex64,
    lower: f64,
    beta: f64,
    spec: &QuadratureSpec,
) -> NumericalResult<Complex64> {
    if c.norm() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let z0 = lower.max((c.norm() * 1e4).powf(1.0 / beta));
    let finite = if z0 > lower {
        integrate(|z| fading_kernel(c, z, beta) * z, lower, z0, spec)?
    } else {
        Complex64::new(0.0, 0.0)
    };
    let mut tail = Complex64::new(0.0, 0.0);
    let mut ck = Complex64::new(1.0, 0.0);
    for k in 1..=4u32 {
        ck *= c;
        let kb = k as f64 * beta;
        let term = ck * z0.powf(2.0 - kb) / (kb - 2.0);
        if k % 2 == 1 {
            tail += term;
        } else {
            tail -= term;
        }
    }
    Ok(finite + tail)
}

/// Expectation over the serving distance of a PPP of density `lambda`
/// (Rayleigh contact distance), through the uniform substitution
/// `u = exp(-pi lambda r^2)`.
fn expect_serving<F>(
    lambda: f64,
    f: F,
    spec: &QuadratureSpec,
) -> NumericalResult<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    integrate(
        |u| f((-u.ln() / (PI * lambda)).sqrt()),
        0.0,
        1.0,
        spec,
    )
}

/// Exposure field from all BSs seen by a passive observer:
/// `L_Wb(s) = exp(-2 pi lambda_b int_dmin [..] z dz)` with
/// `c = s rho_b G_b / (4 pi)`.
pub fn lt_wb(s: Complex64, params: &NetworkParams, spec: &QuadratureSpec) -> NumericalResult<Complex64> {
    let c = s * params.rho_b * params.g_b / (4.0 * PI);
    let d = radial_pgfl_integral(c, params.d_min, params.beta, spec)?;
    Ok((-2.0 * PI * params.lambda_b * d).exp())
}

/// Same field for an active observer whose serving BS sits at `r_serv`:
/// all other BSs lie beyond the serving distance.
pub fn lt_wb_active(
    s: Complex64,
    r_serv: f64,
    params: &NetworkParams,
    spec: &QuadratureSpec,
) -> NumericalResult<Complex64> {
    let c = s * params.rho_b * params.g_b / (4.0 * PI);
    let lower = r_serv.max(params.d_min);
    let d = radial_pgfl_integral(c, lower, params.beta, spec)?;
    Ok((-2.0 * PI * params.lambda_b * d).exp())
}

/// Exposure factor of one dedicated BS at distance `r` (the serving BS of
/// an active observer, or the cluster-center BS of scenario 2): the
/// exponential-fading transform `1/(1 + s rho_b G_b r^{-beta} / 4 pi)`,
/// or 1 when the BS falls inside the `d_min` exclusion.
pub fn single_bs_factor(s: Complex64, r: f64, params: &NetworkParams) -> Complex64 {
    if r < params.d_min {
        return Complex64::new(1.0, 0.0);
    }
    let c = s * params.rho_b * params.g_b / (4.0 * PI);
    (Complex64::new(1.0, 0.0)) / (c * r.powf(-params.beta) + 1.0)
}

/// Radial integral averaged over the marginal transmit-power law of
/// PPP-associated users. A Chebyshev interpolant in `ln p` collapses the
/// inner family of radial integrals to 24 evaluations.
fn power_averaged_pgfl(
    s: Complex64,
    lower: f64,
    params: &NetworkParams,
    spec: &QuadratureSpec,
) -> NumericalResult<Complex64> {
    let c0 = s / (4.0 * PI);
    if params.eta == 0.0 {
        return radial_pgfl_integral(c0 * params.rho_u, lower, params.beta, spec);
    }
    let ln_lo = params.rho_u.ln();
    let ln_hi = params.p_max.ln();
    let interp = ChebInterp::build(
        |lnp| {
            radial_pgfl_integral(c0 * lnp.exp(), lower, params.beta, spec)
                .expect("radial integral is smooth in the power")
        },
        ln_lo,
        ln_hi,
        24,
    );
    expect_serving(params.lambda_b, |r| interp.eval(tx_power(r, params).ln()), spec)
}

/// Uplink exposure field of PPP users at a passive or active observer
/// (the observer's own transmission is not part of this field).
pub fn lt_wu_ppp(
    s: Complex64,
    params: &NetworkParams,
    spec: &QuadratureSpec,
) -> NumericalResult<Complex64> {
    if s.norm() == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let d = power_averaged_pgfl(s, params.d_min, params, spec)?;
    Ok((-2.0 * PI * params.lambda_u * params.p_a * d).exp())
}

/// Transmit-power law of the interfering cluster users.
#[derive(Clone, Copy)]
enum ClusterPowerLaw {
    /// Scenario 1: powers follow the PPP serving-distance marginal.
    Marginal,
    /// Scenario 2: the mean in-cluster power stands in for the law.
    Fixed(f64),
}

/// `1 - Q(c, r1)`: the expected fading bracket of one user of a cluster
/// whose center sits at distance `r1`, integrated over the in-cluster
/// distance density. Zero when the whole cluster falls inside `d_min`.
fn cluster_defect(
    cp: Complex64,
    r1: f64,
    params: &NetworkParams,
    spec: &QuadratureSpec,
) -> Complex64 {
    if cp.norm() == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let rc = params.r_c;
    let hi = r1 + rc;
    if hi <= params.d_min {
        return Complex64::new(0.0, 0.0);
    }
    let kink = (rc - r1).abs();
    let mut cuts = vec![params.d_min];
    if kink > params.d_min && kink < hi {
        cuts.push(kink);
    }
    cuts.push(hi);
    let mut acc = Complex64::new(0.0, 0.0);
    for pair in cuts.windows(2) {
        acc += integrate(
            |r2| {
                conditional_cluster_distance_pdf(r2, r1, rc)
                    * fading_kernel(cp, r2, params.beta)
            },
            pair[0],
            pair[1],
            spec,
        )
        .expect("cluster distance integrand is piecewise smooth");
    }
    acc
}

/// Poisson cluster-count factor `exp(-m (1 - Q))`.
fn pois_kernel(m: f64, defect: Complex64) -> Complex64 {
    (-m * defect).exp()
}

/// Nonempty-cluster factor for a cluster known to contain the observer:
/// the other `n - 1` of a size-`n` Poisson cluster transmit,
/// `e^{-m} (e^{mQ} - 1) / (Q (1 - e^{-m}))`, arranged to avoid overflow
/// at large `m`.
fn conditioned_kernel(m: f64, defect: Complex64) -> Complex64 {
    if m < 1e-8 {
        return Complex64::new(1.0, 0.0);
    }
    let q = Complex64::new(1.0, 0.0) - defect;
    let x = q * m;
    let denom = 1.0 - (-m).exp();
    if x.norm() < 1e-6 {
        // (e^{mQ} - 1)/Q -> m as Q -> 0
        return Complex64::new(m * (-m).exp() / denom, 0.0) * (x * 0.5 + 1.0);
    }
    ((-m * defect).exp() - (-m).exp()) * m / (x * denom)
}

/// One interfering (or representative) cluster at center distance `r1`,
/// averaged over the transmit-power law.
fn cluster_factor<K>(
    s: Complex64,
    r1: f64,
    law: ClusterPowerLaw,
    kernel: K,
    m: f64,
    params: &NetworkParams,
    spec: &QuadratureSpec,
) -> NumericalResult<Complex64>
where
    K: Fn(f64, Complex64) -> Complex64,
{
    let c0 = s / (4.0 * PI);
    match law {
        ClusterPowerLaw::Fixed(p) => Ok(kernel(m, cluster_defect(c0 * p, r1, params, spec))),
        ClusterPowerLaw::Marginal => {
            if params.eta == 0.0 {
                return Ok(kernel(m, cluster_defect(c0 * params.rho_u, r1, params, spec)));
            }
            let interp = ChebInterp::build(
                |lnp| cluster_defect(c0 * lnp.exp(), r1, params, spec),
                params.rho_u.ln(),
                params.p_max.ln(),
                24,
            );
            expect_serving(
                params.lambda_b,
                |r| kernel(m, interp.eval(tx_power(r, params).ln())),
                spec,
            )
        }
    }
}

/// Uplink exposure field of clustered users. The product of the
/// inter-cluster probability generating functional and the factor of the
/// observer's own (representative) cluster.
pub fn lt_wu_mcp(
    s: Complex64,
    params: &NetworkParams,
    model: UserModel,
    observer: ObserverKind,
    variant: IntraClusterVariant,
    spec: &QuadratureSpec,
) -> NumericalResult<Complex64> {
    if model == UserModel::Ppp {
        return Err(NumericalError::Domain(
            "clustered uplink transform called with the PPP model".into(),
        ));
    }
    if s.norm() == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let m = params.p_a * params.cluster_mean_users();
    if m == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let rc = params.r_c;
    let beta = params.beta;
    let law = match model {
        UserModel::Mcp2 => ClusterPowerLaw::Fixed(mean_tx_power_cluster(params, spec)),
        _ => ClusterPowerLaw::Marginal,
    };
    let p_ref = match law {
        ClusterPowerLaw::Fixed(p) => p,
        ClusterPowerLaw::Marginal => mean_tx_power_ppp(params, spec),
    };

    let a_other = |r1: f64| {
        cluster_factor(s, r1, law, pois_kernel, m, params, spec)
            .expect("interfering cluster factor is smooth")
    };
    // inter-cluster PGFL: finite part plus a first-order far tail where
    // one defect per cluster decays as r1^{-beta}
    let j1 = integrate(
        |r1| (Complex64::new(1.0, 0.0) - a_other(r1)) * r1,
        0.0,
        rc,
        spec,
    )?;
    let z1 = (100.0 * rc).max((s.norm() * p_ref / (4.0 * PI) * 1e8 * m.max(1.0)).powf(1.0 / beta));
    let j2 = integrate(
        |r1| (Complex64::new(1.0, 0.0) - a_other(r1)) * r1,
        rc,
        z1,
        spec,
    )?;
    let j_tail = s * p_ref / (4.0 * PI) * m * z1.powf(2.0 - beta) / (beta - 2.0);
    let inter = (-2.0 * PI * params.lambda_c * (j1 + j2 + j_tail)).exp();

    let rep = match (observer, variant) {
        (ObserverKind::Active, IntraClusterVariant::Conditioned) => integrate(
            |v| {
                cluster_factor(s, rc * v.sqrt(), law, conditioned_kernel, m, params, spec)
                    .expect("representative cluster factor is smooth")
            },
            0.0,
            1.0,
            spec,
        )?,
        _ => integrate(
            |v| {
                cluster_factor(s, rc * v.sqrt(), law, pois_kernel, m, params, spec)
                    .expect("representative cluster factor is smooth")
            },
            0.0,
            1.0,
            spec,
        )?,
    };
    Ok(inter * rep)
}

/// Laplace transform of the passive exposure index. For scenario 2 the
/// transform is conditional on the observer's distance `cond_r` to its
/// cluster-center BS (the caller averages over it); the other models
/// ignore `cond_r`.
pub fn lt_ei_passive(
    s: Complex64,
    params: &NetworkParams,
    model: UserModel,
    cond_r: Option<f64>,
    spec: &QuadratureSpec,
) -> NumericalResult<Complex64> {
    let ss = s * params.sar_dl;
    let wb = lt_wb(ss, params, spec)?;
    let wu = match model {
        UserModel::Ppp => lt_wu_ppp(ss, params, spec)?,
        _ => lt_wu_mcp(
            ss,
            params,
            model,
            ObserverKind::Passive,
            IntraClusterVariant::Palm,
            spec,
        )?,
    };
    let center = if model == UserModel::Mcp2 {
        let r = cond_r.ok_or_else(|| {
            NumericalError::Domain(
                "scenario 2 passive exposure requires the cluster-center distance".into(),
            )
        })?;
        single_bs_factor(ss, r, params)
    } else {
        Complex64::new(1.0, 0.0)
    };
    Ok(wb * wu * center)
}

/// Laplace transform of the active exposure index, conditional on the
/// serving distance `r_serv` (to the nearest BS, or to the cluster-center
/// BS in scenario 2). The caller averages over the serving distance.
pub fn lt_ei_active(
    s: Complex64,
    r_serv: f64,
    params: &NetworkParams,
    model: UserModel,
    variant: IntraClusterVariant,
    spec: &QuadratureSpec,
) -> NumericalResult<Complex64> {
    let ss = s * params.sar_dl;
    // for scenario 2 the serving cluster-center BS is not the nearest one,
    // so the rest of the field is unrestricted
    let wb = match model {
        UserModel::Mcp2 => lt_wb(ss, params, spec)?,
        _ => lt_wb_active(ss, r_serv, params, spec)?,
    };
    let serving = single_bs_factor(ss, r_serv, params);
    let wu = match model {
        UserModel::Ppp => lt_wu_ppp(ss, params, spec)?,
        _ => lt_wu_mcp(ss, params, model, ObserverKind::Active, variant, spec)?,
    };
    let own = (-s * params.sar_ul * tx_power(r_serv, params)).exp();
    Ok(wb * serving * wu * own)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn defaults() -> NetworkParams {
        NetworkParams::default()
    }

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn real(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn radial_integral_matches_closed_form_without_truncation() {
        // int_d^inf cz^{1-b}/(1+cz^{-b}) dz has closed form for c real via
        // substitution; cross-check against a brute adaptive integral
        let c = real(2.5e3);
        let beta = 2.5;
        let v = radial_pgfl_integral(c, 1.0, beta, &spec()).unwrap();
        let brute = crate::quad::integrate_real_to_inf(
            |z| {
                let czb = 2.5e3 * z.powf(-beta);
                czb / (1.0 + czb) * z
            },
            1.0,
            &QuadratureSpec {
                max_subdivisions: 20000,
                ..spec()
            },
        )
        .unwrap();
        assert!(
            (v.re - brute).abs() / brute < 1e-7,
            "series {v} vs brute {brute}"
        );
        assert!(v.im.abs() < 1e-12);
    }

    #[test]
    fn transforms_are_one_at_zero() {
        let p = defaults();
        let z = Complex64::new(0.0, 0.0);
        assert_eq!(lt_wb(z, &p, &spec()).unwrap(), real(1.0));
        assert_eq!(lt_wu_ppp(z, &p, &spec()).unwrap(), real(1.0));
        for model in [UserModel::Mcp1, UserModel::Mcp2] {
            for obs in [ObserverKind::Passive, ObserverKind::Active] {
                for var in [IntraClusterVariant::Palm, IntraClusterVariant::Conditioned] {
                    let v = lt_wu_mcp(z, &p, model, obs, var, &spec()).unwrap();
                    assert_eq!(v, real(1.0), "{model} {obs} {var:?}");
                }
            }
        }
        assert_eq!(
            lt_ei_passive(z, &p, UserModel::Ppp, None, &spec()).unwrap(),
            real(1.0)
        );
        assert_eq!(
            lt_ei_active(z, 300.0, &p, UserModel::Ppp, IntraClusterVariant::Palm, &spec())
                .unwrap(),
            real(1.0)
        );
    }

    #[test]
    fn real_transforms_decrease_from_one() {
        let p = defaults();
        let grid: Vec<f64> = (0..6).map(|k| 10f64.powi(k + 3)).collect();
        let check = |name: &str, vals: Vec<f64>| {
            let mut prev = 1.0;
            for (i, v) in vals.iter().enumerate() {
                assert!(*v > 0.0 && *v <= prev + 1e-12, "{name}[{i}] = {v}, prev {prev}");
                prev = *v;
            }
            assert!(prev < 1.0, "{name} never decayed");
        };
        check(
            "wb",
            grid.iter()
                .map(|&s| lt_wb(real(s), &p, &spec()).unwrap().re)
                .collect(),
        );
        check(
            "wu_ppp",
            grid.iter()
                .map(|&s| lt_wu_ppp(real(s), &p, &spec()).unwrap().re)
                .collect(),
        );
        for model in [UserModel::Mcp1, UserModel::Mcp2] {
            for var in [IntraClusterVariant::Palm, IntraClusterVariant::Conditioned] {
                let vals: Vec<f64> = grid
                    .iter()
                    .map(|&s| {
                        lt_wu_mcp(real(s), &p, model, ObserverKind::Active, var, &spec())
                            .unwrap()
                            .re
                    })
                    .collect();
                check(&format!("wu_{model}_{var:?}"), vals);
            }
        }
    }

    #[test]
    fn conjugate_symmetry() {
        let p = defaults();
        for s in [
            Complex64::new(1e4, 3e4),
            Complex64::new(0.0, 1e5),
            Complex64::new(2e3, -8e3),
        ] {
            let a = lt_wb(s, &p, &spec()).unwrap();
            let b = lt_wb(s.conj(), &p, &spec()).unwrap();
            assert!((a.conj() - b).norm() < 1e-10 * a.norm().max(1e-30));

            let a = lt_wu_ppp(s, &p, &spec()).unwrap();
            let b = lt_wu_ppp(s.conj(), &p, &spec()).unwrap();
            assert!((a.conj() - b).norm() < 1e-8 * a.norm().max(1e-30));

            let a = lt_wu_mcp(
                s,
                &p,
                UserModel::Mcp1,
                ObserverKind::Passive,
                IntraClusterVariant::Palm,
                &spec(),
            )
            .unwrap();
            let b = lt_wu_mcp(
                s.conj(),
                &p,
                UserModel::Mcp1,
                ObserverKind::Passive,
                IntraClusterVariant::Palm,
                &spec(),
            )
            .unwrap();
            assert!((a.conj() - b).norm() < 1e-7 * a.norm().max(1e-30));
        }
    }

    #[test]
    fn wb_mean_via_log_derivative() {
        let p = defaults();
        // E[W_b] = lambda_b rho_b G_b d^{2-beta} / (2 (beta - 2))
        let mean = p.lambda_b * p.rho_b * p.g_b * p.d_min.powf(2.0 - p.beta)
            / (2.0 * (p.beta - 2.0));
        // h must keep even the strongest (d_min) source in the linear
        // regime: h rho_b G_b d_min^{-beta} / 4 pi << 1
        let h = 1e-4 * 4.0 * PI / (p.rho_b * p.g_b * p.d_min.powf(-p.beta));
        let l = lt_wb(real(h), &p, &spec()).unwrap().re;
        let est = -l.ln() / h;
        assert!((est - mean).abs() / mean < 2e-3, "est {est} vs {mean}");
    }

    #[test]
    fn wu_ppp_mean_via_log_derivative() {
        let p = defaults();
        let pbar = mean_tx_power_ppp(&p, &spec());
        let mean = p.lambda_u * p.p_a * pbar * p.d_min.powf(2.0 - p.beta)
            / (2.0 * (p.beta - 2.0));
        let h = 1e-4 * 4.0 * PI / (p.p_max * p.d_min.powf(-p.beta));
        let l = lt_wu_ppp(real(h), &p, &spec()).unwrap().re;
        let est = -l.ln() / h;
        assert!((est - mean).abs() / mean < 5e-3, "est {est} vs {mean}");
    }

    #[test]
    fn large_clusters_approach_ppp() {
        // as r_c grows with the per-cluster density fixed, the clustered
        // field converges to a PPP of the same average user density
        let mut p = defaults();
        p.r_c = 2.0e4;
        p.lambda_c = 1e-7;
        p.lambda_cu = 8e-7;
        let m_density = p.lambda_c * p.lambda_cu * PI * p.r_c * p.r_c;
        let mut ppp = p.clone();
        // the observer's own cluster survives the limit as extra local
        // density lambda_cu around the origin
        ppp.lambda_u = m_density + p.lambda_cu * p.p_a;
        for sv in [1e4, 1e6] {
            let s = real(sv);
            let a = lt_wu_mcp(
                s,
                &p,
                UserModel::Mcp1,
                ObserverKind::Passive,
                IntraClusterVariant::Palm,
                &spec(),
            )
            .unwrap()
            .re;
            let b = lt_wu_ppp(s, &ppp, &spec()).unwrap().re;
            let (la, lb) = (a.ln(), b.ln());
            assert!(
                (la - lb).abs() < 0.03 * lb.abs().max(1e-6),
                "s = {sv}: ln {la} vs {lb}"
            );
        }
    }

    #[test]
    fn scenarios_agree_without_power_control() {
        // with eta = 0 every user transmits rho_u, so the only difference
        // between the scenario power laws disappears
        let mut p = defaults();
        p.eta = 0.0;
        p.lambda_c = p.lambda_b;
        for sv in [1e5, 1e7] {
            let s = real(sv);
            let a = lt_wu_mcp(
                s,
                &p,
                UserModel::Mcp1,
                ObserverKind::Passive,
                IntraClusterVariant::Palm,
                &spec(),
            )
            .unwrap()
            .re;
            let b = lt_wu_mcp(
                s,
                &p,
                UserModel::Mcp2,
                ObserverKind::Passive,
                IntraClusterVariant::Palm,
                &spec(),
            )
            .unwrap()
            .re;
            assert!((a - b).abs() < 1e-8 + 1e-6 * a.abs(), "s = {sv}: {a} vs {b}");
        }
    }

    #[test]
    fn conditioned_kernel_limits() {
        // Q = 1 (no attenuation of the bracket) must give exactly 1
        let v = conditioned_kernel(3.0, Complex64::new(0.0, 0.0));
        assert!((v - real(1.0)).norm() < 1e-12);
        // huge m must not overflow
        let v = conditioned_kernel(5000.0, Complex64::new(0.5, 0.1));
        assert!(v.norm().is_finite());
        // tiny m: the observer is the only user
        let v = conditioned_kernel(1e-12, Complex64::new(0.9, 0.0));
        assert!((v - real(1.0)).norm() < 1e-9);
    }

    #[test]
    fn active_transform_bounded_by_self_term() {
        // the product of sub-unit factors can never exceed the self term
        let p = defaults();
        let r = 700.0; // beyond the cutoff: transmits p_max
        let s = real(1e3);
        let l = lt_ei_active(s, r, &p, UserModel::Ppp, IntraClusterVariant::Palm, &spec())
            .unwrap()
            .re;
        let own = (-1e3 * p.sar_ul * p.p_max).exp();
        assert!(l <= own + 1e-12, "{l} > {own}");
        assert!(l > 0.0);
    }

    #[test]
    fn passive_mcp2_requires_conditioning_distance() {
        let p = defaults();
        let err = lt_ei_passive(real(1e3), &p, UserModel::Mcp2, None, &spec());
        assert!(err.is_err());
        let ok = lt_ei_passive(real(1e3), &p, UserModel::Mcp2, Some(50.0), &spec());
        assert!(ok.is_ok());
    }
}
