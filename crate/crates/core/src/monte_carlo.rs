//! Monte Carlo oracle: realizes full networks on a finite disc window,
//! applies power control and fading, and measures exposure breakdowns and
//! uplink SINR.
//!
//! Only transmitting (active) users are materialized: inactive users
//! contribute to no measured quantity, and independent thinning of a
//! Poisson pattern is again Poisson, so sampling the thinned pattern
//! directly is distributionally exact.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{NumericalError, NumericalResult};
use crate::params::{ExposureBreakdown, NetworkParams, ObserverKind, UserModel};
use crate::point_process::{poisson_count, sample_ppp, uniform_in_disc, PointSet};
use crate::power_control::tx_power;

/// Target expected number of materialized users per trial; beyond this
/// the far field is importance-thinned (see [`radial_retention`]).
const THIN_TARGET: f64 = 3e4;

/// One user of the realized network (only active users are stored).
#[derive(Debug, Clone)]
pub struct UserRecord {
    pub position: [f64; 2],
    /// Index into the BS point set: nearest BS (PPP, MCP scenario 1) or
    /// the cluster-center BS (scenario 2). `None` when no BS exists.
    pub serving_bs_index: Option<usize>,
    pub serving_distance: f64,
    pub tx_power: f64,
    pub active: bool,
    /// Importance weight from radial thinning of far users (1 when the
    /// user was sampled exactly).
    pub weight: f64,
    /// Whether the user belongs to the observer's own (Palm) cluster.
    pub in_palm_cluster: bool,
}

/// A realized network with the observer at the origin.
#[derive(Debug, Clone)]
pub struct NetworkRealization {
    pub bs: PointSet,
    pub users: Vec<UserRecord>,
    /// Center of the observer's own (Palm) cluster, for the MCP models.
    pub palm_center: Option<[f64; 2]>,
    /// Index of the BS at the palm center (scenario 2 only).
    pub palm_bs_index: Option<usize>,
    pub model: UserModel,
}

/// Dense uniform-grid nearest-neighbor index over the BS pattern.
struct NearestGrid {
    cell: f64,
    origin: f64,
    n: i64,
    buckets: Vec<Vec<u32>>,
    points: Vec<[f64; 2]>,
}

impl NearestGrid {
    fn build(points: &[[f64; 2]], cell: f64, extent: f64) -> Self {
        let n = ((2.0 * extent / cell).ceil() as i64).max(1);
        let origin = -extent;
        let mut buckets = vec![Vec::new(); (n * n) as usize];
        for (i, p) in points.iter().enumerate() {
            let ix = (((p[0] - origin) / cell) as i64).clamp(0, n - 1);
            let iy = (((p[1] - origin) / cell) as i64).clamp(0, n - 1);
            buckets[(iy * n + ix) as usize].push(i as u32);
        }
        NearestGrid {
            cell,
            origin,
            n,
            buckets,
            points: points.to_vec(),
        }
    }

    /// Index and distance of the nearest point, searched ring by ring.
    fn nearest(&self, q: [f64; 2]) -> Option<(usize, f64)> {
        if self.points.is_empty() {
            return None;
        }
        let cx = (((q[0] - self.origin) / self.cell) as i64).clamp(0, self.n - 1);
        let cy = (((q[1] - self.origin) / self.cell) as i64).clamp(0, self.n - 1);
        let mut best: Option<(usize, f64)> = None;
        let mut ring = 0i64;
        loop {
            let mut scanned_any = false;
            for dx in -ring..=ring {
                let x = cx + dx;
                if x < 0 || x >= self.n {
                    continue;
                }
                for dy in -ring..=ring {
                    if dx.abs() != ring && dy.abs() != ring {
                        continue;
                    }
                    let y = cy + dy;
                    if y < 0 || y >= self.n {
                        continue;
                    }
                    scanned_any = true;
                    for &i in &self.buckets[(y * self.n + x) as usize] {
                        let p = self.points[i as usize];
                        let d2 = (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2);
                        match best {
                            Some((_, b)) if b * b <= d2 => {}
                            _ => best = Some((i as usize, d2.sqrt())),
                        }
                    }
                }
            }
            // a hit in ring k is only confirmed once rings within the hit
            // distance have been scanned
            if let Some((_, d)) = best {
                if d <= (ring as f64) * self.cell {
                    return best;
                }
            }
            if !scanned_any && ring > 2 * self.n {
                return best;
            }
            ring += 1;
        }
    }
}

fn norm(p: [f64; 2]) -> f64 {
    (p[0] * p[0] + p[1] * p[1]).sqrt()
}

/// Probability of keeping a user at distance `r` from the observer when
/// the far field is importance-thinned at radius `r0`. The `(r0/r)^3`
/// tail keeps the expected retained count bounded uniformly in the
/// window size while the kept users carry the inverse weight, so every
/// field statistic stays unbiased and the (near-deterministic) far-field
/// contribution gains only negligible variance.
/// `d^-beta` from the squared distance, with a fast path for the
/// default exponent.
fn pow_neg_half_beta(d2: f64, beta: f64) -> f64 {
    if beta == 2.5 {
        // d^-2.5 = 1 / (d^2 * d^0.5)
        1.0 / (d2 * d2.sqrt().sqrt())
    } else {
        d2.powf(-0.5 * beta)
    }
}

fn radial_retention(r: f64, r0: f64) -> f64 {
    if r <= r0 {
        1.0
    } else {
        (r0 / r).powi(3)
    }
}

/// Thinning radius for a given active-user area density; infinite when
/// the expected window population is already below the target.
fn thinning_radius(active_density: f64, params: &NetworkParams) -> f64 {
    let w = params.window_radius;
    let expected = active_density * PI * w * w;
    if !(expected > THIN_TARGET) {
        return f64::INFINITY;
    }
    // expected retained count with the cubic tail is ~ 3 pi rho r0^2
    let r0 = (THIN_TARGET / (3.0 * PI * active_density)).sqrt();
    let r0 = r0.max((4.0 * params.r_c).max(500.0));
    if r0 >= w {
        f64::INFINITY
    } else {
        r0
    }
}

/// Samples active PPP users with radial importance thinning beyond `r0`;
/// returns `(position, weight)` pairs.
fn sample_ppp_users<R: Rng + ?Sized>(
    density: f64,
    w: f64,
    r0: f64,
    rng: &mut R,
) -> Vec<([f64; 2], f64)> {
    let inner = r0.min(w);
    let mut out: Vec<([f64; 2], f64)> = Vec::new();
    let n = poisson_count(density * PI * inner * inner, rng);
    out.reserve(n);
    for _ in 0..n {
        out.push((uniform_in_disc([0.0, 0.0], inner, rng), 1.0));
    }
    if r0 < w {
        // inhomogeneous annulus with intensity density * (r0/r)^3;
        // radial density ~ r^-2, inverted in closed form
        let a = 1.0 / r0;
        let b = 1.0 / w;
        let mean = 2.0 * PI * density * r0.powi(3) * (a - b);
        let m = poisson_count(mean, rng);
        for _ in 0..m {
            let u: f64 = rng.gen();
            let r = 1.0 / (a - u * (a - b));
            let theta = 2.0 * PI * rng.gen::<f64>();
            out.push(([r * theta.cos(), r * theta.sin()], (r / r0).powi(3)));
        }
    }
    out
}

struct McpUsers {
    centers: PointSet,
    palm_index: usize,
    /// `(cluster index, position, weight)` per retained user.
    users: Vec<(usize, [f64; 2], f64)>,
}

/// Samples the Palm version of the Matern cluster user process with
/// exact per-user radial importance thinning beyond `r0`: each cluster's
/// offspring count is drawn against the cluster-wide retention upper
/// bound, then every candidate is re-tested at its own position, which
/// composes to exact position-dependent thinning of the Poisson counts.
fn sample_mcp_users<R: Rng + ?Sized>(
    lambda_c: f64,
    lambda_cu_active: f64,
    r_c: f64,
    w: f64,
    r0: f64,
    rng: &mut R,
) -> McpUsers {
    let mut centers = sample_ppp(lambda_c, w, rng);
    let palm_index = centers.points.len();
    centers.points.push(uniform_in_disc([0.0, 0.0], r_c, rng));
    let mean_offspring = lambda_cu_active * PI * r_c * r_c;
    let mut users = Vec::new();
    for (ci, &c) in centers.points.iter().enumerate() {
        let q_ub = radial_retention((norm(c) - r_c).max(0.0), r0);
        let n = poisson_count(mean_offspring * q_ub, rng);
        for _ in 0..n {
            let p = uniform_in_disc(c, r_c, rng);
            let q = radial_retention(norm(p), r0);
            if q >= q_ub || rng.gen::<f64>() * q_ub < q {
                users.push((ci, p, 1.0 / q));
            }
        }
    }
    McpUsers {
        centers,
        palm_index,
        users,
    }
}

/// Realizes BSs and active users on the window, with Palm conditioning of
/// the observer's cluster for the MCP models.
pub fn realize<R: Rng + ?Sized>(
    params: &NetworkParams,
    model: UserModel,
    rng: &mut R,
) -> NetworkRealization {
    let w = params.window_radius;
    match model {
        UserModel::Ppp => {
            let bs = sample_ppp(params.lambda_b, w, rng);
            let density = params.lambda_u * params.p_a;
            let pts = sample_ppp_users(density, w, thinning_radius(density, params), rng);
            let grid = NearestGrid::build(&bs.points, grid_cell(params), w);
            let users = pts
                .iter()
                .map(|&(p, wt)| user_from_nearest(p, wt, &grid, params))
                .collect();
            NetworkRealization {
                bs,
                users,
                palm_center: None,
                palm_bs_index: None,
                model,
            }
        }
        UserModel::Mcp1 => {
            let bs = sample_ppp(params.lambda_b, w, rng);
            let per_cluster = params.lambda_cu * params.p_a;
            let density = params.lambda_c * per_cluster * PI * params.r_c * params.r_c;
            let r0 = thinning_radius(density, params);
            let mcp = sample_mcp_users(params.lambda_c, per_cluster, params.r_c, w, r0, rng);
            let grid = NearestGrid::build(&bs.points, grid_cell(params), w);
            let users = mcp
                .users
                .iter()
                .map(|&(ci, p, wt)| {
                    let mut u = user_from_nearest(p, wt, &grid, params);
                    u.in_palm_cluster = ci == mcp.palm_index;
                    u
                })
                .collect();
            NetworkRealization {
                bs,
                users,
                palm_center: Some(mcp.centers.points[mcp.palm_index]),
                palm_bs_index: None,
                model,
            }
        }
        UserModel::Mcp2 => {
            // cluster centers are the BSs themselves
            let per_cluster = params.lambda_cu * params.p_a;
            let density = params.lambda_b * per_cluster * PI * params.r_c * params.r_c;
            let r0 = thinning_radius(density, params);
            let mcp = sample_mcp_users(params.lambda_b, per_cluster, params.r_c, w, r0, rng);
            let users = mcp
                .users
                .iter()
                .map(|&(ci, p, wt)| {
                    let c = mcp.centers.points[ci];
                    let r = ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)).sqrt();
                    UserRecord {
                        position: p,
                        serving_bs_index: Some(ci),
                        serving_distance: r,
                        tx_power: tx_power(r, params),
                        active: true,
                        weight: wt,
                        in_palm_cluster: ci == mcp.palm_index,
                    }
                })
                .collect();
            let palm = mcp.centers.points[mcp.palm_index];
            NetworkRealization {
                bs: mcp.centers,
                users,
                palm_center: Some(palm),
                palm_bs_index: Some(mcp.palm_index),
                model,
            }
        }
    }
}

fn grid_cell(params: &NetworkParams) -> f64 {
    (1.0 / params.lambda_b.sqrt()).min(params.window_radius)
}

fn user_from_nearest(
    p: [f64; 2],
    weight: f64,
    grid: &NearestGrid,
    params: &NetworkParams,
) -> UserRecord {
    match grid.nearest(p) {
        Some((i, d)) => UserRecord {
            position: p,
            serving_bs_index: Some(i),
            serving_distance: d,
            tx_power: tx_power(d, params),
            active: true,
            weight,
            in_palm_cluster: false,
        },
        None => UserRecord {
            position: p,
            serving_bs_index: None,
            serving_distance: f64::INFINITY,
            tx_power: params.p_max,
            active: true,
            weight,
            in_palm_cluster: false,
        },
    }
}

/// Serving link of the observer at the origin: nearest BS for PPP and
/// scenario 1, the Palm cluster-center BS for scenario 2.
pub fn observer_link(real: &NetworkRealization, params: &NetworkParams) -> Option<(usize, f64)> {
    match real.model {
        UserModel::Mcp2 => real
            .palm_bs_index
            .map(|i| (i, norm(real.bs.points[i]))),
        _ => {
            let grid = NearestGrid::build(&real.bs.points, grid_cell(params), params.window_radius);
            grid.nearest([0.0, 0.0])
        }
    }
}

/// Exposure breakdown at the origin with fresh fading per source;
/// sources inside the `d_min` exclusion radius are skipped.
pub fn measure_ei<R: Rng + ?Sized>(
    real: &NetworkRealization,
    observer: ObserverKind,
    params: &NetworkParams,
    rng: &mut R,
) -> ExposureBreakdown {
    measure_ei_with(real, observer, params, &mut |rng2: &mut R| {
        let u: f64 = rng2.gen::<f64>();
        -(1.0 - u).ln()
    }, rng)
}

fn measure_ei_with<R: Rng + ?Sized>(
    real: &NetworkRealization,
    observer: ObserverKind,
    params: &NetworkParams,
    fading: &mut dyn FnMut(&mut R) -> f64,
    rng: &mut R,
) -> ExposureBreakdown {
    let beta = params.beta;
    let a_b = params.rho_b * params.g_b / (4.0 * PI);
    let d_min2 = params.d_min * params.d_min;
    // sources inside the d_min exclusion radius are outside the model's
    // domain and are skipped, mirroring the lower limits of the radial
    // integrals (clamping them instead would inflate every field mean by
    // exactly (beta-2)/2)
    let mut w_b = 0.0;
    for p in &real.bs.points {
        let d2 = p[0] * p[0] + p[1] * p[1];
        if d2 < d_min2 {
            continue;
        }
        w_b += a_b * fading(rng) * pow_neg_half_beta(d2, beta);
    }
    let mut w_u = 0.0;
    for u in &real.users {
        if !u.active {
            continue;
        }
        let d2 = u.position[0] * u.position[0] + u.position[1] * u.position[1];
        if d2 < d_min2 {
            continue;
        }
        w_u += u.weight * u.tx_power / (4.0 * PI) * fading(rng) * pow_neg_half_beta(d2, beta);
    }
    let ul_tr = match observer {
        ObserverKind::Passive => 0.0,
        ObserverKind::Active => {
            let r = observer_link(real, params)
                .map(|(_, d)| d)
                .unwrap_or(f64::INFINITY);
            params.sar_ul * tx_power(r, params)
        }
    };
    ExposureBreakdown {
        ei_bs: params.sar_dl * w_b,
        ei_ul_u: params.sar_dl * w_u,
        ei_ul_tr: ul_tr,
    }
}

/// Mean-mode boost radius of the BS measurement field.
const MEAN_BOOST_RADIUS_BS: f64 = 300.0;
/// Mean-mode boost radius of the background-user measurement field.
const MEAN_BOOST_RADIUS_USER: f64 = 100.0;
/// Mean-mode uniform boost factor of the observer's own cluster.
const MEAN_BOOST_OWN_CLUSTER: f64 = 30.0;

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Unbiased low-variance estimate of the exposure breakdown mean for one
/// realization. Fading is integrated out (unit mean), and the rare
/// close-range sources that dominate the estimator variance are replaced
/// by importance-boosted phantom measurement fields carrying inverse
/// weights. Phantom transmit powers are evaluated against the realized
/// network, so the estimator samples the exact model; only its variance
/// differs from the plain per-trial measurement.
pub fn measure_ei_mean<R: Rng + ?Sized>(
    real: &NetworkRealization,
    observer: ObserverKind,
    params: &NetworkParams,
    rng: &mut R,
) -> ExposureBreakdown {
    let beta = params.beta;
    let a_b = params.rho_b * params.g_b / (4.0 * PI);
    let d_min2 = params.d_min * params.d_min;
    let r1b = MEAN_BOOST_RADIUS_BS
        .min(params.window_radius)
        .max(params.d_min);
    let r1u = MEAN_BOOST_RADIUS_USER
        .min(params.window_radius)
        .max(params.d_min);
    // the near BS field is unconstrained exactly when the observer's
    // serving BS is not its nearest one
    let boost_bs = matches!(observer, ObserverKind::Passive) || real.model == UserModel::Mcp2;
    let r1b2 = if boost_bs { r1b * r1b } else { 0.0 };

    let mut w_b = 0.0;
    for (i, p) in real.bs.points.iter().enumerate() {
        if real.model == UserModel::Mcp2 && Some(i) == real.palm_bs_index {
            // replaced by the importance-sampled Palm-center term below
            continue;
        }
        let d2 = p[0] * p[0] + p[1] * p[1];
        if d2 < d_min2 || d2 < r1b2 {
            continue;
        }
        w_b += a_b * pow_neg_half_beta(d2, beta);
    }
    if boost_bs && r1b > params.d_min {
        // phantom near-zone BS field: intensity lambda_b (r1b/r)^3 with
        // weight (r/r1b)^3; radial density ~ r^-2, inverted exactly
        let a = 1.0 / params.d_min;
        let b = 1.0 / r1b;
        let mean = 2.0 * PI * params.lambda_b * r1b.powi(3) * (a - b);
        for _ in 0..poisson_count(mean, rng) {
            let u: f64 = rng.gen();
            let r = 1.0 / (a - u * (a - b));
            w_b += (r / r1b).powi(3) * a_b * r.powf(-beta);
        }
    }
    if real.model == UserModel::Mcp2 && params.r_c > params.d_min {
        // Palm cluster-center term: log-uniform importance draw of the
        // center distance against its 2r/r_c^2 law on [d_min, r_c]
        let span = (params.r_c / params.d_min).ln();
        let r = params.d_min * (span * rng.gen::<f64>()).exp();
        let target = 2.0 * r / (params.r_c * params.r_c);
        w_b += a_b * r.powf(-beta) * target * r * span;
    }

    let grid = match real.model {
        UserModel::Mcp2 => None,
        _ => Some(NearestGrid::build(
            &real.bs.points,
            grid_cell(params),
            params.window_radius,
        )),
    };
    let phantom_tx = |x: [f64; 2], rng: &mut R| -> f64 {
        match &grid {
            Some(g) => g
                .nearest(x)
                .map(|(_, d)| tx_power(d, params))
                .unwrap_or(params.p_max),
            // a background cluster user's own-parent distance has the
            // uniform-disc radial law, independently of its position
            None => tx_power(params.r_c * rng.gen::<f64>().sqrt(), params),
        }
    };
    let m_active = params.lambda_cu * params.p_a * PI * params.r_c * params.r_c;
    let bg_intensity = match real.model {
        UserModel::Ppp => params.lambda_u * params.p_a,
        UserModel::Mcp1 => params.lambda_c * m_active,
        UserModel::Mcp2 => params.lambda_b * m_active,
    };
    let r1u2 = r1u * r1u;
    let mut w_u = 0.0;
    for u in &real.users {
        if !u.active || u.in_palm_cluster {
            // the own cluster is replaced by its boosted phantom field
            continue;
        }
        let d2 = u.position[0] * u.position[0] + u.position[1] * u.position[1];
        if d2 < d_min2 || d2 < r1u2 {
            continue;
        }
        w_u += u.weight * u.tx_power / (4.0 * PI) * pow_neg_half_beta(d2, beta);
    }
    if r1u > params.d_min {
        // phantom near-zone background users: boost r1u/r with weight
        // r/r1u; the boosted radial density is uniform
        let mean = 2.0 * PI * bg_intensity * r1u * (r1u - params.d_min);
        for _ in 0..poisson_count(mean, rng) {
            let r = params.d_min + rng.gen::<f64>() * (r1u - params.d_min);
            let theta = 2.0 * PI * rng.gen::<f64>();
            let x = [r * theta.cos(), r * theta.sin()];
            w_u += (r / r1u) * phantom_tx(x, rng) / (4.0 * PI) * r.powf(-beta);
        }
    }
    if real.model != UserModel::Ppp {
        if let Some(c) = real.palm_center {
            // uniformly boosted phantom copy of the observer's own cluster
            let boost = MEAN_BOOST_OWN_CLUSTER;
            for _ in 0..poisson_count(m_active * boost, rng) {
                let x = uniform_in_disc(c, params.r_c, rng);
                let d2 = x[0] * x[0] + x[1] * x[1];
                if d2 < d_min2 {
                    continue;
                }
                let p_tx = match real.model {
                    UserModel::Mcp2 => tx_power(dist(x, c), params),
                    _ => phantom_tx(x, rng),
                };
                w_u += p_tx / boost / (4.0 * PI) * pow_neg_half_beta(d2, beta);
            }
        }
    }

    let ul_tr = match observer {
        ObserverKind::Passive => 0.0,
        ObserverKind::Active => {
            let r = observer_link(real, params)
                .map(|(_, d)| d)
                .unwrap_or(f64::INFINITY);
            params.sar_ul * tx_power(r, params)
        }
    };
    ExposureBreakdown {
        ei_bs: params.sar_dl * w_b,
        ei_ul_u: params.sar_dl * w_u,
        ei_ul_tr: ul_tr,
    }
}

/// Uplink SINR of the active observer at its tagged BS: one interfering
/// active user per foreign cell, chosen uniformly.
pub fn measure_sinr<R: Rng + ?Sized>(
    real: &NetworkRealization,
    params: &NetworkParams,
    rng: &mut R,
) -> NumericalResult<f64> {
    let (tagged, r_u) = observer_link(real, params).ok_or_else(|| {
        NumericalError::Domain("SINR needs at least one BS in the window".into())
    })?;
    let bs_pos = real.bs.points[tagged];
    // group active users by serving cell
    let mut cells: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, u) in real.users.iter().enumerate() {
        if let Some(b) = u.serving_bs_index {
            if u.active && b != tagged {
                cells.entry(b).or_default().push(i);
            }
        }
    }
    let mut interference = 0.0;
    for ids in cells.values() {
        let pick = ids[rng.gen_range(0..ids.len())];
        let u = &real.users[pick];
        let d = ((u.position[0] - bs_pos[0]).powi(2) + (u.position[1] - bs_pos[1]).powi(2))
            .sqrt();
        let h: f64 = -(1.0 - rng.gen::<f64>()).ln();
        interference += u.tx_power * h * d.powf(-params.alpha);
    }
    let h: f64 = -(1.0 - rng.gen::<f64>()).ln();
    let p_r = params.g_b * tx_power(r_u, params) * h * r_u.powf(-params.alpha);
    Ok(p_r / (params.normalized_noise() + interference))
}

/// Sorted empirical sample with the usual summaries.
#[derive(Debug, Clone)]
pub struct EmpiricalDistribution {
    sorted: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn from_samples(mut samples: Vec<f64>) -> Self {
        samples.sort_by(f64::total_cmp);
        EmpiricalDistribution { sorted: samples }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// `P(X <= x)` = rank / n.
    pub fn cdf(&self, x: f64) -> f64 {
        let rank = self.sorted.partition_point(|&v| v <= x);
        rank as f64 / self.sorted.len() as f64
    }

    /// `P(X > x)`.
    pub fn exceedance(&self, x: f64) -> f64 {
        1.0 - self.cdf(x)
    }

    /// Smallest sample with empirical CDF >= q.
    pub fn quantile(&self, q: f64) -> f64 {
        let n = self.sorted.len();
        let idx = ((q * n as f64).ceil() as usize).clamp(1, n) - 1;
        self.sorted[idx]
    }

    pub fn mean(&self) -> f64 {
        self.sorted.iter().sum::<f64>() / self.sorted.len() as f64
    }

    /// Normal-approximation 95% half-width of the mean.
    pub fn ci_half_width(&self) -> f64 {
        let n = self.sorted.len() as f64;
        let m = self.mean();
        let var = self.sorted.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        1.96 * (var / n).sqrt()
    }
}

/// One measured trial.
#[derive(Debug, Clone, Copy)]
pub struct TrialRow {
    pub ei: ExposureBreakdown,
    pub sinr_db: Option<f64>,
}

/// Aggregate of a Monte Carlo run.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub rows: Vec<TrialRow>,
    pub ei_total: EmpiricalDistribution,
    pub ei_bs: EmpiricalDistribution,
    pub ei_ul_u: EmpiricalDistribution,
    pub ei_ul_tr: EmpiricalDistribution,
    /// SINR samples in dB (active observer only).
    pub sinr_db: Option<EmpiricalDistribution>,
    pub mean: ExposureBreakdown,
    /// 95% half-widths per component.
    pub mean_ci: ExposureBreakdown,
}

impl RunReport {
    pub fn total_ci_half_width(&self) -> f64 {
        self.ei_total.ci_half_width()
    }
}

/// Aggregate of a mean-mode Monte Carlo run.
#[derive(Debug, Clone)]
pub struct MeanReport {
    pub mean: ExposureBreakdown,
    /// 95% half-widths per component.
    pub mean_ci: ExposureBreakdown,
    pub total: EmpiricalDistribution,
}

impl MeanReport {
    pub fn total_mean(&self) -> f64 {
        self.total.mean()
    }

    pub fn total_ci_half_width(&self) -> f64 {
        self.total.ci_half_width()
    }
}

fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    seed[0..8].copy_from_slice(&master_seed.to_le_bytes());
    seed[8..16].copy_from_slice(&trial.to_le_bytes());
    seed[16..24].copy_from_slice(b"ei-trial");
    ChaCha8Rng::from_seed(seed)
}

/// Runs `work` under a rayon pool sized by `EMF_THREADS` when set.
fn with_worker_pool<T: Send>(work: impl Fn() -> Vec<T> + Send + Sync) -> NumericalResult<Vec<T>> {
    match std::env::var("EMF_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        Some(n) if n >= 1 => Ok(rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| NumericalError::Domain(format!("worker pool: {e}")))?
            .install(work)),
        _ => Ok(work()),
    }
}

/// Mean-mode run: unbiased variance-reduced per-trial estimates of the
/// exposure component means (see [`measure_ei_mean`]), with the same
/// deterministic per-trial RNG streams as [`run`].
pub fn run_mean(
    params: &NetworkParams,
    model: UserModel,
    observer: ObserverKind,
    n_trials: usize,
    master_seed: u64,
) -> NumericalResult<MeanReport> {
    if n_trials == 0 {
        return Err(NumericalError::Domain("n_trials must be >= 1".into()));
    }
    let rows: Vec<ExposureBreakdown> = with_worker_pool(|| {
        (0..n_trials as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = trial_rng(master_seed, i);
                let real = realize(params, model, &mut rng);
                measure_ei_mean(&real, observer, params, &mut rng)
            })
            .collect()
    })?;
    let collect = |f: &dyn Fn(&ExposureBreakdown) -> f64| {
        EmpiricalDistribution::from_samples(rows.iter().map(f).collect())
    };
    let (bs, ul_u, ul_tr) = (
        collect(&|b| b.ei_bs),
        collect(&|b| b.ei_ul_u),
        collect(&|b| b.ei_ul_tr),
    );
    Ok(MeanReport {
        mean: ExposureBreakdown {
            ei_bs: bs.mean(),
            ei_ul_u: ul_u.mean(),
            ei_ul_tr: ul_tr.mean(),
        },
        mean_ci: ExposureBreakdown {
            ei_bs: bs.ci_half_width(),
            ei_ul_u: ul_u.ci_half_width(),
            ei_ul_tr: ul_tr.ci_half_width(),
        },
        total: collect(&|b| b.total()),
    })
}

/// Runs `n_trials` independent trials with per-trial RNG streams derived
/// from `(master_seed, trial index)`; results are deterministic for any
/// worker count. `EMF_THREADS` overrides the worker pool size.
pub fn run(
    params: &NetworkParams,
    model: UserModel,
    observer: ObserverKind,
    n_trials: usize,
    master_seed: u64,
) -> NumericalResult<RunReport> {
    if n_trials == 0 {
        return Err(NumericalError::Domain("n_trials must be >= 1".into()));
    }
    let rows = with_worker_pool(|| {
        (0..n_trials as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = trial_rng(master_seed, i);
                let real = realize(params, model, &mut rng);
                let ei = measure_ei(&real, observer, params, &mut rng);
                let sinr_db = match observer {
                    ObserverKind::Active => measure_sinr(&real, params, &mut rng)
                        .ok()
                        .map(|s| 10.0 * s.log10()),
                    ObserverKind::Passive => None,
                };
                TrialRow { ei, sinr_db }
            })
            .collect()
    })?;
    let collect = |f: &dyn Fn(&TrialRow) -> f64| {
        EmpiricalDistribution::from_samples(rows.iter().map(f).collect())
    };
    let ei_total = collect(&|r| r.ei.total());
    let ei_bs = collect(&|r| r.ei.ei_bs);
    let ei_ul_u = collect(&|r| r.ei.ei_ul_u);
    let ei_ul_tr = collect(&|r| r.ei.ei_ul_tr);
    let sinr_db = match observer {
        ObserverKind::Active => Some(EmpiricalDistribution::from_samples(
            rows.iter().filter_map(|r| r.sinr_db).collect(),
        )),
        ObserverKind::Passive => None,
    };
    let mean = ExposureBreakdown {
        ei_bs: ei_bs.mean(),
        ei_ul_u: ei_ul_u.mean(),
        ei_ul_tr: ei_ul_tr.mean(),
    };
    let mean_ci = ExposureBreakdown {
        ei_bs: ei_bs.ci_half_width(),
        ei_ul_u: ei_ul_u.ci_half_width(),
        ei_ul_tr: ei_ul_tr.ci_half_width(),
    };
    Ok(RunReport {
        rows,
        ei_total,
        ei_bs,
        ei_ul_u,
        ei_ul_tr,
        sinr_db,
        mean,
        mean_ci,
    })
}
