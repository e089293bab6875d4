//! Samplers and exact distance distributions for the spatial models:
//! PPP on a disc, Matern cluster process (with Palm conditioning),
//! independent thinning, and the link-distance PDFs used by the theorems.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{NumericalError, NumericalResult};

/// A planar point pattern on a disc window centered at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    pub points: Vec<[f64; 2]>,
    pub window_radius: f64,
}

impl PointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// A clustered pattern: parent centers plus per-center offspring.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusteredPointSet {
    pub centers: PointSet,
    /// Offspring coordinates per center (absolute, not relative).
    pub offspring: Vec<Vec<[f64; 2]>>,
    /// Index of the cluster conditioned to cover the origin, if Palm
    /// conditioning was requested.
    pub palm_cluster_index: Option<usize>,
}

impl ClusteredPointSet {
    pub fn total_users(&self) -> usize {
        self.offspring.iter().map(|o| o.len()).sum()
    }

    pub fn iter_users(&self) -> impl Iterator<Item = (usize, [f64; 2])> + '_ {
        self.offspring
            .iter()
            .enumerate()
            .flat_map(|(i, pts)| pts.iter().map(move |&p| (i, p)))
    }
}

pub(crate) fn uniform_in_disc<R: Rng + ?Sized>(
    center: [f64; 2],
    radius: f64,
    rng: &mut R,
) -> [f64; 2] {
    let r = radius * rng.gen::<f64>().sqrt();
    let theta = 2.0 * PI * rng.gen::<f64>();
    [center[0] + r * theta.cos(), center[1] + r * theta.sin()]
}

pub(crate) fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("positive mean").sample(rng) as usize
}

/// Samples a homogeneous PPP of the given density on the disc window.
pub fn sample_ppp<R: Rng + ?Sized>(density: f64, window_radius: f64, rng: &mut R) -> PointSet {
    let mean = density * PI * window_radius * window_radius;
    let n = poisson_count(mean, rng);
    let points = (0..n)
        .map(|_| uniform_in_disc([0.0, 0.0], window_radius, rng))
        .collect();
    PointSet {
        points,
        window_radius,
    }
}

/// Samples a Matern cluster process: parents PPP(`lambda_c`), offspring
/// counts Poisson(`lambda_cu` pi r_c^2) uniform in the disc around each
/// parent. When `palm` is set, one extra cluster is added whose center is
/// uniform in B(origin, r_c), realizing the Palm version conditioned on
/// the observer's cluster covering the origin.
pub fn sample_mcp<R: Rng + ?Sized>(
    lambda_c: f64,
    lambda_cu: f64,
    r_c: f64,
    window_radius: f64,
    rng: &mut R,
    palm: bool,
) -> ClusteredPointSet {
    let mut centers = sample_ppp(lambda_c, window_radius, rng);
    let mut palm_cluster_index = None;
    if palm {
        palm_cluster_index = Some(centers.points.len());
        centers.points.push(uniform_in_disc([0.0, 0.0], r_c, rng));
    }
    let mean_offspring = lambda_cu * PI * r_c * r_c;
    let offspring = centers
        .points
        .iter()
        .map(|&c| {
            let n = poisson_count(mean_offspring, rng);
            (0..n).map(|_| uniform_in_disc(c, r_c, rng)).collect()
        })
        .collect();
    ClusteredPointSet {
        centers,
        offspring,
        palm_cluster_index,
    }
}

/// Independent thinning: each point kept with probability `p_a`.
pub fn thin<R: Rng + ?Sized>(points: &PointSet, p_a: f64, rng: &mut R) -> PointSet {
    let kept = points
        .points
        .iter()
        .filter(|_| rng.gen::<f64>() < p_a)
        .copied()
        .collect();
    PointSet {
        points: kept,
        window_radius: points.window_radius,
    }
}

/// PDF of the PPP contact distance: `2 pi lambda r exp(-pi lambda r^2)`.
pub fn contact_distance_pdf(r: f64, lambda: f64) -> f64 {
    if r < 0.0 {
        return 0.0;
    }
    2.0 * PI * lambda * r * (-PI * lambda * r * r).exp()
}

/// Conditional distance from the observer to a point uniform in the disc
/// B(c, r_c), given |c| = r1.
pub fn conditional_cluster_distance_pdf(r2: f64, r1: f64, r_c: f64) -> f64 {
    if r2 <= 0.0 {
        return 0.0;
    }
    if r1 < r_c {
        if r2 <= r_c - r1 {
            return 2.0 * r2 / (r_c * r_c);
        }
        if r2 <= r_c + r1 {
            let cosv = (r2 * r2 + r1 * r1 - r_c * r_c) / (2.0 * r2 * r1);
            return 2.0 * r2 / (PI * r_c * r_c) * cosv.clamp(-1.0, 1.0).acos();
        }
        return 0.0;
    }
    if r2 >= r1 - r_c && r2 <= r1 + r_c {
        let cosv = (r2 * r2 + r1 * r1 - r_c * r_c) / (2.0 * r2 * r1);
        return 2.0 * r2 / (PI * r_c * r_c) * cosv.clamp(-1.0, 1.0).acos();
    }
    0.0
}

/// Truncated-Rayleigh link distance of an interfering uplink user given
/// its distance `d` to the tagged BS.
pub fn interferer_link_distance_pdf(r: f64, d: f64, lambda_b: f64) -> NumericalResult<f64> {
    if d <= 0.0 {
        return Err(NumericalError::Domain(
            "interferer distance bound D must be positive".into(),
        ));
    }
    if r < 0.0 || r > d {
        return Ok(0.0);
    }
    let norm = 1.0 - (-lambda_b * PI * d * d).exp();
    Ok(2.0 * PI * lambda_b * r * (-lambda_b * PI * r * r).exp() / norm)
}
