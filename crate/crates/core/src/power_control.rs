//! Truncated path-loss-inversion uplink power control: the pointwise law,
//! the mixed transmit-power distribution, and the two mean powers used
//! throughout the analysis.

use std::f64::consts::PI;

use crate::params::{CutoffRadius, NetworkParams, QuadratureSpec};
use crate::point_process::contact_distance_pdf;
use crate::quad::{integrate_real, integrate_real_to_inf};

/// Transmit power at serving distance `r`: `min(p_max, rho_u r^(alpha eta))`.
pub fn tx_power(r: f64, params: &NetworkParams) -> f64 {
    if params.eta == 0.0 {
        return params.rho_u;
    }
    (params.rho_u * r.powf(params.alpha * params.eta)).min(params.p_max)
}

/// Mixed distribution of the transmit power under PPP association:
/// a continuous density on (rho_u, p_max) plus an atom at p_max.
pub struct TxPowerDistribution<'a> {
    params: &'a NetworkParams,
}

impl<'a> TxPowerDistribution<'a> {
    pub fn new(params: &'a NetworkParams) -> Self {
        TxPowerDistribution { params }
    }

    /// Probability mass of the atom at `p_max`:
    /// `exp(-pi lambda_b (p_max/rho_u)^(2/(alpha eta)))`.
    pub fn atom_at_pmax(&self) -> f64 {
        let p = self.params;
        match p.cutoff_radius() {
            CutoffRadius::Infinite => 0.0,
            CutoffRadius::Finite(r0) => (-PI * p.lambda_b * r0 * r0).exp(),
        }
    }

    /// Continuous density on (0, p_max); the mass below `rho_u` comes from
    /// serving distances shorter than the 1 m reference distance.
    pub fn continuous_density(&self, power: f64) -> f64 {
        let p = self.params;
        if p.eta == 0.0 || power <= 0.0 || power >= p.p_max {
            return 0.0;
        }
        let ae = p.alpha * p.eta;
        let ratio = (power / p.rho_u).powf(2.0 / ae);
        2.0 * PI * p.lambda_b / (ae * power) * ratio * (-PI * p.lambda_b * ratio).exp()
    }

    /// Expectation of `g` over the mixed law, evaluated through the
    /// serving-distance representation `p = tx_power(R_u)`.
    pub fn expect<F>(&self, g: F, spec: &QuadratureSpec) -> f64
    where
        F: Fn(f64) -> f64,
    {
        let p = self.params;
        integrate_real_to_inf(
            |r| g(tx_power(r, p)) * contact_distance_pdf(r, p.lambda_b),
            0.0,
            spec,
        )
        .expect("smooth contact-distance expectation")
    }
}

pub fn tx_power_pdf(params: &NetworkParams) -> TxPowerDistribution<'_> {
    TxPowerDistribution::new(params)
}

/// Mean uplink transmit power under PPP association,
/// `int_0^inf min(p_max, rho_u r^(alpha eta)) f_Ru(r) dr`.
pub fn mean_tx_power_ppp(params: &NetworkParams, spec: &QuadratureSpec) -> f64 {
    if params.eta == 0.0 {
        return params.rho_u;
    }
    TxPowerDistribution::new(params).expect(|p| p, spec)
}

/// Mean transmit power of a cluster user served by its cluster-center BS,
/// `int_0^{r_c} min(p_max, rho_u z^(alpha eta)) (2z/r_c^2) dz`.
pub fn mean_tx_power_cluster(params: &NetworkParams, spec: &QuadratureSpec) -> f64 {
    if params.eta == 0.0 {
        return params.rho_u;
    }
    let rc = params.r_c;
    integrate_real(|z| tx_power(z, params) * 2.0 * z / (rc * rc), 0.0, rc, spec)
        .expect("smooth cluster power integral")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::NetworkParams;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn defaults() -> NetworkParams {
        NetworkParams::default()
    }

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn pointwise_law() {
        let p = defaults();
        assert!((tx_power(1.0, &p) - 8e-6).abs() < 1e-18);
        // r = 1000 m: unclamped 8e-6 * 1000^1.6 ~ 0.505 W, clamped to 0.2
        assert_eq!(tx_power(1000.0, &p), 0.2);
        let r0 = match p.cutoff_radius() {
            crate::params::CutoffRadius::Finite(r0) => r0,
            _ => unreachable!(),
        };
        assert!((tx_power(r0, &p) - p.p_max).abs() < 1e-12);
        let mut flat = p.clone();
        flat.eta = 0.0;
        assert_eq!(tx_power(1e6, &flat), flat.rho_u);
    }

    #[test]
    fn tx_power_monotone_and_bounded() {
        let p = defaults();
        let mut prev = 0.0;
        for i in 0..400 {
            let r = i as f64 * 5.0;
            let v = tx_power(r, &p);
            assert!(v >= prev - 1e-18);
            assert!(v <= p.p_max);
            prev = v;
        }
    }

    #[test]
    fn distribution_total_mass_is_one() {
        let p = defaults();
        let d = tx_power_pdf(&p);
        let cont = integrate_real(|x| d.continuous_density(x), 0.0, p.p_max, &spec()).unwrap();
        let total = cont + d.atom_at_pmax();
        assert!((total - 1.0).abs() < 1e-8, "total = {total}");
    }

    #[test]
    fn atom_mass_reference_value() {
        let p = defaults();
        let d = tx_power_pdf(&p);
        // exp(-pi 1e-6 560.6^2) ~ 0.373
        assert!((d.atom_at_pmax() - 0.373).abs() < 0.001, "{}", d.atom_at_pmax());
    }

    #[test]
    fn histogram_of_powers_matches_density() {
        // chi-square of tx_power(contact samples) against the mixed law
        let p = defaults();
        let d = tx_power_pdf(&p);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 1_000_000usize;
        let bins = 30;
        let mut counts = vec![0usize; bins];
        let mut atom_count = 0usize;
        for _ in 0..n {
            // Rayleigh contact distance draw
            let u: f64 = rng.gen::<f64>();
            let r = (-u.ln() / (PI * p.lambda_b)).sqrt();
            let power = tx_power(r, &p);
            if power >= p.p_max {
                atom_count += 1;
            } else {
                let b = ((power - p.rho_u) / (p.p_max - p.rho_u) * bins as f64) as usize;
                counts[b.min(bins - 1)] += 1;
            }
        }
        let atom_expect = d.atom_at_pmax() * n as f64;
        let mut chi2 = (atom_count as f64 - atom_expect).powi(2) / atom_expect;
        let mut dof = 1usize;
        for (b, &c) in counts.iter().enumerate() {
            let lo = p.rho_u + (p.p_max - p.rho_u) * b as f64 / bins as f64;
            let hi = p.rho_u + (p.p_max - p.rho_u) * (b + 1) as f64 / bins as f64;
            let prob = integrate_real(|x| d.continuous_density(x), lo, hi, &spec()).unwrap();
            let expect = prob * n as f64;
            if expect > 10.0 {
                chi2 += (c as f64 - expect).powi(2) / expect;
                dof += 1;
            }
        }
        assert!(chi2 < 2.0 * dof as f64 + 40.0, "chi2 = {chi2}, dof = {dof}");
    }

    #[test]
    fn mean_power_ppp_eta_zero() {
        let mut p = defaults();
        p.eta = 0.0;
        assert_eq!(mean_tx_power_ppp(&p, &spec()), p.rho_u);
    }

    #[test]
    fn mean_power_ppp_vs_mc() {
        let p = defaults();
        let analytic = mean_tx_power_ppp(&p, &spec());
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let n = 1_000_000usize;
        let mut sum = 0.0;
        for _ in 0..n {
            let u: f64 = rng.gen::<f64>();
            let r = (-u.ln() / (PI * p.lambda_b)).sqrt();
            sum += tx_power(r, &p);
        }
        let mc = sum / n as f64;
        assert!((analytic - mc).abs() / mc < 0.005, "analytic {analytic} mc {mc}");
    }

    #[test]
    fn mean_power_ppp_unclamped_matches_rayleigh_moment() {
        let mut p = defaults();
        p.p_max = 1e12; // effectively unbounded
        let analytic = mean_tx_power_ppp(&p, &spec());
        let ae = p.alpha * p.eta;
        // rho_u (pi lambda_b)^(-ae/2) Gamma(1 + ae/2)
        let closed = p.rho_u * (PI * p.lambda_b).powf(-ae / 2.0) * gamma(1.0 + ae / 2.0);
        assert!(
            (analytic - closed).abs() / closed < 1e-6,
            "analytic {analytic} closed {closed}"
        );
    }

    #[test]
    fn mean_power_ppp_nondecreasing_in_eta() {
        let mut prev = 0.0;
        for eta in [0.0, 0.2, 0.4, 0.6, 0.8, 1.0] {
            let mut p = defaults();
            p.eta = eta;
            let v = mean_tx_power_ppp(&p, &spec());
            assert!(v >= prev - 1e-12, "eta {eta}: {v} < {prev}");
            prev = v;
        }
    }

    #[test]
    fn mean_power_cluster_cases() {
        let mut p = defaults();
        p.eta = 0.0;
        assert_eq!(mean_tx_power_cluster(&p, &spec()), p.rho_u);

        // r_c below the cutoff: closed form rho_u (2/(ae+2)) r_c^ae
        let p = defaults();
        let ae = p.alpha * p.eta;
        let closed = p.rho_u * 2.0 / (ae + 2.0) * p.r_c.powf(ae);
        let v = mean_tx_power_cluster(&p, &spec());
        assert!((v - closed).abs() / closed < 1e-8);
        // 2 * 8e-6 * 100^1.6 / 3.6 ~ 7.04e-3 W
        assert!((v - 7.04e-3).abs() / 7.04e-3 < 0.01, "v = {v}");
    }

    // Lanczos gamma, test-only helper for the Rayleigh moment oracle.
    fn gamma(x: f64) -> f64 {
        const G: [f64; 9] = [
            0.99999999999980993,
            676.5203681218851,
            -1259.1392167224028,
            771.32342877765313,
            -176.61502916214059,
            12.507343278686905,
            -0.13857109526572012,
            9.9843695780195716e-6,
            1.5056327351493116e-7,
        ];
        if x < 0.5 {
            return PI / ((PI * x).sin() * gamma(1.0 - x));
        }
        let x = x - 1.0;
        let mut a = G[0];
        let t = x + 7.5;
        for (i, &g) in G.iter().enumerate().skip(1) {
            a += g / (x + i as f64);
        }
        (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
    }

    use std::f64::consts::PI;
}
