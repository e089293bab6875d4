//! Characteristic-function inversion for distributions supported on
//! [0, inf): pointwise CDF recovery, mixture (conditional) CDFs and
//! quantiles.
//!
//! The CDF is recovered from
//!
//! ```text
//! F(w) = 1/2 - (1/pi) int_0^inf Im(e^{-i t w} phi(t)) / t dt
//! ```
//!
//! summed over panels of width ~pi/w, so that the e^{-itw} rotation
//! alternates the panel signs and iterated averaging of the partial sums
//! converges geometrically; structure of phi itself inside a panel is
//! absorbed by adaptive quadrature. When phi does not decay (point
//! masses), the tail oscillates at the offset frequency |x0 - w| instead
//! of w; a second phase estimates the atom location x0 from the phase
//! increment of phi at large t and resumes with matched panels. If
//! several point masses beat against each other and no single panel
//! width fits, a final phase inverts the Gaussian-damped transform
//! phi(t) exp(-sigma^2 t^2 / 2) - the CDF of the variable plus N(0,
//! sigma^2) noise - and Richardson-extrapolates sigma -> 0, halving
//! sigma until the extrapolant stabilizes below the tolerance.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{NumericalError, NumericalResult};
use crate::params::QuadratureSpec;
use crate::quad::integrate;

/// Repeated pairwise means of a short partial-sum window; the discrete
/// analogue of the Euler transform for oscillating sequences.
fn iterated_mean(window: &[f64]) -> f64 {
    let mut v = window.to_vec();
    while v.len() > 1 {
        for i in 0..v.len() - 1 {
            v[i] = 0.5 * (v[i] + v[i + 1]);
        }
        v.pop();
    }
    v[0]
}

/// Estimates the dominant tail frequency of `cf` (the location of a point
/// mass) from the mean phase increment over a short probe ladder at `t0`.
fn estimate_atom_frequency<F>(cf: &F, t0: f64, delta: f64) -> f64
where
    F: Fn(f64) -> Complex64,
{
    const PROBES: usize = 16;
    let mut prev = cf(t0);
    let mut acc = 0.0;
    for j in 1..=PROBES {
        let cur = cf(t0 + j as f64 * delta);
        if prev.norm() > 0.0 && cur.norm() > 0.0 {
            acc += (cur / prev).arg();
        }
        prev = cur;
    }
    acc / (PROBES as f64 * delta)
}

struct PhaseOutcome {
    value: f64,
    converged: bool,
    t_end: f64,
    sum: f64,
}

/// Sums panels of width `h` starting at `t_start`, extrapolating the
/// partial sums until the extrapolation stabilizes below `tol`.
fn sum_phase<F>(
    cf: &F,
    w: f64,
    h: f64,
    t_start: f64,
    sum_start: f64,
    max_panels: usize,
    tol: f64,
    spec: &QuadratureSpec,
) -> NumericalResult<PhaseOutcome>
where
    F: Fn(f64) -> Complex64,
{
    let panel_spec = QuadratureSpec {
        rel_tol: 1e-9,
        abs_tol: (tol * 1e-3).max(1e-15),
        max_subdivisions: 400,
        ..*spec
    };
    const WINDOW: usize = 12;
    let mut sum = sum_start;
    let mut partials: Vec<f64> = Vec::new();
    let mut extrap_prev = f64::NAN;
    let mut stable_hits = 0usize;
    let mut tiny_hits = 0usize;
    let mut t = t_start;
    for _ in 0..max_panels {
        let g = |tt: f64| {
            let rot = Complex64::new(0.0, -tt * w).exp();
            Complex64::new((rot * cf(tt)).im / tt, 0.0)
        };
        let p = integrate(g, t, t + h, &panel_spec)?.re;
        sum += p;
        partials.push(sum);
        t += h;

        if p.abs() < tol * 1e-2 {
            tiny_hits += 1;
            // guard against beat-pattern nodes: the cf itself must be
            // spent before the remainder can be declared negligible
            if tiny_hits >= 3 && partials.len() >= 4 && cf(t).norm() * h / t < 0.1 * tol {
                return Ok(PhaseOutcome {
                    value: sum,
                    converged: true,
                    t_end: t,
                    sum,
                });
            }
        } else {
            tiny_hits = 0;
        }

        if partials.len() >= WINDOW {
            let extrap = iterated_mean(&partials[partials.len() - WINDOW..]);
            if extrap_prev.is_finite() {
                if (extrap - extrap_prev).abs() < tol {
                    stable_hits += 1;
                    if stable_hits >= 3 {
                        return Ok(PhaseOutcome {
                            value: extrap,
                            converged: true,
                            t_end: t,
                            sum,
                        });
                    }
                } else {
                    stable_hits = 0;
                }
            }
            extrap_prev = extrap;
        }
    }
    let value = if extrap_prev.is_finite() { extrap_prev } else { sum };
    Ok(PhaseOutcome {
        value,
        converged: false,
        t_end: t,
        sum,
    })
}

/// Gil-Pelaez value for the Gaussian-smoothed law (CF `phi(t)
/// exp(-sigma^2 t^2 / 2)`): the damping makes the integral absolutely
/// convergent, so plain panelwise quadrature up to the damping cutoff
/// suffices.
fn damped_value<F>(
    cf: &F,
    w: f64,
    sigma: f64,
    h: f64,
    tol: f64,
    spec: &QuadratureSpec,
) -> NumericalResult<f64>
where
    F: Fn(f64) -> Complex64,
{
    let panel_spec = QuadratureSpec {
        rel_tol: 1e-9,
        abs_tol: (tol * 1e-3).max(1e-15),
        max_subdivisions: 400,
        ..*spec
    };
    // exp(-7^2/2) ~ 2e-11: beyond this the damped tail is negligible
    let t_max = 7.0 / sigma;
    let mut sum = 0.0;
    let mut t = 0.0;
    while t < t_max {
        let g = |tt: f64| {
            let rot = Complex64::new(0.0, -tt * w).exp();
            let damp = (-0.5 * (sigma * tt) * (sigma * tt)).exp();
            Complex64::new((rot * cf(tt)).im * damp / tt, 0.0)
        };
        sum += integrate(g, t, t + h, &panel_spec)?.re;
        t += h;
    }
    Ok(0.5 - sum / PI)
}

/// Smoothed-inversion fallback: evaluates the damped value at `sigma_k =
/// sigma_0 / 2^k` and forms the Richardson pair `(4 G_{k+1} - G_k) / 3`,
/// which cancels the leading `sigma^2 F''(w) / 2` smoothing bias; accepts
/// once consecutive extrapolants agree within `tol`. At an atom the
/// smoothed value is the jump midpoint for every sigma, so the scheme
/// converges there too.
fn damped_cascade<F>(
    cf: &F,
    w: f64,
    ds: f64,
    h: f64,
    tol: f64,
    spec: &QuadratureSpec,
) -> NumericalResult<f64>
where
    F: Fn(f64) -> Complex64,
{
    const LEVELS: usize = 12;
    let mut sigma = 0.05 * ds.min(w.abs() + ds);
    let mut g_prev = damped_value(cf, w, sigma, h, tol, spec)?;
    let mut extrap_prev = f64::NAN;
    let mut last_delta = f64::INFINITY;
    for _ in 0..LEVELS {
        sigma *= 0.5;
        let g = damped_value(cf, w, sigma, h, tol, spec)?;
        let extrap = (4.0 * g - g_prev) / 3.0;
        if extrap_prev.is_finite() {
            last_delta = (extrap - extrap_prev).abs();
            if last_delta < tol {
                return Ok(extrap.clamp(0.0, 1.0));
            }
        }
        extrap_prev = extrap;
        g_prev = g;
    }
    Err(NumericalError::Oscillatory {
        achieved: last_delta,
        estimate: extrap_prev.clamp(0.0, 1.0),
    })
}

/// CDF at `w` of the distribution with characteristic function `cf`,
/// assumed supported on [0, inf). `decay_scale` sets the natural scale of
/// the random variable (its mean is a good choice). At a point mass the
/// recovered value is the midpoint of the jump.
pub fn cdf<F>(cf: F, w: f64, decay_scale: f64, spec: &QuadratureSpec) -> NumericalResult<f64>
where
    F: Fn(f64) -> Complex64,
{
    if w <= 0.0 {
        return Ok(0.0);
    }
    let ds = decay_scale.abs().max(f64::MIN_POSITIVE);
    // noise floor of the panel quadrature / averaging scheme
    let tol = spec.rel_tol.max(1e-7);
    // the small additive term keeps the panel count bounded for w far
    // into the lower tail without disturbing the sign alternation
    let h1 = PI / (w + 1e-3 * ds);

    let first = sum_phase(&cf, w, h1, 0.0, 0.0, 192, tol, spec)?;
    let mut best = first.value;
    let mut converged = first.converged;

    if !converged {
        // phi has a non-decaying component: locate it and resume with
        // panels matched to the offset frequency |x0 - w|
        let delta = 0.01 / ds;
        let x0 = estimate_atom_frequency(&cf, first.t_end, delta);
        let omega = (x0 - w).abs();
        let h2 = if omega > 0.0 {
            (PI / omega).clamp(1e-3 * h1, 1e4 * h1)
        } else {
            h1
        };
        let second = sum_phase(&cf, w, h2, first.t_end, first.sum, 512, tol, spec)?;
        best = second.value;
        converged = second.converged;
    }

    if !converged {
        // several non-decaying components beating against each other:
        // fall back to smoothed inversion
        return damped_cascade(&cf, w, ds, h1, tol, spec);
    }

    Ok((0.5 - best / PI).clamp(0.0, 1.0))
}

/// CDF of a mixture: the conditional characteristic function
/// `cf(t, x)` is averaged over the fixed mixing nodes `(x, weight)`
/// before inversion. The node weights must sum to one.
pub fn cdf_conditioned<F>(
    cf: F,
    nodes: &[(f64, f64)],
    w: f64,
    decay_scale: f64,
    spec: &QuadratureSpec,
) -> NumericalResult<f64>
where
    F: Fn(f64, f64) -> Complex64,
{
    cdf(
        |t| {
            nodes
                .iter()
                .map(|&(x, wt)| cf(t, x) * wt)
                .sum::<Complex64>()
        },
        w,
        decay_scale,
        spec,
    )
}

/// Quantile by bracketing and bisection of a (typically inverted) CDF.
/// `guess` seeds the geometric bracket expansion.
pub fn quantile<F>(cdf_at: F, q: f64, guess: f64) -> NumericalResult<f64>
where
    F: Fn(f64) -> NumericalResult<f64>,
{
    if !(q > 0.0 && q < 1.0) {
        return Err(NumericalError::Domain(format!(
            "quantile level must lie in (0, 1), got {q}"
        )));
    }
    let seed = if guess.is_finite() && guess > 0.0 {
        guess
    } else {
        1.0
    };
    let mut lo = seed;
    let mut flo = cdf_at(lo)?;
    let mut expansions = 0;
    while flo > q {
        lo /= 4.0;
        flo = cdf_at(lo)?;
        expansions += 1;
        if expansions > 60 {
            return Err(NumericalError::Bracket { lo, hi: seed, q });
        }
    }
    let mut hi = seed.max(lo * 4.0);
    let mut fhi = cdf_at(hi)?;
    expansions = 0;
    while fhi < q {
        hi *= 4.0;
        fhi = cdf_at(hi)?;
        expansions += 1;
        if expansions > 60 {
            return Err(NumericalError::Bracket { lo, hi, q });
        }
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo) < 1e-7 * mid {
            break;
        }
        let fm = cdf_at(mid)?;
        if fm < q {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
