//! Hardy and conjugate Hardy quotients on the half-line and on groups.
//!
//! On the grid, `u` is taken to vanish outside `[r_min, r_max]`. The outer
//! integral of `F(x) = ∫₀^x u` still has the exact tail
//! `F(r_max)^q ∫_{r_max}^∞ x^β dx` (and symmetrically below `r_min` for the
//! conjugate operator); it is added in closed form and reported as
//! `output_tail`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::constants::{
    admissible_conjugate_group, admissible_hardy_group, hardy_violation, sharp_constant_1d,
    sharp_constant_conjugate_1d, sharp_constant_conjugate_group, sharp_constant_group, HardyParams,
    ADMISSIBILITY_TOL,
};
use crate::error::{Error, Result};
use crate::geometry::{Geometry, SphereMeasure};
use crate::parallel::{Moments, MonteCarlo};
use crate::quadrature::{cumulative_integral, tail_integral, weighted_lq_norm, RadialFunction};
use crate::report::VerificationReport;

/// Relative half-width of the annulus used by [`holder_sphere_check`].
pub const ANNULUS_EPS: f64 = 1e-2;
/// Inner acceptance rate below which nested Monte Carlo warns.
pub const MIN_ACCEPTANCE: f64 = 1e-3;

const STREAM_RHS: u32 = 10;
const STREAM_LHS: u32 = 11;
const STREAM_MASS: u32 = 12;
const STREAM_ANNULUS: u32 = 13;

/// `lhs / rhs` together with the constant it is compared against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioResult {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub constant: f64,
    /// `constant - ratio`; negative means the inequality failed.
    pub margin: f64,
    /// Standard error of `ratio` (Monte Carlo paths only).
    pub ratio_stderr: Option<f64>,
    /// Share of `lhs^q` contributed by the closed-form outer tail.
    pub output_tail: f64,
    pub notes: Vec<String>,
}

impl RatioResult {
    fn new(lhs: f64, rhs: f64, constant: f64) -> Result<Self> {
        let ratio = if rhs > 0.0 {
            lhs / rhs
        } else if lhs == 0.0 {
            0.0
        } else {
            return Err(Error::Degenerate(format!(
                "right-hand side vanishes while left-hand side is {lhs}"
            )));
        };
        Ok(Self {
            lhs,
            rhs,
            ratio,
            constant,
            margin: constant - ratio,
            ratio_stderr: None,
            output_tail: 0.0,
            notes: Vec::new(),
        })
    }

    /// `ratio / constant`.
    pub fn attainment(&self) -> f64 {
        self.ratio / self.constant
    }

    /// `ratio <= constant · (1 + rel_tol)`.
    pub fn within(&self, rel_tol: f64) -> bool {
        self.ratio <= self.constant * (1.0 + rel_tol)
    }

    /// Monte Carlo acceptance rule: `ratio <= constant · (1 + 3·stderr/ratio)`.
    pub fn within_stderr(&self) -> bool {
        let rel = match self.ratio_stderr {
            Some(se) if self.ratio > 0.0 => se / self.ratio,
            _ => 0.0,
        };
        self.within(3.0 * rel)
    }
}

fn check_1d(params: &HardyParams, conjugate: bool) -> Result<()> {
    match hardy_violation(params, 1.0, conjugate) {
        Some(v) => Err(Error::Inadmissible(v)),
        None => Ok(()),
    }
}

/// `∫ F^q x^β` over the grid plus the closed-form outer tail, for the
/// running integral `F` of `u`; returns `(total, tail)`.
fn outer_integral(f: &RadialFunction, beta: f64, q: f64, conjugate: bool) -> Result<(f64, f64)> {
    let body = weighted_lq_norm(f, beta, q)?.powf(q);
    let tail = if conjugate {
        // x < r_min: F ≡ F(r_min), ∫₀^{r_min} x^β dx with β + 1 > 0.
        let f0 = f.values[0].abs();
        if f0 == 0.0 {
            0.0
        } else {
            f0.powf(q) * f.grid.r_min().powf(beta + 1.0) / (beta + 1.0)
        }
    } else {
        // x > r_max: F ≡ F(r_max), ∫_{r_max}^∞ x^β dx with β + 1 < 0.
        let f1 = f.values[f.values.len() - 1].abs();
        if f1 == 0.0 {
            0.0
        } else {
            f1.powf(q) * f.grid.r_max().powf(beta + 1.0) / (-(beta + 1.0))
        }
    };
    let total = body + tail;
    if !total.is_finite() {
        return Err(Error::Numeric(format!(
            "outer integral diverges (weight x^{beta})"
        )));
    }
    Ok((total, if total > 0.0 { tail / total } else { 0.0 }))
}

fn flag_signed(mut r: RatioResult, u: &RadialFunction) -> RatioResult {
    if !u.is_nonnegative() {
        r.notes.push("input takes negative values; only nonnegative inputs are covered by the sharpness claims".into());
    }
    r
}

fn ratio_1d(u: &RadialFunction, params: &HardyParams, conjugate: bool) -> Result<RatioResult> {
    check_1d(params, conjugate)?;
    let HardyParams { p, q, alpha, beta } = *params;
    let constant = if conjugate {
        sharp_constant_conjugate_1d(p, q, alpha)?
    } else {
        sharp_constant_1d(p, q, alpha)?
    };
    let f = if conjugate {
        tail_integral(u)
    } else {
        cumulative_integral(u)
    };
    let (lhs_q, tail) = outer_integral(&f, beta, q, conjugate)?;
    let rhs = weighted_lq_norm(u, alpha, p)?;
    let mut r = RatioResult::new(lhs_q.powf(1.0 / q), rhs, constant)?;
    r.output_tail = tail;
    Ok(flag_signed(r, u))
}

/// `‖∫₀^x u‖_{L^q(x^β)} / ‖u‖_{L^p(x^α)}` against `D_{p,q,α}`.
pub fn hardy_ratio_1d(u: &RadialFunction, params: &HardyParams) -> Result<RatioResult> {
    ratio_1d(u, params, false)
}

/// `‖∫_x^∞ u‖_{L^q(x^{β₀})} / ‖u‖_{L^p(x^{α₀})}`; `params.alpha` and
/// `params.beta` hold `α₀` and `β₀`.
pub fn conjugate_ratio_1d(u: &RadialFunction, params: &HardyParams) -> Result<RatioResult> {
    ratio_1d(u, params, true)
}

fn ratio_group(
    g: &RadialFunction,
    params: &HardyParams,
    q_dim: f64,
    sphere: f64,
    conjugate: bool,
) -> Result<RatioResult> {
    let ok = if conjugate {
        admissible_conjugate_group(params, q_dim, ADMISSIBILITY_TOL)
    } else {
        admissible_hardy_group(params, q_dim, ADMISSIBILITY_TOL)
    };
    if !ok {
        return Err(Error::Inadmissible(
            hardy_violation(params, q_dim, conjugate).unwrap_or_default(),
        ));
    }
    let HardyParams { p, q, alpha, beta } = *params;
    let constant = if conjugate {
        sharp_constant_conjugate_group(p, q, q_dim, alpha, sphere)?
    } else {
        sharp_constant_group(p, q, q_dim, alpha, sphere)?
    };
    // The ball integral of u(x) = g(|x|) is |𝔖| ∫₀^r g(t) t^{Q-1} dt.
    let h = g.times_power(q_dim - 1.0);
    let f = if conjugate {
        tail_integral(&h)
    } else {
        cumulative_integral(&h)
    };
    let (lhs_q, tail) = outer_integral(&f, beta + q_dim - 1.0, q, conjugate)?;
    let lhs = sphere * (sphere * lhs_q).powf(1.0 / q);
    let rhs = (sphere * weighted_lq_norm(g, alpha + q_dim - 1.0, p)?.powf(p)).powf(1.0 / p);
    let mut r = RatioResult::new(lhs, rhs, constant)?;
    r.output_tail = tail;
    Ok(flag_signed(r, g))
}

/// Group Hardy quotient for `u(x) = g(|x|)`, via polar coordinates.
pub fn group_ratio_radial(
    g: &RadialFunction,
    params: &HardyParams,
    q_dim: f64,
    sphere: f64,
) -> Result<RatioResult> {
    ratio_group(g, params, q_dim, sphere, false)
}

/// Group conjugate Hardy quotient for `u(x) = g(|x|)`.
pub fn group_conjugate_ratio_radial(
    g: &RadialFunction,
    params: &HardyParams,
    q_dim: f64,
    sphere: f64,
) -> Result<RatioResult> {
    ratio_group(g, params, q_dim, sphere, true)
}

/// A function on the group, evaluated at a coordinate vector.
pub type GroupFn<'a> = &'a (dyn Fn(&[f64]) -> f64 + Sync);

/// Nested Monte Carlo estimate of the group Hardy quotient.
///
/// `u` must vanish outside the quasi-ball `B(0, support_radius)`. The ball
/// integral `I(|x|) = ∫_{B(0,|x|)} u` is estimated per outer sample from
/// `⌈√samples⌉` points of the dilated bounding box, and `I^q` is corrected
/// for its second-order bias. For `|x| >= support_radius` the ball integral
/// is the total mass and that part of the outer integral is done in closed
/// form with `|𝔖|`.
pub fn group_ratio_montecarlo(
    u: GroupFn<'_>,
    support_radius: f64,
    params: &HardyParams,
    geometry: &Geometry,
    sphere: &SphereMeasure,
    mc: &MonteCarlo,
) -> Result<RatioResult> {
    let q_dim = geometry.q();
    if !admissible_hardy_group(params, q_dim, ADMISSIBILITY_TOL) {
        return Err(Error::Inadmissible(
            hardy_violation(params, q_dim, false).unwrap_or_default(),
        ));
    }
    if !(support_radius.is_finite() && support_radius > 0.0) {
        return Err(Error::InvalidInput(format!(
            "support radius must be positive, got {support_radius}"
        )));
    }
    if mc.samples == 0 {
        return Err(Error::InvalidInput(
            "Monte Carlo needs at least one sample".into(),
        ));
    }
    let HardyParams { p, q, alpha, beta } = *params;
    let constant = sharp_constant_group(p, q, q_dim, alpha, sphere.value)?;
    let n = geometry.dim();
    let r_u = support_radius;
    let outer_half = geometry.box_half_widths(r_u);
    let outer_vol = geometry.box_volume(r_u);
    let inner = (mc.samples as f64).sqrt().ceil() as usize;

    // RHS^p = ∫ |u|^p |x|^α.
    let parts = mc.run(STREAM_RHS, |rng, count| {
        let mut x = vec![0.0; n];
        let mut m = Moments::default();
        for _ in 0..count {
            geometry.sample_box(rng, &outer_half, &mut x);
            let r = geometry.norm(&x);
            let v = if r < r_u && r > 0.0 {
                u(&x).abs().powf(p) * r.powf(alpha)
            } else {
                0.0
            };
            m.push(v);
        }
        m
    });
    let m = Moments::merged(&parts);
    let (rhs_p, rhs_p_se) = (outer_vol * m.mean, outer_vol * m.stderr());

    // Total mass M = ∫ u.
    let parts = mc.run(STREAM_MASS, |rng, count| {
        let mut x = vec![0.0; n];
        let mut m = Moments::default();
        for _ in 0..count {
            geometry.sample_box(rng, &outer_half, &mut x);
            let v = if geometry.norm(&x) < r_u { u(&x) } else { 0.0 };
            m.push(v);
        }
        m
    });
    let m = Moments::merged(&parts);
    let (mass, mass_se) = (outer_vol * m.mean, outer_vol * m.stderr());

    // ∫_{|x|<R} I(|x|)^q |x|^β by nested sampling.
    let parts = mc.run(STREAM_LHS, |rng, count| {
        let mut x = vec![0.0; n];
        let mut y = vec![0.0; n];
        let mut half = vec![0.0; n];
        let mut m = Moments::default();
        let (mut accepted, mut drawn) = (0u64, 0u64);
        for _ in 0..count {
            geometry.sample_box(rng, &outer_half, &mut x);
            let r = geometry.norm(&x);
            if !(r < r_u && r > 0.0) {
                m.push(0.0);
                continue;
            }
            for (h, v) in half.iter_mut().zip(geometry.group.exponents()) {
                *h = geometry.norm.bounding_radius * r.powf(*v);
            }
            let vol = geometry.box_volume(r);
            let mut inner_m = Moments::default();
            for _ in 0..inner {
                for (yi, h) in y.iter_mut().zip(&half) {
                    *yi = h * (2.0 * rng.random::<f64>() - 1.0);
                }
                drawn += 1;
                let v = if geometry.norm(&y) < r {
                    accepted += 1;
                    u(&y)
                } else {
                    0.0
                };
                inner_m.push(v);
            }
            let est = vol * inner_m.mean;
            let var = vol * vol * inner_m.variance() / inner as f64;
            let est_q = power_debiased(est, var, q);
            m.push(outer_vol * est_q * r.powf(beta));
        }
        (m, accepted, drawn)
    });
    let m = Moments::merged(parts.iter().map(|(m, _, _)| m));
    let accepted: u64 = parts.iter().map(|p| p.1).sum();
    let drawn: u64 = parts.iter().map(|p| p.2).sum();
    let (inside, inside_se) = (m.mean, m.stderr());

    // |x| >= R: I = M, ∫_{|x|>=R} |x|^β = |𝔖| R^{β+Q} / -(β+Q).
    let shell = r_u.powf(beta + q_dim) / (-(beta + q_dim));
    let mass_q = power_debiased(mass, mass_se * mass_se, q);
    let outside = mass_q * sphere.value * shell;
    let outside_rel = ((q * mass_se / mass.abs().max(f64::MIN_POSITIVE)).powi(2)
        + sphere.relative_stderr().powi(2))
    .sqrt();
    let lhs_q = inside + outside;
    let lhs_q_se = (inside_se.powi(2) + (outside * outside_rel).powi(2)).sqrt();

    let lhs = lhs_q.max(0.0).powf(1.0 / q);
    let rhs = rhs_p.max(0.0).powf(1.0 / p);
    let mut r = RatioResult::new(lhs, rhs, constant)?;
    let rel_l = if lhs_q > 0.0 {
        lhs_q_se / (q * lhs_q)
    } else {
        0.0
    };
    let rel_r = if rhs_p > 0.0 {
        rhs_p_se / (p * rhs_p)
    } else {
        0.0
    };
    r.ratio_stderr = Some(r.ratio * (rel_l * rel_l + rel_r * rel_r).sqrt());
    r.output_tail = if lhs_q > 0.0 { outside / lhs_q } else { 0.0 };
    if drawn > 0 {
        let rate = accepted as f64 / drawn as f64;
        if rate < MIN_ACCEPTANCE {
            r.notes.push(format!(
                "inner acceptance rate {rate:.2e} is below {MIN_ACCEPTANCE:e}; ball integrals are poorly resolved"
            ));
        }
    }
    Ok(r)
}

/// `x^q` estimated from an unbiased `x̂` with variance `var`:
/// `x̂^q - q(q-1)/2 · x̂^{q-2} · var`.
fn power_debiased(est: f64, var: f64, q: f64) -> f64 {
    if est <= 0.0 {
        return est.max(0.0).powf(q);
    }
    let v = est.powf(q) - 0.5 * q * (q - 1.0) * est.powf(q - 2.0) * var;
    v.max(0.0)
}

/// Outcome of [`holder_sphere_check`], normalised by `|𝔖|^p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderOutcome {
    /// `(⨍_𝔖 u(ρσ) dσ)^p`
    pub lhs: f64,
    /// `⨍_𝔖 |u(ρσ)|^p dσ`
    pub rhs: f64,
    /// `rhs - lhs`
    pub gap: f64,
    pub stderr: f64,
    /// `|gap|` is within three standard errors.
    pub equality: bool,
    /// `gap` exceeds three standard errors.
    pub strict: bool,
    pub report: VerificationReport,
}

/// Monte Carlo check of `(∫_𝔖 u(ρσ) dσ)^p <= |𝔖|^{p-1} ∫_𝔖 |u(ρσ)|^p dσ`.
///
/// Points are drawn uniformly in the annulus `ρ(1-ε) <= |x| <= ρ(1+ε)` and
/// pushed radially onto `|x| = ρ`. By the polar decomposition the projected
/// points are distributed as the normalised surface measure.
pub fn holder_sphere_check(
    u: GroupFn<'_>,
    rho: f64,
    p: f64,
    geometry: &Geometry,
    mc: &MonteCarlo,
) -> Result<HolderOutcome> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::InvalidInput(format!(
            "radius must be positive, got {rho}"
        )));
    }
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::InvalidInput(format!(
            "Hölder exponent must be >= 1, got {p}"
        )));
    }
    let n = geometry.dim();
    let (lo, hi) = (rho * (1.0 - ANNULUS_EPS), rho * (1.0 + ANNULUS_EPS));
    let half = geometry.box_half_widths(hi);
    let parts = mc.run(STREAM_ANNULUS, |rng, count| {
        let mut x = vec![0.0; n];
        let mut y = vec![0.0; n];
        let mut values = Vec::new();
        for _ in 0..count {
            geometry.sample_box(rng, &half, &mut x);
            let r = geometry.norm(&x);
            if r >= lo && r <= hi {
                geometry.dilate_into(&x, rho / r, &mut y);
                values.push(u(&y));
            }
        }
        values
    });
    let values: Vec<f64> = parts.into_iter().flatten().collect();
    if values.is_empty() {
        return Err(Error::Sampling(format!(
            "no samples landed in the annulus around radius {rho}"
        )));
    }
    let mut m1 = Moments::default();
    let mut mp = Moments::default();
    for &v in &values {
        m1.push(v);
        mp.push(v.abs().powf(p));
    }
    let lhs = m1.mean.abs().powf(p);
    let rhs = mp.mean;
    // Delta method for rhs - lhs with influence |u|^p - p·m^{p-1}·u.
    let slope = p * m1.mean.abs().powf(p - 1.0) * m1.mean.signum();
    let mut infl = Moments::default();
    for &v in &values {
        infl.push(v.abs().powf(p) - slope * v);
    }
    let stderr = infl.stderr();
    let gap = rhs - lhs;
    let slack = 3.0 * stderr + 1e-12 * rhs.abs();
    let equality = gap.abs() <= slack;
    let strict = gap > slack;
    let report = VerificationReport::new(
        format!("holder_sphere[rho={rho}, p={p}]"),
        gap >= -slack,
        rhs,
    )
    .with_reference(lhs)
    .with_stderr(stderr)
    .with_tolerance(slack)
    .with_seed(mc.seed)
    .note(format!("{} annulus samples", values.len()));
    Ok(HolderOutcome {
        lhs,
        rhs,
        gap,
        stderr,
        equality,
        strict,
        report,
    })
}
