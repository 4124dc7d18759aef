//! Homogeneous groups with anisotropic dilations, their quasi-norms, and
//! Monte Carlo measures of quasi-balls and the unit quasi-sphere.
//!
//! Only three quasi-norms are supported: the isotropic Euclidean norm, the
//! anisotropic sup-norm `max_i |x_i|^{1/v_i}`, and the Korányi gauge
//! `((x₁²+x₂²)² + x₃²)^{1/4}` on the first Heisenberg group in exponential
//! coordinates. In all three cases the group inverse is `x ↦ -x`.
//!
//! The sphere measure `|𝔖|` is never computed by parametrising the sphere.
//! Applying the polar decomposition to the indicator of the unit ball gives
//! `|B(0,1)| = |𝔖| / Q`, so `|𝔖| = Q · |B(0,1)|`.

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::parallel::{Moments, MonteCarlo};
use crate::profile::Profile;
use crate::quadrature::integrate_pieces;
use crate::report::VerificationReport;

/// Minimum Monte Carlo budget for volume estimates.
pub const MIN_VOLUME_SAMPLES: usize = 10_000;
/// Default Monte Carlo budget.
pub const DEFAULT_SAMPLES: usize = 1_000_000;

// Random-stream tags, one per independent estimator.
const STREAM_BOX_FACES: u32 = 1;
const STREAM_BALL: u32 = 2;
const STREAM_POLAR: u32 = 3;

/// Dilation exponents `v₁..v_N` and the homogeneous dimension `Q = Σ v_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSpec {
    exponents: Vec<f64>,
    homogeneous_dimension: f64,
}

impl GroupSpec {
    pub fn new(exponents: Vec<f64>) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::InvalidInput(
                "a group needs at least one coordinate".into(),
            ));
        }
        if let Some(v) = exponents.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::InvalidInput(format!(
                "dilation exponents must be positive and finite, got {v}"
            )));
        }
        let homogeneous_dimension = exponents.iter().sum();
        Ok(Self {
            exponents,
            homogeneous_dimension,
        })
    }

    /// `ℝ^n` with isotropic dilations.
    pub fn euclidean(n: usize) -> Result<Self> {
        Self::new(vec![1.0; n])
    }

    /// First Heisenberg group, exponents `(1, 1, 2)`, `Q = 4`.
    pub fn heisenberg() -> Self {
        Self::new(vec![1.0, 1.0, 2.0]).expect("static exponents")
    }

    pub fn exponents(&self) -> &[f64] {
        &self.exponents
    }

    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    /// Homogeneous dimension `Q`.
    pub fn q(&self) -> f64 {
        self.homogeneous_dimension
    }

    pub fn is_isotropic(&self) -> bool {
        self.exponents.iter().all(|&v| v == 1.0)
    }

    fn is_heisenberg(&self) -> bool {
        self.exponents == [1.0, 1.0, 2.0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    EuclideanIsotropic,
    AnisotropicSup,
    KoranyiH1,
}

impl NormKind {
    pub fn label(&self) -> &'static str {
        match self {
            NormKind::EuclideanIsotropic => "euclid",
            NormKind::AnisotropicSup => "sup",
            NormKind::KoranyiH1 => "koranyi",
        }
    }
}

/// A quasi-norm together with a box half-width `b` such that the unit
/// quasi-ball lies in `[-b, b]^N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuasiNormSpec {
    pub kind: NormKind,
    pub bounding_radius: f64,
}

impl QuasiNormSpec {
    pub fn new(kind: NormKind) -> Self {
        Self {
            kind,
            bounding_radius: 1.0,
        }
    }

    pub fn euclidean() -> Self {
        Self::new(NormKind::EuclideanIsotropic)
    }

    pub fn sup() -> Self {
        Self::new(NormKind::AnisotropicSup)
    }

    pub fn koranyi() -> Self {
        Self::new(NormKind::KoranyiH1)
    }

    pub fn with_bounding_radius(mut self, b: f64) -> Self {
        self.bounding_radius = b;
        self
    }

    /// Checks that this norm is defined on `group`.
    pub fn check(&self, group: &GroupSpec) -> Result<()> {
        if !(self.bounding_radius.is_finite() && self.bounding_radius > 0.0) {
            return Err(Error::InvalidInput(format!(
                "bounding radius must be positive, got {}",
                self.bounding_radius
            )));
        }
        match self.kind {
            NormKind::EuclideanIsotropic if !group.is_isotropic() => Err(Error::IncompatibleSpec(
                format!(
                    "the Euclidean norm is homogeneous only for isotropic dilations, got exponents {:?}",
                    group.exponents()
                ),
            )),
            NormKind::KoranyiH1 if !group.is_heisenberg() => Err(Error::IncompatibleSpec(format!(
                "the Korányi norm needs exponents (1, 1, 2), got {:?}",
                group.exponents()
            ))),
            _ => Ok(()),
        }
    }
}

/// A validated (group, quasi-norm) pair. Evaluation skips the checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub group: GroupSpec,
    pub norm: QuasiNormSpec,
}

impl Geometry {
    pub fn new(group: GroupSpec, norm: QuasiNormSpec) -> Result<Self> {
        norm.check(&group)?;
        Ok(Self { group, norm })
    }

    pub fn dim(&self) -> usize {
        self.group.dim()
    }

    pub fn q(&self) -> f64 {
        self.group.q()
    }

    /// Quasi-norm of `x` (dimension assumed to match).
    pub fn norm(&self, x: &[f64]) -> f64 {
        match self.norm.kind {
            NormKind::EuclideanIsotropic => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            NormKind::AnisotropicSup => x
                .iter()
                .zip(self.group.exponents())
                .map(|(xi, v)| xi.abs().powf(1.0 / v))
                .fold(0.0, f64::max),
            NormKind::KoranyiH1 => {
                let h = x[0] * x[0] + x[1] * x[1];
                (h * h + x[2] * x[2]).sqrt().sqrt()
            }
        }
    }

    /// Half-widths of the box `δ_R([-b, b]^N)`, which contains `B(0, R)`.
    pub fn box_half_widths(&self, radius: f64) -> Vec<f64> {
        self.group
            .exponents()
            .iter()
            .map(|v| self.norm.bounding_radius * radius.powf(*v))
            .collect()
    }

    /// Lebesgue volume of `δ_R([-b, b]^N)`, i.e. `(2b)^N R^Q`.
    pub fn box_volume(&self, radius: f64) -> f64 {
        (2.0 * self.norm.bounding_radius).powi(self.dim() as i32) * radius.powf(self.q())
    }

    /// Uniform point in `δ_R([-b, b]^N)` written into `out`.
    pub fn sample_box<R: Rng + ?Sized>(&self, rng: &mut R, half_widths: &[f64], out: &mut [f64]) {
        for (o, h) in out.iter_mut().zip(half_widths) {
            *o = h * (2.0 * rng.random::<f64>() - 1.0);
        }
    }

    /// `δ_λ x` (no checks).
    pub fn dilate_into(&self, x: &[f64], lambda: f64, out: &mut [f64]) {
        for ((o, xi), v) in out.iter_mut().zip(x).zip(self.group.exponents()) {
            *o = lambda.powf(*v) * xi;
        }
    }
}

/// `|x|` for the given quasi-norm.
pub fn quasi_norm(point: &[f64], norm: &QuasiNormSpec, group: &GroupSpec) -> Result<f64> {
    if point.len() != group.dim() {
        return Err(Error::InvalidInput(format!(
            "point has dimension {}, group has dimension {}",
            point.len(),
            group.dim()
        )));
    }
    norm.check(group)?;
    let geometry = Geometry {
        group: group.clone(),
        norm: *norm,
    };
    Ok(geometry.norm(point))
}

/// `δ_λ(x) = (λ^{v₁}x₁, …, λ^{v_N}x_N)`.
pub fn dilate(point: &[f64], lambda: f64, group: &GroupSpec) -> Result<Vec<f64>> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidInput(format!(
            "dilation factor must be positive, got {lambda}"
        )));
    }
    if point.len() != group.dim() {
        return Err(Error::InvalidInput(format!(
            "point has dimension {}, group has dimension {}",
            point.len(),
            group.dim()
        )));
    }
    Ok(point
        .iter()
        .zip(group.exponents())
        .map(|(x, v)| lambda.powf(*v) * x)
        .collect())
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

/// Checks that the unit quasi-ball lies inside `[-b, b]^N`.
///
/// Dilation orbits are continuous paths from the origin, so if the ball left
/// the box some point of the box surface would have norm below one. The test
/// samples the faces of the box.
pub fn verify_bounding_box(geometry: &Geometry, mc: &MonteCarlo) -> Result<()> {
    let n = geometry.dim();
    let b = geometry.norm.bounding_radius;
    let probes = mc.with_samples(mc.samples.clamp(1, 1 << 16));
    let worst = probes.run(STREAM_BOX_FACES, |rng, count| {
        let mut x = vec![0.0; n];
        let mut worst: Option<(f64, Vec<f64>)> = None;
        for _ in 0..count {
            for xi in x.iter_mut() {
                *xi = b * (2.0 * rng.random::<f64>() - 1.0);
            }
            let face = rng.random_range(0..n);
            x[face] = if rng.random::<bool>() { b } else { -b };
            let r = geometry.norm(&x);
            if r < 1.0 - 1e-12 && worst.as_ref().is_none_or(|(w, _)| r < *w) {
                worst = Some((r, x.clone()));
            }
        }
        worst
    });
    if let Some((r, x)) = worst
        .into_iter()
        .flatten()
        .min_by(|a, b| a.0.total_cmp(&b.0))
    {
        return Err(Error::GeometryConfig(format!(
            "unit {} ball is not contained in [-{b}, {b}]^{n}: point {x:?} on the box surface has norm {r}",
            geometry.norm.kind.label()
        )));
    }
    Ok(())
}

fn unit_ball_volume(geometry: &Geometry, mc: &MonteCarlo) -> Result<Estimate> {
    if mc.samples < MIN_VOLUME_SAMPLES {
        return Err(Error::InvalidInput(format!(
            "volume estimates need at least {MIN_VOLUME_SAMPLES} samples, got {}",
            mc.samples
        )));
    }
    verify_bounding_box(geometry, mc)?;
    let half = geometry.box_half_widths(1.0);
    let parts = mc.run(STREAM_BALL, |rng, count| {
        let mut x = vec![0.0; geometry.dim()];
        let mut m = Moments::default();
        for _ in 0..count {
            geometry.sample_box(rng, &half, &mut x);
            m.push(if geometry.norm(&x) < 1.0 { 1.0 } else { 0.0 });
        }
        m
    });
    let m = Moments::merged(&parts);
    let vol = geometry.box_volume(1.0);
    Ok(Estimate {
        value: vol * m.mean,
        stderr: vol * m.stderr(),
    })
}

/// Lebesgue measure of `{x : |x| < R}`, estimated as `R^Q · |B(0,1)|`.
pub fn ball_volume(
    group: &GroupSpec,
    norm: &QuasiNormSpec,
    radius: f64,
    mc: &MonteCarlo,
) -> Result<Estimate> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidInput(format!(
            "ball radius must be positive, got {radius}"
        )));
    }
    let geometry = Geometry::new(group.clone(), *norm)?;
    let unit = unit_ball_volume(&geometry, mc)?;
    let scale = radius.powf(group.q());
    Ok(Estimate {
        value: unit.value * scale,
        stderr: unit.stderr * scale,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SphereMethod {
    Analytic,
    MonteCarlo,
    /// Fixed by convention, e.g. `|𝔖| = 1` for the half-line.
    Convention,
}

/// Total mass `|𝔖|` of the unit quasi-sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereMeasure {
    pub value: f64,
    pub stderr: f64,
    pub method: SphereMethod,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
}

impl SphereMeasure {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            stderr: 0.0,
            method: SphereMethod::Analytic,
            samples: None,
            seed: None,
        }
    }

    /// `|𝔖| = 1`: the half-line `(0, ∞)` as a one-dimensional "group".
    ///
    /// The full line with `|x| = abs` has the two-point sphere `{-1, 1}` and
    /// `|𝔖| = 2`; the classical half-line inequalities correspond to `|𝔖| = 1`.
    pub fn half_line() -> Self {
        Self {
            method: SphereMethod::Convention,
            ..Self::exact(1.0)
        }
    }

    pub fn relative_stderr(&self) -> f64 {
        self.stderr / self.value
    }
}

/// `|𝔖|` in closed form, when one is implemented: the isotropic Euclidean
/// case, `N π^{N/2} / Γ(N/2 + 1)`.
///
/// Evaluated by the recurrence `s(N) = 2π s(N-2) / (N-2)` from `s(1) = 2`,
/// `s(2) = 2π`, which is exact in low dimensions.
pub fn analytic_sphere_measure(group: &GroupSpec, norm: &QuasiNormSpec) -> Option<f64> {
    if norm.kind == NormKind::EuclideanIsotropic && group.is_isotropic() {
        let n = group.dim();
        let mut s = if n % 2 == 1 { 2.0 } else { 2.0 * PI };
        let mut k = 2 - n % 2;
        while k < n {
            s *= 2.0 * PI / k as f64;
            k += 2;
        }
        Some(s)
    } else {
        None
    }
}

/// `|𝔖| = Q · |B(0,1)|`, always by Monte Carlo.
pub fn sphere_measure_monte_carlo(
    group: &GroupSpec,
    norm: &QuasiNormSpec,
    mc: &MonteCarlo,
) -> Result<SphereMeasure> {
    let geometry = Geometry::new(group.clone(), *norm)?;
    let unit = unit_ball_volume(&geometry, mc)?;
    Ok(SphereMeasure {
        value: group.q() * unit.value,
        stderr: group.q() * unit.stderr,
        method: SphereMethod::MonteCarlo,
        samples: Some(mc.samples),
        seed: Some(mc.seed),
    })
}

/// `|𝔖|`: analytic for the isotropic Euclidean norm, Monte Carlo otherwise.
pub fn sphere_measure(
    group: &GroupSpec,
    norm: &QuasiNormSpec,
    mc: &MonteCarlo,
) -> Result<SphereMeasure> {
    norm.check(group)?;
    match analytic_sphere_measure(group, norm) {
        Some(v) => Ok(SphereMeasure::exact(v)),
        None => sphere_measure_monte_carlo(group, norm, mc),
    }
}

/// Compares `∫_𝔾 g(|x|) dx` (N-dimensional Monte Carlo) with
/// `|𝔖| ∫₀^∞ g(r) r^{Q-1} dr` (1D quadrature) for `g` cut off at `cutoff`.
///
/// Passes when the discrepancy is within three combined standard errors.
pub fn polar_consistency_check(
    profile: &Profile,
    cutoff: f64,
    group: &GroupSpec,
    norm: &QuasiNormSpec,
    mc: &MonteCarlo,
) -> Result<VerificationReport> {
    if !(cutoff.is_finite() && cutoff > 0.0) {
        return Err(Error::InvalidInput(format!(
            "profile cutoff must be positive, got {cutoff}"
        )));
    }
    let geometry = Geometry::new(group.clone(), *norm)?;
    let q = group.q();
    let sphere = sphere_measure(group, norm, mc)?;
    let g = |r: f64| if r <= cutoff { profile.eval(r) } else { 0.0 };

    let bad_node = std::cell::Cell::new(None);
    let radial = integrate_pieces(
        |r| {
            let v = g(r) * r.powf(q - 1.0);
            if !v.is_finite() && bad_node.get().is_none() {
                bad_node.set(Some(r));
            }
            v
        },
        0.0,
        cutoff,
        &profile.breakpoints(),
    );
    if let Some(r) = bad_node.get() {
        return Err(Error::Numeric(format!(
            "profile {} is not finite at quadrature node r = {r}",
            profile.name()
        )));
    }
    if !radial.is_finite() {
        return Err(Error::Numeric(format!(
            "radial integral of {} is not finite on [0, {cutoff}]",
            profile.name()
        )));
    }
    let one_d = sphere.value * radial;

    let half = geometry.box_half_widths(cutoff);
    let parts = mc.run(STREAM_POLAR, |rng, count| {
        let mut x = vec![0.0; geometry.dim()];
        let mut m = Moments::default();
        for _ in 0..count {
            geometry.sample_box(rng, &half, &mut x);
            let r = geometry.norm(&x);
            let v = g(r);
            if !v.is_finite() {
                return Err(r);
            }
            m.push(v);
        }
        Ok(m)
    });
    let mut moments = Vec::with_capacity(parts.len());
    for p in parts {
        moments.push(p.map_err(|r| {
            Error::Numeric(format!(
                "profile {} is not finite at radius {r}",
                profile.name()
            ))
        })?);
    }
    let m = Moments::merged(&moments);
    let vol = geometry.box_volume(cutoff);
    let n_dim = vol * m.mean;
    let se = ((vol * m.stderr()).powi(2) + (sphere.stderr * radial).powi(2)).sqrt();

    let diff = n_dim - one_d;
    let passed = if se > 0.0 {
        diff.abs() <= 3.0 * se
    } else {
        diff.abs() <= 1e-9 * one_d.abs().max(1e-300)
    };
    Ok(VerificationReport::new(
        format!(
            "polar_consistency[{}, {}]",
            profile.name(),
            norm.kind.label()
        ),
        passed,
        n_dim,
    )
    .with_reference(one_d)
    .with_stderr(se)
    .with_tolerance(3.0 * se)
    .with_seed(mc.seed)
    .note(format!("relative discrepancy {:.3e}", diff / one_d))
    .note(format!("|S| = {} ({:?})", sphere.value, sphere.method)))
}
