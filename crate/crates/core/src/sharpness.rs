//! Numerical sharpness: maximise Hardy quotients over two-parameter-ish
//! families of radial profiles and compare with the closed-form constants.
//!
//! Two families are searched:
//!
//! * `truncated_power`: `t^s` on `[eps, R]`, over `(s, ln eps, ln R)`. As
//!   `s` approaches the critical exponent and the support grows the quotient
//!   tends to the constant for `p = q`.
//! * `bliss`: `(1 + c t^a)^{-b}` over `(ln c, ln a, ln b)`, the usual
//!   extremal shape for `p < q`.

use serde::{Deserialize, Serialize};

use crate::constants::{
    beta_from_alpha, conjugate_params_1d, hardy_bracket, sharp_constant_1d,
    sharp_constant_conjugate_1d, sharp_constant_group, HardyParams,
};
use crate::error::{Error, Result};
use crate::operators::{conjugate_ratio_1d, group_ratio_radial, hardy_ratio_1d};
use crate::optimize::coordinate_ascent;
use crate::profile::Profile;
use crate::quadrature::RadialGrid;
use crate::report::VerificationReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    TruncatedPower,
    Bliss,
}

impl FamilyKind {
    pub fn label(&self) -> &'static str {
        match self {
            FamilyKind::TruncatedPower => "truncated_power",
            FamilyKind::Bliss => "bliss",
        }
    }
}

/// Search family and optional starting member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    /// Must be a profile of `kind`; a default is derived from the weights
    /// when absent.
    pub initial: Option<Profile>,
}

impl FamilySpec {
    pub fn truncated_power() -> Self {
        Self {
            kind: FamilyKind::TruncatedPower,
            initial: None,
        }
    }

    pub fn bliss() -> Self {
        Self {
            kind: FamilyKind::Bliss,
            initial: None,
        }
    }

    /// Family of an explicit starting profile.
    pub fn starting_at(profile: Profile) -> Result<Self> {
        let kind = match profile {
            Profile::TruncatedPower { .. } => FamilyKind::TruncatedPower,
            Profile::Bliss { .. } => FamilyKind::Bliss,
            ref other => {
                return Err(Error::InvalidInput(format!(
                    "search families are truncated_power and bliss, got {}",
                    other.name()
                )))
            }
        };
        profile.validate()?;
        Ok(Self {
            kind,
            initial: Some(profile),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Maximum number of quotient evaluations (the start is always evaluated).
    pub budget: usize,
    pub cycles: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            budget: 300,
            cycles: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub parameters: Profile,
    pub ratio: f64,
    /// Best ratio so far.
    pub best: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessReport {
    pub target_constant: f64,
    pub best_ratio: f64,
    /// `best_ratio / target_constant`.
    pub attainment: f64,
    pub best_parameters: Profile,
    pub oracle_value: Option<f64>,
    pub search_trace: Vec<TracePoint>,
}

impl SharpnessReport {
    /// Largest `ratio / target` over every evaluated member.
    pub fn max_member_attainment(&self) -> f64 {
        self.search_trace
            .iter()
            .map(|t| t.ratio / self.target_constant)
            .fold(0.0, f64::max)
    }
}

/// Which quotient a search maximises.
#[derive(Debug, Clone, Copy)]
enum Side {
    Hardy,
    Conjugate,
    Group { q_dim: f64, sphere: f64 },
}

struct Problem<'a> {
    side: Side,
    params: HardyParams,
    target: f64,
    /// Exponent `w` of the right-hand side `∫ g^p t^w`.
    rhs_weight: f64,
    /// Critical power exponent for `g`.
    critical: f64,
    grid: &'a RadialGrid,
}

impl Problem<'_> {
    fn ratio(&self, g: &Profile) -> Result<f64> {
        let u = g.sample(self.grid);
        let r = match self.side {
            Side::Hardy => hardy_ratio_1d(&u, &self.params)?,
            Side::Conjugate => conjugate_ratio_1d(&u, &self.params)?,
            Side::Group { q_dim, sphere } => group_ratio_radial(&u, &self.params, q_dim, sphere)?,
        };
        Ok(r.ratio)
    }

    fn bounds(&self, kind: FamilyKind) -> Vec<(f64, f64)> {
        match kind {
            FamilyKind::TruncatedPower => {
                let (lo, hi) = (self.grid.r_min().ln(), self.grid.r_max().ln());
                let mid = 0.5 * (lo + hi);
                vec![
                    (self.critical - 0.5, self.critical + 0.5),
                    (lo, mid),
                    (mid, hi),
                ]
            }
            FamilyKind::Bliss => vec![
                (-10.0, 10.0),
                (0.05f64.ln(), 20f64.ln()),
                (0.05f64.ln(), 50f64.ln()),
            ],
        }
    }

    fn default_start(&self, kind: FamilyKind) -> Profile {
        match kind {
            FamilyKind::TruncatedPower => Profile::TruncatedPower {
                s: self.critical,
                eps: self.grid.r_min() * std::f64::consts::E,
                r: self.grid.r_max() / std::f64::consts::E,
            },
            FamilyKind::Bliss => Profile::Bliss {
                c: 1.0,
                a: 1.0,
                b: (2.0 * (self.rhs_weight + 1.0) / self.params.p).max(2.0),
            },
        }
    }

    /// Rejects starting members whose right-hand side diverges on `(0, ∞)`.
    fn check_start(&self, g: &Profile) -> Result<()> {
        let w = self.rhs_weight;
        let p = self.params.p;
        match *g {
            Profile::Bliss { a, b, .. } => {
                if w <= -1.0 {
                    return Err(Error::InadmissibleFamily(format!(
                        "∫₀ g^p t^{w} dt diverges at 0 for the bliss family"
                    )));
                }
                if -a * b * p + w >= -1.0 {
                    return Err(Error::InadmissibleFamily(format!(
                        "∫^∞ g^p t^{w} dt diverges at infinity: need a·b > {}, got {}",
                        (w + 1.0) / p,
                        a * b
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

fn to_coords(g: &Profile) -> Vec<f64> {
    match *g {
        Profile::TruncatedPower { s, eps, r } => vec![s, eps.ln(), r.ln()],
        Profile::Bliss { c, a, b } => vec![c.ln(), a.ln(), b.ln()],
        _ => unreachable!("families are truncated_power and bliss"),
    }
}

fn from_coords(kind: FamilyKind, x: &[f64]) -> Profile {
    match kind {
        FamilyKind::TruncatedPower => Profile::TruncatedPower {
            s: x[0],
            eps: x[1].exp(),
            r: x[2].exp(),
        },
        FamilyKind::Bliss => Profile::Bliss {
            c: x[0].exp(),
            a: x[1].exp(),
            b: x[2].exp(),
        },
    }
}

fn run_search(
    problem: &Problem<'_>,
    family: &FamilySpec,
    search: &SearchConfig,
) -> Result<SharpnessReport> {
    let start = match &family.initial {
        Some(g) => {
            if FamilySpec::starting_at(g.clone())?.kind != family.kind {
                return Err(Error::InvalidInput(format!(
                    "starting profile {} does not belong to family {}",
                    g.name(),
                    family.kind.label()
                )));
            }
            g.clone()
        }
        None => problem.default_start(family.kind),
    };
    problem.check_start(&start)?;
    // The start must evaluate cleanly; later members that fail are skipped.
    problem.ratio(&start)?;
    let bounds = problem.bounds(family.kind);
    let x0 = to_coords(&start);
    let result = coordinate_ascent(
        |x| {
            problem
                .ratio(&from_coords(family.kind, x))
                .unwrap_or(f64::NEG_INFINITY)
        },
        &x0,
        &bounds,
        search.cycles,
        search.budget,
    );
    let search_trace = result
        .trace
        .iter()
        .map(|e| TracePoint {
            parameters: from_coords(family.kind, &e.x),
            ratio: e.value,
            best: e.best,
        })
        .collect();
    Ok(SharpnessReport {
        target_constant: problem.target,
        best_ratio: result.best_value,
        attainment: result.best_value / problem.target,
        best_parameters: from_coords(family.kind, &result.best_x),
        oracle_value: None,
        search_trace,
    })
}

/// Maximises the half-line Hardy quotient over `family`, with `β` from the
/// scaling relation.
pub fn extremal_search_1d(
    p: f64,
    q: f64,
    alpha: f64,
    family: &FamilySpec,
    grid: &RadialGrid,
    search: &SearchConfig,
) -> Result<SharpnessReport> {
    let target = sharp_constant_1d(p, q, alpha)?;
    let params = HardyParams::scaled(p, q, alpha, 1.0)?;
    let problem = Problem {
        side: Side::Hardy,
        params,
        target,
        rhs_weight: alpha,
        critical: -(alpha + 1.0) / p,
        grid,
    };
    run_search(&problem, family, search)
}

/// Maximises the half-line conjugate quotient for weight `x^{α₀}`, `α₀ > p-1`.
pub fn extremal_search_conjugate_1d(
    p: f64,
    q: f64,
    alpha0: f64,
    family: &FamilySpec,
    grid: &RadialGrid,
    search: &SearchConfig,
) -> Result<SharpnessReport> {
    let target = sharp_constant_conjugate_1d(p, q, alpha0)?;
    let params = HardyParams::new(p, q, alpha0, beta_from_alpha(p, q, alpha0, 1.0))?;
    let problem = Problem {
        side: Side::Conjugate,
        params,
        target,
        rhs_weight: alpha0,
        critical: -(alpha0 + 1.0) / p,
        grid,
    };
    run_search(&problem, family, search)
}

/// Maximises the group quotient over radial functions `g(|x|)`.
#[allow(clippy::too_many_arguments)]
pub fn extremal_search_group(
    p: f64,
    q: f64,
    alpha: f64,
    q_dim: f64,
    sphere: f64,
    family: &FamilySpec,
    grid: &RadialGrid,
    search: &SearchConfig,
) -> Result<SharpnessReport> {
    let target = sharp_constant_group(p, q, q_dim, alpha, sphere)?;
    let params = HardyParams::scaled(p, q, alpha, q_dim)?;
    let problem = Problem {
        side: Side::Group { q_dim, sphere },
        params,
        target,
        rhs_weight: alpha + q_dim - 1.0,
        critical: -(alpha + q_dim) / p,
        grid,
    };
    run_search(&problem, family, search)
}

/// Hardy-side and conjugate-side searches for dual weights `α` and
/// `α₀ = 2p - 2 - α`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityOutcome {
    pub hardy: SharpnessReport,
    pub conjugate: SharpnessReport,
    pub report: VerificationReport,
}

/// Passes when both targets agree to relative `1e-12` and the best ratios
/// agree to 5% of the target.
pub fn duality_check(
    p: f64,
    q: f64,
    alpha: f64,
    family: &FamilySpec,
    grid: &RadialGrid,
    search: &SearchConfig,
) -> Result<DualityOutcome> {
    let dual = conjugate_params_1d(p, alpha, q)?;
    let hardy = extremal_search_1d(p, q, alpha, family, grid, search)?;
    let conj_family = FamilySpec {
        kind: family.kind,
        initial: None,
    };
    let conjugate = extremal_search_conjugate_1d(p, q, dual.alpha0, &conj_family, grid, search)?;
    let target_gap =
        (hardy.target_constant - conjugate.target_constant).abs() / hardy.target_constant;
    let ratio_gap = (hardy.best_ratio - conjugate.best_ratio).abs() / hardy.target_constant;
    let passed = target_gap <= 1e-12 && ratio_gap <= 0.05;
    let report = VerificationReport::new(
        format!(
            "duality[p={p}, q={q}, alpha={alpha}, alpha0={}]",
            dual.alpha0
        ),
        passed,
        hardy.best_ratio,
    )
    .with_reference(conjugate.best_ratio)
    .with_tolerance(0.05 * hardy.target_constant)
    .note(format!("relative target gap {target_gap:e}"))
    .note(format!("relative ratio gap {ratio_gap:.4}"));
    Ok(DualityOutcome {
        hardy,
        conjugate,
        report,
    })
}

/// Checks that the sharp group constant lies in the older two-sided bracket.
pub fn bracket_check(
    p: f64,
    q: f64,
    q_dim: f64,
    alpha: f64,
    sphere: f64,
) -> Result<VerificationReport> {
    let c = sharp_constant_group(p, q, q_dim, alpha, sphere)?;
    let b = hardy_bracket(p, q, q_dim, alpha, sphere)?;
    let slack = 1e-12;
    let passed = c >= b.lower * (1.0 - slack) && c <= b.upper * (1.0 + slack);
    Ok(VerificationReport::new(
        format!("bracket[p={p}, q={q}, Q={q_dim}, alpha={alpha}]"),
        passed,
        c,
    )
    .with_discrepancy(((c - b.lower) / c).min((b.upper - c) / c))
    .with_tolerance(slack)
    .note(format!("lower {}", b.lower))
    .note(format!("upper {}", b.upper)))
}
