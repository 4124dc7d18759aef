//! Radial test-function profiles `g : (0, ∞) → ℝ`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{RadialFunction, RadialGrid};

/// A radial test function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    /// `t^s` on the whole half-line.
    Power { s: f64 },
    /// `t^s` on `[eps, r]`, zero elsewhere.
    TruncatedPower { s: f64, eps: f64, r: f64 },
    /// `(1 + c t^a)^{-b}`.
    Bliss { c: f64, a: f64, b: f64 },
    /// `1` on `[lo, hi]`, zero elsewhere.
    Indicator { lo: f64, hi: f64 },
    /// `exp(-(t / width)^2)`.
    Gaussian { width: f64 },
    /// `coeffs[k] t^{exps[k]}` on `[breaks[k], breaks[k+1])`.
    PiecewisePower {
        breaks: Vec<f64>,
        coeffs: Vec<f64>,
        exps: Vec<f64>,
    },
    /// Sum of Gaussian bumps in `ln t`: `Σ amp_k exp(-(ln t - center_k)^2 / (2 width_k^2))`.
    LogBumps {
        amps: Vec<f64>,
        centers: Vec<f64>,
        widths: Vec<f64>,
    },
    /// Linear interpolation of `(r, value)` samples, zero outside `[r_0, r_last]`.
    Tabulated { r: Vec<f64>, values: Vec<f64> },
}

impl Profile {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Profile::Power { s } => t.powf(*s),
            Profile::TruncatedPower { s, eps, r } => {
                if t >= *eps && t <= *r {
                    t.powf(*s)
                } else {
                    0.0
                }
            }
            Profile::Bliss { c, a, b } => (1.0 + c * t.powf(*a)).powf(-b),
            Profile::Indicator { lo, hi } => {
                if t >= *lo && t <= *hi {
                    1.0
                } else {
                    0.0
                }
            }
            Profile::Gaussian { width } => (-(t / width).powi(2)).exp(),
            Profile::PiecewisePower {
                breaks,
                coeffs,
                exps,
            } => {
                if t < breaks[0] || t >= breaks[breaks.len() - 1] {
                    return 0.0;
                }
                let k = breaks.partition_point(|&b| b <= t) - 1;
                coeffs[k] * t.powf(exps[k])
            }
            Profile::LogBumps {
                amps,
                centers,
                widths,
            } => {
                let s = t.ln();
                amps.iter()
                    .zip(centers)
                    .zip(widths)
                    .map(|((a, c), w)| a * (-(s - c).powi(2) / (2.0 * w * w)).exp())
                    .sum()
            }
            Profile::Tabulated { r, values } => {
                if t < r[0] || t > r[r.len() - 1] {
                    return 0.0;
                }
                let k = r.partition_point(|&x| x <= t).clamp(1, r.len() - 1);
                let (x0, x1) = (r[k - 1], r[k]);
                let w = (t - x0) / (x1 - x0);
                values[k - 1] * (1.0 - w) + values[k] * w
            }
        }
    }

    /// Closed support interval `(lo, hi)`; `hi` may be infinite.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Profile::TruncatedPower { eps, r, .. } => (*eps, *r),
            Profile::Indicator { lo, hi } => (*lo, *hi),
            Profile::PiecewisePower { breaks, .. } => (breaks[0], breaks[breaks.len() - 1]),
            Profile::Tabulated { r, .. } => (r[0], r[r.len() - 1]),
            _ => (0.0, f64::INFINITY),
        }
    }

    /// Points where the profile may jump or kink.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Profile::TruncatedPower { eps, r, .. } => vec![*eps, *r],
            Profile::Indicator { lo, hi } => vec![*lo, *hi],
            Profile::PiecewisePower { breaks, .. } => breaks.clone(),
            Profile::Tabulated { r, .. } => r.clone(),
            _ => Vec::new(),
        }
    }

    pub fn sample(&self, grid: &RadialGrid) -> RadialFunction {
        grid.sample(|t| self.eval(t))
    }

    /// Short name used in reports.
    pub fn name(&self) -> &'static str {
        match self {
            Profile::Power { .. } => "power",
            Profile::TruncatedPower { .. } => "truncated_power",
            Profile::Bliss { .. } => "bliss",
            Profile::Indicator { .. } => "indicator",
            Profile::Gaussian { .. } => "gaussian",
            Profile::PiecewisePower { .. } => "piecewise_power",
            Profile::LogBumps { .. } => "log_bumps",
            Profile::Tabulated { .. } => "tabulated",
        }
    }

    /// Parses `name` or `name:key=value,key=value`.
    ///
    /// ```
    /// use hardy_lab::profile::Profile;
    /// let p = Profile::parse("truncated_power:s=-0.5,eps=1e-6,r=1").unwrap();
    /// assert_eq!(p.eval(0.25), 2.0);
    /// ```
    pub fn parse(spec: &str) -> Result<Self> {
        let (name, args) = match spec.split_once(':') {
            Some((n, a)) => (n.trim(), a),
            None => (spec.trim(), ""),
        };
        let mut kv = std::collections::BTreeMap::new();
        for part in args.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| {
                Error::InvalidInput(format!("expected key=value in profile spec, got `{part}`"))
            })?;
            let v: f64 = v.trim().parse().map_err(|_| {
                Error::InvalidInput(format!("profile parameter `{k}` is not a number: `{v}`"))
            })?;
            kv.insert(k.trim().to_string(), v);
        }
        let get = |k: &str, default: f64| kv.get(k).copied().unwrap_or(default);
        let profile = match name {
            "power" => Profile::Power { s: get("s", -0.5) },
            "truncated_power" => Profile::TruncatedPower {
                s: get("s", -0.5),
                eps: get("eps", 1e-6),
                r: get("r", 1.0),
            },
            "bliss" => Profile::Bliss {
                c: get("c", 1.0),
                a: get("a", 1.0),
                b: get("b", 2.0),
            },
            "indicator" => Profile::Indicator {
                lo: get("lo", 0.0),
                hi: get("hi", 1.0),
            },
            "gaussian" => Profile::Gaussian {
                width: get("width", 1.0),
            },
            other => {
                return Err(Error::InvalidInput(format!(
                    "unknown profile `{other}` (expected power, truncated_power, bliss, indicator, gaussian)"
                )))
            }
        };
        profile.validate()?;
        Ok(profile)
    }

    /// Reads a two-column `(r, value)` text file. Blank lines and lines
    /// starting with `#` are skipped; columns may be separated by whitespace
    /// or a comma.
    pub fn from_table(text: &str) -> Result<Self> {
        let mut r = Vec::new();
        let mut values = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|c| !c.is_empty())
                .collect();
            if cols.len() != 2 {
                return Err(Error::InvalidInput(format!(
                    "line {}: expected two columns, found {}",
                    lineno + 1,
                    cols.len()
                )));
            }
            let parse = |c: &str| {
                c.parse::<f64>().map_err(|_| {
                    Error::InvalidInput(format!("line {}: `{c}` is not a number", lineno + 1))
                })
            };
            r.push(parse(cols[0])?);
            values.push(parse(cols[1])?);
        }
        let profile = Profile::Tabulated { r, values };
        profile.validate()?;
        Ok(profile)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        match self {
            Profile::TruncatedPower { eps, r, s } => {
                if !(*eps > 0.0 && eps < r && s.is_finite()) {
                    return bad(format!(
                        "truncated power needs 0 < eps < r, got eps={eps}, r={r}"
                    ));
                }
            }
            Profile::Bliss { c, a, b } => {
                if !(*c > 0.0 && *a > 0.0 && *b > 0.0) {
                    return bad(format!(
                        "bliss parameters must be positive, got c={c}, a={a}, b={b}"
                    ));
                }
            }
            Profile::Indicator { lo, hi } => {
                if !(*lo >= 0.0 && lo < hi) {
                    return bad(format!("indicator needs 0 <= lo < hi, got [{lo}, {hi}]"));
                }
            }
            Profile::Gaussian { width } => {
                if *width <= 0.0 {
                    return bad(format!("gaussian width must be positive, got {width}"));
                }
            }
            Profile::PiecewisePower {
                breaks,
                coeffs,
                exps,
            } => {
                if breaks.len() < 2
                    || coeffs.len() + 1 != breaks.len()
                    || exps.len() != coeffs.len()
                {
                    return bad("piecewise power needs k+1 breaks for k pieces".into());
                }
                if breaks[0] <= 0.0 || breaks.windows(2).any(|w| w[0] >= w[1]) {
                    return bad("piecewise power breaks must be positive and increasing".into());
                }
            }
            Profile::Tabulated { r, values } => {
                if r.len() < 2 || r.len() != values.len() {
                    return bad("tabulated profile needs at least two (r, value) rows".into());
                }
                if r[0] < 0.0 || r.windows(2).any(|w| w[0] >= w[1]) {
                    return bad(
                        "tabulated radii must be nonnegative and strictly increasing".into(),
                    );
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Numeric(
                        "tabulated profile has a non-finite value".into(),
                    ));
                }
            }
            Profile::Power { .. } | Profile::LogBumps { .. } => {}
        }
        Ok(())
    }
}

/// Random nonnegative piecewise-power profile with 1 to 4 pieces supported
/// inside `[1e-3, 1e3]`.
pub fn random_piecewise_power<R: Rng + ?Sized>(rng: &mut R) -> Profile {
    let pieces = rng.random_range(1..=4usize);
    let mut logs: Vec<f64> = (0..=pieces)
        .map(|_| rng.random_range(-3.0..3.0) * std::f64::consts::LN_10)
        .collect();
    logs.sort_by(|a, b| a.total_cmp(b));
    logs.dedup();
    if logs.len() < 2 {
        logs = vec![-1.0, 1.0];
    }
    let breaks: Vec<f64> = logs.iter().map(|l| l.exp()).collect();
    let k = breaks.len() - 1;
    Profile::PiecewisePower {
        coeffs: (0..k).map(|_| rng.random_range(0.0..1.0)).collect(),
        exps: (0..k).map(|_| rng.random_range(-2.0..2.0)).collect(),
        breaks,
    }
}

/// Random smooth positive profile: a sum of 1 to 3 Gaussian bumps in `ln t`
/// centred inside `[1e-2, 1e2]`.
pub fn random_smooth<R: Rng + ?Sized>(rng: &mut R) -> Profile {
    let k = rng.random_range(1..=3usize);
    Profile::LogBumps {
        amps: (0..k).map(|_| rng.random_range(0.1..1.0)).collect(),
        centers: (0..k)
            .map(|_| rng.random_range(-2.0..2.0) * std::f64::consts::LN_10)
            .collect(),
        widths: (0..k).map(|_| rng.random_range(0.3..1.5)).collect(),
    }
}
