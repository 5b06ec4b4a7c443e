//! Continuous Schauder frames of `l_p(Z)` generated by integer translates of
//! a single step function `f`.
//!
//! For `t` in the real line the frame pair is `x_t = f_t = (f(t - n))_n`. When
//! `f` is integrable, has orthonormal integer translates, and has a bounded
//! periodization `sup_t sum_n |f(t - n)|`, integrating `f_t(x) x_t` over any
//! measurable set gives a bounded operator whose full-line value is `x`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::CoordinateVector;
use crate::par::{self, Execution};
use crate::pettis::IntervalSet;
use crate::stepfn::StepFunction;

/// Orthonormality residual accepted by [`validate_generator`] by default.
pub const VALIDATION_TOL: f64 = 1e-10;

/// Tolerance on `||a||_2 = 1` for Rademacher coefficient vectors.
pub const UNIT_NORM_TOL: f64 = 1e-12;

/// Finest supported dyadic depth for Rademacher generators.
pub const MAX_RESOLUTION: u32 = 20;

/// A step function that passed [`validate_generator`], with its certificate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Generator {
    f: StepFunction,
    l1_norm: f64,
    periodized_sup: f64,
    ortho_residual: f64,
    suppression_constant: f64,
    lag_range: u64,
}

impl Generator {
    pub fn function(&self) -> &StepFunction {
        &self.f
    }

    /// `||f||_1`.
    pub fn l1_norm(&self) -> f64 {
        self.l1_norm
    }

    /// `S = sup_t sum_n |f(t - n)|`.
    pub fn periodized_sup(&self) -> f64 {
        self.periodized_sup
    }

    /// `max_{|m| <= lag_range} |<f, f(. - m)> - delta_{m0}|`.
    pub fn ortho_residual(&self) -> f64 {
        self.ortho_residual
    }

    /// `C_s = ||f||_1 * S`, an upper bound for the suppression constant.
    pub fn suppression_constant(&self) -> f64 {
        self.suppression_constant
    }

    pub fn lag_range(&self) -> u64 {
        self.lag_range
    }

    /// Coordinates `f(t - n)` for `|n| <= window`. The same vector is both
    /// `x_t` in `l_p` and `f_t` in `l_q`.
    pub fn frame_vector(&self, t: f64, window: i64) -> CoordinateVector {
        let Some((s0, s1)) = self.f.support() else {
            return CoordinateVector::zero();
        };
        // t - n in [s0, s1)  <=>  n in (t - s1, t - s0]
        let lo = ((t - s1).floor() as i64).max(-window);
        let hi = ((t - s0).floor() as i64 + 1).min(window);
        (lo..=hi)
            .map(|n| (n, self.f.evaluate(t - n as f64)))
            .collect()
    }

    /// `c(t) = sum_n x_n f(t - n)`, the coefficient function `t -> f_t(x)`.
    pub fn analysis_function(&self, x: &CoordinateVector) -> StepFunction {
        translate_sum(&self.f, x, Execution::default())
    }

    /// The Pettis integral `x_E = ∫_E f_t(x) x_t dt`, returned on
    /// coordinates `|m| <= window`.
    pub fn synthesis_over_set(
        &self,
        x: &CoordinateVector,
        set: &IntervalSet,
        window: i64,
    ) -> CoordinateVector {
        self.synthesis_over_set_with(x, set, window, Execution::default())
    }

    pub fn synthesis_over_set_with(
        &self,
        x: &CoordinateVector,
        set: &IntervalSet,
        window: i64,
        exec: Execution,
    ) -> CoordinateVector {
        let c = translate_sum(&self.f, x, exec);
        if c.is_zero() || set.is_empty() {
            return CoordinateVector::zero();
        }
        let full = set.is_real_line();
        let indices: Vec<i64> = (-window..=window).collect();
        let coords = par::map_slice(exec, &indices, |&m| {
            let shifted = self.f.translate(m as f64);
            if full {
                c.inner(&shifted)
            } else {
                c.multiply(&shifted).integrate(set)
            }
        });
        indices.into_iter().zip(coords).collect()
    }

    /// Full-line synthesis, which reproduces `x` on the window.
    pub fn synthesis_full_line(&self, x: &CoordinateVector, window: i64) -> CoordinateVector {
        self.synthesis_over_set(x, &IntervalSet::real_line(), window)
    }

    /// Entry `[i][j]` is coordinate `m = j - window` of the full-line
    /// synthesis of `e_n`, `n = i - window`.
    pub fn biorthogonality_matrix(&self, window: i64, exec: Execution) -> Vec<Vec<f64>> {
        let indices: Vec<i64> = (-window..=window).collect();
        par::map_slice(exec, &indices, |&n| {
            let row = self.synthesis_over_set_with(
                &CoordinateVector::unit(n),
                &IntervalSet::real_line(),
                window,
                Execution::Sequential,
            );
            indices.iter().map(|&m| row.get(m)).collect()
        })
    }
}

/// `sum_n a_n f(t - n)` built from exact translated copies of `f`.
pub fn translate_sum(f: &StepFunction, a: &CoordinateVector, exec: Execution) -> StepFunction {
    let terms: Vec<(i64, f64)> = a.iter().collect();
    let pieces = par::map_slice(exec, &terms, |&(n, c)| f.translate(n as f64).scale(c));
    par::tree_sum(exec, pieces)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Condition {
    /// `f` in `L_1` with nonzero norm.
    Integrable,
    /// Integer translates orthonormal in `L_2`.
    Orthonormal,
    /// `sup_t sum_n |f(t - n)| < inf`.
    BoundedPeriodization,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionFailure {
    pub condition: Condition,
    pub residual: f64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LagInner {
    pub lag: i64,
    pub inner: f64,
    pub residual: f64,
}

/// Per-condition evidence gathered by [`certify`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub l1_norm: f64,
    pub periodized_sup: f64,
    pub suppression_constant: f64,
    pub lag_range: u64,
    pub lags: Vec<LagInner>,
    pub ortho_residual: f64,
    pub tol: f64,
    pub failures: Vec<ConditionFailure>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.failures.is_empty() {
            return write!(
                f,
                "valid (orthonormality residual {:e})",
                self.ortho_residual
            );
        }
        let parts: Vec<String> = self
            .failures
            .iter()
            .map(|c| {
                format!(
                    "{:?}: {} (residual {:e})",
                    c.condition, c.detail, c.residual
                )
            })
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Computes every certificate for `f` without deciding acceptance.
///
/// Lags beyond the support width vanish identically, so the default lag range
/// is `ceil(width)`.
pub fn certify(f: &StepFunction, lag_range: Option<u64>, tol: f64) -> ValidationReport {
    let lag_range = lag_range.unwrap_or_else(|| f.support_width().ceil() as u64);
    let l1_norm = f.l1_norm();
    let periodized_sup = f.periodized_l1_sup();
    let lags: Vec<LagInner> = (-(lag_range as i64)..=lag_range as i64)
        .map(|m| {
            let inner = f.inner(&f.translate(m as f64));
            let target = if m == 0 { 1.0 } else { 0.0 };
            LagInner {
                lag: m,
                inner,
                residual: (inner - target).abs(),
            }
        })
        .collect();
    let ortho_residual = lags.iter().fold(0.0, |acc: f64, l| acc.max(l.residual));

    let mut failures = Vec::new();
    if !(l1_norm > 0.0 && l1_norm.is_finite()) {
        failures.push(ConditionFailure {
            condition: Condition::Integrable,
            residual: l1_norm,
            detail: "||f||_1 must be positive and finite".into(),
        });
    }
    if !(ortho_residual <= tol) {
        let worst = lags
            .iter()
            .filter(|l| l.residual > tol)
            .map(|l| format!("<f, f(.-{})> = {}", l.lag, l.inner))
            .collect::<Vec<_>>()
            .join(", ");
        failures.push(ConditionFailure {
            condition: Condition::Orthonormal,
            residual: ortho_residual,
            detail: worst,
        });
    }
    if !periodized_sup.is_finite() {
        failures.push(ConditionFailure {
            condition: Condition::BoundedPeriodization,
            residual: periodized_sup,
            detail: "periodization is unbounded".into(),
        });
    }
    ValidationReport {
        l1_norm,
        periodized_sup,
        suppression_constant: l1_norm * periodized_sup,
        lag_range,
        lags,
        ortho_residual,
        tol,
        failures,
    }
}

/// Accepts `f` as a frame generator iff all three conditions hold.
pub fn validate_generator(f: &StepFunction, lag_range: Option<u64>, tol: f64) -> Result<Generator> {
    let report = certify(f, lag_range, tol);
    if !report.is_valid() {
        return Err(Error::GeneratorRejected(Box::new(report)));
    }
    Ok(Generator {
        f: f.clone(),
        l1_norm: report.l1_norm,
        periodized_sup: report.periodized_sup,
        ortho_residual: report.ortho_residual,
        suppression_constant: report.suppression_constant,
        lag_range: report.lag_range,
    })
}

/// Coefficients `a_n` with `||a||_2 = 1` for the generator
/// `f = sum_n a_n r_n(. - n)`.
///
/// The `k`-th active index (in increasing order) carries the Rademacher
/// function with `2^{k+1}` alternating cells on `[0, 1)` starting at `+1`, so
/// every breakpoint lies on the grid `2^{-resolution} Z`; `resolution` must be
/// at least the number of active coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RademacherSpec {
    pub coefficients: CoordinateVector,
    pub resolution: u32,
}

impl RademacherSpec {
    /// Uses the coarsest admissible resolution.
    pub fn new(coefficients: CoordinateVector) -> Self {
        let resolution = coefficients.nnz() as u32;
        RademacherSpec {
            coefficients,
            resolution,
        }
    }
}

/// `r` with `2^{rank+1}` cells of alternating sign on `[0, 1)`.
pub fn rademacher_function(rank: u32) -> StepFunction {
    let cells = 1usize << (rank + 1);
    let width = 1.0 / cells as f64;
    let bp = (0..=cells).map(|i| i as f64 * width).collect();
    let vals = (0..cells)
        .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
        .collect();
    StepFunction::new(bp, vals).expect("dyadic grid is increasing")
}

pub fn build_rademacher_generator(spec: &RademacherSpec) -> Result<Generator> {
    let active: Vec<(i64, f64)> = spec.coefficients.iter().collect();
    if active.is_empty() {
        return Err(Error::EmptyCoefficients);
    }
    let l2 = spec.coefficients.norm(2.0);
    if (l2 - 1.0).abs() > UNIT_NORM_TOL {
        return Err(Error::NotUnitNorm(l2));
    }
    if spec.resolution < active.len() as u32 {
        return Err(Error::ResolutionTooSmall {
            resolution: spec.resolution,
            active: active.len(),
        });
    }
    if spec.resolution > MAX_RESOLUTION {
        return Err(Error::InvalidParameter(format!(
            "resolution {} exceeds {MAX_RESOLUTION}",
            spec.resolution
        )));
    }
    let mut bp: Vec<f64> = Vec::new();
    let mut vals: Vec<f64> = Vec::new();
    for (rank, &(n, a)) in active.iter().enumerate() {
        let r = rademacher_function(rank as u32);
        let offset = n as f64;
        if let Some(&last) = bp.last() {
            if last < offset {
                vals.push(0.0);
            } else {
                bp.pop();
            }
        }
        bp.extend(r.breakpoints().iter().map(|t| t + offset));
        vals.extend(r.values().iter().map(|v| v * a));
    }
    let f = StepFunction::new(bp, vals)?;
    validate_generator(&f, None, VALIDATION_TOL)
}

/// How a generator is given in configuration files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum GeneratorSpec {
    Step(StepFunction),
    Rademacher(RademacherSpec),
}

impl GeneratorSpec {
    pub fn build(&self) -> Result<Generator> {
        match self {
            GeneratorSpec::Step(f) => validate_generator(f, None, VALIDATION_TOL),
            GeneratorSpec::Rademacher(spec) => build_rademacher_generator(spec),
        }
    }
}

/// Both sides of the Young-type bound
/// `∫ |sum_n a_n f(t - n)|^p dt <= ||f||_1 ||a||_p^p S^{p/p'}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct YoungCheck {
    pub lhs: f64,
    pub rhs: f64,
}

impl YoungCheck {
    pub fn holds(&self, rel_tol: f64) -> bool {
        self.lhs <= self.rhs * (1.0 + rel_tol)
    }
}

pub fn young_check(f: &StepFunction, a: &CoordinateVector, p: f64) -> YoungCheck {
    assert!(p > 1.0, "Young bound needs p > 1, got {p}");
    let lhs = translate_sum(f, a, Execution::Sequential).lp_norm_pow(p);
    let a_pow = a.iter().fold(0.0, |s, (_, c)| s + c.abs().powf(p));
    // p / p' = p - 1
    let rhs = f.l1_norm() * a_pow * f.periodized_l1_sup().powf(p - 1.0);
    YoungCheck { lhs, rhs }
}
