//! Riemann sampling of the translate frame on a parameter lattice
//! `t_j = offset + j h`, giving the discrete family `(x_{t_j}, h f_{t_j})`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{DiscreteFrame, FramePair, SpaceTag};
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::pettis::IntervalSet;
use crate::translate_frame::Generator;

/// Errors below this mark a lattice as sampling the frame exactly.
pub const EXACT_TOL: f64 = 1e-10;
/// Upper bound on lattice points in one plan.
pub const MAX_SAMPLES: usize = 10_000_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weight {
    /// Every sample carries weight `h`.
    #[default]
    Riemann,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub step: f64,
    pub offset: f64,
    /// Parameter range; must be bounded.
    pub window: IntervalSet,
    #[serde(default)]
    pub weight: Weight,
}

impl SamplingPlan {
    /// Offset 0 over [`parameter_window`].
    pub fn covering(g: &Generator, step: f64, window: i64) -> Self {
        SamplingPlan {
            step,
            offset: 0.0,
            window: parameter_window(g, window),
            weight: Weight::Riemann,
        }
    }

    /// Lattice points inside the parameter window, in increasing order.
    pub fn points(&self) -> Result<Vec<f64>> {
        let h = self.step;
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lattice step must be positive, got {h}"
            )));
        }
        let mut out = Vec::new();
        for &(l, r) in self.window.intervals() {
            if !(l.is_finite() && r.is_finite()) {
                return Err(Error::InvalidParameter(
                    "sampling window must be bounded".into(),
                ));
            }
            if (r - l) / h > MAX_SAMPLES as f64 {
                return Err(Error::InvalidParameter(format!(
                    "more than {MAX_SAMPLES} samples"
                )));
            }
            let mut j = ((l - self.offset) / h).floor() as i64 - 1;
            loop {
                let t = self.offset + j as f64 * h;
                if t >= r {
                    break;
                }
                if t >= l {
                    out.push(t);
                }
                j += 1;
            }
            if out.len() > MAX_SAMPLES {
                return Err(Error::InvalidParameter(format!(
                    "more than {MAX_SAMPLES} samples"
                )));
            }
        }
        Ok(out)
    }
}

/// `[s0 - K, s1 + K)` for `supp f = [s0, s1)`: every `t` at which some
/// coordinate `|n| <= K` of `x_t` can be nonzero.
pub fn parameter_window(g: &Generator, window: i64) -> IntervalSet {
    match g.function().support() {
        Some((s0, s1)) => IntervalSet::from_pieces([(s0 - window as f64, s1 + window as f64)]),
        None => IntervalSet::empty(),
    }
}

/// `(x_{t_j}, h f_{t_j})` labelled `j = 1, 2, ...`, truncated to `|n| <= K`.
pub fn sample_frame(
    g: &Generator,
    plan: &SamplingPlan,
    window: i64,
    p: f64,
) -> Result<DiscreteFrame> {
    let pairs = plan
        .points()?
        .into_iter()
        .enumerate()
        .map(|(j, t)| {
            let x = g.frame_vector(t, window);
            let f = x.scale(plan.step);
            FramePair {
                label: j as i64 + 1,
                x,
                f,
            }
        })
        .collect();
    DiscreteFrame::new(pairs, SpaceTag::Lp(p))
}

/// Sparse matrix of `sum_j h x_{t_j} ⊗ f_{t_j}`, keyed `(column, row)`.
fn sampled_matrix(g: &Generator, points: &[f64], h: f64, window: i64) -> BTreeMap<(i64, i64), f64> {
    let mut out: BTreeMap<(i64, i64), f64> = BTreeMap::new();
    for &t in points {
        let v = g.frame_vector(t, window);
        for (n, fn_) in v.iter() {
            for (m, fm) in v.iter() {
                *out.entry((n, m)).or_insert(0.0) += h * fn_ * fm;
            }
        }
    }
    out
}

/// `max_{|c| <= K} ||e_c - sum_j h f_{t_j}(e_c) x_{t_j}||_p` and the
/// number of samples.
pub fn sampled_reconstruction_error(
    g: &Generator,
    plan: &SamplingPlan,
    window: i64,
    p: f64,
) -> Result<(usize, f64)> {
    let points = plan.points()?;
    let matrix = sampled_matrix(g, &points, plan.step, window);
    let mut worst: f64 = 0.0;
    for c in -window..=window {
        let mut acc = 0.0;
        let mut diagonal = 0.0;
        for (&(_, m), &v) in matrix.range((c, i64::MIN)..=(c, i64::MAX)) {
            if m == c {
                diagonal = v;
            } else {
                acc += v.abs().powf(p);
            }
        }
        acc += (1.0 - diagonal).abs().powf(p);
        worst = worst.max(acc.powf(1.0 / p));
    }
    Ok((points.len(), worst))
}

/// Lattice offsets in `[0, h)` at which some sample crosses a breakpoint of
/// a coordinate `f(t - n)`, `|n| <= K`. The sampled matrix is constant
/// between consecutive offsets.
fn critical_offsets(g: &Generator, h: f64, window: i64) -> Vec<f64> {
    let mut out = vec![0.0];
    for n in -window..=window {
        for &b in g.function().breakpoints() {
            out.push((b + n as f64).rem_euclid(h));
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() < OFFSET_RESOLUTION);
    if out.len() > 1 && h - out[out.len() - 1] < OFFSET_RESOLUTION {
        out.pop();
    }
    out
}

/// Offsets closer than this are merged when locating constant pieces.
const OFFSET_RESOLUTION: f64 = 1e-12;

/// Worst reconstruction error over every lattice `offset + h Z`: the
/// largest [`sampled_reconstruction_error`] over one offset inside each
/// piece on which the sampled matrix is constant. Returns the error and the
/// number of pieces examined.
///
/// Halving `h` averages the errors of two step-`h` lattices, so this
/// quantity is nonincreasing along dyadic refinement; the error at a fixed
/// offset need not be.
pub fn worst_offset_error(
    g: &Generator,
    h: f64,
    window: i64,
    p: f64,
    exec: Execution,
) -> Result<(f64, usize)> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "lattice step must be positive, got {h}"
        )));
    }
    let crit = critical_offsets(g, h, window);
    let mids: Vec<f64> = crit
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let next = crit.get(i + 1).copied().unwrap_or(crit[0] + h);
            0.5 * (c + next)
        })
        .collect();
    let errors = par::map_slice(exec, &mids, |&offset| {
        let plan = SamplingPlan {
            offset,
            ..SamplingPlan::covering(g, h, window)
        };
        sampled_reconstruction_error(g, &plan, window, p).map(|r| r.1)
    });
    let mut worst: f64 = 0.0;
    for e in errors {
        worst = worst.max(e?);
    }
    Ok((worst, mids.len()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub h: f64,
    /// Lattice points of the offset-0 lattice inside [`parameter_window`].
    pub num_samples: usize,
    /// [`worst_offset_error`] for this step.
    pub max_error: f64,
    pub exact: bool,
}

/// One row per step size, in the order given.
pub fn sampling_sweep(
    g: &Generator,
    h_list: &[f64],
    window: i64,
    p: f64,
    exec: Execution,
) -> Result<Vec<SweepRow>> {
    par::map_slice(exec, h_list, |&h| {
        let (max_error, _) = worst_offset_error(g, h, window, p, Execution::Sequential)?;
        let num_samples = SamplingPlan::covering(g, h, window).points()?.len();
        Ok(SweepRow {
            h,
            num_samples,
            max_error,
            exact: max_error < EXACT_TOL,
        })
    })
    .into_iter()
    .collect()
}
