//! Compactly supported piecewise-constant functions on the real line.
//!
//! A [`StepFunction`] holds breakpoints `t_0 < t_1 < ... < t_k` and one value
//! per half-open cell `[t_i, t_{i+1})`; it vanishes outside `[t_0, t_k)`.
//! Every integral in this crate is a finite sum over cells, so the only error
//! is floating-point rounding.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pettis::IntervalSet;

/// Breakpoints closer than this (relative to `max(1, |t|)`) are merged.
pub const BREAKPOINT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStepFunction")]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStepFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<RawStepFunction> for StepFunction {
    type Error = Error;

    fn try_from(raw: RawStepFunction) -> Result<Self> {
        StepFunction::new(raw.breakpoints, raw.values)
    }
}

fn close(a: f64, b: f64) -> bool {
    (b - a).abs() <= BREAKPOINT_TOL * a.abs().max(1.0)
}

/// Sorted union of two breakpoint lists with near-duplicates merged.
fn merged_grid(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = if j >= b.len() || (i < a.len() && a[i] <= b[j]) {
            i += 1;
            a[i - 1]
        } else {
            j += 1;
            b[j - 1]
        };
        match out.last() {
            Some(&last) if close(last, next) => {}
            _ => out.push(next),
        }
    }
    out
}

impl StepFunction {
    /// Builds a step function, rejecting non-finite or non-increasing
    /// breakpoints. Equal adjacent cells are merged and zero cells at either
    /// end are trimmed.
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.is_empty() && values.is_empty() {
            return Ok(Self::zero());
        }
        if breakpoints.len() != values.len() + 1 {
            return Err(Error::InvalidStepFunction(format!(
                "{} breakpoints need {} values, got {}",
                breakpoints.len(),
                breakpoints.len().saturating_sub(1),
                values.len()
            )));
        }
        if let Some(t) = breakpoints.iter().find(|t| !t.is_finite()) {
            return Err(Error::InvalidStepFunction(format!(
                "non-finite breakpoint {t}"
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidStepFunction(format!("non-finite value {v}")));
        }
        if let Some(w) = breakpoints.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::InvalidStepFunction(format!(
                "breakpoints not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
        Ok(Self::normalized(breakpoints, values))
    }

    fn normalized(breakpoints: Vec<f64>, values: Vec<f64>) -> Self {
        let mut bp: Vec<f64> = Vec::with_capacity(breakpoints.len());
        let mut vals: Vec<f64> = Vec::with_capacity(values.len());
        for (i, &v) in values.iter().enumerate() {
            match vals.last() {
                Some(&last) if last == v => *bp.last_mut().unwrap() = breakpoints[i + 1],
                _ => {
                    if bp.is_empty() {
                        bp.push(breakpoints[i]);
                    }
                    vals.push(v);
                    bp.push(breakpoints[i + 1]);
                }
            }
        }
        let lead = vals.iter().take_while(|v| **v == 0.0).count();
        if lead == vals.len() {
            return Self::zero();
        }
        let trail = vals.iter().rev().take_while(|v| **v == 0.0).count();
        let vals = vals[lead..vals.len() - trail].to_vec();
        let bp = bp[lead..bp.len() - trail].to_vec();
        StepFunction {
            breakpoints: bp,
            values: vals,
        }
    }

    pub fn zero() -> Self {
        StepFunction {
            breakpoints: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Indicator of `[left, right)`.
    pub fn indicator(left: f64, right: f64) -> Result<Self> {
        Self::new(vec![left, right], vec![1.0])
    }

    /// The Haar wavelet: `+1` on `[0, 1/2)`, `-1` on `[1/2, 1)`.
    pub fn haar() -> Self {
        Self::new(vec![0.0, 0.5, 1.0], vec![1.0, -1.0]).unwrap()
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn num_cells(&self) -> usize {
        self.values.len()
    }

    /// `[t_0, t_k)`, or `None` for the zero function.
    pub fn support(&self) -> Option<(f64, f64)> {
        Some((*self.breakpoints.first()?, *self.breakpoints.last()?))
    }

    pub fn support_width(&self) -> f64 {
        self.support().map_or(0.0, |(a, b)| b - a)
    }

    /// Iterates `(left, right, value)` over cells.
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.breakpoints
            .windows(2)
            .zip(&self.values)
            .map(|(w, &v)| (w[0], w[1], v))
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        let idx = self.breakpoints.partition_point(|&b| b <= t);
        if idx == 0 || idx >= self.breakpoints.len() {
            0.0
        } else {
            self.values[idx - 1]
        }
    }

    // Value at `t` for a caller sweeping `t` upward.
    fn evaluate_from(&self, cursor: &mut usize, t: f64) -> f64 {
        while *cursor < self.breakpoints.len() && self.breakpoints[*cursor] <= t {
            *cursor += 1;
        }
        if *cursor == 0 || *cursor >= self.breakpoints.len() {
            0.0
        } else {
            self.values[*cursor - 1]
        }
    }

    fn combine_with(&self, other: &StepFunction, op: impl Fn(f64, f64) -> f64) -> StepFunction {
        let grid = merged_grid(&self.breakpoints, &other.breakpoints);
        if grid.len() < 2 {
            return Self::zero();
        }
        let (mut i, mut j) = (0, 0);
        let values = grid
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                op(
                    self.evaluate_from(&mut i, mid),
                    other.evaluate_from(&mut j, mid),
                )
            })
            .collect();
        Self::normalized(grid, values)
    }

    pub fn add(&self, other: &StepFunction) -> StepFunction {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        self.combine_with(other, |a, b| a + b)
    }

    /// `self - other`.
    pub fn sub(&self, other: &StepFunction) -> StepFunction {
        self.combine_with(other, |a, b| a - b)
    }

    pub fn multiply(&self, other: &StepFunction) -> StepFunction {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        self.combine_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: f64) -> StepFunction {
        Self::normalized(
            self.breakpoints.clone(),
            self.values.iter().map(|v| v * c).collect(),
        )
    }

    /// `t -> |f(t)|`.
    pub fn abs(&self) -> StepFunction {
        Self::normalized(
            self.breakpoints.clone(),
            self.values.iter().map(|v| v.abs()).collect(),
        )
    }

    /// `T_b f (t) = f(t - b)`.
    pub fn translate(&self, b: f64) -> StepFunction {
        StepFunction {
            breakpoints: self.breakpoints.iter().map(|t| t + b).collect(),
            values: self.values.clone(),
        }
    }

    /// `D_a f (t) = 2^{a/p} f(2^a t)`, the L_p-isometric dilation.
    pub fn dilate(&self, a: f64, p: f64) -> StepFunction {
        assert!(p >= 1.0, "dilation exponent must be >= 1, got {p}");
        if a == 0.0 {
            return self.clone();
        }
        let shrink = (-a).exp2();
        let gain = (a / p).exp2();
        StepFunction {
            breakpoints: self.breakpoints.iter().map(|t| t * shrink).collect(),
            values: self.values.iter().map(|v| v * gain).collect(),
        }
    }

    /// Integral over the whole line.
    pub fn integral(&self) -> f64 {
        self.cells().fold(0.0, |s, (l, r, v)| s + v * (r - l))
    }

    /// `sum_i value_i * |cell_i ∩ E|`.
    pub fn integrate(&self, set: &IntervalSet) -> f64 {
        let intervals = set.intervals();
        let mut j = 0;
        let mut total = 0.0;
        for (l, r, v) in self.cells() {
            while j < intervals.len() && intervals[j].1 <= l {
                j += 1;
            }
            let mut k = j;
            while k < intervals.len() && intervals[k].0 < r {
                let overlap = r.min(intervals[k].1) - l.max(intervals[k].0);
                if overlap > 0.0 {
                    total += v * overlap;
                }
                k += 1;
            }
        }
        total
    }

    /// `sum_i |value_i|^p * len_i`, i.e. `||f||_p^p`.
    pub fn lp_norm_pow(&self, p: f64) -> f64 {
        assert!(p >= 1.0, "L_p norm needs p >= 1, got {p}");
        self.cells()
            .fold(0.0, |s, (l, r, v)| s + v.abs().powf(p) * (r - l))
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        self.lp_norm_pow(p).powf(1.0 / p)
    }

    pub fn l1_norm(&self) -> f64 {
        self.cells().fold(0.0, |s, (l, r, v)| s + v.abs() * (r - l))
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `∫ f g`, swept over the overlap of the two supports without
    /// materializing the product.
    pub fn inner(&self, other: &StepFunction) -> f64 {
        let (Some((a0, a1)), Some((b0, b1))) = (self.support(), other.support()) else {
            return 0.0;
        };
        let (lo, hi) = (a0.max(b0), a1.min(b1));
        if hi <= lo {
            return 0.0;
        }
        let (fb, gb) = (&self.breakpoints, &other.breakpoints);
        let mut i = fb.partition_point(|&b| b <= lo) - 1;
        let mut j = gb.partition_point(|&b| b <= lo) - 1;
        let mut t = lo;
        let mut sum = 0.0;
        while t < hi {
            let end = fb[i + 1].min(gb[j + 1]).min(hi);
            sum += self.values[i] * other.values[j] * (end - t);
            t = end;
            if fb[i + 1] <= t {
                i += 1;
            }
            if gb[j + 1] <= t {
                j += 1;
            }
        }
        sum
    }

    /// Largest value of the 1-periodic function `t -> sum_n |f(t - n)|`.
    ///
    /// Cells are cut at integers, folded onto `[0, 1)`, and the folded cell
    /// sums are swept left to right.
    pub fn periodized_l1_sup(&self) -> f64 {
        let mut events: Vec<(f64, f64)> = Vec::new();
        for (l, r, v) in self.cells() {
            let mag = v.abs();
            if mag == 0.0 {
                continue;
            }
            let mut s = l;
            while s < r {
                let k = s.floor();
                let end = r.min(k + 1.0);
                let (u, w) = (s - k, end - k);
                if w > u {
                    events.push((u, mag));
                    events.push((w, -mag));
                }
                s = end;
            }
        }
        events.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut best: f64 = 0.0;
        let mut level = 0.0;
        let mut idx = 0;
        while idx < events.len() {
            let pos = events[idx].0;
            while idx < events.len() && close(pos, events[idx].0) {
                level += events[idx].1;
                idx += 1;
            }
            let next = events.get(idx).map_or(1.0, |e| e.0);
            if next - pos > BREAKPOINT_TOL && pos < 1.0 {
                best = best.max(level);
            }
        }
        best
    }

    /// `sup_t |f(t) - g(t)|`.
    pub fn sup_distance(&self, other: &StepFunction) -> f64 {
        self.sub(other).sup_norm()
    }

    /// Cells on which the function is strictly positive (or strictly negative
    /// when `positive` is false), as an interval set.
    pub fn sign_set(&self, positive: bool) -> IntervalSet {
        let pieces = self
            .cells()
            .filter(|&(_, _, v)| if positive { v > 0.0 } else { v < 0.0 })
            .map(|(l, r, _)| (l, r));
        IntervalSet::from_pieces(pieces)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ind(l: f64, r: f64) -> StepFunction {
        StepFunction::indicator(l, r).unwrap()
    }

    #[test]
    fn evaluate_uses_half_open_cells() {
        let f = ind(0.0, 1.0);
        assert_eq!(f.evaluate(0.5), 1.0);
        assert_eq!(f.evaluate(0.0), 1.0);
        assert_eq!(f.evaluate(1.0), 0.0);
        assert_eq!(f.evaluate(-0.1), 0.0);
        assert_eq!(StepFunction::haar().evaluate(0.75), -1.0);
    }

    #[test]
    fn rejects_bad_breakpoints() {
        assert!(StepFunction::new(vec![0.0, 0.0], vec![1.0]).is_err());
        assert!(StepFunction::new(vec![1.0, 0.0], vec![1.0]).is_err());
        assert!(StepFunction::new(vec![0.0, 1.0], vec![]).is_err());
        assert!(StepFunction::new(vec![0.0, f64::INFINITY], vec![1.0]).is_err());
    }

    #[test]
    fn zero_function_has_no_cells() {
        let f = StepFunction::new(vec![0.0, 1.0, 2.0], vec![0.0, 0.0]).unwrap();
        assert!(f.is_zero());
        assert_eq!(f.support(), None);
        let h = StepFunction::haar();
        assert!(h.add(&h.scale(-1.0)).is_zero());
    }

    #[test]
    fn haar_squared_is_unit_indicator() {
        let h = StepFunction::haar();
        assert_eq!(h.multiply(&h), ind(0.0, 1.0));
    }

    #[test]
    fn rademacher_pair_is_orthogonal() {
        let r1 = StepFunction::haar();
        let r2 =
            StepFunction::new(vec![0.0, 0.25, 0.5, 0.75, 1.0], vec![1.0, -1.0, 1.0, -1.0]).unwrap();
        let unit = IntervalSet::interval(0.0, 1.0).unwrap();
        assert_eq!(r1.multiply(&r2).integrate(&unit), 0.0);
        assert_eq!(r1.inner(&r2), 0.0);
    }

    #[test]
    fn dilation_examples() {
        let h = StepFunction::haar();
        assert_eq!(h.dilate(0.0, 2.7), h);
        let d = h.dilate(1.0, 2.0);
        let s = 2f64.sqrt();
        assert!((d.evaluate(0.1) - s).abs() < 1e-15);
        assert!((d.evaluate(0.3) + s).abs() < 1e-15);
        assert_eq!(d.evaluate(0.5), 0.0);
        assert_eq!(d.support(), Some((0.0, 0.5)));
    }

    #[test]
    fn norms_of_haar() {
        let h = StepFunction::haar();
        for p in [1.5, 2.0, 3.0] {
            assert!((h.lp_norm(p) - 1.0).abs() < 1e-15);
        }
        let unit = IntervalSet::interval(0.0, 1.0).unwrap();
        assert_eq!(h.integrate(&unit), 0.0);
        assert_eq!(h.integral(), 0.0);
    }

    #[test]
    fn periodized_sup_examples() {
        assert_eq!(ind(0.0, 1.0).periodized_l1_sup(), 1.0);
        assert_eq!(ind(0.0, 2.0).periodized_l1_sup(), 2.0);
        assert_eq!(ind(0.25, 0.75).periodized_l1_sup(), 1.0);
        // overlapping after the fold: [0.5,1.5) folds to [0.5,1) and [0,0.5)
        assert_eq!(ind(0.5, 1.5).periodized_l1_sup(), 1.0);
        let f = ind(0.0, 0.75).add(&ind(1.5, 2.0).scale(-3.0));
        assert_eq!(f.periodized_l1_sup(), 4.0);
        assert_eq!(StepFunction::zero().periodized_l1_sup(), 0.0);
    }

    #[test]
    fn periodized_sup_matches_dense_sampling() {
        let f = StepFunction::new(
            vec![-1.3, -0.2, 0.45, 1.1, 2.6],
            vec![0.5, -2.0, 1.25, 0.75],
        )
        .unwrap();
        let mut best: f64 = 0.0;
        for i in 0..10_000 {
            let t = (i as f64 + 0.5) / 10_000.0;
            let s: f64 = (-5..=5).map(|n| f.evaluate(t - n as f64).abs()).sum();
            best = best.max(s);
        }
        assert!((f.periodized_l1_sup() - best).abs() < 1e-12);
    }

    #[test]
    fn integrate_over_sets() {
        let f = StepFunction::new(vec![0.0, 1.0, 3.0], vec![2.0, -1.0]).unwrap();
        let e = IntervalSet::from_pieces([(0.5, 1.5), (2.5, 10.0)]);
        assert_eq!(f.integrate(&e), 2.0 * 0.5 - 0.5 - 0.5);
        assert_eq!(f.integrate(&IntervalSet::empty()), 0.0);
        assert_eq!(f.integrate(&IntervalSet::real_line()), f.integral());
    }

    #[test]
    fn serde_round_trip_and_validation() {
        let f = StepFunction::haar();
        let text = serde_json::to_string(&f).unwrap();
        assert_eq!(text, r#"{"breakpoints":[0.0,0.5,1.0],"values":[1.0,-1.0]}"#);
        assert_eq!(serde_json::from_str::<StepFunction>(&text).unwrap(), f);
        assert!(
            serde_json::from_str::<StepFunction>(r#"{"breakpoints":[1,0],"values":[1]}"#).is_err()
        );
        assert!(serde_json::from_str::<StepFunction>(
            r#"{"breakpoints":[0,1],"values":[1],"extra":1}"#
        )
        .is_err());
    }

    #[test]
    fn near_duplicate_breakpoints_merge() {
        let f = ind(0.0, 1.0);
        let g = ind(1.0 + 1e-14, 2.0);
        let s = f.add(&g);
        assert_eq!(s.num_cells(), 1);
    }

    prop_compose! {
        fn step_fn()(cells in prop::collection::vec((0.01f64..2.0, -3.0f64..3.0), 1..12),
                     start in -5.0f64..5.0) -> StepFunction {
            let mut bp = vec![start];
            let mut vals = Vec::new();
            for (w, v) in cells {
                bp.push(bp.last().unwrap() + w);
                vals.push(v);
            }
            StepFunction::new(bp, vals).unwrap()
        }
    }

    // Breakpoints on the 1/64 grid, so integer shifts keep every cell length.
    prop_compose! {
        fn dyadic_step_fn()(cells in prop::collection::vec((1u32..128, -3.0f64..3.0), 1..12),
                            start in -320i32..320) -> StepFunction {
            let mut bp = vec![start as f64 / 64.0];
            let mut vals = Vec::new();
            for (w, v) in cells {
                bp.push(bp.last().unwrap() + w as f64 / 64.0);
                vals.push(v);
            }
            StepFunction::new(bp, vals).unwrap()
        }
    }

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
    }

    proptest! {
        #[test]
        fn integral_is_linear(f in step_fn(), g in step_fn(), l in -6.0f64..0.0, w in 0.0f64..8.0) {
            let e = IntervalSet::interval(l, l + w + 1e-3).unwrap();
            let lhs = f.add(&g).integrate(&e);
            let rhs = f.integrate(&e) + g.integrate(&e);
            prop_assert!(rel_close(lhs, rhs, 1e-12), "{lhs} vs {rhs}");
        }

        #[test]
        fn translation_preserves_norm(f in dyadic_step_fn(), b in -10i32..10, p in 1.0f64..5.0) {
            prop_assert_eq!(f.translate(b as f64).lp_norm(p), f.lp_norm(p));
        }

        #[test]
        fn dilation_is_isometry(f in step_fn(), a in -4.0f64..4.0, p in 1.1f64..6.0) {
            prop_assert!(rel_close(f.dilate(a, p).lp_norm(p), f.lp_norm(p), 1e-12));
        }

        #[test]
        fn dilations_compose(f in step_fn(), a in -3.0f64..3.0, b in -3.0f64..3.0, p in 1.1f64..4.0) {
            let lhs = f.dilate(a, p).dilate(b, p);
            let rhs = f.dilate(a + b, p);
            for i in 0..400 {
                let t = -60.0 + 0.3 * i as f64 + 0.0123;
                let (x, y) = (lhs.evaluate(t), rhs.evaluate(t));
                prop_assert!((x - y).abs() < 1e-9 * rhs.sup_norm().max(1.0) || near_edge(&rhs, t));
            }
        }

        #[test]
        fn holder_inequality(f in step_fn(), g in step_fn(), p in 1.05f64..8.0) {
            let q = p / (p - 1.0);
            prop_assert!(f.inner(&g).abs() <= f.lp_norm(p) * g.lp_norm(q) * (1.0 + 1e-12));
        }

        #[test]
        fn inner_matches_product_integral(f in step_fn(), g in step_fn()) {
            prop_assert!(rel_close(f.inner(&g), f.multiply(&g).integral(), 1e-12));
        }

        #[test]
        fn dilation_translation_commute(f in step_fn(), a in -3.0f64..3.0, b in -4.0f64..4.0, p in 1.1f64..4.0) {
            let lhs = f.translate(b).dilate(a, p);
            let rhs = f.dilate(a, p).translate((-a).exp2() * b);
            for i in 0..400 {
                let t = -60.0 + 0.3 * i as f64 + 0.0071;
                let (x, y) = (lhs.evaluate(t), rhs.evaluate(t));
                prop_assert!((x - y).abs() < 1e-9 * rhs.sup_norm().max(1.0) || near_edge(&rhs, t));
            }
        }
    }

    // Sample points within rounding distance of a breakpoint may land in
    // either neighbouring cell.
    fn near_edge(f: &StepFunction, t: f64) -> bool {
        f.breakpoints()
            .iter()
            .any(|b| (b - t).abs() < 1e-9 * b.abs().max(1.0))
    }
}
