//! Measurable sets as finite unions of half-open intervals, exact suprema of
//! set-restricted integrals, and estimators for the suppression and
//! unconditionality constants of a translate frame.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{conjugate_exponent, CoordinateVector};
use crate::par::{self, Execution};
use crate::stepfn::StepFunction;
use crate::translate_frame::{translate_sum, Generator};

/// Disjoint, sorted half-open intervals `[l_i, r_i)` with `r_i < l_{i+1}`.
/// Endpoints may be infinite.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct IntervalSet {
    intervals: Vec<(f64, f64)>,
}

impl TryFrom<Vec<[f64; 2]>> for IntervalSet {
    type Error = Error;

    fn try_from(pairs: Vec<[f64; 2]>) -> Result<Self> {
        for [l, r] in &pairs {
            if l.is_nan() || r.is_nan() || l > r {
                return Err(Error::InvalidInterval(*l, *r));
            }
        }
        Ok(Self::from_pieces(pairs.into_iter().map(|[l, r]| (l, r))))
    }
}

impl From<IntervalSet> for Vec<[f64; 2]> {
    fn from(set: IntervalSet) -> Self {
        set.intervals.into_iter().map(|(l, r)| [l, r]).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SetOp {
    Union,
    Intersect,
    Difference,
    /// `window \ A`; the second operand is ignored.
    ComplementWithin(f64, f64),
}

pub fn set_algebra(a: &IntervalSet, b: &IntervalSet, op: SetOp) -> IntervalSet {
    match op {
        SetOp::Union => a.union(b),
        SetOp::Intersect => a.intersect(b),
        SetOp::Difference => a.difference(b),
        SetOp::ComplementWithin(lo, hi) => a.complement_within(lo, hi),
    }
}

impl IntervalSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn real_line() -> Self {
        IntervalSet {
            intervals: vec![(f64::NEG_INFINITY, f64::INFINITY)],
        }
    }

    /// `[left, right)`; empty when `left == right`.
    pub fn interval(left: f64, right: f64) -> Result<Self> {
        Self::try_from(vec![[left, right]])
    }

    /// Normalizes arbitrary pieces: empty pieces are dropped, overlapping or
    /// touching pieces merged.
    pub fn from_pieces(pieces: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let mut v: Vec<(f64, f64)> = pieces.into_iter().filter(|(l, r)| l < r).collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(v.len());
        for (l, r) in v {
            match out.last_mut() {
                Some(last) if l <= last.1 => last.1 = last.1.max(r),
                _ => out.push((l, r)),
            }
        }
        IntervalSet { intervals: out }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn is_real_line(&self) -> bool {
        self.intervals == [(f64::NEG_INFINITY, f64::INFINITY)]
    }

    pub fn measure(&self) -> f64 {
        self.intervals.iter().fold(0.0, |s, (l, r)| s + (r - l))
    }

    pub fn contains(&self, t: f64) -> bool {
        let idx = self.intervals.partition_point(|iv| iv.0 <= t);
        idx > 0 && t < self.intervals[idx - 1].1
    }

    pub fn translate(&self, b: f64) -> IntervalSet {
        IntervalSet {
            intervals: self.intervals.iter().map(|(l, r)| (l + b, r + b)).collect(),
        }
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        Self::from_pieces(self.intervals.iter().chain(&other.intervals).copied())
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let (a, b) = (&self.intervals, &other.intervals);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            let l = a[i].0.max(b[j].0);
            let r = a[i].1.min(b[j].1);
            if l < r {
                out.push((l, r));
            }
            if a[i].1 < b[j].1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalSet { intervals: out }
    }

    pub fn complement_within(&self, lo: f64, hi: f64) -> IntervalSet {
        let mut out = Vec::new();
        let mut cursor = lo;
        for &(l, r) in &self.intervals {
            if r <= lo {
                continue;
            }
            if l >= hi {
                break;
            }
            if l > cursor {
                out.push((cursor, l));
            }
            cursor = cursor.max(r);
        }
        if cursor < hi {
            out.push((cursor, hi));
        }
        Self::from_pieces(out)
    }

    pub fn difference(&self, other: &IntervalSet) -> IntervalSet {
        let (Some(first), Some(last)) = (self.intervals.first(), self.intervals.last()) else {
            return Self::empty();
        };
        self.intersect(&other.complement_within(first.0, last.1))
    }
}

/// `sup_E |∫_E c d|` with a set attaining it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SetSupremum {
    pub value: f64,
    pub witness: IntervalSet,
    /// `∫ (cd)^+`.
    pub positive_mass: f64,
    /// `∫ (cd)^-`.
    pub negative_mass: f64,
}

impl SetSupremum {
    /// `∫ |cd|`.
    pub fn total_variation(&self) -> f64 {
        self.positive_mass + self.negative_mass
    }
}

/// The supremum over all measurable `E` of `|∫_E c d|` equals
/// `max(∫ (cd)^+, ∫ (cd)^-)`, attained on the set where `cd` has that sign.
pub fn exact_set_supremum(c: &StepFunction, d: &StepFunction) -> SetSupremum {
    let prod = c.multiply(d);
    let (mut pos, mut neg) = (0.0, 0.0);
    for (l, r, v) in prod.cells() {
        if v > 0.0 {
            pos += v * (r - l);
        } else {
            neg -= v * (r - l);
        }
    }
    let positive = pos >= neg;
    SetSupremum {
        value: pos.max(neg),
        witness: prod.sign_set(positive),
        positive_mass: pos,
        negative_mass: neg,
    }
}

/// Skip draws whose norm product falls below this.
pub const MIN_NORM_PRODUCT: f64 = 1e-9;

/// Lower bounds for the suppression constant `B_s` and the unconditionality
/// constant `B_u` of a translate frame, next to the analytic upper bound
/// `C_s`.
///
/// Each ratio is normalized by `||x||_p ||x*||_q`:
/// `B_s >= sup_E |∫_E c d| / (||x|| ||x*||)` and
/// `B_u >= ∫ |c d| / (||x|| ||x*||)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantEstimate {
    pub suppression_lower: f64,
    pub unconditional_lower: f64,
    pub suppression_upper: f64,
    pub pairs_used: usize,
    pub seed: u64,
}

/// Trial stream: pair 0 is `(e_0, e_0)`, pair `k > 0` draws standard normal
/// `x`, `x*` on the window from ChaCha stream `k` of `seed`.
pub fn estimate_constants(
    g: &Generator,
    trials: usize,
    window: i64,
    p: f64,
    seed: u64,
    exec: Execution,
) -> ConstantEstimate {
    let q = conjugate_exponent(p);
    let ratios = par::map_range(exec, trials + 1, |k| {
        let (x, y) = if k == 0 {
            (CoordinateVector::unit(0), CoordinateVector::unit(0))
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let x = CoordinateVector::gaussian(&mut rng, window);
            let y = CoordinateVector::gaussian(&mut rng, window);
            (x, y)
        };
        let norms = x.norm(p) * y.norm(q);
        if norms < MIN_NORM_PRODUCT {
            return None;
        }
        let c = translate_sum(g.function(), &x, Execution::Sequential);
        let d = translate_sum(g.function(), &y, Execution::Sequential);
        let sup = exact_set_supremum(&c, &d);
        Some((sup.value / norms, sup.total_variation() / norms))
    });
    let used: Vec<(f64, f64)> = ratios.into_iter().flatten().collect();
    ConstantEstimate {
        suppression_lower: used.iter().fold(0.0, |m, r| m.max(r.0)),
        unconditional_lower: used.iter().fold(0.0, |m, r| m.max(r.1)),
        suppression_upper: g.suppression_constant(),
        pairs_used: used.len(),
        seed,
    }
}

pub fn suppression_constant_lower_bound(
    g: &Generator,
    trials: usize,
    window: i64,
    p: f64,
    seed: u64,
) -> f64 {
    estimate_constants(g, trials, window, p, seed, Execution::default()).suppression_lower
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::translate_frame::{build_rademacher_generator, validate_generator, RademacherSpec};
    use proptest::prelude::*;
    use rand::Rng;

    fn iv(l: f64, r: f64) -> IntervalSet {
        IntervalSet::interval(l, r).unwrap()
    }

    #[test]
    fn set_algebra_examples() {
        assert_eq!(
            set_algebra(&iv(0.0, 1.0), &iv(1.0, 2.0), SetOp::Union),
            iv(0.0, 2.0)
        );
        assert!(set_algebra(&iv(0.0, 1.0), &iv(2.0, 3.0), SetOp::Intersect).is_empty());
        let a = IntervalSet::from_pieces([(0.0, 2.0), (3.0, 5.0)]);
        assert_eq!(
            set_algebra(&a, &iv(1.0, 4.0), SetOp::Difference),
            IntervalSet::from_pieces([(0.0, 1.0), (4.0, 5.0)])
        );
        assert_eq!(
            set_algebra(
                &a,
                &IntervalSet::empty(),
                SetOp::ComplementWithin(-1.0, 6.0)
            ),
            IntervalSet::from_pieces([(-1.0, 0.0), (2.0, 3.0), (5.0, 6.0)])
        );
    }

    #[test]
    fn interval_validation_and_serde() {
        assert!(IntervalSet::interval(2.0, 1.0).is_err());
        assert!(IntervalSet::interval(1.0, 1.0).unwrap().is_empty());
        let set: IntervalSet = serde_json::from_str("[[2,3],[0,1],[0.5,1.5]]").unwrap();
        assert_eq!(set, IntervalSet::from_pieces([(0.0, 1.5), (2.0, 3.0)]));
        assert_eq!(
            serde_json::to_string(&set).unwrap(),
            "[[0.0,1.5],[2.0,3.0]]"
        );
        assert!(serde_json::from_str::<IntervalSet>("[[3,2]]").is_err());
    }

    #[test]
    fn contains_is_half_open() {
        let s = IntervalSet::from_pieces([(0.0, 1.0), (2.0, 3.0)]);
        assert!(s.contains(0.0) && s.contains(2.5));
        assert!(!s.contains(1.0) && !s.contains(3.0) && !s.contains(-0.1));
        assert!(IntervalSet::real_line().contains(1e300));
    }

    #[test]
    fn supremum_examples() {
        let unit = StepFunction::indicator(0.0, 1.0).unwrap();
        let s = exact_set_supremum(&unit, &unit.scale(2.0));
        assert_eq!(s.value, 2.0);
        assert_eq!(s.witness, iv(0.0, 1.0));

        let s = exact_set_supremum(&StepFunction::haar(), &unit);
        assert_eq!(s.value, 0.5);
        assert_eq!(s.witness, iv(0.0, 0.5));

        let g = validate_generator(&unit, None, 1e-10).unwrap();
        let c = g.analysis_function(&CoordinateVector::unit(0));
        assert_eq!(exact_set_supremum(&c, &c).value, 1.0);
    }

    #[test]
    fn indicator_generator_constant_is_one() {
        let g =
            validate_generator(&StepFunction::indicator(0.0, 1.0).unwrap(), None, 1e-10).unwrap();
        for p in [1.5, 2.0, 3.0] {
            let est = estimate_constants(&g, 200, 6, p, 3, Execution::default());
            assert_eq!(est.suppression_lower, 1.0);
            assert!(est.suppression_lower <= est.suppression_upper + 1e-8);
        }
    }

    #[test]
    fn rademacher_estimates_stay_below_upper_bound() {
        let a: CoordinateVector = [(0, 0.6), (1, 0.0), (2, -0.8)].into_iter().collect();
        let g = build_rademacher_generator(&RademacherSpec::new(a)).unwrap();
        for p in [1.5, 2.0, 3.0] {
            let est = estimate_constants(&g, 100, 5, p, 9, Execution::default());
            assert!(est.suppression_lower >= 1.0);
            assert!(est.suppression_lower <= g.suppression_constant() + 1e-8);
            assert!(est.suppression_lower <= est.unconditional_lower);
            assert!(est.unconditional_lower <= 2.0 * est.suppression_lower + 1e-8);
        }
    }

    #[test]
    fn estimates_are_policy_independent() {
        let a: CoordinateVector = [(0, 0.8), (1, 0.6)].into_iter().collect();
        let g = build_rademacher_generator(&RademacherSpec::new(a)).unwrap();
        let s = estimate_constants(&g, 40, 4, 2.5, 1, Execution::Sequential);
        let p = estimate_constants(&g, 40, 4, 2.5, 1, Execution::Parallel);
        assert_eq!(s, p);
    }

    fn random_set(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> IntervalSet {
        let k = rng.random_range(0..6);
        IntervalSet::from_pieces((0..k).map(|_| {
            let a = rng.random_range(lo..hi);
            let b = rng.random_range(lo..hi);
            (a.min(b), a.max(b))
        }))
    }

    #[test]
    fn witness_is_optimal_over_random_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c =
            StepFunction::new(vec![-1.0, 0.3, 0.9, 2.0, 2.2], vec![1.0, -2.0, 0.5, 3.0]).unwrap();
        let d = StepFunction::new(vec![-0.5, 0.1, 1.7, 2.5], vec![-1.0, 1.5, 2.0]).unwrap();
        let sup = exact_set_supremum(&c, &d);
        let prod = c.multiply(&d);
        assert!((prod.integrate(&sup.witness).abs() - sup.value).abs() < 1e-12);
        for _ in 0..1000 {
            let e = random_set(&mut rng, -2.0, 3.0);
            assert!(prod.integrate(&e).abs() <= sup.value + 1e-12);
        }
    }

    fn step() -> impl Strategy<Value = StepFunction> {
        (
            prop::collection::vec((0.05f64..1.5, -3.0f64..3.0), 1..8),
            -3.0f64..3.0,
        )
            .prop_map(|(cells, start)| {
                let mut bp = vec![start];
                let mut vals = Vec::new();
                for (w, v) in cells {
                    bp.push(bp.last().unwrap() + w);
                    vals.push(v);
                }
                StepFunction::new(bp, vals).unwrap()
            })
    }

    fn pieces() -> impl Strategy<Value = IntervalSet> {
        prop::collection::vec((-5.0f64..5.0, 0.0f64..3.0), 0..5)
            .prop_map(|v| IntervalSet::from_pieces(v.into_iter().map(|(l, w)| (l, l + w))))
    }

    proptest! {
        #[test]
        fn supremum_symmetric_and_homogeneous(c in step(), d in step(), lambda in -4.0f64..4.0) {
            let a = exact_set_supremum(&c, &d).value;
            let b = exact_set_supremum(&d, &c).value;
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
            let s = exact_set_supremum(&c.scale(lambda), &d).value;
            prop_assert!((s - lambda.abs() * a).abs() <= 1e-12 * s.max(1.0));
        }

        #[test]
        fn measure_is_additive(a in pieces(), b in pieces()) {
            let lhs = a.difference(&b).measure() + a.intersect(&b).measure();
            prop_assert!((lhs - a.measure()).abs() < 1e-12);
            let u = a.union(&b).measure();
            prop_assert!((u - (a.measure() + b.measure() - a.intersect(&b).measure())).abs() < 1e-12);
        }

        #[test]
        fn normalized_form_is_disjoint_sorted(a in pieces(), b in pieces()) {
            for s in [a.union(&b), a.intersect(&b), a.difference(&b), a.complement_within(-6.0, 6.0)] {
                for w in s.intervals().windows(2) {
                    prop_assert!(w[0].1 < w[1].0);
                }
                prop_assert!(s.intervals().iter().all(|(l, r)| l < r));
            }
        }
    }
}
