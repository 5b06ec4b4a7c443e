//! Continuous wavelet frames of `L_p(R)` built from a step-function wavelet.
//!
//! Members are `psi_{a,b} = D_a T_b psi` with `D_a f(t) = 2^{a/p} f(2^a t)`
//! and `T_b f(t) = f(t - b)`; dual members use the same operators on
//! `L_{p'}` applied to `psi*`. Snapping `(a, b)` to a `1/N` grid makes the
//! reconstruction integral over a box `[-M, M]^2` a finite sum, evaluated
//! here exactly.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{check_exponent, conjugate_exponent};
use crate::par::{self, Execution};
use crate::stepfn::StepFunction;

/// `||psi||_p` must equal 1 to this tolerance.
pub const NORM_TOL: f64 = 1e-12;
/// Biorthogonality residual accepted for a registered wavelet pair.
pub const BIORTHOGONALITY_TOL: f64 = 1e-10;
/// Dilation and translation indices checked for biorthogonality.
pub const BIORTHOGONALITY_RANGE: i64 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Primal,
    Dual,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WaveletSystem {
    mother: StepFunction,
    dual_mother: StepFunction,
    p: f64,
    p_conj: f64,
}

impl WaveletSystem {
    /// Haar wavelet, self-dual under the `p` / `p'` normalization.
    pub fn haar(p: f64) -> Result<Self> {
        Self::new(StepFunction::haar(), StepFunction::haar(), p)
    }

    /// Registers a wavelet pair after checking `||psi||_p = 1` and
    /// `<psi_{n,k}, psi*_{n',k'}> = delta` for `|n|, |k| <= 4`.
    pub fn new(mother: StepFunction, dual_mother: StepFunction, p: f64) -> Result<Self> {
        let p = check_exponent(p)?;
        let ws = WaveletSystem {
            mother,
            dual_mother,
            p,
            p_conj: conjugate_exponent(p),
        };
        let norm = ws.mother.lp_norm(p);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidWavelet(format!(
                "||psi||_p = {norm}, expected 1"
            )));
        }
        let residual = ws.biorthogonality_residual(BIORTHOGONALITY_RANGE);
        if residual > BIORTHOGONALITY_TOL {
            return Err(Error::InvalidWavelet(format!(
                "biorthogonality residual {residual:e} exceeds {BIORTHOGONALITY_TOL:e}"
            )));
        }
        Ok(ws)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn p_conj(&self) -> f64 {
        self.p_conj
    }

    pub fn mother(&self) -> &StepFunction {
        &self.mother
    }

    pub fn dual_mother(&self) -> &StepFunction {
        &self.dual_mother
    }

    /// `2^{a/p} psi(2^a t - b)`, or `2^{a/p'} psi*(2^a t - b)` on the dual side.
    pub fn member(&self, a: f64, b: f64, side: Side) -> StepFunction {
        match side {
            Side::Primal => self.mother.translate(b).dilate(a, self.p),
            Side::Dual => self.dual_mother.translate(b).dilate(a, self.p_conj),
        }
    }

    /// `psi*_{a,b}(x)`.
    pub fn coefficient(&self, a: f64, b: f64, x: &StepFunction) -> f64 {
        self.member(a, b, Side::Dual).inner(x)
    }

    /// Largest `|<psi_{n,k}, psi*_{n',k'}> - delta|` over the index cube.
    pub fn biorthogonality_residual(&self, range: i64) -> f64 {
        let idx: Vec<(i64, i64)> = (-range..=range)
            .flat_map(|n| (-range..=range).map(move |k| (n, k)))
            .collect();
        let primal: Vec<StepFunction> = idx
            .iter()
            .map(|&(n, k)| self.member(n as f64, k as f64, Side::Primal))
            .collect();
        let dual: Vec<StepFunction> = idx
            .iter()
            .map(|&(n, k)| self.member(n as f64, k as f64, Side::Dual))
            .collect();
        let mut worst: f64 = 0.0;
        for (i, f) in primal.iter().enumerate() {
            for (j, g) in dual.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((f.inner(g) - target).abs());
            }
        }
        worst
    }

    /// `D_{-r/N}` then `T_{-s/N}`: the conjugate `y_{r,s}` of `x`.
    pub fn conjugate(&self, x: &StepFunction, r: u32, s: u32, n: u32) -> StepFunction {
        let n = n as f64;
        x.dilate(-(r as f64) / n, self.p).translate(-(s as f64) / n)
    }

    /// `T_{s/N}` then `D_{r/N}`, inverting [`WaveletSystem::conjugate`].
    pub fn unconjugate(&self, y: &StepFunction, r: u32, s: u32, n: u32) -> StepFunction {
        let n = n as f64;
        y.translate(s as f64 / n).dilate(r as f64 / n, self.p)
    }
}

/// Integer part and `1/N` digit of both parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GridIndex {
    pub l: i64,
    pub r: u32,
    pub m: i64,
    pub s: u32,
    pub n: u32,
}

impl GridIndex {
    /// `(l + r/N, m + s 2^l / N)`.
    pub fn point(&self) -> (f64, f64) {
        let n = self.n as f64;
        let a = self.l as f64 + self.r as f64 / n;
        let b = self.m as f64 + self.s as f64 * (self.l as f64).exp2() / n;
        (a, b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SnappedPoint {
    pub index: GridIndex,
    pub a: f64,
    pub b: f64,
}

// `v*N` values within this of an integer are treated as that integer, so
// decimal inputs like 0.7 land on their intended grid cell.
const SNAP_SLACK: f64 = 1e-9;

fn grid_digits(v: f64, n: u32) -> (i64, u32) {
    let scaled = v * n as f64;
    let nearest = scaled.round();
    let cell = if (scaled - nearest).abs() < SNAP_SLACK {
        nearest
    } else {
        scaled.floor()
    };
    let cell = cell as i64;
    let whole = cell.div_euclid(n as i64);
    (whole, cell.rem_euclid(n as i64) as u32)
}

/// Finds `l, r` with `l + r/N <= a < l + (r+1)/N` (and `m, s` likewise for
/// `b`); the snapped point is `(l + r/N, m + s 2^l / N)`.
pub fn snap_to_grid(a: f64, b: f64, n: u32) -> SnappedPoint {
    assert!(n >= 1, "grid resolution must be positive");
    let (l, r) = grid_digits(a, n);
    let (m, s) = grid_digits(b, n);
    let index = GridIndex { l, r, m, s, n };
    let (a, b) = index.point();
    SnappedPoint { index, a, b }
}

/// One term of the box sum: the grid point and `psi*_{a,b}(x)` there.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoxTerm {
    pub index: GridIndex,
    pub coefficient: f64,
}

fn lattice(half_width: u32) -> impl Iterator<Item = i64> + Clone {
    let h = half_width as i64;
    -h..h
}

/// Coefficients `psi*_{l+r/N, m+s2^l/N}(x)` for `l, m in [-M, M-1]` and
/// `r, s in [0, N-1]`, in `(r, s, l, m)` order. Zero coefficients are kept.
pub fn box_terms(
    ws: &WaveletSystem,
    x: &StepFunction,
    half_width: u32,
    n: u32,
    exec: Execution,
) -> Vec<BoxTerm> {
    let mut indices = Vec::new();
    for r in 0..n {
        for s in 0..n {
            for l in lattice(half_width) {
                for m in lattice(half_width) {
                    indices.push(GridIndex { l, r, m, s, n });
                }
            }
        }
    }
    par::map_slice(exec, &indices, |idx| {
        let (a, b) = idx.point();
        BoxTerm {
            index: *idx,
            coefficient: ws.coefficient(a, b, x),
        }
    })
}

/// `N^{-2} sum coefficient * psi_{a,b}` over the given terms.
pub fn partial_sum(ws: &WaveletSystem, terms: &[BoxTerm], exec: Execution) -> StepFunction {
    let live: Vec<&BoxTerm> = terms.iter().filter(|t| t.coefficient != 0.0).collect();
    let pieces = par::map_slice(exec, &live, |t| {
        let (a, b) = t.index.point();
        let weight = t.coefficient / (t.index.n as f64 * t.index.n as f64);
        ws.member(a, b, Side::Primal).scale(weight)
    });
    par::tree_sum(exec, pieces)
}

/// `sum_{l,m=-M}^{M-1} psi*_{l,m}(x) psi_{l,m}`.
pub fn discrete_partial_reconstruct(
    ws: &WaveletSystem,
    x: &StepFunction,
    half_width: u32,
) -> StepFunction {
    discrete_partial_reconstruct_with(ws, x, half_width, Execution::default())
}

pub fn discrete_partial_reconstruct_with(
    ws: &WaveletSystem,
    x: &StepFunction,
    half_width: u32,
    exec: Execution,
) -> StepFunction {
    partial_sum(ws, &box_terms(ws, x, half_width, 1, exec), exec)
}

/// `∫_{-M}^{M} ∫_{-M}^{M} psi^{N*}_{a,b}(x) psi^N_{a,b} da db`, exact because
/// the snapped integrand is constant on each `1/N x 1/N` parameter cell.
pub fn box_reconstruct(
    ws: &WaveletSystem,
    x: &StepFunction,
    half_width: u32,
    n: u32,
) -> StepFunction {
    box_reconstruct_with(ws, x, half_width, n, Execution::default())
}

pub fn box_reconstruct_with(
    ws: &WaveletSystem,
    x: &StepFunction,
    half_width: u32,
    n: u32,
    exec: Execution,
) -> StepFunction {
    partial_sum(ws, &box_terms(ws, x, half_width, n, exec), exec)
}

/// The box integral evaluated the other way round:
/// `N^{-2} sum_{r,s} D_{r/N} T_{s/N} P_M (T_{-s/N} D_{-r/N} x)`, where `P_M`
/// is the integer-lattice partial reconstruction.
pub fn conjugated_reconstruction(
    ws: &WaveletSystem,
    x: &StepFunction,
    half_width: u32,
    n: u32,
    exec: Execution,
) -> StepFunction {
    let pairs: Vec<(u32, u32)> = (0..n).flat_map(|r| (0..n).map(move |s| (r, s))).collect();
    let weight = 1.0 / (n as f64 * n as f64);
    let pieces = par::map_slice(exec, &pairs, |&(r, s)| {
        let y = ws.conjugate(x, r, s, n);
        let py = discrete_partial_reconstruct_with(ws, &y, half_width, Execution::Sequential);
        ws.unconjugate(&py, r, s, n).scale(weight)
    });
    par::tree_sum(exec, pieces)
}

/// `max_{r,s} ||y_{r,s} - P_M y_{r,s}||_p`, which bounds the box
/// reconstruction error.
pub fn conjugate_tail_bound(
    ws: &WaveletSystem,
    x: &StepFunction,
    half_width: u32,
    n: u32,
    exec: Execution,
) -> f64 {
    let pairs: Vec<(u32, u32)> = (0..n).flat_map(|r| (0..n).map(move |s| (r, s))).collect();
    par::map_slice(exec, &pairs, |&(r, s)| {
        let y = ws.conjugate(x, r, s, n);
        let py = discrete_partial_reconstruct_with(ws, &y, half_width, Execution::Sequential);
        y.sub(&py).lp_norm(ws.p)
    })
    .into_iter()
    .fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub m: u32,
    pub n: u32,
    pub p: f64,
    pub error: f64,
    pub oracle_bound: f64,
    pub runtime_ms: f64,
}

/// `||x - box_reconstruct(x, M, N)||_p` for every `(M, N)`, next to the
/// conjugate tail bound. Rows are ordered by `M`, then `N`.
pub fn convergence_study(
    ws: &WaveletSystem,
    x: &StepFunction,
    m_list: &[u32],
    n_list: &[u32],
    exec: Execution,
) -> Vec<ConvergenceRow> {
    let mut rows = Vec::new();
    for &m in m_list {
        for &n in n_list {
            let start = Instant::now();
            let approx = box_reconstruct_with(ws, x, m, n, exec);
            let error = x.sub(&approx).lp_norm(ws.p);
            let oracle_bound = conjugate_tail_bound(ws, x, m, n, exec);
            rows.push(ConvergenceRow {
                m,
                n,
                p: ws.p,
                error,
                oracle_bound,
                runtime_ms: start.elapsed().as_secs_f64() * 1e3,
            });
        }
    }
    rows
}

/// `max_{r,s} ||sum_{kept (l,m)} psi*(x) psi||_p / ||x||_p` over the slices of
/// a kept index set; the restricted box sum has norm at most this ratio
/// times `||x||_p`.
pub fn restricted_slice_ratio(ws: &WaveletSystem, x: &StepFunction, kept: &[BoxTerm]) -> f64 {
    let norm = x.lp_norm(ws.p);
    if norm == 0.0 {
        return 0.0;
    }
    let mut slices: Vec<((u32, u32), Vec<BoxTerm>)> = Vec::new();
    for t in kept {
        let key = (t.index.r, t.index.s);
        match slices.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(*t),
            None => slices.push((key, vec![*t])),
        }
    }
    slices
        .iter()
        .map(|(_, terms)| {
            // undo the N^{-2} weight applied by `partial_sum`
            let n = terms[0].index.n as f64;
            partial_sum(ws, terms, Execution::Sequential).lp_norm(ws.p) * n * n / norm
        })
        .fold(0.0, f64::max)
}

/// Largest `||P_S y||_p / ||y||_p` over random subsets `S` of the integer
/// lattice `[-M, M-1]^2`, for `y` in `probes`: a sampled lower bound for the
/// discrete suppression constant.
pub fn measured_suppression_constant(
    ws: &WaveletSystem,
    probes: &[StepFunction],
    half_width: u32,
    trials: usize,
    seed: u64,
    exec: Execution,
) -> f64 {
    let per_probe = par::map_range(exec, probes.len(), |i| {
        let y = &probes[i];
        let norm = y.lp_norm(ws.p);
        if norm == 0.0 {
            return 0.0;
        }
        let terms = box_terms(ws, y, half_width, 1, Execution::Sequential);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let mut best: f64 = 0.0;
        for _ in 0..trials {
            let kept: Vec<BoxTerm> = terms
                .iter()
                .copied()
                .filter(|_| rng.random_bool(0.5))
                .collect();
            best = best.max(partial_sum(ws, &kept, Execution::Sequential).lp_norm(ws.p) / norm);
        }
        best
    });
    per_probe.into_iter().fold(0.0, f64::max)
}

/// Finite evidence for the three limit hypotheses used to pass from the
/// snapped frames to the continuous one, over the box `[-K, K]^2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitEvidence {
    pub n: u32,
    pub half_width: u32,
    /// `||x - ∫_{box} psi^{N*}_{a,b}(x) psi^N_{a,b}||_p`.
    pub reconstruction_error: f64,
    /// `∫_{box} |(psi*_{a,b} - psi^{N*}_{a,b})(x)|`, midpoint rule.
    pub dual_deviation: f64,
    /// `∫_{box} |g(psi^N_{a,b} - psi_{a,b})|`, midpoint rule.
    pub primal_deviation: f64,
}

pub fn limit_evidence(
    ws: &WaveletSystem,
    x: &StepFunction,
    g: &StepFunction,
    half_width: u32,
    n: u32,
    samples_per_unit: u32,
    exec: Execution,
) -> LimitEvidence {
    let k = half_width as f64;
    let per_axis = 2 * half_width * samples_per_unit;
    let h = 1.0 / samples_per_unit as f64;
    let rows = par::map_range(exec, per_axis as usize, |i| {
        let a = -k + (i as f64 + 0.5) * h;
        let mut dual = 0.0;
        let mut primal = 0.0;
        for j in 0..per_axis {
            let b = -k + (j as f64 + 0.5) * h;
            let snap = snap_to_grid(a, b, n);
            dual += (ws.coefficient(a, b, x) - ws.coefficient(snap.a, snap.b, x)).abs();
            let exact = ws.member(a, b, Side::Primal).inner(g);
            let snapped = ws.member(snap.a, snap.b, Side::Primal).inner(g);
            primal += (snapped - exact).abs();
        }
        (dual * h * h, primal * h * h)
    });
    let approx = box_reconstruct_with(ws, x, half_width, n, exec);
    LimitEvidence {
        n,
        half_width,
        reconstruction_error: x.sub(&approx).lp_norm(ws.p),
        dual_deviation: rows.iter().fold(0.0, |s, r| s + r.0),
        primal_deviation: rows.iter().fold(0.0, |s, r| s + r.1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn haar(p: f64) -> WaveletSystem {
        WaveletSystem::haar(p).unwrap()
    }

    #[test]
    fn haar_system_is_valid_for_several_exponents() {
        for p in [1.2, 1.5, 2.0, 3.0, 8.0] {
            let ws = haar(p);
            assert!(ws.biorthogonality_residual(4) < 1e-12);
            assert!((ws.p() / ws.p_conj() - (ws.p() - 1.0)).abs() < 1e-12);
        }
        assert!(WaveletSystem::haar(1.0).is_err());
    }

    #[test]
    fn unnormalized_mother_is_rejected() {
        let psi = StepFunction::haar().scale(2.0);
        assert!(matches!(
            WaveletSystem::new(psi, StepFunction::haar(), 2.0),
            Err(Error::InvalidWavelet(_))
        ));
        let wide =
            StepFunction::new(vec![0.0, 1.0, 2.0], vec![0.5f64.sqrt(), -(0.5f64.sqrt())]).unwrap();
        // unit norm in L_2, but integer translates overlap
        assert!(WaveletSystem::new(wide.clone(), wide, 2.0).is_err());
    }

    #[test]
    fn member_examples() {
        let ws = haar(2.0);
        assert_eq!(ws.member(0.0, 0.0, Side::Primal), StepFunction::haar());
        let m = ws.member(1.0, 0.0, Side::Primal);
        let s = 2f64.sqrt();
        assert!((m.evaluate(0.1) - s).abs() < 1e-15 && (m.evaluate(0.3) + s).abs() < 1e-15);
        assert_eq!(m.support(), Some((0.0, 0.5)));
        for p in [1.5, 3.0] {
            let ws = haar(p);
            for (n, k) in [(-2, 3), (0, -1), (3, 5)] {
                let (a, b) = (n as f64, k as f64);
                let v = ws
                    .member(a, b, Side::Primal)
                    .inner(&ws.member(a, b, Side::Dual));
                assert!((v - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn member_matches_pointwise_formula() {
        let ws = haar(3.0);
        let (a, b) = (0.7, -1.3);
        let m = ws.member(a, b, Side::Primal);
        for i in 0..500 {
            let t = -3.0 + 0.01237 * i as f64;
            let direct = (a / 3.0).exp2() * StepFunction::haar().evaluate(a.exp2() * t - b);
            let near = m.breakpoints().iter().any(|&bp| (bp - t).abs() < 1e-9);
            assert!(near || (m.evaluate(t) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn snapping_examples() {
        let p = snap_to_grid(2.0, -3.0, 7);
        assert_eq!((p.a, p.b), (2.0, -3.0));
        assert_eq!((p.index.r, p.index.s), (0, 0));

        let p = snap_to_grid(0.3, 0.7, 10);
        assert_eq!((p.index.l, p.index.r, p.index.m, p.index.s), (0, 3, 0, 7));
        assert!((p.a - 0.3).abs() < 1e-15 && (p.b - 0.7).abs() < 1e-15);

        let p = snap_to_grid(1.3, 0.25, 10);
        assert_eq!((p.index.l, p.index.r, p.index.m, p.index.s), (1, 3, 0, 2));
        assert!((p.a - 1.3).abs() < 1e-15);
        assert!((p.b - 0.4).abs() < 1e-15);

        let p = snap_to_grid(-0.05, -1.95, 10);
        assert_eq!((p.index.l, p.index.r, p.index.m, p.index.s), (-1, 9, -2, 0));
    }

    #[test]
    fn snapped_point_is_constant_on_cells() {
        for n in [1u32, 3, 4, 7] {
            for l in -2..2i64 {
                for r in 0..n {
                    for m in -2..2i64 {
                        for s in 0..n {
                            let base = GridIndex { l, r, m, s, n }.point();
                            for (u, v) in [(0.01, 0.01), (0.5, 0.37), (0.98, 0.99)] {
                                let a = l as f64 + (r as f64 + u) / n as f64;
                                let b = m as f64 + (s as f64 + v) / n as f64;
                                let snap = snap_to_grid(a, b, n);
                                assert_eq!(snap.index, GridIndex { l, r, m, s, n });
                                assert_eq!((snap.a, snap.b), base);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn mother_wavelet_reconstructs_exactly() {
        for p in [1.5, 2.0, 3.0] {
            let ws = haar(p);
            let psi = StepFunction::haar();
            for m in 1..4 {
                assert!(discrete_partial_reconstruct(&ws, &psi, m).sup_distance(&psi) < 1e-12);
                assert!(box_reconstruct(&ws, &psi, m, 1).sup_distance(&psi) < 1e-12);
            }
        }
    }

    #[test]
    fn fine_member_outside_range_is_annihilated() {
        let ws = haar(2.0);
        let x = ws.member(3.0, 0.0, Side::Primal);
        assert!(discrete_partial_reconstruct(&ws, &x, 1).is_zero());
    }

    #[test]
    fn n_one_is_the_discrete_reconstruction() {
        let ws = haar(2.5);
        let x = StepFunction::new(vec![-0.4, 0.3, 1.1], vec![1.0, -0.5]).unwrap();
        for m in 1..4 {
            let a = box_reconstruct(&ws, &x, m, 1);
            let b = discrete_partial_reconstruct(&ws, &x, m);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn l2_discrete_error_is_monotone() {
        let ws = haar(2.0);
        let x = StepFunction::new(vec![-0.7, 0.3, 1.6], vec![2.0, -1.0]).unwrap();
        let errs: Vec<f64> = (1..6)
            .map(|m| {
                x.sub(&discrete_partial_reconstruct(&ws, &x, m))
                    .lp_norm(2.0)
            })
            .collect();
        for w in errs.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "{errs:?}");
        }
    }

    #[test]
    fn conjugation_round_trip() {
        let ws = haar(1.5);
        let x = StepFunction::new(vec![0.0, 0.3, 0.9], vec![1.0, 4.0]).unwrap();
        let y = ws.conjugate(&x, 3, 2, 4);
        assert!((y.lp_norm(1.5) - x.lp_norm(1.5)).abs() < 1e-12);
        assert!(ws.unconjugate(&y, 3, 2, 4).sup_distance(&x) < 1e-12);
    }

    #[test]
    fn box_reconstruction_is_linear() {
        let ws = haar(3.0);
        let x = StepFunction::indicator(0.0, 0.3).unwrap();
        let y = StepFunction::new(vec![-0.5, 0.2, 0.45], vec![1.0, -2.0]).unwrap();
        let lambda = -1.7;
        let lhs = box_reconstruct(&ws, &x.add(&y.scale(lambda)), 2, 3);
        let rhs = box_reconstruct(&ws, &x, 2, 3).add(&box_reconstruct(&ws, &y, 2, 3).scale(lambda));
        assert!(lhs.sup_distance(&rhs) < 1e-10);
    }

    #[test]
    fn policies_agree_bitwise() {
        let ws = haar(2.0);
        let x = StepFunction::indicator(0.1, 0.8).unwrap();
        let a = box_reconstruct_with(&ws, &x, 2, 3, Execution::Sequential);
        let b = box_reconstruct_with(&ws, &x, 2, 3, Execution::Parallel);
        assert_eq!(a, b);
    }

    #[test]
    fn convergence_table_shape() {
        let ws = haar(2.0);
        let x = StepFunction::indicator(0.0, 0.3).unwrap();
        let rows = convergence_study(&ws, &x, &[1, 2], &[1, 2], Execution::default());
        assert_eq!(rows.len(), 4);
        assert_eq!((rows[1].m, rows[1].n), (1, 2));
        for row in &rows {
            assert!(row.error <= row.oracle_bound + 1e-9);
        }
    }

    #[test]
    fn limit_evidence_shrinks_with_n() {
        let ws = haar(2.0);
        let x = StepFunction::indicator(-0.2, 0.6).unwrap();
        let g = StepFunction::new(vec![-0.5, 0.1, 0.9], vec![1.0, -1.0]).unwrap();
        let coarse = limit_evidence(&ws, &x, &g, 1, 1, 12, Execution::default());
        let fine = limit_evidence(&ws, &x, &g, 1, 6, 12, Execution::default());
        assert!(fine.dual_deviation < coarse.dual_deviation);
        assert!(fine.primal_deviation < coarse.primal_deviation);
    }
}
