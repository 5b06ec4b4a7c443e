//! Probes on discrete frames `(x_j, f_j)` over the natural numbers with
//! counting measure: restricted reconstructions `P_E`, tails `T_E`, their
//! adjoints, and the exact-integer three-term counterexample in `c_0`.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{check_exponent, conjugate_exponent, CoordinateVector};
use crate::par::{self, Execution};

/// Reconstruction residual accepted by [`DiscreteFrame::verify`].
pub const RECONSTRUCTION_TOL: f64 = 1e-10;
/// Random unit vectors used by the estimators.
pub const DEFAULT_SAMPLES: usize = 10_000;

/// Which sequence space the frame lives in; fixes both norms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpaceTag {
    Lp(f64),
    C0,
    L1,
}

impl SpaceTag {
    pub fn check(self) -> Result<Self> {
        if let SpaceTag::Lp(p) = self {
            check_exponent(p)?;
        }
        Ok(self)
    }

    pub fn norm(self, x: &CoordinateVector) -> f64 {
        match self {
            SpaceTag::Lp(p) => x.norm(p),
            SpaceTag::C0 => x.sup_norm(),
            SpaceTag::L1 => x.l1_norm(),
        }
    }

    /// Norm of a functional in the dual space (`l_q`, `l_1` or `l_inf`).
    pub fn dual_norm(self, f: &CoordinateVector) -> f64 {
        match self {
            SpaceTag::Lp(p) => f.norm(conjugate_exponent(p)),
            SpaceTag::C0 => f.l1_norm(),
            SpaceTag::L1 => f.sup_norm(),
        }
    }

    pub fn label(self) -> String {
        match self {
            SpaceTag::Lp(p) => format!("lp({p})"),
            SpaceTag::C0 => "c0".into(),
            SpaceTag::L1 => "l1".into(),
        }
    }
}

/// A set of frame labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IndexSet {
    All,
    /// `from..=to`.
    Range {
        from: i64,
        to: i64,
    },
    /// `{ n : n ≡ residue (mod modulus) }`.
    Residue {
        modulus: i64,
        residue: i64,
    },
    Listed(BTreeSet<i64>),
}

impl IndexSet {
    pub fn contains(&self, n: i64) -> bool {
        match self {
            IndexSet::All => true,
            IndexSet::Range { from, to } => (*from..=*to).contains(&n),
            IndexSet::Residue { modulus, residue } => {
                n.rem_euclid(*modulus) == residue.rem_euclid(*modulus)
            }
            IndexSet::Listed(s) => s.contains(&n),
        }
    }

    pub fn check(&self) -> Result<()> {
        match self {
            IndexSet::Residue { modulus, .. } if *modulus <= 0 => Err(Error::InvalidParameter(
                format!("modulus must be positive, got {modulus}"),
            )),
            _ => Ok(()),
        }
    }

    pub fn label(&self) -> String {
        match self {
            IndexSet::All => "all".into(),
            IndexSet::Range { from, to } => format!("[{from}..{to}]"),
            IndexSet::Residue { modulus, residue } => format!("{residue} mod {modulus}"),
            IndexSet::Listed(s) => {
                let items: Vec<String> = s.iter().map(|n| n.to_string()).collect();
                format!("{{{}}}", items.join(" "))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FramePair {
    pub label: i64,
    pub x: CoordinateVector,
    pub f: CoordinateVector,
}

/// Finitely many labelled pairs `(x_j, f_j)` in a sequence space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteFrame {
    pairs: Vec<FramePair>,
    space: SpaceTag,
}

impl DiscreteFrame {
    pub fn new(pairs: Vec<FramePair>, space: SpaceTag) -> Result<Self> {
        Ok(DiscreteFrame {
            pairs,
            space: space.check()?,
        })
    }

    /// `(e_c, e*_c)` labelled by `c`, for `c` in `lo..=hi`.
    pub fn unit_vectors(space: SpaceTag, lo: i64, hi: i64) -> Result<Self> {
        let pairs = (lo..=hi)
            .map(|c| FramePair {
                label: c,
                x: CoordinateVector::unit(c),
                f: CoordinateVector::unit(c),
            })
            .collect();
        Self::new(pairs, space)
    }

    pub fn pairs(&self) -> &[FramePair] {
        &self.pairs
    }

    pub fn space(&self) -> SpaceTag {
        self.space
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Smallest coordinate range holding every `x_j` and `f_j`.
    pub fn window(&self) -> Option<(i64, i64)> {
        self.pairs
            .iter()
            .flat_map(|p| [p.x.index_range(), p.f.index_range()])
            .flatten()
            .reduce(|a, b| (a.0.min(b.0), a.1.max(b.1)))
    }

    /// `P_E x = sum_{j in E} f_j(x) x_j`.
    pub fn restricted(&self, x: &CoordinateVector, set: &IndexSet) -> CoordinateVector {
        self.combine(|p| set.contains(p.label), |p| p.f.pair(x))
    }

    /// `T_E x = sum_{j not in E} f_j(x) x_j`.
    pub fn tail(&self, x: &CoordinateVector, set: &IndexSet) -> CoordinateVector {
        self.combine(|p| !set.contains(p.label), |p| p.f.pair(x))
    }

    /// `T*_E f = sum_{j not in E} f(x_j) f_j`.
    pub fn tail_adjoint(&self, f: &CoordinateVector, set: &IndexSet) -> CoordinateVector {
        let mut out = CoordinateVector::zero();
        for p in self.pairs.iter().filter(|p| !set.contains(p.label)) {
            let c = f.pair(&p.x);
            if c != 0.0 {
                for (n, v) in p.f.iter() {
                    out.add_to(n, c * v);
                }
            }
        }
        out
    }

    /// `sum_{j in E} x**(f_j) x_j` for `x**` given by its coordinates.
    pub fn bidual_restricted(&self, xss: &CoordinateVector, set: &IndexSet) -> CoordinateVector {
        self.combine(|p| set.contains(p.label), |p| xss.pair(&p.f))
    }

    fn combine(
        &self,
        keep: impl Fn(&FramePair) -> bool,
        weight: impl Fn(&FramePair) -> f64,
    ) -> CoordinateVector {
        let mut out = CoordinateVector::zero();
        for p in self.pairs.iter().filter(|p| keep(p)) {
            let c = weight(p);
            if c != 0.0 {
                for (n, v) in p.x.iter() {
                    out.add_to(n, c * v);
                }
            }
        }
        out
    }

    /// `max_c ||e_c - sum_j f_j(e_c) x_j||` over `c` in `lo..=hi`.
    pub fn reconstruction_error(&self, lo: i64, hi: i64) -> f64 {
        (lo..=hi)
            .map(|c| {
                let e = CoordinateVector::unit(c);
                self.space
                    .norm(&e.sub(&self.restricted(&e, &IndexSet::All)))
            })
            .fold(0.0, f64::max)
    }

    pub fn verify(&self, lo: i64, hi: i64, tol: f64) -> Result<()> {
        let err = self.reconstruction_error(lo, hi);
        if err <= tol {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "frame fails to reconstruct unit vectors on [{lo}, {hi}]: residual {err:e}"
            )))
        }
    }

    /// Exact `||T*_E f||` in the dual space. The frame is finite, so the
    /// adjoint tail is a finite sum and no estimation is needed.
    pub fn tail_dual_norm(&self, f: &CoordinateVector, set: &IndexSet) -> f64 {
        self.space.dual_norm(&self.tail_adjoint(f, set))
    }

    /// Random unit vectors over the frame window, followed by `±e_c`.
    fn probe_vectors(&self, samples: usize, seed: u64) -> Vec<CoordinateVector> {
        let Some((lo, hi)) = self.window() else {
            return Vec::new();
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(samples + (hi - lo + 1) as usize);
        for _ in 0..samples {
            let x: CoordinateVector = (lo..=hi)
                .map(|n| (n, rng.sample::<f64, _>(StandardNormal)))
                .collect();
            let norm = self.space.norm(&x);
            if norm > 0.0 {
                out.push(x.scale(1.0 / norm));
            }
        }
        out.extend((lo..=hi).map(CoordinateVector::unit));
        out
    }

    /// Lower estimate of `||T*_E f|| = sup_{||x|| = 1} |f(T_E x)|` from
    /// seeded random unit vectors plus coordinate vectors.
    pub fn estimate_tail_dual_norm(
        &self,
        f: &CoordinateVector,
        set: &IndexSet,
        samples: usize,
        seed: u64,
    ) -> f64 {
        let adj = self.tail_adjoint(f, set);
        self.probe_vectors(samples, seed)
            .iter()
            .map(|x| adj.pair(x).abs())
            .fold(0.0, f64::max)
    }

    /// Lower estimate of `||P_E||`.
    pub fn estimate_projection_norm(&self, set: &IndexSet, samples: usize, seed: u64) -> f64 {
        self.probe_vectors(samples, seed)
            .iter()
            .map(|x| self.space.norm(&self.restricted(x, set)) / self.space.norm(x))
            .fold(0.0, f64::max)
    }

    /// Largest `||P_E x|| / ||x||` over random label subsets `E` and random
    /// unit `x`: a sampled lower bound for the suppression constant.
    pub fn measured_suppression_constant(&self, trials: usize, seed: u64, exec: Execution) -> f64 {
        let probes = self.probe_vectors(trials, seed);
        let ratios = par::map_range(exec, probes.len(), |k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64 + 1);
            let kept: BTreeSet<i64> = self
                .pairs
                .iter()
                .filter(|_| rng.random_bool(0.5))
                .map(|p| p.label)
                .collect();
            let x = &probes[k];
            self.space
                .norm(&self.restricted(x, &IndexSet::Listed(kept)))
                / self.space.norm(x)
        });
        ratios.into_iter().fold(0.0, f64::max)
    }

    /// `(P x_j, P* f_j)` for the diagonal projection onto `coords`, dropping
    /// pairs where both components vanish.
    pub fn project(&self, coords: &IndexSet) -> DiscreteFrame {
        let pairs = self
            .pairs
            .iter()
            .map(|p| FramePair {
                label: p.label,
                x: p.x.restrict(|n| coords.contains(n)),
                f: p.f.restrict(|n| coords.contains(n)),
            })
            .filter(|p| !(p.x.is_zero() && p.f.is_zero()))
            .collect();
        DiscreteFrame {
            pairs,
            space: self.space,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailReport {
    pub set: IndexSet,
    pub tail_dual_norm: f64,
    pub projection_norm: f64,
}

pub fn tail_report(
    frame: &DiscreteFrame,
    f: &CoordinateVector,
    set: &IndexSet,
    samples: usize,
    seed: u64,
) -> TailReport {
    TailReport {
        set: set.clone(),
        tail_dual_norm: frame.tail_dual_norm(f, set),
        projection_norm: frame.estimate_projection_norm(set, samples, seed),
    }
}

/// True when a sequence of nonnegative values fails to decay: its largest
/// value exceeds `tol` and the second half never drops below half the peak
/// of the first half. Evidence on a finite window, not a limit statement.
pub fn fails_to_decay(values: &[f64], tol: f64) -> bool {
    if values.len() < 2 {
        return false;
    }
    let peak = values.iter().copied().fold(0.0, f64::max);
    let (first, second) = values.split_at(values.len() / 2);
    let early = first.iter().copied().fold(0.0, f64::max);
    let late = second.iter().copied().fold(f64::INFINITY, f64::min);
    peak > tol && late >= 0.5 * early
}

fn check_nesting(frame: &DiscreteFrame, nesting: &[IndexSet]) -> Result<()> {
    for set in nesting {
        set.check()?;
    }
    for (i, w) in nesting.windows(2).enumerate() {
        if frame
            .pairs
            .iter()
            .any(|p| w[0].contains(p.label) && !w[1].contains(p.label))
        {
            return Err(Error::InvalidParameter(format!(
                "index set {} is not contained in set {}",
                i,
                i + 1
            )));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShrinkingProbe {
    pub tail_dual_norms: Vec<f64>,
    pub non_shrinking: bool,
}

/// `||T*_E f||` along an increasing family of sets.
pub fn shrinking_probe(
    frame: &DiscreteFrame,
    f: &CoordinateVector,
    nesting: &[IndexSet],
    tol: f64,
) -> Result<ShrinkingProbe> {
    check_nesting(frame, nesting)?;
    let tail_dual_norms: Vec<f64> = nesting.iter().map(|e| frame.tail_dual_norm(f, e)).collect();
    Ok(ShrinkingProbe {
        non_shrinking: fails_to_decay(&tail_dual_norms, tol),
        tail_dual_norms,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CauchyProbe {
    /// `||P_F x** - P_E x**||` for consecutive sets `E ⊂ F`.
    pub increments: Vec<f64>,
    pub non_cauchy: bool,
}

/// Increments of the net `E -> sum_{j in E} x**(f_j) x_j` along an
/// increasing family of sets.
pub fn boundedly_complete_probe(
    frame: &DiscreteFrame,
    xss: &CoordinateVector,
    nesting: &[IndexSet],
    tol: f64,
) -> Result<CauchyProbe> {
    check_nesting(frame, nesting)?;
    let partial: Vec<CoordinateVector> = nesting
        .iter()
        .map(|e| frame.bidual_restricted(xss, e))
        .collect();
    let increments: Vec<f64> = partial
        .windows(2)
        .map(|w| frame.space.norm(&w[1].sub(&w[0])))
        .collect();
    Ok(CauchyProbe {
        non_cauchy: fails_to_decay(&increments, tol),
        increments,
    })
}

/// Integer vector (or functional) on `N = {1, 2, ...}`; zeros never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntVector(BTreeMap<u64, i64>);

impl IntVector {
    pub fn unit(n: u64) -> Self {
        let mut v = Self::default();
        v.add(n, 1);
        v
    }

    pub fn get(&self, n: u64) -> i64 {
        self.0.get(&n).copied().unwrap_or(0)
    }

    pub fn add(&mut self, n: u64, c: i64) {
        let next = self.get(n) + c;
        if next == 0 {
            self.0.remove(&n);
        } else {
            self.0.insert(n, next);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, i64)> + '_ {
        self.0.iter().map(|(&n, &c)| (n, c))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sup_norm(&self) -> i64 {
        self.0.values().map(|c| c.abs()).max().unwrap_or(0)
    }
}

impl FromIterator<(u64, i64)> for IntVector {
    fn from_iter<I: IntoIterator<Item = (u64, i64)>>(iter: I) -> Self {
        let mut v = Self::default();
        for (n, c) in iter {
            v.add(n, c);
        }
        v
    }
}

/// Pair `n >= 1` of the counterexample: `x_n = e_j` with `j = ceil(n/3)`,
/// `f_n = sign * e*_c`.
pub fn counterexample_pair(n: u64) -> (u64, i64, u64) {
    let j = n.div_ceil(3);
    match n % 3 {
        1 => (j, 1, j),
        2 => (j, -1, 1),
        _ => (j, 1, 1),
    }
}

fn in_set(set: &IndexSet, n: u64) -> bool {
    set.contains(n as i64)
}

/// `sum_{n in E, n <= 3K} f_n(x) x_n`.
pub fn counterexample_restricted(k: u64, set: &IndexSet, x: &IntVector) -> IntVector {
    let mut out = IntVector::default();
    for n in (1..=3 * k).filter(|&n| in_set(set, n)) {
        let (j, sign, c) = counterexample_pair(n);
        let coef = sign * x.get(c);
        if coef != 0 {
            out.add(j, coef);
        }
    }
    out
}

/// `sum_{n in E, n <= 3K} f(x_n) f_n`, summed pair by pair.
pub fn counterexample_dual_direct(k: u64, set: &IndexSet, f: &IntVector) -> IntVector {
    let mut out = IntVector::default();
    for n in (1..=3 * k).filter(|&n| in_set(set, n)) {
        let (j, sign, c) = counterexample_pair(n);
        let coef = f.get(j);
        if coef != 0 {
            out.add(c, sign * coef);
        }
    }
    out
}

/// The dual restriction written as three residue-class series:
/// `sum_{E ∩ (3N-2)} f(e_{(n+2)/3}) e*_{(n+2)/3} + sum_{E ∩ 3N} f(e_{n/3}) e*_1
///  - sum_{E ∩ (3N-1)} f(e_{(n+1)/3}) e*_1`.
pub fn counterexample_dual_series(k: u64, set: &IndexSet, f: &IntVector) -> IntVector {
    let mut out = IntVector::default();
    for j in 1..=k {
        if in_set(set, 3 * j - 2) {
            out.add(j, f.get(j));
        }
    }
    for j in 1..=k {
        if in_set(set, 3 * j) {
            out.add(1, f.get(j));
        }
    }
    for j in 1..=k {
        if in_set(set, 3 * j - 1) {
            out.add(1, -f.get(j));
        }
    }
    out
}

/// Floating-point copy of the first `3K` pairs, as a `c_0` frame.
pub fn counterexample_frame(k: u64) -> Result<DiscreteFrame> {
    if k == 0 {
        return Err(Error::InvalidParameter("K must be at least 1".into()));
    }
    let pairs = (1..=3 * k)
        .map(|n| {
            let (j, sign, c) = counterexample_pair(n);
            FramePair {
                label: n as i64,
                x: CoordinateVector::unit(j as i64),
                f: CoordinateVector::unit(c as i64).scale(sign as f64),
            }
        })
        .collect();
    DiscreteFrame::new(pairs, SpaceTag::C0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualCase {
    pub functional: Vec<(u64, i64)>,
    pub set: String,
    pub matches: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CounterexampleReport {
    pub k: u64,
    /// `sum_{n <= 3K} x_n ⊗ f_n` is the identity on `span{e_1..e_K}`.
    pub full_reconstruction_exact: bool,
    /// Coordinates `e*_n(x_{3N})`, `n <= K`, for `x = e_1`.
    pub restricted_coordinates: usize,
    pub restricted_all_ones: bool,
    pub restricted_sup_norm: i64,
    pub dual_cases: Vec<DualCase>,
}

impl CounterexampleReport {
    pub fn holds(&self) -> bool {
        self.full_reconstruction_exact
            && self.restricted_all_ones
            && self.dual_cases.iter().all(|c| c.matches)
    }
}

/// Runs all three exact checks on the first `K` triples.
pub fn counterexample_2_4(k: u64) -> Result<CounterexampleReport> {
    if k == 0 {
        return Err(Error::InvalidParameter("K must be at least 1".into()));
    }
    let mut matrix: BTreeMap<(u64, u64), i64> = BTreeMap::new();
    for n in 1..=3 * k {
        let (j, sign, c) = counterexample_pair(n);
        *matrix.entry((j, c)).or_insert(0) += sign;
    }
    matrix.retain(|_, v| *v != 0);
    let full_reconstruction_exact =
        matrix.len() as u64 == k && matrix.iter().all(|(&(i, c), &v)| i == c && v == 1);

    let every_third = IndexSet::Residue {
        modulus: 3,
        residue: 0,
    };
    let candidate = counterexample_restricted(k, &every_third, &IntVector::unit(1));
    let restricted_all_ones =
        (1..=k).all(|n| candidate.get(n) == 1) && candidate.iter().all(|(n, _)| n <= k);

    let top = k.min(5);
    let functionals: Vec<IntVector> = vec![
        IntVector::unit(1),
        IntVector::unit(top.min(2)),
        (1..=top)
            .map(|n| (n, if n % 2 == 0 { -(n as i64) } else { n as i64 }))
            .collect(),
    ];
    let sets = [
        IndexSet::All,
        every_third,
        IndexSet::Residue {
            modulus: 3,
            residue: 1,
        },
        IndexSet::Residue {
            modulus: 3,
            residue: 2,
        },
        IndexSet::Range { from: 1, to: 7 },
        IndexSet::Range {
            from: 4,
            to: 3 * k as i64,
        },
    ];
    let mut dual_cases = Vec::new();
    for f in &functionals {
        for set in &sets {
            let matches =
                counterexample_dual_series(k, set, f) == counterexample_dual_direct(k, set, f);
            dual_cases.push(DualCase {
                functional: f.iter().collect(),
                set: set.label(),
                matches,
            });
        }
    }
    Ok(CounterexampleReport {
        k,
        full_reconstruction_exact,
        restricted_coordinates: candidate.0.len(),
        restricted_all_ones,
        restricted_sup_norm: candidate.sup_norm(),
        dual_cases,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blocks(count: i64, width: i64) -> Vec<IndexSet> {
        (1..=count)
            .map(|b| IndexSet::Range {
                from: 1,
                to: b * width,
            })
            .collect()
    }

    #[test]
    fn unit_vector_frames_reconstruct() {
        for space in [SpaceTag::Lp(1.5), SpaceTag::C0, SpaceTag::L1] {
            let frame = DiscreteFrame::unit_vectors(space, -4, 4).unwrap();
            assert_eq!(frame.reconstruction_error(-4, 4), 0.0);
            assert!(frame.verify(-4, 4, RECONSTRUCTION_TOL).is_ok());
            assert!(frame.verify(-5, 5, RECONSTRUCTION_TOL).is_err());
        }
        assert!(DiscreteFrame::unit_vectors(SpaceTag::Lp(1.0), 0, 1).is_err());
    }

    #[test]
    fn tail_dual_norm_examples() {
        let lp = DiscreteFrame::unit_vectors(SpaceTag::Lp(2.0), -5, 5).unwrap();
        let e0 = CoordinateVector::unit(0);
        assert_eq!(lp.tail_dual_norm(&e0, &IndexSet::Listed([0].into())), 0.0);
        assert_eq!(
            lp.tail_dual_norm(&e0, &IndexSet::Range { from: 1, to: 5 }),
            1.0
        );

        let k = 40;
        let l1 = DiscreteFrame::unit_vectors(SpaceTag::L1, 1, k).unwrap();
        let ones: CoordinateVector = (1..=k).map(|n| (n, 1.0)).collect();
        for j in 0..k {
            assert_eq!(
                l1.tail_dual_norm(&ones, &IndexSet::Range { from: 1, to: j }),
                1.0
            );
        }

        let l2 = DiscreteFrame::unit_vectors(SpaceTag::Lp(2.0), 1, k).unwrap();
        let harmonic: CoordinateVector = (1..=k).map(|n| (n, 1.0 / n as f64)).collect();
        for j in 0..=k {
            let expected = ((j + 1)..=k)
                .map(|n| 1.0 / (n * n) as f64)
                .sum::<f64>()
                .sqrt();
            let got = l2.tail_dual_norm(&harmonic, &IndexSet::Range { from: 1, to: j });
            assert!((got - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn tail_dual_norm_is_monotone() {
        let frame = DiscreteFrame::unit_vectors(SpaceTag::Lp(3.0), 1, 20).unwrap();
        let f: CoordinateVector = (1..=20).map(|n| (n, (n as f64).sin())).collect();
        let norms: Vec<f64> = (0..=20)
            .map(|j| frame.tail_dual_norm(&f, &IndexSet::Range { from: 1, to: j }))
            .collect();
        for w in norms.windows(2) {
            assert!(w[1] <= w[0]);
        }
        assert_eq!(*norms.last().unwrap(), 0.0);
    }

    #[test]
    fn estimates_never_exceed_exact_values() {
        let frame = counterexample_frame(4).unwrap();
        let f: CoordinateVector = [(1, 1.0), (2, -0.5), (3, 2.0)].into_iter().collect();
        for set in [
            IndexSet::All,
            IndexSet::Residue {
                modulus: 3,
                residue: 0,
            },
        ] {
            let exact = frame.tail_dual_norm(&f, &set);
            let est = frame.estimate_tail_dual_norm(&f, &set, 500, 3);
            assert!(est <= exact * (1.0 + 1e-12) + 1e-15);
        }
        // the sup-norm dual is attained at a coordinate vector
        let l1 = DiscreteFrame::unit_vectors(SpaceTag::L1, 1, 6).unwrap();
        let g: CoordinateVector = [(2, 0.5), (5, -3.0)].into_iter().collect();
        let set = IndexSet::Range { from: 1, to: 2 };
        assert_eq!(
            l1.estimate_tail_dual_norm(&g, &set, 10, 0),
            l1.tail_dual_norm(&g, &set)
        );
    }

    #[test]
    fn projection_norm_of_unit_vector_frame() {
        let frame = DiscreteFrame::unit_vectors(SpaceTag::Lp(1.5), 1, 8).unwrap();
        let set = IndexSet::Range { from: 2, to: 4 };
        let report = tail_report(&frame, &CoordinateVector::unit(3), &set, 200, 0);
        assert_eq!(report.projection_norm, 1.0);
        assert_eq!(report.tail_dual_norm, 0.0);
        let c = frame.measured_suppression_constant(300, 9, Execution::default());
        assert!(c <= 1.0 + 1e-12);
    }

    #[test]
    fn c0_increments_never_decay() {
        let frame = DiscreteFrame::unit_vectors(SpaceTag::C0, 1, 64).unwrap();
        let ones: CoordinateVector = (1..=64).map(|n| (n, 1.0)).collect();
        let probe = boundedly_complete_probe(&frame, &ones, &blocks(8, 8), 1e-10).unwrap();
        assert_eq!(probe.increments, vec![1.0; 7]);
        assert!(probe.non_cauchy);
    }

    #[test]
    fn lp_increments_vanish_past_support() {
        let frame = DiscreteFrame::unit_vectors(SpaceTag::Lp(2.0), 1, 64).unwrap();
        let x: CoordinateVector = (1..=10).map(|n| (n, 1.0 / n as f64)).collect();
        let probe = boundedly_complete_probe(&frame, &x, &blocks(8, 8), 1e-10).unwrap();
        assert!(probe.increments[0] > 0.0);
        assert!(probe.increments[2..].iter().all(|&v| v == 0.0));
        assert!(!probe.non_cauchy);

        let zero =
            boundedly_complete_probe(&frame, &CoordinateVector::zero(), &blocks(4, 8), 1e-10)
                .unwrap();
        assert!(zero.increments.iter().all(|&v| v == 0.0) && !zero.non_cauchy);
    }

    #[test]
    fn shrinking_probe_flags_l1() {
        let k = 32;
        let ones: CoordinateVector = (1..=k).map(|n| (n, 1.0)).collect();
        let l1 = DiscreteFrame::unit_vectors(SpaceTag::L1, 1, k).unwrap();
        let nest: Vec<IndexSet> = (0..8)
            .map(|b| IndexSet::Range { from: 1, to: b * 3 })
            .collect();
        let probe = shrinking_probe(&l1, &ones, &nest, 1e-10).unwrap();
        assert!(probe.non_shrinking);
        let l2 = DiscreteFrame::unit_vectors(SpaceTag::Lp(2.0), 1, k).unwrap();
        let f: CoordinateVector = (1..=5).map(|n| (n, 1.0)).collect();
        assert!(
            !shrinking_probe(&l2, &f, &nest, 1e-10)
                .unwrap()
                .non_shrinking
        );
    }

    #[test]
    fn nesting_must_increase() {
        let frame = DiscreteFrame::unit_vectors(SpaceTag::C0, 1, 8).unwrap();
        let bad = [
            IndexSet::Range { from: 1, to: 4 },
            IndexSet::Range { from: 2, to: 8 },
        ];
        assert!(boundedly_complete_probe(&frame, &CoordinateVector::unit(1), &bad, 1e-10).is_err());
    }

    #[test]
    fn decay_heuristic() {
        assert!(!fails_to_decay(&[], 1e-10));
        assert!(!fails_to_decay(&[1.0, 0.5, 0.25, 0.1], 1e-10));
        assert!(fails_to_decay(&[1.0, 1.0, 0.9, 1.0], 1e-10));
        assert!(!fails_to_decay(&[1e-12, 1e-12], 1e-10));
    }

    #[test]
    fn counterexample_pairs_follow_the_triple_pattern() {
        let expected = [
            (1, 1, 1),
            (1, -1, 1),
            (1, 1, 1),
            (2, 1, 2),
            (2, -1, 1),
            (2, 1, 1),
            (3, 1, 3),
        ];
        for (n, e) in (1..=7).zip(expected) {
            assert_eq!(counterexample_pair(n), e);
        }
    }

    #[test]
    fn counterexample_examples() {
        let k = 50;
        assert_eq!(
            counterexample_restricted(k, &IndexSet::All, &IntVector::unit(1)),
            IntVector::unit(1)
        );
        for j in 1..=k {
            let e = IntVector::unit(j);
            assert_eq!(counterexample_restricted(k, &IndexSet::All, &e), e);
        }
        let report = counterexample_2_4(k).unwrap();
        assert!(report.holds());
        assert_eq!(report.restricted_coordinates, 50);
        assert_eq!(report.restricted_sup_norm, 1);
        let every_third = IndexSet::Residue {
            modulus: 3,
            residue: 0,
        };
        let f = IntVector::unit(2);
        let series = counterexample_dual_series(k, &every_third, &f);
        assert_eq!(series, IntVector::unit(1));
        assert_eq!(series, counterexample_dual_direct(k, &every_third, &f));
        assert!(counterexample_2_4(0).is_err());
    }

    #[test]
    fn counterexample_scales() {
        let report = counterexample_2_4(10_000).unwrap();
        assert!(report.holds());
        assert_eq!(report.restricted_coordinates, 10_000);
    }

    #[test]
    fn float_counterexample_frame() {
        let frame = counterexample_frame(6).unwrap();
        assert_eq!(frame.reconstruction_error(1, 6), 0.0);
        let x = frame.restricted(
            &CoordinateVector::unit(1),
            &IndexSet::Residue {
                modulus: 3,
                residue: 0,
            },
        );
        assert_eq!(x, (1..=6).map(|n| (n, 1.0)).collect());

        let projected = frame.project(&IndexSet::Listed([1].into()));
        assert_eq!(projected.reconstruction_error(1, 1), 0.0);
        assert_eq!(frame.project(&IndexSet::All), frame);
    }

    #[test]
    fn projection_onto_even_coordinates() {
        let frame = DiscreteFrame::unit_vectors(SpaceTag::Lp(2.0), 1, 10).unwrap();
        let even = IndexSet::Residue {
            modulus: 2,
            residue: 0,
        };
        let projected = frame.project(&even);
        assert_eq!(projected.len(), 5);
        assert!(projected
            .pairs()
            .iter()
            .all(|p| p.label % 2 == 0 && p.x == p.f));
        for c in (2..=10).step_by(2) {
            assert_eq!(projected.reconstruction_error(c, c), 0.0);
        }
    }

    #[test]
    fn serde_shapes() {
        let tag: SpaceTag = serde_json::from_str(r#"{"lp":2.5}"#).unwrap();
        assert_eq!(tag, SpaceTag::Lp(2.5));
        assert_eq!(
            serde_json::from_str::<SpaceTag>(r#""c0""#).unwrap(),
            SpaceTag::C0
        );
        let set: IndexSet = serde_json::from_str(r#"{"range":{"from":1,"to":4}}"#).unwrap();
        assert_eq!(set, IndexSet::Range { from: 1, to: 4 });
        assert_eq!(
            serde_json::from_str::<IndexSet>(r#""all""#).unwrap(),
            IndexSet::All
        );
    }
}
