//! Finitely supported sequences on the integers, standing in for truncated
//! elements of `l_p(Z)` and of its dual `l_q(Z)`.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `p' = p / (p - 1)`.
pub fn conjugate_exponent(p: f64) -> f64 {
    p / (p - 1.0)
}

/// Checks `1 < p < inf`.
pub fn check_exponent(p: f64) -> Result<f64> {
    if p > 1.0 && p.is_finite() {
        Ok(p)
    } else {
        Err(Error::InvalidExponent(p))
    }
}

/// A real sequence indexed by `Z` with finitely many nonzero entries.
/// Zero entries are never stored, so structural equality is equality of
/// sequences.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "RawCoordinates", into = "RawCoordinates")]
pub struct CoordinateVector {
    entries: BTreeMap<i64, f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoordinates {
    entries: Vec<(i64, f64)>,
}

impl From<RawCoordinates> for CoordinateVector {
    fn from(raw: RawCoordinates) -> Self {
        let mut v = CoordinateVector::zero();
        for (n, c) in raw.entries {
            v.add_to(n, c);
        }
        v
    }
}

impl From<CoordinateVector> for RawCoordinates {
    fn from(v: CoordinateVector) -> Self {
        RawCoordinates {
            entries: v.entries.into_iter().collect(),
        }
    }
}

impl FromIterator<(i64, f64)> for CoordinateVector {
    fn from_iter<I: IntoIterator<Item = (i64, f64)>>(iter: I) -> Self {
        let mut v = CoordinateVector::zero();
        for (n, c) in iter {
            v.add_to(n, c);
        }
        v
    }
}

impl CoordinateVector {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The unit vector `e_n` (equally the coordinate functional `e*_n`).
    pub fn unit(n: i64) -> Self {
        let mut v = Self::zero();
        v.set(n, 1.0);
        v
    }

    /// Standard normal entries on `[-window, window]`.
    pub fn gaussian<R: Rng + ?Sized>(rng: &mut R, window: i64) -> Self {
        (-window..=window)
            .map(|n| (n, rng.sample::<f64, _>(StandardNormal)))
            .collect()
    }

    pub fn get(&self, n: i64) -> f64 {
        self.entries.get(&n).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, n: i64, c: f64) {
        if c == 0.0 {
            self.entries.remove(&n);
        } else {
            self.entries.insert(n, c);
        }
    }

    pub fn add_to(&mut self, n: i64, c: f64) {
        let next = self.get(n) + c;
        self.set(n, next);
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.entries.iter().map(|(&n, &c)| (n, c))
    }

    /// Smallest and largest index carrying a nonzero entry.
    pub fn index_range(&self) -> Option<(i64, i64)> {
        Some((
            *self.entries.keys().next()?,
            *self.entries.keys().next_back()?,
        ))
    }

    /// `(sum |c_n|^p)^{1/p}` for finite `p >= 1`.
    pub fn norm(&self, p: f64) -> f64 {
        self.entries
            .values()
            .fold(0.0, |s, c| s + c.abs().powf(p))
            .powf(1.0 / p)
    }

    pub fn l1_norm(&self) -> f64 {
        self.entries.values().fold(0.0, |s, c| s + c.abs())
    }

    pub fn sup_norm(&self) -> f64 {
        self.entries.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Duality bracket `sum_n x_n f_n`.
    pub fn pair(&self, other: &CoordinateVector) -> f64 {
        let (small, large) = if self.nnz() <= other.nnz() {
            (self, other)
        } else {
            (other, self)
        };
        small.iter().fold(0.0, |s, (n, c)| s + c * large.get(n))
    }

    pub fn add(&self, other: &CoordinateVector) -> CoordinateVector {
        let mut out = self.clone();
        for (n, c) in other.iter() {
            out.add_to(n, c);
        }
        out
    }

    pub fn sub(&self, other: &CoordinateVector) -> CoordinateVector {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, lambda: f64) -> CoordinateVector {
        self.iter().map(|(n, c)| (n, lambda * c)).collect()
    }

    /// The sequence `n -> x_{n-k}`.
    pub fn shift(&self, k: i64) -> CoordinateVector {
        self.iter().map(|(n, c)| (n + k, c)).collect()
    }

    /// Keeps only indices accepted by `keep`.
    pub fn restrict(&self, keep: impl Fn(i64) -> bool) -> CoordinateVector {
        self.iter().filter(|&(n, _)| keep(n)).collect()
    }
}
