//! Integer-vector algebra for failure aggregates under the lexicographic
//! order.
//!
//! Aggregates are vectors of length `rho + 1`. During the dynamic
//! program's correction arithmetic intermediate entries may go negative,
//! so entries are signed; finished aggregates are validated nonnegative.
//! The distinguished [`FailAgg::Infinity`] compares strictly greater than
//! every finite vector.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::{Add, Sub};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FailAgg {
    Finite(Vec<i64>),
    Infinity,
}

impl FailAgg {
    pub fn zero(rho: usize) -> Self {
        FailAgg::Finite(alloc::vec![0; rho + 1])
    }

    /// A single 1 recording one vertex with failure number `i`; the 1
    /// lands at index `rho - i`, so severe events sort first.
    pub fn unit(i: usize, rho: usize) -> Self {
        assert!(i <= rho, "failure number {i} exceeds rho {rho}");
        let mut v = alloc::vec![0; rho + 1];
        v[rho - i] = 1;
        FailAgg::Finite(v)
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, FailAgg::Finite(_))
    }

    pub fn as_finite(&self) -> Option<&[i64]> {
        match self {
            FailAgg::Finite(v) => Some(v),
            FailAgg::Infinity => None,
        }
    }

    /// Entry sum; finished aggregates sum to the vertex count they cover.
    pub fn sum(&self) -> Option<i64> {
        self.as_finite().map(|v| v.iter().sum())
    }

    pub fn is_nonnegative(&self) -> bool {
        match self {
            FailAgg::Finite(v) => v.iter().all(|&x| x >= 0),
            FailAgg::Infinity => true,
        }
    }

    pub fn lex_cmp(&self, other: &FailAgg) -> Ordering {
        match (self, other) {
            (FailAgg::Infinity, FailAgg::Infinity) => Ordering::Equal,
            (FailAgg::Infinity, FailAgg::Finite(_)) => Ordering::Greater,
            (FailAgg::Finite(_), FailAgg::Infinity) => Ordering::Less,
            (FailAgg::Finite(a), FailAgg::Finite(b)) => {
                assert_eq!(a.len(), b.len(), "lex compare of unequal lengths");
                a.cmp(b)
            }
        }
    }
}

impl PartialOrd for FailAgg {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FailAgg {
    fn cmp(&self, other: &Self) -> Ordering {
        self.lex_cmp(other)
    }
}

impl Add for &FailAgg {
    type Output = FailAgg;

    fn add(self, rhs: &FailAgg) -> FailAgg {
        match (self, rhs) {
            (FailAgg::Finite(a), FailAgg::Finite(b)) => {
                assert_eq!(a.len(), b.len(), "add of unequal lengths");
                FailAgg::Finite(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            // Infinity absorbs.
            _ => FailAgg::Infinity,
        }
    }
}

impl Sub for &FailAgg {
    type Output = FailAgg;

    fn sub(self, rhs: &FailAgg) -> FailAgg {
        match (self, rhs) {
            (FailAgg::Finite(a), FailAgg::Finite(b)) => {
                assert_eq!(a.len(), b.len(), "sub of unequal lengths");
                FailAgg::Finite(a.iter().zip(b).map(|(x, y)| x - y).collect())
            }
            _ => FailAgg::Infinity,
        }
    }
}

/// Raw-slice helpers used on the DP hot path, where aggregates are kept
/// as plain `Vec<i64>` and absence stands for infinity.
pub fn add_assign(dst: &mut [i64], src: &[i64]) {
    debug_assert_eq!(dst.len(), src.len());
    for (d, s) in dst.iter_mut().zip(src) {
        *d += s;
    }
}

/// `dst[rho - i] += delta` without allocating a unit vector.
pub fn bump(dst: &mut [i64], i: usize, delta: i64) {
    let rho = dst.len() - 1;
    debug_assert!(i <= rho);
    dst[rho - i] += delta;
}
