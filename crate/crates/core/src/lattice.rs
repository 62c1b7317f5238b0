// SPDX-License-Identifier: Apache-2.0
//! The rank-two lattice M, its dual N, and exact angular ordering of
//! directions.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of `M = Z^2` (or of its dual `N`, identified with `Z^2` via the
/// standard pairing).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i64; 2]", into = "[i64; 2]")]
pub struct LatticeVector {
    pub a: i64,
    pub b: i64,
}

impl From<[i64; 2]> for LatticeVector {
    fn from(v: [i64; 2]) -> Self {
        LatticeVector::new(v[0], v[1])
    }
}

impl From<LatticeVector> for [i64; 2] {
    fn from(v: LatticeVector) -> Self {
        [v.a, v.b]
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

impl std::ops::Add for LatticeVector {
    type Output = LatticeVector;
    fn add(self, o: LatticeVector) -> LatticeVector {
        LatticeVector::new(self.a + o.a, self.b + o.b)
    }
}

impl std::ops::Sub for LatticeVector {
    type Output = LatticeVector;
    fn sub(self, o: LatticeVector) -> LatticeVector {
        LatticeVector::new(self.a - o.a, self.b - o.b)
    }
}

impl std::ops::Neg for LatticeVector {
    type Output = LatticeVector;
    fn neg(self) -> LatticeVector {
        LatticeVector::new(-self.a, -self.b)
    }
}

impl std::ops::Mul<i64> for LatticeVector {
    type Output = LatticeVector;
    fn mul(self, k: i64) -> LatticeVector {
        k * self
    }
}

impl std::ops::Mul<LatticeVector> for i64 {
    type Output = LatticeVector;
    fn mul(self, v: LatticeVector) -> LatticeVector {
        LatticeVector::new(self * v.a, self * v.b)
    }
}

impl LatticeVector {
    pub const ZERO: LatticeVector = LatticeVector { a: 0, b: 0 };
    pub const E1: LatticeVector = LatticeVector { a: 1, b: 0 };
    pub const E2: LatticeVector = LatticeVector { a: 0, b: 1 };

    pub const fn new(a: i64, b: i64) -> Self {
        LatticeVector { a, b }
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub fn is_primitive(&self) -> bool {
        !self.is_zero() && self.a.gcd(&self.b) == 1
    }

    /// The positive integer `w` with `self = w * primitive(self)`.
    pub fn index(&self) -> Result<i64> {
        if self.is_zero() {
            return Err(Error::ZeroVector);
        }
        Ok(self.a.gcd(&self.b))
    }

    pub fn primitive(&self) -> Result<LatticeVector> {
        let w = self.index()?;
        Ok(LatticeVector::new(self.a / w, self.b / w))
    }

    /// `a1 b2 - a2 b1`.
    pub fn wedge(&self, other: &LatticeVector) -> i64 {
        self.a * other.b - self.b * other.a
    }

    /// The pairing `<m, n>` between `M` and `N`.
    pub fn pair(&self, n: &LatticeVector) -> i64 {
        self.a * n.a + self.b * n.b
    }

    /// Counter-clockwise rotation by a quarter turn, `(a, b) -> (-b, a)`.
    pub fn rotate90(&self) -> LatticeVector {
        LatticeVector::new(-self.b, self.a)
    }

    /// The normal `n(m) = rotate90(primitive(m))` used for every
    /// decomposition in the crate.
    pub fn normal(&self) -> Result<LatticeVector> {
        Ok(self.primitive()?.rotate90())
    }

    pub fn is_parallel(&self, other: &LatticeVector) -> bool {
        self.wedge(other) == 0
    }

    /// Same ray: parallel and pointing the same way.
    pub fn same_ray(&self, other: &LatticeVector) -> bool {
        self.wedge(other) == 0 && self.pair(other) > 0
    }

    /// Half-plane index used for exact angle comparison: 0 for angles in
    /// `[0, pi)`, 1 for `[pi, 2 pi)`.
    fn half(&self) -> u8 {
        if self.b > 0 || (self.b == 0 && self.a > 0) {
            0
        } else {
            1
        }
    }
}

/// Compares the polar angles of two nonzero vectors in `[0, 2 pi)`.
pub fn angle_cmp(u: &LatticeVector, v: &LatticeVector) -> Ordering {
    u.half().cmp(&v.half()).then_with(|| 0.cmp(&u.wedge(v)))
}

/// Compares angles measured counter-clockwise from `start`, with `start`
/// itself placed last (angle `2 pi`).
pub fn angle_cmp_from(start: &LatticeVector, u: &LatticeVector, v: &LatticeVector) -> Ordering {
    let key = |x: &LatticeVector| {
        // Angle relative to start, exclusive at 0.
        let rel = LatticeVector::new(x.pair(start), start.wedge(x));
        if rel.b == 0 && rel.a > 0 {
            (2u8, rel)
        } else {
            (rel.half(), rel)
        }
    };
    let (hu, ru) = key(u);
    let (hv, rv) = key(v);
    hu.cmp(&hv).then_with(|| 0.cmp(&ru.wedge(&rv)))
}
