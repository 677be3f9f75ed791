use std::fmt;

use serde::{Deserialize, Serialize};

/// One of the `2d` nearest-neighbour displacements.
///
/// Directions are indexed `0 -> +e1, 1 -> -e1, 2 -> +e2, 3 -> -e2, ...`; this order
/// is also the inverse-transform order used when sampling a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Direction(pub u16);

impl Direction {
    pub const PLUS_E1: Direction = Direction(0);
    pub const MINUS_E1: Direction = Direction(1);

    pub fn new(axis: usize, positive: bool) -> Self {
        Direction((2 * axis + usize::from(!positive)) as u16)
    }

    #[inline]
    pub fn axis(self) -> usize {
        usize::from(self.0 / 2)
    }

    #[inline]
    pub fn sign(self) -> i32 {
        if self.0.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// `e1 . x` for this displacement.
    #[inline]
    pub fn first_component(self) -> i32 {
        if self.axis() == 0 {
            self.sign()
        } else {
            0
        }
    }

    pub fn reverse(self) -> Self {
        Direction(self.0 ^ 1)
    }

    /// All `2d` displacements in index order.
    pub fn all(d: usize) -> impl Iterator<Item = Direction> {
        (0..2 * d as u16).map(Direction)
    }
}

/// A site of `Z^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePoint {
    coords: Vec<i32>,
}

impl LatticePoint {
    pub fn origin(d: usize) -> Self {
        LatticePoint { coords: vec![0; d] }
    }

    pub fn from_coords(coords: Vec<i32>) -> Self {
        LatticePoint { coords }
    }

    /// `sign * e_axis` (axes counted from 0, so `unit(d, 0, 1)` is `e1`).
    pub fn unit(d: usize, axis: usize, sign: i32) -> Self {
        let mut p = Self::origin(d);
        p.coords[axis] = sign;
        p
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[i32] {
        &self.coords
    }

    pub fn first(&self) -> i32 {
        self.coords[0]
    }

    pub fn l1_norm(&self) -> u32 {
        self.coords.iter().map(|c| c.unsigned_abs()).sum()
    }

    pub fn step(&self, dir: Direction) -> Self {
        let mut p = self.clone();
        p.coords[dir.axis()] += dir.sign();
        p
    }

    pub fn offset(&self, other: &LatticePoint) -> Self {
        LatticePoint {
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect(),
        }
    }

    /// The direction taking `self` to `other`, if they are nearest neighbours.
    pub fn direction_to(&self, other: &LatticePoint) -> Option<Direction> {
        if self.dim() != other.dim() {
            return None;
        }
        let mut found = None;
        for (axis, (a, b)) in self.coords.iter().zip(&other.coords).enumerate() {
            match b - a {
                0 => {}
                1 | -1 if found.is_none() => found = Some(Direction::new(axis, b > a)),
                _ => return None,
            }
        }
        found
    }

    /// All sites within graph distance `radius` of the origin.
    pub fn ball(d: usize, radius: u32) -> Vec<LatticePoint> {
        let r = radius as i32;
        let mut out = Vec::new();
        let mut cur = vec![-r; d];
        loop {
            let p = LatticePoint { coords: cur.clone() };
            if p.l1_norm() <= radius {
                out.push(p);
            }
            let mut axis = 0;
            loop {
                if axis == d {
                    return out;
                }
                if cur[axis] < r {
                    cur[axis] += 1;
                    break;
                }
                cur[axis] = -r;
                axis += 1;
            }
        }
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direction_indexing() {
        assert_eq!(Direction::new(0, true), Direction::PLUS_E1);
        assert_eq!(Direction::new(0, false), Direction::MINUS_E1);
        assert_eq!(Direction::new(2, false).0, 5);
        assert_eq!(Direction(5).axis(), 2);
        assert_eq!(Direction(5).sign(), -1);
        assert_eq!(Direction(5).first_component(), 0);
        assert_eq!(Direction(4).reverse(), Direction(5));
        assert_eq!(Direction::all(3).count(), 6);
    }

    #[test]
    fn neighbours() {
        let o = LatticePoint::origin(3);
        let e2 = LatticePoint::unit(3, 1, 1);
        assert_eq!(o.direction_to(&e2), Some(Direction::new(1, true)));
        assert_eq!(o.direction_to(&o), None);
        let diag = e2.step(Direction::PLUS_E1);
        assert_eq!(o.direction_to(&diag), None);
        assert_eq!(diag.to_string(), "(1,1,0)");
    }

    #[test]
    fn ball_sizes() {
        // |{x in Z^d : |x|_1 <= r}|
        assert_eq!(LatticePoint::ball(2, 3).len(), 25);
        assert_eq!(LatticePoint::ball(3, 1).len(), 7);
        assert_eq!(LatticePoint::ball(3, 3).len(), 63);
    }
}
