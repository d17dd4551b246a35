use std::collections::{HashMap, VecDeque};
use std::fmt;

use super::GenError;
use crate::metric::{MetricSpace, PointId};
use crate::rational;

pub const MAX_HEISENBERG_RADIUS: u32 = 6;

/// The integer matrix `[[1, x, z], [0, 1, y], [0, 0, 1]]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HeisElement {
    pub x: i64,
    pub y: i64,
    pub z: i64,
}

impl HeisElement {
    pub const IDENTITY: HeisElement = HeisElement { x: 0, y: 0, z: 0 };

    pub fn new(x: i64, y: i64, z: i64) -> Self {
        HeisElement { x, y, z }
    }

    pub fn mul(self, o: HeisElement) -> HeisElement {
        HeisElement {
            x: self.x + o.x,
            y: self.y + o.y,
            z: self.z + o.z + self.x * o.y,
        }
    }

    pub fn inv(self) -> HeisElement {
        HeisElement {
            x: -self.x,
            y: -self.y,
            z: self.x * self.y - self.z,
        }
    }
}

impl fmt::Display for HeisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[1,{},{}],[0,1,{}],[0,0,1]]", self.x, self.z, self.y)
    }
}

/// `x`, `x^-1`, `y`, `y^-1`.
pub const GENERATORS: [HeisElement; 4] = [
    HeisElement { x: 1, y: 0, z: 0 },
    HeisElement { x: -1, y: 0, z: 0 },
    HeisElement { x: 0, y: 1, z: 0 },
    HeisElement { x: 0, y: -1, z: 0 },
];

/// Word lengths of every element within `radius` of the identity, in
/// breadth-first discovery order.
pub fn word_lengths(radius: u32) -> Vec<(HeisElement, u32)> {
    let mut seen: HashMap<HeisElement, u32> = HashMap::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::from([HeisElement::IDENTITY]);
    seen.insert(HeisElement::IDENTITY, 0);
    while let Some(g) = queue.pop_front() {
        let d = seen[&g];
        order.push((g, d));
        if d == radius {
            continue;
        }
        for s in GENERATORS {
            let h = g.mul(s);
            if !seen.contains_key(&h) {
                seen.insert(h, d + 1);
                queue.push_back(h);
            }
        }
    }
    order
}

/// The word-metric ball `B(r)` in the integer Heisenberg group.
///
/// Distances are `d(g, h) = |g^-1 h|`, computed from a search of radius
/// `2r`, which contains every such quotient.
pub fn heisenberg_ball(r: u32) -> Result<MetricSpace, GenError> {
    if r > MAX_HEISENBERG_RADIUS {
        return Err(GenError::TooLarge {
            what: "Heisenberg radius",
            requested: r as usize,
            cap: MAX_HEISENBERG_RADIUS as usize,
        });
    }
    let big: HashMap<HeisElement, u32> = word_lengths(2 * r).into_iter().collect();
    let ball: Vec<HeisElement> = word_lengths(r).into_iter().map(|(g, _)| g).collect();
    let points = ball
        .iter()
        .enumerate()
        .map(|(i, g)| PointId::labeled(i, g.to_string()))
        .collect();
    Ok(MetricSpace::from_fn(points, |i, j| {
        let q = ball[i].inv().mul(ball[j]);
        rational::int(big[&q] as i64)
    })?)
}
