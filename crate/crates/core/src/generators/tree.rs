use super::GenError;
use crate::metric::{Metric, PointId, WeightedGraph};
use crate::rational::{self, Rational};

pub const MAX_TREE_DEPTH: u32 = 20;

/// Level-order index of the vertex with the given 0/1 label: the root is 0
/// and the children of `i` are `2i+1` and `2i+2`.
pub fn tree_index(label: &str) -> Option<usize> {
    let mut i = 0usize;
    for c in label.chars() {
        i = match c {
            '0' => 2 * i + 1,
            '1' => 2 * i + 2,
            _ => return None,
        };
    }
    Some(i)
}

pub fn tree_label(mut i: usize) -> String {
    let mut bits = Vec::new();
    while i > 0 {
        bits.push(if i % 2 == 1 { '0' } else { '1' });
        i = (i - 1) / 2;
    }
    bits.iter().rev().collect()
}

pub fn tree_depth_of(i: usize) -> u32 {
    (usize::BITS - 1) - (i + 1).leading_zeros()
}

pub fn tree_parent(i: usize) -> Option<usize> {
    if i == 0 {
        None
    } else {
        Some((i - 1) / 2)
    }
}

pub fn tree_children(i: usize) -> [usize; 2] {
    [2 * i + 1, 2 * i + 2]
}

/// Unit-length tree distance between two level-order indices.
pub fn tree_distance(mut a: usize, mut b: usize) -> u32 {
    let mut da = tree_depth_of(a);
    let mut db = tree_depth_of(b);
    let mut d = 0;
    while da > db {
        a = (a - 1) / 2;
        da -= 1;
        d += 1;
    }
    while db > da {
        b = (b - 1) / 2;
        db -= 1;
        d += 1;
    }
    while a != b {
        a = (a - 1) / 2;
        b = (b - 1) / 2;
        d += 2;
    }
    d
}

/// The unit-length metric of `T_n` evaluated from level-order indices,
/// without materialising a distance table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeMetric {
    pub depth: u32,
}

impl TreeMetric {
    pub fn new(depth: u32) -> Self {
        TreeMetric { depth }
    }
}

impl Metric for TreeMetric {
    fn size(&self) -> usize {
        (1usize << (self.depth + 1)) - 1
    }

    fn dist(&self, i: usize, j: usize) -> Rational {
        rational::int(tree_distance(i, j) as i64)
    }

    fn dist_f64(&self, i: usize, j: usize) -> f64 {
        tree_distance(i, j) as f64
    }
}

/// The binary tree `T_n` with unit edges, vertices in level order and
/// labelled by their 0/1 strings (the root has the empty label).
pub fn binary_tree(n: u32) -> Result<WeightedGraph, GenError> {
    if n > MAX_TREE_DEPTH {
        return Err(GenError::TooLarge {
            what: "tree depth",
            requested: n as usize,
            cap: MAX_TREE_DEPTH as usize,
        });
    }
    let size = (1usize << (n + 1)) - 1;
    let vertices = (0..size).map(|i| PointId::labeled(i, tree_label(i))).collect();
    let edges = (1..size)
        .map(|i| crate::metric::Edge {
            u: (i - 1) / 2,
            v: i,
            len: rational::int(1),
        })
        .collect();
    Ok(WeightedGraph::new(vertices, edges)?)
}

/// The fork: `a0 - a1` with two children `a2`, `a2'` below `a1`.
pub fn fork() -> WeightedGraph {
    let vertices = ["a0", "a1", "a2", "a2'"]
        .iter()
        .enumerate()
        .map(|(i, l)| PointId::labeled(i, *l))
        .collect();
    let one = rational::int(1);
    let edges = [(0, 1), (1, 2), (1, 3)]
        .iter()
        .map(|&(u, v)| crate::metric::Edge { u, v, len: one.clone() })
        .collect();
    WeightedGraph::new(vertices, edges).expect("fork is a valid graph")
}
