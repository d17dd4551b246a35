use serde::Serialize;

use super::{GenError, Weighting};
use crate::metric::{Edge, PointId, WeightedGraph};

pub const MAX_DIAMOND_LEVEL: u32 = 10;
pub const MAX_LAAKSO_LEVEL: u32 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Diamond,
    Laakso,
}

impl Family {
    /// Length ratio between consecutive levels in the scaled weighting.
    pub fn base(self) -> u64 {
        match self {
            Family::Diamond => 2,
            Family::Laakso => 4,
        }
    }

    fn new_vertices(self) -> usize {
        match self {
            Family::Diamond => 2,
            Family::Laakso => 4,
        }
    }
}

/// The gadget that replaced one edge `u -> v` (u on the source side).
///
/// `inner` is `[a, b]` for a diamond quadrilateral and
/// `[p, left, right, q]` for a Laakso gadget. Sides number the branches:
/// `a` = 0, `b` = 1 for diamonds; stems = 0, left = 1, right = 2 for Laakso.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cell {
    pub level: u32,
    pub u: usize,
    pub v: usize,
    pub inner: Vec<usize>,
    pub parent: Option<(usize, u8)>,
}

/// A diamond or Laakso graph together with its construction history.
///
/// Vertices of level `k` keep their indices at every later level, so
/// `0..level_sizes[k]` is the image of `V(level k)`.
#[derive(Debug, Clone)]
pub struct RecursiveGraph {
    pub family: Family,
    pub level: u32,
    pub weighting: Weighting,
    pub graph: WeightedGraph,
    pub source: usize,
    pub sink: usize,
    pub level_sizes: Vec<usize>,
    pub cells: Vec<Cell>,
    /// Cell and side that created each vertex (`None` for source and sink).
    pub vertex_origin: Vec<Option<(usize, u8)>>,
    /// Cell and side that produced each edge of the final graph.
    pub edge_origin: Vec<Option<(usize, u8)>>,
}

impl RecursiveGraph {
    /// Cells whose branch `side` contains vertex `x`, innermost first.
    pub fn ancestry(&self, x: usize) -> Vec<(usize, u8)> {
        let mut out = Vec::new();
        let mut cur = self.vertex_origin[x];
        while let Some((c, s)) = cur {
            out.push((c, s));
            cur = self.cells[c].parent;
        }
        out
    }
}

fn build(family: Family, n: u32, w: Weighting) -> Result<RecursiveGraph, GenError> {
    let cap = match family {
        Family::Diamond => MAX_DIAMOND_LEVEL,
        Family::Laakso => MAX_LAAKSO_LEVEL,
    };
    if n > cap {
        return Err(GenError::TooLarge {
            what: "recursion level",
            requested: n as usize,
            cap: cap as usize,
        });
    }
    let mut vertex_count = 2usize;
    let mut vertex_origin: Vec<Option<(usize, u8)>> = vec![None, None];
    let mut edges: Vec<(usize, usize, Option<(usize, u8)>)> = vec![(0, 1, None)];
    let mut cells = Vec::new();
    let mut level_sizes = vec![2];
    for level in 1..=n {
        let mut next = Vec::with_capacity(edges.len() * if family == Family::Diamond { 4 } else { 6 });
        for &(u, v, origin) in &edges {
            let c = cells.len();
            let inner: Vec<usize> = (vertex_count..vertex_count + family.new_vertices()).collect();
            vertex_count += inner.len();
            match family {
                Family::Diamond => {
                    let (a, b) = (inner[0], inner[1]);
                    vertex_origin.push(Some((c, 0)));
                    vertex_origin.push(Some((c, 1)));
                    next.push((u, a, Some((c, 0))));
                    next.push((a, v, Some((c, 0))));
                    next.push((u, b, Some((c, 1))));
                    next.push((b, v, Some((c, 1))));
                }
                Family::Laakso => {
                    let (p, l, r, q) = (inner[0], inner[1], inner[2], inner[3]);
                    vertex_origin.extend([Some((c, 0)), Some((c, 1)), Some((c, 2)), Some((c, 0))]);
                    next.push((u, p, Some((c, 0))));
                    next.push((p, l, Some((c, 1))));
                    next.push((p, r, Some((c, 2))));
                    next.push((l, q, Some((c, 1))));
                    next.push((r, q, Some((c, 2))));
                    next.push((q, v, Some((c, 0))));
                }
            }
            cells.push(Cell {
                level,
                u,
                v,
                inner,
                parent: origin,
            });
        }
        edges = next;
        level_sizes.push(vertex_count);
    }
    let len = w.edge_length(family.base(), n);
    let vertices = (0..vertex_count)
        .map(|i| match i {
            0 => PointId::labeled(0, "s"),
            1 => PointId::labeled(1, "t"),
            _ => PointId::new(i),
        })
        .collect();
    let edge_origin = edges.iter().map(|e| e.2).collect();
    let graph = WeightedGraph::new(
        vertices,
        edges.iter().map(|&(u, v, _)| Edge { u, v, len: len.clone() }).collect(),
    )?;
    Ok(RecursiveGraph {
        family,
        level: n,
        weighting: w,
        graph,
        source: 0,
        sink: 1,
        level_sizes,
        cells,
        vertex_origin,
        edge_origin,
    })
}

/// The diamond `D_n`: every edge of `D_{n-1}` replaced by a quadrilateral.
pub fn diamond(n: u32, w: Weighting) -> Result<RecursiveGraph, GenError> {
    build(Family::Diamond, n, w)
}

/// The Laakso graph `L_n`: every edge of `L_{n-1}` replaced by the
/// six-vertex gadget source, stem, left, right, stem, sink.
pub fn laakso(n: u32, w: Weighting) -> Result<RecursiveGraph, GenError> {
    build(Family::Laakso, n, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{apsp, count_geodesics, verify_metric};
    use crate::rational::{int, Rational};

    fn vertex_recurrence(family: Family, n: u32) -> (usize, usize) {
        let (mut v, mut e) = (2usize, 1usize);
        for _ in 0..n {
            match family {
                Family::Diamond => {
                    v += 2 * e;
                    e *= 4;
                }
                Family::Laakso => {
                    v += 4 * e;
                    e *= 6;
                }
            }
        }
        (v, e)
    }

    #[test]
    fn counts_follow_recurrences() {
        for n in 0..=4 {
            for (family, g) in [
                (Family::Diamond, diamond(n, Weighting::Unit)),
                (Family::Laakso, laakso(n, Weighting::Unit)),
            ] {
                let g = g.unwrap();
                let (v, e) = vertex_recurrence(family, n);
                assert_eq!((g.graph.len(), g.graph.edges().len()), (v, e), "{family:?} {n}");
                assert_eq!(g.level_sizes.len(), n as usize + 1);
            }
        }
        let d2 = diamond(2, Weighting::Scaled).unwrap();
        assert_eq!((d2.graph.len(), d2.graph.edges().len()), (12, 16));
        let l1 = laakso(1, Weighting::Scaled).unwrap();
        assert_eq!((l1.graph.len(), l1.graph.edges().len()), (6, 6));
        assert_eq!(laakso(2, Weighting::Unit).unwrap().graph.len(), 30);
    }

    #[test]
    fn source_sink_distances() {
        for n in 0..=4 {
            let unit = apsp(&diamond(n, Weighting::Unit).unwrap().graph).unwrap();
            assert_eq!(unit.d(0, 1), &int(1 << n));
            let scaled = apsp(&diamond(n, Weighting::Scaled).unwrap().graph).unwrap();
            assert_eq!(scaled.d(0, 1), &int(1));
            assert!(verify_metric(&scaled).is_valid());
            let l = apsp(&laakso(n, Weighting::Scaled).unwrap().graph).unwrap();
            assert_eq!(l.d(0, 1), &int(1));
            let lu = apsp(&laakso(n, Weighting::Unit).unwrap().graph).unwrap();
            assert_eq!(lu.d(0, 1), &int(1 << (2 * n)));
        }
    }

    #[test]
    fn level_injection_is_isometric() {
        for family in [Family::Diamond, Family::Laakso] {
            let levels: Vec<_> = (0..=4)
                .map(|n| apsp(&build(family, n, Weighting::Scaled).unwrap().graph).unwrap())
                .collect();
            for n in 1..=4 {
                let (prev, cur) = (&levels[n - 1], &levels[n]);
                for i in 0..prev.len() {
                    for j in 0..prev.len() {
                        assert_eq!(prev.d(i, j), cur.d(i, j), "{family:?} level {n}");
                    }
                }
            }
        }
    }

    #[test]
    fn cells_and_ancestry() {
        let d2 = diamond(2, Weighting::Scaled).unwrap();
        assert_eq!(d2.cells.len(), 5);
        let top = &d2.cells[0];
        assert_eq!((top.u, top.v, top.inner.clone()), (0, 1, vec![2, 3]));
        for (k, e) in d2.graph.edges().iter().enumerate() {
            let (c, _) = d2.edge_origin[k].unwrap();
            assert_eq!(d2.cells[c].level, 2);
            assert!(d2.graph.edge_len(e.u, e.v).is_some());
        }
        for x in 4..12 {
            let anc = d2.ancestry(x);
            assert_eq!(anc.len(), 2);
            assert_eq!(anc[1].0, 0);
        }
        let quarter: Rational = crate::rational::frac(1, 4);
        assert!(d2.graph.edges().iter().all(|e| e.len == quarter));
    }

    #[test]
    fn geodesic_counts() {
        // Every quadrilateral crossed doubles the count: G_n = 2 * G_{n-1}^2.
        let expected = [1u32, 2, 8, 128];
        for (n, &g) in expected.iter().enumerate() {
            let d = diamond(n as u32, Weighting::Scaled).unwrap();
            assert_eq!(count_geodesics(&d.graph, 0, 1).unwrap(), g.into());
        }
        let l1 = laakso(1, Weighting::Scaled).unwrap();
        assert_eq!(count_geodesics(&l1.graph, 0, 1).unwrap(), 2u32.into());
    }
}
