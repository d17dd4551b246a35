use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use super::EmbedError;
use crate::rational::{self, Rational};

pub const MAX_ORACLE_TREE_VERTICES: usize = 12;

/// An unlabeled tree with unit edges and its distance table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnitTree {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    #[serde(skip)]
    pub dist: Vec<Vec<u32>>,
}

impl UnitTree {
    pub fn from_edges(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        let dist = (0..n)
            .map(|s| {
                let mut d = vec![u32::MAX; n];
                d[s] = 0;
                let mut q = VecDeque::from([s]);
                while let Some(x) = q.pop_front() {
                    for &y in &adj[x] {
                        if d[y] == u32::MAX {
                            d[y] = d[x] + 1;
                            q.push_back(y);
                        }
                    }
                }
                d
            })
            .collect();
        UnitTree { n, edges, dist }
    }

    /// The path on `n` vertices, `0 - 1 - ... - (n-1)`.
    pub fn path(n: usize) -> Self {
        Self::from_edges(n, (1..n).map(|i| (i - 1, i)).collect())
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    fn rooted_code(&self, adj: &[Vec<usize>], v: usize, parent: Option<usize>) -> String {
        let mut kids: Vec<String> = adj[v]
            .iter()
            .filter(|&&w| Some(w) != parent)
            .map(|&w| self.rooted_code(adj, w, Some(v)))
            .collect();
        kids.sort();
        format!("({})", kids.concat())
    }

    /// Isomorphism-invariant code: the smallest rooted code over centres.
    pub fn canonical_code(&self) -> String {
        let adj = self.adjacency();
        let ecc: Vec<u32> = self.dist.iter().map(|row| *row.iter().max().unwrap_or(&0)).collect();
        let radius = *ecc.iter().min().unwrap_or(&0);
        (0..self.n)
            .filter(|&v| ecc[v] == radius)
            .map(|c| self.rooted_code(&adj, c, None))
            .min()
            .unwrap_or_default()
    }
}

fn tree_from_code(code: &str) -> UnitTree {
    let mut edges = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    let mut next = 0;
    for ch in code.chars() {
        if ch == '(' {
            if let Some(&p) = stack.last() {
                edges.push((p, next));
            }
            stack.push(next);
            next += 1;
        } else {
            stack.pop();
        }
    }
    UnitTree::from_edges(next, edges)
}

/// Rooted-tree codes for every size `1..=max`.
fn rooted_codes(max: usize) -> Vec<Vec<String>> {
    let mut by_size: Vec<Vec<String>> = vec![Vec::new(); max + 1];
    if max >= 1 {
        by_size[1].push("()".into());
    }
    for k in 2..=max {
        let pool: Vec<(usize, &String)> = (1..k).flat_map(|s| by_size[s].iter().map(move |c| (s, c))).collect();
        let mut found = Vec::new();
        let mut chosen: Vec<usize> = Vec::new();
        fn rec(pool: &[(usize, &String)], start: usize, left: usize, chosen: &mut Vec<usize>, found: &mut Vec<String>) {
            if left == 0 {
                let mut kids: Vec<&str> = chosen.iter().map(|&i| pool[i].1.as_str()).collect();
                kids.sort();
                found.push(format!("({})", kids.concat()));
                return;
            }
            for i in start..pool.len() {
                if pool[i].0 <= left {
                    chosen.push(i);
                    rec(pool, i, left - pool[i].0, chosen, found);
                    chosen.pop();
                }
            }
        }
        rec(&pool, 0, k - 1, &mut chosen, &mut found);
        found.sort();
        found.dedup();
        by_size[k] = found;
    }
    by_size
}

/// All unlabeled trees on exactly `n` vertices, one per isomorphism class.
pub fn free_trees(n: usize) -> Vec<UnitTree> {
    if n == 0 {
        return Vec::new();
    }
    let rooted = rooted_codes(n);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for code in &rooted[n] {
        let t = tree_from_code(code);
        if seen.insert(t.canonical_code()) {
            out.push(t);
        }
    }
    out
}

fn cycle_dist(m: usize, i: usize, j: usize) -> u32 {
    let d = i.abs_diff(j);
    d.min(m - d) as u32
}

/// Exact distortion of `i -> map[i]` from `C_m` into `tree`; `None` when
/// the map is not injective.
pub fn map_distortion(m: usize, tree: &UnitTree, map: &[usize]) -> Option<Rational> {
    let (mut lip, mut colip) = ((0u64, 1u64), (0u64, 1u64));
    for i in 0..m {
        for j in i + 1..m {
            let dt = tree.dist[map[i]][map[j]] as u64;
            if dt == 0 {
                return None;
            }
            let dc = cycle_dist(m, i, j) as u64;
            if dt * lip.1 > lip.0 * dc {
                lip = (dt, dc);
            }
            if dc * colip.1 > colip.0 * dt {
                colip = (dc, dt);
            }
        }
    }
    Some(rational::frac((lip.0 * colip.0) as i64, (lip.1 * colip.1) as i64))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleTreeWitness {
    pub tree: UnitTree,
    pub map: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleTreeReport {
    pub m: usize,
    pub max_tree_vertices: usize,
    /// Number of trees examined for each vertex count `1..=max`.
    pub trees_by_size: Vec<usize>,
    pub search_nodes: u64,
    /// Minimum distortion over injective maps; `None` when no tree in the
    /// slice admits one (every map collapses a pair).
    #[serde(with = "rational::serde_opt_str")]
    pub min_distortion: Option<Rational>,
    pub witness: Option<CycleTreeWitness>,
    #[serde(with = "rational::serde_str")]
    pub bound: Rational,
    pub bound_holds: bool,
}

struct Search<'a> {
    m: usize,
    tree: &'a UnitTree,
    map: Vec<usize>,
    used: Vec<bool>,
    best: Option<(u64, u64)>,
    best_map: Option<Vec<usize>>,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    fn dfs(&mut self, lip: (u64, u64), colip: (u64, u64)) -> Result<(), EmbedError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(EmbedError::Budget {
                what: "cycle-tree search nodes",
                cap: self.budget,
            });
        }
        let i = self.map.len();
        if i == self.m {
            let val = (lip.0 * colip.0, lip.1 * colip.1);
            if self.best.is_none_or(|b| val.0 * b.1 < b.0 * val.1) {
                self.best = Some(val);
                self.best_map = Some(self.map.clone());
            }
            return Ok(());
        }
        for v in 0..self.tree.n {
            if self.used[v] {
                continue;
            }
            let (mut l, mut c) = (lip, colip);
            for (j, &w) in self.map.iter().enumerate() {
                let dt = self.tree.dist[w][v] as u64;
                let dc = cycle_dist(self.m, i, j) as u64;
                if dt * l.1 > l.0 * dc {
                    l = (dt, dc);
                }
                if dc * c.1 > c.0 * dt {
                    c = (dc, dt);
                }
            }
            if let Some(b) = self.best {
                // lip and colip only grow as points are added.
                if i > 0 && l.0 * c.0 * b.1 >= b.0 * l.1 * c.1 {
                    continue;
                }
            }
            self.used[v] = true;
            self.map.push(v);
            self.dfs(l, c)?;
            self.map.pop();
            self.used[v] = false;
        }
        Ok(())
    }
}

/// Minimum distortion of `C_m` into unit-edge trees with at most
/// `max_tree_vertices` vertices, by exhaustive branch and bound.
///
/// Maps that are not injective have infinite distortion and are cut as soon
/// as they collide. `budget` caps the number of search nodes.
pub fn cycle_tree_lower_oracle(m: usize, max_tree_vertices: usize, budget: u64) -> Result<CycleTreeReport, EmbedError> {
    if m < 3 {
        return Err(EmbedError::Invalid(format!("cycle needs m >= 3, got {m}")));
    }
    if max_tree_vertices > MAX_ORACLE_TREE_VERTICES {
        return Err(EmbedError::Budget {
            what: "tree vertices",
            cap: MAX_ORACLE_TREE_VERTICES as u64,
        });
    }
    let mut trees_by_size = Vec::new();
    let mut nodes = 0u64;
    let mut best: Option<(u64, u64)> = None;
    let mut witness = None;
    for k in 1..=max_tree_vertices {
        let trees = free_trees(k);
        trees_by_size.push(trees.len());
        if k < m {
            continue;
        }
        for tree in &trees {
            let mut s = Search {
                m,
                tree,
                map: Vec::with_capacity(m),
                used: vec![false; k],
                best,
                best_map: None,
                nodes: 0,
                budget: budget.saturating_sub(nodes),
            };
            s.dfs((0, 1), (0, 1))?;
            nodes += s.nodes;
            if let Some(map) = s.best_map {
                best = s.best;
                witness = Some(CycleTreeWitness {
                    tree: tree.clone(),
                    map,
                });
            }
        }
    }
    let min_distortion = best.map(|(p, q)| rational::frac(p as i64, q as i64));
    let bound = rational::frac(m as i64, 3) - rational::int(1);
    let bound_holds = min_distortion.as_ref().is_none_or(|d| *d >= bound);
    Ok(CycleTreeReport {
        m,
        max_tree_vertices,
        trees_by_size,
        search_nodes: nodes,
        min_distortion,
        witness,
        bound,
        bound_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn tree_counts() {
        let counts: Vec<usize> = (1..=10).map(|n| free_trees(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 1, 2, 3, 6, 11, 23, 47, 106]);
    }

    #[test]
    fn order_preserving_map_onto_path() {
        let p = UnitTree::path(6);
        assert_eq!(map_distortion(6, &p, &[0, 1, 2, 3, 4, 5]), Some(int(5)));
        assert_eq!(map_distortion(6, &p, &[0, 0, 2, 3, 4, 5]), None);
    }

    #[test]
    fn small_cycles() {
        let r = cycle_tree_lower_oracle(4, 4, 1_000_000).unwrap();
        assert!(r.bound_holds);
        assert!(r.min_distortion.clone().unwrap() >= int(1));
        let witness = r.witness.unwrap();
        assert_eq!(map_distortion(4, &witness.tree, &witness.map), r.min_distortion);
        let none = cycle_tree_lower_oracle(8, 6, 1_000_000).unwrap();
        assert_eq!(none.min_distortion, None);
        assert!(none.bound_holds);
        assert_eq!(none.bound, frac(5, 3));
    }

    #[test]
    fn branch_and_bound_matches_plain_enumeration() {
        // Every injective map of C_5 into every tree on 5 or 6 vertices.
        let m = 5;
        let mut best: Option<Rational> = None;
        for k in 5..=6 {
            for t in free_trees(k) {
                let mut map = vec![0usize; m];
                loop {
                    if let Some(d) = map_distortion(m, &t, &map) {
                        if best.as_ref().is_none_or(|b| d < *b) {
                            best = Some(d);
                        }
                    }
                    let mut i = 0;
                    while i < m {
                        map[i] += 1;
                        if map[i] < k {
                            break;
                        }
                        map[i] = 0;
                        i += 1;
                    }
                    if i == m {
                        break;
                    }
                }
            }
        }
        assert_eq!(cycle_tree_lower_oracle(m, 6, 10_000_000).unwrap().min_distortion, best);
    }
}
