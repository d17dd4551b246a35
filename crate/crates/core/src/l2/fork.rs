use serde::Serialize;

use super::L2Error;
use crate::embeddings::{distortion, Embedding};
use crate::generators::{tree_distance, TreeMetric};
use crate::metric::Metric;

/// Slack allowed when checking that an input is non-contractive.
pub const CONTRACTION_SLACK: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct ForkSelection {
    pub n: u32,
    /// Depth of the selected tree, `⌊n/2⌋`.
    pub m: u32,
    /// `selected[i]` is the vertex of `T_n` standing for vertex `i` of `T_m`.
    pub selected: Vec<usize>,
    pub embedding: Embedding<f64>,
    /// Exact check that `d_{T_n}(selected[i], selected[j]) = 2 d_{T_m}(i, j)`.
    pub isometric: bool,
    pub input_distortion: f64,
    pub output_distortion: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ForkSummary {
    pub n: u32,
    pub m: u32,
    pub selected: Vec<usize>,
    pub isometric: bool,
    pub input_distortion: f64,
    pub output_distortion: f64,
    pub improvement: f64,
}

impl ForkSelection {
    pub fn improvement(&self) -> f64 {
        self.input_distortion - self.output_distortion
    }

    pub fn summary(&self) -> ForkSummary {
        ForkSummary {
            n: self.n,
            m: self.m,
            selected: self.selected.clone(),
            isometric: self.isometric,
            input_distortion: self.input_distortion,
            output_distortion: self.output_distortion,
            improvement: self.improvement(),
        }
    }
}

/// One round of grandchild selection on a non-contractive embedding of
/// `T_n`.
///
/// Child `2v+1` of every vertex is its daughter and `2v+2` its son. Each
/// selected vertex keeps, among its daughter's children and among its
/// son's children, the one whose image is closest to its own image, the
/// left one on ties.
pub fn fork_select(n: u32, emb: &Embedding<f64>) -> Result<ForkSelection, L2Error> {
    if n < 2 {
        return Err(L2Error::Invalid(format!("fork selection needs depth >= 2, got {n}")));
    }
    let tree = TreeMetric::new(n);
    if emb.len() != tree.size() {
        return Err(L2Error::Invalid(format!(
            "embedding has {} points, T_{n} has {}",
            emb.len(),
            tree.size()
        )));
    }
    let input = distortion(&tree, emb)?;
    if input.colip > 1.0 + CONTRACTION_SLACK {
        let (i, j) = input.colip_witness;
        return Err(L2Error::Contractive {
            i,
            j,
            ratio: 1.0 / input.colip,
        });
    }
    let m = n / 2;
    let size = (1usize << (m + 1)) - 1;
    let mut selected = vec![0usize; size];
    for i in 0..size {
        if 2 * i + 2 >= size {
            continue;
        }
        let v = selected[i];
        for (slot, child) in [(2 * i + 1, 2 * v + 1), (2 * i + 2, 2 * v + 2)] {
            let (left, right) = (2 * child + 1, 2 * child + 2);
            let dl = emb.diff_norm(v, left)?;
            let dr = emb.diff_norm(v, right)?;
            selected[slot] = if dr < dl { right } else { left };
        }
    }
    let mut isometric = true;
    for i in 0..size {
        for j in i + 1..size {
            if tree_distance(selected[i], selected[j]) != 2 * tree_distance(i, j) {
                isometric = false;
            }
        }
    }
    let embedding = emb.restrict(&selected);
    let output = distortion(&TreeMetric::new(m), &embedding)?;
    Ok(ForkSelection {
        n,
        m,
        selected,
        embedding,
        isometric,
        input_distortion: input.distortion,
        output_distortion: output.distortion,
    })
}
