use super::{tree_distance, tree_label, GenError, MAX_TREE_DEPTH};
use crate::metric::{MetricSpace, PointId};
use crate::rational;

pub const MAX_PRODUCT_POINTS: usize = 4096;

/// `T_{n_1} × ... × T_{n_k}` with the ℓ₁ sum of tree distances.
///
/// Points are enumerated in lexicographic order of their coordinate
/// tuples; labels read `(l_1,...,l_k)` with tree labels inside.
pub fn tree_product(depths: &[u32]) -> Result<MetricSpace, GenError> {
    if depths.is_empty() {
        return Err(GenError::Invalid("product needs at least one factor".into()));
    }
    let mut total = 1usize;
    for &n in depths {
        if n > MAX_TREE_DEPTH {
            return Err(GenError::TooLarge {
                what: "tree depth",
                requested: n as usize,
                cap: MAX_TREE_DEPTH as usize,
            });
        }
        total = total.saturating_mul((1usize << (n + 1)) - 1);
    }
    if total > MAX_PRODUCT_POINTS {
        return Err(GenError::TooLarge {
            what: "product size",
            requested: total,
            cap: MAX_PRODUCT_POINTS,
        });
    }
    let sizes: Vec<usize> = depths.iter().map(|&n| (1usize << (n + 1)) - 1).collect();
    let mut tuples = Vec::with_capacity(total);
    let mut cur = vec![0usize; sizes.len()];
    loop {
        tuples.push(cur.clone());
        let mut k = sizes.len();
        loop {
            if k == 0 {
                break;
            }
            k -= 1;
            cur[k] += 1;
            if cur[k] < sizes[k] {
                break;
            }
            cur[k] = 0;
            if k == 0 {
                k = usize::MAX;
                break;
            }
        }
        if k == usize::MAX {
            break;
        }
    }
    let points = tuples
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let parts: Vec<String> = t.iter().map(|&v| tree_label(v)).collect();
            PointId::labeled(i, format!("({})", parts.join(",")))
        })
        .collect();
    Ok(MetricSpace::from_fn(points, |i, j| {
        let d: u32 = tuples[i]
            .iter()
            .zip(&tuples[j])
            .map(|(&a, &b)| tree_distance(a, b))
            .sum();
        rational::int(d as i64)
    })?)
}
