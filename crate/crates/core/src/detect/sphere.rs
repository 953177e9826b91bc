//! Depth-first Schnorr-Euchner sphere search over a binary (+-a) alphabet.

use serde::{Deserialize, Serialize};

use super::model::TreeModel;

/// How the search radius is initialised. Both policies shrink the radius
/// to the best leaf found so far and return the exact minimiser.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusPolicy {
    /// Start from the residual of the rounded zero-forcing point.
    #[default]
    BabaiShrink,
    /// Start from an infinite radius.
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub point: Vec<f64>,
    /// `||z - R x||^2` of the returned point.
    pub metric: f64,
    pub visited: u64,
    /// `visited_per_depth[d - 1]` counts entered nodes at depth `d`.
    pub visited_per_depth: Vec<u64>,
}

fn residual(tree: &TreeModel, z: &[f64], x: &[f64]) -> f64 {
    tree.apply_r(x)
        .iter()
        .zip(z)
        .map(|(a, b)| (b - a) * (b - a))
        .sum()
}

#[inline]
fn slice(v: f64, amp: f64) -> f64 {
    if v < 0.0 {
        -amp
    } else {
        amp
    }
}

/// Finds `argmin ||z - R x||^2` over `x in {-amp, +amp}^dim`.
pub fn sphere_search(tree: &TreeModel, z: &[f64], amp: f64, policy: RadiusPolicy) -> SearchOutcome {
    let dim = tree.dim();
    assert_eq!(z.len(), dim, "projection length must match the tree");
    if dim == 0 {
        return SearchOutcome {
            point: Vec::new(),
            metric: 0.0,
            visited: 0,
            visited_per_depth: Vec::new(),
        };
    }
    let r = tree.r();

    let (mut best, mut best_metric) = match policy {
        RadiusPolicy::BabaiShrink => {
            let babai: Vec<f64> = tree.solve(z).into_iter().map(|v| slice(v, amp)).collect();
            let m = residual(tree, z, &babai);
            (babai, m)
        }
        RadiusPolicy::Unbounded => (vec![amp; dim], f64::INFINITY),
    };
    // Admit nodes that tie the incumbent up to rounding; only strict
    // improvements replace it.
    let bound = |m: f64| m + m.abs() * 1e-9 + 1e-12;
    let mut radius = bound(best_metric);

    let mut x = vec![0.0; dim];
    let mut ped = vec![0.0; dim + 1];
    let mut pref = vec![0.0; dim];
    let mut tried = vec![0u8; dim];
    let mut offset = vec![0.0; dim];
    let mut visited = 0u64;
    let mut per_depth = vec![0u64; dim];

    let enter = |i: usize, x: &[f64], offset: &mut [f64], pref: &mut [f64], tried: &mut [u8]| {
        let row = &r[i * dim..(i + 1) * dim];
        let acc: f64 = (i + 1..dim).map(|j| row[j] * x[j]).sum();
        offset[i] = z[i] - acc;
        pref[i] = slice(offset[i], 1.0);
        tried[i] = 0;
    };

    let mut i = dim - 1;
    enter(i, &x, &mut offset, &mut pref, &mut tried);
    loop {
        if tried[i] < 2 {
            let v = if tried[i] == 0 { pref[i] } else { -pref[i] } * amp;
            tried[i] += 1;
            let e = offset[i] - r[i * dim + i] * v;
            let d = ped[i + 1] + e * e;
            if d <= radius {
                visited += 1;
                per_depth[dim - 1 - i] += 1;
                x[i] = v;
                ped[i] = d;
                if i == 0 {
                    if d < best_metric {
                        best_metric = d;
                        best.copy_from_slice(&x);
                        radius = bound(best_metric);
                    }
                } else {
                    i -= 1;
                    enter(i, &x, &mut offset, &mut pref, &mut tried);
                }
            } else {
                // the second child is further from the centre than the first
                tried[i] = 2;
            }
        } else if i + 1 == dim {
            break;
        } else {
            i += 1;
        }
    }

    SearchOutcome {
        point: best,
        metric: best_metric,
        visited,
        visited_per_depth: per_depth,
    }
}

/// Nodes in a full binary tree of `depth` levels, excluding the root.
pub fn full_tree_nodes(depth: usize) -> u128 {
    (1u128 << (depth + 1)) - 2
}
