use super::Mesh;
use crate::classify::{classify, FlowType};
use crate::gas::GasModel;
use crate::state::{crossflow_speed, PrimitiveState};
use crate::Result;
use std::collections::VecDeque;

/// One row of a classification map.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegionRecord {
    pub cell: usize,
    pub i: usize,
    pub j: usize,
    pub xi: [f64; 2],
    pub q_c: f64,
    pub c: f64,
    pub margin: f64,
    pub label: FlowType,
}

/// Classify every cell of a field.
pub fn region_map<G: GasModel + ?Sized>(
    mesh: &Mesh,
    prims: &[PrimitiveState],
    gas: &G,
    tol: f64,
) -> Result<Vec<RegionRecord>> {
    prims
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let m = mesh.cell_metric(k);
            let t = classify(p, m, gas, tol)?;
            let (i, j) = (k / mesh.n2, k % mesh.n2);
            Ok(RegionRecord {
                cell: k,
                i,
                j,
                xi: mesh.center(i as isize, j as isize),
                q_c: crossflow_speed(p.v(), m),
                c: gas.sound_speed(p.rho, p.e)?,
                margin: t.margin,
                label: t.kind,
            })
        })
        .collect()
}

/// Four-connected components of the cells where `mask` holds, largest first.
/// `ξ²` neighbors wrap when `periodic`.
pub fn components(n1: usize, n2: usize, periodic: bool, mask: &[bool]) -> Vec<Vec<usize>> {
    assert_eq!(mask.len(), n1 * n2);
    let mut seen = vec![false; mask.len()];
    let mut out = Vec::new();
    for start in 0..mask.len() {
        if !mask[start] || seen[start] {
            continue;
        }
        let mut comp = Vec::new();
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(k) = queue.pop_front() {
            comp.push(k);
            let (i, j) = (k / n2, k % n2);
            let mut nb = Vec::with_capacity(4);
            if i > 0 {
                nb.push(k - n2);
            }
            if i + 1 < n1 {
                nb.push(k + n2);
            }
            if j > 0 {
                nb.push(k - 1);
            } else if periodic {
                nb.push(i * n2 + n2 - 1);
            }
            if j + 1 < n2 {
                nb.push(k + 1);
            } else if periodic {
                nb.push(i * n2);
            }
            for q in nb {
                if mask[q] && !seen[q] {
                    seen[q] = true;
                    queue.push_back(q);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    out
}
