//! Greedy selection of representative facets.

use super::{enumerate_vertices, Facet, FacetSet, Polyhedron3};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Selection {
    pub selected: FacetSet,
    /// Indices into the full set, in selection order.
    pub indices: Vec<usize>,
    /// Approximation error (MW) before each addition.
    pub errors: Vec<f64>,
    /// Error of the returned subset; `−∞` once every facet is selected.
    pub final_error: f64,
}

/// Worst violation `p_v − f_k(x_v, ξ_v)` over vertices `v` and facets `k` not
/// yet selected, with the lowest facet index winning ties.
fn worst_violation(facets: &[Facet], chosen: &[bool], vertices: &[[f64; 3]]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (k, f) in facets.iter().enumerate() {
        if chosen[k] {
            continue;
        }
        let v = vertices
            .iter()
            .map(|q| q[2] - f.eval(q[0], q[1]))
            .fold(f64::NEG_INFINITY, f64::max);
        if best.map_or(true, |(_, b)| v > b) {
            best = Some((k, v));
        }
    }
    best
}

/// Starts from the bounding box and repeatedly adds the facet most violated
/// at a vertex until the worst violation is at most `tol` (MW).
pub fn select_facets(full: &FacetSet, tol: f64) -> Result<Selection> {
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("selection tolerance must be positive, got {tol}")));
    }
    let (sx, sxi, sp) = (full.x_max_mw, full.xi_max, full.p_max_mw);
    if !(sx > 0.0 && sxi > 0.0 && sp > 0.0) {
        return Err(Error::invalid(format!(
            "facet bounds must be positive, got ({sx}, {sxi}, {sp})"
        )));
    }
    // Work in unit-box coordinates; report errors in MW.
    let scaled: Vec<Facet> = full
        .facets
        .iter()
        .map(|f| Facet {
            a1: f.a1 * sx / sp,
            a2: f.a2 * sxi / sp,
            a3: f.a3 / sp,
        })
        .collect();
    let mut poly = Polyhedron3::from_box([0.0; 3], [1.0; 3]);
    let mut chosen = vec![false; scaled.len()];
    let mut indices = Vec::new();
    let mut errors = Vec::new();
    loop {
        let vertices = enumerate_vertices(&poly)?;
        let Some((k, err)) = worst_violation(&scaled, &chosen, &vertices) else {
            break;
        };
        let err = err * sp;
        if err <= tol {
            return Ok(finish(full, indices, errors, err));
        }
        errors.push(err);
        chosen[k] = true;
        indices.push(k);
        poly.push_facet(&scaled[k]);
    }
    Ok(finish(full, indices, errors, f64::NEG_INFINITY))
}

fn finish(full: &FacetSet, indices: Vec<usize>, errors: Vec<f64>, final_error: f64) -> Selection {
    Selection {
        selected: FacetSet {
            facets: indices.iter().map(|&k| full.facets[k]).collect(),
            ..full.clone()
        },
        indices,
        errors,
        final_error,
    }
}
