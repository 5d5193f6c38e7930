//! Vertex enumeration by intersecting every triple of bounding planes.

use rayon::prelude::*;

use super::Polyhedron3;
use crate::error::{Error, Result};
use crate::lp::{solve_lp, LinearProgram, LpStatus};
use crate::tolerances::VERTEX_DEDUP;

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn solve3(m: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let d = det3(m);
    let scale: f64 = m
        .iter()
        .map(|r| (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt())
        .product();
    if d.abs() <= 1e-12 * scale {
        return None;
    }
    let mut out = [0.0; 3];
    for (c, o) in out.iter_mut().enumerate() {
        let mut mc = m;
        for r in 0..3 {
            mc[r][c] = b[r];
        }
        *o = det3(mc) / d;
    }
    Some(out)
}

/// True when the recession cone `{d : n·d ≤ 0}` is trivial.
fn is_bounded(poly: &Polyhedron3) -> Result<bool> {
    for axis in 0..3 {
        for sign in [-1.0, 1.0] {
            let mut lp = LinearProgram::new();
            let d: Vec<usize> = (0..3)
                .map(|k| lp.add_var(if k == axis { -sign } else { 0.0 }, -1.0, 1.0))
                .collect();
            for h in &poly.halfspaces {
                lp.add_le((0..3).map(|k| (d[k], h.normal[k])).collect(), 0.0);
            }
            let sol = solve_lp(&lp)?;
            if sol.status != LpStatus::Optimal {
                return Err(Error::Solver(format!("recession probe ended {:?}", sol.status)));
            }
            if -sol.objective > 1e-9 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// All vertices of a bounded polyhedron, sorted lexicographically.
pub fn enumerate_vertices(poly: &Polyhedron3) -> Result<Vec<[f64; 3]>> {
    if !is_bounded(poly)? {
        return Err(Error::Unbounded);
    }
    let hs = &poly.halfspaces;
    let m = hs.len();
    let mut found: Vec<[f64; 3]> = (0..m)
        .into_par_iter()
        .flat_map_iter(|i| {
            (i + 1..m).flat_map(move |j| {
                (j + 1..m).filter_map(move |k| {
                    let v = solve3(
                        [hs[i].normal, hs[j].normal, hs[k].normal],
                        [hs[i].offset, hs[j].offset, hs[k].offset],
                    )?;
                    poly.contains(v, 1e-9).then_some(v)
                })
            })
        })
        .collect();
    found.sort_by(|a, b| {
        a[0].total_cmp(&b[0])
            .then(a[1].total_cmp(&b[1]))
            .then(a[2].total_cmp(&b[2]))
    });
    let mut out: Vec<[f64; 3]> = Vec::new();
    for v in found {
        let dup = out.iter().any(|u| {
            (0..3).all(|d| (u[d] - v[d]).abs() <= VERTEX_DEDUP * (1.0 + v[d].abs()))
        });
        if !dup {
            out.push(v);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_box_has_eight_corners() {
        let b = Polyhedron3::from_box([0.0; 3], [1.0; 3]);
        let v = enumerate_vertices(&b).unwrap();
        assert_eq!(v.len(), 8);
        for c in &v {
            assert!(c.iter().all(|&t| t == 0.0 || t == 1.0));
        }
    }

    #[test]
    fn cut_box_has_ten_vertices() {
        let mut b = Polyhedron3::from_box([0.0; 3], [1.0; 3]);
        b.push([1.0, 1.0, 1.0], 1.5);
        assert_eq!(enumerate_vertices(&b).unwrap().len(), 10);
    }

    #[test]
    fn simplex_has_four_vertices() {
        let mut p = Polyhedron3::default();
        for d in 0..3 {
            let mut n = [0.0; 3];
            n[d] = -1.0;
            p.push(n, 0.0);
        }
        p.push([1.0, 1.0, 1.0], 1.0);
        assert_eq!(enumerate_vertices(&p).unwrap().len(), 4);
    }

    #[test]
    fn open_region_is_rejected() {
        let mut p = Polyhedron3::default();
        for d in 0..3 {
            let mut n = [0.0; 3];
            n[d] = -1.0;
            p.push(n, 0.0);
        }
        assert!(matches!(enumerate_vertices(&p), Err(Error::Unbounded)));
    }

    #[test]
    fn box_corners_round_trip_exactly() {
        let lo = [-2.5, 0.125, 3.0];
        let hi = [7.0, 9.75, 3.5];
        let v = enumerate_vertices(&Polyhedron3::from_box(lo, hi)).unwrap();
        let mut want = Vec::new();
        for &x in &[lo[0], hi[0]] {
            for &y in &[lo[1], hi[1]] {
                for &z in &[lo[2], hi[2]] {
                    want.push([x, y, z]);
                }
            }
        }
        assert_eq!(v, want);
    }
}
