//! Quickhull in three dimensions, keeping only the facets that bound `p`
//! from above.

use std::collections::HashSet;

use super::{Facet, FacetSet};
use crate::error::{Error, Result};
use crate::tolerances::HULL_ORIENTATION;
use crate::wake::WakeSamples;

type P3 = [f64; 3];

fn sub(a: P3, b: P3) -> P3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: P3, b: P3) -> P3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: P3, b: P3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: P3) -> f64 {
    dot(a, a).sqrt()
}

struct Face {
    v: [usize; 3],
    normal: P3,
    offset: f64,
    outside: Vec<usize>,
    alive: bool,
}

impl Face {
    fn new(v: [usize; 3], pts: &[P3], interior: P3) -> Self {
        let n = cross(sub(pts[v[1]], pts[v[0]]), sub(pts[v[2]], pts[v[0]]));
        let len = norm(n);
        let mut normal = [n[0] / len, n[1] / len, n[2] / len];
        let mut offset = dot(normal, pts[v[0]]);
        if dot(normal, interior) > offset {
            normal = [-normal[0], -normal[1], -normal[2]];
            offset = -offset;
        }
        Face { v, normal, offset, outside: Vec::new(), alive: true }
    }

    fn distance(&self, q: P3) -> f64 {
        dot(self.normal, q) - self.offset
    }
}

/// Plane `p = a1 x + a2 ξ + a3` through `pts` in scaled coordinates, mapped
/// back to original units. `None` when the plane is (nearly) vertical.
fn plane_to_facet(normal: P3, offset: f64, scale: P3) -> Option<Facet> {
    if normal[2] <= 1e-9 {
        return None;
    }
    Some(Facet {
        a1: -scale[2] * normal[0] / (normal[2] * scale[0]),
        a2: -scale[2] * normal[1] / (normal[2] * scale[1]),
        a3: scale[2] * offset / normal[2],
    })
}

/// Upper facets of the convex hull of `points` given as `(x, ξ, p)`.
pub fn upper_hull_of_points(points: &[P3]) -> Result<Vec<Facet>> {
    if points.iter().flatten().any(|c| !c.is_finite()) {
        return Err(Error::invalid("hull input contains non-finite coordinates"));
    }
    let mut scale = [1.0; 3];
    for d in 0..3 {
        let m = points.iter().map(|q| q[d].abs()).fold(0.0, f64::max);
        if m > 0.0 {
            scale[d] = m;
        }
    }
    let mut pts: Vec<P3> = points
        .iter()
        .map(|q| [q[0] / scale[0], q[1] / scale[1], q[2] / scale[2]])
        .collect();
    pts.sort_by(|a, b| {
        a[0].total_cmp(&b[0])
            .then(a[1].total_cmp(&b[1]))
            .then(a[2].total_cmp(&b[2]))
    });
    pts.dedup();
    if pts.len() < 3 {
        return Err(Error::Degenerate(format!("{} distinct points", pts.len())));
    }

    let eps = HULL_ORIENTATION;
    let i0 = 0;
    let i1 = (0..pts.len())
        .max_by(|&a, &b| norm(sub(pts[a], pts[i0])).total_cmp(&norm(sub(pts[b], pts[i0]))))
        .unwrap();
    let e01 = sub(pts[i1], pts[i0]);
    let area = |i: usize| norm(cross(e01, sub(pts[i], pts[i0])));
    let i2 = (0..pts.len()).max_by(|&a, &b| area(a).total_cmp(&area(b))).unwrap();
    if area(i2) <= eps {
        return Err(Error::Degenerate("all points are collinear".into()));
    }
    let n012 = cross(e01, sub(pts[i2], pts[i0]));
    let n012 = {
        let l = norm(n012);
        [n012[0] / l, n012[1] / l, n012[2] / l]
    };
    let height = |i: usize| dot(n012, sub(pts[i], pts[i0])).abs();
    let i3 = (0..pts.len()).max_by(|&a, &b| height(a).total_cmp(&height(b))).unwrap();
    if height(i3) <= eps {
        let offset = dot(n012, pts[i0]);
        let (n, o) = if n012[2] < 0.0 {
            ([-n012[0], -n012[1], -n012[2]], -offset)
        } else {
            (n012, offset)
        };
        return match plane_to_facet(n, o, scale) {
            Some(f) => Ok(vec![f]),
            None => Err(Error::Degenerate("all points lie on a vertical plane".into())),
        };
    }

    let interior = [
        (pts[i0][0] + pts[i1][0] + pts[i2][0] + pts[i3][0]) / 4.0,
        (pts[i0][1] + pts[i1][1] + pts[i2][1] + pts[i3][1]) / 4.0,
        (pts[i0][2] + pts[i1][2] + pts[i2][2] + pts[i3][2]) / 4.0,
    ];
    let mut faces: Vec<Face> = Vec::new();
    for tri in [[i0, i1, i2], [i0, i1, i3], [i0, i2, i3], [i1, i2, i3]] {
        let mut f = Face::new(tri, &pts, interior);
        // Keep vertex order counter-clockwise seen from outside.
        let n = cross(sub(pts[tri[1]], pts[tri[0]]), sub(pts[tri[2]], pts[tri[0]]));
        if dot(n, f.normal) < 0.0 {
            f.v.swap(1, 2);
        }
        faces.push(f);
    }
    let seeds = [i0, i1, i2, i3];
    for (i, &q) in pts.iter().enumerate() {
        if seeds.contains(&i) {
            continue;
        }
        if let Some(f) = faces.iter_mut().find(|f| f.distance(q) > eps) {
            f.outside.push(i);
        }
    }

    while let Some(fi) = faces.iter().position(|f| f.alive && !f.outside.is_empty()) {
        let apex = *faces[fi]
            .outside
            .iter()
            .max_by(|&&a, &&b| faces[fi].distance(pts[a]).total_cmp(&faces[fi].distance(pts[b])))
            .unwrap();
        let q = pts[apex];
        let visible: Vec<usize> = (0..faces.len())
            .filter(|&k| faces[k].alive && faces[k].distance(q) > eps)
            .collect();
        let mut edges: HashSet<(usize, usize)> = HashSet::new();
        for &k in &visible {
            let v = faces[k].v;
            for e in 0..3 {
                edges.insert((v[e], v[(e + 1) % 3]));
            }
        }
        let mut orphans: Vec<usize> = Vec::new();
        let mut horizon: Vec<(usize, usize)> = Vec::new();
        for &k in &visible {
            let v = faces[k].v;
            for e in 0..3 {
                let (a, b) = (v[e], v[(e + 1) % 3]);
                if !edges.contains(&(b, a)) {
                    horizon.push((a, b));
                }
            }
            faces[k].alive = false;
            orphans.append(&mut faces[k].outside);
        }
        let first_new = faces.len();
        for (a, b) in horizon {
            faces.push(Face::new([a, b, apex], &pts, interior));
        }
        for o in orphans {
            if o == apex {
                continue;
            }
            if let Some(f) = faces[first_new..].iter_mut().find(|f| f.distance(pts[o]) > eps) {
                f.outside.push(o);
            }
        }
    }

    let mut out: Vec<Facet> = Vec::new();
    let mut seen: Vec<(P3, f64)> = Vec::new();
    for f in faces.iter().filter(|f| f.alive) {
        if seen
            .iter()
            .any(|(n, o)| norm(sub(*n, f.normal)) <= 1e-9 && (o - f.offset).abs() <= 1e-9)
        {
            continue;
        }
        seen.push((f.normal, f.offset));
        if let Some(facet) = plane_to_facet(f.normal, f.offset, scale) {
            out.push(facet);
        }
    }
    out.sort_by(|a, b| {
        a.a1.total_cmp(&b.a1)
            .then(a.a2.total_cmp(&b.a2))
            .then(a.a3.total_cmp(&b.a3))
    });
    Ok(out)
}

/// Upper facets of the hull of the samples together with their projections
/// onto `p = 0`.
pub fn upper_hull_facets(samples: &WakeSamples) -> Result<FacetSet> {
    let mut pts: Vec<P3> = Vec::with_capacity(2 * samples.samples.len());
    for s in &samples.samples {
        pts.push([s.x_mw, s.xi, s.f_mw]);
        pts.push([s.x_mw, s.xi, 0.0]);
    }
    let facets = upper_hull_of_points(&pts)?;
    if facets.is_empty() {
        return Err(Error::Degenerate("hull has no upper facet".into()));
    }
    Ok(FacetSet {
        facets,
        x_max_mw: samples.x_max,
        xi_max: samples.xi_max,
        p_max_mw: samples.p_max,
    })
}
