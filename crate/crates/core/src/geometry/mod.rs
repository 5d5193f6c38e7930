//! Piecewise-linear envelopes of available wind power: the upper convex hull
//! of the sweep, polyhedron vertices, and greedy facet selection.

mod hull;
mod select;
mod vertices;

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use hull::{upper_hull_facets, upper_hull_of_points};
pub use select::{select_facets, Selection};
pub use vertices::enumerate_vertices;

/// `p ≤ a1·x + a2·ξ + a3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Facet {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

impl Facet {
    pub fn eval(&self, x: f64, xi: f64) -> f64 {
        self.a1 * x + self.a2 * xi + self.a3
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FacetSet {
    pub facets: Vec<Facet>,
    pub x_max_mw: f64,
    pub xi_max: f64,
    pub p_max_mw: f64,
}

impl FacetSet {
    /// Lowest facet value at `(x, ξ)`, or `+∞` for an empty set.
    pub fn envelope(&self, x: f64, xi: f64) -> f64 {
        self.facets
            .iter()
            .map(|f| f.eval(x, xi))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut out = out;
        writeln!(
            out,
            "# x_max_mw={},xi_max={},p_max_mw={}",
            self.x_max_mw, self.xi_max, self.p_max_mw
        )
        .map_err(|e| Error::Output(e.to_string()))?;
        let mut w = csv::Writer::from_writer(out);
        let fail = |e: csv::Error| Error::Output(e.to_string());
        w.write_record(["k", "a1", "a2", "a3"]).map_err(fail)?;
        for (k, f) in self.facets.iter().enumerate() {
            w.write_record([k.to_string(), f.a1.to_string(), f.a2.to_string(), f.a3.to_string()])
                .map_err(fail)?;
        }
        w.flush().map_err(|e| Error::Output(e.to_string()))
    }

    /// Reads the layout produced by [`FacetSet::write_csv`]; `origin` names the
    /// source in error messages.
    pub fn read_csv<R: Read>(mut input: R, origin: &str) -> Result<Self> {
        let mut text = String::new();
        input
            .read_to_string(&mut text)
            .map_err(|e| Error::io(origin, e))?;
        let (first, rest) = text.split_once('\n').unwrap_or((text.as_str(), ""));
        let header = first
            .strip_prefix("# ")
            .ok_or_else(|| Error::parse(origin, "missing bounds comment line"))?;
        let mut bounds = [f64::NAN; 3];
        for part in header.trim().split(',') {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::parse(origin, format!("bad bound entry {part:?}")))?;
            let v: f64 = value
                .parse()
                .map_err(|_| Error::parse(origin, format!("bad number {value:?}")))?;
            match key {
                "x_max_mw" => bounds[0] = v,
                "xi_max" => bounds[1] = v,
                "p_max_mw" => bounds[2] = v,
                _ => return Err(Error::parse(origin, format!("unknown bound {key:?}"))),
            }
        }
        if bounds.iter().any(|b| b.is_nan()) {
            return Err(Error::parse(origin, "bounds comment must set x_max_mw, xi_max, p_max_mw"));
        }
        let mut r = csv::Reader::from_reader(rest.as_bytes());
        let mut facets = Vec::new();
        for (line, rec) in r.deserialize::<(usize, f64, f64, f64)>().enumerate() {
            let (k, a1, a2, a3) = rec.map_err(|e| Error::parse(origin, e))?;
            if k != line {
                return Err(Error::parse(origin, format!("facet index {k} out of order")));
            }
            facets.push(Facet { a1, a2, a3 });
        }
        Ok(FacetSet {
            facets,
            x_max_mw: bounds[0],
            xi_max: bounds[1],
            p_max_mw: bounds[2],
        })
    }
}

/// Half-space `normal · q ≤ offset` in `(x, ξ, p)` space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfSpace {
    pub normal: [f64; 3],
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polyhedron3 {
    pub halfspaces: Vec<HalfSpace>,
}

impl Polyhedron3 {
    pub fn from_box(lo: [f64; 3], hi: [f64; 3]) -> Self {
        let mut halfspaces = Vec::with_capacity(6);
        for d in 0..3 {
            let mut n = [0.0; 3];
            n[d] = -1.0;
            halfspaces.push(HalfSpace { normal: n, offset: -lo[d] });
            n[d] = 1.0;
            halfspaces.push(HalfSpace { normal: n, offset: hi[d] });
        }
        Polyhedron3 { halfspaces }
    }

    pub fn push(&mut self, normal: [f64; 3], offset: f64) {
        self.halfspaces.push(HalfSpace { normal, offset });
    }

    /// Adds `p − a1·x − a2·ξ ≤ a3`.
    pub fn push_facet(&mut self, f: &Facet) {
        self.push([-f.a1, -f.a2, 1.0], f.a3);
    }

    pub fn contains(&self, q: [f64; 3], tol: f64) -> bool {
        self.halfspaces.iter().all(|h| {
            let lhs: f64 = (0..3).map(|d| h.normal[d] * q[d]).sum();
            lhs <= h.offset + tol * (1.0 + h.offset.abs())
        })
    }
}
