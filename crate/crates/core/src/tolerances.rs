//! Numerical tolerances shared by the solvers and the checks built on them.

/// Primal feasibility tolerance of the simplex engine (scaled problem).
pub const LP_FEASIBILITY: f64 = 1e-7;

/// Reduced-cost optimality tolerance of the simplex engine (scaled problem).
pub const LP_OPTIMALITY: f64 = 1e-7;

/// Smallest admissible pivot magnitude.
pub const LP_PIVOT: f64 = 1e-9;

/// Relative strong-duality gap accepted on an optimal solve: `gap <= LP_DUALITY_GAP * (1 + |obj|)`.
pub const LP_DUALITY_GAP: f64 = 1e-6;

/// Complementary-slackness residual accepted on an optimal solve.
pub const LP_COMPLEMENTARITY: f64 = 1e-6;

/// Orientation epsilon used by the 3-D hull in normalized coordinates.
pub const HULL_ORIENTATION: f64 = 1e-10;

/// Points closer than this (per coordinate) are the same polyhedron vertex.
pub const VERTEX_DEDUP: f64 = 1e-8;

/// Slack on hull containment checks, in MW.
pub const HULL_CONTAINMENT: f64 = 1e-6;

/// A complementarity product below this is considered satisfied in the LPCC search.
pub const LPCC_COMPLEMENTARITY: f64 = 1e-7;

/// Absolute tolerance used when a Lipschitz bound is compared with a difference quotient.
pub const LIPSCHITZ_DOMINATION: f64 = 1e-6;
