//! Brute-force reference computations. They share no code with the solvers
//! they check and are exposed through the `oracle` subcommand.

/// Upper supporting planes through every non-collinear point triple.
pub fn brute_force_upper_facets(points: &[[f64; 3]]) -> Vec<crate::geometry::Facet> {
    use crate::geometry::Facet;
    let mut out: Vec<Facet> = Vec::new();
    let n = points.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (a, b, c) = (points[i], points[j], points[k]);
                let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
                let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
                let nz = u[0] * v[1] - u[1] * v[0];
                if nz.abs() < 1e-9 {
                    continue;
                }
                let nx = u[1] * v[2] - u[2] * v[1];
                let ny = u[2] * v[0] - u[0] * v[2];
                let f = Facet {
                    a1: -nx / nz,
                    a2: -ny / nz,
                    a3: a[2] + nx / nz * a[0] + ny / nz * a[1],
                };
                if points.iter().all(|q| q[2] <= f.eval(q[0], q[1]) + 1e-9)
                    && !out.iter().any(|g| {
                        (g.a1 - f.a1).abs() < 1e-7 && (g.a2 - f.a2).abs() < 1e-7 && (g.a3 - f.a3).abs() < 1e-7
                    })
                {
                    out.push(f);
                }
            }
        }
    }
    out
}

/// Minimum of a small bounded LP by enumerating every vertex: each choice of
/// `n` active constraints is solved densely and kept when feasible. Equalities
/// are enforced by the feasibility check, so empty or redundant equality rows
/// do not hide vertices. Returns `None` when no vertex is feasible.
pub fn brute_force_lp(lp: &crate::lp::LinearProgram) -> Option<f64> {
    let n = lp.num_vars();
    // Candidate active constraints as (coefficients, rhs).
    let mut cons: Vec<(Vec<f64>, f64)> = Vec::new();
    for row in &lp.rows {
        let mut a = vec![0.0; n];
        for &(j, v) in &row.coeffs {
            a[j] += v;
        }
        cons.push((a, row.rhs));
    }
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        if lp.lower[j].is_finite() {
            cons.push((e.clone(), lp.lower[j]));
        }
        if lp.upper[j].is_finite() && lp.upper[j] != lp.lower[j] {
            cons.push((e, lp.upper[j]));
        }
    }
    let all: Vec<usize> = (0..cons.len()).collect();
    let feasible = |y: &[f64]| lp.max_violation(y) <= 1e-7;
    let mut best: Option<f64> = None;
    let mut pick = Vec::new();
    fn choose(
        from: &[usize],
        k: usize,
        start: usize,
        pick: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if pick.len() == k {
            visit(pick);
            return;
        }
        for i in start..from.len() {
            pick.push(from[i]);
            choose(from, k, i + 1, pick, visit);
            pick.pop();
        }
    }
    choose(&all, n, 0, &mut pick, &mut |rows: &[usize]| {
        let mut m: Vec<Vec<f64>> = rows.iter().map(|&k| cons[k].0.clone()).collect();
        let mut b: Vec<f64> = rows.iter().map(|&k| cons[k].1).collect();
        if let Some(y) = dense_solve(&mut m, &mut b) {
            if feasible(&y) {
                let v = lp.objective_value(&y);
                best = Some(best.map_or(v, |w: f64| w.min(v)));
            }
        }
    });
    best
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn dense_solve(m: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))?;
        if m[p][c].abs() < 1e-10 {
            return None;
        }
        m.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            if f != 0.0 {
                for k in c..n {
                    m[r][k] -= f * m[c][k];
                }
                b[r] -= f * b[c];
            }
        }
    }
    let mut y = vec![0.0; n];
    for c in (0..n).rev() {
        let s: f64 = (c + 1..n).map(|k| m[c][k] * y[k]).sum();
        y[c] = (b[c] - s) / m[c][c];
    }
    Some(y)
}

/// Largest slope magnitude of the KKT system found by trying every subset
/// of inequality rows as the support of the multipliers. Limited to 20 rows.
pub fn kkt_pattern_max(
    kkt: &crate::lipschitz::KktSystem,
    target: crate::lipschitz::Target,
    opts: &crate::lipschitz::ExtremeOptions,
) -> crate::Result<f64> {
    use crate::lp::{solve_lp, LpStatus, RowKind};
    let n1 = kkt.form.a1.len();
    if n1 > 20 {
        return Err(crate::Error::invalid(format!("{n1} rows are too many to enumerate")));
    }
    let primal = kkt.primal(target, opts);
    let dual = kkt.dual(target, opts);
    let mut best = 0.0f64;
    for mask in 0u32..(1u32 << n1) {
        let mut d = dual.clone();
        let mut p = primal.clone();
        for r in 0..n1 {
            if mask & (1 << r) == 0 {
                d.upper[r] = 0.0;
            } else {
                p.rows[r].kind = RowKind::Eq;
            }
        }
        let ds = solve_lp(&d)?;
        if ds.status != LpStatus::Optimal {
            continue;
        }
        if solve_lp(&p)?.status != LpStatus::Optimal {
            continue;
        }
        best = best.max(-ds.objective);
    }
    Ok(best)
}

/// Largest finite-difference slope `|g(ζ + h·e_m) − g(ζ)| / h` over the given
/// coordinates.
pub fn max_difference_quotient(
    model: &crate::grid::OperationModel,
    x: &[f64],
    z: &[f64],
    coords: &[usize],
    h: f64,
) -> crate::Result<f64> {
    let base = model.evaluate(x, z)?.value;
    let mut worst = 0.0f64;
    for &m in coords {
        let mut zz = z.to_vec();
        zz[m] += h;
        if let (Some(a), Some(b)) = (base, model.evaluate(x, &zz)?.value) {
            worst = worst.max((b - a).abs() / h);
        }
    }
    Ok(worst)
}
