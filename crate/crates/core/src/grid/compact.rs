//! Matrix form `min cᵀy` s.t. `A₁y ≥ B₁x + B₂ζ + B₃`, `A₂y = B₄x + B₅ζ + B₆`
//! with `y` free; finite variable bounds become inequality rows.

use super::{GridCase, Mode, OperationModel};
use crate::error::Result;
use crate::lp::{LinearProgram, RowKind, INF};

pub type SparseRows = Vec<Vec<(usize, f64)>>;

/// Where an inequality row of the compact form comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IneqSource {
    /// Model row, negated when it was `≤`.
    Row { index: usize, negated: bool },
    Lower(usize),
    Upper(usize),
}

#[derive(Debug, Clone)]
pub struct CompactForm {
    pub mode: Mode,
    pub c: Vec<f64>,
    pub a1: SparseRows,
    pub b1: SparseRows,
    pub b2: SparseRows,
    pub b3: Vec<f64>,
    pub a2: SparseRows,
    pub b4: SparseRows,
    pub b5: SparseRows,
    pub b6: Vec<f64>,
    pub ineq_source: Vec<IneqSource>,
    /// Model row index of each equality.
    pub eq_source: Vec<usize>,
}

fn scaled(terms: &[(usize, f64)], s: f64) -> Vec<(usize, f64)> {
    terms.iter().map(|&(k, a)| (k, a * s)).collect()
}

fn affine(b: &[(usize, f64)], v: &[f64]) -> f64 {
    b.iter().map(|&(k, a)| a * v[k]).sum()
}

impl CompactForm {
    pub fn from_model(m: &OperationModel) -> Self {
        let mut f = CompactForm {
            mode: m.mode,
            c: m.lp.objective.clone(),
            a1: Vec::new(),
            b1: Vec::new(),
            b2: Vec::new(),
            b3: Vec::new(),
            a2: Vec::new(),
            b4: Vec::new(),
            b5: Vec::new(),
            b6: Vec::new(),
            ineq_source: Vec::new(),
            eq_source: Vec::new(),
        };
        for (r, row) in m.lp.rows.iter().enumerate() {
            let s = match row.kind {
                RowKind::Eq => {
                    f.a2.push(row.coeffs.clone());
                    f.b4.push(m.rhs_x[r].clone());
                    f.b5.push(m.rhs_z[r].clone());
                    f.b6.push(row.rhs);
                    f.eq_source.push(r);
                    continue;
                }
                RowKind::Ge => 1.0,
                RowKind::Le => -1.0,
            };
            f.a1.push(scaled(&row.coeffs, s));
            f.b1.push(scaled(&m.rhs_x[r], s));
            f.b2.push(scaled(&m.rhs_z[r], s));
            f.b3.push(s * row.rhs);
            f.ineq_source.push(IneqSource::Row { index: r, negated: s < 0.0 });
        }
        for j in 0..m.lp.num_vars() {
            if m.lp.lower[j] > -INF {
                f.a1.push(vec![(j, 1.0)]);
                f.b1.push(vec![]);
                f.b2.push(vec![]);
                f.b3.push(m.lp.lower[j]);
                f.ineq_source.push(IneqSource::Lower(j));
            }
            if m.lp.upper[j] < INF {
                f.a1.push(vec![(j, -1.0)]);
                f.b1.push(vec![]);
                f.b2.push(vec![]);
                f.b3.push(-m.lp.upper[j]);
                f.ineq_source.push(IneqSource::Upper(j));
            }
        }
        f
    }

    pub fn num_vars(&self) -> usize {
        self.c.len()
    }

    /// `B₁x + B₂ζ + B₃`.
    pub fn ineq_rhs(&self, x: &[f64], z: &[f64]) -> Vec<f64> {
        (0..self.a1.len())
            .map(|i| affine(&self.b1[i], x) + affine(&self.b2[i], z) + self.b3[i])
            .collect()
    }

    /// `B₄x + B₅ζ + B₆`.
    pub fn eq_rhs(&self, x: &[f64], z: &[f64]) -> Vec<f64> {
        (0..self.a2.len())
            .map(|i| affine(&self.b4[i], x) + affine(&self.b5[i], z) + self.b6[i])
            .collect()
    }

    /// The compact form as an LP over free variables.
    pub fn to_lp(&self, x: &[f64], z: &[f64]) -> LinearProgram {
        let mut lp = LinearProgram::new();
        for &c in &self.c {
            lp.add_var(c, -INF, INF);
        }
        for (row, rhs) in self.a1.iter().zip(self.ineq_rhs(x, z)) {
            lp.add_ge(row.clone(), rhs);
        }
        for (row, rhs) in self.a2.iter().zip(self.eq_rhs(x, z)) {
            lp.add_eq(row.clone(), rhs);
        }
        lp
    }
}

pub fn compact_form(case: &GridCase, mode: Mode) -> Result<CompactForm> {
    Ok(CompactForm::from_model(&OperationModel::new(case, mode)?))
}
