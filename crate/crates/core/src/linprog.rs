//! Dense two-phase simplex for the small linear programs in [`crate::bounds`].
//!
//! Problems here have a couple of dozen variables and constraints, so a
//! plain tableau with Bland's rule is plenty. All variables are x >= 0;
//! callers split free variables into positive and negative parts.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LpError {
    #[error("problem is infeasible (phase-1 residual {0:.3e})")]
    Infeasible(f64),
    #[error("objective is unbounded above")]
    Unbounded,
    #[error("simplex did not terminate within {0} pivots")]
    TooManyPivots(usize),
    #[error("constraint has {got} coefficients, expected {expected}")]
    BadConstraint { got: usize, expected: usize },
}

pub type Result<T> = std::result::Result<T, LpError>;

/// One linear constraint over nonnegative variables.
#[derive(Debug, Clone)]
pub enum Constraint {
    LessEq(Vec<f64>, f64),
    GreaterEq(Vec<f64>, f64),
    Eq(Vec<f64>, f64),
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub objective: f64,
    pub x: Vec<f64>,
}

const EPS: f64 = 1e-9;
const MAX_PIVOTS: usize = 20_000;

/// Maximize c·x subject to the constraints and x >= 0.
pub fn maximize(c: &[f64], constraints: &[Constraint]) -> Result<Solution> {
    let n = c.len();
    for con in constraints {
        let (Constraint::LessEq(row, _)
        | Constraint::GreaterEq(row, _)
        | Constraint::Eq(row, _)) = con;
        if row.len() != n {
            return Err(LpError::BadConstraint { got: row.len(), expected: n });
        }
    }
    let m = constraints.len();

    // Normalize to equality rows with b >= 0, adding slack/surplus columns,
    // then artificials where no natural basic column exists.
    let mut rows: Vec<(Vec<f64>, f64, i8)> = Vec::with_capacity(m); // (coeffs, b, sense)
    for con in constraints {
        let (row, b, sense) = match con {
            Constraint::LessEq(r, b) => (r.clone(), *b, 1i8),
            Constraint::GreaterEq(r, b) => (r.clone(), *b, -1),
            Constraint::Eq(r, b) => (r.clone(), *b, 0),
        };
        if b < 0.0 {
            let row: Vec<f64> = row.iter().map(|v| -v).collect();
            rows.push((row, -b, -sense));
        } else {
            rows.push((row, b, sense));
        }
    }

    let n_slack = rows.iter().filter(|(_, _, s)| *s != 0).count();
    let mut n_art = 0usize;
    let total = n + n_slack;
    // Column layout: structural | slack/surplus | artificial | rhs.
    let mut tableau: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut basis: Vec<usize> = Vec::with_capacity(m);
    let mut slack_idx = 0usize;
    let mut art_cols: Vec<usize> = Vec::new();

    for (row, b, sense) in &rows {
        let mut t = vec![0.0; total];
        t[..n].copy_from_slice(row);
        let mut basic_col = None;
        if *sense != 0 {
            let col = n + slack_idx;
            t[col] = if *sense > 0 { 1.0 } else { -1.0 };
            slack_idx += 1;
            if *sense > 0 {
                basic_col = Some(col);
            }
        }
        tableau.push(t);
        basis.push(basic_col.unwrap_or(usize::MAX));
        if basic_col.is_none() {
            n_art += 1;
        }
        let _ = b;
    }
    let full = total + n_art + 1;
    let mut art_added = 0usize;
    for (i, t) in tableau.iter_mut().enumerate() {
        t.resize(full, 0.0);
        t[full - 1] = rows[i].1;
        if basis[i] == usize::MAX {
            let col = total + art_added;
            t[col] = 1.0;
            basis[i] = col;
            art_cols.push(col);
            art_added += 1;
        }
    }

    // Phase 1: maximize -(sum of artificials).
    if n_art > 0 {
        let mut cost = vec![0.0; full - 1];
        for &col in &art_cols {
            cost[col] = -1.0;
        }
        let obj = run_simplex(&mut tableau, &mut basis, &cost)?;
        if obj < -1e-7 {
            return Err(LpError::Infeasible(-obj));
        }
        // Pivot remaining basic artificials out on any usable column.
        for i in 0..m {
            if art_cols.contains(&basis[i]) {
                if let Some(col) = (0..total).find(|&j| tableau[i][j].abs() > EPS) {
                    pivot(&mut tableau, &mut basis, i, col);
                }
            }
        }
    }

    // Phase 2 with the real objective; artificial columns are frozen out.
    let mut cost = vec![f64::NEG_INFINITY; full - 1];
    cost[..n].copy_from_slice(c);
    for j in n..total {
        cost[j] = 0.0;
    }
    let objective = run_simplex(&mut tableau, &mut basis, &cost)?;

    let mut x = vec![0.0; n];
    for (i, &bcol) in basis.iter().enumerate() {
        if bcol < n {
            x[bcol] = tableau[i][full - 1];
        }
    }
    Ok(Solution { objective, x })
}

/// Simplex iterations with Bland's anti-cycling rule. Costs of NEG_INFINITY
/// mark columns that may never enter. Returns the objective value.
fn run_simplex(tableau: &mut [Vec<f64>], basis: &mut [usize], cost: &[f64]) -> Result<f64> {
    let m = tableau.len();
    let full = tableau[0].len();
    for _ in 0..MAX_PIVOTS {
        // reduced costs: c_j - c_B · column_j
        let mut entering = None;
        for j in 0..full - 1 {
            if cost[j] == f64::NEG_INFINITY {
                continue;
            }
            let mut reduced = cost[j];
            for i in 0..m {
                let cb = cost[basis[i]];
                if cb != 0.0 && cb != f64::NEG_INFINITY {
                    reduced -= cb * tableau[i][j];
                }
            }
            if reduced > EPS {
                entering = Some(j);
                break; // Bland: smallest index
            }
        }
        let Some(col) = entering else {
            let mut obj = 0.0;
            for i in 0..m {
                let cb = cost[basis[i]];
                if cb != 0.0 && cb != f64::NEG_INFINITY {
                    obj += cb * tableau[i][full - 1];
                }
            }
            return Ok(obj);
        };
        // ratio test
        let mut leaving: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            if tableau[i][col] > EPS {
                let ratio = tableau[i][full - 1] / tableau[i][col];
                if ratio < best - 1e-12
                    || (ratio < best + 1e-12
                        && leaving.is_some_and(|l| basis[i] < basis[l]))
                {
                    best = ratio;
                    leaving = Some(i);
                }
            }
        }
        let Some(row) = leaving else {
            return Err(LpError::Unbounded);
        };
        pivot(tableau, basis, row, col);
    }
    Err(LpError::TooManyPivots(MAX_PIVOTS))
}

fn pivot(tableau: &mut [Vec<f64>], basis: &mut [usize], row: usize, col: usize) {
    let full = tableau[0].len();
    let p = tableau[row][col];
    for v in tableau[row].iter_mut() {
        *v /= p;
    }
    for i in 0..tableau.len() {
        if i != row && tableau[i][col].abs() > 0.0 {
            let f = tableau[i][col];
            for j in 0..full {
                let delta = f * tableau[row][j];
                tableau[i][j] -= delta;
            }
        }
    }
    basis[row] = col;
}
