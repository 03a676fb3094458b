//! Exact linear feasibility over boxes.
//!
//! Feasibility of a mixed weak/strict system is decided by maximizing one
//! shared slack variable `s` that every strict inequality must exceed: the
//! system has an interior point iff the optimum is positive. The solver is
//! a dense two-phase simplex over rationals using Bland's rule, so it
//! terminates on every input and never rounds.

use num_traits::{Signed, Zero};

use crate::domain::BoxDomain;
use crate::rational::{rint, Rational};
use crate::{Error, Result};

/// `coeffs . x + offset >= 0` (weak) or `> 0` (strict).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inequality {
    pub coeffs: Vec<Rational>,
    pub offset: Rational,
    pub strict: bool,
}

impl Inequality {
    pub fn ge(coeffs: Vec<Rational>, offset: Rational) -> Self {
        Inequality {
            coeffs,
            offset,
            strict: false,
        }
    }

    pub fn gt(coeffs: Vec<Rational>, offset: Rational) -> Self {
        Inequality {
            coeffs,
            offset,
            strict: true,
        }
    }

    /// Evaluates `coeffs . x + offset`.
    pub fn value_at(&self, x: &[Rational]) -> Rational {
        let mut acc = self.offset.clone();
        for (c, xi) in self.coeffs.iter().zip(x) {
            if !c.is_zero() {
                acc += c * xi;
            }
        }
        acc
    }

    pub fn holds_at(&self, x: &[Rational]) -> bool {
        let v = self.value_at(x);
        if self.strict {
            v.is_positive()
        } else {
            !v.is_negative()
        }
    }

    /// The same inequality with its relation weakened to `>=`.
    pub fn closed(&self) -> Inequality {
        Inequality {
            coeffs: self.coeffs.clone(),
            offset: self.offset.clone(),
            strict: false,
        }
    }
}

/// A finite system of inequalities sharing one dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSystem {
    pub dim: usize,
    pub inequalities: Vec<Inequality>,
}

impl LinearSystem {
    pub fn new(dim: usize, inequalities: Vec<Inequality>) -> Result<Self> {
        for (i, ineq) in inequalities.iter().enumerate() {
            if ineq.coeffs.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "inequality {i} has {} coefficients, system dimension is {dim}",
                    ineq.coeffs.len()
                )));
            }
        }
        Ok(LinearSystem { dim, inequalities })
    }

    pub fn holds_at(&self, x: &[Rational]) -> bool {
        self.inequalities.iter().all(|c| c.holds_at(x))
    }

    /// All relations weakened to `>=`; the topological closure of the
    /// solution set contains the closed system's solution set.
    pub fn closed(&self) -> LinearSystem {
        LinearSystem {
            dim: self.dim,
            inequalities: self.inequalities.iter().map(Inequality::closed).collect(),
        }
    }
}

/// Searches for a point of `domain` satisfying every inequality, strict ones
/// strictly. Returns such a point iff one exists.
pub fn feasible(system: &LinearSystem, domain: &BoxDomain) -> Result<Option<Vec<Rational>>> {
    if system.dim != domain.dim() {
        return Err(Error::DimensionMismatch(format!(
            "system dimension {} does not match box dimension {}",
            system.dim,
            domain.dim()
        )));
    }
    let dim = system.dim;
    let has_strict = system.inequalities.iter().any(|c| c.strict);
    let slack_col = dim; // structural vars: u_0..u_{dim-1}, s

    // Rows in `sum coeffs * y <= rhs` form over the shifted variables
    // u = x - lo and the shared slack s.
    let mut rows: Vec<(Vec<Rational>, Rational)> = Vec::new();
    for ineq in &system.inequalities {
        // a.x + b >= s_term  =>  -a.u + s_term <= b + a.lo
        let mut coeffs = vec![Rational::zero(); dim + 1];
        let mut rhs = ineq.offset.clone();
        for (j, a) in ineq.coeffs.iter().enumerate() {
            coeffs[j] = -a.clone();
            if !a.is_zero() {
                rhs += a * &domain.lo()[j];
            }
        }
        if ineq.strict {
            coeffs[slack_col] = rint(1);
        }
        rows.push((coeffs, rhs));
    }
    for j in 0..dim {
        let mut coeffs = vec![Rational::zero(); dim + 1];
        coeffs[j] = rint(1);
        rows.push((coeffs, &domain.hi()[j] - &domain.lo()[j]));
    }
    let mut cap = vec![Rational::zero(); dim + 1];
    cap[slack_col] = rint(1);
    rows.push((cap, rint(1)));

    let mut objective = vec![Rational::zero(); dim + 1];
    objective[slack_col] = rint(1);

    let solution = match maximize(rows, &objective)? {
        None => return Ok(None),
        Some(sol) => sol,
    };
    if has_strict && !solution.values[slack_col].is_positive() {
        return Ok(None);
    }
    let point: Vec<Rational> = (0..dim)
        .map(|j| &solution.values[j] + &domain.lo()[j])
        .collect();
    debug_assert!(system.holds_at(&point) && domain.contains(&point));
    Ok(Some(point))
}

struct Solution {
    values: Vec<Rational>,
}

/// Maximizes `objective . y` subject to `rows: A y <= rhs`, `y >= 0`.
/// Returns `None` when infeasible. The feasible set must be bounded in the
/// objective direction, which holds for every system built above.
fn maximize(rows: Vec<(Vec<Rational>, Rational)>, objective: &[Rational]) -> Result<Option<Solution>> {
    let n_struct = objective.len();
    let m = rows.len();
    let n_slack = m;
    let mut n_artificial = 0;
    for (_, rhs) in &rows {
        if rhs.is_negative() {
            n_artificial += 1;
        }
    }
    let cols = n_struct + n_slack + n_artificial;
    let enterable = n_struct + n_slack; // artificials may never re-enter

    let mut tableau: Vec<Vec<Rational>> = Vec::with_capacity(m);
    let mut rhs_col: Vec<Rational> = Vec::with_capacity(m);
    let mut basis: Vec<usize> = Vec::with_capacity(m);
    let mut next_artificial = enterable;
    for (i, (coeffs, rhs)) in rows.into_iter().enumerate() {
        let mut row = vec![Rational::zero(); cols];
        let negate = rhs.is_negative();
        for (j, c) in coeffs.into_iter().enumerate() {
            row[j] = if negate { -c } else { c };
        }
        row[n_struct + i] = if negate { rint(-1) } else { rint(1) };
        if negate {
            row[next_artificial] = rint(1);
            basis.push(next_artificial);
            next_artificial += 1;
            rhs_col.push(-rhs);
        } else {
            basis.push(n_struct + i);
            rhs_col.push(rhs);
        }
        tableau.push(row);
    }

    // Phase 1: drive the artificials to zero.
    if n_artificial > 0 {
        let mut cbar = vec![Rational::zero(); cols];
        for entry in cbar.iter_mut().skip(enterable) {
            *entry = rint(-1);
        }
        let mut value = price_out(&mut cbar, &tableau, &rhs_col, &basis);
        run_simplex(&mut tableau, &mut rhs_col, &mut basis, &mut cbar, &mut value, cols)?;
        if value.is_negative() {
            return Ok(None);
        }
        // Pivot leftover artificials out of the basis, dropping redundant rows.
        let mut r = 0;
        while r < tableau.len() {
            if basis[r] >= enterable {
                let pivot_col = (0..enterable).find(|&c| !tableau[r][c].is_zero());
                match pivot_col {
                    Some(c) => pivot(&mut tableau, &mut rhs_col, &mut basis, r, c),
                    None => {
                        tableau.remove(r);
                        rhs_col.remove(r);
                        basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
    }

    // Phase 2: the real objective.
    let mut cbar = vec![Rational::zero(); cols];
    cbar[..n_struct].clone_from_slice(objective);
    let mut value = price_out(&mut cbar, &tableau, &rhs_col, &basis);
    run_simplex(&mut tableau, &mut rhs_col, &mut basis, &mut cbar, &mut value, enterable)?;

    let mut values = vec![Rational::zero(); n_struct];
    for (r, &b) in basis.iter().enumerate() {
        if b < n_struct {
            values[b] = rhs_col[r].clone();
        }
    }
    Ok(Some(Solution { values }))
}

/// Zeroes the reduced costs of basic columns and returns the objective value
/// of the current basic solution, maintaining `z = value + cbar . y`.
fn price_out(
    cbar: &mut [Rational],
    tableau: &[Vec<Rational>],
    rhs: &[Rational],
    basis: &[usize],
) -> Rational {
    let mut value = Rational::zero();
    for (r, &b) in basis.iter().enumerate() {
        if !cbar[b].is_zero() {
            let f = cbar[b].clone();
            for (c, entry) in tableau[r].iter().enumerate() {
                if !entry.is_zero() {
                    cbar[c] -= &f * entry;
                }
            }
            if !rhs[r].is_zero() {
                value += &f * &rhs[r];
            }
        }
    }
    value
}

/// Bland's rule simplex on a tableau in canonical form. Columns at index
/// `enterable` and beyond never enter. On return `value` holds the optimal
/// objective value.
fn run_simplex(
    tableau: &mut [Vec<Rational>],
    rhs: &mut [Rational],
    basis: &mut [usize],
    cbar: &mut [Rational],
    value: &mut Rational,
    enterable: usize,
) -> Result<()> {
    loop {
        let entering = match (0..enterable).find(|&c| cbar[c].is_positive()) {
            Some(c) => c,
            None => return Ok(()),
        };
        let mut leaving: Option<(usize, Rational)> = None;
        for r in 0..tableau.len() {
            let coeff = &tableau[r][entering];
            if coeff.is_positive() {
                let ratio = &rhs[r] / coeff;
                let better = match &leaving {
                    None => true,
                    Some((lr, best)) => {
                        ratio < *best || (ratio == *best && basis[r] < basis[*lr])
                    }
                };
                if better {
                    leaving = Some((r, ratio));
                }
            }
        }
        let (row, _) = leaving.ok_or_else(|| {
            Error::InvalidInput("linear program is unbounded; malformed system".into())
        })?;
        pivot(tableau, rhs, basis, row, entering);
        let f = cbar[entering].clone();
        if !f.is_zero() {
            for (c, entry) in tableau[row].iter().enumerate() {
                if !entry.is_zero() {
                    cbar[c] -= &f * entry;
                }
            }
            if !rhs[row].is_zero() {
                *value += &f * &rhs[row];
            }
        }
    }
}

fn pivot(
    tableau: &mut [Vec<Rational>],
    rhs: &mut [Rational],
    basis: &mut [usize],
    row: usize,
    col: usize,
) {
    let p = tableau[row][col].clone();
    debug_assert!(!p.is_zero());
    for entry in tableau[row].iter_mut() {
        if !entry.is_zero() {
            *entry /= &p;
        }
    }
    rhs[row] /= &p;
    for r in 0..tableau.len() {
        if r == row || tableau[r][col].is_zero() {
            continue;
        }
        let f = tableau[r][col].clone();
        // row ops vectorized by hand to avoid aliasing borrows
        let pivot_row: Vec<Rational> = tableau[row].clone();
        for (c, entry) in tableau[r].iter_mut().enumerate() {
            if !pivot_row[c].is_zero() {
                *entry -= &f * &pivot_row[c];
            }
        }
        let pr = rhs[row].clone();
        if !pr.is_zero() {
            rhs[r] -= &f * &pr;
        }
    }
    basis[row] = col;
}
