//! Dense bounded-variable primal simplex for
//!
//! ```text
//! maximize cᵀx  subject to  A x ≤ b,  0 ≤ x ≤ u
//! ```
//!
//! with `b ≥ 0`, so the all-slack basis is feasible from the start. Upper
//! bounds may be infinite. Sized for the few hundred rows and columns of the
//! design subproblems.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

/// Solves the problem above. `a` is row-major with `b.len()` rows.
pub fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64], upper: &[f64]) -> Result<LpSolution> {
    let n = c.len();
    let m = b.len();
    if upper.len() != n || a.len() != m || a.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidParameter("inconsistent LP dimensions".into()));
    }
    if b.iter().any(|&v| !(v >= 0.0)) || upper.iter().any(|&u| !(u >= 0.0)) {
        return Err(Error::InvalidParameter(
            "LP needs b ≥ 0 and nonnegative upper bounds".into(),
        ));
    }
    let width = n + m;
    let mut tab: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut t = Vec::with_capacity(width);
            t.extend_from_slice(row);
            t.extend((0..m).map(|j| if j == i { 1.0 } else { 0.0 }));
            t
        })
        .collect();
    let mut ub: Vec<f64> = upper.to_vec();
    ub.extend(std::iter::repeat_n(f64::INFINITY, m));
    // Reduced costs for a maximization: positive means improving upward.
    let mut cost: Vec<f64> = c.to_vec();
    cost.extend(std::iter::repeat_n(0.0, m));
    let mut basis: Vec<usize> = (n..width).collect();
    let mut beta: Vec<f64> = b.to_vec();
    let mut at_upper = vec![false; width];
    let mut is_basic = vec![false; width];
    for &j in &basis {
        is_basic[j] = true;
    }

    let max_pivots = 50 * (width + 10);
    let mut pivots = 0;
    let mut stalled = 0usize;
    loop {
        // Dantzig pricing, Bland's rule after a run of degenerate steps.
        let bland = stalled > 2 * m + 10;
        let mut entering = None;
        let mut best = 0.0;
        for j in 0..width {
            if is_basic[j] {
                continue;
            }
            let gain = if at_upper[j] { -cost[j] } else { cost[j] };
            if gain > COST_TOL && (bland || gain > best) {
                best = gain;
                entering = Some(j);
                if bland {
                    break;
                }
            }
        }
        let Some(j) = entering else { break };
        if pivots >= max_pivots {
            return Err(Error::NumericalFailure("simplex pivot limit reached".into()));
        }
        let dir = if at_upper[j] { -1.0 } else { 1.0 };

        let mut step = ub[j];
        let mut leave: Option<(usize, bool)> = None;
        for i in 0..m {
            let alpha = dir * tab[i][j];
            let limit = if alpha > PIVOT_TOL {
                beta[i].max(0.0) / alpha
            } else if alpha < -PIVOT_TOL && ub[basis[i]].is_finite() {
                (ub[basis[i]] - beta[i]).max(0.0) / -alpha
            } else {
                continue;
            };
            let better = match leave {
                None => limit < step,
                Some((r, _)) => {
                    limit < step || (limit == step && bland && basis[i] < basis[r])
                }
            };
            if better {
                step = limit;
                leave = Some((i, alpha < 0.0));
            }
        }
        if step.is_infinite() {
            return Err(Error::NumericalFailure("LP is unbounded".into()));
        }
        stalled = if step > 1e-14 { 0 } else { stalled + 1 };
        for i in 0..m {
            beta[i] -= dir * tab[i][j] * step;
        }
        pivots += 1;
        let Some((r, to_upper)) = leave else {
            at_upper[j] = !at_upper[j];
            continue;
        };

        let start = if at_upper[j] { ub[j] } else { 0.0 };
        let entering_value = start + dir * step;
        let old = basis[r];
        is_basic[old] = false;
        at_upper[old] = to_upper;
        is_basic[j] = true;
        at_upper[j] = false;
        basis[r] = j;
        beta[r] = entering_value;

        let piv = tab[r][j];
        for v in tab[r].iter_mut() {
            *v /= piv;
        }
        let pivot_row = tab[r].clone();
        for (i, row) in tab.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[j];
            if f != 0.0 {
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * p;
                }
            }
        }
        let f = cost[j];
        for (v, p) in cost.iter_mut().zip(&pivot_row) {
            *v -= f * p;
        }
    }

    let mut x = vec![0.0; width];
    for j in 0..width {
        if !is_basic[j] && at_upper[j] {
            x[j] = ub[j];
        }
    }
    for (i, &bi) in basis.iter().enumerate() {
        x[bi] = beta[i].clamp(0.0, ub[bi]);
    }
    x.truncate(n);
    let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    Ok(LpSolution { x, objective, pivots })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → (2, 6), 36.
        let s = maximize(
            &[3.0, 5.0],
            &[vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 2.0]],
            &[4.0, 12.0, 18.0],
            &[f64::INFINITY, f64::INFINITY],
        )
        .unwrap();
        assert!((s.objective - 36.0).abs() < 1e-12);
        assert!((s.x[0] - 2.0).abs() < 1e-12 && (s.x[1] - 6.0).abs() < 1e-12);
    }

    #[test]
    fn bound_flips() {
        // max x + y with x ≤ 1, y ≤ 2 as bounds and x + y ≤ 10.
        let s = maximize(&[1.0, 1.0], &[vec![1.0, 1.0]], &[10.0], &[1.0, 2.0]).unwrap();
        assert_eq!(s.x, vec![1.0, 2.0]);
        // Same with a binding row.
        let s = maximize(&[2.0, 1.0], &[vec![1.0, 1.0]], &[2.5], &[1.0, 2.0]).unwrap();
        assert!((s.objective - 3.5).abs() < 1e-12);
    }

    #[test]
    fn unbounded_and_bad_input() {
        assert!(maximize(&[1.0], &[vec![-1.0]], &[1.0], &[f64::INFINITY]).is_err());
        assert!(maximize(&[1.0], &[vec![1.0]], &[-1.0], &[1.0]).is_err());
        assert!(maximize(&[1.0], &[vec![1.0, 2.0]], &[1.0], &[1.0]).is_err());
    }

    #[test]
    fn degenerate_vertex() {
        // Several constraints through the optimum.
        let s = maximize(
            &[1.0, 1.0],
            &[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0], vec![2.0, 1.0], vec![1.0, 2.0]],
            &[1.0, 1.0, 2.0, 3.0, 3.0],
            &[f64::INFINITY, f64::INFINITY],
        )
        .unwrap();
        assert!((s.objective - 2.0).abs() < 1e-12);
    }

    // Brute-force oracle for two variables: the optimum sits on a vertex
    // formed by two active constraints among rows and bounds.
    fn brute_force_2d(c: &[f64; 2], a: &[[f64; 2]], b: &[f64], u: &[f64; 2]) -> f64 {
        let mut lines: Vec<([f64; 2], f64)> = a.iter().zip(b).map(|(r, &v)| (*r, v)).collect();
        lines.push(([1.0, 0.0], u[0]));
        lines.push(([0.0, 1.0], u[1]));
        lines.push(([-1.0, 0.0], 0.0));
        lines.push(([0.0, -1.0], 0.0));
        let mut best = f64::NEG_INFINITY;
        for i in 0..lines.len() {
            for j in i + 1..lines.len() {
                let (p, bp) = lines[i];
                let (q, bq) = lines[j];
                let det = p[0] * q[1] - p[1] * q[0];
                if det.abs() < 1e-12 {
                    continue;
                }
                let x = (bp * q[1] - p[1] * bq) / det;
                let y = (p[0] * bq - bp * q[0]) / det;
                if lines.iter().all(|(r, v)| r[0] * x + r[1] * y <= v + 1e-9) {
                    best = best.max(c[0] * x + c[1] * y);
                }
            }
        }
        best
    }

    proptest! {
        #[test]
        fn matches_vertex_enumeration(
            c in prop::array::uniform2(-3.0f64..3.0),
            rows in prop::collection::vec((prop::array::uniform2(-2.0f64..3.0), 0.0f64..5.0), 1..6),
            u in prop::array::uniform2(0.1f64..4.0),
        ) {
            let a: Vec<[f64; 2]> = rows.iter().map(|r| r.0).collect();
            let b: Vec<f64> = rows.iter().map(|r| r.1).collect();
            let expected = brute_force_2d(&c, &a, &b, &u);
            let av: Vec<Vec<f64>> = a.iter().map(|r| r.to_vec()).collect();
            let s = maximize(&c, &av, &b, &u).unwrap();
            prop_assert!((s.objective - expected).abs() < 1e-8 * (1.0 + expected.abs()));
            for (r, &v) in a.iter().zip(&b) {
                prop_assert!(r[0] * s.x[0] + r[1] * s.x[1] <= v + 1e-9);
            }
        }
    }
}
