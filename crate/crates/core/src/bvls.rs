//! Box-constrained linear least squares, min ||Ax - b|| with l <= x <= u,
//! solved by a primal active-set method.
//!
//! The matrices here are small and possibly rank-deficient (wide allocation
//! problems), so free-set subproblems use an SVD pseudo-inverse solve: the
//! objective is bounded below, hence a minimizer of every reduced problem
//! exists even when the reduced matrix loses rank. Steps aim at the reduced
//! minimizer closest to the current iterate, which preserves the classical
//! guarantee that a newly freed variable leaves its bound strictly.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct BvlsProblem {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub lower: DVector<f64>,
    pub upper: DVector<f64>,
}

impl BvlsProblem {
    pub fn validate(&self) -> Result<()> {
        let n = self.a.ncols();
        if self.b.len() != self.a.nrows() {
            return Err(Error::Domain(format!(
                "rhs length {} does not match row count {}",
                self.b.len(),
                self.a.nrows()
            )));
        }
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::Domain(
                "bound vectors must match the column count".to_string(),
            ));
        }
        for i in 0..n {
            if !(self.lower[i] <= self.upper[i]) {
                return Err(Error::Domain(format!(
                    "infeasible box at index {i}: [{}, {}]",
                    self.lower[i], self.upper[i]
                )));
            }
        }
        if self.a.iter().any(|v| !v.is_finite())
            || self.b.iter().any(|v| !v.is_finite())
            || self.lower.iter().any(|v| !v.is_finite())
            || self.upper.iter().any(|v| !v.is_finite())
        {
            return Err(Error::Domain("problem data must be finite".to_string()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct BvlsSolution {
    pub x: DVector<f64>,
    /// ||A x - b||.
    pub residual_norm: f64,
    /// Largest first-order optimality violation: |gradient| on free
    /// variables, wrong-signed gradient at active bounds.
    pub kkt_residual: f64,
    pub iterations: usize,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum VarState {
    Free,
    AtLower,
    AtUpper,
}

fn gradient(problem: &BvlsProblem, x: &DVector<f64>) -> DVector<f64> {
    problem.a.transpose() * (&problem.a * x - &problem.b)
}

fn kkt_violation(problem: &BvlsProblem, x: &DVector<f64>, states: &[VarState]) -> f64 {
    let g = gradient(problem, x);
    let mut worst = 0.0f64;
    for i in 0..x.len() {
        // A zero-width box constrains the variable on both sides, so any
        // gradient sign is consistent with optimality there.
        if problem.upper[i] - problem.lower[i] <= 0.0 {
            continue;
        }
        let v = match states[i] {
            VarState::Free => g[i].abs(),
            VarState::AtLower => (-g[i]).max(0.0),
            VarState::AtUpper => g[i].max(0.0),
        };
        worst = worst.max(v);
    }
    worst
}

/// Active-set solve. `tol` bounds the returned KKT residual; it is measured
/// in gradient units, so callers should normalize their problems.
pub fn solve_with_tol(problem: &BvlsProblem, tol: f64) -> Result<BvlsSolution> {
    problem.validate()?;
    let n = problem.a.ncols();
    let svd_eps = 1e-12
        * problem
            .a
            .iter()
            .fold(0.0f64, |acc, v| acc.max(v.abs()))
            .max(1e-30);

    // Start with every variable at its lower bound; permanently pinned
    // variables (zero-width boxes) are never freed.
    let mut x = problem.lower.clone();
    let mut states: Vec<VarState> = (0..n).map(|_| VarState::AtLower).collect();
    let pinned: Vec<bool> = (0..n)
        .map(|i| problem.upper[i] - problem.lower[i] <= 0.0)
        .collect();

    let max_outer = 100 * n.max(4);
    let mut iterations = 0;
    // A variable that immediately re-binds after being freed is skipped
    // once to avoid degenerate cycling.
    let mut skip_once: Option<usize> = None;

    for _outer in 0..max_outer {
        iterations += 1;
        let g = gradient(problem, &x);

        // Most violating bound variable; a skipped variable still counts
        // toward the violation total so termination is never declared while
        // it violates.
        let mut candidate: Option<(usize, f64)> = None;
        let mut worst_bound = 0.0f64;
        for i in 0..n {
            if pinned[i] || states[i] == VarState::Free {
                continue;
            }
            let viol = match states[i] {
                VarState::AtLower => (-g[i]).max(0.0),
                VarState::AtUpper => g[i].max(0.0),
                VarState::Free => 0.0,
            };
            worst_bound = worst_bound.max(viol);
            if Some(i) == skip_once {
                continue;
            }
            if viol > tol && candidate.map_or(true, |(_, best)| viol > best) {
                candidate = Some((i, viol));
            }
        }
        skip_once = None;

        let free_kkt = (0..n)
            .filter(|&i| states[i] == VarState::Free)
            .map(|i| g[i].abs())
            .fold(0.0f64, f64::max);
        let freed = match candidate {
            None if worst_bound <= tol && free_kkt <= tol => {
                let res = (&problem.a * &x - &problem.b).norm();
                return Ok(BvlsSolution {
                    kkt_residual: kkt_violation(problem, &x, &states),
                    x,
                    residual_norm: res,
                    iterations,
                });
            }
            None => None,
            Some((i, _)) => {
                states[i] = VarState::Free;
                Some(i)
            }
        };

        // Inner loop: minimize over the free set, binding blockers until
        // the free minimizer is feasible.
        loop {
            let free: Vec<usize> = (0..n).filter(|&i| states[i] == VarState::Free).collect();
            if free.is_empty() {
                break;
            }
            let mut a_free = DMatrix::zeros(problem.a.nrows(), free.len());
            for (col, &i) in free.iter().enumerate() {
                a_free.set_column(col, &problem.a.column(i));
            }
            let mut rhs = problem.b.clone();
            for i in 0..n {
                if states[i] != VarState::Free {
                    rhs -= x[i] * problem.a.column(i);
                }
            }
            // Target the reduced minimizer CLOSEST to the current point:
            // x_free + pinv(A_free) (rhs - A_free x_free). Unlike the
            // minimum-norm minimizer, this keeps the step inside the row
            // space, so a variable freed from an optimal face strictly
            // enters the interior even when A_free is rank deficient.
            let x_free = DVector::from_fn(free.len(), |c, _| x[free[c]]);
            let r_free = &rhs - &a_free * &x_free;
            let svd = a_free.svd(true, true);
            let step_vec = svd
                .solve(&r_free, svd_eps)
                .map_err(|e| Error::Solver(format!("SVD solve failed: {e}")))?;
            let target = &x_free + &step_vec;

            // Largest feasible step toward the reduced minimizer.
            let mut alpha = 1.0f64;
            let mut blocker: Option<(usize, VarState)> = None;
            for (col, &i) in free.iter().enumerate() {
                let (from, to) = (x[i], target[col]);
                let step = to - from;
                if step > 0.0 && to > problem.upper[i] {
                    let a = (problem.upper[i] - from) / step;
                    if a < alpha {
                        alpha = a;
                        blocker = Some((i, VarState::AtUpper));
                    }
                } else if step < 0.0 && to < problem.lower[i] {
                    let a = (problem.lower[i] - from) / step;
                    if a < alpha {
                        alpha = a;
                        blocker = Some((i, VarState::AtLower));
                    }
                }
            }
            for (col, &i) in free.iter().enumerate() {
                x[i] += alpha * (target[col] - x[i]);
            }
            match blocker {
                None => break,
                Some((i, side)) => {
                    x[i] = match side {
                        VarState::AtLower => problem.lower[i],
                        VarState::AtUpper => problem.upper[i],
                        VarState::Free => unreachable!(),
                    };
                    states[i] = side;
                    if freed == Some(i) && alpha <= 1e-14 {
                        skip_once = Some(i);
                        break;
                    }
                }
            }
        }
    }
    Err(Error::Solver(format!(
        "active set failed to converge within {max_outer} iterations"
    )))
}

/// Active-set solve with the default gradient tolerance 1e-12, scaled by
/// the problem's gradient magnitude.
pub fn solve(problem: &BvlsProblem) -> Result<BvlsSolution> {
    problem.validate()?;
    let g0 = gradient(problem, &problem.lower).amax();
    let g1 = gradient(problem, &problem.upper).amax();
    let scale = g0.max(g1).max(1e-30);
    solve_with_tol(problem, 1e-12 * scale)
}

/// Slow reference solver: projected gradient descent with a fixed step of
/// 1 / lambda_max(A^T A). Used to cross-check the active-set method; the
/// two must agree in objective value, not necessarily in x when the
/// least-squares problem is rank deficient.
pub fn projected_gradient(problem: &BvlsProblem, iterations: usize) -> Result<DVector<f64>> {
    problem.validate()?;
    let ata = problem.a.transpose() * &problem.a;
    let lmax = ata
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(0.0f64, |a, &b| a.max(b));
    if lmax <= 0.0 {
        return Ok(problem.lower.clone());
    }
    let step = 1.0 / lmax;
    let atb = problem.a.transpose() * &problem.b;
    let n = problem.a.ncols();
    let mut x = DVector::from_fn(n, |i, _| 0.5 * (problem.lower[i] + problem.upper[i]));
    for _ in 0..iterations {
        let g = &ata * &x - &atb;
        for i in 0..n {
            x[i] = (x[i] - step * g[i]).clamp(problem.lower[i], problem.upper[i]);
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn problem(
        a: DMatrix<f64>,
        b: DVector<f64>,
        lower: DVector<f64>,
        upper: DVector<f64>,
    ) -> BvlsProblem {
        BvlsProblem { a, b, lower, upper }
    }

    #[test]
    fn scalar_problem_clamps_to_upper() {
        // min (x - 2)^2 on [0, 1]: optimum at the upper bound.
        let p = problem(
            DMatrix::from_element(1, 1, 1.0),
            DVector::from_element(1, 2.0),
            DVector::from_element(1, 0.0),
            DVector::from_element(1, 1.0),
        );
        let sol = solve(&p).unwrap();
        assert_abs_diff_eq!(sol.x[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(sol.residual_norm, 1.0, epsilon = 1e-12);
        assert!(sol.kkt_residual <= 1e-10);
    }

    #[test]
    fn interior_optimum_matches_pseudo_inverse() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let b = DVector::from_vec(vec![1.0, 2.0, 2.5]);
        let p = problem(
            a.clone(),
            b.clone(),
            DVector::from_element(2, -10.0),
            DVector::from_element(2, 10.0),
        );
        let sol = solve(&p).unwrap();
        let svd = a.svd(true, true);
        let expected = svd.solve(&b, 1e-12).unwrap();
        assert_abs_diff_eq!(sol.x[0], expected[0], epsilon = 1e-10);
        assert_abs_diff_eq!(sol.x[1], expected[1], epsilon = 1e-10);
    }

    #[test]
    fn pinned_variables_stay_pinned() {
        let a = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 1.0]);
        let b = DVector::from_element(1, 3.0);
        let mut lower = DVector::from_element(3, 0.0);
        let mut upper = DVector::from_element(3, 5.0);
        lower[1] = 0.0;
        upper[1] = 0.0;
        let sol = solve(&problem(a, b, lower, upper)).unwrap();
        assert_eq!(sol.x[1], 0.0);
        assert_relative_eq!(sol.x[0] + sol.x[2], 3.0, epsilon = 1e-10);
        assert!(sol.residual_norm < 1e-10);
    }

    #[test]
    fn infeasible_box_is_rejected() {
        let p = problem(
            DMatrix::from_element(1, 1, 1.0),
            DVector::from_element(1, 0.0),
            DVector::from_element(1, 1.0),
            DVector::from_element(1, 0.0),
        );
        assert!(matches!(solve(&p), Err(Error::Domain(_))));
    }

    #[test]
    fn wide_rank_deficient_matches_projected_gradient_objective() {
        let a = DMatrix::from_row_slice(
            2,
            6,
            &[1.0, -0.5, 2.0, 0.0, 1.0, 1.0, 0.5, 1.5, -1.0, 2.0, 0.0, 1.0],
        );
        let b = DVector::from_vec(vec![3.0, -1.0]);
        let p = problem(
            a,
            b,
            DVector::from_element(6, 0.0),
            DVector::from_element(6, 1.0),
        );
        let sol = solve(&p).unwrap();
        let pg = projected_gradient(&p, 200_000).unwrap();
        let pg_res = (&p.a * &pg - &p.b).norm();
        assert_abs_diff_eq!(sol.residual_norm, pg_res, epsilon = 1e-6);
        assert!(sol.kkt_residual <= 1e-10 * 10.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn random_problems_agree_with_oracle(
            entries in proptest::collection::vec(-2.0..2.0f64, 4 * 8),
            rhs in proptest::collection::vec(-3.0..3.0f64, 4),
            width in 0.1..2.0f64,
        ) {
            let a = DMatrix::from_row_slice(4, 8, &entries);
            let b = DVector::from_vec(rhs);
            let p = problem(
                a,
                b,
                DVector::from_element(8, 0.0),
                DVector::from_element(8, width),
            );
            let sol = solve(&p).unwrap();
            // First-order optimality, scaled by the gradient magnitude.
            let scale = (p.a.transpose() * &p.b).amax().max(1.0);
            prop_assert!(sol.kkt_residual <= 1e-9 * scale);
            let pg = projected_gradient(&p, 100_000).unwrap();
            let pg_res = (&p.a * &pg - &p.b).norm();
            // The oracle is first-order accurate only.
            prop_assert!(sol.residual_norm <= pg_res + 1e-5);
            prop_assert!((sol.residual_norm - pg_res).abs() <= 1e-4 * pg_res.max(1.0));
        }
    }
}
