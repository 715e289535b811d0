//! Sparse LP backend for nudging.

use microlp::{ComparisonOp, OptimizationDirection, Problem, SolveOutcome};
use ortho_core::lp::{Cmp, LinearProgram, LpOutcome, LpSolution, LpSolver};

/// [`LpSolver`] backed by the `microlp` revised simplex.
#[derive(Debug, Clone, Copy, Default)]
pub struct MicroLp;

impl LpSolver for MicroLp {
    fn solve(&self, lp: &LinearProgram) -> LpOutcome {
        let mut p = Problem::new(OptimizationDirection::Minimize);
        let vars: Vec<_> = (0..lp.num_vars()).map(|j| p.add_var(lp.objective[j], (lp.lower[j], lp.upper[j]))).collect();
        for r in &lp.rows {
            let op = match r.cmp {
                Cmp::Le => ComparisonOp::Le,
                Cmp::Ge => ComparisonOp::Ge,
                Cmp::Eq => ComparisonOp::Eq,
            };
            p.add_constraint(r.terms.iter().map(|&(j, a)| (vars[j], a)).collect::<Vec<_>>().as_slice(), op, r.rhs);
        }
        match p.solve() {
            Ok(SolveOutcome::Solution(s)) => {
                let values: Vec<f64> = vars.iter().map(|&v| s[v]).collect();
                LpOutcome::Optimal(LpSolution { objective: lp.objective_value(&values), values })
            }
            Err(microlp::Error::Unbounded) => LpOutcome::Unbounded,
            Ok(SolveOutcome::Interrupted(_)) | Err(_) => LpOutcome::Infeasible,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ortho_core::lp::DenseSimplex;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_binding_bound() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var(0.0, 5.0, -1.0);
        let s = MicroLp.solve(&lp).optimal().unwrap();
        assert!((s.values[x] - 5.0).abs() < 1e-9);
        assert!((s.objective + 5.0).abs() < 1e-9);
    }

    #[test]
    fn contradictory_bounds_are_infeasible() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var(0.0, f64::INFINITY, 0.0);
        lp.add_row(vec![(x, 1.0)], Cmp::Ge, 1.0);
        lp.add_row(vec![(x, 1.0)], Cmp::Le, 0.0);
        assert_eq!(MicroLp.solve(&lp), LpOutcome::Infeasible);
        let mut lp = LinearProgram::new();
        lp.add_var(0.0, f64::INFINITY, -1.0);
        assert_eq!(MicroLp.solve(&lp), LpOutcome::Unbounded);
    }

    #[test]
    fn agrees_with_dense_simplex() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let mut lp = LinearProgram::new();
            let n = rng.gen_range(1..6);
            for _ in 0..n {
                lp.add_var(-10.0, 10.0, rng.gen_range(-3..=3) as f64);
            }
            for _ in 0..rng.gen_range(0..8) {
                let terms: Vec<(usize, f64)> = (0..n).map(|j| (j, rng.gen_range(-2..=2) as f64)).collect();
                let cmp = [Cmp::Le, Cmp::Ge][rng.gen_range(0..2)];
                lp.add_row(terms, cmp, rng.gen_range(-5..=5) as f64);
            }
            let a = MicroLp.solve(&lp);
            let b = DenseSimplex::default().solve(&lp);
            match (a, b) {
                (LpOutcome::Optimal(x), LpOutcome::Optimal(y)) => {
                    assert!((x.objective - y.objective).abs() < 1e-6, "{} vs {}", x.objective, y.objective);
                    assert!(lp.max_violation(&x.values) < 1e-6);
                }
                (x, y) => assert_eq!(core::mem::discriminant(&x), core::mem::discriminant(&y)),
            }
        }
    }
}
