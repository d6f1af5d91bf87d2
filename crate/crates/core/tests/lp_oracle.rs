mod common;

use common::{classify, lp_oracle, random_lp, rng, OracleResult};
use cset_transport::lp::{solve, solve_with, Pricing, SolverOptions};

#[test]
fn simplex_matches_vertex_enumeration() {
    let mut r = rng(7);
    let t = std::time::Instant::now();
    for i in 0..200 {
        let model = random_lp(&mut r, 6, 6);
        let sol = solve(&model).unwrap();
        let bland = solve_with(&model, &SolverOptions { pricing: Pricing::Bland, ..Default::default() }).unwrap();
        assert_eq!(sol.status, bland.status, "case {i}");
        match lp_oracle(&model) {
            OracleResult::Optimal(v) => {
                assert_eq!(classify(sol.status), "optimal", "case {i}: {model:?}");
                assert!((sol.objective.unwrap() - v).abs() <= 1e-6, "case {i}: {} vs {v}", sol.objective.unwrap());
                assert!((bland.objective.unwrap() - v).abs() <= 1e-6, "case {i}");
                assert!(model.max_violation(&sol.values) <= 1e-7);
            }
            OracleResult::Infeasible => assert_eq!(classify(sol.status), "infeasible", "case {i}: {model:?}"),
            OracleResult::Unbounded => assert_eq!(classify(sol.status), "unbounded", "case {i}: {model:?}"),
        }
    }
    println!("200 LPs in {:?}", t.elapsed());
}
