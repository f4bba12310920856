//! Branch-and-bound and enumeration against the exhaustive Hall-condition
//! oracle, plus `verify_solution` against a straight-line re-evaluation.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::{int, q, random_case, rng, straight_line_feasible, Case};
use hens_core::milp::{
    build_fixed_interval_model, build_full_model_from_intervals, enumerate_optima, solve_bnb, BnbConfig, BnbOutcome,
    MilpError, ObjectiveScope,
};
use hens_core::model::{verify_solution, MatchSolution, Role};
use hens_core::{Rational, Scalar};
use num_traits::Zero;
use rand::Rng;

#[test]
fn bnb_and_pool_match_exhaustive_oracle() {
    let mut r = rng(11);
    let mut infeasible = 0;
    for _ in 0..80 {
        let case = random_case(&mut r);
        let model = build_fixed_interval_model(&case.problem(), case.scope).unwrap();
        assert_eq!(model.num_binaries(), case.binary_pairs().len());
        let res = solve_bnb(&model, &BnbConfig::default()).unwrap();
        match case.exhaustive() {
            None => {
                infeasible += 1;
                assert_eq!(res.outcome, BnbOutcome::Infeasible);
                assert_eq!(enumerate_optima(&model, 10, &BnbConfig::default()), Err(MilpError::Infeasible));
            }
            Some((best, patterns)) => {
                let x = res.solution().expect("feasible");
                assert_eq!(x.objective, best, "{case:?}");
                assert!(verify_solution(&model, x, &Rational::zero()).unwrap().is_feasible());
                let pool = enumerate_optima(&model, 100_000, &BnbConfig::default()).unwrap();
                assert!(pool.complete);
                let got: BTreeSet<String> = pool.solutions.iter().map(MatchSolution::pattern_string).collect();
                assert_eq!(got.len(), pool.len(), "patterns are distinct");
                assert_eq!(got, patterns, "{case:?}");
            }
        }
    }
    assert!(infeasible > 0, "the generator should produce some infeasible cases");
}

#[test]
fn enumeration_cap_marks_incomplete() {
    // Two equal hot streams against one cold stream: two optima.
    let case = Case {
        hot: vec![
            ("h1".into(), Role::Process, int(50), Rational::zero()),
            ("h2".into(), Role::Process, int(50), Rational::zero()),
        ],
        cold: vec![("c1".into(), Role::Process, int(50))],
        scope: ObjectiveScope::ProcessPairs,
    };
    let model = build_fixed_interval_model(&case.problem(), case.scope).unwrap();
    let capped = enumerate_optima(&model, 1, &BnbConfig::default()).unwrap();
    assert_eq!(capped.len(), 1);
    assert!(!capped.complete);
    let all = enumerate_optima(&model, 2, &BnbConfig::default()).unwrap();
    assert_eq!(all.len(), 2);
    assert!(all.complete);
}

#[test]
fn full_model_on_one_interval_agrees_with_fixed_interval() {
    let mut r = rng(5);
    let mut checked = 0;
    while checked < 25 {
        let mut case = random_case(&mut r);
        case.scope = ObjectiveScope::AllPairs;
        case.hot.iter_mut().for_each(|h| h.3 = Rational::zero());
        let Some((best, _)) = case.exhaustive() else { continue };
        // The full model closes the cascade, so only balanced cases compare.
        let supply = case.hot.iter().fold(Rational::zero(), |a, h| a + h.2.clone());
        let demand = case.cold.iter().fold(Rational::zero(), |a, c| a + c.2.clone());
        if supply != demand {
            continue;
        }
        let full = build_full_model_from_intervals(&[case.problem()], ObjectiveScope::AllPairs).unwrap();
        let res = solve_bnb(&full, &BnbConfig::default()).unwrap();
        assert_eq!(res.solution().unwrap().objective, best);
        checked += 1;
    }
}

type Keyed = (
    BTreeMap<(String, String), bool>,
    BTreeMap<(String, String), Rational>,
    BTreeMap<String, Rational>,
);

fn keyed(x: &MatchSolution<Rational>) -> Keyed {
    let y = x.y.iter().map(|(k, v)| ((k.hot.clone(), k.cold.clone()), *v)).collect();
    let qv = x.q.iter().map(|(k, v)| ((k.hot.clone(), k.cold.clone()), v.clone())).collect();
    let r = x.residuals.iter().map(|((h, _), v)| (h.clone(), v.clone())).collect();
    (y, qv, r)
}

#[test]
fn verify_solution_agrees_with_straight_line_check() {
    let mut r = rng(23);
    let mut accepted = 0;
    let mut rejected = 0;
    for _ in 0..60 {
        let case = random_case(&mut r);
        let model = build_fixed_interval_model(&case.problem(), case.scope).unwrap();
        let Some(x) = solve_bnb(&model, &BnbConfig::default()).unwrap().solution().cloned() else { continue };
        for _ in 0..15 {
            let mut p = x.clone();
            match r.gen_range(0..6) {
                0 => {}
                1 => {
                    if let Some(k) = p.y.keys().nth(r.gen_range(0..p.y.len().max(1))).cloned() {
                        let v = p.y[&k];
                        p.y.insert(k, !v);
                        if r.gen_bool(0.5) {
                            p.objective = p.y.values().filter(|&&b| b).count();
                        }
                    }
                }
                2 => {
                    if let Some(k) = p.q.keys().nth(r.gen_range(0..p.q.len().max(1))).cloned() {
                        let delta = q(r.gen_range(-3..=3), r.gen_range(1..=3));
                        let v = p.q[&k].clone() + delta;
                        p.q.insert(k, v);
                    }
                }
                3 => {
                    let h = case.hot[r.gen_range(0..case.hot.len())].0.clone();
                    p.residuals.insert((h, 1), q(r.gen_range(0..=5), 1));
                }
                4 => p.objective += 1,
                _ => {
                    // Shift heat between two colds of one hot stream: balances on
                    // the hot side hold, cold balances break unless mirrored.
                    let keys: Vec<_> = p.q.keys().cloned().collect();
                    if keys.len() >= 2 {
                        let a = keys[r.gen_range(0..keys.len())].clone();
                        let b = keys[r.gen_range(0..keys.len())].clone();
                        let d = q(1, 2);
                        p.q.insert(a.clone(), p.q[&a].clone() - d.clone());
                        p.q.insert(b.clone(), p.q[&b].clone() + d);
                    }
                }
            }
            let (y, qv, res) = keyed(&p);
            let expected = straight_line_feasible(&case, &y, &qv, &res, p.objective);
            let got = verify_solution(&model, &p, &Rational::zero()).unwrap().is_feasible();
            assert_eq!(got, expected, "{case:?}\n{p:?}");
            if got {
                accepted += 1;
            } else {
                rejected += 1;
            }
        }
    }
    assert!(accepted > 0 && rejected > 0);
}

#[test]
fn float_and_exact_models_agree_on_objective() {
    let mut r = rng(31);
    for _ in 0..30 {
        let case = random_case(&mut r);
        let Some((best, _)) = case.exhaustive() else { continue };
        let p = case.problem();
        let to_f = |v: &Rational| v.to_f64_lossy();
        let hot = p
            .hot
            .iter()
            .map(|h| hens_core::model::Participant::new(h.id.clone(), h.role, to_f(&h.load)).with_entering(to_f(&h.entering_residual)))
            .collect();
        let cold = p
            .cold
            .iter()
            .map(|c| hens_core::model::Participant::new(c.id.clone(), c.role, to_f(&c.load)))
            .collect();
        let fp = hens_core::model::IntervalProblem::new(1, "t1", None, hot, cold).unwrap();
        let model = build_fixed_interval_model(&fp, case.scope).unwrap();
        let res = solve_bnb(&model, &BnbConfig::default()).unwrap();
        assert_eq!(res.solution().unwrap().objective, best);
    }
}
