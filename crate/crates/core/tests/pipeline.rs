//! End-to-end runs of the pipeline on small hand-made and bundled instances.

use std::collections::BTreeSet;

use hens_core::io::{parse_instance, run_pipeline, Report, RunConfig, Stage};
use hens_core::milp::{build_fixed_interval_model, instance_intervals, ObjectiveScope};
use hens_core::replication::{table2_aggregate, table2_instance, SlackMode};
use hens_core::{Instance, Rational, Scalar};

fn instance(hot: &[(&str, i64)], cold: &[(&str, i64)]) -> Instance {
    let mut text = String::new();
    for (side, list) in [("hot", hot), ("cold", cold)] {
        for (id, load) in list {
            text += &format!("[[stream]]\nid = \"{id}\"\nkind = \"{side}\"\nfcp = 1\nload = {load}\n\n");
        }
    }
    let table = |list: &[(&str, i64)]| list.iter().map(|(id, l)| format!("{id} = {l}")).collect::<Vec<_>>().join(", ");
    text += &format!("[[interval]]\nhot = {{ {} }}\ncold = {{ {} }}\n", table(hot), table(cold));
    parse_instance(&text).unwrap()
}

fn full_config() -> RunConfig {
    RunConfig {
        sbc: true,
        objective_scope: Some(ObjectiveScope::AllPairs),
        ..RunConfig::default()
    }
}

fn run(inst: &Instance, config: &RunConfig) -> Report {
    run_pipeline(inst, config).unwrap().report
}

#[test]
fn one_by_one_balanced() {
    let r = run(&instance(&[("H1", 100)], &[("C1", 100)]), &full_config());
    assert_eq!(r.total_objective, 1);
    let sym = r.blocks[0].symmetry.as_ref().unwrap();
    assert_eq!(sym.group.order, "1");
    assert!(sym.group.generators.is_empty());
    assert_eq!(sym.sbc.as_ref().unwrap().kind, "none");
}

#[test]
fn two_equal_hot_streams() {
    let r = run(&instance(&[("H1", 100), ("H2", 100)], &[("C1", 100)]), &full_config());
    let b = &r.blocks[0];
    assert_eq!(b.objective, 1);
    assert_eq!(b.optimum_count, 2);
    let sym = b.symmetry.as_ref().unwrap();
    assert_eq!(sym.group.order, "2");
    assert_eq!(sym.orbits, vec![vec![0, 1]]);
    let sbc = sym.sbc.as_ref().unwrap();
    assert_eq!(sbc.survivors.len(), 1);
    assert!(sbc.one_per_orbit && sbc.survivors_canonical);
}

#[test]
fn reports_are_deterministic() {
    let inst = table2_instance(SlackMode::EnteringResidual);
    let a = run(&inst, &full_config());
    let b = run(&inst, &full_config());
    assert_eq!(a.without_timings(), b.without_timings());
    assert_eq!(a.without_timings().to_json(), b.without_timings().to_json());
}

/// Maximal runs of digits, `.`, `/` and `-`, trimmed to start and end on a digit
/// (a leading minus is kept).
fn numbers(text: &str) -> BTreeSet<String> {
    text.split(|c: char| !(c.is_ascii_digit() || c == '.' || c == '/' || c == '-'))
        .filter_map(|t| {
            let t = t.trim_end_matches(|c: char| !c.is_ascii_digit());
            let start = t.find(|c: char| c.is_ascii_digit())?;
            let neg = start > 0 && &t[start - 1..start] == "-";
            Some(if neg { t[start - 1..].to_string() } else { t[start..].to_string() })
        })
        .collect()
}

#[test]
fn json_and_text_carry_the_same_numbers() {
    for inst in [
        table2_instance(SlackMode::EnteringResidual),
        table2_instance(SlackMode::ScaleColdUtility),
        instance(&[("H1", 100), ("H2", 100)], &[("C1", 100)]),
    ] {
        let r = run(&inst, &full_config()).without_timings();
        let text: String = r
            .to_text()
            .lines()
            .filter(|l| !l.starts_with("timings"))
            .map(|l| {
                let t = l.trim_start();
                match t.strip_prefix('#') {
                    Some(rest) => rest.split_once(' ').map_or("", |(_, tail)| tail).to_string(),
                    None => l.to_string(),
                }
            })
            .collect::<Vec<_>>()
            .join("\n");
        let mut json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        json.as_object_mut().unwrap().remove("timings_ms");
        let json = json.to_string();
        assert!(numbers(&text).len() > 10);
        assert_eq!(numbers(&text), numbers(&json), "{text}\n{json}");
    }
}

#[test]
fn table2_replication() {
    let r = run(&table2_instance(SlackMode::EnteringResidual), &full_config());
    assert!(r.notes.iter().any(|n| n.contains("differ by -2 kW")), "{:?}", r.notes);
    assert_eq!(r.instance.imbalance, "-2");
    let sub3 = r.blocks.iter().find(|b| b.name == "sub3").unwrap();
    let sym = sub3.symmetry.as_ref().unwrap();
    let members = |c: &[hens_core::io::ClassReport]| -> Vec<Vec<String>> {
        c.iter().filter(|c| c.members.len() > 1).map(|c| c.members.clone()).collect()
    };
    assert_eq!(members(&sym.hot_classes), vec![vec!["H1".to_string(), "H3".into()]]);
    assert_eq!(members(&sym.cold_classes), vec![vec!["C1".to_string(), "CU".into()]]);
    assert!(sym.all_pass && sym.closed);
    assert_eq!(sub3.optima_complete, Some(true));
    for b in &r.blocks {
        let s = b.symmetry.as_ref().unwrap();
        assert!(s.all_pass && s.closed, "{}", b.name);
        assert!(s.sbc.as_ref().unwrap().one_per_orbit, "{}", b.name);
    }
}

#[test]
fn scaled_table2_loses_the_cold_class() {
    let r = run(&table2_instance(SlackMode::ScaleColdUtility), &full_config());
    assert!(r.notes.iter().all(|n| !n.contains("differ")));
    let sub3 = r.blocks.iter().find(|b| b.name == "sub3").unwrap();
    let sym = sub3.symmetry.as_ref().unwrap();
    assert_eq!(sym.group.order, "2");
    assert!(sym.cold_classes.iter().all(|c| c.members.len() == 1));
}

#[test]
fn aggregate_table2_builds() {
    for mode in [SlackMode::EnteringResidual, SlackMode::ScaleColdUtility] {
        let inst = table2_aggregate(mode);
        let problems = instance_intervals(&inst, &Rational::from_int(10), None, true).unwrap();
        assert_eq!(problems.len(), 1);
        let process = build_fixed_interval_model(&problems[0], ObjectiveScope::ProcessPairs).unwrap();
        assert_eq!(process.num_binaries(), 25);
        // Two hot utilities and one cold utility add 2·5 + 5 counted pairs.
        let all = build_fixed_interval_model(&problems[0], ObjectiveScope::AllPairs).unwrap();
        assert_eq!(all.num_binaries(), 40);
    }
}

#[test]
fn stop_after_solve_skips_later_stages() {
    let config = RunConfig {
        stop_after: Stage::Solve,
        ..RunConfig::default()
    };
    let r = run(&table2_instance(SlackMode::EnteringResidual), &config);
    assert!(r.blocks.iter().all(|b| b.symmetry.is_none() && b.optima_complete.is_none()));
    assert_eq!(r.total_objective, r.blocks.iter().map(|b| b.objective).sum::<usize>());
}
