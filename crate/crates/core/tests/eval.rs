//! Evaluation harness against hand-computed expectations.

mod common;

use pcx_core::agents::AgentMetadata;
use pcx_core::eval::{
    h_sensitivity, mean_std, score_agent, shared_state_fraction, skill_hierarchy_check,
    summary_overlap, HierarchyEntry, HierarchyReport, ScoreReport,
};
use pcx_core::{compare_agents, Agent, ComparisonParams, EnvConfig, QTable, StateId, Summary};

use common::*;

/// Policy on a chain given by one greedy action per state.
fn policy(env: &EnvConfig, greedy: &[u32]) -> Agent {
    let rows = greedy.iter().enumerate().map(|(s, &a)| {
        let mut row = vec![0.0, 0.0];
        row[a as usize] = 1.0;
        (StateId(s as u32), row)
    });
    Agent::new("p", QTable::from_rows(AgentMetadata::for_env(env), 2, rows))
}

#[test]
fn deterministic_env_scores_have_zero_spread() {
    let env = chain(5, 0.0);
    let right = policy(&env, &[1, 1, 1, 1, 1]);
    let r = score_agent(&right, &env, 10, 4).unwrap();
    assert_eq!(r.episodes, 10);
    assert_eq!(r.std_return, 0.0);
    assert_eq!(r.returns.iter().sum::<f64>() / 10.0, r.mean_return);
    assert!(score_agent(&right, &env, 0, 4).is_err());
}

#[test]
fn score_statistics_recompute_from_returns() {
    let env = chain(6, 0.4);
    let a = random_agent("a", &env, 8);
    let r = score_agent(&a, &env, 25, 1).unwrap();
    let n = r.returns.len() as f64;
    let mean = r.returns.iter().sum::<f64>() / n;
    let var = r.returns.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    assert!((r.mean_return - mean).abs() < 1e-12);
    assert!((r.std_return - var.sqrt()).abs() < 1e-12);
    assert_eq!(score_agent(&a, &env, 25, 1).unwrap(), r);
    let csv = r.to_csv().unwrap();
    assert_eq!(csv.lines().count(), 26);
    assert!(csv.starts_with("agent_id,episode,return\n"));
}

fn summary_of(seed: u64) -> Summary {
    let env = small_river();
    let a = random_agent("a", &env, seed);
    let b = random_agent("b", &env, seed + 100);
    compare_agents(&a, &b, &env, &ComparisonParams::river_defaults()).unwrap().0
}

#[test]
fn overlap_examples() {
    let mut s = summary_of(1);
    let template = s.pairs[0].clone();
    s.pairs = (0..5u32)
        .map(|i| pcx_core::TrajectoryPair {
            prefix: vec![StateId(10 * i)],
            disagreement_state: StateId(10 * i + 1),
            leader_cont: vec![StateId(10 * i + 2)],
            disagreer_cont: vec![StateId(10 * i + 3)],
            ..template.clone()
        })
        .collect();
    assert_eq!(summary_overlap(&s, &s), 1.0);
    let mut other = s.clone();
    for p in &mut other.pairs {
        p.disagreement_state = StateId(p.disagreement_state.0 + 10_000);
    }
    assert_eq!(summary_overlap(&s, &other), 0.0);
    let mut two = other.clone();
    two.pairs[1] = s.pairs[1].clone();
    two.pairs[3] = s.pairs[3].clone();
    assert!((summary_overlap(&s, &two) - 0.4).abs() < 1e-12);
}

#[test]
fn shared_fraction_is_a_multiset_ratio() {
    let ids = |v: &[u32]| v.iter().copied().map(StateId).collect::<Vec<_>>();
    assert_eq!(shared_state_fraction(&ids(&[1, 2, 3]), &ids(&[3, 2, 1])), 1.0);
    assert_eq!(shared_state_fraction(&ids(&[1, 1]), &ids(&[1, 2, 3, 4])), 0.25);
    assert_eq!(shared_state_fraction(&[], &[]), 1.0);
}

#[test]
fn h_independent_instance_shares_everything() {
    // The agents disagree only at the start of a long deterministic chain,
    // so the single disagreement is selected at every horizon.
    let env = EnvConfig::Chain(pcx_core::env::ChainConfig {
        length: 40,
        max_steps: 200,
        ..Default::default()
    });
    let mut g = vec![1u32; 40];
    let a = policy(&env, &g);
    g[0] = 0;
    let b = policy(&env, &g);
    let base = ComparisonParams { h: 5, l: 10, ..ComparisonParams::river_defaults() };
    let r = h_sensitivity(&a, &b, &env, &base, &[5, 10]).unwrap();
    assert_eq!(r.entries.len(), 2);
    assert_eq!(r.entries[1].l, 20);
    for e in &r.entries {
        assert_eq!(e.a_leads_shared, 1.0);
        assert_eq!(e.b_leads_shared, 1.0);
        assert_eq!(e.a_leads_states, vec![StateId(0)]);
    }
}

#[test]
fn random_sensitivity_fractions_are_in_range() {
    let env = small_river();
    let a = random_agent("a", &env, 21);
    let b = random_agent("b", &env, 22);
    let base = ComparisonParams::river_defaults();
    let r = h_sensitivity(&a, &b, &env, &base, &[5, 10]).unwrap();
    assert_eq!(r.entries[0].a_leads_shared, 1.0);
    for e in &r.entries {
        assert!((0.0..=1.0).contains(&e.a_leads_shared));
        assert!((0.0..=1.0).contains(&e.b_leads_shared));
    }
    assert_eq!(r.to_csv().unwrap().lines().count(), 3);
}

#[test]
fn hierarchy_of_identical_presets_is_indistinguishable() {
    let r = skill_hierarchy_check(&["novice", "novice"], None, 20, 3).unwrap();
    assert_eq!(r.entries[0].score, r.entries[1].score);
    assert!(!r.comparisons[0].separated);
    assert_eq!(r.comparisons[0].mean_difference, 0.0);
}

#[test]
fn ordering_depends_only_on_scores() {
    let entry = |name: &str, returns: Vec<f64>| HierarchyEntry {
        preset: name.into(),
        training_episodes: 1,
        score: ScoreReport::from_returns(name, returns),
    };
    let r = HierarchyReport::from_entries(vec![
        entry("low", vec![1.0, 2.0, 3.0]),
        entry("high", vec![10.0, 11.0, 12.0]),
        entry("mid", vec![5.0, 5.0, 5.0]),
    ]);
    assert_eq!(r.ordering, ["high", "mid", "low"]);
    let c = &r.comparisons[0];
    assert_eq!(c.mean_difference, 6.0);
    let (_, s) = mean_std(&[10.0, 11.0, 12.0]);
    assert!((c.pooled_std_error - s / 3f64.sqrt()).abs() < 1e-12);
    assert!(c.separated);
}
