//! Greedy top-k selection under trajectory diversity constraints.
//!
//! Candidates are taken in order of decreasing importance (earlier
//! candidates first on ties). A candidate is skipped when it
//!
//! 1. begins or ends at the same state as an already selected trajectory,
//! 2. has Leader and Disagreer continuations meeting again at the state
//!    before last, or
//! 3. shares more than `overlap_lim` states with a selected trajectory.
//!
//! HIGHLIGHTS clips are selected under rule 3 only.

use std::collections::HashMap;

use thiserror::Error;

use crate::mdp::StateId;
use crate::summary::TrajectoryPair;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SelectionRules {
    pub k: usize,
    pub overlap_lim: usize,
    pub distinct_endpoints: bool,
    pub distinct_before_last: bool,
}

impl SelectionRules {
    pub fn contrastive(k: usize, overlap_lim: usize) -> Self {
        Self {
            k,
            overlap_lim,
            distinct_endpoints: true,
            distinct_before_last: true,
        }
    }

    pub fn overlap_only(k: usize, overlap_lim: usize) -> Self {
        Self {
            k,
            overlap_lim,
            distinct_endpoints: false,
            distinct_before_last: false,
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum Violation {
    #[error("more than {k} trajectories selected")]
    OverBudget { k: usize },
    #[error("importance increases at position {at}")]
    NotDescending { at: usize },
    #[error("trajectories {a} and {b} begin at the same state")]
    SameBegin { a: usize, b: usize },
    #[error("trajectories {a} and {b} end at the same state")]
    SameEnd { a: usize, b: usize },
    #[error("trajectory {a} continuations share their before-last state")]
    SharedBeforeLast { a: usize },
    #[error("trajectories {a} and {b} share {shared} states (limit {limit})")]
    Overlap {
        a: usize,
        b: usize,
        shared: usize,
        limit: usize,
    },
    #[error("trajectory {a} continuations differ in length")]
    UnequalContinuations { a: usize },
}

/// Size of the multiset intersection of two pairs' states.
pub fn shared_states(a: &TrajectoryPair, b: &TrajectoryPair) -> usize {
    let mut counts: HashMap<StateId, usize> = HashMap::new();
    for s in a.all_states() {
        *counts.entry(s).or_default() += 1;
    }
    let mut shared = 0;
    for s in b.all_states() {
        if let Some(c) = counts.get_mut(&s).filter(|c| **c > 0) {
            *c -= 1;
            shared += 1;
        }
    }
    shared
}

/// Rule 2 for a single candidate. Continuations shorter than two states
/// have no before-last state of their own and pass.
pub fn shares_before_last(p: &TrajectoryPair) -> bool {
    let (l, d) = (&p.leader_cont, &p.disagreer_cont);
    p.is_contrastive() && l.len() >= 2 && l.len() == d.len() && l[l.len() - 2] == d[d.len() - 2]
}

fn pair_conflict(
    rules: &SelectionRules,
    a: (usize, &TrajectoryPair),
    b: (usize, &TrajectoryPair),
) -> Option<Violation> {
    let (ia, pa) = a;
    let (ib, pb) = b;
    if rules.distinct_endpoints {
        if pa.begin() == pb.begin() {
            return Some(Violation::SameBegin { a: ia, b: ib });
        }
        let ends_b = pb.ends();
        if pa.ends().iter().any(|e| ends_b.contains(e)) {
            return Some(Violation::SameEnd { a: ia, b: ib });
        }
    }
    let shared = shared_states(pa, pb);
    if shared > rules.overlap_lim {
        return Some(Violation::Overlap {
            a: ia,
            b: ib,
            shared,
            limit: rules.overlap_lim,
        });
    }
    None
}

/// Whether `candidate` may join `selected` under `rules`.
pub fn admissible(rules: &SelectionRules, selected: &[TrajectoryPair], candidate: &TrajectoryPair) -> bool {
    if rules.distinct_before_last && shares_before_last(candidate) {
        return false;
    }
    selected
        .iter()
        .enumerate()
        .all(|(i, s)| pair_conflict(rules, (i, s), (selected.len(), candidate)).is_none())
}

/// Greedily pick up to `rules.k` admissible pairs by decreasing importance.
pub fn select_top(mut pairs: Vec<TrajectoryPair>, rules: &SelectionRules) -> Vec<TrajectoryPair> {
    pairs.sort_by(|a, b| b.importance.total_cmp(&a.importance));
    let mut selected = Vec::with_capacity(rules.k);
    for p in pairs {
        if selected.len() == rules.k {
            break;
        }
        if admissible(rules, &selected, &p) {
            selected.push(p);
        }
    }
    selected
}

/// Check an ordered selection against every rule.
pub fn validate_selection(pairs: &[TrajectoryPair], rules: &SelectionRules) -> Result<(), Violation> {
    if pairs.len() > rules.k {
        return Err(Violation::OverBudget { k: rules.k });
    }
    for (i, p) in pairs.iter().enumerate() {
        if i > 0 && p.importance > pairs[i - 1].importance {
            return Err(Violation::NotDescending { at: i });
        }
        if p.is_contrastive() && p.leader_cont.len() != p.disagreer_cont.len() {
            return Err(Violation::UnequalContinuations { a: i });
        }
        if rules.distinct_before_last && shares_before_last(p) {
            return Err(Violation::SharedBeforeLast { a: i });
        }
        for (j, q) in pairs.iter().enumerate().skip(i + 1) {
            if let Some(v) = pair_conflict(rules, (i, p), (j, q)) {
                return Err(v);
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::ActionId;

    fn pair(prefix: &[u32], pivot: u32, lc: &[u32], dc: &[u32], importance: f64) -> TrajectoryPair {
        let ids = |v: &[u32]| v.iter().copied().map(StateId).collect::<Vec<_>>();
        TrajectoryPair {
            episode: 0,
            prefix: ids(prefix),
            disagreement_state: StateId(pivot),
            leader_cont: ids(lc),
            disagreer_cont: ids(dc),
            importance,
            leader_id: "a".into(),
            disagreer_id: Some("b".into()),
            leader_action: ActionId(0),
            disagreer_action: Some(ActionId(1)),
        }
    }

    #[test]
    fn picks_top_k_when_unconstrained() {
        let c = vec![
            pair(&[1], 2, &[3, 4], &[5, 6], 3.0),
            pair(&[11], 12, &[13, 14], &[15, 16], 5.0),
            pair(&[21], 22, &[23, 24], &[25, 26], 1.0),
        ];
        let got = select_top(c, &SelectionRules::contrastive(2, 0));
        let imps: Vec<f64> = got.iter().map(|p| p.importance).collect();
        assert_eq!(imps, [5.0, 3.0]);
    }

    #[test]
    fn before_last_rule_excludes_even_the_best() {
        let c = vec![
            pair(&[1], 2, &[3, 7, 4], &[5, 7, 6], 9.0),
            pair(&[11], 12, &[13, 14], &[15, 16], 1.0),
        ];
        let got = select_top(c, &SelectionRules::contrastive(2, 10));
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].importance, 1.0);
    }

    #[test]
    fn single_step_continuations_pass_before_last_rule() {
        assert!(!shares_before_last(&pair(&[], 2, &[3], &[1], 1.0)));
    }

    #[test]
    fn endpoint_rules() {
        let sel = vec![pair(&[1], 2, &[3], &[4], 5.0)];
        let rules = SelectionRules::contrastive(5, 10);
        assert!(!admissible(&rules, &sel, &pair(&[1], 9, &[10], &[11], 1.0)));
        assert!(!admissible(&rules, &sel, &pair(&[8], 9, &[10], &[4], 1.0)));
        assert!(admissible(&rules, &sel, &pair(&[8], 9, &[10], &[11], 1.0)));
        let loose = SelectionRules::overlap_only(5, 10);
        assert!(admissible(&loose, &sel, &pair(&[1], 9, &[10], &[11], 1.0)));
    }

    #[test]
    fn overlap_counts_multiset_intersection() {
        let a = pair(&[1, 1, 2], 3, &[4], &[5], 1.0);
        let b = pair(&[1, 2, 2], 6, &[7], &[8], 1.0);
        assert_eq!(shared_states(&a, &b), 2);
        assert_eq!(shared_states(&b, &a), 2);
        let rules = SelectionRules::overlap_only(5, 1);
        assert!(!admissible(&rules, std::slice::from_ref(&a), &b));
        let rules = SelectionRules::overlap_only(5, 2);
        assert!(admissible(&rules, &[a], &b));
    }

    #[test]
    fn validator_flags_violations() {
        let rules = SelectionRules::contrastive(1, 3);
        let two = vec![pair(&[1], 2, &[3], &[4], 2.0), pair(&[5], 6, &[7], &[8], 1.0)];
        assert_eq!(validate_selection(&two, &rules), Err(Violation::OverBudget { k: 1 }));
        let rules = SelectionRules::contrastive(5, 3);
        let up = vec![pair(&[1], 2, &[3], &[4], 1.0), pair(&[5], 6, &[7], &[8], 2.0)];
        assert_eq!(validate_selection(&up, &rules), Err(Violation::NotDescending { at: 1 }));
        assert!(validate_selection(&two, &rules).is_ok());
    }
}
