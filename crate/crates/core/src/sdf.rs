// SPDX-License-Identifier: Apache-2.0

//! Numeric characteristic matrices of concrete SDF graphs and the
//! worst-case combination of SADF scenarios.
//!
//! One iteration is simulated with symbolic timestamps: every token
//! carries a (max,+) dependency vector over the initial tokens, so a
//! single pass yields every row of the matrix.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::rc::Rc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::SdfGraph;
use crate::maxplus::{elementwise_max, mp_matvec, MaxPlusMatrix, MaxPlusValue};

/// Dependency vector of one token over the initial tokens.
pub type TimestampToken = Rc<[MaxPlusValue]>;

/// Order in which ready actors fire during the simulated iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiringOrder {
    /// Passes over the actors in name order, firing each ready one once.
    RoundRobin,
    /// Picks a uniformly random ready actor at every step.
    Random(u64),
}

pub fn extract_numeric_matrix(g: &SdfGraph) -> Result<MaxPlusMatrix> {
    extract_with_order(g, FiringOrder::RoundRobin)
}

pub fn extract_with_order(g: &SdfGraph, order: FiringOrder) -> Result<MaxPlusMatrix> {
    let counts = g.iteration_counts()?;
    let n = g.token_count();
    if n == 0 {
        return Err(Error::EmptyInput("graph has no initial tokens"));
    }
    let mut queues: Vec<VecDeque<TimestampToken>> = Vec::with_capacity(g.channels.len());
    let mut next = 0;
    for c in &g.channels {
        let mut q = VecDeque::with_capacity(c.initial_tokens as usize);
        for _ in 0..c.initial_tokens {
            let mut v = vec![MaxPlusValue::NegInf; n];
            v[next] = MaxPlusValue::zero();
            q.push_back(v.into());
            next += 1;
        }
        queues.push(q);
    }
    let mut inputs = vec![Vec::new(); g.actors.len()];
    let mut outputs = vec![Vec::new(); g.actors.len()];
    for (ci, c) in g.channels.iter().enumerate() {
        inputs[c.dst].push(ci);
        outputs[c.src].push(ci);
    }
    let mut by_name: Vec<usize> = (0..g.actors.len()).collect();
    by_name.sort_by(|&a, &b| g.actors[a].name.cmp(&g.actors[b].name));

    let mut fired = vec![0u64; g.actors.len()];
    let total: u64 = counts.iter().sum();
    let mut done = 0u64;
    let ready = |a: usize, fired: &[u64], queues: &[VecDeque<TimestampToken>]| {
        fired[a] < counts[a]
            && inputs[a]
                .iter()
                .all(|&ci| queues[ci].len() as u64 >= g.channels[ci].consumption)
    };
    let fire = |a: usize, queues: &mut Vec<VecDeque<TimestampToken>>| {
        let mut acc = vec![MaxPlusValue::NegInf; n];
        for &ci in &inputs[a] {
            for _ in 0..g.channels[ci].consumption {
                let t = queues[ci].pop_front().expect("readiness checked");
                for (x, y) in acc.iter_mut().zip(t.iter()) {
                    if *y > *x {
                        *x = y.clone();
                    }
                }
            }
        }
        let exec = &g.actors[a].exec;
        let tok: TimestampToken = acc.iter().map(|v| v.otimes_scalar(exec)).collect::<Vec<_>>().into();
        for &ci in &outputs[a] {
            for _ in 0..g.channels[ci].production {
                queues[ci].push_back(tok.clone());
            }
        }
    };

    match order {
        FiringOrder::RoundRobin => {
            while done < total {
                let mut progress = false;
                for &a in &by_name {
                    if ready(a, &fired, &queues) {
                        fire(a, &mut queues);
                        fired[a] += 1;
                        done += 1;
                        progress = true;
                    }
                }
                if !progress {
                    return Err(not_live(g, &fired, &counts));
                }
            }
        }
        FiringOrder::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            while done < total {
                let candidates: Vec<usize> = by_name.iter().copied().filter(|&a| ready(a, &fired, &queues)).collect();
                if candidates.is_empty() {
                    return Err(not_live(g, &fired, &counts));
                }
                let a = candidates[rng.gen_range(0..candidates.len())];
                fire(a, &mut queues);
                fired[a] += 1;
                done += 1;
            }
        }
    }

    let mut rows = Vec::with_capacity(n);
    for (ci, c) in g.channels.iter().enumerate() {
        if queues[ci].len() as u64 != c.initial_tokens {
            return Err(Error::Inconsistent(format!(
                "channel {}->{} holds {} tokens after one iteration, expected {}",
                g.actors[c.src].name,
                g.actors[c.dst].name,
                queues[ci].len(),
                c.initial_tokens
            )));
        }
        for t in &queues[ci] {
            rows.push(t.to_vec());
        }
    }
    MaxPlusMatrix::new(g.token_labels(), rows)
}

fn not_live(g: &SdfGraph, fired: &[u64], counts: &[u64]) -> Error {
    let blocked: Vec<String> = g
        .actors
        .iter()
        .enumerate()
        .filter(|(i, _)| fired[*i] < counts[*i])
        .map(|(i, a)| format!("{} ({}/{})", a.name, fired[i], counts[i]))
        .collect();
    Error::NotLive(format!("simulation deadlocks with {} unfinished", blocked.join(", ")))
}

/// Scenario automaton over the scenario names of a [`ScenarioSet`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fsm {
    /// (state, scenario) pairs.
    pub states: Vec<(String, String)>,
    pub initial: String,
    pub transitions: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioSet {
    pub scenarios: Vec<(String, SdfGraph)>,
    /// `None` means every scenario may follow every other one.
    pub fsm: Option<Fsm>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SadfAnalysis {
    pub matrix: MaxPlusMatrix,
    /// Matrices of the scenarios that took part in the combination.
    pub scenario_matrices: Vec<(String, MaxPlusMatrix)>,
    pub diagnostics: Vec<String>,
}

/// Elementwise maximum over the scenarios reachable in the automaton.
pub fn sadf_worstcase_matrix(s: &ScenarioSet) -> Result<SadfAnalysis> {
    if s.scenarios.is_empty() {
        return Err(Error::EmptyInput("scenario set is empty"));
    }
    let mut diagnostics = Vec::new();
    let names: BTreeSet<&str> = s.scenarios.iter().map(|(n, _)| n.as_str()).collect();
    let used: BTreeSet<String> = match &s.fsm {
        None => names.iter().map(|n| n.to_string()).collect(),
        Some(fsm) => {
            let label: BTreeMap<&str, &str> = fsm.states.iter().map(|(q, sc)| (q.as_str(), sc.as_str())).collect();
            for (q, sc) in &fsm.states {
                if !names.contains(sc.as_str()) {
                    return Err(Error::InvalidGraph(format!(
                        "state {q} refers to unknown scenario {sc}"
                    )));
                }
            }
            if !label.contains_key(fsm.initial.as_str()) {
                return Err(Error::InvalidGraph(format!(
                    "initial state {} is not declared",
                    fsm.initial
                )));
            }
            for (a, b) in &fsm.transitions {
                for q in [a, b] {
                    if !label.contains_key(q.as_str()) {
                        return Err(Error::InvalidGraph(format!("transition mentions unknown state {q}")));
                    }
                }
            }
            let mut seen = BTreeSet::from([fsm.initial.as_str()]);
            let mut stack = vec![fsm.initial.as_str()];
            while let Some(q) = stack.pop() {
                for (a, b) in &fsm.transitions {
                    if a == q && seen.insert(b.as_str()) {
                        stack.push(b.as_str());
                    }
                }
            }
            let scen_of_states: Vec<&str> = fsm.states.iter().map(|(_, sc)| sc.as_str()).collect();
            let one_state_each = scen_of_states.len() == names.len()
                && scen_of_states.iter().collect::<BTreeSet<_>>().len() == names.len();
            let edges: BTreeSet<(&str, &str)> = fsm.transitions.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
            let complete = fsm.states.iter().all(|(a, _)| {
                fsm.states
                    .iter()
                    .all(|(b, _)| edges.contains(&(a.as_str(), b.as_str())))
            });
            if !(one_state_each && complete) {
                diagnostics.push(
                    "scenario automaton is not fully connected with one state per scenario; \
                     the result is a conservative over-approximation"
                        .to_string(),
                );
            }
            seen.iter().map(|q| label[q].to_string()).collect()
        }
    };
    let mut scenario_matrices = Vec::new();
    for (name, g) in &s.scenarios {
        if used.contains(name) {
            scenario_matrices.push((name.clone(), extract_numeric_matrix(g)?));
        }
    }
    let first = &scenario_matrices[0].1;
    for (_, m) in &scenario_matrices[1..] {
        if m.n() != first.n() {
            return Err(Error::DimensionMismatch {
                expected: first.n(),
                found: m.n(),
            });
        }
        if m.labels() != first.labels() {
            return Err(Error::LabelMismatch);
        }
    }
    let ms: Vec<MaxPlusMatrix> = scenario_matrices.iter().map(|(_, m)| m.clone()).collect();
    Ok(SadfAnalysis {
        matrix: elementwise_max(&ms)?,
        scenario_matrices,
        diagnostics,
    })
}

/// `k` steps of `γ ← M γ`.
pub fn evolve(m: &MaxPlusMatrix, gamma0: &[MaxPlusValue], k: usize) -> Result<Vec<MaxPlusValue>> {
    if gamma0.len() != m.n() {
        return Err(Error::DimensionMismatch {
            expected: m.n(),
            found: gamma0.len(),
        });
    }
    let mut v = gamma0.to_vec();
    for _ in 0..k {
        v = mp_matvec(m, &v)?;
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{SdfActor, SdfChannel};
    use crate::maxplus::throughput_from_matrix;
    use crate::rational::{frac, int};

    fn actor(name: &str, t: i64) -> SdfActor {
        SdfActor {
            name: name.into(),
            exec: int(t),
        }
    }

    fn ch(src: usize, dst: usize, p: u64, c: u64, init: u64) -> SdfChannel {
        SdfChannel {
            src,
            dst,
            production: p,
            consumption: c,
            initial_tokens: init,
        }
    }

    /// Five-actor graph with three self-loops and a two-token feedback
    /// channel; execution times per actor A..E.
    fn five(times: [i64; 5]) -> SdfGraph {
        SdfGraph {
            name: "five".into(),
            actors: ["A", "B", "C", "D", "E"]
                .iter()
                .zip(times)
                .map(|(n, t)| actor(n, t))
                .collect(),
            channels: vec![
                ch(0, 0, 1, 1, 1),
                ch(3, 3, 1, 1, 1),
                ch(2, 2, 1, 1, 1),
                ch(4, 0, 1, 1, 2),
                ch(0, 1, 1, 1, 0),
                ch(1, 2, 1, 1, 0),
                ch(0, 3, 1, 1, 0),
                ch(2, 4, 1, 1, 0),
                ch(3, 4, 1, 1, 0),
            ],
            iteration: None,
        }
    }

    fn row(vals: &[Option<i64>]) -> Vec<MaxPlusValue> {
        vals.iter()
            .map(|v| v.map(MaxPlusValue::from_int).unwrap_or(MaxPlusValue::NegInf))
            .collect()
    }

    /// Independent oracle: longest paths through the one-iteration
    /// firing DAG, computed by hand for unit rates.
    fn five_oracle(t: [i64; 5]) -> Vec<Vec<MaxPlusValue>> {
        let [a, b, c, d, e] = t;
        let x = None;
        vec![
            row(&[Some(a), x, x, Some(a), x]),
            row(&[Some(a + d), Some(d), x, Some(a + d), x]),
            row(&[Some(a + b + c), x, Some(c), Some(a + b + c), x]),
            row(&[x, x, x, x, Some(0)]),
            row(&[
                Some(a + (b + c).max(d) + e),
                Some(d + e),
                Some(c + e),
                Some(a + (b + c).max(d) + e),
                x,
            ]),
        ]
    }

    #[test]
    fn five_actor_matrix_matches_oracle() {
        for t in [[29, 4, 30, 4, 1], [28, 20, 24, 6, 10], [1, 1, 1, 1, 1]] {
            let m = extract_numeric_matrix(&five(t)).unwrap();
            assert_eq!(m.rows(), five_oracle(t).as_slice());
        }
    }

    #[test]
    fn zero_vector_evolution() {
        let m = extract_numeric_matrix(&five([29, 4, 30, 4, 1])).unwrap();
        let z = vec![MaxPlusValue::zero(); 5];
        let g1 = evolve(&m, &z, 1).unwrap();
        assert_eq!(g1, row(&[Some(29), Some(33), Some(63), Some(0), Some(64)]));
        assert_eq!(evolve(&m, &z, 0).unwrap(), z);
        let mut v = z.clone();
        for _ in 0..3 {
            v = mp_matvec(&m, &v).unwrap();
        }
        assert_eq!(evolve(&m, &z, 3).unwrap(), v);
    }

    #[test]
    fn single_self_loop() {
        let g = SdfGraph {
            name: "x".into(),
            actors: vec![actor("X", 5)],
            channels: vec![ch(0, 0, 1, 1, 1)],
            iteration: None,
        };
        let m = extract_numeric_matrix(&g).unwrap();
        assert_eq!(m.rows(), &[vec![MaxPlusValue::from_int(5)]]);
        assert_eq!(throughput_from_matrix(&m).unwrap(), frac(1, 5));
    }

    #[test]
    fn deadlock_is_reported() {
        let g = SdfGraph {
            name: "dl".into(),
            actors: vec![actor("A", 1), actor("B", 1)],
            channels: vec![ch(0, 1, 1, 1, 0), ch(1, 0, 1, 1, 0), ch(0, 0, 1, 1, 1)],
            iteration: None,
        };
        assert!(matches!(extract_numeric_matrix(&g), Err(Error::NotLive(_))));
    }

    #[test]
    fn multirate_consumption_takes_latest_token() {
        // A fires twice (serialised), B consumes both tokens at once
        let g = SdfGraph {
            name: "mr".into(),
            actors: vec![actor("A", 3), actor("B", 1)],
            channels: vec![ch(0, 0, 1, 1, 1), ch(0, 1, 1, 2, 0), ch(1, 1, 1, 1, 1)],
            iteration: None,
        };
        let m = extract_numeric_matrix(&g).unwrap();
        assert_eq!(m.rows(), &[row(&[Some(6), None]), row(&[Some(7), Some(1)])]);
    }

    #[test]
    fn scenario_combination() {
        let a = five([29, 4, 30, 4, 1]);
        let b = five([28, 20, 24, 6, 10]);
        let set = ScenarioSet {
            scenarios: vec![("a".into(), a.clone()), ("b".into(), b)],
            fsm: None,
        };
        let r = sadf_worstcase_matrix(&set).unwrap();
        assert_eq!(r.matrix.get(4, 0), &MaxPlusValue::from_int(82));
        assert_eq!(r.matrix.get(0, 0), &MaxPlusValue::from_int(29));
        assert!(r.diagnostics.is_empty());

        let single = ScenarioSet {
            scenarios: vec![("a".into(), a.clone())],
            fsm: None,
        };
        let ga = extract_numeric_matrix(&a).unwrap();
        assert_eq!(sadf_worstcase_matrix(&single).unwrap().matrix, ga);
        let dup = ScenarioSet {
            scenarios: vec![("a".into(), a.clone()), ("a2".into(), a)],
            fsm: None,
        };
        assert_eq!(sadf_worstcase_matrix(&dup).unwrap().matrix, ga);
    }

    #[test]
    fn partial_fsm_is_flagged_and_unreachable_scenarios_skipped() {
        let set = ScenarioSet {
            scenarios: vec![
                ("a".into(), five([29, 4, 30, 4, 1])),
                ("b".into(), five([28, 20, 24, 6, 10])),
            ],
            fsm: Some(Fsm {
                states: vec![("qa".into(), "a".into()), ("qb".into(), "b".into())],
                initial: "qa".into(),
                transitions: vec![("qa".into(), "qa".into())],
            }),
        };
        let r = sadf_worstcase_matrix(&set).unwrap();
        assert_eq!(r.scenario_matrices.len(), 1);
        assert_eq!(r.diagnostics.len(), 1);
        assert!(r.diagnostics[0].contains("conservative over-approximation"));
    }

    #[test]
    fn mismatched_token_sets_are_rejected() {
        let mut b = five([28, 20, 24, 6, 10]);
        b.channels[3].initial_tokens = 3;
        let set = ScenarioSet {
            scenarios: vec![("a".into(), five([29, 4, 30, 4, 1])), ("b".into(), b)],
            fsm: None,
        };
        assert!(sadf_worstcase_matrix(&set).is_err());
    }
}
