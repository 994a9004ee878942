//! Exhaustive transition graph of the asynchronous dynamics.
//!
//! Nodes are states under a mixed-radix encoding: the canonical coordinate
//! sequence `(x_1, .., x_b, x'_{b'}, .., x'_1)` is read as digits with
//! radices `n_i + 1` / `n'_j + 1`, first coordinate most significant, so node
//! order equals canonical lexicographic state order. Edges connect each state
//! to `step(x, a)` for every valid activation class `a`, self-loops included.
//!
//! Minimal positively invariant sets are exactly the terminal strongly
//! connected components, found with an explicit-stack Tarjan.

use std::collections::{HashSet, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{apply_unchecked, valid_activations, Activation};
use crate::error::{Error, Result};
use crate::invariant::CandidateSet;
use crate::population::{BenchmarkQuad, PopulationSpec, State};

pub const DEFAULT_GRAPH_CAP: u128 = 10_000_000;

/// Bijection between states and `0..len`.
#[derive(Clone, Debug)]
pub struct StateIndexer {
    b: usize,
    radices: Vec<u32>,
    strides: Vec<u64>,
    len: u64,
}

impl StateIndexer {
    pub fn new(spec: &PopulationSpec, cap: u128) -> Result<Self> {
        let size = spec.state_space_size();
        if size > cap {
            return Err(Error::CapExceeded {
                what: "state space",
                size,
                cap,
            });
        }
        let radices: Vec<u32> = (1..=spec.b())
            .map(|i| spec.anti_count(i) + 1)
            .chain((1..=spec.b_c()).rev().map(|j| spec.coor_count(j) + 1))
            .collect();
        let mut strides = vec![1u64; radices.len()];
        for k in (0..radices.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * u64::from(radices[k + 1]);
        }
        Ok(Self {
            b: spec.b(),
            radices,
            strides,
            len: size as u64,
        })
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Radices in canonical coordinate order.
    pub fn radices(&self) -> &[u32] {
        &self.radices
    }

    pub fn encode(&self, x: &State) -> u64 {
        x.canonical_iter()
            .zip(&self.strides)
            .map(|(v, s)| u64::from(v) * s)
            .sum()
    }

    pub fn decode(&self, index: u64) -> State {
        let mut rest = index;
        let digits: Vec<u32> = self
            .strides
            .iter()
            .map(|s| {
                let d = rest / s;
                rest %= s;
                d as u32
            })
            .collect();
        let anti = digits[..self.b].to_vec();
        let coor = digits[self.b..].iter().rev().copied().collect();
        State::from_parts_unchecked(anti, coor)
    }
}

/// Successor relation in compressed sparse row form.
#[derive(Clone, Debug)]
pub struct TransitionGraph {
    indexer: StateIndexer,
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

fn successors_of(spec: &PopulationSpec, indexer: &StateIndexer, x: &State) -> Vec<u32> {
    let a = i64::from(x.a_count());
    let mut out: Vec<u32> = valid_activations(spec, x)
        .iter()
        .map(|who| {
            let mut y = x.clone();
            let mut a_y = a;
            apply_unchecked(spec, &mut y, &mut a_y, who);
            indexer.encode(&y) as u32
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

impl TransitionGraph {
    pub fn build(spec: &PopulationSpec, cap: u128) -> Result<Self> {
        let indexer = StateIndexer::new(spec, cap.min(u128::from(u32::MAX)))?;
        let lists: Vec<Vec<u32>> = (0..indexer.len())
            .into_par_iter()
            .map(|i| successors_of(spec, &indexer, &indexer.decode(i)))
            .collect();
        let mut offsets = Vec::with_capacity(lists.len() + 1);
        offsets.push(0);
        let mut targets = Vec::with_capacity(lists.iter().map(Vec::len).sum());
        for l in lists {
            targets.extend_from_slice(&l);
            offsets.push(targets.len());
        }
        Ok(Self {
            indexer,
            offsets,
            targets,
        })
    }

    pub fn indexer(&self) -> &StateIndexer {
        &self.indexer
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    pub fn successors(&self, node: u32) -> &[u32] {
        let n = node as usize;
        &self.targets[self.offsets[n]..self.offsets[n + 1]]
    }

    pub fn state(&self, node: u32) -> State {
        self.indexer.decode(u64::from(node))
    }

    pub fn node(&self, x: &State) -> u32 {
        self.indexer.encode(x) as u32
    }

    /// Strongly connected components as a component id per node, ids in
    /// order of completion.
    pub fn strongly_connected_components(&self) -> (Vec<u32>, usize) {
        const UNSEEN: u32 = u32::MAX;
        let n = self.node_count();
        let mut index = vec![UNSEEN; n];
        let mut low = vec![0u32; n];
        let mut on_stack = vec![false; n];
        let mut comp = vec![UNSEEN; n];
        let mut stack: Vec<u32> = Vec::new();
        // (node, position of the next successor to visit)
        let mut call: Vec<(u32, usize)> = Vec::new();
        let mut next_index = 0u32;
        let mut comps = 0usize;
        for root in 0..n as u32 {
            if index[root as usize] != UNSEEN {
                continue;
            }
            call.push((root, 0));
            index[root as usize] = next_index;
            low[root as usize] = next_index;
            next_index += 1;
            stack.push(root);
            on_stack[root as usize] = true;
            while let Some(&mut (v, ref mut pos)) = call.last_mut() {
                let succ = self.successors(v);
                if let Some(&w) = succ.get(*pos) {
                    *pos += 1;
                    let wu = w as usize;
                    if index[wu] == UNSEEN {
                        index[wu] = next_index;
                        low[wu] = next_index;
                        next_index += 1;
                        stack.push(w);
                        on_stack[wu] = true;
                        call.push((w, 0));
                    } else if on_stack[wu] {
                        low[v as usize] = low[v as usize].min(index[wu]);
                    }
                    continue;
                }
                call.pop();
                let vu = v as usize;
                if let Some(&(parent, _)) = call.last() {
                    low[parent as usize] = low[parent as usize].min(low[vu]);
                }
                if low[vu] == index[vu] {
                    loop {
                        let w = stack.pop().expect("tarjan stack holds v");
                        on_stack[w as usize] = false;
                        comp[w as usize] = comps as u32;
                        if w == v {
                            break;
                        }
                    }
                    comps += 1;
                }
            }
        }
        (comp, comps)
    }

    /// Terminal components as sorted node lists, ordered by smallest node.
    pub fn terminal_classes(&self) -> Vec<Vec<u32>> {
        let (comp, count) = self.strongly_connected_components();
        let mut terminal = vec![true; count];
        for v in 0..self.node_count() as u32 {
            let c = comp[v as usize];
            if self.successors(v).iter().any(|&w| comp[w as usize] != c) {
                terminal[c as usize] = false;
            }
        }
        let mut classes: Vec<Vec<u32>> = vec![Vec::new(); count];
        for v in 0..self.node_count() as u32 {
            let c = comp[v as usize] as usize;
            if terminal[c] {
                classes[c].push(v);
            }
        }
        let mut out: Vec<Vec<u32>> = classes.into_iter().filter(|c| !c.is_empty()).collect();
        out.sort_by_key(|c| c[0]);
        out
    }
}

pub fn build_graph(spec: &PopulationSpec, cap: u128) -> Result<TransitionGraph> {
    TransitionGraph::build(spec, cap)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SetKind {
    Equilibrium,
    Oscillatory,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchKind {
    Equal,
    Contained,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CandidateMatch {
    pub benchmarks: BenchmarkQuad,
    pub kind: MatchKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinimalSet {
    pub kind: SetKind,
    /// Canonical order.
    pub members: Vec<State>,
    /// The tightest characterized set equal to or containing this one.
    pub matched_candidate: Option<CandidateMatch>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinimalSetReport {
    pub node_count: usize,
    pub edge_count: usize,
    pub sets: Vec<MinimalSet>,
}

impl MinimalSetReport {
    pub fn unmatched(&self) -> impl Iterator<Item = &MinimalSet> {
        self.sets.iter().filter(|s| s.matched_candidate.is_none())
    }
}

/// Terminal classes of the transition graph, matched against `candidates`.
pub fn minimal_invariant_sets(
    spec: &PopulationSpec,
    graph: &TransitionGraph,
    candidates: &[CandidateSet],
) -> MinimalSetReport {
    let sets = graph
        .terminal_classes()
        .into_iter()
        .map(|nodes| {
            let members: Vec<State> = nodes.iter().map(|&v| graph.state(v)).collect();
            let matched_candidate = match_candidate(spec, &members, candidates);
            MinimalSet {
                kind: if members.len() == 1 {
                    SetKind::Equilibrium
                } else {
                    SetKind::Oscillatory
                },
                members,
                matched_candidate,
            }
        })
        .collect();
    MinimalSetReport {
        node_count: graph.node_count(),
        edge_count: graph.edge_count(),
        sets,
    }
}

fn match_candidate(
    spec: &PopulationSpec,
    members: &[State],
    candidates: &[CandidateSet],
) -> Option<CandidateMatch> {
    candidates
        .iter()
        .filter(|c| members.iter().all(|x| c.contains(spec, x)))
        .min_by_key(|c| c.member_count)
        .map(|c| CandidateMatch {
            benchmarks: c.benchmarks,
            kind: if c.member_count == members.len() as u128 {
                MatchKind::Equal
            } else {
                MatchKind::Contained
            },
        })
}

/// A single activation leaving a state set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Escape {
    pub from: State,
    pub activation: Activation,
    pub to: State,
}

/// Closure check; returns the first escape in canonical member order.
pub fn is_invariant(spec: &PopulationSpec, members: &[State]) -> std::result::Result<(), Escape> {
    let inside: HashSet<&State> = members.iter().collect();
    let mut ordered: Vec<&State> = members.iter().collect();
    ordered.sort();
    for x in ordered {
        let a = i64::from(x.a_count());
        for who in valid_activations(spec, x) {
            let mut y = x.clone();
            let mut a_y = a;
            apply_unchecked(spec, &mut y, &mut a_y, &who);
            if !inside.contains(&y) {
                return Err(Escape {
                    from: x.clone(),
                    activation: who,
                    to: y,
                });
            }
        }
    }
    Ok(())
}

/// Forward-reachable states from `x0`, in canonical order.
pub fn reach_closure(spec: &PopulationSpec, x0: &State, cap: u128) -> Result<Vec<State>> {
    let mut seen: HashSet<State> = HashSet::from([x0.clone()]);
    let mut queue = VecDeque::from([x0.clone()]);
    while let Some(x) = queue.pop_front() {
        let a = i64::from(x.a_count());
        for who in valid_activations(spec, &x) {
            let mut y = x.clone();
            let mut a_y = a;
            apply_unchecked(spec, &mut y, &mut a_y, &who);
            if !seen.contains(&y) {
                if seen.len() as u128 >= cap {
                    return Err(Error::CapExceeded {
                        what: "reachable set",
                        size: seen.len() as u128 + 1,
                        cap,
                    });
                }
                seen.insert(y.clone());
                queue.push_back(y);
            }
        }
    }
    let mut out: Vec<State> = seen.into_iter().collect();
    out.sort();
    Ok(out)
}
