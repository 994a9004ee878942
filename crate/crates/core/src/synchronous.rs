//! Synchronous updating: every agent best-responds at once.
//!
//! [`beta`] is the exact simultaneous best response, where an agent compares
//! the count of *other* `A`-players against its temper, so agents of one type
//! split by their current strategy at the boundary values. [`beta_hat`]
//! replaces that count by the population total, which makes the next total a
//! function of the current one: `A(t+1) = F(A(t))` with `F = F^c + F^a`.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::is_equilibrium;
use crate::error::Result;
use crate::oracle::StateIndexer;
use crate::population::{PopulationSpec, State};

/// Exact synchronous best response.
pub fn beta(spec: &PopulationSpec, x: &State) -> State {
    let a = i64::from(x.a_count());
    let anti = (1..=spec.b())
        .map(|i| {
            let f = spec.anti_floor(i);
            if a <= f {
                spec.anti_count(i)
            } else if a == f + 1 {
                x.anti(i)
            } else {
                0
            }
        })
        .collect();
    let coor = (1..=spec.b_c())
        .map(|j| {
            let c = spec.coor_ceil(j);
            if a >= c + 1 {
                spec.coor_count(j)
            } else if a == c {
                spec.coor_count(j) - x.coor(j)
            } else {
                0
            }
        })
        .collect();
    State::from_parts_unchecked(anti, coor)
}

/// Synchronous best response against the population total.
pub fn beta_hat(spec: &PopulationSpec, x: &State) -> State {
    let a = i64::from(x.a_count());
    let anti = (1..=spec.b())
        .map(|i| {
            if a <= spec.anti_floor(i) {
                spec.anti_count(i)
            } else {
                0
            }
        })
        .collect();
    let coor = (1..=spec.b_c())
        .map(|j| {
            if a >= spec.coor_ceil(j) {
                spec.coor_count(j)
            } else {
                0
            }
        })
        .collect();
    State::from_parts_unchecked(anti, coor)
}

/// `F`, `F^c` and `F^a` tabulated on `0..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScalarProfile {
    pub values: Vec<u32>,
    pub coordinators: Vec<u32>,
    pub anticoordinators: Vec<u32>,
}

impl ScalarProfile {
    pub fn f(&self, a: u32) -> u32 {
        self.values[a as usize]
    }
}

pub fn f_profile(spec: &PopulationSpec) -> ScalarProfile {
    let n = spec.n() as i64;
    let coordinators: Vec<u32> = (0..=n)
        .map(|a| {
            (1..=spec.b_c())
                .filter(|&j| spec.coor_ceil(j) <= a)
                .map(|j| spec.coor_count(j))
                .sum()
        })
        .collect();
    let anticoordinators: Vec<u32> = (0..=n)
        .map(|a| {
            (1..=spec.b())
                .filter(|&i| spec.anti_floor(i) >= a)
                .map(|i| spec.anti_count(i))
                .sum()
        })
        .collect();
    let values = coordinators
        .iter()
        .zip(&anticoordinators)
        .map(|(c, a)| c + a)
        .collect();
    ScalarProfile {
        values,
        coordinators,
        anticoordinators,
    }
}

/// Limit cycles of `F` and the basin of each.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScalarCycles {
    /// Each cycle starts at its smallest value and follows `F`; cycles are
    /// listed in order of discovery from `A_0 = 0, 1, ..`.
    pub cycles: Vec<Vec<u32>>,
    /// `basin[A_0]` is the id of the cycle reached from `A_0`.
    pub basin: Vec<usize>,
}

impl ScalarCycles {
    /// Initial values attracted to cycle `id`.
    pub fn basin_of(&self, id: usize) -> Vec<u32> {
        (0..self.basin.len() as u32)
            .filter(|&a| self.basin[a as usize] == id)
            .collect()
    }

    pub fn cycle_containing(&self, a: u32) -> Option<usize> {
        self.cycles.iter().position(|c| c.contains(&a))
    }
}

/// Cycle detection on a functional graph over `0..len`, visiting starts in
/// index order. Returns cycles rotated to their smallest element and the
/// cycle id reached from each start.
fn functional_cycles(len: usize, next: impl Fn(usize) -> usize) -> (Vec<Vec<usize>>, Vec<usize>) {
    const UNSEEN: usize = usize::MAX;
    let mut target = vec![UNSEEN; len];
    let mut on_path = vec![false; len];
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    let mut path: Vec<usize> = Vec::new();
    for start in 0..len {
        if target[start] != UNSEEN {
            continue;
        }
        let mut v = start;
        while target[v] == UNSEEN && !on_path[v] {
            on_path[v] = true;
            path.push(v);
            v = next(v);
        }
        let id = if on_path[v] {
            let from = path.iter().position(|&u| u == v).expect("v is on the path");
            let mut cycle = path[from..].to_vec();
            let min_at = (0..cycle.len()).min_by_key(|&k| cycle[k]).unwrap_or(0);
            cycle.rotate_left(min_at);
            cycles.push(cycle);
            cycles.len() - 1
        } else {
            target[v]
        };
        for u in path.drain(..) {
            on_path[u] = false;
            target[u] = id;
        }
    }
    (cycles, target)
}

pub fn find_cycles_f(spec: &PopulationSpec) -> ScalarCycles {
    let profile = f_profile(spec);
    let (cycles, basin) = functional_cycles(profile.values.len(), |a| profile.values[a] as usize);
    ScalarCycles {
        cycles: cycles
            .into_iter()
            .map(|c| c.into_iter().map(|a| a as u32).collect())
            .collect(),
        basin,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleKind {
    /// A fixed point where every agent is content.
    Equilibrium,
    /// A fixed point of the counts where all agents of some boundary type
    /// trade strategies each round.
    SwapFixedPoint,
    Cycle,
}

/// A limit cycle of [`beta`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StateCycle {
    pub kind: CycleKind,
    /// Starts at the canonically smallest state and follows `beta`.
    pub states: Vec<State>,
    /// Distinct `A` values on the cycle, ascending.
    pub a_values: Vec<u32>,
    /// First analysed initial state (canonical order) that reaches the cycle.
    pub generator: State,
    /// Number of analysed initial states that reach the cycle.
    pub basin_size: u64,
}

impl StateCycle {
    fn new(spec: &PopulationSpec, states: Vec<State>, generator: State, basin_size: u64) -> Self {
        let kind = match states.as_slice() {
            [x] if is_equilibrium(spec, x) => CycleKind::Equilibrium,
            [_] => CycleKind::SwapFixedPoint,
            _ => CycleKind::Cycle,
        };
        Self {
            kind,
            a_values: a_values(&states),
            states,
            generator,
            basin_size,
        }
    }

    pub fn is_fixed_point(&self) -> bool {
        self.states.len() == 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StateCycles {
    pub initial_count: u64,
    pub cycles: Vec<StateCycle>,
}

fn a_values(states: &[State]) -> Vec<u32> {
    let mut v: Vec<u32> = states.iter().map(State::a_count).collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Limit cycles of `beta` from every state, via the indexed functional graph.
pub fn find_cycles_beta_all(spec: &PopulationSpec, cap: u128) -> Result<StateCycles> {
    let ix = StateIndexer::new(spec, cap)?;
    let next: Vec<u64> = (0..ix.len())
        .into_par_iter()
        .map(|i| ix.encode(&beta(spec, &ix.decode(i))))
        .collect();
    let (cycles, target) = functional_cycles(next.len(), |v| next[v] as usize);
    let mut sizes = vec![0u64; cycles.len()];
    let mut generators = vec![None; cycles.len()];
    for (v, &id) in target.iter().enumerate() {
        sizes[id] += 1;
        generators[id].get_or_insert(v);
    }
    let cycles = cycles
        .into_iter()
        .zip(sizes)
        .zip(generators)
        .map(|((c, basin_size), g)| {
            let states: Vec<State> = c.into_iter().map(|v| ix.decode(v as u64)).collect();
            let generator = ix.decode(g.expect("every cycle has a generator") as u64);
            StateCycle::new(spec, states, generator, basin_size)
        })
        .collect();
    Ok(StateCycles {
        initial_count: ix.len(),
        cycles,
    })
}

/// Limit cycles of `beta` from the given initial states.
pub fn find_cycles_beta(spec: &PopulationSpec, initials: &[State]) -> StateCycles {
    let mut ordered: Vec<&State> = initials.iter().collect();
    ordered.sort();
    ordered.dedup();
    let mut seen_on: HashMap<State, usize> = HashMap::new();
    let mut cycles: Vec<StateCycle> = Vec::new();
    for x0 in ordered {
        let mut orbit: HashMap<State, usize> = HashMap::new();
        let mut path: Vec<State> = Vec::new();
        let mut x = x0.clone();
        let id = loop {
            if let Some(&id) = seen_on.get(&x) {
                break id;
            }
            if let Some(&from) = orbit.get(&x) {
                let mut states = path[from..].to_vec();
                let min_at = (0..states.len()).min_by_key(|&k| &states[k]).unwrap_or(0);
                states.rotate_left(min_at);
                for s in &states {
                    seen_on.insert(s.clone(), cycles.len());
                }
                cycles.push(StateCycle::new(spec, states, x0.clone(), 0));
                break cycles.len() - 1;
            }
            orbit.insert(x.clone(), path.len());
            path.push(x.clone());
            x = beta(spec, &x);
        };
        cycles[id].basin_size += 1;
    }
    StateCycles {
        initial_count: initials.len() as u64,
        cycles,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{build_graph, DEFAULT_GRAPH_CAP};
    use crate::population::SpecSampler;
    use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn example1() -> PopulationSpec {
        PopulationSpec::from_integers(
            &[(18, 4), (9, 3), (8, 1), (7, 3)],
            &[(5, 3), (10, 2), (14, 10), (19, 1), (25, 15)],
        )
        .unwrap()
    }

    #[test]
    fn profile_example() {
        let spec = example1();
        let p = f_profile(&spec);
        assert_eq!(p.values.len(), 43);
        assert_eq!(p.f(31), 31);
        assert_eq!((p.f(9), p.f(10)), (10, 9));
        assert_eq!((p.f(16), p.f(19)), (19, 16));
        assert_eq!(p.f(0), 11);
        let expected_head = [
            11, 11, 11, 11, 11, 14, 14, 14, 11, 10, 9, 9, 9, 9, 19, 19, 19, 19, 19, 16, 16, 16, 16,
            16, 16,
        ];
        assert_eq!(&p.values[..25], &expected_head);
        assert!(p.values[25..].iter().all(|&v| v == 31));
    }

    #[test]
    fn scalar_cycles_and_basins() {
        let spec = example1();
        let r = find_cycles_f(&spec);
        assert_eq!(r.cycles, vec![vec![9, 10], vec![16, 19], vec![31]]);
        let phi1: Vec<u32> = (0..=4).chain(8..=13).collect();
        let phi2: Vec<u32> = (5..=7).chain(14..=24).collect();
        assert_eq!(r.basin_of(0), phi1);
        assert_eq!(r.basin_of(1), phi2);
        assert_eq!(r.basin_of(2), (25..=42).collect::<Vec<u32>>());
    }

    #[test]
    fn constant_map() {
        let spec = PopulationSpec::from_integers(&[(0, 0)], &[(0, 3)]);
        // A zero-count type is rejected, so use one anticoordinator who never
        // plays A once anyone else does.
        assert!(spec.is_err());
        let spec = PopulationSpec::from_integers(&[(0, 1)], &[(0, 3)]).unwrap();
        let r = find_cycles_f(&spec);
        assert_eq!(f_profile(&spec).values, vec![4, 3, 3, 3, 3]);
        assert_eq!(r.cycles, vec![vec![3]]);
        assert!(r.basin.iter().all(|&id| id == 0));
    }

    #[test]
    fn beta_examples() {
        let spec = example1();
        let x_star = State::from_canonical(&spec, &[0, 0, 0, 0, 15, 1, 10, 2, 3]).unwrap();
        assert_eq!(beta(&spec, &x_star), x_star);
        assert_eq!(beta_hat(&spec, &x_star), x_star);
        let zero = State::zeros(&spec);
        assert_eq!(
            beta(&spec, &zero),
            State::from_canonical(&spec, &[4, 3, 1, 3, 0, 0, 0, 0, 0]).unwrap()
        );
    }

    #[test]
    fn beta_limit_cycles_example() {
        let spec = example1();
        let r = find_cycles_beta_all(&spec, DEFAULT_GRAPH_CAP).unwrap();
        assert_eq!(r.initial_count, 675_840);
        let fixed: Vec<&StateCycle> = r
            .cycles
            .iter()
            .filter(|c| c.kind == CycleKind::Equilibrium)
            .collect();
        assert_eq!(fixed.len(), 1);
        assert_eq!(fixed[0].states[0].to_string(), "0,0,0,0|15,1,10,2,3");
        let swaps: Vec<String> = r
            .cycles
            .iter()
            .filter(|c| c.kind == CycleKind::SwapFixedPoint)
            .map(|c| c.states[0].to_string())
            .collect();
        assert_eq!(swaps, vec!["4,0,0,0|0,0,5,2,3", "4,2,0,0|0,0,0,1,3"]);
        let mut moving: Vec<Vec<u32>> = r
            .cycles
            .iter()
            .filter(|c| !c.is_fixed_point())
            .map(|c| c.a_values.clone())
            .collect();
        moving.sort();
        moving.dedup();
        assert_eq!(moving, vec![vec![9, 10, 12], vec![16, 19, 20]]);
        assert_eq!(r.cycles.iter().map(|c| c.basin_size).sum::<u64>(), 675_840);
        for c in &r.cycles {
            let again = find_cycles_beta(&spec, std::slice::from_ref(&c.states[0]));
            assert_eq!(again.cycles[0].states, c.states);
        }
    }

    proptest! {
        #[test]
        fn scalar_recursion_is_exact_for_beta_hat(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let spec = SpecSampler::default().sample(&mut rng);
            let p = f_profile(&spec);
            let mut by_a: HashMap<u32, State> = HashMap::new();
            for _ in 0..40 {
                let x = SpecSampler::state(&spec, &mut rng);
                let y = beta_hat(&spec, &x);
                prop_assert_eq!(y.a_count(), p.f(x.a_count()));
                if let Some(prev) = by_a.insert(x.a_count(), y.clone()) {
                    prop_assert_eq!(prev, y);
                }
            }
            let r = find_cycles_f(&spec);
            for a0 in 0..=spec.n() {
                let mut a = a0;
                for _ in 0..=spec.n() + 1 {
                    a = p.f(a);
                }
                prop_assert_eq!(r.cycle_containing(a), Some(r.basin[a0 as usize]));
            }
        }

        #[test]
        fn beta_fixed_points_are_oracle_equilibria(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let spec = SpecSampler::default().sample(&mut rng);
            let g = build_graph(&spec, DEFAULT_GRAPH_CAP).unwrap();
            let mut singletons: Vec<State> = g
                .terminal_classes()
                .into_iter()
                .filter(|c| c.len() == 1)
                .map(|c| g.state(c[0]))
                .collect();
            singletons.sort();
            let r = find_cycles_beta_all(&spec, DEFAULT_GRAPH_CAP).unwrap();
            let mut fixed: Vec<State> = r
                .cycles
                .iter()
                .filter(|c| c.kind == CycleKind::Equilibrium)
                .map(|c| c.states[0].clone())
                .collect();
            fixed.sort();
            prop_assert_eq!(fixed, singletons);
            for c in &r.cycles {
                for (k, s) in c.states.iter().enumerate() {
                    prop_assert_eq!(&beta(&spec, s), &c.states[(k + 1) % c.states.len()]);
                }
                prop_assert!(c.states.iter().all(|s| &c.states[0] <= s));
            }
        }
    }
}
