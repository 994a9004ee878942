//! Stability of positively invariant sets under unit perturbations.
//!
//! A set is stable when every trajectory starting at L1 distance one from it
//! stays within distance one; by induction it suffices to look at a single
//! step. Three deciders are provided: the seven-statement characterization
//! ([`check_proposition`]), its two-clause simplification when the set has both
//! an `A`-fixed and a `B`-fixed type ([`check_theorem`]), and the exhaustive
//! one-step scan over all adjacent states ([`verify_one_step`]).

use std::collections::HashSet;

use serde::Serialize;

use crate::dynamics::{step, valid_activations, Activation};
use crate::error::{Error, Result};
use crate::invariant::condition_rows;
use crate::population::{BenchmarkQuad, PopulationSpec, Role, State};

/// Default limit on `members * coordinates` for the one-step scan.
pub const DEFAULT_NEIGHBOUR_CAP: u128 = 50_000_000;

/// L1 distance from `x` to the nearest member.
pub fn set_distance(x: &State, members: &[State]) -> Result<u32> {
    members
        .iter()
        .map(|m| x.l1_distance(m))
        .min()
        .ok_or(Error::EmptySet)
}

/// Wandering anticoordinator types where the upper (`l`) or lower (`r`)
/// membership condition holds with equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EqualityIndexSets {
    pub l: Vec<usize>,
    pub r: Vec<usize>,
}

impl EqualityIndexSets {
    /// `|L ∩ [lo, hi]|`.
    fn l_in(&self, lo: usize, hi: usize) -> usize {
        self.l.iter().filter(|&&i| lo <= i && i <= hi).count()
    }

    /// `|R ∩ [lo, hi]|`.
    fn r_in(&self, lo: usize, hi: usize) -> usize {
        self.r.iter().filter(|&&i| lo <= i && i <= hi).count()
    }
}

fn require_member(spec: &PopulationSpec, bm: &BenchmarkQuad, z: &State) -> Result<()> {
    bm.check_omega(spec)?;
    if crate::invariant::is_member(spec, bm, z) {
        Ok(())
    } else {
        Err(Error::NotAMember(z.clone()))
    }
}

pub fn lr_index_sets(
    spec: &PopulationSpec,
    bm: &BenchmarkQuad,
    z: &State,
) -> Result<EqualityIndexSets> {
    require_member(spec, bm, z)?;
    Ok(index_sets_unchecked(spec, bm, z))
}

fn index_sets_unchecked(spec: &PopulationSpec, bm: &BenchmarkQuad, z: &State) -> EqualityIndexSets {
    let mut sets = EqualityIndexSets::default();
    for row in condition_rows(spec, bm, z) {
        if row.upper_lhs == row.bound {
            sets.l.push(row.i);
        }
        if row.lower_lhs == row.bound {
            sets.r.push(row.i);
        }
    }
    sets
}

/// Per-member type markers. Empty maxima default to `p`, empty minima to `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StateMarkers {
    /// Largest wandering type not fully playing `A`.
    pub z_e: usize,
    /// Smallest wandering type with an `A`-player.
    pub z_f: usize,
    pub z_w: u32,
    pub n_w: u32,
    /// Largest wandering type whose `B`-players switch to `A` one step after
    /// a unit of `A` is added.
    pub w_a: usize,
    /// Smallest wandering type whose `A`-players switch to `B` one step after
    /// a unit of `A` is added.
    pub w_b: usize,
    /// As `w_a`, one step after a unit of `A` is removed.
    pub v_a: usize,
    /// As `w_b`, one step after a unit of `A` is removed.
    pub v_b: usize,
    /// Whether forcing `(w_a, w_b) = (p, q)` when `z_w = n_w`, or
    /// `(v_a, v_b) = (p, q)` when `z_w = 0`, would change a marker. Markers are
    /// always computed from their defining sets; forcing them hides escapes
    /// through perturbations of fixed types.
    pub edge_override: bool,
}

pub fn markers(spec: &PopulationSpec, bm: &BenchmarkQuad, z: &State) -> Result<StateMarkers> {
    require_member(spec, bm, z)?;
    Ok(markers_unchecked(spec, bm, z))
}

fn markers_unchecked(spec: &PopulationSpec, bm: &BenchmarkQuad, z: &State) -> StateMarkers {
    let (p, q) = (bm.p, bm.q);
    let a = i64::from(z.a_count());
    let wandering = || bm.anti_wandering();
    let not_full = |i: usize| z.anti(i) < spec.anti_count(i);
    let nonzero = |i: usize| z.anti(i) > 0;
    let fl = |i: usize| spec.anti_floor(i);

    let z_e = wandering().filter(|&i| not_full(i)).max().unwrap_or(p);
    let z_f = wandering().filter(|&i| nonzero(i)).min().unwrap_or(q);
    let z_w: u32 = wandering().map(|i| z.anti(i)).sum();
    let n_w: u32 = wandering().map(|i| spec.anti_count(i)).sum();

    let w_b = wandering()
        .filter(|&i| nonzero(i) && a > fl(i))
        .min()
        .unwrap_or(q);
    let w_a = wandering()
        .filter(|&i| not_full(i) && a <= fl(i) - 1)
        .max()
        .unwrap_or(p);
    let v_b = wandering()
        .filter(|&i| nonzero(i) && a > fl(i) + 2)
        .min()
        .unwrap_or(q);
    let v_a = wandering()
        .filter(|&i| not_full(i) && a <= fl(i) + 1)
        .max()
        .unwrap_or(p);
    let edge_override = (z_w == n_w && w_b != q) || (z_w == 0 && v_a != p);
    StateMarkers {
        z_e,
        z_f,
        z_w,
        n_w,
        w_a,
        w_b,
        v_a,
        v_b,
        edge_override,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Theorem,
    Proposition,
    OneStep,
}

/// A perturbed start state, the activation applied to it, and where it lands.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Perturbation {
    pub start: State,
    pub activation: Activation,
    pub result: State,
    pub distance: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClauseCount {
    pub clause: String,
    /// Members where the clause's guard held.
    pub applicable: usize,
    pub passed: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilityVerdict {
    pub method: Method,
    pub stable: bool,
    pub failing_condition: Option<String>,
    /// The first failing member (analytic methods) or perturbed start state.
    pub witness_state: Option<State>,
    pub witness_perturbation: Option<Perturbation>,
    pub clause_counts: Vec<ClauseCount>,
    pub members_checked: usize,
    /// Members where the `z_w` edge-case override would change a marker.
    pub edge_override_members: usize,
}

fn require_separation(spec: &PopulationSpec) -> Result<()> {
    if spec.separation_assumption() {
        Ok(())
    } else {
        let floors: Vec<String> = (1..=spec.b())
            .map(|i| spec.anti_floor(i).to_string())
            .collect();
        Err(Error::SeparationAssumption(format!(
            "anticoordinator temper floors ({}) are not strictly descending",
            floors.join(",")
        )))
    }
}

fn sorted_members(members: &[State]) -> Result<Vec<&State>> {
    if members.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut v: Vec<&State> = members.iter().collect();
    v.sort();
    Ok(v)
}

/// Outcome of each of the seven statements at one member; `None` when the
/// statement's guard does not apply.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropositionRow {
    pub z: State,
    pub markers: StateMarkers,
    pub index_sets: EqualityIndexSets,
    pub outcomes: [Option<bool>; 7],
}

/// Full per-member condition matrix of the seven-statement characterization.
pub fn proposition_matrix(
    spec: &PopulationSpec,
    bm: &BenchmarkQuad,
    members: &[State],
) -> Result<Vec<PropositionRow>> {
    spec.require_threshold_only()?;
    require_separation(spec)?;
    bm.check_omega(spec)?;
    let ordered = sorted_members(members)?;
    let (p, q, q_c, p_c) = (bm.p, bm.q, bm.q_c, bm.p_c);
    let has_b_fixed = q + q_c <= spec.b() + spec.b_c() + 1;
    let has_a_fixed = p + p_c >= 1;
    let mut rows = Vec::with_capacity(ordered.len());
    for z in ordered {
        require_member(spec, bm, z)?;
        let m = markers_unchecked(spec, bm, z);
        let s = index_sets_unchecked(spec, bm, z);
        let a = i64::from(z.a_count());
        let mut out = [None; 7];

        if a == spec.anti_floor(p) + 1 || a == spec.coor_ceil(q_c) - 1 {
            out[0] = Some(s.l_in(p + 1, m.z_e) == 0);
        }
        if a == spec.anti_floor(q) + 1 || a == spec.coor_ceil(p_c) + 1 {
            out[1] = Some(s.r_in(m.z_f, q.saturating_sub(1)) == 0 || m.z_f >= q);
        }
        if has_b_fixed {
            let window = a <= spec.anti_floor(p).min(spec.coor_ceil(q_c) - 2);
            out[2] = Some(window && (m.w_b >= q || s.r_in(m.w_b, q - 1) == 0));
        }
        if has_a_fixed {
            let window = a >= (spec.anti_floor(q) + 2).max(spec.coor_ceil(p_c) + 2);
            out[3] = Some(window && s.l_in(p + 1, m.v_a) == 0);
        }
        if m.z_w < m.n_w || m.z_w > 0 {
            let mut ok = true;
            if m.z_w < m.n_w && m.w_b < m.z_e {
                ok &= s.r_in(m.w_b, m.z_e - 1) * s.l_in(m.w_b + 1, m.z_e) == 0;
            }
            if m.z_w > 0 && m.z_f < m.v_a {
                ok &= s.r_in(m.z_f, m.v_a - 1) * s.l_in(m.z_f + 1, m.v_a) == 0;
            }
            out[4] = Some(ok);
        }
        if m.z_w + 1 < m.n_w || has_b_fixed {
            out[5] = Some(s.l_in(p + 1, m.w_a) == 0);
        }
        if m.z_w > 1 || has_a_fixed {
            out[6] = Some(m.v_b >= q || s.r_in(m.v_b, q - 1) == 0);
        }
        rows.push(PropositionRow {
            z: z.clone(),
            markers: m,
            index_sets: s,
            outcomes: out,
        });
    }
    Ok(rows)
}

fn clause_counts(
    labels: &[&str],
    outcomes: impl Iterator<Item = Vec<Option<bool>>>,
) -> Vec<ClauseCount> {
    let mut counts: Vec<ClauseCount> = labels
        .iter()
        .map(|l| ClauseCount {
            clause: (*l).to_string(),
            applicable: 0,
            passed: 0,
        })
        .collect();
    for row in outcomes {
        for (c, o) in counts.iter_mut().zip(row) {
            if let Some(ok) = o {
                c.applicable += 1;
                c.passed += usize::from(ok);
            }
        }
    }
    counts
}

/// Stable iff all seven statements hold at every member. Members are scanned
/// in canonical order and statements in order 1..=7; the first failure is
/// reported.
pub fn check_proposition(
    spec: &PopulationSpec,
    bm: &BenchmarkQuad,
    members: &[State],
) -> Result<StabilityVerdict> {
    let rows = proposition_matrix(spec, bm, members)?;
    let labels = ["1", "2", "3", "4", "5", "6", "7"];
    let first = rows.iter().find_map(|row| {
        row.outcomes
            .iter()
            .position(|o| *o == Some(false))
            .map(|k| (row, k))
    });
    Ok(StabilityVerdict {
        method: Method::Proposition,
        stable: first.is_none(),
        failing_condition: first.map(|(_, k)| format!("statement {}", k + 1)),
        witness_state: first.map(|(row, _)| row.z.clone()),
        witness_perturbation: None,
        clause_counts: clause_counts(&labels, rows.iter().map(|r| r.outcomes.to_vec())),
        members_checked: rows.len(),
        edge_override_members: rows.iter().filter(|r| r.markers.edge_override).count(),
    })
}

/// The `A` window `[max{floor(tau_q), ceil(tau'_{p'})} + 2, min{floor(tau_p), ceil(tau'_{q'}) - 2}]`.
pub fn theorem_window(spec: &PopulationSpec, bm: &BenchmarkQuad) -> (i64, i64) {
    (
        spec.anti_floor(bm.q).max(spec.coor_ceil(bm.p_c)) + 2,
        spec.anti_floor(bm.p).min(spec.coor_ceil(bm.q_c) - 2),
    )
}

/// Two-clause test, valid when the set has an `A`-fixed and a `B`-fixed type.
pub fn check_theorem(
    spec: &PopulationSpec,
    bm: &BenchmarkQuad,
    members: &[State],
) -> Result<StabilityVerdict> {
    spec.require_threshold_only()?;
    bm.check_omega(spec)?;
    if bm.p + bm.p_c < 1 || bm.q + bm.q_c > spec.b() + spec.b_c() + 1 {
        return Err(Error::TheoremGuards(*bm));
    }
    require_separation(spec)?;
    let ordered = sorted_members(members)?;
    let (lo, hi) = theorem_window(spec, bm);
    let mut outcomes = Vec::with_capacity(ordered.len());
    let mut first: Option<(&State, &str)> = None;
    let mut edge_override_members = 0;
    for z in &ordered {
        require_member(spec, bm, z)?;
        let m = markers_unchecked(spec, bm, z);
        let s = index_sets_unchecked(spec, bm, z);
        edge_override_members += usize::from(m.edge_override);
        let a = i64::from(z.a_count());
        let window = lo <= a && a <= hi;
        let sets = s.l_in(bm.p + 1, m.v_a) == 0 && (m.w_b >= bm.q || s.r_in(m.w_b, bm.q - 1) == 0);
        if first.is_none() {
            if !window {
                first = Some((z, "A window"));
            } else if !sets {
                first = Some((z, "index sets"));
            }
        }
        outcomes.push(vec![Some(window), Some(sets)]);
    }
    Ok(StabilityVerdict {
        method: Method::Theorem,
        stable: first.is_none(),
        failing_condition: first.map(|(_, c)| c.to_string()),
        witness_state: first.map(|(z, _)| (*z).clone()),
        witness_perturbation: None,
        clause_counts: clause_counts(&["A window", "index sets"], outcomes.into_iter()),
        members_checked: ordered.len(),
        edge_override_members,
    })
}

/// States at distance exactly one from the set, in canonical order.
pub fn adjacent_states(spec: &PopulationSpec, members: &[State], cap: u128) -> Result<Vec<State>> {
    if members.is_empty() {
        return Err(Error::EmptySet);
    }
    let dims = (spec.b() + spec.b_c()) as u128;
    let size = members.len() as u128 * dims * 2;
    if size > cap {
        return Err(Error::CapExceeded {
            what: "neighbour enumeration",
            size,
            cap,
        });
    }
    let inside: HashSet<&State> = members.iter().collect();
    let mut out: HashSet<State> = HashSet::new();
    for z in members {
        for role in [Role::Anticoordinator, Role::Coordinator] {
            for ty in 1..=spec.type_count(role) {
                let v = z.get(role, ty);
                for nv in [
                    v.checked_sub(1),
                    (v < spec.count(role, ty)).then_some(v + 1),
                ]
                .into_iter()
                .flatten()
                {
                    let mut x = z.clone();
                    *x.slot_mut(role, ty) = nv;
                    if !inside.contains(&x) {
                        out.insert(x);
                    }
                }
            }
        }
    }
    let mut v: Vec<State> = out.into_iter().collect();
    v.sort();
    Ok(v)
}

/// Exhaustive check of the definition: every activation at every adjacent
/// state must land within distance one. Works for any member set.
pub fn verify_one_step(
    spec: &PopulationSpec,
    members: &[State],
    cap: u128,
) -> Result<StabilityVerdict> {
    let adjacent = adjacent_states(spec, members, cap)?;
    let inside: HashSet<&State> = members.iter().chain(&adjacent).collect();
    let mut checked = 0usize;
    let mut witness = None;
    // Stops at the first escape, so `passed` falls short of `applicable` by one on failure.
    'scan: for x0 in &adjacent {
        for who in valid_activations(spec, x0) {
            checked += 1;
            let x1 = step(spec, x0, &who)?;
            if !inside.contains(&x1) {
                witness = Some(Perturbation {
                    distance: set_distance(&x1, members)?,
                    start: x0.clone(),
                    activation: who,
                    result: x1,
                });
                break 'scan;
            }
        }
    }
    let escaped = witness.is_some();
    Ok(StabilityVerdict {
        method: Method::OneStep,
        stable: witness.is_none(),
        failing_condition: witness.as_ref().map(|_| "one-step escape".to_string()),
        witness_state: witness.as_ref().map(|w| w.start.clone()),
        witness_perturbation: witness,
        clause_counts: vec![ClauseCount {
            clause: "adjacent transitions".to_string(),
            applicable: checked,
            passed: checked - usize::from(escaped),
        }],
        members_checked: members.len(),
        edge_override_members: 0,
    })
}

/// Runs the requested method.
pub fn check(
    spec: &PopulationSpec,
    bm: &BenchmarkQuad,
    members: &[State],
    method: Method,
    cap: u128,
) -> Result<StabilityVerdict> {
    match method {
        Method::Theorem => check_theorem(spec, bm, members),
        Method::Proposition => check_proposition(spec, bm, members),
        Method::OneStep => verify_one_step(spec, members, cap),
    }
}
