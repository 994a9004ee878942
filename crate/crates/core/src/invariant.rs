//! Candidate positively invariant sets `I_{p,q,q',p'}` and their construction
//! from acceptable `(r, delta)` pairs.
//!
//! A set is described by a [`BenchmarkQuad`]: fixed blocks are saturated or
//! empty, wandering coordinators are free, and wandering anticoordinators obey
//! the upper condition (suffix sums never exceed `floor(tau_i) + 1`) and the
//! lower condition (the prefix-filled count never falls below it).

use serde::Serialize;

use crate::dynamics::{sweep_anti_lr_from, sweep_anti_rl, sweep_coor_lr, sweep_coor_rl};
use crate::error::{Error, Result};
use crate::population::{tight_benchmarks, BenchmarkQuad, PopulationSpec, State};

/// Default limit on the number of candidate states an enumeration may visit.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;

/// `Delta(r)`: every `delta` with `tau'_delta + 1 <= N_r + N'_delta <= tau_r + 1`.
pub fn delta_set(spec: &PopulationSpec, r: usize) -> Result<Vec<usize>> {
    if r > spec.b() {
        return Err(Error::IndexOutOfRange {
            what: "r",
            index: r,
            lo: 0,
            hi: spec.b(),
        });
    }
    let upper = spec.anti_floor(r) + 1;
    Ok((0..=spec.b_c())
        .filter(|&delta| {
            let total = i64::from(spec.anti_prefix(r) + spec.coor_prefix(delta));
            spec.coor_ceil(delta) + 1 <= total && total <= upper
        })
        .collect())
}

/// `y^{r,delta}`: anticoordinator types `1..=r` and coordinator types
/// `1..=delta` play `A`, everyone else `B`.
pub fn construction_state(spec: &PopulationSpec, r: usize, delta: usize) -> State {
    let anti = (1..=spec.b())
        .map(|i| if i <= r { spec.anti_count(i) } else { 0 })
        .collect();
    let coor = (1..=spec.b_c())
        .map(|j| if j <= delta { spec.coor_count(j) } else { 0 })
        .collect();
    State::from_parts_unchecked(anti, coor)
}

/// The six states of the construction for one `(r, delta)` pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Construction {
    pub y: State,
    pub y_hat: State,
    pub y_tilde: State,
    pub z: State,
    pub z_hat: State,
    pub z_tilde: State,
}

/// Outcome of testing one `(r, delta)` with `delta in Delta(r)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PsiCandidate {
    pub r: usize,
    pub delta: usize,
    /// `A` after the anticoordinator then coordinator right-to-left sweeps.
    pub a_total: u32,
    /// Whether `tau_{r+1} < a_total <= tau_r + 1`.
    pub accepted: bool,
    pub benchmarks: BenchmarkQuad,
    /// Number of states of the resulting set.
    pub member_count: u128,
    pub construction: Construction,
}

fn construct(spec: &PopulationSpec, r: usize, delta: usize) -> (Construction, BenchmarkQuad) {
    let y = construction_state(spec, r, delta);
    let y_hat = sweep_anti_rl(spec, &y).final_state;
    let y_tilde = sweep_coor_rl(spec, &y_hat).final_state;
    let eta = tight_benchmarks(spec, &y_hat).q;
    let sigma_c = tight_benchmarks(spec, &y_tilde).q_c;
    let anti = (1..=spec.b())
        .map(|i| if i < eta { spec.anti_count(i) } else { 0 })
        .collect();
    let coor = (1..=spec.b_c())
        .map(|j| if j < sigma_c { spec.coor_count(j) } else { 0 })
        .collect();
    let z = State::from_parts_unchecked(anti, coor);
    let z_hat = if r < spec.b() {
        sweep_anti_lr_from(spec, &z, r + 1)
            .expect("start type in range")
            .final_state
    } else {
        z.clone()
    };
    let z_tilde = sweep_coor_lr(spec, &z_hat).final_state;
    let zeta_c = tight_benchmarks(spec, &z_tilde).p_c;
    (
        Construction {
            y,
            y_hat,
            y_tilde,
            z,
            z_hat,
            z_tilde,
        },
        BenchmarkQuad::new(r, eta, sigma_c, zeta_c),
    )
}

/// Every `(r, delta)` with `delta in Delta(r)`, in `(r, delta)` order, with the
/// acceptance test evaluated.
pub fn psi_candidates(spec: &PopulationSpec) -> Result<Vec<PsiCandidate>> {
    spec.require_threshold_only()?;
    let mut out = Vec::new();
    for r in 0..=spec.b() {
        for delta in delta_set(spec, r)? {
            let (construction, benchmarks) = construct(spec, r, delta);
            let a_total = construction.y_tilde.a_count();
            let a = i64::from(a_total);
            let accepted = spec.anti_floor(r + 1) < a && a <= spec.anti_floor(r) + 1;
            let member_count = if benchmarks.in_omega(spec) {
                count_members(spec, &benchmarks)?
            } else {
                0
            };
            out.push(PsiCandidate {
                r,
                delta,
                a_total,
                accepted,
                benchmarks,
                member_count,
                construction,
            });
        }
    }
    Ok(out)
}

/// Acceptable pairs whose set is nonempty, sorted by `(r, delta)`.
///
/// A pair can pass the acceptance test and still produce an empty set when
/// the sentinel `tau'_0` admits `delta = 0`; such pairs are reported by
/// [`psi_candidates`] but left out here.
pub fn psi_set(spec: &PopulationSpec) -> Result<Vec<(usize, usize)>> {
    Ok(psi_candidates(spec)?
        .into_iter()
        .filter(|c| c.accepted && c.member_count > 0)
        .map(|c| (c.r, c.delta))
        .collect())
}

/// Benchmarks and witness states for an acceptable pair.
pub fn benchmarks(spec: &PopulationSpec, r: usize, delta: usize) -> Result<CandidateSet> {
    spec.require_threshold_only()?;
    if !delta_set(spec, r)?.contains(&delta) {
        return Err(Error::NotAcceptable(r, delta));
    }
    let (construction, quad) = construct(spec, r, delta);
    let a = i64::from(construction.y_tilde.a_count());
    if !(spec.anti_floor(r + 1) < a && a <= spec.anti_floor(r) + 1) {
        return Err(Error::NotAcceptable(r, delta));
    }
    quad.check_omega(spec)?;
    Ok(CandidateSet {
        generators: vec![(r, delta)],
        benchmarks: quad,
        a_bounds: a_bounds(spec, &quad),
        member_count: count_members(spec, &quad)?,
        construction,
        members: None,
    })
}

/// Left-hand sides of both conditions at one wandering type `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionRow {
    pub i: usize,
    /// `sum_{k<=p'} n'_k + sum_{k<=p} n_k + sum_{k=i}^{q-1} x_k`; must be `<= bound`.
    pub upper_lhs: i64,
    /// `sum_{k<q'} n'_k + sum_{k<=p} n_k + sum_{k=p+1}^{i} x_k + sum_{k=i+1}^{q-1} n_k`; must be `>= bound`.
    pub lower_lhs: i64,
    /// `floor(tau_i) + 1`.
    pub bound: i64,
}

impl ConditionRow {
    pub fn holds(&self) -> bool {
        self.upper_lhs <= self.bound && self.lower_lhs >= self.bound
    }
}

/// Evaluates both conditions at every wandering anticoordinator type.
pub fn condition_rows(spec: &PopulationSpec, bm: &BenchmarkQuad, x: &State) -> Vec<ConditionRow> {
    let base_upper = i64::from(spec.coor_prefix(bm.p_c) + spec.anti_prefix(bm.p));
    let base_lower = i64::from(spec.coor_prefix(bm.q_c - 1) + spec.anti_prefix(bm.p));
    let wandering: Vec<usize> = bm.anti_wandering().collect();
    let mut suffix_x = 0i64;
    let mut suffix_n = 0i64;
    let mut rows = Vec::with_capacity(wandering.len());
    // Walk from q-1 down so suffix sums accumulate; prefix sums follow from the totals.
    let total_x: i64 = wandering.iter().map(|&i| i64::from(x.anti(i))).sum();
    for &i in wandering.iter().rev() {
        let prefix_x_through_i = total_x - suffix_x;
        suffix_x += i64::from(x.anti(i));
        rows.push(ConditionRow {
            i,
            upper_lhs: base_upper + suffix_x,
            lower_lhs: base_lower + prefix_x_through_i + suffix_n,
            bound: spec.anti_floor(i) + 1,
        });
        suffix_n += i64::from(spec.anti_count(i));
    }
    rows.reverse();
    rows
}

/// Whether `x` belongs to `I_{p,q,q',p'}`.
pub fn membership(spec: &PopulationSpec, bm: &BenchmarkQuad, x: &State) -> Result<bool> {
    bm.check_omega(spec)?;
    Ok(is_member(spec, bm, x))
}

pub(crate) fn is_member(spec: &PopulationSpec, bm: &BenchmarkQuad, x: &State) -> bool {
    bm.fixes(spec, x) && condition_rows(spec, bm, x).iter().all(ConditionRow::holds)
}

/// Number of states the enumeration visits: the product of wandering ranges.
pub fn enumeration_size(spec: &PopulationSpec, bm: &BenchmarkQuad) -> u128 {
    bm.anti_wandering()
        .map(|i| u128::from(spec.anti_count(i)) + 1)
        .chain(
            bm.coor_wandering()
                .map(|j| u128::from(spec.coor_count(j)) + 1),
        )
        .product()
}

/// All members in canonical lexicographic order.
pub fn enumerate_set(spec: &PopulationSpec, bm: &BenchmarkQuad, cap: u128) -> Result<Vec<State>> {
    bm.check_omega(spec)?;
    let size = enumeration_size(spec, bm);
    if size > cap {
        return Err(Error::CapExceeded {
            what: "set enumeration",
            size,
            cap,
        });
    }
    let mut base = construction_state(spec, bm.p, bm.p_c);
    let anti_types: Vec<usize> = bm.anti_wandering().collect();
    let mut anti_parts = Vec::new();
    odometer(
        &anti_types
            .iter()
            .map(|&i| spec.anti_count(i))
            .collect::<Vec<_>>(),
        |digits| {
            for (&i, &d) in anti_types.iter().zip(digits) {
                *base.slot_mut(crate::population::Role::Anticoordinator, i) = d;
            }
            if condition_rows(spec, bm, &base)
                .iter()
                .all(ConditionRow::holds)
            {
                anti_parts.push(digits.to_vec());
            }
        },
    );
    // Canonical order lists coordinators from type b' down to 1.
    let coor_types: Vec<usize> = bm.coor_wandering().rev().collect();
    let coor_radix: Vec<u32> = coor_types.iter().map(|&j| spec.coor_count(j)).collect();
    let mut members = Vec::new();
    for part in &anti_parts {
        for (&i, &d) in anti_types.iter().zip(part) {
            *base.slot_mut(crate::population::Role::Anticoordinator, i) = d;
        }
        odometer(&coor_radix, |digits| {
            let mut x = base.clone();
            for (&j, &d) in coor_types.iter().zip(digits) {
                *x.slot_mut(crate::population::Role::Coordinator, j) = d;
            }
            members.push(x);
        });
    }
    Ok(members)
}

/// Visits every digit vector with `0 <= d[k] <= max[k]` in lexicographic order.
fn odometer(max: &[u32], mut visit: impl FnMut(&[u32])) {
    let mut digits = vec![0u32; max.len()];
    loop {
        visit(&digits);
        let mut k = max.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            if digits[k] < max[k] {
                digits[k] += 1;
                break;
            }
            digits[k] = 0;
        }
    }
}

/// Exact member count without enumeration.
///
/// For a fixed wandering total `W`, the upper condition at `i` bounds the
/// suffix sum `S_i` and the lower condition at `i` bounds `W - S_{i+1}`, so a
/// dynamic program over suffix sums counts the admissible anticoordinator
/// parts. Wandering coordinators multiply the count freely.
pub fn count_members(spec: &PopulationSpec, bm: &BenchmarkQuad) -> Result<u128> {
    bm.check_omega(spec)?;
    let coor_free: u128 = bm
        .coor_wandering()
        .map(|j| u128::from(spec.coor_count(j)) + 1)
        .product();
    let types: Vec<usize> = bm.anti_wandering().rev().collect();
    if types.is_empty() {
        return Ok(coor_free);
    }
    let base_upper = i64::from(spec.coor_prefix(bm.p_c) + spec.anti_prefix(bm.p));
    let base_lower = i64::from(spec.coor_prefix(bm.q_c - 1) + spec.anti_prefix(bm.p));
    let max_total: usize = types.iter().map(|&i| spec.anti_count(i) as usize).sum();
    let mut anti_count: u128 = 0;
    for w in 0..=max_total {
        // ways[s] = number of suffix assignments with sum s so far.
        let mut ways = vec![0u128; w + 1];
        ways[0] = 1;
        let mut suffix_n = 0i64;
        for &i in &types {
            let bound = spec.anti_floor(i) + 1;
            let mut next = vec![0u128; w + 1];
            for (s_prev, &count) in ways.iter().enumerate() {
                if count == 0 {
                    continue;
                }
                let lower = base_lower + (w as i64 - s_prev as i64) + suffix_n;
                if lower < bound {
                    continue;
                }
                for xi in 0..=spec.anti_count(i) as usize {
                    let s = s_prev + xi;
                    if s > w || base_upper + s as i64 > bound {
                        break;
                    }
                    next[s] += count;
                }
            }
            ways = next;
            suffix_n += i64::from(spec.anti_count(i));
        }
        anti_count += ways[w];
    }
    Ok(anti_count * coor_free)
}

/// Bounds on `A` over a set built from an acceptable pair, with sentinels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ABounds {
    pub lo: i64,
    pub hi: i64,
}

impl ABounds {
    pub fn contains(&self, a: i64) -> bool {
        self.lo <= a && a <= self.hi
    }
}

/// `lo = max{ceil(tau'_{p'}) + 1, floor(tau_q) + 1}`,
/// `hi = min{ceil(tau'_{q'}) - 1, floor(tau_p) + 1}`.
pub fn a_bounds(spec: &PopulationSpec, bm: &BenchmarkQuad) -> ABounds {
    ABounds {
        lo: (spec.coor_ceil(bm.p_c) + 1).max(spec.anti_floor(bm.q) + 1),
        hi: (spec.coor_ceil(bm.q_c) - 1).min(spec.anti_floor(bm.p) + 1),
    }
}

/// An analytically constructed set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CandidateSet {
    /// Every acceptable pair producing this quad, sorted.
    pub generators: Vec<(usize, usize)>,
    pub benchmarks: BenchmarkQuad,
    /// Construction states of the first generator.
    pub construction: Construction,
    pub a_bounds: ABounds,
    pub member_count: u128,
    /// Present when the set was enumerated under the cap.
    pub members: Option<Vec<State>>,
}

impl CandidateSet {
    pub fn is_singleton(&self) -> bool {
        self.member_count == 1
    }

    pub fn contains(&self, spec: &PopulationSpec, x: &State) -> bool {
        is_member(spec, &self.benchmarks, x)
    }
}

/// All candidate sets, deduplicated by quad, in order of first generator.
pub fn characterize(spec: &PopulationSpec, cap: u128) -> Result<Vec<CandidateSet>> {
    let mut sets: Vec<CandidateSet> = Vec::new();
    for c in psi_candidates(spec)? {
        if !c.accepted || c.member_count == 0 {
            continue;
        }
        c.benchmarks.check_omega(spec)?;
        if let Some(existing) = sets.iter_mut().find(|s| s.benchmarks == c.benchmarks) {
            existing.generators.push((c.r, c.delta));
            continue;
        }
        let members = if enumeration_size(spec, &c.benchmarks) <= cap {
            Some(enumerate_set(spec, &c.benchmarks, cap)?)
        } else {
            None
        };
        sets.push(CandidateSet {
            generators: vec![(c.r, c.delta)],
            benchmarks: c.benchmarks,
            construction: c.construction,
            a_bounds: a_bounds(spec, &c.benchmarks),
            member_count: c.member_count,
            members,
        });
    }
    Ok(sets)
}
