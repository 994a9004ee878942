//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_FAILURES` are expected to fail for a documented
//! reason (printed with the FAIL line); the process exits nonzero if any other
//! criterion fails or a known failure unexpectedly passes.

#![allow(clippy::int_plus_one)]

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use mixpop_core::dynamics::{
    replay, simulate, sweep_anti_lr_from, sweep_anti_rl, sweep_coor_lr, sweep_coor_rl,
};
use mixpop_core::invariant::{
    benchmarks, characterize, enumerate_set, psi_candidates, psi_set, DEFAULT_ENUMERATION_CAP,
};
use mixpop_core::oracle::{build_graph, is_invariant, minimal_invariant_sets, DEFAULT_GRAPH_CAP};
use mixpop_core::population::{tight_benchmarks, SpecSampler};
use mixpop_core::stability::{
    check_proposition, check_theorem, lr_index_sets, markers, set_distance, theorem_window,
    verify_one_step, DEFAULT_NEIGHBOUR_CAP,
};
use mixpop_core::synchronous::{f_profile, find_cycles_beta_all, find_cycles_f, CycleKind};
use mixpop_core::{Activation, BenchmarkQuad, PopulationSpec, Role, State, Strategy};
use num_rational::Rational64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion<'a> = (u8, &'static str, Box<dyn Fn() -> Check + 'a>);

/// Criterion 7 expects `I_{0,2,5,3}` to be stable. All three deciders find an
/// escape: from (3,0,0,0|1,1,10,2,3), at distance one, a type-1 anticoordinator
/// playing A switches to B and lands at distance two. The expected verdict
/// relies on w_B(z) = min{} at z = (3,0,0,0|0,1,10,2,3), but z_1 > 0 and
/// A(z) = 19 > tau_1 = 18, so w_B(z) = 1 and R(z) = {1} meets [w_B, q).
const KNOWN_FAILURES: &[u8] = &[7];

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn example1() -> PopulationSpec {
    PopulationSpec::from_integers(
        &[(18, 4), (9, 3), (8, 1), (7, 3)],
        &[(5, 3), (10, 2), (14, 10), (19, 1), (25, 15)],
    )
    .expect("example spec is valid")
}

fn st(spec: &PopulationSpec, v: &[u32]) -> State {
    State::from_canonical(spec, v).expect("valid literal")
}

fn quad(p: usize, q: usize, q_c: usize, p_c: usize) -> BenchmarkQuad {
    BenchmarkQuad::new(p, q, q_c, p_c)
}

fn four_cycle(spec: &PopulationSpec) -> Vec<State> {
    [
        [4, 0, 0, 0, 0, 0, 10, 2, 3],
        [4, 0, 0, 0, 0, 1, 10, 2, 3],
        [3, 0, 0, 0, 0, 1, 10, 2, 3],
        [3, 0, 0, 0, 0, 0, 10, 2, 3],
    ]
    .iter()
    .map(|v| st(spec, v))
    .collect()
}

fn x_star(spec: &PopulationSpec) -> State {
    st(spec, &[0, 0, 0, 0, 15, 1, 10, 2, 3])
}

fn psi(spec: &PopulationSpec) -> Check {
    let got: BTreeSet<(usize, usize)> = psi_set(spec)
        .map_err(|e| e.to_string())?
        .into_iter()
        .collect();
    let want: BTreeSet<(usize, usize)> = [(1, 1), (0, 3), (0, 5)].into_iter().collect();
    ensure(got == want, || format!("psi_set = {got:?}"))?;
    let cands = psi_candidates(spec).map_err(|e| e.to_string())?;
    let a_of = |r, d| {
        cands
            .iter()
            .find(|c| c.r == r && c.delta == d)
            .map(|c| (c.a_total, c.accepted))
    };
    ensure(a_of(1, 0) == Some((41, false)), || {
        format!("(1,0) -> {:?}", a_of(1, 0))
    })?;
    ensure(a_of(1, 3) == Some((20, false)), || {
        format!("(1,3) -> {:?}", a_of(1, 3))
    })?;
    Ok("psi_set = {(0,3),(0,5),(1,1)}; (1,0) rejected at A=41, (1,3) rejected at A=20".into())
}

fn benchmark_values(spec: &PopulationSpec) -> Check {
    let q = |r, d| {
        benchmarks(spec, r, d)
            .map(|c| c.benchmarks)
            .map_err(|e| e.to_string())
    };
    ensure(q(1, 1)? == quad(1, 5, 3, 1), || {
        format!("(1,1) -> {}", q(1, 1).unwrap())
    })?;
    ensure(q(0, 3)? == quad(0, 2, 5, 3), || {
        format!("(0,3) -> {}", q(0, 3).unwrap())
    })?;
    ensure(q(0, 5)? == quad(0, 1, 6, 5), || {
        format!("(0,5) -> {}", q(0, 5).unwrap())
    })?;
    let single = enumerate_set(spec, &quad(0, 1, 6, 5), DEFAULT_ENUMERATION_CAP)
        .map_err(|e| e.to_string())?;
    ensure(single == vec![x_star(spec)], || {
        format!("I_(0,1,6,5) = {single:?}")
    })?;
    Ok("(1,1)->(5,3,1), (0,3)->(2,5,3), (0,5)->(1,6,5) = {x*}".into())
}

fn enumeration(spec: &PopulationSpec) -> Check {
    let first = enumerate_set(spec, &quad(1, 5, 3, 1), DEFAULT_ENUMERATION_CAP)
        .map_err(|e| e.to_string())?;
    ensure(first.len() == 36, || {
        format!("|I_(1,5,3,1)| = {}", first.len())
    })?;
    let mut second = enumerate_set(spec, &quad(0, 2, 5, 3), DEFAULT_ENUMERATION_CAP)
        .map_err(|e| e.to_string())?;
    let mut want = four_cycle(spec);
    second.sort();
    want.sort();
    ensure(second == want, || format!("I_(0,2,5,3) = {second:?}"))?;
    Ok("|I_(1,5,3,1)| = 36; I_(0,2,5,3) = the four-cycle states".into())
}

fn replays(spec: &PopulationSpec) -> Check {
    use Strategy::{A, B};
    let anti = Activation::anti;
    let coor = Activation::coor;
    let seq = [
        anti(2, B),
        coor(2, B),
        anti(2, A),
        coor(2, A),
        anti(2, B),
        coor(2, B),
        coor(2, B),
        anti(2, A),
        anti(2, A),
        anti(3, A),
        coor(2, A),
        coor(2, A),
        anti(4, B),
        anti(2, B),
        anti(4, A),
        anti(3, B),
    ];
    let listed: Vec<State> = [
        [4, 1, 1, 0, 0, 0, 0, 0, 3],
        [4, 2, 1, 0, 0, 0, 0, 0, 3],
        [4, 2, 1, 0, 0, 0, 0, 1, 3],
        [4, 1, 1, 0, 0, 0, 0, 1, 3],
        [4, 1, 1, 0, 0, 0, 0, 0, 3],
        [4, 2, 1, 0, 0, 0, 0, 0, 3],
        [4, 2, 1, 0, 0, 0, 0, 1, 3],
        [4, 2, 1, 0, 0, 0, 0, 2, 3],
        [4, 1, 1, 0, 0, 0, 0, 2, 3],
        [4, 0, 1, 0, 0, 0, 0, 2, 3],
        [4, 0, 0, 0, 0, 0, 0, 2, 3],
        [4, 0, 0, 0, 0, 0, 0, 1, 3],
        [4, 0, 0, 0, 0, 0, 0, 0, 3],
        [4, 0, 0, 1, 0, 0, 0, 0, 3],
        [4, 1, 0, 1, 0, 0, 0, 0, 3],
        [4, 1, 0, 0, 0, 0, 0, 0, 3],
        [4, 1, 1, 0, 0, 0, 0, 0, 3],
    ]
    .iter()
    .map(|v| st(spec, v))
    .collect();
    let counts = [9, 10, 11, 10, 9, 10, 11, 12, 11, 10, 9, 8, 7, 8, 9, 8, 9];
    let t1 = replay(spec, &listed[0], &seq).map_err(|e| e.to_string())?;
    ensure(t1.states == listed, || {
        "reference trajectory states differ".into()
    })?;
    ensure(t1.a_counts == counts, || {
        format!("reference A-counts {:?}", t1.a_counts)
    })?;
    ensure(
        t1.states[16] == t1.states[0] && t1.states[4] == t1.states[0],
        || "x(17)=x(5)=x(1) fails".into(),
    )?;

    let t2_states = four_cycle(spec);
    let seq2 = [coor(4, B), anti(1, A), coor(4, A), anti(1, B)];
    let t2 = replay(spec, &t2_states[0], &seq2).map_err(|e| e.to_string())?;
    ensure(t2.states[..4] == t2_states[..], || {
        "four-cycle states differ".into()
    })?;
    ensure(t2.states[4] == t2_states[0], || {
        "four-cycle does not close".into()
    })?;
    ensure(t2.a_counts == [19, 20, 19, 18, 19], || {
        format!("four-cycle A-counts {:?}", t2.a_counts)
    })?;
    Ok(
        "reference trajectory: 17 states and A-counts reproduced, x(17)=x(5)=x(1); four-cycle closes"
            .into(),
    )
}

fn invariance(spec: &PopulationSpec) -> Check {
    let sets = characterize(spec, DEFAULT_ENUMERATION_CAP).map_err(|e| e.to_string())?;
    let mut walks = 0;
    for (k, set) in sets.iter().enumerate() {
        let members = set.members.as_ref().ok_or("set not enumerated")?;
        is_invariant(spec, members).map_err(|e| format!("{} escapes: {e:?}", set.benchmarks))?;
        let mut rng = ChaCha8Rng::seed_from_u64(k as u64);
        for start in 0..100u64 {
            let x0 = &members[rand::Rng::random_range(&mut rng, 0..members.len())];
            let traj = simulate(spec, x0, 500, 1000 * k as u64 + start);
            if let Some(x) = traj.states.iter().find(|x| !set.contains(spec, x)) {
                return Err(format!("{} left at {x}", set.benchmarks));
            }
            walks += 1;
        }
    }
    Ok(format!(
        "{} sets, {walks} walks x 500 steps, 0 exits; exhaustive closure holds",
        sets.len()
    ))
}

fn oracle_truth(spec: &PopulationSpec) -> Check {
    let start = Instant::now();
    let graph = build_graph(spec, DEFAULT_GRAPH_CAP).map_err(|e| e.to_string())?;
    let candidates = characterize(spec, DEFAULT_ENUMERATION_CAP).map_err(|e| e.to_string())?;
    let report = minimal_invariant_sets(spec, &graph, &candidates);
    let elapsed = start.elapsed().as_secs_f64();
    ensure(report.node_count == 675_840, || {
        format!("{} nodes", report.node_count)
    })?;
    ensure(report.sets.len() == 3, || {
        format!("{} terminal classes", report.sets.len())
    })?;
    let oracle: BTreeSet<Vec<State>> = report.sets.iter().map(|s| s.members.clone()).collect();
    let analytic: BTreeSet<Vec<State>> = candidates
        .iter()
        .map(|c| c.members.clone().unwrap_or_default())
        .collect();
    ensure(oracle == analytic, || {
        "terminal classes differ from characterized sets".into()
    })?;
    ensure(elapsed < 60.0, || format!("took {elapsed:.1}s"))?;
    Ok(format!(
        "675,840 nodes, {} edges; 3 terminal classes = characterized sets; {elapsed:.2}s",
        report.edge_count
    ))
}

fn stability(spec: &PopulationSpec) -> Check {
    let mut notes = Vec::new();
    let mut failures = Vec::new();

    let first = quad(1, 5, 3, 1);
    let m1 = enumerate_set(spec, &first, DEFAULT_ENUMERATION_CAP).map_err(|e| e.to_string())?;
    let th1 = check_theorem(spec, &first, &m1).map_err(|e| e.to_string())?;
    let pr1 = check_proposition(spec, &first, &m1).map_err(|e| e.to_string())?;
    let os1 = verify_one_step(spec, &m1, DEFAULT_NEIGHBOUR_CAP).map_err(|e| e.to_string())?;
    let escape_start = st(spec, &[3, 0, 0, 1, 0, 0, 0, 0, 3]);
    let member_z = st(spec, &[4, 0, 0, 1, 0, 0, 0, 0, 3]);
    let l_sets = lr_index_sets(spec, &first, &member_z).map_err(|e| e.to_string())?;
    let v_a = markers(spec, &first, &member_z)
        .map_err(|e| e.to_string())?
        .v_a;
    let pert = os1.witness_perturbation.as_ref();
    if th1.stable || pr1.stable || os1.stable {
        failures.push("I_(1,5,3,1) reported stable".to_string());
    } else if pert.map(|p| &p.start) != Some(&escape_start)
        || pert.map(|p| p.result.clone()) != Some(st(spec, &[3, 0, 0, 2, 0, 0, 0, 0, 3]))
        || pert.map(|p| p.distance) != Some(2)
        || l_sets.l != vec![4]
        || v_a != 4
        || th1.witness_state.as_ref() != Some(&member_z)
    {
        failures.push(format!(
            "I_(1,5,3,1) witness mismatch: {pert:?}, L={:?}, v_A={v_a}",
            l_sets.l
        ));
    } else {
        notes.push(format!(
            "I_(1,5,3,1) unstable: escape from {escape_start} to (3,0,0,2,..) at distance 2; adjacent member {member_z} has L={{4}} within (1, v_A=4], failing {}",
            pr1.failing_condition.as_deref().unwrap_or("?")
        ));
    }

    let second = quad(0, 2, 5, 3);
    let m2 = enumerate_set(spec, &second, DEFAULT_ENUMERATION_CAP).map_err(|e| e.to_string())?;
    let window = theorem_window(spec, &second);
    let observed = (
        m2.iter().map(State::a_count).min().unwrap_or(0),
        m2.iter().map(State::a_count).max().unwrap_or(0),
    );
    let th2 = check_theorem(spec, &second, &m2).map_err(|e| e.to_string())?;
    let pr2 = check_proposition(spec, &second, &m2).map_err(|e| e.to_string())?;
    let os2 = verify_one_step(spec, &m2, DEFAULT_NEIGHBOUR_CAP).map_err(|e| e.to_string())?;
    if window != (16, 23) || observed != (18, 20) {
        failures.push(format!(
            "I_(0,2,5,3) window {window:?}, observed {observed:?}"
        ));
    }
    if th2.stable && pr2.stable && os2.stable {
        notes.push("I_(0,2,5,3) stable, window [16,23] contains [18,20]".into());
    } else {
        let p = os2.witness_perturbation.as_ref();
        failures.push(format!(
            "I_(0,2,5,3) expected stable, but theorem={} ({}), proposition={} ({}), one-step={}: {} --{}--> {} at distance {}; window [16,23] contains [18,20]",
            th2.stable,
            th2.failing_condition.as_deref().unwrap_or("-"),
            pr2.stable,
            pr2.failing_condition.as_deref().unwrap_or("-"),
            os2.stable,
            p.map(|p| p.start.to_string()).unwrap_or_default(),
            p.map(|p| p.activation.to_string()).unwrap_or_default(),
            p.map(|p| p.result.to_string()).unwrap_or_default(),
            p.map(|p| p.distance).unwrap_or(0),
        ));
    }

    let single = quad(0, 1, 6, 5);
    let m3 = vec![x_star(spec)];
    let th3 = check_theorem(spec, &single, &m3).map_err(|e| e.to_string())?;
    let os3 = verify_one_step(spec, &m3, DEFAULT_NEIGHBOUR_CAP).map_err(|e| e.to_string())?;
    if theorem_window(spec, &single) != (27, 42) || !th3.stable || !os3.stable {
        failures.push(format!(
            "x* window {:?}, theorem {}, one-step {}",
            theorem_window(spec, &single),
            th3.stable,
            os3.stable
        ));
    } else {
        notes.push("{x*} stable, 31 in [27,42]".into());
    }

    let agree = [(&th1, &os1), (&th2, &os2), (&th3, &os3)]
        .iter()
        .all(|(t, o)| t.stable == o.stable);
    if agree {
        notes.push("one-step agrees with theorem on all three".into());
    } else {
        failures.push("one-step and theorem disagree".into());
    }
    if failures.is_empty() {
        Ok(notes.join("; "))
    } else {
        Err(format!(
            "{} | holds: {}",
            failures.join("; "),
            notes.join("; ")
        ))
    }
}

fn scalar_sync(spec: &PopulationSpec) -> Check {
    let profile = f_profile(spec);
    ensure(profile.f(31) == 31, || format!("F(31) = {}", profile.f(31)))?;
    let r = find_cycles_f(spec);
    let id = |a| r.cycle_containing(a).ok_or(format!("{a} on no cycle"));
    let (c1, c2, cs) = (id(9)?, id(16)?, id(31)?);
    ensure(
        r.cycles[c1] == [9, 10]
            && r.cycles[c2] == [16, 19]
            && r.cycles[cs] == [31]
            && r.cycles.len() == 3,
        || format!("cycles {:?}", r.cycles),
    )?;
    let basin = |c| -> Vec<u32> { r.basin_of(c).into_iter().filter(|&a| a >= 1).collect() };
    let phi1: Vec<u32> = (1..=4).chain(8..=13).collect();
    let phi2: Vec<u32> = (5..=7).chain(14..=24).collect();
    let phis: Vec<u32> = (25..=42).collect();
    ensure(
        basin(c1) == phi1 && basin(c2) == phi2 && basin(cs) == phis,
        || format!("basins {:?} {:?} {:?}", basin(c1), basin(c2), basin(cs)),
    )?;
    Ok(format!(
        "F(31)=31; cycles {{9,10}}, {{16,19}}, {{31}}; basins over 1..42 match; A0=0 joins the {{9,10}} basin (F(0)={})",
        profile.f(0)
    ))
}

fn full_sync(spec: &PopulationSpec) -> Check {
    let r = find_cycles_beta_all(spec, DEFAULT_GRAPH_CAP).map_err(|e| e.to_string())?;
    let moving: BTreeSet<Vec<u32>> = r
        .cycles
        .iter()
        .filter(|c| c.kind == CycleKind::Cycle)
        .map(|c| c.a_values.clone())
        .collect();
    let want: BTreeSet<Vec<u32>> = [vec![9, 10, 12], vec![16, 19, 20]].into_iter().collect();
    ensure(moving == want, || {
        format!("non-fixed cycle projections {moving:?}")
    })?;
    let equilibria: Vec<&State> = r
        .cycles
        .iter()
        .filter(|c| c.kind == CycleKind::Equilibrium)
        .map(|c| &c.states[0])
        .collect();
    ensure(equilibria == [&x_star(spec)], || {
        format!("equilibria {equilibria:?}")
    })?;
    let swaps: Vec<String> = r
        .cycles
        .iter()
        .filter(|c| c.kind == CycleKind::SwapFixedPoint)
        .map(|c| format!("{} (A={})", c.states[0], c.a_values[0]))
        .collect();
    Ok(format!(
        "{} states iterated; non-fixed cycles {{9,10,12}}, {{16,19,20}}; fixed point x*; count-level swap fixed points: {}",
        r.initial_count,
        swaps.join(", ")
    ))
}

fn tendency_agrees(spec: &PopulationSpec) -> Result<(), String> {
    let n = i64::from(spec.n());
    for (role, types) in [
        (Role::Anticoordinator, spec.b()),
        (Role::Coordinator, spec.b_c()),
    ] {
        for ty in 1..=types {
            let tau = match role {
                Role::Anticoordinator => spec.anti_temper(ty),
                Role::Coordinator => spec.coor_temper(ty),
            }
            .ratio();
            for a_total in 0..=n {
                let a = Rational64::from_integer(a_total);
                for current in [Strategy::A, Strategy::B] {
                    let got = spec.tends_to_a(role, ty, current, a_total);
                    let want = match (role, current) {
                        (Role::Anticoordinator, Strategy::A) => a <= tau + 1,
                        (Role::Anticoordinator, Strategy::B) => a <= tau,
                        (Role::Coordinator, Strategy::A) => a >= tau + 1,
                        (Role::Coordinator, Strategy::B) => a >= tau,
                    };
                    ensure(got == want, || {
                        format!("{role} type {ty} playing {current} at A={a_total}")
                    })?;
                    let sufficient_a = match role {
                        Role::Anticoordinator => a <= tau,
                        Role::Coordinator => a >= tau + 1,
                    };
                    let sufficient_b = match role {
                        Role::Anticoordinator => a > tau + 1,
                        Role::Coordinator => a < tau,
                    };
                    ensure(!(sufficient_a && !got) && !(sufficient_b && got), || {
                        format!("sufficient condition broken for {role} type {ty} at A={a_total}")
                    })?;
                }
            }
        }
    }
    Ok(())
}

fn sweep_disjunctions(spec: &PopulationSpec, y: &State) -> Result<(), String> {
    let rl = sweep_anti_rl(spec, y);
    let x = &rl.final_state;
    for i in 1..tight_benchmarks(spec, x).q {
        let stage = i64::from(rl.stage(i).ok_or("missing stage")?);
        ensure(
            x.anti(i) == spec.anti_count(i) || stage == spec.anti_floor(i) + 1,
            || format!("right-to-left sweep from {y}: type {i}"),
        )?;
    }
    let lr = sweep_anti_lr_from(spec, y, 1).map_err(|e| e.to_string())?;
    let x = &lr.final_state;
    for i in tight_benchmarks(spec, x).p + 1..=spec.b() {
        let stage = i64::from(lr.stage(i).ok_or("missing stage")?);
        ensure(x.anti(i) == 0 || stage == spec.anti_floor(i) + 1, || {
            format!("left-to-right sweep from {y}: type {i}")
        })?;
    }
    for r in [sweep_coor_rl(spec, y), sweep_coor_lr(spec, y)] {
        let c = r.final_state.coor_slice();
        let k = c.iter().take_while(|&&v| v > 0).count();
        let saturated = c[..k]
            .iter()
            .enumerate()
            .all(|(j, &v)| v == spec.coor_count(j + 1));
        ensure(saturated && c[k..].iter().all(|&v| v == 0), || {
            format!("coordinator sweep from {y}")
        })?;
    }
    Ok(())
}

fn index_set_properties(spec: &PopulationSpec) -> Result<usize, String> {
    let mut checked = 0;
    for set in characterize(spec, DEFAULT_ENUMERATION_CAP).map_err(|e| e.to_string())? {
        let bm = set.benchmarks;
        let members = set.members.as_ref().ok_or("set not enumerated")?;
        for z in members {
            let s = lr_index_sets(spec, &bm, z).map_err(|e| e.to_string())?;
            if let (Some(max_r), Some(min_l)) = (s.r.iter().max(), s.l.iter().min()) {
                ensure(max_r <= min_l, || {
                    format!("{bm} at {z}: R={:?} L={:?}", s.r, s.l)
                })?;
            }
            for sv in bm.anti_wandering() {
                for v in bm.anti_wandering().filter(|&v| v > sv) {
                    if z.anti(sv) >= spec.anti_count(sv) || z.anti(v) == 0 {
                        continue;
                    }
                    let mut anti = z.anti_slice().to_vec();
                    anti[sv - 1] += 1;
                    anti[v - 1] -= 1;
                    let x = State::new(spec, anti, z.coor_slice().to_vec())
                        .map_err(|e| e.to_string())?;
                    ensure(set.contains(spec, &x), || {
                        format!("{bm}: {z} +1_{sv} -1_{v} = {x} left the set")
                    })?;
                    ensure(
                        set_distance(&x, members).map_err(|e| e.to_string())? == 0,
                        || "distance".into(),
                    )?;
                    checked += 1;
                }
            }
        }
    }
    Ok(checked)
}

fn property_suites() -> Check {
    const SPECS: u64 = 200;
    let sampler = SpecSampler::default();
    let mut moves = 0;
    let mut sweeps = 0;
    for seed in 0..SPECS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = sampler.sample(&mut rng);
        tendency_agrees(&spec).map_err(|e| format!("seed {seed}: {e}"))?;
        for _ in 0..25 {
            let y = SpecSampler::state(&spec, &mut rng);
            sweep_disjunctions(&spec, &y).map_err(|e| format!("seed {seed}: {e}"))?;
            sweeps += 1;
        }
        moves += index_set_properties(&spec).map_err(|e| format!("seed {seed}: {e}"))?;
    }
    Ok(format!(
        "{SPECS} specs: {sweeps} sweep starts, {moves} +1_s/-1_v moves, tendency tables and max R <= min L, 0 violations"
    ))
}

fn main() -> ExitCode {
    let spec = example1();
    let criteria: [Criterion; 10] = [
        (1, "psi computation", Box::new(|| psi(&spec))),
        (2, "benchmarks", Box::new(|| benchmark_values(&spec))),
        (3, "enumeration", Box::new(|| enumeration(&spec))),
        (4, "trajectory replay", Box::new(|| replays(&spec))),
        (
            5,
            "invariance property suite",
            Box::new(|| invariance(&spec)),
        ),
        (6, "oracle ground truth", Box::new(|| oracle_truth(&spec))),
        (7, "stability verdicts", Box::new(|| stability(&spec))),
        (
            8,
            "synchronous scalar dynamics",
            Box::new(|| scalar_sync(&spec)),
        ),
        (9, "full synchronous map", Box::new(|| full_sync(&spec))),
        (10, "structural property suites", Box::new(property_suites)),
    ];
    let mut unexpected = 0;
    for (id, title, run) in &criteria {
        let known = KNOWN_FAILURES.contains(id);
        match run() {
            Ok(detail) => {
                println!("PASS criterion {id} ({title}): {detail}");
                if known {
                    println!("  unexpected: listed as a known failure");
                    unexpected += 1;
                }
            }
            Err(detail) => {
                println!("FAIL criterion {id} ({title}): {detail}");
                if known {
                    println!("  known failure, see KNOWN_FAILURES");
                } else {
                    unexpected += 1;
                }
            }
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
