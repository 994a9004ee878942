//! Asynchronous best-response dynamics: the single-agent update rule, replay of
//! activation sequences, seeded random activation, and the four canonical
//! activation sweeps.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::population::{PopulationSpec, Role, State, Strategy};

/// One agent revising its strategy, named by its class since agents of the
/// same type and strategy are indistinguishable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Activation {
    pub role: Role,
    pub type_index: usize,
    pub current: Strategy,
}

impl Activation {
    pub fn new(role: Role, type_index: usize, current: Strategy) -> Self {
        Activation {
            role,
            type_index,
            current,
        }
    }

    pub fn anti(type_index: usize, current: Strategy) -> Self {
        Activation::new(Role::Anticoordinator, type_index, current)
    }

    pub fn coor(type_index: usize, current: Strategy) -> Self {
        Activation::new(Role::Coordinator, type_index, current)
    }

    /// Checks that the named class exists and holds an agent playing `current`.
    pub fn validate(&self, spec: &PopulationSpec, x: &State) -> Result<()> {
        let types = spec.type_count(self.role);
        if self.type_index == 0 || self.type_index > types {
            return Err(Error::InvalidActivation(format!(
                "{self}: type index out of range 1..={types}"
            )));
        }
        let a = x.get(self.role, self.type_index);
        let present = match self.current {
            Strategy::A => a,
            Strategy::B => spec.count(self.role, self.type_index) - a,
        };
        if present == 0 {
            return Err(Error::InvalidActivation(format!(
                "{self}: no such agent at state {x}"
            )));
        }
        Ok(())
    }

    pub fn is_valid_at(&self, spec: &PopulationSpec, x: &State) -> bool {
        self.validate(spec, x).is_ok()
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "type-{} {} playing {}",
            self.type_index, self.role, self.current
        )
    }
}

/// Whether the active agent best-responds with `A` at `x`.
pub fn agent_tends_to_a(spec: &PopulationSpec, x: &State, who: &Activation) -> Result<bool> {
    who.validate(spec, x)?;
    Ok(spec.tends_to_a(
        who.role,
        who.type_index,
        who.current,
        i64::from(x.a_count()),
    ))
}

/// Applies one activation. The state changes by at most one agent.
pub fn step(spec: &PopulationSpec, x: &State, who: &Activation) -> Result<State> {
    who.validate(spec, x)?;
    let mut next = x.clone();
    let mut a_total = i64::from(x.a_count());
    apply_unchecked(spec, &mut next, &mut a_total, who);
    Ok(next)
}

/// Applies a pre-validated activation in place; returns whether the agent switched.
#[inline]
pub(crate) fn apply_unchecked(
    spec: &PopulationSpec,
    x: &mut State,
    a_total: &mut i64,
    who: &Activation,
) -> bool {
    let wants_a = spec.tends_to_a(who.role, who.type_index, who.current, *a_total);
    let slot = x.slot_mut(who.role, who.type_index);
    match (who.current, wants_a) {
        (Strategy::B, true) => {
            *slot += 1;
            *a_total += 1;
            true
        }
        (Strategy::A, false) => {
            *slot -= 1;
            *a_total -= 1;
            true
        }
        _ => false,
    }
}

/// Every activation class valid at `x`: anticoordinator types `1..=b`, then
/// coordinator types `1..=b'`, each with `A` before `B`.
pub fn valid_activations(spec: &PopulationSpec, x: &State) -> Vec<Activation> {
    let mut out = Vec::with_capacity(2 * (spec.b() + spec.b_c()));
    for role in [Role::Anticoordinator, Role::Coordinator] {
        for ty in 1..=spec.type_count(role) {
            let a = x.get(role, ty);
            if a > 0 {
                out.push(Activation::new(role, ty, Strategy::A));
            }
            if a < spec.count(role, ty) {
                out.push(Activation::new(role, ty, Strategy::B));
            }
        }
    }
    out
}

/// No agent wants to switch.
pub fn is_equilibrium(spec: &PopulationSpec, x: &State) -> bool {
    let a = i64::from(x.a_count());
    valid_activations(spec, x).iter().all(|who| {
        spec.tends_to_a(who.role, who.type_index, who.current, a) == (who.current == Strategy::A)
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Trajectory {
    pub states: Vec<State>,
    pub activations: Vec<Activation>,
    pub a_counts: Vec<u32>,
}

impl Trajectory {
    fn start(x0: State) -> Self {
        let a = x0.a_count();
        Trajectory {
            states: vec![x0],
            activations: Vec::new(),
            a_counts: vec![a],
        }
    }

    fn push(&mut self, who: Activation, x: State) {
        self.a_counts.push(x.a_count());
        self.activations.push(who);
        self.states.push(x);
    }

    pub fn final_state(&self) -> &State {
        self.states.last().expect("trajectory is never empty")
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Folds [`step`] over `seq`. The first invalid activation aborts with its index.
pub fn replay(spec: &PopulationSpec, x0: &State, seq: &[Activation]) -> Result<Trajectory> {
    let mut traj = Trajectory::start(x0.clone());
    for (index, who) in seq.iter().enumerate() {
        let next = step(spec, traj.final_state(), who).map_err(|e| Error::InvalidActivationAt {
            index,
            reason: e.to_string(),
        })?;
        traj.push(*who, next);
    }
    Ok(traj)
}

/// Runs `steps` activations drawn uniformly over the valid activation classes
/// by a ChaCha8 stream seeded with `seed`.
pub fn simulate(spec: &PopulationSpec, x0: &State, steps: usize, seed: u64) -> Trajectory {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    simulate_with_rng(spec, x0, steps, &mut rng)
}

pub fn simulate_with_rng<R: Rng + ?Sized>(
    spec: &PopulationSpec,
    x0: &State,
    steps: usize,
    rng: &mut R,
) -> Trajectory {
    let mut traj = Trajectory::start(x0.clone());
    let mut x = x0.clone();
    let mut a_total = i64::from(x.a_count());
    for _ in 0..steps {
        let choices = valid_activations(spec, &x);
        let who = choices[rng.random_range(0..choices.len())];
        apply_unchecked(spec, &mut x, &mut a_total, &who);
        traj.push(who, x.clone());
    }
    traj
}

/// A-total recorded right after the block of one type finished updating.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StageCount {
    pub type_index: usize,
    pub a_total: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepResult {
    pub final_state: State,
    /// One entry per swept type, in sweep order.
    pub stage_a_counts: Vec<StageCount>,
}

impl SweepResult {
    /// The A-total recorded after type `ty`'s block, if it was swept.
    pub fn stage(&self, ty: usize) -> Option<u32> {
        self.stage_a_counts
            .iter()
            .find(|s| s.type_index == ty)
            .map(|s| s.a_total)
    }
}

/// Activates every agent of the listed types once, type by type. Within a
/// type the `A`-players go first, then the `B`-players.
fn sweep(
    spec: &PopulationSpec,
    y: &State,
    role: Role,
    types: impl Iterator<Item = usize>,
    log: Option<&mut Vec<Activation>>,
) -> SweepResult {
    let mut x = y.clone();
    let mut a_total = i64::from(x.a_count());
    let mut stages = Vec::new();
    let mut log = log;
    for ty in types {
        let playing_a = x.get(role, ty);
        let playing_b = spec.count(role, ty) - playing_a;
        for (strategy, k) in [(Strategy::A, playing_a), (Strategy::B, playing_b)] {
            let who = Activation::new(role, ty, strategy);
            for _ in 0..k {
                apply_unchecked(spec, &mut x, &mut a_total, &who);
                if let Some(log) = log.as_deref_mut() {
                    log.push(who);
                }
            }
        }
        stages.push(StageCount {
            type_index: ty,
            a_total: a_total as u32,
        });
    }
    SweepResult {
        final_state: x,
        stage_a_counts: stages,
    }
}

/// The map `←c`: coordinator types `1, 2, .., b'` in that order.
pub fn sweep_coor_rl(spec: &PopulationSpec, y: &State) -> SweepResult {
    sweep(spec, y, Role::Coordinator, 1..=spec.b_c(), None)
}

/// The map `→c`: coordinator types `b', .., 1`.
pub fn sweep_coor_lr(spec: &PopulationSpec, y: &State) -> SweepResult {
    sweep(spec, y, Role::Coordinator, (1..=spec.b_c()).rev(), None)
}

/// The map `←a`: anticoordinator types `b, .., 1`; stage counts are `←A^i`.
pub fn sweep_anti_rl(spec: &PopulationSpec, y: &State) -> SweepResult {
    sweep(spec, y, Role::Anticoordinator, (1..=spec.b()).rev(), None)
}

/// The map `→a^i`: anticoordinator types `i, .., b`; stage counts are `→A^k`.
pub fn sweep_anti_lr_from(spec: &PopulationSpec, y: &State, i: usize) -> Result<SweepResult> {
    if i == 0 || i > spec.b() {
        return Err(Error::IndexOutOfRange {
            what: "sweep start type",
            index: i,
            lo: 1,
            hi: spec.b(),
        });
    }
    Ok(sweep(spec, y, Role::Anticoordinator, i..=spec.b(), None))
}

/// Which canonical sweep to expand into an explicit activation sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepKind {
    CoorRightToLeft,
    CoorLeftToRight,
    AntiRightToLeft,
    AntiLeftToRightFrom(usize),
}

/// The explicit activation sequence a sweep performs from `y`, so that
/// `replay(spec, y, &seq)` ends where the sweep ends.
pub fn sweep_activations(
    spec: &PopulationSpec,
    y: &State,
    kind: SweepKind,
) -> Result<Vec<Activation>> {
    let mut log = Vec::new();
    match kind {
        SweepKind::CoorRightToLeft => {
            sweep(spec, y, Role::Coordinator, 1..=spec.b_c(), Some(&mut log));
        }
        SweepKind::CoorLeftToRight => {
            sweep(
                spec,
                y,
                Role::Coordinator,
                (1..=spec.b_c()).rev(),
                Some(&mut log),
            );
        }
        SweepKind::AntiRightToLeft => {
            sweep(
                spec,
                y,
                Role::Anticoordinator,
                (1..=spec.b()).rev(),
                Some(&mut log),
            );
        }
        SweepKind::AntiLeftToRightFrom(i) => {
            sweep_anti_lr_from(spec, y, i)?;
            sweep(spec, y, Role::Anticoordinator, i..=spec.b(), Some(&mut log));
        }
    }
    Ok(log)
}
