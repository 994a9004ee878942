//! CSV artifacts: trajectories, activation logs, state lists and `F` profiles.

use std::io::{Read, Write};

use serde::Deserialize;

use crate::dynamics::{Activation, Trajectory};
use crate::error::{Error, Result};
use crate::population::{PopulationSpec, Role, State, Strategy};
use crate::synchronous::ScalarProfile;

fn state_header(spec: &PopulationSpec) -> Vec<String> {
    (1..=spec.b())
        .map(|i| format!("x_{i}"))
        .chain((1..=spec.b_c()).rev().map(|j| format!("xp_{j}")))
        .collect()
}

/// Columns `t, x_1..x_b, xp_{b'}..xp_1, A`.
pub fn write_trajectory_csv<W: Write>(
    spec: &PopulationSpec,
    traj: &Trajectory,
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    header.extend(state_header(spec));
    header.push("A".to_string());
    w.write_record(&header)?;
    for (t, (x, a)) in traj.states.iter().zip(&traj.a_counts).enumerate() {
        let mut row = vec![t.to_string()];
        row.extend(x.canonical_iter().map(|v| v.to_string()));
        row.push(a.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `t, role, type, from, to`; row `t` is the activation leading to
/// state `t`, `from` the agent's strategy before it and `to` after it.
pub fn write_activation_log<W: Write>(traj: &Trajectory, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "role", "type", "from", "to"])?;
    for (k, who) in traj.activations.iter().enumerate() {
        let before = traj.states[k].get(who.role, who.type_index);
        let after = traj.states[k + 1].get(who.role, who.type_index);
        let to = if before == after {
            who.current
        } else {
            who.current.flipped()
        };
        w.write_record([
            (k + 1).to_string(),
            who.role.to_string(),
            who.type_index.to_string(),
            who.current.to_string(),
            to.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Deserialize)]
struct LogRow {
    role: String,
    #[serde(rename = "type")]
    type_index: usize,
    from: String,
}

fn parse_role(s: &str) -> Result<Role> {
    match s.trim().to_ascii_lowercase().as_str() {
        "anticoordinator" | "anti" | "a" => Ok(Role::Anticoordinator),
        "coordinator" | "coor" | "c" => Ok(Role::Coordinator),
        other => Err(Error::Parse(format!("unknown role {other:?}"))),
    }
}

fn parse_strategy(s: &str) -> Result<Strategy> {
    match s.trim() {
        "A" | "a" => Ok(Strategy::A),
        "B" | "b" => Ok(Strategy::B),
        other => Err(Error::Parse(format!("unknown strategy {other:?}"))),
    }
}

/// Reads an activation log; the `t` and `to` columns are not needed and are
/// ignored if present.
pub fn read_activation_log<R: Read>(input: R) -> Result<Vec<Activation>> {
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    r.deserialize::<LogRow>()
        .map(|row| {
            let row = row?;
            Ok(Activation::new(
                parse_role(&row.role)?,
                row.type_index,
                parse_strategy(&row.from)?,
            ))
        })
        .collect()
}

/// One state per row in canonical column order, with its `A` count.
pub fn write_states_csv<W: Write>(spec: &PopulationSpec, states: &[State], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = state_header(spec);
    header.push("A".to_string());
    w.write_record(&header)?;
    for x in states {
        let mut row: Vec<String> = x.canonical_iter().map(|v| v.to_string()).collect();
        row.push(x.a_count().to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `A, F_A, F_c, F_a`.
pub fn write_f_profile_csv<W: Write>(profile: &ScalarProfile, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["A", "F_A", "F_c", "F_a"])?;
    for a in 0..profile.values.len() {
        w.write_record([
            a.to_string(),
            profile.values[a].to_string(),
            profile.coordinators[a].to_string(),
            profile.anticoordinators[a].to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
