//! Population model: tempers, agent classes, population specs and states.
//!
//! Anticoordinating types are labelled `1..=b` in descending temper order and
//! coordinating types `1..=b'` in ascending temper order. A state counts the
//! `A`-players of every type. Its canonical (display and enumeration) order is
//! `x_1, .., x_b, x'_b', .., x'_1`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational threshold on the number of *other* `A`-players.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Temper(Rational64);

impl Temper {
    pub fn new(numer: i64, denom: i64) -> Self {
        Temper(Rational64::new(numer, denom))
    }

    pub fn from_integer(v: i64) -> Self {
        Temper(Rational64::from_integer(v))
    }

    pub fn from_ratio(r: Rational64) -> Self {
        Temper(r)
    }

    pub fn ratio(&self) -> Rational64 {
        self.0
    }

    pub fn floor(&self) -> i64 {
        self.0.numer().div_floor(self.0.denom())
    }

    pub fn ceil(&self) -> i64 {
        self.0.numer().div_ceil(self.0.denom())
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }
}

impl fmt::Display for Temper {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

/// Parses `"p/q"`, an integer, or a finite decimal such as `"9.5"`, exactly.
pub fn parse_rational(s: &str) -> Result<Rational64> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((num, den)) = s.split_once('/') {
        let num: i64 = num.trim().parse().map_err(|_| bad())?;
        let den: i64 = den.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        return Ok(Rational64::new(num, den));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|c| c.is_ascii_digit()) || frac.len() > 15 {
            return Err(bad());
        }
        let negative = int.trim_start().starts_with('-');
        let int_part: i64 = match int.trim() {
            "" | "-" | "+" => 0,
            t => t.parse().map_err(|_| bad())?,
        };
        let denom = 10i64.pow(frac.len() as u32);
        let frac_part: i64 = frac.parse().map_err(|_| bad())?;
        let magnitude =
            Rational64::from_integer(int_part.abs()) + Rational64::new(frac_part, denom);
        return Ok(if negative { -magnitude } else { magnitude });
    }
    s.parse::<i64>()
        .map(Rational64::from_integer)
        .map_err(|_| bad())
}

impl FromStr for Temper {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_rational(s).map(Temper)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RationalRepr {
    Int(i64),
    Text(String),
}

impl RationalRepr {
    fn into_ratio<E: serde::de::Error>(self) -> std::result::Result<Rational64, E> {
        match self {
            RationalRepr::Int(v) => Ok(Rational64::from_integer(v)),
            RationalRepr::Text(s) => parse_rational(&s).map_err(E::custom),
        }
    }
}

impl Serialize for Temper {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_integer() {
            serializer.serialize_i64(*self.0.numer())
        } else {
            serializer.serialize_str(&self.to_string())
        }
    }
}

impl<'de> Deserialize<'de> for Temper {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        RationalRepr::deserialize(deserializer)?
            .into_ratio()
            .map(Temper)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Strategy {
    A,
    B,
}

impl Strategy {
    pub fn flipped(self) -> Strategy {
        match self {
            Strategy::A => Strategy::B,
            Strategy::B => Strategy::A,
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::A => "A",
            Strategy::B => "B",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    Anticoordinator,
    Coordinator,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Anticoordinator => "anticoordinator",
            Role::Coordinator => "coordinator",
        })
    }
}

/// Payoffs of a 2x2 game: `a` = (A vs A), `b` = (A vs B), `c` = (B vs A), `d` = (B vs B).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PayoffMatrix {
    pub a: Rational64,
    pub b: Rational64,
    pub c: Rational64,
    pub d: Rational64,
}

impl PayoffMatrix {
    pub fn new(a: Rational64, b: Rational64, c: Rational64, d: Rational64) -> Self {
        PayoffMatrix { a, b, c, d }
    }

    pub fn from_integers(a: i64, b: i64, c: i64, d: i64) -> Self {
        PayoffMatrix::new(
            Rational64::from_integer(a),
            Rational64::from_integer(b),
            Rational64::from_integer(c),
            Rational64::from_integer(d),
        )
    }

    pub fn scaled(&self, k: Rational64) -> Self {
        PayoffMatrix::new(self.a * k, self.b * k, self.c * k, self.d * k)
    }
}

/// What an agent with a given payoff matrix does under best response.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassBehavior {
    Threshold {
        role: Role,
        temper: Temper,
    },
    /// Plays the same strategy whatever the others do and cannot be expressed
    /// by an in-range temper. Only `Constant(B)` is ever produced: an
    /// always-`A` agent is exactly a coordinator with temper 0.
    Constant(Strategy),
}

/// Classifies a payoff matrix in a population of `n` agents.
///
/// With `sigma = a - c + d - b` and `gamma = d - b` the best response is `A`
/// iff `sigma * A_j >= gamma * (n - 1)`, so the temper is
/// `gamma * (n - 1) / sigma`.
pub fn derive_class(m: &PayoffMatrix, n: u32) -> ClassBehavior {
    let sigma = m.a - m.c + m.d - m.b;
    let gamma = m.d - m.b;
    let others = Rational64::from_integer(i64::from(n.max(1)) - 1);
    let always_a = ClassBehavior::Threshold {
        role: Role::Coordinator,
        temper: Temper::from_integer(0),
    };
    if sigma.is_zero() {
        return if gamma <= Rational64::zero() {
            always_a
        } else {
            ClassBehavior::Constant(Strategy::B)
        };
    }
    let temper = gamma * others / sigma;
    if sigma.is_positive() {
        if temper < Rational64::zero() {
            always_a
        } else if temper > others {
            ClassBehavior::Constant(Strategy::B)
        } else {
            ClassBehavior::Threshold {
                role: Role::Coordinator,
                temper: Temper(temper),
            }
        }
    } else if temper < Rational64::zero() {
        ClassBehavior::Constant(Strategy::B)
    } else if temper > others {
        always_a
    } else {
        ClassBehavior::Threshold {
            role: Role::Anticoordinator,
            temper: Temper(temper),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct AgentClass {
    pub role: Role,
    pub temper: Temper,
    pub count: u32,
}

/// Unvalidated population description, as read from a file or built by hand.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PopulationDraft {
    /// Anticoordinating types in type order `1..=b`.
    pub anti: Vec<(Temper, u32)>,
    /// Coordinating types in type order `1..=b'`.
    pub coor: Vec<(Temper, u32)>,
    /// Agents that always play `B`.
    pub inert: u32,
}

impl PopulationDraft {
    pub fn new(anti: Vec<(Temper, u32)>, coor: Vec<(Temper, u32)>) -> Self {
        PopulationDraft {
            anti,
            coor,
            inert: 0,
        }
    }

    pub fn from_integers(anti: &[(i64, u32)], coor: &[(i64, u32)]) -> Self {
        let conv = |v: &[(i64, u32)]| {
            v.iter()
                .map(|&(t, c)| (Temper::from_integer(t), c))
                .collect::<Vec<_>>()
        };
        PopulationDraft::new(conv(anti), conv(coor))
    }

    pub fn total(&self) -> u64 {
        self.anti.iter().map(|&(_, c)| u64::from(c)).sum::<u64>()
            + self.coor.iter().map(|&(_, c)| u64::from(c)).sum::<u64>()
            + u64::from(self.inert)
    }

    /// Merges same-temper groups within a role, keeping first-occurrence order.
    pub fn merge_duplicates(mut self) -> Self {
        fn merge(v: Vec<(Temper, u32)>) -> Vec<(Temper, u32)> {
            let mut out: Vec<(Temper, u32)> = Vec::with_capacity(v.len());
            for (t, c) in v {
                match out.iter_mut().find(|(u, _)| *u == t) {
                    Some(slot) => slot.1 = slot.1.saturating_add(c),
                    None => out.push((t, c)),
                }
            }
            out
        }
        self.anti = merge(self.anti);
        self.coor = merge(self.coor);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<String>,
    /// Whether `floor(tau_i) < floor(tau_{i-1})` for every `i in 2..=b`.
    pub separation_assumption: bool,
    pub n: u64,
}

pub fn validate_spec(draft: &PopulationDraft) -> ValidationReport {
    let mut violations = Vec::new();
    let n = draft.total();
    if draft.anti.is_empty() {
        violations.push("at least one anticoordinator type is required".to_string());
    }
    if draft.coor.is_empty() {
        violations.push("at least one coordinator type is required".to_string());
    }
    if n < 2 {
        violations.push(format!("population size {n} is below 2"));
    }
    if n > u64::from(u32::MAX / 2) {
        violations.push(format!("population size {n} is too large"));
    }
    for (label, groups) in [
        ("anticoordinator", &draft.anti),
        ("coordinator", &draft.coor),
    ] {
        for (i, &(t, c)) in groups.iter().enumerate() {
            if c == 0 {
                violations.push(format!("{label} type {} has count 0", i + 1));
            }
            let hi = Rational64::from_integer(n.saturating_sub(1).min(i64::MAX as u64) as i64);
            if t.ratio() < Rational64::zero() || t.ratio() > hi {
                violations.push(format!(
                    "{label} type {} temper {t} outside [0, {}]",
                    i + 1,
                    n.saturating_sub(1)
                ));
            }
        }
    }
    if draft.anti.windows(2).any(|w| w[0].0 <= w[1].0) {
        violations.push("anticoordinator tempers not strictly descending".to_string());
    }
    if draft.coor.windows(2).any(|w| w[0].0 >= w[1].0) {
        violations.push("coordinator tempers not strictly ascending by type".to_string());
    }
    let separation_assumption = draft
        .anti
        .windows(2)
        .all(|w| w[1].0.floor() < w[0].0.floor());
    ValidationReport {
        ok: violations.is_empty(),
        violations,
        separation_assumption,
        n,
    }
}

/// A validated population. Immutable after construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PopulationSpec {
    anti: Vec<AgentClass>,
    coor: Vec<AgentClass>,
    inert: u32,
    n: u32,
    anti_floor: Vec<i64>,
    coor_ceil: Vec<i64>,
}

impl PopulationSpec {
    pub fn from_draft(draft: &PopulationDraft) -> Result<Self> {
        let report = validate_spec(draft);
        if !report.ok {
            return Err(Error::InvalidSpec(report.violations));
        }
        let anti: Vec<AgentClass> = draft
            .anti
            .iter()
            .map(|&(temper, count)| AgentClass {
                role: Role::Anticoordinator,
                temper,
                count,
            })
            .collect();
        let coor: Vec<AgentClass> = draft
            .coor
            .iter()
            .map(|&(temper, count)| AgentClass {
                role: Role::Coordinator,
                temper,
                count,
            })
            .collect();
        Ok(PopulationSpec {
            anti_floor: anti.iter().map(|c| c.temper.floor()).collect(),
            coor_ceil: coor.iter().map(|c| c.temper.ceil()).collect(),
            anti,
            coor,
            inert: draft.inert,
            n: report.n as u32,
        })
    }

    /// Convenience constructor from integer tempers.
    pub fn from_integers(anti: &[(i64, u32)], coor: &[(i64, u32)]) -> Result<Self> {
        PopulationSpec::from_draft(&PopulationDraft::from_integers(anti, coor))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        PopulationSpec::from_draft(&draft_from_json(text)?)
    }

    pub fn to_draft(&self) -> PopulationDraft {
        PopulationDraft {
            anti: self.anti.iter().map(|c| (c.temper, c.count)).collect(),
            coor: self.coor.iter().map(|c| (c.temper, c.count)).collect(),
            inert: self.inert,
        }
    }

    pub fn to_json(&self) -> String {
        let file = SpecFileOut {
            anticoordinators: self
                .anti
                .iter()
                .map(|c| GroupOut {
                    temper: c.temper,
                    count: c.count,
                })
                .collect(),
            coordinators: self
                .coor
                .iter()
                .map(|c| GroupOut {
                    temper: c.temper,
                    count: c.count,
                })
                .collect(),
            inert: (self.inert > 0).then_some(self.inert),
        };
        serde_json::to_string_pretty(&file).expect("spec serializes")
    }

    /// Number of anticoordinating types.
    pub fn b(&self) -> usize {
        self.anti.len()
    }

    /// Number of coordinating types.
    pub fn b_c(&self) -> usize {
        self.coor.len()
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn inert(&self) -> u32 {
        self.inert
    }

    pub fn anti_classes(&self) -> &[AgentClass] {
        &self.anti
    }

    pub fn coor_classes(&self) -> &[AgentClass] {
        &self.coor
    }

    /// `n_i` for `i in 1..=b`.
    pub fn anti_count(&self, i: usize) -> u32 {
        self.anti[i - 1].count
    }

    /// `n'_j` for `j in 1..=b'`.
    pub fn coor_count(&self, j: usize) -> u32 {
        self.coor[j - 1].count
    }

    pub fn count(&self, role: Role, ty: usize) -> u32 {
        match role {
            Role::Anticoordinator => self.anti_count(ty),
            Role::Coordinator => self.coor_count(ty),
        }
    }

    pub fn type_count(&self, role: Role) -> usize {
        match role {
            Role::Anticoordinator => self.b(),
            Role::Coordinator => self.b_c(),
        }
    }

    /// `tau_i` for `i in 0..=b+1`, with `tau_0 = n` and `tau_{b+1} = -2`.
    pub fn anti_temper(&self, i: usize) -> Temper {
        if i == 0 {
            Temper::from_integer(i64::from(self.n))
        } else if i == self.b() + 1 {
            Temper::from_integer(-2)
        } else {
            self.anti[i - 1].temper
        }
    }

    /// `tau'_j` for `j in 0..=b'+1`, with `tau'_0 = -2` and `tau'_{b'+1} = n + 2`.
    pub fn coor_temper(&self, j: usize) -> Temper {
        if j == 0 {
            Temper::from_integer(-2)
        } else if j == self.b_c() + 1 {
            Temper::from_integer(i64::from(self.n) + 2)
        } else {
            self.coor[j - 1].temper
        }
    }

    /// `floor(tau_i)`, sentinel aware.
    pub fn anti_floor(&self, i: usize) -> i64 {
        if (1..=self.b()).contains(&i) {
            self.anti_floor[i - 1]
        } else {
            self.anti_temper(i).floor()
        }
    }

    /// `ceil(tau'_j)`, sentinel aware.
    pub fn coor_ceil(&self, j: usize) -> i64 {
        if (1..=self.b_c()).contains(&j) {
            self.coor_ceil[j - 1]
        } else {
            self.coor_temper(j).ceil()
        }
    }

    /// `sum_{i <= k} n_i`.
    pub fn anti_prefix(&self, k: usize) -> u32 {
        self.anti[..k].iter().map(|c| c.count).sum()
    }

    /// `sum_{j <= k} n'_j`.
    pub fn coor_prefix(&self, k: usize) -> u32 {
        self.coor[..k].iter().map(|c| c.count).sum()
    }

    pub fn state_space_size(&self) -> u128 {
        self.anti
            .iter()
            .chain(&self.coor)
            .map(|c| u128::from(c.count) + 1)
            .product()
    }

    pub fn separation_assumption(&self) -> bool {
        self.anti_floor.windows(2).all(|w| w[1] < w[0])
    }

    /// Analytic constructions require every agent to be a threshold agent.
    pub fn require_threshold_only(&self) -> Result<()> {
        if self.inert > 0 {
            Err(Error::ConstantAgents(self.inert))
        } else {
            Ok(())
        }
    }

    /// Whether an agent of the given class, currently playing `current`,
    /// best-responds with `A` when the population holds `a_total` `A`-players.
    ///
    /// Anticoordinator: `A` iff `a_total <= tau + 1` when playing `A`, and iff
    /// `a_total <= tau` when playing `B`. Coordinator: `A` iff
    /// `a_total >= tau' + 1` when playing `A`, and iff `a_total >= tau'` when
    /// playing `B`.
    #[inline]
    pub fn tends_to_a(&self, role: Role, ty: usize, current: Strategy, a_total: i64) -> bool {
        match (role, current) {
            (Role::Anticoordinator, Strategy::A) => a_total <= self.anti_floor[ty - 1] + 1,
            (Role::Anticoordinator, Strategy::B) => a_total <= self.anti_floor[ty - 1],
            (Role::Coordinator, Strategy::A) => a_total >= self.coor_ceil[ty - 1] + 1,
            (Role::Coordinator, Strategy::B) => a_total >= self.coor_ceil[ty - 1],
        }
    }
}

#[derive(Deserialize)]
struct SpecFileIn {
    anticoordinators: Vec<GroupIn>,
    coordinators: Vec<GroupIn>,
    #[serde(default)]
    inert: u32,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupIn {
    #[serde(default)]
    temper: Option<Temper>,
    #[serde(default)]
    payoffs: Option<[RationalField; 4]>,
    count: u32,
}

struct RationalField(Rational64);

impl<'de> Deserialize<'de> for RationalField {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        RationalRepr::deserialize(deserializer)?
            .into_ratio()
            .map(RationalField)
    }
}

#[derive(Serialize)]
struct SpecFileOut {
    anticoordinators: Vec<GroupOut>,
    coordinators: Vec<GroupOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    inert: Option<u32>,
}

#[derive(Serialize)]
struct GroupOut {
    temper: Temper,
    count: u32,
}

/// Reads a population file into a draft without validating it.
///
/// Groups given by `payoffs` are classified with [`derive_class`] against the
/// file's total population and placed in the list of their derived role. When
/// a role list contains any payoff-derived group it is sorted into type order.
/// Same-temper groups are merged.
pub fn draft_from_json(text: &str) -> Result<PopulationDraft> {
    let file: SpecFileIn = serde_json::from_str(text)?;
    let n: u64 = file
        .anticoordinators
        .iter()
        .chain(&file.coordinators)
        .map(|g| u64::from(g.count))
        .sum::<u64>()
        + u64::from(file.inert);
    let n32 =
        u32::try_from(n).map_err(|_| Error::Parse(format!("population size {n} too large")))?;
    let mut draft = PopulationDraft {
        inert: file.inert,
        ..Default::default()
    };
    let mut derived = [false, false];
    for (listed, group) in file
        .anticoordinators
        .iter()
        .map(|g| (Role::Anticoordinator, g))
        .chain(file.coordinators.iter().map(|g| (Role::Coordinator, g)))
    {
        match (&group.temper, &group.payoffs) {
            (Some(t), None) => match listed {
                Role::Anticoordinator => draft.anti.push((*t, group.count)),
                Role::Coordinator => draft.coor.push((*t, group.count)),
            },
            (None, Some(p)) => {
                let m = PayoffMatrix::new(p[0].0, p[1].0, p[2].0, p[3].0);
                match derive_class(&m, n32) {
                    ClassBehavior::Threshold { role, temper } => match role {
                        Role::Anticoordinator => {
                            derived[0] = true;
                            draft.anti.push((temper, group.count));
                        }
                        Role::Coordinator => {
                            derived[1] = true;
                            draft.coor.push((temper, group.count));
                        }
                    },
                    ClassBehavior::Constant(_) => draft.inert += group.count,
                }
            }
            _ => {
                return Err(Error::Parse(
                    "each group needs exactly one of \"temper\" or \"payoffs\"".to_string(),
                ))
            }
        }
    }
    if derived[0] {
        draft.anti.sort_by_key(|g| std::cmp::Reverse(g.0));
    }
    if derived[1] {
        draft.coor.sort_by_key(|g| g.0);
    }
    Ok(draft.merge_duplicates())
}

/// Distribution of `A`-players over types. `coor[j - 1]` is `x'_j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct State {
    anti: Vec<u32>,
    coor: Vec<u32>,
}

impl State {
    pub fn new(spec: &PopulationSpec, anti: Vec<u32>, coor: Vec<u32>) -> Result<Self> {
        if anti.len() != spec.b() || coor.len() != spec.b_c() {
            return Err(Error::InvalidState(format!(
                "expected {} anticoordinator and {} coordinator entries, got {} and {}",
                spec.b(),
                spec.b_c(),
                anti.len(),
                coor.len()
            )));
        }
        for (i, &x) in anti.iter().enumerate() {
            if x > spec.anti_count(i + 1) {
                return Err(Error::InvalidState(format!(
                    "x_{} = {x} exceeds n_{} = {}",
                    i + 1,
                    i + 1,
                    spec.anti_count(i + 1)
                )));
            }
        }
        for (j, &x) in coor.iter().enumerate() {
            if x > spec.coor_count(j + 1) {
                return Err(Error::InvalidState(format!(
                    "x'_{} = {x} exceeds n'_{} = {}",
                    j + 1,
                    j + 1,
                    spec.coor_count(j + 1)
                )));
            }
        }
        Ok(State { anti, coor })
    }

    /// Builds a state from `(x_1, .., x_b, x'_b', .., x'_1)`.
    pub fn from_canonical(spec: &PopulationSpec, values: &[u32]) -> Result<Self> {
        if values.len() != spec.b() + spec.b_c() {
            return Err(Error::InvalidState(format!(
                "expected {} entries, got {}",
                spec.b() + spec.b_c(),
                values.len()
            )));
        }
        let anti = values[..spec.b()].to_vec();
        let coor = values[spec.b()..].iter().rev().copied().collect();
        State::new(spec, anti, coor)
    }

    pub(crate) fn from_parts_unchecked(anti: Vec<u32>, coor: Vec<u32>) -> Self {
        State { anti, coor }
    }

    /// Parses `"x1,..,xb|x'b',..,x'1"`.
    pub fn parse(spec: &PopulationSpec, literal: &str) -> Result<Self> {
        let (left, right) = literal
            .split_once('|')
            .ok_or_else(|| Error::Parse(format!("state literal {literal:?} lacks '|'")))?;
        let nums = |s: &str| -> Result<Vec<u32>> {
            s.split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| {
                    t.trim()
                        .parse::<u32>()
                        .map_err(|_| Error::Parse(format!("bad count {t:?} in state literal")))
                })
                .collect()
        };
        let anti = nums(left)?;
        let mut coor = nums(right)?;
        coor.reverse();
        State::new(spec, anti, coor)
    }

    pub fn zeros(spec: &PopulationSpec) -> Self {
        State {
            anti: vec![0; spec.b()],
            coor: vec![0; spec.b_c()],
        }
    }

    pub fn saturated(spec: &PopulationSpec) -> Self {
        State {
            anti: spec.anti.iter().map(|c| c.count).collect(),
            coor: spec.coor.iter().map(|c| c.count).collect(),
        }
    }

    /// `x_i`, 1-based.
    pub fn anti(&self, i: usize) -> u32 {
        self.anti[i - 1]
    }

    /// `x'_j`, 1-based.
    pub fn coor(&self, j: usize) -> u32 {
        self.coor[j - 1]
    }

    pub fn get(&self, role: Role, ty: usize) -> u32 {
        match role {
            Role::Anticoordinator => self.anti(ty),
            Role::Coordinator => self.coor(ty),
        }
    }

    pub(crate) fn slot_mut(&mut self, role: Role, ty: usize) -> &mut u32 {
        match role {
            Role::Anticoordinator => &mut self.anti[ty - 1],
            Role::Coordinator => &mut self.coor[ty - 1],
        }
    }

    pub fn anti_slice(&self) -> &[u32] {
        &self.anti
    }

    pub fn coor_slice(&self) -> &[u32] {
        &self.coor
    }

    /// Canonical vector `(x_1, .., x_b, x'_b', .., x'_1)`.
    pub fn canonical(&self) -> Vec<u32> {
        self.canonical_iter().collect()
    }

    pub fn canonical_iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.anti.iter().chain(self.coor.iter().rev()).copied()
    }

    /// `A(x)`, the total number of `A`-players.
    pub fn a_count(&self) -> u32 {
        self.anti.iter().sum::<u32>() + self.coor.iter().sum::<u32>()
    }

    pub fn anti_total(&self) -> u32 {
        self.anti.iter().sum()
    }

    pub fn coor_total(&self) -> u32 {
        self.coor.iter().sum()
    }

    pub fn l1_distance(&self, other: &State) -> u32 {
        self.canonical_iter()
            .zip(other.canonical_iter())
            .map(|(a, b)| a.abs_diff(b))
            .sum()
    }
}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        self.canonical_iter().cmp(other.canonical_iter())
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &mut dyn Iterator<Item = &u32>| {
            v.map(|x| x.to_string()).collect::<Vec<_>>().join(",")
        };
        write!(
            f,
            "{}|{}",
            join(&mut self.anti.iter()),
            join(&mut self.coor.iter().rev())
        )
    }
}

impl Serialize for State {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.canonical_iter())
    }
}

/// Benchmark types `(p, q, q', p')`: types `1..=p` and `1..=p'` are `A`-fixed,
/// types `q..=b` and `q'..=b'` are `B`-fixed, the rest wander.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BenchmarkQuad {
    pub p: usize,
    pub q: usize,
    pub q_c: usize,
    pub p_c: usize,
}

impl BenchmarkQuad {
    pub fn new(p: usize, q: usize, q_c: usize, p_c: usize) -> Self {
        BenchmarkQuad { p, q, q_c, p_c }
    }

    pub fn in_omega(&self, spec: &PopulationSpec) -> bool {
        self.p <= spec.b()
            && self.q > self.p
            && self.q <= spec.b() + 1
            && self.p_c <= spec.b_c()
            && self.q_c > self.p_c
            && self.q_c <= spec.b_c() + 1
    }

    pub fn check_omega(&self, spec: &PopulationSpec) -> Result<()> {
        if self.in_omega(spec) {
            Ok(())
        } else {
            Err(Error::NotInOmega(*self))
        }
    }

    /// Wandering anticoordinating types `p+1..q`.
    pub fn anti_wandering(&self) -> std::ops::Range<usize> {
        self.p + 1..self.q
    }

    /// Wandering coordinating types `p'+1..q'`.
    pub fn coor_wandering(&self) -> std::ops::Range<usize> {
        self.p_c + 1..self.q_c
    }

    /// Membership in `X_{p,q,q',p'}`: fixed blocks saturated or empty.
    pub fn fixes(&self, spec: &PopulationSpec, x: &State) -> bool {
        (1..=self.p).all(|i| x.anti(i) == spec.anti_count(i))
            && (self.q..=spec.b()).all(|i| x.anti(i) == 0)
            && (1..=self.p_c).all(|j| x.coor(j) == spec.coor_count(j))
            && (self.q_c..=spec.b_c()).all(|j| x.coor(j) == 0)
    }

    /// Whether `other` is at least as tight as `self` in every component.
    pub fn within(&self, other: &BenchmarkQuad) -> bool {
        self.p >= other.p && self.q <= other.q && self.q_c <= other.q_c && self.p_c >= other.p_c
    }
}

impl fmt::Display for BenchmarkQuad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.p, self.q, self.q_c, self.p_c)
    }
}

/// The smallest `X_{p,q,q',p'}` containing `x`.
pub fn tight_benchmarks(spec: &PopulationSpec, x: &State) -> BenchmarkQuad {
    let p = (1..=spec.b())
        .take_while(|&i| x.anti(i) == spec.anti_count(i))
        .count();
    let q = (1..=spec.b()).rev().take_while(|&i| x.anti(i) == 0).count();
    let p_c = (1..=spec.b_c())
        .take_while(|&j| x.coor(j) == spec.coor_count(j))
        .count();
    let q_c = (1..=spec.b_c())
        .rev()
        .take_while(|&j| x.coor(j) == 0)
        .count();
    // A type can be both saturated and empty only when its count is zero,
    // which validation forbids, so the prefix and suffix never overlap.
    BenchmarkQuad {
        p,
        q: spec.b() + 1 - q,
        q_c: spec.b_c() + 1 - q_c,
        p_c,
    }
}

/// Draws random small populations for property tests and cross-checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpecSampler {
    pub max_anti_types: usize,
    pub max_coor_types: usize,
    pub max_count: u32,
    /// Tempers are integers when set, otherwise multiples of 1/2.
    pub integer_tempers: bool,
    /// Keep anticoordinator temper floors distinct.
    pub separated: bool,
}

impl Default for SpecSampler {
    fn default() -> Self {
        SpecSampler {
            max_anti_types: 4,
            max_coor_types: 4,
            max_count: 5,
            integer_tempers: false,
            separated: true,
        }
    }
}

impl SpecSampler {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PopulationSpec {
        let b = rng.random_range(1..=self.max_anti_types);
        let bc = rng.random_range(1..=self.max_coor_types);
        let anti_counts: Vec<u32> = (0..b)
            .map(|_| rng.random_range(1..=self.max_count))
            .collect();
        let coor_counts: Vec<u32> = (0..bc)
            .map(|_| rng.random_range(1..=self.max_count))
            .collect();
        let n = anti_counts.iter().chain(&coor_counts).sum::<u32>();
        let top = i64::from(n) - 1;
        let mut draw_tempers = |k: usize, distinct_floors: bool| -> Vec<Rational64> {
            let halves = !self.integer_tempers;
            let mut pool: Vec<Rational64> = (0..=top)
                .flat_map(|v| {
                    let whole = Rational64::from_integer(v);
                    let half = whole + Rational64::new(1, 2);
                    let with_half = halves && v < top;
                    std::iter::once(whole).chain(with_half.then_some(half))
                })
                .collect();
            let mut chosen = Vec::with_capacity(k);
            while chosen.len() < k && !pool.is_empty() {
                let t = pool.swap_remove(rng.random_range(0..pool.len()));
                if distinct_floors {
                    let f = t.floor();
                    pool.retain(|u| u.floor() != f);
                }
                chosen.push(t);
            }
            chosen
        };
        let mut anti_t = draw_tempers(b, self.separated);
        let mut coor_t = draw_tempers(bc, false);
        anti_t.sort_unstable_by(|x, y| y.cmp(x));
        coor_t.sort_unstable();
        let draft = PopulationDraft::new(
            anti_t.into_iter().map(Temper).zip(anti_counts).collect(),
            coor_t.into_iter().map(Temper).zip(coor_counts).collect(),
        );
        PopulationSpec::from_draft(&draft).expect("sampled spec is valid")
    }

    /// A uniformly random state of `spec`.
    pub fn state<R: Rng + ?Sized>(spec: &PopulationSpec, rng: &mut R) -> State {
        State {
            anti: spec
                .anti
                .iter()
                .map(|c| rng.random_range(0..=c.count))
                .collect(),
            coor: spec
                .coor
                .iter()
                .map(|c| rng.random_range(0..=c.count))
                .collect(),
        }
    }
}
