//! Machine strategies, the machine-versus-environment simulator, the rule
//! translators, and extraction of a strategy from a verified proof.
//!
//! The machine may move at any time; the environment may make at most one
//! move per permission the machine grants. A translated strategy runs an
//! inner strategy against an imaginary play of the premise and rewrites
//! moves between that play and the real play of the conclusion.

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::calculus::{verify_proof, Proof, ProofError, RuleInstance};
use crate::cirquent::Cirquent;
use crate::games::Game;
use crate::runs::{parse_positive, CellMove, Labmove, Move, Player, Run};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Action {
    MakeMove(Move),
    GrantPermission,
    Idle,
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::MakeMove(m) => write!(f, "{m}"),
            Action::GrantPermission => f.write_str("grant"),
            Action::Idle => f.write_str("idle"),
        }
    }
}

/// A deterministic machine. Implementations may keep state between calls
/// but see every position of one play in order; use a fresh instance (or
/// a clone of a fresh one) per play.
pub trait MachineStrategy: Send {
    fn next(&mut self, run: &Run, step: usize) -> Action;

    fn clone_box(&self) -> Box<dyn MachineStrategy>;

    fn name(&self) -> String;
}

impl Clone for Box<dyn MachineStrategy> {
    fn clone(&self) -> Self {
        self.clone_box()
    }
}

pub trait EnvStrategy: Send {
    /// Called once per granted permission; at most one move back.
    fn on_grant(&mut self, run: &Run) -> Option<Move>;

    /// True once the environment will never move again.
    fn quiescent(&self) -> bool {
        false
    }

    fn name(&self) -> String;
}

/// Always idles.
#[derive(Debug, Clone, Default)]
pub struct IdleMachine;

impl MachineStrategy for IdleMachine {
    fn next(&mut self, _: &Run, _: usize) -> Action {
        Action::Idle
    }

    fn clone_box(&self) -> Box<dyn MachineStrategy> {
        Box::new(self.clone())
    }

    fn name(&self) -> String {
        "idle".into()
    }
}

/// Grants permission forever and never moves.
#[derive(Debug, Clone, Default)]
pub struct Granter;

impl MachineStrategy for Granter {
    fn next(&mut self, _: &Run, _: usize) -> Action {
        Action::GrantPermission
    }

    fn clone_box(&self) -> Box<dyn MachineStrategy> {
        Box::new(self.clone())
    }

    fn name(&self) -> String {
        "granter".into()
    }
}

/// Plays its moves first, one per step, then grants forever.
#[derive(Debug, Clone)]
pub struct ScriptedMachine {
    moves: VecDeque<Move>,
}

impl ScriptedMachine {
    pub fn new(moves: impl IntoIterator<Item = Move>) -> Self {
        ScriptedMachine { moves: moves.into_iter().collect() }
    }
}

impl MachineStrategy for ScriptedMachine {
    fn next(&mut self, _: &Run, _: usize) -> Action {
        match self.moves.pop_front() {
            Some(m) => Action::MakeMove(m),
            None => Action::GrantPermission,
        }
    }

    fn clone_box(&self) -> Box<dyn MachineStrategy> {
        Box::new(self.clone())
    }

    fn name(&self) -> String {
        "scripted".into()
    }
}

/// Never moves.
#[derive(Debug, Clone, Default)]
pub struct SilentEnv;

impl EnvStrategy for SilentEnv {
    fn on_grant(&mut self, _: &Run) -> Option<Move> {
        None
    }

    fn quiescent(&self) -> bool {
        true
    }

    fn name(&self) -> String {
        "silent".into()
    }
}

/// Plays the given moves in order, one per grant. With a filter game, a
/// move that would make the position illegal is skipped.
#[derive(Clone)]
pub struct ScriptedEnv {
    moves: VecDeque<Move>,
    filter: Option<Arc<dyn Game>>,
}

impl ScriptedEnv {
    pub fn new(moves: impl IntoIterator<Item = Move>) -> Self {
        ScriptedEnv { moves: moves.into_iter().collect(), filter: None }
    }

    pub fn legal_only(mut self, game: Arc<dyn Game>) -> Self {
        self.filter = Some(game);
        self
    }
}

impl EnvStrategy for ScriptedEnv {
    fn on_grant(&mut self, run: &Run) -> Option<Move> {
        while let Some(m) = self.moves.pop_front() {
            match &self.filter {
                Some(g) if !g.is_legal(&run.extended(Labmove::bot(m.clone()))) => continue,
                _ => return Some(m),
            }
        }
        None
    }

    fn quiescent(&self) -> bool {
        self.moves.is_empty()
    }

    fn name(&self) -> String {
        "scripted".into()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Illegality {
    /// Index of the offending labmove in the run.
    pub index: usize,
    pub offender: Player,
}

impl fmt::Display for Illegality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let who = match self.offender {
            Player::Top => "machine",
            Player::Bot => "environment",
        };
        write!(f, "{who} offender at move {}", self.index + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceEvent {
    Machine(usize, Action),
    Env(usize, Move),
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceEvent::Machine(k, a) => write!(f, "{k} M:{a}"),
            TraceEvent::Env(k, m) => write!(f, "{k} E:{m}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimOutcome {
    pub run: Run,
    pub winner: Player,
    pub grants: usize,
    pub steps: usize,
    pub first_illegal: Option<Illegality>,
    pub trace: Vec<TraceEvent>,
}

impl SimOutcome {
    pub fn trace_text(&self) -> String {
        let mut out: String = self.trace.iter().map(|e| format!("{e}\n")).collect();
        if let Some(i) = self.first_illegal {
            out.push_str(&format!("illegal: {i}\n"));
        }
        out.push_str(&format!("winner: {} grants:{}\n", self.winner, self.grants));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("budget must be at least 1")]
    ZeroBudget,
}

/// Plays `m` against `e` on `g` for at most `budget` machine steps.
///
/// Stops early once the machine does not move and the environment is
/// quiescent and did not move either.
pub fn simulate(
    m: &mut dyn MachineStrategy,
    e: &mut dyn EnvStrategy,
    g: &dyn Game,
    budget: usize,
) -> Result<SimOutcome, SimError> {
    if budget == 0 {
        return Err(SimError::ZeroBudget);
    }
    let mut run = Run::empty();
    let mut grants = 0;
    let mut first_illegal = None;
    let mut trace = Vec::new();
    let mut steps = 0;
    let push = |run: &mut Run, lm: Labmove, first_illegal: &mut Option<Illegality>| {
        let player = lm.player;
        run.push(lm);
        if first_illegal.is_none() && !g.is_legal(run) {
            *first_illegal = Some(Illegality { index: run.len() - 1, offender: player });
        }
    };
    for step in 1..=budget {
        steps = step;
        let action = m.next(&run, step);
        trace.push(TraceEvent::Machine(step, action.clone()));
        let env_moved = match action {
            Action::MakeMove(mv) => {
                push(&mut run, Labmove::top(mv), &mut first_illegal);
                continue;
            }
            Action::GrantPermission => {
                grants += 1;
                match e.on_grant(&run) {
                    Some(mv) => {
                        trace.push(TraceEvent::Env(step, mv.clone()));
                        push(&mut run, Labmove::bot(mv), &mut first_illegal);
                        true
                    }
                    None => false,
                }
            }
            Action::Idle => false,
        };
        if !env_moved && e.quiescent() {
            break;
        }
    }
    let winner = match first_illegal {
        Some(i) => !i.offender,
        None => g.legal_winner(&run),
    };
    Ok(SimOutcome { run, winner, grants, steps, first_illegal, trace })
}

/// Copycat for the axiom with `n` pairs: answers `a;w⃗.α` by `b;w⃗.α`, with
/// `b = a+1` for odd `a` and `b = a-1` for even `a`, first in first out.
#[derive(Debug, Clone)]
pub struct AxiomStrategy {
    n: usize,
    seen: usize,
    queue: VecDeque<Move>,
}

pub fn axiom_strategy(n: usize) -> AxiomStrategy {
    AxiomStrategy { n, seen: 0, queue: VecDeque::new() }
}

impl AxiomStrategy {
    pub fn respond(&self, mv: &Move) -> Option<Move> {
        let cell = CellMove::parse(mv.as_str())?;
        let a = cell.oformula;
        if a > 2 * self.n {
            return None;
        }
        let b = if a % 2 == 1 { a + 1 } else { a - 1 };
        Some(Move::new(CellMove { oformula: b, ..cell }.render()))
    }
}

impl MachineStrategy for AxiomStrategy {
    fn next(&mut self, run: &Run, _: usize) -> Action {
        for lm in &run.labmoves()[self.seen.min(run.len())..] {
            if lm.player == Player::Bot {
                if let Some(r) = self.respond(&lm.mv) {
                    self.queue.push_back(r);
                }
            }
        }
        self.seen = run.len();
        match self.queue.pop_front() {
            Some(m) => Action::MakeMove(m),
            None => Action::GrantPermission,
        }
    }

    fn clone_box(&self) -> Box<dyn MachineStrategy> {
        Box::new(self.clone())
    }

    fn name(&self) -> String {
        format!("axiom({})", self.n)
    }
}

/// `f(u1,u2) = (u1+u2-2)(u1+u2-1)/2 + u1`, a bijection from pairs of
/// positive integers onto the positive integers. `None` on overflow.
pub fn pair(u1: u64, u2: u64) -> Option<u64> {
    if u1 == 0 || u2 == 0 {
        return None;
    }
    let s = u1 as u128 + u2 as u128;
    let v = (s - 2) * (s - 1) / 2 + u1 as u128;
    u64::try_from(v).ok()
}

pub fn unpair(u: u64) -> Option<(u64, u64)> {
    if u == 0 {
        return None;
    }
    let u = u as u128;
    // largest s with (s-2)(s-1)/2 < u
    let mut s = (((8 * u) as f64).sqrt() as u128 / 2).max(2);
    while (s - 1) * s / 2 < u {
        s += 1;
    }
    while s > 2 && (s - 2) * (s - 1) / 2 >= u {
        s -= 1;
    }
    let u1 = u - (s - 2) * (s - 1) / 2;
    let u2 = s - u1;
    Some((u1 as u64, u2 as u64))
}

/// The n-ary fold: `f() = 1`, `f(u) = u`, `f(u1,…,un) = f(u1, f(u2,…,un))`.
pub fn pair_n(us: &[u64]) -> Option<u64> {
    match us {
        [] => Some(1),
        [u] => (*u > 0).then_some(*u),
        [u, rest @ ..] => pair(*u, pair_n(rest)?),
    }
}

/// Inverse of [`pair_n`] for a given arity; `None` when `u` is not in the image.
pub fn unpair_n(u: u64, n: usize) -> Option<Vec<u64>> {
    match n {
        0 => (u == 1).then(Vec::new),
        1 => (u > 0).then(|| vec![u]),
        _ => {
            let (u1, rest) = unpair(u)?;
            let mut out = vec![u1];
            out.extend(unpair_n(rest, n - 1)?);
            Some(out)
        }
    }
}

/// Rewrites moves between the real play (outer) and the imaginary play
/// (inner). Both maps are partial; a `None` means the move has no
/// counterpart and is dropped (environment) or absorbed (machine).
pub trait MoveTranslator: Send + Sync + fmt::Debug {
    fn to_inner(&self, mv: &Move) -> Option<Move>;
    fn to_outer(&self, mv: &Move) -> Option<Move>;
}

/// Splits `u.rest` with `u` a positive numeral.
fn split_copy(s: &str) -> Option<(u64, &str)> {
    let (head, rest) = s.split_once('.')?;
    Some((parse_positive(head)?, rest))
}

fn cell_map(mv: &Move, f: impl FnOnce(CellMove) -> Option<CellMove>) -> Option<Move> {
    let cell = CellMove::parse(mv.as_str())?;
    f(cell).map(|c| Move::new(c.render()))
}

/// The translator of one rule instance. Indices are 1-based positions as in
/// the cirquents; outer is the conclusion, inner is the premise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleTranslator {
    Identity,
    /// Oformulas `p`, `p+1` swapped.
    OformulaSwap(usize),
    /// Overgroup coordinates `p`, `p+1` swapped.
    CoordSwap(usize),
    /// The weakened oformula `deleted` of the conclusion (if it disappeared)
    /// and the conclusion overgroups removed with it.
    Weakening { deleted: usize, deleted_overs: Vec<usize> },
    /// `?F` at `a` of the conclusion, copies `a`, `a+1` in the premise.
    Contraction(usize),
    /// Overgroup `p` of the premise duplicated into `p`, `p+1`.
    OvergroupDuplication(usize),
    /// Overgroups `p`, `p+1` of the premise merged; per premise oformula,
    /// membership in those two overgroups.
    Merging { p: usize, membership: Vec<(bool, bool)> },
    /// `E∨F` or `E∧F` at `a`, split into `a`, `a+1`.
    Split(usize),
    /// `!F` at `a`; new overgroup at position `q` of the premise.
    Pst { a: usize, q: usize },
    /// `?F` at `a`; the premise adds `F` to the overgroups in `s` (sorted).
    Pcost { a: usize, s: Vec<usize> },
    /// `⫰F` outside, `F♣` inside: `u.α` ↔ `1;u.α`.
    Declubsuit,
    /// `F` outside, `⫰F` inside with copy 1 pinned: `α` ↔ `1.α`.
    Depst,
}

impl RuleTranslator {
    /// The translator for `conclusion` following from `premise` by `r`.
    pub fn for_rule(r: &RuleInstance, premise: &Cirquent, conclusion: &Cirquent) -> RuleTranslator {
        match r {
            RuleInstance::Axiom(_) => RuleTranslator::Identity,
            RuleInstance::UndergroupExchange(_) | RuleInstance::UndergroupDuplication(_) => RuleTranslator::Identity,
            RuleInstance::OformulaExchange(p) => RuleTranslator::OformulaSwap(*p),
            RuleInstance::OvergroupExchange(p) => RuleTranslator::CoordSwap(*p),
            RuleInstance::OvergroupDuplication(p) => RuleTranslator::OvergroupDuplication(*p),
            RuleInstance::Merging(p) => RuleTranslator::Merging {
                p: *p,
                membership: (1..=premise.len())
                    .map(|a| (premise.in_overgroup(a, *p), premise.in_overgroup(a, p + 1)))
                    .collect(),
            },
            RuleInstance::Weakening { oformula, .. } => {
                if premise.len() == conclusion.len() {
                    RuleTranslator::Identity
                } else {
                    let a = *oformula;
                    let deleted_overs = (1..=conclusion.num_overgroups())
                        .filter(|&j| conclusion.overgroup(j).len() == 1 && conclusion.in_overgroup(a, j))
                        .collect();
                    RuleTranslator::Weakening { deleted: a, deleted_overs }
                }
            }
            RuleInstance::Contraction(a) => RuleTranslator::Contraction(*a),
            RuleInstance::OrIntro(a) | RuleInstance::AndIntro(a) => RuleTranslator::Split(*a),
            RuleInstance::PstIntro { oformula, new_over } => {
                RuleTranslator::Pst { a: *oformula, q: new_over.unwrap_or(conclusion.num_overgroups() + 1) }
            }
            RuleInstance::PcostIntro { oformula, add_over } => {
                RuleTranslator::Pcost { a: *oformula, s: add_over.iter().copied().collect() }
            }
        }
    }
}

impl MoveTranslator for RuleTranslator {
    fn to_inner(&self, mv: &Move) -> Option<Move> {
        match self {
            RuleTranslator::Identity => Some(mv.clone()),
            RuleTranslator::OformulaSwap(_) | RuleTranslator::CoordSwap(_) => self.to_outer(mv),
            RuleTranslator::Weakening { deleted, deleted_overs } => cell_map(mv, |mut c| {
                if c.oformula == *deleted {
                    return None;
                }
                if c.oformula > *deleted {
                    c.oformula -= 1;
                }
                for &j in deleted_overs.iter().rev() {
                    if j > c.coords.len() || c.coords.remove(j - 1) != 0 {
                        return None;
                    }
                }
                Some(c)
            }),
            RuleTranslator::Contraction(a) => cell_map(mv, |mut c| {
                if c.oformula > *a {
                    c.oformula += 1;
                } else if c.oformula == *a {
                    let (u, rest) = split_copy(&c.rest)?;
                    let (b, k) = if u % 2 == 1 { (*a, u.div_ceil(2)) } else { (a + 1, u / 2) };
                    c.rest = format!("{k}.{rest}");
                    c.oformula = b;
                }
                Some(c)
            }),
            RuleTranslator::OvergroupDuplication(p) => cell_map(mv, |mut c| {
                let (u1, u2) = (*c.coords.get(p - 1)?, *c.coords.get(*p)?);
                let u = match (u1, u2) {
                    (0, 0) => 0,
                    (0, _) | (_, 0) => return None,
                    _ => pair(u1, u2)?,
                };
                c.coords.remove(*p);
                c.coords[p - 1] = u;
                Some(c)
            }),
            RuleTranslator::Merging { p, membership } => cell_map(mv, |mut c| {
                let u = *c.coords.get(p - 1)?;
                let (u1, u2) = match membership.get(c.oformula - 1)? {
                    (false, false) => (u == 0).then_some((0, 0))?,
                    (true, false) => (u, 0),
                    (false, true) => (0, u),
                    (true, true) => unpair(u)?,
                };
                c.coords[p - 1] = u1;
                c.coords.insert(*p, u2);
                Some(c)
            }),
            RuleTranslator::Split(a) => cell_map(mv, |mut c| {
                if c.oformula > *a {
                    c.oformula += 1;
                } else if c.oformula == *a {
                    let (side, rest) = c.rest.split_once('.')?;
                    c.oformula = match side {
                        "1" => *a,
                        "2" => a + 1,
                        _ => return None,
                    };
                    c.rest = rest.to_string();
                }
                Some(c)
            }),
            RuleTranslator::Pst { a, q } => cell_map(mv, |mut c| {
                if *q > c.coords.len() + 1 {
                    return None;
                }
                if c.oformula == *a {
                    let (u, rest) = split_copy(&c.rest)?;
                    c.coords.insert(q - 1, u);
                    c.rest = rest.to_string();
                } else {
                    c.coords.insert(q - 1, 0);
                }
                Some(c)
            }),
            RuleTranslator::Pcost { a, s } => cell_map(mv, |mut c| {
                if c.oformula != *a {
                    return Some(c);
                }
                if s.iter().any(|&j| c.coords.get(j - 1) != Some(&0)) {
                    return None;
                }
                let (v, rest) = split_copy(&c.rest)?;
                let us = unpair_n(v, s.len())?;
                for (&j, u) in s.iter().zip(us) {
                    c.coords[j - 1] = u;
                }
                c.rest = rest.to_string();
                Some(c)
            }),
            RuleTranslator::Declubsuit => {
                let (u, _) = split_copy(mv.as_str())?;
                debug_assert!(u > 0);
                Some(Move::new(format!("1;{}", mv.as_str())))
            }
            RuleTranslator::Depst => Some(Move::new(format!("1.{}", mv.as_str()))),
        }
    }

    fn to_outer(&self, mv: &Move) -> Option<Move> {
        match self {
            RuleTranslator::Identity => Some(mv.clone()),
            RuleTranslator::OformulaSwap(p) => cell_map(mv, |mut c| {
                if c.oformula == *p {
                    c.oformula = p + 1;
                } else if c.oformula == p + 1 {
                    c.oformula = *p;
                }
                Some(c)
            }),
            RuleTranslator::CoordSwap(p) => cell_map(mv, |mut c| {
                if p + 1 > c.coords.len() {
                    return None;
                }
                c.coords.swap(p - 1, *p);
                Some(c)
            }),
            RuleTranslator::Weakening { deleted, deleted_overs } => cell_map(mv, |mut c| {
                if c.oformula >= *deleted {
                    c.oformula += 1;
                }
                for &j in deleted_overs {
                    if j > c.coords.len() + 1 {
                        return None;
                    }
                    c.coords.insert(j - 1, 0);
                }
                Some(c)
            }),
            RuleTranslator::Contraction(a) => cell_map(mv, |mut c| {
                if c.oformula == *a || c.oformula == a + 1 {
                    let (k, rest) = split_copy(&c.rest)?;
                    let u = if c.oformula == *a { k.checked_mul(2)? - 1 } else { k.checked_mul(2)? };
                    c.rest = format!("{u}.{rest}");
                    c.oformula = *a;
                } else if c.oformula > a + 1 {
                    c.oformula -= 1;
                }
                Some(c)
            }),
            RuleTranslator::OvergroupDuplication(p) => cell_map(mv, |mut c| {
                let u = *c.coords.get(p - 1)?;
                let (u1, u2) = if u == 0 { (0, 0) } else { unpair(u)? };
                c.coords[p - 1] = u1;
                c.coords.insert(*p, u2);
                Some(c)
            }),
            RuleTranslator::Merging { p, membership } => cell_map(mv, |mut c| {
                let (u1, u2) = (*c.coords.get(p - 1)?, *c.coords.get(*p)?);
                let u = match membership.get(c.oformula - 1)? {
                    (false, false) => (u1 == 0 && u2 == 0).then_some(0)?,
                    (true, false) => (u2 == 0).then_some(u1)?,
                    (false, true) => (u1 == 0).then_some(u2)?,
                    (true, true) => pair(u1, u2)?,
                };
                c.coords.remove(*p);
                c.coords[p - 1] = u;
                Some(c)
            }),
            RuleTranslator::Split(a) => cell_map(mv, |mut c| {
                if c.oformula == *a {
                    c.rest = format!("1.{}", c.rest);
                } else if c.oformula == a + 1 {
                    c.oformula = *a;
                    c.rest = format!("2.{}", c.rest);
                } else if c.oformula > a + 1 {
                    c.oformula -= 1;
                }
                Some(c)
            }),
            RuleTranslator::Pst { a, q } => cell_map(mv, |mut c| {
                if *q > c.coords.len() {
                    return None;
                }
                let u = c.coords.remove(q - 1);
                if c.oformula == *a {
                    if u == 0 {
                        return None;
                    }
                    c.rest = format!("{u}.{}", c.rest);
                } else if u != 0 {
                    return None;
                }
                Some(c)
            }),
            RuleTranslator::Pcost { a, s } => cell_map(mv, |mut c| {
                if c.oformula != *a {
                    return Some(c);
                }
                let us = s.iter().map(|&j| c.coords.get(j - 1).copied()).collect::<Option<Vec<u64>>>()?;
                let u = pair_n(&us)?;
                for &j in s {
                    c.coords[j - 1] = 0;
                }
                c.rest = format!("{u}.{}", c.rest);
                Some(c)
            }),
            RuleTranslator::Declubsuit => {
                let cell = CellMove::parse(mv.as_str())?;
                if cell.oformula != 1 || cell.coords.len() != 1 || cell.coords[0] == 0 {
                    return None;
                }
                Some(Move::new(format!("{}.{}", cell.coords[0], cell.rest)))
            }
            RuleTranslator::Depst => {
                let (u, rest) = split_copy(mv.as_str())?;
                (u == 1).then(|| Move::new(rest))
            }
        }
    }
}

/// Limit on consecutive absorbed inner moves before the wrapper idles.
const ABSORB_CAP: usize = 64;

/// Runs `inner` on an imaginary play and mirrors it into the real play
/// through a translator.
#[derive(Clone)]
pub struct Translated {
    inner: Box<dyn MachineStrategy>,
    translator: Arc<dyn MoveTranslator>,
    imaginary: Run,
    seen: usize,
}

impl Translated {
    pub fn new(inner: Box<dyn MachineStrategy>, translator: Arc<dyn MoveTranslator>) -> Self {
        Translated { inner, translator, imaginary: Run::empty(), seen: 0 }
    }

    pub fn imaginary_run(&self) -> &Run {
        &self.imaginary
    }

    pub fn inner(&self) -> &dyn MachineStrategy {
        self.inner.as_ref()
    }
}

impl MachineStrategy for Translated {
    fn next(&mut self, run: &Run, step: usize) -> Action {
        for lm in &run.labmoves()[self.seen.min(run.len())..] {
            if lm.player == Player::Bot {
                if let Some(mv) = self.translator.to_inner(&lm.mv) {
                    self.imaginary.push(Labmove::bot(mv));
                }
            }
        }
        self.seen = run.len();
        for _ in 0..ABSORB_CAP {
            match self.inner.next(&self.imaginary, step) {
                Action::MakeMove(mv) => {
                    self.imaginary.push(Labmove::top(mv.clone()));
                    if let Some(out) = self.translator.to_outer(&mv) {
                        return Action::MakeMove(out);
                    }
                }
                other => return other,
            }
        }
        Action::Idle
    }

    fn clone_box(&self) -> Box<dyn MachineStrategy> {
        Box::new(self.clone())
    }

    fn name(&self) -> String {
        format!("{:?}({})", self.translator, self.inner.name())
    }
}

pub fn transform_strategy(
    r: &RuleInstance,
    premise: &Cirquent,
    conclusion: &Cirquent,
    inner: Box<dyn MachineStrategy>,
) -> Translated {
    Translated::new(inner, Arc::new(RuleTranslator::for_rule(r, premise, conclusion)))
}

/// A strategy for `(F♣)*` turned into one for `(⫰F)*`.
pub fn declubsuit(inner: Box<dyn MachineStrategy>) -> Translated {
    Translated::new(inner, Arc::new(RuleTranslator::Declubsuit))
}

/// A strategy for `(⫰F)*` turned into one for `F*` by playing copy 1 only.
pub fn depst(inner: Box<dyn MachineStrategy>) -> Translated {
    Translated::new(inner, Arc::new(RuleTranslator::Depst))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("proof does not verify: {0}")]
    Unverified(#[from] ProofError),
    #[error("formula-level extraction needs a proof ending in a clubsuit cirquent")]
    NotClubsuit,
}

/// Folds the axiom copycat through the translators of every step. With
/// `formula_level`, the result is further wrapped to play `F*` directly,
/// where the last cirquent is `F♣`.
pub fn extract_solution(p: &Proof, formula_level: bool) -> Result<Box<dyn MachineStrategy>, ExtractError> {
    verify_proof(p)?;
    let mut strategy: Box<dyn MachineStrategy> = Box::new(axiom_strategy(p.steps[0].cirquent.len() / 2));
    for pair in p.steps.windows(2) {
        strategy = Box::new(transform_strategy(&pair[1].rule, &pair[0].cirquent, &pair[1].cirquent, strategy));
    }
    if formula_level {
        p.clubsuit_formula().ok_or(ExtractError::NotClubsuit)?;
        strategy = Box::new(depst(Box::new(declubsuit(strategy))));
    }
    Ok(strategy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{fixture_p1, fixture_p2};
    use crate::cirquent::parse_cirquent;
    use crate::formula::{parse_formula, Atom};
    use crate::games::{finite_game, interpret_cirquent, interpret_formula, make_finite_game, run_of, Interpretation};
    use Player::{Bot as B, Top as T};

    fn m(s: &str) -> Move {
        Move::new(s)
    }

    fn interp(label: Player) -> Interpretation {
        Interpretation::new().with(
            Atom::new("P").unwrap(),
            make_finite_game(finite_game(&[("()", label), ("B m", B), ("T m", T), ("B m;T n", T)])),
        )
    }

    #[test]
    fn idle_machine_on_top_won_game() {
        let g = finite_game(&[("()", T)]);
        let out = simulate(&mut IdleMachine, &mut SilentEnv, &g, 5).unwrap();
        assert_eq!(out.run, Run::empty());
        assert_eq!(out.winner, T);
        assert_eq!(out.trace_text(), "1 M:idle\nwinner: T grants:0\n");
    }

    #[test]
    fn zero_budget() {
        let g = finite_game(&[("()", T)]);
        assert_eq!(simulate(&mut IdleMachine, &mut SilentEnv, &g, 0), Err(SimError::ZeroBudget));
    }

    #[test]
    fn illegal_machine_move_forfeits() {
        let g = finite_game(&[("()", T)]);
        let mut machine = ScriptedMachine::new([m("x")]);
        let out = simulate(&mut machine, &mut SilentEnv, &g, 5).unwrap();
        assert_eq!(out.winner, B);
        assert_eq!(out.first_illegal, Some(Illegality { index: 0, offender: T }));
        assert!(out.trace_text().contains("machine offender"));
    }

    #[test]
    fn axiom_copycat_play() {
        let c = parse_cirquent("oformulas: ~P | P ; under: {1,2} ; over: {1,2}").unwrap();
        for label in [T, B] {
            let g = interpret_cirquent(&c, &interp(label)).unwrap();
            let mut env = ScriptedEnv::new([m("1;1.m")]);
            let out = simulate(&mut axiom_strategy(1), &mut env, g.as_ref(), 20).unwrap();
            assert_eq!(out.run, run_of(&[(B, "1;1.m"), (T, "2;1.m")]));
            assert_eq!(out.winner, T);
        }
    }

    #[test]
    fn axiom_responses() {
        let s = axiom_strategy(2);
        assert_eq!(axiom_strategy(1).respond(&m("1;2.m")), Some(m("2;2.m")));
        assert_eq!(s.respond(&m("4;1,1.m")), Some(m("3;1,1.m")));
        assert_eq!(s.respond(&m("5;1,1.m")), None);
        let g = finite_game(&[("()", T)]);
        let out = simulate(&mut axiom_strategy(1), &mut SilentEnv, &g, 10).unwrap();
        assert!(out.run.is_empty());
        assert_eq!(out.grants, 1);
    }

    #[test]
    fn pairing_values() {
        assert_eq!(pair(1, 1), Some(1));
        assert_eq!(pair(1, 2), Some(2));
        assert_eq!(pair(2, 1), Some(3));
        for u in 1..2000 {
            let (a, b) = unpair(u).unwrap();
            assert_eq!(pair(a, b), Some(u));
        }
        assert_eq!(pair_n(&[]), Some(1));
        assert_eq!(unpair_n(2, 0), None);
        assert_eq!(unpair_n(pair_n(&[3, 1, 4]).unwrap(), 3), Some(vec![3, 1, 4]));
        assert_eq!(unpair(u64::MAX).map(|(a, b)| pair(a, b)), Some(Some(u64::MAX)));
    }

    #[test]
    fn translator_examples() {
        let dup = RuleTranslator::OvergroupDuplication(2);
        assert_eq!(dup.to_inner(&m("1;2,1,1.m")), Some(m("1;2,1.m")));
        let split = RuleTranslator::Split(2);
        assert_eq!(split.to_outer(&m("3;1.m")), Some(m("2;1.2.m")));
        let pcost = RuleTranslator::Pcost { a: 1, s: vec![2] };
        assert_eq!(pcost.to_inner(&m("1;1,0.7.m")), Some(m("1;1,7.m")));
        assert_eq!(pcost.to_inner(&m("1;1,0.x.m")), None);
        let pcost0 = RuleTranslator::Pcost { a: 1, s: vec![] };
        assert_eq!(pcost0.to_inner(&m("1;1.2.m")), None);
        assert_eq!(pcost0.to_outer(&m("1;1.m")), Some(m("1;1.1.m")));
        assert_eq!(RuleTranslator::Declubsuit.to_inner(&m("3.m")), Some(m("1;3.m")));
        assert_eq!(RuleTranslator::Declubsuit.to_outer(&m("1;5.m")), Some(m("5.m")));
        assert_eq!(RuleTranslator::Depst.to_inner(&m("m")), Some(m("1.m")));
        assert_eq!(RuleTranslator::Depst.to_outer(&m("1.k")), Some(m("k")));
        assert_eq!(RuleTranslator::Depst.to_outer(&m("2.k")), None);
        let contraction = RuleTranslator::Contraction(1);
        assert_eq!(contraction.to_inner(&m("1;1.3.m")), Some(m("1;1.2.m")));
        assert_eq!(contraction.to_inner(&m("1;1.4.m")), Some(m("2;1.2.m")));
        assert_eq!(contraction.to_inner(&m("2;1.m")), Some(m("3;1.m")));
    }

    #[test]
    fn p1_copycat() {
        let p1 = fixture_p1();
        let c = p1.last().unwrap().clone();
        let g = interpret_cirquent(&c, &interp(B)).unwrap();
        let mut s = extract_solution(&p1, false).unwrap();
        let mut env = ScriptedEnv::new([m("1;1.1.m")]);
        let out = simulate(s.as_mut(), &mut env, g.as_ref(), 20).unwrap();
        assert_eq!(out.run, run_of(&[(B, "1;1.1.m"), (T, "1;1.2.m")]));
        assert_eq!(out.winner, T);
        let mut s = extract_solution(&p1, false).unwrap();
        let mut env = ScriptedEnv::new([m("1;4.2.m")]);
        let out = simulate(s.as_mut(), &mut env, g.as_ref(), 20).unwrap();
        assert_eq!(out.run, run_of(&[(B, "1;4.2.m"), (T, "1;4.1.m")]));
    }

    #[test]
    fn p2_formula_level() {
        let p2 = fixture_p2();
        let f = parse_formula("?~P \\/ !P").unwrap();
        for label in [T, B] {
            let g = interpret_formula(&f, &interp(label)).unwrap();
            let mut s = extract_solution(&p2, true).unwrap();
            let mut env = ScriptedEnv::new([m("2.3.m"), m("1.2.m")]);
            let out = simulate(s.as_mut(), &mut env, g.as_ref(), 50).unwrap();
            assert_eq!(out.first_illegal, None);
            assert_eq!(out.winner, T, "{}", out.trace_text());
        }
    }

    #[test]
    fn depst_projects_copy_one() {
        let mut s = depst(Box::new(ScriptedMachine::new([m("2.k"), m("1.k")])));
        let g = finite_game(&[("()", T), ("T k", T)]);
        let out = simulate(&mut s, &mut SilentEnv, &g, 5).unwrap();
        assert_eq!(out.run, run_of(&[(T, "k")]));
        assert_eq!(crate::runs::project_prefix(s.imaginary_run(), "1."), out.run);
    }

    #[test]
    fn extraction_rejects_unverified() {
        let mut p = fixture_p1();
        p.steps.swap(0, 1);
        assert!(matches!(extract_solution(&p, false), Err(ExtractError::Unverified(_))));
    }
}
