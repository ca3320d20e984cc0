//! A bounded demonstration that `!P -> b!P` has no uniform solution.
//!
//! The LOOP environment keeps opening new threads of `b!P` with fresh
//! numbers. Afterwards the final position `Δ` is split into `Ω = Δ^{1.}`
//! (the `?~P` part) and `Γ = Δ^{2.}` (the `b!P` part). If some thread `y`
//! carries a run `Γ^{≼y}` that no copy of `~P` mirrors, interpreting `P` as
//! the enumeration game lost exactly on `Γ^{≼y}` makes the machine lose.

use std::fmt;
use std::sync::Arc;

use super::adversary::{final_numeral, loop_counterstrategy};
use crate::formula::{parse_formula, Atom};
use crate::games::{
    interpret_formula, thread_representatives, touched_copies, used_bitstrings, EnumerationGame, Interpretation,
};
use crate::runs::{negate_run, project_branch, project_prefix, InfiniteBitstring, Labmove, Move, Player, Run};
use crate::strategy::{simulate, Action, MachineStrategy, SimError};

pub const SEPARATION_GAME: &str = "?~P \\/ b!P";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparationReport {
    pub k: usize,
    pub run: Run,
    pub representatives: usize,
    pub distinct: bool,
    pub fresh: bool,
    pub witness: Option<InfiniteBitstring>,
    pub witness_run: Option<Run>,
    /// Winner of the final position under the induced interpretation.
    pub final_winner: Option<Player>,
    pub machine_illegal: bool,
}

impl SeparationReport {
    /// True when the bounded check found everything it looks for.
    pub fn conclusive(&self) -> bool {
        self.distinct && self.fresh && self.final_winner == Some(Player::Bot)
    }
}

impl fmt::Display for SeparationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "game: {SEPARATION_GAME}")?;
        writeln!(f, "final position: {}", self.run)?;
        if self.machine_illegal {
            writeln!(f, "machine made an illegal move")?;
        }
        writeln!(f, "thread representatives: {}", self.representatives)?;
        writeln!(f, "pairwise distinct: {}", self.distinct)?;
        writeln!(f, "fresh numbers: {}", self.fresh)?;
        match (&self.witness, &self.witness_run) {
            (Some(y), Some(r)) => {
                writeln!(f, "witness thread: {y}")?;
                writeln!(f, "interpretation: P = enumeration game lost by T exactly on {r}")?;
            }
            _ => writeln!(f, "witness thread: none")?,
        }
        if let Some(w) = self.final_winner {
            writeln!(f, "winner under that interpretation: {w}")?;
        }
        if self.conclusive() {
            write!(f, "verdict: consistent at bound k={}", self.k)
        } else {
            write!(f, "verdict: inconclusive at bound k={}", self.k)
        }
    }
}

/// Plays `machine` against LOOP for `k` iterations and analyses the result.
pub fn separation_demo(machine: &mut dyn MachineStrategy, k: usize, budget: usize) -> Result<SeparationReport, SimError> {
    let formula = parse_formula(SEPARATION_GAME).expect("fixed formula parses");
    let p = Atom::new("P").expect("valid atom");
    let play_interp = Interpretation::new().with(p.clone(), Arc::new(EnumerationGame::always_top()));
    let game = interpret_formula(&formula, &play_interp).expect("P is interpreted");
    let mut env = loop_counterstrategy(k);
    let outcome = simulate(machine, &mut env, game.as_ref(), budget)?;
    let delta = outcome.run;

    let omega = project_prefix(&delta, "1.");
    let gamma = project_prefix(&delta, "2.");
    let reps = thread_representatives(&used_bitstrings(&gamma));
    let projections: Vec<Run> = reps.iter().map(|x| project_branch(&gamma, x)).collect();
    let distinct = projections.iter().enumerate().all(|(i, a)| projections[i + 1..].iter().all(|b| a != b));

    let fresh = loop_numbers_fresh(&delta);

    let mirrored: Vec<Run> = touched_copies(&omega)
        .into_iter()
        .map(|v| negate_run(&project_prefix(&omega, &format!("{v}."))))
        .collect();
    let witness = reps
        .iter()
        .zip(&projections)
        .find(|(_, g)| !g.is_empty() && !mirrored.contains(g))
        .map(|(x, g)| (x.clone(), g.clone()));

    let (witness, witness_run, final_winner) = match witness {
        Some((y, target)) => {
            let interp = Interpretation::new().with(p, Arc::new(EnumerationGame::loses_on(target.clone())));
            let judged = interpret_formula(&formula, &interp).expect("P is interpreted");
            (Some(y), Some(target), Some(judged.winner(&delta)))
        }
        None => (None, None, None),
    };
    Ok(SeparationReport {
        k,
        run: delta,
        representatives: reps.len(),
        distinct,
        fresh,
        witness,
        witness_run,
        final_winner,
        machine_illegal: outcome.first_illegal.is_some_and(|i| i.offender == Player::Top),
    })
}

/// Answers the environment's `2.w.u` with `1.n.u`, cycling `n` through
/// `1..=r`. Used to exercise the demo against a machine that does move.
#[derive(Debug, Clone)]
pub struct RotatingCopycat {
    r: u64,
    n: u64,
    seen: usize,
    pending: std::collections::VecDeque<Move>,
}

impl RotatingCopycat {
    pub fn new(r: u64) -> Self {
        RotatingCopycat { r: r.max(1), n: 0, seen: 0, pending: Default::default() }
    }
}

impl MachineStrategy for RotatingCopycat {
    fn next(&mut self, run: &Run, _: usize) -> Action {
        for lm in &run.labmoves()[self.seen.min(run.len())..] {
            if lm.player != Player::Bot {
                continue;
            }
            let Some(rest) = lm.mv.as_str().strip_prefix("2.") else { continue };
            let Some((_, u)) = rest.split_once('.') else { continue };
            self.n = self.n % self.r + 1;
            self.pending.push_back(Move::new(format!("1.{}.{u}", self.n)));
        }
        self.seen = run.len();
        match self.pending.pop_front() {
            Some(m) => Action::MakeMove(m),
            None => Action::GrantPermission,
        }
    }

    fn clone_box(&self) -> Box<dyn MachineStrategy> {
        Box::new(self.clone())
    }

    fn name(&self) -> String {
        format!("rotating:{}", self.r)
    }
}

/// Whether every environment move `2.w.u` carries a number `u` that does
/// not end any earlier move of the run.
pub fn loop_numbers_fresh(run: &Run) -> bool {
    let mut used = std::collections::BTreeSet::new();
    for lm in run.iter() {
        let n = final_numeral(&lm.mv);
        if lm.player == Player::Bot && lm.mv.as_str().starts_with("2.") {
            match n {
                Some(u) if !used.contains(&u) => {}
                _ => return false,
            }
        }
        used.extend(n);
    }
    true
}

/// Helper for reports: `⟨⊥…⟩` runs of a single player.
pub fn all_by(run: &Run, p: Player) -> bool {
    run.iter().all(|lm: &Labmove| lm.player == p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategy::Granter;

    #[test]
    fn granter_k4() {
        let report = separation_demo(&mut Granter, 4, 100).unwrap();
        assert_eq!(report.run.len(), 4);
        assert!(all_by(&report.run, Player::Bot));
        assert!(report.distinct);
        assert!(report.witness.is_some());
        assert_eq!(report.final_winner, Some(Player::Bot));
        assert!(report.to_string().ends_with("consistent at bound k=4"));
    }

    #[test]
    fn granter_k1() {
        let report = separation_demo(&mut Granter, 1, 10).unwrap();
        assert_eq!(report.representatives, 1);
        assert!(report.distinct);
    }

    #[test]
    fn rotating_copycat_reports() {
        let report = separation_demo(&mut RotatingCopycat::new(3), 8, 200).unwrap();
        assert!(report.distinct);
        assert!(!report.machine_illegal);
        let text = report.to_string();
        assert!(text.contains("verdict:"));
    }
}
