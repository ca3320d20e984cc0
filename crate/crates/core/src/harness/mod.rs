//! Adversaries, random interpretations, brute-force oracles and end-to-end
//! trials for extracted strategies.

pub mod adversary;
pub mod fixtures;
pub mod identities;
pub mod oracle;
pub mod random;
pub mod separation;

use std::fmt;

use thiserror::Error;

pub use adversary::{loop_counterstrategy, structural_script, LoopEnv, RandomLegalEnv};
pub use oracle::{brute_force_cirquent_legal, brute_force_cirquent_winner, brute_force_legal, brute_force_winner};
pub use random::{random_finite_interpretation, Arena};
pub use separation::{separation_demo, RotatingCopycat, SeparationReport};

use crate::calculus::{Proof, ProofError};
use crate::games::{interpret_cirquent, interpret_formula, GameError, GameRef, Interpretation};
use crate::runs::{Player, Run};
use crate::strategy::{extract_solution, simulate, EnvStrategy, ExtractError, MachineStrategy, SimError, SilentEnv};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialReport {
    pub id: usize,
    pub seed: u64,
    pub game: String,
    pub adversary: String,
    pub budget: usize,
    pub run: Run,
    pub winner: Player,
    pub grants: usize,
    pub pass: bool,
}

impl fmt::Display for TrialReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "trial {} seed={} winner={} pass={}", self.id, self.seed, self.winner, self.pass)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Summary {
    pub passed: usize,
    pub total: usize,
}

impl Summary {
    pub fn of(reports: &[TrialReport]) -> Self {
        Summary { passed: reports.iter().filter(|r| r.pass).count(), total: reports.len() }
    }

    pub fn all_passed(&self) -> bool {
        self.passed == self.total
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "passed {}/{}", self.passed, self.total)
    }
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Plays one trial. A trial passes when the machine wins.
pub fn run_trial(
    id: usize,
    seed: u64,
    strategy: &mut dyn MachineStrategy,
    game: &GameRef,
    adversary: &mut dyn EnvStrategy,
    budget: usize,
) -> Result<TrialReport, SimError> {
    let outcome = simulate(strategy, adversary, game.as_ref(), budget)?;
    Ok(TrialReport {
        id,
        seed,
        game: game.describe(),
        adversary: adversary.name(),
        budget,
        run: outcome.run,
        winner: outcome.winner,
        grants: outcome.grants,
        pass: outcome.winner == Player::Top,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdversaryKind {
    Silent,
    RandomLegal,
    Scripted,
}

impl AdversaryKind {
    pub const ALL: [AdversaryKind; 3] = [AdversaryKind::Silent, AdversaryKind::RandomLegal, AdversaryKind::Scripted];
}

/// Moves a random or scripted adversary makes at most.
const ADVERSARY_MOVES: usize = 8;

pub fn make_adversary(kind: AdversaryKind, arena: &Arena, game: &GameRef, interp: &Interpretation, seed: u64) -> Box<dyn EnvStrategy> {
    let alphabets = random::alphabets(interp);
    match kind {
        AdversaryKind::Silent => Box::new(SilentEnv),
        AdversaryKind::RandomLegal => {
            Box::new(RandomLegalEnv::new(arena.clone(), game.clone(), alphabets, seed, ADVERSARY_MOVES))
        }
        AdversaryKind::Scripted => Box::new(structural_script(arena, game.clone(), &alphabets, seed, ADVERSARY_MOVES)),
    }
}

/// The arena an extracted strategy plays in: the last cirquent, or the
/// formula `F` when the proof ends in `F♣` and `formula_level` is set.
pub fn proof_arena(proof: &Proof, formula_level: bool) -> Result<Arena, HarnessError> {
    if formula_level {
        let f = proof.clubsuit_formula().ok_or(ExtractError::NotClubsuit)?;
        Ok(Arena::Formula(f.clone()))
    } else {
        let c = proof.last().ok_or(ExtractError::Unverified(ProofError::Empty))?;
        Ok(Arena::Cirquent(c.clone()))
    }
}

pub fn arena_game(arena: &Arena, interp: &Interpretation) -> Result<GameRef, GameError> {
    match arena {
        Arena::Formula(f) => interpret_formula(f, interp),
        Arena::Cirquent(c) => interpret_cirquent(c, interp),
    }
}

/// Settings for [`validity_trials`].
#[derive(Debug, Clone, Copy)]
pub struct TrialConfig {
    pub interpretations: usize,
    pub seed: u64,
    pub budget: usize,
    pub depth: usize,
    pub branching: usize,
}

impl Default for TrialConfig {
    fn default() -> Self {
        TrialConfig { interpretations: 100, seed: 0, budget: 200, depth: 3, branching: 3 }
    }
}

/// Extracts a strategy from `proof` and plays a fresh copy of it against
/// each adversary kind under `interpretations` random finite interpretations.
pub fn validity_trials(proof: &Proof, formula_level: bool, cfg: TrialConfig) -> Result<Vec<TrialReport>, HarnessError> {
    let strategy = extract_solution(proof, formula_level)?;
    let arena = proof_arena(proof, formula_level)?;
    let atoms = arena.atoms();
    let mut reports = Vec::new();
    for i in 0..cfg.interpretations {
        let seed = cfg.seed.wrapping_add(i as u64);
        let interp = random_finite_interpretation(&atoms, cfg.depth, cfg.branching, seed);
        let game = arena_game(&arena, &interp)?;
        for kind in AdversaryKind::ALL {
            let mut adversary = make_adversary(kind, &arena, &game, &interp, seed);
            let mut machine = strategy.clone();
            let id = reports.len() + 1;
            reports.push(run_trial(id, seed, machine.as_mut(), &game, adversary.as_mut(), cfg.budget)?);
        }
    }
    Ok(reports)
}
