//! Environment strategies used to test machines.

use std::collections::{BTreeMap, BTreeSet};

use rand_chacha::ChaCha8Rng;

use super::random::{random_move, rng, Arena};
use crate::formula::Atom;
use crate::games::GameRef;
use crate::runs::{bits_to_string, parse_natural, Labmove, Move, Run};
use crate::strategy::{EnvStrategy, ScriptedEnv};

/// Proposes random well-shaped moves and plays the first one that keeps the
/// position legal. Quiesces after `max_moves` moves or three fruitless grants.
pub struct RandomLegalEnv {
    arena: Arena,
    game: GameRef,
    alphabets: BTreeMap<Atom, Vec<Move>>,
    rng: ChaCha8Rng,
    max_moves: usize,
    made: usize,
    misses: usize,
}

impl RandomLegalEnv {
    pub const ATTEMPTS: usize = 40;

    pub fn new(arena: Arena, game: GameRef, alphabets: BTreeMap<Atom, Vec<Move>>, seed: u64, max_moves: usize) -> Self {
        RandomLegalEnv { arena, game, alphabets, rng: rng(seed), max_moves, made: 0, misses: 0 }
    }
}

impl EnvStrategy for RandomLegalEnv {
    fn on_grant(&mut self, run: &Run) -> Option<Move> {
        if self.quiescent() {
            return None;
        }
        for _ in 0..Self::ATTEMPTS {
            let mv = random_move(&mut self.rng, &self.arena, &self.alphabets);
            if self.game.is_legal(&run.extended(Labmove::bot(mv.clone()))) {
                self.made += 1;
                self.misses = 0;
                return Some(mv);
            }
        }
        self.misses += 1;
        None
    }

    fn quiescent(&self) -> bool {
        self.made >= self.max_moves || self.misses >= 3
    }

    fn name(&self) -> String {
        "random-legal".into()
    }
}

/// A fixed list of random well-shaped moves drawn before play, played in
/// order and skipping any that would be illegal at that point.
pub fn structural_script(arena: &Arena, game: GameRef, alphabets: &BTreeMap<Atom, Vec<Move>>, seed: u64, len: usize) -> ScriptedEnv {
    let mut r = rng(seed);
    let moves: Vec<Move> = (0..len).map(|_| random_move(&mut r, arena, alphabets)).collect();
    ScriptedEnv::new(moves).legal_only(game)
}

/// The `i`-th finite bitstring (from 1) in shortlex order: ε, 0, 1, 00, …
pub fn shortlex(i: usize) -> Vec<bool> {
    assert!(i >= 1);
    // i = 2^len + offset, with offset written in len bits
    let len = (usize::BITS - 1 - i.leading_zeros()) as usize;
    let offset = i - (1 << len);
    (0..len).rev().map(|b| (offset >> b) & 1 == 1).collect()
}

/// The LOOP environment against `?~P ∨ ∘|P`: on its `i`-th grant it plays
/// `2.w_i.u_i`, where `w_i` is the `i`-th bitstring in shortlex order and
/// `u_i` is a number not used so far by either player. Silent after `k`
/// grants.
#[derive(Debug, Clone)]
pub struct LoopEnv {
    k: usize,
    i: usize,
    counter: u64,
    played: Vec<u64>,
}

pub fn loop_counterstrategy(k: usize) -> LoopEnv {
    LoopEnv { k, i: 0, counter: 1, played: Vec::new() }
}

impl LoopEnv {
    /// The numbers this environment has chosen so far.
    pub fn played(&self) -> &[u64] {
        &self.played
    }
}

/// The numeral at the end of a move (`1.v.n` or `2.w.n`), if any.
pub fn final_numeral(mv: &Move) -> Option<u64> {
    parse_natural(mv.as_str().rsplit('.').next()?)
}

impl EnvStrategy for LoopEnv {
    fn on_grant(&mut self, run: &Run) -> Option<Move> {
        if self.i >= self.k {
            return None;
        }
        self.i += 1;
        let used: BTreeSet<u64> = run.iter().filter_map(|lm| final_numeral(&lm.mv)).collect();
        while used.contains(&self.counter) {
            self.counter += 1;
        }
        let u = self.counter;
        self.counter += 1;
        self.played.push(u);
        Some(Move::new(format!("2.{}.{u}", bits_to_string(&shortlex(self.i)))))
    }

    fn quiescent(&self) -> bool {
        self.i >= self.k
    }

    fn name(&self) -> String {
        format!("loop:{}", self.k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runs::Player;

    #[test]
    fn shortlex_order() {
        let names: Vec<String> = (1..=8).map(|i| bits_to_string(&shortlex(i))).collect();
        assert_eq!(names, ["", "0", "1", "00", "01", "10", "11", "000"]);
    }

    #[test]
    fn loop_first_moves() {
        let mut env = loop_counterstrategy(3);
        let mut run = Run::empty();
        let mut moves = Vec::new();
        for _ in 0..5 {
            if let Some(m) = env.on_grant(&run) {
                run.push(Labmove::new(Player::Bot, m.clone()));
                moves.push(m.to_string());
            }
        }
        assert_eq!(moves, ["2..1", "2.0.2", "2.1.3"]);
        assert!(env.quiescent());
    }

    #[test]
    fn loop_skips_machine_numbers() {
        let mut env = loop_counterstrategy(2);
        let mut run: Run = [Labmove::top("1.1.1"), Labmove::top("1.2.2")].into_iter().collect();
        let m = env.on_grant(&run).unwrap();
        assert_eq!(m.as_str(), "2..3");
        run.push(Labmove::bot(m));
        assert_eq!(env.on_grant(&run).unwrap().as_str(), "2.0.4");
    }

    #[test]
    fn loop_zero_grants() {
        let env = loop_counterstrategy(4);
        assert!(env.played().is_empty());
    }
}
