//! Seeded generators for interpretations, formulas, cirquents and runs.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cirquent::{Cirquent, Group};
use crate::formula::{Atom, Formula};
use crate::games::{FiniteGame, Interpretation};
use crate::runs::{bits_to_string, Labmove, Move, Player, Run};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_player(rng: &mut impl Rng) -> Player {
    if rng.gen() {
        Player::Top
    } else {
        Player::Bot
    }
}

/// A random finite game of depth at most `d` whose positions have at most
/// `b` children. The root always has at least one child. Moves come from an
/// alphabet of `b` lowercase letters.
pub fn random_finite_game(rng: &mut impl Rng, d: usize, b: usize) -> FiniteGame {
    assert!(d >= 1 && b >= 1, "depth and branching must be positive");
    let alphabet: Vec<String> = (0..b).map(|i| ((b'a' + (i % 26) as u8) as char).to_string()).collect();
    let mut labels = BTreeMap::new();
    let mut frontier = vec![Run::empty()];
    labels.insert(Run::empty(), random_player(rng));
    for depth in 0..d {
        let mut next = Vec::new();
        for run in frontier {
            let lo = if depth == 0 { 1 } else { 0 };
            let children = rng.gen_range(lo..=b);
            let mut options: Vec<Labmove> = alphabet
                .iter()
                .flat_map(|m| [Labmove::top(m.as_str()), Labmove::bot(m.as_str())])
                .collect();
            options.shuffle(rng);
            for lm in options.into_iter().take(children) {
                let child = run.extended(lm);
                labels.insert(child.clone(), random_player(rng));
                next.push(child);
            }
        }
        frontier = next;
    }
    FiniteGame::from_labels(labels).expect("generated tree is prefix closed and labelled")
}

/// Maps every atom to a [`random_finite_game`]; reproducible by seed.
pub fn random_finite_interpretation(atoms: &BTreeSet<Atom>, d: usize, b: usize, seed: u64) -> Interpretation {
    let mut rng = rng(seed);
    let mut out = Interpretation::new();
    for a in atoms {
        out.insert(a.clone(), Arc::new(random_finite_game(&mut rng, d, b)));
    }
    out
}

/// A random formula over `atoms` of depth at most `depth`.
pub fn random_formula(rng: &mut impl Rng, atoms: &[Atom], depth: usize) -> Formula {
    let atom = atoms.choose(rng).expect("at least one atom").clone();
    if depth == 0 || rng.gen_ratio(1, 4) {
        return if rng.gen() { Formula::Atom(atom) } else { Formula::NegAtom(atom) };
    }
    let sub = |rng: &mut _| Box::new(random_formula(rng, atoms, depth - 1));
    match rng.gen_range(0..6) {
        0 => Formula::And(sub(rng), sub(rng)),
        1 => Formula::Or(sub(rng), sub(rng)),
        2 => Formula::Pst(sub(rng)),
        3 => Formula::Pcost(sub(rng)),
        4 => Formula::St(sub(rng)),
        _ => Formula::Cost(sub(rng)),
    }
}

fn random_groups(rng: &mut impl Rng, k: usize, count: usize) -> Vec<Group> {
    let mut groups: Vec<Group> = (0..count)
        .map(|_| {
            let mut g: Group = (1..=k).filter(|_| rng.gen_ratio(1, 2)).collect();
            if g.is_empty() {
                g.insert(rng.gen_range(1..=k));
            }
            g
        })
        .collect();
    for a in 1..=k {
        if !groups.iter().any(|g| g.contains(&a)) {
            let i = rng.gen_range(0..count);
            groups[i].insert(a);
        }
    }
    groups
}

/// A random valid cirquent with up to `max_oformulas` oformulas of depth at
/// most `depth`, up to three undergroups and up to `max_over` overgroups.
pub fn random_cirquent(rng: &mut impl Rng, atoms: &[Atom], max_oformulas: usize, depth: usize, max_over: usize) -> Cirquent {
    let k = rng.gen_range(1..=max_oformulas);
    let fs = (0..k).map(|_| random_formula(rng, atoms, depth)).collect();
    let nu = rng.gen_range(1..=3);
    let no = rng.gen_range(1..=max_over);
    let us = random_groups(rng, k, nu);
    let os = random_groups(rng, k, no);
    Cirquent::new(fs, us, os).expect("generated cirquent is valid")
}

/// What moves are played in: a formula's game or a cirquent's game.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Arena {
    Formula(Formula),
    Cirquent(Cirquent),
}

impl Arena {
    pub fn atoms(&self) -> BTreeSet<Atom> {
        match self {
            Arena::Formula(f) => f.atoms(),
            Arena::Cirquent(c) => c.atoms(),
        }
    }
}

/// Base move alphabets per atom, taken from the interpretation's games.
pub fn alphabets(interp: &Interpretation) -> BTreeMap<Atom, Vec<Move>> {
    interp
        .atoms()
        .map(|a| {
            let game = interp.get(a).expect("listed atom");
            let alphabet = game.move_alphabet().filter(|v| !v.is_empty()).unwrap_or_else(|| vec![Move::new("0")]);
            (a.clone(), alphabet)
        })
        .collect()
}

/// A structurally well-shaped random move for `f`: the right prefixes for
/// every operator, copies in `1..=3`, bitstrings up to length 2.
pub fn random_formula_move(rng: &mut impl Rng, f: &Formula, alphabets: &BTreeMap<Atom, Vec<Move>>) -> String {
    match f {
        Formula::Atom(a) | Formula::NegAtom(a) => alphabets
            .get(a)
            .and_then(|v| v.choose(rng))
            .map(|m| m.as_str().to_string())
            .unwrap_or_else(|| "0".into()),
        Formula::And(l, r) | Formula::Or(l, r) => {
            if rng.gen() {
                format!("1.{}", random_formula_move(rng, l, alphabets))
            } else {
                format!("2.{}", random_formula_move(rng, r, alphabets))
            }
        }
        Formula::Pst(g) | Formula::Pcost(g) => {
            let u = rng.gen_range(1..=3);
            format!("{u}.{}", random_formula_move(rng, g, alphabets))
        }
        Formula::St(g) | Formula::Cost(g) => {
            let len = rng.gen_range(0..=2);
            let w: Vec<bool> = (0..len).map(|_| rng.gen()).collect();
            format!("{}.{}", bits_to_string(&w), random_formula_move(rng, g, alphabets))
        }
    }
}

/// A well-shaped random move for a cirquent: `a;u⃗.α` with `u_j` in `1..=3`
/// exactly for the overgroups containing `a`.
pub fn random_cirquent_move(rng: &mut impl Rng, c: &Cirquent, alphabets: &BTreeMap<Atom, Vec<Move>>) -> String {
    let a = rng.gen_range(1..=c.len());
    let coords: Vec<String> = (1..=c.num_overgroups())
        .map(|j| if c.in_overgroup(a, j) { rng.gen_range(1..=3u64) } else { 0 }.to_string())
        .collect();
    format!("{a};{}.{}", coords.join(","), random_formula_move(rng, c.oformula(a), alphabets))
}

pub fn random_move(rng: &mut impl Rng, arena: &Arena, alphabets: &BTreeMap<Atom, Vec<Move>>) -> Move {
    Move::new(match arena {
        Arena::Formula(f) => random_formula_move(rng, f, alphabets),
        Arena::Cirquent(c) => random_cirquent_move(rng, c, alphabets),
    })
}

/// A random run of up to `max_len` labmoves; about one move in ten is
/// malformed so that illegal runs are exercised too.
pub fn random_run(rng: &mut impl Rng, arena: &Arena, alphabets: &BTreeMap<Atom, Vec<Move>>, max_len: usize) -> Run {
    let len = rng.gen_range(0..=max_len);
    (0..len)
        .map(|_| {
            let mv = if rng.gen_ratio(1, 10) {
                Move::new(["z", "0.z", "1;9.z", "x.1"].choose(rng).expect("nonempty").to_string())
            } else {
                random_move(rng, arena, alphabets)
            };
            Labmove::new(random_player(rng), mv)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::Game;

    fn p() -> BTreeSet<Atom> {
        [Atom::new("P").unwrap()].into_iter().collect()
    }

    #[test]
    fn one_move_game() {
        for seed in 0..20 {
            let mut r = rng(seed);
            let g = random_finite_game(&mut r, 1, 1);
            assert_eq!(g.positions(), 2);
        }
    }

    #[test]
    fn deterministic_by_seed() {
        assert_eq!(random_finite_game(&mut rng(7), 3, 3), random_finite_game(&mut rng(7), 3, 3));
        let a = random_finite_interpretation(&p(), 3, 3, 7).describe();
        let b = random_finite_interpretation(&p(), 3, 3, 7).describe();
        assert_eq!(a, b);
    }

    #[test]
    fn size_bound() {
        for seed in 0..200 {
            let g = random_finite_game(&mut rng(seed), 2, 2);
            assert!(g.positions() <= 7 && g.positions() >= 2);
            assert!(g.depth() <= 2);
            for run in g.labels().keys() {
                assert!(g.is_legal(run));
            }
        }
    }

    #[test]
    fn random_cirquents_are_valid() {
        let atoms = vec![Atom::new("P").unwrap(), Atom::new("Q").unwrap()];
        for seed in 0..100 {
            let c = random_cirquent(&mut rng(seed), &atoms, 4, 2, 3);
            assert!(crate::cirquent::validate_cirquent(&c).is_ok());
        }
    }
}
