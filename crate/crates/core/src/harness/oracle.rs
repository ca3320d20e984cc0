//! An independent evaluator of legality and winners, used only to test the
//! games module. It quantifies over copies, threads and cell vectors
//! directly: copies `1..=max+1`, all bitstrings of the longest used length,
//! and all coordinate vectors over `1..=max+1`. Projections are
//! reimplemented here rather than shared.

use crate::cirquent::Cirquent;
use crate::formula::Formula;
use crate::games::Interpretation;
use crate::runs::{Labmove, Player, Run};

fn numeral(s: &str) -> Option<u64> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) || (s.len() > 1 && s.starts_with('0')) {
        return None;
    }
    s.parse().ok()
}

fn bits(s: &str) -> Option<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect()
}

fn negated(run: &[Labmove]) -> Vec<Labmove> {
    run.iter().map(|lm| Labmove::new(!lm.player, lm.mv.clone())).collect()
}

fn heads<'a>(run: &'a [Labmove]) -> impl Iterator<Item = Option<(&'a str, &'a str)>> + 'a {
    run.iter().map(|lm| lm.mv.as_str().split_once('.'))
}

fn keep(run: &[Labmove], pred: impl Fn(&str) -> bool) -> Vec<Labmove> {
    run.iter()
        .filter_map(|lm| {
            let (h, rest) = lm.mv.as_str().split_once('.')?;
            pred(h).then(|| Labmove::new(lm.player, rest))
        })
        .collect()
}

fn max_copy(run: &[Labmove]) -> u64 {
    heads(run).flatten().filter_map(|(h, _)| numeral(h)).max().unwrap_or(0)
}

fn max_bits(run: &[Labmove]) -> usize {
    heads(run).flatten().filter(|(h, _)| bits(h).is_some()).map(|(h, _)| h.len()).max().unwrap_or(0)
}

fn all_bitstrings(len: usize) -> Vec<Vec<bool>> {
    (0..1u64 << len).map(|n| (0..len).map(|i| (n >> (len - 1 - i)) & 1 == 1).collect()).collect()
}

fn thread(run: &[Labmove], x: &[bool]) -> Vec<Labmove> {
    keep(run, |h| bits(h).is_some_and(|w| w.len() <= x.len() && w[..] == x[..w.len()]))
}

fn legal(f: &Formula, run: &[Labmove], i: &Interpretation) -> bool {
    match f {
        Formula::Atom(a) => i.get(a).expect("interpreted").is_legal(&Run::from_labmoves(run.to_vec())),
        Formula::NegAtom(a) => i.get(a).expect("interpreted").is_legal(&Run::from_labmoves(negated(run))),
        Formula::And(l, r) | Formula::Or(l, r) => {
            heads(run).all(|h| matches!(h, Some(("1", _)) | Some(("2", _))))
                && legal(l, &keep(run, |h| h == "1"), i)
                && legal(r, &keep(run, |h| h == "2"), i)
        }
        Formula::Pst(g) | Formula::Pcost(g) => {
            heads(run).all(|h| h.and_then(|(h, _)| numeral(h)).is_some_and(|u| u > 0))
                && (1..=max_copy(run) + 1).all(|u| legal(g, &keep(run, |h| numeral(h) == Some(u)), i))
        }
        Formula::St(g) | Formula::Cost(g) => {
            heads(run).all(|h| h.is_some_and(|(h, _)| bits(h).is_some()))
                && all_bitstrings(max_bits(run)).iter().all(|x| legal(g, &thread(run, x), i))
        }
    }
}

fn top_wins(f: &Formula, run: &[Labmove], i: &Interpretation) -> bool {
    match f {
        Formula::Atom(a) => i.get(a).expect("interpreted").legal_winner(&Run::from_labmoves(run.to_vec())) == Player::Top,
        Formula::NegAtom(a) => {
            i.get(a).expect("interpreted").legal_winner(&Run::from_labmoves(negated(run))) == Player::Bot
        }
        Formula::And(l, r) => top_wins(l, &keep(run, |h| h == "1"), i) && top_wins(r, &keep(run, |h| h == "2"), i),
        Formula::Or(l, r) => top_wins(l, &keep(run, |h| h == "1"), i) || top_wins(r, &keep(run, |h| h == "2"), i),
        Formula::Pst(g) => (1..=max_copy(run) + 1).all(|u| top_wins(g, &keep(run, |h| numeral(h) == Some(u)), i)),
        Formula::Pcost(g) => (1..=max_copy(run) + 1).any(|u| top_wins(g, &keep(run, |h| numeral(h) == Some(u)), i)),
        Formula::St(g) => all_bitstrings(max_bits(run)).iter().all(|x| top_wins(g, &thread(run, x), i)),
        Formula::Cost(g) => all_bitstrings(max_bits(run)).iter().any(|x| top_wins(g, &thread(run, x), i)),
    }
}

fn offender_winner(run: &Run, legal: impl Fn(&[Labmove]) -> bool, wins: impl Fn(&[Labmove]) -> bool) -> Player {
    let moves = run.labmoves();
    for len in 1..=moves.len() {
        if !legal(&moves[..len]) {
            return !moves[len - 1].player;
        }
    }
    if wins(moves) {
        Player::Top
    } else {
        Player::Bot
    }
}

pub fn brute_force_legal(f: &Formula, i: &Interpretation, run: &Run) -> bool {
    legal(f, run.labmoves(), i)
}

pub fn brute_force_winner(f: &Formula, i: &Interpretation, run: &Run) -> Player {
    offender_winner(run, |r| legal(f, r, i), |r| top_wins(f, r, i))
}

struct Cell {
    a: usize,
    coords: Vec<u64>,
}

fn cell_of(mv: &str) -> Option<(Cell, &str)> {
    let (a, tail) = mv.split_once(';')?;
    let a = numeral(a).filter(|&a| a > 0)? as usize;
    let (coords, rest) = tail.split_once('.')?;
    let coords = if coords.is_empty() {
        Vec::new()
    } else {
        coords.split(',').map(numeral).collect::<Option<Vec<_>>>()?
    };
    Some((Cell { a, coords }, rest))
}

fn cell_run(run: &[Labmove], a: usize, xs: &[u64]) -> Vec<Labmove> {
    run.iter()
        .filter_map(|lm| {
            let (cell, rest) = cell_of(lm.mv.as_str())?;
            let hit = cell.a == a && cell.coords.iter().zip(xs).all(|(&u, &x)| u == 0 || u == x);
            hit.then(|| Labmove::new(lm.player, rest))
        })
        .collect()
}

fn vectors(n: usize, max: u64) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out.into_iter().flat_map(|v| (1..=max).map(move |x| [v.clone(), vec![x]].concat())).collect();
    }
    out
}

fn cirquent_legal(c: &Cirquent, run: &[Labmove], i: &Interpretation) -> bool {
    let n = c.num_overgroups();
    let shaped = run.iter().all(|lm| match cell_of(lm.mv.as_str()) {
        Some((cell, _)) => {
            cell.a <= c.len()
                && cell.coords.len() == n
                && cell.coords.iter().enumerate().all(|(j, &u)| (u == 0) == !c.overgroup(j + 1).contains(&cell.a))
        }
        None => false,
    });
    if !shaped {
        return false;
    }
    let max = run.iter().filter_map(|lm| cell_of(lm.mv.as_str())).flat_map(|(c, _)| c.coords).max().unwrap_or(0);
    let xs = vectors(n, max + 1);
    (1..=c.len()).all(|a| xs.iter().all(|x| legal(c.oformula(a), &cell_run(run, a, x), i)))
}

fn cirquent_wins(c: &Cirquent, run: &[Labmove], i: &Interpretation) -> bool {
    let max = run.iter().filter_map(|lm| cell_of(lm.mv.as_str())).flat_map(|(c, _)| c.coords).max().unwrap_or(0);
    let xs = vectors(c.num_overgroups(), max + 1);
    c.undergroups()
        .iter()
        .all(|u| xs.iter().all(|x| u.iter().any(|&a| top_wins(c.oformula(a), &cell_run(run, a, x), i))))
}

pub fn brute_force_cirquent_legal(c: &Cirquent, i: &Interpretation, run: &Run) -> bool {
    cirquent_legal(c, run.labmoves(), i)
}

pub fn brute_force_cirquent_winner(c: &Cirquent, i: &Interpretation, run: &Run) -> Player {
    offender_winner(run, |r| cirquent_legal(c, r, i), |r| cirquent_wins(c, r, i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_formula, Atom};
    use crate::games::{finite_game, make_finite_game};

    #[test]
    fn empty_run_is_label_computation() {
        for label in [Player::Top, Player::Bot] {
            let i = Interpretation::new().with(Atom::new("P").unwrap(), make_finite_game(finite_game(&[("()", label)])));
            let f = parse_formula("!P /\\ b?~P").unwrap();
            // b?~P and !P never both hold on the empty run
            assert_eq!(brute_force_winner(&f, &i, &Run::empty()), Player::Bot);
            assert_eq!(brute_force_winner(&parse_formula("P").unwrap(), &i, &Run::empty()), label);
        }
    }

    #[test]
    fn vectors_count() {
        assert_eq!(vectors(2, 3).len(), 9);
        assert_eq!(vectors(0, 3), vec![Vec::<u64>::new()]);
        assert_eq!(all_bitstrings(0), vec![Vec::<bool>::new()]);
        assert_eq!(all_bitstrings(2).len(), 4);
    }
}
