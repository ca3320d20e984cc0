//! Run-correspondence checks for the strategy translators.
//!
//! Each check plays a translated random machine against a scripted random
//! environment, then compares projections of the real run (on the
//! conclusion) with projections of the imaginary run (on the premise) over
//! every coordinate vector with entries in `1..=R`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::random::{random_move, rng, Arena};
use crate::calculus::{apply_forward, build_premise, RuleInstance};
use crate::cirquent::{clubsuit, parse_cirquent};
use crate::formula::{parse_formula, Atom, Formula};
use crate::games::{interpret_cirquent, interpret_formula, EnumerationGame, GameRef, Interpretation};
use crate::runs::{project_cell, project_prefix, Move, Run};
use crate::strategy::{
    pair_n, simulate, unpair, Action, MachineStrategy, RuleTranslator, ScriptedEnv, Translated,
};

/// Coordinates and copy numbers range over `1..=R`.
const R: u64 = 3;

/// A random machine for the imaginary play: alternates a random well-shaped
/// move with a grant until it has made `left` moves, then only grants.
#[derive(Clone)]
struct RandomMachine {
    arena: Arena,
    alphabets: BTreeMap<Atom, Vec<Move>>,
    rng: ChaCha8Rng,
    left: usize,
    turn: bool,
}

impl MachineStrategy for RandomMachine {
    fn next(&mut self, _: &Run, _: usize) -> Action {
        self.turn = !self.turn;
        if self.turn && self.left > 0 {
            self.left -= 1;
            Action::MakeMove(random_move(&mut self.rng, &self.arena, &self.alphabets))
        } else {
            Action::GrantPermission
        }
    }

    fn clone_box(&self) -> Box<dyn MachineStrategy> {
        Box::new(self.clone())
    }

    fn name(&self) -> String {
        "random".into()
    }
}

/// A translated play: the outer game, the inner and outer arenas and the
/// translator between them.
#[derive(Debug, Clone)]
pub struct IdentityCase {
    pub name: String,
    pub inner: Arena,
    pub outer: Arena,
    pub translator: RuleTranslator,
}

impl IdentityCase {
    /// The case for one inference; the premise is built or the conclusion
    /// applied, whichever direction the rule is checked in.
    pub fn for_rule(name: impl Into<String>, c: &str, rule: RuleInstance) -> Self {
        let c = parse_cirquent(c).expect("case cirquent parses");
        let (premise, conclusion) = if rule.is_forward() {
            let concl = apply_forward(&c, &rule).expect("rule applies");
            (c, concl)
        } else {
            (build_premise(&c, &rule).expect("premise builds"), c)
        };
        let translator = RuleTranslator::for_rule(&rule, &premise, &conclusion);
        IdentityCase {
            name: name.into(),
            inner: Arena::Cirquent(premise),
            outer: Arena::Cirquent(conclusion),
            translator,
        }
    }

    pub fn declubsuit(f: &str) -> Self {
        let f = parse_formula(f).expect("case formula parses");
        IdentityCase {
            name: "declubsuit".into(),
            inner: Arena::Cirquent(clubsuit(f.clone())),
            outer: Arena::Formula(Formula::Pst(Box::new(f))),
            translator: RuleTranslator::Declubsuit,
        }
    }
}

/// One required equation: the outer cell, then the prefix `outer_prefix`,
/// against the inner cell, then `inner_prefix`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Corr {
    outer: (usize, Vec<u64>),
    outer_prefix: String,
    inner: (usize, Vec<u64>),
    inner_prefix: String,
}

fn vectors(m: usize) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        out = out.into_iter().flat_map(|v| (1..=R).map(move |x| [v.clone(), vec![x]].concat())).collect();
    }
    out
}

fn corr(b: usize, xs: &[u64], op: String, a: usize, ys: Vec<u64>, ip: String) -> Corr {
    Corr { outer: (b, xs.to_vec()), outer_prefix: op, inner: (a, ys), inner_prefix: ip }
}

/// The equations relating outer cell `[b; xs]` to the inner play.
fn equations(t: &RuleTranslator, b: usize, xs: &[u64]) -> Vec<Corr> {
    let same = |a: usize, ys: Vec<u64>| vec![corr(b, xs, String::new(), a, ys, String::new())];
    match t {
        RuleTranslator::Identity => same(b, xs.to_vec()),
        RuleTranslator::OformulaSwap(p) => {
            let a = if b == *p { p + 1 } else if b == p + 1 { *p } else { b };
            same(a, xs.to_vec())
        }
        RuleTranslator::CoordSwap(p) => {
            let mut ys = xs.to_vec();
            ys.swap(p - 1, *p);
            same(b, ys)
        }
        RuleTranslator::Contraction(a) => {
            if b < *a {
                same(b, xs.to_vec())
            } else if b > *a {
                same(b + 1, xs.to_vec())
            } else {
                (1..=R)
                    .flat_map(|k| {
                        [
                            corr(b, xs, format!("{}.", 2 * k - 1), *a, xs.to_vec(), format!("{k}.")),
                            corr(b, xs, format!("{}.", 2 * k), a + 1, xs.to_vec(), format!("{k}.")),
                        ]
                    })
                    .collect()
            }
        }
        RuleTranslator::OvergroupDuplication(p) => {
            let mut ys = xs.to_vec();
            let f = pair_n(&[xs[p - 1], xs[*p]]).expect("small pair");
            ys.remove(*p);
            ys[p - 1] = f;
            same(b, ys)
        }
        RuleTranslator::Merging { p, membership } => {
            let x = xs[p - 1];
            let (x1, x2) = match membership[b - 1] {
                (true, true) => unpair(x).expect("positive"),
                (true, false) => (x, 1),
                (false, true) => (1, x),
                (false, false) => (1, 1),
            };
            let mut ys = xs.to_vec();
            ys[p - 1] = x1;
            ys.insert(*p, x2);
            same(b, ys)
        }
        RuleTranslator::Split(a) => {
            if b < *a {
                same(b, xs.to_vec())
            } else if b > *a {
                same(b + 1, xs.to_vec())
            } else {
                vec![
                    corr(b, xs, "1.".into(), *a, xs.to_vec(), String::new()),
                    corr(b, xs, "2.".into(), a + 1, xs.to_vec(), String::new()),
                ]
            }
        }
        RuleTranslator::Pst { a, q } => (1..=R)
            .map(|x| {
                let mut ys = xs.to_vec();
                ys.insert(q - 1, x);
                let op = if b == *a { format!("{x}.") } else { String::new() };
                corr(b, xs, op, b, ys, String::new())
            })
            .collect(),
        RuleTranslator::Pcost { a, s } => {
            if b != *a {
                return same(b, xs.to_vec());
            }
            vectors(s.len())
                .into_iter()
                .map(|us| {
                    let x = pair_n(&us).expect("small tuple");
                    let mut ys = xs.to_vec();
                    for (&j, u) in s.iter().zip(us) {
                        ys[j - 1] = u;
                    }
                    corr(b, xs, format!("{x}."), b, ys, String::new())
                })
                .collect()
        }
        RuleTranslator::Weakening { .. } | RuleTranslator::Declubsuit | RuleTranslator::Depst => {
            unreachable!("handled separately")
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct IdentityReport {
    pub name: String,
    pub plays: usize,
    pub comparisons: usize,
    /// Comparisons where the compared runs were nonempty.
    pub nonempty: usize,
    pub failures: Vec<String>,
}

impl IdentityReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty() && self.nonempty > 0
    }
}

impl fmt::Display for IdentityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: plays={} comparisons={} nonempty={} failures={}",
            self.name,
            self.plays,
            self.comparisons,
            self.nonempty,
            self.failures.len()
        )
    }
}

fn always_top(atoms: impl IntoIterator<Item = Atom>) -> Interpretation {
    atoms.into_iter().fold(Interpretation::new(), |i, a| i.with(a, Arc::new(EnumerationGame::always_top())))
}

fn arena_game(arena: &Arena, interp: &Interpretation) -> GameRef {
    match arena {
        Arena::Formula(f) => interpret_formula(f, interp),
        Arena::Cirquent(c) => interpret_cirquent(c, interp),
    }
    .expect("all atoms interpreted")
}

/// Plays the case once and returns the real and imaginary runs.
pub fn play(case: &IdentityCase, seed: u64, moves: usize) -> (Run, Run) {
    play_with(case, &case.translator, seed, moves)
}

fn play_with(case: &IdentityCase, translator: &RuleTranslator, seed: u64, moves: usize) -> (Run, Run) {
    let interp = always_top(case.outer.atoms().into_iter().chain(case.inner.atoms()));
    let alphabets = super::random::alphabets(&interp);
    let game = arena_game(&case.outer, &interp);
    let mut r = rng(seed);
    let script: Vec<Move> = (0..moves).map(|_| random_move(&mut r, &case.outer, &alphabets)).collect();
    let inner = RandomMachine { arena: case.inner.clone(), alphabets, rng: rng(seed ^ 0x9e37), left: moves, turn: r.gen() };
    let mut machine = Translated::new(Box::new(inner), Arc::new(translator.clone()));
    let outcome = simulate(&mut machine, &mut ScriptedEnv::new(script), game.as_ref(), 4 * moves + 4).expect("positive budget");
    (outcome.run, machine.imaginary_run().clone())
}

fn record(report: &mut IdentityReport, what: String, lhs: Run, rhs: Run) {
    report.comparisons += 1;
    if !lhs.is_empty() {
        report.nonempty += 1;
    }
    if lhs != rhs {
        report.failures.push(format!("{what}: {lhs} vs {rhs}"));
    }
}

/// Checks the case's equations on `plays` seeded plays.
pub fn check_identity(case: &IdentityCase, plays: usize, seed: u64) -> IdentityReport {
    check_played_with(case, &case.translator, plays, seed)
}

/// Checks the case's equations on plays driven by `played` instead of the
/// case's own translator.
pub fn check_played_with(case: &IdentityCase, played: &RuleTranslator, plays: usize, seed: u64) -> IdentityReport {
    let mut report = IdentityReport { name: case.name.clone(), plays, ..Default::default() };
    for i in 0..plays {
        let (outer, inner) = play_with(case, played, seed.wrapping_add(i as u64), 6);
        match (&case.outer, &case.translator) {
            (_, RuleTranslator::Declubsuit) => {
                for x in 1..=R {
                    let lhs = project_prefix(&outer, &format!("{x}."));
                    let rhs = project_cell(&inner, 1, &[x]).expect("one overgroup");
                    record(&mut report, format!("copy {x}"), lhs, rhs);
                }
            }
            (Arena::Cirquent(c), t) => {
                for b in 1..=c.len() {
                    for xs in vectors(c.num_overgroups()) {
                        for e in equations(t, b, &xs) {
                            let lhs = project_cell(&outer, e.outer.0, &e.outer.1).expect("arity");
                            let rhs = project_cell(&inner, e.inner.0, &e.inner.1).expect("arity");
                            record(
                                &mut report,
                                format!("{e:?}"),
                                project_prefix(&lhs, &e.outer_prefix),
                                project_prefix(&rhs, &e.inner_prefix),
                            );
                        }
                    }
                }
            }
            (Arena::Formula(_), t) => unreachable!("no formula-level case for {t:?}"),
        }
    }
    report
}

/// The cases checked by the acceptance suite, one or more per translator.
pub fn standard_cases() -> Vec<IdentityCase> {
    vec![
        IdentityCase::for_rule(
            "oformula exchange",
            "oformulas: E | F | G ; under: {1,2}{2}{3} ; over: {1}{2,3}",
            RuleInstance::OformulaExchange(1),
        ),
        IdentityCase::for_rule(
            "overgroup exchange",
            "oformulas: E | F | G ; under: {1,2}{3} ; over: {1,2}{2,3}",
            RuleInstance::OvergroupExchange(1),
        ),
        IdentityCase::for_rule(
            "contraction",
            "oformulas: E | ?F | G ; under: {1,2}{2,3} ; over: {1}{2,3}{3}",
            RuleInstance::Contraction(2),
        ),
        IdentityCase::for_rule(
            "overgroup duplication",
            "oformulas: E | F ; under: {1,2} ; over: {1,2}{2}",
            RuleInstance::OvergroupDuplication(1),
        ),
        IdentityCase::for_rule(
            "merging",
            "oformulas: E | F | G | H ; under: {1,2,3,4} ; over: {1,2}{2,3}{4}",
            RuleInstance::Merging(1),
        ),
        IdentityCase::for_rule(
            "or",
            "oformulas: E | E \\/ F ; under: {1}{2} ; over: {1,2}{2}",
            RuleInstance::OrIntro(2),
        ),
        IdentityCase::for_rule(
            "and",
            "oformulas: G | E /\\ F ; under: {1}{1,2} ; over: {1}{2}",
            RuleInstance::AndIntro(2),
        ),
        IdentityCase::for_rule(
            "pst",
            "oformulas: H | E | !F ; under: {1,2}{2}{3} ; over: {1,2}{2,3}",
            RuleInstance::PstIntro { oformula: 3, new_over: None },
        ),
        IdentityCase::for_rule(
            "pcost n=0",
            "oformulas: H | ?F ; under: {1,2} ; over: {1}{2}",
            RuleInstance::PcostIntro { oformula: 2, add_over: Default::default() },
        ),
        IdentityCase::for_rule(
            "pcost n=1",
            "oformulas: H | E | ?F ; under: {1,2}{2}{3} ; over: {1,2}{2,3}{3}",
            RuleInstance::PcostIntro { oformula: 3, add_over: [1].into_iter().collect() },
        ),
        IdentityCase::for_rule(
            "pcost n=2",
            "oformulas: H | ?F ; under: {1,2} ; over: {1}{1}{2}",
            RuleInstance::PcostIntro { oformula: 2, add_over: [1, 2].into_iter().collect() },
        ),
        IdentityCase::declubsuit("?~P \\/ !P"),
    ]
}

/// The copy-pinning wrapper: the real run is copy 1 of the imaginary one.
pub fn check_depst(f: &str, plays: usize, seed: u64) -> IdentityReport {
    let f = parse_formula(f).expect("case formula parses");
    let case = IdentityCase {
        name: "depst".into(),
        inner: Arena::Formula(Formula::Pst(Box::new(f.clone()))),
        outer: Arena::Formula(f),
        translator: RuleTranslator::Depst,
    };
    let mut report = IdentityReport { name: case.name.clone(), plays, ..Default::default() };
    for i in 0..plays {
        let (outer, inner) = play(&case, seed.wrapping_add(i as u64), 6);
        record(&mut report, "copy 1".into(), outer, project_prefix(&inner, "1."));
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_cases_hold() {
        for case in standard_cases() {
            let report = check_identity(&case, 10, 1);
            assert!(report.holds(), "{report}\n{:?}", report.failures.first());
        }
    }

    #[test]
    fn depst_holds() {
        let report = check_depst("?~P \\/ !P", 10, 1);
        assert!(report.holds(), "{report}\n{:?}", report.failures.first());
    }

    #[test]
    fn wrong_translator_detected() {
        let case = standard_cases().remove(1);
        assert!(!check_played_with(&case, &RuleTranslator::Identity, 10, 1).failures.is_empty());
    }
}
