//! The rule illustrations, single-point mutations of cirquents, and the
//! checked steps of the fixture proofs.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::calculus::{fixture_p1, fixture_p2, RuleInstance};
use crate::cirquent::{parse_cirquent, Cirquent};
use crate::formula::Formula;

/// One checked inference: `premise` is `None` for the axiom.
#[derive(Debug, Clone)]
pub struct Inference {
    pub name: &'static str,
    pub premise: Option<Cirquent>,
    pub conclusion: Cirquent,
    pub rule: RuleInstance,
}

fn c(text: &str) -> Cirquent {
    parse_cirquent(text).unwrap_or_else(|e| panic!("illustration `{text}`: {e}"))
}

fn step(name: &'static str, premise: &str, conclusion: &str, rule: RuleInstance) -> Inference {
    Inference { name, premise: Some(c(premise)), conclusion: c(conclusion), rule }
}

/// One example per rule, as drawn in the rule illustrations.
pub fn rule_illustrations() -> Vec<Inference> {
    vec![
        Inference {
            name: "axiom",
            premise: None,
            conclusion: c("oformulas: ~F1 | F1 | ~F2 | F2 ; under: {1,2}{3,4} ; over: {1,2}{3,4}"),
            rule: RuleInstance::Axiom(Vec::new()),
        },
        step(
            "exchange",
            "oformulas: E | F | G ; under: {1,2}{2}{3} ; over: {1}{2,3}",
            "oformulas: F | E | G ; under: {1,2}{1}{3} ; over: {2}{1,3}",
            RuleInstance::OformulaExchange(1),
        ),
        step(
            "duplication",
            "oformulas: E | F | G ; under: {1,2}{3} ; over: {1}{2,3}",
            "oformulas: E | F | G ; under: {1,2}{1,2}{3} ; over: {1}{2,3}",
            RuleInstance::UndergroupDuplication(1),
        ),
        step(
            "merging",
            "oformulas: E | F | E ; under: {1}{2}{3} ; over: {1}{2,3}",
            "oformulas: E | F | E ; under: {1}{2}{3} ; over: {1,2,3}",
            RuleInstance::Merging(1),
        ),
        step(
            "weakening",
            "oformulas: G | F | F ; under: {1}{2}{3} ; over: {1,2}{2,3}",
            "oformulas: G | F | F ; under: {1,2}{2}{3} ; over: {1,2}{2,3}",
            RuleInstance::Weakening { under: 1, oformula: 2 },
        ),
        step(
            "contraction",
            "oformulas: E | ?F | ?F | G ; under: {1,2,3}{2,3,4} ; over: {1}{2,3,4}{4}",
            "oformulas: E | ?F | G ; under: {1,2}{2,3} ; over: {1}{2,3}{3}",
            RuleInstance::Contraction(2),
        ),
        step(
            "or",
            "oformulas: E | E | F ; under: {1}{2,3}{2,3} ; over: {1,2,3}{2,3}",
            "oformulas: E | E \\/ F ; under: {1}{2}{2} ; over: {1,2}{2}",
            RuleInstance::OrIntro(2),
        ),
        step(
            "and",
            "oformulas: G | E | F ; under: {1}{1,2}{1,3} ; over: {1}{2,3}",
            "oformulas: G | E /\\ F ; under: {1}{1,2} ; over: {1}{2}",
            RuleInstance::AndIntro(2),
        ),
        step(
            "pst",
            "oformulas: H | E | F ; under: {1,2}{2}{3} ; over: {1,2}{2,3}{3}",
            "oformulas: H | E | !F ; under: {1,2}{2}{3} ; over: {1,2}{2,3}",
            RuleInstance::PstIntro { oformula: 3, new_over: None },
        ),
        step(
            "pcost",
            "oformulas: H | E | F ; under: {1,2}{2}{3} ; over: {1,2,3}{2,3}{3}",
            "oformulas: H | E | ?F ; under: {1,2}{2}{3} ; over: {1,2}{2,3}{3}",
            RuleInstance::PcostIntro { oformula: 3, add_over: [1].into_iter().collect() },
        ),
    ]
}

/// Every inference of the two fixture proofs.
pub fn fixture_inferences() -> Vec<Inference> {
    let mut out = Vec::new();
    for (name, proof) in [("p1", fixture_p1()), ("p2", fixture_p2())] {
        for (i, s) in proof.steps.iter().enumerate() {
            out.push(Inference {
                name,
                premise: (i > 0).then(|| proof.steps[i - 1].cirquent.clone()),
                conclusion: s.cirquent.clone(),
                rule: s.rule.clone(),
            });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MutationKind {
    AddArc,
    RemoveArc,
    SwapGroups,
    ChangeFormula,
}

/// A single random change to `c`: add or remove one arc, swap two groups
/// with different contents, or replace one oformula. Returns `None` when the
/// chosen kind does not apply; the result always differs from `c`.
pub fn mutate(c: &Cirquent, rng: &mut impl Rng) -> Option<(MutationKind, Cirquent)> {
    let (mut fs, mut us, mut os) = c.clone().into_parts();
    let under = rng.gen();
    let kind = *[MutationKind::AddArc, MutationKind::RemoveArc, MutationKind::SwapGroups, MutationKind::ChangeFormula]
        .choose(rng)
        .expect("nonempty");
    let groups = if under { &mut us } else { &mut os };
    match kind {
        MutationKind::AddArc => {
            let g = rng.gen_range(0..groups.len());
            let missing: Vec<usize> = (1..=fs.len()).filter(|a| !groups[g].contains(a)).collect();
            groups[g].insert(*missing.choose(rng)?);
        }
        MutationKind::RemoveArc => {
            let g = rng.gen_range(0..groups.len());
            let present: Vec<usize> = groups[g].iter().copied().collect();
            groups[g].remove(present.choose(rng)?);
        }
        MutationKind::SwapGroups => {
            if groups.len() < 2 {
                return None;
            }
            let i = rng.gen_range(0..groups.len());
            let j = rng.gen_range(0..groups.len());
            if groups[i] == groups[j] {
                return None;
            }
            groups.swap(i, j);
        }
        MutationKind::ChangeFormula => {
            let a = rng.gen_range(0..fs.len());
            let old = fs[a].clone();
            fs[a] = match rng.gen_range(0..3) {
                0 => Formula::Pcost(Box::new(old)),
                1 => old.negate(),
                _ => Formula::And(Box::new(old.clone()), Box::new(old)),
            };
        }
    }
    let mutated = Cirquent::from_parts_unchecked(fs, us, os);
    (mutated != *c).then_some((kind, mutated))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{check_axiom, check_step};
    use crate::harness::random::rng;

    #[test]
    fn illustrations_accepted() {
        let all = rule_illustrations();
        assert_eq!(all.len(), 10);
        for inf in all {
            let verdict = match &inf.premise {
                None => check_axiom(&inf.conclusion, &[]),
                Some(p) => check_step(p, &inf.conclusion, &inf.rule),
            };
            assert_eq!(verdict, Ok(()), "{}", inf.name);
        }
    }

    #[test]
    fn mutations_differ() {
        let c = &rule_illustrations()[5].conclusion;
        let mut r = rng(1);
        let mut seen = 0;
        for _ in 0..200 {
            if let Some((_, m)) = mutate(c, &mut r) {
                assert_ne!(&m, c);
                seen += 1;
            }
        }
        assert!(seen > 100);
    }
}
