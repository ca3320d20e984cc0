//! The rules of CL15 with parallel recurrence, and proof verification.
//!
//! Every rule instance carries explicit parameters. Axiom, Exchange,
//! Duplication and Merging are checked forward: the conclusion is rebuilt
//! from the premise. The other rules are checked bottom-up: the premise is
//! rebuilt from the conclusion. Either way the rebuilt cirquent must equal
//! the given one exactly.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::cirquent::{clubsuit, parse_cirquent, validate_cirquent, Cirquent, CirquentError, Group, GroupKind, Violation};
use crate::formula::{parse_formula, Formula, FormulaError};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RuleInstance {
    /// `⟨¬F1,F1,…,¬Fn,Fn⟩`. An empty list means: read the `Fi` off the
    /// even positions of the cirquent.
    Axiom(Vec<Formula>),
    /// Swap oformulas `p` and `p+1`.
    OformulaExchange(usize),
    UndergroupExchange(usize),
    OvergroupExchange(usize),
    /// Undergroup `p` of the premise becomes undergroups `p`, `p+1`.
    UndergroupDuplication(usize),
    OvergroupDuplication(usize),
    /// Overgroups `p` and `p+1` of the premise become overgroup `p`.
    Merging(usize),
    /// Delete the arc between undergroup `under` and oformula `oformula` of
    /// the conclusion, with the cascade.
    Weakening { under: usize, oformula: usize },
    /// `?F` at this position of the conclusion; copies at `a`, `a+1` in the premise.
    Contraction(usize),
    OrIntro(usize),
    AndIntro(usize),
    /// `!F` at `oformula`; the new singleton overgroup sits at position
    /// `new_over` of the premise (`None`: last).
    PstIntro { oformula: usize, new_over: Option<usize> },
    /// `?F` at `oformula`; the premise additionally puts `F` into these
    /// overgroups, none of which contains it in the conclusion.
    PcostIntro { oformula: usize, add_over: BTreeSet<usize> },
}

impl RuleInstance {
    pub fn name(&self) -> &'static str {
        match self {
            RuleInstance::Axiom(_) => "axiom",
            RuleInstance::OformulaExchange(_) => "oformula-exchange",
            RuleInstance::UndergroupExchange(_) => "undergroup-exchange",
            RuleInstance::OvergroupExchange(_) => "overgroup-exchange",
            RuleInstance::UndergroupDuplication(_) => "undergroup-duplication",
            RuleInstance::OvergroupDuplication(_) => "overgroup-duplication",
            RuleInstance::Merging(_) => "merging",
            RuleInstance::Weakening { .. } => "weakening",
            RuleInstance::Contraction(_) => "contraction",
            RuleInstance::OrIntro(_) => "or",
            RuleInstance::AndIntro(_) => "and",
            RuleInstance::PstIntro { .. } => "pst",
            RuleInstance::PcostIntro { .. } => "pcost",
        }
    }

    /// True for the rules whose conclusion is a function of the premise.
    pub fn is_forward(&self) -> bool {
        matches!(
            self,
            RuleInstance::Axiom(_)
                | RuleInstance::OformulaExchange(_)
                | RuleInstance::UndergroupExchange(_)
                | RuleInstance::OvergroupExchange(_)
                | RuleInstance::UndergroupDuplication(_)
                | RuleInstance::OvergroupDuplication(_)
                | RuleInstance::Merging(_)
        )
    }

    /// The `key=value` parameters in proof-file syntax.
    pub fn params(&self) -> String {
        match self {
            RuleInstance::Axiom(fs) if fs.is_empty() => String::new(),
            RuleInstance::Axiom(fs) => {
                format!("formulas={}", fs.iter().map(ToString::to_string).collect::<Vec<_>>().join(" | "))
            }
            RuleInstance::OformulaExchange(p) | RuleInstance::Contraction(p) | RuleInstance::OrIntro(p) | RuleInstance::AndIntro(p) => {
                format!("oformula={p}")
            }
            RuleInstance::UndergroupExchange(p) | RuleInstance::UndergroupDuplication(p) => format!("under={p}"),
            RuleInstance::OvergroupExchange(p) | RuleInstance::OvergroupDuplication(p) | RuleInstance::Merging(p) => {
                format!("over={p}")
            }
            RuleInstance::Weakening { under, oformula } => format!("under={under} oformula={oformula}"),
            RuleInstance::PstIntro { oformula, new_over: None } => format!("oformula={oformula}"),
            RuleInstance::PstIntro { oformula, new_over: Some(q) } => format!("oformula={oformula} new_over={q}"),
            RuleInstance::PcostIntro { oformula, add_over } => {
                let set: Vec<String> = add_over.iter().map(ToString::to_string).collect();
                format!("oformula={oformula} add_over={{{}}}", set.join(","))
            }
        }
    }
}

impl fmt::Display for RuleInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params = self.params();
        if params.is_empty() {
            write!(f, "rule={}", self.name())
        } else {
            write!(f, "rule={} {params}", self.name())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleViolation {
    #[error("{which} is not a valid cirquent: {}", .violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    InvalidCirquent { which: &'static str, violations: Vec<Violation> },
    #[error("{kind} position {index} out of range (have {len})")]
    PositionOutOfRange { kind: &'static str, index: usize, len: usize },
    #[error("oformula {index} is `{found}`, expected {expected}")]
    WrongConnective { index: usize, expected: &'static str, found: Formula },
    #[error("undergroup {under} does not contain oformula {oformula}")]
    NoSuchArc { under: usize, oformula: usize },
    #[error("undergroup {0} has fewer than two oformulas")]
    UndergroupTooSmall(usize),
    #[error("overgroup {over} already contains oformula {oformula}")]
    AlreadyInOvergroup { over: usize, oformula: usize },
    #[error("axiom needs an even number of oformulas, found {0}")]
    OddAxiom(usize),
    #[error("axiom formulas given for {given} pairs, cirquent has {found}")]
    AxiomArity { given: usize, found: usize },
    #[error("{which}: expected {expected} oformulas, found {found}")]
    OformulaCount { which: &'static str, expected: usize, found: usize },
    #[error("{which}: oformula {index} should be `{expected}`, found `{found}`")]
    OformulaMismatch { which: &'static str, index: usize, expected: Formula, found: Formula },
    #[error("{which}: expected {expected} {kind}s, found {found}")]
    GroupCount { which: &'static str, kind: GroupKind, expected: usize, found: usize },
    #[error("{which}: {kind} {index} should be {}, found {}", fmt_group(.expected), fmt_group(.found))]
    GroupMismatch { which: &'static str, kind: GroupKind, index: usize, expected: Group, found: Group },
    #[error("rule {0} has no premise")]
    NoPremise(&'static str),
}

pub fn fmt_group(g: &Group) -> String {
    format!("{{{}}}", g.iter().map(ToString::to_string).collect::<Vec<_>>().join(","))
}

fn check_position(kind: &'static str, index: usize, len: usize) -> Result<(), RuleViolation> {
    if index == 0 || index > len {
        Err(RuleViolation::PositionOutOfRange { kind, index, len })
    } else {
        Ok(())
    }
}

/// First structural difference between `expected` and `found`.
pub fn compare_cirquents(which: &'static str, expected: &Cirquent, found: &Cirquent) -> Result<(), RuleViolation> {
    if expected.len() != found.len() {
        return Err(RuleViolation::OformulaCount { which, expected: expected.len(), found: found.len() });
    }
    for (i, (e, f)) in expected.oformulas().iter().zip(found.oformulas()).enumerate() {
        if e != f {
            return Err(RuleViolation::OformulaMismatch { which, index: i + 1, expected: e.clone(), found: f.clone() });
        }
    }
    for (kind, e, f) in [
        (GroupKind::Under, expected.undergroups(), found.undergroups()),
        (GroupKind::Over, expected.overgroups(), found.overgroups()),
    ] {
        if e.len() != f.len() {
            return Err(RuleViolation::GroupCount { which, kind, expected: e.len(), found: f.len() });
        }
        for (i, (eg, fg)) in e.iter().zip(f).enumerate() {
            if eg != fg {
                return Err(RuleViolation::GroupMismatch {
                    which,
                    kind,
                    index: i + 1,
                    expected: eg.clone(),
                    found: fg.clone(),
                });
            }
        }
    }
    Ok(())
}

fn valid(which: &'static str, c: &Cirquent) -> Result<(), RuleViolation> {
    validate_cirquent(c).map_err(|violations| RuleViolation::InvalidCirquent { which, violations })
}

/// The axiom cirquent for `F1,…,Fn`.
pub fn axiom_cirquent(formulas: &[Formula]) -> Cirquent {
    let mut oformulas = Vec::new();
    let mut groups = Vec::new();
    for (i, f) in formulas.iter().enumerate() {
        oformulas.push(f.negate());
        oformulas.push(f.clone());
        groups.push([2 * i + 1, 2 * i + 2].into_iter().collect::<Group>());
    }
    Cirquent::from_parts_unchecked(oformulas, groups.clone(), groups)
}

/// Checks that `c` is the axiom for `formulas` (or, when `formulas` is
/// empty, for the formulas at its even positions).
pub fn check_axiom(c: &Cirquent, formulas: &[Formula]) -> Result<(), RuleViolation> {
    valid("axiom", c)?;
    if !c.len().is_multiple_of(2) {
        return Err(RuleViolation::OddAxiom(c.len()));
    }
    let inferred: Vec<Formula>;
    let formulas = if formulas.is_empty() {
        inferred = c.oformulas().iter().skip(1).step_by(2).cloned().collect();
        &inferred[..]
    } else {
        if formulas.len() * 2 != c.len() {
            return Err(RuleViolation::AxiomArity { given: formulas.len(), found: c.len() / 2 });
        }
        formulas
    };
    compare_cirquents("axiom", &axiom_cirquent(formulas), c)
}

fn remap_groups(groups: &[Group], f: impl Fn(usize) -> usize) -> Vec<Group> {
    groups.iter().map(|g| g.iter().map(|&i| f(i)).collect()).collect()
}

/// Conclusion of a forward rule applied to `premise`.
pub fn apply_forward(premise: &Cirquent, r: &RuleInstance) -> Result<Cirquent, RuleViolation> {
    let fs = premise.oformulas().to_vec();
    let us = premise.undergroups().to_vec();
    let os = premise.overgroups().to_vec();
    match *r {
        RuleInstance::OformulaExchange(p) => {
            check_position("oformula", p + 1, fs.len()).and(check_position("oformula", p, fs.len()))?;
            let mut fs = fs;
            fs.swap(p - 1, p);
            let swap = |i: usize| if i == p { p + 1 } else if i == p + 1 { p } else { i };
            Ok(Cirquent::from_parts_unchecked(fs, remap_groups(&us, swap), remap_groups(&os, swap)))
        }
        RuleInstance::UndergroupExchange(p) => {
            check_position("undergroup", p, us.len().saturating_sub(1))?;
            let mut us = us;
            us.swap(p - 1, p);
            Ok(Cirquent::from_parts_unchecked(fs, us, os))
        }
        RuleInstance::OvergroupExchange(p) => {
            check_position("overgroup", p, os.len().saturating_sub(1))?;
            let mut os = os;
            os.swap(p - 1, p);
            Ok(Cirquent::from_parts_unchecked(fs, us, os))
        }
        RuleInstance::UndergroupDuplication(p) => {
            check_position("undergroup", p, us.len())?;
            let mut us = us;
            us.insert(p, us[p - 1].clone());
            Ok(Cirquent::from_parts_unchecked(fs, us, os))
        }
        RuleInstance::OvergroupDuplication(p) => {
            check_position("overgroup", p, os.len())?;
            let mut os = os;
            os.insert(p, os[p - 1].clone());
            Ok(Cirquent::from_parts_unchecked(fs, us, os))
        }
        RuleInstance::Merging(p) => {
            check_position("overgroup", p, os.len().saturating_sub(1))?;
            let mut os = os;
            let second = os.remove(p);
            os[p - 1].extend(second);
            Ok(Cirquent::from_parts_unchecked(fs, us, os))
        }
        _ => Err(RuleViolation::NoPremise(r.name())),
    }
}

/// Splits oformula `a` into two adjacent oformulas `left`, `right`, both in
/// every overgroup that contained `a`. Undergroups are handled by `under`.
fn split_oformula(
    c: &Cirquent,
    a: usize,
    left: Formula,
    right: Formula,
    split_undergroups: bool,
) -> Cirquent {
    let shift = |i: usize| if i > a { i + 1 } else { i };
    let mut fs = c.oformulas().to_vec();
    fs[a - 1] = left;
    fs.insert(a, right);
    let both = |g: &Group| -> Group {
        let mut out: Group = g.iter().map(|&i| shift(i)).collect();
        if g.contains(&a) {
            out.insert(a + 1);
        }
        out
    };
    let os: Vec<Group> = c.overgroups().iter().map(both).collect();
    let mut us = Vec::new();
    for g in c.undergroups() {
        if split_undergroups && g.contains(&a) {
            let base: Group = g.iter().map(|&i| shift(i)).collect();
            let mut e = base.clone();
            e.remove(&(a + 1));
            let mut f = base;
            f.remove(&a);
            f.insert(a + 1);
            us.push(e);
            us.push(f);
        } else {
            us.push(both(g));
        }
    }
    Cirquent::from_parts_unchecked(fs, us, os)
}

/// Premise of a bottom-up rule, rebuilt from `conclusion`.
pub fn build_premise(conclusion: &Cirquent, r: &RuleInstance) -> Result<Cirquent, RuleViolation> {
    let k = conclusion.len();
    match r {
        RuleInstance::Weakening { under, oformula } => {
            let (i, a) = (*under, *oformula);
            check_position("undergroup", i, conclusion.num_undergroups())?;
            check_position("oformula", a, k)?;
            let target = conclusion.undergroup(i);
            if !target.contains(&a) {
                return Err(RuleViolation::NoSuchArc { under: i, oformula: a });
            }
            if target.len() < 2 {
                return Err(RuleViolation::UndergroupTooSmall(i));
            }
            let mut us = conclusion.undergroups().to_vec();
            us[i - 1].remove(&a);
            let still_used = us.iter().any(|g| g.contains(&a));
            if still_used {
                return Ok(Cirquent::from_parts_unchecked(conclusion.oformulas().to_vec(), us, conclusion.overgroups().to_vec()));
            }
            let shift = |x: usize| if x > a { x - 1 } else { x };
            let mut fs = conclusion.oformulas().to_vec();
            fs.remove(a - 1);
            let us = remap_groups(&us, shift);
            let os: Vec<Group> = conclusion
                .overgroups()
                .iter()
                .map(|g| g.iter().filter(|&&x| x != a).map(|&x| shift(x)).collect::<Group>())
                .filter(|g| !g.is_empty())
                .collect();
            Ok(Cirquent::from_parts_unchecked(fs, us, os))
        }
        RuleInstance::Contraction(a) => {
            check_position("oformula", *a, k)?;
            let f = conclusion.oformula(*a);
            if !matches!(f, Formula::Pcost(_)) {
                return Err(RuleViolation::WrongConnective { index: *a, expected: "?F", found: f.clone() });
            }
            Ok(split_oformula(conclusion, *a, f.clone(), f.clone(), false))
        }
        RuleInstance::OrIntro(a) | RuleInstance::AndIntro(a) => {
            check_position("oformula", *a, k)?;
            let is_and = matches!(r, RuleInstance::AndIntro(_));
            match (conclusion.oformula(*a), is_and) {
                (Formula::Or(e, f), false) | (Formula::And(e, f), true) => {
                    Ok(split_oformula(conclusion, *a, (**e).clone(), (**f).clone(), is_and))
                }
                (other, _) => Err(RuleViolation::WrongConnective {
                    index: *a,
                    expected: if is_and { "E /\\ F" } else { "E \\/ F" },
                    found: other.clone(),
                }),
            }
        }
        RuleInstance::PstIntro { oformula, new_over } => {
            let a = *oformula;
            check_position("oformula", a, k)?;
            let Formula::Pst(body) = conclusion.oformula(a) else {
                return Err(RuleViolation::WrongConnective { index: a, expected: "!F", found: conclusion.oformula(a).clone() });
            };
            let m = conclusion.num_overgroups();
            let q = new_over.unwrap_or(m + 1);
            check_position("new overgroup", q, m + 1)?;
            let mut fs = conclusion.oformulas().to_vec();
            fs[a - 1] = (**body).clone();
            let mut os = conclusion.overgroups().to_vec();
            os.insert(q - 1, [a].into_iter().collect());
            Ok(Cirquent::from_parts_unchecked(fs, conclusion.undergroups().to_vec(), os))
        }
        RuleInstance::PcostIntro { oformula, add_over } => {
            let a = *oformula;
            check_position("oformula", a, k)?;
            let Formula::Pcost(body) = conclusion.oformula(a) else {
                return Err(RuleViolation::WrongConnective { index: a, expected: "?F", found: conclusion.oformula(a).clone() });
            };
            let mut os = conclusion.overgroups().to_vec();
            for &j in add_over {
                check_position("overgroup", j, os.len())?;
                if !os[j - 1].insert(a) {
                    return Err(RuleViolation::AlreadyInOvergroup { over: j, oformula: a });
                }
            }
            let mut fs = conclusion.oformulas().to_vec();
            fs[a - 1] = (**body).clone();
            Ok(Cirquent::from_parts_unchecked(fs, conclusion.undergroups().to_vec(), os))
        }
        _ => Err(RuleViolation::NoPremise(r.name())),
    }
}

/// Checks that `conclusion` follows from `premise` by `r`.
pub fn check_step(premise: &Cirquent, conclusion: &Cirquent, r: &RuleInstance) -> Result<(), RuleViolation> {
    if let RuleInstance::Axiom(_) = r {
        return Err(RuleViolation::NoPremise("axiom"));
    }
    valid("premise", premise)?;
    valid("conclusion", conclusion)?;
    if r.is_forward() {
        compare_cirquents("conclusion", &apply_forward(premise, r)?, conclusion)
    } else {
        compare_cirquents("premise", &build_premise(conclusion, r)?, premise)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofStep {
    pub cirquent: Cirquent,
    pub rule: RuleInstance,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proof {
    pub steps: Vec<ProofStep>,
    /// The formula the proof claims to prove, if stated.
    pub proves: Option<Formula>,
}

impl Proof {
    pub fn new(steps: Vec<ProofStep>) -> Self {
        Proof { steps, proves: None }
    }

    pub fn proving(mut self, f: Formula) -> Self {
        self.proves = Some(f);
        self
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn last(&self) -> Option<&Cirquent> {
        self.steps.last().map(|s| &s.cirquent)
    }

    /// The formula `F` such that the last cirquent is `F♣`, if any.
    pub fn clubsuit_formula(&self) -> Option<&Formula> {
        let last = self.last()?;
        (last.len() == 1 && *last == clubsuit(last.oformula(1).clone())).then(|| last.oformula(1))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(f) = &self.proves {
            out.push_str(&format!("proves: {f}\n"));
        }
        for (i, s) in self.steps.iter().enumerate() {
            out.push_str(&format!("step {}: {}\n{}\n", i + 1, s.rule, s.cirquent.to_text()));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error("empty proof")]
    Empty,
    #[error("step 1: first step must be an axiom, found rule {0}")]
    NotAxiom(&'static str),
    #[error("step {step}: {violation}")]
    Step { step: usize, violation: RuleViolation },
    #[error("last cirquent is not the clubsuit of `{0}`")]
    WrongConclusion(Formula),
}

impl ProofError {
    pub fn step(&self) -> Option<usize> {
        match self {
            ProofError::Empty => None,
            ProofError::NotAxiom(_) => Some(1),
            ProofError::Step { step, .. } => Some(*step),
            ProofError::WrongConclusion(_) => None,
        }
    }
}

/// Verifies every step; when the proof states a formula, also checks that
/// the last cirquent is its clubsuit.
pub fn verify_proof(p: &Proof) -> Result<(), ProofError> {
    let first = p.steps.first().ok_or(ProofError::Empty)?;
    let RuleInstance::Axiom(fs) = &first.rule else {
        return Err(ProofError::NotAxiom(first.rule.name()));
    };
    check_axiom(&first.cirquent, fs).map_err(|violation| ProofError::Step { step: 1, violation })?;
    for (i, pair) in p.steps.windows(2).enumerate() {
        check_step(&pair[0].cirquent, &pair[1].cirquent, &pair[1].rule)
            .map_err(|violation| ProofError::Step { step: i + 2, violation })?;
    }
    if let Some(f) = &p.proves {
        if *p.last().expect("nonempty") != clubsuit(f.clone()) {
            return Err(ProofError::WrongConclusion(f.clone()));
        }
    }
    Ok(())
}

/// [`verify_proof`] plus the requirement that the proof proves `f`.
pub fn verify_proof_of(p: &Proof, f: &Formula) -> Result<(), ProofError> {
    verify_proof(p)?;
    if *p.last().expect("verified") != clubsuit(f.clone()) {
        return Err(ProofError::WrongConclusion(f.clone()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Cirquent { line: usize, source: CirquentError },
    #[error("line {line}: {source}")]
    Formula { line: usize, source: FormulaError },
}

fn parse_index(line: usize, key: &str, value: Option<&str>) -> Result<usize, ProofParseError> {
    let v = value.ok_or_else(|| ProofParseError::Syntax { line, msg: format!("missing parameter `{key}`") })?;
    v.parse::<usize>()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| ProofParseError::Syntax { line, msg: format!("`{key}` must be a positive integer, found `{v}`") })
}

fn parse_rule(line: usize, text: &str) -> Result<RuleInstance, ProofParseError> {
    let syntax = |msg: String| ProofParseError::Syntax { line, msg };
    let text = text.trim();
    let rest = text.strip_prefix("rule=").ok_or_else(|| syntax(format!("expected `rule=<name>`, found `{text}`")))?;
    let (name, params) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
    if name == "axiom" {
        let params = params.trim();
        if params.is_empty() {
            return Ok(RuleInstance::Axiom(Vec::new()));
        }
        let list = params.strip_prefix("formulas=").ok_or_else(|| syntax(format!("unknown axiom parameter `{params}`")))?;
        let fs = list
            .split('|')
            .map(|s| parse_formula(s.trim()).map_err(|source| ProofParseError::Formula { line, source }))
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(RuleInstance::Axiom(fs));
    }
    let mut kv = std::collections::BTreeMap::new();
    for item in params.split_whitespace() {
        let (k, v) = item.split_once('=').ok_or_else(|| syntax(format!("expected `key=value`, found `{item}`")))?;
        if kv.insert(k, v).is_some() {
            return Err(syntax(format!("duplicate parameter `{k}`")));
        }
    }
    let allowed: &[&str] = match name {
        "oformula-exchange" | "contraction" | "or" | "and" => &["oformula"],
        "undergroup-exchange" | "undergroup-duplication" => &["under"],
        "overgroup-exchange" | "overgroup-duplication" | "merging" => &["over"],
        "weakening" => &["under", "oformula"],
        "pst" => &["oformula", "new_over"],
        "pcost" => &["oformula", "add_over"],
        other => return Err(syntax(format!("unknown rule `{other}`"))),
    };
    if let Some(k) = kv.keys().find(|k| !allowed.contains(k)) {
        return Err(syntax(format!("rule `{name}` takes no parameter `{k}`")));
    }
    let get = |k: &str| parse_index(line, k, kv.get(k).copied());
    Ok(match name {
        "oformula-exchange" => RuleInstance::OformulaExchange(get("oformula")?),
        "contraction" => RuleInstance::Contraction(get("oformula")?),
        "or" => RuleInstance::OrIntro(get("oformula")?),
        "and" => RuleInstance::AndIntro(get("oformula")?),
        "undergroup-exchange" => RuleInstance::UndergroupExchange(get("under")?),
        "undergroup-duplication" => RuleInstance::UndergroupDuplication(get("under")?),
        "overgroup-exchange" => RuleInstance::OvergroupExchange(get("over")?),
        "overgroup-duplication" => RuleInstance::OvergroupDuplication(get("over")?),
        "merging" => RuleInstance::Merging(get("over")?),
        "weakening" => RuleInstance::Weakening { under: get("under")?, oformula: get("oformula")? },
        "pst" => RuleInstance::PstIntro {
            oformula: get("oformula")?,
            new_over: if kv.contains_key("new_over") { Some(get("new_over")?) } else { None },
        },
        "pcost" => {
            let raw = kv.get("add_over").copied().unwrap_or("{}");
            let inner = raw
                .strip_prefix('{')
                .and_then(|s| s.strip_suffix('}'))
                .ok_or_else(|| syntax(format!("`add_over` must look like {{1,2}}, found `{raw}`")))?;
            let mut add_over = BTreeSet::new();
            for item in inner.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                add_over.insert(parse_index(line, "add_over", Some(item))?);
            }
            RuleInstance::PcostIntro { oformula: get("oformula")?, add_over }
        }
        _ => unreachable!("names filtered above"),
    })
}

/// Parses the proof file format: an optional `proves: <formula>` line, then
/// blocks `step <k>: rule=<name> <params>` each followed by a cirquent in
/// text form (which may span several lines). `#` starts a comment line.
pub fn parse_proof(text: &str) -> Result<Proof, ProofParseError> {
    let mut proves = None;
    let mut blocks: Vec<(usize, RuleInstance, usize, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        if let Some(f) = l.strip_prefix("proves:") {
            if !blocks.is_empty() || proves.is_some() {
                return Err(ProofParseError::Syntax { line, msg: "`proves:` must come first, once".into() });
            }
            proves = Some(parse_formula(f.trim()).map_err(|source| ProofParseError::Formula { line, source })?);
        } else if let Some(rest) = l.strip_prefix("step ") {
            let (num, rule) = rest
                .split_once(':')
                .ok_or_else(|| ProofParseError::Syntax { line, msg: "expected `step <k>: rule=...`".into() })?;
            let expected = blocks.len() + 1;
            if num.trim().parse::<usize>().ok() != Some(expected) {
                return Err(ProofParseError::Syntax { line, msg: format!("expected step {expected}, found `{}`", num.trim()) });
            }
            blocks.push((line, parse_rule(line, rule)?, 0, String::new()));
        } else if let Some(block) = blocks.last_mut() {
            if block.2 == 0 {
                block.2 = line;
            }
            block.3.push(' ');
            block.3.push_str(l);
        } else {
            return Err(ProofParseError::Syntax { line, msg: format!("expected `step 1: ...`, found `{l}`") });
        }
    }
    let mut steps = Vec::new();
    for (line, rule, body_line, body) in blocks {
        if body.trim().is_empty() {
            return Err(ProofParseError::Syntax { line, msg: "step has no cirquent".into() });
        }
        let cirquent = parse_cirquent(&body).map_err(|source| ProofParseError::Cirquent { line: body_line, source })?;
        steps.push(ProofStep { cirquent, rule });
    }
    if steps.is_empty() {
        return Err(ProofParseError::Syntax { line: 0, msg: "no steps".into() });
    }
    Ok(Proof { steps, proves })
}

/// Fixture proof of `~P \/ P`.
pub fn fixture_p1() -> Proof {
    parse_proof(P1_TEXT).expect("fixture P1 parses")
}

/// Fixture proof of `?~P \/ !P`.
pub fn fixture_p2() -> Proof {
    parse_proof(P2_TEXT).expect("fixture P2 parses")
}

pub const P1_TEXT: &str = "\
proves: ~P \\/ P
step 1: rule=axiom
oformulas: ~P | P ; under: {1,2} ; over: {1,2}
step 2: rule=or oformula=1
oformulas: ~P \\/ P ; under: {1} ; over: {1}
";

pub const P2_TEXT: &str = "\
proves: ?~P \\/ !P
step 1: rule=axiom
oformulas: ~P | P ; under: {1,2} ; over: {1,2}
step 2: rule=overgroup-duplication over=1
oformulas: ~P | P ; under: {1,2} ; over: {1,2}{1,2}
step 3: rule=pcost oformula=1 add_over={2}
oformulas: ?~P | P ; under: {1,2} ; over: {1,2}{2}
step 4: rule=pst oformula=2
oformulas: ?~P | !P ; under: {1,2} ; over: {1,2}
step 5: rule=or oformula=1
oformulas: ?~P \\/ !P ; under: {1} ; over: {1}
";

/// Parse-only formulas whose validity status is not decided here.
pub const SEPARATION_FORMULAS: [&str; 2] = ["P /\\ !(P -> P /\\ P) -> !P", "P /\\ b!(P -> P /\\ P) -> b!P"];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cirquent::group;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn c(fs: &[&str], us: &[&[usize]], os: &[&[usize]]) -> Cirquent {
        Cirquent::new(
            fs.iter().map(|s| f(s)).collect(),
            us.iter().map(|g| group(g)).collect(),
            os.iter().map(|g| group(g)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn axiom_examples() {
        let one = c(&["~P", "P"], &[&[1, 2]], &[&[1, 2]]);
        assert_eq!(check_axiom(&one, &[f("P")]), Ok(()));
        assert_eq!(check_axiom(&one, &[]), Ok(()));
        let two = c(&["~F1", "F1", "~F2", "F2"], &[&[1, 2], &[3, 4]], &[&[1, 2], &[3, 4]]);
        assert_eq!(check_axiom(&two, &[f("F1"), f("F2")]), Ok(()));
        let swapped = c(&["P", "~P"], &[&[1, 2]], &[&[1, 2]]);
        assert!(check_axiom(&swapped, &[f("P")]).is_err());
        // read as the axiom for F1 = ~P, since ~~P is P
        assert_eq!(check_axiom(&swapped, &[]), Ok(()));
        assert!(check_axiom(&one, &[f("Q")]).is_err());
    }

    #[test]
    fn fixture_steps() {
        let premise = c(&["~P", "P"], &[&[1, 2]], &[&[1, 2]]);
        let conclusion = c(&["~P \\/ P"], &[&[1]], &[&[1]]);
        assert_eq!(check_step(&premise, &conclusion, &RuleInstance::OrIntro(1)), Ok(()));
        let c3 = c(&["?~P", "P"], &[&[1, 2]], &[&[1, 2], &[2]]);
        let c4 = c(&["?~P", "!P"], &[&[1, 2]], &[&[1, 2]]);
        assert_eq!(check_step(&c3, &c4, &RuleInstance::PstIntro { oformula: 2, new_over: None }), Ok(()));
    }

    #[test]
    fn fixtures_verify() {
        let p1 = fixture_p1();
        assert_eq!(p1.len(), 2);
        assert_eq!(verify_proof(&p1), Ok(()));
        assert_eq!(verify_proof_of(&p1, &f("~P \\/ P")), Ok(()));
        let p2 = fixture_p2();
        assert_eq!(p2.len(), 5);
        assert_eq!(verify_proof(&p2), Ok(()));
        assert_eq!(p2.clubsuit_formula(), Some(&f("?~P \\/ !P")));
    }

    #[test]
    fn reordered_proof_fails_at_step_one() {
        let mut p1 = fixture_p1();
        p1.steps.swap(0, 1);
        p1.steps[0].rule = RuleInstance::Axiom(Vec::new());
        assert_eq!(verify_proof(&p1).unwrap_err().step(), Some(1));
    }

    #[test]
    fn wrong_conclusion() {
        let p1 = fixture_p1();
        assert_eq!(verify_proof_of(&p1, &f("P \\/ ~P")), Err(ProofError::WrongConclusion(f("P \\/ ~P"))));
    }

    #[test]
    fn proof_text_round_trip() {
        for p in [fixture_p1(), fixture_p2()] {
            assert_eq!(parse_proof(&p.to_text()).unwrap(), p);
        }
    }

    #[test]
    fn proof_parse_errors() {
        assert!(matches!(parse_proof("step 2: rule=axiom\n"), Err(ProofParseError::Syntax { line: 1, .. })));
        assert!(matches!(parse_proof("step 1: rule=frobnicate\nx"), Err(ProofParseError::Syntax { line: 1, .. })));
        assert!(matches!(
            parse_proof("step 1: rule=axiom\noformulas: ~P | P ; under: {1,3} ; over: {1,2}\n"),
            Err(ProofParseError::Cirquent { line: 2, .. })
        ));
        assert!(parse_proof("step 1: rule=or under=1\n").is_err());
        assert!(parse_proof("step 1: rule=axiom\n").is_err());
    }

    #[test]
    fn weakening_cascade() {
        // deleting the only undergroup arc of oformula 2 removes it and the
        // overgroup that only held it
        let conclusion = c(&["E", "F", "G"], &[&[1, 2, 3]], &[&[1], &[2], &[3]]);
        let premise = build_premise(&conclusion, &RuleInstance::Weakening { under: 1, oformula: 2 }).unwrap();
        assert_eq!(premise, c(&["E", "G"], &[&[1, 2]], &[&[1], &[2]]));
        let single = c(&["E", "F"], &[&[1], &[1, 2]], &[&[1, 2]]);
        assert_eq!(
            build_premise(&single, &RuleInstance::Weakening { under: 1, oformula: 1 }),
            Err(RuleViolation::UndergroupTooSmall(1))
        );
    }

    #[test]
    fn pcost_rejects_existing_overgroup() {
        let conclusion = c(&["?P", "Q"], &[&[1, 2]], &[&[1, 2]]);
        let r = RuleInstance::PcostIntro { oformula: 1, add_over: [1].into_iter().collect() };
        assert_eq!(build_premise(&conclusion, &r), Err(RuleViolation::AlreadyInOvergroup { over: 1, oformula: 1 }));
    }

    #[test]
    fn wrong_connective() {
        let conclusion = c(&["P /\\ Q"], &[&[1]], &[&[1]]);
        assert!(matches!(build_premise(&conclusion, &RuleInstance::OrIntro(1)), Err(RuleViolation::WrongConnective { .. })));
    }

    #[test]
    fn separation_formulas_parse() {
        for s in SEPARATION_FORMULAS {
            assert!(parse_formula(s).is_ok());
        }
    }
}
