//! Cirquents: a sequence of oformulas together with sequences of
//! undergroups and overgroups over them.
//!
//! Oformulas and groups are positional. Group contents are sets of 1-based
//! oformula indices, and two groups with the same contents are still two
//! different groups.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::formula::{parse_formula, render_formula, Formula, FormulaError};

pub type Group = BTreeSet<usize>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupKind {
    Under,
    Over,
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupKind::Under => "undergroup",
            GroupKind::Over => "overgroup",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Violation {
    NoOformulas,
    NoGroups(GroupKind),
    EmptyGroup(GroupKind, usize),
    IndexOutOfRange { kind: GroupKind, group: usize, index: usize },
    NotInAnyGroup(GroupKind, usize),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoOformulas => write!(f, "no oformulas"),
            Violation::NoGroups(k) => write!(f, "no {k}s"),
            Violation::EmptyGroup(k, i) => write!(f, "empty {k} {i}"),
            Violation::IndexOutOfRange { kind, group, index } => {
                write!(f, "{kind} {group} refers to oformula {index}, which does not exist")
            }
            Violation::NotInAnyGroup(k, a) => write!(f, "oformula {a} in no {k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CirquentError {
    #[error("invalid cirquent: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("malformed cirquent text: {0}")]
    Syntax(String),
    #[error("oformula {index}: {source}")]
    Formula { index: usize, source: FormulaError },
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cirquent {
    oformulas: Vec<Formula>,
    undergroups: Vec<Group>,
    overgroups: Vec<Group>,
}

impl Cirquent {
    /// Builds a cirquent and checks every structural invariant.
    pub fn new(oformulas: Vec<Formula>, undergroups: Vec<Group>, overgroups: Vec<Group>) -> Result<Self, CirquentError> {
        let c = Cirquent { oformulas, undergroups, overgroups };
        validate_cirquent(&c).map_err(CirquentError::Invalid)?;
        Ok(c)
    }

    /// Builds a cirquent without validation (used by rule reconstruction
    /// and mutation tests; check with [`validate_cirquent`]).
    pub fn from_parts_unchecked(oformulas: Vec<Formula>, undergroups: Vec<Group>, overgroups: Vec<Group>) -> Self {
        Cirquent { oformulas, undergroups, overgroups }
    }

    pub fn oformulas(&self) -> &[Formula] {
        &self.oformulas
    }

    pub fn undergroups(&self) -> &[Group] {
        &self.undergroups
    }

    pub fn overgroups(&self) -> &[Group] {
        &self.overgroups
    }

    pub fn len(&self) -> usize {
        self.oformulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.oformulas.is_empty()
    }

    /// 1-based.
    pub fn oformula(&self, a: usize) -> &Formula {
        &self.oformulas[a - 1]
    }

    pub fn undergroup(&self, i: usize) -> &Group {
        &self.undergroups[i - 1]
    }

    pub fn overgroup(&self, j: usize) -> &Group {
        &self.overgroups[j - 1]
    }

    pub fn num_overgroups(&self) -> usize {
        self.overgroups.len()
    }

    pub fn num_undergroups(&self) -> usize {
        self.undergroups.len()
    }

    pub fn in_overgroup(&self, a: usize, j: usize) -> bool {
        self.overgroups[j - 1].contains(&a)
    }

    /// The 1-based overgroup positions containing oformula `a`.
    pub fn overgroups_of(&self, a: usize) -> Vec<usize> {
        (1..=self.overgroups.len()).filter(|&j| self.in_overgroup(a, j)).collect()
    }

    pub fn into_parts(self) -> (Vec<Formula>, Vec<Group>, Vec<Group>) {
        (self.oformulas, self.undergroups, self.overgroups)
    }

    pub fn atoms(&self) -> BTreeSet<crate::formula::Atom> {
        self.oformulas.iter().flat_map(Formula::atoms).collect()
    }

    /// The text form `oformulas: … ; under: {…}… ; over: {…}…`.
    pub fn to_text(&self) -> String {
        let fs: Vec<String> = self.oformulas.iter().map(render_formula).collect();
        format!(
            "oformulas: {} ; under: {} ; over: {}",
            fs.join(" | "),
            render_groups(&self.undergroups),
            render_groups(&self.overgroups)
        )
    }
}

fn render_groups(groups: &[Group]) -> String {
    groups
        .iter()
        .map(|g| format!("{{{}}}", g.iter().map(usize::to_string).collect::<Vec<_>>().join(",")))
        .collect()
}

impl fmt::Display for Cirquent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Lists every violated structural invariant; `Ok(())` if there are none.
pub fn validate_cirquent(c: &Cirquent) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    let k = c.oformulas.len();
    if k == 0 {
        out.push(Violation::NoOformulas);
    }
    for (kind, groups) in [(GroupKind::Under, &c.undergroups), (GroupKind::Over, &c.overgroups)] {
        if groups.is_empty() {
            out.push(Violation::NoGroups(kind));
        }
        for (i, g) in groups.iter().enumerate() {
            if g.is_empty() {
                out.push(Violation::EmptyGroup(kind, i + 1));
            }
            for &index in g {
                if index == 0 || index > k {
                    out.push(Violation::IndexOutOfRange { kind, group: i + 1, index });
                }
            }
        }
        for a in 1..=k {
            if !groups.iter().any(|g| g.contains(&a)) {
                out.push(Violation::NotInAnyGroup(kind, a));
            }
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// `F♣ = (⟨F⟩, ⟨{1}⟩, ⟨{1}⟩)`.
pub fn clubsuit(f: Formula) -> Cirquent {
    let one: Group = [1].into_iter().collect();
    Cirquent { oformulas: vec![f], undergroups: vec![one.clone()], overgroups: vec![one] }
}

fn parse_groups(text: &str) -> Result<Vec<Group>, CirquentError> {
    let mut groups = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let body = rest
            .strip_prefix('{')
            .ok_or_else(|| CirquentError::Syntax(format!("expected `{{` at `{rest}`")))?;
        let (inside, after) = body
            .split_once('}')
            .ok_or_else(|| CirquentError::Syntax(format!("unclosed group in `{text}`")))?;
        let mut g = Group::new();
        if !inside.trim().is_empty() {
            for item in inside.split(',') {
                let item = item.trim();
                let idx: usize = item
                    .parse()
                    .map_err(|_| CirquentError::Syntax(format!("bad oformula index `{item}`")))?;
                g.insert(idx);
            }
        }
        groups.push(g);
        rest = after.trim_start();
    }
    Ok(groups)
}

/// Parses the text form; the result is validated.
pub fn parse_cirquent(text: &str) -> Result<Cirquent, CirquentError> {
    let mut oformulas = None;
    let mut under = None;
    let mut over = None;
    for section in text.split(';') {
        let section = section.trim();
        if section.is_empty() {
            continue;
        }
        let (key, value) = section
            .split_once(':')
            .ok_or_else(|| CirquentError::Syntax(format!("expected `key: value` in `{section}`")))?;
        match key.trim() {
            "oformulas" => {
                let fs = value
                    .split('|')
                    .enumerate()
                    .map(|(i, s)| parse_formula(s.trim()).map_err(|source| CirquentError::Formula { index: i + 1, source }))
                    .collect::<Result<Vec<_>, _>>()?;
                oformulas = Some(fs);
            }
            "under" => under = Some(parse_groups(value)?),
            "over" => over = Some(parse_groups(value)?),
            other => return Err(CirquentError::Syntax(format!("unknown section `{other}`"))),
        }
    }
    let missing = |name: &str| CirquentError::Syntax(format!("missing `{name}` section"));
    Cirquent::new(
        oformulas.ok_or_else(|| missing("oformulas"))?,
        under.ok_or_else(|| missing("under"))?,
        over.ok_or_else(|| missing("over"))?,
    )
}

impl FromStr for Cirquent {
    type Err = CirquentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_cirquent(s)
    }
}

/// Three-layer ASCII diagram: overgroup rows, the oformula row, then
/// undergroup rows. `|` marks an arc between a group and an oformula.
pub fn render_diagram(c: &Cirquent) -> String {
    let names: Vec<String> = c.oformulas.iter().map(render_formula).collect();
    let widths: Vec<usize> = names.iter().map(|n| n.chars().count().max(1) + 2).collect();
    let label_width = 2 + c.undergroups.len().max(c.overgroups.len()).to_string().len();
    let row = |label: String, group: &Group| {
        let mut line = format!("{label:<label_width$} ");
        for (i, w) in widths.iter().enumerate() {
            let mark = if group.contains(&(i + 1)) { "|" } else { "" };
            line.push_str(&format!("{mark:<w$}"));
        }
        line.trim_end().to_string()
    };
    let mut out = Vec::new();
    for (j, g) in c.overgroups.iter().enumerate() {
        out.push(row(format!("O{}", j + 1), g));
    }
    let mut formulas = format!("{:<label_width$} ", "");
    for (name, w) in names.iter().zip(&widths) {
        formulas.push_str(&format!("{name:<w$}"));
    }
    out.push(formulas.trim_end().to_string());
    for (i, g) in c.undergroups.iter().enumerate() {
        out.push(row(format!("U{}", i + 1), g));
    }
    out.join("\n") + "\n"
}

/// Shorthand for building groups in tests and fixtures.
pub fn group(indices: &[usize]) -> Group {
    indices.iter().copied().collect()
}
