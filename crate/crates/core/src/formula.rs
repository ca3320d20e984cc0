//! Formulas of the `(¬, ∧, ∨, ⫰, ⫱)` language, plus the branching operators
//! `∘|` / `∘` kept for comparison.
//!
//! Stored formulas are always in negation normal form: `~` only ever sits
//! on an atom. The parser accepts negation anywhere (and `->` as sugar for
//! `~F \/ G`) and normalizes immediately.
//!
//! ASCII syntax:
//!
//! | symbol | meaning                  |
//! |--------|--------------------------|
//! | `~`    | negation                 |
//! | `/\`   | parallel conjunction     |
//! | `\/`   | parallel disjunction     |
//! | `!`    | parallel recurrence ⫰    |
//! | `?`    | parallel corecurrence ⫱  |
//! | `b!`   | branching recurrence ∘\| |
//! | `b?`   | branching corecurrence ∘ |
//! | `->`   | implication (sugar)      |

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// An atom name: an uppercase ASCII letter followed by ASCII alphanumerics.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom(String);

impl Atom {
    pub fn new(name: impl Into<String>) -> Result<Self, FormulaError> {
        let name = name.into();
        if is_atom_name(&name) {
            Ok(Atom(name))
        } else {
            Err(FormulaError::BadAtom(name))
        }
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn is_atom_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_uppercase()) && chars.all(|c| c.is_ascii_alphanumeric())
}

/// A formula in negation normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Atom),
    NegAtom(Atom),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    /// Parallel recurrence `!F`.
    Pst(Box<Formula>),
    /// Parallel corecurrence `?F`.
    Pcost(Box<Formula>),
    /// Branching recurrence `b!F`.
    St(Box<Formula>),
    /// Branching corecurrence `b?F`.
    Cost(Box<Formula>),
}

impl Formula {
    /// Panics if `name` is not a legal atom name; intended for literals.
    pub fn atom(name: &str) -> Self {
        Formula::Atom(Atom::new(name).expect("invalid atom name"))
    }

    pub fn neg_atom(name: &str) -> Self {
        Formula::NegAtom(Atom::new(name).expect("invalid atom name"))
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn pst(f: Formula) -> Self {
        Formula::Pst(Box::new(f))
    }

    pub fn pcost(f: Formula) -> Self {
        Formula::Pcost(Box::new(f))
    }

    pub fn st(f: Formula) -> Self {
        Formula::St(Box::new(f))
    }

    pub fn cost(f: Formula) -> Self {
        Formula::Cost(Box::new(f))
    }

    pub fn implies(l: Formula, r: Formula) -> Self {
        Formula::or(l.negate(), r)
    }

    /// The NNF dual: `¬F` with the negation pushed down to the atoms.
    pub fn negate(&self) -> Formula {
        match self {
            Formula::Atom(a) => Formula::NegAtom(a.clone()),
            Formula::NegAtom(a) => Formula::Atom(a.clone()),
            Formula::And(l, r) => Formula::or(l.negate(), r.negate()),
            Formula::Or(l, r) => Formula::and(l.negate(), r.negate()),
            Formula::Pst(f) => Formula::pcost(f.negate()),
            Formula::Pcost(f) => Formula::pst(f.negate()),
            Formula::St(f) => Formula::cost(f.negate()),
            Formula::Cost(f) => Formula::st(f.negate()),
        }
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Formula::Atom(a) | Formula::NegAtom(a) => {
                out.insert(a.clone());
            }
            Formula::And(l, r) | Formula::Or(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
            Formula::Pst(f) | Formula::Pcost(f) | Formula::St(f) | Formula::Cost(f) => f.collect_atoms(out),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::NegAtom(_) => 0,
            Formula::And(l, r) | Formula::Or(l, r) => 1 + l.depth().max(r.depth()),
            Formula::Pst(f) | Formula::Pcost(f) | Formula::St(f) | Formula::Cost(f) => 1 + f.depth(),
        }
    }

    /// True if the formula mentions neither `b!` nor `b?`.
    pub fn is_parallel_only(&self) -> bool {
        match self {
            Formula::Atom(_) | Formula::NegAtom(_) => true,
            Formula::And(l, r) | Formula::Or(l, r) => l.is_parallel_only() && r.is_parallel_only(),
            Formula::Pst(f) | Formula::Pcost(f) => f.is_parallel_only(),
            Formula::St(_) | Formula::Cost(_) => false,
        }
    }
}

/// Parser-side formula: negation may sit anywhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RawFormula {
    Atom(Atom),
    Not(Box<RawFormula>),
    And(Box<RawFormula>, Box<RawFormula>),
    Or(Box<RawFormula>, Box<RawFormula>),
    Implies(Box<RawFormula>, Box<RawFormula>),
    Pst(Box<RawFormula>),
    Pcost(Box<RawFormula>),
    St(Box<RawFormula>),
    Cost(Box<RawFormula>),
}

impl RawFormula {
    pub fn negated(f: RawFormula) -> Self {
        RawFormula::Not(Box::new(f))
    }
}

impl From<&Formula> for RawFormula {
    fn from(f: &Formula) -> Self {
        match f {
            Formula::Atom(a) => RawFormula::Atom(a.clone()),
            Formula::NegAtom(a) => RawFormula::negated(RawFormula::Atom(a.clone())),
            Formula::And(l, r) => RawFormula::And(Box::new(l.as_ref().into()), Box::new(r.as_ref().into())),
            Formula::Or(l, r) => RawFormula::Or(Box::new(l.as_ref().into()), Box::new(r.as_ref().into())),
            Formula::Pst(g) => RawFormula::Pst(Box::new(g.as_ref().into())),
            Formula::Pcost(g) => RawFormula::Pcost(Box::new(g.as_ref().into())),
            Formula::St(g) => RawFormula::St(Box::new(g.as_ref().into())),
            Formula::Cost(g) => RawFormula::Cost(Box::new(g.as_ref().into())),
        }
    }
}

/// Pushes negations to the atoms: `¬¬F = F`, De Morgan for `∧`/`∨`,
/// `¬!F = ?¬F`, `¬?F = !¬F`, `¬b!F = b?¬F`, `¬b?F = b!¬F`, and
/// `F -> G = ¬F ∨ G`.
pub fn normalize_negation(f: &RawFormula) -> Formula {
    normalize(f, false)
}

fn normalize(f: &RawFormula, negated: bool) -> Formula {
    match f {
        RawFormula::Atom(a) if negated => Formula::NegAtom(a.clone()),
        RawFormula::Atom(a) => Formula::Atom(a.clone()),
        RawFormula::Not(g) => normalize(g, !negated),
        RawFormula::And(l, r) if negated => Formula::or(normalize(l, true), normalize(r, true)),
        RawFormula::And(l, r) => Formula::and(normalize(l, false), normalize(r, false)),
        RawFormula::Or(l, r) if negated => Formula::and(normalize(l, true), normalize(r, true)),
        RawFormula::Or(l, r) => Formula::or(normalize(l, false), normalize(r, false)),
        RawFormula::Implies(l, r) if negated => Formula::and(normalize(l, false), normalize(r, true)),
        RawFormula::Implies(l, r) => Formula::or(normalize(l, true), normalize(r, false)),
        RawFormula::Pst(g) if negated => Formula::pcost(normalize(g, true)),
        RawFormula::Pst(g) => Formula::pst(normalize(g, false)),
        RawFormula::Pcost(g) if negated => Formula::pst(normalize(g, true)),
        RawFormula::Pcost(g) => Formula::pcost(normalize(g, false)),
        RawFormula::St(g) if negated => Formula::cost(normalize(g, true)),
        RawFormula::St(g) => Formula::st(normalize(g, false)),
        RawFormula::Cost(g) if negated => Formula::st(normalize(g, true)),
        RawFormula::Cost(g) => Formula::cost(normalize(g, false)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("invalid atom name `{0}`")]
    BadAtom(String),
    #[error("unknown token at position {pos}: `{found}`")]
    UnknownToken { pos: usize, found: String },
    #[error("syntax error at position {pos}: expected {expected}, found {found}")]
    Syntax { pos: usize, expected: &'static str, found: String },
    #[error("negation at position {pos} is not applied to a formula")]
    DanglingNegation { pos: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Atom(String),
    Not,
    And,
    Or,
    Implies,
    Pst,
    Pcost,
    St,
    Cost,
    LParen,
    RParen,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Atom(a) => a.clone(),
            Tok::Not => "~".into(),
            Tok::And => "/\\".into(),
            Tok::Or => "\\/".into(),
            Tok::Implies => "->".into(),
            Tok::Pst => "!".into(),
            Tok::Pcost => "?".into(),
            Tok::St => "b!".into(),
            Tok::Cost => "b?".into(),
            Tok::LParen => "(".into(),
            Tok::RParen => ")".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, FormulaError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let two = if i + 1 < bytes.len() { &bytes[i..i + 2] } else { &bytes[i..i + 1] };
        let (tok, len) = match (c, two) {
            (_, b"/\\") => (Tok::And, 2),
            (_, b"\\/") => (Tok::Or, 2),
            (_, b"->") => (Tok::Implies, 2),
            (_, b"b!") => (Tok::St, 2),
            (_, b"b?") => (Tok::Cost, 2),
            (b'~', _) => (Tok::Not, 1),
            (b'!', _) => (Tok::Pst, 1),
            (b'?', _) => (Tok::Pcost, 1),
            (b'(', _) => (Tok::LParen, 1),
            (b')', _) => (Tok::RParen, 1),
            (c, _) if c.is_ascii_uppercase() => {
                let mut j = i + 1;
                while j < bytes.len() && bytes[j].is_ascii_alphanumeric() {
                    j += 1;
                }
                (Tok::Atom(text[i..j].to_string()), j - i)
            }
            _ => {
                let found = text[i..].chars().next().map(String::from).unwrap_or_default();
                return Err(FormulaError::UnknownToken { pos: i, found });
            }
        };
        out.push((i, tok));
        i += len;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn found(&self) -> String {
        self.peek().map(Tok::describe).unwrap_or_else(|| "end of input".into())
    }

    fn implication(&mut self) -> Result<RawFormula, FormulaError> {
        let lhs = self.disjunction()?;
        if self.peek() == Some(&Tok::Implies) {
            self.pos += 1;
            let rhs = self.implication()?;
            return Ok(RawFormula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<RawFormula, FormulaError> {
        let mut lhs = self.conjunction()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            let rhs = self.conjunction()?;
            lhs = RawFormula::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<RawFormula, FormulaError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = RawFormula::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<RawFormula, FormulaError> {
        let start = self.offset();
        let tok = self.peek().cloned();
        match tok {
            Some(Tok::Not) => {
                self.pos += 1;
                match self.peek() {
                    None | Some(Tok::RParen | Tok::And | Tok::Or | Tok::Implies) => {
                        Err(FormulaError::DanglingNegation { pos: start })
                    }
                    _ => Ok(RawFormula::negated(self.unary()?)),
                }
            }
            Some(Tok::Pst) => {
                self.pos += 1;
                Ok(RawFormula::Pst(Box::new(self.unary()?)))
            }
            Some(Tok::Pcost) => {
                self.pos += 1;
                Ok(RawFormula::Pcost(Box::new(self.unary()?)))
            }
            Some(Tok::St) => {
                self.pos += 1;
                Ok(RawFormula::St(Box::new(self.unary()?)))
            }
            Some(Tok::Cost) => {
                self.pos += 1;
                Ok(RawFormula::Cost(Box::new(self.unary()?)))
            }
            Some(Tok::Atom(name)) => {
                self.pos += 1;
                Ok(RawFormula::Atom(Atom(name)))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.implication()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(FormulaError::Syntax { pos: self.offset(), expected: "`)`", found: self.found() });
                }
                self.pos += 1;
                Ok(inner)
            }
            _ => Err(FormulaError::Syntax { pos: start, expected: "a formula", found: self.found() }),
        }
    }
}

/// Parses the general syntax (negation anywhere, `->` allowed).
pub fn parse_raw_formula(text: &str) -> Result<RawFormula, FormulaError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0, end: text.len() };
    let f = p.implication()?;
    if p.pos != p.toks.len() {
        return Err(FormulaError::Syntax { pos: p.offset(), expected: "end of input", found: p.found() });
    }
    Ok(f)
}

pub fn parse_formula(text: &str) -> Result<Formula, FormulaError> {
    parse_raw_formula(text).map(|raw| normalize_negation(&raw))
}

impl FromStr for Formula {
    type Err = FormulaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_formula(s)
    }
}

// Binding levels used by the renderer: 0 = disjunction, 1 = conjunction, 2 = prefix/atom.
fn level(f: &Formula) -> u8 {
    match f {
        Formula::Or(..) => 0,
        Formula::And(..) => 1,
        _ => 2,
    }
}

fn write_at(f: &Formula, min_level: u8, out: &mut String) {
    if level(f) < min_level {
        out.push('(');
        write_formula(f, out);
        out.push(')');
    } else {
        write_formula(f, out);
    }
}

fn write_formula(f: &Formula, out: &mut String) {
    match f {
        Formula::Atom(a) => out.push_str(a.name()),
        Formula::NegAtom(a) => {
            out.push('~');
            out.push_str(a.name());
        }
        // Both binary connectives associate to the left in the grammar.
        Formula::Or(l, r) => {
            write_at(l, 0, out);
            out.push_str(" \\/ ");
            write_at(r, 1, out);
        }
        Formula::And(l, r) => {
            write_at(l, 1, out);
            out.push_str(" /\\ ");
            write_at(r, 2, out);
        }
        Formula::Pst(g) => {
            out.push('!');
            write_at(g, 2, out);
        }
        Formula::Pcost(g) => {
            out.push('?');
            write_at(g, 2, out);
        }
        Formula::St(g) => {
            out.push_str("b!");
            write_at(g, 2, out);
        }
        Formula::Cost(g) => {
            out.push_str("b?");
            write_at(g, 2, out);
        }
    }
}

/// Renders with the minimal parentheses needed to parse back to `f`.
pub fn render_formula(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(f, &mut out);
    out
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_formula(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn parses_basic_forms() {
        assert_eq!(p("~P \\/ P"), Formula::or(Formula::neg_atom("P"), Formula::atom("P")));
        assert_eq!(p("P -> Q"), Formula::or(Formula::neg_atom("P"), Formula::atom("Q")));
        assert_eq!(p("~!P"), Formula::pcost(Formula::neg_atom("P")));
    }

    #[test]
    fn normalizes_negations() {
        let nn = RawFormula::negated(RawFormula::negated(RawFormula::Atom(Atom::new("P").unwrap())));
        assert_eq!(normalize_negation(&nn), Formula::atom("P"));
        assert_eq!(p("~(P \\/ Q)"), Formula::and(Formula::neg_atom("P"), Formula::neg_atom("Q")));
        assert_eq!(p("~b?P"), Formula::st(Formula::neg_atom("P")));
        assert_eq!(p("~b!P"), Formula::cost(Formula::neg_atom("P")));
        assert_eq!(p("~?P"), Formula::pst(Formula::neg_atom("P")));
        assert_eq!(p("~(P -> Q)"), Formula::and(Formula::atom("P"), Formula::neg_atom("Q")));
    }

    #[test]
    fn renders_minimally() {
        assert_eq!(render_formula(&Formula::or(Formula::neg_atom("P"), Formula::atom("P"))), "~P \\/ P");
        assert_eq!(render_formula(&Formula::pst(Formula::and(Formula::atom("P"), Formula::atom("Q")))), "!(P /\\ Q)");
        assert_eq!(render_formula(&Formula::pcost(Formula::neg_atom("P"))), "?~P");
        let right_nested = Formula::or(Formula::atom("P"), Formula::or(Formula::atom("Q"), Formula::atom("R")));
        assert_eq!(render_formula(&right_nested), "P \\/ (Q \\/ R)");
        let mixed = Formula::and(Formula::or(Formula::atom("P"), Formula::atom("Q")), Formula::atom("R"));
        assert_eq!(render_formula(&mixed), "(P \\/ Q) /\\ R");
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(
            p("P \\/ Q /\\ R"),
            Formula::or(Formula::atom("P"), Formula::and(Formula::atom("Q"), Formula::atom("R")))
        );
        assert_eq!(p("!P /\\ Q"), Formula::and(Formula::pst(Formula::atom("P")), Formula::atom("Q")));
        // right-associative implication: P -> (Q -> R)
        assert_eq!(
            p("P -> Q -> R"),
            Formula::or(Formula::neg_atom("P"), Formula::or(Formula::neg_atom("Q"), Formula::atom("R")))
        );
        assert_eq!(
            p("P \\/ Q \\/ R"),
            Formula::or(Formula::or(Formula::atom("P"), Formula::atom("Q")), Formula::atom("R"))
        );
    }

    #[test]
    fn branching_tokens_do_not_collide_with_atoms() {
        assert_eq!(p("b!B1"), Formula::st(Formula::atom("B1")));
        assert_eq!(p("b? ~Bq"), Formula::cost(Formula::neg_atom("Bq")));
    }

    #[test]
    fn reports_errors() {
        assert!(matches!(parse_formula("P /\\"), Err(FormulaError::Syntax { pos: 4, .. })));
        assert!(matches!(parse_formula("P & Q"), Err(FormulaError::UnknownToken { pos: 2, .. })));
        assert!(matches!(parse_formula("~"), Err(FormulaError::DanglingNegation { pos: 0 })));
        assert!(matches!(parse_formula("(~)"), Err(FormulaError::DanglingNegation { pos: 1 })));
        assert!(matches!(parse_formula("(P"), Err(FormulaError::Syntax { .. })));
        assert!(matches!(parse_formula("P Q"), Err(FormulaError::Syntax { .. })));
        assert!(parse_formula("p").is_err());
        assert!(parse_formula("").is_err());
    }

    #[test]
    fn separation_fixtures_parse() {
        let par = p("P /\\ !(P -> P /\\ P) -> !P");
        let br = p("P /\\ b!(P -> P /\\ P) -> b!P");
        assert!(par.is_parallel_only());
        assert!(!br.is_parallel_only());
        assert_eq!(render_formula(&par), "~P \\/ ?(P /\\ (~P \\/ ~P)) \\/ !P");
    }
}
