//! Moves, labmoves, runs and the projection operators.
//!
//! Three projections carry the whole semantics:
//!
//! * [`project_prefix`]: keep moves `α·β`, strip `α` (components of `∧`, `∨`, `⫰`, `⫱`);
//! * [`project_branch`]: keep moves `u.β` with `u` an initial segment of an
//!   infinite bitstring `x` (threads of `∘|`, `∘`);
//! * [`project_cell`]: keep moves `a;u1,…,un.β` whose nonzero coordinates
//!   agree with `x⃗` (copies of an oformula inside a cirquent).

use std::fmt;
use std::ops::Not;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Player {
    /// ⊤, the machine.
    Top,
    /// ⊥, the environment.
    Bot,
}

impl Player {
    pub fn symbol(self) -> char {
        match self {
            Player::Top => 'T',
            Player::Bot => 'B',
        }
    }
}

impl Not for Player {
    type Output = Player;

    fn not(self) -> Player {
        match self {
            Player::Top => Player::Bot,
            Player::Bot => Player::Top,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

impl FromStr for Player {
    type Err = RunError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "T" => Ok(Player::Top),
            "B" => Ok(Player::Bot),
            other => Err(RunError::UnknownLabel(other.to_string())),
        }
    }
}

/// A move string. Projections can yield the empty move; parsed moves never are.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Move(String);

impl Move {
    pub fn new(text: impl Into<String>) -> Self {
        Move(text.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Move {
    fn from(s: &str) -> Self {
        Move(s.to_string())
    }
}

impl From<String> for Move {
    fn from(s: String) -> Self {
        Move(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Labmove {
    pub player: Player,
    pub mv: Move,
}

impl Labmove {
    pub fn new(player: Player, mv: impl Into<Move>) -> Self {
        Labmove { player, mv: mv.into() }
    }

    pub fn top(mv: impl Into<Move>) -> Self {
        Labmove::new(Player::Top, mv)
    }

    pub fn bot(mv: impl Into<Move>) -> Self {
        Labmove::new(Player::Bot, mv)
    }

    pub fn negated(&self) -> Labmove {
        Labmove { player: !self.player, mv: self.mv.clone() }
    }
}

impl fmt::Display for Labmove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.player, self.mv)
    }
}

/// A finite run (position).
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Run(Vec<Labmove>);

impl Run {
    pub fn empty() -> Self {
        Run(Vec::new())
    }

    pub fn from_labmoves(items: Vec<Labmove>) -> Self {
        Run(items)
    }

    pub fn labmoves(&self) -> &[Labmove] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, lm: Labmove) {
        self.0.push(lm);
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Labmove> {
        self.0.iter()
    }

    /// The initial segment of length `len`.
    pub fn prefix(&self, len: usize) -> Run {
        Run(self.0[..len].to_vec())
    }

    pub fn extended(&self, lm: Labmove) -> Run {
        let mut out = self.clone();
        out.push(lm);
        out
    }

    pub fn concat(&self, other: &Run) -> Run {
        let mut items = self.0.clone();
        items.extend(other.0.iter().cloned());
        Run(items)
    }

    /// The run file form: one `T <move>` / `B <move>` per line.
    pub fn to_text(&self) -> String {
        self.0.iter().map(|lm| format!("{lm}\n")).collect()
    }
}

impl fmt::Display for Run {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        for (i, lm) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}{}", lm.player, lm.mv)?;
        }
        f.write_str(">")
    }
}

impl FromIterator<Labmove> for Run {
    fn from_iter<I: IntoIterator<Item = Labmove>>(iter: I) -> Self {
        Run(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a Run {
    type Item = &'a Labmove;
    type IntoIter = std::slice::Iter<'a, Labmove>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RunError {
    #[error("unknown label `{0}` (expected T or B)")]
    UnknownLabel(String),
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: empty move")]
    EmptyMove { line: usize },
    #[error("move `{mv}` has {found} coordinates, expected {expected}")]
    CoordinateArity { mv: String, found: usize, expected: usize },
    #[error("invalid bitstring `{0}`")]
    BadBitstring(String),
}

/// Parses the run file format: `T <move>` / `B <move>` lines, `#` comments,
/// blank lines ignored.
pub fn parse_run(text: &str) -> Result<Run, RunError> {
    let mut items = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        items.push(parse_labmove(line).map_err(|e| match e {
            RunError::UnknownLabel(l) => RunError::Malformed { line: line_no, msg: format!("unknown label `{l}`") },
            RunError::EmptyMove { .. } => RunError::EmptyMove { line: line_no },
            other => RunError::Malformed { line: line_no, msg: other.to_string() },
        })?);
    }
    Ok(Run(items))
}

/// Parses a single `T <move>` / `B <move>` labmove.
pub fn parse_labmove(text: &str) -> Result<Labmove, RunError> {
    let text = text.trim();
    let (label, rest) = match text.split_once(char::is_whitespace) {
        Some((l, r)) => (l, r.trim()),
        None => (text, ""),
    };
    let player: Player = label.parse()?;
    if rest.is_empty() {
        return Err(RunError::EmptyMove { line: 0 });
    }
    if rest.chars().any(char::is_whitespace) {
        return Err(RunError::Malformed { line: 0, msg: format!("move `{rest}` contains whitespace") });
    }
    Ok(Labmove::new(player, rest))
}

/// `¬Γ`: every label flipped.
pub fn negate_run(run: &Run) -> Run {
    run.iter().map(Labmove::negated).collect()
}

/// `Γ^α`: keep the moves of the form `α·β`, then strip `α`.
pub fn project_prefix(run: &Run, prefix: &str) -> Run {
    run.iter()
        .filter_map(|lm| lm.mv.as_str().strip_prefix(prefix).map(|rest| Labmove::new(lm.player, rest)))
        .collect()
}

/// A finite bitstring.
pub type Bits = Vec<bool>;

pub fn parse_bits(s: &str) -> Option<Bits> {
    s.chars()
        .map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect()
}

pub fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// An eventually periodic infinite bitstring `stem · tail · tail · …`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InfiniteBitstring {
    stem: Bits,
    tail: Bits,
}

impl InfiniteBitstring {
    pub fn new(stem: Bits, tail: Bits) -> Result<Self, RunError> {
        if tail.is_empty() {
            return Err(RunError::BadBitstring("repeating tail must be non-empty".into()));
        }
        Ok(InfiniteBitstring { stem, tail })
    }

    /// `stem · 000…`
    pub fn zero_padded(stem: Bits) -> Self {
        InfiniteBitstring { stem, tail: vec![false] }
    }

    /// Parses `stem:tail` (or just `stem`, meaning a tail of `0`).
    pub fn parse(s: &str) -> Result<Self, RunError> {
        let (stem, tail) = s.split_once(':').unwrap_or((s, "0"));
        let stem = parse_bits(stem).ok_or_else(|| RunError::BadBitstring(s.to_string()))?;
        let tail = parse_bits(tail).ok_or_else(|| RunError::BadBitstring(s.to_string()))?;
        InfiniteBitstring::new(stem, tail)
    }

    pub fn stem(&self) -> &[bool] {
        &self.stem
    }

    pub fn tail(&self) -> &[bool] {
        &self.tail
    }

    pub fn bit(&self, i: usize) -> bool {
        if i < self.stem.len() {
            self.stem[i]
        } else {
            self.tail[(i - self.stem.len()) % self.tail.len()]
        }
    }

    /// Whether the finite bitstring `w` is an initial segment of `self`.
    pub fn has_prefix(&self, w: &[bool]) -> bool {
        w.iter().enumerate().all(|(i, &b)| self.bit(i) == b)
    }
}

impl fmt::Display for InfiniteBitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})...", bits_to_string(&self.stem), bits_to_string(&self.tail))
    }
}

/// Splits a move `w.β` into a finite bitstring `w` (possibly empty) and `β`.
pub fn split_branch_move(mv: &str) -> Option<(Bits, &str)> {
    let (head, rest) = mv.split_once('.')?;
    Some((parse_bits(head)?, rest))
}

/// `Ω^{≼x}`: keep moves `u.β` with `u` an initial segment of `x`, strip `u.`.
pub fn project_branch(run: &Run, x: &InfiniteBitstring) -> Run {
    run.iter()
        .filter_map(|lm| {
            let (w, rest) = split_branch_move(lm.mv.as_str())?;
            x.has_prefix(&w).then(|| Labmove::new(lm.player, rest))
        })
        .collect()
}

/// Parses a decimal numeral in canonical form (no sign, no leading zeros).
pub fn parse_natural(s: &str) -> Option<u64> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) || (s.len() > 1 && s.starts_with('0')) {
        return None;
    }
    s.parse().ok()
}

pub fn parse_positive(s: &str) -> Option<u64> {
    parse_natural(s).filter(|&n| n > 0)
}

/// A cirquent-level move `a;u1,…,un.β`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CellMove {
    pub oformula: usize,
    pub coords: Vec<u64>,
    pub rest: String,
}

impl CellMove {
    pub fn new(oformula: usize, coords: Vec<u64>, rest: impl Into<String>) -> Self {
        CellMove { oformula, coords, rest: rest.into() }
    }

    /// Parses `a;u1,…,un.rest`; `a;.rest` is the zero-coordinate form.
    pub fn parse(mv: &str) -> Option<CellMove> {
        let (a, tail) = mv.split_once(';')?;
        let oformula = parse_positive(a)? as usize;
        let (coords, rest) = tail.split_once('.')?;
        let coords = if coords.is_empty() {
            Vec::new()
        } else {
            coords.split(',').map(parse_natural).collect::<Option<Vec<_>>>()?
        };
        Some(CellMove { oformula, coords, rest: rest.to_string() })
    }

    pub fn render(&self) -> String {
        let coords: Vec<String> = self.coords.iter().map(u64::to_string).collect();
        format!("{};{}.{}", self.oformula, coords.join(","), self.rest)
    }
}

impl fmt::Display for CellMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// `Γ^{[a;x⃗]}`: keep the moves `a;u⃗.β` where each nonzero `u_i` equals
/// `x_i`, and strip everything up to the first `.`.
///
/// Moves prefixed `a;` that do not parse are dropped; a parsed move with
/// the wrong number of coordinates is an error.
pub fn project_cell(run: &Run, a: usize, xs: &[u64]) -> Result<Run, RunError> {
    let head = format!("{a};");
    let mut out = Vec::new();
    for lm in run {
        if !lm.mv.as_str().starts_with(&head) {
            continue;
        }
        let Some(cell) = CellMove::parse(lm.mv.as_str()) else { continue };
        if cell.coords.len() != xs.len() {
            return Err(RunError::CoordinateArity {
                mv: lm.mv.to_string(),
                found: cell.coords.len(),
                expected: xs.len(),
            });
        }
        if cell.coords.iter().zip(xs).all(|(&u, &x)| u == 0 || u == x) {
            out.push(Labmove::new(lm.player, cell.rest));
        }
    }
    Ok(Run(out))
}
