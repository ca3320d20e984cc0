//! Executable game semantics.
//!
//! A [`Game`] exposes legality and, for legal runs, the winner. The winner of
//! an illegal run is always derived from the shortest illegal prefix: the
//! player who made its last move loses.
//!
//! Composite games never enumerate infinitely many copies or threads. A
//! finite run touches finitely many of them and every untouched one carries
//! the empty run, so the quantifiers in the winning conditions are decided
//! by the touched representatives plus one empty-run evaluation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::cirquent::{validate_cirquent, Cirquent, Violation};
use crate::formula::{Atom, Formula};
use crate::runs::{
    negate_run, parse_labmove, parse_natural, parse_positive, parse_run, project_branch, project_cell, project_prefix,
    split_branch_move, Bits, CellMove, InfiniteBitstring, Labmove, Move, Player, Run, RunError,
};

pub trait Game: Send + Sync {
    fn is_legal(&self, run: &Run) -> bool;

    /// Winner of a run that is known to be legal.
    fn legal_winner(&self, run: &Run) -> Player;

    fn describe(&self) -> String;

    /// Base moves worth trying when generating plays; `None` when the game
    /// does not advertise a finite alphabet.
    fn move_alphabet(&self) -> Option<Vec<Move>> {
        None
    }

    /// Index of the last labmove of the shortest illegal initial segment.
    fn first_illegal(&self, run: &Run) -> Option<usize> {
        if self.is_legal(run) {
            return None;
        }
        (1..=run.len()).find(|&len| !self.is_legal(&run.prefix(len))).map(|len| len - 1)
    }

    fn winner(&self, run: &Run) -> Player {
        match self.first_illegal(run) {
            Some(i) => !run.labmoves()[i].player,
            None => self.legal_winner(run),
        }
    }
}

pub type GameRef = Arc<dyn Game>;

impl fmt::Debug for dyn Game {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("legal-run tree is not prefix-closed: {0} is missing")]
    NotPrefixClosed(Run),
    #[error("legal run {0} has no winner label")]
    MissingLabel(Run),
    #[error("label given for {0}, which is not in the tree")]
    StrayLabel(Run),
    #[error("atom {0} is not interpreted")]
    UnmappedAtom(Atom),
    #[error("invalid cirquent: {0:?}")]
    InvalidCirquent(Vec<Violation>),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error(transparent)]
    Run(#[from] RunError),
}

/// A finite, explicitly tabulated game: the set of legal runs (prefix
/// closed, containing the empty run) with a winner label on each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGame {
    labels: BTreeMap<Run, Player>,
}

impl FiniteGame {
    pub fn new(tree: BTreeSet<Run>, labels: BTreeMap<Run, Player>) -> Result<Self, GameError> {
        if let Some(stray) = labels.keys().find(|r| !tree.contains(*r)) {
            return Err(GameError::StrayLabel(stray.clone()));
        }
        if !tree.contains(&Run::empty()) {
            return Err(GameError::NotPrefixClosed(Run::empty()));
        }
        for run in &tree {
            if !run.is_empty() {
                let parent = run.prefix(run.len() - 1);
                if !tree.contains(&parent) {
                    return Err(GameError::NotPrefixClosed(parent));
                }
            }
            if !labels.contains_key(run) {
                return Err(GameError::MissingLabel(run.clone()));
            }
        }
        Ok(FiniteGame { labels })
    }

    /// Tree given implicitly by the labelled runs.
    pub fn from_labels(labels: impl IntoIterator<Item = (Run, Player)>) -> Result<Self, GameError> {
        let labels: BTreeMap<Run, Player> = labels.into_iter().collect();
        let tree = labels.keys().cloned().collect();
        FiniteGame::new(tree, labels)
    }

    pub fn labels(&self) -> &BTreeMap<Run, Player> {
        &self.labels
    }

    pub fn positions(&self) -> usize {
        self.labels.len()
    }

    pub fn depth(&self) -> usize {
        self.labels.keys().map(Run::len).max().unwrap_or(0)
    }

    /// Parses the `finitegame` text format.
    pub fn parse(text: &str) -> Result<Self, GameError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        match lines.next() {
            Some((_, "finitegame")) => {}
            Some((line, other)) => {
                return Err(GameError::Syntax { line, msg: format!("expected `finitegame` header, found `{other}`") })
            }
            None => return Err(GameError::Syntax { line: 0, msg: "empty finite game".into() }),
        }
        let mut labels = BTreeMap::new();
        for (line, l) in lines {
            let (run_text, label) = l
                .split_once("=>")
                .ok_or_else(|| GameError::Syntax { line, msg: "expected `<run> => T|B`".into() })?;
            let player: Player = label
                .trim()
                .parse()
                .map_err(|e: RunError| GameError::Syntax { line, msg: e.to_string() })?;
            let run_text = run_text.trim();
            let run = if run_text == "()" {
                Run::empty()
            } else {
                run_text
                    .split(';')
                    .map(parse_labmove)
                    .collect::<Result<Run, _>>()
                    .map_err(|e| GameError::Syntax { line, msg: e.to_string() })?
            };
            if labels.insert(run.clone(), player).is_some() {
                return Err(GameError::Syntax { line, msg: format!("duplicate run {run}") });
            }
        }
        FiniteGame::from_labels(labels)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("finitegame\n");
        for (run, p) in &self.labels {
            let r = if run.is_empty() {
                "()".to_string()
            } else {
                run.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
            };
            out.push_str(&format!("{r} => {p}\n"));
        }
        out
    }
}

impl Game for FiniteGame {
    fn is_legal(&self, run: &Run) -> bool {
        self.labels.contains_key(run)
    }

    fn legal_winner(&self, run: &Run) -> Player {
        self.labels[run]
    }

    fn describe(&self) -> String {
        format!("finite game ({} positions, depth {})", self.positions(), self.depth())
    }

    fn move_alphabet(&self) -> Option<Vec<Move>> {
        let moves: BTreeSet<Move> = self.labels.keys().flat_map(|r| r.iter().map(|lm| lm.mv.clone())).collect();
        Some(moves.into_iter().collect())
    }
}

pub type RunPredicate = Arc<dyn Fn(&Run) -> bool + Send + Sync>;

/// Every decimal numeral is a legal move for either player at any time;
/// `⊥` wins exactly the runs selected by the loser predicate.
#[derive(Clone)]
pub struct EnumerationGame {
    loser: RunPredicate,
    name: String,
}

impl EnumerationGame {
    pub fn new(name: impl Into<String>, loser: RunPredicate) -> Self {
        EnumerationGame { loser, name: name.into() }
    }

    /// `⊤` loses exactly the run `target`.
    pub fn loses_on(target: Run) -> Self {
        let name = format!("enum:loses-on {target}");
        EnumerationGame::new(name, Arc::new(move |r: &Run| *r == target))
    }

    /// `⊤` wins every legal run.
    pub fn always_top() -> Self {
        EnumerationGame::new("enum:always-top", Arc::new(|_: &Run| false))
    }
}

impl fmt::Debug for EnumerationGame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EnumerationGame").field("name", &self.name).finish()
    }
}

impl Game for EnumerationGame {
    fn is_legal(&self, run: &Run) -> bool {
        run.iter().all(|lm| parse_natural(lm.mv.as_str()).is_some())
    }

    fn legal_winner(&self, run: &Run) -> Player {
        if (self.loser)(run) {
            Player::Bot
        } else {
            Player::Top
        }
    }

    fn describe(&self) -> String {
        self.name.clone()
    }

    fn move_alphabet(&self) -> Option<Vec<Move>> {
        Some((0..10).map(|n| Move::new(n.to_string())).collect())
    }
}

pub fn make_finite_game(game: FiniteGame) -> GameRef {
    Arc::new(game)
}

pub fn make_enumeration_game(loser: RunPredicate) -> GameRef {
    Arc::new(EnumerationGame::new("enum", loser))
}

/// `¬A`.
pub struct Negation(pub GameRef);

impl Game for Negation {
    fn is_legal(&self, run: &Run) -> bool {
        self.0.is_legal(&negate_run(run))
    }

    fn legal_winner(&self, run: &Run) -> Player {
        !self.0.legal_winner(&negate_run(run))
    }

    fn describe(&self) -> String {
        format!("~({})", self.0.describe())
    }

    fn move_alphabet(&self) -> Option<Vec<Move>> {
        self.0.move_alphabet()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantifier {
    /// `⊤` must win every component (`∧`, `⫰`, `∘|`).
    All,
    /// `⊤` must win some component (`∨`, `⫱`, `∘`).
    Some,
}

impl Quantifier {
    fn combine(self, mut wins: impl Iterator<Item = bool>) -> Player {
        let top = match self {
            Quantifier::All => wins.all(|w| w),
            Quantifier::Some => wins.any(|w| w),
        };
        if top {
            Player::Top
        } else {
            Player::Bot
        }
    }
}

/// `A1 ∧ A2` and `A1 ∨ A2`.
pub struct Parallel {
    pub quantifier: Quantifier,
    pub left: GameRef,
    pub right: GameRef,
}

impl Game for Parallel {
    fn is_legal(&self, run: &Run) -> bool {
        run.iter().all(|lm| {
            let m = lm.mv.as_str();
            m.starts_with("1.") || m.starts_with("2.")
        }) && self.left.is_legal(&project_prefix(run, "1."))
            && self.right.is_legal(&project_prefix(run, "2."))
    }

    fn legal_winner(&self, run: &Run) -> Player {
        let l = self.left.legal_winner(&project_prefix(run, "1.")) == Player::Top;
        let r = self.right.legal_winner(&project_prefix(run, "2.")) == Player::Top;
        self.quantifier.combine([l, r].into_iter())
    }

    fn describe(&self) -> String {
        let op = match self.quantifier {
            Quantifier::All => "/\\",
            Quantifier::Some => "\\/",
        };
        format!("({}) {op} ({})", self.left.describe(), self.right.describe())
    }
}

fn copy_index(m: &Move) -> Option<u64> {
    let (head, _) = m.as_str().split_once('.')?;
    parse_positive(head)
}

/// The copies `u` touched by a run of `⫰A` / `⫱A`.
pub fn touched_copies(run: &Run) -> BTreeSet<u64> {
    run.iter().filter_map(|lm| copy_index(&lm.mv)).collect()
}

/// `⫰A` and `⫱A`.
pub struct Recurrence {
    pub quantifier: Quantifier,
    pub body: GameRef,
}

impl Game for Recurrence {
    fn is_legal(&self, run: &Run) -> bool {
        run.iter().all(|lm| copy_index(&lm.mv).is_some())
            && touched_copies(run).into_iter().all(|u| self.body.is_legal(&project_prefix(run, &format!("{u}."))))
    }

    fn legal_winner(&self, run: &Run) -> Player {
        let untouched = self.body.legal_winner(&Run::empty()) == Player::Top;
        let touched = touched_copies(run)
            .into_iter()
            .map(|u| self.body.legal_winner(&project_prefix(run, &format!("{u}."))) == Player::Top);
        self.quantifier.combine(std::iter::once(untouched).chain(touched))
    }

    fn describe(&self) -> String {
        let op = match self.quantifier {
            Quantifier::All => "!",
            Quantifier::Some => "?",
        };
        format!("{op}({})", self.body.describe())
    }
}

/// Representatives of the thread classes of a run of `∘|A` / `∘A`.
///
/// Two infinite bitstrings are equivalent when the same bitstrings of the
/// run are initial segments of both; equivalent threads see the same
/// projection. Walking the trie of (prefixes of) the used bitstrings and
/// leaving it through every missing child reaches every class; the result
/// is deduplicated by class.
pub fn thread_representatives(used: &BTreeSet<Bits>) -> Vec<InfiniteBitstring> {
    let mut trie: BTreeSet<Bits> = [Bits::new()].into_iter().collect();
    for w in used {
        for len in 0..=w.len() {
            trie.insert(w[..len].to_vec());
        }
    }
    let mut seen: BTreeSet<Vec<Bits>> = BTreeSet::new();
    let mut reps = Vec::new();
    for node in &trie {
        for bit in [false, true] {
            let mut exit = node.clone();
            exit.push(bit);
            if trie.contains(&exit) {
                continue;
            }
            let x = InfiniteBitstring::zero_padded(exit);
            let class: Vec<Bits> = used.iter().filter(|w| x.has_prefix(w)).cloned().collect();
            if seen.insert(class) {
                reps.push(x);
            }
        }
    }
    reps
}

/// The bitstrings `w` of the moves `w.α` in a run.
pub fn used_bitstrings(run: &Run) -> BTreeSet<Bits> {
    run.iter().filter_map(|lm| split_branch_move(lm.mv.as_str()).map(|(w, _)| w)).collect()
}

/// `∘|A` and `∘A`.
pub struct Branching {
    pub quantifier: Quantifier,
    pub body: GameRef,
}

impl Game for Branching {
    fn is_legal(&self, run: &Run) -> bool {
        run.iter().all(|lm| split_branch_move(lm.mv.as_str()).is_some())
            && thread_representatives(&used_bitstrings(run))
                .iter()
                .all(|x| self.body.is_legal(&project_branch(run, x)))
    }

    fn legal_winner(&self, run: &Run) -> Player {
        let reps = thread_representatives(&used_bitstrings(run));
        self.quantifier
            .combine(reps.iter().map(|x| self.body.legal_winner(&project_branch(run, x)) == Player::Top))
    }

    fn describe(&self) -> String {
        let op = match self.quantifier {
            Quantifier::All => "b!",
            Quantifier::Some => "b?",
        };
        format!("{op}({})", self.body.describe())
    }
}

/// An interpretation: atoms to games.
#[derive(Clone, Default)]
pub struct Interpretation {
    games: BTreeMap<Atom, GameRef>,
}

impl Interpretation {
    pub fn new() -> Self {
        Interpretation::default()
    }

    pub fn with(mut self, atom: Atom, game: GameRef) -> Self {
        self.games.insert(atom, game);
        self
    }

    pub fn insert(&mut self, atom: Atom, game: GameRef) {
        self.games.insert(atom, game);
    }

    pub fn get(&self, atom: &Atom) -> Option<&GameRef> {
        self.games.get(atom)
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.games.keys()
    }

    pub fn describe(&self) -> String {
        self.games
            .iter()
            .map(|(a, g)| format!("{a} = {}", g.describe()))
            .collect::<Vec<_>>()
            .join("; ")
    }

    /// Parses an interpretation file: sections introduced by `atom <Name>`
    /// lines, each holding either a `finitegame` block or a single
    /// `enum:loses-on run=<path>` / `enum:always-top` line. Run paths are
    /// resolved through `load`.
    pub fn parse(text: &str, load: &dyn Fn(&str) -> Result<String, String>) -> Result<Self, GameError> {
        let mut out = Interpretation::new();
        let mut current: Option<(usize, Atom, Vec<String>)> = None;
        let finish = |section: Option<(usize, Atom, Vec<String>)>, out: &mut Interpretation| -> Result<(), GameError> {
            let Some((line, atom, body)) = section else { return Ok(()) };
            let game = parse_game_section(line, &body, load)?;
            out.insert(atom, game);
            Ok(())
        };
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix("atom ") {
                finish(current.take(), &mut out)?;
                let atom = Atom::new(name.trim())
                    .map_err(|e| GameError::Syntax { line: i + 1, msg: e.to_string() })?;
                current = Some((i + 1, atom, Vec::new()));
            } else if let Some((_, _, body)) = current.as_mut() {
                body.push(line.to_string());
            } else {
                return Err(GameError::Syntax { line: i + 1, msg: "expected `atom <Name>`".into() });
            }
        }
        finish(current.take(), &mut out)?;
        Ok(out)
    }
}

fn parse_game_section(
    line: usize,
    body: &[String],
    load: &dyn Fn(&str) -> Result<String, String>,
) -> Result<GameRef, GameError> {
    let first = body.first().map(String::as_str).unwrap_or("");
    if first == "finitegame" {
        let text = body.join("\n");
        return FiniteGame::parse(&text).map(make_finite_game).map_err(|e| match e {
            GameError::Syntax { line: l, msg } => GameError::Syntax { line: line + l, msg },
            other => other,
        });
    }
    if first == "enum:always-top" && body.len() == 1 {
        return Ok(Arc::new(EnumerationGame::always_top()));
    }
    if let Some(path) = first.strip_prefix("enum:loses-on run=") {
        if body.len() == 1 {
            let text = load(path.trim()).map_err(|msg| GameError::Syntax { line: line + 1, msg })?;
            let run = parse_run(&text)?;
            return Ok(Arc::new(EnumerationGame::loses_on(run)));
        }
    }
    Err(GameError::Syntax { line: line + 1, msg: format!("unrecognized game `{first}`") })
}

impl fmt::Debug for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// The game `F*`.
pub fn interpret_formula(f: &Formula, interp: &Interpretation) -> Result<GameRef, GameError> {
    let lookup = |a: &Atom| interp.get(a).cloned().ok_or_else(|| GameError::UnmappedAtom(a.clone()));
    Ok(match f {
        Formula::Atom(a) => lookup(a)?,
        Formula::NegAtom(a) => Arc::new(Negation(lookup(a)?)),
        Formula::And(l, r) | Formula::Or(l, r) => Arc::new(Parallel {
            quantifier: if matches!(f, Formula::And(..)) { Quantifier::All } else { Quantifier::Some },
            left: interpret_formula(l, interp)?,
            right: interpret_formula(r, interp)?,
        }),
        Formula::Pst(g) => Arc::new(Recurrence { quantifier: Quantifier::All, body: interpret_formula(g, interp)? }),
        Formula::Pcost(g) => Arc::new(Recurrence { quantifier: Quantifier::Some, body: interpret_formula(g, interp)? }),
        Formula::St(g) => Arc::new(Branching { quantifier: Quantifier::All, body: interpret_formula(g, interp)? }),
        Formula::Cost(g) => Arc::new(Branching { quantifier: Quantifier::Some, body: interpret_formula(g, interp)? }),
    })
}

/// The game `C*` of a cirquent.
pub struct CirquentGame {
    cirquent: Cirquent,
    components: Vec<GameRef>,
}

impl CirquentGame {
    pub fn cirquent(&self) -> &Cirquent {
        &self.cirquent
    }

    fn parse_cell_moves(&self, run: &Run) -> Option<Vec<CellMove>> {
        let k = self.cirquent.len();
        let n = self.cirquent.num_overgroups();
        run.iter()
            .map(|lm| {
                let cell = CellMove::parse(lm.mv.as_str())?;
                let shaped = (1..=k).contains(&cell.oformula)
                    && cell.coords.len() == n
                    && cell
                        .coords
                        .iter()
                        .enumerate()
                        .all(|(j, &u)| (u == 0) != self.cirquent.in_overgroup(cell.oformula, j + 1));
                shaped.then_some(cell)
            })
            .collect()
    }

    /// Per overgroup coordinate, the nonzero values used in the run plus one
    /// fresh value; unused coordinates get the single value 1.
    fn coordinate_candidates(cells: &[CellMove], n: usize) -> Vec<Vec<u64>> {
        (0..n)
            .map(|j| {
                let used: BTreeSet<u64> = cells.iter().map(|c| c.coords[j]).filter(|&u| u != 0).collect();
                let fresh = used.iter().next_back().map_or(1, |m| m + 1);
                used.into_iter().chain(std::iter::once(fresh)).collect()
            })
            .collect()
    }

    /// All `x⃗` over the coordinates in `relevant`; the others stay at 1.
    fn vectors(candidates: &[Vec<u64>], relevant: &BTreeSet<usize>) -> Vec<Vec<u64>> {
        let mut out = vec![vec![1u64; candidates.len()]];
        for &j in relevant {
            out = out
                .into_iter()
                .flat_map(|v| {
                    candidates[j].iter().map(move |&x| {
                        let mut w = v.clone();
                        w[j] = x;
                        w
                    })
                })
                .collect();
        }
        out
    }

    fn relevant_coords(&self, members: impl IntoIterator<Item = usize>) -> BTreeSet<usize> {
        members.into_iter().flat_map(|a| self.cirquent.overgroups_of(a)).map(|j| j - 1).collect()
    }
}

impl Game for CirquentGame {
    fn is_legal(&self, run: &Run) -> bool {
        let Some(cells) = self.parse_cell_moves(run) else { return false };
        let candidates = Self::coordinate_candidates(&cells, self.cirquent.num_overgroups());
        (1..=self.cirquent.len()).all(|a| {
            Self::vectors(&candidates, &self.relevant_coords([a])).iter().all(|xs| {
                project_cell(run, a, xs).map(|r| self.components[a - 1].is_legal(&r)).unwrap_or(false)
            })
        })
    }

    fn legal_winner(&self, run: &Run) -> Player {
        let cells = self.parse_cell_moves(run).unwrap_or_default();
        let candidates = Self::coordinate_candidates(&cells, self.cirquent.num_overgroups());
        let all_won = self.cirquent.undergroups().iter().all(|under| {
            Self::vectors(&candidates, &self.relevant_coords(under.iter().copied())).iter().all(|xs| {
                under.iter().any(|&a| {
                    project_cell(run, a, xs)
                        .map(|r| self.components[a - 1].legal_winner(&r) == Player::Top)
                        .unwrap_or(false)
                })
            })
        });
        if all_won {
            Player::Top
        } else {
            Player::Bot
        }
    }

    fn describe(&self) -> String {
        format!("({})*", self.cirquent)
    }
}

pub fn interpret_cirquent(c: &Cirquent, interp: &Interpretation) -> Result<GameRef, GameError> {
    validate_cirquent(c).map_err(GameError::InvalidCirquent)?;
    let components = c.oformulas().iter().map(|f| interpret_formula(f, interp)).collect::<Result<Vec<_>, _>>()?;
    Ok(Arc::new(CirquentGame { cirquent: c.clone(), components }))
}

/// Convenience for tests and fixtures: a finite game from `(run text, label)`
/// pairs, where run text uses `;`-joined labmoves and `()` for the empty run.
pub fn finite_game(rows: &[(&str, Player)]) -> FiniteGame {
    let labels = rows.iter().map(|(r, p)| {
        let run = if *r == "()" {
            Run::empty()
        } else {
            r.split(';').map(|s| parse_labmove(s).expect("bad labmove")).collect()
        };
        (run, *p)
    });
    FiniteGame::from_labels(labels).expect("bad finite game")
}

/// Helper for test code: a run from `(player, move)` pairs.
pub fn run_of(items: &[(Player, &str)]) -> Run {
    items.iter().map(|(p, m)| Labmove::new(*p, *m)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cirquent::parse_cirquent;
    use crate::formula::parse_formula;
    use Player::{Bot as B, Top as T};

    fn atom(s: &str) -> Atom {
        Atom::new(s).unwrap()
    }

    fn interp_p(g: FiniteGame) -> Interpretation {
        Interpretation::new().with(atom("P"), make_finite_game(g))
    }

    #[test]
    fn finite_game_examples() {
        let g = finite_game(&[("()", B)]);
        assert_eq!(g.winner(&Run::empty()), B);
        // ⊤ made an illegal move, so ⊤ loses
        assert_eq!(g.winner(&run_of(&[(T, "m")])), B);
        assert_eq!(g.winner(&run_of(&[(B, "m")])), T);
    }

    #[test]
    fn finite_game_construction_errors() {
        let leaf = run_of(&[(T, "a"), (B, "b")]);
        let missing_parent = FiniteGame::from_labels([(Run::empty(), T), (leaf.clone(), B)]);
        assert_eq!(missing_parent, Err(GameError::NotPrefixClosed(run_of(&[(T, "a")]))));
        let tree: BTreeSet<Run> = [Run::empty(), run_of(&[(T, "a")])].into_iter().collect();
        let labels: BTreeMap<Run, Player> = [(Run::empty(), T)].into_iter().collect();
        assert_eq!(FiniteGame::new(tree, labels), Err(GameError::MissingLabel(run_of(&[(T, "a")]))));
        assert!(matches!(FiniteGame::from_labels([(leaf, B)]), Err(GameError::NotPrefixClosed(_))));
    }

    #[test]
    fn finite_game_text_round_trip() {
        let text = "finitegame\n() => T\nT a => B\nT a; B b => T\n";
        let g = FiniteGame::parse(text).unwrap();
        assert_eq!(g.positions(), 3);
        assert_eq!(FiniteGame::parse(&g.to_text()).unwrap(), g);
        assert!(FiniteGame::parse("finitegame\nT a => T\n").is_err());
        assert!(FiniteGame::parse("game\n() => T\n").is_err());
        assert!(matches!(FiniteGame::parse("finitegame\n() => X\n"), Err(GameError::Syntax { line: 2, .. })));
    }

    #[test]
    fn enumeration_game_examples() {
        let g = EnumerationGame::loses_on(run_of(&[(T, "5")]));
        assert_eq!(g.winner(&run_of(&[(T, "5")])), B);
        assert_eq!(g.winner(&run_of(&[(T, "6")])), T);
        assert!(!g.is_legal(&run_of(&[(B, "x")])));
        assert_eq!(g.winner(&run_of(&[(B, "x")])), T);
        assert!(!g.is_legal(&run_of(&[(B, "05")])));
    }

    #[test]
    fn negation_flips() {
        let g = finite_game(&[("()", T), ("T a", B)]);
        let i = interp_p(g.clone());
        let neg = interpret_formula(&parse_formula("~P").unwrap(), &i).unwrap();
        for r in [Run::empty(), run_of(&[(B, "a")])] {
            assert_eq!(neg.winner(&r) == T, g.winner(&negate_run(&r)) == B);
        }
        assert!(neg.is_legal(&run_of(&[(B, "a")])));
        assert!(!neg.is_legal(&run_of(&[(T, "a")])));
    }

    #[test]
    fn recurrence_untouched_copy_decides() {
        let i = interp_p(finite_game(&[("()", B), ("T a", T)]));
        let bang = interpret_formula(&parse_formula("!P").unwrap(), &i).unwrap();
        assert_eq!(bang.winner(&Run::empty()), B);
        assert_eq!(bang.winner(&run_of(&[(T, "1.a"), (T, "2.a")])), B);
        let quest = interpret_formula(&parse_formula("?P").unwrap(), &i).unwrap();
        assert_eq!(quest.winner(&Run::empty()), B);
        assert_eq!(quest.winner(&run_of(&[(T, "7.a")])), T);
        assert!(!quest.is_legal(&run_of(&[(T, "0.a")])));
        assert!(!quest.is_legal(&run_of(&[(T, "a")])));
    }

    #[test]
    fn excluded_middle_on_empty_run() {
        for label in [T, B] {
            let i = interp_p(finite_game(&[("()", label)]));
            let g = interpret_formula(&parse_formula("P \\/ ~P").unwrap(), &i).unwrap();
            assert_eq!(g.winner(&Run::empty()), T);
        }
    }

    #[test]
    fn thread_classes() {
        let used: BTreeSet<Bits> = ["", "0", "1", "00", "01", "10", "11", "000"]
            .iter()
            .map(|s| crate::runs::parse_bits(s).unwrap())
            .collect();
        let reps = thread_representatives(&used);
        // classes end at 000, 00 (via 001), 01, 10, 11
        assert_eq!(reps.len(), 5);
        assert_eq!(thread_representatives(&BTreeSet::new()).len(), 1);
        let single: BTreeSet<Bits> = [vec![true]].into_iter().collect();
        assert_eq!(thread_representatives(&single).len(), 2);
    }

    #[test]
    fn branching_recurrence() {
        let i = interp_p(finite_game(&[("()", T), ("B a", B)]));
        let g = interpret_formula(&parse_formula("b!P").unwrap(), &i).unwrap();
        assert_eq!(g.winner(&Run::empty()), T);
        assert_eq!(g.winner(&run_of(&[(B, "10.a")])), B);
        // two moves hitting the same thread 1... is illegal for ⊥
        assert!(!g.is_legal(&run_of(&[(B, "1.a"), (B, "10.a")])));
        assert!(g.is_legal(&run_of(&[(B, "0.a"), (B, "1.a")])));
        let c = interpret_formula(&parse_formula("b?P").unwrap(), &i).unwrap();
        assert_eq!(c.winner(&run_of(&[(B, "10.a")])), T);
        assert_eq!(c.winner(&run_of(&[(B, ".a")])), B);
    }

    #[test]
    fn cirquent_axiom_semantics() {
        let c = parse_cirquent("oformulas: ~P | P ; under: {1,2} ; over: {1,2}").unwrap();
        for label in [T, B] {
            let i = interp_p(finite_game(&[("()", label), ("T m", B), ("B m", T)]));
            let g = interpret_cirquent(&c, &i).unwrap();
            assert_eq!(g.winner(&Run::empty()), T);
            let copycat = run_of(&[(B, "1;1.m"), (T, "2;1.m")]);
            assert!(g.is_legal(&copycat));
            assert_eq!(g.winner(&copycat), T);
            assert!(!g.is_legal(&run_of(&[(B, "1;0.m")])));
            assert!(!g.is_legal(&run_of(&[(B, "3;1.m")])));
            assert!(!g.is_legal(&run_of(&[(B, "1;1,1.m")])));
        }
    }

    #[test]
    fn cirquent_zero_coordinates() {
        let c = parse_cirquent("oformulas: P | Q ; under: {1,2} ; over: {1}{2}").unwrap();
        let i = Interpretation::new()
            .with(atom("P"), Arc::new(EnumerationGame::always_top()))
            .with(atom("Q"), Arc::new(EnumerationGame::always_top()));
        let g = interpret_cirquent(&c, &i).unwrap();
        assert!(g.is_legal(&run_of(&[(B, "1;3,0.5"), (T, "2;0,1.7")])));
        assert!(!g.is_legal(&run_of(&[(B, "1;3,1.5")])));
        assert!(!g.is_legal(&run_of(&[(B, "2;0,0.5")])));
    }

    #[test]
    fn unmapped_atom() {
        let i = Interpretation::new();
        assert!(matches!(
            interpret_formula(&parse_formula("Q").unwrap(), &i),
            Err(GameError::UnmappedAtom(_))
        ));
    }

    #[test]
    fn interpretation_file() {
        let text = "# demo\natom P\nfinitegame\n() => T\nT a => B\natom Q\nenum:loses-on run=x.run\natom R\nenum:always-top\n";
        let load = |p: &str| if p == "x.run" { Ok("T 5\n".to_string()) } else { Err(format!("no {p}")) };
        let i = Interpretation::parse(text, &load).unwrap();
        assert_eq!(i.atoms().count(), 3);
        let q = i.get(&atom("Q")).unwrap();
        assert_eq!(q.winner(&run_of(&[(T, "5")])), B);
        assert!(Interpretation::parse("finitegame\n", &load).is_err());
        assert!(Interpretation::parse("atom P\nenum:loses-on run=y.run\n", &load).is_err());
    }
}
