//! The `cl15` command line: proof checking, strategy extraction, simulation,
//! run projection, the separation demo and interactive play.

use std::ffi::OsString;
use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use cl15_core::calculus::{parse_proof, verify_proof, Proof, ProofParseError};
use cl15_core::games::{GameError, GameRef, Interpretation};
use cl15_core::harness::adversary::{loop_counterstrategy, structural_script, RandomLegalEnv};
use cl15_core::harness::random::{self, Arena};
use cl15_core::harness::{
    arena_game, proof_arena, random_finite_interpretation, run_trial, separation_demo, HarnessError, RotatingCopycat,
};
use cl15_core::runs::{parse_run, project_branch, project_cell, project_prefix, InfiniteBitstring, Labmove, Move, Run, RunError};
use cl15_core::strategy::{
    extract_solution, simulate, Action, EnvStrategy, ExtractError, Granter, MachineStrategy, ScriptedEnv, SilentEnv,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

const MANIFEST_HEADER: &str = "cl15-strategy";

#[derive(Parser, Debug)]
#[command(name = "cl15", version, about = "Check cirquent proofs and play the strategies extracted from them")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Verify a proof file
    Check { proof: PathBuf },
    /// Verify a proof and write a strategy manifest for it
    Extract {
        proof: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Play the proved formula instead of its clubsuit cirquent
        #[arg(long)]
        formula_level: bool,
    },
    /// Play an extracted strategy against an adversary
    Simulate {
        /// A proof file or a manifest written by `extract`
        strategy: PathBuf,
        #[command(flatten)]
        game: GameArgs,
        /// silent | random | script:<run file> | loop:<k>
        #[arg(long, default_value = "random")]
        adversary: String,
        #[arg(long, default_value_t = 200)]
        budget: usize,
        /// Print the step-by-step trace
        #[arg(long)]
        trace: bool,
    },
    /// Project a run file onto a component
    Project {
        run: PathBuf,
        /// Keep moves starting with this prefix, e.g. `1.`
        #[arg(long, conflicts_with_all = ["branch", "cell"])]
        prefix: Option<String>,
        /// Keep moves `w.β` with `w` a prefix of the bitstring `stem:tail`
        #[arg(long, conflicts_with = "cell")]
        branch: Option<String>,
        /// Keep moves of oformula CELL matching --coords
        #[arg(long, requires = "coords")]
        cell: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        coords: Option<Vec<u64>>,
    },
    /// Bounded demonstration that !P -> b!P defeats a given machine
    DemoSeparation {
        /// granter | rotating:<r>
        #[arg(long, default_value = "granter")]
        machine: String,
        #[arg(long, default_value_t = 8)]
        k: usize,
        #[arg(long, default_value_t = 100)]
        budget: usize,
    },
    /// Play as the environment against an extracted strategy
    Play {
        proof: PathBuf,
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, default_value_t = 50)]
        budget: usize,
        #[arg(long)]
        formula_level: bool,
        /// Save the final position in run format
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct GameArgs {
    /// Interpretation file; without it a random finite one is drawn
    #[arg(long)]
    interp: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Proof { path: PathBuf, source: ProofParseError },
    #[error("{path}: {source}")]
    Run { path: PathBuf, source: RunError },
    #[error("{path}: {source}")]
    Interp { path: PathBuf, source: GameError },
    #[error("{path}: {msg}")]
    Manifest { path: PathBuf, msg: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error(transparent)]
    Harness(#[from] HarnessError),
    #[error("output: {0}")]
    Output(#[from] std::io::Error),
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn load_proof(path: &Path) -> Result<Proof, CliError> {
    parse_proof(&read(path)?).map_err(|source| CliError::Proof { path: path.to_path_buf(), source })
}

fn load_run(path: &Path) -> Result<Run, CliError> {
    parse_run(&read(path)?).map_err(|source| CliError::Run { path: path.to_path_buf(), source })
}

fn load_interpretation(path: &Path) -> Result<Interpretation, CliError> {
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let load = |p: &str| fs::read_to_string(dir.join(p)).map_err(|e| format!("{p}: {e}"));
    Interpretation::parse(&read(path)?, &load).map_err(|source| CliError::Interp { path: path.to_path_buf(), source })
}

/// A strategy reference: a proof file, or a manifest naming one.
struct StrategyRef {
    proof: Proof,
    formula_level: bool,
}

fn manifest_text(proof_path: &Path, proof: &Proof, formula_level: bool, machine: &str) -> String {
    format!(
        "{MANIFEST_HEADER}\nproof: {}\nlevel: {}\nsteps: {}\nmachine: {machine}\n",
        proof_path.display(),
        if formula_level { "formula" } else { "cirquent" },
        proof.len()
    )
}

fn load_strategy(path: &Path) -> Result<StrategyRef, CliError> {
    let text = read(path)?;
    if text.lines().next().map(str::trim) != Some(MANIFEST_HEADER) {
        return Ok(StrategyRef { proof: load_proof(path)?, formula_level: false });
    }
    let bad = |msg: &str| CliError::Manifest { path: path.to_path_buf(), msg: msg.to_string() };
    let field = |key: &str| {
        text.lines()
            .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(':')).map(str::trim))
            .ok_or_else(|| bad(&format!("missing `{key}`")))
    };
    let proof_path = PathBuf::from(field("proof")?);
    let proof_path = if proof_path.is_relative() && !proof_path.exists() {
        path.parent().unwrap_or(Path::new(".")).join(proof_path)
    } else {
        proof_path
    };
    let formula_level = match field("level")? {
        "formula" => true,
        "cirquent" => false,
        other => return Err(bad(&format!("unknown level `{other}`"))),
    };
    Ok(StrategyRef { proof: load_proof(&proof_path)?, formula_level })
}

fn interpretation(game: &GameArgs, arena: &Arena) -> Result<Interpretation, CliError> {
    match &game.interp {
        Some(path) => load_interpretation(path),
        None => Ok(random_finite_interpretation(&arena.atoms(), 3, 3, game.seed)),
    }
}

fn adversary(
    spec: &str,
    arena: &Arena,
    game: &GameRef,
    interp: &Interpretation,
    seed: u64,
) -> Result<Box<dyn EnvStrategy>, CliError> {
    let alphabets = random::alphabets(interp);
    match spec.split_once(':') {
        None if spec == "silent" => Ok(Box::new(SilentEnv)),
        None if spec == "random" => Ok(Box::new(RandomLegalEnv::new(arena.clone(), game.clone(), alphabets, seed, 8))),
        None if spec == "structural" => Ok(Box::new(structural_script(arena, game.clone(), &alphabets, seed, 8))),
        Some(("script", path)) => {
            let run = load_run(Path::new(path))?;
            Ok(Box::new(ScriptedEnv::new(run.iter().map(|lm| lm.mv.clone()))))
        }
        Some(("loop", k)) => {
            let k = k.parse().map_err(|_| CliError::Usage(format!("bad iteration count `{k}`")))?;
            Ok(Box::new(loop_counterstrategy(k)))
        }
        _ => Err(CliError::Usage(format!("unknown adversary `{spec}`"))),
    }
}

fn machine(spec: &str) -> Result<Box<dyn MachineStrategy>, CliError> {
    match spec.split_once(':') {
        None if spec == "granter" => Ok(Box::new(Granter)),
        Some(("rotating", r)) => {
            let r = r.parse().map_err(|_| CliError::Usage(format!("bad rotation `{r}`")))?;
            Ok(Box::new(RotatingCopycat::new(r)))
        }
        _ => Err(CliError::Usage(format!("unknown machine `{spec}`"))),
    }
}

fn positive(name: &str, v: usize) -> Result<usize, CliError> {
    if v == 0 {
        return Err(CliError::Usage(format!("--{name} must be positive")));
    }
    Ok(v)
}

/// Parses `args` and runs the command, reading interactive input from
/// `input`. Returns the process exit code.
pub fn run<I, T>(args: I, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match dispatch(cli.command, input, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(command: Command, input: &mut dyn BufRead, out: &mut dyn Write) -> Result<u8, CliError> {
    match command {
        Command::Check { proof } => {
            let p = load_proof(&proof)?;
            Ok(match verify_proof(&p) {
                Ok(()) => {
                    writeln!(out, "ok ({} steps)", p.len())?;
                    EXIT_OK
                }
                Err(e) => {
                    writeln!(out, "{e}")?;
                    EXIT_FAIL
                }
            })
        }
        Command::Extract { proof, out: target, formula_level } => {
            let p = load_proof(&proof)?;
            if let Err(e) = verify_proof(&p) {
                writeln!(out, "{e}")?;
                return Ok(EXIT_FAIL);
            }
            let m = extract_solution(&p, formula_level)?;
            let text = manifest_text(&proof, &p, formula_level, &m.name());
            fs::write(&target, &text).map_err(|source| CliError::Io { path: target.clone(), source })?;
            writeln!(out, "wrote {}", target.display())?;
            Ok(EXIT_OK)
        }
        Command::Simulate { strategy, game, adversary: spec, budget, trace } => {
            let budget = positive("budget", budget)?;
            let s = load_strategy(&strategy)?;
            let mut m = extract_solution(&s.proof, s.formula_level)?;
            let arena = proof_arena(&s.proof, s.formula_level)?;
            let interp = interpretation(&game, &arena)?;
            let g = arena_game(&arena, &interp).map_err(HarnessError::from)?;
            let mut env = adversary(&spec, &arena, &g, &interp, game.seed)?;
            writeln!(out, "game: {}", g.describe())?;
            writeln!(out, "interpretation: {}", interp.describe())?;
            if trace {
                let outcome = simulate(m.as_mut(), env.as_mut(), g.as_ref(), budget).map_err(HarnessError::from)?;
                write!(out, "{}", outcome.trace_text())?;
                return Ok(if outcome.winner == cl15_core::runs::Player::Top { EXIT_OK } else { EXIT_FAIL });
            }
            let report = run_trial(1, game.seed, m.as_mut(), &g, env.as_mut(), budget).map_err(HarnessError::from)?;
            writeln!(out, "adversary: {}", report.adversary)?;
            writeln!(out, "run: {}", report.run)?;
            writeln!(out, "grants: {}", report.grants)?;
            writeln!(out, "{report}")?;
            Ok(if report.pass { EXIT_OK } else { EXIT_FAIL })
        }
        Command::Project { run, prefix, branch, cell, coords } => {
            let r = load_run(&run)?;
            let projected = match (prefix, branch, cell) {
                (Some(p), None, None) => project_prefix(&r, &p),
                (None, Some(b), None) => {
                    let x = InfiniteBitstring::parse(&b).map_err(|e| CliError::Usage(e.to_string()))?;
                    project_branch(&r, &x)
                }
                (None, None, Some(a)) => {
                    let xs = coords.unwrap_or_default();
                    project_cell(&r, a, &xs).map_err(|source| CliError::Run { path: run.clone(), source })?
                }
                _ => return Err(CliError::Usage("give exactly one of --prefix, --branch, --cell".into())),
            };
            write!(out, "{}", projected.to_text())?;
            Ok(EXIT_OK)
        }
        Command::DemoSeparation { machine: spec, k, budget } => {
            let k = positive("k", k)?;
            let budget = positive("budget", budget)?;
            let mut m = machine(&spec)?;
            let report = separation_demo(m.as_mut(), k, budget).map_err(HarnessError::from)?;
            writeln!(out, "machine: {}", m.name())?;
            writeln!(out, "{report}")?;
            Ok(if report.conclusive() { EXIT_OK } else { EXIT_FAIL })
        }
        Command::Play { proof, game, budget, formula_level, transcript } => {
            let budget = positive("budget", budget)?;
            let p = load_proof(&proof)?;
            let mut m = extract_solution(&p, formula_level)?;
            let arena = proof_arena(&p, formula_level)?;
            let interp = interpretation(&game, &arena)?;
            let g = arena_game(&arena, &interp).map_err(HarnessError::from)?;
            let run = play_session(m.as_mut(), &g, budget, input, out)?;
            if let Some(path) = transcript {
                fs::write(&path, run.to_text()).map_err(|source| CliError::Io { path: path.clone(), source })?;
                writeln!(out, "transcript saved to {}", path.display())?;
            }
            Ok(if g.winner(&run) == cl15_core::runs::Player::Top { EXIT_OK } else { EXIT_FAIL })
        }
    }
}

enum Reply {
    Move(Move),
    Pass,
    Quit,
}

fn prompt(input: &mut dyn BufRead, out: &mut dyn Write) -> Result<Reply, CliError> {
    loop {
        write!(out, "your move (a move, `pass` or `quit`)> ")?;
        out.flush()?;
        let mut line = String::new();
        if input.read_line(&mut line)? == 0 {
            writeln!(out)?;
            return Ok(Reply::Quit);
        }
        match line.trim() {
            "quit" => return Ok(Reply::Quit),
            "pass" => return Ok(Reply::Pass),
            s if s.is_empty() || s.chars().any(char::is_whitespace) => {
                writeln!(out, "malformed input, a move is a single word")?;
            }
            s => return Ok(Reply::Move(Move::new(s))),
        }
    }
}

/// The interactive loop: the human answers each grant of the machine.
/// Illegal moves are recorded with a warning.
pub fn play_session(
    m: &mut dyn MachineStrategy,
    g: &GameRef,
    budget: usize,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
) -> Result<Run, CliError> {
    writeln!(out, "game: {}", g.describe())?;
    let mut run = Run::empty();
    'steps: for step in 1..=budget {
        match m.next(&run, step) {
            Action::MakeMove(mv) => {
                writeln!(out, "{step} M:{mv}")?;
                run.push(Labmove::top(mv));
            }
            Action::GrantPermission => match prompt(input, out)? {
                Reply::Move(mv) => {
                    writeln!(out, "{step} E:{mv}")?;
                    run.push(Labmove::bot(mv));
                    if !g.is_legal(&run) {
                        writeln!(out, "warning: the position is now illegal")?;
                    }
                }
                Reply::Pass => continue,
                Reply::Quit => break 'steps,
            },
            Action::Idle => continue,
        }
        writeln!(out, "position: {run}")?;
    }
    writeln!(out, "final position: {run}")?;
    writeln!(out, "winner: {}", g.winner(&run))?;
    Ok(run)
}
