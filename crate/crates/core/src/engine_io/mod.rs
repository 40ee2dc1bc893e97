//! Engine configuration, move choice, and the two front ends: the Gomocup
//! text protocol and the JSON/HTTP bridge.

pub mod http;
pub mod protocol;

use std::path::{Path, PathBuf};

use log::warn;

use crate::analysis::analyze_board;
use crate::board::{Board, Square, MAX_DIM};
use crate::endgame::{bmm_solve, tss_solve, SolveResult, TernaryVerdict, ThreatSet};
use crate::error::{Error, Result};
use crate::eval_movegen::{ranked_moves, ScoreTable};
use crate::search::{pvs_iterative, SearchLimits, SearchOptions, SearchResult, TranspositionTable, TtMode};

pub const DEFAULT_CONFIG: &str = include_str!("../../config/engine.conf");
pub const ENGINE_NAME: &str = "gomoku-engine";
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Solver {
    Off,
    Bmm,
    Tss,
}

impl Solver {
    pub fn from_name(s: &str) -> Option<Solver> {
        match s {
            "off" => Some(Solver::Off),
            "bmm" => Some(Solver::Bmm),
            "tss" => Some(Solver::Tss),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Solver::Off => "off",
            Solver::Bmm => "bmm",
            Solver::Tss => "tss",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EngineConfig {
    pub rows: usize,
    pub cols: usize,
    pub branch: usize,
    pub tt_entries: usize,
    /// Per-move limits; at least one must be set.
    pub time_ms: Option<u64>,
    pub depth: Option<u32>,
    pub nodes: Option<u64>,
    /// Endgame solver tried at the root before the search.
    pub solver: Solver,
    pub solver_threes: bool,
    pub extend_forced: bool,
    pub coarse: bool,
    /// Score file laid over the built-in table.
    pub scores: Option<PathBuf>,
}

impl Default for EngineConfig {
    fn default() -> EngineConfig {
        let mut c = EngineConfig {
            rows: 15,
            cols: 15,
            branch: 40,
            tt_entries: 1 << 18,
            time_ms: None,
            depth: None,
            nodes: None,
            solver: Solver::Off,
            solver_threes: false,
            extend_forced: false,
            coarse: false,
            scores: None,
        };
        c.apply(DEFAULT_CONFIG, None).expect("committed engine config is valid");
        c
    }
}

fn bad(key: &str, value: &str) -> Error {
    Error::Config(format!("{key}: bad value {value:?}"))
}

fn parse_limit<T: std::str::FromStr>(key: &str, value: &str) -> Result<Option<T>> {
    if value == "none" {
        return Ok(None);
    }
    value.parse().map(Some).map_err(|_| bad(key, value))
}

impl EngineConfig {
    /// Defaults with the `key = value` lines of `text` applied. Relative
    /// score paths resolve against `base`.
    pub fn parse(text: &str, base: Option<&Path>) -> Result<EngineConfig> {
        let mut c = EngineConfig::default();
        c.apply(text, base)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<EngineConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        EngineConfig::parse(&text, path.parent())
    }

    fn apply(&mut self, text: &str, base: Option<&Path>) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
            self.set(key.trim(), value.trim(), base)?;
        }
        Ok(())
    }

    /// Sets one key from its text form.
    pub fn set(&mut self, key: &str, value: &str, base: Option<&Path>) -> Result<()> {
        let flag = |v: &str| v.parse::<bool>().map_err(|_| bad(key, v));
        let num = |v: &str| v.parse::<usize>().map_err(|_| bad(key, v));
        match key {
            "rows" => self.rows = num(value)?,
            "cols" => self.cols = num(value)?,
            "branch" => self.branch = num(value)?,
            "tt_entries" => self.tt_entries = num(value)?,
            "time_ms" => self.time_ms = parse_limit(key, value)?,
            "depth" => self.depth = parse_limit(key, value)?,
            "nodes" => self.nodes = parse_limit(key, value)?,
            "solver" => self.solver = Solver::from_name(value).ok_or_else(|| bad(key, value))?,
            "solver_threes" => self.solver_threes = flag(value)?,
            "extend_forced" => self.extend_forced = flag(value)?,
            "coarse" => self.coarse = flag(value)?,
            "scores" => {
                let p = PathBuf::from(value);
                self.scores = Some(match base {
                    Some(b) if p.is_relative() => b.join(p),
                    _ => p,
                });
            }
            _ => return Err(Error::Config(format!("unknown key {key}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        for (key, v) in [("rows", self.rows), ("cols", self.cols)] {
            if !(5..=MAX_DIM).contains(&v) {
                return Err(Error::Config(format!("{key}: must be between 5 and {MAX_DIM}, got {v}")));
            }
        }
        if self.branch == 0 {
            return Err(Error::Config("branch: must be positive".into()));
        }
        if !self.tt_entries.is_power_of_two() {
            return Err(Error::Config(format!("tt_entries: must be a power of two, got {}", self.tt_entries)));
        }
        if self.time_ms.is_none() && self.depth.is_none() && self.nodes.is_none() {
            return Err(Error::Config("time_ms: one of time_ms, depth or nodes must be set".into()));
        }
        for (key, zero) in [
            ("time_ms", self.time_ms == Some(0)),
            ("depth", self.depth == Some(0)),
            ("nodes", self.nodes == Some(0)),
        ] {
            if zero {
                return Err(Error::Config(format!("{key}: must be positive")));
            }
        }
        Ok(())
    }

    pub fn limits(&self) -> SearchLimits {
        SearchLimits { max_depth: self.depth, time_ms: self.time_ms, nodes: self.nodes, branch: self.branch }
    }

    pub fn score_table(&self) -> Result<ScoreTable> {
        let mut t = match &self.scores {
            Some(p) => ScoreTable::load(p).map_err(|e| Error::Config(format!("scores: {e}")))?,
            None => ScoreTable::default(),
        };
        t.coarse |= self.coarse;
        Ok(t)
    }

    pub fn threat_set(&self) -> ThreatSet {
        if self.solver_threes { ThreatSet::FOURS_AND_THREES } else { ThreatSet::FOURS }
    }
}

/// What the engine did to pick a move.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decision {
    pub square: Square,
    pub search: Option<SearchResult>,
    pub solve: Option<SolveResult>,
}

/// A configured player: score table and a transposition table kept across
/// the moves of one game.
#[derive(Debug)]
pub struct Engine {
    config: EngineConfig,
    options: SearchOptions,
    tt: TranspositionTable,
}

impl Engine {
    pub fn new(config: EngineConfig) -> Result<Engine> {
        config.validate()?;
        let options = SearchOptions { scores: config.score_table()?, tt_mode: TtMode::Full, extend_forced: config.extend_forced };
        let tt = TranspositionTable::new(config.tt_entries)?;
        Ok(Engine { config, options, tt })
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn scores(&self) -> &ScoreTable {
        &self.options.scores
    }

    pub fn set_time_ms(&mut self, ms: Option<u64>) {
        self.config.time_ms = ms;
    }

    /// Forgets everything learned in earlier games.
    pub fn new_game(&self) {
        self.tt.clear();
    }

    pub fn solve(&self, b: &Board, solver: Solver, ts: ThreatSet) -> Result<SolveResult> {
        match solver {
            Solver::Tss => tss_solve(b, ts, &self.config.limits_for_solver()),
            _ => bmm_solve(b, ts, &self.config.limits_for_solver()),
        }
    }

    /// Picks a move for the side to move.
    pub fn choose(&self, b: &Board) -> Result<Decision> {
        if b.is_over() {
            return Err(Error::GameOver);
        }
        if b.stone_count() == 0 {
            return Ok(Decision { square: b.center(), search: None, solve: None });
        }
        let mut solve = None;
        if self.config.solver != Solver::Off {
            let r = self.solve(b, self.config.solver, self.config.threat_set())?;
            if let TernaryVerdict::Victory(line) = &r.verdict {
                let square = line[0];
                return Ok(Decision { square, search: None, solve: Some(r) });
            }
            solve = Some(r);
        }
        match pvs_iterative(b, &self.config.limits(), &self.tt, &self.options) {
            Ok(r) => Ok(Decision { square: r.best_move, search: Some(r), solve }),
            Err(Error::BudgetExhausted) => {
                warn!("no search iteration finished in budget, playing the first ordered move");
                Ok(Decision { square: self.fallback(b)?, search: None, solve })
            }
            Err(e) => Err(e),
        }
    }

    fn fallback(&self, b: &Board) -> Result<Square> {
        let report = analyze_board(b)?;
        report
            .verdict
            .moves()
            .first()
            .copied()
            .or_else(|| ranked_moves(b, &self.options.scores, self.config.branch).first().map(|m| m.0))
            .or_else(|| b.empty_squares().next())
            .ok_or(Error::GameOver)
    }
}

impl EngineConfig {
    /// Solvers get the search limits, or a 24-ply cap when only time or
    /// nodes bound the search.
    fn limits_for_solver(&self) -> SearchLimits {
        let mut l = self.limits();
        if l.max_depth.is_none() {
            l.max_depth = Some(24);
        }
        l
    }
}
