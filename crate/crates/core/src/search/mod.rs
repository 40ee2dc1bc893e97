//! Game-tree search: reference minimax, alpha-beta, and principal variation
//! search with iterative deepening and a transposition table.
//!
//! All searches are negamax: values are from the side to move, and a child's
//! value is negated. Nodes whose analysis verdict is a proven win or loss are
//! leaves scored `±(WIN - distance)`, where distance counts plies from the
//! root, so quicker wins and slower losses score higher.

mod tt;

use std::time::{Duration, Instant};

use serde::Serialize;
use serde_json::{json, Value};

pub use tt::{Bound, TranspositionTable, TtEntry};

use crate::analysis::{analyze_board, Verdict};
use crate::board::{Board, Square};
use crate::error::{Error, Result};
use crate::eval_movegen::{is_mate, ranked_moves, static_value, ScoreTable, DEFAULT_BRANCH, MATE_BOUND, WIN};

/// Deepest iteration the driver attempts when only time or nodes bound it.
pub const MAX_DEPTH: u32 = 64;
/// Budget checks against the clock happen once per this many nodes.
const TIME_CHECK_INTERVAL: u64 = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_depth: Option<u32>,
    pub time_ms: Option<u64>,
    pub nodes: Option<u64>,
    pub branch: usize,
}

impl SearchLimits {
    pub fn depth(d: u32) -> SearchLimits {
        SearchLimits { max_depth: Some(d), time_ms: None, nodes: None, branch: DEFAULT_BRANCH }
    }

    pub fn with_branch(self, branch: usize) -> SearchLimits {
        SearchLimits { branch, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_depth.is_none() && self.time_ms.is_none() && self.nodes.is_none() {
            return Err(Error::Config("search needs a depth, time or node limit".into()));
        }
        if self.max_depth == Some(0) || self.time_ms == Some(0) || self.nodes == Some(0) {
            return Err(Error::Config("search limits must be positive".into()));
        }
        if self.branch == 0 {
            return Err(Error::Config("branch must be positive".into()));
        }
        Ok(())
    }
}

/// How the transposition table may answer a probe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TtMode {
    /// Probes only order moves.
    Off,
    /// Only exact values of the same remaining depth are reused, so root
    /// values equal plain alpha-beta.
    ExactOnly,
    /// Exact values and bounds of equal or greater depth cut the search.
    #[default]
    Full,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOptions {
    pub scores: ScoreTable,
    pub tt_mode: TtMode,
    /// Searches single forced replies without using up depth.
    pub extend_forced: bool,
}

impl Default for SearchOptions {
    fn default() -> SearchOptions {
        SearchOptions { scores: ScoreTable::default(), tt_mode: TtMode::Full, extend_forced: false }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub tt_hits: u64,
    pub depth_reached: u32,
    pub time_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    pub best_move: Square,
    pub value: i32,
    pub pv: Vec<Square>,
    pub stats: SearchStats,
}

impl SearchResult {
    pub fn to_json(&self, b: &Board) -> Value {
        let rc = |s: &Square| {
            let (r, c) = b.row_col(*s);
            json!({"row": r, "col": c})
        };
        json!({
            "best_move": rc(&self.best_move),
            "value": self.value,
            "mate": is_mate(self.value),
            "pv": self.pv.iter().map(rc).collect::<Vec<_>>(),
            "nodes": self.stats.nodes,
            "tt_hits": self.stats.tt_hits,
            "depth": self.stats.depth_reached,
            "time_ms": self.stats.time_ms,
        })
    }
}

/// Value with its principal variation.
type Line = (i32, Vec<Square>);

enum Expansion {
    Leaf(i32),
    Children(Vec<Square>, bool),
}

fn to_tt(v: i32, ply: u32) -> i32 {
    if v >= MATE_BOUND {
        v + ply as i32
    } else if v <= -MATE_BOUND {
        v - ply as i32
    } else {
        v
    }
}

fn from_tt(v: i32, ply: u32) -> i32 {
    if v >= MATE_BOUND {
        v - ply as i32
    } else if v <= -MATE_BOUND {
        v + ply as i32
    } else {
        v
    }
}

struct Searcher<'a> {
    scores: &'a ScoreTable,
    branch: usize,
    extend_forced: bool,
    tt: Option<&'a TranspositionTable>,
    tt_mode: TtMode,
    stats: SearchStats,
    node_limit: Option<u64>,
    deadline: Option<Instant>,
    aborted: bool,
}

impl<'a> Searcher<'a> {
    fn new(scores: &'a ScoreTable, branch: usize) -> Searcher<'a> {
        Searcher {
            scores,
            branch,
            extend_forced: false,
            tt: None,
            tt_mode: TtMode::Off,
            stats: SearchStats::default(),
            node_limit: None,
            deadline: None,
            aborted: false,
        }
    }

    fn out_of_budget(&mut self) -> bool {
        if self.aborted {
            return true;
        }
        if self.node_limit.is_some_and(|n| self.stats.nodes >= n) {
            self.aborted = true;
        } else if self.stats.nodes % TIME_CHECK_INTERVAL == 0 {
            if let Some(d) = self.deadline {
                self.aborted = Instant::now() >= d;
            }
        }
        self.aborted
    }

    /// Leaf value or ordered children. The flag marks a single forced reply.
    fn expand(&self, b: &mut Board, depth: u32, ply: u32) -> Expansion {
        if b.winner().is_some() {
            return Expansion::Leaf(-(WIN - ply as i32));
        }
        if b.is_full() {
            return Expansion::Leaf(0);
        }
        let report = analyze_board(b).expect("game in progress");
        if let Some(d) = report.plies_to_end() {
            let v = WIN - (ply + d) as i32;
            return Expansion::Leaf(if report.verdict == Verdict::LossCertain { -v } else { v });
        }
        if depth == 0 {
            return Expansion::Leaf(static_value(b, self.scores));
        }
        match report.verdict {
            Verdict::Forced(moves) => {
                let mut scored: Vec<(Square, i32)> = moves.iter().map(|&s| (s, self.scores.order_square(b, s))).collect();
                scored.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
                let single = scored.len() == 1;
                Expansion::Children(scored.into_iter().map(|m| m.0).collect(), single)
            }
            _ => Expansion::Children(ranked_moves(b, self.scores, self.branch).into_iter().map(|m| m.0).collect(), false),
        }
    }

    fn child_depth(&self, depth: u32, single: bool, ply: u32) -> u32 {
        if single && self.extend_forced && ply < MAX_DEPTH {
            depth
        } else {
            depth - 1
        }
    }

    fn play(b: &mut Board, s: Square) {
        let mv = crate::board::Move { square: s, color: b.to_move() };
        b.apply(mv);
    }

    fn minimax(&mut self, b: &mut Board, depth: u32, ply: u32) -> Line {
        self.stats.nodes += 1;
        let (moves, single) = match self.expand(b, depth, ply) {
            Expansion::Leaf(v) => return (v, Vec::new()),
            Expansion::Children(m, single) => (m, single),
        };
        let mut best: Option<Line> = None;
        for s in moves {
            Self::play(b, s);
            let (v, line) = self.minimax(b, self.child_depth(depth, single, ply), ply + 1);
            b.unmake_move().expect("move to undo");
            if best.as_ref().is_none_or(|bst| -v > bst.0) {
                best = Some((-v, std::iter::once(s).chain(line).collect()));
            }
        }
        best.expect("at least one child")
    }

    fn alphabeta(&mut self, b: &mut Board, depth: u32, ply: u32, mut alpha: i32, beta: i32) -> Line {
        self.stats.nodes += 1;
        let (moves, single) = match self.expand(b, depth, ply) {
            Expansion::Leaf(v) => return (v, Vec::new()),
            Expansion::Children(m, single) => (m, single),
        };
        let mut best: Option<Line> = None;
        for s in moves {
            Self::play(b, s);
            let (v, line) = self.alphabeta(b, self.child_depth(depth, single, ply), ply + 1, -beta, -alpha);
            b.unmake_move().expect("move to undo");
            if best.as_ref().is_none_or(|bst| -v > bst.0) {
                best = Some((-v, std::iter::once(s).chain(line).collect()));
            }
            alpha = alpha.max(-v);
            if alpha >= beta {
                break;
            }
        }
        best.expect("at least one child")
    }

    fn probe(&mut self, key: u64) -> Option<TtEntry> {
        let e = self.tt?.probe(key)?;
        self.stats.tt_hits += 1;
        Some(e)
    }

    fn tt_cut(&self, e: &TtEntry, depth: u32, ply: u32, alpha: i32, beta: i32) -> Option<i32> {
        let v = from_tt(e.value, ply);
        match self.tt_mode {
            TtMode::Off => None,
            TtMode::ExactOnly => (e.bound == Bound::Exact && e.depth as u32 == depth).then_some(v),
            TtMode::Full if e.depth as u32 >= depth => match e.bound {
                Bound::Exact => Some(v),
                Bound::Lower if v >= beta => Some(v),
                Bound::Upper if v <= alpha => Some(v),
                _ => None,
            },
            TtMode::Full => None,
        }
    }

    fn pvs(&mut self, b: &mut Board, depth: u32, ply: u32, mut alpha: i32, beta: i32) -> Line {
        self.stats.nodes += 1;
        if self.out_of_budget() {
            return (0, Vec::new());
        }
        let key = b.hash();
        let entry = self.probe(key);
        if ply > 0 {
            if let Some(v) = entry.as_ref().and_then(|e| self.tt_cut(e, depth, ply, alpha, beta)) {
                let pv = entry.and_then(|e| e.best_move).into_iter().collect();
                return (v, pv);
            }
        }
        let (mut moves, single) = match self.expand(b, depth, ply) {
            Expansion::Leaf(v) => return (v, Vec::new()),
            Expansion::Children(m, single) => (m, single),
        };
        if let Some(hint) = entry.and_then(|e| e.best_move) {
            if let Some(i) = moves.iter().position(|&s| s == hint) {
                moves[..=i].rotate_right(1);
            }
        }
        let alpha0 = alpha;
        let mut best: Option<Line> = None;
        for (i, s) in moves.into_iter().enumerate() {
            let d = self.child_depth(depth, single, ply);
            Self::play(b, s);
            let (mut v, mut line) = if i == 0 {
                self.pvs(b, d, ply + 1, -beta, -alpha)
            } else {
                self.pvs(b, d, ply + 1, -alpha - 1, -alpha)
            };
            if i > 0 && !self.aborted && -v > alpha && -v < beta {
                (v, line) = self.pvs(b, d, ply + 1, -beta, -alpha);
            }
            b.unmake_move().expect("move to undo");
            if self.aborted {
                return (0, Vec::new());
            }
            if best.as_ref().is_none_or(|bst| -v > bst.0) {
                best = Some((-v, std::iter::once(s).chain(line).collect()));
            }
            alpha = alpha.max(-v);
            if alpha >= beta {
                break;
            }
        }
        let (v, pv) = best.expect("at least one child");
        if let Some(tt) = self.tt {
            let bound = if v <= alpha0 {
                Bound::Upper
            } else if v >= beta {
                Bound::Lower
            } else {
                Bound::Exact
            };
            if self.tt_mode != TtMode::ExactOnly || bound == Bound::Exact {
                tt.store(TtEntry {
                    key,
                    depth: depth.min(255) as u8,
                    value: to_tt(v, ply),
                    bound,
                    best_move: pv.first().copied(),
                    age: 0,
                });
            }
        }
        (v, pv)
    }
}

fn playable(b: &Board) -> Result<Board> {
    if b.is_over() {
        return Err(Error::GameOver);
    }
    Ok(b.clone())
}

/// Result for a root whose analysis already decides the game, or whose
/// search produced a line.
fn finish(b: &Board, line: Line, stats: SearchStats, scores: &ScoreTable, branch: usize) -> SearchResult {
    let (value, mut pv) = line;
    if pv.is_empty() {
        // decided by analysis at the root: take its first move, else the best ranked one
        let report = analyze_board(b).expect("game in progress");
        let first = report
            .verdict
            .moves()
            .first()
            .copied()
            .or_else(|| ranked_moves(b, scores, branch).first().map(|m| m.0))
            .or_else(|| b.empty_squares().next())
            .expect("board has an empty square");
        pv.push(first);
    }
    SearchResult { best_move: pv[0], value, pv, stats }
}

fn check_depth(depth: u32) -> Result<()> {
    if depth == 0 {
        return Err(Error::Config("depth must be at least 1".into()));
    }
    Ok(())
}

/// Full-width negamax to `depth` plies over the generated moves.
pub fn minimax(b: &Board, depth: u32, scores: &ScoreTable, branch: usize) -> Result<SearchResult> {
    check_depth(depth)?;
    let mut work = playable(b)?;
    let started = Instant::now();
    let mut s = Searcher::new(scores, branch);
    let line = s.minimax(&mut work, depth, 0);
    s.stats.depth_reached = depth;
    s.stats.time_ms = started.elapsed().as_millis() as u64;
    Ok(finish(b, line, s.stats, scores, branch))
}

/// Alpha-beta with the window `(alpha, beta)`. Values inside the window are
/// exact; a value at or below `alpha` is an upper bound and one at or above
/// `beta` a lower bound.
pub fn alphabeta(b: &Board, depth: u32, alpha: i32, beta: i32, scores: &ScoreTable, branch: usize) -> Result<SearchResult> {
    check_depth(depth)?;
    let mut work = playable(b)?;
    let started = Instant::now();
    let mut s = Searcher::new(scores, branch);
    let line = s.alphabeta(&mut work, depth, 0, alpha, beta);
    s.stats.depth_reached = depth;
    s.stats.time_ms = started.elapsed().as_millis() as u64;
    Ok(finish(b, line, s.stats, scores, branch))
}

/// Full window for alpha-beta.
pub const FULL_WINDOW: (i32, i32) = (-WIN - 1, WIN + 1);

/// Principal variation search with iterative deepening from depth 1. On
/// budget expiry the deepest completed iteration is returned; if none
/// completed the budget is reported as exhausted.
pub fn pvs_iterative(b: &Board, limits: &SearchLimits, tt: &TranspositionTable, opts: &SearchOptions) -> Result<SearchResult> {
    limits.validate()?;
    let mut work = playable(b)?;
    let started = Instant::now();
    let mut s = Searcher::new(&opts.scores, limits.branch);
    s.tt = Some(tt);
    s.tt_mode = opts.tt_mode;
    s.extend_forced = opts.extend_forced;
    s.node_limit = limits.nodes;
    s.deadline = limits.time_ms.map(|ms| started + Duration::from_millis(ms));
    tt.new_search();
    let max_depth = limits.max_depth.unwrap_or(MAX_DEPTH).min(MAX_DEPTH);
    let mut done: Option<(Line, u32)> = None;
    for depth in 1..=max_depth {
        let line = s.pvs(&mut work, depth, 0, FULL_WINDOW.0, FULL_WINDOW.1);
        if s.aborted {
            break;
        }
        let decided = line.1.is_empty() || is_mate(line.0) && (WIN - line.0.abs()) as u32 <= depth;
        done = Some((line, depth));
        if decided {
            break;
        }
    }
    let Some((line, depth)) = done else { return Err(Error::BudgetExhausted) };
    s.stats.depth_reached = depth;
    s.stats.time_ms = started.elapsed().as_millis() as u64;
    Ok(finish(b, line, s.stats, &opts.scores, limits.branch))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn board(text: &str) -> Board {
        Board::from_dump(text).unwrap()
    }

    #[test]
    fn own_five_square_is_found_at_depth_one() {
        let b = board("9x9 black\n.........\n.XXXX....\n.........\n..OOO....\n.........\n...O.....\n.........\n.........\n.........\n");
        let scores = ScoreTable::default();
        let r = minimax(&b, 1, &scores, 40).unwrap();
        assert_eq!(r.value, WIN - 1);
        assert!([b.square(1, 0), b.square(1, 5)].contains(&r.best_move));
    }

    #[test]
    fn opponent_open_three_is_blocked() {
        let b = board("11x11 white\n...........\n...........\n...........\n...........\n...XXX.....\n...........\n...........\n...........\n........O..\n........O..\n...........\n");
        let scores = ScoreTable::default();
        let r = minimax(&b, 2, &scores, 8).unwrap();
        assert!([b.square(4, 2), b.square(4, 6)].contains(&r.best_move), "{:?}", b.row_col(r.best_move));
    }

    #[test]
    fn zero_limits_are_rejected() {
        let b = Board::standard();
        let tt = TranspositionTable::new(1024).unwrap();
        let none = SearchLimits { max_depth: None, time_ms: None, nodes: None, branch: 40 };
        assert!(matches!(pvs_iterative(&b, &none, &tt, &SearchOptions::default()), Err(Error::Config(_))));
        assert!(matches!(minimax(&b, 0, &ScoreTable::default(), 40), Err(Error::Config(_))));
    }

    #[test]
    fn tiny_node_budget_is_exhausted() {
        let mut b = Board::standard();
        b.play(b.center()).unwrap();
        let tt = TranspositionTable::new(1024).unwrap();
        let limits = SearchLimits { max_depth: Some(4), time_ms: None, nodes: Some(3), branch: 40 };
        assert_eq!(pvs_iterative(&b, &limits, &tt, &SearchOptions::default()), Err(Error::BudgetExhausted));
    }

    #[test]
    fn mate_values_round_trip_through_the_table() {
        for (v, ply) in [(WIN - 7, 3), (-(WIN - 9), 4), (123, 5)] {
            assert_eq!(from_tt(to_tt(v, ply), ply), v);
        }
    }
}
