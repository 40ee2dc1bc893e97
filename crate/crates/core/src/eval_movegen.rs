//! Leaf evaluation and candidate move generation from potential-line scores.

use std::fmt::Write as _;
use std::path::Path;

use crate::analysis::{analyze_board, VerdictKind};
use crate::board::{Board, Color, Square, MAX_DIM};
use crate::error::{Error, Result};
use crate::lines::{CrossKind, LineClass};

/// Value of a side that has already won. A win `p` plies away scores
/// `WIN - p`, a loss `-(WIN - p)`.
pub const WIN: i32 = 1_000_000_000;
/// Any value at or beyond this magnitude is a proven win or loss.
pub const MATE_BOUND: i32 = WIN - 10_000;
pub const DEFAULT_BRANCH: usize = 40;

pub const DEFAULT_SCORES: &str = include_str!("../config/scores.conf");

pub fn is_mate(v: i32) -> bool {
    v.abs() >= MATE_BOUND
}

/// Per-class scores for evaluation and for move ordering.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScoreTable {
    pub eval: [i32; 10],
    pub order: [i32; 10],
    /// Indexed by `CrossKind` (None, C33, C43, C44).
    pub cross_eval: [i32; 4],
    pub cross_order: [i32; 4],
    /// Scores D3 as W3 and double twos as weak twos.
    pub coarse: bool,
}

impl Default for ScoreTable {
    fn default() -> ScoreTable {
        ScoreTable::parse(DEFAULT_SCORES).expect("committed score table is valid")
    }
}

impl ScoreTable {
    /// Parses a complete table of `key = value` lines; `#` starts a comment.
    /// Keys are `eval.<class>` or `order.<class>` with a line class or cross
    /// name, and `coarse`. Unlisted scores are 0.
    pub fn parse(text: &str) -> Result<ScoreTable> {
        let mut t = ScoreTable { eval: [0; 10], order: [0; 10], cross_eval: [0; 4], cross_order: [0; 4], coarse: false };
        t.apply(text)?;
        t.validate()?;
        Ok(t)
    }

    /// The default table with the listed keys replaced.
    pub fn with_overrides(text: &str) -> Result<ScoreTable> {
        let mut t = ScoreTable::default();
        t.apply(text)?;
        t.validate()?;
        Ok(t)
    }

    fn apply(&mut self, text: &str) -> Result<()> {
        let t = self;
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if key == "coarse" {
                t.coarse = value
                    .parse()
                    .map_err(|_| Error::Config(format!("coarse: bad boolean {value:?}")))?;
                continue;
            }
            let v: i32 = value.parse().map_err(|_| Error::Config(format!("{key}: bad integer {value:?}")))?;
            let (kind, name) = key.split_once('.').ok_or_else(|| Error::Config(format!("unknown key {key}")))?;
            let (lines, cross) = match kind {
                "eval" => (&mut t.eval, &mut t.cross_eval),
                "order" => (&mut t.order, &mut t.cross_order),
                _ => return Err(Error::Config(format!("unknown key {key}"))),
            };
            if let Some(c) = LineClass::from_name(name) {
                lines[c as usize] = v;
            } else if let Some(c) = CrossKind::from_name(name).filter(|&c| c != CrossKind::None) {
                cross[c as usize] = v;
            } else {
                return Err(Error::Config(format!("unknown key {key}")));
            }
        }
        Ok(())
    }

    /// Reads a score file over the defaults.
    pub fn load(path: &Path) -> Result<ScoreTable> {
        ScoreTable::with_overrides(&std::fs::read_to_string(path)?)
    }

    /// Generic scores 0, scores rise strictly with class strength, and no
    /// heuristic sum can reach the proven-result band.
    pub fn validate(&self) -> Result<()> {
        for (kind, lines, cross) in [("eval", &self.eval, &self.cross_eval), ("order", &self.order, &self.cross_order)] {
            if lines[0] != 0 {
                return Err(Error::Config(format!("{kind}.Generic must be 0")));
            }
            for w in LineClass::ALL.windows(2) {
                if lines[w[1] as usize] <= lines[w[0] as usize] {
                    return Err(Error::Config(format!(
                        "{kind}.{} must exceed {kind}.{}",
                        w[1].name(),
                        w[0].name()
                    )));
                }
            }
            if !(0 < cross[1] && cross[1] < cross[2] && cross[2] < cross[3]) {
                return Err(Error::Config(format!("{kind} cross scores must satisfy 0 < C33 < C43 < C44")));
            }
            let per_square = 4 * lines[LineClass::S5 as usize] as i64 + cross[3] as i64;
            if per_square * (2 * MAX_DIM * MAX_DIM) as i64 >= MATE_BOUND as i64 {
                return Err(Error::Config(format!("{kind} scores are too large")));
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (kind, lines, cross) in [("eval", &self.eval, &self.cross_eval), ("order", &self.order, &self.cross_order)] {
            for c in LineClass::ALL {
                let _ = writeln!(out, "{kind}.{} = {}", c.name(), lines[c as usize]);
            }
            for c in &CrossKind::ALL[1..] {
                let _ = writeln!(out, "{kind}.{} = {}", c.name(), cross[*c as usize]);
            }
        }
        let _ = writeln!(out, "coarse = {}", self.coarse);
        out
    }

    /// Every score multiplied by `k`.
    pub fn scaled(&self, k: i32) -> ScoreTable {
        ScoreTable {
            eval: self.eval.map(|v| v * k),
            order: self.order.map(|v| v * k),
            cross_eval: self.cross_eval.map(|v| v * k),
            cross_order: self.cross_order.map(|v| v * k),
            coarse: self.coarse,
        }
    }

    fn class_index(&self, c: LineClass) -> usize {
        if self.coarse { c.coarse() as usize } else { c as usize }
    }

    fn square_score(&self, b: &Board, s: Square, c: Color, lines: &[i32; 10], cross: &[i32; 4]) -> i32 {
        let mut v = cross[b.cross(s, c).kind as usize];
        for d in 0..4 {
            v += lines[self.class_index(b.line_class(s, c, d))];
        }
        v
    }

    /// Evaluation score of color `c` at empty square `s`.
    pub fn eval_square(&self, b: &Board, s: Square, c: Color) -> i32 {
        self.square_score(b, s, c, &self.eval, &self.cross_eval)
    }

    /// Ordering score of square `s`: both colors count.
    pub fn order_square(&self, b: &Board, s: Square) -> i32 {
        self.square_score(b, s, Color::Black, &self.order, &self.cross_order)
            + self.square_score(b, s, Color::White, &self.order, &self.cross_order)
    }
}

/// Static value for the side to move.
pub fn evaluate(b: &Board, t: &ScoreTable) -> Result<i32> {
    if b.is_over() {
        return Err(Error::GameOver);
    }
    Ok(static_value(b, t))
}

pub(crate) fn static_value(b: &Board, t: &ScoreTable) -> i32 {
    let x = b.to_move();
    b.candidates().map(|s| t.eval_square(b, s, x) - t.eval_square(b, s, x.opp())).sum()
}

/// Candidate squares with their ordering scores, best first, ties by square
/// index. Keeps the best `branch`, plus any further square where either
/// color would make a four or better.
pub(crate) fn ranked_moves(b: &Board, t: &ScoreTable, branch: usize) -> Vec<(Square, i32)> {
    let mut moves: Vec<(Square, i32)> = b.candidates().map(|s| (s, t.order_square(b, s))).collect();
    moves.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let strong = |s: Square| [Color::Black, Color::White].iter().any(|&c| b.best_class(s, c) >= LineClass::S4);
    let mut kept = 0;
    moves.retain(|&(s, _)| {
        kept += 1;
        kept <= branch || strong(s)
    });
    moves
}

/// The best `branch` candidate moves for an open position.
pub fn generate_moves(b: &Board, t: &ScoreTable, branch: usize) -> Result<Vec<(Square, i32)>> {
    let kind = analyze_board(b)?.verdict.kind();
    if kind != VerdictKind::Open {
        return Err(Error::Contract(format!("move generation needs an open position, analysis says {}", kind.name())));
    }
    Ok(ranked_moves(b, t, branch))
}
