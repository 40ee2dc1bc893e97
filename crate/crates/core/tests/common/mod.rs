//! Shared oracles and generators for the integration and acceptance tests.
#![allow(dead_code)]

pub mod lemma_suite;

use std::collections::{BTreeSet, HashMap};

use gomoku_engine::lines::{classify_line, DefenceMask, LineCell, LineClass, LineCode, CENTER, LINE_LEN};
use gomoku_engine::patterns::{classify_pattern, Cell, Coord, PatternClass, Player, RestrictedPattern};

/// Restricted pattern induced by a nine-square line: own and empty cells,
/// the center filled, opponent and outside cells left out.
pub fn induced_pattern(cells: &[LineCell; LINE_LEN]) -> RestrictedPattern {
    RestrictedPattern::from_cells(cells.iter().enumerate().filter_map(|(i, c)| {
        let cell = match c {
            LineCell::Own => Cell::X,
            LineCell::Empty => Cell::Empty,
            _ => return None,
        };
        Some((Coord::new(0, i as i32), cell))
    }))
}

fn mask_of(set: &BTreeSet<Coord>) -> DefenceMask {
    DefenceMask(set.iter().fold(0, |m, c| m | 1 << c.col))
}

/// Line class and defence the oracle assigns to a center-filled line, or a
/// description of why no line class fits.
pub fn oracle_line_info(cells: &[LineCell; LINE_LEN]) -> Result<(LineClass, DefenceMask), String> {
    let p = induced_pattern(cells);
    let class = classify_pattern(&p, Player::X).map_err(|e| e.to_string())?;
    let none = DefenceMask::EMPTY;
    Ok(match &class {
        PatternClass::Victory { steps: 0 } => (LineClass::S5, none),
        PatternClass::Victory { steps: 1 } => (LineClass::D4, none),
        PatternClass::Attack { steps: 1, defence, .. } => (LineClass::S4, mask_of(defence)),
        PatternClass::Attack { steps: 2, defence, .. } if defence.len() == 2 => (LineClass::D3, mask_of(defence)),
        PatternClass::Attack { steps: 2, defence, .. } if defence.len() == 3 => (LineClass::W3, mask_of(defence)),
        PatternClass::Threat { steps: 2, .. } => (LineClass::S3, none),
        PatternClass::Threat { steps: 3, defence_size: 2, .. } => (LineClass::DoubleTwo, none),
        PatternClass::Threat { steps: 3, defence_size: 3, .. } => (LineClass::WeakTwo, none),
        PatternClass::Generic => {
            let two = p.empties().any(|e| {
                matches!(classify_pattern(&p.filled_with(e, Player::X), Player::X), Ok(PatternClass::Threat { steps: 2, .. }))
            });
            (if two { LineClass::SimpleTwo } else { LineClass::Generic }, none)
        }
        other => return Err(format!("{} with defence size {}", other.label(), other.defence_size())),
    })
}

/// Defence of the pre-fill pattern for potential fives and double fours:
/// the attack defence of the line with its center still empty.
pub fn oracle_prefill_defence(cells: &[LineCell; LINE_LEN]) -> Option<DefenceMask> {
    let mut open = *cells;
    open[CENTER] = LineCell::Empty;
    match classify_pattern(&induced_pattern(&open), Player::X).ok()? {
        PatternClass::Attack { defence, .. } => Some(mask_of(&defence)),
        _ => None,
    }
}

/// Compares every legal line code with the oracle; returns the number of
/// codes checked and the mismatches found.
pub fn line_table_sweep() -> (usize, Vec<String>) {
    let mut cache: HashMap<[LineCell; LINE_LEN], (LineClass, DefenceMask, Option<DefenceMask>)> = HashMap::new();
    let mut checked = 0;
    let mut bad = Vec::new();
    for raw in 0..=u16::MAX {
        let code = LineCode(raw);
        if !code.is_legal() {
            continue;
        }
        checked += 1;
        let mut cells = code.with_center(LineCell::Own);
        // opponent and outside cells are equivalent for the oracle
        for c in cells.iter_mut() {
            if *c == LineCell::Outside {
                *c = LineCell::Opp;
            }
        }
        let entry = match cache.get(&cells) {
            Some(e) => *e,
            None => {
                let (class, defence) = match oracle_line_info(&cells) {
                    Ok(v) => v,
                    Err(e) => {
                        bad.push(format!("{code}: oracle gives {e}"));
                        continue;
                    }
                };
                let pre = matches!(class, LineClass::S5 | LineClass::D4).then(|| oracle_prefill_defence(&cells)).flatten();
                cache.insert(cells, (class, defence, pre));
                (class, defence, pre)
            }
        };
        let info = classify_line(code);
        if info.class != entry.0 {
            bad.push(format!("{code}: table {} oracle {}", info.class, entry.0));
            continue;
        }
        let expected = match info.class {
            LineClass::S4 | LineClass::D3 | LineClass::W3 => Some(entry.1),
            LineClass::S5 | LineClass::D4 => entry.2,
            _ => None,
        };
        if let Some(d) = expected {
            if d != info.defence {
                bad.push(format!("{code}: {} defence table {} oracle {d}", info.class, info.defence));
            }
        }
    }
    (checked, bad)
}

use gomoku_engine::analysis::{analyze_board, Verdict};
use gomoku_engine::board::{Board, Square};
use gomoku_engine::eval_movegen::{evaluate, generate_moves, ScoreTable, WIN};
use rand::seq::SliceRandom;
use rand::Rng;

/// A board reached by random play among candidate squares, stopped before
/// any five. `max_moves` bounds the game length.
pub fn random_board(rng: &mut impl Rng, size: usize, max_moves: usize) -> Board {
    let mut b = Board::new(size, size).unwrap();
    let target = rng.gen_range(1..=max_moves);
    for _ in 0..target {
        let moves: Vec<Square> = if b.stone_count() == 0 { vec![b.center()] } else { b.candidates().collect() };
        let Some(&s) = moves.choose(rng) else { break };
        b.play(s).unwrap();
        if b.is_over() {
            b.unmake_move().unwrap();
            break;
        }
    }
    b
}

/// Plain recursive negamax built only from the public analysis and move
/// generation calls, used as the oracle for the search routines.
pub fn reference_value(b: &mut Board, depth: u32, ply: u32, scores: &ScoreTable, branch: usize) -> i32 {
    if b.winner().is_some() {
        return -(WIN - ply as i32);
    }
    if b.is_full() {
        return 0;
    }
    let report = analyze_board(b).unwrap();
    if let Some(d) = report.plies_to_end() {
        let v = WIN - (ply + d) as i32;
        return if report.verdict == Verdict::LossCertain { -v } else { v };
    }
    if depth == 0 {
        return evaluate(b, scores).unwrap();
    }
    let moves: Vec<Square> = match &report.verdict {
        Verdict::Forced(m) => m.clone(),
        _ => generate_moves(b, scores, branch).unwrap().into_iter().map(|m| m.0).collect(),
    };
    let mut best = i32::MIN;
    for s in moves {
        b.play(s).unwrap();
        best = best.max(-reference_value(b, depth - 1, ply + 1, scores, branch));
        b.unmake_move().unwrap();
    }
    best
}

/// Plain stone grid for brute-force win checks, independent of the
/// engine's line tables and analysis.
#[derive(Clone)]
pub struct Grid {
    rows: i32,
    cols: i32,
    cells: Vec<u8>,
}

const DIRS: [(i32, i32); 4] = [(0, 1), (1, 0), (1, 1), (1, -1)];

impl Grid {
    pub fn of(b: &Board) -> Grid {
        let cells = b
            .squares()
            .map(|s| match b.stone(s).color() {
                None => 0,
                Some(c) => 1 + c.index() as u8,
            })
            .collect();
        Grid { rows: b.rows() as i32, cols: b.cols() as i32, cells }
    }

    fn at(&self, r: i32, c: i32) -> Option<u8> {
        (r >= 0 && c >= 0 && r < self.rows && c < self.cols).then(|| self.cells[(r * self.cols + c) as usize])
    }

    fn makes_five(&self, i: usize, p: u8) -> bool {
        let (r, c) = (i as i32 / self.cols, i as i32 % self.cols);
        DIRS.iter().any(|&(dr, dc)| {
            let run = |sign: i32| (1..5).take_while(|&k| self.at(r + sign * k * dr, c + sign * k * dc) == Some(p)).count();
            1 + run(1) + run(-1) >= 5
        })
    }

    fn empties(&self) -> Vec<usize> {
        (0..self.cells.len()).filter(|&i| self.cells[i] == 0).collect()
    }

    fn fives(&self, p: u8) -> Vec<usize> {
        self.empties().into_iter().filter(|&i| self.makes_five(i, p)).collect()
    }

    /// Five squares of `p` on the lines through `i`.
    fn fives_near(&self, i: usize, p: u8) -> BTreeSet<usize> {
        let (r, c) = (i as i32 / self.cols, i as i32 % self.cols);
        let mut out = BTreeSet::new();
        for &(dr, dc) in &DIRS {
            for k in -4..=4 {
                if let Some(0) = self.at(r + k * dr, c + k * dc) {
                    let j = ((r + k * dr) * self.cols + c + k * dc) as usize;
                    if self.makes_five(j, p) {
                        out.insert(j);
                    }
                }
            }
        }
        out
    }

    /// `p` to move makes a five with at most `k` (1 or 2) of its own moves,
    /// whatever the opponent does in between.
    pub fn wins_within(&mut self, p: u8, k: u32) -> bool {
        if !self.fives(p).is_empty() {
            return true;
        }
        if k == 1 {
            return false;
        }
        let theirs = self.fives(3 - p);
        let moves = match theirs.len() {
            0 => self.empties(),
            1 => theirs.clone(),
            _ => return false,
        };
        moves.into_iter().any(|m| {
            self.cells[m] = p;
            let won = self.fives_near(m, p).len() >= 2;
            self.cells[m] = 0;
            won
        })
    }

    /// `p` to move cannot stop the opponent making a five within `k` (1 or
    /// 2) opponent moves: every reply is tried.
    pub fn loses_within(&mut self, p: u8, k: u32) -> bool {
        if !self.fives(p).is_empty() {
            return false;
        }
        let theirs = self.fives(3 - p);
        if theirs.len() >= 2 {
            return true;
        }
        if theirs.is_empty() && k == 1 {
            return false;
        }
        let replies = if theirs.len() == 1 { theirs } else { self.empties() };
        replies.into_iter().all(|r| {
            self.cells[r] = p;
            let lost = self.wins_within(3 - p, k);
            self.cells[r] = 0;
            lost
        })
    }
}

/// Stone code of the side to move on `b` in a [`Grid`].
pub fn mover(b: &Board) -> u8 {
    1 + b.to_move().index() as u8
}

/// Replays a solver proof line and checks by brute force that the attacker
/// has won or the defender, now to move, loses within two attacker moves.
pub fn proof_holds(b: &Board, line: &[Square]) -> Result<(), String> {
    let attacker = b.to_move();
    let mut end = b.clone();
    for &s in line {
        end.play(s).map_err(|e| format!("proof move rejected: {e}"))?;
    }
    if end.winner() == Some(attacker) {
        return Ok(());
    }
    if end.is_over() || end.to_move() == attacker {
        return Err("proof line ends with the attacker to move".into());
    }
    if Grid::of(&end).loses_within(mover(&end), 2) {
        Ok(())
    } else {
        Err(format!("defender survives at the end of the proof\n{}", end.dump()))
    }
}

/// Threat sequence of simple threes: two fours in a row, the second
/// leaving an open three. The pattern's outside squares are walled off.
pub const THREAT_SEQUENCE_FOURS: &str = "15x15 black\n...............\n...............\n.......O.......\n..OXXX..O......\n.......X.......\n.......X.......\n...............\n...O..X.X..O...\n.......O.......\n...............\n...............\n...............\n...............\n...............\nO..............\n";
/// The same sequence opened by a weak three instead of a four.
pub const THREAT_SEQUENCE_WEAK_THREE: &str = "15x15 black\n...............\n...............\n.......O.......\n..O..XX..O.....\n......OX.......\n.......X.......\n...............\n...O..X.X..O...\n.......O.......\n...............\n...............\n...............\n...............\n...............\n..............X\n";
