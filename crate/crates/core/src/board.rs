//! Mutable game state with incrementally maintained potential lines.
//!
//! Every square keeps, for both colors and all four directions, the 16-bit
//! code of the nine-square line centered on it. Codes are kept for filled
//! squares too so that unmaking a move only has to clear two bits per line.
//! Classes and cross patterns are looked up for empty squares only.

use std::fmt;
use std::sync::{Arc, OnceLock};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lines::{
    cell_index, cross_class, CrossClass, DefenceMask, LineCell, LineClass, LineCode, LineInfo,
    LineTable, CENTER, LINE_LEN,
};

pub const MIN_DIM: usize = 5;
pub const MAX_DIM: usize = 32;
pub const DEFAULT_DIM: usize = 15;
pub const CANDIDATE_RADIUS: i32 = 2;
pub const ZOBRIST_SEED: u64 = 0x5eed_9a3e_0f15_2021;

/// Row/column steps for the horizontal, vertical, diagonal and anti-diagonal
/// directions, in that order.
pub const DIRS: [(i32, i32); 4] = [(0, 1), (1, 0), (1, 1), (1, -1)];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Black,
    White,
}

impl Color {
    #[inline]
    pub fn opp(self) -> Color {
        match self {
            Color::Black => Color::White,
            Color::White => Color::Black,
        }
    }

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Color::Black => "black",
            Color::White => "white",
        }
    }

    pub fn from_name(s: &str) -> Option<Color> {
        match s.to_ascii_lowercase().as_str() {
            "black" | "b" | "x" => Some(Color::Black),
            "white" | "w" | "o" => Some(Color::White),
            _ => None,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stone {
    #[default]
    Empty,
    Black,
    White,
}

impl Stone {
    pub fn color(self) -> Option<Color> {
        match self {
            Stone::Empty => None,
            Stone::Black => Some(Color::Black),
            Stone::White => Some(Color::White),
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Stone::Empty => '.',
            Stone::Black => 'X',
            Stone::White => 'O',
        }
    }
}

impl From<Color> for Stone {
    fn from(c: Color) -> Stone {
        match c {
            Color::Black => Stone::Black,
            Color::White => Stone::White,
        }
    }
}

/// Square index, `row * cols + col`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Square(pub u16);

impl Square {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Move {
    pub square: Square,
    pub color: Color,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Undo {
    mv: Move,
    winner: Option<Color>,
}

struct Zobrist {
    base: u64,
    side: u64,
    stones: [[u64; MAX_DIM * MAX_DIM]; 2],
}

fn zobrist() -> &'static Zobrist {
    static KEYS: OnceLock<Box<Zobrist>> = OnceLock::new();
    KEYS.get_or_init(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(ZOBRIST_SEED);
        let base = rng.next_u64();
        let side = rng.next_u64();
        let mut stones = [[0u64; MAX_DIM * MAX_DIM]; 2];
        for color in stones.iter_mut() {
            for k in color.iter_mut() {
                *k = rng.next_u64();
            }
        }
        Box::new(Zobrist { base, side, stones })
    })
}

/// Hash of the empty board with Black to move.
pub fn empty_board_hash() -> u64 {
    zobrist().base
}

#[derive(Clone)]
pub struct Board {
    rows: usize,
    cols: usize,
    grid: Vec<Stone>,
    to_move: Color,
    /// `codes[sq][color][dir]`, relative to `color`.
    codes: Vec<[[u16; 4]; 2]>,
    info: Vec<[[LineInfo; 4]; 2]>,
    cross: Vec<[CrossClass; 2]>,
    /// Stones within the candidate radius (the square itself included).
    near: Vec<u8>,
    hash: u64,
    stones: usize,
    winner: Option<Color>,
    history: Vec<Undo>,
    table: Arc<LineTable>,
}

impl PartialEq for Board {
    fn eq(&self, other: &Board) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.grid == other.grid
            && self.to_move == other.to_move
            && self.codes == other.codes
            && self.info == other.info
            && self.cross == other.cross
            && self.near == other.near
            && self.hash == other.hash
            && self.stones == other.stones
            && self.winner == other.winner
            && self.history == other.history
    }
}

impl fmt::Debug for Board {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.dump())
    }
}

impl Board {
    pub fn new(rows: usize, cols: usize) -> Result<Board> {
        Board::with_table(rows, cols, LineTable::shared())
    }

    pub fn with_table(rows: usize, cols: usize, table: Arc<LineTable>) -> Result<Board> {
        if !(MIN_DIM..=MAX_DIM).contains(&rows) || !(MIN_DIM..=MAX_DIM).contains(&cols) {
            return Err(Error::Config(format!(
                "board dimensions {rows}x{cols} outside {MIN_DIM}..={MAX_DIM}"
            )));
        }
        let n = rows * cols;
        let mut board = Board {
            rows,
            cols,
            grid: vec![Stone::Empty; n],
            to_move: Color::Black,
            codes: vec![[[0; 4]; 2]; n],
            info: vec![[[LineInfo::default(); 4]; 2]; n],
            cross: vec![[CrossClass::default(); 2]; n],
            near: vec![0; n],
            hash: zobrist().base,
            stones: 0,
            winner: None,
            history: Vec::new(),
            table,
        };
        for sq in 0..n {
            let s = Square(sq as u16);
            for c in [Color::Black, Color::White] {
                for d in 0..4 {
                    board.codes[sq][c.index()][d] = board.scan_code(s, c, d).0;
                }
            }
            board.refresh_square(s);
        }
        Ok(board)
    }

    pub fn standard() -> Board {
        Board::new(DEFAULT_DIM, DEFAULT_DIM).expect("default dimensions are valid")
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.rows * self.cols
    }

    pub fn table(&self) -> &Arc<LineTable> {
        &self.table
    }

    #[inline]
    pub fn square(&self, row: usize, col: usize) -> Square {
        debug_assert!(row < self.rows && col < self.cols);
        Square((row * self.cols + col) as u16)
    }

    pub fn try_square(&self, row: i32, col: i32) -> Option<Square> {
        let inside = row >= 0 && col >= 0 && (row as usize) < self.rows && (col as usize) < self.cols;
        inside.then(|| self.square(row as usize, col as usize))
    }

    #[inline]
    pub fn row_col(&self, s: Square) -> (usize, usize) {
        (s.index() / self.cols, s.index() % self.cols)
    }

    pub fn center(&self) -> Square {
        self.square(self.rows / 2, self.cols / 2)
    }

    /// Square `offset` steps from `s` along direction `dir`.
    #[inline]
    pub fn step(&self, s: Square, dir: usize, offset: i32) -> Option<Square> {
        let (r, c) = self.row_col(s);
        let (dr, dc) = DIRS[dir];
        self.try_square(r as i32 + dr * offset, c as i32 + dc * offset)
    }

    /// Board squares for the positions of a line mask around `s`.
    pub fn line_squares(&self, s: Square, dir: usize, mask: DefenceMask) -> Vec<Square> {
        mask.offsets().filter_map(|o| self.step(s, dir, o)).collect()
    }

    #[inline]
    pub fn stone(&self, s: Square) -> Stone {
        self.grid[s.index()]
    }

    #[inline]
    pub fn is_empty(&self, s: Square) -> bool {
        self.grid[s.index()] == Stone::Empty
    }

    pub fn squares(&self) -> impl Iterator<Item = Square> {
        (0..self.size() as u16).map(Square)
    }

    pub fn empty_squares(&self) -> impl Iterator<Item = Square> + '_ {
        self.squares().filter(|&s| self.is_empty(s))
    }

    #[inline]
    pub fn to_move(&self) -> Color {
        self.to_move
    }

    #[inline]
    pub fn hash(&self) -> u64 {
        self.hash
    }

    #[inline]
    pub fn stone_count(&self) -> usize {
        self.stones
    }

    pub fn count(&self, c: Color) -> usize {
        self.grid.iter().filter(|&&s| s == Stone::from(c)).count()
    }

    #[inline]
    pub fn winner(&self) -> Option<Color> {
        self.winner
    }

    pub fn is_full(&self) -> bool {
        self.stones == self.size()
    }

    pub fn is_over(&self) -> bool {
        self.winner.is_some() || self.is_full()
    }

    pub fn history(&self) -> impl Iterator<Item = Move> + '_ {
        self.history.iter().map(|u| u.mv)
    }

    pub fn last_move(&self) -> Option<Move> {
        self.history.last().map(|u| u.mv)
    }

    #[inline]
    pub fn is_candidate(&self, s: Square) -> bool {
        self.near[s.index()] > 0 && self.is_empty(s)
    }

    pub fn candidates(&self) -> impl Iterator<Item = Square> + '_ {
        self.squares().filter(|&s| self.is_candidate(s))
    }

    #[inline]
    pub fn code(&self, s: Square, c: Color, dir: usize) -> LineCode {
        LineCode(self.codes[s.index()][c.index()][dir])
    }

    /// Potential line class for `c` filling empty square `s`; Generic on
    /// filled squares.
    #[inline]
    pub fn line_info(&self, s: Square, c: Color, dir: usize) -> LineInfo {
        self.info[s.index()][c.index()][dir]
    }

    #[inline]
    pub fn line_class(&self, s: Square, c: Color, dir: usize) -> LineClass {
        self.info[s.index()][c.index()][dir].class
    }

    pub fn classes(&self, s: Square, c: Color) -> [LineClass; 4] {
        std::array::from_fn(|d| self.line_class(s, c, d))
    }

    pub fn best_class(&self, s: Square, c: Color) -> LineClass {
        self.classes(s, c).into_iter().max().unwrap_or_default()
    }

    #[inline]
    pub fn cross(&self, s: Square, c: Color) -> CrossClass {
        self.cross[s.index()][c.index()]
    }

    /// Line code for `c` read directly from the grid.
    pub fn scan_code(&self, s: Square, c: Color, dir: usize) -> LineCode {
        let cells: [LineCell; 8] = std::array::from_fn(|i| {
            let pos = if i < CENTER { i } else { i + 1 };
            let offset = pos as i32 - CENTER as i32;
            match self.step(s, dir, offset) {
                None => LineCell::Outside,
                Some(t) => match self.stone(t).color() {
                    None => LineCell::Empty,
                    Some(k) if k == c => LineCell::Own,
                    Some(_) => LineCell::Opp,
                },
            }
        });
        LineCode::encode(cells)
    }

    /// The actual nine-square line through `s` for `c`, center included.
    pub fn actual_line(&self, s: Square, c: Color, dir: usize) -> [LineCell; LINE_LEN] {
        let center = match self.stone(s).color() {
            None => LineCell::Empty,
            Some(k) if k == c => LineCell::Own,
            Some(_) => LineCell::Opp,
        };
        self.code(s, c, dir).with_center(center)
    }

    fn refresh_square(&mut self, s: Square) {
        let i = s.index();
        if self.grid[i] != Stone::Empty {
            self.info[i] = [[LineInfo::default(); 4]; 2];
            self.cross[i] = [CrossClass::default(); 2];
            return;
        }
        for c in 0..2 {
            for d in 0..4 {
                self.info[i][c][d] = self.table.get(LineCode(self.codes[i][c][d]));
            }
            self.cross[i][c] = cross_class(std::array::from_fn(|d| self.info[i][c][d].class));
        }
    }

    fn refresh_dir(&mut self, s: Square, dir: usize) {
        let i = s.index();
        for c in 0..2 {
            self.info[i][c][dir] = self.table.get(LineCode(self.codes[i][c][dir]));
            self.cross[i][c] = cross_class(std::array::from_fn(|d| self.info[i][c][d].class));
        }
    }

    /// Writes stone `stone` at `s` and updates every dependent field except
    /// history, side to move and winner.
    fn put(&mut self, s: Square, stone: Stone) {
        let i = s.index();
        let (row, col) = self.row_col(s);
        let key_slot = row * MAX_DIM + col;
        let (old, delta) = match stone {
            Stone::Empty => (self.grid[i], -1i32),
            _ => (stone, 1),
        };
        let color = old.color().expect("put changes an occupied state");
        self.hash ^= zobrist().stones[color.index()][key_slot];
        self.grid[i] = stone;
        self.stones = (self.stones as i32 + delta) as usize;

        let (own, opp) = match stone {
            Stone::Empty => (LineCell::Empty, LineCell::Empty),
            _ => (LineCell::Own, LineCell::Opp),
        };
        for dir in 0..4 {
            for offset in (-4..=4).filter(|&o| o != 0) {
                // `s` sits at `offset` along the line centered on `t`
                let Some(t) = self.step(s, dir, -offset) else { continue };
                let cell = cell_index(offset);
                let shift = 2 * cell;
                let ti = t.index();
                let mine = &mut self.codes[ti][color.index()][dir];
                *mine = (*mine & !(3 << shift)) | ((own as u16) << shift);
                let theirs = &mut self.codes[ti][color.opp().index()][dir];
                *theirs = (*theirs & !(3 << shift)) | ((opp as u16) << shift);
                if self.grid[ti] == Stone::Empty {
                    self.refresh_dir(t, dir);
                }
            }
        }
        self.refresh_square(s);

        for dr in -CANDIDATE_RADIUS..=CANDIDATE_RADIUS {
            for dc in -CANDIDATE_RADIUS..=CANDIDATE_RADIUS {
                if let Some(t) = self.try_square(row as i32 + dr, col as i32 + dc) {
                    let n = &mut self.near[t.index()];
                    *n = (*n as i32 + delta) as u8;
                }
            }
        }
    }

    fn five_through(&self, s: Square, c: Color) -> bool {
        let stone = Stone::from(c);
        (0..4).any(|dir| {
            let run = |sign: i32| {
                (1..5)
                    .take_while(|&k| self.step(s, dir, sign * k).is_some_and(|t| self.stone(t) == stone))
                    .count()
            };
            1 + run(1) + run(-1) >= 5
        })
    }

    pub fn make_move(&mut self, mv: Move) -> Result<()> {
        if self.is_over() {
            return Err(Error::GameOver);
        }
        if mv.square.index() >= self.size() {
            return Err(Error::IllegalMove(format!("square {} is off the board", mv.square.0)));
        }
        if !self.is_empty(mv.square) {
            let (r, c) = self.row_col(mv.square);
            return Err(Error::IllegalMove(format!("square ({r},{c}) is occupied")));
        }
        if mv.color != self.to_move {
            return Err(Error::Turn { expected: self.to_move.name() });
        }
        self.apply(mv);
        Ok(())
    }

    /// Plays the side to move at `s`.
    pub fn play(&mut self, s: Square) -> Result<()> {
        self.make_move(Move { square: s, color: self.to_move })
    }

    pub fn play_rc(&mut self, row: usize, col: usize) -> Result<()> {
        let s = self
            .try_square(row as i32, col as i32)
            .ok_or_else(|| Error::IllegalMove(format!("({row},{col}) is off the board")))?;
        self.play(s)
    }

    /// Unchecked make used by search: the square must be empty and the game
    /// not over.
    pub(crate) fn apply(&mut self, mv: Move) {
        debug_assert!(self.is_empty(mv.square) && mv.color == self.to_move);
        self.history.push(Undo { mv, winner: self.winner });
        self.put(mv.square, Stone::from(mv.color));
        self.to_move = mv.color.opp();
        self.hash ^= zobrist().side;
        if self.five_through(mv.square, mv.color) {
            self.winner = Some(mv.color);
        }
    }

    pub fn unmake_move(&mut self) -> Result<Move> {
        let undo = self.history.pop().ok_or(Error::Underflow)?;
        self.put(undo.mv.square, Stone::Empty);
        self.to_move = undo.mv.color;
        self.hash ^= zobrist().side;
        self.winner = undo.winner;
        Ok(undo.mv)
    }

    /// Places several stones of one color at once, without history, and
    /// gives the move to the other color. Used by threat-space search.
    pub(crate) fn fill(&mut self, squares: &[Square], c: Color) {
        for &s in squares {
            self.setup(s, c);
        }
        if self.to_move != c.opp() {
            self.to_move = c.opp();
            self.hash ^= zobrist().side;
        }
    }

    /// Places stones without recording history. Used for position set-up.
    fn setup(&mut self, s: Square, c: Color) {
        self.put(s, Stone::from(c));
        if self.five_through(s, c) && self.winner.is_none() {
            self.winner = Some(c);
        }
    }

    /// Builds a position from stone lists; Black is assumed to have moved
    /// first, so the counts decide the side to move.
    pub fn from_stones(rows: usize, cols: usize, black: &[Square], white: &[Square]) -> Result<Board> {
        let mut b = Board::new(rows, cols)?;
        for (list, color) in [(black, Color::Black), (white, Color::White)] {
            for &s in list {
                if s.index() >= b.size() || !b.is_empty(s) {
                    return Err(Error::IllegalMove(format!("bad set-up square {}", s.0)));
                }
                b.setup(s, color);
            }
        }
        let to_move = match black.len() as i64 - white.len() as i64 {
            0 => Color::Black,
            1 => Color::White,
            _ => {
                return Err(Error::Parse(format!(
                    "{} black and {} white stones are not a reachable position",
                    black.len(),
                    white.len()
                )))
            }
        };
        if to_move == Color::White {
            b.hash ^= zobrist().side;
        }
        b.to_move = to_move;
        Ok(b)
    }

    /// The same stones with colors exchanged and `to_move` to play. Such a
    /// board need not be reachable.
    #[cfg(test)]
    pub(crate) fn color_swapped(&self, to_move: Color) -> Board {
        let mut b = Board::with_table(self.rows, self.cols, self.table.clone()).expect("same dimensions");
        for s in self.squares() {
            if let Some(c) = self.stone(s).color() {
                b.setup(s, c.opp());
            }
        }
        if to_move == Color::White {
            b.hash ^= zobrist().side;
        }
        b.to_move = to_move;
        b
    }

    /// Text dump: a `RxC side` header followed by rows of `X`, `O` and `.`.
    pub fn dump(&self) -> String {
        let mut out = format!("{}x{} {}\n", self.rows, self.cols, self.to_move);
        for r in 0..self.rows {
            out.extend((0..self.cols).map(|c| self.stone(self.square(r, c)).to_char()));
            out.push('\n');
        }
        out
    }

    pub fn from_dump(text: &str) -> Result<Board> {
        let mut lines = text.lines().map(str::trim_end).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty board dump".into()))?;
        let (dims, side) = header
            .split_once(' ')
            .ok_or_else(|| Error::Parse(format!("bad header {header:?}")))?;
        let (r, c) = dims
            .split_once('x')
            .ok_or_else(|| Error::Parse(format!("bad dimensions {dims:?}")))?;
        let rows: usize = r.parse().map_err(|_| Error::Parse(format!("bad row count {r:?}")))?;
        let cols: usize = c.parse().map_err(|_| Error::Parse(format!("bad column count {c:?}")))?;
        let side = Color::from_name(side.trim())
            .ok_or_else(|| Error::Parse(format!("bad side to move {side:?}")))?;
        if !(MIN_DIM..=MAX_DIM).contains(&rows) || !(MIN_DIM..=MAX_DIM).contains(&cols) {
            return Err(Error::Config(format!("board dimensions {rows}x{cols} outside {MIN_DIM}..={MAX_DIM}")));
        }
        let (mut black, mut white) = (Vec::new(), Vec::new());
        let mut count = 0;
        for (row, line) in lines.enumerate() {
            if row >= rows {
                return Err(Error::Parse("too many rows".into()));
            }
            let chars: Vec<char> = line.chars().collect();
            if chars.len() != cols {
                return Err(Error::Parse(format!("row {row} has {} cells, expected {cols}", chars.len())));
            }
            for (col, ch) in chars.into_iter().enumerate() {
                let s = Square((row * cols + col) as u16);
                match ch {
                    'X' | 'x' => black.push(s),
                    'O' | 'o' => white.push(s),
                    '.' | '+' => {}
                    _ => return Err(Error::Parse(format!("bad cell {ch:?} at ({row},{col})"))),
                }
            }
            count += 1;
        }
        if count != rows {
            return Err(Error::Parse(format!("dump has {count} rows, expected {rows}")));
        }
        let board = Board::from_stones(rows, cols, &black, &white)?;
        if board.to_move != side {
            return Err(Error::Parse(format!(
                "header says {side} to move but stone counts give {}",
                board.to_move
            )));
        }
        Ok(board)
    }

    /// Compares every incremental field with a from-scratch recomputation.
    pub fn check_consistency(&self) -> std::result::Result<(), String> {
        let mut fresh = Board::with_table(self.rows, self.cols, self.table.clone())
            .map_err(|e| e.to_string())?;
        for s in self.squares() {
            if let Some(c) = self.stone(s).color() {
                fresh.put(s, Stone::from(c));
            }
        }
        for s in self.squares() {
            let i = s.index();
            for c in [Color::Black, Color::White] {
                for d in 0..4 {
                    let scanned = self.scan_code(s, c, d);
                    if self.codes[i][c.index()][d] != scanned.0 {
                        return Err(format!("code mismatch at {:?} {c} dir {d}", self.row_col(s)));
                    }
                }
            }
            if self.info[i] != fresh.info[i] || self.cross[i] != fresh.cross[i] {
                return Err(format!("line data mismatch at {:?}", self.row_col(s)));
            }
            let near = self.stones_near(s);
            if self.near[i] as usize != near {
                return Err(format!("candidate count mismatch at {:?}", self.row_col(s)));
            }
        }
        let mut hash = zobrist().base;
        for s in self.squares() {
            if let Some(c) = self.stone(s).color() {
                let (r, col) = self.row_col(s);
                hash ^= zobrist().stones[c.index()][r * MAX_DIM + col];
            }
        }
        if self.to_move == Color::White {
            hash ^= zobrist().side;
        }
        if hash != self.hash {
            return Err("hash mismatch".into());
        }
        if self.winner != winner_on_board(self) {
            return Err("winner mismatch".into());
        }
        Ok(())
    }

    fn stones_near(&self, s: Square) -> usize {
        let (r, c) = self.row_col(s);
        let mut n = 0;
        for dr in -CANDIDATE_RADIUS..=CANDIDATE_RADIUS {
            for dc in -CANDIDATE_RADIUS..=CANDIDATE_RADIUS {
                if let Some(t) = self.try_square(r as i32 + dr, c as i32 + dc) {
                    n += usize::from(!self.is_empty(t));
                }
            }
        }
        n
    }
}

/// Color owning a five anywhere on the board, by a full scan.
pub fn winner_on_board(b: &Board) -> Option<Color> {
    for s in b.squares() {
        let Some(c) = b.stone(s).color() else { continue };
        for dir in 0..4 {
            let five = (1..5).all(|k| b.step(s, dir, k).is_some_and(|t| b.stone(t).color() == Some(c)));
            if five {
                return Some(c);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions_are_validated() {
        assert!(Board::new(5, 5).is_ok());
        assert!(matches!(Board::new(4, 9), Err(Error::Config(_))));
        assert!(Board::new(33, 15).is_err());
    }

    #[test]
    fn first_move_makes_24_candidates() {
        let mut b = Board::standard();
        assert_eq!(b.candidates().count(), 0);
        b.play(b.center()).unwrap();
        assert_eq!(b.candidates().count(), 24);
        assert_eq!(b.to_move(), Color::White);
    }

    #[test]
    fn occupied_and_wrong_color_are_rejected() {
        let mut b = Board::standard();
        let c = b.center();
        b.play(c).unwrap();
        assert!(matches!(b.play(c), Err(Error::IllegalMove(_))));
        let other = b.square(0, 0);
        let wrong = Move { square: other, color: Color::Black };
        assert!(matches!(b.make_move(wrong), Err(Error::Turn { .. })));
    }

    #[test]
    fn unmake_restores_everything() {
        let mut b = Board::standard();
        let before = b.clone();
        b.play_rc(7, 7).unwrap();
        let h = b.hash();
        b.unmake_move().unwrap();
        assert_eq!(b, before);
        b.play_rc(7, 7).unwrap();
        assert_eq!(b.hash(), h);
        let mut fresh = Board::standard();
        assert_eq!(fresh.unmake_move(), Err(Error::Underflow));
    }

    #[test]
    fn transposed_orders_share_a_hash() {
        let mut a = Board::standard();
        let mut b = Board::standard();
        for (r, c) in [(7, 7), (8, 8), (6, 6), (9, 9)] {
            a.play_rc(r, c).unwrap();
        }
        for (r, c) in [(6, 6), (9, 9), (7, 7), (8, 8)] {
            b.play_rc(r, c).unwrap();
        }
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), empty_board_hash());
    }

    #[test]
    fn five_ends_the_game() {
        let mut b = Board::standard();
        for i in 0..4 {
            b.play_rc(7, 3 + i).unwrap();
            b.play_rc(0, 2 * i).unwrap();
        }
        b.play_rc(7, 7).unwrap();
        assert_eq!(b.winner(), Some(Color::Black));
        assert_eq!(winner_on_board(&b), Some(Color::Black));
        assert_eq!(b.play_rc(10, 10), Err(Error::GameOver));
        b.unmake_move().unwrap();
        assert_eq!(b.winner(), None);
    }

    #[test]
    fn potential_lines_follow_the_grid() {
        let mut b = Board::standard();
        for c in 5..8 {
            b.play_rc(7, c).unwrap();
            b.play_rc(0, c).unwrap();
        }
        let s = b.square(7, 8);
        assert_eq!(b.line_class(s, Color::Black, 0), LineClass::D4);
        assert_eq!(b.line_class(s, Color::White, 0), LineClass::Generic);
        b.check_consistency().unwrap();
    }

    #[test]
    fn dump_roundtrip() {
        let mut b = Board::new(9, 11).unwrap();
        b.play_rc(4, 5).unwrap();
        b.play_rc(3, 3).unwrap();
        b.play_rc(0, 10).unwrap();
        let text = b.dump();
        let back = Board::from_dump(&text).unwrap();
        assert_eq!(back.dump(), text);
        assert_eq!(back.hash(), b.hash());
        assert!(Board::from_dump("9x11 black\n").is_err());
    }
}
