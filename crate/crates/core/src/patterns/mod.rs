//! Restricted patterns and their exact classification.
//!
//! A pattern is a set of squares with contents. The oracle plays the game
//! restricted to those squares to completion and classifies the pattern as a
//! victory, attack, threat or generic pattern for its owner.

mod lemmas;
mod oracle;

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

pub use lemmas::{
    a1_a2_decomposition, combination_attack, combination_victory, intersection_attack,
    simple_attack, simple_threat, victory_decomposition, Decomposition, LemmaWitness,
};
pub use oracle::{
    attack_placements, classify_pattern, irrational_double_attack, is_minimal, restricted_winner,
    s3_blocks, strength_compare, threat_defence, w3_placements, OracleLimits, PatternClass,
    RestrictedOutcome, Solver, DEFAULT_LIMITS,
};

/// The subject player (`X`) and the other one (`Y`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    X,
    Y,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::X => Player::Y,
            Player::Y => Player::X,
        }
    }

    pub fn stone(self) -> Cell {
        match self {
            Player::X => Cell::X,
            Player::Y => Cell::O,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cell {
    Empty,
    X,
    O,
}

impl Cell {
    pub fn to_char(self) -> char {
        match self {
            Cell::Empty => '+',
            Cell::X => 'X',
            Cell::O => 'O',
        }
    }

    pub fn from_char(c: char) -> Option<Cell> {
        match c {
            '+' => Some(Cell::Empty),
            'X' => Some(Cell::X),
            'O' | '0' => Some(Cell::O),
            _ => None,
        }
    }

    pub fn owner(self) -> Option<Player> {
        match self {
            Cell::Empty => None,
            Cell::X => Some(Player::X),
            Cell::O => Some(Player::Y),
        }
    }
}

/// Absolute square position; ordering is row-major, which is also the
/// square-index order used for tie-breaking.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coord {
    pub row: i32,
    pub col: i32,
}

impl Coord {
    pub const fn new(row: i32, col: i32) -> Coord {
        Coord { row, col }
    }

    pub fn offset(self, dr: i32, dc: i32) -> Coord {
        Coord::new(self.row + dr, self.col + dc)
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

/// Directions used for blocks: right, down, down-right, down-left.
pub const PATTERN_DIRS: [(i32, i32); 4] = [(0, 1), (1, 0), (1, 1), (1, -1)];

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RestrictedPattern {
    cells: BTreeMap<Coord, Cell>,
}

impl RestrictedPattern {
    pub fn new() -> RestrictedPattern {
        RestrictedPattern::default()
    }

    pub fn from_cells(cells: impl IntoIterator<Item = (Coord, Cell)>) -> RestrictedPattern {
        RestrictedPattern { cells: cells.into_iter().collect() }
    }

    /// A single row starting at `origin` and running along `dir`.
    pub fn line(text: &str, origin: Coord, dir: (i32, i32)) -> Result<RestrictedPattern> {
        let mut p = RestrictedPattern::new();
        for (i, ch) in text.chars().enumerate() {
            if ch == ' ' {
                continue;
            }
            let cell = Cell::from_char(ch).ok_or_else(|| Error::Parse(format!("bad pattern character {ch:?}")))?;
            p.set(origin.offset(dir.0 * i as i32, dir.1 * i as i32), cell);
        }
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn get(&self, c: Coord) -> Option<Cell> {
        self.cells.get(&c).copied()
    }

    pub fn contains(&self, c: Coord) -> bool {
        self.cells.contains_key(&c)
    }

    pub fn set(&mut self, c: Coord, cell: Cell) {
        self.cells.insert(c, cell);
    }

    pub fn iter(&self) -> impl Iterator<Item = (Coord, Cell)> + '_ {
        self.cells.iter().map(|(&c, &v)| (c, v))
    }

    pub fn squares(&self) -> impl Iterator<Item = Coord> + '_ {
        self.cells.keys().copied()
    }

    pub fn empties(&self) -> impl Iterator<Item = Coord> + '_ {
        self.iter().filter(|&(_, v)| v == Cell::Empty).map(|(c, _)| c)
    }

    pub fn filled(&self) -> impl Iterator<Item = Coord> + '_ {
        self.iter().filter(|&(_, v)| v != Cell::Empty).map(|(c, _)| c)
    }

    pub fn empty_count(&self) -> usize {
        self.empties().count()
    }

    /// True when the pattern holds no stones of the other player.
    pub fn is_owned_by(&self, owner: Player) -> bool {
        let foreign = owner.other().stone();
        self.cells.values().all(|&v| v != foreign)
    }

    pub fn filled_with(&self, c: Coord, p: Player) -> RestrictedPattern {
        let mut out = self.clone();
        out.set(c, p.stone());
        out
    }

    pub fn emptied(&self, c: Coord) -> RestrictedPattern {
        let mut out = self.clone();
        out.set(c, Cell::Empty);
        out
    }

    pub fn without(&self, c: Coord) -> RestrictedPattern {
        let mut out = self.clone();
        out.cells.remove(&c);
        out
    }

    /// Sub-pattern on the given squares.
    pub fn restricted_to(&self, squares: impl IntoIterator<Item = Coord>) -> RestrictedPattern {
        RestrictedPattern::from_cells(squares.into_iter().filter_map(|c| self.get(c).map(|v| (c, v))))
    }

    pub fn compatible(&self, other: &RestrictedPattern) -> bool {
        self.iter().all(|(c, v)| other.get(c).is_none_or(|w| w == v))
    }

    pub fn union(&self, other: &RestrictedPattern) -> Result<RestrictedPattern> {
        if !self.compatible(other) {
            return Err(Error::Incompatible);
        }
        let mut out = self.clone();
        out.cells.extend(other.iter());
        Ok(out)
    }

    pub fn intersection(&self, other: &RestrictedPattern) -> Result<RestrictedPattern> {
        if !self.compatible(other) {
            return Err(Error::Incompatible);
        }
        Ok(RestrictedPattern::from_cells(self.iter().filter(|&(c, _)| other.contains(c))))
    }

    pub fn translated(&self, dr: i32, dc: i32) -> RestrictedPattern {
        RestrictedPattern::from_cells(self.iter().map(|(c, v)| (c.offset(dr, dc), v)))
    }

    /// One of the eight grid symmetries (rotations and reflections), which
    /// all map blocks to blocks.
    pub fn transformed(&self, symmetry: u8) -> RestrictedPattern {
        RestrictedPattern::from_cells(self.iter().map(|(c, v)| (transform(c, symmetry), v)))
    }

    /// Exchanges X and O stones.
    pub fn swapped(&self) -> RestrictedPattern {
        RestrictedPattern::from_cells(self.iter().map(|(c, v)| {
            let w = match v {
                Cell::X => Cell::O,
                Cell::O => Cell::X,
                Cell::Empty => Cell::Empty,
            };
            (c, w)
        }))
    }

    /// Parses rows of `X`, `O` and `+`, spaces marking absent squares. An
    /// optional first line `@row,col` pins the first text column of the first
    /// row; otherwise it sits at (0,0).
    pub fn parse(text: &str) -> Result<RestrictedPattern> {
        let mut lines: Vec<&str> = text.split('\n').collect();
        if lines.last() == Some(&"") {
            lines.pop();
        }
        let mut origin = Coord::new(0, 0);
        if let Some(first) = lines.first() {
            if let Some(rest) = first.strip_prefix('@') {
                let (r, c) = rest
                    .trim()
                    .split_once(',')
                    .ok_or_else(|| Error::Parse(format!("bad anchor {first:?}")))?;
                let parse = |s: &str| s.trim().parse::<i32>().map_err(|_| Error::Parse(format!("bad anchor {first:?}")));
                origin = Coord::new(parse(r)?, parse(c)?);
                lines.remove(0);
            }
        }
        let mut p = RestrictedPattern::new();
        for (r, line) in lines.iter().enumerate() {
            for (c, ch) in line.chars().enumerate() {
                if ch == ' ' {
                    continue;
                }
                let cell = Cell::from_char(ch)
                    .ok_or_else(|| Error::Parse(format!("bad pattern character {ch:?}")))?;
                p.set(origin.offset(r as i32, c as i32), cell);
            }
        }
        Ok(p)
    }

    fn bounds(&self) -> Option<(Coord, Coord)> {
        let rows = self.cells.keys().map(|c| c.row);
        let cols = self.cells.keys().map(|c| c.col);
        let (r0, r1) = (rows.clone().min()?, rows.max()?);
        let (c0, c1) = (cols.clone().min()?, cols.max()?);
        Some((Coord::new(r0, c0), Coord::new(r1, c1)))
    }
}

impl fmt::Display for RestrictedPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some((lo, hi)) = self.bounds() else { return Ok(()) };
        if lo != Coord::new(0, 0) {
            writeln!(f, "@{},{}", lo.row, lo.col)?;
        }
        for r in lo.row..=hi.row {
            let mut row: String = (lo.col..=hi.col)
                .map(|c| self.get(Coord::new(r, c)).map_or(' ', Cell::to_char))
                .collect();
            row.truncate(row.trim_end().len());
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

fn transform(c: Coord, symmetry: u8) -> Coord {
    let (r, k) = if symmetry & 4 != 0 { (c.col, c.row) } else { (c.row, c.col) };
    let r = if symmetry & 1 != 0 { -r } else { r };
    let k = if symmetry & 2 != 0 { -k } else { k };
    Coord::new(r, k)
}
