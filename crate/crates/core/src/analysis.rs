//! Static board analysis: sure wins, sure losses and forced move sets for the
//! side to move, without search.
//!
//! [`analyze_board`] reads the potential lines kept by the board.
//! [`analyze_board_actual`] scans the stones for fours, threes and weak
//! threes and classifies them with the pattern oracle; it is the slow
//! cross-check.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use serde_json::{json, Value};

use crate::board::{Board, Color, Move, Square, DIRS};
use crate::error::{Error, Result};
use crate::lines::{CrossKind, LineCell, LineClass, CENTER, LINE_LEN};
use crate::patterns::{classify_pattern, Cell, Coord, PatternClass, Player, RestrictedPattern};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum VerdictKind {
    WinInSight,
    LossCertain,
    Forced,
    Open,
}

impl VerdictKind {
    pub fn name(self) -> &'static str {
        match self {
            VerdictKind::WinInSight => "WinInSight",
            VerdictKind::LossCertain => "LossCertain",
            VerdictKind::Forced => "Forced",
            VerdictKind::Open => "Open",
        }
    }
}

/// Move sets are sorted by square index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    WinInSight(Vec<Square>),
    LossCertain,
    Forced(Vec<Square>),
    Open,
}

impl Verdict {
    pub fn kind(&self) -> VerdictKind {
        match self {
            Verdict::WinInSight(_) => VerdictKind::WinInSight,
            Verdict::LossCertain => VerdictKind::LossCertain,
            Verdict::Forced(_) => VerdictKind::Forced,
            Verdict::Open => VerdictKind::Open,
        }
    }

    pub fn moves(&self) -> &[Square] {
        match self {
            Verdict::WinInSight(m) | Verdict::Forced(m) => m,
            _ => &[],
        }
    }
}

/// A pattern that supports the verdict, anchored at one square.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evidence {
    pub square: Square,
    pub class: &'static str,
    pub owner: Color,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalysisReport {
    pub verdict: Verdict,
    pub evidence: Vec<Evidence>,
}

impl AnalysisReport {
    fn new(verdict: Verdict, evidence: Vec<Evidence>) -> AnalysisReport {
        AnalysisReport { verdict, evidence }
    }

    /// Plies until the game ends for a proven verdict: a five now or after a
    /// double attack for a win, the opponent's five next or after their
    /// double attack for a loss.
    pub fn plies_to_end(&self) -> Option<u32> {
        let immediate = self.evidence.iter().any(|e| matches!(e.class, "S5" | "S4"));
        match self.verdict {
            Verdict::WinInSight(_) => Some(if immediate { 1 } else { 3 }),
            Verdict::LossCertain => Some(if immediate { 2 } else { 4 }),
            _ => None,
        }
    }

    pub fn to_json(&self, b: &Board) -> Value {
        let rc = |s: &Square| {
            let (r, c) = b.row_col(*s);
            json!({"row": r, "col": c})
        };
        json!({
            "verdict": self.verdict.kind().name(),
            "moves": self.verdict.moves().iter().map(rc).collect::<Vec<_>>(),
            "evidence": self.evidence.iter().map(|e| {
                let (r, c) = b.row_col(e.square);
                json!({"row": r, "col": c, "class": e.class, "owner": e.owner.name()})
            }).collect::<Vec<_>>(),
        })
    }
}

fn check_playable(b: &Board) -> Result<()> {
    if b.is_over() {
        return Err(Error::GameOver);
    }
    Ok(())
}

fn sorted(set: impl IntoIterator<Item = Square>) -> Vec<Square> {
    set.into_iter().collect::<BTreeSet<_>>().into_iter().collect()
}

fn intersect_all(sets: &[BTreeSet<Square>]) -> BTreeSet<Square> {
    let mut it = sets.iter();
    let Some(first) = it.next() else { return BTreeSet::new() };
    it.fold(first.clone(), |acc, s| acc.intersection(s).copied().collect())
}

/// Squares where `c` filling `s` makes a line of `class`.
fn squares_with(b: &Board, c: Color, class: LineClass) -> Vec<Square> {
    b.candidates().filter(|&s| b.classes(s, c).contains(&class)).collect()
}

/// Potential double fours and cross fours of `c`, each with its defence.
fn double_attacks(b: &Board, c: Color) -> Vec<(Square, &'static str, BTreeSet<Square>)> {
    let mut out = Vec::new();
    for s in b.candidates() {
        for d in 0..4 {
            let info = b.line_info(s, c, d);
            if info.class == LineClass::D4 {
                out.push((s, "D4", b.line_squares(s, d, info.defence).into_iter().collect()));
            }
        }
        if b.cross(s, c).kind == CrossKind::C44 || four_dirs(b, s, c).len() >= 2 {
            out.push((s, "C44", cross_four_defence(b, s, c)));
        }
    }
    out
}

fn four_dirs(b: &Board, s: Square, c: Color) -> Vec<usize> {
    (0..4).filter(|&d| matches!(b.line_class(s, c, d), LineClass::S4 | LineClass::D4)).collect()
}

/// Defence of a potential cross four at `s`: the crossing square, plus the
/// defence of each four when exactly two simple fours cross. A double four
/// in the cross, or a third four, leaves only the crossing square.
pub fn cross_four_defence(b: &Board, s: Square, c: Color) -> BTreeSet<Square> {
    let dirs = four_dirs(b, s, c);
    let mut out = BTreeSet::from([s]);
    if dirs.len() == 2 && dirs.iter().all(|&d| b.line_class(s, c, d) == LineClass::S4) {
        for d in dirs {
            out.extend(b.line_squares(s, d, b.line_info(s, c, d).defence));
        }
    }
    out
}

fn evidence(squares: &[Square], class: &'static str, owner: Color) -> Vec<Evidence> {
    squares.iter().map(|&square| Evidence { square, class, owner }).collect()
}

/// Verdict for the side to move from the potential lines of both colors.
pub fn analyze_board(b: &Board) -> Result<AnalysisReport> {
    check_playable(b)?;
    let x = b.to_move();
    let y = x.opp();

    let s5x = squares_with(b, x, LineClass::S5);
    if !s5x.is_empty() {
        let ev = evidence(&s5x, "S5", x);
        return Ok(AnalysisReport::new(Verdict::WinInSight(s5x), ev));
    }
    let s5y = squares_with(b, y, LineClass::S5);
    match s5y.len() {
        0 => {}
        1 => return Ok(AnalysisReport::new(Verdict::Forced(s5y.clone()), evidence(&s5y, "S5", y))),
        _ => return Ok(AnalysisReport::new(Verdict::LossCertain, evidence(&s5y, "S5", y))),
    }

    let dx = double_attacks(b, x);
    if !dx.is_empty() {
        let ev = dx.iter().map(|&(square, class, _)| Evidence { square, class, owner: x }).collect();
        return Ok(AnalysisReport::new(Verdict::WinInSight(sorted(dx.iter().map(|a| a.0))), ev));
    }
    let dy = double_attacks(b, y);
    if !dy.is_empty() {
        let defences: Vec<BTreeSet<Square>> = dy.iter().map(|a| a.2.clone()).collect();
        let s4x: Vec<Square> = squares_with(b, x, LineClass::S4)
            .into_iter()
            .filter(|&t| !useless_counter_four(b, t))
            .collect();
        let mut ev: Vec<Evidence> = dy.iter().map(|&(square, class, _)| Evidence { square, class, owner: y }).collect();
        ev.extend(evidence(&s4x, "S4", x));
        let moves = sorted(intersect_all(&defences).into_iter().chain(s4x));
        let verdict = if moves.is_empty() { Verdict::LossCertain } else { Verdict::Forced(moves) };
        return Ok(AnalysisReport::new(verdict, ev));
    }
    Ok(AnalysisReport::new(Verdict::Open, Vec::new()))
}

/// A four made at `t` by the side to move is useless when the single square
/// that stops it gives the opponent a double four or cross four.
/// Squares where the defender must play to stop the attacker's quickest
/// attack: the attacker's five squares, else the common defence of its
/// double attacks. `None` when the attacker has neither.
pub fn attack_defence(b: &Board, attacker: Color) -> Option<BTreeSet<Square>> {
    let s5 = squares_with(b, attacker, LineClass::S5);
    if !s5.is_empty() {
        return Some(s5.into_iter().collect());
    }
    let da = double_attacks(b, attacker);
    if da.is_empty() {
        return None;
    }
    let defences: Vec<BTreeSet<Square>> = da.into_iter().map(|a| a.2).collect();
    Some(intersect_all(&defences))
}

fn useless_counter_four(b: &Board, t: Square) -> bool {
    let x = b.to_move();
    let replies: BTreeSet<Square> = (0..4)
        .filter(|&d| b.line_class(t, x, d) == LineClass::S4)
        .flat_map(|d| b.line_squares(t, d, b.line_info(t, x, d).defence))
        .collect();
    let [u] = replies.into_iter().collect::<Vec<_>>()[..] else { return false };
    let mut after = b.clone();
    after.apply(Move { square: t, color: x });
    (0..4).any(|d| after.line_class(u, x.opp(), d) == LineClass::D4) || after.cross(u, x.opp()).kind == CrossKind::C44
}

/// Five aligned squares with no stone of the other color.
#[derive(Clone, Debug)]
struct Block {
    squares: [Square; 5],
    dir: usize,
    empties: Vec<Square>,
}

fn live_blocks(b: &Board, c: Color, degree: usize) -> Vec<Block> {
    let mut out = Vec::new();
    for s in b.squares() {
        for dir in 0..DIRS.len() {
            let Some(sq) = (0..5).map(|k| b.step(s, dir, k)).collect::<Option<Vec<_>>>() else { continue };
            if sq.iter().any(|&t| b.stone(t).color() == Some(c.opp())) {
                continue;
            }
            let empties: Vec<Square> = sq.iter().copied().filter(|&t| b.is_empty(t)).collect();
            if 5 - empties.len() == degree {
                out.push(Block { squares: sq.try_into().unwrap(), dir, empties });
            }
        }
    }
    out
}

/// A weak three: two simple threes meeting in exactly one empty square.
#[derive(Clone, Debug)]
struct WeakThree {
    trigger: Square,
    dirs: (usize, usize),
}

fn weak_threes(b: &Board, threes: &[Block]) -> Vec<WeakThree> {
    let mut out = Vec::new();
    for (i, p) in threes.iter().enumerate() {
        for q in &threes[i + 1..] {
            let shared: Vec<Square> = p.squares.iter().copied().filter(|s| q.squares.contains(s)).collect();
            let empty: Vec<Square> = shared.iter().copied().filter(|&s| b.is_empty(s)).collect();
            if empty.len() == 1 {
                out.push(WeakThree { trigger: empty[0], dirs: (p.dir, q.dir) });
            }
        }
    }
    out
}

fn coord(b: &Board, s: Square) -> Coord {
    let (r, c) = b.row_col(s);
    Coord::new(r as i32, c as i32)
}

/// Own and empty squares of the nine-square line through `s`, with the
/// stones of `c` shown as `X`.
fn line_pattern(b: &Board, s: Square, c: Color, dir: usize) -> RestrictedPattern {
    let cells: [LineCell; LINE_LEN] = b.actual_line(s, c, dir);
    RestrictedPattern::from_cells((0..LINE_LEN).filter_map(|i| {
        let t = b.step(s, dir, i as i32 - CENTER as i32)?;
        match cells[i] {
            LineCell::Own => Some((coord(b, t), Cell::X)),
            LineCell::Empty => Some((coord(b, t), Cell::Empty)),
            _ => None,
        }
    }))
}

/// Defence of a weak three, found by the oracle on the lines that carry it.
fn weak_three_defence(b: &Board, w: &WeakThree, c: Color) -> Result<BTreeSet<Square>> {
    let mut p = line_pattern(b, w.trigger, c, w.dirs.0);
    if w.dirs.1 != w.dirs.0 {
        p = p.union(&line_pattern(b, w.trigger, c, w.dirs.1))?;
    }
    match classify_pattern(&p, Player::X)? {
        PatternClass::Attack { defence, .. } => {
            let cols = b.cols() as i32;
            Ok(defence.into_iter().map(|k| Square((k.row * cols + k.col) as u16)).collect())
        }
        other => Err(Error::Contract(format!("weak three classified as {}", other.label()))),
    }
}

/// Verdict for the side to move from the stones actually on the board.
pub fn analyze_board_actual(b: &Board) -> Result<AnalysisReport> {
    check_playable(b)?;
    let x = b.to_move();
    let y = x.opp();

    let fours_x = live_blocks(b, x, 4);
    if !fours_x.is_empty() {
        let moves = sorted(fours_x.iter().flat_map(|k| k.empties.clone()));
        let ev = evidence(&moves, "S4", x);
        return Ok(AnalysisReport::new(Verdict::WinInSight(moves), ev));
    }
    let fours_y = sorted(live_blocks(b, y, 4).iter().flat_map(|k| k.empties.clone()));
    match fours_y.len() {
        0 => {}
        1 => return Ok(AnalysisReport::new(Verdict::Forced(fours_y.clone()), evidence(&fours_y, "S4", y))),
        _ => return Ok(AnalysisReport::new(Verdict::LossCertain, evidence(&fours_y, "S4", y))),
    }

    let threes_x = live_blocks(b, x, 3);
    let w3x = weak_threes(b, &threes_x);
    if !w3x.is_empty() {
        let moves = sorted(w3x.iter().map(|w| w.trigger));
        let ev = evidence(&moves, "W3", x);
        return Ok(AnalysisReport::new(Verdict::WinInSight(moves), ev));
    }
    let threes_y = live_blocks(b, y, 3);
    let w3y = weak_threes(b, &threes_y);
    if w3y.is_empty() {
        return Ok(AnalysisReport::new(Verdict::Open, Vec::new()));
    }
    let defences = w3y.iter().map(|w| weak_three_defence(b, w, y)).collect::<Result<Vec<_>>>()?;
    let y_triggers: BTreeSet<Square> = w3y.iter().map(|w| w.trigger).collect();
        // each simple-three trigger of X with the squares where Y must answer
    let mut answers: BTreeMap<Square, BTreeSet<Square>> = BTreeMap::new();
    for k in &threes_x {
        for &t in &k.empties {
            answers.entry(t).or_default().extend(k.empties.iter().copied().filter(|&u| u != t));
        }
    }
    let mut ev = evidence(&sorted(y_triggers.iter().copied()), "W3", y);
    let mut counters = Vec::new();
    for (t, reply) in answers {
        // useless when Y's forced answer also plays one of Y's weak threes
        if let [u] = reply.into_iter().collect::<Vec<_>>()[..] {
            let mut after = b.clone();
            after.apply(Move { square: t, color: x });
            if weak_threes(&after, &live_blocks(&after, y, 3)).iter().any(|w| w.trigger == u) {
                continue;
            }
        }
        counters.push(t);
    }
    ev.extend(evidence(&counters, "S3", x));
    let moves = sorted(intersect_all(&defences).into_iter().chain(counters));
    let verdict = if moves.is_empty() { Verdict::LossCertain } else { Verdict::Forced(moves) };
    Ok(AnalysisReport::new(verdict, ev))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn board(rows: &[&str], to_move: &str) -> Board {
        let n = rows.len();
        let text = format!("{n}x{n} {to_move}\n{}\n", rows.join("\n"));
        Board::from_dump(&text).unwrap()
    }

    fn rc(b: &Board, moves: &[Square]) -> Vec<(usize, usize)> {
        moves.iter().map(|&s| b.row_col(s)).collect()
    }

    #[test]
    fn own_four_is_a_win() {
        let b = board(&["XXXX.....", ".........", "OOO......", ".........", ".........", ".........", ".........", ".........", "O........"], "black");
        let r = analyze_board(&b).unwrap();
        assert_eq!(r.verdict.kind(), VerdictKind::WinInSight);
        assert_eq!(rc(&b, r.verdict.moves()), [(0, 4)]);
        assert_eq!(analyze_board_actual(&b).unwrap().verdict, r.verdict);
    }

    #[test]
    fn open_opponent_four_is_lost() {
        let b = board(&[".........", ".XXXX....", ".........", "...O.....", "...O.....", "...O.....", ".........", ".........", "........."], "white");
        let r = analyze_board(&b).unwrap();
        assert_eq!(r.verdict, Verdict::LossCertain);
        assert_eq!(rc(&b, &r.evidence.iter().map(|e| e.square).collect::<Vec<_>>()), [(1, 0), (1, 5)]);
        assert_eq!(analyze_board_actual(&b).unwrap().verdict, r.verdict);
    }

    #[test]
    fn closed_opponent_four_is_forced() {
        let b = board(&[".........", "OXXXX....", ".........", "...O.....", "...O.....", ".........", ".........", ".........", "........."], "white");
        let r = analyze_board(&b).unwrap();
        assert_eq!(r.verdict, Verdict::Forced(vec![b.square(1, 5)]));
        assert_eq!(analyze_board_actual(&b).unwrap().verdict, r.verdict);
    }

    #[test]
    fn two_opponent_fives_lose() {
        let b = board(&[".........", "OXXXX....", ".........", "...O.....", "...O.....", "XXXX.....", "O........", "....O....", "....O..O."], "white");
        assert_eq!(analyze_board(&b).unwrap().verdict, Verdict::LossCertain);
        assert_eq!(analyze_board_actual(&b).unwrap().verdict, Verdict::LossCertain);
    }

    #[test]
    fn own_open_three_is_a_win() {
        let b = board(&[".........", ".........", "..XXX....", ".........", ".........", "......O..", "......O..", ".........", "........O"], "black");
        let r = analyze_board(&b).unwrap();
        assert_eq!(rc(&b, r.verdict.moves()), [(2, 1), (2, 5)]);
        assert_eq!(r.verdict.kind(), VerdictKind::WinInSight);
        assert_eq!(analyze_board_actual(&b).unwrap().verdict, r.verdict);
    }

    #[test]
    fn opponent_open_three_forces_its_defence() {
        let b = board(&["...........", "...........", "...........", "...........", "...XXX.....", "...........", "...........", "...........", "........O..", "........O..", "..........."], "white");
        let r = analyze_board(&b).unwrap();
        // the two squares that stop the double three
        assert_eq!(rc(&b, r.verdict.moves()), [(4, 2), (4, 6)]);
        assert_eq!(analyze_board_actual(&b).unwrap().verdict, r.verdict);
    }

    #[test]
    fn finished_game_is_rejected() {
        let b = board(&["XXXXX....", "OOOO.....", ".........", ".........", ".........", ".........", ".........", ".........", "........."], "white");
        assert_eq!(analyze_board(&b), Err(Error::GameOver));
        assert_eq!(analyze_board_actual(&b), Err(Error::GameOver));
    }
}
