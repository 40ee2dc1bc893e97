//! Endgame solvers that try to prove a forced win for the side to move by
//! playing threats only: binary minimax (BMM) and threat-space search (TSS).
//!
//! A victory comes with a proof line of alternating moves. Replaying it
//! reaches a five, or a position whose analysis proves the win: the
//! attacker to move with a win in sight, or the defender to move with a
//! certain loss.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rustc_hash::FxHashMap;
use serde_json::{json, Value};

use crate::analysis::{analyze_board, attack_defence, Verdict};
use crate::board::{Board, Color, Move, Square};
use crate::error::{Error, Result};
use crate::eval_movegen::ScoreTable;
use crate::lines::{CrossKind, LineClass};
use crate::search::SearchLimits;

/// Which threat moves the attacker may play.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ThreatSet {
    /// Moves making S5, D4, S4 or C44.
    pub four_makers: bool,
    /// Moves making D3, W3, C43 or C33.
    pub three_makers: bool,
}

impl Default for ThreatSet {
    fn default() -> ThreatSet {
        ThreatSet::FOURS
    }
}

impl ThreatSet {
    pub const FOURS: ThreatSet = ThreatSet { four_makers: true, three_makers: false };
    pub const FOURS_AND_THREES: ThreatSet = ThreatSet { four_makers: true, three_makers: true };

    pub fn validate(&self) -> Result<()> {
        if !self.four_makers {
            return Err(Error::Config("threat set must include four makers".into()));
        }
        Ok(())
    }

    fn min_line(&self) -> LineClass {
        if self.three_makers { LineClass::W3 } else { LineClass::S4 }
    }

    fn min_cross(&self) -> CrossKind {
        if self.three_makers { CrossKind::C33 } else { CrossKind::C44 }
    }

    /// Whether `c` playing `s` makes a threat of this set.
    pub fn is_threat(&self, b: &Board, s: Square, c: Color) -> bool {
        b.is_empty(s) && (b.best_class(s, c) >= self.min_line() || b.cross(s, c).kind >= self.min_cross())
    }

    /// Threat moves of `c`, strongest ordering score first.
    pub fn moves(&self, b: &Board, c: Color) -> Vec<Square> {
        let scores = ScoreTable::default();
        let mut m: Vec<(Square, i32)> = b
            .candidates()
            .filter(|&s| self.is_threat(b, s, c))
            .map(|s| (s, scores.order_square(b, s)))
            .collect();
        m.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        m.into_iter().map(|m| m.0).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TernaryVerdict {
    /// Proven win with its proof line.
    Victory(Vec<Square>),
    /// Threats exist but no win is proven.
    Good,
    /// No win and no threats, or no win found by the solver.
    Bad,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub nodes: u64,
    pub time_ms: u64,
    /// Combination candidates proposed and confirmed (TSS only).
    pub candidates: u64,
    pub confirmed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    pub verdict: TernaryVerdict,
    /// The limits cut the search, so a Bad verdict is not a proof.
    pub unknown: bool,
    pub stats: SolveStats,
}

impl SolveResult {
    pub fn is_victory(&self) -> bool {
        matches!(self.verdict, TernaryVerdict::Victory(_))
    }

    pub fn to_json(&self, b: &Board) -> Value {
        let (name, line) = match &self.verdict {
            TernaryVerdict::Victory(l) => ("Victory", l.as_slice()),
            TernaryVerdict::Good => ("Good", &[][..]),
            TernaryVerdict::Bad => ("Bad", &[][..]),
        };
        let line: Vec<Value> = line
            .iter()
            .map(|&s| {
                let (r, c) = b.row_col(s);
                json!({"row": r, "col": c})
            })
            .collect();
        json!({
            "verdict": name,
            "unknown": self.unknown,
            "proof": line,
            "nodes": self.stats.nodes,
            "time_ms": self.stats.time_ms,
        })
    }
}

/// Board evaluation used by the solvers, from the side to move.
pub fn classify(b: &Board, ts: ThreatSet) -> Result<TernaryVerdict> {
    let report = analyze_board(b)?;
    let x = b.to_move();
    Ok(match report.verdict {
        Verdict::WinInSight(m) => TernaryVerdict::Victory(vec![m[0]]),
        Verdict::LossCertain => TernaryVerdict::Bad,
        _ if ts.moves(b, x).is_empty() => TernaryVerdict::Bad,
        _ => TernaryVerdict::Good,
    })
}

/// Node, depth and time accounting shared by both solvers.
struct Budget {
    max_depth: u32,
    nodes: u64,
    node_limit: Option<u64>,
    deadline: Option<Instant>,
    aborted: bool,
}

impl Budget {
    fn new(limits: &SearchLimits, started: Instant) -> Budget {
        Budget {
            max_depth: limits.max_depth.unwrap_or(u32::MAX),
            nodes: 0,
            node_limit: limits.nodes,
            deadline: limits.time_ms.map(|ms| started + Duration::from_millis(ms)),
            aborted: false,
        }
    }

    /// Counts a node; true once the budget is spent.
    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if !self.aborted {
            if self.node_limit.is_some_and(|n| self.nodes > n) {
                self.aborted = true;
            } else if self.nodes % 256 == 0 {
                self.aborted = self.deadline.is_some_and(|d| Instant::now() >= d);
            }
        }
        self.aborted
    }
}

fn start(b: &Board, ts: ThreatSet, limits: &SearchLimits) -> Result<()> {
    ts.validate()?;
    limits.validate()?;
    if b.is_over() {
        return Err(Error::GameOver);
    }
    Ok(())
}

fn play(b: &mut Board, s: Square) {
    let mv = Move { square: s, color: b.to_move() };
    b.apply(mv);
}

fn prepend(s: Square, line: Vec<Square>) -> Vec<Square> {
    std::iter::once(s).chain(line).collect()
}

/// Outcome of a subtree and whether the limits cut it.
type Proof = (Option<Vec<Square>>, bool);

struct Bmm {
    ts: ThreatSet,
    budget: Budget,
    memo: FxHashMap<u64, Option<Vec<Square>>>,
}

impl Bmm {
    /// Attacker to move: one winning child suffices.
    fn max_node(&mut self, b: &mut Board, ply: u32) -> Proof {
        if self.budget.tick() {
            return (None, true);
        }
        if let Some(p) = self.memo.get(&b.hash()) {
            return (p.clone(), false);
        }
        if b.winner().is_some() || b.is_full() {
            return (None, false);
        }
        let x = b.to_move();
        let children = match analyze_board(b).expect("game in progress").verdict {
            Verdict::WinInSight(m) => return (Some(vec![m[0]]), false),
            Verdict::LossCertain => return (None, false),
            Verdict::Forced(m) => m,
            Verdict::Open => self.ts.moves(b, x),
        };
        if children.is_empty() {
            return (None, false);
        }
        if ply >= self.budget.max_depth {
            return (None, true);
        }
        let mut cut = false;
        let mut proof = None;
        for s in children {
            play(b, s);
            let (p, c) = self.min_node(b, ply + 1);
            b.unmake_move().expect("move to undo");
            cut |= c;
            if let Some(line) = p {
                proof = Some(prepend(s, line));
                break;
            }
        }
        if !cut {
            self.memo.insert(b.hash(), proof.clone());
        }
        (proof, cut)
    }

    /// Defender to move: every forced reply must lose.
    fn min_node(&mut self, b: &mut Board, ply: u32) -> Proof {
        if self.budget.tick() {
            return (None, true);
        }
        if let Some(p) = self.memo.get(&b.hash()) {
            return (p.clone(), false);
        }
        if b.winner().is_some() {
            return (Some(Vec::new()), false);
        }
        if b.is_full() {
            return (None, false);
        }
        let replies = match analyze_board(b).expect("game in progress").verdict {
            Verdict::LossCertain => return (Some(Vec::new()), false),
            Verdict::Forced(m) => m,
            _ => return (None, false),
        };
        if ply >= self.budget.max_depth {
            return (None, true);
        }
        let mut cut = false;
        let mut main: Option<Vec<Square>> = None;
        let mut refuted = false;
        for s in replies {
            play(b, s);
            let (p, c) = self.max_node(b, ply + 1);
            b.unmake_move().expect("move to undo");
            cut |= c;
            match p {
                Some(line) => {
                    main.get_or_insert_with(|| prepend(s, line));
                }
                None => {
                    refuted = true;
                    break;
                }
            }
        }
        let proof = if refuted { None } else { main };
        if !cut {
            self.memo.insert(b.hash(), proof.clone());
        }
        (proof, cut)
    }
}

fn finish(proof: Proof, nodes: u64, started: Instant) -> SolveResult {
    let (p, cut) = proof;
    let verdict = p.map_or(TernaryVerdict::Bad, TernaryVerdict::Victory);
    let unknown = cut && verdict == TernaryVerdict::Bad;
    let stats = SolveStats { nodes, time_ms: started.elapsed().as_millis() as u64, ..SolveStats::default() };
    SolveResult { verdict, unknown, stats }
}

/// Binary minimax: the attacker plays threats of `ts` (or its forced
/// defences), the defender every reply analysis leaves it. The first
/// winning attacker move or refuting defender move closes a node.
pub fn bmm_solve(b: &Board, ts: ThreatSet, limits: &SearchLimits) -> Result<SolveResult> {
    start(b, ts, limits)?;
    let started = Instant::now();
    let mut work = b.clone();
    let mut bmm = Bmm { ts, budget: Budget::new(limits, started), memo: FxHashMap::default() };
    let max_depth = bmm.budget.max_depth;
    // deepen one attacker move at a time so short wins are found first
    let mut depth = 1;
    let proof = loop {
        bmm.budget.max_depth = depth.min(max_depth);
        let (p, cut) = bmm.max_node(&mut work, 0);
        if p.is_some() || !cut || bmm.budget.aborted || depth >= max_depth {
            break (p, cut);
        }
        depth += 2;
    };
    Ok(finish(proof, bmm.budget.nodes, started))
}

struct Tss<'a> {
    ts: ThreatSet,
    budget: Budget,
    root: &'a Board,
    candidates: u64,
    confirmed: u64,
}

/// A threat line created by the attacker: trigger square and direction.
type Trigger = (Square, usize);

impl Tss<'_> {
    /// Threat lines through the last attacker stone: empty squares whose
    /// fill makes an attack on that line.
    fn triggers_through(&self, b: &Board, t: Square, x: Color) -> Vec<Trigger> {
        let mut out = Vec::new();
        for d in 0..4 {
            for k in -4..=4 {
                if let Some(g) = b.step(t, d, k).filter(|&g| b.is_empty(g)) {
                    if b.line_class(g, x, d) >= self.ts.min_line() {
                        out.push((g, d));
                    }
                }
            }
        }
        out
    }

    /// Squares that trigger two registered threats on different lines whose
    /// defences, once the trigger is played, do not overlap.
    fn combinations(&self, b: &Board, registry: &[Trigger], x: Color) -> Vec<Square> {
        let mut by_square: FxHashMap<Square, BTreeSet<usize>> = FxHashMap::default();
        for &(g, d) in registry {
            if b.is_empty(g) && b.line_class(g, x, d) >= self.ts.min_line() {
                by_square.entry(g).or_default().insert(d);
            }
        }
        let mut out: Vec<Square> = by_square
            .into_iter()
            .filter(|(g, dirs)| {
                let defences: Vec<BTreeSet<Square>> = dirs
                    .iter()
                    .map(|&d| b.line_squares(*g, d, b.line_info(*g, x, d).defence).into_iter().collect())
                    .collect();
                defences.len() >= 2
                    && defences
                        .iter()
                        .enumerate()
                        .any(|(i, a)| defences[i + 1..].iter().any(|b| a.is_disjoint(b)))
            })
            .map(|(g, _)| g)
            .collect();
        out.sort();
        out
    }

    fn confirm(&mut self, xs: &[Square]) -> Option<Vec<Square>> {
        self.candidates += 1;
        let mut real = self.root.clone();
        let cap = 2 * xs.len() as u32 + 8;
        let line = self.replay_x(&mut real, xs, 0, 0, cap)?;
        self.confirmed += 1;
        Some(line)
    }

    /// Attacker to move in the real game: follow the candidate sequence,
    /// answering single forced replies as they come.
    fn replay_x(&mut self, b: &mut Board, xs: &[Square], i: usize, ply: u32, cap: u32) -> Option<Vec<Square>> {
        if self.budget.tick() || b.winner().is_some() || b.is_full() || ply >= cap {
            return None;
        }
        let x = b.to_move();
        let (m, next) = match analyze_board(b).expect("game in progress").verdict {
            Verdict::WinInSight(m) => return Some(vec![m[0]]),
            Verdict::Forced(m) if m.len() == 1 => (m[0], i + usize::from(xs.get(i) == Some(&m[0]))),
            Verdict::Open if i < xs.len() && self.ts.is_threat(b, xs[i], x) => (xs[i], i + 1),
            _ => return None,
        };
        play(b, m);
        let rest = self.replay_y(b, xs, next, ply + 1, cap);
        b.unmake_move().expect("move to undo");
        Some(prepend(m, rest?))
    }

    /// Defender to move in the real game: every forced reply must fail.
    fn replay_y(&mut self, b: &mut Board, xs: &[Square], i: usize, ply: u32, cap: u32) -> Option<Vec<Square>> {
        if self.budget.tick() {
            return None;
        }
        if b.winner().is_some() {
            return Some(Vec::new());
        }
        if b.is_full() {
            return None;
        }
        let replies = match analyze_board(b).expect("game in progress").verdict {
            Verdict::LossCertain => return Some(Vec::new()),
            Verdict::Forced(m) => m,
            _ => return None,
        };
        let mut main = None;
        for r in replies {
            play(b, r);
            let line = self.replay_x(b, xs, i, ply + 1, cap);
            b.unmake_move().expect("move to undo");
            main.get_or_insert(prepend(r, line?));
        }
        main
    }

    /// Attacker to move on a board where the defender has filled every
    /// defence square at once. `last` limits the threats to those the last
    /// attacker stone created.
    fn search(&mut self, b: &Board, seq: &mut Vec<Square>, last: Option<Square>, registry: &mut Vec<Trigger>, ply: u32) -> Proof {
        if self.budget.tick() {
            return (None, true);
        }
        if b.winner().is_some() || b.is_full() {
            return (None, false);
        }
        let x = b.to_move();
        match analyze_board(b).expect("game in progress").verdict {
            Verdict::WinInSight(m) => {
                seq.push(m[0]);
                let p = self.confirm(seq);
                seq.pop();
                return (p, false);
            }
            Verdict::Open => {}
            _ => return (None, false),
        }
        for g in self.combinations(b, registry, x) {
            seq.push(g);
            let p = self.confirm(seq);
            seq.pop();
            if p.is_some() {
                return (p, false);
            }
        }
        let threats: Vec<Square> = self
            .ts
            .moves(b, x)
            .into_iter()
            .filter(|&s| last.is_none_or(|t| shares_line(b, s, t)))
            .collect();
        if threats.is_empty() {
            return (None, false);
        }
        if ply + 2 > self.budget.max_depth {
            return (None, true);
        }
        let mut cut = false;
        for t in threats {
            let mut next = b.clone();
            play(&mut next, t);
            seq.push(t);
            let p = match attack_defence(&next, x) {
                _ if next.winner().is_some() => self.confirm(seq),
                Some(d) if d.is_empty() => self.confirm(seq),
                Some(d) => {
                    next.fill(&d.into_iter().collect::<Vec<_>>(), x.opp());
                    if next.winner().is_some() || next.is_full() {
                        None
                    } else {
                        let mark = registry.len();
                        registry.extend(self.triggers_through(&next, t, x));
                        let (p, c) = self.search(&next, seq, Some(t), registry, ply + 2);
                        registry.truncate(mark);
                        cut |= c;
                        p
                    }
                }
                None => None,
            };
            seq.pop();
            if p.is_some() {
                return (p, cut);
            }
        }
        (None, cut)
    }
}

fn shares_line(b: &Board, s: Square, t: Square) -> bool {
    (0..4).any(|d| (-4..=4).any(|k| b.step(t, d, k) == Some(s)))
}

/// Threat-space search: the attacker plays threats of `ts`; the defender
/// answers by filling every defence square of the new attack at once.
/// Only threats created by the last attacker stone are followed. A win in
/// sight, or two registered threats sharing a trigger with disjoint
/// defences, is a candidate; it becomes a victory only after replaying the
/// attacker's moves in real alternating play against every forced reply.
pub fn tss_solve(b: &Board, ts: ThreatSet, limits: &SearchLimits) -> Result<SolveResult> {
    start(b, ts, limits)?;
    let started = Instant::now();
    let mut tss = Tss { ts, budget: Budget::new(limits, started), root: b, candidates: 0, confirmed: 0 };
    let proof = tss.search(b, &mut Vec::new(), None, &mut Vec::new(), 0);
    let (candidates, confirmed) = (tss.candidates, tss.confirmed);
    let mut r = finish(proof, tss.budget.nodes, started);
    r.unknown |= tss.budget.aborted && !r.is_victory();
    r.stats.candidates = candidates;
    r.stats.confirmed = confirmed;
    Ok(r)
}
