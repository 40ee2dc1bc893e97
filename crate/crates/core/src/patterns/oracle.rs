use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};

use rustc_hash::FxHashMap;

use super::{Cell, Coord, Player, RestrictedPattern, PATTERN_DIRS};
use crate::error::{Error, Result};

/// Score of a side that has already won; a win in `p` plies scores `WIN - p`.
const WIN: i32 = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_squares: usize,
    pub max_empty: usize,
}

pub const DEFAULT_LIMITS: OracleLimits = OracleLimits { max_squares: 18, max_empty: 14 };

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RestrictedOutcome {
    pub winner: Option<Player>,
    pub plies: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PatternClass {
    Victory { steps: u32 },
    Attack { steps: u32, triggers: BTreeSet<Coord>, defence: BTreeSet<Coord> },
    Threat { steps: u32, triggers: BTreeSet<Coord>, defence_size: usize },
    Generic,
}

impl PatternClass {
    pub fn rank(&self) -> u8 {
        match self {
            PatternClass::Generic => 0,
            PatternClass::Threat { .. } => 1,
            PatternClass::Attack { .. } => 2,
            PatternClass::Victory { .. } => 3,
        }
    }

    pub fn steps(&self) -> Option<u32> {
        match self {
            PatternClass::Victory { steps }
            | PatternClass::Attack { steps, .. }
            | PatternClass::Threat { steps, .. } => Some(*steps),
            PatternClass::Generic => None,
        }
    }

    pub fn defence_size(&self) -> usize {
        match self {
            PatternClass::Attack { defence, .. } => defence.len(),
            PatternClass::Threat { defence_size, .. } => *defence_size,
            _ => 0,
        }
    }

    pub fn is_victory(&self) -> bool {
        matches!(self, PatternClass::Victory { .. })
    }

    pub fn is_attack(&self) -> bool {
        matches!(self, PatternClass::Attack { .. })
    }

    pub fn is_threat(&self) -> bool {
        matches!(self, PatternClass::Threat { .. })
    }

    /// Short label such as `V1`, `A2`, `T3` or `G`.
    pub fn label(&self) -> String {
        match self {
            PatternClass::Victory { steps } => format!("V{steps}"),
            PatternClass::Attack { steps, .. } => format!("A{steps}"),
            PatternClass::Threat { steps, .. } => format!("T{steps}"),
            PatternClass::Generic => "G".into(),
        }
    }
}

/// Orders by category, then fewer steps, then smaller defence. `Greater`
/// means `a` is stronger.
pub fn strength_compare(a: &PatternClass, b: &PatternClass) -> Ordering {
    let key = |c: &PatternClass| {
        (c.rank(), std::cmp::Reverse(c.steps().unwrap_or(0)), std::cmp::Reverse(c.defence_size()))
    };
    key(a).cmp(&key(b))
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (m != 0).then(|| {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            i
        })
    })
}

/// Exact solver for the game restricted to one set of squares. Stone
/// placements are bit masks over the squares in row-major order, and values
/// are memoized across every query on the same square set.
pub struct Solver {
    coords: Vec<Coord>,
    index: HashMap<Coord, usize>,
    blocks: Vec<u64>,
    all: u64,
    memo: FxHashMap<(u64, u64), i16>,
}

impl Solver {
    pub fn new(p: &RestrictedPattern, limits: OracleLimits) -> Result<Solver> {
        if p.len() > limits.max_squares.min(64) {
            return Err(Error::Capacity(format!("{} squares, cap {}", p.len(), limits.max_squares)));
        }
        let empty = p.empty_count();
        if empty > limits.max_empty {
            return Err(Error::Capacity(format!("{empty} empty squares, cap {}", limits.max_empty)));
        }
        let coords: Vec<Coord> = p.squares().collect();
        let index: HashMap<Coord, usize> = coords.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut blocks = Vec::new();
        for &c in &coords {
            for (dr, dc) in PATTERN_DIRS {
                let squares: Option<Vec<usize>> =
                    (0..5).map(|k| index.get(&c.offset(dr * k, dc * k)).copied()).collect();
                if let Some(sq) = squares {
                    blocks.push(sq.iter().fold(0u64, |m, &i| m | 1 << i));
                }
            }
        }
        let all = if coords.len() == 64 { u64::MAX } else { (1u64 << coords.len()) - 1 };
        Ok(Solver { coords, index, blocks, all, memo: FxHashMap::default() })
    }

    pub fn coord(&self, bit: usize) -> Coord {
        self.coords[bit]
    }

    pub fn bit(&self, c: Coord) -> Option<u64> {
        self.index.get(&c).map(|&i| 1u64 << i)
    }

    pub fn mask(&self, p: &RestrictedPattern, cell: Cell) -> u64 {
        p.iter()
            .filter(|&(_, v)| v == cell)
            .filter_map(|(c, _)| self.bit(c))
            .fold(0, |m, b| m | b)
    }

    pub fn coords_of(&self, m: u64) -> BTreeSet<Coord> {
        bits(m).map(|i| self.coords[i]).collect()
    }

    pub fn blocks(&self) -> &[u64] {
        &self.blocks
    }

    fn has_five(&self, stones: u64) -> bool {
        self.blocks.iter().any(|&b| b & stones == b)
    }

    /// Value for the side to move holding `me` against `them`: `WIN - p`
    /// for a win in `p` plies, `-(WIN - p)` for a loss, 0 for no win.
    pub fn value(&mut self, me: u64, them: u64) -> i32 {
        if self.has_five(them) {
            return -WIN;
        }
        if self.has_five(me) {
            return WIN;
        }
        if let Some(&v) = self.memo.get(&(me, them)) {
            return v as i32;
        }
        let v = self.search(me, them);
        self.memo.insert((me, them), v as i16);
        v
    }

    fn search(&mut self, me: u64, them: u64) -> i32 {
        let empty = self.all & !(me | them);
        let mut live = 0u64;
        let mut threats = 0u64;
        for &b in &self.blocks {
            let mine = b & me;
            let theirs = b & them;
            if theirs == 0 && mine.count_ones() == 4 {
                return WIN - 1;
            }
            if mine == 0 && theirs.count_ones() == 4 {
                threats |= b & !them;
            }
            if mine == 0 || theirs == 0 {
                live |= b;
            }
        }
        // Squares outside every live block can never be part of a five, and an
        // extra stone never hurts its owner, so such moves are dominated.
        let moves = empty & live;
        if moves == 0 {
            return 0;
        }
        let candidates = match threats.count_ones() {
            0 => moves,
            1 => threats,
            _ => return -(WIN - 2),
        };
        let mut best = i32::MIN;
        for i in bits(candidates) {
            let c = self.value(them, me | 1 << i);
            best = best.max(-(c - c.signum()));
        }
        best
    }

    /// Number of owner stones needed to win as second player, when the
    /// position `(x, o)` is a victory.
    pub fn victory_steps(&mut self, x: u64, o: u64) -> Option<u32> {
        if self.value(x, o) <= 0 {
            return None;
        }
        let second = self.value(o, x);
        (second < 0).then(|| ((WIN + second) / 2) as u32)
    }

    /// `(steps, triggers, defence)` when `(x, o)` is an attack for x.
    pub fn attack_info(&mut self, x: u64, o: u64) -> Option<(u32, u64, u64)> {
        if self.value(x, o) <= 0 || self.victory_steps(x, o).is_some() {
            return None;
        }
        let empty = self.all & !(x | o);
        let mut triggers = 0;
        let mut best = u32::MAX;
        for i in bits(empty) {
            if let Some(n) = self.victory_steps(x | 1 << i, o) {
                triggers |= 1 << i;
                best = best.min(n);
            }
        }
        debug_assert!(triggers != 0, "a first-player win always has a victory trigger");
        let defence = bits(empty)
            .filter(|&i| self.value(x, o | 1 << i) <= 0)
            .fold(0u64, |m, i| m | 1 << i);
        Some((best + 1, triggers, defence))
    }

    pub fn classify_masks(&mut self, x: u64, o: u64) -> PatternClass {
        if let Some(steps) = self.victory_steps(x, o) {
            return PatternClass::Victory { steps };
        }
        if let Some((steps, t, d)) = self.attack_info(x, o) {
            return PatternClass::Attack { steps, triggers: self.coords_of(t), defence: self.coords_of(d) };
        }
        let empty = self.all & !(x | o);
        let mut triggers = 0u64;
        let mut best: Option<(u32, usize)> = None;
        for i in bits(empty) {
            if let Some((n, _, d)) = self.attack_info(x | 1 << i, o) {
                triggers |= 1 << i;
                let key = (n, d.count_ones() as usize);
                best = Some(best.map_or(key, |b| b.min(key)));
            }
        }
        match best {
            Some((n, size)) => PatternClass::Threat {
                steps: n + 1,
                triggers: self.coords_of(triggers),
                defence_size: size,
            },
            None => PatternClass::Generic,
        }
    }
}

fn owner_view(p: &RestrictedPattern, owner: Player) -> RestrictedPattern {
    match owner {
        Player::X => p.clone(),
        Player::Y => p.swapped(),
    }
}

/// Result of the game restricted to `p` with `first` to move.
pub fn restricted_winner(p: &RestrictedPattern, first: Player) -> Result<RestrictedOutcome> {
    let mut s = Solver::new(p, DEFAULT_LIMITS)?;
    let (me, them) = (s.mask(p, first.stone()), s.mask(p, first.other().stone()));
    let v = s.value(me, them);
    Ok(match v.cmp(&0) {
        Ordering::Greater => RestrictedOutcome { winner: Some(first), plies: (WIN - v) as u32 },
        Ordering::Less => RestrictedOutcome { winner: Some(first.other()), plies: (WIN + v) as u32 },
        Ordering::Equal => RestrictedOutcome { winner: None, plies: 0 },
    })
}

pub fn classify_pattern(p: &RestrictedPattern, owner: Player) -> Result<PatternClass> {
    if !p.is_owned_by(owner) {
        return Err(Error::Domain("pattern holds stones of the other player".into()));
    }
    let q = owner_view(p, owner);
    let mut s = Solver::new(&q, DEFAULT_LIMITS)?;
    let x = s.mask(&q, Cell::X);
    Ok(s.classify_masks(x, 0))
}

/// Defence of the attack created by filling `trigger`.
pub fn threat_defence(p: &RestrictedPattern, owner: Player, trigger: Coord) -> Result<BTreeSet<Coord>> {
    if p.get(trigger) != Some(Cell::Empty) {
        return Err(Error::Precondition(format!("{trigger} is not an empty square of the pattern")));
    }
    match classify_pattern(&p.filled_with(trigger, owner), owner)? {
        PatternClass::Attack { defence, .. } => Ok(defence),
        other => Err(Error::Precondition(format!("{trigger} makes a {} not an attack", other.label()))),
    }
}

/// True when removing any single square leaves a strictly weaker pattern.
pub fn is_minimal(p: &RestrictedPattern, owner: Player) -> Result<bool> {
    let class = classify_pattern(p, owner)?;
    if class == PatternClass::Generic {
        return Err(Error::Domain("generic patterns have no minimality".into()));
    }
    for c in p.squares() {
        let rest = classify_pattern(&p.without(c), owner)?;
        if strength_compare(&rest, &class) != Ordering::Less {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Blocks of the pattern: five consecutive aligned squares all present.
pub fn pattern_blocks(p: &RestrictedPattern) -> Vec<[Coord; 5]> {
    let mut out = Vec::new();
    for c in p.squares() {
        for (dr, dc) in PATTERN_DIRS {
            let block: [Coord; 5] = std::array::from_fn(|k| c.offset(dr * k as i32, dc * k as i32));
            if block.iter().all(|&s| p.contains(s)) {
                out.push(block);
            }
        }
    }
    out
}

pub(crate) fn block_degree(p: &RestrictedPattern, block: &[Coord; 5], owner: Player) -> Option<usize> {
    let mut n = 0;
    for &s in block {
        match p.get(s)? {
            Cell::Empty => {}
            v if v == owner.stone() => n += 1,
            _ => return None,
        }
    }
    Some(n)
}

/// Blocks holding exactly three owner stones and no other stones.
pub fn s3_blocks(p: &RestrictedPattern, owner: Player) -> Vec<[Coord; 5]> {
    pattern_blocks(p)
        .into_iter()
        .filter(|b| block_degree(p, b, owner) == Some(3))
        .collect()
}

/// Square sets of pairs of S3 blocks that share exactly one empty square,
/// each checked to be an attack by the oracle.
pub fn w3_placements(p: &RestrictedPattern, owner: Player) -> Result<Vec<BTreeSet<Coord>>> {
    let blocks = s3_blocks(p, owner);
    let mut out = Vec::new();
    for (i, a) in blocks.iter().enumerate() {
        for b in &blocks[i + 1..] {
            let shared: Vec<Coord> = a.iter().filter(|s| b.contains(s)).copied().collect();
            let shared_empty = shared.iter().filter(|&&s| p.get(s) == Some(Cell::Empty)).count();
            if shared_empty != 1 {
                continue;
            }
            let squares: BTreeSet<Coord> = a.iter().chain(b.iter()).copied().collect();
            let sub = p.restricted_to(squares.iter().copied());
            if classify_pattern(&sub, owner)?.is_attack() && !out.contains(&squares) {
                out.push(squares);
            }
        }
    }
    Ok(out)
}

/// Catalog attacks found inside `p`: every S4 block and every W3. A D3 is
/// the union of two W3, so its pairings are already covered by its parts.
pub fn attack_placements(p: &RestrictedPattern, owner: Player) -> Result<Vec<BTreeSet<Coord>>> {
    let mut out: Vec<BTreeSet<Coord>> = pattern_blocks(p)
        .into_iter()
        .filter(|b| block_degree(p, b, owner) == Some(4))
        .map(|b| b.into_iter().collect())
        .collect();
    out.extend(w3_placements(p, owner)?);
    Ok(out)
}

/// Two catalog attacks in `p` whose intersection has no filled squares.
pub fn irrational_double_attack(p: &RestrictedPattern, owner: Player) -> Result<bool> {
    let placements = attack_placements(p, owner)?;
    for (i, a) in placements.iter().enumerate() {
        for b in &placements[i + 1..] {
            if a != b && a.intersection(b).all(|&s| p.get(s) == Some(Cell::Empty)) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}
