//! Nine-square lines and their classification.
//!
//! A line is nine aligned squares. For an empty board square we look at the
//! line through it in each direction and ask what the line becomes if the
//! square is filled: that is a *potential* line. The eight peripheral cells
//! fit in a 16-bit [`LineCode`] (two bits per cell), so every potential line
//! is classified once at startup into a [`LineTable`] of 2^16 entries.
//!
//! Classification works on the five blocks (five-square windows) of the line
//! that contain the center. `G` is the largest degree among the live blocks
//! and `N` the number of blocks reaching it; pairs of top blocks are compared
//! through [`Tracker`] vectors.

use std::fmt;
use std::path::Path;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};

pub const LINE_LEN: usize = 9;
pub const CENTER: usize = 4;
pub const TABLE_SIZE: usize = 1 << 16;

/// Contents of one line square relative to the subject color.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum LineCell {
    Empty = 0,
    Own = 1,
    Opp = 2,
    Outside = 3,
}

impl LineCell {
    #[inline]
    pub const fn from_bits(bits: u16) -> LineCell {
        match bits & 3 {
            0 => LineCell::Empty,
            1 => LineCell::Own,
            2 => LineCell::Opp,
            _ => LineCell::Outside,
        }
    }

    /// `X` own, `O` (or `0`) opponent, `+`/`.`/`-` empty, `#` outside.
    pub fn from_char(c: char) -> Option<LineCell> {
        match c {
            'X' | 'x' => Some(LineCell::Own),
            'O' | 'o' | '0' => Some(LineCell::Opp),
            '+' | '.' | '-' => Some(LineCell::Empty),
            '#' => Some(LineCell::Outside),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            LineCell::Empty => '+',
            LineCell::Own => 'X',
            LineCell::Opp => 'O',
            LineCell::Outside => '#',
        }
    }

    fn swapped(self) -> LineCell {
        match self {
            LineCell::Own => LineCell::Opp,
            LineCell::Opp => LineCell::Own,
            other => other,
        }
    }
}

/// Line position (0..9) of peripheral cell `i` (0..8).
#[inline]
pub const fn cell_position(i: usize) -> usize {
    if i < CENTER {
        i
    } else {
        i + 1
    }
}

/// Peripheral cell index for a signed offset from the center (-4..=4, not 0).
#[inline]
pub const fn cell_index(offset: i32) -> usize {
    if offset < 0 {
        (offset + 4) as usize
    } else {
        (offset + 3) as usize
    }
}

/// 16-bit code of the eight peripheral cells; cell `i` sits in bits `2i..2i+2`,
/// ordered from offset -4 to +4.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LineCode(pub u16);

impl LineCode {
    pub fn encode(cells: [LineCell; 8]) -> LineCode {
        LineCode(
            cells
                .iter()
                .enumerate()
                .fold(0u16, |acc, (i, c)| acc | ((*c as u16) << (2 * i))),
        )
    }

    pub fn decode(self) -> [LineCell; 8] {
        std::array::from_fn(|i| self.cell(i))
    }

    #[inline]
    pub fn cell(self, i: usize) -> LineCell {
        LineCell::from_bits(self.0 >> (2 * i))
    }

    #[inline]
    pub fn with_cell(self, i: usize, cell: LineCell) -> LineCode {
        LineCode((self.0 & !(3 << (2 * i))) | ((cell as u16) << (2 * i)))
    }

    /// Outside cells may only form a contiguous run at either end.
    pub fn is_legal(self) -> bool {
        let left_ok = (0..3).all(|i| {
            self.cell(i + 1) != LineCell::Outside || self.cell(i) == LineCell::Outside
        });
        let right_ok = (4..7).all(|i| {
            self.cell(i) != LineCell::Outside || self.cell(i + 1) == LineCell::Outside
        });
        left_ok && right_ok
    }

    pub fn mirrored(self) -> LineCode {
        let cells = self.decode();
        LineCode::encode(std::array::from_fn(|i| cells[7 - i]))
    }

    pub fn color_swapped(self) -> LineCode {
        let cells = self.decode();
        LineCode::encode(std::array::from_fn(|i| cells[i].swapped()))
    }

    /// The full line with `center` placed in the middle.
    pub fn with_center(self, center: LineCell) -> [LineCell; LINE_LEN] {
        std::array::from_fn(|p| match p {
            CENTER => center,
            p if p < CENTER => self.cell(p),
            p => self.cell(p - 1),
        })
    }

    /// Parses a nine character potential line whose center is empty.
    pub fn parse(s: &str) -> Result<LineCode> {
        let cells = parse_line(s)?;
        if cells[CENTER] != LineCell::Empty {
            return Err(Error::Parse(format!("potential line {s:?} needs an empty center")));
        }
        Ok(LineCode::from_line(&cells))
    }

    pub fn from_line(cells: &[LineCell; LINE_LEN]) -> LineCode {
        LineCode::encode(std::array::from_fn(|i| cells[cell_position(i)]))
    }
}

impl fmt::Display for LineCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in self.with_center(LineCell::Empty) {
            write!(f, "{}", c.to_char())?;
        }
        Ok(())
    }
}

/// Parses a nine character line such as `0++XXX++X`.
pub fn parse_line(s: &str) -> Result<[LineCell; LINE_LEN]> {
    let chars: Vec<char> = s.chars().collect();
    if chars.len() != LINE_LEN {
        return Err(Error::Parse(format!("line {s:?} must have {LINE_LEN} cells")));
    }
    let mut cells = [LineCell::Empty; LINE_LEN];
    for (cell, ch) in cells.iter_mut().zip(chars) {
        *cell = LineCell::from_char(ch)
            .ok_or_else(|| Error::Parse(format!("bad line character {ch:?}")))?;
    }
    Ok(cells)
}

/// Line categories, weakest first so that the derived ordering is strength.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
#[repr(u8)]
pub enum LineClass {
    #[default]
    Generic = 0,
    SimpleTwo = 1,
    WeakTwo = 2,
    DoubleTwo = 3,
    S3 = 4,
    W3 = 5,
    D3 = 6,
    S4 = 7,
    D4 = 8,
    S5 = 9,
}

impl LineClass {
    pub const ALL: [LineClass; 10] = [
        LineClass::Generic,
        LineClass::SimpleTwo,
        LineClass::WeakTwo,
        LineClass::DoubleTwo,
        LineClass::S3,
        LineClass::W3,
        LineClass::D3,
        LineClass::S4,
        LineClass::D4,
        LineClass::S5,
    ];

    pub fn from_u8(v: u8) -> Option<LineClass> {
        LineClass::ALL.get(v as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            LineClass::Generic => "Generic",
            LineClass::SimpleTwo => "SimpleTwo",
            LineClass::WeakTwo => "WeakTwo",
            LineClass::DoubleTwo => "DoubleTwo",
            LineClass::S3 => "S3",
            LineClass::W3 => "W3",
            LineClass::D3 => "D3",
            LineClass::S4 => "S4",
            LineClass::D4 => "D4",
            LineClass::S5 => "S5",
        }
    }

    pub fn from_name(s: &str) -> Option<LineClass> {
        LineClass::ALL.iter().copied().find(|c| c.name().eq_ignore_ascii_case(s))
    }

    /// Collapses the double/weak distinction (flex three / flex two).
    pub fn coarse(self) -> LineClass {
        match self {
            LineClass::D3 => LineClass::W3,
            LineClass::DoubleTwo => LineClass::WeakTwo,
            other => other,
        }
    }

    pub fn is_three(self) -> bool {
        matches!(self, LineClass::D3 | LineClass::W3)
    }
}

impl fmt::Display for LineClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Set of line positions (bit `p` for position `p`, 0..9).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct DefenceMask(pub u16);

impl DefenceMask {
    pub const EMPTY: DefenceMask = DefenceMask(0);

    pub fn single(pos: usize) -> DefenceMask {
        DefenceMask(1 << pos)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, pos: usize) -> bool {
        self.0 >> pos & 1 == 1
    }

    pub fn positions(self) -> impl Iterator<Item = usize> {
        (0..LINE_LEN).filter(move |&p| self.contains(p))
    }

    /// Signed offsets from the center.
    pub fn offsets(self) -> impl Iterator<Item = i32> {
        self.positions().map(|p| p as i32 - CENTER as i32)
    }

    pub fn mirrored(self) -> DefenceMask {
        DefenceMask(self.positions().fold(0, |m, p| m | 1 << (LINE_LEN - 1 - p)))
    }
}

impl fmt::Display for DefenceMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in 0..LINE_LEN {
            write!(f, "{}", u8::from(self.contains(p)))?;
        }
        Ok(())
    }
}

/// Per-square count of empty squares across a pair of blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Tracker(pub [u8; LINE_LEN]);

impl Tracker {
    pub fn of(cells: &[LineCell; LINE_LEN], a: usize, b: usize) -> Tracker {
        Tracker(std::array::from_fn(|p| {
            let empty = cells[p] == LineCell::Empty;
            let in_a = (a..a + 5).contains(&p);
            let in_b = (b..b + 5).contains(&p);
            u8::from(empty && in_a) + u8::from(empty && in_b)
        }))
    }

    pub fn sum(&self) -> u32 {
        self.0.iter().map(|&v| v as u32).sum()
    }

    fn counts(&self) -> (usize, usize) {
        let ones = self.0.iter().filter(|&&v| v == 1).count();
        let twos = self.0.iter().filter(|&&v| v == 2).count();
        (ones, twos)
    }

    pub fn support(&self) -> DefenceMask {
        DefenceMask((0..LINE_LEN).fold(0, |m, p| if self.0[p] > 0 { m | 1 << p } else { m }))
    }

    /// Two blocks of degree four with distinct empty squares.
    pub fn is_split_four(&self) -> bool {
        self.counts() == (2, 0)
    }

    /// Two blocks of degree three that make a weak three: one shared empty
    /// square plus one private empty square in each block.
    pub fn is_weak_three(&self) -> bool {
        self.counts() == (2, 1)
    }
}

impl fmt::Display for Tracker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in self.0 {
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Live blocks of a line: those free of opponent and outside cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockScan {
    /// Degree of the block starting at each position, `None` when dead.
    pub degrees: [Option<u8>; 5],
    pub max_degree: u8,
    /// Start positions of the blocks reaching `max_degree`.
    pub top: Vec<usize>,
}

impl BlockScan {
    pub fn of(cells: &[LineCell; LINE_LEN]) -> BlockScan {
        let degrees: [Option<u8>; 5] = std::array::from_fn(|start| {
            let block = &cells[start..start + 5];
            if block.iter().any(|c| matches!(c, LineCell::Opp | LineCell::Outside)) {
                None
            } else {
                Some(block.iter().filter(|&&c| c == LineCell::Own).count() as u8)
            }
        });
        let max_degree = degrees.iter().flatten().copied().max().unwrap_or(0);
        let top = (0..5).filter(|&s| degrees[s] == Some(max_degree) && max_degree > 0).collect();
        BlockScan { degrees, max_degree, top }
    }

    pub fn count(&self) -> usize {
        self.top.len()
    }

    pub fn trackers<'a>(
        &'a self,
        cells: &'a [LineCell; LINE_LEN],
    ) -> impl Iterator<Item = (usize, usize, Tracker)> + 'a {
        self.top.iter().enumerate().flat_map(move |(i, &a)| {
            self.top[i + 1..].iter().map(move |&b| (a, b, Tracker::of(cells, a, b)))
        })
    }
}

/// Class of a line plus the defence squares that go with it.
///
/// For `S4`, `D3` and `W3` the mask is the attack's defence. For `D4` it is
/// the set of squares that break every double four in the line. Other classes
/// carry no defence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct LineInfo {
    pub class: LineClass,
    pub defence: DefenceMask,
}

/// Classifies a line exactly as it stands.
pub fn classify_cells(cells: &[LineCell; LINE_LEN]) -> LineInfo {
    let scan = BlockScan::of(cells);
    let generic = LineInfo::default();
    match (scan.max_degree, scan.count()) {
        (g, _) if g >= 5 => LineInfo { class: LineClass::S5, defence: DefenceMask::EMPTY },
        (4, 1) => {
            let start = scan.top[0];
            let empty = (start..start + 5).find(|&p| cells[p] == LineCell::Empty);
            LineInfo {
                class: LineClass::S4,
                defence: empty.map_or(DefenceMask::EMPTY, DefenceMask::single),
            }
        }
        (4, _) => {
            let mut breakers = u16::MAX;
            let mut split = false;
            let mut shared = 0u16;
            for (_, _, t) in scan.trackers(cells) {
                if t.is_split_four() {
                    split = true;
                    breakers &= t.support().0;
                } else {
                    shared |= t.support().0;
                }
            }
            if split {
                LineInfo { class: LineClass::D4, defence: DefenceMask(breakers & 0x1ff) }
            } else {
                LineInfo { class: LineClass::S4, defence: DefenceMask(shared) }
            }
        }
        (3, 1) => LineInfo { class: LineClass::S3, defence: DefenceMask::EMPTY },
        (3, _) => {
            let mut defence = u16::MAX;
            let mut weak = false;
            for (_, _, t) in scan.trackers(cells) {
                if t.is_weak_three() {
                    weak = true;
                    defence &= t.support().0;
                }
            }
            if !weak {
                return LineInfo { class: LineClass::S3, defence: DefenceMask::EMPTY };
            }
            let defence = DefenceMask(defence & 0x1ff);
            let class = if defence.len() >= 3 { LineClass::W3 } else { LineClass::D3 };
            LineInfo { class, defence }
        }
        (2, 1) => LineInfo { class: LineClass::SimpleTwo, defence: DefenceMask::EMPTY },
        (2, _) => {
            let mut best = LineClass::SimpleTwo;
            for p in (0..LINE_LEN).filter(|&p| cells[p] == LineCell::Empty) {
                let mut filled = *cells;
                filled[p] = LineCell::Own;
                match classify_cells(&filled).class {
                    LineClass::D3 => best = LineClass::DoubleTwo,
                    LineClass::W3 if best < LineClass::WeakTwo => best = LineClass::WeakTwo,
                    _ => {}
                }
            }
            LineInfo { class: best, defence: DefenceMask::EMPTY }
        }
        _ => generic,
    }
}

/// Classifies the potential line `code` for the subject placing a stone at
/// the center. Codes with an illegal outside layout are generic.
pub fn classify_line(code: LineCode) -> LineInfo {
    if !code.is_legal() {
        return LineInfo::default();
    }
    let cells = code.with_center(LineCell::Own);
    let info = classify_cells(&cells);
    let defence = match info.class {
        LineClass::S5 => DefenceMask::single(CENTER),
        LineClass::D4 => DefenceMask(info.defence.0 | 1 << CENTER),
        LineClass::S4 | LineClass::D3 | LineClass::W3 => info.defence,
        _ => DefenceMask::EMPTY,
    };
    LineInfo { class: info.class, defence }
}

/// Defence of a potential line: the squares (center included) where the
/// opponent stops what the subject would create by playing the center.
pub fn potential_defence(class: LineClass, code: LineCode) -> Result<DefenceMask> {
    if !matches!(class, LineClass::S5 | LineClass::D4) {
        return Err(Error::Domain(format!("no potential defence for class {class}")));
    }
    let info = classify_line(code);
    if info.class != class {
        return Err(Error::Domain(format!("line {code} is {} not {class}", info.class)));
    }
    Ok(info.defence)
}

/// Cross pattern formed at one square by two of its directional lines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
#[repr(u8)]
pub enum CrossKind {
    #[default]
    None = 0,
    C33 = 1,
    C43 = 2,
    C44 = 3,
}

impl CrossKind {
    pub const ALL: [CrossKind; 4] = [CrossKind::None, CrossKind::C33, CrossKind::C43, CrossKind::C44];

    pub fn name(self) -> &'static str {
        match self {
            CrossKind::None => "None",
            CrossKind::C33 => "C33",
            CrossKind::C43 => "C43",
            CrossKind::C44 => "C44",
        }
    }

    pub fn from_name(s: &str) -> Option<CrossKind> {
        CrossKind::ALL.iter().copied().find(|c| c.name().eq_ignore_ascii_case(s))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct CrossClass {
    pub kind: CrossKind,
    /// Directions of the contributing pair, four first.
    pub dirs: Option<(u8, u8)>,
}

/// Strongest qualifying pair among a square's four directional classes.
pub fn cross_class(classes: [LineClass; 4]) -> CrossClass {
    let fours: Vec<u8> = (0..4u8).filter(|&d| classes[d as usize] == LineClass::S4).collect();
    let mut threes: Vec<u8> = (0..4u8).filter(|&d| classes[d as usize].is_three()).collect();
    // doubles before weaks, stable on direction
    threes.sort_by_key(|&d| std::cmp::Reverse(classes[d as usize]));
    let pick = |kind, a, b| CrossClass { kind, dirs: Some((a, b)) };
    if fours.len() >= 2 {
        pick(CrossKind::C44, fours[0], fours[1])
    } else if let (Some(&f), Some(&t)) = (fours.first(), threes.first()) {
        pick(CrossKind::C43, f, t)
    } else if threes.len() >= 2 {
        pick(CrossKind::C33, threes[0], threes[1])
    } else {
        CrossClass::default()
    }
}

/// Precomputed classification of every line code.
#[derive(Clone, PartialEq, Eq)]
pub struct LineTable {
    entries: Vec<LineInfo>,
}

impl fmt::Debug for LineTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LineTable").field("entries", &self.entries.len()).finish()
    }
}

const TABLE_MAGIC: &[u8; 8] = b"GMKLINE\0";
pub const TABLE_FORMAT_VERSION: u32 = 1;
const TABLE_HEADER_LEN: usize = 16;

fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

impl LineTable {
    pub fn build() -> LineTable {
        let entries = (0..TABLE_SIZE).map(|c| classify_line(LineCode(c as u16))).collect();
        LineTable { entries }
    }

    /// Process-wide table, built on first use.
    pub fn shared() -> Arc<LineTable> {
        static SHARED: OnceLock<Arc<LineTable>> = OnceLock::new();
        SHARED.get_or_init(|| Arc::new(LineTable::build())).clone()
    }

    #[inline]
    pub fn get(&self, code: LineCode) -> LineInfo {
        self.entries[code.0 as usize]
    }

    #[inline]
    pub fn class(&self, code: LineCode) -> LineClass {
        self.entries[code.0 as usize].class
    }

    /// Serialized layout: 8 magic bytes, u32 version, u32 record count, one
    /// little-endian u16 per code (`class << 12 | defence mask`), then a u64
    /// FNV-1a checksum of everything before it.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(TABLE_HEADER_LEN + 2 * TABLE_SIZE + 8);
        out.extend_from_slice(TABLE_MAGIC);
        out.extend_from_slice(&TABLE_FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&(TABLE_SIZE as u32).to_le_bytes());
        for e in &self.entries {
            let rec = (e.class as u16) << 12 | (e.defence.0 & 0x1ff);
            out.extend_from_slice(&rec.to_le_bytes());
        }
        let sum = fnv1a64(&out);
        out.extend_from_slice(&sum.to_le_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<LineTable> {
        let expected = TABLE_HEADER_LEN + 2 * TABLE_SIZE + 8;
        if bytes.len() != expected {
            return Err(Error::Parse(format!("table file is {} bytes, expected {expected}", bytes.len())));
        }
        if &bytes[..8] != TABLE_MAGIC {
            return Err(Error::Parse("bad table magic".into()));
        }
        let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
        if version != TABLE_FORMAT_VERSION {
            return Err(Error::Parse(format!("table format version {version} unsupported")));
        }
        let count = u32::from_le_bytes(bytes[12..16].try_into().unwrap());
        if count as usize != TABLE_SIZE {
            return Err(Error::Parse(format!("table has {count} records")));
        }
        let body = expected - 8;
        let sum = u64::from_le_bytes(bytes[body..].try_into().unwrap());
        if sum != fnv1a64(&bytes[..body]) {
            return Err(Error::Parse("table checksum mismatch".into()));
        }
        let entries = bytes[TABLE_HEADER_LEN..body]
            .chunks_exact(2)
            .map(|c| {
                let rec = u16::from_le_bytes([c[0], c[1]]);
                let class = LineClass::from_u8((rec >> 12) as u8)
                    .ok_or_else(|| Error::Parse(format!("bad class id {}", rec >> 12)))?;
                Ok(LineInfo { class, defence: DefenceMask(rec & 0x1ff) })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LineTable { entries })
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn read_from(path: &Path) -> Result<LineTable> {
        LineTable::from_bytes(&std::fs::read(path)?)
    }

    /// Loads a cached table, rebuilding and rewriting it when the file is
    /// missing or was written by another format version.
    pub fn load_or_build(path: &Path) -> Result<LineTable> {
        match LineTable::read_from(path) {
            Ok(t) => Ok(t),
            Err(e) => {
                log::info!("rebuilding line table at {}: {e}", path.display());
                let t = LineTable::build();
                t.write_to(path)?;
                Ok(t)
            }
        }
    }
}
