//! Lockless transposition table. Each slot holds two words, the key xored
//! with the data and the data itself, so a torn write fails the key check
//! and reads as a miss.

use std::sync::atomic::{AtomicU64, AtomicU8, Ordering::Relaxed};

use crate::board::Square;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Bound {
    Exact,
    Lower,
    Upper,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TtEntry {
    pub key: u64,
    /// Remaining plies searched below the position.
    pub depth: u8,
    pub value: i32,
    pub bound: Bound,
    pub best_move: Option<Square>,
    pub age: u8,
}

const NO_MOVE: u64 = 0x7ff;
const VALID: u64 = 1 << 61;

impl TtEntry {
    fn pack(&self) -> u64 {
        let bound = match self.bound {
            Bound::Exact => 0,
            Bound::Lower => 1,
            Bound::Upper => 2,
        };
        let mv = self.best_move.map_or(NO_MOVE, |s| s.0 as u64 & NO_MOVE);
        (self.value as u32 as u64)
            | (self.depth as u64) << 32
            | bound << 40
            | mv << 42
            | (self.age as u64) << 53
            | VALID
    }

    fn unpack(key: u64, data: u64) -> TtEntry {
        let bound = match (data >> 40) & 3 {
            0 => Bound::Exact,
            1 => Bound::Lower,
            _ => Bound::Upper,
        };
        let mv = (data >> 42) & NO_MOVE;
        TtEntry {
            key,
            value: data as u32 as i32,
            depth: (data >> 32) as u8,
            bound,
            best_move: (mv != NO_MOVE).then_some(Square(mv as u16)),
            age: (data >> 53) as u8,
        }
    }
}

pub struct TranspositionTable {
    slots: Vec<[AtomicU64; 2]>,
    mask: u64,
    age: AtomicU8,
}

impl std::fmt::Debug for TranspositionTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TranspositionTable({} slots)", self.slots.len())
    }
}

impl TranspositionTable {
    /// `entries` must be a power of two.
    pub fn new(entries: usize) -> Result<TranspositionTable> {
        if entries == 0 || !entries.is_power_of_two() {
            return Err(Error::Config(format!("tt_entries must be a power of two, got {entries}")));
        }
        let slots = (0..entries).map(|_| [AtomicU64::new(0), AtomicU64::new(0)]).collect();
        Ok(TranspositionTable { slots, mask: entries as u64 - 1, age: AtomicU8::new(0) })
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn age(&self) -> u8 {
        self.age.load(Relaxed)
    }

    /// Starts a new search; entries from earlier searches become stale.
    pub fn new_search(&self) {
        self.age.fetch_add(1, Relaxed);
    }

    pub fn clear(&self) {
        for s in &self.slots {
            s[0].store(0, Relaxed);
            s[1].store(0, Relaxed);
        }
    }

    fn slot(&self, key: u64) -> &[AtomicU64; 2] {
        &self.slots[(key & self.mask) as usize]
    }

    fn read(&self, key: u64) -> Option<TtEntry> {
        let s = self.slot(key);
        let data = s[1].load(Relaxed);
        let stored = s[0].load(Relaxed) ^ data;
        (data & VALID != 0).then(|| TtEntry::unpack(stored, data))
    }

    pub fn probe(&self, key: u64) -> Option<TtEntry> {
        self.read(key).filter(|e| e.key == key)
    }

    /// Replaces the slot when it is empty, holds the same key, is from an
    /// older search, or is no deeper than the new entry.
    pub fn store(&self, entry: TtEntry) {
        let entry = TtEntry { age: self.age(), ..entry };
        if let Some(old) = self.read(entry.key) {
            if old.key != entry.key && old.age == entry.age && old.depth > entry.depth {
                return;
            }
        }
        let data = entry.pack();
        let s = self.slot(entry.key);
        s[0].store(entry.key ^ data, Relaxed);
        s[1].store(data, Relaxed);
    }
}
